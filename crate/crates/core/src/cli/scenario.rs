use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::bundle::{Connection, TrivialBundle};
use crate::error::{Error, Result};
use crate::forms::VForm;
use crate::groupoid::{zoo, Groupoid};
use crate::smooth::Chart;

/// A scenario file: a seed, declarations, and the suites to run.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub groupoid: Option<GroupoidDecl>,
    #[serde(default)]
    pub connection: Option<ConnectionDecl>,
    /// Vector-valued forms by name.
    #[serde(default)]
    pub forms: BTreeMap<String, FormDecl>,
    pub suites: Vec<SuiteDecl>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDecl {
    pub zoo: String,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default = "one")]
    pub extra: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDecl {
    pub base_dim: usize,
    #[serde(default = "one")]
    pub group_dim: usize,
    /// One string of `;`-separated coefficients per Lie algebra direction.
    pub potential: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDecl {
    pub dim: usize,
    pub degree: usize,
    /// `;`-separated coefficients in `[i][J]` order.
    pub coeffs: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDecl {
    pub suite: String,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Names of declared forms, with suite-specific roles.
    #[serde(default)]
    pub forms: Vec<String>,
    /// Size of a perturbation of the level-2 tower form (nerve suites).
    #[serde(default)]
    pub perturb: Option<f64>,
}

fn one() -> usize {
    1
}

impl Scenario {
    pub fn from_json(src: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(src).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut s = Scenario::from_json(&src)?;
        if s.name.is_empty() {
            s.name = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(s)
    }

    /// Resolves every declaration, so that errors surface before any suite
    /// runs.
    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Config("scenario lists no suites".into()));
        }
        for name in self.forms.keys() {
            self.form(name)?;
        }
        if self.groupoid.is_some() {
            self.groupoid()?;
        }
        if self.connection.is_some() {
            self.connection()?;
        }
        for s in &self.suites {
            if !super::suites::SUITES.iter().any(|(n, _)| *n == s.suite) {
                return Err(Error::Config(format!("unknown suite `{}`", s.suite)));
            }
            for f in &s.forms {
                if !self.forms.contains_key(f) {
                    return Err(Error::Config(format!("suite `{}` references undeclared form `{f}`", s.suite)));
                }
            }
            if let Some(t) = s.tolerance {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("suite `{}` has non-positive tolerance", s.suite)));
                }
            }
        }
        Ok(())
    }

    pub fn form(&self, name: &str) -> Result<VForm> {
        let d = self
            .forms
            .get(name)
            .ok_or_else(|| Error::Config(format!("undeclared form `{name}`")))?;
        if d.degree > d.dim {
            return Err(Error::Config(format!("form `{name}` has degree {} above its dimension {}", d.degree, d.dim)));
        }
        VForm::parse(&d.coeffs, d.dim, d.degree)
    }

    pub fn groupoid(&self) -> Result<Groupoid> {
        let d = self
            .groupoid
            .as_ref()
            .ok_or_else(|| Error::Config("this suite needs a `groupoid` declaration".into()))?;
        zoo::by_name(&d.zoo, d.dim, d.extra)
    }

    pub fn connection(&self) -> Result<Option<Connection>> {
        let Some(d) = &self.connection else {
            return Ok(None);
        };
        let bundle = TrivialBundle::new(Chart::new(format!("R{}", d.base_dim), d.base_dim), d.group_dim);
        let parts: Vec<&str> = d.potential.iter().map(String::as_str).collect();
        Connection::parse(&bundle, &parts).map(Some)
    }
}

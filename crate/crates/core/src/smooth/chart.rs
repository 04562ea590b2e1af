use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::ExprFn;

/// A sign predicate on a window of coordinates: the point is admissible when
/// every component of `predicate` evaluated on `coords[offset..offset + arity]`
/// is strictly positive.
#[derive(Clone, Debug)]
struct Constraint {
    predicate: Arc<ExprFn>,
    offset: usize,
}

/// A global coordinate chart: an open subset of `R^dim`.
///
/// `bounds` is the box used for random sampling; the optional domain
/// predicates carve the admissible region out of `R^dim`.
#[derive(Clone)]
pub struct Chart {
    name: String,
    dim: usize,
    bounds: Vec<(f64, f64)>,
    constraints: Vec<Constraint>,
}

impl Chart {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Chart {
            name: name.into(),
            dim,
            bounds: vec![(-1.0, 1.0); dim],
            constraints: Vec::new(),
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.dim, "bounds must cover every coordinate");
        self.bounds = bounds;
        self
    }

    /// Adds a domain predicate over all coordinates.
    pub fn with_domain(mut self, predicate: ExprFn) -> Self {
        assert_eq!(predicate.arity_in(), self.dim);
        self.constraints.push(Constraint {
            predicate: Arc::new(predicate),
            offset: 0,
        });
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim
            && self.constraints.iter().all(|c| {
                let window = &p[c.offset..c.offset + c.predicate.arity_in()];
                matches!(c.predicate.eval(window), Ok(v) if v.iter().all(|x| *x > 0.0))
            })
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
                context: "chart point",
            });
        }
        if !self.contains(p) {
            return Err(Error::DomainViolation {
                chart: self.name.clone(),
                point: p.to_vec(),
            });
        }
        Ok(())
    }

    /// Cartesian product chart; coordinates of `a` come first.
    pub fn product(a: &Chart, b: &Chart) -> Chart {
        Chart::product_all(&format!("{}×{}", a.name, b.name), &[a, b])
    }

    pub fn product_all(name: &str, parts: &[&Chart]) -> Chart {
        let mut out = Chart::new(name, 0);
        for part in parts {
            for c in &part.constraints {
                out.constraints.push(Constraint {
                    predicate: c.predicate.clone(),
                    offset: c.offset + out.dim,
                });
            }
            out.bounds.extend_from_slice(&part.bounds);
            out.dim += part.dim;
        }
        out
    }

    /// Chart of `⊕^slots T(self)`: base coordinates followed by `slots`
    /// tangent vectors sampled in `[-1, 1]`.
    pub fn tangent(&self, slots: usize) -> Chart {
        let mut out = self.clone();
        out.name = if slots == 1 {
            format!("T{}", self.name)
        } else {
            format!("⊕{slots}T{}", self.name)
        };
        for _ in 0..slots * self.dim {
            out.bounds.push((-1.0, 1.0));
        }
        out.dim = self.dim * (slots + 1);
        out
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({}, dim {})", self.name, self.dim)
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVec {
    pub base: Vec<f64>,
    pub vec: Vec<f64>,
}

impl PointVec {
    pub fn new(base: Vec<f64>, vec: Vec<f64>) -> Self {
        assert_eq!(base.len(), vec.len(), "base and vector dimensions differ");
        PointVec { base, vec }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_predicate_by_sign() {
        let c = Chart::new("H", 2).with_domain(ExprFn::parse("x1", 2).unwrap());
        assert!(c.contains(&[0.5, -3.0]));
        assert!(!c.contains(&[-0.5, 0.0]));
        assert!(matches!(
            c.check(&[-1.0, 0.0]),
            Err(Error::DomainViolation { .. })
        ));
        assert!(matches!(
            c.check(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn product_shifts_constraints() {
        let h = Chart::new("H", 1).with_domain(ExprFn::parse("x1", 1).unwrap());
        let r = Chart::new("R", 1);
        let p = Chart::product(&r, &h);
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&[-5.0, 1.0]));
        assert!(!p.contains(&[5.0, -1.0]));
        let t = h.tangent(2);
        assert_eq!(t.dim(), 3);
        assert!(t.contains(&[1.0, -7.0, -7.0]));
        assert!(!t.contains(&[-1.0, 0.0, 0.0]));
    }
}

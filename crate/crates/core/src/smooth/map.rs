use std::fmt;
use std::sync::Arc;

use super::chart::{Chart, PointVec};
use super::jet::{constants, point_depth, values, Jet, MAX_DEPTH};
use super::linalg::Mat;
use crate::error::{Error, Result};
use crate::expr::ExprFn;

#[derive(Debug)]
enum Node {
    Expr(ExprFn),
    /// Output coordinate `k` is input coordinate `indices[k]`.
    Select(Vec<usize>),
    /// Concatenated outputs of several maps with a common source.
    Stack(Vec<SmoothMap>),
    /// `outer ∘ inner`.
    Compose(SmoothMap, SmoothMap),
    Constant(Vec<f64>),
    /// `(x, v₁..v_k) ↦ (f(x), Df(x)v₁, …, Df(x)v_k)`.
    Tangent(SmoothMap, usize),
}

/// A smooth map between coordinate domains, evaluable on jets.
///
/// Maps are immutable trees of combinators over [`ExprFn`] leaves and are cheap
/// to clone.
#[derive(Clone)]
pub struct SmoothMap {
    source_dim: usize,
    target_dim: usize,
    node: Arc<Node>,
    domain: Option<Arc<Chart>>,
}

impl SmoothMap {
    fn from_node(source_dim: usize, target_dim: usize, node: Node) -> Self {
        SmoothMap {
            source_dim,
            target_dim,
            node: Arc::new(node),
            domain: None,
        }
    }

    pub fn from_expr(f: ExprFn) -> Self {
        Self::from_node(f.arity_in(), f.arity_out(), Node::Expr(f))
    }

    /// Parses `source` as an [`ExprFn`] and checks its output count.
    pub fn parse(source: &str, source_dim: usize, target_dim: usize) -> Result<Self> {
        Ok(Self::from_expr(ExprFn::parse_exact(
            source, source_dim, target_dim,
        )?))
    }

    pub fn identity(dim: usize) -> Self {
        Self::select(dim, (0..dim).collect())
    }

    pub fn select(source_dim: usize, indices: Vec<usize>) -> Self {
        assert!(indices.iter().all(|&i| i < source_dim));
        Self::from_node(source_dim, indices.len(), Node::Select(indices))
    }

    /// Selects the contiguous coordinate block `start..start + len`.
    pub fn block(source_dim: usize, start: usize, len: usize) -> Self {
        Self::select(source_dim, (start..start + len).collect())
    }

    pub fn constant(source_dim: usize, value: Vec<f64>) -> Self {
        Self::from_node(source_dim, value.len(), Node::Constant(value))
    }

    pub fn stack(parts: Vec<SmoothMap>) -> Self {
        let source_dim = parts.first().map_or(0, |p| p.source_dim);
        assert!(parts.iter().all(|p| p.source_dim == source_dim));
        let target_dim = parts.iter().map(|p| p.target_dim).sum();
        Self::from_node(source_dim, target_dim, Node::Stack(parts))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SmoothMap) -> Self {
        assert_eq!(
            inner.target_dim, self.source_dim,
            "composition dimension mismatch"
        );
        Self::from_node(
            inner.source_dim,
            self.target_dim,
            Node::Compose(self.clone(), inner.clone()),
        )
    }

    /// `f × g` acting on concatenated coordinates.
    pub fn product(parts: &[SmoothMap]) -> Self {
        let source_dim: usize = parts.iter().map(|p| p.source_dim).sum();
        let mut offset = 0;
        let mut pieces = Vec::with_capacity(parts.len());
        for p in parts {
            pieces.push(p.after(&Self::block(source_dim, offset, p.source_dim)));
            offset += p.source_dim;
        }
        if pieces.is_empty() {
            return Self::constant(0, Vec::new());
        }
        Self::stack(pieces)
    }

    /// The lift to `⊕^slots T`: coordinates `(x, v₁, …, v_slots)`.
    pub fn tangent(&self, slots: usize) -> Self {
        Self::from_node(
            self.source_dim * (slots + 1),
            self.target_dim * (slots + 1),
            Node::Tangent(self.clone(), slots),
        )
    }

    /// Attaches a source chart whose domain is checked by [`SmoothMap::apply`].
    pub fn on(mut self, chart: &Chart) -> Self {
        assert_eq!(chart.dim(), self.source_dim);
        self.domain = Some(Arc::new(chart.clone()));
        self
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    fn check_arity(&self, found: usize) -> Result<()> {
        if found != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                found,
                context: "smooth map argument",
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        self.check_arity(x.len())?;
        match self.node.as_ref() {
            Node::Expr(f) => Ok(f.eval(x)?),
            Node::Select(idx) => Ok(idx.iter().map(|&i| x[i]).collect()),
            Node::Stack(parts) => {
                let mut out = Vec::with_capacity(self.target_dim);
                for p in parts {
                    out.extend(p.eval(x)?);
                }
                Ok(out)
            }
            Node::Compose(outer, inner) => outer.eval(&inner.eval(x)?),
            Node::Constant(v) => Ok(constants(v)),
            Node::Tangent(base, slots) => {
                let n = base.source_dim;
                let (p, vs) = x.split_at(n);
                if *slots == 0 {
                    return base.eval(p);
                }
                let depth = point_depth(x);
                let mut out = Vec::with_capacity(self.target_dim);
                let mut pushed = Vec::with_capacity(base.target_dim * slots);
                for s in 0..*slots {
                    let v = &vs[s * n..(s + 1) * n];
                    let (fx, dv) = base.push_at_depth(p, v, depth)?;
                    if s == 0 {
                        out.extend(fx);
                    }
                    pushed.extend(dv);
                }
                out.extend(pushed);
                Ok(out)
            }
        }
    }

    fn push_at_depth(&self, x: &[Jet], v: &[Jet], depth: usize) -> Result<(Vec<Jet>, Vec<Jet>)> {
        if depth >= MAX_DEPTH {
            return Err(Error::DepthExhausted(MAX_DEPTH));
        }
        let shifted: Vec<Jet> = x
            .iter()
            .zip(v)
            .map(|(xi, vi)| xi.with_direction(depth, vi))
            .collect();
        let y = self.eval(&shifted)?;
        let fx = y.iter().map(|j| strip(j, depth)).collect();
        let dv = y.iter().map(|j| j.part(depth)).collect();
        Ok((fx, dv))
    }

    /// `(f(x), Df(x)·v)` at a jet point.
    pub fn push_jet(&self, x: &[Jet], v: &[Jet]) -> Result<(Vec<Jet>, Vec<Jet>)> {
        self.check_arity(x.len())?;
        self.check_arity(v.len())?;
        let depth = point_depth(x).max(point_depth(v));
        self.push_at_depth(x, v, depth)
    }

    /// Jacobian at a jet point; column `j` is the pushforward of `e_j`.
    pub fn jacobian_jet(&self, x: &[Jet]) -> Result<Mat<Jet>> {
        self.check_arity(x.len())?;
        let depth = point_depth(x);
        let mut columns = Vec::with_capacity(self.source_dim);
        for j in 0..self.source_dim {
            let mut e = vec![Jet::ZERO; self.source_dim];
            e[j] = Jet::constant(1.0);
            columns.push(self.push_at_depth(x, &e, depth)?.1);
        }
        Ok(Mat::from_columns(self.target_dim, &columns))
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(p.len())?;
        if let Some(chart) = &self.domain {
            chart.check(p)?;
        }
        Ok(values(&self.eval(&constants(p))?))
    }

    pub fn pushforward(&self, pv: &PointVec) -> Result<PointVec> {
        self.check_arity(pv.base.len())?;
        if let Some(chart) = &self.domain {
            chart.check(&pv.base)?;
        }
        let (fx, dv) = self.push_jet(&constants(&pv.base), &constants(&pv.vec))?;
        Ok(PointVec::new(values(&fx), values(&dv)))
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<Mat<f64>> {
        self.check_arity(p.len())?;
        if let Some(chart) = &self.domain {
            chart.check(p)?;
        }
        let j = self.jacobian_jet(&constants(p))?;
        let data = (0..j.rows())
            .flat_map(|i| j.row(i).iter().map(Jet::value).collect::<Vec<_>>())
            .collect();
        Ok(Mat::from_rows(j.rows(), j.cols(), data))
    }
}

/// Drops every monomial containing `ε_dir`.
fn strip(j: &Jet, dir: usize) -> Jet {
    if j.depth() <= dir {
        return *j;
    }
    let bit = 1usize << dir;
    let coeffs: Vec<f64> = (0..bit).map(|m| j.coeff(m)).collect();
    Jet::from_coeffs(&coeffs)
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SmoothMap(R^{} -> R^{}, {:?})",
            self.source_dim, self.target_dim, self.node
        )
    }
}

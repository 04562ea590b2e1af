use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use super::index::{binomial, Basis};
use super::sform::{check_indices, check_point, contract, parse_component, sum_terms, CoeffFn, SForm};
use crate::error::{Error, Result};
use crate::expr::{ExprAst, ExprFn};
use crate::smooth::jet::{constants, values};
use crate::smooth::Jet;

/// A vector-valued `k`-form `K = Σ K^i_J dx^J ⊗ ∂_i` on an `n`-dimensional chart.
///
/// Coefficients are laid out as `[i][J]`: component `i` of the output vector,
/// then the increasing multi-index `J` in lexicographic order.
#[derive(Clone)]
pub struct VForm {
    dim: usize,
    degree: usize,
    coeffs: Arc<CoeffFn>,
}

impl VForm {
    pub fn from_fn(
        dim: usize,
        degree: usize,
        f: impl Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        VForm {
            dim,
            degree,
            coeffs: Arc::new(f),
        }
    }

    /// Coefficients from an [`ExprFn`] with `dim · C(dim, degree)` components
    /// in `[i][J]` order. For `degree = 1` this is a row-major matrix `K^i_j`.
    pub fn from_exprs(dim: usize, degree: usize, f: ExprFn) -> Result<Self> {
        if f.arity_in() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.arity_in(),
                context: "form coefficient arity",
            });
        }
        let len = dim * binomial(dim, degree);
        if f.arity_out() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: f.arity_out(),
                context: "vector-valued form coefficient count",
            });
        }
        Ok(Self::from_fn(dim, degree, move |x| Ok(f.eval(x)?)))
    }

    pub fn parse(src: &str, dim: usize, degree: usize) -> Result<Self> {
        let len = dim * binomial(dim, degree);
        Self::from_exprs(dim, degree, ExprFn::parse_exact(src, dim, len)?)
    }

    /// Builds `Σ coeff · dx^{j₁}∧…∧dx^{j_k} ⊗ ∂_out` from `(out, indices, expr)`
    /// terms with 0-based indices.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(usize, &[usize], &str)]) -> Result<Self> {
        let basis = Basis::get(dim, degree);
        let mut slots: Vec<Vec<(f64, ExprAst)>> = vec![Vec::new(); dim * basis.len()];
        for (out, idx, src) in terms {
            check_indices(dim, degree, idx)?;
            if *out >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: out + 1,
                    context: "output index out of range",
                });
            }
            let ast = parse_component(src, dim)?;
            if let Some((r, sign)) = basis.rank_signed(idx) {
                slots[out * basis.len() + r].push((sign, ast));
            }
        }
        let comps = slots.into_iter().map(sum_terms).collect();
        Self::from_exprs(dim, degree, ExprFn::from_components(dim, comps)?)
    }

    /// A vector field as a degree-0 form; `f` has `dim` components.
    pub fn vector_field(f: ExprFn) -> Result<Self> {
        let dim = f.arity_in();
        Self::from_exprs(dim, 0, f)
    }

    pub fn parse_vector_field(src: &str, dim: usize) -> Result<Self> {
        Self::vector_field(ExprFn::parse_exact(src, dim, dim)?)
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = dim * binomial(dim, degree);
        Self::from_fn(dim, degree, move |_| Ok(vec![Jet::ZERO; len]))
    }

    /// The identity endomorphism `Id = Σ dx^i ⊗ ∂_i`.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, 1, move |_| {
            let mut out = vec![Jet::ZERO; dim * dim];
            for i in 0..dim {
                out[i * dim + i] = Jet::constant(1.0);
            }
            Ok(out)
        })
    }

    /// Assembles `Σ_i ω^i ⊗ ∂_i` from scalar forms of a common degree.
    pub fn from_components(components: Vec<SForm>) -> Result<Self> {
        let dim = components.len();
        let degree = components.first().map_or(0, SForm::degree);
        for c in &components {
            if c.dim() != dim || c.degree() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "component of degree {} on dim {} in a {degree}-form on dim {dim}",
                    c.degree(),
                    c.dim()
                )));
            }
        }
        Ok(Self::from_fn(dim, degree, move |x| {
            let mut out = Vec::with_capacity(dim * binomial(dim, degree));
            for c in &components {
                out.extend(c.coeffs(x)?);
            }
            Ok(out)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `C(dim, degree)`, the number of coefficients per output component.
    pub fn width(&self) -> usize {
        binomial(self.dim, self.degree)
    }

    pub fn coeffs(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        check_point(self.dim, x)?;
        (self.coeffs)(x)
    }

    pub fn coeffs_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(values(&self.coeffs(&constants(p))?))
    }

    /// The scalar form `K^i`.
    pub fn component(&self, i: usize) -> SForm {
        assert!(i < self.dim);
        let (inner, w) = (self.clone(), self.width());
        SForm::from_fn(self.dim, self.degree, move |x| {
            let c = inner.coeffs(x)?;
            Ok(c[i * w..(i + 1) * w].to_vec())
        })
    }

    /// `K(X₁, …, X_k)` at a jet point.
    pub fn eval_on(&self, x: &[Jet], vectors: &[Vec<Jet>]) -> Result<Vec<Jet>> {
        if vectors.len() != self.degree {
            return Err(Error::DegreeMismatch(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        let c = self.coeffs(x)?;
        Ok(apply_coeffs(&c, self.dim, vectors))
    }

    pub fn eval_at(&self, p: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
        let vs: Vec<Vec<Jet>> = vectors.iter().map(|v| constants(v)).collect();
        Ok(values(&self.eval_on(&constants(p), &vs)?))
    }

    fn check_same(&self, other: &VForm) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
                context: "forms on different charts",
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "sum of a {}-form and a {}-form",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn linear_combination(terms: &[(f64, VForm)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::DegreeMismatch("empty linear combination".into()))?;
        for (_, t) in terms {
            first.check_same(t)?;
        }
        let (dim, degree, len) = (first.dim, first.degree, first.dim * first.width());
        let terms = terms.to_vec();
        Ok(Self::from_fn(dim, degree, move |x| {
            let mut out = vec![Jet::ZERO; len];
            for (c, t) in &terms {
                for (o, v) in out.iter_mut().zip(t.coeffs(x)?) {
                    *o += v.scale(*c);
                }
            }
            Ok(out)
        }))
    }

    pub fn scale(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::from_fn(self.dim, self.degree, move |x| {
            Ok(inner.coeffs(x)?.into_iter().map(|v| v.scale(c)).collect())
        })
    }

    /// `f · K` for a 0-form `f`.
    pub fn times(&self, f: &SForm) -> Result<Self> {
        if f.degree() != 0 || f.dim() != self.dim {
            return Err(Error::DegreeMismatch("multiplier must be a 0-form on the same chart".into()));
        }
        let (inner, f) = (self.clone(), f.clone());
        Ok(Self::from_fn(self.dim, self.degree, move |x| {
            let s = f.coeffs(x)?[0];
            Ok(inner.coeffs(x)?.into_iter().map(|v| v * s).collect())
        }))
    }

    /// `self ∘ other` for an endomorphism `self` (degree 1):
    /// `(K∘L)(X₁, …) = K(L(X₁, …))`.
    pub fn compose(&self, other: &VForm) -> Result<Self> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch(format!(
                "composition needs a 1-form on the left, found degree {}",
                self.degree
            )));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
                context: "composition of forms on different charts",
            });
        }
        let (k, l, n, w) = (self.clone(), other.clone(), self.dim, other.width());
        Ok(Self::from_fn(n, other.degree, move |x| {
            let (ck, cl) = (k.coeffs(x)?, l.coeffs(x)?);
            let mut out = vec![Jet::ZERO; n * w];
            for i in 0..n {
                for a in 0..n {
                    let kia = ck[i * n + a];
                    if kia.norm_inf() == 0.0 {
                        continue;
                    }
                    for r in 0..w {
                        out[i * w + r] += kia * cl[a * w + r];
                    }
                }
            }
            Ok(out)
        }))
    }
}

/// Applies `[i][J]` coefficients to vectors.
pub(crate) fn apply_coeffs(c: &[Jet], dim: usize, vectors: &[Vec<Jet>]) -> Vec<Jet> {
    let w = binomial(dim, vectors.len());
    (0..dim)
        .map(|i| contract(&c[i * w..(i + 1) * w], dim, vectors))
        .collect()
}

/// Applies a `dim × dim` row-major endomorphism to a vector.
pub(crate) fn apply_matrix(m: &[Jet], v: &[Jet]) -> Vec<Jet> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

impl fmt::Debug for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VForm(dim {}, degree {})", self.dim, self.degree)
    }
}

impl Add for VForm {
    type Output = VForm;
    /// Panics on mismatched dimension or degree.
    fn add(self, rhs: VForm) -> VForm {
        VForm::linear_combination(&[(1.0, self), (1.0, rhs)]).expect("mismatched forms")
    }
}

impl Sub for VForm {
    type Output = VForm;
    fn sub(self, rhs: VForm) -> VForm {
        VForm::linear_combination(&[(1.0, self), (-1.0, rhs)]).expect("mismatched forms")
    }
}

impl Neg for VForm {
    type Output = VForm;
    fn neg(self) -> VForm {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endomorphism_layout() {
        // K = dz ⊗ ∂z - x dy ⊗ ∂z
        let k = VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[1], "-x1")]).unwrap();
        let c = k.coeffs_at(&[2.0, 0.0, 0.0]).unwrap();
        assert_eq!(c, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0]);
        let v = k.eval_at(&[2.0, 0.0, 0.0], &[vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(v, vec![0.0, 0.0, -1.0]);
    }

    #[test]
    fn identity_composes_trivially() {
        let id = VForm::identity(3);
        let k = VForm::parse("x1; 0; x2*x3; 1; 0; 0; 0; x1; 2", 3, 1).unwrap();
        let p = [0.5, -1.0, 2.0];
        assert_eq!(id.compose(&k).unwrap().coeffs_at(&p).unwrap(), k.coeffs_at(&p).unwrap());
        assert_eq!(k.compose(&id).unwrap().coeffs_at(&p).unwrap(), k.coeffs_at(&p).unwrap());
    }

    #[test]
    fn two_form_values_are_antisymmetric() {
        let k = VForm::from_terms(3, 2, &[(0, &[0, 1], "x3"), (1, &[1, 2], "sin(x1)")]).unwrap();
        let p = [0.3, 0.2, -0.4];
        let (u, v) = (vec![1.0, -2.0, 0.5], vec![0.1, 0.7, 1.5]);
        let a = k.eval_at(&p, &[u.clone(), v.clone()]).unwrap();
        let b = k.eval_at(&p, &[v, u]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x + y).abs() < 1e-12);
        }
    }
}

//! Truncated nested dual numbers.
//!
//! A [`Jet`] of depth `d` is an element of `R[ε₀, …, ε_{d-1}] / (ε₀², …, ε_{d-1}²)`.
//! Nesting `d` first-order dual numbers gives exactly this algebra, so a jet of
//! depth `d` carries every mixed partial derivative of order ≤ `d` along the
//! seeded directions. Components are indexed by bitmasks over the infinitesimal
//! directions: `coeff(0b101)` is the coefficient of `ε₀ε₂`.
//!
//! Differentiating a lazily evaluated quantity at a point of depth `d` seeds the
//! fresh direction `ε_d` and reads back [`Jet::part`]. Every nested derivative
//! therefore consumes one level, up to [`MAX_DEPTH`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Maximum number of nested infinitesimal directions.
pub const MAX_DEPTH: usize = 4;
const WIDTH: usize = 1 << MAX_DEPTH;

#[derive(Clone, Copy)]
pub struct Jet {
    c: [f64; WIDTH],
    depth: u8,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        c: [0.0; WIDTH],
        depth: 0,
    };

    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; WIDTH];
        c[0] = value;
        Jet { c, depth: 0 }
    }

    /// `value + ε_dir`.
    pub fn seeded(value: f64, dir: usize) -> Self {
        Jet::constant(value).with_direction(dir, &Jet::constant(1.0))
    }

    /// Builds a jet from raw components; `coeffs.len()` must be `2^depth`.
    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        assert!(coeffs.len().is_power_of_two() && coeffs.len() <= WIDTH);
        let mut c = [0.0; WIDTH];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet {
            c,
            depth: coeffs.len().trailing_zeros() as u8,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    /// Coefficient of the monomial selected by `mask`.
    #[inline]
    pub fn coeff(&self, mask: usize) -> f64 {
        if mask < (1 << self.depth) {
            self.c[mask]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..1 << self.depth]
    }

    /// First derivative along `ε_dir` (the coefficient of `ε_dir` alone).
    pub fn derivative(&self, dir: usize) -> f64 {
        self.coeff(1 << dir)
    }

    /// Returns `self + tangent · ε_dir`.
    ///
    /// `tangent` must not involve `ε_dir` or any higher direction, and `self`
    /// must not already involve `ε_dir`.
    pub fn with_direction(mut self, dir: usize, tangent: &Jet) -> Self {
        assert!(dir < MAX_DEPTH, "jet depth exhausted");
        debug_assert!(tangent.depth() <= dir);
        let bit = 1usize << dir;
        let new_depth = (dir + 1).max(self.depth());
        for m in 0..(1usize << tangent.depth()) {
            self.c[m | bit] += tangent.c[m];
        }
        self.depth = new_depth as u8;
        self
    }

    /// The coefficient of `ε_dir` as a jet over the lower directions.
    ///
    /// Assumes no direction above `dir` is present.
    pub fn part(&self, dir: usize) -> Jet {
        if self.depth() <= dir {
            return Jet::ZERO;
        }
        debug_assert_eq!(self.depth(), dir + 1);
        let bit = 1usize << dir;
        let mut c = [0.0; WIDTH];
        for (m, slot) in c.iter_mut().enumerate().take(bit) {
            *slot = self.c[m | bit];
        }
        Jet {
            c,
            depth: dir as u8,
        }
    }

    /// Applies a scalar function given its derivatives `f(a₀), f'(a₀), …` at
    /// the value part. Needs at least `depth + 1` entries.
    fn compose(&self, derivs: &[f64]) -> Jet {
        let d = self.depth();
        if d == 0 {
            return Jet::constant(derivs[0]);
        }
        let mut delta = *self;
        delta.c[0] = 0.0;
        // Horner on the Taylor polynomial; delta^(d+1) = 0.
        let mut fact = 1.0;
        for j in 1..=d {
            fact *= j as f64;
        }
        let mut acc = Jet::constant(derivs[d] / fact);
        for j in (0..d).rev() {
            fact /= (j + 1) as f64;
            acc = acc * delta;
            acc.c[0] += derivs[j] / fact;
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let mut d = [0.0; MAX_DEPTH + 1];
        let mut p = 1.0 / a;
        for (j, slot) in d.iter_mut().enumerate().take(self.depth() + 1) {
            *slot = p;
            p *= -((j + 1) as f64) / a;
        }
        self.compose(&d)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_DEPTH + 1])
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let mut d = [0.0; MAX_DEPTH + 1];
        d[0] = a.ln();
        let mut p = 1.0 / a;
        for j in 1..=self.depth() {
            d[j] = p;
            p *= -(j as f64) / a;
        }
        self.compose(&d)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn tan(&self) -> Jet {
        self.sin() * self.cos().recip()
    }

    pub fn atan(&self) -> Jet {
        let a = self.value();
        let q = 1.0 / (1.0 + a * a);
        self.compose(&[
            a.atan(),
            q,
            -2.0 * a * q * q,
            (6.0 * a * a - 2.0) * q * q * q,
            -24.0 * a * (a * a - 1.0) * q * q * q * q,
        ])
    }

    /// Real power `a^r` for `a > 0`.
    pub fn powf(&self, r: f64) -> Jet {
        let a = self.value();
        let mut d = [0.0; MAX_DEPTH + 1];
        let mut coef = 1.0;
        for (j, slot) in d.iter_mut().enumerate().take(self.depth() + 1) {
            *slot = coef * a.powf(r - j as f64);
            coef *= r - j as f64;
        }
        self.compose(&d)
    }

    /// Integer power, valid for any base (nonzero when `n < 0`).
    pub fn powi(&self, n: i32) -> Jet {
        let a = self.value();
        let mut d = [0.0; MAX_DEPTH + 1];
        let mut coef = 1.0;
        for (j, slot) in d.iter_mut().enumerate().take(self.depth() + 1) {
            *slot = if coef == 0.0 {
                0.0
            } else {
                coef * a.powi(n - j as i32)
            };
            coef *= (n - j as i32) as f64;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn scale(mut self, s: f64) -> Jet {
        for v in self.c[..1 << self.depth].iter_mut() {
            *v *= s;
        }
        self
    }

    /// Largest absolute component; used for residual reporting.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::ZERO
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        let n = 1 << self.depth.max(other.depth);
        (0..n).all(|m| self.coeff(m) == other.coeff(m))
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            write!(f, "Jet({})", self.c[0])
        } else {
            write!(f, "Jet{:?}", self.coeffs())
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.c[0])?;
        for m in 1..(1usize << self.depth) {
            if self.c[m] != 0.0 {
                write!(f, " + {}·ε", self.c[m])?;
                for b in 0..MAX_DEPTH {
                    if m & (1 << b) != 0 {
                        write!(f, "{b}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, rhs: Jet) -> Jet {
        let depth = self.depth.max(rhs.depth);
        for m in 0..(1usize << rhs.depth) {
            self.c[m] += rhs.c[m];
        }
        self.depth = depth;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, rhs: Jet) -> Jet {
        let depth = self.depth.max(rhs.depth);
        for m in 0..(1usize << rhs.depth) {
            self.c[m] -= rhs.c[m];
        }
        self.depth = depth;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        if rhs.depth == 0 {
            return self.scale(rhs.c[0]);
        }
        if self.depth == 0 {
            return rhs.scale(self.c[0]);
        }
        let depth = self.depth.max(rhs.depth);
        let mut c = [0.0; WIDTH];
        // subset convolution: c[m] = Σ_{s ⊆ m} a[s]·b[m \ s]
        for (m, slot) in c.iter_mut().enumerate().take(1 << depth) {
            let mut s = m;
            let mut acc = 0.0;
            loop {
                acc += self.c[s] * rhs.c[m ^ s];
                if s == 0 {
                    break;
                }
                s = (s - 1) & m;
            }
            *slot = acc;
        }
        Jet { c, depth }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        if rhs.depth == 0 {
            return self.scale(1.0 / rhs.c[0]);
        }
        self * rhs.recip()
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::ZERO, |a, b| a + b)
    }
}

/// Depth of a point: the largest depth among its coordinates.
pub fn point_depth(x: &[Jet]) -> usize {
    x.iter().map(Jet::depth).max().unwrap_or(0)
}

pub fn constants(x: &[f64]) -> Vec<Jet> {
    x.iter().copied().map(Jet::constant).collect()
}

pub fn values(x: &[Jet]) -> Vec<f64> {
    x.iter().map(Jet::value).collect()
}

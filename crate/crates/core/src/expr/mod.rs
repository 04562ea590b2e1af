//! A small language of closed-form smooth functions.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! list   := expr (';' expr)* ';'?
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | variable | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | log | sqrt | atan
//! number := digits ('.' digits?)? ([eE] [+-]? digits)?
//! ```
//!
//! `^` binds tightest and is right-associative; unary minus sits below it, so
//! `-x1^2` is `-(x1^2)` and `2^3^2` is `2^9`. Variables are `x1..xn` or the
//! names passed to [`ExprFn::parse_named`].
//!
//! Evaluation is generic over [`Real`], so the same tree evaluates on `f64` and
//! on [`Jet`](crate::smooth::Jet)s. Domain problems (log of a non-positive
//! value, division by zero, ...) are errors carrying the source position.

mod ast;
mod lexer;
mod parser;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

pub use ast::{BinOp, ExprAst, Func};

use crate::smooth::Jet;

/// Source position of a node. Two spans always compare equal so that trees
/// compare structurally.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("arity violation at {line}:{col}: {message}")]
    Arity {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("point has {found} coordinates, function takes {expected}")]
    PointArity { expected: usize, found: usize },
    #[error("domain error at {line}:{col}: {message}")]
    Domain {
        line: usize,
        col: usize,
        message: String,
    },
}

/// Scalar types expressions can be evaluated over.
pub trait Real:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    /// Number of infinitesimal directions carried (0 for plain reals).
    fn order(&self) -> usize;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn order(&self) -> usize {
        0
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Real for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn order(&self) -> usize {
        self.depth()
    }
    fn sin(self) -> Self {
        Jet::sin(&self)
    }
    fn cos(self) -> Self {
        Jet::cos(&self)
    }
    fn tan(self) -> Self {
        Jet::tan(&self)
    }
    fn exp(self) -> Self {
        Jet::exp(&self)
    }
    fn ln(self) -> Self {
        Jet::ln(&self)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(&self)
    }
    fn atan(self) -> Self {
        Jet::atan(&self)
    }
    fn powi(self, n: i32) -> Self {
        Jet::powi(&self, n)
    }
}

/// A vector of expressions sharing one input arity: `R^arity_in -> R^arity_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprFn {
    arity_in: usize,
    components: Vec<ExprAst>,
    names: Vec<String>,
}

impl ExprFn {
    /// Parses `;`-separated components over variables `x1..x{arity_in}`.
    pub fn parse(source: &str, arity_in: usize) -> Result<Self, ExprError> {
        let names: Vec<String> = (1..=arity_in).map(|i| format!("x{i}")).collect();
        Self::parse_named(source, &names)
    }

    /// Parses with caller-chosen variable names; `x1..xn` remain accepted.
    pub fn parse_named(source: &str, names: &[String]) -> Result<Self, ExprError> {
        let components = parser::Parser::new(source, names)?.parse_list()?;
        Self::from_components(names.len(), components).map(|mut f| {
            f.names = names.to_vec();
            f
        })
    }

    /// Parses and checks the number of components.
    pub fn parse_exact(source: &str, arity_in: usize, arity_out: usize) -> Result<Self, ExprError> {
        let f = Self::parse(source, arity_in)?;
        if f.arity_out() != arity_out {
            return Err(ExprError::ComponentCount {
                expected: arity_out,
                found: f.arity_out(),
            });
        }
        Ok(f)
    }

    pub fn from_components(arity_in: usize, components: Vec<ExprAst>) -> Result<Self, ExprError> {
        for c in &components {
            if let Some(i) = c.max_var() {
                if i >= arity_in {
                    return Err(ExprError::Arity {
                        line: 0,
                        col: 0,
                        message: format!("variable x{} outside x1..x{arity_in}", i + 1),
                    });
                }
            }
        }
        Ok(ExprFn {
            arity_in,
            components,
            names: (1..=arity_in).map(|i| format!("x{i}")).collect(),
        })
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ExprAst] {
        &self.components
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn eval<T: Real>(&self, point: &[T]) -> Result<Vec<T>, ExprError> {
        if point.len() != self.arity_in {
            return Err(ExprError::PointArity {
                expected: self.arity_in,
                found: point.len(),
            });
        }
        self.components.iter().map(|c| c.eval(point)).collect()
    }
}

impl fmt::Display for ExprFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", c.display(&self.names))?;
        }
        Ok(())
    }
}

/// Evaluates `f` on jets.
pub fn evaluate(f: &ExprFn, point: &[Jet]) -> Result<Vec<Jet>, ExprError> {
    f.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_two_variables() {
        let f = ExprFn::parse("x1 + x2", 2).unwrap();
        assert_eq!(f.eval(&[1.0, 2.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn two_components() {
        let f = ExprFn::parse("x1*x2; x1 - x2", 2).unwrap();
        assert_eq!(f.eval(&[3.0, 4.0]).unwrap(), vec![12.0, -1.0]);
    }

    #[test]
    fn pythagorean_identity() {
        let f = ExprFn::parse("sin(x1)^2 + cos(x1)^2", 1).unwrap();
        for x in [-3.0, -0.4, 0.0, 1.3, 7.9, 123.4] {
            assert!((f.eval(&[x]).unwrap()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let f = ExprFn::parse("-x1^2; 2^3^2; 2*3+4; 2+3*4; 8/4/2; x1^-1", 1).unwrap();
        assert_eq!(
            f.eval(&[3.0]).unwrap(),
            vec![-9.0, 512.0, 10.0, 14.0, 1.0, 1.0 / 3.0]
        );
    }

    #[test]
    fn square_derivative() {
        let f = ExprFn::parse("x1^2", 1).unwrap();
        let y = evaluate(&f, &[Jet::seeded(3.0, 0)]).unwrap();
        assert_eq!(y[0].value(), 9.0);
        assert_eq!(y[0].derivative(0), 6.0);
    }

    #[test]
    fn exp_derivative_at_zero() {
        let f = ExprFn::parse("exp(x1)", 1).unwrap();
        let y = evaluate(&f, &[Jet::seeded(0.0, 0)]).unwrap();
        assert_eq!(y[0].value(), 1.0);
        assert_eq!(y[0].derivative(0), 1.0);
    }

    #[test]
    fn mixed_second_derivative_matches_central_differences() {
        let f = ExprFn::parse("x1*x2", 2).unwrap();
        let (x, y, h) = (0.8, -1.3, 1e-4);
        let g = |a: f64, b: f64| f.eval(&[a, b]).unwrap()[0];
        let fd = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h))
            / (4.0 * h * h);
        let ad = evaluate(&f, &[Jet::seeded(x, 0), Jet::seeded(y, 1)]).unwrap()[0].coeff(0b11);
        assert!((fd - 1.0).abs() < 1e-6);
        assert_eq!(ad, 1.0);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match ExprFn::parse("x1 +\n  * x2", 2) {
            Err(ExprError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ExprFn::parse("(x1", 1),
            Err(ExprError::Syntax { .. })
        ));
        assert!(matches!(
            ExprFn::parse("x1 $ 2", 1),
            Err(ExprError::Syntax { line: 1, col: 4, .. })
        ));
    }

    #[test]
    fn unknown_identifier_and_arity() {
        assert!(matches!(
            ExprFn::parse("foo(x1)", 1),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            ExprFn::parse("y + 1", 1),
            Err(ExprError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            ExprFn::parse("x3", 2),
            Err(ExprError::Arity { line: 1, col: 1, .. })
        ));
        assert!(matches!(ExprFn::parse("x0", 2), Err(ExprError::Arity { .. })));
        let f = ExprFn::parse("x1", 2).unwrap();
        assert!(matches!(
            f.eval(&[1.0]),
            Err(ExprError::PointArity { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn named_variables() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let f = ExprFn::parse_named("z - x*y", &names).unwrap();
        assert_eq!(f.eval(&[2.0, 3.0, 10.0]).unwrap(), vec![4.0]);
        let g = ExprFn::parse_named(&f.to_string(), &names).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn domain_errors_are_reported() {
        let f = ExprFn::parse("1 + log(x1)", 1).unwrap();
        match f.eval(&[-1.0]) {
            Err(ExprError::Domain { line, col, .. }) => assert_eq!((line, col), (1, 5)),
            other => panic!("{other:?}"),
        }
        let g = ExprFn::parse("1/(x1 - 2)", 1).unwrap();
        assert!(matches!(g.eval(&[2.0]), Err(ExprError::Domain { .. })));
        let h = ExprFn::parse("sqrt(x1)", 1).unwrap();
        assert!(matches!(h.eval(&[-0.5]), Err(ExprError::Domain { .. })));
        assert!(matches!(
            evaluate(&h, &[Jet::seeded(0.0, 0)]),
            Err(ExprError::Domain { .. })
        ));
        let p = ExprFn::parse("x1^0.5", 1).unwrap();
        assert!(matches!(p.eval(&[-2.0]), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "-x1^2 + sin(x2)/(1 + x1*x1) - 2.5e-3^x2; atan(x2 - -x1); sqrt(exp(x1))";
        let f = ExprFn::parse(src, 2).unwrap();
        let g = ExprFn::parse(&f.to_string(), 2).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.eval(&[0.3, 0.7]).unwrap(), g.eval(&[0.3, 0.7]).unwrap());
    }

    #[test]
    fn empty_list_and_trailing_semicolon() {
        assert_eq!(ExprFn::parse("", 2).unwrap().arity_out(), 0);
        assert_eq!(ExprFn::parse("x1; x2;", 2).unwrap().arity_out(), 2);
        assert!(matches!(
            ExprFn::parse_exact("x1", 1, 2),
            Err(ExprError::ComponentCount { expected: 2, found: 1 })
        ));
    }
}

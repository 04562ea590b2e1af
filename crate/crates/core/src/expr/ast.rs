use std::fmt;

use super::{ExprError, Real, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Spans record the source position of the node for error
/// reporting and never participate in equality.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Var(usize),
    Num(f64),
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>, Span),
    Call(Func, Box<ExprAst>, Span),
}

impl ExprAst {
    pub fn bin(op: BinOp, a: ExprAst, b: ExprAst) -> ExprAst {
        ExprAst::Bin(op, Box::new(a), Box::new(b), Span::default())
    }

    pub fn call(f: Func, a: ExprAst) -> ExprAst {
        ExprAst::Call(f, Box::new(a), Span::default())
    }

    pub fn neg(a: ExprAst) -> ExprAst {
        ExprAst::Neg(Box::new(a))
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            ExprAst::Var(i) => Some(*i),
            ExprAst::Num(_) => None,
            ExprAst::Neg(a) | ExprAst::Call(_, a, _) => a.max_var(),
            ExprAst::Bin(_, a, b, _) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprAst::Var(_) | ExprAst::Num(_) => 1,
            ExprAst::Neg(a) | ExprAst::Call(_, a, _) => 1 + a.depth(),
            ExprAst::Bin(_, a, b, _) => 1 + a.depth().max(b.depth()),
        }
    }

    fn integer_exponent(&self) -> Option<i32> {
        let v = match self {
            ExprAst::Num(v) => *v,
            ExprAst::Neg(a) => match a.as_ref() {
                ExprAst::Num(v) => -*v,
                _ => return None,
            },
            _ => return None,
        };
        (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T, ExprError> {
        Ok(match self {
            ExprAst::Var(i) => x[*i],
            ExprAst::Num(v) => T::from_f64(*v),
            ExprAst::Neg(a) => -a.eval(x)?,
            ExprAst::Bin(op, a, b, span) => {
                let lhs = a.eval(x)?;
                if *op == BinOp::Pow {
                    if let Some(n) = b.integer_exponent() {
                        if n < 0 && lhs.value() == 0.0 {
                            return Err(domain(span, "zero raised to a negative power"));
                        }
                        return Ok(lhs.powi(n));
                    }
                    let rhs = b.eval(x)?;
                    let r = rhs.value();
                    if rhs.order() == 0 && r.fract() == 0.0 && r.abs() <= i32::MAX as f64 {
                        if r < 0.0 && lhs.value() == 0.0 {
                            return Err(domain(span, "zero raised to a negative power"));
                        }
                        return Ok(lhs.powi(r as i32));
                    }
                    if lhs.value() < 0.0 || (lhs.value() == 0.0 && lhs.order() > 0) {
                        return Err(domain(
                            span,
                            format!("non-integer power of base {}", lhs.value()),
                        ));
                    }
                    if lhs.value() == 0.0 {
                        return Ok(T::from_f64(0f64.powf(rhs.value())));
                    }
                    return Ok((rhs * lhs.ln()).exp());
                }
                let rhs = b.eval(x)?;
                match op {
                    BinOp::Add => lhs + rhs,
                    BinOp::Sub => lhs - rhs,
                    BinOp::Mul => lhs * rhs,
                    BinOp::Div => {
                        if rhs.value() == 0.0 {
                            return Err(domain(span, "division by zero"));
                        }
                        lhs / rhs
                    }
                    BinOp::Pow => unreachable!(),
                }
            }
            ExprAst::Call(f, a, span) => {
                let v = a.eval(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => {
                        if v.value().cos() == 0.0 {
                            return Err(domain(span, "tan at a pole"));
                        }
                        v.tan()
                    }
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v.value() <= 0.0 {
                            return Err(domain(
                                span,
                                format!("log of non-positive value {}", v.value()),
                            ));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v.value() < 0.0 || (v.value() == 0.0 && v.order() > 0) {
                            return Err(domain(
                                span,
                                format!("sqrt of {} is not differentiable", v.value()),
                            ));
                        }
                        v.sqrt()
                    }
                    Func::Atan => v.atan(),
                }
            }
        })
    }

    /// Renders with explicit parentheses so that reparsing yields the same tree.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Printer { ast: self, names }
    }
}

fn domain(span: &Span, message: impl Into<String>) -> ExprError {
    ExprError::Domain {
        line: span.line,
        col: span.col,
        message: message.into(),
    }
}

struct Printer<'a> {
    ast: &'a ExprAst,
    names: &'a [String],
}

impl Printer<'_> {
    fn write(&self, ast: &ExprAst, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match ast {
            ExprAst::Var(i) => match self.names.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "x{}", i + 1),
            },
            ExprAst::Num(v) => {
                if *v < 0.0 {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            ExprAst::Neg(a) => {
                write!(f, "(-")?;
                self.write(a, f)?;
                write!(f, ")")
            }
            ExprAst::Bin(op, a, b, _) => {
                write!(f, "(")?;
                self.write(a, f)?;
                write!(f, " {} ", op.symbol())?;
                self.write(b, f)?;
                write!(f, ")")
            }
            ExprAst::Call(func, a, _) => {
                write!(f, "{}(", func.name())?;
                self.write(a, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.ast, f)
    }
}

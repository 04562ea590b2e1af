use super::ast::{BinOp, ExprAst, Func};
use super::lexer::{tokenize, Tok, Token};
use super::{ExprError, Span};

pub(crate) struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, names: &'a [String]) -> Result<Self, ExprError> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
            names,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, token: &Token, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            line: token.span.line,
            col: token.span.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.error(&t, format!("expected {what}, found {:?}", t.tok)))
        }
    }

    /// `list := expr (';' expr)* ';'?`
    pub fn parse_list(&mut self) -> Result<Vec<ExprAst>, ExprError> {
        let mut out = Vec::new();
        if self.peek().tok == Tok::Eof {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            match self.peek().tok {
                Tok::Semi => {
                    self.bump();
                    if self.peek().tok == Tok::Eof {
                        break;
                    }
                }
                Tok::Eof => break,
                _ => {
                    let t = self.peek().clone();
                    return Err(self.error(&t, format!("unexpected {:?}", t.tok)));
                }
            }
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.term()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    /// `power := atom ('^' unary)?`; right-associative through `unary`.
    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            let span = self.bump().span;
            let exponent = self.unary()?;
            return Ok(ExprAst::Bin(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
                span,
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(ExprAst::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownIdentifier {
                        name: name.clone(),
                        line: t.span.line,
                        col: t.span.col,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(ExprAst::Call(func, Box::new(arg), t.span));
                }
                self.variable(name, t.span)
            }
            ref other => Err(self.error(&t, format!("unexpected {other:?}"))),
        }
    }

    fn variable(&self, name: &str, span: Span) -> Result<ExprAst, ExprError> {
        if name == "pi" {
            return Ok(ExprAst::Num(std::f64::consts::PI));
        }
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(ExprAst::Var(i));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                let idx: usize = digits.parse().unwrap_or(usize::MAX);
                if idx == 0 || idx > self.names.len() {
                    return Err(ExprError::Arity {
                        line: span.line,
                        col: span.col,
                        message: format!(
                            "variable `{name}` outside x1..x{}",
                            self.names.len()
                        ),
                    });
                }
                return Ok(ExprAst::Var(idx - 1));
            }
        }
        Err(ExprError::UnknownIdentifier {
            name: name.to_string(),
            line: span.line,
            col: span.col,
        })
    }
}

//! Polynomial expressions.
//!
//! ```text
//! poly   := term ('+' term | '-' term)*
//! term   := factor ('*' factor)*
//! factor := NAT | VAR ('^' NAT)? | '(' poly ')'
//! ```
//!
//! Literals act through `n·1`, so `3` is `1 + 1 + 1` in the chosen semiring.

use num_bigint::BigInt;
use semitangent::poly::{Comb, Mono, Poly};
use semitangent::render::{mono_text, poly_text};
use semitangent::semiring::{Scalar, Semiring};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared variable `{name}` at position {pos}")]
    UndeclaredVariable { name: String, pos: usize },
    #[error("negation unavailable in semiring {0}")]
    Negation(Semiring),
    #[error("exponent at position {pos} must be a natural literal")]
    Exponent { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Nat(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '^' => Some(Token::Caret),
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Token::Nat(digits.parse().expect("ascii digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || matches!(chars[i].1, '_' | '\'' | '.')) {
                i += 1;
            }
            out.push((pos, Token::Ident(chars[start..i].iter().map(|(_, c)| c).collect())));
        } else {
            return Err(ParseError::Syntax {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
    vars: &'a [String],
    sr: Semiring,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let message = match self.peek() {
            None => format!("expected {wanted}, found end of input"),
            Some(t) => format!("expected {wanted}, found {}", describe(t)),
        };
        ParseError::Syntax { pos: self.pos(), message }
    }

    fn poly(&mut self) -> Result<Poly<usize>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.at += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    if !self.sr.has_negatives() {
                        return Err(ParseError::Negation(self.sr));
                    }
                    self.at += 1;
                    acc = acc.add(&self.term()?.scale(&Scalar::int(-1)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<usize>, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.at += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly<usize>, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Token::Nat(n)) => {
                self.at += 1;
                Ok(Poly::constant(self.sr, self.sr.nat(&n)))
            }
            Some(Token::Ident(name)) => {
                self.at += 1;
                let v = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(ParseError::UndeclaredVariable { name, pos })?;
                let mut e = 1;
                if self.peek() == Some(&Token::Caret) {
                    self.at += 1;
                    let pos = self.pos();
                    match self.peek() {
                        Some(Token::Nat(n)) => {
                            e = u32::try_from(n).map_err(|_| ParseError::Exponent { pos })?;
                            self.at += 1;
                        }
                        _ => return Err(ParseError::Exponent { pos }),
                    }
                }
                Ok(Poly::basis(self.sr, Mono::power(v, e)))
            }
            Some(Token::Open) => {
                self.at += 1;
                let inner = self.poly()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.unexpected("`)`"));
                }
                self.at += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, variable or `(`")),
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Nat(n) => format!("`{n}`"),
        Token::Ident(s) => format!("`{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Caret => "`^`".into(),
        Token::Open => "`(`".into(),
        Token::Close => "`)`".into(),
    }
}

pub fn parse_polynomial(text: &str, vars: &[String], sr: Semiring) -> Result<Poly<usize>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        end: text.len(),
        vars,
        sr,
    };
    let out = p.poly()?;
    if p.at != p.tokens.len() {
        return Err(p.unexpected("an operator"));
    }
    Ok(out)
}

pub fn format_polynomial(p: &Poly<usize>, vars: &[String]) -> String {
    poly_text(p, |v| vars[*v].clone())
}

/// `d(p)` grouped by variable: `p_x (x) + p_y (y)`.
pub fn format_derivative(d: &Comb<(Mono<usize>, usize)>, vars: &[String]) -> String {
    let sr = d.semiring();
    let mut parts: Vec<Poly<usize>> = vec![Poly::zero(sr); vars.len()];
    for ((m, v), c) in d.iter() {
        parts[*v].add_term(m.clone(), c.clone());
    }
    let name = |v: &usize| vars[*v].clone();
    let terms: Vec<String> = parts
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(v, p)| {
            let text = poly_text(p, name);
            if p.len() > 1 || text.starts_with("0 - ") {
                format!("({text}) ({})", vars[v])
            } else {
                format!("{text} ({})", vars[v])
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn format_monomial(m: &Mono<usize>, vars: &[String]) -> String {
    mono_text(m, &|v: &usize| vars[*v].clone())
}

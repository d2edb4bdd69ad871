//! Reader for the clause notation grammars are written in.
//!
//! ```text
//! x_0(X, Segments) := mark:marked & conc(X, Segments).
//! phon::[left:phon, right:phon].
//! ```
//!
//! `&` binds tighter than `;`, `~` and `feature:` bind tighter than `&`.
//! Lowercase or quoted names are types, features or relations; capitalized
//! names and `_` are variables. `%` starts a comment.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    Var(String),
    Anon,
    Call(String, Vec<Expr>),
    Feat(String, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    List(Vec<Expr>, Option<Box<Expr>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Clause {
        name: String,
        params: Vec<Expr>,
        body: Expr,
        line: usize,
    },
    Appropriate {
        sort: String,
        features: Vec<(String, String)>,
        line: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Define,
    Declare,
    Colon,
    Amp,
    Semi,
    Tilde,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Bar,
    Comma,
    Dot,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let err = |line, message: String| SyntaxError { line, message };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\'' => {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '\'' {
                    if chars[i] == '\n' {
                        return Err(err(line, "unterminated quoted name".into()));
                    }
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(err(line, "unterminated quoted name".into()));
                }
                toks.push((Tok::Name(chars[start..i].iter().collect()), line));
                i += 1;
            }
            ':' => match chars.get(i + 1) {
                Some('=') => {
                    toks.push((Tok::Define, line));
                    i += 2;
                }
                Some(':') => {
                    toks.push((Tok::Declare, line));
                    i += 2;
                }
                _ => {
                    toks.push((Tok::Colon, line));
                    i += 1;
                }
            },
            '&' | ';' | '~' | '(' | ')' | '[' | ']' | '|' | ',' | '.' => {
                let t = match c {
                    '&' => Tok::Amp,
                    ';' => Tok::Semi,
                    '~' => Tok::Tilde,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '|' => Tok::Bar,
                    ',' => Tok::Comma,
                    _ => Tok::Dot,
                };
                toks.push((t, line));
                i += 1;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if c.is_uppercase() || c == '_' {
                    toks.push((Tok::Var(word), line));
                } else {
                    toks.push((Tok::Name(word), line));
                }
            }
            other => return Err(err(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn name(&mut self) -> Result<String, SyntaxError> {
        match self.next() {
            Some(Tok::Name(n)) => Ok(n),
            _ => {
                self.pos -= 1;
                self.error("expected a name")
            }
        }
    }

    fn item(&mut self) -> Result<Item, SyntaxError> {
        let line = self.line();
        let name = self.name()?;
        if self.peek() == Some(&Tok::Declare) {
            self.pos += 1;
            self.expect(Tok::LBrack, "`[`")?;
            let mut features = Vec::new();
            loop {
                let f = self.name()?;
                self.expect(Tok::Colon, "`:`")?;
                let v = self.name()?;
                features.push((f, v));
                match self.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBrack) => break,
                    _ => {
                        self.pos -= 1;
                        return self.error("expected `,` or `]`");
                    }
                }
            }
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Item::Appropriate {
                sort: name,
                features,
                line,
            });
        }
        let params = if self.peek() == Some(&Tok::LParen) {
            self.args()?
        } else {
            Vec::new()
        };
        self.expect(Tok::Define, "`:=`")?;
        let body = self.expr()?;
        self.expect(Tok::Dot, "`.` at end of clause")?;
        Ok(Item::Clause {
            name,
            params,
            body,
            line,
        })
    }

    fn args(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expr()?];
        loop {
            match self.next() {
                Some(Tok::Comma) => args.push(self.expr()?),
                Some(Tok::RParen) => return Ok(args),
                _ => {
                    self.pos -= 1;
                    return self.error("expected `,` or `)`");
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.conj()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let right = self.conj()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let right = self.unary()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::LBrack) => self.list(),
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(if v == "_" { Expr::Anon } else { Expr::Var(v) })
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                match self.peek() {
                    Some(Tok::LParen) => Ok(Expr::Call(n, self.args()?)),
                    Some(Tok::Colon) => {
                        self.pos += 1;
                        Ok(Expr::Feat(n, Box::new(self.unary()?)))
                    }
                    _ => Ok(Expr::Name(n)),
                }
            }
            _ => self.error("expected a term"),
        }
    }

    fn list(&mut self) -> Result<Expr, SyntaxError> {
        self.expect(Tok::LBrack, "`[`")?;
        if self.peek() == Some(&Tok::RBrack) {
            self.pos += 1;
            return Ok(Expr::List(Vec::new(), None));
        }
        let mut items = vec![self.expr()?];
        loop {
            match self.next() {
                Some(Tok::Comma) => items.push(self.expr()?),
                Some(Tok::Bar) => {
                    let tail = self.expr()?;
                    self.expect(Tok::RBrack, "`]`")?;
                    return Ok(Expr::List(items, Some(Box::new(tail))));
                }
                Some(Tok::RBrack) => return Ok(Expr::List(items, None)),
                _ => {
                    self.pos -= 1;
                    return self.error("expected `,`, `|` or `]`");
                }
            }
        }
    }
}

/// Parses a grammar module into clauses and appropriateness declarations.
pub fn parse_module(src: &str) -> Result<Vec<Item>, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let mut items = Vec::new();
    while p.peek().is_some() {
        items.push(p.item()?);
    }
    Ok(items)
}

/// Parses a single term, e.g. a query goal or a category expression.
pub fn parse_term(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    if p.peek().is_none() {
        return p.error("empty term");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error("trailing input after term");
    }
    Ok(e)
}

impl Expr {
    /// Whether the expression only consists of names and `~ & ;`.
    pub fn is_name_formula(&self) -> bool {
        match self {
            Expr::Name(_) => true,
            Expr::Not(e) => e.is_name_formula(),
            Expr::And(a, b) | Expr::Or(a, b) => a.is_name_formula() && b.is_name_formula(),
            _ => false,
        }
    }
}

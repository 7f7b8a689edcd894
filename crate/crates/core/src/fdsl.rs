//! A small expression language for monotone functions on tuples of
//! nonnegative integers.
//!
//! ```text
//! expr  := sum
//! sum   := term ('+' term)*
//! term  := atom ('/' INT)*
//! atom  := INT | VAR | 'max(' expr (',' expr)+ ')' | 'min(' expr (',' expr)+ ')'
//!        | '(' expr ')' | '[' expr '>' INT ']'
//! VAR   := 'x' INDEX        (1-based)
//! ```
//!
//! Every construct is monotone, so every expressible function is monotone
//! on all of the nonnegative orthant. Subtraction and multiplication are
//! deliberately absent. Arithmetic saturates at `u32::MAX`, which keeps
//! monotonicity.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Expression tree of a [`FunctionSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(u32),
    /// 1-based variable index.
    Var(usize),
    Sum(Box<Expr>, Box<Expr>),
    Max(Vec<Expr>),
    Min(Vec<Expr>),
    /// Floor division by a positive literal.
    Div(Box<Expr>, u32),
    /// `[e > c]`, valued in {0, 1}.
    Threshold(Box<Expr>, u32),
}

impl Expr {
    fn eval(&self, coords: &[u32]) -> u32 {
        match self {
            Expr::Lit(c) => *c,
            Expr::Var(i) => coords[i - 1],
            Expr::Sum(a, b) => a.eval(coords).saturating_add(b.eval(coords)),
            Expr::Max(args) => args.iter().map(|e| e.eval(coords)).max().unwrap_or(0),
            Expr::Min(args) => args.iter().map(|e| e.eval(coords)).min().unwrap_or(0),
            Expr::Div(e, d) => e.eval(coords) / d,
            Expr::Threshold(e, c) => u32::from(e.eval(coords) > *c),
        }
    }

    fn max_var(&self) -> usize {
        match self {
            Expr::Lit(_) => 0,
            Expr::Var(i) => *i,
            Expr::Sum(a, b) => a.max_var().max(b.max_var()),
            Expr::Max(args) | Expr::Min(args) => {
                args.iter().map(Expr::max_var).max().unwrap_or(0)
            }
            Expr::Div(e, _) | Expr::Threshold(e, _) => e.max_var(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Var(_) => 1,
            Expr::Sum(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Max(args) | Expr::Min(args) => {
                1 + args.iter().map(Expr::depth).max().unwrap_or(0)
            }
            Expr::Div(e, _) | Expr::Threshold(e, _) => 1 + e.depth(),
        }
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A sum under '/' must be parenthesized to parse back as one atom.
        match self {
            Expr::Sum(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Sum(a, b) => {
                write!(f, "{a} + ")?;
                b.fmt_term(f)
            }
            Expr::Max(args) | Expr::Min(args) => {
                let name = if matches!(self, Expr::Max(_)) { "max" } else { "min" };
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Expr::Div(e, d) => {
                e.fmt_term(f)?;
                write!(f, "/{d}")
            }
            Expr::Threshold(e, c) => write!(f, "[{e} > {c}]"),
        }
    }
}

/// A parsed monotone function of `arity` arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSpec {
    arity: usize,
    root: Expr,
}

impl FunctionSpec {
    /// Builds a spec from an expression tree, checking variable indices and
    /// divisors.
    pub fn new(arity: usize, root: Expr) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Precondition("arity must be positive".into()));
        }
        check_tree(&root, arity)?;
        Ok(Self { arity, root })
    }

    /// Parses `text`, inferring the arity as the largest variable index
    /// (at least 1).
    pub fn parse(text: &str) -> Result<Self> {
        let root = Parser::new(text).parse_all()?;
        let arity = root.max_var().max(1);
        Ok(Self { arity, root })
    }

    /// Parses `text` against a declared arity.
    pub fn parse_with_arity(text: &str, arity: usize) -> Result<Self> {
        let root = Parser::new(text).parse_all()?;
        Self::new(arity, root)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn eval(&self, coords: &[u32]) -> Result<u32> {
        if coords.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                got: coords.len(),
            });
        }
        Ok(self.root.eval(coords))
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl Serialize for FunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn check_tree(e: &Expr, arity: usize) -> Result<()> {
    match e {
        Expr::Lit(_) => Ok(()),
        Expr::Var(i) => {
            if *i == 0 || *i > arity {
                Err(Error::VariableOutOfRange { index: *i, arity })
            } else {
                Ok(())
            }
        }
        Expr::Sum(a, b) => {
            check_tree(a, arity)?;
            check_tree(b, arity)
        }
        Expr::Max(args) | Expr::Min(args) => {
            if args.len() < 2 {
                return Err(Error::Precondition("max/min need at least two arguments".into()));
            }
            args.iter().try_for_each(|a| check_tree(a, arity))
        }
        Expr::Div(inner, d) => {
            if *d == 0 {
                return Err(Error::Precondition("division by zero".into()));
            }
            check_tree(inner, arity)
        }
        Expr::Threshold(inner, _) => check_tree(inner, arity),
    }
}

/// A function usable as the shape of a chocolate bar.
///
/// Implementations must be monotone and total on nonnegative tuples of
/// length [`arity`](MonotoneFn::arity).
pub trait MonotoneFn: Send + Sync {
    fn arity(&self) -> usize;

    /// Caller guarantees `coords.len() == self.arity()`.
    fn value(&self, coords: &[u32]) -> u32;

    fn describe(&self) -> String;
}

impl MonotoneFn for FunctionSpec {
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, coords: &[u32]) -> u32 {
        debug_assert_eq!(coords.len(), self.arity);
        self.root.eval(coords)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// A unary function given by its values on `0..=D`; constant beyond `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableFunction {
    values: Vec<u32>,
}

impl TableFunction {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("table must be non-empty".into()));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotMonotone {
                lower: vec![i as u32],
                upper: vec![i as u32 + 1],
                lower_value: values[i],
                upper_value: values[i + 1],
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn at(&self, z: u32) -> u32 {
        let last = self.values.len() - 1;
        self.values[(z as usize).min(last)]
    }
}

impl MonotoneFn for TableFunction {
    fn arity(&self) -> usize {
        1
    }

    fn value(&self, coords: &[u32]) -> u32 {
        self.at(coords[0])
    }

    fn describe(&self) -> String {
        let body: Vec<String> = self.values.iter().map(u32::to_string).collect();
        format!("table[{}]", body.join(","))
    }
}

/// Result of a bounded monotonicity scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneCheck {
    pub monotone: bool,
    /// `(u, v)` with `u <= v` componentwise and `F(u) > F(v)`.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
}

/// Verifies `F(u) <= F(v)` for every `u <= v` inside `0..=bounds` by
/// comparing each point with its single-step successors along every axis.
pub fn check_monotone<F: MonotoneFn + ?Sized>(func: &F, bounds: &[u32]) -> Result<MonotoneCheck> {
    if bounds.len() != func.arity() {
        return Err(Error::Arity {
            expected: func.arity(),
            got: bounds.len(),
        });
    }
    for point in BoxIter::new(bounds) {
        let here = func.value(&point);
        for axis in 0..point.len() {
            if point[axis] < bounds[axis] {
                let mut next = point.clone();
                next[axis] += 1;
                if func.value(&next) < here {
                    return Ok(MonotoneCheck {
                        monotone: false,
                        witness: Some((point, next)),
                    });
                }
            }
        }
    }
    Ok(MonotoneCheck {
        monotone: true,
        witness: None,
    })
}

/// Lexicographic iterator over every tuple in `0..=bounds[0] x ... x 0..=bounds[n-1]`.
#[derive(Debug, Clone)]
pub struct BoxIter {
    bounds: Vec<u32>,
    current: Option<Vec<u32>>,
}

impl BoxIter {
    pub fn new(bounds: &[u32]) -> Self {
        Self {
            bounds: bounds.to_vec(),
            current: Some(vec![0; bounds.len()]),
        }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut axis = next.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if next[axis] < self.bounds[axis] {
                next[axis] += 1;
                self.current = Some(next);
                break;
            }
            next[axis] = 0;
        }
        Some(out)
    }
}

/// Location and cause of a syntax error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    /// Byte offset into the input; equals the input length at end of input.
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn error<T>(&self, message: &str, expected: &[&str]) -> Result<T> {
        Err(Error::Parse(ParseDiagnostic {
            offset: self.pos,
            message: message.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }))
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, expected: &[&str]) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else if self.peek().is_none() {
            self.error("unexpected end of input", expected)
        } else {
            self.error("unexpected character", expected)
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn integer(&mut self, expected: &[&str]) -> Result<u32> {
        let start = self.pos;
        match self.digits() {
            Some(d) => d.parse().or_else(|_| {
                self.pos = start;
                self.error("integer literal out of range", expected)
            }),
            None if self.peek().is_none() => self.error("unexpected end of input", expected),
            None => self.error("expected integer literal", expected),
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return self.error("trailing input", &["'+'", "'/'", "end of input"]);
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        while self.eat('+') {
            let rhs = self.term()?;
            acc = Expr::Sum(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.atom()?;
        while self.eat('/') {
            let d = self.integer(&["positive integer"])?;
            if d == 0 {
                self.pos -= 1;
                return self.error("division by zero", &["positive integer"]);
            }
            acc = Expr::Div(Box::new(acc), d);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr> {
        const ATOM: &[&str] = &["integer", "variable", "'max('", "'min('", "'('", "'['"];
        match self.peek() {
            None => self.error("unexpected end of input", ATOM),
            Some(c) if c.is_ascii_digit() => Ok(Expr::Lit(self.integer(ATOM)?)),
            Some('x') => {
                let start = self.pos;
                self.pos += 1;
                let rest = &self.text[self.pos..];
                let len = rest.bytes().take_while(u8::is_ascii_digit).count();
                let index = rest[..len].parse::<usize>().ok().filter(|&i| i >= 1);
                match index {
                    Some(i) => {
                        self.pos += len;
                        Ok(Expr::Var(i))
                    }
                    None => {
                        self.pos = start;
                        self.error("variable needs a positive index", &["x1, x2, ..."])
                    }
                }
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')', &["')'", "'+'", "'/'"])?;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect('>', &["'>'", "'+'", "'/'"])?;
                let c = self.integer(&["integer"])?;
                self.expect(']', &["']'"])?;
                Ok(Expr::Threshold(Box::new(e), c))
            }
            Some('m') => {
                let rest = &self.text[self.pos..];
                let is_max = rest.starts_with("max");
                if !is_max && !rest.starts_with("min") {
                    return self.error("unknown identifier", ATOM);
                }
                self.pos += 3;
                self.expect('(', &["'('"])?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if args.len() < 2 {
                    return self.error("max/min need at least two arguments", &["','"]);
                }
                self.expect(')', &["','", "')'"])?;
                Ok(if is_max { Expr::Max(args) } else { Expr::Min(args) })
            }
            Some(_) => self.error("unexpected character", ATOM),
        }
    }
}

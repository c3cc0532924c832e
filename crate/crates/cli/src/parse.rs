//! Symbol descriptions: `kind "{" item ("," item)* "}"`.
//!
//! ```text
//! radial{poly[1, -2, 1], atom(-0.5@0.9)}
//! diagonal{lacunary}
//! hardy{fourier[0:1, 1:0.5]}
//! ```

use std::fmt::{self, Write as _};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Radial,
    Hardy,
    Diagonal,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Radial => "radial",
            Kind::Hardy => "hardy",
            Kind::Diagonal => "diagonal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialItem {
    /// Density `Σ c_j r^j`.
    Poly(Vec<f64>),
    /// Profile atom `mass @ radius`.
    Atom { mass: f64, radius: f64 },
    /// Density `r² + a r + b`.
    Zz { a: f64, b: f64 },
    /// Density `coeff · (1 - r)^exponent`.
    Edge { coeff: f64, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalItem {
    List(Vec<f64>),
    Lacunary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HardyItem {
    /// `(k, f_k)`; missing `f_{-k}` is completed by symmetry.
    Fourier(Vec<(i64, f64)>),
    Samples(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Radial(Vec<RadialItem>),
    Diagonal(Vec<DiagonalItem>),
    Hardy(Vec<HardyItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    pub payload: Payload,
    pub source: String,
}

impl SymbolSpec {
    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Radial(_) => Kind::Radial,
            Payload::Diagonal(_) => Kind::Diagonal,
            Payload::Hardy(_) => Kind::Hardy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{kind:?} error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn error(&self, at: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        let before = &self.src[..at.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            kind,
            line,
            column,
            message: message.into(),
        }
    }

    fn syntax(&self, at: usize, message: impl Into<String>) -> ParseError {
        self.error(at, ParseErrorKind::Syntax, message)
    }

    fn semantic(&self, at: usize, message: impl Into<String>) -> ParseError {
        self.error(at, ParseErrorKind::Semantic, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn describe_next(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            let found = self.describe_next();
            Err(self.syntax(self.pos, format!("expected '{c}', found {found}")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(&'a str, usize)> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 || !self.rest().starts_with(|c: char| c.is_ascii_alphabetic()) {
            let found = self.describe_next();
            return Err(self.syntax(start, format!("expected a name, found {found}")));
        }
        self.pos += len;
        Ok((&self.src[start..start + len], start))
    }

    /// Scans `[+-]? digits ("." digits)? ([eE] [+-]? digits)?`.
    fn scan_number(&mut self, allow_fraction: bool) -> PResult<(&'a str, usize)> {
        self.skip_ws();
        let start = self.pos;
        let b = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < b.len() && b[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        if digits(&mut i) == 0 {
            let found = self.describe_next();
            return Err(self.syntax(start, format!("expected a number, found {found}")));
        }
        if allow_fraction {
            if i < b.len() && b[i] == b'.' {
                i += 1;
                if digits(&mut i) == 0 {
                    return Err(self.syntax(i, "expected digits after the decimal point"));
                }
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                i += 1;
                if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                    i += 1;
                }
                if digits(&mut i) == 0 {
                    return Err(self.syntax(i, "expected digits in the exponent"));
                }
            }
        }
        self.pos = i;
        Ok((&self.src[start..i], start))
    }

    fn number(&mut self) -> PResult<f64> {
        let (text, start) = self.scan_number(true)?;
        let v: f64 = text
            .parse()
            .map_err(|_| self.syntax(start, format!("malformed number {text:?}")))?;
        if !v.is_finite() {
            return Err(self.semantic(start, format!("number {text} is not finite")));
        }
        Ok(v)
    }

    fn index(&mut self) -> PResult<(i64, usize)> {
        let (text, start) = self.scan_number(false)?;
        let k = text
            .parse()
            .map_err(|_| self.syntax(start, format!("index {text} out of range")))?;
        Ok((k, start))
    }

    fn number_list(&mut self) -> PResult<Vec<f64>> {
        self.expect('[')?;
        let mut v = vec![self.number()?];
        while self.eat(',') {
            v.push(self.number()?);
        }
        self.expect(']')?;
        Ok(v)
    }

    fn separated<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect('{')?;
        let mut items = vec![item(self)?];
        while self.eat(',') {
            items.push(item(self)?);
        }
        self.expect('}')?;
        Ok(items)
    }

    fn radial_item(&mut self) -> PResult<RadialItem> {
        let (name, at) = self.ident()?;
        match name {
            "poly" => Ok(RadialItem::Poly(self.number_list()?)),
            "atom" => {
                self.expect('(')?;
                let mass = self.number()?;
                self.expect('@')?;
                self.skip_ws();
                let r_at = self.pos;
                let radius = self.number()?;
                self.expect(')')?;
                if !(0.0..1.0).contains(&radius) {
                    return Err(self.semantic(r_at, format!("atom radius {radius} is outside [0, 1)")));
                }
                Ok(RadialItem::Atom { mass, radius })
            }
            "zz" => {
                self.expect('(')?;
                let a = self.number()?;
                self.expect(',')?;
                let b = self.number()?;
                self.expect(')')?;
                Ok(RadialItem::Zz { a, b })
            }
            "edge" => {
                self.expect('(')?;
                let coeff = self.number()?;
                self.expect(',')?;
                self.skip_ws();
                let e_at = self.pos;
                let exponent = self.number()?;
                self.expect(')')?;
                if exponent <= -1.0 {
                    return Err(self.semantic(e_at, format!("edge exponent {exponent} must exceed -1")));
                }
                Ok(RadialItem::Edge { coeff, exponent })
            }
            other => Err(self.syntax(
                at,
                format!("unknown radial item '{other}' (expected poly, atom, zz or edge)"),
            )),
        }
    }

    fn diagonal_item(&mut self) -> PResult<DiagonalItem> {
        let (name, at) = self.ident()?;
        match name {
            "list" => Ok(DiagonalItem::List(self.number_list()?)),
            "lacunary" => Ok(DiagonalItem::Lacunary),
            other => Err(self.syntax(
                at,
                format!("unknown diagonal item '{other}' (expected list or lacunary)"),
            )),
        }
    }

    fn hardy_item(&mut self) -> PResult<HardyItem> {
        let (name, at) = self.ident()?;
        match name {
            "fourier" => {
                self.expect('[')?;
                let mut terms = Vec::new();
                loop {
                    let (k, k_at) = self.index()?;
                    self.expect(':')?;
                    let v = self.number()?;
                    if terms.iter().any(|&(j, _)| j == k) {
                        return Err(self.semantic(k_at, format!("coefficient {k} given twice")));
                    }
                    if let Some(&(_, w)) = terms.iter().find(|&&(j, _)| j == -k) {
                        if w != v {
                            return Err(self.semantic(
                                k_at,
                                format!(
                                    "non-real symbol: f_{k} = {v} but f_{} = {w}; real \
                                     coefficients need f_{{-k}} = f_k",
                                    -k
                                ),
                            ));
                        }
                    }
                    terms.push((k, v));
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                Ok(HardyItem::Fourier(terms))
            }
            "samples" => {
                self.expect('(')?;
                let start = self.pos;
                let len = self.rest().find(')').ok_or_else(|| {
                    self.syntax(self.src.len(), "expected ')' to close the sample path")
                })?;
                let path = self.src[start..start + len].trim();
                if path.is_empty() {
                    return Err(self.syntax(start, "empty sample path"));
                }
                self.pos = start + len + 1;
                Ok(HardyItem::Samples(path.to_string()))
            }
            other => Err(self.syntax(
                at,
                format!("unknown hardy item '{other}' (expected fourier or samples)"),
            )),
        }
    }
}

pub fn parse_symbol(text: &str) -> Result<SymbolSpec, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let (kind, at) = p.ident()?;
    let payload = match kind {
        "radial" => Payload::Radial(p.separated(Parser::radial_item)?),
        "diagonal" => Payload::Diagonal(p.separated(Parser::diagonal_item)?),
        "hardy" => {
            let items = p.separated(Parser::hardy_item)?;
            if items.iter().filter(|i| matches!(i, HardyItem::Samples(_))).count() > 1 {
                return Err(p.semantic(at, "at most one samples item"));
            }
            Payload::Hardy(items)
        }
        other => {
            return Err(p.syntax(
                at,
                format!("unknown kind '{other}' (expected radial, diagonal or hardy)"),
            ))
        }
    };
    if p.peek().is_some() {
        let found = p.describe_next();
        return Err(p.syntax(p.pos, format!("unexpected {found} after the closing brace")));
    }
    Ok(SymbolSpec {
        payload,
        source: text.to_string(),
    })
}

fn num(out: &mut String, v: f64) {
    // Debug is the shortest representation that round-trips
    let _ = write!(out, "{v:?}");
}

fn list(out: &mut String, vs: &[f64]) {
    out.push('[');
    for (i, &v) in vs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        num(out, v);
    }
    out.push(']');
}

/// Canonical text for a spec; parses back to an equal payload.
pub fn render(spec: &SymbolSpec) -> String {
    let mut out = format!("{}{{", spec.kind());
    let mut items: Vec<String> = Vec::new();
    match &spec.payload {
        Payload::Radial(xs) => {
            for x in xs {
                let mut s = String::new();
                match *x {
                    RadialItem::Poly(ref c) => {
                        s.push_str("poly");
                        list(&mut s, c);
                    }
                    RadialItem::Atom { mass, radius } => {
                        s.push_str("atom(");
                        num(&mut s, mass);
                        s.push('@');
                        num(&mut s, radius);
                        s.push(')');
                    }
                    RadialItem::Zz { a, b } => {
                        s.push_str("zz(");
                        num(&mut s, a);
                        s.push_str(", ");
                        num(&mut s, b);
                        s.push(')');
                    }
                    RadialItem::Edge { coeff, exponent } => {
                        s.push_str("edge(");
                        num(&mut s, coeff);
                        s.push_str(", ");
                        num(&mut s, exponent);
                        s.push(')');
                    }
                }
                items.push(s);
            }
        }
        Payload::Diagonal(xs) => {
            for x in xs {
                items.push(match x {
                    DiagonalItem::List(v) => {
                        let mut s = "list".to_string();
                        list(&mut s, v);
                        s
                    }
                    DiagonalItem::Lacunary => "lacunary".into(),
                });
            }
        }
        Payload::Hardy(xs) => {
            for x in xs {
                items.push(match x {
                    HardyItem::Fourier(terms) => {
                        let mut s = "fourier[".to_string();
                        for (i, &(k, v)) in terms.iter().enumerate() {
                            if i > 0 {
                                s.push_str(", ");
                            }
                            let _ = write!(s, "{k}:");
                            num(&mut s, v);
                        }
                        s.push(']');
                        s
                    }
                    HardyItem::Samples(p) => format!("samples({p})"),
                });
            }
        }
    }
    out.push_str(&items.join(", "));
    out.push('}');
    out
}

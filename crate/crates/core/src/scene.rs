//! Scene files: named declarations of spaces, affine subsets, gluing maps,
//! glued spaces, forms and metrics.
//!
//! ```text
//! # two planes glued along their y-axes
//! space X1 = R^2;
//! space X2 = R^2;
//! subset Y of X1 = param(t -> (0, t));
//! subset Z of X2 = param(1 -> 2 : 0, x0) inverse(2 -> 1 : x1);
//! gluemap f : Y -> X2 = map(t -> (0, t)) image Z;
//! glued GX = glue(X1, X2, f);
//! form w1 on X1 = x1 dx0 + (x0 + x1^2) dx1;
//! metric g1 on X1 = [[1, 0], [0, 1]];
//! ```
//!
//! Maps are written either with named binders, `t -> (0, t)` and
//! `(s, t) -> (s + t, t)`, or with explicit dimensions and indexed
//! variables, `1 -> 2 : 0, x0`. `inverse(…)` is optional everywhere and is
//! computed when absent; so is `image`, which defaults to the image of the
//! map. Statements end with `;` and `#` starts a comment.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::equal::EqualityOracle;
use crate::expr::Expr;
use crate::map::SmoothMap;
use crate::metric::{MetricError, PieceMetric};
use crate::parse::{lex, ParseError, Parser, Vars};
use crate::space::{
    make_glued_space, AffineSubset, EuclideanPiece, GluedSpace, GluingMap, Piece, SpaceError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Expr(crate::parse::ParseErrorKind),
    #[error("name {0:?} is already declared")]
    Duplicate(String),
    #[error("unresolved name {0:?}")]
    Unresolved(String),
    #[error("{name:?} is a {found}, expected a {expected}")]
    WrongKind {
        name: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{0}")]
    Invalid(String),
}

/// A scene error at a 1-based line and column, naming the declaration it
/// occurred in when known.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct SceneError {
    pub line: usize,
    pub column: usize,
    pub declaration: Option<String>,
    pub kind: SceneErrorKind,
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        if let Some(d) = &self.declaration {
            write!(f, "in {:?}: ", d)?;
        }
        write!(f, "{}", self.kind)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Space(EuclideanPiece),
    Subset {
        space: String,
        subset: AffineSubset,
    },
    GlueMap {
        domain: String,
        domain_space: String,
        target: String,
        map: GluingMap,
    },
    Glued {
        p1: String,
        p2: String,
        space: GluedSpace,
    },
    Form {
        space: String,
        coeffs: Vec<Expr>,
    },
    Metric {
        space: String,
        rows: Vec<Vec<Expr>>,
    },
}

impl Binding {
    pub fn kind(&self) -> &'static str {
        match self {
            Binding::Space(_) => "space",
            Binding::Subset { .. } => "subset",
            Binding::GlueMap { .. } => "gluemap",
            Binding::Glued { .. } => "glued space",
            Binding::Form { .. } => "form",
            Binding::Metric { .. } => "metric",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub name: String,
    pub line: usize,
    pub binding: Binding,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    declarations: Vec<Declaration>,
    index: HashMap<String, usize>,
}

impl Scene {
    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.index.get(name).map(|&i| &self.declarations[i].binding)
    }

    pub fn count(&self, kind: &str) -> usize {
        self.declarations
            .iter()
            .filter(|d| d.binding.kind() == kind)
            .count()
    }

    pub fn glued(&self, name: &str) -> Option<(&GluedSpace, &str, &str)> {
        match self.get(name)? {
            Binding::Glued { p1, p2, space } => Some((space, p1, p2)),
            _ => None,
        }
    }

    pub fn form(&self, name: &str) -> Option<(&str, &[Expr])> {
        match self.get(name)? {
            Binding::Form { space, coeffs } => Some((space, coeffs)),
            _ => None,
        }
    }

    pub fn metric(&self, name: &str) -> Option<(&str, &[Vec<Expr>])> {
        match self.get(name)? {
            Binding::Metric { space, rows } => Some((space, rows)),
            _ => None,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.chars().count(), |i| before[i + 1..].chars().count())
        + 1;
    (line, col)
}

// A failure at a byte offset of the full text.
struct Fail {
    offset: usize,
    kind: SceneErrorKind,
}

type Res<T> = Result<T, Fail>;

fn fail<T>(offset: usize, msg: impl Into<String>) -> Res<T> {
    Err(Fail {
        offset,
        kind: SceneErrorKind::Syntax(msg.into()),
    })
}

fn invalid(offset: usize, e: impl fmt::Display) -> Fail {
    Fail {
        offset,
        kind: SceneErrorKind::Invalid(e.to_string()),
    }
}

fn expr_fail(base: usize, e: ParseError) -> Fail {
    Fail {
        offset: base + e.offset,
        kind: SceneErrorKind::Expr(e.kind),
    }
}

/// A byte range `[start, end)` of the full text.
#[derive(Clone, Copy, Debug)]
struct Span {
    start: usize,
    end: usize,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, span: Span) -> Self {
        Cursor {
            text,
            pos: span.start,
            end: span.end,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.end && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.end
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        (self.pos < self.end).then(|| self.text.as_bytes()[self.pos])
    }

    fn word(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        while self.pos < self.end
            && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| (self.text[start..self.pos].to_string(), start))
    }

    fn name(&mut self, what: &str) -> Res<(String, usize)> {
        self.skip_ws();
        let off = self.pos;
        match self.word() {
            Some((w, o)) if w.as_bytes()[0].is_ascii_alphabetic() || w.starts_with('_') => {
                Ok((w, o))
            }
            _ => fail(off, format!("expected {}", what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Res<()> {
        self.skip_ws();
        let off = self.pos;
        match self.word() {
            Some((w, _)) if w == kw => Ok(()),
            _ => {
                self.pos = off;
                fail(off, format!("expected '{}'", kw))
            }
        }
    }

    fn try_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let off = self.pos;
        match self.word() {
            Some((w, _)) if w == kw => true,
            _ => {
                self.pos = off;
                false
            }
        }
    }

    fn symbol(&mut self, s: &str) -> Res<()> {
        self.skip_ws();
        if self.text[self.pos..self.end].starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            fail(self.pos, format!("expected '{}'", s))
        }
    }

    fn number(&mut self) -> Res<usize> {
        self.skip_ws();
        let off = self.pos;
        match self.word() {
            Some((w, _)) if w.bytes().all(|b| b.is_ascii_digit()) => {
                w.parse().or_else(|_| fail(off, "number too large"))
            }
            _ => fail(off, "expected a dimension"),
        }
    }

    /// The contents of a bracketed group opened by `open` at the cursor.
    fn group(&mut self, open: u8, close: u8) -> Res<Span> {
        self.skip_ws();
        if self.peek() != Some(open) {
            return fail(self.pos, format!("expected '{}'", open as char));
        }
        let start = self.pos + 1;
        let mut depth = 0i32;
        let bytes = self.text.as_bytes();
        for i in self.pos..self.end {
            match bytes[i] {
                b'(' | b'[' => depth += 1,
                b')' | b']' => {
                    depth -= 1;
                    if depth == 0 {
                        if bytes[i] != close {
                            return fail(i, format!("expected '{}'", close as char));
                        }
                        self.pos = i + 1;
                        return Ok(Span { start, end: i });
                    }
                }
                _ => {}
            }
        }
        fail(self.pos, format!("unclosed '{}'", open as char))
    }

    fn rest(&mut self) -> Span {
        self.skip_ws();
        let s = Span {
            start: self.pos,
            end: self.end,
        };
        self.pos = self.end;
        s
    }

    fn finish(&mut self) -> Res<()> {
        if self.at_end() {
            Ok(())
        } else {
            fail(self.pos, "unexpected trailing text")
        }
    }
}

/// Split `span` at top-level occurrences of `sep` (outside brackets).
fn split_top(text: &str, span: Span, sep: &str) -> Vec<Span> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = span.start;
    let mut i = span.start;
    while i < span.end {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if depth == 0 && text[i..span.end].starts_with(sep) => {
                out.push(Span { start, end: i });
                i += sep.len();
                start = i;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out.push(Span {
        start,
        end: span.end,
    });
    out
}

fn trimmed(text: &str, span: Span) -> Span {
    let s = &text[span.start..span.end];
    let lead = s.len() - s.trim_start().len();
    let trail = s.len() - s.trim_end().len();
    Span {
        start: span.start + lead,
        end: span.end - trail,
    }
}

fn is_blank(text: &str, span: Span) -> bool {
    text[span.start..span.end].trim().is_empty()
}

fn parse_expr_at(text: &str, span: Span, vars: Vars<'_>) -> Res<Expr> {
    let src = &text[span.start..span.end];
    let toks = lex(src).map_err(|e| expr_fail(span.start, e))?;
    let mut p = Parser::new(&toks, src.len(), vars);
    let e = p.expr().map_err(|e| expr_fail(span.start, e))?;
    p.finish().map_err(|e| expr_fail(span.start, e))?;
    Ok(e)
}

fn parse_list(text: &str, span: Span, vars: Vars<'_>) -> Res<Vec<Expr>> {
    if is_blank(text, span) {
        return Ok(Vec::new());
    }
    split_top(text, span, ",")
        .into_iter()
        .map(|s| {
            if is_blank(text, s) {
                fail(s.start, "empty component")
            } else {
                parse_expr_at(text, s, vars.clone())
            }
        })
        .collect()
}

/// `k -> d : e1, …, ed` or `binders -> (e1, …, ed)` / `binder -> e`.
fn parse_map(text: &str, span: Span) -> Res<SmoothMap> {
    let parts = split_top(text, span, ":");
    let map = if parts.len() == 2 {
        let mut c = Cursor::new(text, parts[0]);
        let k = c.number()?;
        c.symbol("->")?;
        let d = c.number()?;
        c.finish()?;
        let comps = parse_list(text, parts[1], Vars::Indexed(k))?;
        if comps.len() != d {
            return fail(
                parts[1].start,
                format!("expected {} components, found {}", d, comps.len()),
            );
        }
        SmoothMap::new(k, comps)
    } else if parts.len() == 1 {
        let halves = split_top(text, span, "->");
        if halves.len() != 2 {
            return fail(
                span.start,
                "expected 'binders -> (components)' or 'k -> d : components'",
            );
        }
        let names = parse_binders(text, trimmed(text, halves[0]))?;
        let body = trimmed(text, halves[1]);
        let mut c = Cursor::new(text, body);
        let comps = if c.peek() == Some(b'(') {
            let inner = c.group(b'(', b')')?;
            if c.at_end() {
                parse_list(text, inner, Vars::Named(&names))?
            } else {
                vec![parse_expr_at(text, body, Vars::Named(&names))?]
            }
        } else {
            vec![parse_expr_at(text, body, Vars::Named(&names))?]
        };
        SmoothMap::new(names.len(), comps)
    } else {
        return fail(parts[2].start, "unexpected ':'");
    };
    map.map_err(|e| invalid(span.start, e))
}

fn parse_binders(text: &str, span: Span) -> Res<Vec<String>> {
    let mut c = Cursor::new(text, span);
    let mut names = Vec::new();
    if c.peek() == Some(b'(') {
        let inner = c.group(b'(', b')')?;
        c.finish()?;
        if !is_blank(text, inner) {
            for s in split_top(text, inner, ",") {
                let mut b = Cursor::new(text, s);
                names.push(b.name("binder name")?.0);
                b.finish()?;
            }
        }
    } else {
        names.push(c.name("binder name")?.0);
        c.finish()?;
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return fail(span.start, format!("binder {:?} repeated", n));
        }
        if ["sin", "cos", "exp"].contains(&n.as_str()) {
            return fail(span.start, format!("binder {:?} shadows a function", n));
        }
    }
    Ok(names)
}

/// `name(map)` at the cursor.
fn tagged_map(c: &mut Cursor<'_>, tag: &str) -> Res<(SmoothMap, usize)> {
    c.keyword(tag)?;
    let off = c.pos;
    let span = c.group(b'(', b')')?;
    Ok((parse_map(c.text, span)?, off))
}

fn optional_map(c: &mut Cursor<'_>, tag: &str) -> Res<Option<(SmoothMap, usize)>> {
    c.skip_ws();
    let save = c.pos;
    if c.try_keyword(tag) {
        c.pos = save;
        tagged_map(c, tag).map(Some)
    } else {
        Ok(None)
    }
}

struct Builder<'a> {
    text: &'a str,
    scene: Scene,
    oracle: EqualityOracle,
}

impl Builder<'_> {
    fn lookup(&self, name: &str, off: usize) -> Res<&Binding> {
        self.scene.get(name).ok_or(Fail {
            offset: off,
            kind: SceneErrorKind::Unresolved(name.to_string()),
        })
    }

    fn space_dim(&self, name: &str, off: usize) -> Res<usize> {
        match self.lookup(name, off)? {
            Binding::Space(p) => Ok(p.dim),
            other => Err(wrong_kind(name, "space", other, off)),
        }
    }

    fn subset(&self, name: &str, off: usize) -> Res<(String, AffineSubset)> {
        match self.lookup(name, off)? {
            Binding::Subset { space, subset } => Ok((space.clone(), subset.clone())),
            other => Err(wrong_kind(name, "subset", other, off)),
        }
    }

    fn declare(&mut self, name: String, off: usize, binding: Binding) -> Res<()> {
        if self.scene.index.contains_key(&name) {
            return Err(Fail {
                offset: off,
                kind: SceneErrorKind::Duplicate(name),
            });
        }
        let (line, _) = line_col(self.text, off);
        self.scene
            .index
            .insert(name.clone(), self.scene.declarations.len());
        self.scene.declarations.push(Declaration {
            name,
            line,
            binding,
        });
        Ok(())
    }

    fn statement(&mut self, span: Span, current: &mut Option<String>) -> Res<()> {
        let text = self.text;
        let mut c = Cursor::new(text, span);
        let (kw, kw_off) = c.name("a declaration keyword")?;
        let (name, name_off) = c.name("a name")?;
        *current = Some(name.clone());
        match kw.as_str() {
            "space" => {
                c.symbol("=")?;
                c.keyword("R")?;
                c.symbol("^")?;
                let d = c.number()?;
                c.finish()?;
                self.declare(name, name_off, Binding::Space(EuclideanPiece::new(d)))
            }
            "subset" => {
                c.keyword("of")?;
                let (space, space_off) = c.name("a space name")?;
                let d = self.space_dim(&space, space_off)?;
                c.symbol("=")?;
                let (param, p_off) = tagged_map(&mut c, "param")?;
                let inverse = optional_map(&mut c, "inverse")?;
                c.finish()?;
                if param.codomain_dim() != d {
                    return Err(invalid(
                        p_off,
                        format!(
                            "parametrization lands in R^{}, {} is R^{}",
                            param.codomain_dim(),
                            space,
                            d
                        ),
                    ));
                }
                let subset = AffineSubset::new(Piece::P1, param, inverse.map(|(m, _)| m))
                    .map_err(|e| invalid(p_off, e))?;
                self.declare(name, name_off, Binding::Subset { space, subset })
            }
            "gluemap" => {
                c.symbol(":")?;
                let (dom, dom_off) = c.name("a subset name")?;
                let (domain_space, domain) = self.subset(&dom, dom_off)?;
                c.symbol("->")?;
                let (target, t_off) = c.name("a space name")?;
                let d2 = self.space_dim(&target, t_off)?;
                c.symbol("=")?;
                let (map, m_off) = tagged_map(&mut c, "map")?;
                let image = if c.try_keyword("image") {
                    let (img, img_off) = c.name("a subset name")?;
                    let (img_space, subset) = self.subset(&img, img_off)?;
                    if img_space != target {
                        return Err(invalid(
                            img_off,
                            format!(
                                "image {} is a subset of {}, not of {}",
                                img, img_space, target
                            ),
                        ));
                    }
                    subset
                } else {
                    if map.codomain_dim() != d2 {
                        return Err(invalid(
                            m_off,
                            format!(
                                "map lands in R^{}, {} is R^{}",
                                map.codomain_dim(),
                                target,
                                d2
                            ),
                        ));
                    }
                    AffineSubset::new(Piece::P2, map.clone(), None)
                        .map_err(|e| invalid(m_off, e))?
                };
                let inverse = optional_map(&mut c, "inverse")?;
                c.finish()?;
                let gluing = GluingMap::new(
                    domain,
                    map,
                    image.with_piece(Piece::P2),
                    inverse.map(|(m, _)| m),
                )
                .map_err(|e| invalid(m_off, e))?;
                self.declare(
                    name,
                    name_off,
                    Binding::GlueMap {
                        domain: dom,
                        domain_space,
                        target,
                        map: gluing,
                    },
                )
            }
            "glued" => {
                c.symbol("=")?;
                c.keyword("glue")?;
                let args_off = c.pos;
                let args = c.group(b'(', b')')?;
                c.finish()?;
                let parts = split_top(text, args, ",");
                if parts.len() != 3 {
                    return fail(args_off, "expected glue(<space>, <space>, <gluemap>)");
                }
                let mut names = Vec::new();
                for p in &parts {
                    let mut pc = Cursor::new(text, *p);
                    let n = pc.name("a name")?;
                    pc.finish()?;
                    names.push(n);
                }
                let d1 = self.space_dim(&names[0].0, names[0].1)?;
                let d2 = self.space_dim(&names[1].0, names[1].1)?;
                let (gname, goff) = &names[2];
                let (gluing, dspace, tspace) = match self.lookup(gname, *goff)? {
                    Binding::GlueMap {
                        map,
                        domain_space,
                        target,
                        ..
                    } => (map.clone(), domain_space.clone(), target.clone()),
                    other => return Err(wrong_kind(gname, "gluemap", other, *goff)),
                };
                if dspace != names[0].0 || tspace != names[1].0 {
                    return Err(invalid(
                        *goff,
                        format!(
                            "{} goes from a subset of {} to {}, not from {} to {}",
                            gname, dspace, tspace, names[0].0, names[1].0
                        ),
                    ));
                }
                let space =
                    make_glued_space(EuclideanPiece::new(d1), EuclideanPiece::new(d2), gluing)
                        .map_err(|e: SpaceError| invalid(kw_off, e))?;
                self.declare(
                    name,
                    name_off,
                    Binding::Glued {
                        p1: names[0].0.clone(),
                        p2: names[1].0.clone(),
                        space,
                    },
                )
            }
            "form" => {
                c.keyword("on")?;
                let (space, s_off) = c.name("a space name")?;
                let d = self.space_dim(&space, s_off)?;
                c.symbol("=")?;
                let body = c.rest();
                if is_blank(text, body) {
                    return fail(body.start, "expected a form body");
                }
                let src = &text[body.start..body.end];
                let toks = lex(src).map_err(|e| expr_fail(body.start, e))?;
                let mut p = Parser::new(&toks, src.len(), Vars::Indexed(d));
                let coeffs = p.form_body(d).map_err(|e| expr_fail(body.start, e))?;
                p.finish().map_err(|e| expr_fail(body.start, e))?;
                self.declare(name, name_off, Binding::Form { space, coeffs })
            }
            "metric" => {
                c.keyword("on")?;
                let (space, s_off) = c.name("a space name")?;
                let d = self.space_dim(&space, s_off)?;
                c.symbol("=")?;
                let m_off = c.pos;
                let outer = c.group(b'[', b']')?;
                c.finish()?;
                let mut rows = Vec::new();
                if !is_blank(text, outer) {
                    for r in split_top(text, outer, ",") {
                        let mut rc = Cursor::new(text, r);
                        let inner = rc.group(b'[', b']')?;
                        rc.finish()?;
                        rows.push(parse_list(text, inner, Vars::Indexed(d))?);
                    }
                }
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(invalid(
                        m_off,
                        format!("metric on {} must be {}x{}", space, d, d),
                    ));
                }
                PieceMetric::from_rows(Piece::P1, rows.clone(), &self.oracle)
                    .map_err(|e: MetricError| invalid(m_off, e))?;
                self.declare(name, name_off, Binding::Metric { space, rows })
            }
            other => fail(kw_off, format!("unknown declaration {:?}", other)),
        }
    }
}

fn wrong_kind(name: &str, expected: &'static str, found: &Binding, off: usize) -> Fail {
    Fail {
        offset: off,
        kind: SceneErrorKind::WrongKind {
            name: name.to_string(),
            expected,
            found: found.kind(),
        },
    }
}

/// Blank out `#` comments, keeping byte offsets.
fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_comment = false;
    for ch in text.chars() {
        if ch == '\n' {
            in_comment = false;
            out.push(ch);
        } else if in_comment || ch == '#' {
            in_comment = true;
            for _ in 0..ch.len_utf8() {
                out.push(' ');
            }
        } else {
            out.push(ch);
        }
    }
    out
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let clean = strip_comments(text);
    let mut b = Builder {
        text: &clean,
        scene: Scene::default(),
        oracle: EqualityOracle::default(),
    };
    let mut start = 0;
    let statements = clean.split(';').map(|piece| {
        let span = Span {
            start,
            end: start + piece.len(),
        };
        start = span.end + 1;
        span
    });
    for span in statements {
        if is_blank(&clean, span) {
            continue;
        }
        let mut current = None;
        if let Err(f) = b.statement(span, &mut current) {
            let (line, column) = line_col(&clean, f.offset);
            return Err(SceneError {
                line,
                column,
                declaration: current,
                kind: f.kind,
            });
        }
    }
    Ok(b.scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::space::GluedPoint;

    const Y_AXIS: &str = "
# two planes glued along their y-axes
space X1 = R^2;
space X2 = R^2;
subset Y of X1 = param(t -> (0, t));
subset Z of X2 = param(1 -> 2 : 0, x0) inverse(2 -> 1 : x1);
gluemap f : Y -> X2 = map(t -> (0, t)) image Z inverse(1 -> 1 : x0);
glued GX = glue(X1, X2, f);
form w1 on X1 = x1 dx0 + (x0 + x1^2) dx1;
form w2 on X2 = 7 dx0 + x1^2 dx1;
metric g1 on X1 = [[1, 0], [0, 1]];
";

    #[test]
    fn y_axis_scene() {
        let s = parse_scene(Y_AXIS).unwrap();
        assert_eq!(s.count("glued space"), 1);
        assert_eq!(s.count("form"), 2);
        let (gx, p1, p2) = s.glued("GX").unwrap();
        assert_eq!((p1, p2), ("X1", "X2"));
        let c = gx
            .classify_point(&GluedPoint::p1(vec![rat(0), rat(5)]))
            .unwrap();
        assert_eq!(c, crate::space::PointClass::GlueLocus);
        assert_eq!(s.declarations()[2].line, 5);
    }

    #[test]
    fn empty_scene() {
        assert!(parse_scene("").unwrap().declarations().is_empty());
        assert!(parse_scene("  # nothing\n\n")
            .unwrap()
            .declarations()
            .is_empty());
    }

    #[test]
    fn non_affine_subset() {
        let e =
            parse_scene("space X1 = R^2;\nsubset Y of X1 = param(t0 -> (t0^2, 0));").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.declaration.as_deref(), Some("Y"));
        assert!(e.to_string().contains("not affine"), "{}", e);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_scene("space X1 = R^2;\nform w on X1 = x0 dx0 + ) dx1;").unwrap_err();
        assert_eq!((e.line, e.column), (2, 25));
        let e = parse_scene("space X1 = R^2;\nform w on X3 = dx0;").unwrap_err();
        assert_eq!(e.kind, SceneErrorKind::Unresolved("X3".into()));
        assert_eq!((e.line, e.column), (2, 11));
        let e = parse_scene("space X = R^2; space X = R^3;").unwrap_err();
        assert_eq!(e.kind, SceneErrorKind::Duplicate("X".into()));
        let e = parse_scene("space X = R^2; form w on X = dx5;").unwrap_err();
        assert!(matches!(e.kind, SceneErrorKind::Expr(_)));
        let e = parse_scene("space X = R^2; metric g on X = [[1, x0], [0, 1]];").unwrap_err();
        assert!(e.to_string().contains("differs"), "{}", e);
        let e = parse_scene("widget W = 3;").unwrap_err();
        assert!(matches!(e.kind, SceneErrorKind::Syntax(_)));
    }

    #[test]
    fn wedge_and_defaults() {
        let s = parse_scene(
            "space A = R^2; space B = R^2;
             subset O of A = param(() -> (0, 0));
             gluemap f : O -> B = map(0 -> 2 : 0, 0);
             glued W = glue(A, B, f);",
        )
        .unwrap();
        let (w, _, _) = s.glued("W").unwrap();
        assert_eq!(w.gluing().dim(), 0);
    }

    #[test]
    fn mismatched_glue() {
        let e = parse_scene(
            "space A = R^1; space B = R^1;
             subset Y of A = param(t -> t);
             gluemap f : Y -> B = map(t -> t);
             glued G = glue(B, A, f);",
        )
        .unwrap_err();
        assert_eq!(e.declaration.as_deref(), Some("G"));
    }
}

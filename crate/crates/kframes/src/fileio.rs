//! File formats: line-oriented text and an equivalent JSON form for every
//! file kind, with lossless conversion between the two.
//!
//! Frames: `points: 0 1 2` / `edges: 0>1 1>2`. Morphisms reference their
//! frame files: `from: <file>` / `to: <file>` / `map: 0>1`. Valuations:
//! one `name: points...` line per variable. Formulas are s-expressions;
//! sequents and proofs are s-expressions with `seq` and `proof` heads.
//! Horn clause files hold one clause per line: `x<y & y<z -> x<z`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::Valuation;
use crate::calculus::proof::{FormulaFamily, ProofTree, Rule, Sequent};
use crate::calculus::sexpr::{formula_from_sexpr, read_sexpr, ParseError, Sexpr};
use crate::calculus::Formula;
use crate::frame::{Frame, HornAtom, HornClause, PointId};
use crate::morphism::PMorphism;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {err}")]
    Io {
        path: PathBuf,
        err: std::io::Error,
    },
    #[error("{path}:{line}:{col}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(transparent)]
    Frame(#[from] crate::frame::FrameError),
    #[error("{0}")]
    Morphism(String),
}

fn parse_err(path: &Path, line: usize, col: usize, msg: impl Into<String>) -> FileError {
    FileError::Parse {
        path: path.to_path_buf(),
        line,
        col,
        msg: msg.into(),
    }
}

fn from_sexpr_err(path: &Path, e: ParseError) -> FileError {
    parse_err(path, e.line, e.col, e.msg)
}

pub fn read_file(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|err| FileError::Io {
        path: path.to_path_buf(),
        err,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FileError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|err| FileError::Io {
                path: path.to_path_buf(),
                err,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|err| FileError::Io {
        path: path.to_path_buf(),
        err,
    })
}

// ---------------------------------------------------------------- frames

pub fn parse_frame_text(src: &str, path: &Path) -> Result<Frame, FileError> {
    let mut points: Option<Vec<PointId>> = None;
    let mut edges: Vec<(PointId, PointId)> = Vec::new();
    let mut saw_edges = false;
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("points:") {
            let mut pts = Vec::new();
            for (ci, tok) in rest.split_whitespace().enumerate() {
                pts.push(tok.parse::<PointId>().map_err(|_| {
                    parse_err(path, ln + 1, ci + 1, format!("bad point id `{tok}`"))
                })?);
            }
            points = Some(pts);
        } else if let Some(rest) = line.strip_prefix("edges:") {
            saw_edges = true;
            for (ci, tok) in rest.split_whitespace().enumerate() {
                let (a, b) = tok.split_once('>').ok_or_else(|| {
                    parse_err(path, ln + 1, ci + 1, format!("bad edge token `{tok}`"))
                })?;
                let a = a.parse::<PointId>().map_err(|_| {
                    parse_err(path, ln + 1, ci + 1, format!("bad edge endpoint `{a}`"))
                })?;
                let b = b.parse::<PointId>().map_err(|_| {
                    parse_err(path, ln + 1, ci + 1, format!("bad edge endpoint `{b}`"))
                })?;
                edges.push((a, b));
            }
        } else {
            return Err(parse_err(path, ln + 1, 1, format!("unknown line `{line}`")));
        }
    }
    let points = points.ok_or_else(|| parse_err(path, 1, 1, "missing `points:` line"))?;
    if !saw_edges {
        return Err(parse_err(path, 1, 1, "missing `edges:` line"));
    }
    Ok(Frame::new(points, edges)?)
}

pub fn frame_to_text(frame: &Frame) -> String {
    frame.to_string()
}

pub fn frame_to_json(frame: &Frame) -> Value {
    json!({
        "kind": "frame",
        "points": frame.points(),
        "edges": frame.edges().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn frame_from_json(v: &Value, path: &Path) -> Result<Frame, FileError> {
    let points = v["points"]
        .as_array()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `points` array"))?
        .iter()
        .map(|p| p.as_u64().map(|x| x as PointId))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| parse_err(path, 0, 0, "bad point id"))?;
    let edges = v["edges"]
        .as_array()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `edges` array"))?
        .iter()
        .map(|e| {
            let pair = e.as_array()?;
            Some((pair.first()?.as_u64()? as PointId, pair.get(1)?.as_u64()? as PointId))
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| parse_err(path, 0, 0, "bad edge pair"))?;
    Ok(Frame::new(points, edges)?)
}

/// Loads a frame from either encoding, sniffing JSON by its first byte.
pub fn load_frame(path: &Path) -> Result<Frame, FileError> {
    let src = read_file(path)?;
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        frame_from_json(&v, path)
    } else {
        parse_frame_text(&src, path)
    }
}

// ------------------------------------------------------------- morphisms

pub struct MorphismFile {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<PointId, PointId>,
}

pub fn parse_morphism_text(src: &str, path: &Path) -> Result<MorphismFile, FileError> {
    let mut from = None;
    let mut to = None;
    let mut map = BTreeMap::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("from:") {
            from = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("to:") {
            to = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("map:") {
            for (ci, tok) in rest.split_whitespace().enumerate() {
                let (a, b) = tok.split_once('>').ok_or_else(|| {
                    parse_err(path, ln + 1, ci + 1, format!("bad map token `{tok}`"))
                })?;
                let a = a.parse::<PointId>().map_err(|_| {
                    parse_err(path, ln + 1, ci + 1, format!("bad map source `{a}`"))
                })?;
                let b = b.parse::<PointId>().map_err(|_| {
                    parse_err(path, ln + 1, ci + 1, format!("bad map target `{b}`"))
                })?;
                map.insert(a, b);
            }
        } else {
            return Err(parse_err(path, ln + 1, 1, format!("unknown line `{line}`")));
        }
    }
    Ok(MorphismFile {
        from: from.ok_or_else(|| parse_err(path, 1, 1, "missing `from:` line"))?,
        to: to.ok_or_else(|| parse_err(path, 1, 1, "missing `to:` line"))?,
        map,
    })
}

pub fn morphism_file_to_text(m: &MorphismFile) -> String {
    let mut out = format!("from: {}\nto: {}\nmap:", m.from, m.to);
    for (a, b) in &m.map {
        out.push_str(&format!(" {a}>{b}"));
    }
    out.push('\n');
    out
}

pub fn morphism_file_to_json(m: &MorphismFile) -> Value {
    json!({
        "kind": "morphism",
        "from": m.from,
        "to": m.to,
        "map": m.map.iter().map(|(&a, &b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn morphism_file_from_json(v: &Value, path: &Path) -> Result<MorphismFile, FileError> {
    let from = v["from"]
        .as_str()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `from`"))?
        .to_string();
    let to = v["to"]
        .as_str()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `to`"))?
        .to_string();
    let map = v["map"]
        .as_array()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `map`"))?
        .iter()
        .map(|e| {
            let pair = e.as_array()?;
            Some((pair.first()?.as_u64()? as PointId, pair.get(1)?.as_u64()? as PointId))
        })
        .collect::<Option<BTreeMap<_, _>>>()
        .ok_or_else(|| parse_err(path, 0, 0, "bad map pair"))?;
    Ok(MorphismFile { from, to, map })
}

/// Loads and validates a morphism; frame paths resolve relative to the
/// morphism file's directory.
pub fn load_morphism(path: &Path) -> Result<PMorphism, FileError> {
    let src = read_file(path)?;
    let mf = if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        morphism_file_from_json(&v, path)?
    } else {
        parse_morphism_text(&src, path)?
    };
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let source = load_frame(&base.join(&mf.from))?;
    let target = load_frame(&base.join(&mf.to))?;
    PMorphism::validate(source, target, mf.map).map_err(|e| FileError::Morphism(e.to_string()))
}

// ------------------------------------------------------------ valuations

pub fn parse_valuation_text(src: &str, path: &Path) -> Result<BTreeMap<String, BTreeSet<PointId>>, FileError> {
    let mut out = BTreeMap::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(path, ln + 1, 1, "expected `name: points...`"))?;
        let mut points = BTreeSet::new();
        for (ci, tok) in rest.split_whitespace().enumerate() {
            points.insert(tok.parse::<PointId>().map_err(|_| {
                parse_err(path, ln + 1, ci + 1, format!("bad point id `{tok}`"))
            })?);
        }
        out.insert(name.trim().to_string(), points);
    }
    Ok(out)
}

pub fn valuation_to_text(v: &BTreeMap<String, BTreeSet<PointId>>) -> String {
    let mut out = String::new();
    for (name, points) in v {
        out.push_str(name);
        out.push(':');
        for p in points {
            out.push_str(&format!(" {p}"));
        }
        out.push('\n');
    }
    out
}

pub fn valuation_to_json(v: &BTreeMap<String, BTreeSet<PointId>>) -> Value {
    json!({
        "kind": "valuation",
        "assignment": v.iter().map(|(k, pts)| (k.clone(), json!(pts))).collect::<serde_json::Map<_, _>>(),
    })
}

pub fn valuation_from_json(
    v: &Value,
    path: &Path,
) -> Result<BTreeMap<String, BTreeSet<PointId>>, FileError> {
    let mut out = BTreeMap::new();
    let map = v["assignment"]
        .as_object()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `assignment`"))?;
    for (k, pts) in map {
        let points = pts
            .as_array()
            .ok_or_else(|| parse_err(path, 0, 0, "bad point list"))?
            .iter()
            .map(|p| p.as_u64().map(|x| x as PointId))
            .collect::<Option<BTreeSet<_>>>()
            .ok_or_else(|| parse_err(path, 0, 0, "bad point id"))?;
        out.insert(k.clone(), points);
    }
    Ok(out)
}

/// Builds an algebra valuation over a specific frame from a parsed
/// valuation file.
pub fn valuation_on_frame(
    frame: &Frame,
    parsed: &BTreeMap<String, BTreeSet<PointId>>,
) -> Result<Valuation, FileError> {
    let algebra = crate::algebra::powerset_algebra(frame)
        .map_err(|e| FileError::Morphism(e.to_string()))?;
    let mut v = Valuation::default();
    for (name, points) in parsed {
        for p in points {
            if !frame.has_point(*p) {
                return Err(FileError::Morphism(format!(
                    "valuation point {p} is not in the frame"
                )));
            }
        }
        v = v.bind(name.clone(), algebra.mask_from_points(points));
    }
    Ok(v)
}

// -------------------------------------------------------------- formulas

pub fn load_formula(path: &Path) -> Result<Formula, FileError> {
    let src = read_file(path)?;
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        let text = v["text"]
            .as_str()
            .ok_or_else(|| parse_err(path, 0, 0, "missing `text`"))?;
        crate::calculus::parse_formula(text).map_err(|e| from_sexpr_err(path, e))
    } else {
        crate::calculus::parse_formula(src.trim()).map_err(|e| from_sexpr_err(path, e))
    }
}

pub fn formula_to_json(f: &Formula) -> Value {
    json!({ "kind": "formula", "text": f.to_string() })
}

// -------------------------------------------------------------- sequents

pub fn sequent_to_sexpr_text(s: &Sequent) -> String {
    let mut out = String::from("(seq (ante");
    for f in &s.ante {
        out.push(' ');
        out.push_str(&f.to_string());
    }
    out.push_str(") (succ");
    for f in &s.succ {
        out.push(' ');
        out.push_str(&f.to_string());
    }
    out.push_str("))");
    out
}

pub fn sequent_from_sexpr(e: &Sexpr, path: &Path) -> Result<Sequent, FileError> {
    let items = match e {
        Sexpr::List(items) => items,
        _ => return Err(parse_err(path, 0, 0, "sequent must be a list")),
    };
    match items.first() {
        Some(Sexpr::Atom(h)) if h == "seq" => {}
        _ => return Err(parse_err(path, 0, 0, "sequent must start with `seq`")),
    }
    let mut ante = BTreeSet::new();
    let mut succ = BTreeSet::new();
    for part in &items[1..] {
        let sub = match part {
            Sexpr::List(sub) => sub,
            _ => return Err(parse_err(path, 0, 0, "sequent parts must be lists")),
        };
        let (head, rest) = match sub.split_first() {
            Some((Sexpr::Atom(h), rest)) => (h.as_str(), rest),
            _ => return Err(parse_err(path, 0, 0, "sequent part must be named")),
        };
        let target = match head {
            "ante" => &mut ante,
            "succ" => &mut succ,
            other => {
                return Err(parse_err(path, 0, 0, format!("unknown sequent part `{other}`")))
            }
        };
        for f in rest {
            target.insert(formula_from_sexpr(f).map_err(|e| from_sexpr_err(path, e))?);
        }
    }
    Ok(Sequent { ante, succ })
}

pub fn load_sequent(path: &Path) -> Result<Sequent, FileError> {
    let src = read_file(path)?;
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        sequent_from_json(&v, path)
    } else {
        let e = read_sexpr(&src).map_err(|e| from_sexpr_err(path, e))?;
        sequent_from_sexpr(&e, path)
    }
}

pub fn sequent_to_json(s: &Sequent) -> Value {
    json!({
        "kind": "sequent",
        "ante": s.ante.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "succ": s.succ.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

pub fn sequent_from_json(v: &Value, path: &Path) -> Result<Sequent, FileError> {
    let parse_side = |key: &str| -> Result<BTreeSet<Formula>, FileError> {
        v[key]
            .as_array()
            .ok_or_else(|| parse_err(path, 0, 0, format!("missing `{key}`")))?
            .iter()
            .map(|f| {
                let text = f
                    .as_str()
                    .ok_or_else(|| parse_err(path, 0, 0, "formula must be a string"))?;
                crate::calculus::parse_formula(text).map_err(|e| from_sexpr_err(path, e))
            })
            .collect()
    };
    Ok(Sequent {
        ante: parse_side("ante")?,
        succ: parse_side("succ")?,
    })
}

// ---------------------------------------------------------------- proofs

fn formula_set_to_sexprs(set: &BTreeSet<Formula>) -> String {
    set.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn rule_tag_text(rule: &Rule) -> &'static str {
    match rule {
        Rule::Ax => "ax",
        Rule::Weaken => "w",
        Rule::Cut { .. } => "cut",
        Rule::NegL { .. } => "neg-l",
        Rule::NegR { .. } => "neg-r",
        Rule::AndL { .. } => "and-l",
        Rule::AndR { .. } => "and-r",
        Rule::OrL { .. } => "or-l",
        Rule::OrR { .. } => "or-r",
        Rule::Nec { .. } => "nec",
        Rule::Lf { .. } => "lf",
        Rule::TL { .. } => "tl",
    }
}

/// Pretty s-expression rendering of a proof tree, indented by depth.
pub fn proof_to_sexpr_text(p: &ProofTree) -> String {
    let mut out = String::new();
    render_proof(p, 0, &mut out);
    out.push('\n');
    out
}

fn render_proof(p: &ProofTree, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    out.push_str(&pad);
    out.push_str(&format!("(proof (rule {})", rule_tag_text(&p.rule)));
    match &p.rule {
        Rule::Ax | Rule::Weaken => {}
        Rule::NegL { set } | Rule::NegR { set } | Rule::Nec { set } | Rule::TL { set } => {
            out.push_str(&format!(" (set {})", formula_set_to_sexprs(set)));
        }
        Rule::Cut { set, left, right } => {
            out.push_str(&format!(" (set {})", formula_set_to_sexprs(set)));
            out.push_str(&format!(" (left {})", sequent_to_sexpr_text(left)));
            out.push_str(&format!(" (right {})", sequent_to_sexpr_text(right)));
        }
        Rule::AndL { family }
        | Rule::AndR { family }
        | Rule::OrL { family }
        | Rule::OrR { family } => {
            out.push_str(" (family");
            for s in family {
                out.push_str(&format!(" (set {})", formula_set_to_sexprs(s)));
            }
            out.push(')');
        }
        Rule::Lf { family } => {
            out.push_str(" (prefix");
            for s in &family.prefix {
                out.push_str(&format!(" (set {})", formula_set_to_sexprs(s)));
            }
            out.push(')');
            out.push_str(&format!(" (tail {})", formula_set_to_sexprs(&family.tail)));
        }
    }
    out.push_str(&format!(" (conclusion {})", sequent_to_sexpr_text(&p.conclusion)));
    if p.premises.is_empty() {
        out.push(')');
    } else {
        out.push_str(" (premises\n");
        for (i, premise) in p.premises.iter().enumerate() {
            render_proof(premise, indent + 1, out);
            if i + 1 < p.premises.len() {
                out.push('\n');
            }
        }
        out.push_str("))");
    }
}

pub fn proof_from_sexpr(e: &Sexpr, path: &Path) -> Result<ProofTree, FileError> {
    let items = match e {
        Sexpr::List(items) => items,
        _ => return Err(parse_err(path, 0, 0, "proof must be a list")),
    };
    match items.first() {
        Some(Sexpr::Atom(h)) if h == "proof" => {}
        _ => return Err(parse_err(path, 0, 0, "proof must start with `proof`")),
    }
    let mut rule_tag: Option<String> = None;
    let mut set: Option<BTreeSet<Formula>> = None;
    let mut family: Option<BTreeSet<BTreeSet<Formula>>> = None;
    let mut prefix: Option<Vec<BTreeSet<Formula>>> = None;
    let mut tail: Option<BTreeSet<Formula>> = None;
    let mut left: Option<Sequent> = None;
    let mut right: Option<Sequent> = None;
    let mut conclusion: Option<Sequent> = None;
    let mut premises: Vec<ProofTree> = Vec::new();
    let parse_set = |rest: &[Sexpr]| -> Result<BTreeSet<Formula>, FileError> {
        rest.iter()
            .map(|f| formula_from_sexpr(f).map_err(|e| from_sexpr_err(path, e)))
            .collect()
    };
    let parse_set_list = |rest: &[Sexpr]| -> Result<Vec<BTreeSet<Formula>>, FileError> {
        rest.iter()
            .map(|s| match s {
                Sexpr::List(items) => match items.split_first() {
                    Some((Sexpr::Atom(h), inner)) if h == "set" => parse_set(inner),
                    _ => Err(parse_err(path, 0, 0, "expected `(set ...)`")),
                },
                _ => Err(parse_err(path, 0, 0, "expected `(set ...)`")),
            })
            .collect()
    };
    for part in &items[1..] {
        let sub = match part {
            Sexpr::List(sub) => sub,
            _ => return Err(parse_err(path, 0, 0, "proof parts must be lists")),
        };
        let (head, rest) = match sub.split_first() {
            Some((Sexpr::Atom(h), rest)) => (h.as_str(), rest),
            _ => return Err(parse_err(path, 0, 0, "proof part must be named")),
        };
        match head {
            "rule" => match rest.first() {
                Some(Sexpr::Atom(t)) => rule_tag = Some(t.clone()),
                _ => return Err(parse_err(path, 0, 0, "`rule` expects a tag")),
            },
            "set" => set = Some(parse_set(rest)?),
            "family" => family = Some(parse_set_list(rest)?.into_iter().collect()),
            "prefix" => prefix = Some(parse_set_list(rest)?),
            "tail" => tail = Some(parse_set(rest)?),
            "left" => {
                left = Some(sequent_from_sexpr(
                    rest.first()
                        .ok_or_else(|| parse_err(path, 0, 0, "`left` expects a sequent"))?,
                    path,
                )?)
            }
            "right" => {
                right = Some(sequent_from_sexpr(
                    rest.first()
                        .ok_or_else(|| parse_err(path, 0, 0, "`right` expects a sequent"))?,
                    path,
                )?)
            }
            "conclusion" => {
                conclusion = Some(sequent_from_sexpr(
                    rest.first()
                        .ok_or_else(|| parse_err(path, 0, 0, "`conclusion` expects a sequent"))?,
                    path,
                )?)
            }
            "premises" => {
                for pe in rest {
                    premises.push(proof_from_sexpr(pe, path)?);
                }
            }
            other => return Err(parse_err(path, 0, 0, format!("unknown proof part `{other}`"))),
        }
    }
    let tag = rule_tag.ok_or_else(|| parse_err(path, 0, 0, "missing `rule`"))?;
    let need_set = || set.clone().ok_or_else(|| parse_err(path, 0, 0, "missing `set`"));
    let need_family = || {
        family
            .clone()
            .ok_or_else(|| parse_err(path, 0, 0, "missing `family`"))
    };
    let rule = match tag.as_str() {
        "ax" => Rule::Ax,
        "w" => Rule::Weaken,
        "cut" => Rule::Cut {
            set: need_set()?,
            left: left.ok_or_else(|| parse_err(path, 0, 0, "missing `left`"))?,
            right: right.ok_or_else(|| parse_err(path, 0, 0, "missing `right`"))?,
        },
        "neg-l" => Rule::NegL { set: need_set()? },
        "neg-r" => Rule::NegR { set: need_set()? },
        "and-l" => Rule::AndL {
            family: need_family()?,
        },
        "and-r" => Rule::AndR {
            family: need_family()?,
        },
        "or-l" => Rule::OrL {
            family: need_family()?,
        },
        "or-r" => Rule::OrR {
            family: need_family()?,
        },
        "nec" => Rule::Nec { set: need_set()? },
        "lf" => Rule::Lf {
            family: FormulaFamily {
                prefix: prefix.unwrap_or_default(),
                tail: tail.ok_or_else(|| parse_err(path, 0, 0, "missing `tail`"))?,
            },
        },
        "tl" => Rule::TL { set: need_set()? },
        other => return Err(parse_err(path, 0, 0, format!("unknown rule `{other}`"))),
    };
    Ok(ProofTree {
        conclusion: conclusion.ok_or_else(|| parse_err(path, 0, 0, "missing `conclusion`"))?,
        rule,
        premises,
    })
}

fn sequent_json(s: &Sequent) -> Value {
    json!({
        "ante": s.ante.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "succ": s.succ.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

fn formula_set_json(set: &BTreeSet<Formula>) -> Value {
    Value::Array(set.iter().map(|f| Value::String(f.to_string())).collect())
}

pub fn proof_node_to_json(p: &ProofTree) -> Value {
    let params = match &p.rule {
        Rule::Ax | Rule::Weaken => json!({}),
        Rule::NegL { set } | Rule::NegR { set } | Rule::Nec { set } | Rule::TL { set } => {
            json!({ "set": formula_set_json(set) })
        }
        Rule::Cut { set, left, right } => json!({
            "set": formula_set_json(set),
            "left": sequent_json(left),
            "right": sequent_json(right),
        }),
        Rule::AndL { family }
        | Rule::AndR { family }
        | Rule::OrL { family }
        | Rule::OrR { family } => json!({
            "family": family.iter().map(formula_set_json).collect::<Vec<_>>(),
        }),
        Rule::Lf { family } => json!({
            "prefix": family.prefix.iter().map(formula_set_json).collect::<Vec<_>>(),
            "tail": formula_set_json(&family.tail),
        }),
    };
    json!({
        "rule": rule_tag_text(&p.rule),
        "params": params,
        "conclusion": sequent_json(&p.conclusion),
        "premises": p.premises.iter().map(proof_node_to_json).collect::<Vec<_>>(),
    })
}

pub fn proof_to_json(p: &ProofTree) -> Value {
    let mut root = proof_node_to_json(p);
    root["kind"] = json!("proof");
    root
}

pub fn proof_node_from_json(v: &Value, path: &Path) -> Result<ProofTree, FileError> {
    let parse_set = |val: &Value| -> Result<BTreeSet<Formula>, FileError> {
        val.as_array()
            .ok_or_else(|| parse_err(path, 0, 0, "expected a formula array"))?
            .iter()
            .map(|f| {
                let text = f
                    .as_str()
                    .ok_or_else(|| parse_err(path, 0, 0, "formula must be a string"))?;
                crate::calculus::parse_formula(text).map_err(|e| from_sexpr_err(path, e))
            })
            .collect()
    };
    let tag = v["rule"]
        .as_str()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `rule`"))?;
    let params = &v["params"];
    let rule = match tag {
        "ax" => Rule::Ax,
        "w" => Rule::Weaken,
        "cut" => Rule::Cut {
            set: parse_set(&params["set"])?,
            left: sequent_from_json(&params["left"], path)?,
            right: sequent_from_json(&params["right"], path)?,
        },
        "neg-l" => Rule::NegL { set: parse_set(&params["set"])? },
        "neg-r" => Rule::NegR { set: parse_set(&params["set"])? },
        "and-l" | "and-r" | "or-l" | "or-r" => {
            let family: BTreeSet<BTreeSet<Formula>> = params["family"]
                .as_array()
                .ok_or_else(|| parse_err(path, 0, 0, "missing `family`"))?
                .iter()
                .map(|s| parse_set(s))
                .collect::<Result<_, _>>()?;
            match tag {
                "and-l" => Rule::AndL { family },
                "and-r" => Rule::AndR { family },
                "or-l" => Rule::OrL { family },
                _ => Rule::OrR { family },
            }
        }
        "nec" => Rule::Nec { set: parse_set(&params["set"])? },
        "lf" => Rule::Lf {
            family: FormulaFamily {
                prefix: params["prefix"]
                    .as_array()
                    .ok_or_else(|| parse_err(path, 0, 0, "missing `prefix`"))?
                    .iter()
                    .map(|s| parse_set(s))
                    .collect::<Result<_, _>>()?,
                tail: parse_set(&params["tail"])?,
            },
        },
        "tl" => Rule::TL { set: parse_set(&params["set"])? },
        other => return Err(parse_err(path, 0, 0, format!("unknown rule `{other}`"))),
    };
    let premises = v["premises"]
        .as_array()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `premises`"))?
        .iter()
        .map(|p| proof_node_from_json(p, path))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofTree {
        conclusion: sequent_from_json(&v["conclusion"], path)?,
        rule,
        premises,
    })
}

pub fn load_proof(path: &Path) -> Result<ProofTree, FileError> {
    let src = read_file(path)?;
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        proof_node_from_json(&v, path)
    } else {
        let e = read_sexpr(&src).map_err(|e| from_sexpr_err(path, e))?;
        proof_from_sexpr(&e, path)
    }
}

// ---------------------------------------------------------- horn clauses

fn parse_horn_atom(tok: &str, vars: &mut Vec<String>, path: &Path, ln: usize) -> Result<HornAtom, FileError> {
    let mut var_index = |name: &str| -> usize {
        match vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                vars.push(name.to_string());
                vars.len() - 1
            }
        }
    };
    if let Some((a, b)) = tok.split_once('<') {
        Ok(HornAtom::Edge(var_index(a.trim()), var_index(b.trim())))
    } else if let Some((a, b)) = tok.split_once('=') {
        Ok(HornAtom::Eq(var_index(a.trim()), var_index(b.trim())))
    } else {
        Err(parse_err(path, ln, 1, format!("bad atom `{tok}`")))
    }
}

pub fn parse_horn_text(src: &str, path: &Path) -> Result<Vec<HornClause>, FileError> {
    let mut out = Vec::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (body_src, head_src) = line
            .split_once("->")
            .ok_or_else(|| parse_err(path, ln + 1, 1, "clause must contain `->`"))?;
        let mut vars = Vec::new();
        let mut body = Vec::new();
        for tok in body_src.split('&') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            body.push(parse_horn_atom(tok, &mut vars, path, ln + 1)?);
        }
        let head_src = head_src.trim();
        let head = if head_src == "false" {
            None
        } else {
            Some(parse_horn_atom(head_src, &mut vars, path, ln + 1)?)
        };
        out.push(HornClause { vars, body, head });
    }
    Ok(out)
}

pub fn horn_atom_to_text(atom: HornAtom, vars: &[String]) -> String {
    match atom {
        HornAtom::Edge(a, b) => format!("{}<{}", vars[a], vars[b]),
        HornAtom::Eq(a, b) => format!("{}={}", vars[a], vars[b]),
    }
}

pub fn horn_to_text(clauses: &[HornClause]) -> String {
    let mut out = String::new();
    for c in clauses {
        let body = c
            .body
            .iter()
            .map(|&a| horn_atom_to_text(a, &c.vars))
            .collect::<Vec<_>>()
            .join(" & ");
        let head = match c.head {
            Some(h) => horn_atom_to_text(h, &c.vars),
            None => "false".to_string(),
        };
        if body.is_empty() {
            out.push_str(&format!("-> {head}\n"));
        } else {
            out.push_str(&format!("{body} -> {head}\n"));
        }
    }
    out
}

pub fn horn_to_json(clauses: &[HornClause]) -> Value {
    json!({
        "kind": "horn",
        "clauses": clauses.iter().map(|c| json!({
            "body": c.body.iter().map(|&a| horn_atom_to_text(a, &c.vars)).collect::<Vec<_>>(),
            "head": c.head.map(|h| horn_atom_to_text(h, &c.vars)),
        })).collect::<Vec<_>>(),
    })
}

pub fn horn_from_json(v: &Value, path: &Path) -> Result<Vec<HornClause>, FileError> {
    let clauses = v["clauses"]
        .as_array()
        .ok_or_else(|| parse_err(path, 0, 0, "missing `clauses`"))?;
    let mut out = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        let mut vars = Vec::new();
        let mut body = Vec::new();
        for tok in c["body"]
            .as_array()
            .ok_or_else(|| parse_err(path, 0, 0, "missing clause `body`"))?
        {
            let tok = tok
                .as_str()
                .ok_or_else(|| parse_err(path, 0, 0, "atom must be a string"))?;
            body.push(parse_horn_atom(tok, &mut vars, path, i + 1)?);
        }
        let head = match &c["head"] {
            Value::Null => None,
            Value::String(s) => Some(parse_horn_atom(s, &mut vars, path, i + 1)?),
            _ => return Err(parse_err(path, 0, 0, "bad clause `head`")),
        };
        out.push(HornClause { vars, body, head });
    }
    Ok(out)
}

pub fn load_horn(path: &Path) -> Result<Vec<HornClause>, FileError> {
    let src = read_file(path)?;
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src)
            .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
        horn_from_json(&v, path)
    } else {
        parse_horn_text(&src, path)
    }
}

// ----------------------------------------------------------- conversion

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Frame,
    Morphism,
    Valuation,
    Formula,
    Sequent,
    Proof,
    Horn,
}

impl FileKind {
    pub fn parse(s: &str) -> Option<FileKind> {
        match s {
            "frame" => Some(FileKind::Frame),
            "morphism" => Some(FileKind::Morphism),
            "valuation" => Some(FileKind::Valuation),
            "formula" => Some(FileKind::Formula),
            "sequent" => Some(FileKind::Sequent),
            "proof" => Some(FileKind::Proof),
            "horn" => Some(FileKind::Horn),
            _ => None,
        }
    }
}

/// Guesses the kind of a file from its syntax.
pub fn sniff_kind(src: &str) -> Option<FileKind> {
    let t = src.trim_start();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).ok()?;
        return FileKind::parse(v["kind"].as_str()?);
    }
    if t.starts_with("points:") {
        return Some(FileKind::Frame);
    }
    if t.starts_with("from:") {
        return Some(FileKind::Morphism);
    }
    if t.starts_with("(proof") {
        return Some(FileKind::Proof);
    }
    if t.starts_with("(seq") {
        return Some(FileKind::Sequent);
    }
    if t.starts_with('(') {
        return Some(FileKind::Formula);
    }
    if t.lines().next()?.contains("->") {
        return Some(FileKind::Horn);
    }
    if t.lines().next()?.contains(':') {
        return Some(FileKind::Valuation);
    }
    None
}

/// Converts a file between the text and JSON encodings, losslessly.
pub fn convert(src: &str, path: &Path, kind: FileKind, to_json: bool) -> Result<String, FileError> {
    let is_json = src.trim_start().starts_with('{');
    let render_json = |v: Value| serde_json::to_string_pretty(&v).unwrap() + "\n";
    match kind {
        FileKind::Frame => {
            let frame = if is_json {
                let v: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                frame_from_json(&v, path)?
            } else {
                parse_frame_text(src, path)?
            };
            Ok(if to_json {
                render_json(frame_to_json(&frame))
            } else {
                frame_to_text(&frame)
            })
        }
        FileKind::Morphism => {
            let mf = if is_json {
                let v: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                morphism_file_from_json(&v, path)?
            } else {
                parse_morphism_text(src, path)?
            };
            Ok(if to_json {
                render_json(morphism_file_to_json(&mf))
            } else {
                morphism_file_to_text(&mf)
            })
        }
        FileKind::Valuation => {
            let v = if is_json {
                let j: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                valuation_from_json(&j, path)?
            } else {
                parse_valuation_text(src, path)?
            };
            Ok(if to_json {
                render_json(valuation_to_json(&v))
            } else {
                valuation_to_text(&v)
            })
        }
        FileKind::Formula => {
            let f = if is_json {
                let j: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                crate::calculus::parse_formula(
                    j["text"]
                        .as_str()
                        .ok_or_else(|| parse_err(path, 0, 0, "missing `text`"))?,
                )
                .map_err(|e| from_sexpr_err(path, e))?
            } else {
                crate::calculus::parse_formula(src.trim()).map_err(|e| from_sexpr_err(path, e))?
            };
            Ok(if to_json {
                render_json(formula_to_json(&f))
            } else {
                f.to_string() + "\n"
            })
        }
        FileKind::Sequent => {
            let s = if is_json {
                let j: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                sequent_from_json(&j, path)?
            } else {
                let e = read_sexpr(src).map_err(|e| from_sexpr_err(path, e))?;
                sequent_from_sexpr(&e, path)?
            };
            Ok(if to_json {
                render_json(sequent_to_json(&s))
            } else {
                sequent_to_sexpr_text(&s) + "\n"
            })
        }
        FileKind::Proof => {
            let p = if is_json {
                let j: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                proof_node_from_json(&j, path)?
            } else {
                let e = read_sexpr(src).map_err(|e| from_sexpr_err(path, e))?;
                proof_from_sexpr(&e, path)?
            };
            Ok(if to_json {
                render_json(proof_to_json(&p))
            } else {
                proof_to_sexpr_text(&p)
            })
        }
        FileKind::Horn => {
            let h = if is_json {
                let j: Value = serde_json::from_str(src)
                    .map_err(|e| parse_err(path, e.line(), e.column(), e.to_string()))?;
                horn_from_json(&j, path)?
            } else {
                parse_horn_text(src, path)?
            };
            Ok(if to_json {
                render_json(horn_to_json(&h))
            } else {
                horn_to_text(&h)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::*;
    use crate::fixtures::*;

    fn p() -> PathBuf {
        PathBuf::from("<test>")
    }

    #[test]
    fn frame_text_round_trip() {
        let v = fan_cycle_frame();
        let text = frame_to_text(&v);
        assert_eq!(text, "points: 0 1 2\nedges: 0>1 0>2 1>2 2>1\n");
        assert_eq!(parse_frame_text(&text, &p()).unwrap(), v);
        let empty = Frame::empty();
        let text = frame_to_text(&empty);
        assert_eq!(parse_frame_text(&text, &p()).unwrap(), empty);
    }

    #[test]
    fn frame_json_round_trip() {
        let v = fan_cycle_frame();
        let j = frame_to_json(&v);
        assert_eq!(frame_from_json(&j, &p()).unwrap(), v);
    }

    #[test]
    fn malformed_edge_reports_position() {
        let err = parse_frame_text("points: 0 1\nedges: 0>1 0-1\n", &p()).unwrap_err();
        match err {
            FileError::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("0-1"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn valuation_round_trip() {
        let src = "x: 0 1\ny: 2\n";
        let v = parse_valuation_text(src, &p()).unwrap();
        assert_eq!(valuation_to_text(&v), src);
        let j = valuation_to_json(&v);
        assert_eq!(valuation_from_json(&j, &p()).unwrap(), v);
    }

    #[test]
    fn sequent_round_trip() {
        let s = Sequent::new([var("p"), bx(var("q"))], [top()]);
        let text = sequent_to_sexpr_text(&s);
        let e = read_sexpr(&text).unwrap();
        assert_eq!(sequent_from_sexpr(&e, &p()).unwrap(), s);
        let j = sequent_to_json(&s);
        assert_eq!(sequent_from_json(&j, &p()).unwrap(), s);
    }

    #[test]
    fn proof_round_trips_both_encodings() {
        use crate::calculus::{derive_equivalence, EquivalenceParams, EquivalenceVariant};
        let eq = derive_equivalence(
            EquivalenceVariant::BoxedMeet,
            &EquivalenceParams::Set(BTreeSet::from([var("p"), var("q")])),
        )
        .unwrap();
        for proof in [&eq.forward, &eq.backward] {
            let text = proof_to_sexpr_text(proof);
            let e = read_sexpr(&text).unwrap();
            let back = proof_from_sexpr(&e, &p()).unwrap();
            assert_eq!(&back, proof);
            let j = proof_to_json(proof);
            let back = proof_node_from_json(&j, &p()).unwrap();
            assert_eq!(&back, proof);
        }
    }

    #[test]
    fn horn_round_trip() {
        let src = "x<y & y<z -> x<z\n-> x<x\nx<x -> false\n";
        let clauses = parse_horn_text(src, &p()).unwrap();
        assert_eq!(clauses.len(), 3);
        assert_eq!(horn_to_text(&clauses), src);
        let j = horn_to_json(&clauses);
        assert_eq!(horn_from_json(&j, &p()).unwrap(), clauses);
    }

    #[test]
    fn sniffing_and_conversion() {
        let v = fan_cycle_frame();
        let text = frame_to_text(&v);
        assert_eq!(sniff_kind(&text), Some(FileKind::Frame));
        let as_json = convert(&text, &p(), FileKind::Frame, true).unwrap();
        assert_eq!(sniff_kind(&as_json), Some(FileKind::Frame));
        let back = convert(&as_json, &p(), FileKind::Frame, false).unwrap();
        assert_eq!(back, text);
        assert_eq!(sniff_kind("(box (var x))"), Some(FileKind::Formula));
        assert_eq!(sniff_kind("(seq (ante) (succ))"), Some(FileKind::Sequent));
        assert_eq!(sniff_kind("from: a.frm\nto: b.frm\nmap:"), Some(FileKind::Morphism));
    }
}

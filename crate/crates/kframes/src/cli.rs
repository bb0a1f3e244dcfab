//! Command-line front end. Exit codes: 0 the verdict holds or the input
//! is accepted, 1 it fails or is rejected (with witnesses), 2 the bound
//! was exhausted inconclusively, 3 usage or parse errors.
//!
//! The default search bound is 6 and can be overridden with the
//! `KF_BOUND` environment variable or per-invocation flags. All
//! randomness is seeded; identical inputs yield byte-identical reports.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::calculus::{
    check_proof, countermodel_search, deduction_transform, derive_equivalence,
    normal::normal_form, proof::table_schemata, CalculusParams, CheckOutcome, EquivalenceParams,
    EquivalenceVariant, FormulaFamily, RefutationOutcome,
};
use crate::cat::{
    cokernel_pair, coequalizer, coregular_factorization, equalizer, pullback_along_regmono,
    set_pullback, verify_universal_bounded, wide_coequalizer, UniversalCheck, UniversalVerdict,
};
use crate::fileio::{
    self, convert, load_formula, load_frame, load_horn, load_morphism, load_proof, load_sequent,
    sniff_kind, write_file, FileKind,
};
use crate::frame::{check_class, Frame, FrameClass, PointId, TableLogic};
use crate::morphism::{
    classify, compose, enumerate_pmorphisms, enumerate_subreductions, image, BoundedStatus, DEFAULT_ENUMERATION_GUARD,
};
use crate::props::{
    amalgam_report, amalgamate, beth_probe, beth_report, reproduction, separates_variables_check,
    superamalgamate, BethStrength, Cospan, SeparationOutcome,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

const DEFAULT_BOUND: usize = 6;

#[derive(Parser)]
#[command(name = "kframes", version, about = "Kripke frame workbench", disable_help_subcommand = true)]
struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frame-level operations.
    Frame {
        #[command(subcommand)]
        cmd: FrameCmd,
    },
    /// Morphism-level operations.
    Morph {
        #[command(subcommand)]
        cmd: MorphCmd,
    },
    /// Categorical constructions.
    Cat {
        #[command(subcommand)]
        cmd: CatCmd,
    },
    /// Formula-level operations.
    Formula {
        #[command(subcommand)]
        cmd: FormulaCmd,
    },
    /// Proof-level operations.
    Proof {
        #[command(subcommand)]
        cmd: ProofCmd,
    },
    /// Semantic search.
    Semantics {
        #[command(subcommand)]
        cmd: SemanticsCmd,
    },
    /// Property probes.
    Props {
        #[command(subcommand)]
        cmd: PropsCmd,
    },
    /// Convert a file between the text and JSON encodings.
    Convert {
        file: PathBuf,
        /// Output encoding.
        #[arg(long, value_parser = ["text", "json"])]
        format: String,
        /// File kind; sniffed from the contents when omitted.
        #[arg(long)]
        kind: Option<String>,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Check membership in a frame class.
    Class {
        file: PathBuf,
        #[arg(long)]
        class: String,
    },
    /// The set of points reachable from a point.
    Cone {
        file: PathBuf,
        #[arg(long)]
        point: PointId,
    },
    /// Generated subframe of a seed set.
    Subframe {
        file: PathBuf,
        /// Comma-separated seed points.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Disjoint union of frames.
    Union {
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an isomorphism between two frames.
    Iso { left: PathBuf, right: PathBuf },
}

#[derive(Subcommand)]
enum MorphCmd {
    /// Validate a morphism file.
    Validate { file: PathBuf },
    /// Image factorization of a morphism.
    Image { file: PathBuf },
    /// All p-morphisms between two frames.
    Enumerate { source: PathBuf, target: PathBuf },
    /// Subreduction catalog of a frame.
    Subreductions { file: PathBuf },
    /// Bounded epi/mono classification.
    Classify {
        file: PathBuf,
        #[arg(long)]
        class: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Compose two morphisms (outer applied after inner).
    Compose { outer: PathBuf, inner: PathBuf },
}

#[derive(Subcommand)]
enum CatCmd {
    /// Coequalizer of a parallel pair.
    Coeq {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cokernel pair of a morphism.
    Cokpair {
        f: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equalizer of a parallel pair.
    Equalize {
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Epi/regular-mono factorization.
    Factor { f: PathBuf },
    /// Pullback along an injective morphism.
    PullbackRegmono {
        f: PathBuf,
        m: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matching-pairs pullback candidate with class verdict.
    Setpb {
        f0: PathBuf,
        f1: PathBuf,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint coequalizer of the pairs a morphism coequalizes.
    WideCoeq {
        f: PathBuf,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded universal-property verification.
    Verify {
        /// Candidate shape.
        #[arg(long, value_parser = ["coeq", "cokpair", "pullback", "equalizer", "product"])]
        shape: String,
        /// Diagram morphisms, shape-dependent.
        files: Vec<PathBuf>,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        bound: Option<usize>,
    },
}

#[derive(Subcommand)]
enum FormulaCmd {
    /// Normal form of a formula.
    Nf { file: PathBuf },
}

#[derive(Subcommand)]
enum ProofCmd {
    /// Check a proof tree.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "K")]
        logic: String,
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Generate checked proofs of a standard equivalence.
    DeriveEq {
        /// Variant: o, i, ii, iii, iv or v.
        #[arg(long)]
        variant: String,
        /// Parameter file: `(set f...)`, `(family (set ...)...)` or
        /// `(ifamily (prefix (set ...)...) (tail f...))`.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discharge theory axioms from a proof.
    Deduce {
        file: PathBuf,
        #[arg(long, default_value = "K")]
        logic: String,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SemanticsCmd {
    /// Search catalog frames for a countermodel to a sequent.
    Refute {
        sequent: PathBuf,
        #[arg(long, default_value = "K")]
        logic: String,
        #[arg(long)]
        theory: Option<PathBuf>,
        /// Catalog frame files.
        #[arg(long, required = true, num_args = 1..)]
        catalog: Vec<PathBuf>,
        /// Schema instantiation depth.
        #[arg(long, default_value_t = 0)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum PropsCmd {
    /// Complete a cospan of surjections.
    Amalg {
        f0: PathBuf,
        f1: PathBuf,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Complete a cospan covering every matching pair.
    Superamalg {
        f0: PathBuf,
        f1: PathBuf,
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Definability probe over a catalog.
    Beth {
        #[arg(long, conflicts_with = "strong")]
        weak: bool,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        class: String,
        #[arg(long, required = true, num_args = 1..)]
        catalog: Vec<PathBuf>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Separation-of-variables check for a relation formula.
    Sv {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        /// Comma-separated base variables.
        #[arg(long)]
        vars: String,
        #[arg(long, required = true, num_args = 1..)]
        catalog: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Verify products and equalizers of sampled functional frames.
    FunctionalLimits {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Rerun the full fixture suite and write witnesses.
    ReproducePaper {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
}

fn env_bound() -> usize {
    std::env::var("KF_BOUND")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_BOUND)
}

fn effective_bound(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(env_bound)
}

/// Parses a class specifier: a table logic name, `all`, `functional`,
/// `sub-of:<framefile>` or `horn:<clausefile>`.
fn parse_class(spec: &str) -> Result<FrameClass, String> {
    if let Some(logic) = TableLogic::parse(spec) {
        return Ok(FrameClass::Table(logic));
    }
    match spec {
        "all" => Ok(FrameClass::All),
        "functional" => Ok(FrameClass::Functional),
        _ => {
            if let Some(path) = spec.strip_prefix("sub-of:") {
                let frame = load_frame(Path::new(path)).map_err(|e| e.to_string())?;
                Ok(FrameClass::SubreductionsOf(frame))
            } else if let Some(path) = spec.strip_prefix("horn:") {
                let clauses = load_horn(Path::new(path)).map_err(|e| e.to_string())?;
                Ok(FrameClass::Horn(clauses))
            } else {
                Err(format!(
                    "unknown class `{spec}` (expected a table logic, `all`, `functional`, `sub-of:<file>` or `horn:<file>`)"
                ))
            }
        }
    }
}

fn calculus_params(
    logic: &str,
    theory_file: Option<&Path>,
    extra_vars: &BTreeSet<String>,
) -> Result<CalculusParams, String> {
    let schemata = match TableLogic::parse(logic) {
        Some(l) => table_schemata(l),
        None => return Err(format!("unknown logic `{logic}`")),
    };
    let mut theory = BTreeSet::new();
    if let Some(path) = theory_file {
        let src = fileio::read_file(path).map_err(|e| e.to_string())?;
        for expr in crate::calculus::sexpr::read_sexprs(&src).map_err(|e| e.to_string())? {
            theory.insert(
                crate::calculus::sexpr::formula_from_sexpr(&expr).map_err(|e| e.to_string())?,
            );
        }
    }
    let mut vars = extra_vars.clone();
    for t in &theory {
        vars.extend(t.variables());
    }
    Ok(CalculusParams::new(vars, schemata, theory))
}

struct Output {
    json: bool,
    lines: Vec<String>,
    payload: serde_json::Map<String, serde_json::Value>,
}

impl Output {
    fn new(json: bool) -> Output {
        Output {
            json,
            lines: Vec::new(),
            payload: serde_json::Map::new(),
        }
    }
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
    fn field(&mut self, key: &str, value: serde_json::Value) {
        self.payload.insert(key.to_string(), value);
    }
    fn finish(mut self, exit: i32) -> i32 {
        if self.json {
            self.payload
                .insert("exit".into(), json!(exit));
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(self.payload)).unwrap()
            );
        } else {
            for l in self.lines {
                println!("{l}");
            }
        }
        exit
    }
}

fn maybe_write(out: &Option<PathBuf>, contents: &str) -> Result<(), String> {
    if let Some(path) = out {
        write_file(path, contents).map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version on stdout with exit 0; report real
            // usage errors on the dedicated code
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    let mut out = Output::new(cli.json);
    match cli.command {
        Command::Frame { cmd } => run_frame(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Morph { cmd } => run_morph(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Cat { cmd } => run_cat(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Formula { cmd } => run_formula(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Proof { cmd } => run_proof(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Semantics { cmd } => run_semantics(cmd, &mut out).map(|c| out_finish(out, c)),
        Command::Props { cmd } => run_props(cmd, cli.seed, &mut out).map(|c| out_finish(out, c)),
        Command::Convert {
            file,
            format,
            kind,
            out: out_path,
        } => {
            let src = fileio::read_file(&file).map_err(|e| e.to_string())?;
            let kind = match kind {
                Some(k) => FileKind::parse(&k).ok_or_else(|| format!("unknown kind `{k}`"))?,
                None => sniff_kind(&src).ok_or("could not determine the file kind")?,
            };
            let converted =
                convert(&src, &file, kind, format == "json").map_err(|e| e.to_string())?;
            match out_path {
                Some(path) => write_file(&path, &converted).map_err(|e| e.to_string())?,
                None => print!("{converted}"),
            }
            Ok(EXIT_OK)
        }
    }
}

fn out_finish(out: Output, code: i32) -> i32 {
    out.finish(code)
}

fn run_frame(cmd: FrameCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        FrameCmd::Class { file, class } => {
            let frame = load_frame(&file).map_err(|e| e.to_string())?;
            let class = parse_class(&class)?;
            match check_class(&frame, &class) {
                Ok(()) => {
                    out.line(format!("frame is in class {class}"));
                    out.field("verdict", json!("holds"));
                    Ok(EXIT_OK)
                }
                Err(v) => {
                    out.line(format!("frame is not in class {class}: {v}"));
                    out.field("verdict", json!("fails"));
                    out.field("witness", json!(v.to_string()));
                    Ok(EXIT_FAIL)
                }
            }
        }
        FrameCmd::Cone { file, point } => {
            let frame = load_frame(&file).map_err(|e| e.to_string())?;
            let cone = frame.cone(point).map_err(|e| e.to_string())?;
            let list: Vec<PointId> = cone.into_iter().collect();
            out.line(format!(
                "cone of {point}: {}",
                list.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
            ));
            out.field("cone", json!(list));
            Ok(EXIT_OK)
        }
        FrameCmd::Subframe { file, seeds, out: out_path } => {
            let frame = load_frame(&file).map_err(|e| e.to_string())?;
            let seeds: BTreeSet<PointId> = seeds
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse().map_err(|_| format!("bad seed `{s}`")))
                .collect::<Result<_, _>>()?;
            let sub =
                crate::frame::generated_subframe(&frame, &seeds).map_err(|e| e.to_string())?;
            let text = sub.to_string();
            maybe_write(&out_path, &text)?;
            out.line(text.trim_end().to_string());
            out.field("frame", fileio::frame_to_json(&sub));
            Ok(EXIT_OK)
        }
        FrameCmd::Union { files, out: out_path } => {
            let frames = files
                .iter()
                .map(|f| load_frame(f).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let (union, _) = crate::frame::disjoint_union(&frames);
            let text = union.to_string();
            maybe_write(&out_path, &text)?;
            out.line(text.trim_end().to_string());
            out.field("frame", fileio::frame_to_json(&union));
            Ok(EXIT_OK)
        }
        FrameCmd::Iso { left, right } => {
            let a = load_frame(&left).map_err(|e| e.to_string())?;
            let b = load_frame(&right).map_err(|e| e.to_string())?;
            match crate::frame::is_isomorphic(&a, &b) {
                Some(bij) => {
                    let rendered = bij
                        .iter()
                        .map(|(x, y)| format!("{x}>{y}"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.line(format!("isomorphic: {rendered}"));
                    out.field("bijection", json!(bij));
                    Ok(EXIT_OK)
                }
                None => {
                    out.line("not isomorphic".to_string());
                    out.field("verdict", json!("fails"));
                    Ok(EXIT_FAIL)
                }
            }
        }
    }
}

fn run_morph(cmd: MorphCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        MorphCmd::Validate { file } => match load_morphism(&file) {
            Ok(m) => {
                out.line(format!("valid p-morphism: {m}"));
                out.field("verdict", json!("holds"));
                Ok(EXIT_OK)
            }
            Err(e) => {
                out.line(format!("invalid: {e}"));
                out.field("verdict", json!("fails"));
                out.field("witness", json!(e.to_string()));
                Ok(EXIT_FAIL)
            }
        },
        MorphCmd::Image { file } => {
            let f = load_morphism(&file).map_err(|e| e.to_string())?;
            let (im, e, m) = image(&f);
            out.line(format!("image frame:\n{im}"));
            out.line(format!("surjection {e}"));
            out.line(format!("inclusion {m}"));
            out.field("image", fileio::frame_to_json(&im));
            Ok(EXIT_OK)
        }
        MorphCmd::Enumerate { source, target } => {
            let s = load_frame(&source).map_err(|e| e.to_string())?;
            let t = load_frame(&target).map_err(|e| e.to_string())?;
            let morphisms =
                enumerate_pmorphisms(&s, &t, DEFAULT_ENUMERATION_GUARD).map_err(|e| e.to_string())?;
            out.line(format!("{} p-morphisms", morphisms.len()));
            for m in &morphisms {
                out.line(format!("  {m}"));
            }
            out.field(
                "morphisms",
                json!(morphisms.iter().map(|m| m.to_string()).collect::<Vec<_>>()),
            );
            Ok(EXIT_OK)
        }
        MorphCmd::Subreductions { file } => {
            let frame = load_frame(&file).map_err(|e| e.to_string())?;
            let subs = enumerate_subreductions(&frame).map_err(|e| e.to_string())?;
            out.line(format!("{} subreductions up to isomorphism", subs.len()));
            for s in &subs {
                out.line(s.to_string().trim_end().to_string());
            }
            out.field(
                "subreductions",
                json!(subs.iter().map(fileio::frame_to_json).collect::<Vec<_>>()),
            );
            Ok(EXIT_OK)
        }
        MorphCmd::Classify { file, class, bound } => {
            let f = load_morphism(&file).map_err(|e| e.to_string())?;
            let class = parse_class(&class)?;
            let bound = effective_bound(bound);
            let c = classify(&f, &class, bound).map_err(|e| e.to_string())?;
            out.line(format!(
                "injective: {}; surjective (epi): {}",
                c.injective, c.surjective
            ));
            let (mono_text, mono_code) = match &c.mono {
                BoundedStatus::Certified { exhaustive: true } => ("mono: certified".to_string(), EXIT_OK),
                BoundedStatus::Certified { exhaustive: false } => {
                    (format!("mono: certified up to bound {bound}"), EXIT_OK)
                }
                BoundedStatus::Refuted(r) => (
                    format!("mono: refuted by a pair from {} points", r.test_frame.size()),
                    EXIT_OK,
                ),
                BoundedStatus::Inconclusive => ("mono: inconclusive".to_string(), EXIT_INCONCLUSIVE),
            };
            out.line(mono_text);
            let (re_text, re_code) = match &c.regular_epi {
                BoundedStatus::Certified { .. } => ("regular epi: certified".to_string(), EXIT_OK),
                BoundedStatus::Refuted(r) => (
                    format!(
                        "regular epi: refuted; quotient has {} points{}",
                        r.quotient.target().size(),
                        if r.heuristic { " (stabilization heuristic)" } else { "" }
                    ),
                    EXIT_OK,
                ),
                BoundedStatus::Inconclusive => {
                    ("regular epi: inconclusive".to_string(), EXIT_INCONCLUSIVE)
                }
            };
            out.line(re_text);
            out.field("injective", json!(c.injective));
            out.field("surjective", json!(c.surjective));
            out.field("bound", json!(bound));
            Ok(mono_code.max(re_code))
        }
        MorphCmd::Compose { outer, inner } => {
            let g = load_morphism(&outer).map_err(|e| e.to_string())?;
            let f = load_morphism(&inner).map_err(|e| e.to_string())?;
            let c = compose(&g, &f).map_err(|e| e.to_string())?;
            out.line(format!("{c}"));
            out.field("map", json!(c.to_string()));
            Ok(EXIT_OK)
        }
    }
}

fn run_cat(cmd: CatCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        CatCmd::Coeq { g, h, class, out: out_path } => {
            let g = load_morphism(&g).map_err(|e| e.to_string())?;
            let h = load_morphism(&h).map_err(|e| e.to_string())?;
            let class = parse_class(&class)?;
            let (q_frame, q) = coequalizer(&g, &h, &class).map_err(|e| e.to_string())?;
            let text = q_frame.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("quotient frame:\n{}", text.trim_end()));
            out.line(format!("quotient {q}"));
            out.field("quotient", fileio::frame_to_json(&q_frame));
            Ok(EXIT_OK)
        }
        CatCmd::Cokpair { f, out: out_path } => {
            let f = load_morphism(&f).map_err(|e| e.to_string())?;
            let ck = cokernel_pair(&f);
            let text = ck.frame.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("cokernel frame:\n{}", text.trim_end()));
            out.line(format!("iota0 {}", ck.iota0));
            out.line(format!("iota1 {}", ck.iota1));
            out.field("frame", fileio::frame_to_json(&ck.frame));
            Ok(EXIT_OK)
        }
        CatCmd::Equalize { g, h, out: out_path } => {
            let g = load_morphism(&g).map_err(|e| e.to_string())?;
            let h = load_morphism(&h).map_err(|e| e.to_string())?;
            let (e_frame, incl) = equalizer(&g, &h).map_err(|e| e.to_string())?;
            let text = e_frame.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("equalizer frame:\n{}", text.trim_end()));
            out.line(format!("inclusion {incl}"));
            out.field("frame", fileio::frame_to_json(&e_frame));
            Ok(EXIT_OK)
        }
        CatCmd::Factor { f } => {
            let f = load_morphism(&f).map_err(|e| e.to_string())?;
            let (e, m) = coregular_factorization(&f);
            out.line(format!("epi {e}"));
            out.line(format!("regular mono {m}"));
            out.field("image", fileio::frame_to_json(e.target()));
            Ok(EXIT_OK)
        }
        CatCmd::PullbackRegmono { f, m, out: out_path } => {
            let f = load_morphism(&f).map_err(|e| e.to_string())?;
            let m = load_morphism(&m).map_err(|e| e.to_string())?;
            let (pb, incl, proj) = pullback_along_regmono(&f, &m).map_err(|e| e.to_string())?;
            let text = pb.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("pullback frame:\n{}", text.trim_end()));
            out.line(format!("inclusion {incl}"));
            out.line(format!("projection {proj}"));
            out.field("frame", fileio::frame_to_json(&pb));
            Ok(EXIT_OK)
        }
        CatCmd::Setpb { f0, f1, class, out: out_path } => {
            let f0 = load_morphism(&f0).map_err(|e| e.to_string())?;
            let f1 = load_morphism(&f1).map_err(|e| e.to_string())?;
            let class = parse_class(&class)?;
            let sp = set_pullback(&f0, &f1, &class).map_err(|e| e.to_string())?;
            let text = sp.frame.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("candidate frame:\n{}", text.trim_end()));
            out.line(format!("proj0 {}", sp.proj0));
            out.line(format!("proj1 {}", sp.proj1));
            let code = match &sp.in_class {
                Ok(()) => {
                    out.line("candidate is in the class".to_string());
                    EXIT_OK
                }
                Err(v) => {
                    out.line(format!("candidate is outside the class: {v}"));
                    EXIT_FAIL
                }
            };
            out.field("frame", fileio::frame_to_json(&sp.frame));
            Ok(code)
        }
        CatCmd::WideCoeq { f, class, bound, out: out_path } => {
            let f = load_morphism(&f).map_err(|e| e.to_string())?;
            let class = parse_class(&class)?;
            let bound = effective_bound(bound);
            let (q_frame, q) = wide_coequalizer(&f, &class, bound).map_err(|e| e.to_string())?;
            let text = q_frame.to_string();
            maybe_write(&out_path, &text)?;
            out.line(format!("joint quotient at bound {bound}:\n{}", text.trim_end()));
            out.line(format!("quotient {q}"));
            out.field("quotient", fileio::frame_to_json(&q_frame));
            Ok(EXIT_OK)
        }
        CatCmd::Verify { shape, files, class, bound } => {
            let class = parse_class(&class)?;
            let bound = effective_bound(bound).min(4);
            let need = |n: usize| -> Result<(), String> {
                if files.len() == n {
                    Ok(())
                } else {
                    Err(format!("shape `{shape}` expects {n} morphism files"))
                }
            };
            let load = |i: usize| load_morphism(&files[i]).map_err(|e| e.to_string());
            let check = match shape.as_str() {
                "coeq" => {
                    need(3)?;
                    UniversalCheck::Coequalizer {
                        g: load(0)?,
                        h: load(1)?,
                        q: load(2)?,
                    }
                }
                "cokpair" => {
                    need(3)?;
                    UniversalCheck::CokernelPair {
                        f: load(0)?,
                        iota0: load(1)?,
                        iota1: load(2)?,
                    }
                }
                "pullback" => {
                    need(4)?;
                    UniversalCheck::Pullback {
                        f0: load(0)?,
                        f1: load(1)?,
                        proj0: load(2)?,
                        proj1: load(3)?,
                    }
                }
                "equalizer" => {
                    need(3)?;
                    UniversalCheck::Equalizer {
                        g: load(0)?,
                        h: load(1)?,
                        incl: load(2)?,
                    }
                }
                "product" => {
                    need(2)?;
                    UniversalCheck::Product {
                        proj0: load(0)?,
                        proj1: load(1)?,
                    }
                }
                other => return Err(format!("unknown shape `{other}`")),
            };
            match verify_universal_bounded(&check, &class, bound).map_err(|e| e.to_string())? {
                UniversalVerdict::VerifiedUpTo(b) => {
                    out.line(format!("verified against class frames up to {b} points"));
                    out.field("verdict", json!("holds"));
                    Ok(EXIT_OK)
                }
                UniversalVerdict::Refuted(r) => {
                    out.line(format!(
                        "refuted: {:?} from a {}-point test frame",
                        r.reason,
                        r.test_frame.size()
                    ));
                    out.line(r.test_frame.to_string().trim_end().to_string());
                    out.field("verdict", json!("fails"));
                    Ok(EXIT_FAIL)
                }
            }
        }
    }
}

fn run_formula(cmd: FormulaCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        FormulaCmd::Nf { file } => {
            let f = load_formula(&file).map_err(|e| e.to_string())?;
            let nf = normal_form(&f).map_err(|e| e.to_string())?;
            out.line(format!("{} member sets", nf.family.len()));
            for set in &nf.family {
                let rendered = set
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.line(format!("  {{{rendered}}}"));
            }
            out.line(format!("reassembled: {}", nf.reassemble()));
            out.field("reassembled", json!(nf.reassemble().to_string()));
            Ok(EXIT_OK)
        }
    }
}

fn run_proof(cmd: ProofCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        ProofCmd::Check { file, logic, theory } => {
            let proof = load_proof(&file).map_err(|e| e.to_string())?;
            let vars = proof.conclusion.variables();
            let params = calculus_params(&logic, theory.as_deref(), &vars)?;
            match check_proof(&proof, &params) {
                CheckOutcome::Accepted { rank } => {
                    out.line(format!("accepted with rank {rank}"));
                    out.field("verdict", json!("accepted"));
                    out.field("rank", json!(rank));
                    Ok(EXIT_OK)
                }
                CheckOutcome::Rejected(rej) => {
                    out.line(format!("{rej}"));
                    out.field("verdict", json!("rejected"));
                    out.field("path", json!(rej.path));
                    out.field("reason", json!(rej.reason));
                    Ok(EXIT_FAIL)
                }
            }
        }
        ProofCmd::DeriveEq { variant, params, out: out_path } => {
            let variant = EquivalenceVariant::parse(&variant)
                .ok_or_else(|| format!("unknown variant `{variant}`"))?;
            let src = fileio::read_file(&params).map_err(|e| e.to_string())?;
            let expr = crate::calculus::sexpr::read_sexpr(&src).map_err(|e| e.to_string())?;
            let eq_params = parse_equivalence_params(&expr)?;
            let eq = derive_equivalence(variant, &eq_params).map_err(|e| e.to_string())?;
            out.line(format!("lhs: {}", eq.lhs));
            out.line(format!("rhs: {}", eq.rhs));
            out.line(format!(
                "forward rank {}, backward rank {}",
                eq.forward.rank(),
                eq.backward.rank()
            ));
            if let Some(dir) = out_path {
                write_file(&dir.join("forward.prf"), &fileio::proof_to_sexpr_text(&eq.forward))
                    .map_err(|e| e.to_string())?;
                write_file(&dir.join("backward.prf"), &fileio::proof_to_sexpr_text(&eq.backward))
                    .map_err(|e| e.to_string())?;
            }
            out.field("lhs", json!(eq.lhs.to_string()));
            out.field("rhs", json!(eq.rhs.to_string()));
            Ok(EXIT_OK)
        }
        ProofCmd::Deduce { file, logic, theory, out: out_path } => {
            let proof = load_proof(&file).map_err(|e| e.to_string())?;
            let vars = proof.conclusion.variables();
            let params = calculus_params(&logic, theory.as_deref(), &vars)?;
            match check_proof(&proof, &params) {
                CheckOutcome::Accepted { .. } => {}
                CheckOutcome::Rejected(rej) => {
                    out.line(format!("input proof rejected: {rej}"));
                    out.field("verdict", json!("rejected"));
                    return Ok(EXIT_FAIL);
                }
            }
            let discharged = deduction_transform(&proof, &params).map_err(|e| e.to_string())?;
            out.line(format!(
                "boxed theory context: {}",
                discharged
                    .boxed_theory
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            let text = fileio::proof_to_sexpr_text(&discharged.proof);
            maybe_write(&out_path, &text)?;
            out.field(
                "boxed_theory",
                json!(discharged
                    .boxed_theory
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()),
            );
            Ok(EXIT_OK)
        }
    }
}

fn parse_equivalence_params(expr: &crate::calculus::Sexpr) -> Result<EquivalenceParams, String> {
    use crate::calculus::sexpr::{formula_from_sexpr, Sexpr};
    let items = match expr {
        Sexpr::List(items) => items,
        _ => return Err("parameters must be a list".into()),
    };
    let (head, rest) = match items.split_first() {
        Some((Sexpr::Atom(h), rest)) => (h.as_str(), rest),
        _ => return Err("parameters must be a named list".into()),
    };
    let parse_set = |exprs: &[Sexpr]| -> Result<BTreeSet<crate::calculus::Formula>, String> {
        exprs
            .iter()
            .map(|f| formula_from_sexpr(f).map_err(|e| e.to_string()))
            .collect()
    };
    let parse_sets = |exprs: &[Sexpr]| -> Result<Vec<BTreeSet<crate::calculus::Formula>>, String> {
        exprs
            .iter()
            .map(|s| match s {
                Sexpr::List(sub) => match sub.split_first() {
                    Some((Sexpr::Atom(h), inner)) if h == "set" => parse_set(inner),
                    _ => Err("expected `(set ...)`".into()),
                },
                _ => Err("expected `(set ...)`".into()),
            })
            .collect()
    };
    match head {
        "set" => Ok(EquivalenceParams::Set(parse_set(rest)?)),
        "family" => Ok(EquivalenceParams::Family(
            parse_sets(rest)?.into_iter().collect(),
        )),
        "ifamily" => {
            let mut prefix = Vec::new();
            let mut tail = BTreeSet::new();
            for part in rest {
                let sub = match part {
                    Sexpr::List(sub) => sub,
                    _ => return Err("expected `(prefix ...)` or `(tail ...)`".into()),
                };
                match sub.split_first() {
                    Some((Sexpr::Atom(h), inner)) if h == "prefix" => {
                        prefix = parse_sets(inner)?;
                    }
                    Some((Sexpr::Atom(h), inner)) if h == "tail" => {
                        tail = parse_set(inner)?;
                    }
                    _ => return Err("expected `(prefix ...)` or `(tail ...)`".into()),
                }
            }
            Ok(EquivalenceParams::IndexedFamily(FormulaFamily {
                prefix,
                tail,
            }))
        }
        other => Err(format!("unknown parameter kind `{other}`")),
    }
}

fn run_semantics(cmd: SemanticsCmd, out: &mut Output) -> Result<i32, String> {
    match cmd {
        SemanticsCmd::Refute {
            sequent,
            logic,
            theory,
            catalog,
            depth,
        } => {
            let sequent = load_sequent(&sequent).map_err(|e| e.to_string())?;
            let params = calculus_params(&logic, theory.as_deref(), &sequent.variables())?;
            let frames = catalog
                .iter()
                .map(|f| load_frame(f).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            match countermodel_search(&sequent, &params, &frames, depth, 4_000_000)
                .map_err(|e| e.to_string())?
            {
                RefutationOutcome::ValidOnCatalog => {
                    out.line("valid on the catalog".to_string());
                    out.field("verdict", json!("holds"));
                    Ok(EXIT_OK)
                }
                RefutationOutcome::Countermodel(cm) => {
                    out.line(format!(
                        "countermodel on catalog frame {} at point {}",
                        cm.frame_index, cm.witness_point
                    ));
                    for (name, mask) in cm.valuation.assignment() {
                        out.line(format!("  {name} = {mask:#b}"));
                    }
                    out.field("verdict", json!("fails"));
                    out.field("frame_index", json!(cm.frame_index));
                    out.field("witness_point", json!(cm.witness_point));
                    Ok(EXIT_FAIL)
                }
            }
        }
    }
}

fn run_amalg(
    f0: &Path,
    f1: &Path,
    class: &str,
    bound: Option<usize>,
    covering: bool,
    out: &mut Output,
) -> Result<i32, String> {
    let f0 = load_morphism(f0).map_err(|e| e.to_string())?;
    let f1 = load_morphism(f1).map_err(|e| e.to_string())?;
    let class = parse_class(class)?;
    let bound = effective_bound(bound).min(4);
    let cospan = Cospan::new(f0, f1, class).map_err(|e| e.to_string())?;
    let outcome = if covering {
        superamalgamate(&cospan, bound)
    } else {
        amalgamate(&cospan, bound)
    }
    .map_err(|e| e.to_string())?;
    let name = if covering { "superamalgamation" } else { "amalgamation" };
    let report = amalgam_report(name, &outcome, bound);
    out.line(report.to_string());
    for (file, contents) in &report.witness_files {
        out.line(format!("--- {file}\n{}", contents.trim_end()));
    }
    out.field("report", serde_json::to_value(&report).unwrap());
    Ok(report.verdict.exit_code())
}

fn run_props(cmd: PropsCmd, seed: u64, out: &mut Output) -> Result<i32, String> {
    match cmd {
        PropsCmd::Amalg { f0, f1, class, bound } => {
            run_amalg(&f0, &f1, &class, bound, false, out)
        }
        PropsCmd::Superamalg { f0, f1, class, bound } => {
            run_amalg(&f0, &f1, &class, bound, true, out)
        }
        PropsCmd::Beth {
            weak,
            strong,
            class,
            catalog,
            bound,
        } => {
            if weak == strong {
                return Err("pass exactly one of --weak or --strong".into());
            }
            let strength = if weak { BethStrength::Weak } else { BethStrength::Strong };
            let class = parse_class(&class)?;
            let bound = effective_bound(bound);
            let frames = catalog
                .iter()
                .map(|f| load_frame(f).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let outcome =
                beth_probe(&class, &frames, bound, strength).map_err(|e| e.to_string())?;
            let report = beth_report(&outcome, strength, bound);
            out.line(report.to_string());
            for (file, contents) in &report.witness_files {
                out.line(format!("--- {file}\n{}", contents.trim_end()));
            }
            out.field("report", serde_json::to_value(&report).unwrap());
            Ok(report.verdict.exit_code())
        }
        PropsCmd::Sv {
            rho,
            tau,
            vars,
            catalog,
            depth,
        } => {
            let rho = load_formula(&rho).map_err(|e| e.to_string())?;
            let tau = load_formula(&tau).map_err(|e| e.to_string())?;
            let base: BTreeSet<String> = vars
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().to_string())
                .collect();
            let frames = catalog
                .iter()
                .map(|f| load_frame(f).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let outcome =
                separates_variables_check(&rho, &tau, &base, &frames, depth, 4_000_000)
                    .map_err(|e| e.to_string())?;
            match outcome {
                SeparationOutcome::Holds(family) => {
                    out.line("separates variables with the family:".to_string());
                    for (x, f) in &family {
                        out.line(format!("  {x}: {f}"));
                    }
                    out.field(
                        "family",
                        json!(family
                            .iter()
                            .map(|(x, f)| json!({ "var": x, "formula": f.to_string() }))
                            .collect::<Vec<_>>()),
                    );
                    out.field("verdict", json!("holds"));
                    Ok(EXIT_OK)
                }
                SeparationOutcome::ConditionFails {
                    condition,
                    frame,
                    valuation,
                } => {
                    out.line(format!(
                        "coequivalence condition {condition} fails on a {}-point frame",
                        frame.size()
                    ));
                    for (name, mask) in valuation.assignment() {
                        out.line(format!("  {name} = {mask:#b}"));
                    }
                    out.field("verdict", json!("fails"));
                    out.field("condition", json!(condition));
                    Ok(EXIT_FAIL)
                }
                SeparationOutcome::CandidatesExhausted => {
                    out.line(format!(
                        "no defining family of depth at most {depth} found"
                    ));
                    out.field("verdict", json!("inconclusive"));
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        PropsCmd::FunctionalLimits { samples, bound } => {
            use rand::{rngs::StdRng, Rng, SeedableRng};
            let bound = effective_bound(bound).min(5);
            let mut rng = StdRng::seed_from_u64(seed);
            let pairs: Vec<(Frame, Frame)> = (0..samples)
                .map(|_| {
                    let gen = |rng: &mut StdRng| {
                        let n = rng.gen_range(1..=3usize);
                        let succ: Vec<PointId> =
                            (0..n).map(|_| rng.gen_range(0..n) as PointId).collect();
                        Frame::new(
                            0..n as PointId,
                            succ.iter().enumerate().map(|(i, &j)| (i as PointId, j)),
                        )
                        .unwrap()
                    };
                    (gen(&mut rng), gen(&mut rng))
                })
                .collect();
            match crate::props::functional_limits_check(&pairs, bound)
                .map_err(|e| e.to_string())?
            {
                crate::props::FunctionalLimitsOutcome::Verified {
                    products,
                    equalizers,
                } => {
                    out.line(format!(
                        "{products} products and {equalizers} equalizers verified at bound {bound}"
                    ));
                    out.field("verdict", json!("holds"));
                    Ok(EXIT_OK)
                }
                crate::props::FunctionalLimitsOutcome::Refuted(msg) => {
                    out.line(format!("refuted: {msg}"));
                    out.field("verdict", json!("fails"));
                    Ok(EXIT_FAIL)
                }
            }
        }
        PropsCmd::ReproducePaper { out: out_dir, bound } => {
            let bound = effective_bound(bound);
            let reports = reproduction::reproduce(bound, seed);
            let mut summary = Vec::new();
            for report in &reports {
                let status = match &report.outcome {
                    reproduction::FixtureOutcome::Match => "ok",
                    reproduction::FixtureOutcome::Deviation(_) => "DEVIATION",
                    reproduction::FixtureOutcome::Inconclusive(_) => "inconclusive",
                };
                out.line(format!("{status:<12} {} ... {}", report.name, report.detail));
                summary.push(json!({
                    "name": report.name,
                    "status": status,
                    "detail": report.detail,
                }));
                for (name, contents) in &report.witness_files {
                    let path = out_dir.join(report.name).join(name);
                    write_file(&path, contents).map_err(|e| e.to_string())?;
                }
            }
            let summary_value =
                serde_json::to_string_pretty(&json!({ "fixtures": summary })).unwrap() + "\n";
            write_file(&out_dir.join("summary.json"), &summary_value)
                .map_err(|e| e.to_string())?;
            out.field("fixtures", json!(summary));
            Ok(reproduction::suite_exit_code(&reports))
        }
    }
}

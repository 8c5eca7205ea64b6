use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use serde_json::{json, Value};

use omegacat::coll::Collection;
use omegacat::globpro::{check_theory_algebra, globpro_validate, GlobularPro, Globularized, NCollGraph, StrictAlgebra};
use omegacat::globset::{GlobularSet, Globe};
use omegacat::grdops::{operad_validate, GradedSet, TableOperad};
use omegacat::pasting::TreeCell;
use omegacat::pros::{Pro, ProPresentation, TheoryPro};
use omegacat::strict::StrictCat;
use omegacat::weaken::{WeakBounds, WeakTheory};

/// Samples per law in bounded validation reports.
const VALIDATE_CAP: usize = 60;
/// Sampled diagrams per hom combination when checking algebras.
const ALGEBRA_CAP: usize = 40;

#[derive(Parser)]
#[command(name = "omegacat", version, about = "Globular PROs, strict algebras and weakened theories")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, global = true, default_value_t = 1)]
    max_dim: usize,
    #[arg(long, global = true, default_value_t = 2)]
    max_tree_nodes: usize,
    /// Expression size bound; presented theories also enumerate homs over
    /// words of at most this many layers.
    #[arg(long, global = true, default_value_t = 4)]
    max_expr_size: usize,
    /// `N` or `N,M`: cells have at most N inputs and M outputs.
    #[arg(long, global = true, default_value = "3,2", value_parser = hom_bound)]
    hom_bound: (usize, usize),
    /// Rewriting fuel for presented theories.
    #[arg(long, global = true, default_value_t = 10_000)]
    fuel: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a theory, globular set, collection, graded set, operad,
    /// strict category, strict algebra or collection graph.
    Validate { path: PathBuf },
    /// Describe the globularization of a theory and validate it.
    Globularize { theory: PathBuf },
    /// List the cells of one hom of the globularization.
    Hom {
        theory: PathBuf,
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        dim: usize,
    },
    /// Generate the weak theory with contraction.
    Weaken {
        theory: PathBuf,
        /// Shuffle the work order with this seed. The output is unchanged.
        #[arg(long)]
        shuffle: Option<u64>,
    },
    /// Check a strict ω-category with generator tables against a theory.
    CheckAlgebra { theory: PathBuf, algebra: PathBuf },
    /// Graphviz output for a theory's weak theory or a globular structure.
    ExportDot { path: PathBuf },
}

/// What a command produced: the document to emit and whether the checked
/// property held.
struct Outcome {
    body: String,
    ok: bool,
    witness: Option<String>,
}

impl Outcome {
    fn pass(body: String) -> Self {
        Outcome { body, ok: true, witness: None }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))
}

fn hom_bound(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<usize>().with_context(|| format!("bad --hom-bound `{s}`"));
    match parts.as_slice() {
        [n] => Ok((num(n)?, num(n)?)),
        [n, m] => Ok((num(n)?, num(m)?)),
        _ => bail!("bad --hom-bound `{s}`: expected N or N,M"),
    }
}

fn load_theory(path: &Path, fuel: usize) -> Result<TheoryPro> {
    let v = read_json(path)?;
    let pres = ProPresentation::from_json(&v).with_context(|| format!("{}: not a theory", path.display()))?;
    TheoryPro::new(pres, fuel).with_context(|| format!("{}: theory does not compile", path.display()))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn violations(list: impl IntoIterator<Item = (String, String)>) -> Vec<Value> {
    list.into_iter().map(|(l, w)| json!({ "law": l, "witness": w })).collect()
}

fn report(kind: &str, viol: Vec<Value>, extra: Option<(&str, Value)>, format: Format) -> Outcome {
    let ok = viol.is_empty();
    let witness = viol.first().map(|v| v.to_string());
    let body = match format {
        Format::Text => {
            let mut s = format!("{kind}: {}\n", if ok { "ok" } else { "FAILED" });
            for v in &viol {
                s.push_str(&format!("  {} {}\n", v["law"].as_str().unwrap_or(""), v["witness"].as_str().unwrap_or("")));
            }
            s
        }
        _ => {
            let mut doc = json!({ "kind": kind, "ok": ok, "violations": viol });
            if let Some((k, v)) = extra {
                doc[k] = v;
            }
            render(&doc)
        }
    };
    Outcome { body, ok, witness }
}

fn detect(v: &Value) -> Option<&'static str> {
    const KINDS: [&str; 8] =
        ["theory", "algebra", "strict-category", "collection-graph", "operad", "graded-set", "collection", "globular-set"];
    if let Some(k) = v.get("kind").and_then(Value::as_str) {
        return KINDS.iter().find(|x| **x == k).copied();
    }
    let has = |k: &str| v.get(k).is_some();
    Some(if has("generators") {
        "theory"
    } else if has("category") && has("interp") {
        "algebra"
    } else if has("globset") {
        "strict-category"
    } else if has("homs") && has("maxObj") {
        "collection-graph"
    } else if has("elements") && has("compose") {
        "operad"
    } else if has("elements") {
        "graded-set"
    } else if has("cells") && has("arity") {
        "collection"
    } else if has("cells") {
        "globular-set"
    } else {
        return None;
    })
}

fn globularize(pro: TheoryPro, o: &Opts) -> Result<Globularized<TheoryPro>> {
    let (n, m) = o.hom_bound;
    Globularized::new(pro, n.max(m), o.max_dim, o.max_tree_nodes, o.max_expr_size).context("cannot enumerate the theory's homs")
}

fn cmd_validate(path: &Path, o: &Opts) -> Result<Outcome> {
    let v = read_json(path)?;
    let Some(kind) = detect(&v) else { bail!("{}: unrecognized document", path.display()) };
    info!("validating {} as {kind}", path.display());
    let ctx = || format!("{}: malformed {kind}", path.display());
    Ok(match kind {
        "theory" => {
            let pres = ProPresentation::from_json(&v).with_context(ctx)?;
            if let Err(e) = pres.compiled_rules() {
                return Ok(report(kind, violations([("rule-typing".to_string(), e.to_string())]), None, o.format));
            }
            let pro = match TheoryPro::new(pres, o.fuel) {
                Ok(p) => p,
                Err(e) => return Ok(report(kind, violations([("theory".to_string(), e.to_string())]), None, o.format)),
            };
            let gp = match globularize(pro, o) {
                Ok(g) => g,
                Err(e) => return Ok(report(kind, violations([("enumeration".to_string(), format!("{e:#}"))]), None, o.format)),
            };
            let rep = globpro_validate(&gp, VALIDATE_CAP);
            let viol = violations(rep.violations.iter().map(|x| (x.law.clone(), x.witness.clone())));
            report(kind, viol, Some(("checked", json!(rep.checked))), o.format)
        }
        "algebra" => {
            let a = StrictAlgebra::from_json(&v).with_context(ctx)?;
            report(kind, violations(a.cat.validate().into_iter().map(|x| (x.law, x.witness))), None, o.format)
        }
        "strict-category" => {
            let c = StrictCat::from_json(&v).with_context(ctx)?;
            report(kind, violations(c.validate().into_iter().map(|x| (x.law, x.witness))), None, o.format)
        }
        "collection-graph" => {
            let g = NCollGraph::from_json(&v).with_context(ctx)?;
            let viol = g.validate().into_iter().map(|((n, m), x)| (x.relation, format!("({n},{m}) {}", x.cell)));
            report(kind, violations(viol), None, o.format)
        }
        "operad" => {
            let op = TableOperad::from_json(&v).with_context(ctx)?;
            report(kind, violations(operad_validate(&op).into_iter().map(|x| (x.law, x.witness))), None, o.format)
        }
        "graded-set" => {
            let g = GradedSet::from_json(&v).with_context(ctx)?;
            report(kind, Vec::new(), Some(("size", json!(g.len()))), o.format)
        }
        "collection" => {
            let c = Collection::from_json(&v).with_context(ctx)?;
            report(kind, violations(c.validate().into_iter().map(|x| (x.relation, x.cell))), None, o.format)
        }
        _ => {
            let g = GlobularSet::from_json(&v).with_context(ctx)?;
            report(kind, violations(g.validate().into_iter().map(|x| (x.relation, x.cell))), None, o.format)
        }
    })
}

fn cmd_globularize(theory: &Path, o: &Opts) -> Result<Outcome> {
    let pro = load_theory(theory, o.fuel)?;
    let pres = pro.presentation().to_json();
    let gp = globularize(pro, o)?;
    let rep = globpro_validate(&gp, VALIDATE_CAP);
    let ok = rep.ok();
    let witness = rep.violations.first().map(|v| format!("{}: {}", v.law, v.witness));
    let body = match o.format {
        Format::Text => {
            let mut s = String::new();
            for (n, m) in hom_pairs(gp.max_obj) {
                let counts: Vec<String> = (0..=gp.max_dim).map(|d| gp.cells(n, m, d).len().to_string()).collect();
                s.push_str(&format!("{n},{m}: {}\n", counts.join(" ")));
            }
            s.push_str(&format!("validation: {}\n", if ok { "ok" } else { "FAILED" }));
            s
        }
        _ => render(&json!({ "theory": pres, "engine": gp.to_json(), "validation": rep.to_json() })),
    };
    Ok(Outcome { body, ok, witness })
}

fn hom_pairs(max_obj: usize) -> Vec<(usize, usize)> {
    (0..=max_obj).flat_map(|n| (0..=max_obj).map(move |m| (n, m))).collect()
}

fn cmd_hom(theory: &Path, n: usize, m: usize, dim: usize, o: &Opts) -> Result<Outcome> {
    if dim > o.max_dim {
        bail!("--dim {dim} exceeds --max-dim {}", o.max_dim);
    }
    let (bn, bm) = o.hom_bound;
    if n > bn.max(bm) || m > bn.max(bm) {
        bail!("hom ({n},{m}) is outside --hom-bound {bn},{bm}");
    }
    let gp = globularize(load_theory(theory, o.fuel)?, o)?;
    let mut cells = gp.cells(n, m, dim);
    cells.sort_by_key(|c| (c.shape.clone(), gp.pro.describe(&c.phi)));
    let body = match o.format {
        Format::Text => cells.iter().map(|c| format!("{}\t{}\n", gp.pro.describe(&c.phi), c.shape.tree)).collect(),
        _ => {
            let list: Vec<Value> =
                cells.iter().map(|c| json!({ "p": gp.pro.describe(&c.phi), "tree": c.shape.tree.to_string() })).collect();
            render(&json!({ "homType": [n, m], "dim": dim, "maxTreeNodes": o.max_tree_nodes, "cells": list }))
        }
    };
    Ok(Outcome::pass(body))
}

fn weak_bounds(o: &Opts) -> Result<WeakBounds> {
    let (hom_in, hom_out) = o.hom_bound;
    Ok(WeakBounds { max_dim: o.max_dim, max_tree_nodes: o.max_tree_nodes, max_expr_size: o.max_expr_size, hom_in, hom_out })
}

fn run_weaken(theory: &Path, shuffle: Option<u64>, o: &Opts) -> Result<(WeakTheory<TheoryPro>, Vec<String>)> {
    let pro = load_theory(theory, o.fuel)?;
    let mut w = WeakTheory::new(pro, weak_bounds(o)?).context("cannot set up the weak theory")?;
    if let Some(s) = shuffle {
        w = w.with_shuffle(s);
    }
    w.generate();
    info!("generated {} cells", w.cells().len());
    let problems = w.verify();
    debug!("{} verification problems", problems.len());
    Ok((w, problems))
}

fn cmd_weaken(theory: &Path, shuffle: Option<u64>, o: &Opts) -> Result<Outcome> {
    let (w, problems) = run_weaken(theory, shuffle, o)?;
    let body = match o.format {
        Format::Dot => w.to_dot(),
        Format::Text => {
            let mut s = String::new();
            for ((n, m, d), c) in w.counts() {
                s.push_str(&format!("{n},{m},{d}\t{c}\n"));
            }
            s
        }
        Format::Json => render(&w.to_json()),
    };
    Ok(Outcome { body, ok: problems.is_empty(), witness: problems.first().cloned() })
}

fn cmd_check_algebra(theory: &Path, algebra: &Path, o: &Opts) -> Result<Outcome> {
    let gp = globularize(load_theory(theory, o.fuel)?, o)?;
    let v = read_json(algebra)?;
    let alg = StrictAlgebra::from_json(&v).with_context(|| format!("{}: malformed algebra", algebra.display()))?;
    let rep = check_theory_algebra(&gp, &alg, o.fuel, ALGEBRA_CAP);
    let ok = rep.ok();
    let doc = rep.to_json();
    let witness = ["category", "functor", "proAlgebra", "diagrams", "roundTrip"]
        .iter()
        .find_map(|k| doc[*k].as_array().and_then(|a| a.first()).map(|v| format!("{k}: {v}")));
    let body = match o.format {
        Format::Text => format!("algebra: {} ({} checks)\n", if ok { "ok" } else { "FAILED" }, rep.checked),
        _ => render(&doc),
    };
    Ok(Outcome { body, ok, witness })
}

fn glob_dot(g: &GlobularSet, arity: Option<&dyn Fn(&omegacat::globset::CellRef) -> TreeCell>) -> String {
    let mut s = String::from("digraph globset {\n  rankdir=LR;\n");
    for c in g.all_cells().filter(|c| c.dim <= 2) {
        let shape = ["ellipse", "box", "diamond"][c.dim];
        let mut label = g.name(c).to_string();
        if let Some(a) = arity {
            label.push_str(&format!(" : {}", a(&c).tree));
        }
        s.push_str(&format!("  \"{}\" [shape={shape}, label=\"{}\"];\n", g.name(c), label.replace('"', "\\\"")));
        if let (Some(a), Some(b)) = (g.source(&c), g.target(&c)) {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n  \"{}\" -> \"{}\";\n", g.name(a), g.name(c), g.name(c), g.name(b)));
        }
    }
    s.push_str("}\n");
    s
}

fn cmd_export_dot(path: &Path, o: &Opts) -> Result<Outcome> {
    let v = read_json(path)?;
    match detect(&v) {
        Some("theory") => {
            let (w, problems) = run_weaken(path, None, o)?;
            Ok(Outcome { body: w.to_dot(), ok: problems.is_empty(), witness: problems.first().cloned() })
        }
        Some("globular-set") => Ok(Outcome::pass(glob_dot(&GlobularSet::from_json(&v)?, None))),
        Some("collection") => {
            let c = Collection::from_json(&v)?;
            let ar = |x: &omegacat::globset::CellRef| c.arity_of(*x).clone();
            Ok(Outcome::pass(glob_dot(&c.glob, Some(&ar))))
        }
        Some("strict-category") => Ok(Outcome::pass(glob_dot(&StrictCat::from_json(&v)?.glob, None))),
        Some("algebra") => Ok(Outcome::pass(glob_dot(&StrictAlgebra::from_json(&v)?.cat.glob, None))),
        _ => bail!("{}: no DOT rendering for this document", path.display()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("OMEGACAT_LOG")).format_timestamp(None).init();
    let cli = Cli::parse();
    let o = &cli.opts;
    let res = match &cli.cmd {
        Cmd::Validate { path } => cmd_validate(path, o),
        Cmd::Globularize { theory } => cmd_globularize(theory, o),
        Cmd::Hom { theory, n, m, dim } => cmd_hom(theory, *n, *m, *dim, o),
        Cmd::Weaken { theory, shuffle } => cmd_weaken(theory, *shuffle, o),
        Cmd::CheckAlgebra { theory, algebra } => cmd_check_algebra(theory, algebra, o),
        Cmd::ExportDot { path } => cmd_export_dot(path, o),
    };
    let out = match res {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &o.out {
        Some(p) => fs::write(p, &out.body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{}", out.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {}", out.witness.unwrap_or_else(|| "see report".into()));
        ExitCode::from(1)
    }
}

//! Acceptance suite. Prints one line per criterion and fails if any does.
//! Every comparison below is exact; there are no numeric tolerances.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use omegacat::coll::{
    check_coll_associator, check_coll_pentagon, check_coll_unitors, curry_coll_map, enumerate_coll_maps,
    Collection, InternalHom, Square,
};
use omegacat::globpro::{check_theory_algebra, globpro_validate, GCell, GTaut, Globularized, StrictAction, StrictAlgebra};
use omegacat::globset::{GlobMap, GlobularSet, Point};
use omegacat::grdops::{
    check_associator, check_pentagon, check_triangle, check_unitors, curry, enumerate_maps, hom_count, internal_hom, internal_hom_count,
    operad_validate, square, uncurry, Cardinal, GradedSet, TautOperad,
};
use omegacat::pasting::{enumerate_tree_cells, mu, mu_shape, mu_split, LabelIndex, Pd, PdGlobe, Side, TreeCell, TreeGlobe};
use omegacat::strict::Power;
use omegacat::pros::{parse_expr, MonoidModel, Pro, ProExpr, ProPresentation, PresentedPro, Signature, TheoryPro};
use omegacat::weaken::{check_contraction, free_contraction, is_leinster_fibration, WeakBounds, WeakTheory};
use serde_json::Value;

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load(rel: &str) -> Value {
    let p = fixtures().join(rel);
    let s = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    serde_json::from_str(&s).unwrap()
}

fn collection(name: &str) -> Collection {
    Collection::from_json(&load(&format!("collections/{name}.json"))).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 --------------------------------------------------------------------------

/// One 0-cell, two loops `u, v` and two 2-cells `a: u ⇒ v`, `b: v ⇒ u`.
fn two_generated() -> GlobularSet {
    let mut g = GlobularSet::new(2);
    g.add0("*").unwrap();
    g.add(1, "u", "*", "*").unwrap();
    g.add(1, "v", "*", "*").unwrap();
    g.add(2, "a", "u", "v").unwrap();
    g.add(2, "b", "v", "u").unwrap();
    g
}

fn lift_to(p: &Pd<omegacat::globset::CellRef>, dim: usize) -> Pd<omegacat::globset::CellRef> {
    let mut q = p.clone();
    while q.dim < dim {
        q = q.bump();
    }
    q
}

fn pasting_monad() -> Outcome {
    let shapes: Vec<TreeCell> = enumerate_tree_cells(3, 5);
    let mut units = 0;
    for c in &shapes {
        let p = c.to_pd();
        ensure(mu(&Pd::eta(&PdGlobe(Point), &p)).unwrap() == p, || format!("left unit fails at {c}"))?;
        ensure(mu(&p.map(|h| Pd::eta(&Point, h))).unwrap() == p, || format!("right unit fails at {c}"))?;
        units += 1;
    }

    // μ∘μT = μ∘Tμ on three-level substitutions whose flattening stays within
    // the tree bound.
    let idx = LabelIndex::new(&TreeGlobe, shapes.iter().cloned());
    let mut assoc = 0;
    for tau in &shapes {
        for outer in idx.labellings(tau) {
            let mid = mu_shape(&outer).unwrap();
            if mid.tree.node_count() > 5 {
                continue;
            }
            for inner in idx.labellings(&mid) {
                if mu_shape(&inner).unwrap().tree.node_count() > 5 {
                    continue;
                }
                let nested = mu_split(&outer, &inner).map_err(|e| e.to_string())?;
                let triple = nested.map(|p| p.map(TreeCell::to_pd));
                let a = mu(&mu(&triple).unwrap()).unwrap();
                let b = mu(&triple.map(|p| mu(p).unwrap())).unwrap();
                ensure(a == b, || format!("associativity fails over {tau}"))?;
                assoc += 1;
            }
        }
    }

    let x = two_generated();
    let xi = LabelIndex::new(&x, x.all_cells());
    let mut diagrams = Vec::new();
    for c in enumerate_tree_cells(2, 4) {
        if c.dim >= 1 {
            diagrams.extend(xi.labellings(&c));
        }
    }
    let mut unit_ex = 0;
    for p in &diagrams {
        p.validate(&x).map_err(|e| e.to_string())?;
        ensure(mu(&Pd::eta(&PdGlobe(x.clone()), p)).unwrap() == *p, || "left unit fails over X".into())?;
        ensure(mu(&p.map(|c| Pd::eta(&x, c))).unwrap() == *p, || "right unit fails over X".into())?;
        for k in 0..p.dim {
            let s = lift_to(&p.boundary_to(Side::Source, k).unwrap(), p.dim);
            let t = lift_to(&p.boundary_to(Side::Target, k).unwrap(), p.dim);
            ensure(Pd::compose(&s, p, k).ok().as_ref() == Some(p), || format!("left identity fails along {k}"))?;
            ensure(Pd::compose(p, &t, k).ok().as_ref() == Some(p), || format!("right identity fails along {k}"))?;
            unit_ex += 2;
        }
    }

    let mut assoc_ex = 0;
    let mut pairs1 = Vec::new();
    for k in 0..2 {
        for a in &diagrams {
            for b in &diagrams {
                let Ok(ab) = Pd::compose(a, b, k) else { continue };
                ab.validate(&x).map_err(|e| e.to_string())?;
                if k == 1 {
                    pairs1.push((a, b, ab.clone()));
                }
                for c in &diagrams {
                    let Ok(bc) = Pd::compose(b, c, k) else { continue };
                    let l = Pd::compose(&ab, c, k).map_err(|e| e.to_string())?;
                    let r = Pd::compose(a, &bc, k).map_err(|e| e.to_string())?;
                    ensure(l == r, || format!("associativity of composition along {k} fails"))?;
                    assoc_ex += 1;
                }
            }
        }
    }

    let mut inter = 0;
    for (a, b, ab) in &pairs1 {
        for (c, d, cd) in &pairs1 {
            let (Ok(ac), Ok(bd)) = (Pd::compose(a, c, 0), Pd::compose(b, d, 0)) else { continue };
            let l = Pd::compose(ab, cd, 0).map_err(|e| e.to_string())?;
            let r = Pd::compose(&ac, &bd, 1).map_err(|e| e.to_string())?;
            ensure(l == r, || "interchange fails".into())?;
            inter += 1;
        }
    }
    Ok(format!(
        "{} trees; unit laws {units}, associativity {assoc}; over X: {} diagrams, identities {unit_ex}, associativity {assoc_ex}, interchange {inter}",
        shapes.len(),
        diagrams.len()
    ))
}

// 2 --------------------------------------------------------------------------

/// Graded sets up to isomorphism: multisets of arities.
fn graded_family(max_elems: usize, max_arity: usize) -> Vec<GradedSet<String>> {
    fn go(left: usize, from: usize, max_arity: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for a in from..=max_arity {
            cur.push(a);
            go(left - 1, a, max_arity, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max_elems, 0, max_arity, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|ar| GradedSet::from_pairs(ar.iter().enumerate().map(|(i, a)| (format!("x{i}"), *a))))
        .collect()
}

fn monoidal() -> Outcome {
    let fam = graded_family(3, 2);
    let mut n_assoc = 0;
    for x in &fam {
        let (l, r) = check_unitors(x);
        ensure(l.ok() && r.ok(), || format!("unitor fails on {x:?}"))?;
        for y in &fam {
            ensure(check_triangle(x, y), || "triangle fails".into())?;
            for z in &fam {
                ensure(check_associator(x, y, z).ok(), || format!("associator fails on {x:?} {y:?} {z:?}"))?;
                n_assoc += 1;
            }
        }
    }
    let small = graded_family(2, 2);
    let mut n_pent = 0;
    for w in &small {
        for x in &small {
            for y in &small {
                for z in &small {
                    ensure(check_pentagon(w, x, y, z), || "pentagon fails".into())?;
                    n_pent += 1;
                }
            }
        }
    }

    let colls = [collection("binary"), collection("arrow"), collection("endo")];
    let mut c_assoc = 0;
    let mut c_pent = 0;
    for a in &colls {
        let (l, r) = check_coll_unitors(a);
        ensure(l.ok() && r.ok(), || "collection unitor fails".into())?;
        for b in &colls {
            for c in &colls {
                ensure(check_coll_associator(a, b, c).ok(), || "collection associator fails".into())?;
                c_assoc += 1;
                for d in &colls {
                    c_pent += check_coll_pentagon(a, b, c, d)?;
                }
            }
        }
    }
    Ok(format!(
        "graded sets: {} objects, {n_assoc} associator triples, {n_pent} pentagon quadruples; collections: {c_assoc} associator triples, {c_pent} pentagon elements",
        fam.len()
    ))
}

// 3 --------------------------------------------------------------------------

fn adjunction() -> Outcome {
    let fam = graded_family(3, 3);
    let mut triples = 0;
    let mut bijections = 0;
    let mut enumerated = 0;
    let mut fibres: BTreeMap<(usize, usize, usize), Cardinal> = BTreeMap::new();
    for x in &fam {
        for (bi, b) in fam.iter().enumerate() {
            let max_n = x.max_arity();
            for (yi, y) in fam.iter().enumerate() {
                let left = hom_count(&square(x, b), y);
                let right: Cardinal = x
                    .iter()
                    .map(|(_, n)| {
                        fibres
                            .entry((bi, yi, n))
                            .or_insert_with(|| {
                                let c = internal_hom_count(b, y, n);
                                if c.to_u128().is_some_and(|v| v <= 5000) {
                                    enumerated += 1;
                                    Cardinal::from_u64(internal_hom(b, y, n).len() as u64)
                                } else {
                                    c
                                }
                            })
                            .clone()
                    })
                    .product();
                ensure(left == right, || format!("{left} ≠ {right} at X={x:?} B={b:?} Y={y:?}"))?;
                triples += 1;
                let sq = square(x, b);
                if let Some(maps) = enumerate_maps(&sq, y, 2000) {
                    let mut seen = BTreeSet::new();
                    for m in &maps {
                        let c = curry(x, m);
                        ensure(uncurry(&c) == *m, || "uncurry does not invert curry".into())?;
                        ensure(c.iter().all(|(e, s)| s.n == x.arity(e).unwrap() && s.n <= max_n), || "section arity".into())?;
                        seen.insert(c);
                    }
                    ensure(seen.len() == maps.len(), || "curry is not injective".into())?;
                    bijections += 1;
                }
            }
        }
    }

    let colls = [collection("binary"), collection("arrow"), collection("endo"), collection("parallel")];
    let mut coll_triples = 0;
    let mut coll_maps = 0;
    for x in &colls {
        for b in &colls {
            for y in &colls {
                let xb = Square::new(x, b);
                let hom = InternalHom::new(b, y, 4, 100_000);
                let (Some(left), Some(right)) =
                    (enumerate_coll_maps(&xb, y, 100_000), enumerate_coll_maps(x, &hom, 100_000))
                else {
                    return Err("collection hom-set over the enumeration limit".into());
                };
                ensure(left.len() == right.len(), || format!("collections: {} ≠ {}", left.len(), right.len()))?;
                let mut seen = BTreeSet::new();
                for f in &left {
                    let c = curry_coll_map(x, &hom, f).ok_or("curry undefined")?;
                    ensure(right.contains(&c), || "curried map is not a map into [B, Y]".into())?;
                    seen.insert(c);
                }
                ensure(seen.len() == left.len(), || "collection curry is not injective".into())?;
                coll_triples += 1;
                coll_maps += left.len();
            }
        }
    }
    Ok(format!(
        "{triples} graded triples equal ({enumerated} fibres enumerated), {bijections} with explicit bijection; {coll_triples} collection triples with {coll_maps} maps"
    ))
}

// 4 --------------------------------------------------------------------------

fn tautological() -> Outcome {
    let mut taut = 0;
    for x in graded_family(2, 2) {
        if x.is_empty() {
            continue;
        }
        let t = TautOperad::new(x.clone(), 2);
        let v = operad_validate(&t);
        ensure(v.is_empty(), || format!("taut({x:?}): {:?}", v[0]))?;
        taut += 1;
    }
    let mut gt = Vec::new();
    for name in ["arrow", "endo", "binary", "parallel"] {
        let a = collection(name);
        if a.glob.count(0) > 2 || a.glob.max_dim() != 1 {
            continue;
        }
        let g = GTaut::new(&a, 2, 3, 100_000).map_err(|e| e.to_string())?;
        let rep = globpro_validate(&g, 20);
        ensure(rep.ok(), || format!("GTaut({name}): {:?}", rep.violations.first()))?;
        gt.push(format!("{name} ({} checks)", rep.checked.values().sum::<usize>()));
    }
    Ok(format!("taut on {taut} graded sets; GTaut on {}", gt.join(", ")))
}

// 5 --------------------------------------------------------------------------

/// Well-typed monoid expressions of size at most `max`, with identities up
/// to width 3.
fn expressions(sig: &Signature, max: usize) -> Vec<(ProExpr, (usize, usize))> {
    let mut by_size: Vec<Vec<(ProExpr, (usize, usize))>> = vec![Vec::new(); max + 1];
    for g in sig.keys() {
        let e = ProExpr::gen(g);
        by_size[1].push((e, sig[g]));
    }
    for n in 0..=3 {
        by_size[1].push((ProExpr::Id(n), (n, n)));
    }
    for s in 3..=max {
        let mut next = Vec::new();
        for sa in 1..s - 1 {
            let sb = s - 1 - sa;
            for (a, ta) in &by_size[sa] {
                for (b, tb) in &by_size[sb] {
                    if tb.1 == ta.0 {
                        next.push((ProExpr::comp(a.clone(), b.clone()), (tb.0, ta.1)));
                    }
                    next.push((ProExpr::tensor(a.clone(), b.clone()), (ta.0 + tb.0, ta.1 + tb.1)));
                }
            }
        }
        by_size[s] = next;
    }
    by_size.into_iter().flatten().collect()
}

/// Direct semantics: a monoid expression as a map of ordinals.
fn denote(e: &ProExpr) -> (usize, Vec<usize>) {
    match e {
        ProExpr::Gen(g) if g == "m" => (1, vec![0, 0]),
        ProExpr::Gen(_) => (1, vec![]),
        ProExpr::Id(n) => (*n, (0..*n).collect()),
        ProExpr::Comp(g, f) => {
            let (_, fm) = denote(f);
            let (gc, gm) = denote(g);
            (gc, fm.iter().map(|&i| gm[i]).collect())
        }
        ProExpr::Tensor(a, b) => {
            let (ac, mut am) = denote(a);
            let (bc, bm) = denote(b);
            am.extend(bm.iter().map(|&i| i + ac));
            (ac + bc, am)
        }
    }
}

/// All maps `[n] → [m]` filtered by monotonicity.
fn brute_monotone(n: usize, m: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let total = m.pow(n as u32);
    for code in 0..total.max(if n == 0 { 1 } else { 0 }) {
        let mut f = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            f.push(c % m);
            c /= m;
        }
        if f.windows(2).all(|w| w[0] <= w[1]) {
            out.insert(f);
        }
    }
    out
}

fn pro_normal_form() -> Outcome {
    let sizes = (brute_monotone(2, 2).len(), brute_monotone(3, 1).len());
    ensure(sizes == (3, 1), || format!("brute-force |hom(2,2)|, |hom(3,1)| = {sizes:?}"))?;
    for n in 0..4 {
        for m in 0..4 {
            let model = MonoidModel.enumerate_hom(n, m, 0).map_err(|e| e.to_string())?;
            let got: BTreeSet<Vec<usize>> = model.iter().map(|f| f.map.clone()).collect();
            ensure(got == brute_monotone(n, m), || format!("model hom({n},{m}) differs from brute force"))?;
        }
    }

    let mut pres = ProPresentation::monoid();
    pres.model = None;
    let p = PresentedPro::new(pres.clone(), 10_000).map_err(|e| e.to_string())?;
    let exprs = expressions(&pres.generators, 6);
    let mut nf_classes: BTreeMap<(usize, usize), BTreeMap<String, BTreeSet<usize>>> = BTreeMap::new();
    let mut model_classes: BTreeMap<(usize, usize), BTreeMap<Vec<usize>, BTreeSet<usize>>> = BTreeMap::new();
    for (i, (e, ty)) in exprs.iter().enumerate() {
        let nf = p.normalize_expr(e).map_err(|x| x.to_string())?;
        ensure(nf.is_done(), || format!("fuel exhausted on {e}"))?;
        nf_classes.entry(*ty).or_default().entry(nf.form().to_string()).or_default().insert(i);
        let (cod, map) = denote(e);
        ensure(cod == ty.1 && brute_monotone(ty.0, ty.1).contains(&map), || format!("{e} is not monotone"))?;
        model_classes.entry(*ty).or_default().entry(map).or_default().insert(i);
    }
    let a: BTreeSet<BTreeSet<usize>> = nf_classes.values().flat_map(|c| c.values().cloned()).collect();
    let b: BTreeSet<BTreeSet<usize>> = model_classes.values().flat_map(|c| c.values().cloned()).collect();
    ensure(a == b, || {
        let bad = a.difference(&b).next().or_else(|| b.difference(&a).next()).unwrap();
        let ids: Vec<String> = bad.iter().take(4).map(|i| exprs[*i].0.to_string()).collect();
        format!("partitions differ near {ids:?}")
    })?;
    Ok(format!("{} expressions, {} classes; |hom(2,2)| = 3, |hom(3,1)| = 1", exprs.len(), a.len()))
}

// 6 --------------------------------------------------------------------------

fn strict_algebra() -> Outcome {
    let pro = TheoryPro::new(ProPresentation::monoid(), 10_000).map_err(|e| e.to_string())?;
    let gp = Globularized::new(pro, 3, 1, 3, 10_000).map_err(|e| e.to_string())?;
    let z2 = StrictAlgebra::from_json(&load("algebras/z2_xor.json")).map_err(|e| e.to_string())?;
    let arrows = z2.cat.glob.count(1);
    ensure(arrows <= 4, || format!("{arrows} arrows"))?;
    let rep = check_theory_algebra(&gp, &z2, 10_000, 40);
    ensure(rep.ok(), || rep.to_json().to_string())?;

    // Ω of the tables, restricted back to single generator cells, rebuilds
    // the tables; and the JSON form round-trips.
    let sig = gp.pro.presentation().generators.clone();
    let act = StrictAction { gp: &gp, alg: &z2, sig: &sig };
    let rebuilt = StrictAlgebra::from_fn(z2.cat.clone(), &sig, |g, d, x| {
        let c = GCell { phi: gp.pro.generator(g).unwrap(), shape: TreeCell::eta(d) };
        let kappa = Pd::eta(&Power { base: &z2.cat, n: x.len() }, &(d, x.to_vec()));
        act.omega(&c, &kappa).unwrap().1
    });
    ensure(rebuilt == z2, || "Ω followed by restriction differs from the tables".into())?;
    ensure(StrictAlgebra::from_json(&z2.to_json()).ok().as_ref() == Some(&z2), || "JSON round trip".into())?;

    let bad = StrictAlgebra::from_json(&load("algebras/z2_corrupted.json")).map_err(|e| e.to_string())?;
    let brep = check_theory_algebra(&gp, &bad, 10_000, 40);
    ensure(!brep.ok(), || "corrupted algebra was accepted".into())?;
    Ok(format!("{} checks; round trips hold; corrupted table rejected", rep.checked))
}

// 7 --------------------------------------------------------------------------

fn contraction_counts() -> Outcome {
    let mut out = Vec::new();
    for (name, want) in [("endo_loop", [1usize, 1]), ("arrow", [2, 1])] {
        let y = GlobularSet::from_json(&load(&format!("contraction/{name}.json"))).map_err(|e| e.to_string())?;
        let x = GlobularSet::new(0);
        let f = GlobMap { images: vec![Vec::new(); y.max_dim() + 1] };
        let (x2, f2, c) = free_contraction(&x, &y, &f, 1, &|_| true, &BTreeMap::new()).map_err(|e| e.to_string())?;
        let got = [x2.count(0), x2.count(1)];
        ensure(got == want, || format!("{name}: {got:?} ≠ {want:?}"))?;
        let v = check_contraction(&x2, &y, &f2, &c, 1);
        ensure(v.is_empty(), || format!("{name}: {:?}", v[0]))?;
        ensure(is_leinster_fibration(&x2, &y, &f2, 1).is_ok(), || format!("{name}: not a fibration"))?;
        ensure(f2.non_globular_cells(&x2, &y).is_empty(), || format!("{name}: map is not globular"))?;
        out.push(format!("{name} {got:?}"));
    }
    Ok(out.join(", "))
}

// 8 --------------------------------------------------------------------------

fn cli(args: &[&str], env: &[(&str, &str)]) -> (i32, Vec<u8>) {
    let mut c = Command::new(env!("CARGO_BIN_EXE_omegacat"));
    c.args(args).current_dir(fixtures()).env_remove("OMEGACAT_LOG");
    for (k, v) in env {
        c.env(k, v);
    }
    let o = c.output().expect("spawn omegacat");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn weakening() -> Outcome {
    let run = |seed: Option<u64>| {
        let p = TheoryPro::new(ProPresentation::monoid(), 10_000).unwrap();
        let mut w = WeakTheory::new(p, WeakBounds::default()).unwrap();
        if let Some(s) = seed {
            w = w.with_shuffle(s);
        }
        w.generate();
        w
    };
    let mut w = run(None);
    let v = w.verify();
    ensure(v.is_empty(), || format!("verification: {:?}", v.first()))?;
    fn cell(w: &mut WeakTheory<TheoryPro>, s: &str) -> Result<usize, String> {
        w.dim0_cell(&parse_expr(s).unwrap()).ok_or_else(|| format!("no cell for {s}"))
    }
    let l = cell(&mut w, "(comp m (tensor m (id 1)))")?;
    let r = cell(&mut w, "(comp m (tensor (id 1) m))")?;
    let assoc = w.mediators(l, r).len();
    ensure(assoc > 0, || "no associator".into())?;
    let u = cell(&mut w, "(comp m (tensor e (id 1)))")?;
    let id1 = w.gp.pro.id(1);
    let one = w.lift0_cell(&id1).ok_or("no identity cell")?;
    let unit = w.mediators(u, one).len();
    ensure(unit > 0, || "no unitor".into())?;

    let golden = load("golden/monoid_d1_counts.json");
    ensure(golden["bounds"] == WeakBounds::default().to_json(), || "golden file has other bounds".into())?;
    ensure(golden["counts"] == w.counts_json(), || "counts differ from the golden file".into())?;
    let shuffled = run(Some(7));
    ensure(shuffled.counts_json() == golden["counts"], || "shuffled counts differ from the golden file".into())?;
    ensure(run(None).to_json().to_string() == w.to_json().to_string(), || "library output differs".into())?;

    let (c1, a) = cli(&["weaken", "theories/monoid.json"], &[]);
    let (c2, b) = cli(&["weaken", "theories/monoid.json"], &[]);
    ensure(c1 == 0 && c2 == 0, || format!("exit codes {c1}, {c2}"))?;
    ensure(a == b, || "CLI output differs between runs".into())?;
    let doc: Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
    ensure(doc["counts"] == golden["counts"], || "CLI counts differ from the golden file".into())?;
    Ok(format!("{} cells; {assoc} associator and {unit} unitor mediators; golden counts match", w.cells().len()))
}

// 9 --------------------------------------------------------------------------

fn determinism() -> Outcome {
    let cmds: Vec<Vec<&str>> = vec![
        vec!["validate", "theories/monoid.json"],
        vec!["validate", "theories/broken_types.json"],
        vec!["validate", "theories/malformed.json"],
        vec!["validate", "collections/binary.json"],
        vec!["validate", "contraction/arrow.json"],
        vec!["validate", "algebras/z2_xor.json"],
        vec!["globularize", "theories/monoid.json"],
        vec!["hom", "theories/monoid.json", "2", "2", "--dim", "1"],
        vec!["hom", "theories/pointed.json", "1", "2", "--format", "text"],
        vec!["weaken", "theories/monoid.json", "--format", "text"],
        vec!["weaken", "theories/monoid.json", "--format", "dot"],
        vec!["weaken", "theories/monoid.json", "--shuffle", "3"],
        vec!["check-algebra", "theories/monoid.json", "algebras/z2_xor.json"],
        vec!["check-algebra", "theories/monoid.json", "algebras/z2_corrupted.json"],
        vec!["export-dot", "collections/arrow.json"],
        vec!["export-dot", "theories/pointed.json"],
    ];
    let base: Vec<(i32, Vec<u8>)> = cmds.iter().map(|c| cli(c, &[])).collect();
    for (c, (code, out)) in cmds.iter().zip(&base) {
        ensure(*code != -1 && (!out.is_empty() || *code == 2), || format!("{c:?}: no output"))?;
        for env in [&[][..], &[("OMEGACAT_LOG", "trace")][..]] {
            ensure(cli(c, env) == (*code, out.clone()), || format!("{c:?} not stable under {env:?}"))?;
        }
    }
    let par: Vec<(i32, Vec<u8>)> = std::thread::scope(|s| {
        let hs: Vec<_> = cmds.iter().map(|c| s.spawn(move || cli(c, &[("OMEGACAT_LOG", "debug")]))).collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    ensure(par == base, || "output differs when commands run concurrently".into())?;
    Ok(format!("{} commands, 3 sequential runs and 1 concurrent run each", cmds.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("pasting monad", pasting_monad),
        ("□-monoidal structure", monoidal),
        ("adjunction", adjunction),
        ("tautological structures", tautological),
        ("PRO normal form", pro_normal_form),
        ("strict algebra", strict_algebra),
        ("contraction counts", contraction_counts),
        ("weakening", weakening),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match &r {
            Ok(m) => println!("criterion {}: PASS {name} ({secs:.1}s): {m}", i + 1),
            Err(m) => {
                println!("criterion {}: FAIL {name} ({secs:.1}s): {m}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

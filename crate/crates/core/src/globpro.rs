//! Globular PROs: ℕ-indexed families of collections with a composition
//! `∘` and a tensor `+`, the ℕColl-graph constructions behind the free
//! ones, the globularization of a PRO, the tautological globular PRO of a
//! globular set, and strict algebras in strict ω-categories.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::rc::Rc;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::coll::{
    alpha, bounded_labellings, glob_operad_algebra_check, section_compose, CollEngine, CollError, CollSection,
    CollViolation, Collection, InternalHom, ProductColl, Square, Terminal,
};
use crate::globset::{CellRef, GlobularSet, Globe};
use crate::grdops::{words_over, Composite, OperadViolation};
use crate::pasting::{enumerate_trees, eval, mu_shape, word_arity, LabelIndex, OmegaOps, Pd, Side, TreeCell};
use crate::pros::{pro_algebra_check, Func, Pro, ProError, ProExpr, ProViolation, Signature, TheoryPro};
use crate::strict::{Power, StrictCat};

/// `(n, m)`: the hom of cells from `n` to `m`.
pub type HomType = (usize, usize);

fn hom_types(max_obj: usize) -> impl Iterator<Item = HomType> {
    (0..=max_obj).flat_map(move |n| (0..=max_obj).map(move |m| (n, m)))
}

fn viol(law: &str, witness: String) -> OperadViolation {
    OperadViolation { law: law.into(), witness }
}

fn hom_key(t: HomType) -> String {
    format!("{},{}", t.0, t.1)
}

fn parse_hom_key(s: &str) -> Option<HomType> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

// ---------------------------------------------------------------------------
// ℕColl-graphs

/// A collection `G(n, m)` for every pair of objects up to `max_obj`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCollGraph {
    pub max_obj: usize,
    pub max_dim: usize,
    pub homs: BTreeMap<HomType, Collection>,
}

impl NCollGraph {
    pub fn empty(max_obj: usize, max_dim: usize) -> Self {
        let homs = hom_types(max_obj).map(|t| (t, Collection::degenerate(GlobularSet::new(max_dim)))).collect();
        NCollGraph { max_obj, max_dim, homs }
    }

    pub fn hom(&self, n: usize, m: usize) -> &Collection {
        &self.homs[&(n, m)]
    }

    pub fn validate(&self) -> Vec<(HomType, CollViolation)> {
        let mut out = Vec::new();
        for (t, c) in &self.homs {
            if c.glob.max_dim() != self.max_dim {
                out.push((*t, CollViolation { cell: String::new(), relation: "max-dim".into() }));
            }
            out.extend(c.validate().into_iter().map(|v| (*t, v)));
        }
        out
    }

    /// Cells per dimension in each hom.
    pub fn cell_counts(&self) -> BTreeMap<HomType, Vec<usize>> {
        self.homs.iter().map(|(t, c)| (*t, (0..=self.max_dim).map(|d| c.glob.count(d)).collect())).collect()
    }

    pub fn to_json(&self) -> Value {
        let homs: serde_json::Map<String, Value> = self.homs.iter().map(|(t, c)| (hom_key(*t), c.to_json())).collect();
        json!({ "maxObj": self.max_obj, "maxDim": self.max_dim, "homs": homs })
    }

    pub fn from_json(v: &Value) -> Result<Self, CollError> {
        let bad = |m: &str| CollError::Json(m.to_string());
        let max_obj = v.get("maxObj").and_then(Value::as_u64).ok_or_else(|| bad("missing maxObj"))? as usize;
        let max_dim = v.get("maxDim").and_then(Value::as_u64).ok_or_else(|| bad("missing maxDim"))? as usize;
        let mut g = NCollGraph::empty(max_obj, max_dim);
        if let Some(hs) = v.get("homs").and_then(Value::as_object) {
            for (k, c) in hs {
                let t = parse_hom_key(k).filter(|t| t.0 <= max_obj && t.1 <= max_obj).ok_or_else(|| bad(&format!("bad hom key `{k}`")))?;
                g.homs.insert(t, Collection::from_json(c)?);
            }
        }
        Ok(g)
    }
}

/// Disjoint union of named parts, cell names prefixed by the part name.
fn coproduct(max_dim: usize, parts: &[(String, Collection)]) -> Result<Collection, CollError> {
    let mut glob = GlobularSet::new(max_dim);
    let mut arities: HashMap<CellRef, TreeCell> = HashMap::new();
    for d in 0..=max_dim {
        for (p, c) in parts {
            for x in c.glob.cells(d) {
                let name = format!("{p}{}", c.glob.name(x));
                let r = if d == 0 {
                    glob.add0(&name)?
                } else {
                    let s = format!("{p}{}", c.glob.name(c.glob.src_of(x).unwrap()));
                    let t = format!("{p}{}", c.glob.name(c.glob.tgt_of(x).unwrap()));
                    glob.add(d, &name, &s, &t)?
                };
                arities.insert(r, c.arity_of(x).clone());
            }
        }
    }
    Ok(Collection::new(glob, |r| arities[&r].clone()))
}

/// `(G ⊕ H)(n, m) = ∐ G(i, l) × H(j, k)` over `i + j = n`, `l + k = m`.
pub fn graph_oplus(g: &NCollGraph, h: &NCollGraph) -> Result<NCollGraph, CollError> {
    let max_obj = g.max_obj.min(h.max_obj);
    let max_dim = g.max_dim.min(h.max_dim);
    let mut out = NCollGraph::empty(max_obj, max_dim);
    for (n, m) in hom_types(max_obj) {
        let mut parts = Vec::new();
        for i in 0..=n {
            for l in 0..=m {
                let (a, b) = (g.hom(i, l), h.hom(n - i, m - l));
                let prod = Collection::materialize(&ProductColl { a, b }, |(x, y)| {
                    format!("({},{})", a.glob.name(*x), b.glob.name(*y))
                })?;
                parts.push((format!("[{i},{l}|{},{}]", n - i, m - l), prod));
            }
        }
        out.homs.insert((n, m), coproduct(max_dim, &parts)?);
    }
    Ok(out)
}

/// The unit for `⊕`: the terminal collection at `(0, 0)`, truncated at
/// `max_nodes`, and empty elsewhere.
pub fn jay(max_obj: usize, max_dim: usize, max_nodes: usize) -> Result<NCollGraph, CollError> {
    let mut g = NCollGraph::empty(max_obj, max_dim);
    let u = Collection::materialize(&Terminal { max_dim, max_nodes }, |t| t.to_string())?;
    g.homs.insert((0, 0), u);
    Ok(g)
}

/// A cell of the free monoidal ℕColl-graph: a unit over a shape, or a
/// nonempty word of cells of equal arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonCell {
    Unit(TreeCell),
    Word(Vec<(HomType, CellRef)>),
}

/// `∐_k ⊕^k G`, with words of length at most `max_len` and unit shapes of
/// at most `max_nodes` nodes.
pub struct FreeMonoidal<'g> {
    pub g: &'g NCollGraph,
    pub max_len: usize,
    pub max_nodes: usize,
}

impl FreeMonoidal<'_> {
    pub fn hom_type(&self, c: &MonCell) -> HomType {
        match c {
            MonCell::Unit(_) => (0, 0),
            MonCell::Word(w) => w.iter().fold((0, 0), |(n, m), ((a, b), _)| (n + a, m + b)),
        }
    }

    pub fn arity(&self, c: &MonCell) -> TreeCell {
        match c {
            MonCell::Unit(t) => t.clone(),
            MonCell::Word(w) => self.g.homs[&w[0].0].arity_of(w[0].1).clone(),
        }
    }

    fn bd(&self, c: &MonCell, side: Side) -> Option<MonCell> {
        match c {
            MonCell::Unit(t) => t.boundary().map(MonCell::Unit),
            MonCell::Word(w) => w
                .iter()
                .map(|(t, x)| {
                    let glob = &self.g.homs[t].glob;
                    let y = if side == Side::Source { glob.src_of(*x) } else { glob.tgt_of(*x) };
                    y.map(|y| (*t, y))
                })
                .collect::<Option<Vec<_>>>()
                .map(MonCell::Word),
        }
    }

    pub fn cells(&self, n: usize, m: usize, d: usize) -> Vec<MonCell> {
        let mut out = Vec::new();
        if (n, m) == (0, 0) && d <= self.g.max_dim {
            out.extend(enumerate_trees(d, self.max_nodes).into_iter().map(|t| MonCell::Unit(TreeCell::new(t, d))));
        }
        let mut by: BTreeMap<TreeCell, Vec<(HomType, CellRef)>> = BTreeMap::new();
        for (t, c) in &self.g.homs {
            if d <= c.glob.max_dim() {
                for x in c.glob.cells(d) {
                    by.entry(c.arity_of(x).clone()).or_default().push((*t, x));
                }
            }
        }
        fn go(
            pool: &[(HomType, CellRef)],
            left: HomType,
            len: usize,
            cur: &mut Vec<(HomType, CellRef)>,
            out: &mut Vec<MonCell>,
        ) {
            if left == (0, 0) && !cur.is_empty() {
                out.push(MonCell::Word(cur.clone()));
            }
            if len == 0 {
                return;
            }
            for c in pool {
                let (a, b) = c.0;
                if a <= left.0 && b <= left.1 {
                    cur.push(*c);
                    go(pool, (left.0 - a, left.1 - b), len - 1, cur, out);
                    cur.pop();
                }
            }
        }
        for pool in by.values() {
            go(pool, (n, m), self.max_len, &mut Vec::new(), &mut out);
        }
        out
    }

    /// The monoidal product: concatenation, with units absorbed.
    pub fn product(&self, a: &MonCell, b: &MonCell) -> Option<MonCell> {
        if self.arity(a) != self.arity(b) {
            return None;
        }
        Some(match (a, b) {
            (MonCell::Unit(_), x) | (x, MonCell::Unit(_)) => x.clone(),
            (MonCell::Word(x), MonCell::Word(y)) => MonCell::Word(x.iter().chain(y).copied().collect()),
        })
    }

    pub fn name(&self, c: &MonCell) -> String {
        match c {
            MonCell::Unit(t) => format!("unit{t}"),
            MonCell::Word(w) => {
                w.iter().map(|(t, x)| self.g.homs[t].glob.name(*x).to_string()).collect::<Vec<_>>().join("+")
            }
        }
    }

    pub fn to_graph(&self) -> Result<NCollGraph, CollError> {
        let mut out = NCollGraph::empty(self.g.max_obj, self.g.max_dim);
        for (n, m) in hom_types(self.g.max_obj) {
            let e = MonHom { f: self, n, m };
            out.homs.insert((n, m), Collection::materialize(&e, |c| self.name(c))?);
        }
        Ok(out)
    }

    /// Checks associativity and units of the product and that it commutes
    /// with boundaries, on every triple of cells within the bounds (at most
    /// `cap` triples per dimension).
    pub fn check(&self, cap: usize) -> Vec<OperadViolation> {
        let mut out = Vec::new();
        let n_max = self.g.max_obj;
        for d in 0..=self.g.max_dim {
            let all: Vec<MonCell> = hom_types(n_max).flat_map(|(n, m)| self.cells(n, m, d)).collect();
            let mut seen = 0;
            for x in &all {
                let u = MonCell::Unit(self.arity(x));
                if self.product(&u, x).as_ref() != Some(x) || self.product(x, &u).as_ref() != Some(x) {
                    out.push(viol("unit", self.name(x)));
                }
                for y in &all {
                    let Some(xy) = self.product(x, y) else { continue };
                    if d > 0 {
                        for side in [Side::Source, Side::Target] {
                            let lhs = self.bd(&xy, side);
                            let rhs = self.product(&self.bd(x, side).unwrap(), &self.bd(y, side).unwrap());
                            if lhs != rhs {
                                out.push(viol("boundary", format!("{} {}", self.name(x), self.name(y))));
                            }
                        }
                    }
                    for z in &all {
                        if seen >= cap {
                            break;
                        }
                        let Some(yz) = self.product(y, z) else { continue };
                        seen += 1;
                        if self.product(&xy, z) != self.product(x, &yz) {
                            out.push(viol("associativity", format!("{} {} {}", self.name(x), self.name(y), self.name(z))));
                        }
                    }
                }
            }
        }
        out
    }
}

struct MonHom<'a, 'g> {
    f: &'a FreeMonoidal<'g>,
    n: usize,
    m: usize,
}

impl Globe for MonHom<'_, '_> {
    type Cell = MonCell;

    fn cell_dim(&self, c: &MonCell) -> usize {
        self.f.arity(c).dim
    }
    fn source(&self, c: &MonCell) -> Option<MonCell> {
        self.f.bd(c, Side::Source)
    }
    fn target(&self, c: &MonCell) -> Option<MonCell> {
        self.f.bd(c, Side::Target)
    }
}

impl CollEngine for MonHom<'_, '_> {
    fn max_dim(&self) -> usize {
        self.f.g.max_dim
    }
    fn arity(&self, c: &MonCell) -> TreeCell {
        self.f.arity(c)
    }
    fn cells(&self, dim: usize) -> Vec<MonCell> {
        self.f.cells(self.n, self.m, dim)
    }
}

/// The free monoidal ℕColl-graph on `g`, materialized.
pub fn free_monoidal_graph(g: &NCollGraph, max_len: usize, max_nodes: usize) -> Result<NCollGraph, CollError> {
    FreeMonoidal { g, max_len, max_nodes }.to_graph()
}

/// A cell of the free Coll-category on an ℕColl-graph: an identity, or the
/// last edge of a path over a labelling of its arity by cells of the rest of
/// the path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathCell {
    /// `(object, dim)`, over `η_dim`.
    Id(usize, usize),
    Step { path: Vec<usize>, edge: CellRef, args: Option<Pd<PathCell>> },
}

impl PathCell {
    pub fn ends(&self) -> HomType {
        match self {
            PathCell::Id(x, _) => (*x, *x),
            PathCell::Step { path, .. } => (path[0], *path.last().unwrap()),
        }
    }

    fn path(&self) -> Vec<usize> {
        match self {
            PathCell::Id(x, _) => vec![*x],
            PathCell::Step { path, .. } => path.clone(),
        }
    }
}

/// The free category enriched in collections, with paths of at most
/// `max_len` edges.
pub struct FreeCat<'g> {
    pub g: &'g NCollGraph,
    pub max_len: usize,
    memo: RefCell<HashMap<Vec<usize>, Rc<Vec<PathCell>>>>,
}

impl<'g> FreeCat<'g> {
    pub fn new(g: &'g NCollGraph, max_len: usize) -> Self {
        FreeCat { g, max_len, memo: RefCell::new(HashMap::new()) }
    }

    pub fn arity(&self, c: &PathCell) -> TreeCell {
        match c {
            PathCell::Id(_, d) => TreeCell::eta(*d),
            PathCell::Step { path, edge, args: None } => self.edge_coll(path).arity_of(*edge).clone(),
            PathCell::Step { args: Some(a), .. } => word_arity(a, |c| self.arity(c)).expect("labelling of an arity"),
        }
    }

    fn edge_coll(&self, path: &[usize]) -> &Collection {
        let k = path.len();
        self.g.hom(path[k - 2], path[k - 1])
    }

    /// All cells on a path of objects.
    fn path_cells(&self, path: &[usize]) -> Rc<Vec<PathCell>> {
        if let Some(v) = self.memo.borrow().get(path) {
            return v.clone();
        }
        let mut out = Vec::new();
        let coll = if path.len() >= 2 { Some(self.edge_coll(path)) } else { None };
        match (path.len(), coll) {
            (1, _) => out.extend((0..=self.g.max_dim).map(|d| PathCell::Id(path[0], d))),
            (2, Some(c)) => {
                out.extend(c.glob.all_cells().map(|e| PathCell::Step { path: path.to_vec(), edge: e, args: None }))
            }
            (_, Some(c)) => {
                let prefix = self.path_cells(&path[..path.len() - 1]);
                let idx = LabelIndex::new(self, prefix.iter().cloned());
                for e in c.glob.all_cells() {
                    for a in idx.labellings(c.arity_of(e)) {
                        out.push(PathCell::Step { path: path.to_vec(), edge: e, args: Some(a) });
                    }
                }
            }
            _ => {}
        }
        let rc = Rc::new(out);
        self.memo.borrow_mut().insert(path.to_vec(), rc.clone());
        rc
    }

    /// Cells of `F(x, y)` of dimension `d`.
    pub fn hom_cells(&self, x: usize, y: usize, d: usize) -> Vec<PathCell> {
        let mut out = Vec::new();
        for len in 0..=self.max_len {
            if len == 0 && x != y {
                continue;
            }
            let mids = words_over(&(0..=self.g.max_obj).collect::<Vec<_>>(), len.saturating_sub(1));
            for mid in mids {
                if len == 0 && !mid.is_empty() {
                    continue;
                }
                let mut path = vec![x];
                path.extend(mid);
                if len > 0 {
                    path.push(y);
                }
                out.extend(self.path_cells(&path).iter().filter(|c| self.cell_dim(c) == d).cloned());
            }
        }
        out
    }

    /// `g ∘ ψ` for `g` in `F(y, z)` and `ψ` labelled in `F(x, y)`.
    pub fn compose(&self, g: &PathCell, psi: &Pd<PathCell>) -> Composite<PathCell> {
        if psi.shape() != self.arity(g) {
            return Composite::Undefined;
        }
        let labels = psi.labels();
        let ends = labels[0].ends();
        if labels.iter().any(|c| c.ends() != ends) || ends.1 != g.ends().0 {
            return Composite::Undefined;
        }
        match g {
            PathCell::Id(_, _) => Composite::Value(psi.first_leaf().clone()),
            _ if labels.iter().all(|c| matches!(c, PathCell::Id(..))) => Composite::Value(g.clone()),
            PathCell::Step { path, edge, args } => {
                let mut new_path = psi.first_leaf().path();
                new_path.extend_from_slice(&path[1..]);
                if new_path.len() > self.max_len + 1 {
                    return Composite::OutOfRange;
                }
                let args = match args {
                    None => psi.clone(),
                    Some(phi) => {
                        let Ok(al) = alpha(&((g.clone(), phi.clone()), psi.clone()), |c| self.arity(c)) else {
                            return Composite::Undefined;
                        };
                        let mut bad = None;
                        let out = al.1.map(|(c, piece)| match self.compose(c, piece) {
                            Composite::Value(v) => v,
                            other => {
                                bad.get_or_insert(other);
                                c.clone()
                            }
                        });
                        if let Some(b) = bad {
                            return b;
                        }
                        out
                    }
                };
                Composite::Value(PathCell::Step { path: new_path, edge: *edge, args: Some(args) })
            }
        }
    }

    /// Checks the unit laws and associativity of `∘` on cells of dimension
    /// at most `max_dim`, sampling at most `cap` composable pairs per hom
    /// triple and dimension.
    pub fn check(&self, cap: usize) -> Vec<OperadViolation> {
        let mut out = Vec::new();
        let n_max = self.g.max_obj;
        let view = |x, y| FreeHom { f: self, x, y };
        for x in 0..=n_max {
            for y in 0..=n_max {
                for d in 0..=self.g.max_dim {
                    for c in self.hom_cells(x, y, d) {
                        let left = self.compose(&PathCell::Id(y, d), &Pd::eta(self, &c));
                        let right = self.compose(&c, &self.arity(&c).to_pd().map(|h| PathCell::Id(x, *h)));
                        if left != Composite::Value(c.clone()) || right != Composite::Value(c.clone()) {
                            out.push(viol("unit", format!("{c:?}")));
                        }
                    }
                }
            }
        }
        let mut rng = StdRng::seed_from_u64(21);
        for (w, x, y, z) in hom_types(n_max).flat_map(|(a, b)| hom_types(n_max).map(move |(c, d)| (a, b, c, d))) {
            let (vyz, vxy, vwx) = (view(y, z), view(x, y), view(w, x));
            let sq = Square::new(&vyz, &vxy);
            let idx = LabelIndex::new(&vwx, vwx.all_cells());
            for d in 0..=self.g.max_dim {
                for (h, phi) in sq.bounded_cells(d, cap, 22) {
                    let Composite::Value(hp) = self.compose(&h, &phi) else { continue };
                    for psi in bounded_labellings(&idx, &self.arity(&hp), 2, &mut rng) {
                        let Composite::Value(lhs) = self.compose(&hp, &psi) else { continue };
                        let Ok((_, nested)) = alpha(&((h.clone(), phi.clone()), psi.clone()), |c| self.arity(c)) else {
                            out.push(viol("associativity", format!("split {h:?}")));
                            continue;
                        };
                        let mut inner_ok = true;
                        let inner = nested.map(|(b, p)| match self.compose(b, p) {
                            Composite::Value(v) => v,
                            _ => {
                                inner_ok = false;
                                b.clone()
                            }
                        });
                        if !inner_ok {
                            continue;
                        }
                        if let Composite::Value(rhs) = self.compose(&h, &inner) {
                            if rhs != lhs {
                                out.push(viol("associativity", format!("{h:?} {phi:?} {psi:?}")));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl Globe for FreeCat<'_> {
    type Cell = PathCell;

    fn cell_dim(&self, c: &PathCell) -> usize {
        match c {
            PathCell::Id(_, d) => *d,
            PathCell::Step { edge, .. } => edge.dim,
        }
    }
    fn source(&self, c: &PathCell) -> Option<PathCell> {
        path_bd(self, c, Side::Source)
    }
    fn target(&self, c: &PathCell) -> Option<PathCell> {
        path_bd(self, c, Side::Target)
    }
}

fn path_bd(f: &FreeCat<'_>, c: &PathCell, side: Side) -> Option<PathCell> {
    match c {
        PathCell::Id(x, d) => (*d > 0).then(|| PathCell::Id(*x, d - 1)),
        PathCell::Step { path, edge, args } => {
            let glob = &f.edge_coll(path).glob;
            let e = if side == Side::Source { glob.src_of(*edge)? } else { glob.tgt_of(*edge)? };
            let args = match args {
                None => None,
                Some(a) => Some(a.boundary(side).ok()?),
            };
            Some(PathCell::Step { path: path.clone(), edge: e, args })
        }
    }
}

struct FreeHom<'a, 'g> {
    f: &'a FreeCat<'g>,
    x: usize,
    y: usize,
}

impl Globe for FreeHom<'_, '_> {
    type Cell = PathCell;

    fn cell_dim(&self, c: &PathCell) -> usize {
        self.f.cell_dim(c)
    }
    fn source(&self, c: &PathCell) -> Option<PathCell> {
        self.f.source(c)
    }
    fn target(&self, c: &PathCell) -> Option<PathCell> {
        self.f.target(c)
    }
}

impl CollEngine for FreeHom<'_, '_> {
    fn max_dim(&self) -> usize {
        self.f.g.max_dim
    }
    fn arity(&self, c: &PathCell) -> TreeCell {
        self.f.arity(c)
    }
    fn cells(&self, dim: usize) -> Vec<PathCell> {
        self.f.hom_cells(self.x, self.y, dim)
    }
}

/// Cell counts of the free Coll-category on `g` per hom and dimension.
pub fn free_coll_category(g: &NCollGraph, max_len: usize) -> BTreeMap<HomType, Vec<usize>> {
    let f = FreeCat::new(g, max_len);
    hom_types(g.max_obj).map(|(x, y)| ((x, y), (0..=g.max_dim).map(|d| f.hom_cells(x, y, d).len()).collect())).collect()
}

// ---------------------------------------------------------------------------
// Globular PROs

/// A globular PRO, truncated at objects `max_obj` and dimension `max_dim`.
/// `j_n(d)` is `ident(n, d)` and `O(σ)` is `zero(σ)`.
pub trait GlobularPro {
    type Cell: Clone + Eq + Ord + Hash + Debug;

    fn max_obj(&self) -> usize;
    fn max_dim(&self) -> usize;
    fn hom_type(&self, c: &Self::Cell) -> HomType;
    fn arity(&self, c: &Self::Cell) -> TreeCell;
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell>;
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell>;
    fn cells(&self, n: usize, m: usize, d: usize) -> Vec<Self::Cell>;
    /// `head ∘ args` with `head` in `(m, l)` and `args` labelled in `(n, m)`.
    fn compose(&self, head: &Self::Cell, args: &Pd<Self::Cell>) -> Composite<Self::Cell>;
    fn tensor(&self, a: &Self::Cell, b: &Self::Cell) -> Composite<Self::Cell>;
    fn ident(&self, n: usize, d: usize) -> Self::Cell;
    fn zero(&self, sigma: &TreeCell) -> Option<Self::Cell>;
    fn describe(&self, c: &Self::Cell) -> String {
        format!("{c:?}")
    }
}

/// The hom `P(n, m)` of a globular PRO as a collection.
pub struct HomView<'p, P: ?Sized> {
    pub p: &'p P,
    pub n: usize,
    pub m: usize,
}

impl<P: GlobularPro + ?Sized> Globe for HomView<'_, P> {
    type Cell = P::Cell;

    fn cell_dim(&self, c: &P::Cell) -> usize {
        self.p.arity(c).dim
    }
    fn source(&self, c: &P::Cell) -> Option<P::Cell> {
        self.p.source(c)
    }
    fn target(&self, c: &P::Cell) -> Option<P::Cell> {
        self.p.target(c)
    }
}

impl<P: GlobularPro + ?Sized> CollEngine for HomView<'_, P> {
    fn max_dim(&self) -> usize {
        self.p.max_dim()
    }
    fn arity(&self, c: &P::Cell) -> TreeCell {
        self.p.arity(c)
    }
    fn cells(&self, dim: usize) -> Vec<P::Cell> {
        self.p.cells(self.n, self.m, dim)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GlobProReport {
    pub violations: Vec<OperadViolation>,
    /// Instances checked per law.
    pub checked: BTreeMap<String, usize>,
}

impl GlobProReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn tick(&mut self, law: &str) {
        *self.checked.entry(law.to_string()).or_default() += 1;
    }

    pub fn to_json(&self) -> Value {
        let v: Vec<Value> = self.violations.iter().map(|v| json!({ "law": v.law, "witness": v.witness })).collect();
        json!({ "ok": self.ok(), "bounded": true, "checked": self.checked, "violations": v })
    }
}

fn value<C>(c: Composite<C>) -> Option<C> {
    match c {
        Composite::Value(v) => Some(v),
        _ => None,
    }
}

/// Checks the globular PRO axioms within the truncation: typing of
/// composites and tensors, associativity and units of `∘`, functoriality of
/// `+` over `∘`, `j_n + j_m = j_{n+m}`, associativity of `+` and the unit
/// `O`. Composable diagrams are sampled, at most `cap` per hom combination
/// and dimension.
pub fn globpro_validate<P: GlobularPro>(p: &P, cap: usize) -> GlobProReport {
    let mut rep = GlobProReport::default();
    let n_max = p.max_obj();
    let dmax = p.max_dim();
    let view = |n, m| HomView { p, n, m };
    let desc = |c: &P::Cell| p.describe(c);

    for (n, m) in hom_types(n_max) {
        for d in 0..=dmax {
            for x in p.cells(n, m, d) {
                rep.tick("typing");
                let ar = p.arity(&x);
                if ar.dim != d || p.hom_type(&x) != (n, m) {
                    rep.violations.push(viol("typing", desc(&x)));
                }
                if d > 0 {
                    let (s, t) = (p.source(&x), p.target(&x));
                    let ok = [&s, &t].iter().all(|b| {
                        b.as_ref().is_some_and(|b| p.hom_type(b) == (n, m) && Some(p.arity(b)) == ar.boundary())
                    });
                    let glob = d < 2 || s.as_ref().and_then(|s| p.source(s)) == t.as_ref().and_then(|t| p.source(t));
                    if !ok || !glob {
                        rep.violations.push(viol("typing", format!("boundary of {}", desc(&x))));
                    }
                }
            }
        }
    }
    for n in 0..=n_max {
        for d in 0..=dmax {
            rep.tick("identity-typing");
            let j = p.ident(n, d);
            let ok = p.hom_type(&j) == (n, n)
                && p.arity(&j) == TreeCell::eta(d)
                && (d == 0 || p.source(&j) == Some(p.ident(n, d - 1)) && p.target(&j) == Some(p.ident(n, d - 1)));
            if !ok {
                rep.violations.push(viol("identity-typing", format!("j_{n} at {d}")));
            }
        }
    }

    // Units of composition.
    for (n, m) in hom_types(n_max) {
        let v = view(n, m);
        for d in 0..=dmax {
            for x in p.cells(n, m, d) {
                rep.tick("composition-unit");
                let left = p.compose(&p.ident(m, d), &Pd::eta(&v, &x));
                let right = p.compose(&x, &p.arity(&x).to_pd().map(|h| p.ident(n, *h)));
                if !matches!(left, Composite::OutOfRange) && left != Composite::Value(x.clone()) {
                    rep.violations.push(viol("composition-unit", format!("j_{m} ∘ {}", desc(&x))));
                }
                if !matches!(right, Composite::OutOfRange) && right != Composite::Value(x.clone()) {
                    rep.violations.push(viol("composition-unit", format!("{} ∘ j_{n}", desc(&x))));
                }
            }
        }
    }

    // Typing and associativity of composition: `h ∘ φ` with `h` in `(c, e)`,
    // `φ` in `(b, c)`, then `ψ` in `(a, b)`.
    let mut rng = StdRng::seed_from_u64(7);
    for (a, b) in hom_types(n_max) {
        let lower = view(a, b);
        let idx = LabelIndex::new(&lower, lower.all_cells());
        for (c, e) in hom_types(n_max) {
            let (top, mid) = (view(c, e), view(b, c));
            let sq = Square::new(&top, &mid);
            for d in 0..=dmax {
                for (h, phi) in sq.bounded_cells(d, cap, 8) {
                    let hp = match p.compose(&h, &phi) {
                        Composite::Value(v) => v,
                        Composite::OutOfRange => continue,
                        Composite::Undefined => {
                            rep.violations.push(viol("composition-defined", format!("{} ∘ {phi:?}", desc(&h))));
                            continue;
                        }
                    };
                    rep.tick("composition-typing");
                    let ar = word_arity(&phi, |x| p.arity(x)).ok();
                    let mut typed = p.hom_type(&hp) == (b, e) && ar.as_ref() == Some(&p.arity(&hp));
                    if d > 0 {
                        for side in [Side::Source, Side::Target] {
                            let hb = if side == Side::Source { p.source(&h) } else { p.target(&h) };
                            let bd = hb.zip(phi.boundary(side).ok()).and_then(|(hb, pb)| value(p.compose(&hb, &pb)));
                            let own = if side == Side::Source { p.source(&hp) } else { p.target(&hp) };
                            if bd.is_some() && bd != own {
                                typed = false;
                            }
                        }
                    }
                    if !typed {
                        rep.violations.push(viol("composition-typing", format!("{} ∘ {phi:?}", desc(&h))));
                    }
                    for psi in bounded_labellings(&idx, &p.arity(&hp), 2, &mut rng) {
                        let Some(lhs) = value(p.compose(&hp, &psi)) else { continue };
                        let Ok((_, nested)) = alpha(&((h.clone(), phi.clone()), psi.clone()), |x| p.arity(x)) else {
                            rep.violations.push(viol("composition-associativity", format!("split at {}", desc(&h))));
                            continue;
                        };
                        let inner: Option<Vec<P::Cell>> =
                            nested.labels().iter().map(|(x, piece)| value(p.compose(x, piece))).collect();
                        let Some(inner) = inner else { continue };
                        let mut it = inner.into_iter();
                        let inner = nested.map(|_| it.next().unwrap());
                        let Some(rhs) = value(p.compose(&h, &inner)) else { continue };
                        rep.tick("composition-associativity");
                        if lhs != rhs {
                            rep.violations.push(viol(
                                "composition-associativity",
                                format!("{} ∘ {phi:?} ∘ {psi:?}", desc(&h)),
                            ));
                        }
                    }
                }
            }
        }
    }

    // Tensor: typing, identities, functoriality over composition.
    for (n, m) in hom_types(n_max) {
        for (l, k) in hom_types(n_max) {
            if n + l > n_max || m + k > n_max {
                continue;
            }
            for d in 0..=dmax {
                let xs = p.cells(n, m, d);
                let ys = p.cells(l, k, d);
                let mut seen = 0;
                'pairs: for x in &xs {
                    for y in ys.iter().filter(|y| p.arity(y) == p.arity(x)) {
                        if seen >= cap {
                            break 'pairs;
                        }
                        seen += 1;
                        rep.tick("tensor-typing");
                        let Some(s) = value(p.tensor(x, y)) else {
                            rep.violations.push(viol("tensor-defined", format!("{} + {}", desc(x), desc(y))));
                            continue;
                        };
                        let mut ok = p.hom_type(&s) == (n + l, m + k) && p.arity(&s) == p.arity(x);
                        if d > 0 {
                            let bs = p.source(x).zip(p.source(y)).and_then(|(a, b)| value(p.tensor(&a, &b)));
                            let bt = p.target(x).zip(p.target(y)).and_then(|(a, b)| value(p.tensor(&a, &b)));
                            ok &= bs == p.source(&s) && bt == p.target(&s);
                        }
                        if !ok {
                            rep.violations.push(viol("tensor-typing", format!("{} + {}", desc(x), desc(y))));
                        }
                    }
                }
            }
        }
    }
    for n in 0..=n_max {
        for l in 0..=n_max - n {
            for d in 0..=dmax {
                rep.tick("identity-tensor");
                if p.tensor(&p.ident(n, d), &p.ident(l, d)) != Composite::Value(p.ident(n + l, d)) {
                    rep.violations.push(viol("identity-tensor", format!("j_{n} + j_{l} at {d}")));
                }
            }
        }
    }
    let sums = |a: usize, b: usize| (0..=a).flat_map(move |i| (0..=b).map(move |j| (i, j)));
    for (n, l) in sums(n_max, n_max).filter(|(n, l)| n + l <= n_max) {
        for (m, k) in sums(n_max, n_max).filter(|(m, k)| m + k <= n_max) {
            let (bl, br) = (view(n, m), view(l, k));
            let bottom = ProductColl { a: &bl, b: &br };
            for (r, s) in sums(n_max, n_max).filter(|(r, s)| r + s <= n_max) {
                let (tl, tr) = (view(m, r), view(k, s));
                let top = ProductColl { a: &tl, b: &tr };
                let sq = Square::new(&top, &bottom);
                for d in 0..=dmax {
                    for ((a, b), psi) in sq.bounded_cells(d, cap, 9) {
                        let Some(ab) = value(p.tensor(&a, &b)) else { continue };
                        let sums: Option<Vec<P::Cell>> = psi.labels().iter().map(|(x, y)| value(p.tensor(x, y))).collect();
                        let Some(sums) = sums else { continue };
                        let mut it = sums.into_iter();
                        let psi_t = psi.map(|_| it.next().unwrap());
                        let lhs = p.compose(&ab, &psi_t);
                        let l1 = p.compose(&a, &psi.map(|(x, _)| x.clone()));
                        let l2 = p.compose(&b, &psi.map(|(_, y)| y.clone()));
                        let (Composite::Value(lhs), Some(l1), Some(l2)) = (lhs, value(l1), value(l2)) else { continue };
                        rep.tick("tensor-functoriality");
                        if value(p.tensor(&l1, &l2)) != Some(lhs) {
                            rep.violations.push(viol("tensor-functoriality", format!("({} + {}) ∘ {psi:?}", desc(&a), desc(&b))));
                        }
                    }
                }
            }
        }
    }

    // Associativity and unit of the tensor.
    let types: Vec<HomType> = hom_types(n_max).collect();
    for d in 0..=dmax {
        let mut by: BTreeMap<(HomType, TreeCell), Vec<P::Cell>> = BTreeMap::new();
        for t in &types {
            for x in p.cells(t.0, t.1, d) {
                by.entry((*t, p.arity(&x))).or_default().push(x);
            }
        }
        for x in by.values().flatten() {
            rep.tick("tensor-unit");
            let Some(z) = p.zero(&p.arity(x)) else { continue };
            let ok = p.hom_type(&z) == (0, 0)
                && p.tensor(&z, x) == Composite::Value(x.clone())
                && p.tensor(x, &z) == Composite::Value(x.clone());
            if !ok {
                rep.violations.push(viol("tensor-unit", desc(x)));
            }
        }
        let mut seen = 0;
        'triples: for ((t1, ar), xs) in &by {
            for t2 in &types {
                for t3 in &types {
                    if t1.0 + t2.0 + t3.0 > n_max || t1.1 + t2.1 + t3.1 > n_max {
                        continue;
                    }
                    let (Some(ys), Some(zs)) = (by.get(&(*t2, ar.clone())), by.get(&(*t3, ar.clone()))) else { continue };
                    for x in xs {
                        for y in ys {
                            for z in zs {
                                if seen >= cap * types.len() {
                                    break 'triples;
                                }
                                seen += 1;
                                rep.tick("tensor-associativity");
                                let l = value(p.tensor(x, y)).and_then(|xy| value(p.tensor(&xy, z)));
                                let r = value(p.tensor(y, z)).and_then(|yz| value(p.tensor(x, &yz)));
                                if l != r || l.is_none() {
                                    rep.violations.push(viol("tensor-associativity", format!("{} {} {}", desc(x), desc(y), desc(z))));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Globularization of a PRO

/// A cell `(φ, σ)` of the globularization: a morphism with a tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GCell<M> {
    pub phi: M,
    pub shape: TreeCell,
}

/// `P'(n, m) = P(n, m) × T1`: the globular PRO of a PRO, with trees of at
/// most `max_nodes` nodes.
pub struct Globularized<P: Pro> {
    pub pro: P,
    pub max_obj: usize,
    pub max_dim: usize,
    pub max_nodes: usize,
    homs: BTreeMap<HomType, Vec<P::Mor>>,
    trees: Vec<Vec<TreeCell>>,
}

impl<P: Pro> Globularized<P> {
    pub fn new(pro: P, max_obj: usize, max_dim: usize, max_nodes: usize, fuel: usize) -> Result<Self, ProError> {
        let mut homs = BTreeMap::new();
        for (n, m) in hom_types(max_obj) {
            homs.insert((n, m), pro.enumerate_hom(n, m, fuel)?);
        }
        let trees = (0..=max_dim)
            .map(|d| enumerate_trees(d, max_nodes).into_iter().map(|t| TreeCell::new(t, d)).collect())
            .collect();
        Ok(Globularized { pro, max_obj, max_dim, max_nodes, homs, trees })
    }

    pub fn hom(&self, n: usize, m: usize) -> &[P::Mor] {
        &self.homs[&(n, m)]
    }

    pub fn contains(&self, c: &GCell<P::Mor>) -> bool {
        let t = (self.pro.arity(&c.phi), self.pro.coarity(&c.phi));
        c.shape.dim <= self.max_dim
            && c.shape.tree.node_count() <= self.max_nodes
            && self.homs.get(&t).is_some_and(|v| v.contains(&c.phi))
    }

    pub fn to_json(&self) -> Value {
        let homs: serde_json::Map<String, Value> = self
            .homs
            .iter()
            .map(|(t, fs)| {
                let cells: Vec<usize> = self.trees.iter().map(|ts| ts.len() * fs.len()).collect();
                let mors: Vec<String> = fs.iter().map(|f| self.pro.describe(f)).collect();
                (hom_key(*t), json!({ "morphisms": mors, "cells": cells }))
            })
            .collect();
        json!({ "maxObj": self.max_obj, "maxDim": self.max_dim, "maxTreeNodes": self.max_nodes, "homs": homs })
    }
}

impl<P: Pro> GlobularPro for Globularized<P> {
    type Cell = GCell<P::Mor>;

    fn max_obj(&self) -> usize {
        self.max_obj
    }
    fn max_dim(&self) -> usize {
        self.max_dim
    }
    fn hom_type(&self, c: &Self::Cell) -> HomType {
        (self.pro.arity(&c.phi), self.pro.coarity(&c.phi))
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        c.shape.clone()
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.shape.boundary().map(|s| GCell { phi: c.phi.clone(), shape: s })
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        self.source(c)
    }
    fn cells(&self, n: usize, m: usize, d: usize) -> Vec<Self::Cell> {
        let (Some(fs), Some(ts)) = (self.homs.get(&(n, m)), self.trees.get(d)) else { return Vec::new() };
        fs.iter().flat_map(|f| ts.iter().map(move |t| GCell { phi: f.clone(), shape: t.clone() })).collect()
    }
    fn compose(&self, head: &Self::Cell, args: &Pd<Self::Cell>) -> Composite<Self::Cell> {
        if args.shape() != head.shape {
            return Composite::Undefined;
        }
        let f = &args.first_leaf().phi;
        if args.labels().iter().any(|c| &c.phi != f) || self.pro.coarity(f) != self.pro.arity(&head.phi) {
            return Composite::Undefined;
        }
        let Ok(shape) = mu_shape(&args.map(|c| c.shape.clone())) else { return Composite::Undefined };
        if shape.tree.node_count() > self.max_nodes {
            return Composite::OutOfRange;
        }
        match self.pro.compose(&head.phi, f) {
            Ok(phi) => Composite::Value(GCell { phi, shape }),
            Err(_) => Composite::Undefined,
        }
    }
    fn tensor(&self, a: &Self::Cell, b: &Self::Cell) -> Composite<Self::Cell> {
        if a.shape != b.shape {
            return Composite::Undefined;
        }
        let (ta, tb) = (self.hom_type(a), self.hom_type(b));
        if ta.0 + tb.0 > self.max_obj || ta.1 + tb.1 > self.max_obj {
            return Composite::OutOfRange;
        }
        match self.pro.tensor(&a.phi, &b.phi) {
            Ok(phi) => Composite::Value(GCell { phi, shape: a.shape.clone() }),
            Err(_) => Composite::Undefined,
        }
    }
    fn ident(&self, n: usize, d: usize) -> Self::Cell {
        GCell { phi: self.pro.id(n), shape: TreeCell::eta(d) }
    }
    fn zero(&self, sigma: &TreeCell) -> Option<Self::Cell> {
        (sigma.tree.node_count() <= self.max_nodes).then(|| GCell { phi: self.pro.id(0), shape: sigma.clone() })
    }
    fn describe(&self, c: &Self::Cell) -> String {
        format!("({}, {})", self.pro.describe(&c.phi), c.shape)
    }
}

// ---------------------------------------------------------------------------
// The tautological globular PRO of a globular set

/// A cell of `A^n`: for `n = 0` the terminal collection, whose cells are
/// trees; otherwise an `n`-tuple of cells of equal arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PowCell {
    Shape(TreeCell),
    Tuple(Vec<CellRef>),
}

/// `A^n` in collections.
pub struct PowerColl<'a> {
    pub a: &'a Collection,
    pub n: usize,
    pub max_nodes: usize,
}

impl Globe for PowerColl<'_> {
    type Cell = PowCell;

    fn cell_dim(&self, c: &PowCell) -> usize {
        match c {
            PowCell::Shape(t) => t.dim,
            PowCell::Tuple(v) => v[0].dim,
        }
    }
    fn source(&self, c: &PowCell) -> Option<PowCell> {
        match c {
            PowCell::Shape(t) => t.boundary().map(PowCell::Shape),
            PowCell::Tuple(v) => v.iter().map(|x| self.a.glob.src_of(*x)).collect::<Option<_>>().map(PowCell::Tuple),
        }
    }
    fn target(&self, c: &PowCell) -> Option<PowCell> {
        match c {
            PowCell::Shape(t) => t.boundary().map(PowCell::Shape),
            PowCell::Tuple(v) => v.iter().map(|x| self.a.glob.tgt_of(*x)).collect::<Option<_>>().map(PowCell::Tuple),
        }
    }
}

impl CollEngine for PowerColl<'_> {
    fn max_dim(&self) -> usize {
        self.a.glob.max_dim()
    }
    fn arity(&self, c: &PowCell) -> TreeCell {
        match c {
            PowCell::Shape(t) => t.clone(),
            PowCell::Tuple(v) => self.a.arity_of(v[0]).clone(),
        }
    }
    fn cells(&self, dim: usize) -> Vec<PowCell> {
        if self.n == 0 {
            return enumerate_trees(dim, self.max_nodes).into_iter().map(|t| PowCell::Shape(TreeCell::new(t, dim))).collect();
        }
        let mut by: BTreeMap<TreeCell, Vec<CellRef>> = BTreeMap::new();
        for x in self.a.glob.cells(dim) {
            by.entry(self.a.arity_of(x).clone()).or_default().push(x);
        }
        by.values().flat_map(|xs| words_over(xs, self.n)).map(PowCell::Tuple).collect()
    }
    fn cells_over(&self, arity: &TreeCell, _bd: Option<(&PowCell, &PowCell)>) -> Option<Vec<PowCell>> {
        (self.n == 0).then(|| vec![PowCell::Shape(arity.clone())])
    }
}

/// A cell of the tautological globular PRO: a section of `[A^n, A^m]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TCell {
    pub n: usize,
    pub m: usize,
    pub sec: CollSection<PowCell, PowCell>,
}

/// `GTaut(A)(n, m) = [A^n, A^m]`, with shapes of at most `max_nodes` nodes.
pub struct GTaut<'a> {
    pub a: &'a Collection,
    pub max_obj: usize,
    pub max_nodes: usize,
    homs: BTreeMap<HomType, InternalHom<PowerColl<'a>, PowerColl<'a>>>,
}

impl<'a> GTaut<'a> {
    /// Fails if some fibre has more than `cap` sections.
    pub fn new(a: &'a Collection, max_obj: usize, max_nodes: usize, cap: usize) -> Result<Self, CollError> {
        let mut homs = BTreeMap::new();
        for (n, m) in hom_types(max_obj) {
            let h = InternalHom::new(PowerColl { a, n, max_nodes }, PowerColl { a, n: m, max_nodes }, max_nodes, cap);
            for d in 0..=a.glob.max_dim() {
                for t in enumerate_trees(d, max_nodes) {
                    h.fibre(&TreeCell::new(t, d))?;
                }
            }
            homs.insert((n, m), h);
        }
        Ok(GTaut { a, max_obj, max_nodes, homs })
    }

    fn hom(&self, n: usize, m: usize) -> &InternalHom<PowerColl<'a>, PowerColl<'a>> {
        &self.homs[&(n, m)]
    }

    fn project(&self, c: &PowCell, from: usize, to: usize) -> PowCell {
        match c {
            PowCell::Shape(t) => PowCell::Shape(t.clone()),
            PowCell::Tuple(v) if from == to => PowCell::Shape(self.a.arity_of(v[0]).clone()),
            PowCell::Tuple(v) => PowCell::Tuple(v[from..to].to_vec()),
        }
    }

    fn tensor_sec(
        &self,
        a: &CollSection<PowCell, PowCell>,
        b: &CollSection<PowCell, PowCell>,
        (n, l): (usize, usize),
        target: HomType,
    ) -> Option<CollSection<PowCell, PowCell>> {
        let mut top = BTreeMap::new();
        for beta in self.hom(target.0, target.1).labellings(&a.shape) {
            let b1 = beta.map(|c| self.project(c, 0, n));
            let b2 = beta.map(|c| self.project(c, n, n + l));
            let v = match (a.top.get(&b1)?, b.top.get(&b2)?) {
                (PowCell::Tuple(x), PowCell::Tuple(y)) => PowCell::Tuple(x.iter().chain(y).copied().collect()),
                (PowCell::Shape(_), y) => y.clone(),
                (x, PowCell::Shape(_)) => x.clone(),
            };
            top.insert(beta, v);
        }
        let lower = match (&a.lower, &b.lower) {
            (Some(x), Some(y)) => Some(Arc::new((
                self.tensor_sec(&x.0, &y.0, (n, l), target)?,
                self.tensor_sec(&x.1, &y.1, (n, l), target)?,
            ))),
            (None, None) => None,
            _ => return None,
        };
        Some(CollSection { shape: a.shape.clone(), top, lower })
    }
}

impl GlobularPro for GTaut<'_> {
    type Cell = TCell;

    fn max_obj(&self) -> usize {
        self.max_obj
    }
    fn max_dim(&self) -> usize {
        self.a.glob.max_dim()
    }
    fn hom_type(&self, c: &TCell) -> HomType {
        (c.n, c.m)
    }
    fn arity(&self, c: &TCell) -> TreeCell {
        c.sec.shape.clone()
    }
    fn source(&self, c: &TCell) -> Option<TCell> {
        c.sec.src().map(|s| TCell { n: c.n, m: c.m, sec: s.clone() })
    }
    fn target(&self, c: &TCell) -> Option<TCell> {
        c.sec.tgt().map(|s| TCell { n: c.n, m: c.m, sec: s.clone() })
    }
    fn cells(&self, n: usize, m: usize, d: usize) -> Vec<TCell> {
        let Some(h) = self.homs.get(&(n, m)) else { return Vec::new() };
        let mut out = Vec::new();
        for t in enumerate_trees(d, self.max_nodes) {
            if let Ok(f) = h.fibre(&TreeCell::new(t, d)) {
                out.extend(f.iter().map(|s| TCell { n, m, sec: s.clone() }));
            }
        }
        out
    }
    fn compose(&self, head: &TCell, args: &Pd<TCell>) -> Composite<TCell> {
        let (m, l) = (head.n, head.m);
        let n = args.first_leaf().n;
        if args.labels().iter().any(|c| (c.n, c.m) != (n, m)) {
            return Composite::Undefined;
        }
        let Ok(shape) = mu_shape(&args.map(|c| c.sec.shape.clone())) else { return Composite::Undefined };
        if shape.tree.node_count() > self.max_nodes {
            return Composite::OutOfRange;
        }
        match section_compose(self.hom(n, l).domain_index(), &head.sec, &args.map(|c| c.sec.clone())) {
            Ok(sec) => Composite::Value(TCell { n, m: l, sec }),
            // With no inputs the argument values are forced trees, which
            // may exceed the bound of the head's domain.
            Err(CollError::Undefined(w)) if m == 0 && w == "head" => Composite::OutOfRange,
            Err(_) => Composite::Undefined,
        }
    }
    fn tensor(&self, a: &TCell, b: &TCell) -> Composite<TCell> {
        if a.sec.shape != b.sec.shape {
            return Composite::Undefined;
        }
        let target = (a.n + b.n, a.m + b.m);
        if target.0 > self.max_obj || target.1 > self.max_obj {
            return Composite::OutOfRange;
        }
        match self.tensor_sec(&a.sec, &b.sec, (a.n, b.n), target) {
            Some(sec) => Composite::Value(TCell { n: target.0, m: target.1, sec }),
            None => Composite::Undefined,
        }
    }
    fn ident(&self, n: usize, d: usize) -> TCell {
        TCell { n, m: n, sec: self.hom(n, n).unit_section(d) }
    }
    fn zero(&self, sigma: &TreeCell) -> Option<TCell> {
        let f = self.hom(0, 0).fibre(sigma).ok()?;
        f.first().map(|s| TCell { n: 0, m: 0, sec: s.clone() })
    }
    fn describe(&self, c: &TCell) -> String {
        format!("[{}→{}] over {} ({} values)", c.n, c.m, c.sec.shape, c.sec.top.len())
    }
}

// ---------------------------------------------------------------------------
// Strict algebras

/// Generator tables of an algebra in a strict ω-category: for each generator
/// `g: n → m`, a map from `(dim, n-tuple)` to an `m`-tuple.
pub type Interp = BTreeMap<String, BTreeMap<(usize, Vec<CellRef>), Vec<CellRef>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictAlgebra {
    pub cat: StrictCat,
    pub interp: Interp,
}

impl StrictAlgebra {
    /// Tabulates `f(generator, dim, input)` on every tuple.
    pub fn from_fn(cat: StrictCat, sig: &Signature, f: impl Fn(&str, usize, &[CellRef]) -> Vec<CellRef>) -> Self {
        let mut interp = Interp::new();
        for (g, (n, _)) in sig {
            let pw = Power { base: &cat, n: *n };
            let mut t = BTreeMap::new();
            for d in 0..=cat.max_dim() {
                for (_, x) in pw.cells(d) {
                    let y = f(g, d, &x);
                    t.insert((d, x), y);
                }
            }
            interp.insert(g.clone(), t);
        }
        StrictAlgebra { cat, interp }
    }

    pub fn apply(&self, g: &str, d: usize, x: &[CellRef]) -> Option<&Vec<CellRef>> {
        self.interp.get(g)?.get(&(d, x.to_vec()))
    }

    pub fn to_json(&self) -> Value {
        let name = |c: &CellRef| json!(self.cat.glob.name(*c));
        let interp: serde_json::Map<String, Value> = self
            .interp
            .iter()
            .map(|(g, t)| {
                let rows: Vec<Value> = t
                    .iter()
                    .map(|((d, x), y)| {
                        json!({ "dim": d, "in": x.iter().map(name).collect::<Vec<_>>(), "out": y.iter().map(name).collect::<Vec<_>>() })
                    })
                    .collect();
                (g.clone(), Value::Array(rows))
            })
            .collect();
        json!({ "category": self.cat.to_json(), "interp": interp })
    }

    pub fn from_json(v: &Value) -> Result<Self, CollError> {
        let bad = |m: String| CollError::Json(m);
        let cat = StrictCat::from_json(v.get("category").ok_or_else(|| bad("missing category".into()))?)?;
        let mut interp = Interp::new();
        let gens = v.get("interp").and_then(Value::as_object).ok_or_else(|| bad("missing interp".into()))?;
        for (g, rows) in gens {
            let mut t = BTreeMap::new();
            for r in rows.as_array().ok_or_else(|| bad(format!("interp of `{g}` must be a list")))? {
                let d = r.get("dim").and_then(Value::as_u64).ok_or_else(|| bad(format!("`{g}`: row without dim")))? as usize;
                let cells = |k: &str| -> Result<Vec<CellRef>, CollError> {
                    r.get(k)
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad(format!("`{g}`: row without {k}")))?
                        .iter()
                        .map(|s| {
                            let s = s.as_str().unwrap_or_default();
                            cat.glob.lookup(s).ok_or_else(|| bad(format!("`{g}`: unknown cell `{s}`")))
                        })
                        .collect()
                };
                t.insert((d, cells("in")?), cells("out")?);
            }
            interp.insert(g.clone(), t);
        }
        Ok(StrictAlgebra { cat, interp })
    }
}

/// The action of the globularization on `A`: evaluate the labelling in the
/// power of `A`, then apply the morphism dimensionwise.
pub struct StrictAction<'a, P: Pro> {
    pub gp: &'a Globularized<P>,
    pub alg: &'a StrictAlgebra,
    pub sig: &'a Signature,
}

impl<P: Pro> StrictAction<'_, P> {
    fn apply_expr(&self, e: &ProExpr, d: usize, x: &[CellRef]) -> Result<Vec<CellRef>, String> {
        match e {
            ProExpr::Gen(g) => self.alg.apply(g, d, x).cloned().ok_or_else(|| format!("no value for {g} at {x:?}")),
            ProExpr::Id(_) => Ok(x.to_vec()),
            ProExpr::Comp(g, f) => {
                let y = self.apply_expr(f, d, x)?;
                self.apply_expr(g, d, &y)
            }
            ProExpr::Tensor(a, b) => {
                let (na, _) = a.type_of(self.sig).map_err(|e| e.to_string())?;
                if na > x.len() {
                    return Err(format!("input too short for {e}"));
                }
                let mut y = self.apply_expr(a, d, &x[..na])?;
                y.extend(self.apply_expr(b, d, &x[na..])?);
                Ok(y)
            }
        }
    }

    /// `Ω((φ, σ), κ)` for `κ` a labelling of `σ` by cells of `A^n`.
    pub fn omega(&self, c: &GCell<P::Mor>, kappa: &Pd<(usize, Vec<CellRef>)>) -> Result<(usize, Vec<CellRef>), String> {
        if kappa.shape() != c.shape {
            return Err("labelling does not have the cell's shape".into());
        }
        let n = self.gp.pro.arity(&c.phi);
        let x = eval(&Power { base: &self.alg.cat, n }, kappa)?;
        let e = self.gp.pro.express(&c.phi).ok_or("morphism has no expression")?;
        Ok((x.0, self.apply_expr(&e, x.0, &x.1)?))
    }
}

#[derive(Clone, Debug, Default)]
pub struct StrictReport {
    /// Laws of the strict ω-category, and its action of the terminal operad.
    pub category: Vec<OperadViolation>,
    /// Generators as strict ω-functors `A^n → A^m`.
    pub functor: Vec<OperadViolation>,
    /// Dimensionwise algebras for the PRO, as `(dim, violation)`.
    pub pro_algebra: Vec<(usize, ProViolation)>,
    /// Composition, tensor and unit diagrams of the action.
    pub diagrams: Vec<OperadViolation>,
    /// Restricting the action to `(g, η)` recovers the tables.
    pub round_trip: Vec<OperadViolation>,
    pub checked: usize,
}

impl StrictReport {
    pub fn prechecks_ok(&self) -> bool {
        self.category.is_empty() && self.functor.is_empty() && self.pro_algebra.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.prechecks_ok() && self.diagrams.is_empty() && self.round_trip.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[OperadViolation]| -> Value {
            v.iter().map(|x| json!({ "law": x.law, "witness": x.witness })).collect::<Vec<_>>().into()
        };
        let pa: Vec<Value> =
            self.pro_algebra.iter().map(|(d, v)| json!({ "dim": d, "law": v.law, "witness": v.witness })).collect();
        json!({
            "ok": self.ok(),
            "bounded": true,
            "checked": self.checked,
            "category": list(&self.category),
            "functor": list(&self.functor),
            "proAlgebra": pa,
            "diagrams": list(&self.diagrams),
            "roundTrip": list(&self.round_trip),
        })
    }
}

/// Checks that generator tables make `A` an algebra for the globularization
/// of `P`. Prechecks: `A` is a strict ω-category, each generator is a strict
/// ω-functor, and each dimension is a `P`-algebra. Then the action is
/// checked against composition, tensor and units on sampled diagrams (at
/// most `cap` per hom combination), and restricted back to the generators.
pub fn strict_algebra_check<P: Pro>(
    gp: &Globularized<P>,
    sig: &Signature,
    rules: &[(String, ProExpr, ProExpr)],
    alg: &StrictAlgebra,
    fuel: usize,
    cap: usize,
) -> StrictReport {
    let mut rep = StrictReport::default();
    let cat = &alg.cat;
    let dmax = cat.max_dim().min(gp.max_dim);
    rep.category.extend(cat.validate().into_iter().map(|v| viol(&v.law, v.witness)));
    if rep.category.is_empty() {
        let term = Terminal { max_dim: cat.max_dim(), max_nodes: 3 };
        let a = Collection::degenerate(cat.glob.clone());
        let act = |_: &TreeCell, k: &Pd<CellRef>| eval(cat, k).ok();
        let r = glob_operad_algebra_check(&term, &a, &act, 3, cap);
        rep.category.extend(r.action_route.into_iter().chain(r.hom_route));
    }

    let name = |x: &[CellRef]| x.iter().map(|c| cat.glob.name(*c)).collect::<Vec<_>>().join(",");
    for (g, (n, m)) in sig {
        let pw = Power { base: cat, n: *n };
        let pm = Power { base: cat, n: *m };
        let at = |d: usize, x: &[CellRef]| alg.apply(g, d, x).cloned();
        for d in 0..=cat.max_dim() {
            let cells = pw.cells(d);
            for (_, x) in &cells {
                rep.checked += 1;
                let Some(y) = at(d, x) else {
                    rep.functor.push(viol("total", format!("{g}({})", name(x))));
                    continue;
                };
                if y.len() != *m || y.iter().any(|c| c.dim != d) {
                    rep.functor.push(viol("typing", format!("{g}({})", name(x))));
                    continue;
                }
                if d > 0 {
                    let sx = pw.source(&(d, x.clone())).unwrap().1;
                    let tx = pw.target(&(d, x.clone())).unwrap().1;
                    let sy = pm.source(&(d, y.clone())).unwrap().1;
                    let ty = pm.target(&(d, y.clone())).unwrap().1;
                    if at(d - 1, &sx) != Some(sy) || at(d - 1, &tx) != Some(ty) {
                        rep.functor.push(viol("globular", format!("{g}({})", name(x))));
                    }
                }
                if d < cat.max_dim() {
                    let idx = pw.identity(&(d, x.clone())).ok().map(|c| c.1);
                    let idy = pm.identity(&(d, y.clone())).ok().map(|c| c.1);
                    if idx.and_then(|i| at(d + 1, &i)) != idy {
                        rep.functor.push(viol("identity", format!("{g}(id {})", name(x))));
                    }
                }
                for k in 0..d {
                    for (_, x2) in &cells {
                        let comp = x.iter().zip(x2).all(|(a, b)| cat.composable(*a, *b, k));
                        if !comp {
                            continue;
                        }
                        rep.checked += 1;
                        let lhs = pw.compose(&(d, x.clone()), &(d, x2.clone()), k).ok().and_then(|c| at(d, &c.1));
                        let rhs = at(d, x2).and_then(|y2| pm.compose(&(d, y.clone()), &(d, y2), k).ok()).map(|c| c.1);
                        if lhs.is_none() || lhs != rhs {
                            rep.functor.push(viol("composition", format!("{g}({} ∘_{k} {})", name(x), name(x2))));
                        }
                    }
                }
            }
        }
    }
    if !rep.functor.is_empty() {
        return rep;
    }

    for d in 0..=dmax {
        let cells: Vec<CellRef> = cat.glob.cells(d).collect();
        let k = cells.len();
        let pos: BTreeMap<CellRef, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut funcs = BTreeMap::new();
        for (g, (n, m)) in sig {
            let f = Func::from_fn(k, *n, *m, |xs| {
                let x: Vec<CellRef> = xs.iter().map(|i| cells[*i]).collect();
                alg.apply(g, d, &x).map(|y| y.iter().map(|c| pos[c]).collect()).unwrap_or_default()
            });
            funcs.insert(g.clone(), f);
        }
        match pro_algebra_check(&gp.pro, rules, k, &funcs, gp.max_obj, fuel) {
            Ok(r) => {
                rep.checked += r.checked;
                rep.pro_algebra.extend(r.violations.into_iter().map(|v| (d, v)));
            }
            Err(e) => rep.pro_algebra.push((d, ProViolation { law: "enumeration".into(), witness: e.to_string() })),
        }
    }

    let omega = StrictAction { gp, alg, sig };
    let powers: Vec<Power> = (0..=gp.max_obj).map(|n| Power { base: cat, n }).collect();
    let indices: Vec<LabelIndex<(usize, Vec<CellRef>)>> = powers
        .iter()
        .map(|pw| LabelIndex::new(pw, (0..=dmax).flat_map(|d| pw.cells(d))))
        .collect();
    let mut rng = StdRng::seed_from_u64(11);
    let view = |n, m| HomView { p: gp, n, m };
    let show = |c: &GCell<P::Mor>| gp.describe(c);

    for (n, m) in hom_types(gp.max_obj) {
        for l in 0..=gp.max_obj {
            let (top, bottom) = (view(m, l), view(n, m));
            let sq = Square::new(&top, &bottom);
            for d in 0..=dmax {
                for (c, phi) in sq.bounded_cells(d, cap, 12) {
                    let Some(h) = value(gp.compose(&c, &phi)) else { continue };
                    for kappa in bounded_labellings(&indices[n], &h.shape, 3, &mut rng) {
                        rep.checked += 1;
                        let lhs = omega.omega(&h, &kappa);
                        let rhs = alpha(&((c.clone(), phi.clone()), kappa.clone()), |x| x.shape.clone())
                            .map_err(|e| e.to_string())
                            .and_then(|(_, nested)| {
                                let mids = nested.try_map(|(b, piece)| omega.omega(b, piece))?;
                                omega.omega(&c, &mids)
                            });
                        if lhs.is_err() || lhs != rhs {
                            rep.diagrams.push(viol("composition", format!("{} ∘ {phi:?} at {kappa:?}", show(&c))));
                        }
                    }
                }
            }
        }
    }
    for (n, m) in hom_types(gp.max_obj) {
        for (l, k) in hom_types(gp.max_obj) {
            if n + l > gp.max_obj || m + k > gp.max_obj {
                continue;
            }
            for d in 0..=dmax {
                let mut seen = 0;
                for a in gp.cells(n, m, d) {
                    for b in gp.cells(l, k, d).into_iter().filter(|b| b.shape == a.shape) {
                        if seen >= cap {
                            break;
                        }
                        seen += 1;
                        let Some(ab) = value(gp.tensor(&a, &b)) else { continue };
                        for kappa in bounded_labellings(&indices[n + l], &a.shape, 2, &mut rng) {
                            rep.checked += 1;
                            let lhs = omega.omega(&ab, &kappa);
                            let k1 = kappa.map(|(d, x)| (*d, x[..n].to_vec()));
                            let k2 = kappa.map(|(d, x)| (*d, x[n..].to_vec()));
                            let rhs = omega.omega(&a, &k1).and_then(|(d, mut y)| {
                                y.extend(omega.omega(&b, &k2)?.1);
                                Ok((d, y))
                            });
                            if lhs.is_err() || lhs != rhs {
                                rep.diagrams.push(viol("tensor", format!("{} + {} at {kappa:?}", show(&a), show(&b))));
                            }
                        }
                    }
                }
            }
        }
    }
    for n in 0..=gp.max_obj {
        for d in 0..=dmax {
            for x in powers[n].cells(d) {
                rep.checked += 1;
                if omega.omega(&gp.ident(n, d), &Pd::eta(&powers[n], &x)).as_ref() != Ok(&x) {
                    rep.diagrams.push(viol("unit", format!("j_{n} at {}", name(&x.1))));
                }
            }
        }
    }

    for (g, (n, _)) in sig {
        let Some(phi) = gp.pro.generator(g) else {
            rep.round_trip.push(viol("generator", g.clone()));
            continue;
        };
        if *n > gp.max_obj {
            continue;
        }
        for d in 0..=dmax {
            let c = GCell { phi: phi.clone(), shape: TreeCell::eta(d) };
            for x in powers[*n].cells(d) {
                rep.checked += 1;
                let got = omega.omega(&c, &Pd::eta(&powers[*n], &x)).ok().map(|y| y.1);
                if got.as_ref() != alg.apply(g, d, &x.1) {
                    rep.round_trip.push(viol("restriction", format!("{g}({})", name(&x.1))));
                }
            }
        }
    }
    rep
}

/// `strict_algebra_check` with the signature and rules of a theory.
pub fn check_theory_algebra(gp: &Globularized<TheoryPro>, alg: &StrictAlgebra, fuel: usize, cap: usize) -> StrictReport {
    let pres = gp.pro.presentation().clone();
    strict_algebra_check(gp, &pres.generators, &pres.rules, alg, fuel, cap)
}

/// The discrete strict 1-category on `ℤ/k` with addition as the monoid:
/// objects `0, …, k-1` and only identity arrows.
pub fn cyclic_discrete_monoid(k: usize) -> StrictAlgebra {
    let mut g = GlobularSet::new(1);
    for x in 0..k {
        g.add0(&x.to_string()).unwrap();
    }
    for x in 0..k {
        g.add(1, &format!("i{x}"), &x.to_string(), &x.to_string()).unwrap();
    }
    let mut b = crate::strict::StrictBuilder::new(g.clone());
    for x in 0..k {
        let (o, i) = (g.lookup(&x.to_string()).unwrap(), g.lookup(&format!("i{x}")).unwrap());
        b.identity.insert(o, i);
        b.compose.insert((i, i, 0), i);
    }
    let cat = b.finish();
    let sig: Signature = [("m".to_string(), (2, 1)), ("e".to_string(), (0, 1))].into_iter().collect();
    let glob = cat.glob.clone();
    StrictAlgebra::from_fn(cat, &sig, move |gen, d, x| {
        let val = |c: &CellRef| glob.name(*c).trim_start_matches('i').parse::<usize>().unwrap();
        let s = if gen == "m" { x.iter().map(val).sum::<usize>() % k } else { 0 };
        let nm = if d == 0 { s.to_string() } else { format!("i{s}") };
        vec![glob.lookup(&nm).unwrap()]
    })
}

/// The groupoid with objects `0, 1` and arrows `ix, sx` on each, as a
/// strict monoidal category under xor of objects and of swap bits.
pub fn z2_xor_monoid() -> StrictAlgebra {
    let cat = crate::strict::z2_groupoid();
    let glob = cat.glob.clone();
    let sig: Signature = [("m".to_string(), (2, 1)), ("e".to_string(), (0, 1))].into_iter().collect();
    StrictAlgebra::from_fn(cat, &sig, move |gen, d, x| {
        let bits = |c: &CellRef| {
            let s = glob.name(*c);
            match d {
                0 => (s == "1", false),
                _ => (s.ends_with('1'), s.starts_with('s')),
            }
        };
        let (o, s) = if gen == "m" { x.iter().map(bits).fold((false, false), |a, b| (a.0 ^ b.0, a.1 ^ b.1)) } else { (false, false) };
        let nm = match d {
            0 => format!("{}", o as u8),
            _ => format!("{}{}", if s { "s" } else { "i" }, o as u8),
        };
        vec![glob.lookup(&nm).unwrap()]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pros::ProPresentation;

    fn t(s: &str, d: usize) -> TreeCell {
        TreeCell::new(s.parse().unwrap(), d)
    }

    fn monoid(max_obj: usize, max_dim: usize, max_nodes: usize) -> Globularized<TheoryPro> {
        let pro = TheoryPro::new(ProPresentation::monoid(), 10_000).unwrap();
        Globularized::new(pro, max_obj, max_dim, max_nodes, 10_000).unwrap()
    }

    fn arrow() -> Collection {
        let mut g = GlobularSet::new(1);
        g.add0("p").unwrap();
        g.add0("q").unwrap();
        g.add(1, "f", "p", "q").unwrap();
        Collection::degenerate(g)
    }

    fn endo() -> Collection {
        let mut g = GlobularSet::new(1);
        g.add0("*").unwrap();
        g.add(1, "b", "*", "*").unwrap();
        Collection::degenerate(g)
    }

    #[test]
    fn membership_and_composition_formula() {
        let gp = monoid(3, 2, 4);
        let m = gp.pro.generator("m").unwrap();
        let c3 = GCell { phi: m.clone(), shape: t("[[],[],[]]", 1) };
        assert!(gp.contains(&c3));
        assert_eq!(gp.hom_type(&c3), (2, 1));
        assert!(!gp.contains(&GCell { phi: m.clone(), shape: t("[[],[],[],[],[]]", 1) }));

        let f = gp.pro.tensor(&m, &gp.pro.id(1)).unwrap();
        let head = GCell { phi: m.clone(), shape: t("[[],[]]", 1) };
        let e1 = GCell { phi: f.clone(), shape: t("[[],[]]", 1) };
        let e2 = GCell { phi: f.clone(), shape: t("[[]]", 1) };
        let v = HomView { p: &gp, n: 3, m: 2 };
        let mut args = Pd::eta(&v, &e1);
        let second = Pd::eta(&v, &e2);
        args = Pd::compose(&args, &second, 0).unwrap();
        let Composite::Value(r) = gp.compose(&head, &args) else { panic!("composite") };
        assert_eq!(r.shape, t("[[],[],[]]", 1));
        assert_eq!(r.phi, gp.pro.compose(&m, &f).unwrap());
        assert_eq!(gp.ident(1, 1), GCell { phi: gp.pro.id(1), shape: TreeCell::eta(1) });
    }

    #[test]
    fn globularized_monoid_is_valid() {
        let gp = monoid(3, 1, 4);
        let rep = globpro_validate(&gp, 60);
        assert!(rep.ok(), "{:?}", &rep.violations[..rep.violations.len().min(5)]);
        assert!(rep.checked["composition-associativity"] > 0);
        assert!(rep.checked["tensor-functoriality"] > 0);
    }

    #[test]
    fn gtaut_is_valid() {
        let a = arrow();
        let g = GTaut::new(&a, 1, 3, 100_000).unwrap();
        let rep = globpro_validate(&g, 30);
        assert!(rep.ok(), "{:?}", &rep.violations[..rep.violations.len().min(5)]);
        let b = endo();
        let g = GTaut::new(&b, 2, 3, 100_000).unwrap();
        let rep = globpro_validate(&g, 20);
        assert!(rep.ok(), "{:?}", &rep.violations[..rep.violations.len().min(5)]);
        assert!(rep.checked["tensor-functoriality"] > 0);
        assert!(rep.checked["composition-associativity"] > 0);
    }

    /// Tensor that swaps its factors breaks the functoriality diagram.
    struct Swapped(Globularized<TheoryPro>);

    impl GlobularPro for Swapped {
        type Cell = GCell<crate::pros::TheoryMor>;
        fn max_obj(&self) -> usize {
            self.0.max_obj()
        }
        fn max_dim(&self) -> usize {
            self.0.max_dim()
        }
        fn hom_type(&self, c: &Self::Cell) -> HomType {
            self.0.hom_type(c)
        }
        fn arity(&self, c: &Self::Cell) -> TreeCell {
            self.0.arity(c)
        }
        fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
            self.0.source(c)
        }
        fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
            self.0.target(c)
        }
        fn cells(&self, n: usize, m: usize, d: usize) -> Vec<Self::Cell> {
            self.0.cells(n, m, d)
        }
        fn compose(&self, h: &Self::Cell, a: &Pd<Self::Cell>) -> Composite<Self::Cell> {
            self.0.compose(h, a)
        }
        fn tensor(&self, a: &Self::Cell, b: &Self::Cell) -> Composite<Self::Cell> {
            if a.shape.tree.node_count() > 1 {
                self.0.tensor(b, a)
            } else {
                self.0.tensor(a, b)
            }
        }
        fn ident(&self, n: usize, d: usize) -> Self::Cell {
            self.0.ident(n, d)
        }
        fn zero(&self, s: &TreeCell) -> Option<Self::Cell> {
            self.0.zero(s)
        }
    }

    #[test]
    fn broken_tensor_is_caught() {
        let rep = globpro_validate(&Swapped(monoid(2, 1, 3)), 40);
        let laws: std::collections::BTreeSet<&str> = rep.violations.iter().map(|v| v.law.as_str()).collect();
        assert!(laws.contains("tensor-functoriality"), "{laws:?}");
    }

    #[test]
    fn oplus_with_unit_and_free_monoidal() {
        let mut g = NCollGraph::empty(2, 1);
        g.homs.insert((1, 1), endo());
        g.homs.insert((2, 1), arrow());
        assert!(g.validate().is_empty());
        let j = jay(2, 1, 3).unwrap();
        let gj = graph_oplus(&g, &j).unwrap();
        assert_eq!(gj.cell_counts(), g.cell_counts());
        let jg = graph_oplus(&j, &g).unwrap();
        assert_eq!(jg.cell_counts(), g.cell_counts());
        let f = FreeMonoidal { g: &g, max_len: 3, max_nodes: 3 };
        assert!(f.check(2000).is_empty());
        let fg = f.to_graph().unwrap();
        assert!(fg.validate().is_empty());
        // (2, 2): words endo+endo, each of dim 0 or dim 1 of one arity.
        assert_eq!(fg.hom(2, 2).glob.count(0), 1);
        assert_eq!(fg.hom(2, 2).glob.count(1), 1);
        assert_eq!(NCollGraph::from_json(&fg.to_json()).unwrap(), fg);
    }

    #[test]
    fn free_category_counts_and_laws() {
        let mut g = NCollGraph::empty(0, 1);
        g.homs.insert((0, 0), arrow());
        let f = FreeCat::new(&g, 3);
        assert!(f.check(40).is_empty());
        // Powers X, X□X, X□X□X of a degenerate collection, plus the identity.
        let x = arrow();
        let s2 = Square::new(&x, &x);
        let s3 = Square::new(&x, &s2);
        for d in 0..=1 {
            let expect = 1 + x.cells(d).len() + s2.cells(d).len() + s3.cells(d).len();
            assert_eq!(f.hom_cells(0, 0, d).len(), expect);
        }
    }

    #[test]
    fn strict_algebra_examples() {
        let gp = monoid(3, 1, 3);
        let rep = check_theory_algebra(&gp, &cyclic_discrete_monoid(3), 10_000, 40);
        assert!(rep.ok(), "{}", rep.to_json());
        let z2 = z2_xor_monoid();
        let rep = check_theory_algebra(&gp, &z2, 10_000, 40);
        assert!(rep.ok(), "{}", rep.to_json());
        assert!(rep.checked > 0);

        let mut bad = z2.clone();
        let c = |s: &str| bad.cat.glob.lookup(s).unwrap();
        let key = (1, vec![c("s0"), c("s0")]);
        let i0 = c("i0");
        let s0 = c("s0");
        assert_eq!(bad.interp["m"][&key], vec![i0]);
        bad.interp.get_mut("m").unwrap().insert(key, vec![s0]);
        let rep = check_theory_algebra(&gp, &bad, 10_000, 40);
        assert!(!rep.functor.is_empty());
        assert!(!rep.ok());
        assert_eq!(StrictAlgebra::from_json(&z2.to_json()).unwrap(), z2);
    }
}

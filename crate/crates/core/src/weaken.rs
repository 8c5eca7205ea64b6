//! Weakening: free contractions on globular sets, and the weak globular
//! PRO of a PRO, generated by lifts, identities, units, composites and
//! tensors over its globularization.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::globpro::{GCell, GlobularPro, Globularized, HomType};
use crate::globset::{CellRef, GlobError, GlobMap, GlobularSet, Globe};
use crate::grdops::Composite;
use crate::pasting::{enumerate_trees, labellings, mu_shape, mu_split, LabelIndex, Pd, PdNode, Side, TreeCell};
use crate::pros::{Layer, Layered, Pro, ProError, ProExpr};

// ---------------------------------------------------------------------------
// Contractions on finite globular sets

/// Ordered pairs of parallel `(d-1)`-cells of `x` over the boundary of the
/// `d`-cell `nu` of `y`.
pub fn par_over(x: &GlobularSet, y: &GlobularSet, f: &GlobMap, nu: CellRef) -> Vec<(CellRef, CellRef)> {
    if nu.dim == 0 || nu.dim - 1 > x.max_dim() {
        return Vec::new();
    }
    let (Some(s), Some(t)) = (y.src_of(nu), y.tgt_of(nu)) else { return Vec::new() };
    let lower: Vec<CellRef> = x.cells(nu.dim - 1).collect();
    let mut out = Vec::new();
    for &a in lower.iter().filter(|a| f.apply(**a) == s) {
        for &b in lower.iter().filter(|b| f.apply(**b) == t) {
            if nu.dim == 1 || (x.src_of(a) == x.src_of(b) && x.tgt_of(a) == x.tgt_of(b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// A contraction on `f: X -> Y`: a chosen preimage of every 0-cell, and a
/// chosen lift `κ` with `s(κ) = ρ⁻`, `t(κ) = ρ⁺`, `f(κ) = ν` for every cell
/// `ν` and pair `(ρ⁻, ρ⁺)` over its boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Contraction {
    pub zero: BTreeMap<CellRef, CellRef>,
    pub lifts: BTreeMap<(CellRef, CellRef, CellRef), CellRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionViolation {
    pub relation: String,
    pub witness: String,
}

fn cv(relation: &str, witness: String) -> ContractionViolation {
    ContractionViolation { relation: relation.to_string(), witness }
}

pub fn check_contraction(
    x: &GlobularSet,
    y: &GlobularSet,
    f: &GlobMap,
    c: &Contraction,
    max_dim: usize,
) -> Vec<ContractionViolation> {
    let mut out = Vec::new();
    for (&nu, &k) in &c.zero {
        if k.dim != 0 || k.idx >= x.count(0) || f.apply(k) != nu {
            out.push(cv("image", y.name(nu).to_string()));
        }
    }
    for (&(nu, lo, hi), &k) in &c.lifts {
        let w = format!("{} over ({}, {})", y.name(nu), x.name(lo), x.name(hi));
        if k.dim != nu.dim || k.dim > x.max_dim() || k.idx >= x.count(k.dim) {
            out.push(cv("image", w));
            continue;
        }
        if x.src_of(k) != Some(lo) {
            out.push(cv("source", w.clone()));
        }
        if x.tgt_of(k) != Some(hi) {
            out.push(cv("target", w.clone()));
        }
        if f.apply(k) != nu {
            out.push(cv("image", w));
        }
    }
    for nu in y.cells(0) {
        if !c.zero.contains_key(&nu) {
            out.push(cv("missing", y.name(nu).to_string()));
        }
    }
    for d in 1..=max_dim.min(y.max_dim()) {
        for nu in y.cells(d) {
            for (lo, hi) in par_over(x, y, f, nu) {
                if !c.lifts.contains_key(&(nu, lo, hi)) {
                    out.push(cv("missing", format!("{} over ({}, {})", y.name(nu), x.name(lo), x.name(hi))));
                }
            }
        }
    }
    out
}

/// Whether every cell of `y` up to `max_dim` lifts against every pair over
/// its boundary. 0-cells need a preimage. On failure returns the cell and
/// the pair without a lift.
pub fn is_leinster_fibration(
    x: &GlobularSet,
    y: &GlobularSet,
    f: &GlobMap,
    max_dim: usize,
) -> Result<(), (CellRef, Option<(CellRef, CellRef)>)> {
    for nu in y.cells(0) {
        if !x.cells(0).any(|k| f.apply(k) == nu) {
            return Err((nu, None));
        }
    }
    for d in 1..=max_dim.min(y.max_dim()) {
        for nu in y.cells(d) {
            for (lo, hi) in par_over(x, y, f, nu) {
                let found = d <= x.max_dim()
                    && x.cells(d).any(|k| f.apply(k) == nu && x.src_of(k) == Some(lo) && x.tgt_of(k) == Some(hi));
                if !found {
                    return Err((nu, Some((lo, hi))));
                }
            }
        }
    }
    Ok(())
}

/// Freely adjoins lifts to `f: X -> Y` for the cells of `y` admitted by
/// `filter`, dimension by dimension up to `max_dim`. 0-cells in
/// `designated` reuse the given preimage.
pub fn free_contraction(
    x: &GlobularSet,
    y: &GlobularSet,
    f: &GlobMap,
    max_dim: usize,
    filter: &dyn Fn(CellRef) -> bool,
    designated: &BTreeMap<CellRef, CellRef>,
) -> Result<(GlobularSet, GlobMap, Contraction), GlobError> {
    let top = max_dim.min(y.max_dim());
    let mut x2 = GlobularSet::new(top.max(x.max_dim()));
    let mut images: Vec<Vec<usize>> = vec![Vec::new(); x2.max_dim() + 1];
    for d in 0..=x.max_dim() {
        for c in x.cells(d) {
            let bd = x.src_of(c).zip(x.tgt_of(c));
            x2.add_cell(d, x.name(c), bd)?;
            images[d].push(f.apply(c).idx);
        }
    }
    let mut c = Contraction::default();
    for nu in y.cells(0).filter(|nu| filter(*nu)) {
        let k = match designated.get(&nu) {
            Some(&k) => k,
            None => {
                let k = x2.add_cell(0, &format!("κ[{}]", y.name(nu)), None)?;
                images[0].push(nu.idx);
                k
            }
        };
        c.zero.insert(nu, k);
    }
    for d in 1..=top {
        for nu in y.cells(d).filter(|nu| filter(*nu)) {
            let g = GlobMap { images: images.clone() };
            for (lo, hi) in par_over(&x2, y, &g, nu) {
                let name = format!("κ[{}|{}|{}]", y.name(nu), x2.name(lo), x2.name(hi));
                let k = x2.add_cell(d, &name, Some((lo, hi)))?;
                images[d].push(nu.idx);
                c.lifts.insert((nu, lo, hi), k);
            }
        }
    }
    Ok((x2, GlobMap { images }, c))
}

// ---------------------------------------------------------------------------
// The weak globular PRO of a PRO

#[derive(Debug, Error)]
pub enum WeakError {
    #[error(transparent)]
    Pro(#[from] ProError),
    #[error("bad weakening bounds: {0}")]
    Bounds(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeakBounds {
    pub max_dim: usize,
    pub max_tree_nodes: usize,
    pub max_expr_size: usize,
    pub hom_in: usize,
    pub hom_out: usize,
}

impl Default for WeakBounds {
    fn default() -> Self {
        WeakBounds { max_dim: 1, max_tree_nodes: 2, max_expr_size: 4, hom_in: 3, hom_out: 2 }
    }
}

impl WeakBounds {
    pub fn to_json(&self) -> Value {
        json!({
            "maxDim": self.max_dim,
            "maxTreeNodes": self.max_tree_nodes,
            "maxExprSize": self.max_expr_size,
            "homBound": [self.hom_in, self.hom_out],
        })
    }
}

pub type NodeId = usize;

/// Normal forms of weak cells. Dimension-0 cells are layered words in the
/// lifted morphisms; above that, tensors are flat lists without units and
/// composites have heads that are neither identities, composites nor
/// splittable tensors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Nf<M> {
    D0(Layered<M>),
    Lift { nu: GCell<M>, lo: NodeId, hi: NodeId },
    Ident(usize, usize),
    Unit(TreeCell),
    Tens(Vec<NodeId>),
    Comp(NodeId, Pd<NodeId>),
}

#[derive(Clone, Debug)]
struct Info<M> {
    ty: HomType,
    dim: usize,
    image: GCell<M>,
    src: Option<NodeId>,
    tgt: Option<NodeId>,
}

struct Nodes<'a, M>(&'a [Info<M>]);

impl<M> Globe for Nodes<'_, M> {
    type Cell = NodeId;

    fn cell_dim(&self, c: &NodeId) -> usize {
        self.0[*c].dim
    }
    fn source(&self, c: &NodeId) -> Option<NodeId> {
        self.0[*c].src
    }
    fn target(&self, c: &NodeId) -> Option<NodeId> {
        self.0[*c].tgt
    }
}

/// How a cell was first derived. Indices refer to other cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakKind<M> {
    Lift0(M),
    Lift { lo: usize, hi: usize },
    Ident,
    Unit,
    Tens(usize, usize),
    Comp { head: usize, args: Pd<usize> },
}

#[derive(Clone, Debug)]
pub struct WeakCell<M> {
    pub node: NodeId,
    pub ty: HomType,
    pub dim: usize,
    pub image: GCell<M>,
    pub src: Option<usize>,
    pub tgt: Option<usize>,
    pub size: usize,
    pub kind: WeakKind<M>,
}

pub struct WeakTheory<P: Pro> {
    pub gp: Globularized<P>,
    pub bounds: WeakBounds,
    nodes: Vec<Nf<P::Mor>>,
    info: Vec<Info<P::Mor>>,
    index: HashMap<Nf<P::Mor>, NodeId>,
    cells: Vec<WeakCell<P::Mor>>,
    cell_of: HashMap<NodeId, usize>,
    rng: Option<StdRng>,
}

fn top_labels<C: Clone>(pd: &Pd<C>) -> Vec<C> {
    fn go<C: Clone>(n: &PdNode<C>, out: &mut Vec<C>) {
        if n.children.is_empty() {
            out.push(n.gaps[0].clone());
        }
        for c in &n.children {
            go(c, out);
        }
    }
    let mut out = Vec::new();
    go(&pd.root, &mut out);
    out
}

/// Splits a layered word along its output into pieces of the given
/// coarities, if no layer straddles a cut.
fn split_layered<M: Clone + Ord + std::hash::Hash + std::fmt::Debug>(
    l: &Layered<M>,
    outs: &[usize],
) -> Option<Vec<Layered<M>>> {
    if outs.is_empty() || outs.iter().sum::<usize>() != l.coarity() {
        return None;
    }
    let k = outs.len();
    let mut cuts: Vec<usize> = outs[..k - 1]
        .iter()
        .scan(0, |acc, o| {
            *acc += o;
            Some(*acc)
        })
        .collect();
    let mut per: Vec<Vec<Layer<M>>> = vec![Vec::new(); k];
    for layer in l.layers.iter().rev() {
        let (o, a, b) = (layer.offset, layer.arity, layer.coarity);
        if cuts.iter().any(|&c| c > o && c < o + b) {
            return None;
        }
        let g = cuts.iter().filter(|&&c| c <= o).count();
        let start = if g == 0 { 0 } else { cuts[g - 1] };
        per[g].push(Layer { offset: o - start, ..layer.clone() });
        for c in cuts.iter_mut() {
            if *c > o {
                *c = *c + a - b;
            }
        }
    }
    let mut bounds = vec![0];
    bounds.extend(cuts.iter().copied());
    bounds.push(l.width);
    let mut out = Vec::new();
    for (i, mut layers) in per.into_iter().enumerate() {
        layers.reverse();
        if bounds[i + 1] < bounds[i] {
            return None;
        }
        out.push(Layered { width: bounds[i + 1] - bounds[i], layers });
    }
    Some(out)
}

impl<P: Pro> WeakTheory<P> {
    /// Presented theories enumerate their homs over words of at most
    /// `max_expr_size` layers.
    pub fn new(pro: P, bounds: WeakBounds) -> Result<Self, WeakError> {
        if bounds.max_expr_size == 0 {
            return Err(WeakError::Bounds("expression size must be at least 1".into()));
        }
        let max_obj = bounds.hom_in.max(bounds.hom_out);
        let gp = Globularized::new(pro, max_obj, bounds.max_dim, bounds.max_tree_nodes, bounds.max_expr_size)?;
        Ok(WeakTheory {
            gp,
            bounds,
            nodes: Vec::new(),
            info: Vec::new(),
            index: HashMap::new(),
            cells: Vec::new(),
            cell_of: HashMap::new(),
            rng: None,
        })
    }

    /// Randomizes the order in which work is done. The generated cells do
    /// not depend on it.
    pub fn with_shuffle(mut self, seed: u64) -> Self {
        self.rng = Some(StdRng::seed_from_u64(seed));
        self
    }

    fn shuffle<T>(&mut self, v: &mut [T]) {
        if let Some(r) = self.rng.as_mut() {
            v.shuffle(r);
        }
    }

    fn intern(&mut self, nf: Nf<P::Mor>, info: Info<P::Mor>) -> NodeId {
        let id = self.nodes.len();
        self.index.insert(nf.clone(), id);
        self.nodes.push(nf);
        self.info.push(info);
        id
    }

    fn eval_layered(&self, l: &Layered<P::Mor>) -> Option<P::Mor> {
        let p = &self.gp.pro;
        let mut acc = p.id(l.width);
        let mut w = l.width;
        for layer in &l.layers {
            let right = w.checked_sub(layer.offset + layer.arity)?;
            let mid = p.tensor(&p.tensor(&p.id(layer.offset), &layer.gen).ok()?, &p.id(right)).ok()?;
            acc = p.compose(&mid, &acc).ok()?;
            w = w - layer.arity + layer.coarity;
        }
        Some(acc)
    }

    /// The dimension-0 node of a layered word in morphisms.
    pub fn dim0_node(&mut self, l: &Layered<P::Mor>) -> Option<NodeId> {
        let c = l.canonical().ok()?;
        let key = Nf::D0(c.clone());
        if let Some(&id) = self.index.get(&key) {
            return Some(id);
        }
        let phi = self.eval_layered(&c)?;
        let ty = (c.arity(), c.coarity());
        Some(self.intern(key, Info { ty, dim: 0, image: GCell { phi, shape: TreeCell::eta(0) }, src: None, tgt: None }))
    }

    pub fn ident_node(&mut self, n: usize, d: usize) -> NodeId {
        if d == 0 {
            return self.dim0_node(&Layered::id(n)).expect("identities evaluate");
        }
        let key = Nf::Ident(n, d);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let src = self.ident_node(n, d - 1);
        let image = self.gp.ident(n, d);
        self.intern(key, Info { ty: (n, n), dim: d, image, src: Some(src), tgt: Some(src) })
    }

    pub fn unit_node(&mut self, sigma: &TreeCell) -> NodeId {
        if *sigma == TreeCell::eta(sigma.dim) {
            return self.ident_node(0, sigma.dim);
        }
        let key = Nf::Unit(sigma.clone());
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let src = self.unit_node(&sigma.boundary().expect("non-unit trees have positive dimension"));
        let image = GCell { phi: self.gp.pro.id(0), shape: sigma.clone() };
        self.intern(key, Info { ty: (0, 0), dim: sigma.dim, image, src: Some(src), tgt: Some(src) })
    }

    fn lift_node(&mut self, nu: GCell<P::Mor>, lo: NodeId, hi: NodeId) -> NodeId {
        let key = Nf::Lift { nu: nu.clone(), lo, hi };
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let ty = self.gp.hom_type(&nu);
        let dim = nu.shape.dim;
        self.intern(key, Info { ty, dim, image: nu, src: Some(lo), tgt: Some(hi) })
    }

    fn is_unit(&self, n: NodeId) -> bool {
        match &self.nodes[n] {
            Nf::Ident(0, _) | Nf::Unit(_) => true,
            Nf::D0(l) => l.width == 0 && l.layers.is_empty(),
            _ => false,
        }
    }

    fn fold_tens(&mut self, xs: &[NodeId]) -> Option<NodeId> {
        let (&first, rest) = xs.split_first()?;
        let mut acc = first;
        for &x in rest {
            acc = self.tensor_nodes(acc, x)?;
        }
        Some(acc)
    }

    pub fn tensor_nodes(&mut self, a: NodeId, b: NodeId) -> Option<NodeId> {
        let (ia, ib) = (&self.info[a], &self.info[b]);
        if ia.dim != ib.dim || ia.image.shape != ib.image.shape {
            return None;
        }
        let shape = ia.image.shape.clone();
        if ia.dim == 0 {
            let (Nf::D0(la), Nf::D0(lb)) = (&self.nodes[a], &self.nodes[b]) else { return None };
            let l = Layered::tensor(la, lb);
            return self.dim0_node(&l);
        }
        let mut fs = Vec::new();
        for x in [a, b] {
            match &self.nodes[x] {
                Nf::Tens(v) => fs.extend(v.iter().copied()),
                _ => fs.push(x),
            }
        }
        self.tens_list(fs, &shape)
    }

    fn tens_list(&mut self, fs: Vec<NodeId>, shape: &TreeCell) -> Option<NodeId> {
        let d = shape.dim;
        let mut out: Vec<NodeId> = Vec::new();
        for f in fs {
            if self.is_unit(f) {
                continue;
            }
            if let Nf::Ident(q, _) = self.nodes[f] {
                if let Some(&last) = out.last() {
                    if let Nf::Ident(p, _) = self.nodes[last] {
                        out.pop();
                        let merged = self.ident_node(p + q, d);
                        out.push(merged);
                        continue;
                    }
                }
            }
            out.push(f);
        }
        match out.len() {
            0 => return Some(self.unit_node(shape)),
            1 => return Some(out[0]),
            _ => {}
        }
        let key = Nf::Tens(out.clone());
        if let Some(&id) = self.index.get(&key) {
            return Some(id);
        }
        let mut image = self.info[out[0]].image.clone();
        let mut ty = self.info[out[0]].ty;
        for &f in &out[1..] {
            let inf = &self.info[f];
            image = match self.gp.tensor(&image, &inf.image) {
                Composite::Value(c) => c,
                _ => return None,
            };
            ty = (ty.0 + inf.ty.0, ty.1 + inf.ty.1);
        }
        let srcs: Option<Vec<NodeId>> = out.iter().map(|f| self.info[*f].src).collect();
        let tgts: Option<Vec<NodeId>> = out.iter().map(|f| self.info[*f].tgt).collect();
        let src = self.fold_tens(&srcs?)?;
        let tgt = self.fold_tens(&tgts?)?;
        Some(self.intern(key, Info { ty, dim: d, image, src: Some(src), tgt: Some(tgt) }))
    }

    /// `h` applied to the labelled diagram `args`, in normal form.
    pub fn compose_nodes(&mut self, h: NodeId, args: &Pd<NodeId>) -> Option<NodeId> {
        let ih = self.info[h].clone();
        if args.shape() != ih.image.shape {
            return None;
        }
        let labels = args.labels();
        let t0 = self.info[labels[0]].ty;
        if t0.1 != ih.ty.0 || labels.iter().any(|x| self.info[*x].ty != t0) {
            return None;
        }
        if ih.dim == 0 {
            let (Nf::D0(lh), Nf::D0(lx)) = (&self.nodes[h], &self.nodes[*args.first_leaf()]) else { return None };
            let l = Layered::then(lx, lh)?;
            return self.dim0_node(&l);
        }
        if let Nf::Ident(..) = self.nodes[h] {
            return Some(*args.first_leaf());
        }
        let lh = args.labels_with_height();
        if lh.iter().all(|(k, x)| self.nodes[*x] == Nf::Ident(t0.0, *k) || (*k == 0 && self.is_ident0(*x, t0.0))) {
            return Some(h);
        }
        if self.is_unit(h) && labels.iter().all(|x| self.is_unit(*x)) {
            let shapes = args.map(|x| self.info[*x].image.shape.clone());
            let s = mu_shape(&shapes).ok()?;
            if s.tree.node_count() > self.bounds.max_tree_nodes {
                return None;
            }
            return Some(self.unit_node(&s));
        }
        match self.nodes[h].clone() {
            Nf::Comp(h2, phi) => {
                let shapes = phi.map(|x| self.info[*x].image.shape.clone());
                let split = mu_split(&shapes, args).ok()?;
                let pairs = phi.zip(&split)?;
                let mut vals = Vec::new();
                for (b, piece) in pairs.labels() {
                    vals.push(self.compose_nodes(b, &piece)?);
                }
                let mut it = vals.into_iter();
                let new_args = phi.map(|_| it.next().unwrap());
                return self.compose_nodes(h2, &new_args);
            }
            Nf::Tens(fs) => {
                if let Some(r) = self.split_comp(&fs, args) {
                    return Some(r);
                }
            }
            _ => {}
        }
        self.comp_node(h, args)
    }

    fn is_ident0(&self, x: NodeId, n: usize) -> bool {
        matches!(&self.nodes[x], Nf::D0(l) if l.width == n && l.layers.is_empty())
    }

    fn comp_node(&mut self, h: NodeId, args: &Pd<NodeId>) -> Option<NodeId> {
        if self.info[h].dim == 0 {
            return self.compose_nodes(h, args);
        }
        let key = Nf::Comp(h, args.clone());
        if let Some(&id) = self.index.get(&key) {
            return Some(id);
        }
        args.validate(&Nodes(&self.info)).ok()?;
        let ih = self.info[h].clone();
        let imgs = args.map(|x| self.info[*x].image.clone());
        let image = match self.gp.compose(&ih.image, &imgs) {
            Composite::Value(c) => c,
            _ => return None,
        };
        let t0 = self.info[*args.first_leaf()].ty;
        let sb = args.boundary(Side::Source).ok()?;
        let tb = args.boundary(Side::Target).ok()?;
        let src = self.compose_nodes(ih.src?, &sb)?;
        let tgt = self.compose_nodes(ih.tgt?, &tb)?;
        Some(self.intern(key, Info { ty: (t0.0, ih.ty.1), dim: ih.dim, image, src: Some(src), tgt: Some(tgt) }))
    }

    fn split_comp(&mut self, fs: &[NodeId], args: &Pd<NodeId>) -> Option<NodeId> {
        let outs: Vec<usize> = fs.iter().map(|f| self.info[*f].ty.0).collect();
        let mut parts: Vec<Vec<NodeId>> = vec![Vec::new(); fs.len()];
        for x in args.labels() {
            let ps = self.split_node(x, &outs)?;
            for (i, p) in ps.into_iter().enumerate() {
                parts[i].push(p);
            }
        }
        let mut results = Vec::new();
        for (i, &f) in fs.iter().enumerate() {
            let mut it = parts[i].clone().into_iter();
            let piece = args.map(|_| it.next().unwrap());
            piece.validate(&Nodes(&self.info)).ok()?;
            results.push(self.compose_nodes(f, &piece)?);
        }
        self.fold_tens(&results)
    }

    fn split_node(&mut self, x: NodeId, outs: &[usize]) -> Option<Vec<NodeId>> {
        let shape = self.info[x].image.shape.clone();
        match self.nodes[x].clone() {
            Nf::D0(l) => {
                let pieces = split_layered(&l, outs)?;
                pieces.iter().map(|p| self.dim0_node(p)).collect()
            }
            Nf::Ident(p, d) => {
                (outs.iter().sum::<usize>() == p).then(|| outs.iter().map(|o| self.ident_node(*o, d)).collect())
            }
            Nf::Unit(_) => outs.iter().all(|o| *o == 0).then(|| vec![x; outs.len()]),
            Nf::Tens(v) => self.group_factors(&v, outs, &shape),
            _ => self.group_factors(&[x], outs, &shape),
        }
    }

    fn group_factors(&mut self, fs: &[NodeId], outs: &[usize], shape: &TreeCell) -> Option<Vec<NodeId>> {
        let k = outs.len();
        let mut groups: Vec<Vec<NodeId>> = vec![Vec::new(); k];
        let (mut g, mut r) = (0, outs[0]);
        let mut queue: VecDeque<NodeId> = fs.iter().copied().collect();
        while let Some(f) = queue.pop_front() {
            while r == 0 && g + 1 < k {
                g += 1;
                r = outs[g];
            }
            let c = self.info[f].ty.1;
            if c <= r {
                groups[g].push(f);
                r -= c;
                continue;
            }
            if let Nf::Ident(p, d) = self.nodes[f] {
                if r > 0 {
                    let head = self.ident_node(r, d);
                    let rest = self.ident_node(p - r, d);
                    groups[g].push(head);
                    queue.push_front(rest);
                    r = 0;
                    continue;
                }
            }
            return None;
        }
        while r == 0 && g + 1 < k {
            g += 1;
            r = outs[g];
        }
        if r != 0 {
            return None;
        }
        groups.into_iter().map(|grp| self.tens_list(grp, shape)).collect()
    }

    // -- cells --------------------------------------------------------------

    fn add_cell(&mut self, node: NodeId, size: usize, kind: WeakKind<P::Mor>) -> bool {
        if self.cell_of.contains_key(&node) {
            return false;
        }
        let inf = self.info[node].clone();
        if inf.ty.0 > self.bounds.hom_in || inf.ty.1 > self.bounds.hom_out || !self.gp.contains(&inf.image) {
            return false;
        }
        let (src, tgt) = if inf.dim == 0 {
            (None, None)
        } else {
            match (inf.src.and_then(|s| self.cell_of.get(&s)), inf.tgt.and_then(|t| self.cell_of.get(&t))) {
                (Some(&s), Some(&t)) => (Some(s), Some(t)),
                _ => return false,
            }
        };
        self.cell_of.insert(node, self.cells.len());
        self.cells.push(WeakCell { node, ty: inf.ty, dim: inf.dim, image: inf.image, src, tgt, size, kind });
        true
    }

    fn hom_types(&self) -> Vec<HomType> {
        let mut v = Vec::new();
        for n in 0..=self.bounds.hom_in {
            for m in 0..=self.bounds.hom_out {
                v.push((n, m));
            }
        }
        v
    }

    /// Adjoins the dimension-`d` generators: lifts of every cell of the
    /// globularization against every parallel pair over its boundary, and
    /// identities and units. Returns how many cells were new.
    pub fn lift_step(&mut self, d: usize) -> usize {
        let mut added = 0;
        let ids = self.bounds.hom_in.min(self.bounds.hom_out);
        if d == 0 {
            for (n, m) in self.hom_types() {
                let mut phis = self.gp.hom(n, m).to_vec();
                self.shuffle(&mut phis);
                for phi in phis {
                    let Some(node) = self.dim0_node(&Layered::single(phi.clone(), n, m)) else { continue };
                    added += usize::from(self.add_cell(node, 1, WeakKind::Lift0(phi)));
                }
            }
            for n in 0..=ids {
                let node = self.ident_node(n, 0);
                added += usize::from(self.add_cell(node, 0, WeakKind::Ident));
            }
            return added;
        }
        for n in 0..=ids {
            let node = self.ident_node(n, d);
            added += usize::from(self.add_cell(node, 0, WeakKind::Ident));
        }
        let trees: Vec<TreeCell> =
            enumerate_trees(d, self.bounds.max_tree_nodes).into_iter().map(|t| TreeCell::new(t, d)).collect();
        for s in &trees {
            if *s != TreeCell::eta(d) {
                let node = self.unit_node(s);
                added += usize::from(self.add_cell(node, 0, WeakKind::Unit));
            }
        }
        let mut groups: BTreeMap<GCell<P::Mor>, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.dim + 1 == d {
                groups.entry(c.image.clone()).or_default().push(i);
            }
        }
        let mut work: Vec<(GCell<P::Mor>, usize, usize)> = Vec::new();
        for (img, members) in &groups {
            for &lo in members {
                for &hi in members {
                    let (a, b) = (&self.cells[lo], &self.cells[hi]);
                    if d >= 2 && (a.src != b.src || a.tgt != b.tgt) {
                        continue;
                    }
                    for s in trees.iter().filter(|s| s.boundary().as_ref() == Some(&img.shape)) {
                        work.push((GCell { phi: img.phi.clone(), shape: s.clone() }, lo, hi));
                    }
                }
            }
        }
        self.shuffle(&mut work);
        for (nu, lo, hi) in work {
            let (ln, hn) = (self.cells[lo].node, self.cells[hi].node);
            let size = 1 + self.cells[lo].size + self.cells[hi].size;
            let node = self.lift_node(nu, ln, hn);
            added += usize::from(self.add_cell(node, size, WeakKind::Lift { lo, hi }));
        }
        added
    }

    /// Closes the dimension-`d` cells under composites and tensors up to the
    /// expression size bound, level by level. A composite is kept when its
    /// image lies in the bounded globularization and its boundary cells are
    /// already present. Returns how many cells were new.
    pub fn close_step(&mut self, d: usize) -> usize {
        let mut added = 0;
        for s in 1..=self.bounds.max_expr_size {
            let mut top: Vec<usize> = (0..self.cells.len()).filter(|&i| self.cells[i].dim == d && self.cells[i].size < s).collect();
            self.shuffle(&mut top);
            let mut by_type: BTreeMap<HomType, Vec<NodeId>> = BTreeMap::new();
            for c in &self.cells {
                if c.dim < d || (c.dim == d && c.size < s) {
                    by_type.entry(c.ty).or_default().push(c.node);
                }
            }
            let idx: BTreeMap<HomType, LabelIndex<NodeId>> =
                by_type.into_iter().map(|(t, v)| (t, LabelIndex::new(&Nodes(&self.info), v))).collect();
            let mut cands: Vec<(NodeId, WeakKind<P::Mor>)> = Vec::new();
            for &a in &top {
                for &b in &top {
                    let (ca, cb) = (&self.cells[a], &self.cells[b]);
                    if ca.size + cb.size + 1 != s
                        || ca.image.shape != cb.image.shape
                        || ca.ty.0 + cb.ty.0 > self.bounds.hom_in
                        || ca.ty.1 + cb.ty.1 > self.bounds.hom_out
                    {
                        continue;
                    }
                    let (na, nb) = (ca.node, cb.node);
                    if let Some(node) = self.tensor_nodes(na, nb) {
                        cands.push((node, WeakKind::Tens(a, b)));
                    }
                }
            }
            for &h in &top {
                if self.cells[h].size + 1 > s {
                    continue;
                }
                let budget = s - 1 - self.cells[h].size;
                let (hn, shape, m) = (self.cells[h].node, self.cells[h].image.shape.clone(), self.cells[h].ty.0);
                for n in 0..=self.bounds.hom_in {
                    let Some(ix) = idx.get(&(n, m)) else { continue };
                    let sizes = &self.cells;
                    let cell_of = &self.cell_of;
                    let size_of = |x: &NodeId| sizes[cell_of[x]].size;
                    let cand = |k: usize, b: Option<(&NodeId, &NodeId)>| -> Vec<NodeId> {
                        ix.get(k, b).into_iter().filter(|x| size_of(x) <= budget).collect()
                    };
                    let mut all: Vec<Pd<NodeId>> = labellings(&shape, &cand)
                        .into_iter()
                        .filter(|a| top_labels(a).iter().map(size_of).sum::<usize>() == budget)
                        .collect();
                    self.shuffle(&mut all);
                    for args in all {
                        if let Some(node) = self.compose_nodes(hn, &args) {
                            let cargs = args.map(|x| self.cell_of[x]);
                            cands.push((node, WeakKind::Comp { head: h, args: cargs }));
                        }
                    }
                }
            }
            for (node, kind) in cands {
                added += usize::from(self.add_cell(node, s, kind));
            }
        }
        added
    }

    /// Runs the lift and close steps dimension by dimension until nothing
    /// new appears, then renumbers cells canonically.
    pub fn generate(&mut self) {
        for d in 0..=self.bounds.max_dim {
            loop {
                let a = self.lift_step(d);
                let b = self.close_step(d);
                if a + b == 0 {
                    break;
                }
            }
        }
        self.canonicalize();
    }

    fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by_key(|&i| {
            let c = &self.cells[i];
            (c.dim, c.ty, c.size, i)
        });
        let mut rank = vec![0; order.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let old = std::mem::take(&mut self.cells);
        let mut cells: Vec<Option<WeakCell<P::Mor>>> = old.into_iter().map(Some).collect();
        for &i in &order {
            let mut c = cells[i].take().unwrap();
            c.src = c.src.map(|s| rank[s]);
            c.tgt = c.tgt.map(|t| rank[t]);
            c.kind = match c.kind {
                WeakKind::Lift { lo, hi } => WeakKind::Lift { lo: rank[lo], hi: rank[hi] },
                WeakKind::Tens(a, b) => WeakKind::Tens(rank[a], rank[b]),
                WeakKind::Comp { head, args } => WeakKind::Comp { head: rank[head], args: args.map(|x| rank[*x]) },
                k => k,
            };
            self.cells.push(c);
        }
        self.cell_of = self.cells.iter().enumerate().map(|(i, c)| (c.node, i)).collect();
    }

    pub fn cells(&self) -> &[WeakCell<P::Mor>] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &WeakCell<P::Mor> {
        &self.cells[i]
    }

    pub fn cell_of_node(&self, n: NodeId) -> Option<usize> {
        self.cell_of.get(&n).copied()
    }

    /// Cell counts per `(n, m, d)`.
    pub fn counts(&self) -> BTreeMap<(usize, usize, usize), usize> {
        let mut out = BTreeMap::new();
        for c in &self.cells {
            *out.entry((c.ty.0, c.ty.1, c.dim)).or_insert(0) += 1;
        }
        out
    }

    pub fn counts_json(&self) -> Value {
        let m: serde_json::Map<String, Value> =
            self.counts().into_iter().map(|((n, m, d), c)| (format!("{n},{m},{d}"), json!(c))).collect();
        Value::Object(m)
    }

    /// The layered word of a morphism expression in the generators of the
    /// underlying PRO.
    pub fn layered_of(&self, e: &ProExpr) -> Option<Layered<P::Mor>> {
        let p = &self.gp.pro;
        match e {
            ProExpr::Gen(g) => {
                let f = p.generator(g)?;
                Some(Layered::single(f.clone(), p.arity(&f), p.coarity(&f)))
            }
            ProExpr::Id(n) => Some(Layered::id(*n)),
            ProExpr::Comp(g, f) => Layered::then(&self.layered_of(f)?, &self.layered_of(g)?),
            ProExpr::Tensor(a, b) => Some(Layered::tensor(&self.layered_of(a)?, &self.layered_of(b)?)),
        }
    }

    /// The 0-cell built from lifted generators by the expression `e`, if present.
    pub fn dim0_cell(&mut self, e: &ProExpr) -> Option<usize> {
        let l = self.layered_of(e)?;
        let n = self.dim0_node(&l)?;
        self.cell_of_node(n)
    }

    /// The 0-cell lifting the morphism `phi` itself.
    pub fn lift0_cell(&mut self, phi: &P::Mor) -> Option<usize> {
        let p = &self.gp.pro;
        let l = Layered::single(phi.clone(), p.arity(phi), p.coarity(phi));
        let n = self.dim0_node(&l)?;
        self.cell_of_node(n)
    }

    /// For `d ≥ 1`: the pairs of distinct parallel `(d-1)`-cells of type
    /// `(n, m)` together with the `d`-cells between them.
    pub fn find_parallel_mediators(&self, n: usize, m: usize, d: usize) -> Vec<((usize, usize), Vec<usize>)> {
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.dim == d && c.ty == (n, m) {
                if let (Some(s), Some(t)) = (c.src, c.tgt) {
                    if s != t {
                        by_pair.entry((s, t)).or_default().push(i);
                    }
                }
            }
        }
        by_pair.into_iter().collect()
    }

    /// Cells between `a` and `b`, which must be cells of equal dimension.
    pub fn mediators(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].src == Some(a) && self.cells[i].tgt == Some(b)).collect()
    }

    pub fn expr(&self, i: usize) -> String {
        let c = &self.cells[i];
        match &c.kind {
            WeakKind::Lift0(phi) => format!("⌜{}⌝", self.gp.pro.describe(phi)),
            WeakKind::Ident => format!("id{}^{}", c.ty.0, c.dim),
            WeakKind::Unit => format!("u[{}]", c.image.shape),
            WeakKind::Tens(a, b) => format!("({} ⊗ {})", self.expr(*a), self.expr(*b)),
            WeakKind::Comp { head, args } => {
                let inner: Vec<String> = top_labels(args).iter().map(|x| self.expr(*x)).collect();
                format!("{}∘[{}]", self.expr(*head), inner.join(", "))
            }
            WeakKind::Lift { lo, hi } => format!("κ[{}]({}, {})", c.image.shape, self.expr(*lo), self.expr(*hi)),
        }
    }

    fn image_json(&self, g: &GCell<P::Mor>) -> Value {
        json!({ "p": self.gp.pro.describe(&g.phi), "tree": g.shape.to_string() })
    }

    pub fn to_json(&self) -> Value {
        let mut cells = Vec::new();
        let mut contraction = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            let (kind, children, extra) = match &c.kind {
                WeakKind::Lift0(_) => ("lift0", vec![], None),
                WeakKind::Lift { lo, hi } => ("lift", vec![*lo, *hi], None),
                WeakKind::Ident => ("ident", vec![], None),
                WeakKind::Unit => ("unit", vec![], None),
                WeakKind::Tens(a, b) => ("tens", vec![*a, *b], None),
                WeakKind::Comp { head, args } => {
                    let mut ch = vec![*head];
                    ch.extend(args.labels());
                    ("comp", ch, Some(args.shape().tree.to_string()))
                }
            };
            let mut o = json!({
                "id": i,
                "homType": [c.ty.0, c.ty.1],
                "dim": c.dim,
                "size": c.size,
                "kind": kind,
                "children": children,
                "expr": self.expr(i),
                "image": self.image_json(&c.image),
                "src": c.src,
                "tgt": c.tgt,
            });
            if let Some(s) = extra {
                o["argShape"] = json!(s);
            }
            cells.push(o);
            match &c.kind {
                WeakKind::Lift0(_) => contraction.push(json!({ "nu": self.image_json(&c.image), "pair": null, "lift": i })),
                WeakKind::Lift { lo, hi } => {
                    contraction.push(json!({ "nu": self.image_json(&c.image), "pair": [lo, hi], "lift": i }))
                }
                _ => {}
            }
        }
        json!({
            "bounds": self.bounds.to_json(),
            "counts": self.counts_json(),
            "cells": cells,
            "contraction": contraction,
        })
    }

    /// Graphviz rendering of cells up to dimension 2: 0- and 1-cells are
    /// nodes, boundaries are edges.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph weak {\n  rankdir=LR;\n");
        for (i, c) in self.cells.iter().enumerate().filter(|(_, c)| c.dim <= 2) {
            let shape = ["ellipse", "box", "diamond"][c.dim];
            let label = self.expr(i).replace('"', "\\\"");
            s.push_str(&format!("  c{i} [shape={shape}, label=\"{i}: {label}\"];\n"));
            if let (Some(a), Some(b)) = (c.src, c.tgt) {
                let style = if c.dim == 1 { "solid" } else { "dashed" };
                s.push_str(&format!("  c{a} -> c{i} [style={style}];\n  c{i} -> c{b} [style={style}];\n"));
            }
        }
        s.push_str("}\n");
        s
    }

    /// Checks that every cell maps into the globularization compatibly with
    /// its derivation, that boundaries are globular, and that every
    /// parallel pair over every bounded cell has a lift.
    pub fn verify(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut lifted: BTreeSet<(GCell<P::Mor>, Option<(usize, usize)>)> = BTreeSet::new();
        for (i, c) in self.cells.iter().enumerate() {
            if !self.gp.contains(&c.image) || self.gp.hom_type(&c.image) != c.ty || c.image.shape.dim != c.dim {
                out.push(format!("cell {i}: image outside the target"));
                continue;
            }
            if c.dim > 0 {
                let (Some(s), Some(t)) = (c.src, c.tgt) else {
                    out.push(format!("cell {i}: missing boundary"));
                    continue;
                };
                let bd = self.gp.source(&c.image);
                if bd.as_ref() != Some(&self.cells[s].image) || bd.as_ref() != Some(&self.cells[t].image) {
                    out.push(format!("cell {i}: boundary images"));
                }
                if self.cells[s].dim + 1 != c.dim || self.cells[t].dim + 1 != c.dim {
                    out.push(format!("cell {i}: boundary dimensions"));
                }
                if c.dim >= 2 && (self.cells[s].src != self.cells[t].src || self.cells[s].tgt != self.cells[t].tgt) {
                    out.push(format!("cell {i}: not globular"));
                }
            }
            let ok = match &c.kind {
                WeakKind::Lift0(phi) => {
                    lifted.insert((c.image.clone(), None));
                    c.image == GCell { phi: phi.clone(), shape: TreeCell::eta(0) }
                }
                WeakKind::Lift { lo, hi } => {
                    lifted.insert((c.image.clone(), Some((*lo, *hi))));
                    c.src == Some(*lo) && c.tgt == Some(*hi)
                }
                WeakKind::Ident => c.image == self.gp.ident(c.ty.0, c.dim) && c.ty.0 == c.ty.1,
                WeakKind::Unit => self.gp.zero(&c.image.shape).as_ref() == Some(&c.image),
                WeakKind::Tens(a, b) => {
                    matches!(self.gp.tensor(&self.cells[*a].image, &self.cells[*b].image), Composite::Value(v) if v == c.image)
                }
                WeakKind::Comp { head, args } => {
                    let imgs = args.map(|x| self.cells[*x].image.clone());
                    args.validate(self).is_ok()
                        && matches!(self.gp.compose(&self.cells[*head].image, &imgs), Composite::Value(v) if v == c.image)
                }
            };
            if !ok {
                out.push(format!("cell {i}: derivation does not match the image"));
            }
        }
        for (n, m) in self.hom_types() {
            for d in 0..=self.bounds.max_dim {
                for nu in self.gp.cells(n, m, d) {
                    if d == 0 {
                        if !lifted.contains(&(nu.clone(), None)) && !self.cells.iter().any(|c| c.dim == 0 && c.image == nu) {
                            out.push(format!("no 0-cell over {}", self.gp.describe(&nu)));
                        }
                        continue;
                    }
                    let bd = self.gp.source(&nu);
                    let lower: Vec<usize> =
                        (0..self.cells.len()).filter(|&i| self.cells[i].dim + 1 == d && Some(&self.cells[i].image) == bd.as_ref()).collect();
                    for &lo in &lower {
                        for &hi in &lower {
                            let (a, b) = (&self.cells[lo], &self.cells[hi]);
                            if d >= 2 && (a.src != b.src || a.tgt != b.tgt) {
                                continue;
                            }
                            let has = lifted.contains(&(nu.clone(), Some((lo, hi))))
                                || self.cells.iter().any(|c| c.image == nu && c.src == Some(lo) && c.tgt == Some(hi));
                            if !has {
                                out.push(format!("no lift of {} against ({lo}, {hi})", self.gp.describe(&nu)));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl<P: Pro> Globe for WeakTheory<P> {
    type Cell = usize;

    fn cell_dim(&self, c: &usize) -> usize {
        self.cells[*c].dim
    }
    fn source(&self, c: &usize) -> Option<usize> {
        self.cells[*c].src
    }
    fn target(&self, c: &usize) -> Option<usize> {
        self.cells[*c].tgt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pros::{ProPresentation, TheoryPro};

    fn endo_loop() -> GlobularSet {
        let mut y = GlobularSet::new(1);
        y.add0("x").unwrap();
        y.add(1, "e", "x", "x").unwrap();
        y
    }

    fn arrow() -> GlobularSet {
        let mut y = GlobularSet::new(1);
        y.add0("a").unwrap();
        y.add0("b").unwrap();
        y.add(1, "f", "a", "b").unwrap();
        y
    }

    fn empty_map(y: &GlobularSet) -> GlobMap {
        GlobMap { images: vec![Vec::new(); y.max_dim() + 1] }
    }

    #[test]
    fn free_contraction_counts() {
        for (y, counts) in [(endo_loop(), [1, 1]), (arrow(), [2, 1])] {
            let x = GlobularSet::new(0);
            let (x2, f2, c) = free_contraction(&x, &y, &empty_map(&y), 1, &|_| true, &BTreeMap::new()).unwrap();
            assert_eq!([x2.count(0), x2.count(1)], counts);
            assert!(check_contraction(&x2, &y, &f2, &c, 1).is_empty());
            assert!(is_leinster_fibration(&x2, &y, &f2, 1).is_ok());
            assert!(f2.non_globular_cells(&x2, &y).is_empty());
        }
    }

    #[test]
    fn identity_map_contracts() {
        let y = arrow();
        let f = GlobMap::identity(&y);
        let mut c = Contraction::default();
        for v in y.cells(0) {
            c.zero.insert(v, v);
        }
        let e = y.lookup("f").unwrap();
        c.lifts.insert((e, y.lookup("a").unwrap(), y.lookup("b").unwrap()), e);
        assert!(check_contraction(&y, &y, &f, &c, 1).is_empty());
    }

    #[test]
    fn missing_lift_is_witnessed() {
        let y = endo_loop();
        let mut x = GlobularSet::new(1);
        x.add0("p").unwrap();
        x.add0("q").unwrap();
        x.add(1, "k", "p", "p").unwrap();
        let f = GlobMap { images: vec![vec![0, 0], vec![0]] };
        let err = is_leinster_fibration(&x, &y, &f, 1).unwrap_err();
        assert_eq!(err.0, y.lookup("e").unwrap());
        assert_eq!(err.1, Some((x.lookup("p").unwrap(), x.lookup("q").unwrap())));
        let c = Contraction::default();
        assert!(check_contraction(&x, &y, &f, &c, 1).iter().any(|v| v.relation == "missing"));
    }

    #[test]
    fn split_layered_respects_cuts() {
        let l = Layered::tensor(&Layered::single("m", 2, 1), &Layered::single("n", 1, 1));
        let parts = split_layered(&l, &[1, 1]).unwrap();
        assert_eq!(parts[0], Layered::single("m", 2, 1));
        assert_eq!(parts[1], Layered::single("n", 1, 1));
        assert!(split_layered(&Layered::single("d", 1, 2), &[1, 1]).is_none());
    }

    fn monoid(bounds: WeakBounds) -> WeakTheory<TheoryPro> {
        let p = TheoryPro::new(ProPresentation::monoid(), 1000).unwrap();
        WeakTheory::new(p, bounds).unwrap()
    }

    fn small() -> WeakBounds {
        WeakBounds { max_dim: 1, max_tree_nodes: 2, max_expr_size: 3, hom_in: 2, hom_out: 1 }
    }

    #[test]
    fn dim0_generators_match_the_bounded_homs() {
        let mut w = monoid(small());
        w.lift_step(0);
        let lifts = w.cells().iter().filter(|c| matches!(c.kind, WeakKind::Lift0(_))).count();
        let expected: usize = w.hom_types().iter().map(|(n, m)| w.gp.hom(*n, *m).len()).sum();
        assert_eq!(lifts, expected);
        assert_eq!(w.lift_step(0), 0);
    }

    #[test]
    fn closure_and_lifts_are_idempotent() {
        let mut w = monoid(small());
        w.lift_step(0);
        w.close_step(0);
        assert_eq!(w.close_step(0), 0);
        w.lift_step(1);
        w.close_step(1);
        assert_eq!(w.lift_step(1), 0);
        assert_eq!(w.close_step(1), 0);
        assert!(w.verify().is_empty(), "{:?}", w.verify());
    }

    #[test]
    fn associator_and_unitor_are_found() {
        let mut w = monoid(WeakBounds::default());
        w.generate();
        assert!(w.verify().is_empty());
        let l = crate::pros::parse_expr("(comp m (tensor m (id 1)))").unwrap();
        let r = crate::pros::parse_expr("(comp m (tensor (id 1) m))").unwrap();
        let (a, b) = (w.dim0_cell(&l).unwrap(), w.dim0_cell(&r).unwrap());
        assert_ne!(a, b);
        assert!(!w.mediators(a, b).is_empty());
        let u = crate::pros::parse_expr("(comp m (tensor e (id 1)))").unwrap();
        let u = w.dim0_cell(&u).unwrap();
        let id1 = w.gp.pro.id(1);
        let one = w.lift0_cell(&id1).unwrap();
        assert!(!w.mediators(u, one).is_empty());
    }

    #[test]
    fn shuffled_order_gives_identical_counts() {
        let mut a = monoid(WeakBounds::default());
        a.generate();
        let mut b = monoid(WeakBounds::default()).with_shuffle(17);
        b.generate();
        assert_eq!(a.counts(), b.counts());
        let mut c = monoid(WeakBounds::default());
        c.generate();
        assert_eq!(a.to_json(), c.to_json());
    }
}

//! Collections (globular sets over the trees), their substitution product,
//! internal hom and globular operads as monoids.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use serde_json::{json, Value};
use thiserror::Error;

use crate::globset::{CellRef, GlobError, GlobularSet, Globe};
use crate::grdops::{AlgebraReport, Composite, IsoReport, OperadViolation};
use crate::pasting::{
    enumerate_trees, labellings, mu, mu_shape, mu_split, word_arity, LabelIndex, Pd, PdError, Side, Tree, TreeCell,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollError {
    #[error(transparent)]
    Glob(#[from] GlobError),
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error("internal hom fibre over {0} exceeds {1} sections")]
    TooLarge(String, usize),
    #[error("section is undefined at {0}")]
    Undefined(String),
    #[error("bad collection JSON: {0}")]
    Json(String),
}

/// A collection with cells enumerable per dimension, possibly under a bound.
pub trait CollEngine: Globe {
    fn max_dim(&self) -> usize;
    fn arity(&self, c: &Self::Cell) -> TreeCell;
    fn cells(&self, dim: usize) -> Vec<Self::Cell>;

    fn cells_with_arity(&self, t: &TreeCell) -> Vec<Self::Cell> {
        self.cells(t.dim).into_iter().filter(|c| self.arity(c) == *t).collect()
    }

    fn all_cells(&self) -> Vec<Self::Cell> {
        (0..=self.max_dim()).flat_map(|d| self.cells(d)).collect()
    }

    /// The cells of a given arity and boundary, when the engine can answer
    /// without enumeration (possibly beyond its enumeration bound).
    fn cells_over(&self, _arity: &TreeCell, _bd: Option<(&Self::Cell, &Self::Cell)>) -> Option<Vec<Self::Cell>> {
        None
    }
}

impl<E: CollEngine + ?Sized> CollEngine for &E {
    fn max_dim(&self) -> usize {
        (**self).max_dim()
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        (**self).arity(c)
    }
    fn cells(&self, dim: usize) -> Vec<Self::Cell> {
        (**self).cells(dim)
    }
    fn cells_with_arity(&self, t: &TreeCell) -> Vec<Self::Cell> {
        (**self).cells_with_arity(t)
    }
    fn all_cells(&self) -> Vec<Self::Cell> {
        (**self).all_cells()
    }
    fn cells_over(&self, arity: &TreeCell, bd: Option<(&Self::Cell, &Self::Cell)>) -> Option<Vec<Self::Cell>> {
        (**self).cells_over(arity, bd)
    }
}

/// A finite collection: a globular set with an arity for every cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    pub glob: GlobularSet,
    pub arities: Vec<Vec<TreeCell>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollViolation {
    pub cell: String,
    pub relation: String,
}

impl Collection {
    pub fn new(glob: GlobularSet, arity: impl Fn(CellRef) -> TreeCell) -> Self {
        let arities = (0..=glob.max_dim()).map(|d| glob.cells(d).map(&arity).collect()).collect();
        Collection { glob, arities }
    }

    /// Every cell has the degenerate arity of its dimension.
    pub fn degenerate(glob: GlobularSet) -> Self {
        Collection::new(glob, |c| TreeCell::degenerate(c.dim))
    }

    pub fn arity_of(&self, c: CellRef) -> &TreeCell {
        &self.arities[c.dim][c.idx]
    }

    pub fn is_degenerate(&self) -> bool {
        self.glob.all_cells().all(|c| self.arity_of(c).tree.children.is_empty())
    }

    pub fn validate(&self) -> Vec<CollViolation> {
        let mut out: Vec<CollViolation> = self
            .glob
            .validate()
            .into_iter()
            .map(|v| CollViolation { cell: v.cell, relation: v.relation })
            .collect();
        if !out.is_empty() {
            return out;
        }
        for c in self.glob.all_cells() {
            let a = self.arity_of(c);
            let name = self.glob.name(c).to_string();
            if a.dim != c.dim || !a.is_valid() {
                out.push(CollViolation { cell: name, relation: "arity-dimension".into() });
                continue;
            }
            if c.dim > 0 {
                let b = a.boundary();
                let s = self.arity_of(self.glob.src_of(c).unwrap());
                let t = self.arity_of(self.glob.tgt_of(c).unwrap());
                if b.as_ref() != Some(s) {
                    out.push(CollViolation { cell: name.clone(), relation: "arity-source".into() });
                }
                if b.as_ref() != Some(t) {
                    out.push(CollViolation { cell: name, relation: "arity-target".into() });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.glob.to_json();
        let ar: serde_json::Map<String, Value> = self
            .glob
            .all_cells()
            .map(|c| (self.glob.name(c).to_string(), json!(self.arity_of(c).tree.to_string())))
            .collect();
        v["arity"] = Value::Object(ar);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, CollError> {
        let glob = GlobularSet::from_json(v)?;
        let ar = v.get("arity").and_then(Value::as_object).ok_or_else(|| CollError::Json("missing arity map".into()))?;
        let mut arities = Vec::new();
        for d in 0..=glob.max_dim() {
            let mut row = Vec::new();
            for c in glob.cells(d) {
                let name = glob.name(c);
                let s = ar
                    .get(name)
                    .and_then(Value::as_str)
                    .ok_or_else(|| CollError::Json(format!("no arity for `{name}`")))?;
                let tree: Tree = s.parse().map_err(|e| CollError::Json(format!("arity of `{name}`: {e}")))?;
                row.push(TreeCell { dim: d, tree });
            }
            arities.push(row);
        }
        Ok(Collection { glob, arities })
    }

    /// Copies the cells of an enumerable collection into a finite one.
    pub fn materialize<E: CollEngine>(e: &E, name: impl Fn(&E::Cell) -> String) -> Result<Collection, CollError> {
        let mut glob = GlobularSet::new(e.max_dim());
        let mut arities = vec![Vec::new(); e.max_dim() + 1];
        let mut index: HashMap<E::Cell, CellRef> = HashMap::new();
        for d in 0..=e.max_dim() {
            for c in e.cells(d) {
                let bd = match (e.source(&c), e.target(&c)) {
                    (Some(s), Some(t)) => Some((
                        *index.get(&s).ok_or_else(|| CollError::Json("source outside the bound".into()))?,
                        *index.get(&t).ok_or_else(|| CollError::Json("target outside the bound".into()))?,
                    )),
                    _ => None,
                };
                let r = glob.add_cell(d, &name(&c), bd)?;
                arities[d].push(e.arity(&c));
                index.insert(c, r);
            }
        }
        Ok(Collection { glob, arities })
    }
}

impl Globe for Collection {
    type Cell = CellRef;

    fn cell_dim(&self, c: &CellRef) -> usize {
        c.dim
    }
    fn source(&self, c: &CellRef) -> Option<CellRef> {
        self.glob.src_of(*c)
    }
    fn target(&self, c: &CellRef) -> Option<CellRef> {
        self.glob.tgt_of(*c)
    }
}

impl CollEngine for Collection {
    fn max_dim(&self) -> usize {
        self.glob.max_dim()
    }
    fn arity(&self, c: &CellRef) -> TreeCell {
        self.arity_of(*c).clone()
    }
    fn cells(&self, dim: usize) -> Vec<CellRef> {
        self.glob.cells(dim).collect()
    }
}

/// The terminal collection, truncated to trees with at most `max_nodes` nodes.
#[derive(Clone, Copy, Debug)]
pub struct Terminal {
    pub max_dim: usize,
    pub max_nodes: usize,
}

impl Globe for Terminal {
    type Cell = TreeCell;

    fn cell_dim(&self, c: &TreeCell) -> usize {
        c.dim
    }
    fn source(&self, c: &TreeCell) -> Option<TreeCell> {
        c.boundary()
    }
    fn target(&self, c: &TreeCell) -> Option<TreeCell> {
        c.boundary()
    }
}

impl CollEngine for Terminal {
    fn max_dim(&self) -> usize {
        self.max_dim
    }
    fn arity(&self, c: &TreeCell) -> TreeCell {
        c.clone()
    }
    fn cells(&self, dim: usize) -> Vec<TreeCell> {
        enumerate_trees(dim, self.max_nodes).into_iter().map(|t| TreeCell { dim, tree: t }).collect()
    }
    fn cells_with_arity(&self, t: &TreeCell) -> Vec<TreeCell> {
        if t.tree.node_count() <= self.max_nodes {
            vec![t.clone()]
        } else {
            Vec::new()
        }
    }
    fn cells_over(&self, arity: &TreeCell, bd: Option<(&TreeCell, &TreeCell)>) -> Option<Vec<TreeCell>> {
        let ok = match bd {
            None => true,
            Some((s, t)) => arity.boundary().is_some_and(|b| &b == s && &b == t),
        };
        Some(if ok { vec![arity.clone()] } else { Vec::new() })
    }
}

/// The unit collection: one cell per dimension, of linear arity.
#[derive(Clone, Copy, Debug)]
pub struct UnitColl {
    pub max_dim: usize,
}

/// One cell per dimension, of degenerate arity.
#[derive(Clone, Copy, Debug)]
pub struct IdColl {
    pub max_dim: usize,
}

macro_rules! point_globe {
    ($t:ty) => {
        impl Globe for $t {
            type Cell = usize;

            fn cell_dim(&self, c: &usize) -> usize {
                *c
            }
            fn source(&self, c: &usize) -> Option<usize> {
                c.checked_sub(1)
            }
            fn target(&self, c: &usize) -> Option<usize> {
                c.checked_sub(1)
            }
        }
    };
}

point_globe!(UnitColl);
point_globe!(IdColl);

impl CollEngine for UnitColl {
    fn max_dim(&self) -> usize {
        self.max_dim
    }
    fn arity(&self, c: &usize) -> TreeCell {
        TreeCell::eta(*c)
    }
    fn cells(&self, dim: usize) -> Vec<usize> {
        vec![dim]
    }
}

impl CollEngine for IdColl {
    fn max_dim(&self) -> usize {
        self.max_dim
    }
    fn arity(&self, c: &usize) -> TreeCell {
        TreeCell::degenerate(*c)
    }
    fn cells(&self, dim: usize) -> Vec<usize> {
        vec![dim]
    }
}

/// The substitution product `X□Y`: a cell of `X` with a labelling of its
/// arity by cells of `Y`.
pub struct Square<'a, X: CollEngine, Y: CollEngine> {
    pub x: &'a X,
    pub y: &'a Y,
    index: LabelIndex<Y::Cell>,
}

impl<'a, X: CollEngine, Y: CollEngine> Square<'a, X, Y> {
    pub fn new(x: &'a X, y: &'a Y) -> Self {
        let index = LabelIndex::new(y, y.all_cells());
        Square { x, y, index }
    }

    pub fn labellings(&self, t: &TreeCell) -> Vec<Pd<Y::Cell>> {
        self.index.labellings(t)
    }

    /// The cells of dimension `dim` when there are at most `cap` of them
    /// (by a cheap upper bound), otherwise about `cap` distinct cells drawn
    /// by seeded random labelling.
    pub fn bounded_cells(&self, dim: usize, cap: usize, seed: u64) -> Vec<(X::Cell, Pd<Y::Cell>)> {
        let heads = self.x.cells(dim);
        let bound: f64 = heads.iter().map(|a| labelling_bound(&self.x.arity(a).tree, 0, &self.index)).sum();
        if bound <= cap as f64 {
            return self.cells(dim);
        }
        if heads.is_empty() {
            return Vec::new();
        }
        let mut rng = StdRng::seed_from_u64(seed);
        let mut out = BTreeSet::new();
        let mut tries = 0;
        while out.len() < cap && tries < 4 * cap {
            let a = &heads[tries % heads.len()];
            tries += 1;
            if let Some(psi) = random_labelling(&self.index, &self.x.arity(a), &mut rng) {
                out.insert((a.clone(), psi));
            }
        }
        out.into_iter().collect()
    }
}

/// One labelling of `shape` drawn by choosing a random candidate at every
/// gap; `None` when the walk reaches a gap with no candidate.
pub fn random_labelling<C: Clone + Eq + std::hash::Hash>(idx: &LabelIndex<C>, shape: &TreeCell, rng: &mut StdRng) -> Option<Pd<C>> {
    let rng = RefCell::new(rng);
    let pick = |h: usize, b: Option<(&C, &C)>| {
        let v = idx.get(h, b);
        v.choose(&mut **rng.borrow_mut()).cloned().into_iter().collect()
    };
    labellings(shape, &pick).into_iter().next()
}

/// All labellings of `shape` if there are at most `cap` by a cheap bound,
/// otherwise up to `cap` distinct random ones.
pub fn bounded_labellings<C: Clone + Ord + std::hash::Hash>(
    idx: &LabelIndex<C>,
    shape: &TreeCell,
    cap: usize,
    rng: &mut StdRng,
) -> Vec<Pd<C>> {
    if labelling_bound(&shape.tree, 0, idx) <= cap as f64 {
        return idx.labellings(shape);
    }
    let mut out = BTreeSet::new();
    for _ in 0..4 * cap {
        if out.len() >= cap {
            break;
        }
        if let Some(p) = random_labelling(idx, shape, rng) {
            out.insert(p);
        }
    }
    out.into_iter().collect()
}

fn labelling_bound<C: Clone + Eq + std::hash::Hash>(t: &Tree, h: usize, idx: &LabelIndex<C>) -> f64 {
    let gaps = (idx.len(h) as f64).powi(t.children.len() as i32 + 1);
    t.children.iter().map(|c| labelling_bound(c, h + 1, idx)).product::<f64>() * gaps
}

impl<X: CollEngine, Y: CollEngine> Globe for Square<'_, X, Y> {
    type Cell = (X::Cell, Pd<Y::Cell>);

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        self.x.cell_dim(&c.0)
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        Some((self.x.source(&c.0)?, c.1.boundary(Side::Source).ok()?))
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        Some((self.x.target(&c.0)?, c.1.boundary(Side::Target).ok()?))
    }
}

impl<X: CollEngine, Y: CollEngine> CollEngine for Square<'_, X, Y> {
    fn max_dim(&self) -> usize {
        self.x.max_dim().min(self.y.max_dim())
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        word_arity(&c.1, |y| self.y.arity(y)).expect("labelling of a collection cell")
    }
    fn cells(&self, dim: usize) -> Vec<Self::Cell> {
        let mut out = Vec::new();
        for a in self.x.cells(dim) {
            for psi in self.index.labellings(&self.x.arity(&a)) {
                out.push((a.clone(), psi));
            }
        }
        out
    }
}

/// The product in collections: pairs of cells with equal arity.
pub struct ProductColl<'a, A: CollEngine, B: CollEngine> {
    pub a: &'a A,
    pub b: &'a B,
}

impl<A: CollEngine, B: CollEngine> Globe for ProductColl<'_, A, B> {
    type Cell = (A::Cell, B::Cell);

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        self.a.cell_dim(&c.0)
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        Some((self.a.source(&c.0)?, self.b.source(&c.1)?))
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        Some((self.a.target(&c.0)?, self.b.target(&c.1)?))
    }
}

impl<A: CollEngine, B: CollEngine> CollEngine for ProductColl<'_, A, B> {
    fn max_dim(&self) -> usize {
        self.a.max_dim().min(self.b.max_dim())
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        self.a.arity(&c.0)
    }
    fn cells(&self, dim: usize) -> Vec<Self::Cell> {
        let mut by_arity: BTreeMap<TreeCell, Vec<B::Cell>> = BTreeMap::new();
        for y in self.b.cells(dim) {
            by_arity.entry(self.b.arity(&y)).or_default().push(y);
        }
        let mut out = Vec::new();
        for x in self.a.cells(dim) {
            if let Some(ys) = by_arity.get(&self.a.arity(&x)) {
                for y in ys {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
        out
    }
}

/// `X□(Y□Z) → (X□Y)□Z`, flattening the inner labellings with the monad
/// multiplication.
pub fn alpha_bar<A: Clone, B: Clone, C: Clone + Eq>(e: &(A, Pd<(B, Pd<C>)>)) -> Result<((A, Pd<B>), Pd<C>), PdError> {
    let (a, psi) = e;
    let p1 = psi.map(|(b, _)| b.clone());
    let p2 = psi.map(|(_, z)| z.clone());
    Ok(((a.clone(), p1), mu(&p2)?))
}

/// `(X□Y)□Z → X□(Y□Z)`, splitting the `Z`-labelling along the `Y`-arities.
pub fn alpha<A: Clone, B: Clone, C: Clone + Eq>(
    e: &((A, Pd<B>), Pd<C>),
    arity: impl Fn(&B) -> TreeCell,
) -> Result<(A, Pd<(B, Pd<C>)>), PdError> {
    let ((a, p), z) = e;
    let split = mu_split(&p.map(arity), z)?;
    Ok((a.clone(), p.zip(&split).ok_or_else(|| PdError::Split("shape mismatch".into()))?))
}

pub fn lambda<C: Clone>(e: &(usize, Pd<C>)) -> C {
    e.1.first_leaf().clone()
}

pub fn lambda_inv<G: Globe>(g: &G, c: &G::Cell) -> (usize, Pd<G::Cell>) {
    (g.cell_dim(c), Pd::eta(g, c))
}

pub fn rho<C: Clone>(e: &(C, Pd<usize>)) -> C {
    e.0.clone()
}

pub fn rho_inv<E: CollEngine>(e: &E, c: &E::Cell) -> (E::Cell, Pd<usize>) {
    (c.clone(), e.arity(c).to_pd())
}

fn iso_report<D: CollEngine, C: CollEngine>(
    dom: &D,
    cod: &C,
    f: impl Fn(&D::Cell) -> Option<C::Cell>,
    back: impl Fn(&C::Cell) -> Option<D::Cell>,
) -> IsoReport {
    let mut rep = IsoReport { domain: 0, codomain: 0, arity_preserving: true, injective: true, inverse_ok: true };
    for d in 0..=dom.max_dim().min(cod.max_dim()) {
        let target: BTreeSet<C::Cell> = cod.cells(d).into_iter().collect();
        rep.codomain += target.len();
        let mut seen = BTreeSet::new();
        for c in dom.cells(d) {
            rep.domain += 1;
            let Some(img) = f(&c) else {
                rep.inverse_ok = false;
                continue;
            };
            if !target.contains(&img) || cod.arity(&img) != dom.arity(&c) {
                rep.arity_preserving = false;
            }
            let glob_ok = match (dom.source(&c), cod.source(&img)) {
                (Some(s), Some(t)) => f(&s) == Some(t) && dom.target(&c).and_then(|x| f(&x)) == cod.target(&img),
                (None, None) => true,
                _ => false,
            };
            if !glob_ok {
                rep.arity_preserving = false;
            }
            if back(&img).as_ref() != Some(&c) {
                rep.inverse_ok = false;
            }
            if !seen.insert(img) {
                rep.injective = false;
            }
        }
    }
    rep
}

/// Checks that `ᾱ` is a collection isomorphism, with `α` as inverse.
pub fn check_coll_associator<X: CollEngine, Y: CollEngine, Z: CollEngine>(x: &X, y: &Y, z: &Z) -> IsoReport {
    let yz = Square::new(y, z);
    let right = Square::new(x, &yz);
    let xy = Square::new(x, y);
    let left = Square::new(&xy, z);
    iso_report(&right, &left, |e| alpha_bar(e).ok(), |e| alpha(e, |b| y.arity(b)).ok())
}

/// Checks the left and right unitors of a collection.
pub fn check_coll_unitors<C: CollEngine>(c: &C) -> (IsoReport, IsoReport) {
    let i = UnitColl { max_dim: c.max_dim() };
    let l = Square::new(&i, c);
    let r = Square::new(c, &i);
    let lr = iso_report(&l, c, |e| Some(lambda(e)), |x| Some(lambda_inv(c, x)));
    let rr = iso_report(&r, c, |e| Some(rho(e)), |x| Some(rho_inv(c, x)));
    (lr, rr)
}

/// The two routes from `W□(X□(Y□Z))` to `((W□X)□Y)□Z` agree.
pub fn check_coll_pentagon<W: CollEngine, X: CollEngine, Y: CollEngine, Z: CollEngine>(
    w: &W,
    x: &X,
    y: &Y,
    z: &Z,
) -> Result<usize, String> {
    let yz = Square::new(y, z);
    let xyz = Square::new(x, &yz);
    let start = Square::new(w, &xyz);
    let mut n = 0;
    for d in 0..=start.max_dim() {
        for e in start.cells(d) {
            let r1 = alpha_bar(&alpha_bar(&e).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let inner = e.1.try_map(alpha_bar).map_err(|e| e.to_string())?;
            let step = alpha_bar(&(e.0.clone(), inner)).map_err(|e| e.to_string())?;
            let ((wa, xy), zs) = step;
            let r2 = (alpha_bar(&(wa, xy)).map_err(|e| e.to_string())?, zs);
            if r1 != r2 {
                return Err(format!("pentagon fails at {e:?}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// The duoidal interchange `(A×B)□(C×D) → (A□C)×(B□D)`.
pub fn interchange<A: Clone, B: Clone, C: Clone, D: Clone>(e: &((A, B), Pd<(C, D)>)) -> ((A, Pd<C>), (B, Pd<D>)) {
    let ((a, b), psi) = e;
    ((a.clone(), psi.map(|p| p.0.clone())), (b.clone(), psi.map(|p| p.1.clone())))
}

/// The unit diagrams relating the two monoidal structures on collections,
/// checked elementwise on `A × B` and `A□B`. Returns the number of elements
/// checked, or the first failing one.
pub fn check_duoidal_units<A: CollEngine, B: CollEngine>(a: &A, b: &B) -> Result<usize, String> {
    let ab = ProductColl { a, b };
    let mut n = 0;
    for d in 0..=ab.max_dim() {
        for (x, y) in ab.cells(d) {
            // right unitor
            let r1 = (rho_inv(a, &x), rho_inv(b, &y));
            let whole = rho_inv(&ab, &(x.clone(), y.clone()));
            let delta = (whole.0.clone(), whole.1.map(|h| (*h, *h)));
            let r2 = interchange(&delta);
            if r1 != r2 {
                return Err(format!("right unit diagram at {:?}", (x, y)));
            }
            // left unitor
            let l1 = (lambda_inv(a, &x), lambda_inv(b, &y));
            let wl = lambda_inv(&ab, &(x.clone(), y.clone()));
            let l2 = interchange(&((wl.0, wl.0), wl.1.clone()));
            if l1 != l2 {
                return Err(format!("left unit diagram at {:?}", (x, y)));
            }
            n += 1;
        }
    }
    let sq = Square::new(a, b);
    for d in 0..=sq.max_dim() {
        for (x, psi) in sq.cells(d) {
            let via_pair = (a.arity(&x), psi.map(|y| (b.arity(y), y.clone())));
            let ((_, tops), _) = interchange(&((via_pair.0.clone(), x.clone()), via_pair.1.clone()));
            let phi = mu_shape(&tops).map_err(|e| e.to_string())?;
            let direct = sq.arity(&(x.clone(), psi.clone()));
            if phi != direct {
                return Err(format!("unit diagram for the terminal collection at {x:?}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// An element of the internal hom `[B, A]` over a shape: values on every
/// `B`-labelling of the shape, together with its source and target sections.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CollSection<B: Ord, A: Ord> {
    pub shape: TreeCell,
    pub top: BTreeMap<Pd<B>, A>,
    pub lower: Option<Arc<(CollSection<B, A>, CollSection<B, A>)>>,
}

impl<B: Ord + Clone, A: Ord + Clone> CollSection<B, A> {
    pub fn src(&self) -> Option<&CollSection<B, A>> {
        self.lower.as_ref().map(|l| &l.0)
    }
    pub fn tgt(&self) -> Option<&CollSection<B, A>> {
        self.lower.as_ref().map(|l| &l.1)
    }
}

type Fibre<B, A> = Rc<Vec<CollSection<B, A>>>;

/// The internal hom `[B, A]` with shapes bounded by node count.
pub struct InternalHom<B: CollEngine, A: CollEngine> {
    pub b: B,
    pub a: A,
    pub max_nodes: usize,
    pub cap: usize,
    b_index: LabelIndex<B::Cell>,
    a_by: HashMap<(TreeCell, Option<(A::Cell, A::Cell)>), Vec<A::Cell>>,
    memo: RefCell<HashMap<TreeCell, Fibre<B::Cell, A::Cell>>>,
}

impl<B: CollEngine, A: CollEngine> InternalHom<B, A> {
    pub fn new(b: B, a: A, max_nodes: usize, cap: usize) -> Self {
        let mut a_by: HashMap<_, Vec<A::Cell>> = HashMap::new();
        for c in a.all_cells() {
            let bd = a.source(&c).zip(a.target(&c));
            a_by.entry((a.arity(&c), bd)).or_default().push(c);
        }
        let b_index = LabelIndex::new(&b, b.all_cells());
        InternalHom { b, a, max_nodes, cap, b_index, a_by, memo: RefCell::new(HashMap::new()) }
    }

    pub fn labellings(&self, t: &TreeCell) -> Vec<Pd<B::Cell>> {
        self.b_index.labellings(t)
    }

    pub fn domain_index(&self) -> &LabelIndex<B::Cell> {
        &self.b_index
    }

    /// All sections over `sigma`.
    pub fn fibre(&self, sigma: &TreeCell) -> Result<Fibre<B::Cell, A::Cell>, CollError> {
        if let Some(v) = self.memo.borrow().get(sigma) {
            return Ok(v.clone());
        }
        let labs = self.b_index.labellings(sigma);
        let lower_pairs: Vec<Option<(CollSection<B::Cell, A::Cell>, CollSection<B::Cell, A::Cell>)>> = match sigma.boundary() {
            None => vec![None],
            Some(bs) => {
                let low = self.fibre(&bs)?;
                let mut v = Vec::new();
                for s in low.iter() {
                    for t in low.iter() {
                        if sigma.dim == 1 || s.lower == t.lower {
                            v.push(Some((s.clone(), t.clone())));
                        }
                    }
                }
                v
            }
        };
        let mut out = Vec::new();
        for lp in lower_pairs {
            let mut partial: Vec<BTreeMap<Pd<B::Cell>, A::Cell>> = vec![BTreeMap::new()];
            for beta in &labs {
                let ar = word_arity(beta, |x| self.b.arity(x))?;
                let bd = match &lp {
                    None => None,
                    Some((s, t)) => {
                        let bs = beta.boundary(Side::Source)?;
                        let bt = beta.boundary(Side::Target)?;
                        let (Some(x), Some(y)) = (s.top.get(&bs), t.top.get(&bt)) else {
                            return Err(CollError::Undefined(format!("{bs:?}")));
                        };
                        Some((x.clone(), y.clone()))
                    }
                };
                let cands = match self.a.cells_over(&ar, bd.as_ref().map(|(x, y)| (x, y))) {
                    Some(v) => v,
                    None => self.a_by.get(&(ar, bd)).cloned().unwrap_or_default(),
                };
                let mut next = Vec::with_capacity(partial.len() * cands.len());
                for m in &partial {
                    for c in &cands {
                        let mut m2 = m.clone();
                        m2.insert(beta.clone(), c.clone());
                        next.push(m2);
                    }
                }
                partial = next;
                if partial.len() + out.len() > self.cap {
                    return Err(CollError::TooLarge(sigma.to_string(), self.cap));
                }
            }
            let lower = lp.map(Arc::new);
            for top in partial {
                out.push(CollSection { shape: sigma.clone(), top, lower: lower.clone() });
            }
        }
        out.sort();
        let rc = Rc::new(out);
        self.memo.borrow_mut().insert(sigma.clone(), rc.clone());
        Ok(rc)
    }

    /// The identity section over the linear tree of dimension `d`.
    pub fn unit_section(&self, d: usize) -> CollSection<B::Cell, B::Cell> {
        let top = self.b.cells(d).into_iter().map(|x| (Pd::eta(&self.b, &x), x)).collect();
        let lower = (d > 0).then(|| {
            let l = self.unit_section(d - 1);
            Arc::new((l.clone(), l))
        });
        CollSection { shape: TreeCell::eta(d), top, lower }
    }
}

impl<B: CollEngine, A: CollEngine> Globe for InternalHom<B, A> {
    type Cell = CollSection<B::Cell, A::Cell>;

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        c.shape.dim
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.src().cloned()
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.tgt().cloned()
    }
}

impl<B: CollEngine, A: CollEngine> CollEngine for InternalHom<B, A> {
    fn max_dim(&self) -> usize {
        self.a.max_dim()
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        c.shape.clone()
    }
    fn cells(&self, dim: usize) -> Vec<Self::Cell> {
        let mut out = Vec::new();
        for t in enumerate_trees(dim, self.max_nodes) {
            let f = self.fibre(&TreeCell { dim, tree: t }).expect("internal hom fibre within cap");
            out.extend(f.iter().cloned());
        }
        out
    }
    fn cells_with_arity(&self, t: &TreeCell) -> Vec<Self::Cell> {
        if t.tree.node_count() > self.max_nodes {
            return Vec::new();
        }
        self.fibre(t).expect("internal hom fibre within cap").as_ref().clone()
    }
}

/// Composite of sections: `[M, C] □ [D, M] → [D, C]`. At a labelling of
/// the substituted shape, splits it along the argument shapes, applies the
/// arguments piecewise and then the head.
pub fn section_compose<D: Clone + Ord + Eq, M: Clone + Ord, C: Clone + Ord>(
    domain: &LabelIndex<D>,
    head: &CollSection<M, C>,
    args: &Pd<CollSection<D, M>>,
) -> Result<CollSection<D, C>, CollError>
where
    D: std::hash::Hash,
{
    let shapes = args.map(|s| s.shape.clone());
    if args.shape() != head.shape {
        return Err(CollError::Undefined("argument diagram does not have the head's shape".into()));
    }
    let result_shape = mu_shape(&shapes)?;
    let mut top = BTreeMap::new();
    for beta in domain.labellings(&result_shape) {
        let pieces = mu_split(&shapes, &beta)?;
        let paired = args.zip(&pieces).ok_or_else(|| CollError::Undefined("split".into()))?;
        let mids = paired.try_map(|(s, p)| s.top.get(p).cloned().ok_or_else(|| CollError::Undefined("argument section".into())))?;
        let v = head.top.get(&mids).cloned().ok_or_else(|| CollError::Undefined("head".into()))?;
        top.insert(beta, v);
    }
    let lower = match (&head.lower, head.shape.dim) {
        (Some(l), d) if d > 0 => {
            let s = section_compose(domain, &l.0, &args.boundary(Side::Source)?)?;
            let t = section_compose(domain, &l.1, &args.boundary(Side::Target)?)?;
            Some(Arc::new((s, t)))
        }
        _ => None,
    };
    Ok(CollSection { shape: result_shape, top, lower })
}

/// A globular operad: a collection with unit and composition, truncated by
/// a bound that makes some composites out of range.
pub trait GlobOperad: CollEngine {
    fn unit(&self, d: usize) -> Self::Cell;
    fn compose(&self, head: &Self::Cell, args: &Pd<Self::Cell>) -> Composite<Self::Cell>;
}

/// The terminal operad: composition is substitution of trees.
pub type TerminalOperad = Terminal;

impl GlobOperad for Terminal {
    fn unit(&self, d: usize) -> TreeCell {
        TreeCell::eta(d)
    }
    fn compose(&self, head: &TreeCell, args: &Pd<TreeCell>) -> Composite<TreeCell> {
        if args.shape() != *head {
            return Composite::Undefined;
        }
        match mu_shape(args) {
            Ok(t) if t.tree.node_count() <= self.max_nodes => Composite::Value(t),
            Ok(_) => Composite::OutOfRange,
            Err(_) => Composite::Undefined,
        }
    }
}

impl GlobOperad for UnitColl {
    fn unit(&self, d: usize) -> usize {
        d
    }
    fn compose(&self, head: &usize, args: &Pd<usize>) -> Composite<usize> {
        if args.shape() == TreeCell::eta(*head) && *args.first_leaf() == *head {
            Composite::Value(*head)
        } else {
            Composite::Undefined
        }
    }
}

/// The endomorphism operad `[X, X]` of a collection.
pub struct Gtaut<'a, X: CollEngine> {
    pub hom: InternalHom<&'a X, &'a X>,
}

impl<'a, X: CollEngine> Gtaut<'a, X> {
    pub fn new(x: &'a X, max_nodes: usize, cap: usize) -> Self {
        Gtaut { hom: InternalHom::new(x, x, max_nodes, cap) }
    }
}

impl<X: CollEngine> Globe for Gtaut<'_, X> {
    type Cell = CollSection<X::Cell, X::Cell>;

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        c.shape.dim
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.src().cloned()
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.tgt().cloned()
    }
}

impl<X: CollEngine> CollEngine for Gtaut<'_, X> {
    fn max_dim(&self) -> usize {
        self.hom.max_dim()
    }
    fn arity(&self, c: &Self::Cell) -> TreeCell {
        c.shape.clone()
    }
    fn cells(&self, dim: usize) -> Vec<Self::Cell> {
        self.hom.cells(dim)
    }
    fn cells_with_arity(&self, t: &TreeCell) -> Vec<Self::Cell> {
        self.hom.cells_with_arity(t)
    }
}

impl<X: CollEngine> GlobOperad for Gtaut<'_, X> {
    fn unit(&self, d: usize) -> Self::Cell {
        self.hom.unit_section(d)
    }
    fn compose(&self, head: &Self::Cell, args: &Pd<Self::Cell>) -> Composite<Self::Cell> {
        let shape = match mu_shape(&args.map(|s| s.shape.clone())) {
            Ok(s) => s,
            Err(_) => return Composite::Undefined,
        };
        if shape.tree.node_count() > self.hom.max_nodes {
            return Composite::OutOfRange;
        }
        match section_compose(self.hom.domain_index(), head, args) {
            Ok(s) => Composite::Value(s),
            Err(_) => Composite::Undefined,
        }
    }
}

fn viol(law: &str, witness: String) -> OperadViolation {
    OperadViolation { law: law.into(), witness }
}

/// Checks the globular operad axioms on all cells within the bound; the
/// associativity check visits at most `cap` elements of `O□(O□O)` per
/// dimension.
pub fn glob_operad_validate<O: GlobOperad>(o: &O, cap: usize) -> Vec<OperadViolation> {
    let mut out = Vec::new();
    for d in 0..=o.max_dim() {
        let u = o.unit(d);
        if o.arity(&u) != TreeCell::eta(d) {
            out.push(viol("unit-arity", format!("{d}")));
        }
        if d > 0 && (o.source(&u) != Some(o.unit(d - 1)) || o.target(&u) != Some(o.unit(d - 1))) {
            out.push(viol("unit-globular", format!("{d}")));
        }
        for c in o.cells(d) {
            match o.compose(&o.unit(d), &Pd::eta(o, &c)) {
                Composite::Value(v) if v == c => {}
                Composite::OutOfRange => {}
                _ => out.push(viol("left-unit", format!("{c:?}"))),
            }
            let units = o.arity(&c).to_pd().map(|h| o.unit(*h));
            match o.compose(&c, &units) {
                Composite::Value(v) if v == c => {}
                Composite::OutOfRange => {}
                _ => out.push(viol("right-unit", format!("{c:?}"))),
            }
        }
    }
    let oo = Square::new(o, o);
    for d in 0..=o.max_dim() {
        for (c, psi) in oo.bounded_cells(d, cap, 1) {
            let v = match o.compose(&c, &psi) {
                Composite::Value(v) => v,
                Composite::OutOfRange => continue,
                Composite::Undefined => {
                    out.push(viol("defined", format!("{c:?} {psi:?}")));
                    continue;
                }
            };
            if Ok(o.arity(&v)) != word_arity(&psi, |x| o.arity(x)) {
                out.push(viol("composite-arity", format!("{c:?} {psi:?}")));
            }
            if d > 0 {
                for side in [Side::Source, Side::Target] {
                    let lo = if side == Side::Source { o.source(&c) } else { o.target(&c) }.unwrap();
                    let want = o.compose(&lo, &psi.boundary(side).unwrap());
                    let have = if side == Side::Source { o.source(&v) } else { o.target(&v) }.unwrap();
                    if let Composite::Value(w) = want {
                        if w != have {
                            out.push(viol("composite-globular", format!("{c:?} {psi:?}")));
                        }
                    }
                }
            }
        }
    }
    let ooo = Square::new(o, &oo);
    for d in 0..=o.max_dim() {
        for (c, big) in ooo.bounded_cells(d, cap, 2) {
            let heads = big.map(|(b, _)| b.clone());
            let inner = big.map(|(_, p)| p.clone());
            let Ok(flat) = mu(&inner) else {
                out.push(viol("defined", format!("{c:?} {big:?}")));
                continue;
            };
            let lhs = match o.compose(&c, &heads) {
                Composite::Value(v) => o.compose(&v, &flat),
                other => other,
            };
            let mut mids = Vec::new();
            let mut range = true;
            for (b, p) in big.labels() {
                match o.compose(&b, &p) {
                    Composite::Value(v) => mids.push(v),
                    _ => range = false,
                }
            }
            if !range {
                continue;
            }
            let mut it = mids.into_iter();
            let mid_pd = big.map(|_| it.next().unwrap());
            let rhs = o.compose(&c, &mid_pd);
            match (lhs, rhs) {
                (Composite::Value(l), Composite::Value(r)) if l != r => {
                    out.push(viol("associativity", format!("{c:?} {big:?}")))
                }
                _ => {}
            }
        }
    }
    out
}

/// Checks an algebra for a globular operad on a degenerate collection, by the
/// action diagrams and through the curried map into `[A, A]`.
pub fn glob_operad_algebra_check<O: GlobOperad, A: CollEngine>(
    o: &O,
    a: &A,
    act: &dyn Fn(&O::Cell, &Pd<A::Cell>) -> Option<A::Cell>,
    max_nodes: usize,
    cap: usize,
) -> AlgebraReport {
    let mut action_route = Vec::new();
    for d in 0..=a.max_dim() {
        for x in a.cells(d) {
            if !a.arity(&x).tree.children.is_empty() {
                action_route.push(viol("degenerate", format!("{x:?}")));
            }
        }
    }
    let oa = Square::new(o, a);
    for d in 0..=oa.max_dim() {
        for (c, psi) in oa.bounded_cells(d, cap, 3) {
            let Some(v) = act(&c, &psi) else {
                action_route.push(viol("total", format!("{c:?} {psi:?}")));
                continue;
            };
            if a.cell_dim(&v) != d {
                action_route.push(viol("dimension", format!("{c:?} {psi:?}")));
            }
            if d > 0 {
                let s = act(&o.source(&c).unwrap(), &psi.boundary(Side::Source).unwrap());
                let t = act(&o.target(&c).unwrap(), &psi.boundary(Side::Target).unwrap());
                if s != a.source(&v) || t != a.target(&v) {
                    action_route.push(viol("globular", format!("{c:?} {psi:?}")));
                }
            }
        }
    }
    for d in 0..=a.max_dim() {
        for x in a.cells(d) {
            if act(&o.unit(d), &Pd::eta(a, &x)).as_ref() != Some(&x) {
                action_route.push(viol("unit", format!("{x:?}")));
            }
        }
    }
    let ooa = Square::new(o, &oa);
    for d in 0..=ooa.max_dim() {
        for (c, big) in ooa.bounded_cells(d, cap, 4) {
            let heads = big.map(|(b, _)| b.clone());
            let Ok(flat) = mu(&big.map(|(_, p)| p.clone())) else { continue };
            let Composite::Value(h) = o.compose(&c, &heads) else { continue };
            let lhs = act(&h, &flat);
            let mids: Option<Vec<A::Cell>> = big.labels().iter().map(|(b, p)| act(b, p)).collect();
            let Some(mids) = mids else { continue };
            let mut it = mids.into_iter();
            let rhs = act(&c, &big.map(|_| it.next().unwrap()));
            if lhs != rhs {
                action_route.push(viol("associativity", format!("{c:?} {big:?}")));
            }
        }
    }
    let mut hom_route = Vec::new();
    let gt = Gtaut::new(a, max_nodes, usize::MAX);
    let idx = gt.hom.domain_index();
    fn curry<O: GlobOperad, A: CollEngine>(
        o: &O,
        idx: &LabelIndex<A::Cell>,
        act: &dyn Fn(&O::Cell, &Pd<A::Cell>) -> Option<A::Cell>,
        c: &O::Cell,
    ) -> Option<CollSection<A::Cell, A::Cell>> {
        let shape = o.arity(c);
        let mut top = BTreeMap::new();
        for beta in idx.labellings(&shape) {
            let v = act(c, &beta)?;
            top.insert(beta, v);
        }
        let lower = match (o.source(c), o.target(c)) {
            (Some(s), Some(t)) => Some(Arc::new((curry::<O, A>(o, idx, act, &s)?, curry::<O, A>(o, idx, act, &t)?))),
            _ => None,
        };
        Some(CollSection { shape, top, lower })
    }
    for d in 0..=o.max_dim().min(a.max_dim()) {
        if curry::<O, A>(o, idx, act, &o.unit(d)).as_ref() != Some(&gt.unit(d)) {
            hom_route.push(viol("unit", format!("{d}")));
        }
    }
    let oo = Square::new(o, o);
    for d in 0..=oo.max_dim().min(a.max_dim()) {
        for (c, psi) in oo.bounded_cells(d, cap, 5) {
            let Composite::Value(v) = o.compose(&c, &psi) else { continue };
            let lhs = curry::<O, A>(o, idx, act, &v);
            let head = curry::<O, A>(o, idx, act, &c);
            let args: Option<Pd<_>> = psi.try_map(|x| curry::<O, A>(o, idx, act, x).ok_or(())).ok();
            let rhs = match (head, args) {
                (Some(h), Some(g)) => section_compose(idx, &h, &g).ok(),
                _ => None,
            };
            if lhs.is_none() || lhs != rhs {
                hom_route.push(viol("composition", format!("{c:?} {psi:?}")));
            }
        }
    }
    if action_route.iter().any(|v| v.law == "total" || v.law == "degenerate") {
        hom_route = action_route.clone();
    }
    AlgebraReport { action_route, hom_route }
}

/// All collection maps `x → y`.
pub fn enumerate_coll_maps<X: CollEngine, Y: CollEngine>(x: &X, y: &Y, limit: usize) -> Option<Vec<BTreeMap<X::Cell, Y::Cell>>> {
    let cells = x.all_cells();
    let mut out = Vec::new();
    fn go<X: CollEngine, Y: CollEngine>(
        x: &X,
        y: &Y,
        cells: &[X::Cell],
        i: usize,
        cur: &mut BTreeMap<X::Cell, Y::Cell>,
        out: &mut Vec<BTreeMap<X::Cell, Y::Cell>>,
        limit: usize,
    ) -> bool {
        if i == cells.len() {
            out.push(cur.clone());
            return out.len() <= limit;
        }
        let c = &cells[i];
        let want = x.source(c).map(|s| (cur[&s].clone(), cur[&x.target(c).unwrap()].clone()));
        for v in y.cells_with_arity(&x.arity(c)) {
            if let Some((s, t)) = &want {
                if y.source(&v).as_ref() != Some(s) || y.target(&v).as_ref() != Some(t) {
                    continue;
                }
            }
            cur.insert(c.clone(), v);
            if !go(x, y, cells, i + 1, cur, out, limit) {
                return false;
            }
        }
        cur.remove(c);
        true
    }
    go(x, y, &cells, 0, &mut BTreeMap::new(), &mut out, limit).then_some(out)
}

/// Curries a map `X□B → Y` into a map `X → [B, Y]`.
pub fn curry_coll_map<X: CollEngine, B: CollEngine, Y: CollEngine>(
    x: &X,
    hom: &InternalHom<B, Y>,
    f: &BTreeMap<(X::Cell, Pd<B::Cell>), Y::Cell>,
) -> Option<BTreeMap<X::Cell, CollSection<B::Cell, Y::Cell>>> {
    fn one<X: CollEngine, B: CollEngine, Y: CollEngine>(
        x: &X,
        hom: &InternalHom<B, Y>,
        f: &BTreeMap<(X::Cell, Pd<B::Cell>), Y::Cell>,
        c: &X::Cell,
    ) -> Option<CollSection<B::Cell, Y::Cell>> {
        let shape = x.arity(c);
        let mut top = BTreeMap::new();
        for beta in hom.labellings(&shape) {
            top.insert(beta.clone(), f.get(&(c.clone(), beta))?.clone());
        }
        let lower = match (x.source(c), x.target(c)) {
            (Some(s), Some(t)) => Some(Arc::new((one(x, hom, f, &s)?, one(x, hom, f, &t)?))),
            _ => None,
        };
        Some(CollSection { shape, top, lower })
    }
    x.all_cells().into_iter().map(|c| one(x, hom, f, &c).map(|s| (c, s))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, d: usize) -> TreeCell {
        TreeCell::new(s.parse().unwrap(), d)
    }

    /// A 1-dimensional collection: a binary operation `m` on a point.
    fn binary() -> Collection {
        let mut g = GlobularSet::new(1);
        g.add0("*").unwrap();
        g.add(1, "m", "*", "*").unwrap();
        Collection::new(g, |c| if c.dim == 0 { t("[]", 0) } else { t("[[],[]]", 1) })
    }

    fn arrow_deg() -> Collection {
        let mut g = GlobularSet::new(1);
        g.add0("p").unwrap();
        g.add0("q").unwrap();
        g.add(1, "f", "p", "q").unwrap();
        Collection::degenerate(g)
    }

    #[test]
    fn collection_validation() {
        assert!(binary().validate().is_empty());
        let mut bad = binary();
        bad.arities[1][0] = t("[[[]]]", 2);
        assert!(!bad.validate().is_empty());
        let v = binary().to_json();
        assert_eq!(Collection::from_json(&v).unwrap(), binary());
    }

    #[test]
    fn square_with_unit() {
        let b = binary();
        let i = UnitColl { max_dim: 1 };
        let (l, r) = check_coll_unitors(&b);
        assert!(l.ok() && r.ok(), "{l:?} {r:?}");
        let sq = Square::new(&b, &i);
        assert_eq!(sq.cells(1).len(), 1);
    }

    #[test]
    fn associator_on_small_collections() {
        let b = binary();
        let a = arrow_deg();
        assert!(check_coll_associator(&b, &b, &b).ok());
        assert!(check_coll_associator(&b, &a, &b).ok());
        assert!(check_coll_associator(&a, &b, &a).ok());
        let n = check_coll_pentagon(&b, &b, &b, &b).unwrap();
        assert!(n > 0);
    }

    #[test]
    fn duoidal_units() {
        let b = binary();
        let n = check_duoidal_units(&b, &b).unwrap();
        assert!(n > 0);
    }

    #[test]
    fn terminal_operad_is_valid() {
        let o = Terminal { max_dim: 2, max_nodes: 4 };
        assert!(glob_operad_validate(&o, 500).is_empty());
    }

    #[test]
    fn gtaut_of_arrow_is_valid() {
        let a = arrow_deg();
        let g = Gtaut::new(&a, 3, 100_000);
        let v = glob_operad_validate(&g, 300);
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn adjunction_cardinality() {
        let x = binary();
        let b = arrow_deg();
        let y = arrow_deg();
        let xb = Square::new(&x, &b);
        let left = enumerate_coll_maps(&xb, &y, 100_000).unwrap();
        let hom = InternalHom::new(&b, &y, 4, 100_000);
        let right = enumerate_coll_maps(&x, &hom, 100_000).unwrap();
        assert_eq!(left.len(), right.len());
        let mut seen = BTreeSet::new();
        for f in &left {
            let c = curry_coll_map(&x, &hom, f).unwrap();
            assert!(right.contains(&c));
            assert!(seen.insert(c));
        }
    }

    #[test]
    fn terminal_algebra_is_strict_category_eval() {
        use crate::pasting::eval;
        use crate::strict::z2_groupoid;
        let cat = z2_groupoid();
        let a = Collection::degenerate(cat.glob.clone());
        let o = Terminal { max_dim: 1, max_nodes: 3 };
        let act = |_: &TreeCell, psi: &Pd<CellRef>| eval(&cat, psi).ok();
        let r = glob_operad_algebra_check(&o, &a, &act, 3, 1000);
        assert!(r.ok(), "{r:?}");
        let mut broken = cat.clone();
        let s0 = broken.glob.lookup("s0").unwrap();
        let i0 = broken.glob.lookup("i0").unwrap();
        broken.compose.insert((s0, i0, 0), i0);
        let act2 = |_: &TreeCell, psi: &Pd<CellRef>| eval(&broken, psi).ok();
        let r2 = glob_operad_algebra_check(&o, &a, &act2, 3, 1000);
        assert!(!r2.ok());
        assert!(r2.routes_agree());
    }
}

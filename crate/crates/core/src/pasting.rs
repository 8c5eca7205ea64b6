//! Batanin trees, labelled pasting diagrams and the free strict
//! ω-category monad built from them.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::globset::Globe;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Tree {
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Self {
        Tree { children: Vec::new() }
    }

    pub fn node(children: Vec<Tree>) -> Self {
        Tree { children }
    }

    /// The linear tree of the given height.
    pub fn linear(height: usize) -> Self {
        let mut t = Tree::leaf();
        for _ in 0..height {
            t = Tree::node(vec![t]);
        }
        t
    }

    /// Root with `n` leaf children.
    pub fn corolla(n: usize) -> Self {
        Tree::node(vec![Tree::leaf(); n])
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn truncate(&self, k: usize) -> Tree {
        if k == 0 {
            return Tree::leaf();
        }
        Tree::node(self.children.iter().map(|c| c.truncate(k - 1)).collect())
    }

    /// Number of nodes at height exactly `h`.
    pub fn nodes_at(&self, h: usize) -> usize {
        if h == 0 {
            1
        } else {
            self.children.iter().map(|c| c.nodes_at(h - 1)).sum()
        }
    }

    pub fn leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(Tree::leaves).sum()
        }
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.node_count()
            .cmp(&other.node_count())
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("tree syntax error at byte {pos}: {msg}")]
pub struct TreeParseError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for Tree {
    type Err = TreeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes: Vec<(usize, u8)> = s.bytes().enumerate().filter(|(_, b)| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let t = parse_tree(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(TreeParseError { pos: bytes[pos].0, msg: "trailing input".into() });
        }
        Ok(t)
    }
}

fn parse_tree(b: &[(usize, u8)], pos: &mut usize) -> Result<Tree, TreeParseError> {
    let end = b.last().map_or(0, |x| x.0 + 1);
    let err = |p: usize, m: &str| TreeParseError { pos: b.get(p).map_or(end, |x| x.0), msg: m.into() };
    if b.get(*pos).map(|x| x.1) != Some(b'[') {
        return Err(err(*pos, "expected `[`"));
    }
    *pos += 1;
    let mut children = Vec::new();
    if b.get(*pos).map(|x| x.1) == Some(b']') {
        *pos += 1;
        return Ok(Tree::node(children));
    }
    loop {
        children.push(parse_tree(b, pos)?);
        match b.get(*pos).map(|x| x.1) {
            Some(b',') => *pos += 1,
            Some(b']') => {
                *pos += 1;
                return Ok(Tree::node(children));
            }
            _ => return Err(err(*pos, "expected `,` or `]`")),
        }
    }
}

/// A cell of the free strict ω-category on the terminal globular set: a
/// tree of height at most `dim`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TreeCell {
    pub dim: usize,
    pub tree: Tree,
}

impl TreeCell {
    pub fn new(tree: Tree, dim: usize) -> Self {
        debug_assert!(tree.height() <= dim);
        TreeCell { dim, tree }
    }

    /// The degenerate cell: a single leaf viewed in dimension `dim`.
    pub fn degenerate(dim: usize) -> Self {
        TreeCell { dim, tree: Tree::leaf() }
    }

    /// The unit of the monad on the terminal globular set.
    pub fn eta(dim: usize) -> Self {
        TreeCell { dim, tree: Tree::linear(dim) }
    }

    pub fn is_valid(&self) -> bool {
        self.tree.height() <= self.dim
    }

    pub fn boundary(&self) -> Option<TreeCell> {
        (self.dim > 0).then(|| TreeCell { dim: self.dim - 1, tree: self.tree.truncate(self.dim - 1) })
    }

    pub fn to_pd(&self) -> Pd<usize> {
        fn go(t: &Tree, h: usize) -> PdNode<usize> {
            PdNode { gaps: vec![h; t.children.len() + 1], children: t.children.iter().map(|c| go(c, h + 1)).collect() }
        }
        Pd { dim: self.dim, root: go(&self.tree, 0) }
    }

    pub fn to_json(&self) -> Value {
        json!({ "tree": self.tree.to_string(), "dim": self.dim })
    }
}

impl fmt::Display for TreeCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.tree, self.dim)
    }
}

/// Trees as a globular set: the terminal globular set pushed through the monad.
#[derive(Clone, Copy, Debug, Default)]
pub struct TreeGlobe;

impl Globe for TreeGlobe {
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

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PdNode<C> {
    pub gaps: Vec<C>,
    pub children: Vec<PdNode<C>>,
}

/// A labelled pasting diagram of dimension `dim`. A node at height `k`
/// with `m` children carries `m + 1` gap labels of dimension `k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Pd<C> {
    pub dim: usize,
    pub root: PdNode<C>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdError {
    #[error("malformed node: {0}")]
    Malformed(String),
    #[error("tree of height {height} does not fit dimension {dim}")]
    TooTall { height: usize, dim: usize },
    #[error("label at {path:?} gap {gap} has dimension {found}, expected {expected}")]
    LabelDim { path: Vec<usize>, gap: usize, found: usize, expected: usize },
    #[error("label at {path:?} gap {gap} does not match the surrounding gaps")]
    Incompatible { path: Vec<usize>, gap: usize },
    #[error("0-dimensional diagram has no boundary")]
    NoBoundary,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("cannot compose along {k} in dimension {dim}")]
    BadLevel { k: usize, dim: usize },
    #[error("boundaries do not agree for composition along {0}")]
    NotComposable(usize),
    #[error("diagram cannot be split along the given shapes: {0}")]
    Split(String),
    #[error("bad diagram JSON: {0}")]
    Json(String),
}

impl<C> PdNode<C> {
    pub fn leaf(label: C) -> Self {
        PdNode { gaps: vec![label], children: Vec::new() }
    }

    fn shape(&self) -> Tree {
        Tree::node(self.children.iter().map(PdNode::shape).collect())
    }

    fn map<D>(&self, f: &mut impl FnMut(&C) -> D) -> PdNode<D> {
        PdNode {
            gaps: self.gaps.iter().map(&mut *f).collect(),
            children: self.children.iter().map(|c| c.map(f)).collect(),
        }
    }

    fn try_map<D, E>(&self, f: &mut impl FnMut(&C) -> Result<D, E>) -> Result<PdNode<D>, E> {
        Ok(PdNode {
            gaps: self.gaps.iter().map(&mut *f).collect::<Result<_, _>>()?,
            children: self.children.iter().map(|c| c.try_map(f)).collect::<Result<_, _>>()?,
        })
    }

    fn visit<'a>(&'a self, path: &mut Vec<usize>, h: usize, f: &mut impl FnMut(&[usize], usize, usize, &'a C)) {
        for (g, c) in self.gaps.iter().enumerate() {
            f(path, h, g, c);
        }
        for (i, ch) in self.children.iter().enumerate() {
            path.push(i);
            ch.visit(path, h + 1, f);
            path.pop();
        }
    }
}

impl<C: Clone> Pd<C> {
    pub fn shape(&self) -> TreeCell {
        TreeCell { dim: self.dim, tree: self.root.shape() }
    }

    pub fn map<D>(&self, mut f: impl FnMut(&C) -> D) -> Pd<D> {
        Pd { dim: self.dim, root: self.root.map(&mut f) }
    }

    pub fn try_map<D, E>(&self, mut f: impl FnMut(&C) -> Result<D, E>) -> Result<Pd<D>, E> {
        Ok(Pd { dim: self.dim, root: self.root.try_map(&mut f)? })
    }

    /// Pairs labels position by position; `None` if the trees differ.
    pub fn zip<D: Clone>(&self, other: &Pd<D>) -> Option<Pd<(C, D)>> {
        fn go<C: Clone, D: Clone>(a: &PdNode<C>, b: &PdNode<D>) -> Option<PdNode<(C, D)>> {
            if a.children.len() != b.children.len() || a.gaps.len() != b.gaps.len() {
                return None;
            }
            Some(PdNode {
                gaps: a.gaps.iter().cloned().zip(b.gaps.iter().cloned()).collect(),
                children: a.children.iter().zip(&b.children).map(|(x, y)| go(x, y)).collect::<Option<_>>()?,
            })
        }
        if self.dim != other.dim {
            return None;
        }
        Some(Pd { dim: self.dim, root: go(&self.root, &other.root)? })
    }

    /// The label of the leftmost deepest leaf reached by first children.
    pub fn first_leaf(&self) -> &C {
        let mut n = &self.root;
        while let Some(c) = n.children.first() {
            n = c;
        }
        &n.gaps[0]
    }

    /// Calls `f(path, height, gap, label)` on every label in preorder.
    pub fn for_each_label<'a>(&'a self, mut f: impl FnMut(&[usize], usize, usize, &'a C)) {
        self.root.visit(&mut Vec::new(), 0, &mut f);
    }

    pub fn labels(&self) -> Vec<C> {
        let mut out = Vec::new();
        self.for_each_label(|_, _, _, c| out.push(c.clone()));
        out
    }

    /// Labels together with their heights, in preorder.
    pub fn labels_with_height(&self) -> Vec<(usize, C)> {
        let mut out = Vec::new();
        self.for_each_label(|_, h, _, c| out.push((h, c.clone())));
        out
    }

    pub fn label_count(&self) -> usize {
        let mut n = 0;
        self.for_each_label(|_, _, _, _| n += 1);
        n
    }

    /// The single-cell diagram on an `n`-cell.
    pub fn eta<G: Globe<Cell = C>>(g: &G, x: &C) -> Pd<C> {
        let n = g.cell_dim(x);
        let mut chain = vec![x.clone()];
        while let Some(s) = g.source(chain.last().unwrap()) {
            chain.push(s);
        }
        // chain[i] is the (n - i)-dimensional iterated source; targets fill the right gaps
        let mut tchain = vec![x.clone()];
        while let Some(t) = g.target(tchain.last().unwrap()) {
            tchain.push(t);
        }
        let mut node = PdNode::leaf(x.clone());
        for k in (0..n).rev() {
            let i = n - k;
            node = PdNode { gaps: vec![chain[i].clone(), tchain[i].clone()], children: vec![node] };
        }
        Pd { dim: n, root: node }
    }

    /// The identity on this diagram, one dimension up.
    pub fn bump(&self) -> Pd<C> {
        Pd { dim: self.dim + 1, root: self.root.clone() }
    }

    pub fn boundary(&self, side: Side) -> Result<Pd<C>, PdError> {
        if self.dim == 0 {
            return Err(PdError::NoBoundary);
        }
        fn go<C: Clone>(n: &PdNode<C>, h: usize, top: usize, side: Side) -> PdNode<C> {
            if h == top {
                let g = match side {
                    Side::Source => n.gaps[0].clone(),
                    Side::Target => n.gaps.last().unwrap().clone(),
                };
                return PdNode::leaf(g);
            }
            PdNode { gaps: n.gaps.clone(), children: n.children.iter().map(|c| go(c, h + 1, top, side)).collect() }
        }
        Ok(Pd { dim: self.dim - 1, root: go(&self.root, 0, self.dim - 1, side) })
    }

    /// The iterated boundary down to dimension `k`.
    pub fn boundary_to(&self, side: Side, k: usize) -> Result<Pd<C>, PdError> {
        let mut d = self.clone();
        while d.dim > k {
            d = d.boundary(side)?;
        }
        Ok(d)
    }

    /// Checks well-formedness against a globular structure on the labels.
    pub fn validate<G: Globe<Cell = C>>(&self, g: &G) -> Result<(), PdError>
    where
        C: Eq,
    {
        fn go<G: Globe>(
            g: &G,
            n: &PdNode<G::Cell>,
            h: usize,
            path: &mut Vec<usize>,
            parent: Option<(&G::Cell, &G::Cell)>,
        ) -> Result<(), PdError> {
            if n.gaps.len() != n.children.len() + 1 {
                return Err(PdError::Malformed(format!("node {path:?} has {} gaps", n.gaps.len())));
            }
            for (i, y) in n.gaps.iter().enumerate() {
                let d = g.cell_dim(y);
                if d != h {
                    return Err(PdError::LabelDim { path: path.clone(), gap: i, found: d, expected: h });
                }
                if let Some((s, t)) = parent {
                    if g.source(y).as_ref() != Some(s) || g.target(y).as_ref() != Some(t) {
                        return Err(PdError::Incompatible { path: path.clone(), gap: i });
                    }
                }
            }
            for (j, c) in n.children.iter().enumerate() {
                path.push(j);
                go(g, c, h + 1, path, Some((&n.gaps[j], &n.gaps[j + 1])))?;
                path.pop();
            }
            Ok(())
        }
        let height = self.root.shape().height();
        if height > self.dim {
            return Err(PdError::TooTall { height, dim: self.dim });
        }
        go(g, &self.root, 0, &mut Vec::new(), None)
    }

    /// Composition along `k`, `a` first. Shared boundary labels are combined
    /// with `merge`, which may reject them.
    pub fn compose_with<E>(
        a: &Pd<C>,
        b: &Pd<C>,
        k: usize,
        merge: &mut dyn FnMut(&C, &C) -> Result<C, E>,
    ) -> Result<Result<Pd<C>, E>, PdError> {
        if a.dim != b.dim {
            return Err(PdError::DimMismatch(a.dim, b.dim));
        }
        if k >= a.dim {
            return Err(PdError::BadLevel { k, dim: a.dim });
        }
        fn go<C: Clone, E>(
            a: &PdNode<C>,
            b: &PdNode<C>,
            h: usize,
            k: usize,
            merge: &mut dyn FnMut(&C, &C) -> Result<C, E>,
        ) -> Result<Result<PdNode<C>, E>, PdError> {
            if h < k {
                if a.children.len() != b.children.len() {
                    return Err(PdError::NotComposable(k));
                }
                let mut gaps = Vec::with_capacity(a.gaps.len());
                for (x, y) in a.gaps.iter().zip(&b.gaps) {
                    match merge(x, y) {
                        Ok(z) => gaps.push(z),
                        Err(e) => return Ok(Err(e)),
                    }
                }
                let mut children = Vec::with_capacity(a.children.len());
                for (x, y) in a.children.iter().zip(&b.children) {
                    match go(x, y, h + 1, k, merge)? {
                        Ok(z) => children.push(z),
                        Err(e) => return Ok(Err(e)),
                    }
                }
                return Ok(Ok(PdNode { gaps, children }));
            }
            let mut gaps: Vec<C> = a.gaps[..a.gaps.len() - 1].to_vec();
            match merge(a.gaps.last().unwrap(), &b.gaps[0]) {
                Ok(z) => gaps.push(z),
                Err(e) => return Ok(Err(e)),
            }
            gaps.extend(b.gaps[1..].iter().cloned());
            let children = a.children.iter().chain(&b.children).cloned().collect();
            Ok(Ok(PdNode { gaps, children }))
        }
        Ok(go(&a.root, &b.root, 0, k, merge)?.map(|root| Pd { dim: a.dim, root }))
    }

    /// Checked composition: the shared labels must coincide.
    pub fn compose(a: &Pd<C>, b: &Pd<C>, k: usize) -> Result<Pd<C>, PdError>
    where
        C: Eq,
    {
        let mut m = |x: &C, y: &C| if x == y { Ok(x.clone()) } else { Err(()) };
        Pd::compose_with(a, b, k, &mut m)?.map_err(|_| PdError::NotComposable(k))
    }

    pub fn to_json(&self, cell: impl Fn(&C) -> Value) -> Value {
        let mut labels = Vec::new();
        self.for_each_label(|p, _, g, c| labels.push(json!({ "path": p, "gap": g, "cell": cell(c) })));
        json!({ "tree": self.shape().tree.to_string(), "dim": self.dim, "labels": labels })
    }

    pub fn from_json(v: &Value, mut cell: impl FnMut(&Value) -> Result<C, String>) -> Result<Pd<C>, PdError> {
        let bad = |m: String| PdError::Json(m);
        let tree: Tree = v
            .get("tree")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing tree".into()))?
            .parse()
            .map_err(|e: TreeParseError| bad(e.to_string()))?;
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing dim".into()))? as usize;
        let mut map: BTreeMap<(Vec<usize>, usize), C> = BTreeMap::new();
        for l in v.get("labels").and_then(Value::as_array).ok_or_else(|| bad("missing labels".into()))? {
            let path: Vec<usize> = l
                .get("path")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("label without path".into()))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("bad path".into())))
                .collect::<Result<_, _>>()?;
            let gap = l.get("gap").and_then(Value::as_u64).ok_or_else(|| bad("label without gap".into()))? as usize;
            let c = cell(l.get("cell").ok_or_else(|| bad("label without cell".into()))?).map_err(bad)?;
            if map.insert((path.clone(), gap), c).is_some() {
                return Err(bad(format!("duplicate label at {path:?} gap {gap}")));
            }
        }
        fn build<C>(t: &Tree, path: &mut Vec<usize>, map: &mut BTreeMap<(Vec<usize>, usize), C>) -> Result<PdNode<C>, PdError> {
            let mut gaps = Vec::new();
            for g in 0..=t.children.len() {
                gaps.push(
                    map.remove(&(path.clone(), g))
                        .ok_or_else(|| PdError::Json(format!("missing label at {path:?} gap {g}")))?,
                );
            }
            let mut children = Vec::new();
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                children.push(build(c, path, map)?);
                path.pop();
            }
            Ok(PdNode { gaps, children })
        }
        let root = build(&tree, &mut Vec::new(), &mut map)?;
        if let Some(((p, g), _)) = map.into_iter().next() {
            return Err(bad(format!("label at {p:?} gap {g} is outside the tree")));
        }
        Ok(Pd { dim, root })
    }
}

/// Pasting diagrams over a globular structure form a globular structure.
#[derive(Clone, Copy, Debug, Default)]
pub struct PdGlobe<G>(pub G);

impl<G: Globe> Globe for PdGlobe<G> {
    type Cell = Pd<G::Cell>;

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        c.dim
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.boundary(Side::Source).ok()
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        c.boundary(Side::Target).ok()
    }
}

/// Composition and identities of a strict ω-category, in diagrammatic order:
/// `compose(a, b, k)` needs the `k`-target of `a` to be the `k`-source of `b`.
pub trait OmegaOps {
    type Cell: Clone;
    type Error;

    fn identity(&self, c: &Self::Cell) -> Result<Self::Cell, Self::Error>;
    fn compose(&self, a: &Self::Cell, b: &Self::Cell, k: usize) -> Result<Self::Cell, Self::Error>;
}

/// Evaluates a pasting diagram: leaves become iterated identities and the
/// children of a height-`k` node are composed left to right along `k`.
pub fn eval<O: OmegaOps>(ops: &O, d: &Pd<O::Cell>) -> Result<O::Cell, O::Error> {
    fn go<O: OmegaOps>(ops: &O, n: &PdNode<O::Cell>, h: usize, top: usize) -> Result<O::Cell, O::Error> {
        if n.children.is_empty() {
            let mut c = n.gaps[0].clone();
            for _ in h..top {
                c = ops.identity(&c)?;
            }
            return Ok(c);
        }
        let mut acc = go(ops, &n.children[0], h + 1, top)?;
        for ch in &n.children[1..] {
            let next = go(ops, ch, h + 1, top)?;
            acc = ops.compose(&acc, &next, h)?;
        }
        Ok(acc)
    }
    go(ops, &d.root, 0, d.dim)
}

/// The free strict ω-category structure on pasting diagrams.
pub struct PdOps<C>(std::marker::PhantomData<C>);

impl<C> Default for PdOps<C> {
    fn default() -> Self {
        PdOps(std::marker::PhantomData)
    }
}

impl<C: Clone + Eq> OmegaOps for PdOps<C> {
    type Cell = Pd<C>;
    type Error = PdError;

    fn identity(&self, c: &Pd<C>) -> Result<Pd<C>, PdError> {
        Ok(c.bump())
    }
    fn compose(&self, a: &Pd<C>, b: &Pd<C>, k: usize) -> Result<Pd<C>, PdError> {
        Pd::compose(a, b, k)
    }
}

/// Monad multiplication: flattens a diagram of diagrams.
pub fn mu<C: Clone + Eq>(outer: &Pd<Pd<C>>) -> Result<Pd<C>, PdError> {
    eval(&PdOps::<C>::default(), outer)
}

/// Monad multiplication on trees alone: substitutes an arity tree into each
/// position of a tree-labelled diagram.
pub fn mu_shape(outer: &Pd<TreeCell>) -> Result<TreeCell, PdError> {
    Ok(mu(&outer.map(TreeCell::to_pd))?.shape())
}

/// The arity of a word: substitution of the label arities into its shape.
pub fn word_arity<C: Clone>(psi: &Pd<C>, arity: impl Fn(&C) -> TreeCell) -> Result<TreeCell, PdError> {
    mu_shape(&psi.map(arity))
}

struct TokenOps {
    parent: RefCell<Vec<usize>>,
}

impl TokenOps {
    fn find(&self, x: usize) -> usize {
        let mut p = self.parent.borrow_mut();
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
}

impl OmegaOps for TokenOps {
    type Cell = Pd<usize>;
    type Error = PdError;

    fn identity(&self, c: &Pd<usize>) -> Result<Pd<usize>, PdError> {
        Ok(c.bump())
    }
    fn compose(&self, a: &Pd<usize>, b: &Pd<usize>, k: usize) -> Result<Pd<usize>, PdError> {
        let mut m = |x: &usize, y: &usize| -> Result<usize, ()> {
            let (rx, ry) = (self.find(*x), self.find(*y));
            if rx != ry {
                self.parent.borrow_mut()[ry] = rx;
            }
            Ok(*x)
        };
        Ok(Pd::compose_with(a, b, k, &mut m)?.unwrap())
    }
}

/// Splits a flat diagram along a diagram of shapes: the inverse of [`mu`]
/// restricted to diagrams whose labels have the given shapes.
pub fn mu_split<C: Clone + Eq>(shapes: &Pd<TreeCell>, flat: &Pd<C>) -> Result<Pd<Pd<C>>, PdError> {
    let mut next = 0usize;
    let mut assign = |tc: &TreeCell, next: &mut usize| -> Pd<usize> {
        tc.to_pd().map(|_| {
            *next += 1;
            *next - 1
        })
    };
    fn tok_node(
        n: &PdNode<TreeCell>,
        next: &mut usize,
        assign: &mut dyn FnMut(&TreeCell, &mut usize) -> Pd<usize>,
    ) -> PdNode<Option<Pd<usize>>> {
        if n.children.is_empty() {
            return PdNode::leaf(Some(assign(&n.gaps[0], next)));
        }
        PdNode {
            gaps: vec![None; n.gaps.len()],
            children: n.children.iter().map(|c| tok_node(c, next, assign)).collect(),
        }
    }
    let toks = Pd { dim: shapes.dim, root: tok_node(&shapes.root, &mut next, &mut assign) };
    let dummy = Pd { dim: 0, root: PdNode::leaf(usize::MAX) };
    let outer = toks.map(|o| o.clone().unwrap_or_else(|| dummy.clone()));
    let ops = TokenOps { parent: RefCell::new((0..next).collect()) };
    let res = eval(&ops, &outer)?;
    if res.dim != flat.dim || res.shape().tree != flat.shape().tree {
        return Err(PdError::Split("flat diagram has the wrong shape".into()));
    }
    let mut value: HashMap<usize, C> = HashMap::new();
    let rl = res.labels();
    let fl = flat.labels();
    for (t, c) in rl.iter().zip(fl) {
        let r = ops.find(*t);
        match value.get(&r) {
            Some(prev) if *prev != c => return Err(PdError::Split("conflicting labels".into())),
            _ => {
                value.insert(r, c);
            }
        }
    }
    let leafs = toks.try_map(|o| -> Result<Option<Pd<C>>, PdError> {
        match o {
            None => Ok(None),
            Some(p) => p
                .try_map(|t| value.get(&ops.find(*t)).cloned().ok_or_else(|| PdError::Split("unreached token".into())))
                .map(Some),
        }
    })?;
    fn fill<C: Clone>(n: &PdNode<Option<Pd<C>>>) -> Result<PdNode<Pd<C>>, PdError> {
        if n.children.is_empty() {
            return Ok(PdNode::leaf(n.gaps[0].clone().unwrap()));
        }
        let children: Vec<PdNode<Pd<C>>> = n.children.iter().map(fill).collect::<Result<_, _>>()?;
        let mut gaps = Vec::with_capacity(children.len() + 1);
        for c in &children {
            gaps.push(c.gaps[0].boundary(Side::Source)?);
        }
        gaps.push(children.last().unwrap().gaps[0].boundary(Side::Target)?);
        Ok(PdNode { gaps, children })
    }
    Ok(Pd { dim: shapes.dim, root: fill(&leafs.root)? })
}

/// All trees of height at most `max_height` with at most `max_nodes` nodes,
/// in canonical order.
pub fn enumerate_trees(max_height: usize, max_nodes: usize) -> Vec<Tree> {
    fn exact(nodes: usize, h: usize, memo: &mut HashMap<(usize, usize), Vec<Tree>>) -> Vec<Tree> {
        if nodes == 0 {
            return Vec::new();
        }
        if nodes == 1 {
            return vec![Tree::leaf()];
        }
        if h == 0 {
            return Vec::new();
        }
        if let Some(v) = memo.get(&(nodes, h)) {
            return v.clone();
        }
        let forests = forests(nodes - 1, h - 1, memo);
        let out: Vec<Tree> = forests.into_iter().map(Tree::node).collect();
        memo.insert((nodes, h), out.clone());
        out
    }
    fn forests(total: usize, h: usize, memo: &mut HashMap<(usize, usize), Vec<Tree>>) -> Vec<Vec<Tree>> {
        if total == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 1..=total {
            let heads = exact(first, h, memo);
            if heads.is_empty() {
                continue;
            }
            let rest = forests(total - first, h, memo);
            for a in &heads {
                for r in &rest {
                    let mut f = vec![a.clone()];
                    f.extend(r.iter().cloned());
                    out.push(f);
                }
            }
        }
        out
    }
    let mut memo = HashMap::new();
    let mut out: Vec<Tree> = (1..=max_nodes).flat_map(|n| exact(n, max_height, &mut memo)).collect();
    out.sort();
    out
}

/// Tree cells of every dimension up to `max_dim` with at most `max_nodes` nodes.
pub fn enumerate_tree_cells(max_dim: usize, max_nodes: usize) -> Vec<TreeCell> {
    let mut out = Vec::new();
    for d in 0..=max_dim {
        for t in enumerate_trees(d, max_nodes) {
            out.push(TreeCell { dim: d, tree: t });
        }
    }
    out
}

/// Candidate labels for one position: its height and the pair of gaps it
/// must sit between (absent at height 0).
pub type Candidates<'a, C> = dyn Fn(usize, Option<(&C, &C)>) -> Vec<C> + 'a;

/// All labellings of a shape by candidates, in lexicographic order of the
/// candidate lists.
pub fn labellings<C: Clone>(shape: &TreeCell, cand: &Candidates<'_, C>) -> Vec<Pd<C>> {
    fn node<C: Clone>(t: &Tree, h: usize, bound: Option<(&C, &C)>, cand: &Candidates<'_, C>) -> Vec<PdNode<C>> {
        let gaps = cand(h, bound);
        let mut out = Vec::new();
        for g0 in &gaps {
            extend(t, 0, h, vec![g0.clone()], Vec::new(), &gaps, cand, &mut out);
        }
        out
    }
    #[allow(clippy::too_many_arguments)]
    fn extend<C: Clone>(
        t: &Tree,
        j: usize,
        h: usize,
        gaps_so_far: Vec<C>,
        kids: Vec<PdNode<C>>,
        gaps: &[C],
        cand: &Candidates<'_, C>,
        out: &mut Vec<PdNode<C>>,
    ) {
        if j == t.children.len() {
            out.push(PdNode { gaps: gaps_so_far, children: kids });
            return;
        }
        for g in gaps {
            let left = gaps_so_far.last().unwrap().clone();
            let subs = node(&t.children[j], h + 1, Some((&left, g)), cand);
            for s in subs {
                let mut gs = gaps_so_far.clone();
                gs.push(g.clone());
                let mut ks = kids.clone();
                ks.push(s);
                extend(t, j + 1, h, gs, ks, gaps, cand, out);
            }
        }
    }
    node(&shape.tree, 0, None, cand).into_iter().map(|root| Pd { dim: shape.dim, root }).collect()
}

/// Labels indexed by dimension and boundary, for fast candidate lookup.
pub struct LabelIndex<C> {
    by_dim: Vec<Vec<C>>,
    by_bd: HashMap<(usize, C, C), Vec<C>>,
}

impl<C: Clone + Eq + std::hash::Hash> LabelIndex<C> {
    pub fn new<G: Globe<Cell = C>>(g: &G, cells: impl IntoIterator<Item = C>) -> Self {
        let mut by_dim: Vec<Vec<C>> = Vec::new();
        let mut by_bd: HashMap<(usize, C, C), Vec<C>> = HashMap::new();
        for c in cells {
            let d = g.cell_dim(&c);
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(c.clone());
            if let (Some(s), Some(t)) = (g.source(&c), g.target(&c)) {
                by_bd.entry((d, s, t)).or_default().push(c);
            }
        }
        LabelIndex { by_dim, by_bd }
    }

    pub fn get(&self, h: usize, bound: Option<(&C, &C)>) -> Vec<C> {
        match bound {
            None => self.by_dim.get(h).cloned().unwrap_or_default(),
            Some((s, t)) => self.by_bd.get(&(h, s.clone(), t.clone())).cloned().unwrap_or_default(),
        }
    }

    pub fn labellings(&self, shape: &TreeCell) -> Vec<Pd<C>> {
        labellings(shape, &|h, b| self.get(h, b))
    }

    pub fn len(&self, dim: usize) -> usize {
        self.by_dim.get(dim).map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.iter().all(Vec::is_empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::globset::{CellRef, GlobularSet, Point};

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn tc(s: &str, d: usize) -> TreeCell {
        TreeCell::new(t(s), d)
    }

    /// Dyck words of length 2(n-1) read as the children of a root.
    fn dyck_trees(nodes: usize) -> Vec<Tree> {
        let len = 2 * (nodes - 1);
        let mut out = Vec::new();
        for mask in 0u32..(1 << len) {
            let mut depth = 0i32;
            let mut ok = true;
            for i in 0..len {
                depth += if mask >> i & 1 == 1 { 1 } else { -1 };
                if depth < 0 {
                    ok = false;
                    break;
                }
            }
            if !ok || depth != 0 {
                continue;
            }
            let s: String = std::iter::once('[')
                .chain((0..len).map(|i| if mask >> i & 1 == 1 { '[' } else { ']' }))
                .chain(std::iter::once(']'))
                .collect::<String>()
                .replace("][", "],[");
            out.push(t(&s));
        }
        out
    }

    #[test]
    fn tree_enumeration_matches_dyck_words() {
        for h in 0..4 {
            let got = enumerate_trees(h, 6);
            let mut want: Vec<Tree> = (1..=6).flat_map(dyck_trees).filter(|x| x.height() <= h).collect();
            want.sort();
            assert_eq!(got, want, "height {h}");
        }
        // Catalan numbers
        let counts: Vec<usize> = (1..=6).map(|n| dyck_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42]);
    }

    #[test]
    fn tree_order_and_syntax() {
        assert!(t("[]") < t("[[]]"));
        assert!(t("[[],[]]") < t("[[[]]]"));
        assert_eq!(t(" [ [], [[]] ] ").to_string(), "[[],[[]]]");
        let e = "[[],".parse::<Tree>().unwrap_err();
        assert_eq!(e.pos, 4);
        assert!("[]]".parse::<Tree>().is_err());
    }

    fn two_gen() -> GlobularSet {
        let mut g = GlobularSet::new(2);
        g.add0("x").unwrap();
        g.add0("y").unwrap();
        g.add(1, "f", "x", "y").unwrap();
        g.add(1, "g", "y", "x").unwrap();
        g.add(1, "h", "x", "y").unwrap();
        g.add(2, "a", "f", "h").unwrap();
        g
    }

    #[test]
    fn eta_and_boundary() {
        let g = two_gen();
        let a = g.lookup("a").unwrap();
        let p = Pd::eta(&g, &a);
        assert_eq!(p.shape(), tc("[[[]]]", 2));
        p.validate(&g).unwrap();
        let s = p.boundary(Side::Source).unwrap();
        assert_eq!(s, Pd::eta(&g, &g.lookup("f").unwrap()));
        let t2 = p.boundary(Side::Target).unwrap();
        assert_eq!(t2, Pd::eta(&g, &g.lookup("h").unwrap()));
        assert_eq!(p.boundary_to(Side::Source, 0).unwrap(), Pd::eta(&g, &g.lookup("x").unwrap()));
    }

    #[test]
    fn composition_of_arrows() {
        let g = two_gen();
        let f = Pd::eta(&g, &g.lookup("f").unwrap());
        let gg = Pd::eta(&g, &g.lookup("g").unwrap());
        let fg = Pd::compose(&f, &gg, 0).unwrap();
        assert_eq!(fg.shape(), tc("[[],[]]", 1));
        fg.validate(&g).unwrap();
        assert!(Pd::compose(&f, &f, 0).is_err());
        let a = Pd::eta(&g, &g.lookup("a").unwrap());
        let ga = Pd::compose(&a, &gg.bump(), 0).unwrap();
        assert_eq!(ga.shape(), tc("[[[]],[]]", 2));
        ga.validate(&g).unwrap();
    }

    #[test]
    fn invalid_labelling_is_rejected() {
        let g = two_gen();
        let f = g.lookup("f").unwrap();
        let x = g.lookup("x").unwrap();
        let p = Pd { dim: 1, root: PdNode { gaps: vec![x, x], children: vec![PdNode::leaf(f)] } };
        assert!(matches!(p.validate(&g), Err(PdError::Incompatible { .. })));
        let q = Pd { dim: 0, root: PdNode { gaps: vec![x, CellRef::new(0, 1)], children: vec![PdNode::leaf(f)] } };
        assert!(matches!(q.validate(&g), Err(PdError::TooTall { .. })));
    }

    #[test]
    fn labelling_counts_by_brute_force() {
        let g = two_gen();
        let idx = LabelIndex::new(&g, g.all_cells());
        // composable pairs of 1-cells: f;g and g;f, h;g, g;h
        assert_eq!(idx.labellings(&tc("[[],[]]", 1)).len(), 4);
        let mut brute = 0;
        for a in g.cells(1) {
            for b in g.cells(1) {
                if g.tgt_of(a) == g.src_of(b) {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 4);
        for p in idx.labellings(&tc("[[[]],[]]", 2)) {
            p.validate(&g).unwrap();
        }
        assert_eq!(idx.labellings(&tc("[[[]],[]]", 2)).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let g = two_gen();
        let idx = LabelIndex::new(&g, g.all_cells());
        for p in idx.labellings(&tc("[[[]],[]]", 2)) {
            let v = p.to_json(|c| json!(g.name(*c)));
            let q = Pd::from_json(&v, |x| g.lookup(x.as_str().unwrap()).ok_or_else(|| "?".to_string())).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn mu_of_unit_terminal() {
        for c in enumerate_tree_cells(3, 5) {
            let p = c.to_pd();
            let once = Pd::eta(&PdGlobe(Point), &p);
            assert_eq!(mu(&once).unwrap(), p);
            let each = p.map(|h| Pd::eta(&Point, h));
            assert_eq!(mu(&each).unwrap(), p);
        }
    }

    #[test]
    fn split_inverts_mu_on_corolla() {
        // a 2-corolla whose positions carry 1-cell shapes with 2 and 1 leaves
        let shapes = Pd {
            dim: 1,
            root: PdNode {
                gaps: vec![tc("[]", 0); 3],
                children: vec![PdNode::leaf(tc("[[],[]]", 1)), PdNode::leaf(tc("[[]]", 1))],
            },
        };
        let flat = mu_shape(&shapes).unwrap();
        assert_eq!(flat, tc("[[],[],[]]", 1));
        let fl = flat.to_pd();
        let split = mu_split(&shapes, &fl).unwrap();
        assert_eq!(split.map(Pd::shape), shapes);
        assert_eq!(mu(&split).unwrap(), fl);
    }

    #[test]
    fn word_arity_of_degenerate_labels() {
        let psi = tc("[[],[]]", 1).to_pd();
        let a = word_arity(&psi, |h| TreeCell::degenerate(*h)).unwrap();
        assert_eq!(a, TreeCell::degenerate(1));
    }
}

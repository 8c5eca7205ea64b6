//! Finite strict ω-categories given by composition and identity tables.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::globset::{CellRef, GlobError, GlobularSet, Globe};
use crate::pasting::OmegaOps;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictCat {
    pub glob: GlobularSet,
    /// Identity on each cell below the top dimension.
    pub identity: BTreeMap<CellRef, CellRef>,
    /// `(a, b, k) ↦ a ∘_k b`, in diagrammatic order.
    pub compose: BTreeMap<(CellRef, CellRef, usize), CellRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub law: String,
    pub witness: String,
}

impl StrictCat {
    pub fn max_dim(&self) -> usize {
        self.glob.max_dim()
    }

    pub fn ident(&self, c: CellRef) -> Option<CellRef> {
        self.identity.get(&c).copied()
    }

    /// Iterated identity lifting `c` to dimension `d`.
    pub fn ident_to(&self, c: CellRef, d: usize) -> Option<CellRef> {
        let mut x = c;
        while x.dim < d {
            x = self.ident(x)?;
        }
        Some(x)
    }

    pub fn bd(&self, c: CellRef, k: usize, src: bool) -> CellRef {
        let mut x = c;
        while x.dim > k {
            x = if src { self.glob.src_of(x).unwrap() } else { self.glob.tgt_of(x).unwrap() };
        }
        x
    }

    pub fn composable(&self, a: CellRef, b: CellRef, k: usize) -> bool {
        a.dim == b.dim && k < a.dim && self.bd(a, k, false) == self.bd(b, k, true)
    }

    pub fn comp(&self, a: CellRef, b: CellRef, k: usize) -> Option<CellRef> {
        self.compose.get(&(a, b, k)).copied()
    }

    /// Checks totality, boundaries, units, associativity and interchange.
    pub fn validate(&self) -> Vec<LawViolation> {
        let g = &self.glob;
        let mut out = Vec::new();
        let n = |c: CellRef| g.name(c).to_string();
        let mut bad = |law: &str, w: String| out.push(LawViolation { law: law.into(), witness: w });
        for v in g.validate() {
            bad("globular", format!("{} {}", v.cell, v.relation));
        }
        for d in 0..self.max_dim() {
            for c in g.cells(d) {
                match self.ident(c) {
                    Some(i) if i.dim == d + 1 && g.src_of(i) == Some(c) && g.tgt_of(i) == Some(c) => {}
                    _ => bad("identity", n(c)),
                }
            }
        }
        for d in 1..=self.max_dim() {
            for k in 0..d {
                for a in g.cells(d) {
                    for b in g.cells(d) {
                        if !self.composable(a, b, k) {
                            continue;
                        }
                        let Some(c) = self.comp(a, b, k) else {
                            bad("total", format!("{} ∘{k} {}", n(a), n(b)));
                            continue;
                        };
                        let want_s = if k + 1 == d { g.src_of(a) } else { self.comp(g.src_of(a).unwrap(), g.src_of(b).unwrap(), k) };
                        let want_t = if k + 1 == d { g.tgt_of(b) } else { self.comp(g.tgt_of(a).unwrap(), g.tgt_of(b).unwrap(), k) };
                        if g.src_of(c) != want_s || g.tgt_of(c) != want_t {
                            bad("boundary", format!("{} ∘{k} {}", n(a), n(b)));
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for d in 1..=self.max_dim() {
            for k in 0..d {
                for a in g.cells(d) {
                    let s = self.ident_to(self.bd(a, k, true), d).unwrap();
                    let t = self.ident_to(self.bd(a, k, false), d).unwrap();
                    if self.comp(s, a, k) != Some(a) || self.comp(a, t, k) != Some(a) {
                        out.push(LawViolation { law: "unit".into(), witness: format!("{} along {k}", n(a)) });
                    }
                }
                let cells: Vec<CellRef> = g.cells(d).collect();
                for &a in &cells {
                    for &b in &cells {
                        if !self.composable(a, b, k) {
                            continue;
                        }
                        let ab = self.comp(a, b, k).unwrap();
                        for &c in &cells {
                            if !self.composable(b, c, k) {
                                continue;
                            }
                            let bc = self.comp(b, c, k).unwrap();
                            if self.comp(ab, c, k) != self.comp(a, bc, k) {
                                out.push(LawViolation {
                                    law: "associativity".into(),
                                    witness: format!("{} {} {} along {k}", n(a), n(b), n(c)),
                                });
                            }
                        }
                    }
                }
                for j in 0..k {
                    // (a ∘k b) ∘j (c ∘k d) = (a ∘j c) ∘k (b ∘j d)
                    for &a in &cells {
                        for &b in &cells {
                            if !self.composable(a, b, k) {
                                continue;
                            }
                            for &c in &cells {
                                if !self.composable(a, c, j) {
                                    continue;
                                }
                                for &dd in &cells {
                                    if !self.composable(c, dd, k) || !self.composable(b, dd, j) {
                                        continue;
                                    }
                                    let l = self.comp(self.comp(a, b, k).unwrap(), self.comp(c, dd, k).unwrap(), j);
                                    let r = self.comp(self.comp(a, c, j).unwrap(), self.comp(b, dd, j).unwrap(), k);
                                    if l != r {
                                        out.push(LawViolation {
                                            law: "interchange".into(),
                                            witness: format!("{} {} {} {} along {k},{j}", n(a), n(b), n(c), n(dd)),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let g = &self.glob;
        let ids: serde_json::Map<String, Value> =
            self.identity.iter().map(|(c, i)| (g.name(*c).to_string(), json!(g.name(*i)))).collect();
        let comps: Vec<Value> = self
            .compose
            .iter()
            .map(|((a, b, k), c)| json!({ "a": g.name(*a), "b": g.name(*b), "k": k, "value": g.name(*c) }))
            .collect();
        json!({ "globset": g.to_json(), "identity": ids, "compose": comps })
    }

    pub fn from_json(v: &Value) -> Result<StrictCat, GlobError> {
        let bad = |m: &str| GlobError::Json(m.to_string());
        let glob = GlobularSet::from_json(v.get("globset").ok_or_else(|| bad("missing globset"))?)?;
        let find = |x: &Value| -> Result<CellRef, GlobError> {
            let s = x.as_str().ok_or_else(|| bad("cell names must be strings"))?;
            glob.lookup(s).ok_or_else(|| GlobError::Unknown(s.to_string()))
        };
        let mut identity = BTreeMap::new();
        if let Some(m) = v.get("identity").and_then(Value::as_object) {
            for (k, i) in m {
                identity.insert(find(&json!(k))?, find(i)?);
            }
        }
        let mut compose = BTreeMap::new();
        for e in v.get("compose").and_then(Value::as_array).cloned().unwrap_or_default() {
            let a = find(e.get("a").ok_or_else(|| bad("compose entry without a"))?)?;
            let b = find(e.get("b").ok_or_else(|| bad("compose entry without b"))?)?;
            let k = e.get("k").and_then(Value::as_u64).ok_or_else(|| bad("compose entry without k"))? as usize;
            let c = find(e.get("value").ok_or_else(|| bad("compose entry without value"))?)?;
            compose.insert((a, b, k), c);
        }
        Ok(StrictCat { glob, identity, compose })
    }
}

impl OmegaOps for StrictCat {
    type Cell = CellRef;
    type Error = String;

    fn identity(&self, c: &CellRef) -> Result<CellRef, String> {
        self.ident(*c).ok_or_else(|| format!("no identity on {}", self.glob.name(*c)))
    }
    fn compose(&self, a: &CellRef, b: &CellRef, k: usize) -> Result<CellRef, String> {
        self.comp(*a, *b, k)
            .ok_or_else(|| format!("{} ∘{k} {} is undefined", self.glob.name(*a), self.glob.name(*b)))
    }
}

impl Globe for StrictCat {
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

/// The `n`-fold power of a strict ω-category, cells as tuples.
pub struct Power<'a> {
    pub base: &'a StrictCat,
    pub n: usize,
}

impl Globe for Power<'_> {
    type Cell = (usize, Vec<CellRef>);

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        c.0
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        if c.0 == 0 {
            return None;
        }
        Some((c.0 - 1, c.1.iter().map(|x| self.base.glob.src_of(*x).unwrap()).collect()))
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        if c.0 == 0 {
            return None;
        }
        Some((c.0 - 1, c.1.iter().map(|x| self.base.glob.tgt_of(*x).unwrap()).collect()))
    }
}

impl OmegaOps for Power<'_> {
    type Cell = (usize, Vec<CellRef>);
    type Error = String;

    fn identity(&self, c: &Self::Cell) -> Result<Self::Cell, String> {
        Ok((c.0 + 1, c.1.iter().map(|x| self.base.identity(x)).collect::<Result<_, _>>()?))
    }
    fn compose(&self, a: &Self::Cell, b: &Self::Cell, k: usize) -> Result<Self::Cell, String> {
        let v = a.1.iter().zip(&b.1).map(|(x, y)| self.base.compose(x, y, k)).collect::<Result<_, _>>()?;
        Ok((a.0, v))
    }
}

impl Power<'_> {
    pub fn cells(&self, d: usize) -> Vec<(usize, Vec<CellRef>)> {
        let base: Vec<CellRef> = self.base.glob.cells(d).collect();
        crate::grdops::words_over(&base, self.n).into_iter().map(|w| (d, w)).collect()
    }
}

/// Builds the table of a strict ω-category from an explicit composition
/// function on named cells.
pub struct StrictBuilder {
    pub glob: GlobularSet,
    pub identity: BTreeMap<CellRef, CellRef>,
    pub compose: BTreeMap<(CellRef, CellRef, usize), CellRef>,
}

impl StrictBuilder {
    pub fn new(glob: GlobularSet) -> Self {
        StrictBuilder { glob, identity: BTreeMap::new(), compose: BTreeMap::new() }
    }

    pub fn finish(self) -> StrictCat {
        StrictCat { glob: self.glob, identity: self.identity, compose: self.compose }
    }
}

/// The groupoid underlying `ℤ/2 × ℤ/2` as a strict monoidal groupoid:
/// objects `0, 1`, and on each object `x` the arrows `ix` (identity) and
/// `sx` (the swap automorphism). The tensor is supplied separately.
pub fn z2_groupoid() -> StrictCat {
    let mut g = GlobularSet::new(1);
    g.add0("0").unwrap();
    g.add0("1").unwrap();
    for (name, x) in [("i0", "0"), ("s0", "0"), ("i1", "1"), ("s1", "1")] {
        g.add(1, name, x, x).unwrap();
    }
    let c = |s: &str| g.lookup(s).unwrap();
    let mut b = StrictBuilder::new(g.clone());
    b.identity.insert(c("0"), c("i0"));
    b.identity.insert(c("1"), c("i1"));
    for x in ["0", "1"] {
        let (i, s) = (c(&format!("i{x}")), c(&format!("s{x}")));
        b.compose.insert((i, i, 0), i);
        b.compose.insert((i, s, 0), s);
        b.compose.insert((s, i, 0), s);
        b.compose.insert((s, s, 0), i);
    }
    b.finish()
}

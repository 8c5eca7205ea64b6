//! Finite globular sets truncated at a maximum dimension, and the `Globe`
//! interface shared by every structure that has source and target maps.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde_json::{json, Value};
use thiserror::Error;

/// Anything with cells graded by dimension and source/target maps.
pub trait Globe {
    type Cell: Clone + Eq + Ord + Hash + Debug;

    fn cell_dim(&self, c: &Self::Cell) -> usize;
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell>;
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell>;
}

impl<G: Globe + ?Sized> Globe for &G {
    type Cell = G::Cell;

    fn cell_dim(&self, c: &Self::Cell) -> usize {
        (**self).cell_dim(c)
    }
    fn source(&self, c: &Self::Cell) -> Option<Self::Cell> {
        (**self).source(c)
    }
    fn target(&self, c: &Self::Cell) -> Option<Self::Cell> {
        (**self).target(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    pub dim: usize,
    pub idx: usize,
}

impl CellRef {
    pub fn new(dim: usize, idx: usize) -> Self {
        CellRef { dim, idx }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlobError {
    #[error("dimension {0} exceeds maxDim {1}")]
    DimTooLarge(usize, usize),
    #[error("duplicate cell name `{0}`")]
    Duplicate(String),
    #[error("unknown cell `{0}`")]
    Unknown(String),
    #[error("cell `{0}` has a boundary of the wrong dimension")]
    BadBoundary(String),
    #[error("0-cell `{0}` cannot have a boundary")]
    ZeroBoundary(String),
    #[error("maxDim mismatch: {0} vs {1}")]
    MaxDimMismatch(usize, usize),
    #[error("malformed globular set JSON: {0}")]
    Json(String),
}

/// A violation reported by [`GlobularSet::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub cell: String,
    pub relation: String,
}

const MISSING: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobularSet {
    max_dim: usize,
    names: Vec<Vec<String>>,
    src: Vec<Vec<usize>>,
    tgt: Vec<Vec<usize>>,
    by_name: BTreeMap<String, CellRef>,
}

impl GlobularSet {
    pub fn new(max_dim: usize) -> Self {
        GlobularSet {
            max_dim,
            names: vec![Vec::new(); max_dim + 1],
            src: vec![Vec::new(); max_dim + 1],
            tgt: vec![Vec::new(); max_dim + 1],
            by_name: BTreeMap::new(),
        }
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn count(&self, dim: usize) -> usize {
        self.names.get(dim).map_or(0, |v| v.len())
    }

    pub fn total(&self) -> usize {
        self.names.iter().map(|v| v.len()).sum()
    }

    pub fn cells(&self, dim: usize) -> impl Iterator<Item = CellRef> + '_ {
        (0..self.count(dim)).map(move |idx| CellRef { dim, idx })
    }

    pub fn all_cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        (0..=self.max_dim).flat_map(move |d| self.cells(d))
    }

    pub fn name(&self, c: CellRef) -> &str {
        &self.names[c.dim][c.idx]
    }

    pub fn lookup(&self, name: &str) -> Option<CellRef> {
        self.by_name.get(name).copied()
    }

    /// Adds a cell. The boundary is checked for dimension but not for
    /// globularity, so that invalid inputs can be represented and reported.
    pub fn add_cell(
        &mut self,
        dim: usize,
        name: &str,
        boundary: Option<(CellRef, CellRef)>,
    ) -> Result<CellRef, GlobError> {
        if dim > self.max_dim {
            return Err(GlobError::DimTooLarge(dim, self.max_dim));
        }
        if self.by_name.contains_key(name) {
            return Err(GlobError::Duplicate(name.to_string()));
        }
        let (s, t) = match (dim, boundary) {
            (0, None) => (MISSING, MISSING),
            (0, Some(_)) => return Err(GlobError::ZeroBoundary(name.to_string())),
            (_, None) => return Err(GlobError::BadBoundary(name.to_string())),
            (_, Some((s, t))) => {
                if s.dim + 1 != dim || t.dim + 1 != dim {
                    return Err(GlobError::BadBoundary(name.to_string()));
                }
                (s.idx, t.idx)
            }
        };
        let r = CellRef { dim, idx: self.names[dim].len() };
        self.names[dim].push(name.to_string());
        self.src[dim].push(s);
        self.tgt[dim].push(t);
        self.by_name.insert(name.to_string(), r);
        Ok(r)
    }

    pub fn add(&mut self, dim: usize, name: &str, src: &str, tgt: &str) -> Result<CellRef, GlobError> {
        let s = self.lookup(src).ok_or_else(|| GlobError::Unknown(src.to_string()))?;
        let t = self.lookup(tgt).ok_or_else(|| GlobError::Unknown(tgt.to_string()))?;
        self.add_cell(dim, name, Some((s, t)))
    }

    pub fn add0(&mut self, name: &str) -> Result<CellRef, GlobError> {
        self.add_cell(0, name, None)
    }

    pub fn src_of(&self, c: CellRef) -> Option<CellRef> {
        if c.dim == 0 {
            return None;
        }
        Some(CellRef { dim: c.dim - 1, idx: self.src[c.dim][c.idx] })
    }

    pub fn tgt_of(&self, c: CellRef) -> Option<CellRef> {
        if c.dim == 0 {
            return None;
        }
        Some(CellRef { dim: c.dim - 1, idx: self.tgt[c.dim][c.idx] })
    }

    fn in_range(&self, c: CellRef) -> bool {
        c.idx < self.count(c.dim)
    }

    /// Checks range and the globular identities `ss = st`, `ts = tt`.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for d in 1..=self.max_dim {
            for c in self.cells(d) {
                let s = self.src_of(c).unwrap();
                let t = self.tgt_of(c).unwrap();
                if !self.in_range(s) {
                    out.push(Violation { cell: self.name(c).into(), relation: "src-range".into() });
                }
                if !self.in_range(t) {
                    out.push(Violation { cell: self.name(c).into(), relation: "tgt-range".into() });
                }
                if d < 2 || !self.in_range(s) || !self.in_range(t) {
                    continue;
                }
                let (ss, st) = (self.src_of(s), self.tgt_of(s));
                let (ts, tt) = (self.src_of(t), self.tgt_of(t));
                if ss != ts {
                    out.push(Violation { cell: self.name(c).into(), relation: "ss=ts".into() });
                }
                if st != tt {
                    out.push(Violation { cell: self.name(c).into(), relation: "st=tt".into() });
                }
            }
        }
        out
    }

    /// All ordered parallel pairs of `k`-cells, in index order.
    pub fn parallel_pairs(&self, k: usize) -> Vec<(CellRef, CellRef)> {
        let mut out = Vec::new();
        for a in self.cells(k) {
            for b in self.cells(k) {
                if k == 0 || (self.src_of(a) == self.src_of(b) && self.tgt_of(a) == self.tgt_of(b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn terminal(max_dim: usize) -> Self {
        let mut g = GlobularSet::new(max_dim);
        let mut prev: Option<CellRef> = None;
        for d in 0..=max_dim {
            let c = g.add_cell(d, &format!("*{d}"), prev.map(|p| (p, p))).unwrap();
            prev = Some(c);
        }
        g
    }

    pub fn product(x: &GlobularSet, y: &GlobularSet) -> Result<GlobularSet, GlobError> {
        if x.max_dim != y.max_dim {
            return Err(GlobError::MaxDimMismatch(x.max_dim, y.max_dim));
        }
        let mut g = GlobularSet::new(x.max_dim);
        for d in 0..=x.max_dim {
            let ny = y.count(d);
            for a in x.cells(d) {
                for b in y.cells(d) {
                    let bd = if d == 0 {
                        None
                    } else {
                        let pair = |p: CellRef, q: CellRef| CellRef::new(d - 1, p.idx * y.count(d - 1) + q.idx);
                        Some((
                            pair(x.src_of(a).unwrap(), y.src_of(b).unwrap()),
                            pair(x.tgt_of(a).unwrap(), y.tgt_of(b).unwrap()),
                        ))
                    };
                    let name = format!("({},{})", x.name(a), y.name(b));
                    let c = g.add_cell(d, &name, bd)?;
                    debug_assert_eq!(c.idx, a.idx * ny + b.idx);
                }
            }
        }
        Ok(g)
    }

    pub fn coproduct(x: &GlobularSet, y: &GlobularSet) -> Result<GlobularSet, GlobError> {
        if x.max_dim != y.max_dim {
            return Err(GlobError::MaxDimMismatch(x.max_dim, y.max_dim));
        }
        let mut g = GlobularSet::new(x.max_dim);
        for d in 0..=x.max_dim {
            for a in x.cells(d) {
                let bd = x.src_of(a).map(|s| (s, x.tgt_of(a).unwrap()));
                g.add_cell(d, &format!("inl({})", x.name(a)), bd)?;
            }
            let off = if d == 0 { 0 } else { x.count(d - 1) };
            for b in y.cells(d) {
                let bd = y.src_of(b).map(|s| {
                    let t = y.tgt_of(b).unwrap();
                    (CellRef::new(d - 1, s.idx + off), CellRef::new(d - 1, t.idx + off))
                });
                g.add_cell(d, &format!("inr({})", y.name(b)), bd)?;
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self.names.iter().map(|v| json!(v)).collect();
        let bd = |m: &Vec<Vec<usize>>| -> Vec<Value> {
            (1..=self.max_dim)
                .map(|d| {
                    let names: Vec<Value> = m[d]
                        .iter()
                        .map(|&i| match self.names[d - 1].get(i) {
                            Some(n) => json!(n),
                            None => Value::Null,
                        })
                        .collect();
                    Value::Array(names)
                })
                .collect()
        };
        json!({ "maxDim": self.max_dim, "cells": cells, "src": bd(&self.src), "tgt": bd(&self.tgt) })
    }

    pub fn from_json(v: &Value) -> Result<GlobularSet, GlobError> {
        let bad = |m: &str| GlobError::Json(m.to_string());
        let max_dim = v.get("maxDim").and_then(Value::as_u64).ok_or_else(|| bad("missing maxDim"))? as usize;
        let cells = v.get("cells").and_then(Value::as_array).ok_or_else(|| bad("missing cells"))?;
        if cells.len() != max_dim + 1 {
            return Err(bad("cells must have maxDim+1 entries"));
        }
        let list = |key: &str| -> Result<Vec<Vec<String>>, GlobError> {
            let arr = match v.get(key) {
                None if max_dim == 0 => return Ok(Vec::new()),
                None => return Err(GlobError::Json(format!("missing {key}"))),
                Some(a) => a.as_array().ok_or_else(|| GlobError::Json(format!("{key} must be an array")))?,
            };
            if arr.len() != max_dim {
                return Err(GlobError::Json(format!("{key} must have maxDim entries")));
            }
            arr.iter().map(string_list).collect()
        };
        let src = list("src")?;
        let tgt = list("tgt")?;
        let mut g = GlobularSet::new(max_dim);
        for (d, row) in cells.iter().enumerate() {
            let names = string_list(row)?;
            if d > 0 && (src[d - 1].len() != names.len() || tgt[d - 1].len() != names.len()) {
                return Err(GlobError::Json(format!("src/tgt of dimension {d} do not match cells")));
            }
            for (i, n) in names.iter().enumerate() {
                if d == 0 {
                    g.add0(n)?;
                    continue;
                }
                let find = |s: &str| {
                    g.lookup(s).filter(|c| c.dim == d - 1).unwrap_or(CellRef::new(d - 1, MISSING))
                };
                let (s, t) = (find(&src[d - 1][i]), find(&tgt[d - 1][i]));
                g.add_cell(d, n, Some((s, t)))?;
            }
        }
        Ok(g)
    }
}

fn string_list(v: &Value) -> Result<Vec<String>, GlobError> {
    v.as_array()
        .ok_or_else(|| GlobError::Json("expected an array of names".into()))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| GlobError::Json("expected a string".into())))
        .collect()
}

impl Globe for GlobularSet {
    type Cell = CellRef;

    fn cell_dim(&self, c: &CellRef) -> usize {
        c.dim
    }
    fn source(&self, c: &CellRef) -> Option<CellRef> {
        self.src_of(*c)
    }
    fn target(&self, c: &CellRef) -> Option<CellRef> {
        self.tgt_of(*c)
    }
}

/// A dimension-preserving map between finite globular sets, given by images
/// per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobMap {
    pub images: Vec<Vec<usize>>,
}

impl GlobMap {
    pub fn identity(x: &GlobularSet) -> Self {
        GlobMap { images: (0..=x.max_dim()).map(|d| (0..x.count(d)).collect()).collect() }
    }

    pub fn apply(&self, c: CellRef) -> CellRef {
        CellRef::new(c.dim, self.images[c.dim][c.idx])
    }

    /// Cells of `x` at which the map fails to commute with source or target.
    pub fn non_globular_cells(&self, x: &GlobularSet, y: &GlobularSet) -> Vec<CellRef> {
        let mut out = Vec::new();
        for c in x.all_cells() {
            let img = self.apply(c);
            if img.idx >= y.count(c.dim) {
                out.push(c);
                continue;
            }
            if c.dim > 0 {
                let ok_s = x.src_of(c).map(|s| self.apply(s)) == y.src_of(img);
                let ok_t = x.tgt_of(c).map(|t| self.apply(t)) == y.tgt_of(img);
                if !ok_s || !ok_t {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// The terminal globular set with one cell per dimension; cells are their
/// own dimensions.
#[derive(Clone, Copy, Debug, Default)]
pub struct Point;

impl Globe for Point {
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

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn arrow() -> GlobularSet {
        let mut g = GlobularSet::new(2);
        g.add0("x").unwrap();
        g.add0("y").unwrap();
        g.add(1, "f", "x", "y").unwrap();
        g.add(1, "g", "x", "y").unwrap();
        g.add(2, "a", "f", "g").unwrap();
        g
    }

    #[test]
    fn valid_set_has_no_violations() {
        assert!(arrow().validate().is_empty());
    }

    #[test]
    fn non_globular_two_cell_is_reported() {
        let mut g = arrow();
        g.add0("z").unwrap();
        g.add(1, "h", "x", "z").unwrap();
        g.add(2, "bad", "f", "h").unwrap();
        let v = g.validate();
        assert_eq!(v, vec![Violation { cell: "bad".into(), relation: "st=tt".into() }]);
    }

    #[test]
    fn json_round_trip() {
        let g = arrow();
        let v = g.to_json();
        let h = GlobularSet::from_json(&v).unwrap();
        assert_eq!(g, h);
        assert_eq!(serde_json::to_string(&h.to_json()).unwrap(), serde_json::to_string(&v).unwrap());
    }

    #[test]
    fn unknown_boundary_is_a_range_violation() {
        let v = json!({"maxDim":1,"cells":[["x"],["f"]],"src":[["x"]],"tgt":[["nope"]]});
        let g = GlobularSet::from_json(&v).unwrap();
        assert_eq!(g.validate()[0].relation, "tgt-range");
    }

    #[test]
    fn parallel_pairs_by_brute_force() {
        let g = arrow();
        let pairs = g.parallel_pairs(1);
        assert_eq!(pairs.len(), 4);
        assert_eq!(g.parallel_pairs(0).len(), 4);
        assert_eq!(g.parallel_pairs(2).len(), 1);
    }

    #[test]
    fn product_and_coproduct_counts() {
        let g = arrow();
        let p = GlobularSet::product(&g, &g).unwrap();
        assert_eq!((p.count(0), p.count(1), p.count(2)), (4, 4, 1));
        assert!(p.validate().is_empty());
        let c = GlobularSet::coproduct(&g, &g).unwrap();
        assert_eq!((c.count(0), c.count(1), c.count(2)), (4, 4, 2));
        assert!(c.validate().is_empty());
        let t = GlobularSet::terminal(2);
        let q = GlobularSet::product(&g, &t).unwrap();
        assert_eq!(q.total(), g.total());
        assert!(GlobularSet::product(&g, &GlobularSet::terminal(1)).is_err());
    }

    #[test]
    fn identity_map_is_globular() {
        let g = arrow();
        assert!(GlobMap::identity(&g).non_globular_cells(&g, &g).is_empty());
        let mut m = GlobMap::identity(&g);
        m.images[0][0] = 1;
        assert!(!m.non_globular_cells(&g, &g).is_empty());
    }
}

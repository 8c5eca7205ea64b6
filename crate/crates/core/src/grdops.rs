//! Graded sets under substitution, their internal hom and classical
//! (non-symmetric) operads as monoids for it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug};

use serde_json::{json, Value};
use thiserror::Error;

pub trait Elem: Clone + Ord + Debug {}
impl<T: Clone + Ord + Debug> Elem for T {}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GradedSet<E: Elem> {
    elems: BTreeMap<E, usize>,
}

/// The single element of the unit graded set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Star;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrdError {
    #[error("duplicate element `{0}`")]
    Duplicate(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

impl<E: Elem> GradedSet<E> {
    pub fn new() -> Self {
        GradedSet { elems: BTreeMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (E, usize)>) -> Self {
        GradedSet { elems: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, e: E, arity: usize) -> bool {
        self.elems.insert(e, arity).is_none()
    }

    pub fn arity(&self, e: &E) -> Option<usize> {
        self.elems.get(e).copied()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.elems.contains_key(e)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, usize)> {
        self.elems.iter().map(|(e, &a)| (e, a))
    }

    pub fn elements(&self) -> impl Iterator<Item = &E> {
        self.elems.keys()
    }

    pub fn of_arity(&self, n: usize) -> Vec<E> {
        self.elems.iter().filter(|(_, &a)| a == n).map(|(e, _)| e.clone()).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.elems.values().copied().max().unwrap_or(0)
    }

    pub fn word_arity(&self, w: &[E]) -> usize {
        w.iter().map(|e| self.elems[e]).sum()
    }

    /// All words of length `n`, lexicographically.
    pub fn words(&self, n: usize) -> Vec<Vec<E>> {
        let alphabet: Vec<E> = self.elems.keys().cloned().collect();
        words_over(&alphabet, n)
    }
}

pub fn words_over<E: Clone>(alphabet: &[E], n: usize) -> Vec<Vec<E>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for w in &out {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl GradedSet<String> {
    pub fn to_json(&self) -> Value {
        let m: serde_json::Map<String, Value> = self.elems.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({ "elements": m })
    }

    pub fn from_json(v: &Value) -> Result<Self, GrdError> {
        let obj = v
            .get("elements")
            .and_then(Value::as_object)
            .ok_or_else(|| GrdError::Json("missing `elements` object".into()))?;
        let mut g = GradedSet::new();
        for (k, a) in obj {
            let a = a.as_u64().ok_or_else(|| GrdError::Json(format!("arity of `{k}` must be a natural number")))?;
            g.insert(k.clone(), a as usize);
        }
        Ok(g)
    }
}

pub fn unit() -> GradedSet<Star> {
    GradedSet::from_pairs([(Star, 1)])
}

pub type SqElem<E, F> = (E, Vec<F>);

/// The substitution product: an element of `x` with a word of `y` of
/// matching length.
pub fn square<E: Elem, F: Elem>(x: &GradedSet<E>, y: &GradedSet<F>) -> GradedSet<SqElem<E, F>> {
    let mut out = GradedSet::new();
    for (a, n) in x.iter() {
        for w in y.words(n) {
            let ar = y.word_arity(&w);
            out.insert((a.clone(), w), ar);
        }
    }
    out
}

/// `(X□Y)□Z → X□(Y□Z)`, splitting the `Z`-word by the `Y`-arities.
pub fn assoc_forward<E: Elem, F: Elem, G: Elem>(
    y: &GradedSet<F>,
    e: &SqElem<SqElem<E, F>, G>,
) -> SqElem<E, SqElem<F, G>> {
    let ((a, bs), cs) = e;
    let mut out = Vec::with_capacity(bs.len());
    let mut i = 0;
    for b in bs {
        let k = y.arity(b).expect("element of Y");
        out.push((b.clone(), cs[i..i + k].to_vec()));
        i += k;
    }
    (a.clone(), out)
}

pub fn assoc_backward<E: Elem, F: Elem, G: Elem>(e: &SqElem<E, SqElem<F, G>>) -> SqElem<SqElem<E, F>, G> {
    let (a, parts) = e;
    let bs = parts.iter().map(|(b, _)| b.clone()).collect();
    let cs = parts.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
    ((a.clone(), bs), cs)
}

pub fn left_unitor<E: Elem>(e: &SqElem<Star, E>) -> E {
    e.1[0].clone()
}

pub fn right_unitor<E: Elem>(e: &SqElem<E, Star>) -> E {
    e.0.clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub domain: usize,
    pub codomain: usize,
    pub arity_preserving: bool,
    pub injective: bool,
    pub inverse_ok: bool,
}

impl IsoReport {
    pub fn ok(&self) -> bool {
        self.domain == self.codomain && self.arity_preserving && self.injective && self.inverse_ok
    }
}

pub fn check_associator<E: Elem, F: Elem, G: Elem>(
    x: &GradedSet<E>,
    y: &GradedSet<F>,
    z: &GradedSet<G>,
) -> IsoReport {
    let left = square(&square(x, y), z);
    let yz = square(y, z);
    let right = square(x, &yz);
    let mut seen = BTreeSet::new();
    let mut rep = IsoReport {
        domain: left.len(),
        codomain: right.len(),
        arity_preserving: true,
        injective: true,
        inverse_ok: true,
    };
    for (e, ar) in left.iter() {
        let img = assoc_forward(y, e);
        if right.arity(&img) != Some(ar) {
            rep.arity_preserving = false;
        }
        if assoc_backward(&img) != *e {
            rep.inverse_ok = false;
        }
        if !seen.insert(img) {
            rep.injective = false;
        }
    }
    rep
}

pub fn check_unitors<E: Elem>(x: &GradedSet<E>) -> (IsoReport, IsoReport) {
    let u = unit();
    let l = square(&u, x);
    let r = square(x, &u);
    let mk = |pairs: Vec<(E, usize, bool)>, dom: usize| {
        let mut seen = BTreeSet::new();
        let mut rep = IsoReport { domain: dom, codomain: x.len(), arity_preserving: true, injective: true, inverse_ok: true };
        for (img, ar, inv) in pairs {
            rep.arity_preserving &= x.arity(&img) == Some(ar);
            rep.inverse_ok &= inv;
            rep.injective &= seen.insert(img);
        }
        rep
    };
    let lp = l
        .iter()
        .map(|(e, ar)| {
            let img = left_unitor(e);
            let inv = (Star, vec![img.clone()]) == *e;
            (img, ar, inv)
        })
        .collect();
    let rp = r
        .iter()
        .map(|(e, ar)| {
            let img = right_unitor(e);
            let n = x.arity(&img).unwrap_or(0);
            let inv = (img.clone(), vec![Star; n]) == *e;
            (img, ar, inv)
        })
        .collect();
    (mk(lp, l.len()), mk(rp, r.len()))
}

/// Both routes around the pentagon agree on every element of `((W□X)□Y)□Z`.
pub fn check_pentagon<A: Elem, B: Elem, C: Elem, D: Elem>(
    w: &GradedSet<A>,
    x: &GradedSet<B>,
    y: &GradedSet<C>,
    z: &GradedSet<D>,
) -> bool {
    let wx = square(w, x);
    let sq_xy = square(x, y);
    let start = square(&square(&wx, y), z);
    for (e, _) in start.iter() {
        // route 1: ((WX)Y)Z -> (WX)(YZ) -> W(X(YZ))
        let r1a = assoc_forward(y, e);
        let r1 = assoc_forward(x, &r1a);
        // route 2: ((WX)Y)Z -> (W(XY))Z -> W((XY)Z) -> W(X(YZ))
        let ((wxe, ys), zs) = e;
        let inner = assoc_forward(x, &(wxe.clone(), ys.clone()));
        let r2a: SqElem<SqElem<A, SqElem<B, C>>, D> = (inner, zs.clone());
        let r2b = assoc_forward(&sq_xy, &r2a);
        let (a, parts) = r2b;
        let r2: SqElem<A, SqElem<B, SqElem<C, D>>> = (a, parts.iter().map(|p| assoc_forward(y, p)).collect());
        if r1 != r2 {
            return false;
        }
    }
    true
}

/// Triangle identity on every element of `(X□I)□Y`.
pub fn check_triangle<E: Elem, F: Elem>(x: &GradedSet<E>, y: &GradedSet<F>) -> bool {
    let u = unit();
    let start = square(&square(x, &u), y);
    for (e, _) in start.iter() {
        let ((a, _stars), ys) = e;
        let via_rho = (a.clone(), ys.clone());
        let (a2, parts) = assoc_forward(&u, e);
        let via_lambda = (a2, parts.iter().map(left_unitor).collect::<Vec<F>>());
        if via_rho != via_lambda {
            return false;
        }
    }
    true
}

/// An element of the internal hom `[B, A]_n`: a choice, for every word of
/// length `n` over `B`, of an `A`-element of the word's total arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section<B, A> {
    pub n: usize,
    pub assign: BTreeMap<Vec<B>, A>,
}

pub fn internal_hom<B: Elem, A: Elem>(b: &GradedSet<B>, a: &GradedSet<A>, n: usize) -> Vec<Section<B, A>> {
    let ws = b.words(n);
    let all: Vec<Vec<A>> = ws.iter().map(|w| a.of_arity(b.word_arity(w))).collect();
    if all.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = vec![BTreeMap::new()];
    for (w, cands) in ws.iter().zip(all) {
        let mut next = Vec::with_capacity(out.len() * cands.len());
        for m in &out {
            for c in &cands {
                let mut m2 = m.clone();
                m2.insert(w.clone(), c.clone());
                next.push(m2);
            }
        }
        out = next;
    }
    out.into_iter().map(|assign| Section { n, assign }).collect()
}

/// `[B, A]` restricted to arities up to `max_n`.
pub fn internal_hom_set<B: Elem, A: Elem>(b: &GradedSet<B>, a: &GradedSet<A>, max_n: usize) -> GradedSet<Section<B, A>> {
    GradedSet::from_pairs((0..=max_n).flat_map(|n| internal_hom(b, a, n).into_iter().map(move |s| (s, n))))
}

/// An exact cardinal kept as a prime factorisation, so that large products
/// compare without overflow.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cardinal {
    zero: bool,
    factors: BTreeMap<u64, u32>,
}

impl Cardinal {
    pub fn one() -> Self {
        Cardinal::default()
    }

    pub fn from_u64(mut n: u64) -> Self {
        if n == 0 {
            return Cardinal { zero: true, factors: BTreeMap::new() };
        }
        let mut factors = BTreeMap::new();
        let mut p = 2;
        while p * p <= n {
            while n % p == 0 {
                *factors.entry(p).or_insert(0) += 1;
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            *factors.entry(n).or_insert(0) += 1;
        }
        Cardinal { zero: false, factors }
    }

    pub fn mul(&self, o: &Cardinal) -> Cardinal {
        if self.zero || o.zero {
            return Cardinal::from_u64(0);
        }
        let mut f = self.factors.clone();
        for (p, e) in &o.factors {
            *f.entry(*p).or_insert(0) += e;
        }
        Cardinal { zero: false, factors: f }
    }

    pub fn to_u128(&self) -> Option<u128> {
        if self.zero {
            return Some(0);
        }
        let mut acc: u128 = 1;
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.checked_mul(*p as u128)?;
            }
        }
        Some(acc)
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.to_u128() {
            return write!(f, "{n}");
        }
        let parts: Vec<String> = self.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        f.write_str(&parts.join("*"))
    }
}

impl std::iter::Product for Cardinal {
    fn product<I: Iterator<Item = Cardinal>>(iter: I) -> Self {
        iter.fold(Cardinal::one(), |a, b| a.mul(&b))
    }
}

/// Number of arity-preserving maps `x → y`.
pub fn hom_count<E: Elem, F: Elem>(x: &GradedSet<E>, y: &GradedSet<F>) -> Cardinal {
    x.iter().map(|(_, n)| Cardinal::from_u64(y.of_arity(n).len() as u64)).product()
}

/// `|[B, A]_n|` from the product formula, without enumerating sections.
pub fn internal_hom_count<B: Elem, A: Elem>(b: &GradedSet<B>, a: &GradedSet<A>, n: usize) -> Cardinal {
    fn go<B: Elem, A: Elem>(b: &GradedSet<B>, a: &GradedSet<A>, left: usize, acc_ar: usize) -> Cardinal {
        if left == 0 {
            return Cardinal::from_u64(a.of_arity(acc_ar).len() as u64);
        }
        b.iter().map(|(_, k)| go(b, a, left - 1, acc_ar + k)).product()
    }
    go(b, a, n, 0)
}

/// `|Hom(X, [B, Y])|`, computed fibrewise.
pub fn curried_hom_count<E: Elem, B: Elem, F: Elem>(x: &GradedSet<E>, b: &GradedSet<B>, y: &GradedSet<F>) -> Cardinal {
    x.iter().map(|(_, n)| internal_hom_count(b, y, n)).product()
}

/// All arity-preserving maps, or `None` when there are more than `limit`.
pub fn enumerate_maps<E: Elem, F: Elem>(x: &GradedSet<E>, y: &GradedSet<F>, limit: usize) -> Option<Vec<BTreeMap<E, F>>> {
    let total = hom_count(x, y).to_u128()?;
    if total > limit as u128 {
        return None;
    }
    if total == 0 {
        return Some(Vec::new());
    }
    let mut out = vec![BTreeMap::new()];
    for (e, n) in x.iter() {
        let cands = y.of_arity(n);
        let mut next = Vec::new();
        for m in &out {
            for c in &cands {
                let mut m2 = m.clone();
                m2.insert(e.clone(), c.clone());
                next.push(m2);
            }
        }
        out = next;
    }
    Some(out)
}

pub fn curry<E: Elem, B: Elem, F: Elem>(
    x: &GradedSet<E>,
    f: &BTreeMap<SqElem<E, B>, F>,
) -> BTreeMap<E, Section<B, F>> {
    let mut out: BTreeMap<E, Section<B, F>> = x
        .iter()
        .map(|(e, n)| (e.clone(), Section { n, assign: BTreeMap::new() }))
        .collect();
    for ((e, w), v) in f {
        out.get_mut(e).unwrap().assign.insert(w.clone(), v.clone());
    }
    out
}

pub fn uncurry<E: Elem, B: Elem, F: Elem>(g: &BTreeMap<E, Section<B, F>>) -> BTreeMap<SqElem<E, B>, F> {
    let mut out = BTreeMap::new();
    for (e, s) in g {
        for (w, v) in &s.assign {
            out.insert((e.clone(), w.clone()), v.clone());
        }
    }
    out
}

/// Outcome of a partial composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composite<E> {
    Value(E),
    OutOfRange,
    Undefined,
}

/// A non-symmetric operad truncated at `max_arity`.
pub trait Operad {
    type Op: Elem;

    fn max_arity(&self) -> usize;
    fn ops(&self) -> &GradedSet<Self::Op>;
    fn unit(&self) -> Self::Op;
    fn compose(&self, head: &Self::Op, args: &[Self::Op]) -> Composite<Self::Op>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOperad<E: Elem> {
    pub carrier: GradedSet<E>,
    pub unit: E,
    pub max_arity: usize,
    pub table: BTreeMap<(E, Vec<E>), E>,
}

impl<E: Elem> Operad for TableOperad<E> {
    type Op = E;

    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn ops(&self) -> &GradedSet<E> {
        &self.carrier
    }
    fn unit(&self) -> E {
        self.unit.clone()
    }
    fn compose(&self, head: &E, args: &[E]) -> Composite<E> {
        let Some(n) = self.carrier.arity(head) else { return Composite::Undefined };
        if args.len() != n || args.iter().any(|a| !self.carrier.contains(a)) {
            return Composite::Undefined;
        }
        if self.carrier.word_arity(args) > self.max_arity {
            return Composite::OutOfRange;
        }
        match self.table.get(&(head.clone(), args.to_vec())) {
            Some(v) => Composite::Value(v.clone()),
            None => Composite::Undefined,
        }
    }
}

impl TableOperad<String> {
    pub fn from_json(v: &Value) -> Result<Self, GrdError> {
        let bad = |m: &str| GrdError::Json(m.to_string());
        let carrier = GradedSet::from_json(v)?;
        let unit = v.get("unit").and_then(Value::as_str).ok_or_else(|| bad("missing unit"))?.to_string();
        let max_arity = v.get("maxArity").and_then(Value::as_u64).ok_or_else(|| bad("missing maxArity"))? as usize;
        let mut table = BTreeMap::new();
        for e in v.get("compose").and_then(Value::as_array).ok_or_else(|| bad("missing compose list"))? {
            let head = e.get("head").and_then(Value::as_str).ok_or_else(|| bad("compose entry without head"))?;
            let args: Vec<String> = e
                .get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("compose entry without args"))?
                .iter()
                .map(|a| a.as_str().map(str::to_string).ok_or_else(|| bad("args must be names")))
                .collect::<Result<_, _>>()?;
            let val = e.get("value").and_then(Value::as_str).ok_or_else(|| bad("compose entry without value"))?;
            if table.insert((head.to_string(), args), val.to_string()).is_some() {
                return Err(GrdError::Duplicate(head.to_string()));
            }
        }
        Ok(TableOperad { carrier, unit, max_arity, table })
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.carrier.to_json();
        let entries: Vec<Value> = self
            .table
            .iter()
            .map(|((h, a), r)| json!({ "head": h, "args": a, "value": r }))
            .collect();
        v["unit"] = json!(self.unit);
        v["maxArity"] = json!(self.max_arity);
        v["compose"] = Value::Array(entries);
        v
    }
}

/// The endomorphism operad of a graded set: sections of `[X, X]`.
pub struct TautOperad<E: Elem> {
    pub base: GradedSet<E>,
    pub max_arity: usize,
    carrier: GradedSet<Section<E, E>>,
}

impl<E: Elem> TautOperad<E> {
    pub fn new(base: GradedSet<E>, max_arity: usize) -> Self {
        let carrier = internal_hom_set(&base, &base, max_arity);
        TautOperad { base, max_arity, carrier }
    }
}

/// Composite of sections: the result at a word applies the head to the
/// values of the arguments on consecutive subwords.
pub fn section_compose<A: Elem, B: Elem, C: Elem>(
    domain: &GradedSet<A>,
    head: &Section<B, C>,
    args: &[Section<A, B>],
) -> Option<Section<A, C>> {
    if args.len() != head.n {
        return None;
    }
    let total: usize = args.iter().map(|s| s.n).sum();
    let mut assign = BTreeMap::new();
    for w in domain.words(total) {
        let mut i = 0;
        let mut mid = Vec::with_capacity(args.len());
        for s in args {
            mid.push(s.assign.get(&w[i..i + s.n])?.clone());
            i += s.n;
        }
        assign.insert(w, head.assign.get(&mid)?.clone());
    }
    Some(Section { n: total, assign })
}

pub fn unit_section<E: Elem>(x: &GradedSet<E>) -> Section<E, E> {
    Section { n: 1, assign: x.elements().map(|e| (vec![e.clone()], e.clone())).collect() }
}

impl<E: Elem> Operad for TautOperad<E> {
    type Op = Section<E, E>;

    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn ops(&self) -> &GradedSet<Section<E, E>> {
        &self.carrier
    }
    fn unit(&self) -> Section<E, E> {
        unit_section(&self.base)
    }
    fn compose(&self, head: &Section<E, E>, args: &[Section<E, E>]) -> Composite<Section<E, E>> {
        if args.len() != head.n {
            return Composite::Undefined;
        }
        if args.iter().map(|s| s.n).sum::<usize>() > self.max_arity {
            return Composite::OutOfRange;
        }
        match section_compose(&self.base, head, args) {
            Some(s) => Composite::Value(s),
            None => Composite::Undefined,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadViolation {
    pub law: String,
    pub witness: String,
}

/// Checks the operad axioms on every tuple within the arity bound.
pub fn operad_validate<O: Operad>(o: &O) -> Vec<OperadViolation> {
    let mut out = Vec::new();
    let ops = o.ops();
    let max = o.max_arity();
    let e = o.unit();
    let mut push = |law: &str, w: String| out.push(OperadViolation { law: law.into(), witness: w });
    if ops.arity(&e) != Some(1) {
        push("unit-arity", format!("{e:?}"));
    }
    for (t, n) in ops.iter() {
        if n > max {
            push("max-arity", format!("{t:?}"));
        }
    }
    let heads: Vec<(O::Op, usize)> = ops.iter().map(|(t, n)| (t.clone(), n)).collect();
    for (t, n) in &heads {
        if 1 <= max {
            match o.compose(&e, std::slice::from_ref(t)) {
                Composite::Value(v) if v == *t => {}
                Composite::OutOfRange => {}
                _ => push("left-unit", format!("{t:?}")),
            }
        }
        let units = vec![e.clone(); *n];
        match o.compose(t, &units) {
            Composite::Value(v) if v == *t => {}
            Composite::OutOfRange => {}
            _ => push("right-unit", format!("{t:?}")),
        }
    }
    for (t, n) in &heads {
        for args in ops.words(*n) {
            let k = ops.word_arity(&args);
            if k > max {
                continue;
            }
            let inner = match o.compose(t, &args) {
                Composite::Value(v) => v,
                Composite::OutOfRange => continue,
                Composite::Undefined => {
                    push("defined", format!("{t:?} ∘ {args:?}"));
                    continue;
                }
            };
            if ops.arity(&inner) != Some(k) {
                push("composite-arity", format!("{t:?} ∘ {args:?}"));
                continue;
            }
            for sub in ops.words(k) {
                if ops.word_arity(&sub) > max {
                    continue;
                }
                let lhs = match o.compose(&inner, &sub) {
                    Composite::Value(v) => v,
                    _ => continue,
                };
                let mut mids = Vec::with_capacity(args.len());
                let mut i = 0;
                let mut ok = true;
                for a in &args {
                    let ka = ops.arity(a).unwrap();
                    match o.compose(a, &sub[i..i + ka]) {
                        Composite::Value(v) => mids.push(v),
                        _ => ok = false,
                    }
                    i += ka;
                }
                if !ok {
                    push("defined", format!("{args:?} ∘ {sub:?}"));
                    continue;
                }
                match o.compose(t, &mids) {
                    Composite::Value(rhs) if rhs == lhs => {}
                    _ => push("associativity", format!("{t:?} ∘ {args:?} ∘ {sub:?}")),
                }
            }
        }
    }
    out
}

/// Checks that `f` preserves arity, unit and every in-range composition.
pub fn operad_map_check<O: Operad, P: Operad>(o: &O, p: &P, f: &BTreeMap<O::Op, P::Op>) -> Vec<OperadViolation> {
    let mut out = Vec::new();
    let ops = o.ops();
    for (t, n) in ops.iter() {
        match f.get(t) {
            Some(v) if p.ops().arity(v) == Some(n) => {}
            _ => out.push(OperadViolation { law: "arity".into(), witness: format!("{t:?}") }),
        }
    }
    if !out.is_empty() {
        return out;
    }
    if f[&o.unit()] != p.unit() {
        out.push(OperadViolation { law: "unit".into(), witness: format!("{:?}", o.unit()) });
    }
    for (t, n) in ops.iter() {
        for args in ops.words(n) {
            if let Composite::Value(v) = o.compose(t, &args) {
                let imgs: Vec<P::Op> = args.iter().map(|a| f[a].clone()).collect();
                match p.compose(&f[t], &imgs) {
                    Composite::Value(w) if w == f[&v] => {}
                    Composite::OutOfRange => {}
                    _ => out.push(OperadViolation { law: "composition".into(), witness: format!("{t:?} ∘ {args:?}") }),
                }
            }
        }
    }
    out
}

/// An algebra structure on a set given by its action table.
pub type Action<E, A> = BTreeMap<(E, Vec<A>), A>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraReport {
    pub action_route: Vec<OperadViolation>,
    pub hom_route: Vec<OperadViolation>,
}

impl AlgebraReport {
    pub fn ok(&self) -> bool {
        self.action_route.is_empty() && self.hom_route.is_empty()
    }

    pub fn routes_agree(&self) -> bool {
        self.action_route.is_empty() == self.hom_route.is_empty()
    }
}

/// Checks an algebra two ways: the action diagrams directly, and the
/// curried map into the endomorphism operad as an operad map.
pub fn operad_algebra_check<O: Operad, A: Elem>(o: &O, carrier: &BTreeSet<A>, act: &Action<O::Op, A>) -> AlgebraReport {
    let base: GradedSet<A> = GradedSet::from_pairs(carrier.iter().map(|a| (a.clone(), 0)));
    let ops = o.ops();
    let mut action_route = Vec::new();
    let look = |t: &O::Op, w: &[A]| act.get(&(t.clone(), w.to_vec())).cloned();
    for (t, n) in ops.iter() {
        for w in base.words(n) {
            match look(t, &w) {
                Some(v) if carrier.contains(&v) => {}
                _ => action_route.push(OperadViolation { law: "total".into(), witness: format!("{t:?} {w:?}") }),
            }
        }
    }
    if action_route.is_empty() {
        let e = o.unit();
        for a in carrier {
            if look(&e, std::slice::from_ref(a)).as_ref() != Some(a) {
                action_route.push(OperadViolation { law: "unit".into(), witness: format!("{a:?}") });
            }
        }
        for (t, n) in ops.iter() {
            for args in ops.words(n) {
                let Composite::Value(c) = o.compose(t, &args) else { continue };
                let k = ops.arity(&c).unwrap();
                for w in base.words(k) {
                    let lhs = look(&c, &w);
                    let mut mids = Vec::new();
                    let mut i = 0;
                    for a in &args {
                        let ka = ops.arity(a).unwrap();
                        mids.push(look(a, &w[i..i + ka]).unwrap());
                        i += ka;
                    }
                    if lhs != look(t, &mids) {
                        action_route.push(OperadViolation {
                            law: "associativity".into(),
                            witness: format!("{t:?} ∘ {args:?} at {w:?}"),
                        });
                    }
                }
            }
        }
    }
    let hom_route = if action_route.iter().any(|v| v.law == "total") {
        action_route.clone()
    } else {
        let taut = TautOperad::new(base.clone(), o.max_arity());
        let mut f = BTreeMap::new();
        for (t, n) in ops.iter() {
            let assign = base.words(n).into_iter().map(|w| {
                let v = look(t, &w).unwrap();
                (w, v)
            });
            f.insert(t.clone(), Section { n, assign: assign.collect() });
        }
        operad_map_check(o, &taut, &f)
    };
    AlgebraReport { action_route, hom_route }
}

/// Restricts an algebra along an operad map.
pub fn restrict_action<P: Operad, E: Elem, A: Elem>(
    p: &P,
    f: &BTreeMap<P::Op, E>,
    act: &Action<E, A>,
    carrier: &BTreeSet<A>,
) -> Action<P::Op, A> {
    let alphabet: Vec<A> = carrier.iter().cloned().collect();
    let mut out = BTreeMap::new();
    for (t, n) in p.ops().iter() {
        for w in words_over(&alphabet, n) {
            if let Some(v) = act.get(&(f[t].clone(), w.clone())) {
                out.insert((t.clone(), w), v.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(pairs: &[(&str, usize)]) -> GradedSet<String> {
        GradedSet::from_pairs(pairs.iter().map(|(k, a)| (k.to_string(), *a)))
    }

    #[test]
    fn square_counts() {
        let x = gs(&[("a", 2), ("b", 0)]);
        let y = gs(&[("c", 1), ("d", 3)]);
        let s = square(&x, &y);
        assert_eq!(s.len(), 5);
        assert_eq!(s.arity(&("a".into(), vec!["c".into(), "d".into()])), Some(4));
        assert_eq!(s.arity(&("b".into(), vec![])), Some(0));
    }

    #[test]
    fn associator_and_unitors() {
        let x = gs(&[("a", 2), ("b", 0)]);
        let y = gs(&[("c", 1), ("d", 2)]);
        let z = gs(&[("e", 0), ("f", 1)]);
        assert!(check_associator(&x, &y, &z).ok());
        let (l, r) = check_unitors(&x);
        assert!(l.ok() && r.ok());
        assert!(check_pentagon(&x, &y, &z, &x));
        assert!(check_triangle(&x, &y));
    }

    #[test]
    fn empty_fibres_short_circuit() {
        // 27 words of arity 0 with three choices each, then one with none
        let b = gs(&[("p", 0), ("q", 0), ("r", 0), ("s", 1)]);
        let a = gs(&[("u", 0), ("v", 0), ("w", 0)]);
        assert!(internal_hom(&b, &a, 4).is_empty());
        let x = gs(&[("a", 3), ("b", 4)]);
        assert_eq!(enumerate_maps(&square(&x, &b), &a, 10).unwrap().len(), 0);
    }

    #[test]
    fn cardinal_arithmetic() {
        let a = Cardinal::from_u64(12);
        let b = Cardinal::from_u64(18);
        assert_eq!(a.mul(&b).to_u128(), Some(216));
        let big: Cardinal = (0..90).map(|_| Cardinal::from_u64(3)).product();
        assert_eq!(big.to_u128(), None);
        assert_eq!(big.to_string(), "3^90");
        assert_eq!(Cardinal::from_u64(0).mul(&big).to_u128(), Some(0));
    }

    #[test]
    fn internal_hom_matches_count() {
        let b = gs(&[("p", 1), ("q", 0)]);
        let a = gs(&[("u", 0), ("v", 1), ("w", 1), ("z", 2)]);
        for n in 0..3 {
            let secs = internal_hom(&b, &a, n);
            assert_eq!(Cardinal::from_u64(secs.len() as u64), internal_hom_count(&b, &a, n));
        }
    }

    #[test]
    fn curry_is_a_bijection() {
        let x = gs(&[("a", 1), ("b", 0)]);
        let b = gs(&[("p", 1), ("q", 0)]);
        let y = gs(&[("u", 0), ("v", 1)]);
        let sq = square(&x, &b);
        let maps = enumerate_maps(&sq, &y, 10_000).unwrap();
        assert_eq!(Cardinal::from_u64(maps.len() as u64), curried_hom_count(&x, &b, &y));
        let mut seen = BTreeSet::new();
        for m in &maps {
            let c = curry(&x, m);
            assert_eq!(uncurry(&c), *m);
            assert!(seen.insert(c));
        }
    }

    fn assoc_operad(broken: bool) -> TableOperad<String> {
        // x·y words on a one-element alphabet of each arity up to 2
        let carrier = gs(&[("m0", 0), ("m1", 1), ("m2", 2)]);
        let mut table = BTreeMap::new();
        for (h, n) in carrier.iter() {
            for args in carrier.words(n) {
                let k = carrier.word_arity(&args);
                if k <= 2 {
                    table.insert((h.clone(), args), format!("m{k}"));
                }
            }
        }
        if broken {
            table.insert(("m2".into(), vec!["m0".into(), "m2".into()]), "m1".into());
        }
        TableOperad { carrier, unit: "m1".into(), max_arity: 2, table }
    }

    #[test]
    fn table_operad_validation() {
        assert!(operad_validate(&assoc_operad(false)).is_empty());
        let v = operad_validate(&assoc_operad(true));
        assert!(v.iter().any(|x| x.law == "composite-arity"));
    }

    #[test]
    fn taut_operad_is_valid() {
        let x = gs(&[("p", 0), ("q", 1)]);
        let t = TautOperad::new(x, 2);
        assert!(operad_validate(&t).is_empty());
    }

    #[test]
    fn algebra_routes_agree() {
        let o = assoc_operad(false);
        let carrier: BTreeSet<u8> = [0, 1].into_iter().collect();
        let mut act = BTreeMap::new();
        for (h, n) in o.carrier.iter() {
            for w in words_over(&[0u8, 1], n) {
                let v = match n {
                    0 => 0,
                    _ => w.iter().fold(0, |a, b| a ^ b),
                };
                act.insert((h.clone(), w), v);
            }
        }
        let r = operad_algebra_check(&o, &carrier, &act);
        assert!(r.ok(), "{r:?}");
        act.insert(("m2".into(), vec![0, 1]), 0);
        let r = operad_algebra_check(&o, &carrier, &act);
        assert!(!r.ok());
        assert!(r.routes_agree());
    }

    #[test]
    fn out_of_range_is_not_failure() {
        let o = assoc_operad(false);
        let c = o.compose(&"m2".into(), &["m2".into(), "m1".into()]);
        assert_eq!(c, Composite::OutOfRange);
    }

    #[test]
    fn json_round_trip() {
        let o = assoc_operad(false);
        let v = o.to_json();
        assert_eq!(TableOperad::from_json(&v).unwrap(), o);
    }
}

//! PROs: strict monoidal categories with objects the naturals. Free
//! presentations are normalised as layered string diagrams modulo
//! interchange, then rewritten by oriented rules under a fuel bound.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::{self, Debug};
use std::hash::Hash;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProExpr {
    Gen(String),
    Id(usize),
    /// `Comp(g, f)` is `g ∘ f`: first `f`, then `g`.
    Comp(Box<ProExpr>, Box<ProExpr>),
    Tensor(Box<ProExpr>, Box<ProExpr>),
}

impl ProExpr {
    pub fn comp(g: ProExpr, f: ProExpr) -> Self {
        ProExpr::Comp(Box::new(g), Box::new(f))
    }

    pub fn tensor(a: ProExpr, b: ProExpr) -> Self {
        ProExpr::Tensor(Box::new(a), Box::new(b))
    }

    pub fn gen(s: &str) -> Self {
        ProExpr::Gen(s.to_string())
    }

    pub fn size(&self) -> usize {
        match self {
            ProExpr::Gen(_) | ProExpr::Id(_) => 1,
            ProExpr::Comp(a, b) | ProExpr::Tensor(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn type_of(&self, sig: &Signature) -> Result<(usize, usize), ProError> {
        match self {
            ProExpr::Gen(g) => sig.get(g).copied().ok_or_else(|| ProError::UnknownGenerator(g.clone())),
            ProExpr::Id(n) => Ok((*n, *n)),
            ProExpr::Comp(g, f) => {
                let (a, b) = f.type_of(sig)?;
                let (c, d) = g.type_of(sig)?;
                if b != c {
                    return Err(ProError::Type(format!("cannot compose {g} after {f}: {b} vs {c}")));
                }
                Ok((a, d))
            }
            ProExpr::Tensor(x, y) => {
                let (a, b) = x.type_of(sig)?;
                let (c, d) = y.type_of(sig)?;
                Ok((a + c, b + d))
            }
        }
    }
}

impl fmt::Display for ProExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProExpr::Gen(g) => f.write_str(g),
            ProExpr::Id(n) => write!(f, "(id {n})"),
            ProExpr::Comp(a, b) => write!(f, "(comp {a} {b})"),
            ProExpr::Tensor(a, b) => write!(f, "(tensor {a} {b})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("rule `{0}`: {1}")]
    BadRule(String, String),
    #[error("interchange class exceeds {0} diagrams")]
    ClassTooLarge(usize),
    #[error("normalisation ran out of fuel after {0} rewrites")]
    FuelExhausted(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error("bad theory JSON: {0}")]
    Json(String),
}

pub fn parse_expr(s: &str) -> Result<ProExpr, ProError> {
    let mut toks = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' || c == b')' {
            toks.push((i, (c as char).to_string()));
            i += 1;
        } else {
            let st = i;
            while i < b.len() && !b[i].is_ascii_whitespace() && b[i] != b'(' && b[i] != b')' {
                i += 1;
            }
            toks.push((st, s[st..i].to_string()));
        }
    }
    let mut pos = 0;
    let e = parse_sexp(&toks, &mut pos, s.len())?;
    if pos != toks.len() {
        return Err(ProError::Parse { pos: toks[pos].0, msg: "trailing input".into() });
    }
    Ok(e)
}

fn parse_sexp(toks: &[(usize, String)], pos: &mut usize, end: usize) -> Result<ProExpr, ProError> {
    let at = |p: usize| toks.get(p).map_or(end, |t| t.0);
    let Some((p0, t)) = toks.get(*pos) else {
        return Err(ProError::Parse { pos: end, msg: "unexpected end of input".into() });
    };
    *pos += 1;
    if t == ")" {
        return Err(ProError::Parse { pos: *p0, msg: "unexpected `)`".into() });
    }
    if t != "(" {
        if matches!(t.as_str(), "id" | "comp" | "tensor") {
            return Err(ProError::Parse { pos: *p0, msg: format!("`{t}` is a keyword") });
        }
        return Ok(ProExpr::Gen(t.clone()));
    }
    let Some((p1, head)) = toks.get(*pos) else {
        return Err(ProError::Parse { pos: end, msg: "unexpected end of input".into() });
    };
    *pos += 1;
    let form = match head.as_str() {
        "id" => {
            let Some((p2, n)) = toks.get(*pos) else {
                return Err(ProError::Parse { pos: end, msg: "expected a width".into() });
            };
            *pos += 1;
            let n: usize = n.parse().map_err(|_| ProError::Parse { pos: *p2, msg: "expected a natural number".into() })?;
            ProExpr::Id(n)
        }
        "comp" | "tensor" => {
            let mut args = Vec::new();
            while toks.get(*pos).map(|t| t.1.as_str()) != Some(")") {
                if *pos >= toks.len() {
                    return Err(ProError::Parse { pos: end, msg: "unclosed `(`".into() });
                }
                args.push(parse_sexp(toks, pos, end)?);
            }
            if args.len() < 2 {
                return Err(ProError::Parse { pos: *p1, msg: format!("`{head}` needs at least two arguments") });
            }
            if head == "comp" {
                let mut it = args.into_iter().rev();
                let mut acc = it.next().unwrap();
                for g in it {
                    acc = ProExpr::comp(g, acc);
                }
                acc
            } else {
                let mut it = args.into_iter();
                let mut acc = it.next().unwrap();
                for b in it {
                    acc = ProExpr::tensor(acc, b);
                }
                acc
            }
        }
        _ => return Err(ProError::Parse { pos: *p1, msg: format!("unknown form `{head}`") }),
    };
    if toks.get(*pos).map(|t| t.1.as_str()) != Some(")") {
        return Err(ProError::Parse { pos: at(*pos), msg: "expected `)`".into() });
    }
    *pos += 1;
    Ok(form)
}

pub type Signature = BTreeMap<String, (usize, usize)>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layer<G> {
    pub offset: usize,
    pub gen: G,
    pub arity: usize,
    pub coarity: usize,
}

impl<G: Clone> Layer<G> {
    fn shifted(&self, by: usize) -> Layer<G> {
        Layer { offset: self.offset + by, ..self.clone() }
    }
}

/// A morphism of a free PRO as a sequence of layers, each one generator
/// tensored with identities on both sides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layered<G> {
    pub width: usize,
    pub layers: Vec<Layer<G>>,
}

pub const CLASS_CAP: usize = 200_000;

pub trait Label: Clone + Ord + Hash + Debug {}
impl<T: Clone + Ord + Hash + Debug> Label for T {}

impl<G: Label> Layered<G> {
    pub fn id(width: usize) -> Self {
        Layered { width, layers: Vec::new() }
    }

    pub fn single(gen: G, arity: usize, coarity: usize) -> Self {
        Layered { width: arity, layers: vec![Layer { offset: 0, gen, arity, coarity }] }
    }

    pub fn arity(&self) -> usize {
        self.width
    }

    pub fn coarity(&self) -> usize {
        slice_widths(self.width, &self.layers).last().copied().unwrap()
    }

    pub fn is_identity(&self) -> bool {
        self.layers.is_empty()
    }

    /// `g ∘ f`, unnormalised.
    pub fn then(f: &Layered<G>, g: &Layered<G>) -> Option<Layered<G>> {
        if f.coarity() != g.width {
            return None;
        }
        let mut layers = f.layers.clone();
        layers.extend(g.layers.iter().cloned());
        Some(Layered { width: f.width, layers })
    }

    /// `a ⊗ b`, unnormalised: `a` runs first with `b`'s wires idle.
    pub fn tensor(a: &Layered<G>, b: &Layered<G>) -> Layered<G> {
        let ca = a.coarity();
        let mut layers = a.layers.clone();
        layers.extend(b.layers.iter().map(|l| l.shifted(ca)));
        Layered { width: a.width + b.width, layers }
    }

    pub fn shifted(&self, by: usize, extra: usize) -> Layered<G> {
        Layered { width: self.width + by + extra, layers: self.layers.iter().map(|l| l.shifted(by)).collect() }
    }

    /// Every layer sequence reachable by interchange.
    pub fn class(&self) -> Result<BTreeSet<Vec<Layer<G>>>, ProError> {
        let mut seen: HashSet<Vec<Layer<G>>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.layers.clone());
        queue.push_back(self.layers.clone());
        while let Some(seq) = queue.pop_front() {
            for i in 1..seq.len() {
                for (h, g) in swaps(&seq[i - 1], &seq[i]) {
                    let mut next = seq.clone();
                    next[i - 1] = h;
                    next[i] = g;
                    if seen.insert(next.clone()) {
                        if seen.len() > CLASS_CAP {
                            return Err(ProError::ClassTooLarge(CLASS_CAP));
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// The lexicographically least layer sequence of the interchange class.
    pub fn canonical(&self) -> Result<Layered<G>, ProError> {
        if self.layers.len() < 2 {
            return Ok(self.clone());
        }
        let c = self.class()?;
        Ok(Layered { width: self.width, layers: c.into_iter().next().unwrap() })
    }

    pub fn to_expr(&self, name: impl Fn(&G) -> ProExpr) -> ProExpr {
        let mut w = self.width;
        let mut parts = Vec::new();
        for l in &self.layers {
            let right = w - l.offset - l.arity;
            let mut e = name(&l.gen);
            if l.offset > 0 {
                e = ProExpr::tensor(ProExpr::Id(l.offset), e);
            }
            if right > 0 {
                e = ProExpr::tensor(e, ProExpr::Id(right));
            }
            parts.push(e);
            w = w - l.arity + l.coarity;
        }
        let mut it = parts.into_iter();
        match it.next() {
            None => ProExpr::Id(self.width),
            Some(first) => it.fold(first, |acc, e| ProExpr::comp(e, acc)),
        }
    }
}

impl Layered<String> {
    pub fn from_expr(e: &ProExpr, sig: &Signature) -> Result<Self, ProError> {
        match e {
            ProExpr::Gen(g) => {
                let (a, c) = sig.get(g).copied().ok_or_else(|| ProError::UnknownGenerator(g.clone()))?;
                Ok(Layered::single(g.clone(), a, c))
            }
            ProExpr::Id(n) => Ok(Layered::id(*n)),
            ProExpr::Comp(g, f) => {
                let (lg, lf) = (Layered::from_expr(g, sig)?, Layered::from_expr(f, sig)?);
                Layered::then(&lf, &lg).ok_or_else(|| ProError::Type(format!("cannot compose {g} after {f}")))
            }
            ProExpr::Tensor(a, b) => Ok(Layered::tensor(&Layered::from_expr(a, sig)?, &Layered::from_expr(b, sig)?)),
        }
    }

    pub fn expr(&self) -> ProExpr {
        self.to_expr(|g| ProExpr::Gen(g.clone()))
    }
}

impl fmt::Display for Layered<String> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr())
    }
}

/// Widths of the wire slices before, between and after the layers.
pub fn slice_widths<G>(width: usize, layers: &[Layer<G>]) -> Vec<usize> {
    let mut out = Vec::with_capacity(layers.len() + 1);
    let mut w = width;
    out.push(w);
    for l in layers {
        w = w + l.coarity - l.arity;
        out.push(w);
    }
    out
}

/// Ways to move `h` (second) before `g` (first).
fn swaps<G: Clone>(g: &Layer<G>, h: &Layer<G>) -> Vec<(Layer<G>, Layer<G>)> {
    let mut out = Vec::new();
    let (a, b) = (g.offset, h.offset);
    if b + h.arity <= a {
        let h2 = Layer { offset: b, ..h.clone() };
        let g2 = Layer { offset: a + h.coarity - h.arity, ..g.clone() };
        out.push((h2, g2));
    }
    if b >= a + g.coarity {
        let h2 = Layer { offset: b + g.arity - g.coarity, ..h.clone() };
        let g2 = Layer { offset: a, ..g.clone() };
        if !out.iter().any(|(x, y)| x.offset == h2.offset && y.offset == g2.offset) {
            out.push((h2, g2));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule<G> {
    pub name: String,
    pub lhs: Layered<G>,
    pub rhs: Layered<G>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normal<G> {
    Done { form: Layered<G>, steps: usize },
    FuelExhausted { partial: Layered<G>, steps: usize },
}

impl<G> Normal<G> {
    pub fn form(&self) -> &Layered<G> {
        match self {
            Normal::Done { form, .. } => form,
            Normal::FuelExhausted { partial, .. } => partial,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Normal::Done { .. })
    }
}

fn find_redex<G: Label>(d: &Layered<G>, rules: &[Rule<G>]) -> Result<Option<Layered<G>>, ProError> {
    let class = d.class()?;
    for seq in class {
        let widths = slice_widths(d.width, &seq);
        for i in 0..seq.len() {
            for r in rules {
                let pat = &r.lhs.layers;
                if pat.is_empty() || i + pat.len() > seq.len() || seq[i].offset < pat[0].offset {
                    continue;
                }
                let o = seq[i].offset - pat[0].offset;
                if widths[i] < o + r.lhs.width {
                    continue;
                }
                let hit = pat.iter().zip(&seq[i..]).all(|(p, s)| p.gen == s.gen && s.offset == p.offset + o);
                if hit {
                    let mut layers = seq[..i].to_vec();
                    layers.extend(r.rhs.layers.iter().map(|l| l.shifted(o)));
                    layers.extend(seq[i + pat.len()..].iter().cloned());
                    return Ok(Some(Layered { width: d.width, layers }));
                }
            }
        }
    }
    Ok(None)
}

/// Rewrites to normal form, earliest redex first, one unit of fuel per step.
pub fn rewrite_normalize<G: Label>(d: &Layered<G>, rules: &[Rule<G>], fuel: usize) -> Result<Normal<G>, ProError> {
    let mut cur = d.canonical()?;
    let mut steps = 0;
    loop {
        let Some(next) = find_redex(&cur, rules)? else {
            return Ok(Normal::Done { form: cur, steps });
        };
        if steps == fuel {
            return Ok(Normal::FuelExhausted { partial: cur, steps });
        }
        steps += 1;
        cur = next.canonical()?;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProPresentation {
    pub generators: Signature,
    pub rules: Vec<(String, ProExpr, ProExpr)>,
    pub model: Option<String>,
}

impl ProPresentation {
    pub fn from_json(v: &Value) -> Result<Self, ProError> {
        let bad = |m: &str| ProError::Json(m.to_string());
        let mut generators = Signature::new();
        match v.get("generators") {
            Some(Value::Array(gs)) => {
                for g in gs {
                    let name = g.get("name").and_then(Value::as_str).ok_or_else(|| bad("generator without a name"))?;
                    let nat = |k: &str| {
                        g.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| bad(&format!("generator `{name}`: {k} must be a natural number")))
                    };
                    if generators.insert(name.to_string(), (nat("arity")?, nat("coarity")?)).is_some() {
                        return Err(bad(&format!("generator `{name}` declared twice")));
                    }
                }
            }
            Some(Value::Object(gs)) => {
                for (k, t) in gs {
                    let arr = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("generator type must be [arity, coarity]"))?;
                    let n = arr[0].as_u64().ok_or_else(|| bad("arity must be a natural number"))? as usize;
                    let m = arr[1].as_u64().ok_or_else(|| bad("coarity must be a natural number"))? as usize;
                    generators.insert(k.clone(), (n, m));
                }
            }
            _ => return Err(bad("missing generators")),
        }
        let mut rules = Vec::new();
        for (i, r) in v.get("rules").and_then(Value::as_array).cloned().unwrap_or_default().iter().enumerate() {
            let (name, l, rr) = match r {
                Value::Array(pair) if pair.len() == 2 => (format!("rule{i}"), pair[0].as_str(), pair[1].as_str()),
                Value::Object(_) => (
                    r.get("name").and_then(Value::as_str).map(str::to_string).unwrap_or_else(|| format!("rule{i}")),
                    r.get("lhs").and_then(Value::as_str),
                    r.get("rhs").and_then(Value::as_str),
                ),
                _ => return Err(ProError::BadRule(format!("rule{i}"), "expected [lhs, rhs]".into())),
            };
            let side = |k: &str, e: Option<&str>| -> Result<ProExpr, ProError> {
                let s = e.ok_or_else(|| ProError::BadRule(name.clone(), format!("missing {k}")))?;
                parse_expr(s).map_err(|e| ProError::BadRule(name.clone(), format!("{k}: {e}")))
            };
            rules.push((name.clone(), side("lhs", l)?, side("rhs", rr)?));
        }
        let model = v.get("model").and_then(Value::as_str).map(str::to_string);
        Ok(ProPresentation { generators, rules, model })
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> =
            self.generators.iter().map(|(k, (n, m))| json!({ "name": k, "arity": n, "coarity": m })).collect();
        let rules: Vec<Value> = self
            .rules
            .iter()
            .map(|(n, l, r)| json!({ "name": n, "lhs": l.to_string(), "rhs": r.to_string() }))
            .collect();
        let mut v = json!({ "generators": gens, "rules": rules });
        if let Some(m) = &self.model {
            v["model"] = json!(m);
        }
        v
    }

    /// Type-checks every rule and returns them in layered form.
    pub fn compiled_rules(&self) -> Result<Vec<Rule<String>>, ProError> {
        let mut out = Vec::new();
        for (n, l, r) in &self.rules {
            let tl = l.type_of(&self.generators).map_err(|e| ProError::BadRule(n.clone(), e.to_string()))?;
            let tr = r.type_of(&self.generators).map_err(|e| ProError::BadRule(n.clone(), e.to_string()))?;
            if tl != tr {
                return Err(ProError::BadRule(n.clone(), format!("sides have types {tl:?} and {tr:?}")));
            }
            let lhs = Layered::from_expr(l, &self.generators)?.canonical()?;
            if lhs.is_identity() {
                return Err(ProError::BadRule(n.clone(), "left side has no generators".into()));
            }
            let rhs = Layered::from_expr(r, &self.generators)?.canonical()?;
            out.push(Rule { name: n.clone(), lhs, rhs });
        }
        Ok(out)
    }

    pub fn monoid() -> Self {
        let g: Signature = [("m".to_string(), (2, 1)), ("e".to_string(), (0, 1))].into_iter().collect();
        let r = |n: &str, l: &str, rr: &str| (n.to_string(), parse_expr(l).unwrap(), parse_expr(rr).unwrap());
        ProPresentation {
            generators: g,
            rules: vec![
                r("assoc", "(comp m (tensor m (id 1)))", "(comp m (tensor (id 1) m))"),
                r("unit-left", "(comp m (tensor e (id 1)))", "(id 1)"),
                r("unit-right", "(comp m (tensor (id 1) e))", "(id 1)"),
            ],
            model: Some("monoid".into()),
        }
    }
}

/// A PRO with computable operations.
pub trait Pro {
    type Mor: Clone + Ord + Hash + Debug;

    fn arity(&self, f: &Self::Mor) -> usize;
    fn coarity(&self, f: &Self::Mor) -> usize;
    fn id(&self, n: usize) -> Self::Mor;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor, ProError>;
    fn tensor(&self, a: &Self::Mor, b: &Self::Mor) -> Result<Self::Mor, ProError>;
    /// All morphisms `n → m`; `fuel` bounds the search where the hom-set is
    /// not known in closed form.
    fn enumerate_hom(&self, n: usize, m: usize, fuel: usize) -> Result<Vec<Self::Mor>, ProError>;
    fn generator(&self, name: &str) -> Option<Self::Mor>;
    /// An expression in the generators denoting `f`.
    fn express(&self, f: &Self::Mor) -> Option<ProExpr>;
    fn describe(&self, f: &Self::Mor) -> String {
        self.express(f).map_or_else(|| format!("{f:?}"), |e| e.to_string())
    }
}

pub fn eval_expr<P: Pro>(p: &P, e: &ProExpr) -> Result<P::Mor, ProError> {
    match e {
        ProExpr::Gen(g) => p.generator(g).ok_or_else(|| ProError::UnknownGenerator(g.clone())),
        ProExpr::Id(n) => Ok(p.id(*n)),
        ProExpr::Comp(g, f) => p.compose(&eval_expr(p, g)?, &eval_expr(p, f)?),
        ProExpr::Tensor(a, b) => p.tensor(&eval_expr(p, a)?, &eval_expr(p, b)?),
    }
}

/// A monotone map `[n] → [m]` given as the list of images.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monotone {
    pub codomain: usize,
    pub map: Vec<usize>,
}

impl Monotone {
    fn all(n: usize, m: usize, injective: bool) -> Vec<Monotone> {
        fn go(n: usize, m: usize, from: usize, inj: bool, cur: &mut Vec<usize>, out: &mut Vec<Monotone>) {
            if cur.len() == n {
                out.push(Monotone { codomain: m, map: cur.clone() });
                return;
            }
            for v in from..m {
                cur.push(v);
                go(n, m, if inj { v + 1 } else { v }, inj, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, m, 0, injective, &mut Vec::new(), &mut out);
        out
    }

    fn compose(g: &Monotone, f: &Monotone) -> Result<Monotone, ProError> {
        if f.codomain != g.map.len() {
            return Err(ProError::Type(format!("{} vs {}", f.codomain, g.map.len())));
        }
        Ok(Monotone { codomain: g.codomain, map: f.map.iter().map(|&i| g.map[i]).collect() })
    }

    fn tensor(a: &Monotone, b: &Monotone) -> Monotone {
        let mut map = a.map.clone();
        map.extend(b.map.iter().map(|&i| i + a.codomain));
        Monotone { codomain: a.codomain + b.codomain, map }
    }

    fn fibres(&self) -> Vec<usize> {
        let mut c = vec![0; self.codomain];
        for &i in &self.map {
            c[i] += 1;
        }
        c
    }
}

/// The PRO of monoids: monotone maps between finite ordinals.
#[derive(Clone, Copy, Debug, Default)]
pub struct MonoidModel;

fn right_comb(k: usize) -> ProExpr {
    match k {
        0 => ProExpr::gen("e"),
        1 => ProExpr::Id(1),
        _ => ProExpr::comp(ProExpr::gen("m"), ProExpr::tensor(ProExpr::Id(1), right_comb(k - 1))),
    }
}

fn tensor_all(parts: Vec<ProExpr>, empty: ProExpr) -> ProExpr {
    let mut it = parts.into_iter();
    match it.next() {
        None => empty,
        Some(first) => it.fold(first, ProExpr::tensor),
    }
}

impl Pro for MonoidModel {
    type Mor = Monotone;

    fn arity(&self, f: &Monotone) -> usize {
        f.map.len()
    }
    fn coarity(&self, f: &Monotone) -> usize {
        f.codomain
    }
    fn id(&self, n: usize) -> Monotone {
        Monotone { codomain: n, map: (0..n).collect() }
    }
    fn compose(&self, g: &Monotone, f: &Monotone) -> Result<Monotone, ProError> {
        Monotone::compose(g, f)
    }
    fn tensor(&self, a: &Monotone, b: &Monotone) -> Result<Monotone, ProError> {
        Ok(Monotone::tensor(a, b))
    }
    fn enumerate_hom(&self, n: usize, m: usize, _fuel: usize) -> Result<Vec<Monotone>, ProError> {
        Ok(Monotone::all(n, m, false))
    }
    fn generator(&self, name: &str) -> Option<Monotone> {
        match name {
            "m" => Some(Monotone { codomain: 1, map: vec![0, 0] }),
            "e" => Some(Monotone { codomain: 1, map: vec![] }),
            _ => None,
        }
    }
    fn express(&self, f: &Monotone) -> Option<ProExpr> {
        Some(tensor_all(f.fibres().into_iter().map(right_comb).collect(), ProExpr::Id(0)))
    }
}

/// The PRO of pointed objects: monotone injections.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointedModel;

impl Pro for PointedModel {
    type Mor = Monotone;

    fn arity(&self, f: &Monotone) -> usize {
        f.map.len()
    }
    fn coarity(&self, f: &Monotone) -> usize {
        f.codomain
    }
    fn id(&self, n: usize) -> Monotone {
        Monotone { codomain: n, map: (0..n).collect() }
    }
    fn compose(&self, g: &Monotone, f: &Monotone) -> Result<Monotone, ProError> {
        Monotone::compose(g, f)
    }
    fn tensor(&self, a: &Monotone, b: &Monotone) -> Result<Monotone, ProError> {
        Ok(Monotone::tensor(a, b))
    }
    fn enumerate_hom(&self, n: usize, m: usize, _fuel: usize) -> Result<Vec<Monotone>, ProError> {
        Ok(Monotone::all(n, m, true))
    }
    fn generator(&self, name: &str) -> Option<Monotone> {
        (name == "e").then(|| Monotone { codomain: 1, map: vec![] })
    }
    fn express(&self, f: &Monotone) -> Option<ProExpr> {
        let parts = f.fibres().into_iter().map(|k| if k == 0 { ProExpr::gen("e") } else { ProExpr::Id(1) }).collect();
        Some(tensor_all(parts, ProExpr::Id(0)))
    }
}

/// A function `Aⁿ → Aᵐ` on `A = {0, …, k-1}`, tabulated by input code.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Func {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub table: Vec<Vec<usize>>,
}

pub fn encode(k: usize, xs: &[usize]) -> usize {
    xs.iter().fold(0, |acc, &x| acc * k + x)
}

pub fn decode(k: usize, n: usize, mut code: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = code % k;
        code /= k;
    }
    out
}

impl Func {
    pub fn from_fn(k: usize, n: usize, m: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> Func {
        let rows = k.pow(n as u32);
        Func { k, n, m, table: (0..rows).map(|c| f(&decode(k, n, c))).collect() }
    }

    pub fn apply(&self, xs: &[usize]) -> &[usize] {
        &self.table[encode(self.k, xs)]
    }

    pub fn inputs(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.table.len()).map(|c| decode(self.k, self.n, c))
    }
}

/// The endomorphism PRO of a finite set.
#[derive(Clone, Debug)]
pub struct TautPro {
    pub k: usize,
    pub generators: BTreeMap<String, Func>,
}

impl TautPro {
    pub fn new(k: usize) -> Self {
        TautPro { k, generators: BTreeMap::new() }
    }
}

impl Pro for TautPro {
    type Mor = Func;

    fn arity(&self, f: &Func) -> usize {
        f.n
    }
    fn coarity(&self, f: &Func) -> usize {
        f.m
    }
    fn id(&self, n: usize) -> Func {
        Func::from_fn(self.k, n, n, |x| x.to_vec())
    }
    fn compose(&self, g: &Func, f: &Func) -> Result<Func, ProError> {
        if f.m != g.n {
            return Err(ProError::Type(format!("{} vs {}", f.m, g.n)));
        }
        Ok(Func::from_fn(self.k, f.n, g.m, |x| g.apply(f.apply(x)).to_vec()))
    }
    fn tensor(&self, a: &Func, b: &Func) -> Result<Func, ProError> {
        Ok(Func::from_fn(self.k, a.n + b.n, a.m + b.m, |x| {
            let mut v = a.apply(&x[..a.n]).to_vec();
            v.extend_from_slice(b.apply(&x[a.n..]));
            v
        }))
    }
    fn enumerate_hom(&self, n: usize, m: usize, fuel: usize) -> Result<Vec<Func>, ProError> {
        let rows = self.k.pow(n as u32);
        let outs = self.k.pow(m as u32);
        let total = (outs as f64).powi(rows as i32);
        if total > fuel.max(1) as f64 {
            return Err(ProError::Unsupported(format!("hom({n},{m}) has {total} functions")));
        }
        let mut out = vec![Vec::new()];
        for _ in 0..rows {
            let mut next = Vec::new();
            for t in &out {
                for o in 0..outs {
                    let mut t2: Vec<Vec<usize>> = t.clone();
                    t2.push(decode(self.k, m, o));
                    next.push(t2);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|table| Func { k: self.k, n, m, table }).collect())
    }
    fn generator(&self, name: &str) -> Option<Func> {
        self.generators.get(name).cloned()
    }
    fn express(&self, _f: &Func) -> Option<ProExpr> {
        None
    }
}

/// The PRO presented by generators and oriented rules, with morphisms kept
/// as layered normal forms.
#[derive(Clone, Debug)]
pub struct PresentedPro {
    pub pres: ProPresentation,
    pub rules: Vec<Rule<String>>,
    pub fuel: usize,
}

impl PresentedPro {
    pub fn new(pres: ProPresentation, fuel: usize) -> Result<Self, ProError> {
        let rules = pres.compiled_rules()?;
        Ok(PresentedPro { pres, rules, fuel })
    }

    pub fn normalize(&self, d: &Layered<String>) -> Result<Layered<String>, ProError> {
        match rewrite_normalize(d, &self.rules, self.fuel)? {
            Normal::Done { form, .. } => Ok(form),
            Normal::FuelExhausted { steps, .. } => Err(ProError::FuelExhausted(steps)),
        }
    }

    pub fn normalize_expr(&self, e: &ProExpr) -> Result<Normal<String>, ProError> {
        let d = Layered::from_expr(e, &self.pres.generators)?;
        rewrite_normalize(&d, &self.rules, self.fuel)
    }
}

impl Pro for PresentedPro {
    type Mor = Layered<String>;

    fn arity(&self, f: &Layered<String>) -> usize {
        f.arity()
    }
    fn coarity(&self, f: &Layered<String>) -> usize {
        f.coarity()
    }
    fn id(&self, n: usize) -> Layered<String> {
        Layered::id(n)
    }
    fn compose(&self, g: &Layered<String>, f: &Layered<String>) -> Result<Layered<String>, ProError> {
        let d = Layered::then(f, g).ok_or_else(|| ProError::Type("composite of incompatible types".into()))?;
        self.normalize(&d)
    }
    fn tensor(&self, a: &Layered<String>, b: &Layered<String>) -> Result<Layered<String>, ProError> {
        self.normalize(&Layered::tensor(a, b))
    }
    /// Normal forms of layer sequences of length at most `fuel`.
    fn enumerate_hom(&self, n: usize, m: usize, fuel: usize) -> Result<Vec<Layered<String>>, ProError> {
        let gens: Vec<(String, usize, usize)> = self.pres.generators.iter().map(|(k, &(a, c))| (k.clone(), a, c)).collect();
        let mut found = BTreeSet::new();
        let mut frontier = vec![Layered::<String>::id(n)];
        for depth in 0..=fuel {
            let mut next = Vec::new();
            for d in &frontier {
                if d.coarity() == m {
                    match rewrite_normalize(d, &self.rules, self.fuel)? {
                        Normal::Done { form, .. } => {
                            found.insert(form);
                        }
                        Normal::FuelExhausted { steps, .. } => return Err(ProError::FuelExhausted(steps)),
                    }
                }
                if depth == fuel {
                    continue;
                }
                let w = d.coarity();
                for (g, a, c) in &gens {
                    if *a > w {
                        continue;
                    }
                    for off in 0..=w - a {
                        let mut e = d.clone();
                        e.layers.push(Layer { offset: off, gen: g.clone(), arity: *a, coarity: *c });
                        next.push(e);
                    }
                }
            }
            frontier = next;
        }
        Ok(found.into_iter().collect())
    }
    fn generator(&self, name: &str) -> Option<Layered<String>> {
        self.pres.generators.get(name).map(|&(a, c)| Layered::single(name.to_string(), a, c))
    }
    fn express(&self, f: &Layered<String>) -> Option<ProExpr> {
        Some(f.expr())
    }
}

/// A morphism of a [`TheoryPro`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoryMor {
    Monotone(Monotone),
    Layered(Layered<String>),
}

/// The PRO of a theory file: an exact model when the file names one,
/// otherwise rewriting on the presentation.
#[derive(Clone, Debug)]
pub enum TheoryPro {
    Monoid(ProPresentation),
    Pointed(ProPresentation),
    Presented(PresentedPro),
}

impl TheoryPro {
    pub fn new(pres: ProPresentation, fuel: usize) -> Result<Self, ProError> {
        pres.compiled_rules()?;
        let expect = |gens: &[(&str, (usize, usize))]| -> Result<(), ProError> {
            let want: Signature = gens.iter().map(|(k, t)| (k.to_string(), *t)).collect();
            if pres.generators == want {
                Ok(())
            } else {
                Err(ProError::Unsupported(format!("model `{}` needs generators {want:?}", pres.model.as_deref().unwrap_or(""))))
            }
        };
        match pres.model.as_deref() {
            Some("monoid") => {
                expect(&[("m", (2, 1)), ("e", (0, 1))])?;
                Ok(TheoryPro::Monoid(pres))
            }
            Some("pointed") => {
                expect(&[("e", (0, 1))])?;
                Ok(TheoryPro::Pointed(pres))
            }
            None => Ok(TheoryPro::Presented(PresentedPro::new(pres, fuel)?)),
            Some(other) => Err(ProError::Unsupported(format!("unknown model `{other}`"))),
        }
    }

    pub fn presentation(&self) -> &ProPresentation {
        match self {
            TheoryPro::Monoid(p) | TheoryPro::Pointed(p) => p,
            TheoryPro::Presented(p) => &p.pres,
        }
    }

    fn mono(f: &TheoryMor) -> Result<&Monotone, ProError> {
        match f {
            TheoryMor::Monotone(m) => Ok(m),
            TheoryMor::Layered(_) => Err(ProError::Type("morphism of another PRO".into())),
        }
    }

    fn layered(f: &TheoryMor) -> Result<&Layered<String>, ProError> {
        match f {
            TheoryMor::Layered(l) => Ok(l),
            TheoryMor::Monotone(_) => Err(ProError::Type("morphism of another PRO".into())),
        }
    }
}

impl Pro for TheoryPro {
    type Mor = TheoryMor;

    fn arity(&self, f: &TheoryMor) -> usize {
        match f {
            TheoryMor::Monotone(m) => m.map.len(),
            TheoryMor::Layered(l) => l.arity(),
        }
    }
    fn coarity(&self, f: &TheoryMor) -> usize {
        match f {
            TheoryMor::Monotone(m) => m.codomain,
            TheoryMor::Layered(l) => l.coarity(),
        }
    }
    fn id(&self, n: usize) -> TheoryMor {
        match self {
            TheoryPro::Monoid(_) | TheoryPro::Pointed(_) => TheoryMor::Monotone(MonoidModel.id(n)),
            TheoryPro::Presented(_) => TheoryMor::Layered(Layered::id(n)),
        }
    }
    fn compose(&self, g: &TheoryMor, f: &TheoryMor) -> Result<TheoryMor, ProError> {
        match self {
            TheoryPro::Monoid(_) | TheoryPro::Pointed(_) => {
                Ok(TheoryMor::Monotone(Monotone::compose(Self::mono(g)?, Self::mono(f)?)?))
            }
            TheoryPro::Presented(p) => Ok(TheoryMor::Layered(p.compose(Self::layered(g)?, Self::layered(f)?)?)),
        }
    }
    fn tensor(&self, a: &TheoryMor, b: &TheoryMor) -> Result<TheoryMor, ProError> {
        match self {
            TheoryPro::Monoid(_) | TheoryPro::Pointed(_) => {
                Ok(TheoryMor::Monotone(Monotone::tensor(Self::mono(a)?, Self::mono(b)?)))
            }
            TheoryPro::Presented(p) => Ok(TheoryMor::Layered(p.tensor(Self::layered(a)?, Self::layered(b)?)?)),
        }
    }
    fn enumerate_hom(&self, n: usize, m: usize, fuel: usize) -> Result<Vec<TheoryMor>, ProError> {
        Ok(match self {
            TheoryPro::Monoid(_) => MonoidModel.enumerate_hom(n, m, fuel)?.into_iter().map(TheoryMor::Monotone).collect(),
            TheoryPro::Pointed(_) => PointedModel.enumerate_hom(n, m, fuel)?.into_iter().map(TheoryMor::Monotone).collect(),
            TheoryPro::Presented(p) => p.enumerate_hom(n, m, fuel)?.into_iter().map(TheoryMor::Layered).collect(),
        })
    }
    fn generator(&self, name: &str) -> Option<TheoryMor> {
        match self {
            TheoryPro::Monoid(_) => MonoidModel.generator(name).map(TheoryMor::Monotone),
            TheoryPro::Pointed(_) => PointedModel.generator(name).map(TheoryMor::Monotone),
            TheoryPro::Presented(p) => p.generator(name).map(TheoryMor::Layered),
        }
    }
    fn express(&self, f: &TheoryMor) -> Option<ProExpr> {
        match (self, f) {
            (TheoryPro::Monoid(_), TheoryMor::Monotone(m)) => MonoidModel.express(m),
            (TheoryPro::Pointed(_), TheoryMor::Monotone(m)) => PointedModel.express(m),
            (TheoryPro::Presented(p), TheoryMor::Layered(l)) => p.express(l),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProViolation {
    pub law: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default)]
pub struct ProAlgebraReport {
    pub violations: Vec<ProViolation>,
    pub checked: usize,
}

impl ProAlgebraReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates an expression in the generators as a function on the carrier.
pub fn interpret(k: usize, interp: &BTreeMap<String, Func>, e: &ProExpr) -> Result<Func, ProError> {
    let t = TautPro { k, generators: interp.clone() };
    eval_expr(&t, e)
}

fn first_difference(a: &Func, b: &Func) -> Option<Vec<usize>> {
    a.inputs().find(|x| a.apply(x) != b.apply(x))
}

/// Checks that an interpretation of generators as functions on
/// `{0, …, k-1}` is a strict monoidal functor from `p`: the rules hold, and
/// composition, tensor and identities are preserved on every enumerated
/// morphism with objects up to `max_obj`.
pub fn pro_algebra_check<P: Pro>(
    p: &P,
    rules: &[(String, ProExpr, ProExpr)],
    k: usize,
    interp: &BTreeMap<String, Func>,
    max_obj: usize,
    fuel: usize,
) -> Result<ProAlgebraReport, ProError> {
    let mut rep = ProAlgebraReport::default();
    let taut = TautPro { k, generators: interp.clone() };
    for (name, l, r) in rules {
        let (fl, fr) = (eval_expr(&taut, l)?, eval_expr(&taut, r)?);
        rep.checked += 1;
        if let Some(x) = first_difference(&fl, &fr) {
            rep.violations.push(ProViolation { law: format!("rule {name}"), witness: format!("input {x:?}") });
        }
    }
    let omega = |f: &P::Mor| -> Result<Func, ProError> {
        let e = p.express(f).ok_or_else(|| ProError::Unsupported("morphism has no expression".into()))?;
        eval_expr(&taut, &e)
    };
    let mut homs: BTreeMap<(usize, usize), Vec<(P::Mor, Func)>> = BTreeMap::new();
    for n in 0..=max_obj {
        for m in 0..=max_obj {
            let fs = p.enumerate_hom(n, m, fuel)?;
            let mut v = Vec::new();
            for f in fs {
                let w = omega(&f)?;
                v.push((f, w));
            }
            homs.insert((n, m), v);
        }
    }
    for n in 0..=max_obj {
        rep.checked += 1;
        if let Some(x) = first_difference(&omega(&p.id(n))?, &taut.id(n)) {
            rep.violations.push(ProViolation { law: "identity".into(), witness: format!("id {n} at {x:?}") });
        }
    }
    for ((n, m), fs) in &homs {
        for l in 0..=max_obj {
            for (g, wg) in &homs[&(*m, l)] {
                for (f, wf) in fs {
                    rep.checked += 1;
                    let lhs = omega(&p.compose(g, f)?)?;
                    let rhs = taut.compose(wg, wf)?;
                    if let Some(x) = first_difference(&lhs, &rhs) {
                        rep.violations.push(ProViolation {
                            law: "composition".into(),
                            witness: format!("{} after {} at {x:?}", p.describe(g), p.describe(f)),
                        });
                    }
                }
            }
        }
        for ((n2, m2), gs) in &homs {
            if n + n2 > max_obj || m + m2 > max_obj {
                continue;
            }
            for (f, wf) in fs {
                for (g, wg) in gs {
                    rep.checked += 1;
                    let lhs = omega(&p.tensor(f, g)?)?;
                    let rhs = taut.tensor(wf, wg)?;
                    if let Some(x) = first_difference(&lhs, &rhs) {
                        rep.violations.push(ProViolation {
                            law: "tensor".into(),
                            witness: format!("{} + {} at {x:?}", p.describe(f), p.describe(g)),
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        ProPresentation::monoid().generators
    }

    #[test]
    fn parse_and_print() {
        let e = parse_expr("(comp m (tensor e (id 1)))").unwrap();
        assert_eq!(e.to_string(), "(comp m (tensor e (id 1)))");
        assert_eq!(e.type_of(&sig()).unwrap(), (1, 1));
        let e3 = parse_expr("(comp m m m)").unwrap();
        assert_eq!(e3.to_string(), "(comp m (comp m m))");
        match parse_expr("(comp m (tensor e").unwrap_err() {
            ProError::Parse { pos, .. } => assert_eq!(pos, 17),
            e => panic!("{e}"),
        }
        assert!(parse_expr("(frob m)").is_err());
        assert!(parse_expr("(comp m m)").unwrap().type_of(&sig()).is_err());
    }

    #[test]
    fn interchange_class_of_disjoint_generators() {
        let a = Layered::single("m".to_string(), 2, 1);
        let d = Layered::tensor(&a, &a);
        let c = d.class().unwrap();
        assert_eq!(c.len(), 2);
        let canon = d.canonical().unwrap();
        assert_eq!(canon.layers[0].offset, 0);
        let d2 = Layered::tensor(&Layered::id(2), &a);
        let d3 = Layered::then(&d2, &Layered::tensor(&a, &Layered::id(1))).unwrap();
        assert_eq!(d3.class().unwrap().len(), 2);
    }

    #[test]
    fn scalar_slides_both_ways() {
        // c consumes a wire, e creates one: they commute past each other
        let s: Signature = [("c".to_string(), (1, 0)), ("e".to_string(), (0, 1))].into_iter().collect();
        let x = Layered::from_expr(&parse_expr("(comp e c)").unwrap(), &s).unwrap();
        let y = Layered::from_expr(&parse_expr("(tensor e c)").unwrap(), &s).unwrap();
        let z = Layered::from_expr(&parse_expr("(tensor c e)").unwrap(), &s).unwrap();
        assert_eq!(x.canonical().unwrap(), y.canonical().unwrap());
        assert_eq!(y.canonical().unwrap(), z.canonical().unwrap());
    }

    #[test]
    fn monoid_rewriting() {
        let p = PresentedPro::new(ProPresentation::monoid(), 50).unwrap();
        let e = parse_expr("(comp m (tensor m (id 1)))").unwrap();
        let n = p.normalize_expr(&e).unwrap();
        assert!(n.is_done());
        assert_eq!(n.form().to_string(), "(comp m (tensor (id 1) m))");
        let u = parse_expr("(comp m (tensor e (id 1)))").unwrap();
        assert_eq!(p.normalize_expr(&u).unwrap().form(), &Layered::id(1));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let mut pres = ProPresentation::monoid();
        pres.rules.push(("loop".into(), parse_expr("(comp m (tensor (id 1) m))").unwrap(), parse_expr("(comp m (tensor m (id 1)))").unwrap()));
        let p = PresentedPro::new(pres, 5).unwrap();
        let e = parse_expr("(comp m (tensor m (id 1)))").unwrap();
        match p.normalize_expr(&e).unwrap() {
            Normal::FuelExhausted { steps, .. } => assert_eq!(steps, 5),
            n => panic!("{n:?}"),
        }
    }

    #[test]
    fn monoid_model_hom_sizes() {
        let m = MonoidModel;
        let sz = |a, b| m.enumerate_hom(a, b, 0).unwrap().len();
        assert_eq!((sz(2, 2), sz(3, 1), sz(1, 3), sz(0, 2)), (3, 1, 3, 1));
        // binomial(n + m - 1, n)
        assert_eq!(sz(3, 3), 10);
        let p = PointedModel;
        assert_eq!(p.enumerate_hom(2, 4, 0).unwrap().len(), 6);
    }

    #[test]
    fn model_expressions_evaluate_back() {
        let m = MonoidModel;
        for n in 0..4 {
            for k in 0..4 {
                for f in m.enumerate_hom(n, k, 0).unwrap() {
                    let e = m.express(&f).unwrap();
                    assert_eq!(eval_expr(&m, &e).unwrap(), f);
                }
            }
        }
    }

    fn xor_interp() -> BTreeMap<String, Func> {
        let mut i = BTreeMap::new();
        i.insert("m".to_string(), Func::from_fn(2, 2, 1, |x| vec![x[0] ^ x[1]]));
        i.insert("e".to_string(), Func::from_fn(2, 0, 1, |_| vec![0]));
        i
    }

    #[test]
    fn xor_is_a_monoid_algebra() {
        let pres = ProPresentation::monoid();
        let r = pro_algebra_check(&MonoidModel, &pres.rules, 2, &xor_interp(), 3, 0).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        let p = PresentedPro::new(pres.clone(), 50).unwrap();
        let r = pro_algebra_check(&p, &pres.rules, 2, &xor_interp(), 2, 3).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
    }

    #[test]
    fn implication_is_not_a_monoid_algebra() {
        let mut i = xor_interp();
        i.insert("m".to_string(), Func::from_fn(2, 2, 1, |x| vec![((1 - x[0]) | x[1]) & 1]));
        let pres = ProPresentation::monoid();
        let r = pro_algebra_check(&MonoidModel, &pres.rules, 2, &i, 3, 0).unwrap();
        assert!(!r.ok());
        assert!(r.violations.iter().any(|v| v.law == "rule assoc"));
    }

    #[test]
    fn presentation_json_round_trip() {
        let p = ProPresentation::monoid();
        assert_eq!(ProPresentation::from_json(&p.to_json()).unwrap(), p);
    }
}

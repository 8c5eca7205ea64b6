use std::collections::BTreeSet;
use std::sync::OnceLock;

use omegacat::globset::{GlobularSet, Point};
use omegacat::grdops::{
    check_associator, check_unitors, curried_hom_count, enumerate_maps, hom_count, internal_hom, internal_hom_count,
    square, Cardinal, GradedSet,
};
use omegacat::pasting::{enumerate_tree_cells, mu, mu_shape, mu_split, LabelIndex, Pd, PdGlobe, Side, Tree, TreeCell, TreeGlobe};
use omegacat::pros::{eval_expr, Layered, MonoidModel, ProExpr, ProPresentation, PresentedPro, Signature, TheoryPro};
use omegacat::weaken::{WeakBounds, WeakTheory};
use proptest::prelude::*;

fn cells() -> &'static [TreeCell] {
    static C: OnceLock<Vec<TreeCell>> = OnceLock::new();
    C.get_or_init(|| enumerate_tree_cells(3, 6))
}

fn sig() -> Signature {
    ProPresentation::monoid().generators
}

/// Well-typed monoid expressions up to size 7.
fn exprs() -> &'static [(ProExpr, (usize, usize))] {
    static E: OnceLock<Vec<(ProExpr, (usize, usize))>> = OnceLock::new();
    E.get_or_init(|| {
        let s = sig();
        let mut by: Vec<Vec<(ProExpr, (usize, usize))>> = vec![Vec::new(); 8];
        for (g, t) in &s {
            by[1].push((ProExpr::gen(g), *t));
        }
        for n in 0..3 {
            by[1].push((ProExpr::Id(n), (n, n)));
        }
        for size in 3..=7 {
            let mut next = Vec::new();
            for sa in 1..size - 1 {
                for (a, ta) in &by[sa] {
                    for (b, tb) in &by[size - 1 - sa] {
                        if tb.1 == ta.0 {
                            next.push((ProExpr::comp(a.clone(), b.clone()), (tb.0, ta.1)));
                        }
                        if ta.0 + tb.0 <= 4 {
                            next.push((ProExpr::tensor(a.clone(), b.clone()), (ta.0 + tb.0, ta.1 + tb.1)));
                        }
                    }
                }
            }
            by[size] = next;
        }
        by.into_iter().flatten().collect()
    })
}

fn graded(arities: &[usize]) -> GradedSet<String> {
    GradedSet::from_pairs(arities.iter().enumerate().map(|(i, a)| (format!("g{i}"), *a)))
}

fn presented() -> &'static PresentedPro {
    static P: OnceLock<PresentedPro> = OnceLock::new();
    P.get_or_init(|| {
        let mut pres = ProPresentation::monoid();
        pres.model = None;
        PresentedPro::new(pres, 10_000).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn tree_syntax_round_trips(i in 0..200usize) {
        let c = &cells()[i % cells().len()];
        let back: Tree = c.tree.to_string().parse().unwrap();
        prop_assert_eq!(&back, &c.tree);
    }

    #[test]
    fn mu_units(i in 0..500usize) {
        let p = cells()[i % cells().len()].to_pd();
        prop_assert_eq!(mu(&Pd::eta(&PdGlobe(Point), &p)).unwrap(), p.clone());
        prop_assert_eq!(mu(&p.map(|h| Pd::eta(&Point, h))).unwrap(), p);
    }

    #[test]
    fn mu_split_inverts_mu(i in 0..500usize, j in 0..64usize) {
        let tau = &cells()[i % cells().len()];
        let idx = LabelIndex::new(&TreeGlobe, enumerate_tree_cells(3, 3));
        let labs = idx.labellings(tau);
        prop_assume!(!labs.is_empty());
        let outer = &labs[j % labs.len()];
        let flat = mu_shape(outer).unwrap().to_pd();
        let split = mu_split(outer, &flat).unwrap();
        prop_assert_eq!(split.map(Pd::shape), outer.clone());
        prop_assert_eq!(mu(&split).unwrap(), flat);
    }

    #[test]
    fn boundaries_are_globular(i in 0..500usize) {
        let p = cells()[i % cells().len()].to_pd();
        prop_assume!(p.dim >= 2);
        let s = p.boundary(Side::Source).unwrap();
        let t = p.boundary(Side::Target).unwrap();
        prop_assert_eq!(s.boundary(Side::Source).unwrap(), t.boundary(Side::Source).unwrap());
        prop_assert_eq!(s.boundary(Side::Target).unwrap(), t.boundary(Side::Target).unwrap());
    }

    #[test]
    fn square_is_associative_and_unital(
        x in prop::collection::vec(0..3usize, 0..4),
        y in prop::collection::vec(0..3usize, 0..4),
        z in prop::collection::vec(0..3usize, 0..4),
    ) {
        let (x, y, z) = (graded(&x), graded(&y), graded(&z));
        prop_assert!(check_associator(&x, &y, &z).ok());
        let (l, r) = check_unitors(&x);
        prop_assert!(l.ok() && r.ok());
    }

    #[test]
    fn adjunction_counts_agree(
        x in prop::collection::vec(0..4usize, 0..4),
        b in prop::collection::vec(0..4usize, 0..4),
        y in prop::collection::vec(0..4usize, 0..4),
    ) {
        let (x, b, y) = (graded(&x), graded(&b), graded(&y));
        prop_assert_eq!(hom_count(&square(&x, &b), &y), curried_hom_count(&x, &b, &y));
        for n in 0..3 {
            let c = internal_hom_count(&b, &y, n);
            if c.to_u128().is_some_and(|v| v <= 4096) {
                prop_assert_eq!(Cardinal::from_u64(internal_hom(&b, &y, n).len() as u64), c);
            }
        }
        if let Some(maps) = enumerate_maps(&square(&x, &b), &y, 4096) {
            prop_assert_eq!(Cardinal::from_u64(maps.len() as u64), hom_count(&square(&x, &b), &y));
        }
    }

    #[test]
    fn canonical_form_is_idempotent(i in 0..100_000usize) {
        let (e, _) = &exprs()[i % exprs().len()];
        let l = Layered::from_expr(e, &sig()).unwrap();
        let c = l.canonical().unwrap();
        prop_assert_eq!(c.canonical().unwrap(), c.clone());
        prop_assert!(l.class().unwrap().contains(&c.layers));
    }

    #[test]
    fn normal_forms_are_sound_for_the_model(i in 0..100_000usize, j in 0..100_000usize) {
        let (a, ta) = &exprs()[i % exprs().len()];
        let (b, tb) = &exprs()[j % exprs().len()];
        let p = presented();
        let na = p.normalize_expr(a).unwrap();
        prop_assert!(na.is_done());
        let again = p.normalize(na.form()).unwrap();
        prop_assert_eq!(&again, na.form());
        let ma = eval_expr(&MonoidModel, a).unwrap();
        prop_assert_eq!(eval_expr(&MonoidModel, &na.form().expr()).unwrap(), ma.clone());
        if ta == tb {
            let nb = p.normalize_expr(b).unwrap();
            let mb = eval_expr(&MonoidModel, b).unwrap();
            prop_assert_eq!(na.form() == nb.form(), ma == mb);
        }
    }

    #[test]
    fn product_and_coproduct_counts(a in 1..4usize, b in 0..3usize, c in 1..4usize, d in 0..3usize) {
        let mk = |objs: usize, loops: usize| {
            let mut g = GlobularSet::new(1);
            for o in 0..objs {
                g.add0(&format!("o{o}")).unwrap();
            }
            for l in 0..loops {
                g.add(1, &format!("l{l}"), "o0", "o0").unwrap();
            }
            g
        };
        let (x, y) = (mk(a, b), mk(c, d));
        let p = GlobularSet::product(&x, &y).unwrap();
        prop_assert_eq!((p.count(0), p.count(1)), (a * c, b * d));
        prop_assert!(p.validate().is_empty());
        let s = GlobularSet::coproduct(&x, &y).unwrap();
        prop_assert_eq!((s.count(0), s.count(1)), (a + c, b + d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn weakening_counts_ignore_work_order(seed in any::<u64>()) {
        let bounds = WeakBounds { max_dim: 1, max_tree_nodes: 2, max_expr_size: 3, hom_in: 2, hom_out: 1 };
        let run = |s: Option<u64>| {
            let p = TheoryPro::new(ProPresentation::monoid(), 1000).unwrap();
            let mut w = WeakTheory::new(p, bounds).unwrap();
            if let Some(s) = s {
                w = w.with_shuffle(s);
            }
            w.generate();
            w.counts()
        };
        prop_assert_eq!(run(None), run(Some(seed)));
    }
}

#[test]
fn expression_pool_covers_every_small_monotone_map() {
    let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for (e, _) in exprs() {
        let m = eval_expr(&MonoidModel, e).unwrap();
        seen.insert((m.codomain, m.map));
    }
    for (n, m, want) in [(2, 2, 3), (3, 1, 1), (2, 1, 1), (0, 2, 1), (1, 2, 2)] {
        let got = seen.iter().filter(|(c, f)| *c == m && f.len() == n).count();
        assert_eq!(got, want, "hom({n},{m})");
    }
}

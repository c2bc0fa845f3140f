//! Worked examples checked against oracles written here from scratch: naive
//! double loops for distinctness and first-passing searches for the greedy
//! steps. None of these helpers call into the library's verify module.

use std::collections::BTreeSet;

use densefactor::greedy::{cover_element, extend_a_plain, extend_a_symmetric, extend_b};
use densefactor::*;

fn naive_distinct(group: &Group, a: &[Element], b: &[Element]) -> bool {
    let products: Vec<Element> = a.iter().flat_map(|x| b.iter().map(move |y| group.mul(x, y))).collect();
    for i in 0..products.len() {
        for j in 0..i {
            if products[i] == products[j] {
                return false;
            }
        }
    }
    true
}

fn with(set: &BTreeSet<Element>, extra: &[Element]) -> Vec<Element> {
    let mut v: Vec<Element> = set.iter().cloned().collect();
    for x in extra {
        if v.contains(x) {
            return Vec::new();
        }
        v.push(x.clone());
    }
    v
}

fn int(c: i64) -> Element {
    Element::vector([c])
}

fn ints(v: &[i64]) -> BTreeSet<Element> {
    v.iter().map(|&c| int(c)).collect()
}

fn idx(v: &[u64]) -> BTreeSet<Element> {
    v.iter().map(|&i| Element::Index(i)).collect()
}

/// Set-level transcription of the cover filter: neighbourhood translates,
/// new rows, squares, `x² ∉ BB⁻¹` and `x⁻³g ∉ B`, followed by the distinctness
/// check on the grown pair.
fn first_cover(group: &Group, a: &BTreeSet<Element>, b: &BTreeSet<Element>, g: &Element, limit: usize) -> Element {
    let m = |x: &Element, y: &Element| group.mul(x, y);
    let ab: BTreeSet<Element> = a.iter().flat_map(|x| b.iter().map(move |y| m(x, y))).collect();
    let bb: BTreeSet<Element> = b
        .iter()
        .flat_map(|x| b.iter().map(move |y| m(x, &group.inv(y))))
        .collect();
    group
        .elements()
        .take(limit)
        .find(|x| {
            let xi = group.inv(x);
            if &xi == x || a.contains(x) {
                return false;
            }
            let pair = [x.clone(), xi.clone()];
            let shifted: BTreeSet<Element> = a
                .iter()
                .flat_map(|y| pair.iter().map(move |p| m(&m(y, p), g)))
                .collect();
            let rows: BTreeSet<Element> = pair.iter().flat_map(|p| b.iter().map(move |y| m(p, y))).collect();
            let squares = [m(&m(x, x), g), m(&m(&xi, &xi), g)];
            let clauses = shifted.is_disjoint(&ab)
                && rows.is_disjoint(&ab)
                && rows.is_disjoint(&shifted)
                && squares.iter().all(|h| !ab.contains(h))
                && !bb.contains(&m(x, x))
                && !b.contains(&m(&m(&xi, &m(&xi, &xi)), g));
            if !clauses {
                return false;
            }
            let new_a = with(a, &pair);
            let new_b = with(b, &[m(&xi, g)]);
            !new_a.is_empty() && !new_b.is_empty() && naive_distinct(group, &new_a, &new_b)
        })
        .expect("a cover exists within the limit")
}

#[test]
fn golden_z8_chain() {
    let g = Group::cyclic(8).unwrap();
    let f = Filtration::from_generators(
        g.clone(),
        &[
            vec![Element::Index(4)],
            vec![Element::Index(2)],
            vec![Element::Index(1)],
        ],
        64,
    )
    .unwrap();
    let levels: Vec<Vec<Element>> = f.levels().iter().map(|h| h.as_slice().unwrap().to_vec()).collect();
    assert_eq!(
        levels,
        vec![
            idx(&[0]).into_iter().collect::<Vec<_>>(),
            idx(&[0, 4]).into_iter().collect(),
            idx(&[0, 2, 4, 6]).into_iter().collect(),
            idx(&[0, 1, 2, 3, 4, 5, 6, 7]).into_iter().collect(),
        ]
    );
    let t = select_transversals(&f).unwrap();
    let pair = extract_factors(&f, &t, Scope::All).unwrap();
    assert_eq!(pair.a, idx(&[0, 1, 4, 5]));
    assert_eq!(pair.b, idx(&[0, 2]));
    let a: Vec<Element> = pair.a.iter().cloned().collect();
    let b: Vec<Element> = pair.b.iter().cloned().collect();
    assert!(naive_distinct(&g, &a, &b));
    // every element is hit exactly once
    for h in g.elements() {
        let hits = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x, y)))
            .filter(|(x, y)| g.mul(x, y) == h)
            .count();
        assert_eq!(hits, 1, "{h}");
    }
    assert_eq!(
        decompose(&Element::Index(7), &f, &t).unwrap().to_string(),
        "x(1@2)·x(4@0)·y(2@1)"
    );
}

#[test]
fn peeling_by_hand_in_z6() {
    // 5 ∈ G_2 ∖ G_1; right coset {5, 2} of ⟨3⟩ has representative 2, leaving 3 ∈ G_1
    let g = Group::cyclic(6).unwrap();
    let f = Filtration::from_generators(g, &[vec![Element::Index(3)], vec![Element::Index(1)]], 64).unwrap();
    let t = select_transversals(&f).unwrap();
    let nf = decompose(&Element::Index(5), &f, &t).unwrap();
    assert_eq!(nf.to_string(), "x(3@0)·y(2@1)");
}

#[test]
fn extend_b_matches_first_passing_candidate() {
    let g = Group::lattice(1).unwrap();
    let cases = [(&[0][..], &[0][..]), (&[-1, 0, 1], &[0, 5]), (&[0, 2], &[0, 1])];
    for (a, b) in cases {
        let pf = PartialFactorization::new(&g, ints(a), ints(b), false).unwrap();
        let evens = BaseSet::progression(vec![2], vec![0]);
        let expected = evens
            .members(&g)
            .find(|x| {
                let nb = with(pf.b(), std::slice::from_ref(x));
                !nb.is_empty() && naive_distinct(&g, &pf.a().iter().cloned().collect::<Vec<_>>(), &nb)
            })
            .unwrap();
        let got = extend_b(&g, &pf, evens.members(&g), Search::default()).unwrap();
        assert_eq!(got.chosen, expected);
        assert_eq!(got.pf.a(), pf.a());
    }
    assert_eq!(
        extend_b(
            &g,
            &PartialFactorization::trivial(&g),
            evens_first(&g),
            Search::default()
        )
        .unwrap()
        .chosen,
        int(2)
    );
}

fn evens_first(g: &Group) -> Vec<Element> {
    BaseSet::progression(vec![2], vec![0]).members(g).take(10).collect()
}

#[test]
fn extend_b_in_z8() {
    let g = Group::cyclic(8).unwrap();
    let pf = PartialFactorization::new(&g, idx(&[0, 1]), idx(&[0, 2]), false).unwrap();
    let got = extend_b(&g, &pf, idx(&[4, 5, 6, 7]), Search::default()).unwrap();
    assert_eq!(got.pf.b(), &idx(&[0, 2, 4]));
    let products: BTreeSet<u64> = [0, 1]
        .iter()
        .flat_map(|a| [0, 2, 4].iter().map(move |b| (a + b) % 8))
        .collect();
    assert_eq!(products.len(), 6);
}

#[test]
fn symmetric_extension_examples() {
    let g = Group::lattice(1).unwrap();
    let pf = PartialFactorization::new(&g, ints(&[0]), ints(&[0, 1]), true).unwrap();
    let got = extend_a_symmetric(&g, &pf, (2..).map(int), Search::default()).unwrap();
    // rows {2,3} and {-2,-1} avoid {0,1}
    assert_eq!(got.pf.a(), &ints(&[-2, 0, 2]));

    let pf = PartialFactorization::trivial(&g);
    let got = extend_a_symmetric(&g, &pf, g.elements().skip(1), Search::default()).unwrap();
    assert_eq!(got.pf.a(), &ints(&[-1, 0, 1]));
}

#[test]
fn plain_extension_examples() {
    let g = Group::lattice(1).unwrap();
    let pf = PartialFactorization::new(&g, ints(&[0]), ints(&[0, 1]), false).unwrap();
    let got = extend_a_plain(
        &g,
        &pf,
        BaseSet::progression(vec![3], vec![2]).members(&g),
        Search::default(),
    )
    .unwrap();
    assert_eq!(got.pf.a(), &ints(&[0, 2]));

    let c8 = Group::cyclic(8).unwrap();
    let pf = PartialFactorization::new(&c8, idx(&[0]), idx(&[0, 1]), false).unwrap();
    let got = extend_a_plain(&c8, &pf, idx(&[2, 3]), Search::default()).unwrap();
    assert_eq!(got.pf.a(), &idx(&[0, 2]));
}

#[test]
fn cover_matches_independent_search() {
    let g = Group::lattice(1).unwrap();
    let cases: [(&[i64], &[i64], i64); 6] = [
        (&[0], &[0], 5),
        (&[-1, 0, 1], &[0], 10),
        (&[0], &[0], 3),
        (&[-2, 0, 2], &[0, 1], 7),
        (&[-1, 0, 1], &[0, 3], -4),
        (&[-3, -1, 0, 1, 3], &[0, 7, 14], 2),
    ];
    for (a, b, target) in cases {
        let pf = PartialFactorization::new(&g, ints(a), ints(b), true).unwrap();
        let g_t = int(target);
        if pf.covers(&g_t) {
            continue;
        }
        let expected = first_cover(&g, pf.a(), pf.b(), &g_t, 10_000);
        let got = cover_element(&g, &pf, &g_t, g.elements(), Search::default()).unwrap();
        assert_eq!(got.chosen, expected, "A={a:?} B={b:?} g={target}");
        assert!(got.pf.covers(&g_t));
        assert_eq!(got.partner, Some(g.mul(&g.inv(&expected), &g_t)));
    }
}

#[test]
fn cover_examples_by_hand() {
    let g = Group::lattice(1).unwrap();
    // x=1: rows {-1,3}, {0,4}, {1,5}
    let got = cover_element(
        &g,
        &PartialFactorization::trivial(&g),
        &int(5),
        g.elements(),
        Search::default(),
    )
    .unwrap();
    assert_eq!(got.chosen, int(1));
    assert_eq!(got.pf.b(), &ints(&[0, 4]));
    // x=2: rows {-2,6}, {-1,7}, {0,8}, {1,9}, {2,10}
    let pf = PartialFactorization::new(&g, ints(&[-1, 0, 1]), ints(&[0]), true).unwrap();
    let got = cover_element(&g, &pf, &int(10), g.elements(), Search::default()).unwrap();
    assert_eq!(got.chosen, int(2));
    assert_eq!(got.pf.b(), &ints(&[0, 8]));
}

#[test]
fn cover_in_a_nonabelian_group() {
    let g = Group::symmetric(4).unwrap();
    let pf = PartialFactorization::trivial(&g);
    for target in g.elements().skip(1).take(6) {
        let expected = first_cover(&g, pf.a(), pf.b(), &target, 24);
        let got = cover_element(&g, &pf, &target, g.elements(), Search::default()).unwrap();
        assert_eq!(got.chosen, expected);
        assert!(got.pf.covers(&target));
    }
}

#[test]
fn symmetric_golden_run_on_the_integers() {
    let g = Group::lattice(1).unwrap();
    let base = BaseFamily::new(vec![
        BaseSet::progression(vec![2], vec![0]),
        BaseSet::progression(vec![3], vec![1]),
        BaseSet::progression(vec![5], vec![2]),
    ]);
    let run = run_comment4(&g, &base, 50, Search::default()).unwrap();
    assert!(run.aborted.is_none());
    let a: Vec<Element> = run.pf.a().iter().cloned().collect();
    let b: Vec<Element> = run.pf.b().iter().cloned().collect();
    assert!(naive_distinct(&g, &a, &b));
    for step in &run.trace.steps {
        let target = step.target.clone().unwrap();
        let hits = step
            .a
            .iter()
            .filter(|x| step.b.contains(&g.mul(&g.inv(x), &target)))
            .count();
        assert_eq!(hits, 1);
        let u = base.get(step.base_index).unwrap();
        assert!(step.a.iter().any(|x| u.contains(x)) && step.b.iter().any(|x| u.contains(x)));
        assert!(step.a.iter().all(|x| step.a.contains(&g.inv(x))));
    }
}

#[test]
fn plain_alternation_on_the_integers() {
    let g = Group::lattice(1).unwrap();
    let base = BaseFamily::new(vec![
        BaseSet::progression(vec![2], vec![0]),
        BaseSet::progression(vec![2], vec![1]),
    ]);
    let run = run_comment6(&g, &base, 2, Search::default()).unwrap();
    let parity = |s: &BTreeSet<Element>| {
        let odd = s
            .iter()
            .filter(|x| matches!(x, Element::Vector(v) if v[0].rem_euclid(2) == 1))
            .count();
        (s.len() - odd, odd)
    };
    assert_eq!(parity(run.pf.a()), (1, 1));
    assert_eq!(parity(run.pf.b()), (1, 1));
}

#[test]
fn transversal_factorization_covers_z12() {
    let g = Group::cyclic(12).unwrap();
    let a = Subgroup::generate(&g, &[Element::Index(4)], 64).unwrap();
    let base = BaseFamily::new(vec![BaseSet::explicit(idx(&[5, 6])), BaseSet::explicit(idx(&[7, 11]))]);
    let pair = subgroup_transversal_factorize(&g, &a, &base, 12, 100).unwrap();
    let a: Vec<Element> = pair.a.iter().cloned().collect();
    let b: Vec<Element> = pair.b.iter().cloned().collect();
    assert!(naive_distinct(&g, &a, &b));
    assert_eq!(a.len() * b.len(), 12);
    assert!(pair.b.contains(&Element::Index(5)) && pair.b.contains(&Element::Index(7)));
}

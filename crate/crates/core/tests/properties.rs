use std::collections::HashMap;

use proptest::prelude::*;

use chocobar::chocolate::{library, ChocGame, ChocPosition};
use chocobar::exec::Execution;
use chocobar::fdsl::{BoxIter, Expr, FunctionSpec, MonotoneFn};
use chocobar::grundy::{grundy, nim_sum, sum_game, GrundyTable};
use chocobar::nimpass::{threshold_shape, PassNim};
use chocobar::nsprop::{ab_sets, all_slices_hold, check_all_slices, check_ns};

const ARITY: usize = 3;

type Named = (String, Box<dyn Fn(u32) -> u32>);

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..50).prop_map(Expr::Lit),
        (1usize..=ARITY).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sum(Box::new(a), Box::new(b))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Max),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Min),
            (inner.clone(), 1u32..6).prop_map(|(e, d)| Expr::Div(Box::new(e), d)),
            (inner, 0u32..20).prop_map(|(e, c)| Expr::Threshold(Box::new(e), c)),
        ]
    })
}

/// Exact reference semantics over i128, written independently of the
/// library evaluator.
fn reference_eval(e: &Expr, x: &[u32]) -> i128 {
    match e {
        Expr::Lit(c) => *c as i128,
        Expr::Var(i) => x[*i - 1] as i128,
        Expr::Sum(a, b) => reference_eval(a, x) + reference_eval(b, x),
        Expr::Max(v) => v.iter().map(|a| reference_eval(a, x)).fold(i128::MIN, i128::max),
        Expr::Min(v) => v.iter().map(|a| reference_eval(a, x)).fold(i128::MAX, i128::min),
        Expr::Div(a, d) => reference_eval(a, x).div_euclid(*d as i128),
        Expr::Threshold(a, c) => (reference_eval(a, x) > *c as i128) as i128,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(root in expr_strategy()) {
        prop_assume!(root.depth() <= 5);
        let spec = FunctionSpec::new(ARITY, root).unwrap();
        let reparsed = FunctionSpec::parse_with_arity(&spec.to_string(), ARITY).unwrap();
        prop_assert_eq!(reparsed, spec);
    }

    #[test]
    fn grammar_is_monotone(root in expr_strategy(), point in prop::collection::vec(0u32..40, ARITY), axis in 0..ARITY) {
        let spec = FunctionSpec::new(ARITY, root).unwrap();
        let mut up = point.clone();
        up[axis] += 1;
        prop_assert!(spec.eval(&point).unwrap() <= spec.eval(&up).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn evaluator_matches_reference(root in expr_strategy(), point in prop::collection::vec(0u32..1000, ARITY)) {
        let spec = FunctionSpec::new(ARITY, root.clone()).unwrap();
        prop_assert_eq!(spec.eval(&point).unwrap() as i128, reference_eval(&root, &point));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sum_of_bars_is_nim_sum(
        (y1, z1) in (0u32..6).prop_flat_map(|z| (0..=z / 2, Just(z))),
        (x2, y2, z2) in (0u32..4, 0u32..4).prop_flat_map(|(x, z)| (Just(x), 0..=x.max(z) / 2, Just(z))),
    ) {
        let left = ChocGame::new(library::max_halving(1), &[6]).unwrap();
        let right = ChocGame::new(library::max_halving(2), &[4, 4]).unwrap();
        let p = ChocPosition::new(vec![z1], y1);
        let q = ChocPosition::new(vec![x2, z2], y2);
        let gl = grundy(&left, &p, &mut GrundyTable::new()).unwrap();
        let gr = grundy(&right, &q, &mut GrundyTable::new()).unwrap();
        let sum = sum_game(&left, &right);
        prop_assert_eq!(grundy(&sum, &(p, q), &mut GrundyTable::new()).unwrap(), nim_sum([gl, gr]));
    }

    #[test]
    fn traversal_order_is_irrelevant(seed_a in any::<u64>(), seed_b in any::<u64>(), x in 0u32..8, z in 0u32..8) {
        let game = ChocGame::new(FunctionSpec::parse("x1 + x2/3").unwrap(), &[8, 8]).unwrap();
        let p = game.normalize(vec![x, z], 5).unwrap();
        let a = grundy(&game, &p, &mut GrundyTable::new().with_traversal_seed(seed_a)).unwrap();
        let b = grundy(&game, &p, &mut GrundyTable::new().with_traversal_seed(seed_b)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn cancellation() {
    for x in 0..=256u32 {
        for y in 0..=256u32 {
            for z in (0..=256u32).filter(|&z| z != y) {
                assert_ne!(x ^ y, x ^ z);
            }
        }
    }
}

#[test]
fn moves_preserve_validity_and_descend() {
    for s in 1..=2usize {
        let bounds = vec![16; s];
        for (name, f) in library::all(s) {
            let game = ChocGame::new(f, &bounds).unwrap();
            for p in game.positions(None) {
                for q in game.moves_multi(&p).unwrap() {
                    assert!(game.validate_position(&q).unwrap(), "{name}: {p} -> {q}");
                    let mut before = p.base.clone();
                    before.push(p.y);
                    let mut after = q.base.clone();
                    after.push(q.y);
                    assert!(before.iter().zip(&after).all(|(b, a)| a <= b), "{name}: {p} -> {q}");
                    assert_ne!(before, after);
                    // One coordinate is cut; only y may follow it down.
                    let cut_base = p.base.iter().zip(&q.base).filter(|(b, a)| a < b).count();
                    assert!(cut_base <= 1, "{name}: {p} -> {q}");
                    assert!(cut_base == 1 || q.y < p.y);
                }
            }
        }
    }
}

#[test]
fn moves_preserve_validity_four_coordinates() {
    for (name, f) in library::all(3) {
        let game = ChocGame::new(f, &[8, 8, 8]).unwrap();
        for p in game.positions(None) {
            for q in game.moves_multi(&p).unwrap() {
                assert!(game.validate_position(&q).unwrap(), "{name}: {p} -> {q}");
            }
        }
    }
}

#[test]
fn dimension_coherence() {
    for (name, f) in library::all(1) {
        let game = ChocGame::new(f, &[12]).unwrap();
        for p in game.positions(None) {
            assert_eq!(game.moves_multi(&p).unwrap(), game.moves_2d(&p).unwrap(), "{name} {p}");
        }
    }
    for (name, f) in library::all(2) {
        let game = ChocGame::new(f, &[12, 12]).unwrap();
        for p in game.positions(None) {
            assert_eq!(game.moves_multi(&p).unwrap(), game.moves_3d(&p).unwrap(), "{name} {p}");
        }
    }
}

#[test]
fn equal_bars_have_equal_values() {
    for (name, f) in library::all(1) {
        let game = ChocGame::new(f, &[12]).unwrap();
        let mut memo = GrundyTable::new();
        let mut by_shape: HashMap<Vec<u32>, u32> = HashMap::new();
        for p in game.positions(None) {
            let shape = game.column_heights(&p).unwrap().heights;
            let g = grundy(&game, &p, &mut memo).unwrap();
            assert_eq!(*by_shape.entry(shape).or_insert(g), g, "{name} {p}");
        }
    }
}

#[test]
fn non_canonical_position_breaks_the_identity() {
    // With F ≡ 0 the formal triple {1,1,0} would have options {0,0,0} and
    // {1,0,0}, hence value 2 ≠ 1⊕1⊕0. It is rejected rather than evaluated.
    let game = ChocGame::new(library::constant(2, 0), &[2, 2]).unwrap();
    let formal = ChocPosition::new(vec![1, 0], 1);
    assert!(!game.validate_position(&formal).unwrap());
    assert!(grundy(&game, &formal, &mut GrundyTable::new()).is_err());
    assert_eq!(game.normalize(vec![1, 0], 1).unwrap(), ChocPosition::new(vec![1, 0], 0));
}

#[test]
fn ns_closure_on_library() {
    for b in [1, 2, 7, 64, 255, 256] {
        assert!(check_ns(|z| z / 2, b).unwrap().holds_on_bound, "half up to {b}");
        for c in 0..4 {
            assert!(check_ns(|_| c, b).unwrap().holds_on_bound);
        }
    }
}

#[test]
fn ns_witnesses_reverify() {
    // Every monotone 0..=6 -> 0..=3 table that fails carries a genuine witness.
    let tables = chocobar::verify::enumerate_monotone_functions(6, 3, 10_000).unwrap();
    let mut failures = 0;
    for t in tables {
        let r = check_ns(|z| t[z as usize], 6).unwrap();
        if let Some(w) = r.witness {
            assert!(!r.holds_on_bound);
            assert!(w.violates(|z| t[z as usize]), "{t:?} {w:?}");
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn ab_identity_for_ns_functions() {
    let mut hs: Vec<Named> = vec![("half".into(), Box::new(|z| z / 2))];
    for c in 0..=3 {
        hs.push((format!("const{c}"), Box::new(move |_| c)));
    }
    for t in [1u32, 3, 5, 7] {
        hs.push((format!("threshold{t}"), Box::new(move |z| u32::from(z > t))));
    }
    for (name, h) in &hs {
        assert!(check_ns(h, 32).unwrap().holds_on_bound, "{name} is NS");
        for z in 0..=32 {
            for y in 0..=h(z) {
                assert!(ab_sets(h, y, z).unwrap().equal, "{name} y={y} z={z}");
            }
        }
    }
}

#[test]
fn encoding_soundness() {
    for t in 0..=4 {
        let game = PassNim::new(t, 2).unwrap();
        let f = threshold_shape(t, 2);
        for piles in BoxIter::new(&[10, 10]) {
            let normalized = game.state(piles.clone(), true).pass_available;
            assert_eq!(u32::from(normalized), f.value(&piles));
        }
    }
}

#[test]
fn pass_expires_once_piles_are_small() {
    let game = PassNim::new(2, 3).unwrap();
    let mut frontier = vec![game.state(vec![5, 3, 4], true)];
    let mut seen = std::collections::HashSet::new();
    while let Some(s) = frontier.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        let small = s.piles.iter().all(|&x| x <= 2);
        for next in game.pass_nim_moves(&s) {
            if small {
                assert!(!next.pass_available, "{s:?} -> {next:?}");
            }
            frontier.push(next);
        }
    }
}

#[test]
fn slice_parity_law() {
    for t in 0..=8 {
        let reports = check_all_slices(&threshold_shape(t, 2), &[32, 32], Execution::Parallel).unwrap();
        assert_eq!(all_slices_hold(&reports), t % 2 == 1, "t = {t}");
    }
}

#[test]
fn p_and_n_positions_are_complementary() {
    for t in [1, 2] {
        let game = PassNim::new(t, 2).unwrap();
        let mut memo = GrundyTable::new();
        for s in game.states(10) {
            let p = grundy(&game, &s, &mut memo).unwrap() == 0;
            let to_p = game
                .pass_nim_moves(&s)
                .iter()
                .any(|n| grundy(&game, n, &mut memo).unwrap() == 0);
            assert_eq!(p, !to_p, "{s:?}");
        }
    }
}

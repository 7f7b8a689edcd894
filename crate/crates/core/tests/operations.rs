//! Worked examples for the public operations, each checked against an
//! independent computation where one is needed.

use chocobar::chocolate::{library, ChocGame, ChocPosition};
use chocobar::exec::Execution;
use chocobar::fdsl::{FunctionSpec, MonotoneFn};
use chocobar::grundy::{grundy, is_p_position, sum_game, GrundyTable};
use chocobar::nimpass::{verify_isomorphism, verify_pass_theorem, PassNim, DEFAULT_SEED};
use chocobar::nsprop::{all_slices_hold, check_all_slices};
use chocobar::oracle::naive_grundy;
use chocobar::verify::Verdict;

fn half() -> ChocGame {
    ChocGame::new(library::max_halving(1), &[8]).unwrap()
}

fn pos2(y: u32, z: u32) -> ChocPosition {
    ChocPosition::new(vec![z], y)
}

#[test]
fn grundy_terminal_and_rectangles() {
    let g = half();
    assert_eq!(grundy(&g, &pos2(0, 0), &mut GrundyTable::new()).unwrap(), 0);
    let rect = ChocGame::new(library::constant(1, 4), &[9]).unwrap();
    assert_eq!(grundy(&rect, &pos2(4, 9), &mut GrundyTable::new()).unwrap(), 4 ^ 9);
    let cube = ChocGame::new(library::constant(2, 5), &[5, 5]).unwrap();
    assert_eq!(
        grundy(&cube, &ChocPosition::new(vec![5, 5], 3), &mut GrundyTable::new()).unwrap(),
        3
    );
}

#[test]
fn p_positions_of_halving_bar() {
    let g = half();
    let f = library::max_halving(1);
    let mut memo = GrundyTable::new();
    assert!(is_p_position(&g, &pos2(0, 0), &mut memo).unwrap());
    assert_eq!(naive_grundy(&f, &pos2(1, 3)), 2);
    assert!(!is_p_position(&g, &pos2(1, 3), &mut memo).unwrap());
    // {2,2} is not a bar position (2 > ⌊2/2⌋). Since G = y ⊕ z and y < z
    // away from the origin, the terminal bar is the only P-position.
    assert!(is_p_position(&g, &pos2(2, 2), &mut memo).is_err());
    for p in g.positions(None) {
        assert_eq!(is_p_position(&g, &p, &mut memo).unwrap(), p == pos2(0, 0), "{p}");
    }
}

/// Product-space mex recursion written out by hand for two 2D bars.
fn product_value(f: &dyn MonotoneFn, a: (u32, u32), b: (u32, u32)) -> u32 {
    let opts = |(y, z): (u32, u32)| -> Vec<(u32, u32)> {
        let mut v: Vec<_> = (0..y).map(|w| (w, z)).collect();
        v.extend((0..z).map(|w| (y.min(f.value(&[w])), w)));
        v
    };
    let mut seen: Vec<u32> = opts(a).into_iter().map(|a2| product_value(f, a2, b)).collect();
    seen.extend(opts(b).into_iter().map(|b2| product_value(f, a, b2)));
    (0..).find(|v| !seen.contains(v)).unwrap()
}

#[test]
fn sums() {
    let g = half();
    let sum = sum_game(&g, &g);
    let mut memo = GrundyTable::new();
    assert_eq!(grundy(&sum, &(pos2(0, 0), pos2(0, 0)), &mut memo).unwrap(), 0);
    let v = grundy(&sum, &(pos2(2, 5), pos2(1, 3)), &mut memo).unwrap();
    assert_eq!(v, product_value(&library::max_halving(1), (2, 5), (1, 3)));
    assert_eq!(v, 5);

    // Two Nim heaps as flat bars.
    let five = ChocGame::new(library::constant(1, 5), &[0]).unwrap();
    let three = ChocGame::new(library::constant(1, 3), &[0]).unwrap();
    let nim = sum_game(&five, &three);
    assert_eq!(grundy(&nim, &(pos2(5, 0), pos2(3, 0)), &mut GrundyTable::new()).unwrap(), 6);
}

#[test]
fn slice_family_examples() {
    let f = FunctionSpec::parse("max(x1/2, x2/2)").unwrap();
    assert!(all_slices_hold(&check_all_slices(&f, &[16, 16], Execution::Parallel).unwrap()));
    let sum = FunctionSpec::parse("x1 + x2").unwrap();
    assert!(!all_slices_hold(&check_all_slices(&sum, &[4, 4], Execution::Parallel).unwrap()));
    let t1 = library::threshold(2, 1);
    assert!(all_slices_hold(&check_all_slices(&t1, &[8, 8], Execution::Parallel).unwrap()));
}

#[test]
fn slice_reports_are_ordered_and_deterministic() {
    let f = FunctionSpec::parse("x1 + x2/2 + x3").unwrap();
    let seq = check_all_slices(&f, &[3, 4, 5], Execution::Sequential).unwrap();
    let par = check_all_slices(&f, &[3, 4, 5], Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    let keys: Vec<_> = seq.iter().map(|r| (r.axis, r.fixed.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn pass_theorem_examples() {
    let r = verify_pass_theorem(1, 2, 16).unwrap();
    assert_eq!(r.summary, "holds (t odd)");
    assert!(r.p_positions().any(|c| c == &vec![2, 3, 1]));
    assert_eq!(2 ^ 3 ^ 1, 0);

    let r = verify_pass_theorem(3, 3, 16).unwrap();
    assert!(r.characterization_holds);
    assert_eq!(r.verdict, Verdict::ConsistentWithTheorem);

    let r = verify_pass_theorem(2, 2, 16).unwrap();
    assert_eq!(r.summary, "fails (t even)");
    let w = r.witness.unwrap();
    assert_ne!(w.grundy == 0, w.nim_sum == 0);
}

#[test]
fn pass_even_t_small_bound_is_inconclusive() {
    // Piles never exceed t, so no pass ever exists and plain Nim remains.
    let r = verify_pass_theorem(4, 2, 4).unwrap();
    assert!(r.characterization_holds);
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

#[test]
fn isomorphism_examples() {
    for (t, k, bound) in [(1, 2, 16), (4, 2, 16), (2, 3, 8)] {
        let r = verify_isomorphism(t, k, bound, DEFAULT_SEED, 1000).unwrap();
        assert!(r.is_clean(), "t={t} k={k}");
        assert_eq!(r.move_sets_checked, 1000);
    }
}

#[test]
fn pass_terminal_state() {
    let g = PassNim::new(0, 2).unwrap();
    let s = g.state(vec![0, 0], true);
    assert!(!s.pass_available);
    assert!(g.pass_nim_moves(&s).is_empty());
}

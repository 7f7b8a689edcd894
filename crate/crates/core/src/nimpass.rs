//! Nim on two or three piles with a single pass move that is legal only
//! while some pile holds more than `t` stones.
//!
//! The game is the chocolate bar with shape `F_t(x) = [max(x) > t]` whose
//! height coordinate is the pass token: the height-one layer exists exactly
//! over base cells where a pass would be allowed.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::chocolate::{library, ChocGame, ChocPosition};
use crate::error::{Error, Result};
use crate::fdsl::{BoxIter, FunctionSpec};
use crate::grundy::{grundy, GrundyTable, ImpartialGame};
use crate::verify::{Mismatch, Verdict};

/// Default seed for randomized spot checks.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PassNimState {
    pub piles: Vec<u32>,
    pub pass_available: bool,
}

impl PassNimState {
    /// Piles followed by the pass flag as 0/1.
    pub fn coords(&self) -> Vec<u32> {
        let mut c = self.piles.clone();
        c.push(u32::from(self.pass_available));
        c
    }

    pub fn nim_sum(&self) -> u32 {
        self.piles.iter().fold(u32::from(self.pass_available), |a, v| a ^ v)
    }
}

/// Pass-Nim rules for `k` piles and threshold `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassNim {
    pub t: u32,
    pub k: usize,
}

impl PassNim {
    pub fn new(t: u32, k: usize) -> Result<Self> {
        if !(2..=3).contains(&k) {
            return Err(Error::UnsupportedDimension(format!(
                "pass-Nim supports 2 or 3 piles, got {k}"
            )));
        }
        Ok(Self { t, k })
    }

    pub fn pass_allowed(&self, piles: &[u32]) -> bool {
        piles.iter().any(|&x| x > self.t)
    }

    /// Builds a state, dropping the pass token when no pile exceeds `t`.
    pub fn state(&self, piles: Vec<u32>, pass_available: bool) -> PassNimState {
        let pass_available = pass_available && self.pass_allowed(&piles);
        PassNimState {
            piles,
            pass_available,
        }
    }

    /// All normalized states with every pile `<= bound`.
    pub fn states(&self, bound: u32) -> Vec<PassNimState> {
        let mut out = Vec::new();
        for piles in BoxIter::new(&vec![bound; self.k]) {
            out.push(self.state(piles.clone(), false));
            if self.pass_allowed(&piles) {
                out.push(self.state(piles, true));
            }
        }
        out
    }

    /// Single-pile reductions (re-normalized) plus the pass when available.
    pub fn pass_nim_moves(&self, s: &PassNimState) -> Vec<PassNimState> {
        let mut out = Vec::new();
        for i in 0..s.piles.len() {
            for left in 0..s.piles[i] {
                let mut piles = s.piles.clone();
                piles[i] = left;
                out.push(self.state(piles, s.pass_available));
            }
        }
        if s.pass_available {
            out.push(self.state(s.piles.clone(), false));
        }
        out.sort();
        out.dedup();
        out
    }
}

impl ImpartialGame for PassNim {
    type Position = PassNimState;

    fn validate(&self, s: &PassNimState) -> Result<()> {
        if s.piles.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: s.piles.len(),
            });
        }
        if s.pass_available && !self.pass_allowed(&s.piles) {
            return Err(Error::InvalidPosition(format!(
                "pass token with every pile <= {}",
                self.t
            )));
        }
        Ok(())
    }

    fn moves(&self, s: &PassNimState) -> Result<Vec<PassNimState>> {
        self.validate(s)?;
        Ok(self.pass_nim_moves(s))
    }
}

/// The threshold shape `[max(x1..xk) > t]`.
pub fn threshold_shape(t: u32, k: usize) -> FunctionSpec {
    library::threshold(k, t)
}

/// The chocolate bar equivalent to pass-Nim with threshold `t` on `k` piles.
pub fn encode_as_chocolate(t: u32, k: usize, bound: u32) -> Result<ChocGame> {
    PassNim::new(t, k)?;
    ChocGame::new(threshold_shape(t, k), &vec![bound; k])
}

pub fn state_to_position(s: &PassNimState) -> ChocPosition {
    ChocPosition::new(s.piles.clone(), u32::from(s.pass_available))
}

pub fn position_to_state(p: &ChocPosition) -> PassNimState {
    PassNimState {
        piles: p.base.clone(),
        pass_available: p.y > 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismReport {
    pub t: u32,
    pub k: usize,
    pub bound: u32,
    pub states_checked: u64,
    /// `(state coords, direct Grundy, chocolate Grundy)` where they differ.
    pub discrepancies: Vec<(Vec<u32>, u32, u32)>,
    pub move_sets_checked: u64,
    pub move_set_mismatches: Vec<Vec<u32>>,
    pub seed: u64,
}

impl IsomorphismReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty() && self.move_set_mismatches.is_empty()
    }
}

/// Compares direct pass-Nim Grundy values with those of the encoded bar on
/// every normalized state within `bound`, then spot-checks that the two
/// move sets correspond on `samples` random states.
pub fn verify_isomorphism(t: u32, k: usize, bound: u32, seed: u64, samples: usize) -> Result<IsomorphismReport> {
    let direct = PassNim::new(t, k)?;
    let bar = encode_as_chocolate(t, k, bound)?;
    let mut direct_memo = GrundyTable::new();
    let mut bar_memo = GrundyTable::new();
    let states = direct.states(bound);

    let mut report = IsomorphismReport {
        t,
        k,
        bound,
        states_checked: 0,
        discrepancies: Vec::new(),
        move_sets_checked: 0,
        move_set_mismatches: Vec::new(),
        seed,
    };
    for s in &states {
        let p = state_to_position(s);
        let (a, b) = (grundy(&direct, s, &mut direct_memo)?, grundy(&bar, &p, &mut bar_memo)?);
        report.states_checked += 1;
        if a != b {
            report.discrepancies.push((s.coords(), a, b));
        }
    }

    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..samples {
        let s = &states[rng.gen_range(0..states.len())];
        let mut via_bar: Vec<PassNimState> = bar
            .moves_multi(&state_to_position(s))?
            .iter()
            .map(position_to_state)
            .collect();
        via_bar.sort();
        report.move_sets_checked += 1;
        if via_bar != direct.pass_nim_moves(s) {
            report.move_set_mismatches.push(s.coords());
        }
    }
    Ok(report)
}

/// P/N labels by backward induction over the dense state box, with the rules
/// applied inline. Indexed by piles (row-major) then the pass flag.
pub struct Retrograde {
    k: usize,
    bound: u32,
    is_p: Vec<bool>,
}

impl Retrograde {
    pub fn new(t: u32, k: usize, bound: u32) -> Self {
        let side = bound as usize + 1;
        let mut is_p = vec![false; side.pow(k as u32) * 2];
        let index = |piles: &[u32], pass: bool| {
            piles.iter().fold(0, |acc, &x| acc * side + x as usize) * 2 + usize::from(pass)
        };
        for piles in BoxIter::new(&vec![bound; k]) {
            let exceeds = piles.iter().any(|&x| x > t);
            for pass in [false, true] {
                if pass && !exceeds {
                    continue;
                }
                let mut reaches_p = pass && is_p[index(&piles, false)];
                for i in 0..k {
                    let mut next = piles.clone();
                    for left in 0..piles[i] {
                        next[i] = left;
                        let keep = pass && next.iter().any(|&x| x > t);
                        reaches_p |= is_p[index(&next, keep)];
                    }
                }
                is_p[index(&piles, pass)] = !reaches_p;
            }
        }
        Self { k, bound, is_p }
    }

    pub fn is_p_position(&self, s: &PassNimState) -> Option<bool> {
        if s.piles.len() != self.k || s.piles.iter().any(|&x| x > self.bound) {
            return None;
        }
        let side = self.bound as usize + 1;
        let idx = s.piles.iter().fold(0, |acc, &x| acc * side + x as usize) * 2
            + usize::from(s.pass_available);
        Some(self.is_p[idx])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PassTheoremReport {
    pub t: u32,
    pub k: usize,
    pub bound: u32,
    pub states_checked: u64,
    /// What the theorem predicts: the nim-sum rule holds iff `t` is odd.
    pub expected_to_hold: bool,
    pub characterization_holds: bool,
    /// First state where "P-position" and "nim-sum zero" disagree.
    pub witness: Option<Mismatch>,
    pub witness_reverified: Option<bool>,
    pub verdict: Verdict,
    pub summary: String,
    /// Every normalized state, coordinates then Grundy value.
    pub table: Vec<(Vec<u32>, u32)>,
}

impl PassTheoremReport {
    pub fn p_positions(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.table.iter().filter(|(_, g)| *g == 0).map(|(c, _)| c)
    }
}

/// Checks whether the P-positions are exactly the states with
/// `piles ⊕ p = 0`. Expected for odd `t`; for even `t` a reverified
/// counterexample is expected instead.
pub fn verify_pass_theorem(t: u32, k: usize, bound: u32) -> Result<PassTheoremReport> {
    let game = PassNim::new(t, k)?;
    let mut memo = GrundyTable::new();
    let mut table = Vec::new();
    let mut witness = None;
    let mut witness_state = None;
    for s in game.states(bound) {
        let g = grundy(&game, &s, &mut memo)?;
        let predicted_p = s.nim_sum() == 0;
        if (g == 0) != predicted_p && witness.is_none() {
            witness = Some(Mismatch {
                position: s.coords(),
                grundy: g,
                nim_sum: s.nim_sum(),
            });
            witness_state = Some((s.clone(), g == 0));
        }
        table.push((s.coords(), g));
    }

    let witness_reverified = witness_state.map(|(s, engine_p)| {
        let labels = Retrograde::new(t, k, bound);
        labels.is_p_position(&s) == Some(engine_p) && engine_p != (s.nim_sum() == 0)
    });
    let expected_to_hold = t % 2 == 1;
    let holds = witness.is_none();
    let (verdict, summary) = match (expected_to_hold, holds) {
        (true, true) => (Verdict::ConsistentWithTheorem, "holds (t odd)".to_string()),
        (true, false) => (Verdict::CounterexampleFound, "fails although t is odd".to_string()),
        (false, false) if witness_reverified == Some(true) => {
            (Verdict::ConsistentWithTheorem, "fails (t even)".to_string())
        }
        (false, false) => (Verdict::Inconclusive, "fails (t even), witness not confirmed".to_string()),
        (false, true) => (
            Verdict::Inconclusive,
            format!("holds within bound {bound} although t is even"),
        ),
    };
    Ok(PassTheoremReport {
        t,
        k,
        bound,
        states_checked: table.len() as u64,
        expected_to_hold,
        characterization_holds: holds,
        witness,
        witness_reverified,
        verdict,
        summary,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_moves() {
        let g = PassNim::new(1, 2).unwrap();
        let s = g.state(vec![2, 3], true);
        let m = g.pass_nim_moves(&s);
        assert!(m.contains(&g.state(vec![2, 3], false)));
        assert!(m.contains(&PassNimState { piles: vec![1, 3], pass_available: true }));
        assert!(m.contains(&PassNimState { piles: vec![2, 1], pass_available: true }));
        assert!(m.iter().all(|n| n.piles.iter().filter(|&&x| x < 2).count() <= 2));

        let low = g.state(vec![1, 1], false);
        assert_eq!(
            g.pass_nim_moves(&low),
            vec![g.state(vec![0, 1], false), g.state(vec![1, 0], false)]
        );
    }

    #[test]
    fn normalization() {
        let g = PassNim::new(1, 2).unwrap();
        assert!(!g.state(vec![1, 1], true).pass_available);
        assert!(!g.state(vec![0, 0], true).pass_available);
        // Reducing the only large pile drops the token.
        let m = g.pass_nim_moves(&g.state(vec![2, 0], true));
        assert!(m.contains(&PassNimState { piles: vec![1, 0], pass_available: false }));
        assert!(matches!(PassNim::new(1, 4), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn encoding_values() {
        let f = threshold_shape(1, 2);
        assert_eq!(f.eval(&[2, 3]).unwrap(), 1);
        assert_eq!(f.eval(&[1, 1]).unwrap(), 0);
        let f0 = threshold_shape(0, 2);
        assert_eq!(f0.eval(&[0, 0]).unwrap(), 0);
        assert_eq!(f0.eval(&[0, 1]).unwrap(), 1);
        let bar = encode_as_chocolate(1, 2, 4).unwrap();
        let h = bar.column_heights(&ChocPosition::new(vec![3, 3], 1)).unwrap();
        for u in 0..4usize {
            for w in 0..4usize {
                let expected = if u > 1 || w > 1 { 2 } else { 1 };
                assert_eq!(h.get(&[u, w]), expected);
            }
        }
    }

    #[test]
    fn theorem_small() {
        let r = verify_pass_theorem(1, 2, 8).unwrap();
        assert!(r.characterization_holds);
        assert!(r.p_positions().any(|c| c == &vec![2, 3, 1]));
        let r = verify_pass_theorem(2, 2, 8).unwrap();
        assert!(!r.characterization_holds);
        assert_eq!(r.witness_reverified, Some(true));
        assert_eq!(r.verdict, Verdict::ConsistentWithTheorem);
    }

    #[test]
    fn isomorphism_small() {
        let r = verify_isomorphism(1, 2, 6, DEFAULT_SEED, 200).unwrap();
        assert!(r.is_clean(), "{r:?}");
        let r = verify_isomorphism(2, 3, 4, DEFAULT_SEED, 200).unwrap();
        assert!(r.is_clean(), "{r:?}");
    }
}

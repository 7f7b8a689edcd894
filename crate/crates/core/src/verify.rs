//! Theorem harness: exhaustive Grundy-versus-nim-sum sweeps over bounded
//! chocolate bars, the sufficiency and necessity directions of the NS
//! characterization, and the monotone-table enumeration experiment.

use std::sync::Arc;

use serde::Serialize;

use crate::chocolate::{ChocGame, ChocPosition};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fdsl::{MonotoneFn, TableFunction};
use crate::grundy::{grundy, GrundyTable};
use crate::nsprop::{all_slices_hold, check_all_slices, check_ns, SliceReport};
use crate::oracle::reference_grundy;

/// At most this many mismatches are listed in a report; the count is exact.
pub const MAX_LISTED_MISMATCHES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithTheorem,
    CounterexampleFound,
    /// A bounded search could not settle the claim.
    Inconclusive,
}

/// A position whose Grundy value differs from the nim-sum of its
/// coordinates. Coordinates use the written order (see
/// [`ChocPosition::display_coords`]); pass-Nim states list piles then `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub position: Vec<u32>,
    pub grundy: u32,
    pub nim_sum: u32,
}

/// Classification of one enumerated table in the biconditional experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableClassification {
    pub table: Vec<u32>,
    pub ns_holds: bool,
    pub nim_sum_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub mode: String,
    pub game: String,
    pub bounds: Vec<u32>,
    pub y_cap: Option<u32>,
    pub positions_checked: u64,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
    pub ns_summary: Vec<SliceReport>,
    pub verdict: Verdict,
    /// Whether the first mismatch was confirmed by an independent evaluator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_reverified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classifications: Vec<TableClassification>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(mode: &str, game: String, bounds: Vec<u32>) -> Self {
        Self {
            mode: mode.to_string(),
            game,
            bounds,
            y_cap: None,
            positions_checked: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
            ns_summary: Vec::new(),
            verdict: Verdict::ConsistentWithTheorem,
            witness_reverified: None,
            seed: None,
            classifications: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::ConsistentWithTheorem
    }
}

/// Raw result of a Grundy-versus-nim-sum sweep.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub positions_checked: u64,
    pub mismatch_count: u64,
    /// First [`MAX_LISTED_MISMATCHES`] mismatches in enumeration order.
    pub mismatches: Vec<(ChocPosition, u32)>,
}

/// Computes the Grundy value of every valid position within the game's
/// bounds and compares it with the nim-sum of all `s + 1` coordinates.
pub fn sweep<F: MonotoneFn>(game: &ChocGame<F>, y_cap: Option<u32>) -> Result<Sweep> {
    let mut memo = GrundyTable::new();
    let mut out = Sweep {
        positions_checked: 0,
        mismatch_count: 0,
        mismatches: Vec::new(),
    };
    // Lexicographic order visits options before the positions they come from.
    for p in game.positions(y_cap) {
        let g = grundy(game, &p, &mut memo)?;
        out.positions_checked += 1;
        if g != p.nim_sum() {
            out.mismatch_count += 1;
            if out.mismatches.len() < MAX_LISTED_MISMATCHES {
                out.mismatches.push((p, g));
            }
        }
    }
    Ok(out)
}

fn fill_from_sweep(report: &mut VerificationReport, sweep: &Sweep) {
    report.positions_checked = sweep.positions_checked;
    report.mismatch_count = sweep.mismatch_count;
    report.mismatches = sweep
        .mismatches
        .iter()
        .map(|(p, g)| Mismatch {
            position: p.display_coords(),
            grundy: *g,
            nim_sum: p.nim_sum(),
        })
        .collect();
}

/// `true` if an independent evaluator agrees that `p` has value `grundy`
/// and that this differs from the nim-sum.
pub fn reverify_mismatch<F: MonotoneFn + ?Sized>(func: &F, p: &ChocPosition, grundy: u32) -> bool {
    reference_grundy(func, p) == Some(grundy) && grundy != p.nim_sum()
}

/// Exhaustive sweep over the game's bounds.
pub fn sweep_grundy_vs_nimsum<F: MonotoneFn>(
    game: &ChocGame<F>,
    y_cap: Option<u32>,
) -> Result<VerificationReport> {
    let s = sweep(game, y_cap)?;
    let mut report = VerificationReport::new("sweep", game.describe(), game.bounds().to_vec());
    report.y_cap = y_cap;
    fill_from_sweep(&mut report, &s);
    if let Some((p, g)) = s.mismatches.first() {
        report.verdict = Verdict::CounterexampleFound;
        report.witness_reverified = Some(reverify_mismatch(game.function(), p, *g));
    }
    Ok(report)
}

/// NS on every slice implies Grundy = nim-sum. Reports a counterexample only
/// if all slices hold and the sweep still finds a mismatch.
pub fn verify_sufficiency<F: MonotoneFn>(
    func: F,
    bounds: &[u32],
    y_cap: Option<u32>,
    exec: Execution,
) -> Result<VerificationReport> {
    let func = Arc::new(func);
    let game = ChocGame::from_shared(Arc::clone(&func), bounds)?;
    let slices = check_all_slices(func.as_ref(), bounds, exec)?;
    let s = sweep(&game, y_cap)?;

    let mut report = VerificationReport::new("sufficiency", game.describe(), bounds.to_vec());
    report.y_cap = y_cap;
    fill_from_sweep(&mut report, &s);
    let ns = all_slices_hold(&slices);
    report.ns_summary = slices;
    if ns {
        if let Some((p, g)) = s.mismatches.first() {
            report.verdict = Verdict::CounterexampleFound;
            report.witness_reverified = Some(reverify_mismatch(func.as_ref(), p, *g));
            report.notes.push("all slices NS on bounds, yet Grundy differs from nim-sum".into());
        } else {
            report.notes.push("all slices NS on bounds; Grundy equals nim-sum everywhere".into());
        }
    } else {
        report.notes.push("some slice fails NS on bounds; sufficiency holds vacuously".into());
    }
    Ok(report)
}

/// Contrapositive of necessity: a failing slice must come with some
/// position whose Grundy value is not the nim-sum. The bounds are doubled
/// once if the first sweep finds no witness.
pub fn verify_necessity<F: MonotoneFn>(
    func: F,
    bounds: &[u32],
    y_cap: Option<u32>,
    exec: Execution,
) -> Result<VerificationReport> {
    let func = Arc::new(func);
    let game = ChocGame::from_shared(Arc::clone(&func), bounds)?;
    let slices = check_all_slices(func.as_ref(), bounds, exec)?;
    let ns = all_slices_hold(&slices);
    let mut s = sweep(&game, y_cap)?;
    let mut swept = bounds.to_vec();

    if !ns && s.mismatch_count == 0 {
        swept = bounds.iter().map(|b| b.saturating_mul(2)).collect();
        let wider = ChocGame::from_shared(Arc::clone(&func), &swept)?;
        s = sweep(&wider, y_cap)?;
    }

    let mut report = VerificationReport::new("necessity", game.describe(), swept.clone());
    report.y_cap = y_cap;
    fill_from_sweep(&mut report, &s);
    report.ns_summary = slices;
    if swept != bounds {
        report.notes.push(format!("no witness within {bounds:?}; escalated to {swept:?}"));
    }
    match (ns, s.mismatches.first()) {
        (false, Some((p, g))) => {
            let ok = reverify_mismatch(func.as_ref(), p, *g);
            report.witness_reverified = Some(ok);
            report.verdict = if ok {
                Verdict::ConsistentWithTheorem
            } else {
                Verdict::Inconclusive
            };
            report.notes.push(format!("slice failure refuted by witness {p}"));
        }
        (false, None) => {
            report.verdict = Verdict::Inconclusive;
            report.notes.push("slice fails NS but no Grundy witness within escalated bounds".into());
        }
        (true, Some((p, g))) => {
            report.verdict = Verdict::CounterexampleFound;
            report.witness_reverified = Some(reverify_mismatch(func.as_ref(), p, *g));
            report.notes.push("all slices NS on bounds, yet Grundy differs from nim-sum".into());
        }
        (true, None) => {
            report.notes.push("all slices NS on bounds; necessity holds vacuously".into());
        }
    }
    Ok(report)
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Default cap on the number of enumerated tables.
pub const DEFAULT_TABLE_CAP: u128 = 1_000_000;

/// Every nondecreasing table `h: 0..=D -> 0..=V`, lexicographically.
#[derive(Debug, Clone)]
pub struct MonotoneTables {
    max_value: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for MonotoneTables {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        if let Some(i) = out.iter().rposition(|&v| v < self.max_value) {
            let mut next = out.clone();
            let v = next[i] + 1;
            next[i..].iter_mut().for_each(|slot| *slot = v);
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Number of tables [`enumerate_monotone_functions`] yields: `C(D+V+1, V)`.
pub fn monotone_table_count(domain: u32, max_value: u32) -> u128 {
    binomial(domain as u64 + max_value as u64 + 1, max_value as u64)
}

pub fn enumerate_monotone_functions(domain: u32, max_value: u32, cap: u128) -> Result<MonotoneTables> {
    let count = monotone_table_count(domain, max_value);
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    Ok(MonotoneTables {
        max_value,
        current: Some(vec![0; domain as usize + 1]),
    })
}

/// For every monotone table on `0..=D` with values `<= V`, compares
/// "NS holds up to D" with "Grundy = y ⊕ z on every valid position with
/// z <= D". Any table where the two disagree is a counterexample.
pub fn biconditional(domain: u32, max_value: u32, exec: Execution) -> Result<VerificationReport> {
    let tables: Vec<Vec<u32>> = enumerate_monotone_functions(domain, max_value, DEFAULT_TABLE_CAP)?.collect();
    let rows: Vec<Result<(TableClassification, Sweep)>> = exec.map(&tables, |table| {
        let func = TableFunction::new(table.clone())?;
        let ns = check_ns(|z| func.at(z), domain)?;
        let game = ChocGame::new(func, &[domain])?;
        let s = sweep(&game, None)?;
        Ok((
            TableClassification {
                table: table.clone(),
                ns_holds: ns.holds_on_bound,
                nim_sum_identity: s.mismatch_count == 0,
            },
            s,
        ))
    });

    let mut report = VerificationReport::new(
        "biconditional",
        format!("CB(h, y, z), h: [0..{domain}] -> [0..{max_value}] monotone"),
        vec![domain],
    );
    let mut asymmetric = 0;
    for row in rows {
        let (class, s) = row?;
        report.positions_checked += s.positions_checked;
        report.mismatch_count += s.mismatch_count;
        if class.ns_holds != class.nim_sum_identity {
            asymmetric += 1;
        }
        report.classifications.push(class);
    }
    let ns_count = report.classifications.iter().filter(|c| c.ns_holds).count();
    report.notes.push(format!(
        "{} tables classified, {ns_count} NS up to {domain}, {asymmetric} asymmetric",
        report.classifications.len()
    ));
    if asymmetric > 0 {
        report.verdict = Verdict::CounterexampleFound;
    }
    Ok(report)
}

/// Compares the memoized engine with the box oracle at every valid position
/// within `bounds`. Returns `(positions compared, disagreements)`.
pub fn oracle_agreement<F: MonotoneFn>(func: F, bounds: &[u32]) -> Result<(u64, Vec<ChocPosition>)> {
    let func = Arc::new(func);
    let game = ChocGame::from_shared(Arc::clone(&func), bounds)?;
    let oracle = crate::oracle::BoxOracle::new(func.as_ref(), bounds);
    let mut memo = GrundyTable::new();
    let mut compared = 0;
    let mut bad = Vec::new();
    for p in game.positions(None) {
        compared += 1;
        if oracle.grundy(&p) != Some(grundy(&game, &p, &mut memo)?) {
            bad.push(p);
        }
    }
    Ok((compared, bad))
}

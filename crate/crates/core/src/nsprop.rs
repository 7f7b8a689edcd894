//! The NS property of unary monotone functions, axis slices of
//! multivariate shapes, and the two arithmetic facts the characterization
//! rests on (the A/B set identity and the floor-interval decomposition).
//!
//! `h` has the NS property when `⌊z/2^i⌋ = ⌊z'/2^i⌋` implies
//! `⌊h(z)/2^(i-1)⌋ = ⌊h(z')/2^(i-1)⌋` for every `i >= 1`. All checks here
//! are bounded: a passing report means "holds up to B", never more.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fdsl::{BoxIter, MonotoneFn};

/// A pair `z < z'` and exponent `i` at which the NS implication fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NsWitness {
    pub z: u32,
    pub z_prime: u32,
    pub i: u32,
}

impl NsWitness {
    /// Re-evaluates the implication from scratch; `true` if it is violated.
    pub fn violates<H: Fn(u32) -> u32>(&self, h: H) -> bool {
        let (z, zp, i) = (self.z as u64, self.z_prime as u64, self.i);
        if i == 0 || i >= 64 {
            return false;
        }
        let same_block = z >> i == zp >> i;
        let same_value = (h(self.z) as u64) >> (i - 1) == (h(self.z_prime) as u64) >> (i - 1);
        same_block && !same_value
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NsReport {
    /// `true` means the property holds on `0..=bound`; nothing is claimed beyond.
    pub holds_on_bound: bool,
    pub bound: u32,
    /// Inclusive range of exponents checked.
    pub i_range: (u32, u32),
    pub witness: Option<NsWitness>,
}

impl NsReport {
    pub fn verdict_label(&self) -> String {
        if self.holds_on_bound {
            format!("holds up to {}", self.bound)
        } else {
            format!("fails within {}", self.bound)
        }
    }
}

fn bit_length(v: u32) -> u32 {
    32 - v.leading_zeros()
}

/// Bounded NS check of `h` on `0..=bound`.
///
/// Exponents run over `1..=bitlen(max(bound, h(bound))) + 1`; beyond that
/// both floors in the conclusion are zero. The first violation in
/// `(z, z', i)` lexicographic order is reported.
pub fn check_ns<H: Fn(u32) -> u32>(h: H, bound: u32) -> Result<NsReport> {
    let values: Vec<u32> = (0..=bound).map(&h).collect();
    if let Some(z) = values.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::NotMonotone {
            lower: vec![z as u32],
            upper: vec![z as u32 + 1],
            lower_value: values[z],
            upper_value: values[z + 1],
        });
    }
    let top = bit_length(bound.max(values[bound as usize])) + 1;
    let i_range = (1, top);
    for z in 0..=bound {
        for zp in z + 1..=bound {
            for i in 1..=top {
                let same_block = (z as u64) >> i == (zp as u64) >> i;
                if !same_block {
                    continue;
                }
                let (hz, hzp) = (values[z as usize] as u64, values[zp as usize] as u64);
                if hz >> (i - 1) != hzp >> (i - 1) {
                    return Ok(NsReport {
                        holds_on_bound: false,
                        bound,
                        i_range,
                        witness: Some(NsWitness { z, z_prime: zp, i }),
                    });
                }
            }
        }
    }
    Ok(NsReport {
        holds_on_bound: true,
        bound,
        i_range,
        witness: None,
    })
}

/// Unary restriction `g(v) = F(fixed with axis := v)`.
pub struct SliceFunction<'a, F: MonotoneFn + ?Sized> {
    source: &'a F,
    axis: usize,
    fixed: Vec<u32>,
}

impl<'a, F: MonotoneFn + ?Sized> SliceFunction<'a, F> {
    pub fn axis(&self) -> usize {
        self.axis
    }

    /// The fixed coordinates; the entry at `axis` is ignored.
    pub fn fixed(&self) -> &[u32] {
        &self.fixed
    }

    pub fn eval(&self, v: u32) -> u32 {
        let mut point = self.fixed.clone();
        point[self.axis] = v;
        self.source.value(&point)
    }
}

/// Restricts `func` to the 0-based `axis`, holding the other coordinates of
/// `fixed` constant. `fixed` carries all `s` coordinates; the free one is
/// overwritten.
pub fn slice<'a, F: MonotoneFn + ?Sized>(
    func: &'a F,
    axis: usize,
    fixed: &[u32],
) -> Result<SliceFunction<'a, F>> {
    if axis >= func.arity() {
        return Err(Error::AxisOutOfRange {
            axis,
            arity: func.arity(),
        });
    }
    if fixed.len() != func.arity() {
        return Err(Error::Arity {
            expected: func.arity(),
            got: fixed.len(),
        });
    }
    Ok(SliceFunction {
        source: func,
        axis,
        fixed: fixed.to_vec(),
    })
}

/// NS report for the slice along `axis` with the other coordinates fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceReport {
    pub axis: usize,
    /// Other coordinates in axis order, the free axis omitted.
    pub fixed: Vec<u32>,
    pub report: NsReport,
}

/// Checks every axis slice of `func` inside `bounds`. Each slice along axis
/// `i` is checked on `0..=bounds[i]`. Reports come back ordered by
/// `(axis, fixed)`.
pub fn check_all_slices<F: MonotoneFn + ?Sized>(
    func: &F,
    bounds: &[u32],
    exec: Execution,
) -> Result<Vec<SliceReport>> {
    if bounds.len() != func.arity() {
        return Err(Error::Arity {
            expected: func.arity(),
            got: bounds.len(),
        });
    }
    let mut jobs = Vec::new();
    for axis in 0..bounds.len() {
        let mut others = bounds.to_vec();
        others.remove(axis);
        for fixed in BoxIter::new(&others) {
            jobs.push((axis, fixed));
        }
    }
    exec.map(&jobs, |(axis, fixed)| {
        let mut point = fixed.clone();
        point.insert(*axis, 0);
        let g = slice(func, *axis, &point)?;
        Ok(SliceReport {
            axis: *axis,
            fixed: fixed.clone(),
            report: check_ns(|v| g.eval(v), bounds[*axis])?,
        })
    })
    .into_iter()
    .collect()
}

pub fn all_slices_hold(reports: &[SliceReport]) -> bool {
    reports.iter().all(|r| r.report.holds_on_bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbSets {
    /// `{ y ⊕ (z-k) : k = 1..z }`
    pub a: BTreeSet<u32>,
    /// `{ min(y, h(z-k)) ⊕ (z-k) : k = 1..z }`
    pub b: BTreeSet<u32>,
    pub equal: bool,
}

/// Both sets of the A/B identity. Requires `y <= h(z)`.
pub fn ab_sets<H: Fn(u32) -> u32>(h: H, y: u32, z: u32) -> Result<AbSets> {
    if y > h(z) {
        return Err(Error::Precondition(format!(
            "A/B sets need y <= h(z), got y = {y}, h({z}) = {}",
            h(z)
        )));
    }
    let a: BTreeSet<u32> = (1..=z).map(|k| y ^ (z - k)).collect();
    let b: BTreeSet<u32> = (1..=z).map(|k| y.min(h(z - k)) ^ (z - k)).collect();
    let equal = a == b;
    Ok(AbSets { a, b, equal })
}

/// How `⌊z/2^i⌋` compares with `⌊z'/2^i⌋` for `z < z'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FloorRelation {
    /// Equal floors, with `d·2^i <= z < z' < (d+1)·2^i`.
    Equal { d: u64 },
    /// Smaller floor, with `s >= i`, `0 <= t < 2^s` and
    /// `z = c·2^(s+1) + t < c·2^(s+1) + 2^s <= z'`.
    Below { c: u64, s: u32, t: u64 },
}

impl FloorRelation {
    /// Re-checks the stated inequalities for `(z, z', i)`.
    pub fn holds_for(&self, z: u64, zp: u64, i: u32) -> bool {
        match *self {
            FloorRelation::Equal { d } => d << i <= z && z < zp && zp < (d + 1) << i,
            FloorRelation::Below { c, s, t } => {
                let base = c << (s + 1);
                s >= i && t < 1 << s && z == base + t && z < base + (1 << s) && base + (1 << s) <= zp
            }
        }
    }
}

/// Classifies `(z, z', i)` and produces the matching witness. `s` is the
/// highest bit at which `z` and `z'` differ.
pub fn floor_interval_check(z: u64, zp: u64, i: u32) -> Result<FloorRelation> {
    if z >= zp {
        return Err(Error::Precondition(format!("need z < z', got {z} >= {zp}")));
    }
    if i >= 63 {
        return Err(Error::Precondition(format!("exponent {i} too large")));
    }
    if z >> i == zp >> i {
        return Ok(FloorRelation::Equal { d: z >> i });
    }
    let s = 63 - (z ^ zp).leading_zeros();
    let c = z >> (s + 1);
    let t = z & ((1 << (s + 1)) - 1);
    Ok(FloorRelation::Below { c, s, t })
}

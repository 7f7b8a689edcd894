//! Reference evaluators that share nothing with the engine's move
//! generation.
//!
//! Moves here are derived from the bar itself: a cut keeps the cells on the
//! bitter side of a groove, and the resulting coordinates are read back off
//! the remaining cells (largest extent on each base axis, tallest column).
//! No clamping formula is used.

use crate::chocolate::ChocPosition;
use crate::fdsl::{BoxIter, MonotoneFn};

/// Options of `p` obtained by physically cutting the bar.
///
/// `heights(cell)` must return the shape function at `cell`.
fn physical_cuts<H: Fn(&[u32]) -> u32>(heights: &H, p: &ChocPosition) -> Vec<ChocPosition> {
    let column = |cell: &[u32], y: u32| heights(cell).min(y) + 1;
    let read_back = |extent: Vec<u32>, cap: u32| -> ChocPosition {
        // Tallest remaining column, scanned over every base cell.
        let tallest = BoxIter::new(&extent)
            .map(|cell| column(&cell, p.y).min(cap + 1))
            .max()
            .unwrap_or(1);
        ChocPosition::new(extent, tallest - 1)
    };

    let mut out = Vec::new();
    for axis in 0..p.base.len() {
        // Grooves 1..=x_axis; cutting at groove g keeps columns with index < g.
        for groove in 1..=p.base[axis] {
            let mut extent = p.base.clone();
            extent[axis] = groove - 1;
            out.push(read_back(extent, p.y));
        }
    }
    for groove in 1..=p.y {
        out.push(read_back(p.base.clone(), groove - 1));
    }
    out.sort();
    out.dedup();
    out
}

fn mex_naive(values: &[u32]) -> u32 {
    (0..).find(|v| !values.contains(v)).expect("finite set")
}

/// Grundy value by plain recursion with no memo at all.
///
/// Exponential in the coordinate sum; use only on small positions.
pub fn naive_grundy<F: MonotoneFn + ?Sized>(func: &F, p: &ChocPosition) -> u32 {
    let heights = |cell: &[u32]| func.value(cell);
    naive_rec(&heights, p)
}

fn naive_rec<H: Fn(&[u32]) -> u32>(heights: &H, p: &ChocPosition) -> u32 {
    let values: Vec<u32> = physical_cuts(heights, p)
        .iter()
        .map(|q| naive_rec(heights, q))
        .collect();
    mex_naive(&values)
}

/// Dense bottom-up table over every canonical position below `corner`.
///
/// Row-major order over `(x1..xs, y)` visits each position after all of
/// its options, since a cut never increases a coordinate.
#[derive(Debug, Clone)]
pub struct BoxOracle {
    base_dims: Vec<usize>,
    y_dim: usize,
    shape: Vec<u32>,
    values: Vec<u32>,
}

impl BoxOracle {
    pub fn new<F: MonotoneFn + ?Sized>(func: &F, corner: &[u32]) -> Self {
        let base_dims: Vec<usize> = corner.iter().map(|&c| c as usize + 1).collect();
        let shape: Vec<u32> = BoxIter::new(corner).map(|cell| func.value(&cell)).collect();
        let y_dim = *shape.iter().max().unwrap_or(&0) as usize + 1;
        let mut oracle = Self {
            base_dims,
            y_dim,
            shape,
            values: Vec::new(),
        };
        oracle.fill(corner);
        oracle
    }

    fn base_index(&self, cell: &[u32]) -> usize {
        cell.iter()
            .zip(&self.base_dims)
            .fold(0, |acc, (&c, &d)| acc * d + c as usize)
    }

    fn index(&self, p: &ChocPosition) -> usize {
        self.base_index(&p.base) * self.y_dim + p.y as usize
    }

    fn fill(&mut self, corner: &[u32]) {
        let total = self.shape.len() * self.y_dim;
        let mut values = vec![u32::MAX; total];
        let shape = self.shape.clone();
        let lookup = |cell: &[u32]| shape[self.base_index(cell)];
        for base in BoxIter::new(corner) {
            let top = lookup(&base);
            for y in 0..=top {
                let p = ChocPosition::new(base.clone(), y);
                let options: Vec<u32> = physical_cuts(&lookup, &p)
                    .iter()
                    .map(|q| {
                        let v = values[self.index(q)];
                        assert_ne!(v, u32::MAX, "option {q} of {p} not yet evaluated");
                        v
                    })
                    .collect();
                values[self.index(&p)] = mex_naive(&options);
            }
        }
        self.values = values;
    }

    /// Grundy value of a canonical position inside the box.
    pub fn grundy(&self, p: &ChocPosition) -> Option<u32> {
        let inside = p.base.len() == self.base_dims.len()
            && p.base.iter().zip(&self.base_dims).all(|(&c, &d)| (c as usize) < d);
        if !inside || p.y > self.shape[self.base_index(&p.base)] {
            return None;
        }
        Some(self.values[self.index(p)])
    }
}

/// Grundy value of one canonical position via a box oracle sized to it.
pub fn reference_grundy<F: MonotoneFn + ?Sized>(func: &F, p: &ChocPosition) -> Option<u32> {
    BoxOracle::new(func, &p.base).grundy(p)
}

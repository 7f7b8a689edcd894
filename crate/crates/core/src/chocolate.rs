//! Chocolate-bar games CB(F, x1..xs, y).
//!
//! A bar is fixed by a monotone shape function `F` of `s` base coordinates.
//! The column over base cell `u <= x` has height `min(F(u), y) + 1`, and the
//! cell over the origin is bitter. A position is the tuple of groove counts
//! `(x1..xs, y)`; it is canonical when `y <= F(x1..xs)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdsl::{check_monotone, BoxIter, FunctionSpec, MonotoneFn};
use crate::grundy::ImpartialGame;

/// Groove counts along the base axes plus the height coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChocPosition {
    pub base: Vec<u32>,
    pub y: u32,
}

impl ChocPosition {
    pub fn new(base: Vec<u32>, y: u32) -> Self {
        Self { base, y }
    }

    /// Sum of all coordinates.
    pub fn nim_sum(&self) -> u32 {
        self.base.iter().fold(self.y, |acc, v| acc ^ v)
    }

    /// Coordinates in the conventional written order: `{y, z}` for one base
    /// axis, `{x, y, z}` for two, `(x1, .., xs, y)` otherwise.
    pub fn display_coords(&self) -> Vec<u32> {
        let mut out = self.base.clone();
        out.insert(y_slot(self.base.len()), self.y);
        out
    }

    /// Inverse of [`display_coords`](Self::display_coords).
    pub fn from_display_coords(s: usize, coords: &[u32]) -> Result<Self> {
        if coords.len() != s + 1 {
            return Err(Error::Arity {
                expected: s + 1,
                got: coords.len(),
            });
        }
        let mut base = coords.to_vec();
        let y = base.remove(y_slot(s));
        Ok(Self { base, y })
    }
}

/// Column names matching [`ChocPosition::display_coords`].
pub fn display_axis_names(s: usize) -> Vec<String> {
    match s {
        1 => vec!["y".into(), "z".into()],
        2 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=s)
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("y".to_string()))
            .collect(),
    }
}

fn y_slot(s: usize) -> usize {
    match s {
        1 => 0,
        2 => 1,
        _ => s,
    }
}

impl fmt::Display for ChocPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.display_coords().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A chocolate-bar game: base dimension, shape function and sweep bounds.
///
/// `F` is checked for monotonicity on the bounds at construction. The game
/// is immutable afterwards apart from a shared memo of `F` values.
pub struct ChocGame<F: MonotoneFn = FunctionSpec> {
    func: Arc<F>,
    bounds: Vec<u32>,
    heights: RwLock<HashMap<Vec<u32>, u32>>,
}

impl<F: MonotoneFn> fmt::Debug for ChocGame<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChocGame")
            .field("func", &self.func.describe())
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl ChocGame<FunctionSpec> {
    /// Parses `text` as an `arity`-ary shape function.
    pub fn from_expr(text: &str, arity: usize, bounds: &[u32]) -> Result<Self> {
        Self::new(FunctionSpec::parse_with_arity(text, arity)?, bounds)
    }
}

impl<F: MonotoneFn> ChocGame<F> {
    pub fn new(func: F, bounds: &[u32]) -> Result<Self> {
        Self::from_shared(Arc::new(func), bounds)
    }

    pub fn from_shared(func: Arc<F>, bounds: &[u32]) -> Result<Self> {
        if func.arity() == 0 {
            return Err(Error::UnsupportedDimension("base dimension must be at least 1".into()));
        }
        let check = check_monotone(func.as_ref(), bounds)?;
        if let Some((lower, upper)) = check.witness {
            return Err(Error::NotMonotone {
                lower_value: func.value(&lower),
                upper_value: func.value(&upper),
                lower,
                upper,
            });
        }
        Ok(Self {
            func,
            bounds: bounds.to_vec(),
            heights: RwLock::new(HashMap::new()),
        })
    }

    /// Base dimension `s`.
    pub fn dimension(&self) -> usize {
        self.func.arity()
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn function(&self) -> &F {
        &self.func
    }

    pub fn describe(&self) -> String {
        format!("CB(F = {}, s = {})", self.func.describe(), self.dimension())
    }

    /// `F(base)`, memoized.
    pub fn height(&self, base: &[u32]) -> u32 {
        if let Some(&v) = self.heights.read().expect("height memo poisoned").get(base) {
            return v;
        }
        let v = self.func.value(base);
        self.heights
            .write()
            .expect("height memo poisoned")
            .insert(base.to_vec(), v);
        v
    }

    fn check_arity(&self, p: &ChocPosition) -> Result<()> {
        if p.base.len() != self.dimension() {
            return Err(Error::Arity {
                expected: self.dimension() + 1,
                got: p.base.len() + 1,
            });
        }
        Ok(())
    }

    /// `true` iff `y <= F(base)`. Errors only on arity mismatch.
    pub fn validate_position(&self, p: &ChocPosition) -> Result<bool> {
        self.check_arity(p)?;
        Ok(p.y <= self.height(&p.base))
    }

    fn require_valid(&self, p: &ChocPosition) -> Result<()> {
        if self.validate_position(p)? {
            Ok(())
        } else {
            Err(Error::InvalidPosition(format!(
                "{p} violates y <= F(base): y = {} > F = {}",
                p.y,
                self.height(&p.base)
            )))
        }
    }

    /// Clamps `y` to `F(base)`.
    pub fn normalize(&self, base: Vec<u32>, y: u32) -> Result<ChocPosition> {
        if base.len() != self.dimension() {
            return Err(Error::Arity {
                expected: self.dimension() + 1,
                got: base.len() + 1,
            });
        }
        let y = y.min(self.height(&base));
        Ok(ChocPosition { base, y })
    }

    /// `{ {v,z} : v < y } ∪ { {min(y, f(w)), w} : w < z }` for a two-dimensional bar.
    pub fn moves_2d(&self, p: &ChocPosition) -> Result<Vec<ChocPosition>> {
        if self.dimension() != 1 {
            return Err(Error::UnsupportedDimension(format!(
                "moves_2d needs s = 1, game has s = {}",
                self.dimension()
            )));
        }
        self.require_valid(p)?;
        let (y, z) = (p.y, p.base[0]);
        let mut out: Vec<ChocPosition> = (0..y).map(|v| ChocPosition::new(vec![z], v)).collect();
        out.extend((0..z).map(|w| ChocPosition::new(vec![w], y.min(self.height(&[w])))));
        Ok(dedup(out))
    }

    /// Three-dimensional move set: cuts along x (clamping y to `F(u, z)`),
    /// height cuts, and cuts along z (clamping y to `F(x, w)`).
    pub fn moves_3d(&self, p: &ChocPosition) -> Result<Vec<ChocPosition>> {
        if self.dimension() != 2 {
            return Err(Error::UnsupportedDimension(format!(
                "moves_3d needs s = 2, game has s = {}",
                self.dimension()
            )));
        }
        self.require_valid(p)?;
        let (x, y, z) = (p.base[0], p.y, p.base[1]);
        let mut out: Vec<ChocPosition> = (0..x)
            .map(|u| ChocPosition::new(vec![u, z], self.height(&[u, z]).min(y)))
            .collect();
        out.extend((0..y).map(|v| ChocPosition::new(vec![x, z], v)));
        out.extend((0..z).map(|w| ChocPosition::new(vec![x, w], y.min(self.height(&[x, w])))));
        Ok(dedup(out))
    }

    /// Moves of an `s+1`-dimensional bar: for each base axis, every smaller
    /// groove count with `y` clamped to the new `F`, plus every smaller `y`.
    pub fn moves_multi(&self, p: &ChocPosition) -> Result<Vec<ChocPosition>> {
        self.require_valid(p)?;
        let mut out = Vec::with_capacity(p.base.iter().sum::<u32>() as usize + p.y as usize);
        for axis in 0..p.base.len() {
            let mut base = p.base.clone();
            for u in 0..p.base[axis] {
                base[axis] = u;
                out.push(ChocPosition::new(base.clone(), self.height(&base).min(p.y)));
            }
        }
        out.extend((0..p.y).map(|w| ChocPosition::new(p.base.clone(), w)));
        Ok(dedup(out))
    }

    /// Column heights `min(F(u), y) + 1` over every base cell `u <= base`.
    pub fn column_heights(&self, p: &ChocPosition) -> Result<HeightMatrix> {
        if self.dimension() > 2 {
            return Err(Error::UnsupportedDimension(format!(
                "rendering supports s <= 2, game has s = {}",
                self.dimension()
            )));
        }
        self.require_valid(p)?;
        let heights = BoxIter::new(&p.base)
            .map(|u| self.height(&u).min(p.y) + 1)
            .collect();
        Ok(HeightMatrix {
            dims: p.base.iter().map(|&b| b as usize + 1).collect(),
            heights,
        })
    }

    /// Every valid position with `base <= bounds` and
    /// `y <= min(F(base), y_cap)`, in lexicographic `(base, y)` order.
    pub fn positions(&self, y_cap: Option<u32>) -> impl Iterator<Item = ChocPosition> + '_ {
        BoxIter::new(&self.bounds).flat_map(move |base| {
            let top = self.height(&base).min(y_cap.unwrap_or(u32::MAX));
            (0..=top).map(move |y| ChocPosition::new(base.clone(), y))
        })
    }
}

fn dedup(mut v: Vec<ChocPosition>) -> Vec<ChocPosition> {
    v.sort_unstable();
    v.dedup();
    v
}

impl<F: MonotoneFn> ImpartialGame for ChocGame<F> {
    type Position = ChocPosition;

    fn validate(&self, p: &ChocPosition) -> Result<()> {
        self.require_valid(p)
    }

    fn moves(&self, p: &ChocPosition) -> Result<Vec<ChocPosition>> {
        self.moves_multi(p)
    }
}

/// Column heights of a bar with at most two base axes; row-major, the
/// bitter cell is index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightMatrix {
    pub dims: Vec<usize>,
    pub heights: Vec<u32>,
}

impl HeightMatrix {
    pub fn get(&self, cell: &[usize]) -> u32 {
        let idx = cell
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c);
        self.heights[idx]
    }

    /// Rows of heights: one row for a 2D bar, one row per x for a 3D bar.
    pub fn rows(&self) -> Vec<&[u32]> {
        let width = *self.dims.last().unwrap_or(&1);
        self.heights.chunks(width).collect()
    }

    /// CSV with one row per base row, LF line endings, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// ASCII picture. A 2D bar is drawn side on with `#` for the bitter
    /// square; a 3D bar is drawn as a top view of column heights with the
    /// bitter column marked `*`.
    pub fn render_ascii(&self) -> String {
        let mut out = String::new();
        if self.dims.len() == 1 {
            let top = self.heights.iter().copied().max().unwrap_or(0);
            for level in (0..top).rev() {
                for (i, &h) in self.heights.iter().enumerate() {
                    out.push(match (level < h, i == 0 && level == 0) {
                        (true, true) => '#',
                        (true, false) => 'o',
                        (false, _) => ' ',
                    });
                }
                let trimmed = out.trim_end_matches(' ').len();
                out.truncate(trimmed);
                out.push('\n');
            }
        } else {
            for (r, row) in self.rows().into_iter().enumerate().rev() {
                let cells: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(c, h)| {
                        if r == 0 && c == 0 {
                            format!("{h}*")
                        } else {
                            format!("{h} ")
                        }
                    })
                    .collect();
                out.push_str(cells.join(" ").trim_end());
                out.push('\n');
            }
        }
        out
    }
}

/// Shape functions used throughout the test suites.
pub mod library {
    use crate::fdsl::{Expr, FunctionSpec};

    fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn spec(arity: usize, root: Expr) -> FunctionSpec {
        FunctionSpec::new(arity, root).expect("library function is well-formed")
    }

    pub fn constant(arity: usize, c: u32) -> FunctionSpec {
        spec(arity, Expr::Lit(c))
    }

    /// `⌊x_axis / 2^k⌋`, ignoring the other axes. `axis` is 1-based.
    pub fn halving(arity: usize, axis: usize, k: u32) -> FunctionSpec {
        let root = if k == 0 {
            var(axis)
        } else {
            Expr::Div(Box::new(var(axis)), 1 << k)
        };
        spec(arity, root)
    }

    /// `max_i ⌊x_i / 2⌋` (just `⌊x1/2⌋` for one axis).
    pub fn max_halving(arity: usize) -> FunctionSpec {
        let halves: Vec<Expr> = (1..=arity).map(|i| Expr::Div(Box::new(var(i)), 2)).collect();
        match arity {
            1 => spec(1, halves.into_iter().next().expect("one axis")),
            _ => spec(arity, Expr::Max(halves)),
        }
    }

    /// `[max(x) > t]`.
    pub fn threshold(arity: usize, t: u32) -> FunctionSpec {
        let inner = match arity {
            1 => var(1),
            _ => Expr::Max((1..=arity).map(var).collect()),
        };
        spec(arity, Expr::Threshold(Box::new(inner), t))
    }

    /// `x1`, a shape whose slice is never NS.
    pub fn identity(arity: usize) -> FunctionSpec {
        spec(arity, var(1))
    }

    /// The whole library for one base dimension.
    pub fn all(arity: usize) -> Vec<(String, FunctionSpec)> {
        let mut out = Vec::new();
        for c in [0, 1, 2, 5] {
            out.push((format!("const{c}"), constant(arity, c)));
        }
        for k in 1..=2 {
            out.push((format!("halve_x1_by_2^{k}"), halving(arity, 1, k)));
        }
        out.push(("max_halving".into(), max_halving(arity)));
        for t in 0..=3 {
            out.push((format!("threshold{t}"), threshold(arity, t)));
        }
        out.push(("identity".into(), identity(arity)));
        out
    }
}

//! Impartial-game primitives: nim-sum, mex, a memoized Sprague-Grundy
//! engine over any finite, well-founded move relation, P/N classification
//! and disjunctive sums.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::error::{Error, Result};

/// Nim-sum (bitwise xor) of a sequence of values. The empty sum is 0.
pub fn nim_sum<I>(values: I) -> u32
where
    I: IntoIterator<Item = u32>,
{
    values.into_iter().fold(0, |acc, v| acc ^ v)
}

/// Minimum excluded value of a finite collection.
///
/// Duplicates are allowed. A presence bitmap of `len + 1` slots is enough
/// because `mex(S) <= |S|`.
pub fn mex<I>(values: I) -> u32
where
    I: IntoIterator<Item = u32>,
{
    let values: Vec<u32> = values.into_iter().collect();
    let mut seen = vec![false; values.len() + 1];
    for v in values {
        if let Some(slot) = seen.get_mut(v as usize) {
            *slot = true;
        }
    }
    seen.iter().position(|&s| !s).unwrap_or(seen.len()) as u32
}

/// A finite impartial game under normal play.
///
/// The move relation must be well-founded: every move strictly decreases
/// some nonnegative integer measure of the position.
pub trait ImpartialGame {
    type Position: Clone + Eq + Hash + Debug;

    /// Rejects positions that violate the game's invariants.
    fn validate(&self, _p: &Self::Position) -> Result<()> {
        Ok(())
    }

    /// Positions reachable in exactly one move, without duplicates.
    fn moves(&self, p: &Self::Position) -> Result<Vec<Self::Position>>;

    fn is_terminal(&self, p: &Self::Position) -> Result<bool> {
        Ok(self.moves(p)?.is_empty())
    }
}

impl<G: ImpartialGame + ?Sized> ImpartialGame for &G {
    type Position = G::Position;

    fn validate(&self, p: &Self::Position) -> Result<()> {
        (**self).validate(p)
    }

    fn moves(&self, p: &Self::Position) -> Result<Vec<Self::Position>> {
        (**self).moves(p)
    }
}

/// Memo of computed Grundy values.
///
/// Values are a function of the position alone, so the table contents do not
/// depend on the order in which positions were explored.
#[derive(Debug, Clone)]
pub struct GrundyTable<P> {
    values: HashMap<P, u32>,
    limit: Option<usize>,
    traversal_seed: Option<u64>,
}

impl<P: Clone + Eq + Hash> Default for GrundyTable<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P: Clone + Eq + Hash> GrundyTable<P> {
    pub fn new() -> Self {
        Self {
            values: HashMap::new(),
            limit: None,
            traversal_seed: None,
        }
    }

    /// Fails with [`Error::StateSpaceExceeded`] once more than `limit`
    /// positions would be stored.
    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    /// Shuffle each move list with a seeded RNG before exploring it.
    /// Only the traversal changes; the values never do.
    pub fn with_traversal_seed(mut self, seed: u64) -> Self {
        self.traversal_seed = Some(seed);
        self
    }

    pub fn get(&self, p: &P) -> Option<u32> {
        self.values.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &u32)> {
        self.values.iter()
    }

    fn insert(&mut self, p: P, value: u32) -> Result<()> {
        if let Some(limit) = self.limit {
            if self.values.len() >= limit && !self.values.contains_key(&p) {
                return Err(Error::StateSpaceExceeded { limit });
            }
        }
        self.values.insert(p, value);
        Ok(())
    }
}

struct Frame<P> {
    position: P,
    children: Vec<P>,
    next: usize,
}

/// Grundy value of `p`, extending `memo` with every position explored.
///
/// Traversal is an explicit depth-first stack, so deep games do not grow
/// the call stack.
pub fn grundy<G: ImpartialGame>(
    game: &G,
    p: &G::Position,
    memo: &mut GrundyTable<G::Position>,
) -> Result<u32> {
    if let Some(v) = memo.get(p) {
        return Ok(v);
    }
    game.validate(p)?;

    let mut rng = memo.traversal_seed.map(StdRng::seed_from_u64);
    let mut expand = |pos: G::Position| -> Result<Frame<G::Position>> {
        let mut children = game.moves(&pos)?;
        if let Some(rng) = rng.as_mut() {
            children.shuffle(rng);
        }
        Ok(Frame {
            position: pos,
            children,
            next: 0,
        })
    };

    let mut stack = vec![expand(p.clone())?];
    while let Some(frame) = stack.last_mut() {
        let mut pending = None;
        while frame.next < frame.children.len() {
            let child = &frame.children[frame.next];
            frame.next += 1;
            if memo.get(child).is_none() {
                pending = Some(child.clone());
                break;
            }
        }
        match pending {
            Some(child) => {
                let child_frame = expand(child)?;
                stack.push(child_frame);
            }
            None => {
                let frame = stack.pop().expect("non-empty stack");
                let value = mex(frame
                    .children
                    .iter()
                    .map(|c| memo.get(c).expect("child evaluated before parent")));
                memo.insert(frame.position, value)?;
            }
        }
    }
    Ok(memo.get(p).expect("root evaluated"))
}

/// `true` iff `p` is a P-position (previous player wins), i.e. its Grundy
/// value is zero.
pub fn is_p_position<G: ImpartialGame>(
    game: &G,
    p: &G::Position,
    memo: &mut GrundyTable<G::Position>,
) -> Result<bool> {
    Ok(grundy(game, p, memo)? == 0)
}

/// For a position whose value (and its options' values) are in `memo`,
/// returns the smallest `v < G(p)` that no option attains, if any.
/// Always `None` for a correctly computed table.
pub fn unreachable_smaller_value<G: ImpartialGame>(
    game: &G,
    p: &G::Position,
    memo: &mut GrundyTable<G::Position>,
) -> Result<Option<u32>> {
    let value = grundy(game, p, memo)?;
    let mut present = vec![false; value as usize];
    for child in game.moves(p)? {
        let v = grundy(game, &child, memo)?;
        if v < value {
            present[v as usize] = true;
        }
    }
    Ok(present.iter().position(|&seen| !seen).map(|v| v as u32))
}

/// Disjunctive sum: each move is made in exactly one component.
#[derive(Debug, Clone, Copy)]
pub struct SumGame<G, H> {
    pub left: G,
    pub right: H,
}

pub fn sum_game<G, H>(left: G, right: H) -> SumGame<G, H>
where
    G: ImpartialGame,
    H: ImpartialGame,
{
    SumGame { left, right }
}

impl<G: ImpartialGame, H: ImpartialGame> ImpartialGame for SumGame<G, H> {
    type Position = (G::Position, H::Position);

    fn validate(&self, p: &Self::Position) -> Result<()> {
        self.left.validate(&p.0)?;
        self.right.validate(&p.1)
    }

    fn moves(&self, p: &Self::Position) -> Result<Vec<Self::Position>> {
        let (g, h) = p;
        let mut out: Vec<Self::Position> = self
            .left
            .moves(g)?
            .into_iter()
            .map(|g2| (g2, h.clone()))
            .collect();
        out.extend(self.right.moves(h)?.into_iter().map(|h2| (g.clone(), h2)));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single Nim heap.
    struct Heap;

    impl ImpartialGame for Heap {
        type Position = u32;

        fn moves(&self, p: &u32) -> Result<Vec<u32>> {
            Ok((0..*p).collect())
        }
    }

    #[test]
    fn nim_sum_examples() {
        assert_eq!(nim_sum([5, 3]), 6);
        assert_eq!(nim_sum([7, 7]), 0);
        assert_eq!(nim_sum([5, 3, 5]), 3);
        assert_eq!(nim_sum([]), 0);
    }

    #[test]
    fn mex_examples() {
        assert_eq!(mex([]), 0);
        assert_eq!(mex([0, 1, 3]), 2);
        assert_eq!(mex([1, 2, 5]), 0);
        assert_eq!(mex([0, 0, 1, 1]), 2);
    }

    #[test]
    fn heap_values() {
        let mut memo = GrundyTable::new();
        for n in 0..20 {
            assert_eq!(grundy(&Heap, &n, &mut memo).unwrap(), n);
        }
        assert!(is_p_position(&Heap, &0, &mut memo).unwrap());
        assert!(Heap.is_terminal(&0).unwrap());
    }

    #[test]
    fn heap_sum() {
        let game = sum_game(Heap, Heap);
        let mut memo = GrundyTable::new();
        assert_eq!(grundy(&game, &(5, 3), &mut memo).unwrap(), 6);
        assert_eq!(grundy(&game, &(0, 0), &mut memo).unwrap(), 0);
        assert_eq!(grundy(&game, &(4, 4), &mut memo).unwrap(), 0);
    }

    #[test]
    fn limit_guard() {
        let mut memo = GrundyTable::new().with_limit(5);
        assert_eq!(
            grundy(&Heap, &10, &mut memo),
            Err(Error::StateSpaceExceeded { limit: 5 })
        );
    }

    #[test]
    fn seeded_traversal_agrees() {
        let game = sum_game(Heap, sum_game(Heap, Heap));
        let p = (6, (9, 4));
        let mut a = GrundyTable::new().with_traversal_seed(1);
        let mut b = GrundyTable::new().with_traversal_seed(99);
        assert_eq!(
            grundy(&game, &p, &mut a).unwrap(),
            grundy(&game, &p, &mut b).unwrap()
        );
        assert_eq!(a.len(), b.len());
        for (pos, v) in a.iter() {
            assert_eq!(b.get(pos), Some(*v));
        }
    }

    #[test]
    fn smaller_values_reachable() {
        let game = sum_game(Heap, Heap);
        let mut memo = GrundyTable::new();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(
                    unreachable_smaller_value(&game, &(x, y), &mut memo).unwrap(),
                    None
                );
            }
        }
    }
}

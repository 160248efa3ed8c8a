use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Space;

/// Handle of a ball: its center and the 1-based rank of its radius among the
/// distinct distances from the center (rank 1 is the singleton `{center}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BallId {
    pub center: usize,
    pub rank: usize,
}

/// A realised ball `{y : d(center, y) ≤ radius}`.
///
/// Every open ball `B(x, r)` of a finite space coincides with the closed
/// sub-level set at the largest distinct distance from `x` below `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub rank: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

impl Ball {
    pub fn id(&self) -> BallId {
        BallId {
            center: self.center,
            rank: self.rank,
        }
    }
}

/// Per-center sorted-distance index.
///
/// For each center `c` the points are ordered by `(d(c, ·), index)`; the
/// distinct distances split that order into consecutive rank groups. Ball
/// `(c, k)` is the prefix of the order up to the end of group `k`, so any
/// quantity accumulated along the order is available for every ball of `c`
/// in a single pass.
#[derive(Debug, Clone)]
pub struct BallFamily {
    n: usize,
    /// `order[c*n..][..n]`: points sorted by distance from `c`.
    order: Vec<u32>,
    /// `rank_of[c*n + y]`: 0-based rank group of `y` seen from `c`.
    rank_of: Vec<u32>,
    /// Offsets into the per-rank arrays, one slot per center plus a sentinel.
    offsets: Vec<usize>,
    /// Exclusive end of each rank group within the center's order.
    ends: Vec<u32>,
    radii: Vec<f64>,
    /// Measure of each ball, accumulated along the order.
    masses: Vec<f64>,
}

struct CenterIndex {
    order: Vec<u32>,
    rank_of: Vec<u32>,
    ends: Vec<u32>,
    radii: Vec<f64>,
    masses: Vec<f64>,
}

impl BallFamily {
    pub(crate) fn new(n: usize, dist: &[f64], measure: &[f64]) -> Self {
        let per_center: Vec<CenterIndex> = (0..n)
            .into_par_iter()
            .map(|c| index_center(c, &dist[c * n..(c + 1) * n], measure))
            .collect();

        let mut family = BallFamily {
            n,
            order: Vec::with_capacity(n * n),
            rank_of: Vec::with_capacity(n * n),
            offsets: Vec::with_capacity(n + 1),
            ends: Vec::new(),
            radii: Vec::new(),
            masses: Vec::new(),
        };
        family.offsets.push(0);
        for idx in per_center {
            family.order.extend_from_slice(&idx.order);
            family.rank_of.extend_from_slice(&idx.rank_of);
            family.ends.extend_from_slice(&idx.ends);
            family.radii.extend_from_slice(&idx.radii);
            family.masses.extend_from_slice(&idx.masses);
            family.offsets.push(family.ends.len());
        }
        family
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Total number of `(center, rank)` balls.
    pub fn ball_count(&self) -> usize {
        self.ends.len()
    }

    /// Number of distinct distances (= balls) seen from `center`.
    pub fn ranks(&self, center: usize) -> usize {
        self.offsets[center + 1] - self.offsets[center]
    }

    pub fn order(&self, center: usize) -> &[u32] {
        &self.order[center * self.n..(center + 1) * self.n]
    }

    pub fn ends(&self, center: usize) -> &[u32] {
        &self.ends[self.offsets[center]..self.offsets[center + 1]]
    }

    /// Distinct distances from `center`, ascending; `radii(c)[0] == 0`.
    pub fn radii(&self, center: usize) -> &[f64] {
        &self.radii[self.offsets[center]..self.offsets[center + 1]]
    }

    pub fn masses(&self, center: usize) -> &[f64] {
        &self.masses[self.offsets[center]..self.offsets[center + 1]]
    }

    /// 0-based rank group of `point` as seen from `center`.
    #[inline]
    pub fn rank_of(&self, center: usize, point: usize) -> usize {
        self.rank_of[center * self.n + point] as usize
    }

    pub(crate) fn rank_row(&self, center: usize) -> &[u32] {
        &self.rank_of[center * self.n..(center + 1) * self.n]
    }

    /// Members of ball `id` in distance order.
    pub fn members(&self, id: BallId) -> &[u32] {
        let end = self.ends(id.center)[id.rank - 1] as usize;
        &self.order(id.center)[..end]
    }

    pub fn ball(&self, id: BallId) -> Ball {
        let mut members: Vec<usize> = self.members(id).iter().map(|&i| i as usize).collect();
        members.sort_unstable();
        Ball {
            center: id.center,
            rank: id.rank,
            radius: self.radii(id.center)[id.rank - 1],
            members,
        }
    }

    pub fn mass(&self, id: BallId) -> f64 {
        self.masses(id.center)[id.rank - 1]
    }

    /// Measure of the open ball `B(center, r)`.
    pub fn open_ball_mass(&self, center: usize, r: f64) -> f64 {
        let k = self.radii(center).partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            self.masses(center)[k - 1]
        }
    }

    /// Measure of the closed ball `{y : d(center, y) ≤ r}`.
    pub fn closed_ball_mass(&self, center: usize, r: f64) -> f64 {
        let k = self.radii(center).partition_point(|&d| d <= r);
        if k == 0 {
            0.0
        } else {
            self.masses(center)[k - 1]
        }
    }

    /// Accumulates `Σ μ_i v_i` along the order of `center`, writing the value
    /// at the end of each rank group into `out` (fixed summation order).
    pub(crate) fn rank_sums(&self, center: usize, measure: &[f64], values: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let order = self.order(center);
        let mut acc = 0.0;
        let mut pos = 0usize;
        for &end in self.ends(center) {
            let end = end as usize;
            for &i in &order[pos..end] {
                let i = i as usize;
                acc += measure[i] * values[i];
            }
            pos = end;
            out.push(acc);
        }
    }

    /// Running extremum of `values` over each ball of `center`.
    pub(crate) fn rank_extremes(&self, center: usize, values: &[f64], maximize: bool, out: &mut Vec<f64>) {
        out.clear();
        let order = self.order(center);
        let mut acc = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut pos = 0usize;
        for &end in self.ends(center) {
            let end = end as usize;
            for &i in &order[pos..end] {
                let v = values[i as usize];
                acc = if maximize { acc.max(v) } else { acc.min(v) };
            }
            pos = end;
            out.push(acc);
        }
    }
}

fn index_center(center: usize, row: &[f64], measure: &[f64]) -> CenterIndex {
    let n = row.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        row[a as usize]
            .total_cmp(&row[b as usize])
            .then_with(|| a.cmp(&b))
    });
    debug_assert_eq!(order[0] as usize, center);

    let mut rank_of = vec![0u32; n];
    let mut ends = Vec::new();
    let mut radii = Vec::new();
    let mut masses = Vec::new();
    let mut acc = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        let d = row[i as usize];
        if radii.last() != Some(&d) {
            if !radii.is_empty() {
                ends.push(pos as u32);
                masses.push(acc);
            }
            radii.push(d);
        }
        acc += measure[i as usize];
        rank_of[i as usize] = (radii.len() - 1) as u32;
    }
    ends.push(n as u32);
    masses.push(acc);
    CenterIndex {
        order,
        rank_of,
        ends,
        radii,
        masses,
    }
}

/// Lists every ball of the space. Without deduplication there is one ball per
/// `(center, rank)`; with it, one per distinct member set (the first
/// `(center, rank)` in lexicographic order is kept).
pub fn enumerate_balls(space: &Space, dedupe: bool) -> Vec<Ball> {
    let family = space.family();
    let mut seen = BTreeSet::new();
    let mut balls = Vec::new();
    for center in 0..space.len() {
        for rank in 1..=family.ranks(center) {
            let ball = family.ball(BallId { center, rank });
            if dedupe && !seen.insert(ball.members.clone()) {
                continue;
            }
            balls.push(ball);
        }
    }
    balls
}

/// Number of balls, as [`enumerate_balls`] would return, without
/// materialising member lists. Member sets are compared through 128-bit
/// Zobrist hashes, which makes deduplication `O(n²)`.
pub fn count_balls(space: &Space, dedupe: bool) -> usize {
    let family = space.family();
    if !dedupe {
        return family.ball_count();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let keys: Vec<u128> = (0..space.len()).map(|_| rng.gen()).collect();
    let mut seen = HashSet::with_capacity(family.ball_count());
    for center in 0..space.len() {
        let order = family.order(center);
        let mut hash = 0u128;
        let mut taken = 0;
        for &end in family.ends(center) {
            for &i in &order[taken..end as usize] {
                hash ^= keys[i as usize];
            }
            taken = end as usize;
            seen.insert((taken, hash));
        }
    }
    seen.len()
}

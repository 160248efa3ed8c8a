//! Finite metric measure spaces.
//!
//! A [`Space`] owns its distance matrix, its point masses and a precomputed
//! [`BallFamily`]. Construction validates the metric axioms once; afterwards
//! the space is immutable and can be shared freely between threads.

mod balls;
mod generate;
mod geometry;
mod io;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use balls::{count_balls, enumerate_balls, Ball, BallFamily, BallId};
pub use generate::{generate, snowflake, GeneratorKind, GeneratorSpec, MeasureLaw};
pub use geometry::{annular_decay_constant, doubling_constant, AnnularDecayQuery, DoublingResult};
pub use io::{load, load_str, save, to_json, SpaceDocument};

use crate::error::SpaceError;

/// Relative triangle-inequality slack for explicit distance matrices.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    L1,
    Linf,
    /// Shortest-path metric of a weighted graph.
    Graph,
    Explicit,
}

impl MetricKind {
    pub fn is_coordinate(self) -> bool {
        matches!(self, MetricKind::Euclidean | MetricKind::L1 | MetricKind::Linf)
    }

    fn coordinate_distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            MetricKind::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            MetricKind::L1 => diffs.sum(),
            MetricKind::Linf => diffs.fold(0.0, f64::max),
            MetricKind::Graph | MetricKind::Explicit => unreachable!("not a coordinate metric"),
        }
    }
}

/// How a space is specified before validation.
#[derive(Debug, Clone)]
pub enum SpaceInput {
    Coordinates {
        coords: Vec<Vec<f64>>,
        metric: MetricKind,
    },
    Matrix(Vec<Vec<f64>>),
    Graph {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
}

/// A finite metric measure space `(X, d, μ)` with its ball index.
#[derive(Debug, Clone)]
pub struct Space {
    n: usize,
    dist: Vec<f64>,
    measure: Vec<f64>,
    metric: MetricKind,
    coords: Option<Vec<Vec<f64>>>,
    labels: Vec<String>,
    family: BallFamily,
    digest: OnceLock<String>,
}

/// Validates `input` and `measure` and builds the space.
pub fn build_space(input: SpaceInput, measure: Vec<f64>) -> Result<Space, SpaceError> {
    match input {
        SpaceInput::Coordinates { coords, metric } => Space::from_coordinates(coords, metric, measure),
        SpaceInput::Matrix(rows) => Space::from_matrix(rows, measure),
        SpaceInput::Graph { n, edges } => Space::from_graph(n, &edges, measure),
    }
}

impl Space {
    /// Builds a space from point coordinates; the metric axioms hold by
    /// construction, so only distinctness of points is checked.
    pub fn from_coordinates(
        coords: Vec<Vec<f64>>,
        metric: MetricKind,
        measure: Vec<f64>,
    ) -> Result<Self, SpaceError> {
        if !metric.is_coordinate() {
            return Err(SpaceError::InvalidParams(format!(
                "{metric:?} is not a coordinate metric"
            )));
        }
        let n = coords.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let dim = coords[0].len();
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(SpaceError::DimensionMismatch {
                    expected: dim,
                    found: c.len(),
                    context: "coordinate vector",
                });
            }
            if let Some(v) = c.iter().find(|v| !v.is_finite()) {
                return Err(SpaceError::InvalidParams(format!(
                    "coordinate of point {i} is not finite ({v})"
                )));
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.coordinate_distance(&coords[i], &coords[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        check_pairwise(n, &dist, false)?;
        Self::assemble(n, dist, measure, metric, Some(coords))
    }

    /// Builds a space from an explicit distance matrix with full validation.
    pub fn from_matrix(rows: Vec<Vec<f64>>, measure: Vec<f64>) -> Result<Self, SpaceError> {
        let n = rows.len();
        let dist = flatten_square(rows)?;
        check_pairwise(n, &dist, true)?;
        check_triangle(n, &dist)?;
        Self::assemble(n, dist, measure, MetricKind::Explicit, None)
    }

    /// Builds the shortest-path metric of an undirected graph with positive
    /// edge lengths. The graph must be connected.
    pub fn from_graph(
        n: usize,
        edges: &[(usize, usize, f64)],
        measure: Vec<f64>,
    ) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, len) in edges {
            if a >= n || b >= n {
                return Err(SpaceError::InvalidParams(format!(
                    "edge ({a},{b}) references a point outside 0..{n}"
                )));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(SpaceError::InvalidParams(format!(
                    "edge ({a},{b}) has non-positive length {len}"
                )));
            }
            adj[a].push((b, len));
            adj[b].push((a, len));
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for src in 0..n {
            dijkstra(&adj, src, &mut dist[src * n..(src + 1) * n]);
        }
        // Symmetrise so that float summation order cannot break symmetry.
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist[i * n + j].min(dist[j * n + i]);
                if !d.is_finite() {
                    return Err(SpaceError::InvalidParams(format!(
                        "graph is disconnected: no path between {i} and {j}"
                    )));
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        check_pairwise(n, &dist, false)?;
        Self::assemble(n, dist, measure, MetricKind::Graph, None)
    }

    /// Builds a space from a row-major matrix that is already known to be a
    /// metric (e.g. a snowflake of a validated space). Pairwise invariants are
    /// still checked.
    pub(crate) fn from_trusted(
        n: usize,
        dist: Vec<f64>,
        measure: Vec<f64>,
        metric: MetricKind,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Result<Self, SpaceError> {
        check_pairwise(n, &dist, true)?;
        Self::assemble(n, dist, measure, metric, coords)
    }

    fn assemble(
        n: usize,
        dist: Vec<f64>,
        measure: Vec<f64>,
        metric: MetricKind,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        if measure.len() != n {
            return Err(SpaceError::DimensionMismatch {
                expected: n,
                found: measure.len(),
                context: "measure vector",
            });
        }
        if let Some((index, &value)) = measure
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(SpaceError::NonpositiveMeasure { index, value });
        }
        let family = BallFamily::new(n, &dist, &measure);
        Ok(Space {
            n,
            dist,
            measure,
            metric,
            coords,
            labels: (0..n).map(|i| format!("p{i}")).collect(),
            family,
            digest: OnceLock::new(),
        })
    }

    pub(crate) fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Row-major `n × n` distance matrix.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn family(&self) -> &BallFamily {
        &self.family
    }

    /// Hex SHA-256 of the point count, distances and masses (bit patterns).
    pub fn digest(&self) -> &str {
        self.digest.get_or_init(|| {
            let mut hasher = Sha256::new();
            hasher.update((self.n as u64).to_le_bytes());
            for v in self.dist.iter().chain(&self.measure) {
                hasher.update(v.to_bits().to_le_bytes());
            }
            hex(&hasher.finalize())
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points (0 for a single point).
    pub fn separation(&self) -> f64 {
        let mut sep = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                sep = sep.min(self.dist(i, j));
            }
        }
        if sep.is_finite() {
            sep
        } else {
            0.0
        }
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.metric == other.metric
            && bits_eq(&self.dist, &other.dist)
            && bits_eq(&self.measure, &other.measure)
            && self.coords == other.coords
            && self.labels == other.labels
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn flatten_square(rows: Vec<Vec<f64>>) -> Result<Vec<f64>, SpaceError> {
    let n = rows.len();
    if n == 0 {
        return Err(SpaceError::Empty);
    }
    let mut flat = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(SpaceError::DimensionMismatch {
                expected: n,
                found: row.len(),
                context: "distance matrix row",
            });
        }
        flat.extend(row);
    }
    Ok(flat)
}

fn check_pairwise(n: usize, dist: &[f64], check_symmetry: bool) -> Result<(), SpaceError> {
    if dist.len() != n * n {
        return Err(SpaceError::DimensionMismatch {
            expected: n * n,
            found: dist.len(),
            context: "distance matrix entries",
        });
    }
    for i in 0..n {
        let dii = dist[i * n + i];
        if dii != 0.0 {
            return Err(SpaceError::InvalidDistance { i, j: i, value: dii });
        }
        for j in (i + 1)..n {
            let (forward, backward) = (dist[i * n + j], dist[j * n + i]);
            if !(forward.is_finite() && forward >= 0.0) {
                return Err(SpaceError::InvalidDistance { i, j, value: forward });
            }
            if check_symmetry && forward != backward {
                return Err(SpaceError::AsymmetricDistance {
                    i,
                    j,
                    forward,
                    backward,
                });
            }
            if forward == 0.0 {
                return Err(SpaceError::ZeroDistanceDistinctPoints { i, j });
            }
        }
    }
    Ok(())
}

/// Reports the worst violating triple if any exceeds the tolerance.
fn check_triangle(n: usize, dist: &[f64]) -> Result<(), SpaceError> {
    let max = dist.iter().copied().fold(0.0, f64::max);
    let tol = TRIANGLE_TOLERANCE * max;
    let mut worst: Option<(usize, usize, usize, f64)> = None;
    for i in 0..n {
        let di = &dist[i * n..(i + 1) * n];
        for j in 0..n {
            let dij = di[j];
            let dj = &dist[j * n..(j + 1) * n];
            for k in 0..n {
                let excess = di[k] - (dij + dj[k]);
                if excess > tol && worst.is_none_or(|w| excess > w.3) {
                    worst = Some((i, j, k, excess));
                }
            }
        }
    }
    match worst {
        Some((i, j, k, excess)) => Err(SpaceError::TriangleViolation { i, j, k, excess }),
        None => Ok(()),
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry(0.0, src));
    while let Some(HeapEntry(d, u)) = heap.pop() {
        if d > out[u] {
            continue;
        }
        for &(v, len) in &adj[u] {
            let nd = d + len;
            if nd < out[v] {
                out[v] = nd;
                heap.push(HeapEntry(nd, v));
            }
        }
    }
}

//! Distance metrics over embedding vectors.
//!
//! Storage is `f32`; every accumulation runs in `f64`. The batch kernel
//! ([`update_min_distances`]) is the hot path of greedy selection: one pass
//! over a flat point block per newly added center.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance metric between two embedding vectors.
///
/// `SquaredEuclidean` induces the same argmin/argmax ordering as `Euclidean`
/// and exists so selection loops can skip the square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Euclidean,
    SquaredEuclidean,
    CosineDistance,
}

impl DistanceMetric {
    /// Distance between `a` and `b`.
    ///
    /// Errors on dimension mismatch, and on a zero vector under cosine.
    pub fn distance(self, a: &[f32], b: &[f32]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        match self {
            DistanceMetric::Euclidean => Ok(squared_euclidean_raw(a, b).sqrt()),
            DistanceMetric::SquaredEuclidean => Ok(squared_euclidean_raw(a, b)),
            DistanceMetric::CosineDistance => cosine_distance_raw(a, b),
        }
    }
}

impl std::str::FromStr for DistanceMetric {
    type Err = Error;

    /// Accepts the long names and the CLI short forms `squared` / `cosine`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "squared" | "squared_euclidean" => Ok(DistanceMetric::SquaredEuclidean),
            "cosine" | "cosine_distance" => Ok(DistanceMetric::CosineDistance),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric {other:?} (expected euclidean|squared|cosine)"
            ))),
        }
    }
}

impl std::fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::SquaredEuclidean => "squared_euclidean",
            DistanceMetric::CosineDistance => "cosine_distance",
        };
        f.write_str(s)
    }
}

/// Sum of squared coordinate differences, accumulated four lanes at a time.
fn squared_euclidean_raw(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let base = i * 4;
        for lane in 0..4 {
            let d = f64::from(a[base + lane]) - f64::from(b[base + lane]);
            acc[lane] += d * d;
        }
    }
    let mut tail = 0.0f64;
    for i in chunks * 4..a.len() {
        let d = f64::from(a[i]) - f64::from(b[i]);
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn cosine_distance_raw(a: &[f32], b: &[f32]) -> Result<f64> {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(1.0 - dot / (na.sqrt() * nb.sqrt()))
}

/// Dense row-major block of points sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f32>,
}

impl Points {
    /// Build from row vectors; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Points { dim, data })
    }

    pub fn from_flat(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "flat buffer of {} values is not a multiple of dim {}",
                data.len(),
                dim
            )));
        }
        Ok(Points { dim, data })
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Minimum distance from `query` to any row of `centers`, with the index of
/// the nearest row. Ties break toward the lowest index.
pub fn min_distance_to_set(
    metric: DistanceMetric,
    query: &[f32],
    centers: &Points,
) -> Result<(f64, usize)> {
    if centers.is_empty() {
        return Err(Error::EmptyInput("center set"));
    }
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for i in 0..centers.len() {
        let d = metric.distance(query, centers.row(i))?;
        if d < best {
            best = d;
            best_idx = i;
        }
    }
    Ok((best, best_idx))
}

/// Fold one new center into per-point nearest-center state.
///
/// For each row `i` of `points`, replaces `min_dist[i]` (and `nearest[i]`)
/// when the distance to `center` is strictly smaller. One call costs
/// O(n·d); greedy selection calls it once per added center.
pub fn update_min_distances(
    metric: DistanceMetric,
    points: &Points,
    center: &[f32],
    center_id: usize,
    min_dist: &mut [f64],
    nearest: &mut [usize],
) -> Result<()> {
    if center.len() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            got: center.len(),
        });
    }
    debug_assert_eq!(min_dist.len(), points.len());
    debug_assert_eq!(nearest.len(), points.len());
    for i in 0..points.len() {
        let d = metric.distance(points.row(i), center)?;
        if d < min_dist[i] {
            min_dist[i] = d;
            nearest[i] = center_id;
        }
    }
    Ok(())
}

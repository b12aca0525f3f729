//! Greedy k-center selection under the minimax facility-location objective.
//!
//! Selection is class-stratified: each class is curated independently from a
//! random seed set, growing the center set one farthest point at a time
//! until the requested fraction of the class is covered. The seed points
//! kick-start the farthest-point recursion and are excluded from the
//! returned selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddedDataset;
use crate::error::{Error, Result};
use crate::metrics::{update_min_distances, DistanceMetric, Points};
use crate::rng::class_rng;

/// Configuration for class-stratified core-set selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoresetConfig {
    /// Fraction of each class to select, in (0, 1].
    pub ratio: f64,
    pub seed: u64,
    /// Size of the random initial center set per class.
    pub seed_set_size: usize,
    pub metric: DistanceMetric,
}

impl Default for CoresetConfig {
    fn default() -> Self {
        CoresetConfig {
            ratio: 0.1,
            seed: 0,
            seed_set_size: 1,
            metric: DistanceMetric::Euclidean,
        }
    }
}

impl CoresetConfig {
    fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ratio must be in (0, 1], got {}",
                self.ratio
            )));
        }
        if self.seed_set_size == 0 {
            return Err(Error::InvalidParameter("seed_set_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Selection for one class: seed indices, selected indices (in selection
/// order), and the covering radius of the class under seeds + selected.
/// All indices refer to the source dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSelection {
    pub class_id: u32,
    pub seeds: Vec<usize>,
    pub selected: Vec<usize>,
    pub covering_radius: f64,
}

/// Per-class selection over a dataset, ordered by class id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub ratio: f64,
    pub seed: u64,
    pub metric: DistanceMetric,
    pub classes: Vec<ClassSelection>,
}

impl SelectionResult {
    pub fn class(&self, class_id: u32) -> Option<&ClassSelection> {
        self.classes.iter().find(|c| c.class_id == class_id)
    }

    /// All selected indices (seeds excluded), classes in order.
    pub fn all_selected(&self) -> Vec<usize> {
        self.classes
            .iter()
            .flat_map(|c| c.selected.iter().copied())
            .collect()
    }

    /// Largest per-class covering radius: the stratified minimax objective.
    pub fn max_covering_radius(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.covering_radius)
            .fold(0.0, f64::max)
    }

    /// Rewrite every index through `index_map` (position -> new index).
    /// Used to lift subset-local indices back to the parent dataset.
    pub fn remap(&self, index_map: &[usize]) -> Result<SelectionResult> {
        let lift = |idx: &[usize]| -> Result<Vec<usize>> {
            idx.iter()
                .map(|&i| {
                    index_map.get(i).copied().ok_or_else(|| {
                        Error::InvalidParameter(format!("index {i} outside remap table"))
                    })
                })
                .collect()
        };
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(ClassSelection {
                    class_id: c.class_id,
                    seeds: lift(&c.seeds)?,
                    selected: lift(&c.selected)?,
                    covering_radius: c.covering_radius,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SelectionResult {
            ratio: self.ratio,
            seed: self.seed,
            metric: self.metric,
            classes,
        })
    }
}

/// Number of points to select for a class of `class_size` at `ratio`.
pub fn selection_count(ratio: f64, class_size: usize) -> usize {
    (ratio * class_size as f64).ceil() as usize
}

/// Greedy farthest-point selection.
///
/// Starting from the centers in `initial`, repeatedly adds the point with
/// the largest distance to its nearest center until `k` new points have
/// been chosen. Returns the chosen indices in selection order, excluding
/// `initial`. Ties in the argmax break toward the lowest index.
///
/// A per-point nearest-center distance cache is folded forward as centers
/// are added, so the total cost is O(n·(k + |initial|)·d).
pub fn greedy_k_center(
    points: &Points,
    initial: &[usize],
    k: usize,
    metric: DistanceMetric,
) -> Result<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput("point list"));
    }
    if initial.is_empty() {
        return Err(Error::EmptyInput("initial center set"));
    }
    let mut in_set = vec![false; n];
    for &i in initial {
        if i >= n {
            return Err(Error::InvalidParameter(format!(
                "initial index {i} out of range ({n} points)"
            )));
        }
        if std::mem::replace(&mut in_set[i], true) {
            return Err(Error::InvalidParameter(format!(
                "duplicate initial index {i}"
            )));
        }
    }
    if k > n - initial.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds available points ({} of {n} remain)",
            n - initial.len()
        )));
    }

    let mut min_dist = vec![f64::INFINITY; n];
    let mut nearest = vec![usize::MAX; n];
    for &c in initial {
        update_min_distances(metric, points, points.row(c), c, &mut min_dist, &mut nearest)?;
    }

    let mut selected = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = usize::MAX;
        for i in 0..n {
            if !in_set[i] && min_dist[i] > best {
                best = min_dist[i];
                best_idx = i;
            }
        }
        debug_assert!(best_idx != usize::MAX);
        selected.push(best_idx);
        in_set[best_idx] = true;
        update_min_distances(
            metric,
            points,
            points.row(best_idx),
            best_idx,
            &mut min_dist,
            &mut nearest,
        )?;
    }
    Ok(selected)
}

/// Largest distance from any point to its nearest center: the minimax
/// objective value achieved by `centers`.
pub fn covering_radius(
    points: &Points,
    centers: &[usize],
    metric: DistanceMetric,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyInput("center set"));
    }
    for &c in centers {
        if c >= points.len() {
            return Err(Error::InvalidParameter(format!(
                "center index {c} out of range ({} points)",
                points.len()
            )));
        }
    }
    let mut radius = 0.0f64;
    for i in 0..points.len() {
        let mut best = f64::INFINITY;
        for &c in centers {
            let d = metric.distance(points.row(i), points.row(c))?;
            if d < best {
                best = d;
            }
        }
        if best > radius {
            radius = best;
        }
    }
    Ok(radius)
}

/// Exhaustive optimum of the k-center objective on small instances.
///
/// Enumerates every size-`k` subset and returns the one minimizing the
/// covering radius, with that radius. Ties resolve to the lexicographically
/// smallest index set. Guarded to n <= 16 and C(n, k) <= 10^6: this is a
/// verification oracle, not a production path.
pub fn exact_k_center(
    points: &Points,
    k: usize,
    metric: DistanceMetric,
) -> Result<(Vec<usize>, f64)> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput("point list"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} out of range for {n} points"
        )));
    }
    if n > 16 {
        return Err(Error::InstanceTooLarge(format!("n = {n} > 16")));
    }
    let combos = binomial(n, k);
    if combos > 1_000_000 {
        return Err(Error::InstanceTooLarge(format!(
            "C({n}, {k}) = {combos} > 10^6"
        )));
    }

    let mut best_radius = f64::INFINITY;
    let mut best_set: Vec<usize> = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let r = covering_radius(points, &combo, metric)?;
        if r < best_radius {
            best_radius = r;
            best_set = combo.clone();
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    Ok((best_set, best_radius))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Advance `combo` to the next k-subset of 0..n in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Class-stratified greedy core-set selection.
///
/// For each class independently: draw `seed_set_size` seed points from the
/// stream keyed by `(cfg.seed, class_id)`, grow the center set greedily by
/// `ceil(ratio * class_size)` points, and record the covering radius of the
/// class under seeds plus selected. The output is a pure function of
/// `(ds, cfg)` regardless of thread count.
pub fn select_coreset(ds: &EmbeddedDataset, cfg: &CoresetConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    let views = class_views(ds)?;

    // Capacity check up front so the error names the class.
    for view in &views {
        let want = selection_count(cfg.ratio, view.indices.len());
        if view.indices.len() < cfg.seed_set_size + want {
            return Err(Error::ClassTooSmall {
                class_id: view.class_id,
                available: view.indices.len(),
                needed: cfg.seed_set_size + want,
            });
        }
    }

    let classes: Vec<ClassSelection> = views
        .par_iter()
        .map(|view| select_class(view, cfg))
        .collect::<Result<Vec<_>>>()?;

    Ok(SelectionResult {
        ratio: cfg.ratio,
        seed: cfg.seed,
        metric: cfg.metric,
        classes,
    })
}

/// Uniform per-class random selection baseline. No seed set is used; the
/// covering radius is that of the selected points alone.
pub fn random_select(ds: &EmbeddedDataset, ratio: f64, seed: u64) -> Result<SelectionResult> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ratio must be in (0, 1], got {ratio}"
        )));
    }
    let views = class_views(ds)?;
    let classes: Vec<ClassSelection> = views
        .par_iter()
        .map(|view| {
            let m = view.indices.len();
            let want = selection_count(ratio, m);
            let mut rng = class_rng(seed, view.class_id);
            let picked = rand::seq::index::sample(&mut rng, m, want).into_vec();
            let radius = covering_radius(&view.points, &picked, view.metric_for(seed))?;
            let selected = picked.iter().map(|&i| view.indices[i]).collect();
            Ok(ClassSelection {
                class_id: view.class_id,
                seeds: Vec::new(),
                selected,
                covering_radius: radius,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionResult {
        ratio,
        seed,
        metric: DistanceMetric::Euclidean,
        classes,
    })
}

struct ClassView {
    class_id: u32,
    /// Dataset indices of the class members, in dataset order.
    indices: Vec<usize>,
    points: Points,
}

impl ClassView {
    fn metric_for(&self, _seed: u64) -> DistanceMetric {
        DistanceMetric::Euclidean
    }
}

fn class_views(ds: &EmbeddedDataset) -> Result<Vec<ClassView>> {
    (0..ds.num_classes() as u32)
        .map(|class_id| {
            let indices = ds.class_indices(class_id);
            if indices.is_empty() {
                return Err(Error::ClassTooSmall {
                    class_id,
                    available: 0,
                    needed: 1,
                });
            }
            let mut flat = Vec::with_capacity(indices.len() * ds.dim());
            for &i in &indices {
                flat.extend_from_slice(&ds.item(i).vector);
            }
            Ok(ClassView {
                class_id,
                indices,
                points: Points::from_flat(ds.dim(), flat)?,
            })
        })
        .collect()
}

fn select_class(view: &ClassView, cfg: &CoresetConfig) -> Result<ClassSelection> {
    let m = view.indices.len();
    let want = selection_count(cfg.ratio, m);
    let mut rng = class_rng(cfg.seed, view.class_id);
    let seeds_local = rand::seq::index::sample(&mut rng, m, cfg.seed_set_size).into_vec();

    // Squared euclidean orders argmax identically to euclidean, so the hot
    // loop drops the sqrt; radii are still reported in the caller's metric.
    let greedy_metric = match cfg.metric {
        DistanceMetric::Euclidean => DistanceMetric::SquaredEuclidean,
        m => m,
    };
    let selected_local = greedy_k_center(&view.points, &seeds_local, want, greedy_metric)?;

    let mut centers = seeds_local.clone();
    centers.extend_from_slice(&selected_local);
    let radius = covering_radius(&view.points, &centers, cfg.metric)?;

    Ok(ClassSelection {
        class_id: view.class_id,
        seeds: seeds_local.iter().map(|&i| view.indices[i]).collect(),
        selected: selected_local.iter().map(|&i| view.indices[i]).collect(),
        covering_radius: radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;
    use rand::Rng;

    fn pts_1d(values: &[f32]) -> Points {
        Points::from_rows(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    fn random_points(rng: &mut impl Rng, n: usize, d: usize) -> Points {
        Points::from_rows(
            &(0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    /// Reference greedy that recomputes every min distance from scratch at
    /// each step. Shares no caching state with the production path.
    fn naive_greedy(
        points: &Points,
        initial: &[usize],
        k: usize,
        metric: DistanceMetric,
    ) -> Vec<usize> {
        let mut centers: Vec<usize> = initial.to_vec();
        let mut picked = Vec::new();
        for _ in 0..k {
            let mut best = f64::NEG_INFINITY;
            let mut best_idx = usize::MAX;
            for i in 0..points.len() {
                if centers.contains(&i) {
                    continue;
                }
                let mut dmin = f64::INFINITY;
                for &c in &centers {
                    let d = metric.distance(points.row(i), points.row(c)).unwrap();
                    dmin = dmin.min(d);
                }
                if dmin > best {
                    best = dmin;
                    best_idx = i;
                }
            }
            centers.push(best_idx);
            picked.push(best_idx);
        }
        picked
    }

    #[test]
    fn greedy_three_point_instance() {
        // From {0}: point 10 (index 1) is farthest; then index 2 remains.
        let pts = pts_1d(&[0.0, 10.0, 3.0]);
        let sel = greedy_k_center(&pts, &[0], 2, DistanceMetric::Euclidean).unwrap();
        assert_eq!(sel, vec![1, 2]);
    }

    #[test]
    fn greedy_k_zero_is_empty() {
        let pts = pts_1d(&[0.0, 1.0]);
        let sel = greedy_k_center(&pts, &[0], 0, DistanceMetric::Euclidean).unwrap();
        assert!(sel.is_empty());
    }

    #[test]
    fn greedy_rejects_bad_inputs() {
        let pts = pts_1d(&[0.0, 1.0, 2.0]);
        assert!(greedy_k_center(&pts, &[], 1, DistanceMetric::Euclidean).is_err());
        assert!(greedy_k_center(&pts, &[0], 3, DistanceMetric::Euclidean).is_err());
        assert!(greedy_k_center(&pts, &[0, 0], 1, DistanceMetric::Euclidean).is_err());
        assert!(greedy_k_center(&pts, &[5], 1, DistanceMetric::Euclidean).is_err());
        let empty = Points::from_rows(&[]).unwrap();
        assert!(greedy_k_center(&empty, &[0], 0, DistanceMetric::Euclidean).is_err());
    }

    #[test]
    fn greedy_matches_naive_recompute() {
        let mut rng = crate::rng::stream_rng(101, 0);
        for trial in 0..200 {
            let n = rng.gen_range(2..=40);
            let d = rng.gen_range(1..=4);
            let pts = random_points(&mut rng, n, d);
            let initial = vec![rng.gen_range(0..n)];
            let k = rng.gen_range(0..n);
            let fast = greedy_k_center(&pts, &initial, k, DistanceMetric::Euclidean).unwrap();
            let slow = naive_greedy(&pts, &initial, k, DistanceMetric::Euclidean);
            assert_eq!(fast, slow, "trial {trial}: n={n} d={d} k={k}");
        }
    }

    #[test]
    fn greedy_farthest_distances_non_increasing() {
        let mut rng = crate::rng::stream_rng(55, 0);
        for _ in 0..20 {
            let n = rng.gen_range(5..=30);
            let pts = random_points(&mut rng, n, 3);
            let sel = greedy_k_center(&pts, &[0], n - 1, DistanceMetric::Euclidean).unwrap();
            let mut centers = vec![0usize];
            let mut last = f64::INFINITY;
            for &s in &sel {
                let center_pts = Points::from_rows(
                    &centers.iter().map(|&c| pts.row(c).to_vec()).collect::<Vec<_>>(),
                )
                .unwrap();
                let (d, _) = crate::metrics::min_distance_to_set(
                    DistanceMetric::Euclidean,
                    pts.row(s),
                    &center_pts,
                )
                .unwrap();
                assert!(d <= last + 1e-12, "farthest distance increased: {d} > {last}");
                last = d;
                centers.push(s);
            }
        }
    }

    #[test]
    fn covering_radius_three_point_instance() {
        let pts = pts_1d(&[0.0, 4.0, 10.0]);
        let r = covering_radius(&pts, &[0, 2], DistanceMetric::Euclidean).unwrap();
        assert_eq!(r, 4.0);
    }

    #[test]
    fn covering_radius_all_centers_is_zero() {
        let pts = pts_1d(&[1.0, 2.0, 3.0]);
        let r = covering_radius(&pts, &[0, 1, 2], DistanceMetric::Euclidean).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn covering_radius_matches_brute_force() {
        let mut rng = crate::rng::stream_rng(77, 0);
        for _ in 0..50 {
            let n = rng.gen_range(2..=20);
            let pts = random_points(&mut rng, n, 3);
            let k = rng.gen_range(1..=n);
            let centers: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let got = covering_radius(&pts, &centers, DistanceMetric::Euclidean).unwrap();
            let mut want = 0.0f64;
            for i in 0..n {
                let mut dmin = f64::INFINITY;
                for &c in &centers {
                    dmin = dmin.min(
                        DistanceMetric::Euclidean
                            .distance(pts.row(i), pts.row(c))
                            .unwrap(),
                    );
                }
                want = want.max(dmin);
            }
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_singleton_instance() {
        // Center 1 covers {0,1,10} with max distance 9; 0 and 2 give 10.
        let pts = pts_1d(&[0.0, 1.0, 10.0]);
        let (set, r) = exact_k_center(&pts, 1, DistanceMetric::Euclidean).unwrap();
        assert_eq!(set, vec![1]);
        assert_eq!(r, 9.0);
    }

    #[test]
    fn exact_k_equals_n_gives_zero_radius() {
        let pts = pts_1d(&[0.0, 5.0, 9.0]);
        let (set, r) = exact_k_center(&pts, 3, DistanceMetric::Euclidean).unwrap();
        assert_eq!(set, vec![0, 1, 2]);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn exact_guard_rejects_large_instances() {
        let mut rng = crate::rng::stream_rng(3, 0);
        let pts = random_points(&mut rng, 17, 2);
        assert!(matches!(
            exact_k_center(&pts, 2, DistanceMetric::Euclidean),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn exact_ties_take_lexicographically_smallest() {
        // Symmetric pair: {0} and {1} both give radius 1; expect {0}.
        let pts = pts_1d(&[0.0, 1.0]);
        let (set, r) = exact_k_center(&pts, 1, DistanceMetric::Euclidean).unwrap();
        assert_eq!(set, vec![0]);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn greedy_within_twice_exact_radius() {
        let mut rng = crate::rng::stream_rng(909, 0);
        for trial in 0..100 {
            let n = rng.gen_range(3..=12);
            let d = rng.gen_range(1..=3);
            let pts = random_points(&mut rng, n, d);
            let k = rng.gen_range(1..=4.min(n - 1));
            let (_, opt) = exact_k_center(&pts, k, DistanceMetric::Euclidean).unwrap();
            // Greedy grows from one seed to k centers total.
            let sel = greedy_k_center(&pts, &[0], k - 1, DistanceMetric::Euclidean).unwrap();
            let mut centers = vec![0usize];
            centers.extend(sel);
            let got = covering_radius(&pts, &centers, DistanceMetric::Euclidean).unwrap();
            assert!(
                got <= 2.0 * opt + 1e-9,
                "trial {trial}: greedy {got} > 2x optimal {opt}"
            );
        }
    }

    #[test]
    fn select_coreset_contract() {
        let ds = generate_synthetic(2, 30, 3, 1.0, 0.0, 5).unwrap();
        let cfg = CoresetConfig {
            ratio: 0.1,
            seed: 9,
            seed_set_size: 1,
            metric: DistanceMetric::Euclidean,
        };
        let sel = select_coreset(&ds, &cfg).unwrap();
        assert_eq!(sel.classes.len(), 2);
        for class in &sel.classes {
            assert_eq!(class.selected.len(), selection_count(0.1, 30));
            assert_eq!(class.seeds.len(), 1);
            // Disjoint from seeds, no duplicates, class purity.
            for &i in &class.selected {
                assert!(!class.seeds.contains(&i));
                assert_eq!(ds.item(i).class_id, class.class_id);
            }
            let mut dedup = class.selected.clone();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(dedup.len(), class.selected.len());
            assert!(class.covering_radius > 0.0);
        }
        // Deterministic in config.
        let again = select_coreset(&ds, &cfg).unwrap();
        assert_eq!(sel, again);
    }

    #[test]
    fn select_coreset_capacity_precondition() {
        // ratio 1.0 with one seed per class leaves no room: ceil(1.0 * m)
        // new points cannot come out of m - 1 non-seed points.
        let ds = generate_synthetic(2, 10, 2, 1.0, 0.0, 4).unwrap();
        let cfg = CoresetConfig {
            ratio: 1.0,
            seed: 0,
            seed_set_size: 1,
            metric: DistanceMetric::Euclidean,
        };
        assert!(matches!(
            select_coreset(&ds, &cfg),
            Err(Error::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn select_coreset_seed_sensitivity_and_radius_bound() {
        // Two greedy solutions on the same class stay within the classical
        // factor of each other: both are within 2x of the exhaustive
        // optimum on classes small enough to enumerate.
        let ds = generate_synthetic(2, 11, 2, 1.0, 0.0, 21).unwrap();
        let mk = |seed| CoresetConfig {
            ratio: 0.2,
            seed,
            seed_set_size: 1,
            metric: DistanceMetric::Euclidean,
        };
        let a = select_coreset(&ds, &mk(1)).unwrap();
        let b = select_coreset(&ds, &mk(2)).unwrap();
        for (ca, cb) in a.classes.iter().zip(&b.classes) {
            let hi = ca.covering_radius.max(cb.covering_radius);
            let lo = ca.covering_radius.min(cb.covering_radius);
            assert!(hi <= 2.0 * lo + 1e-9, "radii too far apart: {lo} vs {hi}");
        }
    }

    #[test]
    fn select_coreset_identical_across_thread_counts() {
        let ds = generate_synthetic(4, 25, 3, 1.0, 0.1, 13).unwrap();
        let cfg = CoresetConfig {
            ratio: 0.2,
            seed: 3,
            seed_set_size: 2,
            metric: DistanceMetric::Euclidean,
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| select_coreset(&ds, &cfg))
            .unwrap();
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| select_coreset(&ds, &cfg))
            .unwrap();
        assert_eq!(single, multi);
    }

    #[test]
    fn random_select_ratio_one_takes_everything() {
        let ds = generate_synthetic(2, 8, 2, 1.0, 0.0, 2).unwrap();
        let sel = random_select(&ds, 1.0, 0).unwrap();
        for class in &sel.classes {
            assert_eq!(class.selected.len(), 8);
            assert!(class.seeds.is_empty());
            assert_eq!(class.covering_radius, 0.0);
        }
    }

    #[test]
    fn random_select_counts_across_ratio_grid() {
        let ds = generate_synthetic(2, 100, 2, 1.0, 0.0, 2).unwrap();
        for (ratio, want) in [(0.02, 2), (0.05, 5), (0.10, 10), (0.50, 50)] {
            let sel = random_select(&ds, ratio, 1).unwrap();
            for class in &sel.classes {
                assert_eq!(class.selected.len(), want, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn random_select_seeds_differ_and_are_deterministic() {
        let ds = generate_synthetic(1, 30, 2, 1.0, 0.0, 6).unwrap();
        let a = random_select(&ds, 0.3, 1).unwrap();
        let b = random_select(&ds, 0.3, 2).unwrap();
        let a2 = random_select(&ds, 0.3, 1).unwrap();
        assert_eq!(a, a2);
        assert_ne!(a.classes[0].selected, b.classes[0].selected);
        assert!(random_select(&ds, 0.0, 1).is_err());
        assert!(random_select(&ds, 1.5, 1).is_err());
    }

    #[test]
    fn selection_result_json_shape() {
        let ds = generate_synthetic(2, 12, 2, 1.0, 0.0, 3).unwrap();
        let cfg = CoresetConfig {
            ratio: 0.25,
            seed: 11,
            seed_set_size: 1,
            metric: DistanceMetric::SquaredEuclidean,
        };
        let sel = select_coreset(&ds, &cfg).unwrap();
        let json: serde_json::Value = serde_json::to_value(&sel).unwrap();
        assert_eq!(json["ratio"], 0.25);
        assert_eq!(json["seed"], 11);
        assert_eq!(json["metric"], "squared_euclidean");
        let classes = json["classes"].as_array().unwrap();
        assert_eq!(classes.len(), 2);
        for c in classes {
            assert!(c["class_id"].is_number());
            assert!(c["seeds"].is_array());
            assert!(c["selected"].is_array());
            assert!(c["covering_radius"].is_number());
        }
        let back: SelectionResult = serde_json::from_value(json).unwrap();
        assert_eq!(back, sel);
    }
}

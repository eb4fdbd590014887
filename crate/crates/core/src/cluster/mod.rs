//! K-means on embedding rows and Newman modularity of the resulting partition.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{fast_embed_cascaded, sample_projection, EmbedConfig};
use crate::error::{invalid, Error, Result};
use crate::poly::SpectralFunction;
use crate::sparse::{DenseBlock, Graph};

pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    /// Sum of squared distances from each row to its centroid.
    pub inertia: f64,
    /// Inertia after every assignment step.
    pub inertia_history: Vec<f64>,
    #[serde(skip)]
    pub centroids: DenseBlock<f64>,
}

/// Lloyd iterations from a k-means++ start; run `run` draws from its own
/// stream of the `seed` generator.
pub fn kmeans(x: &DenseBlock<f64>, k: usize, max_iters: usize, seed: u64, run: u64) -> Result<ClusterAssignment> {
    let n = x.n_rows();
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= K <= {n} rows, got K = {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    let d = x.n_cols();
    let mut centroids = seed_plus_plus(x, k, &mut rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();

    for iter in 0..max_iters.max(1) {
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, label) in labels.iter_mut().enumerate() {
            let (best, dist) = nearest(x.row(i), &centroids, d);
            inertia += dist;
            if *label != best {
                *label = best;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed && iter > 0 {
            break;
        }
        update_centroids(x, &mut labels, &mut centroids, k);
    }
    let inertia = total_inertia(x, &labels, &centroids, d);
    if inertia < *history.last().expect("at least one iteration") {
        history.push(inertia);
    }
    Ok(ClusterAssignment {
        labels,
        k,
        inertia,
        inertia_history: history,
        centroids: DenseBlock::new(k, d, centroids).expect("finite centroids"),
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn nearest(row: &[f64], centroids: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centroids.chunks_exact(d.max(1)).enumerate() {
        let dist = sq_dist(row, &centre[..d]);
        if dist < best.1 {
            best = (c, dist);
        }
    }
    if d == 0 {
        best.1 = 0.0;
    }
    best
}

fn total_inertia(x: &DenseBlock<f64>, labels: &[usize], centroids: &[f64], d: usize) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(x.row(i), &centroids[c * d..(c + 1) * d]))
        .sum()
}

fn seed_plus_plus(x: &DenseBlock<f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = x.n_rows();
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(first))).collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in dist.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining row duplicates a centre; take any unused one
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        taken[next] = true;
        for (i, w) in dist.iter_mut().enumerate() {
            *w = w.min(sq_dist(x.row(i), x.row(next)));
        }
    }
    chosen.iter().flat_map(|&i| x.row(i).iter().copied()).collect()
}

/// Moves centroids to cluster means. An empty cluster takes over the row
/// farthest from its current centroid among clusters with at least two rows.
fn update_centroids(x: &DenseBlock<f64>, labels: &mut [usize], centroids: &mut [f64], k: usize) {
    let d = x.n_cols();
    let mut sizes = vec![0usize; k];
    for &c in labels.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let far = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| (i, sq_dist(x.row(i), &centroids[labels[i] * d..(labels[i] + 1) * d])))
            .fold(None, |acc: Option<(usize, f64)>, (i, dist)| match acc {
                Some((_, best)) if best >= dist => acc,
                _ => Some((i, dist)),
            });
        if let Some((i, _)) = far {
            sizes[labels[i]] -= 1;
            labels[i] = empty;
            sizes[empty] = 1;
        }
    }
    let mut sums = vec![0.0; k * d];
    for (i, &c) in labels.iter().enumerate() {
        for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(x.row(i)) {
            *s += v;
        }
    }
    for c in 0..k {
        if sizes[c] > 0 {
            for j in 0..d {
                centroids[c * d + j] = sums[c * d + j] / sizes[c] as f64;
            }
        }
    }
}

/// Newman modularity `sum_c [e_c / m - (a_c / 2m)^2]` of a vertex labelling.
pub fn modularity(graph: &Graph, labels: &[usize]) -> Result<f64> {
    if labels.len() != graph.n_vertices() {
        return Err(Error::DimensionMismatch {
            op: "modularity",
            expected: graph.n_vertices(),
            found: labels.len(),
        });
    }
    let m = graph.n_edges();
    if m == 0 {
        return Err(invalid("modularity is undefined for a graph without edges"));
    }
    let mut intra: HashMap<usize, f64> = HashMap::new();
    let mut degree: HashMap<usize, f64> = HashMap::new();
    for &(u, v) in graph.edges() {
        if labels[u] == labels[v] {
            *intra.entry(labels[u]).or_default() += 1.0;
        }
        *degree.entry(labels[u]).or_default() += 1.0;
        *degree.entry(labels[v]).or_default() += 1.0;
    }
    let m = m as f64;
    let mut keys: Vec<usize> = degree.keys().copied().collect();
    keys.sort_unstable();
    Ok(keys
        .iter()
        .map(|c| intra.get(c).copied().unwrap_or(0.0) / m - (degree[c] / (2.0 * m)).powi(2))
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    pub modularities: Vec<f64>,
    pub inertias: Vec<f64>,
    /// Median modularity; for an even run count, the lower middle value.
    pub median_modularity: f64,
    pub median_run: usize,
    #[serde(skip)]
    pub median_labels: Vec<usize>,
}

/// `runs` seeded K-means instances on the rows of `x`, each scored on `graph`.
pub fn cluster_embedding(
    x: &DenseBlock<f64>,
    graph: &Graph,
    k: usize,
    runs: usize,
    max_iters: usize,
    seed: u64,
) -> Result<ExperimentSummary> {
    if runs == 0 {
        return Err(invalid("at least one clustering run is required"));
    }
    let results: Vec<(ClusterAssignment, f64)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let a = kmeans(x, k, max_iters, seed, r as u64)?;
            let q = modularity(graph, &a.labels)?;
            Ok((a, q))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..runs).collect();
    order.sort_by(|&a, &b| results[a].1.total_cmp(&results[b].1).then(a.cmp(&b)));
    let median_run = order[(runs - 1) / 2];
    Ok(ExperimentSummary {
        k,
        runs,
        seed,
        modularities: results.iter().map(|r| r.1).collect(),
        inertias: results.iter().map(|r| r.0.inertia).collect(),
        median_modularity: results[median_run].1,
        median_run,
        median_labels: results[median_run].0.labels.clone(),
    })
}

/// Normalized adjacency, compressive embedding, then [`cluster_embedding`].
pub fn cluster_experiment(
    graph: &Graph,
    f: &SpectralFunction<f64>,
    cfg: &EmbedConfig,
    k: usize,
    runs: usize,
) -> Result<ExperimentSummary> {
    let s = graph.normalized_adjacency::<f64>();
    let omega = sample_projection(graph.n_vertices(), cfg.dim, cfg.seed);
    let e = fast_embed_cascaded(&s, f, cfg, &omega)?;
    cluster_embedding(&e.data, graph, k, runs, DEFAULT_MAX_ITERS, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{erdos_renyi, gaussian_matrix};
    use rand::seq::SliceRandom;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn modularity_hand_values() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!((modularity(&tri, &[0, 1, 2]).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!(modularity(&tri, &[4, 4, 4]).unwrap().abs() < 1e-15);
        let two = graph(4, &[(0, 1), (2, 3)]);
        assert!((modularity(&two, &[0, 0, 1, 1]).unwrap() - 0.5).abs() < 1e-15);
        assert!(modularity(&graph(3, &[]), &[0, 0, 0]).is_err());
        assert!(modularity(&tri, &[0, 0]).is_err());
    }

    #[test]
    fn modularity_ignores_label_names() {
        let g = erdos_renyi(200, 0.05, 1).unwrap();
        let labels: Vec<usize> = (0..200).map(|i| i % 7).collect();
        let renamed: Vec<usize> = labels.iter().map(|&c| [5, 9, 0, 2, 11, 3, 1][c]).collect();
        let a = modularity(&g, &labels).unwrap();
        assert!((a - modularity(&g, &renamed).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn random_labels_on_random_graph_score_near_zero() {
        let g = erdos_renyi(2000, 0.005, 2).unwrap();
        let mut labels: Vec<usize> = (0..2000).map(|i| i % 10).collect();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
        assert!(modularity(&g, &labels).unwrap().abs() <= 0.05);
    }

    #[test]
    fn separated_groups_are_recovered() {
        let mut rows = Vec::new();
        for i in 0..20 {
            let off = if i < 10 { 0.0 } else { 100.0 };
            rows.push(vec![off + (i % 3) as f64 * 0.1, off - (i % 4) as f64 * 0.1]);
        }
        let x = DenseBlock::from_rows(&rows).unwrap();
        let a = kmeans(&x, 2, 50, 7, 0).unwrap();
        assert!(a.labels[..10].iter().all(|&l| l == a.labels[0]));
        assert!(a.labels[10..].iter().all(|&l| l == a.labels[10]));
        assert_ne!(a.labels[0], a.labels[10]);
    }

    #[test]
    fn k_equal_n_has_zero_inertia() {
        let x = gaussian_matrix(15, 3, 1);
        assert_eq!(kmeans(&x, 15, 10, 0, 0).unwrap().inertia, 0.0);
        assert!(kmeans(&x, 16, 10, 0, 0).is_err());
    }

    #[test]
    fn inertia_never_increases_and_runs_repeat() {
        let x = gaussian_matrix(300, 4, 5);
        for run in 0..5 {
            let a = kmeans(&x, 12, 100, 11, run).unwrap();
            for w in a.inertia_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", a.inertia_history);
            }
            assert_eq!(a, kmeans(&x, 12, 100, 11, run).unwrap());
            assert!(a.labels.iter().all(|&l| l < 12));
        }
    }

    #[test]
    fn duplicate_rows_still_fill_every_cluster() {
        let x = DenseBlock::from_rows(&vec![vec![1.0, 1.0]; 6]).unwrap();
        let a = kmeans(&x, 3, 10, 0, 0).unwrap();
        assert_eq!(a.inertia, 0.0);
    }

    #[test]
    fn single_run_matches_kmeans() {
        let g = erdos_renyi(100, 0.1, 4).unwrap();
        let x = gaussian_matrix(100, 3, 6);
        let s = cluster_embedding(&x, &g, 4, 1, 50, 9).unwrap();
        let a = kmeans(&x, 4, 50, 9, 0).unwrap();
        assert_eq!(s.median_labels, a.labels);
        assert_eq!(s.median_modularity, modularity(&g, &a.labels).unwrap());
    }
}

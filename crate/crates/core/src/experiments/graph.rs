//! Overlap graphs of inverses at geometric scales and their independence numbers.

use serde::{Deserialize, Serialize};

use super::support::{collect, line_sampler, measure, nonincreasing, quantile};
use super::{check_gamma, check_positive, check_replicas, params, Outcome, Series, Verdict};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, par_map};
use crate::stattest::slope_fit;

/// Scale parameters: δ_k = ρ^k, a_k = ρ^{r_a}·δ_k, b_k = ρ^{r_b}·δ_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub rho_star: f64,
    pub r_a: f64,
    pub r_b: f64,
}

impl GapParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_star > 0.0 && self.rho_star < 1.0) {
            return Err(Error::Config(format!(
                "rho_star must lie in (0,1), got {}",
                self.rho_star
            )));
        }
        if !(self.r_a > 0.0 && self.r_b > self.r_a) {
            return Err(Error::Config("need 0 < r_a < r_b so that a_k > b_k".into()));
        }
        Ok(())
    }

    pub fn delta(&self, k: usize) -> f64 {
        self.rho_star.powi(k as i32)
    }

    pub fn rho_a(&self) -> f64 {
        self.rho_star.powf(self.r_a)
    }

    pub fn rho_b(&self) -> f64 {
        self.rho_star.powf(self.r_b)
    }

    pub fn a(&self, k: usize) -> f64 {
        self.rho_a() * self.delta(k)
    }

    pub fn b(&self, k: usize) -> f64 {
        self.rho_b() * self.delta(k)
    }
}

/// Simple undirected graph on scales `first..first+n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapGraph {
    pub first: usize,
    pub adjacency: Vec<Vec<bool>>,
}

impl GapGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i != j {
                adjacency[i][j] = true;
                adjacency[j][i] = true;
            }
        }
        GapGraph {
            first: 0,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency
            .iter()
            .map(|row| row.iter().filter(|&&e| e).count())
            .collect()
    }

    fn masks(&self) -> Vec<u64> {
        self.adjacency
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &e)| e)
                    .fold(0u64, |m, (j, _)| m | (1 << j))
            })
            .collect()
    }
}

/// Overlap graph for one realization bundle.
///
/// `qa[i]` and `qb[i]` are Q^k(a_k) and Q^k(b_k) for scale k = first + i.
/// Scales k < m are joined when Q^k(a_k) − Q^m(b_m) ≤ δ_m.
pub fn build_gap_graph(
    params: &GapParams,
    first: usize,
    qa: &[f64],
    qb: &[f64],
) -> Result<GapGraph> {
    if qa.len() != qb.len() {
        return Err(Error::LengthMismatch {
            left: qa.len(),
            right: qb.len(),
        });
    }
    if qa.len() < 2 {
        return Err(Error::Config(
            "a gap graph needs at least two scales".into(),
        ));
    }
    let n = qa.len();
    let mut adjacency = vec![vec![false; n]; n];
    for k in 0..n {
        for m in k + 1..n {
            let overlap = qa[k] - qb[m] <= params.delta(first + m);
            adjacency[k][m] = overlap;
            adjacency[m][k] = overlap;
        }
    }
    Ok(GapGraph { first, adjacency })
}

/// Independence number and its lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceStats {
    /// Exact α for graphs with at most 30 vertices, greedy otherwise.
    pub alpha: usize,
    pub exact: bool,
    pub greedy: usize,
    /// Σ 1/(d(v) + 1).
    pub caro_wei: f64,
    /// N/(1 + d̄).
    pub avg_degree_bound: f64,
    /// N/(Δ + 1).
    pub max_degree_bound: f64,
}

pub fn independence_stats(graph: &GapGraph) -> IndependenceStats {
    let n = graph.len();
    let deg = graph.degrees();
    let caro_wei = deg.iter().map(|&d| 1.0 / (d as f64 + 1.0)).sum();
    let avg = deg.iter().sum::<usize>() as f64 / n.max(1) as f64;
    let max = deg.iter().copied().max().unwrap_or(0);
    let greedy = greedy_independent(graph);
    let exact = n <= 30;
    let alpha = if exact { exact_alpha(graph) } else { greedy };
    IndependenceStats {
        alpha,
        exact,
        greedy,
        caro_wei,
        avg_degree_bound: n as f64 / (1.0 + avg),
        max_degree_bound: n as f64 / (max as f64 + 1.0),
    }
}

/// Repeatedly takes a vertex of minimum remaining degree and deletes its
/// closed neighbourhood; the result is at least the Caro–Wei sum.
fn greedy_independent(graph: &GapGraph) -> usize {
    let n = graph.len();
    let mut alive = vec![true; n];
    let mut size = 0;
    loop {
        let pick = (0..n).filter(|&v| alive[v]).min_by_key(|&v| {
            (0..n)
                .filter(|&u| alive[u] && graph.adjacency[v][u])
                .count()
        });
        let Some(v) = pick else { break };
        size += 1;
        alive[v] = false;
        for (a, &edge) in alive.iter_mut().zip(&graph.adjacency[v]) {
            if edge {
                *a = false;
            }
        }
    }
    size
}

fn exact_alpha(graph: &GapGraph) -> usize {
    fn search(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let rest = cand & !(1 << v);
        search(adj, rest & !adj[v], size + 1, best);
        if adj[v] & cand != 0 {
            search(adj, rest, size, best);
        }
    }
    let adj = graph.masks();
    let all = if graph.len() == 64 {
        u64::MAX
    } else {
        (1u64 << graph.len()) - 1
    };
    let mut best = 0;
    search(&adj, all, 0, &mut best);
    best
}

params! {
    /// Frequency of α(G) < c_gap·N for overlap graphs on N consecutive scales.
    Decoupling {
        gamma: f64 = 0.5,
        epsilon_ratio: f64 = 1.0 / 128.0,
        rho_star: f64 = 0.5,
        r_a: f64 = 0.25,
        r_b: f64 = 0.75,
        sizes: Vec<usize> = vec![6, 9, 12],
        replicas: usize = 500,
        c_gap: f64 = 0.5,
        span: f64 = 6.0,
    }
}

impl Decoupling {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        super::check_unit_ratio("epsilon_ratio", self.epsilon_ratio)?;
        check_positive("c_gap", self.c_gap)?;
        check_positive("span", self.span)?;
        check_replicas(self.replicas)?;
        self.gap().validate()?;
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| !(2..=30).contains(&n)) {
            return Err(Error::Config("graph sizes must lie in 2..=30".into()));
        }
        Ok(())
    }

    pub fn gap(&self) -> GapParams {
        GapParams {
            rho_star: self.rho_star,
            r_a: self.r_a,
            r_b: self.r_b,
        }
    }

    /// Graph statistics for every replica at size `n`, together with the graphs.
    ///
    /// Each scale gets its own realization; Q^k(y) is sampled as δ_k·Q¹(y/δ_k).
    pub fn sample_graphs(&self, n: usize, seed: u64) -> Result<Vec<GapGraph>> {
        let gap = self.gap();
        let sampler = line_sampler(self.gamma, 1.0, self.epsilon_ratio, self.span)?;
        let s = derive_seed(seed, n as u64);
        collect(par_map(self.replicas, |r| {
            let mut qa = Vec::with_capacity(n);
            let mut qb = Vec::with_capacity(n);
            for i in 0..n {
                let m = measure(&sampler, s, r * n + i);
                let d = gap.delta(i + 1);
                qa.push(d * quantile(&m, gap.rho_a())?);
                qb.push(d * quantile(&m, gap.rho_b())?);
            }
            build_gap_graph(&gap, 1, &qa, &qb)
        }))
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut verdict = Verdict::new(
            "decoupling",
            "P(α(G) < c_gap·N) is nonincreasing in N; overlaps become rarer with scale separation",
        );
        let mut freq = Series::new(
            "decoupling",
            &["N", "small_alpha_frequency", "mean_alpha", "mean_caro_wei"],
        );
        let mut overlaps = Series::new("overlap_frequency", &["separation", "frequency"]);
        let mut ordering = true;
        let mut freqs = Vec::new();
        let mut log_freqs = Vec::new();
        let mut largest = Vec::new();
        for &n in &self.sizes {
            let graphs = self.sample_graphs(n, seed)?;
            let stats: Vec<IndependenceStats> = graphs.iter().map(independence_stats).collect();
            for s in &stats {
                ordering &= s.alpha >= s.greedy
                    && s.greedy as f64 >= s.caro_wei - 1e-12
                    && s.caro_wei >= s.avg_degree_bound - 1e-12
                    && s.avg_degree_bound >= s.max_degree_bound - 1e-12;
            }
            let small = stats
                .iter()
                .filter(|s| (s.alpha as f64) < self.c_gap * n as f64)
                .count();
            let r = stats.len() as f64;
            let f = small as f64 / r;
            let mean_alpha = stats.iter().map(|s| s.alpha as f64).sum::<f64>() / r;
            let mean_cw = stats.iter().map(|s| s.caro_wei).sum::<f64>() / r;
            freq.push(vec![n as f64, f, mean_alpha, mean_cw]);
            verdict.value(format!("N={n} P(alpha < c N)"), f);
            freqs.push(f);
            log_freqs.push(((small as f64 + 0.5) / (r + 1.0)).ln());
            largest = graphs;
        }
        verdict.check(
            "alpha >= greedy >= Caro-Wei >= N/(1+avg d) >= N/(1+max d) on every graph",
            ordering,
        );
        verdict.check(
            "P(alpha < c N) nonincreasing in N",
            nonincreasing(&freqs, 0.0),
        );
        if self.sizes.len() >= 3 {
            let ns: Vec<f64> = self.sizes.iter().map(|&n| n as f64).collect();
            let fit = slope_fit(&ns, &log_freqs)?;
            verdict.value("log-frequency slope", fit.slope);
            verdict.check("log-frequency slope <= 0", fit.slope <= 0.0);
        }
        // overlap frequency of the first scale with scale 1 + m
        let r = largest.len() as f64;
        let n = largest.first().map_or(0, |g| g.len());
        let mut ov = Vec::new();
        for m in 1..n {
            let hits = largest.iter().filter(|g| g.adjacency[0][m]).count() as f64;
            ov.push(hits / r);
            overlaps.push(vec![m as f64, hits / r]);
        }
        // allow Monte Carlo noise of three binomial standard errors between neighbours
        let decreasing = ov.windows(2).all(|w| {
            let se = ((w[0] * (1.0 - w[0]) + w[1] * (1.0 - w[1])) / r).sqrt();
            w[1] <= w[0] + 3.0 * se
        });
        verdict.check("overlap frequency nonincreasing in separation", decreasing);
        verdict.degenerate = self.gamma == 0.0;
        Ok(Outcome {
            verdict,
            series: vec![freq, overlaps],
        })
    }
}

//! Sampling-set objectives, greedy selection and representative partitions.
//!
//! The exact objective is the `|S|`-th smallest frequency of the adaptive
//! transform, `λ_{|S|}`, to be minimized. Because
//! `σ_min(Q_S^{-1/2} M_SSᶜ Q_Sᶜ^{-1/2}) = 1 − λ_{|S|}`, replacing `Q⁻¹` by a
//! Neumann partial sum (order 0: `D⁻¹`) gives a cheaper surrogate to maximize.
//! Internally every objective is turned into a score where larger is better
//! (`1 − λ_{|S|}` for the exact one), and candidates are compared by
//! `(score, lowest vertex id)` so parallel and serial runs pick the same vertex.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gft::{compute_fixed_gft, sf_frequencies, SamplingSet, VariationOperator};
use crate::linalg;
use crate::rng::{item_rng, streams};

/// Limit on the number of subsets enumerated by [`brute_force_select`].
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Objective {
    /// `λ_{|S|}` of `(M, Q(S))`, minimized.
    Exact,
    /// `σ_min(D_S^{-1/2} M_SSᶜ D_Sᶜ^{-1/2})`, maximized.
    #[default]
    ApproxZeroOrder,
    /// As above with `D⁻¹` replaced by the order-`k` Neumann partial sum of `Q⁻¹`.
    ApproxNeumann(usize),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Exact => write!(f, "exact"),
            Objective::ApproxZeroOrder => write!(f, "approx0"),
            Objective::ApproxNeumann(k) => write!(f, "neumann:{k}"),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Objective::Exact),
            "approx0" => Ok(Objective::ApproxZeroOrder),
            other => {
                let order = other
                    .strip_prefix("neumann:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!("unknown objective '{other}' (expected exact, approx0 or neumann:<k>)"))
                    })?;
                Ok(if order == 0 {
                    Objective::ApproxZeroOrder
                } else {
                    Objective::ApproxNeumann(order)
                })
            }
        }
    }
}

impl TryFrom<String> for Objective {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Objective> for String {
    fn from(o: Objective) -> Self {
        o.to_string()
    }
}

impl Objective {
    /// Natural value: `λ_{|S|}` for `Exact`, the singular value otherwise.
    pub fn value(&self, m: &VariationOperator, set: &SamplingSet) -> Result<f64> {
        match *self {
            Objective::Exact => exact_objective(m, set),
            Objective::ApproxZeroOrder => approx_objective(m, set, 0),
            Objective::ApproxNeumann(k) => approx_objective(m, set, k),
        }
    }

    /// Larger is better.
    pub fn score(&self, m: &VariationOperator, set: &SamplingSet) -> Result<f64> {
        let v = self.value(m, set)?;
        Ok(match self {
            Objective::Exact => 1.0 - v,
            _ => v,
        })
    }
}

/// `λ_{|S|}`, the largest frequency below 1 under the full-rank coupling condition.
pub fn exact_objective(m: &VariationOperator, set: &SamplingSet) -> Result<f64> {
    set.check_selectable()?;
    let lambdas = sf_frequencies(m, set)?;
    Ok(lambdas[set.len() - 1])
}

/// `σ_min(P_S^{1/2} M_SSᶜ P_Sᶜ^{1/2})` with `P` the order-`order` Neumann
/// approximation of `Q⁻¹` on each block.
pub fn approx_objective(m: &VariationOperator, set: &SamplingSet, order: usize) -> Result<f64> {
    if set.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: set.n(),
        });
    }
    let mm = m.matrix();
    if let Some(i) = (0..m.n()).find(|&i| mm[(i, i)] <= 0.0) {
        return Err(Error::InvalidConfig(format!("diagonal entry {i} is not positive")));
    }
    let coupling = linalg::submatrix(mm, set.indices(), set.complement());
    if order == 0 {
        let scaled = DMatrix::from_fn(coupling.nrows(), coupling.ncols(), |a, b| {
            let i = set.indices()[a];
            let j = set.complement()[b];
            coupling[(a, b)] / (mm[(i, i)] * mm[(j, j)]).sqrt()
        });
        return Ok(linalg::sigma_min(&scaled));
    }
    let root_s = neumann_inverse_sqrt(mm, set.indices(), order)?;
    let root_c = neumann_inverse_sqrt(mm, set.complement(), order)?;
    Ok(linalg::sigma_min(&(root_s * coupling * root_c)))
}

/// Symmetric square root of `D^{-1/2} (Σ_{j≤k} Bʲ) D^{-1/2}`, `B = D^{-1/2} W D^{-1/2}`,
/// for the principal block `idx`.
fn neumann_inverse_sqrt(mm: &DMatrix<f64>, idx: &[usize], order: usize) -> Result<DMatrix<f64>> {
    let d = idx.len();
    let inv_sqrt: Vec<f64> = idx.iter().map(|&i| 1.0 / mm[(i, i)].sqrt()).collect();
    // B = I − D^{-1/2} M D^{-1/2}
    let b = DMatrix::from_fn(d, d, |a, c| {
        if a == c {
            0.0
        } else {
            -mm[(idx[a], idx[c])] * inv_sqrt[a] * inv_sqrt[c]
        }
    });
    if d > 1 {
        let radius = linalg::symmetric_eigenvalues_sorted(&b)?
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if radius >= 1.0 {
            log::warn!("Neumann series may diverge: spectral radius {radius:.4} >= 1");
        }
    }
    let mut term = DMatrix::identity(d, d);
    let mut sum = DMatrix::identity(d, d);
    for _ in 0..order {
        term = &term * &b;
        sum += &term;
    }
    let p = DMatrix::from_fn(d, d, |a, c| sum[(a, c)] * inv_sqrt[a] * inv_sqrt[c]);
    let p = (&p + p.transpose()) * 0.5;
    let (root, clipped) = linalg::symmetric_sqrt(&p)?;
    if clipped > 0 {
        log::warn!("Neumann partial sum of order {order} is indefinite; clipped {clipped} eigenvalues");
    }
    Ok(root)
}

/// Picks the candidate with the highest score; ties and NaNs resolve to the
/// earliest candidate in `candidates`.
fn best_candidate<F>(candidates: &[usize], score: F) -> Result<(usize, f64)>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let scores: Vec<f64> = candidates.par_iter().map(|&q| score(q)).collect::<Result<_>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (&q, &s) in candidates.iter().zip(scores.iter()) {
        let s = if s.is_nan() { f64::NEG_INFINITY } else { s };
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((q, s)),
        }
    }
    best.ok_or_else(|| Error::InfeasibleSize("no candidates left".into()))
}

fn with_candidate(base: &[usize], q: usize, n: usize) -> Result<SamplingSet> {
    let mut idx = Vec::with_capacity(base.len() + 1);
    idx.extend_from_slice(base);
    idx.push(q);
    SamplingSet::new(idx, n)
}

/// One greedy step: the set after the step and the objective's natural value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    pub vertex: usize,
    pub value: f64,
}

/// Greedy growth of `S` to `size` vertices, recording the value after each step.
pub fn greedy_select_traced(
    m: &VariationOperator,
    size: usize,
    objective: Objective,
) -> Result<(SamplingSet, Vec<GreedyStep>)> {
    let n = m.n();
    if size == 0 || 2 * size > n {
        return Err(Error::InfeasibleSize(format!("target size {size} must be in [1, n/2] for n = {n}")));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    let mut taken = vec![false; n];
    let mut steps = Vec::with_capacity(size);
    for _ in 0..size {
        let candidates: Vec<usize> = (0..n).filter(|&q| !taken[q]).collect();
        let (q, score) = best_candidate(&candidates, |q| objective.score(m, &with_candidate(&chosen, q, n)?))?;
        chosen.push(q);
        taken[q] = true;
        let value = match objective {
            Objective::Exact => 1.0 - score,
            _ => score,
        };
        steps.push(GreedyStep { vertex: q, value });
    }
    Ok((SamplingSet::new(chosen, n)?, steps))
}

pub fn greedy_select(m: &VariationOperator, size: usize, objective: Objective) -> Result<SamplingSet> {
    greedy_select_traced(m, size, objective).map(|(s, _)| s)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive optimum over all subsets of `size` vertices; the
/// lexicographically first subset wins ties. Returns the set and its natural value.
pub fn brute_force_select(m: &VariationOperator, size: usize, objective: Objective) -> Result<(SamplingSet, f64)> {
    let n = m.n();
    if size == 0 || size >= n {
        return Err(Error::InfeasibleSize(format!("subset size {size} invalid for n = {n}")));
    }
    let count = binomial(n, size);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut subsets = Vec::with_capacity(count as usize);
    let mut comb: Vec<usize> = (0..size).collect();
    loop {
        subsets.push(comb.clone());
        let Some(pos) = (0..size).rev().find(|&i| comb[i] < n - size + i) else {
            break;
        };
        comb[pos] += 1;
        for i in (pos + 1)..size {
            comb[i] = comb[i - 1] + 1;
        }
    }
    let scores: Vec<f64> = subsets
        .par_iter()
        .map(|idx| objective.score(m, &SamplingSet::new(idx.clone(), n)?))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let set = SamplingSet::new(subsets.swap_remove(best), n)?;
    let value = objective.value(m, &set)?;
    Ok((set, value))
}

/// How a partition was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<usize>,
}

/// Disjoint cover of the vertex set by `p` sampling subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    n: usize,
    subsets: Vec<SamplingSet>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    p: usize,
    n: usize,
    subsets: Vec<Vec<usize>>,
    provenance: Provenance,
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            p: p.subsets.len(),
            n: p.n,
            subsets: p.subsets.iter().map(|s| s.indices().to_vec()).collect(),
            provenance: p.provenance,
        }
    }
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        if r.p != r.subsets.len() {
            return Err(Error::InvalidConfig(format!("p = {} but {} subsets listed", r.p, r.subsets.len())));
        }
        Partition::new(r.n, r.subsets, r.provenance)
    }
}

impl Partition {
    /// Checks disjointness, cover and balance (sizes within one of each other).
    pub fn new(n: usize, subsets: Vec<Vec<usize>>, provenance: Provenance) -> Result<Self> {
        if subsets.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut owner = vec![None; n];
        for (j, s) in subsets.iter().enumerate() {
            for &v in s {
                if v >= n {
                    return Err(Error::InvalidConfig(format!("vertex {v} out of range for n = {n}")));
                }
                if let Some(prev) = owner[v] {
                    return Err(Error::InvalidConfig(format!("vertex {v} in subsets {prev} and {j}")));
                }
                owner[v] = Some(j);
            }
        }
        if let Some(v) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidConfig(format!("vertex {v} not covered")));
        }
        let sizes = subsets.iter().map(Vec::len);
        let (lo, hi) = sizes.fold((usize::MAX, 0), |(lo, hi), s| (lo.min(s), hi.max(s)));
        if hi - lo > 1 {
            return Err(Error::InvalidConfig(format!("unbalanced subsets: sizes between {lo} and {hi}")));
        }
        let subsets = subsets
            .into_iter()
            .map(|s| SamplingSet::new(s, n))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            subsets,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[SamplingSet] {
        &self.subsets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

fn check_partition_args(n: usize, p: usize) -> Result<()> {
    if p < 2 {
        return Err(Error::InfeasibleSize(format!("p = {p}; need at least two subsets")));
    }
    if p > n {
        return Err(Error::InfeasibleSize(format!("p = {p} exceeds n = {n}")));
    }
    Ok(())
}

/// Round-robin greedy partitioning: step `i = 1..=n` extends subset `i mod p`
/// with the unassigned vertex scoring best for that subset.
fn round_robin_greedy<F>(n: usize, p: usize, score: F) -> Result<Vec<Vec<usize>>>
where
    F: Fn(&[usize], usize) -> Result<f64> + Sync,
{
    let mut subsets: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut taken = vec![false; n];
    for i in 1..=n {
        let target = i % p;
        let candidates: Vec<usize> = (0..n).filter(|&q| !taken[q]).collect();
        let q = if candidates.len() == 1 {
            candidates[0]
        } else {
            let current = &subsets[target];
            best_candidate(&candidates, |q| score(current, q))?.0
        };
        subsets[target].push(q);
        taken[q] = true;
    }
    Ok(subsets)
}

/// Greedy representative sampling subset partitioning.
pub fn partition_greedy(m: &VariationOperator, p: usize, objective: Objective) -> Result<Partition> {
    let n = m.n();
    check_partition_args(n, p)?;
    let subsets = round_robin_greedy(n, p, |current, q| objective.score(m, &with_candidate(current, q, n)?))?;
    Partition::new(
        n,
        subsets,
        Provenance {
            algorithm: "greedy".into(),
            objective: Some(objective.to_string()),
            seed: None,
            bandwidth: None,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Baseline {
    /// Seeded shuffle dealt round-robin.
    Random { seed: u64 },
    /// Round-robin greedy scoring `σ_min` of the first `bandwidth` `(M, I)`-GFT
    /// eigenvector rows restricted to the candidate subset.
    FixedGftGreedy { bandwidth: usize },
}

pub fn partition_baseline(m: &VariationOperator, p: usize, kind: Baseline) -> Result<Partition> {
    let n = m.n();
    check_partition_args(n, p)?;
    match kind {
        Baseline::Random { seed } => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut item_rng(seed, streams::PARTITION, 0));
            let mut subsets = vec![Vec::new(); p];
            for (i, v) in order.into_iter().enumerate() {
                subsets[(i + 1) % p].push(v);
            }
            Partition::new(
                n,
                subsets,
                Provenance {
                    algorithm: "random".into(),
                    objective: None,
                    seed: Some(seed),
                    bandwidth: None,
                },
            )
        }
        Baseline::FixedGftGreedy { bandwidth } => {
            if bandwidth == 0 || bandwidth > n {
                return Err(Error::InfeasibleSize(format!("bandwidth {bandwidth} invalid for n = {n}")));
            }
            let gft = compute_fixed_gft(m)?;
            let leading = gft.leading(bandwidth);
            let subsets = round_robin_greedy(n, p, |current, q| {
                let mut rows = current.to_vec();
                rows.push(q);
                Ok(linalg::sigma_min(&linalg::select_rows(&leading, &rows)))
            })?;
            Partition::new(
                n,
                subsets,
                Provenance {
                    algorithm: "fixed-gft-greedy".into(),
                    objective: Some("sigma_min(U_SK)".into()),
                    seed: None,
                    bandwidth: Some(bandwidth),
                },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> VariationOperator {
        VariationOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap()
    }

    fn path(n: usize, ridge: f64) -> VariationOperator {
        let w = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
        VariationOperator::laplacian(&w).unwrap().with_ridge(ridge)
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("exact".parse::<Objective>().unwrap(), Objective::Exact);
        assert_eq!("approx0".parse::<Objective>().unwrap(), Objective::ApproxZeroOrder);
        assert_eq!("neumann:0".parse::<Objective>().unwrap(), Objective::ApproxZeroOrder);
        assert_eq!("neumann:4".parse::<Objective>().unwrap(), Objective::ApproxNeumann(4));
        assert!("neumann:x".parse::<Objective>().is_err());
        assert_eq!(Objective::ApproxNeumann(3).to_string(), "neumann:3");
    }

    #[test]
    fn exact_objective_two_node() {
        let s = SamplingSet::new(vec![0], 2).unwrap();
        assert!(exact_objective(&two_node(), &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn exact_objective_without_coupling_is_one() {
        // two disconnected triangles; S is one of them minus nothing crossing
        let mut w = DMatrix::zeros(6, 6);
        for (i, j) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            w[(i, j)] = 1.0;
            w[(j, i)] = 1.0;
        }
        let m = VariationOperator::laplacian(&w).unwrap().with_ridge(0.1);
        let s = SamplingSet::new(vec![0, 1, 2], 6).unwrap();
        assert!((exact_objective(&m, &s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_objective_rejects_oversized_set() {
        let s = SamplingSet::new(vec![0, 1, 2], 4).unwrap();
        assert!(matches!(exact_objective(&path(4, 0.1), &s), Err(Error::InfeasibleSize(_))));
    }

    #[test]
    fn zero_order_is_exact_when_blocks_are_diagonal() {
        // bipartite coupling only: S = even vertices of a path has no internal edges
        let m = path(6, 0.3);
        let s = SamplingSet::new(vec![0, 2, 4], 6).unwrap();
        let exact = exact_objective(&m, &s).unwrap();
        let approx = approx_objective(&m, &s, 0).unwrap();
        assert!((approx - (1.0 - exact)).abs() < 1e-12);
    }

    #[test]
    fn neumann_order_converges_to_exact_relation() {
        let m = path(7, 1.5);
        let s = SamplingSet::new(vec![1, 2, 5], 7).unwrap();
        let target = 1.0 - exact_objective(&m, &s).unwrap();
        let errs: Vec<f64> = [0, 2, 8, 60]
            .iter()
            .map(|&k| (approx_objective(&m, &s, k).unwrap() - target).abs())
            .collect();
        assert!(errs[3] < 1e-6, "{errs:?}");
        assert!(errs[3] < errs[0]);
    }

    #[test]
    fn greedy_single_vertex_matches_enumeration() {
        // star-like: vertex 3 has high degree
        let mut w = DMatrix::zeros(6, 6);
        for (i, j, v) in [(3, 0, 1.0), (3, 1, 2.0), (3, 2, 1.0), (3, 4, 0.5), (3, 5, 1.5), (0, 1, 0.3), (4, 5, 0.2)] {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        let m = VariationOperator::laplacian(&w).unwrap().with_ridge(0.05);
        let mm = m.matrix();
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for v in 0..6 {
            // 1 × (n−1) row: σ_min is its Euclidean norm
            let row_norm = (0..6)
                .filter(|&j| j != v)
                .map(|j| mm[(v, j)].powi(2) / (mm[(v, v)] * mm[(j, j)]))
                .sum::<f64>()
                .sqrt();
            if row_norm > best.1 {
                best = (v, row_norm);
            }
        }
        let s = greedy_select(&m, 1, Objective::ApproxZeroOrder).unwrap();
        assert_eq!(s.indices(), &[best.0]);
    }

    #[test]
    fn greedy_two_node_tie_breaks_to_lowest_index() {
        let s = greedy_select(&two_node(), 1, Objective::Exact).unwrap();
        assert_eq!(s.indices(), &[0]);
        assert!(greedy_select(&two_node(), 2, Objective::Exact).is_err());
    }

    #[test]
    fn brute_force_on_path_and_cycle() {
        let m = path(4, 0.2);
        let (s, v) = brute_force_select(&m, 1, Objective::Exact).unwrap();
        let mut enumerated: Vec<(f64, usize)> = (0..4)
            .map(|q| (exact_objective(&m, &SamplingSet::new(vec![q], 4).unwrap()).unwrap(), q))
            .collect();
        enumerated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        assert_eq!(s.indices(), &[enumerated[0].1]);
        assert_eq!(v, enumerated[0].0);

        let w = DMatrix::from_fn(4, 4, |i, j| if (i + 1) % 4 == j || (j + 1) % 4 == i { 1.0 } else { 0.0 });
        let cycle = VariationOperator::laplacian(&w).unwrap().with_ridge(0.1);
        let (s, _) = brute_force_select(&cycle, 1, Objective::ApproxZeroOrder).unwrap();
        assert_eq!(s.indices(), &[0]);
    }

    #[test]
    fn brute_force_size_limit() {
        let m = path(40, 0.1);
        assert!(matches!(
            brute_force_select(&m, 20, Objective::ApproxZeroOrder),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn partition_with_p_equal_n_is_singletons() {
        let m = path(5, 0.1);
        let part = partition_greedy(&m, 5, Objective::ApproxZeroOrder).unwrap();
        assert!(part.subsets().iter().all(|s| s.len() == 1));
        assert!(partition_greedy(&m, 1, Objective::ApproxZeroOrder).is_err());
        assert!(partition_greedy(&m, 6, Objective::ApproxZeroOrder).is_err());
    }

    #[test]
    fn random_partition_is_reproducible() {
        let m = path(11, 0.1);
        let a = partition_baseline(&m, 3, Baseline::Random { seed: 9 }).unwrap();
        let b = partition_baseline(&m, 3, Baseline::Random { seed: 9 }).unwrap();
        let c = partition_baseline(&m, 3, Baseline::Random { seed: 10 }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn fixed_gft_greedy_prefers_high_leverage_rows() {
        // identity operator: U = I, first K columns are unit vectors e_0..e_{K-1}
        let m = VariationOperator::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
        ])))
        .unwrap();
        let part = partition_baseline(&m, 2, Baseline::FixedGftGreedy { bandwidth: 2 }).unwrap();
        // subset 1 moves first and takes the first unit row; subset 0 the second
        assert_eq!(part.subsets()[1].indices()[0], 0);
        assert_eq!(part.subsets()[0].indices()[0], 1);
    }

    #[test]
    fn partition_json_roundtrip_and_validation() {
        let m = path(7, 0.1);
        let part = partition_greedy(&m, 3, Objective::ApproxZeroOrder).unwrap();
        let json = serde_json::to_string(&part).unwrap();
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, part);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        let overlapping = r#"{"p":2,"n":3,"subsets":[[0,1],[1,2]],"provenance":{"algorithm":"x"}}"#;
        assert!(serde_json::from_str::<Partition>(overlapping).is_err());
        let uncovered = r#"{"p":2,"n":4,"subsets":[[0],[1,2]],"provenance":{"algorithm":"x"}}"#;
        assert!(serde_json::from_str::<Partition>(uncovered).is_err());
    }
}

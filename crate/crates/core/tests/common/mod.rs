#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sfgft::gft::{SamplingSet, VariationOperator};
use sfgft::linalg;
use sfgft::rng::item_rng;

/// Random connected weighted graph: a random spanning tree plus extra edges,
/// weights in [0.1, 2], Laplacian plus a ridge in [0.01, 0.1].
pub fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> VariationOperator {
    let mut w = DMatrix::zeros(n, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        let v = order[k];
        let wt = rng.random_range(0.1..2.0);
        w[(parent, v)] = wt;
        w[(v, parent)] = wt;
    }
    let extra_prob = 3.0 / n as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            if w[(i, j)] == 0.0 && rng.random::<f64>() < extra_prob {
                let wt = rng.random_range(0.1..2.0);
                w[(i, j)] = wt;
                w[(j, i)] = wt;
            }
        }
    }
    let ridge = rng.random_range(0.01..0.1);
    VariationOperator::laplacian(&w).unwrap().with_ridge(ridge)
}

pub fn graph_rng(seed: u64, index: u64) -> ChaCha8Rng {
    item_rng(seed, 99, index)
}

pub fn random_set(n: usize, size: usize, rng: &mut ChaCha8Rng) -> SamplingSet {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.truncate(size);
    SamplingSet::new(ids, n).unwrap()
}

pub fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// `rank(M_SSᶜ)` with threshold `1e-10 σ_max`.
pub fn coupling_rank(m: &VariationOperator, s: &SamplingSet) -> usize {
    let c = linalg::submatrix(m.matrix(), s.indices(), s.complement());
    linalg::numerical_rank(&c, 1e-10)
}

/// `A^{-1/2}` for symmetric positive definite `A`, via its eigendecomposition.
pub fn inv_sqrt_spd(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// `1 − σ_min(Q_S^{-1/2} M_SSᶜ Q_Sᶜ^{-1/2})` by explicit matrix functions and SVD.
pub fn svd_oracle_objective(m: &VariationOperator, s: &SamplingSet) -> f64 {
    let mm = m.matrix();
    let q_s = linalg::submatrix(mm, s.indices(), s.indices());
    let q_c = linalg::submatrix(mm, s.complement(), s.complement());
    let c = linalg::submatrix(mm, s.indices(), s.complement());
    let b = inv_sqrt_spd(&q_s) * c * inv_sqrt_spd(&q_c);
    let sv = b.svd(false, false).singular_values;
    1.0 - sv.min()
}

/// Fixed 8-vertex fixture: two rings joined by chords, plus ridge.
pub fn fixture8() -> VariationOperator {
    let mut w = DMatrix::zeros(8, 8);
    let edges = [
        (0, 1, 1.0),
        (1, 2, 0.8),
        (2, 3, 1.2),
        (3, 0, 0.5),
        (4, 5, 0.9),
        (5, 6, 1.1),
        (6, 7, 0.7),
        (7, 4, 1.3),
        (0, 4, 0.6),
        (2, 6, 0.4),
        (1, 5, 0.3),
    ];
    for (i, j, v) in edges {
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    VariationOperator::laplacian(&w).unwrap().with_ridge(0.2)
}

/// Fixed 10-vertex fixture.
pub fn fixture10() -> VariationOperator {
    let mut rng = graph_rng(10, 0);
    random_graph(10, &mut rng)
}

//! Variation operators, sampling-set-adaptive inner products and the `(M, Q(S))`
//! graph Fourier transform.
//!
//! For a sampling set `S` the inner product `Q(S) = blockdiag(M_SS, M_ScSc)` keeps the
//! two diagonal blocks of `M` and drops the coupling between sampled and
//! non-sampled vertices. With that choice the generalized eigenproblem
//! `M u = λ Q u` has the spectral folding property: if `(u, λ)` is an eigenpair,
//! so is `(J u, 2 − λ)` where `J` flips the sign of the entries outside `S`.
//! Frequencies therefore live in `[0, 2]` and split into a low band (`λ < 1`), a
//! middle band (`λ = 1`) and a high band (`λ > 1`).
//!
//! All matrices and vectors here are indexed by the original vertex ids; the
//! `S`-first permutation is only used internally to factor `Q(S)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Block, Error, Result};
use crate::linalg;

/// Threshold for classifying a frequency as exactly 1.
pub const BAND_EPSILON: f64 = 1e-8;

/// Relative symmetry tolerance accepted by [`VariationOperator::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Entries below this magnitude are skipped when fixing eigenvector signs.
const SIGN_THRESHOLD: f64 = 1e-10;

/// A symmetric variation operator `M` (graph Laplacian, precision matrix, ...).
///
/// Construction checks squareness, finiteness and symmetry. Positive
/// definiteness is checked by the operations that need `M⁻¹`
/// ([`VariationOperator::check_positive_definite`]); the transform itself only
/// needs the two diagonal blocks of `Q(S)` to be positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationOperator {
    matrix: DMatrix<f64>,
}

impl VariationOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                if !matrix[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        let scale = linalg::max_abs(&matrix);
        let asymmetry = linalg::max_asymmetry(&matrix);
        if asymmetry > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        // exact symmetry downstream; a no-op for matrices that are already symmetric
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix })
    }

    /// Combinatorial Laplacian `D − W` of a symmetric nonnegative weight matrix.
    pub fn laplacian(weights: &DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        let mut lap = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut degree = 0.0;
            for j in 0..n {
                if i != j {
                    lap[(i, j)] = -weights[(i, j)];
                    degree += weights[(i, j)];
                }
            }
            lap[(i, i)] = degree;
        }
        Self::new(lap)
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// `M + δI`.
    pub fn with_ridge(&self, delta: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..self.n() {
            matrix[(i, i)] += delta;
        }
        Self { matrix }
    }

    /// Default ridge `1e-8 · trace(M) / n`.
    pub fn default_ridge(&self) -> f64 {
        1e-8 * self.matrix.trace() / self.n() as f64
    }

    pub fn check_positive_definite(&self) -> Result<()> {
        linalg::cholesky(&self.matrix)
            .map(|_| ())
            .ok_or(Error::SingularBlock(Block::Full))
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let vals = linalg::symmetric_eigenvalues_sorted(&self.matrix)?;
        Ok(vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
    }

    /// Off-diagonal nonzero pattern as `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.matrix[(i, j)] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Number of connected components of the off-diagonal pattern.
    pub fn connected_components(&self) -> usize {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j) in self.edges() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }
}

/// Ordered set of sampled vertices together with its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SamplingSetRepr", into = "SamplingSetRepr")]
pub struct SamplingSet {
    n: usize,
    indices: Vec<usize>,
    complement: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SamplingSetRepr {
    n: usize,
    indices: Vec<usize>,
}

impl TryFrom<SamplingSetRepr> for SamplingSet {
    type Error = Error;
    fn try_from(r: SamplingSetRepr) -> Result<Self> {
        SamplingSet::new(r.indices, r.n)
    }
}

impl From<SamplingSet> for SamplingSetRepr {
    fn from(s: SamplingSet) -> Self {
        SamplingSetRepr {
            n: s.n,
            indices: s.indices,
        }
    }
}

impl SamplingSet {
    /// Requires `0 < |S| < n`, distinct ids in `[0, n)`. Order is preserved.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSamplingSet("empty".into()));
        }
        if indices.len() >= n {
            return Err(Error::InvalidSamplingSet(format!(
                "|S| = {} leaves no vertex to interpolate (n = {n})",
                indices.len()
            )));
        }
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::InvalidSamplingSet(format!("vertex {i} out of range for n = {n}")));
            }
            if seen[i] {
                return Err(Error::InvalidSamplingSet(format!("vertex {i} repeated")));
            }
            seen[i] = true;
        }
        let complement = (0..n).filter(|&i| !seen[i]).collect();
        Ok(Self {
            n,
            indices,
            complement,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `S` followed by `S^c`.
    pub fn permutation(&self) -> Vec<usize> {
        self.indices.iter().chain(self.complement.iter()).copied().collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.indices.contains(&v)
    }

    /// Diagonal of `J`: +1 on `S`, −1 on `S^c`.
    pub fn folding_signs(&self) -> DVector<f64> {
        let mut j = DVector::from_element(self.n, -1.0);
        for &i in &self.indices {
            j[i] = 1.0;
        }
        j
    }

    /// Selection ops need `|S| ≤ |S^c|`.
    pub fn check_selectable(&self) -> Result<()> {
        if self.indices.len() > self.complement.len() {
            return Err(Error::InfeasibleSize(format!(
                "|S| = {} exceeds |S^c| = {}",
                self.indices.len(),
                self.complement.len()
            )));
        }
        Ok(())
    }
}

/// A real signal on the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal(DVector<f64>);

impl GraphSignal {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self(values))
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        Self::new(DVector::from_vec(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_values(self) -> DVector<f64> {
        self.0
    }

    /// `x_S` in the order of `set.indices()`.
    pub fn restrict(&self, idx: &[usize]) -> DVector<f64> {
        linalg::subvector(&self.0, idx)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl From<DVector<f64>> for GraphSignal {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

/// `Q(S) = blockdiag(M_SS, M_ScSc)` kept as its two factored blocks.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    set: SamplingSet,
    sampled: DMatrix<f64>,
    complement: DMatrix<f64>,
    chol_sampled: Cholesky<f64, Dyn>,
    chol_complement: Cholesky<f64, Dyn>,
}

pub fn build_inner_product(m: &VariationOperator, set: &SamplingSet) -> Result<InnerProduct> {
    if set.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: set.n(),
        });
    }
    let sampled = linalg::submatrix(m.matrix(), set.indices(), set.indices());
    let complement = linalg::submatrix(m.matrix(), set.complement(), set.complement());
    let chol_sampled = linalg::cholesky(&sampled).ok_or(Error::SingularBlock(Block::Sampled))?;
    let chol_complement = linalg::cholesky(&complement).ok_or(Error::SingularBlock(Block::Complement))?;
    Ok(InnerProduct {
        set: set.clone(),
        sampled,
        complement,
        chol_sampled,
        chol_complement,
    })
}

impl InnerProduct {
    pub fn set(&self) -> &SamplingSet {
        &self.set
    }

    /// `Q_S = M_SS`, rows/columns in `set.indices()` order.
    pub fn sampled_block(&self) -> &DMatrix<f64> {
        &self.sampled
    }

    /// `Q_Sc = M_ScSc`, rows/columns in `set.complement()` order.
    pub fn complement_block(&self) -> &DMatrix<f64> {
        &self.complement
    }

    pub fn sampled_cholesky(&self) -> &Cholesky<f64, Dyn> {
        &self.chol_sampled
    }

    pub fn complement_cholesky(&self) -> &Cholesky<f64, Dyn> {
        &self.chol_complement
    }

    pub fn permutation(&self) -> Vec<usize> {
        self.set.permutation()
    }

    /// `Q(S)` as an `n × n` matrix in the original vertex order.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.set.n();
        let mut q = DMatrix::zeros(n, n);
        for (a, &i) in self.set.indices().iter().enumerate() {
            for (b, &j) in self.set.indices().iter().enumerate() {
                q[(i, j)] = self.sampled[(a, b)];
            }
        }
        for (a, &i) in self.set.complement().iter().enumerate() {
            for (b, &j) in self.set.complement().iter().enumerate() {
                q[(i, j)] = self.complement[(a, b)];
            }
        }
        q
    }

    /// `Q x` for each column of `x`, computed blockwise.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let xs = linalg::select_rows(x, self.set.indices());
        let xc = linalg::select_rows(x, self.set.complement());
        let ys = &self.sampled * xs;
        let yc = &self.complement * xc;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (a, &i) in self.set.indices().iter().enumerate() {
            out.set_row(i, &ys.row(a));
        }
        for (a, &i) in self.set.complement().iter().enumerate() {
            out.set_row(i, &yc.row(a));
        }
        out
    }

    /// `‖x‖²_Q` as the sum of the two block quadratic forms.
    pub fn norm_sq(&self, x: &DVector<f64>) -> f64 {
        let xs = linalg::subvector(x, self.set.indices());
        let xc = linalg::subvector(x, self.set.complement());
        xs.dot(&(&self.sampled * &xs)) + xc.dot(&(&self.complement * &xc))
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let xs = linalg::subvector(x, self.set.indices());
        let xc = linalg::subvector(x, self.set.complement());
        let ys = linalg::subvector(y, self.set.indices());
        let yc = linalg::subvector(y, self.set.complement());
        ys.dot(&(&self.sampled * &xs)) + yc.dot(&(&self.complement * &xc))
    }
}

/// Frequency band index sets, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bands {
    pub low: Vec<usize>,
    pub mid: Vec<usize>,
    pub high: Vec<usize>,
}

impl Bands {
    pub fn classify(lambdas: &[f64], eps: f64) -> Self {
        let mut bands = Bands {
            low: Vec::new(),
            mid: Vec::new(),
            high: Vec::new(),
        };
        for (k, &l) in lambdas.iter().enumerate() {
            if l < 1.0 - eps {
                bands.low.push(k);
            } else if l > 1.0 + eps {
                bands.high.push(k);
            } else {
                bands.mid.push(k);
            }
        }
        bands
    }
}

/// Generalized eigenbasis of `(M, Q(S))`.
#[derive(Debug, Clone)]
pub struct SfBasis {
    u: DMatrix<f64>,
    lambdas: DVector<f64>,
    bands: Bands,
    inner: InnerProduct,
}

/// Factor `Q = L Lᵀ` blockwise, diagonalize `L⁻¹ M L⁻ᵀ` and map back with `L⁻ᵀ`.
pub fn compute_sf_gft(m: &VariationOperator, set: &SamplingSet) -> Result<SfBasis> {
    let inner = build_inner_product(m, set)?;
    let n = m.n();
    let perm = set.permutation();
    let (chol, whitened) = whiten(m, &inner);
    let (lambdas, v) = linalg::symmetric_eigen_sorted(&whitened)?;
    let up = chol.transpose().solve_upper_triangular(&v).expect("nonsingular factor");

    let mut u = DMatrix::zeros(n, n);
    for (row, &vertex) in perm.iter().enumerate() {
        u.set_row(vertex, &up.row(row));
    }
    fix_signs(&mut u);

    let bands = Bands::classify(lambdas.as_slice(), BAND_EPSILON);
    Ok(SfBasis {
        u,
        lambdas,
        bands,
        inner,
    })
}

/// Frequencies of `(M, Q(S))` only, ascending; skips the eigenvectors.
pub fn sf_frequencies(m: &VariationOperator, set: &SamplingSet) -> Result<Vec<f64>> {
    let inner = build_inner_product(m, set)?;
    let (_, whitened) = whiten(m, &inner);
    linalg::symmetric_eigenvalues_sorted(&whitened)
}

/// Block Cholesky factor `L` of `Q(S)` (S-first order) and `L⁻¹ M L⁻ᵀ`.
fn whiten(m: &VariationOperator, inner: &InnerProduct) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.n();
    let s = inner.set.len();
    let perm = inner.set.permutation();
    let mp = linalg::submatrix(m.matrix(), &perm, &perm);
    let mut chol = DMatrix::zeros(n, n);
    chol.view_mut((0, 0), (s, s)).copy_from(&inner.chol_sampled.l());
    chol.view_mut((s, s), (n - s, n - s)).copy_from(&inner.chol_complement.l());
    // diagonal of a Cholesky factor is strictly positive, so the solves cannot fail
    let half = chol.solve_lower_triangular(&mp).expect("nonsingular factor");
    let whitened = chol
        .solve_lower_triangular(&half.transpose())
        .expect("nonsingular factor");
    let whitened = (&whitened + whitened.transpose()) * 0.5;
    (chol, whitened)
}

/// First entry with magnitude above the threshold is made positive.
pub(crate) fn fix_signs(u: &mut DMatrix<f64>) {
    for mut col in u.column_iter_mut() {
        if let Some(first) = col.iter().find(|v| v.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Components of a signal in the three bands.
#[derive(Debug, Clone)]
pub struct BandComponents {
    pub low: GraphSignal,
    pub mid: GraphSignal,
    pub high: GraphSignal,
}

impl SfBasis {
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    /// Columns are the generalized eigenvectors; rows are vertices in original order.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn lambdas(&self) -> &DVector<f64> {
        &self.lambdas
    }

    pub fn bands(&self) -> &Bands {
        &self.bands
    }

    pub fn set(&self) -> &SamplingSet {
        self.inner.set()
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.inner
    }

    pub fn permutation(&self) -> Vec<usize> {
        self.inner.permutation()
    }

    pub fn folding_signs(&self) -> DVector<f64> {
        self.set().folding_signs()
    }

    /// Columns of `U` for the given eigen-indices.
    pub fn columns(&self, idx: &[usize]) -> DMatrix<f64> {
        linalg::select_columns(&self.u, idx)
    }

    /// `x̂ = Uᵀ Q x`.
    pub fn analyze(&self, x: &GraphSignal) -> Result<DVector<f64>> {
        x.check_len(self.n())?;
        let qx = self.inner.apply(&DMatrix::from_column_slice(self.n(), 1, x.values().as_slice()));
        Ok(self.u.tr_mul(&qx).column(0).into_owned())
    }

    /// `x = U x̂`.
    pub fn synthesize(&self, spectrum: &DVector<f64>) -> Result<GraphSignal> {
        if spectrum.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: spectrum.len(),
            });
        }
        Ok(GraphSignal(&self.u * spectrum))
    }

    pub fn band_split(&self, x: &GraphSignal) -> Result<BandComponents> {
        let xhat = self.analyze(x)?;
        let part = |idx: &[usize]| {
            let mut masked = DVector::zeros(self.n());
            for &k in idx {
                masked[k] = xhat[k];
            }
            GraphSignal(&self.u * masked)
        };
        Ok(BandComponents {
            low: part(&self.bands.low),
            mid: part(&self.bands.mid),
            high: part(&self.bands.high),
        })
    }
}

/// Orthonormal eigenbasis of `M` alone, i.e. the `(M, I)`-GFT.
#[derive(Debug, Clone)]
pub struct FixedGft {
    u: DMatrix<f64>,
    lambdas: DVector<f64>,
}

pub fn compute_fixed_gft(m: &VariationOperator) -> Result<FixedGft> {
    let (lambdas, mut u) = linalg::symmetric_eigen_sorted(m.matrix())?;
    fix_signs(&mut u);
    Ok(FixedGft { u, lambdas })
}

impl FixedGft {
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn lambdas(&self) -> &DVector<f64> {
        &self.lambdas
    }

    /// First `k` eigenvectors (the low-pass subspace).
    pub fn leading(&self, k: usize) -> DMatrix<f64> {
        self.u.columns(0, k).into_owned()
    }
}

//! Quantum states: density matrices, pure states, bipartite states and seeded
//! random sampling.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::densemath::{hermitian_eig, partial_trace, ComplexMatrix, Subsystem, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues in `[-CLAMP_TOL, 0)` are clamped to zero on construction.
pub const CLAMP_TOL: f64 = 1e-10;
/// Accepted deviation of `tr(rho)` from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Accepted deviation of a state vector norm from one.
pub const NORM_TOL: f64 = 1e-12;

/// Generator for one random stream. The 64-bit seed keys ChaCha8 and the
/// index selects the ChaCha stream, so `(seed, index)` fully determines the
/// sequence and distinct indices never overlap.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed for a child experiment (trial, restart, ...), derived from a parent seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream_rng(seed, index).next_u64()
}

pub(crate) fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` as a state. Eigenvalues in `[-1e-10, 0)` are clamped to
    /// zero and the trace renormalized; anything more negative is rejected.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_trace_tol(m, TRACE_TOL)
    }

    /// Same as [`DensityMatrix::new`] but with a caller-chosen trace tolerance.
    /// The accepted matrix is always renormalized to unit trace.
    pub fn with_trace_tol(m: ComplexMatrix, trace_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let dev = m.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::TraceNotOne(tr));
        }
        let eig = hermitian_eig(&m, HERMITIAN_TOL)?;
        let min = *eig.eigenvalues.last().expect("non-empty spectrum");
        if min < -CLAMP_TOL {
            return Err(Error::NotPsd(min));
        }
        let matrix = if min < 0.0 {
            let clamped = eig.reconstruct_with(|l| l.max(0.0));
            let tr = clamped.trace().re;
            clamped.scale_real(1.0 / tr).hermitian_part()
        } else if tr != 1.0 {
            m.scale_real(1.0 / tr)
        } else {
            m
        };
        Ok(Self { matrix })
    }

    /// Maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// Projector onto computational basis state `k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// `|v><v|` for a unit vector.
    pub fn from_pure(v: &PureState) -> Self {
        Self { matrix: ComplexMatrix::outer(v.amplitudes(), v.amplitudes()) }
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(p))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix, HERMITIAN_TOL)
            .expect("density matrix is Hermitian")
            .eigenvalues
    }

    /// Convex combination `(1 - lambda) self + lambda other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("mixing dims {} and {}", self.dim(), other.dim())));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let m = &self.matrix.scale_real(1.0 - lambda) + &other.matrix.scale_real(lambda);
        Ok(Self { matrix: m })
    }

    /// Max-abs entrywise distance.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Requires `| ||v|| - 1 | <= 1e-12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidShape("empty state vector".into()));
        }
        if let Some(pos) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm2(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    /// `sum_i |ii> / sqrt(d)` on `C^d (x) C^d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut a = vec![ZERO; d * d];
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            a[i * d + i] = amp;
        }
        Self { amplitudes: a }
    }

    pub fn product(a: &PureState, b: &PureState) -> Self {
        Self { amplitudes: crate::densemath::kron_vec(&a.amplitudes, &b.amplitudes) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

pub(crate) fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// State on `R (x) A`, with `R` the slower (left) factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_r: usize,
    dim_a: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(dim_r: usize, dim_a: usize, state: DensityMatrix) -> Result<Self> {
        if state.dim() != dim_r * dim_a {
            return Err(Error::DimensionMismatch(format!(
                "state of dim {} cannot be split as {dim_r}x{dim_a}",
                state.dim()
            )));
        }
        Ok(Self { dim_r, dim_a, state })
    }

    pub fn product(r: &DensityMatrix, a: &DensityMatrix) -> Self {
        let m = crate::densemath::kron(r.matrix(), a.matrix());
        Self { dim_r: r.dim(), dim_a: a.dim(), state: DensityMatrix { matrix: m } }
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_r, self.dim_a)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    /// Reduced state on one factor.
    pub fn reduced(&self, keep: Subsystem) -> DensityMatrix {
        let m = partial_trace(self.state.matrix(), self.dims(), keep).expect("dims are consistent");
        DensityMatrix { matrix: m.hermitian_part() }
    }

    pub fn reduced_r(&self) -> DensityMatrix {
        self.reduced(Subsystem::First)
    }

    pub fn reduced_a(&self) -> DensityMatrix {
        self.reduced(Subsystem::Second)
    }
}

/// `|v><v|` with a declared `R (x) A` split.
pub fn purify_or_embed(v: &PureState, dim_r: usize, dim_a: usize) -> Result<BipartiteState> {
    if v.dim() != dim_r * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "vector of dim {} cannot be split as {dim_r}x{dim_a}",
            v.dim()
        )));
    }
    Ok(BipartiteState { dim_r, dim_a, state: DensityMatrix::from_pure(v) })
}

/// Haar-random unit vector, drawn from an explicit generator.
pub fn random_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if norm2(&v) > 1e-150 {
            return PureState::normalized(v).expect("nonzero Gaussian vector");
        }
    }
}

/// Haar-random unit vector; deterministic per seed.
pub fn random_pure(dim: usize, seed: u64) -> PureState {
    random_pure_with(dim, &mut stream_rng(seed, 0))
}

/// Random state of the given rank: the reduced state of a Haar-random pure
/// state on `C^dim (x) C^rank`. `rank == dim` gives the Hilbert-Schmidt ensemble.
pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let v = random_pure_with(dim * rank, rng);
    let joint = ComplexMatrix::outer(v.amplitudes(), v.amplitudes());
    let reduced = partial_trace(&joint, (dim, rank), Subsystem::First)?;
    DensityMatrix::new(reduced.hermitian_part())
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dim, rank, &mut stream_rng(seed, 0))
}

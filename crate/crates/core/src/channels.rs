//! Quantum channels in Kraus and Choi form.
//!
//! The Choi operator is `Gamma = sum_ij |i><j| (x) N(|i><j|)` on `R (x) A`
//! with `R ~ A'` the slower factor. A Kraus operator `K` contributes the
//! vector `sum_i |i> (x) K|i>`, i.e. entry `i * d_A + a` equals `K[a][i]`.

use num_complex::Complex64;
use rand::Rng;

use crate::densemath::{hermitian_eig, kron, partial_trace, ComplexMatrix, Subsystem, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};
use crate::states::{gaussian_complex, stream_rng, BipartiteState, DensityMatrix, TRACE_TOL};
use crate::thermo::{thermal_state, Hamiltonian};

/// Tolerance on `|| sum K^dagger K - 1 ||_max`.
pub const TP_TOL: f64 = 1e-10;
/// Default threshold on Choi eigenvalues when extracting Kraus operators.
pub const KRAUS_TOL: f64 = 1e-10;
const COMPRESS_TOL: f64 = 1e-14;

/// CPTP map `A' -> A` given by Kraus operators of shape `dim_out x dim_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shapes, Kraus count and trace preservation at [`TP_TOL`].
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tp_tol(dim_in, dim_out, kraus, TP_TOL)
    }

    pub fn with_tp_tol(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>, tp_tol: f64) -> Result<Self> {
        let max = dim_in * dim_out;
        if kraus.is_empty() || kraus.len() > max {
            return Err(Error::KrausCount { count: kraus.len(), max });
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let ch = Self { dim_in, dim_out, kraus };
        let dev = ch.tp_deviation();
        if dev > tp_tol {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    /// Identity channel on `C^d`.
    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, kraus: vec![ComplexMatrix::identity(d)] }
    }

    /// Unitary channel `rho -> U rho U^dagger`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        Self::new(d, d, vec![u])
    }

    /// Replacer onto the maximally mixed state.
    pub fn completely_depolarizing(d: usize) -> Self {
        make_replacer(&DensityMatrix::maximally_mixed(d), d)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `|| sum_i K_i^dagger K_i - 1 ||_max`.
    pub fn tp_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// `(1 - lambda) self + lambda other` as the concatenated scaled Kraus set.
    /// Sets larger than `dim_in * dim_out` are compressed through the Choi operator.
    pub fn mix(&self, other: &KrausChannel, lambda: f64) -> Result<Self> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch("mixing channels of different shapes".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() + other.kraus.len());
        if lambda < 1.0 {
            let w = (1.0 - lambda).sqrt();
            kraus.extend(self.kraus.iter().map(|k| k.scale_real(w)));
        }
        if lambda > 0.0 {
            let w = lambda.sqrt();
            kraus.extend(other.kraus.iter().map(|k| k.scale_real(w)));
        }
        let raw = Self { dim_in: self.dim_in, dim_out: self.dim_out, kraus };
        if raw.kraus.len() <= self.dim_in * self.dim_out {
            return Ok(raw);
        }
        kraus_from_choi(&choi_from_kraus(&raw), COMPRESS_TOL)
    }
}

/// Choi operator on `R (x) A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    dim_r: usize,
    dim_a: usize,
    matrix: ComplexMatrix,
}

impl ChoiOperator {
    /// Checks shape, Hermiticity and the trace-preservation marginal
    /// `tr_A Gamma = 1_R`. Complete positivity is checked by
    /// [`ChoiOperator::check_cp`] and by [`kraus_from_choi`].
    pub fn new(dim_r: usize, dim_a: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = dim_r * dim_a;
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {d}x{d}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let c = Self { dim_r, dim_a, matrix: matrix.hermitian_part() };
        let tp = c.tp_deviation();
        if tp > TP_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        Ok(c)
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `|| tr_A Gamma - 1_R ||_max`.
    pub fn tp_deviation(&self) -> f64 {
        partial_trace(&self.matrix, (self.dim_r, self.dim_a), Subsystem::First)
            .expect("shape checked")
            .max_abs_diff(&ComplexMatrix::identity(self.dim_r))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = hermitian_eig(&self.matrix, HERMITIAN_TOL).expect("Hermitian by construction");
        *eig.eigenvalues.last().expect("non-empty")
    }

    /// Fails with [`Error::NotCp`] when the smallest eigenvalue is below `-tol`.
    pub fn check_cp(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotCp(min));
        }
        Ok(())
    }

    /// Choi state `Gamma / d_R`, a unit-trace operator.
    pub fn choi_state(&self) -> ComplexMatrix {
        self.matrix.scale_real(1.0 / self.dim_r as f64)
    }

    /// Channel action reconstructed from the Choi matrix:
    /// `N(X) = tr_R[(X^T (x) 1_A) Gamma]`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_r || x.cols() != self.dim_r {
            return Err(Error::DimensionMismatch(format!("input must be {0}x{0}", self.dim_r)));
        }
        let da = self.dim_a;
        Ok(ComplexMatrix::from_fn(da, da, |a, b| {
            let mut acc = ZERO;
            for i in 0..self.dim_r {
                for j in 0..self.dim_r {
                    acc += x[(i, j)] * self.matrix[(i * da + a, j * da + b)];
                }
            }
            acc
        }))
    }

    /// Max-abs entrywise distance between Choi matrices.
    pub fn distance(&self, other: &ChoiOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// The map `rho -> tr(rho) 1_A`. Not trace preserving, so it never becomes a
/// [`KrausChannel`]; it only serves as the comparator in channel divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMixingMap {
    pub dim_in: usize,
    pub dim_out: usize,
}

impl UniformMixingMap {
    pub fn new(dim_in: usize, dim_out: usize) -> Self {
        Self { dim_in, dim_out }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim_out).scale(rho.trace())
    }

    /// `(id_R (x) R^1)(psi) = psi_R (x) 1_A`.
    pub fn apply_extended(&self, psi: &BipartiteState) -> Result<ComplexMatrix> {
        if psi.dim_a() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "probe has input dim {}, map expects {}",
                psi.dim_a(),
                self.dim_in
            )));
        }
        Ok(kron(psi.reduced_r().matrix(), &ComplexMatrix::identity(self.dim_out)))
    }
}

/// `sum_i K_i rho K_i^dagger`.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs channel input dim {}",
            rho.dim(),
            ch.dim_in
        )));
    }
    DensityMatrix::with_trace_tol(apply_operator(ch, rho.matrix()), 10.0 * TRACE_TOL)
}

/// Channel action on an arbitrary square operator (no state checks).
pub fn apply_operator(ch: &KrausChannel, x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(ch.dim_out, ch.dim_out);
    for k in &ch.kraus {
        out = &out + &x.sandwich(k);
    }
    out
}

/// `(id_R (x) N)(psi)`.
pub fn apply_extended(ch: &KrausChannel, psi: &BipartiteState) -> Result<BipartiteState> {
    if psi.dim_a() != ch.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "probe has input dim {}, channel expects {}",
            psi.dim_a(),
            ch.dim_in
        )));
    }
    let id_r = ComplexMatrix::identity(psi.dim_r());
    let d = psi.dim_r() * ch.dim_out;
    let mut out = ComplexMatrix::zeros(d, d);
    for k in &ch.kraus {
        out = &out + &psi.matrix().sandwich(&kron(&id_r, k));
    }
    let state = DensityMatrix::with_trace_tol(out, 10.0 * TRACE_TOL)?;
    BipartiteState::new(psi.dim_r(), ch.dim_out, state)
}

/// Heisenberg-picture action `sum_i K_i^dagger obs K_i`.
pub fn adjoint_apply(ch: &KrausChannel, obs: &ComplexMatrix) -> Result<ComplexMatrix> {
    if obs.rows() != ch.dim_out || obs.cols() != ch.dim_out {
        return Err(Error::DimensionMismatch(format!(
            "observable is {}x{}, channel output dim is {}",
            obs.rows(),
            obs.cols(),
            ch.dim_out
        )));
    }
    let dev = obs.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let mut out = ComplexMatrix::zeros(ch.dim_in, ch.dim_in);
    for k in &ch.kraus {
        out = &out + &obs.sandwich(&k.adjoint());
    }
    Ok(out.hermitian_part())
}

/// Choi operator `sum_k |k>><<k|` with `|k>> = sum_i |i> (x) K_k|i>`.
pub fn choi_from_kraus(ch: &KrausChannel) -> ChoiOperator {
    let (din, dout) = (ch.dim_in, ch.dim_out);
    let d = din * dout;
    let mut m = ComplexMatrix::zeros(d, d);
    for k in &ch.kraus {
        let v: Vec<Complex64> = (0..d).map(|idx| k[(idx % dout, idx / dout)]).collect();
        m = &m + &ComplexMatrix::outer(&v, &v);
    }
    ChoiOperator { dim_r: din, dim_a: dout, matrix: m.hermitian_part() }
}

/// Kraus operators from the eigendecomposition of the Choi matrix; one
/// operator per eigenvalue above `tol`.
pub fn kraus_from_choi(c: &ChoiOperator, tol: f64) -> Result<KrausChannel> {
    let eig = hermitian_eig(&c.matrix, HERMITIAN_TOL)?;
    let min = *eig.eigenvalues.last().expect("non-empty");
    if min < -tol {
        return Err(Error::NotCp(min));
    }
    let (din, dout) = (c.dim_r, c.dim_a);
    let kraus: Vec<ComplexMatrix> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol)
        .map(|(k, &l)| {
            let s = l.sqrt();
            ComplexMatrix::from_fn(dout, din, |a, i| eig.eigenvectors[(i * dout + a, k)] * s)
        })
        .collect();
    KrausChannel::with_tp_tol(din, dout, kraus, 1e-8)
}

/// Replacer channel `rho -> tr(rho) omega` with Kraus set
/// `{ sqrt(l_k) |e_k><j| }` from the spectral decomposition of `omega`.
pub fn make_replacer(omega: &DensityMatrix, dim_in: usize) -> KrausChannel {
    let eig = hermitian_eig(omega.matrix(), HERMITIAN_TOL).expect("density matrix is Hermitian");
    let dout = omega.dim();
    let mut kraus = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let ek = eig.vector(k);
        let s = l.sqrt();
        for j in 0..dim_in {
            kraus.push(ComplexMatrix::from_fn(dout, dim_in, |a, i| if i == j { ek[a] * s } else { ZERO }));
        }
    }
    KrausChannel { dim_in, dim_out: dout, kraus }
}

/// Absolutely thermalizing channel: the replacer onto the Gibbs state of `h` at `beta`.
pub fn make_thermalizer(h: &Hamiltonian, beta: f64, dim_in: usize) -> Result<KrausChannel> {
    let (gamma, _) = thermal_state(h, beta)?;
    Ok(make_replacer(&gamma, dim_in))
}

/// Random channel from a Haar-random isometry `C^{d_in} -> C^{d_out} (x) C^{d_env}`
/// (environment the faster factor), drawn from an explicit generator.
pub fn random_channel_with<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if dim_in == 0 || dim_out == 0 || dim_env == 0 {
        return Err(Error::DimensionMismatch("dimensions must be positive".into()));
    }
    if dim_out * dim_env < dim_in {
        return Err(Error::DimensionMismatch(format!(
            "no isometry from dim {dim_in} into {dim_out}x{dim_env}"
        )));
    }
    if dim_env > dim_in * dim_out {
        return Err(Error::DimensionMismatch(format!(
            "environment dim {dim_env} exceeds the Kraus cap {}",
            dim_in * dim_out
        )));
    }
    let rows = dim_out * dim_env;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim_in);
    while cols.len() < dim_in {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian_complex(rng)).collect();
        // Gram-Schmidt twice for orthogonality at rounding level.
        for _ in 0..2 {
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let n = crate::states::norm2(&v);
        if n < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    let kraus = (0..dim_env)
        .map(|e| ComplexMatrix::from_fn(dim_out, dim_in, |a, j| cols[j][a * dim_env + e]))
        .collect();
    KrausChannel::new(dim_in, dim_out, kraus)
}

/// Seeded random channel; see [`random_channel_with`].
pub fn random_channel(dim_in: usize, dim_out: usize, dim_env: usize, seed: u64) -> Result<KrausChannel> {
    random_channel_with(dim_in, dim_out, dim_env, &mut stream_rng(seed, 0))
}

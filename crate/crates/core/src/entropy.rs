//! Entropic functionals of states. All values are in nats; bits only appear
//! when a value is formatted for display.

use std::fmt;

use num_complex::Complex64;

use crate::channels::{apply_extended, KrausChannel, UniformMixingMap};
use crate::densemath::{hermitian_eig, kron, xlogx, ComplexMatrix, Subsystem, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::search::{minimize, SearchOptions};
use crate::states::{stream_rng, BipartiteState, DensityMatrix};

/// Default cutoff for the numerical kernel of `sigma` and for overlaps with it.
pub const SUPPORT_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Display unit for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn suffix(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// An entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue(pub f64);

impl EntropyValue {
    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn in_units(self, units: Units) -> f64 {
        match units {
            Units::Nats => self.nats(),
            Units::Bits => self.bits(),
        }
    }

    /// `"<value> <unit>"` with twelve decimals.
    pub fn display(self, units: Units) -> String {
        let v = self.in_units(units);
        // avoid printing "-0.000000000000"
        let v = if v.abs() < 5e-13 { 0.0 } else { v };
        format!("{v:.12} {}", units.suffix())
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(Units::Nats))
    }
}

/// Quantum relative entropy; infinite when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelEntValue {
    Finite(f64),
    Infinite,
}

impl RelEntValue {
    pub fn is_finite(self) -> bool {
        matches!(self, RelEntValue::Finite(_))
    }

    pub fn value(self) -> f64 {
        match self {
            RelEntValue::Finite(v) => v,
            RelEntValue::Infinite => f64::INFINITY,
        }
    }
}

/// Shannon entropy (nats) of a spectrum; negative rounding noise counts as zero.
pub(crate) fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    -eigenvalues.iter().map(|&p| xlogx(p)).sum::<f64>()
}

fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    spectrum_entropy(&hermitian_eig(m, HERMITIAN_TOL).expect("Hermitian state").eigenvalues)
}

/// `S(rho) = -tr[rho ln rho]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> EntropyValue {
    EntropyValue(matrix_entropy(rho.matrix()))
}

/// `D(rho || sigma) = tr[rho (ln rho - ln sigma)]` for positive semidefinite
/// (not necessarily normalized) `sigma`.
///
/// The kernel of `sigma` is the span of its eigenvectors with eigenvalue at
/// most `support_tol`. If an eigenvector of `rho` with weight above
/// `support_tol` overlaps that kernel by more than `support_tol` (squared),
/// the support condition fails and the result is infinite.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &ComplexMatrix, support_tol: f64) -> Result<RelEntValue> {
    if sigma.rows() != rho.dim() || sigma.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rho is {0}x{0}, sigma is {1}x{2}",
            rho.dim(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let es = hermitian_eig(sigma, HERMITIAN_TOL)?;
    let smin = *es.eigenvalues.last().expect("non-empty");
    if smin < -PSD_TOL {
        return Err(Error::NotPsd(smin));
    }
    let er = hermitian_eig(rho.matrix(), HERMITIAN_TOL)?;
    let n = rho.dim();

    // overlaps[i][k] = |<u_i|v_k>|^2
    let overlap = |i: usize, k: usize| -> f64 {
        (0..n)
            .map(|r| er.eigenvectors[(r, i)].conj() * es.eigenvectors[(r, k)])
            .sum::<Complex64>()
            .norm_sqr()
    };

    let mut cross = 0.0;
    for (i, &p) in er.eigenvalues.iter().enumerate() {
        if p <= support_tol {
            continue;
        }
        let mut kernel_overlap = 0.0;
        let mut log_sigma = 0.0;
        for (k, &q) in es.eigenvalues.iter().enumerate() {
            let o = overlap(i, k);
            if q <= support_tol {
                kernel_overlap += o;
            } else {
                log_sigma += o * q.ln();
            }
        }
        if kernel_overlap > support_tol {
            return Ok(RelEntValue::Infinite);
        }
        cross += p * log_sigma;
    }
    let neg_entropy: f64 = er.eigenvalues.iter().map(|&p| xlogx(p)).sum();
    Ok(RelEntValue::Finite(neg_entropy - cross))
}

/// Conditional entropy of the factor kept against the `given` factor:
/// `S(AB) - S(given)`.
pub fn conditional_entropy_given(m: &ComplexMatrix, dims: (usize, usize), given: Subsystem) -> Result<EntropyValue> {
    let reduced = crate::densemath::partial_trace(m, dims, given)?;
    Ok(EntropyValue(matrix_entropy(m) - matrix_entropy(&reduced.hermitian_part())))
}

/// `S(A|R) = S(RA) - S(R)` for a state on `R (x) A` (conditioning on the
/// first factor, the reference).
pub fn conditional_entropy(rho: &BipartiteState) -> EntropyValue {
    conditional_entropy_given(rho.matrix(), rho.dims(), Subsystem::First).expect("dims are consistent")
}

/// Outcome of the variational conditional-entropy computation.
#[derive(Debug, Clone)]
pub struct VariationalConditional {
    pub value: EntropyValue,
    /// The optimal `sigma_R` found.
    pub sigma: DensityMatrix,
    pub evaluations: usize,
}

/// Number of real parameters for a `d x d` lower-triangular `L` with real diagonal.
fn cholesky_params(d: usize) -> usize {
    d * d
}

fn sigma_from_params(x: &[f64], d: usize) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        l[(i, i)] = Complex64::new(x[idx], 0.0);
        idx += 1;
        for j in 0..i {
            l[(i, j)] = Complex64::new(x[idx], x[idx + 1]);
            idx += 2;
        }
    }
    let s = &l * &l.adjoint();
    let tr = s.trace().re;
    s.scale_real(1.0 / tr).hermitian_part()
}

fn params_from_sigma(sigma: &ComplexMatrix) -> Vec<f64> {
    // Cholesky of a (regularized) positive matrix gives the starting L.
    let d = sigma.rows();
    let mut l = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut diag = sigma[(j, j)].re + 1e-12;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        let ljj = diag.max(1e-12).sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..d {
            let mut s = sigma[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    let mut x = Vec::with_capacity(cholesky_params(d));
    for i in 0..d {
        x.push(l[(i, i)].re);
        for j in 0..i {
            x.push(l[(i, j)].re);
            x.push(l[(i, j)].im);
        }
    }
    x
}

/// `S(A|R) = -inf_sigma D(rho_RA || sigma_R (x) 1_A)`, minimized numerically.
///
/// `sigma = L L^dagger / tr(L L^dagger)` over complex lower-triangular `L`,
/// searched by multi-start pattern search (the maximally mixed start first,
/// then seeded random starts) with a total budget of `opt_budget`
/// evaluations. The infimum sits at `sigma = rho_R`, where the value equals
/// the difference form. Running out of budget before the step size shrinks
/// below the tolerance yields [`Error::BudgetExhausted`] with the best
/// (still valid) value.
pub fn conditional_entropy_variational(
    rho: &BipartiteState,
    opt_budget: usize,
    seed: u64,
) -> Result<VariationalConditional> {
    let (dr, da) = rho.dims();
    let id_a = ComplexMatrix::identity(da);
    let objective = |x: &[f64]| -> f64 {
        let sigma = sigma_from_params(x, dr);
        match relative_entropy(rho.state(), &kron(&sigma, &id_a), SUPPORT_TOL) {
            Ok(v) => v.value(),
            Err(_) => f64::INFINITY,
        }
    };

    let starts = 3;
    let per_start = (opt_budget / starts).max(1);
    let mut rng = stream_rng(seed, 0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0;
    let mut converged_any = false;
    for s in 0..starts {
        let x0 = if s == 0 {
            params_from_sigma(&ComplexMatrix::identity(dr).scale_real(1.0 / dr as f64))
        } else {
            let sigma = crate::states::random_density_with(dr, dr, &mut rng)?;
            params_from_sigma(sigma.matrix())
        };
        let opts = SearchOptions { initial_step: 0.25, tol: 1e-9, max_evals: per_start };
        let out = minimize(&objective, x0, &opts, None);
        evaluations += out.evaluations;
        converged_any |= out.converged;
        if best.as_ref().is_none_or(|(v, _)| out.value < *v) {
            best = Some((out.value, out.x));
        }
    }
    let (value, x) = best.expect("at least one start");
    if !converged_any {
        return Err(Error::BudgetExhausted { best: -value });
    }
    let sigma = DensityMatrix::with_trace_tol(sigma_from_params(&x, dr), 1e-8)?;
    Ok(VariationalConditional { value: EntropyValue(-value), sigma, evaluations })
}

/// `D((id (x) N)(psi) || (id (x) R^1)(psi))` with `R^1` the uniformly mixing
/// map, i.e. the relative entropy to `psi_R (x) 1_A`. Equals `-S(A|R)` of
/// the channel output.
pub fn pointwise_channel_divergence(ch: &KrausChannel, psi: &BipartiteState) -> Result<RelEntValue> {
    let out = apply_extended(ch, psi)?;
    let comparator = UniformMixingMap::new(ch.dim_in(), ch.dim_out()).apply_extended(psi)?;
    relative_entropy(out.state(), &comparator, SUPPORT_TOL)
}

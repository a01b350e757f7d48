//! Hamiltonians, Gibbs states, the inverse-temperature/energy bijection, and
//! the mean energy of channels.
//!
//! Units: `k_B = 1`, so `beta` is an inverse energy. Negative `beta` is
//! allowed; with a bounded spectrum every energy strictly inside
//! `(E_min, E_max)` corresponds to exactly one real `beta`.

use crate::channels::{adjoint_apply, make_replacer, KrausChannel};
use crate::densemath::{hermitian_eig, ComplexMatrix, HermitianEig, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::states::{gaussian_complex, stream_rng, DensityMatrix, PureState};

/// Relative spectral width below which a Hamiltonian counts as `c * 1`.
const DEGENERATE_REL_TOL: f64 = 1e-12;
const MAX_BRACKET_STEPS: usize = 200;
const MAX_ROOT_STEPS: usize = 400;

/// Bounded Hermitian observable with cached spectral data.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    spectrum: HermitianEig,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eig(&matrix, HERMITIAN_TOL)?;
        Ok(Self { matrix: matrix.hermitian_part(), spectrum })
    }

    pub fn diagonal(levels: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(levels))
    }

    /// GUE-like random Hamiltonian `(G + G^dagger) / 2`; deterministic per seed.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0);
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(&mut rng));
        Self::new(g.hermitian_part()).expect("Hermitian by construction")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &HermitianEig {
        &self.spectrum
    }

    pub fn min_energy(&self) -> f64 {
        *self.spectrum.eigenvalues.last().expect("non-empty")
    }

    pub fn max_energy(&self) -> f64 {
        self.spectrum.eigenvalues[0]
    }

    /// True when the spectrum is a single point, i.e. `H = c * 1`.
    pub fn is_degenerate(&self) -> bool {
        let (lo, hi) = (self.min_energy(), self.max_energy());
        hi - lo <= DEGENERATE_REL_TOL * hi.abs().max(lo.abs()).max(1.0)
    }

    /// Projector onto the lowest-energy eigenvector.
    pub fn ground_projector(&self) -> DensityMatrix {
        let k = self.dim() - 1;
        DensityMatrix::from_pure(&PureState::normalized(self.spectrum.vector(k)).expect("unit eigenvector"))
    }

    /// Projector onto the highest-energy eigenvector.
    pub fn top_projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::normalized(self.spectrum.vector(0)).expect("unit eigenvector"))
    }

    /// `E_min + q (E_max - E_min)`.
    pub fn energy_quantile(&self, q: f64) -> f64 {
        self.min_energy() + q * (self.max_energy() - self.min_energy())
    }

    fn check_interior(&self, e: f64) -> Result<()> {
        let (lo, hi) = (self.min_energy(), self.max_energy());
        if !(e > lo && e < hi) {
            return Err(Error::EnergyOutOfRange { energy: e, min: lo, max: hi });
        }
        Ok(())
    }

    /// Gibbs populations in the (descending) eigenbasis, plus `ln Z`.
    fn boltzmann(&self, beta: f64) -> (Vec<f64>, f64) {
        let ev = &self.spectrum.eigenvalues;
        // shift by the level that dominates so the largest weight is exp(0)
        let shift = if beta >= 0.0 { self.min_energy() } else { self.max_energy() };
        let w: Vec<f64> = ev.iter().map(|&l| (-beta * (l - shift)).exp()).collect();
        let sum: f64 = w.iter().sum();
        let log_z = sum.ln() - beta * shift;
        (w.into_iter().map(|x| x / sum).collect(), log_z)
    }

    /// `tr[H gamma^beta]`.
    pub fn thermal_energy(&self, beta: f64) -> f64 {
        let (p, _) = self.boltzmann(beta);
        p.iter().zip(&self.spectrum.eigenvalues).map(|(p, l)| p * l).sum()
    }
}

/// Inverse temperature, partition function and mean energy of one Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub beta: f64,
    pub partition: f64,
    pub log_partition: f64,
    pub energy: f64,
}

/// `tr[H rho]`.
pub fn mean_energy(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dim {} vs state dim {}",
            h.dim(),
            rho.dim()
        )));
    }
    Ok(h.matrix().trace_product(rho.matrix()).re)
}

/// Gibbs state `exp(-beta H) / Z`, built in the eigenbasis of `H`.
pub fn thermal_state(h: &Hamiltonian, beta: f64) -> Result<(DensityMatrix, ThermalSpec)> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be finite, got {beta}")));
    }
    let (p, log_z) = h.boltzmann(beta);
    let eig = h.spectrum();
    let m = ComplexMatrix::from_fn(h.dim(), h.dim(), |i, j| {
        (0..h.dim())
            .filter(|&k| p[k] != 0.0)
            .map(|k| eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)].conj() * p[k])
            .sum()
    });
    let energy = p.iter().zip(&eig.eigenvalues).map(|(p, l)| p * l).sum();
    let gamma = DensityMatrix::new(m.hermitian_part())?;
    Ok((gamma, ThermalSpec { beta, partition: log_z.exp(), log_partition: log_z, energy }))
}

/// Solves `tr[H gamma^beta] = e` for `beta`.
///
/// `E(beta)` is strictly decreasing for non-degenerate `H`, so the root is
/// bracketed by doubling outward from zero and then refined with a
/// safeguarded secant/bisection step until `|E(beta) - e| <= tol * scale`,
/// where `scale = max(|e|, E_max - E_min)`.
pub fn beta_from_energy(h: &Hamiltonian, e: f64, tol: f64) -> Result<ThermalSpec> {
    if h.is_degenerate() {
        return Err(Error::DegenerateHamiltonian(h.min_energy()));
    }
    h.check_interior(e)?;
    let width = h.max_energy() - h.min_energy();
    let target_tol = tol * e.abs().max(width);
    let f = |b: f64| h.thermal_energy(b) - e;

    let f0 = f(0.0);
    if f0.abs() <= target_tol {
        return thermal_state(h, 0.0).map(|(_, s)| s);
    }
    // f decreasing: f0 > 0 means the root has beta > 0.
    let dir = if f0 > 0.0 { 1.0 } else { -1.0 };
    let (mut lo, mut flo) = (0.0, f0);
    let mut step = 1.0 / width;
    let (mut hi, mut fhi) = (dir * step, f(dir * step));
    let mut steps = 0;
    while fhi.signum() == flo.signum() && fhi.abs() > target_tol {
        lo = hi;
        flo = fhi;
        step *= 2.0;
        hi = dir * step;
        fhi = f(hi);
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            break;
        }
    }

    // Illinois-modified regula falsi with bisection fallback.
    let mut best = if fhi.abs() < flo.abs() { hi } else { lo };
    let mut fbest = f(best);
    let mut side = 0i8;
    for _ in 0..MAX_ROOT_STEPS {
        if fbest.abs() <= target_tol {
            break;
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        if !x.is_finite() || x <= lo.min(hi) || x >= lo.max(hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx.abs() < fbest.abs() {
            best = x;
            fbest = fx;
        }
        if fx.signum() == fhi.signum() {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
        if (hi - lo).abs() <= f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    thermal_state(h, best).map(|(_, s)| s)
}

/// Channel mean energy `sup_rho tr[H N(rho)]`.
///
/// `tr[H N(rho)] = tr[N^dagger(H) rho]` and the supremum of a linear
/// functional over states is the top eigenvalue of `N^dagger(H)`, attained
/// at the projector onto its top eigenvector. Returns that value and the
/// achieving pure input.
pub fn channel_mean_energy(h: &Hamiltonian, ch: &KrausChannel) -> Result<(f64, DensityMatrix)> {
    let (value, v) = channel_mean_energy_vector(h, ch)?;
    Ok((value, DensityMatrix::from_pure(&v)))
}

/// Like [`channel_mean_energy`] but returns the achieving input as a vector.
pub fn channel_mean_energy_vector(h: &Hamiltonian, ch: &KrausChannel) -> Result<(f64, PureState)> {
    if h.dim() != ch.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dim {} vs channel output dim {}",
            h.dim(),
            ch.dim_out()
        )));
    }
    let heis = adjoint_apply(ch, h.matrix())?;
    let eig = hermitian_eig(&heis, HERMITIAN_TOL)?;
    let v = PureState::normalized(eig.vector(0))?;
    Ok((eig.eigenvalues[0], v))
}

/// Which spectral projector anchors an energy-pinning mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Ground,
    Top,
    /// Already at the target energy; nothing was mixed in.
    None,
}

/// A channel mixed with a replacer so its mean energy hits a target.
#[derive(Debug, Clone)]
pub struct PinnedChannel {
    pub channel: KrausChannel,
    /// Weight of the replacer anchor.
    pub lambda: f64,
    pub anchor: Anchor,
    /// Mean energy of the channel before mixing.
    pub original_energy: f64,
}

fn pin_weight(a: f64, target: f64, h: &Hamiltonian) -> (f64, Anchor) {
    let scale = h.max_energy().abs().max(h.min_energy().abs()).max(1.0);
    if (a - target).abs() <= 1e-14 * scale {
        return (0.0, Anchor::None);
    }
    let (b, anchor) = if a > target { (h.min_energy(), Anchor::Ground) } else { (h.max_energy(), Anchor::Top) };
    // (1 - l) a + l b = target
    (((a - target) / (a - b)).clamp(0.0, 1.0), anchor)
}

/// `N_l = (1 - l) N + l R^omega` with `<H>_{N_l} = target`.
///
/// The replacer's Heisenberg image is `tr[H omega] 1`, so
/// `<H>_{N_l} = (1 - l) <H>_N + l <H>_omega` and `l` solves a linear
/// equation. `omega` is the ground projector when `<H>_N` is above the
/// target and the top projector when below.
pub fn energy_pinned_mixture(ch: &KrausChannel, h: &Hamiltonian, target: f64) -> Result<PinnedChannel> {
    h.check_interior(target)?;
    let (a, _) = channel_mean_energy(h, ch)?;
    let (lambda, anchor) = pin_weight(a, target, h);
    let channel = match anchor {
        Anchor::None => ch.clone(),
        Anchor::Ground => ch.mix(&make_replacer(&h.ground_projector(), ch.dim_in()), lambda)?,
        Anchor::Top => ch.mix(&make_replacer(&h.top_projector(), ch.dim_in()), lambda)?,
    };
    Ok(PinnedChannel { channel, lambda, anchor, original_energy: a })
}

/// State-level pinning: `(1 - l) rho + l Pi` with `tr[H rho_l] = target`.
pub fn pin_state_energy(rho: &DensityMatrix, h: &Hamiltonian, target: f64) -> Result<(DensityMatrix, f64)> {
    h.check_interior(target)?;
    let a = mean_energy(h, rho)?;
    let (lambda, anchor) = pin_weight(a, target, h);
    let pinned = match anchor {
        Anchor::None => rho.clone(),
        Anchor::Ground => rho.mix(&h.ground_projector(), lambda)?,
        Anchor::Top => rho.mix(&h.top_projector(), lambda)?,
    };
    Ok((pinned, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{choi_from_kraus, random_channel};
    use crate::states::random_density;

    fn qubit01() -> Hamiltonian {
        Hamiltonian::diagonal(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn mean_energy_examples() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0, 2.5]).unwrap();
        let e = mean_energy(&h, &DensityMatrix::maximally_mixed(3)).unwrap();
        assert!((e - 3.5 / 3.0).abs() < 1e-15);
        assert!((mean_energy(&h, &h.ground_projector()).unwrap() - 0.0).abs() < 1e-15);
        let rho = DensityMatrix::from_probabilities(&[0.7, 0.3]).unwrap();
        assert!((mean_energy(&qubit01(), &rho).unwrap() - 0.3).abs() < 1e-15);
        assert!(mean_energy(&h, &rho).is_err());
    }

    #[test]
    fn thermal_examples() {
        let h = qubit01();
        let (g, s) = thermal_state(&h, 0.0).unwrap();
        assert!(g.distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        assert!((s.energy - 0.5).abs() < 1e-15);

        let em1 = (-1.0f64).exp();
        let (g, s) = thermal_state(&h, 1.0).unwrap();
        assert!((g.matrix()[(0, 0)].re - 1.0 / (1.0 + em1)).abs() < 1e-15);
        assert!((g.matrix()[(1, 1)].re - em1 / (1.0 + em1)).abs() < 1e-15);
        assert!((s.partition - (1.0 + em1)).abs() < 1e-15);

        let (g, _) = thermal_state(&h, 50.0).unwrap();
        assert!(g.matrix()[(1, 1)].re.abs() <= 1e-20);
        assert_eq!(g.matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn beta_examples() {
        let h = qubit01();
        assert_eq!(beta_from_energy(&h, 0.5, 1e-10).unwrap().beta, 0.0);

        let em1 = (-1.0f64).exp();
        let s = beta_from_energy(&h, em1 / (1.0 + em1), 1e-10).unwrap();
        assert!((s.beta - 1.0).abs() < 1e-8);

        // p1 = 3/4  =>  e^{-beta} = 3
        let s = beta_from_energy(&h, 0.75, 1e-12).unwrap();
        assert!((s.beta - (1.0f64 / 3.0).ln()).abs() < 1e-8);
        assert!(s.beta < 0.0);

        assert!(matches!(beta_from_energy(&h, 1.5, 1e-10), Err(Error::EnergyOutOfRange { .. })));
        assert!(matches!(beta_from_energy(&h, 0.0, 1e-10), Err(Error::EnergyOutOfRange { .. })));
        let flat = Hamiltonian::diagonal(&[2.0, 2.0]).unwrap();
        assert!(matches!(beta_from_energy(&flat, 2.0, 1e-10), Err(Error::DegenerateHamiltonian(_))));
    }

    #[test]
    fn extreme_energies_resolve() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0, 2.0]).unwrap();
        for e in [1e-6, 1.0 - 1e-9, 2.0 - 1e-6] {
            let s = beta_from_energy(&h, e, 1e-10).unwrap();
            assert!((s.energy - e).abs() <= 1e-9, "e={e} got {}", s.energy);
        }
    }

    #[test]
    fn channel_energy_examples() {
        let h = qubit01();
        let omega = random_density(2, 2, 4).unwrap();
        let (e, _) = channel_mean_energy(&h, &make_replacer(&omega, 3)).unwrap();
        assert!((e - mean_energy(&h, &omega).unwrap()).abs() < 1e-12);

        let (e, rho) = channel_mean_energy(&h, &KrausChannel::identity(2)).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!(rho.distance(&DensityMatrix::basis(2, 1)) < 1e-15);

        let (e, _) = channel_mean_energy(&h, &KrausChannel::completely_depolarizing(2)).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
        assert!(channel_mean_energy(&h, &KrausChannel::identity(3)).is_err());
    }

    #[test]
    fn pin_weight_linear_solve() {
        // a = 1, b = 0, E = 0.25  =>  lambda = 0.75
        let h = qubit01();
        let (l, anchor) = pin_weight(1.0, 0.25, &h);
        assert_eq!(anchor, Anchor::Ground);
        assert!((l - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pinning_hits_target() {
        let h = Hamiltonian::diagonal(&[0.0, 0.4, 1.3]).unwrap();
        for seed in 0..10 {
            let ch = random_channel(3, 3, 1 + (seed as usize % 9), seed).unwrap();
            let pinned = energy_pinned_mixture(&ch, &h, 0.5).unwrap();
            let (e, _) = channel_mean_energy(&h, &pinned.channel).unwrap();
            assert!((e - 0.5).abs() < 1e-8);
        }

        let beta = beta_from_energy(&qubit01(), 0.3, 1e-12).unwrap().beta;
        let t = crate::channels::make_thermalizer(&qubit01(), beta, 2).unwrap();
        let pinned = energy_pinned_mixture(&t, &qubit01(), 0.3).unwrap();
        assert_eq!(pinned.lambda, 0.0);
        assert_eq!(pinned.anchor, Anchor::None);
        assert_eq!(choi_from_kraus(&pinned.channel), choi_from_kraus(&t));
    }

    #[test]
    fn state_pinning() {
        let h = qubit01();
        let rho = random_density(2, 2, 8).unwrap();
        let (p, _) = pin_state_energy(&rho, &h, 0.3).unwrap();
        assert!((mean_energy(&h, &p).unwrap() - 0.3).abs() < 1e-12);
    }
}

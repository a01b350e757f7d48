//! Channel entropy by multi-start search over pure probes, minimum output
//! entropy, and the two maximum-entropy verification experiments.
//!
//! The channel entropy `S[N] = inf_psi S(A|R)_{(id (x) N)(psi)}` is searched
//! over unit vectors `psi` on `R (x) A'` with `R ~ A'`. Every value returned
//! is an upper bound on the infimum, certified by the probe that produced it.

use num_complex::Complex64;
use rand::Rng;

use crate::channels::{choi_from_kraus, make_thermalizer, random_channel_with, ChoiOperator, KrausChannel};
use crate::densemath::{hermitian_eigenvalues_unchecked, kron, ComplexMatrix};
use crate::entropy::{conditional_entropy, spectrum_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::search::{minimize, normalize, SearchOptions};
use crate::states::{derive_seed, purify_or_embed, random_density_with, random_pure_with, stream_rng, DensityMatrix, PureState};
use crate::thermo::{beta_from_energy, channel_mean_energy_vector, energy_pinned_mixture, pin_state_energy, thermal_state, Hamiltonian};

/// A later start must beat the incumbent by more than this to replace it.
const IMPROVEMENT_MARGIN: f64 = 1e-12;
/// Default restart count (two structured starts plus six random ones).
pub const DEFAULT_RESTARTS: usize = 8;
/// Fact 1 slack on `S(rho) <= S(gamma)`.
pub const FACT1_SLACK: f64 = 1e-8;
/// Fact 1 equality is only allowed this close (max-abs) to the Gibbs state.
pub const FACT1_EQUALITY_DISTANCE: f64 = 1e-6;
const BETA_TOL: f64 = 1e-12;

fn to_params(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_params(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Entropy of the state `sum_k w_k w_k^dagger`, computed on the smaller of
/// the outer-product matrix and the Gram matrix of the `w_k`.
fn entropy_of_vectors(ws: &[Vec<Complex64>]) -> f64 {
    let n = ws[0].len();
    let m = ws.len();
    let mat = if m < n {
        ComplexMatrix::from_fn(m, m, |k, l| ws[k].iter().zip(&ws[l]).map(|(a, b)| a * b.conj()).sum())
    } else {
        ComplexMatrix::from_fn(n, n, |i, j| ws.iter().map(|w| w[i] * w[j].conj()).sum())
    };
    spectrum_entropy(&hermitian_eigenvalues_unchecked(&mat))
}

/// `S(A|R)` of `(id (x) N)(|psi><psi|)` for a unit vector on `R (x) A'`.
fn probe_conditional_entropy(ch: &KrausChannel, amps: &[Complex64]) -> f64 {
    let din = ch.dim_in();
    let dout = ch.dim_out();
    let dr = amps.len() / din;
    // columns of M (dR x dIn): sum_j m_j m_j^dagger = M M^dagger = psi_R
    let cols: Vec<Vec<Complex64>> = (0..din).map(|j| (0..dr).map(|r| amps[r * din + j]).collect()).collect();
    let s_r = entropy_of_vectors(&cols);
    let ws: Vec<Vec<Complex64>> = ch
        .kraus()
        .iter()
        .map(|k| {
            let mut w = Vec::with_capacity(dr * dout);
            for r in 0..dr {
                let row = &amps[r * din..(r + 1) * din];
                for b in 0..dout {
                    w.push((0..din).map(|j| k[(b, j)] * row[j]).sum());
                }
            }
            w
        })
        .collect();
    entropy_of_vectors(&ws) - s_r
}

/// `S(N(|v><v|))` for a unit input vector.
fn output_entropy(ch: &KrausChannel, v: &[Complex64]) -> f64 {
    let ws: Vec<Vec<Complex64>> = ch.kraus().iter().map(|k| k.matvec(v)).collect();
    entropy_of_vectors(&ws)
}

/// Upper bound on a channel's entropy together with the probe attaining it.
#[derive(Debug, Clone)]
pub struct EntropyCertificate {
    pub channel_id: String,
    /// Nats.
    pub value: f64,
    /// Minimizing probe on `R (x) A'`, `R ~ A'`.
    pub witness: PureState,
    pub restarts_used: usize,
    /// Whether the start that produced `witness` ran to the step tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

impl EntropyCertificate {
    /// `S(A|R)` at the witness, recomputed through the general state path.
    pub fn recompute(&self, ch: &KrausChannel) -> Result<f64> {
        let psi = purify_or_embed(&self.witness, ch.dim_in(), ch.dim_in())?;
        Ok(conditional_entropy(&crate::channels::apply_extended(ch, &psi)?).nats())
    }
}

/// Settings for [`channel_entropy_with`].
#[derive(Debug, Clone)]
pub struct ChannelEntropyOptions {
    /// Maximally entangled start, random product start, then random starts.
    pub restarts: usize,
    pub tol: f64,
    /// Evaluation budget per start.
    pub max_evals: usize,
    /// Additional probes tried after the regular schedule.
    pub extra_starts: Vec<PureState>,
    pub channel_id: String,
}

impl Default for ChannelEntropyOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            tol: 1e-7,
            max_evals: 20_000,
            extra_starts: Vec::new(),
            channel_id: String::from("channel"),
        }
    }
}

/// Channel entropy with default budgets.
pub fn channel_entropy(ch: &KrausChannel, restarts: usize, tol: f64, seed: u64) -> Result<EntropyCertificate> {
    let opts = ChannelEntropyOptions { restarts, tol, ..ChannelEntropyOptions::default() };
    channel_entropy_with(ch, &opts, seed)
}

/// Multi-start pattern search for `inf_psi S(A|R)`.
///
/// Start `k` uses the random stream `(seed, k)`, so the first `n` starts are
/// the same for every `restarts >= n` and the reported value can only go
/// down as `restarts` grows.
pub fn channel_entropy_with(ch: &KrausChannel, opts: &ChannelEntropyOptions, seed: u64) -> Result<EntropyCertificate> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let din = ch.dim_in();
    for s in &opts.extra_starts {
        if s.dim() != din * din {
            return Err(Error::DimensionMismatch(format!(
                "extra start has dim {}, expected {}",
                s.dim(),
                din * din
            )));
        }
    }
    let objective = |x: &[f64]| probe_conditional_entropy(ch, &from_params(x));
    let search = SearchOptions { initial_step: 0.25, tol: opts.tol, max_evals: opts.max_evals };

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut evaluations = 0;
    let total = opts.restarts + opts.extra_starts.len();
    for k in 0..total {
        let start = if k < opts.restarts {
            let mut rng = stream_rng(seed, k as u64);
            match k {
                0 => PureState::maximally_entangled(din),
                1 => PureState::product(&random_pure_with(din, &mut rng), &random_pure_with(din, &mut rng)),
                _ => random_pure_with(din * din, &mut rng),
            }
        } else {
            opts.extra_starts[k - opts.restarts].clone()
        };
        let out = minimize(&objective, to_params(start.amplitudes()), &search, Some(normalize));
        evaluations += out.evaluations;
        let better = match &best {
            None => true,
            Some((v, _, _)) => out.value < v - IMPROVEMENT_MARGIN,
        };
        if better {
            best = Some((out.value, out.x, out.converged));
        }
    }
    let (value, x, converged) = best.expect("at least one start");
    let witness = PureState::normalized(from_params(&x))?;
    Ok(EntropyCertificate {
        channel_id: opts.channel_id.clone(),
        value,
        witness,
        restarts_used: total,
        converged,
        evaluations,
    })
}

/// Minimum output entropy with the witness input.
#[derive(Debug, Clone)]
pub struct MinOutputEntropy {
    pub value: f64,
    pub witness: PureState,
    pub converged: bool,
}

/// `inf_rho S(N(rho))`, searched over pure inputs.
///
/// Pure inputs suffice: every state is a convex combination of pure states,
/// `N` is linear and the entropy is concave, so `S(N(rho))` is at least the
/// smallest `S(N(|v><v|))` among the pure components. Starts: `|0>`, then
/// Haar-random vectors from streams `(seed, k)`.
pub fn min_output_entropy(ch: &KrausChannel, restarts: usize, seed: u64) -> Result<MinOutputEntropy> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let din = ch.dim_in();
    let objective = |x: &[f64]| output_entropy(ch, &from_params(x));
    let search = SearchOptions::default();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for k in 0..restarts {
        let start = if k == 0 {
            PureState::basis(din, 0)
        } else {
            random_pure_with(din, &mut stream_rng(seed, k as u64))
        };
        let out = minimize(&objective, to_params(start.amplitudes()), &search, Some(normalize));
        if best.as_ref().is_none_or(|(v, _, _)| out.value < v - IMPROVEMENT_MARGIN) {
            best = Some((out.value, out.x, out.converged));
        }
    }
    let (value, x, converged) = best.expect("at least one start");
    Ok(MinOutputEntropy { value, witness: PureState::normalized(from_params(&x))?, converged })
}

/// Summary of a Fact 1 sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct Fact1Report {
    pub target_energy: f64,
    pub beta: f64,
    /// `S(gamma^{beta(E)})`.
    pub ceiling: f64,
    pub samples: usize,
    /// Samples with `S(rho) > ceiling + 1e-8`.
    pub violations: usize,
    /// Samples within `1e-8` of the ceiling but farther than `1e-6` from the Gibbs state.
    pub equality_violations: usize,
    pub max_entropy: f64,
    pub min_gap: f64,
}

/// `S(gamma^{beta(E)}) - S(rho)` for a state already at energy `E`.
pub fn fact1_gap(h: &Hamiltonian, target: f64, rho: &DensityMatrix) -> Result<f64> {
    let spec = beta_from_energy(h, target, BETA_TOL)?;
    let (gamma, _) = thermal_state(h, spec.beta)?;
    Ok(von_neumann_entropy(&gamma).nats() - von_neumann_entropy(rho).nats())
}

/// Samples random states of varying rank, pins each to energy `target` by
/// mixing with the opposite-side spectral projector, and checks that none
/// beats the Gibbs entropy.
pub fn verify_fact1(h: &Hamiltonian, target: f64, samples: usize, seed: u64) -> Result<Fact1Report> {
    let spec = beta_from_energy(h, target, BETA_TOL)?;
    let (gamma, _) = thermal_state(h, spec.beta)?;
    let ceiling = von_neumann_entropy(&gamma).nats();
    let d = h.dim();
    let mut report = Fact1Report {
        target_energy: target,
        beta: spec.beta,
        ceiling,
        samples,
        violations: 0,
        equality_violations: 0,
        max_entropy: f64::NEG_INFINITY,
        min_gap: f64::INFINITY,
    };
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64 + 1);
        let rank = 1 + i % d;
        let rho = random_density_with(d, rank, &mut rng)?;
        let (pinned, _) = pin_state_energy(&rho, h, target)?;
        let s = von_neumann_entropy(&pinned).nats();
        let gap = ceiling - s;
        if s > ceiling + FACT1_SLACK {
            report.violations += 1;
        }
        if gap.abs() <= FACT1_SLACK && pinned.distance(&gamma) > FACT1_EQUALITY_DISTANCE {
            report.equality_violations += 1;
        }
        report.max_entropy = report.max_entropy.max(s);
        report.min_gap = report.min_gap.min(gap);
    }
    Ok(report)
}

/// Thresholds and budgets for [`verify_theorem1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremOptions {
    /// Allowed excess of a certificate over the thermal ceiling.
    pub slack: f64,
    /// Samples with a gap below this must be close to the thermalizer.
    pub gap_threshold: f64,
    /// Maximum Choi distance allowed for small-gap samples.
    pub choi_delta: f64,
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self { slack: 1e-6, gap_threshold: 1e-4, choi_delta: 1e-2, tol: 1e-7, max_evals: 20_000 }
    }
}

/// One channel checked against the thermal ceiling.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub certificate: EntropyCertificate,
    /// Channel mean energy after pinning.
    pub pinned_energy: f64,
    pub energy_residual: f64,
    /// `ceiling - certificate.value`.
    pub gap: f64,
    /// Max-abs distance between the channel's Choi matrix and `1 (x) gamma`.
    pub choi_distance: f64,
    /// Weight of the replacer anchor used for pinning.
    pub lambda: f64,
}

/// Outcome of a Theorem 1 run at one target energy.
#[derive(Debug, Clone)]
pub struct TheoremVerdict {
    pub target_energy: f64,
    pub beta: f64,
    /// `S(gamma^{beta(E)})`.
    pub thermal_entropy: f64,
    pub thermalizer: SampleRecord,
    pub samples: Vec<SampleRecord>,
    /// Samples whose certificate exceeds the ceiling by more than the slack.
    pub violations: usize,
    /// Samples with a gap below the threshold but far from the thermalizer.
    pub only_if_violations: usize,
    /// Thermalizer certificate within the slack of the ceiling and its Choi
    /// matrix within `1e-10` of `1 (x) gamma`.
    pub thermalizer_ok: bool,
}

impl TheoremVerdict {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.only_if_violations == 0 && self.thermalizer_ok
    }
}

fn thermal_choi(gamma: &DensityMatrix, dim_in: usize) -> ChoiOperator {
    ChoiOperator::new(dim_in, gamma.dim(), kron(&ComplexMatrix::identity(dim_in), gamma.matrix()))
        .expect("1 (x) gamma is a valid Choi operator")
}

/// Checks the channel maximum-entropy principle at one energy.
///
/// (a) The thermalizer's certificate must match `S(gamma)`. (b) Random
/// channels pinned to mean energy `target` must have certificates at most
/// `S(gamma) + slack`; certificates are upper bounds on `S[N]`, so this is
/// a sound check of the inequality. Each sample also gets the product probe
/// `|0> (x) v_max`, with `v_max` the input attaining the channel mean energy.
/// (c) Samples whose gap is below `gap_threshold` must lie within
/// `choi_delta` of the thermalizer; this is evidence for the equality case,
/// not a proof.
pub fn verify_theorem1(
    h: &Hamiltonian,
    target: f64,
    samples: usize,
    restarts: usize,
    seed: u64,
    opts: &TheoremOptions,
) -> Result<TheoremVerdict> {
    let spec = beta_from_energy(h, target, BETA_TOL)?;
    let (gamma, _) = thermal_state(h, spec.beta)?;
    let ceiling = von_neumann_entropy(&gamma).nats();
    let d = h.dim();
    let reference = thermal_choi(&gamma, d);

    let run = |ch: &KrausChannel, id: String, lambda: f64, s: u64| -> Result<SampleRecord> {
        let (energy, v_max) = channel_mean_energy_vector(h, ch)?;
        let product = PureState::product(&PureState::basis(d, 0), &v_max);
        let ce = ChannelEntropyOptions {
            restarts,
            tol: opts.tol,
            max_evals: opts.max_evals,
            extra_starts: vec![product],
            channel_id: id,
        };
        let certificate = channel_entropy_with(ch, &ce, s)?;
        Ok(SampleRecord {
            gap: ceiling - certificate.value,
            choi_distance: choi_from_kraus(ch).distance(&reference),
            certificate,
            pinned_energy: energy,
            energy_residual: energy - target,
            lambda,
        })
    };

    let thermalizer_channel = make_thermalizer(h, spec.beta, d)?;
    let thermalizer = run(&thermalizer_channel, "thermalizer".into(), 1.0, derive_seed(seed, 0))?;
    let thermalizer_ok = thermalizer.gap.abs() <= opts.slack && thermalizer.choi_distance <= 1e-10;

    let mut records = Vec::with_capacity(samples);
    for i in 0..samples {
        let sample_seed = derive_seed(seed, i as u64 + 1);
        let mut rng = stream_rng(sample_seed, 0);
        let env = rng.random_range(1..=d * d);
        let ch = random_channel_with(d, d, env, &mut rng)?;
        let pinned = energy_pinned_mixture(&ch, h, target)?;
        records.push(run(&pinned.channel, format!("{i}"), pinned.lambda, derive_seed(sample_seed, 1))?);
    }

    let violations = records.iter().filter(|r| r.certificate.value > ceiling + opts.slack).count();
    let only_if_violations = records
        .iter()
        .filter(|r| r.gap < opts.gap_threshold && r.choi_distance >= opts.choi_delta)
        .count();
    Ok(TheoremVerdict {
        target_energy: target,
        beta: spec.beta,
        thermal_entropy: ceiling,
        thermalizer,
        samples: records,
        violations,
        only_if_violations,
        thermalizer_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_replacer, random_channel};
    use crate::states::random_density;
    use std::f64::consts::LN_2;

    #[test]
    fn replacer_certificate_is_flat() {
        let omega = random_density(2, 2, 3).unwrap();
        let cert = channel_entropy(&make_replacer(&omega, 2), 3, 1e-7, 1).unwrap();
        assert!((cert.value - von_neumann_entropy(&omega).nats()).abs() < 1e-9);
    }

    #[test]
    fn identity_channel_is_minus_ln2() {
        let cert = channel_entropy(&KrausChannel::identity(2), 4, 1e-7, 5).unwrap();
        assert!((cert.value + LN_2).abs() < 1e-4);
        assert!(cert.witness.fidelity(&PureState::maximally_entangled(2)) >= 0.999);
        assert!((cert.recompute(&KrausChannel::identity(2)).unwrap() - cert.value).abs() < 1e-9);
    }

    #[test]
    fn depolarizing_is_ln2() {
        let cert = channel_entropy(&KrausChannel::completely_depolarizing(2), 3, 1e-7, 2).unwrap();
        assert!((cert.value - LN_2).abs() < 1e-6);
    }

    #[test]
    fn min_output_entropy_examples() {
        let omega = random_density(3, 3, 4).unwrap();
        let moe = min_output_entropy(&make_replacer(&omega, 2), 2, 1).unwrap();
        assert!((moe.value - von_neumann_entropy(&omega).nats()).abs() < 1e-10);
        let u = random_channel(3, 3, 1, 8).unwrap();
        assert!(min_output_entropy(&u, 2, 1).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn zero_restarts_rejected() {
        assert!(channel_entropy(&KrausChannel::identity(2), 0, 1e-7, 1).is_err());
        assert!(min_output_entropy(&KrausChannel::identity(2), 0, 1).is_err());
    }

    #[test]
    fn fact1_examples() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]).unwrap();
        let spec = beta_from_energy(&h, 0.3, 1e-12).unwrap();
        let (gamma, _) = thermal_state(&h, spec.beta).unwrap();
        assert!(fact1_gap(&h, 0.3, &gamma).unwrap().abs() < 1e-12);

        let r = verify_fact1(&h, 0.5, 10, 1).unwrap();
        assert!((r.ceiling - LN_2).abs() < 1e-12);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn theorem_with_no_samples() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]).unwrap();
        let v = verify_theorem1(&h, 0.3, 0, 2, 7, &TheoremOptions::default()).unwrap();
        assert!(v.samples.is_empty());
        assert!(v.thermalizer_ok);
        assert!(v.thermalizer.gap.abs() <= 1e-6);
        assert!(v.thermalizer.choi_distance <= 1e-10);
        assert!(v.passed());
    }
}

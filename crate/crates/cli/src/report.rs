//! Verification report: a fenced CSV block followed by a prose summary.
//!
//! The CSV block depends only on the config, so two runs of the same config
//! produce byte-identical blocks.

use std::fmt::Write as _;

use qmaxent::maxent::{Fact1Report, SampleRecord, TheoremVerdict};

pub const CSV_HEADER: &str =
    "sample_id,pinned_energy,energy_residual,certificate,thermal_ceiling,gap,choi_distance,converged";
pub const FENCE_OPEN: &str = "```csv";
pub const FENCE_CLOSE: &str = "```";

/// Twelve significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// Results for one target energy.
#[derive(Debug, Clone)]
pub struct EnergyResult {
    pub fact1: Fact1Report,
    pub theorem: TheoremVerdict,
}

impl EnergyResult {
    pub fn passed(&self) -> bool {
        self.fact1.violations == 0 && self.fact1.equality_violations == 0 && self.theorem.passed()
    }
}

fn row(out: &mut String, id: &str, rec: &SampleRecord, ceiling: f64) {
    let _ = writeln!(
        out,
        "{id},{},{},{},{},{},{},{}",
        sci(rec.pinned_energy),
        sci(rec.energy_residual),
        sci(rec.certificate.value),
        sci(ceiling),
        sci(rec.gap),
        sci(rec.choi_distance),
        rec.certificate.converged
    );
}

/// The machine-readable block including its fences.
pub fn machine_block(results: &[EnergyResult]) -> String {
    let mut out = String::new();
    out.push_str(FENCE_OPEN);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (k, r) in results.iter().enumerate() {
        let t = &r.theorem;
        row(&mut out, &format!("e{k}-thermalizer"), &t.thermalizer, t.thermal_entropy);
        for (i, s) in t.samples.iter().enumerate() {
            row(&mut out, &format!("e{k}-{i}"), s, t.thermal_entropy);
        }
    }
    out.push_str(FENCE_CLOSE);
    out.push('\n');
    out
}

/// Extracts the fenced block from a full report.
pub fn extract_machine_block(report: &str) -> Option<&str> {
    let start = report.find(FENCE_OPEN)?;
    let rest = &report[start + FENCE_OPEN.len()..];
    let end = rest.find(&format!("\n{FENCE_CLOSE}"))?;
    Some(&report[start..start + FENCE_OPEN.len() + end + 1 + FENCE_CLOSE.len()])
}

fn gap_stats(samples: &[SampleRecord]) -> Option<(f64, f64, f64)> {
    if samples.is_empty() {
        return None;
    }
    let mut gaps: Vec<f64> = samples.iter().map(|s| s.gap).collect();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    let median = if n % 2 == 1 { gaps[n / 2] } else { 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]) };
    Some((gaps[0], median, gaps[n - 1]))
}

/// Prose summary of a run.
pub fn summary(hamiltonian: &str, dim: usize, seed: u64, results: &[EnergyResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## Summary");
    let _ = writeln!(out);
    let _ = writeln!(out, "Hamiltonian {hamiltonian} (dim {dim}), seed {seed}.");
    for (k, r) in results.iter().enumerate() {
        let (f, t) = (&r.fact1, &r.theorem);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Energy e{k} = {}: beta = {}, thermal ceiling S(gamma) = {} nats.",
            sci(t.target_energy),
            sci(t.beta),
            sci(t.thermal_entropy)
        );
        let _ = writeln!(
            out,
            "  States: {} pinned samples, {} violations, {} equality violations, max entropy {}, min gap {}.",
            f.samples,
            f.violations,
            f.equality_violations,
            if f.samples > 0 { sci(f.max_entropy) } else { "n/a".into() },
            if f.samples > 0 { sci(f.min_gap) } else { "n/a".into() }
        );
        let _ = writeln!(
            out,
            "  Thermalizer: gap {}, Choi distance {} ({}).",
            sci(t.thermalizer.gap),
            sci(t.thermalizer.choi_distance),
            if t.thermalizer_ok { "ok" } else { "FAILED" }
        );
        let _ = writeln!(
            out,
            "  Channels: {} pinned samples, {} violations, {} small-gap samples far from the thermalizer.",
            t.samples.len(),
            t.violations,
            t.only_if_violations
        );
        if let Some((lo, mid, hi)) = gap_stats(&t.samples) {
            let _ = writeln!(out, "  Gap min/median/max: {} / {} / {}.", sci(lo), sci(mid), sci(hi));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out);
    if failed == 0 {
        let _ = writeln!(out, "Result: PASS (no violations).");
    } else {
        let _ = writeln!(out, "Result: FAIL ({failed} energies with violations).");
    }
    let _ = writeln!(
        out,
        "Note: the small-gap threshold and Choi-distance bound used for the equality case are conventions, not derived tolerances."
    );
    out
}

/// Full report text.
pub fn render(hamiltonian: &str, dim: usize, seed: u64, results: &[EnergyResult]) -> String {
    let mut out = String::from("# qmaxent verification report\n\n");
    out.push_str(&machine_block(results));
    out.push('\n');
    out.push_str(&summary(hamiltonian, dim, seed, results));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(0.3), "3.00000000000e-1");
        assert_eq!(sci(-std::f64::consts::LN_2), "-6.93147180560e-1");
    }

    #[test]
    fn extract_block() {
        let report = format!("# t\n\n{FENCE_OPEN}\n{CSV_HEADER}\na,b\n{FENCE_CLOSE}\n\n## Summary\n");
        let block = extract_machine_block(&report).unwrap();
        assert!(block.starts_with(FENCE_OPEN));
        assert!(block.ends_with(FENCE_CLOSE));
        assert!(block.contains("a,b"));
    }
}

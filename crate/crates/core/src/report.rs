//! Report types shared by the verification pipelines.

use serde::{Deserialize, Serialize};

/// How a check decided pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `|difference| <= sigma_level * combined se + allowance`.
    MeanSigma,
    /// Bootstrap-calibrated two-sample KS: pass iff `p_value > alpha`.
    KsBootstrap,
    /// Deterministic numeric identity: pass iff `statistic <= threshold`.
    Exact,
}

/// One verified sub-identity (one functional, one level, one window, ...).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: CheckKind,
    /// The discrepancy the check thresholds: `|difference|` for mean checks,
    /// the KS statistic for distributional checks, the max error for exact
    /// checks.
    pub statistic: f64,
    /// Tolerance for mean/exact checks, alpha for bootstrap checks.
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    /// Combined Monte Carlo standard error, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    /// Human-readable summary of the two compared quantities.
    pub detail: String,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn mean_sigma(name: impl Into<String>, cmp: &crate::stattest::MeanComparison) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::MeanSigma,
            statistic: cmp.difference,
            threshold: cmp.tolerance,
            p_value: None,
            se: Some((cmp.se_a * cmp.se_a + cmp.se_b * cmp.se_b).sqrt()),
            detail: format!(
                "{:.6} vs {:.6} (se {:.2e}, {} sigma)",
                cmp.mean_a,
                cmp.mean_b,
                (cmp.se_a * cmp.se_a + cmp.se_b * cmp.se_b).sqrt(),
                cmp.sigma_level
            ),
            pass: cmp.pass,
        }
    }

    pub fn ks_bootstrap(name: impl Into<String>, statistic: f64, p_value: f64, alpha: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::KsBootstrap,
            statistic,
            threshold: alpha,
            p_value: Some(p_value),
            se: None,
            detail: format!("D = {statistic:.4}, p = {p_value:.4}"),
            pass: p_value > alpha,
        }
    }

    pub fn exact(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Exact,
            statistic,
            threshold,
            p_value: None,
            se: None,
            detail: format!("max error {statistic:.3e} (tolerance {threshold:.1e})"),
            pass: statistic <= threshold,
        }
    }
}

/// Discretization and horizon bookkeeping: every quantity that could bias an
/// estimate is counted so a report is auditable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BiasAudit {
    /// Ensemble size requested.
    pub samples: u64,
    /// Paths dropped because a passage or horizon requirement failed.
    pub rejected: u64,
    /// Paths continued beyond their initial horizon.
    pub extended: u64,
    /// Palm windows that carried no record mass (weight-zero samples).
    pub empty_windows: u64,
    /// Quadrature nodes whose inner window carried no record mass.
    pub degenerate_nodes: u64,
    /// Largest tolerated rejected fraction before a run is inconclusive.
    pub rejection_cap: f64,
}

impl BiasAudit {
    pub fn rejection_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.rejected as f64 / self.samples as f64
        }
    }

    pub fn conclusive(&self) -> bool {
        self.rejection_fraction() <= self.rejection_cap
    }
}

/// Outcome of one distributional identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub audit: BiasAudit,
    /// False when the rejection cap was exceeded; such a run is neither a
    /// pass nor a statistical failure.
    pub conclusive: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(
        identity: impl Into<String>,
        seed: u64,
        checks: Vec<CheckOutcome>,
        audit: BiasAudit,
    ) -> Self {
        let conclusive = audit.conclusive();
        let pass = conclusive && checks.iter().all(|c| c.pass);
        Self {
            identity: identity.into(),
            seed,
            checks,
            audit,
            conclusive,
            pass,
        }
    }

    /// Recomputes the pass flag from the recorded numbers; used to confirm a
    /// stored report is internally consistent.
    pub fn recomputed_pass(&self) -> bool {
        self.audit.conclusive()
            && self.checks.iter().all(|c| match c.kind {
                CheckKind::KsBootstrap => c.p_value.map(|p| p > c.threshold).unwrap_or(false),
                _ => c.statistic <= c.threshold,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_the_numbers() {
        let checks = vec![
            CheckOutcome::exact("a", 1e-13, 1e-12),
            CheckOutcome::ks_bootstrap("b", 0.02, 0.44, 0.01),
        ];
        let report = VerificationReport::new("demo", 1, checks, BiasAudit::default());
        assert!(report.pass);
        assert_eq!(report.pass, report.recomputed_pass());

        let failing = vec![CheckOutcome::exact("a", 1.0, 1e-12)];
        let report = VerificationReport::new("demo", 1, failing, BiasAudit::default());
        assert!(!report.pass);
        assert_eq!(report.pass, report.recomputed_pass());
    }

    #[test]
    fn rejection_cap_makes_a_run_inconclusive() {
        let audit = BiasAudit {
            samples: 100,
            rejected: 10,
            rejection_cap: 0.02,
            ..Default::default()
        };
        let report = VerificationReport::new(
            "demo",
            1,
            vec![CheckOutcome::exact("a", 0.0, 1.0)],
            audit,
        );
        assert!(!report.conclusive);
        assert!(!report.pass);
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = VerificationReport::new(
            "demo",
            42,
            vec![CheckOutcome::ks_bootstrap("x", 0.1, 0.2, 0.01)],
            BiasAudit {
                samples: 10,
                ..Default::default()
            },
        );
        let json = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.identity, report.identity);
        assert_eq!(back.pass, report.pass);
    }
}

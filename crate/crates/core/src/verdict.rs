//! Machine-readable verdicts and the effective tolerance set.

use serde::{Deserialize, Serialize};

/// Outcome of a verification suite: pass/fail, worst observed violation, and
/// human-readable witnesses for failures (empty on pass).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub max_violation: f64,
    pub witnesses: Vec<String>,
}

impl Verdict {
    pub fn pass(max_violation: f64) -> Self {
        Verdict {
            pass: true,
            max_violation,
            witnesses: Vec::new(),
        }
    }

    pub fn fail(max_violation: f64, witnesses: Vec<String>) -> Self {
        Verdict {
            pass: false,
            max_violation,
            witnesses,
        }
    }

    /// Collapse an observation: pass iff the violation stays under `tol`.
    pub fn from_violation(max_violation: f64, tol: f64, witnesses: Vec<String>) -> Self {
        Verdict {
            pass: max_violation < tol && witnesses.is_empty(),
            max_violation,
            witnesses,
        }
    }
}

/// Every tolerance and scale parameter used by the verification suites.
///
/// Defaults are the documented contract; all of them can be overridden from a
/// config file. Reports embed the effective set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSet {
    /// Chart → ambient → chart round trip agreement.
    pub chart_roundtrip: f64,
    /// Chart equivariance: ‖chart(t·x) − ρ(t)·chart(x)‖.
    pub chart_equivariance: f64,
    /// Flow semigroup law and flow equivariance.
    pub flow_identity: f64,
    /// Trajectory-following limit detection: chart-local norm threshold.
    pub limit_detection: f64,
    /// RK4 against the exact flow at the default step.
    pub rk4_vs_exact: f64,
    /// Field norm at a fixed point must stay below this.
    pub zero_set_at_fixed: f64,
    /// Field norm at a generic sample must stay above this.
    pub zero_set_generic_min: f64,
    /// Global field norm at the decay horizon.
    pub norm_decay_final: f64,
    /// Partition-of-unity sum against 1.
    pub pou_sum: f64,
    /// Closed-form flow norm against direct metric evaluation.
    pub metric_closed_form: f64,
    /// Numeric weight inference: distance from the nearest integer.
    pub weight_inference_residual: f64,
    /// Chart-exit threshold: a trajectory leaves when any |w_i| > 1/margin.
    pub switch_margin: f64,
    /// Default RK4 step.
    pub rk4_step: f64,
    /// Radius for unstable-direction seeds in the connection poset.
    pub seeding_radius: f64,
    /// Trajectory horizon: S_max = horizon_factor / min|a_i|.
    pub horizon_factor: f64,
    /// Norm-decay horizon: s_final = decay_horizon_factor / min|a_i|.
    pub decay_horizon_factor: f64,
    /// Partition-of-unity bump radius in chart coordinates.
    pub bump_radius: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            chart_roundtrip: 1e-10,
            chart_equivariance: 1e-10,
            flow_identity: 1e-9,
            limit_detection: 1e-9,
            rk4_vs_exact: 1e-6,
            zero_set_at_fixed: 1e-12,
            zero_set_generic_min: 1e-3,
            norm_decay_final: 1e-6,
            pou_sum: 1e-10,
            metric_closed_form: 1e-10,
            weight_inference_residual: 1e-6,
            switch_margin: 0.1,
            rk4_step: 1e-3,
            seeding_radius: 1e-4,
            horizon_factor: 200.0,
            decay_horizon_factor: 60.0,
            bump_radius: 10.0,
        }
    }
}

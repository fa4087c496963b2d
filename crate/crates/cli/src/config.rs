//! Run configuration: command parameters read from an optional TOML file.
//!
//! Every key has a default, so an empty file (or no file) is a valid
//! configuration.  Unknown keys are rejected with their location.

use std::str::FromStr;

use lcext::lcv::QuadratureSpec;
use lcext::Q;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub eps_schedule: Vec<f64>,
    pub nodes_per_axis: usize,
    pub max_nodes_per_axis: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub divergence_threshold: f64,
    pub zero_ratio: f64,
    pub quad_rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let s = QuadratureSpec::default();
        QuadratureConfig {
            eps_schedule: s.eps_schedule,
            nodes_per_axis: s.nodes_per_axis,
            max_nodes_per_axis: s.max_nodes_per_axis,
            abs_tol: s.abs_tol,
            rel_tol: s.rel_tol,
            divergence_threshold: s.divergence_threshold,
            zero_ratio: s.zero_ratio,
            quad_rel_tol: s.quad_rel_tol,
        }
    }
}

impl QuadratureConfig {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            eps_schedule: self.eps_schedule.clone(),
            nodes_per_axis: self.nodes_per_axis,
            max_nodes_per_axis: self.max_nodes_per_axis,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            divergence_threshold: self.divergence_threshold,
            zero_ratio: self.zero_ratio,
            quad_rel_tol: self.quad_rel_tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpsConfig {
    /// Upper end of the scanned m-range (rational string); defaults to m1.
    pub m_max: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdealConfig {
    /// m-values (rational strings); empty means 0, m0 and every jump up to m1.
    pub m_values: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcvConfig {
    pub sigma_min: usize,
    /// Defaults to the chart dimension.
    pub sigma_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsConfig {
    pub sigmas: Vec<u32>,
    pub eps: f64,
    pub ell: f64,
    pub delta: f64,
    pub cut_a: f64,
    pub cut_b: f64,
    pub eps0: f64,
    pub grid_points: usize,
    /// Lower the ψ shift to the normalised value before checking.
    pub normalize: bool,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig {
            sigmas: vec![1, 2, 3],
            eps: 0.01,
            ell: 1.0,
            delta: 1.0,
            cut_a: 4.0,
            cut_b: 2.0,
            eps0: 0.0,
            grid_points: 2000,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtendConfig {
    pub ell: f64,
    pub delta: f64,
    pub eps: f64,
    pub tolerance_factor: f64,
    pub normalize: bool,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig {
            ell: 1.0,
            delta: 1.0,
            eps: 0.01,
            tolerance_factor: 3.0,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrabilityConfig {
    pub pole_radii: Vec<f64>,
    /// Relative tolerance of the pole limit against π/2.
    pub pole_tolerance: f64,
    pub membership_a: Vec<i64>,
    pub membership_p: Vec<f64>,
    pub membership_s: Vec<f64>,
    pub membership_r0: Vec<f64>,
    /// `[s, δ]` pairs.
    pub ladders: Vec<[f64; 2]>,
    pub hormander_sigma: u32,
    pub hormander_eps: f64,
    pub hormander_ell: f64,
    pub hormander_b: f64,
    pub hormander_points: usize,
}

impl Default for IntegrabilityConfig {
    fn default() -> Self {
        IntegrabilityConfig {
            pole_radii: vec![(-0.5f64).exp(), (-1.0f64).exp(), (-2.0f64).exp()],
            pole_tolerance: 0.01,
            membership_a: vec![-1, 0, 1, 2],
            membership_p: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            membership_s: vec![-2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
            membership_r0: vec![0.5, 1.0],
            ladders: vec![[3.0, 0.5], [1.2, 0.1], [5.0, 0.25]],
            hormander_sigma: 1,
            hormander_eps: 0.1,
            hormander_ell: 1.0,
            hormander_b: 1.0,
            hormander_points: 48,
        }
    }
}

/// All command parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Reserved; every computation is deterministic.
    pub seed: Option<u64>,
    pub quadrature: QuadratureConfig,
    pub jumps: JumpsConfig,
    pub ideal: IdealConfig,
    pub lcv: LcvConfig,
    pub weights: WeightsConfig,
    pub extend: ExtendConfig,
    pub integrability: IntegrabilityConfig,
}

/// Parses a rational config value.
pub fn parse_q(key: &str, text: &str) -> CliResult<Q> {
    Q::from_str(text.trim()).map_err(|e| CliError::Parse {
        file: "config".to_string(),
        message: format!("key `{key}`: `{text}` is not a rational p/q ({e})"),
    })
}

impl RunConfig {
    /// Parses a TOML document; `file` names it in diagnostics.
    pub fn parse(file: &str, text: &str) -> CliResult<RunConfig> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse {
            file: file.to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical serialisation, the input of the config hash.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config always serialises")
    }

    /// Checks that tolerances are positive and the ε schedule decreases.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Precondition(format!("invalid config: {msg}")));
        self.quadrature.spec().validate().map_err(CliError::from)?;
        let w = &self.weights;
        for (key, v) in [
            ("weights.eps", w.eps),
            ("weights.ell", w.ell),
            ("weights.delta", w.delta),
            ("extend.ell", self.extend.ell),
            ("extend.delta", self.extend.delta),
            ("extend.eps", self.extend.eps),
            ("extend.tolerance_factor", self.extend.tolerance_factor),
            (
                "integrability.pole_tolerance",
                self.integrability.pole_tolerance,
            ),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("`{key}` must be positive, got {v}"));
            }
        }
        if w.grid_points < 2 {
            return fail("`weights.grid_points` must be at least 2".to_string());
        }
        if w.sigmas.contains(&0) {
            return fail("`weights.sigmas` entries must be at least 1".to_string());
        }
        if let Some(m) = &self.jumps.m_max {
            parse_q("jumps.m_max", m)?;
        }
        for (i, m) in self.ideal.m_values.iter().enumerate() {
            parse_q(&format!("ideal.m_values[{i}]"), m)?;
        }
        Ok(())
    }
}

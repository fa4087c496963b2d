//! The versioned chart file format.
//!
//! ```toml
//! version = 1
//! n = 2
//! radii = [0.5, 0.5]
//! m0 = "1/2"
//! m1 = "1"
//!
//! [phiL]
//! coeffs = ["0", "0"]
//! shift = 0.0
//!
//! [psi]
//! coeffs = ["1", "1"]
//! shift = 0.0
//!
//! [[sections]]
//! exponents = [0, 0]
//! amplitude = 1.0
//! support_radius = [0.5, 0.5]
//! ```
//!
//! Rationals are strings `"p/q"` or `"p"`.  Floats are written in shortest
//! round-trip form, so a written chart re-parses to identical values.

use std::str::FromStr;

use lcext::snc_model::{
    validate_chart, validate_sections, DiagonalWeight, MonomialSection, MultiMonomialSection,
    SncChart,
};
use lcext::Q;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// The only chart format version understood by this tool.
pub const CHART_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    coeffs: Vec<String>,
    shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionFile {
    exponents: Vec<u32>,
    amplitude: f64,
    support_radius: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartFile {
    version: u32,
    n: usize,
    radii: Vec<f64>,
    m0: String,
    m1: String,
    #[serde(rename = "phiL")]
    phi_l: WeightFile,
    psi: WeightFile,
    #[serde(default)]
    sections: Vec<SectionFile>,
}

/// A parsed chart with its (possibly empty) list of sections.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartData {
    pub chart: SncChart,
    pub sections: Vec<MonomialSection>,
}

impl ChartData {
    /// The sections as a multi-monomial section.
    pub fn multi_section(&self) -> CliResult<MultiMonomialSection> {
        MultiMonomialSection::new(self.sections.clone()).map_err(CliError::from)
    }
}

fn parse_q(file: &str, key: &str, text: &str) -> CliResult<Q> {
    Q::from_str(text.trim()).map_err(|e| CliError::Parse {
        file: file.to_string(),
        message: format!("key `{key}`: `{text}` is not a rational p/q ({e})"),
    })
}

/// Parses and validates a chart document; `file` names it in diagnostics.
pub fn parse_chart(file: &str, text: &str) -> CliResult<ChartData> {
    let raw: ChartFile = toml::from_str(text).map_err(|e| CliError::Parse {
        file: file.to_string(),
        message: e.to_string(),
    })?;
    if raw.version != CHART_VERSION {
        return Err(CliError::Parse {
            file: file.to_string(),
            message: format!(
                "key `version`: unsupported chart version {} (expected {CHART_VERSION})",
                raw.version
            ),
        });
    }
    let weight = |key: &str, w: &WeightFile| -> CliResult<DiagonalWeight> {
        let coeffs = w
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| parse_q(file, &format!("{key}.coeffs[{i}]"), c))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(DiagonalWeight::new(coeffs, w.shift))
    };
    let chart = SncChart {
        n: raw.n,
        radii: raw.radii,
        phi_l: weight("phiL", &raw.phi_l)?,
        psi: weight("psi", &raw.psi)?,
        m0: parse_q(file, "m0", &raw.m0)?,
        m1: parse_q(file, "m1", &raw.m1)?,
    };
    let sections: Vec<MonomialSection> = raw
        .sections
        .into_iter()
        .map(|s| MonomialSection::new(s.exponents, s.amplitude, s.support_radius))
        .collect();
    let mut violations: Vec<String> = validate_chart(&chart)
        .iter()
        .map(ToString::to_string)
        .collect();
    if violations.is_empty() {
        let multi = MultiMonomialSection {
            terms: sections.clone(),
        };
        violations.extend(
            validate_sections(&chart, &multi)
                .iter()
                .map(ToString::to_string),
        );
    }
    if !violations.is_empty() {
        return Err(CliError::Precondition(format!(
            "{file}: invalid chart: {}",
            violations.join("; ")
        )));
    }
    Ok(ChartData { chart, sections })
}

/// Serialises a chart and its sections in the chart file format.
pub fn write_chart(data: &ChartData) -> String {
    let weight = |w: &DiagonalWeight| WeightFile {
        coeffs: w.coeffs.iter().map(ToString::to_string).collect(),
        shift: w.shift,
    };
    let raw = ChartFile {
        version: CHART_VERSION,
        n: data.chart.n,
        radii: data.chart.radii.clone(),
        m0: data.chart.m0.to_string(),
        m1: data.chart.m1.to_string(),
        phi_l: weight(&data.chart.phi_l),
        psi: weight(&data.chart.psi),
        sections: data
            .sections
            .iter()
            .map(|s| SectionFile {
                exponents: s.exponents.clone(),
                amplitude: s.amplitude,
                support_radius: s.support_radius.clone(),
            })
            .collect(),
    };
    toml::to_string(&raw).expect("chart data always serialises")
}

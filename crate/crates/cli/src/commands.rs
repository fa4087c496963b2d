//! The six analysis commands.  Each turns a chart and a config into a
//! [`Table`]; rendering and exit codes are handled by the caller.

use std::f64::consts::PI;

use lcext::estimates::{check_main_estimate, normalize_for_stages, EstimateParams};
use lcext::integrability::{
    continuation_ladder, hormander_weight_check, log_pole_limit, log_weight_membership,
};
use lcext::lcv::{lcv_closed_form, lcv_limit, MeasureClass};
use lcext::multiplier::{jumping_numbers, multiplier_ideal, JumpReport};
use lcext::snc_model::MonomialSection;
use lcext::weights::{
    budget_check, budget_grid, normalisation_constant, normalize_psi, AuxParams, CutoffProfile,
};
use lcext::{q_to_f64, Q};

use crate::chart_file::ChartData;
use crate::config::{parse_q, RunConfig};
use crate::error::{CliError, CliResult};

/// The available commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Jumps,
    Ideal,
    Lcv,
    VerifyWeights,
    Extend,
    Integrability,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Jumps => "jumps",
            Command::Ideal => "ideal",
            Command::Lcv => "lcv",
            Command::VerifyWeights => "verify-weights",
            Command::Extend => "extend",
            Command::Integrability => "integrability",
        }
    }
}

/// A command result: comment lines, a CSV table, and an optional violation
/// that turns the run into exit code 4 after the table is written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub violation: Option<String>,
}

/// Shortest round-trip formatting; scientific outside `[1e−4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn q_str(q: Q) -> String {
    q.to_string()
}

fn exponents(terms: &[MonomialSection]) -> String {
    terms
        .iter()
        .map(|t| {
            let parts: Vec<String> = t.exponents.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(" "))
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn require_chart(chart: Option<&ChartData>, command: Command) -> CliResult<&ChartData> {
    chart.ok_or_else(|| CliError::Precondition(format!("`{}` needs --chart FILE", command.name())))
}

fn require_sections(data: &ChartData, command: Command) -> CliResult<()> {
    if data.sections.is_empty() {
        Err(CliError::Precondition(format!(
            "`{}` needs at least one entry in the chart's sections list",
            command.name()
        )))
    } else {
        Ok(())
    }
}

/// The jump report up to `m1`, failing when `m1` is not a jump.
fn checked_jumps(data: &ChartData, m_max: Q) -> CliResult<JumpReport> {
    let report = jumping_numbers(&data.chart, m_max)?;
    if !report.m1_is_jump {
        return Err(CliError::Precondition(
            "m1 is not a jumping number of the family I(phi_L + m psi)".to_string(),
        ));
    }
    Ok(report)
}

/// Dispatches `command`.
pub fn run(command: Command, chart: Option<&ChartData>, config: &RunConfig) -> CliResult<Table> {
    match command {
        Command::Jumps => cmd_jumps(require_chart(chart, command)?, config),
        Command::Ideal => cmd_ideal(require_chart(chart, command)?, config),
        Command::Lcv => cmd_lcv(require_chart(chart, command)?, config),
        Command::VerifyWeights => cmd_verify_weights(chart, config),
        Command::Extend => cmd_extend(require_chart(chart, command)?, config),
        Command::Integrability => cmd_integrability(chart, config),
    }
}

/// Jumping numbers with their position relative to `m0` and `m1`.
pub fn cmd_jumps(data: &ChartData, config: &RunConfig) -> CliResult<Table> {
    let chart = &data.chart;
    let m_max = match &config.jumps.m_max {
        Some(m) => parse_q("jumps.m_max", m)?,
        None => chart.m1,
    };
    let report = checked_jumps(data, m_max)?;
    let mut table = Table {
        header: vec!["index", "m", "m_decimal", "position"],
        ..Table::default()
    };
    table.comments.push(format!("m_max: {}", report.m_max));
    table.comments.push(format!(
        "s_components: {}",
        report
            .s_components
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    ));
    table.comments.push(format!("reduced: {}", report.reduced));
    table
        .comments
        .push(format!("annihilator: {}", report.annihilator));
    for issue in report.issues() {
        table.comments.push(format!("issue: {issue}"));
    }
    for (i, &m) in report.jumps.iter().enumerate() {
        let position = if m < chart.m0 {
            "below_m0"
        } else if m == chart.m0 {
            "m0"
        } else if m < chart.m1 {
            "interior"
        } else if m == chart.m1 {
            "m1"
        } else {
            "above_m1"
        };
        table.rows.push(vec![
            i.to_string(),
            q_str(m),
            num(q_to_f64(m)),
            position.to_string(),
        ]);
    }
    Ok(table)
}

/// Multiplier ideals at the configured m-values.
pub fn cmd_ideal(data: &ChartData, config: &RunConfig) -> CliResult<Table> {
    let chart = &data.chart;
    let ms: Vec<Q> = if config.ideal.m_values.is_empty() {
        let report = jumping_numbers(chart, chart.m1)?;
        let mut ms = vec![Q::from_integer(0), chart.m0];
        ms.extend(report.jumps.iter().copied());
        ms.sort();
        ms.dedup();
        ms
    } else {
        config
            .ideal
            .m_values
            .iter()
            .enumerate()
            .map(|(i, m)| parse_q(&format!("ideal.m_values[{i}]"), m))
            .collect::<CliResult<_>>()?
    };
    let mut table = Table {
        header: vec!["m", "m_decimal", "coefficients", "ideal"],
        ..Table::default()
    };
    for m in ms {
        let w = chart.weight_at(m);
        let coeffs: Vec<String> = w.coeffs.iter().map(ToString::to_string).collect();
        table.rows.push(vec![
            q_str(m),
            num(q_to_f64(m)),
            coeffs.join(" "),
            multiplier_ideal(&w).to_string(),
        ]);
    }
    Ok(table)
}

/// The trichotomy table of the lc-measure with the closed form.
pub fn cmd_lcv(data: &ChartData, config: &RunConfig) -> CliResult<Table> {
    require_sections(data, Command::Lcv)?;
    let chart = &data.chart;
    checked_jumps(data, chart.m1)?;
    let section = data.multi_section()?;
    let spec = config.quadrature.spec();
    let (sigma_f, closed) = lcv_closed_form(chart, &section)?;
    let sigma_max = config.lcv.sigma_max.unwrap_or(chart.n).min(chart.n);
    let mut table = Table {
        header: vec![
            "sigma",
            "class",
            "value",
            "expected",
            "closed_form",
            "growth_ratio",
            "extrapolation_residual",
        ],
        ..Table::default()
    };
    table.comments.push(format!("sigma_f: {sigma_f}"));
    let mut mismatches = Vec::new();
    for sigma in config.lcv.sigma_min..=sigma_max {
        let result = lcv_limit(chart, &section, sigma, &spec)?;
        let expected = MeasureClass::expected(sigma, sigma_f);
        if result.class != expected {
            mismatches.push(sigma);
        }
        let closed_value = if sigma == sigma_f {
            num(closed.numeric_value())
        } else {
            String::new()
        };
        table.rows.push(vec![
            sigma.to_string(),
            result.class.as_str().to_string(),
            result.value.map(num).unwrap_or_default(),
            expected.as_str().to_string(),
            closed_value,
            num(result.diagnostics.growth_ratio),
            num(result.diagnostics.extrapolation_residual),
        ]);
    }
    if !mismatches.is_empty() {
        table.violation = Some(format!(
            "classification differs from the trichotomy at sigma = {mismatches:?}"
        ));
    }
    Ok(table)
}

/// The curvature budget of the auxiliary weights per σ.
pub fn cmd_verify_weights(chart: Option<&ChartData>, config: &RunConfig) -> CliResult<Table> {
    let w = &config.weights;
    let a = normalisation_constant();
    let cutoff = CutoffProfile::new(w.cut_a, w.cut_b, w.eps0)?;
    let mut table = Table {
        header: vec![
            "sigma",
            "inequality",
            "points",
            "min_slack",
            "witness_psi",
            "passed",
        ],
        ..Table::default()
    };
    table
        .comments
        .push(format!("normalisation constant: {}", num(a)));
    table.comments.push(format!(
        "cutoff: sup|theta'| = {}, sup|theta''| = {}, M_theta' = {}, C_theta'' = {}",
        num(cutoff.sup_theta_prime),
        num(cutoff.sup_theta_second),
        num(cutoff.m_theta_prime()),
        num(cutoff.c_theta_second())
    ));
    let mut failures = Vec::new();
    for &sigma in &w.sigmas {
        let params = AuxParams {
            eps: w.eps,
            ell: w.ell,
            sigma,
            delta: w.delta,
            cut_a: w.cut_a,
            cut_b: w.cut_b,
            eps0: w.eps0,
            ..AuxParams::new(sigma, w.ell, w.delta)
        };
        let psi_abs_min = match (chart, w.normalize) {
            (Some(data), true) => {
                let norm = normalize_psi(&data.chart, &params)?;
                table.comments.push(format!(
                    "sigma {sigma}: psi shift {} -> {}, sup psi = {}",
                    num(norm.previous_shift),
                    num(norm.shift),
                    num(norm.sup_psi)
                ));
                -norm.sup_psi
            }
            (Some(data), false) => -data.chart.sup_psi(),
            (None, true) => lcext::weights::normalisation_threshold(&params)?,
            (None, false) => {
                return Err(CliError::Precondition(
                    "verify-weights with normalize = false needs --chart FILE".to_string(),
                ))
            }
        };
        let grid = budget_grid(&params, psi_abs_min, w.grid_points);
        let report = budget_check(&params, &grid)?;
        for row in &report.rows {
            if !row.passed {
                failures.push(format!(
                    "sigma {sigma}: {} fails at psi = {}",
                    row.name,
                    row.witness_psi.map(num).unwrap_or_default()
                ));
            }
            table.rows.push(vec![
                sigma.to_string(),
                row.name.to_string(),
                row.points.to_string(),
                num(row.min_slack),
                row.witness_psi.map(num).unwrap_or_default(),
                row.passed.to_string(),
            ]);
        }
    }
    if !failures.is_empty() {
        table.violation = Some(format!(
            "curvature budget violated: {}",
            failures.join("; ")
        ));
    }
    Ok(table)
}

/// The staged extension with its per-stage margins.
pub fn cmd_extend(data: &ChartData, config: &RunConfig) -> CliResult<Table> {
    require_sections(data, Command::Extend)?;
    checked_jumps(data, data.chart.m1)?;
    let e = &config.extend;
    let params = EstimateParams {
        ell: e.ell,
        delta: e.delta,
        eps: e.eps,
        spec: config.quadrature.spec(),
        tolerance_factor: e.tolerance_factor,
    };
    let chart = if e.normalize {
        normalize_for_stages(&data.chart, &params, data.chart.n)?
    } else {
        data.chart.clone()
    };
    let report = check_main_estimate(&chart, &data.multi_section()?, &params)?;
    let mut table = Table {
        header: vec![
            "sigma",
            "terms",
            "lhs",
            "lhs_error",
            "rhs",
            "rhs_error",
            "margin",
            "tolerance",
            "passed",
        ],
        ..Table::default()
    };
    table
        .comments
        .push(format!("psi shift: {}", num(chart.psi.shift)));
    table.comments.push(format!(
        "dropped (already in I(m1)): {}",
        exponents(&report.dropped)
    ));
    table.comments.push(format!(
        "final residual: {}",
        exponents(report.final_residual())
    ));
    let mut failures = Vec::new();
    for s in &report.stages {
        if !s.passed() {
            failures.push(format!(
                "sigma {}: lhs {} exceeds rhs {}",
                s.sigma,
                num(s.lhs),
                num(s.rhs)
            ));
        }
        table.rows.push(vec![
            s.sigma.to_string(),
            exponents(&s.extension),
            num(s.lhs),
            num(s.lhs_error),
            num(s.rhs),
            num(s.rhs_error),
            num(s.margin),
            num(s.tolerance),
            s.passed().to_string(),
        ]);
    }
    if !failures.is_empty() {
        table.violation = Some(format!(
            "extension estimate violated: {}",
            failures.join("; ")
        ));
    }
    Ok(table)
}

/// Pole limits, membership sweep, ladders and (with a chart) the curvature
/// bound of the local ∂̄-step.
pub fn cmd_integrability(chart: Option<&ChartData>, config: &RunConfig) -> CliResult<Table> {
    let c = &config.integrability;
    let spec = config.quadrature.spec();
    let mut table = Table {
        header: vec!["check", "parameters", "value", "reference", "passed"],
        ..Table::default()
    };
    let mut failures = Vec::new();
    let mut push = |table: &mut Table,
                    check: &str,
                    params: String,
                    value: String,
                    reference: String,
                    ok: bool| {
        if !ok {
            failures.push(format!("{check} {params}"));
        }
        table.rows.push(vec![
            check.to_string(),
            params,
            value,
            reference,
            ok.to_string(),
        ]);
    };
    for &r0 in &c.pole_radii {
        let limit = log_pole_limit(r0, &spec.eps_schedule)?;
        let ok = (limit.limit / (PI / 2.0) - 1.0).abs() <= c.pole_tolerance;
        push(
            &mut table,
            "pole_limit",
            format!("r0={}", num(r0)),
            num(limit.limit),
            num(PI / 2.0),
            ok,
        );
    }
    for &a in &c.membership_a {
        for &p in &c.membership_p {
            for &s in &c.membership_s {
                for &r0 in &c.membership_r0 {
                    let m = log_weight_membership(a, p, s, r0)?;
                    let word = |f: bool| if f { "finite" } else { "divergent" };
                    push(
                        &mut table,
                        "membership",
                        format!("a={a} p={} s={} r0={}", num(p), num(s), num(r0)),
                        format!("{} {}", word(m.quadrature_finite), num(m.value)),
                        word(m.finite).to_string(),
                        m.agrees(),
                    );
                }
            }
        }
    }
    for &[s, delta] in &c.ladders {
        let ladder = continuation_ladder(s, delta)?;
        let expected = ((s - 1.0) / (1.0 - delta) - 1e-12).ceil() as usize;
        let values: Vec<String> = ladder.exponents.iter().map(|x| num(*x)).collect();
        push(
            &mut table,
            "ladder",
            format!("s={} delta={}", num(s), num(delta)),
            values.join(" "),
            format!("{expected} steps"),
            ladder.steps.len() == expected,
        );
    }
    if let Some(data) = chart {
        // The local step works with a normalised ψ.
        let aux = AuxParams::new(
            c.hormander_sigma.max(1),
            c.hormander_ell,
            config.weights.delta,
        );
        let normalized = normalize_psi(&data.chart, &aux)?.chart;
        let report = hormander_weight_check(
            &normalized,
            c.hormander_sigma,
            c.hormander_eps,
            c.hormander_ell,
            c.hormander_b,
            c.hormander_points,
        )?;
        push(
            &mut table,
            "hormander",
            format!(
                "sigma={} eps={} ell={} b={}",
                c.hormander_sigma,
                num(c.hormander_eps),
                num(c.hormander_ell),
                num(c.hormander_b)
            ),
            num(report.c_prime),
            report
                .message
                .clone()
                .unwrap_or_else(|| "finite c'".to_string()),
            report.passed,
        );
    }
    if !failures.is_empty() {
        table.violation = Some(format!(
            "integrability checks failed: {}",
            failures.join("; ")
        ));
    }
    Ok(table)
}

//! Scenario execution and report files.
//!
//! `identities.csv` is in long format with columns
//! `scenario,color,term,value,residual_name,residual,resolution`: term rows
//! leave the residual cells empty, residual rows leave the term cells empty.
//! Colors are numbered from 1. Resolution is written `steps x grid_u x grid_v`.

pub mod catalog;
pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::gaugefield::{build_field, GaugeField};
use crate::geometry::{LoopKind, TwoTimeAssembly};
use crate::holonomy::{expansion_terms, HolonomyResult};
use crate::identity_lab::{
    first_order_decomposition, higher_order_probe, quantization_report, reports_by_resolution, table_from_reports,
    Check, ConvergenceTable, HigherOrderTable, IdentityReport, QuantizationReport,
};
use crate::liealg::CMatrix;

pub use config::{Expectation, GroupSpec, ScenarioConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const IDENTITIES_FILE: &str = "identities.csv";
pub const REPORT_FILE: &str = "report.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

/// Signature and storage conventions, written into every report.
pub const CONVENTIONS: &[(&str, &str)] = &[
    ("signature", "(+,-,-,-); potentials stored as the 1-form A_mu dx^mu with A_t = -phi"),
    ("line_integral", "sum over segments of A_mu(midpoint) * chord increment"),
    ("abelian_phase", "e * closed integral of (phi dt - A.dx) = -e * line_integral"),
    ("field_strength", "F = dA + g C[a][b][c] A[b] ^ A[c]; B_i = eps_ijk F_jk / 2; E_i = F_i0"),
    ("generators", "tr(T_a T_b) = delta_ab / 2; C[a][b][c] = -2i tr([T_a, T_b] T_c)"),
    ("units", "hbar = c = 1"),
];

/// Norms of a loop holonomy and its expansion.
#[derive(Debug, Clone, Serialize)]
pub struct HolonomySummary {
    pub path: String,
    pub steps: usize,
    pub mode: String,
    pub w_minus_identity: f64,
    pub unitarity_defect: f64,
    pub trace_re: f64,
    pub trace_im: f64,
    pub first_order: Vec<f64>,
    pub first_order_norm: f64,
    pub second_order_norm: f64,
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl HolonomySummary {
    fn new(path: &str, r: &HolonomyResult) -> Self {
        let n = r.w.nrows();
        let tr = r.trace();
        HolonomySummary {
            path: path.to_string(),
            steps: r.steps,
            mode: r.mode.name().to_string(),
            w_minus_identity: frobenius(&(&r.w - CMatrix::identity(n, n))),
            unitarity_defect: r.unitarity_defect(),
            trace_re: tr.re,
            trace_im: tr.im,
            first_order: r.first_order.clone(),
            first_order_norm: frobenius(&r.first_order_matrix),
            second_order_norm: r.second_order.as_ref().map_or(0.0, frobenius),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub report: IdentityReport,
    pub quantization: Option<QuantizationReport>,
    pub holonomy: Vec<HolonomySummary>,
    /// Residuals that counted toward the exit status.
    pub checked: Vec<Check>,
    /// Checks whose relative residual reached the tolerance.
    pub failures: Vec<String>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn scenario_field(cfg: &ScenarioConfig) -> Result<GaugeField> {
    let group = Arc::new(cfg.group.build()?);
    build_field(&cfg.field, group, cfg.couplings)
}

fn checked_residuals(cfg: &ScenarioConfig, report: &IdentityReport) -> Vec<Check> {
    let cancel = match cfg.expect_cancellation {
        Expectation::Always => true,
        Expectation::Never => false,
        Expectation::Auto => report.within_assumptions(),
    };
    if cancel {
        Check::ALL.to_vec()
    } else {
        vec![Check::Stokes, Check::Decomp]
    }
}

/// Evaluate the decomposition, holonomies and optional quantization for one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let fld = scenario_field(cfg)?;
    let asm = TwoTimeAssembly::new(cfg.circle, cfg.t0, cfg.t1, cfg.resolution)?;
    let report = first_order_decomposition(&fld, &asm, &cfg.name)?;
    let boundary = expansion_terms(&fld, &asm.pair.path, 2, cfg.mode)?;
    let two_time = expansion_terms(&fld, &asm.two_time_loop()?, 2, cfg.mode)?;
    let holonomy = vec![
        HolonomySummary::new("loop_t0", &boundary),
        HolonomySummary::new("two_time_loop", &two_time),
    ];
    let quantization = cfg.quantize.then(|| {
        let flux = cfg.field.flux_max * cfg.field.ramp.value(cfg.t1);
        quantization_report(flux, cfg.couplings.e, cfg.is_time_dependent())
    });
    let checked = checked_residuals(cfg, &report);
    let failures = checked
        .iter()
        .filter(|&&c| !report.passes(c, cfg.tolerance))
        .map(|&c| {
            format!(
                "{}: relative residual {:.3e} >= tolerance {:e}",
                c.name(),
                report.max_relative(c),
                cfg.tolerance
            )
        })
        .collect();
    Ok(ScenarioOutcome {
        config: cfg.clone(),
        report,
        quantization,
        holonomy,
        checked,
        failures,
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn resolution_label(cfg: &ScenarioConfig) -> String {
    let r = cfg.resolution;
    format!("{}x{}x{}", r.steps, r.grid_u, r.grid_v)
}

/// Long-format table of every term and residual.
pub fn identities_csv(out: &ScenarioOutcome) -> String {
    let r = &out.report;
    let res = resolution_label(&out.config);
    let name = &out.config.name;
    let mut s = String::from("scenario,color,term,value,residual_name,residual,resolution\n");
    let terms: [(&str, &[f64]); 10] = [
        ("T_line", &r.t_line),
        ("T_B", &r.t_b),
        ("T_B_commutator", &r.t_b_commutator),
        ("T_E", &r.t_e),
        ("T_AA", &r.t_aa),
        ("T_AA_disk", &r.t_aa_disk),
        ("T_AA_cylinder", &r.t_aa_cylinder),
        ("T_F", &r.t_f),
        ("circulation_t0", &r.circulation_t0),
        ("circulation_t1", &r.circulation_t1),
    ];
    let mut residuals: Vec<(&str, &[f64])> = Check::ALL.iter().map(|&c| (c.name(), r.residual(c))).collect();
    if let Some(v) = &r.r_electric_t1_only {
        residuals.push(("r_electric_t1_only", v));
    }
    for color in 0..r.colors {
        for (term, vals) in &terms {
            let _ = writeln!(s, "{name},{},{term},{},,,{res}", color + 1, num(vals[color]));
        }
        for (rn, vals) in &residuals {
            let _ = writeln!(s, "{name},{},,,{rn},{},{res}", color + 1, num(vals[color]));
        }
    }
    s
}

/// Structured summary of a scenario run.
pub fn report_json(out: &ScenarioOutcome) -> Result<String> {
    let conventions: serde_json::Map<String, serde_json::Value> = CONVENTIONS
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .chain([("mode".to_string(), json!(out.config.mode.name()))])
        .collect();
    let relative: serde_json::Map<String, serde_json::Value> = Check::ALL
        .iter()
        .map(|&c| (c.name().to_string(), json!(out.report.max_relative(c))))
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "conventions": conventions,
        "config": out.config.serialize(),
        "identity_report": out.report,
        "relative_residuals": relative,
        "status": {
            "passed": out.passed(),
            "tolerance": out.config.tolerance,
            "checked": out.checked.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "failures": out.failures,
            "within_assumptions": out.report.within_assumptions(),
        },
        "quantization": out.quantization,
        "holonomy": out.holonomy,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn write_scenario_outputs(dir: &Path, out: &ScenarioOutcome) -> Result<()> {
    let csv = identities_csv(out);
    let json = report_json(out)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(IDENTITIES_FILE), csv)?;
    fs::write(dir.join(REPORT_FILE), json)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutcome {
    pub scenario: String,
    pub tables: Vec<ConvergenceTable>,
}

impl ConvergenceOutcome {
    pub fn passed(&self) -> bool {
        self.tables.iter().all(|t| !t.failed)
    }
}

/// Convergence tables for every residual that applies to the scenario.
pub fn run_convergence(cfg: &ScenarioConfig, resolutions: &[usize]) -> Result<ConvergenceOutcome> {
    cfg.validate()?;
    let fld = scenario_field(cfg)?;
    let reports = reports_by_resolution(&fld, cfg.circle, cfg.t0, cfg.t1, resolutions, &cfg.name)?;
    let checks = checked_residuals(cfg, &reports[reports.len() - 1]);
    Ok(ConvergenceOutcome {
        scenario: cfg.name.clone(),
        tables: checks.iter().map(|&c| table_from_reports(c, &reports)).collect(),
    })
}

/// `scenario,residual_name,resolution,residual,fitted_order`; the order is
/// `exact` when every residual is at roundoff level.
pub fn convergence_csv(out: &ConvergenceOutcome) -> String {
    let mut s = String::from("scenario,residual_name,resolution,residual,fitted_order\n");
    for t in &out.tables {
        let order = match (t.exact, t.order) {
            (true, _) => "exact".to_string(),
            (false, Some(p)) => num(p),
            (false, None) => "undefined".to_string(),
        };
        for row in &t.rows {
            let _ = writeln!(s, "{},{},{},{},{order}", out.scenario, t.check.name(), row.resolution, num(row.residual));
        }
    }
    s
}

pub fn write_convergence_output(dir: &Path, out: &ConvergenceOutcome) -> Result<()> {
    let csv = convergence_csv(out);
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONVERGENCE_FILE), csv)?;
    Ok(())
}

/// Higher-order probe over the scenario's two-time loop.
pub fn run_probe(cfg: &ScenarioConfig, scales: &[f64]) -> Result<HigherOrderTable> {
    cfg.validate()?;
    let fld = scenario_field(cfg)?;
    let path = crate::geometry::build_loop(
        LoopKind::TwoTime {
            circle: cfg.circle,
            t0: cfg.t0,
            t1: cfg.t1,
        },
        cfg.resolution.steps,
    )?;
    higher_order_probe(&fld, &path, scales, cfg.mode)
}

pub fn probe_csv(table: &HigherOrderTable) -> String {
    let mut s = String::from("lambda,first_order_norm,second_order_norm,w_minus_identity_norm\n");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(r.lambda),
            num(r.first_order_norm),
            num(r.second_order_norm),
            num(r.w_minus_identity_norm)
        );
    }
    s
}

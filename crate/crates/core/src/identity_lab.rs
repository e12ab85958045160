//! Independent evaluation of every term in the first-order surface
//! decomposition of a Wilson loop, with residuals for each claimed equality.
//!
//! Terms live on the two-time assembly: a disk at `t1` plus the cylinder
//! `circle × [t0, t1]`, whose oriented boundary is the circle at `t0`.
//!
//! * `T_line`  circulation `∮ A[a]` around the circle at `t0`
//! * `T_B`     `∫ B[a]·dS` over the disk
//! * `T_E`     electric (`dx∧dt`) components of `F[a]` over the cylinder
//! * `T_AA`    `-g C[a][b][c] ∫ A[b]∧A[c]` over both patches
//! * `T_F`     `T_B + T_E`

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gaugefield::{cross, spatial, GaugeField};
use crate::geometry::{
    line_integral, stokes_residual, surface_integral_2form, wedge_area_elements, Circle, Resolution, SpacetimePath,
    SurfacePatch, TwoTimeAssembly,
};
use crate::holonomy::{expansion_terms, Mode};
use crate::liealg::CMatrix;
use crate::numeric::{loglog_order, ordered_map, pairwise_sum_rows};

/// Magnitude below which the potential counts as vanishing for precondition checks.
const PRECONDITION_TOL: f64 = 1e-12;
/// Lower bound on the scale used to relativize residuals.
pub const SCALE_FLOOR: f64 = 1e-30;
/// Observed orders below this are reported as convergence failures.
pub const MIN_ORDER: f64 = 1.5;
/// Residuals at or below this multiple of `max(scale, 1)` count as roundoff.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub scenario: String,
    pub colors: usize,
    pub resolution: Resolution,
    pub t0: f64,
    pub t1: f64,
    pub t_line: Vec<f64>,
    pub t_b: Vec<f64>,
    /// `(g/2) C[a][b][c] ∫ (A[b]×A[c])·dS` over the disk, the non-Abelian part of `T_B`.
    pub t_b_commutator: Vec<f64>,
    pub t_e: Vec<f64>,
    pub t_aa: Vec<f64>,
    pub t_aa_disk: Vec<f64>,
    pub t_aa_cylinder: Vec<f64>,
    pub t_f: Vec<f64>,
    pub circulation_t0: Vec<f64>,
    pub circulation_t1: Vec<f64>,
    pub r_stokes: Vec<f64>,
    pub r_decomp: Vec<f64>,
    pub r_spatial_b: Vec<f64>,
    pub r_electric: Vec<f64>,
    /// `|T_E + ∮_{L(t1)} A|`, reported when the circulation at `t0` is nonzero.
    pub r_electric_t1_only: Option<Vec<f64>>,
    pub r_cancel: Vec<f64>,
    /// `max(|T_B|, |T_E|, |T_AA|)` over all colors, floored at [`SCALE_FLOOR`].
    pub scale: f64,
    /// Violated preconditions; empty when the scenario satisfies them.
    pub flags: Vec<String>,
}

/// Named residual of an [`IdentityReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Stokes,
    Decomp,
    SpatialB,
    Electric,
    Cancel,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Stokes, Check::Decomp, Check::SpatialB, Check::Electric, Check::Cancel];

    pub fn name(self) -> &'static str {
        match self {
            Check::Stokes => "r_stokes",
            Check::Decomp => "r_decomp",
            Check::SpatialB => "r_spatialB",
            Check::Electric => "r_electric",
            Check::Cancel => "r_cancel",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim();
        let bare = key.strip_prefix("r_").unwrap_or(key);
        match bare.to_ascii_lowercase().as_str() {
            "stokes" => Ok(Check::Stokes),
            "decomp" => Ok(Check::Decomp),
            "spatialb" | "spatial_b" => Ok(Check::SpatialB),
            "electric" => Ok(Check::Electric),
            "cancel" => Ok(Check::Cancel),
            _ => Err(LabError::invalid("check", format!("unknown residual `{key}`"))),
        }
    }
}

impl IdentityReport {
    pub fn residual(&self, check: Check) -> &[f64] {
        match check {
            Check::Stokes => &self.r_stokes,
            Check::Decomp => &self.r_decomp,
            Check::SpatialB => &self.r_spatial_b,
            Check::Electric => &self.r_electric,
            Check::Cancel => &self.r_cancel,
        }
    }

    /// Largest residual over colors.
    pub fn max_residual(&self, check: Check) -> f64 {
        self.residual(check).iter().copied().fold(0.0, f64::max)
    }

    pub fn max_relative(&self, check: Check) -> f64 {
        self.max_residual(check) / self.scale
    }

    /// Relative residual below `tolerance`, or at roundoff level when every term vanishes.
    pub fn passes(&self, check: Check, tolerance: f64) -> bool {
        let r = self.max_residual(check);
        r < tolerance * self.scale || r <= ROUNDOFF * self.scale.max(1.0)
    }

    pub fn within_assumptions(&self) -> bool {
        self.flags.is_empty()
    }
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn abs_diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect()
}

/// `∫ B[a]·dS` over a fixed-time patch, plus its commutator part.
fn magnetic_flux(fld: &GaugeField, patch: &SurfacePatch) -> Result<(Vec<f64>, Vec<f64>)> {
    let elems = wedge_area_elements(patch)?;
    let n = fld.colors();
    let g = fld.couplings().g;
    let group = fld.group();
    let rows = ordered_map(elems.len(), |k| -> Result<Vec<f64>> {
        let e = &elems[k];
        let b = fld.magnetic_field(&e.point)?;
        let a = fld.potential(&e.point)?;
        let mut row = vec![0.0; 2 * n];
        for col in 0..n {
            row[col] = (0..3).map(|i| b[col][i] * e.ds[i]).sum();
            if !group.is_abelian() {
                let mut comm = 0.0;
                for bb in 0..n {
                    for cc in 0..n {
                        let k = group.c(col, bb, cc);
                        if k != 0.0 {
                            let x = cross(spatial(&a[bb]), spatial(&a[cc]));
                            comm += k * (0..3).map(|i| x[i] * e.ds[i]).sum::<f64>();
                        }
                    }
                }
                row[n + col] = 0.5 * g * comm;
            }
        }
        Ok(row)
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let sum = pairwise_sum_rows(&rows, 2 * n);
    Ok((sum[..n].to_vec(), sum[n..].to_vec()))
}

/// `Σ_i E[a]_i (t_u^i t_v^t - t_v^i t_u^t) ΔuΔv` over a patch.
fn electric_flux(fld: &GaugeField, patch: &SurfacePatch) -> Result<Vec<f64>> {
    let cells = patch.cells();
    let n = fld.colors();
    let rows = ordered_map(cells.len(), |k| -> Result<Vec<f64>> {
        let c = &cells[k];
        let e = fld.electric_field(&c.mid)?;
        Ok(e.iter()
            .map(|ea| (0..3).map(|i| ea[i] * c.bivector(i + 1, 0)).sum())
            .collect())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_rows(&rows, n))
}

/// `-g C[a][b][c] ∫ A[b]∧A[c]` over a patch.
fn commutator_wedge(fld: &GaugeField, patch: &SurfacePatch) -> Result<Vec<f64>> {
    let n = fld.colors();
    if fld.group().is_abelian() {
        return Ok(vec![0.0; n]);
    }
    let g = fld.couplings().g;
    let group = fld.group();
    surface_integral_2form(
        |p| {
            let a = fld.potential(p)?;
            let mut w = vec![[[0.0; 4]; 4]; n];
            for (col, wa) in w.iter_mut().enumerate() {
                for mu in 0..4 {
                    for nu in (mu + 1)..4 {
                        let mut s = 0.0;
                        for b in 0..n {
                            for c in 0..n {
                                let k = group.c(col, b, c);
                                if k != 0.0 {
                                    s += k * a[b][mu] * a[c][nu];
                                }
                            }
                        }
                        wa[mu][nu] = -g * s;
                        wa[nu][mu] = g * s;
                    }
                }
            }
            Ok(w)
        },
        n,
        patch,
    )
}

/// Largest `|A[a][t]|` over the cells and `|A|` on the loop at `t0`.
fn precondition_flags(fld: &GaugeField, asm: &TwoTimeAssembly, early: &SpacetimePath) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    let mut temporal = 0.0f64;
    for patch in &asm.pair.surfaces {
        for c in patch.cells() {
            for row in fld.potential(&c.mid)? {
                temporal = temporal.max(row[0].abs());
            }
        }
    }
    if temporal > PRECONDITION_TOL {
        flags.push(format!(
            "precondition violated: temporal potential component is nonzero (max |A_t| = {temporal:.3e})"
        ));
    }
    let mut initial = 0.0f64;
    for s in early.segments() {
        for row in fld.potential(&s.mid)? {
            initial = initial.max(row.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
    }
    if initial > PRECONDITION_TOL {
        flags.push(format!(
            "precondition violated: potential does not vanish on the loop at t0 (max |A| = {initial:.3e})"
        ));
    }
    Ok(flags)
}

/// Evaluate all terms and residuals of the first-order decomposition.
pub fn first_order_decomposition(fld: &GaugeField, asm: &TwoTimeAssembly, scenario: &str) -> Result<IdentityReport> {
    let early = asm.loop_at(asm.t0)?;
    let late = asm.loop_at(asm.t1)?;
    let t_line = line_integral(fld, &asm.pair.path)?;
    let circulation_t0 = line_integral(fld, &early)?;
    let circulation_t1 = line_integral(fld, &late)?;
    let (t_b, t_b_commutator) = magnetic_flux(fld, asm.disk())?;
    let t_e = electric_flux(fld, asm.cylinder())?;
    let t_aa_disk = commutator_wedge(fld, asm.disk())?;
    let t_aa_cylinder = commutator_wedge(fld, asm.cylinder())?;
    let t_aa = add(&t_aa_disk, &t_aa_cylinder);
    let t_f = add(&t_b, &t_e);
    let r_stokes = stokes_residual(fld, &asm.pair)?;
    let r_decomp = abs_diff(&t_line, &add(&t_f, &t_aa));
    let r_spatial_b = abs_diff(&t_b, &add(&circulation_t1, &t_b_commutator));
    let r_electric: Vec<f64> = (0..t_e.len())
        .map(|a| (t_e[a] + circulation_t1[a] - circulation_t0[a]).abs())
        .collect();
    let initial = circulation_t0.iter().any(|c| c.abs() > PRECONDITION_TOL);
    let r_electric_t1_only = initial.then(|| add(&t_e, &circulation_t1).iter().map(|v| v.abs()).collect());
    let r_cancel: Vec<f64> = add(&t_f, &t_aa).iter().map(|v| v.abs()).collect();
    let scale = t_b
        .iter()
        .chain(&t_e)
        .chain(&t_aa)
        .fold(SCALE_FLOOR, |m, v| m.max(v.abs()));
    let flags = precondition_flags(fld, asm, &early)?;
    Ok(IdentityReport {
        scenario: scenario.to_string(),
        colors: fld.colors(),
        resolution: asm.resolution,
        t0: asm.t0,
        t1: asm.t1,
        t_line,
        t_b,
        t_b_commutator,
        t_e,
        t_aa,
        t_aa_disk,
        t_aa_cylinder,
        t_f,
        circulation_t0,
        circulation_t1,
        r_stokes,
        r_decomp,
        r_spatial_b,
        r_electric,
        r_electric_t1_only,
        r_cancel,
        scale,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizationReport {
    pub flux: f64,
    /// `δα = 2eΦ` for a static flux, zero for a time-dependent one.
    pub phase: f64,
    /// `None` when the flux is unconstrained.
    pub nearest_n: Option<i64>,
    /// `|δα - 2πn|`, in `[0, π]`.
    pub residual: f64,
    pub constrained: bool,
}

/// Single-valuedness constraint on the Cooper-pair phase `2eΦ`.
pub fn quantization_report(flux: f64, e: f64, time_dependent: bool) -> QuantizationReport {
    if time_dependent {
        return QuantizationReport {
            flux,
            phase: 0.0,
            nearest_n: None,
            residual: 0.0,
            constrained: false,
        };
    }
    let phase = 2.0 * e * flux;
    let n = (phase / (2.0 * PI)).round();
    QuantizationReport {
        flux,
        phase,
        nearest_n: Some(n as i64),
        residual: (phase - 2.0 * PI * n).abs(),
        constrained: true,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub first_order_norm: f64,
    pub second_order_norm: f64,
    pub w_minus_identity_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HigherOrderTable {
    pub rows: Vec<ProbeRow>,
    /// Log-log slope of the second-order norm against `λ`, when at least two
    /// rows have positive values.
    pub second_order_exponent: Option<f64>,
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// First- and second-order norms of the loop expansion for scaled copies of `fld`.
pub fn higher_order_probe(fld: &GaugeField, path: &SpacetimePath, scales: &[f64], mode: Mode) -> Result<HigherOrderTable> {
    if fld.group().is_abelian() {
        return Err(LabError::NonAbelianField);
    }
    let n = fld.group().rank();
    let mut rows = Vec::with_capacity(scales.len());
    for &lambda in scales {
        if !lambda.is_finite() {
            return Err(LabError::invalid("amplitude_scales", "must be finite"));
        }
        let r = expansion_terms(&fld.scaled(lambda), path, 2, mode)?;
        let second = r.second_order.as_ref().expect("order 2 requested");
        rows.push(ProbeRow {
            lambda,
            first_order_norm: frobenius(&r.first_order_matrix),
            second_order_norm: frobenius(second),
            w_minus_identity_norm: frobenius(&(&r.w - CMatrix::identity(n, n))),
        });
    }
    let fit: Vec<&ProbeRow> = rows
        .iter()
        .filter(|r| r.lambda > 0.0 && r.second_order_norm > 0.0)
        .collect();
    let second_order_exponent = (fit.len() >= 2).then(|| {
        // slope of ln‖second‖ against ln λ; loglog_order fits against ln(1/N)
        let xs: Vec<f64> = fit.iter().map(|r| r.lambda.ln()).collect();
        let ys: Vec<f64> = fit.iter().map(|r| r.second_order_norm.ln()).collect();
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    });
    Ok(HigherOrderTable {
        rows,
        second_order_exponent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub residual: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub check: Check,
    pub rows: Vec<ConvergenceRow>,
    /// Fitted order, or `None` when every residual is at roundoff level.
    pub order: Option<f64>,
    pub exact: bool,
    /// True when the fitted order falls below [`MIN_ORDER`].
    pub failed: bool,
}

/// Fit the observed order of `rows`, which must be sorted by resolution.
pub fn fit_convergence(check: Check, rows: Vec<ConvergenceRow>) -> ConvergenceTable {
    let exact = rows.iter().all(|r| r.residual <= ROUNDOFF * r.scale.max(1.0));
    let order = if exact || rows.iter().any(|r| r.residual <= 0.0) {
        None
    } else {
        let res: Vec<usize> = rows.iter().map(|r| r.resolution).collect();
        let vals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
        Some(loglog_order(&res, &vals))
    };
    let failed = !exact && order.is_none_or(|p| p < MIN_ORDER);
    ConvergenceTable {
        check,
        rows,
        order,
        exact,
        failed,
    }
}

pub(crate) fn check_resolutions(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 2 || resolutions.windows(2).any(|w| w[0] >= w[1]) || resolutions[0] == 0 {
        return Err(LabError::InsufficientResolutions);
    }
    Ok(())
}

/// Decomposition reports at each resolution `r` (steps = grid_u = grid_v = r).
pub fn reports_by_resolution(
    fld: &GaugeField,
    circle: Circle,
    t0: f64,
    t1: f64,
    resolutions: &[usize],
    scenario: &str,
) -> Result<Vec<IdentityReport>> {
    check_resolutions(resolutions)?;
    resolutions
        .iter()
        .map(|&r| {
            let asm = TwoTimeAssembly::new(circle, t0, t1, Resolution::uniform(r))?;
            first_order_decomposition(fld, &asm, scenario)
        })
        .collect()
}

/// Convergence table of `check` from reports at increasing resolution.
pub fn table_from_reports(check: Check, reports: &[IdentityReport]) -> ConvergenceTable {
    let rows = reports
        .iter()
        .map(|r| ConvergenceRow {
            resolution: r.resolution.steps,
            residual: r.max_residual(check),
            scale: r.scale,
        })
        .collect();
    fit_convergence(check, rows)
}

/// Residual `check` at each resolution `r` (steps = grid_u = grid_v = r),
/// with the observed order of convergence.
pub fn convergence_study(
    fld: &GaugeField,
    circle: Circle,
    t0: f64,
    t1: f64,
    check: Check,
    resolutions: &[usize],
) -> Result<ConvergenceTable> {
    let reports = reports_by_resolution(fld, circle, t0, t1, resolutions, "convergence")?;
    Ok(table_from_reports(check, &reports))
}

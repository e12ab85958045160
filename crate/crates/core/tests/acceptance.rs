//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always appear in `cargo test` output.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;

use num_complex::Complex64;

use holonomy_lab::gaugefield::{infinitesimal_gauge_transform, GaugeParameter};
use holonomy_lab::geometry::{build_loop, Circle, LoopKind, Plane, Resolution, TwoTimeAssembly};
use holonomy_lab::holonomy::{abelian_phase, expansion_terms, matrix_distance, wilson_loop, Mode};
use holonomy_lab::identity_lab::{
    first_order_decomposition, higher_order_probe, quantization_report, reports_by_resolution, table_from_reports,
    Check,
};
use holonomy_lab::liealg::{adjoint_representation, commutator, max_abs, structure_constants, GeneratorSet};
use holonomy_lab::scenario_cli::{catalog, identities_csv, run_scenario, scenario_field, IDENTITIES_FILE};
use holonomy_lab::{build_field, Couplings, FieldConfig, GaugeField, Ramp};

type Outcome = (bool, String);

fn solenoid(ramp: Ramp) -> GaugeField {
    let cfg = FieldConfig::abelian_solenoid(1.0, 1.0, ramp);
    build_field(&cfg, Arc::new(GeneratorSet::u1()), Couplings::default()).unwrap()
}

fn origin_circle(radius: f64) -> Circle {
    Circle::new([0.0; 3], radius, Plane::Xy)
}

fn structure_constants_and_adjoint() -> Outcome {
    let su2 = GeneratorSet::su(2).unwrap();
    let c2 = structure_constants(&su2).unwrap();
    let mut levi = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                levi = levi.max((c2[(a * 3 + b) * 3 + c] - common::levi_civita(a, b, c)).abs());
            }
        }
    }

    let su3 = GeneratorSet::su(3).unwrap();
    let d = su3.dim();
    let mut jacobi = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let s: f64 = (0..d)
                        .map(|k| {
                            su3.c(a, b, k) * su3.c(k, c, e) + su3.c(b, c, k) * su3.c(k, a, e) + su3.c(c, a, k) * su3.c(k, b, e)
                        })
                        .sum();
                    jacobi = jacobi.max(s.abs());
                }
            }
        }
    }

    let mut closure = 0.0f64;
    for g in [&su2, &su3] {
        let l = adjoint_representation(g);
        let d = g.dim();
        for a in 0..d {
            for b in 0..d {
                let mut rhs = l[0].clone() * Complex64::new(0.0, 0.0);
                for c in 0..d {
                    rhs += &l[c] * Complex64::new(0.0, g.c(a, b, c));
                }
                let lhs = commutator(&l[a], &l[b]).unwrap();
                closure = closure.max(max_abs(&(lhs - rhs)));
            }
        }
    }
    let ok = levi < 1e-12 && jacobi < 1e-12 && closure < 1e-12;
    (
        ok,
        format!("su2 vs levi-civita {levi:.1e}, su3 jacobi {jacobi:.1e}, adjoint closure {closure:.1e}"),
    )
}

fn static_abelian_phase() -> Outcome {
    let fld = solenoid(Ramp::Constant);
    let circle = origin_circle(2.0);
    let fine = build_loop(LoopKind::Circle { circle, time: 0.0 }, 32768).unwrap();
    let phase = abelian_phase(&fld, &fine).unwrap();
    let phase_err = (phase.abs() - 1.0).abs();

    let exact = Complex64::new(0.0, 1.0).exp();
    let err = |n: usize| {
        let path = build_loop(LoopKind::Circle { circle, time: 0.0 }, n).unwrap();
        let w = wilson_loop(&fld, &path, Mode::Unitary).unwrap().w[(0, 0)];
        (w - exact).norm().min((w - exact.conj()).norm())
    };
    let (e128, e256) = (err(128), err(256));
    let ratio = e128 / e256;
    let ok = phase_err < 1e-8 && (3.2..=4.8).contains(&ratio);
    (
        ok,
        format!("|phase| - flux = {phase_err:.2e} at 32768 steps; wilson error ratio 128/256 = {ratio:.3}"),
    )
}

fn ramped_abelian_cancellation() -> Outcome {
    let cfg = catalog::builtin("abelian_ramp").unwrap();
    let out = run_scenario(&cfg).unwrap();
    let flux = cfg.field.flux_max * cfg.field.ramp.value(cfg.t1);
    let rel = out.report.r_cancel[0] / flux.abs();

    // smoothstep is reported only; its cancellation residual is a second-order
    // discretization error rather than an exact zero
    let smooth = solenoid(Ramp::Smoothstep { t0: 0.0, t1: 1.0 });
    let asm = TwoTimeAssembly::new(origin_circle(2.0), 0.0, 1.0, Resolution::uniform(256)).unwrap();
    let s = first_order_decomposition(&smooth, &asm, "smoothstep").unwrap();
    (
        rel < 1e-6,
        format!("linear ramp r_cancel/flux = {rel:.2e}; smoothstep at 256 gives {:.2e}", s.r_cancel[0]),
    )
}

fn su2_two_color_balance() -> Outcome {
    let cfg = catalog::builtin("su2_two_color").unwrap();
    let fld = scenario_field(&cfg).unwrap();
    let asm = TwoTimeAssembly::new(cfg.circle, cfg.t0, cfg.t1, Resolution::uniform(256)).unwrap();
    let r = first_order_decomposition(&fld, &asm, &cfg.name).unwrap();
    let cancel = r.r_cancel.iter().fold(0.0f64, |m, v| m.max(v.abs())) / r.scale;
    let t_aa = r.t_aa.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let balance = r
        .t_b_commutator
        .iter()
        .zip(&r.t_aa_disk)
        .fold(0.0f64, |m, (b, a)| m.max((b + a).abs()));
    let ok = cancel < 1e-6 && t_aa > 1e-3 && balance < 1e-6;
    (
        ok,
        format!("relative r_cancel {cancel:.2e}, max |T_AA| {t_aa:.3e}, |T_B,comm + T_AA,disk| {balance:.2e}"),
    )
}

fn static_flux_survives() -> Outcome {
    let fld = solenoid(Ramp::Constant);
    let res = Resolution {
        steps: 4096,
        grid_u: 4096,
        grid_v: 64,
    };
    let asm = TwoTimeAssembly::new(origin_circle(2.0), 0.0, 1.0, res).unwrap();
    let r = first_order_decomposition(&fld, &asm, "static").unwrap();
    let dev = (r.r_cancel[0] - 1.0).abs();
    (dev < 1e-6, format!("|r_cancel - flux| = {dev:.2e} at 4096x4096x64"))
}

fn convergence_orders() -> Outcome {
    let resolutions = [64, 128, 256];
    let ramp = Ramp::Smoothstep { t0: 0.0, t1: 1.0 };
    let su2 = Arc::new(GeneratorSet::su(2).unwrap());
    let embedded = build_field(
        &FieldConfig::embedded_solenoid(1.0, 1.0, ramp, vec![0.0, 0.0, 1.0]),
        su2,
        Couplings::default(),
    )
    .unwrap();
    let cases: [(&str, GaugeField, Circle); 3] = [
        ("abelian solenoid", solenoid(ramp), origin_circle(2.0)),
        ("su2 embedded", embedded, origin_circle(2.0)),
        (
            "su2 sheared",
            common::sheared_su2(0.5, 0.8, ramp, 1.0),
            Circle::new([0.3, 0.2, 0.0], 1.0, Plane::Xy),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, fld, circle) in cases {
        let reports = reports_by_resolution(&fld, circle, 0.0, 1.0, &resolutions, name).unwrap();
        for check in [Check::Stokes, Check::Decomp] {
            let t = table_from_reports(check, &reports);
            match t.order {
                Some(p) => {
                    ok &= (1.8..=2.2).contains(&p);
                    parts.push(format!("{name} {} p={p:.3}", check.name()));
                }
                None => {
                    ok = false;
                    parts.push(format!("{name} {} no order (exact={})", check.name(), t.exact));
                }
            }
        }
    }
    (ok, parts.join(", "))
}

fn quantization() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let q = quantization_report(n as f64 * PI, 1.0, false);
        ok &= q.constrained && q.nearest_n == Some(n) && q.residual == 0.0;
        worst = worst.max(q.residual);
    }
    let t = quantization_report(1.0, 1.0, true);
    ok &= t.phase == 0.0 && !t.constrained;
    (
        ok,
        format!("max residual for flux n*pi, n=1..3: {worst:e}; time-dependent constrained={}", t.constrained),
    )
}

fn holonomy_properties() -> Outcome {
    let cfg = catalog::builtin("su2_two_color").unwrap();
    let fld = scenario_field(&cfg).unwrap();
    let asm = TwoTimeAssembly::new(cfg.circle, cfg.t0, cfg.t1, Resolution::uniform(256)).unwrap();
    let path = asm.two_time_loop().unwrap();
    let w = wilson_loop(&fld, &path, Mode::Unitary).unwrap();
    let back = wilson_loop(&fld, &path.reversed(), Mode::Unitary).unwrap();
    let unitarity = w.unitarity_defect();
    let n = w.w.nrows();
    let inverse = matrix_distance(&(&back.w * &w.w), &nalgebra::DMatrix::identity(n, n));

    // after the ramp the field is static, so a spatial circle there has a
    // nontrivial holonomy whose trace is gauge invariant
    let circle = build_loop(LoopKind::Circle { circle: cfg.circle, time: 1.5 }, 16384).unwrap();
    let omega = GaugeParameter::new(|p| vec![(1.3 * p.x).sin(), (0.7 * p.y).cos(), p.x * p.y])
        .with_gradient(|p| {
            vec![
                [0.0, 1.3 * (1.3 * p.x).cos(), 0.0, 0.0],
                [0.0, 0.0, -0.7 * (0.7 * p.y).sin(), 0.0],
                [0.0, p.y, p.x, 0.0],
            ]
        });
    let tr0 = wilson_loop(&fld, &circle, Mode::Unitary).unwrap().trace();
    let epsilons = [1e-2, 1e-3, 1e-4];
    let shifts: Vec<f64> = epsilons
        .iter()
        .map(|&eps| {
            let t = infinitesimal_gauge_transform(&fld, &omega, eps);
            (wilson_loop(&t, &circle, Mode::Unitary).unwrap().trace() - tr0).norm()
        })
        .collect();
    let slope = common::loglog_slope(&epsilons, &shifts);
    let ok = unitarity < 1e-10 && inverse < 1e-10 && slope >= 1.9;
    (
        ok,
        format!("unitarity {unitarity:.1e}, reversed inverse {inverse:.1e}, trace shift slope {slope:.3}"),
    )
}

fn second_order_probe() -> Outcome {
    let cfg = catalog::builtin("su2_two_color").unwrap();
    let fld = scenario_field(&cfg).unwrap();
    let asm = TwoTimeAssembly::new(cfg.circle, cfg.t0, cfg.t1, Resolution::uniform(256)).unwrap();
    let path = asm.two_time_loop().unwrap();
    let first = expansion_terms(&fld, &path, 2, Mode::Unitary).unwrap();
    let second_norm = first.second_order.as_ref().map_or(0.0, |m| m.norm());
    let first_rel = first.first_order_matrix.norm() / second_norm;
    let table = higher_order_probe(&fld, &path, &[0.5, 1.0], Mode::Unitary).unwrap();
    let ratio = table.rows[1].second_order_norm / table.rows[0].second_order_norm;
    let ok = first_rel < 1e-6 && (3.6..=4.4).contains(&ratio);
    (
        ok,
        format!("first/second order {first_rel:.2e}, second-order ratio on doubling {ratio:.4}"),
    )
}

fn determinism() -> Outcome {
    let cfg = catalog::builtin("abelian_ramp").unwrap();
    let a = identities_csv(&run_scenario(&cfg).unwrap());
    let b = identities_csv(&run_scenario(&cfg).unwrap());
    let mut ok = a == b;
    let mut cli = Vec::new();
    for threads in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_holonomy-lab"))
            .args(["run", "--scenario", "abelian_ramp", "--out"])
            .arg(dir.path())
            .env("HOLONOMY_LAB_THREADS", threads)
            .output()
            .unwrap()
            .status;
        ok &= status.success();
        cli.push(std::fs::read(dir.path().join(IDENTITIES_FILE)).unwrap_or_default());
    }
    ok &= cli[0] == cli[1] && cli[0] == a.as_bytes();
    (
        ok,
        format!("library runs identical: {}; cli with 1 and 4 threads identical: {}", a == b, cli[0] == cli[1]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("structure constants and adjoint closure", structure_constants_and_adjoint),
        ("static abelian phase and wilson convergence", static_abelian_phase),
        ("ramped abelian cancellation", ramped_abelian_cancellation),
        ("su2 two-color surface terms", su2_two_color_balance),
        ("static flux is not cancelled", static_flux_survives),
        ("second-order convergence of stokes and decomposition", convergence_orders),
        ("flux quantization", quantization),
        ("holonomy unitarity, inversion, gauge invariance", holonomy_properties),
        ("second-order probe", second_order_probe),
        ("deterministic output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

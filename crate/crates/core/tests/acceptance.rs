//! Acceptance criteria: one PASS/FAIL line per criterion; exits nonzero if any fails.

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::PathBuf;
use std::time::Instant;
use viscoshell::elastic::{ElasticKind, ElasticModel};
use viscoshell::element::{build_workspaces, evaluate_element, gauss_legendre, SurfaceLoad};
use viscoshell::kinematics::Metrics;
use viscoshell::material::{Material, PointOptions};
use viscoshell::maxwell::{update_intermediate_metric, LocalMethod, MaxwellBranch, MaxwellHistory, SpringKind, TangentMode};
use viscoshell::mesh::PatchMesh;
use viscoshell::oracles::{convergence_order, pure_bend_solution};
use viscoshell::scenario::cases::{curvature_l2_error, max_stretch_deviation, PureBendCase, ScordelisLoCase};
use viscoshell::scenario::config::{CaseConfig, ScenarioConfig};
use viscoshell::scenario::run::{run, run_point, run_with, RunOutput, RunSummary};
use viscoshell::scenario::study::{convergence_study, sweep};
use viscoshell::solver::{Simulation, SolverOptions};
use viscoshell::spline::{build_extraction, bspline_on_element, cox_de_boor, nurbs_eval, KnotVector};
use viscoshell::tensor::{Mat2, Vec3};

type Outcome = Result<String, String>;

fn config(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"));
    ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_balloon_time_step() -> Outcome {
    let start = Instant::now();
    let table = convergence_study(&config("inflated_balloon")).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let order = table.orders[0];
    let errs: Vec<String> = table.points.iter().map(|p| format!("{:.3e}", p.errors[0])).collect();
    check(
        (order - 1.0).abs() <= 0.1 && secs < 10.0,
        format!("eps_p = [{}], order {order:.3} (1.0 ± 0.1), runtime {secs:.2} s (< 10 s)", errs.join(", ")),
    )
}

fn c2_balloon_mesh() -> Outcome {
    let table = convergence_study(&config("inflated_balloon_mesh")).map_err(err)?;
    let errs: Vec<String> = table.points.iter().map(|p| format!("{}:{:.4e}", p.elements, p.errors[0])).collect();
    check(table.variation < 0.1, format!("eps_p by element count [{}], variation {:.2e} (< 0.1)", errs.join(", "), table.variation))
}

fn c3_pure_bending() -> Outcome {
    let table = convergence_study(&config("pure_bending")).map_err(err)?;
    let (ok_k, ok_in) = ((table.orders[0] - 1.0).abs() <= 0.15, (table.orders[1] - 1.0).abs() <= 0.15);

    let cfg = config("pure_bending_mesh");
    let bend = PureBendCase::from_config(&cfg).map_err(err)?;
    let exact = pure_bend_solution(&bend.params, cfg.time.t_end).map_err(err)?;
    let meshes = cfg.study.as_ref().map(|s| s.meshes.clone()).unwrap_or_default();
    let n = viscoshell::scenario::run::step_count(cfg.time.dt, cfg.time.t_end);
    let (mut h, mut e, mut stretch, mut finest) = (Vec::new(), Vec::new(), 0.0f64, (0usize, 0.0));
    for m in &meshes {
        let start = Instant::now();
        let mut sim = Simulation::new(bend.problem_with_mesh(*m).map_err(err)?, SolverOptions::default()).map_err(err)?;
        sim.run(cfg.time.t_end, n, |s, _| {
            stretch = stretch.max(max_stretch_deviation(s));
            Ok(())
        })
        .map_err(err)?;
        let elements = m[0] * m[1];
        if elements >= finest.0 {
            finest = (elements, start.elapsed().as_secs_f64());
        }
        h.push(1.0 / elements as f64);
        e.push(curvature_l2_error(&sim, exact.kappa).map_err(err)?);
    }
    let mesh_order = convergence_order(&h, &e).map_err(err)?;
    let ok = ok_k && ok_in && (mesh_order - 1.0).abs() <= 0.2 && stretch < 1e-2 && finest.1 < 120.0 && finest.0 <= 512;
    check(
        ok,
        format!(
            "dt orders eps_kappa {:.3}, eps_kappa_in {:.3} (1.0 ± 0.15); mesh order {mesh_order:.3} (1.0 ± 0.2) at dt {}; \
             max |lambda - 1| {stretch:.2e} (O(1e-3)); finest {} elements in {:.1} s (< 120 s)",
            table.orders[0], table.orders[1], cfg.time.dt, finest.0, finest.1
        ),
    )
}

fn c4_sphere() -> Outcome {
    let cfg = config("inflated_sphere");
    let table = convergence_study(&cfg).map_err(err)?;
    let order = table.orders[0];
    let CaseConfig::Point { program } = &cfg.case else { return Err("sphere config is not a point case".into()) };
    let program = program.to_program(cfg.time.t_end).map_err(err)?;
    let pressures = |h0: f64| -> Result<Vec<f64>, String> {
        let mut m = cfg.material.clone();
        for e in &mut m.elastic {
            if e.kind == ElasticKind::HelfrichBending {
                e.h0 = h0;
            }
        }
        let out = run_point("h0", &program, &m, cfg.time.dt, cfg.time.t_end).map_err(err)?;
        Ok(out.rows.iter().skip(1).map(|r| r.pressure).collect())
    };
    let (p1, p0) = (pressures(1.0)?, pressures(0.0)?);
    let min_gap = p1.iter().zip(&p0).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    check(
        (order - 1.0).abs() <= 0.1 && min_gap > 0.0,
        format!("order {order:.3} (1.0 ± 0.1); min over t > 0 of p(H0=1) - p(H0=0) = {min_gap:.3e} (> 0)"),
    )
}

fn elastic_model(kind: ElasticKind) -> ElasticModel {
    match kind {
        ElasticKind::KoiterMembrane => ElasticModel::koiter_membrane(2.0, 1.5),
        ElasticKind::NeoHookeanMembrane => ElasticModel::neo_hookean(2.0, 1.5),
        ElasticKind::NeoHookeanSplitMembrane => ElasticModel::neo_hookean_split(2.0, 1.5),
        ElasticKind::IncompressibleNeoHookeanMembrane => ElasticModel::incompressible(1.5),
        ElasticKind::ConstantSurfaceTension => ElasticModel::surface_tension(0.8),
        ElasticKind::KoiterBending => ElasticModel::koiter_bending(0.3),
        ElasticKind::HelfrichBending => ElasticModel::helfrich(0.3, 0.2),
    }
}

fn spring_branch(kind: SpringKind) -> MaxwellBranch {
    match kind {
        SpringKind::ConstantSurfaceTension => MaxwellBranch::surface_tension(0.7, 0.4),
        k => MaxwellBranch::membrane(k, 1.2, 0.9, 0.4),
    }
    .with_bending(0.25, 0.6)
}

fn c5_consistent_tangent() -> Outcome {
    let mesh = PatchMesh::cylinder_roof(1.0, 1.5, 0.6, [1, 2]).map_err(err)?;
    let ws = &build_workspaces(&mesh).map_err(err)?[1];
    let mut rng = StdRng::seed_from_u64(20_240_917);
    let (eps, dt, opts) = (1e-6, 0.1, PointOptions::default());
    let (mut worst, mut count) = (0.0f64, 0);
    for ek in ElasticKind::ALL {
        for sk in SpringKind::ALL {
            let mat = Material::elastic(vec![elastic_model(ek)]).with_branch(spring_branch(sk));
            for _ in 0..20 {
                let stretch = Vec3::new(rng.gen_range(0.9..1.1), rng.gen_range(0.9..1.1), rng.gen_range(0.95..1.05));
                let x: Vec<Vec3> = ws
                    .conn
                    .iter()
                    .map(|&c| {
                        let w = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        mesh.control[c].component_mul(&stretch) + 0.03 * w
                    })
                    .collect();
                let h: Vec<Vec<MaxwellHistory>> = ws
                    .qps
                    .iter()
                    .map(|q| {
                        let mut hb = MaxwellHistory::initial(&q.reference);
                        hb.ahat_con[0] *= rng.gen_range(0.85..1.15);
                        hb.ahat_con[2] *= rng.gen_range(0.85..1.15);
                        hb.ahat_con[1] += rng.gen_range(-0.03..0.03);
                        for b in &mut hb.bhat_co {
                            *b += rng.gen_range(-0.05..0.05);
                        }
                        vec![hb]
                    })
                    .collect();
                let load = SurfaceLoad { pressure: rng.gen_range(-0.5..0.5), ..Default::default() };
                let res = |x: &[Vec3]| {
                    evaluate_element(ws, x, &mat, &h, dt, &load, opts, false).map(|r| r.residual()).map_err(err)
                };
                let k = evaluate_element(ws, &x, &mat, &h, dt, &load, opts, true)
                    .map_err(err)?
                    .stiffness
                    .ok_or("no stiffness")?;
                let n = x.len();
                let mut kfd = DMatrix::zeros(3 * n, 3 * n);
                for b in 0..n {
                    for j in 0..3 {
                        let (mut xp, mut xm) = (x.clone(), x.clone());
                        xp[b][j] += eps;
                        xm[b][j] -= eps;
                        kfd.set_column(3 * b + j, &((res(&xp)? - res(&xm)?) / (2.0 * eps)));
                    }
                }
                worst = worst.max((&kfd - &k).norm() / k.norm());
                count += 1;
            }
        }
    }
    check(worst <= 1e-5, format!("{count} states (7 elastic x 5 spring kinds x 20), worst relative FD error {worst:.2e} (<= 1e-5)"))
}

/// Largest `r_{k+1}/r_k²` and smallest observed order over the last three
/// residuals above the round-off floor of every step.
fn newton_rates(tangent: TangentMode) -> Result<(f64, f64, usize), String> {
    let options =
        SolverOptions { tol: 1e-14, tol_dx: 0.0, max_iterations: 60, predictor: false, tangent, ..Default::default() };
    let mut sim = Simulation::new(PureBendCase::standard(8).problem().map_err(err)?, options).map_err(err)?;
    let (mut c_max, mut order_min, mut iters) = (0.0f64, f64::INFINITY, 0);
    for _ in 0..10 {
        let r = sim.step(0.1).map_err(err)?;
        iters = iters.max(r.iterations);
        let rs: Vec<f64> = r.residuals.iter().copied().filter(|&v| v > 1e-12).collect();
        if rs.len() >= 3 {
            let t = &rs[rs.len() - 3..];
            c_max = c_max.max(t[1] / (t[0] * t[0])).max(t[2] / (t[1] * t[1]));
            order_min = order_min.min((t[2] / t[1]).ln() / (t[1] / t[0]).ln());
        }
    }
    Ok((c_max, order_min, iters))
}

fn c6_quadratic_newton() -> Outcome {
    let (c_cons, p_cons, i_cons) = newton_rates(TangentMode::Consistent)?;
    let (c_frozen, p_frozen, i_frozen) = newton_rates(TangentMode::FrozenHistory)?;
    check(
        c_cons <= 1e3 && c_frozen >= 1e3 * c_cons && p_frozen < 1.5,
        format!(
            "consistent: max C {c_cons:.2e} (<= 1e3), min observed order {p_cons:.2}, {i_cons} iterations; \
             frozen history: max C {c_frozen:.2e} (>= 1e3 x consistent), min order {p_frozen:.2} (< 1.5), {i_frozen} iterations"
        ),
    )
}

const BUNDLED: [&str; 13] = [
    "pure_shear_relaxation",
    "pure_dilatation",
    "creep",
    "strain_rate",
    "cyclic_loading",
    "frequency_sweep",
    "inflated_balloon",
    "inflated_balloon_mesh",
    "inflated_sphere",
    "pure_bending",
    "pure_bending_mesh",
    "scordelis_lo",
    "scordelis_lo_elastic",
];

struct Bundled {
    summaries: Vec<RunSummary>,
    newton_summaries: Vec<RunSummary>,
    elastic_zero: Vec<(String, bool)>,
}

fn bundled_runs() -> Result<Bundled, String> {
    let mut summaries = Vec::new();
    let mut newton_summaries = Vec::new();
    let mut elastic_zero = Vec::new();
    for name in BUNDLED {
        let cfg = config(name);
        let out = run(&cfg).map_err(|e| format!("{name}: {e}"))?;
        // the pure-bending cases carry their own viscous material
        let viscous = cfg.material.is_viscous() || matches!(cfg.case, CaseConfig::PureBending { .. });
        if !viscous {
            elastic_zero.push((name.to_string(), out.rows.iter().all(|r| r.dissipation == 0.0)));
        }
        summaries.push(out.summary);
        let closed_form = cfg.material.branches.iter().any(|b| {
            b.membrane.is_some_and(|m| {
                m.kind == SpringKind::ConstantSurfaceTension || (m.kind == SpringKind::NeoHookeanMembrane && m.bulk == 0.0)
            })
        });
        if closed_form {
            let forced = SolverOptions { local: LocalMethod::Newton, ..Default::default() };
            newton_summaries.push(run_with(&cfg, forced).map_err(|e| format!("{name} (Newton): {e}"))?.summary);
        }
        // the same scenario with its Maxwell branches removed
        if cfg.material.is_viscous() && !cfg.material.elastic.is_empty() && !matches!(cfg.case, CaseConfig::ScordelisLo { .. }) {
            let mut el = cfg.clone();
            el.material.branches.clear();
            if let Ok(o) = run(&el) {
                elastic_zero.push((format!("{name} (elastic)"), o.rows.iter().all(|r| r.dissipation == 0.0)));
            }
        }
    }
    Ok(Bundled { summaries, newton_summaries, elastic_zero })
}

fn metric(f: [f64; 4]) -> Metrics {
    let f = Mat2::new(1.0 + f[0], f[1], f[2], 1.0 + f[3]);
    Metrics::new(f.transpose() * f, Mat2::zeros()).unwrap()
}

fn c7_local_solver(b: &Bundled) -> Outcome {
    let worst = b.summaries.iter().chain(&b.newton_summaries).max_by_key(|s| s.max_local_iterations).ok_or("no runs")?;
    let mut rng = StdRng::seed_from_u64(7);
    let mut gap = 0.0f64;
    for _ in 0..2000 {
        let mut r = || [0; 4].map(|_| rng.gen_range(-0.3..0.3));
        let (cur, an) = (metric(r()), metric(r()).a_con);
        let dt = rng.gen_range(1e-3..2.0);
        let eta = rng.gen_range(0.05..10.0);
        for br in [
            MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, rng.gen_range(0.1..5.0), eta),
            MaxwellBranch::surface_tension(rng.gen_range(0.1..5.0), eta),
        ] {
            let (a, _) = update_intermediate_metric(&br, &an, &cur, dt, LocalMethod::Auto).map_err(err)?;
            let (n, _) = update_intermediate_metric(&br, &an, &cur, dt, LocalMethod::Newton).map_err(err)?;
            gap = gap.max((a - n).abs().max() / a.abs().max());
        }
    }
    check(
        worst.max_local_iterations <= 10 && gap <= 1e-12,
        format!(
            "max local iterations {} ({}; {} runs incl. {} forced-Newton, <= 10); closed form vs Newton {gap:.1e} (<= 1e-12)",
            worst.max_local_iterations,
            worst.name,
            b.summaries.len() + b.newton_summaries.len(),
            b.newton_summaries.len()
        ),
    )
}

fn c8_split_identities(b: &Bundled) -> Outcome {
    let worst = b
        .summaries
        .iter()
        .chain(&b.newton_summaries)
        .max_by(|x, y| x.max_split_defect.total_cmp(&y.max_split_defect))
        .ok_or("no runs")?;
    check(
        worst.max_split_defect <= 1e-12,
        format!("largest split defect {:.2e} ({}) over every quadrature point and step (<= 1e-12)", worst.max_split_defect, worst.name),
    )
}

fn unimodal_interior(d: &[f64]) -> (bool, usize) {
    let k = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(k, _)| k);
    let up = d[..=k].windows(2).all(|w| w[1] >= w[0]);
    let down = d[k..].windows(2).all(|w| w[1] <= w[0]);
    (up && down && k > 0 && k + 1 < d.len(), k)
}

fn c9_dissipation(b: &Bundled) -> Outcome {
    let bad: Vec<&str> = b.summaries.iter().filter(|s| !s.dissipation_nondecreasing).map(|s| s.name.as_str()).collect();
    let table = sweep(&config("frequency_sweep")).map_err(err)?;
    let mut peaks = Vec::new();
    let mut sweep_ok = true;
    for (eta, d) in table.eta_s.iter().zip(&table.dissipation) {
        let (ok, k) = unimodal_interior(d);
        sweep_ok &= ok && d.iter().all(|&v| v >= 0.0);
        peaks.push(format!("eta_s={eta}: peak {:.3} at omega {:.3e}", d[k], table.omegas[k]));
    }
    let zero_bad: Vec<&str> = b.elastic_zero.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    check(
        bad.is_empty() && sweep_ok && zero_bad.is_empty() && !b.elastic_zero.is_empty(),
        format!(
            "nondecreasing in {}/{} runs; sweep unimodal with interior max [{}]; D == 0 in {} elastic runs{}",
            b.summaries.len() - bad.len(),
            b.summaries.len(),
            peaks.join("; "),
            b.elastic_zero.len() - zero_bad.len(),
            if zero_bad.is_empty() { String::new() } else { format!(" (nonzero: {})", zero_bad.join(", ")) }
        ),
    )
}

fn relaxation_checks() -> Result<(bool, String), String> {
    let out = run(&config("pure_shear_relaxation")).map_err(err)?;
    let rows = &out.rows;
    let mut hold_ok = true;
    let (mut hold_max, mut jump_min, mut holds, mut jumps) = (0.0f64, f64::INFINITY, 0, 0);
    for w in rows.windows(2) {
        let ds = (w[1].sigma[(1, 1)] - w[0].sigma[(1, 1)]).abs();
        if w[1].drive == w[0].drive && w[0].t > 0.0 {
            holds += 1;
            let over = |r: &viscoshell::scenario::run::Row| (r.sigma[(1, 1)] - r.sigma_elastic[(1, 1)]).abs();
            hold_ok &= over(&w[1]) < over(&w[0]) || over(&w[0]) < 1e-12;
            hold_max = hold_max.max(ds);
        } else if (w[1].drive - w[0].drive).abs() > 0.05 {
            jumps += 1;
            jump_min = jump_min.min(ds);
        }
    }
    let ok = hold_ok && jumps >= 1 && jump_min > hold_max;
    Ok((ok, format!("{holds} hold steps decay toward elastic: {hold_ok}; smallest jump {jump_min:.3} > largest hold change {hold_max:.3} over {jumps} jumps")))
}

fn c10_qualitative() -> Outcome {
    let (relax_ok, relax) = relaxation_checks()?;
    let base = config("scordelis_lo");
    let roof = ScordelisLoCase::from_config(&base).map_err(err)?;
    let uz = |o: &RunOutput| -> Vec<f64> { o.rows.iter().map(|r| -r.monitor.z).collect() };
    let elastic = uz(&run(&config("scordelis_lo_elastic")).map_err(err)?);
    let mut curves = Vec::new();
    for eta in [1.0, 50.0, 500.0] {
        let mut cfg = base.clone();
        for b in &mut cfg.material.branches {
            b.eta_s = eta;
            b.eta_b = eta;
        }
        curves.push((eta, uz(&run(&cfg).map_err(|e| format!("eta {eta}: {e}"))?)));
    }
    let n = elastic.len();
    let exceeds = curves.iter().all(|(_, c)| c.len() == n && c[n - 1] > elastic[n - 1] && c.iter().zip(&elastic).all(|(a, e)| *a >= e - 1e-9));
    let ordered = (1..n).all(|k| curves[0].1[k] >= curves[1].1[k] - 1e-9 && curves[1].1[k] >= curves[2].1[k] - 1e-9);
    let creeping = curves.iter().all(|(_, c)| c.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    let ramp_end = base.time.t_end.min(roof.ramp);
    let k_ramp = ((ramp_end / base.time.dt).round() as usize).min(n - 1);
    let finals: Vec<String> = curves
        .iter()
        .map(|(eta, c)| format!("eta {eta}: {:.3} -> {:.3}", c[k_ramp], c[n - 1]))
        .collect();
    check(
        relax_ok && exceeds && ordered && creeping,
        format!(
            "relaxation: {relax}; roof |u_z| at t = {ramp_end} -> t_end [{}], elastic {:.3}; exceeds elastic {exceeds}, faster for smaller eta {ordered}, monotone creep {creeping}",
            finals.join(", "),
            elastic[n - 1]
        ),
    )
}

fn c11_spline() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut kvs = vec![
        KnotVector::uniform(2, 8).map_err(err)?,
        KnotVector::uniform(3, 5).map_err(err)?,
        KnotVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.5, 0.8, 0.8, 0.8, 1.0, 1.0, 1.0, 1.0], 3).map_err(err)?,
    ];
    for _ in 0..50 {
        let p = rng.gen_range(1..=3);
        let spans = rng.gen_range(1..=8);
        let mut cuts: Vec<f64> = (0..spans - 1).map(|_| rng.gen_range(0.05..0.95)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut k = vec![0.0; p + 1];
        for c in cuts {
            k.extend(std::iter::repeat(c).take(rng.gen_range(1..=p)));
        }
        k.extend(std::iter::repeat(1.0).take(p + 1));
        if let Ok(kv) = KnotVector::new(k, p) {
            kvs.push(kv);
        }
    }
    let mut gap = 0.0f64;
    for kv in &kvs {
        let p = kv.degree();
        let ops = build_extraction(kv).map_err(err)?;
        let (g, _) = gauss_legendre(p + 2);
        for (e, &(i, a, b)) in kv.spans().iter().enumerate() {
            let h = b - a;
            for x in g.iter().map(|s| a + 0.5 * (s + 1.0) * h).chain([a, b]) {
                let ext = bspline_on_element(&ops[e], p, (a, b), x).map_err(err)?;
                let rec = cox_de_boor(kv, i, x).map_err(err)?;
                for k in 0..=p {
                    gap = gap.max((ext.values[k] - rec.values[k]).abs()).max((ext.d1[k] - rec.d1[k]).abs() * h / p as f64);
                    if p >= 2 {
                        gap = gap.max((ext.d2[k] - rec.d2[k]).abs() * h * h / (p * p) as f64);
                    }
                }
            }
        }
    }
    let mut unity = 0.0f64;
    let mut qps = 0;
    let meshes = [
        PatchMesh::flat_rectangle(1.0, std::f64::consts::PI, [2, 2], [16, 32]).map_err(err)?,
        PatchMesh::flat_rectangle(1.0, 1.0, [3, 2], [4, 3]).map_err(err)?,
        PatchMesh::cylinder_roof(25.0, 50.0, 40f64.to_radians(), [8, 8]).map_err(err)?,
    ];
    for mesh in &meshes {
        for ws in build_workspaces(mesh).map_err(err)? {
            let el = mesh.element_spline(ws.element);
            let ((a, b), (c, d)) = (el.spans[0], el.spans[1]);
            for q in &ws.qps {
                let r = nurbs_eval(&el, q.xi, q.eta).map_err(err)?;
                unity = unity.max((r.values.iter().sum::<f64>() - 1.0).abs());
                for k in 0..2 {
                    unity = unity.max(r.d1.iter().map(|v| v[k]).sum::<f64>().abs() * if k == 0 { b - a } else { d - c });
                }
                for k in 0..3 {
                    unity = unity.max(r.d2.iter().map(|v| v[k]).sum::<f64>().abs() * (b - a) * (d - c));
                }
                qps += 1;
            }
        }
    }
    check(
        gap <= 1e-12 && unity <= 1e-12,
        format!(
            "extraction vs recursion on {} knot vectors: {gap:.1e} (<= 1e-12); partition of unity / derivative sums at {qps} quadrature points: {unity:.1e} (<= 1e-12)",
            kvs.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let report = |id: usize, name: &str, outcome: Outcome, failed: &mut usize| {
        match outcome {
            Ok(d) => println!("PASS  C{id:<2} {name}: {d}"),
            Err(d) => {
                *failed += 1;
                println!("FAIL  C{id:<2} {name}: {d}");
            }
        }
    };
    let mut failed = 0;
    report(1, "balloon time-step convergence", c1_balloon_time_step(), &mut failed);
    report(2, "balloon mesh insensitivity", c2_balloon_mesh(), &mut failed);
    report(3, "pure-bending strip", c3_pure_bending(), &mut failed);
    report(4, "spherical-shell pressure", c4_sphere(), &mut failed);
    report(5, "consistent tangent", c5_consistent_tangent(), &mut failed);
    report(6, "global Newton quadratic convergence", c6_quadratic_newton(), &mut failed);
    match bundled_runs() {
        Ok(b) => {
            report(7, "local evolution solver", c7_local_solver(&b), &mut failed);
            report(8, "split identities", c8_split_identities(&b), &mut failed);
            report(9, "dissipation suite", c9_dissipation(&b), &mut failed);
        }
        Err(e) => {
            for (id, name) in [(7, "local evolution solver"), (8, "split identities"), (9, "dissipation suite")] {
                report(id, name, Err(format!("bundled runs failed: {e}")), &mut failed);
            }
        }
    }
    report(10, "relaxation and creep behaviour", c10_qualitative(), &mut failed);
    report(11, "spline layer", c11_spline(), &mut failed);
    println!("acceptance: {} of 11 criteria passed in {:.1} s", 11 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

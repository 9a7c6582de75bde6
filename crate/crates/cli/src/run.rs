//! Task execution. Every task produces a [`TaskOutcome`]; tasks may run in
//! parallel but outcomes are collected in scenario order.

use crate::report::{jnum, Cell, Table, TaskOutcome};
use crate::scenario::{
    grid_values, parse_vars_expr, rat_vec, support_vars, DecomposeTask, DirectionSpec, Expectation, FitTask,
    IdentityTask, IntegrateTask, LanglandsTask, LatticeSumTask, Method, ModeSpec, Model, PartitionTask, Quantity, Task,
    TruncateTask, ValidateTask,
};
use polytrunc_core::chains::{
    brianchon_gram, chains_equal, lattice_count_chain, lawrence_varchenko, virtual_characteristic, Chain, Equality,
    EqualityMode, VirtualPolytopePair,
};
use polytrunc_core::geometry::random::{integer_direction, point};
use polytrunc_core::geometry::{realize_polytope, Cone, Direction, Polytope, SupportVector};
use polytrunc_core::incidence::{verify_gamma_inversion, verify_langlands};
use polytrunc_core::polynomiality::{
    discrete_identity_probe, fit_polynomial_exact, fit_samples, polynomiality_identity_check, FitReport,
};
use polytrunc_core::rational::{fmt_rat, fmt_vec, rat, to_f64, vec_f64, zeros, Rat, Vector};
use polytrunc_core::truncation::{
    certify, divergence_probe, j_integral_report, k_delta, s_lattice_sum, verify_double_partition, Expr, KFamily,
    QuadOptions,
};
use polytrunc_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Seed of task `index`: its own seed if set, else derived from the run seed.
pub fn task_seed(base: u64, index: usize, own: Option<u64>) -> u64 {
    own.unwrap_or_else(|| base ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Run every task of the model, `jobs` at a time, in scenario order.
pub fn run_tasks(model: &Model, seed: u64, jobs: usize) -> Vec<TaskOutcome> {
    let tasks = &model.scenario.tasks;
    let slots: Vec<Mutex<Option<TaskOutcome>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= tasks.len() {
                    break;
                }
                let out = run_task(model, i, seed);
                *slots[i].lock().expect("slot") = Some(out);
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("slot").expect("task ran")).collect()
}

/// Name of an engine error variant (`NotAcute`, `QuadratureStall`, …).
pub fn error_kind(e: &Error) -> String {
    let d = format!("{e:?}");
    d.split(|c: char| !c.is_ascii_alphanumeric()).next().unwrap_or("Error").to_string()
}

/// Run task `i`; engine errors become a failed outcome.
pub fn run_task(model: &Model, i: usize, base_seed: u64) -> TaskOutcome {
    let task = &model.scenario.tasks[i];
    let mut out = TaskOutcome::new(&model.task_names[i], task.kind());
    let seed = task_seed(base_seed, i, task.seed());
    let r = match task {
        Task::Validate(t) => validate_task(model, t, &mut out),
        Task::Decompose(t) => decompose_task(model, t, seed, &mut out),
        Task::Truncate(t) => truncate_task(model, t, seed, &mut out),
        Task::Integrate(t) => integrate_task(model, t, seed, &mut out),
        Task::LatticeSum(t) => lattice_sum_task(model, t, &mut out),
        Task::Fit(t) => fit_task(model, t, seed, &mut out),
        Task::Langlands(t) => langlands_task(model, t, seed, &mut out),
        Task::PartitionCheck(t) => partition_task(model, t, seed, &mut out),
        Task::IdentityCheck(t) => identity_task(model, t, &mut out),
    };
    if let Err(e) = r {
        out.fail_with(&error_kind(&e), e.to_string());
    }
    out
}

type R = polytrunc_core::Result<()>;

fn support<'a>(model: &'a Model, name: &str) -> &'a SupportVector {
    &model.supports[name]
}

fn equality_mode(mode: Option<ModeSpec>, samples: Option<usize>, seed: u64) -> EqualityMode {
    match mode.unwrap_or(ModeSpec::Exact) {
        ModeSpec::Exact => EqualityMode::Exact,
        ModeSpec::Sampled => EqualityMode::Sampled { samples: samples.unwrap_or(10_000), seed, radius: 16 },
    }
}

fn describe(e: &Equality) -> String {
    match e {
        Equality::Equal => "equal".into(),
        Equality::Counterexample { point, left, right } => {
            format!("differ at {}: {} vs {}", fmt_vec(point), fmt_rat(left), fmt_rat(right))
        }
    }
}

fn rays_text(model: &Model, cone: usize) -> String {
    let rays: Vec<String> = model.fan.cones[cone].rays.iter().map(|&r| fmt_vec(&model.fan.rays[r])).collect();
    format!("[{}]", rays.join(" "))
}

/// The polytopes a numeric task is evaluated on, each with its dilation
/// factor when dilating; infeasible grid points are counted and skipped.
fn evaluation_points(
    model: &Model,
    support: Option<&str>,
    grid: &[Vec<crate::scenario::Num>],
    dilations: Option<i64>,
) -> polytrunc_core::Result<(Vec<(Option<Rat>, Polytope)>, usize)> {
    if let Some(count) = dilations {
        let base = support.map(|s| &model.supports[s]).expect("validated");
        let pts = (1..=count)
            .map(|t| Ok((Some(rat(t)), realize_polytope(&base.scale(&rat(t)))?)))
            .collect::<polytrunc_core::Result<Vec<_>>>()?;
        return Ok((pts, 0));
    }
    if grid.is_empty() {
        let s = &model.supports[support.expect("validated")];
        return Ok((vec![(None, realize_polytope(s)?)], 0));
    }
    let values = grid_values(grid);
    let mut pts = Vec::new();
    let mut skipped = 0;
    let mut idx = vec![0usize; values.len()];
    if values.iter().any(|v| v.is_empty()) {
        return Ok((pts, 0));
    }
    loop {
        let a: Vec<Rat> = idx.iter().zip(&values).map(|(&i, v)| v[i].clone()).collect();
        match SupportVector::new(model.fan.clone(), a).and_then(|s| realize_polytope(&s)) {
            Ok(p) => pts.push((None, p)),
            Err(_) => skipped += 1,
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return Ok((pts, skipped));
            }
            idx[d] += 1;
            if idx[d] < values[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn point_header(model: &Model, dilating: bool) -> Vec<String> {
    let mut h = Vec::new();
    if dilating {
        h.push("t".to_string());
    }
    h.extend(support_vars(model.fan.num_rays()));
    h
}

fn point_cells(t: &Option<Rat>, p: &Polytope) -> Vec<Cell> {
    let mut row: Vec<Cell> = t.iter().map(|t| Cell::Exact(t.clone())).collect();
    row.extend(p.support.a.iter().map(|a| Cell::Exact(a.clone())));
    row
}

fn support_expr(model: &Model, text: &Option<String>) -> Option<Expr> {
    text.as_ref().map(|e| parse_vars_expr(e, &support_vars(model.fan.num_rays())).expect("validated"))
}

fn validate_task(model: &Model, t: &ValidateTask, out: &mut TaskOutcome) -> R {
    let fan = &model.fan;
    out.line(format!(
        "fan: dimension {}, {} rays, {} cones ({} maximal); complete {}, simplicial {}, acute {}",
        fan.dim(),
        fan.num_rays(),
        fan.cones.len(),
        fan.maximal.len(),
        fan.complete,
        fan.simplicial,
        fan.acute
    ));
    let mut rays = Table::new("rays", &["ray", "name", "vector"]);
    for (i, r) in fan.rays.iter().enumerate() {
        rays.push(vec![i.into(), format!("a{i}").into(), fmt_vec(r).into()]);
    }
    let mut sup = Table::new("supports", &["support", "realized", "volume", "vertices", "error"]);
    let mut all_ok = true;
    for (name, s) in &model.supports {
        match realize_polytope(s) {
            Ok(p) => {
                let nv = fan.maximal.len();
                sup.push(vec![name.as_str().into(), true.into(), p.volume().into(), nv.into(), Cell::Empty]);
            }
            Err(e) => {
                // A virtual polytope is legitimate input for some tasks.
                sup.push(vec![name.as_str().into(), false.into(), Cell::Empty, Cell::Empty, e.to_string().into()]);
            }
        }
    }
    let cert = certify(&model.family);
    out.line(format!("convergence certificate: {}", cert.verdict));
    let mut inv = Table::new("family", &["cone", "rays", "k", "invariant"]);
    for (c, i) in &cert.invariance {
        inv.push(vec![(*c).into(), rays_text(model, *c).into(), model.family.get(*c).to_string().into(), i.holds().into()]);
    }
    out.set("complete", json!(fan.complete));
    out.set("acute", json!(fan.acute));
    out.set("certificate", json!(cert.verdict.to_string()));
    out.set("certified", json!(cert.certified()));
    out.set("rays", json!(fan.rays.iter().map(|r| fmt_vec(r)).collect::<Vec<_>>()));
    if let Some(a) = t.expect_acute {
        all_ok &= a == fan.acute;
        out.check(a == fan.acute, format!("fan acute = {} (expected {a})", fan.acute));
    }
    if let Some(c) = t.expect_certified {
        all_ok &= c == cert.certified();
        out.check(c == cert.certified(), format!("certified = {} (expected {c})", cert.certified()));
    }
    if all_ok {
        out.line("scenario objects are consistent");
    }
    out.tables = vec![rays, sup, inv];
    Ok(())
}

fn decompose_task(model: &Model, t: &DecomposeTask, seed: u64, out: &mut TaskOutcome) -> R {
    let s = support(model, &t.support);
    let mode = equality_mode(t.mode, t.samples, seed);
    let (target, what) = match &t.minus {
        Some(m) => {
            let vp = VirtualPolytopePair::from_supports(s, support(model, m))?;
            (virtual_characteristic(&vp)?, format!("virtual polytope {} − {m}", t.support))
        }
        None => (Chain::indicator(realize_polytope(s)?.region()), format!("1 of {}", t.support)),
    };
    let s = match &t.minus {
        Some(m) => s.sub(support(model, m))?,
        None => s.clone(),
    };
    let mut table = Table::new("checks", &["method", "direction", "terms", "result"]);
    let mut failures = 0;
    match t.method {
        Method::BrianchonGram => {
            let dirs = match t.direction {
                Some(DirectionSpec::Inward) => vec![Direction::Inward],
                Some(DirectionSpec::Outward) => vec![Direction::Outward],
                None => vec![Direction::Inward, Direction::Outward],
            };
            for d in dirs {
                let c = brianchon_gram(&s, d)?;
                let r = chains_equal(&c, &target, &mode)?;
                failures += usize::from(!r.holds());
                let dname = if d == Direction::Inward { "inward" } else { "outward" };
                table.push(vec!["brianchon-gram".into(), dname.into(), c.terms.len().into(), describe(&r).into()]);
            }
        }
        Method::LawrenceVarchenko => {
            let mut xis: Vec<Vector> = t.xi.iter().map(|x| rat_vec(x)).collect();
            let want = xis.len() + t.random_xi.unwrap_or(if xis.is_empty() { 5 } else { 0 });
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut tries = 0;
            let mut chains = Vec::new();
            for xi in xis.drain(..) {
                chains.push((xi.clone(), lawrence_varchenko(&s, &xi)?));
            }
            while chains.len() < want && tries < 1000 {
                tries += 1;
                let xi = integer_direction(&mut rng, model.fan.dim(), 9);
                match lawrence_varchenko(&s, &xi) {
                    Ok(c) => chains.push((xi, c)),
                    Err(Error::NonGenericXi { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            for (xi, c) in chains {
                let r = chains_equal(&c, &target, &mode)?;
                failures += usize::from(!r.holds());
                table.push(vec!["lawrence-varchenko".into(), fmt_vec(&xi).into(), c.terms.len().into(), describe(&r).into()]);
            }
        }
    }
    let total = table.rows.len();
    out.check(failures == 0 && total > 0, format!("{} decompositions equal {what}: {failures} failures", total));
    out.set("checked", json!(total));
    out.set("failures", json!(failures));
    out.tables.push(table);
    Ok(())
}

fn truncate_task(model: &Model, t: &TruncateTask, seed: u64, out: &mut TaskOutcome) -> R {
    let p = realize_polytope(support(model, &t.support))?;
    let kd = k_delta(&model.family, &p)?;
    let n = model.fan.dim();
    let mut pts: Vec<Vector> = t.points.iter().map(|x| rat_vec(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..t.samples.unwrap_or(if pts.is_empty() { 200 } else { 0 }) {
        pts.push(point(&mut rng, n, t.radius.unwrap_or(4), 4));
    }
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend(["in_delta", "k_delta", "k0"].map(String::from));
    let mut table = Table::with_header("values", header);
    let k0 = model.family.get(0);
    let mut inside = 0;
    let mut worst: f64 = 0.0;
    for x in &pts {
        let v = kd.eval(x);
        let k = k0.eval(&vec_f64(x));
        let in_delta = p.contains(x);
        if in_delta {
            inside += 1;
            worst = worst.max((v - k).abs() / k.abs().max(1.0));
        }
        let mut row: Vec<Cell> = x.iter().map(|c| Cell::Exact(c.clone())).collect();
        row.extend([in_delta.into(), v.into(), k.into()]);
        table.push(row);
    }
    out.line(format!("k_Δ has {} terms; {} points, {inside} in Δ", kd.terms.len(), pts.len()));
    out.check(worst <= 1e-12, format!("k_Δ = K₀ on Δ (max relative deviation {worst:e})"));
    out.set("points", json!(pts.len()));
    out.set("inside", json!(inside));
    out.set("max_deviation_on_delta", jnum(worst));
    out.tables.push(table);
    Ok(())
}

/// Replace a failed certificate by `NotAcute` when acuteness is what failed.
fn certificate_error(kf: &KFamily) -> Option<Error> {
    let c = certify(kf);
    if c.certified() {
        return None;
    }
    Some(match c.acute_violation {
        Some((i, j)) => Error::NotAcute(i, j),
        None => Error::NoCertificate(c.verdict.to_string()),
    })
}

fn integrate_task(model: &Model, t: &IntegrateTask, seed: u64, out: &mut TaskOutcome) -> R {
    let kf = &model.family;
    let (pts, skipped) = evaluation_points(model, t.support.as_deref(), &t.grid, t.dilations)?;
    if let Some(e) = certificate_error(kf) {
        out.fail_with(&error_kind(&e), e.to_string());
        if let (Some([lo, hi]), Some((_, p))) = (t.probe, pts.first()) {
            let mut table = Table::new("divergence-probe", &["radius", "abs_integral", "error", "increment"]);
            let rows = divergence_probe(kf, p, lo..=hi)?;
            let mut prev: Option<f64> = None;
            for (r, e) in &rows {
                table.push(vec![(*r).into(), e.value.into(), e.error.into(), prev.map(|q| e.value - q).into()]);
                prev = Some(e.value);
            }
            out.line(format!("∫ |k_Δ| over [−r, r]ⁿ keeps growing: {}", rows.iter().map(|(r, e)| format!("r={r}: {:.3}", e.value)).collect::<Vec<_>>().join(", ")));
            out.tables.push(table);
        }
        return Ok(());
    }
    let tol = t.tol.unwrap_or(1e-10);
    let opts = QuadOptions { seed, ..QuadOptions::new(tol) };
    let expected = support_expr(model, &t.expected);
    let dilating = t.dilations.is_some();
    let mut header = point_header(model, dilating);
    header.extend(["value", "error", "expected", "rel_err"].map(String::from));
    let mut table = Table::with_header("values", header);
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for (tt, p) in &pts {
        let r = j_integral_report(kf, p, &opts)?;
        values.push(r.estimate.value);
        let want = expected.as_ref().map(|e| e.eval(&vec_f64(&p.support.a)));
        let rel = want.map(|w| (r.estimate.value - w).abs() / w.abs().max(f64::MIN_POSITIVE));
        worst = worst.max(rel.unwrap_or(0.0));
        let mut row = point_cells(tt, p);
        row.extend([r.estimate.value.into(), r.estimate.error.into(), want.into(), rel.into()]);
        table.push(row);
    }
    out.line(format!("J evaluated on {} polytopes ({skipped} infeasible grid points skipped), tol {tol:e}", pts.len()));
    out.set("evaluations", json!(pts.len()));
    out.set("skipped", json!(skipped));
    if let [v] = values[..] {
        out.set("value", jnum(v));
    }
    if let Some(e) = &t.expected {
        let rt = t.rel_tol.unwrap_or(1e-8);
        out.check(worst < rt, format!("J matches {e} (max relative error {worst:e} < {rt:e})"));
        out.set("max_rel_err", jnum(worst));
    }
    out.tables.push(table);
    Ok(())
}

/// `Σ_σ (−1)^{dim σ} c_σ 1_{T⁻_{Δ,σ}}` for a constant family.
fn constant_chain(kf: &KFamily, p: &Polytope) -> polytrunc_core::Result<Option<Chain>> {
    let Some(cs) = kf.constant_values() else { return Ok(None) };
    let kd = k_delta(kf, p)?;
    let mut c = Chain::zero(kd.dim);
    for term in &kd.terms {
        c.push(rat(term.sign as i64) * &cs[term.cone], term.region.clone());
    }
    Ok(Some(c))
}

fn lattice_sum_task(model: &Model, t: &LatticeSumTask, out: &mut TaskOutcome) -> R {
    let kf = &model.family;
    let (pts, skipped) = evaluation_points(model, t.support.as_deref(), &t.grid, t.dilations)?;
    if let Some(e) = certificate_error(kf) {
        return Err(e);
    }
    let n = model.fan.dim();
    let shift = t.shift.as_ref().map_or_else(|| zeros(n), |s| rat_vec(s));
    let tol = t.tol.unwrap_or(1e-12);
    let expected = support_expr(model, &t.expected);
    let mut header = point_header(model, t.dilations.is_some());
    header.extend(["exact", "direct_exact", "value", "error", "expected", "rel_err"].map(String::from));
    let mut table = Table::with_header("values", header);
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for (tt, p) in &pts {
        let s = s_lattice_sum(kf, p, &shift, tol)?;
        let direct = match constant_chain(kf, p)? {
            Some(c) => Some(lattice_count_chain(&c, &shift)?),
            None => None,
        };
        if let (Some(a), Some(b)) = (&s.exact, &direct) {
            mismatches += usize::from(a != b);
        }
        let value = s.exact.as_ref().map_or(s.estimate.value, to_f64);
        let want = expected.as_ref().map(|e| e.eval(&vec_f64(&p.support.a)));
        let rel = want.map(|w| (value - w).abs() / w.abs().max(1.0));
        worst = worst.max(rel.unwrap_or(0.0));
        let mut row = point_cells(tt, p);
        row.extend([s.exact.into(), direct.into(), s.estimate.value.into(), s.estimate.error.into(), want.into(), rel.into()]);
        table.push(row);
    }
    out.line(format!("lattice sums over {} + ℤⁿ on {} polytopes ({skipped} infeasible skipped)", fmt_vec(&shift), pts.len()));
    out.check(mismatches == 0, format!("exact sums agree with direct lattice counts ({mismatches} mismatches)"));
    if let Some(e) = &t.expected {
        let rt = t.rel_tol.unwrap_or(1e-10);
        out.check(worst < rt, format!("sum matches {e} (max relative error {worst:e})"));
    }
    out.set("evaluations", json!(pts.len()));
    out.set("mismatches", json!(mismatches));
    out.tables.push(table);
    Ok(())
}

fn monomial_name(e: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(&p, _)| p > 0)
        .map(|(&p, n)| if p == 1 { n.clone() } else { format!("{n}^{p}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn fit_task(model: &Model, t: &FitTask, seed: u64, out: &mut TaskOutcome) -> R {
    let kf = &model.family;
    let dilating = t.dilations.is_some();
    let (pts, skipped) = evaluation_points(model, t.support.as_deref(), &t.grid, t.dilations)?;
    let names = if dilating { vec!["t".to_string()] } else { support_vars(model.fan.num_rays()) };
    let coords = |tt: &Option<Rat>, p: &Polytope| -> Vec<Rat> {
        match tt {
            Some(t) => vec![t.clone()],
            None => p.support.a.clone(),
        }
    };
    if t.quantity != Quantity::Volume {
        if let Some(e) = certificate_error(kf) {
            return Err(e);
        }
    }
    let tol = t.tol.unwrap_or(1e-10);
    let opts = QuadOptions { seed, ..QuadOptions::new(tol) };
    let mut samples: Vec<(Vec<Rat>, Option<Rat>, f64)> = Vec::new();
    for (tt, p) in &pts {
        let (exact, value) = match t.quantity {
            Quantity::Volume => {
                let v = p.volume();
                (Some(v.clone()), to_f64(&v))
            }
            Quantity::LatticeSum => {
                let s = s_lattice_sum(kf, p, &zeros(model.fan.dim()), tol)?;
                (s.exact.clone(), s.exact.as_ref().map_or(s.estimate.value, to_f64))
            }
            Quantity::Integral => (None, j_integral_report(kf, p, &opts)?.estimate.value),
        };
        samples.push((coords(tt, p), exact, value));
    }
    let every = t.holdout_every.unwrap_or(0);
    let held = |i: usize| every > 0 && i % every == every - 1;
    let expected = t.expected.as_ref().map(|e| parse_vars_expr(e, &names).expect("validated"));
    let grid_desc = format!("{} points ({skipped} infeasible skipped)", pts.len());
    let split = |f: &dyn Fn(&(Vec<Rat>, Option<Rat>, f64)) -> f64| {
        let mut fit = Vec::new();
        let mut hold = Vec::new();
        for (i, s) in samples.iter().enumerate() {
            let row = (vec_f64(&s.0), f(s));
            if held(i) {
                hold.push(row);
            } else {
                fit.push(row);
            }
        }
        (fit, hold)
    };
    let (fs, hs) = split(&|s| s.2);
    let report: FitReport = fit_samples(&names, &fs, &hs, t.degree, &grid_desc)?;
    out.line(format!(
        "fit of degree {} on {} samples ({} held out); condition {:e}",
        t.degree, report.samples, report.holdout, report.condition
    ));
    let max_res = t.max_residual.unwrap_or(1e-6);
    out.check(report.fit_residual <= max_res, format!("fit residual {:e} ≤ {max_res:e}", report.fit_residual));
    if report.holdout > 0 {
        out.check(report.holdout_residual <= max_res, format!("holdout residual {:e} ≤ {max_res:e}", report.holdout_residual));
    }
    let exact_fit = if t.exact.unwrap_or(false) {
        let ex: Option<Vec<(Vec<Rat>, Rat)>> = samples.iter().map(|s| s.1.clone().map(|v| (s.0.clone(), v))).collect();
        match ex {
            Some(ex) => {
                let (poly, resid) = fit_polynomial_exact(&names, &ex, t.degree)?;
                out.check(resid == Rat::from_integer(0.into()), format!("exact fit {poly} with residual {}", fmt_rat(&resid)));
                Some(poly)
            }
            None => {
                out.check(false, "exact fit requested but the quantity is not exact for this family");
                None
            }
        }
    } else {
        None
    };
    let expected_fit = match &expected {
        Some(e) => {
            let (efs, ehs) = split(&|s| e.eval(&vec_f64(&s.0)));
            Some(fit_samples(&names, &efs, &ehs, t.degree, &grid_desc)?)
        }
        None => None,
    };
    let mut coef = Table::new("coefficients", &["monomial", "coefficient", "exact", "expected", "abs_err"]);
    let mut worst: f64 = 0.0;
    for (e, c) in &report.polynomial.terms {
        let want = expected_fit.as_ref().map(|f| f.polynomial.coefficient(e));
        let err = want.map(|w| (c - w).abs());
        worst = worst.max(err.unwrap_or(0.0));
        let ex = exact_fit.as_ref().map(|p| p.coefficient(e));
        coef.push(vec![monomial_name(e, &names).into(), (*c).into(), ex.into(), want.into(), err.into()]);
    }
    out.line(format!("fitted polynomial: {}", report.polynomial));
    if let Some(e) = &t.expected {
        let ct = t.coef_tol.unwrap_or(1e-4);
        out.check(worst < ct, format!("coefficients match {e} (max abs error {worst:e} < {ct:e})"));
        out.set("max_coef_err", jnum(worst));
    }
    let mut header = names.clone();
    header.extend(["exact", "value", "fitted", "residual", "held_out"].map(String::from));
    let mut st = Table::with_header("samples", header);
    for (i, s) in samples.iter().enumerate() {
        let f = report.polynomial.eval(&vec_f64(&s.0));
        let mut row: Vec<Cell> = s.0.iter().map(|c| Cell::Exact(c.clone())).collect();
        row.extend([s.1.clone().into(), s.2.into(), f.into(), (f - s.2).into(), held(i).into()]);
        st.push(row);
    }
    out.set("fit_residual", jnum(report.fit_residual));
    out.set("holdout_residual", jnum(report.holdout_residual));
    out.set("condition", jnum(report.condition));
    out.set("polynomial", json!(report.polynomial.to_string()));
    if let Some(p) = &exact_fit {
        out.set("exact_polynomial", json!(p.to_string()));
    }
    out.tables.push(coef);
    out.tables.push(st);
    Ok(())
}

fn langlands_task(model: &Model, t: &LanglandsTask, seed: u64, out: &mut TaskOutcome) -> R {
    let sp = &model.fan.space;
    let mode = equality_mode(t.mode, t.samples, seed);
    let cones: Vec<(String, Cone)> = if t.cones.is_empty() {
        model.fan.maximal.iter().map(|&m| (rays_text(model, m), model.fan.cones[m].cone.clone())).collect()
    } else {
        t.cones
            .iter()
            .map(|c| {
                let rays: Vec<Vector> = c.iter().map(|r| polytrunc_core::rational::vec_i(r)).collect();
                let label = format!("[{}]", rays.iter().map(|r| fmt_vec(r)).collect::<Vec<_>>().join(" "));
                Ok((label, Cone::new(rays, sp)?))
            })
            .collect::<polytrunc_core::Result<_>>()?
    };
    let mut table = Table::new("langlands", &["cone", "dim", "intervals", "failures", "first_failure"]);
    let mut failures = 0;
    for (label, c) in &cones {
        let r = verify_langlands(c, sp, &mode)?;
        failures += r.failures.len();
        let first = r.failures.first().map(|f| format!("{:?} {}: {}", f.interval, f.product, describe(&f.result)));
        table.push(vec![label.as_str().into(), r.dim.into(), r.intervals.into(), r.failures.len().into(), first.map_or(Cell::Empty, Cell::from)]);
    }
    out.check(failures == 0, format!("F ∗ G = G ∗ F = δ on {} cones ({failures} failing intervals)", cones.len()));
    out.tables.push(table);
    if let Some(sname) = &t.support {
        let s = support(model, sname);
        let mut gt = Table::new("gamma-inversion", &["cone", "passed", "forward_failures", "inverse_failures"]);
        let mut bad = 0;
        for &m in &model.fan.maximal {
            let r = verify_gamma_inversion(s, m, &mode)?;
            bad += usize::from(!r.passed());
            gt.push(vec![rays_text(model, m).into(), r.passed().into(), r.forward_failures.len().into(), r.inverse_failures.len().into()]);
        }
        out.check(bad == 0, format!("1(T⁻) = Σ γ_τ G(τ,σ) on {} maximal cones of {sname} ({bad} failures)", model.fan.maximal.len()));
        out.tables.push(gt);
    }
    out.set("cones", json!(cones.len()));
    out.set("failures", json!(failures));
    Ok(())
}

fn partition_task(model: &Model, t: &PartitionTask, seed: u64, out: &mut TaskOutcome) -> R {
    let p = realize_polytope(support(model, &t.support))?;
    let samples = t.samples.unwrap_or(2000);
    let mut table = Table::new("partition", &["cone", "rays", "samples", "pairs", "violations", "overlaps", "witness"]);
    let mut failing = 0;
    for sigma in 0..model.fan.cones.len() {
        let r = verify_double_partition(&p, sigma, samples, seed.wrapping_add(sigma as u64))?;
        let witness = match (r.violations.first(), r.overlaps.first()) {
            (Some((x, hits)), _) => Cell::from(format!("{} lies in {} regions", fmt_vec(x), hits.len())),
            (None, Some((a, b, x))) => Cell::from(format!("{a:?} and {b:?} share {}", fmt_vec(x))),
            _ => Cell::Empty,
        };
        failing += usize::from(!r.passed());
        table.push(vec![
            sigma.into(),
            rays_text(model, sigma).into(),
            r.samples.into(),
            r.pairs_checked.into(),
            r.violations.len().into(),
            r.overlaps.len().into(),
            witness,
        ]);
    }
    let holds = failing == 0;
    let expect = t.expect.unwrap_or(Expectation::Pass);
    let verdict = if holds { "holds" } else { "fails" };
    out.line(format!("double partition {verdict} ({failing} of {} cones fail; fan acute {})", model.fan.cones.len(), model.fan.acute));
    out.check(holds == (expect == Expectation::Pass), format!("partition {verdict}, as expected: {}", holds == (expect == Expectation::Pass)));
    out.set("holds", json!(holds));
    out.set("failing_cones", json!(failing));
    out.tables.push(table);
    Ok(())
}

fn identity_task(model: &Model, t: &IdentityTask, out: &mut TaskOutcome) -> R {
    let kf = &model.family;
    let p = realize_polytope(support(model, &t.support))?;
    let tol = t.tol.unwrap_or(1e-10);
    let r = polynomiality_identity_check(kf, &p, tol)?;
    let mut table = Table::new("terms", &["cone", "rays", "index", "vol_gamma", "j_zero", "j_zero_error"]);
    for term in &r.terms {
        table.push(vec![
            term.tau.into(),
            rays_text(model, term.tau).into(),
            term.index.clone().into(),
            term.vol_gamma.clone().into(),
            term.j_zero.value.into(),
            term.j_zero.error.into(),
        ]);
    }
    let max_rel = t.max_relative.unwrap_or(1e-8);
    out.line(format!("J = {:e} ± {:e}; Σ_τ |det[E,U]| J_Σ/τ(0) vol Γ_τ = {:e} ± {:e}", r.lhs.value, r.lhs.error, r.rhs.value, r.rhs.error));
    out.check(r.relative() <= max_rel, format!("relative discrepancy {:e} ≤ {max_rel:e}", r.relative()));
    out.set("lhs", jnum(r.lhs.value));
    out.set("rhs", jnum(r.rhs.value));
    out.set("relative_discrepancy", jnum(r.relative()));
    out.tables.push(table);
    if kf.constant_values().is_some() {
        let d = discrete_identity_probe(kf, &p)?;
        out.check(d.agrees(), format!("discrete identity: direct {} = via cosets {}", fmt_rat(&d.direct), fmt_rat(&d.via_cosets)));
        out.set("discrete_direct", json!(fmt_rat(&d.direct)));
        out.set("discrete_via_cosets", json!(fmt_rat(&d.via_cosets)));
        let mut ct = Table::new("cosets", &["cone", "rays", "cosets"]);
        for (tau, m) in &d.cosets {
            ct.push(vec![(*tau).into(), rays_text(model, *tau).into(), (*m).into()]);
        }
        out.tables.push(ct);
    }
    Ok(())
}

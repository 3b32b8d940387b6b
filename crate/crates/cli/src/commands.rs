//! One function per subcommand. Each validates its flags, calls into the
//! library and assembles an [`Artifact`]; none of them touch the filesystem.

use std::f64::consts::TAU;

use hyperglass::beltrami::{funnel_mesh, gaussian_curvature, sine_gordon_residual, soliton, ChartId, SineGordonForm};
use hyperglass::grid::observed_orders;
use hyperglass::hypmodels::{
    horocycle_through, to_disk, BoundaryPoint, DiskPoint, Geodesic, HalfPlanePoint, Horocycle,
};
use hyperglass::rays::{is_physical_ray, trace_geodesic, trace_geodesic_sampled, RayState, TraceOptions};
use hyperglass::specfun::{
    conical_function_detailed, eigen_residual, field_sample, laplace_beltrami_disk, laplace_beltrami_halfplane,
    poisson_kernel, QuadratureOptions, WaveParams, DEFAULT_CLAMP,
};
use hyperglass::verify::{self, Suite};
use hyperglass::{Error, Grid};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, FieldArgs, FrontsArgs, LegendreArgs, Model, PseudosphereArgs, TraceArgs, VerifyArgs};
use crate::output::{Artifact, Cell};
use crate::Failure;

/// Exit status reported alongside a successfully written artifact.
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_LEGENDRE_FLAGGED: i32 = 4;

pub struct Outcome {
    pub artifact: Artifact,
    pub code: i32,
    /// Printed on stderr when `code != 0`.
    pub summary: Option<String>,
}

impl Outcome {
    fn ok(artifact: Artifact) -> Self {
        Self { artifact, code: 0, summary: None }
    }
}

pub fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Trace(a) => trace(a).map(Outcome::ok),
        Command::Field(a) => field(a).map(Outcome::ok),
        Command::Fronts(a) => fronts(a).map(Outcome::ok),
        Command::Legendre(a) => legendre(a),
        Command::Pseudosphere(a) => pseudosphere(a).map(Outcome::ok),
        Command::Verify(a) => run_verify(a),
    }
}

fn params<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("flag structs serialize")
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::config(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::config(format!("--{name} must be finite, got {v}")))
    }
}

/// Comma-separated finite floats; the empty string is the empty list.
pub fn parse_list(name: &str, s: &str) -> Result<Vec<f64>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Failure::config(format!("--{name}: {t:?} is not a finite number"))),
            }
        })
        .collect()
}

fn parse_fixed<const N: usize>(name: &str, s: &str) -> Result<[f64; N], Failure> {
    let v = parse_list(name, s)?;
    v.try_into().map_err(|v: Vec<f64>| Failure::config(format!("--{name} needs {N} values, got {}", v.len())))
}

/// Disk angle in the disk model, real abscissa in the half-plane, or `inf`.
pub fn parse_boundary(s: &str, model: Model) -> Result<BoundaryPoint, Failure> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity") {
        return Ok(BoundaryPoint::Infinity);
    }
    let v = parse_fixed::<1>("b", t)?[0];
    Ok(match model {
        Model::Disk => BoundaryPoint::disk(v),
        Model::Halfplane => BoundaryPoint::Real(v),
    })
}

fn boundary_json(b: BoundaryPoint) -> Value {
    let hp = match b.to_halfplane() {
        BoundaryPoint::Real(x) => json!(x),
        _ => json!("inf"),
    };
    json!({ "disk_angle": b.disk_angle(), "halfplane": hp })
}

fn to_disk_point(model: Model, x: f64, y: f64) -> hyperglass::Result<DiskPoint> {
    match model {
        Model::Disk => DiskPoint::new(x, y),
        Model::Halfplane => to_disk(HalfPlanePoint::new(x, y)?),
    }
}

fn parse_geodesic(text: &str) -> Result<(RayState, Geodesic), Failure> {
    let bad = || Failure::config(format!("--geodesic expects circle:X0,R or vertical:X0, got {text:?}"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    match kind {
        "circle" => {
            let [x0, r] = parse_fixed::<2>("geodesic", rest)?;
            positive("geodesic radius", r)?;
            Ok((RayState::new(x0, r, 1.0 / r, 0.0)?, Geodesic::HalfPlaneCircle { x0, radius: r }))
        }
        "vertical" => {
            let [x0] = parse_fixed::<1>("geodesic", rest)?;
            Ok((RayState::new(x0, 1.0, 0.0, 1.0)?, Geodesic::HalfPlaneVertical { x0 }))
        }
        _ => Err(bad()),
    }
}

pub fn trace(a: &TraceArgs) -> Result<Artifact, Failure> {
    positive("smax", a.smax)?;
    positive("tol", a.tol)?;
    let (start, locus) = match (&a.start, &a.geodesic) {
        (Some(s), _) => {
            let [x, y, px, py] = parse_fixed::<4>("start", s)?;
            let st = RayState::new(x, y, px, py)?;
            (st, st.normalized().geodesic())
        }
        (None, Some(g)) => parse_geodesic(g)?,
        (None, None) => return Err(Failure::config("one of --start or --geodesic is required")),
    };
    let verdict = is_physical_ray(&locus)?;
    let t = match a.samples {
        Some(0) => return Err(Failure::config("--samples must be at least 1")),
        Some(n) => trace_geodesic_sampled(start, a.smax, n, &TraceOptions { tol: a.tol, ..Default::default() })?,
        None => trace_geodesic(start, a.smax, a.tol)?,
    };
    let disk = a.model == Model::Disk;
    let mut header = vec!["s", "x", "y", "px", "py"];
    if disk {
        header.extend(["xi", "eta"]);
    }
    let mut data = Vec::with_capacity(t.samples.len());
    let mut rows = Vec::with_capacity(t.samples.len());
    let mut deviation = 0.0f64;
    for p in &t.samples {
        let z = HalfPlanePoint::new(p.x, p.y)?;
        deviation = deviation.max(locus.euclidean_deviation(z)?);
        let mut v = json!({ "s": p.s, "x": p.x, "y": p.y, "px": p.px, "py": p.py });
        let mut row: Vec<Cell> = vec![p.s.into(), p.x.into(), p.y.into(), p.px.into(), p.py.into()];
        if disk {
            let w = to_disk(z)?;
            v["xi"] = json!(w.xi);
            v["eta"] = json!(w.eta);
            row.extend([w.xi.into(), w.eta.into()]);
        }
        data.push(v);
        rows.push(row);
    }
    if !verdict.physical {
        eprintln!("note: ray is not physical ({:?})", verdict.reason.expect("non-physical rays carry a reason"));
    }
    Ok(Artifact {
        command: "trace",
        params: params(a),
        diagnostics: json!({
            "geodesic": locus,
            "physical": verdict.physical,
            "non_physical_reason": verdict.reason,
            "hamiltonian_drift": t.hamiltonian_drift,
            "px_drift": t.px_drift,
            "locus_deviation": deviation,
            "accepted_steps": t.accepted,
            "rejected_steps": t.rejected,
        }),
        data,
        header,
        rows,
    })
}

/// Node origin snapped onto the lattice `h Z` when `lo` sits on it, so that
/// symmetric boxes hit zero exactly.
fn snapped_origin(lo: f64, h: f64) -> f64 {
    let k = (lo / h).round();
    if (lo / h - k).abs() <= 1e-9 * k.abs().max(1.0) {
        k * h
    } else {
        lo
    }
}

fn node_count(name: &str, lo: f64, hi: f64, h: f64) -> Result<usize, Failure> {
    if !(hi >= lo) {
        return Err(Failure::config(format!("empty {name} range [{lo}, {hi}]")));
    }
    Ok(((hi - lo) / h + 1e-9).floor() as usize + 1)
}

pub fn field(a: &FieldArgs) -> Result<Artifact, Failure> {
    finite("lambda", a.lambda)?;
    finite("amplitude", a.amplitude)?;
    positive("h", a.h)?;
    let b = parse_boundary(&a.b, a.model)?;
    let (dx, dy) = match a.model {
        Model::Disk => ((-0.7, 0.7), (-0.7, 0.7)),
        Model::Halfplane => ((-2.0, 2.0), (0.1, 2.0)),
    };
    let (xmin, xmax) = (a.xmin.unwrap_or(dx.0), a.xmax.unwrap_or(dx.1));
    let (ymin, ymax) = (a.ymin.unwrap_or(dy.0), a.ymax.unwrap_or(dy.1));
    for (n, v) in [("xmin", xmin), ("xmax", xmax), ("ymin", ymin), ("ymax", ymax)] {
        finite(n, v)?;
    }
    let (nx, ny) = (node_count("x", xmin, xmax, a.h)?, node_count("y", ymin, ymax, a.h)?);
    let (x0, y0) = (snapped_origin(xmin, a.h), snapped_origin(ymin, a.h));
    let wave = WaveParams::spectral(a.lambda).with_amplitude(Complex64::new(a.amplitude, 0.0));
    let model = a.model;
    let samples = Grid::from_fn(x0, y0, a.h, nx, ny, |x, y| {
        to_disk_point(model, x, y).and_then(|zeta| field_sample(zeta, b, &wave))
    })?;
    let mut data = Vec::with_capacity(samples.data.len());
    let mut rows = Vec::with_capacity(samples.data.len());
    for (x, y, s) in samples.iter() {
        let s = s.as_ref().map_err(|e| Failure::from(e.clone()).context(format!("grid node ({x}, {y})")))?;
        data.push(json!({
            "x": x, "y": y, "value": [s.value.re, s.value.im], "amplitude": s.amplitude, "phase": s.phase,
        }));
        rows.push(vec![x.into(), y.into(), s.value.re.into(), s.value.im.into(), s.amplitude.into(), s.phase.into()]);
    }
    let values = samples.map(|s| s.as_ref().map_or(Complex64::default(), |s| s.value));
    let applied = match model {
        Model::Disk => laplace_beltrami_disk(&values)?,
        Model::Halfplane => laplace_beltrami_halfplane(&values)?,
    };
    let helmholtz = (applied.unmasked() > 0).then(|| eigen_residual(&values, &applied, wave.eigenvalue()));
    Ok(Artifact {
        command: "field",
        params: params(a),
        diagnostics: json!({
            "lambda": a.lambda,
            "b": boundary_json(b),
            "amplitude": a.amplitude,
            "nu": [wave.nu.re, wave.nu.im],
            "eigenvalue": [wave.eigenvalue().re, wave.eigenvalue().im],
            "clamp": DEFAULT_CLAMP,
            "nx": nx,
            "ny": ny,
            "helmholtz_residual": helmholtz,
        }),
        data,
        header: vec!["x", "y", "value_re", "value_im", "amplitude", "phase"],
        rows,
    })
}

struct Front {
    level: f64,
    horocycle: Horocycle,
    closed: bool,
    points: Vec<[f64; 2]>,
    kernel_mean: f64,
    kernel_spread: f64,
}

fn front(level: f64, b: BoundaryPoint, model: Model, n: usize) -> hyperglass::Result<Front> {
    // the horocycle meets the b-radius at |zeta| = tanh(level / 2)
    let zeta = DiskPoint::from_complex(b.unit() * (0.5 * level).tanh())?;
    let disk = horocycle_through(zeta, b)?;
    let horocycle = match model {
        Model::Disk => disk,
        Model::Halfplane => disk.to_halfplane()?,
    };
    let mut points = horocycle.sample(n);
    let kernels = points
        .iter()
        .map(|p| to_disk_point(model, p[0], p[1]).and_then(|z| poisson_kernel(z, b)))
        .collect::<hyperglass::Result<Vec<f64>>>()?;
    let mean = kernels.iter().sum::<f64>() / n as f64;
    let var = kernels.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / n as f64;
    let closed = !matches!(horocycle, Horocycle::HalfPlaneLine { .. });
    if closed {
        points.push(points[0]);
    }
    Ok(Front { level, horocycle, closed, points, kernel_mean: mean, kernel_spread: var.sqrt() / mean })
}

/// Relative spread of the Poisson kernel a front must stay within.
pub const FRONT_TOLERANCE: f64 = 1e-10;

pub fn fronts(a: &FrontsArgs) -> Result<Artifact, Failure> {
    let levels = parse_list("levels", &a.levels)?;
    if levels.is_empty() {
        return Err(Failure::config("--levels must list at least one phase level"));
    }
    if a.points < 3 {
        return Err(Failure::config("--points must be at least 3"));
    }
    let b = parse_boundary(&a.b, a.model)?;
    let fronts =
        levels.par_iter().map(|&t| front(t, b, a.model, a.points)).collect::<hyperglass::Result<Vec<Front>>>()?;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for f in &fronts {
        worst = worst.max(f.kernel_spread);
        data.push(json!({
            "level": f.level,
            "horocycle": f.horocycle,
            "closed": f.closed,
            "kernel_mean": f.kernel_mean,
            "kernel_spread": f.kernel_spread,
            "level_error": (f.kernel_mean.ln() - f.level).abs(),
            "points": f.points,
        }));
        for (k, p) in f.points.iter().enumerate() {
            rows.push(vec![f.level.into(), k.into(), p[0].into(), p[1].into()]);
        }
    }
    Ok(Artifact {
        command: "fronts",
        params: params(a),
        diagnostics: json!({
            "b": boundary_json(b),
            "max_kernel_spread": worst,
            "tolerance": FRONT_TOLERANCE,
            "validated": worst <= FRONT_TOLERANCE,
        }),
        data,
        header: vec!["level", "index", "x", "y"],
        rows,
    })
}

struct TableRow {
    kind: &'static str,
    lambda: Option<f64>,
    nu: Complex64,
    r: f64,
    value: Option<Complex64>,
    /// `|P_{-nu} - P_{nu-1}|`, with `P_{nu-1} = P_{-(1-nu)}`.
    symmetry: Option<f64>,
    nodes: Option<usize>,
    flag: Option<String>,
}

fn table_row(
    kind: &'static str,
    lambda: Option<f64>,
    nu: Complex64,
    r: f64,
    opts: &QuadratureOptions,
) -> hyperglass::Result<TableRow> {
    let mut row = TableRow { kind, lambda, nu, r, value: None, symmetry: None, nodes: None, flag: None };
    let main = conical_function_detailed(nu, r, opts);
    let partner = conical_function_detailed(Complex64::new(1.0, 0.0) - nu, r, opts);
    for q in [&main, &partner] {
        match q {
            Err(e @ Error::QuadratureNotConverged { .. }) => row.flag = row.flag.take().or(Some(e.to_string())),
            Err(e) => return Err(e.clone()),
            Ok(_) => {}
        }
    }
    if let Ok(m) = &main {
        row.value = Some(m.value);
        row.nodes = Some(m.nodes);
        if let Ok(p) = &partner {
            row.symmetry = Some((m.value - p.value).norm());
        }
    }
    Ok(row)
}

pub fn legendre(a: &LegendreArgs) -> Result<Outcome, Failure> {
    let lambdas = parse_list("lambdas", &a.lambdas)?;
    let nus = parse_list("nus", &a.nus)?;
    let rs = parse_list("rs", &a.rs)?;
    if let Some(r) = rs.iter().find(|r| **r < 0.0) {
        return Err(Failure::config(format!("--rs: radius {r} is negative")));
    }
    positive("quad-tol", a.quad_tol)?;
    if a.max_nodes < 16 {
        return Err(Failure::config("--max-nodes must be at least 16"));
    }
    let defaults = QuadratureOptions::default();
    let opts =
        QuadratureOptions { min_nodes: defaults.min_nodes.min(a.max_nodes), max_nodes: a.max_nodes, tol: a.quad_tol };
    let mut specs: Vec<(&'static str, Option<f64>, Complex64, f64)> = Vec::new();
    for &l in &lambdas {
        for &r in &rs {
            specs.push(("lambda", Some(l), Complex64::new(0.5, -l), r));
        }
    }
    for &n in &nus {
        for &r in &rs {
            specs.push(("nu", None, Complex64::new(n, 0.0), r));
        }
    }
    if specs.is_empty() {
        return Err(Failure::config("the table is empty; give --rs and --lambdas or --nus"));
    }
    let table = specs
        .par_iter()
        .map(|&(k, l, nu, r)| table_row(k, l, nu, r, &opts))
        .collect::<hyperglass::Result<Vec<TableRow>>>()?;
    let flagged = table.iter().filter(|t| t.flag.is_some()).count();
    let fold = |f: &dyn Fn(&TableRow) -> Option<f64>| table.iter().filter_map(f).fold(0.0f64, f64::max);
    let max_realness = fold(&|t| t.value.map(|v| v.im.abs()));
    let max_symmetry = fold(&|t| t.symmetry);
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for t in &table {
        let realness = t.value.map(|v| v.im.abs());
        data.push(json!({
            "kind": t.kind,
            "lambda": t.lambda,
            "nu": [t.nu.re, t.nu.im],
            "r": t.r,
            "value": t.value.map(|v| [v.re, v.im]),
            "realness": realness,
            "symmetry": t.symmetry,
            "nodes": t.nodes,
            "flagged": t.flag.is_some(),
            "flag": t.flag,
        }));
        rows.push(vec![
            t.kind.into(),
            t.lambda.into(),
            t.nu.re.into(),
            t.nu.im.into(),
            t.r.into(),
            t.value.map(|v| v.re).into(),
            t.value.map(|v| v.im).into(),
            realness.into(),
            t.symmetry.into(),
            t.nodes.map_or(Cell::Empty, Cell::from),
            (t.flag.is_some()).into(),
        ]);
    }
    let artifact = Artifact {
        command: "legendre",
        params: params(a),
        diagnostics: json!({
            "rows": table.len(),
            "flagged": flagged,
            "max_realness": max_realness,
            "max_symmetry": max_symmetry,
        }),
        data,
        header: vec![
            "kind", "lambda", "nu_re", "nu_im", "r", "value_re", "value_im", "realness", "symmetry", "nodes", "flagged",
        ],
        rows,
    };
    Ok(if flagged > 0 {
        Outcome {
            artifact,
            code: EXIT_LEGENDRE_FLAGGED,
            summary: Some(format!("{flagged} of {} rows did not converge", table.len())),
        }
    } else {
        Outcome::ok(artifact)
    })
}

/// Tolerance of the curvature spot-checks.
pub const CURVATURE_TOLERANCE: f64 = 1e-6;

fn soliton_residual_grid(p_min: f64, n: usize) -> hyperglass::Result<Grid<Option<f64>>> {
    let h = -p_min / (n - 1) as f64;
    let g = Grid::from_fn(p_min, 0.0, h, n, 3, |p, _| soliton(p))?;
    Ok(sine_gordon_residual(&g, SineGordonForm::Pq))
}

pub fn pseudosphere(a: &PseudosphereArgs) -> Result<Artifact, Failure> {
    finite("pmin", a.pmin)?;
    if a.pmin > 0.0 {
        return Err(Failure::config(format!("grid reaches p = {} > 0; the funnel chart needs p <= 0", a.pmin)));
    }
    positive("curvature-h", a.curvature_h)?;
    let mesh = funnel_mesh(a.pmin, a.np, a.nq)?;
    // the soliton does not depend on q, so one row of the (p, q) lattice carries the residual
    let residual = soliton_residual_grid(a.pmin, a.np)?;
    let mut data = Vec::with_capacity(mesh.vertices.len());
    let mut rows = Vec::with_capacity(mesh.vertices.len());
    for (k, (v, &[p, q])) in mesh.vertices.iter().zip(&mesh.params).enumerate() {
        let phi = soliton(p);
        let res = *residual.at(k % mesh.np, 1);
        data.push(json!({ "index": k, "p": p, "q": q, "x": v[0], "y": v[1], "z": v[2], "phi": phi, "residual": res }));
        rows.push(vec![k.into(), p.into(), q.into(), v[0].into(), v[1].into(), v[2].into(), phi.into(), res.into()]);
    }

    let mut steps = Vec::new();
    let mut maxima = Vec::new();
    for level in 0..3u32 {
        let n = (a.np - 1) * (1 << level) + 1;
        steps.push(-a.pmin / (n - 1) as f64);
        maxima.push(soliton_residual_grid(a.pmin, n)?.max_by(|r| r.abs()));
    }
    let orders = observed_orders(&maxima, 2.0);

    let mut spots = Vec::new();
    let mut worst = 0.0f64;
    let mut all_ok = true;
    for k in 0..5 {
        let p = a.pmin * (1.0 - (k as f64 + 0.5) / 5.0);
        let q = TAU * k as f64 / 5.0 + 0.3;
        match gaussian_curvature(ChartId::Pq, [p, q], a.curvature_h) {
            Ok(c) => {
                worst = worst.max((c + 1.0).abs());
                spots.push(json!({ "p": p, "q": q, "curvature": c }));
            }
            Err(e) => {
                all_ok = false;
                spots.push(json!({ "p": p, "q": q, "curvature": null, "error": e.to_string() }));
            }
        }
    }
    Ok(Artifact {
        command: "pseudosphere",
        params: params(a),
        diagnostics: json!({
            "mesh": { "np": mesh.np, "nq": mesh.nq, "vertices": mesh.vertices.len(), "faces": mesh.faces },
            "convergence": { "steps": steps, "max_residual": maxima, "orders": orders },
            "curvature": {
                "points": spots,
                "max_deviation": worst,
                "tolerance": CURVATURE_TOLERANCE,
                "passed": all_ok && worst <= CURVATURE_TOLERANCE,
            },
        }),
        data,
        header: vec!["index", "p", "q", "x", "y", "z", "phi", "residual"],
        rows,
    })
}

pub fn run_verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let suites = match &a.only {
        None => Suite::ALL.to_vec(),
        Some(list) => {
            let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if names.is_empty() {
                return Err(Failure::config("--only needs at least one suite"));
            }
            names
                .iter()
                .map(|n| Suite::parse(n).ok_or_else(|| Failure::config(format!("unknown suite {n:?}"))))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let report = verify::run(a.seed, &suites);
    let failed: Vec<String> =
        report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", c.suite.name(), c.name)).collect();
    let mut rows = Vec::new();
    for c in &report.checks {
        let base = |label: &str, v: f64, bound: f64, sense: &str| -> Vec<Cell> {
            vec![
                c.suite.name().into(),
                c.name.as_str().into(),
                c.passed.into(),
                label.into(),
                v.into(),
                bound.into(),
                sense.into(),
            ]
        };
        for m in &c.measures {
            rows.push(base(&m.label, m.value, m.tolerance, "max"));
        }
        for (k, o) in c.orders.iter().enumerate() {
            rows.push(base(&format!("observed order {}", k + 1), *o, c.min_order, "min"));
        }
    }
    let artifact = Artifact {
        command: "verify",
        params: params(a),
        diagnostics: json!({
            "seed": report.seed,
            "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "checks": report.checks.len(),
            "passed": report.passed,
            "failed": failed,
        }),
        data: report.checks.iter().map(|c| serde_json::to_value(c).expect("reports serialize")).collect(),
        header: vec!["suite", "check", "passed", "measure", "value", "bound", "sense"],
        rows,
    };
    Ok(if report.passed {
        Outcome::ok(artifact)
    } else {
        Outcome { artifact, code: EXIT_VERIFY_FAILED, summary: Some(format!("failed checks: {}", failed.join(", "))) }
    })
}

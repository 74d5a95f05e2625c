use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use wlab_core::alexandrov::{
    alexandrov_symmetry, alpha_table, moving_plane_scan, MeshSurface, ScanConfig, ScanPlane,
    SymmetryConfig,
};
use wlab_core::bounds::{min_positive_ends, min_positive_ends_sharp, balance_verdict};
use wlab_core::flux::{
    flux_at_parallel, flux_quadrature, mass_of_end, parallel_cap, parallel_loop_samples, EndSign,
    Parallel,
};
use wlab_core::mesh::{revolve, TriMesh};
use wlab_core::profile::{
    delaunay_family, detect_extrema, integrate_profile, ExtremaOutcome, ProfileState,
};
use wlab_core::relation::{RelationSpec, WeingartenRelation};
use wlab_core::report::{
    write_alpha_csv, write_extrema_csv, write_parity_csv, write_profile_csv, write_sweep_csv,
    FluxRecord, FluxReport, SweepRow,
};
use wlab_core::vec3;

use crate::config::RunConfig;
use crate::AppError;

fn ensure_out_dir(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| AppError::Config(format!("cannot create {}: {e}", dir.display())))
}

fn write_json_clean<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Numerical(format!("serialize {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| AppError::Config(format!("cannot write {}: {e}", path.display())))
}

fn build_relation(spec: &RelationSpec) -> Result<WeingartenRelation, AppError> {
    spec.build()
        .map_err(|e| AppError::Config(format!("invalid relation: {e}")))
}

/// Flux parameters (a, b) of the relation, required by most commands.
fn flux_params(relation: &WeingartenRelation) -> Result<(f64, f64), AppError> {
    relation
        .flux_parameters()
        .ok_or_else(|| AppError::Config("this command needs a linear or cmc relation".into()))
}

pub fn cmd_profile(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let relation = build_relation(&cfg.relation_spec())?;
    let (a, b) = flux_params(&relation)?;
    let p = &cfg.profile;
    if !(p.neck_r > 0.0 && p.neck_r <= a) {
        return Err(AppError::Config(format!(
            "neck_r must lie in (0, a] = (0, {a}]; got {}",
            p.neck_r
        )));
    }
    if p.periods <= 0.0 || p.tol <= 0.0 {
        return Err(AppError::Config("periods and tol must be positive".into()));
    }
    ensure_out_dir(out_dir)?;

    let prof = delaunay_family(&relation, p.neck_r, p.tol)
        .map_err(|e| AppError::Numerical(e.to_string()))?;
    let s_max = p.periods * prof.period;
    let curve = integrate_profile(
        ProfileState::new(0.0, p.neck_r, 0.0, 0.0),
        &relation,
        s_max,
        p.tol,
    )
    .map_err(|e| AppError::Numerical(e.to_string()))?;

    let file = File::create(out_dir.join("profile.csv")).map_err(AppError::io)?;
    write_profile_csv(BufWriter::new(file), &curve).map_err(AppError::numeric)?;

    let extrema = match detect_extrema(&curve).map_err(AppError::numeric)? {
        ExtremaOutcome::Found(e) => e,
        ExtremaOutcome::Degenerate { .. } => Vec::new(),
    };
    let file = File::create(out_dir.join("extrema.csv")).map_err(AppError::io)?;
    write_extrema_csv(BufWriter::new(file), &extrema).map_err(AppError::numeric)?;

    if p.n_theta > 0 {
        let mesh = revolve(&curve, (0.0, s_max), p.n_rings.max(2), p.n_theta)
            .map_err(AppError::numeric)?;
        mesh.write_obj(out_dir.join("profile.obj"))
            .map_err(AppError::numeric)?;
    }

    write_json_clean(
        &out_dir.join("profile.json"),
        &json!({
            "a": a,
            "b": b,
            "neck_r": prof.r_small,
            "R": prof.r_big,
            "period": prof.period,
            "I0": prof.i0,
            "mass": mass_of_end(&wlab_core::flux::EndSpec {
                sign: EndSign::Positive,
                r_big: prof.r_big,
                r_small: prof.r_small,
                b,
                h: 0.0,
            }),
            "radii_residual": (prof.r_big + prof.r_small - 2.0 * a).abs(),
        }),
    )
}

pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let relation = build_relation(&cfg.relation_spec())?;
    let (a, b) = flux_params(&relation)?;
    let s = &cfg.sweep;
    if s.neck_fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(AppError::Config(
            "sweep neck fractions must lie in (0, 1]".into(),
        ));
    }
    ensure_out_dir(out_dir)?;

    // Members are independent; gather deterministically by index.
    let rows: Result<Vec<SweepRow>, AppError> = s
        .neck_fractions
        .par_iter()
        .map(|&f| {
            delaunay_family(&relation, f * a, s.tol)
                .map(|prof| SweepRow::from_profile(&prof, a, b))
                .map_err(AppError::numeric)
        })
        .collect();
    let rows = rows?;

    let file = File::create(out_dir.join("family.csv")).map_err(AppError::io)?;
    write_sweep_csv(BufWriter::new(file), &rows).map_err(AppError::numeric)
}

pub fn cmd_flux(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let relation = build_relation(&cfg.relation_spec())?;
    let (a, b) = flux_params(&relation)?;
    let f = &cfg.flux;
    if !(f.neck_r > 0.0 && f.neck_r <= a) {
        return Err(AppError::Config(format!(
            "neck_r must lie in (0, a]; got {}",
            f.neck_r
        )));
    }
    if f.n_theta < 8 {
        return Err(AppError::Config("n_theta must be >= 8".into()));
    }
    ensure_out_dir(out_dir)?;

    let prof = delaunay_family(&relation, f.neck_r, f.tol).map_err(AppError::numeric)?;
    let mut stations: Vec<f64> = vec![0.0, 0.5 * prof.period];
    for k in 1..=f.n_parallels {
        stations.push(prof.period * k as f64 / (f.n_parallels + 1) as f64);
    }

    let mut records = Vec::with_capacity(stations.len());
    for s in stations {
        let st = prof.curve.state_at(s);
        let parallel = Parallel::from_state(&st, 1);
        let closed_form = flux_at_parallel(&parallel, a, b);
        let samples =
            parallel_loop_samples(&st, &relation, f.n_theta, 1).map_err(AppError::numeric)?;
        let cap = parallel_cap(&st, f.n_theta, 1);
        let quadrature = flux_quadrature(&samples, &cap, a, b).map_err(AppError::numeric)?;
        let rel_err = (quadrature - closed_form).abs() / closed_form.abs().max(1e-300);
        records.push(FluxRecord {
            parallel,
            closed_form,
            quadrature,
            rel_err,
        });
    }
    let report = FluxReport {
        a,
        b,
        records,
        mass: std::f64::consts::PI * (prof.r_big * prof.r_small + b),
    };
    write_json_clean(&out_dir.join("flux.json"), &report)
}

pub fn cmd_mass(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    if cfg.mass.ends.is_empty() {
        return Err(AppError::Config("mass: no ends in config".into()));
    }
    for e in &cfg.mass.ends {
        e.validate()
            .map_err(|e| AppError::Config(format!("bad end: {e}")))?;
    }
    ensure_out_dir(out_dir)?;
    let masses: Vec<f64> = cfg.mass.ends.iter().map(mass_of_end).collect();
    let balance = wlab_core::bounds::balance(&cfg.mass.ends);
    write_json_clean(
        &out_dir.join("mass.json"),
        &json!({
            "ends": cfg.mass.ends,
            "masses": masses,
            "balance": balance,
        }),
    )
}

pub fn cmd_alexandrov(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let al = &cfg.alexandrov;
    let relation = build_relation(&cfg.relation_spec())?;
    let mesh = match &al.mesh {
        Some(path) => TriMesh::read_obj(path)
            .map_err(|e| AppError::Config(format!("cannot read mesh: {e}")))?,
        None => {
            let (a, _) = flux_params(&relation)?;
            if !(al.neck_r > 0.0 && al.neck_r <= a) {
                return Err(AppError::Config(format!(
                    "neck_r must lie in (0, a]; got {}",
                    al.neck_r
                )));
            }
            let prof = delaunay_family(&relation, al.neck_r, 1e-11).map_err(AppError::numeric)?;
            revolve(&prof.curve, (0.0, prof.period), al.n_rings, al.n_theta)
                .and_then(|m| m.capped_all())
                .map_err(AppError::numeric)?
        }
    };
    if !mesh.is_closed() {
        return Err(AppError::Config(
            "alexandrov needs a closed mesh (open boundary found)".into(),
        ));
    }
    ensure_out_dir(out_dir)?;

    let bb = mesh.bbox();
    let plane = ScanPlane::new(
        [bb.center()[0] - al.plane_distance, bb.center()[1], 0.0],
        [1.0, 0.0, 0.0],
        0.0,
    );
    let surf = MeshSurface::new(mesh);
    let heights: Vec<f64> = (1..=al.n_heights)
        .map(|k| bb.min[2] + (bb.max[2] - bb.min[2]) * k as f64 / (al.n_heights + 1) as f64)
        .collect();
    let table = alpha_table(&surf, &plane, &heights, al.n_rays).map_err(AppError::numeric)?;
    let file = File::create(out_dir.join("alpha.csv")).map_err(AppError::io)?;
    write_alpha_csv(BufWriter::new(file), &table).map_err(AppError::numeric)?;

    let scan_cfg = ScanConfig {
        tol: al.scan_tol,
        ..ScanConfig::default()
    };
    let sym_cfg = SymmetryConfig {
        scan: scan_cfg,
        tol: al.symmetry_tol,
    };
    let mut scans = Vec::new();
    let mut symmetries = Vec::new();
    for dir in &al.directions {
        let nu = vec3::normalize(*dir);
        let out = moving_plane_scan(&surf.mesh, nu, &scan_cfg).map_err(AppError::numeric)?;
        scans.push(json!({ "direction": nu, "outcome": out }));
        let sym = alexandrov_symmetry(&surf.mesh, nu, &sym_cfg).map_err(AppError::numeric)?;
        symmetries.push(json!({ "direction": nu, "plane": sym }));
    }
    write_json_clean(
        &out_dir.join("scan.json"),
        &json!({ "scans": scans, "symmetries": symmetries }),
    )
}

pub fn cmd_bounds(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let bcfg = &cfg.bounds;
    if !bcfg.disk_radius.is_finite() || bcfg.disk_radius <= 0.0 {
        return Err(AppError::Config(format!(
            "disk_radius must be positive, got {}",
            bcfg.disk_radius
        )));
    }
    for e in &bcfg.ends {
        e.validate()
            .map_err(|e| AppError::Config(format!("bad end: {e}")))?;
    }
    ensure_out_dir(out_dir)?;
    let disk_area = std::f64::consts::PI * bcfg.disk_radius * bcfg.disk_radius;
    let report = balance_verdict(disk_area, &bcfg.ends).map_err(AppError::numeric)?;

    // End-count bound for the relation in the config, when linear.
    let end_bound = match cfg.relation_spec() {
        RelationSpec::Linear { a, b } => {
            let n = if bcfg.sharp {
                min_positive_ends_sharp(bcfg.disk_radius, a, b)
            } else {
                min_positive_ends(bcfg.disk_radius, a, b)
            };
            Some(n)
        }
        _ => None,
    };
    write_json_clean(
        &out_dir.join("bounds.json"),
        &json!({
            "report": report,
            "min_positive_ends_for_relation": end_bound,
            "sharp": bcfg.sharp,
        }),
    )
}

pub fn cmd_parity(cfg: &RunConfig, out_dir: &Path) -> Result<(), AppError> {
    let p = &cfg.parity;
    if p.trials == 0 {
        return Err(AppError::Config("parity: trials must be >= 1".into()));
    }
    if p.n_theta < 8 {
        return Err(AppError::Config("parity: n_theta must be >= 8".into()));
    }
    ensure_out_dir(out_dir)?;
    let seed = cfg.seed.unwrap_or(0);

    // Trials are independent; gather by index for reproducible logs.
    let trials: Result<Vec<_>, AppError> = (0..p.trials)
        .into_par_iter()
        .map(|i| {
            wlab_core::bounds::run_parity_trial(seed.wrapping_add(i as u64), p.n_theta)
                .map_err(AppError::numeric)
        })
        .collect();
    let trials = trials?;

    let file = File::create(out_dir.join("parity.csv")).map_err(AppError::io)?;
    write_parity_csv(BufWriter::new(file), &trials).map_err(AppError::numeric)?;

    let all_pass = trials.iter().all(|t| t.pass);
    let counts: std::collections::BTreeMap<usize, usize> =
        trials.iter().fold(Default::default(), |mut m, t| {
            *m.entry(t.nonzero_count).or_default() += 1;
            m
        });
    write_json_clean(
        &out_dir.join("parity.json"),
        &json!({
            "seed": seed,
            "trials": trials.len(),
            "all_pass": all_pass,
            "nonzero_count_histogram": counts,
        }),
    )
}

impl AppError {
    pub fn io(e: std::io::Error) -> Self {
        AppError::Config(e.to_string())
    }

    pub fn numeric(e: wlab_core::Error) -> Self {
        AppError::Numerical(e.to_string())
    }
}

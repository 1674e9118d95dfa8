//! One function per run type. Each computes a typed report and, through
//! [`execute`], writes it with its tables to the output directory.

use std::f64::consts::PI;
use std::fs::File;
use std::time::{Instant, SystemTime};

use kds_core::diagnostics::{
    convergence_runner, decay_fit, flat_pulse_observables, pi0, ConvergenceReport, DecayFit, Designation, Expectation,
    FitWindow, SliceNormal,
};
use kds_core::energy::{RedshiftComponent, RedshiftField, RedshiftProfile, VectorField};
use kds_core::solver::{
    energy_functional, forward_solve_dirichlet, horizon_damping, l2_norm, mean_value, q1_flux, sample_field,
    solve_with, Damping, Grid2D, SolveOptions, WaveOperator, WaveState,
};
use kds_core::spacetime::{find_horizons, Chart, KerrDeSitter};
use kds_core::spectral::{qnm, spectral_gap_scan, GapScanReport, QnmMode};
use kds_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{FieldOutput, RunType, ScenarioConfig, SCHEMA_VERSION};
use crate::error::{LabError, LabResult};
use crate::formats::{field_bytes, json_lines, json_pretty, read_columns, Cell, Table};
use crate::manifest::{sha256_hex, unix_seconds, Artifacts, Manifest, Versions};

/// What a successful run left behind.
#[derive(Debug)]
pub struct RunOutcome {
    pub artifacts: Artifacts,
    pub manifest: Manifest,
}

/// Runs `cfg` in a pool of `cfg.threads` workers and writes the artifacts
/// and manifest to the output directory. `config_text` is hashed into the
/// manifest. On a failed check the artifacts are still written before the
/// error is returned.
pub fn execute(cfg: &ScenarioConfig, config_text: &str) -> LabResult<RunOutcome> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| LabError::Check { stage: "thread pool", message: e.to_string() })?;
    let mut artifacts = Artifacts::default();
    let result = pool.install(|| produce(cfg, &mut artifacts));
    let dir = cfg.resolved_output_dir();
    let files = artifacts.write_to(&dir)?;
    let manifest = Manifest {
        run: cfg.run.name().to_string(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        threads: pool.current_num_threads(),
        versions: Versions::default(),
        status: match &result {
            Ok(()) => "ok".to_string(),
            Err(e) => e.to_string(),
        },
        started_unix_s: unix_seconds(started),
        wall_time_s: clock.elapsed().as_secs_f64(),
        files,
    };
    manifest.write(&dir)?;
    result.map(|()| RunOutcome { artifacts, manifest })
}

/// Computes the artifacts of `cfg` without touching the file system.
pub fn produce(cfg: &ScenarioConfig, out: &mut Artifacts) -> LabResult<()> {
    match cfg.run {
        RunType::Horizons => {
            let rec = horizons(cfg)?;
            out.add("horizons.jsonl", json_lines(&[rec]));
        }
        RunType::CertifyRedshift => {
            let rep = certify_redshift(cfg)?;
            out.add("certification.json", json_pretty(&rep));
            if let Some(why) = &rep.failure {
                return Err(LabError::Check { stage: "certify-redshift", message: why.clone() });
            }
        }
        RunType::Evolve => {
            let runs = evolve(cfg)?;
            for run in &runs {
                out.add(format!("timeseries_m{}.csv", run.m), run.table().to_csv());
                for (k, s) in run.fields.iter().enumerate() {
                    out.add(format!("field_m{}_{k:04}.bin", run.m), field_bytes(&run.grid, s));
                }
            }
            let summary: Vec<_> = runs.iter().map(|r| &r.summary).collect();
            out.add("evolve.json", json_pretty(&summary));
        }
        RunType::EvolveDirichlet => {
            let rep = evolve_dirichlet(cfg)?;
            for c in &rep.components {
                out.add(format!("dirichlet_{}.csv", c.summary.component), c.table().to_csv());
            }
            out.add("dirichlet.json", json_pretty(&rep.summary()));
        }
        RunType::Qnm => {
            let modes = qnm_table(cfg)?;
            out.add("modes.csv", mode_table(modes.iter().map(|m| (m.l.unwrap_or(0), m))).to_csv());
        }
        RunType::GapScan => {
            let rep = gap_scan(cfg)?;
            out.add("scan.jsonl", scan_records(&rep));
            out.add("roots.csv", mode_table(rep.roots.iter().map(|r| (r.l, r))).to_csv());
        }
        RunType::DecayFit => {
            let rep = decay_fit_file(cfg)?;
            out.add("fit.json", json_pretty(&rep));
        }
        RunType::Crosscheck => {
            let rep = crosscheck(cfg)?;
            out.add(format!("timeseries_m{}.csv", rep.run.m), rep.run.table().to_csv());
            out.add("report.json", json_pretty(&rep.report));
        }
        RunType::Convergence => {
            let rep = convergence(cfg)?;
            out.add("convergence.csv", convergence_table(&rep).to_csv());
            out.add("convergence.json", json_pretty(&ConvergenceSummary::from(&rep)));
            if !rep.pass() {
                let names = rep.failures().join(", ");
                return Err(LabError::Check {
                    stage: "convergence",
                    message: format!("observables off the expected order: {names}"),
                });
            }
        }
    }
    Ok(())
}

fn geometry(cfg: &ScenarioConfig) -> LabResult<KerrDeSitter> {
    KerrDeSitter::new(cfg.params).map_err(LabError::module("geometry"))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct HorizonRecord {
    pub r_minus: f64,
    pub r_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub alpha: f64,
}

pub fn horizons(cfg: &ScenarioConfig) -> LabResult<HorizonRecord> {
    let h = find_horizons(&cfg.params).map_err(LabError::module("horizons"))?;
    Ok(HorizonRecord {
        r_minus: h.r_minus,
        r_plus: h.r_plus,
        kappa_minus: h.kappa_minus,
        kappa_plus: h.kappa_plus,
        alpha: h.alpha,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SampleSummary {
    pub samples: usize,
    pub min_negativity: f64,
    pub min_norm: f64,
    pub min_dt: f64,
    pub min_dr: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CertificationSummary {
    pub a: f64,
    pub slope: f64,
    pub bend: f64,
    pub certified: bool,
    /// First violation, when certification failed.
    pub failure: Option<String>,
    pub grid: Option<SampleSummary>,
    pub random: Option<SampleSummary>,
    /// The same field with `∂_r X_t = 0`; it is expected to fail.
    pub control_failed: bool,
    pub control_failure: Option<String>,
}

fn sample_summary(r: &kds_core::energy::CertificationReport) -> SampleSummary {
    SampleSummary {
        samples: r.samples,
        min_negativity: r.min_negativity,
        min_norm: r.min_norm,
        min_dt: r.min_dt,
        min_dr: r.min_dr,
    }
}

/// `count` points of `M_δ ∖ K_{2δ}`, uniform in `r` within a randomly
/// chosen component and in `θ ∈ (0, π)`.
pub fn random_points(field: &RedshiftField, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = if rng.random::<bool>() { RedshiftComponent::Upper } else { RedshiftComponent::Lower };
            let (lo, hi) = field.range(c);
            let r = lo + (hi - lo) * rng.random::<f64>();
            // Keep off the axis, where the metric is never evaluated.
            (r, rng.random_range(1e-9..PI - 1e-9))
        })
        .collect()
}

pub fn certify_redshift(cfg: &ScenarioConfig) -> LabResult<CertificationSummary> {
    let kds = geometry(cfg)?;
    let d = cfg.params.delta;
    let profile = RedshiftProfile { slope: cfg.certify.slope / d, bend: cfg.certify.bend / d };
    let field = RedshiftField::new(&kds, profile).map_err(LabError::module("certify-redshift"))?;
    let certify_random = |f: &RedshiftField, points: &[(f64, f64)]| {
        let parts: Vec<_> = points.par_chunks(256).map(|chunk| f.certify_at(&kds, chunk)).collect();
        parts.into_iter().try_fold(None::<kds_core::energy::CertificationReport>, |acc, p| {
            let p = p?;
            Ok::<_, kds_core::Error>(Some(match acc {
                None => p,
                Some(a) => kds_core::energy::CertificationReport {
                    samples: a.samples + p.samples,
                    min_negativity: a.min_negativity.min(p.min_negativity),
                    min_norm: a.min_norm.min(p.min_norm),
                    min_dt: a.min_dt.min(p.min_dt),
                    min_dr: a.min_dr.min(p.min_dr),
                },
            }))
        })
    };
    let points = random_points(&field, cfg.certify.random, cfg.seed);
    let full = |f: &RedshiftField| -> kds_core::Result<(SampleSummary, Option<SampleSummary>)> {
        let (grid, random) =
            rayon::join(|| f.certify(&kds, cfg.certify.n_r, cfg.certify.n_theta), || certify_random(f, &points));
        Ok((sample_summary(&grid?), random?.as_ref().map(sample_summary)))
    };
    let control = RedshiftField::new(&kds, RedshiftProfile { slope: 0.0, ..profile })
        .map_err(LabError::module("certify-redshift"))?;
    let control_failure = full(&control).err().map(|e| e.to_string());
    let (certified, failure, grid, random) = match full(&field) {
        Ok((g, r)) => (true, None, Some(g), r),
        Err(e) => (false, Some(e.to_string()), None, None),
    };
    Ok(CertificationSummary {
        a: cfg.params.a,
        slope: profile.slope,
        bend: profile.bend,
        certified,
        failure,
        grid,
        random,
        control_failed: control_failure.is_some(),
        control_failure,
    })
}

/// Nearest node index on an axis.
fn nearest_node(axis: &kds_core::solver::Axis, x: f64) -> usize {
    (0..axis.n).min_by(|&a, &b| (axis.node(a) - x).abs().total_cmp(&(axis.node(b) - x).abs())).unwrap_or(0)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FitSummary {
    pub rate: f64,
    pub amplitude: f64,
    pub window: (f64, f64),
    pub log_residual: f64,
    pub points: usize,
    pub envelope: bool,
    pub periods: Option<f64>,
    pub good: bool,
}

impl From<&DecayFit> for FitSummary {
    fn from(f: &DecayFit) -> Self {
        Self {
            rate: f.rate,
            amplitude: f.amplitude,
            window: f.window,
            log_residual: f.log_residual,
            points: f.points,
            envelope: f.envelope,
            periods: f.periods,
            good: f.good,
        }
    }
}

/// Fit result or the reason there is none.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum FitOutcome {
    Fit(FitSummary),
    Failed { error: String },
}

impl FitOutcome {
    fn of(r: kds_core::Result<DecayFit>) -> Self {
        match r {
            Ok(f) => FitOutcome::Fit(FitSummary::from(&f)),
            Err(e) => FitOutcome::Failed { error: e.to_string() },
        }
    }

    pub fn fit(&self) -> Option<&FitSummary> {
        match self {
            FitOutcome::Fit(f) => Some(f),
            FitOutcome::Failed { .. } => None,
        }
    }
}

fn fit_window(cfg: &ScenarioConfig) -> FitWindow {
    let base = FitWindow::after_source(&cfg.params, cfg.source.t.1, cfg.t_end);
    FitWindow {
        start: cfg.fit.start.unwrap_or(base.start),
        end: cfg.fit.end.unwrap_or(base.end),
        discard: cfg.fit.discard,
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvolveSummary {
    pub m: i32,
    pub n_r: usize,
    pub n_theta: usize,
    pub probe_r: f64,
    pub probe_theta: f64,
    pub snapshots: usize,
    /// `Π₀f` of the source (zero unless `m = 0`).
    pub pi0: (f64, f64),
    /// Mean of `u` over the final slice.
    pub final_mean: (f64, f64),
    pub final_l2: f64,
    pub peak_l2: f64,
    /// Fit of `Re u` at the probe node.
    pub probe_fit: FitOutcome,
}

/// A single mode's forward solution, reduced to time series.
#[derive(Debug, Clone)]
pub struct ModeRun {
    pub m: i32,
    pub grid: Grid2D,
    pub rows: Vec<[f64; 9]>,
    pub fields: Vec<WaveState>,
    pub summary: EvolveSummary,
}

const SERIES: [&str; 9] =
    ["time", "u_probe_re", "u_probe_im", "l2", "energy", "mean_re", "mean_im", "flux_lower", "flux_upper"];

impl ModeRun {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&SERIES);
        for r in &self.rows {
            t.push(r.iter().map(|&v| Cell::Float(v)).collect());
        }
        t
    }

    pub fn series(&self, column: usize) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r[0], r[column])).collect()
    }
}

/// Forward solution of one mode on the extended domain. Energies and fluxes
/// use the slice normal `∇τ`; fluxes count outward through each end.
pub fn evolve_mode(cfg: &ScenarioConfig, kds: &KerrDeSitter, m: i32) -> LabResult<ModeRun> {
    let p = &cfg.params;
    let grid = Grid2D::extended(p, cfg.n_r, cfg.n_theta).map_err(LabError::module("grid"))?;
    let spec = cfg.source.spec(m).map_err(LabError::module("source"))?;
    let x = if cfg.damping > 0.0 {
        Some(
            kds_core::energy::redshift_field(kds)
                .map_err(LabError::module("red-shift field"))?
                .in_chart(Chart::ShiftedKerrStar),
        )
    } else {
        None
    };
    let psi = horizon_damping(p, cfg.damping);
    let damping = x.as_ref().map(|x| Damping { psi: &psi, field: x as &dyn VectorField });
    let op = WaveOperator::new(kds, &grid, m, cfg.cfl, damping).map_err(LabError::module("operator"))?;
    let opts = SolveOptions { t_start: 0.0, t_end: cfg.t_end, cadence: cfg.cadence, cfl: cfg.cfl };
    let snaps = solve_with(&op, &spec, &opts).map_err(LabError::module("evolve"))?;
    let normal = sample_field(&grid, &SliceNormal { metric: kds });
    let (pi, pj) = (nearest_node(&grid.q1, cfg.probe.0), nearest_node(&grid.q2, cfg.probe.1));
    let last_row = grid.q1.n - 1;
    let rows: Vec<[f64; 9]> = snaps
        .par_iter()
        .map(|s| {
            let u = s.at(pi, pj);
            let mean = mean_value(&op, s, None);
            [
                s.time,
                u.re,
                u.im,
                l2_norm(&op, s, None),
                energy_functional(&op, s, &normal, None),
                mean.re,
                mean.im,
                -q1_flux(&op, s, &normal, 0),
                q1_flux(&op, s, &normal, last_row),
            ]
        })
        .collect();
    let last = snaps.last().ok_or(LabError::Check { stage: "evolve", message: "no snapshots".to_string() })?;
    let pi0v = pi0(p, &spec);
    let final_mean = mean_value(&op, last, None);
    let probe: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let summary = EvolveSummary {
        m,
        n_r: grid.q1.n,
        n_theta: grid.q2.n,
        probe_r: grid.q1.node(pi),
        probe_theta: grid.q2.node(pj),
        snapshots: snaps.len(),
        pi0: (pi0v.re, pi0v.im),
        final_mean: (final_mean.re, final_mean.im),
        final_l2: rows.last().map_or(0.0, |r| r[3]),
        peak_l2: rows.iter().map(|r| r[3]).fold(0.0, f64::max),
        probe_fit: FitOutcome::of(decay_fit(&probe, 0.0, fit_window(cfg))),
    };
    let fields = match cfg.write_fields {
        FieldOutput::None => Vec::new(),
        FieldOutput::Final => vec![last.clone()],
        FieldOutput::All => snaps,
    };
    Ok(ModeRun { m, grid, rows, fields, summary })
}

/// Every configured mode, evolved in parallel.
pub fn evolve(cfg: &ScenarioConfig) -> LabResult<Vec<ModeRun>> {
    let kds = geometry(cfg)?;
    cfg.modes.par_iter().map(|&m| evolve_mode(cfg, &kds, m)).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ComponentSummary {
    pub component: &'static str,
    pub active: bool,
    pub r_range: (f64, f64),
    /// Fit of the red-shift energy of the slice.
    pub energy_fit: FitOutcome,
    /// Smallest flux of the red-shift current into `K_{2δ}` over all
    /// snapshots.
    pub min_core_flux: f64,
    pub core_flux_nonnegative: bool,
}

#[derive(Debug, Clone)]
pub struct DirichletComponent {
    pub rows: Vec<[f64; 5]>,
    pub summary: ComponentSummary,
}

impl DirichletComponent {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["time", "energy", "core_flux", "outer_flux", "l2"]);
        for r in &self.rows {
            t.push(r.iter().map(|&v| Cell::Float(v)).collect());
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct DirichletReport {
    pub components: Vec<DirichletComponent>,
}

impl DirichletReport {
    pub fn summary(&self) -> Vec<&ComponentSummary> {
        self.components.iter().map(|c| &c.summary).collect()
    }

    pub fn active(&self) -> Option<&DirichletComponent> {
        self.components.iter().find(|c| c.summary.active)
    }
}

/// The near-horizon Dirichlet problem. Energies and fluxes use the
/// red-shift field.
pub fn evolve_dirichlet(cfg: &ScenarioConfig) -> LabResult<DirichletReport> {
    let kds = geometry(cfg)?;
    let p = &cfg.params;
    let m = cfg.modes[0];
    let spec = cfg.source.spec(m).map_err(LabError::module("source"))?;
    let opts = SolveOptions { t_start: 0.0, t_end: cfg.t_end, cadence: cfg.cadence, cfl: cfg.cfl };
    let out = forward_solve_dirichlet(&kds, cfg.n_r, cfg.n_theta, &spec, &opts)
        .map_err(LabError::module("evolve-dirichlet"))?;
    let x = kds_core::energy::redshift_field(&kds)
        .map_err(LabError::module("red-shift field"))?
        .in_chart(Chart::ShiftedKerrStar);
    let window = FitWindow {
        start: cfg.fit.start.unwrap_or(cfg.source.t.1),
        end: cfg.fit.end.unwrap_or(cfg.t_end),
        discard: cfg.fit.discard,
    };
    let components = out
        .par_iter()
        .map(|(c, snaps)| {
            let grid = Grid2D::dirichlet_component(p, *c, cfg.n_r, cfg.n_theta).map_err(LabError::module("grid"))?;
            let op = WaveOperator::new(&kds, &grid, m, cfg.cfl, None).map_err(LabError::module("operator"))?;
            let xs = sample_field(&grid, &x);
            let last = grid.q1.n - 1;
            // ∂K_{2δ} is the upper end of the lower component and the lower
            // end of the upper one; "into K_{2δ}" is +r and −r respectively.
            let (core, outer, core_sign) = match c {
                RedshiftComponent::Lower => (last, 0, 1.0),
                RedshiftComponent::Upper => (0, last, -1.0),
            };
            let rows: Vec<[f64; 5]> = snaps
                .iter()
                .map(|s| {
                    [
                        s.time,
                        energy_functional(&op, s, &xs, None),
                        core_sign * q1_flux(&op, s, &xs, core),
                        -core_sign * q1_flux(&op, s, &xs, outer),
                        l2_norm(&op, s, None),
                    ]
                })
                .collect();
            let active = !snaps.iter().all(WaveState::is_zero);
            let energy: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
            let min_core_flux = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
            let summary = ComponentSummary {
                component: match c {
                    RedshiftComponent::Lower => "lower",
                    RedshiftComponent::Upper => "upper",
                },
                active,
                r_range: (grid.q1.start, grid.q1.end()),
                energy_fit: if active {
                    FitOutcome::of(decay_fit(&energy, 0.0, window))
                } else {
                    FitOutcome::Failed { error: "component carries no field".to_string() }
                },
                min_core_flux,
                core_flux_nonnegative: min_core_flux >= 0.0,
            };
            Ok(DirichletComponent { rows, summary })
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(DirichletReport { components })
}

/// Guess for the fundamental of degree `l`, scaled from the `l = 1` guess
/// by the eikonal growth `Re ω ∝ l + ½`.
pub fn guess_for(cfg: &ScenarioConfig, l: usize) -> C64 {
    if l == 0 {
        return C64::new(0.0, 0.0);
    }
    C64::new(cfg.qnm_guess.re * (l as f64 + 0.5) / 1.5, cfg.qnm_guess.im)
}

/// The fundamental for every `(l, m)` with `l` in `qnm_l` and `m` in
/// `modes`, `|m| ≤ l`, in that order.
pub fn qnm_table(cfg: &ScenarioConfig) -> LabResult<Vec<QnmMode>> {
    let tasks: Vec<(usize, i32)> = cfg
        .qnm_l
        .iter()
        .flat_map(|&l| cfg.modes.iter().filter(move |m| m.unsigned_abs() as usize <= l).map(move |&m| (l, m)))
        .collect();
    if tasks.is_empty() {
        return Err(LabError::Config(crate::error::ConfigError::key("qnm_l", "no (l, m) pair with |m| <= l")));
    }
    tasks.par_iter().map(|&(l, m)| qnm(&cfg.params, l, m, guess_for(cfg, l)).map_err(LabError::module("qnm"))).collect()
}

/// Rows of the mode table: anything with a frequency and separation
/// constant.
pub trait ModeRow {
    fn m(&self) -> i32;
    fn omega(&self) -> C64;
    fn lambda(&self) -> C64;
    fn residual(&self) -> f64;
}

impl ModeRow for QnmMode {
    fn m(&self) -> i32 {
        self.m
    }
    fn omega(&self) -> C64 {
        self.omega
    }
    fn lambda(&self) -> C64 {
        self.lambda
    }
    fn residual(&self) -> f64 {
        self.residual
    }
}

impl ModeRow for kds_core::spectral::ScanRoot {
    fn m(&self) -> i32 {
        self.m
    }
    fn omega(&self) -> C64 {
        self.omega
    }
    fn lambda(&self) -> C64 {
        self.lambda
    }
    fn residual(&self) -> f64 {
        self.residual
    }
}

pub fn mode_table<'a, R: ModeRow + 'a>(rows: impl Iterator<Item = (usize, &'a R)>) -> Table {
    let mut t = Table::new(&["m", "l", "re_omega", "im_omega", "lambda_re", "lambda_im", "residual"]);
    for (l, r) in rows {
        let (w, lam) = (r.omega(), r.lambda());
        t.push(vec![
            Cell::Int(r.m() as i64),
            Cell::Int(l as i64),
            w.re.into(),
            w.im.into(),
            lam.re.into(),
            lam.im.into(),
            r.residual().into(),
        ]);
    }
    t
}

pub fn gap_scan(cfg: &ScenarioConfig) -> LabResult<GapScanReport> {
    spectral_gap_scan(&cfg.params, &cfg.scan).map_err(LabError::module("gap-scan"))
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum ScanRecord {
    Cell { l: usize, m: i32, re: (f64, f64), im: (f64, f64), count: usize },
    Root { l: usize, m: i32, re: f64, im: f64, lambda_re: f64, lambda_im: f64, residual: f64 },
    Summary { roots: usize, counted: usize, zero_mode: bool, nu_empirical: Option<f64>, certifies_half_gap: bool },
}

pub fn scan_records(rep: &GapScanReport) -> Vec<u8> {
    let mut recs: Vec<ScanRecord> =
        rep.cells.iter().map(|c| ScanRecord::Cell { l: c.l, m: c.m, re: c.re, im: c.im, count: c.count }).collect();
    recs.extend(rep.roots.iter().map(|r| ScanRecord::Root {
        l: r.l,
        m: r.m,
        re: r.omega.re,
        im: r.omega.im,
        lambda_re: r.lambda.re,
        lambda_im: r.lambda.im,
        residual: r.residual,
    }));
    let nu = rep.gap();
    recs.push(ScanRecord::Summary {
        roots: rep.roots.len(),
        counted: rep.cells.iter().map(|c| c.count).sum(),
        zero_mode: rep.zero_mode(),
        nu_empirical: nu,
        certifies_half_gap: rep.certifies(nu.unwrap_or(0.0)),
    });
    json_lines(&recs)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FileFit {
    pub input: String,
    pub column: String,
    pub offset: f64,
    pub fit: FitSummary,
}

pub fn decay_fit_file(cfg: &ScenarioConfig) -> LabResult<FileFit> {
    let path =
        cfg.fit.input.as_ref().ok_or_else(|| crate::error::ConfigError::key("fit_input", "required for decay-fit"))?;
    let file = File::open(path).map_err(LabError::io(path))?;
    let series = read_columns(file, &cfg.fit.time_column, &cfg.fit.value_column)
        .map_err(|e| crate::error::ConfigError::key("fit_input", &e))?;
    let window = FitWindow {
        start: cfg.fit.start.unwrap_or(f64::NEG_INFINITY),
        end: cfg.fit.end.unwrap_or(f64::INFINITY),
        discard: cfg.fit.discard,
    };
    let fit = decay_fit(&series, cfg.fit.offset, window).map_err(LabError::module("decay-fit"))?;
    Ok(FileFit {
        input: path.display().to_string(),
        column: cfg.fit.value_column.clone(),
        offset: cfg.fit.offset,
        fit: FitSummary::from(&fit),
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CrosscheckSummary {
    pub l: u32,
    pub m: i32,
    pub a: f64,
    pub nu_fit: Option<f64>,
    pub minus_im_omega: f64,
    pub relative_difference: Option<f64>,
    pub omega: (f64, f64),
    pub qnm_residual: f64,
    pub fit: FitOutcome,
    pub pi0: (f64, f64),
    pub final_mean: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Crosscheck {
    pub run: ModeRun,
    pub report: CrosscheckSummary,
}

/// The envelope decay rate of the probe signal against `−Im ω` of the
/// fundamental with the source's `(l, m)`. The evolution and the
/// resonance search run concurrently.
pub fn crosscheck(cfg: &ScenarioConfig) -> LabResult<Crosscheck> {
    let kds = geometry(cfg)?;
    let m = cfg.modes[0];
    let l = cfg.source.l;
    let (run, mode) = rayon::join(
        || evolve_mode(cfg, &kds, m),
        || qnm(&cfg.params, l as usize, m, guess_for(cfg, l as usize)).map_err(LabError::module("qnm")),
    );
    let (run, mode) = (run?, mode?);
    let nu_fit = run.summary.probe_fit.fit().map(|f| f.rate);
    let minus_im_omega = mode.decay_rate();
    let report = CrosscheckSummary {
        l,
        m,
        a: cfg.params.a,
        nu_fit,
        minus_im_omega,
        relative_difference: nu_fit.map(|nu| (nu - minus_im_omega).abs() / minus_im_omega),
        omega: (mode.omega.re, mode.omega.im),
        qnm_residual: mode.residual,
        fit: run.summary.probe_fit.clone(),
        pi0: run.summary.pi0,
        final_mean: run.summary.final_mean,
    };
    Ok(Crosscheck { run, report })
}

/// Self-convergence of the flat Gaussian-pulse benchmark; the resolutions
/// run in parallel.
pub fn convergence(cfg: &ScenarioConfig) -> LabResult<ConvergenceReport> {
    let runs = cfg
        .resolutions
        .par_iter()
        .map(|&n| flat_pulse_observables(n).map(|o| (n, o)))
        .collect::<kds_core::Result<Vec<_>>>()
        .map_err(LabError::module("convergence"))?;
    let expect = Expectation::Order { order: cfg.convergence_order, tol: cfg.convergence_tol };
    let designations = [Designation::new("u_center", expect), Designation::new("l2", expect)];
    convergence_runner(&cfg.resolutions, &designations, |n| {
        Ok(runs.iter().find(|(k, _)| *k == n).map(|(_, o)| o.clone()).unwrap_or_default())
    })
    .map_err(LabError::module("convergence"))
}

fn convergence_table(rep: &ConvergenceReport) -> Table {
    let mut header = vec!["resolution"];
    header.extend(rep.observables.iter().map(|o| o.name.as_str()));
    let mut t = Table::new(&header);
    for (k, &n) in rep.resolutions.iter().enumerate() {
        let mut row = vec![Cell::Int(n as i64)];
        row.extend(rep.observables.iter().map(|o| Cell::Float(o.values[k])));
        t.push(row);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
struct ObservableSummary {
    name: String,
    values: Vec<f64>,
    measured_orders: Vec<f64>,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ConvergenceSummary {
    resolutions: Vec<usize>,
    pass: bool,
    observables: Vec<ObservableSummary>,
}

impl From<&ConvergenceReport> for ConvergenceSummary {
    fn from(r: &ConvergenceReport) -> Self {
        Self {
            resolutions: r.resolutions.clone(),
            pass: r.pass(),
            observables: r
                .observables
                .iter()
                .map(|o| ObservableSummary {
                    name: o.name.clone(),
                    values: o.values.clone(),
                    measured_orders: o.measured.clone(),
                    pass: o.pass,
                })
                .collect(),
        }
    }
}

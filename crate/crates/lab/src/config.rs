//! Flat `key = value` scenario files.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Every file must declare `schema_version = 1`. Unknown keys, duplicate
//! keys and malformed values are errors that name the key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kds_core::solver::{AngularProfile, SourceSpec, Support, DEFAULT_CFL, MIN_NODES};
use kds_core::spacetime::BlackHoleParams;
use kds_core::spectral::GapScanConfig;
use kds_core::C64;

use crate::error::ConfigError;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "KDS_OUTPUT_DIR";

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("schema_version", "configuration schema version (must be 1)"),
    ("run", "run type; must match the subcommand when given"),
    ("M0", "black-hole mass"),
    ("Lambda", "cosmological constant"),
    ("a", "rotation parameter"),
    ("delta", "horizon extension width (default 0.04 (r_+ - r_-))"),
    ("epsilon", "transition collar width (default 0.1 (r_+ - r_-))"),
    ("n_r", "radial nodes"),
    ("n_theta", "polar nodes"),
    ("cfl", "CFL factor"),
    ("t_end", "final time"),
    ("cadence", "snapshot spacing"),
    ("modes", "comma-separated azimuthal modes m"),
    ("source_l", "Legendre degree of the source"),
    ("source_amplitude", "real amplitude of the source"),
    ("source_t0", "source switch-on time"),
    ("source_t1", "source switch-off time"),
    ("source_r0", "inner edge of the radial window (default: core centre - 0.6)"),
    ("source_r1", "outer edge of the radial window (default: core centre + 0.6)"),
    ("source_support", "inside-k-delta or general"),
    ("damping", "strength of the horizon damping psi X (0 disables it)"),
    ("probe_r", "radius of the probe node (default: core centre)"),
    ("probe_theta", "polar angle of the probe node"),
    ("write_fields", "binary field output: none, final or all"),
    ("qnm_l", "comma-separated angular labels l for the qnm run"),
    ("qnm_guess_re", "Re omega of the initial guess for l = 1"),
    ("qnm_guess_im", "Im omega of the initial guess"),
    ("scan_re_min", "gap-scan box: smallest Re omega"),
    ("scan_re_max", "gap-scan box: largest Re omega"),
    ("scan_im_min", "gap-scan box: smallest Im omega"),
    ("scan_im_max", "gap-scan box: largest Im omega"),
    ("scan_l_max", "gap-scan: largest l"),
    ("scan_m_max", "gap-scan: largest |m|"),
    ("scan_max_depth", "gap-scan: bisection depth limit"),
    ("scan_angular_basis", "gap-scan: Galerkin size for a != 0"),
    ("fit_input", "decay-fit: CSV file with a header row"),
    ("fit_time_column", "decay-fit: name of the time column"),
    ("fit_value_column", "decay-fit: name of the value column"),
    ("fit_offset", "decay-fit: constant c in |y - c|"),
    ("fit_start", "start of the fit window (default: two light crossings after the source)"),
    ("fit_end", "end of the fit window (default: t_end)"),
    ("fit_discard", "leading fraction of the window to discard"),
    ("certify_n_r", "certify-redshift: radial samples per component"),
    ("certify_n_theta", "certify-redshift: polar samples"),
    ("certify_random", "certify-redshift: extra random sample points"),
    ("redshift_slope", "slope of X_t in units of 1/delta"),
    ("redshift_bend", "slope of X_r in units of 1/delta"),
    ("resolutions", "convergence: comma-separated box resolutions"),
    ("convergence_order", "convergence: expected order"),
    ("convergence_tol", "convergence: tolerance on the order"),
    ("output_dir", "directory for artifacts"),
    ("seed", "seed for randomized sampling"),
    ("threads", "worker threads (0: one per core)"),
];

/// The run types, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunType {
    Horizons,
    CertifyRedshift,
    Evolve,
    EvolveDirichlet,
    Qnm,
    GapScan,
    DecayFit,
    Crosscheck,
    Convergence,
}

impl RunType {
    pub const ALL: [RunType; 9] = [
        RunType::Horizons,
        RunType::CertifyRedshift,
        RunType::Evolve,
        RunType::EvolveDirichlet,
        RunType::Qnm,
        RunType::GapScan,
        RunType::DecayFit,
        RunType::Crosscheck,
        RunType::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RunType::Horizons => "horizons",
            RunType::CertifyRedshift => "certify-redshift",
            RunType::Evolve => "evolve",
            RunType::EvolveDirichlet => "evolve-dirichlet",
            RunType::Qnm => "qnm",
            RunType::GapScan => "gap-scan",
            RunType::DecayFit => "decay-fit",
            RunType::Crosscheck => "crosscheck",
            RunType::Convergence => "convergence",
        }
    }
}

impl fmt::Display for RunType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        RunType::ALL.into_iter().find(|r| r.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOutput {
    None,
    Final,
    All,
}

/// A parsed file: key to `(value, line)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::syntax(line_no, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::syntax(line_no, "missing key before `=`"));
            }
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return Err(ConfigError::key(key, "unknown key").at(line_no));
            }
            if value.is_empty() {
                return Err(ConfigError::key(key, "missing value").at(line_no));
            }
            if entries.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(ConfigError::key(key, "duplicate key").at(line_no));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn parsed<T: FromStr>(&self, key: &'static str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::key(key, &format!("expected {what}, found `{v}`")).at(*line)),
        }
    }

    fn f64_or(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        let v = self.parsed::<f64>(key, "a number")?.unwrap_or(default);
        if !v.is_finite() {
            return Err(ConfigError::key(key, "must be finite"));
        }
        Ok(v)
    }

    fn opt_f64(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        match self.parsed::<f64>(key, "a number")? {
            Some(v) if !v.is_finite() => Err(ConfigError::key(key, "must be finite")),
            v => Ok(v),
        }
    }

    fn usize_or(&self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parsed::<usize>(key, "a non-negative integer")?.unwrap_or(default))
    }

    fn list<T: FromStr + Clone>(&self, key: &'static str, default: &[T]) -> Result<Vec<T>, ConfigError> {
        let Some((v, line)) = self.entries.get(key) else {
            return Ok(default.to_vec());
        };
        v.split(',')
            .map(|s| s.trim().parse::<T>())
            .collect::<Result<Vec<T>, _>>()
            .map_err(|_| ConfigError::key(key, &format!("expected a comma-separated list, found `{v}`")).at(*line))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub l: u32,
    pub amplitude: f64,
    pub t: (f64, f64),
    pub r: (f64, f64),
    pub support: Support,
}

impl SourceConfig {
    pub fn spec(&self, m: i32) -> kds_core::Result<SourceSpec> {
        SourceSpec::new(
            m,
            C64::new(self.amplitude, 0.0),
            self.t,
            self.r,
            AngularProfile::Legendre { l: self.l },
            self.support,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub input: Option<PathBuf>,
    pub time_column: String,
    pub value_column: String,
    pub offset: f64,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub discard: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub random: usize,
    /// Profile slopes in units of `1/δ`.
    pub slope: f64,
    pub bend: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub run: RunType,
    pub params: BlackHoleParams,
    pub n_r: usize,
    pub n_theta: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub cadence: f64,
    pub modes: Vec<i32>,
    pub source: SourceConfig,
    pub damping: f64,
    /// `(r, θ)` of the node whose time series is recorded.
    pub probe: (f64, f64),
    pub write_fields: FieldOutput,
    pub qnm_l: Vec<usize>,
    pub qnm_guess: C64,
    pub scan: GapScanConfig,
    pub fit: FitConfig,
    pub certify: CertifyConfig,
    pub resolutions: Vec<usize>,
    pub convergence_order: f64,
    pub convergence_tol: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

impl ScenarioConfig {
    /// Parses and validates a configuration for `run`. Relative paths are
    /// resolved against `base`.
    pub fn from_text(text: &str, run: RunType, base: &Path) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;
        Self::from_raw(&raw, run, base)
    }

    pub fn from_raw(raw: &RawConfig, run: RunType, base: &Path) -> Result<Self, ConfigError> {
        match raw.parsed::<u32>("schema_version", "an integer")? {
            None => return Err(ConfigError::key("schema_version", "missing; this program reads schema_version = 1")),
            Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(ConfigError::key("schema_version", &format!("unsupported version {v}"))),
        }
        if let Some(r) = raw.get("run") {
            match r.parse::<RunType>() {
                Ok(t) if t == run => {}
                Ok(t) => return Err(ConfigError::key("run", &format!("file is for `{t}`, not `{run}`"))),
                Err(()) => return Err(ConfigError::key("run", &format!("unknown run type `{r}`"))),
            }
        }

        let m0 = raw.f64_or("M0", 1.0)?;
        let lambda = raw.f64_or("Lambda", 0.06)?;
        let a = raw.f64_or("a", 0.0)?;
        let (delta, epsilon) = (raw.opt_f64("delta")?, raw.opt_f64("epsilon")?);
        let params = BlackHoleParams::with_widths(m0, lambda, a, delta, epsilon).map_err(|e| match e {
            kds_core::Error::InvalidParameter { name, reason } => ConfigError::key(name, reason),
            other => ConfigError::key(if a != 0.0 { "a" } else { "Lambda" }, &other.to_string()),
        })?;

        let n_r = raw.usize_or("n_r", 61)?;
        let n_theta = raw.usize_or("n_theta", 16)?;
        if n_r < MIN_NODES {
            return Err(ConfigError::key("n_r", &format!("need at least {MIN_NODES} radial nodes")));
        }
        if n_theta < MIN_NODES {
            return Err(ConfigError::key("n_theta", &format!("need at least {MIN_NODES} polar nodes")));
        }
        let cfl = raw.f64_or("cfl", DEFAULT_CFL)?;
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(ConfigError::key("cfl", "must lie in (0, 1]"));
        }
        let t_end = raw.f64_or("t_end", 150.0)?;
        let cadence = raw.f64_or("cadence", 0.25)?;
        if !(cadence > 0.0) {
            return Err(ConfigError::key("cadence", "must be positive"));
        }

        let mid = 0.5 * (params.r_minus() + params.r_plus());
        let support = match raw.get("source_support").unwrap_or("inside-k-delta") {
            "inside-k-delta" => Support::InsideKDelta,
            "general" => Support::General,
            other => {
                return Err(ConfigError::key(
                    "source_support",
                    &format!("expected inside-k-delta or general, found `{other}`"),
                ))
            }
        };
        let source = SourceConfig {
            l: raw.parsed::<u32>("source_l", "a non-negative integer")?.unwrap_or(1),
            amplitude: raw.f64_or("source_amplitude", 1.0)?,
            t: (raw.f64_or("source_t0", 0.0)?, raw.f64_or("source_t1", 4.0)?),
            r: (raw.f64_or("source_r0", mid - 0.6)?, raw.f64_or("source_r1", mid + 0.6)?),
            support,
        };
        if !(source.t.1 > source.t.0) {
            return Err(ConfigError::key("source_t1", "must exceed source_t0"));
        }
        if source.t.0 < 0.0 {
            return Err(ConfigError::key("source_t0", "the run starts at t = 0; the source must vanish before it"));
        }
        if !(source.r.1 > source.r.0) {
            return Err(ConfigError::key("source_r1", "must exceed source_r0"));
        }
        let modes = raw.list::<i32>("modes", &[0])?;
        if modes.is_empty() {
            return Err(ConfigError::key("modes", "need at least one mode"));
        }
        if let Some(m) = modes.iter().find(|m| m.unsigned_abs() > source.l) {
            return Err(ConfigError::key("source_l", &format!("must be at least |m| = {} for every mode", m.abs())));
        }
        for &m in &modes {
            let spec = source.spec(m).map_err(|e| ConfigError::key("source_r0", &e.to_string()))?;
            spec.validate(&params).map_err(|_| {
                ConfigError::key("source_support", "radial window is declared inside K_delta but leaves it")
            })?;
        }

        let damping = raw.f64_or("damping", 0.0)?;
        if damping < 0.0 {
            return Err(ConfigError::key("damping", "must be non-negative"));
        }
        let probe = (raw.f64_or("probe_r", mid)?, raw.f64_or("probe_theta", 0.9)?);
        let write_fields = match raw.get("write_fields").unwrap_or("none") {
            "none" => FieldOutput::None,
            "final" => FieldOutput::Final,
            "all" => FieldOutput::All,
            other => {
                return Err(ConfigError::key("write_fields", &format!("expected none, final or all, found `{other}`")))
            }
        };

        let qnm_l = raw.list::<usize>("qnm_l", &[1])?;
        if qnm_l.is_empty() {
            return Err(ConfigError::key("qnm_l", "need at least one l"));
        }
        let qnm_guess = C64::new(raw.f64_or("qnm_guess_re", 0.19)?, raw.f64_or("qnm_guess_im", -0.07)?);

        let d = GapScanConfig::default();
        let scan = GapScanConfig {
            re: (raw.f64_or("scan_re_min", d.re.0)?, raw.f64_or("scan_re_max", d.re.1)?),
            im: (raw.f64_or("scan_im_min", d.im.0)?, raw.f64_or("scan_im_max", d.im.1)?),
            l_max: raw.usize_or("scan_l_max", d.l_max)?,
            m_max: raw.parsed::<u32>("scan_m_max", "a non-negative integer")?.unwrap_or(d.m_max),
            angular_basis: raw.usize_or("scan_angular_basis", d.angular_basis)?,
            max_depth: raw.usize_or("scan_max_depth", d.max_depth)?,
        };
        if !(scan.re.1 > scan.re.0) {
            return Err(ConfigError::key("scan_re_max", "must exceed scan_re_min"));
        }
        if !(scan.im.1 > scan.im.0) {
            return Err(ConfigError::key("scan_im_max", "must exceed scan_im_min"));
        }

        let input = raw.get("fit_input").map(|p| base.join(p));
        if run == RunType::DecayFit {
            match &input {
                None => return Err(ConfigError::key("fit_input", "required for decay-fit")),
                Some(p) if !p.is_file() => {
                    return Err(ConfigError::key("fit_input", &format!("file `{}` does not exist", p.display())))
                }
                _ => {}
            }
        }
        let fit = FitConfig {
            input,
            time_column: raw.get("fit_time_column").unwrap_or("time").to_string(),
            value_column: raw.get("fit_value_column").unwrap_or("u_probe_re").to_string(),
            offset: raw.f64_or("fit_offset", 0.0)?,
            start: raw.opt_f64("fit_start")?,
            end: raw.opt_f64("fit_end")?,
            discard: raw.f64_or("fit_discard", 0.5)?,
        };
        if !(0.0..0.95).contains(&fit.discard) {
            return Err(ConfigError::key("fit_discard", "must lie in [0, 0.95)"));
        }

        let certify = CertifyConfig {
            n_r: raw.usize_or("certify_n_r", kds_core::energy::CERT_SAMPLES_R)?,
            n_theta: raw.usize_or("certify_n_theta", kds_core::energy::CERT_SAMPLES_THETA)?,
            random: raw.usize_or("certify_random", 0)?,
            slope: raw.f64_or("redshift_slope", kds_core::energy::RedshiftProfile::DEFAULT_SLOPE_DELTAS)?,
            bend: raw.f64_or("redshift_bend", kds_core::energy::RedshiftProfile::DEFAULT_BEND_DELTAS)?,
        };
        if certify.n_r < 2 || certify.n_theta < 1 {
            return Err(ConfigError::key("certify_n_r", "need at least 2 radial and 1 polar sample"));
        }

        let resolutions = raw.list::<usize>("resolutions", &[64, 128, 256])?;
        if resolutions.len() < 3 {
            return Err(ConfigError::key("resolutions", "need at least three resolutions"));
        }
        if resolutions.iter().any(|n| n % 2 != 0 || *n < MIN_NODES) || resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::key(
                "resolutions",
                &format!("must be increasing even integers of at least {MIN_NODES}"),
            ));
        }

        let output_dir = base.join(raw.get("output_dir").map_or_else(|| format!("out/{run}"), str::to_string));
        let cfg = Self {
            run,
            params,
            n_r,
            n_theta,
            cfl,
            t_end,
            cadence,
            modes,
            source,
            damping,
            probe,
            write_fields,
            qnm_l,
            qnm_guess,
            scan,
            fit,
            certify,
            resolutions,
            convergence_order: raw.f64_or("convergence_order", 2.0)?,
            convergence_tol: raw.f64_or("convergence_tol", 0.3)?,
            output_dir,
            seed: raw.parsed::<u64>("seed", "a non-negative integer")?.unwrap_or(0),
            threads: raw.usize_or("threads", 0)?,
        };
        if matches!(run, RunType::Evolve | RunType::Crosscheck) && !(cfg.t_end > cfg.source.t.1) {
            return Err(ConfigError::key("t_end", "must exceed source_t1"));
        }
        let p = &cfg.params;
        if run == RunType::EvolveDirichlet {
            let d = p.delta;
            let inside = |lo: f64, hi: f64| cfg.source.r.0 >= lo && cfg.source.r.1 <= hi;
            if !inside(p.r_minus() - d, p.r_minus() + 2.0 * d) && !inside(p.r_plus() - 2.0 * d, p.r_plus() + d) {
                return Err(ConfigError::key(
                    "source_r0",
                    "radial window must lie in one component of M_delta minus K_2delta",
                ));
            }
        }
        if !(cfg.probe.0 >= p.r_minus() - p.delta && cfg.probe.0 <= p.r_plus() + p.delta) {
            return Err(ConfigError::key("probe_r", "must lie in [r_- - delta, r_+ + delta]"));
        }
        if !(cfg.probe.1 > 0.0 && cfg.probe.1 < std::f64::consts::PI) {
            return Err(ConfigError::key("probe_theta", "must lie in (0, pi)"));
        }
        Ok(cfg)
    }

    /// `output_dir`, unless the environment overrides it.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| self.output_dir.clone(), PathBuf::from)
    }
}

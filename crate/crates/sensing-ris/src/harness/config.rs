//! Experiment selection, scenario knobs, and the flat key-value config
//! format. Every knob has a default, so an empty file is a valid config once
//! the experiment id is known; unknown keys are rejected rather than ignored.

use super::HarnessError;
use crate::numerics::QuadratureSpec;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// The five built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    CrlbMap,
    MseVsK,
    MseVsGamma,
    SpectralEfficiency,
    ExpansionError,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::CrlbMap,
        ExperimentId::MseVsK,
        ExperimentId::MseVsGamma,
        ExperimentId::SpectralEfficiency,
        ExperimentId::ExpansionError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::CrlbMap => "crlb-map",
            ExperimentId::MseVsK => "mse-vs-k",
            ExperimentId::MseVsGamma => "mse-vs-gamma",
            ExperimentId::SpectralEfficiency => "spectral-efficiency",
            ExperimentId::ExpansionError => "expansion-error",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown experiment `{s}` (expected one of crlb-map, mse-vs-k, \
                     mse-vs-gamma, spectral-efficiency, expansion-error)"
                ))
            })
    }
}

/// Physical and numerical knobs shared by the experiments. Estimation
/// experiments use the sensing block; spectral-efficiency uses the geometry
/// and link-budget block; the quadrature block feeds every CRLB evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Samples per phase sweep.
    pub l: usize,
    /// Sensor amplification A.
    pub amplification: f64,
    /// Sensing noise variance for the estimation experiments (watts).
    pub sigma_v2: f64,
    /// Dead-zone noise standard deviation.
    pub sigma_zeta: f64,
    /// Mean interference-to-noise ratio for the contrast sweep.
    pub gamma_bar: f64,
    /// Interferential contrast for the gamma sweep.
    pub k: f64,
    /// Newton / VM-EM iteration budget.
    pub estimator_iters: usize,
    /// Phase-grid size used to average the CRLB columns over the uniform
    /// phase prior.
    pub phi_points: usize,
    /// Second axis of the CRLB map, in dB.
    pub gamma_grid_db: Vec<f64>,
    /// Tabulation step of the expansion-error curve on [0, 5].
    pub expansion_step: f64,
    pub ris_rows: usize,
    pub ris_cols: usize,
    pub bs_rows: usize,
    pub bs_cols: usize,
    /// Rician factor of both links.
    pub kappa: f64,
    pub carrier_hz: f64,
    /// User receiver bandwidth (sets sigma_z^2).
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    /// Power-sensor noise figure in dB.
    pub noise_figure_db: f64,
    /// User transmit power budget (watts).
    pub p_user: f64,
    /// LS pilot slots; `None` means one per RIS element.
    pub pilot_count: Option<usize>,
    /// Pilot transmit boost over `p_user` for the LS baseline, in dB.
    pub ls_pilot_boost_db: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub quad_trunc: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let quad = QuadratureSpec::default();
        Self {
            l: 64,
            amplification: 1.0,
            sigma_v2: 0.1,
            sigma_zeta: 0.05,
            gamma_bar: 20.0,
            k: 0.6,
            estimator_iters: 4,
            phi_points: 8,
            gamma_grid_db: (0..=20).map(|i| 2.0 * i as f64).collect(),
            expansion_step: 1e-3,
            ris_rows: 8,
            ris_cols: 4,
            bs_rows: 2,
            bs_cols: 2,
            kappa: 2.0,
            carrier_hz: 10e9,
            bandwidth_hz: 180e3,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 10.0,
            p_user: 0.3,
            pilot_count: None,
            ls_pilot_boost_db: 10.0,
            quad_abs_tol: quad.abs_tol,
            quad_rel_tol: quad.rel_tol,
            quad_trunc: quad.trunc_threshold,
        }
    }
}

impl Scenario {
    pub fn n_ris(&self) -> usize {
        self.ris_rows * self.ris_cols
    }

    pub fn n_bs(&self) -> usize {
        self.bs_rows * self.bs_cols
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.quad_abs_tol,
            rel_tol: self.quad_rel_tol,
            trunc_threshold: self.quad_trunc,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.l < 3 {
            return bad("l must be >= 3");
        }
        if !(self.amplification > 0.0 && self.amplification.is_finite()) {
            return bad("amplification must be positive and finite");
        }
        if !(self.sigma_v2 > 0.0 && self.sigma_v2.is_finite()) {
            return bad("sigma_v2 must be positive and finite");
        }
        if !(self.sigma_zeta >= 0.0 && self.sigma_zeta.is_finite()) {
            return bad("sigma_zeta must be >= 0");
        }
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return bad("gamma_bar must be positive and finite");
        }
        if !(self.k.abs() <= 1.0) {
            return bad("k must satisfy |k| <= 1");
        }
        if self.estimator_iters == 0 {
            return bad("estimator_iters must be >= 1");
        }
        if self.phi_points == 0 {
            return bad("phi_points must be >= 1");
        }
        check_grid(&self.gamma_grid_db, "gamma_grid_db")?;
        if !(self.expansion_step > 0.0 && self.expansion_step <= 5.0) {
            return bad("expansion_step must lie in (0, 5]");
        }
        if self.ris_rows == 0 || self.ris_cols == 0 || self.bs_rows == 0 || self.bs_cols == 0 {
            return bad("array dimensions must be >= 1");
        }
        if !(self.kappa >= 0.0) {
            return bad("kappa must be >= 0");
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return bad("carrier_hz must be positive and finite");
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return bad("bandwidth_hz must be positive and finite");
        }
        if !self.noise_density_dbm_hz.is_finite() {
            return bad("noise_density_dbm_hz must be finite");
        }
        if !self.noise_figure_db.is_finite() {
            return bad("noise_figure_db must be finite");
        }
        if !(self.p_user > 0.0 && self.p_user.is_finite()) {
            return bad("p_user must be positive and finite");
        }
        if let Some(p) = self.pilot_count {
            if p == 0 || p > self.n_ris() {
                return bad("pilot_count must satisfy 1 <= P <= N");
            }
        }
        if !self.ls_pilot_boost_db.is_finite() {
            return bad("ls_pilot_boost_db must be finite");
        }
        self.quadrature()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }
}

fn check_grid(grid: &[f64], name: &str) -> Result<(), HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config(format!("{name} must be nonempty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(HarnessError::Config(format!("{name} must be finite")));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(HarnessError::Config(format!("{name} must be sorted ascending")));
    }
    Ok(())
}

/// Fully resolved run description: experiment, seed, trial count, sweep grid
/// and scenario. `echo()` serializes it back into the config format so a
/// result file can reproduce its own run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub trials: usize,
    /// Sweep grid: K values, gamma_bar in dB, P_max in dBm, or expansion
    /// abscissas, depending on the experiment.
    pub grid: Vec<f64>,
    pub scenario: Scenario,
    /// Whether `grid` was given explicitly (the expansion curve's default
    /// 5001-point grid is regenerated from `expansion_step` instead of
    /// being echoed).
    grid_is_explicit: bool,
}

impl ExperimentConfig {
    /// All-defaults config for one experiment.
    pub fn new(experiment: ExperimentId) -> Self {
        let scenario = Scenario::default();
        let grid = default_grid(experiment, &scenario);
        Self {
            experiment,
            seed: 0,
            trials: default_trials(experiment),
            grid,
            scenario,
            grid_is_explicit: experiment != ExperimentId::ExpansionError,
        }
    }

    /// Parse the flat key-value text. The experiment id may come from the
    /// text, the caller (CLI positional), or both, in which case they must
    /// agree.
    pub fn parse(text: &str, cli_experiment: Option<ExperimentId>) -> Result<Self, HarnessError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| HarnessError::Config(format!("config syntax: {e}")))?;
        let from_file = match table.get("experiment") {
            Some(v) => Some(str_value(v, "experiment")?.parse::<ExperimentId>()?),
            None => None,
        };
        let experiment = match (from_file, cli_experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(HarnessError::Config(format!(
                    "config declares experiment `{a}` but `{b}` was requested"
                )));
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(HarnessError::Config(
                    "no experiment id given (set `experiment = ...` or pass it on the command line)"
                        .to_string(),
                ));
            }
        };
        let mut cfg = ExperimentConfig::new(experiment);
        let mut grid_given = false;
        for (key, value) in &table {
            match key.as_str() {
                "experiment" => {}
                "seed" => cfg.seed = seed_value(value)?,
                "trials" => cfg.trials = uint_value(value, "trials")?,
                "grid" => {
                    cfg.grid = list_value(value, "grid")?;
                    grid_given = true;
                }
                "l" => cfg.scenario.l = uint_value(value, "l")?,
                "amplification" => cfg.scenario.amplification = num_value(value, key)?,
                "sigma_v2" => cfg.scenario.sigma_v2 = num_value(value, key)?,
                "sigma_zeta" => cfg.scenario.sigma_zeta = num_value(value, key)?,
                "gamma_bar" => cfg.scenario.gamma_bar = num_value(value, key)?,
                "k" => cfg.scenario.k = num_value(value, key)?,
                "estimator_iters" => cfg.scenario.estimator_iters = uint_value(value, key)?,
                "phi_points" => cfg.scenario.phi_points = uint_value(value, key)?,
                "gamma_grid_db" => cfg.scenario.gamma_grid_db = list_value(value, key)?,
                "expansion_step" => cfg.scenario.expansion_step = num_value(value, key)?,
                "ris_rows" => cfg.scenario.ris_rows = uint_value(value, key)?,
                "ris_cols" => cfg.scenario.ris_cols = uint_value(value, key)?,
                "bs_rows" => cfg.scenario.bs_rows = uint_value(value, key)?,
                "bs_cols" => cfg.scenario.bs_cols = uint_value(value, key)?,
                "kappa" => cfg.scenario.kappa = num_value(value, key)?,
                "carrier_hz" => cfg.scenario.carrier_hz = num_value(value, key)?,
                "bandwidth_hz" => cfg.scenario.bandwidth_hz = num_value(value, key)?,
                "noise_density_dbm_hz" => {
                    cfg.scenario.noise_density_dbm_hz = num_value(value, key)?
                }
                "noise_figure_db" => cfg.scenario.noise_figure_db = num_value(value, key)?,
                "p_user" => cfg.scenario.p_user = num_value(value, key)?,
                "pilot_count" => cfg.scenario.pilot_count = Some(uint_value(value, key)?),
                "ls_pilot_boost_db" => cfg.scenario.ls_pilot_boost_db = num_value(value, key)?,
                "quad_abs_tol" => cfg.scenario.quad_abs_tol = num_value(value, key)?,
                "quad_rel_tol" => cfg.scenario.quad_rel_tol = num_value(value, key)?,
                "quad_trunc" => cfg.scenario.quad_trunc = num_value(value, key)?,
                other => {
                    return Err(HarnessError::Config(format!("unknown config key `{other}`")));
                }
            }
        }
        if grid_given {
            cfg.grid_is_explicit = true;
        } else {
            // defaults that depend on overridden scenario knobs
            cfg.grid = default_grid(experiment, &cfg.scenario);
            cfg.grid_is_explicit = experiment != ExperimentId::ExpansionError;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(
        path: &Path,
        cli_experiment: Option<ExperimentId>,
    ) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text, cli_experiment)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be >= 1".to_string()));
        }
        check_grid(&self.grid, "grid")?;
        match self.experiment {
            ExperimentId::MseVsK | ExperimentId::CrlbMap => {
                if self.grid.iter().any(|k| k.abs() > 1.0) {
                    return Err(HarnessError::Config(
                        "grid of K values must satisfy |K| <= 1".to_string(),
                    ));
                }
            }
            ExperimentId::ExpansionError => {
                if self.grid.iter().any(|&x| x < 0.0) {
                    return Err(HarnessError::Config(
                        "expansion abscissas must be >= 0".to_string(),
                    ));
                }
            }
            ExperimentId::MseVsGamma | ExperimentId::SpectralEfficiency => {}
        }
        self.scenario.validate()
    }

    /// Config-format text that reproduces this run. Scalars are always
    /// written; the grid is written unless it is the regenerated default
    /// expansion tabulation.
    pub fn echo(&self) -> String {
        let sc = &self.scenario;
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("experiment = \"{}\"", self.experiment));
        // quoted so the full u64 range survives TOML's i64 integers
        line(format!("seed = \"{}\"", self.seed));
        line(format!("trials = {}", self.trials));
        if self.grid_is_explicit {
            line(format!("grid = {}", format_list(&self.grid)));
        }
        line(format!("l = {}", sc.l));
        line(format!("amplification = {}", sc.amplification));
        line(format!("sigma_v2 = {}", sc.sigma_v2));
        line(format!("sigma_zeta = {}", sc.sigma_zeta));
        line(format!("gamma_bar = {}", sc.gamma_bar));
        line(format!("k = {}", sc.k));
        line(format!("estimator_iters = {}", sc.estimator_iters));
        line(format!("phi_points = {}", sc.phi_points));
        line(format!("gamma_grid_db = {}", format_list(&sc.gamma_grid_db)));
        line(format!("expansion_step = {}", sc.expansion_step));
        line(format!("ris_rows = {}", sc.ris_rows));
        line(format!("ris_cols = {}", sc.ris_cols));
        line(format!("bs_rows = {}", sc.bs_rows));
        line(format!("bs_cols = {}", sc.bs_cols));
        line(format!("kappa = {}", format_float(sc.kappa)));
        line(format!("carrier_hz = {}", sc.carrier_hz));
        line(format!("bandwidth_hz = {}", sc.bandwidth_hz));
        line(format!("noise_density_dbm_hz = {}", sc.noise_density_dbm_hz));
        line(format!("noise_figure_db = {}", sc.noise_figure_db));
        line(format!("p_user = {}", sc.p_user));
        if let Some(p) = sc.pilot_count {
            line(format!("pilot_count = {p}"));
        }
        line(format!("ls_pilot_boost_db = {}", sc.ls_pilot_boost_db));
        line(format!("quad_abs_tol = {}", sc.quad_abs_tol));
        line(format!("quad_rel_tol = {}", sc.quad_rel_tol));
        line(format!("quad_trunc = {}", sc.quad_trunc));
        out
    }
}

fn default_trials(experiment: ExperimentId) -> usize {
    match experiment {
        ExperimentId::MseVsK | ExperimentId::MseVsGamma => 10_000,
        ExperimentId::SpectralEfficiency => 500,
        ExperimentId::CrlbMap | ExperimentId::ExpansionError => 1,
    }
}

fn default_grid(experiment: ExperimentId, scenario: &Scenario) -> Vec<f64> {
    match experiment {
        ExperimentId::MseVsK => (1..=9).map(|i| i as f64 / 10.0).collect(),
        ExperimentId::MseVsGamma => vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
        ExperimentId::CrlbMap => (0..=20).map(|i| i as f64 * 0.05).collect(),
        ExperimentId::SpectralEfficiency => vec![36.0, 40.0, 44.0, 48.0, 52.0, 56.0],
        ExperimentId::ExpansionError => {
            let steps = (5.0 / scenario.expansion_step).floor() as usize;
            let mut grid: Vec<f64> = (0..=steps)
                .map(|i| i as f64 * scenario.expansion_step)
                .collect();
            if *grid.last().unwrap() < 5.0 {
                grid.push(5.0);
            }
            grid
        }
    }
}

/// TOML requires `inf` unquoted for floats but `{}` already prints that.
fn format_float(x: f64) -> String {
    format!("{x}")
}

fn format_list(xs: &[f64]) -> String {
    let cells: Vec<String> = xs.iter().map(|x| format_float(*x)).collect();
    format!("[{}]", cells.join(", "))
}

fn num_value(v: &toml::Value, key: &str) -> Result<f64, HarnessError> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(HarnessError::Config(format!("`{key}` must be a number"))),
    }
}

fn uint_value(v: &toml::Value, key: &str) -> Result<usize, HarnessError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(HarnessError::Config(format!(
            "`{key}` must be a nonnegative integer"
        ))),
    }
}

fn seed_value(v: &toml::Value) -> Result<u64, HarnessError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        toml::Value::String(s) => s
            .parse::<u64>()
            .map_err(|_| HarnessError::Config("`seed` must be a u64".to_string())),
        _ => Err(HarnessError::Config("`seed` must be a u64".to_string())),
    }
}

fn str_value<'a>(v: &'a toml::Value, key: &str) -> Result<&'a str, HarnessError> {
    v.as_str()
        .ok_or_else(|| HarnessError::Config(format!("`{key}` must be a string")))
}

fn list_value(v: &toml::Value, key: &str) -> Result<Vec<f64>, HarnessError> {
    let arr = v
        .as_array()
        .ok_or_else(|| HarnessError::Config(format!("`{key}` must be an array of numbers")))?;
    arr.iter().map(|x| num_value(x, key)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_for_every_experiment() {
        for id in ExperimentId::ALL {
            let cfg = ExperimentConfig::new(id);
            cfg.validate().unwrap();
            assert!(!cfg.grid.is_empty());
        }
    }

    #[test]
    fn expansion_default_grid_spans_zero_to_five() {
        let cfg = ExperimentConfig::new(ExperimentId::ExpansionError);
        assert_eq!(cfg.grid.len(), 5001);
        assert_eq!(cfg.grid[0], 0.0);
        assert_eq!(*cfg.grid.last().unwrap(), 5.0);
    }

    #[test]
    fn parse_applies_overrides() {
        let text = "experiment = \"mse-vs-k\"\nseed = 42\ntrials = 100\n\
                    grid = [0.5, 0.9]\ngamma_bar = 10\nsigma_zeta = 0\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.experiment, ExperimentId::MseVsK);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.grid, vec![0.5, 0.9]);
        assert_eq!(cfg.scenario.gamma_bar, 10.0);
        assert_eq!(cfg.scenario.sigma_zeta, 0.0);
        assert_eq!(cfg.scenario.l, 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::parse("sigma = 1.0", Some(ExperimentId::MseVsK)).unwrap_err();
        assert!(err.to_string().contains("unknown config key"));
    }

    #[test]
    fn experiment_id_conflicts_are_rejected() {
        let text = "experiment = \"mse-vs-k\"";
        assert!(ExperimentConfig::parse(text, Some(ExperimentId::CrlbMap)).is_err());
        assert!(ExperimentConfig::parse("", None).is_err());
        assert!(ExperimentConfig::parse("", Some(ExperimentId::CrlbMap)).is_ok());
    }

    #[test]
    fn bad_values_are_rejected() {
        let id = Some(ExperimentId::MseVsK);
        assert!(ExperimentConfig::parse("trials = 0", id).is_err());
        assert!(ExperimentConfig::parse("grid = []", id).is_err());
        assert!(ExperimentConfig::parse("grid = [0.9, 0.1]", id).is_err());
        assert!(ExperimentConfig::parse("grid = [0.5, 1.5]", id).is_err());
        assert!(ExperimentConfig::parse("l = 2", id).is_err());
        assert!(ExperimentConfig::parse("sigma_v2 = 0", id).is_err());
        assert!(ExperimentConfig::parse("seed = -1", id).is_err());
        assert!(ExperimentConfig::parse("seed = \"x\"", id).is_err());
        assert!(ExperimentConfig::parse("pilot_count = 0", id).is_err());
        assert!(ExperimentConfig::parse("pilot_count = 33", id).is_err());
        assert!(ExperimentConfig::parse("quad_abs_tol = -1", id).is_err());
        assert!(ExperimentConfig::parse("not toml at all", id).is_err());
    }

    #[test]
    fn echo_round_trips() {
        for id in ExperimentId::ALL {
            let cfg = ExperimentConfig::new(id);
            let back = ExperimentConfig::parse(&cfg.echo(), None).unwrap();
            assert_eq!(back, cfg, "echo round-trip for {id}");
        }
        // overrides survive the round trip too
        let text = "experiment = \"spectral-efficiency\"\nseed = \"18446744073709551615\"\n\
                    trials = 7\nris_rows = 4\nris_cols = 2\npilot_count = 5\nkappa = inf\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.seed, u64::MAX);
        assert_eq!(cfg.scenario.kappa, f64::INFINITY);
        let back = ExperimentConfig::parse(&cfg.echo(), None).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn explicit_expansion_grid_is_kept() {
        let text = "experiment = \"expansion-error\"\ngrid = [0, 1, 2.5]\n";
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.grid, vec![0.0, 1.0, 2.5]);
        let back = ExperimentConfig::parse(&cfg.echo(), None).unwrap();
        assert_eq!(back.grid, cfg.grid);
    }
}

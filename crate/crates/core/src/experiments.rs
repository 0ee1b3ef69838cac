//! Config-driven parameter sweeps and named figure presets.
//!
//! A [`SweepConfig`] fixes the atom number, bath, pulse plan, time grid, and
//! the quantities to tabulate; [`run_sweep`] walks the grid (grid points in
//! parallel, assembly in grid order, so output is deterministic) and returns a
//! [`Dataset`] of named columns plus metadata that round-trips through the
//! same flat `key = value` schema the CLI reads. [`run_figure`] bundles the
//! preset sweeps behind short figure ids.

use rayon::prelude::*;

use crate::error::Error;
use crate::noise::{dephasing_record, DephasingRecord, NoiseSpec};
use crate::pulse::{SequenceFamily, SequencePlan};
use crate::qfi::{c_matrix_mixed, qfi_max, qfi_pure_closed};
use crate::quadrature::QuadratureSpec;
use crate::spin::{CollectiveOps, CollectiveState};
use crate::squeezing::{minimize_scalar, squeezing_analytic, squeezing_limit, squeezing_numeric};
use crate::Result;

/// Evenly spaced evaluation times.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let span = self.t_max - self.t_min;
        (0..self.points)
            .map(|k| self.t_min + span * k as f64 / (self.points - 1) as f64)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.t_min >= 0.0) || !(self.t_max > self.t_min) {
            return Err(Error::invalid(format!(
                "time grid needs points >= 2 and 0 <= t_min < t_max, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// One tabulated quantity.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Decoherence exponent R(t).
    R,
    /// Induced twisting angle Ω(t).
    Omega,
    /// Squeezing parameter ξ² of the evolved state.
    Xi2,
    /// Purity Tr ρ².
    Purity,
    /// Maximal QFI of the evolved state (mixed-state route).
    Qfi,
    /// Amplification rate η = F_max/N.
    Eta,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::R,
        Quantity::Omega,
        Quantity::Xi2,
        Quantity::Purity,
        Quantity::Qfi,
        Quantity::Eta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::R => "R",
            Quantity::Omega => "Omega",
            Quantity::Xi2 => "xi2",
            Quantity::Purity => "purity",
            Quantity::Qfi => "qfi",
            Quantity::Eta => "eta",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r" => Ok(Quantity::R),
            "omega" => Ok(Quantity::Omega),
            "xi2" => Ok(Quantity::Xi2),
            "purity" => Ok(Quantity::Purity),
            "qfi" => Ok(Quantity::Qfi),
            "eta" => Ok(Quantity::Eta),
            other => Err(Error::Config(format!(
                "unknown quantity `{other}` (expected R, Omega, xi2, purity, qfi, eta)"
            ))),
        }
    }
}

/// Full description of one trajectory sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n_atoms: usize,
    pub alpha: f64,
    pub temperature: f64,
    pub sequence: SequencePlan,
    pub time_grid: TimeGrid,
    pub quantities: Vec<Quantity>,
    /// Bare collisional twist χ; enters only through Θ = Ω − χt.
    pub chi: f64,
    /// Prefactor of the removable modulation phase Φ.
    pub lambda: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_atoms: 200,
            alpha: 0.01,
            temperature: 1.0,
            sequence: SequencePlan::udd(50),
            time_grid: TimeGrid { t_min: 0.0, t_max: 20.0, points: 400 },
            quantities: vec![Quantity::Xi2],
            chi: 0.0,
            lambda: 1.0,
        }
    }
}

/// The flat config keys, in canonical order. Quantities are a comma list.
pub const CONFIG_KEYS: [&str; 11] = [
    "n_atoms",
    "alpha",
    "temperature",
    "sequence.family",
    "sequence.n",
    "time_grid.t_min",
    "time_grid.t_max",
    "time_grid.points",
    "quantities",
    "chi",
    "lambda",
];

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 2 {
            return Err(Error::invalid("sweeps need at least 2 atoms"));
        }
        NoiseSpec::ohmic(self.alpha, self.temperature)?;
        self.time_grid.validate()?;
        if self.quantities.is_empty() {
            return Err(Error::invalid("no quantities requested"));
        }
        Ok(())
    }

    /// Serialize to the flat `key = value` pairs the CLI config format uses.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let quantities =
            self.quantities.iter().map(|q| q.name()).collect::<Vec<_>>().join(",");
        vec![
            ("n_atoms".into(), self.n_atoms.to_string()),
            ("alpha".into(), fmt_f64(self.alpha)),
            ("temperature".into(), fmt_f64(self.temperature)),
            ("sequence.family".into(), self.sequence.family.name().into()),
            ("sequence.n".into(), self.sequence.pulses.to_string()),
            ("time_grid.t_min".into(), fmt_f64(self.time_grid.t_min)),
            ("time_grid.t_max".into(), fmt_f64(self.time_grid.t_max)),
            ("time_grid.points".into(), self.time_grid.points.to_string()),
            ("quantities".into(), quantities),
            ("chi".into(), fmt_f64(self.chi)),
            ("lambda".into(), fmt_f64(self.lambda)),
        ]
    }

    /// Apply `key = value` pairs on top of this config. Unknown keys are
    /// rejected with the list of valid keys.
    pub fn apply_pairs(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (key, value) in pairs {
            let v = value.trim();
            match key.trim() {
                "n_atoms" => self.n_atoms = parse_num(key, v)?,
                "alpha" => self.alpha = parse_num(key, v)?,
                "temperature" => self.temperature = parse_num(key, v)?,
                "sequence.family" => self.sequence.family = v.parse::<SequenceFamily>()?,
                "sequence.n" => self.sequence.pulses = parse_num(key, v)?,
                "time_grid.t_min" => self.time_grid.t_min = parse_num(key, v)?,
                "time_grid.t_max" => self.time_grid.t_max = parse_num(key, v)?,
                "time_grid.points" => self.time_grid.points = parse_num(key, v)?,
                "quantities" => {
                    self.quantities = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<Vec<_>>>()?;
                }
                "chi" => self.chi = parse_num(key, v)?,
                "lambda" => self.lambda = parse_num(key, v)?,
                unknown => {
                    return Err(Error::Config(format!(
                        "unknown config key `{unknown}`; valid keys: {}",
                        CONFIG_KEYS.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    /// Build a config from pairs over the documented defaults.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        cfg.apply_pairs(pairs)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("cannot parse `{v}` for key `{key}`")))
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v}")
}

/// One named column of a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Tabular sweep output: equal-length named columns plus the metadata needed
/// to reproduce the run.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub columns: Vec<Column>,
    pub metadata: Vec<(String, String)>,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Everything a single evolved grid point can report.
#[derive(Copy, Clone, Debug)]
pub struct MetrologyReport {
    pub xi2: f64,
    pub psi_opt: f64,
    pub purity: f64,
    pub f_max: f64,
    pub eta: f64,
}

/// Evolve the coherent state through one record and evaluate everything.
pub fn evaluate_point(
    record: &DephasingRecord,
    css: &CollectiveState,
    ops: &CollectiveOps,
    chi: f64,
    lambda: f64,
) -> Result<MetrologyReport> {
    let state = css.evolve(record, lambda, chi);
    let n = css.n_atoms();
    let (xi2, psi_opt) = match squeezing_numeric(&state, ops) {
        Ok(s) => (s.xi2, s.psi_opt),
        // a vanishing mean spin leaves ξ² undefined; report holes, not errors
        Err(Error::DegenerateDirection(_)) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let qfi = qfi_max(&c_matrix_mixed(&state, ops)?, n);
    Ok(MetrologyReport { xi2, psi_opt, purity: state.purity(), f_max: qfi.f_max, eta: qfi.eta })
}

struct PointValues {
    r: f64,
    omega: f64,
    xi2: f64,
    purity: f64,
    f_max: f64,
    eta: f64,
}

fn sweep_points(
    config: &SweepConfig,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<PointValues>> {
    let noise = NoiseSpec::ohmic(config.alpha, config.temperature)?;
    let needs_state = config.quantities.iter().any(|q| {
        matches!(q, Quantity::Xi2 | Quantity::Purity | Quantity::Qfi | Quantity::Eta)
    });
    let needs_qfi =
        config.quantities.iter().any(|q| matches!(q, Quantity::Qfi | Quantity::Eta));
    let css = if needs_state { Some(CollectiveState::css(config.n_atoms)?) } else { None };
    let ops = if needs_state { Some(CollectiveOps::new(config.n_atoms)) } else { None };

    times
        .par_iter()
        .enumerate()
        .map(|(index, &t)| {
            let wrap = |e: Error| Error::AtGridPoint { index, t, source: Box::new(e) };
            let rec = dephasing_record(&noise, &config.sequence, t, quad).map_err(wrap)?;
            let mut out = PointValues {
                r: rec.r,
                omega: rec.omega_twist,
                xi2: f64::NAN,
                purity: f64::NAN,
                f_max: f64::NAN,
                eta: f64::NAN,
            };
            if let (Some(css), Some(ops)) = (&css, &ops) {
                let state = css.evolve(&rec, config.lambda, config.chi);
                out.purity = state.purity();
                match squeezing_numeric(&state, ops) {
                    Ok(s) => out.xi2 = s.xi2,
                    Err(Error::DegenerateDirection(_)) => {}
                    Err(e) => return Err(wrap(e)),
                }
                if needs_qfi {
                    let qfi =
                        qfi_max(&c_matrix_mixed(&state, ops).map_err(wrap)?, config.n_atoms);
                    out.f_max = qfi.f_max;
                    out.eta = qfi.eta;
                }
            }
            Ok(out)
        })
        .collect()
}

/// Run one sweep. Deterministic: the same config always produces the same
/// dataset bit for bit.
pub fn run_sweep(config: &SweepConfig) -> Result<Dataset> {
    run_sweep_with(config, &QuadratureSpec::default())
}

pub fn run_sweep_with(config: &SweepConfig, quad: &QuadratureSpec) -> Result<Dataset> {
    config.validate()?;
    let times = config.time_grid.times();
    let points = sweep_points(config, &times, quad)?;

    let mut columns = vec![Column { name: "t".into(), values: times }];
    for q in &config.quantities {
        let values: Vec<f64> = points
            .iter()
            .map(|p| match q {
                Quantity::R => p.r,
                Quantity::Omega => p.omega,
                Quantity::Xi2 => p.xi2,
                Quantity::Purity => p.purity,
                Quantity::Qfi => p.f_max,
                Quantity::Eta => p.eta,
            })
            .collect();
        columns.push(Column { name: q.name().into(), values });
    }

    let mut metadata = vec![("tool_version".into(), env!("CARGO_PKG_VERSION").into())];
    metadata.extend(config.to_pairs());
    Ok(Dataset { columns, metadata })
}

/// The named figure presets.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FigureId {
    One,
    TwoA,
    TwoB,
    ThreeA,
    ThreeB,
    Four,
    FiveA,
    FiveB,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::One,
        FigureId::TwoA,
        FigureId::TwoB,
        FigureId::ThreeA,
        FigureId::ThreeB,
        FigureId::Four,
        FigureId::FiveA,
        FigureId::FiveB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::One => "1",
            FigureId::TwoA => "2a",
            FigureId::TwoB => "2b",
            FigureId::ThreeA => "3a",
            FigureId::ThreeB => "3b",
            FigureId::Four => "4",
            FigureId::FiveA => "5a",
            FigureId::FiveB => "5b",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(FigureId::One),
            "2a" => Ok(FigureId::TwoA),
            "2b" => Ok(FigureId::TwoB),
            "3a" => Ok(FigureId::ThreeA),
            "3b" => Ok(FigureId::ThreeB),
            "4" => Ok(FigureId::Four),
            "5a" => Ok(FigureId::FiveA),
            "5b" => Ok(FigureId::FiveB),
            other => Err(Error::Config(format!(
                "unknown figure id `{other}` (expected 1, 2a, 2b, 3a, 3b, 4, 5a, 5b)"
            ))),
        }
    }
}

/// Run a figure preset. `overrides` are flat config pairs applied to every
/// curve of the preset (handy for coarser grids); they are echoed in the
/// metadata.
pub fn run_figure(id: FigureId, overrides: &[(String, String)]) -> Result<Dataset> {
    let quad = QuadratureSpec::default();
    let base = |alpha: f64, temperature: f64, plan: SequencePlan| -> Result<SweepConfig> {
        let mut cfg = SweepConfig {
            alpha,
            temperature,
            sequence: plan,
            quantities: vec![],
            ..SweepConfig::default()
        };
        cfg.apply_pairs(overrides)?;
        Ok(cfg)
    };

    let mut metadata = vec![
        ("tool_version".into(), env!("CARGO_PKG_VERSION").to_string()),
        ("figure".into(), id.name().to_string()),
    ];
    for (k, v) in overrides {
        metadata.push((format!("override.{k}"), v.clone()));
    }
    let meta = |k: &str, v: String| (k.to_string(), v);

    let dataset = match id {
        FigureId::One => {
            // decoherence vs induced twist under free, periodic, Uhrig control
            let pulses = 50;
            metadata.push(meta("alpha", "0.1".into()));
            metadata.push(meta("temperature", "1".into()));
            metadata.push(meta("pulses", pulses.to_string()));
            let plans = [
                ("free", SequencePlan::free()),
                ("pdd", SequencePlan::pdd(pulses)),
                ("udd", SequencePlan::udd(pulses)),
            ];
            let mut columns: Vec<Column> = Vec::new();
            for (label, plan) in plans {
                let mut cfg = base(0.1, 1.0, plan)?;
                cfg.quantities = vec![Quantity::R, Quantity::Omega];
                let ds = run_sweep_with(&cfg, &quad)?;
                if columns.is_empty() {
                    columns.push(ds.column("t").unwrap().clone());
                }
                for q in ["R", "Omega"] {
                    let mut col = ds.column(q).unwrap().clone();
                    col.name = format!("{q}_{label}");
                    columns.push(col);
                }
            }
            Dataset { columns, metadata }
        }
        FigureId::TwoA | FigureId::TwoB => {
            // uncontrolled dephasing-induced squeezing; (a) coupling series at
            // T = 0, (b) temperature series at α = 0.1
            let variants: Vec<(String, f64, f64)> = match id {
                FigureId::TwoA => [0.01, 0.05, 0.1]
                    .iter()
                    .map(|&a| (format!("xi2_alpha_{a}"), a, 0.0))
                    .collect(),
                _ => [0.0, 1.0, 5.0]
                    .iter()
                    .map(|&t| (format!("xi2_T_{t}"), 0.1, t))
                    .collect(),
            };
            let mut columns: Vec<Column> = Vec::new();
            for (label, alpha, temperature) in &variants {
                let mut cfg = base(*alpha, *temperature, SequencePlan::free())?;
                cfg.quantities = vec![Quantity::Xi2];
                let ds = run_sweep_with(&cfg, &quad)?;
                if columns.is_empty() {
                    columns.push(ds.column("t").unwrap().clone());
                }
                let mut col = ds.column("xi2").unwrap().clone();
                col.name = label.clone();
                columns.push(col);
                metadata.push(meta(label, format!("alpha={alpha}, T={temperature}")));
            }
            Dataset { columns, metadata }
        }
        FigureId::ThreeA | FigureId::ThreeB => {
            // controlled squeezing vs pulse count, with the one-axis-twisting
            // optimum as a reference line
            let make = if id == FigureId::ThreeA { SequencePlan::pdd } else { SequencePlan::udd };
            metadata.push(meta("alpha", "0.01".into()));
            metadata.push(meta("temperature", "1".into()));
            let mut columns: Vec<Column> = Vec::new();
            let mut n_atoms = 0;
            for pulses in [10usize, 20, 50] {
                let mut cfg = base(0.01, 1.0, make(pulses))?;
                cfg.quantities = vec![Quantity::Xi2];
                n_atoms = cfg.n_atoms;
                let ds = run_sweep_with(&cfg, &quad)?;
                if columns.is_empty() {
                    columns.push(ds.column("t").unwrap().clone());
                }
                let mut col = ds.column("xi2").unwrap().clone();
                col.name = format!("xi2_n{pulses}");
                columns.push(col);
            }
            let rows = columns[0].values.len();
            columns.push(Column {
                name: "xi2_limit".into(),
                values: vec![squeezing_limit(n_atoms); rows],
            });
            Dataset { columns, metadata }
        }
        FigureId::Four => {
            // purity protection: Uhrig vs periodic across couplings
            metadata.push(meta("temperature", "1".into()));
            let mut columns: Vec<Column> = Vec::new();
            for alpha in [0.1, 0.05, 0.01] {
                for (label, make) in [
                    ("udd", SequencePlan::udd as fn(usize) -> SequencePlan),
                    ("pdd", SequencePlan::pdd as fn(usize) -> SequencePlan),
                ] {
                    for pulses in [20usize, 50] {
                        let mut cfg = base(alpha, 1.0, make(pulses))?;
                        cfg.quantities = vec![Quantity::Purity];
                        let ds = run_sweep_with(&cfg, &quad)?;
                        if columns.is_empty() {
                            columns.push(ds.column("t").unwrap().clone());
                        }
                        let mut col = ds.column("purity").unwrap().clone();
                        col.name = format!("purity_{label}_n{pulses}_alpha_{alpha}");
                        columns.push(col);
                    }
                }
            }
            Dataset { columns, metadata }
        }
        FigureId::FiveA => {
            // amplification rate vs time: closed pure-state form against the
            // full mixed-state computation
            metadata.push(meta("temperature", "1".into()));
            metadata.push(meta("pulses", "50".into()));
            let mut columns: Vec<Column> = Vec::new();
            for alpha in [0.05, 0.01] {
                let mut cfg = base(alpha, 1.0, SequencePlan::udd(50))?;
                cfg.quantities = vec![Quantity::Omega, Quantity::Eta];
                let ds = run_sweep_with(&cfg, &quad)?;
                if columns.is_empty() {
                    columns.push(ds.column("t").unwrap().clone());
                }
                let omegas = &ds.column("Omega").unwrap().values;
                let closed: Vec<f64> = omegas
                    .iter()
                    .map(|&om| qfi_pure_closed(cfg.n_atoms, om).map(|q| q.eta))
                    .collect::<Result<_>>()?;
                columns.push(Column { name: format!("eta_closed_alpha_{alpha}"), values: closed });
                let mut col = ds.column("eta").unwrap().clone();
                col.name = format!("eta_mixed_alpha_{alpha}");
                columns.push(col);
            }
            Dataset { columns, metadata }
        }
        FigureId::FiveB => {
            // amplification rate vs atom number at fixed time
            let cfg = base(0.05, 1.0, SequencePlan::udd(50))?;
            let t_eval = 5.0;
            metadata.push(meta("t", fmt_f64(t_eval)));
            metadata.push(meta("alpha", fmt_f64(cfg.alpha)));
            metadata.push(meta("temperature", fmt_f64(cfg.temperature)));
            metadata.push(meta("pulses", "50".into()));
            let noise = NoiseSpec::ohmic(cfg.alpha, cfg.temperature)?;
            let rec = dephasing_record(&noise, &cfg.sequence, t_eval, &quad)?;
            let atom_counts: Vec<usize> = (1..=8).map(|k| k * 50).collect();
            let rows: Vec<(f64, f64, f64)> = atom_counts
                .par_iter()
                .map(|&n| {
                    let css = CollectiveState::css(n)?;
                    let ops = CollectiveOps::new(n);
                    let report = evaluate_point(&rec, &css, &ops, cfg.chi, cfg.lambda)?;
                    let closed = qfi_pure_closed(n, rec.omega_twist)?.eta;
                    Ok((n as f64, closed, report.eta))
                })
                .collect::<Result<_>>()?;
            let columns = vec![
                Column { name: "N".into(), values: rows.iter().map(|r| r.0).collect() },
                Column { name: "eta_closed".into(), values: rows.iter().map(|r| r.1).collect() },
                Column { name: "eta_mixed".into(), values: rows.iter().map(|r| r.2).collect() },
            ];
            Dataset { columns, metadata }
        }
    };
    Ok(dataset)
}

/// Scan a trajectory for the strongest squeezing: coarse grid, then
/// golden-section refinement around the best grid point. `force_r_zero`
/// evaluates the closed squeezing form with the decoherence exponent zeroed,
/// isolating the twist contribution. Returns `(t_opt, ξ²_min)`.
pub fn best_squeezing(
    noise: &NoiseSpec,
    plan: &SequencePlan,
    n_atoms: usize,
    t_max: f64,
    grid_points: usize,
    force_r_zero: bool,
) -> Result<(f64, f64)> {
    let quad = QuadratureSpec::default();
    let xi2_at = |t: f64| -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match dephasing_record(noise, plan, t, &quad) {
            Ok(mut rec) => {
                if force_r_zero {
                    rec.r = 0.0;
                }
                squeezing_analytic(n_atoms, &rec).map(|s| s.xi2).unwrap_or(f64::INFINITY)
            }
            Err(_) => f64::INFINITY,
        }
    };
    // parallel coarse pass, serial golden refinement on the winning bracket
    let step = t_max / (grid_points - 1) as f64;
    let coarse: Vec<f64> =
        (0..grid_points).into_par_iter().map(|k| xi2_at(step * k as f64)).collect();
    let best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let lo = step * best.saturating_sub(1) as f64;
    let hi = (step * (best + 1) as f64).min(t_max);
    Ok(minimize_scalar(xi2_at, lo, hi, 16))
}

/// Outcome of one self-check item.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Fast internal consistency suite: closed forms against quadrature and the
/// independent computation routes against each other. Used by `check` in the
/// CLI.
pub fn self_check() -> Vec<CheckOutcome> {
    use crate::noise;
    use crate::pulse::{pdd_filter_closed, PulseSequence};
    use crate::qfi::{c_matrix_pure, qcr_bound};
    use crate::squeezing::squeezing_from_parts;

    let quad = QuadratureSpec::default();
    let mut out = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        out.push(CheckOutcome { name, passed, detail });
    };

    // twist closed form vs quadrature
    {
        let bath = NoiseSpec::ohmic(0.1, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let t = 0.01 * (50.0f64 / 0.01).powf(k as f64 / 19.0);
            let seq = PulseSequence::free(t).unwrap();
            let numeric = noise::twisting_omega(&bath, &seq, &quad).unwrap();
            let closed = noise::free_twist_closed(&bath, t);
            worst = worst.max(((numeric - closed) / closed).abs());
        }
        push(
            "free twist: quadrature vs closed form",
            worst < 1e-8,
            format!("max rel dev {worst:.2e}"),
        );
    }
    // vacuum decoherence closed form vs quadrature
    {
        let bath = NoiseSpec::ohmic(0.1, 0.0).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let t = 0.01 * (50.0f64 / 0.01).powf(k as f64 / 19.0);
            let seq = PulseSequence::free(t).unwrap();
            let numeric = noise::decoherence_r(&bath, &seq, &quad).unwrap();
            let closed = noise::free_decoherence_closed(&bath, t);
            worst = worst.max(((numeric - closed) / closed).abs());
        }
        push(
            "vacuum decoherence: quadrature vs closed form",
            worst < 1e-8,
            format!("max rel dev {worst:.2e}"),
        );
    }
    // periodic filter closed form vs generic sum
    {
        let mut worst: f64 = 0.0;
        for n in [1usize, 2, 5, 8] {
            let t = 4.0;
            let seq = PulseSequence::pdd(n, t).unwrap();
            for k in 1..=40 {
                let omega = 0.21 * k as f64;
                let generic = seq.filter(omega).unwrap();
                let closed = pdd_filter_closed(n, omega, t);
                if generic > 1e-12 {
                    worst = worst.max(((closed - generic) / generic).abs());
                }
            }
        }
        push(
            "periodic filter: closed form vs generic sum",
            worst < 1e-10,
            format!("max rel dev {worst:.2e}"),
        );
    }
    // filter continuity at ω = 0
    {
        let mut worst: f64 = 0.0;
        for seq in [
            PulseSequence::pdd(2, 3.0).unwrap(),
            PulseSequence::udd(5, 3.0).unwrap(),
            PulseSequence::free(3.0).unwrap(),
        ] {
            let phi = seq.phase_integral();
            worst = worst.max((seq.filter(0.0).unwrap() - phi * phi / 2.0).abs());
        }
        push(
            "filter continuity at zero frequency",
            worst < 1e-12,
            format!("max abs dev {worst:.2e}"),
        );
    }
    // squeezing: covariance route vs closed form
    {
        let n = 40;
        let bath = NoiseSpec::ohmic(0.01, 1.0).unwrap();
        let plan = SequencePlan::udd(20);
        let css = CollectiveState::css(n).unwrap();
        let ops = CollectiveOps::new(n);
        let mut worst: f64 = 0.0;
        for t in [2.0, 6.0, 12.0, 18.0] {
            let rec = dephasing_record(&bath, &plan, t, &quad).unwrap();
            let numeric = squeezing_numeric(&css.evolve(&rec, 1.0, 0.0), &ops).unwrap();
            let analytic = squeezing_analytic(n, &rec).unwrap();
            worst = worst.max((numeric.xi2 - analytic.xi2).abs());
        }
        push(
            "squeezing: covariance route vs closed form",
            worst < 1e-8,
            format!("max abs dev {worst:.2e}"),
        );
    }
    // QFI route chain
    {
        let n = 30;
        let css = CollectiveState::css(n).unwrap();
        let ops = CollectiveOps::new(n);
        let mut worst: f64 = 0.0;
        for theta in [0.0, 0.03, 0.1, 0.4] {
            let rec = DephasingRecord { r: 0.0, omega_twist: theta, phi_integral: 0.0, t: 1.0 };
            let state = css.evolve(&rec, 1.0, 0.0);
            let pure = qfi_max(&c_matrix_pure(&state, &ops).unwrap(), n);
            let mixed = qfi_max(&c_matrix_mixed(&state, &ops).unwrap(), n);
            let closed = qfi_pure_closed(n, theta).unwrap();
            worst = worst.max((pure.f_max - mixed.f_max).abs() / pure.f_max);
            worst = worst.max((pure.f_max - closed.f_max).abs() / pure.f_max);
        }
        for n in [2usize, 10, 100] {
            let css = CollectiveState::css(n).unwrap();
            let ops = CollectiveOps::new(n);
            let f = qfi_max(&c_matrix_pure(&css, &ops).unwrap(), n).f_max;
            worst = worst.max((f - n as f64).abs() / n as f64);
        }
        push(
            "QFI: pure, mixed, and closed routes agree",
            worst < 1e-8,
            format!("max rel dev {worst:.2e}"),
        );
    }
    // no twist, no squeezing
    {
        let mut worst: f64 = 0.0;
        for k in 0..50 {
            let r = 10.0 * k as f64 / 49.0;
            worst = worst.max((squeezing_from_parts(120, 0.0, r).unwrap().xi2 - 1.0).abs());
        }
        push(
            "dephasing without twist never squeezes",
            worst < 1e-12,
            format!("max |xi2 - 1| {worst:.2e}"),
        );
    }
    // Cramér–Rao endpoints
    {
        let n = 144.0;
        let a = (qcr_bound(n, 1).unwrap() - 1.0 / n.sqrt()).abs();
        let b = (qcr_bound(n * n / 2.0, 1).unwrap() - 2f64.sqrt() / n).abs();
        push(
            "Cramer-Rao endpoints",
            a < 1e-12 && b < 1e-12,
            format!("devs {a:.2e}, {b:.2e}"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_config() -> SweepConfig {
        SweepConfig {
            n_atoms: 12,
            alpha: 0.05,
            temperature: 1.0,
            sequence: SequencePlan::udd(8),
            time_grid: TimeGrid { t_min: 0.0, t_max: 6.0, points: 7 },
            quantities: vec![Quantity::R, Quantity::Omega, Quantity::Xi2, Quantity::Purity],
            chi: 0.0,
            lambda: 1.0,
        }
    }

    #[test]
    fn sweep_starts_from_the_coherent_state() {
        let ds = run_sweep(&small_config()).unwrap();
        assert_eq!(ds.rows(), 7);
        assert_eq!(ds.column("t").unwrap().values[0], 0.0);
        assert_eq!(ds.column("R").unwrap().values[0], 0.0);
        assert_eq!(ds.column("Omega").unwrap().values[0], 0.0);
        assert_relative_eq!(ds.column("xi2").unwrap().values[0], 1.0, max_relative = 1e-10);
        assert_relative_eq!(ds.column("purity").unwrap().values[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = run_sweep(&small_config()).unwrap();
        let b = run_sweep(&small_config()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_pairs_round_trip() {
        let cfg = small_config();
        let back = SweepConfig::from_pairs(&cfg.to_pairs()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn metadata_suffices_to_rerun() {
        let ds = run_sweep(&small_config()).unwrap();
        let pairs: Vec<(String, String)> = ds
            .metadata
            .iter()
            .filter(|(k, _)| k != "tool_version")
            .cloned()
            .collect();
        let cfg = SweepConfig::from_pairs(&pairs).unwrap();
        let again = run_sweep(&cfg).unwrap();
        assert_eq!(ds.columns, again.columns);
    }

    #[test]
    fn unknown_key_lists_valid_ones() {
        let mut cfg = SweepConfig::default();
        let err = cfg.apply_pairs(&[("bogus".into(), "1".into())]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"));
        for key in CONFIG_KEYS {
            assert!(msg.contains(key), "missing {key} in {msg}");
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small_config();
        cfg.time_grid.points = 1;
        assert!(run_sweep(&cfg).is_err());
        let mut cfg = small_config();
        cfg.quantities.clear();
        assert!(run_sweep(&cfg).is_err());
        let mut cfg = small_config();
        cfg.alpha = -0.5;
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn quantity_names_parse_back() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("entropy".parse::<Quantity>().is_err());
    }

    #[test]
    fn figure_ids_parse_back() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("6".parse::<FigureId>().is_err());
    }

    #[test]
    fn figure_preset_respects_overrides() {
        let overrides = vec![
            ("time_grid.points".to_string(), "5".to_string()),
            ("n_atoms".to_string(), "10".to_string()),
        ];
        let ds = run_figure(FigureId::TwoA, &overrides).unwrap();
        assert_eq!(ds.rows(), 5);
        assert_eq!(ds.columns.len(), 4); // t + three coupling curves
        assert!(ds.metadata.iter().any(|(k, v)| k == "override.n_atoms" && v == "10"));
    }

    #[test]
    fn best_squeezing_finds_the_dip() {
        let bath = NoiseSpec::ohmic(0.05, 1.0).unwrap();
        let (t_opt, xi2) =
            best_squeezing(&bath, &SequencePlan::udd(12), 40, 20.0, 60, true).unwrap();
        assert!(t_opt > 0.0 && t_opt < 20.0);
        assert!(xi2 < 0.5, "expected a clear squeezing dip, got {xi2}");
    }
}

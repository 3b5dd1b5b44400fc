//! Curve scenarios, figure reproduction and CSV emission behind the
//! command-line front end.
//!
//! Every scenario validates its request before computing anything, writes
//! one CSV atomically and reports failures as [`HarnessError`], which maps
//! onto process exit codes.

pub mod csv;
mod discrepancy;
mod figures;
mod scenarios;
mod validate;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::controls::NumericControls;
use crate::error::Error;
use crate::error_rate::ModulationScheme;
use crate::exec::Execution;
use crate::sim::{Constellation, McConfig, DEFAULT_BATCH_SIZE};

pub use csv::{format_float, write_atomic, Cell, Table};
pub use discrepancy::{discrepancy_table, write_discrepancy_report};
pub use figures::{figure_tables, reproduce_figures, FigureOptions};

/// Which curve a request produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    AserStage,
    AserTotal,
    CrossAser,
    Outage,
    McSer,
    McOutage,
    Validate,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::AserStage,
        Scenario::AserTotal,
        Scenario::CrossAser,
        Scenario::Outage,
        Scenario::McSer,
        Scenario::McOutage,
        Scenario::Validate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::AserStage => "aser-stage",
            Scenario::AserTotal => "aser-total",
            Scenario::CrossAser => "cross-aser",
            Scenario::Outage => "outage",
            Scenario::McSer => "mc-ser",
            Scenario::McOutage => "mc-outage",
            Scenario::Validate => "validate",
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Scenario::McSer | Scenario::McOutage)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| HarnessError::Invalid(format!("unknown scenario '{s}'")))
    }
}

/// Failure of a harness run.
#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    /// Bad input, rejected before or during evaluation.
    Invalid(String),
    /// An iterative method failed at the named grid point.
    Numeric { point: String, message: String },
    /// The output could not be written.
    Io(String),
}

impl HarnessError {
    /// 1 for input problems (including unwritable output), 2 for numeric
    /// non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numeric { .. } => 2,
            HarnessError::Invalid(_) | HarnessError::Io(_) => 1,
        }
    }

    /// Wraps a library error raised while evaluating `point`.
    pub fn at(point: impl Into<String>, e: Error) -> Self {
        let point = point.into();
        match e {
            e if e.is_numeric() => HarnessError::Numeric {
                point,
                message: e.to_string(),
            },
            Error::Io(m) => HarnessError::Io(m),
            e => HarnessError::Invalid(format!("{point}: {e}")),
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Invalid(m) => write!(f, "invalid input: {m}"),
            HarnessError::Numeric { point, message } => {
                write!(f, "numeric failure at {point}: {message}")
            }
            HarnessError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        HarnessError::at("setup", e)
    }
}

/// Parses `lo:hi:step` (dB) into an inclusive ascending grid.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = || HarnessError::Invalid(format!("SNR grid '{text}' is not lo:hi:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(HarnessError::Invalid(format!(
            "SNR grid '{text}' needs finite lo <= hi and step > 0"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000 {
        return Err(HarnessError::Invalid(format!(
            "SNR grid '{text}' has more than 10000 points"
        )));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Everything a scenario run needs. Lists are swept as a Cartesian
/// product; rows come out sorted by SNR, then by the list order of the
/// other keys.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub scenario: Scenario,
    pub ns: Vec<u32>,
    pub tx: u32,
    pub m_ns: Vec<f64>,
    pub modulations: Vec<ModulationScheme>,
    /// Correlation coefficients; empty means the independence form.
    pub rhos: Vec<f64>,
    pub snr_grid_db: Vec<f64>,
    pub x_th_db: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub output: PathBuf,
    pub controls: NumericControls,
    pub exec: Execution,
}

impl CurveRequest {
    /// A request with defaults: n = 2, two transmit streams, m_N = 1, BPSK,
    /// 0..20 dB in 2 dB steps, 100000 trials, seed 1.
    pub fn new(scenario: Scenario, output: impl Into<PathBuf>) -> Self {
        Self {
            scenario,
            ns: vec![2],
            tx: 2,
            m_ns: vec![1.0],
            modulations: vec![ModulationScheme::bpsk()],
            rhos: Vec::new(),
            snr_grid_db: (0..=10).map(|i| 2.0 * i as f64).collect(),
            x_th_db: None,
            trials: 100_000,
            seed: 1,
            output: output.into(),
            controls: NumericControls::default(),
            exec: Execution::Auto,
        }
    }

    /// Checks the scenario-specific requirements.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        let sc = self.scenario;
        if self.ns.is_empty() || self.m_ns.is_empty() || self.modulations.is_empty() {
            return bad("n, m_N and modulation lists must be non-empty".into());
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return bad("SNR grid must be non-empty and finite".into());
        }
        if let Some(m) = self.m_ns.iter().find(|m| !(**m >= 0.5) || !m.is_finite()) {
            return bad(format!("m_N must be >= 0.5, got {m}"));
        }
        if let Some(r) = self.rhos.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return bad(format!("rho must lie in [0, 1), got {r}"));
        }
        if sc.is_monte_carlo() {
            if self.tx == 0 {
                return bad("tx must be >= 1".into());
            }
            if let Some(n) = self.ns.iter().find(|&&n| n < self.tx) {
                return bad(format!(
                    "simulation needs n >= tx, got n = {n}, tx = {}",
                    self.tx
                ));
            }
            if self.trials == 0 {
                return bad("trials must be >= 1".into());
            }
            if sc == Scenario::McSer {
                for m in &self.modulations {
                    Constellation::from_modulation(m)
                        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
                }
            }
        } else {
            if self.tx != 2 {
                return bad(format!(
                    "{sc} covers two transmit streams only, got tx = {}",
                    self.tx
                ));
            }
            if let Some(n) = self.ns.iter().find(|&&n| n < 2) {
                return bad(format!("n must be >= 2, got {n}"));
            }
        }
        if sc == Scenario::CrossAser && self.rhos.is_empty() {
            return bad("cross-aser requires --rho".into());
        }
        if matches!(sc, Scenario::Outage | Scenario::McOutage) {
            match self.x_th_db {
                Some(x) if x.is_finite() => {}
                Some(x) => return bad(format!("threshold must be finite, got {x}")),
                None => return bad(format!("{sc} requires --xth-db")),
            }
        }
        self.controls
            .validate()
            .map_err(|e| HarnessError::Invalid(e.to_string()))
    }

    pub(crate) fn mc_config(&self) -> McConfig {
        McConfig {
            trials: self.trials,
            seed: self.seed,
            snr_grid_db: self.snr_grid_db.clone(),
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub path: PathBuf,
    pub rows: usize,
}

/// Builds the scenario table without writing it.
pub fn build_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    req.validate()?;
    match req.scenario {
        Scenario::AserStage => scenarios::aser_stage_table(req),
        Scenario::AserTotal => scenarios::aser_total_table(req),
        Scenario::CrossAser => scenarios::cross_aser_table(req),
        Scenario::Outage => scenarios::outage_table(req),
        Scenario::McSer => scenarios::mc_ser_table(req),
        Scenario::McOutage => scenarios::mc_outage_table(req),
        Scenario::Validate => validate::validation_table(req).map(|(t, _)| t),
    }
}

/// Validates, computes and atomically writes the scenario CSV. A
/// `validate` run whose checks fail still writes its table, then returns
/// a numeric error naming the first failing point.
pub fn run(req: &CurveRequest) -> Result<RunSummary, HarnessError> {
    req.validate()?;
    let (table, failure) = match req.scenario {
        Scenario::Validate => validate::validation_table(req)?,
        _ => (build_table(req)?, None),
    };
    table
        .write_atomic(&req.output)
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    if let Some(f) = failure {
        return Err(f);
    }
    Ok(RunSummary {
        path: req.output.clone(),
        rows: table.len(),
    })
}

/// Label used in diagnostics and CSV point columns; contains no commas.
pub(crate) fn point_label(
    snr_db: f64,
    n: u32,
    m_n: f64,
    modulation: &ModulationScheme,
    rho: Option<f64>,
) -> String {
    let mut s = format!("snr_db={snr_db} n={n} m_N={m_n} mod={modulation}");
    if let Some(r) = rho {
        s.push_str(&format!(" rho={r}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_snr_grid("0:20:4").unwrap(),
            vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0]
        );
        assert_eq!(parse_snr_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_snr_grid("5:5:1").unwrap(), vec![5.0]);
        for bad in ["0:20", "0:20:0", "20:0:1", "a:b:c", "0:1:-1"] {
            assert!(parse_snr_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.as_str().parse::<Scenario>().unwrap(), sc);
        }
        assert!("fig1".parse::<Scenario>().is_err());
    }

    #[test]
    fn required_fields_are_checked() {
        let base = |sc| CurveRequest::new(sc, "x.csv");
        assert!(base(Scenario::CrossAser).validate().is_err());
        assert!(base(Scenario::Outage).validate().is_err());
        assert!(base(Scenario::McOutage).validate().is_err());
        let mut r = base(Scenario::AserStage);
        r.tx = 3;
        assert!(r.validate().is_err());
        let mut r = base(Scenario::McSer);
        r.modulations = vec![ModulationScheme::dpsk()];
        assert!(r.validate().is_err());
        let mut r = base(Scenario::McSer);
        r.trials = 0;
        assert!(r.validate().is_err());
        let mut r = base(Scenario::AserTotal);
        r.rhos = vec![1.0];
        assert!(r.validate().is_err());
        assert!(base(Scenario::AserStage).validate().is_ok());
    }

    #[test]
    fn exit_codes() {
        let e = HarnessError::at(
            "p",
            Error::NonConvergence {
                func: "f",
                terms: 1,
                partial: 0.0,
            },
        );
        assert_eq!(e.exit_code(), 2);
        assert_eq!(
            HarnessError::at("p", Error::Config("x".into())).exit_code(),
            1
        );
    }
}

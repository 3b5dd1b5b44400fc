use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use vblast_core::error_rate::ModulationScheme;
use vblast_core::harness::{
    self, parse_snr_grid, reproduce_figures, write_discrepancy_report, CurveRequest, FigureOptions,
    HarnessError, Scenario,
};
use vblast_core::{Execution, NumericControls};

/// Analytic and simulated performance curves for 2×n ordered V-BLAST
/// (ZF-SIC) over Nakagami-m fading.
#[derive(Parser, Debug)]
#[command(name = "vblast-perf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-stage ASER.
    AserStage(CurveArgs),
    /// Stage ASERs, cross term and total ASER.
    AserTotal(CurveArgs),
    /// Correlated cross-product ASER (needs --rho).
    CrossAser(CurveArgs),
    /// Stage outage probabilities (needs --xth-db).
    Outage(CurveArgs),
    /// Simulated symbol error rate, ordered and unordered detection.
    McSer(CurveArgs),
    /// Simulated outage (needs --xth-db).
    McOutage(CurveArgs),
    /// Closed forms against quadrature oracles on the requested grid.
    Validate(CurveArgs),
    /// Write fig1.csv … fig4.csv.
    Figures(FigureArgs),
    /// Write the uncorrected-versus-corrected discrepancy report.
    Discrepancy(DiscrepancyArgs),
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Receive antennas; a comma list sweeps several.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<u32>,
    /// Transmit streams.
    #[arg(long)]
    tx: u32,
    /// Nakagami shape m_N; a comma list sweeps several.
    #[arg(long = "mn", value_delimiter = ',', required = true)]
    mn: Vec<f64>,
    /// SNR grid in dB as lo:hi:step.
    #[arg(long, allow_hyphen_values = true, value_parser = snr_grid)]
    snr: SnrGrid,
    /// bpsk, dpsk, bfsk or qam:M; a comma list sweeps several.
    #[arg(long = "mod", value_delimiter = ',', required = true, value_parser = modulation)]
    modulation: Vec<ModulationScheme>,
    /// Correlation between the stage SNRs; a comma list sweeps several.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    /// Outage threshold in dB.
    #[arg(long = "xth-db", allow_negative_numbers = true)]
    xth_db: Option<f64>,
    /// Monte-Carlo trials per grid point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Budget of adaptive quadrature subdivisions per integral.
    #[arg(long = "max-subdivisions", default_value_t = NumericControls::default().quadrature.max_subdivisions)]
    max_subdivisions: usize,
    /// Budget of outer terms for the correlated cross-term series.
    #[arg(long = "max-series-terms", default_value_t = NumericControls::default().series.max_outer_terms)]
    max_series_terms: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Directory for fig1.csv … fig4.csv.
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// fig4 outage threshold in dB.
    #[arg(long = "xth-db", default_value_t = -5.0, allow_negative_numbers = true)]
    xth_db: f64,
    #[arg(long, default_value = "0:20:2", allow_hyphen_values = true, value_parser = snr_grid)]
    snr: SnrGrid,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args, Debug)]
struct DiscrepancyArgs {
    #[arg(long)]
    out: PathBuf,
}

/// Parsed `lo:hi:step` grid in dB.
#[derive(Debug, Clone)]
struct SnrGrid(Vec<f64>);

fn snr_grid(s: &str) -> Result<SnrGrid, String> {
    parse_snr_grid(s).map(SnrGrid).map_err(|e| e.to_string())
}

fn modulation(s: &str) -> Result<ModulationScheme, String> {
    s.parse().map_err(|e: vblast_core::Error| e.to_string())
}

fn execution(threads: usize) -> Execution {
    match threads {
        0 => Execution::Auto,
        1 => Execution::Sequential,
        t => Execution::Parallel { threads: t },
    }
}

fn request(scenario: Scenario, a: CurveArgs) -> CurveRequest {
    let mut r = CurveRequest::new(scenario, a.out);
    r.ns = a.n;
    r.tx = a.tx;
    r.m_ns = a.mn;
    r.modulations = a.modulation;
    r.rhos = a.rho;
    r.snr_grid_db = a.snr.0;
    r.x_th_db = a.xth_db;
    r.trials = a.trials;
    r.seed = a.seed;
    r.exec = execution(a.threads);
    r.controls.quadrature.max_subdivisions = a.max_subdivisions;
    r.controls.series.max_outer_terms = a.max_series_terms;
    r
}

fn run(cmd: Command) -> Result<String, HarnessError> {
    let scenario = match cmd {
        Command::AserStage(a) => (Scenario::AserStage, a),
        Command::AserTotal(a) => (Scenario::AserTotal, a),
        Command::CrossAser(a) => (Scenario::CrossAser, a),
        Command::Outage(a) => (Scenario::Outage, a),
        Command::McSer(a) => (Scenario::McSer, a),
        Command::McOutage(a) => (Scenario::McOutage, a),
        Command::Validate(a) => (Scenario::Validate, a),
        Command::Figures(a) => {
            let mut o = FigureOptions::new(a.out_dir);
            o.trials = a.trials;
            o.seed = a.seed;
            o.x_th_db = a.xth_db;
            o.snr_grid_db = a.snr.0;
            o.exec = execution(a.threads);
            let paths = reproduce_figures(&o)?;
            let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            return Ok(format!("wrote {}", names.join(" ")));
        }
        Command::Discrepancy(a) => {
            let rows = write_discrepancy_report(&a.out, &NumericControls::default())?;
            return Ok(format!("wrote {rows} rows to {}", a.out.display()));
        }
    };
    let req = request(scenario.0, scenario.1);
    let s = harness::run(&req)?;
    Ok(format!("wrote {} rows to {}", s.rows, s.path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // clap's report spans several lines; keep the diagnostic to one.
            let msg = e.to_string();
            let mut lines = msg.lines().map(str::trim).filter(|l| !l.is_empty());
            let mut line = lines
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            if line.ends_with(':') {
                if let Some(next) = lines.next() {
                    line = format!("{line} {next}");
                }
            }
            eprintln!("vblast-perf: {line}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("vblast-perf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

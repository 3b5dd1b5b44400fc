//! fig1.csv … fig4.csv: the four reference figure configurations,
//! with analytic bounds, numerical evaluation over the actual SNR
//! statistics and a Monte-Carlo overlay where one applies.

use std::path::PathBuf;

use crate::controls::NumericControls;
use crate::db_to_linear;
use crate::error_rate::{
    aser_stage1_actual, aser_stage2_actual, aser_total, MethodTag, ModulationScheme,
};
use crate::exec::Execution;
use crate::fading::SystemModel;
use crate::sim::{estimate_outage, estimate_ser, DetectionOrder, SimRun};

use super::scenarios::{
    aser_stage_table, combined, cross_aser_table, evaluate, outage_row, points, tagged,
};
use super::{Cell, CurveRequest, HarnessError, Scenario, Table};

/// Settings shared by all four figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub out_dir: PathBuf,
    pub trials: u64,
    pub seed: u64,
    /// Outage threshold for fig4, in dB.
    pub x_th_db: f64,
    pub snr_grid_db: Vec<f64>,
    pub controls: NumericControls,
    pub exec: Execution,
}

impl FigureOptions {
    /// 0..20 dB in 2 dB steps, 100000 trials, seed 1, x_th = −5 dB.
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            trials: 100_000,
            seed: 1,
            x_th_db: -5.0,
            snr_grid_db: (0..=10).map(|i| 2.0 * i as f64).collect(),
            controls: NumericControls::default(),
            exec: Execution::Auto,
        }
    }

    fn request(
        &self,
        ns: &[u32],
        m_n: f64,
        mods: &[ModulationScheme],
        rhos: &[f64],
    ) -> CurveRequest {
        let mut r = CurveRequest::new(Scenario::AserStage, self.out_dir.join("unused"));
        r.ns = ns.to_vec();
        r.m_ns = vec![m_n];
        r.modulations = mods.to_vec();
        r.rhos = rhos.to_vec();
        r.snr_grid_db = self.snr_grid_db.clone();
        r.x_th_db = Some(self.x_th_db);
        r.trials = self.trials;
        r.seed = self.seed;
        r.controls = self.controls;
        r.exec = self.exec;
        r
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Invalid("trials must be >= 1".into()));
        }
        if !self.x_th_db.is_finite() {
            return Err(HarnessError::Invalid("threshold must be finite".into()));
        }
        self.request(&[2], 1.0, &[ModulationScheme::bpsk()], &[])
            .validate()
    }
}

const NS: [u32; 3] = [2, 3, 4];

fn mc_runs(
    req: &CurveRequest,
    modulation: Option<&ModulationScheme>,
) -> Result<Vec<SimRun>, HarnessError> {
    let mc = req.mc_config();
    let x_th = db_to_linear(req.x_th_db.unwrap_or_default());
    req.ns
        .iter()
        .map(|&n| {
            let label = format!("n={n} m_N={} simulation", req.m_ns[0]);
            let sys = SystemModel::two_by(n, req.m_ns[0], 1.0)
                .map_err(|e| HarnessError::at(&label, e))?;
            match modulation {
                Some(m) => estimate_ser(&sys, m, DetectionOrder::Ordered, &mc, req.exec),
                None => estimate_outage(&sys, DetectionOrder::Ordered, &mc, x_th, req.exec),
            }
            .map_err(|e| HarnessError::at(&label, e))
        })
        .collect()
}

fn mc_cells(value: f64, std_error: f64) -> [Cell; 3] {
    [
        value.into(),
        std_error.into(),
        MethodTag::MonteCarlo.as_str().into(),
    ]
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Per-stage ASER, m_N = 1, BPSK, n ∈ {2, 3, 4}.
fn fig1(opts: &FigureOptions) -> Result<Table, HarnessError> {
    let bpsk = ModulationScheme::bpsk();
    let req = opts.request(&NS, 1.0, &[bpsk], &[]);
    let analytic = aser_stage_table(&req)?;
    let pts = points(&req, false);
    let q = opts.controls.quadrature;
    let numerical = evaluate(&req, &pts, |p| {
        let sys = p.system()?;
        let at = |e| HarnessError::at(p.label(), e);
        Ok((
            aser_stage1_actual(&sys, &bpsk, &q).map_err(at)?,
            aser_stage2_actual(&sys, &bpsk, &q).map_err(at)?,
        ))
    })?;
    let runs = mc_runs(&req, Some(&bpsk))?;
    let mut t = Table::new(header(&[
        "snr_db",
        "n",
        "m_N",
        "stage1",
        "stage1_method",
        "stage2",
        "stage2_method",
        "stage1_numerical",
        "stage1_numerical_method",
        "stage2_numerical",
        "stage2_numerical_method",
        "mc_stage1",
        "mc_stage1_std_err",
        "mc_stage1_method",
        "mc_stage2",
        "mc_stage2_std_err",
        "mc_stage2_method",
    ]));
    let quad = MethodTag::Quadrature.as_str();
    for (i, (row, (n1, n2))) in analytic.rows().iter().zip(numerical).enumerate() {
        let (g, k) = (i / NS.len(), i % NS.len());
        let e = &runs[k].points[g].estimate;
        let mut out = vec![row[0].clone(), row[1].clone(), row[2].clone()];
        out.extend(row[4..8].iter().cloned());
        out.extend([n1.into(), quad.into(), n2.into(), quad.into()]);
        out.extend(mc_cells(e.per_stage[0].value, e.per_stage[0].std_error));
        out.extend(mc_cells(e.per_stage[1].value, e.per_stage[1].std_error));
        t.push(out)?;
    }
    Ok(t)
}

/// Total ASER, m_N = 2, BPSK and 4-QAM, n ∈ {2, 3, 4}. Larger QAM orders
/// are left out: their stage approximations exceed 1 at the low end of
/// the grid, where the total stops being monotone.
fn fig2(opts: &FigureOptions) -> Result<Table, HarnessError> {
    let mods = [
        ModulationScheme::bpsk(),
        ModulationScheme::qam(4).map_err(HarnessError::from)?,
    ];
    let req = opts.request(&NS, 2.0, &mods, &[]);
    let pts = points(&req, false);
    let ctl = opts.controls;
    let vals = evaluate(&req, &pts, |p| {
        let sys = p.system()?;
        let at = |e| HarnessError::at(p.label(), e);
        let b = aser_total(&sys, &p.modulation, None, &ctl).map_err(at)?;
        let a1 = aser_stage1_actual(&sys, &p.modulation, &ctl.quadrature).map_err(at)?;
        let a2 = aser_stage2_actual(&sys, &p.modulation, &ctl.quadrature).map_err(at)?;
        Ok((b, a1 + a2 * (1.0 - a1)))
    })?;
    // runs[modulation][n]
    let runs: Vec<Vec<SimRun>> = mods
        .iter()
        .map(|m| mc_runs(&req, Some(m)))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(header(&[
        "snr_db",
        "n",
        "m_N",
        "modulation",
        "total",
        "total_method",
        "total_numerical",
        "total_numerical_method",
        "mc_total",
        "mc_total_std_err",
        "mc_total_method",
    ]));
    for (i, (p, (b, num))) in pts.iter().zip(vals).enumerate() {
        let g = i / (NS.len() * mods.len());
        let (k, j) = ((i / mods.len()) % NS.len(), i % mods.len());
        let any = runs[j][k].points[g].any_stage;
        let mut row: Vec<Cell> = vec![
            p.snr_db.into(),
            p.n.into(),
            p.m_n.into(),
            p.modulation.to_string().into(),
        ];
        row.push(b.total.into());
        row.push(combined(&[b.stage1.method, b.stage2.method, b.cross.method]).into());
        row.extend([num.into(), MethodTag::Quadrature.as_str().into()]);
        row.extend(mc_cells(any.value, any.std_error));
        t.push(row)?;
    }
    Ok(t)
}

/// Cross-product ASER, n = 2, m_N = 0.5, BPSK and 4-QAM, ρ ∈ {0.3, 0.5, 0.7}.
fn fig3(opts: &FigureOptions) -> Result<Table, HarnessError> {
    let mods = [
        ModulationScheme::bpsk(),
        ModulationScheme::qam(4).map_err(HarnessError::from)?,
    ];
    let mut req = opts.request(&[2], 0.5, &mods, &[0.3, 0.5, 0.7]);
    req.scenario = Scenario::CrossAser;
    cross_aser_table(&req)
}

/// Outage, m_N = 2, BPSK, n ∈ {2, 3, 4}.
fn fig4(opts: &FigureOptions) -> Result<Table, HarnessError> {
    let req = opts.request(&NS, 2.0, &[ModulationScheme::bpsk()], &[]);
    let pts = points(&req, false);
    let x_th = db_to_linear(opts.x_th_db);
    let vals = evaluate(&req, &pts, |p| outage_row(p, x_th, &req))?;
    let runs = mc_runs(&req, None)?;
    let mut t = Table::new(header(&[
        "snr_db",
        "n",
        "m_N",
        "x_th_db",
        "p_out1",
        "p_out1_method",
        "p_out2",
        "p_out2_method",
        "p_out2_uncond",
        "p_out2_uncond_method",
        "aser1",
        "aser1_method",
        "mc_out1",
        "mc_out1_std_err",
        "mc_out1_method",
        "mc_out2",
        "mc_out2_std_err",
        "mc_out2_method",
    ]));
    let closed = MethodTag::ClosedForm.as_str();
    for (i, (p, o)) in pts.iter().zip(vals).enumerate() {
        let (g, k) = (i / NS.len(), i % NS.len());
        let e = &runs[k].points[g].estimate;
        let mut row: Vec<Cell> = vec![
            p.snr_db.into(),
            p.n.into(),
            p.m_n.into(),
            opts.x_th_db.into(),
        ];
        row.extend([
            o.p_out1.into(),
            closed.into(),
            o.p_out2.into(),
            closed.into(),
        ]);
        row.extend(tagged(&o.p_out2_uncond));
        row.extend(tagged(&o.aser1));
        row.extend(mc_cells(e.per_stage[0].value, e.per_stage[0].std_error));
        row.extend(mc_cells(e.per_stage[1].value, e.per_stage[1].std_error));
        t.push(row)?;
    }
    Ok(t)
}

/// The four figure tables with their file names, without writing them.
pub fn figure_tables(opts: &FigureOptions) -> Result<Vec<(&'static str, Table)>, HarnessError> {
    opts.validate()?;
    Ok(vec![
        ("fig1.csv", fig1(opts)?),
        ("fig2.csv", fig2(opts)?),
        ("fig3.csv", fig3(opts)?),
        ("fig4.csv", fig4(opts)?),
    ])
}

/// Writes fig1.csv … fig4.csv into `opts.out_dir` and returns their paths.
pub fn reproduce_figures(opts: &FigureOptions) -> Result<Vec<PathBuf>, HarnessError> {
    let tables = figure_tables(opts)?;
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| HarnessError::Io(e.to_string()))?;
    let mut paths = Vec::new();
    for (name, t) in tables {
        let p = opts.out_dir.join(name);
        t.write_atomic(&p)
            .map_err(|e| HarnessError::Io(e.to_string()))?;
        paths.push(p);
    }
    Ok(paths)
}

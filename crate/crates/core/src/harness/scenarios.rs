//! Table builders for the individual scenarios.

use crate::db_to_linear;
use crate::error_rate::{
    aser_cross, aser_stage1, aser_stage2, aser_total, outage_stage1, outage_stage2_conditional,
    outage_stage2_unconditional, MethodTag, ModulationScheme, TaggedValue,
};
use crate::fading::{CorrelationModel, SystemModel};
use crate::sim::{estimate_outage, estimate_ser, DetectionOrder, SimRun};

use super::{point_label, Cell, CurveRequest, HarnessError, Table};

/// One analytic grid point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub snr_db: f64,
    pub n: u32,
    pub m_n: f64,
    pub modulation: ModulationScheme,
    pub rho: Option<f64>,
}

impl Point {
    pub fn label(&self) -> String {
        point_label(self.snr_db, self.n, self.m_n, &self.modulation, self.rho)
    }

    pub fn system(&self) -> Result<SystemModel, HarnessError> {
        SystemModel::two_by(self.n, self.m_n, db_to_linear(self.snr_db))
            .map_err(|e| HarnessError::at(self.label(), e))
    }

    pub fn correlation(&self) -> Result<Option<CorrelationModel>, HarnessError> {
        self.rho
            .map(CorrelationModel::new)
            .transpose()
            .map_err(|e| HarnessError::at(self.label(), e))
    }

    fn keys(&self) -> Vec<Cell> {
        vec![
            self.snr_db.into(),
            self.n.into(),
            self.m_n.into(),
            self.modulation.to_string().into(),
        ]
    }
}

/// Grid points with SNR outermost, then n, m_N, modulation and ρ.
pub(crate) fn points(req: &CurveRequest, with_rho: bool) -> Vec<Point> {
    let rhos: Vec<Option<f64>> = if with_rho && !req.rhos.is_empty() {
        req.rhos.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &snr_db in &req.snr_grid_db {
        for &n in &req.ns {
            for &m_n in &req.m_ns {
                for &modulation in &req.modulations {
                    for &rho in &rhos {
                        out.push(Point {
                            snr_db,
                            n,
                            m_n,
                            modulation,
                            rho,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Evaluates every point (possibly in parallel) and keeps grid order. The
/// first failure in grid order is reported.
pub(crate) fn evaluate<T, F>(
    req: &CurveRequest,
    pts: &[Point],
    f: F,
) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(&Point) -> Result<T, HarnessError> + Sync + Send,
{
    req.exec
        .map(pts.len() as u64, |i| f(&pts[i as usize]))
        .into_iter()
        .collect()
}

pub(crate) fn tagged(v: &TaggedValue) -> [Cell; 2] {
    [v.value.into(), v.method.as_str().into()]
}

/// Joins the distinct methods behind a derived value, e.g.
/// `closed_form+series`.
pub(crate) fn combined(methods: &[MethodTag]) -> String {
    let mut seen: Vec<&str> = Vec::new();
    for m in methods {
        if !seen.contains(&m.as_str()) {
            seen.push(m.as_str());
        }
    }
    seen.join("+")
}

fn rho_cell(rho: Option<f64>) -> Cell {
    rho.map_or_else(|| Cell::text("none"), Cell::Num)
}

pub(crate) fn aser_stage_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    let pts = points(req, false);
    let ctl = req.controls;
    let vals = evaluate(req, &pts, |p| {
        let sys = p.system()?;
        let s1 =
            aser_stage1(&sys, &p.modulation, &ctl).map_err(|e| HarnessError::at(p.label(), e))?;
        let s2 =
            aser_stage2(&sys, &p.modulation, &ctl).map_err(|e| HarnessError::at(p.label(), e))?;
        Ok((s1, s2))
    })?;
    let mut t = Table::new([
        "snr_db",
        "n",
        "m_N",
        "modulation",
        "stage1",
        "stage1_method",
        "stage2",
        "stage2_method",
    ]);
    for (p, (s1, s2)) in pts.iter().zip(vals) {
        let mut row = p.keys();
        row.extend(tagged(&s1));
        row.extend(tagged(&s2));
        t.push(row)?;
    }
    Ok(t)
}

pub(crate) fn aser_total_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    let pts = points(req, true);
    let ctl = req.controls;
    let vals = evaluate(req, &pts, |p| {
        let sys = p.system()?;
        let corr = p.correlation()?;
        aser_total(&sys, &p.modulation, corr.as_ref(), &ctl)
            .map_err(|e| HarnessError::at(p.label(), e))
    })?;
    let mut t = Table::new([
        "snr_db",
        "n",
        "m_N",
        "modulation",
        "rho",
        "stage1",
        "stage1_method",
        "stage2",
        "stage2_method",
        "cross",
        "cross_method",
        "total",
        "total_method",
    ]);
    for (p, b) in pts.iter().zip(vals) {
        let mut row = p.keys();
        row.push(rho_cell(p.rho));
        row.extend(tagged(&b.stage1));
        row.extend(tagged(&b.stage2));
        row.extend(tagged(&b.cross));
        row.push(b.total.into());
        row.push(combined(&[b.stage1.method, b.stage2.method, b.cross.method]).into());
        t.push(row)?;
    }
    Ok(t)
}

pub(crate) fn cross_aser_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    let pts = points(req, true);
    let ctl = req.controls;
    let vals = evaluate(req, &pts, |p| {
        let sys = p.system()?;
        let corr = p
            .correlation()?
            .ok_or_else(|| HarnessError::Invalid("cross-aser requires --rho".into()))?;
        aser_cross(&sys, &p.modulation, &corr, &ctl).map_err(|e| HarnessError::at(p.label(), e))
    })?;
    let mut t = Table::new([
        "snr_db",
        "n",
        "m_N",
        "modulation",
        "rho",
        "cross",
        "cross_method",
    ]);
    for (p, c) in pts.iter().zip(vals) {
        let mut row = p.keys();
        row.push(rho_cell(p.rho));
        row.extend(tagged(&c));
        t.push(row)?;
    }
    Ok(t)
}

/// Stage outage values at one point: P_out,1, conditional P_out,2,
/// unconditional P'_out,2 and the stage-1 ASER that floors it.
pub(crate) struct OutageRow {
    pub p_out1: f64,
    pub p_out2: f64,
    pub p_out2_uncond: TaggedValue,
    pub aser1: TaggedValue,
}

pub(crate) fn outage_row(
    p: &Point,
    x_th: f64,
    req: &CurveRequest,
) -> Result<OutageRow, HarnessError> {
    let sys = p.system()?;
    let at = |e| HarnessError::at(p.label(), e);
    Ok(OutageRow {
        p_out1: outage_stage1(x_th, &sys).map_err(at)?,
        p_out2: outage_stage2_conditional(x_th, &sys).map_err(at)?,
        p_out2_uncond: outage_stage2_unconditional(x_th, &sys, &p.modulation, &req.controls)
            .map_err(at)?,
        aser1: aser_stage1(&sys, &p.modulation, &req.controls).map_err(at)?,
    })
}

pub(crate) fn outage_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    let pts = points(req, false);
    let x_th_db = req.x_th_db.unwrap_or_default();
    let x_th = db_to_linear(x_th_db);
    let vals = evaluate(req, &pts, |p| outage_row(p, x_th, req))?;
    let mut t = Table::new([
        "snr_db",
        "n",
        "m_N",
        "modulation",
        "x_th_db",
        "p_out1",
        "p_out1_method",
        "p_out2",
        "p_out2_method",
        "p_out2_uncond",
        "p_out2_uncond_method",
        "aser1",
        "aser1_method",
    ]);
    let closed = MethodTag::ClosedForm.as_str();
    for (p, o) in pts.iter().zip(vals) {
        let mut row = p.keys();
        row.push(x_th_db.into());
        row.extend([
            o.p_out1.into(),
            closed.into(),
            o.p_out2.into(),
            closed.into(),
        ]);
        row.extend(tagged(&o.p_out2_uncond));
        row.extend(tagged(&o.aser1));
        t.push(row)?;
    }
    Ok(t)
}

const ORDERS: [DetectionOrder; 2] = [DetectionOrder::Ordered, DetectionOrder::Unordered];

/// One simulated curve and the keys that identify it.
struct Curve {
    n: u32,
    m_n: f64,
    modulation: Option<ModulationScheme>,
    order: DetectionOrder,
    run: SimRun,
}

fn simulate(req: &CurveRequest, ser: bool) -> Result<Vec<Curve>, HarnessError> {
    let mc = req.mc_config();
    let x_th = db_to_linear(req.x_th_db.unwrap_or_default());
    let mods: Vec<Option<ModulationScheme>> = if ser {
        req.modulations.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut curves = Vec::new();
    for &n in &req.ns {
        for &m_n in &req.m_ns {
            for &modulation in &mods {
                for order in ORDERS {
                    let label = format!("n={n} m_N={m_n} order={}", order.as_str());
                    let sys = SystemModel::new(n, req.tx, m_n, 1.0)
                        .map_err(|e| HarnessError::at(&label, e))?;
                    let run = match modulation {
                        Some(m) => estimate_ser(&sys, &m, order, &mc, req.exec),
                        None => estimate_outage(&sys, order, &mc, x_th, req.exec),
                    }
                    .map_err(|e| HarnessError::at(&label, e))?;
                    curves.push(Curve {
                        n,
                        m_n,
                        modulation,
                        order,
                        run,
                    });
                }
            }
        }
    }
    Ok(curves)
}

fn stage_header(prefix: &str, tx: u32) -> Vec<String> {
    let mut h = Vec::new();
    for s in 1..=tx {
        h.push(format!("{prefix}{s}"));
        h.push(format!("{prefix}{s}_std_err"));
        h.push(format!("{prefix}{s}_method"));
    }
    h
}

fn mc_table(req: &CurveRequest, ser: bool) -> Result<Table, HarnessError> {
    let curves = simulate(req, ser)?;
    let mc_tag = MethodTag::MonteCarlo.as_str();
    let mut header: Vec<String> = ["snr_db", "n", "tx", "m_N"].map(String::from).to_vec();
    if ser {
        header.push("modulation".into());
    }
    header.push("ordering".into());
    if !ser {
        header.push("x_th_db".into());
    }
    header.extend(["trials", "seed"].map(String::from));
    let (main, any) = if ser {
        ("ser", "any_error")
    } else {
        ("outage", "")
    };
    header.extend([
        main.to_string(),
        format!("{main}_std_err"),
        format!("{main}_method"),
    ]);
    if ser {
        header.extend([
            any.to_string(),
            format!("{any}_std_err"),
            format!("{any}_method"),
        ]);
    }
    header.extend(stage_header("stage", req.tx));
    let mut t = Table::new(header);
    for (i, &snr_db) in req.snr_grid_db.iter().enumerate() {
        for c in &curves {
            let pt = &c.run.points[i];
            let e = &pt.estimate;
            let mut row: Vec<Cell> = vec![snr_db.into(), c.n.into(), req.tx.into(), c.m_n.into()];
            if let Some(m) = c.modulation {
                row.push(m.to_string().into());
            }
            row.push(c.order.as_str().into());
            if !ser {
                row.push(req.x_th_db.unwrap_or_default().into());
            }
            row.extend([e.trials.into(), req.seed.into()]);
            row.extend([e.value.into(), e.std_error.into(), mc_tag.into()]);
            if ser {
                row.extend([
                    pt.any_stage.value.into(),
                    pt.any_stage.std_error.into(),
                    mc_tag.into(),
                ]);
            }
            for s in &e.per_stage {
                row.extend([s.value.into(), s.std_error.into(), mc_tag.into()]);
            }
            t.push(row)?;
        }
    }
    Ok(t)
}

pub(crate) fn mc_ser_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    mc_table(req, true)
}

pub(crate) fn mc_outage_table(req: &CurveRequest) -> Result<Table, HarnessError> {
    mc_table(req, false)
}

//! Monte-Carlo ZF-SIC link simulation.
//!
//! The simulator draws the physical channel (i.i.d. Nakagami-m_N entries
//! with uniform phase), not the post-processing SNR law used by the
//! analytic modules. Comparisons against the closed forms therefore test
//! trends and bound directions; tight agreement is not expected.
//!
//! Trials run in batches. Batch `b` draws from a ChaCha8 generator seeded
//! with the run seed and switched to stream `b`, so every batch is a pure
//! function of (seed, b). Counts are merged in batch order, which makes
//! the estimates bit-identical for any thread count. Within a trial the
//! same channel, symbols and unit-variance noise are reused at every grid
//! point (common random numbers), so curves are smooth in SNR.

pub mod channel;
pub mod detector;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::error_rate::ModulationScheme;
use crate::exec::Execution;
use crate::fading::SystemModel;

pub use channel::{sample_nakagami_power, ChannelMatrix, NakagamiLink};
pub use detector::{zf_sic_detect, Constellation, Detection, DetectionOrder, ZfSicPlan};

pub const DEFAULT_BATCH_SIZE: u64 = 65_536;

/// Upper limit on channel redraws for a single trial.
const MAX_RESAMPLES: u32 = 64;

/// Trial budget, seed and SNR grid of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub snr_grid_db: Vec<f64>,
    pub batch_size: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, snr_grid_db: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            trials,
            seed,
            snr_grid_db,
            batch_size: DEFAULT_BATCH_SIZE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if let Some(x) = self.snr_grid_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("SNR grid value {x} is not finite")));
        }
        Ok(())
    }

    fn batches(&self) -> u64 {
        self.trials.div_ceil(self.batch_size)
    }

    fn batch_trials(&self, b: u64) -> u64 {
        (self.trials - b * self.batch_size).min(self.batch_size)
    }

    fn rng(&self, b: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(b);
        rng
    }
}

/// A proportion estimate for one detection stage (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageEstimate {
    pub stage: usize,
    pub value: f64,
    pub std_error: f64,
}

/// Empirical probability with its binomial standard error
/// √(p(1−p)/trials).
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub per_stage: Vec<StageEstimate>,
}

fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl SimEstimate {
    fn from_counts(overall: f64, stage_hits: &[u64], trials: u64) -> Self {
        let per_stage = stage_hits
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let (value, std_error) = proportion(h, trials);
                StageEstimate {
                    stage: i + 1,
                    value,
                    std_error,
                }
            })
            .collect();
        Self {
            value: overall,
            std_error: (overall * (1.0 - overall) / trials as f64).sqrt(),
            trials,
            per_stage,
        }
    }
}

/// A proportion and its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub value: f64,
    pub std_error: f64,
}

/// Estimate at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub snr_db: f64,
    pub estimate: SimEstimate,
    /// Fraction of trials in which at least one stage failed (symbol error
    /// or outage).
    pub any_stage: Proportion,
}

/// A simulated curve plus run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub points: Vec<SimPoint>,
    /// Channel redraws caused by numerical rank deficiency.
    pub resampled: u64,
    /// Mean ZF noise amplification [G⁻¹]_kk at each stage, in units of
    /// the per-antenna noise variance.
    pub noise_amplification: Vec<f64>,
}

/// Per-batch tallies. Counts are integers; the amplification sums are
/// merged in batch order.
struct Tally {
    stage_hits: Vec<Vec<u64>>,
    resampled: u64,
    amp: Vec<f64>,
}

impl Tally {
    fn new(points: usize, stages: usize) -> Self {
        Self {
            stage_hits: vec![vec![0; stages]; points],
            resampled: 0,
            amp: vec![0.0; stages],
        }
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in self.stage_hits.iter_mut().zip(other.stage_hits) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.resampled += other.resampled;
        for (a, b) in self.amp.iter_mut().zip(other.amp) {
            *a += b;
        }
        self
    }
}

fn check_sim_system(sys: &SystemModel) -> Result<()> {
    if sys.n() < sys.l() {
        return Err(Error::Config(format!(
            "simulation needs n >= l, got n = {}, l = {}",
            sys.n(),
            sys.l()
        )));
    }
    Ok(())
}

/// Draws a full-rank channel and its detection plan, redrawing on rank
/// deficiency.
fn draw_channel<R: Rng>(
    sys: &SystemModel,
    link: &NakagamiLink,
    order: DetectionOrder,
    rng: &mut R,
    resampled: &mut u64,
) -> Result<(ChannelMatrix, ZfSicPlan)> {
    let mut h = ChannelMatrix::sample(sys.n() as usize, sys.l() as usize, link, rng);
    for _ in 0..MAX_RESAMPLES {
        match ZfSicPlan::new(&h, order) {
            Ok(plan) => return Ok((h, plan)),
            Err(Error::RankDeficient) => {
                *resampled += 1;
                h.resample(link, rng);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergence {
        func: "draw_channel",
        terms: MAX_RESAMPLES as usize,
        partial: f64::NAN,
    })
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Builds the curve from a tally whose last slot per point counts trials
/// with any stage failing.
fn finish(mc: &McConfig, mut total: Tally, overall: impl Fn(&[u64]) -> f64) -> SimRun {
    total.amp.pop();
    let points = mc
        .snr_grid_db
        .iter()
        .zip(&total.stage_hits)
        .map(|(&snr_db, hits)| {
            let (stages, any) = hits.split_at(hits.len() - 1);
            let (value, std_error) = proportion(any[0], mc.trials);
            SimPoint {
                snr_db,
                estimate: SimEstimate::from_counts(overall(stages), stages, mc.trials),
                any_stage: Proportion { value, std_error },
            }
        })
        .collect();
    SimRun {
        points,
        resampled: total.resampled,
        noise_amplification: total.amp.iter().map(|a| a / mc.trials as f64).collect(),
    }
}

/// Symbol error rate of ZF-SIC at every grid point. Stage `i` counts
/// errors on the stream detected `i`-th. The overall value is the error
/// fraction over all l·trials symbols; its standard error uses `trials`
/// as the sample size, which is conservative because the streams of one
/// trial are dependent.
pub fn estimate_ser(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    order: DetectionOrder,
    mc: &McConfig,
    exec: Execution,
) -> Result<SimRun> {
    mc.validate()?;
    check_sim_system(sys)?;
    let constellation = Constellation::from_modulation(modulation)?;
    let link = NakagamiLink::new(sys.m_n())?;
    let (n, l) = (sys.n() as usize, sys.l() as usize);
    let sigmas: Vec<f64> = mc
        .snr_grid_db
        .iter()
        .map(|db| 10f64.powf(-db / 20.0))
        .collect();
    let m = constellation.size();

    let run_batch = |b: u64| -> Result<Tally> {
        let mut rng = mc.rng(b);
        let mut t = Tally::new(sigmas.len(), l + 1);
        let mut sent = vec![0usize; l];
        let mut x = vec![Complex64::new(0.0, 0.0); l];
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..mc.batch_trials(b) {
            let (h, plan) = draw_channel(sys, &link, order, &mut rng, &mut t.resampled)?;
            for (s, xs) in sent.iter_mut().zip(&mut x) {
                *s = rng.random_range(0..m);
                *xs = constellation.point(*s);
            }
            for zi in &mut z {
                *zi = complex_normal(&mut rng);
            }
            let clean = h.apply(&x);
            for (a, g) in t.amp.iter_mut().zip(plan.gains()) {
                *a += 1.0 / g;
            }
            for (p, sigma) in sigmas.iter().enumerate() {
                for ((ri, ci), zi) in r.iter_mut().zip(&clean).zip(&z) {
                    *ri = ci + zi * sigma;
                }
                let got = plan.detect(&h, &r, &constellation);
                let mut any = false;
                for (stage, &stream) in plan.order().iter().enumerate() {
                    if got[stream] != sent[stream] {
                        t.stage_hits[p][stage] += 1;
                        any = true;
                    }
                }
                t.stage_hits[p][l] += u64::from(any);
            }
        }
        Ok(t)
    };

    let total = reduce(exec.map(mc.batches(), run_batch), sigmas.len(), l + 1)?;
    let symbols = (mc.trials * l as u64) as f64;
    Ok(finish(mc, total, |hits| {
        hits.iter().sum::<u64>() as f64 / symbols
    }))
}

/// Fraction of trials whose post-ZF SNR falls below `x_th` (linear), per
/// stage. The overall value is the fraction with at least one stage in
/// outage.
pub fn estimate_outage(
    sys: &SystemModel,
    order: DetectionOrder,
    mc: &McConfig,
    x_th: f64,
    exec: Execution,
) -> Result<SimRun> {
    mc.validate()?;
    check_sim_system(sys)?;
    if !(x_th >= 0.0) {
        return Err(Error::Config(format!(
            "outage threshold must be >= 0, got {x_th}"
        )));
    }
    let link = NakagamiLink::new(sys.m_n())?;
    let l = sys.l() as usize;
    let omegas: Vec<f64> = mc
        .snr_grid_db
        .iter()
        .map(|db| 10f64.powf(db / 10.0))
        .collect();

    let run_batch = |b: u64| -> Result<Tally> {
        let mut rng = mc.rng(b);
        let mut t = Tally::new(omegas.len(), l + 1);
        for _ in 0..mc.batch_trials(b) {
            let (_, plan) = draw_channel(sys, &link, order, &mut rng, &mut t.resampled)?;
            for (a, g) in t.amp.iter_mut().zip(plan.gains()) {
                *a += 1.0 / g;
            }
            for (p, om) in omegas.iter().enumerate() {
                let mut any = false;
                for (stage, g) in plan.gains().iter().enumerate() {
                    if om * g < x_th {
                        t.stage_hits[p][stage] += 1;
                        any = true;
                    }
                }
                t.stage_hits[p][l] += u64::from(any);
            }
        }
        Ok(t)
    };

    let total = reduce(exec.map(mc.batches(), run_batch), omegas.len(), l + 1)?;
    let mut run = finish(mc, total, |_| 0.0);
    for pt in &mut run.points {
        pt.estimate.value = pt.any_stage.value;
        pt.estimate.std_error = pt.any_stage.std_error;
    }
    Ok(run)
}

fn reduce(parts: Vec<Result<Tally>>, points: usize, stages: usize) -> Result<Tally> {
    parts
        .into_iter()
        .try_fold(Tally::new(points, stages), |acc, t| Ok(acc.merge(t?)))
}

/// Running first and second moments of a paired sample.
#[derive(Debug, Clone, Copy, Default)]
struct PairMoments {
    n: f64,
    mx: f64,
    my: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl PairMoments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        let dx = x - self.mx;
        let dy = y - self.my;
        self.mx += dx / self.n;
        self.my += dy / self.n;
        self.sxx += dx * (x - self.mx);
        self.syy += dy * (y - self.my);
        self.sxy += dx * (y - self.my);
    }

    fn merge(self, o: PairMoments) -> Self {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let dx = o.mx - self.mx;
        let dy = o.my - self.my;
        let w = self.n * o.n / n;
        Self {
            n,
            mx: self.mx + dx * o.n / n,
            my: self.my + dy * o.n / n,
            sxx: self.sxx + o.sxx + dx * dx * w,
            syy: self.syy + o.syy + dy * dy * w,
            sxy: self.sxy + o.sxy + dx * dy * w,
        }
    }

    fn correlation(&self) -> Result<f64> {
        let den = (self.sxx * self.syy).sqrt();
        if !(den > 0.0) {
            return Err(Error::domain("pearson", "a sample has zero variance"));
        }
        Ok((self.sxy / den).clamp(-1.0, 1.0))
    }
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain(
            "pearson",
            "needs two equal-length samples of size >= 2",
        ));
    }
    let mut m = PairMoments::default();
    for (&x, &y) in xs.iter().zip(ys) {
        m.push(x, y);
    }
    m.correlation()
}

/// Correlation between the stage-1 and stage-2 post-ZF SNRs under ordered
/// detection. Both scale with the same noise level, so the estimate does
/// not depend on the SNR grid.
pub fn estimate_rho(sys: &SystemModel, mc: &McConfig, exec: Execution) -> Result<f64> {
    mc.validate()?;
    check_sim_system(sys)?;
    if mc.trials < 10_000 {
        return Err(Error::Config(format!(
            "estimate_rho needs >= 10000 trials, got {}",
            mc.trials
        )));
    }
    if sys.l() < 2 {
        return Err(Error::Config(
            "estimate_rho needs at least two streams".into(),
        ));
    }
    let link = NakagamiLink::new(sys.m_n())?;
    let run_batch = |b: u64| -> Result<PairMoments> {
        let mut rng = mc.rng(b);
        let mut m = PairMoments::default();
        let mut resampled = 0;
        for _ in 0..mc.batch_trials(b) {
            let (_, plan) = draw_channel(
                sys,
                &link,
                DetectionOrder::Ordered,
                &mut rng,
                &mut resampled,
            )?;
            m.push(plan.gains()[0], plan.gains()[1]);
        }
        Ok(m)
    };
    exec.map(mc.batches(), run_batch)
        .into_iter()
        .try_fold(PairMoments::default(), |acc, m| {
            Ok::<_, Error>(acc.merge(m?))
        })?
        .correlation()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(trials: u64, grid: &[f64]) -> McConfig {
        McConfig::new(trials, 11, grid.to_vec()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1, vec![0.0]).is_err());
        assert!(McConfig::new(1, 1, vec![]).is_err());
        assert!(McConfig::new(1, 1, vec![f64::NAN]).is_err());
        let mut c = cfg(10, &[0.0]);
        c.batch_size = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn batch_split_covers_trials() {
        let mut c = cfg(10, &[0.0]);
        c.batch_size = 4;
        assert_eq!(c.batches(), 3);
        let n: u64 = (0..c.batches()).map(|b| c.batch_trials(b)).sum();
        assert_eq!(n, 10);
    }

    #[test]
    fn noiseless_limit_has_no_errors() {
        let sys = SystemModel::two_by(2, 1.0, 1.0).unwrap();
        let run = estimate_ser(
            &sys,
            &ModulationScheme::bpsk(),
            DetectionOrder::Ordered,
            &cfg(5000, &[200.0]),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(run.points[0].estimate.value, 0.0);
    }

    #[test]
    fn outage_limits() {
        let sys = SystemModel::two_by(2, 1.0, 1.0).unwrap();
        let c = cfg(2000, &[10.0]);
        let zero = estimate_outage(
            &sys,
            DetectionOrder::Ordered,
            &c,
            0.0,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(zero.points[0].estimate.value, 0.0);
        let huge = estimate_outage(
            &sys,
            DetectionOrder::Ordered,
            &c,
            1e300,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(huge.points[0].estimate.value, 1.0);
        assert!(huge.points[0]
            .estimate
            .per_stage
            .iter()
            .all(|s| s.value == 1.0));
    }

    #[test]
    fn pearson_null_and_perfect() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert!(pearson(&xs, &xs[..5]).is_err());
    }

    #[test]
    fn moment_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).cos()).collect();
        let ys: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin() + xs[i]).collect();
        let (mut a, mut b) = (PairMoments::default(), PairMoments::default());
        for i in 0..50 {
            if i < 17 {
                a.push(xs[i], ys[i])
            } else {
                b.push(xs[i], ys[i])
            }
        }
        let merged = a.merge(b).correlation().unwrap();
        assert!((merged - pearson(&xs, &ys).unwrap()).abs() < 1e-13);
    }
}

//! Zero-forcing successive interference cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::error_rate::ModulationScheme;

use super::channel::ChannelMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative pivot size below which a Gram matrix counts as singular.
const RANK_TOL: f64 = 1e-10;

/// Unit-energy constellation used by the simulator: BPSK or square QAM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    /// Points per axis; 0 marks BPSK.
    side: u32,
    /// Half the spacing between adjacent levels.
    step: f64,
}

impl Constellation {
    /// Only coherent BPSK and square QAM have a constellation the
    /// simulator can slice; other schemes are rejected.
    pub fn from_modulation(modulation: &ModulationScheme) -> Result<Self> {
        match modulation.name() {
            "bpsk" => Ok(Self { side: 0, step: 1.0 }),
            "qam" => {
                let mf = modulation.order() as f64;
                Ok(Self {
                    side: mf.sqrt().round() as u32,
                    step: (1.5 / (mf - 1.0)).sqrt(),
                })
            }
            _ => Err(Error::Config(format!(
                "simulation supports bpsk and qam:M only, not {modulation}"
            ))),
        }
    }

    pub fn size(&self) -> usize {
        if self.side == 0 {
            2
        } else {
            (self.side * self.side) as usize
        }
    }

    fn level(&self, i: u32) -> f64 {
        (2.0 * i as f64 - (self.side as f64 - 1.0)) * self.step
    }

    fn slice_axis(&self, v: f64) -> u32 {
        let i = ((v / self.step + self.side as f64 - 1.0) / 2.0).round();
        i.clamp(0.0, self.side as f64 - 1.0) as u32
    }

    pub fn point(&self, index: usize) -> Complex64 {
        if self.side == 0 {
            return Complex64::new(if index == 0 { -1.0 } else { 1.0 }, 0.0);
        }
        let i = index as u32;
        Complex64::new(self.level(i / self.side), self.level(i % self.side))
    }

    /// Index of the nearest point.
    pub fn slice(&self, y: Complex64) -> usize {
        if self.side == 0 {
            return usize::from(y.re >= 0.0);
        }
        (self.slice_axis(y.re) * self.side + self.slice_axis(y.im)) as usize
    }
}

/// Stream detection order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectionOrder {
    /// Highest post-processing SNR first at every stage.
    Ordered,
    /// Streams in index order.
    Unordered,
}

impl DetectionOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetectionOrder::Ordered => "ordered",
            DetectionOrder::Unordered => "unordered",
        }
    }
}

/// Inverse of a Hermitian positive definite matrix (row-major, k×k) by
/// Gauss–Jordan elimination with partial pivoting.
fn invert_gram(mut a: Vec<Complex64>, k: usize) -> Result<Vec<Complex64>> {
    let scale = (0..k).map(|i| a[i * k + i].re).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::RankDeficient);
    }
    let mut inv = vec![ZERO; k * k];
    for i in 0..k {
        inv[i * k + i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&x, &y| a[x * k + col].norm().total_cmp(&a[y * k + col].norm()))
            .unwrap_or(col);
        if a[piv * k + col].norm() <= RANK_TOL * scale {
            return Err(Error::RankDeficient);
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let p = a[col * k + col].inv();
        for j in 0..k {
            a[col * k + j] *= p;
            inv[col * k + j] *= p;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = a[row * k + col];
            if f == ZERO {
                continue;
            }
            for j in 0..k {
                let (aj, ij) = (a[col * k + j], inv[col * k + j]);
                a[row * k + j] -= f * aj;
                inv[row * k + j] -= f * ij;
            }
        }
    }
    Ok(inv)
}

/// Detection order, nulling vectors and noise gains for one channel
/// realization. None of these depend on the noise level, so a plan is
/// reused across an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfSicPlan {
    order: Vec<usize>,
    filters: Vec<Vec<Complex64>>,
    gains: Vec<f64>,
}

impl ZfSicPlan {
    pub fn new(h: &ChannelMatrix, order: DetectionOrder) -> Result<Self> {
        let (n, l) = (h.rows(), h.cols());
        if n < l {
            return Err(Error::domain(
                "ZfSicPlan",
                format!("needs rows >= cols, got {n}x{l}"),
            ));
        }
        let mut remaining: Vec<usize> = (0..l).collect();
        let mut plan = Self {
            order: Vec::with_capacity(l),
            filters: Vec::with_capacity(l),
            gains: Vec::with_capacity(l),
        };
        while !remaining.is_empty() {
            let k = remaining.len();
            let mut gram = vec![ZERO; k * k];
            for (a, &ca) in remaining.iter().enumerate() {
                for (b, &cb) in remaining.iter().enumerate().skip(a) {
                    let g: Complex64 = h
                        .column(ca)
                        .iter()
                        .zip(h.column(cb))
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    gram[a * k + b] = g;
                    gram[b * k + a] = g.conj();
                }
            }
            let inv = invert_gram(gram, k)?;
            let pick = match order {
                DetectionOrder::Ordered => (0..k)
                    .min_by(|&x, &y| inv[x * k + x].re.total_cmp(&inv[y * k + y].re))
                    .unwrap_or(0),
                DetectionOrder::Unordered => 0,
            };
            let amp = inv[pick * k + pick].re;
            if !(amp > 0.0) {
                return Err(Error::RankDeficient);
            }
            let mut w = vec![ZERO; n];
            for (j, &cj) in remaining.iter().enumerate() {
                let g = inv[pick * k + j];
                for (wt, hv) in w.iter_mut().zip(h.column(cj)) {
                    *wt += g * hv.conj();
                }
            }
            plan.order.push(remaining.remove(pick));
            plan.filters.push(w);
            plan.gains.push(1.0 / amp);
        }
        Ok(plan)
    }

    /// Stream index detected at each stage.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Post-processing SNR per stage at unit noise variance, 1/[G⁻¹]_kk.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Runs the cancellation loop on `r`, subtracting each *detected*
    /// symbol. Returns detected symbol indices by stream.
    pub fn detect(
        &self,
        h: &ChannelMatrix,
        r: &[Complex64],
        constellation: &Constellation,
    ) -> Vec<usize> {
        let mut residual = r.to_vec();
        let mut out = vec![0; self.order.len()];
        for (&stream, w) in self.order.iter().zip(&self.filters) {
            let y: Complex64 = w.iter().zip(&residual).map(|(a, b)| a * b).sum();
            let idx = constellation.slice(y);
            let s = constellation.point(idx);
            for (res, hv) in residual.iter_mut().zip(h.column(stream)) {
                *res -= hv * s;
            }
            out[stream] = idx;
        }
        out
    }
}

/// Result of detecting one received vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Detected constellation index for each stream.
    pub symbols: Vec<usize>,
    /// Stream detected at each stage.
    pub order: Vec<usize>,
    /// Post-ZF SNR at each stage.
    pub post_snr: Vec<f64>,
}

/// Detects `r = H s + w` with ZF-SIC. `noise_var` only sets the reported
/// post-processing SNRs (infinite when it is zero).
pub fn zf_sic_detect(
    h: &ChannelMatrix,
    r: &[Complex64],
    noise_var: f64,
    constellation: &Constellation,
    order: DetectionOrder,
) -> Result<Detection> {
    if !(noise_var >= 0.0) {
        return Err(Error::domain(
            "zf_sic_detect",
            format!("noise variance must be >= 0, got {noise_var}"),
        ));
    }
    if r.len() != h.rows() {
        return Err(Error::domain(
            "zf_sic_detect",
            "received vector length differs from row count",
        ));
    }
    let plan = ZfSicPlan::new(h, order)?;
    Ok(Detection {
        symbols: plan.detect(h, r, constellation),
        post_snr: plan.gains.iter().map(|g| g / noise_var).collect(),
        order: plan.order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qam_slicing_round_trips() {
        for m in [4, 16, 64] {
            let q = Constellation::from_modulation(&ModulationScheme::qam(m).unwrap()).unwrap();
            let energy: f64 =
                (0..q.size()).map(|i| q.point(i).norm_sqr()).sum::<f64>() / q.size() as f64;
            assert!((energy - 1.0).abs() < 1e-12);
            for i in 0..q.size() {
                assert_eq!(q.slice(q.point(i) + c(0.4 * q.step, -0.4 * q.step)), i);
            }
        }
        assert!(Constellation::from_modulation(&ModulationScheme::dpsk()).is_err());
    }

    #[test]
    fn orthogonal_noiseless_picks_strong_column() {
        let h = ChannelMatrix::from_columns(&[
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 1.0)],
        ])
        .unwrap();
        let q = Constellation::from_modulation(&ModulationScheme::qam(4).unwrap()).unwrap();
        let s = [q.point(2), q.point(1)];
        let r = h.apply(&s);
        let d = zf_sic_detect(&h, &r, 0.0, &q, DetectionOrder::Ordered).unwrap();
        assert_eq!(d.order, vec![0, 1]);
        assert_eq!(d.symbols, vec![2, 1]);
        assert!(d.post_snr.iter().all(|x| x.is_infinite()));
    }

    #[test]
    fn single_stream_is_matched_filter() {
        let h =
            ChannelMatrix::from_columns(&[vec![c(1.0, 1.0), c(0.5, -2.0), c(0.0, 0.3)]]).unwrap();
        let plan = ZfSicPlan::new(&h, DetectionOrder::Ordered).unwrap();
        let norm: f64 = h.column(0).iter().map(|x| x.norm_sqr()).sum();
        assert!((plan.gains()[0] - norm).abs() < 1e-12);
        let b = Constellation::from_modulation(&ModulationScheme::bpsk()).unwrap();
        let r: Vec<_> = h.column(0).iter().map(|x| -x + c(0.3, -0.2)).collect();
        assert_eq!(plan.detect(&h, &r, &b), vec![0]);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let col = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let h = ChannelMatrix::from_columns(&[col.clone(), col]).unwrap();
        assert_eq!(
            ZfSicPlan::new(&h, DetectionOrder::Ordered),
            Err(Error::RankDeficient)
        );
    }
}

//! Nakagami-m link gains and the n×l channel matrix.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// One flat-fading link: power |h|² ~ Gamma(m_N, 1/m_N) (unit mean), phase
/// uniform on [0, 2π).
#[derive(Debug, Clone, Copy)]
pub struct NakagamiLink {
    m_n: f64,
    power: Gamma<f64>,
}

impl NakagamiLink {
    pub fn new(m_n: f64) -> Result<Self> {
        if !(m_n >= 0.5) || !m_n.is_finite() {
            return Err(Error::domain(
                "NakagamiLink",
                format!("m_N must be >= 0.5, got {m_n}"),
            ));
        }
        let power =
            Gamma::new(m_n, 1.0 / m_n).map_err(|e| Error::domain("NakagamiLink", e.to_string()))?;
        Ok(Self { m_n, power })
    }

    pub fn m_n(&self) -> f64 {
        self.m_n
    }

    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng)
    }

    /// Complex gain √P·e^{jφ}.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let p = self.sample_power(rng);
        let phi = rng.random::<f64>() * TAU;
        Complex64::from_polar(p.sqrt(), phi)
    }
}

/// `count` unit-mean Gamma(m_N) power gains.
pub fn sample_nakagami_power<R: Rng + ?Sized>(
    m_n: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let link = NakagamiLink::new(m_n)?;
    Ok((0..count).map(|_| link.sample_power(rng)).collect())
}

/// Dense complex matrix, column-major; rows are receive antennas and
/// columns transmit streams.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Builds from column-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::domain(
                "ChannelMatrix",
                format!("{} entries do not fill a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::domain("ChannelMatrix", "columns differ in length"));
        }
        Self::new(rows, columns.len(), columns.concat())
    }

    /// i.i.d. Nakagami entries, filled column by column.
    pub fn sample<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        link: &NakagamiLink,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols).map(|_| link.sample_gain(rng)).collect();
        Self { rows, cols, data }
    }

    /// Redraws every entry in place.
    pub fn resample<R: Rng + ?Sized>(&mut self, link: &NakagamiLink, rng: &mut R) {
        for h in &mut self.data {
            *h = link.sample_gain(rng);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    /// H·x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (j, xj) in x.iter().enumerate().take(self.cols) {
            for (o, h) in out.iter_mut().zip(self.column(j)) {
                *o += h * xj;
            }
        }
        out
    }
}

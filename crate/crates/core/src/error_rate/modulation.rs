use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::{erfc, ln_gamma_unchecked, reg_upper_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    /// CEP Γ(β, αx) / (2Γ(β)).
    Binary,
    /// CEP α·erfc(√(βx)), a high-SNR approximation.
    RectangularMary,
}

/// A modulation described by its conditional-error-probability constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationScheme {
    kind: ModulationKind,
    alpha: f64,
    beta: f64,
    order: u32,
    name: &'static str,
}

impl ModulationScheme {
    pub fn binary(alpha: f64, beta: f64) -> Result<Self> {
        Self::custom(ModulationKind::Binary, alpha, beta, 2, "binary")
    }

    pub fn mary(alpha: f64, beta: f64, order: u32) -> Result<Self> {
        Self::custom(ModulationKind::RectangularMary, alpha, beta, order, "mary")
    }

    fn custom(
        kind: ModulationKind,
        alpha: f64,
        beta: f64,
        order: u32,
        name: &'static str,
    ) -> Result<Self> {
        if !(alpha > 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::domain(
                "ModulationScheme",
                format!("alpha and beta must be positive, got ({alpha}, {beta})"),
            ));
        }
        if order < 2 {
            return Err(Error::domain(
                "ModulationScheme",
                format!("order must be >= 2, got {order}"),
            ));
        }
        Ok(Self {
            kind,
            alpha,
            beta,
            order,
            name,
        })
    }

    pub fn bpsk() -> Self {
        Self {
            kind: ModulationKind::Binary,
            alpha: 1.0,
            beta: 0.5,
            order: 2,
            name: "bpsk",
        }
    }

    /// Coherent binary FSK.
    pub fn bfsk() -> Self {
        Self {
            kind: ModulationKind::Binary,
            alpha: 0.5,
            beta: 0.5,
            order: 2,
            name: "bfsk",
        }
    }

    /// Differentially detected binary PSK.
    pub fn dpsk() -> Self {
        Self {
            kind: ModulationKind::Binary,
            alpha: 1.0,
            beta: 1.0,
            order: 2,
            name: "dpsk",
        }
    }

    /// Square M-QAM: α = 2(1 − 1/√M), β = 3/(2(M − 1)).
    pub fn qam(order: u32) -> Result<Self> {
        let side = (order as f64).sqrt().round() as u32;
        if order < 4 || side * side != order || !side.is_power_of_two() {
            return Err(Error::domain(
                "qam",
                format!("order must be a power of 4 and at least 4, got {order}"),
            ));
        }
        let mf = order as f64;
        Ok(Self {
            kind: ModulationKind::RectangularMary,
            alpha: 2.0 * (1.0 - 1.0 / mf.sqrt()),
            beta: 1.5 / (mf - 1.0),
            order,
            name: "qam",
        })
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Constellation size (2 for binary schemes).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Short scheme name: bpsk, bfsk, dpsk, qam, binary or mary.
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn is_binary(&self) -> bool {
        self.kind == ModulationKind::Binary
    }

    /// Writes the CEP as `scale · Q(b, a·x)` with Q the regularized upper
    /// incomplete gamma; returns (a, b, scale).
    pub(crate) fn q_form(&self) -> (f64, f64, f64) {
        match self.kind {
            ModulationKind::Binary => (self.alpha, self.beta, 0.5),
            ModulationKind::RectangularMary => (self.beta, 0.5, self.alpha),
        }
    }

    /// Conditional error probability at instantaneous SNR x.
    pub fn cep(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("cep", format!("requires x >= 0, got {x}")));
        }
        Ok(match self.kind {
            ModulationKind::Binary => 0.5 * reg_upper_unchecked(self.beta, self.alpha * x),
            ModulationKind::RectangularMary => self.alpha * erfc((self.beta * x).sqrt()),
        })
    }

    /// −d CEP/dx, the density that turns a CDF into an ASER by parts.
    pub(crate) fn neg_cep_derivative(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return if self.q_form().1 < 1.0 {
                f64::INFINITY
            } else {
                0.0
            };
        }
        let (a, b, scale) = self.q_form();
        scale * (b * a.ln() + (b - 1.0) * x.ln() - a * x - ln_gamma_unchecked(b)).exp()
    }

    /// Gray-mapping approximation P_b ≈ P_s / log₂M.
    pub fn ber_from_ser(&self, ser: f64) -> f64 {
        ser / (self.order as f64).log2()
    }
}

/// Binary-scheme CEP; rejects M-ary schemes.
pub fn cep_binary(x: f64, modulation: &ModulationScheme) -> Result<f64> {
    if !modulation.is_binary() {
        return Err(Error::domain("cep_binary", "scheme is not binary"));
    }
    modulation.cep(x)
}

/// M-ary CEP; rejects binary schemes.
pub fn cep_mary(x: f64, modulation: &ModulationScheme) -> Result<f64> {
    if modulation.is_binary() {
        return Err(Error::domain("cep_mary", "scheme is binary"));
    }
    modulation.cep(x)
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name {
            "qam" => write!(f, "qam:{}", self.order),
            "binary" | "mary" => {
                write!(f, "{}(alpha={},beta={})", self.name, self.alpha, self.beta)
            }
            name => f.write_str(name),
        }
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bpsk" => Ok(Self::bpsk()),
            "bfsk" => Ok(Self::bfsk()),
            "dpsk" => Ok(Self::dpsk()),
            other => match other.strip_prefix("qam:") {
                Some(m) => {
                    let order = m
                        .parse::<u32>()
                        .map_err(|_| Error::Config(format!("bad QAM order in '{s}'")))?;
                    Self::qam(order).map_err(|e| Error::Config(e.to_string()))
                }
                None => Err(Error::Config(format!(
                    "unknown modulation '{s}' (expected bpsk, dpsk, bfsk or qam:M)"
                ))),
            },
        }
    }
}

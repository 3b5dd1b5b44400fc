//! Adaptive quadrature used to cross-check every closed form.

mod quadrature;

pub use quadrature::{
    integrate_finite, integrate_half_line, integrate_segments, integrate_semi_infinite,
    integrate_semi_infinite_scaled, QuadratureControl,
};

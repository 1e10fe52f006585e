//! Diagonal Green's function of `-d^2 + q + kappa^2` on the line for periodic `q`,
//! the renormalized quantity `alpha`, and the algebraic identities of `g`.

mod floquet;
mod nullspace;

pub use floquet::{
    floquet_pair, floquet_pair_with, monodromy, monodromy_with, FloquetPair, HillOptions,
    Monodromy,
};
pub use nullspace::diagonal_green_nullspace;

use crate::error::{Error, Result};
use crate::spectral::{r0_apply, Field};

/// Invariants this module guarantees; the verify suite runs one check per name.
pub const INVARIANTS: &[&str] = &[
    "monodromy-determinant",
    "wronskian",
    "green-ode",
    "product-identity",
    "potential-recovery",
    "antiderivative",
    "method-agreement",
    "commutativity",
    "alpha-zero",
    "alpha-bounds",
    "translation-covariance",
    "large-kappa-limit",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GreenMethod {
    Floquet,
    Nullspace,
}

impl GreenMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Floquet => "floquet",
            Self::Nullspace => "nullspace",
        }
    }
}

impl std::str::FromStr for GreenMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floquet" => Ok(Self::Floquet),
            "nullspace" => Ok(Self::Nullspace),
            other => Err(Error::InvalidInput(format!("unknown Green's method '{other}'"))),
        }
    }
}

/// `g(x; kappa, q)` sampled on the grid of `q`. Always positive.
#[derive(Clone, Debug)]
pub struct GreenDiag {
    pub g: Field,
    pub kappa: f64,
    pub method: GreenMethod,
}

/// Line Green's function on the diagonal: `g = psi_+ psi_-` with unit Wronskian.
pub fn diagonal_green(q: &Field, kappa: f64) -> Result<GreenDiag> {
    diagonal_green_with(q, kappa, HillOptions::for_problem(q.grid(), kappa))
}

pub fn diagonal_green_with(q: &Field, kappa: f64, opts: HillOptions) -> Result<GreenDiag> {
    let pair = floquet_pair_with(q, kappa, opts)?;
    Ok(GreenDiag {
        g: pair.product()?,
        kappa,
        method: GreenMethod::Floquet,
    })
}

/// Per-period `alpha = integral of {kappa - 1/(2g) + 2 kappa [R0(2 kappa) q]}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaValue {
    pub value: f64,
    pub kappa: f64,
    /// Always true: the density is integrated over one period.
    pub per_period: bool,
}

pub fn alpha(q: &Field, kappa: f64) -> Result<AlphaValue> {
    let gd = diagonal_green(q, kappa)?;
    alpha_from_green(q, &gd)
}

pub fn alpha_with(q: &Field, kappa: f64, opts: HillOptions) -> Result<AlphaValue> {
    let gd = diagonal_green_with(q, kappa, opts)?;
    alpha_from_green(q, &gd)
}

pub fn alpha_from_green(q: &Field, gd: &GreenDiag) -> Result<AlphaValue> {
    let kappa = gd.kappa;
    check_positive(&gd.g)?;
    let smooth = r0_apply(q, 2.0 * kappa)?;
    let density = gd
        .g
        .zip_with(&smooth, |g, r| kappa - 0.5 / g + 2.0 * kappa * r)?;
    Ok(AlphaValue {
        value: density.integral(),
        kappa,
        per_period: true,
    })
}

fn check_positive(g: &Field) -> Result<()> {
    if let Some(j) = g.samples().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Domain(format!(
            "Green's function is not positive at node {j}: {}",
            g.samples()[j]
        )));
    }
    Ok(())
}

/// `q = [g'/(2g)]' + [g'/(2g)]^2 + 1/(4 g^2) - kappa^2`.
pub fn recover_potential(gd: &GreenDiag) -> Result<Field> {
    check_positive(&gd.g)?;
    let g = &gd.g;
    let w = g.derivative(1).zip_with(g, |d, v| d / (2.0 * v))?;
    let k2 = gd.kappa * gd.kappa;
    let rest = w.zip_with(g, |w, v| w * w + 0.25 / (v * v) - k2)?;
    w.derivative(1).add(&rest)
}

/// `F = (1/g) {(g')^2 / 4 - kappa^2 (g - 1/(2 kappa))^2}`, whose derivative is `q g'`.
pub fn antiderivative_f(gd: &GreenDiag) -> Result<Field> {
    check_positive(&gd.g)?;
    let k = gd.kappa;
    gd.g
        .derivative(1)
        .zip_with(&gd.g, |d, v| (0.25 * d * d - k * k * (v - 0.5 / k).powi(2)) / v)
}

/// Per-period `integral of g(x; varkappa, q) g'(x; kappa, q)`.
pub fn commutativity_integral(q: &Field, kappa: f64, varkappa: f64) -> Result<f64> {
    let gk = diagonal_green(q, kappa)?;
    let gv = if varkappa == kappa {
        gk.clone()
    } else {
        diagonal_green(q, varkappa)?
    };
    gv.g.inner(&gk.g.derivative(1))
}

/// Pointwise `g g'' - (g')^2 / 2 - 2 (q + kappa^2) g^2`, identically `-1/2` for the true `g`.
pub fn product_identity_density(q: &Field, g: &Field, kappa: f64) -> Result<Field> {
    let d1 = g.derivative(1);
    let d2 = g.derivative(2);
    let k2 = kappa * kappa;
    let a = g.mul(&d2)?;
    let b = d1.mul(&d1)?;
    let c = q.zip_with(g, |qv, gv| 2.0 * (qv + k2) * gv * gv)?;
    a.linear_combination(1.0, &b, -0.5)?.sub(&c)
}

/// `max_x |g g'' - (g')^2/2 - 2(q + kappa^2) g^2 + 1/2|`.
pub fn product_identity_residual(q: &Field, gd: &GreenDiag) -> Result<f64> {
    let d = product_identity_density(q, &gd.g, gd.kappa)?;
    Ok(d.samples().iter().fold(0.0f64, |m, v| m.max((v + 0.5).abs())))
}

/// `||g''' - 2 q g' - 2 (q g)' - 4 kappa^2 g'||_2 / (kappa^2 ||g||_2)`.
pub fn green_ode_residual(q: &Field, gd: &GreenDiag) -> Result<f64> {
    let g = &gd.g;
    let dg = g.derivative(1);
    let k2 = gd.kappa * gd.kappa;
    let r = g
        .derivative(3)
        .linear_combination(1.0, &q.mul(&dg)?, -2.0)?
        .linear_combination(1.0, &q.mul(g)?.derivative(1), -2.0)?
        .linear_combination(1.0, &dg, -4.0 * k2)?;
    Ok(r.l2_norm() / (k2 * g.l2_norm()))
}

#[cfg(test)]
mod tests;

//! Jacobi `cn` and complete integrals `K`, `E` by the arithmetic-geometric mean.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_LEVELS: usize = 40;

struct Agm {
    a: Vec<f64>,
    c: Vec<f64>,
}

fn agm(k: f64) -> Agm {
    let mut a = vec![1.0];
    let mut b = (1.0 - k * k).sqrt();
    let mut c = vec![k];
    while c.last().copied().unwrap_or(0.0).abs() > f64::EPSILON && a.len() < MAX_LEVELS {
        let an = *a.last().expect("non-empty");
        let next = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next);
    }
    Agm { a, c }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(k.is_finite() && (0.0..1.0).contains(&k)) {
        return Err(Error::Parameter(format!("elliptic modulus must lie in [0, 1), got {k}")));
    }
    Ok(())
}

/// Complete elliptic integrals `(K(k), E(k))`.
pub fn complete_integrals(k: f64) -> Result<(f64, f64)> {
    check_modulus(k)?;
    let g = agm(k);
    let big_k = PI / (2.0 * g.a.last().expect("non-empty"));
    let mut s = 0.0;
    let mut w = 0.5;
    for c in &g.c {
        s += w * c * c;
        w *= 2.0;
    }
    Ok((big_k, big_k * (1.0 - s)))
}

/// `cn(u; k)` by descending Landen transformation.
pub fn jacobi_cn(u: f64, k: f64) -> Result<f64> {
    check_modulus(k)?;
    if !u.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite argument {u}")));
    }
    let g = agm(k);
    let last = g.a.len() - 1;
    let mut phi = 2f64.powi(last as i32) * g.a[last] * u;
    for n in (1..=last).rev() {
        phi = 0.5 * (phi + (g.c[n] / g.a[n] * phi.sin()).asin());
    }
    Ok(phi.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_modulus() {
        let (k, e) = complete_integrals(0.0).unwrap();
        assert!((k - PI / 2.0).abs() < 1e-15 && (e - PI / 2.0).abs() < 1e-15);
        for u in [0.0, 0.3, 1.7, -2.2, 10.0] {
            assert!((jacobi_cn(u, 0.0).unwrap() - u.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_values() {
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi)), E = pi^{3/2} / Gamma(1/4)^2 + K / 2.
        let gamma_quarter: f64 = 3.625_609_908_221_908_3;
        let k_ref = gamma_quarter.powi(2) / (4.0 * PI.sqrt());
        let e_ref = PI.powf(1.5) / gamma_quarter.powi(2) + 0.5 * k_ref;
        let (k, e) = complete_integrals(0.5f64.sqrt()).unwrap();
        assert!((k - k_ref).abs() < 1e-14);
        assert!((e - e_ref).abs() < 1e-14);
    }

    #[test]
    fn cn_periodicity_and_special_points() {
        let m = 0.8;
        let (big_k, _) = complete_integrals(m).unwrap();
        assert!(jacobi_cn(big_k, m).unwrap().abs() < 1e-14);
        assert!((jacobi_cn(2.0 * big_k, m).unwrap() + 1.0).abs() < 1e-14);
        for u in [0.1, 0.9, 2.3] {
            let a = jacobi_cn(u, m).unwrap();
            assert!((jacobi_cn(u + 4.0 * big_k, m).unwrap() - a).abs() < 1e-12);
            assert!((jacobi_cn(-u, m).unwrap() - a).abs() < 1e-15);
        }
    }

    #[test]
    fn cn_solves_its_ode() {
        // (cn')^2 = (1 - cn^2)(1 - k^2 + k^2 cn^2), checked by central differences.
        let m: f64 = 0.6;
        let h = 1e-5;
        for u in [0.2, 0.7, 1.5] {
            let d = (jacobi_cn(u + h, m).unwrap() - jacobi_cn(u - h, m).unwrap()) / (2.0 * h);
            let c = jacobi_cn(u, m).unwrap();
            let rhs = (1.0 - c * c) * (1.0 - m * m + m * m * c * c);
            assert!((d * d - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_modulus_one() {
        assert!(jacobi_cn(0.1, 1.0).is_err());
        assert!(complete_integrals(-0.1).is_err());
    }
}

use nalgebra::DMatrix;

use super::{product_identity_density, GreenDiag, GreenMethod};
use crate::error::{Error, Result};
use crate::spectral::Field;

/// Relative size of the second-smallest singular value below which the kernel counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-6;

/// `L3 f = f''' - 2 q f' - 2 (q f)' - 4 kappa^2 f'`, plus `scale` times the projection
/// onto the Nyquist mode, which odd derivatives annihilate on the grid.
fn apply_l3(q: &Field, f: &Field, kappa: f64) -> Result<Field> {
    let df = f.derivative(1);
    let qf = q.mul(f)?;
    let n = f.len();
    let k_max = std::f64::consts::PI * n as f64 / f.grid().period();
    let nyquist = f
        .samples()
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
        .sum::<f64>()
        / n as f64;
    let scale = k_max.powi(3) + 4.0 * kappa * kappa * k_max;
    let alt = Field::from_samples(
        f.grid(),
        (0..n).map(|j| if j % 2 == 0 { scale * nyquist } else { -scale * nyquist }).collect(),
    )?;
    f.derivative(3)
        .add(&alt)?
        .linear_combination(1.0, &q.mul(&df)?, -2.0)?
        .linear_combination(1.0, &qf.derivative(1), -2.0)?
        .linear_combination(1.0, &df, -4.0 * kappa * kappa)
}

/// Periodic kernel of `L3` from the smallest singular direction of its dense spectral matrix,
/// scaled so that `g g'' - (g')^2 / 2 - 2 (q + kappa^2) g^2 = -1/2` on average.
pub fn diagonal_green_nullspace(q: &Field, kappa: f64) -> Result<GreenDiag> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    let grid = q.grid();
    let n = grid.n();
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply_l3(q, &Field::from_samples(grid, e)?, kappa)?;
        mat.set_column(j, &nalgebra::DVector::from_column_slice(col.samples()));
    }
    let svd = mat.svd(false, true);
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).expect("finite singular values"));
    let (smallest, second, largest) = (sv[order[0]], sv[order[1]], sv[order[n - 1]]);
    if second < DEGENERACY_TOL * largest {
        return Err(Error::DegenerateKernel { smallest, second });
    }
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut v: Vec<f64> = v_t.row(order[0]).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    let vf = Field::from_samples(grid, v)?;
    let density = product_identity_density(q, &vf, kappa)?;
    let mean = density.mean();
    if !(mean < 0.0) {
        return Err(Error::Consistency(format!(
            "kernel vector gives non-negative first integral {mean}"
        )));
    }
    let g = vf.scale((-0.5 / mean).sqrt());
    if g.min() <= 0.0 {
        return Err(Error::Consistency("nullspace Green's function is not positive".into()));
    }
    Ok(GreenDiag {
        g,
        kappa,
        method: GreenMethod::Nullspace,
    })
}

use crate::elliptic::Lattice;
use crate::error::{Error, Result};

use super::hk_traveling_wave;

/// Remainders of the large-`kappa` expansions at one `kappa`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticsRow {
    pub kappa: f64,
    pub b: f64,
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
    /// `c1 - 1/(2 kappa)`.
    pub c1_err: f64,
    /// `c2 + 1/(4 kappa^3)`.
    pub c2_err: f64,
    /// `nu - 6 e1`.
    pub nu_err: f64,
    /// `b - 1/kappa`.
    pub b_err: f64,
}

impl AsymptoticsRow {
    pub const NAMES: [&'static str; 4] = ["c1", "c2", "nu", "b"];

    pub fn remainders(&self) -> [f64; 4] {
        [self.c1_err, self.c2_err, self.nu_err, self.b_err]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsTable {
    pub rows: Vec<AsymptoticsRow>,
}

impl AsymptoticsTable {
    /// Per remainder, whether `|remainder|` strictly decreases along the rows.
    pub fn decreasing(&self) -> [bool; 4] {
        std::array::from_fn(|i| {
            self.rows
                .windows(2)
                .all(|w| w[1].remainders()[i].abs() < w[0].remainders()[i].abs())
        })
    }

    /// Observed decay exponents `p` in `|remainder| ~ kappa^{-p}` between consecutive rows.
    pub fn observed_exponents(&self) -> Vec<[f64; 4]> {
        self.rows
            .windows(2)
            .map(|w| {
                let ratio = (w[1].kappa / w[0].kappa).ln();
                std::array::from_fn(|i| {
                    -(w[1].remainders()[i].abs() / w[0].remainders()[i].abs()).ln() / ratio
                })
            })
            .collect()
    }
}

/// Remainders for each `kappa`, which must be increasing.
pub fn asymptotics_table(lat: &Lattice, kappas: &[f64]) -> Result<AsymptoticsTable> {
    if kappas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("kappa values must increase".into()));
    }
    let rows = kappas
        .iter()
        .map(|&kappa| {
            let wave = hk_traveling_wave(lat, kappa)?;
            Ok(AsymptoticsRow {
                kappa,
                b: wave.b.b,
                nu: wave.nu,
                c1: wave.c1,
                c2: wave.c2,
                c1_err: wave.c1 - 0.5 / kappa,
                c2_err: wave.c2 + 0.25 / kappa.powi(3),
                nu_err: wave.nu - 6.0 * lat.e1(),
                b_err: wave.b.b - 1.0 / kappa,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticsTable { rows })
}

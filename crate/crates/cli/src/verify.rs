//! The verify suite: one numerical check per invariant the core crate declares.
//!
//! Each check returns a nonnegative residual compared against a tolerance; the tolerance
//! comes from `verify.tolerance`, then `tol.<name>`, then the default listed here.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kdv_core::cnoidal::{asymptotics_table, hk_traveling_wave, FloquetClosedForm};
use kdv_core::elliptic::solve_b;
use kdv_core::flows::{
    commute_check, evolve, momentum, rhs_hk, Background, FlowKind, FlowSpec, Stepper,
};
use kdv_core::io::{fmt_g17, Provenance, TableWriter};
use kdv_core::sampling::{smooth_random_field, SmoothFieldSpec};
use kdv_core::schrodinger::{
    alpha, antiderivative_f, commutativity_integral, diagonal_green, diagonal_green_nullspace,
    floquet_pair, green_ode_residual, monodromy, product_identity_residual, recover_potential,
};
use kdv_core::spectral::{
    apply_multiplier, hilbert_schmidt_identity_line, hs_kappa_norm, r0_apply,
    verify_linear_identity, verify_quadratic_identity, LineFunction, SobolevIndex,
};
use kdv_core::{CnoidalWeierstrass, Field, Lattice, PeriodicGrid, MODULE_INVARIANTS};

use crate::config::ExperimentConfig;
use crate::{CliError, CliResult};

/// Residual of one check plus a free-text remark.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub residual: f64,
    pub note: String,
}

impl Measure {
    fn new(residual: f64) -> Self {
        Self {
            residual,
            note: String::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Shared inputs: the lattice from `grid.omega1`, `grid.omega3` and the seed.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub lattice: Lattice,
    pub wave: CnoidalWeierstrass,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig) -> CliResult<Self> {
        let lattice = Lattice::new(config.grid.omega1, config.grid.omega3)?;
        Ok(Self {
            config,
            wave: CnoidalWeierstrass::new(lattice.clone()),
            lattice,
        })
    }

    /// Generator for `check`; the stream depends only on the seed and the check name.
    fn rng(&self, check: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(fnv1a(check));
        rng
    }

    fn random(&self, check: &str, n: usize, amplitude: f64) -> CliResult<Field> {
        let grid = PeriodicGrid::new(2.0, n)?;
        let spec = SmoothFieldSpec::new(5, 2.0, amplitude);
        Ok(smooth_random_field(&grid, spec, &mut self.rng(check))?)
    }

    fn cnoidal(&self, n: usize) -> CliResult<(PeriodicGrid, Field)> {
        let grid = self.wave.grid(n)?;
        let v = self.wave.field(&grid, 0.0)?;
        Ok((grid, v))
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

type CheckFn = fn(&Context<'_>) -> CliResult<Measure>;

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    /// What the check asserts, in words.
    pub anchor: &'static str,
    pub tolerance: f64,
    run: CheckFn,
}

impl Check {
    pub fn run(&self, ctx: &Context<'_>) -> CliResult<Measure> {
        (self.run)(ctx)
    }
}

const fn check(
    name: &'static str,
    module: &'static str,
    anchor: &'static str,
    tolerance: f64,
    run: CheckFn,
) -> Check {
    Check {
        name,
        module,
        anchor,
        tolerance,
        run,
    }
}

/// Every check, grouped by module in the order of `MODULE_INVARIANTS`.
pub static REGISTRY: &[Check] = &[
    check("parseval", "spectral", "coefficient energy equals grid energy", 1e-13, parseval),
    check("multiplier-composition", "spectral", "composed multipliers multiply", 1e-12, multiplier_composition),
    check("linear-identity", "spectral", "linear term of the resolvent expansion", 1e-10, linear_identity),
    check("quadratic-identity", "spectral", "quadratic term of the resolvent expansion", 1e-10, quadratic_identity),
    check("hilbert-schmidt", "spectral", "Hilbert-Schmidt norm of the resolvent sandwich on the line", 1e-6, hilbert_schmidt),
    check("duality-bound", "spectral", "H^-1 and H^1 pairing bound", 1e-12, duality_bound),
    check("resolvent-limit", "spectral", "kappa^2 R0(kappa) tends to the identity", 1e-5, resolvent_limit),
    check("wp-ode", "elliptic", "wp'^2 = 4 wp^3 - g2 wp - g3", 1e-10, wp_ode),
    check("wp-periodicity", "elliptic", "wp is periodic in 2 omega1 and 2 omega3", 1e-10, wp_periodicity),
    check("wp-lattice-sum", "elliptic", "wp against its lattice sum", 1e-7, wp_lattice_sum),
    check("g3-square", "elliptic", "g3 vanishes on the square lattice", 1e-12, g3_square),
    check("branch-point", "elliptic", "wp(b) = e1 + kappa^2 with 0 < b < omega1", 1e-10, branch_point),
    check("monodromy-determinant", "schrodinger", "monodromy matrix has unit determinant", 1e-10, monodromy_determinant),
    check("wronskian", "schrodinger", "Floquet solutions have unit Wronskian", 1e-8, wronskian),
    check("green-ode", "schrodinger", "g solves the third-order equation", 1e-7, green_ode),
    check("product-identity", "schrodinger", "g g'' - g'^2/2 - 2 (q + kappa^2) g^2 = -1/2", 1e-8, product_identity),
    check("potential-recovery", "schrodinger", "q is recovered from g", 1e-6, potential_recovery),
    check("antiderivative", "schrodinger", "F' = q g'", 1e-7, antiderivative),
    check("method-agreement", "schrodinger", "Floquet and null-space Green's functions agree", 1e-7, method_agreement),
    check("commutativity", "schrodinger", "integral of g(varkappa) g'(kappa) vanishes", 1e-8, commutativity),
    check("alpha-zero", "schrodinger", "alpha vanishes at q = 0", 1e-12, alpha_zero),
    check("alpha-bounds", "schrodinger", "alpha is comparable to the H^-1_kappa norm", 1e-12, alpha_bounds),
    check("translation-covariance", "schrodinger", "g of a shifted potential is the shifted g", 1e-11, translation_covariance),
    check("large-kappa-limit", "schrodinger", "-4 kappa^3 (g - 1/(2 kappa)) tends to q", 0.5, large_kappa_limit),
    check("closed-form-wronskian", "cnoidal", "closed-form Floquet solutions have unit Wronskian", 1e-10, closed_form_wronskian),
    check("closed-form-green", "cnoidal", "closed-form product equals the numerical g", 1e-9, closed_form_green),
    check("closed-form-multiplier", "cnoidal", "closed-form Floquet multiplier, including e^{2 eta1 b}", 1e-9, closed_form_multiplier),
    check("hk-green-affine", "cnoidal", "g of the cnoidal wave is affine in the profile", 1e-7, hk_green_affine),
    check("kdv-profile-residual", "cnoidal", "the cnoidal profile solves KdV at speed 6 e1", 1e-8, kdv_profile_residual),
    check("jacobi-weierstrass", "cnoidal", "Jacobi and Weierstrass profiles agree after matching", 1e-8, jacobi_weierstrass),
    check("hk-speed-limit", "cnoidal", "H_kappa speed tends to the KdV speed", 0.5, hk_speed_limit),
    check("asymptotics", "cnoidal", "large-kappa remainders of b, nu, c1, c2 decrease", 0.5, asymptotics),
    check("kdv-traveling-wave", "flows", "KdV moves the cnoidal wave rigidly", 1e-8, kdv_traveling_wave),
    check("hk-traveling-wave", "flows", "H_kappa moves the cnoidal wave rigidly at speed nu", 1e-7, hk_traveling_wave_check),
    check("kdv-conservation", "flows", "KdV conserves momentum and energy", 1e-8, kdv_conservation),
    check("hk-conservation", "flows", "H_kappa conserves momentum and alpha", 1e-8, hk_conservation),
    check("stepper-order", "flows", "both steppers converge at fourth order", 0.2, stepper_order),
    check("time-reversal", "flows", "integrating back recovers the initial state", 1e-8, time_reversal),
    check("linearized-symbol", "flows", "H_kappa linearizes to 4 kappa^2 xi^3 / (xi^2 + 4 kappa^2)", 1e-6, linearized_symbol),
    check("momentum-growth", "flows", "dP/dt = 3 integral of V' q^2 around a background", 1e-6, momentum_growth),
    check("commute", "flows", "H_kappa and H_varkappa flows commute", 1e-8, commute),
];

/// Names in registry order.
pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.name).collect()
}

/// Names declared by the core modules, in declaration order.
pub fn declared_invariants() -> Vec<&'static str> {
    MODULE_INVARIANTS
        .iter()
        .flat_map(|(_, names)| names.iter().copied())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The computation itself failed.
    Error,
    Skip,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub anchor: &'static str,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

/// Runs the registry. `only` restricts the run; every other check is reported as skipped.
pub fn run(config: &ExperimentConfig, only: &[String]) -> CliResult<Vec<Outcome>> {
    if let Some(bad) = only.iter().find(|n| !REGISTRY.iter().any(|c| c.name == n.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown check {bad:?}; known checks: {}",
            names().join(", ")
        )));
    }
    let ctx = Context::new(config)?;
    let mut out = Vec::with_capacity(REGISTRY.len());
    for c in REGISTRY {
        let tolerance = config.tolerance_for(c.name, c.tolerance);
        let mut outcome = Outcome {
            name: c.name,
            anchor: c.anchor,
            residual: None,
            tolerance,
            status: Status::Skip,
            note: String::new(),
        };
        if !only.is_empty() && !only.iter().any(|n| n == c.name) {
            outcome.note = "not selected".into();
            out.push(outcome);
            continue;
        }
        match c.run(&ctx) {
            Ok(m) => {
                // NaN fails.
                outcome.status = if m.residual <= tolerance { Status::Pass } else { Status::Fail };
                outcome.residual = Some(m.residual);
                outcome.note = m.note;
            }
            Err(e) => {
                outcome.status = Status::Error;
                outcome.note = e.to_string();
            }
        }
        out.push(outcome);
    }
    Ok(out)
}

/// Writes the `name,anchor,residual,tolerance,status,note` report.
pub fn write_report(out: impl Write, outcomes: &[Outcome], meta: &Provenance) -> CliResult<()> {
    let columns = ["name", "anchor", "residual", "tolerance", "status", "note"];
    let mut w = TableWriter::new(out, meta, &columns)?;
    for o in outcomes {
        w.text_row([
            o.name.to_string(),
            o.anchor.to_string(),
            o.residual.map(fmt_g17).unwrap_or_default(),
            fmt_g17(o.tolerance),
            o.status.name().to_string(),
            o.note.clone(),
        ])?;
    }
    w.finish()?;
    Ok(())
}

pub fn failures(outcomes: &[Outcome]) -> usize {
    outcomes
        .iter()
        .filter(|o| matches!(o.status, Status::Fail | Status::Error))
        .count()
}

fn rel_l2(a: &Field, b: &Field) -> CliResult<f64> {
    Ok(a.sub(b)?.l2_norm() / b.l2_norm())
}

fn max_ratio(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1].abs() / w[0].abs()).fold(0.0, f64::max)
}

// spectral

fn parseval(ctx: &Context<'_>) -> CliResult<Measure> {
    let f = ctx.random("parseval", 64, 1.0)?.map(|v| v + 0.3)?;
    let coeff = hs_kappa_norm(&f, SobolevIndex::new(0.0, 1.0)?)?.powi(2);
    let grid = f.inner(&f)?;
    Ok(Measure::new((coeff - grid).abs() / grid))
}

fn multiplier_composition(ctx: &Context<'_>) -> CliResult<Measure> {
    let f = ctx.random("multiplier-composition", 64, 1.0)?;
    let m1 = |xi: f64| Complex64::new(1.0 / (xi * xi + 0.7), 0.0);
    let m2 = |xi: f64| Complex64::new(0.0, xi.powi(3));
    let two = apply_multiplier(&apply_multiplier(&f, m1)?, m2)?;
    let one = apply_multiplier(&f, |xi| m1(xi) * m2(xi))?;
    Ok(Measure::new(two.sub(&one)?.sup_norm() / one.sup_norm()))
}

fn band_limited(ctx: &Context<'_>, check: &str) -> CliResult<(Field, Field)> {
    let grid = PeriodicGrid::new(1.0, 128)?;
    let spec = SmoothFieldSpec::new(40, 8.0, 1.0);
    let mut rng = ctx.rng(check);
    Ok((
        smooth_random_field(&grid, spec, &mut rng)?,
        smooth_random_field(&grid, spec, &mut rng)?,
    ))
}

fn linear_identity(ctx: &Context<'_>) -> CliResult<Measure> {
    let (f, _) = band_limited(ctx, "linear-identity")?;
    let mut worst = 0.0f64;
    for kappa in [2.0, 8.0, 32.0] {
        worst = worst.max(verify_linear_identity(&f, kappa)?);
    }
    Ok(Measure::new(worst).note("kappa 2, 8, 32"))
}

fn quadratic_identity(ctx: &Context<'_>) -> CliResult<Measure> {
    let (f, h) = band_limited(ctx, "quadratic-identity")?;
    let mut worst = 0.0f64;
    for kappa in [2.0, 8.0, 32.0] {
        worst = worst.max(verify_quadratic_identity(&f, &h, kappa)?);
    }
    Ok(Measure::new(worst).note("kappa 2, 8, 32"))
}

fn hilbert_schmidt(_: &Context<'_>) -> CliResult<Measure> {
    let line = LineFunction::sample_default(|x| (-x * x).exp() * (1.0 + 0.5 * (2.0 * x).sin()))?;
    let mut worst = 0.0f64;
    for kappa in [1.0, 3.0] {
        let (lhs, rhs) = hilbert_schmidt_identity_line(&line, kappa)?;
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    Ok(Measure::new(worst).note("relative gap; kappa 1, 3"))
}

fn duality_bound(ctx: &Context<'_>) -> CliResult<Measure> {
    let mut rng = ctx.rng("duality-bound");
    let grid = PeriodicGrid::new(1.7, 64)?;
    let spec = SmoothFieldSpec::new(10, 1.0, 1.0);
    let mut worst = f64::NEG_INFINITY;
    for kappa in [0.5, 4.0, 20.0] {
        let f = smooth_random_field(&grid, spec, &mut rng)?;
        let h = smooth_random_field(&grid, spec, &mut rng)?;
        let bound = hs_kappa_norm(&f, SobolevIndex::new(-1.0, kappa)?)?
            * hs_kappa_norm(&h, SobolevIndex::new(1.0, kappa)?)?;
        worst = worst.max(f.inner(&h)?.abs() / bound);
    }
    Ok(Measure::new((worst - 1.0).max(0.0)).note(format!("largest pairing/bound {}", fmt_g17(worst))))
}

fn resolvent_limit(ctx: &Context<'_>) -> CliResult<Measure> {
    let f = ctx.random("resolvent-limit", 64, 1.0)?;
    let kappa = 1e4;
    let approx = r0_apply(&f, kappa)?.scale(kappa * kappa);
    Ok(Measure::new(rel_l2(&approx, &f)?).note("kappa 1e4"))
}

// elliptic

const PROBES: [(f64, f64); 4] = [(0.3, 0.2), (0.71, -0.4), (1.3, 0.55), (-0.45, 0.9)];

fn wp_ode(ctx: &Context<'_>) -> CliResult<Measure> {
    let lat = &ctx.lattice;
    let mut worst = 0.0f64;
    for (re, im) in PROBES {
        let z = Complex64::new(re, im);
        let (p, dp) = (lat.wp(z)?, lat.wp_prime(z)?);
        let res = dp * dp - (4.0 * p * p * p - lat.g2() * p - lat.g3());
        worst = worst.max(res.norm() / (4.0 * p.norm().powi(3)).max(1.0));
    }
    Ok(Measure::new(worst))
}

fn wp_periodicity(ctx: &Context<'_>) -> CliResult<Measure> {
    let lat = &ctx.lattice;
    let mut worst = 0.0f64;
    for (re, im) in PROBES {
        let z = Complex64::new(re, im);
        let p = lat.wp(z)?;
        for w in [Complex64::new(2.0 * lat.omega1(), 0.0), 2.0 * lat.omega3()] {
            worst = worst.max((lat.wp(z + w)? - p).norm() / p.norm().max(1.0));
        }
    }
    Ok(Measure::new(worst))
}

/// Box sum over `|m|, |n| <= r` of `1/(z - w)^2 - 1/(u - w)^2`; `O(r^-2)` from `wp(z) - wp(u)`.
fn wp_difference_box(lat: &Lattice, z: Complex64, u: Complex64, r: i64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for m in -r..=r {
        for n in -r..=r {
            let w = Complex64::new(2.0 * m as f64 * lat.omega1(), 2.0 * n as f64 * lat.omega3_im());
            s += (z - w).powi(-2) - (u - w).powi(-2);
        }
    }
    s
}

fn wp_lattice_sum(ctx: &Context<'_>) -> CliResult<Measure> {
    let lat = &ctx.lattice;
    let u = Complex64::new(lat.omega1(), 0.0);
    let z = Complex64::new(0.37 * lat.omega1(), 0.21 * lat.omega3_im());
    let (coarse, fine) = (wp_difference_box(lat, z, u, 60), wp_difference_box(lat, z, u, 120));
    let sum = (4.0 * fine - coarse) / 3.0;
    let want = lat.wp(z)? - lat.e1();
    Ok(Measure::new((sum - want).norm() / want.norm()).note("box sums r = 60, 120 with one Richardson step"))
}

fn g3_square(ctx: &Context<'_>) -> CliResult<Measure> {
    let w = ctx.config.grid.omega1;
    let lat = Lattice::new(w, w)?;
    Ok(Measure::new(lat.g3().abs() / lat.g2().abs().powf(1.5)).note("|g3| / g2^(3/2)"))
}

fn branch_point(ctx: &Context<'_>) -> CliResult<Measure> {
    let lat = &ctx.lattice;
    let mut worst = 0.0f64;
    for kappa in [0.5, 2.0, 10.0, 40.0] {
        let b = solve_b(kappa, lat)?.b;
        if !(b > 0.0 && b < lat.omega1()) {
            return Ok(Measure::new(f64::INFINITY).note(format!("b = {} outside (0, omega1)", fmt_g17(b))));
        }
        worst = worst.max((lat.wp_real(b)? - lat.e1() - kappa * kappa).abs() / (kappa * kappa));
    }
    Ok(Measure::new(worst).note("kappa 0.5, 2, 10, 40"))
}

// schrodinger

const KAPPA: f64 = 6.0;

fn monodromy_determinant(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("monodromy-determinant", 64, 1.0)?;
    Ok(Measure::new(monodromy(&q, KAPPA)?.determinant_defect()))
}

fn wronskian(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("wronskian", 64, 1.0)?;
    let mut worst = 0.0f64;
    for kappa in [3.0, KAPPA, 12.0] {
        worst = worst.max(floquet_pair(&q, kappa)?.wronskian_defect);
    }
    Ok(Measure::new(worst))
}

fn green_ode(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("green-ode", 64, 1.0)?;
    Ok(Measure::new(green_ode_residual(&q, &diagonal_green(&q, KAPPA)?)?))
}

fn product_identity(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("product-identity", 64, 1.0)?;
    Ok(Measure::new(product_identity_residual(&q, &diagonal_green(&q, KAPPA)?)?))
}

fn potential_recovery(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("potential-recovery", 64, 1.0)?;
    let back = recover_potential(&diagonal_green(&q, KAPPA)?)?;
    Ok(Measure::new(back.sub(&q)?.sup_norm() / q.sup_norm()))
}

fn antiderivative(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("antiderivative", 64, 1.0)?;
    let gd = diagonal_green(&q, KAPPA)?;
    let qg = q.mul(&gd.g.derivative(1))?;
    let err = antiderivative_f(&gd)?.derivative(1).sub(&qg)?.sup_norm();
    Ok(Measure::new(err / qg.sup_norm()))
}

fn method_agreement(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("method-agreement", 64, 1.0)?;
    let a = diagonal_green(&q, KAPPA)?.g;
    let b = diagonal_green_nullspace(&q, KAPPA)?.g;
    Ok(Measure::new(a.sub(&b)?.sup_norm() / a.sup_norm()))
}

fn commutativity(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("commutativity", 64, 1.0)?;
    let (kappa, varkappa) = (5.0, 9.0);
    let scale = diagonal_green(&q, varkappa)?.g.l2_norm()
        * diagonal_green(&q, kappa)?.g.derivative(1).l2_norm();
    Ok(Measure::new(commutativity_integral(&q, kappa, varkappa)?.abs() / scale).note("kappa 5, varkappa 9"))
}

fn alpha_zero(_: &Context<'_>) -> CliResult<Measure> {
    let grid = PeriodicGrid::new(2.0, 64)?;
    Ok(Measure::new(alpha(&Field::zeros(&grid), KAPPA)?.value.abs()))
}

fn alpha_bounds(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("alpha-bounds", 64, 0.5)?;
    let mut worst = 0.0f64;
    for kappa in [4.0, 8.0] {
        let a = alpha(&q, kappa)?.value;
        let upper = hs_kappa_norm(&q, SobolevIndex::new(-1.0, kappa)?)?.powi(2) / kappa;
        worst = worst.max((0.25 * upper - a).max(a - upper).max(0.0) / upper);
    }
    Ok(Measure::new(worst).note("relative violation of ||q||^2/(4 kappa) <= alpha <= ||q||^2/kappa"))
}

fn translation_covariance(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("translation-covariance", 64, 1.0)?;
    let g = diagonal_green(&q, KAPPA)?.g;
    let mut worst = 0.0f64;
    for j in [1isize, 5, 17] {
        let shifted = diagonal_green(&q.rotated(j), KAPPA)?.g;
        let want = g.rotated(j);
        worst = worst.max(shifted.sub(&want)?.sup_norm() / want.sup_norm());
    }
    Ok(Measure::new(worst))
}

fn large_kappa_limit(ctx: &Context<'_>) -> CliResult<Measure> {
    let q = ctx.random("large-kappa-limit", 64, 1.0)?;
    let mut dist = Vec::new();
    for kappa in [8.0, 16.0, 32.0] {
        let g = diagonal_green(&q, kappa)?.g;
        let approx = g.map(|v| -4.0 * kappa.powi(3) * (v - 0.5 / kappa))?;
        dist.push(approx.sub(&q)?.sup_norm());
    }
    Ok(Measure::new(max_ratio(&dist)).note("largest ratio of successive distances, kappa 8, 16, 32"))
}

// cnoidal

fn closed_form_wronskian(ctx: &Context<'_>) -> CliResult<Measure> {
    let mut worst = 0.0f64;
    for kappa in [3.0, 10.0] {
        let f = FloquetClosedForm::new(&ctx.lattice, kappa)?;
        for x in [0.0, 0.4, 1.3] {
            let (p, m) = f.psi_pair(x)?;
            let (dp, dm) = f.dlog_psi_pair(x)?;
            worst = worst.max((p * m * (dm - dp) - 1.0).abs());
        }
    }
    Ok(Measure::new(worst))
}

fn closed_form_green(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, v) = ctx.cnoidal(64)?;
    let kappa = 5.0;
    let f = FloquetClosedForm::new(&ctx.lattice, kappa)?;
    let g = floquet_pair(&v, kappa)?.product()?;
    let mut worst = 0.0f64;
    for (j, x) in grid.nodes().into_iter().enumerate() {
        worst = worst.max((g.samples()[j] - f.product(x)?).abs());
    }
    Ok(Measure::new(worst))
}

fn closed_form_multiplier(ctx: &Context<'_>) -> CliResult<Measure> {
    let (_, v) = ctx.cnoidal(64)?;
    let mut worst = 0.0f64;
    let mut gap = 0.0f64;
    for kappa in [2.0, 6.0] {
        let f = FloquetClosedForm::new(&ctx.lattice, kappa)?;
        let numeric = floquet_pair(&v, kappa)?.log_multiplier;
        worst = worst.max((numeric - f.multiplier().ln()).abs());
        gap = gap.max((f.stated_multiplier().ln() - numeric).abs());
    }
    Ok(Measure::new(worst).note(format!(
        "log-multiplier without e^{{2 eta1 b}} is off by up to {}",
        fmt_g17(gap)
    )))
}

fn hk_green_affine(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, v) = ctx.cnoidal(128)?;
    let mut worst = 0.0f64;
    for kappa in [6.0, 12.0] {
        let closed = hk_traveling_wave(&ctx.lattice, kappa)?.green(&grid)?;
        let numeric = diagonal_green(&v, kappa)?.g;
        worst = worst.max(closed.sub(&numeric)?.sup_norm() / closed.sup_norm());
    }
    Ok(Measure::new(worst))
}

fn kdv_profile_residual(ctx: &Context<'_>) -> CliResult<Measure> {
    let (_, v) = ctx.cnoidal(256)?;
    let dv = v.derivative(1);
    let v_t = dv.scale(ctx.wave.kdv_speed());
    let nonlinear = v.mul(&dv)?.scale(6.0);
    let res = v_t.add(&v.derivative(3))?.sub(&nonlinear)?;
    Ok(Measure::new(res.sup_norm() / nonlinear.sup_norm().max(v.derivative(3).sup_norm())))
}

fn jacobi_weierstrass(ctx: &Context<'_>) -> CliResult<Measure> {
    let w = &ctx.wave;
    let j = w.matched_jacobi()?;
    let mut worst = (j.period()? - w.period()).abs();
    for i in 0..50 {
        let x = w.period() * i as f64 / 50.0;
        worst = worst.max((w.profile(0.0, x)? - w.mean() - j.profile(0.0, x)?).abs());
    }
    Ok(Measure::new(worst).note("Weierstrass profile minus its mean against Jacobi"))
}

fn hk_speed_limit(ctx: &Context<'_>) -> CliResult<Measure> {
    let six_e1 = 6.0 * ctx.lattice.e1();
    let mut gaps = Vec::new();
    for kappa in [8.0, 16.0, 32.0, 64.0] {
        gaps.push(hk_traveling_wave(&ctx.lattice, kappa)?.nu - six_e1);
    }
    Ok(Measure::new(max_ratio(&gaps)).note("largest ratio of successive |nu - 6 e1|, kappa 8..64"))
}

fn asymptotics(ctx: &Context<'_>) -> CliResult<Measure> {
    let kappas = &ctx.config.asymptotics_kappas;
    if kappas.len() < 2 {
        return Err(CliError::Usage("asymptotics.kappas needs two or more values".into()));
    }
    let table = asymptotics_table(&ctx.lattice, kappas)?;
    let mut worst = 0.0f64;
    for i in 0..4 {
        let col: Vec<f64> = table.rows.iter().map(|r| r.remainders()[i]).collect();
        worst = worst.max(max_ratio(&col));
    }
    let last = table.observed_exponents().last().copied().unwrap_or([f64::NAN; 4]);
    Ok(Measure::new(worst).note(format!(
        "largest ratio of successive remainders; last exponents c1 {:.2} c2 {:.2} nu {:.2} b {:.2}",
        last[0], last[1], last[2], last[3]
    )))
}

// flows

fn kdv_traveling_wave(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, v) = ctx.cnoidal(64)?;
    let t = 0.01;
    let spec = FlowSpec::new(FlowKind::Kdv, 1e-4, t).record_every(usize::MAX);
    let traj = evolve(&spec, &v)?;
    Ok(Measure::new(rel_l2(traj.final_state(), &ctx.wave.field(&grid, t)?)?))
}

fn hk_traveling_wave_check(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, v) = ctx.cnoidal(64)?;
    let (kappa, t) = (8.0, 0.01);
    let hk = hk_traveling_wave(&ctx.lattice, kappa)?;
    let spec = FlowSpec::new(FlowKind::Hk, 2e-4, t).kappa(kappa).record_every(usize::MAX);
    let traj = evolve(&spec, &v)?;
    Ok(Measure::new(rel_l2(traj.final_state(), &hk.field(&grid, t)?)?).note("kappa 8"))
}

fn kdv_conservation(ctx: &Context<'_>) -> CliResult<Measure> {
    let q0 = ctx.random("kdv-conservation", 64, 1.0)?;
    let spec = FlowSpec::new(FlowKind::Kdv, 2.5e-5, 0.05).record_every(200);
    let ledger = evolve(&spec, &q0)?.ledger;
    Ok(Measure::new(ledger.momentum_drift().max(ledger.energy_drift())))
}

fn hk_conservation(ctx: &Context<'_>) -> CliResult<Measure> {
    let q0 = ctx.random("hk-conservation", 64, 0.5)?;
    let spec = FlowSpec::new(FlowKind::Hk, 1e-4, 0.005)
        .kappa(8.0)
        .record_every(10)
        .probe_kappas(vec![4.0]);
    let ledger = evolve(&spec, &q0)?.ledger;
    Ok(Measure::new(ledger.momentum_drift().max(ledger.alpha_drift(0))).note("kappa 8, alpha at 4"))
}

fn stepper_order(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, v) = ctx.cnoidal(64)?;
    let t = 0.02;
    let exact = ctx.wave.field(&grid, t)?;
    let mut worst_order = f64::INFINITY;
    for stepper in [Stepper::Rk4MultiplierExact, Stepper::EtdRk4] {
        let err = |dt: f64| -> CliResult<f64> {
            let spec = FlowSpec::new(FlowKind::Kdv, dt, t).stepper(stepper).record_every(usize::MAX);
            rel_l2(evolve(&spec, &v)?.final_state(), &exact)
        };
        worst_order = worst_order.min((err(5e-4)? / err(2.5e-4)?).log2());
    }
    Ok(Measure::new((4.0 - worst_order).max(0.0))
        .note(format!("lowest observed order {worst_order:.3}; residual is the shortfall from 4")))
}

fn time_reversal(ctx: &Context<'_>) -> CliResult<Measure> {
    let (_, v) = ctx.cnoidal(64)?;
    let forward = evolve(&FlowSpec::new(FlowKind::Kdv, 1.25e-4, 0.02), &v)?;
    let back = evolve(&FlowSpec::new(FlowKind::Kdv, 1.25e-4, -0.02), forward.final_state())?;
    Ok(Measure::new(rel_l2(back.final_state(), &v)?))
}

fn linearized_symbol(_: &Context<'_>) -> CliResult<Measure> {
    let grid = PeriodicGrid::new(2.0, 64)?;
    let (kappa, eps) = (KAPPA, 1e-4);
    let mut worst = 0.0f64;
    for k in [1usize, 4, 9] {
        let xi = grid.wavenumbers()[k];
        let f = Field::from_fn(&grid, |x| (xi * x).cos())?;
        let plus = rhs_hk(&f.scale(eps), kappa)?;
        let minus = rhs_hk(&f.scale(-eps), kappa)?;
        let lin = plus.sub(&minus)?.scale(0.5 / eps);
        let m = 4.0 * kappa * kappa * xi.powi(3) / (xi * xi + 4.0 * kappa * kappa);
        let want = Field::from_fn(&grid, |x| -m * (xi * x).sin())?;
        worst = worst.max(rel_l2(&lin, &want)?);
    }
    Ok(Measure::new(worst).note("symmetric difference at amplitude 1e-4"))
}

fn momentum_growth(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, _) = ctx.cnoidal(64)?;
    let q0 = smooth_random_field(&grid, SmoothFieldSpec::new(5, 2.0, 0.3), &mut ctx.rng("momentum-growth"))?;
    let bg = Background::cnoidal_kdv(&ctx.wave, &grid)?;
    let dt = 2e-5;
    let spec = FlowSpec::new(FlowKind::KdvWithPotential, dt, 0.002).background(bg.clone());
    let traj = evolve(&spec, &q0)?;
    let p: Vec<f64> = traj.states.iter().map(momentum).collect();
    let mut worst = 0.0f64;
    for j in [20usize, 50, 80] {
        let fd = (8.0 * (p[j + 1] - p[j - 1]) - (p[j + 2] - p[j - 2])) / (12.0 * dt);
        let q = &traj.states[j];
        let dv = bg.at(&grid, traj.times[j])?.derivative(1);
        let want = 3.0 * dv.mul(&q.mul(q)?)?.integral();
        worst = worst.max(((fd - want) / want).abs());
    }
    Ok(Measure::new(worst).note("fourth-order difference of P against the flux"))
}

fn commute(ctx: &Context<'_>) -> CliResult<Measure> {
    let (grid, _) = ctx.cnoidal(64)?;
    let q0 = smooth_random_field(&grid, SmoothFieldSpec::new(4, 2.0, 0.5), &mut ctx.rng("commute"))?;
    let d = commute_check(8.0, 12.0, &q0, 0.01, 0.01, 1.25e-4, Stepper::Rk4MultiplierExact)?;
    Ok(Measure::new(d / kdv_core::spectral::h_minus_one_norm(&q0))
        .note("relative H^-1 gap, kappa 8 and 12, t = s = 0.01"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn registry_covers_every_declared_invariant() {
        let declared: BTreeSet<_> = declared_invariants().into_iter().collect();
        let registered: BTreeSet<_> = names().into_iter().collect();
        assert_eq!(declared, registered);
        assert_eq!(names().len(), registered.len(), "duplicate check names");
        for (module, invariants) in MODULE_INVARIANTS {
            for name in invariants {
                let c = REGISTRY.iter().find(|c| c.name == *name).unwrap();
                assert_eq!(c.module, module, "{name}");
            }
        }
    }

    #[test]
    fn anchors_are_distinct() {
        let anchors: BTreeSet<_> = REGISTRY.iter().map(|c| c.anchor).collect();
        assert_eq!(anchors.len(), REGISTRY.len());
    }

    #[test]
    fn streams_differ_by_name() {
        assert_ne!(fnv1a("parseval"), fnv1a("wronskian"));
    }
}

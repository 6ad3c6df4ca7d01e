//! Gamma, the two-parameter Mittag-Leffler function and the power-law
//! memory kernel.
//!
//! Everything here is pure; tables are immutable once built.

use crate::error::{Error, Result};

/// Largest `x` for which `Γ(x)` is finite in `f64`.
const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Arguments beyond this are rejected by [`mittag_leffler`].
pub const ML_MAX_ARG: f64 = 30.0;
/// Smallest series order accepted by [`mittag_leffler`].
pub const ML_MIN_ALPHA: f64 = 0.1;

/// Gamma function for real `x`, excluding the poles at non-positive integers.
///
/// Backed by the Lanczos approximation in `statrs` (reflection below 0.5);
/// positive integers are exact factorials.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::invalid("x", "must be a number", x));
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow(format!("gamma({x})")));
    }
    let g = if x.fract() == 0.0 {
        statrs::function::factorial::factorial(x as u64 - 1)
    } else {
        statrs::function::gamma::gamma(x)
    };
    if !g.is_finite() {
        return Err(Error::Overflow(format!("gamma({x})")));
    }
    Ok(g)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `z^e` for a non-negative integer `z`, evaluated as `exp(e · ln z)`
/// unless `e` is a small integer.
///
/// Every power-law weight in the crate goes through here so that kernel
/// differences cancel exactly against the direct-sum weights.
#[inline]
pub(crate) fn int_pow(z: usize, e: f64) -> f64 {
    if z == 0 {
        return if e > 0.0 {
            0.0
        } else if e == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
    }
    // integer exponents stay exact: V_1 = 0 and V_2 = 1 bitwise
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        return (z as f64).powi(e as i32);
    }
    (e * (z as f64).ln()).exp()
}

/// Parameters of the series `E_{α,β}(z) = Σ z^k / Γ(αk + β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    pub beta: f64,
    /// Relative truncation tolerance.
    pub tol: f64,
    pub max_terms: usize,
}

impl MlParams {
    pub const DEFAULT_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 2000;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = MlParams {
            alpha,
            beta,
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "Mittag-Leffler order must be > 0", self.alpha));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid("beta", "Mittag-Leffler shift must be > 0", self.beta));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid("tol", "must lie in (0, 1)", self.tol));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be >= 1", self.max_terms));
        }
        Ok(())
    }
}

/// `1/Γ(x)`, zero at the poles.
fn recip_gamma(x: f64) -> f64 {
    gamma_fn(x).map_or(0.0, |g| 1.0 / g)
}

fn ml_term(alpha: f64, beta: f64, z: f64, k: usize) -> f64 {
    if k == 0 {
        return recip_gamma(beta);
    }
    if z == 0.0 {
        return 0.0;
    }
    let arg = alpha * k as f64 + beta;
    let log_zk = k as f64 * z.abs().ln();
    if arg < 170.0 && log_zk < 700.0 {
        return z.powi(k as i32) * recip_gamma(arg);
    }
    let mag = (log_zk - ln_gamma(arg)).exp();
    if z < 0.0 && k % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Two-parameter Mittag-Leffler function by direct series summation.
///
/// Terms are accumulated until the next one (past the peak of the term
/// magnitudes) falls below `tol · |partial sum|`. The validated range is
/// `|z| <= 30` with `alpha >= 0.1`; for negative `z` the absolute error is
/// roughly `1e-16` times the largest term.
pub fn mittag_leffler(p: &MlParams, z: f64) -> Result<f64> {
    p.validate()?;
    if !z.is_finite() || z.abs() > ML_MAX_ARG {
        return Err(Error::OutOfRange(format!(
            "|z| = {} exceeds {ML_MAX_ARG}",
            z.abs()
        )));
    }
    if p.alpha < ML_MIN_ALPHA {
        return Err(Error::OutOfRange(format!(
            "alpha = {} below {ML_MIN_ALPHA}",
            p.alpha
        )));
    }

    let mut sum = 0.0_f64;
    let mut prev_mag = f64::INFINITY;
    for k in 0..p.max_terms {
        let term = ml_term(p.alpha, p.beta, z, k);
        let mag = term.abs();
        if k > 0 && mag < p.tol * sum.abs() && mag <= prev_mag {
            return Ok(sum);
        }
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!(
                "E_{{{},{}}}({z}) partial sum",
                p.alpha, p.beta
            )));
        }
        prev_mag = mag;
    }
    Err(Error::NonConvergence { terms: p.max_terms })
}

/// Memory kernel `V_α(z) = (z+1)^(α-1) - z^(α-1)` for `z >= 1`.
pub fn kernel_v(alpha: f64, z: usize) -> f64 {
    debug_assert!(z >= 1, "kernel_v is defined for z >= 1");
    int_pow(z + 1, alpha - 1.0) - int_pow(z, alpha - 1.0)
}

/// Precomputed `V_α(z)` for `z = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    alpha: f64,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `V_α(z)`, `1 <= z <= n_max`.
    #[inline]
    pub fn get(&self, z: usize) -> f64 {
        self.values[z - 1]
    }

    /// Values ordered by `z = 1..=n_max`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grow the table so that it covers `z = 1..=n_max`.
    pub fn extend_to(&mut self, n_max: usize) {
        let start = self.values.len() + 1;
        self.values
            .extend((start..=n_max).map(|z| kernel_v(self.alpha, z)));
    }
}

pub fn kernel_table(alpha: f64, n_max: usize) -> Result<KernelTable> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", "kernel order must be > 0", alpha));
    }
    if n_max == 0 {
        return Err(Error::invalid("nmax", "must be >= 1", n_max));
    }
    let mut table = KernelTable {
        alpha,
        values: Vec::with_capacity(n_max),
    };
    table.extend_to(n_max);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_factorials() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        // mpmath, 40 digits
        assert!(rel(gamma_fn(0.5).unwrap(), 1.772_453_850_905_516) < 1e-14);
    }

    #[test]
    fn gamma_against_tabulated() {
        // mpmath reference values
        let table = [
            (0.05, 19.470_085_311_255_511_756),
            (0.1, 9.513_507_698_668_731_285_8),
            (1.3, 0.897_470_696_306_277_181_75),
            (2.5, 1.329_340_388_179_137_020_5),
            (7.2, 1_050.317_816_662_682_952_8),
            (13.7, 2_861_595_499.066_014_607),
            (33.3, 7.487_577_596_522_632_327_4e35),
            (50.0, 6.082_818_640_342_675_608_7e62),
        ];
        for (x, want) in table {
            let got = gamma_fn(x).unwrap();
            assert!(rel(got, want) < 1e-12, "gamma({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_poles_and_overflow() {
        assert_eq!(gamma_fn(0.0), Err(Error::Pole(0.0)));
        assert_eq!(gamma_fn(-3.0), Err(Error::Pole(-3.0)));
        assert!(matches!(gamma_fn(200.0), Err(Error::Overflow(_))));
        assert!(gamma_fn(-2.5).unwrap() < 0.0);
    }

    #[test]
    fn ml_exponential_anchor() {
        let p = MlParams::new(1.0, 1.0).unwrap();
        assert!(rel(mittag_leffler(&p, 1.0).unwrap(), std::f64::consts::E) < 1e-14);
    }

    #[test]
    fn ml_at_zero_is_first_term() {
        let p = MlParams::new(0.7, 1.3).unwrap();
        let want = 1.0 / gamma_fn(1.3).unwrap();
        assert_eq!(mittag_leffler(&p, 0.0).unwrap(), want);
    }

    #[test]
    fn ml_reference_values() {
        // mpmath nsum of the defining series
        let cases = [
            (2.0, 1.0, 1.0, 1.543_080_634_815_243_778_5_f64),
            (1.0, 2.0, 1.0, 1.718_281_828_459_045_235_4),
            (0.5, 1.0, 1.0, 5.008_980_080_762_283_466_3),
            (0.7, 1.3, -2.0, 0.320_565_949_245_213_610_35),
            (0.3, 0.8, 1.5, 207.646_792_989_507_452_83),
            (1.5, 2.0, 10.0, 14.839_935_494_935_751_328),
            (0.5, 1.0, -3.0, 0.179_001_151_181_389_950_42),
        ];
        for (a, b, z, want) in cases {
            let got = mittag_leffler(&MlParams::new(a, b).unwrap(), z).unwrap();
            // alternating series: error is relative to the largest term
            let tol = if z < 0.0 { 1e-10 } else { 1e-12 * want.abs() };
            assert!((got - want).abs() < tol, "E_{{{a},{b}}}({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn ml_rejects_out_of_range() {
        let p = MlParams::new(1.0, 1.0).unwrap();
        assert!(matches!(mittag_leffler(&p, 31.0), Err(Error::OutOfRange(_))));
        let small = MlParams::new(0.05, 1.0).unwrap();
        assert!(matches!(mittag_leffler(&small, 1.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn ml_reports_non_convergence() {
        let p = MlParams {
            alpha: 1.0,
            beta: 1.0,
            tol: 1e-14,
            max_terms: 5,
        };
        assert_eq!(mittag_leffler(&p, 10.0), Err(Error::NonConvergence { terms: 5 }));
        // alpha = 0.1 at z = 30 is far beyond what 2000 terms can sum
        let slow = MlParams::new(0.1, 1.0).unwrap();
        assert!(mittag_leffler(&slow, 30.0).is_err());
    }

    #[test]
    fn ml_params_validation() {
        assert!(MlParams::new(0.0, 1.0).is_err());
        assert!(MlParams::new(1.0, -1.0).is_err());
        let bad_tol = MlParams {
            tol: 1.5,
            ..MlParams::new(1.0, 1.0).unwrap()
        };
        assert!(bad_tol.validate().is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_v(1.0, 7), 0.0);
        assert!((kernel_v(0.5, 1) - (-0.292_893_218_813_452_5)).abs() < 1e-15);
        assert!((kernel_v(0.5, 3) - (0.5 - 1.0 / 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn kernel_table_examples() {
        let t = kernel_table(1.0, 10).unwrap();
        assert!(t.values().iter().all(|&v| v.to_bits() == 0));

        let t = kernel_table(0.5, 3).unwrap();
        let want = [-0.292_893_218_8, -0.129_756_512_0, -0.077_350_269_2];
        for (got, want) in t.values().iter().zip(want) {
            assert!((got - want).abs() < 1e-9);
        }

        let t = kernel_table(1.5, 2).unwrap();
        assert!((t.get(1) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((t.get(2) - (3f64.sqrt() - 2f64.sqrt())).abs() < 1e-15);
        assert!(kernel_table(0.5, 0).is_err());
    }

    #[test]
    fn kernel_table_matches_kernel_v() {
        let t = kernel_table(0.37, 500).unwrap();
        for z in 1..=500 {
            assert_eq!(t.get(z).to_bits(), kernel_v(0.37, z).to_bits());
        }
    }
}

//! Economic parameters and the transformations built on them: growth
//! parameters, price models, the logistic normalizations and the `R(Y)`
//! change of variable used by the generalized maps.
//!
//! Time is dimensionless throughout.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special_fn::{gamma_fn, mittag_leffler, MlParams};

/// Order `α > 0` of the memory together with its integer bracket
/// `N` (`N - 1 < α <= N`), which fixes the state dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    value: f64,
    bracket_n: usize,
}

impl FractionalOrder {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::invalid("alpha", "order must satisfy alpha > 0", value));
        }
        let bracket_n = value.ceil() as usize;
        Ok(FractionalOrder { value, bracket_n })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn bracket_n(&self) -> usize {
        self.bracket_n
    }

    pub fn is_integer(&self) -> bool {
        self.value.fract() == 0.0
    }
}

/// Growth-model parameters shared by every map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    /// Norm of net investment, `0 < m < 1`.
    pub m: f64,
    /// Accelerator coefficient.
    pub v: f64,
    /// Kick period.
    pub period: f64,
    pub alpha: FractionalOrder,
}

impl GrowthParams {
    pub fn new(m: f64, v: f64, period: f64, alpha: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::invalid("m", "net-investment norm must satisfy 0 < m < 1", m));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid("v", "accelerator coefficient must satisfy v > 0", v));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::invalid("T", "kick period must satisfy T > 0", period));
        }
        Ok(GrowthParams {
            m,
            v,
            period,
            alpha: FractionalOrder::new(alpha)?,
        })
    }

    /// The memoryless growth rate `m / v`.
    pub fn rate(&self) -> f64 {
        self.m / self.v
    }
}

/// Price response evaluated at the kicks.
#[derive(Clone)]
pub enum OutputFunction {
    /// `F(Y) = a·Y - b`.
    LinearPrice { a: f64, b: f64 },
    /// Arbitrary pointwise map, assumed continuous at the kick instants.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl OutputFunction {
    pub fn linear(a: f64, b: f64) -> Self {
        OutputFunction::LinearPrice { a, b }
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        OutputFunction::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            OutputFunction::LinearPrice { a, b } => a * y - b,
            OutputFunction::Custom(f) => f(y),
        }
    }

    pub fn as_linear(&self) -> Option<(f64, f64)> {
        match *self {
            OutputFunction::LinearPrice { a, b } => Some((a, b)),
            OutputFunction::Custom(_) => None,
        }
    }
}

impl fmt::Debug for OutputFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFunction::LinearPrice { a, b } => f
                .debug_struct("LinearPrice")
                .field("a", a)
                .field("b", b)
                .finish(),
            OutputFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Smooth part `G(Y)` of the mixed price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GCase {
    /// `G(Y) = P0`.
    ConstantG { p0: f64 },
    /// `G(Y) = ρ·Y^j`; `j = 1` is direct proportionality.
    PowerG { rho: f64, j: f64 },
}

impl GCase {
    pub fn constant(p0: f64) -> Result<Self> {
        if !(p0 > 0.0) || !p0.is_finite() {
            return Err(Error::invalid("P0", "constant price must satisfy P0 > 0", p0));
        }
        Ok(GCase::ConstantG { p0 })
    }

    pub fn power(rho: f64, j: f64) -> Result<Self> {
        if rho == 0.0 || !rho.is_finite() {
            return Err(Error::invalid("rho", "power-law price needs rho != 0", rho));
        }
        if j == 0.0 || !j.is_finite() {
            return Err(Error::invalid("j", "power-law exponent needs j != 0", j));
        }
        Ok(GCase::PowerG { rho, j })
    }

    /// The constant `C` that makes `G(Y)·Y·R'(Y) = C`.
    pub fn c_constant(&self) -> f64 {
        match *self {
            GCase::ConstantG { p0 } => p0,
            GCase::PowerG { rho, .. } => rho,
        }
    }

    pub fn g(&self, y: f64) -> f64 {
        match *self {
            GCase::ConstantG { p0 } => p0,
            GCase::PowerG { rho, j } => rho * y.powf(j),
        }
    }

    /// `R(y)`: `ln y` for a constant price, `-(1/j)·y^(-j)` for a power law.
    pub fn r_transform(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::invalid("y", "R(Y) requires Y > 0", y));
        }
        Ok(match *self {
            GCase::ConstantG { .. } => y.ln(),
            GCase::PowerG { j, .. } => -(1.0 / j) * y.powf(-j),
        })
    }

    pub fn r_inverse(&self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::invalid("r", "must be finite", r));
        }
        let y = match *self {
            GCase::ConstantG { .. } => r.exp(),
            GCase::PowerG { j, .. } => {
                let base = -j * r;
                if !(base > 0.0) {
                    return Err(Error::OutOfRange(format!(
                        "R = {r} is outside the range of R(Y) for j = {j}"
                    )));
                }
                base.powf(-1.0 / j)
            }
        };
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::OutOfRange(format!("R = {r} maps to Y = {y}")));
        }
        Ok(y)
    }

    /// `dR/dY` at `y`.
    pub fn r_derivative(&self, y: f64) -> f64 {
        match *self {
            GCase::ConstantG { .. } => 1.0 / y,
            GCase::PowerG { j, .. } => y.powf(-j - 1.0),
        }
    }

    /// Kick weight in `R`-space, `F(Y)·Y·R'(Y) = C·F(Y)/G(Y)`.
    #[inline]
    pub fn burst_weight(&self, f: &OutputFunction, y: f64) -> f64 {
        match *self {
            GCase::ConstantG { .. } => f.eval(y),
            GCase::PowerG { j, .. } => f.eval(y) * y.powf(-j),
        }
    }
}

/// Price model.
#[derive(Debug, Clone)]
pub enum PriceSpec {
    /// Price is zero between kicks: `P = -F(Y)·Σ δ(t/T - k)`.
    BurstOnly { f: OutputFunction },
    /// `P = p·G(Y) - q·F(Y)·Σ δ(t/T - k)` with `q = 1 - p`.
    Mixed {
        p: f64,
        q: f64,
        g: GCase,
        f: OutputFunction,
    },
}

impl PriceSpec {
    pub fn mixed(p: f64, q: f64, g: GCase, f: OutputFunction) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", "must lie in [0, 1]", p));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid("q", "must lie in [0, 1]", q));
        }
        if (p + q - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("q", "crisis measure must satisfy p + q = 1", q));
        }
        Ok(PriceSpec::Mixed { p, q, g, f })
    }
}

/// Time-dependent growth forcing `C(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForcingSpec {
    ConstantC { c: f64 },
    /// `C(t) = C·t^β`, `β > -1`.
    PowerC { c: f64, beta: f64 },
    /// `C(t) = C·t^(β-1)·E_{μ,β}(γ·t^μ)`.
    MittagLefflerC { c: f64, beta: f64, mu: f64, gamma: f64 },
}

impl ForcingSpec {
    pub fn power(c: f64, beta: f64) -> Result<Self> {
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::invalid("beta", "power forcing needs beta > -1", beta));
        }
        Ok(ForcingSpec::PowerC { c, beta })
    }

    pub fn mittag_leffler(c: f64, beta: f64, mu: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid("beta", "Mittag-Leffler forcing needs beta > 0", beta));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid("mu", "Mittag-Leffler order needs mu > 0", mu));
        }
        if !gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite", gamma));
        }
        Ok(ForcingSpec::MittagLefflerC { c, beta, mu, gamma })
    }

    /// Riemann-Liouville integral `(I^ν C)(t)` of order `ν > 0`, in closed form.
    pub fn integral(&self, nu: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        match *self {
            ForcingSpec::ConstantC { c } => Ok(c * t.powf(nu) / gamma_fn(nu + 1.0)?),
            ForcingSpec::PowerC { c, beta } => {
                Ok(c * gamma_fn(beta + 1.0)? / gamma_fn(nu + beta + 1.0)? * t.powf(nu + beta))
            }
            ForcingSpec::MittagLefflerC { c, beta, mu, gamma } => {
                let ml = mittag_leffler(&MlParams::new(mu, nu + beta)?, gamma * t.powf(mu))?;
                Ok(c * t.powf(nu + beta - 1.0) * ml)
            }
        }
    }
}

/// Normalization of the memoryless map onto `Z' = λ·Z·(1 - Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardNormalization {
    pub lambda: f64,
    /// `Z = scale · Y`.
    pub scale: f64,
}

/// Normalization of the logistic map with memory (`0 < α <= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryNormalization {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub eta: f64,
    /// `Z = scale · Y`.
    pub scale: f64,
}

pub fn normalize_standard(g: &GrowthParams, a: f64, b: f64) -> Result<StandardNormalization> {
    if a == 0.0 {
        return Err(Error::invalid("a", "normalization requires a != 0", a));
    }
    let mbt = g.m * b * g.period;
    let denom = g.v + mbt;
    if denom == 0.0 {
        return Err(Error::DivisionByZero("v + m·b·T = 0".into()));
    }
    Ok(StandardNormalization {
        lambda: 1.0 + mbt / g.v,
        scale: g.m * a * g.period / denom,
    })
}

pub fn normalize_memory(g: &GrowthParams, a: f64, b: f64) -> Result<MemoryNormalization> {
    let alpha = g.alpha.value();
    if alpha > 1.0 {
        return Err(Error::invalid("alpha", "memory normalization needs 0 < alpha <= 1", alpha));
    }
    if a == 0.0 {
        return Err(Error::invalid("a", "normalization requires a != 0", a));
    }
    if b == 0.0 {
        return Err(Error::invalid(
            "b",
            "normalized memory map needs b != 0; iterate the raw map instead",
            b,
        ));
    }
    let t_alpha = g.period.powf(alpha);
    let v_gamma = g.v * gamma_fn(alpha)?;
    let mbt = g.m * b * t_alpha;
    let mu = mbt / v_gamma;
    Ok(MemoryNormalization {
        alpha,
        lambda: 1.0 + mu,
        mu,
        eta: (v_gamma + mbt) / mbt,
        scale: g.m * a * t_alpha / (v_gamma + mbt),
    })
}

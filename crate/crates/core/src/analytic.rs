//! Closed-form solution of the linear fractional growth equation with a
//! constant price.

use crate::econ_model::{FractionalOrder, GrowthParams};
use crate::error::{Error, Result};
use crate::special_fn::{mittag_leffler, MlParams};

/// Natural growth `D^α Y = (m·P/v)·Y` with given initial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalGrowthProblem {
    pub g: GrowthParams,
    /// Constant price `P > 0`.
    pub price: f64,
    /// `[Y(0), Y'(0), …]`, one entry per integer order below `α`.
    pub init_derivs: Vec<f64>,
}

impl NaturalGrowthProblem {
    pub fn new(g: GrowthParams, price: f64, init_derivs: Vec<f64>) -> Result<Self> {
        if !(price > 0.0) || !price.is_finite() {
            return Err(Error::invalid("P", "price must be > 0", price));
        }
        check_init(&g.alpha, &init_derivs)?;
        Ok(NaturalGrowthProblem { g, price, init_derivs })
    }

    /// `m·P/v`.
    pub fn rate(&self) -> f64 {
        self.g.rate() * self.price
    }
}

fn check_init(alpha: &FractionalOrder, init: &[f64]) -> Result<()> {
    if init.len() != alpha.bracket_n() {
        return Err(Error::invalid(
            "y0",
            &format!("need {} initial derivative(s)", alpha.bracket_n()),
            init.len(),
        ));
    }
    Ok(())
}

/// `Y(t) = Σ_k Y^(k)(0)·t^k·E_{α,k+1}(rate·t^α)`.
pub fn growth_solution(alpha: &FractionalOrder, rate: f64, init: &[f64], t: f64) -> Result<f64> {
    check_init(alpha, init)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "time must be >= 0", t));
    }
    let a = alpha.value();
    let z = rate * t.powf(a);
    let mut y = 0.0;
    for (k, &d) in init.iter().enumerate() {
        if k > 0 && t == 0.0 {
            continue;
        }
        let e = mittag_leffler(&MlParams::new(a, k as f64 + 1.0)?, z)?;
        y += d * t.powi(k as i32) * e;
    }
    Ok(y)
}

pub fn natural_growth_solution(prob: &NaturalGrowthProblem, t: f64) -> Result<f64> {
    growth_solution(&prob.g.alpha, prob.rate(), &prob.init_derivs, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(alpha: f64, price: f64, init: Vec<f64>) -> NaturalGrowthProblem {
        NaturalGrowthProblem::new(GrowthParams::new(0.5, 1.0, 1.0, alpha).unwrap(), price, init).unwrap()
    }

    #[test]
    fn value_at_zero_is_initial_output() {
        assert_eq!(natural_growth_solution(&problem(0.7, 1.0, vec![2.5]), 0.0).unwrap(), 2.5);
        assert_eq!(natural_growth_solution(&problem(1.5, 1.0, vec![2.5, 9.0]), 0.0).unwrap(), 2.5);
    }

    #[test]
    fn alpha_one_is_exponential() {
        let prob = problem(1.0, 1.0, vec![1.0]);
        let y = natural_growth_solution(&prob, 2.0).unwrap();
        assert!((y - std::f64::consts::E).abs() < 1e-14);
        for i in 0..=20 {
            let t = 0.5 * i as f64;
            let y = natural_growth_solution(&prob, t).unwrap();
            let want = (0.5 * t).exp();
            assert!((y - want).abs() / want < 1e-10);
        }
    }

    #[test]
    fn half_order_reference() {
        let prob = problem(0.5, 2.0, vec![1.0]);
        // e·(1 + erf 1), mpmath
        let y = natural_growth_solution(&prob, 1.0).unwrap();
        assert!((y - 5.008_980_080_762_283_466).abs() < 1e-12);
    }

    #[test]
    fn second_order_uses_derivative() {
        // α = 2, Y'' = Y: Y = cosh t + sinh t for Y(0) = Y'(0) = 1
        let prob = problem(2.0, 2.0, vec![1.0, 1.0]);
        let y = natural_growth_solution(&prob, 1.3).unwrap();
        assert!((y - 1.3f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        let g = GrowthParams::new(0.5, 1.0, 1.0, 1.5).unwrap();
        assert!(NaturalGrowthProblem::new(g, 1.0, vec![1.0]).is_err());
        assert!(NaturalGrowthProblem::new(g, 0.0, vec![1.0, 0.0]).is_err());
        assert!(natural_growth_solution(&problem(0.5, 1.0, vec![1.0]), -1.0).is_err());
    }

    #[test]
    fn increasing_in_time() {
        let prob = problem(0.6, 1.0, vec![0.7]);
        let mut prev = 0.0;
        for i in 0..60 {
            let y = natural_growth_solution(&prob, 0.25 * i as f64).unwrap();
            assert!(y > prev);
            prev = y;
        }
    }
}

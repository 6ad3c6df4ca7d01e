//! Exact integration of the memoryless (`α = 1`) kicked flow, used as an
//! independent reference for the generalized maps.
//!
//! Between kicks the output follows the smooth growth law in `Y`-space,
//! solved in closed form. At each kick `R(Y)` drops by
//! `q·(m/v)·T·C_G·F(Y)/G(Y)` evaluated at the left limit `Y(kT - 0)`.

use super::{Halt, HaltReason, MapSpec, StateVector, Trajectory, ESCAPE_THRESHOLD};
use crate::econ_model::{ForcingSpec, GCase, PriceSpec};
use crate::error::{Error, Result};

/// Closed-form flow of `dY/dt = p·(m/v)·C·Y·G(Y)/C_G` over time `dt`.
fn flow(g: &GCase, y: f64, growth: f64, dt: f64) -> Option<f64> {
    match *g {
        GCase::ConstantG { .. } => Some(y * (growth * dt).exp()),
        GCase::PowerG { j, .. } => {
            let base = y.powf(-j) - j * growth * dt;
            (base > 0.0).then(|| base.powf(-1.0 / j))
        }
    }
}

/// `α = 1` kicked flow sampled at `t = kT - 0`. States hold `R`, outputs `Y`.
pub fn kicked_flow_oracle_alpha1(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
) -> Result<Trajectory> {
    let MapSpec::GeneralizedGrowth {
        g,
        price: PriceSpec::Mixed { p, q, g: gc, f },
        forcing,
    } = spec
    else {
        return Err(Error::invalid(
            "map",
            "kicked-flow oracle needs a generalized map",
            spec.kind_name(),
        ));
    };
    if g.alpha.value() != 1.0 {
        return Err(Error::invalid(
            "alpha",
            "kicked-flow oracle is exact only for alpha = 1",
            g.alpha.value(),
        ));
    }
    let ForcingSpec::ConstantC { c } = *forcing else {
        return Err(Error::invalid("forcing", "kicked-flow oracle needs constant forcing", "non-constant"));
    };
    if init.len() != 1 {
        return Err(Error::invalid("init", "initial state must have 1 component", init.len()));
    }

    let rate = g.m / g.v;
    let period = g.period;
    let growth = p * rate * c;
    let jump_scale = q * rate * period * gc.c_constant();

    let mut y = gc.r_inverse(init[0])?;
    let mut states = vec![init];
    let mut outputs = vec![y];
    let mut halt = None;

    for k in 1..=n_steps {
        // kick at t = (k-1)T, none at t = 0
        if k > 1 {
            let r_minus = gc.r_transform(y)?;
            let r_plus = r_minus - jump_scale * f.eval(y) / gc.g(y);
            match gc.r_inverse(r_plus) {
                Ok(v) => y = v,
                Err(_) => {
                    halt = Some(Halt { step: k, reason: HaltReason::OutOfDomain });
                    break;
                }
            }
        }
        match flow(gc, y, growth, period) {
            Some(v) if v.is_finite() && v > 0.0 && v <= ESCAPE_THRESHOLD => y = v,
            Some(v) if !v.is_finite() => {
                halt = Some(Halt { step: k, reason: HaltReason::NonFinite });
                break;
            }
            Some(_) => {
                halt = Some(Halt { step: k, reason: HaltReason::Escaped });
                break;
            }
            None => {
                halt = Some(Halt { step: k, reason: HaltReason::OutOfDomain });
                break;
            }
        }
        states.push(StateVector::scalar(gc.r_transform(y)?));
        outputs.push(y);
    }

    Ok(Trajectory {
        spec: spec.clone(),
        first_step: 0,
        states,
        outputs,
        halt,
    })
}

//! Discrete maps with power-law memory.
//!
//! Every map here is the exact stroboscopic image of a kicked fractional
//! growth equation: the state at step `n` is the left limit `X(nT - 0)` of
//! the continuous solution and its integer-order derivatives. Two
//! evaluation routes exist for the memory maps:
//!
//! * **direct**: the Volterra form, which weights the full history by
//!   `(n + 1 - k)^(α - 1 - s)`;
//! * **incremental**: the step-difference form, which carries `X_n` forward
//!   and weights older kicks by `V_α(n - k)`.
//!
//! Both routes keep the whole history; memory is never truncated.
//!
//! The direct form gives `X_1` from the polynomial and forcing parts alone
//! (the memory sum is empty), and the incremental route reproduces that
//! by default ([`SeedStep::Volterra`]). [`SeedStep::Incremental`] instead
//! applies the step-difference form at `n = 0` as well.

mod engine;
mod oracle;

pub use engine::Simulator;
pub use oracle::kicked_flow_oracle_alpha1;

use std::ops::Index;

use crate::econ_model::{
    ForcingSpec, GCase, GrowthParams, MemoryNormalization, OutputFunction, PriceSpec,
};
use crate::error::{Error, Result};

/// A state value beyond this magnitude marks the orbit as escaped.
pub const ESCAPE_THRESHOLD: f64 = 1e10;

/// Which map family to iterate.
#[derive(Debug, Clone)]
pub enum MapSpec {
    /// Growth driven only by price bursts; state is `Y` and its derivatives.
    BurstGrowth { g: GrowthParams, f: OutputFunction },
    /// Mixed price with smooth part `G`; state is `R(Y)` and its derivatives.
    GeneralizedGrowth {
        g: GrowthParams,
        price: PriceSpec,
        forcing: ForcingSpec,
    },
    /// `Z' = λ·Z·(1 - Z)`.
    StandardLogistic { lambda: f64 },
    /// Logistic map with memory in normalized variables, `0 < α <= 1`.
    NormalizedLogisticMemory { norm: MemoryNormalization },
}

impl MapSpec {
    pub fn burst(g: GrowthParams, f: OutputFunction) -> Self {
        MapSpec::BurstGrowth { g, f }
    }

    pub fn generalized(g: GrowthParams, price: PriceSpec, forcing: ForcingSpec) -> Result<Self> {
        if let PriceSpec::BurstOnly { .. } = price {
            return Err(Error::invalid(
                "price",
                "generalized maps need a mixed price (p, q, G, F)",
                "burst-only",
            ));
        }
        Ok(MapSpec::GeneralizedGrowth { g, price, forcing })
    }

    pub fn logistic(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be finite", lambda));
        }
        Ok(MapSpec::StandardLogistic { lambda })
    }

    /// Number of components in the state vector.
    pub fn dimension(&self) -> usize {
        match self {
            MapSpec::BurstGrowth { g, .. } | MapSpec::GeneralizedGrowth { g, .. } => {
                g.alpha.bracket_n()
            }
            MapSpec::StandardLogistic { .. } | MapSpec::NormalizedLogisticMemory { .. } => 1,
        }
    }

    pub fn growth(&self) -> Option<&GrowthParams> {
        match self {
            MapSpec::BurstGrowth { g, .. } | MapSpec::GeneralizedGrowth { g, .. } => Some(g),
            _ => None,
        }
    }

    /// The smooth price part of a generalized map.
    pub fn g_case(&self) -> Option<GCase> {
        match self {
            MapSpec::GeneralizedGrowth {
                price: PriceSpec::Mixed { g, .. },
                ..
            } => Some(*g),
            _ => None,
        }
    }

    /// `λ ∈ (0, 4]` keeps the standard logistic orbit of `[0, 1]` bounded.
    pub fn bounded_orbit_guaranteed(&self) -> bool {
        match *self {
            MapSpec::StandardLogistic { lambda } => lambda > 0.0 && lambda <= 4.0,
            _ => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MapSpec::BurstGrowth { .. } => "burst",
            MapSpec::GeneralizedGrowth { .. } => "generalized",
            MapSpec::StandardLogistic { .. } => "logistic",
            MapSpec::NormalizedLogisticMemory { .. } => "logistic-memory",
        }
    }
}

/// Per-kick state `[X^(0), ..., X^(N-1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Self {
        StateVector(values)
    }

    pub fn scalar(x: f64) -> Self {
        StateVector(vec![x])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Index<usize> for StateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    /// A state value exceeded [`ESCAPE_THRESHOLD`].
    Escaped,
    /// Arithmetic produced NaN or infinity.
    NonFinite,
    /// `R` left the range of `R(Y)`, so `Y` is undefined.
    OutOfDomain,
}

/// Why and where a trajectory stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Halt {
    pub step: usize,
    pub reason: HaltReason,
}

/// Recorded orbit of a map.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: MapSpec,
    pub(crate) first_step: usize,
    pub(crate) states: Vec<StateVector>,
    pub(crate) outputs: Vec<f64>,
    pub(crate) halt: Option<Halt>,
}

impl Trajectory {
    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// Observable per recorded state: `Y` for the growth maps (the `Y`-view
    /// of `R` for generalized maps, `NaN` where undefined), `Z` for the
    /// logistic maps.
    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    /// Step index of `states()[0]`.
    pub fn first_step(&self) -> usize {
        self.first_step
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn halt(&self) -> Option<Halt> {
        self.halt
    }

    /// Step at which the orbit stopped, if it did.
    pub fn escaped_at(&self) -> Option<usize> {
        self.halt.map(|h| h.step)
    }

    /// Component `s` of every recorded state.
    pub fn component(&self, s: usize) -> Vec<f64> {
        self.states.iter().map(|x| x[s]).collect()
    }

    /// Keep only the last `n` recorded states.
    pub fn tail(mut self, n: usize) -> Self {
        let drop = self.states.len().saturating_sub(n);
        self.states.drain(..drop);
        self.outputs.drain(..drop);
        self.first_step += drop;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Direct,
    Incremental,
}

/// Convention for the first step of the incremental forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedStep {
    /// `X_1` from the Volterra form (empty memory sum).
    #[default]
    Volterra,
    /// Apply the step-difference form at `n = 0` too.
    Incremental,
}

/// Seeded defects used to check that the verification suite notices them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Negate `V_α` in the incremental memory sum.
    FlipKernelSign,
    /// Use `Γ(α + 1)` instead of `Γ(α)` in the direct memory coefficient.
    GammaShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimOptions {
    pub engine: Engine,
    pub seed: SeedStep,
    #[doc(hidden)]
    pub fault: Fault,
}

impl SimOptions {
    pub fn direct() -> Self {
        SimOptions::default()
    }

    pub fn incremental(seed: SeedStep) -> Self {
        SimOptions {
            engine: Engine::Incremental,
            seed,
            fault: Fault::None,
        }
    }

    #[doc(hidden)]
    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }
}

/// Run any map for `n_steps` steps from `init`.
pub fn simulate(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
    opts: SimOptions,
) -> Result<Trajectory> {
    let mut sim = Simulator::new(spec.clone(), init, opts)?;
    sim.reserve(n_steps);
    sim.run(n_steps)?;
    Ok(sim.into_trajectory())
}

fn require_burst(spec: &MapSpec) -> Result<()> {
    match spec {
        MapSpec::BurstGrowth { .. } => Ok(()),
        other => Err(Error::invalid("map", "expected a burst growth map", other.kind_name())),
    }
}

fn require_generalized(spec: &MapSpec) -> Result<()> {
    match spec {
        MapSpec::GeneralizedGrowth { .. } => Ok(()),
        other => Err(Error::invalid("map", "expected a generalized growth map", other.kind_name())),
    }
}

/// Burst-only map evaluated from its Volterra form.
pub fn simulate_direct(spec: &MapSpec, init: StateVector, n_steps: usize) -> Result<Trajectory> {
    require_burst(spec)?;
    simulate(spec, init, n_steps, SimOptions::direct())
}

/// Burst-only map evaluated in step-difference form.
pub fn simulate_incremental(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
    seed: SeedStep,
) -> Result<Trajectory> {
    require_burst(spec)?;
    simulate(spec, init, n_steps, SimOptions::incremental(seed))
}

#[inline]
pub fn step_standard_logistic(lambda: f64, z: f64) -> f64 {
    lambda * z * (1.0 - z)
}

/// Logistic map with memory in normalized variables.
pub fn simulate_logistic_memory_normalized(
    norm: &MemoryNormalization,
    z0: f64,
    n_steps: usize,
    seed: SeedStep,
) -> Result<Trajectory> {
    let spec = MapSpec::NormalizedLogisticMemory { norm: *norm };
    simulate(&spec, StateVector::scalar(z0), n_steps, SimOptions::incremental(seed))
}

/// Generalized map evaluated from its Volterra form. States are in
/// `R`-space; [`Trajectory::outputs`] holds the `Y`-view.
pub fn simulate_generalized(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
) -> Result<Trajectory> {
    require_generalized(spec)?;
    simulate(spec, init, n_steps, SimOptions::direct())
}

pub fn simulate_generalized_incremental(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
    seed: SeedStep,
) -> Result<Trajectory> {
    require_generalized(spec)?;
    simulate(spec, init, n_steps, SimOptions::incremental(seed))
}

/// `R`-space initial state from `Y^(0)(0)` and, when `N = 2`, `Y^(1)(0)`.
pub fn r_initial_state(g_case: &GCase, y: &[f64]) -> Result<StateVector> {
    let y0 = *y
        .first()
        .ok_or_else(|| Error::invalid("y0", "initial output is required", "none"))?;
    let mut r = vec![g_case.r_transform(y0)?];
    if let Some(&d1) = y.get(1) {
        r.push(g_case.r_derivative(y0) * d1);
    }
    if y.len() > 2 {
        return Err(Error::invalid("y0", "at most two initial derivatives are supported", y.len()));
    }
    Ok(StateVector::new(r))
}

use super::{
    Engine, Fault, Halt, HaltReason, MapSpec, SeedStep, SimOptions, StateVector, Trajectory,
    ESCAPE_THRESHOLD,
};
use crate::econ_model::{ForcingSpec, GCase, MemoryNormalization, OutputFunction, PriceSpec};
use crate::error::{Error, Result};
use crate::special_fn::{gamma_fn, int_pow, kernel_table, KernelTable};

/// Maps `X^(0)` to the observable `Y` and the kick weight `w`.
#[derive(Debug, Clone)]
enum Observer {
    /// `Y = X`, `w = F(Y)·Y`.
    Burst(OutputFunction),
    /// `Y = R^{-1}(X)`, `w = F(Y)·Y·R'(Y)`.
    Generalized { g: GCase, f: OutputFunction },
}

impl Observer {
    fn observe(&self, x0: f64) -> std::result::Result<(f64, f64), HaltReason> {
        match self {
            Observer::Burst(f) => Ok((x0, f.eval(x0) * x0)),
            Observer::Generalized { g, f } => {
                let y = g.r_inverse(x0).map_err(|_| HaltReason::OutOfDomain)?;
                Ok((y, g.burst_weight(f, y)))
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Forcing {
    /// `p·m/v`.
    scale: f64,
    spec: ForcingSpec,
    /// `p·C·m·T^(α-s) / (v·Γ(α+1-s))` per component, constant forcing only.
    step_coef: Option<Vec<f64>>,
}

/// The Volterra-type maps: burst-only and generalized growth.
#[derive(Debug, Clone)]
struct Volterra {
    alpha: f64,
    dim: usize,
    period: f64,
    x0: Vec<f64>,
    /// `q·m·T^(α-s) / (v·Γ(α-s))` for the direct form.
    direct_coef: Vec<f64>,
    /// Same coefficient for the step-difference form.
    incr_coef: Vec<f64>,
    forcing: Option<Forcing>,
    /// `j^(α-1-s)` for `j = 0..`, per component.
    powers: Vec<Vec<f64>>,
    /// `V_{α-s}`, per component.
    kernels: Vec<KernelTable>,
    /// `T^k / k!`.
    taylor: Vec<f64>,
    observer: Observer,
}

#[derive(Debug, Clone)]
enum Kind {
    Logistic { lambda: f64 },
    NormalizedMemory { norm: MemoryNormalization, kernel: KernelTable },
    Volterra(Box<Volterra>),
}

/// Step-by-step driver that owns the full history of one orbit.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: MapSpec,
    opts: SimOptions,
    kind: Kind,
    states: Vec<StateVector>,
    outputs: Vec<f64>,
    weights: Vec<f64>,
    halt: Option<Halt>,
}

fn out_of_bounds(x: f64) -> Option<HaltReason> {
    if !x.is_finite() {
        Some(HaltReason::NonFinite)
    } else if x.abs() > ESCAPE_THRESHOLD {
        Some(HaltReason::Escaped)
    } else {
        None
    }
}

impl Volterra {
    fn build(spec: &MapSpec, x0: &[f64], fault: Fault) -> Result<Self> {
        let (g, q, observer, forcing) = match spec {
            MapSpec::BurstGrowth { g, f } => (g, 1.0, Observer::Burst(f.clone()), None),
            MapSpec::GeneralizedGrowth {
                g,
                price: PriceSpec::Mixed { p, q, g: gc, f },
                forcing,
            } => (
                g,
                *q,
                Observer::Generalized {
                    g: *gc,
                    f: f.clone(),
                },
                Some((*p, *forcing)),
            ),
            _ => unreachable!("not a Volterra map"),
        };
        let alpha = g.alpha.value();
        let dim = g.alpha.bracket_n();
        let period = g.period;

        let mut direct_coef = Vec::with_capacity(dim);
        let mut incr_coef = Vec::with_capacity(dim);
        for s in 0..dim {
            let nu = alpha - s as f64;
            let base = q * g.m * period.powf(nu) / g.v;
            let direct_gamma = if fault == Fault::GammaShift {
                gamma_fn(nu + 1.0)?
            } else {
                gamma_fn(nu)?
            };
            direct_coef.push(base / direct_gamma);
            incr_coef.push(base / gamma_fn(nu)?);
        }

        let forcing = match forcing {
            Some((p, spec)) => {
                let scale = p * g.m / g.v;
                let step_coef = match spec {
                    ForcingSpec::ConstantC { c } => Some(
                        (0..dim)
                            .map(|s| {
                                let nu = alpha - s as f64;
                                Ok(p * c * g.m * period.powf(nu) / (g.v * gamma_fn(nu + 1.0)?))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    _ => None,
                };
                Some(Forcing {
                    scale,
                    spec,
                    step_coef,
                })
            }
            None => None,
        };

        let kernels = (0..dim)
            .map(|s| kernel_table(alpha - s as f64, 1))
            .collect::<Result<Vec<_>>>()?;

        let mut taylor = vec![1.0; dim];
        for k in 1..dim {
            taylor[k] = taylor[k - 1] * period / k as f64;
        }

        Ok(Volterra {
            alpha,
            dim,
            period,
            x0: x0.to_vec(),
            direct_coef,
            incr_coef,
            forcing,
            powers: vec![Vec::new(); dim],
            kernels,
            taylor,
            observer,
        })
    }

    /// Make `powers[s]` cover `j = 0..=j_max`.
    fn ensure_powers(&mut self, s: usize, j_max: usize) {
        let e = self.alpha - 1.0 - s as f64;
        let table = &mut self.powers[s];
        while table.len() <= j_max {
            let j = table.len();
            table.push(int_pow(j, e));
        }
    }

    fn ensure_kernel(&mut self, s: usize, z_max: usize) {
        let table = &mut self.kernels[s];
        if table.n_max() < z_max {
            let target = z_max.max(2 * table.n_max());
            table.extend_to(target);
        }
    }

    /// `Σ_k T^k/k! · X_0^(k+s) · m^k`.
    fn polynomial(&self, s: usize, m: usize) -> f64 {
        (0..self.dim - s)
            .map(|k| self.taylor[k] * self.x0[k + s] * int_pow(m, k as f64))
            .sum()
    }

    fn forcing_at(&self, s: usize, m: usize) -> Result<f64> {
        match &self.forcing {
            Some(f) => {
                let nu = self.alpha - s as f64;
                Ok(f.scale * f.spec.integral(nu, m as f64 * self.period)?)
            }
            None => Ok(0.0),
        }
    }

    /// Forcing contribution to `X_{n+1} - X_n`.
    fn forcing_increment(&self, s: usize, n: usize) -> Result<f64> {
        match &self.forcing {
            Some(f) => match &f.step_coef {
                Some(coef) => {
                    let nu = self.alpha - s as f64;
                    Ok(coef[s] * (int_pow(n + 1, nu) - int_pow(n, nu)))
                }
                None => Ok(self.forcing_at(s, n + 1)? - self.forcing_at(s, n)?),
            },
            None => Ok(0.0),
        }
    }

    /// Volterra form for `X_{n+1}`, `w[k]` the kick weights.
    fn direct(&mut self, n: usize, w: &[f64]) -> Result<Vec<f64>> {
        let m = n + 1;
        let mut next = Vec::with_capacity(self.dim);
        for s in 0..self.dim {
            self.ensure_powers(s, m);
            let powers = &self.powers[s];
            let mut memory = 0.0;
            for (k, wk) in w.iter().enumerate().take(n + 1).skip(1) {
                memory += powers[m - k] * wk;
            }
            next.push(
                self.polynomial(s, m) + self.forcing_at(s, m)? - self.direct_coef[s] * memory,
            );
        }
        Ok(next)
    }

    /// Step-difference form for `X_{n+1}` from `X_n`.
    fn incremental(&mut self, n: usize, xn: &[f64], w: &[f64], fault: Fault) -> Result<Vec<f64>> {
        let sign = if fault == Fault::FlipKernelSign { -1.0 } else { 1.0 };
        let mut next = Vec::with_capacity(self.dim);
        for s in 0..self.dim {
            let mut poly = 0.0;
            for k in 1..self.dim - s {
                let kf = k as f64;
                poly += self.taylor[k] * self.x0[k + s] * (int_pow(n + 1, kf) - int_pow(n, kf));
            }
            self.ensure_kernel(s, n);
            let kernel = &self.kernels[s];
            let mut memory = 0.0;
            for (k, wk) in w.iter().enumerate().take(n).skip(1) {
                memory += kernel.get(n - k) * wk;
            }
            let coef = self.incr_coef[s];
            next.push(
                xn[s] + poly + self.forcing_increment(s, n)?
                    - coef * w[n]
                    - coef * sign * memory,
            );
        }
        Ok(next)
    }
}

impl Simulator {
    pub fn new(spec: MapSpec, init: StateVector, opts: SimOptions) -> Result<Self> {
        let dim = spec.dimension();
        if init.len() != dim {
            return Err(Error::invalid(
                "init",
                &format!("initial state must have {dim} component(s)"),
                init.len(),
            ));
        }
        if let Some(x) = init.values().iter().find(|x| !x.is_finite()) {
            return Err(Error::invalid("init", "initial state must be finite", x));
        }

        let kind = match &spec {
            MapSpec::StandardLogistic { lambda } => Kind::Logistic { lambda: *lambda },
            MapSpec::NormalizedLogisticMemory { norm } => {
                if !(norm.alpha > 0.0 && norm.alpha <= 1.0) {
                    return Err(Error::invalid(
                        "alpha",
                        "normalized memory map needs 0 < alpha <= 1",
                        norm.alpha,
                    ));
                }
                Kind::NormalizedMemory {
                    norm: *norm,
                    kernel: kernel_table(norm.alpha, 1)?,
                }
            }
            MapSpec::BurstGrowth { .. } | MapSpec::GeneralizedGrowth { .. } => {
                if opts.engine == Engine::Direct && opts.seed == SeedStep::Incremental {
                    return Err(Error::invalid(
                        "seed_step",
                        "the direct engine always uses the volterra seed",
                        "incremental",
                    ));
                }
                if let MapSpec::GeneralizedGrowth {
                    price: PriceSpec::BurstOnly { .. },
                    ..
                } = spec
                {
                    return Err(Error::invalid("price", "generalized maps need a mixed price", "burst-only"));
                }
                Kind::Volterra(Box::new(Volterra::build(&spec, init.values(), opts.fault)?))
            }
        };

        let mut sim = Simulator {
            spec,
            opts,
            kind,
            states: Vec::new(),
            outputs: Vec::new(),
            weights: Vec::new(),
            halt: None,
        };
        let (y, w) = sim.observe(init.values()).map_err(|reason| {
            Error::OutOfRange(format!("initial state {:?} is not admissible ({reason:?})", init.values()))
        })?;
        if let Some(reason) = out_of_bounds(y) {
            return Err(Error::OutOfRange(format!("initial output {y} ({reason:?})")));
        }
        sim.states.push(init);
        sim.outputs.push(y);
        sim.weights.push(w);
        Ok(sim)
    }

    fn observe(&self, x: &[f64]) -> std::result::Result<(f64, f64), HaltReason> {
        match &self.kind {
            Kind::Logistic { .. } => Ok((x[0], 0.0)),
            Kind::NormalizedMemory { norm, .. } => Ok((x[0], x[0] * (1.0 - norm.eta * x[0]))),
            Kind::Volterra(v) => v.observer.observe(x[0]),
        }
    }

    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }

    pub fn options(&self) -> SimOptions {
        self.opts
    }

    /// Index of the latest recorded state.
    pub fn step_index(&self) -> usize {
        self.states.len() - 1
    }

    pub fn current(&self) -> &StateVector {
        self.states.last().expect("simulator always holds the initial state")
    }

    pub fn output(&self) -> f64 {
        *self.outputs.last().expect("simulator always holds the initial state")
    }

    pub fn halted(&self) -> Option<Halt> {
        self.halt
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn reserve(&mut self, additional: usize) {
        self.states.reserve(additional);
        self.outputs.reserve(additional);
        self.weights.reserve(additional);
    }

    /// Advance one kick. Returns `Ok(false)` once the orbit has halted.
    pub fn step(&mut self) -> Result<bool> {
        if self.halt.is_some() {
            return Ok(false);
        }
        let n = self.step_index();
        let fault = self.opts.fault;
        let next: Vec<f64> = match &mut self.kind {
            Kind::Logistic { lambda } => {
                vec![super::step_standard_logistic(*lambda, self.states[n][0])]
            }
            Kind::NormalizedMemory { norm, kernel } => {
                let z = self.states[n][0];
                let seed_plain = n == 0 && self.opts.seed == SeedStep::Volterra;
                if seed_plain {
                    vec![z]
                } else {
                    if kernel.n_max() < n {
                        kernel.extend_to(n.max(2 * kernel.n_max()));
                    }
                    let sign = if fault == Fault::FlipKernelSign { -1.0 } else { 1.0 };
                    let mut memory = 0.0;
                    for k in 1..n {
                        memory += kernel.get(n - k) * self.weights[k];
                    }
                    vec![norm.lambda * z * (1.0 - z) + sign * norm.mu * memory]
                }
            }
            Kind::Volterra(v) => {
                let use_direct = self.opts.engine == Engine::Direct
                    || (n == 0 && self.opts.seed == SeedStep::Volterra);
                if use_direct {
                    v.direct(n, &self.weights)?
                } else {
                    v.incremental(n, self.states[n].values(), &self.weights, fault)?
                }
            }
        };

        if let Some(reason) = next.iter().find_map(|&x| out_of_bounds(x)) {
            self.halt = Some(Halt { step: n + 1, reason });
            return Ok(false);
        }
        match self.observe(&next) {
            Ok((y, w)) => {
                if let Some(reason) = out_of_bounds(y) {
                    self.halt = Some(Halt { step: n + 1, reason });
                    return Ok(false);
                }
                self.states.push(StateVector::new(next));
                self.outputs.push(y);
                self.weights.push(w);
                Ok(true)
            }
            Err(reason) => {
                self.states.push(StateVector::new(next));
                self.outputs.push(f64::NAN);
                self.weights.push(f64::NAN);
                self.halt = Some(Halt { step: n + 1, reason });
                Ok(false)
            }
        }
    }

    /// Advance up to `n_steps` kicks, stopping early on a halt.
    pub fn run(&mut self, n_steps: usize) -> Result<()> {
        for _ in 0..n_steps {
            if !self.step()? {
                break;
            }
        }
        Ok(())
    }

    /// Euclidean distance between the latest states of two orbits.
    pub fn separation(&self, other: &Simulator) -> f64 {
        self.current()
            .values()
            .iter()
            .zip(other.current().values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Pull the history towards `reference`:
    /// `x_k ← ref_k + factor·(x_k - ref_k)` for every recorded `k` that
    /// still influences the future.
    pub fn rescale_towards(&mut self, reference: &Simulator, factor: f64) {
        let len = self.states.len().min(reference.states.len());
        // a memoryless map only carries its latest state forward
        let start = match self.kind {
            Kind::Logistic { .. } => len.saturating_sub(1),
            _ => 0,
        };
        for k in start..len {
            let r = reference.states[k].values();
            for (x, rk) in self.states[k].values_mut().iter_mut().zip(r) {
                *x = rk + factor * (*x - rk);
            }
            match self.observe(self.states[k].values()) {
                Ok((y, w)) => {
                    self.outputs[k] = y;
                    self.weights[k] = w;
                }
                Err(reason) => {
                    self.halt = Some(Halt { step: k, reason });
                    return;
                }
            }
        }
        if let Kind::Volterra(v) = &mut self.kind {
            v.x0 = self.states[0].values().to_vec();
        }
    }

    pub fn into_trajectory(self) -> Trajectory {
        Trajectory {
            spec: self.spec,
            first_step: 0,
            states: self.states,
            outputs: self.outputs,
            halt: self.halt,
        }
    }
}

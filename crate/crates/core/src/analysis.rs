//! Chaos diagnostics for any [`MapSpec`]: long runs, period detection,
//! bifurcation scans and a two-orbit divergence exponent.
//!
//! Memory maps keep their whole history during transients; only the
//! recording of early states is suppressed.

use rayon::prelude::*;

use crate::econ_model::{ForcingSpec, GCase, GrowthParams, OutputFunction, PriceSpec};
use crate::error::{Error, Result};
use crate::maps::{simulate, MapSpec, SimOptions, Simulator, StateVector, Trajectory};

/// Longest period [`detect_period`] looks for.
pub const MAX_PERIOD: usize = 64;
/// Default period tolerance, scaled by the sample magnitude.
pub const DEFAULT_PERIOD_TOL: f64 = 1e-8;
pub const DEFAULT_DELTA0: f64 = 1e-8;

/// Simulate `n_steps` steps and keep the last `n_record_tail` states.
pub fn run_trajectory(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
    n_record_tail: usize,
    opts: SimOptions,
) -> Result<Trajectory> {
    if n_record_tail > n_steps + 1 {
        return Err(Error::invalid("tail", "must not exceed n_steps + 1", n_record_tail));
    }
    Ok(simulate(spec, init, n_steps, opts)?.tail(n_record_tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Periodic(usize),
    Aperiodic,
}

impl Period {
    pub fn value(self) -> Option<usize> {
        match self {
            Period::Periodic(p) => Some(p),
            Period::Aperiodic => None,
        }
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Period::Periodic(p) => write!(f, "{p}"),
            Period::Aperiodic => f.write_str("aperiodic"),
        }
    }
}

fn scaled_tol(samples: &[f64], tol: f64) -> f64 {
    tol * samples.iter().fold(1.0_f64, |m, x| m.max(x.abs()))
}

/// Whether `|x[i+p] - x[i]| < tol·max(1, max|x|)` holds for every `i`.
pub fn satisfies_period(samples: &[f64], p: usize, tol: f64) -> bool {
    if p == 0 || p >= samples.len() {
        return false;
    }
    let tol = scaled_tol(samples, tol);
    samples
        .iter()
        .zip(&samples[p..])
        .all(|(a, b)| (b - a).abs() < tol)
}

/// Smallest period `p <= 64` of the samples, looking only at periods that
/// fit at least twice.
pub fn detect_period(samples: &[f64], tol: f64) -> Period {
    if samples.iter().any(|x| !x.is_finite()) {
        return Period::Aperiodic;
    }
    let cap = MAX_PERIOD.min(samples.len() / 2);
    (1..=cap)
        .find(|&p| satisfies_period(samples, p, tol))
        .map_or(Period::Aperiodic, Period::Periodic)
}

/// Rebuild `spec` with one named parameter replaced.
///
/// Names: `lambda`, `alpha`, `m`, `v`, `T`, `a`, `b`, `p` (sets `q = 1 - p`),
/// `q`, `P0`, `rho`, `j`, `C`, `beta`, `mu`, `gamma`. For the normalized
/// memory map `lambda` fixes `μ = λ - 1` and `η = λ/μ`.
pub fn with_param(spec: &MapSpec, name: &str, value: f64) -> Result<MapSpec> {
    let unknown = || {
        Error::invalid(
            "param",
            &format!("`{name}` is not a parameter of the {} map", spec.kind_name()),
            value,
        )
    };
    match spec {
        MapSpec::StandardLogistic { .. } => match name {
            "lambda" => MapSpec::logistic(value),
            _ => Err(unknown()),
        },
        MapSpec::NormalizedLogisticMemory { norm } => {
            let mut norm = *norm;
            match name {
                "lambda" => {
                    if value == 1.0 {
                        return Err(Error::invalid("lambda", "memory map needs lambda != 1", value));
                    }
                    norm.lambda = value;
                    norm.mu = value - 1.0;
                    norm.eta = value / norm.mu;
                }
                "alpha" => {
                    if !(value > 0.0 && value <= 1.0) {
                        return Err(Error::invalid("alpha", "memory map needs 0 < alpha <= 1", value));
                    }
                    norm.alpha = value;
                }
                _ => return Err(unknown()),
            }
            Ok(MapSpec::NormalizedLogisticMemory { norm })
        }
        MapSpec::BurstGrowth { g, f } => {
            if let Some(g) = growth_with(g, name, value)? {
                return Ok(MapSpec::burst(g, f.clone()));
            }
            let f = output_with(f, name, value).ok_or_else(unknown)?;
            Ok(MapSpec::burst(*g, f))
        }
        MapSpec::GeneralizedGrowth { g, price, forcing } => {
            if let Some(g) = growth_with(g, name, value)? {
                return MapSpec::generalized(g, price.clone(), *forcing);
            }
            let PriceSpec::Mixed { p, q, g: gc, f } = price else {
                return Err(unknown());
            };
            let (mut p, mut q, mut gc, mut f) = (*p, *q, *gc, f.clone());
            let mut forcing = *forcing;
            match name {
                "p" => {
                    p = value;
                    q = 1.0 - value;
                }
                "q" => {
                    q = value;
                    p = 1.0 - value;
                }
                "P0" => gc = GCase::constant(value)?,
                "rho" | "j" => {
                    let GCase::PowerG { rho, j } = gc else {
                        return Err(unknown());
                    };
                    gc = if name == "rho" {
                        GCase::power(value, j)?
                    } else {
                        GCase::power(rho, value)?
                    };
                }
                "C" | "beta" | "mu" | "gamma" => forcing = forcing_with(&forcing, name, value).ok_or_else(unknown)??,
                _ => f = output_with(&f, name, value).ok_or_else(unknown)?,
            }
            MapSpec::generalized(*g, PriceSpec::mixed(p, q, gc, f)?, forcing)
        }
    }
}

fn growth_with(g: &GrowthParams, name: &str, value: f64) -> Result<Option<GrowthParams>> {
    let (m, v, t, alpha) = (g.m, g.v, g.period, g.alpha.value());
    let g = match name {
        "m" => GrowthParams::new(value, v, t, alpha)?,
        "v" => GrowthParams::new(m, value, t, alpha)?,
        "T" => GrowthParams::new(m, v, value, alpha)?,
        "alpha" => GrowthParams::new(m, v, t, value)?,
        _ => return Ok(None),
    };
    Ok(Some(g))
}

fn output_with(f: &OutputFunction, name: &str, value: f64) -> Option<OutputFunction> {
    let (a, b) = f.as_linear()?;
    match name {
        "a" => Some(OutputFunction::linear(value, b)),
        "b" => Some(OutputFunction::linear(a, value)),
        _ => None,
    }
}

fn forcing_with(f: &ForcingSpec, name: &str, value: f64) -> Option<Result<ForcingSpec>> {
    Some(match (*f, name) {
        (ForcingSpec::ConstantC { .. }, "C") => Ok(ForcingSpec::ConstantC { c: value }),
        (ForcingSpec::PowerC { beta, .. }, "C") => ForcingSpec::power(value, beta),
        (ForcingSpec::PowerC { c, .. }, "beta") => ForcingSpec::power(c, value),
        (ForcingSpec::MittagLefflerC { beta, mu, gamma, .. }, "C") => {
            ForcingSpec::mittag_leffler(value, beta, mu, gamma)
        }
        (ForcingSpec::MittagLefflerC { c, mu, gamma, .. }, "beta") => {
            ForcingSpec::mittag_leffler(c, value, mu, gamma)
        }
        (ForcingSpec::MittagLefflerC { c, beta, gamma, .. }, "mu") => {
            ForcingSpec::mittag_leffler(c, beta, value, gamma)
        }
        (ForcingSpec::MittagLefflerC { c, beta, mu, .. }, "gamma") => {
            ForcingSpec::mittag_leffler(c, beta, mu, value)
        }
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub param_name: String,
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    pub n_transient: usize,
    pub n_sample: usize,
    pub init: StateVector,
    pub opts: SimOptions,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid("from", "scan range needs from < to", self.lo));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("grid", "need at least 2 grid points", self.grid_points));
        }
        if self.n_sample == 0 {
            return Err(Error::invalid("sample", "need at least 1 sample", self.n_sample));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|i| if i + 1 == self.grid_points { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationRow {
    pub param: f64,
    pub sample_index: usize,
    pub value: f64,
    pub escaped: bool,
}

/// Rows ordered by `(param, sample_index)`. An orbit that stops early ends
/// with a single row flagged `escaped` whose value is `NaN`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BifurcationData {
    pub rows: Vec<BifurcationRow>,
}

impl BifurcationData {
    /// Recorded values per grid point, in grid order.
    pub fn by_param(&self) -> Vec<(f64, Vec<f64>, bool)> {
        let mut out: Vec<(f64, Vec<f64>, bool)> = Vec::new();
        for row in &self.rows {
            match out.last_mut() {
                Some((p, vals, esc)) if p.to_bits() == row.param.to_bits() => {
                    if row.escaped {
                        *esc = true;
                    } else {
                        vals.push(row.value);
                    }
                }
                _ => out.push((
                    row.param,
                    if row.escaped { vec![] } else { vec![row.value] },
                    row.escaped,
                )),
            }
        }
        out
    }

    /// Period of each grid point; escaped points count as aperiodic.
    pub fn periods(&self, tol: f64) -> Vec<(f64, Period)> {
        self.by_param()
            .into_iter()
            .map(|(p, vals, esc)| (p, if esc { Period::Aperiodic } else { detect_period(&vals, tol) }))
            .collect()
    }
}

fn scan_point(spec: &MapSpec, cfg: &ScanConfig, param: f64) -> Result<Vec<BifurcationRow>> {
    let spec = with_param(spec, &cfg.param_name, param)?;
    let n_steps = cfg.n_transient + cfg.n_sample;
    let tr = simulate(&spec, cfg.init.clone(), n_steps, cfg.opts)?;
    let first = (n_steps + 1 - cfg.n_sample).min(tr.len());
    let mut rows: Vec<BifurcationRow> = tr.outputs()[first..]
        .iter()
        .enumerate()
        .map(|(i, &value)| BifurcationRow { param, sample_index: i, value, escaped: false })
        .collect();
    if tr.halt().is_some() {
        rows.retain(|r| r.value.is_finite());
        rows.push(BifurcationRow {
            param,
            sample_index: rows.len(),
            value: f64::NAN,
            escaped: true,
        });
    }
    Ok(rows)
}

/// Run every grid point of `cfg` on `spec`, in parallel, merged in grid order.
pub fn bifurcation_scan(cfg: &ScanConfig, spec: &MapSpec) -> Result<BifurcationData> {
    cfg.validate()?;
    let grid = cfg.grid();
    let per_point = grid
        .par_iter()
        .map(|&param| scan_point(spec, cfg, param))
        .collect::<Result<Vec<_>>>()?;
    Ok(BifurcationData {
        rows: per_point.into_iter().flatten().collect(),
    })
}

/// Parameter values at which the period-doubling cascade passes
/// period 2, period 4 and the onset of aperiodic motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeLandmarks {
    pub period2: Option<f64>,
    pub period4: Option<f64>,
    pub chaos: Option<f64>,
}

/// Locate the cascade in a scan classified by [`BifurcationData::periods`].
///
/// The period-`2^k` onsets are the first grid values showing that period.
/// Chaos onset is the first grid value that starts a run of `persist`
/// consecutive aperiodic points; isolated aperiodic points come from slow
/// convergence right at a bifurcation.
pub fn cascade_landmarks(periods: &[(f64, Period)], persist: usize) -> CascadeLandmarks {
    let first = |want: usize| {
        periods
            .iter()
            .find(|(_, p)| *p == Period::Periodic(want))
            .map(|(x, _)| *x)
    };
    let chaos = periods
        .windows(persist.max(1))
        .find(|w| w.iter().all(|(_, p)| *p == Period::Aperiodic))
        .map(|w| w[0].0);
    CascadeLandmarks {
        period2: first(2),
        period4: first(4),
        chaos,
    }
}

/// Two-orbit estimate of the largest divergence exponent.
///
/// The perturbed orbit starts `delta0` away in the first component. Every
/// `renorm_every` steps the whole perturbed history is pulled back to
/// distance `delta0` from the reference, and `ln(d/delta0)` is accumulated.
pub fn divergence_exponent(
    spec: &MapSpec,
    init: StateVector,
    n_steps: usize,
    delta0: f64,
    renorm_every: usize,
    opts: SimOptions,
) -> Result<f64> {
    if !(delta0 > 0.0) || !delta0.is_finite() {
        return Err(Error::invalid("delta0", "must be > 0", delta0));
    }
    if renorm_every == 0 {
        return Err(Error::invalid("renorm_every", "must be >= 1", renorm_every));
    }
    if n_steps < renorm_every {
        return Err(Error::invalid("n_steps", "must be >= renorm_every", n_steps));
    }
    let mut shifted = init.values().to_vec();
    shifted[0] += delta0;
    let mut a = Simulator::new(spec.clone(), init, opts)?;
    let mut b = Simulator::new(spec.clone(), StateVector::new(shifted), opts)?;
    a.reserve(n_steps);
    b.reserve(n_steps);

    let mut sum = 0.0;
    let mut steps = 0;
    while steps + renorm_every <= n_steps {
        for _ in 0..renorm_every {
            let ok_a = a.step()?;
            let ok_b = b.step()?;
            if !ok_a || !ok_b {
                let which = match (ok_a, ok_b) {
                    (false, false) => "both orbits",
                    (false, true) => "reference orbit",
                    _ => "perturbed orbit",
                };
                return Err(Error::UndefinedExponent(format!(
                    "{which} stopped at step {}",
                    steps + 1
                )));
            }
        }
        steps += renorm_every;
        let d = a.separation(&b);
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::UndefinedExponent(format!("separation {d} at step {steps}")));
        }
        sum += (d / delta0).ln();
        b.rescale_towards(&a, delta0 / d);
    }
    Ok(sum / steps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ_model::normalize_memory;
    use proptest::prelude::*;

    fn logistic(lambda: f64) -> MapSpec {
        MapSpec::logistic(lambda).unwrap()
    }

    #[test]
    fn fixed_point_tail() {
        let tr = run_trajectory(&logistic(4.0), StateVector::scalar(0.75), 20, 5, SimOptions::direct()).unwrap();
        assert_eq!(tr.outputs(), &[0.75; 5]);
    }

    #[test]
    fn two_cycle_tail() {
        let tr = run_trajectory(&logistic(3.2), StateVector::scalar(0.3), 10_000, 4, SimOptions::direct())
            .unwrap();
        // roots of the period-2 polynomial, mpmath
        let (lo, hi) = (0.513_044_509_532_630_0, 0.799_455_490_467_370_0);
        let ys = tr.outputs();
        let (a, b) = if ys[0] < ys[1] { (lo, hi) } else { (hi, lo) };
        for (i, y) in ys.iter().enumerate() {
            let want = if i % 2 == 0 { a } else { b };
            assert!((y - want).abs() < 1e-12);
        }
        assert_eq!(detect_period(ys, DEFAULT_PERIOD_TOL), Period::Periodic(2));
    }

    #[test]
    fn zero_forcing_tail_is_constant() {
        let spec = MapSpec::burst(
            GrowthParams::new(0.5, 1.0, 1.0, 0.4).unwrap(),
            OutputFunction::linear(0.0, 0.0),
        );
        let tr = run_trajectory(&spec, StateVector::scalar(0.6), 100, 10, SimOptions::direct()).unwrap();
        assert_eq!(tr.outputs(), &[0.6; 10]);
    }

    #[test]
    fn period_examples() {
        assert_eq!(detect_period(&[0.3; 200], 1e-8), Period::Periodic(1));
        let tr = run_trajectory(&logistic(4.0), StateVector::scalar(0.3), 5000, 256, SimOptions::direct())
            .unwrap();
        assert_eq!(detect_period(tr.outputs(), 1e-6), Period::Aperiodic);
        let cycle: Vec<f64> = (0..200).map(|i| [1.0, 2.0, 3.0][i % 3]).collect();
        assert_eq!(detect_period(&cycle, 1e-8), Period::Periodic(3));
        assert_eq!(detect_period(&[1.0, f64::NAN, 1.0, f64::NAN], 1e-8), Period::Aperiodic);
    }

    #[test]
    fn tolerance_scales_with_magnitude() {
        let xs: Vec<f64> = (0..200).map(|i| 1e6 + if i % 2 == 0 { 0.0 } else { 1e-3 }).collect();
        assert_eq!(detect_period(&xs, 1e-8), Period::Periodic(1));
        assert_eq!(detect_period(&xs, 1e-10), Period::Periodic(2));
    }

    fn scan(lo: f64, hi: f64, grid: usize) -> ScanConfig {
        ScanConfig {
            param_name: "lambda".into(),
            lo,
            hi,
            grid_points: grid,
            n_transient: 5000,
            n_sample: 128,
            init: StateVector::scalar(0.3),
            opts: SimOptions::direct(),
        }
    }

    #[test]
    fn stable_fixed_point_band() {
        let data = bifurcation_scan(&scan(2.5, 2.9, 21), &logistic(3.0)).unwrap();
        assert_eq!(data.rows.len(), 21 * 128);
        for (_, p) in data.periods(DEFAULT_PERIOD_TOL) {
            assert_eq!(p, Period::Periodic(1));
        }
    }

    #[test]
    fn scan_rows_are_ordered() {
        let data = bifurcation_scan(&scan(3.0, 4.0, 11), &logistic(3.0)).unwrap();
        for w in data.rows.windows(2) {
            let key = |r: &BifurcationRow| (r.param, r.sample_index);
            assert!(key(&w[0]) < key(&w[1]));
        }
        let p32 = data.periods(DEFAULT_PERIOD_TOL);
        assert!((p32[2].0 - 3.2).abs() < 1e-12);
        assert_eq!(p32[2].1, Period::Periodic(2));
        assert!(p32.iter().filter(|(l, _)| *l > 3.57).any(|(_, p)| *p == Period::Aperiodic));
    }

    #[test]
    fn scan_flags_escape() {
        let mut cfg = scan(3.5, 4.5, 3);
        cfg.n_transient = 50;
        let data = bifurcation_scan(&cfg, &logistic(3.0)).unwrap();
        let last = data.rows.last().unwrap();
        assert_eq!(last.param, 4.5);
        assert!(last.escaped && last.value.is_nan());
        assert!(data.rows.iter().filter(|r| r.param < 4.5).all(|r| !r.escaped));
    }

    #[test]
    fn scan_rejects_bad_config() {
        assert!(bifurcation_scan(&scan(3.0, 2.0, 10), &logistic(3.0)).is_err());
        assert!(bifurcation_scan(&scan(2.0, 3.0, 1), &logistic(3.0)).is_err());
        let mut cfg = scan(2.0, 3.0, 4);
        cfg.param_name = "alpha".into();
        assert!(bifurcation_scan(&cfg, &logistic(3.0)).is_err());
    }

    #[test]
    fn param_substitution() {
        let spec = MapSpec::burst(
            GrowthParams::new(0.5, 1.0, 1.0, 0.4).unwrap(),
            OutputFunction::linear(1.0, 0.5),
        );
        let s = with_param(&spec, "b", 0.9).unwrap();
        let MapSpec::BurstGrowth { f, g } = &s else { panic!() };
        assert_eq!(f.as_linear(), Some((1.0, 0.9)));
        assert_eq!(g.alpha.value(), 0.4);
        assert!(with_param(&spec, "m", 1.5).is_err());
        assert!(with_param(&spec, "rho", 1.5).is_err());

        let g = GrowthParams::new(0.5, 1.0, 1.0, 0.5).unwrap();
        let norm = normalize_memory(&g, 1.0, 1.0).unwrap();
        let s = with_param(&MapSpec::NormalizedLogisticMemory { norm }, "lambda", 3.0).unwrap();
        let MapSpec::NormalizedLogisticMemory { norm } = s else { panic!() };
        assert_eq!((norm.lambda, norm.mu, norm.eta), (3.0, 2.0, 1.5));

        let gen = MapSpec::generalized(
            g,
            PriceSpec::mixed(0.5, 0.5, GCase::power(1.0, 1.0).unwrap(), OutputFunction::linear(1.0, 0.5))
                .unwrap(),
            ForcingSpec::ConstantC { c: 1.0 },
        )
        .unwrap();
        let s = with_param(&gen, "p", 0.25).unwrap();
        let MapSpec::GeneralizedGrowth { price: PriceSpec::Mixed { p, q, .. }, .. } = s else { panic!() };
        assert_eq!((p, q), (0.25, 0.75));
        assert!(with_param(&gen, "j", 2.0).is_ok());
        assert!(with_param(&gen, "beta", 2.0).is_err());
    }

    #[test]
    fn exponent_examples() {
        let opts = SimOptions::direct();
        let l4 = divergence_exponent(&logistic(4.0), StateVector::scalar(0.3), 100_000, 1e-8, 1, opts).unwrap();
        assert!((l4 - std::f64::consts::LN_2).abs() < 0.02, "{l4}");
        let l32 = divergence_exponent(&logistic(3.2), StateVector::scalar(0.3), 10_000, 1e-8, 1, opts).unwrap();
        assert!(l32 < 0.0);
        let l25 = divergence_exponent(&logistic(2.5), StateVector::scalar(0.3), 10_000, 1e-8, 1, opts).unwrap();
        assert!((l25 - 0.5f64.ln()).abs() < 0.02, "{l25}");
    }

    #[test]
    fn exponent_insensitive_to_delta0() {
        let opts = SimOptions::direct();
        for delta0 in [1e-10, 1e-8, 1e-6] {
            let l = divergence_exponent(&logistic(4.0), StateVector::scalar(0.3), 100_000, delta0, 1, opts).unwrap();
            assert!((l - std::f64::consts::LN_2).abs() < 0.02, "delta0 {delta0}: {l}");
        }
    }

    #[test]
    fn exponent_of_memory_map_is_finite() {
        let g = GrowthParams::new(0.5, 1.0, 1.0, 0.8).unwrap();
        let norm = normalize_memory(&g, 1.0, 1.0).unwrap();
        let spec = with_param(&MapSpec::NormalizedLogisticMemory { norm }, "lambda", 2.0).unwrap();
        let l = divergence_exponent(&spec, StateVector::scalar(0.2), 500, 1e-8, 5, SimOptions::incremental(Default::default()))
            .unwrap();
        assert!(l.is_finite());
    }

    #[test]
    fn exponent_undefined_on_escape() {
        let err = divergence_exponent(&logistic(4.5), StateVector::scalar(0.3), 1000, 1e-8, 1, SimOptions::direct());
        assert!(matches!(err, Err(Error::UndefinedExponent(_))));
    }

    #[test]
    fn landmark_rules() {
        use Period::*;
        let ps = [
            (2.9, Periodic(1)),
            (3.0, Aperiodic),
            (3.1, Periodic(2)),
            (3.5, Periodic(4)),
            (3.6, Aperiodic),
            (3.7, Aperiodic),
            (3.8, Aperiodic),
        ];
        let l = cascade_landmarks(&ps, 3);
        assert_eq!((l.period2, l.period4, l.chaos), (Some(3.1), Some(3.5), Some(3.6)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn detected_period_divides_other_periods(pattern in prop::collection::vec(-5i32..5, 1..20)) {
            let xs: Vec<f64> = (0..200).map(|i| pattern[i % pattern.len()] as f64).collect();
            let p = detect_period(&xs, 1e-8).value().unwrap();
            prop_assert_eq!(pattern.len() % p, 0);
            for q in p + 1..=MAX_PERIOD {
                if satisfies_period(&xs, q, 1e-8) {
                    prop_assert_eq!(q % p, 0);
                }
            }
        }

        #[test]
        fn scan_is_deterministic(lo in 2.5f64..3.5, width in 0.05f64..0.5) {
            let mut cfg = scan(lo, lo + width, 8);
            cfg.n_transient = 200;
            cfg.n_sample = 16;
            let a = bifurcation_scan(&cfg, &logistic(3.0)).unwrap();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let b = pool.install(|| bifurcation_scan(&cfg, &logistic(3.0))).unwrap();
            let bits = |d: &BifurcationData| {
                d.rows.iter().map(|r| (r.param.to_bits(), r.sample_index, r.value.to_bits(), r.escaped)).collect::<Vec<_>>()
            };
            prop_assert_eq!(bits(&a), bits(&b));
        }
    }
}

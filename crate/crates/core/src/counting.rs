//! Counting processes N(t): samplers, generating functions, means and tail
//! asymptotics.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{domain, unsupported, Result};
use crate::laws::{poisson_draw, BatchLaw, IncrementLaw};
use crate::specfun::{gamma, riemann_zeta};

/// Growth rule ρ(t) = coef · t^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub coef: f64,
    pub exponent: f64,
}

impl Default for Growth {
    fn default() -> Self {
        Growth { coef: 1.0, exponent: 1.0 }
    }
}

impl Growth {
    pub fn rho(&self, t: f64) -> f64 {
        self.coef * t.powf(self.exponent)
    }
}

/// Cost law of the first-passage counting process.
#[derive(Debug, Clone, PartialEq)]
pub enum CostRule {
    /// V = 1 + Poisson(t − 1), so E[V] = t.
    ShiftedPoisson,
    Fixed(BatchLaw),
}

impl CostRule {
    pub fn law_at(&self, t: f64) -> Result<BatchLaw> {
        match self {
            CostRule::ShiftedPoisson => {
                if t < 1.0 {
                    return domain(format!("shifted Poisson cost needs t >= 1, got {t}"));
                }
                BatchLaw::shifted_poisson(t - 1.0)
            }
            CostRule::Fixed(b) => Ok(b.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CountingSpec {
    Poisson { rho: f64 },
    Geometric { growth: Growth },
    Renewal { waiting: IncrementLaw },
    CompoundRenewal { base: Box<CountingSpec>, batch: BatchLaw },
    FirstPassage { cost: CostRule },
    /// Masses 1 − 1/ρ² at ρ(t) and 1/ρ² at ρ(t)^{1+1/γ}; both support
    /// points are rounded to the nearest integer.
    TwoPoint { growth: Growth, gamma: f64 },
    Deterministic { n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountSample {
    pub n: u64,
    pub capped: bool,
    pub cap: u64,
}

impl CountSample {
    fn new(n: u64, cap: u64) -> Self {
        if n >= cap {
            CountSample { n: cap, capped: n > cap, cap }
        } else {
            CountSample { n, capped: false, cap }
        }
    }

    fn capped(cap: u64) -> Self {
        CountSample { n: cap, capped: true, cap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanCount {
    Exact(f64),
    /// Leading-order renewal asymptotics.
    Approximate(f64),
    Infinite,
}

impl MeanCount {
    pub fn value(&self) -> Option<f64> {
        match *self {
            MeanCount::Exact(v) | MeanCount::Approximate(v) => Some(v),
            MeanCount::Infinite => None,
        }
    }

    pub fn is_approximate(&self) -> bool {
        matches!(self, MeanCount::Approximate(_))
    }
}

/// Default truncation for infinite-mean counts.
pub const DEFAULT_CAP: u64 = 1 << 26;

const SA_TABLE_LEN: usize = 1 << 16;

fn sparre_andersen_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut u = Vec::with_capacity(SA_TABLE_LEN + 1);
        u.push(1.0);
        for n in 1..=SA_TABLE_LEN {
            let prev = u[n - 1];
            u.push(prev * (2 * n - 1) as f64 / (2 * n) as f64);
        }
        u
    })
}

/// P[τ > n] = C(2n, n) 4^{−n}.
pub fn sparre_andersen_tail(n: u64) -> f64 {
    let table = sparre_andersen_table();
    if (n as usize) <= SA_TABLE_LEN {
        table[n as usize]
    } else {
        sparre_andersen_asymptotic(n as f64)
    }
}

fn sparre_andersen_asymptotic(n: f64) -> f64 {
    let r = 1.0 / n;
    (1.0 / (std::f64::consts::PI * n).sqrt())
        * (1.0 - r / 8.0 + r * r / 128.0 + 5.0 * r * r * r / 1024.0 - 21.0 * r * r * r * r / 32768.0)
}

/// Draws the first-passage time τ of a symmetric continuous walk, or
/// `None` when τ exceeds `cap`.
pub fn sample_first_passage<R: Rng + ?Sized>(rng: &mut R, cap: u64) -> Option<u64> {
    let u = 1.0 - rng.gen::<f64>();
    // τ = min{n : P[τ > n] ≤ u}
    if u < sparre_andersen_tail(cap) {
        return None;
    }
    let table = sparre_andersen_table();
    if u >= table[SA_TABLE_LEN] {
        return Some(table.partition_point(|&p| p > u) as u64);
    }
    let guess = 1.0 / (std::f64::consts::PI * u * u);
    let mut n = (guess.ceil() as u64).max(SA_TABLE_LEN as u64 + 1);
    while n > SA_TABLE_LEN as u64 + 1 && sparre_andersen_asymptotic((n - 1) as f64) <= u {
        n -= 1;
    }
    while sparre_andersen_asymptotic(n as f64) > u {
        n += 1;
    }
    Some(n.min(cap))
}

fn two_point_support(growth: &Growth, gamma: f64, t: f64) -> ([f64; 2], [f64; 2]) {
    let rho = growth.rho(t);
    let lo = rho.round();
    let hi = rho.powf(1.0 + 1.0 / gamma).round();
    let p_hi = 1.0 / (rho * rho);
    ([lo, hi], [1.0 - p_hi, p_hi])
}

impl CountingSpec {
    pub fn poisson(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return domain(format!("Poisson rate must be positive, got {rho}"));
        }
        Ok(CountingSpec::Poisson { rho })
    }

    pub fn geometric(growth: Growth) -> Result<Self> {
        if !(growth.coef > 0.0) || !(growth.exponent >= 0.0) {
            return domain("geometric growth needs coef > 0 and exponent >= 0");
        }
        Ok(CountingSpec::Geometric { growth })
    }

    pub fn renewal(waiting: IncrementLaw) -> Result<Self> {
        if !waiting.is_nonnegative() {
            return domain("renewal waiting times must be nonnegative");
        }
        Ok(CountingSpec::Renewal { waiting })
    }

    pub fn compound(base: CountingSpec, batch: BatchLaw) -> Result<Self> {
        match base {
            CountingSpec::Poisson { .. } | CountingSpec::Renewal { .. } | CountingSpec::Deterministic { .. } => {
                Ok(CountingSpec::CompoundRenewal { base: Box::new(base), batch })
            }
            _ => domain("compound renewal base must be a Poisson, renewal or deterministic count"),
        }
    }

    pub fn two_point(growth: Growth, gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 2.0) {
            return domain(format!("two-point gamma must lie in (1,2), got {gamma}"));
        }
        if !(growth.coef > 0.0) {
            return domain("two-point growth needs coef > 0");
        }
        Ok(CountingSpec::TwoPoint { growth, gamma })
    }

    /// Draws N(t), truncated at `cap`.
    pub fn sample_count<R: Rng + ?Sized>(&self, t: f64, cap: u64, rng: &mut R) -> Result<CountSample> {
        let cap = cap.max(1);
        Ok(match self {
            CountingSpec::Poisson { rho } => CountSample::new(poisson_draw(rho * t, rng), cap),
            CountingSpec::Geometric { growth } => {
                let rho = growth.rho(t).max(1.0);
                if rho == 1.0 {
                    return Ok(CountSample::new(1, cap));
                }
                let u = 1.0 - rng.gen::<f64>();
                let k = (u.ln() / (-1.0 / rho).ln_1p()).floor();
                if k >= cap as f64 {
                    CountSample::capped(cap)
                } else {
                    CountSample::new(1 + k as u64, cap)
                }
            }
            CountingSpec::Renewal { waiting } => {
                let mut clock = 0.0;
                let mut n = 0u64;
                loop {
                    clock += waiting.sample(rng);
                    if clock > t {
                        break CountSample::new(n, cap);
                    }
                    n += 1;
                    if n > cap {
                        break CountSample::capped(cap);
                    }
                }
            }
            CountingSpec::CompoundRenewal { base, batch } => {
                let m = base.sample_count(t, cap, rng)?;
                if m.capped {
                    return Ok(CountSample::capped(cap));
                }
                match batch.sum_of(m.n, rng, cap) {
                    Some(v) => CountSample::new(v, cap),
                    None => CountSample::capped(cap),
                }
            }
            CountingSpec::FirstPassage { cost } => {
                let law = cost.law_at(t)?;
                match sample_first_passage(rng, cap) {
                    Some(tau) => match law.sum_of(tau, rng, cap) {
                        Some(v) => CountSample::new(v, cap),
                        None => CountSample::capped(cap),
                    },
                    None => CountSample::capped(cap),
                }
            }
            CountingSpec::TwoPoint { growth, gamma } => {
                let (pts, probs) = two_point_support(growth, *gamma, t);
                let v = if rng.gen::<f64>() < probs[1] { pts[1] } else { pts[0] };
                if v > cap as f64 {
                    CountSample::capped(cap)
                } else {
                    CountSample::new(v as u64, cap)
                }
            }
            CountingSpec::Deterministic { n } => CountSample::new(*n, cap),
        })
    }

    /// E[N(t)].
    pub fn mean_count(&self, t: f64) -> MeanCount {
        match self {
            CountingSpec::Poisson { rho } => MeanCount::Exact(rho * t),
            CountingSpec::Geometric { growth } => MeanCount::Exact(growth.rho(t).max(1.0)),
            CountingSpec::Renewal { waiting } => renewal_mean(waiting, t),
            CountingSpec::CompoundRenewal { base, batch } => match (base.mean_count(t), batch.mean()) {
                (MeanCount::Exact(m), Some(v)) => MeanCount::Exact(m * v),
                (MeanCount::Approximate(m), Some(v)) => MeanCount::Approximate(m * v),
                _ => MeanCount::Infinite,
            },
            CountingSpec::FirstPassage { .. } => MeanCount::Infinite,
            CountingSpec::TwoPoint { growth, gamma } => {
                let (pts, probs) = two_point_support(growth, *gamma, t);
                MeanCount::Exact(pts[0] * probs[0] + pts[1] * probs[1])
            }
            CountingSpec::Deterministic { n } => MeanCount::Exact(*n as f64),
        }
    }

    /// E[N(t)^q] / E[N(t)]^q for finite-support specs.
    pub fn moment_ratio(&self, t: f64, q: f64) -> Result<f64> {
        match self {
            CountingSpec::TwoPoint { growth, gamma } => {
                let (pts, probs) = two_point_support(growth, *gamma, t);
                let mean = pts[0] * probs[0] + pts[1] * probs[1];
                // normalize before powering to stay in range
                let m = probs[0] * (pts[0] / mean).powf(q) + probs[1] * (pts[1] / mean).powf(q);
                Ok(m)
            }
            CountingSpec::Deterministic { .. } => Ok(1.0),
            _ => unsupported("moment ratio needs a finite-support counting spec"),
        }
    }

    /// φ_N(z) = E[z^N] for z in [0, 1].
    pub fn pgf(&self, t: f64, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return domain(format!("pgf argument must lie in [0,1], got {z}"));
        }
        match self {
            CountingSpec::Poisson { rho } => Ok((rho * t * (z - 1.0)).exp()),
            CountingSpec::Geometric { growth } => {
                let rho = growth.rho(t).max(1.0);
                Ok(z / (rho - (rho - 1.0) * z))
            }
            CountingSpec::CompoundRenewal { base, batch } => base.pgf(t, batch.pgf(z)?),
            CountingSpec::TwoPoint { growth, gamma } => {
                let (pts, probs) = two_point_support(growth, *gamma, t);
                Ok(probs[0] * z.powf(pts[0]) + probs[1] * z.powf(pts[1]))
            }
            CountingSpec::Deterministic { n } => Ok(z.powf(*n as f64)),
            _ => Ok(1.0 + self.pgf_gap(t, z - 1.0)?),
        }
    }

    /// φ_N(1 + dz) − 1 for dz ≥ −1, without cancellation near dz = 0.
    /// Arguments above 1 are accepted where the series converges.
    pub fn pgf_gap(&self, t: f64, dz: f64) -> Result<f64> {
        if !(dz >= -1.0 && dz.is_finite()) {
            return domain(format!("pgf argument must be >= 0, got 1 + {dz}"));
        }
        match self {
            CountingSpec::Poisson { rho } => Ok((rho * t * dz).exp_m1()),
            CountingSpec::Geometric { growth } => {
                let rho = growth.rho(t).max(1.0);
                if (rho - 1.0) * dz >= 1.0 {
                    return Err(crate::Error::Range(format!("geometric pgf diverges at 1 + {dz}")));
                }
                Ok(rho * dz / (1.0 - (rho - 1.0) * dz))
            }
            CountingSpec::CompoundRenewal { base, batch } => {
                let inner = batch.pgf_gap_from(dz)?;
                base.pgf_gap(t, inner)
            }
            CountingSpec::FirstPassage { cost } => {
                let inner = cost.law_at(t)?.pgf_gap_from(dz)?;
                if inner > 0.0 {
                    return Err(crate::Error::Range("first-passage pgf diverges above 1".into()));
                }
                Ok(-(-inner).sqrt())
            }
            CountingSpec::TwoPoint { growth, gamma } => {
                let (pts, probs) = two_point_support(growth, *gamma, t);
                if dz == -1.0 {
                    return Ok(-1.0);
                }
                let l = dz.ln_1p();
                Ok(probs[0] * (pts[0] * l).exp_m1() + probs[1] * (pts[1] * l).exp_m1())
            }
            CountingSpec::Deterministic { n } => {
                if dz == -1.0 {
                    return Ok(if *n == 0 { 0.0 } else { -1.0 });
                }
                Ok((*n as f64 * dz.ln_1p()).exp_m1())
            }
            CountingSpec::Renewal { .. } => {
                unsupported("generating function of a general renewal count")
            }
        }
    }

    /// (γ, C_t) with 1 − φ_N(z) ~ C_t (1 − z)^γ, i.e.
    /// P[N(t) > n] ~ C_t n^{−γ} / Γ(1 − γ).
    pub fn tail_count_params(&self, t: f64) -> Result<(f64, f64)> {
        match self {
            CountingSpec::FirstPassage { cost } => {
                let law = cost.law_at(t)?;
                match (law.mean(), law.gamma()) {
                    (Some(m), _) => Ok((0.5, m.sqrt())),
                    (None, Some(g)) => Ok((0.5 * g, (gamma(-g).abs() / riemann_zeta(1.0 + g)?).sqrt())),
                    _ => unsupported("first-passage cost law without tail data"),
                }
            }
            CountingSpec::CompoundRenewal { base, batch } => {
                let g = match batch.gamma() {
                    Some(g) => g,
                    None => return unsupported("compound renewal with finite-mean batches has finite mean"),
                };
                let scale = match **base {
                    CountingSpec::Poisson { rho } => rho * t,
                    CountingSpec::Deterministic { n } => n as f64,
                    _ => return unsupported("C_t is only known for a Poisson or deterministic base"),
                };
                Ok((g, scale * gamma(-g).abs() / riemann_zeta(1.0 + g)?))
            }
            _ => unsupported("no known tail asymptotics for this counting spec"),
        }
    }

    /// Leading-order P[N(t) > n].
    pub fn tail_count_asymptotic(&self, t: f64, n: f64) -> Result<f64> {
        let (g, c) = self.tail_count_params(t)?;
        Ok(c * n.powf(-g) / gamma(1.0 - g))
    }

    pub fn has_infinite_mean(&self, t: f64) -> bool {
        matches!(self.mean_count(t), MeanCount::Infinite)
    }
}

fn renewal_mean(waiting: &IncrementLaw, t: f64) -> MeanCount {
    match *waiting {
        IncrementLaw::Exponential { rate } => MeanCount::Exact(rate * t),
        IncrementLaw::OneSidedStable { alpha } => {
            // Mittag-Leffler mean-1 normalization
            MeanCount::Approximate(t.powf(alpha) / gamma(1.0 + alpha))
        }
        _ => match (waiting.mean(), waiting.beta()) {
            (Some(mu), _) => MeanCount::Approximate(t / mu),
            (None, Some(b)) => {
                MeanCount::Approximate(1.0 / (gamma(1.0 - b) * gamma(1.0 + b) * waiting.tail(t)))
            }
            _ => MeanCount::Infinite,
        },
    }
}

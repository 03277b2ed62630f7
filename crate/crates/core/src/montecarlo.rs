//! Tail estimation by simulation: the naive estimator, a single-big-jump
//! importance sampler for i.i.d. sums and convergence tables.
//!
//! Replication i always draws from stream i of a ChaCha generator keyed by
//! the master seed, and replications are reduced in fixed-size chunks whose
//! results are combined in index order, so estimates do not depend on the
//! number of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, unsupported, Error, Result};
use crate::laws::IncrementLaw;
use crate::models::{Centering, ModelKind, SumModel};
use crate::predict::{predict_model, Prediction, REGIME_LIMIT};

/// Replications per reduction chunk.
pub const CHUNK: u64 = 1024;
/// Mean work per replication may not exceed this multiple of the budget.
pub const WORK_FACTOR: f64 = 64.0;
pub const MIN_BUDGET: u64 = 1000;
const PILOT: u64 = 64;
pub const DEFAULT_MIX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }

    /// Independent stream for one replication.
    pub fn stream(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(replication);
        rng
    }

    /// Seed for the k-th row of a table.
    pub fn child(&self, k: u64) -> SeedSpec {
        let mut rng = self.stream(u64::MAX - k);
        SeedSpec { master_seed: rng.gen() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMethod {
    Naive,
    BigJumpIs,
}

impl std::fmt::Display for EstimatorMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorMethod::Naive => "naive",
            EstimatorMethod::BigJumpIs => "bigjump_is",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub replications: u64,
    pub method: EstimatorMethod,
    pub capped_fraction: f64,
    pub mean_work: f64,
}

impl TailEstimate {
    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.p_hat
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: f64,
    sum_sq: f64,
    capped: u64,
    work: f64,
    count: u64,
}

impl Acc {
    fn push(&mut self, value: f64, capped: bool, work: u64) {
        self.sum += value;
        self.sum_sq += value * value;
        self.capped += capped as u64;
        self.work += work as f64;
        self.count += 1;
    }

    fn merge(mut self, o: &Acc) -> Acc {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.capped += o.capped;
        self.work += o.work;
        self.count += o.count;
        self
    }
}

struct Draw {
    value: f64,
    capped: bool,
    work: u64,
}

fn run_replications<F>(budget: u64, seeds: SeedSpec, method: EstimatorMethod, draw: F) -> Result<TailEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Draw> + Sync,
{
    if budget < MIN_BUDGET {
        return domain(format!("budget must be at least {MIN_BUDGET}, got {budget}"));
    }
    let limit = WORK_FACTOR * budget as f64;
    let chunk = |c: u64| -> Result<Acc> {
        let mut acc = Acc::default();
        for i in c * CHUNK..((c + 1) * CHUNK).min(budget) {
            let d = draw(&mut seeds.stream(i))?;
            acc.push(d.value, d.capped, d.work);
            // the head of the first chunk doubles as the work pilot
            if i + 1 == PILOT && acc.work / acc.count as f64 > limit {
                return Err(Error::WorkLimit { mean_work: acc.work / acc.count as f64, limit });
            }
        }
        Ok(acc)
    };
    let pilot = chunk(0)?;
    let n_chunks = budget.div_ceil(CHUNK);
    let rest: Vec<Acc> = (1..n_chunks).into_par_iter().map(chunk).collect::<Result<_>>()?;
    let acc = rest.iter().fold(pilot, |a, b| a.merge(b));
    let n = acc.count as f64;
    let mean = acc.sum / n;
    let var = ((acc.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(TailEstimate {
        p_hat: mean,
        stderr: (var / n).sqrt(),
        replications: acc.count,
        method,
        capped_fraction: acc.capped as f64 / n,
        mean_work: acc.work / n,
    })
}

/// Fraction of replications with S − b > x.
pub fn estimate_tail(model: &SumModel, x: f64, budget: u64, seeds: SeedSpec, cap: u64) -> Result<TailEstimate> {
    run_replications(budget, seeds, EstimatorMethod::Naive, |rng| {
        let e = model.sample_exceedance(x, rng, cap)?;
        Ok(Draw { value: e.hit as u8 as f64, capped: e.capped, work: e.work })
    })
}

/// Increment laws that can be sampled conditionally on a large value.
pub trait BoostLaw: Sync {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    /// A draw from the law conditioned on exceeding h.
    fn draw_above<R: Rng + ?Sized>(&self, h: f64, rng: &mut R) -> f64;
    fn tail_at(&self, h: f64) -> f64;
}

impl BoostLaw for IncrementLaw {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample(rng)
    }
    fn draw_above<R: Rng + ?Sized>(&self, h: f64, rng: &mut R) -> f64 {
        self.sample_above(h, rng).expect("law supports conditional sampling")
    }
    fn tail_at(&self, h: f64) -> f64 {
        self.tail(h)
    }
}

/// Likelihood ratio f^{⊗n}/q for a sample with k coordinates above the
/// boost threshold, where q is the defensive mixture.
pub fn mixture_weight(k: usize, n: usize, tail_h: f64, mix_p: f64) -> f64 {
    1.0 / ((1.0 - mix_p) + mix_p * k as f64 / (n as f64 * tail_h))
}

/// Importance sampling of P[X_1 + … + X_n > threshold] from
/// q = (1−p) f^{⊗n} + p (1/n) Σ_j [f | X_j > h] f^{⊗(n−1)}.
pub fn bigjump_is_generic<L: BoostLaw>(
    law: &L,
    n: usize,
    threshold: f64,
    h: f64,
    budget: u64,
    seeds: SeedSpec,
    mix_p: f64,
) -> Result<TailEstimate> {
    if !(mix_p > 0.0 && mix_p < 1.0) {
        return domain(format!("mix_p must lie in (0,1), got {mix_p}"));
    }
    let tail_h = law.tail_at(h);
    if !(tail_h > 0.0) {
        return domain(format!("boost threshold {h} has zero tail mass"));
    }
    run_replications(budget, seeds, EstimatorMethod::BigJumpIs, |rng| {
        let boosted = if rng.gen::<f64>() < mix_p { Some(rng.gen_range(0..n)) } else { None };
        let mut s = 0.0;
        let mut k = 0;
        for j in 0..n {
            let v = if boosted == Some(j) { law.draw_above(h, rng) } else { law.draw(rng) };
            k += (v > h) as usize;
            s += v;
        }
        let value = if s > threshold { mixture_weight(k, n, tail_h, mix_p) } else { 0.0 };
        Ok(Draw { value, capped: false, work: n as u64 })
    })
}

/// Big-jump importance sampling for an i.i.d. model, boosting at x/2.
pub fn estimate_tail_bigjump_is(
    model: &SumModel,
    x: f64,
    budget: u64,
    seeds: SeedSpec,
    mix_p: f64,
) -> Result<TailEstimate> {
    let (law, n) = match model.kind() {
        ModelKind::Iid { law, n } => (law, *n as usize),
        _ => return unsupported("importance sampling is implemented for i.i.d. sums only"),
    };
    if !matches!(law, IncrementLaw::Pareto { .. } | IncrementLaw::ParetoLog { .. } | IncrementLaw::Exponential { .. }) {
        return unsupported("law lacks conditional sampling above a level");
    }
    let b = if let Centering::Fixed(b) = model.centering() { b } else { 0.0 };
    let h = (0.5 * x).max(law.support_min());
    bigjump_is_generic(law, n, x + b, h, budget, seeds, mix_p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub index: f64,
    pub x: f64,
    pub estimate: TailEstimate,
    pub prediction: Prediction,
    pub ratio: f64,
    pub ld_condition: f64,
}

/// One naive estimate per index against the matching predictor. Refuses
/// the whole table if any index is outside the large-deviation regime.
pub fn convergence_table<M, X>(
    family: M,
    x_rule: X,
    indices: &[f64],
    budget: u64,
    seeds: SeedSpec,
    cap: u64,
) -> Result<Vec<ConvergenceRow>>
where
    M: Fn(f64) -> Result<SumModel>,
    X: Fn(f64) -> f64,
{
    let mut plan = Vec::with_capacity(indices.len());
    for &index in indices {
        let model = family(index)?;
        let x = x_rule(index);
        let ld = model.ld_condition(x)?;
        if !(ld <= REGIME_LIMIT) {
            return Err(Error::OutOfRegime { index, ld_condition: ld });
        }
        plan.push((index, model, x, ld));
    }
    plan.into_iter()
        .enumerate()
        .map(|(k, (index, model, x, ld))| {
            let prediction = predict_model(&model, x)?;
            let estimate = estimate_tail(&model, x, budget, seeds.child(k as u64), cap)?;
            let ratio = estimate.p_hat / prediction.value;
            Ok(ConvergenceRow { index, x, estimate, prediction, ratio, ld_condition: ld })
        })
        .collect()
}

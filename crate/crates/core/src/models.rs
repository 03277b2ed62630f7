//! Assembled sum processes and their centering rule.

use std::sync::Arc;

use rand::Rng;

use crate::counting::{CountingSpec, MeanCount};
use crate::error::{domain, Result};
use crate::kernels::{ldp_norming, MemoryKernel};
use crate::laws::IncrementLaw;
use crate::sums::sum_exceeds;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Iid { law: IncrementLaw, n: u64 },
    Weighted { law: IncrementLaw, kernel: MemoryKernel, n: usize },
    Stopped { counting: CountingSpec, law: IncrementLaw, t: f64, force_uncentered: bool },
}

/// Centering b subtracted from the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Centering {
    Zero,
    /// A fixed b.
    Fixed(f64),
    /// b = N·E[X], drawn with each replication.
    RandomMean(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumModel {
    kind: ModelKind,
    centering: Centering,
    // w_{n−k} for weighted sums, and L_n
    weights: Option<Arc<Vec<f64>>>,
    l_n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub z: f64,
    pub n_used: u64,
    pub capped: bool,
    pub work: u64,
}

/// Outcome of one exceedance draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exceedance {
    pub hit: bool,
    pub n_used: u64,
    pub capped: bool,
    /// Elementary random operations spent.
    pub work: u64,
}

fn check_law(law: &IncrementLaw) -> Result<()> {
    if !law.is_nonnegative() {
        return domain("sum models need nonnegative increments");
    }
    Ok(())
}

impl SumModel {
    pub fn iid(law: IncrementLaw, n: u64) -> Result<Self> {
        check_law(&law)?;
        if n == 0 {
            return domain("iid sum needs n >= 1");
        }
        let centering = match law.mean() {
            Some(m) => Centering::Fixed(m * n as f64),
            None => Centering::Zero,
        };
        Ok(SumModel { kind: ModelKind::Iid { law, n }, centering, weights: None, l_n: None })
    }

    pub fn weighted(law: IncrementLaw, kernel: MemoryKernel, n: usize) -> Result<Self> {
        check_law(&law)?;
        let beta = law.beta().ok_or_else(|| crate::Error::Domain("weighted sums need a heavy-tailed law".into()))?;
        let norm = ldp_norming(&kernel, n, beta)?;
        let centering = match law.mean() {
            Some(m) => Centering::Fixed(m * norm.weights.iter().sum::<f64>()),
            None => Centering::Zero,
        };
        Ok(SumModel {
            kind: ModelKind::Weighted { law, kernel, n },
            centering,
            weights: Some(Arc::new(norm.weights)),
            l_n: Some(norm.l_n),
        })
    }

    pub fn stopped(counting: CountingSpec, law: IncrementLaw, t: f64, force_uncentered: bool) -> Result<Self> {
        check_law(&law)?;
        if !(t >= 0.0 && t.is_finite()) {
            return domain(format!("t must be finite and >= 0, got {t}"));
        }
        let centering = match (law.mean(), counting.mean_count(t)) {
            (_, MeanCount::Infinite) => Centering::Zero,
            (Some(m), _) if !force_uncentered => Centering::RandomMean(m),
            _ => Centering::Zero,
        };
        Ok(SumModel {
            kind: ModelKind::Stopped { counting, law, t, force_uncentered },
            centering,
            weights: None,
            l_n: None,
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn law(&self) -> &IncrementLaw {
        match &self.kind {
            ModelKind::Iid { law, .. } | ModelKind::Weighted { law, .. } | ModelKind::Stopped { law, .. } => law,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        self.law().beta()
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn is_centered(&self) -> bool {
        !matches!(self.centering, Centering::Zero)
    }

    /// Weights w_{n−1}, …, w_0 applied to X_1, …, X_n (weighted sums only).
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref().map(|w| w.as_slice())
    }

    pub fn norming(&self) -> Option<f64> {
        self.l_n
    }

    /// Large-deviation condition: n F̄(x), L_n F̄(x), E[N]F̄(x) or
    /// P[N(t) > 1/F̄(x)] (P[μN(t) > x] when the law has a finite mean).
    pub fn ld_condition(&self, x: f64) -> Result<f64> {
        let law = self.law();
        let tail = law.tail(x);
        match &self.kind {
            ModelKind::Iid { n, .. } => Ok(*n as f64 * tail),
            ModelKind::Weighted { .. } => Ok(self.l_n.unwrap_or(f64::NAN) * tail),
            ModelKind::Stopped { counting, t, .. } => match counting.mean_count(*t) {
                MeanCount::Exact(m) | MeanCount::Approximate(m) => Ok(m * tail),
                MeanCount::Infinite => match law.mean() {
                    Some(mu) => counting.tail_count_asymptotic(*t, x / mu),
                    None => counting.tail_count_asymptotic(*t, 1.0 / tail),
                },
            },
        }
    }

    /// Draws one centered sum by direct simulation.
    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R, cap: u64) -> Result<Replication> {
        match &self.kind {
            ModelKind::Iid { law, n } => {
                let mut s = 0.0;
                for _ in 0..*n {
                    s += law.sample(rng);
                }
                let b = if let Centering::Fixed(b) = self.centering { b } else { 0.0 };
                Ok(Replication { z: s - b, n_used: *n, capped: false, work: *n })
            }
            ModelKind::Weighted { law, n, .. } => {
                let w = self.weights.as_ref().expect("weighted model has weights");
                let mut s = 0.0;
                // X_k carries w_{n−k}
                for k in 1..=*n {
                    s += w[*n - k] * law.sample(rng);
                }
                let b = if let Centering::Fixed(b) = self.centering { b } else { 0.0 };
                Ok(Replication { z: s - b, n_used: *n as u64, capped: false, work: *n as u64 })
            }
            ModelKind::Stopped { counting, law, t, .. } => {
                let c = counting.sample_count(*t, cap, rng)?;
                let mut s = 0.0;
                for _ in 0..c.n {
                    s += law.sample(rng);
                }
                let b = match self.centering {
                    Centering::RandomMean(m) => m * c.n as f64,
                    _ => 0.0,
                };
                Ok(Replication { z: s - b, n_used: c.n, capped: c.capped, work: c.n })
            }
        }
    }

    /// Draws the indicator of {S − b > x} exactly, without materializing
    /// every summand when the count is large.
    pub fn sample_exceedance<R: Rng + ?Sized>(&self, x: f64, rng: &mut R, cap: u64) -> Result<Exceedance> {
        match &self.kind {
            ModelKind::Iid { law, n } => {
                let b = if let Centering::Fixed(b) = self.centering { b } else { 0.0 };
                let d = sum_exceeds(law, *n, x + b, rng);
                Ok(Exceedance { hit: d.hit, n_used: *n, capped: false, work: d.work })
            }
            ModelKind::Weighted { law, n, .. } => {
                let w = self.weights.as_ref().expect("weighted model has weights");
                let b = if let Centering::Fixed(b) = self.centering { b } else { 0.0 };
                let thr = x + b;
                let mut s = 0.0;
                for k in 1..=*n {
                    s += w[*n - k] * law.sample(rng);
                    if s > thr {
                        return Ok(Exceedance { hit: true, n_used: *n as u64, capped: false, work: k as u64 });
                    }
                }
                Ok(Exceedance { hit: false, n_used: *n as u64, capped: false, work: *n as u64 })
            }
            ModelKind::Stopped { counting, law, t, .. } => {
                let c = counting.sample_count(*t, cap, rng)?;
                let b = match self.centering {
                    Centering::RandomMean(m) => m * c.n as f64,
                    _ => 0.0,
                };
                let d = sum_exceeds(law, c.n, x + b, rng);
                Ok(Exceedance { hit: d.hit, n_used: c.n, capped: c.capped, work: d.work + 1 })
            }
        }
    }

    /// Smallest value the uncentered sum can take.
    pub fn support_min(&self) -> f64 {
        let m = self.law().support_min().max(0.0);
        match &self.kind {
            ModelKind::Iid { n, .. } => m * *n as f64,
            ModelKind::Weighted { .. } => m * self.weights().map(|w| w.iter().sum::<f64>()).unwrap_or(0.0),
            ModelKind::Stopped { .. } => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Growth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
            let f = cdf(x);
            d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
        })
    }

    #[test]
    fn centering_rules() {
        let p05 = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let p15 = IncrementLaw::pareto(1.5, 1.0).unwrap();
        assert_eq!(SumModel::iid(p05, 10).unwrap().centering(), Centering::Zero);
        assert_eq!(SumModel::iid(p15, 10).unwrap().centering(), Centering::Fixed(30.0));
        let pois = CountingSpec::poisson(2.0).unwrap();
        assert_eq!(
            SumModel::stopped(pois.clone(), p15, 5.0, false).unwrap().centering(),
            Centering::RandomMean(3.0)
        );
        assert_eq!(SumModel::stopped(pois, p15, 5.0, true).unwrap().centering(), Centering::Zero);
        let fp = CountingSpec::FirstPassage { cost: crate::counting::CostRule::ShiftedPoisson };
        assert_eq!(SumModel::stopped(fp, p15, 5.0, false).unwrap().centering(), Centering::Zero);
        let w = SumModel::weighted(p15, MemoryKernel::exponential(0.5).unwrap(), 2).unwrap();
        assert_eq!(w.centering(), Centering::Fixed(3.0 * 2.5));
    }

    #[test]
    fn single_increment_model() {
        let law = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let m = SumModel::iid(law, 1).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..100_000).map(|_| m.sample_centered(&mut r, 1).unwrap().z).collect();
        assert!(xs.iter().all(|&x| x >= 1.0));
        let d = ks_distance(xs, |x| law.cdf(x));
        assert!(d < 2.2 / (1e5f64).sqrt(), "{d}");
    }

    #[test]
    fn centered_mean_is_zero() {
        let law = IncrementLaw::pareto(1.5, 1.0).unwrap();
        let m = SumModel::iid(law, 1000).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let n = 20_000;
        let zs: Vec<f64> = (0..n).map(|_| m.sample_centered(&mut r, 1).unwrap().z).collect();
        let mean = zs.iter().sum::<f64>() / n as f64;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 3.0 * (var / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn degenerate_kernel_is_iid() {
        let law = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let w = SumModel::weighted(law, MemoryKernel::custom(vec![1.0]).unwrap(), 10).unwrap();
        assert!(w.weights().unwrap().iter().all(|&v| v == 1.0));
        let i = SumModel::iid(law, 10).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(w.sample_centered(&mut r1, 1).unwrap().z, i.sample_centered(&mut r2, 1).unwrap().z);
        }
    }

    #[test]
    fn deterministic_stopping_is_iid() {
        let law = IncrementLaw::pareto(0.7, 1.0).unwrap();
        let s = SumModel::stopped(CountingSpec::Deterministic { n: 20 }, law, 1.0, false).unwrap();
        let i = SumModel::iid(law, 20).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..20_000).map(|_| s.sample_centered(&mut r, 100).unwrap().z).collect();
        let mut b: Vec<f64> = (0..20_000).map(|_| i.sample_centered(&mut r, 100).unwrap().z).collect();
        b.sort_by(|x, y| x.total_cmp(y));
        let ecdf = |x: f64| b.partition_point(|&v| v <= x) as f64 / b.len() as f64;
        let d = ks_distance(a, ecdf);
        // two-sample bound at 1%
        assert!(d < 1.63 * (2.0 / 20_000.0f64).sqrt(), "{d}");
    }

    #[test]
    fn ld_condition_examples() {
        let law = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let m = SumModel::iid(law, 100).unwrap();
        assert!((m.ld_condition(1e8).unwrap() - 0.01).abs() < 1e-15);
        let s = SumModel::stopped(CountingSpec::poisson(2.0).unwrap(), law, 50.0, false).unwrap();
        assert!((s.ld_condition(1e8).unwrap() - 0.01).abs() < 1e-15);
        let w = SumModel::weighted(law, MemoryKernel::exponential(0.5).unwrap(), 2).unwrap();
        assert!((w.ld_condition(1e4).unwrap() - (1.0 + 1.5f64.sqrt()) * 0.01).abs() < 1e-15);
        let g = SumModel::stopped(CountingSpec::geometric(Growth::default()).unwrap(), law, 1e4, false).unwrap();
        assert!((g.ld_condition(1e8).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exceedance_agrees_with_direct_simulation() {
        let law = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let fp = CountingSpec::FirstPassage {
            cost: crate::counting::CostRule::Fixed(crate::laws::BatchLaw::deterministic(1).unwrap()),
        };
        let m = SumModel::stopped(fp, law, 1.0, false).unwrap();
        let x = 1e5;
        let reps = 50_000;
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let a = (0..reps).filter(|_| m.sample_exceedance(x, &mut r, 1 << 20).unwrap().hit).count();
        let b = (0..reps).filter(|_| m.sample_centered(&mut r, 1 << 20).unwrap().z > x).count();
        let (pa, pb) = (a as f64 / reps as f64, b as f64 / reps as f64);
        let se = ((pa * (1.0 - pa) + pb * (1.0 - pb)) / reps as f64).sqrt();
        assert!((pa - pb).abs() < 4.0 * se, "{pa} vs {pb}");
    }

    #[test]
    fn weighted_two_term_tail() {
        let law = IncrementLaw::pareto(0.5, 1.0).unwrap();
        let m = SumModel::weighted(law, MemoryKernel::exponential(0.5).unwrap(), 2).unwrap();
        // S = 1.5 X_1 + X_2
        let x = 1e6;
        let reps = 400_000;
        let mut r = ChaCha8Rng::seed_from_u64(6);
        let hits = (0..reps).filter(|_| m.sample_exceedance(x, &mut r, 1).unwrap().hit).count();
        let p = hits as f64 / reps as f64;
        let lead = (1.5f64.sqrt() + 1.0) * x.powf(-0.5);
        assert!((p / lead - 1.0).abs() < 0.06, "{p} vs {lead}");
    }
}

//! Exact sampling of the event {X_1 + … + X_n > threshold} for large n.
//!
//! The uniforms behind the n draws are resolved lazily: tail-probability
//! space is partitioned into cells that carry only a count, and cells are
//! split (with binomial counts) until the bounds on the sum settle the
//! comparison. The refinement order does not depend on the threshold, so
//! for one random stream the decision is monotone in the threshold.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::laws::IncrementLaw;

/// Counts at or below this are drawn directly.
const DIRECT_LIMIT: u64 = 64;
const INDIVIDUAL: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SumDecision {
    pub hit: bool,
    /// Uniform draws plus binomial splits consumed.
    pub work: u64,
}

#[derive(Debug)]
struct Cell {
    p_lo: f64,
    p_hi: f64,
    v_lo: f64,
    v_hi: f64,
    count: u64,
}

impl Cell {
    fn slack(&self) -> f64 {
        self.count as f64 * (self.v_hi - self.v_lo)
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.slack() == other.slack()
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken on position so the order is fully deterministic
        self.slack().total_cmp(&other.slack()).then(other.p_lo.total_cmp(&self.p_lo))
    }
}

/// Whether the law supports lazy resolution (cheap exact quantiles).
pub(crate) fn lazy_supported(law: &IncrementLaw) -> bool {
    matches!(
        law,
        IncrementLaw::Pareto { .. } | IncrementLaw::ParetoLog { .. } | IncrementLaw::Exponential { .. }
    )
}

fn quantile(law: &IncrementLaw, p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    law.inverse_tail(p.min(1.0)).expect("law supports inverse tail")
}

/// Decides Σ_{i≤n} X_i > threshold exactly for a nonnegative law.
pub(crate) fn sum_exceeds<R: Rng + ?Sized>(
    law: &IncrementLaw,
    n: u64,
    threshold: f64,
    rng: &mut R,
) -> SumDecision {
    if n <= DIRECT_LIMIT || !lazy_supported(law) {
        return direct(law, n, threshold, rng);
    }
    lazy(law, n, threshold, rng)
}

fn direct<R: Rng + ?Sized>(law: &IncrementLaw, n: u64, threshold: f64, rng: &mut R) -> SumDecision {
    let mut s = 0.0;
    for i in 0..n {
        s += law.sample(rng);
        if s > threshold {
            return SumDecision { hit: true, work: i + 1 };
        }
    }
    SumDecision { hit: false, work: n }
}

struct Bounds {
    lo: f64,
    hi_finite: f64,
    infinite_cells: usize,
}

impl Bounds {
    fn add(&mut self, c: &Cell, sign: f64) {
        let k = c.count as f64;
        self.lo += sign * k * c.v_lo;
        if c.v_hi.is_infinite() {
            if c.count > 0 {
                if sign > 0.0 {
                    self.infinite_cells += 1;
                } else {
                    self.infinite_cells -= 1;
                }
            }
        } else {
            self.hi_finite += sign * k * c.v_hi;
        }
    }

    fn hi(&self) -> f64 {
        if self.infinite_cells > 0 {
            f64::INFINITY
        } else {
            self.hi_finite
        }
    }
}

fn lazy<R: Rng + ?Sized>(law: &IncrementLaw, n: u64, threshold: f64, rng: &mut R) -> SumDecision {
    let v_min = law.support_min().max(0.0);
    let root = Cell { p_lo: 0.0, p_hi: 1.0, v_lo: v_min, v_hi: f64::INFINITY, count: n };
    let mut bounds = Bounds { lo: 0.0, hi_finite: 0.0, infinite_cells: 0 };
    bounds.add(&root, 1.0);
    let mut heap = BinaryHeap::new();
    heap.push(root);
    let mut work = 0u64;
    loop {
        if bounds.lo > threshold {
            return SumDecision { hit: true, work };
        }
        if bounds.hi() <= threshold {
            return SumDecision { hit: false, work };
        }
        let cell = match heap.pop() {
            Some(c) => c,
            // everything resolved: the bounds coincide
            None => return SumDecision { hit: bounds.lo > threshold, work },
        };
        bounds.add(&cell, -1.0);
        if cell.count <= INDIVIDUAL {
            for _ in 0..cell.count {
                let u = 1.0 - rng.gen::<f64>();
                let p = cell.p_lo + (cell.p_hi - cell.p_lo) * u;
                let v = quantile(law, p).clamp(cell.v_lo, cell.v_hi);
                bounds.lo += v;
                bounds.hi_finite += v;
                work += 1;
            }
            continue;
        }
        let width = cell.v_hi - cell.v_lo;
        if width.is_finite() && width <= 1e-14 * cell.v_hi.max(1e-300) {
            let v = 0.5 * (cell.v_lo + cell.v_hi);
            bounds.lo += cell.count as f64 * v;
            bounds.hi_finite += cell.count as f64 * v;
            continue;
        }
        let p_mid = if cell.v_hi.is_infinite() {
            cell.p_hi * (2.0 / cell.count as f64).min(0.5)
        } else {
            let v_mid = if cell.v_hi > 4.0 * cell.v_lo && cell.v_lo > 0.0 {
                (cell.v_lo * cell.v_hi).sqrt()
            } else {
                0.5 * (cell.v_lo + cell.v_hi)
            };
            law.tail(v_mid).clamp(cell.p_lo, cell.p_hi)
        };
        let frac = (p_mid - cell.p_lo) / (cell.p_hi - cell.p_lo);
        if !(frac > 0.0 && frac < 1.0) {
            // The quantile map is flat at double precision here.
            let v = 0.5 * (cell.v_lo + cell.v_hi.min(f64::MAX));
            bounds.lo += cell.count as f64 * v;
            bounds.hi_finite += cell.count as f64 * v;
            continue;
        }
        let upper = binomial(cell.count, frac, rng);
        work += 1;
        let v_mid = quantile(law, p_mid).clamp(cell.v_lo, cell.v_hi);
        let top = Cell { p_lo: cell.p_lo, p_hi: p_mid, v_lo: v_mid, v_hi: cell.v_hi, count: upper };
        let bottom = Cell { p_lo: p_mid, p_hi: cell.p_hi, v_lo: cell.v_lo, v_hi: v_mid, count: cell.count - upper };
        for c in [top, bottom] {
            if c.count > 0 {
                bounds.add(&c, 1.0);
                heap.push(c);
            }
        }
    }
}

/// Binomial(n, p) draw. Small means use geometric skips, which are exact
/// and avoid a failure of the library sampler at very large n with tiny np.
pub(crate) fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    let flip = p > 0.5;
    let q = if flip { 1.0 - p } else { p };
    let k = if q <= 0.0 {
        0
    } else if n as f64 * q < 30.0 {
        let log_miss = (-q).ln_1p();
        let mut pos = 0u64;
        let mut k = 0u64;
        loop {
            let u = 1.0 - rng.gen::<f64>();
            let skip = (u.ln() / log_miss).floor();
            if skip >= (n - pos) as f64 {
                break k;
            }
            pos += skip as u64 + 1;
            k += 1;
            if pos >= n {
                break k;
            }
        }
    } else {
        Binomial::new(n, q).expect("valid binomial").sample(rng)
    };
    if flip {
        n - k
    } else {
        k
    }
}

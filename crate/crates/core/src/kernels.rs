//! Memory kernels, cumulative weights and the norming L_n.

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MemoryKernel {
    /// m_k = ν^k
    Exponential { nu: f64 },
    /// m_k = (k+1)^{−ν}
    Algebraic { nu: f64 },
    /// Explicit values; entries past the end are zero.
    Custom { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelNorming {
    pub n: usize,
    pub beta: f64,
    pub l_n: f64,
    pub weights: Vec<f64>,
}

impl MemoryKernel {
    pub fn exponential(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return domain(format!("kernel nu must lie in (0,1), got {nu}"));
        }
        Ok(MemoryKernel::Exponential { nu })
    }

    pub fn algebraic(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return domain(format!("kernel nu must lie in (0,1), got {nu}"));
        }
        Ok(MemoryKernel::Algebraic { nu })
    }

    /// A custom kernel must start with m_0 = 1. Trailing zeros are allowed
    /// (they model a finite memory), but listed entries must be non-negative.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return domain("custom kernel must start with m_0 = 1");
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return domain("custom kernel entries must be finite and non-negative");
        }
        Ok(MemoryKernel::Custom { values })
    }

    pub fn m(&self, k: usize) -> f64 {
        match self {
            MemoryKernel::Exponential { nu } => nu.powi(k as i32),
            MemoryKernel::Algebraic { nu } => ((k + 1) as f64).powf(-nu),
            MemoryKernel::Custom { values } => values.get(k).copied().unwrap_or(0.0),
        }
    }
}

/// w_j = Σ_{i≤j} m_i for j = 0..n−1.
pub fn weights(kernel: &MemoryKernel, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("weights need n >= 1");
    }
    let mut w = Vec::with_capacity(n);
    let mut acc = 0.0;
    match kernel {
        MemoryKernel::Exponential { nu } => {
            let mut m = 1.0;
            for _ in 0..n {
                acc += m;
                w.push(acc);
                m *= nu;
            }
        }
        _ => {
            for k in 0..n {
                acc += kernel.m(k);
                w.push(acc);
            }
        }
    }
    Ok(w)
}

/// L_n = Σ_{j<n} w_j^β, summed exactly.
pub fn ldp_norming(kernel: &MemoryKernel, n: usize, beta: f64) -> Result<KernelNorming> {
    if !(beta > 0.0 && beta < 2.0) || beta == 1.0 {
        return domain(format!("beta must lie in (0,2) without 1, got {beta}"));
    }
    let weights = weights(kernel, n)?;
    let l_n = weights.iter().map(|w| w.powf(beta)).sum::<f64>();
    Ok(KernelNorming { n, beta, l_n, weights })
}

/// Least-squares slope of ln L_n against ln n over the top two decades of
/// the grid.
pub fn scaling_exponent(kernel: &MemoryKernel, beta: f64, n_grid: &[usize]) -> Result<f64> {
    let n_min = n_grid.iter().copied().min().unwrap_or(0);
    let n_max = n_grid.iter().copied().max().unwrap_or(0);
    if n_grid.len() < 2 || n_min == 0 || (n_max as f64) < 100.0 * n_min as f64 {
        return domain("scaling grid needs at least two points spanning two decades");
    }
    let cut = n_max as f64 / 100.0;
    let mut pts: Vec<usize> = n_grid.iter().copied().filter(|&n| n as f64 >= cut).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 2 {
        return domain("scaling grid has fewer than two points in its top two decades");
    }
    // One pass over the largest n yields every L_n on the grid.
    let norm = ldp_norming(kernel, n_max, beta)?;
    let mut prefix = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for w in &norm.weights {
        acc += w.powf(beta);
        prefix.push(acc);
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&n| ((n as f64).ln(), prefix[n - 1].ln())).collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Logarithmic grid with `per_decade` points per decade from `lo` to `hi`.
pub fn log_grid(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((b - a) * per_decade as f64).round().max(1.0) as usize;
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

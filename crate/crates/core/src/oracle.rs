//! Brute-force references: convolution quadrature for tiny n, direct pgf
//! summation and a simulated first-passage walk. Nothing here goes through
//! the predictors or the estimators.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::counting::CountingSpec;
use crate::error::{domain, unsupported, Result};
use crate::laws::IncrementLaw;
use crate::quad::{integrate, integrate_log, Quadrature, Tolerance};
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    QuadratureConvolution,
    Enumeration,
    WalkSimulation,
}

impl std::fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleMethod::QuadratureConvolution => "quadrature_convolution",
            OracleMethod::Enumeration => "enumeration",
            OracleMethod::WalkSimulation => "walk_simulation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub error_bound: f64,
    pub method: OracleMethod,
}

impl OracleResult {
    /// |value − other| ≤ tol + error_bound.
    pub fn agrees(&self, other: f64, tol: f64) -> bool {
        (self.value - other).abs() <= tol + self.error_bound
    }
}

const TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-11, max_intervals: 4000 };

/// ∫_lo^hi g, on a log scale where the range allows it.
fn spread(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Quadrature {
    if hi <= lo {
        return Quadrature { value: 0.0, abs_error: 0.0 };
    }
    if lo > 0.0 {
        return integrate_log(g, lo, hi, TOL);
    }
    let cut = hi.min(1.0);
    let a = integrate(g, 0.0, cut, TOL);
    let b = if hi > cut { integrate_log(g, cut, hi, TOL) } else { Quadrature { value: 0.0, abs_error: 0.0 } };
    Quadrature { value: a.value + b.value, abs_error: a.abs_error + b.abs_error }
}

/// ∫_m^{x−m} f(y) G(x − y) dy, split at x/2 so each endpoint region is
/// resolved on its own log scale.
fn convolve(law: &IncrementLaw, g: &dyn Fn(f64) -> f64, x: f64, m: f64) -> Quadrature {
    let f = |y: f64| law.density(y).unwrap_or(0.0);
    let mid = 0.5 * x;
    let left = spread(&|y| f(y) * g(x - y), m, mid);
    let right = spread(&|u| f(x - u) * g(u), m, mid);
    Quadrature { value: left.value + right.value, abs_error: left.abs_error + right.abs_error }
}

fn tail2(law: &IncrementLaw, x: f64, m: f64) -> Quadrature {
    if x <= 2.0 * m {
        return Quadrature { value: 1.0, abs_error: 0.0 };
    }
    let q = convolve(law, &|u| law.tail(u), x, m);
    Quadrature { value: law.tail(x - m) + q.value, abs_error: q.abs_error }
}

/// P[X_1 + … + X_n > x] for n ∈ {2, 3} by nested adaptive quadrature.
pub fn convolution_tail(law: &IncrementLaw, n: usize, x: f64) -> Result<OracleResult> {
    if !(n == 2 || n == 3) {
        return domain(format!("convolution oracle supports n = 2 or 3, got {n}"));
    }
    if !law.is_nonnegative() {
        return unsupported("convolution oracle needs a nonnegative law");
    }
    law.density(1.0)?;
    let m = law.support_min().max(0.0);
    if law.tail(m) < 1.0 {
        return unsupported("convolution oracle needs a law without atoms");
    }
    let q = if n == 2 {
        tail2(law, x, m)
    } else if x <= 3.0 * m {
        Quadrature { value: 1.0, abs_error: 0.0 }
    } else {
        // X_1 = y, then S_2 > x − y
        let inner = |u: f64| tail2(law, u, m).value;
        let f = |y: f64| law.density(y).unwrap_or(0.0);
        let lo = m;
        let hi = x - 2.0 * m;
        let mid = 0.5 * (lo + hi);
        let a = spread(&|y| f(y) * inner(x - y), lo, mid);
        let b = spread(&|u| f(x - u) * inner(u), x - hi, x - mid);
        Quadrature { value: law.tail(x - 2.0 * m) + a.value + b.value, abs_error: a.abs_error + b.abs_error }
    };
    Ok(OracleResult {
        value: q.value.clamp(0.0, 1.0),
        error_bound: q.abs_error + 64.0 * f64::EPSILON,
        method: OracleMethod::QuadratureConvolution,
    })
}

/// P[N(t) = k] for k = 0..=n_max, computed from the defining laws.
fn count_pmf(spec: &CountingSpec, t: f64, n_max: usize) -> Result<Vec<f64>> {
    let mut p = vec![0.0; n_max + 1];
    match spec {
        CountingSpec::Poisson { rho } => {
            let lam = rho * t;
            for (k, pk) in p.iter_mut().enumerate() {
                *pk = if lam == 0.0 {
                    (k == 0) as u8 as f64
                } else {
                    (-lam + k as f64 * lam.ln() - ln_gamma(k as f64 + 1.0)?).exp()
                };
            }
        }
        CountingSpec::Geometric { growth } => {
            // success probability 1/ρ on {1, 2, …}
            let q = 1.0 / growth.rho(t).max(1.0);
            let mut v = q;
            for pk in p.iter_mut().skip(1) {
                *pk = v;
                v *= 1.0 - q;
            }
        }
        CountingSpec::TwoPoint { growth, gamma } => {
            let rho = growth.rho(t);
            let atoms = [(rho.round(), 1.0 - rho.powi(-2)), (rho.powf(1.0 + 1.0 / gamma).round(), rho.powi(-2))];
            for (k, w) in atoms {
                if (k as usize) <= n_max {
                    p[k as usize] += w;
                }
            }
        }
        CountingSpec::Deterministic { n } => {
            if (*n as usize) <= n_max {
                p[*n as usize] = 1.0;
            }
        }
        _ => return unsupported("no enumerable pmf for this counting spec"),
    }
    Ok(p)
}

/// Σ_{k ≤ n_max} P[N = k] z^k with remainder bound z^{n_max} P[N > n_max].
pub fn enumerate_pgf(spec: &CountingSpec, t: f64, z: f64, n_max: usize) -> Result<OracleResult> {
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("pgf argument must lie in [0,1], got {z}"));
    }
    let p = count_pmf(spec, t, n_max)?;
    let mut value = 0.0;
    let mut mass = 0.0;
    let mut zk = 1.0;
    for &pk in &p {
        value += pk * zk;
        mass += pk;
        zk *= z;
    }
    let rest = (1.0 - mass).max(0.0);
    let rounding = (n_max as f64 + 1.0) * 4.0 * f64::EPSILON;
    Ok(OracleResult {
        value,
        error_bound: z.powf(n_max as f64) * rest + rounding,
        method: OracleMethod::Enumeration,
    })
}

/// P[τ > n] = C(2n, n) 4^{−n}.
pub fn sparre_andersen_exact(n: u64) -> f64 {
    (1..=n).fold(1.0, |p, k| p * (2 * k - 1) as f64 / (2 * k) as f64)
}

/// Empirical P[τ > n] for n = 0..=n_max, where τ is the first time a
/// Gaussian-step walk from 0 becomes positive. Error bounds are three
/// binomial standard errors.
pub fn first_passage_walk<R: Rng + ?Sized>(rng: &mut R, n_max: usize, walks: u64) -> Result<Vec<OracleResult>> {
    if n_max < 2 || walks < 2 {
        return domain("first-passage walk needs n_max >= 2 and at least 2 walks");
    }
    // survived[n] counts walks with τ > n
    let mut survived = vec![0u64; n_max + 1];
    for _ in 0..walks {
        let mut s = 0.0;
        survived[0] += 1;
        for count in survived.iter_mut().skip(1) {
            s += rng.sample::<f64, _>(StandardNormal);
            if s > 0.0 {
                break;
            }
            *count += 1;
        }
    }
    let w = walks as f64;
    Ok(survived
        .into_iter()
        .map(|c| {
            let p = c as f64 / w;
            OracleResult {
                value: p,
                error_bound: 3.0 * (p * (1.0 - p) / w).sqrt() + 1.0 / w,
                method: OracleMethod::WalkSimulation,
            }
        })
        .collect())
}

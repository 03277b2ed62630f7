//! Increment laws and batch-size laws: samplers, exact tails, means and
//! Laplace–Stieltjes transform data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::error::{domain, unsupported, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::specfun::{
    erfc, gamma, hurwitz_zeta, polylog, polylog_minus_zeta, polylog_minus_zeta_log, riemann_zeta, upper_incomplete_gamma,
};

/// How a transform value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMethod {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for TransformMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformMethod::ClosedForm => "closed_form",
            TransformMethod::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub s: f64,
    pub value: f64,
    pub method: TransformMethod,
}

/// Law of an increment X.
///
/// `ParetoLog` has tail exp(−β(u−u0)) (u/u0)^κ with u = ln(x/scale) above
/// x0 = scale·e^{u0}, u0 = max(1, κ/β); so F̄(x) = c·(ln(x/scale))^κ x^{−β}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementLaw {
    Pareto { beta: f64, scale: f64 },
    ParetoLog { beta: f64, scale: f64, log_exponent: f64 },
    /// Positive stable law with Laplace transform e^{−s^α}.
    OneSidedStable { alpha: f64 },
    Exponential { rate: f64 },
    /// Standard normal steps; only the first-passage walk uses these.
    GaussianStep,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 2.0) || beta == 1.0 {
        return domain(format!("beta must lie in (0,2) without 1, got {beta}"));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

/// y + expm1(−y), accurate for small y.
fn y_plus_expm1_neg(y: f64) -> f64 {
    if y < 0.1 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..30 {
            term *= -y / k as f64;
            if k >= 2 {
                sum += term;
            }
        }
        sum
    } else {
        y + (-y).exp_m1()
    }
}

/// e^y (1 − y) − 1, accurate for small y.
fn exp_one_minus_y(y: f64) -> f64 {
    if y.abs() < 0.1 {
        // −Σ_{k≥2} (k−1) y^k / k!
        let mut pow = y;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for k in 2..30 {
            pow *= y;
            fact *= k as f64;
            sum -= (k - 1) as f64 * pow / fact;
        }
        sum
    } else {
        y.exp() * (1.0 - y) - 1.0
    }
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]
    1.0 - rng.gen::<f64>()
}

impl IncrementLaw {
    pub fn pareto(beta: f64, scale: f64) -> Result<Self> {
        check_beta(beta)?;
        check_positive("scale", scale)?;
        Ok(IncrementLaw::Pareto { beta, scale })
    }

    pub fn pareto_log(beta: f64, scale: f64, log_exponent: f64) -> Result<Self> {
        check_beta(beta)?;
        check_positive("scale", scale)?;
        if !log_exponent.is_finite() {
            return domain("log_exponent must be finite");
        }
        Ok(IncrementLaw::ParetoLog { beta, scale, log_exponent })
    }

    pub fn one_sided_stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("stable alpha must lie in (0,1), got {alpha}"));
        }
        Ok(IncrementLaw::OneSidedStable { alpha })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check_positive("rate", rate)?;
        Ok(IncrementLaw::Exponential { rate })
    }

    /// Tail index β, or `None` for light-tailed laws.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            IncrementLaw::Pareto { beta, .. } | IncrementLaw::ParetoLog { beta, .. } => Some(beta),
            IncrementLaw::OneSidedStable { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, IncrementLaw::GaussianStep)
    }

    /// Lower end of the support (below it the tail equals 1).
    pub fn support_min(&self) -> f64 {
        match *self {
            IncrementLaw::Pareto { scale, .. } => scale,
            IncrementLaw::ParetoLog { .. } => self.log_params().3,
            IncrementLaw::OneSidedStable { .. } | IncrementLaw::Exponential { .. } => 0.0,
            IncrementLaw::GaussianStep => f64::NEG_INFINITY,
        }
    }

    // (beta, kappa, u0, x0, scale)
    fn log_params(&self) -> (f64, f64, f64, f64, f64) {
        match *self {
            IncrementLaw::ParetoLog { beta, scale, log_exponent } => {
                let u0 = (log_exponent / beta).max(1.0);
                (beta, log_exponent, u0, scale * u0.exp(), scale)
            }
            _ => unreachable!("log_params on a non-ParetoLog law"),
        }
    }

    /// Exact tail probability P[X > x].
    pub fn tail(&self, x: f64) -> f64 {
        match *self {
            IncrementLaw::Pareto { beta, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (x / scale).powf(-beta)
                }
            }
            IncrementLaw::ParetoLog { .. } => {
                let (beta, kappa, u0, x0, scale) = self.log_params();
                if x <= x0 {
                    return 1.0;
                }
                let u = (x / scale).ln();
                (-beta * (u - u0) + kappa * (u / u0).ln()).exp()
            }
            IncrementLaw::OneSidedStable { alpha } => stable_tail(alpha, x),
            IncrementLaw::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            IncrementLaw::GaussianStep => 0.5 * erfc(x / std::f64::consts::SQRT_2),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            IncrementLaw::OneSidedStable { alpha } => stable_cdf(alpha, x),
            IncrementLaw::GaussianStep => 0.5 * erfc(-x / std::f64::consts::SQRT_2),
            _ => 1.0 - self.tail(x),
        }
    }

    /// Density where a closed form exists.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(match *self {
            IncrementLaw::Pareto { beta, scale } => {
                if x < scale {
                    0.0
                } else {
                    beta / scale * (x / scale).powf(-beta - 1.0)
                }
            }
            IncrementLaw::ParetoLog { .. } => {
                let (beta, kappa, _, x0, scale) = self.log_params();
                if x < x0 {
                    0.0
                } else {
                    let u = (x / scale).ln();
                    self.tail(x) * (beta - kappa / u) / x
                }
            }
            IncrementLaw::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            IncrementLaw::GaussianStep => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            IncrementLaw::OneSidedStable { .. } => {
                return unsupported("stable density has no closed form");
            }
        })
    }

    /// Mean, or `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            IncrementLaw::Pareto { beta, scale } => (beta > 1.0).then(|| scale * beta / (beta - 1.0)),
            IncrementLaw::ParetoLog { beta, .. } => {
                if beta < 1.0 {
                    return None;
                }
                let (_, _, _, x0, _) = self.log_params();
                let q = self.tail_integral(x0, |x| self.tail(x));
                Some(x0 + q)
            }
            IncrementLaw::OneSidedStable { .. } => None,
            IncrementLaw::Exponential { rate } => Some(1.0 / rate),
            IncrementLaw::GaussianStep => Some(0.0),
        }
    }

    /// ∫_{m}^∞ g(x) dx on the substitution x = m·e^v, for power-law integrands.
    fn tail_integral<G: Fn(f64) -> f64>(&self, m: f64, g: G) -> f64 {
        integrate_to_infinity(
            |v: f64| {
                let x = m * v.exp();
                g(x) * x
            },
            0.0,
            4.0,
            Tolerance { abs: 1e-15, rel: 1e-12, max_intervals: 4000 },
        )
        .value
    }

    /// Slowly varying factor ℓ(x) = F̄(x)·x^β.
    pub fn slowly_varying(&self, x: f64) -> Result<f64> {
        match self.beta() {
            Some(b) => Ok(self.tail(x) * x.powf(b)),
            None => unsupported("law is not regularly varying"),
        }
    }

    /// Constant c with F̄(x) ~ c x^{−β} (or c (ln(x/scale))^κ x^{−β} for the
    /// logarithmic family).
    pub fn tail_constant(&self) -> Result<f64> {
        match *self {
            IncrementLaw::Pareto { beta, scale } => Ok(scale.powf(beta)),
            IncrementLaw::ParetoLog { .. } => {
                let (beta, kappa, u0, _, scale) = self.log_params();
                Ok(scale.powf(beta) * (beta * u0).exp() * u0.powf(-kappa))
            }
            IncrementLaw::OneSidedStable { alpha } => Ok(1.0 / gamma(1.0 - alpha)),
            _ => unsupported("law is not regularly varying"),
        }
    }

    /// Quantile of the tail: the x with F̄(x) = p, for p in (0, 1].
    pub fn inverse_tail(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return domain(format!("inverse_tail needs p in (0,1], got {p}"));
        }
        match *self {
            IncrementLaw::Pareto { beta, scale } => Ok(scale * p.powf(-1.0 / beta)),
            IncrementLaw::ParetoLog { .. } => Ok(self.pareto_log_inverse(p)),
            IncrementLaw::Exponential { rate } => Ok(-p.ln() / rate),
            IncrementLaw::OneSidedStable { .. } => {
                // Monotone bisection on a log scale.
                let (mut lo, mut hi) = (1e-300f64, 1.0f64);
                while self.tail(hi) > p {
                    lo = hi;
                    hi *= 16.0;
                }
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if self.tail(mid) > p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi / lo < 1.0 + 1e-14 {
                        break;
                    }
                }
                Ok(hi)
            }
            IncrementLaw::GaussianStep => unsupported("inverse tail of the Gaussian step"),
        }
    }

    fn pareto_log_inverse(&self, p: f64) -> f64 {
        let (beta, kappa, u0, x0, scale) = self.log_params();
        if p >= 1.0 {
            return x0;
        }
        // Solve h(u) = β(u−u0) − κ ln(u/u0) = −ln p, h increasing on u ≥ u0.
        let target = -p.ln();
        let h = |u: f64| beta * (u - u0) - kappa * (u / u0).ln();
        let mut lo = u0;
        let mut hi = u0 + target / beta + 1.0;
        while h(hi) < target {
            hi = u0 + 2.0 * (hi - u0);
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..100 {
            let v = h(u) - target;
            if v > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let d = beta - kappa / u;
            let mut next = u - v / d;
            if !(next > lo && next < hi) || d <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-15 * u {
                u = next;
                break;
            }
            u = next;
        }
        scale * u.exp()
    }

    /// Draws one increment.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            IncrementLaw::Pareto { beta, scale } => scale * uniform_open(rng).powf(-1.0 / beta),
            IncrementLaw::ParetoLog { .. } => self.pareto_log_inverse(uniform_open(rng)),
            IncrementLaw::OneSidedStable { alpha } => sample_stable(alpha, rng),
            IncrementLaw::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            IncrementLaw::GaussianStep => StandardNormal.sample(rng),
        }
    }

    /// Draws from the law conditioned on X > h.
    pub fn sample_above<R: Rng + ?Sized>(&self, h: f64, rng: &mut R) -> Result<f64> {
        match *self {
            IncrementLaw::Pareto { beta, scale } => {
                Ok(scale.max(h) * uniform_open(rng).powf(-1.0 / beta))
            }
            IncrementLaw::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                Ok(h.max(0.0) + e / rate)
            }
            IncrementLaw::ParetoLog { .. } => {
                let p = self.tail(h) * uniform_open(rng);
                Ok(self.pareto_log_inverse(p).max(h))
            }
            _ => unsupported("conditional sampling is only available for Pareto-type and exponential laws"),
        }
    }

    fn check_centered(&self, centered: bool) -> Result<Option<f64>> {
        if !centered {
            return Ok(None);
        }
        match self.mean() {
            Some(m) => Ok(Some(m)),
            None => domain("centered transform requested for an infinite-mean law"),
        }
    }

    /// Laplace–Stieltjes transform F̂(s) (times e^{sμ} when centered).
    pub fn lst(&self, s: f64, centered: bool) -> Result<TransformValue> {
        let (gap, method) = self.lst_gap_with_method(s, centered)?;
        Ok(TransformValue { s, value: 1.0 + gap, method })
    }

    /// a(s) = F̂(s) − 1 (or F̂(s)e^{sμ} − 1), without cancellation at small s.
    pub fn lst_gap(&self, s: f64, centered: bool) -> Result<f64> {
        self.lst_gap_with_method(s, centered).map(|v| v.0)
    }

    fn lst_gap_with_method(&self, s: f64, centered: bool) -> Result<(f64, TransformMethod)> {
        if !(s >= 0.0) {
            return domain(format!("transform argument must be >= 0, got {s}"));
        }
        if matches!(self, IncrementLaw::GaussianStep) {
            return unsupported("Laplace transform of a two-sided law");
        }
        let mean = self.check_centered(centered)?;
        if s == 0.0 {
            return Ok((0.0, TransformMethod::ClosedForm));
        }
        use TransformMethod::*;
        Ok(match (*self, mean) {
            (IncrementLaw::Pareto { beta, scale }, None) => {
                let y = s * scale;
                let g = if y > 700.0 {
                    // Both terms underflow relative to −1.
                    0.0
                } else {
                    y.powf(beta) * upper_incomplete_gamma(1.0 - beta, y)?
                };
                ((-y).exp_m1() - g, ClosedForm)
            }
            (IncrementLaw::Pareto { beta, scale }, Some(mu)) => {
                let y = s * scale;
                let r = y_plus_expm1_neg(y)
                    + (y.powf(beta) * upper_incomplete_gamma(2.0 - beta, y)?
                        + y * (-(-y).exp_m1()))
                        / (beta - 1.0);
                (centered_from_r(mu * s, r), ClosedForm)
            }
            (IncrementLaw::OneSidedStable { alpha }, None) => ((-s.powf(alpha)).exp_m1(), ClosedForm),
            (IncrementLaw::Exponential { rate }, None) => (-s / (rate + s), ClosedForm),
            (IncrementLaw::Exponential { rate }, Some(mu)) => {
                // rate/(rate+s)·e^{s/rate} − 1
                ((s * mu - (s / rate).ln_1p()).exp_m1(), ClosedForm)
            }
            (_, None) => (self.quadrature_gap(s), Quadrature),
            (_, Some(mu)) => (centered_from_r(mu * s, self.quadrature_r(s)), Quadrature),
        })
    }

    /// −s ∫_0^∞ e^{−sx} F̄(x) dx by quadrature.
    pub fn quadrature_gap(&self, s: f64) -> f64 {
        let m = self.support_min().max(0.0);
        let head = (-s * m).exp_m1();
        if m == 0.0 {
            let tol = Tolerance { abs: 1e-16, rel: 1e-12, max_intervals: 4000 };
            let near = integrate(|x: f64| (-s * x).exp() * self.tail(x), 0.0, 1.0, tol).value;
            let far = self.tail_integral(1.0, |x| (-s * x).exp() * self.tail(x));
            return -s * (near + far);
        }
        let q = self.tail_integral(m, |x| (-s * x).exp() * self.tail(x));
        head - s * q
    }

    /// R(s) = s ∫_0^∞ (1 − e^{−sx}) F̄(x) dx by quadrature (finite-mean laws).
    pub fn quadrature_r(&self, s: f64) -> f64 {
        let m = self.support_min().max(0.0);
        let head = y_plus_expm1_neg(s * m);
        let q = self.tail_integral(m.max(1e-300), |x| -(-s * x).exp_m1() * self.tail(x));
        head + s * q
    }

    /// Leading small-s behaviour: returns (β, c) with a(s) ≈ −Γ(1−β)·c·s^β
    /// (times (ln(1/(s·scale)))^κ for the logarithmic family).
    pub fn lst_asymptotic(&self, centered: bool) -> Result<(f64, f64)> {
        let beta = match self.beta() {
            Some(b) => b,
            None => return unsupported("law is not regularly varying"),
        };
        self.check_centered(centered)?;
        if !centered && beta > 1.0 {
            return unsupported("uncentered transform of a finite-mean law is dominated by the mean");
        }
        Ok((beta, self.tail_constant()?))
    }
}

fn centered_from_r(y: f64, r: f64) -> f64 {
    exp_one_minus_y(y) + y.exp() * r
}

fn stable_exponent(alpha: f64, phi: f64) -> f64 {
    // A(φ) = sin(αφ)^{α/(1−α)} sin((1−α)φ) / sin(φ)^{1/(1−α)}
    let k = 1.0 / (1.0 - alpha);
    (alpha * phi).sin().powf(alpha * k) * ((1.0 - alpha) * phi).sin() / phi.sin().powf(k)
}

fn stable_quad(alpha: f64, x: f64, tail: bool) -> f64 {
    if x <= 0.0 {
        return if tail { 1.0 } else { 0.0 };
    }
    let xp = x.powf(-alpha / (1.0 - alpha));
    let tol = Tolerance { abs: 1e-15, rel: 1e-11, max_intervals: 2000 };
    let q = integrate(
        |phi: f64| {
            let a = stable_exponent(alpha, phi) * xp;
            if tail {
                -(-a).exp_m1()
            } else {
                (-a).exp()
            }
        },
        0.0,
        PI,
        tol,
    );
    (q.value / PI).clamp(0.0, 1.0)
}

fn stable_tail(alpha: f64, x: f64) -> f64 {
    stable_quad(alpha, x, true)
}

fn stable_cdf(alpha: f64, x: f64) -> f64 {
    stable_quad(alpha, x, false)
}

fn sample_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    // Kanter's representation of the positive stable law.
    let phi = PI * uniform_open(rng);
    let w: f64 = Exp1.sample(rng);
    let phi = if phi >= PI { PI * (1.0 - f64::EPSILON) } else { phi };
    (alpha * phi).sin() / phi.sin().powf(1.0 / alpha)
        * (((1.0 - alpha) * phi).sin() / w).powf((1.0 - alpha) / alpha)
}

/// Size of the inversion table for the Zeta batch law.
pub const ZETA_TABLE_LEN: usize = 1 << 20;

/// Precomputed tail table T[k] = P[V > k], k = 0..=K.
pub struct ZetaTable {
    gamma: f64,
    zeta: f64,
    tail: Vec<f64>,
}

impl ZetaTable {
    fn new(gamma: f64) -> Result<Self> {
        let s = 1.0 + gamma;
        let zeta = riemann_zeta(s)?;
        let k_max = ZETA_TABLE_LEN;
        let mut tail = vec![0.0; k_max + 1];
        tail[k_max] = hurwitz_zeta(s, (k_max + 1) as f64)? / zeta;
        for k in (0..k_max).rev() {
            tail[k] = tail[k + 1] + ((k + 1) as f64).powf(-s) / zeta;
        }
        Ok(ZetaTable { gamma, zeta, tail })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = uniform_open(rng);
        let k_max = self.tail.len() - 1;
        if u > self.tail[k_max] {
            // smallest k with T[k] < u
            return self.tail.partition_point(|&t| t >= u) as u64;
        }
        self.sample_beyond(rng, k_max as f64)
    }

    /// Exact draw from V conditioned on V > k_max, by rejection from a
    /// discretized continuous Pareto proposal.
    fn sample_beyond<R: Rng + ?Sized>(&self, rng: &mut R, k_max: f64) -> u64 {
        let g = self.gamma;
        let k0 = k_max + 1.0;
        let bound = ((k0 + 1.0) / k0).powf(1.0 + g);
        loop {
            let z = k0 * uniform_open(rng).powf(-1.0 / g);
            let k = z.floor();
            if !k.is_finite() || k >= 9.0e18 {
                return u64::MAX;
            }
            let mass = k.powf(-g) * (-(-g * (1.0 / k).ln_1p()).exp_m1());
            let ratio = g * k.powf(-1.0 - g) / mass / bound;
            if rng.gen::<f64>() < ratio {
                return k as u64;
            }
        }
    }
}

/// Law of the positive integer batch sizes V.
#[derive(Clone)]
pub enum BatchLaw {
    /// P[V = k] = k^{−1−γ}/ζ(1+γ).
    Zeta(Arc<ZetaTable>),
    /// V = 1 + Poisson(mean_param).
    ShiftedPoisson { mean_param: f64 },
    Deterministic(u64),
}

impl fmt::Debug for BatchLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchLaw::Zeta(t) => write!(f, "Zeta {{ gamma: {} }}", t.gamma),
            BatchLaw::ShiftedPoisson { mean_param } => {
                write!(f, "ShiftedPoisson {{ mean_param: {mean_param} }}")
            }
            BatchLaw::Deterministic(k) => write!(f, "Deterministic({k})"),
        }
    }
}

impl PartialEq for BatchLaw {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BatchLaw::Zeta(a), BatchLaw::Zeta(b)) => a.gamma == b.gamma,
            (BatchLaw::ShiftedPoisson { mean_param: a }, BatchLaw::ShiftedPoisson { mean_param: b }) => a == b,
            (BatchLaw::Deterministic(a), BatchLaw::Deterministic(b)) => a == b,
            _ => false,
        }
    }
}

pub(crate) fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let d = Poisson::new(lambda).expect("positive finite Poisson mean");
    let v: f64 = d.sample(rng);
    v as u64
}

impl BatchLaw {
    pub fn zeta(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return domain(format!("zeta batch gamma must lie in (0,1), got {gamma}"));
        }
        Ok(BatchLaw::Zeta(Arc::new(ZetaTable::new(gamma)?)))
    }

    pub fn shifted_poisson(mean_param: f64) -> Result<Self> {
        if !(mean_param >= 0.0 && mean_param.is_finite()) {
            return domain(format!("shifted Poisson parameter must be >= 0, got {mean_param}"));
        }
        Ok(BatchLaw::ShiftedPoisson { mean_param })
    }

    pub fn deterministic(k: u64) -> Result<Self> {
        if k == 0 {
            return domain("deterministic batch size must be >= 1");
        }
        Ok(BatchLaw::Deterministic(k))
    }

    /// Tail exponent γ when the law has infinite mean.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            BatchLaw::Zeta(t) => Some(t.gamma),
            _ => None,
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match self {
            BatchLaw::Zeta(t) => {
                if k == 0 {
                    0.0
                } else {
                    (k as f64).powf(-1.0 - t.gamma) / t.zeta
                }
            }
            BatchLaw::ShiftedPoisson { mean_param } => {
                if k == 0 {
                    return 0.0;
                }
                let j = (k - 1) as f64;
                if *mean_param == 0.0 {
                    return if k == 1 { 1.0 } else { 0.0 };
                }
                (j * mean_param.ln() - mean_param - crate::specfun::ln_gamma(j + 1.0).unwrap_or(0.0)).exp()
            }
            BatchLaw::Deterministic(d) => {
                if k == *d {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// P[V > k].
    pub fn tail(&self, k: u64) -> f64 {
        match self {
            BatchLaw::Zeta(t) => {
                if (k as usize) < t.tail.len() {
                    t.tail[k as usize]
                } else {
                    hurwitz_zeta(1.0 + t.gamma, (k + 1) as f64).unwrap_or(0.0) / t.zeta
                }
            }
            BatchLaw::ShiftedPoisson { .. } => {
                let mut acc = 0.0;
                for j in 1..=k {
                    acc += self.pmf(j);
                }
                (1.0 - acc).max(0.0)
            }
            BatchLaw::Deterministic(d) => {
                if k < *d {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match self {
            BatchLaw::Zeta(_) => None,
            BatchLaw::ShiftedPoisson { mean_param } => Some(1.0 + mean_param),
            BatchLaw::Deterministic(d) => Some(*d as f64),
        }
    }

    fn check_z(z: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&z) {
            return domain(format!("batch pgf needs z in [0,1], got {z}"));
        }
        Ok(())
    }

    /// Probability generating function E[z^V].
    pub fn pgf(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        match self {
            BatchLaw::Zeta(t) => Ok(polylog(1.0 + t.gamma, z)? / t.zeta),
            _ => Ok(1.0 + self.pgf_gap(z)?),
        }
    }

    /// E[z^V] − 1 without cancellation near z = 1.
    pub fn pgf_gap(&self, z: f64) -> Result<f64> {
        Self::check_z(z)?;
        if z == 0.0 {
            return Ok(-1.0);
        }
        match self {
            BatchLaw::Zeta(t) => Ok(polylog_minus_zeta(1.0 + t.gamma, z)? / t.zeta),
            BatchLaw::ShiftedPoisson { mean_param } => {
                Ok((z.ln() + mean_param * (z - 1.0)).exp_m1())
            }
            BatchLaw::Deterministic(d) => Ok((*d as f64 * z.ln()).exp_m1()),
        }
    }

    /// E[z^V] − 1 at z = 1 + dz, for dz ≥ −1 (dz ≤ 0 for the Zeta law,
    /// whose series diverges above 1).
    pub fn pgf_gap_from(&self, dz: f64) -> Result<f64> {
        if !(dz >= -1.0 && dz.is_finite()) || (dz > 0.0 && matches!(self, BatchLaw::Zeta(_))) {
            return domain(format!("batch pgf undefined at 1 + {dz}"));
        }
        if dz == -1.0 {
            return Ok(-1.0);
        }
        let mu = dz.ln_1p();
        match self {
            BatchLaw::Zeta(t) => Ok(polylog_minus_zeta_log(1.0 + t.gamma, mu)? / t.zeta),
            BatchLaw::ShiftedPoisson { mean_param } => Ok((mu + mean_param * dz).exp_m1()),
            BatchLaw::Deterministic(d) => Ok((*d as f64 * mu).exp_m1()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            BatchLaw::Zeta(t) => t.sample(rng),
            BatchLaw::ShiftedPoisson { mean_param } => 1 + poisson_draw(*mean_param, rng),
            BatchLaw::Deterministic(d) => *d,
        }
    }

    /// Sum of `count` independent draws; returns `None` once the running
    /// sum exceeds `cap`.
    pub fn sum_of<R: Rng + ?Sized>(&self, count: u64, rng: &mut R, cap: u64) -> Option<u64> {
        match self {
            BatchLaw::Zeta(t) => {
                let mut total: u64 = 0;
                for _ in 0..count {
                    total = total.saturating_add(t.sample(rng));
                    if total > cap {
                        return None;
                    }
                }
                Some(total)
            }
            BatchLaw::ShiftedPoisson { mean_param } => {
                let v = count.saturating_add(poisson_draw(count as f64 * mean_param, rng));
                (v <= cap).then_some(v)
            }
            BatchLaw::Deterministic(d) => {
                let v = count.saturating_mul(*d);
                (v <= cap).then_some(v)
            }
        }
    }
}

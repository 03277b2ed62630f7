//! Real special functions: gamma, Hurwitz/Riemann zeta, polylogarithm and
//! the upper incomplete gamma function (negative orders included).

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// A function value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_error_bound: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument for which Γ(x) is finite in f64.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

fn gamma_positive(x: f64) -> f64 {
    // Lanczos approximation for x >= 0.5; the power is split to delay overflow.
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (xm + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(xm)
}

/// Γ(x) for real `x` off the non-positive integers.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return domain("gamma of NaN");
    }
    if x <= 0.0 && x == x.floor() {
        return domain(format!("gamma pole at {x}"));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Range(format!("gamma overflows at {x}")));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let g = gamma_positive(1.0 - x);
        let v = PI / (s * g);
        if !v.is_finite() {
            return Err(Error::Range(format!("gamma not representable at {x}")));
        }
        return Ok(v);
    }
    Ok(gamma_positive(x))
}

/// Γ(x) for arguments that are known to be valid. Panics on poles.
pub(crate) fn gamma(x: f64) -> f64 {
    gamma_fn(x).unwrap_or_else(|e| panic!("{e}"))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln())
}

// B_2, B_4, ..., B_22
const BERNOULLI: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

/// Euler–Maclaurin evaluation of Σ_{k≥0} (a+k)^{-s}, analytically continued
/// to every real `s != 1`. Accurate for `s > -8` and `a >= 1`.
fn hurwitz_em(s: f64, a: f64) -> SpecialValue {
    const N: usize = 16;
    let mut head = 0.0;
    for k in (0..N).rev() {
        head += (a + k as f64).powf(-s);
    }
    let big = a + N as f64;
    let mut sum = head + big.powf(1.0 - s) / (s - 1.0) + 0.5 * big.powf(-s);
    // term_j = B_2j / (2j)! * s(s+1)...(s+2j-2) * big^{-s-2j+1}
    let mut rising = s; // s(s+1)...(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut pow = big.powf(-s - 1.0);
    let inv2 = 1.0 / (big * big);
    let mut last = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * pow;
        if j + 1 == BERNOULLI.len() {
            last = term.abs();
            break;
        }
        sum += term;
        let jj = (2 * (j + 1)) as f64;
        rising *= (s + jj - 1.0) * (s + jj);
        fact *= (jj + 1.0) * (jj + 2.0);
        pow *= inv2;
    }
    SpecialValue { value: sum, abs_error_bound: last + 4.0 * f64::EPSILON * head.abs() }
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{-s} for s > 1, a >= 1.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain(format!("hurwitz_zeta requires s > 1, got {s}"));
    }
    if !(a >= 1.0) {
        return domain(format!("hurwitz_zeta requires a >= 1, got {a}"));
    }
    Ok(hurwitz_em(s, a).value)
}

/// Riemann ζ(s) for s > 1 with its error bound.
pub fn riemann_zeta_value(s: f64) -> Result<SpecialValue> {
    if !(s > 1.0) {
        return domain(format!("riemann_zeta requires s > 1, got {s}"));
    }
    Ok(hurwitz_em(s, 1.0))
}

/// Riemann ζ(s) for s > 1.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    riemann_zeta_value(s).map(|v| v.value)
}

/// ζ(s) on the real line (s != 1), used by the polylogarithm expansion.
fn zeta_real(s: f64) -> f64 {
    if s == 0.0 {
        return -0.5;
    }
    hurwitz_em(s, 1.0).value
}

/// Branch point at which [`polylog`] switches to the expansion about z = 1.
pub const POLYLOG_SWITCH: f64 = 0.99;

fn polylog_series(s: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut zk = 1.0;
    let mut k = 1u64;
    loop {
        zk *= z;
        let term = zk * (k as f64).powf(-s);
        sum += term;
        if term < 1e-18 * sum || k > 200_000 {
            return sum;
        }
        k += 1;
    }
}

/// Li_s(z) − ζ(s) from the expansion in μ = ln z about z = 1.
fn polylog_near_one_gap(s: f64, z: f64) -> f64 {
    polylog_gap_mu(s, z.ln())
}

fn polylog_gap_mu(s: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let si = s.round();
    let integer = (s - si).abs() < 1e-12;
    let mut gap = if integer {
        // Li_s(z) = Σ_{k != s-1} ζ(s-k) μ^k/k! + μ^{s-1}/(s-1)! [H_{s-1} - ln(-μ)]
        let m = si as i64 - 1;
        let harmonic: f64 = (1..=m).map(|k| 1.0 / k as f64).sum();
        let mut fact = 1.0;
        for k in 1..=m {
            fact *= k as f64;
        }
        mu.powi(m as i32) / fact * (harmonic - (-mu).ln())
    } else {
        gamma(1.0 - s) * (-mu).powf(s - 1.0)
    };
    let mut pow = 1.0;
    let mut fact = 1.0;
    for n in 1..40 {
        pow *= mu;
        fact *= n as f64;
        if integer && n as f64 == si - 1.0 {
            continue;
        }
        let term = zeta_real(s - n as f64) * pow / fact;
        gap += term;
        if term.abs() < 1e-20 && n > 3 {
            break;
        }
    }
    gap
}

fn check_polylog(s: f64, z: f64) -> Result<()> {
    if !(s > 1.0) {
        return domain(format!("polylog requires s > 1, got {s}"));
    }
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("polylog requires z in [0, 1], got {z}"));
    }
    Ok(())
}

/// Polylogarithm Li_s(z) = Σ z^k / k^s for s > 1 and z in [0, 1].
///
/// Below [`POLYLOG_SWITCH`] the series is summed directly; above it the
/// expansion Li_s(z) = ζ(s) + Γ(1−s)(ln 1/z)^{s−1} + Σ ζ(s−n)(ln z)^n/n!
/// is used, which carries the O(1 − z) correction.
pub fn polylog(s: f64, z: f64) -> Result<f64> {
    check_polylog(s, z)?;
    if z < POLYLOG_SWITCH {
        Ok(polylog_series(s, z))
    } else {
        Ok(riemann_zeta(s)? + polylog_near_one_gap(s, z))
    }
}

/// Li_s(z) − ζ(s), evaluated without cancellation near z = 1.
pub fn polylog_minus_zeta(s: f64, z: f64) -> Result<f64> {
    check_polylog(s, z)?;
    if z < POLYLOG_SWITCH {
        Ok(polylog_series(s, z) - riemann_zeta(s)?)
    } else {
        Ok(polylog_near_one_gap(s, z))
    }
}

/// Li_s(e^μ) − ζ(s) for μ ≤ 0, taking the logarithm directly so that
/// arguments within rounding distance of 1 keep full relative precision.
pub fn polylog_minus_zeta_log(s: f64, mu: f64) -> Result<f64> {
    if !(mu <= 0.0) {
        return domain(format!("polylog needs ln z <= 0, got {mu}"));
    }
    let z = mu.exp();
    check_polylog(s, z)?;
    if z < POLYLOG_SWITCH {
        Ok(polylog_series(s, z) - riemann_zeta(s)?)
    } else {
        Ok(polylog_gap_mu(s, mu))
    }
}

/// Direct series, exposed so the branch switch can be cross-checked.
pub fn polylog_direct(s: f64, z: f64) -> Result<f64> {
    check_polylog(s, z)?;
    Ok(polylog_series(s, z))
}

/// Lower regularized series γ(a, x) for a > 0.
fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..1000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (a * x.ln() - x).exp()
}

/// Γ(a, x) by the Legendre continued fraction (modified Lentz). Valid for
/// every real `a` when x > 0; converges quickly for x above about a + 1.
fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..5000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x).exp() * h
}

/// E_1(x) = Γ(0, x).
fn exp_integral_e1(x: f64) -> f64 {
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let t = term / k as f64;
            sum += t;
            if t.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        upper_gamma_cf(0.0, x)
    }
}

fn upper_gamma_nonneg(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        exp_integral_e1(x)
    } else if x < a + 1.0 {
        gamma(a) - lower_gamma_series(a, x)
    } else {
        upper_gamma_cf(a, x)
    }
}

/// Upper incomplete gamma Γ(a, x) = ∫_x^∞ t^{a−1} e^{−t} dt for x > 0 and any
/// real `a`. Negative orders at small x come from
/// Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a, started at a + ⌈|a|⌉.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("upper_incomplete_gamma requires x > 0, got {x}"));
    }
    if !a.is_finite() {
        return domain("upper_incomplete_gamma requires finite a");
    }
    if a >= 0.0 {
        return Ok(upper_gamma_nonneg(a, x));
    }
    if x >= 1.0 {
        return Ok(upper_gamma_cf(a, x));
    }
    let steps = (-a).ceil() as i32;
    let mut b = a + steps as f64;
    let mut value = upper_gamma_nonneg(b, x);
    let lx = x.ln();
    for _ in 0..steps {
        b -= 1.0;
        value = (value - (b * lx - x).exp()) / b;
    }
    Ok(value)
}

/// Complementary error function, via erfc(x) = Γ(1/2, x²)/√π.
pub fn erfc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let v = if x.abs() < 1e-150 {
        1.0
    } else {
        upper_gamma_nonneg(0.5, x * x) / PI.sqrt()
    };
    if x > 0.0 {
        v
    } else {
        2.0 - v
    }
}

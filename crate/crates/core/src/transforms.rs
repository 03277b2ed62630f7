//! Transform-side checks on centered sums: composed Laplace–Stieltjes
//! transforms, the uniform error-term condition, a Tauberian sanity anchor
//! and the uniform slow-variation property of a family.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::models::{ModelKind, SumModel};
use crate::predict::{leading_tail, LeadingTail};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::specfun::gamma;

/// F̂_t(s) − 1 for the centered sum, composed from closed forms.
pub fn lst_centered_sum_gap(model: &SumModel, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("transform argument must be >= 0, got {s}"));
    }
    let centered = model.is_centered();
    match model.kind() {
        ModelKind::Iid { law, n } => {
            let a = law.lst_gap(s, centered)?;
            Ok((*n as f64 * a.ln_1p()).exp_m1())
        }
        ModelKind::Weighted { law, .. } => {
            let w = model.weights().expect("weighted model has weights");
            let mut log = 0.0;
            for &wj in w {
                log += law.lst_gap(wj * s, centered)?.ln_1p();
            }
            Ok(log.exp_m1())
        }
        ModelKind::Stopped { counting, law, t, .. } => {
            let a = law.lst_gap(s, centered)?;
            counting.pgf_gap(*t, a)
        }
    }
}

/// F̂_t(s) = E[e^{−s(S−b)}].
pub fn lst_centered_sum(model: &SumModel, s: f64) -> Result<f64> {
    // Away from s = 0 the value itself is the accurate quantity.
    match model.kind() {
        ModelKind::Iid { law, n } if s > 0.0 => {
            let a = law.lst_gap(s, model.is_centered())?;
            Ok((*n as f64 * a.ln_1p()).exp())
        }
        ModelKind::Stopped { counting, law, t, .. } if s > 0.0 => {
            let a = law.lst_gap(s, model.is_centered())?;
            if a <= 0.0 {
                counting.pgf(*t, 1.0 + a)
            } else {
                Ok(1.0 + counting.pgf_gap(*t, a)?)
            }
        }
        _ => Ok(1.0 + lst_centered_sum_gap(model, s)?),
    }
}

/// How s_t is chosen along the t-grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SRule {
    /// s_t = coef · t^{−exponent}.
    Power { coef: f64, exponent: f64 },
    /// L_t(1/s_t) s_t^{β_eff} = target · (t/t_0)^{−decay}, t_0 the first grid point.
    LdTarget { target: f64, decay: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformGrid {
    pub t_values: Vec<f64>,
    pub s_rule: SRule,
    pub lambda_values: Vec<f64>,
    pub s_subgrid_size: usize,
}

/// 40 points per decade over three decades.
pub const DEFAULT_SUBGRID: usize = 121;

impl TransformGrid {
    pub fn new(t_values: Vec<f64>, s_rule: SRule) -> Result<Self> {
        if t_values.is_empty() || t_values.windows(2).any(|p| !(p[0] < p[1])) || !(t_values[0] > 0.0) {
            return domain("t_values must be positive and strictly increasing");
        }
        Ok(TransformGrid { t_values, s_rule, lambda_values: vec![1.0], s_subgrid_size: DEFAULT_SUBGRID })
    }

    fn s_at(&self, t: f64, lead: Option<&LeadingTail>) -> Result<f64> {
        match self.s_rule {
            SRule::Power { coef, exponent } => Ok(coef * t.powf(-exponent)),
            SRule::LdTarget { target, decay } => {
                let lead = match lead {
                    Some(l) if l.beta_eff > 0.0 => l,
                    _ => return domain("LdTarget rule needs a positive effective index"),
                };
                let goal = target * (t / self.t_values[0]).powf(-decay);
                // fixed point through the slowly varying factor
                let mut s = (goal / lead.l_t(f64::MAX.sqrt())).powf(1.0 / lead.beta_eff);
                for _ in 0..50 {
                    s = (goal / lead.l_t(1.0 / s)).powf(1.0 / lead.beta_eff);
                }
                Ok(s)
            }
        }
    }

    fn subgrid(&self, top: f64) -> Vec<f64> {
        let k = self.s_subgrid_size.max(2);
        (0..k).map(|i| top * 10f64.powf(-3.0 * (k - 1 - i) as f64 / (k - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformCheckReport {
    pub t_values: Vec<f64>,
    pub suprema: Vec<f64>,
    pub passed: bool,
    pub tolerance: f64,
}

impl UniformCheckReport {
    fn from_decay(t_values: Vec<f64>, suprema: Vec<f64>, tolerance: f64) -> Self {
        let last = suprema.last().copied().unwrap_or(f64::NAN);
        let tail = &suprema[suprema.len().saturating_sub(3)..];
        let decreasing = tail.windows(2).all(|p| p[1] < p[0]);
        let passed = last < tolerance && decreasing;
        UniformCheckReport { t_values, suprema, passed, tolerance }
    }

    /// Rows of `t,sup,passed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,sup,passed\n");
        for (t, s) in self.t_values.iter().zip(&self.suprema) {
            out.push_str(&format!("{t},{s:e},{}\n", self.passed));
        }
        out
    }
}

/// Threshold on the error-term supremum at the largest t.
pub const ERROR_TERM_TOLERANCE: f64 = 0.05;

/// For each t, sup over s in [λs_t/1000, λs_t] of
/// |(1 − F̂_t(s)) / (Γ(1−β_eff) L_t(1/s) s^{β_eff}) − 1|.
pub fn error_term_sup<F>(family: F, grid: &TransformGrid, lambda: f64) -> Result<UniformCheckReport>
where
    F: Fn(f64) -> Result<SumModel> + Sync,
{
    if !(lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let per_t: Vec<(f64, f64)> = grid
        .t_values
        .par_iter()
        .map(|&t| -> Result<(f64, f64)> {
            let model = family(t)?;
            let lead = leading_tail(&model, t)?;
            let s_t = grid.s_at(t, Some(&lead))?;
            let mut sup: f64 = 0.0;
            for s in grid.subgrid(lambda * s_t) {
                let gap = lst_centered_sum_gap(&model, s)?;
                let e = (-gap / lead.eval(s) - 1.0).abs();
                sup = sup.max(if e.is_nan() { f64::INFINITY } else { e });
            }
            Ok((s_t, sup))
        })
        .collect::<Result<_>>()?;
    if per_t.windows(2).any(|p| !(p[1].0 < p[0].0)) {
        return domain("s_rule must be strictly decreasing along t");
    }
    let suprema = per_t.into_iter().map(|p| p.1).collect();
    Ok(UniformCheckReport::from_decay(grid.t_values.clone(), suprema, ERROR_TERM_TOLERANCE))
}

/// Checks Ĝ_t(s) = c_t Γ(α+1) s^{−α} for G_t(x) = c_t x^α (c_t = t) by
/// quadrature of s∫e^{−sx}G_t(x)dx. For α = 0 the integrated function
/// J_t(x) = c_t x is used and compared with Ĝ_t(s)/s.
pub fn tauberian_identity_check(alpha: f64, grid: &TransformGrid) -> Result<UniformCheckReport> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be >= 0, got {alpha}"));
    }
    let tol = Tolerance { abs: 0.0, rel: 1e-13, max_intervals: 4000 };
    let power = if alpha == 0.0 { 1.0 } else { alpha };
    let tolerance = if alpha == 0.0 { 1e-6 } else { 1e-8 };
    let suprema: Vec<f64> = grid
        .t_values
        .par_iter()
        .map(|&t| -> Result<f64> {
            let lead = LeadingTail {
                beta_eff: power,
                weight: t,
                sv_power: 0.0,
                law: crate::laws::IncrementLaw::Exponential { rate: 1.0 },
            };
            let s_t = grid.s_at(t, Some(&lead))?;
            let mut sup: f64 = 0.0;
            for &lambda in &grid.lambda_values {
                for s in grid.subgrid(lambda * s_t) {
                    let g = |x: f64| (-s * x).exp() * t * x.powf(power);
                    let near = integrate(g, 0.0, 1.0 / s, tol).value;
                    let far = integrate_to_infinity(g, 1.0 / s, 1.0 / s, tol).value;
                    let transform = s * (near + far);
                    let exact = if alpha == 0.0 { t / s } else { t * gamma(alpha + 1.0) * s.powf(-alpha) };
                    sup = sup.max((transform / exact - 1.0).abs());
                }
            }
            Ok(sup)
        })
        .collect::<Result<_>>()?;
    let passed = suprema.iter().all(|&e| e < tolerance);
    Ok(UniformCheckReport { t_values: grid.t_values.clone(), suprema, passed, tolerance })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvipOutcome {
    /// Smallest grid witnesses.
    Pass { x_bar: f64, t_bar: f64 },
    /// Largest deviation seen at the top of the x-grid.
    Fail { worst: f64 },
}

/// Finds the smallest grid (x̄, t̄) such that |L_t(Λx)/L_t(x) − 1| < η for
/// every grid x ≥ x̄ and grid t ≥ t̄. Nothing beyond the grids is certified.
pub fn svip_check<F>(family: F, big_lambda: f64, eta: f64, x_grid: &[f64], t_grid: &[f64]) -> Result<SvipOutcome>
where
    F: Fn(f64, f64) -> f64,
{
    if !(big_lambda > 0.0) || !(eta > 0.0) {
        return domain("svip check needs Lambda > 0 and eta > 0");
    }
    if x_grid.is_empty() || t_grid.is_empty() {
        return domain("svip check needs nonempty grids");
    }
    let mut xs = x_grid.to_vec();
    let mut ts = t_grid.to_vec();
    xs.sort_by(f64::total_cmp);
    ts.sort_by(f64::total_cmp);
    let nx = xs.len();
    // first x index from which every larger x passes, per t
    let mut worst: f64 = 0.0;
    let xmin: Vec<usize> = ts
        .iter()
        .map(|&t| {
            let mut start = nx;
            for i in (0..nx).rev() {
                let dev = (family(t, big_lambda * xs[i]) / family(t, xs[i]) - 1.0).abs();
                if i == nx - 1 {
                    worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
                }
                if dev < eta {
                    start = i;
                } else {
                    break;
                }
            }
            start
        })
        .collect();
    let mut need = nx;
    let mut best: Option<(usize, usize)> = None;
    for j in (0..ts.len()).rev() {
        need = if j == ts.len() - 1 { xmin[j] } else { need.max(xmin[j]) };
        if need < nx && best.is_none_or(|(bi, _)| need <= bi) {
            best = Some((need, j));
        }
    }
    Ok(match best {
        Some((i, j)) => SvipOutcome::Pass { x_bar: xs[i], t_bar: ts[j] },
        None => SvipOutcome::Fail { worst },
    })
}

//! Closed-form asymptotic predictors for P[S − b > x].

use crate::counting::{CountingSpec, MeanCount};
use crate::error::{domain, unsupported, Result};
use crate::kernels::{ldp_norming, MemoryKernel};
use crate::laws::IncrementLaw;
use crate::models::{ModelKind, SumModel};
use crate::specfun::{gamma, riemann_zeta};

/// Largest ld_condition at which a comparison counts as in-regime.
pub const REGIME_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub formula_id: &'static str,
    pub ld_condition: f64,
    pub validity_note: String,
    /// Multiplier C(γ,β) folded into `value` (1 where none applies).
    pub constant: f64,
}

impl Prediction {
    pub fn in_regime(&self) -> bool {
        self.ld_condition <= REGIME_LIMIT
    }

    /// The prediction with the big-jump constant divided out.
    pub fn without_constant(&self) -> f64 {
        self.value / self.constant
    }
}

/// C(γ,β) = Γ(1−γ) Γ(1−β)^γ / Γ(1−γβ).
pub fn big_jump_constant(gamma_: f64, beta: f64) -> Result<f64> {
    if !(gamma_ > 0.0 && gamma_ < 1.0) || !(beta > 0.0 && beta < 1.0) {
        return domain(format!("C(gamma, beta) needs both in (0,1), got ({gamma_}, {beta})"));
    }
    Ok(gamma(1.0 - gamma_) * gamma(1.0 - beta).powf(gamma_) / gamma(1.0 - gamma_ * beta))
}

fn note_regime(ld: f64) -> String {
    if ld <= REGIME_LIMIT {
        format!("in regime (ld_condition {ld:.3e})")
    } else {
        format!("out of regime: ld_condition {ld:.3e} exceeds {REGIME_LIMIT}")
    }
}

/// n F̄(x).
pub fn predict_iid(n: u64, law: &IncrementLaw, x: f64) -> Prediction {
    let value = n as f64 * law.tail(x);
    Prediction {
        value,
        formula_id: "iid",
        ld_condition: value,
        validity_note: note_regime(value),
        constant: 1.0,
    }
}

/// L_n F̄(x).
pub fn predict_kernel(kernel: &MemoryKernel, n: usize, law: &IncrementLaw, x: f64) -> Result<Prediction> {
    let beta = law.beta().ok_or_else(|| crate::Error::Domain("kernel predictor needs a heavy-tailed law".into()))?;
    let l_n = ldp_norming(kernel, n, beta)?.l_n;
    let value = l_n * law.tail(x);
    Ok(Prediction {
        value,
        formula_id: "kernel",
        ld_condition: value,
        validity_note: note_regime(value),
        constant: 1.0,
    })
}

fn route_name(spec: &CountingSpec) -> &'static str {
    match spec {
        CountingSpec::Poisson { .. } => "poisson",
        CountingSpec::Geometric { .. } => "geometric",
        CountingSpec::Renewal { .. } => "renewal",
        CountingSpec::CompoundRenewal { .. } => "compound_renewal",
        CountingSpec::FirstPassage { .. } => "first_passage",
        CountingSpec::TwoPoint { .. } => "two_point",
        CountingSpec::Deterministic { .. } => "deterministic",
    }
}

/// E[N(t)] F̄(x).
pub fn predict_stopped_finite_mean(spec: &CountingSpec, t: f64, law: &IncrementLaw, x: f64) -> Result<Prediction> {
    let mean = spec.mean_count(t);
    let m = match mean {
        MeanCount::Infinite => return unsupported("counting mean is infinite; use the infinite-mean predictor"),
        MeanCount::Exact(m) | MeanCount::Approximate(m) => m,
    };
    let value = m * law.tail(x);
    let mut note = format!("{}: E[N(t)] P[X > x]", route_name(spec));
    if mean.is_approximate() {
        note.push_str(", E[N(t)] from renewal asymptotics");
    }
    note.push_str("; ");
    note.push_str(&note_regime(value));
    Ok(Prediction { value, formula_id: "stopped_finite_mean", ld_condition: value, validity_note: note, constant: 1.0 })
}

/// C(γ,β) P[N(t) > 1/F̄(x)] for β < 1, and P[E[X] N(t) > x] for β > 1,
/// with the count tail in its leading-order form.
pub fn predict_stopped_infinite_mean(spec: &CountingSpec, t: f64, law: &IncrementLaw, x: f64) -> Result<Prediction> {
    let (g, _) = spec.tail_count_params(t)?;
    let beta = law.beta().ok_or_else(|| crate::Error::Unsupported("law is not regularly varying".into()))?;
    if beta < 1.0 {
        let n = 1.0 / law.tail(x);
        let base = spec.tail_count_asymptotic(t, n)?;
        let c = big_jump_constant(g, beta)?;
        Ok(Prediction {
            value: c * base,
            formula_id: "stopped_infinite_mean",
            ld_condition: base,
            validity_note: format!("{}: C(γ,β) P[N(t) > 1/F̄(x)]; {}", route_name(spec), note_regime(base)),
            constant: c,
        })
    } else {
        let mu = law.mean().expect("beta > 1 has a finite mean");
        let value = spec.tail_count_asymptotic(t, x / mu)?;
        Ok(Prediction {
            value,
            formula_id: "stopped_infinite_mean_lln",
            ld_condition: value,
            validity_note: format!("{}: law of large numbers P[E[X] N(t) > x]; {}", route_name(spec), note_regime(value)),
            constant: 1.0,
        })
    }
}

/// Compound renewal with Poisson(ρ) base and Zeta(γ) batches:
/// β < 1: ρt |Γ(−γ)| Γ(1−β)^γ / (ζ(1+γ) Γ(1−γβ)) · F̄(x)^γ;
/// β > 1: ρt E[X]^γ / (γ ζ(1+γ)) · x^{−γ}.
pub fn predict_compound_renewal_example(
    rho: f64,
    gamma_: f64,
    law: &IncrementLaw,
    t: f64,
    x: f64,
) -> Result<Prediction> {
    if !(gamma_ > 0.0 && gamma_ < 1.0) {
        return domain(format!("batch gamma must lie in (0,1), got {gamma_}"));
    }
    let beta = law.beta().ok_or_else(|| crate::Error::Domain("law must be Pareto-type".into()))?;
    let zeta = riemann_zeta(1.0 + gamma_)?;
    let rt = rho * t;
    if beta < 1.0 {
        let mult = gamma(-gamma_).abs() * gamma(1.0 - beta).powf(gamma_) / (zeta * gamma(1.0 - gamma_ * beta));
        let tail = law.tail(x);
        let value = rt * mult * tail.powf(gamma_);
        // P[N > 1/F̄(x)] to leading order
        let ld = rt * gamma(-gamma_).abs() / zeta * tail.powf(gamma_) / gamma(1.0 - gamma_);
        Ok(Prediction {
            value,
            formula_id: "compound_renewal_beta_lt_1",
            ld_condition: ld,
            validity_note: note_regime(ld),
            constant: big_jump_constant(gamma_, beta)?,
        })
    } else {
        let mu = law.mean().expect("beta > 1 has a finite mean");
        let value = rt * mu.powf(gamma_) / (gamma_ * zeta) * x.powf(-gamma_);
        Ok(Prediction {
            value,
            formula_id: "compound_renewal_beta_gt_1",
            ld_condition: value,
            validity_note: note_regime(value),
            constant: 1.0,
        })
    }
}

/// The multiplier of (ρt) (c x^{−β})^γ, or of ρt x^{−γ}, in the example above.
pub fn compound_renewal_multiplier(gamma_: f64, law: &IncrementLaw) -> Result<f64> {
    let p = predict_compound_renewal_example(1.0, gamma_, law, 1.0, 1.0e300_f64.sqrt())?;
    let beta = law.beta().unwrap_or(0.0);
    let x = 1.0e150_f64;
    Ok(if beta < 1.0 {
        p.value / (law.tail_constant()? * x.powf(-beta)).powf(gamma_)
    } else {
        p.value / x.powf(-gamma_)
    })
}

/// Dispatches to the predictor matching the model.
pub fn predict_model(model: &SumModel, x: f64) -> Result<Prediction> {
    if model.law().beta().is_none() {
        return unsupported("tail predictors need a regularly varying law");
    }
    match model.kind() {
        ModelKind::Iid { law, n } => Ok(predict_iid(*n, law, x)),
        ModelKind::Weighted { law, kernel, n } => predict_kernel(kernel, *n, law, x),
        ModelKind::Stopped { counting, law, t, .. } => {
            if counting.has_infinite_mean(*t) {
                predict_stopped_infinite_mean(counting, *t, law, x)
            } else {
                predict_stopped_finite_mean(counting, *t, law, x)
            }
        }
    }
}

/// Leading small-s form of 1 − F̂_t(s) ≈ Γ(1−β_eff) L_t(1/s) s^{β_eff},
/// with L_t(y) = weight · ℓ(y)^{sv_power}.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingTail {
    pub beta_eff: f64,
    pub weight: f64,
    pub sv_power: f64,
    pub law: IncrementLaw,
}

impl LeadingTail {
    /// L_t(y) at y = 1/s.
    pub fn l_t(&self, y: f64) -> f64 {
        let sv = match self.law {
            IncrementLaw::ParetoLog { scale, log_exponent, .. } => {
                self.law.tail_constant().unwrap_or(f64::NAN) * (y / scale).ln().powf(log_exponent)
            }
            _ => self.law.tail_constant().unwrap_or(f64::NAN),
        };
        self.weight * sv.powf(self.sv_power)
    }

    /// Γ(1−β_eff) L_t(1/s) s^{β_eff}.
    pub fn eval(&self, s: f64) -> f64 {
        gamma(1.0 - self.beta_eff) * self.l_t(1.0 / s) * s.powf(self.beta_eff)
    }
}

pub fn leading_tail(model: &SumModel, _t_hint: f64) -> Result<LeadingTail> {
    let law = *model.law();
    let beta = law.beta().ok_or_else(|| crate::Error::Unsupported("law is not regularly varying".into()))?;
    let simple = |weight: f64| LeadingTail { beta_eff: beta, weight, sv_power: 1.0, law };
    match model.kind() {
        ModelKind::Iid { n, .. } => Ok(simple(*n as f64)),
        ModelKind::Weighted { .. } => Ok(simple(model.norming().expect("weighted model has L_n"))),
        ModelKind::Stopped { counting, t, .. } => match counting.mean_count(*t) {
            MeanCount::Exact(m) | MeanCount::Approximate(m) => Ok(simple(m)),
            MeanCount::Infinite => {
                if beta > 1.0 {
                    return unsupported("transform checks for infinite-mean counts need beta < 1");
                }
                let (g, c_t) = counting.tail_count_params(*t)?;
                Ok(LeadingTail {
                    beta_eff: g * beta,
                    weight: c_t * gamma(1.0 - beta).powf(g) / gamma(1.0 - g * beta),
                    sv_power: g,
                    law,
                })
            }
        },
    }
}

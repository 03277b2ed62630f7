//! Scenario files: one `key = value` per line, `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use ldp_core::counting::{CostRule, CountingSpec, Growth};
use ldp_core::kernels::MemoryKernel;
use ldp_core::laws::{BatchLaw, IncrementLaw};
use ldp_core::models::SumModel;

use crate::literal::{parse_literal, Literal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (0, true) => write!(f, "{}", self.message),
            (0, false) => write!(f, "key `{}`: {}", self.key, self.message),
            (l, true) => write!(f, "line {l}: {}", self.message),
            (l, false) => write!(f, "line {l}, key `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    Iid,
    Weighted(MemoryKernel),
    Stopped { counting: CountingSpec, force_uncentered: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XRule {
    /// x solving ld_condition(x) = target.
    Ld(f64),
    Fixed(f64),
    /// x with 1/F̄(x) = v.
    InverseTail(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    McVsPrediction,
    ErrorTerm,
    Svip,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Naive,
    BigJumpIs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorChoice {
    Auto,
    CompoundRenewalExample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub law: IncrementLaw,
    pub model: ModelChoice,
    /// n values (i.i.d. and weighted) or t values (stopped).
    pub grid: Vec<f64>,
    pub x_rule: XRule,
    pub budget: u64,
    pub seed: u64,
    pub cap: u64,
    pub output: Option<PathBuf>,
    pub checks: Vec<Check>,
    pub estimator: Estimator,
    pub mix_p: f64,
    pub tolerance: f64,
    pub predictor: PredictorChoice,
    pub s_target: f64,
    pub s_decay: f64,
    pub lambda: f64,
    pub svip_lambda: f64,
    pub svip_eta: f64,
    /// `key = value` pairs filled in from defaults.
    pub defaults_applied: Vec<(String, String)>,
}

impl Scenario {
    pub fn model_at(&self, index: f64) -> ldp_core::Result<SumModel> {
        match &self.model {
            ModelChoice::Iid => SumModel::iid(self.law, index.round() as u64),
            ModelChoice::Weighted(k) => SumModel::weighted(self.law, k.clone(), index.round() as usize),
            ModelChoice::Stopped { counting, force_uncentered } => {
                SumModel::stopped(counting.clone(), self.law, index, *force_uncentered)
            }
        }
    }

    pub fn is_stopped(&self) -> bool {
        matches!(self.model, ModelChoice::Stopped { .. })
    }
}

const KEYS: &[&str] = &[
    "name", "model", "law", "beta", "scale", "log_exponent", "alpha", "rate", "kernel", "counting",
    "force_uncentered", "n_grid", "t_grid", "x_rule", "budget", "seed", "cap", "output", "checks",
    "estimator", "mix_p", "tolerance", "predictor", "s_target", "s_decay", "lambda", "svip_lambda", "svip_eta",
];

struct Entry {
    line: usize,
    raw: String,
    value: Literal,
}

struct Fields {
    map: BTreeMap<String, Entry>,
    defaults: Vec<(String, String)>,
}

type Res<T> = Result<T, ConfigError>;

impl Fields {
    fn err<T>(&self, key: &str, message: impl Into<String>) -> Res<T> {
        let line = self.map.get(key).map_or(0, |e| e.line);
        Err(ConfigError { line, key: key.into(), message: message.into() })
    }

    /// Rewrites `law = pareto(beta=0.5, scale=1)` (or positional
    /// `pareto(0.5, 1)`) into the separate parameter keys.
    fn spread_law_call(&mut self) -> Res<()> {
        let entry = self.map.remove("law").expect("caller checked");
        let (name, args) = match &entry.value {
            Literal::Call(n, a) => (n.clone(), a.clone()),
            _ => unreachable!(),
        };
        let line = entry.line;
        let fail = |message: String| Err(ConfigError { line, key: "law".into(), message });
        let order: &[&str] = match name.as_str() {
            "pareto" => &["beta", "scale"],
            "pareto_log" => &["beta", "scale", "log_exponent"],
            "stable" => &["alpha"],
            "exponential" => &["rate"],
            other => return fail(format!("unknown law `{other}` (pareto, pareto_log, stable, exponential)")),
        };
        if args.len() > order.len() {
            return fail(format!("{name} takes at most {} arguments", order.len()));
        }
        for (i, a) in args.into_iter().enumerate() {
            let (key, v) = match a {
                Literal::Named(k, v) => (k, *v),
                v => (order[i].to_string(), v),
            };
            if !order.contains(&key.as_str()) {
                return fail(format!("`{key}` is not a parameter of {name}"));
            }
            if self.map.contains_key(&key) {
                return fail(format!("`{key}` given both here and as a separate key"));
            }
            self.map.insert(key, Entry { line, raw: v.to_string(), value: v });
        }
        self.map.insert("law".into(), Entry { line, raw: name.clone(), value: Literal::Word(name) });
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Literal> {
        self.map.get(key).map(|e| &e.value)
    }

    fn num_or(&mut self, key: &str, default: f64) -> Res<f64> {
        match self.get(key) {
            Some(Literal::Num(v)) => Ok(*v),
            Some(other) => self.err(key, format!("expected a number, got `{other}`")),
            None => {
                self.defaults.push((key.into(), default.to_string()));
                Ok(default)
            }
        }
    }

    fn num(&self, key: &str) -> Res<f64> {
        match self.get(key) {
            Some(Literal::Num(v)) => Ok(*v),
            Some(other) => self.err(key, format!("expected a number, got `{other}`")),
            None => self.err(key, "required key is missing"),
        }
    }

    fn count_or(&mut self, key: &str, default: u64) -> Res<u64> {
        // integers are read from the raw text so 64-bit seeds stay exact
        if let Some(e) = self.map.get(key) {
            if let Ok(v) = e.raw.replace('_', "").parse::<u64>() {
                return Ok(v);
            }
        }
        let v = self.num_or(key, default as f64)?;
        if !(v >= 0.0 && v.fract() == 0.0 && v < 1.8e19) {
            return self.err(key, format!("expected a non-negative integer, got {v}"));
        }
        Ok(v as u64)
    }

    fn word_or(&mut self, key: &str, default: &str) -> Res<String> {
        match self.get(key) {
            Some(Literal::Word(w)) | Some(Literal::Str(w)) => Ok(w.clone()),
            Some(other) => self.err(key, format!("expected a word, got `{other}`")),
            None => {
                self.defaults.push((key.into(), default.into()));
                Ok(default.into())
            }
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Res<bool> {
        match self.get(key) {
            Some(Literal::Bool(b)) => Ok(*b),
            Some(other) => self.err(key, format!("expected true or false, got `{other}`")),
            None => {
                self.defaults.push((key.into(), default.to_string()));
                Ok(default)
            }
        }
    }
}

fn nums(args: &[Literal], what: &str, arity: std::ops::RangeInclusive<usize>) -> Result<Vec<f64>, String> {
    if !arity.contains(&args.len()) {
        return Err(format!("{what} takes {}..{} arguments, got {}", arity.start(), arity.end(), args.len()));
    }
    args.iter()
        .map(|a| match a {
            Literal::Num(v) => Ok(*v),
            other => Err(format!("{what}: expected a number, got `{other}`")),
        })
        .collect()
}

fn core<T>(r: ldp_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn batch_law(v: &Literal) -> Result<BatchLaw, String> {
    match v {
        Literal::Call(name, args) => match name.as_str() {
            "zeta" => core(BatchLaw::zeta(nums(args, "zeta", 1..=1)?[0])),
            "shifted_poisson" => core(BatchLaw::shifted_poisson(nums(args, "shifted_poisson", 1..=1)?[0])),
            "deterministic" => {
                let k = nums(args, "deterministic", 1..=1)?[0];
                if !(k >= 0.0 && k.fract() == 0.0) {
                    return Err(format!("deterministic batch needs an integer, got {k}"));
                }
                core(BatchLaw::deterministic(k as u64))
            }
            _ => Err(format!("unknown batch law `{name}`")),
        },
        other => Err(format!("expected a batch law such as zeta(0.5), got `{other}`")),
    }
}

fn law_literal(v: &Literal) -> Result<IncrementLaw, String> {
    match v {
        Literal::Call(name, args) => match name.as_str() {
            "pareto" => {
                let a = nums(args, "pareto", 1..=2)?;
                core(IncrementLaw::pareto(a[0], a.get(1).copied().unwrap_or(1.0)))
            }
            "stable" => core(IncrementLaw::one_sided_stable(nums(args, "stable", 1..=1)?[0])),
            "exponential" => core(IncrementLaw::exponential(nums(args, "exponential", 1..=1)?[0])),
            _ => Err(format!("unknown waiting-time law `{name}`")),
        },
        other => Err(format!("expected a law such as stable(0.5), got `{other}`")),
    }
}

fn counting_literal(v: &Literal) -> Result<CountingSpec, String> {
    let (name, args) = match v {
        Literal::Call(name, args) => (name.as_str(), args.as_slice()),
        Literal::Word(w) => (w.as_str(), &[][..]),
        other => return Err(format!("expected a counting spec, got `{other}`")),
    };
    match name {
        "poisson" => core(CountingSpec::poisson(nums(args, "poisson", 1..=1)?[0])),
        "geometric" => {
            let a = nums(args, "geometric", 0..=2)?;
            let g = Growth { coef: a.first().copied().unwrap_or(1.0), exponent: a.get(1).copied().unwrap_or(1.0) };
            core(CountingSpec::geometric(g))
        }
        "renewal" => {
            if args.len() != 1 {
                return Err("renewal takes one waiting-time law".into());
            }
            core(CountingSpec::renewal(law_literal(&args[0])?))
        }
        "compound" => {
            if args.len() != 2 {
                return Err("compound takes a base count and a batch law".into());
            }
            core(CountingSpec::compound(counting_literal(&args[0])?, batch_law(&args[1])?))
        }
        "first_passage" => {
            let cost = match args {
                [Literal::Word(w)] if w == "shifted_poisson" => CostRule::ShiftedPoisson,
                [b] => CostRule::Fixed(batch_law(b)?),
                _ => return Err("first_passage takes one cost law".into()),
            };
            Ok(CountingSpec::FirstPassage { cost })
        }
        "two_point" => {
            let a = nums(args, "two_point", 1..=3)?;
            let g = Growth { coef: a.get(1).copied().unwrap_or(1.0), exponent: a.get(2).copied().unwrap_or(1.0) };
            core(CountingSpec::two_point(g, a[0]))
        }
        "deterministic" => {
            let k = nums(args, "deterministic", 1..=1)?[0];
            if !(k >= 0.0 && k.fract() == 0.0) {
                return Err(format!("deterministic count needs an integer, got {k}"));
            }
            Ok(CountingSpec::Deterministic { n: k as u64 })
        }
        _ => Err(format!("unknown counting spec `{name}`")),
    }
}

fn kernel_literal(v: &Literal) -> Result<MemoryKernel, String> {
    match v {
        Literal::Call(name, args) => match name.as_str() {
            "exponential" => core(MemoryKernel::exponential(nums(args, "exponential", 1..=1)?[0])),
            "algebraic" => core(MemoryKernel::algebraic(nums(args, "algebraic", 1..=1)?[0])),
            "custom" => match args.as_slice() {
                [Literal::List(items)] => core(MemoryKernel::custom(nums(items, "custom", 1..=usize::MAX)?)),
                _ => Err("custom takes one list of values".into()),
            },
            _ => Err(format!("unknown kernel `{name}`")),
        },
        other => Err(format!("expected a kernel such as exponential(0.5), got `{other}`")),
    }
}

fn check_beta(beta: f64) -> Result<(), String> {
    if !(beta > 0.0 && beta < 2.0) || beta == 1.0 {
        return Err(format!("β must lie in (0,2) without 1, got {beta}"));
    }
    Ok(())
}

/// A standalone counting literal such as `compound(poisson(1), zeta(0.5))`.
pub fn parse_counting(text: &str) -> Result<CountingSpec, String> {
    counting_literal(&parse_literal(text)?)
}

/// A standalone law literal such as `pareto(beta=0.5, scale=1)`, checked
/// by the same rules as the `law` key.
pub fn parse_law(text: &str) -> Result<IncrementLaw, String> {
    let doc = format!("model = iid\nn_grid = [1]\nlaw = {text}\n");
    parse_scenario(&doc).map(|s| s.law).map_err(|e| e.message)
}

/// Parses a complete scenario document.
pub fn parse_scenario(text: &str) -> Res<Scenario> {
    let mut map = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, raw) = content.split_once('=').ok_or_else(|| ConfigError {
            line,
            key: String::new(),
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim().to_string();
        let raw = raw.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError { line, key, message: "unknown key".into() });
        }
        if let Some(prev) = map.get(&key) {
            let prev: &Entry = prev;
            return Err(ConfigError { line, key, message: format!("duplicate key (first set on line {})", prev.line) });
        }
        let value = parse_literal(&raw).map_err(|m| ConfigError { line, key: key.clone(), message: m })?;
        map.insert(key, Entry { line, raw, value });
    }
    let mut f = Fields { map, defaults: Vec::new() };

    let name = f.word_or("name", "unnamed")?;

    if let Some(Literal::Call(_, _)) = f.get("law") {
        f.spread_law_call()?;
    }
    let law_name = f.word_or("law", "pareto")?;
    let law = match law_name.as_str() {
        "pareto" | "pareto_log" => {
            let beta = f.num("beta")?;
            if let Err(m) = check_beta(beta) {
                return f.err("beta", m);
            }
            let scale = f.num_or("scale", 1.0)?;
            let r = if law_name == "pareto" {
                IncrementLaw::pareto(beta, scale)
            } else {
                let kappa = f.num("log_exponent")?;
                IncrementLaw::pareto_log(beta, scale, kappa)
            };
            match r {
                Ok(l) => l,
                Err(e) => return f.err("scale", e.to_string()),
            }
        }
        "stable" => match IncrementLaw::one_sided_stable(f.num("alpha")?) {
            Ok(l) => l,
            Err(e) => return f.err("alpha", e.to_string()),
        },
        "exponential" => match IncrementLaw::exponential(f.num_or("rate", 1.0)?) {
            Ok(l) => l,
            Err(e) => return f.err("rate", e.to_string()),
        },
        other => return f.err("law", format!("unknown law `{other}` (pareto, pareto_log, stable, exponential)")),
    };
    for (key, used) in [
        ("beta", matches!(law, IncrementLaw::Pareto { .. } | IncrementLaw::ParetoLog { .. })),
        ("scale", matches!(law, IncrementLaw::Pareto { .. } | IncrementLaw::ParetoLog { .. })),
        ("log_exponent", matches!(law, IncrementLaw::ParetoLog { .. })),
        ("alpha", matches!(law, IncrementLaw::OneSidedStable { .. })),
        ("rate", matches!(law, IncrementLaw::Exponential { .. })),
    ] {
        if !used && f.get(key).is_some() {
            return f.err(key, format!("not a parameter of law `{law_name}`"));
        }
    }

    let model_name = match f.get("model") {
        Some(Literal::Word(w)) => w.clone(),
        Some(other) => return f.err("model", format!("expected iid, weighted or stopped, got `{other}`")),
        None => return f.err("model", "required key is missing"),
    };
    let model = match model_name.as_str() {
        "iid" => ModelChoice::Iid,
        "weighted" => match f.get("kernel") {
            Some(v) => match kernel_literal(v) {
                Ok(k) => ModelChoice::Weighted(k),
                Err(m) => return f.err("kernel", m),
            },
            None => return f.err("kernel", "weighted models need a kernel"),
        },
        "stopped" => {
            let counting = match f.get("counting") {
                Some(v) => match counting_literal(v) {
                    Ok(c) => c,
                    Err(m) => return f.err("counting", m),
                },
                None => return f.err("counting", "stopped models need a counting spec"),
            };
            let force_uncentered = f.bool_or("force_uncentered", false)?;
            ModelChoice::Stopped { counting, force_uncentered }
        }
        other => return f.err("model", format!("unknown model `{other}` (iid, weighted, stopped)")),
    };
    for (key, ok) in [
        ("kernel", matches!(model, ModelChoice::Weighted(_))),
        ("counting", matches!(model, ModelChoice::Stopped { .. })),
        ("force_uncentered", matches!(model, ModelChoice::Stopped { .. })),
    ] {
        if !ok && f.get(key).is_some() {
            return f.err(key, format!("not used by model `{model_name}`"));
        }
    }

    let (grid_key, other_key) = if matches!(model, ModelChoice::Stopped { .. }) {
        ("t_grid", "n_grid")
    } else {
        ("n_grid", "t_grid")
    };
    if f.get(other_key).is_some() {
        return f.err(other_key, format!("model `{model_name}` is indexed by `{grid_key}`"));
    }
    let grid = match f.get(grid_key) {
        Some(Literal::List(items)) => match nums(items, grid_key, 1..=usize::MAX) {
            Ok(g) => g,
            Err(m) => return f.err(grid_key, m),
        },
        Some(Literal::Num(v)) => vec![*v],
        Some(other) => return f.err(grid_key, format!("expected a list of numbers, got `{other}`")),
        None => return f.err(grid_key, "required key is missing"),
    };
    if grid.windows(2).any(|p| !(p[0] < p[1])) || !(grid[0] > 0.0) {
        return f.err(grid_key, "grid must be positive and strictly increasing");
    }
    if grid_key == "n_grid" && grid.iter().any(|n| n.fract() != 0.0) {
        return f.err(grid_key, "n values must be integers");
    }

    let x_rule = match f.get("x_rule") {
        None => {
            f.defaults.push(("x_rule".into(), "ld(0.02)".into()));
            XRule::Ld(0.02)
        }
        Some(Literal::Call(name, args)) => {
            let v = match nums(args, name, 1..=1) {
                Ok(a) => a[0],
                Err(m) => return f.err("x_rule", m),
            };
            if !(v > 0.0 && v.is_finite()) {
                return f.err("x_rule", format!("argument must be positive, got {v}"));
            }
            match name.as_str() {
                "ld" => XRule::Ld(v),
                "fixed" => XRule::Fixed(v),
                "inverse_tail" => XRule::InverseTail(v),
                _ => return f.err("x_rule", format!("unknown rule `{name}` (ld, fixed, inverse_tail)")),
            }
        }
        Some(other) => return f.err("x_rule", format!("expected ld(..), fixed(..) or inverse_tail(..), got `{other}`")),
    };

    let budget = f.count_or("budget", 1_000_000)?;
    if budget < ldp_core::montecarlo::MIN_BUDGET {
        return f.err("budget", format!("budget must be at least {}", ldp_core::montecarlo::MIN_BUDGET));
    }
    let seed = f.count_or("seed", 1)?;
    let cap = f.count_or("cap", ldp_core::counting::DEFAULT_CAP)?;
    if cap == 0 {
        return f.err("cap", "cap must be positive");
    }
    let output = match f.get("output") {
        Some(Literal::Word(w)) | Some(Literal::Str(w)) => Some(PathBuf::from(w)),
        Some(other) => return f.err("output", format!("expected a path, got `{other}`")),
        None => {
            f.defaults.push(("output".into(), "stdout".into()));
            None
        }
    };
    let checks = match f.get("checks") {
        None => {
            f.defaults.push(("checks".into(), "[mc_vs_prediction]".into()));
            vec![Check::McVsPrediction]
        }
        Some(Literal::List(items)) => {
            let mut out = Vec::new();
            for it in items {
                let c = match it {
                    Literal::Word(w) if w == "mc_vs_prediction" => Check::McVsPrediction,
                    Literal::Word(w) if w == "error_term" => Check::ErrorTerm,
                    Literal::Word(w) if w == "svip" => Check::Svip,
                    Literal::Word(w) if w == "scaling" => Check::Scaling,
                    other => return f.err("checks", format!("unknown check `{other}`")),
                };
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            if out.is_empty() {
                return f.err("checks", "at least one check is required");
            }
            out
        }
        Some(other) => return f.err("checks", format!("expected a list, got `{other}`")),
    };
    let estimator = match f.word_or("estimator", "naive")?.as_str() {
        "naive" => Estimator::Naive,
        "bigjump_is" => Estimator::BigJumpIs,
        other => return f.err("estimator", format!("unknown estimator `{other}` (naive, bigjump_is)")),
    };
    if estimator == Estimator::BigJumpIs && model != ModelChoice::Iid {
        return f.err("estimator", "importance sampling needs model = iid");
    }
    let mix_p = f.num_or("mix_p", ldp_core::montecarlo::DEFAULT_MIX)?;
    if !(mix_p > 0.0 && mix_p < 1.0) {
        return f.err("mix_p", format!("mix_p must lie in (0,1), got {mix_p}"));
    }
    let tolerance = f.num_or("tolerance", 0.2)?;
    if !(tolerance > 0.0) {
        return f.err("tolerance", "tolerance must be positive");
    }
    let predictor = match f.word_or("predictor", "auto")?.as_str() {
        "auto" => PredictorChoice::Auto,
        "compound_renewal_example" => PredictorChoice::CompoundRenewalExample,
        other => return f.err("predictor", format!("unknown predictor `{other}` (auto, compound_renewal_example)")),
    };
    let s_target = f.num_or("s_target", 0.01)?;
    let s_decay = f.num_or("s_decay", 0.5)?;
    let lambda = f.num_or("lambda", 1.0)?;
    let svip_lambda = f.num_or("svip_lambda", 2.0)?;
    let svip_eta = f.num_or("svip_eta", 0.01)?;
    for (key, v) in [("s_target", s_target), ("lambda", lambda), ("svip_lambda", svip_lambda), ("svip_eta", svip_eta)] {
        if !(v > 0.0 && v.is_finite()) {
            return f.err(key, format!("must be positive, got {v}"));
        }
    }
    if !(s_decay >= 0.0) {
        return f.err("s_decay", "must be non-negative");
    }

    Ok(Scenario {
        name,
        law,
        model,
        grid,
        x_rule,
        budget,
        seed,
        cap,
        output,
        checks,
        estimator,
        mix_p,
        tolerance,
        predictor,
        s_target,
        s_decay,
        lambda,
        svip_lambda,
        svip_eta,
        defaults_applied: f.defaults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
# minimal
model = iid
beta = 0.7
n_grid = [50]
x_rule = ld(0.02)
budget = 2e6
seed = 42
";

    #[test]
    fn minimal_iid() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.model, ModelChoice::Iid);
        assert_eq!(s.law, IncrementLaw::Pareto { beta: 0.7, scale: 1.0 });
        assert_eq!((s.budget, s.seed), (2_000_000, 42));
        assert_eq!(s.checks, vec![Check::McVsPrediction]);
        let keys: Vec<&str> = s.defaults_applied.iter().map(|d| d.0.as_str()).collect();
        assert!(keys.contains(&"name") && keys.contains(&"cap") && keys.contains(&"scale"));
        assert!(!keys.contains(&"seed"));
    }

    #[test]
    fn law_call_form() {
        let s = parse_scenario("model = iid\nlaw = pareto(beta=0.5, scale=2)\nn_grid = [10]\n").unwrap();
        assert_eq!(s.law, IncrementLaw::Pareto { beta: 0.5, scale: 2.0 });
        let s = parse_scenario("model = iid\nlaw = pareto_log(1.5, 1, 2)\nn_grid = [10]\n").unwrap();
        assert!(matches!(s.law, IncrementLaw::ParetoLog { log_exponent, .. } if log_exponent == 2.0));
        let e = parse_scenario("model = iid\nlaw = pareto(beta=1)\nn_grid = [10]\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (2, "beta"));
        let e = parse_scenario("model = iid\nbeta = 0.5\nlaw = pareto(beta=0.5)\nn_grid = [10]\n").unwrap_err();
        assert_eq!(e.key, "law");
        assert!(parse_scenario("model = iid\nlaw = pareto(rate=1)\nn_grid = [10]\n").is_err());
    }

    #[test]
    fn rejects_beta_one() {
        let e = parse_scenario(&MINIMAL.replace("beta = 0.7", "beta = 1.0")).unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (4, "beta"));
        assert!(e.to_string().contains("(0,2) without 1"), "{e}");
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        let e = parse_scenario(&format!("{MINIMAL}seed = 3\n")).unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (9, "seed"));
        assert!(e.message.contains("duplicate"));
        let e = parse_scenario(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert!(e.message.contains("unknown key"));
        let e = parse_scenario(&MINIMAL.replace("ld(0.02)", "ld(0.02")).unwrap_err();
        assert_eq!(e.key, "x_rule");
        let e = parse_scenario("model = iid\nbeta = 0.5\nn_grid = [10]\nbudget = 10\n").unwrap_err();
        assert_eq!(e.key, "budget");
        let e = parse_scenario("model = iid\nbeta = 0.5\nt_grid = [10]\n").unwrap_err();
        assert_eq!(e.key, "t_grid");
        assert!(parse_scenario("just words").unwrap_err().to_string().starts_with("line 1"));
    }

    #[test]
    fn stopped_and_weighted() {
        let s = parse_scenario(
            "name = cr\nmodel = stopped\nbeta = 1.5\ncounting = compound(poisson(1), zeta(0.5))\n\
             t_grid = [1e3]\ncap = 2^50\npredictor = compound_renewal_example\nseed = 18446744073709551615\n",
        )
        .unwrap();
        assert!(s.is_stopped());
        assert_eq!(s.cap, 1 << 50);
        assert_eq!(s.seed, u64::MAX);
        assert_eq!(s.predictor, PredictorChoice::CompoundRenewalExample);
        let m = s.model_at(1e3).unwrap();
        assert!(!m.is_centered());
        let s = parse_scenario("model = weighted\nbeta = 0.5\nkernel = custom([1, 0.5])\nn_grid = [2, 4]\nchecks = [scaling, mc_vs_prediction]\n").unwrap();
        assert_eq!(s.checks, vec![Check::Scaling, Check::McVsPrediction]);
        let fp = parse_scenario("model = stopped\nbeta = 0.5\ncounting = first_passage(shifted_poisson)\nt_grid = [10]\n").unwrap();
        assert!(matches!(fp.model, ModelChoice::Stopped { counting: CountingSpec::FirstPassage { cost: CostRule::ShiftedPoisson }, .. }));
        let e = parse_scenario("model = stopped\nbeta = 0.5\ncounting = poisson(-1)\nt_grid = [10]\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (3, "counting"));
    }
}

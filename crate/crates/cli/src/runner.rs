//! Executes the checks of a scenario and renders the CSV report.

use std::time::Instant;

use ldp_core::counting::CountingSpec;
use ldp_core::kernels::{scaling_exponent, MemoryKernel};
use ldp_core::models::SumModel;
use ldp_core::montecarlo::{estimate_tail, estimate_tail_bigjump_is, SeedSpec};
use ldp_core::predict::{leading_tail, predict_compound_renewal_example, predict_model, Prediction, REGIME_LIMIT};
use ldp_core::transforms::{error_term_sup, svip_check, SRule, SvipOutcome, TransformGrid, ERROR_TERM_TOLERANCE};
use ldp_core::Error;

use crate::scenario::{Check, Estimator, ModelChoice, PredictorChoice, Scenario, XRule};

pub const CSV_HEADER: &str =
    "scenario,index,t_or_n,x,estimate,stderr,prediction,ratio,ld_condition,method,replications,capped_fraction,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    CheckFailed,
    OutOfRegime,
    Unsupported,
    Config,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::CheckFailed => 1,
            Status::OutOfRegime => 2,
            Status::Unsupported => 3,
            Status::Config => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: String,
    pub index: usize,
    pub t_or_n: f64,
    pub x: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub prediction: f64,
    pub ratio: f64,
    pub ld_condition: f64,
    pub method: String,
    pub replications: u64,
    pub capped_fraction: f64,
    pub wall_ms: u128,
    pub passed: bool,
    /// Full predictor output for Monte Carlo rows.
    pub detail: Option<Prediction>,
}

/// Shortest round-trip form, scientific outside [1e-4, 1e15).
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Row {
    fn blank(s: &Scenario, index: usize, method: &str) -> Row {
        Row {
            scenario: s.name.clone(),
            index,
            t_or_n: f64::NAN,
            x: f64::NAN,
            estimate: f64::NAN,
            stderr: 0.0,
            prediction: f64::NAN,
            ratio: f64::NAN,
            ld_condition: f64::NAN,
            method: method.into(),
            replications: 0,
            capped_fraction: 0.0,
            wall_ms: 0,
            passed: false,
            detail: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let n = fmt_num;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.index,
            n(self.t_or_n),
            n(self.x),
            n(self.estimate),
            n(self.stderr),
            n(self.prediction),
            n(self.ratio),
            n(self.ld_condition),
            self.method,
            self.replications,
            n(self.capped_fraction),
            self.wall_ms
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub status: Status,
    pub diagnostics: Vec<String>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        out
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::OutOfRegime { .. } => Status::OutOfRegime,
        Error::Unsupported(_) | Error::WorkLimit { .. } => Status::Unsupported,
        Error::Domain(_) | Error::Range(_) => Status::Config,
    }
}

/// x for one grid point.
pub fn solve_x(model: &SumModel, rule: XRule) -> ldp_core::Result<f64> {
    match rule {
        XRule::Fixed(v) => Ok(v),
        XRule::InverseTail(v) => model.law().inverse_tail(1.0 / v),
        XRule::Ld(target) => {
            // ld_condition is non-increasing in x; bisect on ln x
            let mut lo = model.law().support_min().max(1e-3).ln();
            let mut hi: f64 = 700.0;
            if model.ld_condition(hi.exp())? > target {
                return Err(Error::Range(format!("no x below e^700 reaches ld_condition {target}")));
            }
            if model.ld_condition(lo.exp())? <= target {
                return Ok(lo.exp());
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if model.ld_condition(mid.exp())? > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(hi.exp())
        }
    }
}

fn compound_example(s: &Scenario, t: f64, x: f64) -> ldp_core::Result<Prediction> {
    let (rho, g) = match &s.model {
        ModelChoice::Stopped { counting: CountingSpec::CompoundRenewal { base, batch }, .. } => {
            match (&**base, batch.gamma()) {
                (CountingSpec::Poisson { rho }, Some(g)) => (*rho, g),
                _ => return Err(Error::Unsupported("example predictor needs a Poisson base with Zeta batches".into())),
            }
        }
        _ => return Err(Error::Unsupported("example predictor needs a compound renewal count".into())),
    };
    predict_compound_renewal_example(rho, g, &s.law, t, x)
}

fn mc_rows(s: &Scenario) -> Result<Vec<Row>, (Status, String)> {
    let fail = |e: Error| (status_of(&e), e.to_string());
    let mut plan = Vec::new();
    for &index in &s.grid {
        let model = s.model_at(index).map_err(fail)?;
        let x = solve_x(&model, s.x_rule).map_err(fail)?;
        let ld = model.ld_condition(x).map_err(fail)?;
        if !(ld <= REGIME_LIMIT) {
            return Err((
                Status::OutOfRegime,
                format!("index {index}: ld_condition {ld:.4e} exceeds {REGIME_LIMIT} at x = {x:e}"),
            ));
        }
        plan.push((index, model, x, ld));
    }
    let seeds = SeedSpec::new(s.seed);
    let mut rows = Vec::new();
    for (k, (index, model, x, ld)) in plan.into_iter().enumerate() {
        let start = Instant::now();
        let prediction = match s.predictor {
            PredictorChoice::Auto => predict_model(&model, x),
            PredictorChoice::CompoundRenewalExample => compound_example(s, index, x),
        }
        .map_err(fail)?;
        let child = seeds.child(k as u64);
        let est = match s.estimator {
            Estimator::Naive => estimate_tail(&model, x, s.budget, child, s.cap),
            Estimator::BigJumpIs => estimate_tail_bigjump_is(&model, x, s.budget, child, s.mix_p),
        }
        .map_err(fail)?;
        let ratio = est.p_hat / prediction.value;
        rows.push(Row {
            scenario: s.name.clone(),
            index: k,
            t_or_n: index,
            x,
            estimate: est.p_hat,
            stderr: est.stderr,
            prediction: prediction.value,
            ratio,
            ld_condition: ld,
            method: est.method.to_string(),
            replications: est.replications,
            capped_fraction: est.capped_fraction,
            wall_ms: start.elapsed().as_millis(),
            passed: (ratio - 1.0).abs() <= s.tolerance,
            detail: Some(prediction),
        });
    }
    Ok(rows)
}

fn error_term_rows(s: &Scenario) -> Result<Vec<Row>, (Status, String)> {
    let fail = |e: Error| (status_of(&e), e.to_string());
    let start = Instant::now();
    let grid = TransformGrid::new(s.grid.clone(), SRule::LdTarget { target: s.s_target, decay: s.s_decay })
        .map_err(fail)?;
    let report = error_term_sup(|t| s.model_at(t), &grid, s.lambda).map_err(fail)?;
    let ms = start.elapsed().as_millis();
    Ok(report
        .t_values
        .iter()
        .zip(&report.suprema)
        .enumerate()
        .map(|(k, (&t, &sup))| Row {
            t_or_n: t,
            estimate: sup,
            prediction: ERROR_TERM_TOLERANCE,
            ratio: sup / ERROR_TERM_TOLERANCE,
            ld_condition: s.s_target * (t / s.grid[0]).powf(-s.s_decay),
            wall_ms: ms,
            passed: report.passed,
            ..Row::blank(s, k, "error_term")
        })
        .collect())
}

fn svip_rows(s: &Scenario) -> Result<Vec<Row>, (Status, String)> {
    let fail = |e: Error| (status_of(&e), e.to_string());
    let start = Instant::now();
    let leads = s
        .grid
        .iter()
        .map(|&t| leading_tail(&s.model_at(t)?, t))
        .collect::<ldp_core::Result<Vec<_>>>()
        .map_err(fail)?;
    let scale = s.law.support_min().max(1.0);
    let xs: Vec<f64> = (1..=200).map(|k| scale * (k as f64).exp()).collect();
    let family = |t: f64, x: f64| {
        let k = s.grid.iter().position(|&g| g == t).expect("t from the grid");
        leads[k].l_t(x)
    };
    let outcome = svip_check(family, s.svip_lambda, s.svip_eta, &xs, &s.grid).map_err(fail)?;
    let mut row = Row { wall_ms: start.elapsed().as_millis(), prediction: s.svip_eta, ..Row::blank(s, 0, "svip") };
    match outcome {
        SvipOutcome::Pass { x_bar, t_bar } => {
            row.t_or_n = t_bar;
            row.x = x_bar;
            row.estimate = 0.0;
            row.ratio = 0.0;
            row.passed = true;
        }
        SvipOutcome::Fail { worst } => {
            row.estimate = worst;
            row.ratio = worst / s.svip_eta;
        }
    }
    Ok(vec![row])
}

fn scaling_rows(s: &Scenario) -> Result<Vec<Row>, (Status, String)> {
    let fail = |e: Error| (status_of(&e), e.to_string());
    let start = Instant::now();
    let kernel = match &s.model {
        ModelChoice::Weighted(k) => k,
        _ => return Err((Status::Unsupported, "scaling check needs a weighted model".into())),
    };
    let beta = s.law.beta().ok_or((Status::Unsupported, "scaling check needs a heavy-tailed law".into()))?;
    let (expected, tol) = match kernel {
        MemoryKernel::Algebraic { nu } => (1.0 + beta * (1.0 - nu), 0.05),
        MemoryKernel::Exponential { .. } => (1.0, 0.02),
        MemoryKernel::Custom { .. } => return Err((Status::Unsupported, "no reference exponent for a custom kernel".into())),
    };
    let ns: Vec<usize> = s.grid.iter().map(|&n| n as usize).collect();
    let e = scaling_exponent(kernel, beta, &ns).map_err(fail)?;
    Ok(vec![Row {
        t_or_n: *s.grid.last().expect("nonempty grid"),
        estimate: e,
        prediction: expected,
        ratio: e / expected,
        wall_ms: start.elapsed().as_millis(),
        passed: (e - expected).abs() <= tol,
        ..Row::blank(s, 0, "scaling")
    }])
}

/// Runs every requested check. Regime and support problems stop the run
/// before any simulation.
pub fn run(s: &Scenario) -> RunReport {
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for check in &s.checks {
        let r = match check {
            Check::McVsPrediction => mc_rows(s),
            Check::ErrorTerm => error_term_rows(s),
            Check::Svip => svip_rows(s),
            Check::Scaling => scaling_rows(s),
        };
        match r {
            Ok(mut more) => rows.append(&mut more),
            Err((status, msg)) => {
                diagnostics.push(msg);
                return RunReport { rows, status, diagnostics };
            }
        }
    }
    for r in rows.iter().filter(|r| !r.passed) {
        diagnostics.push(format!(
            "{} index {} ({}): ratio {} outside tolerance",
            r.scenario, r.index, r.method, r.ratio
        ));
    }
    let status = if rows.iter().all(|r| r.passed) { Status::Pass } else { Status::CheckFailed };
    RunReport { rows, status, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;
    use ldp_core::laws::IncrementLaw;

    #[test]
    fn header_is_stable() {
        assert_eq!(CSV_HEADER.split(',').count(), 13);
        let s = parse_scenario("model = iid\nbeta = 0.5\nn_grid = [1]\nx_rule = fixed(1e4)\nbudget = 1000\n").unwrap();
        let r = run(&s);
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), 13);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.02), "0.02");
        assert_eq!(fmt_num(2.5e-14), "2.5e-14");
        assert_eq!(fmt_num(1e20), "1e20");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        assert_eq!(fmt_num(-3.0), "-3");
    }

    #[test]
    fn ld_rule_hits_target() {
        let m = SumModel::iid(IncrementLaw::pareto(0.7, 1.0).unwrap(), 50).unwrap();
        let x = solve_x(&m, XRule::Ld(0.02)).unwrap();
        assert!((m.ld_condition(x).unwrap() / 0.02 - 1.0).abs() < 1e-12);
        let direct = IncrementLaw::pareto(0.7, 1.0).unwrap().inverse_tail(0.02 / 50.0).unwrap();
        assert!((x / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regime_guard() {
        let s = parse_scenario("model = iid\nbeta = 0.5\nn_grid = [1, 10]\nx_rule = ld(1)\nbudget = 1000\n").unwrap();
        let r = run(&s);
        assert_eq!(r.status, Status::OutOfRegime);
        assert!(r.rows.is_empty() && r.diagnostics[0].contains("ld_condition"));
    }

    #[test]
    fn unsupported_combination() {
        let s = parse_scenario("model = iid\nlaw = exponential\nn_grid = [10]\nx_rule = fixed(50)\nbudget = 1000\n").unwrap();
        assert_eq!(run(&s).status, Status::Unsupported);
        let s = parse_scenario("model = iid\nbeta = 0.5\nn_grid = [10]\nchecks = [scaling]\n").unwrap();
        assert_eq!(run(&s).status.code(), 3);
    }

    #[test]
    fn transform_checks() {
        let s = parse_scenario(
            "model = iid\nbeta = 0.5\nn_grid = [10, 100, 1000, 10000]\nchecks = [error_term, svip]\n",
        )
        .unwrap();
        let r = run(&s);
        assert_eq!(r.status, Status::Pass, "{:?}", r.diagnostics);
        assert_eq!(r.rows.len(), 5);
        assert_eq!(r.rows[4].method, "svip");
    }
}

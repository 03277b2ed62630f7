use ldp_core::counting::CountingSpec;
use ldp_core::kernels::MemoryKernel;
use ldp_core::laws::IncrementLaw;
use ldp_core::models::SumModel;
use ldp_core::montecarlo::{convergence_table, estimate_tail, SeedSpec};
use ldp_core::oracle::convolution_tail;

fn pareto(b: f64) -> IncrementLaw {
    IncrementLaw::pareto(b, 1.0).unwrap()
}

#[test]
fn two_term_weighted_tail() {
    // z = 1.5 X_1 + X_2
    let m = SumModel::weighted(pareto(0.5), MemoryKernel::exponential(0.5).unwrap(), 2).unwrap();
    let x = 1e6;
    let e = estimate_tail(&m, x, 1_000_000, SeedSpec::new(31), 0).unwrap();
    let lead = (1.5f64.sqrt() + 1.0) * x.powf(-0.5);
    assert!((e.p_hat - lead).abs() < 3.0 * e.stderr + 0.01 * lead, "{e:?} {lead}");
}

#[test]
fn two_fold_sum_matches_convolution() {
    let m = SumModel::iid(pareto(0.5), 2).unwrap();
    let x = 100.0;
    let o = convolution_tail(&pareto(0.5), 2, x).unwrap();
    let e = estimate_tail(&m, x, 400_000, SeedSpec::new(32), 0).unwrap();
    assert!((e.p_hat - o.value).abs() <= 3.0 * e.stderr + o.error_bound, "{e:?} {o:?}");
}

#[test]
fn three_fold_sum_matches_convolution() {
    let law = pareto(0.7);
    let m = SumModel::iid(law, 3).unwrap();
    let x = 50.0;
    let o = convolution_tail(&law, 3, x).unwrap();
    let e = estimate_tail(&m, x, 400_000, SeedSpec::new(33), 0).unwrap();
    assert!((e.p_hat - o.value).abs() <= 3.0 * e.stderr + o.error_bound, "{e:?} {o:?}");
}

#[test]
fn poisson_stopped_row() {
    let fam = |t: f64| SumModel::stopped(CountingSpec::poisson(2.0).unwrap(), pareto(0.5), t, false);
    // E[N] F̄(x) = 0.02
    let rows = convergence_table(fam, |t| (2.0 * t / 0.02).powi(2), &[50.0], 300_000, SeedSpec::new(34), 1 << 26).unwrap();
    let r = &rows[0];
    assert!((r.ratio - 1.0).abs() < 0.2, "{r:?}");
    assert!((r.ld_condition - 0.02).abs() < 1e-12);
}

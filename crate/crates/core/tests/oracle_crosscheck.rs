use ldp_core::counting::{sparre_andersen_tail, sample_first_passage, CountingSpec, Growth};
use ldp_core::laws::IncrementLaw;
use ldp_core::models::SumModel;
use ldp_core::oracle::{convolution_tail, enumerate_pgf, first_passage_walk, sparre_andersen_exact};
use ldp_core::quad::{integrate, integrate_log, Tolerance};
use ldp_core::transforms::lst_centered_sum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pareto(b: f64) -> IncrementLaw {
    IncrementLaw::pareto(b, 1.0).unwrap()
}

#[test]
fn two_fold_transform_matches_convolution() {
    let law = pareto(0.5);
    let model = SumModel::iid(law, 2).unwrap();
    let tol = Tolerance::new(1e-13, 1e-11);
    for &s in &[1.0, 0.1] {
        // F̂_2(s) = e^{−2s} − s ∫_2^∞ e^{−sx} P[S_2 > x] dx
        let tail = |x: f64| (-s * x).exp() * convolution_tail(&law, 2, x).unwrap().value;
        let q = integrate(tail, 2.0, 2.0 + 60.0 / s, tol).value;
        let via_oracle = (-2.0 * s).exp() - s * q;
        let direct = lst_centered_sum(&model, s).unwrap();
        assert!((via_oracle - direct).abs() < 1e-8, "{s}: {via_oracle} vs {direct}");
    }
}

#[test]
fn integrated_tail_is_twice_the_mean() {
    let law = pareto(1.5);
    let big = 1e6;
    let body = integrate_log(|x| convolution_tail(&law, 2, x).unwrap().value, 2.0, big, Tolerance::new(1e-12, 1e-10));
    // beyond `big`: 2F̄(x) + 2E[X] f(x)
    let rest = 4.0 * big.powf(-0.5) + 6.0 * big.powf(-1.5);
    let total = 2.0 + body.value + rest;
    assert!((total - 6.0).abs() < 1e-6, "{total}");
}

#[test]
fn counting_pgf_matches_enumeration() {
    let cases = [
        (CountingSpec::poisson(2.0).unwrap(), 10.0, 0.5, 500),
        (CountingSpec::geometric(Growth::default()).unwrap(), 100.0, 0.99, 1_000_000),
        (CountingSpec::two_point(Growth::default(), 1.5).unwrap(), 100.0, 0.9999, 2000),
        (CountingSpec::Deterministic { n: 7 }, 1.0, 0.3, 10),
    ];
    for (spec, t, z, n_max) in cases {
        let o = enumerate_pgf(&spec, t, z, n_max).unwrap();
        let v = spec.pgf(t, z).unwrap();
        assert!(o.agrees(v, 1e-12), "{spec:?}: {o:?} vs {v}");
    }
}

#[test]
fn sparre_andersen_table_and_series() {
    for n in [0u64, 1, 2, 10, 1000, 65_535, 65_536, 65_537, 100_000, 400_000] {
        let exact = sparre_andersen_exact(n);
        let main = sparre_andersen_tail(n);
        assert!((main / exact - 1.0).abs() < 1e-9, "{n}: {main} vs {exact}");
    }
}

#[test]
fn direct_first_passage_sampler_matches_walks() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let walks = first_passage_walk(&mut rng, 10, 400_000).unwrap();
    let reps = 400_000;
    let mut over = [0u64; 11];
    for _ in 0..reps {
        let tau = sample_first_passage(&mut rng, u64::MAX).unwrap();
        for (n, o) in over.iter_mut().enumerate() {
            *o += (tau > n as u64) as u64;
        }
    }
    for n in 1..=10 {
        let p = over[n] as f64 / reps as f64;
        // both sides carry sampling error
        let se = (2.0 * p * (1.0 - p) / reps as f64).sqrt();
        assert!((p - walks[n].value).abs() < 4.0 * se, "{n}: {p} vs {:?}", walks[n]);
        assert!(walks[n].agrees(sparre_andersen_exact(n as u64), 0.0));
    }
}

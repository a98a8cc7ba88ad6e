use sdou_core::bgou::{BgouAlgorithm, BgouParams, BgouTransition};
use sdou_core::gou::{
    polya_mixture_weights, pseudo_mixture_weights, remainder_moments, ArRemainder, GouAlgorithm,
    GouParams, GouTransition, RemainderParams,
};
use sdou_core::rng::{sample_gamma, sample_polya, sample_poisson};
use sdou_core::validation::{chi_square_sf, gof_mixed, ks_two_sample, summarize, GofOptions};
use sdou_core::{
    sample_paths, sample_terminals, Algorithm, Execution, Moments, PathSampler, ProcessSpec,
    RngStream, SimOptions, TimeGrid,
};

const N: usize = 400_000;

fn simulator(spec: ProcessSpec, alg: Algorithm, grid: &TimeGrid) -> sdou_core::Simulator {
    spec.simulator(alg, grid.clone(), &SimOptions::default()).unwrap()
}

fn gou(k: f64, lambda: f64, beta: f64, x0: f64) -> ProcessSpec {
    ProcessSpec::Gou(GouParams::new(k, lambda, beta, x0).unwrap())
}

#[test]
fn gamma_draws_match_moments() {
    let mut s = RngStream::new(11, 0);
    for (shape, rate) in [(0.3, 2.0), (1.0, 0.5), (7.5, 3.0)] {
        let x: Vec<f64> = (0..N).map(|_| sample_gamma(&mut s, shape, rate).unwrap()).collect();
        let oracle = Moments::from_cumulants(
            shape / rate,
            shape / rate.powi(2),
            2.0 * shape / rate.powi(3),
            6.0 * shape / rate.powi(4),
        );
        let st = summarize(&x).unwrap();
        assert!(st.agrees_with(&oracle, 4.0), "shape {shape}: {:?}", st.deltas(&oracle));
    }
}

#[test]
fn poisson_draws_match_moments() {
    let mut s = RngStream::new(12, 0);
    for mean in [0.03, 2.5, 40.0, 900.0] {
        let x: Vec<f64> = (0..N).map(|_| sample_poisson(&mut s, mean).unwrap() as f64).collect();
        let oracle = Moments::from_cumulants(mean, mean, mean, mean);
        let st = summarize(&x).unwrap();
        assert!(st.agrees_with(&oracle, 4.0), "mean {mean}: {:?}", st.deltas(&oracle));
    }
}

#[test]
fn polya_counts_match_pmf() {
    let mut s = RngStream::new(13, 0);
    for (alpha, a) in [(0.27, 0.9), (2.5, 0.6), (40.0, 0.5)] {
        let r = RemainderParams::new(a, alpha, 1.0).unwrap();
        let w = polya_mixture_weights(&r, 400).unwrap().weights;
        let mut counts = vec![0usize; w.len()];
        for _ in 0..N {
            let k = sample_polya(&mut s, alpha, 1.0 - a).unwrap() as usize;
            counts[k.min(w.len() - 1)] += 1;
        }
        // Pool cells with expected count below 5 into their neighbour.
        let (mut stat, mut df, mut obs, mut exp) = (0.0, 0usize, 0.0, 0.0);
        for (c, p) in counts.iter().zip(&w) {
            obs += *c as f64;
            exp += p * N as f64;
            if exp >= 5.0 {
                stat += (obs - exp).powi(2) / exp;
                df += 1;
                obs = 0.0;
                exp = 0.0;
            }
        }
        let p = chi_square_sf(stat, df - 1);
        assert!(p > 0.001, "alpha {alpha}: chi2 {stat} on {df} cells, p {p}");
    }
}

#[test]
fn ar_acceptance_rate_is_reciprocal_envelope() {
    for (alpha, a) in [(0.1, 0.5), (0.9, 0.7), (0.4, 0.95)] {
        let r = RemainderParams::new(a, alpha, 1.0).unwrap();
        let ar = ArRemainder::new(&r, 40).unwrap();
        let c = pseudo_mixture_weights(&r, 40).unwrap().positive_mass;
        assert!((ar.positive_mass() - c).abs() < 1e-15);
        let mut s = RngStream::new(14, 0);
        let trials: u64 = (0..N).map(|_| ar.sample_counted(&mut s).1 as u64).sum();
        let rate = N as f64 / trials as f64;
        let se = (rate * (1.0 - rate) / trials as f64).sqrt();
        assert!((rate - 1.0 / c).abs() < 4.0 * se + 1e-12, "alpha {alpha} a {a}: {rate} vs {}", 1.0 / c);
    }
}

#[test]
fn ar_rejects_fast_decay() {
    let r = RemainderParams::new(0.4, 0.5, 1.0).unwrap();
    assert!(ArRemainder::new(&r, 40).is_err());
    let grid = TimeGrid::uniform(1, 2.0).unwrap();
    let spec = gou(1.0, 1.0, 1.0, 0.0);
    assert!(spec
        .simulator(Algorithm::Gou(GouAlgorithm::ArPseudo), grid, &SimOptions::default())
        .is_err());
}

#[test]
fn every_gou_algorithm_hits_the_atom() {
    let dt = 0.1;
    let grid = TimeGrid::uniform(1, dt).unwrap();
    let p = GouParams::new(2.0, 4.0, 1.5, 0.0).unwrap();
    let atom = p.decay(dt).powf(p.alpha());
    for (i, alg) in GouAlgorithm::ALL.into_iter().enumerate() {
        let sim = simulator(ProcessSpec::Gou(p), Algorithm::Gou(alg), &grid);
        let x = sample_terminals(&sim, 100 + i as u64, N, Execution::Parallel);
        let freq = x.iter().filter(|&&v| v == 0.0).count() as f64 / N as f64;
        let se = (atom * (1.0 - atom) / N as f64).sqrt();
        assert!((freq - atom).abs() < 3.0 * se, "{alg}: {freq} vs {atom}");
    }
}

#[test]
fn remainder_moments_match_sd_samples() {
    let r = RemainderParams::new(0.7, 1.3, 2.0).unwrap();
    let mut s = RngStream::new(15, 0);
    let x: Vec<f64> = (0..N)
        .map(|_| sdou_core::gou::sample_remainder_polya(&mut s, &r).unwrap())
        .collect();
    let oracle = remainder_moments(&r);
    let st = summarize(&x).unwrap();
    assert!(st.agrees_with(&oracle, 4.0), "{:?}", st.deltas(&oracle));
}

#[test]
fn gou_samples_fit_transition_density() {
    let p = GouParams::new(1.0, 0.8, 2.0, 0.5).unwrap();
    let t = 0.4;
    let law = GouTransition::new(t, 0.5, &p, 200).unwrap();
    let grid = TimeGrid::uniform(1, t).unwrap();
    for (i, alg) in [GouAlgorithm::SdPolya, GouAlgorithm::ArPseudo, GouAlgorithm::Lawrence]
        .into_iter()
        .enumerate()
    {
        let sim = simulator(ProcessSpec::Gou(p), Algorithm::Gou(alg), &grid);
        let x = sample_terminals(&sim, 200 + i as u64, 200_000, Execution::Parallel);
        let rep = gof_mixed(&x, &law, &GofOptions::default()).unwrap();
        assert!(rep.pass, "{alg}: {rep:?}");
    }
}

#[test]
fn bgou_samples_fit_transition_density() {
    let grid = TimeGrid::uniform(1, 0.3).unwrap();
    let cases = [
        (BgouParams::symmetric(1.0, 1.2, 1.5, -0.4).unwrap(), BgouAlgorithm::ArSym),
        (BgouParams::new(1.0, 0.4, 2.0, 0.9, 1.0, 0.3).unwrap(), BgouAlgorithm::SdDiff),
        (BgouParams::new(1.0, 0.4, 2.0, 0.9, 1.0, 0.3).unwrap(), BgouAlgorithm::LawrenceExt),
    ];
    for (i, (p, alg)) in cases.into_iter().enumerate() {
        let law = BgouTransition::new(0.3, p.x0, &p, 60).unwrap();
        let sim = simulator(ProcessSpec::Bgou(p), Algorithm::Bgou(alg), &grid);
        let x = sample_terminals(&sim, 300 + i as u64, 200_000, Execution::Parallel);
        let rep = gof_mixed(&x, &law, &GofOptions::default()).unwrap();
        assert!(rep.pass, "{alg}: {rep:?}");
    }
}

#[test]
fn corrupted_rate_is_detected() {
    let p = GouParams::new(1.0, 0.8, 2.0, 0.5).unwrap();
    let wrong = GouParams::new(1.0, 0.8, 2.4, 0.5).unwrap();
    let law = GouTransition::new(0.4, 0.5, &wrong, 200).unwrap();
    let grid = TimeGrid::uniform(1, 0.4).unwrap();
    let sim = simulator(ProcessSpec::Gou(p), Algorithm::Gou(GouAlgorithm::SdPolya), &grid);
    let x = sample_terminals(&sim, 400, 200_000, Execution::Parallel);
    assert!(!gof_mixed(&x, &law, &GofOptions::default()).unwrap().pass);
}

#[test]
fn sd_sym_and_sd_diff_agree() {
    let p = BgouParams::symmetric(0.5, 2.0, 1.0, 1.0).unwrap();
    let grid = TimeGrid::uniform(3, 0.5).unwrap();
    let a = sample_terminals(
        &simulator(ProcessSpec::Bgou(p), Algorithm::Bgou(BgouAlgorithm::SdSym), &grid),
        500,
        N,
        Execution::Parallel,
    );
    let b = sample_terminals(
        &simulator(ProcessSpec::Bgou(p), Algorithm::Bgou(BgouAlgorithm::SdDiff), &grid),
        501,
        N,
        Execution::Parallel,
    );
    assert!(ks_two_sample(&a, &b, 0.01).unwrap().pass);
}

#[test]
fn execution_modes_give_identical_paths() {
    let grid = TimeGrid::new(vec![0.0, 0.1, 0.35, 0.4, 1.0]).unwrap();
    for (spec, alg) in [
        (gou(0.5, 1.0, 1.0, 10.0), Algorithm::Gou(GouAlgorithm::Qu)),
        (
            ProcessSpec::Bgou(BgouParams::symmetric(0.5, 1.0, 1.0, 0.0).unwrap()),
            Algorithm::Bgou(BgouAlgorithm::ArSym),
        ),
    ] {
        let sim = simulator(spec, alg, &grid);
        let seq = sample_paths(&sim, 9, 10_000, Execution::Sequential);
        let par = sample_paths(&sim, 9, 10_000, Execution::Parallel);
        assert_eq!(seq, par);
        assert_eq!(seq.column(4), sample_terminals(&sim, 9, 10_000, Execution::Sequential));
        assert_eq!(seq.times(), grid.times());
        assert!(seq.paths().all(|row| row[0] == sim.initial()));
    }
}

#[test]
fn skeleton_is_markov_in_the_grid() {
    // Two half steps and one full step give the same terminal law.
    let spec = gou(2.0, 3.0, 1.0, 1.0);
    let alg = Algorithm::Gou(GouAlgorithm::SdPolya);
    let fine = simulator(spec, alg, &TimeGrid::uniform(2, 0.25).unwrap());
    let coarse = simulator(spec, alg, &TimeGrid::uniform(1, 0.5).unwrap());
    let a = sample_terminals(&fine, 600, N, Execution::Parallel);
    let b = sample_terminals(&coarse, 601, N, Execution::Parallel);
    assert!(ks_two_sample(&a, &b, 0.01).unwrap().pass);
}

#[test]
fn multi_step_terminals_fit_horizon_density() {
    use sdou_core::law::AtomAt;
    let grid = TimeGrid::uniform(4, 0.25).unwrap();
    let spec = ProcessSpec::BgouSym { k: 0.5, lambda: 1.0, beta: 1.0, x0: 10.0 };
    let law = AtomAt {
        law: spec.transition(1.0, 10.0, 60).unwrap(),
        location: spec.no_jump_value(&grid),
    };
    for (i, alg) in spec.algorithms().into_iter().enumerate() {
        let x = sample_terminals(&simulator(spec, alg, &grid), 700 + i as u64, 200_000, Execution::Parallel);
        let rep = gof_mixed(&x, &law, &GofOptions::default()).unwrap();
        assert!(rep.pass, "{alg}: {rep:?}");
        assert!(rep.atom.observed > 0);
    }
}

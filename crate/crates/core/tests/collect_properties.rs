use collectibility::bounds::{r_bound, BoundQuery};
use collectibility::collect::{
    collectibility_mixed_max, collectibility_pure_max, collectibility_ya, gram_from_pure, product_functional_mixed,
    OptimizerConfig, SeparableBasisSet,
};
use collectibility::qcore::random;
use collectibility::TensorShape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick(seed: u64) -> OptimizerConfig {
    OptimizerConfig { restarts: 6, max_iters: 1500, seed, ..OptimizerConfig::default() }
}

fn shapes() -> Vec<TensorShape> {
    [(2, 2), (2, 3), (3, 2)].iter().map(|&(k, n)| TensorShape::new(k, n).unwrap()).collect()
}

#[test]
fn pure_values_never_exceed_universal_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for shape in shapes() {
        let n = shape.n() as f64;
        let bound = n.powf(-n);
        for i in 0..200 {
            let psi = random::haar_state(shape, &mut rng);
            let v = collectibility_pure_max(&psi, &quick(i)).unwrap().value;
            assert!(v <= bound + 1e-8, "{shape}: {v} > {bound}");
        }
    }
}

#[test]
fn product_states_stay_below_separable_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for shape in shapes() {
        let n = shape.n() as f64;
        let bound = n.powf(-n * shape.k() as f64);
        for i in 0..200 {
            let psi = random::product_state(shape, &mut rng);
            let v = collectibility_pure_max(&psi, &quick(i)).unwrap().value;
            assert!(v <= bound + 1e-8, "{shape}: {v} > {bound}");
        }
    }
}

#[test]
fn local_unitaries_do_not_change_collectibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let shape = TensorShape::new(2, 2).unwrap();
    let cfg = OptimizerConfig::default();
    for _ in 0..10 {
        let psi = random::haar_state(shape, &mut rng);
        let rotated = psi.apply_local(&random::local_unitaries(shape, &mut rng)).unwrap();
        let a = collectibility_pure_max(&psi, &cfg).unwrap().value;
        let b = collectibility_pure_max(&rotated, &cfg).unwrap().value;
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn ya_never_beats_the_full_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for k in [2, 3] {
        let shape = TensorShape::new(k, 2).unwrap();
        let rest = TensorShape::new(k - 1, 2).unwrap();
        for i in 0..15 {
            let psi = random::haar_state(shape, &mut rng);
            let full = collectibility_pure_max(&psi, &quick(i)).unwrap().value;
            for _ in 0..5 {
                let basis = SeparableBasisSet::new(rest, random::local_unitaries(rest, &mut rng)).unwrap();
                let ya = collectibility_ya(&gram_from_pure(&psi, &basis).unwrap()).unwrap();
                assert!(ya <= full + 1e-6, "K={k}: {ya} > {full}");
            }
        }
    }
}

#[test]
fn ppt_two_qubit_states_respect_the_ppt_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let shape = TensorShape::two_qubits();
    for i in 0..200 {
        let rho = random::ppt_state(shape, 4, &mut rng);
        let v = collectibility_mixed_max(&rho, &quick(i)).unwrap().value;
        assert!(v <= 1.0 / 16.0 + 1e-6, "state {i}: {v}");
    }
}

#[test]
fn mixed_values_respect_the_purity_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for shape in [TensorShape::two_qubits(), TensorShape::new(2, 3).unwrap()] {
        for i in 0..40 {
            let rank = 1 + (i % shape.dim() as u64) as usize;
            let rho = random::density_of_rank(shape, rank, &mut rng);
            let q = BoundQuery::new(shape.dim(), shape.n(), 1.0, rho.purity()).unwrap();
            let bound = r_bound(&q).unwrap().r_n;
            let v = collectibility_mixed_max(&rho, &quick(i)).unwrap().value;
            assert!(v <= bound + 1e-6, "{shape} rank {rank}: {v} > {bound}");
            let basis = SeparableBasisSet::new(shape, random::local_unitaries(shape, &mut rng)).unwrap();
            assert!(product_functional_mixed(&rho, &basis).unwrap() <= bound + 1e-9);
        }
    }
}

// scratch: dry-run the oracle-equivalence battery (deleted before ship)
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use shiftcast_core::oracle::qp_reference_solve;
use shiftcast_core::svr::{kernel_eval, predict, train, KernelSpec, TrainConfig};
use std::time::Instant;

fn main() {
    let start = Instant::now();
    let mut worst_rel = 0.0f64;
    let mut worst_pred = 0.0f64;
    let mut min_obj = f64::INFINITY;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(2..=8usize);
        let d = rng.gen_range(1..=3usize);
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = *[0.1, 1.0, 10.0].choose(&mut rng).unwrap();
        let eps = *[0.0, 0.01, 0.1].choose(&mut rng).unwrap();
        let kernel = if rng.gen_bool(0.5) {
            KernelSpec::Linear
        } else {
            KernelSpec::Rbf { gamma: *[0.1, 1.0, 10.0].choose(&mut rng).unwrap() }
        };
        let config = TrainConfig::new(c, eps, kernel)
            .with_kkt_tolerance(1e-7)
            .with_max_epochs(100_000);
        let (model, stats) = train(&config, &xs, &ys).unwrap();
        let oracle = qp_reference_solve(&config, &xs, &ys).unwrap();

        let rel = (stats.dual_objective - oracle.dual_objective).abs()
            / oracle.dual_objective.abs().max(stats.dual_objective.abs()).max(1e-30);
        if oracle.dual_objective.abs() < min_obj { min_obj = oracle.dual_objective.abs(); }
        if rel > worst_rel { worst_rel = rel; }

        // oracle-side bias + predictions at 5 probe points
        let f = |betas: &[f64], x: &[f64]| -> f64 {
            betas.iter().zip(&xs).map(|(b, xi)| b * kernel_eval(&kernel, xi, x).unwrap()).sum()
        };
        let mut bsum = 0.0; let mut bcount = 0; 
        let mut lo = f64::NEG_INFINITY; let mut hi = f64::INFINITY;
        for i in 0..n {
            let b = oracle.betas[i];
            let fi = f(&oracle.betas, &xs[i]);
            let up = if b >= 0.0 { ys[i] - fi - eps } else { ys[i] - fi + eps };
            let down = if b > 0.0 { ys[i] - fi - eps } else { ys[i] - fi + eps };
            if b < c - 1e-9 { lo = lo.max(up); }
            if b > -c + 1e-9 { hi = hi.min(down); }
            if b.abs() > 1e-9 && b.abs() < c - 1e-9 {
                bsum += ys[i] - fi - b.signum() * eps;
                bcount += 1;
            }
        }
        let ob = if bcount > 0 { bsum / bcount as f64 } else { 0.5 * (lo + hi) };
        let mut prng = ChaCha8Rng::seed_from_u64(999);
        for _ in 0..5 {
            let probe: Vec<f64> = (0..d).map(|_| prng.gen_range(-1.0..1.0)).collect();
            let ps = predict(&model, &probe).unwrap();
            let po = f(&oracle.betas, &probe) + ob;
            let diff = (ps - po).abs();
            if diff > worst_pred { worst_pred = diff; }
        }
        if !stats.converged() { println!("seed {seed}: NOT CONVERGED, violations {}", stats.kkt_violations_remaining); }
    }
    println!("worst objective rel diff: {worst_rel:.3e}");
    println!("worst probe pred diff:    {worst_pred:.3e}");
    println!("smallest |objective|:     {min_obj:.3e}");
    println!("elapsed: {:?}", start.elapsed());
}

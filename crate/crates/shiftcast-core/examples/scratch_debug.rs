// scratch: find the worst prediction-mismatch instance (deleted before ship)
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use shiftcast_core::oracle::qp_reference_solve;
use shiftcast_core::svr::{kernel_eval, predict, train, KernelSpec, TrainConfig};

fn main() {
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
            .with_kkt_tolerance(1e-8)
            .with_max_epochs(100_000);
        let (model, _stats) = train(&config, &xs, &ys).unwrap();
        let oracle = qp_reference_solve(&config, &xs, &ys).unwrap();

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
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let probe: Vec<f64> = (0..d).map(|_| prng.gen_range(-1.0..1.0)).collect();
            let diff = (predict(&model, &probe).unwrap() - (f(&oracle.betas, &probe) + ob)).abs();
            if diff > worst { worst = diff; }
        }
        if worst > 1e-4 {
            println!("seed {seed}: n={n} d={d} c={c} eps={eps} kernel={kernel:?}");
            println!("  worst probe diff {worst:.3e}, smo bias {}, oracle bias {ob} (interior {bcount}, interval [{lo},{hi}])", model.bias);
            println!("  smo betas(sv): {:?}", model.betas);
            println!("  oracle betas : {:?}", oracle.betas);
        }
    }
}

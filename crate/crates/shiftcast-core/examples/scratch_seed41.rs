// scratch: dissect seed 41 (deleted before ship)
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use shiftcast_core::oracle::qp_reference_solve;
use shiftcast_core::svr::{dual_objective, kernel_eval, train, KernelSpec, TrainConfig};

fn main() {
    let seed = 41u64;
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
    println!("n={n} d={d} c={c} eps={eps} kernel={kernel:?}");
    println!("xs={xs:?}");
    println!("ys={ys:?}");
    let config = TrainConfig::new(c, eps, kernel).with_kkt_tolerance(1e-8).with_max_epochs(100_000);
    let (_model, stats) = train(&config, &xs, &ys).unwrap();
    let oracle = qp_reference_solve(&config, &xs, &ys).unwrap();
    println!("smo objective    : {:.17}", stats.dual_objective);
    println!("oracle objective : {:.17}", oracle.dual_objective);
    println!("oracle iterations: {}", oracle.iterations);

    // residuals F_i at oracle betas
    let f = |betas: &[f64], x: &[f64]| -> f64 {
        betas.iter().zip(&xs).map(|(b, xi)| b * kernel_eval(&kernel, xi, x).unwrap()).sum()
    };
    for i in 0..n {
        let fi = f(&oracle.betas, &xs[i]);
        println!("  i={i} beta={:+.3e} F={:+.6}", oracle.betas[i], ys[i] - fi);
    }
    // try an explicit improving move: delta from j(4 or 7, beta≈0) up on i where up is max
    let mut betas2 = oracle.betas.clone();
    // find max up among beta<c and min down among beta>-c
    let (mut bi, mut bj) = (usize::MAX, usize::MAX);
    let (mut up_best, mut down_best) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let fi = ys[i] - f(&oracle.betas, &xs[i]);
        let up = if oracle.betas[i] >= 0.0 { fi - eps } else { fi + eps };
        let down = if oracle.betas[i] > 0.0 { fi - eps } else { fi + eps };
        if oracle.betas[i] < c - 1e-9 && up > up_best { up_best = up; bi = i; }
        if oracle.betas[i] > -c + 1e-9 && down < down_best { down_best = down; bj = i; }
    }
    println!("max up {up_best:+.6} at {bi}, min down {down_best:+.6} at {bj}, gap {:+.6}", up_best - down_best);
    for delta in [1e-3, 1e-2, 0.1, 1.0] {
        betas2[bi] = oracle.betas[bi] + delta;
        betas2[bj] = oracle.betas[bj] - delta;
        let w = dual_objective(&config, &xs, &ys, &betas2);
        println!("  move delta={delta}: objective {:?}", w.map(|v| v - oracle.dual_objective));
        betas2[bi] = oracle.betas[bi];
        betas2[bj] = oracle.betas[bj];
    }
}

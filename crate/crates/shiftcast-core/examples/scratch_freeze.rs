// scratch: compute oracle reference values to freeze into tests (deleted before ship)
use shiftcast_core::oracle::qp_reference_solve;
use shiftcast_core::svr::{dual_objective, KernelSpec, TrainConfig};

fn bias_from(betas: &[f64], xs: &[Vec<f64>], ys: &[f64], cfg: &TrainConfig) -> f64 {
    let k = |u: &[f64], v: &[f64]| shiftcast_core::svr::kernel_eval(&cfg.kernel, u, v).unwrap();
    let f = |x: &[f64]| -> f64 { betas.iter().zip(xs).map(|(b, xi)| b * k(xi, x)).sum() };
    let mut sum = 0.0; let mut count = 0;
    for i in 0..xs.len() {
        let b = betas[i];
        if b.abs() > 1e-9 && b.abs() < cfg.c - 1e-9 {
            sum += ys[i] - f(&xs[i]) - b.signum() * cfg.epsilon;
            count += 1;
        }
    }
    if count > 0 { sum / count as f64 } else { f64::NAN }
}

fn main() {
    // 4-point linear instance
    let xs: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
    let ys = vec![0.0, 1.0, 2.0, 3.0];
    let cfg = TrainConfig::new(10.0, 0.05, KernelSpec::Linear).with_kkt_tolerance(1e-10);
    let sol = qp_reference_solve(&cfg, &xs, &ys).unwrap();
    println!("4pt linear: objective = {:.17e}", sol.dual_objective);
    println!("4pt betas = {:?}", sol.betas);
    println!("4pt iterations = {}", sol.iterations);
    let b = bias_from(&sol.betas, &xs, &ys, &cfg);
    println!("4pt bias = {b:.17}");
    let k = |u: &[f64], v: &[f64]| shiftcast_core::svr::kernel_eval(&cfg.kernel, u, v).unwrap();
    let predict = |x: &[f64]| -> f64 {
        sol.betas.iter().zip(&xs).map(|(bb, xi)| bb * k(xi, x)).sum::<f64>() + b
    };
    println!("4pt predict(1.5) = {:.17}", predict(&[1.5]));
    println!("4pt obj check via dual_objective = {:.17e}", dual_objective(&cfg, &xs, &ys, &sol.betas).unwrap());

    // 6-point RBF instance with the published RBF hyperparameters
    let xs6: Vec<Vec<f64>> = vec![
        vec![0.10, -0.30], vec![0.80, 0.50], vec![-0.40, 0.90],
        vec![0.30, 0.20], vec![-0.90, -0.70], vec![0.60, -0.80],
    ];
    let ys6 = vec![0.25, -0.40, 0.10, 0.60, -0.15, 0.35];
    let cfg6 = TrainConfig::new(0.13, 0.00097, KernelSpec::Rbf { gamma: 1.0 }).with_kkt_tolerance(1e-10);
    let sol6 = qp_reference_solve(&cfg6, &xs6, &ys6).unwrap();
    println!("6pt rbf: objective = {:.17e}", sol6.dual_objective);
    println!("6pt betas = {:?}", sol6.betas);
    println!("6pt iterations = {}", sol6.iterations);
}

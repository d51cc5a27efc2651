// scratch: RBF fit diagnostics (deleted before ship)
use shiftcast_core::domain::SpecTable;
use shiftcast_core::modelsel::Target;
use shiftcast_core::svr::{predict, train, KernelSpec, TrainConfig};
use shiftcast_core::synthline::{builtin_design, generate, GeneratorConfig};
use std::time::Instant;

fn main() {
    let data = generate(&GeneratorConfig::default(), &builtin_design(), &SpecTable::builtin()).unwrap();
    let rows: Vec<_> = data.truth.iter().filter(|r| r.spec_name == "C0402").cloned().collect();
    let xs: Vec<Vec<f64>> = rows.iter().map(|r| r.predictors().to_vec()).collect();
    for target in [Target::ShiftXRatio, Target::ShiftYRatio, Target::ShiftAngleDeg] {
        let ys: Vec<f64> = rows.iter().map(|r| target.value(r)).collect();
        for (label, cfg) in [
            ("paper-rbf", TrainConfig::new(0.13, 0.00097, KernelSpec::Rbf { gamma: 1.0 })),
            ("rbf C=1", TrainConfig::new(1.0, 0.00097, KernelSpec::Rbf { gamma: 1.0 })),
        ] {
            let t = Instant::now();
            let (model, stats) = train(&cfg, &xs, &ys).unwrap();
            let mut sq = 0.0;
            for (x, y) in xs.iter().zip(&ys) {
                let r = predict(&model, x).unwrap() - y;
                sq += r * r;
            }
            let train_rmse = (sq / ys.len() as f64).sqrt();
            let at_bound = model.betas.iter().filter(|b| (b.abs() - cfg.c).abs() < 1e-9).count();
            println!(
                "{:?} {label}: epochs={} conv={} viol={} svs={} at_bound={} train_rmse={:.5} t={:?}",
                target, stats.epochs_run, stats.converged(), stats.kkt_violations_remaining,
                model.betas.len(), at_bound, train_rmse, t.elapsed()
            );
        }
    }
}

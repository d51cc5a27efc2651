// scratch: linear-kernel convergence probe (deleted before ship)
use shiftcast_core::domain::SpecTable;
use shiftcast_core::modelsel::Target;
use shiftcast_core::svr::{train, KernelSpec, TrainConfig};
use shiftcast_core::synthline::{builtin_design, generate, GeneratorConfig};
use std::time::Instant;

fn main() {
    let config = GeneratorConfig::default();
    let data = generate(&config, &builtin_design(), &SpecTable::builtin()).unwrap();
    let rows: Vec<_> = data.truth.iter().filter(|r| r.spec_name == "C0402").cloned().collect();
    let xs: Vec<Vec<f64>> = rows.iter().map(|r| r.predictors().to_vec()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| Target::ShiftXRatio.value(r)).collect();

    for max_epochs in [1000usize, 4000, 16000] {
        let cfg = TrainConfig::new(1.0, 0.031, KernelSpec::Linear).with_max_epochs(max_epochs);
        let t = Instant::now();
        let (model, stats) = train(&cfg, &xs, &ys).unwrap();
        let el = t.elapsed();
        let tail: Vec<f64> = stats.epoch_objectives.iter().rev().take(3).cloned().collect();
        // training MAE
        let mut mae = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            mae += (shiftcast_core::svr::predict(&model, x).unwrap() - y).abs();
        }
        mae /= ys.len() as f64;
        println!(
            "epochs={} run={} conv={} viol={} obj={:.6e} tail={:?} svs={} train_mae={:.5} time={el:?}",
            max_epochs, stats.epochs_run, stats.converged(), stats.kkt_violations_remaining,
            stats.dual_objective, tail, model.betas.len(), mae
        );
    }
}

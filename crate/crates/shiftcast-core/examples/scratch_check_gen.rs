// scratch: calibration dry-run (deleted before ship)
use shiftcast_core::domain::{shift_summary, SpecTable};
use shiftcast_core::modelsel::{evaluate_models, Target};
use shiftcast_core::svr::{KernelSpec, TrainConfig};
use shiftcast_core::synthline::{builtin_design, generate, GeneratorConfig};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let config = GeneratorConfig::default();
    let design = builtin_design();
    let specs = SpecTable::builtin();
    let data = generate(&config, &design, &specs).unwrap();
    println!("placements={} deposits={} truth={}", data.placements.len(), data.deposits.len(), data.truth.len());

    let c0402 = specs.get("C0402").unwrap();
    let rows: Vec<_> = data.truth.iter().filter(|r| r.spec_name == "C0402").cloned().collect();
    println!("C0402 rows: {}", rows.len());
    let summaries = shift_summary(&rows, c0402).unwrap();
    let s1 = &summaries[0];
    println!("setting 1: avg_x={:.2} avg_y={:.2} avg_ang={:.2}", s1.shift_x_um.avg, s1.shift_y_um.avg, s1.shift_angle_deg.avg);
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut amin, mut amax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &summaries {
        xmin = xmin.min(s.shift_x_um.std); xmax = xmax.max(s.shift_x_um.std);
        ymin = ymin.min(s.shift_y_um.std); ymax = ymax.max(s.shift_y_um.std);
        amin = amin.min(s.shift_angle_deg.std); amax = amax.max(s.shift_angle_deg.std);
    }
    println!("std ranges: X [{xmin:.2},{xmax:.2}] (band 4.4..16.5)  Y [{ymin:.2},{ymax:.2}] (band 4.9..33.9)  ang [{amin:.3},{amax:.3}] (band 0.25..0.9)");

    // A5/A6: paper-hyperparameter evaluation on C0402
    let configs = vec![
        ("svr_linear".to_string(), TrainConfig::new(1.0, 0.031, KernelSpec::Linear)),
        ("svr_rbf".to_string(), TrainConfig::new(0.13, 0.00097, KernelSpec::Rbf { gamma: 1.0 })),
    ];
    let report = evaluate_models(&rows, &configs, &Target::ALL, 10, 42).unwrap();
    println!("{}", report.to_text_table());
    println!("elapsed: {:?}", t0.elapsed());
}

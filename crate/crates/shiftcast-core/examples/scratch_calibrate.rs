// scratch: compute calibration intercepts (deleted before ship)
use shiftcast_core::synthline::{default_coefficients, ground_truth, GroundTruthMode};

fn main() {
    // Setting-1 predictors on the reference part (1000x500 um):
    let x = [
        76.84 / 1000.0,  // x1
        71.12 / 500.0,   // x2
        -6.92,           // x3
        0.80,            // x4
        0.00,            // x5
        235.37 / 1000.0, // x6
        0.0,             // x7
        -6.92,           // x8
        150.0,           // x9
    ];
    let coeffs = default_coefficients(GroundTruthMode::Nonlinear);
    let (gx, gy, gang) = ground_truth(GroundTruthMode::Nonlinear, &coeffs, &x);
    // Want gx = 6.8/1000 = 0.0068, gy = -12.4/500 = -0.0248, gang = 2.7
    println!("zero-intercept values: gx={gx:.10} gy={gy:.10} gang={gang:.10}");
    println!("needed intercepts:");
    println!("  SHIFT_X_INTERCEPT: f64 = {:.10};", 0.0068 - gx);
    println!("  SHIFT_Y_INTERCEPT: f64 = {:.10};", -0.0248 - gy);
    println!("  SHIFT_ANGLE_INTERCEPT: f64 = {:.10};", 2.7 - gang);
}

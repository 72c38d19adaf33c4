//! Scaled Bessel evaluation and the ratio R(z) = I1(z)/I0(z): values across
//! nine orders of magnitude, the derivative identity R' = 1 - R^2 - R/z, and
//! the closed-form noncentral-chi mean that rests on the half-order Laguerre
//! polynomial.

use sensing_ris::numerics::{
    bessel_i0_scaled, bessel_ratio, integrate_positive_halfline, laguerre_half, BesselRatioEval,
    QuadratureSpec,
};
use std::f64::consts::PI;

fn main() {
    println!("R(z) = I1(z)/I0(z) and e^-z I0(z):");
    for z in [1e-4, 0.1, 1.0, 5.0, 15.0, 1e2, 1e4] {
        let r = bessel_ratio(z).unwrap();
        let i0e = bessel_i0_scaled(z).unwrap();
        println!("  z = {z:>8.4e}   R = {r:.15}   e^-z I0 = {i0e:.15}");
    }

    println!("\nderivative identity R'(z) = 1 - R^2 - R/z (central differences):");
    for z in [0.5, 3.0, 40.0] {
        let eval = BesselRatioEval::eval(z).unwrap();
        let h = 1e-6 * z;
        let fd = (bessel_ratio(z + h).unwrap() - bessel_ratio(z - h).unwrap()) / (2.0 * h);
        println!(
            "  z = {z:>5.1}   identity = {:.12}   finite diff = {fd:.12}",
            eval.derivative()
        );
    }

    // E[sqrt(x)] for noncentral chi-squared x with 2 degrees of freedom and
    // noncentrality m^2 is sqrt(pi/2) L_{1/2}(-m^2/2); check it against
    // direct integration of sqrt(x) times the density
    let m = 2.0f64;
    let closed = (PI / 2.0).sqrt() * laguerre_half(-m * m / 2.0).unwrap();
    let spec = QuadratureSpec::default();
    let quad = integrate_positive_halfline(
        |x: f64| {
            let z = m * x.sqrt();
            let log_density = -(x + m * m) / 2.0 + z + bessel_i0_scaled(z).unwrap().ln();
            x.sqrt() * 0.5 * log_density.exp()
        },
        &spec,
    )
    .unwrap();
    println!("\nnoncentral-chi mean, m = {m}:");
    println!("  sqrt(pi/2) L_1/2(-m^2/2) = {closed:.15}");
    println!("  quadrature               = {quad:.15}");
}

//! Maurer-Cartan residuals on both sides of the story: associativity of a
//! deformed product is dP + [P,P]/2 = 0 over the Gerstenhaber bracket,
//! the Jacobi identity of a formal bivector is [pi,pi]/2 = 0 over the
//! Schouten bracket.
//!
//! Run with: cargo run --example maurer_cartan

use dq::gauge::mc_residual_poisson;
use dq::multidiff::MultiDiffOp;
use dq::parse;
use dq::series::{series_string, HbarSeries};
use dq::star::mc_residual_star;
use dq::StarProduct;

fn main() -> dq::Result<()> {
    // the Moyal deformation part solves the operator Maurer-Cartan equation
    let alpha = parse::multivector("d1^d2", Some(2))?;
    let star = StarProduct::moyal(&alpha, 4)?;
    let residual = mc_residual_star(&star.deformation_part())?;
    println!("Moyal residual (N=4)   = {}", series_string(&residual));
    assert!(residual.is_zero());

    // stopping at h P_1 leaves exactly h^2/2 [P_1, P_1]
    let p1 = star.p_k(1).clone();
    let truncated = HbarSeries::single(p1.clone(), 1, 3)?;
    let residual = mc_residual_star(&truncated)?;
    println!("h P_1 residual         = nonzero at h^2: {}", !residual.coeff(2).is_zero());
    let expected = p1
        .gerst_bracket(&p1)?
        .scale(&dq::GaussianRational::from_ratio(1, 2));
    assert_eq!(residual.coeff(2), &expected);

    // same failure seen through the associator
    let mut series = StarProduct::moyal(&alpha, 2)?.series().clone();
    series.set_coeff(2, MultiDiffOp::zero(2, 2));
    let broken = StarProduct::new(2, series)?;
    let f = parse::polynomial("x1**2", Some(2))?;
    let g = parse::polynomial("x2", Some(2))?;
    let r = broken.associator_residual(&f, &g, &g)?;
    println!("broken star associator = {}", series_string(&r));
    assert!(!r.is_zero());

    // Schouten side: constant bivectors are flat ...
    let pi = HbarSeries::single(parse::multivector("d1^d2", Some(3))?, 1, 2)?;
    println!(
        "\nconstant pi residual   = {}",
        series_string(&mc_residual_poisson(&pi)?)
    );

    // ... and the non-Jacobi bivector is caught at h^2
    let bad = HbarSeries::single(
        parse::multivector("d1^d2 + x2*d2^d3", Some(3))?,
        1,
        2,
    )?;
    let residual = mc_residual_poisson(&bad)?;
    println!("bad pi residual        = {}", series_string(&residual));
    assert!(!residual.is_zero());
    Ok(())
}

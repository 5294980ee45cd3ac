//! The gauge side of the theory: Baker-Campbell-Hausdorff products of
//! formal vector fields (Dynkin series, exact coefficients) and the gauge
//! action pushing formal bivectors around without leaving the
//! Maurer-Cartan set.
//!
//! Run with: cargo run --example gauge_flows

use dq::gauge::{bch, gauge_apply_bivector, mc_residual_poisson};
use dq::parse;
use dq::series::series_string;

fn main() -> dq::Result<()> {
    let vf = |s: &str, order| parse::multivector_series(s, 2, order, 1);

    // commuting fields: BCH degenerates to the sum
    let x = vf("0: d1", 3)?;
    let y = vf("0: d2", 3)?;
    println!("bch(d1, d2)        = {}", series_string(&bch(&x, &y, 3)?));

    // noncommuting fields pick up nested-commutator corrections
    let x = vf("0: x2*d1", 3)?;
    let y = vf("0: d2", 3)?;
    let z = bch(&x, &y, 3)?;
    println!("bch(x2 d1, d2)     = {}", series_string(&z));

    // the group law is exactly associative after truncation
    let w = vf("0: x1*d2", 3)?;
    let left = bch(&bch(&x, &y, 3)?, &w, 3)?;
    let right = bch(&x, &bch(&y, &w, 3)?, 3)?;
    assert_eq!(left, right);
    println!("bch is associative through the truncation order");

    // gauge flow of h (d1 ^ d2) along x1 d1: coefficients (-1)^k / k!
    let order = 5;
    let pi = parse::multivector_series("1: d1^d2", 2, order, 2)?;
    let flow = vf("0: x1*d1", order)?;
    let moved = gauge_apply_bivector(&flow, &pi)?;
    println!("\nexp(L_X) (h d1^d2) = {}", series_string(&moved));

    // flowing backwards undoes the transform
    let back = gauge_apply_bivector(&flow.neg(), &moved)?;
    assert_eq!(back, pi);
    println!("flowing along -X restores the bivector");

    // the Maurer-Cartan set is preserved
    let pi = parse::multivector_series("1: d1^d2", 2, 3, 2)?;
    assert!(mc_residual_poisson(&pi)?.is_zero());
    let flow = vf("0: x1*x2*d1; 1: x1*d2", 3)?;
    let moved = gauge_apply_bivector(&flow, &pi)?;
    println!("\ntransported pi     = {}", series_string(&moved));
    println!(
        "residual           = {}",
        series_string(&mc_residual_poisson(&moved)?)
    );
    assert!(mc_residual_poisson(&moved)?.is_zero());
    Ok(())
}

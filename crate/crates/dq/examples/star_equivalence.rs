//! Equivalence transforms of star products: transporting the Moyal product
//! along T = id + h T_1 changes the symmetric part of P_1 but never the
//! extracted bivector.
//!
//! Run with: cargo run --example star_equivalence

use dq::multidiff::MultiDiffOp;
use dq::parse;
use dq::series::HbarSeries;
use dq::star::EquivalenceOp;
use dq::StarProduct;

fn main() -> dq::Result<()> {
    let alpha = parse::multivector("d1^d2", Some(2))?;
    let star = StarProduct::moyal(&alpha, 2)?;
    println!("P_1          = {}", star.p_k(1));
    println!("skew         = {}", star.first_order_skew()?);

    // a derivation T_1 = d1 does not move P_1 at all
    let t_derivation = equivalence(2, 2, "[ d1 ]")?;
    let moved = t_derivation.conjugate(&star)?;
    println!("\nT = id + h d1");
    println!("P_1'         = {}", moved.p_k(1));
    assert_eq!(moved.p_k(1), star.p_k(1));

    // a second-order T_1 = d1 d1 shifts P_1 by the symmetric 2 d1 x d1
    let t_second = equivalence(2, 2, "[ d1 d1 ]")?;
    let moved = t_second.conjugate(&star)?;
    println!("\nT = id + h d1 d1");
    println!("P_1'         = {}", moved.p_k(1));
    println!("skew(P_1')   = {}", moved.first_order_skew()?);
    assert_eq!(moved.first_order_skew()?, star.first_order_skew()?);

    // transported star products stay associative
    let f = parse::polynomial("x1**2", Some(2))?;
    let g = parse::polynomial("x2", Some(2))?;
    let h = parse::polynomial("x1*x2", Some(2))?;
    assert!(moved.associator_residual(&f, &g, &h)?.is_zero());
    println!("\ntransported star is still associative");

    // extraction refuses a star whose P_1 has a second-order slot
    let t_third = equivalence(1, 2, "[ d1 d1 d1 ]")?;
    let high = t_third.conjugate(&StarProduct::moyal(&alpha, 1)?)?;
    match high.first_order_skew() {
        Err(e) => println!("P_1 of order 3 is refused: {}", e),
        Ok(_) => unreachable!("extraction should refuse higher-order P_1"),
    }
    Ok(())
}

/// `T = id + h T_1` with the given arity-1 operator text.
fn equivalence(order: usize, dim: usize, t1: &str) -> dq::Result<EquivalenceOp> {
    let mut series = HbarSeries::constant(MultiDiffOp::identity(dim), order);
    series.set_coeff(1, parse::operator(t1, Some(dim))?);
    EquivalenceOp::new(dim, series)
}

//! Build the Moyal star product on R^2 and watch noncommutativity appear:
//! star products of coordinates, the canonical commutator, and exact
//! associativity at every truncation order.
//!
//! Run with: cargo run --example moyal_star

use dq::parse;
use dq::series::series_string;
use dq::{Polynomial, PolyVector, StarProduct};

fn main() -> dq::Result<()> {
    // alpha = d1 ^ d2, the standard symplectic bivector on R^2
    let alpha = parse::multivector("d1^d2", Some(2))?;
    println!("alpha      = {}", alpha);

    let star = StarProduct::moyal(&alpha, 4)?;
    println!("star order = {}", star.order());
    for k in 0..=2 {
        println!("P_{}        = {}", k, star.p_k(k));
    }

    let x1 = Polynomial::var(2, 1)?;
    let x2 = Polynomial::var(2, 2)?;

    let prod = star.apply_polys(&x1, &x2)?;
    println!("\nx1 * x2    = {}", series_string(&prod));

    // the canonical commutation relation, exactly
    let comm = star
        .apply_polys(&x1, &x2)?
        .sub(&star.apply_polys(&x2, &x1)?)?;
    println!("[x1, x2]   = {}", series_string(&comm));

    // second order: x1^2 * x2^2 picks up a real h^2 term
    let sq = star.apply_polys(&x1.pow(2), &x2.pow(2))?;
    println!("x1^2*x2^2  = {}", series_string(&sq));

    // associativity is exact, not approximate
    let f = x1.pow(2);
    let g = x2.clone();
    let h = x1.mul(&x2)?;
    let residual = star.associator_residual(&f, &g, &h)?;
    println!("\n(f*g)*h - f*(g*h) = {}", series_string(&residual));
    assert!(residual.is_zero());

    // the skew part of P_1 recovers i * alpha
    let skew: PolyVector = star.first_order_skew()?;
    println!("skew(P_1)  = {}", skew);
    Ok(())
}

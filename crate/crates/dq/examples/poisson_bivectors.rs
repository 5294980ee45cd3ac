//! Poisson calculus on bivectors: brackets, Hamiltonian vector fields,
//! the Jacobiator, and the self-bracket witness that decides whether a
//! bivector is Poisson.
//!
//! Run with: cargo run --example poisson_bivectors

use dq::parse;
use dq::polyvector::CovectorField;
use dq::Polynomial;

fn main() -> dq::Result<()> {
    let x = |i| Polynomial::var(3, i);

    // the standard symplectic bivector: {x1, x2} = 1
    let pi = parse::multivector("d1^d2", Some(3))?;
    println!("pi = {}", pi);
    println!("{{x1, x2}} = {}", pi.poisson_bracket(&x(1)?, &x(2)?)?);

    // the sharp map and Hamiltonian fields
    let df = CovectorField::differential(&x(1)?)?;
    println!("pi#(dx1)  = {}", pi.sharp(&df)?);
    let f = x(1)?.mul(&x(2)?)?;
    let xf = pi.hamiltonian_vf(&f)?;
    println!("X_(x1*x2) = {}", xf);
    // X_f(g) = {f, g}
    assert_eq!(xf.apply_to(&x(1)?)?, pi.poisson_bracket(&f, &x(1)?)?);

    // a bivector that fails the Jacobi identity
    let bad = parse::multivector("d1^d2 + x2*d2^d3", Some(3))?;
    println!("\npi' = {}", bad);
    let jac = bad.jacobiator(&x(1)?, &x(2)?, &x(3)?)?;
    println!("jacobiator(x1, x2, x3) = {}", jac);

    let (ok, witness) = bad.is_poisson()?;
    println!("is_poisson = {}, witness [pi', pi']_S = {}", ok, witness);
    assert!(!ok);

    // the witness pairs against differentials as twice the jacobiator
    let paired = witness.pair_with_differentials(&[x(1)?, x(2)?, x(3)?])?;
    println!("<witness, dx1 dx2 dx3> = {} (= 2 * jacobiator)", paired);

    // linear coefficients can still be Poisson: x1 d1^d2 on R^2
    let linear = parse::multivector("x1*d1^d2", Some(2))?;
    println!("\npi'' = {} on R^2: is_poisson = {}", linear, linear.is_poisson()?.0);
    Ok(())
}

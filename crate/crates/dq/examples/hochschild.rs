//! Multidifferential operators and the Hochschild complex: operator
//! application, the Gerstenhaber insertion product and bracket, and the
//! differential d = [m, .] with d o d = 0.
//!
//! Run with: cargo run --example hochschild

use dq::multidiff::MultiDiffOp;
use dq::parse;

fn main() -> dq::Result<()> {
    let op = |s: &str| parse::operator(s, Some(2));
    let p = |s: &str| parse::polynomial(s, Some(2));

    // operators apply by differentiating each slot
    let d1d2 = op("[ d1 | d2 ]")?;
    println!(
        "(d1 x d2)(x1*x2, x2) = {}",
        d1d2.apply(&[p("x1*x2")?, p("x2")?])?
    );

    // the multiplication cochain and the identity
    let m = MultiDiffOp::mult_op(2);
    let id = MultiDiffOp::identity(2);
    println!("m         = {}", m);
    println!("id o m    = {}", id.gerst_product(&m)?);
    println!("m o id    = {}", m.gerst_product(&id)?);

    // compositions expand by the Leibniz rule into canonical terms
    let d = op("x1 [ d1 | d2 ]")?;
    let e = op("[ d1 ]")?;
    println!("\nD         = {}", d);
    println!("D o E     = {}", d.gerst_product(&e)?);
    println!("[D, E]_G  = {}", d.gerst_bracket(&e)?);

    // the differential: derivations are closed, d(id) = m, and d^2 = 0
    println!("\nd(d1)     = {}", op("[ d1 ]")?.hochschild_d()?);
    println!("d(id)     = {}", id.hochschild_d()?);
    let sample = op("x2 [ d1 d1 | d2 ]")?;
    let once = sample.hochschild_d()?;
    let twice = once.hochschild_d()?;
    println!("d(D')     = {}", once);
    println!("d(d(D'))  = {}", twice);
    assert!(twice.is_zero());

    // associativity of the pointwise product, operator-style
    let mm = m.gerst_bracket(&m)?;
    println!("\n[m, m]_G  = {}", mm);
    assert!(mm.is_zero());

    // normalization: vanishing on constants slot by slot
    println!(
        "\nnormalized? {} -> {}, {} -> {}",
        d1d2,
        d1d2.is_normalized(),
        m,
        m.is_normalized()
    );
    Ok(())
}

//! The Hochschild-Kostant-Rosenberg map: multivectors become
//! antisymmetrized multiderivations that are always Hochschild cocycles;
//! the bracket is respected on vector fields, and in higher degrees the
//! defect is measured and checked to be closed.
//!
//! Run with: cargo run --example hkr

use dq::formality::{hkr_bracket_defect, hkr_chain_check, hkr_map, linfty_check, LInftyMapFamily};
use dq::parse;

fn main() -> dq::Result<()> {
    let mv = |s: &str| parse::multivector(s, Some(3));

    // vector fields map to themselves
    println!("hkr(d1)          = {}", hkr_map(&mv("d1")?)?);
    // bivectors antisymmetrize over the two slots
    println!("hkr(d1^d2)       = {}", hkr_map(&mv("d1^d2")?)?);
    let op = hkr_map(&mv("x3*d1^d2")?)?;
    println!(
        "hkr(x3 d1^d2)(x1, x2) = {}",
        op.apply(&[
            parse::polynomial("x1", Some(3))?,
            parse::polynomial("x2", Some(3))?
        ])?
    );

    // the image always lies in Hochschild cocycles
    for src in ["d1", "x3*d1^d2", "x1*x2*d1^d2^d3"] {
        let chain = hkr_chain_check(&mv(src)?)?;
        println!("d(hkr({})) = {}", src, chain);
        assert!(chain.is_zero());
    }

    // on vector fields the bracket is respected on the nose
    let r = hkr_bracket_defect(&mv("x2*d1")?, &mv("x1*d3")?)?;
    println!("\ndefect on vector fields = {}", r.defect);
    assert!(r.defect.is_zero());

    // two polynomial bivectors leave a nonzero but closed defect
    let r = hkr_bracket_defect(&mv("x1*d1^d2")?, &mv("x2*d2^d3")?)?;
    println!(
        "defect on bivectors: zero = {}, closed = {}",
        r.defect.is_zero(),
        r.closed
    );
    assert!(!r.defect.is_zero());
    assert!(r.closed);

    // the morphism conditions, sample by sample
    let family = LInftyMapFamily::hkr();
    let samples = vec![
        (mv("x2*d1")?, mv("d2")?),
        (mv("x1*d1^d2")?, mv("x2*d2^d3")?),
    ];
    for (pair, report) in samples.iter().zip(linfty_check(&family, &samples)?) {
        println!(
            "sample ({}, {}): antisymmetry {}, chain map {}, bracket compat {}",
            pair.0, pair.1, report.antisymmetry, report.chain_map, report.bracket_compat
        );
    }
    Ok(())
}

//! Drive the `dq` command line in-process: the same subcommands, flags,
//! JSON outputs and exit codes as the installed binary.
//!
//! Run with: cargo run --example cli_tour

fn dq(args: &[&str]) {
    let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let (code, out) = dq::cli::run_capture(&owned);
    println!("$ dq {}", args.join(" "));
    print!("{}", out);
    println!("(exit {})\n", code);
}

fn main() {
    // a check that fails exits 3 and reports the witness
    dq(&["poisson-check", "--dim", "3", "--bivector", "d1^d2 + x2*d2^d3"]);

    // Moyal star product applied to coordinates
    dq(&["moyal", "--alpha", "[[0,1],[-1,0]]", "--order", "2", "--f", "x1", "--g", "x2"]);

    // associativity as a shell predicate
    dq(&[
        "assoc-check", "--star", "moyal", "--alpha", "[[0,1],[-1,0]]", "--order", "4",
        "--f", "x1**2", "--g", "x2", "--h", "x1*x2",
    ]);

    // brackets, differentials, HKR
    dq(&["schouten", "--a", "d1^d2", "--b", "x1*d3", "--dim", "3"]);
    dq(&["hochschild-d", "--op", "[ ]", "--dim", "2"]);
    dq(&["hkr", "--multivector", "x3*d1^d2"]);

    // series-level machinery: BCH and the gauge flow
    dq(&["bch", "--x", "0: x2*d1", "--y", "0: d2", "--order", "2"]);
    dq(&["gauge", "--vf", "0: x1*d1", "--pi", "1: d1^d2", "--order", "3"]);

    // expression utilities: canonicalize, differentiate, evaluate
    dq(&[
        "parse", "--kind", "polynomial", "--expr", "(x1 + x2)**2",
        "--derive", "1", "--eval", "1/2, 1/4",
    ]);
}

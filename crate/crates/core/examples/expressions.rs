//! Parsing, printing, differentiation and evaluation of expressions.

use lieinv::expr::{differentiate, evaluate, parse, Assignment};

fn main() {
    let params = ["lambda", "gamma"];
    let text = "(x1*x4 - x2*x3)*exp((gamma - 2*lambda)*x1/x2)";
    let e = parse(text, 6, &params).unwrap();
    println!("parsed   {e}");
    for k in [0, 1] {
        println!("d/dx{}    {}", k + 1, differentiate(&e, k));
    }
    let a = Assignment::real(&[1.0, 2.0, 0.5, -1.0, 3.0, 4.0]).with_param("lambda", 0.5).with_param("gamma", 2.0);
    println!("value    {}", evaluate(&e, &a).unwrap());

    // complex intermediate values are fine
    let c = parse("(x4^2 + x5^2)*((x4 + i*x5)/(x4 - i*x5))^(i*p)", 6, &["p"]).unwrap();
    let a = Assignment::real(&[0.0, 0.0, 0.0, 1.0, 2.0, 0.0]).with_param("p", 0.3);
    println!("value    {}", evaluate(&c, &a).unwrap());

    for bad in ["x1 + * x2", "x7", "exp x1", "beta*x1"] {
        match parse(bad, 6, &params) {
            Ok(_) => unreachable!(),
            Err(err) => println!("{bad:<10} -> {err}"),
        }
    }
}

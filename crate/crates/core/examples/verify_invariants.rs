//! Checks the two printed invariants of g_{6,65} and a non-invariant.

use lieinv::catalog::{self, Catalog};
use lieinv::expr::parse;
use lieinv::verify::{self, VerifyConfig};

fn main() {
    let cat = Catalog::builtin();
    let entry = cat.get("g6_65").unwrap()[0];
    let inst = &catalog::instantiate(entry, 7).unwrap()[0];
    let exprs = entry.parse_invariants(&entry.invariants).unwrap();
    let report = verify::verify_fundamental_set(&inst.structure, &exprs, &inst.params(), &VerifyConfig::default()).unwrap();
    println!("g6_65 at {:?}: N = {}", inst.value_strings(), report.invariant_count);
    for r in &report.invariants {
        println!("  {} = {}  max residual {:.2e}  {:?}", r.expr_id, r.expr, r.max_residual(), r.verdict);
    }
    println!("  independence ranks {:?}, verdict {:?}", report.independence.ranks, report.verdict);

    let x1 = parse("x1", 6, &[]).unwrap();
    let r = verify::check_invariant(&inst.structure, &x1, &inst.params(), 20, 1e-8, 0).unwrap();
    println!("  x1: worst field X{}, residual {:.2e}  {:?}", r.worst_field().unwrap() + 1, r.max_residual(), r.verdict);
}

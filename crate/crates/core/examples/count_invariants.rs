//! Invariant counts from the generic rank of the commutator matrix.

use lieinv::algebra::StructureConstants;
use lieinv::catalog::{self, Catalog};
use lieinv::coadjoint;
use lieinv::rational::rat;

fn main() {
    let cat = Catalog::builtin();
    for key in ["g6_65", "g6_82[alpha=2]", "g6_84", "g6_99", "g6_1"] {
        let entry = cat.get(key).unwrap()[0];
        let inst = &catalog::instantiate(entry, 1).unwrap()[0];
        let (n, cert) = coadjoint::invariant_count_certificate(&inst.structure, 5, 0).unwrap();
        println!("{key:<16} rank {} N = {n}  values {:?}", cert.rank, inst.value_strings());
    }

    // Heisenberg algebra: one Casimir (the center)
    let mut h = StructureConstants::new(3);
    h.add_term(1, 2, 0, rat(1)).unwrap();
    println!("heisenberg       N = {}", coadjoint::invariant_count(&h, 5, 0).unwrap());

    let m = coadjoint::commutator_matrix(&h).unwrap();
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| m.entry(i, j).to_string()).collect();
        println!("  [{}]", row.join(", "));
    }
}

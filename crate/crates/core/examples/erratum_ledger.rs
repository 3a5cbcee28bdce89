//! Lists the entries that are not counted as verified, with the reason.

use lieinv::catalog::{Catalog, Status};
use std::collections::BTreeSet;

fn main() {
    let cat = Catalog::builtin();
    let mut flagged = BTreeSet::new();
    for e in cat.algebras.iter().filter(|e| e.status != Status::Verified) {
        flagged.insert(e.id.as_str());
        let fix = match (&e.repaired_brackets, &e.repaired_invariants) {
            (Some(_), _) => "brackets repaired",
            (None, Some(_)) => "invariants repaired",
            _ => "",
        };
        println!("{:<22} {:<16} {fix:<20} {}", e.key(), e.status.as_str(), e.note);
    }
    let ids: BTreeSet<&str> = cat.algebras.iter().map(|e| e.id.as_str()).collect();
    println!("{} of {} names have a non-verified entry", flagged.len(), ids.len());
}

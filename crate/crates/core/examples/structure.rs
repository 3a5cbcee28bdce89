//! Structure constants, the Jacobi identity and the derived and lower
//! central series.

use lieinv::algebra::{self, StructureConstants};
use lieinv::rational::rat;

fn series(sc: &StructureConstants) -> (Vec<usize>, Vec<usize>) {
    let d = algebra::derived_series(sc).unwrap().iter().map(|s| s.dim()).collect();
    let l = algebra::lower_central_series(sc).unwrap().iter().map(|s| s.dim()).collect();
    (d, l)
}

fn main() {
    // g_{5,1} ⊕ ⟨X6⟩ with X6 acting diagonally
    let mut g = StructureConstants::new(6);
    g.add_term(2, 4, 0, rat(1)).unwrap();
    g.add_term(3, 4, 1, rat(1)).unwrap();
    for (i, w) in [(0, 1), (1, 1), (2, 2), (3, 2), (4, -1)] {
        g.add_term(i, 5, i, rat(w)).unwrap();
    }
    println!("{g}");
    println!("jacobi violations: {}", algebra::validate_jacobi(&g).len());
    let (d, l) = series(&g);
    println!("derived {d:?}  lower central {l:?}");
    println!("solvable {}  nilpotent {}", algebra::is_solvable(&g).unwrap(), algebra::is_nilpotent(&g).unwrap());

    // change one weight and the identity breaks
    let mut bad = g.clone();
    bad.add_term(0, 5, 0, rat(1)).unwrap();
    for v in algebra::validate_jacobi(&bad) {
        println!("violation {v}");
    }
}

//! Extensions of the deformed Heisenberg algebras n_α: the determinant
//! identity and the 0-or-2 dichotomy.

use lieinv::families;
use lieinv::rational::format_rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 2..=4 {
        for want in [true, false] {
            let input = families::random_theorem3(m, None, Some(want), &mut rng).unwrap();
            let sc = families::build_theorem3(&input).unwrap();
            let d = families::check_theorem3_dichotomy(&input, 0).unwrap();
            let det = families::check_det_identity(&sc, m, 10, 0).unwrap();
            let alphas: Vec<String> = input.alphas.iter().map(format_rational).collect();
            println!(
                "m={m} alphas [{}] case {} N {} det identity {} (x1 invariant: {})",
                alphas.join(","),
                d.case,
                d.invariant_count,
                det.holds,
                d.center_invariant_passes
            );
        }
    }
    // a violated constraint is refused before any Jacobi check
    let bad = [1, 1, 0, 1].map(lieinv::rational::rat);
    println!("{}", families::theorem3_nilradical(3, &bad).unwrap_err());
}

//! Random solvable extensions of g_{2m} ⊕ 𝕂: the count is always 2m − 2.

use lieinv::families;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 2..=5 {
        for _ in 0..3 {
            let input = families::random_theorem2(m, &mut rng).unwrap();
            let r = families::check_theorem2_count(&input, 0).unwrap();
            let diag: Vec<String> = (0..2 * m + 1).map(|i| input.derivation[i][i].to_string()).collect();
            println!("m={m} dim {:>2} rank {} N {} (2m-2 = {})  diag D = [{}]", r.dim, r.generic_rank, r.computed, r.expected, diag.join(", "));
        }
    }
}

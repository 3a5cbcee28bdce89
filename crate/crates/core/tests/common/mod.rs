//! Oracles shared by the integration tests. They use only the public
//! evaluation API, never the verifier.
#![allow(dead_code)]

use lieinv::catalog::{self, Catalog};
use lieinv::expr::{differentiate, evaluate, parse, sample_point_with, Assignment, Expr};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fd_partial(e: &Expr, a: &Assignment, k: usize, h: f64) -> Option<Complex64> {
    let mut p = a.clone();
    p.point[k] += h;
    let up = evaluate(e, &p).ok()?;
    p.point[k] -= 2.0 * h;
    let down = evaluate(e, &p).ok()?;
    Some((up - down) / (2.0 * h))
}

/// Central differences against the symbolic partials for every catalog
/// expression: `(partials compared, failures)`.
pub fn derivative_mismatches(points: usize, h: f64, rel: f64) -> (usize, Vec<String>) {
    let cat = Catalog::builtin();
    let mut bad = Vec::new();
    let mut checked = 0;
    for (key, text, names) in catalog::all_expressions(&cat) {
        let entry = cat.get(&key).unwrap()[0];
        let inst = &catalog::instantiate(entry, 99).unwrap()[0];
        let params = inst.params();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let e = parse(&text, 6, &refs).unwrap();
        let partials: Vec<Expr> = (0..6).map(|k| differentiate(&e, k)).collect();
        let mut avoid = e.singular_subexpressions();
        avoid.extend(partials.iter().flat_map(Expr::singular_subexpressions));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..points {
            let a = sample_point_with(6, &avoid, &params, &mut rng, 1e-2).unwrap();
            for (k, d) in partials.iter().enumerate() {
                let sym = evaluate(d, &a).unwrap();
                let Some(fd) = fd_partial(&e, &a, k, h) else { continue };
                checked += 1;
                let err = (sym - fd).norm() / sym.norm().max(1.0);
                if err > rel {
                    bad.push(format!("{key} {text} d/dx{}: symbolic {sym} fd {fd}", k + 1));
                }
            }
        }
    }
    (checked, bad)
}

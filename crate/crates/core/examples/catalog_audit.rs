//! Audits every catalog entry and prints one line per entry.
//!
//! Set `LIEINV_CATALOG` to audit a different catalog file.

use lieinv::catalog::{self, AuditConfig, Outcome};

fn main() {
    let cat = catalog::load_default().expect("catalog");
    let entries: Vec<_> = cat.algebras.iter().collect();
    let audits = catalog::audit(&cat, &entries, &AuditConfig::default());
    for a in &audits {
        let counts: Vec<String> = a.invariant_counts.iter().map(|c| c.to_string()).collect();
        let mut line = format!("{:<22} {:<12} N={}", a.key, format!("{:?}", a.outcome), counts.join(","));
        if let Some(r) = a.repaired_pass {
            line += &format!(" repaired={r}");
        }
        if let Some(e) = &a.error {
            line += &format!(" error={e}");
        }
        // first failing instantiation only
        let failing = a.instances.iter().find_map(|i| i.printed.as_ref().filter(|p| !p.verdict.passed()).map(|p| (i, p)));
        if let Some((inst, p)) = failing {
            let bad: Vec<String> = p
                .invariants
                .iter()
                .filter(|r| !r.verdict.passed())
                .map(|r| format!("{}:{:.1e}", r.expr_id, r.max_residual()))
                .collect();
            line += &format!(" printed fails at {:?} [{}]", inst.values, bad.join(" "));
        }
        println!("{line}");
    }
    let pass = audits.iter().filter(|a| a.outcome == Outcome::Pass).count();
    let q = audits.iter().filter(|a| a.outcome == Outcome::Quarantined).count();
    println!("pass {pass}, fail {}, quarantined {q}", audits.len() - pass - q);
}

//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so that every line is printed.

mod common;

use lieinv::catalog::{self, AuditConfig, Catalog, EntryAudit, Outcome, Status};
use lieinv::coadjoint;
use lieinv::expr::{parse, Expr};
use lieinv::families;
use lieinv::verify::{self, VerifyConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

const DRAWS: usize = 3;
const TRIALS: usize = 5;
const POINTS: usize = 20;
const TOL: f64 = 1e-8;
const INTEGRITY_BUDGET: Duration = Duration::from_secs(30);
const COUNT_BUDGET: Duration = Duration::from_secs(60);
const SWEEP_BUDGET: Duration = Duration::from_secs(30);
const MIN_COVERED: usize = 85;
const ALGEBRAS: usize = 99;
const DET_POINTS: usize = 10;
const DICHOTOMY_INSTANCES: usize = 10;
const FD_STEP: f64 = 1e-6;
const FD_REL: f64 = 1e-5;
const FD_POINTS: usize = 10;
const NEGATIVE_RESIDUAL: f64 = 1e-3;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Ctx {
    cat: Catalog,
    audits: Vec<EntryAudit>,
}

impl Ctx {
    fn entry_keys(&self, status: Status) -> Vec<&EntryAudit> {
        self.audits.iter().filter(|a| a.status == status).collect()
    }
}

fn integrity(ctx: &Ctx) -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut printed_broken = BTreeSet::new();
    let mut checked = 0;
    for entry in &ctx.cat.algebras {
        for inst in catalog::instantiations(entry, DRAWS, 0).unwrap() {
            let r = catalog::check_integrity(&ctx.cat, entry, &inst).unwrap();
            checked += 1;
            if !r.passed() {
                bad.push(entry.key());
            }
            if !r.printed_jacobi_violations.is_empty() {
                printed_broken.insert(entry.key());
            }
        }
    }
    let elapsed = start.elapsed();
    bad.dedup();
    verdict(
        bad.is_empty() && elapsed < INTEGRITY_BUDGET,
        format!(
            "{checked} instantiations, failing {bad:?}, printed brackets repaired in {printed_broken:?}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn counts(ctx: &Ctx) -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut counts_by_key: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for entry in &ctx.cat.algebras {
        for (n, inst) in catalog::instantiations(entry, DRAWS, 0).unwrap().iter().enumerate() {
            let c = coadjoint::invariant_count(&inst.structure, TRIALS, n as u64).unwrap();
            if !c.is_multiple_of(2) {
                problems.push(format!("{} has odd N = {c}", entry.key()));
            }
            if entry.status == Status::Verified && c != entry.invariants.len() {
                problems.push(format!("{}: N = {c}, {} printed", entry.key(), entry.invariants.len()));
            }
            counts_by_key.entry(entry.key()).or_default().insert(c);
        }
    }
    let anchor = |key: &str, n: usize, problems: &mut Vec<String>| {
        let got = counts_by_key.get(key).cloned().unwrap_or_default();
        if got != BTreeSet::from([n]) {
            problems.push(format!("{key}: N = {got:?}, expected {n}"));
        }
    };
    anchor("g6_65", 2, &mut problems);
    for key in ["g6_82[alpha=2]", "g6_85", "g6_86", "g6_87", "g6_99"] {
        anchor(key, 0, &mut problems);
    }
    let abelian: Vec<_> = ctx.cat.algebras.iter().filter(|e| e.nilradical == "5g1").map(|e| e.key()).collect();
    for key in &abelian {
        anchor(key, 4, &mut problems);
    }
    if abelian.len() != 12 {
        problems.push(format!("{} abelian-nilradical entries", abelian.len()));
    }
    let elapsed = start.elapsed();
    verdict(
        problems.is_empty() && elapsed < COUNT_BUDGET,
        format!(
            "{} entries, {} verified; problems {problems:?}; {:.1}s",
            counts_by_key.len(),
            ctx.entry_keys(Status::Verified).len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn annihilation(ctx: &Ctx) -> Verdict {
    let mut failing = Vec::new();
    let mut checks = 0;
    for a in ctx.entry_keys(Status::Verified) {
        for inst in &a.instances {
            let Some(r) = &inst.printed else {
                failing.push(format!("{} not checked", a.key));
                continue;
            };
            for i in &r.invariants {
                checks += 1;
                if !i.verdict.passed() || i.points_used < POINTS {
                    failing.push(format!("{} {} {:.1e}", a.key, i.expr_id, i.max_residual()));
                }
            }
        }
    }
    // the worked example, at fresh parameter values
    let entry = ctx.cat.get("g6_65").unwrap()[0];
    let example = ["x2*exp(-lambda*x1/x2)", "(x1*x4 - x2*x3)*exp((gamma - 2*lambda)*x1/x2)"];
    let mut example_ok = entry.invariants == example;
    for inst in catalog::instantiations(entry, DRAWS, 17).unwrap() {
        for text in example {
            let e = parse(text, 6, &["lambda", "gamma"]).unwrap();
            let r = verify::check_invariant(&inst.structure, &e, &inst.params(), POINTS, TOL, 3).unwrap();
            example_ok &= r.verdict.passed();
        }
    }
    failing.dedup();
    verdict(
        failing.is_empty() && example_ok,
        format!("{checks} invariant checks, failing {failing:?}; g6_65 example pair passes: {example_ok}"),
    )
}

fn independence(ctx: &Ctx) -> Verdict {
    let mut failing = Vec::new();
    for a in ctx.entry_keys(Status::Verified) {
        for inst in &a.instances {
            if let Some(r) = &inst.printed {
                let sampled = r.invariant_count == 0 || r.independence.ranks.len() >= POINTS;
                if r.independence.modal_rank != r.invariant_count || !r.independence.verdict.passed() || !sampled {
                    failing.push(format!("{} modal rank {} N {}", a.key, r.independence.modal_rank, r.invariant_count));
                }
            }
        }
    }
    failing.dedup();
    verdict(failing.is_empty(), format!("failing {failing:?}"))
}

fn ledger(ctx: &Ctx) -> Verdict {
    let flagged: Vec<&EntryAudit> = ctx.audits.iter().filter(|a| a.status != Status::Verified).collect();
    let quarantined = flagged.iter().all(|a| a.outcome == Outcome::Quarantined && a.reason.is_some());
    let blank_listed = flagged.iter().any(|a| a.id == "g6_34" && a.status == Status::PaperBlank);
    let mut ids: BTreeMap<&str, bool> = BTreeMap::new();
    for a in ctx.audits.iter().filter(|a| !a.id.ends_with('*')) {
        let ok = a.status == Status::Verified && a.outcome == Outcome::Pass;
        *ids.entry(a.id.as_str()).or_insert(true) &= ok;
    }
    let covered = ids.values().filter(|v| **v).count();
    let keys: Vec<&str> = flagged.iter().map(|a| a.key.as_str()).collect();
    verdict(
        quarantined && blank_listed && covered >= MIN_COVERED,
        format!(
            "{} flagged entries {keys:?}; all quarantined with a reason: {quarantined}; g6_34 listed: {blank_listed}; \
             verified coverage {covered} of {} names (need {MIN_COVERED} of {ALGEBRAS})",
            flagged.len(),
            ids.len()
        ),
    )
}

fn chain_sweep() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut rows = Vec::new();
    let mut ok = true;
    for m in 2..=5 {
        for _ in 0..3 {
            let input = families::random_theorem2(m, &mut rng).unwrap();
            let r = families::check_theorem2_count(&input, m as u64).unwrap();
            ok &= r.generic_rank == 4 && r.computed == 2 * m - 2 && r.hypothesis_holds;
            rows.push(format!("m={m}:rank {} N {}", r.generic_rank, r.computed));
        }
    }
    let elapsed = start.elapsed();
    verdict(ok && elapsed < SWEEP_BUDGET, format!("{}; {:.1}s", rows.join(", "), elapsed.as_secs_f64()))
}

fn det_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ok = true;
    let mut rows = Vec::new();
    for m in 2..=4 {
        for want in [Some(true), Some(false), None] {
            let input = families::random_theorem3(m, None, want, &mut rng).unwrap();
            let sc = families::build_theorem3(&input).unwrap();
            let r = families::check_det_identity(&sc, m, DET_POINTS, m as u64).unwrap();
            ok &= r.holds && r.points.len() == DET_POINTS;
            rows.push(format!("m={m}:{}", r.holds));
        }
    }
    verdict(ok, format!("exact at {DET_POINTS} points each: {}", rows.join(", ")))
}

fn dichotomy() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = true;
    let mut tally = BTreeMap::new();
    for m in 2..=3 {
        for n in 0..DICHOTOMY_INSTANCES {
            let input = families::random_theorem3(m, None, Some(n % 2 == 0), &mut rng).unwrap();
            let r = families::check_theorem3_dichotomy(&input, n as u64).unwrap();
            let expected = if families::acts_on_x1(&input.derivation) { 0 } else { 2 };
            ok &= r.invariant_count == expected && (expected == 0 || r.center_invariant_passes);
            *tally.entry((m, r.case, r.invariant_count)).or_insert(0) += 1;
        }
    }
    let summary: Vec<String> = tally.iter().map(|((m, c, n), k)| format!("m={m} case {c} N={n} x{k}")).collect();
    verdict(ok, summary.join(", "))
}

fn derivatives() -> Verdict {
    let (checked, bad) = common::derivative_mismatches(FD_POINTS, FD_STEP, FD_REL);
    verdict(bad.is_empty() && checked > 0, format!("{checked} partials compared, {} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()))
}

fn negative_controls(ctx: &Ctx) -> Verdict {
    let x = |k: usize| Expr::var(k);
    let entry = ctx.cat.get("g6_65").unwrap()[0];
    let inst = &catalog::instantiate(entry, 5).unwrap()[0];
    let r = verify::check_invariant(&inst.structure, &x(0), &inst.params(), POINTS, TOL, 0).unwrap();
    let x1_fails = !r.verdict.passed() && r.max_residual() > NEGATIVE_RESIDUAL;
    let mut survivors = Vec::new();
    let mut zero_count = 0;
    for entry in &ctx.cat.algebras {
        for inst in catalog::instantiate(entry, 6).unwrap() {
            if coadjoint::invariant_count(&inst.structure, TRIALS, 0).unwrap() != 0 {
                continue;
            }
            zero_count += 1;
            for k in 0..6 {
                let r = verify::check_invariant(&inst.structure, &x(k), &inst.params(), POINTS, TOL, k as u64).unwrap();
                if r.verdict.passed() {
                    survivors.push(format!("{} x{}", entry.key(), k + 1));
                }
            }
        }
    }
    verdict(
        x1_fails && survivors.is_empty() && zero_count > 0,
        format!(
            "g6_65 x1 residual {:.2e}; {zero_count} instantiations with N = 0, coordinates passing {survivors:?}",
            r.max_residual()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let cat = catalog::load_default().expect("catalog loads");
    let entries: Vec<_> = cat.algebras.iter().collect();
    let config = AuditConfig { draws: DRAWS, verify: VerifyConfig { points: POINTS, tol: TOL, trials: TRIALS, seed: 0 } };
    let audits = catalog::audit(&cat, &entries, &config);
    let ctx = Ctx { cat, audits };
    println!("audit of {} entries in {:.1}s", ctx.audits.len(), start.elapsed().as_secs_f64());

    let criteria: Vec<Criterion> = vec![
        ("catalog integrity", Box::new(|| integrity(&ctx))),
        ("invariant counts", Box::new(|| counts(&ctx))),
        ("annihilation", Box::new(|| annihilation(&ctx))),
        ("functional independence", Box::new(|| independence(&ctx))),
        ("erratum ledger and coverage", Box::new(|| ledger(&ctx))),
        ("chain family count sweep", Box::new(chain_sweep)),
        ("determinant identity", Box::new(det_identity)),
        ("center action dichotomy", Box::new(dichotomy)),
        ("derivative oracle", Box::new(derivatives)),
        ("negative controls", Box::new(|| negative_controls(&ctx))),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {:>2} {:<28} {}  {}", n + 1, name, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        if !v.ok {
            failed.push(n + 1);
        }
    }
    println!("{} of {} criteria pass; failing {failed:?}", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

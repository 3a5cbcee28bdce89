//! The six-dimensional solvable algebras with five-dimensional nilradical,
//! their parameter constraints and their listed invariants.
//!
//! The data lives in `data/catalog.json` and is compiled into the crate;
//! `LIEINV_CATALOG` points [`load_default`] at another file. Rows printed
//! with several parameter regimes are separate entries sharing an `id` and
//! told apart by `regime`; [`CatalogEntry::key`] is unique.

use crate::algebra::{self, AlgebraError, JacobiViolation, StructureConstants, Subspace};
use crate::expr::{self, Expr};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::verify::{self, EntryReport, Params, VerifyConfig};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const BUILTIN_JSON: &str = include_str!("../data/catalog.json");
pub const CATALOG_ENV: &str = "LIEINV_CATALOG";
pub const MAX_ATTEMPTS: usize = 1000;
pub const DEFAULT_DRAWS: usize = 3;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed catalog: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{row}: {message}")]
    Schema { row: String, message: String },
    #[error("{entry}: {message}")]
    Constraint { entry: String, message: String },
    #[error("{entry}: no admissible parameter values after {attempts} attempts")]
    Unsatisfiable { entry: String, attempts: usize },
    #[error("no catalog entry matches '{0}'")]
    UnknownEntry(String),
    #[error("{entry}: {source}")]
    Algebra { entry: String, source: AlgebraError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
}

/// `[X_i, X_j] = Σ_k coeffs[k] X_k`, one-based, coefficients in the
/// expression grammar over the entry's parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    ErratumSuspect,
    PaperBlank,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::ErratumSuspect => "erratum-suspect",
            Status::PaperBlank => "paper-blank",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilradicalSpec {
    pub id: String,
    pub name: String,
    pub dim: usize,
    pub brackets: Vec<BracketSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub nilradical: String,
    #[serde(default)]
    pub regime: Option<String>,
    #[serde(default)]
    pub params: Vec<ParameterSpec>,
    pub brackets: Vec<BracketSpec>,
    #[serde(default)]
    pub invariants: Vec<String>,
    pub status: Status,
    #[serde(default)]
    pub note: String,
    /// Brackets that satisfy the Jacobi identity when the printed ones do not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repaired_brackets: Option<Vec<BracketSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repaired_invariants: Option<Vec<String>>,
    /// One-based images of `X1..X5` in the nilradical's standard basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nilradical_relabel: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub nilradicals: Vec<NilradicalSpec>,
    pub algebras: Vec<CatalogEntry>,
}

impl CatalogEntry {
    /// `id` or `id[regime]`.
    pub fn key(&self) -> String {
        match &self.regime {
            Some(r) => format!("{}[{}]", self.id, r),
            None => self.id.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        6
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &str> {
        self.params.iter().flat_map(|p| p.constraints.iter().map(String::as_str))
    }

    pub fn is_none_row(&self) -> bool {
        self.invariants.is_empty() && self.status != Status::PaperBlank
    }

    /// Brackets actually used for computation.
    pub fn effective_brackets(&self) -> &[BracketSpec] {
        self.repaired_brackets.as_deref().unwrap_or(&self.brackets)
    }

    pub fn effective_invariants(&self) -> &[String] {
        self.repaired_invariants.as_deref().unwrap_or(&self.invariants)
    }

    pub fn parse_invariants(&self, texts: &[String]) -> Result<Vec<(String, Expr)>, CatalogError> {
        let names = self.param_names();
        texts
            .iter()
            .enumerate()
            .map(|(n, t)| {
                expr::parse(t, self.dim(), &names)
                    .map(|e| (format!("I{}", n + 1), e))
                    .map_err(|e| self.schema(format!("invariant '{t}': {e}")))
            })
            .collect()
    }

    fn schema(&self, message: String) -> CatalogError {
        CatalogError::Schema { row: self.key(), message }
    }

    fn validate(&self) -> Result<(), CatalogError> {
        let names = self.param_names();
        for (n, p) in self.params.iter().enumerate() {
            if names[..n].contains(&p.name.as_str()) {
                return Err(self.schema(format!("parameter '{}' declared twice", p.name)));
            }
            match p.kind {
                ParamKind::Discrete if p.values.is_empty() => {
                    return Err(self.schema(format!("discrete parameter '{}' without values", p.name)))
                }
                ParamKind::Discrete => {
                    if let Some(v) = p.values.iter().find(|v| parse_rational(v).is_none()) {
                        return Err(self.schema(format!("value '{v}' of '{}' is not rational", p.name)));
                    }
                }
                ParamKind::Continuous => {
                    for c in &p.constraints {
                        Constraint::parse(c, &names).map_err(|m| self.schema(m))?;
                    }
                }
            }
        }
        for list in std::iter::once(&self.brackets).chain(self.repaired_brackets.iter()) {
            for b in list {
                if b.i == 0 || b.j == 0 || b.i > 6 || b.j > 6 || b.i == b.j {
                    return Err(self.schema(format!("bad bracket indices ({}, {})", b.i, b.j)));
                }
                for (k, c) in &b.coeffs {
                    if !matches!(k.parse::<usize>(), Ok(1..=6)) {
                        return Err(self.schema(format!("bad basis index '{k}'")));
                    }
                    let e = expr::parse(c, 0, &names).map_err(|e| self.schema(format!("coefficient '{c}': {e}")))?;
                    if let Some(bad) = e.params().into_iter().find(|p| !names.contains(&p.as_str())) {
                        return Err(self.schema(format!("undeclared parameter '{bad}'")));
                    }
                }
            }
        }
        self.parse_invariants(&self.invariants)?;
        if let Some(r) = &self.repaired_invariants {
            self.parse_invariants(r)?;
        }
        if let Some(perm) = &self.nilradical_relabel {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != [1, 2, 3, 4, 5] {
                return Err(self.schema("nilradical_relabel must permute 1..5".into()));
            }
        }
        Ok(())
    }
}

/// Structure constants from bracket records with every parameter bound.
pub fn build_structure(
    dim: usize,
    brackets: &[BracketSpec],
    values: &BTreeMap<String, Rational>,
) -> Result<StructureConstants, String> {
    let names: Vec<&str> = values.keys().map(String::as_str).collect();
    let mut sc = StructureConstants::new(dim);
    for b in brackets {
        if b.i == 0 || b.j == 0 || b.i > dim || b.j > dim {
            return Err(format!("bracket [X{}, X{}] outside X1..X{dim}", b.i, b.j));
        }
        for (k, c) in &b.coeffs {
            let k: usize = k.parse().ok().filter(|k| (1..=dim).contains(k)).ok_or_else(|| format!("bad basis index '{k}'"))?;
            let e = expr::parse(c, 0, &names).map_err(|e| e.to_string())?;
            let v = e.eval_rational(values).map_err(|e| e.to_string())?;
            sc.add_term(b.i - 1, b.j - 1, k - 1, v).map_err(|e| e.to_string())?;
        }
    }
    Ok(sc)
}

impl NilradicalSpec {
    pub fn structure(&self) -> StructureConstants {
        build_structure(self.dim, &self.brackets, &BTreeMap::new()).expect("nilradical brackets are constant")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Cmp {
    fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
            Cmp::Eq => a == b,
            Cmp::Ne => a != b,
        }
    }
}

/// A chained comparison such as `0 < abs(delta) <= abs(gamma) < 1`,
/// or the literal `true`. `abs(..)` may wrap a whole operand.
#[derive(Debug, Clone)]
pub struct Constraint {
    operands: Vec<(Expr, bool)>,
    ops: Vec<Cmp>,
}

impl Constraint {
    pub fn parse(text: &str, params: &[&str]) -> Result<Constraint, String> {
        if text.trim() == "true" {
            return Ok(Constraint { operands: vec![], ops: vec![] });
        }
        let bytes = text.as_bytes();
        let mut pieces = Vec::new();
        let mut ops = Vec::new();
        let (mut depth, mut start, mut i) = (0i32, 0, 0);
        while i < bytes.len() {
            let two = text.get(i..i + 2).unwrap_or("");
            let op = match (bytes[i], two) {
                (b'(', _) => {
                    depth += 1;
                    None
                }
                (b')', _) => {
                    depth -= 1;
                    None
                }
                _ if depth > 0 => None,
                (_, "<=") => Some((Cmp::Le, 2)),
                (_, ">=") => Some((Cmp::Ge, 2)),
                (_, "!=") => Some((Cmp::Ne, 2)),
                (_, "==") => Some((Cmp::Eq, 2)),
                (b'<', _) => Some((Cmp::Lt, 1)),
                (b'>', _) => Some((Cmp::Gt, 1)),
                (b'=', _) => Some((Cmp::Eq, 1)),
                _ => None,
            };
            if let Some((op, width)) = op {
                pieces.push(&text[start..i]);
                ops.push(op);
                i += width;
                start = i;
            } else {
                i += 1;
            }
        }
        pieces.push(&text[start..]);
        if ops.is_empty() {
            return Err(format!("constraint '{text}' has no comparison"));
        }
        let operands = pieces
            .into_iter()
            .map(|p| {
                let p = p.trim();
                let inner = p.strip_prefix("abs(").and_then(|r| r.strip_suffix(')'));
                let (src, abs) = match inner {
                    Some(inner) if expr::parse(inner, 0, params).is_ok() => (inner, true),
                    _ => (p, false),
                };
                let e = expr::parse(src, 0, params).map_err(|e| format!("constraint '{text}': {e}"))?;
                Ok((e, abs))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Constraint { operands, ops })
    }

    pub fn holds(&self, values: &BTreeMap<String, Rational>) -> Result<bool, String> {
        let vals = self
            .operands
            .iter()
            .map(|(e, abs)| {
                let v = e.eval_rational(values).map_err(|e| e.to_string())?;
                Ok(if *abs { v.abs() } else { v })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(self.ops.iter().enumerate().all(|(n, op)| op.holds(&vals[n], &vals[n + 1])))
    }
}

/// Parameter values for one entry and the resulting algebra.
#[derive(Debug, Clone)]
pub struct Instantiation {
    pub entry_key: String,
    pub values: BTreeMap<String, Rational>,
    pub structure: StructureConstants,
}

impl Instantiation {
    pub fn params(&self) -> Params {
        self.values.iter().map(|(k, v)| (k.clone(), Complex64::new(crate::rational::to_f64(v), 0.0))).collect()
    }

    pub fn value_strings(&self) -> BTreeMap<String, String> {
        self.values.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect()
    }
}

fn fnv(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

/// Seed for an entry, independent of its position in the catalog.
pub fn entry_seed(entry: &CatalogEntry, seed: u64) -> u64 {
    fnv(&entry.key()) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn random_value(rng: &mut ChaCha8Rng) -> Rational {
    let b: i64 = rng.gen_range(50..=100);
    let a = loop {
        let a = rng.gen_range(-2 * b..=2 * b);
        if a != 0 {
            break a;
        }
    };
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// All permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let cat: Catalog = serde_json::from_str(text)?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn builtin() -> Catalog {
        Catalog::from_json(BUILTIN_JSON).expect("the shipped catalog is well formed")
    }

    fn validate(&self) -> Result<(), CatalogError> {
        for n in &self.nilradicals {
            for b in &n.brackets {
                if b.coeffs.values().any(|c| parse_rational(c).is_none()) {
                    return Err(CatalogError::Schema { row: n.id.clone(), message: "non-constant bracket".into() });
                }
            }
            let sc = build_structure(n.dim, &n.brackets, &BTreeMap::new())
                .map_err(|message| CatalogError::Schema { row: n.id.clone(), message })?;
            if !algebra::validate_jacobi(&sc).is_empty() || !algebra::is_nilpotent(&sc).unwrap_or(false) {
                return Err(CatalogError::Schema { row: n.id.clone(), message: "not a nilpotent Lie algebra".into() });
            }
        }
        let mut keys = std::collections::BTreeSet::new();
        for e in &self.algebras {
            if !keys.insert(e.key()) {
                return Err(e.schema("duplicate entry".into()));
            }
            if self.nilradical(&e.nilradical).is_none() {
                return Err(e.schema(format!("unknown nilradical '{}'", e.nilradical)));
            }
            e.validate()?;
        }
        Ok(())
    }

    pub fn nilradical(&self, id: &str) -> Option<&NilradicalSpec> {
        self.nilradicals.iter().find(|n| n.id == id)
    }

    /// Entries whose key equals `query`, or all regimes of id `query`.
    pub fn find(&self, query: &str) -> Vec<&CatalogEntry> {
        let exact: Vec<_> = self.algebras.iter().filter(|e| e.key() == query).collect();
        if !exact.is_empty() {
            return exact;
        }
        self.algebras.iter().filter(|e| e.id == query).collect()
    }

    pub fn get(&self, query: &str) -> Result<Vec<&CatalogEntry>, CatalogError> {
        let found = self.find(query);
        if found.is_empty() { Err(CatalogError::UnknownEntry(query.to_string())) } else { Ok(found) }
    }

    /// Distinct algebra names.
    pub fn algebra_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.algebras.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })?;
    Catalog::from_json(&text)
}

/// The file named by `LIEINV_CATALOG`, else the compiled-in catalog.
pub fn load_default() -> Result<Catalog, CatalogError> {
    match std::env::var_os(CATALOG_ENV) {
        Some(p) if !p.is_empty() => load_catalog(p),
        _ => Ok(Catalog::builtin()),
    }
}

fn check_constraints(entry: &CatalogEntry, values: &BTreeMap<String, Rational>) -> Result<bool, CatalogError> {
    let names = entry.param_names();
    for c in entry.constraints() {
        let parsed = Constraint::parse(c, &names).map_err(|m| entry.schema(m))?;
        let ok = parsed.holds(values).map_err(|message| CatalogError::Constraint { entry: entry.key(), message })?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Instantiates with explicit values for every parameter.
pub fn instantiate_with(entry: &CatalogEntry, values: BTreeMap<String, Rational>) -> Result<Instantiation, CatalogError> {
    for p in &entry.params {
        let Some(v) = values.get(&p.name) else {
            return Err(CatalogError::Constraint { entry: entry.key(), message: format!("no value for '{}'", p.name) });
        };
        if p.kind == ParamKind::Discrete && !p.values.iter().any(|s| parse_rational(s).as_ref() == Some(v)) {
            return Err(CatalogError::Constraint {
                entry: entry.key(),
                message: format!("{} = {} is not one of {{{}}}", p.name, format_rational(v), p.values.join(", ")),
            });
        }
    }
    if let Some(extra) = values.keys().find(|k| !entry.param_names().contains(&k.as_str())) {
        return Err(CatalogError::Constraint { entry: entry.key(), message: format!("unknown parameter '{extra}'") });
    }
    if !check_constraints(entry, &values)? {
        return Err(CatalogError::Constraint {
            entry: entry.key(),
            message: format!("values violate {}", entry.constraints().collect::<Vec<_>>().join(", ")),
        });
    }
    let structure = build_structure(entry.dim(), entry.effective_brackets(), &values)
        .map_err(|message| CatalogError::Constraint { entry: entry.key(), message })?;
    Ok(Instantiation { entry_key: entry.key(), values, structure })
}

/// All combinations of the discrete parameters.
pub fn discrete_combinations(entry: &CatalogEntry) -> Vec<BTreeMap<String, Rational>> {
    let mut combos = vec![BTreeMap::new()];
    for p in entry.params.iter().filter(|p| p.kind == ParamKind::Discrete) {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                p.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.insert(p.name.clone(), parse_rational(v).expect("validated"));
                    c
                })
            })
            .collect();
    }
    combos
}

/// Draws the continuous parameters by rejection sampling, with the
/// discrete ones fixed to `fixed`. Each attempt also tries every
/// reassignment of the drawn values among the continuous parameters, so
/// ordering constraints are met quickly.
pub fn instantiate_fixed(
    entry: &CatalogEntry,
    fixed: &BTreeMap<String, Rational>,
    seed: u64,
) -> Result<Instantiation, CatalogError> {
    let continuous: Vec<&str> =
        entry.params.iter().filter(|p| p.kind == ParamKind::Continuous).map(|p| p.name.as_str()).collect();
    let perms = if continuous.len() <= 5 { permutations(continuous.len()) } else { vec![(0..continuous.len()).collect()] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let draw: Vec<Rational> = continuous.iter().map(|_| random_value(&mut rng)).collect();
        for perm in &perms {
            let mut values = fixed.clone();
            for (name, &src) in continuous.iter().zip(perm) {
                values.insert(name.to_string(), draw[src].clone());
            }
            if check_constraints(entry, &values)? {
                let structure = build_structure(entry.dim(), entry.effective_brackets(), &values)
                    .map_err(|message| CatalogError::Constraint { entry: entry.key(), message })?;
                return Ok(Instantiation { entry_key: entry.key(), values, structure });
            }
        }
    }
    Err(CatalogError::Unsatisfiable { entry: entry.key(), attempts: MAX_ATTEMPTS })
}

/// One random draw per discrete combination.
pub fn instantiate(entry: &CatalogEntry, seed: u64) -> Result<Vec<Instantiation>, CatalogError> {
    discrete_combinations(entry)
        .iter()
        .enumerate()
        .map(|(n, fixed)| instantiate_fixed(entry, fixed, seed.wrapping_add(n as u64 * 7919)))
        .collect()
}

/// `draws` random draws × every discrete combination.
pub fn instantiations(entry: &CatalogEntry, draws: usize, seed: u64) -> Result<Vec<Instantiation>, CatalogError> {
    let base = entry_seed(entry, seed);
    let mut out = Vec::new();
    for d in 0..draws as u64 {
        out.extend(instantiate(entry, base.wrapping_add(d.wrapping_mul(0x2545_f491_4f6c_dd1d)))?);
    }
    Ok(out)
}

/// Structural checks of one instantiation.
#[derive(Debug, Clone, Serialize)]
pub struct IntegrityReport {
    pub values: BTreeMap<String, String>,
    pub jacobi_violations: Vec<JacobiViolation>,
    /// Violations of the printed brackets (differs only for repaired rows).
    pub printed_jacobi_violations: Vec<JacobiViolation>,
    pub nilradical_matches: bool,
    pub nilpotent_ideal: bool,
    pub derived_in_nilradical: bool,
}

impl IntegrityReport {
    pub fn passed(&self) -> bool {
        self.jacobi_violations.is_empty() && self.nilradical_matches && self.nilpotent_ideal && self.derived_in_nilradical
    }
}

pub fn check_integrity(catalog: &Catalog, entry: &CatalogEntry, inst: &Instantiation) -> Result<IntegrityReport, CatalogError> {
    let sc = &inst.structure;
    let printed = build_structure(entry.dim(), &entry.brackets, &inst.values)
        .map_err(|message| CatalogError::Constraint { entry: entry.key(), message })?;
    let jacobi_violations = algebra::validate_jacobi(sc);
    let printed_jacobi_violations = algebra::validate_jacobi(&printed);
    let nil = catalog.nilradical(&entry.nilradical).ok_or_else(|| entry.schema("unknown nilradical".into()))?;
    let first_five = [0, 1, 2, 3, 4];
    let restricted = sc.restrict(&first_five).and_then(|r| match &entry.nilradical_relabel {
        Some(perm) => r.relabel(&perm.iter().map(|p| p - 1).collect::<Vec<_>>()).ok(),
        None => Some(r),
    });
    let nilradical_matches = restricted.as_ref() == Some(&nil.structure());
    let span = Subspace::coordinate(sc.dim(), &first_five);
    let (nilpotent_ideal, derived_in_nilradical) = if jacobi_violations.is_empty() {
        let derived = algebra::derived_series(sc).map_err(|source| CatalogError::Algebra { entry: entry.key(), source })?;
        let nilp = algebra::is_nilpotent_ideal(sc, &span).map_err(|source| CatalogError::Algebra { entry: entry.key(), source })?;
        (nilp, derived.get(1).is_some_and(|d| d.is_subspace_of(&span)))
    } else {
        (false, false)
    };
    Ok(IntegrityReport {
        values: inst.value_strings(),
        jacobi_violations,
        printed_jacobi_violations,
        nilradical_matches,
        nilpotent_ideal,
        derived_in_nilradical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Quarantined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditConfig {
    pub draws: usize,
    pub verify: VerifyConfig,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { draws: DEFAULT_DRAWS, verify: VerifyConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceAudit {
    pub values: BTreeMap<String, String>,
    pub integrity: IntegrityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<EntryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repaired: Option<EntryReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryAudit {
    pub key: String,
    pub id: String,
    pub regime: Option<String>,
    pub status: Status,
    pub outcome: Outcome,
    /// Printed invariants pass everywhere.
    pub printed_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repaired_pass: Option<bool>,
    pub invariant_counts: Vec<usize>,
    pub instances: Vec<InstanceAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EntryAudit {
    /// A shipped `verified` entry that no longer passes.
    pub fn is_regression(&self) -> bool {
        self.status == Status::Verified && self.outcome != Outcome::Pass
    }
}

fn run_set(
    entry: &CatalogEntry,
    texts: &[String],
    inst: &Instantiation,
    config: &VerifyConfig,
) -> Result<EntryReport, String> {
    let exprs = entry.parse_invariants(texts).map_err(|e| e.to_string())?;
    verify::verify_fundamental_set(&inst.structure, &exprs, &inst.params(), config).map_err(|e| e.to_string())
}

/// Audits one entry. Rows with no printed invariants are quarantined unchecked.
pub fn audit_entry(catalog: &Catalog, entry: &CatalogEntry, config: &AuditConfig) -> EntryAudit {
    let mut out = EntryAudit {
        key: entry.key(),
        id: entry.id.clone(),
        regime: entry.regime.clone(),
        status: entry.status,
        outcome: Outcome::Fail,
        printed_pass: false,
        repaired_pass: None,
        invariant_counts: vec![],
        instances: vec![],
        reason: None,
        error: None,
    };
    let insts = match instantiations(entry, config.draws, config.verify.seed) {
        Ok(i) => i,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let seed = entry_seed(entry, config.verify.seed);
    let mut printed_ok = true;
    let mut repaired_ok = true;
    for (n, inst) in insts.iter().enumerate() {
        let vc = VerifyConfig { seed: seed.wrapping_add(n as u64 * 1_000_003), ..config.verify };
        let integrity = match check_integrity(catalog, entry, inst) {
            Ok(r) => r,
            Err(e) => {
                out.error = Some(e.to_string());
                return out;
            }
        };
        let mut record = InstanceAudit { values: inst.value_strings(), integrity, printed: None, repaired: None };
        if entry.status != Status::PaperBlank && record.integrity.jacobi_violations.is_empty() {
            match run_set(entry, &entry.invariants, inst, &vc) {
                Ok(r) => {
                    printed_ok &= r.verdict.passed();
                    out.invariant_counts.push(r.invariant_count);
                    record.printed = Some(r);
                }
                Err(e) => {
                    printed_ok = false;
                    out.error.get_or_insert(e);
                }
            }
            if let Some(rep) = &entry.repaired_invariants {
                match run_set(entry, rep, inst, &vc) {
                    Ok(r) => {
                        repaired_ok &= r.verdict.passed();
                        record.repaired = Some(r);
                    }
                    Err(e) => {
                        repaired_ok = false;
                        out.error.get_or_insert(e);
                    }
                }
            }
        } else {
            printed_ok = false;
        }
        out.instances.push(record);
    }
    let integrity_ok = out.instances.iter().all(|i| i.integrity.passed());
    out.printed_pass = printed_ok && integrity_ok && entry.status != Status::PaperBlank;
    if entry.repaired_invariants.is_some() {
        out.repaired_pass = Some(repaired_ok && integrity_ok);
    }
    out.outcome = match entry.status {
        Status::Verified if out.printed_pass => Outcome::Pass,
        Status::Verified => Outcome::Fail,
        Status::PaperBlank => {
            out.reason = Some("paper-blank: no invariants printed".into());
            Outcome::Quarantined
        }
        Status::ErratumSuspect => {
            out.reason = Some(format!("erratum-suspect: {}", entry.note));
            Outcome::Quarantined
        }
    };
    out
}

/// Audits `entries` in parallel; the result is sorted by key.
pub fn audit(catalog: &Catalog, entries: &[&CatalogEntry], config: &AuditConfig) -> Vec<EntryAudit> {
    let mut out: Vec<EntryAudit> = entries.par_iter().map(|e| audit_entry(catalog, e, config)).collect();
    out.sort_by_key(|a| natural_key(&a.key));
    out
}

/// Sort key putting `g6_9` before `g6_10`.
pub fn natural_key(key: &str) -> (u32, String) {
    let digits: String = key.trim_start_matches("g6_").chars().take_while(char::is_ascii_digit).collect();
    (digits.parse().unwrap_or(u32::MAX), key.to_string())
}

/// Every expression string in the catalog with the data needed to parse it:
/// `(entry key, text, parameter names)`.
pub fn all_expressions(catalog: &Catalog) -> Vec<(String, String, Vec<String>)> {
    let mut out = Vec::new();
    for e in &catalog.algebras {
        let names: Vec<String> = e.params.iter().map(|p| p.name.clone()).collect();
        for t in e.invariants.iter().chain(e.repaired_invariants.iter().flatten()) {
            out.push((e.key(), t.clone(), names.clone()));
        }
    }
    out
}

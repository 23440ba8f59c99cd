//! Batch runners behind the command-line tool and their machine-readable
//! report.
//!
//! Every runner is deterministic: identical inputs produce identical
//! reports except for the `timings` map, whatever the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Vars;
use crate::closed_forms::{
    n_m_closed, q_closed, q_from_qtilde, qtilde_closed, qtilde_expansion, ExpansionMode,
};
use crate::error::{param_err, Error, Result};
use crate::forest::{
    oracle_constructive_count, search_census, CensusPolynomial, Rules, SearchOptions, VertexFamily,
    DEFAULT_MAX_NODES,
};
use crate::identity::{
    random_points, verify_claim, verify_claim0, verify_eq1, verify_eq1_numeric,
    verify_multinomial_variant, Difference, IdentityInstance, Verdict,
};

pub const SYMBOLIC_MAX_M: usize = 8;
pub const NUMERIC_MAX_M: usize = 14;
/// Claim and multinomial checks stop here regardless of `max_m`.
pub const CLAIMS_MAX_M: usize = 6;
pub const MULTINOMIAL_MAX_P: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extras: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Computed values by route (`formula`, `oracle`, ...), exact integers
    /// or canonical polynomial text.
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

impl InstanceRecord {
    fn new(id: impl Into<String>) -> Self {
        InstanceRecord {
            id: id.into(),
            sizes: Vec::new(),
            extras: None,
            m: None,
            p: None,
            n: None,
            values: BTreeMap::new(),
        }
    }

    fn family(id: impl Into<String>, fam: &VertexFamily) -> Self {
        InstanceRecord {
            sizes: fam.sizes().to_vec(),
            extras: Some(fam.extras()),
            ..InstanceRecord::new(id)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub instance: String,
    pub check: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub text: String,
    pub terms: BTreeMap<String, String>,
}

impl PolyRecord {
    fn census(p: &CensusPolynomial) -> Self {
        PolyRecord {
            text: p.render(),
            terms: p.term_map(),
        }
    }
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub instances: Vec<InstanceRecord>,
    pub verdicts: Vec<VerdictRecord>,
    pub polynomials: BTreeMap<String, PolyRecord>,
    /// Wall-clock seconds per instance or route.
    pub timings: BTreeMap<String, f64>,
    #[serde(default)]
    pub capacity_hits: Vec<String>,
}

/// One CSV row: `sizes,n,formula,oracle,agree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsvRow {
    pub sizes: String,
    pub n: String,
    pub formula: String,
    pub oracle: String,
    pub agree: bool,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            instances: Vec::new(),
            verdicts: Vec::new(),
            polynomials: BTreeMap::new(),
            timings: BTreeMap::new(),
            capacity_hits: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.outcome != Outcome::Fail)
    }

    /// 0 when no verdict failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerdictRecord> {
        self.verdicts.iter().filter(|v| v.outcome == Outcome::Fail)
    }

    /// The report with the timing map cleared, for determinism comparisons.
    pub fn without_timings(&self) -> RunReport {
        RunReport {
            timings: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.instances
            .iter()
            .map(|inst| {
                let sizes = if inst.sizes.is_empty() {
                    inst.id.clone()
                } else {
                    join(&inst.sizes, ";")
                };
                let n = inst
                    .extras
                    .or(inst.n)
                    .map(|n| n.to_string())
                    .unwrap_or_default();
                let get = |k: &str| inst.values.get(k).cloned().unwrap_or_default();
                CsvRow {
                    sizes,
                    n,
                    formula: get("formula"),
                    oracle: get("oracle"),
                    agree: self
                        .verdicts
                        .iter()
                        .filter(|v| v.instance == inst.id)
                        .all(|v| v.outcome != Outcome::Fail),
                }
            })
            .collect()
    }

    fn absorb(&mut self, part: Part) {
        self.instances.push(part.instance);
        self.verdicts.extend(part.verdicts);
        self.polynomials.extend(part.polynomials);
        self.timings.extend(part.timings);
        self.capacity_hits.extend(part.capacity_hits);
    }

    /// Appends another report's contents (used to build grid reports).
    pub fn extend(&mut self, other: RunReport) {
        self.instances.extend(other.instances);
        self.verdicts.extend(other.verdicts);
        self.polynomials.extend(other.polynomials);
        self.timings.extend(other.timings);
        self.capacity_hits.extend(other.capacity_hits);
    }
}

fn join(values: &[usize], sep: &str) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

/// Everything one instance contributes to a report.
struct Part {
    instance: InstanceRecord,
    verdicts: Vec<VerdictRecord>,
    polynomials: BTreeMap<String, PolyRecord>,
    timings: BTreeMap<String, f64>,
    capacity_hits: Vec<String>,
}

impl Part {
    fn new(instance: InstanceRecord) -> Self {
        Part {
            instance,
            verdicts: Vec::new(),
            polynomials: BTreeMap::new(),
            timings: BTreeMap::new(),
            capacity_hits: Vec::new(),
        }
    }

    fn id(&self) -> &str {
        &self.instance.id
    }

    fn verdict(&mut self, check: impl Into<String>, outcome: Outcome, detail: Option<String>) {
        let instance = self.id().to_string();
        self.verdicts.push(VerdictRecord {
            instance,
            check: check.into(),
            outcome,
            detail,
        });
    }

    fn agree(&mut self, check: &str, equal: bool, detail: impl FnOnce() -> String) {
        if equal {
            self.verdict(check, Outcome::Pass, None);
        } else {
            self.verdict(check, Outcome::Fail, Some(detail()));
        }
    }

    fn skip(&mut self, check: &str, why: String) {
        self.capacity_hits.push(format!("{}: {why}", self.id()));
        self.verdict(check, Outcome::Skipped, Some(why));
    }

    fn value(&mut self, key: &str, value: impl ToString) {
        self.instance
            .values
            .insert(key.to_string(), value.to_string());
    }

    fn poly(&mut self, route: &str, p: &CensusPolynomial) {
        let key = format!("{}/{route}", self.id());
        self.polynomials.insert(key, PolyRecord::census(p));
    }

    fn time<T>(&mut self, route: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let key = format!("{}/{route}", self.id());
        self.timings.insert(key, start.elapsed().as_secs_f64());
        out
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return param_err("workers must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))
}

/// Runs `job` over `items` on `workers` threads, keeping input order.
fn ordered_map<T: Sync, R: Send>(
    workers: usize,
    items: &[T],
    job: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>> {
    if workers == 1 {
        return Ok(items.iter().map(job).collect());
    }
    Ok(pool(workers)?.install(|| items.par_iter().map(job).collect()))
}

/// Options shared by the oracle-driven commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub max_nodes: u64,
    pub workers: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_nodes: DEFAULT_MAX_NODES,
            workers: 1,
        }
    }
}

impl OracleOptions {
    /// Worker split: across instances when there are several, inside the
    /// oracle search otherwise.
    fn split(&self, instances: usize) -> (usize, SearchOptions) {
        let (outer, inner) = if instances > 1 {
            (self.workers, 1)
        } else {
            (1, self.workers)
        };
        (
            outer,
            SearchOptions {
                max_nodes: self.max_nodes,
                workers: inner,
            },
        )
    }
}

// ---------------------------------------------------------------- identity

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityMode {
    Symbolic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityOptions {
    pub max_m: usize,
    pub mode: IdentityMode,
    pub seed: u64,
    /// Rational points per `m` in numeric mode.
    pub points: usize,
    /// Also check the inductive-step identities and the multinomial variant.
    pub claims: bool,
    pub workers: usize,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions {
            max_m: 6,
            mode: IdentityMode::Symbolic,
            seed: 0,
            points: 100,
            claims: false,
            workers: 1,
        }
    }
}

fn describe(verdict: &Verdict, m: usize) -> String {
    match verdict {
        Verdict::Equal => String::new(),
        Verdict::Differs(Difference::Symbolic(d)) => {
            format!("lhs - rhs = {}", d.render(&Vars::indexed(m)))
        }
        Verdict::Differs(Difference::AtPoint { point, lhs, rhs }) => {
            let pt: Vec<String> = point.iter().map(ToString::to_string).collect();
            format!("at ({}) lhs = {lhs}, rhs = {rhs}", pt.join(", "))
        }
    }
}

enum IdentityJob {
    Eq1(IdentityInstance),
    Eq1Numeric(usize),
    Claim0(usize, usize),
    Claim(usize, usize, usize),
    Multinomial(usize, usize),
}

fn identity_parts(job: &IdentityJob, opts: &IdentityOptions) -> Vec<Part> {
    let single = |id: String,
                  m: usize,
                  p: Option<usize>,
                  n: Option<usize>,
                  check: &str,
                  run: &dyn Fn() -> Verdict| {
        let mut part = Part::new(InstanceRecord {
            m: Some(m),
            p,
            n,
            ..InstanceRecord::new(id)
        });
        let verdict = part.time("verify", run);
        part.agree(check, verdict.is_equal(), || describe(&verdict, m));
        part
    };
    match *job {
        IdentityJob::Eq1(inst) => {
            let (m, p) = (inst.m(), inst.p());
            vec![single(
                format!("eq1 m={m} p={p}"),
                m,
                Some(p),
                None,
                "lhs=rhs",
                &|| verify_eq1(inst),
            )]
        }
        IdentityJob::Eq1Numeric(m) => {
            let points = random_points(m, opts.points, opts.seed);
            let start = Instant::now();
            let verdicts = verify_eq1_numeric(m, &points);
            let elapsed = start.elapsed().as_secs_f64();
            verdicts
                .into_iter()
                .enumerate()
                .map(|(i, verdict)| {
                    let p = i + 1;
                    let mut part = Part::new(InstanceRecord {
                        m: Some(m),
                        p: Some(p),
                        ..InstanceRecord::new(format!("eq1 m={m} p={p}"))
                    });
                    part.value("points", opts.points);
                    if p == 1 {
                        part.timings.insert(format!("eq1 m={m}/numeric"), elapsed);
                    }
                    part.agree("lhs=rhs (numeric)", verdict.is_equal(), || {
                        describe(&verdict, m)
                    });
                    part
                })
                .collect()
        }
        IdentityJob::Claim0(m, p) => vec![single(
            format!("claim0 m={m} p={p}"),
            m,
            Some(p),
            None,
            "lhs=rhs",
            &|| verify_claim0(m, p).expect("grid stays in range"),
        )],
        IdentityJob::Claim(m, p, n) => vec![single(
            format!("claim m={m} p={p} n={n}"),
            m,
            Some(p),
            Some(n),
            "lhs=rhs",
            &|| verify_claim(m, p, n).expect("grid stays in range"),
        )],
        IdentityJob::Multinomial(p, m) => vec![single(
            format!("multinomial p={p} m={m}"),
            m,
            Some(p),
            None,
            "lhs=rhs",
            &|| verify_multinomial_variant(p, m).expect("grid stays in range"),
        )],
    }
}

/// Checks the partition identity over the full `(m, p)` grid up to `max_m`.
pub fn run_verify_identity(opts: IdentityOptions) -> Result<RunReport> {
    let cap = match opts.mode {
        IdentityMode::Symbolic => SYMBOLIC_MAX_M,
        IdentityMode::Numeric => NUMERIC_MAX_M,
    };
    if opts.max_m < 1 || opts.max_m > cap {
        return param_err(format!(
            "--max-m must be in 1..={cap} for this mode, got {}",
            opts.max_m
        ));
    }
    if opts.mode == IdentityMode::Numeric && opts.points == 0 {
        return param_err("numeric mode needs at least one point");
    }
    let mut jobs = Vec::new();
    match opts.mode {
        IdentityMode::Symbolic => {
            jobs.extend(
                IdentityInstance::grid(opts.max_m)
                    .into_iter()
                    .map(IdentityJob::Eq1),
            );
        }
        IdentityMode::Numeric => jobs.extend((1..=opts.max_m).map(IdentityJob::Eq1Numeric)),
    }
    if opts.claims {
        let top = opts.max_m.min(CLAIMS_MAX_M);
        for m in 1..=top {
            for p in 2..=m + 1 {
                jobs.push(IdentityJob::Claim0(m, p));
            }
            for p in 1..=m {
                for n in 1..=m + 1 - p {
                    jobs.push(IdentityJob::Claim(m, p, n));
                }
            }
        }
        for p in 1..=MULTINOMIAL_MAX_P {
            for m in 2..=top.max(2) {
                jobs.push(IdentityJob::Multinomial(p, m));
            }
        }
    }
    let parts = ordered_map(opts.workers, &jobs, |job| identity_parts(job, &opts))?;
    let mode = match opts.mode {
        IdentityMode::Symbolic => "symbolic",
        IdentityMode::Numeric => "numeric",
    };
    let mut command = format!("verify-identity --max-m {} --mode {mode}", opts.max_m);
    if opts.mode == IdentityMode::Numeric {
        command.push_str(&format!(" --seed {} --points {}", opts.seed, opts.points));
    }
    if opts.claims {
        command.push_str(" --claims");
    }
    let mut report = RunReport::new(command);
    for part in parts.into_iter().flatten() {
        report.absorb(part);
    }
    Ok(report)
}

// ------------------------------------------------------------------- count

fn count_part(fam: &VertexFamily, search: SearchOptions) -> Part {
    let id = format!("sizes={}", join(fam.sizes(), ","));
    let mut part = Part::new(InstanceRecord::family(id, fam));
    let formula = part
        .time("formula", || n_m_closed(fam))
        .expect("extras-free family");
    part.value("formula", &formula);

    match part.time("filter", || search_census(fam, Rules::standard(), search)) {
        Ok(census) => {
            let oracle = census.total_count();
            part.value("oracle", &oracle);
            part.agree("filter=formula", oracle == formula, || {
                format!("filter {oracle} vs formula {formula}")
            });
        }
        Err(Error::Capacity { limit }) => {
            part.skip(
                "filter=formula",
                format!("filter oracle exceeded {limit} search nodes"),
            );
        }
        Err(e) => part.verdict("filter=formula", Outcome::Fail, Some(e.to_string())),
    }

    let m = fam.num_sets();
    let trees = if m >= 2 {
        (m as f64).powi(m as i32 - 2)
    } else {
        1.0
    };
    if trees <= search.max_nodes as f64 {
        let constructive = part
            .time("constructive", || oracle_constructive_count(fam))
            .expect("extras-free family");
        part.value("constructive", &constructive);
        part.agree("constructive=formula", constructive == formula, || {
            format!("constructive {constructive} vs formula {formula}")
        });
    } else {
        part.skip(
            "constructive=formula",
            format!(
                "{m}^{} labeled trees exceed {} nodes",
                m - 2,
                search.max_nodes
            ),
        );
    }
    part
}

/// Forest counts: closed form against both oracles.
pub fn run_count(families: &[Vec<usize>], opts: OracleOptions) -> Result<RunReport> {
    let fams = families
        .iter()
        .map(|s| VertexFamily::sets(s))
        .collect::<Result<Vec<_>>>()?;
    let (outer, search) = opts.split(fams.len());
    let parts = ordered_map(outer, &fams, |f| count_part(f, search))?;
    let mut command = "count".to_string();
    for s in families {
        command.push_str(&format!(" --sizes {}", join(s, ",")));
    }
    let mut report = RunReport::new(command);
    for part in parts {
        report.absorb(part);
    }
    Ok(report)
}

// ------------------------------------------------------------------ census

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub forbid_interset: bool,
    /// Also evaluate the nested expansion term by term (small `n` only).
    pub literal_expansion: bool,
}

fn census_id(fam: &VertexFamily, forbid: bool) -> String {
    let mut id = format!("sizes={} extras={}", join(fam.sizes(), ","), fam.extras());
    if forbid {
        id.push_str(" no-interset");
    }
    id
}

fn census_part(fam: &VertexFamily, copts: CensusOptions, search: SearchOptions) -> Part {
    let forbid = copts.forbid_interset;
    let mut part = Part::new(InstanceRecord::family(census_id(fam, forbid), fam));
    let n = fam.extras();
    let m = fam.num_sets();

    let closed = if forbid {
        part.time("formula", || qtilde_closed(fam)).ok()
    } else {
        Some(part.time("formula", || q_closed(fam)))
    };
    if let Some(c) = &closed {
        part.value("formula", c.render());
        part.poly("formula", c);
    }

    let rules = Rules::with_forbid_interset(forbid);
    match part.time("oracle", || search_census(fam, rules, search)) {
        Ok(oracle) => {
            part.value("oracle", oracle.render());
            part.poly("oracle", &oracle);
            match &closed {
                Some(c) => part.agree("oracle=formula", &oracle == c, || {
                    format!("oracle {} vs formula {}", oracle.render(), c.render())
                }),
                None => part.verdict(
                    "oracle=formula",
                    Outcome::Skipped,
                    Some("restricted closed form needs n >= 1".into()),
                ),
            }
        }
        Err(Error::Capacity { limit }) => {
            part.skip(
                "oracle=formula",
                format!("oracle exceeded {limit} search nodes"),
            );
        }
        Err(e) => part.verdict("oracle=formula", Outcome::Fail, Some(e.to_string())),
    }

    if let Some(c) = &closed {
        if forbid && m >= 2 && n >= 1 {
            let expansion = part
                .time("expansion", || {
                    qtilde_expansion(fam, ExpansionMode::Memoized)
                })
                .expect("m >= 2, n >= 1");
            part.value("expansion", expansion.render());
            part.poly("expansion", &expansion);
            part.agree("expansion=formula", &expansion == c, || {
                format!("expansion {} vs formula {}", expansion.render(), c.render())
            });
            if copts.literal_expansion {
                let literal = part
                    .time("expansion-literal", || {
                        qtilde_expansion(fam, ExpansionMode::Literal)
                    })
                    .expect("m >= 2, n >= 1");
                part.agree("literal-expansion=formula", &literal == c, || {
                    format!("literal {} vs formula {}", literal.render(), c.render())
                });
            }
        }
        if !forbid && n >= 1 {
            let recombined = part
                .time("recombination", || q_from_qtilde(fam))
                .expect("n >= 1");
            part.value("recombination", recombined.render());
            part.poly("recombination", &recombined);
            part.agree("recombination=formula", &recombined == c, || {
                format!(
                    "recombination {} vs formula {}",
                    recombined.render(),
                    c.render()
                )
            });
        }
    }
    part
}

/// Weighted censuses: closed form against the oracle and, where defined,
/// the nested expansion and the recombination.
pub fn run_census(
    families: &[(Vec<usize>, usize)],
    copts: CensusOptions,
    opts: OracleOptions,
) -> Result<RunReport> {
    let fams = families
        .iter()
        .map(|(s, n)| VertexFamily::new(s.clone(), *n))
        .collect::<Result<Vec<_>>>()?;
    let (outer, search) = opts.split(fams.len());
    let parts = ordered_map(outer, &fams, |f| census_part(f, copts, search))?;
    let mut command = "census".to_string();
    for (s, n) in families {
        command.push_str(&format!(" --sizes {} --extras {n}", join(s, ",")));
    }
    if copts.forbid_interset {
        command.push_str(" --no-interset");
    }
    let mut report = RunReport::new(command);
    for part in parts {
        report.absorb(part);
    }
    Ok(report)
}

// ------------------------------------------------------------------- grids

/// Every sizes vector with `1 <= m <= max_m`, entries in `1..=max_size`
/// and total at most `max_total`, in lexicographic order by `m` then entries.
pub fn sizes_grid(max_m: usize, max_size: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn extend(
        cur: &mut Vec<usize>,
        len: usize,
        max_size: usize,
        budget: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for s in 1..=max_size.min(budget) {
            let left = len - cur.len() - 1;
            if budget - s < left {
                break;
            }
            cur.push(s);
            extend(cur, len, max_size, budget - s, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for m in 1..=max_m {
        extend(&mut Vec::new(), m, max_size, max_total, &mut out);
    }
    out
}

/// Forest-count grid: `m <= 4`, `|V_i| <= 3`, `sum |V_i| <= 8`.
pub fn count_grid() -> Vec<Vec<usize>> {
    sizes_grid(4, 3, 8)
}

/// Census grid: `m <= 2`, `|V_i| <= 2`, `n <= 3`, plus three singleton
/// sets with `n <= 2`.
pub fn census_grid() -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for sizes in sizes_grid(2, 2, 4) {
        for n in 0..=3 {
            out.push((sizes.clone(), n));
        }
    }
    for n in 0..=2 {
        out.push((vec![1, 1, 1], n));
    }
    out
}

/// Expansion grid: `m in {2, 3}`, `sum |V_i| <= 5`, `1 <= n <= 4`.
pub fn expansion_grid() -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for sizes in sizes_grid(3, 5, 5).into_iter().filter(|s| s.len() >= 2) {
        for n in 1..=4 {
            out.push((sizes.clone(), n));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Count,
    Census,
    Expansion,
    All,
}

fn expansion_part(fam: &VertexFamily, literal_up_to: usize) -> Part {
    let mut part = Part::new(InstanceRecord::family(census_id(fam, true), fam));
    let closed = qtilde_closed(fam).expect("n >= 1");
    part.value("formula", closed.render());
    let memo = part
        .time("expansion", || {
            qtilde_expansion(fam, ExpansionMode::Memoized)
        })
        .expect("m >= 2, n >= 1");
    part.value("expansion", memo.render());
    part.agree("expansion=formula", memo == closed, || {
        format!("expansion {} vs formula {}", memo.render(), closed.render())
    });
    if fam.extras() <= literal_up_to {
        let literal = part
            .time("expansion-literal", || {
                qtilde_expansion(fam, ExpansionMode::Literal)
            })
            .expect("m >= 2, n >= 1");
        part.agree("literal-expansion=formula", literal == closed, || {
            format!(
                "literal {} vs formula {}",
                literal.render(),
                closed.render()
            )
        });
    }
    part
}

/// Runs the preset equivalence grids.
pub fn run_compare(grid: Grid, opts: OracleOptions) -> Result<RunReport> {
    let name = match grid {
        Grid::Count => "count",
        Grid::Census => "census",
        Grid::Expansion => "expansion",
        Grid::All => "all",
    };
    let mut report = RunReport::new(format!("compare --grid {name}"));
    if matches!(grid, Grid::Count | Grid::All) {
        report.extend(run_count(&count_grid(), opts)?);
    }
    if matches!(grid, Grid::Census | Grid::All) {
        let cases = census_grid();
        let plain = CensusOptions {
            forbid_interset: false,
            literal_expansion: false,
        };
        report.extend(run_census(&cases, plain, opts)?);
        let restricted: Vec<_> = cases.into_iter().filter(|(_, n)| *n >= 1).collect();
        let forbid = CensusOptions {
            forbid_interset: true,
            literal_expansion: false,
        };
        report.extend(run_census(&restricted, forbid, opts)?);
    }
    if matches!(grid, Grid::Expansion | Grid::All) {
        let fams = expansion_grid()
            .into_iter()
            .map(|(s, n)| VertexFamily::new(s, n))
            .collect::<Result<Vec<_>>>()?;
        let parts = ordered_map(opts.workers, &fams, |f| expansion_part(f, 3))?;
        for part in parts {
            report.absorb(part);
        }
    }
    Ok(report)
}

// ------------------------------------------------------------------- bench

/// Times every counting route; the filter oracle once per worker count.
pub fn run_bench(
    families: &[(Vec<usize>, usize)],
    worker_counts: &[usize],
    max_nodes: u64,
) -> Result<RunReport> {
    if worker_counts.is_empty() || worker_counts.contains(&0) {
        return param_err("worker counts must be positive");
    }
    let mut command = "bench".to_string();
    for (s, n) in families {
        command.push_str(&format!(" --sizes {} --extras {n}", join(s, ",")));
    }
    command.push_str(&format!(" --workers {}", join(worker_counts, ",")));
    let mut report = RunReport::new(command);
    for (sizes, n) in families {
        let fam = VertexFamily::new(sizes.clone(), *n)?;
        let mut part = Part::new(InstanceRecord::family(census_id(&fam, false), &fam));
        let closed = part.time("formula", || q_closed(&fam));
        part.value("formula", closed.render());
        if fam.extras() == 0 {
            let c = part.time("constructive", || oracle_constructive_count(&fam))?;
            part.value("constructive", &c);
            let expected = n_m_closed(&fam)?;
            part.agree("constructive=formula", c == expected, || {
                format!("{c} vs {expected}")
            });
        }
        let mut results: Vec<CensusPolynomial> = Vec::new();
        for &w in worker_counts {
            let search = SearchOptions {
                max_nodes,
                workers: w,
            };
            let census = part.time(&format!("filter/workers={w}"), || {
                search_census(&fam, Rules::standard(), search)
            })?;
            results.push(census);
        }
        let first = results[0].clone();
        part.value("oracle", first.render());
        part.agree(
            "workers-identical",
            results.iter().all(|r| *r == first),
            || "filter oracle output depends on the worker count".into(),
        );
        part.agree("filter=formula", first == closed, || {
            format!("oracle {} vs formula {}", first.render(), closed.render())
        });
        report.absorb(part);
    }
    Ok(report)
}

/// Exact census value at `lambda = a = 1`.
pub fn census_total(p: &CensusPolynomial) -> BigInt {
    p.total_count()
}

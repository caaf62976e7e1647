//! Randomised and scripted checks of the rewrite system: a term generator,
//! multi-seed confluence sampling with shrinking, instantiated critical pairs
//! and the restriction counterexamples.

use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::parser::print_term;
use crate::rewrite::{Rewriter, RuleGroup, RuleId, Status, Strategy};
use crate::scalar::Scalar;
use crate::stdlib;
use crate::term::{Kind, Term};

/// Node cap applied during confluence sampling; terms that outgrow it count
/// as non-normalising.
pub const SAMPLE_SIZE_CAP: usize = 4_000;

/// Relative weights of the constructors picked by [`generate_term`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    pub variable: u32,
    pub abstraction: u32,
    pub application: u32,
    pub zero: u32,
    pub scaled: u32,
    pub sum: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            variable: 3,
            abstraction: 4,
            application: 4,
            zero: 1,
            scaled: 2,
            sum: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: u32,
    pub scalars: Vec<Scalar>,
    pub weights: Weights,
    pub closed_only: bool,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 6,
            scalars: vec![
                Scalar::zero(),
                Scalar::one(),
                Scalar::from_integer(-1),
                Scalar::ratio(1, 2),
                Scalar::half_sqrt2(),
                Scalar::i(),
                Scalar::omega8(),
            ],
            weights: Weights::default(),
            closed_only: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenConfigError {
    #[error("max_depth must be at least 1")]
    Depth,
    #[error("constructor weights must all be positive")]
    Weights,
    #[error("the scalar pool is empty")]
    Scalars,
}

impl GenConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GenConfigError> {
        let w = &self.weights;
        if self.max_depth < 1 {
            return Err(GenConfigError::Depth);
        }
        if [
            w.variable,
            w.abstraction,
            w.application,
            w.zero,
            w.scaled,
            w.sum,
        ]
        .contains(&0)
        {
            return Err(GenConfigError::Weights);
        }
        if self.scalars.is_empty() {
            return Err(GenConfigError::Scalars);
        }
        Ok(())
    }
}

const FREE_NAMES: [&str; 3] = ["a", "b", "c"];

/// A random term; identical configurations give identical terms.
///
/// # Panics
/// If the configuration is invalid.
pub fn generate_term(cfg: &GenConfig) -> Term {
    cfg.validate().expect("invalid generator configuration");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    generate_with(cfg, &mut rng)
}

/// As [`generate_term`] but drawing from the caller's generator.
pub fn generate_with<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Term {
    let w = &cfg.weights;
    let table = WeightedIndex::new([
        w.variable,
        w.abstraction,
        w.application,
        w.zero,
        w.scaled,
        w.sum,
    ])
    .expect("positive weights");
    let mut g = Gen { cfg, rng, table };
    g.term(cfg.max_depth, 0)
}

struct Gen<'a, R> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
    table: WeightedIndex<u32>,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, binders: u32) -> Term {
        let open = !self.cfg.closed_only;
        match self.rng.gen_range(0..4) {
            0 => Term::zero(),
            1 if open => Term::var(FREE_NAMES[self.rng.gen_range(0..FREE_NAMES.len())]),
            1 | 2 if binders > 0 => Term::bound(self.rng.gen_range(0..binders)),
            _ => {
                // λx.x or λx.λy.x / λx.λy.y
                match self.rng.gen_range(0..3) {
                    0 => Term::lambda_raw("x", Term::bound(0)),
                    k => Term::lambda_raw("x", Term::lambda_raw("y", Term::bound(k - 1))),
                }
            }
        }
    }

    fn term(&mut self, depth: u32, binders: u32) -> Term {
        if depth <= 1 {
            return self.leaf(binders);
        }
        let d = depth - 1;
        match self.table.sample(self.rng) {
            0 => self.leaf(binders),
            1 => Term::lambda_raw("x", self.term(d, binders + 1)),
            2 => {
                let f = self.term(d, binders);
                let mut a = self.term(d, binders);
                // keep self-application of one variable out: it is the
                // seed of every Ω-like loop
                if matches!((f.kind(), a.kind()), (Kind::Bound(i), Kind::Bound(j)) if i == j) {
                    a = self.leaf(0);
                }
                Term::app(f, a)
            }
            3 => Term::zero(),
            4 => {
                let k = self.rng.gen_range(0..self.cfg.scalars.len());
                Term::scaled(self.cfg.scalars[k].clone(), self.term(d, binders))
            }
            _ => {
                let width = if self.rng.gen_bool(0.25) { 3 } else { 2 };
                Term::sum(
                    (0..width)
                        .map(|_| self.term(d, binders))
                        .collect::<Vec<_>>(),
                )
            }
        }
    }
}

// splitmix64 finaliser, used to derive per-sample seeds
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator seed of sample `id` under master seed `seed`.
pub fn sample_seed(seed: u64, id: usize) -> u64 {
    mix(seed, id as u64)
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub status: Status,
    pub steps: usize,
    pub normal_form: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every run normalised to the same term.
    Agree,
    /// Some runs normalised, all to the same term.
    Partial,
    /// No run normalised.
    Exhausted,
    /// Two runs reached different normal forms.
    Disagree { counterexample: Term },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Agree => "agree",
            Verdict::Partial => "partial",
            Verdict::Exhausted => "exhausted",
            Verdict::Disagree { .. } => "disagree",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub id: usize,
    pub term: Term,
    pub runs: Vec<RunSummary>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub fuel: usize,
    pub seeds: Vec<u64>,
    pub samples: Vec<SampleRecord>,
    pub elapsed: Duration,
}

impl ConfluenceReport {
    pub fn disagreements(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Disagree { .. }))
    }

    pub fn agreeing(&self) -> usize {
        self.count(|v| *v == Verdict::Agree)
    }

    fn count(&self, f: impl Fn(&Verdict) -> bool) -> usize {
        self.samples.iter().filter(|s| f(&s.verdict)).count()
    }

    /// Fraction of samples normalised under every seed.
    pub fn normalizing_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 1.0;
        }
        self.agreeing() as f64 / self.samples.len() as f64
    }

    pub fn passed(&self) -> bool {
        self.disagreements() == 0
    }

    /// One JSON object per sample.
    pub fn machine_lines(&self) -> Vec<String> {
        self.samples
            .iter()
            .map(|s| {
                let mut rec = json!({
                    "sample": s.id,
                    "status": s.verdict.label(),
                    "steps": s.runs.iter().map(|r| r.steps).collect::<Vec<_>>(),
                    "outcomes": s.runs.iter().map(|r| status_label(r.status)).collect::<Vec<_>>(),
                });
                if let Verdict::Disagree { counterexample } = &s.verdict {
                    rec["term"] = json!(print_term(&s.term));
                    rec["counterexample"] = json!(print_term(counterexample));
                    rec["normal_forms"] = json!(s
                        .runs
                        .iter()
                        .map(|r| r.normal_form.as_ref().map(print_term))
                        .collect::<Vec<_>>());
                }
                rec.to_string()
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "confluence: {} samples, {} seeds, fuel {}: {} agree, {} partial, {} exhausted, {} disagree ({:.1}% normalize) in {:.1?}",
            self.samples.len(),
            self.seeds.len(),
            self.fuel,
            self.agreeing(),
            self.count(|v| *v == Verdict::Partial),
            self.count(|v| *v == Verdict::Exhausted),
            self.disagreements(),
            100.0 * self.normalizing_fraction(),
            self.elapsed,
        )
    }
}

pub fn status_label(s: Status) -> &'static str {
    match s {
        Status::Normal => "normal",
        Status::FuelExhausted => "fuel-exhausted",
        Status::SizeLimit => "size-limit",
    }
}

fn run_seeds(rw: &Rewriter, t: &Term, fuel: usize, seeds: &[u64], salt: u64) -> Vec<RunSummary> {
    seeds
        .iter()
        .map(|&seed| {
            let out = rw.normalize_with_strategy(t, fuel, Strategy::RandomSeeded(mix(seed, salt)));
            RunSummary {
                seed,
                status: out.status,
                steps: out.steps,
                normal_form: (out.status == Status::Normal).then_some(out.term),
            }
        })
        .collect()
}

fn normal_forms_disagree(runs: &[RunSummary]) -> bool {
    let mut forms = runs.iter().filter_map(|r| r.normal_form.as_ref());
    match forms.next() {
        Some(first) => forms.any(|f| f != first),
        None => false,
    }
}

/// Normalises `samples` generated terms under each seed and compares the
/// normal forms. Sample `k` is generated from `sample_seed(cfg.seed, k)`.
///
/// # Panics
/// If fewer than two seeds are given or the configuration is invalid.
pub fn check_confluence_sample(
    cfg: &GenConfig,
    samples: usize,
    fuel: usize,
    seeds: &[u64],
) -> ConfluenceReport {
    let rw = Rewriter::new().with_max_size(SAMPLE_SIZE_CAP);
    check_confluence_sample_with(&rw, cfg, samples, fuel, seeds)
}

pub fn check_confluence_sample_with(
    rw: &Rewriter,
    cfg: &GenConfig,
    samples: usize,
    fuel: usize,
    seeds: &[u64],
) -> ConfluenceReport {
    assert!(
        seeds.len() >= 2,
        "confluence sampling needs at least two seeds"
    );
    cfg.validate().expect("invalid generator configuration");
    let start = Instant::now();
    let records: Vec<SampleRecord> = (0..samples)
        .into_par_iter()
        .map(|id| {
            let term = generate_term(&cfg.clone().with_seed(sample_seed(cfg.seed, id)));
            check_term(rw, id, term, fuel, seeds)
        })
        .collect();
    ConfluenceReport {
        fuel,
        seeds: seeds.to_vec(),
        samples: records,
        elapsed: start.elapsed(),
    }
}

/// Runs one term under every seed and classifies the outcome, shrinking it
/// on disagreement.
pub fn check_term(
    rw: &Rewriter,
    id: usize,
    term: Term,
    fuel: usize,
    seeds: &[u64],
) -> SampleRecord {
    let salt = id as u64;
    let runs = run_seeds(rw, &term, fuel, seeds, salt);
    let normal = runs.iter().filter(|r| r.status == Status::Normal).count();
    let verdict = if normal_forms_disagree(&runs) {
        let counterexample = shrink(&term, |t| {
            normal_forms_disagree(&run_seeds(rw, t, fuel, seeds, salt))
        });
        Verdict::Disagree { counterexample }
    } else if normal == runs.len() {
        Verdict::Agree
    } else if normal > 0 {
        Verdict::Partial
    } else {
        Verdict::Exhausted
    };
    SampleRecord {
        id,
        term,
        runs,
        verdict,
    }
}

/// Greedy shrinking: repeatedly replaces `t` by the first strictly smaller
/// candidate that still satisfies `fails`.
pub fn shrink(t: &Term, fails: impl Fn(&Term) -> bool) -> Term {
    let mut current = t.clone();
    'outer: loop {
        for candidate in shrink_candidates(&current) {
            if candidate.size() < current.size() && fails(&candidate) {
                current = candidate;
                continue 'outer;
            }
        }
        return current;
    }
}

/// One-step simplifications of `t`: closed subterms on their own, subterms
/// replaced by `0v`, by one of their same-depth children, or with one addend
/// dropped.
pub fn shrink_candidates(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut paths = Vec::new();
    collect_paths(t, &mut Vec::new(), &mut paths);
    for path in &paths {
        let node = t.at(path).expect("collected path");
        if !path.is_empty() && node.is_closed() {
            out.push(node.clone());
        }
        if !node.is_zero() {
            out.extend(t.replace_at(path, Term::zero()));
        }
        match node.kind() {
            Kind::Apply(f, a) => {
                out.extend(t.replace_at(path, f.clone()));
                out.extend(t.replace_at(path, a.clone()));
            }
            Kind::Scaled(_, u) => out.extend(t.replace_at(path, u.clone())),
            Kind::Sum(items) => {
                for k in 0..items.len() {
                    let rest: Vec<Term> = items
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, u)| u.clone())
                        .collect();
                    out.extend(t.replace_at(path, Term::sum(rest)));
                }
            }
            _ => {}
        }
    }
    out
}

fn collect_paths(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        collect_paths(c, path, out);
        path.pop();
    }
}

/// Whether a closed normal term has the shape of a normal form: `0v`, or a
/// sum of abstractions and scaled abstractions, weights outside {0, 1}, no
/// zero addend and no two addends over the same abstraction.
pub fn normal_form_shape_ok(t: &Term) -> bool {
    if t.is_zero() {
        return true;
    }
    let items: Vec<&Term> = match t.kind() {
        Kind::Sum(items) => items.iter().collect(),
        _ => vec![t],
    };
    let mut bases = Vec::with_capacity(items.len());
    for item in items {
        let base = match item.kind() {
            Kind::Lambda(..) => item,
            Kind::Scaled(alpha, u) if !alpha.is_zero() && !alpha.is_one() => match u.kind() {
                Kind::Lambda(..) => u,
                _ => return false,
            },
            _ => return false,
        };
        if bases.contains(&base) {
            return false;
        }
        bases.push(base);
    }
    true
}

/// Outcome of one named check in a fixed suite.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn machine_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                json!({
                    "suite": self.suite,
                    "case": c.name,
                    "status": if c.passed { "pass" } else { "fail" },
                    "detail": c.detail,
                })
                .to_string()
            })
            .collect()
    }

    pub fn text_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    format!("{mark} {}/{}", self.suite, c.name)
                } else {
                    format!("{mark} {}/{}: {}", self.suite, c.name, c.detail)
                }
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} checks, {} failed",
            self.suite,
            self.checks.len(),
            self.failures()
        )
    }
}

/// A critical-pair family instantiated with concrete terms: `ancestor` and
/// the rule instances contracted on each side.
#[derive(Clone, Debug)]
pub struct PairSpec {
    pub name: String,
    pub ancestor: Term,
    pub left: (RuleId, usize),
    pub right: (RuleId, usize),
    /// The common reduct, when the family names one.
    pub expected: Option<Term>,
}

/// A [`PairSpec`] with both one-step reducts computed.
#[derive(Clone, Debug)]
pub struct PairCase {
    pub name: String,
    pub ancestor: Term,
    pub left: Term,
    pub right: Term,
    pub expected: Option<Term>,
}

/// Contracts the `nth` redex of `rule` in `t`.
fn step_by(rw: &Rewriter, t: &Term, rule: RuleId, nth: usize) -> Result<Term, String> {
    let redex = rw
        .enumerate_redexes(t)
        .into_iter()
        .filter(|r| r.rule == rule)
        .nth(nth)
        .ok_or_else(|| format!("no {} redex #{nth} in {}", rule.name(), print_term(t)))?;
    rw.apply_redex(t, &redex).map_err(|e| e.to_string())
}

impl PairSpec {
    pub fn instantiate(&self) -> Result<PairCase, String> {
        let rw = Rewriter::new();
        Ok(PairCase {
            name: self.name.clone(),
            ancestor: self.ancestor.clone(),
            left: step_by(&rw, &self.ancestor, self.left.0, self.left.1)?,
            right: step_by(&rw, &self.ancestor, self.right.0, self.right.1)?,
            expected: self.expected.clone(),
        })
    }
}

/// The instantiated critical pairs: the sum/scalar families first
/// (`F-Pair-n`), then the application families (`A-Pair-n`).
pub fn critical_pair_specs() -> Vec<PairSpec> {
    use RuleId::*;
    let u = Term::lambda_raw("x", Term::bound(0));
    let v = stdlib::true_term();
    let w = stdlib::false_term();
    let x = stdlib::true_term();
    let y = stdlib::church(2);
    let half = Scalar::ratio(1, 2);
    let hs = Scalar::half_sqrt2();
    let i = Scalar::i();
    let one = Scalar::one();
    let zero = Scalar::zero();
    let s = |a: &Scalar, t: &Term| Term::scaled(a.clone(), t.clone());
    let sum = |ts: Vec<Term>| Term::sum(ts);
    let mut specs = Vec::new();
    let mut f = |n: u32,
                 ancestor: Term,
                 left: (RuleId, usize),
                 right: (RuleId, usize),
                 expected: Option<Term>| {
        specs.push(PairSpec {
            name: format!("F-Pair-{n}"),
            ancestor,
            left,
            right,
            expected,
        })
    };

    f(
        1,
        sum(vec![Term::zero(), Term::zero()]),
        (EPlus0, 0),
        (FFactorNone, 0),
        Some(Term::zero()),
    );
    let both = sum(vec![s(&hs, &u), s(&i, &u)]);
    f(
        2,
        s(&half, &both),
        (EScaleSum, 0),
        (FFactorBoth, 0),
        Some(s(&half.mul(&hs).add(&half.mul(&i)), &u)),
    );
    f(
        3,
        s(&half, &sum(vec![s(&hs, &u), s(&i, &u), x.clone()])),
        (EScaleSum, 0),
        (FFactorBoth, 0),
        None,
    );
    f(
        4,
        s(
            &half,
            &sum(vec![s(&hs, &u), s(&i, &u), x.clone(), y.clone()]),
        ),
        (EScaleSum, 0),
        (FFactorBoth, 0),
        None,
    );
    f(
        5,
        s(&half, &sum(vec![s(&hs, &u), u.clone()])),
        (EScaleSum, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        6,
        s(&half, &sum(vec![s(&hs, &u), u.clone(), x.clone()])),
        (EScaleSum, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        7,
        s(&i, &sum(vec![s(&half, &u), u.clone(), y.clone()])),
        (EScaleSum, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        8,
        s(
            &half,
            &sum(vec![u.clone(), s(&i, &u), x.clone(), y.clone()]),
        ),
        (EScaleSum, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        9,
        s(&half, &sum(vec![u.clone(), u.clone()])),
        (EScaleSum, 0),
        (FFactorNone, 0),
        Some(u.clone()),
    );
    f(
        10,
        s(&hs, &sum(vec![u.clone(), u.clone(), x.clone()])),
        (EScaleSum, 0),
        (FFactorNone, 0),
        None,
    );
    f(
        11,
        s(&i, &sum(vec![u.clone(), u.clone(), x.clone(), y.clone()])),
        (EScaleSum, 0),
        (FFactorNone, 0),
        None,
    );
    f(
        12,
        sum(vec![s(&half, &u), s(&half, &u)]),
        (FFactorBoth, 0),
        (FFactorNone, 0),
        Some(u.clone()),
    );
    f(
        13,
        sum(vec![s(&hs, &u), s(&hs, &u), x.clone()]),
        (FFactorBoth, 0),
        (FFactorNone, 0),
        None,
    );
    f(
        14,
        sum(vec![s(&half, &u), s(&hs, &u), s(&i, &u)]),
        (FFactorBoth, 0),
        (FFactorBoth, 1),
        Some(s(&half.add(&hs).add(&i), &u)),
    );
    f(
        15,
        sum(vec![s(&half, &u), s(&hs, &u), s(&i, &u), x.clone()]),
        (FFactorBoth, 0),
        (FFactorBoth, 1),
        None,
    );
    f(
        16,
        sum(vec![s(&half, &u), s(&i, &u), u.clone()]),
        (FFactorBoth, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        17,
        sum(vec![s(&half, &u), s(&i, &u), u.clone(), x.clone()]),
        (FFactorBoth, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        18,
        sum(vec![s(&half, &u), s(&half, &u), s(&i, &u)]),
        (FFactorNone, 0),
        (FFactorBoth, 1),
        Some(s(&Scalar::one().add(&i), &u)),
    );
    f(
        19,
        sum(vec![s(&hs, &u), s(&hs, &u), s(&i, &u), x.clone()]),
        (FFactorNone, 0),
        (FFactorBoth, 1),
        None,
    );
    f(
        20,
        sum(vec![s(&i, &u), s(&i, &u), u.clone()]),
        (FFactorNone, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        21,
        sum(vec![s(&half, &u), s(&half, &u), u.clone(), x.clone()]),
        (FFactorNone, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        22,
        sum(vec![s(&i, &u), u.clone(), u.clone()]),
        (FFactorOne, 0),
        (FFactorNone, 0),
        None,
    );
    f(
        23,
        sum(vec![s(&half, &u), u.clone(), u.clone(), x.clone()]),
        (FFactorOne, 0),
        (FFactorNone, 0),
        None,
    );
    f(
        24,
        sum(vec![s(&zero, &u), s(&i, &u)]),
        (EScale0, 0),
        (FFactorBoth, 0),
        Some(s(&i, &u)),
    );
    f(
        25,
        sum(vec![s(&zero, &u), s(&hs, &u), x.clone()]),
        (EScale0, 0),
        (FFactorBoth, 0),
        None,
    );
    f(
        26,
        sum(vec![s(&zero, &u), u.clone()]),
        (EScale0, 0),
        (FFactorOne, 0),
        Some(u.clone()),
    );
    f(
        27,
        sum(vec![s(&zero, &u), u.clone(), x.clone()]),
        (EScale0, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        28,
        sum(vec![s(&half, &u), s(&one, &u)]),
        (EScale1, 0),
        (FFactorBoth, 0),
        Some(s(&half.add(&one), &u)),
    );
    f(
        29,
        sum(vec![s(&i, &u), s(&one, &u), x.clone()]),
        (EScale1, 0),
        (FFactorBoth, 0),
        None,
    );
    f(
        30,
        sum(vec![s(&one, &u), u.clone()]),
        (EScale1, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        31,
        sum(vec![s(&one, &u), u.clone(), x.clone()]),
        (EScale1, 0),
        (FFactorOne, 0),
        None,
    );
    let z = Term::zero();
    f(
        32,
        sum(vec![z.clone(), s(&hs, &z)]),
        (EScaleZeroVec, 0),
        (FFactorOne, 0),
        Some(Term::zero()),
    );
    f(
        33,
        sum(vec![z.clone(), s(&i, &z), x.clone()]),
        (EScaleZeroVec, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        34,
        sum(vec![s(&half, &z), s(&i, &z)]),
        (EScaleZeroVec, 0),
        (FFactorBoth, 0),
        Some(Term::zero()),
    );
    f(
        35,
        sum(vec![s(&half, &z), s(&hs, &z), x.clone()]),
        (EScaleZeroVec, 0),
        (FFactorBoth, 0),
        None,
    );
    let gu = s(&i, &u);
    f(
        36,
        sum(vec![s(&half, &gu), s(&hs, &gu)]),
        (EScaleScale, 0),
        (FFactorBoth, 0),
        Some(s(&half.mul(&i).add(&hs.mul(&i)), &u)),
    );
    f(
        37,
        sum(vec![s(&half, &gu), s(&hs, &gu), x.clone()]),
        (EScaleScale, 0),
        (FFactorBoth, 0),
        None,
    );
    let bu = s(&hs, &u);
    f(
        38,
        sum(vec![bu.clone(), s(&i, &bu)]),
        (EScaleScale, 0),
        (FFactorOne, 0),
        None,
    );
    f(
        39,
        sum(vec![bu.clone(), s(&half, &bu), x.clone()]),
        (EScaleScale, 0),
        (FFactorOne, 0),
        None,
    );
    let uv = sum(vec![u.clone(), w.clone()]);
    let ab = half.add(&i);
    f(
        40,
        sum(vec![s(&half, &uv), s(&i, &uv)]),
        (EScaleSum, 0),
        (FFactorBoth, 0),
        Some(sum(vec![s(&ab, &u), s(&ab, &w)])),
    );
    f(
        41,
        sum(vec![s(&half, &uv), s(&hs, &uv), y.clone()]),
        (EScaleSum, 0),
        (FFactorBoth, 0),
        None,
    );

    let mut a = |n: u32, ancestor: Term, left: RuleId, right: RuleId, expected: Option<Term>| {
        specs.push(PairSpec {
            name: format!("A-Pair-{n}"),
            ancestor,
            left: (left, 0),
            right: (right, 0),
            expected,
        })
    };
    let app = Term::app;
    let uv_app = app(u.clone(), v.clone());
    a(
        1,
        app(s(&zero, &u), v.clone()),
        EScale0,
        AScaleAppLeft,
        Some(Term::zero()),
    );
    a(
        2,
        app(s(&one, &u), v.clone()),
        EScale1,
        AScaleAppLeft,
        Some(uv_app.clone()),
    );
    a(
        3,
        app(s(&half, &z), v.clone()),
        EScaleZeroVec,
        AScaleAppLeft,
        Some(Term::zero()),
    );
    a(
        4,
        app(s(&half, &s(&i, &u)), v.clone()),
        EScaleScale,
        AScaleAppLeft,
        Some(s(&half.mul(&i), &uv_app)),
    );
    a(
        5,
        app(s(&hs, &sum(vec![u.clone(), v.clone()])), w.clone()),
        EScaleSum,
        AScaleAppLeft,
        None,
    );
    a(
        6,
        app(v.clone(), s(&zero, &u)),
        EScale0,
        AScaleAppRight,
        Some(Term::zero()),
    );
    a(
        7,
        app(v.clone(), s(&one, &u)),
        EScale1,
        AScaleAppRight,
        Some(app(v.clone(), u.clone())),
    );
    a(
        8,
        app(v.clone(), s(&half, &z)),
        EScaleZeroVec,
        AScaleAppRight,
        Some(Term::zero()),
    );
    a(
        9,
        app(v.clone(), s(&half, &s(&i, &u))),
        EScaleScale,
        AScaleAppRight,
        None,
    );
    a(
        10,
        app(w.clone(), s(&hs, &sum(vec![u.clone(), v.clone()]))),
        EScaleSum,
        AScaleAppRight,
        None,
    );
    let uw = sum(vec![u.clone(), v.clone()]);
    a(
        11,
        app(uw.clone(), sum(vec![w.clone(), y.clone()])),
        ADistAppLeft,
        ADistAppRight,
        None,
    );
    a(
        12,
        app(uw.clone(), s(&half, &w)),
        ADistAppLeft,
        AScaleAppRight,
        None,
    );
    a(
        13,
        app(uw.clone(), z.clone()),
        ADistAppLeft,
        AZeroAppRight,
        Some(Term::zero()),
    );
    a(
        14,
        app(s(&half, &u), sum(vec![v.clone(), w.clone()])),
        AScaleAppLeft,
        ADistAppRight,
        None,
    );
    a(
        15,
        app(s(&half, &u), s(&i, &v)),
        AScaleAppLeft,
        AScaleAppRight,
        Some(s(&half.mul(&i), &uv_app)),
    );
    a(
        16,
        app(s(&half, &u), z.clone()),
        AScaleAppLeft,
        AZeroAppRight,
        Some(Term::zero()),
    );
    a(
        17,
        app(z.clone(), uw.clone()),
        AZeroAppLeft,
        ADistAppRight,
        Some(Term::zero()),
    );
    a(
        18,
        app(z.clone(), s(&i, &u)),
        AZeroAppLeft,
        AScaleAppRight,
        Some(Term::zero()),
    );
    specs
}

/// Fuel allowed for joining the two reducts of a critical pair.
pub const PAIR_FUEL: usize = 1_000;

pub fn critical_pair_suite() -> SuiteReport {
    critical_pair_suite_with(&Rewriter::new())
}

/// Instantiates every pair, checks that the two reducts differ and that they
/// normalise to the same term (and to the expected one, when known).
pub fn critical_pair_suite_with(rw: &Rewriter) -> SuiteReport {
    let checks = critical_pair_specs()
        .into_iter()
        .map(|spec| {
            let name = spec.name.clone();
            match spec.instantiate() {
                Err(e) => CheckResult {
                    name,
                    passed: false,
                    detail: e,
                },
                Ok(case) => judge_pair(rw, &case),
            }
        })
        .collect();
    SuiteReport {
        suite: "critical-pairs",
        checks,
    }
}

fn judge_pair(rw: &Rewriter, case: &PairCase) -> CheckResult {
    let fail = |detail: String| CheckResult {
        name: case.name.clone(),
        passed: false,
        detail,
    };
    if case.left == case.right {
        return fail(format!(
            "vacuous: both reducts are {}",
            print_term(&case.left)
        ));
    }
    let l = rw.normalize(&case.left, PAIR_FUEL);
    let r = rw.normalize(&case.right, PAIR_FUEL);
    if !l.is_normal() || !r.is_normal() {
        return fail("a reduct does not normalise within fuel".into());
    }
    if l.term != r.term {
        return fail(format!(
            "reducts normalise apart: {} vs {}",
            print_term(&l.term),
            print_term(&r.term)
        ));
    }
    if let Some(expected) = &case.expected {
        let e = rw.normalize(expected, PAIR_FUEL);
        if e.term != l.term {
            return fail(format!(
                "joined at {} instead of {}",
                print_term(&l.term),
                print_term(&e.term)
            ));
        }
    }
    CheckResult {
        name: case.name.clone(),
        passed: true,
        detail: format!("joins at {}", print_term(&l.term)),
    }
}

/// Fuel and seeds for the divergence checks of the restriction suite.
pub const RESTRICTION_FUEL: usize = 1_000;
pub const RESTRICTION_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// `(Y b) - (Y b)` for the identity `b`.
pub fn infinite_difference() -> Term {
    let yb = Term::app(
        stdlib::y_combinator(),
        Term::lambda_raw("x", Term::bound(0)),
    );
    yb.clone().minus(yb)
}

pub fn restriction_suite() -> SuiteReport {
    restriction_suite_with(&Rewriter::new())
}

/// The counterexamples that motivate the side conditions. Each check looks
/// at the redexes the engine offers; the first also follows five random
/// reduction sequences and fails if any of them passes through `0v`.
pub fn restriction_suite_with(rw: &Rewriter) -> SuiteReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(CheckResult {
            name: name.to_owned(),
            passed,
            detail,
        })
    };
    let root = |t: &Term| -> Vec<RuleId> {
        rw.enumerate_redexes(t)
            .into_iter()
            .filter(|r| r.path.is_empty())
            .map(|r| r.rule)
            .collect()
    };
    let names = |rules: &[RuleId]| rules.iter().map(|r| r.name()).collect::<Vec<_>>().join(",");
    let id = Term::lambda_raw("x", Term::bound(0));
    let yb = Term::app(stdlib::y_combinator(), id.clone());
    let ff = stdlib::false_term();

    // Factorising a divergent term
    let diff = infinite_difference();
    let at_root = root(&diff);
    check(
        "divergent-difference-not-factorised",
        !at_root.iter().any(|r| r.group() == RuleGroup::F),
        format!("root redexes: [{}]", names(&at_root)),
    );
    let mut reached = Vec::new();
    for seed in RESTRICTION_SEEDS {
        let tr = rw.trace(&diff, RESTRICTION_FUEL, Strategy::RandomSeeded(seed));
        if let Some(s) = tr.steps.iter().find(|s| s.after.is_zero()) {
            reached.push(format!("seed {seed} at step {}", s.step));
        }
    }
    check(
        "divergent-difference-never-zero",
        reached.is_empty(),
        if reached.is_empty() {
            format!("5 seeds, fuel {RESTRICTION_FUEL}")
        } else {
            format!("reached 0v: {}", reached.join("; "))
        },
    );

    // Factorising an open term under a binder
    let xf = Term::app(Term::bound(0), ff.clone());
    let body = xf.clone().minus(xf.clone());
    let ex2 = Term::app(
        Term::lambda_raw("x", body),
        Term::lambda_raw("y", yb.clone()),
    );
    let inside = rw
        .enumerate_redexes(&ex2)
        .into_iter()
        .filter(|r| r.path.first() == Some(&0) && r.rule.group() == RuleGroup::F)
        .count();
    check(
        "no-open-factorisation",
        inside == 0,
        format!("{inside} F redexes inside the abstraction"),
    );

    // Distributing a non-normal sum
    let lam_xf = Term::lambda_raw("x", xf.clone());
    let ex3 = Term::app(
        lam_xf.clone().minus(lam_xf.clone()),
        Term::lambda_raw("y", yb.clone()),
    );
    let at_root = root(&ex3);
    check(
        "no-distribution-of-non-normal-sum",
        !at_root.contains(&RuleId::ADistAppLeft),
        format!("root redexes: [{}]", names(&at_root)),
    );
    let open_sum = Term::app(Term::var("a").plus(Term::var("b")), yb.clone());
    let at_root = root(&open_sum);
    check(
        "no-distribution-of-open-sum",
        !at_root.contains(&RuleId::ADistAppLeft),
        format!("root redexes: [{}]", names(&at_root)),
    );
    let open_right = Term::app(id.clone(), Term::var("a").plus(Term::var("b")));
    let at_root = root(&open_right);
    check(
        "no-distribution-of-open-argument",
        at_root.is_empty(),
        format!("root redexes: [{}]", names(&at_root)),
    );

    // Scaling out of an open or non-normal term
    let ex4 = Term::app(
        Term::scaled(Scalar::ratio(1, 2), Term::var("a").plus(Term::var("b"))),
        yb.clone(),
    );
    let at_root = root(&ex4);
    check(
        "no-scaling-of-open-term",
        !at_root.contains(&RuleId::AScaleAppLeft),
        format!("root redexes: [{}]", names(&at_root)),
    );
    let ex4b = Term::app(ff.clone(), Term::scaled(Scalar::i(), yb.clone()));
    let at_root = root(&ex4b);
    check(
        "no-scaling-of-non-normal-term",
        !at_root.contains(&RuleId::AScaleAppRight),
        format!("root redexes: [{}]", names(&at_root)),
    );

    // β only on base arguments
    let copy = Term::lambda_raw("x", stdlib::pair(Term::bound(0), Term::bound(0)));
    let closed_sum = Term::app(copy.clone(), ff.clone().plus(stdlib::true_term()));
    let at_root = root(&closed_sum);
    check(
        "beta-waits-for-distribution",
        at_root == [RuleId::ADistAppRight],
        format!("root redexes: [{}]", names(&at_root)),
    );
    let open_sum_arg = Term::app(copy, Term::var("a").plus(Term::var("b")));
    let at_root = root(&open_sum_arg);
    check(
        "no-beta-on-open-sum",
        at_root.is_empty(),
        format!("root redexes: [{}]", names(&at_root)),
    );
    SuiteReport {
        suite: "restrictions",
        checks,
    }
}

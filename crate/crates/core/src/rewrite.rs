//! The conditional rewrite system L.
//!
//! Rules are matched modulo AC by construction: sums are flattened multisets,
//! so a factorisation redex is any pair of addends of a sum node. That covers
//! the extension rules with a spectator summand without implementing them
//! separately. `α.(u1 + ... + un)` and the two distribution rules rewrite all
//! addends in one step, which is the unique result of applying the binary rule
//! repeatedly over every bracketing.
//!
//! Side conditions:
//! - F rules: the factored `u` must be closed and L-normal.
//! - A distribution rules: the distributed sum must be closed and L-normal.
//! - A scaling rules: the scaled subterm `u` must be closed and L-normal.
//! - β: the argument must be an abstraction or a variable.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scalar::Scalar;
use crate::term::{Kind, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    EPlus0,
    EScale0,
    EScale1,
    EScaleZeroVec,
    EScaleScale,
    EScaleSum,
    FFactorBoth,
    FFactorOne,
    FFactorNone,
    ADistAppLeft,
    ADistAppRight,
    AScaleAppLeft,
    AScaleAppRight,
    AZeroAppLeft,
    AZeroAppRight,
    BBeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleGroup {
    E,
    F,
    A,
    B,
}

impl RuleId {
    pub const ALL: [RuleId; 16] = [
        RuleId::EPlus0,
        RuleId::EScale0,
        RuleId::EScale1,
        RuleId::EScaleZeroVec,
        RuleId::EScaleScale,
        RuleId::EScaleSum,
        RuleId::FFactorBoth,
        RuleId::FFactorOne,
        RuleId::FFactorNone,
        RuleId::ADistAppLeft,
        RuleId::ADistAppRight,
        RuleId::AScaleAppLeft,
        RuleId::AScaleAppRight,
        RuleId::AZeroAppLeft,
        RuleId::AZeroAppRight,
        RuleId::BBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::EPlus0 => "E-Plus0",
            RuleId::EScale0 => "E-Scale0",
            RuleId::EScale1 => "E-Scale1",
            RuleId::EScaleZeroVec => "E-ScaleZeroVec",
            RuleId::EScaleScale => "E-ScaleScale",
            RuleId::EScaleSum => "E-ScaleSum",
            RuleId::FFactorBoth => "F-FactorBoth",
            RuleId::FFactorOne => "F-FactorOne",
            RuleId::FFactorNone => "F-FactorNone",
            RuleId::ADistAppLeft => "A-DistAppLeft",
            RuleId::ADistAppRight => "A-DistAppRight",
            RuleId::AScaleAppLeft => "A-ScaleAppLeft",
            RuleId::AScaleAppRight => "A-ScaleAppRight",
            RuleId::AZeroAppLeft => "A-ZeroAppLeft",
            RuleId::AZeroAppRight => "A-ZeroAppRight",
            RuleId::BBeta => "B-Beta",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn group(self) -> RuleGroup {
        match self {
            RuleId::EPlus0
            | RuleId::EScale0
            | RuleId::EScale1
            | RuleId::EScaleZeroVec
            | RuleId::EScaleScale
            | RuleId::EScaleSum => RuleGroup::E,
            RuleId::FFactorBoth | RuleId::FFactorOne | RuleId::FFactorNone => RuleGroup::F,
            RuleId::BBeta => RuleGroup::B,
            _ => RuleGroup::A,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule instance at a position.
///
/// `path` lists child selectors from the root: 0 for the body of an
/// abstraction or of a scaled term, 0/1 for the function/argument of an
/// application, and the sorted index of a sum addend. `addends` is set for
/// factorisation only; for `F-FactorOne` the first index is the scaled addend.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub addends: Option<(usize, usize)>,
}

impl Redex {
    pub fn path_string(&self) -> String {
        format_path(&self.path)
    }
}

pub fn format_path(path: &[usize]) -> String {
    path.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("no subterm at path `{0}`")]
    BadPath(String),
    #[error("rule {rule} does not apply at path `{path}`")]
    NoMatch { rule: RuleId, path: String },
}

fn closed_normal(t: &Term) -> bool {
    t.is_closed() && t.is_normal()
}

#[derive(Clone, Copy)]
struct Guards {
    restricted_factorization: bool,
}

impl Guards {
    const STANDARD: Guards = Guards {
        restricted_factorization: true,
    };

    fn factorable(self, u: &Term) -> bool {
        !self.restricted_factorization || closed_normal(u)
    }
}

// Calls `emit` for every rule instance at the root of a node with this kind,
// in rule order; stops early when `emit` returns false.
fn root_redexes(
    kind: &Kind,
    guards: Guards,
    emit: &mut dyn FnMut(RuleId, Option<(usize, usize)>) -> bool,
) -> bool {
    match kind {
        Kind::Free(_) | Kind::Bound(_) | Kind::Zero | Kind::Lambda(..) => true,
        Kind::Scaled(alpha, u) => {
            if alpha.is_zero() && !emit(RuleId::EScale0, None) {
                return false;
            }
            if alpha.is_one() && !emit(RuleId::EScale1, None) {
                return false;
            }
            match u.kind() {
                Kind::Zero => emit(RuleId::EScaleZeroVec, None),
                Kind::Scaled(..) => emit(RuleId::EScaleScale, None),
                Kind::Sum(_) => emit(RuleId::EScaleSum, None),
                _ => true,
            }
        }
        Kind::Sum(items) => {
            if items.iter().any(Term::is_zero) && !emit(RuleId::EPlus0, None) {
                return false;
            }
            sum_factorizations(items, guards, emit)
        }
        Kind::Apply(f, a) => {
            if let Kind::Sum(_) = f.kind() {
                if closed_normal(f) && !emit(RuleId::ADistAppLeft, None) {
                    return false;
                }
            }
            if let Kind::Sum(_) = a.kind() {
                if closed_normal(a) && !emit(RuleId::ADistAppRight, None) {
                    return false;
                }
            }
            if let Kind::Scaled(_, u) = f.kind() {
                if closed_normal(u) && !emit(RuleId::AScaleAppLeft, None) {
                    return false;
                }
            }
            if let Kind::Scaled(_, u) = a.kind() {
                if closed_normal(u) && !emit(RuleId::AScaleAppRight, None) {
                    return false;
                }
            }
            if f.is_zero() && !emit(RuleId::AZeroAppLeft, None) {
                return false;
            }
            if a.is_zero() && !emit(RuleId::AZeroAppRight, None) {
                return false;
            }
            if matches!(f.kind(), Kind::Lambda(..)) && a.is_base() {
                return emit(RuleId::BBeta, None);
            }
            true
        }
    }
}

fn sum_factorizations(
    items: &[Term],
    guards: Guards,
    emit: &mut dyn FnMut(RuleId, Option<(usize, usize)>) -> bool,
) -> bool {
    // An F redex pairs two addends over the same base (`α.u` and `β.u`,
    // `u` and `u`) or an addend with a scaled copy of itself (`w` and
    // `α.w`). Index both keys instead of comparing every pair.
    let mut by_item: HashMap<&Term, Vec<usize>> = HashMap::new();
    let mut by_base: HashMap<&Term, Vec<usize>> = HashMap::new();
    for (k, t) in items.iter().enumerate() {
        by_item.entry(t).or_default().push(k);
        let base = match t.kind() {
            Kind::Scaled(_, u) => u,
            _ => t,
        };
        by_base.entry(base).or_default().push(k);
    }
    let mut candidates = BTreeSet::new();
    // every pair in a group factors the group's base, so one guard check
    // covers the group
    let groups = by_base
        .iter()
        .filter(|(base, m)| m.len() > 1 && guards.factorable(base));
    for (_, members) in groups {
        for (a, &i) in members.iter().enumerate() {
            candidates.extend(members[a + 1..].iter().map(|&j| (i, j)));
        }
    }
    for (i, t) in items.iter().enumerate() {
        if let Kind::Scaled(_, w) = t.kind() {
            if !guards.factorable(w) {
                continue;
            }
            for &j in by_item.get(w).into_iter().flatten() {
                candidates.insert((i.min(j), i.max(j)));
            }
        }
    }
    // grouped by rule so that the emission order is the rule order
    for rule in [RuleId::FFactorBoth, RuleId::FFactorOne, RuleId::FFactorNone] {
        for &(i, j) in &candidates {
            let (a, b) = (&items[i], &items[j]);
            let pair = match rule {
                RuleId::FFactorBoth => match (a.kind(), b.kind()) {
                    (Kind::Scaled(_, u), Kind::Scaled(_, v)) if u == v && guards.factorable(u) => {
                        Some((i, j))
                    }
                    _ => None,
                },
                RuleId::FFactorOne => match (a.kind(), b.kind()) {
                    (Kind::Scaled(_, u), _) if u == b && guards.factorable(b) => Some((i, j)),
                    (_, Kind::Scaled(_, v)) if v == a && guards.factorable(a) => Some((j, i)),
                    _ => None,
                },
                _ => (a == b && guards.factorable(a)).then_some((i, j)),
            };
            if let Some(p) = pair {
                if !emit(rule, Some(p)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether some rule applies at the root of a node of this kind, assuming
/// its children are already built.
pub(crate) fn has_root_redex(kind: &Kind) -> bool {
    let mut found = false;
    root_redexes(kind, Guards::STANDARD, &mut |_, _| {
        found = true;
        false
    });
    found
}

// The contractum of `rule` at the root of `t`.
fn contract(t: &Term, rule: RuleId, addends: Option<(usize, usize)>) -> Option<Term> {
    let kind = t.kind();
    Some(match (rule, kind) {
        (RuleId::EPlus0, Kind::Sum(items)) => {
            let at = items.iter().position(Term::is_zero)?;
            let mut rest = items.clone();
            rest.remove(at);
            Term::sum(rest)
        }
        (RuleId::EScale0, Kind::Scaled(..)) | (RuleId::EScaleZeroVec, Kind::Scaled(..)) => {
            Term::zero()
        }
        (RuleId::EScale1, Kind::Scaled(_, u)) => u.clone(),
        (RuleId::EScaleScale, Kind::Scaled(alpha, inner)) => match inner.kind() {
            Kind::Scaled(beta, u) => Term::scaled(alpha.mul(beta), u.clone()),
            _ => return None,
        },
        (RuleId::EScaleSum, Kind::Scaled(alpha, inner)) => match inner.kind() {
            Kind::Sum(items) => {
                Term::sum(items.iter().map(|u| Term::scaled(alpha.clone(), u.clone())))
            }
            _ => return None,
        },
        (RuleId::FFactorBoth | RuleId::FFactorOne | RuleId::FFactorNone, Kind::Sum(items)) => {
            let (i, j) = addends?;
            let (coeff, u) = match (rule, items[i].kind(), items[j].kind()) {
                (RuleId::FFactorBoth, Kind::Scaled(a, u), Kind::Scaled(b, _)) => (a.add(b), u),
                (RuleId::FFactorOne, Kind::Scaled(a, u), _) => (a.add(&Scalar::one()), u),
                (RuleId::FFactorNone, _, _) => (Scalar::from_integer(2), &items[i]),
                _ => return None,
            };
            let mut rest: Vec<Term> = items
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, t)| t.clone())
                .collect();
            rest.push(Term::scaled(coeff, u.clone()));
            Term::sum(rest)
        }
        (RuleId::ADistAppLeft, Kind::Apply(f, w)) => match f.kind() {
            Kind::Sum(items) => Term::sum(items.iter().map(|u| Term::app(u.clone(), w.clone()))),
            _ => return None,
        },
        (RuleId::ADistAppRight, Kind::Apply(w, a)) => match a.kind() {
            Kind::Sum(items) => Term::sum(items.iter().map(|u| Term::app(w.clone(), u.clone()))),
            _ => return None,
        },
        (RuleId::AScaleAppLeft, Kind::Apply(f, v)) => match f.kind() {
            Kind::Scaled(alpha, u) => Term::scaled(alpha.clone(), Term::app(u.clone(), v.clone())),
            _ => return None,
        },
        (RuleId::AScaleAppRight, Kind::Apply(v, a)) => match a.kind() {
            Kind::Scaled(alpha, u) => Term::scaled(alpha.clone(), Term::app(v.clone(), u.clone())),
            _ => return None,
        },
        (RuleId::AZeroAppLeft | RuleId::AZeroAppRight, Kind::Apply(..)) => Term::zero(),
        (RuleId::BBeta, Kind::Apply(f, b)) => match f.kind() {
            Kind::Lambda(_, body) => Term::instantiate(body, b),
            _ => return None,
        },
        _ => return None,
    })
}

/// How the next redex is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Leftmost-outermost; at one position E before F before A before B.
    Deterministic,
    /// Uniform choice among all redexes, reproducible per seed.
    RandomSeeded(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Normal,
    FuelExhausted,
    /// The term outgrew the configured size bound before fuel ran out.
    SizeLimit,
}

#[derive(Clone, Debug)]
pub struct NormalizeOutcome {
    pub status: Status,
    pub term: Term,
    pub steps: usize,
}

impl NormalizeOutcome {
    pub fn is_normal(&self) -> bool {
        self.status == Status::Normal
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub step: usize,
    pub rule: RuleId,
    pub path: Vec<usize>,
    pub before: Term,
    pub after: Term,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub outcome: NormalizeOutcome,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    step: usize,
    rule: &'a str,
    path: String,
    before: String,
    after: String,
}

impl Trace {
    /// `k<TAB>RULE<TAB>path<TAB>after` per step, steps numbered from 1.
    pub fn text_lines(&self, print: &dyn Fn(&Term) -> String) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| {
                format!(
                    "{}\t{}\t{}\t{}",
                    s.step,
                    s.rule,
                    format_path(&s.path),
                    print(&s.after)
                )
            })
            .collect()
    }

    /// One JSON object per step.
    pub fn machine_lines(&self, print: &dyn Fn(&Term) -> String) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| {
                serde_json::to_string(&TraceRecord {
                    step: s.step,
                    rule: s.rule.name(),
                    path: format_path(&s.path),
                    before: print(&s.before),
                    after: print(&s.after),
                })
                .expect("trace records serialize")
            })
            .collect()
    }
}

/// The rewrite engine. The default instance is the system L; the only knob
/// besides resource bounds is a debugging switch that drops the closed-normal
/// guard of the factorisation rules.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rewriter {
    unrestricted_factorization: bool,
    max_size: Option<usize>,
}

impl Rewriter {
    pub fn new() -> Self {
        Rewriter::default()
    }

    /// Stops normalisation with [`Status::SizeLimit`] once the term exceeds
    /// `limit` nodes.
    pub fn with_max_size(mut self, limit: usize) -> Self {
        self.max_size = Some(limit);
        self
    }

    /// Drops the guard on F rules. Breaks confluence; only for checking that
    /// the test suites notice.
    pub fn with_unrestricted_factorization(mut self) -> Self {
        self.unrestricted_factorization = true;
        self
    }

    fn guards(&self) -> Guards {
        Guards {
            restricted_factorization: !self.unrestricted_factorization,
        }
    }

    // In standard mode a normal subterm holds no redex and is skipped.
    fn may_contain_redex(&self, t: &Term) -> bool {
        self.unrestricted_factorization || !t.is_normal()
    }

    fn visit(&self, t: &Term, path: &mut Vec<usize>, out: &mut dyn FnMut(Redex) -> bool) -> bool {
        if !self.may_contain_redex(t) {
            return true;
        }
        let mut keep_going = true;
        root_redexes(t.kind(), self.guards(), &mut |rule, addends| {
            keep_going = out(Redex {
                path: path.clone(),
                rule,
                addends,
            });
            keep_going
        });
        if !keep_going {
            return false;
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            let cont = self.visit(c, path, out);
            path.pop();
            if !cont {
                return false;
            }
        }
        true
    }

    /// Every redex of `t`, outermost first, left to right, in rule order at
    /// each position.
    pub fn enumerate_redexes(&self, t: &Term) -> Vec<Redex> {
        let mut found = Vec::new();
        self.visit(t, &mut Vec::new(), &mut |r| {
            found.push(r);
            true
        });
        found
    }

    /// The redex the deterministic strategy contracts next.
    pub fn first_redex(&self, t: &Term) -> Option<Redex> {
        let mut found = None;
        self.visit(t, &mut Vec::new(), &mut |r| {
            found = Some(r);
            false
        });
        found
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        self.first_redex(t).is_none()
    }

    pub fn apply_redex(&self, t: &Term, r: &Redex) -> Result<Term, RewriteError> {
        let node = t
            .at(&r.path)
            .ok_or_else(|| RewriteError::BadPath(r.path_string()))?;
        let mut matches = false;
        root_redexes(node.kind(), self.guards(), &mut |rule, addends| {
            matches = rule == r.rule && addends == r.addends;
            !matches
        });
        let no_match = || RewriteError::NoMatch {
            rule: r.rule,
            path: r.path_string(),
        };
        if !matches {
            return Err(no_match());
        }
        let contractum = contract(node, r.rule, r.addends).ok_or_else(no_match)?;
        t.replace_at(&r.path, contractum)
            .ok_or_else(|| RewriteError::BadPath(r.path_string()))
    }

    pub fn normalize(&self, t: &Term, fuel: usize) -> NormalizeOutcome {
        self.normalize_with_strategy(t, fuel, Strategy::Deterministic)
    }

    pub fn normalize_with_strategy(
        &self,
        t: &Term,
        fuel: usize,
        strategy: Strategy,
    ) -> NormalizeOutcome {
        self.run(t, fuel, strategy, &mut |_| {})
    }

    pub fn trace(&self, t: &Term, fuel: usize, strategy: Strategy) -> Trace {
        let mut steps = Vec::new();
        let outcome = self.run(t, fuel, strategy, &mut |s| steps.push(s));
        Trace { steps, outcome }
    }

    fn run(
        &self,
        t: &Term,
        fuel: usize,
        strategy: Strategy,
        record: &mut dyn FnMut(TraceStep),
    ) -> NormalizeOutcome {
        let mut rng = match strategy {
            Strategy::RandomSeeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            Strategy::Deterministic => None,
        };
        let mut current = t.clone();
        let mut steps = 0;
        loop {
            let redex = match rng.as_mut() {
                None => self.first_redex(&current),
                Some(rng) => {
                    let mut all = self.enumerate_redexes(&current);
                    if all.is_empty() {
                        None
                    } else {
                        let k = rng.gen_range(0..all.len());
                        Some(all.swap_remove(k))
                    }
                }
            };
            let Some(redex) = redex else {
                return NormalizeOutcome {
                    status: Status::Normal,
                    term: current,
                    steps,
                };
            };
            if steps >= fuel {
                return NormalizeOutcome {
                    status: Status::FuelExhausted,
                    term: current,
                    steps,
                };
            }
            if self.max_size.is_some_and(|m| current.size() > m) {
                return NormalizeOutcome {
                    status: Status::SizeLimit,
                    term: current,
                    steps,
                };
            }
            let next = self
                .apply_redex(&current, &redex)
                .expect("enumerated redexes apply");
            steps += 1;
            record(TraceStep {
                step: steps,
                rule: redex.rule,
                path: redex.path,
                before: current,
                after: next.clone(),
            });
            current = next;
        }
    }
}

pub fn enumerate_redexes(t: &Term) -> Vec<Redex> {
    Rewriter::new().enumerate_redexes(t)
}

pub fn apply_redex(t: &Term, r: &Redex) -> Result<Term, RewriteError> {
    Rewriter::new().apply_redex(t, r)
}

/// Structural normality test; agrees with `enumerate_redexes(t).is_empty()`.
pub fn is_normal(t: &Term) -> bool {
    t.is_normal()
}

pub fn normalize(t: &Term, fuel: usize) -> NormalizeOutcome {
    Rewriter::new().normalize(t, fuel)
}

pub fn normalize_with_strategy(t: &Term, fuel: usize, strategy: Strategy) -> NormalizeOutcome {
    Rewriter::new().normalize_with_strategy(t, fuel, strategy)
}

pub fn trace(t: &Term, fuel: usize, strategy: Strategy) -> Trace {
    Rewriter::new().trace(t, fuel, strategy)
}

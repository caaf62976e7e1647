//! Vector terms.
//!
//! Terms are immutable and shared through [`Arc`]. Bound variables are stored
//! as de Bruijn indices, so α-equivalent terms are structurally identical;
//! binder names survive only as printing hints that take no part in equality.
//! Sums are flattened multisets kept in a fixed structural order, which makes
//! `+` associative and commutative at the representation level. Together this
//! means `==` on [`Term`] *is* equality modulo α and AC.
//!
//! Each node caches its size, a structural hash, how many enclosing binders
//! its loose indices need, whether it mentions free names, and whether it is
//! L-normal. The normality flag is what makes the conditional rules cheap to
//! test.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::rewrite;
use crate::scalar::Scalar;

/// A free variable name: `[a-zA-Z][a-zA-Z0-9_']*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(String);

impl VarName {
    pub fn new(name: &str) -> Option<VarName> {
        is_identifier(name).then(|| VarName(name.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Binder name used when printing. Never observed by equality, ordering or
/// hashing.
#[derive(Clone, Debug)]
pub struct Hint(pub String);

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

// Nodes live behind an Arc, so variant size only affects the node allocation.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Free(VarName),
    /// de Bruijn index, 0 = innermost enclosing binder.
    Bound(u32),
    Lambda(Hint, Term),
    Apply(Term, Term),
    Zero,
    Scaled(Scalar, Term),
    /// At least two addends, none of them a sum, in ascending order.
    Sum(Vec<Term>),
}

impl Kind {
    fn tag(&self) -> u8 {
        match self {
            Kind::Free(_) => 0,
            Kind::Bound(_) => 1,
            Kind::Lambda(..) => 2,
            Kind::Apply(..) => 3,
            Kind::Zero => 4,
            Kind::Scaled(..) => 5,
            Kind::Sum(_) => 6,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Meta {
    hash: u64,
    size: usize,
    loose: u32,
    has_free: bool,
    normal: bool,
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    meta: Meta,
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    fn build(kind: Kind) -> Term {
        let mut hasher = DefaultHasher::new();
        kind.tag().hash(&mut hasher);
        let (size, loose, has_free, children_normal) = match &kind {
            Kind::Free(name) => {
                name.hash(&mut hasher);
                (1, 0, true, true)
            }
            Kind::Bound(i) => {
                i.hash(&mut hasher);
                (1, i + 1, false, true)
            }
            Kind::Zero => (1, 0, false, true),
            Kind::Lambda(_, body) => {
                body.meta().hash.hash(&mut hasher);
                let m = body.meta();
                (1 + m.size, m.loose.saturating_sub(1), m.has_free, m.normal)
            }
            Kind::Apply(f, a) => {
                f.meta().hash.hash(&mut hasher);
                a.meta().hash.hash(&mut hasher);
                let (m, n) = (f.meta(), a.meta());
                (
                    1 + m.size + n.size,
                    m.loose.max(n.loose),
                    m.has_free || n.has_free,
                    m.normal && n.normal,
                )
            }
            Kind::Scaled(s, t) => {
                s.hash(&mut hasher);
                t.meta().hash.hash(&mut hasher);
                let m = t.meta();
                (2 + m.size, m.loose, m.has_free, m.normal)
            }
            Kind::Sum(items) => {
                let mut acc = (1, 0, false, true);
                for t in items {
                    t.meta().hash.hash(&mut hasher);
                    let m = t.meta();
                    acc = (
                        acc.0 + m.size,
                        acc.1.max(m.loose),
                        acc.2 || m.has_free,
                        acc.3 && m.normal,
                    );
                }
                acc
            }
        };
        let normal = children_normal && !rewrite::has_root_redex(&kind);
        Term(Arc::new(Node {
            meta: Meta {
                hash: hasher.finish(),
                size,
                loose,
                has_free,
                normal,
            },
            kind,
        }))
    }

    fn meta(&self) -> &Meta {
        &self.0.meta
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// A free variable.
    ///
    /// # Panics
    /// If `name` is not a valid identifier.
    pub fn var(name: &str) -> Term {
        let name = VarName::new(name).unwrap_or_else(|| panic!("invalid variable name {name:?}"));
        Term::free(name)
    }

    pub fn free(name: VarName) -> Term {
        Term::build(Kind::Free(name))
    }

    pub fn bound(index: u32) -> Term {
        Term::build(Kind::Bound(index))
    }

    pub fn zero() -> Term {
        Term::build(Kind::Zero)
    }

    /// `λname.body`, binding the free occurrences of `name` in `body`.
    pub fn lam(name: &str, body: Term) -> Term {
        let abstracted = abstract_free(&body, name, 0);
        Term::lambda_raw(name, abstracted)
    }

    /// Binder over a body already in de Bruijn form.
    pub fn lambda_raw(hint: &str, body: Term) -> Term {
        Term::build(Kind::Lambda(Hint(hint.to_owned()), body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::build(Kind::Apply(fun, arg))
    }

    /// Left-nested application `f a1 ... an`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn scaled(scalar: Scalar, term: Term) -> Term {
        Term::build(Kind::Scaled(scalar, term))
    }

    /// The sum of `items`, flattened and sorted. One addend is returned as
    /// itself; no addends give the null vector.
    pub fn sum(items: impl IntoIterator<Item = Term>) -> Term {
        let mut flat = Vec::new();
        for t in items {
            match t.kind() {
                Kind::Sum(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(t),
            }
        }
        match flat.len() {
            0 => Term::zero(),
            1 => flat.pop().unwrap(),
            _ => {
                flat.sort();
                Term::build(Kind::Sum(flat))
            }
        }
    }

    pub fn plus(self, other: Term) -> Term {
        Term::sum([self, other])
    }

    /// `t - u`, sugar for `t + (-1).u`.
    pub fn minus(self, other: Term) -> Term {
        Term::sum([self, Term::scaled(Scalar::from_integer(-1), other)])
    }

    pub fn size(&self) -> usize {
        self.meta().size
    }

    /// Number of enclosing binders this term's loose indices refer to.
    pub fn loose_depth(&self) -> u32 {
        self.meta().loose
    }

    pub fn has_free_names(&self) -> bool {
        self.meta().has_free
    }

    /// No free names and no dangling de Bruijn indices.
    pub fn is_closed(&self) -> bool {
        self.meta().loose == 0 && !self.meta().has_free
    }

    /// An abstraction or a variable.
    pub fn is_base(&self) -> bool {
        matches!(
            self.kind(),
            Kind::Lambda(..) | Kind::Free(_) | Kind::Bound(_)
        )
    }

    /// True iff no rule of L applies anywhere in the term.
    pub fn is_normal(&self) -> bool {
        self.meta().normal
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind(), Kind::Zero)
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut out);
        out
    }

    pub fn children(&self) -> Vec<&Term> {
        match self.kind() {
            Kind::Free(_) | Kind::Bound(_) | Kind::Zero => vec![],
            Kind::Lambda(_, b) | Kind::Scaled(_, b) => vec![b],
            Kind::Apply(f, a) => vec![f, a],
            Kind::Sum(items) => items.iter().collect(),
        }
    }

    pub fn child(&self, index: usize) -> Option<&Term> {
        match (self.kind(), index) {
            (Kind::Lambda(_, b), 0) | (Kind::Scaled(_, b), 0) => Some(b),
            (Kind::Apply(f, _), 0) => Some(f),
            (Kind::Apply(_, a), 1) => Some(a),
            (Kind::Sum(items), i) => items.get(i),
            _ => None,
        }
    }

    /// The subterm addressed by `path`.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.child(i))
    }

    /// Replaces child `index` and rebuilds this node. A sum re-flattens and
    /// re-sorts, so sibling indices may move.
    pub fn with_child(&self, index: usize, new: Term) -> Option<Term> {
        Some(match (self.kind(), index) {
            (Kind::Lambda(h, _), 0) => Term::build(Kind::Lambda(h.clone(), new)),
            (Kind::Scaled(s, _), 0) => Term::scaled(s.clone(), new),
            (Kind::Apply(_, a), 0) => Term::app(new, a.clone()),
            (Kind::Apply(f, _), 1) => Term::app(f.clone(), new),
            (Kind::Sum(items), i) if i < items.len() => {
                let mut items = items.clone();
                items[i] = new;
                Term::sum(items)
            }
            _ => return None,
        })
    }

    /// Replaces the subterm at `path`.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(new),
            Some((&i, rest)) => {
                let replaced = self.child(i)?.replace_at(rest, new)?;
                self.with_child(i, replaced)
            }
        }
    }

    /// Capture-avoiding substitution of `b` for the free variable `x`.
    pub fn substitute(&self, x: &VarName, b: &Term) -> Term {
        substitute_free(self, x, b, 0)
    }

    /// `body[arg/0]` for the body of an abstraction: the β-contractum.
    pub fn instantiate(body: &Term, arg: &Term) -> Term {
        instantiate_at(body, arg, 0)
    }

    /// Shifts loose indices `>= cutoff` by `delta`.
    pub fn shifted(&self, delta: i64, cutoff: u32) -> Term {
        shift(self, delta, cutoff)
    }

    /// Deterministic representative with canonical binder names.
    /// `canonicalize(t) == canonicalize(u)` iff `alpha_ac_equal(t, u)`.
    pub fn canonicalize(&self) -> Term {
        rename_hints(self, 0)
    }
}

/// Equality up to α-renaming and AC of `+`.
pub fn alpha_ac_equal(t: &Term, u: &Term) -> bool {
    t == u
}

pub fn free_vars(t: &Term) -> BTreeSet<VarName> {
    t.free_vars()
}

pub fn is_closed(t: &Term) -> bool {
    t.is_closed()
}

pub fn is_base(t: &Term) -> bool {
    t.is_base()
}

pub fn substitute(t: &Term, x: &VarName, b: &Term) -> Term {
    t.substitute(x, b)
}

pub fn canonicalize(t: &Term) -> Term {
    t.canonicalize()
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.meta().hash == other.meta().hash && self.kind() == other.kind())
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.meta().hash);
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (self.kind(), other.kind());
        a.tag().cmp(&b.tag()).then_with(|| match (a, b) {
            (Kind::Free(x), Kind::Free(y)) => x.cmp(y),
            (Kind::Bound(i), Kind::Bound(j)) => i.cmp(j),
            (Kind::Lambda(_, s), Kind::Lambda(_, t)) => s.cmp(t),
            (Kind::Apply(f, a), Kind::Apply(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Kind::Scaled(s, t), Kind::Scaled(r, u)) => t.cmp(u).then_with(|| s.cmp(r)),
            (Kind::Sum(xs), Kind::Sum(ys)) => xs.cmp(ys),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::print_term(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_term(self))
    }
}

fn collect_free(t: &Term, out: &mut BTreeSet<VarName>) {
    if !t.has_free_names() {
        return;
    }
    match t.kind() {
        Kind::Free(x) => {
            out.insert(x.clone());
        }
        _ => {
            for c in t.children() {
                collect_free(c, out);
            }
        }
    }
}

// Rebuilds `t` with `f` applied to each child, reusing the node when nothing
// changed.
fn map_children(t: &Term, mut f: impl FnMut(&Term, u32) -> Term) -> Term {
    match t.kind() {
        Kind::Free(_) | Kind::Bound(_) | Kind::Zero => t.clone(),
        Kind::Lambda(h, body) => {
            let nb = f(body, 1);
            if nb.ptr_eq(body) {
                t.clone()
            } else {
                Term::build(Kind::Lambda(h.clone(), nb))
            }
        }
        Kind::Apply(a, b) => {
            let (na, nb) = (f(a, 0), f(b, 0));
            if na.ptr_eq(a) && nb.ptr_eq(b) {
                t.clone()
            } else {
                Term::app(na, nb)
            }
        }
        Kind::Scaled(s, body) => {
            let nb = f(body, 0);
            if nb.ptr_eq(body) {
                t.clone()
            } else {
                Term::scaled(s.clone(), nb)
            }
        }
        Kind::Sum(items) => {
            let new: Vec<Term> = items.iter().map(|c| f(c, 0)).collect();
            if new.iter().zip(items).all(|(n, o)| n.ptr_eq(o)) {
                t.clone()
            } else {
                Term::sum(new)
            }
        }
    }
}

impl Term {
    fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if delta == 0 || t.loose_depth() <= cutoff {
        return t.clone();
    }
    match t.kind() {
        Kind::Bound(i) => {
            let moved = i64::from(*i) + delta;
            assert!(moved >= 0, "negative de Bruijn index after shift");
            Term::bound(moved as u32)
        }
        _ => map_children(t, |c, binders| shift(c, delta, cutoff + binders)),
    }
}

fn instantiate_at(body: &Term, arg: &Term, depth: u32) -> Term {
    if body.loose_depth() <= depth {
        return body.clone();
    }
    match body.kind() {
        Kind::Bound(i) if *i == depth => shift(arg, i64::from(depth), 0),
        Kind::Bound(i) if *i > depth => Term::bound(i - 1),
        _ => map_children(body, |c, binders| instantiate_at(c, arg, depth + binders)),
    }
}

fn abstract_free(t: &Term, name: &str, depth: u32) -> Term {
    if !t.has_free_names() {
        return shift(t, 1, depth);
    }
    match t.kind() {
        Kind::Free(x) if x.as_str() == name => Term::bound(depth),
        Kind::Free(_) => t.clone(),
        _ => map_children(t, |c, binders| abstract_free(c, name, depth + binders)),
    }
}

fn substitute_free(t: &Term, x: &VarName, b: &Term, depth: u32) -> Term {
    if !t.has_free_names() {
        return t.clone();
    }
    match t.kind() {
        Kind::Free(y) if y == x => shift(b, i64::from(depth), 0),
        Kind::Free(_) => t.clone(),
        _ => map_children(t, |c, binders| substitute_free(c, x, b, depth + binders)),
    }
}

fn rename_hints(t: &Term, depth: u32) -> Term {
    match t.kind() {
        Kind::Lambda(_, body) => Term::build(Kind::Lambda(
            Hint(format!("x{depth}")),
            rename_hints(body, depth + 1),
        )),
        Kind::Free(_) | Kind::Bound(_) | Kind::Zero => t.clone(),
        Kind::Apply(f, a) => Term::app(rename_hints(f, depth), rename_hints(a, depth)),
        Kind::Scaled(s, b) => Term::scaled(s.clone(), rename_hints(b, depth)),
        Kind::Sum(items) => Term::sum(items.iter().map(|c| rename_hints(c, depth))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }
    fn tt() -> Term {
        Term::lam("x", Term::lam("y", x()))
    }
    fn ff() -> Term {
        Term::lam("x", Term::lam("y", y()))
    }
    fn names(vs: &[&str]) -> BTreeSet<VarName> {
        vs.iter().map(|v| VarName::new(v).unwrap()).collect()
    }

    #[test]
    fn free_vars_examples() {
        assert!(Term::lam("x", x()).free_vars().is_empty());
        let t = x().plus(Term::scaled(Scalar::ratio(1, 2), y()));
        assert_eq!(t.free_vars(), names(&["x", "y"]));
        assert_eq!(
            Term::lam("x", Term::app(x(), y())).free_vars(),
            names(&["y"])
        );
    }

    #[test]
    fn closedness() {
        assert!(tt().is_closed());
        assert!(!x().is_closed());
        let t = Term::scaled(Scalar::half_sqrt2(), ff().plus(tt()));
        assert!(t.is_closed());
        // a bound variable seen on its own is not closed
        match Term::lam("x", x()).kind() {
            Kind::Lambda(_, body) => assert!(!body.is_closed()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn base_terms() {
        assert!(Term::lam("x", x()).is_base());
        assert!(x().is_base());
        assert!(!tt().plus(ff()).is_base());
        assert!(!Term::zero().is_base());
    }

    #[test]
    fn substitution_examples() {
        let id = Term::lam("y", y());
        assert_eq!(x().substitute(&VarName::new("x").unwrap(), &id), id);

        // λy.x with x := y must not capture
        let t = Term::lam("y", x()).substitute(&VarName::new("x").unwrap(), &y());
        match t.kind() {
            Kind::Lambda(_, body) => assert_eq!(body, &y()),
            _ => panic!("expected an abstraction"),
        }
        assert_eq!(t.to_string(), "\\y'.y");

        let v = Term::lam("z", Term::var("z"));
        let doubled = x().plus(x()).substitute(&VarName::new("x").unwrap(), &v);
        match doubled.kind() {
            Kind::Sum(items) => assert_eq!(items, &vec![v.clone(), v.clone()]),
            _ => panic!("expected a sum"),
        }
    }

    #[test]
    fn substitution_reflattens() {
        let t = x().plus(y());
        let b = Term::var("a").plus(Term::var("b"));
        let r = t.substitute(&VarName::new("x").unwrap(), &b);
        match r.kind() {
            Kind::Sum(items) => assert_eq!(items.len(), 3),
            _ => panic!(),
        }
    }

    #[test]
    fn alpha_ac_examples() {
        assert!(alpha_ac_equal(&Term::lam("x", x()), &Term::lam("y", y())));
        let (a, b, c) = (Term::var("a"), Term::var("b"), Term::var("c"));
        let left = a.clone().plus(b.clone()).plus(c.clone());
        let right = c.plus(b.plus(a));
        assert!(alpha_ac_equal(&left, &right));
        let u = Term::lam("x", x());
        assert!(!alpha_ac_equal(&Term::scaled(Scalar::one(), u.clone()), &u));
    }

    #[test]
    fn canonicalize_examples() {
        let (a, b) = (Term::var("a"), Term::var("b"));
        assert_eq!(
            a.clone().plus(b.clone()).canonicalize(),
            b.clone().plus(a.clone()).canonicalize()
        );
        assert_eq!(
            Term::lam("z", Term::var("z")).canonicalize(),
            Term::lam("w", Term::var("w")).canonicalize()
        );
        let t = a.clone().plus(b.clone()).plus(a.clone()).canonicalize();
        match t.kind() {
            Kind::Sum(items) => assert_eq!(items, &vec![a.clone(), a, b]),
            _ => panic!(),
        }
    }

    #[test]
    fn lam_under_binders_keeps_outer_references() {
        // λa.λb.(a b) built inside-out through `lam`
        let t = Term::lam(
            "a",
            Term::lam("b", Term::app(Term::var("a"), Term::var("b"))),
        );
        match t.kind() {
            Kind::Lambda(_, inner) => match inner.kind() {
                Kind::Lambda(_, body) => {
                    assert_eq!(body, &Term::app(Term::bound(1), Term::bound(0)))
                }
                _ => panic!(),
            },
            _ => panic!(),
        }
    }

    #[test]
    fn instantiate_shifts_arguments_with_loose_indices() {
        // under one binder: (λz. z #1) #0  →  #0 #0
        let body = Term::app(Term::bound(0), Term::bound(1));
        let r = Term::instantiate(&body, &Term::bound(0));
        assert_eq!(r, Term::app(Term::bound(0), Term::bound(0)));
        // argument referring outward is shifted when it crosses a binder
        let body = Term::lambda_raw("w", Term::bound(1));
        let r = Term::instantiate(&body, &Term::bound(3));
        assert_eq!(r, Term::lambda_raw("w", Term::bound(4)));
    }

    #[test]
    fn replace_at_resorts_sums() {
        let (a, b, c) = (Term::var("a"), Term::var("b"), Term::var("c"));
        let t = a.clone().plus(b.clone());
        let r = t.replace_at(&[0], c.clone()).unwrap();
        assert_eq!(r, b.plus(c));
    }
}

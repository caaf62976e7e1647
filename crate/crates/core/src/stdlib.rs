//! Encodings of booleans, gates, tensors, numerals and the Deutsch
//! algorithm, both as Rust constructors and as the shipped `prelude.lal`.

use std::path::Path;

use crate::parser::{parse_program, Bindings, ParseError, PrettyNames};
use crate::rewrite::{Rewriter, Status};
use crate::scalar::Scalar;
use crate::term::Term;

/// Source of the shipped prelude.
pub const PRELUDE_SOURCE: &str = include_str!("../lal/prelude.lal");

fn v(name: &str) -> Term {
    Term::var(name)
}

fn lam2(x: &str, y: &str, body: Term) -> Term {
    Term::lam(x, Term::lam(y, body))
}

pub fn true_term() -> Term {
    lam2("x", "y", v("x"))
}

pub fn false_term() -> Term {
    lam2("x", "y", v("y"))
}

/// `[t]`: a dummy abstraction turning any term into a base vector.
pub fn quote(t: &Term) -> Term {
    Term::lambda_raw("x", t.shifted(1, 0))
}

/// `{t}`: applies `t` to `false`.
pub fn unquote(t: &Term) -> Term {
    Term::app(t.clone(), false_term())
}

pub fn not_gate() -> Term {
    Term::lam("y", Term::apps(v("y"), [false_term(), true_term()]))
}

pub fn phase_gate() -> Term {
    let on = quote(&Term::scaled(Scalar::omega8(), true_term()));
    let off = quote(&false_term());
    Term::lam("y", unquote(&Term::apps(v("y"), [on, off])))
}

/// Maps `false` to `(sqrt2/2).(false + true)` and `true` to
/// `(sqrt2/2).(false - true)`.
pub fn hadamard() -> Term {
    let plus = Term::scaled(Scalar::half_sqrt2(), false_term().plus(true_term()));
    let minus = Term::scaled(Scalar::half_sqrt2(), false_term().minus(true_term()));
    Term::lam(
        "y",
        unquote(&Term::apps(v("y"), [quote(&minus), quote(&plus)])),
    )
}

pub fn tensor() -> Term {
    Term::lam("x", lam2("y", "f", Term::apps(v("f"), [v("x"), v("y")])))
}

/// `a ⊗ b`, unreduced.
pub fn pair(a: Term, b: Term) -> Term {
    Term::apps(tensor(), [a, b])
}

pub fn pi1() -> Term {
    Term::lam("x", Term::app(v("x"), true_term()))
}

pub fn pi2() -> Term {
    Term::lam("x", Term::app(v("x"), false_term()))
}

/// Applies two one-wire functions to the components of a pair.
pub fn big_tensor() -> Term {
    let left = Term::app(v("f"), Term::app(pi1(), v("x")));
    let right = Term::app(v("g"), Term::app(pi2(), v("x")));
    Term::lam("f", lam2("g", "x", pair(left, right)))
}

/// `f ⊗̄ g`, unreduced.
pub fn big_pair(f: Term, g: Term) -> Term {
    Term::apps(big_tensor(), [f, g])
}

pub fn hadamard2() -> Term {
    big_pair(hadamard(), hadamard())
}

pub fn cnot() -> Term {
    let first = Term::app(pi1(), v("x"));
    let second = Term::app(pi2(), v("x"));
    let target = Term::apps(
        first.clone(),
        [Term::app(not_gate(), second.clone()), second],
    );
    Term::lam("x", pair(first, target))
}

pub fn deutsch1() -> Term {
    let input = Term::app(hadamard2(), pair(false_term(), true_term()));
    Term::lam("x", Term::app(hadamard2(), Term::app(v("x"), input)))
}

/// `λn.λx.(Hn (x (Hn (n true λy.(false ⊗ y)))))` with
/// `Hn = n H λy.(H ⊗̄ y)`.
pub fn deutsch() -> Term {
    let hn = || {
        Term::apps(
            v("n"),
            [hadamard(), Term::lam("y", big_pair(hadamard(), v("y")))],
        )
    };
    let input = Term::apps(
        v("n"),
        [true_term(), Term::lam("y", pair(false_term(), v("y")))],
    );
    let body = Term::app(hn(), Term::app(v("x"), Term::app(hn(), input)));
    lam2("n", "x", body)
}

pub fn y_combinator() -> Term {
    let half = Term::lam("x", v("y").plus(Term::app(v("x"), v("x"))));
    Term::lam("y", Term::app(half.clone(), half))
}

/// `λx.λf.(f (f … (f x)))` with `n` applications.
pub fn church(n: usize) -> Term {
    let mut body = v("x");
    for _ in 0..n {
        body = Term::app(v("f"), body);
    }
    lam2("x", "f", body)
}

/// Oracle for a constant function: identity for `false`, a `Not` on the
/// second wire for `true`.
pub fn oracle_constant(value: bool) -> Term {
    if value {
        let first = Term::app(pi1(), v("x"));
        let flipped = Term::app(not_gate(), Term::app(pi2(), v("x")));
        Term::lam("x", pair(first, flipped))
    } else {
        Term::lam("x", v("x"))
    }
}

/// Oracle for the balanced function `f(x) = x`.
pub fn oracle_balanced_id() -> Term {
    cnot()
}

/// Step budget used by [`names_for`]; every prelude encoding normalises well
/// within it.
pub const NAMES_FUEL: usize = 1_000;

/// Named bindings available to programs by default.
#[derive(Clone, Debug)]
pub struct Prelude {
    bindings: Bindings,
}

impl Prelude {
    /// The prelude built from the constructors in this module.
    pub fn builtin() -> Prelude {
        let entries = [
            ("true", true_term()),
            ("false", false_term()),
            ("Not", not_gate()),
            ("Phase", phase_gate()),
            ("H", hadamard()),
            ("tensor", tensor()),
            ("pi1", pi1()),
            ("pi2", pi2()),
            ("bigtensor", big_tensor()),
            ("H2", hadamard2()),
            ("Cnot", cnot()),
            ("Dj1", deutsch1()),
            ("Dj", deutsch()),
            ("Y", y_combinator()),
            ("c0", church(0)),
            ("c1", church(1)),
            ("c2", church(2)),
            ("c3", church(3)),
        ];
        Prelude {
            bindings: entries
                .into_iter()
                .map(|(n, t)| (n.to_owned(), t))
                .collect(),
        }
    }

    pub fn from_source(src: &str) -> Result<Prelude, ParseError> {
        Ok(Prelude {
            bindings: parse_program(src)?.into_iter().collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Prelude, PreludeError> {
        let src = std::fs::read_to_string(path).map_err(|source| PreludeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Prelude::from_source(&src).map_err(PreludeError::Parse)
    }

    pub fn empty() -> Prelude {
        Prelude {
            bindings: Bindings::new(),
        }
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings.get(name)
    }

    /// Names for printing: each binding and, when it normalizes within
    /// [`NAMES_FUEL`], its normal form. Earlier bindings take precedence.
    pub fn pretty_names(&self) -> PrettyNames {
        names_for(&self.bindings)
    }
}

/// See [`Prelude::pretty_names`].
pub fn names_for(bindings: &Bindings) -> PrettyNames {
    let rw = Rewriter::new();
    let mut names = PrettyNames::new();
    for (name, t) in bindings.iter() {
        names.add(name, t.clone());
    }
    for (name, t) in bindings.iter() {
        let out = rw.normalize(t, NAMES_FUEL);
        if out.status == Status::Normal {
            names.add(name, out.term);
        }
    }
    names
}

#[derive(Debug, thiserror::Error)]
pub enum PreludeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("prelude: {0}")]
    Parse(ParseError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::normalize;

    fn nf(t: Term) -> Term {
        let out = normalize(&t, 10_000);
        assert_eq!(out.status, Status::Normal, "{t}");
        out.term
    }

    #[test]
    fn shipped_file_matches_constructors() {
        let parsed = Prelude::from_source(PRELUDE_SOURCE).unwrap();
        let builtin = Prelude::builtin();
        assert_eq!(parsed.bindings().len(), builtin.bindings().len());
        for (name, t) in builtin.bindings().iter() {
            assert_eq!(parsed.get(name), Some(t), "{name}");
        }
    }

    #[test]
    fn bindings_are_closed_and_normalize() {
        for (name, t) in Prelude::builtin().bindings().iter() {
            assert!(t.is_closed(), "{name}");
            if name != "Y" {
                nf(t.clone());
            }
        }
    }

    #[test]
    fn boolean_table() {
        assert_eq!(nf(Term::app(not_gate(), true_term())), false_term());
        assert_eq!(nf(Term::app(not_gate(), false_term())), true_term());
    }

    #[test]
    fn phase() {
        assert_eq!(
            nf(Term::app(phase_gate(), true_term())),
            Term::scaled(Scalar::omega8(), true_term())
        );
        assert_eq!(nf(Term::app(phase_gate(), false_term())), false_term());
    }

    #[test]
    fn hadamard_table() {
        let h = Scalar::half_sqrt2();
        assert_eq!(
            nf(Term::app(hadamard(), false_term())),
            Term::sum([
                Term::scaled(h.clone(), false_term()),
                Term::scaled(h.clone(), true_term())
            ])
        );
        assert_eq!(
            nf(Term::app(hadamard(), true_term())),
            Term::sum([
                Term::scaled(h.clone(), false_term()),
                Term::scaled(h.neg(), true_term())
            ])
        );
        for b in [true_term(), false_term()] {
            let twice = Term::app(hadamard(), Term::app(hadamard(), b.clone()));
            assert_eq!(nf(twice), b);
        }
    }

    #[test]
    fn quote_round_trip() {
        let u = Term::scaled(Scalar::ratio(1, 2), true_term())
            .plus(Term::scaled(Scalar::ratio(1, 2), false_term()));
        let u = nf(u);
        assert!(quote(&u).is_base());
        assert_eq!(nf(unquote(&quote(&u))), u);
        assert_eq!(nf(unquote(&quote(&Term::zero()))), Term::zero());
    }

    #[test]
    fn projections() {
        let (t, f) = (true_term(), false_term());
        let p = pair(t.clone(), f.clone());
        assert_eq!(nf(Term::app(pi1(), p.clone())), t);
        assert_eq!(nf(Term::app(pi2(), p)), f);
    }

    #[test]
    fn cnot_flips_when_control_is_true() {
        let (t, f) = (true_term(), false_term());
        let cases = [
            (pair(f.clone(), f.clone()), pair(f.clone(), f.clone())),
            (pair(f.clone(), t.clone()), pair(f.clone(), t.clone())),
            (pair(t.clone(), f.clone()), pair(t.clone(), t.clone())),
            (pair(t.clone(), t.clone()), pair(t.clone(), f.clone())),
        ];
        for (input, expected) in cases {
            assert_eq!(nf(Term::app(cnot(), input)), nf(expected));
        }
    }

    #[test]
    fn church_numerals() {
        assert_eq!(church(0), lam2("x", "f", v("x")));
        let step = Term::lam("y", pair(false_term(), v("y")));
        let mut expected = true_term();
        for n in 0..4 {
            let got = nf(Term::apps(church(n), [true_term(), step.clone()]));
            assert_eq!(got, nf(expected.clone()), "n = {n}");
            expected = pair(false_term(), expected);
        }
    }

    #[test]
    fn deutsch_one_wire() {
        let (t, f) = (true_term(), false_term());
        assert_eq!(
            nf(Term::app(deutsch1(), oracle_constant(false))),
            nf(pair(f.clone(), t.clone()))
        );
        assert_eq!(
            nf(Term::app(deutsch1(), oracle_balanced_id())),
            nf(pair(t.clone(), t.clone()))
        );
        assert_eq!(
            nf(Term::app(deutsch1(), oracle_constant(true))),
            nf(Term::scaled(Scalar::from_integer(-1), pair(f, t)))
        );
    }

    #[test]
    fn parametric_deutsch_agrees_at_one() {
        for oracle in [oracle_constant(false), oracle_balanced_id()] {
            let a = nf(Term::apps(deutsch(), [church(1), oracle.clone()]));
            let b = nf(Term::app(deutsch1(), oracle));
            assert_eq!(a, b);
        }
    }
}

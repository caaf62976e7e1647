//! Surface syntax.
//!
//! ```text
//! program    := ("let" ident "=" term ";")* term? ";"?
//! term       := lambda | sum
//! lambda     := ("\" | "λ") ident "." term
//! sum        := scaled (("+" | "-") scaled)*
//! scaled     := (scalarexpr ".")? app
//! app        := atom+
//! atom       := ident | "0v" | "(" term ")" | "<" ident ">" | "[" term "]" | "{" term "}"
//! scalarexpr := arithmetic (+ - * / unary -) over integers, sqrt2, i, omega8, ( )
//! ```
//!
//! The body of a λ extends as far right as possible; `+` binds weaker than
//! `.`, which binds weaker than application. `t - u` is `t + (-1).u`.
//! `[t]` is `λx.t` with `x` fresh and `{t}` is `t false`. `<name>` refers to
//! a named binding (prelude or `let`). `#` starts a line comment.
//!
//! `let` bindings are expanded at parse time; they are not part of the
//! calculus.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::scalar::{parse_prefix, skip_trivia, Scalar};
use crate::stdlib;
use crate::term::{is_identifier, Kind, Term, VarName};

const KEYWORDS: [&str; 4] = ["let", "i", "sqrt2", "omega8"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    fn at(src: &str, start: usize, end: usize) -> SourceSpan {
        let start = start.min(src.len());
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SourceSpan {
            start,
            end: end.max(start),
            line,
            column,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

/// Named closed terms, in definition order.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    entries: Vec<(String, Term)>,
    index: HashMap<String, usize>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.index.get(name).map(|&i| &self.entries[i].1)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Adds or replaces a binding.
    pub fn insert(&mut self, name: impl Into<String>, term: Term) {
        let name = name.into();
        match self.index.get(&name) {
            Some(&i) => self.entries[i].1 = term,
            None => {
                self.index.insert(name.clone(), self.entries.len());
                self.entries.push((name, term));
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, Term)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (n, t) in iter {
            b.insert(n, t);
        }
        b
    }
}

/// Parses a single term. Unknown identifiers become free variables.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &Bindings::new())
}

/// Parses a single term, resolving identifiers against `env` first.
pub fn parse_term_with(src: &str, env: &Bindings) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, env, true);
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a sequence of `let name = term;` bindings. Every identifier must be
/// λ-bound or defined earlier.
pub fn parse_program(src: &str) -> Result<Vec<(String, Term)>, ParseError> {
    let script = parse_script_inner(src, &Bindings::new(), false)?;
    if let Some((_, span)) = script.1 {
        return Err(ParseError {
            message: "expected `let`".into(),
            span,
        });
    }
    Ok(script.0)
}

/// A program optionally followed by a final term, as accepted by the command
/// line and the REPL. Bindings may refer to `env`; the final term may also
/// mention free variables.
pub fn parse_script(src: &str, env: &Bindings) -> Result<Script, ParseError> {
    let (bindings, main) = parse_script_inner(src, env, true)?;
    Ok(Script {
        bindings,
        main: main.map(|(t, _)| t),
    })
}

#[derive(Clone, Debug)]
pub struct Script {
    pub bindings: Vec<(String, Term)>,
    pub main: Option<Term>,
}

type ScriptParts = (Vec<(String, Term)>, Option<(Term, SourceSpan)>);

fn parse_script_inner(
    src: &str,
    base: &Bindings,
    allow_main: bool,
) -> Result<ScriptParts, ParseError> {
    let mut env = base.clone();
    let mut out: Vec<(String, Term)> = Vec::new();
    let mut pos = 0;
    loop {
        pos = skip_trivia(src, pos);
        if pos == src.len() {
            return Ok((out, None));
        }
        if word_at(src, pos) == Some("let") {
            let mut p = Parser::new(src, &env, false);
            p.pos = pos + 3;
            let name_start = p.skip();
            let name = p.ident()?;
            if out.iter().any(|(n, _)| *n == name) {
                return Err(p.error_at(name_start, p.pos, format!("duplicate binding `{name}`")));
            }
            p.expect(b'=', "`=`")?;
            let t = p.term()?;
            p.expect(b';', "`;`")?;
            pos = p.pos;
            env.insert(name.clone(), t.clone());
            out.push((name, t));
        } else {
            let mut p = Parser::new(src, &env, allow_main);
            p.pos = pos;
            let t = p.term()?;
            let span = SourceSpan::at(src, pos, p.pos);
            if p.peek() == Some(b';') {
                p.pos += 1;
            }
            p.expect_end()?;
            return Ok((out, Some((t, span))));
        }
    }
}

fn word_at(src: &str, pos: usize) -> Option<&str> {
    let bytes = src.as_bytes();
    if !bytes.get(pos)?.is_ascii_alphabetic() {
        return None;
    }
    let mut end = pos;
    while end < bytes.len()
        && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_' || bytes[end] == b'\'')
    {
        end += 1;
    }
    Some(&src[pos..end])
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    env: &'a Bindings,
    binders: Vec<String>,
    allow_free: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, env: &'a Bindings, allow_free: bool) -> Self {
        Parser {
            src,
            pos: 0,
            env,
            binders: Vec::new(),
            allow_free,
        }
    }

    fn skip(&mut self) -> usize {
        self.pos = skip_trivia(self.src, self.pos);
        self.pos
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn error_at(&self, start: usize, end: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            message: message.into(),
            span: SourceSpan::at(self.src, start, end),
        }
    }

    fn error_here(&mut self, message: impl Into<String>) -> ParseError {
        let at = self.skip();
        let end = (at + 1).min(self.src.len());
        self.error_at(at, end, message)
    }

    fn expect(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.peek().is_none() {
            Ok(())
        } else {
            Err(self.error_here("unexpected input"))
        }
    }

    fn at_lambda(&mut self) -> bool {
        self.skip();
        let rest = &self.src[self.pos..];
        rest.starts_with('\\') || rest.starts_with('λ')
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.skip();
        match word_at(self.src, start) {
            Some(w) if KEYWORDS.contains(&w) => {
                Err(self.error_at(start, start + w.len(), format!("`{w}` is reserved")))
            }
            Some(w) => {
                self.pos = start + w.len();
                Ok(w.to_owned())
            }
            None => Err(self.error_here("expected an identifier")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.at_lambda() {
            let width = if self.src[self.pos..].starts_with('\\') {
                1
            } else {
                'λ'.len_utf8()
            };
            self.pos += width;
            let name = self.ident()?;
            self.expect(b'.', "`.` after binder")?;
            self.binders.push(name.clone());
            let body = self.term();
            self.binders.pop();
            return Ok(Term::lambda_raw(&name, body?));
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let mut items = vec![self.scaled()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    items.push(self.scaled()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let u = self.scaled()?;
                    items.push(Term::scaled(Scalar::from_integer(-1), u));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Term::sum(items)
        })
    }

    fn scaled(&mut self) -> Result<Term, ParseError> {
        let start = self.skip();
        if let Ok((scalar, end)) = parse_prefix::<Scalar>(self.src, start) {
            let dot = skip_trivia(self.src, end);
            if self.src.as_bytes().get(dot) == Some(&b'.') {
                self.pos = dot + 1;
                let body = self.app()?;
                return Ok(Term::scaled(scalar, body));
            }
        }
        self.pos = start;
        self.app()
    }

    fn starts_atom(&mut self) -> bool {
        let Some(c) = self.peek() else { return false };
        match c {
            b'(' | b'<' | b'[' | b'{' => true,
            b'0' => self.zero_vec_len().is_some(),
            c if c.is_ascii_alphabetic() => {
                word_at(self.src, self.pos).is_some_and(|w| !KEYWORDS.contains(&w))
            }
            _ => false,
        }
    }

    fn zero_vec_len(&self) -> Option<usize> {
        let rest = &self.src.as_bytes()[self.pos..];
        let follows_ident = rest
            .get(2)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'');
        (rest.starts_with(b"0v") && !follows_ident).then_some(2)
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            if self.at_lambda() {
                return Err(self.error_here("an abstraction here must be parenthesised"));
            }
            return Err(self.error_here("expected a term"));
        }
        let mut t = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            t = Term::app(t, arg);
        }
        Ok(t)
    }

    fn closing(&mut self, open: usize, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let mut e = self.error_here(format!("expected `{}`", c as char));
            e.message
                .push_str(&format!(" to close the bracket at byte {open}"));
            Err(e)
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let start = self.skip();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.closing(start, b')')?;
                Ok(t)
            }
            Some(b'[') => {
                self.pos += 1;
                let t = self.term()?;
                self.closing(start, b']')?;
                Ok(stdlib::quote(&t))
            }
            Some(b'{') => {
                self.pos += 1;
                let t = self.term()?;
                self.closing(start, b'}')?;
                Ok(stdlib::unquote(&t))
            }
            Some(b'<') => {
                self.pos += 1;
                let name = self.ident()?;
                self.closing(start, b'>')?;
                self.env.get(&name).cloned().ok_or_else(|| {
                    self.error_at(start, self.pos, format!("unknown binding `<{name}>`"))
                })
            }
            Some(b'0') => {
                let len = self
                    .zero_vec_len()
                    .ok_or_else(|| self.error_here("expected `0v`"))?;
                self.pos += len;
                Ok(Term::zero())
            }
            _ => {
                let name = self.ident()?;
                if let Some(depth) = self.binders.iter().rev().position(|b| *b == name) {
                    return Ok(Term::bound(depth as u32));
                }
                if let Some(t) = self.env.get(&name) {
                    return Ok(t.clone());
                }
                if self.allow_free {
                    return Ok(Term::free(VarName::new(&name).expect("identifier")));
                }
                Err(self.error_at(start, self.pos, format!("unknown identifier `{name}`")))
            }
        }
    }
}

/// Closed terms to print as `<name>`.
#[derive(Clone, Debug, Default)]
pub struct PrettyNames {
    names: HashMap<Term, String>,
}

impl PrettyNames {
    pub fn new() -> Self {
        PrettyNames::default()
    }

    /// Registers `term` under `name` unless an earlier name already claims it.
    pub fn add(&mut self, name: &str, term: Term) {
        if term.is_closed() {
            self.names.entry(term).or_insert_with(|| name.to_owned());
        }
    }

    pub fn lookup(&self, t: &Term) -> Option<&str> {
        self.names.get(t).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Deterministic printing; the result re-parses to an α/AC-equal term.
pub fn print_term(t: &Term) -> String {
    print_term_named(t, &PrettyNames::new())
}

/// As [`print_term`], printing registered closed subterms as `<name>`.
pub fn print_term_named(t: &Term, names: &PrettyNames) -> String {
    let mut pr = Printer {
        names,
        free: t.free_vars(),
        stack: Vec::new(),
        out: String::new(),
    };
    pr.print(t, Level::Top);
    pr.out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Top,
    Sum,
    Scaled,
    App,
    Atom,
}

fn own_level(t: &Term) -> Level {
    match t.kind() {
        Kind::Lambda(..) => Level::Top,
        Kind::Sum(_) => Level::Sum,
        Kind::Scaled(..) => Level::Scaled,
        Kind::Apply(..) => Level::App,
        Kind::Free(_) | Kind::Bound(_) | Kind::Zero => Level::Atom,
    }
}

struct Printer<'a> {
    names: &'a PrettyNames,
    free: BTreeSet<VarName>,
    stack: Vec<String>,
    out: String,
}

impl Printer<'_> {
    fn fresh(&self, hint: &str) -> String {
        let mut name = if is_identifier(hint) && !KEYWORDS.contains(&hint) {
            hint.to_owned()
        } else {
            "x".to_owned()
        };
        while self.stack.contains(&name) || self.free.iter().any(|v| v.as_str() == name) {
            name.push('\'');
        }
        name
    }

    fn print(&mut self, t: &Term, level: Level) {
        if let Some(name) = self.names.lookup(t) {
            self.out.push('<');
            self.out.push_str(name);
            self.out.push('>');
            return;
        }
        let paren = own_level(t) < level;
        if paren {
            self.out.push('(');
        }
        match t.kind() {
            Kind::Free(x) => self.out.push_str(x.as_str()),
            Kind::Bound(i) => {
                let name = self
                    .stack
                    .len()
                    .checked_sub(*i as usize + 1)
                    .map(|k| self.stack[k].clone())
                    .unwrap_or_else(|| format!("#{i}"));
                self.out.push_str(&name);
            }
            Kind::Zero => self.out.push_str("0v"),
            Kind::Lambda(hint, body) => {
                let name = self.fresh(&hint.0);
                self.out.push('\\');
                self.out.push_str(&name);
                self.out.push('.');
                self.stack.push(name);
                self.print(body, Level::Top);
                self.stack.pop();
            }
            Kind::Apply(f, a) => {
                self.print(f, Level::App);
                self.out.push(' ');
                self.print(a, Level::Atom);
            }
            Kind::Scaled(s, u) => {
                if s.prints_atomic() {
                    self.out.push_str(&s.to_string());
                } else {
                    self.out.push_str(&format!("({s})"));
                }
                self.out.push_str(" . ");
                self.print(u, Level::App);
            }
            Kind::Sum(items) => {
                for (k, u) in items.iter().enumerate() {
                    if k > 0 {
                        self.out.push_str(" + ");
                    }
                    self.print(u, Level::Scaled);
                }
            }
        }
        if paren {
            self.out.push(')');
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} (bytes {}..{})",
            self.line, self.column, self.start, self.end
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt() -> Term {
        Term::lam("x", Term::lam("y", Term::var("x")))
    }
    fn ff() -> Term {
        Term::lam("x", Term::lam("y", Term::var("y")))
    }

    #[test]
    fn parses_true() {
        let t = parse_term("\\x.\\y.x").unwrap();
        assert_eq!(t, tt());
        assert_eq!(parse_term("λx.λy.x").unwrap(), tt());
    }

    #[test]
    fn sums_flatten_and_null_vector() {
        let t = parse_term("(1/2).(u + u) + 0v").unwrap();
        let u = Term::var("u");
        let expected = Term::sum([
            Term::scaled(Scalar::ratio(1, 2), u.clone().plus(u)),
            Term::zero(),
        ]);
        assert_eq!(t, expected);
        let flat = parse_term("(a + b) + (c + a)").unwrap();
        match flat.kind() {
            Kind::Sum(items) => assert_eq!(items.len(), 4),
            _ => panic!(),
        }
    }

    #[test]
    fn subtraction_sugar_with_prelude_names() {
        let env: Bindings = [("false".to_string(), ff()), ("true".to_string(), tt())]
            .into_iter()
            .collect();
        let t = parse_term_with("sqrt2/2 . (false - true)", &env).unwrap();
        let expected = Term::scaled(
            Scalar::half_sqrt2(),
            Term::sum([ff(), Term::scaled(Scalar::from_integer(-1), tt())]),
        );
        assert_eq!(t, expected);
        // E-normalising gives the distributed form
        let n = crate::rewrite::normalize(&t, 100);
        let distributed = Term::sum([
            Term::scaled(Scalar::half_sqrt2(), ff()),
            Term::scaled(Scalar::half_sqrt2().neg(), tt()),
        ]);
        assert_eq!(n.term, distributed);
    }

    #[test]
    fn printer_examples() {
        assert_eq!(print_term(&Term::lam("x", Term::var("x"))), "\\x.x");
        assert_eq!(print_term(&Term::zero()), "0v");
        let mut names = PrettyNames::new();
        names.add("true", tt());
        names.add("false", ff());
        let t = Term::scaled(Scalar::half_sqrt2(), ff().plus(tt()));
        assert_eq!(
            print_term_named(&t, &names),
            "(sqrt2/2) . (<false> + <true>)"
        );
        assert_eq!(print_term(&t), "(sqrt2/2) . ((\\x.\\y.y) + (\\x.\\y.x))");
    }

    #[test]
    fn precedence_fixtures() {
        let (f, a, b) = (Term::var("f"), Term::var("a"), Term::var("b"));
        // application binds tighter than scaling, scaling tighter than +
        assert_eq!(
            parse_term("2.f a + b").unwrap(),
            Term::scaled(Scalar::from_integer(2), Term::app(f.clone(), a.clone())).plus(b.clone())
        );
        // λ body extends to the right
        assert_eq!(
            parse_term("\\x.x + b").unwrap(),
            Term::lam("x", Term::var("x").plus(b.clone()))
        );
        // application is left associative
        assert_eq!(
            parse_term("f a b").unwrap(),
            Term::app(Term::app(f.clone(), a.clone()), b.clone())
        );
        assert_eq!(
            parse_term("f (a b)").unwrap(),
            Term::app(f.clone(), Term::app(a.clone(), b.clone()))
        );
        // a parenthesised scalar and a parenthesised term
        assert_eq!(
            parse_term("(1/2).(a)").unwrap(),
            Term::scaled(Scalar::ratio(1, 2), a.clone())
        );
        assert_eq!(parse_term("(a)").unwrap(), a);
        assert_eq!(
            parse_term("-1.b").unwrap(),
            Term::scaled(Scalar::from_integer(-1), b.clone())
        );
        assert_eq!(
            parse_term("omega8.f").unwrap(),
            Term::scaled(Scalar::omega8(), f)
        );
    }

    #[test]
    fn quote_and_unquote_sugar() {
        let t = parse_term("{[a]}").unwrap();
        assert_eq!(t, stdlib::unquote(&stdlib::quote(&Term::var("a"))));
        match parse_term("\\x.[x]").unwrap().kind() {
            Kind::Lambda(_, body) => {
                assert_eq!(body, &Term::lambda_raw("q", Term::bound(1)))
            }
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_term("\\x.").unwrap_err();
        assert_eq!(e.span.start, 3);
        let e = parse_term("a +\n  )").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 3));
        assert!(parse_term("(a").is_err());
        assert!(parse_term("i").is_err());
        assert!(parse_term("a + \\x.x").is_err());
        assert!(parse_term("1/0.a").is_err());
        assert!(parse_term("<nope>").is_err());
        assert!(parse_term("0vx").is_err());
        assert!(parse_term("a b c").is_ok());
    }

    #[test]
    fn programs() {
        let prog = parse_program("let id = \\x.x; let two = \\x.\\f.f (f x);").unwrap();
        assert_eq!(prog.len(), 2);
        assert_eq!(prog[0].0, "id");
        let e = parse_program("let a = \\x.y;").unwrap_err();
        assert!(e.message.contains("unknown identifier `y`"), "{e}");
        let e = parse_program("let a = \\x.x; let a = \\y.y;").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let prog = parse_program("let id = \\x.x; let k = \\y.id;").unwrap();
        assert_eq!(prog[1].1, Term::lam("y", Term::lam("x", Term::var("x"))));
    }

    #[test]
    fn scripts_end_with_an_optional_term() {
        let s = parse_script("let p = \\x.x; p q", &Bindings::new()).unwrap();
        assert_eq!(s.bindings.len(), 1);
        assert_eq!(
            s.main.unwrap(),
            Term::app(Term::lam("x", Term::var("x")), Term::var("q"))
        );
        let s = parse_script("# only a comment\n", &Bindings::new()).unwrap();
        assert!(s.main.is_none());
    }

    #[test]
    fn printer_renames_to_avoid_capture() {
        let t =
            Term::lam("y", Term::var("x")).substitute(&VarName::new("x").unwrap(), &Term::var("y"));
        assert_eq!(print_term(&t), "\\y'.y");
        let nested = parse_term("\\x.\\x.x").unwrap();
        assert_eq!(print_term(&nested), "\\x.\\x'.x'");
        assert_eq!(parse_term(&print_term(&nested)).unwrap(), nested);
    }

    #[test]
    fn scaled_bodies_get_parentheses() {
        let a = Term::var("a");
        let t = Term::scaled(Scalar::ratio(1, 2), Term::scaled(Scalar::i(), a.clone()));
        assert_eq!(print_term(&t), "(1/2) . (i . a)");
        assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
        let z = Term::scaled(Scalar::from_integer(2), Term::zero());
        assert_eq!(print_term(&z), "2 . 0v");
        assert_eq!(parse_term("2.0v").unwrap(), z);
    }
}

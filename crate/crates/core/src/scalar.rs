//! Exact scalars.
//!
//! Scalars are elements of ℚ[i,√2], stored as `a + b·√2 + c·i + d·i·√2` with
//! reduced rational components. Every value is canonical, so two scalars are
//! equal exactly when their components are, and scalar simplification never
//! needs to be modelled as a rewriting step.
//!
//! The [`ScalarRing`] trait captures the algebraic interface the rewrite engine
//! relies on. [`Scalar`] is the shipped instance; [`RationalScalar`] is a plain ℚ
//! instance used to check the laws generically.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// The operations the calculus needs from its scalars.
///
/// Implementations must form a commutative ring with `zero` and `one` as
/// units: addition and multiplication associative and commutative,
/// multiplication distributing over addition, `0 × α = 0`. Equality must be
/// decidable and canonical. Nothing checks these laws at runtime; the test
/// suite checks them for the shipped instances.
pub trait ScalarRing: Clone + Eq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn from_ratio(numer: BigInt, denom: BigInt) -> Self;

    /// A named constant of the scalar syntax (`sqrt2`, `i`, ...), if the
    /// instance has it.
    fn constant(name: &str) -> Option<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn parse(src: &str) -> Result<Self, ScalarSyntaxError> {
        let (value, end) = parse_prefix::<Self>(src, 0)?;
        let rest = skip_trivia(src, end);
        if rest != src.len() {
            return Err(ScalarSyntaxError::new(rest, "trailing input after scalar"));
        }
        Ok(value)
    }
}

/// Position-tagged failure of the scalar expression parser.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at byte {offset}")]
pub struct ScalarSyntaxError {
    pub offset: usize,
    pub message: String,
}

impl ScalarSyntaxError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ScalarSyntaxError {
            offset,
            message: message.into(),
        }
    }
}

/// Element of ℚ[i,√2]: `a + b·√2 + c·i + d·i·√2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

// (x0 + x1·√2)(y0 + y1·√2)
fn mul_sqrt2(x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(BigInt::from(2));
    (x0 * y0 + two * x1 * y1, x0 * y1 + x1 * y0)
}

impl Scalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Scalar { a, b, c, d }
    }

    pub fn zero() -> Self {
        Scalar::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::new(r, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::from_rational(q(n, 1))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(q(n, d))
    }

    pub fn sqrt2() -> Self {
        Scalar::new(
            Rational::zero(),
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
        )
    }

    pub fn i() -> Self {
        Scalar::new(
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
            Rational::zero(),
        )
    }

    /// √2/2, the Hadamard amplitude.
    pub fn half_sqrt2() -> Self {
        Scalar::new(
            Rational::zero(),
            q(1, 2),
            Rational::zero(),
            Rational::zero(),
        )
    }

    /// e^{iπ/4} = √2/2 + (√2/2)·i.
    pub fn omega8() -> Self {
        Scalar::new(Rational::zero(), q(1, 2), Rational::zero(), q(1, 2))
    }

    pub fn components(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// The rational value, if the scalar has no √2 or i part.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.b.is_zero() && self.c.is_zero() && self.d.is_zero()).then_some(&self.a)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar::new(
            &self.a + &other.a,
            &self.b + &other.b,
            &self.c + &other.c,
            &self.d + &other.d,
        )
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        // x = p + q·i, y = s + t·i with p, q, s, t in ℚ(√2)
        let (ps0, ps1) = mul_sqrt2(&self.a, &self.b, &other.a, &other.b);
        let (qt0, qt1) = mul_sqrt2(&self.c, &self.d, &other.c, &other.d);
        let (pt0, pt1) = mul_sqrt2(&self.a, &self.b, &other.c, &other.d);
        let (qs0, qs1) = mul_sqrt2(&self.c, &self.d, &other.a, &other.b);
        Scalar::new(ps0 - qt0, ps1 - qt1, pt0 + qs0, pt1 + qs1)
    }

    pub fn neg(&self) -> Scalar {
        Scalar::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        // 1/(p + q·i) = (p - q·i) / (p² + q²), and p² + q² = n0 + n1·√2 is
        // inverted through its √2-conjugate.
        let (pp0, pp1) = mul_sqrt2(&self.a, &self.b, &self.a, &self.b);
        let (qq0, qq1) = mul_sqrt2(&self.c, &self.d, &self.c, &self.d);
        let (n0, n1) = (pp0 + qq0, pp1 + qq1);
        let two = Rational::from_integer(BigInt::from(2));
        let norm = &n0 * &n0 - two * &n1 * &n1;
        let (m0, m1) = (&n0 / &norm, -(&n1 / &norm));
        let (r0, r1) = mul_sqrt2(&self.a, &self.b, &m0, &m1);
        let (i0, i1) = mul_sqrt2(&self.c, &self.d, &m0, &m1);
        Some(Scalar::new(r0, r1, -i0, -i1))
    }

    /// Floating-point image in ℂ.
    pub fn to_complex(&self) -> Complex64 {
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let s = std::f64::consts::SQRT_2;
        Complex64::new(f(&self.a) + s * f(&self.b), f(&self.c) + s * f(&self.d))
    }

    /// True when printing needs no parentheses in front of `.`: an integer,
    /// or a bare constant name.
    pub fn prints_atomic(&self) -> bool {
        let text = self.to_string();
        !text.contains(['/', '*', '+', ' ']) && !text.starts_with('-')
    }
}

impl ScalarRing for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self)
    }
    fn from_ratio(numer: BigInt, denom: BigInt) -> Self {
        Scalar::from_rational(Rational::new(numer, denom))
    }
    fn constant(name: &str) -> Option<Self> {
        match name {
            "sqrt2" => Some(Scalar::sqrt2()),
            "i" => Some(Scalar::i()),
            "omega8" => Some(Scalar::omega8()),
            _ => None,
        }
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Scalar::is_one(self)
    }
}

/// Plain rational scalars. Useful for exercising the engine's genericity
/// claims in tests; it has no `sqrt2`, `i` or `omega8`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalScalar(pub Rational);

impl fmt::Display for RationalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl ScalarRing for RationalScalar {
    fn zero() -> Self {
        RationalScalar(Rational::zero())
    }
    fn one() -> Self {
        RationalScalar(Rational::one())
    }
    fn add(&self, other: &Self) -> Self {
        RationalScalar(&self.0 + &other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        RationalScalar(&self.0 * &other.0)
    }
    fn neg(&self) -> Self {
        RationalScalar(-&self.0)
    }
    fn inv(&self) -> Option<Self> {
        (!self.0.is_zero()).then(|| RationalScalar(self.0.recip()))
    }
    fn from_ratio(numer: BigInt, denom: BigInt) -> Self {
        RationalScalar(Rational::new(numer, denom))
    }
    fn constant(_name: &str) -> Option<Self> {
        None
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

// One component `r·unit`, sign included. `unit` is "" for the rational part.
fn write_component(out: &mut String, r: &Rational, unit: &str) {
    let numer = r.numer();
    let denom = r.denom();
    if unit.is_empty() {
        out.push_str(&numer.to_string());
    } else if numer.is_one() {
        out.push_str(unit);
    } else if (-numer).is_one() {
        out.push('-');
        out.push_str(unit);
    } else {
        out.push_str(&format!("{numer}*{unit}"));
    }
    if !denom.is_one() {
        out.push_str(&format!("/{denom}"));
    }
}

impl fmt::Display for Scalar {
    /// Prints in the scalar expression syntax; `omega8` is recognised.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Scalar::omega8() {
            return f.write_str("omega8");
        }
        if *self == Scalar::omega8().neg() {
            return f.write_str("-omega8");
        }
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        let parts = [
            (&self.a, ""),
            (&self.b, "sqrt2"),
            (&self.c, "i"),
            (&self.d, "sqrt2*i"),
        ];
        for (r, unit) in parts.into_iter().filter(|(r, _)| !r.is_zero()) {
            if out.is_empty() {
                write_component(&mut out, r, unit);
            } else if r.is_negative() {
                out.push_str(" - ");
                write_component(&mut out, &-r, unit);
            } else {
                out.push_str(" + ");
                write_component(&mut out, r, unit);
            }
        }
        f.write_str(&out)
    }
}

/// Skips whitespace and `#` line comments starting at `pos`.
pub fn skip_trivia(src: &str, mut pos: usize) -> usize {
    let bytes = src.as_bytes();
    while pos < bytes.len() {
        match bytes[pos] {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            _ => break,
        }
    }
    pos
}

/// Parses the longest scalar expression starting at byte `start` and returns
/// it together with the offset just past it.
///
/// Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
/// `unary := '-' unary | integer | name | '(' expr ')'`, where `name` is one of
/// the instance's constants.
pub fn parse_prefix<S: ScalarRing>(
    src: &str,
    start: usize,
) -> Result<(S, usize), ScalarSyntaxError> {
    let mut p = ScalarParser { src, pos: start };
    let value = p.expr()?;
    Ok((value, p.pos))
}

struct ScalarParser<'a> {
    src: &'a str,
    pos: usize,
}

impl ScalarParser<'_> {
    fn peek(&mut self) -> Option<u8> {
        self.pos = skip_trivia(self.src, self.pos);
        self.src.as_bytes().get(self.pos).copied()
    }

    fn expr<S: ScalarRing>(&mut self) -> Result<S, ScalarSyntaxError> {
        let mut acc = self.term::<S>()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term::<S>()?);
                }
                // `-` followed by `.` cannot be a binary minus inside a scalar.
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term::<S>()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<S: ScalarRing>(&mut self) -> Result<S, ScalarSyntaxError> {
        let mut acc = self.unary::<S>()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary::<S>()?);
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let divisor = self.unary::<S>()?;
                    let inv = divisor
                        .inv()
                        .ok_or_else(|| ScalarSyntaxError::new(at, "division by zero"))?;
                    acc = acc.mul(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<S: ScalarRing>(&mut self) -> Result<S, ScalarSyntaxError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary::<S>()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr::<S>()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(ScalarSyntaxError::new(self.pos, "expected `)` in scalar")),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphabetic() || bytes[self.pos] == b'_')
                {
                    return Err(ScalarSyntaxError::new(start, "malformed number"));
                }
                let n: BigInt = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| ScalarSyntaxError::new(start, "malformed number"))?;
                Ok(S::from_ratio(n, BigInt::one()))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric()
                        || bytes[self.pos] == b'_'
                        || bytes[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let word = &self.src[start..self.pos];
                S::constant(word).ok_or_else(|| {
                    ScalarSyntaxError::new(start, format!("`{word}` is not a scalar constant"))
                })
            }
            Some(_) => Err(ScalarSyntaxError::new(self.pos, "expected a scalar")),
            None => Err(ScalarSyntaxError::new(
                self.pos,
                "unexpected end of input in scalar",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega_conj() -> Scalar {
        Scalar::new(Rational::zero(), q(1, 2), Rational::zero(), q(-1, 2))
    }

    fn close(x: Complex64, y: Complex64) -> bool {
        (x - y).norm() < 1e-10
    }

    #[test]
    fn add_examples() {
        let h = Scalar::half_sqrt2();
        assert_eq!(Scalar::zero().add(&h), h);
        assert_eq!(h.add(&h), Scalar::sqrt2());
        // e^{iπ/4} + e^{-iπ/4} = √2
        let sum = Scalar::omega8().add(&omega_conj());
        assert_eq!(sum, Scalar::sqrt2());
        let expected = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
            + Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!(close(sum.to_complex(), expected));
    }

    #[test]
    fn mul_examples() {
        let h = Scalar::half_sqrt2();
        let x = Scalar::ratio(3, 7).add(&Scalar::i());
        assert_eq!(Scalar::one().mul(&x), x);
        assert_eq!(h.mul(&h), Scalar::ratio(1, 2));
        let mut acc = Scalar::one();
        for _ in 0..8 {
            acc = acc.mul(&Scalar::omega8());
        }
        assert!(acc.is_one());
        let float = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4).powi(8);
        assert!(close(acc.to_complex(), float));
        assert_eq!(Scalar::i().mul(&Scalar::i()), Scalar::from_integer(-1));
        assert_eq!(
            Scalar::sqrt2().mul(&Scalar::sqrt2()),
            Scalar::from_integer(2)
        );
    }

    #[test]
    fn neg_examples() {
        assert_eq!(Scalar::zero().neg(), Scalar::zero());
        let m1 = Scalar::one().neg();
        assert_eq!(m1, Scalar::from_integer(-1));
        assert!(Scalar::one().add(&m1).is_zero());
        let x = Scalar::omega8().neg();
        assert_eq!(
            x,
            Scalar::new(Rational::zero(), q(-1, 2), Rational::zero(), q(-1, 2))
        );
    }

    #[test]
    fn zero_one_predicates() {
        assert!(Scalar::zero().is_zero());
        assert!(!Scalar::one().is_zero());
        assert!(Scalar::omega8().mul(&omega_conj()).is_one());
        assert!(close(
            Scalar::omega8().mul(&omega_conj()).to_complex(),
            Complex64::new(1.0, 0.0)
        ));
    }

    #[test]
    fn inverse_round_trips() {
        let xs = [
            Scalar::omega8(),
            Scalar::sqrt2().add(&Scalar::ratio(1, 3)),
            Scalar::new(q(1, 2), q(-3, 5), q(2, 1), q(7, 11)),
        ];
        for x in xs {
            assert!(x.mul(&x.inv().unwrap()).is_one(), "{x}");
        }
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::half_sqrt2().to_string(), "sqrt2/2");
        assert_eq!(Scalar::half_sqrt2().neg().to_string(), "-sqrt2/2");
        assert_eq!(Scalar::omega8().to_string(), "omega8");
        assert_eq!(Scalar::ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!(Scalar::from_integer(2).to_string(), "2");
        assert_eq!(omega_conj().to_string(), "sqrt2/2 - sqrt2*i/2");
        assert_eq!(
            Scalar::new(q(1, 3), Rational::zero(), q(-5, 2), q(3, 4)).to_string(),
            "1/3 - 5*i/2 + 3*sqrt2*i/4"
        );
        assert!(Scalar::from_integer(2).prints_atomic());
        assert!(Scalar::omega8().prints_atomic());
        assert!(!Scalar::half_sqrt2().prints_atomic());
        assert!(!Scalar::from_integer(-1).prints_atomic());
    }

    #[test]
    fn parse_expressions() {
        let p = |s: &str| <Scalar as ScalarRing>::parse(s).unwrap();
        assert_eq!(p("sqrt2/2"), Scalar::half_sqrt2());
        assert_eq!(p("omega8"), Scalar::omega8());
        assert_eq!(p("sqrt2/2 + sqrt2/2*i"), Scalar::omega8());
        assert_eq!(p("-(1/2)"), Scalar::ratio(-1, 2));
        assert_eq!(p("1 - 3/4"), Scalar::ratio(1, 4));
        assert_eq!(
            p("1/(1+i)"),
            Scalar::ratio(1, 2).sub(&Scalar::ratio(1, 2).mul(&Scalar::i()))
        );
        assert!(<Scalar as ScalarRing>::parse("1/0").is_err());
        assert!(<Scalar as ScalarRing>::parse("x").is_err());
        assert!(<Scalar as ScalarRing>::parse("2 3").is_err());
        assert!(RationalScalar::parse("sqrt2").is_err());
        assert_eq!(
            RationalScalar::parse("2/6").unwrap(),
            RationalScalar(q(1, 3))
        );
    }

    #[test]
    fn prefix_stops_before_dot() {
        let (s, end) = parse_prefix::<Scalar>("1/2 . x", 0).unwrap();
        assert_eq!(s, Scalar::ratio(1, 2));
        assert_eq!(&"1/2 . x"[end..], ". x");
    }
}

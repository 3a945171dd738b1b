//! Exact scalars for the four ring backends: arbitrary-precision integers,
//! rationals in lowest terms, real algebraic numbers, and digit-stream reals.
//! Every arithmetic and sign query is exact or reports indeterminacy.

pub mod algebraic;
pub mod poly;
pub mod stream;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use algebraic::{AlgebraicReal, IsolateError, RootValue};
use poly::IPoly;
use stream::{StreamOrRat, StreamSource, StreamVal};

/// The ring backend a machine runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Backend {
    IntegerRing,
    RationalField,
    RealAlgebraicField,
    StreamExtension,
}

impl Backend {
    pub fn admits(&self, kind: ScalarKind) -> bool {
        match self {
            Backend::IntegerRing => kind == ScalarKind::Integer,
            Backend::RationalField => matches!(kind, ScalarKind::Integer | ScalarKind::Rational),
            Backend::RealAlgebraicField => {
                matches!(kind, ScalarKind::Integer | ScalarKind::Rational | ScalarKind::Algebraic)
            }
            Backend::StreamExtension => {
                matches!(kind, ScalarKind::Integer | ScalarKind::Rational | ScalarKind::Stream)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::IntegerRing => "Z",
            Backend::RationalField => "Q",
            Backend::RealAlgebraicField => "Ralg",
            Backend::StreamExtension => "Rstream",
        }
    }

    pub fn parse(s: &str) -> Option<Backend> {
        match s {
            "Z" => Some(Backend::IntegerRing),
            "Q" => Some(Backend::RationalField),
            "Ralg" => Some(Backend::RealAlgebraicField),
            "Rstream" => Some(Backend::StreamExtension),
            _ => None,
        }
    }
}

/// Exact sign of a scalar. Indeterminate arises only when a stream scalar
/// participates and its digit budget runs out before a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Integer,
    Rational,
    Algebraic,
    Stream,
}

/// An exact element of one of the ring backends. Values are immutable and
/// cheap to share between threads.
#[derive(Clone, Debug)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Alg(Arc<AlgebraicReal>),
    Stream(StreamVal),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("stream operand cannot be certified nonzero within its digit budget")]
    IndeterminateOperand,
    #[error("operands belong to incompatible backends")]
    BackendMismatch,
    #[error("polynomial has no real root in the interval")]
    NoRootInInterval,
    #[error("polynomial has multiple real roots in the interval")]
    MultipleRootsInInterval,
    #[error("zero polynomial cannot define an algebraic number")]
    ZeroPolynomial,
    #[error("interval is empty")]
    EmptyInterval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn rat_of_int(i: &BigInt) -> BigRational {
    BigRational::from_integer(i.clone())
}

impl Scalar {
    pub fn int(v: i64) -> Scalar {
        Scalar::Int(BigInt::from(v))
    }

    pub fn rat(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Scalar {
        Scalar::Int(BigInt::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Int(BigInt::one())
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Int(_) => ScalarKind::Integer,
            Scalar::Rat(_) => ScalarKind::Rational,
            Scalar::Alg(_) => ScalarKind::Algebraic,
            Scalar::Stream(_) => ScalarKind::Stream,
        }
    }

    /// Construct an algebraic scalar as the unique root of `p` in [lo, hi].
    /// Root count is certified by Sturm's method after square-free reduction;
    /// rational roots demote to the rational representation.
    pub fn make_algebraic(p: &IPoly, lo: BigRational, hi: BigRational) -> Result<Scalar, ScalarError> {
        match AlgebraicReal::isolate(p, lo, hi) {
            Ok(RootValue::Rat(r)) => Ok(Scalar::Rat(r)),
            Ok(RootValue::Alg(a)) => Ok(Scalar::Alg(Arc::new(a))),
            Err(IsolateError::NoRootInInterval) => Err(ScalarError::NoRootInInterval),
            Err(IsolateError::MultipleRootsInInterval) => Err(ScalarError::MultipleRootsInInterval),
            Err(IsolateError::ZeroPolynomial) => Err(ScalarError::ZeroPolynomial),
            Err(IsolateError::EmptyInterval) => Err(ScalarError::EmptyInterval),
        }
    }

    /// Construct a digit-stream scalar. Comparisons against it consult at
    /// most `budget` digits.
    pub fn make_stream(
        name: impl Into<String>,
        int_part: BigInt,
        digits: impl Fn(u64) -> u8 + Send + Sync + 'static,
        budget: u64,
    ) -> Scalar {
        Scalar::Stream(StreamVal::leaf(StreamSource::new(name, int_part, digits, budget)))
    }

    pub fn from_root_value(v: RootValue) -> Scalar {
        match v {
            RootValue::Rat(r) => Scalar::Rat(r),
            RootValue::Alg(a) => Scalar::Alg(Arc::new(a)),
        }
    }

    fn from_stream_or_rat(v: StreamOrRat) -> Scalar {
        match v {
            StreamOrRat::Rat(r) => Scalar::Rat(r),
            StreamOrRat::Stream(s) => Scalar::Stream(s),
        }
    }

    /// The value as a rational if the representation is integer or rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(i) => Some(rat_of_int(i)),
            Scalar::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    /// The value as an integer if it is exactly integral.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Int(i) => Some(i.clone()),
            Scalar::Rat(r) if r.denom().is_one() => Some(r.numer().clone()),
            _ => None,
        }
    }

    /// Exact sign; Indeterminate only when a stream budget is exhausted.
    pub fn sign(&self) -> Sign {
        match self {
            Scalar::Int(i) => match i.sign() {
                num_bigint::Sign::Minus => Sign::Negative,
                num_bigint::Sign::NoSign => Sign::Zero,
                num_bigint::Sign::Plus => Sign::Positive,
            },
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Sign::Zero
                } else if r.is_negative() {
                    Sign::Negative
                } else {
                    Sign::Positive
                }
            }
            Scalar::Alg(a) => match a.sign() {
                -1 => Sign::Negative,
                0 => Sign::Zero,
                _ => Sign::Positive,
            },
            Scalar::Stream(v) => match v.strict_sign() {
                Some(1) => Sign::Positive,
                Some(_) => Sign::Negative,
                None => Sign::Indeterminate,
            },
        }
    }

    /// Certified one-sided query "value >= 0", the branch-test primitive.
    /// Unlike [`Scalar::sign`] this can certify a nonnegative stream value
    /// whose exact sign (zero vs. positive) is undecidable.
    pub fn ge_zero(&self) -> Option<bool> {
        match self {
            Scalar::Stream(v) => v.ge_zero(),
            _ => Some(self.sign() != Sign::Negative),
        }
    }

    /// Certified equality with zero; for streams only refutation is possible.
    pub fn eq_zero(&self) -> Option<bool> {
        match self {
            Scalar::Stream(v) => {
                if v.nonzero() {
                    Some(false)
                } else {
                    None
                }
            }
            _ => Some(self.sign() == Sign::Zero),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.eq_zero() == Some(true)
    }

    /// Sign of self - other.
    pub fn compare(&self, other: &Scalar) -> Result<Sign, ScalarError> {
        match (self, other) {
            (Scalar::Alg(a), Scalar::Alg(b)) => Ok(ordering_to_sign(a.cmp_algebraic(b))),
            (Scalar::Alg(a), _) => {
                let r = other.as_rational().ok_or(ScalarError::BackendMismatch)?;
                Ok(ordering_to_sign(a.cmp_rational(&r)))
            }
            (_, Scalar::Alg(b)) => {
                let r = self.as_rational().ok_or(ScalarError::BackendMismatch)?;
                Ok(ordering_to_sign(b.cmp_rational(&r).reverse()))
            }
            _ => Ok(arith(ArithOp::Sub, self, other)?.sign()),
        }
    }

    /// Exact equality; errors on algebraic-vs-stream comparisons, and treats
    /// an indeterminate difference as "not certified equal".
    pub fn eq_exact(&self, other: &Scalar) -> Result<bool, ScalarError> {
        Ok(self.compare(other)? == Sign::Zero)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(i) => Scalar::Int(-i),
            Scalar::Rat(r) => Scalar::Rat(-r.clone()),
            Scalar::Alg(a) => Scalar::Alg(Arc::new(a.neg())),
            Scalar::Stream(v) => Scalar::Stream(v.neg()),
        }
    }

    /// Nonnegative integer power by repeated multiplication.
    pub fn pow(&self, e: u32) -> Result<Scalar, ScalarError> {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = arith(ArithOp::Mul, &acc, self)?;
        }
        Ok(acc)
    }

    /// Lossless textual rendering, parseable by [`parse_literal`].
    pub fn render(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Alg(a) => {
                let (lo, hi) = a.interval();
                format!(
                    "alg({}, {}, {})",
                    a.poly_string(),
                    rat_to_string(lo),
                    rat_to_string(hi)
                )
            }
            Scalar::Stream(v) => v.render(),
        }
    }

    /// Structural equality of representations (used for round-trip checks on
    /// machines; value equality is [`Scalar::eq_exact`]).
    pub fn repr_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Stream(a), Scalar::Stream(b)) => a.repr_eq(b),
            (Scalar::Stream(_), _) | (_, Scalar::Stream(_)) => false,
            _ => self.eq_exact(other).unwrap_or(false),
        }
    }
}

pub fn rat_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ordering_to_sign(o: Ordering) -> Sign {
    match o {
        Ordering::Less => Sign::Negative,
        Ordering::Equal => Sign::Zero,
        Ordering::Greater => Sign::Positive,
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Exact ring/field arithmetic with promotion along
/// integer -> rational -> algebraic and rational -> stream extension.
pub fn arith(op: ArithOp, a: &Scalar, b: &Scalar) -> Result<Scalar, ScalarError> {
    use Scalar::*;
    match (a, b) {
        (Int(x), Int(y)) => match op {
            ArithOp::Add => Ok(Int(x + y)),
            ArithOp::Sub => Ok(Int(x - y)),
            ArithOp::Mul => Ok(Int(x * y)),
            ArithOp::Div => {
                if y.is_zero() {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Rat(BigRational::new(x.clone(), y.clone())))
                }
            }
        },
        (Alg(_), Stream(_)) | (Stream(_), Alg(_)) => Err(ScalarError::BackendMismatch),
        (Alg(x), Alg(y)) => alg_alg(op, x, y),
        (Alg(x), _) => {
            let r = b.as_rational().ok_or(ScalarError::BackendMismatch)?;
            alg_rat(op, x, &r)
        }
        (_, Alg(y)) => {
            let r = a.as_rational().ok_or(ScalarError::BackendMismatch)?;
            rat_alg(op, &r, y)
        }
        (Stream(x), Stream(y)) => stream_stream(op, x, y),
        (Stream(x), _) => {
            let r = b.as_rational().ok_or(ScalarError::BackendMismatch)?;
            stream_rat(op, x, &r)
        }
        (_, Stream(y)) => {
            let r = a.as_rational().ok_or(ScalarError::BackendMismatch)?;
            rat_stream(op, &r, y)
        }
        _ => {
            // only integer/rational combinations remain
            let x = a.as_rational().ok_or(ScalarError::BackendMismatch)?;
            let y = b.as_rational().ok_or(ScalarError::BackendMismatch)?;
            match op {
                ArithOp::Add => Ok(Rat(x + y)),
                ArithOp::Sub => Ok(Rat(x - y)),
                ArithOp::Mul => Ok(Rat(x * y)),
                ArithOp::Div => {
                    if y.is_zero() {
                        Err(ScalarError::DivisionByZero)
                    } else {
                        Ok(Rat(x / y))
                    }
                }
            }
        }
    }
}

fn alg_alg(op: ArithOp, x: &AlgebraicReal, y: &AlgebraicReal) -> Result<Scalar, ScalarError> {
    let v = match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.add(&y.neg()),
        ArithOp::Mul => x.mul(y),
        ArithOp::Div => {
            if y.sign() == 0 {
                return Err(ScalarError::DivisionByZero);
            }
            match y.inverse() {
                RootValue::Rat(r) => return alg_rat(ArithOp::Mul, x, &r),
                RootValue::Alg(inv) => x.mul(&inv),
            }
        }
    };
    Ok(Scalar::from_root_value(v))
}

fn alg_rat(op: ArithOp, x: &AlgebraicReal, r: &BigRational) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => Ok(Scalar::Alg(Arc::new(x.add_rational(r)))),
        ArithOp::Sub => Ok(Scalar::Alg(Arc::new(x.add_rational(&-r.clone())))),
        ArithOp::Mul => {
            if r.is_zero() {
                Ok(Scalar::Rat(BigRational::zero()))
            } else {
                Ok(Scalar::Alg(Arc::new(x.mul_rational(r))))
            }
        }
        ArithOp::Div => {
            if r.is_zero() {
                Err(ScalarError::DivisionByZero)
            } else {
                Ok(Scalar::Alg(Arc::new(x.mul_rational(&r.recip()))))
            }
        }
    }
}

fn rat_alg(op: ArithOp, r: &BigRational, y: &AlgebraicReal) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => alg_rat(ArithOp::Add, y, r),
        ArithOp::Sub => alg_rat(ArithOp::Add, &y.neg(), r), // r - y = (-y) + r
        ArithOp::Mul => alg_rat(ArithOp::Mul, y, r),
        ArithOp::Div => {
            if y.sign() == 0 {
                return Err(ScalarError::DivisionByZero);
            }
            match y.inverse() {
                RootValue::Rat(inv) => Ok(Scalar::Rat(r * inv)),
                RootValue::Alg(inv) => alg_rat(ArithOp::Mul, &inv, r),
            }
        }
    }
}

fn stream_rat(op: ArithOp, x: &StreamVal, r: &BigRational) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => Ok(Scalar::Stream(x.add_rational(r))),
        ArithOp::Sub => Ok(Scalar::Stream(x.add_rational(&-r.clone()))),
        ArithOp::Mul => {
            if r.is_zero() {
                Ok(Scalar::Rat(BigRational::zero()))
            } else {
                Ok(Scalar::Stream(x.mul_rational(r)))
            }
        }
        ArithOp::Div => {
            if r.is_zero() {
                Err(ScalarError::DivisionByZero)
            } else {
                Ok(Scalar::Stream(x.mul_rational(&r.recip())))
            }
        }
    }
}

fn rat_stream(op: ArithOp, r: &BigRational, y: &StreamVal) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => Ok(Scalar::Stream(y.add_rational(r))),
        ArithOp::Sub => Ok(Scalar::Stream(y.neg().add_rational(r))),
        ArithOp::Mul => {
            if r.is_zero() {
                Ok(Scalar::Rat(BigRational::zero()))
            } else {
                Ok(Scalar::Stream(y.mul_rational(r)))
            }
        }
        ArithOp::Div => {
            if !y.nonzero() {
                return Err(ScalarError::IndeterminateOperand);
            }
            if r.is_zero() {
                return Ok(Scalar::Rat(BigRational::zero()));
            }
            Ok(Scalar::Stream(y.recip().mul_rational(r)))
        }
    }
}

fn stream_stream(op: ArithOp, x: &StreamVal, y: &StreamVal) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => Ok(Scalar::from_stream_or_rat(x.add(y))),
        ArithOp::Sub => Ok(Scalar::from_stream_or_rat(x.sub(y))),
        ArithOp::Mul => Ok(Scalar::Stream(x.mul(y))),
        ArithOp::Div => {
            if !y.nonzero() {
                return Err(ScalarError::IndeterminateOperand);
            }
            Ok(Scalar::Stream(x.div(y)))
        }
    }
}

/// Error from scalar literal parsing.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("invalid scalar literal: {0}")]
pub struct LiteralError(pub String);

/// Parse a scalar literal: `-17`, `5/6`, or `alg(x^2-2, 1, 2)`.
pub fn parse_literal(s: &str) -> Result<Scalar, LiteralError> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix("alg(").and_then(|r| r.strip_suffix(')')) {
        let parts = split_top_level(inner);
        if parts.len() != 3 {
            return Err(LiteralError(format!("alg(...) needs 3 arguments, got {}", parts.len())));
        }
        let p = parse_poly(parts[0].trim())?;
        let lo = parse_rational(parts[1].trim())?;
        let hi = parse_rational(parts[2].trim())?;
        return Scalar::make_algebraic(&p, lo, hi)
            .map_err(|e| LiteralError(format!("alg(...): {e}")));
    }
    if t.contains('/') {
        return Ok(Scalar::Rat(parse_rational(t)?));
    }
    let i: BigInt = t
        .parse()
        .map_err(|_| LiteralError(format!("expected integer, got `{t}`")))?;
    Ok(Scalar::Int(i))
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

pub fn parse_rational(s: &str) -> Result<BigRational, LiteralError> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| LiteralError(format!("bad numerator `{n}`")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| LiteralError(format!("bad denominator `{d}`")))?;
        if den.is_zero() {
            return Err(LiteralError("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    } else {
        let i: BigInt = t
            .parse()
            .map_err(|_| LiteralError(format!("expected rational, got `{t}`")))?;
        Ok(BigRational::from_integer(i))
    }
}

/// Highest degree accepted in polynomial literals; keeps hostile literals
/// from requesting unbounded allocation or isolation work.
pub const MAX_LITERAL_DEGREE: usize = 64;

/// Parse a univariate integer polynomial like `x^2-2` or `3*x^3-4*x+1`.
pub fn parse_poly(s: &str) -> Result<IPoly, LiteralError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(LiteralError("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = compact.starts_with('-');
    let body = compact.strip_prefix('-').or_else(|| compact.strip_prefix('+')).unwrap_or(&compact);
    for c in body.chars() {
        match c {
            '+' | '-' => {
                if cur.is_empty() {
                    return Err(LiteralError(format!("dangling sign in `{s}`")));
                }
                terms.push((neg, std::mem::take(&mut cur)));
                neg = c == '-';
            }
            _ => cur.push(c),
        }
    }
    if cur.is_empty() {
        return Err(LiteralError(format!("dangling sign in `{s}`")));
    }
    terms.push((neg, cur));

    let mut coeffs: Vec<BigInt> = Vec::new();
    for (is_neg, term) in terms {
        let mut coeff = BigInt::one();
        let mut power = 0usize;
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(LiteralError(format!("empty factor in `{term}`")));
            }
            if let Some(rest) = factor.strip_prefix('x') {
                let p = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.parse::<usize>()
                        .map_err(|_| LiteralError(format!("bad exponent in `{factor}`")))?
                } else {
                    return Err(LiteralError(format!("bad factor `{factor}`")));
                };
                power += p;
                if power > MAX_LITERAL_DEGREE {
                    return Err(LiteralError(format!(
                        "degree {power} exceeds the literal limit {MAX_LITERAL_DEGREE}"
                    )));
                }
            } else {
                let c: BigInt = factor
                    .parse()
                    .map_err(|_| LiteralError(format!("bad coefficient `{factor}`")))?;
                coeff *= c;
            }
        }
        if is_neg {
            coeff = -coeff;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += coeff;
    }
    Ok(IPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Scalar {
        parse_literal("alg(x^2-2, 1, 2)").unwrap()
    }

    #[test]
    fn rational_addition() {
        let a = Scalar::rat(1, 2);
        let b = Scalar::rat(1, 3);
        let s = arith(ArithOp::Add, &a, &b).unwrap();
        assert!(s.eq_exact(&Scalar::rat(5, 6)).unwrap());
    }

    #[test]
    fn sqrt2_times_sqrt2_is_two() {
        let r2 = sqrt2();
        let p = arith(ArithOp::Mul, &r2, &r2).unwrap();
        assert!(p.eq_exact(&Scalar::int(2)).unwrap());
    }

    #[test]
    fn division_by_zero() {
        let e = arith(ArithOp::Div, &Scalar::int(1), &Scalar::int(0)).unwrap_err();
        assert_eq!(e, ScalarError::DivisionByZero);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(Scalar::rat(-3, 7).sign(), Sign::Negative);
        // sqrt(2) - 577/408 < 0 because 577^2 = 332929 > 332928 = 2*408^2
        let d = arith(ArithOp::Sub, &sqrt2(), &Scalar::rat(577, 408)).unwrap();
        assert_eq!(d.sign(), Sign::Negative);
    }

    #[test]
    fn stream_zero_is_indeterminate() {
        let s = Scalar::make_stream("z", BigInt::zero(), |_| 0, 100);
        assert_eq!(s.sign(), Sign::Indeterminate);
        assert_eq!(s.ge_zero(), Some(true)); // enclosure stays within [0, eps]
        assert_eq!(s.eq_zero(), None);
    }

    #[test]
    fn make_algebraic_examples() {
        let p = parse_poly("x^2-2").unwrap();
        let lo = BigRational::from_integer(BigInt::one());
        assert!(Scalar::make_algebraic(&p, lo.clone(), BigRational::from_integer(BigInt::from(2))).is_ok());
        // sqrt(2) ~ 1.414 lies inside [1, 3/2], so this isolates rather than errs
        let hi = BigRational::new(BigInt::from(3), BigInt::from(2));
        let a = Scalar::make_algebraic(&p, lo, hi).unwrap();
        assert!(a.eq_exact(&sqrt2()).unwrap());
        // x^2+1 has no real roots
        let q = parse_poly("x^2+1").unwrap();
        assert_eq!(
            Scalar::make_algebraic(
                &q,
                BigRational::from_integer(BigInt::from(-10)),
                BigRational::from_integer(BigInt::from(10))
            )
            .unwrap_err(),
            ScalarError::NoRootInInterval
        );
    }

    #[test]
    fn make_stream_examples() {
        // digits 1,0,1,0,... -> value 1.01 exactly
        let s = Scalar::make_stream("chi", BigInt::zero(), |i| u8::from(i == 0 || i == 2), 100);
        // compare against 101/100: indeterminate (equality never certified)
        assert_eq!(s.compare(&Scalar::rat(101, 100)).unwrap(), Sign::Indeterminate);
        // against 1: positive, first differing digit at index 2
        assert_eq!(s.compare(&Scalar::int(1)).unwrap(), Sign::Positive);
    }

    #[test]
    fn stream_division_requires_nonzero_certificate() {
        let z = Scalar::make_stream("z", BigInt::zero(), |_| 0, 50);
        let e = arith(ArithOp::Div, &Scalar::int(1), &z).unwrap_err();
        assert_eq!(e, ScalarError::IndeterminateOperand);
        let two = Scalar::make_stream("t", BigInt::from(2), |_| 0, 50);
        assert!(arith(ArithOp::Div, &Scalar::int(1), &two).is_ok());
    }

    #[test]
    fn algebraic_stream_mix_is_rejected() {
        let s = Scalar::make_stream("s", BigInt::one(), |_| 0, 50);
        let e = arith(ArithOp::Add, &sqrt2(), &s).unwrap_err();
        assert_eq!(e, ScalarError::BackendMismatch);
    }

    #[test]
    fn literal_round_trip() {
        for lit in ["-17", "5/6", "alg(x^2-2, 1, 2)", "0", "42"] {
            let v = parse_literal(lit).unwrap();
            let back = parse_literal(&v.render()).unwrap();
            assert!(v.eq_exact(&back).unwrap(), "round trip failed for {lit}");
        }
    }

    #[test]
    fn division_promotes_to_rational() {
        let q = arith(ArithOp::Div, &Scalar::int(1), &Scalar::int(2)).unwrap();
        assert!(matches!(q, Scalar::Rat(_)));
        assert!(q.eq_exact(&Scalar::rat(1, 2)).unwrap());
    }
}

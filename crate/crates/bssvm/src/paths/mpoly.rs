//! Multivariate polynomials over exact scalars in canonical expanded form:
//! graded-lexicographic monomial order, no zero coefficients, and (for
//! all-rational coefficients) integer-primitive scaling with the sign kept.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{arith, ArithOp, Scalar, Sign};

/// Exponent vector with trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Monomial {
        let mut v = vec![0; index + 1];
        v[index] = 1;
        Monomial(v)
    }

    fn trim(mut v: Vec<u32>) -> Monomial {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![0u32; n];
        for (i, item) in v.iter_mut().enumerate() {
            *item = self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0);
        }
        Monomial::trim(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // graded lex: total degree first, then lexicographic on exponents
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let n = self.0.len().max(other.0.len());
                for i in 0..n {
                    let a = self.0.get(i).copied().unwrap_or(0);
                    let b = other.0.get(i).copied().unwrap_or(0);
                    match a.cmp(&b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Expanded multivariate polynomial with exact scalar coefficients.
/// Coefficient arithmetic must stay inside one backend; the path enumerator
/// guarantees stream-free scalars before constructing these.
#[derive(Clone, Debug, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

fn coeff_op(op: ArithOp, a: &Scalar, b: &Scalar) -> Scalar {
    arith(op, a, b).expect("polynomial coefficients stay within one exact backend")
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly::default()
    }

    pub fn one() -> MPoly {
        MPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> MPoly {
        let mut terms = BTreeMap::new();
        if c.sign() != Sign::Zero {
            terms.insert(Monomial::unit(), c);
        }
        MPoly { terms }
    }

    pub fn var(index: usize) -> MPoly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(index), Scalar::one());
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant()
            .map_or(false, |c| c.eq_exact(&Scalar::one()).unwrap_or(false))
    }

    /// Some(c) when the polynomial is the constant c (including zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_unit() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.sign() == Sign::Zero {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = coeff_op(ArithOp::Add, &old, &c);
                if s.sign() != Sign::Zero {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), coeff_op(ArithOp::Mul, ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        if c.sign() == Sign::Zero {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), coeff_op(ArithOp::Mul, k, c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact evaluation with a per-variable power cache.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let nvars = self
            .terms
            .keys()
            .map(|m| m.exponents().len())
            .max()
            .unwrap_or(0);
        let mut maxexp = vec![0u32; nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                maxexp[i] = maxexp[i].max(e);
            }
        }
        let mut pows: Vec<Vec<Scalar>> = Vec::with_capacity(nvars);
        for (i, &me) in maxexp.iter().enumerate() {
            let x = point.get(i).cloned().unwrap_or_else(Scalar::zero);
            let mut tower = Vec::with_capacity(me as usize + 1);
            tower.push(Scalar::one());
            for e in 1..=me {
                let prev = &tower[(e - 1) as usize];
                tower.push(coeff_op(ArithOp::Mul, prev, &x));
            }
            pows.push(tower);
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = coeff_op(ArithOp::Mul, &t, &pows[i][e as usize]);
                }
            }
            acc = coeff_op(ArithOp::Add, &acc, &t);
        }
        acc
    }

    /// Structural equality of canonical forms.
    pub fn struct_eq(&self, other: &MPoly) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms.iter().zip(&other.terms).all(|((ma, ca), (mb, cb))| {
            ma == mb && ca.eq_exact(cb).unwrap_or(false)
        })
    }

    /// Canonical scaling: when every coefficient is rational, multiply by the
    /// positive rational that clears denominators and makes the integer
    /// content 1. The sign of each coefficient is preserved, so sign
    /// conditions on the polynomial are unchanged.
    pub fn canonical_scaled(&self) -> MPoly {
        let mut rats = Vec::with_capacity(self.terms.len());
        for c in self.terms.values() {
            match c.as_rational() {
                Some(r) => rats.push(r),
                None => return self.clone(),
            }
        }
        if rats.is_empty() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for r in &rats {
            denom_lcm = denom_lcm.lcm(r.denom());
        }
        let mut content = BigInt::zero();
        for r in &rats {
            let int_coeff = r.numer() * (&denom_lcm / r.denom());
            content = content.gcd(&int_coeff);
        }
        if content.is_zero() {
            return MPoly::zero();
        }
        let factor = BigRational::new(denom_lcm, content);
        let terms = self
            .terms
            .iter()
            .zip(rats)
            .map(|((m, _), r)| (m.clone(), Scalar::Rat(r * &factor)))
            .collect();
        MPoly { terms }
    }

    /// Canonical string: terms in descending graded-lex order, variables
    /// rendered x1, x2, ... (variable index 0 is x1).
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (m, c) in self.terms.iter().rev() {
            let (neg, mag) = match c {
                Scalar::Int(i) => (i.is_negative(), Scalar::Int(i.abs())),
                Scalar::Rat(r) => (r.is_negative(), Scalar::Rat(r.abs())),
                other => (false, other.clone()),
            };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push(if neg { '-' } else { '+' });
            }
            let coeff_str = mag.render();
            let is_one = mag.eq_exact(&Scalar::one()).unwrap_or(false);
            if m.is_unit() {
                s.push_str(&coeff_str);
            } else {
                let mut first = true;
                if !is_one {
                    s.push_str(&coeff_str);
                    first = false;
                }
                for (i, &e) in m.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !first {
                        s.push('*');
                    }
                    first = false;
                    s.push_str(&format!("x{}", i + 1));
                    if e > 1 {
                        s.push_str(&format!("^{e}"));
                    }
                }
            }
        }
        s
    }
}

/// A quotient of polynomials. The denominator is 1 whenever it is constant
/// (constants fold into the numerator), so any surviving denominator is a
/// nonconstant polynomial whose nonvanishing is recorded as a side condition.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    pub num: MPoly,
    pub den: MPoly,
}

/// A division whose divisor is identically zero: the path can never halt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroDivisor;

impl RationalExpr {
    pub fn from_poly(p: MPoly) -> RationalExpr {
        RationalExpr {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn zero() -> RationalExpr {
        RationalExpr::from_poly(MPoly::zero())
    }

    pub fn constant(c: Scalar) -> RationalExpr {
        RationalExpr::from_poly(MPoly::constant(c))
    }

    pub fn var(index: usize) -> RationalExpr {
        RationalExpr::from_poly(MPoly::var(index))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn normalize(mut self) -> RationalExpr {
        if let Some(c) = self.den.as_constant() {
            // constant denominators fold away; zero cannot arise (divisions
            // by constant zero kill the path before construction)
            debug_assert!(c.sign() != Sign::Zero);
            let inv = arith(ArithOp::Div, &Scalar::one(), &c)
                .expect("nonzero constant denominator");
            self.num = self.num.scale(&inv);
            self.den = MPoly::one();
        }
        self
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.den.is_one() && other.den.is_one() {
            return RationalExpr::from_poly(self.num.add(&other.num));
        }
        RationalExpr {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .normalize()
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        RationalExpr {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .normalize()
    }

    /// Divide, returning the new denominator factor (the divisor's numerator)
    /// when it is nonconstant; the caller records it as a side condition.
    pub fn div(&self, other: &RationalExpr) -> Result<(RationalExpr, Option<MPoly>), ZeroDivisor> {
        if other.num.is_zero() {
            return Err(ZeroDivisor);
        }
        let side = if other.num.as_constant().is_some() {
            None
        } else {
            Some(other.num.clone())
        };
        let out = RationalExpr {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        }
        .normalize();
        Ok((out, side))
    }

    pub fn pow(&self, e: u32) -> RationalExpr {
        RationalExpr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
        .normalize()
    }

    /// Exact evaluation; the caller guarantees the denominator is nonzero at
    /// the point (cell membership established the side conditions first).
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, crate::scalar::ScalarError> {
        let n = self.num.eval(point);
        if self.den.is_one() {
            return Ok(n);
        }
        let d = self.den.eval(point);
        arith(ArithOp::Div, &n, &d)
    }

    pub fn render(&self) -> String {
        if self.den.is_one() {
            self.num.render()
        } else {
            format!("({})/({})", self.num.render(), self.den.render())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        // x1^2 > x1*x2 > x2^2 > x1 > x2 > 1 in graded lex (descending)
        let m_x1sq = Monomial::trim(vec![2]);
        let m_x1x2 = Monomial::trim(vec![1, 1]);
        let m_x2sq = Monomial::trim(vec![0, 2]);
        let m_x1 = Monomial::var(0);
        let m_x2 = Monomial::var(1);
        assert!(m_x1sq > m_x1x2);
        assert!(m_x1x2 > m_x2sq);
        assert!(m_x2sq > m_x1);
        assert!(m_x1 > m_x2);
        assert!(m_x2 > Monomial::unit());
    }

    #[test]
    fn expansion_and_rendering() {
        // (x1 + x2)^2 = x1^2 + 2*x1*x2 + x2^2
        let p = MPoly::var(0).add(&MPoly::var(1)).pow(2);
        assert_eq!(p.render(), "x1^2+2*x1*x2+x2^2");
        // (x1-2)(x1+2) = x1^2 - 4
        let q = MPoly::var(0)
            .sub(&MPoly::constant(Scalar::int(2)))
            .mul(&MPoly::var(0).add(&MPoly::constant(Scalar::int(2))));
        assert_eq!(q.render(), "x1^2-4");
    }

    #[test]
    fn canonical_scaling_clears_denominators() {
        // 1000*x1^4 - 4004*x1^2 + 4000 scaled by content 4
        let p = MPoly::var(0)
            .pow(2)
            .sub(&MPoly::constant(Scalar::rat(1, 1000)))
            .canonical_scaled();
        assert_eq!(p.render(), "1000*x1^2-1");
        let q = MPoly::var(0).scale(&Scalar::int(4)).canonical_scaled();
        assert_eq!(q.render(), "x1");
        // sign is preserved
        let r = MPoly::var(0).scale(&Scalar::int(-4)).canonical_scaled();
        assert_eq!(r.render(), "-x1");
    }

    #[test]
    fn rational_expr_division_tracks_sides() {
        // (x1 + 2/x1)/2: denominator x1 recorded once, constant 2 folds away
        let x = RationalExpr::var(0);
        let (two_over_x, side) = RationalExpr::constant(Scalar::int(2)).div(&x).unwrap();
        assert!(side.is_some());
        assert_eq!(side.unwrap().render(), "x1");
        let sum = x.add(&two_over_x);
        let (half, side2) = sum.div(&RationalExpr::constant(Scalar::int(2))).unwrap();
        assert!(side2.is_none());
        assert_eq!(half.num.render(), "x1^2+2");
        assert_eq!(half.den.render(), "2*x1");
        // evaluate at 3/2: (3/2 + 4/3)/2 = 17/12
        let v = half.eval(&[Scalar::rat(3, 2)]).unwrap();
        assert!(v.eq_exact(&Scalar::rat(17, 12)).unwrap());
    }

    #[test]
    fn division_by_constant_zero_is_flagged() {
        let x = RationalExpr::var(0);
        assert_eq!(x.div(&RationalExpr::zero()).unwrap_err(), ZeroDivisor);
    }

    #[test]
    fn eval_matches_hand_expansion() {
        // p = x1^2*x2 - 3*x2 + 1/2 at (2, 3): 12 - 9 + 1/2 = 7/2
        let p = MPoly::var(0)
            .pow(2)
            .mul(&MPoly::var(1))
            .sub(&MPoly::var(1).scale(&Scalar::int(3)))
            .add(&MPoly::constant(Scalar::rat(1, 2)));
        let v = p.eval(&[Scalar::int(2), Scalar::int(3)]);
        assert!(v.eq_exact(&Scalar::rat(7, 2)).unwrap());
    }
}

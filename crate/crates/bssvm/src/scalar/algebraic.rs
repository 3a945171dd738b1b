//! Real algebraic numbers: square-free integer polynomial plus isolating
//! interval, with resultant-based arithmetic and Sturm root counting.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{
    count_roots_closed, ipoly_gcd, resultant_root_prod, resultant_root_sum, IPoly,
};

/// A real algebraic number.
///
/// Invariants: `poly` is square-free, primitive, has a positive leading
/// coefficient and degree >= 2; the open interval (lo, hi) contains exactly
/// one real root of `poly` and neither endpoint is a root.
#[derive(Debug)]
pub struct AlgebraicReal {
    poly: IPoly,
    lo: BigRational,
    hi: BigRational,
    sign_cache: OnceLock<i8>,
}

impl Clone for AlgebraicReal {
    fn clone(&self) -> Self {
        AlgebraicReal {
            poly: self.poly.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            sign_cache: self.sign_cache.clone(),
        }
    }
}

/// Result of an exact operation: either collapsed to a rational or a
/// genuine algebraic representation.
#[derive(Clone, Debug)]
pub enum RootValue {
    Rat(BigRational),
    Alg(AlgebraicReal),
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

enum Bisected {
    Narrowed(BigRational, BigRational),
    Exact(BigRational),
}

/// One bisection step on an isolating interval of `poly`.
fn bisect(poly: &IPoly, lo: &BigRational, hi: &BigRational) -> Bisected {
    let mid = (lo + hi) / two();
    let sm = poly.sign_at(&mid);
    if sm == 0 {
        return Bisected::Exact(mid);
    }
    if poly.sign_at(lo) * sm < 0 {
        Bisected::Narrowed(lo.clone(), mid)
    } else {
        Bisected::Narrowed(mid, hi.clone())
    }
}

/// Build a [`RootValue`] from a square-free polynomial with exactly one root
/// in the closed interval, demoting rational cases.
fn make_root(poly_sf: IPoly, lo: BigRational, hi: BigRational) -> RootValue {
    debug_assert_eq!(count_roots_closed(&poly_sf, &lo, &hi), 1);
    if poly_sf.sign_at(&lo) == 0 {
        return RootValue::Rat(lo);
    }
    if poly_sf.sign_at(&hi) == 0 {
        return RootValue::Rat(hi);
    }
    if let Some(1) = poly_sf.degree() {
        let r = BigRational::new(-poly_sf.coeff(0), poly_sf.coeff(1));
        return RootValue::Rat(r);
    }
    // unique root is zero when 0 is interior and a root of the polynomial
    if poly_sf.coeff(0).is_zero() && lo.is_negative() && hi.is_positive() {
        return RootValue::Rat(BigRational::zero());
    }
    RootValue::Alg(AlgebraicReal {
        poly: poly_sf,
        lo,
        hi,
        sign_cache: OnceLock::new(),
    })
}

impl AlgebraicReal {
    /// Isolate the unique root of `poly` in [lo, hi], if there is one.
    /// The polynomial is square-free-reduced first.
    pub fn isolate(poly: &IPoly, lo: BigRational, hi: BigRational) -> Result<RootValue, IsolateError> {
        if poly.is_zero() {
            return Err(IsolateError::ZeroPolynomial);
        }
        if lo > hi {
            return Err(IsolateError::EmptyInterval);
        }
        let sf = poly.squarefree_part();
        if sf.degree() == Some(0) {
            return Err(IsolateError::NoRootInInterval);
        }
        match count_roots_closed(&sf, &lo, &hi) {
            0 => Err(IsolateError::NoRootInInterval),
            1 => Ok(make_root(sf, lo, hi)),
            _ => Err(IsolateError::MultipleRootsInInterval),
        }
    }

    pub fn defining_poly(&self) -> &IPoly {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    /// Exact sign of the represented number.
    pub fn sign(&self) -> i8 {
        *self.sign_cache.get_or_init(|| {
            let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
            loop {
                if !lo.is_negative() {
                    return 1; // root is in (lo, hi), lo >= 0
                }
                if !hi.is_positive() {
                    return -1;
                }
                if self.poly.coeff(0).is_zero() {
                    return 0; // zero is the unique root in the interval
                }
                match bisect(&self.poly, &lo, &hi) {
                    Bisected::Exact(m) => {
                        return match m.cmp(&BigRational::zero()) {
                            Ordering::Less => -1,
                            Ordering::Equal => 0,
                            Ordering::Greater => 1,
                        }
                    }
                    Bisected::Narrowed(l, h) => {
                        lo = l;
                        hi = h;
                    }
                }
            }
        })
    }

    /// Exact comparison to a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        if self.poly.sign_at(r) == 0 && *r >= self.lo && *r <= self.hi {
            return Ordering::Equal;
        }
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        loop {
            if *r <= lo {
                return Ordering::Greater; // value lies strictly above lo
            }
            if *r >= hi {
                return Ordering::Less;
            }
            match bisect(&self.poly, &lo, &hi) {
                Bisected::Exact(m) => return m.cmp(r),
                Bisected::Narrowed(l, h) => {
                    lo = l;
                    hi = h;
                }
            }
        }
    }

    /// Exact comparison of two algebraic numbers.
    pub fn cmp_algebraic(&self, other: &AlgebraicReal) -> Ordering {
        let (mut alo, mut ahi) = (self.lo.clone(), self.hi.clone());
        let (mut blo, mut bhi) = (other.lo.clone(), other.hi.clone());
        if ahi <= blo {
            // values are strictly interior, so a shared endpoint still separates
            return Ordering::Less;
        }
        if bhi <= alo {
            return Ordering::Greater;
        }
        // overlap: decide equality via common roots of the gcd
        let g = ipoly_gcd(&self.poly, &other.poly);
        if g.degree().map_or(false, |d| d >= 1) {
            let klo = alo.clone().max(blo.clone());
            let khi = ahi.clone().min(bhi.clone());
            if count_roots_closed(&g, &klo, &khi) >= 1 {
                return Ordering::Equal;
            }
        }
        // distinct: refine until the intervals separate
        loop {
            match bisect(&self.poly, &alo, &ahi) {
                Bisected::Exact(m) => return other.cmp_rational(&m).reverse(),
                Bisected::Narrowed(l, h) => {
                    alo = l;
                    ahi = h;
                }
            }
            match bisect(&other.poly, &blo, &bhi) {
                Bisected::Exact(m) => return self.cmp_rational(&m),
                Bisected::Narrowed(l, h) => {
                    blo = l;
                    bhi = h;
                }
            }
            if ahi <= blo {
                return Ordering::Less;
            }
            if bhi <= alo {
                return Ordering::Greater;
            }
        }
    }

    /// A sub-interval of the isolating interval that strictly excludes zero.
    fn interval_excluding_zero(&self) -> (BigRational, BigRational) {
        debug_assert!(self.sign() != 0);
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        loop {
            if lo.is_positive() || hi.is_negative() {
                return (lo, hi);
            }
            match bisect(&self.poly, &lo, &hi) {
                Bisected::Exact(m) => return (m.clone(), m),
                Bisected::Narrowed(l, h) => {
                    lo = l;
                    hi = h;
                }
            }
        }
    }

    pub fn neg(&self) -> AlgebraicReal {
        AlgebraicReal {
            poly: self.poly.negate_root(),
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            sign_cache: OnceLock::new(),
        }
    }

    /// Value plus a rational shift.
    pub fn add_rational(&self, r: &BigRational) -> AlgebraicReal {
        AlgebraicReal {
            poly: self.poly.shift_root(r),
            lo: &self.lo + r,
            hi: &self.hi + r,
            sign_cache: OnceLock::new(),
        }
    }

    /// Value times a nonzero rational.
    pub fn mul_rational(&self, r: &BigRational) -> AlgebraicReal {
        debug_assert!(!r.is_zero());
        let (mut lo, mut hi) = (&self.lo * r, &self.hi * r);
        if r.is_negative() {
            std::mem::swap(&mut lo, &mut hi);
        }
        AlgebraicReal {
            poly: self.poly.scale_root(r),
            lo,
            hi,
            sign_cache: OnceLock::new(),
        }
    }

    /// Multiplicative inverse; the value must be nonzero.
    pub fn inverse(&self) -> RootValue {
        debug_assert!(self.sign() != 0);
        let p = self.poly.deflate_zero_root();
        let (lo, hi) = self.interval_excluding_zero();
        if lo == hi {
            return RootValue::Rat(lo.recip());
        }
        let inv = p.invert_root();
        let (ilo, ihi) = (hi.recip(), lo.recip());
        make_root(inv.squarefree_part(), ilo, ihi)
    }

    /// Exact sum of two algebraic numbers.
    pub fn add(&self, other: &AlgebraicReal) -> RootValue {
        let r = resultant_root_sum(&self.poly, &other.poly).squarefree_part();
        let (mut alo, mut ahi) = (self.lo.clone(), self.hi.clone());
        let (mut blo, mut bhi) = (other.lo.clone(), other.hi.clone());
        loop {
            let lo = &alo + &blo;
            let hi = &ahi + &bhi;
            if count_roots_closed(&r, &lo, &hi) == 1 {
                return make_root(r, lo, hi);
            }
            match bisect(&self.poly, &alo, &ahi) {
                Bisected::Exact(m) => return RootValue::Alg(other.add_rational(&m)),
                Bisected::Narrowed(l, h) => {
                    alo = l;
                    ahi = h;
                }
            }
            match bisect(&other.poly, &blo, &bhi) {
                Bisected::Exact(m) => return RootValue::Alg(self.add_rational(&m)),
                Bisected::Narrowed(l, h) => {
                    blo = l;
                    bhi = h;
                }
            }
        }
    }

    /// Exact product of two algebraic numbers (both known nonzero or not;
    /// zero operands are fine, they just never reach here from the scalar
    /// layer which demotes exact zeros to rationals).
    pub fn mul(&self, other: &AlgebraicReal) -> RootValue {
        if self.sign() == 0 || other.sign() == 0 {
            return RootValue::Rat(BigRational::zero());
        }
        let pa = self.poly.deflate_zero_root();
        let pb = other.poly.deflate_zero_root();
        let r = resultant_root_prod(&pa, &pb).squarefree_part();
        let (mut alo, mut ahi) = self.interval_excluding_zero();
        let (mut blo, mut bhi) = other.interval_excluding_zero();
        loop {
            let corners = [&alo * &blo, &alo * &bhi, &ahi * &blo, &ahi * &bhi];
            let lo = corners.iter().min().unwrap().clone();
            let hi = corners.iter().max().unwrap().clone();
            if count_roots_closed(&r, &lo, &hi) == 1 {
                return make_root(r, lo, hi);
            }
            match bisect(&self.poly, &alo, &ahi) {
                Bisected::Exact(m) => return RootValue::Alg(other.mul_rational(&m)),
                Bisected::Narrowed(l, h) => {
                    alo = l;
                    ahi = h;
                }
            }
            match bisect(&other.poly, &blo, &bhi) {
                Bisected::Exact(m) => return RootValue::Alg(self.mul_rational(&m)),
                Bisected::Narrowed(l, h) => {
                    blo = l;
                    bhi = h;
                }
            }
        }
    }

    /// Render the defining polynomial in descending-degree form, e.g. "x^2-2".
    pub fn poly_string(&self) -> String {
        poly_to_string(&self.poly)
    }
}

/// Errors from root isolation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsolateError {
    ZeroPolynomial,
    EmptyInterval,
    NoRootInInterval,
    MultipleRootsInInterval,
}

pub fn poly_to_string(p: &IPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let d = p.degree().unwrap();
    let mut s = String::new();
    for i in (0..=d).rev() {
        let c = p.coeff(i);
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let show_coeff = !mag.is_one() || i == 0;
        if show_coeff {
            s.push_str(&mag.to_string());
        }
        if i > 0 {
            if show_coeff {
                s.push('*');
            }
            s.push('x');
            if i > 1 {
                s.push('^');
                s.push_str(&i.to_string());
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::IPoly;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt(n: i64) -> AlgebraicReal {
        let p = IPoly::from_i64(&[-n, 0, 1]);
        match AlgebraicReal::isolate(&p, rat(0, 1), rat(n, 1).max(rat(1, 1))).unwrap() {
            RootValue::Alg(a) => a,
            RootValue::Rat(r) => panic!("sqrt({n}) collapsed to {r}"),
        }
    }

    #[test]
    fn sqrt2_sign_and_compare() {
        let r2 = sqrt(2);
        assert_eq!(r2.sign(), 1);
        // 577/408 > sqrt(2) because 577^2 = 332929 > 332928 = 2*408^2
        assert_eq!(r2.cmp_rational(&rat(577, 408)), Ordering::Less);
        assert_eq!(r2.cmp_rational(&rat(7, 5)), Ordering::Greater);
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let r2 = sqrt(2);
        match r2.mul(&r2) {
            RootValue::Rat(r) => assert_eq!(r, rat(2, 1)),
            RootValue::Alg(a) => {
                assert_eq!(a.cmp_rational(&rat(2, 1)), Ordering::Equal);
            }
        }
    }

    #[test]
    fn sum_of_roots() {
        let r2 = sqrt(2);
        let r3 = sqrt(3);
        let s = match r2.add(&r3) {
            RootValue::Alg(a) => a,
            RootValue::Rat(r) => panic!("sqrt2+sqrt3 collapsed to {r}"),
        };
        // sqrt2 + sqrt3 is the positive root of x^4 - 10x^2 + 1 near 3.146
        assert_eq!(s.cmp_rational(&rat(3, 1)), Ordering::Greater);
        assert_eq!(s.cmp_rational(&rat(16, 5)), Ordering::Less);
    }

    #[test]
    fn add_opposites_cancels() {
        let r2 = sqrt(2);
        let n2 = r2.neg();
        match r2.add(&n2) {
            RootValue::Rat(r) => assert!(r.is_zero()),
            RootValue::Alg(a) => assert_eq!(a.sign(), 0),
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let r2 = sqrt(2);
        let inv = match r2.inverse() {
            RootValue::Alg(a) => a,
            RootValue::Rat(r) => panic!("1/sqrt2 collapsed to {r}"),
        };
        match r2.mul(&inv) {
            RootValue::Rat(r) => assert_eq!(r, rat(1, 1)),
            RootValue::Alg(a) => assert_eq!(a.cmp_rational(&rat(1, 1)), Ordering::Equal),
        }
    }

    #[test]
    fn equality_through_distinct_representations() {
        // sqrt(2) vs root of (x^2-2)(x^2-5) isolated near 1.41
        let r2 = sqrt(2);
        let p = IPoly::from_i64(&[-2, 0, 1]).mul(&IPoly::from_i64(&[-5, 0, 1]));
        let other = match AlgebraicReal::isolate(&p, rat(1, 1), rat(2, 1)).unwrap() {
            RootValue::Alg(a) => a,
            RootValue::Rat(r) => panic!("collapsed to {r}"),
        };
        assert_eq!(r2.cmp_algebraic(&other), Ordering::Equal);
    }

    #[test]
    fn isolate_errors() {
        let p = IPoly::from_i64(&[1, 0, 1]); // x^2 + 1
        assert_eq!(
            AlgebraicReal::isolate(&p, rat(-10, 1), rat(10, 1)).unwrap_err(),
            IsolateError::NoRootInInterval
        );
        let q = IPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(
            AlgebraicReal::isolate(&q, rat(-2, 1), rat(2, 1)).unwrap_err(),
            IsolateError::MultipleRootsInInterval
        );
    }

    #[test]
    fn rational_demotion() {
        // x^2 - 4 in [1, 3] isolates the rational root 2 only when bisection
        // lands on it; the linear case demotes immediately
        let lin = IPoly::from_i64(&[-6, 2]); // 2x - 6
        match AlgebraicReal::isolate(&lin, rat(0, 1), rat(5, 1)).unwrap() {
            RootValue::Rat(r) => assert_eq!(r, rat(3, 1)),
            RootValue::Alg(_) => panic!("linear root should demote"),
        }
        // endpoint root demotes
        let p = IPoly::from_i64(&[-4, 0, 1]);
        match AlgebraicReal::isolate(&p, rat(2, 1), rat(3, 1)).unwrap() {
            RootValue::Rat(r) => assert_eq!(r, rat(2, 1)),
            RootValue::Alg(_) => panic!("endpoint root should demote"),
        }
    }

    #[test]
    fn poly_rendering() {
        let p = IPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(poly_to_string(&p), "x^2-2");
        let q = IPoly::from_i64(&[1, -4, 0, 3]);
        assert_eq!(poly_to_string(&q), "3*x^3-4*x+1");
    }
}

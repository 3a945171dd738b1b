//! Univariate polynomials over Z and Q: gcd, Sturm sequences, resultants,
//! and real root isolation. This is the substrate for exact algebraic scalars.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with integer coefficients, ascending degree order.
/// Invariant: the last coefficient is nonzero; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IPoly(Vec<BigInt>);

/// Polynomial with rational coefficients, ascending degree order.
/// Same trailing-coefficient invariant as [`IPoly`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPoly(Vec<BigRational>);

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl IPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IPoly(coeffs)
    }

    pub fn zero() -> Self {
        IPoly(Vec::new())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| big(c)).collect())
    }

    /// x - r for rational r, with denominators cleared: v*x - u.
    pub fn linear_from_root(r: &BigRational) -> Self {
        Self::new(vec![-r.numer().clone(), r.denom().clone()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> &BigInt {
        self.0.last().expect("lead of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        IPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        IPoly(self.0.iter().map(|a| a * c).collect())
    }

    /// Multiply by c * x^k.
    fn shift_scale(&self, c: &BigInt, k: usize) -> Self {
        if self.is_zero() || c.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.0.iter().map(|a| a * c));
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * big(i as i64))
                .collect(),
        )
    }

    /// Positive gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the content; the sign of the leading coefficient is kept.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let g = self.content();
        IPoly(self.0.iter().map(|c| c / &g).collect())
    }

    /// Primitive part with a positive leading coefficient.
    pub fn primitive_positive(&self) -> Self {
        let p = self.primitive();
        if p.is_zero() || p.lead().is_positive() {
            p
        } else {
            p.neg()
        }
    }

    /// Sign of p(x) at a rational point, computed with integer arithmetic only.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let u = x.numer();
        let v = x.denom(); // > 0 by num-rational's invariant
        let d = self.0.len() - 1;
        let mut acc = self.0[d].clone();
        let mut vpow = BigInt::one();
        for i in (0..d).rev() {
            vpow *= v;
            acc = acc * u + &self.0[i] * &vpow;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn to_rpoly(&self) -> RPoly {
        RPoly(
            self.0
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// p(c + d*y) with integer c, d.
    pub fn compose_linear_int(&self, c: &BigInt, d: &BigInt) -> IPoly {
        if self.is_zero() {
            return IPoly::zero();
        }
        // Horner: acc = acc*(c + d*y) + a_i
        let lin = IPoly::new(vec![c.clone(), d.clone()]);
        let mut acc = IPoly::constant(self.0.last().unwrap().clone());
        for i in (0..self.0.len() - 1).rev() {
            acc = acc.mul(&lin).add(&IPoly::constant(self.0[i].clone()));
        }
        acc
    }

    /// p(c + d*y) with rational c, d.
    pub fn compose_linear_rat(&self, c: &BigRational, d: &BigRational) -> RPoly {
        if self.is_zero() {
            return RPoly::zero();
        }
        let lin = RPoly(vec![c.clone(), d.clone()]);
        let mut acc = RPoly::constant(BigRational::from_integer(self.0.last().unwrap().clone()));
        for i in (0..self.0.len() - 1).rev() {
            acc = acc
                .mul(&lin)
                .add(&RPoly::constant(BigRational::from_integer(self.0[i].clone())));
        }
        acc
    }

    /// Defining polynomial for alpha + r given one for alpha.
    pub fn shift_root(&self, r: &BigRational) -> IPoly {
        // root of q(x) = p(x - r)
        self.compose_linear_rat(&-r.clone(), &BigRational::one())
            .clear_denoms()
            .primitive_positive()
    }

    /// Defining polynomial for s * alpha (s nonzero) given one for alpha.
    pub fn scale_root(&self, s: &BigRational) -> IPoly {
        // q(x) = s^m * p(x/s): coefficients p_i * s^(m-i)
        let m = self.degree().expect("scale_root of zero polynomial");
        let mut coeffs = Vec::with_capacity(m + 1);
        let mut pow = BigRational::one();
        // compute s^(m-i) going downward: start from i = m
        let mut rev = Vec::with_capacity(m + 1);
        for i in (0..=m).rev() {
            rev.push(BigRational::from_integer(self.0[i].clone()) * &pow);
            pow *= s;
        }
        rev.reverse();
        coeffs.extend(rev);
        RPoly(coeffs).clear_denoms().primitive_positive()
    }

    /// Defining polynomial for -alpha.
    pub fn negate_root(&self) -> IPoly {
        IPoly(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
        .primitive_positive()
    }

    /// Defining polynomial for 1/alpha; requires a nonzero constant term.
    pub fn invert_root(&self) -> IPoly {
        debug_assert!(!self.0.is_empty() && !self.0[0].is_zero());
        let mut c = self.0.clone();
        c.reverse();
        IPoly::new(c).primitive_positive()
    }

    /// Remove all factors of x (used before multiplicative resultants).
    pub fn deflate_zero_root(&self) -> IPoly {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        IPoly::new(self.0[k..].to_vec())
    }

    /// Exact division by (x - r) over Q; caller guarantees p(r) = 0.
    pub fn deflate_rational_root(&self, r: &BigRational) -> RPoly {
        self.to_rpoly().deflate_root(r)
    }

    /// Square-free part: p / gcd(p, p'), primitive with positive lead.
    pub fn squarefree_part(&self) -> IPoly {
        let d = match self.degree() {
            None | Some(0) => return self.primitive_positive(),
            Some(d) => d,
        };
        let _ = d;
        let g = ipoly_gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            return self.primitive_positive();
        }
        let q = self
            .to_rpoly()
            .div_exact(&g.to_rpoly())
            .expect("gcd divides p");
        q.clear_denoms().primitive_positive()
    }

    /// Cauchy root bound: every real root lies strictly inside (-B, B).
    pub fn root_bound(&self) -> BigRational {
        let d = self.degree().expect("root bound of zero polynomial");
        let lead = BigRational::from_integer(self.0[d].clone().abs());
        let mut m = BigRational::zero();
        for c in &self.0[..d] {
            let q = BigRational::from_integer(c.clone().abs()) / &lead;
            if q > m {
                m = q;
            }
        }
        m + BigRational::one()
    }
}

impl RPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RPoly(coeffs)
    }

    pub fn zero() -> Self {
        RPoly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> &BigRational {
        self.0.last().expect("lead of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RPoly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Remainder of self divided by other (other nonzero).
    pub fn rem(&self, other: &Self) -> Self {
        let db = other.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let f = r.lead() / other.lead();
            let mut coeffs = r.0.clone();
            for i in 0..=db {
                let t = &other.0[i] * &f;
                coeffs[dr - db + i] -= t;
            }
            // force degree drop even with rounding-free arithmetic
            coeffs.truncate(dr);
            r = Self::new(coeffs);
        }
        r
    }

    /// Exact quotient; returns None if the division leaves a remainder.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let db = other.degree()?;
        let mut r = self.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(db)];
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let f = r.lead() / other.lead();
            q[dr - db] = f.clone();
            let mut coeffs = r.0.clone();
            for i in 0..=db {
                let t = &other.0[i] * &f;
                coeffs[dr - db + i] -= t;
            }
            coeffs.truncate(dr);
            r = Self::new(coeffs);
            if r.is_zero() {
                return Some(Self::new(q));
            }
        }
        // self was zero
        if self.is_zero() {
            Some(Self::zero())
        } else {
            None
        }
    }

    /// Exact division by (x - r); caller guarantees p(r) = 0.
    pub fn deflate_root(&self, r: &BigRational) -> RPoly {
        debug_assert!(self.eval(r).is_zero());
        let d = self.degree().expect("deflating zero polynomial");
        let mut out = vec![BigRational::zero(); d];
        let mut carry = BigRational::zero();
        for i in (1..=d).rev() {
            carry = self.0[i].clone() + carry * r;
            out[i - 1] = carry.clone();
        }
        RPoly::new(out)
    }

    /// Multiply by the positive lcm of denominators, yielding an integer polynomial.
    pub fn clear_denoms(&self) -> IPoly {
        if self.is_zero() {
            return IPoly::zero();
        }
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(c.denom());
        }
        IPoly::new(
            self.0
                .iter()
                .map(|c| c.numer() * (&l / c.denom()))
                .collect(),
        )
    }
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, all over Z.
/// Returns the remainder together with the exponent actually applied.
fn pseudo_rem(a: &IPoly, b: &IPoly) -> (IPoly, u32) {
    let da = a.degree().expect("pseudo_rem: zero dividend");
    let db = b.degree().expect("pseudo_rem: zero divisor");
    debug_assert!(da >= db);
    let d = b.lead().clone();
    let delta = (da - db + 1) as u32;
    let mut r = a.clone();
    let mut steps = 0u32;
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lr = r.lead().clone();
        r = r.scale(&d).sub(&b.shift_scale(&lr, dr - db));
        steps += 1;
    }
    if steps < delta {
        let mut extra = BigInt::one();
        for _ in steps..delta {
            extra *= &d;
        }
        r = r.scale(&extra);
    }
    (r, delta)
}

/// Primitive-PRS gcd over Z[x], primitive with positive leading coefficient.
pub fn ipoly_gcd(a: &IPoly, b: &IPoly) -> IPoly {
    let mut p = a.primitive_positive();
    let mut q = b.primitive_positive();
    if p.is_zero() {
        return q;
    }
    if q.is_zero() {
        return p;
    }
    if p.degree() < q.degree() {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let (r, _) = pseudo_rem(&p, &q);
        if r.is_zero() {
            return q.primitive_positive();
        }
        if r.degree() == Some(0) {
            return IPoly::constant(BigInt::one());
        }
        p = q;
        q = r.primitive_positive();
    }
}

/// Sturm chain of p over Z with sign-correct primitive reduction.
fn sturm_chain(p: &IPoly) -> Vec<IPoly> {
    let mut chain = Vec::new();
    let p0 = p.primitive();
    if p0.is_zero() {
        return chain;
    }
    chain.push(p0.clone());
    let p1 = p0.derivative();
    if p1.is_zero() {
        return chain;
    }
    chain.push(p1);
    loop {
        let a = &chain[chain.len() - 2];
        let b = &chain[chain.len() - 1];
        if b.degree().is_none() {
            break;
        }
        if a.degree() < b.degree() {
            break;
        }
        let (mut r, delta) = pseudo_rem(a, b);
        if r.is_zero() {
            break;
        }
        // pseudo_rem scaled by lc(b)^delta; restore the true remainder's sign
        if b.lead().is_negative() && delta % 2 == 1 {
            r = r.neg();
        }
        let next = r.neg().primitive();
        let stop = next.degree() == Some(0) || next.degree().is_none();
        chain.push(next);
        if stop {
            break;
        }
    }
    chain
}

fn sign_variations(chain: &[IPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots of p in the open interval (lo, hi),
/// assuming p(lo) != 0 and p(hi) != 0.
pub fn count_roots_open(p: &IPoly, lo: &BigRational, hi: &BigRational) -> usize {
    debug_assert!(p.sign_at(lo) != 0 && p.sign_at(hi) != 0);
    if lo >= hi {
        return 0;
    }
    let chain = sturm_chain(p);
    sign_variations(&chain, lo) - sign_variations(&chain, hi)
}

/// Number of distinct real roots of p in the closed interval [lo, hi].
pub fn count_roots_closed(p: &IPoly, lo: &BigRational, hi: &BigRational) -> usize {
    if p.is_zero() || lo > hi {
        return 0;
    }
    if lo == hi {
        return usize::from(p.sign_at(lo) == 0);
    }
    let mut count = 0;
    let mut q = p.to_rpoly();
    while q.eval(lo).is_zero() {
        count += 1;
        q = q.deflate_root(lo);
        if q.is_zero() {
            return count; // p was a power of (x - lo) times a constant
        }
    }
    // only distinct roots matter, so collapse repeated deflation counts
    count = count.min(1);
    let mut hit_hi = 0;
    while q.eval(hi).is_zero() {
        hit_hi = 1;
        q = q.deflate_root(hi);
        if q.is_zero() {
            return count + hit_hi;
        }
    }
    count += hit_hi;
    let qi = q.clear_denoms();
    if qi.degree().map_or(true, |d| d == 0) {
        return count;
    }
    count + count_roots_open(&qi, lo, hi)
}

/// Location of one real root produced by [`isolate_real_roots`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLoc {
    Exact(BigRational),
    /// Open-ended bracket: sign change between the endpoints, exactly one root.
    Interval(BigRational, BigRational),
}

impl RootLoc {
    fn key(&self) -> BigRational {
        match self {
            RootLoc::Exact(r) => r.clone(),
            RootLoc::Interval(lo, hi) => (lo + hi) / BigRational::from_integer(big(2)),
        }
    }
}

/// Isolate all distinct real roots of p (p nonzero). Intervals carry
/// endpoints that are not roots and bracket exactly one root each.
pub fn isolate_real_roots(p: &IPoly) -> Vec<RootLoc> {
    let mut out = Vec::new();
    let mut sf = p.squarefree_part();
    // peel off exact rational roots discovered during subdivision by restarting
    loop {
        if sf.degree().map_or(true, |d| d == 0) {
            break;
        }
        let bound = sf.root_bound();
        let lo = -bound.clone();
        let hi = bound;
        match isolate_in(&sf, &lo, &hi, &mut out) {
            Some(root) => {
                out.push(RootLoc::Exact(root.clone()));
                let q = sf.deflate_rational_root(&root);
                sf = q.clear_denoms().primitive_positive();
            }
            None => break,
        }
    }
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out
}

/// Subdivide [lo, hi]; push isolated intervals, or return a rational root hit
/// by a midpoint (the caller deflates and restarts).
fn isolate_in(
    sf: &IPoly,
    lo: &BigRational,
    hi: &BigRational,
    out: &mut Vec<RootLoc>,
) -> Option<BigRational> {
    let n = count_roots_open(sf, lo, hi);
    if n == 0 {
        return None;
    }
    if n == 1 {
        out.push(RootLoc::Interval(lo.clone(), hi.clone()));
        return None;
    }
    let mid = (lo + hi) / BigRational::from_integer(big(2));
    if sf.sign_at(&mid) == 0 {
        return Some(mid);
    }
    if let Some(r) = isolate_in(sf, lo, &mid, out) {
        return Some(r);
    }
    isolate_in(sf, &mid, hi, out)
}

/// Resultant of two rational polynomials (both nonzero unless noted).
pub fn resultant_rat(a: &RPoly, b: &RPoly) -> BigRational {
    let (m, n) = match (a.degree(), b.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return BigRational::zero(),
    };
    if n == 0 {
        return pow_rat(b.lead(), m as u32);
    }
    if m == 0 {
        return pow_rat(a.lead(), n as u32);
    }
    if m < n {
        let s = if (m * n) % 2 == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        return s * resultant_rat(b, a);
    }
    let r = a.rem(b);
    match r.degree() {
        None => BigRational::zero(),
        Some(dr) => {
            let sign = if (m * n) % 2 == 1 {
                -BigRational::one()
            } else {
                BigRational::one()
            };
            sign * pow_rat(b.lead(), (m - dr) as u32) * resultant_rat(b, &r)
        }
    }
}

fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Lagrange interpolation through the given points (distinct abscissae).
pub fn interpolate(points: &[(BigRational, BigRational)]) -> RPoly {
    // Newton form with divided differences
    let n = points.len();
    let mut coef: Vec<BigRational> = points.iter().map(|(_, y)| y.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = &points[i].0 - &points[i - j].0;
            coef[i] = num / den;
        }
    }
    let mut poly = RPoly::zero();
    for i in (0..n).rev() {
        let lin = RPoly::new(vec![-points[i].0.clone(), BigRational::one()]);
        poly = if i == n - 1 {
            RPoly::constant(coef[i].clone())
        } else {
            poly.mul(&lin).add(&RPoly::constant(coef[i].clone()))
        };
    }
    poly
}

fn eval_points(count: usize) -> Vec<BigInt> {
    // 0, 1, -1, 2, -2, ...
    let mut pts = Vec::with_capacity(count);
    let mut k = 0i64;
    while pts.len() < count {
        if k == 0 {
            pts.push(big(0));
        } else {
            pts.push(big(k));
            if pts.len() < count {
                pts.push(big(-k));
            }
        }
        k += 1;
    }
    pts
}

/// Integer polynomial with alpha + beta among its roots, where alpha runs over
/// the roots of p and beta over the roots of q: Res_y(p(x - y), q(y)).
pub fn resultant_root_sum(p: &IPoly, q: &IPoly) -> IPoly {
    let m = p.degree().expect("root_sum: zero p");
    let n = q.degree().expect("root_sum: zero q");
    let d = m * n;
    let qr = q.to_rpoly();
    let pts = eval_points(d + 1);
    let mut samples = Vec::with_capacity(d + 1);
    for t in pts {
        let a_t = p.compose_linear_int(&t, &big(-1)); // p(t - y)
        let v = resultant_rat(&a_t.to_rpoly(), &qr);
        samples.push((BigRational::from_integer(t), v));
    }
    interpolate(&samples).clear_denoms().primitive_positive()
}

/// Integer polynomial with alpha * beta among its roots; requires
/// p(0) != 0 and q(0) != 0 (deflate zero roots first).
pub fn resultant_root_prod(p: &IPoly, q: &IPoly) -> IPoly {
    debug_assert!(!p.coeff(0).is_zero() && !q.coeff(0).is_zero());
    let m = p.degree().expect("root_prod: zero p");
    let n = q.degree().expect("root_prod: zero q");
    let d = m * n;
    let qr = q.to_rpoly();
    let pts = eval_points(d + 1);
    let mut samples = Vec::with_capacity(d + 1);
    for t in pts {
        // A_t(y) = sum_i p_i t^i y^(m-i)
        let mut coeffs = vec![BigInt::zero(); m + 1];
        let mut tpow = BigInt::one();
        for i in 0..=m {
            coeffs[m - i] = p.coeff(i) * &tpow;
            tpow *= &t;
        }
        let a_t = IPoly::new(coeffs);
        let v = if a_t.is_zero() {
            BigRational::zero()
        } else {
            resultant_rat(&a_t.to_rpoly(), &qr)
        };
        samples.push((BigRational::from_integer(t), v));
    }
    interpolate(&samples).clear_denoms().primitive_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(big(n), big(d))
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x+2) and (x-1)(x-3) share x-1
        let a = IPoly::from_i64(&[-2, 1]).mul(&IPoly::from_i64(&[1, 1])).mul(&IPoly::from_i64(&[-1, 1]));
        let b = IPoly::from_i64(&[-3, 1]).mul(&IPoly::from_i64(&[-1, 1]));
        let g = ipoly_gcd(&a, &b);
        assert_eq!(g, IPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        // (x-1)^2 (x+1) -> (x-1)(x+1) = x^2 - 1
        let p = IPoly::from_i64(&[-1, 1])
            .mul(&IPoly::from_i64(&[-1, 1]))
            .mul(&IPoly::from_i64(&[1, 1]));
        assert_eq!(p.squarefree_part(), IPoly::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn sturm_counts_roots() {
        // (x-1)(x+1)(x-2) = x^3 - 2x^2 - x + 2
        let p = IPoly::from_i64(&[2, -1, -2, 1]);
        assert_eq!(count_roots_closed(&p, &rat(0, 1), &rat(3, 1)), 2);
        assert_eq!(count_roots_closed(&p, &rat(-1, 1), &rat(1, 1)), 2);
        assert_eq!(count_roots_open(&p, &rat(-1, 2), &rat(1, 2)), 0);
        assert_eq!(count_roots_closed(&p, &rat(-5, 1), &rat(5, 1)), 3);
        assert_eq!(count_roots_closed(&p, &rat(1, 1), &rat(1, 1)), 1);
        assert_eq!(count_roots_closed(&p, &rat(1, 2), &rat(1, 2)), 0);
    }

    #[test]
    fn sturm_no_real_roots() {
        let p = IPoly::from_i64(&[1, 0, 1]); // x^2 + 1
        assert_eq!(count_roots_closed(&p, &rat(-10, 1), &rat(10, 1)), 0);
    }

    #[test]
    fn root_sum_sqrt2_sqrt3() {
        // sqrt(2) + sqrt(3) is a root of x^4 - 10x^2 + 1
        let p = IPoly::from_i64(&[-2, 0, 1]);
        let q = IPoly::from_i64(&[-3, 0, 1]);
        let r = resultant_root_sum(&p, &q).squarefree_part();
        assert_eq!(r, IPoly::from_i64(&[1, 0, -10, 0, 1]));
    }

    #[test]
    fn root_prod_sqrt2_sqrt3() {
        // sqrt(2)*sqrt(3) = sqrt(6): squarefree part of the resultant is x^2 - 6
        let p = IPoly::from_i64(&[-2, 0, 1]);
        let q = IPoly::from_i64(&[-3, 0, 1]);
        let r = resultant_root_prod(&p, &q).squarefree_part();
        assert_eq!(r, IPoly::from_i64(&[-6, 0, 1]));
    }

    #[test]
    fn shift_and_scale_roots() {
        // sqrt(2) + 1/2 is a root of 4x^2 - 4x - 7
        let p = IPoly::from_i64(&[-2, 0, 1]);
        let s = p.shift_root(&rat(1, 2));
        assert_eq!(s.sign_at(&rat(0, 1)), -1);
        assert_eq!(s, IPoly::from_i64(&[-7, -4, 4]));
        // 3 * sqrt(2) is a root of x^2 - 18
        let sc = p.scale_root(&rat(3, 1));
        assert_eq!(sc, IPoly::from_i64(&[-18, 0, 1]));
    }

    #[test]
    fn isolation_finds_all_roots() {
        // (x-1)(x+1)(x-2), roots -1, 1, 2
        let p = IPoly::from_i64(&[2, -1, -2, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        for (loc, expect) in roots.iter().zip([rat(-1, 1), rat(1, 1), rat(2, 1)]) {
            match loc {
                RootLoc::Exact(r) => assert_eq!(*r, expect),
                RootLoc::Interval(lo, hi) => {
                    assert!(*lo < expect && expect < *hi);
                    assert_eq!(count_roots_open(&p, lo, hi), 1);
                }
            }
        }
    }

    #[test]
    fn resultant_of_coprime_is_nonzero() {
        let a = IPoly::from_i64(&[-2, 0, 1]).to_rpoly();
        let b = IPoly::from_i64(&[-3, 0, 1]).to_rpoly();
        assert!(!resultant_rat(&a, &b).is_zero());
        // shared root => zero resultant
        let c = IPoly::from_i64(&[-2, 0, 1]).to_rpoly();
        assert!(resultant_rat(&a, &c).is_zero());
    }

    #[test]
    fn deflation_is_exact() {
        // x^3 - 2x^2 - x + 2 has root 2
        let p = IPoly::from_i64(&[2, -1, -2, 1]);
        let q = p.deflate_rational_root(&rat(2, 1));
        assert_eq!(q.clear_denoms().primitive_positive(), IPoly::from_i64(&[-1, 0, 1]));
    }
}

//! Digit-stream reals: exact values given by an integer part and a
//! deterministic base-10 digit function. Sign queries refine a rational
//! enclosure from digit prefixes; equality is refutable but never certified.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A named digit stream: value = int_part + sum_{i>=0} digit(i) * 10^-i.
/// Digits are memoized, so a digit queried twice always agrees.
pub struct StreamSource {
    name: String,
    int_part: BigInt,
    digits: Box<dyn Fn(u64) -> u8 + Send + Sync>,
    budget: u64,
    state: Mutex<PrefixState>,
}

struct PrefixState {
    digits: Vec<u8>,
    /// prefix[k] = int_part + sum_{i<k} digit(i) * 10^-i
    prefix: Vec<BigRational>,
    /// 10^-(len-1), the weight of the next digit to be consumed
    next_weight: BigRational,
}

impl fmt::Debug for StreamSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamSource")
            .field("name", &self.name)
            .field("int_part", &self.int_part)
            .field("budget", &self.budget)
            .finish()
    }
}

impl StreamSource {
    pub fn new(
        name: impl Into<String>,
        int_part: BigInt,
        digits: impl Fn(u64) -> u8 + Send + Sync + 'static,
        budget: u64,
    ) -> Arc<Self> {
        Arc::new(StreamSource {
            name: name.into(),
            int_part: int_part.clone(),
            digits: Box::new(digits),
            budget,
            state: Mutex::new(PrefixState {
                digits: Vec::new(),
                prefix: vec![BigRational::from_integer(int_part)],
                next_weight: BigRational::one(),
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// The digit at index i, memoized and clamped to 0..=9.
    pub fn digit(&self, i: u64) -> u8 {
        let mut st = self.state.lock().unwrap();
        self.fill_to(&mut st, i + 1);
        st.digits[i as usize]
    }

    fn fill_to(&self, st: &mut PrefixState, k: u64) {
        while (st.digits.len() as u64) < k {
            let i = st.digits.len() as u64;
            let d = (self.digits)(i).min(9);
            st.digits.push(d);
            let w = st.next_weight.clone();
            let add = BigRational::from_integer(BigInt::from(d)) * &w;
            let last = st.prefix.last().unwrap().clone();
            st.prefix.push(last + add);
            st.next_weight = w / BigRational::from_integer(BigInt::from(10));
        }
    }

    /// Rational enclosure after consuming k digits:
    /// [prefix(k), prefix(k) + 10^(1-k)].
    pub fn interval(&self, k: u64) -> (BigRational, BigRational) {
        let k = k.min(self.budget);
        let mut st = self.state.lock().unwrap();
        self.fill_to(&mut st, k);
        let lo = st.prefix[k as usize].clone();
        let tail = if k == 0 {
            BigRational::from_integer(BigInt::from(10))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(10).pow((k - 1) as u32))
        };
        (lo.clone(), lo + tail)
    }
}

/// An exact value in the stream extension of the rationals.
#[derive(Clone, Debug)]
pub enum StreamVal {
    /// scale * source + shift with a nonzero scale.
    Affine {
        src: Arc<StreamSource>,
        scale: BigRational,
        shift: BigRational,
    },
    Add(Arc<StreamVal>, Arc<StreamVal>),
    Sub(Arc<StreamVal>, Arc<StreamVal>),
    Mul(Arc<StreamVal>, Arc<StreamVal>),
    Div(Arc<StreamVal>, Arc<StreamVal>),
    /// r + v, for non-affine v.
    Offset(BigRational, Arc<StreamVal>),
    /// r * v with nonzero r, for non-affine v.
    Scale(BigRational, Arc<StreamVal>),
    /// 1 / v, for v certified nonzero at construction.
    Recip(Arc<StreamVal>),
}

/// Result of stream arithmetic: the combination may collapse to a rational.
pub enum StreamOrRat {
    Stream(StreamVal),
    Rat(BigRational),
}

impl StreamVal {
    pub fn leaf(src: Arc<StreamSource>) -> StreamVal {
        StreamVal::Affine {
            src,
            scale: BigRational::one(),
            shift: BigRational::zero(),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> StreamVal {
        match self {
            StreamVal::Affine { src, scale, shift } => StreamVal::Affine {
                src: src.clone(),
                scale: scale.clone(),
                shift: shift + r,
            },
            StreamVal::Offset(r0, v) => StreamVal::Offset(r0 + r, v.clone()),
            other => StreamVal::Offset(r.clone(), Arc::new(other.clone())),
        }
    }

    /// Multiply by a nonzero rational.
    pub fn mul_rational(&self, r: &BigRational) -> StreamVal {
        debug_assert!(!r.is_zero());
        match self {
            StreamVal::Affine { src, scale, shift } => StreamVal::Affine {
                src: src.clone(),
                scale: scale * r,
                shift: shift * r,
            },
            StreamVal::Scale(r0, v) => StreamVal::Scale(r0 * r, v.clone()),
            other => StreamVal::Scale(r.clone(), Arc::new(other.clone())),
        }
    }

    pub fn neg(&self) -> StreamVal {
        self.mul_rational(&-BigRational::one())
    }

    pub fn add(&self, other: &StreamVal) -> StreamOrRat {
        if let (
            StreamVal::Affine { src: s1, scale: a1, shift: b1 },
            StreamVal::Affine { src: s2, scale: a2, shift: b2 },
        ) = (self, other)
        {
            if Arc::ptr_eq(s1, s2) {
                let scale = a1 + a2;
                let shift = b1 + b2;
                return if scale.is_zero() {
                    StreamOrRat::Rat(shift)
                } else {
                    StreamOrRat::Stream(StreamVal::Affine {
                        src: s1.clone(),
                        scale,
                        shift,
                    })
                };
            }
        }
        StreamOrRat::Stream(StreamVal::Add(
            Arc::new(self.clone()),
            Arc::new(other.clone()),
        ))
    }

    pub fn sub(&self, other: &StreamVal) -> StreamOrRat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &StreamVal) -> StreamVal {
        StreamVal::Mul(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    pub fn div(&self, other: &StreamVal) -> StreamVal {
        StreamVal::Div(Arc::new(self.clone()), Arc::new(other.clone()))
    }

    pub fn recip(&self) -> StreamVal {
        StreamVal::Recip(Arc::new(self.clone()))
    }

    /// Largest digit budget among the participating sources.
    pub fn max_budget(&self) -> u64 {
        match self {
            StreamVal::Affine { src, .. } => src.budget(),
            StreamVal::Add(a, b) | StreamVal::Sub(a, b) | StreamVal::Mul(a, b) | StreamVal::Div(a, b) => {
                a.max_budget().max(b.max_budget())
            }
            StreamVal::Offset(_, v) | StreamVal::Scale(_, v) | StreamVal::Recip(v) => {
                v.max_budget()
            }
        }
    }

    /// Rational enclosure at digit depth k; None while a division's
    /// denominator enclosure still straddles zero.
    pub fn interval(&self, k: u64) -> Option<(BigRational, BigRational)> {
        match self {
            StreamVal::Affine { src, scale, shift } => {
                let (lo, hi) = src.interval(k);
                let (mut l, mut h) = (&lo * scale + shift, &hi * scale + shift);
                if scale.is_negative() {
                    std::mem::swap(&mut l, &mut h);
                }
                Some((l, h))
            }
            StreamVal::Add(a, b) => {
                let (al, ah) = a.interval(k)?;
                let (bl, bh) = b.interval(k)?;
                Some((al + bl, ah + bh))
            }
            StreamVal::Sub(a, b) => {
                let (al, ah) = a.interval(k)?;
                let (bl, bh) = b.interval(k)?;
                Some((al - bh, ah - bl))
            }
            StreamVal::Mul(a, b) => {
                let (al, ah) = a.interval(k)?;
                let (bl, bh) = b.interval(k)?;
                let corners = [&al * &bl, &al * &bh, &ah * &bl, &ah * &bh];
                Some((
                    corners.iter().min().unwrap().clone(),
                    corners.iter().max().unwrap().clone(),
                ))
            }
            StreamVal::Div(a, b) => {
                let (bl, bh) = b.interval(k)?;
                if !bl.is_positive() && !bh.is_negative() {
                    return None; // denominator enclosure still contains zero
                }
                let (al, ah) = a.interval(k)?;
                let (rl, rh) = (bh.recip(), bl.recip());
                let corners = [&al * &rl, &al * &rh, &ah * &rl, &ah * &rh];
                Some((
                    corners.iter().min().unwrap().clone(),
                    corners.iter().max().unwrap().clone(),
                ))
            }
            StreamVal::Offset(r, v) => {
                let (l, h) = v.interval(k)?;
                Some((r + l, r + h))
            }
            StreamVal::Scale(r, v) => {
                let (l, h) = v.interval(k)?;
                let (mut l, mut h) = (r * l, r * h);
                if r.is_negative() {
                    std::mem::swap(&mut l, &mut h);
                }
                Some((l, h))
            }
            StreamVal::Recip(v) => {
                let (l, h) = v.interval(k)?;
                if !l.is_positive() && !h.is_negative() {
                    return None;
                }
                Some((h.recip(), l.recip()))
            }
        }
    }

    /// Certified "value >= 0" / "value < 0", or None once every source's
    /// digit budget is exhausted without a certificate.
    pub fn ge_zero(&self) -> Option<bool> {
        let max = self.max_budget();
        let mut k = 4u64;
        loop {
            if let Some((lo, hi)) = self.interval(k) {
                if !lo.is_negative() {
                    return Some(true);
                }
                if hi.is_negative() {
                    return Some(false);
                }
            }
            if k >= max {
                return None;
            }
            k = (k * 2).min(max);
        }
    }

    /// Certified strict sign: Some(1) or Some(-1), or None (zero can never be
    /// certified from finitely many digits).
    pub fn strict_sign(&self) -> Option<i8> {
        let max = self.max_budget();
        let mut k = 4u64;
        loop {
            if let Some((lo, hi)) = self.interval(k) {
                if lo.is_positive() {
                    return Some(1);
                }
                if hi.is_negative() {
                    return Some(-1);
                }
            }
            if k >= max {
                return None;
            }
            k = (k * 2).min(max);
        }
    }

    /// Certified "value != 0"; never certifies equality.
    pub fn nonzero(&self) -> bool {
        self.strict_sign().is_some()
    }

    pub fn render(&self) -> String {
        match self {
            StreamVal::Affine { src, scale, shift } => {
                let mut s = String::new();
                if !scale.is_one() {
                    s.push_str(&scale.to_string());
                    s.push('*');
                }
                s.push_str(&format!("stream({})", src.name()));
                if !shift.is_zero() {
                    if shift.is_negative() {
                        s.push_str(&format!("-{}", -shift.clone()));
                    } else {
                        s.push_str(&format!("+{shift}"));
                    }
                }
                s
            }
            StreamVal::Add(a, b) => format!("({}+{})", a.render(), b.render()),
            StreamVal::Sub(a, b) => format!("({}-{})", a.render(), b.render()),
            StreamVal::Mul(a, b) => format!("({}*{})", a.render(), b.render()),
            StreamVal::Div(a, b) => format!("({}/{})", a.render(), b.render()),
            StreamVal::Offset(r, v) => format!("({}+{})", r, v.render()),
            StreamVal::Scale(r, v) => format!("({}*{})", r, v.render()),
            StreamVal::Recip(v) => format!("(1/{})", v.render()),
        }
    }

    /// Representational equality (same sources, same coefficients); used for
    /// structural machine comparison, not value equality.
    pub fn repr_eq(&self, other: &StreamVal) -> bool {
        match (self, other) {
            (
                StreamVal::Affine { src: s1, scale: a1, shift: b1 },
                StreamVal::Affine { src: s2, scale: a2, shift: b2 },
            ) => Arc::ptr_eq(s1, s2) && a1 == a2 && b1 == b2,
            (StreamVal::Add(a1, b1), StreamVal::Add(a2, b2))
            | (StreamVal::Sub(a1, b1), StreamVal::Sub(a2, b2))
            | (StreamVal::Mul(a1, b1), StreamVal::Mul(a2, b2))
            | (StreamVal::Div(a1, b1), StreamVal::Div(a2, b2)) => {
                a1.repr_eq(a2) && b1.repr_eq(b2)
            }
            (StreamVal::Offset(r1, v1), StreamVal::Offset(r2, v2))
            | (StreamVal::Scale(r1, v1), StreamVal::Scale(r2, v2)) => r1 == r2 && v1.repr_eq(v2),
            (StreamVal::Recip(v1), StreamVal::Recip(v2)) => v1.repr_eq(v2),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn finite_stream(digits: Vec<u8>, budget: u64) -> Arc<StreamSource> {
        StreamSource::new("s", BigInt::zero(), move |i| {
            digits.get(i as usize).copied().unwrap_or(0)
        }, budget)
    }

    #[test]
    fn one_point_oh_one() {
        // digits 1,0,1,0,... at weights 1, 1/10, 1/100: value 1.01
        let src = finite_stream(vec![1, 0, 1], 100);
        let v = StreamVal::leaf(src);
        // against 1: positive at small depth
        let d = v.add_rational(&rat(-1, 1));
        assert_eq!(d.strict_sign(), Some(1));
        // against 101/100: equality is never certified
        let e = v.add_rational(&rat(-101, 100));
        assert_eq!(e.strict_sign(), None);
        assert_eq!(e.ge_zero(), Some(true)); // enclosure lower bound reaches 0
    }

    #[test]
    fn all_zero_stream_is_indeterminate() {
        let src = finite_stream(vec![], 50);
        let v = StreamVal::leaf(src);
        assert_eq!(v.strict_sign(), None);
        assert!(!v.nonzero());
    }

    #[test]
    fn digits_are_memoized() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let calls = Arc::new(AtomicU64::new(0));
        let c = calls.clone();
        let src = StreamSource::new("t", BigInt::zero(), move |i| {
            c.fetch_add(1, Ordering::SeqCst);
            (i % 10) as u8
        }, 100);
        assert_eq!(src.digit(5), 5);
        assert_eq!(src.digit(5), 5);
        assert_eq!(calls.load(Ordering::SeqCst), 6); // digits 0..=5 computed once
    }

    #[test]
    fn certificate_is_stable_under_budget_increase() {
        let mk = |budget| {
            let src = finite_stream(vec![3, 1, 4, 1, 5], budget);
            StreamVal::leaf(src).add_rational(&rat(-3, 1))
        };
        assert_eq!(mk(10).strict_sign(), Some(1));
        assert_eq!(mk(1000).strict_sign(), Some(1));
    }

    #[test]
    fn affine_cancellation_collapses_to_rational() {
        let src = finite_stream(vec![7, 7, 7], 50);
        let v = StreamVal::leaf(src);
        let w = v.mul_rational(&rat(2, 1));
        match w.sub(&v.mul_rational(&rat(2, 1))) {
            StreamOrRat::Rat(r) => assert!(r.is_zero()),
            StreamOrRat::Stream(_) => panic!("same affine form should cancel"),
        }
    }

    #[test]
    fn division_certifies_through_nonzero_denominator() {
        let src = finite_stream(vec![2], 50);
        let v = StreamVal::leaf(src); // ~2
        let q = StreamVal::Div(
            Arc::new(StreamVal::leaf(finite_stream(vec![8], 50))),
            Arc::new(v),
        );
        assert_eq!(q.strict_sign(), Some(1));
    }
}

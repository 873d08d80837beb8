//! Exact elements `(p + q√D)/r` of a real quadratic field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::QuadError;

/// An element `(p + q√D)/r` of ℚ(√D).
///
/// The representation is canonical: `r > 0`, `gcd(p, q, r) = 1` and `D` is
/// squarefree (square factors are moved into `q`). Two surds over the same
/// `D` are equal exactly when their fields are equal, so `Eq` and `Hash` are
/// derived.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: u64,
}

/// Squarefree decomposition `n = f² · k` with `k` squarefree.
pub(crate) fn squarefree_split(n: u64) -> (u64, u64) {
    let mut rest = n;
    let mut factor = 1u64;
    let mut kernel_part = 1u64;
    let mut p = 2u64;
    // Strip primes up to the cube root; what remains is 1, a prime, a prime
    // square, or a product of two distinct primes.
    while (p as u128) * (p as u128) * (p as u128) <= rest as u128 {
        let mut odd = false;
        while rest.is_multiple_of(p) {
            rest /= p;
            if odd {
                factor *= p;
            }
            odd = !odd;
        }
        if odd {
            kernel_part *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let s = rest.sqrt();
    if s > 1 && s * s == rest {
        factor *= s;
        rest = 1;
    }
    (factor, rest * kernel_part)
}

fn is_square(n: u64) -> bool {
    let s = n.sqrt();
    s * s == n
}

impl QuadSurd {
    /// Builds and normalizes `(p + q√D)/r`.
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        d: u64,
    ) -> Result<Self, QuadError> {
        let (p, q, r) = (p.into(), q.into(), r.into());
        if r.is_zero() {
            return Err(QuadError::ZeroDenominator);
        }
        if d == 0 || is_square(d) {
            return Err(QuadError::SquareRadicand(d));
        }
        let (f, kernel) = squarefree_split(d);
        Ok(Self::from_parts(p, q * BigInt::from(f), r, kernel))
    }

    /// Normalizes parts whose radicand is already squarefree.
    fn from_parts(mut p: BigInt, mut q: BigInt, mut r: BigInt, d: u64) -> Self {
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        QuadSurd { p, q, r, d }
    }

    pub fn from_integer(n: impl Into<BigInt>, d: u64) -> Result<Self, QuadError> {
        Self::new(n, 0, 1, d)
    }

    pub fn from_ratio(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        d: u64,
    ) -> Result<Self, QuadError> {
        Self::new(num, 0, den, d)
    }

    /// `√D` itself.
    pub fn sqrt_d(d: u64) -> Result<Self, QuadError> {
        Self::new(0, 1, 1, d)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// Squarefree radicand.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_zero() && self.r.is_one()
    }

    fn same(&self, p: BigInt, q: BigInt, r: BigInt, d: u64) -> Self {
        Self::from_parts(p, q, r, d)
    }

    /// The radicand shared by two operands; a rational operand adapts to the
    /// other one.
    fn common_d(&self, other: &Self) -> Result<u64, QuadError> {
        if self.d == other.d || other.q.is_zero() {
            Ok(self.d)
        } else if self.q.is_zero() {
            Ok(other.d)
        } else {
            Err(QuadError::MixedRadicand(self.d, other.d))
        }
    }

    /// Sign of `p + q√D` decided with integer comparisons only.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.sign();
        let sq = self.q.sign();
        use num_bigint::Sign::*;
        match (sp, sq) {
            (NoSign, NoSign) => Ordering::Equal,
            (_, NoSign) => sign_to_ord(sp),
            (NoSign, _) => sign_to_ord(sq),
            _ if sp == sq => sign_to_ord(sp),
            _ => {
                let p2 = &self.p * &self.p;
                let q2d = &self.q * &self.q * BigInt::from(self.d);
                // p² = q²D is impossible for non-square D and q ≠ 0
                if p2 > q2d {
                    sign_to_ord(sp)
                } else {
                    sign_to_ord(sq)
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Algebraic conjugate `(p − q√D)/r`.
    pub fn conj(&self) -> Self {
        self.same(self.p.clone(), -self.q.clone(), self.r.clone(), self.d)
    }

    /// Field norm `(p² − q²D)/r²` as a reduced fraction `(num, den)`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let num = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        let den = &self.r * &self.r;
        let g = num.gcd(&den);
        (num / &g, den / g)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QuadError> {
        let d = self.common_d(other)?;
        Ok(self.same(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            &self.r * &other.r,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QuadError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, QuadError> {
        let d = self.common_d(other)?;
        let bd = BigInt::from(d);
        Ok(self.same(
            &self.p * &other.p + &self.q * &other.q * bd,
            &self.p * &other.q + &other.p * &self.q,
            &self.r * &other.r,
            d,
        ))
    }

    pub fn checked_recip(&self) -> Result<Self, QuadError> {
        if self.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        let den = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        Ok(self.same(&self.p * &self.r, -(&self.q * &self.r), den, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, QuadError> {
        self.common_d(other)?;
        self.checked_mul(&other.checked_recip()?)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, n: &BigInt) -> Self {
        self.same(&self.p * n, &self.q * n, self.r.clone(), self.d)
    }

    /// Exact comparison; fails for irrational operands over different `D`.
    pub fn compare(&self, other: &Self) -> Result<Ordering, QuadError> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// `⌊x⌋`, decided exactly.
    pub fn floor(&self) -> BigInt {
        if self.q.is_zero() {
            return self.p.div_floor(&self.r);
        }
        // floor(q√D) from an integer square root of q²D
        let n = &self.q * &self.q * BigInt::from(self.d);
        let s = n.sqrt();
        let floor_t = if self.q.is_positive() { s } else { -s - 1 };
        (&self.p + floor_t).div_floor(&self.r)
    }

    /// Nearest integer. Irrational values never tie; rational half-integers
    /// are rejected.
    pub fn rint(&self) -> Result<BigInt, QuadError> {
        if self.q.is_zero() && self.r == BigInt::from(2) {
            return Err(QuadError::HalfIntegerTie);
        }
        // floor(x + 1/2) = floor((2p + 2q√D + r) / 2r)
        let shifted = QuadSurd {
            p: &self.p * 2 + &self.r,
            q: &self.q * 2,
            r: &self.r * 2,
            d: self.d,
        };
        Ok(shifted.floor())
    }

    /// Floating value, accurate to a few ulps even when `p` and `q√D`
    /// nearly cancel.
    pub fn to_f64(&self) -> f64 {
        let sqrt_d = (self.d as f64).sqrt();
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        if self.p.sign() == self.q.sign() || self.p.is_zero() || self.q.is_zero() {
            return (p + q * sqrt_d) / r;
        }
        // p + q√D = (p² − q²D) / (p − q√D); the denominator has no cancellation
        let norm = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        let norm = norm.to_f64().unwrap_or(f64::NAN);
        norm / ((p - q * sqrt_d) * r)
    }
}

fn sign_to_ord(s: num_bigint::Sign) -> Ordering {
    match s {
        num_bigint::Sign::Minus => Ordering::Less,
        num_bigint::Sign::NoSign => Ordering::Equal,
        num_bigint::Sign::Plus => Ordering::Greater,
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd {
            p: -self.p.clone(),
            q: -self.q.clone(),
            r: self.r.clone(),
            d: self.d,
        }
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd {
            p: -self.p,
            q: -self.q,
            r: self.r,
            d: self.d,
        }
    }
}

// Operator forms panic on mixed radicands or division by zero, like integer
// division does; the `checked_*` methods report those as errors.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadSurd> for &QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: &QuadSurd) -> QuadSurd {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("surd {}: {e}", stringify!($method)))
            }
        }
        impl $tr<QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: QuadSurd) -> QuadSurd {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: &QuadSurd) -> QuadSurd {
                (&self).$method(rhs)
            }
        }
        impl $tr<QuadSurd> for &QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: QuadSurd) -> QuadSurd {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl fmt::Display for QuadSurd {
    /// `(p + q*sqrt(D))/r`, or `p/r` for rationals; re-parsed by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            if self.r.is_one() {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            let sign = if self.q.is_negative() { '-' } else { '+' };
            write!(
                f,
                "({} {} {}*sqrt({}))/{}",
                self.p,
                sign,
                self.q.abs(),
                self.d,
                self.r
            )
        }
    }
}

impl FromStr for QuadSurd {
    type Err = QuadError;

    /// Accepts the `Display` forms. A rational has no radicand of its own and
    /// is read over `D = 2`; binary operations adopt the other operand's `D`.
    fn from_str(s: &str) -> Result<Self, QuadError> {
        let bad = || QuadError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let int = |x: &str| x.parse::<BigInt>().map_err(|_| bad());
        if let Some(rest) = t.strip_prefix('(') {
            let (body, den) = rest.split_once(")/").ok_or_else(bad)?;
            let idx = body[1..].find(['+', '-']).ok_or_else(bad)? + 1;
            let (p, tail) = body.split_at(idx);
            let neg = tail.starts_with('-');
            let tail = &tail[1..];
            let (q, rad) = tail.split_once("*sqrt(").ok_or_else(bad)?;
            let rad = rad.strip_suffix(')').ok_or_else(bad)?;
            let mut q = int(q)?;
            if neg {
                q = -q;
            }
            let d: u64 = rad.parse().map_err(|_| bad())?;
            QuadSurd::new(int(p)?, q, int(den)?, d)
        } else if let Some((num, den)) = t.split_once('/') {
            QuadSurd::new(int(num)?, 0, int(den)?, 2)
        } else {
            QuadSurd::new(int(&t)?, 0, 1, 2)
        }
    }
}

impl serde::Serialize for QuadSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for QuadSurd {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64, r: i64, d: u64) -> QuadSurd {
        QuadSurd::new(p, q, r, d).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let golden = s(2, 2, 4, 5);
        assert_eq!((golden.p().clone(), golden.q().clone(), golden.r().clone()),
                   (1.into(), 1.into(), 2.into()));
        assert_eq!(s(-2, 2, 2, 3), s(-1, 1, 1, 3));
        let zero = s(0, 0, 7, 5);
        assert!(zero.is_zero());
        assert_eq!(zero.r(), &BigInt::from(1));
        assert_eq!(s(1, 1, -2, 5), s(-1, -1, 2, 5));
    }

    #[test]
    fn radicand_is_reduced_to_squarefree_kernel() {
        assert_eq!(s(0, 1, 1, 12), s(0, 2, 1, 3));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(2 * 9 * 49 * 11), (21, 22));
        assert_eq!(squarefree_split(1_000_003 * 1_000_003 * 5), (1_000_003, 5));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(QuadSurd::new(1, 1, 0, 5), Err(QuadError::ZeroDenominator));
        assert_eq!(QuadSurd::new(1, 1, 1, 16), Err(QuadError::SquareRadicand(16)));
        assert_eq!(QuadSurd::new(1, 1, 1, 0), Err(QuadError::SquareRadicand(0)));
        let a = s(0, 1, 1, 2);
        let b = s(0, 1, 1, 3);
        assert_eq!(a.checked_add(&b), Err(QuadError::MixedRadicand(2, 3)));
        assert_eq!(a.checked_div(&s(0, 0, 1, 2)), Err(QuadError::DivisionByZero));
    }

    #[test]
    fn conjugate_product_of_golden_pair() {
        let phi = s(1, 1, 2, 5);
        let inv = s(-1, 1, 2, 5);
        assert_eq!(&phi * &inv, QuadSurd::from_integer(1, 5).unwrap());
    }

    #[test]
    fn compare_and_abs() {
        let omega = s(-1, 1, 1, 3);
        let approx = QuadSurd::from_ratio(7321, 10000, 3).unwrap();
        assert_eq!(omega.compare(&approx).unwrap(), Ordering::Less);
        assert_eq!(approx.compare(&omega).unwrap(), Ordering::Greater);
        let phi = s(1, 1, 2, 5);
        assert_eq!((-&phi).abs(), phi);
        // rationals compare across radicands
        let half = QuadSurd::from_ratio(1, 2, 7).unwrap();
        assert_eq!(half.compare(&phi).unwrap(), Ordering::Less);
    }

    #[test]
    fn rint_examples() {
        let omega = s(-1, 1, 1, 3);
        assert_eq!(omega.scale(&2.into()).rint().unwrap(), 1.into());
        assert_eq!(omega.scale(&4.into()).rint().unwrap(), 3.into());
        assert_eq!(s(-1, 1, 2, 5).rint().unwrap(), 1.into());
        assert_eq!(s(-7, -1, 2, 5).rint().unwrap(), BigInt::from(-5));
        assert_eq!(
            QuadSurd::from_ratio(5, 2, 5).unwrap().rint(),
            Err(QuadError::HalfIntegerTie)
        );
        assert_eq!(QuadSurd::from_ratio(7, 3, 5).unwrap().rint().unwrap(), 2.into());
    }

    #[test]
    fn floor_of_negative_surds() {
        // −√2 ≈ −1.414
        assert_eq!(s(0, -1, 1, 2).floor(), BigInt::from(-2));
        // (3 − √2)/2 ≈ 0.793
        assert_eq!(s(3, -1, 2, 2).floor(), BigInt::from(0));
    }

    #[test]
    fn to_f64_survives_cancellation() {
        // 114243/80782 − √2 ≈ 5.4e-11
        let x = QuadSurd::new(114243, -80782, 80782, 2).unwrap();
        let exact = 5.417_835_368_896_513e-11_f64;
        assert!(((x.to_f64() - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn display_round_trips() {
        for v in [s(-1, 1, 1, 3), s(1, -3, 7, 5), s(4, 0, 3, 2), s(5, 0, 1, 2)] {
            let back: QuadSurd = v.to_string().parse().unwrap();
            assert_eq!(back, v, "{v}");
        }
        assert_eq!(s(-1, 1, 1, 3).to_string(), "(-1 + 1*sqrt(3))/1");
        assert!("(1+sqrt3)/2".parse::<QuadSurd>().is_err());
    }
}

//! Exact arithmetic in ℚ(γ), γ = √φ, φ = (1+√5)/2.
//!
//! Every element is stored as `c0 + c1·γ + c2·γ² + c3·γ³` with rational
//! coefficients. The minimal polynomial of γ is `x⁴ − x² − 1`, so products
//! are reduced with γ⁴ = γ² + 1 and the four coefficients form a canonical
//! representation: two values are equal exactly when their coefficients are.

mod rational;

pub use rational::{ParseRationalError, Rational};

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// γ = √φ as a double.
pub const GAMMA_F64: f64 = 1.272_019_649_514_069;
/// φ = (1+√5)/2 as a double.
pub const PHI_F64: f64 = 1.618_033_988_749_895;

const GAMMA_POWERS_F64: [f64; 4] = [1.0, GAMMA_F64, PHI_F64, 2.058_171_027_271_492_5];

/// An exact element of ℚ(γ).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GoldenValue {
    c: [Rational; 4],
}

impl GoldenValue {
    pub fn new(c0: Rational, c1: Rational, c2: Rational, c3: Rational) -> Self {
        GoldenValue { c: [c0, c1, c2, c3] }
    }

    /// Integer coefficients, mostly for tests and tables.
    pub fn from_ints(c: [i64; 4]) -> Self {
        GoldenValue {
            c: c.map(Rational::from_int),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::ONE)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(Rational::from_int(v))
    }

    pub fn from_rational(r: Rational) -> Self {
        GoldenValue {
            c: [r, Rational::ZERO, Rational::ZERO, Rational::ZERO],
        }
    }

    /// γ itself.
    pub fn gamma() -> Self {
        Self::from_ints([0, 1, 0, 0])
    }

    /// φ = γ².
    pub fn phi() -> Self {
        Self::from_ints([0, 0, 1, 0])
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Rational::is_zero)
    }

    /// True when the value lies in ℚ (no γ, γ², γ³ part).
    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Rational::is_zero)
    }

    /// True when all coefficients are integers (the value lies in ℤ[γ]).
    pub fn is_integral(&self) -> bool {
        self.c.iter().all(Rational::is_integer)
    }

    /// γ^k for any integer k, using γ⁻¹ = γ³ − γ for negative exponents.
    pub fn gamma_pow(k: i32) -> Self {
        static TABLE: OnceLock<Vec<GoldenValue>> = OnceLock::new();
        const SPAN: i32 = 48;
        let table = TABLE.get_or_init(|| {
            let g = GoldenValue::gamma();
            let ginv = GoldenValue::from_ints([0, -1, 0, 1]);
            let mut neg = vec![GoldenValue::one()];
            let mut pos = vec![GoldenValue::one()];
            for i in 1..=SPAN as usize {
                pos.push(&pos[i - 1] * &g);
                neg.push(&neg[i - 1] * &ginv);
            }
            neg.into_iter().skip(1).rev().chain(pos).collect()
        });
        if k.abs() <= SPAN {
            return table[(k + SPAN) as usize].clone();
        }
        let base = if k >= 0 {
            GoldenValue::gamma()
        } else {
            GoldenValue::from_ints([0, -1, 0, 1])
        };
        base.pow_u(k.unsigned_abs())
    }

    /// φ^k = γ^(2k).
    pub fn phi_pow(k: i32) -> Self {
        Self::gamma_pow(2 * k)
    }

    fn pow_u(&self, mut e: u32) -> Self {
        let mut acc = GoldenValue::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GoldenValue {
            c: [&self.c[0] * r, &self.c[1] * r, &self.c[2] * r, &self.c[3] * r],
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Nearest-double evaluation of `c0 + c1·γ + c2·γ² + c3·γ³`.
    pub fn to_f64(&self) -> f64 {
        self.c.iter().zip(GAMMA_POWERS_F64).map(|(c, g)| c.to_f64() * g).sum()
    }

    /// Exact sign of the real value at γ ≈ 1.27202.
    pub fn sign(&self) -> i32 {
        let terms: [f64; 4] = std::array::from_fn(|i| self.c[i].to_f64() * GAMMA_POWERS_F64[i]);
        let approx: f64 = terms.iter().sum();
        let mag: f64 = terms.iter().map(|t| t.abs()).sum();
        if mag.is_finite() && approx.abs() > 1e-12 * mag {
            return if approx > 0.0 { 1 } else { -1 };
        }
        self.sign_exact()
    }

    /// Sign decided purely algebraically.
    ///
    /// Writes the value as `P + γQ` with `P = c0 + c2·φ`, `Q = c1 + c3·φ` in
    /// ℚ(φ); when P and Q disagree in sign the answer is `sign(P)·sign(P² − φQ²)`,
    /// which reduces to the same question one level down in ℚ(√5).
    pub fn sign_exact(&self) -> i32 {
        let p = QPhi(self.c[0].clone(), self.c[2].clone());
        let q = QPhi(self.c[1].clone(), self.c[3].clone());
        let (sp, sq) = (p.sign(), q.sign());
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return if sp == 0 { sq } else { sp };
        }
        let diff = p.mul(&p).sub(&QPhi::phi().mul(&q.mul(&q)));
        sp * diff.sign()
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (P + γQ)⁻¹ = (P − γQ) / (P² − φQ²), the denominator lies in ℚ(φ).
        let p = QPhi(self.c[0].clone(), self.c[2].clone());
        let q = QPhi(self.c[1].clone(), self.c[3].clone());
        let norm = p.mul(&p).sub(&QPhi::phi().mul(&q.mul(&q)));
        let ninv = norm.inverse();
        let a = p.mul(&ninv);
        let b = q.mul(&ninv);
        Some(GoldenValue {
            c: [a.0, -&b.0, a.1, -&b.1],
        })
    }
}

/// `a + b·φ` in ℚ(φ), used only for sign and inverse computations.
#[derive(Clone)]
struct QPhi(Rational, Rational);

impl QPhi {
    fn phi() -> Self {
        QPhi(Rational::ZERO, Rational::ONE)
    }

    fn mul(&self, o: &QPhi) -> QPhi {
        // φ² = φ + 1
        let bd = &self.1 * &o.1;
        QPhi(&(&self.0 * &o.0) + &bd, &(&(&self.0 * &o.1) + &(&self.1 * &o.0)) + &bd)
    }

    fn sub(&self, o: &QPhi) -> QPhi {
        QPhi(&self.0 - &o.0, &self.1 - &o.1)
    }

    /// `a + bφ = (2a + b)/2 + (b/2)·√5`.
    fn sign(&self) -> i32 {
        let u = &(&self.0 + &self.0) + &self.1;
        let (su, sw) = (u.signum(), self.1.signum());
        if sw == 0 {
            return su;
        }
        if su == 0 || su == sw {
            return if su == 0 { sw } else { su };
        }
        let five = Rational::from_int(5);
        let d = &(&u * &u) - &(&five * &(&self.1 * &self.1));
        su * d.signum()
    }

    fn inverse(&self) -> QPhi {
        // (a + bφ)(a + b − bφ) = a² + ab − b²
        let n = &(&(&self.0 * &self.0) + &(&self.0 * &self.1)) - &(&self.1 * &self.1);
        let ninv = n.recip();
        QPhi(&(&self.0 + &self.1) * &ninv, &(-&self.1) * &ninv)
    }
}

impl<'a> Add<&'a GoldenValue> for &'a GoldenValue {
    type Output = GoldenValue;
    fn add(self, rhs: &'a GoldenValue) -> GoldenValue {
        GoldenValue {
            c: std::array::from_fn(|i| &self.c[i] + &rhs.c[i]),
        }
    }
}

impl<'a> Sub<&'a GoldenValue> for &'a GoldenValue {
    type Output = GoldenValue;
    fn sub(self, rhs: &'a GoldenValue) -> GoldenValue {
        GoldenValue {
            c: std::array::from_fn(|i| &self.c[i] - &rhs.c[i]),
        }
    }
}

impl<'a> Mul<&'a GoldenValue> for &'a GoldenValue {
    type Output = GoldenValue;
    fn mul(self, rhs: &'a GoldenValue) -> GoldenValue {
        let mut d: [Rational; 7] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                d[i + j] = &d[i + j] + &(a * b);
            }
        }
        // γ⁴ = γ² + 1, γ⁵ = γ³ + γ, γ⁶ = 2γ² + 1
        let [d0, d1, d2, d3, d4, d5, d6] = d;
        let two_d6 = &d6 + &d6;
        GoldenValue {
            c: [&(&d0 + &d4) + &d6, &d1 + &d5, &(&d2 + &d4) + &two_d6, &d3 + &d5],
        }
    }
}

impl Neg for &GoldenValue {
    type Output = GoldenValue;
    fn neg(self) -> GoldenValue {
        GoldenValue {
            c: std::array::from_fn(|i| -&self.c[i]),
        }
    }
}

macro_rules! forward_owned_gv {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<GoldenValue> for GoldenValue {
            type Output = GoldenValue;
            fn $m(self, rhs: GoldenValue) -> GoldenValue { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a GoldenValue> for GoldenValue {
            type Output = GoldenValue;
            fn $m(self, rhs: &'a GoldenValue) -> GoldenValue { (&self).$m(rhs) }
        }
    )*};
}
forward_owned_gv!(Add add, Sub sub, Mul mul);

impl Neg for GoldenValue {
    type Output = GoldenValue;
    fn neg(self) -> GoldenValue {
        -&self
    }
}

impl PartialOrd for GoldenValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by real value; consistent with `Eq` because the representation is canonical.
impl Ord for GoldenValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).sign().cmp(&0)
    }
}

impl From<Rational> for GoldenValue {
    fn from(r: Rational) -> Self {
        GoldenValue::from_rational(r)
    }
}

impl From<i64> for GoldenValue {
    fn from(v: i64) -> Self {
        GoldenValue::from_int(v)
    }
}

impl fmt::Debug for GoldenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GV({}, {}, {}, {})", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

impl fmt::Display for GoldenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "γ", "γ²", "γ³"];
        let mut first = true;
        for (c, name) in self.c.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{c}")?;
            } else if *c == Rational::ONE {
                f.write_str(name)?;
            } else {
                write!(f, "({c}){name}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GoldenValueRepr {
    c: [[String; 2]; 4],
    #[serde(default, skip_deserializing)]
    float: f64,
}

impl Serialize for GoldenValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GoldenValueRepr {
            c: std::array::from_fn(|i| [self.c[i].numer().to_string(), self.c[i].denom().to_string()]),
            float: self.to_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoldenValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GoldenValueRepr::deserialize(d)?;
        let mut c: [Rational; 4] = Default::default();
        for (slot, [n, den]) in c.iter_mut().zip(repr.c.iter()) {
            *slot = format!("{n}/{den}").parse().map_err(D::Error::custom)?;
        }
        Ok(GoldenValue { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn gv(c: [i64; 4]) -> GoldenValue {
        GoldenValue::from_ints(c)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(gv([1, 0, 0, 0]) + gv([0, 0, 1, 0]), gv([1, 0, 1, 0]));
        let x = gv([3, -2, 5, 7]);
        assert_eq!(&x + &GoldenValue::zero(), x);
        // φ + φ² = 1 + 2φ
        let phi = GoldenValue::phi();
        assert_eq!(&phi + &phi.square(), gv([1, 0, 2, 0]));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(GoldenValue::gamma() * gv([0, 0, 0, 1]), gv([1, 0, 1, 0]));
        let phi = GoldenValue::phi();
        assert_eq!(&phi * &phi, &phi + &GoldenValue::one());
        assert_eq!(GoldenValue::gamma() * gv([0, -1, 0, 1]), GoldenValue::one());
    }

    #[test]
    fn power_examples() {
        assert_eq!(GoldenValue::gamma_pow(2), gv([0, 0, 1, 0]));
        assert_eq!(GoldenValue::gamma_pow(-2), gv([-1, 0, 1, 0]));
        // γ⁵ by repeated multiplication: γ⁴·γ = (γ²+1)γ
        let mut acc = GoldenValue::one();
        for _ in 0..5 {
            acc = acc * GoldenValue::gamma();
        }
        assert_eq!(acc, gv([0, 1, 0, 1]));
        assert_eq!(GoldenValue::gamma_pow(5), acc);
        assert_eq!(GoldenValue::gamma_pow(60), GoldenValue::gamma_pow(30).square());
        assert_eq!(
            GoldenValue::gamma_pow(-60) * GoldenValue::gamma_pow(60),
            GoldenValue::one()
        );
    }

    #[test]
    fn pow_inverse_pairs() {
        for k in -40..=40 {
            assert_eq!(
                GoldenValue::gamma_pow(k) * GoldenValue::gamma_pow(-k),
                GoldenValue::one(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn sign_examples() {
        assert_eq!(GoldenValue::zero().sign(), 0);
        assert_eq!((GoldenValue::phi() - GoldenValue::one()).sign(), 1);
        assert_eq!((gv([0, 0, 0, 1]) - gv([2, 0, 0, 0])).sign(), 1);
        assert_eq!((gv([2, 0, 0, 0]) - gv([0, 0, 0, 1])).sign(), -1);
    }

    #[test]
    fn sign_exact_on_near_cancellation() {
        // F(n+1) - F(n)·φ is tiny but nonzero; its sign alternates with n.
        let (mut a, mut b) = (1i64, 1i64);
        for n in 2..80 {
            let v = gv([b, 0, 0, 0]) - gv([0, 0, a, 0]);
            let expected = if n % 2 == 0 { -1 } else { 1 };
            assert_eq!(v.sign_exact(), expected, "n = {n}");
            assert_eq!(v.sign(), expected, "n = {n}");
            let next = a.checked_add(b);
            match next {
                Some(c) => {
                    a = b;
                    b = c;
                }
                None => break,
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let x = GoldenValue::new(
            Rational::new(3, 7),
            Rational::new(-2, 5),
            Rational::from_int(1),
            Rational::new(9, 4),
        );
        assert_eq!(&x * &x.inverse().unwrap(), GoldenValue::one());
        assert!(GoldenValue::zero().inverse().is_none());
    }

    #[test]
    fn float_conversion() {
        assert!((GoldenValue::gamma().to_f64() - GAMMA_F64).abs() < 1e-15);
        assert!((GoldenValue::gamma_pow(3).to_f64() - 2.058_171_027_271_492).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let x = GoldenValue::new(
            Rational::new(-3, 7),
            Rational::ZERO,
            Rational::from_int(12),
            Rational::new(1, 2),
        );
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains(r#""c":[["-3","7"],["0","1"],["12","1"],["1","2"]]"#), "{s}");
        assert!(s.contains("\"float\""));
        let back: GoldenValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    /// Rational enclosure of γ by bisection on x⁴ − x² − 1, used as an
    /// evaluation oracle that never touches the sign code under test.
    fn gamma_bounds(bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::new(BigInt::from(127), BigInt::from(100));
        let mut hi = BigRational::new(BigInt::from(128), BigInt::from(100));
        let f = |x: &BigRational| {
            let x2 = x * x;
            &(&x2 * &x2) - &x2 - BigRational::from_integer(BigInt::from(1))
        };
        let two = BigRational::from_integer(BigInt::from(2));
        for _ in 0..bits {
            let mid = (&lo + &hi) / &two;
            if f(&mid) > BigRational::from_integer(BigInt::from(0)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    fn oracle_sign(x: &GoldenValue, bounds: &(BigRational, BigRational)) -> Option<i32> {
        let eval = |g: &BigRational| {
            let mut acc = BigRational::from_integer(BigInt::from(0));
            let mut p = BigRational::from_integer(BigInt::from(1));
            for c in x.coeffs() {
                acc += c.to_big() * &p;
                p *= g;
            }
            acc
        };
        let (a, b) = (eval(&bounds.0), eval(&bounds.1));
        let zero = BigRational::from_integer(BigInt::from(0));
        if a > zero && b > zero {
            Some(1)
        } else if a < zero && b < zero {
            Some(-1)
        } else {
            None
        }
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-1_000_000i64..=1_000_000, 1i64..=1000).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn arb_gv() -> impl Strategy<Value = GoldenValue> {
        [arb_rat(), arb_rat(), arb_rat(), arb_rat()].prop_map(|[a, b, c, d]| GoldenValue::new(a, b, c, d))
    }

    fn arb_small_gv() -> impl Strategy<Value = GoldenValue> {
        prop::array::uniform4(-50i64..=50).prop_map(GoldenValue::from_ints)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn ring_axioms(a in arb_gv(), b in arb_gv(), c in arb_gv()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn float_agrees_with_direct_evaluation(a in arb_gv()) {
            let direct: f64 = a.coeffs().iter().enumerate()
                .map(|(i, c)| c.to_f64() * GAMMA_F64.powi(i as i32)).sum();
            let mag: f64 = a.coeffs().iter().enumerate()
                .map(|(i, c)| (c.to_f64() * GAMMA_F64.powi(i as i32)).abs()).sum();
            prop_assert!((a.to_f64() - direct).abs() <= 1e-12 * mag.max(1e-300));
        }

        #[test]
        fn equality_is_coefficientwise(a in arb_small_gv(), b in arb_small_gv()) {
            let same_coeffs = a.coeffs() == b.coeffs();
            prop_assert_eq!(a == b, same_coeffs);
            prop_assert_eq!((&a - &b).sign() == 0, same_coeffs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn sign_matches_high_precision_oracle(a in arb_gv()) {
            static BOUNDS: OnceLock<(BigRational, BigRational)> = OnceLock::new();
            let bounds = BOUNDS.get_or_init(|| gamma_bounds(160));
            prop_assume!(!a.is_zero());
            let expected = oracle_sign(&a, bounds).expect("160-bit enclosure separates from zero");
            prop_assert_eq!(a.sign(), expected);
            prop_assert_eq!(a.sign_exact(), expected);
        }
    }
}

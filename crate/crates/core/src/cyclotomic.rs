//! Exact roots of unity and exact arithmetic in cyclotomic fields.
//!
//! A [`Phase`] is a root of unity `exp(2πi·q)` stored as the reduced rational
//! `q ∈ [0, 1)`. A [`CyclotomicScalar`] is an element of `ℚ(ζ_N)` stored in
//! the power basis `1, ζ_N, …, ζ_N^{φ(N)-1}` and always reduced modulo the
//! N-th cyclotomic polynomial, so equality and zero tests are exact.

use std::collections::HashMap;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits;

/// A root of unity `exp(2πi·q)`, with `q = num/den` reduced and `0 ≤ num < den`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ONE: Phase = Phase { num: 0, den: 1 };

    /// The phase `exp(2πi·num/den)`.
    ///
    /// # Panics
    /// If `den` is zero.
    pub fn new(num: i64, den: u64) -> Phase {
        Phase::from_wide(num as i128, den as u128)
    }

    fn from_wide(num: i128, den: u128) -> Phase {
        assert!(den > 0, "phase denominator must be positive");
        let d = den as i128;
        let n = num.rem_euclid(d) as u128;
        let g = n.gcd(&den);
        Phase {
            num: (n / g) as u64,
            den: (den / g) as u64,
        }
    }

    /// The primitive root `exp(2πi/n)`.
    pub fn root_of_unity(n: u64) -> Phase {
        Phase::new(1, n)
    }

    pub fn minus_one() -> Phase {
        Phase { num: 1, den: 2 }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn conj(self) -> Phase {
        Phase::from_wide(-(self.num as i128), self.den as u128)
    }

    pub fn pow(self, k: i64) -> Phase {
        Phase::from_wide(self.num as i128 * k as i128, self.den as u128)
    }

    /// Multiplicative order, which is the denominator of the canonical `q`.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    pub fn to_complex(self) -> Complex64 {
        let angle = 2.0 * std::f64::consts::PI * (self.num as f64) / (self.den as f64);
        Complex64::new(angle.cos(), angle.sin())
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ONE
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        if self.num == 0 {
            return rhs;
        }
        if rhs.num == 0 {
            return self;
        }
        if self.den == rhs.den {
            let d = self.den;
            let n = ((self.num as u128 + rhs.num as u128) % d as u128) as u64;
            let g = n.gcd(&d);
            return Phase { num: n / g, den: d / g };
        }
        let l = (self.den as u128).lcm(&(rhs.den as u128));
        let n = self.num as u128 * (l / self.den as u128) + rhs.num as u128 * (l / rhs.den as u128);
        Phase::from_wide((n % l) as i128, l)
    }
}

impl MulAssign for Phase {
    fn mul_assign(&mut self, rhs: Phase) {
        *self = *self * rhs;
    }
}

impl Product for Phase {
    fn product<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ONE, |acc, p| acc * p)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Phase> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid phase {s:?}, expected \"a/b\" or \"0\""));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<i64>().map_err(|_| bad())?,
                d.trim().parse::<u64>().map_err(|_| bad())?,
            ),
            None => (s.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Phase::new(num, den))
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ℚ(ζ_N)` presented as `ℚ[x]/Φ_N(x)`.
#[derive(Debug)]
struct Field {
    conductor: u64,
    /// Coefficients of the monic `Φ_N`, lowest degree first.
    modulus: Vec<BigRational>,
}

impl Field {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Reduces an arbitrary-length coefficient vector modulo `Φ_N`.
    fn reduce(&self, mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
        let deg = self.degree();
        for k in (deg..coeffs.len()).rev() {
            if coeffs[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut coeffs[k], BigRational::zero());
            for (i, m) in self.modulus[..deg].iter().enumerate() {
                if !m.is_zero() {
                    coeffs[k - deg + i] -= &c * m;
                }
            }
        }
        coeffs.resize(deg, BigRational::zero());
        coeffs
    }
}

fn field_cache() -> &'static RwLock<HashMap<u64, Arc<Field>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn field(conductor: u64) -> Result<Arc<Field>> {
    let cap = limits::conductor_cap();
    if conductor > cap {
        return Err(Error::ConductorCap { requested: conductor, cap });
    }
    Ok(field_unchecked(conductor))
}

fn field_unchecked(conductor: u64) -> Arc<Field> {
    if let Some(f) = field_cache().read().unwrap().get(&conductor) {
        return f.clone();
    }
    let modulus = cyclotomic_polynomial(conductor)
        .into_iter()
        .map(|c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    let f = Arc::new(Field { conductor, modulus });
    field_cache()
        .write()
        .unwrap()
        .entry(conductor)
        .or_insert(f)
        .clone()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn substitute_power(poly: &[i128], k: usize) -> Vec<i128> {
    let mut out = vec![0; (poly.len() - 1) * k + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i * k] = c;
    }
    out
}

/// Exact quotient of integer polynomials by a monic divisor.
fn exact_div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i128; num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                rem[k + i] = rem[k + i].checked_sub(c * d).expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    let mut poly: Vec<i128> = vec![-1, 1];
    let mut radical = 1;
    for p in prime_factors(n) {
        // Φ_{mp}(x) = Φ_m(x^p) / Φ_m(x) for p ∤ m
        let lifted = substitute_power(&poly, p as usize);
        poly = exact_div_monic(&lifted, &poly);
        radical *= p;
    }
    substitute_power(&poly, (n / radical) as usize)
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// An exact element of the cyclotomic field `ℚ(ζ_N)`.
#[derive(Clone)]
pub struct CyclotomicScalar {
    field: Arc<Field>,
    coeffs: Vec<BigRational>,
}

impl CyclotomicScalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        CyclotomicScalar {
            field: field_unchecked(1),
            coeffs: vec![r],
        }
    }

    /// Embeds `exp(2πi·q)` in `ℚ(ζ_den)`.
    pub fn from_phase(p: Phase) -> Result<Self> {
        let f = field(p.denom())?;
        let k = p.numer() as usize;
        let mut v = vec![BigRational::zero(); k.max(f.degree()) + 1];
        v[k] = BigRational::one();
        let coeffs = f.reduce(v);
        Ok(CyclotomicScalar { field: f, coeffs })
    }

    /// `r · exp(2πi·q)`.
    pub fn scaled_phase(p: Phase, r: BigRational) -> Result<Self> {
        Ok(Self::from_phase(p)?.scale(&r))
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if this scalar lies in `ℚ`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Coordinates in the power basis of `ℚ(ζ_N)`.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    fn promote(&self, target: &Arc<Field>) -> Vec<BigRational> {
        if target.conductor == self.field.conductor {
            return self.coeffs.clone();
        }
        let step = (target.conductor / self.field.conductor) as usize;
        let len = ((self.coeffs.len() - 1) * step + 1).max(target.degree());
        let mut v = vec![BigRational::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[k * step] = c.clone();
            }
        }
        target.reduce(v)
    }

    fn common_field(&self, other: &Self, check_cap: bool) -> Result<Arc<Field>> {
        let (a, b) = (self.field.conductor, other.field.conductor);
        if a == b {
            return Ok(self.field.clone());
        }
        let l = a.lcm(&b);
        if l == a {
            Ok(self.field.clone())
        } else if l == b {
            Ok(other.field.clone())
        } else if check_cap {
            field(l)
        } else {
            Ok(field_unchecked(l))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if other.field.conductor == 1 {
            let mut out = self.clone();
            out.coeffs[0] += &other.coeffs[0];
            return Ok(out);
        }
        if self.field.conductor == 1 {
            return other.try_add(self);
        }
        let f = self.common_field(other, true)?;
        let mut a = self.promote(&f);
        for (x, y) in a.iter_mut().zip(other.promote(&f)) {
            *x += y;
        }
        Ok(CyclotomicScalar { field: f, coeffs: a })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if other.field.conductor == 1 {
            return Ok(self.scale(&other.coeffs[0]));
        }
        if self.field.conductor == 1 {
            return Ok(other.scale(&self.coeffs[0]));
        }
        let f = self.common_field(other, true)?;
        let a = self.promote(&f);
        let b = other.promote(&f);
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let coeffs = f.reduce(prod);
        Ok(CyclotomicScalar { field: f, coeffs })
    }

    /// Multiplies by `exp(2πi·q)`.
    pub fn try_mul_phase(&self, p: Phase) -> Result<Self> {
        if p.is_one() {
            return Ok(self.clone());
        }
        self.try_mul(&Self::from_phase(p)?)
    }

    /// Complex conjugation, the Galois automorphism `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.field.conductor as usize;
        if n <= 2 {
            return self.clone();
        }
        let mut v = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(n - k) % n] += c;
            }
        }
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.field.reduce(v),
        }
    }

    /// `|x|² = x · conj(x)`, an exact totally real element.
    pub fn norm_squared(&self) -> Self {
        self.try_mul(&self.conj())
            .expect("conjugate lives in the same field")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.conductor == 1 {
            return Ok(Self::from_rational(self.coeffs[0].recip()));
        }
        let inv = poly_inverse_mod(&self.coeffs, &self.field.modulus);
        let coeffs = self.field.reduce(inv);
        Ok(CyclotomicScalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inverse()?)
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / n;
            acc += Complex64::new(angle.cos(), angle.sin()) * c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Expansion `Σ r·exp(2πi·q)` over the power basis, zero terms omitted.
    pub fn terms(&self) -> Vec<(Phase, BigRational)> {
        let n = self.field.conductor;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (Phase::new(k as i64, n), c.clone()))
            .collect()
    }

    pub fn from_terms<'a, I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a (Phase, BigRational)>,
    {
        let mut acc = Self::zero();
        for (p, r) in terms {
            acc = acc.try_add(&Self::scaled_phase(*p, r.clone())?)?;
        }
        Ok(acc)
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_divrem(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() < den.len() {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dd] / &lead;
        if !c.is_zero() {
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    rem.truncate(dd.max(1));
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `modulus` by the extended Euclidean algorithm.
fn poly_inverse_mod(a: &[BigRational], modulus: &[BigRational]) -> Vec<BigRational> {
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    debug_assert_eq!(r0.len(), 1, "modulus is irreducible, so the gcd is a unit");
    let c = r0[0].recip();
    s0.into_iter().map(|x| x * &c).collect()
}

impl PartialEq for CyclotomicScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.field.conductor == other.field.conductor {
            return self.coeffs == other.coeffs;
        }
        let f = self
            .common_field(other, false)
            .expect("unchecked field construction is infallible");
        self.promote(&f) == other.promote(&f)
    }
}

impl Eq for CyclotomicScalar {}

impl fmt::Debug for CyclotomicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicScalar({self})")
    }
}

impl fmt::Display for CyclotomicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(p, r)| {
                if p.is_one() {
                    format!("{r}")
                } else {
                    format!("{r}*e({p})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl From<Phase> for CyclotomicScalar {
    /// # Panics
    /// If the phase denominator exceeds the conductor cap.
    fn from(p: Phase) -> Self {
        CyclotomicScalar::from_phase(p).expect("phase conductor exceeds cap")
    }
}

impl From<i64> for CyclotomicScalar {
    fn from(n: i64) -> Self {
        CyclotomicScalar::from_integer(n)
    }
}

impl Neg for &CyclotomicScalar {
    type Output = CyclotomicScalar;

    fn neg(self) -> CyclotomicScalar {
        CyclotomicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CyclotomicScalar {
    type Output = CyclotomicScalar;

    fn neg(self) -> CyclotomicScalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CyclotomicScalar> for &CyclotomicScalar {
            type Output = CyclotomicScalar;

            /// # Panics
            /// If the combined conductor exceeds the configured cap.
            fn $method(self, rhs: &CyclotomicScalar) -> CyclotomicScalar {
                self.$checked(rhs).expect("cyclotomic arithmetic failed")
            }
        }

        impl $trait for CyclotomicScalar {
            type Output = CyclotomicScalar;

            fn $method(self, rhs: CyclotomicScalar) -> CyclotomicScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Sum for CyclotomicScalar {
    fn sum<I: Iterator<Item = CyclotomicScalar>>(iter: I) -> Self {
        iter.fold(CyclotomicScalar::zero(), |acc, x| acc + x)
    }
}

/// Renders a rational as `"p/q"` with an explicit denominator.
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
    };
    Ok(r)
}

impl Serialize for CyclotomicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> = self
            .terms()
            .iter()
            .map(|(p, r)| [p.to_string(), rational_to_string(r)])
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(String, String)> = Vec::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(pairs.len());
        for (p, r) in &pairs {
            let phase: Phase = p.parse().map_err(serde::de::Error::custom)?;
            let rat = parse_rational(r).map_err(serde::de::Error::custom)?;
            terms.push((phase, rat));
        }
        CyclotomicScalar::from_terms(&terms).map_err(serde::de::Error::custom)
    }
}

/// Degree `φ(N)` of the field `ℚ(ζ_N)`.
pub fn field_degree(conductor: u64) -> u64 {
    euler_phi(conductor)
}

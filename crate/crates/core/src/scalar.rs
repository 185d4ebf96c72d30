//! Exact coefficients: Gaussian rationals, the formal unit `tau` (standing
//! for 2*pi*i), and the total order on complex numbers used for V-indices.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rational number with arbitrary precision.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Largest integer `<= x`.
pub fn floor_q(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("floor out of i64 range")
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Q,
    pub im: Q,
}

impl GaussianRational {
    pub fn new(re: Q, im: Q) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Q) -> Self {
        GaussianRational { re, im: Q::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::real(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(q(n, d))
    }

    pub fn i() -> Self {
        GaussianRational { re: Q::zero(), im: Q::one() }
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Integer value if the number is a rational integer.
    pub fn as_int(&self) -> Option<i64> {
        if self.im.is_zero() && self.re.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "inverse of zero");
        GaussianRational { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    fn fmt_inner(&self, wrap: bool) -> String {
        let s = if self.im.is_zero() {
            return fmt_q(&self.re);
        } else if self.re.is_zero() {
            imag_part(&self.im, false)
        } else {
            format!("{}{}", fmt_q(&self.re), imag_part(&self.im, true))
        };
        if wrap && !self.re.is_zero() {
            format!("({})", s)
        } else {
            s
        }
    }

    /// String suitable as a factor in a product (parenthesized when it has two parts).
    pub fn to_factor_string(&self) -> String {
        self.fmt_inner(true)
    }
}

fn imag_part(im: &Q, with_sign: bool) -> String {
    let sign = if im.is_negative() { "-" } else if with_sign { "+" } else { "" };
    let a = im.abs();
    if a.is_one() {
        format!("{}i", sign)
    } else {
        format!("{}{}*i", sign, fmt_q(&a))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_inner(false))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::real(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Q::one())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: GaussianRational) -> GaussianRational {
        &self + &o
    }
}
impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: GaussianRational) -> GaussianRational {
        &self - &o
    }
}
impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}
impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: GaussianRational) -> GaussianRational {
        &self * &o
    }
}
impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self * &o.inv()
    }
}
impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: GaussianRational) -> GaussianRational {
        &self / &o
    }
}
impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}
impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -(self.clone())
    }
}

/// Total order on C: lexicographic on (Re a, |Im a|, Im a).
pub fn cx_cmp(a: &GaussianRational, b: &GaussianRational) -> Ordering {
    a.re.cmp(&b.re)
        .then_with(|| a.im.abs().cmp(&b.im.abs()))
        .then_with(|| a.im.cmp(&b.im))
}

pub fn cx_le(a: &GaussianRational, b: &GaussianRational) -> bool {
    cx_cmp(a, b) != Ordering::Greater
}

pub fn cx_lt(a: &GaussianRational, b: &GaussianRational) -> bool {
    cx_cmp(a, b) == Ordering::Less
}

/// Largest integer n with n <= g in the `cx_cmp` order.
pub fn cx_floor(g: &GaussianRational) -> i64 {
    floor_q(&g.re)
}

/// Wrapper giving `GaussianRational` the `cx_cmp` order, for use as map keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cx(pub GaussianRational);

impl Ord for Cx {
    fn cmp(&self, o: &Self) -> Ordering {
        cx_cmp(&self.0, &o.0)
    }
}
impl PartialOrd for Cx {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `-1 <= a < 0` in the `cx_cmp` order.
pub fn in_fundamental_domain(a: &GaussianRational) -> bool {
    let m1 = GaussianRational::int(-1);
    cx_le(&m1, a) && cx_lt(a, &GaussianRational::zero())
}

/// Writes `beta = alpha + m` with `alpha` in the fundamental domain; returns `(alpha, m)`.
pub fn split_fundamental(beta: &GaussianRational) -> (GaussianRational, i64) {
    // The domain is exactly -1 <= Re < 0.
    let m = cx_floor(beta) + 1;
    let alpha = beta - &GaussianRational::int(m);
    debug_assert!(in_fundamental_domain(&alpha));
    (alpha, m)
}

/// Finite Laurent polynomial in `tau` with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<i32, GaussianRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Self::from_gr(GaussianRational::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_gr(GaussianRational::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_gr(GaussianRational::frac(n, d))
    }

    pub fn i() -> Self {
        Self::from_gr(GaussianRational::i())
    }

    pub fn tau() -> Self {
        Self::tau_pow(1)
    }

    pub fn tau_pow(k: i32) -> Self {
        Self::monomial(GaussianRational::one(), k)
    }

    pub fn monomial(c: GaussianRational, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Scalar { terms }
    }

    pub fn from_gr(c: GaussianRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map_or(false, |c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `tau^k`.
    pub fn coeff(&self, k: i32) -> GaussianRational {
        self.terms.get(&k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// `Some(c)` if the scalar is `c * tau^k` for the given k (or zero).
    pub fn as_tau_multiple(&self, k: i32) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&k).cloned(),
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let c = c.conj();
                (*k, if k % 2 != 0 { -c } else { c })
            })
            .collect();
        Scalar { terms }
    }

    pub fn scale_gr(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn mul_tau(&self, k: i32) -> Self {
        Scalar { terms: self.terms.iter().map(|(j, v)| (j + k, v.clone())).collect() }
    }

    pub fn add_assign_ref(&mut self, o: &Scalar) {
        for (k, c) in &o.terms {
            let e = self.terms.entry(*k).or_insert_with(GaussianRational::zero);
            *e += c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    /// Multiplicative inverse when the scalar is a single `c*tau^k`.
    pub fn inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Some(Scalar::monomial(c.inv(), -k))
    }

    /// Formats a scalar meant to multiply something: `None` for 1, `Some("-")` for -1.
    pub(crate) fn factor_prefix(&self) -> (bool, Option<String>) {
        if self.is_one() {
            return (false, None);
        }
        if (-self.clone()).is_one() {
            return (true, None);
        }
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            let neg = c.im.is_zero() && c.re.is_negative() || c.re.is_zero() && c.im.is_negative();
            if *k == 0 && !neg {
                return (false, Some(c.to_factor_string()));
            }
            let body = if neg { Scalar::monomial(-c, *k) } else { Scalar::monomial(c.clone(), *k) };
            return (neg, Some(body.to_string()));
        }
        (false, Some(format!("({})", self)))
    }
}

fn fmt_tau_term(k: i32, c: &GaussianRational) -> String {
    let tau = match k {
        0 => String::new(),
        1 => "tau".to_string(),
        _ => format!("tau^{}", k),
    };
    if k == 0 {
        return c.to_string();
    }
    if c.is_one() {
        tau
    } else if (-c).is_one() {
        format!("-{}", tau)
    } else if c.re.is_zero() && c.im.abs().is_one() {
        format!("{}*{}", c, tau)
    } else {
        format!("{}*{}", c.to_factor_string(), tau)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let s = fmt_tau_term(*k, c);
            if first {
                write!(f, "{}", s)?;
                first = false;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", s)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }
}
impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, o: Scalar) -> Scalar {
        self.add_assign_ref(&o);
        self
    }
}
impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.add_assign_ref(o);
    }
}
impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}
impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}
impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut r = Scalar::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                r.add_assign_ref(&Scalar::monomial(c1 * c2, k1 + k2));
            }
        }
        r
    }
}
impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl From<GaussianRational> for Scalar {
    fn from(c: GaussianRational) -> Self {
        Scalar::from_gr(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

/// Binomial coefficient as a rational.
pub fn binom(n: u32, k: u32) -> Q {
    if k > n {
        return Q::zero();
    }
    let mut r = BigInt::one();
    for j in 0..k {
        r = r * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    BigRational::from_integer(r)
}

/// n! as a rational.
pub fn factorial(n: u32) -> Q {
    let mut r = BigInt::one();
    for j in 2..=n {
        r *= BigInt::from(j);
    }
    BigRational::from_integer(r)
}

/// Greatest common divisor helper used by tests of reducedness.
pub fn is_reduced(x: &Q) -> bool {
    x.numer().gcd(x.denom()).is_one() && x.denom().is_positive()
}

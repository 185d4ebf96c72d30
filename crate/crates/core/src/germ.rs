//! Germs at 0 of regular holonomic distributions in one complex variable.
//!
//! A germ is a finite sum of moderate monomials `c * t^a * tb^b * u(alpha,p)`
//! with `u(alpha,p) = |t|^(-2(alpha+1)) (log|t|^2)^p / p!`, `-1 <= alpha < 0`,
//! plus a finite combination of `d_t^i d_tb^j delta`.
//!
//! Non-integrable monomials stand for the coefficient of `s^p` in the Laurent
//! expansion at `s = 0` of the meromorphic family `|t|^(2s) t^a tb^b |t|^(-2(alpha+1))`.
//! Derivatives then follow from `d_t (|t|^(2s) t^a tb^b) = (s + a) |t|^(2s) t^(a-1) tb^b`,
//! and the `s^-1` coefficient (a residue supported at the origin) is the only
//! source of delta terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{binom, factorial, split_fundamental, Cx, GaussianRational, Scalar};

/// Key of a moderate monomial; ordered by (alpha, p, a, b).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoKey {
    pub alpha: Cx,
    pub p: u32,
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMonomial {
    pub a: i64,
    pub b: i64,
    pub alpha: GaussianRational,
    pub p: u32,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaTerm {
    pub i: u32,
    pub j: u32,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Germ {
    moderate: BTreeMap<MonoKey, Scalar>,
    delta: BTreeMap<(u32, u32), Scalar>,
}

/// Which variable an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Holo,
    Antiholo,
}

fn minus_one() -> GaussianRational {
    GaussianRational::int(-1)
}

impl Germ {
    pub fn zero() -> Self {
        Germ::default()
    }

    pub fn is_zero(&self) -> bool {
        self.moderate.is_empty() && self.delta.is_empty()
    }

    /// `c * t^a tb^b u(alpha,p)`; alpha must already be in the fundamental domain.
    pub fn mono(a: i64, b: i64, alpha: GaussianRational, p: u32, c: Scalar) -> Self {
        assert!(
            crate::scalar::in_fundamental_domain(&alpha),
            "exponent {} outside [-1,0)",
            alpha
        );
        let mut g = Germ::zero();
        g.add_mono(MonoKey { alpha: Cx(alpha), p, a, b }, &c);
        g
    }

    /// `u(alpha,p)` with alpha in the fundamental domain.
    pub fn u(alpha: GaussianRational, p: u32) -> Self {
        Self::mono(0, 0, alpha, p, Scalar::one())
    }

    /// `c * d_t^i d_tb^j delta`.
    pub fn delta(i: u32, j: u32, c: Scalar) -> Self {
        let mut g = Germ::zero();
        g.add_delta((i, j), &c);
        g
    }

    /// The constant function 1 = u(-1,0).
    pub fn one() -> Self {
        Self::u(minus_one(), 0)
    }

    fn add_mono(&mut self, k: MonoKey, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.moderate.entry(k.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.moderate.remove(&k);
        }
    }

    fn add_delta(&mut self, k: (u32, u32), c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.delta.entry(k).or_default();
        *e += c;
        if e.is_zero() {
            self.delta.remove(&k);
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = ModMonomial> + '_ {
        self.moderate.iter().map(|(k, c)| ModMonomial {
            a: k.a,
            b: k.b,
            alpha: k.alpha.0.clone(),
            p: k.p,
            coeff: c.clone(),
        })
    }

    pub fn deltas(&self) -> impl Iterator<Item = DeltaTerm> + '_ {
        self.delta.iter().map(|((i, j), c)| DeltaTerm { i: *i, j: *j, coeff: c.clone() })
    }

    pub fn n_terms(&self) -> usize {
        self.moderate.len() + self.delta.len()
    }

    pub fn has_delta(&self) -> bool {
        !self.delta.is_empty()
    }

    /// Coefficient of `t^a tb^b u(alpha,p)`.
    pub fn mono_coeff(&self, a: i64, b: i64, alpha: &GaussianRational, p: u32) -> Scalar {
        let k = MonoKey { alpha: Cx(alpha.clone()), p, a, b };
        self.moderate.get(&k).cloned().unwrap_or_default()
    }

    /// Coefficient of `d_t^i d_tb^j delta`.
    pub fn delta_coeff(&self, i: u32, j: u32) -> Scalar {
        self.delta.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Germ {
        if c.is_zero() {
            return Germ::zero();
        }
        let mut g = Germ::zero();
        for (k, v) in &self.moderate {
            g.add_mono(k.clone(), &(v * c));
        }
        for (k, v) in &self.delta {
            g.add_delta(*k, &(v * c));
        }
        g
    }

    /// Keeps the terms accepted by the predicates.
    pub fn filter(
        &self,
        keep_mono: impl Fn(&ModMonomial) -> bool,
        keep_delta: impl Fn(&DeltaTerm) -> bool,
    ) -> Germ {
        let mut g = Germ::zero();
        for m in self.monomials() {
            if keep_mono(&m) {
                g.add_mono(MonoKey { alpha: Cx(m.alpha.clone()), p: m.p, a: m.a, b: m.b }, &m.coeff);
            }
        }
        for d in self.deltas() {
            if keep_delta(&d) {
                g.add_delta((d.i, d.j), &d.coeff);
            }
        }
        g
    }

    /// Image in the moderate model: drops the part supported at the origin.
    pub fn localize(&self) -> Germ {
        Germ { moderate: self.moderate.clone(), delta: BTreeMap::new() }
    }

    /// Part supported at the origin.
    pub fn delta_part(&self) -> Germ {
        Germ { moderate: BTreeMap::new(), delta: self.delta.clone() }
    }

    pub fn mul_t(&self) -> Germ {
        self.mul_var(Side::Holo)
    }

    pub fn mul_tbar(&self) -> Germ {
        self.mul_var(Side::Antiholo)
    }

    pub fn mul_var(&self, side: Side) -> Germ {
        let mut g = Germ::zero();
        for (k, c) in &self.moderate {
            let mut k = k.clone();
            match side {
                Side::Holo => k.a += 1,
                Side::Antiholo => k.b += 1,
            }
            g.add_mono(k, c);
        }
        for ((i, j), c) in &self.delta {
            // t * d^i delta = -i d^(i-1) delta
            match side {
                Side::Holo if *i > 0 => g.add_delta((i - 1, *j), &c.scale_gr(&GaussianRational::int(-(*i as i64)))),
                Side::Antiholo if *j > 0 => g.add_delta((*i, j - 1), &c.scale_gr(&GaussianRational::int(-(*j as i64)))),
                _ => {}
            }
        }
        g
    }

    /// Inverse of `mul_var` on moderate germs.
    pub fn div_var(&self, side: Side) -> Result<Germ> {
        if self.has_delta() {
            return Err(Error::Domain("division by t of a germ with delta part".into()));
        }
        let mut g = Germ::zero();
        for (k, c) in &self.moderate {
            let mut k = k.clone();
            match side {
                Side::Holo => k.a -= 1,
                Side::Antiholo => k.b -= 1,
            }
            g.add_mono(k, c);
        }
        Ok(g)
    }

    pub fn d_t(&self) -> Germ {
        self.deriv(Side::Holo, true)
    }

    pub fn d_tbar(&self) -> Germ {
        self.deriv(Side::Antiholo, true)
    }

    /// Derivative by the free monomial rule only (no delta corrections).
    pub fn d_free(&self, side: Side) -> Germ {
        self.deriv(side, false)
    }

    pub fn deriv(&self, side: Side, corrections: bool) -> Germ {
        let mut g = Germ::zero();
        for (k, c) in &self.moderate {
            let (e, other) = match side {
                Side::Holo => (k.a, k.b),
                Side::Antiholo => (k.b, k.a),
            };
            let alpha = &k.alpha.0;
            let shifted = |p: u32| {
                let mut k2 = MonoKey { alpha: k.alpha.clone(), p, a: k.a, b: k.b };
                match side {
                    Side::Holo => k2.a -= 1,
                    Side::Antiholo => k2.b -= 1,
                }
                k2
            };
            // (e - alpha - 1) * x^(e-1) ... u_p
            let lead = &(&GaussianRational::int(e) - alpha) - &GaussianRational::one();
            g.add_mono(shifted(k.p), &c.scale_gr(&lead));
            if k.p > 0 {
                g.add_mono(shifted(k.p - 1), c);
            } else if corrections && *alpha == minus_one() && e <= 0 && other <= -1 {
                // s^-1 coefficient of |t|^(2s) x^(e-1) y^other: residue supported at 0
                let (a1, b1) = match side {
                    Side::Holo => (e - 1, other),
                    Side::Antiholo => (other, e - 1),
                };
                let (i, j, r) = residue_delta(a1, b1);
                g.add_delta((i, j), &(c * &r));
            }
        }
        for ((i, j), c) in &self.delta {
            match side {
                Side::Holo => g.add_delta((i + 1, *j), c),
                Side::Antiholo => g.add_delta((*i, j + 1), c),
            }
        }
        g
    }

    /// `(d_x x + beta)` on the given side, where x is t or tb.
    pub fn euler(&self, side: Side, beta: &GaussianRational) -> Germ {
        let x = self.mul_var(side).deriv(side, true);
        &x + &self.scale(&Scalar::from_gr(beta.clone()))
    }

    /// Complex conjugation: swaps t and tb, conjugates exponents and coefficients.
    ///
    /// With `<delta, f dt^dtb> = f(0)` the delta current is imaginary (`dt^dtb` is), so
    /// `conj(d(i,j)) = -d(j,i)`; this is what keeps `-tau delta = d_t d_tb log|t|^2` real.
    pub fn conj(&self) -> Germ {
        let mut g = Germ::zero();
        for (k, c) in &self.moderate {
            let k2 = MonoKey { alpha: Cx(k.alpha.0.conj()), p: k.p, a: k.b, b: k.a };
            g.add_mono(k2, &c.conj());
        }
        for ((i, j), c) in &self.delta {
            g.add_delta((*j, *i), &-c.conj());
        }
        g
    }

    /// Product of moderate germs.
    pub fn mul(&self, o: &Germ) -> Result<Germ> {
        if self.has_delta() || o.has_delta() {
            return Err(Error::Domain("product with a germ supported at the origin is undefined".into()));
        }
        let mut g = Germ::zero();
        for (k1, c1) in &self.moderate {
            for (k2, c2) in &o.moderate {
                let beta = &(&k1.alpha.0 + &k2.alpha.0) + &GaussianRational::one();
                let p = k1.p + k2.p;
                let c = (c1 * c2).scale_gr(&GaussianRational::real(binom(p, k1.p)));
                let base = make_u(&beta, p as i64).expect("p is nonnegative");
                for (k, v) in &base.moderate {
                    let key = MonoKey { alpha: k.alpha.clone(), p, a: k.a + k1.a + k2.a, b: k.b + k1.b + k2.b };
                    g.add_mono(key, &(v * &c));
                }
            }
        }
        Ok(g)
    }

    /// Largest log-power appearing in the moderate part.
    pub fn max_log_power(&self) -> u32 {
        self.moderate.keys().map(|k| k.p).max().unwrap_or(0)
    }
}

/// `Res_{s=0} |t|^(2s) t^a tb^b` for `a, b <= -1`, as `(i, j, coefficient)` of `d_t^i d_tb^j delta`.
///
/// Pairing with `f dt^dtb` picks the Taylor coefficient `f_{IJ}` with `I = -a-1`, `J = -b-1`
/// and the radial integral gives `-tau * f_{IJ}`; since
/// `<d^I db^J delta, f> = (-1)^(I+J) I! J! f_{IJ}` the residue is
/// `-tau (-1)^(I+J) / (I! J!) d^I db^J delta`.
pub fn residue_delta(a: i64, b: i64) -> (u32, u32, Scalar) {
    assert!(a <= -1 && b <= -1);
    let i = (-a - 1) as u32;
    let j = (-b - 1) as u32;
    let sign = if (i + j) % 2 == 0 { -1 } else { 1 };
    let c = GaussianRational::real(crate::scalar::qi(sign) / (factorial(i) * factorial(j)));
    (i, j, Scalar::monomial(c, 1))
}

/// `u(beta,p)` written in the fundamental domain: `beta = alpha + m` gives `t^-m tb^-m u(alpha,p)`.
pub fn make_u(beta: &GaussianRational, p: i64) -> Result<Germ> {
    if p < 0 {
        return Err(Error::Domain(format!("negative log power {}", p)));
    }
    let (alpha, m) = split_fundamental(beta);
    Ok(Germ::mono(-m, -m, alpha, p as u32, Scalar::one()))
}

impl<'a> Add<&'a Germ> for &'a Germ {
    type Output = Germ;
    fn add(self, o: &Germ) -> Germ {
        let mut g = self.clone();
        for (k, c) in &o.moderate {
            g.add_mono(k.clone(), c);
        }
        for (k, c) in &o.delta {
            g.add_delta(*k, c);
        }
        g
    }
}
impl Add for Germ {
    type Output = Germ;
    fn add(self, o: Germ) -> Germ {
        &self + &o
    }
}
impl<'a> Sub<&'a Germ> for &'a Germ {
    type Output = Germ;
    fn sub(self, o: &Germ) -> Germ {
        self + &(-o)
    }
}
impl Sub for Germ {
    type Output = Germ;
    fn sub(self, o: Germ) -> Germ {
        &self - &o
    }
}
impl Neg for &Germ {
    type Output = Germ;
    fn neg(self) -> Germ {
        self.scale(&Scalar::int(-1))
    }
}
impl Neg for Germ {
    type Output = Germ;
    fn neg(self) -> Germ {
        -&self
    }
}

/// Sum of germs.
pub fn sum<'a>(it: impl IntoIterator<Item = &'a Germ>) -> Germ {
    let mut g = Germ::zero();
    for x in it {
        g = &g + x;
    }
    g
}

fn fmt_factors(out: &mut String, factors: &[String]) {
    out.push_str(&factors.join("*"));
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(Scalar, Vec<String>)> = Vec::new();
        for m in self.monomials() {
            let mut fs = Vec::new();
            if m.a != 0 {
                fs.push(format!("t^{}", m.a));
            }
            if m.b != 0 {
                fs.push(format!("tb^{}", m.b));
            }
            fs.push(format!("u({},{})", m.alpha, m.p));
            terms.push((m.coeff, fs));
        }
        for d in self.deltas() {
            terms.push((d.coeff, vec![format!("d({},{})", d.i, d.j)]));
        }
        let mut out = String::new();
        for (n, (c, fs)) in terms.iter().enumerate() {
            let (neg, pre) = c.factor_prefix();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if let Some(p) = pre {
                out.push_str(&p);
                out.push('*');
            }
            fmt_factors(&mut out, fs);
        }
        write!(f, "{}", out)
    }
}

/// Recursion used to certify the delta corrections of `d_tbar` on the integer lattice.
///
/// For `m = t^a tb^b u(-1,p)` with `a <= -1` the monomial is rewritten through
/// `d_t(t^(a+1) tb^b u_p) = (a+1) m + t^a tb^b u_(p-1) + C`, where `C` is the delta
/// correction of that derivative (for `a = -1` the shift `d_t(tb^b u_(p+1)) = m + C`
/// is used). Commuting `d_tbar` through `d_t` reduces to monomials with `a >= 0`,
/// whose `d_tbar` carries no correction. Only `d_t` of the kernel is used.
pub fn d_tbar_by_recursion(a: i64, b: i64, p: u32) -> Germ {
    let m1 = minus_one();
    let mono = |a: i64, b: i64, p: u32| Germ::mono(a, b, m1.clone(), p, Scalar::one());
    if a >= 0 {
        return mono(a, b, p).d_free(Side::Antiholo);
    }
    if a == -1 {
        let y = mono(0, b, p + 1);
        let corr = &y.d_t() - &y.d_free(Side::Holo);
        let inner = d_tbar_by_recursion(0, b, p + 1);
        return &inner.d_t() - &corr.d_tbar();
    }
    let x = mono(a + 1, b, p);
    let corr = &x.d_t() - &x.d_free(Side::Holo);
    let mut num = d_tbar_by_recursion(a + 1, b, p).d_t();
    if p > 0 {
        num = &num - &d_tbar_by_recursion(a, b, p - 1);
    }
    num = &num - &corr.d_tbar();
    let inv = GaussianRational::frac(1, a + 1);
    num.scale(&Scalar::from_gr(inv))
}

/// Mirror recursion: `d_tbar(m) = conj(d_t(conj m))`, with `d_t` on `t^a tb^b u(-1,p)`, `b <= -1`,
/// computed by peeling `b` through `d_tbar` factorizations (uses only `d_tbar` of the kernel).
pub fn d_tbar_by_mirror_recursion(a: i64, b: i64, p: u32) -> Germ {
    d_t_by_recursion(b, a, p).conj()
}

fn d_t_by_recursion(a: i64, b: i64, p: u32) -> Germ {
    let m1 = minus_one();
    let mono = |a: i64, b: i64, p: u32| Germ::mono(a, b, m1.clone(), p, Scalar::one());
    if b >= 0 {
        return mono(a, b, p).d_free(Side::Holo);
    }
    if b == -1 {
        let y = mono(a, 0, p + 1);
        let corr = &y.d_tbar() - &y.d_free(Side::Antiholo);
        let inner = d_t_by_recursion(a, 0, p + 1);
        return &inner.d_tbar() - &corr.d_t();
    }
    let x = mono(a, b + 1, p);
    let corr = &x.d_tbar() - &x.d_free(Side::Antiholo);
    let mut num = d_t_by_recursion(a, b + 1, p).d_tbar();
    if p > 0 {
        num = &num - &d_t_by_recursion(a, b, p - 1);
    }
    num = &num - &corr.d_t();
    let inv = GaussianRational::frac(1, b + 1);
    num.scale(&Scalar::from_gr(inv))
}

impl GaussianRational {
    /// True for the integer lattice exponent -1.
    pub fn is_minus_one(&self) -> bool {
        *self == minus_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> GaussianRational {
        GaussianRational::frac(-1, 2)
    }

    #[test]
    fn make_u_examples() {
        assert_eq!(make_u(&h(), 3).unwrap(), Germ::u(h(), 3));
        assert_eq!(
            make_u(&GaussianRational::frac(1, 2), 0).unwrap(),
            Germ::mono(-1, -1, h(), 0, Scalar::one())
        );
        assert_eq!(
            make_u(&GaussianRational::int(-2), 1).unwrap(),
            Germ::mono(1, 1, minus_one(), 1, Scalar::one())
        );
        assert!(make_u(&h(), -1).is_err());
    }

    #[test]
    fn delta_bridge() {
        let g = Germ::u(minus_one(), 1).d_tbar().d_t();
        assert_eq!(g, Germ::delta(0, 0, -Scalar::tau()));
        let g = Germ::mono(0, -1, minus_one(), 0, Scalar::one()).d_t();
        assert_eq!(g, Germ::delta(0, 0, -Scalar::tau()));
        let g = Germ::mono(-1, 0, minus_one(), 0, Scalar::one()).d_tbar();
        assert_eq!(g, Germ::delta(0, 0, -Scalar::tau()));
    }

    #[test]
    fn mul_t_on_delta() {
        assert_eq!(Germ::delta(1, 0, Scalar::one()).mul_t(), Germ::delta(0, 0, Scalar::int(-1)));
        assert!(Germ::delta(0, 0, Scalar::one()).mul_t().is_zero());
    }

    #[test]
    fn products() {
        let u = Germ::u(h(), 0);
        assert_eq!(u.mul(&u).unwrap(), Germ::mono(-1, -1, minus_one(), 0, Scalar::one()));
        let l = Germ::u(minus_one(), 1);
        assert_eq!(l.mul(&l).unwrap(), Germ::u(minus_one(), 2).scale(&Scalar::int(2)));
        assert_eq!(u.mul(&Germ::one()).unwrap(), u);
        assert!(Germ::delta(0, 0, Scalar::one()).mul(&u).is_err());
    }

    #[test]
    fn conj_examples() {
        let g = Germ::mono(1, 0, h(), 1, Scalar::one());
        assert_eq!(g.conj(), Germ::mono(0, 1, h(), 1, Scalar::one()));
        assert_eq!(Germ::delta(1, 0, Scalar::i()).conj(), Germ::delta(0, 1, Scalar::i()));
        assert_eq!(Germ::one().scale(&Scalar::tau()).conj(), Germ::one().scale(&-Scalar::tau()));
    }

    #[test]
    fn recursion_reproduces_base_identity() {
        assert_eq!(d_tbar_by_recursion(-1, 0, 0), Germ::delta(0, 0, -Scalar::tau()));
        for a in -3..=1 {
            for b in -3..=1 {
                for p in 0..3 {
                    let k = Germ::mono(a, b, minus_one(), p, Scalar::one()).d_tbar();
                    assert_eq!(d_tbar_by_recursion(a, b, p), k, "a={} b={} p={}", a, b, p);
                    assert_eq!(d_tbar_by_mirror_recursion(a, b, p), k, "mirror a={} b={} p={}", a, b, p);
                }
            }
        }
    }
}

//! V-bifiltration on germs, graded classes, the nilpotent operators on
//! graded pieces and the coefficient functionals `L_alpha`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::germ::{Germ, Side};
use crate::scalar::{cx_cmp, cx_floor, cx_le, cx_lt, GaussianRational, Scalar};

/// Pair of V-orders (holomorphic, antiholomorphic).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiOrder {
    pub aprime: GaussianRational,
    pub asecond: GaussianRational,
}

impl BiOrder {
    pub fn new(aprime: GaussianRational, asecond: GaussianRational) -> Self {
        BiOrder { aprime, asecond }
    }

    pub fn diag(a: GaussianRational) -> Self {
        BiOrder { aprime: a.clone(), asecond: a }
    }

    /// Componentwise `<=`.
    pub fn le(&self, o: &BiOrder) -> bool {
        cx_le(&self.aprime, &o.aprime) && cx_le(&self.asecond, &o.asecond)
    }

    fn join(&self, o: &BiOrder) -> BiOrder {
        let pick = |x: &GaussianRational, y: &GaussianRational| {
            if cx_cmp(x, y) == Ordering::Less { y.clone() } else { x.clone() }
        };
        BiOrder { aprime: pick(&self.aprime, &o.aprime), asecond: pick(&self.asecond, &o.asecond) }
    }
}

impl fmt::Display for BiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.aprime, self.asecond)
    }
}

/// Order of a single term of the germ.
fn term_orders(g: &Germ) -> Vec<BiOrder> {
    let mut v = Vec::with_capacity(g.n_terms());
    for m in g.monomials() {
        v.push(BiOrder {
            aprime: &m.alpha - &GaussianRational::int(m.a),
            asecond: &m.alpha - &GaussianRational::int(m.b),
        });
    }
    for d in g.deltas() {
        v.push(BiOrder { aprime: GaussianRational::int(d.i as i64), asecond: GaussianRational::int(d.j as i64) });
    }
    v
}

/// Bi-order of a nonzero germ: componentwise maximum of its term orders.
pub fn v_orders(g: &Germ) -> Result<BiOrder> {
    term_orders(g)
        .into_iter()
        .reduce(|x, y| x.join(&y))
        .ok_or_else(|| Error::Domain("the zero germ has order -infinity".into()))
}

/// Membership in `V_{o}`; the zero germ belongs to every step.
pub fn in_v(g: &Germ, o: &BiOrder) -> bool {
    term_orders(g).iter().all(|t| t.le(o))
}

/// Membership in `V_{<a',a''} + V_{a',<a''}` (inside `V_{a',a''}`).
pub fn in_open_sum(g: &Germ, o: &BiOrder) -> bool {
    term_orders(g).iter().all(|t| t.le(o) && t != o)
}

/// Membership in `V_{a',a''}` read off the monomial exponents:
/// `a >= -floor(a' - alpha)` and `b >= -floor(a'' - alpha)`; delta terms by their order.
pub fn in_v_by_exponents(g: &Germ, o: &BiOrder) -> bool {
    g.monomials().all(|m| {
        m.a >= -cx_floor(&(&o.aprime - &m.alpha)) && m.b >= -cx_floor(&(&o.asecond - &m.alpha))
    }) && g.deltas().all(|d| {
        cx_le(&GaussianRational::int(d.i as i64), &o.aprime) && cx_le(&GaussianRational::int(d.j as i64), &o.asecond)
    })
}

/// Representative of the class of `g` in `gr_{o}`: the terms of order exactly `o`.
pub fn graded_class(g: &Germ, o: &BiOrder) -> Result<Germ> {
    if !in_v(g, o) {
        return Err(Error::Precondition(format!("germ order exceeds {}", o)));
    }
    let keep_m = |m: &crate::germ::ModMonomial| {
        &m.alpha - &GaussianRational::int(m.a) == o.aprime && &m.alpha - &GaussianRational::int(m.b) == o.asecond
    };
    let keep_d = |d: &crate::germ::DeltaTerm| {
        GaussianRational::int(d.i as i64) == o.aprime && GaussianRational::int(d.j as i64) == o.asecond
    };
    Ok(g.filter(keep_m, keep_d))
}

/// `-(d_t t + alpha)` (holo) or `-(d_tb tb + alpha)` (antiholo) on `V_{alpha,alpha}`.
pub fn nilpotent_n(g: &Germ, alpha: &GaussianRational, side: Side) -> Result<Germ> {
    if !in_v(g, &BiOrder::diag(alpha.clone())) {
        return Err(Error::Precondition(format!("germ not in V_({0},{0})", alpha)));
    }
    Ok(-g.euler(side, alpha))
}

/// The functional `L_alpha` for `-1 <= alpha <= 0`.
///
/// For `alpha < 0` it is `tau` times the coefficient of `u(alpha,0)`; for `alpha = 0`
/// it is the coefficient of `delta`. Germs outside `V_{alpha,alpha}` give 0.
pub fn l_alpha(g: &Germ, alpha: &GaussianRational) -> Result<Scalar> {
    let zero = GaussianRational::zero();
    if cx_lt(alpha, &GaussianRational::int(-1)) || cx_lt(&zero, alpha) {
        return Err(Error::Domain(format!("L_alpha needs -1 <= alpha <= 0, got {}", alpha)));
    }
    if !in_v(g, &BiOrder::diag(alpha.clone())) {
        return Ok(Scalar::zero());
    }
    if alpha.is_zero() {
        Ok(g.delta_coeff(0, 0))
    } else {
        Ok(g.mono_coeff(0, 0, alpha, 0).mul_tau(1))
    }
}

/// Smallest `k <= kmax` with `(d_x x + beta)^k g` strictly below `beta` on that side
/// (and not above `other` on the other side).
pub fn euler_drop_witness(g: &Germ, side: Side, beta: &GaussianRational, other: &GaussianRational, kmax: usize) -> Option<usize> {
    let mut h = g.clone();
    for k in 0..=kmax {
        let ok = term_orders(&h).iter().all(|t| {
            let (mine, theirs) = match side {
                Side::Holo => (&t.aprime, &t.asecond),
                Side::Antiholo => (&t.asecond, &t.aprime),
            };
            cx_lt(mine, beta) && cx_le(theirs, other)
        });
        if ok {
            return Some(k);
        }
        h = h.euler(side, beta);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn h() -> G {
        G::frac(-1, 2)
    }

    #[test]
    fn orders_examples() {
        assert_eq!(v_orders(&Germ::u(h(), 3)).unwrap(), BiOrder::diag(h()));
        let g = Germ::mono(-2, 1, h(), 0, Scalar::one());
        assert_eq!(v_orders(&g).unwrap(), BiOrder::new(G::frac(3, 2), G::frac(-3, 2)));
        assert_eq!(v_orders(&Germ::delta(1, 0, Scalar::one())).unwrap(), BiOrder::new(G::int(1), G::int(0)));
        assert!(v_orders(&Germ::zero()).is_err());
    }

    #[test]
    fn class_examples() {
        let g = &Germ::u(h(), 2) + &Germ::mono(1, 0, h(), 5, Scalar::one());
        assert_eq!(graded_class(&g, &BiOrder::diag(h())).unwrap(), Germ::u(h(), 2));
        let m1 = G::int(-1);
        let g = &Germ::delta(0, 0, Scalar::one()) + &Germ::mono(-1, -1, m1.clone(), 0, Scalar::one());
        assert_eq!(graded_class(&g, &BiOrder::diag(G::zero())).unwrap(), g);
        let g = Germ::mono(1, 0, m1.clone(), 0, Scalar::one());
        assert!(graded_class(&g, &BiOrder::diag(G::int(-2))).is_err());
        assert_eq!(graded_class(&g, &BiOrder::new(G::int(-2), G::int(-1))).unwrap(), g);
    }

    #[test]
    fn l_examples() {
        let g = Germ::u(h(), 0).scale(&Scalar::int(3));
        assert_eq!(l_alpha(&g, &h()).unwrap(), Scalar::tau().scale_gr(&G::int(3)));
        assert_eq!(l_alpha(&Germ::delta(0, 0, Scalar::one()), &G::zero()).unwrap(), Scalar::one());
        let g = Germ::mono(1, 0, G::int(-1), 0, Scalar::one());
        assert!(l_alpha(&g, &G::int(-1)).unwrap().is_zero());
        assert!(l_alpha(&g, &G::frac(1, 2)).is_err());
    }

    #[test]
    fn nilpotent_examples() {
        for p in 0..4 {
            let n = nilpotent_n(&Germ::u(h(), p), &h(), Side::Holo).unwrap();
            let want = if p == 0 { Germ::zero() } else { -Germ::u(h(), p - 1) };
            assert_eq!(n, want);
        }
    }
}

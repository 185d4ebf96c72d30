//! Mellin transforms `J^(k',k'')(s) = <u, t^k' tb^k'' |t|^(2s) dt^dtb>` of germs, kept
//! as principal parts modulo entire functions.
//!
//! With a radial cutoff, a monomial `c t^a tb^b u(alpha,p)` only survives the angular
//! integral when `a + k' = b + k''`, and then
//! `-2i * 2pi * int_0^1 r^(2(s - s0)) (2 log r)^p / p! dr/r * 1/2`
//! equals `c * tau * (-1)^(p+1) / (s - s0)^(p+1)` with `s0 = alpha - a - k'`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::germ::Germ;
use crate::scalar::{cx_le, cx_lt, Cx, GaussianRational, Scalar};
use crate::vfilt::{in_v, l_alpha, BiOrder};

/// Principal parts: pole location -> coefficients of `(s - s0)^-m` for `m = 1..=order`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PoleLedger {
    entries: BTreeMap<Cx, Vec<Scalar>>,
}

impl PoleLedger {
    pub fn new() -> Self {
        PoleLedger::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `c / (s - s0)^m`.
    pub fn add_term(&mut self, s0: &GaussianRational, m: usize, c: &Scalar) {
        assert!(m >= 1);
        let e = self.entries.entry(Cx(s0.clone())).or_default();
        if e.len() < m {
            e.resize(m, Scalar::zero());
        }
        e[m - 1] += c;
        while e.last().map_or(false, |x| x.is_zero()) {
            e.pop();
        }
        if e.is_empty() {
            self.entries.remove(&Cx(s0.clone()));
        }
    }

    pub fn add(&self, o: &PoleLedger) -> PoleLedger {
        let mut r = self.clone();
        for (s0, cs) in &o.entries {
            for (m, c) in cs.iter().enumerate() {
                r.add_term(&s0.0, m + 1, c);
            }
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> PoleLedger {
        let mut r = PoleLedger::new();
        for (s0, cs) in &self.entries {
            for (m, x) in cs.iter().enumerate() {
                r.add_term(&s0.0, m + 1, &(x * c));
            }
        }
        r
    }

    /// Ledger of `s -> J(s + c)`: every pole moves from `s0` to `s0 - c`.
    pub fn shift_arg(&self, c: &GaussianRational) -> PoleLedger {
        PoleLedger {
            entries: self.entries.iter().map(|(s0, v)| (Cx(&s0.0 - c), v.clone())).collect(),
        }
    }

    /// Ledger of `s -> -conj(J(conj s))`.
    pub fn conj(&self) -> PoleLedger {
        PoleLedger {
            entries: self
                .entries
                .iter()
                .map(|(s0, v)| (Cx(s0.0.conj()), v.iter().map(|c| -c.conj()).collect()))
                .collect(),
        }
    }

    pub fn poles(&self) -> impl Iterator<Item = (&GaussianRational, &[Scalar])> {
        self.entries.iter().map(|(k, v)| (&k.0, v.as_slice()))
    }

    pub fn order_at(&self, s0: &GaussianRational) -> usize {
        self.entries.get(&Cx(s0.clone())).map_or(0, |v| v.len())
    }

    /// Coefficient of `(s - s0)^-m`.
    pub fn coeff(&self, s0: &GaussianRational, m: usize) -> Scalar {
        self.entries
            .get(&Cx(s0.clone()))
            .and_then(|v| v.get(m - 1).cloned())
            .unwrap_or_default()
    }

    pub fn residue(&self, s0: &GaussianRational) -> Scalar {
        self.coeff(s0, 1)
    }

    pub fn max_order(&self) -> usize {
        self.entries.values().map(|v| v.len()).max().unwrap_or(0)
    }

    /// Keeps the poles with `lo <= Re s0 < hi`.
    pub fn window(&self, lo: &GaussianRational, hi: &GaussianRational) -> PoleLedger {
        PoleLedger {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.0.re >= lo.re && k.0.re < hi.re)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for PoleLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return writeln!(f, "(no poles)");
        }
        for (s0, cs) in &self.entries {
            let list: Vec<String> = cs.iter().rev().map(|c| c.to_string()).collect();
            writeln!(f, "s0 = {} order = {} : {}", s0.0, cs.len(), list.join(", "))?;
        }
        Ok(())
    }
}

/// Pole ledger of `J_g^(k',k'')`; delta terms contribute nothing.
pub fn mellin_ledger(g: &Germ, kprime: i64, ksecond: i64) -> PoleLedger {
    let mut l = PoleLedger::new();
    for m in g.monomials() {
        if m.a + kprime != m.b + ksecond {
            continue;
        }
        let s0 = &m.alpha - &GaussianRational::int(m.a + kprime);
        let sign = if (m.p + 1) % 2 == 0 { 1 } else { -1 };
        let c = m.coeff.mul_tau(1).scale_gr(&GaussianRational::int(sign));
        l.add_term(&s0, m.p as usize + 1, &c);
    }
    l
}

/// Checks `J^(k',k'')(s) = J^(k'-k'',0)(s + k'')`.
pub fn shift_identity_check(g: &Germ, kprime: i64, ksecond: i64) -> Result<bool> {
    if kprime < ksecond {
        return Err(Error::Precondition("shift identity needs k' >= k''".into()));
    }
    let lhs = mellin_ledger(g, kprime, ksecond);
    let rhs = mellin_ledger(g, kprime - ksecond, 0).shift_arg(&GaussianRational::int(ksecond));
    Ok(lhs == rhs)
}

/// Range of `k'` (with `k'' = 0`, and mirrored) that sees every monomial of `g`.
pub fn mellin_k_range(g: &Germ) -> i64 {
    let a = g.monomials().map(|m| m.a.abs().max(m.b.abs())).max().unwrap_or(0);
    2 * a + 1
}

/// Mellin criterion for `localize(g)` in `V_{a',a''}`: all poles of `J^(k',k'')`
/// lie at or below `min(a' - k', a'' - k'')`.
pub fn vorder_from_mellin(g: &Germ, aprime: &GaussianRational, asecond: &GaussianRational) -> bool {
    let r = mellin_k_range(g);
    let check = |kp: i64, ks: i64| {
        let b1 = aprime - &GaussianRational::int(kp);
        let b2 = asecond - &GaussianRational::int(ks);
        let bound = if cx_le(&b1, &b2) { b1 } else { b2 };
        mellin_ledger(g, kp, ks).poles().all(|(s0, _)| cx_le(s0, &bound))
    };
    (-r..=r).all(|k| check(k, 0) && check(0, k))
}

/// `(L_alpha(g), Res_{s=alpha} J_g^(0,0))`.
pub fn residue_vs_l(g: &Germ, alpha: &GaussianRational) -> Result<(Scalar, Scalar)> {
    if cx_lt(alpha, &GaussianRational::int(-1)) || !cx_lt(alpha, &GaussianRational::zero()) {
        return Err(Error::Domain(format!("residue comparison needs -1 <= alpha < 0, got {}", alpha)));
    }
    if !in_v(g, &BiOrder::diag(alpha.clone())) {
        return Err(Error::Precondition(format!("germ not in V_({0},{0})", alpha)));
    }
    let l = l_alpha(g, alpha)?;
    let r = mellin_ledger(g, 0, 0).residue(alpha);
    Ok((l, r))
}

/// Ratio `L / Res` when both are nonzero multiples of the same power of tau.
pub fn star_ratio(l: &Scalar, r: &Scalar) -> Option<GaussianRational> {
    let rl = r.as_tau_multiple(1)?;
    let ll = l.as_tau_multiple(1)?;
    if rl.is_zero() {
        return None;
    }
    Some(&ll / &rl)
}

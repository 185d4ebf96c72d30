//! Poles of `I(s) = int |f|^(2s) phi` for monomial `f = prod x_i^(m_i)` and product
//! test forms, compared with the monodromy filtration of bundled nearby-cycle data.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mellin::PoleLedger;
use crate::nilalg::{image_space, kernel_space, Mat};
use crate::quiver::VGradedModule;
use crate::scalar::{Cx, GaussianRational as G, Scalar};

/// `f = prod x_i^(m_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    pub exps: Vec<u32>,
}

impl MonomialMap {
    pub fn new(exps: Vec<u32>) -> Result<Self> {
        if exps.is_empty() || exps.contains(&0) {
            return Err(Error::Domain("monomial exponents must be positive".into()));
        }
        Ok(MonomialMap { exps })
    }

    /// Parses `x`, `x^2*y`, `x*y*z`, `x1^2*x2` style monomials.
    pub fn parse(s: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut exps: Vec<u32> = Vec::new();
        for part in s.split('*').map(str::trim) {
            let (name, e) = match part.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<u32>().map_err(|_| Error::Domain(format!("bad exponent in '{}'", part)))?),
                None => (part, 1),
            };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(Error::Domain(format!("bad variable '{}'", part)));
            }
            match names.iter().position(|n| n == name) {
                Some(i) => exps[i] += e,
                None => {
                    names.push(name.to_string());
                    exps.push(e);
                }
            }
        }
        MonomialMap::new(exps)
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }
}

impl fmt::Display for MonomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let v = NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("x{}", i + 1));
                if *e == 1 { v } else { format!("{}^{}", v, e) }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Product form `prod_i x_i^a_i xb_i^b_i (sum_{k <= R_i} |x_i|^(2k))` on the unit polydisc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTestForm {
    pub vars: Vec<(i64, i64)>,
    pub radial_degree: Vec<u32>,
}

impl ProductTestForm {
    /// Radial degrees `R_i = K m_i - 1`, enough to see every pole in `[-K, 0)`.
    pub fn for_window(f: &MonomialMap, vars: Vec<(i64, i64)>, window: u32) -> Result<Self> {
        if vars.len() != f.n() {
            return Err(Error::Shape(format!("{} exponent pairs for {} variables", vars.len(), f.n())));
        }
        if vars.iter().any(|(a, b)| *a < 0 || *b < 0) {
            return Err(Error::Domain("test form exponents must be nonnegative".into()));
        }
        let radial_degree = f.exps.iter().map(|m| (window * m).saturating_sub(1)).collect();
        Ok(ProductTestForm { vars, radial_degree })
    }

    pub fn radial(f: &MonomialMap, a: &[i64], window: u32) -> Result<Self> {
        ProductTestForm::for_window(f, a.iter().map(|x| (*x, *x)).collect(), window)
    }
}

/// One factor `sum_k c_k / (m s + beta_k)`.
#[derive(Clone, Debug)]
struct Factor {
    m: i64,
    terms: Vec<(G, Scalar)>,
}

impl Factor {
    /// `int_{|x|<1} |x|^(2ms) x^a xb^b |x|^(2k) dx^dxb = -tau / (m s + a + k + 1)` when `a = b`.
    fn new(m: u32, a: i64, b: i64, degree: u32) -> Factor {
        let terms = if a != b {
            vec![]
        } else {
            (0..=degree as i64).map(|k| (G::int(a + k + 1), -Scalar::tau())).collect()
        };
        Factor { m: m as i64, terms }
    }

    fn poles(&self) -> Vec<G> {
        self.terms.iter().map(|(beta, _)| -&(beta / &G::int(self.m))).collect()
    }

    /// Laurent coefficients at `s0` of orders `-1 ..= top` (index 0 is order -1).
    fn laurent(&self, s0: &G, top: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); top + 2];
        let m = G::int(self.m);
        for (beta, c) in &self.terms {
            let d = &(&m * s0) + beta;
            if d.is_zero() {
                out[0] += &c.scale_gr(&m.inv());
            } else {
                // c / (d + m (s - s0)) = (c/d) sum_n (-m/d)^n (s - s0)^n
                let r = -&(&m / &d);
                let mut w = d.inv();
                for slot in out.iter_mut().skip(1) {
                    *slot += &c.scale_gr(&w);
                    w = &w * &r;
                }
            }
        }
        out
    }
}

/// Pole ledger of `prod_i J_i(m_i s)` (exact: every factor is a rational function).
pub fn i_ledger(f: &MonomialMap, phi: &ProductTestForm) -> Result<PoleLedger> {
    if phi.vars.len() != f.n() || phi.radial_degree.len() != f.n() {
        return Err(Error::Shape("test form does not match the number of variables".into()));
    }
    let factors: Vec<Factor> = f
        .exps
        .iter()
        .zip(&phi.vars)
        .zip(&phi.radial_degree)
        .map(|((m, (a, b)), r)| Factor::new(*m, *a, *b, *r))
        .collect();
    let mut ledger = PoleLedger::new();
    if factors.iter().any(|x| x.terms.is_empty()) {
        return Ok(ledger);
    }
    let n = factors.len();
    let cands: BTreeSet<Cx> = factors.iter().flat_map(|x| x.poles()).map(Cx).collect();
    for s0 in cands {
        // product of Laurent series, each starting at order -1; keep orders -n..=-1
        let mut acc: Vec<Scalar> = vec![Scalar::one()];
        let mut low = 0i64;
        for fac in &factors {
            let ser = fac.laurent(&s0.0, n);
            let mut next = vec![Scalar::zero(); acc.len() + ser.len() - 1];
            for (i, x) in acc.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in ser.iter().enumerate() {
                    if !y.is_zero() {
                        next[i + j] += &(x * y);
                    }
                }
            }
            acc = next;
            low -= 1;
        }
        for (idx, c) in acc.iter().enumerate() {
            let order = low + idx as i64;
            if order < 0 && !c.is_zero() {
                ledger.add_term(&s0.0, (-order) as usize, c);
            }
        }
    }
    Ok(ledger)
}

/// Poles with `-K <= Re s0 < 0`.
pub fn windowed(l: &PoleLedger, window: u32) -> PoleLedger {
    l.window(&G::int(-(window as i64)), &G::zero())
}

/// Lower bound for the pole order along `alpha - N`: one more than the top
/// nonzero graded index of the monodromy filtration (0 for the zero space).
pub fn predicted_order(m: &VGradedModule, alpha: &G) -> Result<usize> {
    let n = m.psi_n(alpha);
    if n.rows() == 0 {
        return Ok(0);
    }
    Ok(n.nilpotency_index()? + 1)
}

/// `a_i, b_i -> a_i + k m_i, b_i + k m_i`, so that `I_new(s) = I_old(s + k)`.
pub fn pole_shift_witness(f: &MonomialMap, phi: &ProductTestForm, k: u32) -> Result<ProductTestForm> {
    if k == 0 {
        return Err(Error::Domain("shift must be a positive integer".into()));
    }
    if phi.vars.len() != f.n() {
        return Err(Error::Shape("test form does not match the number of variables".into()));
    }
    let vars = phi
        .vars
        .iter()
        .zip(&f.exps)
        .map(|((a, b), m)| (a + (k * m) as i64, b + (k * m) as i64))
        .collect();
    Ok(ProductTestForm { vars, radial_degree: phi.radial_degree.clone() })
}

/// Result of the tangling test on `c : Psi -> Phi`, `v : Phi -> Psi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangling {
    pub tangled: bool,
    pub dim_ker_v: usize,
    pub dim_coker_c: usize,
}

/// The induced map `ker v -> Phi -> coker c` is an isomorphism iff the dimensions
/// agree and `ker v` meets `im c` trivially.
pub fn detect_tangling(c: &Mat, v: &Mat) -> Result<Tangling> {
    if c.rows() != v.cols() || c.cols() != v.rows() {
        return Err(Error::Shape(format!(
            "c is {}x{} and v is {}x{}; expected Psi -> Phi and Phi -> Psi",
            c.rows(),
            c.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let ker_v = kernel_space(v);
    let im_c = image_space(c);
    let dim_coker_c = c.rows() - im_c.dim();
    let iso = ker_v.dim() == dim_coker_c && ker_v.intersect(&im_c).dim() == 0;
    Ok(Tangling { tangled: !iso, dim_ker_v: ker_v.dim(), dim_coker_c })
}

/// Bundled normal-crossing data: `f`, and for each `alpha` the nilpotent on `psi_f`.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub f: MonomialMap,
    pub module: VGradedModule,
}

pub fn fixtures() -> Vec<Fixture> {
    let z = |n| Mat::zeros(n, n);
    let m1 = G::int(-1);
    let h = G::frac(-1, 2);
    let one = |a: G, n: Mat| VGradedModule::single(a, n);
    let two = |a: (G, Mat), b: (G, Mat)| {
        let mut m = VGradedModule::single(a.0, a.1);
        m.psi.insert(Cx(b.0), b.1);
        m
    };
    vec![
        Fixture { name: "x", f: MonomialMap::new(vec![1]).unwrap(), module: one(m1.clone(), z(1)) },
        Fixture {
            name: "x^2",
            f: MonomialMap::new(vec![2]).unwrap(),
            module: two((m1.clone(), z(1)), (h.clone(), z(1))),
        },
        Fixture { name: "x*y", f: MonomialMap::new(vec![1, 1]).unwrap(), module: one(m1.clone(), Mat::jordan_block(2)) },
        Fixture {
            name: "x^2*y",
            f: MonomialMap::new(vec![2, 1]).unwrap(),
            module: two((m1, Mat::jordan_block(2)), (h, z(1))),
        },
    ]
}

/// Exponent pairs `a_i = b_i <= amax` for every variable.
pub fn radial_family(f: &MonomialMap, amax: i64, window: u32) -> Vec<ProductTestForm> {
    let mut out = vec![vec![]];
    for _ in 0..f.n() {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| (0..=amax).map(move |a| {
                let mut w = v.clone();
                w.push(a);
                w
            }))
            .collect();
    }
    out.iter().map(|a| ProductTestForm::radial(f, a, window).unwrap()).collect()
}

/// Largest pole order seen along `alpha - N` inside the window, over a family.
pub fn max_order_along(f: &MonomialMap, family: &[ProductTestForm], alpha: &G, window: u32) -> Result<usize> {
    let mut best = 0;
    for phi in family {
        let l = windowed(&i_ledger(f, phi)?, window);
        for (s0, cs) in l.poles() {
            if (s0 - alpha).as_int().is_some() {
                best = best.max(cs.len());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn one_variable() {
        let f = MonomialMap::parse("x").unwrap();
        let l = windowed(&i_ledger(&f, &ProductTestForm::radial(&f, &[0], 5).unwrap()).unwrap(), 5);
        let poles: Vec<_> = l.poles().map(|(s, c)| (s.clone(), c.len())).collect();
        assert_eq!(poles.len(), 5);
        assert!(poles.iter().all(|(s, o)| *o == 1 && s.as_int().is_some()));
        assert_eq!(l.residue(&G::int(-1)), -Scalar::tau());

        let f2 = MonomialMap::parse("x^2").unwrap();
        let l = windowed(&i_ledger(&f2, &ProductTestForm::radial(&f2, &[0], 5).unwrap()).unwrap(), 5);
        assert_eq!(l.poles().count(), 10);
        assert_eq!(l.order_at(&G::frac(-1, 2)), 1);
    }

    #[test]
    fn normal_crossing() {
        let f = MonomialMap::parse("x*y").unwrap();
        let phi = ProductTestForm::radial(&f, &[0, 0], 5).unwrap();
        let l = i_ledger(&f, &phi).unwrap();
        assert_eq!(l.order_at(&G::int(-1)), 2);
        assert_eq!(l.coeff(&G::int(-1), 2), Scalar::tau_pow(2));
        let sh = pole_shift_witness(&f, &phi, 2).unwrap();
        let l2 = i_ledger(&f, &sh).unwrap();
        assert_eq!(l2.order_at(&G::int(-3)), 2);
        assert_eq!(l2, l.shift_arg(&G::int(2)));
        assert!(pole_shift_witness(&f, &phi, 0).is_err());
        let off = ProductTestForm::for_window(&f, vec![(1, 0), (0, 0)], 5).unwrap();
        assert!(i_ledger(&f, &off).unwrap().is_empty());
    }

    #[test]
    fn tangling_examples() {
        let c = Mat::diag(&[G::one(), G::zero()]);
        let v = Mat::diag(&[G::zero(), G::one()]);
        assert!(detect_tangling(&c, &v).unwrap().tangled);
        let t = detect_tangling(&Mat::identity(2), &Mat::jordan_block(2)).unwrap();
        assert!(t.tangled);
        assert_eq!((t.dim_ker_v, t.dim_coker_c), (1, 0));
        assert!(!detect_tangling(&Mat::identity(2), &Mat::identity(2)).unwrap().tangled);
        assert!(detect_tangling(&Mat::identity(2), &Mat::identity(3)).is_err());
    }

    #[test]
    fn fixture_orders() {
        for fx in fixtures() {
            let fam = radial_family(&fx.f, 2, 5);
            for a in fx.module.alphas() {
                let pred = predicted_order(&fx.module, &a).unwrap();
                let seen = max_order_along(&fx.f, &fam, &a, 5).unwrap();
                assert_eq!(pred, seen, "{} at {}", fx.name, a);
            }
        }
        assert_eq!(predicted_order(&VGradedModule::zero(), &G::int(-1)).unwrap(), 0);
    }
}

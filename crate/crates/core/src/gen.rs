//! Seeded random instances for property checks.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::germ::Germ;
use crate::nilalg::{jordan_matrix, Mat};
use crate::quiver::{colocalize, localize, VGradedModule};
use crate::scalar::{Cx, GaussianRational as G, Scalar};
use crate::sesqui::{constraint_basis, realize, DistPairing, PairingData};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exponents used throughout the test suites.
pub fn alpha_set() -> Vec<G> {
    vec![G::int(-1), G::frac(-3, 4), G::frac(-1, 2), G::frac(-1, 3)]
}

pub fn small_q(r: &mut Rng8) -> G {
    G::frac(r.gen_range(-4..=4), r.gen_range(1..=3))
}

pub fn gr(r: &mut Rng8) -> G {
    let re = small_q(r);
    if r.gen_bool(0.3) {
        &re + &(&small_q(r) * &G::i())
    } else {
        re
    }
}

pub fn nonzero_gr(r: &mut Rng8) -> G {
    loop {
        let x = gr(r);
        if !x.is_zero() {
            return x;
        }
    }
}

/// One to two powers of tau with small coefficients.
pub fn scalar(r: &mut Rng8) -> Scalar {
    let mut s = Scalar::zero();
    for _ in 0..r.gen_range(1..=2) {
        s = &s + &Scalar::monomial(nonzero_gr(r), r.gen_range(-1..=1));
    }
    s
}

/// Exponent in the fundamental domain, occasionally with an imaginary part.
pub fn alpha(r: &mut Rng8) -> G {
    let mut a = alpha_set().choose(r).unwrap().clone();
    if r.gen_bool(0.15) {
        a = &a + &(&G::frac(r.gen_range(-2..=2), 2) * &G::i());
    }
    a
}

#[derive(Clone, Debug)]
pub struct GermShape {
    pub max_terms: usize,
    pub exp: i64,
    pub max_p: u32,
    pub deltas: bool,
    pub lattice_only: bool,
}

impl Default for GermShape {
    fn default() -> Self {
        GermShape { max_terms: 4, exp: 3, max_p: 3, deltas: true, lattice_only: false }
    }
}

/// Nonzero random germ of the given shape.
pub fn germ_with(r: &mut Rng8, sh: &GermShape) -> Germ {
    loop {
        let g = germ_once(r, sh);
        if !g.is_zero() {
            return g;
        }
    }
}

fn germ_once(r: &mut Rng8, sh: &GermShape) -> Germ {
    let mut g = Germ::zero();
    let n = r.gen_range(1..=sh.max_terms);
    for _ in 0..n {
        if sh.deltas && r.gen_bool(0.2) {
            g = &g + &Germ::delta(r.gen_range(0..=2), r.gen_range(0..=2), scalar(r));
            continue;
        }
        let al = if sh.lattice_only { G::int(-1) } else { alpha(r) };
        g = &g + &Germ::mono(
            r.gen_range(-sh.exp..=sh.exp),
            r.gen_range(-sh.exp..=sh.exp),
            al,
            r.gen_range(0..=sh.max_p),
            scalar(r),
        );
    }
    g
}

pub fn germ(r: &mut Rng8) -> Germ {
    germ_with(r, &GermShape::default())
}

/// Moderate germ (no delta part).
pub fn moderate_germ(r: &mut Rng8) -> Germ {
    germ_with(r, &GermShape { deltas: false, ..Default::default() })
}

/// Integer-lattice germ, where delta corrections occur.
pub fn lattice_germ(r: &mut Rng8) -> Germ {
    germ_with(r, &GermShape { lattice_only: true, ..Default::default() })
}

/// Nonzero germ supported on a single exponent.
pub fn germ_at(r: &mut Rng8, al: &G, exp: i64, max_p: u32) -> Germ {
    loop {
        let mut g = Germ::zero();
        for _ in 0..r.gen_range(1..=4) {
            g = &g + &Germ::mono(r.gen_range(-exp..=exp), r.gen_range(-exp..=exp), al.clone(), r.gen_range(0..=max_p), scalar(r));
        }
        if !g.is_zero() {
            return g;
        }
    }
}

pub fn partition(r: &mut Rng8, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = r.gen_range(1..=left);
        out.push(s);
        left -= s;
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Invertible matrix with small integer entries (product of unitriangular factors
/// and a permutation).
pub fn invertible(r: &mut Rng8, n: usize) -> Mat {
    let mut lo = Mat::identity(n);
    let mut up = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            lo[(i, j)] = G::int(r.gen_range(-1..=1));
            up[(j, i)] = G::int(r.gen_range(-1..=1));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let mut p = Mat::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = G::one();
    }
    &(&lo * &up) * &p
}

/// Random nilpotent of dimension `n` together with its Jordan type.
pub fn nilpotent(r: &mut Rng8, n: usize) -> (Mat, Vec<usize>) {
    let blocks = partition(r, n);
    let j = jordan_matrix(&blocks);
    let g = invertible(r, n);
    let gi = g.inverse().expect("unitriangular product is invertible");
    (&(&g * &j) * &gi, blocks)
}

/// Random quiver module with total dimension at most `max_dim`, assembled from
/// localized, colocalized, origin-supported and psi-only pieces, then conjugated.
pub fn module(r: &mut Rng8, max_dim: usize) -> VGradedModule {
    module_in(r, max_dim, true)
}

/// As `module`; with `complex = false` every exponent comes from `alpha_set`.
pub fn module_in(r: &mut Rng8, max_dim: usize, complex: bool) -> VGradedModule {
    let mut m = VGradedModule::zero();
    let mut budget = r.gen_range(1..=max_dim.max(1));
    while budget > 0 {
        let d = r.gen_range(1..=budget.min(3));
        let kind = r.gen_range(0..4);
        let piece = match kind {
            0 | 1 => {
                let (n, _) = nilpotent(r, d);
                let s = VGradedModule::single(G::int(-1), n);
                if kind == 0 { localize(&s) } else { colocalize(&s) }
            }
            2 => VGradedModule {
                psi: Default::default(),
                phi: Mat::zeros(1, 1),
                can: Mat::zeros(1, 0),
                var: Mat::zeros(0, 1),
            },
            _ => {
                let mut a = if complex { alpha(r) } else { alpha_set().choose(r).unwrap().clone() };
                if a.is_minus_one() {
                    a = G::frac(-1, 2);
                }
                VGradedModule::single(a, nilpotent(r, d).0)
            }
        };
        budget -= piece.total_dim().min(budget);
        m = m.direct_sum(&piece);
    }
    change_basis(r, &m)
}

/// Same module in random bases of every space.
pub fn change_basis(r: &mut Rng8, m: &VGradedModule) -> VGradedModule {
    let mut out = m.clone();
    let mut g1 = None;
    for (a, n) in out.psi.iter_mut() {
        let g = invertible(r, n.rows());
        let gi = g.inverse().unwrap();
        *n = &(&gi * n) * &g;
        if a.0.is_minus_one() {
            g1 = Some((g, gi));
        }
    }
    let (g1, g1i) = g1.unwrap_or((Mat::identity(0), Mat::identity(0)));
    let h = invertible(r, out.phi.rows());
    let hi = h.inverse().unwrap();
    out.phi = &(&hi * &out.phi) * &h;
    out.can = &(&hi * &out.can) * &g1;
    out.var = &(&g1i * &out.var) * &h;
    out
}

/// Random element of the space of pairings between `l` and `r`.
pub fn pairing_data(rg: &mut Rng8, l: &VGradedModule, r: &VGradedModule) -> PairingData {
    let basis = constraint_basis(l, r).expect("modules satisfy the quiver axioms");
    let mut a = l
        .alphas()
        .into_iter()
        .map(|al| (Cx(al.clone()), Mat::zeros(l.psi_dim(&al), r.psi_dim(&al.conj()))))
        .collect::<std::collections::BTreeMap<_, _>>();
    let mut a0 = Mat::zeros(l.phi_dim(), r.phi_dim());
    for b in &basis {
        let c = G::int(rg.gen_range(-2..=2));
        for (k, m) in &b.a {
            let e = a.get_mut(k).unwrap();
            *e = &*e + &m.scale(&c);
        }
        a0 = &a0 + &b.a0.scale(&c);
    }
    PairingData { a, a0 }
}

/// Adds `c t u(alpha,0)` to every psi entry: strictly lower order, invisible on gradeds.
pub fn add_low_order_noise(r: &mut Rng8, p: &mut DistPairing) {
    for (a, block) in p.psi.iter_mut() {
        for row in block.iter_mut() {
            for e in row.iter_mut() {
                if r.gen_bool(0.5) {
                    let side = r.gen_bool(0.5);
                    let (x, y) = if side { (1, 0) } else { (0, 1) };
                    *e = &*e + &Germ::mono(x, y, a.0.clone(), r.gen_range(0..=2), scalar(r));
                }
            }
        }
    }
}

/// Pairing between a random module and its Hermitian dual.
pub fn pairing(r: &mut Rng8, max_dim: usize) -> DistPairing {
    pairing_in(r, max_dim, true)
}

pub fn pairing_in(r: &mut Rng8, max_dim: usize, complex: bool) -> DistPairing {
    let l = module_in(r, max_dim, complex);
    let rt = crate::quiver::hermitian_dual_quiver(&l);
    let rt = change_basis(r, &rt);
    let d = pairing_data(r, &l, &rt);
    let mut p = realize(&l, &rt, &d);
    if r.gen_bool(0.5) {
        add_low_order_noise(r, &mut p);
    }
    p
}

/// Pairing that is degenerate by construction: a summand paired by zero.
pub fn degenerate_pairing(r: &mut Rng8, max_dim: usize) -> DistPairing {
    degenerate_pairing_in(r, max_dim, true)
}

pub fn degenerate_pairing_in(r: &mut Rng8, max_dim: usize, complex: bool) -> DistPairing {
    let l = module_in(r, max_dim, complex);
    let a = if complex { alpha(r) } else { alpha_set().choose(r).unwrap().clone() };
    let extra = VGradedModule::single(a, nilpotent(r, 1).0);
    let l2 = l.direct_sum(&extra);
    let rt = crate::quiver::hermitian_dual_quiver(&l2);
    let mut d = pairing_data(r, &l, &crate::quiver::hermitian_dual_quiver(&l));
    // pad with zero rows/columns for the extra summand
    let mut a = std::collections::BTreeMap::new();
    for al in l2.alphas() {
        let mut m = Mat::zeros(l2.psi_dim(&al), rt.psi_dim(&al.conj()));
        if let Some(x) = d.a.get(&Cx(al.clone())) {
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    m[(i, j)] = x[(i, j)].clone();
                }
            }
        }
        a.insert(Cx(al), m);
    }
    d.a = a;
    realize(&l2, &rt, &d)
}

/// The canonical pairing with `A_alpha = I` and `A_0 = -I` between `l` and its dual.
pub fn dual_pairing(l: &VGradedModule) -> DistPairing {
    let rt = crate::quiver::hermitian_dual_quiver(l);
    let a = l.alphas().into_iter().map(|al| (Cx(al.clone()), Mat::identity(l.psi_dim(&al)))).collect();
    let a0 = -&Mat::identity(l.phi_dim());
    realize(l, &rt, &PairingData { a, a0 })
}

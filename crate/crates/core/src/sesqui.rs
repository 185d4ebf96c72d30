//! Sesquilinear pairings valued in germs, their nearby/vanishing scalar forms,
//! the compatibility identities, primitive pairings and the second computation
//! of the nearby form through `M_{alpha,p}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::germ::{make_u, Germ, Side};
use crate::nilalg::{kernel_space, monodromy_filtration, primitive_part, Mat, Vector};
use crate::quiver::{psi_limit, ExtendedModule, VGradedModule};
use crate::scalar::{Cx, GaussianRational as G, Scalar};
use crate::vfilt::{graded_class, in_v, l_alpha, nilpotent_n, v_orders, BiOrder};

pub type SMat = Vec<Vec<Scalar>>;

/// Scalar-valued form on `gr_alpha` (base is a point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPairing {
    pub alpha: G,
    pub m: SMat,
}

impl GradedPairing {
    pub fn rows(&self) -> usize {
        self.m.len()
    }

    pub fn cols(&self) -> usize {
        self.m.first().map_or(0, |r| r.len())
    }
}

/// Germ-valued pairing: for each `alpha` in `[-1,0)` the matrix
/// `S(m_i, conj mu_j)` on `psi(alpha)` x `psi(conj alpha)`, and optionally the
/// matrix on `phi` x `phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistPairing {
    pub left: VGradedModule,
    pub right: VGradedModule,
    pub psi: BTreeMap<Cx, Vec<Vec<Germ>>>,
    pub phi: Option<Vec<Vec<Germ>>>,
}

fn shape(m: &[Vec<Germ>]) -> (usize, usize) {
    (m.len(), m.first().map_or(0, |r| r.len()))
}

impl DistPairing {
    /// Checks shapes against the modules and the declared order bounds.
    pub fn validate(&self) -> Result<()> {
        for (a, g) in &self.psi {
            let want = (self.left.psi_dim(&a.0), self.right.psi_dim(&a.0.conj()));
            if shape(g) != want && !(want.0 == 0 && g.is_empty()) {
                return Err(Error::Shape(format!("block at alpha {} has shape {:?}, expected {:?}", a.0, shape(g), want)));
            }
            check_orders(g, &a.0)?;
        }
        if let Some(g) = &self.phi {
            let want = (self.left.phi_dim(), self.right.phi_dim());
            if shape(g) != want && !(want.0 == 0 && g.is_empty()) {
                return Err(Error::Shape(format!("phi block has shape {:?}, expected {:?}", shape(g), want)));
            }
            check_orders(g, &G::zero())?;
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<G> {
        self.psi.keys().map(|k| k.0.clone()).collect()
    }

    fn block(&self, alpha: &G) -> Result<&Vec<Vec<Germ>>> {
        self.psi
            .get(&Cx(alpha.clone()))
            .ok_or_else(|| Error::Domain(format!("no pairing block at alpha {}", alpha)))
    }
}

fn check_orders(g: &[Vec<Germ>], alpha: &G) -> Result<()> {
    let o = BiOrder::diag(alpha.clone());
    for (i, row) in g.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !in_v(e, &o) {
                return Err(Error::Precondition(format!(
                    "entry [{}][{}] = {} has order {} above {}",
                    i,
                    j,
                    e,
                    v_orders(e).map(|x| x.to_string()).unwrap_or_default(),
                    o
                )));
            }
        }
    }
    Ok(())
}

fn l_matrix(g: &[Vec<Germ>], alpha: &G) -> Result<SMat> {
    g.iter().map(|r| r.iter().map(|e| l_alpha(e, alpha)).collect()).collect()
}

/// `psi_lambda S`: entrywise `L_alpha`.
pub fn psi_s(p: &DistPairing, alpha: &G) -> Result<GradedPairing> {
    let g = p.block(alpha)?;
    check_orders(g, alpha)?;
    Ok(GradedPairing { alpha: alpha.clone(), m: l_matrix(g, alpha)? })
}

/// `phi_1 S`: entrywise `L_0` on the phi block.
pub fn phi_s(p: &DistPairing) -> Result<GradedPairing> {
    let g = p.phi.as_ref().ok_or_else(|| Error::Domain("pairing has no phi block".into()))?;
    check_orders(g, &G::zero())?;
    Ok(GradedPairing { alpha: G::zero(), m: l_matrix(g, &G::zero())? })
}

/// `A * S` for a numeric `A`.
pub fn lmul(a: &Mat, s: &SMat) -> SMat {
    let c = s.first().map_or(0, |r| r.len());
    (0..a.rows())
        .map(|i| {
            (0..c)
                .map(|j| {
                    let mut x = Scalar::zero();
                    for k in 0..a.cols() {
                        if !a[(i, k)].is_zero() {
                            x += &s[k][j].scale_gr(&a[(i, k)]);
                        }
                    }
                    x
                })
                .collect()
        })
        .collect()
}

/// `S * B` for a numeric `B`.
pub fn rmul(s: &SMat, b: &Mat) -> SMat {
    s.iter()
        .map(|row| {
            (0..b.cols())
                .map(|j| {
                    let mut x = Scalar::zero();
                    for k in 0..b.rows() {
                        if !b[(k, j)].is_zero() {
                            x += &row[k].scale_gr(&b[(k, j)]);
                        }
                    }
                    x
                })
                .collect()
        })
        .collect()
}

fn smat_eq(a: &SMat, b: &SMat) -> bool {
    let norm = |m: &SMat| m.iter().filter(|r| !r.is_empty()).cloned().collect::<Vec<_>>();
    norm(a) == norm(b)
}

fn germ_lmul(a: &Mat, g: &[Vec<Germ>]) -> Vec<Vec<Germ>> {
    let c = g.first().map_or(0, |r| r.len());
    (0..a.rows())
        .map(|i| {
            (0..c)
                .map(|j| {
                    let mut x = Germ::zero();
                    for k in 0..a.cols() {
                        if !a[(i, k)].is_zero() {
                            x = &x + &g[k][j].scale(&Scalar::from_gr(a[(i, k)].clone()));
                        }
                    }
                    x
                })
                .collect()
        })
        .collect()
}

fn germ_rmul(g: &[Vec<Germ>], b: &Mat) -> Vec<Vec<Germ>> {
    transpose_g(&germ_lmul(&b.transpose(), &transpose_g(g)))
}

fn transpose_g(g: &[Vec<Germ>]) -> Vec<Vec<Germ>> {
    let c = g.first().map_or(0, |r| r.len());
    (0..c).map(|j| g.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Outcome of the compatibility identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropsReport {
    pub checks: Vec<(String, bool)>,
}

impl PropsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.0 == name).map(|c| c.1)
    }
}

pub const ID_PSI_N: &str = "1: psi(N.,.) = psi(.,N.)";
pub const ID_PHI_N: &str = "2: phi(N.,.) = phi(.,N.)";
pub const ID_VAR_CAN: &str = "3: psi_1(Var.,.) = phi_1(.,can.)";
pub const ID_CAN_VAR: &str = "4: psi_1(.,Var.) = phi_1(can.,.)";

/// The four displayed identities plus entrywise D-linearity on graded classes.
pub fn check_props(p: &DistPairing) -> Result<PropsReport> {
    p.validate()?;
    let mut checks = Vec::new();
    let mut ok1 = true;
    let mut lin = true;
    for (a, g) in &p.psi {
        let alpha = &a.0;
        let nl = p.left.psi_n(alpha);
        let nr = p.right.psi_n(&alpha.conj());
        let psi = psi_s(p, alpha)?.m;
        ok1 &= smat_eq(&lmul(&nl.transpose(), &psi), &rmul(&psi, &nr.conj()));
        lin &= d_linear(g, alpha, &nl, &nr)?;
    }
    checks.push((ID_PSI_N.to_string(), ok1));
    let m1 = G::int(-1);
    match &p.phi {
        Some(g) => {
            let phi = phi_s(p)?.m;
            let (nl0, nr0) = (&p.left.phi, &p.right.phi);
            checks.push((ID_PHI_N.to_string(), smat_eq(&lmul(&nl0.transpose(), &phi), &rmul(&phi, &nr0.conj()))));
            lin &= d_linear(g, &G::zero(), nl0, nr0)?;
            let psi1 = match p.psi.get(&Cx(m1.clone())) {
                Some(_) => psi_s(p, &m1)?.m,
                None => vec![vec![]; p.left.psi_dim(&m1)],
            };
            let l = &p.left;
            let r = &p.right;
            let id3 = shapes_ok(l, r) && smat_eq(&lmul(&l.var.transpose(), &psi1), &rmul(&phi, &r.can.conj()));
            let id4 = shapes_ok(l, r) && smat_eq(&rmul(&psi1, &r.var.conj()), &lmul(&l.can.transpose(), &phi));
            checks.push((ID_VAR_CAN.to_string(), id3));
            checks.push((ID_CAN_VAR.to_string(), id4));
        }
        None => {
            checks.push((ID_PHI_N.to_string(), true));
            checks.push((ID_VAR_CAN.to_string(), true));
            checks.push((ID_CAN_VAR.to_string(), true));
        }
    }
    checks.push(("D-linearity on graded classes".to_string(), lin));
    Ok(PropsReport { checks })
}

fn shapes_ok(l: &VGradedModule, r: &VGradedModule) -> bool {
    l.violations().iter().all(|v| !v.contains("shape")) && r.violations().iter().all(|v| !v.contains("shape"))
}

/// `N_left` acting on the row index equals `-(d_t t + alpha)` on entries, and
/// `conj N_right` on the column index equals `-(d_tb tb + alpha)`, on classes.
fn d_linear(g: &[Vec<Germ>], alpha: &G, nl: &Mat, nr: &Mat) -> Result<bool> {
    if g.is_empty() {
        return Ok(true);
    }
    let o = BiOrder::diag(alpha.clone());
    let by_l = germ_lmul(&nl.transpose(), g);
    let by_r = germ_rmul(g, &nr.conj());
    for (i, row) in g.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let h = nilpotent_n(e, alpha, Side::Holo)?;
            let a = nilpotent_n(e, alpha, Side::Antiholo)?;
            if graded_class(&(&h - &by_l[i][j]), &o)? != Germ::zero() {
                return Ok(false);
            }
            if graded_class(&(&a - &by_r[i][j]), &o)? != Germ::zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Determinant over the Laurent ring in `tau` (expansion over column subsets).
pub fn det_scalar(m: &SMat) -> Result<Scalar> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    if n > 16 {
        return Err(Error::Shape("determinant limited to 16 x 16".into()));
    }
    let mut f = vec![Scalar::zero(); 1 << n];
    f[0] = Scalar::one();
    for mask in 1usize..(1 << n) {
        let r = mask.count_ones() as usize - 1;
        let mut acc = Scalar::zero();
        for c in 0..n {
            if mask & (1 << c) == 0 || m[r][c].is_zero() {
                continue;
            }
            let rest = mask & !(1 << c);
            if f[rest].is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let t = &m[r][c] * &f[rest];
            if above % 2 == 0 {
                acc += &t;
            } else {
                acc += &(-t);
            }
        }
        f[mask] = acc;
    }
    Ok(f[(1 << n) - 1].clone())
}

/// Square with nonzero determinant; non-square matrices are degenerate.
pub fn nondegenerate(m: &SMat) -> bool {
    det_scalar(m).map_or(false, |d| !d.is_zero())
}

/// `x^T Psi conj(y)`.
fn form(psi: &SMat, x: &[G], y: &[G]) -> Scalar {
    let mut s = Scalar::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() && !psi[i][j].is_zero() {
                s += &psi[i][j].scale_gr(&(xi * &yj.conj()));
            }
        }
    }
    s
}

fn compatible(g: &GradedPairing, nl: &Mat, nr: &Mat) -> bool {
    g.rows() == nl.rows() && (g.rows() == 0 || g.cols() == nr.rows()) && smat_eq(&lmul(&nl.transpose(), &g.m), &rmul(&g.m, &nr.conj()))
}

/// Induced form on `gr_l^M (left) x gr_-l^M (right)`.
pub fn graded_pairing(g: &GradedPairing, nl: &Mat, nr: &Mat, ell: i64) -> Result<SMat> {
    if !compatible(g, nl, nr) {
        return Err(Error::Precondition("psi(N.,.) != psi(.,N.)".into()));
    }
    let fl = monodromy_filtration(nl)?;
    let fr = monodromy_filtration(nr)?;
    // the form must vanish on M_(l-1) x M_-l and M_l x M_(-l-1)
    let vanish = |a: &[Vector], b: &[Vector]| a.iter().all(|x| b.iter().all(|y| form(&g.m, x, y).is_zero()));
    if !vanish(fl.step(ell - 1).basis(), fr.step(-ell).basis()) || !vanish(fl.step(ell).basis(), fr.step(-ell - 1).basis()) {
        return Err(Error::Precondition(format!("form does not descend to gr_{}", ell)));
    }
    let xs = fl.gr_reps(ell);
    let ys = fr.gr_reps(-ell);
    Ok(xs.iter().map(|x| ys.iter().map(|y| form(&g.m, x, y)).collect()).collect())
}

/// `P psi_l = psi_l o (id x N^l)` on the primitive parts.
pub fn primitive_pairing(g: &GradedPairing, nl: &Mat, nr: &Mat, ell: i64) -> Result<SMat> {
    if ell < 0 {
        return Err(Error::Domain("primitive pairings need l >= 0".into()));
    }
    if !compatible(g, nl, nr) {
        return Err(Error::Precondition("psi(N.,.) != psi(.,N.)".into()));
    }
    let fl = monodromy_filtration(nl)?;
    let fr = monodromy_filtration(nr)?;
    let xs = primitive_part(nl, &fl, ell)?;
    let nrl = nr.pow(ell as usize);
    let ys: Vec<Vector> = primitive_part(nr, &fr, ell)?.iter().map(|y| nrl.apply(y)).collect();
    Ok(xs.iter().map(|x| ys.iter().map(|y| form(&g.m, x, y)).collect()).collect())
}

/// Both sides of the nondegeneracy equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorReport {
    pub full: bool,
    pub primitive: bool,
}

impl CorReport {
    pub fn holds(&self) -> bool {
        self.full == self.primitive
    }
}

pub fn check_cor_sesqui(p: &DistPairing) -> Result<CorReport> {
    p.validate()?;
    let mut full = true;
    let mut prim = true;
    let mut forms: Vec<(GradedPairing, Mat, Mat)> = Vec::new();
    for a in p.psi.keys() {
        forms.push((psi_s(p, &a.0)?, p.left.psi_n(&a.0), p.right.psi_n(&a.0.conj())));
    }
    if p.phi.is_some() {
        forms.push((phi_s(p)?, p.left.phi.clone(), p.right.phi.clone()));
    }
    for (g, nl, nr) in &forms {
        let dl = nl.rows();
        let dr = nr.rows();
        full &= dl == dr && (dl == 0 || nondegenerate(&g.m));
        if !compatible(g, nl, nr) {
            prim = false;
            continue;
        }
        let k = nl.nilpotency_index()?.max(nr.nilpotency_index()?);
        for ell in 0..=k as i64 {
            let m = primitive_pairing(g, nl, nr, ell)?;
            let empty = m.is_empty() && primitive_part(nr, &monodromy_filtration(nr)?, ell)?.is_empty();
            prim &= empty || nondegenerate(&m);
        }
    }
    Ok(CorReport { full, primitive: prim })
}

/// `S(x, conj mu_j)` for a left vector `x`.
fn row_combination(g: &[Vec<Germ>], x: &[G], j: usize) -> Germ {
    let mut s = Germ::zero();
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            s = &s + &g[i][j].scale(&Scalar::from_gr(xi.clone()));
        }
    }
    s
}

/// Route through `M_{alpha,p}` for a left representative `x` of the class of `m` in
/// `coker T`: `L_-1( sum_{k,l} N_ah^k S(x_l, conj mu) * u(-alpha-2, k+l-p) )`.
fn route_two_entry(g: &[Vec<Germ>], alpha: &G, e: &ExtendedModule, x: &[G], j: usize) -> Result<Scalar> {
    let p = e.p;
    let beta = &(-alpha) - &G::int(2);
    let mut total = Germ::zero();
    for l in 0..=p {
        let xl = e.component(x, l);
        let mut h = row_combination(g, &xl, j);
        for k in 0..=p {
            let idx = (k + l) as i64 - p as i64;
            if idx >= 0 && !h.is_zero() {
                total = &total + &h.mul(&make_u(&beta, idx)?)?;
            }
            h = nilpotent_n(&h, alpha, Side::Antiholo)?;
        }
    }
    l_alpha(&total, &G::int(-1))
}

/// Second computation of `psi_lambda S` through the stabilized `M_{alpha,p}`.
/// Two representatives of each class in `coker T` are used and must agree.
pub fn psi_s_via_malphap(pr: &DistPairing, alpha: &G, p: usize) -> Result<GradedPairing> {
    let g = pr.block(alpha)?;
    check_orders(g, alpha)?;
    let nl = pr.left.psi_n(alpha);
    let nr = pr.right.psi_n(&alpha.conj());
    let lim_l = psi_limit(&nl, p)?;
    psi_limit(&nr, p)?;
    let e = crate::quiver::build_malphap(&nl, p as i64)?;
    let dl = nl.rows();
    let dr = nr.rows();
    let mut out = vec![vec![Scalar::zero(); dr]; dl];
    for i in 0..dl {
        let mut mi = vec![G::zero(); dl];
        mi[i] = G::one();
        let x = lim_l.bp0.solve(&mi).ok_or_else(|| Error::Precondition("bp0 is not onto".into()))?;
        // x + T(sum_k m_i (x) e_k)
        let mut y = vec![G::zero(); e.dim()];
        for k in 0..=p {
            let v = e.embed(&mi, k);
            for t in 0..y.len() {
                y[t] += &v[t];
            }
        }
        let ty = e.t.apply(&y);
        let x2: Vector = x.iter().zip(&ty).map(|(a, b)| a + b).collect();
        for j in 0..dr {
            let r1 = route_two_entry(g, alpha, &e, &x, j)?;
            let r2 = route_two_entry(g, alpha, &e, &x2, j)?;
            if r1 != r2 {
                return Err(Error::Precondition(format!("route depends on the representative at [{}][{}]", i, j)));
            }
            out[i][j] = r1;
        }
    }
    Ok(GradedPairing { alpha: alpha.clone(), m: out })
}

/// Pairing matrix on `M_{alpha,p}` for the rank-one atom `S(m, conj m) = u(alpha,0)`,
/// with entries `u(alpha,0) * u(-alpha-2, k+l-p)`, and its `L_-1` image.
pub fn lemma_matrix(alpha: &G, p: usize) -> Result<(Vec<Vec<Germ>>, SMat)> {
    let beta = &(-alpha) - &G::int(2);
    let base = Germ::u(alpha.clone(), 0);
    let mut gm = Vec::new();
    for k in 0..=p {
        let mut row = Vec::new();
        for l in 0..=p {
            let idx = (k + l) as i64 - p as i64;
            row.push(if idx < 0 { Germ::zero() } else { base.mul(&make_u(&beta, idx)?)? });
        }
        gm.push(row);
    }
    let lm = l_matrix(&gm, &G::int(-1))?;
    Ok((gm, lm))
}

/// Germ-valued determinant (Leibniz expansion with germ products).
pub fn det_germ(m: &[Vec<Germ>]) -> Result<Germ> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Germ::zero();
    permute(&mut perm, 0, m, &mut total)?;
    Ok(total)
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &[Vec<Germ>], total: &mut Germ) -> Result<()> {
    let n = perm.len();
    if k == n {
        let mut prod: Option<Germ> = None;
        for (i, &c) in perm.iter().enumerate() {
            if m[i][c].is_zero() {
                return Ok(());
            }
            prod = Some(match prod {
                None => m[i][c].clone(),
                Some(p) => p.mul(&m[i][c])?,
            });
        }
        let mut inv = 0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        let p = prod.unwrap_or_else(Germ::one);
        *total = if inv % 2 == 0 { &*total + &p } else { &*total - &p };
        return Ok(());
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total)?;
        perm.swap(k, i);
    }
    Ok(())
}

/// Coefficients of a pairing realized from germ calculus: `A_alpha` per block and
/// `A_0` on phi, with `psi = tau A_alpha` and `phi = -tau A_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingData {
    pub a: BTreeMap<Cx, Mat>,
    pub a0: Mat,
}

struct Layout {
    blocks: Vec<(G, usize, usize)>,
    phi: (usize, usize),
}

impl Layout {
    fn new(l: &VGradedModule, r: &VGradedModule) -> Layout {
        let blocks = l.alphas().into_iter().map(|a| {
            let (x, y) = (l.psi_dim(&a), r.psi_dim(&a.conj()));
            (a, x, y)
        });
        Layout { blocks: blocks.collect(), phi: (l.phi_dim(), r.phi_dim()) }
    }

    fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.1 * b.2).sum::<usize>() + self.phi.0 * self.phi.1
    }

    fn unpack(&self, v: &[G]) -> PairingData {
        let mut off = 0;
        let mut take = |r: usize, c: usize| {
            let mut m = Mat::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m[(i, j)] = v[off].clone();
                    off += 1;
                }
            }
            m
        };
        let mut a = BTreeMap::new();
        for (al, r, c) in &self.blocks {
            a.insert(Cx(al.clone()), take(*r, *c));
        }
        let a0 = take(self.phi.0, self.phi.1);
        PairingData { a, a0 }
    }
}

fn flatten(m: &Mat, out: &mut Vec<G>) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push(m[(i, j)].clone());
        }
    }
}

fn constraint_image(l: &VGradedModule, r: &VGradedModule, d: &PairingData) -> Vec<G> {
    let m1 = Cx(G::int(-1));
    let mut out = Vec::new();
    for (a, x) in &d.a {
        let nl = l.psi_n(&a.0);
        let nr = r.psi_n(&a.0.conj());
        flatten(&(&(&nl.transpose() * x) - &(x * &nr.conj())), &mut out);
    }
    flatten(&(&(&l.phi.transpose() * &d.a0) - &(&d.a0 * &r.phi.conj())), &mut out);
    let a1 = d.a.get(&m1).cloned().unwrap_or_else(|| Mat::zeros(l.psi_dim(&m1.0), r.psi_dim(&m1.0)));
    flatten(&(&(&l.var.transpose() * &a1) + &(&d.a0 * &r.can.conj())), &mut out);
    flatten(&(&(&a1 * &r.var.conj()) + &(&l.can.transpose() * &d.a0)), &mut out);
    out
}

/// Basis of the coefficient data satisfying all four identities.
pub fn constraint_basis(l: &VGradedModule, r: &VGradedModule) -> Result<Vec<PairingData>> {
    l.check()?;
    r.check()?;
    let lay = Layout::new(l, r);
    let n = lay.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let cols: Vec<Vector> = (0..n)
        .map(|k| {
            let mut e = vec![G::zero(); n];
            e[k] = G::one();
            constraint_image(l, r, &lay.unpack(&e))
        })
        .collect();
    let m = Mat::from_cols(cols[0].len(), &cols);
    Ok(kernel_space(&m).basis().iter().map(|v| lay.unpack(v)).collect())
}

/// Germ realization: `sum_q ((-N_l^T)^q A) u(alpha,q)` on psi blocks and
/// `sum_q ((-N_0^T)^q A_0) b_q` on phi with `b_0 = -tau delta`, `b_q = t^-1 tb^-1 u(-1,q-1)`.
pub fn realize(l: &VGradedModule, r: &VGradedModule, d: &PairingData) -> DistPairing {
    let mut psi = BTreeMap::new();
    for (a, x) in &d.a {
        let nl = l.psi_n(&a.0);
        let k = nl.nilpotency_index().unwrap_or(nl.rows());
        let step = -&nl.transpose();
        let mut c = x.clone();
        let mut g = vec![vec![Germ::zero(); x.cols()]; x.rows()];
        for q in 0..=k {
            add_scaled(&mut g, &c, &Germ::u(a.0.clone(), q as u32));
            c = &step * &c;
        }
        psi.insert(a.clone(), g);
    }
    let phi = if l.phi_dim() + r.phi_dim() > 0 || l.alphas().iter().any(|a| a.is_minus_one()) {
        let k = l.phi.nilpotency_index().unwrap_or(l.phi.rows());
        let step = -&l.phi.transpose();
        let mut c = d.a0.clone();
        let mut g = vec![vec![Germ::zero(); c.cols()]; c.rows()];
        for q in 0..=k {
            let b = if q == 0 {
                Germ::delta(0, 0, -Scalar::tau())
            } else {
                Germ::mono(-1, -1, G::int(-1), q as u32 - 1, Scalar::one())
            };
            add_scaled(&mut g, &c, &b);
            c = &step * &c;
        }
        Some(g)
    } else {
        None
    };
    DistPairing { left: l.clone(), right: r.clone(), psi, phi }
}

fn add_scaled(g: &mut [Vec<Germ>], c: &Mat, b: &Germ) {
    for i in 0..c.rows() {
        for j in 0..c.cols() {
            if !c[(i, j)].is_zero() {
                g[i][j] = &g[i][j] + &b.scale(&Scalar::from_gr(c[(i, j)].clone()));
            }
        }
    }
}

/// Sign `s` with `conj(G^T) = s G`, if any (germ level).
pub fn hermitian_sign_germ(g: &[Vec<Germ>]) -> Option<i8> {
    let ct: Vec<Vec<Germ>> = transpose_g(g).iter().map(|r| r.iter().map(|e| e.conj()).collect()).collect();
    if ct == g {
        Some(1)
    } else if ct.iter().zip(g).all(|(a, b)| a.iter().zip(b).all(|(x, y)| *x == -y.clone())) {
        Some(-1)
    } else {
        None
    }
}

/// Sign `s` with `conj(Psi^T) = s Psi`, if any.
pub fn hermitian_sign_scalar(m: &SMat) -> Option<i8> {
    let n = m.len();
    let ct = |i: usize, j: usize| m[j][i].conj();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let plus = (0..n).all(|i| (0..n).all(|j| ct(i, j) == m[i][j]));
    let minus = (0..n).all(|i| (0..n).all(|j| ct(i, j) == -m[i][j].clone()));
    match (plus, minus) {
        (true, _) => Some(1),
        (_, true) => Some(-1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::hermitian_dual_quiver;

    fn h() -> G {
        G::frac(-1, 2)
    }

    fn rank1(g: Germ, n: Mat) -> DistPairing {
        let m = VGradedModule::single(h(), n.clone());
        let mut psi = BTreeMap::new();
        let d = n.rows();
        let mut rows = vec![vec![Germ::zero(); d]; d];
        rows[0][0] = g;
        psi.insert(Cx(h()), rows);
        DistPairing { left: m.clone(), right: m, psi, phi: None }
    }

    #[test]
    fn psi_examples() {
        let p = rank1(Germ::u(h(), 0), Mat::zeros(1, 1));
        assert_eq!(psi_s(&p, &h()).unwrap().m, vec![vec![Scalar::tau()]]);
        // u(alpha,1) on a Jordan-2 left side: S(m0, m0) = u1, S(N m0, m0) = -u0
        let mut p = rank1(Germ::u(h(), 1), Mat::jordan_block(2));
        p.psi.get_mut(&Cx(h())).unwrap()[1][0] = -Germ::u(h(), 0);
        let s = psi_s(&p, &h()).unwrap();
        assert!(s.m[0][0].is_zero());
        assert_eq!(s.m[1][0], -Scalar::tau());
        let bad = rank1(Germ::mono(-1, 0, h(), 0, Scalar::one()), Mat::zeros(1, 1));
        assert!(psi_s(&bad, &h()).unwrap_err().to_string().contains("[0][0]"));
    }

    #[test]
    fn phi_delta_normalization() {
        let mut p = rank1(Germ::u(h(), 0), Mat::zeros(1, 1));
        p.phi = Some(vec![vec![Germ::delta(0, 0, Scalar::one())]]);
        p.left.phi = Mat::zeros(1, 1);
        p.right.phi = Mat::zeros(1, 1);
        assert_eq!(phi_s(&p).unwrap().m, vec![vec![Scalar::one()]]);
    }

    #[test]
    fn determinants() {
        let t = Scalar::tau();
        let m = vec![vec![Scalar::zero(), t.clone()], vec![-t.clone(), Scalar::zero()]];
        assert_eq!(det_scalar(&m).unwrap(), Scalar::tau_pow(2));
        assert!(nondegenerate(&m));
        assert!(!nondegenerate(&vec![vec![Scalar::zero()]]));
        assert!(nondegenerate(&vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]]));
        assert!(!nondegenerate(&vec![vec![Scalar::one(), Scalar::zero()]]));
    }

    #[test]
    fn lemma_antitriangular() {
        for p in 0..=4 {
            let (g, l) = lemma_matrix(&h(), p).unwrap();
            assert!(!det_germ(&g).unwrap().is_zero());
            assert!(nondegenerate(&l));
            for k in 0..=p {
                assert_eq!(l[k][p - k], Scalar::tau());
            }
        }
    }

    #[test]
    fn dual_pairing_realizes_identity() {
        let mut m = VGradedModule::single(G::int(-1), Mat::jordan_block(2));
        m = crate::quiver::colocalize(&m);
        let d = hermitian_dual_quiver(&m);
        let basis = constraint_basis(&m, &d).unwrap();
        assert!(!basis.is_empty());
        let mut data = PairingData { a: BTreeMap::new(), a0: Mat::identity(2).scale(&G::int(-1)) };
        data.a.insert(Cx(G::int(-1)), Mat::identity(2));
        assert!(constraint_image(&m, &d, &data).iter().all(|x| x.is_zero()));
        let p = realize(&m, &d, &data);
        let r = check_props(&p).unwrap();
        assert!(r.all_pass(), "{:?}", r);
        assert_eq!(psi_s(&p, &G::int(-1)).unwrap().m[0][0], Scalar::tau());
        assert_eq!(phi_s(&p).unwrap().m[1][1], Scalar::tau());
        let two = psi_s_via_malphap(&p, &G::int(-1), 1).unwrap();
        assert_eq!(two, psi_s(&p, &G::int(-1)).unwrap());
        assert!(check_cor_sesqui(&p).unwrap().holds());
        let mut broken = p.clone();
        broken.left.var[(0, 0)] = G::int(5);
        let r = check_props(&broken).unwrap();
        assert_eq!(r.get(ID_VAR_CAN), Some(false));
    }

    #[test]
    fn graded_and_primitive() {
        let n = Mat::jordan_block(2);
        // psi(m0, m1) = psi(m1, m0) = tau, others 0: compatible with N m0 = m1
        let t = Scalar::tau();
        let g = GradedPairing { alpha: h(), m: vec![vec![Scalar::zero(), t.clone()], vec![t.clone(), Scalar::zero()]] };
        let gp = graded_pairing(&g, &n, &n, 1).unwrap();
        assert_eq!(gp.len(), 1);
        assert!(!gp[0][0].is_zero());
        let pp = primitive_pairing(&g, &n, &n, 1).unwrap();
        assert!(nondegenerate(&pp));
        assert!(primitive_pairing(&g, &n, &n, 3).unwrap().is_empty());
        assert!(primitive_pairing(&g, &n, &n, -1).is_err());
        let z = Mat::zeros(1, 1);
        let g1 = GradedPairing { alpha: h(), m: vec![vec![t.clone()]] };
        assert_eq!(graded_pairing(&g1, &z, &z, 0).unwrap(), g1.m);
        assert_eq!(primitive_pairing(&g1, &z, &z, 0).unwrap(), g1.m);
    }
}

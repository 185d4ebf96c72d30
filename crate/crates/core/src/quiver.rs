//! Graded linear data of a regular holonomic germ: the spaces `gr_alpha` with their
//! nilpotents, the vanishing part `phi` with `can`/`var`, the extensions by formal
//! logarithms `M_{alpha,p}` and their stabilized limits.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nilalg::{image_space, kernel_space, Mat, Subspace, Vector};
use crate::scalar::{cx_lt, in_fundamental_domain, Cx, GaussianRational as G};

/// `psi(alpha)` for `alpha` in `[-1, 0)` with nilpotents, `phi` with `N_0`,
/// `can : psi(-1) -> phi` and `var : phi -> psi(-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VGradedModule {
    pub psi: BTreeMap<Cx, Mat>,
    pub phi: Mat,
    pub can: Mat,
    pub var: Mat,
}

impl VGradedModule {
    pub fn zero() -> Self {
        VGradedModule { psi: BTreeMap::new(), phi: Mat::zeros(0, 0), can: Mat::zeros(0, 0), var: Mat::zeros(0, 0) }
    }

    /// Module with a single `psi(alpha)` and nothing at the origin.
    pub fn single(alpha: G, n: Mat) -> Self {
        let mut m = VGradedModule::zero();
        let d = if alpha.is_minus_one() { n.rows() } else { 0 };
        m.can = Mat::zeros(0, d);
        m.var = Mat::zeros(d, 0);
        m.psi.insert(Cx(alpha), n);
        m
    }

    pub fn alphas(&self) -> Vec<G> {
        self.psi.keys().map(|k| k.0.clone()).collect()
    }

    /// Nilpotent on `psi(alpha)`; the empty matrix if `alpha` is absent.
    pub fn psi_n(&self, alpha: &G) -> Mat {
        self.psi.get(&Cx(alpha.clone())).cloned().unwrap_or_else(|| Mat::zeros(0, 0))
    }

    pub fn psi_dim(&self, alpha: &G) -> usize {
        self.psi_n(alpha).rows()
    }

    pub fn phi_dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn total_dim(&self) -> usize {
        self.psi.values().map(|n| n.rows()).sum::<usize>() + self.phi_dim()
    }

    /// All violated axioms (empty when the module is well formed).
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (a, n) in &self.psi {
            if !in_fundamental_domain(&a.0) {
                out.push(format!("alpha {} outside [-1, 0)", a.0));
            }
            if !n.is_square() || !n.is_nilpotent() {
                out.push(format!("N at alpha {} is not a nilpotent endomorphism", a.0));
            }
        }
        if !self.phi.is_square() || !self.phi.is_nilpotent() {
            out.push("N_0 on phi is not a nilpotent endomorphism".into());
        }
        let d = self.psi_dim(&G::int(-1));
        let e = self.phi_dim();
        if (self.can.rows(), self.can.cols()) != (e, d) {
            out.push(format!("can has shape {}x{}, expected {}x{}", self.can.rows(), self.can.cols(), e, d));
        }
        if (self.var.rows(), self.var.cols()) != (d, e) {
            out.push(format!("var has shape {}x{}, expected {}x{}", self.var.rows(), self.var.cols(), d, e));
        }
        if out.is_empty() {
            if &self.var * &self.can != self.psi_n(&G::int(-1)) {
                out.push("var*can != N_-1".into());
            }
            if &self.can * &self.var != self.phi {
                out.push("can*var != N_0".into());
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(v.join("; ")))
        }
    }

    /// Direct sum (block diagonal in every slot).
    pub fn direct_sum(&self, o: &VGradedModule) -> VGradedModule {
        let mut psi = BTreeMap::new();
        for a in self.psi.keys().chain(o.psi.keys()) {
            let n = Mat::block_diag(&[self.psi_n(&a.0), o.psi_n(&a.0)]);
            psi.insert(a.clone(), n);
        }
        VGradedModule {
            psi,
            phi: Mat::block_diag(&[self.phi.clone(), o.phi.clone()]),
            can: Mat::block_diag(&[self.can_shaped(), o.can_shaped()]),
            var: Mat::block_diag(&[self.var_shaped(), o.var_shaped()]),
        }
    }

    fn can_shaped(&self) -> Mat {
        let d = self.psi_dim(&G::int(-1));
        if self.can.rows() == self.phi_dim() && self.can.cols() == d {
            self.can.clone()
        } else {
            Mat::zeros(self.phi_dim(), d)
        }
    }

    fn var_shaped(&self) -> Mat {
        let d = self.psi_dim(&G::int(-1));
        if self.var.rows() == d && self.var.cols() == self.phi_dim() {
            self.var.clone()
        } else {
            Mat::zeros(d, self.phi_dim())
        }
    }
}

/// `gr_-1 M_{alpha,p} = V^(p+1)` with the operator `T` induced by `t d_t`.
/// Coordinates of `m (x) e_k` are `k * dim V + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedModule {
    pub base: Mat,
    pub p: usize,
    pub t: Mat,
}

impl ExtendedModule {
    pub fn dim(&self) -> usize {
        self.base.rows() * (self.p + 1)
    }

    /// `m (x) e_k -> m (x) e_(k-1)` (`e_-1 = 0`).
    pub fn shift(&self) -> Mat {
        let d = self.base.rows();
        let mut s = Mat::zeros(self.dim(), self.dim());
        for k in 1..=self.p {
            for i in 0..d {
                s[((k - 1) * d + i, k * d + i)] = G::one();
            }
        }
        s
    }

    /// Packs `m (x) e_k`.
    pub fn embed(&self, m: &[G], k: usize) -> Vector {
        let d = self.base.rows();
        let mut v = vec![G::zero(); self.dim()];
        v[k * d..(k + 1) * d].clone_from_slice(m);
        v
    }

    /// Component `m_k` of `sum m_k (x) e_k`.
    pub fn component(&self, v: &[G], k: usize) -> Vector {
        let d = self.base.rows();
        v[k * d..(k + 1) * d].to_vec()
    }
}

/// `T(m (x) e_k) = -N m (x) e_k + m (x) e_(k-1)`.
pub fn build_malphap(n: &Mat, p: i64) -> Result<ExtendedModule> {
    if p < 0 {
        return Err(Error::Domain(format!("p = {} is negative", p)));
    }
    if !n.is_nilpotent() {
        return Err(Error::Precondition("N is not nilpotent".into()));
    }
    let p = p as usize;
    let d = n.rows();
    let mut t = Mat::zeros(d * (p + 1), d * (p + 1));
    for k in 0..=p {
        for i in 0..d {
            for j in 0..d {
                t[(k * d + i, k * d + j)] = -&n[(i, j)];
            }
            if k > 0 {
                t[((k - 1) * d + i, k * d + i)] = G::one();
            }
        }
    }
    Ok(ExtendedModule { base: n.clone(), p, t })
}

fn same_base(e: &ExtendedModule, f: &ExtendedModule) -> Result<()> {
    if e.base != f.base || f.p != e.p + 1 {
        return Err(Error::Shape("a/b maps need the same base and consecutive p".into()));
    }
    Ok(())
}

/// Inclusion `E_p -> E_(p+1)` preserving the e-index.
pub fn a_map(ep: &ExtendedModule, ep1: &ExtendedModule) -> Result<Mat> {
    same_base(ep, ep1)?;
    let mut a = Mat::zeros(ep1.dim(), ep.dim());
    for i in 0..ep.dim() {
        a[(i, i)] = G::one();
    }
    Ok(a)
}

/// `sum m_k (x) e_k -> sum m_(k+1) (x) e_k`, `E_(p+1) -> E_p`.
pub fn b_map(ep1: &ExtendedModule, ep: &ExtendedModule) -> Result<Mat> {
    same_base(ep, ep1)?;
    let d = ep.base.rows();
    let mut b = Mat::zeros(ep.dim(), ep1.dim());
    for i in 0..ep.dim() {
        b[(i, i + d)] = G::one();
    }
    Ok(b)
}

/// `m -> sum_k N^k m (x) e_k`, as a matrix `V -> E_p`.
pub fn a0p(n: &Mat, p: usize) -> Mat {
    let d = n.rows();
    let mut a = Mat::zeros(d * (p + 1), d);
    let mut pw = Mat::identity(d);
    for k in 0..=p {
        for i in 0..d {
            for j in 0..d {
                a[(k * d + i, j)] = pw[(i, j)].clone();
            }
        }
        pw = &pw * n;
    }
    a
}

/// `sum m_k (x) e_k -> sum_k N^k m_(p-k)`, as a matrix `E_p -> V`.
pub fn bp0(n: &Mat, p: usize) -> Mat {
    let d = n.rows();
    let mut b = Mat::zeros(d, d * (p + 1));
    for k in 0..=p {
        let pw = n.pow(k);
        let slot = p - k;
        for i in 0..d {
            for j in 0..d {
                b[(i, slot * d + j)] = pw[(i, j)].clone();
            }
        }
    }
    b
}

/// Rank certificate for the two limit witnesses at a given `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitWitness {
    pub p: usize,
    pub dim_v: usize,
    pub dim_ker_t: usize,
    pub dim_coker_t: usize,
    /// `a0p` is injective with image `ker T`.
    pub a0p_iso: bool,
    /// `bp0` kills `im T` and induces `coker T ~ V`.
    pub bp0_iso: bool,
    /// Both witnesses intertwine `N` with the shift `a o b`.
    pub intertwines: bool,
}

impl LimitWitness {
    pub fn is_iso(&self) -> bool {
        self.a0p_iso && self.bp0_iso && self.intertwines
    }
}

pub fn limit_witness(n: &Mat, p: usize) -> Result<LimitWitness> {
    let e = build_malphap(n, p as i64)?;
    let d = n.rows();
    let a = a0p(n, p);
    let b = bp0(n, p);
    let ker_t = kernel_space(&e.t);
    let im_t = image_space(&e.t);
    let im_a = image_space(&a);
    let a0p_iso = a.rank() == d && im_a == ker_t;
    let bt_zero = (&b * &e.t).is_zero();
    let bp0_iso = bt_zero && b.rank() == d && e.dim() - im_t.dim() == d;
    let s = e.shift();
    let intertwines = &s * &a == &a * n && &b * &s == n * &b;
    Ok(LimitWitness {
        p,
        dim_v: d,
        dim_ker_t: ker_t.dim(),
        dim_coker_t: e.dim() - im_t.dim(),
        a0p_iso,
        bp0_iso,
        intertwines,
    })
}

/// Stabilized nearby data: the space `V` with `N` and the verified witnesses.
#[derive(Clone, Debug)]
pub struct PsiLimit {
    pub n: Mat,
    pub a0p: Mat,
    pub bp0: Mat,
    pub witness: LimitWitness,
}

pub fn psi_limit(n: &Mat, p: usize) -> Result<PsiLimit> {
    let w = limit_witness(n, p)?;
    if !w.is_iso() {
        return Err(Error::Precondition(format!(
            "p = {} is below the stabilization threshold: dim ker T = {}, dim coker T = {}, dim V = {}",
            p, w.dim_ker_t, w.dim_coker_t, w.dim_v
        )));
    }
    Ok(PsiLimit { n: n.clone(), a0p: a0p(n, p), bp0: bp0(n, p), witness: w })
}

/// `a` restricts to an isomorphism `ker T_p -> ker T_(p+1)` and `b` induces
/// `coker T_(p+1) -> coker T_p` isomorphically.
pub fn stabilization_check(n: &Mat, p: usize) -> Result<bool> {
    let ep = build_malphap(n, p as i64)?;
    let ep1 = build_malphap(n, p as i64 + 1)?;
    let a = a_map(&ep, &ep1)?;
    let b = b_map(&ep1, &ep)?;
    let kp = kernel_space(&ep.t);
    let kp1 = kernel_space(&ep1.t);
    let a_ok = kp.image_under(&a) == kp1;
    let cok = |e: &ExtendedModule| e.dim() - image_space(&e.t).dim();
    // b is onto and commutes with T, so it is onto on cokernels
    let b_ok = cok(&ep) == cok(&ep1) && b.rank() == ep.dim();
    let wit = &a * &a0p(n, p) == a0p(n, p + 1);
    Ok(a_ok && b_ok && wit && cok(&ep) == n.rows())
}

/// `(phi, N_0, can, var) := (psi(-1), N_-1, N_-1, id)`.
pub fn localize(m: &VGradedModule) -> VGradedModule {
    let n = m.psi_n(&G::int(-1));
    VGradedModule { psi: m.psi.clone(), phi: n.clone(), can: n.clone(), var: Mat::identity(n.rows()) }
}

/// `(phi, N_0, can, var) := (psi(-1), N_-1, id, N_-1)`.
pub fn colocalize(m: &VGradedModule) -> VGradedModule {
    let n = m.psi_n(&G::int(-1));
    VGradedModule { psi: m.psi.clone(), phi: n.clone(), can: Mat::identity(n.rows()), var: n }
}

/// Kernel and cokernel of a map with induced nilpotents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KerCoker {
    pub ker: Vec<Vector>,
    pub ker_n: Mat,
    pub coker_reps: Vec<Vector>,
    pub coker_n: Mat,
}

impl KerCoker {
    pub fn dims(&self) -> (usize, usize) {
        (self.ker.len(), self.coker_reps.len())
    }
}

/// Matrix of `n` restricted to the invariant span of `basis`.
fn restrict(n: &Mat, basis: &[Vector]) -> Result<Mat> {
    let k = basis.len();
    if k == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let b = Mat::from_cols(n.rows(), basis);
    let mut out = Mat::zeros(k, k);
    for (j, v) in basis.iter().enumerate() {
        let x = b.solve(&n.apply(v)).ok_or_else(|| Error::Precondition("subspace is not invariant".into()))?;
        for i in 0..k {
            out[(i, j)] = x[i].clone();
        }
    }
    Ok(out)
}

/// Matrix of `n` on `V / sub` in the basis of the representatives `reps`.
fn on_quotient(n: &Mat, reps: &[Vector], sub: &Subspace) -> Result<Mat> {
    let k = reps.len();
    if k == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let mut cols = reps.to_vec();
    cols.extend(sub.basis().iter().cloned());
    let b = Mat::from_cols(n.rows(), &cols);
    let mut out = Mat::zeros(k, k);
    for (j, v) in reps.iter().enumerate() {
        let x = b.solve(&n.apply(v)).ok_or_else(|| Error::Precondition("subspace is not invariant".into()))?;
        for i in 0..k {
            out[(i, j)] = x[i].clone();
        }
    }
    Ok(out)
}

fn ker_coker(f: &Mat, n_src: &Mat, n_dst: &Mat) -> Result<KerCoker> {
    let ker = kernel_space(f).basis().to_vec();
    let im = image_space(f);
    let reps = Subspace::full(f.rows()).complement_reps(&im);
    Ok(KerCoker {
        ker_n: restrict(n_src, &ker)?,
        ker,
        coker_n: on_quotient(n_dst, &reps, &im)?,
        coker_reps: reps,
    })
}

/// `(ker var, coker var)`: the complex `phi --var--> psi(-1)`.
pub fn h_i_plus(m: &VGradedModule) -> Result<KerCoker> {
    m.check()?;
    ker_coker(&m.var, &m.phi, &m.psi_n(&G::int(-1)))
}

/// `(ker can, coker can)`: the complex `psi(-1) --can--> phi`.
pub fn h_i_dagger(m: &VGradedModule) -> Result<KerCoker> {
    m.check()?;
    ker_coker(&m.can, &m.psi_n(&G::int(-1)), &m.phi)
}

/// Conjugate-dual module: `N -> N^dagger`, `can* = var^dagger`, `var* = can^dagger`;
/// `psi(alpha)` moves to `conj(alpha)`.
pub fn hermitian_dual_quiver(m: &VGradedModule) -> VGradedModule {
    VGradedModule {
        psi: m.psi.iter().map(|(a, n)| (Cx(a.0.conj()), n.adjoint())).collect(),
        phi: m.phi.adjoint(),
        can: m.var.adjoint(),
        var: m.can.adjoint(),
    }
}

/// Least `k` with `N^(k+1) = 0` over all `psi(alpha)`.
pub fn max_nilpotency(m: &VGradedModule) -> Result<usize> {
    let mut k = 0;
    for n in m.psi.values() {
        k = k.max(n.nilpotency_index()?);
    }
    Ok(k)
}

/// True if `alpha` is a legal index of `psi`.
pub fn valid_alpha(alpha: &G) -> bool {
    !cx_lt(alpha, &G::int(-1)) && cx_lt(alpha, &G::zero())
}

//! Exact linear algebra over the Gaussian rationals: echelon forms, subspaces,
//! nilpotent endomorphisms and their monodromy filtrations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational as G;

pub type Vector = Vec<G>;

/// Dense matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<G>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![G::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = G::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<G>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds from integer rows (test and fixture convenience).
    pub fn from_ints(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|x| G::int(*x)).collect()).collect()).unwrap()
    }

    /// Matrix whose columns are the given vectors (of length `n`).
    pub fn from_cols(n: usize, cols: &[Vector]) -> Mat {
        let mut m = Mat::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for i in 0..n {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn diag(entries: &[G]) -> Mat {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Nilpotent Jordan block `J e_k = e_(k+1)` (ones on the subdiagonal).
    pub fn jordan_block(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = G::one();
        }
        m
    }

    pub fn block_diag(blocks: &[Mat]) -> Mat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn conj(&self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        self.transpose().conj()
    }

    pub fn scale(&self, c: &G) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn try_mul(&self, o: &Mat) -> Result<Mat> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut m = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        m.data[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn apply(&self, v: &[G]) -> Vector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = G::zero();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        s += &(&self[(i, j)] * &v[j]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> Mat {
        assert!(self.is_square());
        let mut r = Mat::identity(self.rows);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                        m[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as vectors.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![G::zero(); self.cols];
                v[f] = G::one();
                for (i, &p) in piv.iter().enumerate() {
                    v[p] = -&r[(i, f)];
                }
                v
            })
            .collect()
    }

    /// Basis of the column space.
    pub fn image(&self) -> Vec<Vector> {
        let (_, piv) = self.rref();
        piv.iter().map(|&c| self.col(c)).collect()
    }

    pub fn det(&self) -> Result<G> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut d = G::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Ok(G::zero()) };
            if p != c {
                m.swap_rows(p, c);
                d = -d;
            }
            let piv = m[(c, c)].clone();
            d = &d * &piv;
            let inv = piv.inv();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    let v = &m[(i, j)] - &(&f * &m[(c, j)]);
                    m[(i, j)] = v;
                }
            }
        }
        Ok(d)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = G::one();
        }
        let (r, piv) = aug.rref();
        if n > 0 && (piv.len() < n || piv[n - 1] != n - 1) {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Some solution `x` of `self * x = b`.
    pub fn solve(&self, b: &[G]) -> Option<Vector> {
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![G::zero(); self.cols];
        for (i, &p) in piv.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows).is_zero()
    }

    /// Smallest `k >= 0` with `N^(k+1) = 0`, for nilpotent `N` (0 on the zero space).
    pub fn nilpotency_index(&self) -> Result<usize> {
        if !self.is_nilpotent() {
            return Err(Error::Precondition("endomorphism is not nilpotent".into()));
        }
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() {
            p = &p * self;
            k += 1;
        }
        Ok(k)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = G;
    fn index(&self, (i, j): (usize, usize)) -> &G {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut G {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, o: &Mat) -> Mat {
        self.try_mul(o).expect("matrix shapes")
    }
}
impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}
impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}
impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(&G::int(-1))
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// Subspace of `C^n`, held as a reduced echelon basis (so equality is structural).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace::span(n, &Mat::identity(n).to_rows())
    }

    pub fn span(n: usize, vs: &[Vector]) -> Subspace {
        if vs.is_empty() {
            return Subspace::zero(n);
        }
        let m = Mat::from_rows(vs.to_vec()).unwrap();
        let (r, piv) = m.rref();
        Subspace { n, basis: (0..piv.len()).map(|i| r.row(i)).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[G]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::span(self.n, &vs).dim() == self.dim()
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        self.sum(o).dim() == self.dim()
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(o.basis.iter().cloned());
        Subspace::span(self.n, &vs)
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        if self.dim() == 0 || o.dim() == 0 {
            return Subspace::zero(self.n);
        }
        // x = sum a_i v_i = sum b_j w_j  <=>  [V | -W] (a,b) = 0
        let mut cols = self.basis.clone();
        cols.extend(o.basis.iter().map(|w| w.iter().map(|x| -x).collect::<Vec<_>>()));
        let m = Mat::from_cols(self.n, &cols);
        let vs: Vec<Vector> = m
            .kernel()
            .iter()
            .map(|k| {
                let mut x = vec![G::zero(); self.n];
                for (i, v) in self.basis.iter().enumerate() {
                    for t in 0..self.n {
                        x[t] += &(&k[i] * &v[t]);
                    }
                }
                x
            })
            .collect();
        Subspace::span(self.n, &vs)
    }

    pub fn image_under(&self, m: &Mat) -> Subspace {
        Subspace::span(m.rows(), &self.basis.iter().map(|v| m.apply(v)).collect::<Vec<_>>())
    }

    /// Vectors of `self` completing a basis of `sub` (assumed contained) to one of `self`.
    pub fn complement_reps(&self, sub: &Subspace) -> Vec<Vector> {
        let mut cur = sub.clone();
        let mut reps = Vec::new();
        for v in &self.basis {
            if !cur.contains(v) {
                cur = cur.sum(&Subspace::span(self.n, &[v.clone()]));
                reps.push(v.clone());
            }
        }
        reps
    }
}

pub fn kernel_space(m: &Mat) -> Subspace {
    Subspace::span(m.cols(), &m.kernel())
}

pub fn image_space(m: &Mat) -> Subspace {
    Subspace::span(m.rows(), &m.image())
}

/// Increasing filtration indexed by integers: `M_l` is 0 below `lo` and everything above `hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub n: usize,
    pub steps: BTreeMap<i64, Subspace>,
}

impl Filtration {
    pub fn step(&self, l: i64) -> Subspace {
        if let Some(s) = self.steps.get(&l) {
            return s.clone();
        }
        match self.steps.keys().next() {
            Some(lo) if l < *lo => Subspace::zero(self.n),
            Some(_) => Subspace::full(self.n),
            None => Subspace::full(self.n),
        }
    }

    /// Representatives of a basis of `gr_l = M_l / M_(l-1)`.
    pub fn gr_reps(&self, l: i64) -> Vec<Vector> {
        self.step(l).complement_reps(&self.step(l - 1))
    }

    pub fn gr_dim(&self, l: i64) -> usize {
        self.step(l).dim() - self.step(l - 1).dim()
    }

    /// Indices with nonzero graded piece.
    pub fn support(&self) -> Vec<i64> {
        let (lo, hi) = match (self.steps.keys().next(), self.steps.keys().last()) {
            (Some(a), Some(b)) => (*a, *b + 1),
            _ => return if self.n > 0 { vec![0] } else { vec![] },
        };
        (lo..=hi).filter(|&l| self.gr_dim(l) > 0).collect()
    }
}

/// Monodromy filtration of a nilpotent endomorphism:
/// `M_l = sum_{j >= 0} im N^j  intersect  ker N^(l+1+j)`.
pub fn monodromy_filtration(n: &Mat) -> Result<Filtration> {
    let k = n.nilpotency_index()? as i64;
    let d = n.rows();
    let pows: Vec<Mat> = (0..=(2 * k + 2) as usize).map(|j| n.pow(j)).collect();
    let ker: Vec<Subspace> = pows.iter().map(kernel_space).collect();
    let im: Vec<Subspace> = pows.iter().map(image_space).collect();
    let mut steps = BTreeMap::new();
    for l in -k - 1..=k {
        let mut s = Subspace::zero(d);
        for j in 0.max(-l)..=k {
            let e = (l + 1 + j) as usize;
            s = s.sum(&im[j as usize].intersect(&ker[e]));
        }
        steps.insert(l, s);
    }
    Ok(Filtration { n: d, steps })
}

/// Checks the two defining properties of a monodromy filtration.
pub fn is_monodromy_filtration(n: &Mat, f: &Filtration) -> bool {
    let k = match n.nilpotency_index() {
        Ok(k) => k as i64,
        Err(_) => return false,
    };
    let range = -k - 3..=k + 3;
    for l in range.clone() {
        if !f.step(l - 2).contains_space(&f.step(l).image_under(n)) {
            return false;
        }
    }
    if f.step(-k - 2).dim() != 0 || f.step(k + 2).dim() != n.rows() {
        return false;
    }
    for l in 0..=k + 2 {
        // N^l : gr_l -> gr_{-l} iso: images of gr_l reps, together with M_{-l-1}, span M_{-l}
        let reps = f.gr_reps(l);
        let nl = n.pow(l as usize);
        let imgs: Vec<Vector> = reps.iter().map(|v| nl.apply(v)).collect();
        let target = f.step(-l);
        let low = f.step(-l - 1);
        let spanned = low.sum(&Subspace::span(n.rows(), &imgs));
        if reps.len() != f.gr_dim(-l) || spanned != target || spanned.dim() != low.dim() + reps.len() {
            return false;
        }
    }
    true
}

/// Representatives of the primitive part `ker(N^(l+1) : gr_l -> gr_(-l-2))`.
pub fn primitive_part(n: &Mat, f: &Filtration, l: i64) -> Result<Vec<Vector>> {
    if l < 0 {
        return Err(Error::Domain("primitive parts are defined for l >= 0".into()));
    }
    let reps = f.gr_reps(l);
    if reps.is_empty() {
        return Ok(vec![]);
    }
    let np = n.pow((l + 1) as usize);
    let low = f.step(-l - 3);
    let mut cols: Vec<Vector> = reps.iter().map(|v| np.apply(v)).collect();
    cols.extend(low.basis().iter().cloned());
    let m = Mat::from_cols(n.rows(), &cols);
    let r = reps.len();
    let coeffs: Vec<Vector> = m.kernel().into_iter().map(|k| k[..r].to_vec()).collect();
    let coeffs = Subspace::span(r, &coeffs);
    Ok(coeffs
        .basis()
        .iter()
        .map(|c| {
            let mut x = vec![G::zero(); n.rows()];
            for (ci, v) in c.iter().zip(&reps) {
                for t in 0..x.len() {
                    x[t] += &(ci * &v[t]);
                }
            }
            x
        })
        .collect())
}

/// Lefschetz decomposition `gr_l = sum_k N^k P gr_(l+2k)`; keys are `(l, k)`.
#[derive(Clone, Debug)]
pub struct Lefschetz {
    pub pieces: BTreeMap<(i64, i64), Vec<Vector>>,
    pub direct: bool,
}

pub fn lefschetz_decompose(n: &Mat) -> Result<Lefschetz> {
    let f = monodromy_filtration(n)?;
    let k = n.nilpotency_index()? as i64;
    let mut prim = BTreeMap::new();
    for j in 0..=k {
        prim.insert(j, primitive_part(n, &f, j)?);
    }
    let mut pieces = BTreeMap::new();
    let mut direct = true;
    for l in -k..=k {
        let mut all: Vec<Vector> = Vec::new();
        for kk in 0.max(-l)..=k {
            let j = l + 2 * kk;
            if j > k || kk > j {
                continue;
            }
            let nk = n.pow(kk as usize);
            let vs: Vec<Vector> = prim[&j].iter().map(|v| nk.apply(v)).collect();
            all.extend(vs.iter().cloned());
            if !vs.is_empty() {
                pieces.insert((l, kk), vs);
            }
        }
        let low = f.step(l - 1);
        let span = low.sum(&Subspace::span(n.rows(), &all));
        if span != f.step(l) || span.dim() != low.dim() + all.len() {
            direct = false;
        }
    }
    Ok(Lefschetz { pieces, direct })
}

/// Jordan block sizes (descending) from the ranks of powers.
pub fn jordan_type(n: &Mat) -> Result<Vec<usize>> {
    if !n.is_nilpotent() {
        return Err(Error::Precondition("endomorphism is not nilpotent".into()));
    }
    let d = n.rows();
    let ranks: Vec<usize> = (0..=d + 1).map(|j| n.pow(j).rank()).collect();
    let mut out = Vec::new();
    for s in (1..=d).rev() {
        // blocks of size >= s minus blocks of size >= s+1
        let ge = |s: usize| ranks[s - 1] - ranks[s];
        let count = ge(s) - ge(s + 1);
        out.extend(std::iter::repeat(s).take(count));
    }
    Ok(out)
}

/// Nilpotent matrix with the given Jordan type.
pub fn jordan_matrix(blocks: &[usize]) -> Mat {
    Mat::block_diag(&blocks.iter().map(|&s| Mat::jordan_block(s)).collect::<Vec<_>>())
}

//! Oracles built from first principles, shared by the integration tests.
#![allow(dead_code)]

use num_traits::{ToPrimitive, Zero};
use rhdist::nilalg::{kernel_space, Vector};
use rhdist::{GaussianRational as G, Germ, Mat, PoleLedger, Scalar, Subspace};

/// `int_0^1 x^(z-1) (log x)^p dx` by Simpson's rule after `x = exp(-y)`.
pub fn radial_moment_numeric(z: f64, p: u32) -> f64 {
    let upper = 80.0 / z;
    let n = 200_000usize;
    let h = upper / n as f64;
    let f = |y: f64| (-z * y).exp() * (-y).powi(p as i32);
    let mut acc = f(0.0) + f(upper);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Closed form `(-1)^p p! / z^(p+1)` as `(numerator, power)`.
pub fn radial_moment_closed(p: u32) -> (i64, u32) {
    let fact: i64 = (1..=p as i64).product();
    (if p % 2 == 0 { fact } else { -fact }, p + 1)
}

/// Principal parts of `<g, t^k1 tb^k2 |t|^(2s) dt^dtb>` from the radial integral.
///
/// A monomial `c t^a tb^b u(alpha,p)` is `c t^a tb^b |t|^(-2(alpha+1)) (log|t|^2)^p / p!`.
/// The angle kills it unless `a + k1 = b + k2 = n`; otherwise with `x = |t|^2`,
/// `dt^dtb = -2i r dr dtheta` gives `-tau / p! * int_0^1 x^(s - s0 - 1) (log x)^p dx`
/// with `s0 = alpha - n`.
pub fn oracle_ledger(g: &Germ, k1: i64, k2: i64) -> PoleLedger {
    let mut l = PoleLedger::new();
    for m in g.monomials() {
        if m.a + k1 != m.b + k2 {
            continue;
        }
        let n = m.a + k1;
        let s0 = &m.alpha - &G::int(n);
        let (num, pow) = radial_moment_closed(m.p);
        let fact: i64 = (1..=m.p as i64).product();
        let c = (-&m.coeff.mul_tau(1)).scale_gr(&G::frac(num, fact));
        l.add_term(&s0, pow as usize, &c);
    }
    l
}

/// `int (log |t|^2) d_t d_tb exp(-|t|^2) dt^dtb` divided by `2 pi i`, numerically;
/// the distribution identity `d_t d_tb log|t|^2 = -tau delta` predicts `-1`.
pub fn green_pairing_over_tau() -> f64 {
    // d_t d_tb e^(-r^2) = (r^2 - 1) e^(-r^2); with x = r^2 the integral is
    // -2i * pi * int_0^inf log(x) (x - 1) e^(-x) dx
    let upper = 60.0;
    let n = 400_000usize;
    let h = upper / n as f64;
    let f = |x: f64| if x == 0.0 { 0.0 } else { x.ln() * (x - 1.0) * (-x).exp() };
    // the log singularity at 0 is integrable; skip the first cell and add it analytically
    let x0 = h;
    let head = {
        // int_0^h log(x)(x-1) dx, e^-x ~ 1
        let a = |x: f64| if x == 0.0 { 0.0 } else { x * x / 2.0 * x.ln() - x * x / 4.0 - (x * x.ln() - x) };
        a(x0) - a(0.0)
    };
    let m = n - 1;
    let hh = (upper - x0) / m as f64;
    let mut acc = f(x0) + f(upper);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(x0 + k as f64 * hh);
    }
    let integral = head + acc * hh / 3.0;
    // -2i pi I / (2 pi i) = -I
    -integral
}

/// Monodromy filtration from an explicit Jordan basis: a chain `v, Nv, ..., N^(L-1) v`
/// puts `N^j v` in weight `L - 1 - 2j`.
pub fn chain_filtration(n: &Mat) -> Vec<(i64, Subspace)> {
    let d = n.rows();
    let kers: Vec<Subspace> = (0..=d).map(|s| kernel_space(&n.pow(s))).collect();
    let mut chains: Vec<(Vector, usize)> = Vec::new();
    for s in (1..=d).rev() {
        let mut low = kers[s - 1].clone();
        for (v, len) in &chains {
            if *len > s {
                low = low.sum(&Subspace::span(d, &[n.pow(len - s).apply(v)]));
            }
        }
        for v in kers[s].complement_reps(&low) {
            low = low.sum(&Subspace::span(d, &[v.clone()]));
            chains.push((v, s));
        }
    }
    let total: usize = chains.iter().map(|c| c.1).sum();
    assert_eq!(total, d, "Jordan chains do not span");
    let dd = d as i64;
    (-dd - 1..=dd)
        .map(|l| {
            let mut vs = Vec::new();
            for (v, len) in &chains {
                for j in 0..*len {
                    if *len as i64 - 1 - 2 * j as i64 <= l {
                        vs.push(n.pow(j).apply(v));
                    }
                }
            }
            (l, Subspace::span(d, &vs))
        })
        .collect()
}

fn int_mat_mul(a: &[i64], b: &[i64], d: usize) -> Vec<i64> {
    let mut c = vec![0; d * d];
    for i in 0..d {
        for k in 0..d {
            if a[i * d + k] != 0 {
                for j in 0..d {
                    c[i * d + j] += a[i * d + k] * b[k * d + j];
                }
            }
        }
    }
    c
}

fn is_nilpotent_int(a: &[i64], d: usize) -> bool {
    let mut p = a.to_vec();
    for _ in 1..d {
        p = int_mat_mul(&p, a, d);
    }
    p.iter().all(|x| *x == 0)
}

fn to_mat(a: &[i64], d: usize) -> Mat {
    Mat::from_rows((0..d).map(|i| (0..d).map(|j| G::int(a[i * d + j])).collect()).collect()).unwrap()
}

fn decode(mut idx: u64, len: usize) -> Vec<i64> {
    (0..len)
        .map(|_| {
            let x = (idx % 3) as i64 - 1;
            idx /= 3;
            x
        })
        .collect()
}

/// Nilpotent matrices with entries in {-1, 0, 1}: every one of dimension <= 3, and for
/// dimension 4 the strictly triangular ones under a few permutations plus a strided scan.
pub fn small_nilpotents(cap4: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for d in 1..=3usize {
        for idx in 0..3u64.pow((d * d) as u32) {
            let a = decode(idx, d * d);
            if is_nilpotent_int(&a, d) {
                out.push(to_mat(&a, d));
            }
        }
    }
    let d = 4;
    let upper: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let perms: [[usize; 4]; 3] = [[0, 1, 2, 3], [2, 0, 3, 1], [3, 1, 0, 2]];
    let mut four = Vec::new();
    for perm in perms {
        for idx in 0..3u64.pow(upper.len() as u32) {
            let vals = decode(idx, upper.len());
            let mut a = vec![0i64; 16];
            for ((i, j), v) in upper.iter().zip(vals) {
                a[perm[*i] * d + perm[*j]] = v;
            }
            four.push(a);
        }
    }
    let total = 3u64.pow(16);
    let mut idx = 0u64;
    while idx < total {
        let a = decode(idx, 16);
        if is_nilpotent_int(&a, d) {
            four.push(a);
        }
        idx += 7919;
    }
    // spread the cap over the whole list
    let step = (four.len() / cap4.max(1)).max(1);
    out.extend(four.iter().step_by(step).take(cap4).map(|a| to_mat(a, d)));
    out
}

/// `prod_i sum_{k <= R_i} -tau / (m_i s + a_i + k + 1)` evaluated at `s`, or zero when
/// some `a_i != b_i`: each factor is `int_{|x|<1} |x|^(2 m s) x^a xb^b |x|^(2k) dx^dxb`.
pub fn direct_product_integral(exps: &[u32], vars: &[(i64, i64)], radial: &[u32], s: &G) -> Scalar {
    let mut acc = Scalar::one();
    for ((m, (a, b)), r) in exps.iter().zip(vars).zip(radial) {
        if a != b {
            return Scalar::zero();
        }
        let mut f = G::zero();
        for k in 0..=*r as i64 {
            let den = &(&G::int(*m as i64) * s) + &G::int(a + k + 1);
            f = &f - &den.inv();
        }
        acc = &acc * &Scalar::monomial(f, 1);
    }
    acc
}

pub fn principal_part_at(l: &PoleLedger, s0: &G, eps: &G) -> Scalar {
    let mut acc = Scalar::zero();
    let order = l.order_at(s0);
    for m in 1..=order {
        acc = &acc + &l.coeff(s0, m).scale_gr(&eps.pow(m as u32).inv());
    }
    acc
}

pub fn to_f64(x: &G) -> (f64, f64) {
    (x.re.to_f64().unwrap(), x.im.to_f64().unwrap())
}

/// Largest absolute value of a coefficient.
pub fn scalar_norm(s: &Scalar) -> f64 {
    s.terms().map(|(_, c)| {
        let (a, b) = to_f64(c);
        a.hypot(b)
    }).fold(0.0, f64::max)
}

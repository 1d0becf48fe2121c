#![allow(dead_code)]

//! Reference implementations that share no code with the library: Pauli
//! matrices from Kronecker products, a cyclic Jacobi eigensolver and a
//! Taylor-series matrix exponential.

use hamcert::pauli::PauliSum;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single(letter: char) -> CMat {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        'I' => CMat::from_row_slice(2, 2, &[one, z, z, one]),
        'X' => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
        other => panic!("bad letter {other}"),
    }
}

/// Leftmost letter acts on the most significant tensor factor.
pub fn pauli_kron(label: &str) -> CMat {
    label
        .chars()
        .fold(CMat::identity(1, 1), |acc, l| acc.kronecker(&single(l)))
}

pub fn dense_kron(h: &PauliSum) -> CMat {
    let dim = 1 << h.num_qubits();
    let mut m = CMat::zeros(dim, dim);
    for (p, coeff) in h.iter() {
        m += pauli_kron(&p.to_string()) * c(coeff, 0.0);
    }
    m
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_symmetric(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Hermitian eigenvalues through the real embedding `[[A, -B], [B, A]]`,
/// whose spectrum is that of `A + iB` with every value doubled.
pub fn jacobi_hermitian(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    jacobi_symmetric(r).into_iter().step_by(2).collect()
}

/// `exp(-i t H)` by scaling and squaring a truncated Taylor series.
pub fn expm_taylor(h: &CMat, t: f64) -> CMat {
    let a = h * c(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as u32) + 4;
    let scaled = &a * c(2f64.powi(-(squarings as i32)), 0.0);
    let dim = h.nrows();
    let mut term = CMat::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled * c(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn op_norm(m: &CMat) -> f64 {
    m.clone().singular_values().max()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

/// Smallest mean-square displacement over all matchings of two lists.
pub fn best_matching(a: &[f64], b: &[f64]) -> f64 {
    fn go(a: &[f64], b: &mut Vec<f64>, depth: usize, acc: f64, best: &mut f64) {
        if depth == a.len() {
            *best = best.min(acc);
            return;
        }
        for i in depth..b.len() {
            b.swap(depth, i);
            let d = a[depth] - b[depth];
            go(a, b, depth + 1, acc + d * d, best);
            b.swap(depth, i);
        }
    }
    let mut best = f64::INFINITY;
    go(a, &mut b.to_vec(), 0, 0.0, &mut best);
    best / a.len() as f64
}

/// Two-sided log-log least-squares slope.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

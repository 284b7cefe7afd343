//! Independent dense-matrix oracles for the integration tests.
//!
//! Everything here is built from first principles on small explicit matrices
//! (Kronecker products, Taylor-series exponentials, cyclic Jacobi sweeps) so
//! that agreement with the library is evidence, not circularity.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

// ---------------------------------------------------------------------------
// Elementary gates
// ---------------------------------------------------------------------------

pub fn hadamard_gate() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

pub fn rx_gate(theta: f64) -> CMat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)])
}

pub fn ry_gate(theta: f64) -> CMat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)])
}

pub fn rz_gate(theta: f64) -> CMat {
    let half = theta / 2.0;
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = Complex64::from_polar(1.0, -half);
    m[(1, 1)] = Complex64::from_polar(1.0, half);
    m
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
    )
}

/// Embeds a one-qubit gate on qubit `q` of an `n`-qubit register where qubit
/// 0 is the least significant bit of the basis index, i.e. the full operator
/// is I ⊗ … ⊗ U ⊗ … ⊗ I with U in slot `q` counted from the right.
pub fn gate_on(n: usize, q: usize, u: &CMat) -> CMat {
    let hi = identity(1 << (n - 1 - q));
    let lo = identity(1 << q);
    hi.kronecker(u).kronecker(&lo)
}

/// CNOT as an explicit basis permutation: flips bit `target` of every index
/// whose bit `control` is set.
pub fn cnot_matrix(n: usize, control: usize, target: usize) -> CMat {
    let dim = 1usize << n;
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        let j = if (i >> control) & 1 == 1 {
            i ^ (1 << target)
        } else {
            i
        };
        m[(j, i)] = c(1.0, 0.0);
    }
    m
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// exp(−i·t·H) for a real symmetric H, by scaling-and-squaring with a Taylor
/// series run to machine precision. Small dimensions only.
pub fn expm_neg_i(h: &DMatrix<f64>, t: f64) -> CMat {
    let dim = h.nrows();
    let mut a = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = c(0.0, -t * h[(i, j)]);
        }
    }
    let norm = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max) * dim as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    a /= Complex64::from(2.0f64.powi(squarings as i32));

    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..60 {
        term = &term * &a / Complex64::from(k as f64);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0f64, f64::max) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

// ---------------------------------------------------------------------------
// Eigenvalues
// ---------------------------------------------------------------------------

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// returned ascending. Quadratic convergence makes ~20 sweeps ample for the
/// sizes used in tests.
pub fn jacobi_eigenvalues(sym: &DMatrix<f64>) -> Vec<f64> {
    let dim = sym.nrows();
    let mut a = sym.clone();
    let scale = a.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() < 1e-14 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                // Classic Jacobi angle choice: tan(2φ) = 2a_pq/(a_qq − a_pp).
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cph = 1.0 / (1.0 + t * t).sqrt();
                let sph = t * cph;
                for k in 0..dim {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = cph * akp - sph * akq;
                    a[(k, q)] = sph * akp + cph * akq;
                }
                for k in 0..dim {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = cph * apk - sph * aqk;
                    a[(q, k)] = sph * apk + cph * aqk;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..dim).map(|i| a[(i, i)]).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalue"));
    eigenvalues
}

// ---------------------------------------------------------------------------
// State plumbing
// ---------------------------------------------------------------------------

pub fn to_cvec(amps: &[Complex64]) -> CVec {
    CVec::from_column_slice(amps)
}

pub fn max_amp_diff(a: &CVec, b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// |⟨a|b⟩|² for normalized vectors.
pub fn fidelity_of(a: &CVec, b: &CVec) -> f64 {
    let mut ip = Complex64::default();
    for (x, y) in a.iter().zip(b.iter()) {
        ip += x.conj() * y;
    }
    ip.norm_sqr()
}

//! Shared helpers for the integration tests: independent reference
//! implementations (floating-point Racah sums, a product-basis hyperfine
//! Hamiltonian, a fixed-step RK4 propagator) used to cross-check the crate.
//!
//! Everything here is deliberately written with different algorithms and
//! different number representations than the library code, so agreement is
//! meaningful.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use cpt_sim::{AtomSpec, LindbladGenerator, BOHR_MAGNETON_HZ_PER_G};

/// Natural log of n! for n up to 200, by direct summation.
fn ln_fact(n: i64) -> f64 {
    assert!(n >= 0, "factorial of negative integer");
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Halves a twice-valued integer, requiring it to be even.
fn half(t: i32) -> i64 {
    assert!(t % 2 == 0, "expected an integer twice-value, got {t}");
    (t / 2) as i64
}

fn triangle_ok(ta: i32, tb: i32, tc: i32) -> bool {
    tc <= ta + tb && tc >= (ta - tb).abs() && (ta + tb + tc) % 2 == 0
}

/// Log of the triangle coefficient Delta(a,b,c) (its square, halved later).
fn ln_triangle(ta: i32, tb: i32, tc: i32) -> f64 {
    ln_fact(half(ta + tb - tc)) + ln_fact(half(ta - tb + tc)) + ln_fact(half(-ta + tb + tc))
        - ln_fact(half(ta + tb + tc) + 1)
}

/// Wigner 3j symbol from the Racah single-sum formula, evaluated in log
/// space with f64 arithmetic. Arguments are twice-values.
pub fn oracle_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if !triangle_ok(tj1, tj2, tj3) {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }

    let ln_pre = 0.5
        * (ln_triangle(tj1, tj2, tj3)
            + ln_fact(half(tj1 + tm1))
            + ln_fact(half(tj1 - tm1))
            + ln_fact(half(tj2 + tm2))
            + ln_fact(half(tj2 - tm2))
            + ln_fact(half(tj3 + tm3))
            + ln_fact(half(tj3 - tm3)));

    let kmin = 0.max(half(tj2 - tj3 - tm1).max(half(tj1 - tj3 + tm2)));
    let kmax = half(tj1 + tj2 - tj3)
        .min(half(tj1 - tm1))
        .min(half(tj2 + tm2));

    let mut sum = 0.0f64;
    for k in kmin..=kmax {
        let ln_den = ln_fact(k)
            + ln_fact(half(tj1 + tj2 - tj3) - k)
            + ln_fact(half(tj1 - tm1) - k)
            + ln_fact(half(tj2 + tm2) - k)
            + ln_fact(half(tj3 - tj2 + tm1) + k)
            + ln_fact(half(tj3 - tj1 - tm2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_pre - ln_den).exp();
    }

    let phase = if half(tj1 - tj2 - tm3) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    phase * sum
}

/// Wigner 6j symbol from the Racah single-sum formula. Twice-values.
pub fn oracle_6j(ta: i32, tb: i32, tc: i32, td: i32, te: i32, tf: i32) -> f64 {
    if !triangle_ok(ta, tb, tc)
        || !triangle_ok(ta, te, tf)
        || !triangle_ok(td, tb, tf)
        || !triangle_ok(td, te, tc)
    {
        return 0.0;
    }

    let ln_pre = 0.5
        * (ln_triangle(ta, tb, tc)
            + ln_triangle(ta, te, tf)
            + ln_triangle(td, tb, tf)
            + ln_triangle(td, te, tc));

    let t1 = half(ta + tb + tc);
    let t2 = half(ta + te + tf);
    let t3 = half(td + tb + tf);
    let t4 = half(td + te + tc);
    let q1 = half(ta + tb + td + te);
    let q2 = half(tb + tc + te + tf);
    let q3 = half(ta + tc + td + tf);

    let kmin = t1.max(t2).max(t3).max(t4);
    let kmax = q1.min(q2).min(q3);

    let mut sum = 0.0f64;
    for k in kmin..=kmax {
        let ln_term = ln_fact(k + 1)
            - ln_fact(k - t1)
            - ln_fact(k - t2)
            - ln_fact(k - t3)
            - ln_fact(k - t4)
            - ln_fact(q1 - k)
            - ln_fact(q2 - k)
            - ln_fact(q3 - k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_pre + ln_term).exp();
    }
    sum
}

/// Clebsch-Gordan coefficient <j1 m1, j2 m2 | j3 m3> via the 3j oracle.
pub fn oracle_cg(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj3: i32, tm3: i32) -> f64 {
    let phase = if half(tj1 - tj2 + tm3) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    phase * ((tj3 + 1) as f64).sqrt() * oracle_3j(tj1, tj2, tj3, tm1, tm2, -tm3)
}

/// Angular momentum operators for spin `tj/2` in the ascending-m basis:
/// returns (J_z, J_plus).
fn spin_ops(tj: i32) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = (tj + 1) as usize;
    let j = tj as f64 / 2.0;
    let mut jz = DMatrix::zeros(dim, dim);
    let mut jp = DMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let m = -j + idx as f64;
        jz[(idx, idx)] = m;
        if idx + 1 < dim {
            jp[(idx + 1, idx)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    (jz, jp)
}

/// Sorted eigenvalues (Hz) of the ground-manifold hyperfine + Zeeman
/// Hamiltonian A I.J + mu_B B (g_J J_z + g_I I_z), built in the uncoupled
/// |m_I, m_J> product basis and diagonalized numerically. The hyperfine
/// constant is fixed by the zero-field splitting, A = Delta / (I + 1/2).
pub fn hyperfine_zeeman_eigenvalues(atom: &AtomSpec, b_gauss: f64) -> Vec<f64> {
    let ti = atom.nuclear_spin.twice();
    let (iz, ip) = spin_ops(ti);
    let (jz, jp) = spin_ops(1);
    let im = ip.transpose();
    let jm = jp.transpose();

    let dim_i = (ti + 1) as usize;
    let id_i = DMatrix::<f64>::identity(dim_i, dim_i);
    let id_j = DMatrix::<f64>::identity(2, 2);

    let i_dot_j =
        iz.kronecker(&jz) + 0.5 * (ip.kronecker(&jm) + im.kronecker(&jp));
    let a_hz = atom.ground_hfs_hz / (0.5 * ti as f64 + 0.5);
    let zeeman = BOHR_MAGNETON_HZ_PER_G
        * b_gauss
        * (atom.g_j_ground * id_i.kronecker(&jz) + atom.g_i * iz.kronecker(&id_j));

    let h = a_hz * i_dot_j + zeeman;
    let mut vals: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Fixed-step RK4 propagation of vec(rho) under the Lindblad generator,
/// starting from `rho0`, for `steps` steps of length `dt` seconds.
/// Returns the final density matrix (not renormalized).
pub fn rk4_propagate(
    gen: &LindbladGenerator,
    rho0: &DMatrix<Complex64>,
    dt: f64,
    steps: usize,
) -> DMatrix<Complex64> {
    let n = gen.dim;
    assert_eq!(rho0.nrows(), n);
    let l = &gen.superoperator;
    let mut x = DVector::from_iterator(n * n, rho0.iter().copied());
    for _ in 0..steps {
        let k1 = l * &x;
        let k2 = l * (&x + k1.scale(dt / 2.0));
        let k3 = l * (&x + k2.scale(dt / 2.0));
        let k4 = l * (&x + k3.scale(dt));
        x += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    DMatrix::from_iterator(n, n, x.iter().copied())
}

/// Maximum absolute row sum of the superoperator, a cheap bound on its
/// spectral radius, used to pick a stable RK4 step.
pub fn superop_inf_norm(gen: &LindbladGenerator) -> f64 {
    let l = &gen.superoperator;
    (0..l.nrows())
        .map(|r| l.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximally mixed ground-manifold state for a system with `n_ground`
/// ground levels out of `dim` total.
pub fn mixed_ground_state(dim: usize, n_ground: usize) -> DMatrix<Complex64> {
    let mut rho = DMatrix::zeros(dim, dim);
    for g in 0..n_ground {
        rho[(g, g)] = Complex64::new(1.0 / n_ground as f64, 0.0);
    }
    rho
}

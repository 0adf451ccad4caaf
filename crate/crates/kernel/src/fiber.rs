//! Flat hyperkaehler algebra of the 4-torus fiber.
//!
//! The complex structures I, J, K are 4x4 matrices on the frame {e4..e7},
//! fixed by the compatibility convention omega_A(u, w) = <A u, w> with the
//! standard Kaehler-form constants
//!   omega_I = e4^e5 + e6^e7,
//!   omega_J = e4^e6 - e5^e7,
//!   omega_K = e4^e7 + e5^e6.
//! With this choice IJ = K on vector fields; on 1-forms the action is the
//! transpose, so IJ = -K there.

use crate::exterior::{basis_dim, basis_rank, merge_sign};
use nalgebra::Matrix4;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quat {
    I,
    J,
    K,
}

/// Vector-field action of I: e4 -> e5, e5 -> -e4, e6 -> e7, e7 -> -e6.
pub fn mat_i() -> Matrix4<f64> {
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

/// Vector-field action of J: e4 -> e6, e6 -> -e4, e5 -> -e7, e7 -> e5.
pub fn mat_j() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// Vector-field action of K: e4 -> e7, e7 -> -e4, e5 -> e6, e6 -> -e5.
pub fn mat_k() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

pub fn quat_matrix(q: Quat) -> Matrix4<f64> {
    match q {
        Quat::I => mat_i(),
        Quat::J => mat_j(),
        Quat::K => mat_k(),
    }
}

/// alpha I + beta J + gamma K as a vector-field action.
pub fn quat_combination(alpha: f64, beta: f64, gamma: f64) -> Matrix4<f64> {
    mat_i() * alpha + mat_j() * beta + mat_k() * gamma
}

/// Apply I, J or K to a fiber vector.
pub fn quaternion_action(q: Quat, v: [f64; 4]) -> [f64; 4] {
    let m = quat_matrix(q);
    let w = m * nalgebra::Vector4::from_column_slice(&v);
    [w[0], w[1], w[2], w[3]]
}

/// Kaehler-form constants as (letter, letter, coefficient) triples over the
/// 6-frame letters (e4 = 2, ..., e7 = 5).
pub fn omega_pairs(q: Quat) -> [(usize, usize, f64); 2] {
    match q {
        Quat::I => [(2, 3, 1.0), (4, 5, 1.0)],
        Quat::J => [(2, 4, 1.0), (3, 5, -1.0)],
        Quat::K => [(2, 5, 1.0), (3, 4, 1.0)],
    }
}

/// Coefficient vector of a constant 2-form over the degree-2 basis.
pub fn omega_coeffs(q: Quat) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); basis_dim(2)];
    for (a, b, s) in omega_pairs(q) {
        let sign = merge_sign(1 << a, 1 << b).unwrap();
        c[basis_rank((1 << a) | (1 << b))] += Complex64::new(s * sign, 0.0);
    }
    c
}

/// alpha omega_I + beta omega_J + gamma omega_K as a degree-2 coefficient vector.
pub fn omega_combination(alpha: f64, beta: f64, gamma: f64) -> Vec<Complex64> {
    let mut c = omega_coeffs(Quat::I);
    for (x, y) in c.iter_mut().zip(omega_coeffs(Quat::J)) {
        *x = *x * alpha + y * beta;
    }
    for (x, y) in c.iter_mut().zip(omega_coeffs(Quat::K)) {
        *x += y * gamma;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{basis_rank, wedge_table};

    fn close4(a: &Matrix4<f64>, b: &Matrix4<f64>) -> bool {
        (a - b).amax() < 1e-15
    }

    /// Independent oracle: solve <A e_j, e_k> = omega_A(e_j, e_k) for A.
    /// In the orthonormal frame this reads A[k][j] = omega_A(e_j, e_k).
    fn quat_from_form(q: Quat) -> Matrix4<f64> {
        let mut w = Matrix4::zeros();
        for (a, b, s) in omega_pairs(q) {
            w[(a - 2, b - 2)] = s;
            w[(b - 2, a - 2)] = -s;
        }
        // omega(e_j, e_k) = w[j][k]; A[k][j] = w[j][k] => A = w^T
        w.transpose()
    }

    #[test]
    fn quaternion_matrices_solve_the_compatibility_equations() {
        assert!(close4(&mat_i(), &quat_from_form(Quat::I)));
        assert!(close4(&mat_j(), &quat_from_form(Quat::J)));
        assert!(close4(&mat_k(), &quat_from_form(Quat::K)));
    }

    #[test]
    fn quaternion_relations() {
        let (i, j, k) = (mat_i(), mat_j(), mat_k());
        let neg_id = -Matrix4::identity();
        assert!(close4(&(i * i), &neg_id));
        assert!(close4(&(j * j), &neg_id));
        assert!(close4(&(k * k), &neg_id));
        assert!(close4(&(i * j * k), &neg_id));
        assert!(close4(&(i * j), &k));
        assert!(close4(&(j * k), &i));
        assert!(close4(&(k * i), &j));
        // orthogonality
        assert!(close4(&(i.transpose() * i), &Matrix4::identity()));
        assert!(close4(&(j.transpose() * j), &Matrix4::identity()));
        assert!(close4(&(k.transpose() * k), &Matrix4::identity()));
    }

    #[test]
    fn action_on_basis_vectors() {
        assert_eq!(quaternion_action(Quat::I, [1.0, 0.0, 0.0, 0.0]), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(quaternion_action(Quat::K, [0.0, 1.0, 0.0, 0.0]), [0.0, 0.0, 1.0, 0.0]);
        let ie4 = quaternion_action(Quat::I, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(quaternion_action(Quat::I, ie4), [-1.0, 0.0, 0.0, 0.0]);
    }

    fn wedge2(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); crate::exterior::basis_dim(4)];
        for t in wedge_table(2, 2) {
            out[t.out] += a[t.ia] * b[t.ib] * t.sign;
        }
        out
    }

    #[test]
    fn kaehler_forms_pair_to_twice_the_fiber_volume() {
        let vol_idx = basis_rank(0b111100);
        let forms = [Quat::I, Quat::J, Quat::K];
        for qa in forms {
            for qb in forms {
                let w = wedge2(&omega_coeffs(qa), &omega_coeffs(qb));
                let expect = if qa == qb { 2.0 } else { 0.0 };
                for (idx, c) in w.iter().enumerate() {
                    let want = if idx == vol_idx { expect } else { 0.0 };
                    assert!((c.re - want).abs() < 1e-15 && c.im.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn unit_combinations_square_to_twice_the_volume() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let vol_idx = basis_rank(0b111100);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let z: f64 = rng.gen_range(-1.0..1.0);
            let n = (x * x + y * y + z * z).sqrt().max(1e-3);
            let (a, b, g) = (x / n, y / n, z / n);
            let c = omega_combination(a, b, g);
            let sq = wedge2(&c, &c);
            assert!((sq[vol_idx].re - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_combination_basis_cases() {
        let wi = omega_combination(1.0, 0.0, 0.0);
        assert_eq!(wi, omega_coeffs(Quat::I));
        let wk = omega_combination(0.0, 0.0, 1.0);
        assert_eq!(wk, omega_coeffs(Quat::K));
        // e4^e7 + e5^e6 coefficients
        assert!((wk[basis_rank(0b100100)].re - 1.0).abs() < 1e-15);
        assert!((wk[basis_rank(0b011000)].re - 1.0).abs() < 1e-15);
    }
}

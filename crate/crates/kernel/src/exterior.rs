//! Exterior-algebra combinatorics on the 6-dimensional coframe
//! {du, dv, e4, e5, e6, e7}.
//!
//! Basis k-forms are strictly increasing multi-indices encoded as bitmasks
//! over the frame letters 0..5.  The routines here are generic over a scalar
//! ring so the same wedge/projection code runs on plain complex grid values
//! and on truncated jets.

use num_complex::Complex64;
use std::sync::OnceLock;

pub const FRAME_DIM: usize = 6;

/// Scalar ring for exterior-algebra kernels.  `Complex64` and jets implement it.
pub trait Ring: Clone {
    fn zero() -> Self;
    fn add_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiply by a complex constant.
    fn scale(&self, c: Complex64) -> Self;
    /// Magnitude used for residual reporting.
    fn norm(&self) -> f64;
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn norm(&self) -> f64 {
        num_complex::Complex::norm(*self)
    }
}

/// Number of basis k-forms.
pub fn basis_dim(k: usize) -> usize {
    const BINOM: [usize; 7] = [1, 6, 15, 20, 15, 6, 1];
    BINOM[k]
}

struct BasisTables {
    /// masks[k] lists the bitmasks of degree k in ascending order.
    masks: Vec<Vec<u8>>,
    /// rank[mask] = position of `mask` within its degree list.
    rank: [usize; 64],
}

fn tables() -> &'static BasisTables {
    static T: OnceLock<BasisTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut masks: Vec<Vec<u8>> = vec![Vec::new(); 7];
        let mut rank = [0usize; 64];
        for m in 0u8..64 {
            let k = m.count_ones() as usize;
            rank[m as usize] = masks[k].len();
            masks[k].push(m);
        }
        BasisTables { masks, rank }
    })
}

/// Bitmasks of the degree-k basis, ascending.
pub fn basis_masks(k: usize) -> &'static [u8] {
    &tables().masks[k]
}

/// Index of `mask` within its degree's basis list.
pub fn basis_rank(mask: u8) -> usize {
    tables().rank[mask as usize]
}

/// Letters of a mask in ascending order.
pub fn mask_letters(mask: u8) -> impl Iterator<Item = usize> {
    (0..FRAME_DIM).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of merging two disjoint ascending multi-indices, or None if they share
/// a letter.
pub fn merge_sign(a: u8, b: u8) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    // count transpositions: for each letter of b, letters of a above it
    let mut inv = 0u32;
    for j in mask_letters(b) {
        inv += (a >> (j + 1)).count_ones();
    }
    Some(if inv % 2 == 0 { 1.0 } else { -1.0 })
}

/// Precomputed wedge table entry: c[out] += sign * a[ia] * b[ib].
#[derive(Clone, Copy)]
pub struct WedgeTerm {
    pub ia: usize,
    pub ib: usize,
    pub out: usize,
    pub sign: f64,
}

/// Multiplication table for degree ka wedge degree kb.
pub fn wedge_table(ka: usize, kb: usize) -> Vec<WedgeTerm> {
    let mut terms = Vec::new();
    for (ia, &ma) in basis_masks(ka).iter().enumerate() {
        for (ib, &mb) in basis_masks(kb).iter().enumerate() {
            if let Some(sign) = merge_sign(ma, mb) {
                terms.push(WedgeTerm {
                    ia,
                    ib,
                    out: basis_rank(ma | mb),
                    sign,
                });
            }
        }
    }
    terms
}

/// Sign of sorting `letters` ascending; None if a letter repeats.
fn sort_sign(letters: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..letters.len() {
        for j in (i + 1..letters.len()).rev() {
            if letters[j - 1] > letters[j] {
                letters.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    for w in letters.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

/// Apply the derivation extension of a 6x6 cotangent operator `c` (entry
/// c[a][p] = coefficient of frame letter a in the image of letter p) to the
/// coefficient vector `v` of a degree-k form.
pub fn apply_derivation<R: Ring>(c: &[[R; FRAME_DIM]; FRAME_DIM], k: usize, v: &[R]) -> Vec<R> {
    let masks = basis_masks(k);
    let mut out = vec![R::zero(); masks.len()];
    for (t, &mask) in masks.iter().enumerate() {
        let letters: Vec<usize> = mask_letters(mask).collect();
        for (slot, &p) in letters.iter().enumerate() {
            for a in 0..FRAME_DIM {
                let mut repl = letters.clone();
                repl[slot] = a;
                if let Some(sign) = sort_sign(&mut repl) {
                    let mut m = 0u8;
                    for &l in &repl {
                        m |= 1 << l;
                    }
                    let term = c[a][p].mul(&v[t]).scale(Complex64::new(sign, 0.0));
                    out[basis_rank(m)].add_assign(&term);
                }
            }
        }
    }
    out
}

/// Achievable (p,q) bidegrees on a complex 3-fold for total degree k.
pub fn bidegrees(k: usize) -> Vec<(usize, usize)> {
    (0..=k)
        .filter(|&p| p <= 3 && k - p <= 3)
        .map(|p| (p, k - p))
        .collect()
}

/// Project the coefficient vector of a degree-k form onto its (p,q) part.
///
/// `c` is the complexified action of the almost complex structure on the
/// coframe; (1,0)-forms are its +i eigenvectors.  The projector is the
/// Lagrange interpolation of the spectral projector of the derivation
/// extension, whose eigenvalue on the (p,q) part is i(p-q).
pub fn type_project_vec<R: Ring>(
    c: &[[R; FRAME_DIM]; FRAME_DIM],
    k: usize,
    p: usize,
    q: usize,
    v: &[R],
) -> Vec<R> {
    assert_eq!(p + q, k, "bidegree must sum to form degree");
    let lam = Complex64::new(0.0, (p as f64) - (q as f64));
    let mut w: Vec<R> = v.to_vec();
    for (pp, qq) in bidegrees(k) {
        if (pp, qq) == (p, q) {
            continue;
        }
        let mu = Complex64::new(0.0, (pp as f64) - (qq as f64));
        let qw = apply_derivation(c, k, &w);
        let inv = 1.0 / (lam - mu);
        for (wi, qi) in w.iter_mut().zip(qw.iter()) {
            let shifted = qi.add(&wi.scale(-mu));
            *wi = shifted.scale(inv);
        }
    }
    w
}

// small helper: ring addition returning a value
trait RingAdd: Ring {
    fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        s.add_assign(o);
        s
    }
}
impl<R: Ring> RingAdd for R {}

/// Wedge of k coefficient 6-vectors into a degree-k coefficient vector.
pub fn wedge_vectors<R: Ring>(vs: &[[R; FRAME_DIM]]) -> Vec<R> {
    assert!(!vs.is_empty());
    let mut acc: Vec<R> = vs[0].to_vec();
    let mut deg = 1usize;
    for v in &vs[1..] {
        let table = wedge_table(deg, 1);
        let mut next = vec![R::zero(); basis_dim(deg + 1)];
        for t in &table {
            let term = acc[t.ia].mul(&v[t.ib]).scale(Complex64::new(t.sign, 0.0));
            next[t.out].add_assign(&term);
        }
        acc = next;
        deg += 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn merge_signs_match_hand_values() {
        // du ^ dv within {du,dv}: no inversion
        assert_eq!(merge_sign(0b000001, 0b000010), Some(1.0));
        // dv ^ du: one inversion
        assert_eq!(merge_sign(0b000010, 0b000001), Some(-1.0));
        // shared letter
        assert_eq!(merge_sign(0b000011, 0b000001), None);
        // e4^e5 (letters 2,3) wedged with du^dv (letters 0,1): 4 inversions
        assert_eq!(merge_sign(0b001100, 0b000011), Some(1.0));
    }

    #[test]
    fn wedge_is_graded_commutative() {
        // random-ish coefficient vectors, a deg 2 and b deg 3
        let na = basis_dim(2);
        let nb = basis_dim(3);
        let a: Vec<Complex64> = (0..na).map(|i| c(i as f64 + 0.5, 0.25 * i as f64)).collect();
        let b: Vec<Complex64> = (0..nb).map(|i| c(1.0 - i as f64, 0.1 * i as f64)).collect();
        let mut ab = vec![c(0.0, 0.0); basis_dim(5)];
        for t in wedge_table(2, 3) {
            ab[t.out] += a[t.ia] * b[t.ib] * t.sign;
        }
        let mut ba = vec![c(0.0, 0.0); basis_dim(5)];
        for t in wedge_table(3, 2) {
            ba[t.out] += b[t.ia] * a[t.ib] * t.sign;
        }
        for (x, y) in ab.iter().zip(ba.iter()) {
            // (-1)^{2*3} = 1
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn derivation_matches_eigenvalue_on_pure_types() {
        // standard complex structure on (u,v): J du = -dv? use the cotangent
        // action with (1,0)-form dz = du + i dv: C dz = i dz means
        // C du = dv is wrong; solve: C(du) + iC(dv) = i du - dv.
        // Take C = [[0,-1],[1,0]] block on letters 0,1 (C du = dv, C dv = -du):
        // C(du + i dv) = dv - i du = -i (du + i dv): that's an eigenvalue -i.
        // So with this C, dzbar = du - i dv is the +i eigenvector.
        let mut cm: [[Complex64; 6]; 6] = Default::default();
        cm[1][0] = c(1.0, 0.0); // du -> dv
        cm[0][1] = c(-1.0, 0.0); // dv -> -du
        // fiber letters: C e4 = e5, C e5 = -e4, C e6 = e7, C e7 = -e6
        cm[3][2] = c(1.0, 0.0);
        cm[2][3] = c(-1.0, 0.0);
        cm[5][4] = c(1.0, 0.0);
        cm[4][5] = c(-1.0, 0.0);

        // (du - i dv) ^ (e4 - i e5): product of two +i eigenvectors -> Q eigenvalue 2i
        let omega = {
            let v1 = [c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
            let v2 = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)];
            wedge_vectors(&[v1, v2])
        };
        let q = apply_derivation(&cm, 2, &omega);
        for (qi, oi) in q.iter().zip(omega.iter()) {
            assert!((qi - c(0.0, 2.0) * oi).norm() < 1e-14);
        }
        // projector onto (2,0) must reproduce it, (1,1) must kill it
        let p20 = type_project_vec(&cm, 2, 2, 0, &omega);
        let p11 = type_project_vec(&cm, 2, 1, 1, &omega);
        for i in 0..omega.len() {
            assert!((p20[i] - omega[i]).norm() < 1e-13);
            assert!(p11[i].norm() < 1e-13);
        }
    }

    #[test]
    fn type_projection_partitions_unity() {
        let mut cm: [[Complex64; 6]; 6] = Default::default();
        // same structure as above but with a skewed fiber block to make it
        // less symmetric: C = rotation on base, quaternion-like on fiber
        cm[1][0] = c(1.0, 0.0);
        cm[0][1] = c(-1.0, 0.0);
        let (a, b, g) = (0.6, 0.64, 0.48);
        // a generic orthogonal complex structure on the fiber block
        let m4 = [
            [0.0, -a, -b, -g],
            [a, 0.0, -g, b],
            [b, g, 0.0, -a],
            [g, -b, a, 0.0],
        ];
        // verify m4^2 = -1 before using it
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0f64;
                for k in 0..4 {
                    s += m4[i][k] * m4[k][j];
                }
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                cm[2 + i][2 + j] = c(m4[i][j], 0.0);
            }
        }
        let n = basis_dim(3);
        let v: Vec<Complex64> = (0..n).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        let mut sum = vec![c(0.0, 0.0); n];
        for (p, q) in bidegrees(3) {
            let part = type_project_vec(&cm, 3, p, q, &v);
            for i in 0..n {
                sum[i] += part[i];
            }
        }
        for i in 0..n {
            assert!((sum[i] - v[i]).norm() < 1e-12, "partition of unity fails at {i}");
        }
    }
}

//! Differential forms at a single point with order-2 jet coefficients in all
//! six chart variables.  Exterior derivatives are exact polynomial
//! differentiation of the jets; type projections use jet-valued projector
//! action, so the base-point dependence of the complex structure is carried
//! through correctly.

use crate::exterior::{
    apply_derivation, basis_dim, basis_masks, basis_rank, merge_sign, type_project_vec, FRAME_DIM,
};
use crate::jet::BaseJet;
use crate::jet6::Jet6;
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Jet-valued cotangent action of the almost complex structure, built from
/// order-2 jets of the Gauss components.  Entry [a][p] is the coefficient of
/// frame letter a in the image of letter p, i.e. the transpose of the
/// vector-field matrix.
pub fn cotangent_jet(alpha: &BaseJet, beta: &BaseJet, gamma: &BaseJet) -> [[Jet6; 6]; 6] {
    let a = Jet6::from_base(alpha);
    let b = Jet6::from_base(beta);
    let g = Jet6::from_base(gamma);
    let zero = Jet6::constant(c64(0.0, 0.0));
    let mut c = [[zero; 6]; 6];
    // base block of the vector action: M[1][0] = 1 (du -> dv), M[0][1] = -1
    c[1][0] = Jet6::real_constant(-1.0);
    c[0][1] = Jet6::real_constant(1.0);
    let i = crate::fiber::mat_i();
    let j = crate::fiber::mat_j();
    let k = crate::fiber::mat_k();
    for p in 0..4 {
        for q in 0..4 {
            let m_pq = a
                .scale_c(c64(i[(p, q)], 0.0))
                .add(&b.scale_c(c64(j[(p, q)], 0.0)))
                .add(&g.scale_c(c64(k[(p, q)], 0.0)));
            // vector entry M[p][q]; cotangent C[a][p] = M[p][a]
            c[q + 2][p + 2] = m_pq;
        }
    }
    c
}

/// Degree-k form with jet coefficients.
#[derive(Clone, Debug)]
pub struct JetForm {
    pub degree: usize,
    pub c: Vec<Jet6>,
}

impl JetForm {
    pub fn zero(degree: usize) -> Self {
        JetForm { degree, c: vec![Jet6::constant(c64(0.0, 0.0)); basis_dim(degree)] }
    }

    pub fn scalar(j: Jet6) -> Self {
        JetForm { degree: 0, c: vec![j] }
    }

    pub fn one_form(coeffs: [Jet6; 6]) -> Self {
        JetForm { degree: 1, c: coeffs.to_vec() }
    }

    /// Fiber 2-form a w_I + b w_J + g w_K with jet coefficients.
    pub fn fiber_combination(alpha: &Jet6, beta: &Jet6, gamma: &Jet6) -> Self {
        let mut f = JetForm::zero(2);
        let mut put = |a: usize, b: usize, val: Jet6| {
            let sign = merge_sign(1 << a, 1 << b).unwrap();
            let idx = basis_rank((1u8 << a) | (1u8 << b));
            f.c[idx] = f.c[idx].add(&val.scale_c(c64(sign, 0.0)));
        };
        put(2, 3, *alpha);
        put(4, 5, *alpha);
        put(2, 4, *beta);
        put(3, 5, beta.neg());
        put(2, 5, *gamma);
        put(3, 4, *gamma);
        f
    }

    pub fn add(&self, o: &JetForm) -> JetForm {
        assert_eq!(self.degree, o.degree);
        JetForm {
            degree: self.degree,
            c: self.c.iter().zip(o.c.iter()).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &JetForm) -> JetForm {
        self.add(&o.scale(c64(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> JetForm {
        JetForm { degree: self.degree, c: self.c.iter().map(|a| a.scale_c(k)).collect() }
    }

    pub fn mul_jet(&self, s: &Jet6) -> JetForm {
        JetForm { degree: self.degree, c: self.c.iter().map(|a| a.mul_jet(s)).collect() }
    }

    pub fn wedge(&self, o: &JetForm) -> JetForm {
        let mut out = JetForm::zero(self.degree + o.degree);
        for t in crate::exterior::wedge_table(self.degree, o.degree) {
            let term = self.c[t.ia].mul_jet(&o.c[t.ib]).scale_c(c64(t.sign, 0.0));
            out.c[t.out] = out.c[t.out].add(&term);
        }
        out
    }

    /// Exterior derivative by exact jet differentiation (all six directions;
    /// the frame is closed).
    pub fn ext_d(&self) -> JetForm {
        let mut out = JetForm::zero(self.degree + 1);
        for (b, &mask) in basis_masks(self.degree).iter().enumerate() {
            for letter in 0..FRAME_DIM {
                if mask & (1 << letter) != 0 {
                    continue;
                }
                if let Some(sign) = merge_sign(1 << letter, mask) {
                    let ob = basis_rank((1u8 << letter) | mask);
                    let term = self.c[b].deriv(letter).scale_c(c64(sign, 0.0));
                    out.c[ob] = out.c[ob].add(&term);
                }
            }
        }
        out
    }

    pub fn type_project(&self, p: usize, q: usize, c: &[[Jet6; 6]; 6]) -> JetForm {
        JetForm { degree: self.degree, c: type_project_vec(c, self.degree, p, q, &self.c) }
    }

    pub fn conj(&self) -> JetForm {
        JetForm { degree: self.degree, c: self.c.iter().map(|a| a.conj()).collect() }
    }

    /// Values only (jet centers).
    pub fn values(&self) -> Vec<Complex64> {
        self.c.iter().map(|a| a.v).collect()
    }

    pub fn max_value_norm(&self) -> f64 {
        self.c.iter().map(|a| a.v.norm()).fold(0.0, f64::max)
    }

    /// Derivation extension of a cotangent operator applied to this form.
    pub fn derivation(&self, c: &[[Jet6; 6]; 6]) -> JetForm {
        JetForm { degree: self.degree, c: apply_derivation(c, self.degree, &self.c) }
    }
}

/// (p+1, q) part of d applied to a (p,q)-form.
pub fn del(form: &JetForm, p: usize, q: usize, c: &[[Jet6; 6]; 6]) -> JetForm {
    form.ext_d().type_project(p + 1, q, c)
}

/// (p, q+1) part of d applied to a (p,q)-form.
pub fn delbar(form: &JetForm, p: usize, q: usize, c: &[[Jet6; 6]; 6]) -> JetForm {
    form.ext_d().type_project(p, q + 1, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn d_squared_vanishes_identically_on_jets() {
        let mut s = Jet6::real_constant(0.7);
        for i in 0..6 {
            s.g[i] = c64(0.1 * (i as f64 + 1.0), 0.05 * i as f64);
        }
        for i in 0..21 {
            s.h[i] = c64((i as f64).sin() * 0.2, 0.1);
        }
        let dd = JetForm::scalar(s).ext_d().ext_d();
        assert!(dd.max_value_norm() < 1e-16);
    }

    #[test]
    fn holomorphic_scalar_has_no_dbar_at_a_minimal_point() {
        let ch = builtin("enneper").unwrap();
        let gj = ch.gauss_at(c64(0.1, 0.2)).unwrap();
        let c = cotangent_jet(&gj.alpha, &gj.beta, &gj.gamma);
        let zeta = JetForm::scalar(Jet6::from_base(&gj.zeta));
        let db = delbar(&zeta, 0, 0, &c);
        assert!(db.max_value_norm() < 1e-12, "dbar zeta = {:.3e}", db.max_value_norm());
        let dconj = delbar(&zeta.conj(), 0, 0, &c);
        assert!(dconj.max_value_norm() > 1e-3, "dbar of conj(zeta) must not vanish");
    }

    #[test]
    fn fiber_combination_is_j_invariant_hence_11() {
        let ch = builtin("enneper").unwrap();
        let gj = ch.gauss_at(c64(-0.15, 0.22)).unwrap();
        let c = cotangent_jet(&gj.alpha, &gj.beta, &gj.gamma);
        let phi = JetForm::fiber_combination(
            &Jet6::from_base(&gj.alpha),
            &Jet6::from_base(&gj.beta),
            &Jet6::from_base(&gj.gamma),
        );
        let p11 = phi.type_project(1, 1, &c);
        let diff = p11.sub(&phi);
        assert!(diff.max_value_norm() < 1e-12, "fiber combination must be (1,1)");
        let p20 = phi.type_project(2, 0, &c);
        assert!(p20.max_value_norm() < 1e-12);
    }
}

//! Order-2 jets in the six chart coordinates (u, v, y4..y7).
//!
//! The frame functions L1, L2 depend linearly on the fiber coordinates, so
//! curvature evaluation at a point needs value, gradient and Hessian with
//! respect to all six directions.  Entries are stored derivative-style
//! (gradient = first partials, hess = second partials).

use crate::exterior::Ring;
use num_complex::Complex64;

pub const NVARS: usize = 6;
pub const NHESS: usize = 21;

/// slot of the symmetric Hessian entry (i <= j)
pub const fn hslot(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * NVARS - a * (a + 1) / 2 + b
}

#[derive(Clone, Copy, Debug)]
pub struct Jet6 {
    pub v: Complex64,
    pub g: [Complex64; NVARS],
    pub h: [Complex64; NHESS],
    pub ord: u8,
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Jet6 {
    pub fn constant(v: Complex64) -> Self {
        Jet6 { v, g: [cz(); NVARS], h: [cz(); NHESS], ord: 2 }
    }

    pub fn real_constant(v: f64) -> Self {
        Self::constant(Complex64::new(v, 0.0))
    }

    pub fn variable(i: usize, v: Complex64) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = Complex64::new(1.0, 0.0);
        j
    }

    /// Lift a bivariate jet: slots 0,1 are u,v; fiber derivatives vanish.
    pub fn from_base(b: &crate::jet::BaseJet) -> Self {
        let mut j = Self::constant(b.val());
        j.g[0] = b.du();
        j.g[1] = b.dv();
        j.h[hslot(0, 0)] = b.duu();
        j.h[hslot(0, 1)] = b.duv();
        j.h[hslot(1, 1)] = b.dvv();
        j.ord = b.ord.min(2);
        j
    }

    pub fn add(&self, o: &Jet6) -> Jet6 {
        let mut r = *self;
        r.v += o.v;
        for i in 0..NVARS {
            r.g[i] += o.g[i];
        }
        for i in 0..NHESS {
            r.h[i] += o.h[i];
        }
        r.ord = self.ord.min(o.ord);
        r
    }

    pub fn sub(&self, o: &Jet6) -> Jet6 {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Jet6 {
        let mut r = *self;
        r.v = -r.v;
        for i in 0..NVARS {
            r.g[i] = -r.g[i];
        }
        for i in 0..NHESS {
            r.h[i] = -r.h[i];
        }
        r
    }

    pub fn scale_c(&self, k: Complex64) -> Jet6 {
        let mut r = *self;
        r.v *= k;
        for i in 0..NVARS {
            r.g[i] *= k;
        }
        for i in 0..NHESS {
            r.h[i] *= k;
        }
        r
    }

    pub fn mul_jet(&self, o: &Jet6) -> Jet6 {
        let mut r = Jet6::constant(self.v * o.v);
        for i in 0..NVARS {
            r.g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        for i in 0..NVARS {
            for j in i..NVARS {
                r.h[hslot(i, j)] = self.v * o.h[hslot(i, j)]
                    + o.v * self.h[hslot(i, j)]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        r.ord = self.ord.min(o.ord);
        r
    }

    pub fn conj(&self) -> Jet6 {
        let mut r = *self;
        r.v = r.v.conj();
        for i in 0..NVARS {
            r.g[i] = r.g[i].conj();
        }
        for i in 0..NHESS {
            r.h[i] = r.h[i].conj();
        }
        r
    }

    /// Composition with an analytic function given by f(v), f'(v), f''(v).
    fn compose(&self, f0: Complex64, f1: Complex64, f2: Complex64) -> Jet6 {
        let mut r = Jet6::constant(f0);
        for i in 0..NVARS {
            r.g[i] = f1 * self.g[i];
        }
        for i in 0..NVARS {
            for j in i..NVARS {
                r.h[hslot(i, j)] = f1 * self.h[hslot(i, j)] + f2 * self.g[i] * self.g[j];
            }
        }
        r.ord = self.ord;
        r
    }

    pub fn recip(&self) -> Jet6 {
        let iv = 1.0 / self.v;
        self.compose(iv, -iv * iv, 2.0 * iv * iv * iv)
    }

    pub fn div(&self, o: &Jet6) -> Jet6 {
        self.mul_jet(&o.recip())
    }

    pub fn exp(&self) -> Jet6 {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Jet6 {
        let iv = 1.0 / self.v;
        self.compose(self.v.ln(), iv, -iv * iv)
    }

    /// Partial derivative along variable i, one order lower.
    pub fn deriv(&self, i: usize) -> Jet6 {
        let mut r = Jet6::constant(self.g[i]);
        for j in 0..NVARS {
            r.g[j] = self.h[hslot(i, j)];
        }
        r.ord = self.ord.saturating_sub(1);
        r
    }

    pub fn max_norm(&self) -> f64 {
        let mut m = self.v.norm();
        for x in &self.g {
            m = m.max(x.norm());
        }
        for x in &self.h {
            m = m.max(x.norm());
        }
        m
    }
}

impl Ring for Jet6 {
    fn zero() -> Self {
        Jet6::constant(cz())
    }
    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_jet(o)
    }
    fn neg(&self) -> Self {
        Jet6::neg(self)
    }
    fn scale(&self, c: Complex64) -> Self {
        self.scale_c(c)
    }
    fn norm(&self) -> f64 {
        self.max_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_rule_and_derivative_extraction() {
        // f = (u + 2 y4)(v - y4): value/grad/hess at u=1, v=2, y4=0.5
        let u = Jet6::variable(0, c64(1.0, 0.0));
        let v = Jet6::variable(1, c64(2.0, 0.0));
        let y4 = Jet6::variable(2, c64(0.5, 0.0));
        let f = u.add(&y4.scale_c(c64(2.0, 0.0))).mul_jet(&v.sub(&y4));
        // f = (u + 2y)(v - y): df/du = v - y = 1.5, df/dy = 2(v-y) - (u+2y) = 3 - 2 = 1
        assert!((f.g[0] - c64(1.5, 0.0)).norm() < 1e-14);
        assert!((f.g[2] - c64(1.0, 0.0)).norm() < 1e-14);
        // d2f/dudy = -1 + 0 = ... f = uv - uy + 2yv - 2y^2: d2/dudy = -1
        assert!((f.h[hslot(0, 2)] - c64(-1.0, 0.0)).norm() < 1e-14);
        // d2/dy2 = -4
        assert!((f.h[hslot(2, 2)] - c64(-4.0, 0.0)).norm() < 1e-14);
        // derivative extraction: d/dy4 jet has value 1.0 and du-slope -1
        let fy = f.deriv(2);
        assert!((fy.v - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((fy.g[0] - c64(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn analytic_compositions_match_closed_forms() {
        let u = Jet6::variable(0, c64(0.3, 0.0));
        let f = u.mul_jet(&u).add(&Jet6::real_constant(1.0)); // 1 + u^2
        let g = f.ln().exp(); // identity
        assert!((g.v - f.v).norm() < 1e-14);
        assert!((g.g[0] - f.g[0]).norm() < 1e-14);
        assert!((g.h[hslot(0, 0)] - f.h[hslot(0, 0)]).norm() < 1e-13);
        let r = f.recip().mul_jet(&f); // 1
        assert!((r.v - c64(1.0, 0.0)).norm() < 1e-14);
        assert!(r.g.iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn base_jet_lift_preserves_wirtinger_structure() {
        use crate::jet::BaseJet;
        let z = BaseJet::variable_z(c64(0.2, -0.4));
        let p = z.mul(&z).mul(&z);
        let j = Jet6::from_base(&p);
        // dbar p = (d/du + i d/dv)/2 must vanish
        let dbar = (j.g[0] + c64(0.0, 1.0) * j.g[1]) * 0.5;
        assert!(dbar.norm() < 1e-14);
    }
}

//! Truncated bivariate Taylor arithmetic in the chart coordinates (u, v).
//!
//! All Gauss-map quantities and their derivatives are obtained by evaluating
//! rational expressions in this arithmetic with the seed z = u + iv, so
//! curvature-level identities are checked with exact derivatives rather than
//! stencils.  Coefficients are stored Taylor-style, i.e. divided by the
//! factorials; `ord` tracks through which total order the entries are valid
//! (differentiation lowers it).

use num_complex::Complex64;

pub const JET_ORDER: usize = 4;
pub const JET_LEN: usize = 15;

/// slot of the (i,j) Taylor coefficient, i + j <= 4
const fn slot(i: usize, j: usize) -> usize {
    let t = i + j;
    t * (t + 1) / 2 + j
}

/// (i, j) exponents per slot, grouped by total degree.
pub const EXPON: [(usize, usize); JET_LEN] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

#[derive(Clone, Copy, Debug)]
pub struct BaseJet {
    pub c: [Complex64; JET_LEN],
    pub ord: u8,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl BaseJet {
    pub fn constant(v: Complex64) -> Self {
        let mut c = [czero(); JET_LEN];
        c[0] = v;
        BaseJet { c, ord: JET_ORDER as u8 }
    }

    pub fn real_constant(v: f64) -> Self {
        Self::constant(Complex64::new(v, 0.0))
    }

    /// The coordinate z = u + iv seeded at z0.
    pub fn variable_z(z0: Complex64) -> Self {
        let mut c = [czero(); JET_LEN];
        c[0] = z0;
        c[slot(1, 0)] = Complex64::new(1.0, 0.0);
        c[slot(0, 1)] = Complex64::new(0.0, 1.0);
        BaseJet { c, ord: JET_ORDER as u8 }
    }

    /// The coordinate u seeded at u0.
    pub fn variable_u(u0: f64) -> Self {
        let mut c = [czero(); JET_LEN];
        c[0] = Complex64::new(u0, 0.0);
        c[slot(1, 0)] = Complex64::new(1.0, 0.0);
        BaseJet { c, ord: JET_ORDER as u8 }
    }

    pub fn variable_v(v0: f64) -> Self {
        let mut c = [czero(); JET_LEN];
        c[0] = Complex64::new(v0, 0.0);
        c[slot(0, 1)] = Complex64::new(1.0, 0.0);
        BaseJet { c, ord: JET_ORDER as u8 }
    }

    pub fn val(&self) -> Complex64 {
        self.c[0]
    }
    pub fn du(&self) -> Complex64 {
        self.c[slot(1, 0)]
    }
    pub fn dv(&self) -> Complex64 {
        self.c[slot(0, 1)]
    }
    pub fn duu(&self) -> Complex64 {
        self.c[slot(2, 0)] * 2.0
    }
    pub fn duv(&self) -> Complex64 {
        self.c[slot(1, 1)]
    }
    pub fn dvv(&self) -> Complex64 {
        self.c[slot(0, 2)] * 2.0
    }

    /// Wirtinger d/dz = (d/du - i d/dv)/2 as a jet of one lower order.
    pub fn wirt_z(&self) -> BaseJet {
        let du = self.deriv_u();
        let dv = self.deriv_v();
        du.sub(&dv.scale(Complex64::new(0.0, 1.0))).scale(Complex64::new(0.5, 0.0))
    }

    /// Wirtinger d/dzbar = (d/du + i d/dv)/2.
    pub fn wirt_zbar(&self) -> BaseJet {
        let du = self.deriv_u();
        let dv = self.deriv_v();
        du.add(&dv.scale(Complex64::new(0.0, 1.0))).scale(Complex64::new(0.5, 0.0))
    }

    pub fn deriv_u(&self) -> BaseJet {
        let mut out = [czero(); JET_LEN];
        for (s, &(i, j)) in EXPON.iter().enumerate() {
            if i + j >= JET_ORDER {
                continue;
            }
            out[s] = self.c[slot(i + 1, j)] * ((i + 1) as f64);
        }
        BaseJet { c: out, ord: self.ord.saturating_sub(1) }
    }

    pub fn deriv_v(&self) -> BaseJet {
        let mut out = [czero(); JET_LEN];
        for (s, &(i, j)) in EXPON.iter().enumerate() {
            if i + j >= JET_ORDER {
                continue;
            }
            out[s] = self.c[slot(i, j + 1)] * ((j + 1) as f64);
        }
        BaseJet { c: out, ord: self.ord.saturating_sub(1) }
    }

    pub fn add(&self, o: &BaseJet) -> BaseJet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        BaseJet { c, ord: self.ord.min(o.ord) }
    }

    pub fn sub(&self, o: &BaseJet) -> BaseJet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a -= b;
        }
        BaseJet { c, ord: self.ord.min(o.ord) }
    }

    pub fn neg(&self) -> BaseJet {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = -*a;
        }
        BaseJet { c, ord: self.ord }
    }

    pub fn scale(&self, k: Complex64) -> BaseJet {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a *= k;
        }
        BaseJet { c, ord: self.ord }
    }

    pub fn mul(&self, o: &BaseJet) -> BaseJet {
        let mut out = [czero(); JET_LEN];
        for (sa, &(ia, ja)) in EXPON.iter().enumerate() {
            if self.c[sa] == czero() {
                continue;
            }
            for (sb, &(ib, jb)) in EXPON.iter().enumerate() {
                if ia + ib + ja + jb > JET_ORDER {
                    continue;
                }
                out[slot(ia + ib, ja + jb)] += self.c[sa] * o.c[sb];
            }
        }
        BaseJet { c: out, ord: self.ord.min(o.ord) }
    }

    /// Complex conjugate; legitimate because u, v are real coordinates.
    pub fn conj(&self) -> BaseJet {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = a.conj();
        }
        BaseJet { c, ord: self.ord }
    }

    pub fn re(&self) -> BaseJet {
        self.add(&self.conj()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn im(&self) -> BaseJet {
        self.sub(&self.conj()).scale(Complex64::new(0.0, -0.5))
    }

    /// |f|^2 = f conj(f)
    pub fn abs2(&self) -> BaseJet {
        self.mul(&self.conj())
    }

    /// Nilpotent part (constant term removed).
    fn nilpotent(&self) -> BaseJet {
        let mut c = self.c;
        c[0] = czero();
        BaseJet { c, ord: self.ord }
    }

    /// Compose the truncated series sum coeffs[k] * n^k, n nilpotent.
    fn poly_in_nilpotent(&self, coeffs: &[Complex64]) -> BaseJet {
        let n = self.nilpotent();
        // Horner from the top
        let mut acc = BaseJet::constant(coeffs[coeffs.len() - 1]);
        for k in (0..coeffs.len() - 1).rev() {
            acc = acc.mul(&n).add(&BaseJet::constant(coeffs[k]));
        }
        BaseJet { ord: self.ord, ..acc }
    }

    pub fn recip(&self) -> BaseJet {
        let v = self.c[0];
        assert!(v.norm() > 0.0, "jet reciprocal at zero");
        let iv = 1.0 / v;
        // 1/(v+n) = iv * sum (-n iv)^k
        let coeffs = [
            iv,
            -iv * iv,
            iv * iv * iv,
            -iv * iv * iv * iv,
            iv * iv * iv * iv * iv,
        ];
        self.poly_in_nilpotent(&coeffs)
    }

    pub fn div(&self, o: &BaseJet) -> BaseJet {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> BaseJet {
        let e = self.c[0].exp();
        let coeffs = [e, e, e / 2.0, e / 6.0, e / 24.0];
        self.poly_in_nilpotent(&coeffs)
    }

    pub fn ln(&self) -> BaseJet {
        let v = self.c[0];
        assert!(v.norm() > 0.0, "jet log at zero");
        let iv = 1.0 / v;
        let coeffs = [
            v.ln(),
            iv,
            -iv * iv / 2.0,
            iv * iv * iv / 3.0,
            -iv * iv * iv * iv / 4.0,
        ];
        self.poly_in_nilpotent(&coeffs)
    }

    pub fn sqrt(&self) -> BaseJet {
        let v = self.c[0];
        let r = v.sqrt();
        assert!(r.norm() > 0.0, "jet sqrt at zero");
        // (v+n)^(1/2) = r (1 + n/v)^(1/2), binomial coefficients of 1/2
        let iv = 1.0 / v;
        let coeffs = [
            r,
            r * iv * 0.5,
            r * iv * iv * (-1.0 / 8.0),
            r * iv * iv * iv * (1.0 / 16.0),
            r * iv * iv * iv * iv * (-5.0 / 128.0),
        ];
        self.poly_in_nilpotent(&coeffs)
    }

    /// Real power for positive real leading coefficient.
    pub fn powf(&self, t: f64) -> BaseJet {
        self.ln().scale(Complex64::new(t, 0.0)).exp()
    }

    pub fn powi(&self, mut n: u32) -> BaseJet {
        let mut acc = BaseJet::real_constant(1.0);
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Largest coefficient magnitude, for residual reporting.
    pub fn max_norm(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// evaluate f at (u,v) by jets and by a closure, compare derivatives to
    /// central finite differences of the closure
    fn check_against_fd<F, G>(fj: F, f: G, u0: f64, v0: f64, tol: f64)
    where
        F: Fn(BaseJet, BaseJet) -> BaseJet,
        G: Fn(f64, f64) -> Complex64,
    {
        let jet = fj(BaseJet::variable_u(u0), BaseJet::variable_v(v0));
        let h = 1e-5;
        let fd_u = (f(u0 + h, v0) - f(u0 - h, v0)) / (2.0 * h);
        let fd_v = (f(u0, v0 + h) - f(u0, v0 - h)) / (2.0 * h);
        let fd_uu = (f(u0 + h, v0) - 2.0 * f(u0, v0) + f(u0 - h, v0)) / (h * h);
        let fd_uv = (f(u0 + h, v0 + h) - f(u0 + h, v0 - h) - f(u0 - h, v0 + h)
            + f(u0 - h, v0 - h))
            / (4.0 * h * h);
        assert_relative_eq!(jet.val().re, f(u0, v0).re, max_relative = 1e-12);
        assert!((jet.du() - fd_u).norm() < tol);
        assert!((jet.dv() - fd_v).norm() < tol);
        // second-difference oracles lose ~eps/h^2 to cancellation
        assert!((jet.duu() - fd_uu).norm() < tol * 1e4);
        assert!((jet.duv() - fd_uv).norm() < tol * 1e4);
    }

    #[test]
    fn rational_jet_matches_finite_differences() {
        let f = |u: f64, v: f64| {
            let z = c64(u, v);
            (z * z + c64(1.0, 0.5)) / (z + c64(3.0, 0.0))
        };
        let fj = |u: BaseJet, v: BaseJet| {
            let z = u.add(&v.scale(c64(0.0, 1.0)));
            z.mul(&z).add(&BaseJet::constant(c64(1.0, 0.5))).div(&z.add(&BaseJet::real_constant(3.0)))
        };
        check_against_fd(fj, f, 0.4, -0.3, 1e-8);
    }

    #[test]
    fn exp_log_sqrt_jets_match_finite_differences() {
        let f = |u: f64, v: f64| (c64(u, v) * c64(u, v) + c64(2.0, 0.0)).sqrt().ln().exp();
        let fj = |u: BaseJet, v: BaseJet| {
            let z = u.add(&v.scale(c64(0.0, 1.0)));
            z.mul(&z).add(&BaseJet::real_constant(2.0)).sqrt().ln().exp()
        };
        check_against_fd(fj, f, 0.2, 0.1, 1e-7);
    }

    #[test]
    fn powf_on_radial_field() {
        // (1 + u^2 + v^2)^t
        let t = 3.5;
        let f = move |u: f64, v: f64| c64((1.0 + u * u + v * v).powf(t), 0.0);
        let fj = move |u: BaseJet, v: BaseJet| {
            u.mul(&u).add(&v.mul(&v)).add(&BaseJet::real_constant(1.0)).powf(t)
        };
        check_against_fd(fj, f, 0.3, -0.2, 1e-7);
    }

    #[test]
    fn holomorphic_jet_kills_zbar_derivative() {
        let z = BaseJet::variable_z(c64(0.3, 0.7));
        let p = z.powi(3).add(&z.scale(c64(2.0, -1.0))).add(&BaseJet::real_constant(5.0));
        let zb = p.wirt_zbar();
        assert!(zb.max_norm() < 1e-15, "dbar of holomorphic polynomial must vanish");
        // and d/dz matches 3z^2 + 2 - i
        let dz = p.wirt_z();
        let z0 = c64(0.3, 0.7);
        assert!((dz.val() - (3.0 * z0 * z0 + c64(2.0, -1.0))).norm() < 1e-13);
    }

    #[test]
    fn conjugation_flips_holomorphy() {
        let z = BaseJet::variable_z(c64(-0.2, 0.5));
        let p = z.mul(&z).conj();
        assert!(p.wirt_z().max_norm() < 1e-15);
        assert!(p.wirt_zbar().max_norm() > 0.1);
    }

    #[test]
    fn third_and_fourth_order_coefficients_survive_products() {
        // d^4/du^4 of u^4 is 24; via product of four variable jets
        let u = BaseJet::variable_u(0.0);
        let p = u.mul(&u).mul(&u).mul(&u);
        assert_relative_eq!(p.c[slot(4, 0)].re, 1.0, max_relative = 1e-14);
        // d^3/du^2 dv of u^2 v
        let v = BaseJet::variable_v(0.0);
        let q = u.mul(&u).mul(&v);
        assert_relative_eq!(q.c[slot(2, 1)].re, 1.0, max_relative = 1e-14);
    }
}

//! Differential forms on the chart of X = (base rectangle) x T^4 whose
//! coefficients depend only on the base point.
//!
//! A `FormField` stores one complex coefficient per (basis k-form, grid
//! point).  The fiber frame is flat, so the exterior derivative only
//! differentiates in the base directions.

use crate::error::{KernelError, Result};
use crate::exterior::{basis_dim, basis_masks, basis_rank, type_project_vec, wedge_table};
use crate::grid::{deriv_axis, ChartGrid};
use num_complex::Complex64;
use std::io::Write;

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Clone, Debug)]
pub struct FormField {
    pub grid: ChartGrid,
    pub degree: usize,
    /// layout: coefficient plane b is c[b*npts .. (b+1)*npts]
    pub c: Vec<Complex64>,
    /// optional bidegree tag relative to a stored complex structure
    pub tag: Option<(usize, usize)>,
}

impl FormField {
    pub fn zero(grid: ChartGrid, degree: usize) -> Self {
        FormField { grid, degree, c: vec![cz(); basis_dim(degree) * grid.npts()], tag: None }
    }

    /// Constant-coefficient form.
    pub fn constant(grid: ChartGrid, degree: usize, coeffs: &[Complex64]) -> Self {
        assert_eq!(coeffs.len(), basis_dim(degree));
        let npts = grid.npts();
        let mut c = vec![cz(); coeffs.len() * npts];
        for (b, &v) in coeffs.iter().enumerate() {
            c[b * npts..(b + 1) * npts].fill(v);
        }
        FormField { grid, degree, c, tag: None }
    }

    /// 0-form from a per-point scalar function.
    pub fn scalar<F: FnMut(usize, Complex64) -> Complex64>(grid: ChartGrid, mut f: F) -> Self {
        let c = grid.points().map(|(i, z)| f(i, z)).collect();
        FormField { grid, degree: 0, c, tag: None }
    }

    /// 1-form with prescribed coefficient planes.
    pub fn one_form(grid: ChartGrid, planes: [Vec<Complex64>; 6]) -> Self {
        let npts = grid.npts();
        let mut c = vec![cz(); 6 * npts];
        for (b, p) in planes.into_iter().enumerate() {
            assert_eq!(p.len(), npts);
            c[b * npts..(b + 1) * npts].copy_from_slice(&p);
        }
        FormField { grid, degree: 1, c, tag: None }
    }

    pub fn with_tag(mut self, p: usize, q: usize) -> Self {
        assert_eq!(p + q, self.degree);
        self.tag = Some((p, q));
        self
    }

    pub fn nb(&self) -> usize {
        basis_dim(self.degree)
    }

    pub fn plane(&self, b: usize) -> &[Complex64] {
        let npts = self.grid.npts();
        &self.c[b * npts..(b + 1) * npts]
    }

    pub fn plane_mut(&mut self, b: usize) -> &mut [Complex64] {
        let npts = self.grid.npts();
        &mut self.c[b * npts..(b + 1) * npts]
    }

    /// Coefficient vector at one grid point.
    pub fn at(&self, idx: usize) -> Vec<Complex64> {
        let npts = self.grid.npts();
        (0..self.nb()).map(|b| self.c[b * npts + idx]).collect()
    }

    pub fn add(&self, o: &FormField) -> Result<FormField> {
        if self.grid != o.grid || self.degree != o.degree {
            return Err(KernelError::GridMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        out.tag = if self.tag == o.tag { self.tag } else { None };
        Ok(out)
    }

    pub fn sub(&self, o: &FormField) -> Result<FormField> {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> FormField {
        let mut out = self.clone();
        for a in out.c.iter_mut() {
            *a *= k;
        }
        out
    }

    /// Multiply by a per-point scalar field.
    pub fn mul_scalar(&self, s: &[Complex64]) -> FormField {
        assert_eq!(s.len(), self.grid.npts());
        let npts = self.grid.npts();
        let mut out = self.clone();
        out.tag = self.tag;
        for b in 0..self.nb() {
            for i in 0..npts {
                out.c[b * npts + i] *= s[i];
            }
        }
        out
    }

    pub fn wedge(&self, o: &FormField) -> Result<FormField> {
        if self.grid != o.grid {
            return Err(KernelError::GridMismatch);
        }
        if self.degree + o.degree > 6 {
            return Err(KernelError::Degree(format!(
                "wedge of degrees {} and {} exceeds 6",
                self.degree, o.degree
            )));
        }
        let npts = self.grid.npts();
        let mut out = FormField::zero(self.grid, self.degree + o.degree);
        for t in wedge_table(self.degree, o.degree) {
            let (pa, pb) = (t.ia * npts, t.ib * npts);
            let po = t.out * npts;
            for i in 0..npts {
                out.c[po + i] += self.c[pa + i] * o.c[pb + i] * t.sign;
            }
        }
        if let (Some((pa, qa)), Some((pb, qb))) = (self.tag, o.tag) {
            out.tag = Some((pa + pb, qa + qb));
        }
        Ok(out)
    }

    /// Exterior derivative.  Base-direction partials by fourth-order stencils;
    /// the fiber frame is closed so fiber letters contribute nothing.
    pub fn ext_d(&self) -> FormField {
        if self.degree == 6 {
            return FormField::zero(self.grid, 6);
        }
        let npts = self.grid.npts();
        let mut out = FormField::zero(self.grid, self.degree + 1);
        for (b, &mask) in basis_masks(self.degree).iter().enumerate() {
            let plane = self.plane(b).to_vec();
            for letter in 0..2usize {
                if mask & (1 << letter) != 0 {
                    continue;
                }
                let d = deriv_axis(&plane, &self.grid, letter);
                let sign = crate::exterior::merge_sign(1 << letter, mask).unwrap();
                let ob = basis_rank((1 << letter) as u8 | mask);
                for i in 0..npts {
                    out.c[ob * npts + i] += d[i] * sign;
                }
            }
        }
        out
    }

    /// d of a scalar field with exact first derivatives supplied per point.
    pub fn exact_one_form(grid: ChartGrid, du: Vec<Complex64>, dv: Vec<Complex64>) -> FormField {
        let npts = grid.npts();
        let mut f = FormField::zero(grid, 1);
        f.c[..npts].copy_from_slice(&du);
        f.c[npts..2 * npts].copy_from_slice(&dv);
        f
    }

    /// Project onto the (p,q) part for the pointwise complex structure `acs`.
    pub fn type_project(&self, p: usize, q: usize, acs: &crate::acs::AcsField) -> Result<FormField> {
        if p + q != self.degree {
            return Err(KernelError::Degree(format!(
                "bidegree ({p},{q}) does not sum to degree {}",
                self.degree
            )));
        }
        if acs.grid != self.grid {
            return Err(KernelError::GridMismatch);
        }
        let npts = self.grid.npts();
        let nb = self.nb();
        let mut out = FormField::zero(self.grid, self.degree);
        let mut v = vec![cz(); nb];
        for i in 0..npts {
            for b in 0..nb {
                v[b] = self.c[b * npts + i];
            }
            let cm = acs.cotangent(i);
            let w = type_project_vec(&cm, self.degree, p, q, &v);
            for b in 0..nb {
                out.c[b * npts + i] = w[b];
            }
        }
        out.tag = Some((p, q));
        Ok(out)
    }

    /// Residual of the stored bidegree tag.
    pub fn purity_residual(&self, acs: &crate::acs::AcsField) -> Result<f64> {
        let (p, q) = self.tag.ok_or_else(|| KernelError::Degree("untagged field".into()))?;
        let proj = self.type_project(p, q, acs)?;
        Ok(proj.sub(self)?.max_interior_norm())
    }

    /// Integral of a degree-6 form over base rectangle x unit-volume fiber
    /// (trapezoid weights in both base directions).
    pub fn integrate(&self) -> Result<Complex64> {
        if self.degree != 6 {
            return Err(KernelError::Degree("integrate needs a degree-6 form".into()));
        }
        let g = &self.grid;
        let plane = self.plane(0);
        let mut sum = cz();
        for iv in 0..g.n {
            let wv = if iv == 0 || iv == g.n - 1 { 0.5 } else { 1.0 };
            for iu in 0..g.n {
                let wu = if iu == 0 || iu == g.n - 1 { 0.5 } else { 1.0 };
                sum += plane[g.idx(iu, iv)] * (wu * wv);
            }
        }
        Ok(sum * g.h_u() * g.h_v())
    }

    /// Max coefficient magnitude over interior points (margin excluded).
    pub fn max_interior_norm(&self) -> f64 {
        let npts = self.grid.npts();
        let mut m: f64 = 0.0;
        for b in 0..self.nb() {
            for i in 0..npts {
                if self.grid.is_interior(i) {
                    m = m.max(self.c[b * npts + i].norm());
                }
            }
        }
        m
    }

    /// Max coefficient magnitude over interior points passing `keep`.
    pub fn max_masked_norm<F: Fn(usize) -> bool>(&self, keep: F) -> f64 {
        let npts = self.grid.npts();
        let mut m: f64 = 0.0;
        for b in 0..self.nb() {
            for i in 0..npts {
                if self.grid.is_interior(i) && keep(i) {
                    m = m.max(self.c[b * npts + i].norm());
                }
            }
        }
        m
    }

    /// CSV dump: u,v,basis,re,im
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "u,v,basis,re,im")?;
        let npts = self.grid.npts();
        for b in 0..self.nb() {
            for (i, z) in self.grid.points() {
                let c = self.c[b * npts + i];
                writeln!(w, "{},{},{},{},{}", z.re, z.im, b, c.re, c.im)?;
            }
        }
        Ok(())
    }
}

/// du as a constant 1-form.
pub fn du_form(grid: ChartGrid) -> FormField {
    let mut c = vec![cz(); 6];
    c[0] = Complex64::new(1.0, 0.0);
    FormField::constant(grid, 1, &c)
}

/// dv as a constant 1-form.
pub fn dv_form(grid: ChartGrid) -> FormField {
    let mut c = vec![cz(); 6];
    c[1] = Complex64::new(1.0, 0.0);
    FormField::constant(grid, 1, &c)
}

/// e^j (j = 4..7) as a constant 1-form; letter = j - 2.
pub fn fiber_form(grid: ChartGrid, j: usize) -> FormField {
    assert!((4..=7).contains(&j));
    let mut c = vec![cz(); 6];
    c[j - 2] = Complex64::new(1.0, 0.0);
    FormField::constant(grid, 1, &c)
}

/// Constant fiber 2-form from its coefficient vector.
pub fn fiber_two_form(grid: ChartGrid, coeffs: &[Complex64]) -> FormField {
    FormField::constant(grid, 2, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rect;

    fn grid() -> ChartGrid {
        ChartGrid::new(Rect::centered(1.0, 1.0), 33)
    }

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn wedge_du_du_vanishes_and_graded_sign_holds() {
        let g = grid();
        let du = du_form(g);
        let dv = dv_form(g);
        assert!(du.wedge(&du).unwrap().max_interior_norm() < 1e-16);
        let a = du.wedge(&dv).unwrap();
        let b = dv.wedge(&du).unwrap();
        assert!(a.add(&b).unwrap().max_interior_norm() < 1e-16);
    }

    #[test]
    fn d_of_u_dv_is_du_dv() {
        let g = grid();
        let u_field: Vec<Complex64> = g.points().map(|(_, z)| c64(z.re, 0.0)).collect();
        let udv = dv_form(g).mul_scalar(&u_field);
        let d = udv.ext_d();
        let dudv = du_form(g).wedge(&dv_form(g)).unwrap();
        assert!(d.sub(&dudv).unwrap().max_interior_norm() < 1e-11);
    }

    #[test]
    fn d_of_fiber_frame_vanishes() {
        let g = grid();
        for j in 4..=7 {
            assert!(fiber_form(g, j).ext_d().max_interior_norm() < 1e-16);
        }
    }

    #[test]
    fn d_squared_is_negligible() {
        let g = grid();
        // transcendental scalar so nothing is exactly polynomial
        let f = FormField::scalar(g, |_, z| c64((2.0 * z.re).sin() * (1.5 * z.im).cos(), 0.0));
        let dd = f.ext_d().ext_d();
        assert!(dd.max_interior_norm() < 1e-12);
    }

    #[test]
    fn stokes_for_compactly_supported_form() {
        let g = ChartGrid::new(Rect::centered(1.0, 1.0), 65);
        // bump supported well inside the margin
        let bump: Vec<Complex64> = g
            .points()
            .map(|(_, z)| {
                let r2 = (z.re * z.re + z.im * z.im) / 0.25;
                if r2 < 1.0 {
                    c64((-1.0 / (1.0 - r2)).exp(), 0.0)
                } else {
                    cz()
                }
            })
            .collect();
        // eta = bump * dv ^ e4^e5^e6^e7 is a 5-form; d eta is degree 6
        let e45 = fiber_form(g, 4).wedge(&fiber_form(g, 5)).unwrap();
        let e67 = fiber_form(g, 6).wedge(&fiber_form(g, 7)).unwrap();
        let vol4 = e45.wedge(&e67).unwrap();
        let eta = dv_form(g).wedge(&vol4).unwrap().mul_scalar(&bump);
        let int = eta.ext_d().integrate().unwrap();
        assert!(int.norm() < 1e-8, "Stokes residual {}", int.norm());
    }

    #[test]
    fn volume_form_integrates_to_base_area() {
        let g = ChartGrid::new(Rect { u_min: 0.0, u_max: 1.0, v_min: 0.0, v_max: 1.0 }, 21);
        let e45 = fiber_form(g, 4).wedge(&fiber_form(g, 5)).unwrap();
        let e67 = fiber_form(g, 6).wedge(&fiber_form(g, 7)).unwrap();
        let vol = du_form(g).wedge(&dv_form(g)).unwrap().wedge(&e45).unwrap().wedge(&e67).unwrap();
        let int = vol.integrate().unwrap();
        assert!((int.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn wedge_is_associative_on_varying_fields() {
        let g = grid();
        let a = du_form(g).mul_scalar(
            &g.points().map(|(_, z)| c64(z.re + 0.3, z.im)).collect::<Vec<_>>(),
        );
        let b = fiber_form(g, 4).mul_scalar(
            &g.points().map(|(_, z)| c64(z.im * z.im, 0.2)).collect::<Vec<_>>(),
        );
        let c = fiber_form(g, 6)
            .add(&dv_form(g))
            .unwrap()
            .mul_scalar(&g.points().map(|(_, z)| c64(1.0, z.re)).collect::<Vec<_>>());
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        assert!(left.sub(&right).unwrap().max_interior_norm() < 1e-14);
    }
}

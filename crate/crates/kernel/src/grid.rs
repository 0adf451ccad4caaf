//! Chart grids and finite-difference stencils on the base rectangle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Rect {
    pub fn centered(half_u: f64, half_v: f64) -> Self {
        Rect { u_min: -half_u, u_max: half_u, v_min: -half_v, v_max: half_v }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.u_min && z.re <= self.u_max && z.im >= self.v_min && z.im <= self.v_max
    }
}

/// N x N sample grid over a rectangle.  The margin is the number of boundary
/// cells excluded from residual statistics (one-sided stencils live there).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartGrid {
    pub rect: Rect,
    pub n: usize,
    pub margin: usize,
}

impl ChartGrid {
    pub fn new(rect: Rect, n: usize) -> Self {
        assert!(n >= 16, "grid resolution must be at least 16");
        ChartGrid { rect, n, margin: 3 }
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        assert!(margin >= 2, "margin must cover the stencil half-width");
        self.margin = margin;
        self
    }

    pub fn npts(&self) -> usize {
        self.n * self.n
    }

    pub fn h_u(&self) -> f64 {
        (self.rect.u_max - self.rect.u_min) / (self.n as f64 - 1.0)
    }

    pub fn h_v(&self) -> f64 {
        (self.rect.v_max - self.rect.v_min) / (self.n as f64 - 1.0)
    }

    pub fn idx(&self, iu: usize, iv: usize) -> usize {
        iv * self.n + iu
    }

    pub fn point(&self, iu: usize, iv: usize) -> Complex64 {
        Complex64::new(
            self.rect.u_min + iu as f64 * self.h_u(),
            self.rect.v_min + iv as f64 * self.h_v(),
        )
    }

    pub fn point_at(&self, idx: usize) -> Complex64 {
        self.point(idx % self.n, idx / self.n)
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let iu = idx % self.n;
        let iv = idx / self.n;
        iu >= self.margin && iu + self.margin < self.n && iv >= self.margin && iv + self.margin < self.n
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (0..self.npts()).map(move |i| (i, self.point_at(i)))
    }
}

/// Fourth-order first derivative along one axis of a scalar grid plane.
/// Central stencil in the interior, one-sided fourth-order at the edges.
pub fn deriv_axis(vals: &[Complex64], grid: &ChartGrid, axis: usize) -> Vec<Complex64> {
    let n = grid.n;
    let h = if axis == 0 { grid.h_u() } else { grid.h_v() };
    let mut out = vec![Complex64::new(0.0, 0.0); vals.len()];
    let at = |iu: usize, iv: usize| -> Complex64 { vals[grid.idx(iu, iv)] };
    let line = |k: usize, t: isize| -> (usize, usize) {
        // position t along the derivative axis, k along the other
        if axis == 0 {
            (t as usize, k)
        } else {
            (k, t as usize)
        }
    };
    for k in 0..n {
        for t in 0..n as isize {
            let f = |s: isize| {
                let (iu, iv) = line(k, s);
                at(iu, iv)
            };
            let d = if t >= 2 && t + 2 < n as isize {
                (-f(t + 2) + f(t + 1) * 8.0 - f(t - 1) * 8.0 + f(t - 2)) / (12.0 * h)
            } else if t == 0 {
                (f(0) * -25.0 + f(1) * 48.0 - f(2) * 36.0 + f(3) * 16.0 - f(4) * 3.0) / (12.0 * h)
            } else if t == 1 {
                (f(0) * -3.0 - f(1) * 10.0 + f(2) * 18.0 - f(3) * 6.0 + f(4)) / (12.0 * h)
            } else if t == n as isize - 2 {
                -(f(t + 1) * -3.0 - f(t) * 10.0 + f(t - 1) * 18.0 - f(t - 2) * 6.0 + f(t - 3))
                    / (12.0 * h)
            } else {
                -(f(t) * -25.0 + f(t - 1) * 48.0 - f(t - 2) * 36.0 + f(t - 3) * 16.0 - f(t - 4) * 3.0)
                    / (12.0 * h)
            };
            let (iu, iv) = line(k, t);
            out[grid.idx(iu, iv)] = d;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn stencil_is_exact_on_quartics() {
        let grid = ChartGrid::new(Rect::centered(1.0, 1.0), 21);
        let vals: Vec<Complex64> = (0..grid.npts())
            .map(|i| {
                let z = grid.point_at(i);
                c(z.re.powi(4) + 2.0 * z.re.powi(3) * z.im - z.im.powi(2))
            })
            .collect();
        let du = deriv_axis(&vals, &grid, 0);
        let dv = deriv_axis(&vals, &grid, 1);
        for (i, z) in grid.points() {
            let want_u = 4.0 * z.re.powi(3) + 6.0 * z.re.powi(2) * z.im;
            let want_v = 2.0 * z.re.powi(3) - 2.0 * z.im;
            assert!((du[i].re - want_u).abs() < 1e-10, "du at {z}");
            assert!((dv[i].re - want_v).abs() < 1e-10, "dv at {z}");
        }
    }

    #[test]
    fn stencil_error_decays_at_fourth_order() {
        let mut errs = Vec::new();
        for n in [32usize, 64, 128] {
            let grid = ChartGrid::new(Rect::centered(1.0, 1.0), n);
            let vals: Vec<Complex64> =
                (0..grid.npts()).map(|i| c((3.0 * grid.point_at(i).re).sin())).collect();
            let du = deriv_axis(&vals, &grid, 0);
            let mut emax: f64 = 0.0;
            for (i, z) in grid.points() {
                if grid.is_interior(i) {
                    emax = emax.max((du[i].re - 3.0 * (3.0 * z.re).cos()).abs());
                }
            }
            errs.push(emax);
        }
        let slope1 = (errs[0] / errs[1]).log2();
        let slope2 = (errs[1] / errs[2]).log2();
        assert!(slope1 > 3.5 && slope2 > 3.5, "orders {slope1:.2}, {slope2:.2}");
    }

    #[test]
    fn grid_indexing_round_trips() {
        let grid = ChartGrid::new(Rect { u_min: 0.0, u_max: 1.0, v_min: -1.0, v_max: 1.0 }, 17);
        let idx = grid.idx(3, 5);
        let z = grid.point_at(idx);
        assert!((z - grid.point(3, 5)).norm() < 1e-16);
        assert!(grid.rect.contains(z));
    }
}

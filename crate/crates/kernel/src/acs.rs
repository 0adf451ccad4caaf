//! The twisted almost complex structure J0 on the chart of X, its
//! integrability tensor, and the twistor-space comparison structure.
//!
//! Vector-field convention: the base block sends d/du -> d/dv, d/dv -> -d/du
//! (the +90 degree rotation in oriented isothermal coordinates); the fiber
//! block is alpha I + beta J + gamma K.  On 1-form coefficient vectors the
//! action is the transpose.

use crate::error::{KernelError, Result};
use crate::exterior::FRAME_DIM;
use crate::fiber::quat_combination;
use crate::grid::{deriv_axis, ChartGrid};
use crate::weierstrass::GaussGrid;
use nalgebra::Matrix6;
use num_complex::Complex64;

/// J0 as a 6x6 real matrix in the frame {d/du, d/dv, e4..e7}.
pub fn j0_matrix(alpha: f64, beta: f64, gamma: f64) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m[(1, 0)] = 1.0;
    m[(0, 1)] = -1.0;
    let q = quat_combination(alpha, beta, gamma);
    for i in 0..4 {
        for j in 0..4 {
            m[(2 + i, 2 + j)] = q[(i, j)];
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct AcsField {
    pub grid: ChartGrid,
    pub mats: Vec<Matrix6<f64>>,
}

impl AcsField {
    /// Build J0 from sampled Gauss data.
    pub fn build_j0(gauss: &GaussGrid) -> Result<AcsField> {
        let mats = gauss
            .pts
            .iter()
            .map(|p| {
                if p.lambda[0] <= 0.0 {
                    return Err(KernelError::Degenerate("lambda vanishes on the grid".into()));
                }
                Ok(j0_matrix(p.alpha[0], p.beta[0], p.gamma[0]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AcsField { grid: gauss.grid, mats })
    }

    /// Twistor structure for an arbitrary smooth sphere-valued field given by
    /// its stereographic values on the grid.
    pub fn twistor_j(grid: ChartGrid, s: &[Complex64]) -> AcsField {
        let mats = s
            .iter()
            .map(|z| {
                let n2 = z.norm_sqr();
                let d = 1.0 + n2;
                j0_matrix((1.0 - n2) / d, 2.0 * z.re / d, 2.0 * z.im / d)
            })
            .collect();
        AcsField { grid, mats }
    }

    /// Cotangent action (transpose) at a point, complexified for the
    /// type-projection machinery.
    pub fn cotangent(&self, idx: usize) -> [[Complex64; FRAME_DIM]; FRAME_DIM] {
        let m = &self.mats[idx];
        let mut c: [[Complex64; FRAME_DIM]; FRAME_DIM] = Default::default();
        for a in 0..FRAME_DIM {
            for p in 0..FRAME_DIM {
                // image of letter p has coefficient M[p][a] on letter a
                c[a][p] = Complex64::new(m[(p, a)], 0.0);
            }
        }
        c
    }

    /// max |J^2 + id| over the grid.
    pub fn square_residual(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| (m * m + Matrix6::identity()).amax())
            .fold(0.0, f64::max)
    }

    /// max orthogonality defect |J^T g J - g| with the chart metric
    /// g = lambda (du^2 + dv^2) + sum (e^j)^2.
    pub fn orthogonality_residual(&self, gauss: &GaussGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, p) in self.mats.iter().zip(gauss.pts.iter()) {
            let mut g = Matrix6::identity();
            g[(0, 0)] = p.lambda[0];
            g[(1, 1)] = p.lambda[0];
            worst = worst.max((m.transpose() * g * m - g).amax());
        }
        worst
    }

    /// Nijenhuis tensor magnitude per grid point:
    /// N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] over frame pairs.
    /// Frame fields are parallel, so only base-direction derivatives of J
    /// contribute; those are taken with fourth-order stencils.
    pub fn nijenhuis_field(&self) -> Vec<f64> {
        let npts = self.grid.npts();
        // differentiate the matrix entries
        let mut du = vec![Matrix6::<f64>::zeros(); npts];
        let mut dv = vec![Matrix6::<f64>::zeros(); npts];
        let mut plane = vec![Complex64::new(0.0, 0.0); npts];
        for r in 0..6 {
            for c in 0..6 {
                for i in 0..npts {
                    plane[i] = Complex64::new(self.mats[i][(r, c)], 0.0);
                }
                let pu = deriv_axis(&plane, &self.grid, 0);
                let pv = deriv_axis(&plane, &self.grid, 1);
                for i in 0..npts {
                    du[i][(r, c)] = pu[i].re;
                    dv[i][(r, c)] = pv[i].re;
                }
            }
        }
        let mut out = vec![0.0f64; npts];
        for i in 0..npts {
            let j = &self.mats[i];
            let dj = [&du[i], &dv[i]];
            let mut worst: f64 = 0.0;
            for a in 0..6 {
                for b in (a + 1)..6 {
                    let x = Matrix6::identity().column(a).into_owned();
                    let y = Matrix6::identity().column(b).into_owned();
                    let jx = j * x;
                    let jy = j * y;
                    // D_w J for a vector w uses only its base components
                    let d_of = |w: &nalgebra::Vector6<f64>| dj[0] * w[0] + dj[1] * w[1];
                    // frame fields are parallel, so
                    //   [JX,JY] = D_{JX}(J) y - D_{JY}(J) x,
                    //   [JX,Y]  = -D_Y(J) x,   [X,JY] = D_X(J) y,   [X,Y] = 0
                    let n = d_of(&jx) * y - d_of(&jy) * x + j * (d_of(&y) * x)
                        - j * (d_of(&x) * y);
                    worst = worst.max(n.amax());
                }
            }
            out[i] = worst;
        }
        out
    }

    /// max Nijenhuis magnitude over interior points.
    pub fn nijenhuis_max(&self) -> f64 {
        let f = self.nijenhuis_field();
        f.iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_interior(*i))
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }

    /// max difference of the fiber blocks of two structures.
    pub fn fiber_block_distance(&self, other: &AcsField) -> f64 {
        self.mats
            .iter()
            .zip(other.mats.iter())
            .map(|(a, b)| {
                let mut worst: f64 = 0.0;
                for i in 2..6 {
                    for j in 2..6 {
                        worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::mat_k;
    use crate::grid::Rect;
    use crate::weierstrass::{
        ChartKind, Poly, Rational, WeierstrassChart, ZetaField,
    };

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn enneper_chart() -> WeierstrassChart {
        WeierstrassChart::new(
            "enneper",
            Rect::centered(0.32, 0.32),
            ChartKind::WeierstrassFg {
                f: Rational::constant(c64(1.0, 0.0)),
                g: Rational::poly(Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0)])),
            },
            None,
        )
    }

    fn flat_chart() -> WeierstrassChart {
        WeierstrassChart::new(
            "flat",
            Rect::centered(0.5, 0.5),
            ChartKind::PhiExplicit([
                Rational::constant(c64(1.0, 0.0)),
                Rational::constant(c64(0.0, 1.0)),
                Rational::constant(c64(0.0, 0.0)),
            ]),
            None,
        )
    }

    #[test]
    fn flat_fiber_block_is_k() {
        let grid = ChartGrid::new(Rect::centered(0.5, 0.5), 17);
        let gauss = GaussGrid::sample(&flat_chart(), grid).unwrap();
        let j = AcsField::build_j0(&gauss).unwrap();
        let k = mat_k();
        for m in &j.mats {
            for i in 0..4 {
                for jj in 0..4 {
                    assert!((m[(2 + i, 2 + jj)] - k[(i, jj)]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_orthogonal() {
        let grid = ChartGrid::new(Rect::centered(0.32, 0.32), 24);
        let gauss = GaussGrid::sample(&enneper_chart(), grid).unwrap();
        let j = AcsField::build_j0(&gauss).unwrap();
        assert!(j.square_residual() < 1e-12);
        assert!(j.orthogonality_residual(&gauss) < 1e-10);
    }

    #[test]
    fn dz_is_a_plus_i_eigenvector_of_the_cotangent_action() {
        let grid = ChartGrid::new(Rect::centered(0.32, 0.32), 17);
        let gauss = GaussGrid::sample(&enneper_chart(), grid).unwrap();
        let j = AcsField::build_j0(&gauss).unwrap();
        let c = j.cotangent(40);
        // C dz = i dz with dz = du + i dv
        let dz = [c64(1.0, 0.0), c64(0.0, 1.0)];
        for a in 0..2 {
            let img = c[a][0] * dz[0] + c[a][1] * dz[1];
            assert!((img - c64(0.0, 1.0) * dz[a]).norm() < 1e-14);
        }
    }

    #[test]
    fn form_action_matches_displayed_fiber_rules() {
        // J0 e^4 = -alpha e^5 - beta e^6 - gamma e^7 etc., derived from the
        // transpose of the vector action
        let (a, b, g) = (0.48, 0.6, 0.64);
        let grid = ChartGrid::new(Rect::centered(0.5, 0.5), 16);
        let acs = AcsField {
            grid,
            mats: vec![j0_matrix(a, b, g); grid.npts()],
        };
        let c = acs.cotangent(0);
        let img_e4: Vec<Complex64> = (0..6).map(|l| c[l][2]).collect();
        let want = [0.0, 0.0, 0.0, -a, -b, -g];
        for (x, w) in img_e4.iter().zip(want) {
            assert!((x - c64(w, 0.0)).norm() < 1e-15);
        }
        let img_e7: Vec<Complex64> = (0..6).map(|l| c[l][5]).collect();
        let want7 = [0.0, 0.0, g, -b, a, 0.0];
        for (x, w) in img_e7.iter().zip(want7) {
            assert!((x - c64(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn nijenhuis_vanishes_on_minimal_charts_not_on_the_control() {
        let grid = ChartGrid::new(Rect::centered(0.32, 0.32), 48);
        let gauss = GaussGrid::sample(&enneper_chart(), grid).unwrap();
        let j = AcsField::build_j0(&gauss).unwrap();
        let n = j.nijenhuis_max();
        assert!(n < 1e-6, "nijenhuis on enneper at n=48: {n}");

        // flat chart: J constant, exactly zero
        let gridf = ChartGrid::new(Rect::centered(0.5, 0.5), 24);
        let gaussf = GaussGrid::sample(&flat_chart(), gridf).unwrap();
        let jf = AcsField::build_j0(&gaussf).unwrap();
        assert!(jf.nijenhuis_max() == 0.0);

        // conj(z) control: non-integrable
        let control = WeierstrassChart::new(
            "conj",
            Rect::centered(0.32, 0.32),
            ChartKind::SyntheticZeta(ZetaField::ConjZ),
            None,
        );
        let gaussc = GaussGrid::sample(&control, grid).unwrap();
        let jc = AcsField::build_j0(&gaussc).unwrap();
        assert!(jc.nijenhuis_max() > 0.1, "control must be non-integrable");
    }

    #[test]
    fn twistor_pullback_matches_j0_fiber_block() {
        let grid = ChartGrid::new(Rect::centered(0.32, 0.32), 24);
        let gauss = GaussGrid::sample(&enneper_chart(), grid).unwrap();
        let j = AcsField::build_j0(&gauss).unwrap();
        let s: Vec<Complex64> = gauss.pts.iter().map(|p| p.zeta[0]).collect();
        let tw = AcsField::twistor_j(grid, &s);
        assert!(j.fiber_block_distance(&tw) < 1e-12);
    }

    #[test]
    fn twistor_of_zero_field_is_i() {
        let grid = ChartGrid::new(Rect::centered(0.5, 0.5), 16);
        let s = vec![c64(0.0, 0.0); grid.npts()];
        let tw = AcsField::twistor_j(grid, &s);
        let i4 = crate::fiber::mat_i();
        for i in 0..4 {
            for j in 0..4 {
                assert!((tw.mats[0][(2 + i, 2 + j)] - i4[(i, j)]).abs() < 1e-15);
            }
        }
    }
}

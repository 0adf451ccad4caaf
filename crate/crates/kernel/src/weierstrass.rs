//! Minimal-surface charts from holomorphic Weierstrass data and the derived
//! Gauss-map fields.
//!
//! A chart carries three holomorphic functions phi_1, phi_2, phi_3 on a
//! rectangle in the z = u + iv plane with phi_1^2 + phi_2^2 + phi_3^2 = 0.
//! Everything downstream (unit normal, stereographic coordinate, kappa/sigma,
//! Gauss-map energy) is evaluated in exact jet arithmetic.

use crate::error::{KernelError, Result};
use crate::grid::{ChartGrid, Rect};
use crate::jet::BaseJet;
use crate::roots::{cluster_roots, poly_roots};
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cone() -> Complex64 {
    c64(1.0, 0.0)
}

/// Polynomial with ascending complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn eval_jet(&self, z: &BaseJet) -> BaseJet {
        let mut acc = BaseJet::constant(*self.0.last().unwrap_or(&c64(0.0, 0.0)));
        for c in self.0.iter().rev().skip(1) {
            acc = acc.mul(z).add(&BaseJet::constant(*c));
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![c64(0.0, 0.0)]);
        }
        Poly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64))
                .collect(),
        )
    }
}

/// Ratio of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn poly(p: Poly) -> Self {
        Rational { num: p, den: Poly(vec![cone()]) }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::poly(Poly::constant(c))
    }

    pub fn eval_jet(&self, z: &BaseJet) -> BaseJet {
        self.num.eval_jet(z).div(&self.den.eval_jet(z))
    }

    /// Poles inside the rectangle (denominator roots).
    pub fn poles_in(&self, rect: &Rect) -> Result<Vec<Complex64>> {
        if self.den.0.len() <= 1 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(&self.den.0)?.into_iter().filter(|z| rect.contains(*z)).collect())
    }
}

/// Synthetic stereographic fields used as integrability controls.
#[derive(Clone, Debug, PartialEq)]
pub enum ZetaField {
    /// zeta(z) = conj(z): anti-holomorphic control, never minimal.
    ConjZ,
    /// a holomorphic polynomial zeta(z)
    Holo(Poly),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraicMode {
    /// chart coordinate is the Gauss-map coordinate w itself; valid away from
    /// the branch points of the curve
    AvoidBranch,
    /// chart coordinate is the curve coordinate y near the branch point with
    /// Gauss value `center`; the Gauss map ramifies at z = 0
    AtBranch { center: Complex64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    PhiExplicit([Rational; 3]),
    WeierstrassFg { f: Rational, g: Rational },
    /// hyperelliptic-style data y^2 = P(w) with Gauss map w and height
    /// differential dw / y
    Algebraic { curve: Poly, mode: AlgebraicMode },
    /// direct stereographic field with flat base metric (lambda = 1); only the
    /// complex-structure layer is meaningful for these
    SyntheticZeta(ZetaField),
}

#[derive(Clone, Debug)]
pub struct WeierstrassChart {
    pub name: String,
    pub domain: Rect,
    pub kind: ChartKind,
    pub genus: Option<u32>,
}

/// Exact jets of every Gauss-map quantity at one base point.
#[derive(Clone, Debug)]
pub struct GaussJets {
    pub phi: [BaseJet; 3],
    pub lambda: BaseJet,
    pub alpha: BaseJet,
    pub beta: BaseJet,
    pub gamma: BaseJet,
    pub zeta: BaseJet,
    pub kappa_sigma: Option<(BaseJet, BaseJet)>,
    /// Gauss-map energy 8 |alpha_z|^2 / (lambda (beta^2 + gamma^2))
    pub dg2: BaseJet,
}

/// Classical Weierstrass parametrization.
pub fn phi_from_fg(f: &BaseJet, g: &BaseJet) -> [BaseJet; 3] {
    let one = BaseJet::real_constant(1.0);
    let g2 = g.mul(g);
    let phi1 = f.mul(&one.sub(&g2)).scale(c64(0.5, 0.0));
    let phi2 = f.mul(&one.add(&g2)).scale(c64(0.0, 0.5));
    let phi3 = f.mul(g);
    [phi1, phi2, phi3]
}

/// Stereographic parametrization of the unit normal by zeta.
pub fn stereographic_jets(zeta: &BaseJet) -> (BaseJet, BaseJet, BaseJet) {
    let one = BaseJet::real_constant(1.0);
    let n2 = zeta.abs2();
    let denom = one.add(&n2).recip();
    let alpha = one.sub(&n2).mul(&denom).re();
    let beta = zeta.add(&zeta.conj()).mul(&denom).re();
    let gamma = zeta.conj().sub(zeta).scale(c64(0.0, 1.0)).mul(&denom).re();
    (alpha, beta, gamma)
}

/// Point on the Gauss sphere, stereographic coordinate or the point at
/// infinity (normal (-1, 0, 0)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZetaPoint {
    Finite(Complex64),
    Infinity,
}

/// Unit normal from a stereographic value.
pub fn stereographic(z: ZetaPoint) -> (f64, f64, f64) {
    match z {
        ZetaPoint::Infinity => (-1.0, 0.0, 0.0),
        ZetaPoint::Finite(z) => {
            let n2 = z.norm_sqr();
            let d = 1.0 + n2;
            // i (conj(z) - z) = 2 Im z
            ((1.0 - n2) / d, 2.0 * z.re / d, 2.0 * z.im / d)
        }
    }
}

/// Inverse of the stereographic parametrization.
pub fn zeta_from_normal(alpha: f64, beta: f64, gamma: f64) -> Result<ZetaPoint> {
    let n = alpha * alpha + beta * beta + gamma * gamma;
    if (n - 1.0).abs() > 1e-10 {
        return Err(KernelError::Domain(format!("normal has |n|^2 = {n}, expected 1")));
    }
    if 1.0 + alpha < 1e-12 {
        return Ok(ZetaPoint::Infinity);
    }
    Ok(ZetaPoint::Finite(c64(beta, gamma) / (1.0 + alpha)))
}

/// kappa, sigma from the unit normal; poles at alpha = +-1.
pub fn kappa_sigma(alpha: f64, beta: f64, gamma: f64) -> Result<(Complex64, Complex64)> {
    let bg = beta * beta + gamma * gamma;
    if bg < 1e-12 {
        return Err(KernelError::KappaSigmaPole(c64(f64::NAN, f64::NAN)));
    }
    let kappa = c64(alpha * gamma, beta) / bg;
    let sigma = c64(alpha * beta, -gamma) / bg;
    Ok((kappa, sigma))
}

impl WeierstrassChart {
    pub fn new(name: &str, domain: Rect, kind: ChartKind, genus: Option<u32>) -> Self {
        WeierstrassChart { name: name.to_string(), domain, kind, genus }
    }

    /// Validate the chart: pole locations for rational data, branch geometry
    /// for algebraic data.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ChartKind::WeierstrassFg { f, g } => {
                for (label, r) in [("f", f), ("g", g)] {
                    if let Some(p) = r.poles_in(&self.domain)?.first() {
                        return Err(KernelError::PoleInDomain {
                            what: label.to_string(),
                            location: *p,
                        });
                    }
                }
                Ok(())
            }
            ChartKind::PhiExplicit(phis) => {
                for (j, r) in phis.iter().enumerate() {
                    if let Some(p) = r.poles_in(&self.domain)?.first() {
                        return Err(KernelError::PoleInDomain {
                            what: format!("phi_{}", j + 1),
                            location: *p,
                        });
                    }
                }
                Ok(())
            }
            ChartKind::Algebraic { curve, mode } => {
                let roots = poly_roots(&curve.0)?;
                match mode {
                    AlgebraicMode::AvoidBranch => {
                        if let Some(r) = roots.iter().find(|r| self.domain.contains(**r)) {
                            return Err(KernelError::Domain(format!(
                                "branch point {r} inside an avoid-branch chart"
                            )));
                        }
                    }
                    AlgebraicMode::AtBranch { center } => {
                        if !roots.iter().any(|r| (r - center).norm() < 1e-8) {
                            return Err(KernelError::Domain(format!(
                                "center {center} is not a branch point of the curve"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ChartKind::SyntheticZeta(_) => Ok(()),
        }
    }

    /// Holomorphic data phi_1..3 as jets at z.
    pub fn phi_jets(&self, z: Complex64) -> Result<[BaseJet; 3]> {
        let zj = BaseJet::variable_z(z);
        match &self.kind {
            ChartKind::PhiExplicit(phis) => {
                Ok([phis[0].eval_jet(&zj), phis[1].eval_jet(&zj), phis[2].eval_jet(&zj)])
            }
            ChartKind::WeierstrassFg { f, g } => {
                Ok(phi_from_fg(&f.eval_jet(&zj), &g.eval_jet(&zj)))
            }
            ChartKind::Algebraic { curve, mode } => {
                let (f, g) = algebraic_fg(curve, mode, &zj)?;
                Ok(phi_from_fg(&f, &g))
            }
            ChartKind::SyntheticZeta(_) => Err(KernelError::Domain(
                "synthetic zeta charts carry no Weierstrass data".into(),
            )),
        }
    }

    /// phi_1^2 + phi_2^2 + phi_3^2 at z.
    pub fn cone_residual(&self, z: Complex64) -> Result<Complex64> {
        let phi = self.phi_jets(z)?;
        Ok((phi[0].mul(&phi[0]).add(&phi[1].mul(&phi[1])).add(&phi[2].mul(&phi[2]))).val())
    }

    /// Unit normal and conformal factor only; valid even at the stereographic
    /// pole alpha = -1 where the full jet set is unavailable.
    pub fn gauss_components(&self, z: Complex64) -> Result<(f64, f64, f64, f64)> {
        let phi = self.phi_jets(z)?;
        let [p1, p2, p3] = &phi;
        let lambda = 0.5 * (p1.val().norm_sqr() + p2.val().norm_sqr() + p3.val().norm_sqr());
        if lambda <= 1e-14 {
            return Err(KernelError::BranchPoint(z));
        }
        let half_i = c64(0.0, 0.5);
        let a = ((p2.val() * p3.val().conj() - p3.val() * p2.val().conj()) * half_i).re / lambda;
        let b = ((p3.val() * p1.val().conj() - p1.val() * p3.val().conj()) * half_i).re / lambda;
        let g = ((p1.val() * p2.val().conj() - p2.val() * p1.val().conj()) * half_i).re / lambda;
        Ok((a, b, g, lambda))
    }

    /// Full Gauss data jets at z.
    pub fn gauss_at(&self, z: Complex64) -> Result<GaussJets> {
        if let ChartKind::SyntheticZeta(field) = &self.kind {
            let zj = BaseJet::variable_z(z);
            let zeta = match field {
                ZetaField::ConjZ => zj.conj(),
                ZetaField::Holo(p) => p.eval_jet(&zj),
            };
            return gauss_from_zeta(&zeta, z);
        }
        let phi = self.phi_jets(z)?;
        gauss_from_phi(phi, z)
    }

    /// Ramification points of the Gauss map inside the chart domain, found by
    /// scanning |zeta_z| and polishing with Newton on the holomorphic zeta_z.
    pub fn ramification_scan(&self, samples: usize) -> Result<Vec<(Complex64, usize)>> {
        let grid = ChartGrid::new(self.domain, samples.max(16));
        let mut max_dzeta: f64 = 0.0;
        let mut seeds = Vec::new();
        let mut vals = vec![0.0f64; grid.npts()];
        for (i, z) in grid.points() {
            let gj = self.gauss_at(z)?;
            let d = gj.zeta.wirt_z().val().norm();
            vals[i] = d;
            max_dzeta = max_dzeta.max(d);
        }
        if max_dzeta < 1e-13 {
            return Err(KernelError::Degenerate(
                "degenerate Gauss map: d zeta is identically zero on the chart".into(),
            ));
        }
        for iu in 1..grid.n - 1 {
            for iv in 1..grid.n - 1 {
                let i = grid.idx(iu, iv);
                let v = vals[i];
                if v >= 0.05 * max_dzeta {
                    continue;
                }
                let is_min = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)].iter().all(|(a, b)| {
                    vals[grid.idx((iu as isize + a) as usize, (iv as isize + b) as usize)] >= v
                });
                if is_min {
                    seeds.push(grid.point_at(i));
                }
            }
        }
        let mut found: Vec<Complex64> = Vec::new();
        for seed in seeds {
            let mut z = seed;
            let mut ok = false;
            for _ in 0..60 {
                let gj = self.gauss_at(z)?;
                let dz = gj.zeta.wirt_z();
                let f = dz.val();
                let df = dz.wirt_z().val();
                if df.norm() < 1e-14 {
                    break;
                }
                let step = f / df;
                z -= step;
                if step.norm() < 1e-13 {
                    ok = true;
                    break;
                }
            }
            if ok && self.domain.contains(z) {
                let resid = self.gauss_at(z)?.zeta.wirt_z().val().norm();
                if resid < 1e-10 * max_dzeta && !found.iter().any(|w| (w - z).norm() < 1e-8) {
                    found.push(z);
                }
            }
        }
        Ok(cluster_roots(&found, 1e-8))
    }
}

/// Solve the curve data for the classical pair (f, g) in jet arithmetic.
fn algebraic_fg(curve: &Poly, mode: &AlgebraicMode, zj: &BaseJet) -> Result<(BaseJet, BaseJet)> {
    let dcurve = curve.derivative();
    match mode {
        AlgebraicMode::AvoidBranch => {
            // g = w = z, f = 1/y with y the principal branch of sqrt(P)
            let p = curve.eval_jet(zj);
            if p.val().norm() < 1e-12 {
                return Err(KernelError::BranchPoint(zj.val()));
            }
            if p.val().re < 0.0 && p.val().im.abs() < 1e-9 {
                return Err(KernelError::Domain(
                    "curve value crosses the principal sqrt branch cut".into(),
                ));
            }
            Ok((p.sqrt().recip(), *zj))
        }
        AlgebraicMode::AtBranch { center } => {
            // chart coordinate is y; solve P(w) = y^2 near the center by
            // Newton iteration in jets
            let target = zj.mul(zj);
            let mut w = BaseJet::constant(*center);
            let mut converged = false;
            for _ in 0..80 {
                let pw = curve.eval_jet(&w);
                let dpw = dcurve.eval_jet(&w);
                if dpw.val().norm() < 1e-12 {
                    return Err(KernelError::Domain(
                        "curve derivative vanishes; chart leaves the branch neighborhood".into(),
                    ));
                }
                let step = pw.sub(&target).div(&dpw);
                w = w.sub(&step);
                if step.max_norm() < 1e-14 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(KernelError::RootFinding(f64::NAN));
            }
            let f = dcurve.eval_jet(&w).recip().scale(c64(2.0, 0.0));
            Ok((f, w))
        }
    }
}

/// Gauss quantities from the holomorphic data.
pub fn gauss_from_phi(phi: [BaseJet; 3], z: Complex64) -> Result<GaussJets> {
    let [p1, p2, p3] = &phi;
    let two_lambda = p1.abs2().add(&p2.abs2()).add(&p3.abs2()).re();
    let lambda = two_lambda.scale(c64(0.5, 0.0));
    if lambda.val().re <= 1e-14 {
        return Err(KernelError::BranchPoint(z));
    }
    let ilam = lambda.recip();
    let half_i = c64(0.0, 0.5);
    // -2 i lambda alpha = phi2 conj(phi3) - phi3 conj(phi2)  =>  alpha = i/2 * (...) / lambda
    let alpha = p2.mul(&p3.conj()).sub(&p3.mul(&p2.conj())).scale(half_i).mul(&ilam).re();
    let beta = p3.mul(&p1.conj()).sub(&p1.mul(&p3.conj())).scale(half_i).mul(&ilam).re();
    let gamma = p1.mul(&p2.conj()).sub(&p2.mul(&p1.conj())).scale(half_i).mul(&ilam).re();
    finish_gauss(phi, lambda, alpha, beta, gamma, z)
}

/// Gauss quantities from a synthetic stereographic field (flat base metric).
pub fn gauss_from_zeta(zeta: &BaseJet, z: Complex64) -> Result<GaussJets> {
    let (alpha, beta, gamma) = stereographic_jets(zeta);
    let lambda = BaseJet::real_constant(1.0);
    let phi = [BaseJet::real_constant(1.0), BaseJet::constant(c64(0.0, 1.0)), BaseJet::real_constant(0.0)];
    finish_gauss_with_zeta(phi, lambda, alpha, beta, gamma, *zeta, z)
}

fn finish_gauss(
    phi: [BaseJet; 3],
    lambda: BaseJet,
    alpha: BaseJet,
    beta: BaseJet,
    gamma: BaseJet,
    z: Complex64,
) -> Result<GaussJets> {
    let one_plus_a = alpha.add(&BaseJet::real_constant(1.0));
    if one_plus_a.val().norm() < 1e-12 {
        return Err(KernelError::Domain(format!(
            "stereographic pole (alpha = -1) at z = {z}; pick a rotated chart"
        )));
    }
    let zeta = beta.add(&gamma.scale(c64(0.0, 1.0))).div(&one_plus_a);
    finish_gauss_with_zeta(phi, lambda, alpha, beta, gamma, zeta, z)
}

fn finish_gauss_with_zeta(
    phi: [BaseJet; 3],
    lambda: BaseJet,
    alpha: BaseJet,
    beta: BaseJet,
    gamma: BaseJet,
    zeta: BaseJet,
    _z: Complex64,
) -> Result<GaussJets> {
    let bg = beta.mul(&beta).add(&gamma.mul(&gamma));
    let kappa_sigma = if bg.val().re > 1e-12 {
        let ibg = bg.recip();
        let kappa = alpha.mul(&gamma).add(&beta.scale(c64(0.0, 1.0))).mul(&ibg);
        let sigma = alpha.mul(&beta).sub(&gamma.scale(c64(0.0, 1.0))).mul(&ibg);
        Some((kappa, sigma))
    } else {
        None
    };
    // energy 8 |alpha_z|^2 / (lambda (beta^2+gamma^2)); equivalently the
    // stereographic form 8 |zeta_z|^2 / (lambda (1+|zeta|^2)^2) at the
    // kappa/sigma poles
    let dg2 = if bg.val().re > 1e-6 {
        let az = alpha.wirt_z();
        az.abs2().scale(c64(8.0, 0.0)).div(&lambda.mul(&bg)).re()
    } else {
        let zz = zeta.wirt_z();
        let d = BaseJet::real_constant(1.0).add(&zeta.abs2());
        zz.abs2().scale(c64(8.0, 0.0)).div(&lambda.mul(&d).mul(&d)).re()
    };
    Ok(GaussJets { phi, lambda, alpha, beta, gamma, zeta, kappa_sigma, dg2 })
}

impl GaussJets {
    /// Residuals of the minimal-surface derivative relations and the
    /// phi-proportionality of normal derivatives.
    pub fn relation_residuals(&self) -> [f64; 4] {
        let i = c64(0.0, 1.0);
        let az = self.alpha.wirt_zbar();
        let bz = self.beta.wirt_zbar();
        let gz = self.gamma.wirt_zbar();
        let r1 = az.scale(-i).sub(&self.beta.mul(&gz).sub(&self.gamma.mul(&bz)));
        let r2 = bz.scale(-i).sub(&self.gamma.mul(&az).sub(&self.alpha.mul(&gz)));
        let r3 = gz.scale(-i).sub(&self.alpha.mul(&bz).sub(&self.beta.mul(&az)));
        // proportionality phi_1^-1 alpha_zbar = phi_2^-1 beta_zbar = ...
        let mut ratios: Vec<Complex64> = Vec::new();
        for (p, d) in self.phi.iter().zip([&az, &bz, &gz]) {
            if p.val().norm() > 1e-9 {
                ratios.push(d.val() / p.val());
            }
        }
        let mut r4: f64 = 0.0;
        for w in ratios.windows(2) {
            r4 = r4.max((w[0] - w[1]).norm());
        }
        [r1.val().norm(), r2.val().norm(), r3.val().norm(), r4]
    }

    /// Cauchy-Riemann residual of the holomorphic data.
    pub fn cr_residual(&self) -> f64 {
        self.phi.iter().map(|p| p.wirt_zbar().val().norm()).fold(0.0, f64::max)
    }

    /// Unit-norm residual of the Gauss components.
    pub fn unit_residual(&self) -> f64 {
        let n = self.alpha.mul(&self.alpha).add(&self.beta.mul(&self.beta)).add(&self.gamma.mul(&self.gamma));
        (n.val() - cone()).norm()
    }
}

/// Per-point sampled values with first and second derivatives, the working
/// set for the grid engines.
#[derive(Clone, Debug)]
pub struct GaussPoint {
    /// [value, du, dv, duu, duv, dvv]
    pub alpha: [f64; 6],
    pub beta: [f64; 6],
    pub gamma: [f64; 6],
    pub lambda: [f64; 6],
    pub dg2: [f64; 6],
    pub zeta: [Complex64; 6],
    pub phi: [Complex64; 3],
}

fn six_real(j: &BaseJet) -> [f64; 6] {
    [j.val().re, j.du().re, j.dv().re, j.duu().re, j.duv().re, j.dvv().re]
}

fn six_complex(j: &BaseJet) -> [Complex64; 6] {
    [j.val(), j.du(), j.dv(), j.duu(), j.duv(), j.dvv()]
}

#[derive(Clone, Debug)]
pub struct GaussGrid {
    pub grid: ChartGrid,
    pub pts: Vec<GaussPoint>,
    pub dg2_max: f64,
}

impl GaussGrid {
    pub fn sample(chart: &WeierstrassChart, grid: ChartGrid) -> Result<GaussGrid> {
        let mut pts = Vec::with_capacity(grid.npts());
        let mut dg2_max: f64 = 0.0;
        for (_, z) in grid.points() {
            let gj = chart.gauss_at(z)?;
            dg2_max = dg2_max.max(gj.dg2.val().re);
            pts.push(GaussPoint {
                alpha: six_real(&gj.alpha),
                beta: six_real(&gj.beta),
                gamma: six_real(&gj.gamma),
                lambda: six_real(&gj.lambda),
                dg2: six_real(&gj.dg2),
                zeta: six_complex(&gj.zeta),
                phi: [gj.phi[0].val(), gj.phi[1].val(), gj.phi[2].val()],
            });
        }
        Ok(GaussGrid { grid, pts, dg2_max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enneper() -> WeierstrassChart {
        WeierstrassChart::new(
            "enneper",
            Rect::centered(0.55, 0.55),
            ChartKind::WeierstrassFg {
                f: Rational::constant(c64(1.0, 0.0)),
                g: Rational::poly(Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0)])),
            },
            None,
        )
    }

    fn flat() -> WeierstrassChart {
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
    fn phi_from_fg_hand_values() {
        // f = 1, g = 0 -> (1/2, i/2, 0)
        let [p1, p2, p3] = phi_from_fg(&BaseJet::real_constant(1.0), &BaseJet::real_constant(0.0));
        assert!((p1.val() - c64(0.5, 0.0)).norm() < 1e-15);
        assert!((p2.val() - c64(0.0, 0.5)).norm() < 1e-15);
        assert!(p3.val().norm() < 1e-15);
        // f = 1, g = z at z = 1 -> (0, i, 1)
        let z = BaseJet::variable_z(c64(1.0, 0.0));
        let [q1, q2, q3] = phi_from_fg(&BaseJet::real_constant(1.0), &z);
        assert!(q1.val().norm() < 1e-15);
        assert!((q2.val() - c64(0.0, 1.0)).norm() < 1e-15);
        assert!((q3.val() - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cone_condition_is_identically_satisfied() {
        let ch = enneper();
        for z in [c64(0.0, 0.0), c64(0.31, -0.12), c64(-0.5, 0.45)] {
            assert!(ch.cone_residual(z).unwrap().norm() < 1e-14);
        }
        // invalid data (1, 0, 0) has residual 1
        let bad = WeierstrassChart::new(
            "bad",
            Rect::centered(0.5, 0.5),
            ChartKind::PhiExplicit([
                Rational::constant(c64(1.0, 0.0)),
                Rational::constant(c64(0.0, 0.0)),
                Rational::constant(c64(0.0, 0.0)),
            ]),
            None,
        );
        assert!((bad.cone_residual(c64(0.1, 0.1)).unwrap() - cone()).norm() < 1e-15);
    }

    #[test]
    fn flat_chart_normal_is_e3() {
        let gj = flat().gauss_at(c64(0.2, -0.3)).unwrap();
        assert!((gj.lambda.val() - cone()).norm() < 1e-15);
        assert!(gj.alpha.val().norm() < 1e-15);
        assert!(gj.beta.val().norm() < 1e-15);
        assert!((gj.gamma.val() - cone()).norm() < 1e-15);
        // zeta = (beta + i gamma)/(1 + alpha) = i
        assert!((gj.zeta.val() - c64(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn enneper_z1_normal() {
        // phi(1) = (0, i, 1): alpha = -1... check against the displayed
        // formulas instead: -2 i lambda beta = phi3 conj(phi1) - phi1 conj(phi3)
        // with phi = (0, i, 1): lambda = 1, beta: 0; alpha: phi2 conj(phi3) -
        // phi3 conj(phi2) = i - (-i) = 2i => alpha = 2i * i/2 = -1.
        let ch = WeierstrassChart::new(
            "enneper-wide",
            Rect::centered(1.1, 1.1),
            ChartKind::WeierstrassFg {
                f: Rational::constant(c64(1.0, 0.0)),
                g: Rational::poly(Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0)])),
            },
            None,
        );
        // alpha = -1 is the stereographic pole: gauss_at must refuse,
        // but the component evaluation still returns (-1, 0, 0) with lambda 1
        assert!(ch.gauss_at(c64(1.0, 0.0)).is_err());
        let (a, b, g, lam) = ch.gauss_components(c64(1.0, 0.0)).unwrap();
        assert!((a + 1.0).abs() < 1e-14 && b.abs() < 1e-14 && g.abs() < 1e-14);
        assert!((lam - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_phi_is_a_branch_point_error() {
        let ch = WeierstrassChart::new(
            "degenerate",
            Rect::centered(0.5, 0.5),
            ChartKind::PhiExplicit([
                Rational::constant(c64(0.0, 0.0)),
                Rational::constant(c64(0.0, 0.0)),
                Rational::constant(c64(0.0, 0.0)),
            ]),
            None,
        );
        assert!(matches!(ch.gauss_at(c64(0.0, 0.0)), Err(KernelError::BranchPoint(_))));
    }

    #[test]
    fn stereographic_point_values() {
        let (a, b, g) = stereographic(ZetaPoint::Finite(c64(0.0, 0.0)));
        assert_eq!((a, b, g), (1.0, 0.0, 0.0));
        let (a, b, g) = stereographic(ZetaPoint::Finite(c64(1.0, 0.0)));
        assert!(a.abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && g.abs() < 1e-15);
        let (a, b, g) = stereographic(ZetaPoint::Finite(c64(0.0, 1.0)));
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && (g - 1.0).abs() < 1e-15);
        assert_eq!(stereographic(ZetaPoint::Infinity), (-1.0, 0.0, 0.0));
    }

    #[test]
    fn zeta_normal_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let z: f64 = rng.gen_range(-1.0..1.0);
            let n = (x * x + y * y + z * z).sqrt();
            if n < 1e-3 {
                continue;
            }
            let (a, b, g) = (x / n, y / n, z / n);
            // exclude a small neighborhood of the poles (+-1, 0, 0)
            if (a.abs() - 1.0).abs() < 1e-6 {
                continue;
            }
            let zp = zeta_from_normal(a, b, g).unwrap();
            let (a2, b2, g2) = stereographic(zp);
            assert!(
                (a - a2).abs() < 1e-10 && (b - b2).abs() < 1e-10 && (g - g2).abs() < 1e-10,
                "round trip failed at ({a},{b},{g})"
            );
            checked += 1;
        }
        assert_eq!(zeta_from_normal(1.0, 0.0, 0.0).unwrap(), ZetaPoint::Finite(c64(0.0, 0.0)));
        assert_eq!(zeta_from_normal(-1.0, 0.0, 0.0).unwrap(), ZetaPoint::Infinity);
        assert!(zeta_from_normal(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn kappa_sigma_values_and_pole() {
        let (k, s) = kappa_sigma(0.0, 0.0, 1.0).unwrap();
        assert!(k.norm() < 1e-15 && (s - c64(0.0, -1.0)).norm() < 1e-15);
        let (k, s) = kappa_sigma(0.0, 1.0, 0.0).unwrap();
        assert!((k - c64(0.0, 1.0)).norm() < 1e-15 && s.norm() < 1e-15);
        assert!(kappa_sigma(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn kappa_sigma_jets_agree_with_zeta_forms() {
        // kappa = i/2 (zeta + 1/zeta), sigma = -1/2 (zeta - 1/zeta)
        let ch = enneper();
        for z in [c64(0.2, 0.3), c64(-0.4, 0.1), c64(0.0, -0.35)] {
            let gj = ch.gauss_at(z).unwrap();
            let (k, s) = gj.kappa_sigma.clone().unwrap();
            let zeta = &gj.zeta;
            let izeta = zeta.recip();
            let k2 = zeta.add(&izeta).scale(c64(0.0, 0.5));
            let s2 = zeta.sub(&izeta).scale(c64(-0.5, 0.0));
            assert!(k.sub(&k2).max_norm() < 1e-10, "kappa routes disagree at {z}");
            assert!(s.sub(&s2).max_norm() < 1e-10, "sigma routes disagree at {z}");
            // holomorphy
            assert!(k.wirt_zbar().val().norm() < 1e-10);
            assert!(s.wirt_zbar().val().norm() < 1e-10);
        }
    }

    #[test]
    fn minimal_relations_hold_and_fail_for_the_conjugate_control() {
        let ch = enneper();
        let gj = ch.gauss_at(c64(0.3, 0.2)).unwrap();
        for r in gj.relation_residuals() {
            assert!(r < 1e-12, "relation residual {r}");
        }
        assert!(gj.unit_residual() < 1e-12);
        assert!(gj.cr_residual() < 1e-12);

        let control = WeierstrassChart::new(
            "conj-control",
            Rect::centered(0.5, 0.5),
            ChartKind::SyntheticZeta(ZetaField::ConjZ),
            None,
        );
        let gj = control.gauss_at(c64(0.3, 0.2)).unwrap();
        let r = gj.relation_residuals();
        assert!(r[0].max(r[1]).max(r[2]) > 0.01, "control must violate the relations");
    }

    #[test]
    fn gauss_energy_flat_zero_enneper_positive() {
        assert!(flat().gauss_at(c64(0.1, 0.1)).unwrap().dg2.val().norm() < 1e-15);
        let e = enneper().gauss_at(c64(0.0, 0.0)).unwrap().dg2.val().re;
        assert!(e > 0.1, "enneper Gauss energy at 0 must be positive, got {e}");
    }

    #[test]
    fn gauss_energy_is_rotation_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let base = enneper();
        for _ in 0..10 {
            // random rotation by orthonormalizing a random 3x3
            let mut m = nalgebra::Matrix3::<f64>::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] = rng.gen_range(-1.0..1.0);
                }
            }
            let qr = m.qr();
            let mut q = qr.q();
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            let z = c64(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            let phi = base.phi_jets(z).unwrap();
            let rphi: Vec<BaseJet> = (0..3)
                .map(|i| {
                    phi[0]
                        .scale(c64(q[(i, 0)], 0.0))
                        .add(&phi[1].scale(c64(q[(i, 1)], 0.0)))
                        .add(&phi[2].scale(c64(q[(i, 2)], 0.0)))
                })
                .collect();
            let g0 = gauss_from_phi(phi, z).unwrap();
            match gauss_from_phi([rphi[0], rphi[1], rphi[2]], z) {
                Ok(g1) => {
                    assert!(
                        (g0.dg2.val() - g1.dg2.val()).norm() < 1e-10,
                        "energy changed under rotation"
                    );
                }
                Err(_) => {} // rotated normal hit the stereographic pole; skip
            }
        }
    }

    #[test]
    fn schwarz_p_charts_build_and_are_minimal() {
        let octic = Poly(vec![
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(-14.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(1.0, 0.0),
        ]);
        let w0 = (2.0f64 - 3.0f64.sqrt()).sqrt();
        let avoid = WeierstrassChart::new(
            "schwarz-p",
            Rect::centered(0.3, 0.3),
            ChartKind::Algebraic { curve: octic.clone(), mode: AlgebraicMode::AvoidBranch },
            Some(3),
        );
        avoid.validate().unwrap();
        let gj = avoid.gauss_at(c64(0.1, -0.2)).unwrap();
        assert!(avoid.cone_residual(c64(0.1, -0.2)).unwrap().norm() < 1e-12);
        for r in gj.relation_residuals() {
            assert!(r < 1e-10, "schwarz-p relation residual {r}");
        }
        let ram = WeierstrassChart::new(
            "schwarz-p-ram",
            Rect::centered(0.4, 0.4),
            ChartKind::Algebraic {
                curve: octic,
                mode: AlgebraicMode::AtBranch { center: c64(w0, 0.0) },
            },
            Some(3),
        );
        ram.validate().unwrap();
        // at z = 0 the Gauss map ramifies: energy vanishes
        let g0 = ram.gauss_at(c64(0.0, 0.0)).unwrap();
        assert!(g0.dg2.val().norm() < 1e-20, "energy at the ramification point");
        // and g(0) equals the branch value w0 (phi1 - i phi2 = f, phi3 = f g)
        let phi = ram.phi_jets(c64(0.0, 0.0)).unwrap();
        let f = phi[0].sub(&phi[1].scale(c64(0.0, 1.0)));
        let g = phi[2].div(&f);
        assert!((g.val() - c64(w0, 0.0)).norm() < 1e-10);
        // minimality relations away from the center
        let gj = ram.gauss_at(c64(0.2, 0.1)).unwrap();
        for r in gj.relation_residuals() {
            assert!(r < 1e-10, "ram chart relation residual {r}");
        }
    }

    #[test]
    fn ramification_scan_on_charts() {
        // flat chart: degenerate Gauss map
        assert!(matches!(
            flat().ramification_scan(24),
            Err(KernelError::Degenerate(_))
        ));
        // enneper: no ramification points inside the chart
        assert!(enneper().ramification_scan(24).unwrap().is_empty());
    }

    #[test]
    fn pole_detection_in_fg_data() {
        let ch = WeierstrassChart::new(
            "polar",
            Rect::centered(0.5, 0.5),
            ChartKind::WeierstrassFg {
                f: Rational {
                    num: Poly(vec![c64(1.0, 0.0)]),
                    den: Poly(vec![c64(-0.1, 0.0), c64(1.0, 0.0)]), // pole at z = 0.1
                },
                g: Rational::poly(Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0)])),
            },
            None,
        );
        match ch.validate() {
            Err(KernelError::PoleInDomain { what, location }) => {
                assert_eq!(what, "f");
                assert!((location - c64(0.1, 0.0)).norm() < 1e-10);
            }
            other => panic!("expected pole error, got {other:?}"),
        }
    }
}

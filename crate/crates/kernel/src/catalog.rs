//! Built-in surface charts.

use crate::error::{KernelError, Result};
use crate::grid::Rect;
use crate::weierstrass::{
    AlgebraicMode, ChartKind, Poly, Rational, WeierstrassChart,
};
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients of w^8 - 14 w^4 + 1, the Gauss-map curve of the Schwarz P
/// surface (genus 3, degree-2 Gauss map).
pub fn schwarz_p_octic() -> Poly {
    let mut c = vec![c64(0.0, 0.0); 9];
    c[0] = c64(1.0, 0.0);
    c[4] = c64(-14.0, 0.0);
    c[8] = c64(1.0, 0.0);
    Poly(c)
}

/// The real branch value sqrt(2 - sqrt 3) of the octic.
pub fn schwarz_p_branch_value() -> f64 {
    (2.0f64 - 3.0f64.sqrt()).sqrt()
}

pub fn builtin_names() -> Vec<&'static str> {
    vec!["flat", "enneper", "schwarz-p", "schwarz-p-ram"]
}

/// Built-in charts:
///  - "flat": constant data (1, i, 0); a totally geodesic torus chart with
///    constant Gauss map.
///  - "enneper": f = 1, g = z; a local minimal chart, not torus-periodic.
///  - "schwarz-p": Gauss-coordinate chart of y^2 = w^8 - 14 w^4 + 1 with
///    f = 1/y, g = w, placed away from the branch points.
///  - "schwarz-p-ram": the same curve in the branch coordinate, centered at
///    the ramification point with Gauss value sqrt(2 - sqrt 3).
pub fn builtin(name: &str) -> Result<WeierstrassChart> {
    match name {
        "flat" => Ok(WeierstrassChart::new(
            "flat",
            Rect::centered(0.5, 0.5),
            ChartKind::PhiExplicit([
                Rational::constant(c64(1.0, 0.0)),
                Rational::constant(c64(0.0, 1.0)),
                Rational::constant(c64(0.0, 0.0)),
            ]),
            None,
        )),
        "enneper" => Ok(WeierstrassChart::new(
            "enneper",
            Rect::centered(0.32, 0.32),
            ChartKind::WeierstrassFg {
                f: Rational::constant(c64(1.0, 0.0)),
                g: Rational::poly(Poly(vec![c64(0.0, 0.0), c64(1.0, 0.0)])),
            },
            None,
        )),
        "schwarz-p" => Ok(WeierstrassChart::new(
            "schwarz-p",
            Rect::centered(0.25, 0.25),
            ChartKind::Algebraic { curve: schwarz_p_octic(), mode: AlgebraicMode::AvoidBranch },
            Some(3),
        )),
        "schwarz-p-ram" => Ok(WeierstrassChart::new(
            "schwarz-p-ram",
            Rect::centered(0.4, 0.4),
            ChartKind::Algebraic {
                curve: schwarz_p_octic(),
                mode: AlgebraicMode::AtBranch { center: c64(schwarz_p_branch_value(), 0.0) },
            },
            Some(3),
        )),
        other => Err(KernelError::UnknownSurface(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in builtin_names() {
            builtin(name).unwrap().validate().unwrap();
        }
        assert!(matches!(builtin("nope"), Err(KernelError::UnknownSurface(_))));
    }

    #[test]
    fn flat_gauss_is_constant_001() {
        let ch = builtin("flat").unwrap();
        let (a, b, g, _) = ch.gauss_components(c64(0.2, 0.1)).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && (g - 1.0).abs() < 1e-15);
    }

    #[test]
    fn enneper_center_normal_is_001() {
        let ch = builtin("enneper").unwrap();
        let (a, b, g, lam) = ch.gauss_components(c64(0.0, 0.0)).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && (g - 1.0).abs() < 1e-15);
        assert!((lam - 0.25).abs() < 1e-15);
    }
}

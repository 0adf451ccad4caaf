//! Complex polynomial roots by simultaneous (Durand-Kerner) iteration with a
//! Newton polish, plus clustering into multiplicities.

use crate::error::{KernelError, Result};
use num_complex::Complex64;

/// Evaluate a polynomial (ascending coefficients) and its derivative.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Strip trailing (numerically zero) leading coefficients.
fn trim(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let mut v: Vec<Complex64> = coeffs.to_vec();
    while v.len() > 1 && v.last().unwrap().norm() < 1e-14 * scale {
        v.pop();
    }
    v
}

/// All complex roots of the polynomial, Durand-Kerner with deterministic
/// starting points followed by Newton polish.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound for root magnitudes
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let start_radius = bound.min(2.0).max(0.5);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.3713;
            Complex64::from_polar(start_radius, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut shift: f64 = 0.0;
        for i in 0..deg {
            let (p, _) = poly_eval(&monic, roots[i]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let delta = p / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-14 * bound {
            break;
        }
    }
    // Newton polish (helps simple roots reach full precision)
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = poly_eval(&monic, *r);
            if dp.norm() < 1e-14 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() < 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    // residual diagnostic
    let mut worst: f64 = 0.0;
    for &r in &roots {
        let (p, _) = poly_eval(&monic, r);
        worst = worst.max(p.norm() / (1.0 + r.norm().powi(deg as i32)));
    }
    if worst > 1e-9 {
        return Err(KernelError::RootFinding(worst));
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

/// Cluster numerically coincident roots into (root, multiplicity) pairs.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        if let Some(entry) = out.iter_mut().find(|(c, _)| (*c - r).norm() < tol) {
            let (c, m) = *entry;
            let newm = m + 1;
            entry.0 = (c * m as f64 + r) / newm as f64;
            entry.1 = newm;
        } else {
            out.push((r, 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_quadratic() {
        // (z - 2)(z + 3i) = z^2 + (3i - 2) z - 6i
        let coeffs = [c(0.0, -6.0), c(-2.0, 3.0), c(1.0, 0.0)];
        let roots = poly_roots(&coeffs).unwrap();
        assert!(roots.iter().any(|r| (r - c(2.0, 0.0)).norm() < 1e-12));
        assert!(roots.iter().any(|r| (r - c(0.0, -3.0)).norm() < 1e-12));
    }

    #[test]
    fn schwarz_p_octic_roots() {
        // w^8 - 14 w^4 + 1: |w| in { sqrt(2+sqrt3), sqrt(2-sqrt3) }
        let mut coeffs = vec![c(0.0, 0.0); 9];
        coeffs[0] = c(1.0, 0.0);
        coeffs[4] = c(-14.0, 0.0);
        coeffs[8] = c(1.0, 0.0);
        let roots = poly_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 8);
        let big = (2.0f64 + 3.0f64.sqrt()).sqrt();
        let small = (2.0f64 - 3.0f64.sqrt()).sqrt();
        for r in &roots {
            let m = r.norm();
            assert!(
                (m - big).abs() < 1e-10 || (m - small).abs() < 1e-10,
                "unexpected |root| {m}"
            );
        }
        // verify the closed-form real roots appear
        assert!(roots.iter().any(|r| (r - c(small, 0.0)).norm() < 1e-10));
        assert!(roots.iter().any(|r| (r - c(-big, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn multiple_root_clusters() {
        // (z-1)^3 (z+2)
        let coeffs = [c(-2.0, 0.0), c(5.0, 0.0), c(-3.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
        let roots = poly_roots(&coeffs).unwrap();
        let clusters = cluster_roots(&roots, 1e-3);
        let triple = clusters.iter().find(|(_, m)| *m == 3).expect("triple root");
        assert!((triple.0 - c(1.0, 0.0)).norm() < 1e-4);
    }
}

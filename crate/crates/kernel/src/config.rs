//! Surface description files.
//!
//! JSON schema (complex numbers are [re, im] pairs, polynomial coefficient
//! lists ascending):
//!
//! ```json
//! {
//!   "name": "enneper",
//!   "kind": "weierstrass-fg",
//!   "domain": { "u_min": -0.32, "u_max": 0.32, "v_min": -0.32, "v_max": 0.32 },
//!   "genus": null,
//!   "f": { "num": [[1.0, 0.0]], "den": [[1.0, 0.0]] },
//!   "g": { "num": [[0.0, 0.0], [1.0, 0.0]], "den": [[1.0, 0.0]] }
//! }
//! ```
//!
//! Kinds: "phi-explicit" carries `phi`: three rationals; "weierstrass-fg"
//! carries `f` and `g`; "algebraic" carries `branch` with the curve
//! coefficients and either "avoid-branch" or "at-branch" mode (the latter
//! with a `center` on the curve's branch locus).

use crate::error::{KernelError, Result};
use crate::grid::Rect;
use crate::weierstrass::{AlgebraicMode, ChartKind, Poly, Rational, WeierstrassChart};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RationalSpec {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BranchSpec {
    pub curve: Vec<[f64; 2]>,
    /// "avoid-branch" or "at-branch"
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub kind: String,
    pub domain: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<[RationalSpec; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<RationalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<RationalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchSpec>,
}

fn to_poly(v: &[[f64; 2]]) -> Poly {
    Poly(v.iter().map(|c| Complex64::new(c[0], c[1])).collect())
}

fn from_poly(p: &Poly) -> Vec<[f64; 2]> {
    p.0.iter().map(|c| [c.re, c.im]).collect()
}

fn to_rational(r: &RationalSpec) -> Rational {
    Rational { num: to_poly(&r.num), den: to_poly(&r.den) }
}

fn from_rational(r: &Rational) -> RationalSpec {
    RationalSpec { num: from_poly(&r.num), den: from_poly(&r.den) }
}

impl SurfaceSpec {
    pub fn to_chart(&self) -> Result<WeierstrassChart> {
        let kind = match self.kind.as_str() {
            "phi-explicit" => {
                let phi = self.phi.as_ref().ok_or_else(|| {
                    KernelError::Config("kind phi-explicit requires the 'phi' field".into())
                })?;
                ChartKind::PhiExplicit([
                    to_rational(&phi[0]),
                    to_rational(&phi[1]),
                    to_rational(&phi[2]),
                ])
            }
            "weierstrass-fg" => {
                let f = self.f.as_ref().ok_or_else(|| {
                    KernelError::Config("kind weierstrass-fg requires the 'f' field".into())
                })?;
                let g = self.g.as_ref().ok_or_else(|| {
                    KernelError::Config("kind weierstrass-fg requires the 'g' field".into())
                })?;
                ChartKind::WeierstrassFg { f: to_rational(f), g: to_rational(g) }
            }
            "algebraic" => {
                let b = self.branch.as_ref().ok_or_else(|| {
                    KernelError::Config("kind algebraic requires the 'branch' field".into())
                })?;
                let mode = match b.mode.as_str() {
                    "avoid-branch" => AlgebraicMode::AvoidBranch,
                    "at-branch" => {
                        let c = b.center.ok_or_else(|| {
                            KernelError::Config("at-branch mode requires 'center'".into())
                        })?;
                        AlgebraicMode::AtBranch { center: Complex64::new(c[0], c[1]) }
                    }
                    other => {
                        return Err(KernelError::Config(format!("unknown branch mode '{other}'")))
                    }
                };
                ChartKind::Algebraic { curve: to_poly(&b.curve), mode }
            }
            other => return Err(KernelError::Config(format!("unknown kind '{other}'"))),
        };
        let chart = WeierstrassChart::new(&self.name, self.domain, kind, self.genus);
        chart.validate()?;
        Ok(chart)
    }

    pub fn from_chart(chart: &WeierstrassChart) -> Result<SurfaceSpec> {
        let mut spec = SurfaceSpec {
            name: chart.name.clone(),
            kind: String::new(),
            domain: chart.domain,
            genus: chart.genus,
            phi: None,
            f: None,
            g: None,
            branch: None,
        };
        match &chart.kind {
            ChartKind::PhiExplicit(phi) => {
                spec.kind = "phi-explicit".into();
                spec.phi = Some([
                    from_rational(&phi[0]),
                    from_rational(&phi[1]),
                    from_rational(&phi[2]),
                ]);
            }
            ChartKind::WeierstrassFg { f, g } => {
                spec.kind = "weierstrass-fg".into();
                spec.f = Some(from_rational(f));
                spec.g = Some(from_rational(g));
            }
            ChartKind::Algebraic { curve, mode } => {
                spec.kind = "algebraic".into();
                spec.branch = Some(BranchSpec {
                    curve: from_poly(curve),
                    mode: match mode {
                        AlgebraicMode::AvoidBranch => "avoid-branch".into(),
                        AlgebraicMode::AtBranch { .. } => "at-branch".into(),
                    },
                    center: match mode {
                        AlgebraicMode::AtBranch { center } => Some([center.re, center.im]),
                        _ => None,
                    },
                });
            }
            ChartKind::SyntheticZeta(_) => {
                return Err(KernelError::Config(
                    "synthetic control charts have no file representation".into(),
                ))
            }
        }
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<SurfaceSpec> {
        serde_json::from_str(text).map_err(|e| {
            KernelError::Config(format!("parse error at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface spec serialization")
    }

    /// sha256 of the canonical serialization, for report provenance.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.to_json().as_bytes());
        hex_string(&h.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolve a CLI surface argument: an existing file wins, otherwise a
/// built-in catalog name.
pub fn resolve_surface(arg: &str) -> Result<(SurfaceSpec, WeierstrassChart)> {
    let path = std::path::Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let spec = SurfaceSpec::from_json(&text)?;
        let chart = spec.to_chart()?;
        Ok((spec, chart))
    } else {
        let chart = crate::catalog::builtin(arg)?;
        let spec = SurfaceSpec::from_chart(&chart)?;
        Ok((spec, chart))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trip_through_json() {
        for name in crate::catalog::builtin_names() {
            let chart = crate::catalog::builtin(name).unwrap();
            let spec = SurfaceSpec::from_chart(&chart).unwrap();
            let text = spec.to_json();
            let spec2 = SurfaceSpec::from_json(&text).unwrap();
            assert_eq!(spec, spec2);
            let chart2 = spec2.to_chart().unwrap();
            assert_eq!(chart.kind, chart2.kind);
            assert_eq!(spec.digest(), spec2.digest());
        }
    }

    #[test]
    fn malformed_config_reports_line() {
        let bad = "{\n  \"name\": \"x\",\n  broken\n}";
        match SurfaceSpec::from_json(bad) {
            Err(KernelError::Config(msg)) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn missing_fields_are_reported() {
        let spec = SurfaceSpec {
            name: "x".into(),
            kind: "weierstrass-fg".into(),
            domain: Rect::centered(0.3, 0.3),
            genus: None,
            phi: None,
            f: None,
            g: None,
            branch: None,
        };
        assert!(matches!(spec.to_chart(), Err(KernelError::Config(_))));
    }
}

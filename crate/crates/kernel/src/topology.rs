//! Topological constants of the total space and the canonical-bundle degree
//! arithmetic.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TopologyBlock {
    pub genus: u32,
    pub fiber_half_dim: u32,
    pub b1: u32,
    pub h10: u32,
    pub c1_coefficient: i64,
    pub ramification_expected: u32,
    pub ddbar_lemma_fails: bool,
    pub warnings: Vec<String>,
}

/// b1 = 2g + 4, h^{1,0} = g, c1 coefficient (g-1)(2n-2), ramification count
/// 4(g-1); the ddbar-lemma failure flag is b1 > 2 h^{1,0}.
pub fn topology_constants(g: u32, n: u32) -> TopologyBlock {
    let mut warnings = Vec::new();
    if g < 3 {
        warnings.push(format!(
            "genus {g} < 3: minimal immersions in the flat 3-torus require genus >= 3"
        ));
    }
    if n < 1 {
        warnings.push("fiber half-dimension must be at least 1".to_string());
    }
    let b1 = 2 * g + 4;
    let h10 = g;
    TopologyBlock {
        genus: g,
        fiber_half_dim: n,
        b1,
        h10,
        c1_coefficient: (g as i64 - 1) * (2 * n as i64 - 2),
        ramification_expected: 4 * (g.max(1) - 1),
        ddbar_lemma_fails: b1 > 2 * h10,
        warnings,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub genus_y: u32,
    pub deg_h: u32,
    pub n: u32,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Degree condition 2 g(Y) - 2 = 2n deg(h) for the canonical bundle to be the
/// pullback of O(2n).
pub fn canonical_degree_check(genus_y: u32, deg_h: u32, n: u32) -> DegreeCheck {
    let lhs = 2 * genus_y as i64 - 2;
    let rhs = 2 * n as i64 * deg_h as i64;
    let mut warnings = Vec::new();
    if genus_y % 2 == 0 && n == 1 {
        warnings.push(format!(
            "genus {genus_y} is even: such a curve cannot be minimally immersed in the flat 3-torus, \
             the arithmetic passes for the pullback construction only"
        ));
    }
    DegreeCheck { genus_y, deg_h, n, lhs, rhs, pass: lhs == rhs, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_three_block() {
        let t = topology_constants(3, 1);
        assert_eq!(t.b1, 10);
        assert_eq!(t.h10, 3);
        assert_eq!(t.c1_coefficient, 0);
        assert_eq!(t.ramification_expected, 8);
        assert!(t.ddbar_lemma_fails);
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn c1_coefficient_for_higher_fiber_dimension() {
        assert_eq!(topology_constants(4, 2).c1_coefficient, 6);
        for g in 3..10 {
            assert_eq!(topology_constants(g, 1).c1_coefficient, 0);
        }
    }

    #[test]
    fn low_genus_warns_but_does_not_fail() {
        let t = topology_constants(2, 1);
        assert!(!t.warnings.is_empty());
        assert_eq!(t.b1, 8);
    }

    #[test]
    fn degree_checks() {
        assert!(canonical_degree_check(3, 2, 1).pass);
        let even = canonical_degree_check(2, 1, 1);
        assert!(even.pass);
        assert!(!even.warnings.is_empty());
        assert!(!canonical_degree_check(3, 3, 1).pass);
    }
}

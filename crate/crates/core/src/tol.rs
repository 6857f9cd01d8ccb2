//! Tolerance knobs for every rank decision and classification threshold.
//!
//! Exact-arithmetic dichotomies (is this eigenvalue real? is this rank
//! deficient?) become documented thresholds here. Defaults can be overridden
//! through the `QUADSPEC_TOL_OVERRIDES` environment variable, a JSON map
//! from field name to value.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative singular-value threshold for rank / null-space decisions.
    pub rank_rel: f64,
    /// Relative threshold for dissipativity: Re Q is accepted as negative
    /// semidefinite when its largest eigenvalue is below `rank_rel * |Q|`.
    pub dissipative_rel: f64,
    /// Eigenvalue clustering: two eigenvalues belong to one cluster when
    /// closer than `cluster_rel * (1 + |lambda|)`.
    pub cluster_rel: f64,
    /// An eigenvalue counts as real when `|Im| <= real_eig * (1 + |lambda|)`.
    pub real_eig: f64,
    /// `|Re mu| <= boundary` classifies a lattice generator as lying on the
    /// imaginary axis.
    pub boundary: f64,
    /// Galerkin eigenvalue convergence: accepted when the value moves less
    /// than `conv_rel * (1 + |value|)` between truncations.
    pub conv_rel: f64,
    /// Symplectic pairing residual (sigma-Gram against the canonical form).
    pub sympl: f64,
    /// Cross-block residual allowed in the split `q1 (+) i q2`.
    pub cross_block: f64,
    /// Relative agreement required between quadrature point counts N and 2N.
    pub quadrature: f64,
    /// Ellipticity margin below which `q` counts as vanishing on a subspace.
    pub margin: f64,
    /// Angular tolerance (radians) for numerical-range membership.
    pub angle: f64,
    /// Symbol-order evaluation threshold for "this bracket vanishes at X0".
    pub order_eval: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-10,
            dissipative_rel: 1e-10,
            cluster_rel: 1e-8,
            real_eig: 1e-8,
            boundary: 1e-9,
            conv_rel: 1e-6,
            sympl: 1e-10,
            cross_block: 1e-10,
            quadrature: 1e-9,
            margin: 1e-9,
            angle: 5e-2,
            order_eval: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults merged with the `QUADSPEC_TOL_OVERRIDES` JSON map, if set.
    /// Unknown keys and malformed JSON are ignored rather than fatal.
    pub fn from_env() -> Self {
        let mut tol = Tolerances::default();
        if let Ok(raw) = std::env::var("QUADSPEC_TOL_OVERRIDES") {
            if let Ok(map) = serde_json::from_str::<serde_json::Value>(&raw) {
                let mut value = serde_json::to_value(tol).unwrap();
                if let (Some(dst), Some(src)) = (value.as_object_mut(), map.as_object()) {
                    for (k, v) in src {
                        if dst.contains_key(k) && v.is_number() {
                            dst.insert(k.clone(), v.clone());
                        }
                    }
                }
                if let Ok(merged) = serde_json::from_value(value) {
                    tol = merged;
                }
            }
        }
        tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_apply() {
        std::env::set_var("QUADSPEC_TOL_OVERRIDES", r#"{"rank_rel": 1e-8, "bogus": 3}"#);
        let t = Tolerances::from_env();
        std::env::remove_var("QUADSPEC_TOL_OVERRIDES");
        assert_eq!(t.rank_rel, 1e-8);
        assert_eq!(t.cluster_rel, Tolerances::default().cluster_rel);
    }
}

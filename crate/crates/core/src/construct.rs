//! Seeded random builders: symplectic matrices, dissipative forms with
//! known structure, and pre-split round-trip constructions used by the
//! property suites.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::linalg::{self, RMat};
use crate::quadform::{symplectic_form_inverse, symplectic_form_matrix, QuadraticForm};
use crate::singular::SubspaceBasis;
use crate::tol::Tolerances;

fn random_symmetric<R: Rng>(d: usize, rng: &mut R) -> RMat {
    let m: RMat = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
    (&m + &m.t().to_owned()).mapv(|x| x * 0.5)
}

/// Random real symplectic matrix: `exp(J^{-1} A)` for random symmetric `A`,
/// rescaled so the exponent has moderate norm.
pub fn random_symplectic<R: Rng>(n: usize, rng: &mut R) -> Result<RMat> {
    let d = 2 * n;
    let a = random_symmetric(d, rng);
    let h = symplectic_form_inverse(n).dot(&a);
    let scale = h.iter().map(|x| x.abs()).fold(0.0_f64, f64::max).max(1e-12);
    let h = h.mapv(|x| x / scale); // exponent norm of order 1
    linalg::expm_real(&h)
}

/// Inverse of a symplectic matrix via `R^{-1} = J^{-1} R^T J`.
pub fn symplectic_inverse(r: &RMat) -> RMat {
    let n = r.nrows() / 2;
    symplectic_form_inverse(n).dot(&r.t()).dot(&symplectic_form_matrix(n))
}

/// Random dissipative form whose singular space is trivial by construction:
/// `Re Q` negative definite (so already `Ker Re F = {0}`), `Im Q` random.
pub fn random_trivial_singular_form<R: Rng>(n: usize, rng: &mut R) -> Result<QuadraticForm> {
    let d = 2 * n;
    let g: RMat = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
    let re = (g.t().dot(&g) + 0.1 * Array2::<f64>::eye(d)).mapv(|x| -x);
    let im = random_symmetric(d, rng);
    QuadraticForm::from_parts(n, re, im)
}

/// Random definite real form `sign * (G^T G + delta I)`.
pub fn random_definite_form<R: Rng>(n: usize, sign: f64, rng: &mut R) -> Result<QuadraticForm> {
    let d = 2 * n;
    let g: RMat = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
    let m = (g.t().dot(&g) + 0.1 * Array2::<f64>::eye(d)).mapv(|x| x * sign.signum());
    QuadraticForm::from_parts(n, m, Array2::zeros((d, d)))
}

/// Random purely imaginary form (`Re Q = 0`).
pub fn random_imaginary_form<R: Rng>(n: usize, rng: &mut R) -> Result<QuadraticForm> {
    let d = 2 * n;
    QuadraticForm::from_parts(n, Array2::zeros((d, d)), random_symmetric(d, rng))
}

/// A form with known split structure, for round-trip testing:
/// `q = (q1 ⊕ i q2_tilde) ∘ R` with the singular space carried along.
#[derive(Debug, Clone)]
pub struct SplitConstruction {
    pub q: QuadraticForm,
    /// The singular space of `q` implied by the construction.
    pub s_basis: SubspaceBasis,
    pub n_prime: usize,
    pub n_dprime: usize,
    pub q1: QuadraticForm,
    pub q2_tilde: QuadraticForm,
}

/// Embed `q1` (on the primed block) and `i * q2_tilde` (on the double-primed
/// block) into `R^{2n}`, `n = n' + n''`, then pull back by a random
/// symplectic matrix.
pub fn build_split_form<R: Rng>(
    q1: &QuadraticForm,
    q2_tilde: &QuadraticForm,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<SplitConstruction> {
    let np = q1.n();
    let nd = q2_tilde.n();
    let n = np + nd;
    let d = 2 * n;

    // index maps into the global (x, xi) layout
    let prime_idx: Vec<usize> = (0..np).chain(n..n + np).collect();
    let dprime_idx: Vec<usize> = (np..n).chain(n + np..2 * n).collect();

    let mut q: Array2<Complex64> = Array2::from_elem((d, d), Complex64::new(0.0, 0.0));
    for (a, &ga) in prime_idx.iter().enumerate() {
        for (b, &gb) in prime_idx.iter().enumerate() {
            q[[ga, gb]] = q1.matrix()[[a, b]];
        }
    }
    let i = Complex64::new(0.0, 1.0);
    for (a, &ga) in dprime_idx.iter().enumerate() {
        for (b, &gb) in dprime_idx.iter().enumerate() {
            q[[ga, gb]] = i * q2_tilde.matrix()[[a, b]];
        }
    }
    let q_split = QuadraticForm::new(n, q)?;

    let r = random_symplectic(n, rng)?;
    let q_final = q_split.compose(&r)?;

    // singular space of q∘R is R^{-1} applied to the double-primed block
    let rinv = symplectic_inverse(&r);
    let mut s_cols: RMat = Array2::zeros((d, dprime_idx.len()));
    for (c, &g) in dprime_idx.iter().enumerate() {
        let col = rinv.index_axis(Axis(1), g).to_owned();
        s_cols.column_mut(c).assign(&col);
    }
    let s_basis = SubspaceBasis::from_span(n, &s_cols, tol)?;

    Ok(SplitConstruction {
        q: q_final,
        s_basis,
        n_prime: np,
        n_dprime: nd,
        q1: q1.clone(),
        q2_tilde: q2_tilde.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_symplectic_satisfies_defining_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let r = random_symplectic(n, &mut rng).unwrap();
            let j = symplectic_form_matrix(n);
            let res = r.t().dot(&j).dot(&r) - &j;
            let worst = res.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
            assert!(worst < 1e-12, "n = {n}, residual {worst:.3e}");
            // and the closed-form inverse really inverts
            let e = symplectic_inverse(&r).dot(&r) - Array2::<f64>::eye(2 * n);
            assert!(e.iter().map(|x| x.abs()).fold(0.0_f64, f64::max) < 1e-12);
        }
    }

    #[test]
    fn trivial_singular_form_is_dissipative_with_trivial_s() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let q = random_trivial_singular_form(2, &mut rng).unwrap();
            let (ok, _, _) = q.dissipativity(&tol).unwrap();
            assert!(ok);
            let s = crate::singular::compute_singular_space(&q.hamilton_map(), &tol).unwrap();
            assert_eq!(s.d, 0);
        }
    }

    #[test]
    fn build_split_form_singular_space_round_trip() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let q1 = random_trivial_singular_form(1, &mut rng).unwrap();
            let q2t = random_definite_form(1, 1.0, &mut rng).unwrap();
            let built = build_split_form(&q1, &q2t, &mut rng, &tol).unwrap();
            let s = crate::singular::compute_singular_space(&built.q.hamilton_map(), &tol)
                .unwrap();
            assert_eq!(s.d, built.s_basis.d);
            let angle = s.max_principal_angle(&built.s_basis).unwrap();
            assert!(angle < 1e-8, "principal angle {angle:.3e}");
        }
    }
}

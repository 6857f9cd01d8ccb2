//! The symplectic change of coordinates splitting a dissipative form into
//! `q1(x', xi') + i q2(x'', xi'')`, the time-averaged real part, the sum
//! form `r`, and the Williamson normal form of the imaginary block.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::linalg::{self, RMat};
use crate::quadform::{symplectic_form_inverse, symplectic_form_matrix, QuadraticForm};
use crate::singular::{self, SingularSpaceReport};
use crate::tol::Tolerances;

/// The split `q ∘ chi = q1(x', xi') + i q2_tilde(x'', xi'')`, where the
/// double-primed coordinates span the singular space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymplecticSplit {
    /// Real symplectic `2n x 2n` matrix; columns are, in order,
    /// `(e'_1..e'_{n'}, e''_1..e''_{n''}, eps'_1..eps'_{n'}, eps''..)`,
    /// so the primed block occupies coordinate slots `(0..n', n..n+n')`.
    pub chi: RMat,
    pub n_prime: usize,
    pub n_dprime: usize,
    /// Restriction of `q ∘ chi` to the primed block, a form on `R^{2n'}`.
    pub q1: QuadraticForm,
    /// The real form with `q2 = i q2_tilde` on the double-primed block.
    pub q2_tilde: QuadraticForm,
    /// Sign of the definite normal form of `q2_tilde`, when it exists.
    pub epsilon: Option<i8>,
    /// Williamson invariants of `q2_tilde`, ascending, when definite.
    pub lambdas: Option<Vec<f64>>,
    /// Numerical confirmation that the singular space of `q1` is trivial.
    pub q1_singular_trivial: bool,
}

/// Build the symplectic splitting from a singular-space report.
pub fn split(
    q: &QuadraticForm,
    report: &SingularSpaceReport,
    tol: &Tolerances,
) -> Result<SymplecticSplit> {
    if !report.is_symplectic {
        return Err(QuadError::NotSymplectic);
    }
    let n = q.n();
    let d = 2 * n;
    let s = &report.s;
    let s_perp = singular::symplectic_orthogonal(s, tol)?;
    let pairs_prime = singular::symplectic_basis(&s_perp, tol)?;
    let pairs_dprime = singular::symplectic_basis(s, tol)?;
    let np = pairs_prime.len();
    let nd = pairs_dprime.len();
    if np + nd != n {
        return Err(QuadError::Precondition(format!(
            "block sizes {np} + {nd} do not add to n = {n}"
        )));
    }

    let mut chi: RMat = Array2::zeros((d, d));
    for (j, (e, _)) in pairs_prime.iter().enumerate() {
        chi.column_mut(j).assign(e);
    }
    for (j, (e, _)) in pairs_dprime.iter().enumerate() {
        chi.column_mut(np + j).assign(e);
    }
    for (j, (_, eps)) in pairs_prime.iter().enumerate() {
        chi.column_mut(n + j).assign(eps);
    }
    for (j, (_, eps)) in pairs_dprime.iter().enumerate() {
        chi.column_mut(n + np + j).assign(eps);
    }

    // chi must be symplectic
    let jm = symplectic_form_matrix(n);
    let res = chi.t().dot(&jm).dot(&chi) - &jm;
    let worst = res.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    if worst > 1e-9 {
        return Err(QuadError::Precondition(format!(
            "assembled chi is not symplectic (residual {worst:.3e})"
        )));
    }

    let qc = q.compose(&chi)?;
    let qm = qc.matrix();
    let scale = q.matrix().iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1e-300);

    let prime_idx: Vec<usize> = (0..np).chain(n..n + np).collect();
    let dprime_idx: Vec<usize> = (np..n).chain(n + np..2 * n).collect();

    // cross blocks between primed and double-primed coordinates must vanish
    let mut cross = 0.0_f64;
    for &a in &prime_idx {
        for &b in &dprime_idx {
            cross = cross.max(qm[[a, b]].norm());
        }
    }
    if cross > tol.cross_block * scale * 1e2 {
        return Err(QuadError::Precondition(format!(
            "cross-block residual {cross:.3e} exceeds tolerance; the singular \
             space is not stable under the Hamilton flow as required"
        )));
    }

    let extract = |idx: &[usize]| -> Array2<Complex64> {
        Array2::from_shape_fn((idx.len(), idx.len()), |(a, b)| qm[[idx[a], idx[b]]])
    };
    let q1 = QuadraticForm::new(np, extract(&prime_idx))?;
    let q2_block = QuadraticForm::new(nd, extract(&dprime_idx))?;

    // the double-primed block must be purely imaginary
    let re_worst = q2_block.re().iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    if re_worst > tol.cross_block * scale * 1e2 {
        return Err(QuadError::Precondition(format!(
            "real part of the singular-space block is {re_worst:.3e}, not zero"
        )));
    }
    let q2_tilde = QuadraticForm::from_parts(nd, q2_block.im(), Array2::zeros((2 * nd, 2 * nd)))?;

    // q1 must be dissipative
    let (ok, max_eig, thr) = q1.dissipativity(tol)?;
    if !ok {
        return Err(QuadError::NotDissipative { max_eig, tol: thr });
    }

    let q1_singular_trivial = if np == 0 {
        true
    } else {
        singular::compute_singular_space(&q1.hamilton_map(), tol)?.d == 0
    };

    let (epsilon, lambdas) = match normal_form_q2(&q2_tilde, tol) {
        Ok((e, l)) => (Some(e), Some(l)),
        Err(_) => (None, None),
    };

    Ok(SymplecticSplit {
        chi,
        n_prime: np,
        n_dprime: nd,
        q1,
        q2_tilde,
        epsilon,
        lambdas,
        q1_singular_trivial,
    })
}

/// Time average of `Re q1` along the flow of `Im q1`:
/// `(1/2T) ∫_{-T}^{T} Re q1(e^{t H_{Im q1}} X) dt`, with
/// `H_{Im q1} = 2 Im F1`. Gauss-Legendre quadrature with `npts` points,
/// cross-checked against `2 npts`.
pub fn averaged_real_part(
    q1: &QuadraticForm,
    t_avg: f64,
    npts: usize,
    tol: &Tolerances,
) -> Result<QuadraticForm> {
    if t_avg <= 0.0 {
        return Err(QuadError::Precondition("T must be positive".into()));
    }
    let n = q1.n();
    let d = 2 * n;
    if d == 0 {
        return QuadraticForm::new(0, Array2::from_elem((0, 0), Complex64::new(0.0, 0.0)));
    }
    let re_q = q1.re();
    let h = q1.hamilton_map().im().mapv(|x| 2.0 * x);

    let integrate = |m_pts: usize| -> Result<RMat> {
        let (nodes, weights) = linalg::gauss_legendre(m_pts);
        let mut acc: RMat = Array2::zeros((d, d));
        for (x, w) in nodes.iter().zip(&weights) {
            let t = t_avg * x;
            let flow = linalg::expm_real(&h.mapv(|v| v * t))?;
            let term = flow.t().dot(&re_q).dot(&flow);
            acc = acc + term.mapv(|v| v * w * t_avg);
        }
        Ok(acc.mapv(|v| v / (2.0 * t_avg)))
    };

    let a1 = integrate(npts)?;
    let a2 = integrate(2 * npts)?;
    let diff = (&a1 - &a2).iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    let scale = a2.iter().map(|x| x.abs()).fold(0.0_f64, f64::max).max(1e-300);
    if diff > tol.quadrature * scale.max(1.0) {
        return Err(QuadError::QuadratureNonConvergence { n: npts, n2: 2 * npts, diff });
    }
    QuadraticForm::from_parts(n, a2, Array2::zeros((d, d)))
}

/// The finite sum `r(X) = sum_{j=0}^{2n-1} Re q1((Im F1)^j X)`, i.e. the
/// matrix `sum_j ((Im F1)^j)^T (Re Q1) (Im F1)^j`.
pub fn r_form(q1: &QuadraticForm) -> Result<QuadraticForm> {
    let n = q1.n();
    let d = 2 * n;
    let re_q = q1.re();
    let im_f = q1.hamilton_map().im();
    let mut acc: RMat = Array2::zeros((d, d));
    let mut power: RMat = Array2::eye(d);
    for _ in 0..d {
        acc = acc + power.t().dot(&re_q).dot(&power);
        power = im_f.dot(&power);
    }
    QuadraticForm::from_parts(n, acc, Array2::zeros((d, d)))
}

/// Williamson normal form of a definite real form:
/// `q2_tilde ~ epsilon * sum_j lambda_j (x_j^2 + xi_j^2)` with
/// `lambda_j > 0` ascending. The invariants are the positive imaginary
/// parts of the (purely imaginary, paired) eigenvalues of `J^{-1} Q2~`.
pub fn normal_form_q2(q2_tilde: &QuadraticForm, tol: &Tolerances) -> Result<(i8, Vec<f64>)> {
    let n = q2_tilde.n();
    if n == 0 {
        return Ok((1, vec![]));
    }
    let m = q2_tilde.re();
    let im_worst = q2_tilde.im().iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    let scale = m.iter().map(|x| x.abs()).fold(0.0_f64, f64::max).max(1e-300);
    if im_worst > 1e-12 * scale {
        return Err(QuadError::Precondition("q2_tilde must be real".into()));
    }
    let eigs = linalg::eigvals_sym(&m)?;
    let epsilon = if eigs.iter().all(|&e| e > tol.margin * scale) {
        1_i8
    } else if eigs.iter().all(|&e| e < -tol.margin * scale) {
        -1_i8
    } else {
        return Err(QuadError::IndefiniteRestriction(format!(
            "eigenvalue range [{:.3e}, {:.3e}]",
            eigs.first().unwrap(),
            eigs.last().unwrap()
        )));
    };
    let f2 = symplectic_form_inverse(n).dot(&m);
    let mut lambdas: Vec<f64> = linalg::eigvals_real(&f2)?
        .into_iter()
        .filter(|ev| ev.im > 0.0)
        .map(|ev| ev.im)
        .collect();
    if lambdas.len() != n {
        return Err(QuadError::Precondition(format!(
            "expected {n} positive Williamson invariants, found {}",
            lambdas.len()
        )));
    }
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((epsilon, lambdas))
}

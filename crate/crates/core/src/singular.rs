//! The singular space `S`, its symplectic structure, partial ellipticity of
//! the form on `S`, symplectic bases, and the block decomposition of `S`
//! along the real eigenvalues of the Hamilton map.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::linalg::{self, RMat, RVec};
use crate::quadform::{symplectic_form_matrix, HamiltonMap, QuadraticForm};
use crate::tol::Tolerances;

/// Orthonormal basis of a subspace of `R^{2n}`, stored as the columns of a
/// `2n x d` matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub n: usize,
    pub d: usize,
    pub vectors: RMat,
}

impl SubspaceBasis {
    /// Wrap a matrix whose columns are already orthonormal.
    pub fn new(n: usize, vectors: RMat) -> Result<Self> {
        let d = vectors.ncols();
        if vectors.nrows() != 2 * n {
            return Err(QuadError::DimensionMismatch { expected: 2 * n, got: vectors.nrows() });
        }
        if d > 2 * n {
            return Err(QuadError::Precondition(format!("d = {d} exceeds 2n = {}", 2 * n)));
        }
        let gram = vectors.t().dot(&vectors);
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[[i, j]] - expect).abs() > 1e-12 {
                    return Err(QuadError::Precondition(
                        "basis columns are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(SubspaceBasis { n, d, vectors })
    }

    /// Orthonormalize the column span of an arbitrary spanning set.
    pub fn from_span(n: usize, span: &RMat, tol: &Tolerances) -> Result<Self> {
        let basis = linalg::range_basis(span, tol.rank_rel)?;
        SubspaceBasis::new(n, basis)
    }

    pub fn trivial(n: usize) -> Self {
        SubspaceBasis { n, d: 0, vectors: Array2::zeros((2 * n, 0)) }
    }

    pub fn full(n: usize) -> Self {
        SubspaceBasis { n, d: 2 * n, vectors: Array2::eye(2 * n) }
    }

    /// Largest principal angle to another subspace (0 for two empty bases).
    pub fn max_principal_angle(&self, other: &SubspaceBasis) -> Result<f64> {
        if self.d != other.d {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        let angles = linalg::principal_angles(&self.vectors, &other.vectors)?;
        Ok(angles.into_iter().fold(0.0_f64, f64::max))
    }

    /// Orthogonal projection of a vector onto the subspace.
    pub fn project(&self, v: &RVec) -> RVec {
        self.vectors.dot(&self.vectors.t().dot(v))
    }

    /// Distance from span membership, relative to `|v|`.
    pub fn containment_residual(&self, v: &RVec) -> f64 {
        let norm = v.dot(v).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let p = self.project(v);
        let diff = v - &p;
        diff.dot(&diff).sqrt() / norm
    }
}

/// `S = (intersection over j = 0..2n-1 of Ker[Re F . (Im F)^j]) ∩ R^{2n}`,
/// computed as the SVD null space of the `2n` stacked real matrices.
pub fn compute_singular_space(f: &HamiltonMap, tol: &Tolerances) -> Result<SubspaceBasis> {
    let n = f.n();
    let d = 2 * n;
    let re = f.re();
    let im = f.im();
    let mut stacked: RMat = Array2::zeros((d * d, d));
    let mut power: RMat = Array2::eye(d);
    for j in 0..d {
        let block = re.dot(&power);
        stacked.slice_mut(s![j * d..(j + 1) * d, ..]).assign(&block);
        power = im.dot(&power);
    }
    // normalize row scale so the relative rank threshold is meaningful
    let scale = stacked.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    if scale > 0.0 {
        stacked.mapv_inplace(|x| x / scale);
    }
    let ns = linalg::null_space(&stacked, tol.rank_rel)?;
    SubspaceBasis::new(n, ns)
}

/// `S_0 = Ker F ∩ R^{2n}` (diagnostic only): real null space of the stacked
/// real and imaginary parts of `F`.
pub fn compute_s_zero(f: &HamiltonMap, tol: &Tolerances) -> Result<SubspaceBasis> {
    let n = f.n();
    let d = 2 * n;
    let mut stacked: RMat = Array2::zeros((2 * d, d));
    stacked.slice_mut(s![..d, ..]).assign(&f.re());
    stacked.slice_mut(s![d.., ..]).assign(&f.im());
    let scale = stacked.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    if scale > 0.0 {
        stacked.mapv_inplace(|x| x / scale);
    }
    let ns = linalg::null_space(&stacked, tol.rank_rel)?;
    SubspaceBasis::new(n, ns)
}

/// Symplectic orthogonal complement `B^{sigma-perp} = { X : sigma(X, b) = 0
/// for all columns b }`.
pub fn symplectic_orthogonal(b: &SubspaceBasis, tol: &Tolerances) -> Result<SubspaceBasis> {
    let n = b.n;
    if b.d == 0 {
        return Ok(SubspaceBasis::full(n));
    }
    let j = symplectic_form_matrix(n);
    // rows (J b_i)^T: sigma(X, b_i) = X^T J b_i
    let a = j.dot(&b.vectors).t().to_owned();
    let ns = linalg::null_space(&a, tol.rank_rel)?;
    SubspaceBasis::new(n, ns)
}

/// Whether the restriction of sigma to the subspace is nondegenerate.
/// The zero subspace is trivially symplectic.
pub fn is_symplectic(b: &SubspaceBasis, tol: &Tolerances) -> Result<bool> {
    if b.d == 0 {
        return Ok(true);
    }
    if b.d % 2 == 1 {
        return Ok(false);
    }
    let j = symplectic_form_matrix(b.n);
    let gram = b.vectors.t().dot(&j).dot(&b.vectors);
    let (_, sing, _) = ndarray_linalg::SVD::svd(&gram, false, false)?;
    let smax = sing.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sing.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(smax > 0.0 && smin > tol.rank_rel * smax)
}

/// Partial ellipticity of `q` on the span of `B`: does `q(X) = 0` with
/// `X` in the span force `X = 0`?
///
/// Returns `(verdict, margin)` where the margin is the minimum of `|q(u)|`
/// over unit vectors of the span (`None` encodes +infinity for the zero
/// subspace). The minimum is estimated by dense direction sampling plus
/// projected-gradient refinement; a half-plane sweep of definite combinations
/// `cos(t) Re + sin(t) Im` supplies a certified lower bound when one exists.
pub fn check_partial_ellipticity(
    q: &QuadraticForm,
    b: &SubspaceBasis,
    tol: &Tolerances,
) -> Result<(bool, Option<f64>)> {
    if b.d == 0 {
        return Ok((true, None));
    }
    let d = b.d;
    let bc = linalg::to_complex(&b.vectors);
    let qr = bc.t().dot(q.matrix()).dot(&bc); // restricted d x d form
    let re = linalg::real_part(&qr);
    let im = linalg::imag_part(&qr);
    let re = (&re + &re.t().to_owned()).mapv(|x| x * 0.5);
    let im = (&im + &im.t().to_owned()).mapv(|x| x * 0.5);
    let scale = qr.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return Ok((false, Some(0.0)));
    }

    let qval = |u: &RVec| -> Complex64 {
        Complex64::new(u.dot(&re.dot(u)), u.dot(&im.dot(u)))
    };

    // certified lower bound: |q(u)| >= u^T (cos t Re + sin t Im) u >= lambda_min
    let mut lower = f64::NEG_INFINITY;
    let sweeps = 720;
    for k in 0..sweeps {
        let t = 2.0 * std::f64::consts::PI * k as f64 / sweeps as f64;
        let a = re.mapv(|x| x * t.cos()) + im.mapv(|x| x * t.sin());
        let eigs = linalg::eigvals_sym(&a)?;
        lower = lower.max(eigs[0]);
    }

    // upper bound: sampled minimum of |q(u)| with projected-gradient descent
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x511c);
    let mut best = f64::INFINITY;
    let mut starts: Vec<RVec> = Vec::new();
    for i in 0..d {
        let mut e: RVec = Array1::zeros(d);
        e[i] = 1.0;
        starts.push(e);
    }
    // eigenvector-informed starts: extremes of the definite sweep
    for m in [&re, &im] {
        if let Ok((_, vecs)) = linalg::eigh_sym(m) {
            starts.push(vecs.column(0).to_owned());
            starts.push(vecs.column(d - 1).to_owned());
        }
    }
    for _ in 0..(10 * d * d) {
        let v: RVec = Array1::from_iter(
            (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)),
        );
        let nrm = v.dot(&v).sqrt();
        if nrm > 1e-8 {
            starts.push(v / nrm);
        }
    }
    for start in starts {
        let mut u = start;
        let mut fval = qval(&u).norm_sqr();
        for _ in 0..200 {
            let z = qval(&u);
            // grad |q|^2 = 4 (Re z * Re_mat u + Im z * Im_mat u)
            let g = re.dot(&u).mapv(|x| 4.0 * z.re * x) + im.dot(&u).mapv(|x| 4.0 * z.im * x);
            let tangent = &g - &u.mapv(|x| x * g.dot(&u));
            let gn = tangent.dot(&tangent).sqrt();
            if gn < 1e-14 * scale * scale {
                break;
            }
            // scan the whole step ladder and keep the best candidate: taking
            // the first improving step oscillates across the minimum
            let mut step = 1.0 / scale.max(1e-300);
            let mut best_cand: Option<(RVec, f64)> = None;
            for _ in 0..50 {
                let cand = &u - &tangent.mapv(|x| x * step);
                let cn = cand.dot(&cand).sqrt();
                if cn > 1e-12 {
                    let cand = cand.mapv(|x| x / cn);
                    let cf = qval(&cand).norm_sqr();
                    if best_cand.as_ref().map_or(true, |(_, bf)| cf < *bf) {
                        best_cand = Some((cand, cf));
                    }
                }
                step *= 0.5;
            }
            match best_cand {
                Some((cand, cf)) if cf < fval => {
                    u = cand;
                    fval = cf;
                }
                _ => break,
            }
        }
        best = best.min(fval.sqrt());
    }
    let margin = best.max(lower.max(0.0));
    Ok((margin > tol.margin * scale, Some(margin)))
}

/// Symplectic basis `(e_k, eps_k)` of a symplectic subspace by generalized
/// symplectic Gram-Schmidt: pick the pair of working vectors with the
/// largest sigma-pairing, normalize it to a canonical pair, project the
/// pair out of the rest, repeat.
pub fn symplectic_basis(b: &SubspaceBasis, tol: &Tolerances) -> Result<Vec<(RVec, RVec)>> {
    let n = b.n;
    let j = symplectic_form_matrix(n);
    let sigma = |x: &RVec, y: &RVec| x.dot(&j.dot(y));

    let mut work: Vec<RVec> = (0..b.d).map(|i| b.vectors.column(i).to_owned()).collect();
    let mut pairs = Vec::new();
    while !work.is_empty() {
        if work.len() == 1 {
            return Err(QuadError::NotSymplectic);
        }
        let mut best = (0usize, 1usize, 0.0f64);
        for i in 0..work.len() {
            for k in (i + 1)..work.len() {
                let s = sigma(&work[i], &work[k]).abs();
                if s > best.2 {
                    best = (i, k, s);
                }
            }
        }
        let (i, k, smax) = best;
        if smax < tol.rank_rel.max(1e-12) {
            return Err(QuadError::NotSymplectic);
        }
        let e = work[i].clone();
        let s = sigma(&work[k], &e); // want sigma(eps, e) = 1
        let eps = work[k].mapv(|x| x / s);
        // remove the pair, project it out of the remainder
        let mut rest: Vec<RVec> = Vec::new();
        for (idx, w) in work.iter().enumerate() {
            if idx == i || idx == k {
                continue;
            }
            let w2 = w + &e.mapv(|x| x * sigma(w, &eps)) - &eps.mapv(|x| x * sigma(w, &e));
            rest.push(w2);
        }
        // re-orthonormalize the remainder to keep the pivot search stable
        if !rest.is_empty() {
            let mut m: RMat = Array2::zeros((2 * n, rest.len()));
            for (c, w) in rest.iter().enumerate() {
                m.column_mut(c).assign(w);
            }
            let basis = linalg::range_basis(&m, tol.rank_rel)?;
            if basis.ncols() != rest.len() {
                return Err(QuadError::NotSymplectic);
            }
            rest = (0..basis.ncols()).map(|c| basis.column(c).to_owned()).collect();
        }
        work = rest;
        pairs.push((e, eps));
    }
    // verify the canonical pairing
    for (a, (e1, eps1)) in pairs.iter().enumerate() {
        for (b2, (e2, eps2)) in pairs.iter().enumerate() {
            let delta = if a == b2 { 1.0 } else { 0.0 };
            let checks = [
                (sigma(eps1, e2), delta),
                (sigma(e1, e2), 0.0),
                (sigma(eps1, eps2), 0.0),
            ];
            for (got, want) in checks {
                if (got - want).abs() > 1e-9 {
                    return Err(QuadError::Precondition(format!(
                        "symplectic Gram-Schmidt pairing residual {:.3e}",
                        (got - want).abs()
                    )));
                }
            }
        }
    }
    Ok(pairs)
}

/// Everything the analysis needs to know about the singular space of one
/// form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularSpaceReport {
    pub s: SubspaceBasis,
    pub is_symplectic: bool,
    pub is_partially_elliptic: bool,
    /// `min |q(u)|` over unit vectors of S; `None` encodes +infinity (d = 0).
    pub ellipticity_margin: Option<f64>,
    /// The positive reals `lambda_1 < ... < lambda_r` with
    /// `sigma(F|_S) ∩ R = {±lambda_j}` (empty unless partially elliptic).
    pub real_eigenvalues_of_f: Vec<f64>,
    /// Bases of the blocks `S_{lambda_j}`.
    pub blocks: Vec<SubspaceBasis>,
    /// Dimension of the diagnostic space `S_0 = Ker F ∩ R^{2n}`.
    pub s_zero_dim: usize,
}

/// Decompose `S` into the symplectically orthogonal blocks `S_{lambda_j}`.
///
/// On `S` the Hamilton map acts as `i * (Im F)|_S` (the real part kills S),
/// so its real eigenvalues ±lambda correspond to purely imaginary
/// eigenvalue pairs ±i*lambda of the real matrix `M = (Im F)|_S`, and
/// `S_lambda = Ker(F - lambda) ⊕ Ker(F + lambda) ∩ R^{2n}` is the real null
/// space of `M² + lambda² I` inside S.
pub fn real_eigen_blocks(
    q: &QuadraticForm,
    s: &SubspaceBasis,
    tol: &Tolerances,
) -> Result<(Vec<f64>, Vec<SubspaceBasis>)> {
    let n = s.n;
    if s.d == 0 {
        return Ok((vec![], vec![]));
    }
    let f = q.hamilton_map();
    let im = f.im();
    let b = &s.vectors;
    let m = b.t().dot(&im).dot(b); // matrix of (Im F)|_S in the basis of S

    let eigs = linalg::eigvals_real(&m)?;
    let mscale = m.iter().map(|x| x.abs()).fold(0.0_f64, f64::max).max(1e-300);
    let mut lambdas: Vec<f64> = Vec::new();
    for ev in &eigs {
        let mag = ev.norm();
        if ev.re.abs() <= tol.real_eig * (1.0 + mag) {
            // purely imaginary eigenvalue of M => real eigenvalue of F|_S
            if ev.im.abs() <= tol.real_eig * mscale {
                return Err(QuadError::ZeroRealEigenvalue);
            }
            if ev.im > 0.0 {
                lambdas.push(ev.im);
            }
        } else {
            return Err(QuadError::Precondition(format!(
                "eigenvalue {ev} of (Im F)|_S is neither purely imaginary nor \
                 classifiable; partial ellipticity assumption is suspect"
            )));
        }
    }
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // cluster coincident lambdas
    let mut reps: Vec<f64> = Vec::new();
    for l in lambdas {
        match reps.last() {
            Some(&prev) if (l - prev).abs() <= tol.cluster_rel * (1.0 + l) => {}
            _ => reps.push(l),
        }
    }

    let j = symplectic_form_matrix(n);
    let mut blocks = Vec::new();
    let mut total = 0;
    for &l in &reps {
        let a = m.dot(&m) + l * l * Array2::<f64>::eye(s.d);
        let a = a.mapv(|x| x / (mscale * mscale + l * l));
        // the matrix can be pure rounding noise (e.g. M^2 = -l^2 I exactly),
        // so anchor the rank threshold at the natural scale 1
        let ns = linalg::null_space_scaled(&a, tol.rank_rel, 1.0)?;
        let block_vectors = b.dot(&ns);
        let block = SubspaceBasis::from_span(n, &block_vectors, tol)?;
        total += block.d;
        blocks.push(block);
    }
    if total != s.d {
        return Err(QuadError::Precondition(format!(
            "blocks sum to dimension {total}, singular space has dimension {}",
            s.d
        )));
    }
    // pairwise sigma-orthogonality across blocks
    for a in 0..blocks.len() {
        for c in (a + 1)..blocks.len() {
            let g = blocks[a].vectors.t().dot(&j).dot(&blocks[c].vectors);
            let worst = g.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
            if worst > 1e-9 {
                return Err(QuadError::Precondition(format!(
                    "blocks {a} and {c} are not sigma-orthogonal (residual {worst:.3e})"
                )));
            }
        }
    }
    Ok((reps, blocks))
}

/// Full singular-space analysis of one form.
pub fn analyze(q: &QuadraticForm, tol: &Tolerances) -> Result<SingularSpaceReport> {
    let f = q.hamilton_map();
    let s = compute_singular_space(&f, tol)?;
    let s_zero = compute_s_zero(&f, tol)?;
    let symplectic = is_symplectic(&s, tol)?;
    let (elliptic, margin) = check_partial_ellipticity(q, &s, tol)?;
    if elliptic && !symplectic {
        // ellipticity on S forces a symplectic structure; reaching this
        // state means a tolerance is badly tuned
        return Err(QuadError::Precondition(
            "partial ellipticity verified but S classified as non-symplectic".into(),
        ));
    }
    let (real_eigs, blocks) = if elliptic && symplectic {
        real_eigen_blocks(q, &s, tol)?
    } else {
        (vec![], vec![])
    };
    Ok(SingularSpaceReport {
        s,
        is_symplectic: symplectic,
        is_partially_elliptic: elliptic,
        ellipticity_margin: margin,
        real_eigenvalues_of_f: real_eigs,
        blocks,
        s_zero_dim: s_zero.d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z0() -> Complex64 {
        c(0.0, 0.0)
    }

    fn kfp(a: f64) -> QuadraticForm {
        let z = z0();
        let q = array![
            [z, z, z, c(0.0, a / 2.0)],
            [z, c(-0.25, 0.0), c(0.0, -0.5), z],
            [z, c(0.0, -0.5), z, z],
            [c(0.0, a / 2.0), z, z, c(-1.0, 0.0)],
        ];
        QuadraticForm::new(2, q).unwrap()
    }

    fn neg_x_squared() -> QuadraticForm {
        QuadraticForm::new(1, array![[c(-1.0, 0.0), z0()], [z0(), z0()]]).unwrap()
    }

    fn i_harmonic() -> QuadraticForm {
        QuadraticForm::new(1, array![[c(0.0, 1.0), z0()], [z0(), c(0.0, 1.0)]]).unwrap()
    }

    #[test]
    fn kfp_singular_space_is_trivial() {
        let tol = Tolerances::default();
        let s = compute_singular_space(&kfp(1.0).hamilton_map(), &tol).unwrap();
        assert_eq!(s.d, 0);
    }

    #[test]
    fn neg_x_squared_singular_space_is_xi_axis() {
        let tol = Tolerances::default();
        let s = compute_singular_space(&neg_x_squared().hamilton_map(), &tol).unwrap();
        assert_eq!(s.d, 1);
        assert!(s.vectors[[0, 0]].abs() < 1e-12);
        assert!((s.vectors[[1, 0]].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purely_imaginary_singular_space_is_everything() {
        let tol = Tolerances::default();
        let s = compute_singular_space(&i_harmonic().hamilton_map(), &tol).unwrap();
        assert_eq!(s.d, 2);
    }

    #[test]
    fn singular_space_invariance_properties() {
        // (Re F) S = 0 and (Im F) S ⊆ S, columnwise
        let tol = Tolerances::default();
        for q in [kfp(0.7), neg_x_squared(), i_harmonic()] {
            let f = q.hamilton_map();
            let s = compute_singular_space(&f, &tol).unwrap();
            let re = f.re();
            let im = f.im();
            for col in 0..s.d {
                let v = s.vectors.column(col).to_owned();
                let rv = re.dot(&v);
                assert!(rv.dot(&rv).sqrt() < 1e-10, "(Re F) v != 0");
                let iv = im.dot(&v);
                assert!(s.containment_residual(&iv) < 1e-10, "(Im F) v outside S");
            }
        }
    }

    #[test]
    fn symplecticity_examples() {
        let tol = Tolerances::default();
        // trivial space
        assert!(is_symplectic(&SubspaceBasis::trivial(2), &tol).unwrap());
        // full space
        assert!(is_symplectic(&SubspaceBasis::full(2), &tol).unwrap());
        // xi-axis in R^2: sigma restricted to a line is zero
        let line = SubspaceBasis::new(1, array![[0.0], [1.0]]).unwrap();
        assert!(!is_symplectic(&line, &tol).unwrap());
    }

    #[test]
    fn partial_ellipticity_examples() {
        let tol = Tolerances::default();
        // q = -x^2 on the xi-axis: q vanishes identically
        let line = SubspaceBasis::new(1, array![[0.0], [1.0]]).unwrap();
        let (ok, margin) = check_partial_ellipticity(&neg_x_squared(), &line, &tol).unwrap();
        assert!(!ok);
        assert!(margin.unwrap() < 1e-12);

        // q = i(x^2+xi^2) on R^2: |q| = 1 on the unit circle
        let full = SubspaceBasis::full(1);
        let (ok, margin) = check_partial_ellipticity(&i_harmonic(), &full, &tol).unwrap();
        assert!(ok);
        assert!((margin.unwrap() - 1.0).abs() < 1e-9);

        // trivial space: vacuously elliptic with infinite margin
        let (ok, margin) =
            check_partial_ellipticity(&kfp(1.0), &SubspaceBasis::trivial(2), &tol).unwrap();
        assert!(ok);
        assert!(margin.is_none());
    }

    #[test]
    fn partial_ellipticity_detects_indefinite_zero() {
        // q = x^2 - xi^2 vanishes on the diagonal of R^2
        let tol = Tolerances::default();
        let q = QuadraticForm::new(1, array![[c(1.0, 0.0), z0()], [z0(), c(-1.0, 0.0)]]).unwrap();
        let (ok, margin) = check_partial_ellipticity(&q, &SubspaceBasis::full(1), &tol).unwrap();
        assert!(!ok, "margin = {margin:?}");
        assert!(margin.unwrap() < 1e-10);
    }

    #[test]
    fn symplectic_basis_canonical_plane() {
        let tol = Tolerances::default();
        let pairs = symplectic_basis(&SubspaceBasis::full(1), &tol).unwrap();
        assert_eq!(pairs.len(), 1);
        let j = symplectic_form_matrix(1);
        let (e, eps) = &pairs[0];
        assert!((eps.dot(&j.dot(e)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symplectic_basis_empty() {
        let tol = Tolerances::default();
        assert!(symplectic_basis(&SubspaceBasis::trivial(3), &tol).unwrap().is_empty());
    }

    #[test]
    fn symplectic_basis_random_subspace() {
        // random 4-dim symplectic subspace of R^8: sigma-Gram of the output
        // must be the canonical pairing
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let j = symplectic_form_matrix(n);
        for _ in 0..20 {
            let m: RMat = Array2::from_shape_fn((2 * n, 4), |_| rng.gen_range(-1.0..1.0));
            let b = SubspaceBasis::from_span(n, &m, &tol).unwrap();
            if b.d != 4 || !is_symplectic(&b, &tol).unwrap() {
                continue;
            }
            let pairs = symplectic_basis(&b, &tol).unwrap();
            assert_eq!(pairs.len(), 2);
            for (a, (e1, eps1)) in pairs.iter().enumerate() {
                for (bb, (e2, eps2)) in pairs.iter().enumerate() {
                    let delta = if a == bb { 1.0 } else { 0.0 };
                    assert!((eps1.dot(&j.dot(e2)) - delta).abs() < 1e-9);
                    assert!(e1.dot(&j.dot(e2)).abs() < 1e-9);
                    assert!(eps1.dot(&j.dot(eps2)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn symplectic_basis_refuses_degenerate_input() {
        let tol = Tolerances::default();
        let line = SubspaceBasis::new(1, array![[0.0], [1.0]]).unwrap();
        assert!(symplectic_basis(&line, &tol).is_err());
    }

    #[test]
    fn real_eigen_blocks_imaginary_harmonic() {
        // q = i(x^2+xi^2): F = -iJ has eigenvalues ±1; one block = R^2
        let tol = Tolerances::default();
        let q = i_harmonic();
        let s = compute_singular_space(&q.hamilton_map(), &tol).unwrap();
        let (lambdas, blocks) = real_eigen_blocks(&q, &s, &tol).unwrap();
        assert_eq!(lambdas.len(), 1);
        assert!((lambdas[0] - 1.0).abs() < 1e-12);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].d, 2);
    }

    #[test]
    fn real_eigen_blocks_two_frequencies() {
        // q = i(x1^2+xi1^2) + 2i(x2^2+xi2^2) on R^4: lambdas {1, 2}
        let tol = Tolerances::default();
        let mut m = Array2::from_elem((4, 4), z0());
        m[[0, 0]] = c(0.0, 1.0);
        m[[2, 2]] = c(0.0, 1.0);
        m[[1, 1]] = c(0.0, 2.0);
        m[[3, 3]] = c(0.0, 2.0);
        let q = QuadraticForm::new(2, m).unwrap();
        let s = compute_singular_space(&q.hamilton_map(), &tol).unwrap();
        assert_eq!(s.d, 4);
        let (lambdas, blocks) = real_eigen_blocks(&q, &s, &tol).unwrap();
        assert_eq!(lambdas.len(), 2);
        assert!((lambdas[0] - 1.0).abs() < 1e-10);
        assert!((lambdas[1] - 2.0).abs() < 1e-10);
        assert!(blocks.iter().all(|b| b.d == 2));
        // block for lambda=1 is the (x1, xi1) plane
        let e1 = array![1.0, 0.0, 0.0, 0.0];
        assert!(blocks[0].containment_residual(&e1) < 1e-10);
    }

    #[test]
    fn real_eigen_blocks_empty_for_kfp() {
        let tol = Tolerances::default();
        let q = kfp(1.0);
        let s = compute_singular_space(&q.hamilton_map(), &tol).unwrap();
        let (lambdas, blocks) = real_eigen_blocks(&q, &s, &tol).unwrap();
        assert!(lambdas.is_empty());
        assert!(blocks.is_empty());
    }

    #[test]
    fn analyze_reports() {
        let tol = Tolerances::default();

        let r = analyze(&kfp(1.0), &tol).unwrap();
        assert_eq!(r.s.d, 0);
        assert!(r.is_symplectic && r.is_partially_elliptic);
        assert!(r.ellipticity_margin.is_none());
        assert_eq!(r.s_zero_dim, 0);

        let r = analyze(&neg_x_squared(), &tol).unwrap();
        assert_eq!(r.s.d, 1);
        assert!(!r.is_symplectic);
        assert!(!r.is_partially_elliptic);

        let r = analyze(&i_harmonic(), &tol).unwrap();
        assert_eq!(r.s.d, 2);
        assert!(r.is_symplectic && r.is_partially_elliptic);
        assert_eq!(r.real_eigenvalues_of_f.len(), 1);
        assert!((r.real_eigenvalues_of_f[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symplectic_orthogonal_complement() {
        let tol = Tolerances::default();
        // sigma-perp of the trivial space is everything, and vice versa
        let full = symplectic_orthogonal(&SubspaceBasis::trivial(2), &tol).unwrap();
        assert_eq!(full.d, 4);
        let nothing = symplectic_orthogonal(&SubspaceBasis::full(2), &tol).unwrap();
        assert_eq!(nothing.d, 0);
        // sigma-perp of the (x1, xi1) plane in R^4 is the (x2, xi2) plane
        let plane = SubspaceBasis::new(
            2,
            array![[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
        )
        .unwrap();
        let perp = symplectic_orthogonal(&plane, &tol).unwrap();
        assert_eq!(perp.d, 2);
        let e2 = array![0.0, 1.0, 0.0, 0.0];
        let xi2 = array![0.0, 0.0, 0.0, 1.0];
        assert!(perp.containment_residual(&e2) < 1e-12);
        assert!(perp.containment_residual(&xi2) < 1e-12);
    }

    #[test]
    fn report_serializes() {
        let tol = Tolerances::default();
        let r = analyze(&i_harmonic(), &tol).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: SingularSpaceReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.s.d, r.s.d);
        assert_eq!(back.real_eigenvalues_of_f, r.real_eigenvalues_of_f);
    }
}

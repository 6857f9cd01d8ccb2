//! Hermite-Galerkin discretization: the exact matrix of the Weyl
//! quantization in the truncated Hermite basis, convergence-filtered
//! eigenvalues, semigroup norm curves, decay-rate fits, and the smoothing
//! diagnostic with quadratic-power weights.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomposition::SymplecticSplit;
use crate::error::{QuadError, Result};
use crate::linalg::{self, CMat};
use crate::quadform::QuadraticForm;
use crate::tol::Tolerances;

/// Desk-scale cap on the dense matrix dimension.
const MAX_DENSE_DIM: usize = 6000;

/// All Hermite multi-indices with `|gamma| <= deg`, graded lexicographic:
/// ascending total degree, and within a degree the first coordinate
/// descends first.
pub fn basis_indices(n: usize, deg: usize) -> Vec<Vec<u32>> {
    fn fill(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            fill(slots - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for t in 0..=(deg as u32) {
        fill(n, t, &mut Vec::new(), &mut out);
    }
    out
}

/// Indexed Hermite basis with precomputed ladder moves.
struct Basis {
    indices: Vec<Vec<u32>>,
    /// `raise[j][i]`: index of `gamma + e_j`, or `usize::MAX` past the cap.
    raise: Vec<Vec<usize>>,
    /// `lower[j][i]`: index of `gamma - e_j` (`usize::MAX` when `gamma_j = 0`).
    lower: Vec<Vec<usize>>,
}

impl Basis {
    fn new(n: usize, deg: usize) -> Self {
        let indices = basis_indices(n, deg);
        let lookup: HashMap<&[u32], usize> =
            indices.iter().enumerate().map(|(i, g)| (g.as_slice(), i)).collect();
        let mut raise = vec![vec![usize::MAX; indices.len()]; n];
        let mut lower = vec![vec![usize::MAX; indices.len()]; n];
        let mut buf: Vec<u32> = vec![0; n];
        for (i, g) in indices.iter().enumerate() {
            for j in 0..n {
                buf.copy_from_slice(g);
                buf[j] += 1;
                if let Some(&k) = lookup.get(buf.as_slice()) {
                    raise[j][i] = k;
                }
                if g[j] > 0 {
                    buf.copy_from_slice(g);
                    buf[j] -= 1;
                    lower[j][i] = lookup[buf.as_slice()];
                }
            }
        }
        Basis { indices, raise, lower }
    }

    fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// One first-order factor of a symbol monomial: a coordinate `x_j` or a
/// momentum `xi_j` (quantized as `D_j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    X(usize),
    D(usize),
}

/// A symbol polynomial as monomials `coeff * product(factors)`.
pub type Monomial = (Complex64, Vec<Factor>);

fn apply_factor(state: &[(usize, Complex64)], f: Factor, basis: &Basis) -> Vec<(usize, Complex64)> {
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(2 * state.len());
    match f {
        // x_j = (a_j + a_j^dag)/sqrt(2)
        Factor::X(j) => {
            for &(idx, v) in state {
                let g = basis.indices[idx][j] as f64;
                let up = basis.raise[j][idx];
                if up != usize::MAX {
                    out.push((up, v * ((g + 1.0) / 2.0).sqrt()));
                }
                let dn = basis.lower[j][idx];
                if dn != usize::MAX {
                    out.push((dn, v * (g / 2.0).sqrt()));
                }
            }
        }
        // D_j = (a_j - a_j^dag)/(i sqrt(2))
        Factor::D(j) => {
            for &(idx, v) in state {
                let g = basis.indices[idx][j] as f64;
                let up = basis.raise[j][idx];
                if up != usize::MAX {
                    out.push((up, v * i_unit * ((g + 1.0) / 2.0).sqrt()));
                }
                let dn = basis.lower[j][idx];
                if dn != usize::MAX {
                    out.push((dn, v * (-i_unit) * (g / 2.0).sqrt()));
                }
            }
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..k).permutations(k).collect()
}

/// The matrix of the Weyl quantization of a polynomial symbol on the basis
/// `|gamma| <= trunc`. The quantization of a product of linear factors is
/// the average of the operator products over all factor orderings; ladder
/// algebra is applied exactly on a basis enlarged by the symbol degree, so
/// the returned compression is exact.
pub fn weyl_polynomial_matrix(
    n: usize,
    monomials: &[Monomial],
    trunc: usize,
) -> Result<CMat> {
    let pad = monomials.iter().map(|(_, f)| f.len()).max().unwrap_or(0);
    let small = Basis::new(n, trunc);
    let dim = small.dim();
    if dim > MAX_DENSE_DIM {
        return Err(QuadError::DeskScale(format!(
            "basis dimension {dim} exceeds the dense cap {MAX_DENSE_DIM}"
        )));
    }
    let big = Basis::new(n, trunc + pad);
    // graded ordering makes the first `dim` indices of the enlarged basis
    // coincide with the truncated basis
    debug_assert_eq!(big.indices[..dim], small.indices[..]);

    let perms_by_len: Vec<Vec<Vec<usize>>> = (0..=pad).map(permutations).collect();
    let mut m: CMat = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for col in 0..dim {
        let mut acc: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); dim];
        for (coeff, factors) in monomials {
            let k = factors.len();
            let perms = &perms_by_len[k];
            let weight = *coeff / perms.len() as f64;
            for perm in perms {
                let mut state = vec![(col, Complex64::new(1.0, 0.0))];
                // operator product acts right to left
                for &pi in perm.iter().rev() {
                    state = apply_factor(&state, factors[pi], &big);
                }
                for (idx, v) in state {
                    if idx < dim {
                        acc[idx] += weight * v;
                    }
                }
            }
        }
        for row in 0..dim {
            m[[row, col]] = acc[row];
        }
    }
    Ok(m)
}

/// Symbol monomials of a quadratic form: `q(X) = sum Q_ab X_a X_b`.
pub fn form_monomials(q: &QuadraticForm) -> Vec<Monomial> {
    let n = q.n();
    let d = q.dim();
    let fac = |a: usize| if a < n { Factor::X(a) } else { Factor::D(a - n) };
    let mut out = Vec::new();
    for a in 0..d {
        for b in a..d {
            let coeff = if a == b { q.matrix()[[a, a]] } else { q.matrix()[[a, b]] * 2.0 };
            if coeff.norm() > 0.0 {
                out.push((coeff, vec![fac(a), fac(b)]));
            }
        }
    }
    out
}

/// The Galerkin compression of `q(x, xi)^w` onto Hermite degrees `<= trunc`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GalerkinOperator {
    pub n: usize,
    pub trunc: usize,
    pub dim: usize,
    pub m: CMat,
}

impl GalerkinOperator {
    /// Largest eigenvalue of `(M + M*)/2` relative to `|M|` — must be
    /// essentially nonpositive for dissipative symbols.
    pub fn dissipativity_residual(&self) -> Result<f64> {
        let herm = (&self.m + &conj_transpose(&self.m)).mapv(|z| z * 0.5);
        let re = linalg::real_part(&herm);
        // the symmetrized part of a compression of a dissipative operator
        // is real symmetric up to rounding
        let eigs = linalg::eigvals_sym(&re)?;
        let norm = self.m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1e-300);
        Ok(eigs.last().copied().unwrap_or(0.0) / norm)
    }

    /// Largest entry violating the quadratic band structure
    /// (`||gamma| - |gamma'|| <= 2` and `|gamma - gamma'|_inf <= 2`).
    pub fn band_violation(&self) -> f64 {
        let indices = basis_indices(self.n, self.trunc);
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let gr = &indices[r];
                let gc = &indices[c];
                let dr: i64 = gr.iter().map(|&x| x as i64).sum::<i64>()
                    - gc.iter().map(|&x| x as i64).sum::<i64>();
                let dinf = gr
                    .iter()
                    .zip(gc)
                    .map(|(&a, &b)| (a as i64 - b as i64).abs())
                    .max()
                    .unwrap_or(0);
                if dr.abs() > 2 || dinf > 2 {
                    worst = worst.max(self.m[[r, c]].norm());
                }
            }
        }
        worst
    }
}

fn conj_transpose(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Exact band matrix of `q(x, xi)^w` on Hermite degrees `<= trunc`.
pub fn weyl_matrix(q: &QuadraticForm, trunc: usize) -> Result<GalerkinOperator> {
    if trunc < 2 {
        return Err(QuadError::Precondition("truncation degree must be >= 2".into()));
    }
    let m = weyl_polynomial_matrix(q.n(), &form_monomials(q), trunc)?;
    Ok(GalerkinOperator { n: q.n(), trunc, dim: m.nrows(), m })
}

/// Eigenvalues accepted by the cross-truncation convergence filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergedEigenvalues {
    pub values: Vec<Complex64>,
    /// Movement of each accepted value between the two truncations.
    pub movements: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Eigenvalues of the `trunc` and `trunc + dn` compressions, paired by
/// nearest neighbor; the `k` of largest real part that moved less than the
/// convergence tolerance are returned.
pub fn numerical_spectrum(
    q: &QuadraticForm,
    trunc: usize,
    dn: usize,
    k: usize,
    tol: &Tolerances,
) -> Result<ConvergedEigenvalues> {
    let m1 = weyl_matrix(q, trunc)?;
    let m2 = weyl_matrix(q, trunc + dn)?;
    let mut e1 = linalg::eigvals(&m1.m)?;
    let e2 = linalg::eigvals(&m2.m)?;
    e1.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());

    let mut values = Vec::new();
    let mut movements = Vec::new();
    let mut warnings = Vec::new();
    for v in e1 {
        if values.len() == k {
            break;
        }
        let nearest = e2
            .iter()
            .map(|w| (v - w).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest < tol.conv_rel * (1.0 + v.norm()) {
            values.push(v);
            movements.push(nearest);
        }
    }
    if values.len() < k {
        warnings.push(format!(
            "only {} of the requested {k} eigenvalues converged between \
             truncations {trunc} and {}",
            values.len(),
            trunc + dn
        ));
    }
    Ok(ConvergedEigenvalues { values, movements, warnings })
}

/// `(t, ||exp(t M)||_2)` samples of the semigroup norm.
pub fn semigroup_norm_curve(
    q: &QuadraticForm,
    trunc: usize,
    times: &[f64],
    tol: &Tolerances,
) -> Result<Vec<(f64, f64)>> {
    if times.iter().any(|&t| t < 0.0) {
        return Err(QuadError::Precondition("times must be nonnegative".into()));
    }
    let g = weyl_matrix(q, trunc)?;
    let mnorm = linalg::op_norm_2(&g.m)?;
    let tmax = times.iter().cloned().fold(0.0_f64, f64::max);
    if tmax * mnorm > 1e4 {
        return Err(QuadError::ExpOverflow(tmax * mnorm));
    }
    let diss = g.dissipativity_residual()?;
    if diss > 1e-8 {
        return Err(QuadError::Precondition(format!(
            "compression is not dissipative (residual {diss:.3e})"
        )));
    }

    // uniform grids step with a single exponential; general lists fall back
    // to one exponential per sample
    let uniform_step = uniform_spacing(times);
    let mut out = Vec::with_capacity(times.len());
    if let Some(h) = uniform_step {
        let step = linalg::expm(&g.m.mapv(|z| z * h))?;
        let mut current: CMat = Array2::eye(g.dim);
        let mut steps_done = 0usize;
        for &t in times {
            let want = (t / h).round() as usize;
            while steps_done < want {
                current = step.dot(&current);
                steps_done += 1;
            }
            out.push((t, linalg::op_norm_2(&current)?));
        }
    } else {
        for &t in times {
            let e = linalg::expm(&g.m.mapv(|z| z * t))?;
            out.push((t, linalg::op_norm_2(&e)?));
        }
    }
    for (t, norm) in &out {
        if *norm > 1.0 + 1e-9 {
            return Err(QuadError::Precondition(format!(
                "contraction violated: norm {norm} at t = {t}"
            )));
        }
    }
    let _ = tol;
    Ok(out)
}

/// `Some(h)` when every time is a near-integer multiple of a common
/// positive spacing `h`.
fn uniform_spacing(times: &[f64]) -> Option<f64> {
    let mut sorted: Vec<f64> = times.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut h = f64::INFINITY;
    for w in sorted.windows(2) {
        let gap = w[1] - w[0];
        if gap > 1e-12 {
            h = h.min(gap);
        }
    }
    if sorted.first().map_or(false, |&t0| t0 > 1e-12) {
        h = h.min(sorted[0]);
    }
    if !h.is_finite() || h <= 0.0 {
        return None;
    }
    let ok = times.iter().all(|&t| {
        let k = (t / h).round();
        (t - k * h).abs() < 1e-9 * (1.0 + t)
    });
    // cap the number of squarings a pathological spacing could cause
    let steps = (sorted.last().unwrap() / h).round();
    if ok && steps < 5000.0 {
        Some(h)
    } else {
        None
    }
}

/// Fitted decay rate: minus the least-squares slope of `log norm` over the
/// window `[t_lo, t_hi]`.
pub fn decay_fit(curve: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(t, nrm)| *t >= t_lo - 1e-12 && *t <= t_hi + 1e-12 && *nrm > 0.0)
        .map(|&(t, nrm)| (t, nrm.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(QuadError::WindowTooShort(pts.len()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

/// Monomials of the weight symbol `(1 + |x'|^2 + |xi'|^2)^p` expressed in
/// the original coordinates through the split's `chi`.
pub fn weight_monomials(split: &SymplecticSplit, n: usize, p: usize) -> Result<Vec<Monomial>> {
    if !(1..=2).contains(&p) {
        return Err(QuadError::Precondition(
            "weight power p must be 1 or 2 (higher powers are out of scope)".into(),
        ));
    }
    let d = 2 * n;
    let np = split.n_prime;
    // chi is symplectic: chi^{-1} = J^{-1} chi^T J
    let chi_inv = crate::construct::symplectic_inverse(&split.chi);
    // |x'|^2 + |xi'|^2 = |E' chi^{-1} X|^2 = X^T C X
    let mut e_rows: Array2<f64> = Array2::zeros((2 * np, d));
    for j in 0..np {
        e_rows.row_mut(j).assign(&chi_inv.row(j));
        e_rows.row_mut(np + j).assign(&chi_inv.row(n + j));
    }
    let c_mat = e_rows.t().dot(&e_rows);

    let fac = |a: usize| if a < n { Factor::X(a) } else { Factor::D(a - n) };
    // quadratic monomial list with symmetric coefficients
    let mut quad: Vec<(f64, Vec<Factor>)> = Vec::new();
    for a in 0..d {
        for b in a..d {
            let coeff = if a == b { c_mat[[a, a]] } else { 2.0 * c_mat[[a, b]] };
            if coeff.abs() > 0.0 {
                quad.push((coeff, vec![fac(a), fac(b)]));
            }
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let mut out: Vec<Monomial> = vec![(one, vec![])];
    match p {
        1 => {
            for (c, f) in &quad {
                out.push((one * *c, f.clone()));
            }
        }
        2 => {
            // (1 + g)^2 = 1 + 2 g + g^2
            for (c, f) in &quad {
                out.push((one * 2.0 * *c, f.clone()));
            }
            for (c1, f1) in &quad {
                for (c2, f2) in &quad {
                    let mut f: Vec<Factor> = f1.clone();
                    f.extend_from_slice(f2);
                    out.push((one * *c1 * *c2, f));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// One row of the smoothing table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingEntry {
    pub vector: String,
    pub value_low: f64,
    pub value_high: f64,
    pub rel_change: f64,
}

/// Smoothing diagnostic table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub p: usize,
    pub t: f64,
    pub trunc_low: usize,
    pub trunc_high: usize,
    pub entries: Vec<SmoothingEntry>,
}

/// Measures `||W_p exp(t M) u||` for the ground state and a seeded random
/// unit vector, at truncations `trunc` and `trunc + dn`. A finite `t > 0`
/// should stabilize between truncations; `t = 0` should not.
pub fn smoothing_diagnostic(
    q: &QuadraticForm,
    split: &SymplecticSplit,
    trunc: usize,
    dn: usize,
    t: f64,
    p: usize,
    seed: u64,
) -> Result<SmoothingReport> {
    if t < 0.0 {
        return Err(QuadError::Precondition("t must be nonnegative".into()));
    }
    let n = q.n();
    let weights = weight_monomials(split, n, p)?;

    let measure = |nn: usize, which: &str| -> Result<f64> {
        let g = weyl_matrix(q, nn)?;
        let w = weyl_polynomial_matrix(n, &weights, nn)?;
        let dim = g.dim;
        let mut u = Array1::from_elem(dim, Complex64::new(0.0, 0.0));
        match which {
            "ground" => u[0] = Complex64::new(1.0, 0.0),
            _ => {
                // prefix-consistent seeded draw (the truncated basis is a
                // prefix of the enlarged one) with coefficients scaled by
                // (1 + degree)^{-s}. The exponent puts the probe in L^2 while
                // leaving the weighted norm divergent at t = 0: with ~d^{n-1}
                // modes of degree d and weight growth d^p, the weighted tail
                // behaves like sum d^{n-1+2p-2s} = sum d^{-0.8}
                use rand::prelude::*;
                use rand_chacha::ChaCha8Rng;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let s = p as f64 + n as f64 / 2.0 - 0.1;
                let degrees = basis_indices(n, nn);
                for (z, gamma) in u.iter_mut().zip(&degrees) {
                    let deg: u32 = gamma.iter().sum();
                    let scale = (1.0 + deg as f64).powf(-s);
                    *z = Complex64::new(
                        scale * rng.sample::<f64, _>(rand_distr::StandardNormal),
                        scale * rng.sample::<f64, _>(rand_distr::StandardNormal),
                    );
                }
            }
        }
        let evolved = linalg::expm_multiply(&g.m.mapv(|z| z * t), &u)?;
        let weighted = w.dot(&evolved);
        Ok(weighted.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    };

    let mut entries = Vec::new();
    for which in ["ground", "random"] {
        let lo = measure(trunc, which)?;
        let hi = measure(trunc + dn, which)?;
        let rel = (hi - lo).abs() / lo.abs().max(1e-300);
        entries.push(SmoothingEntry {
            vector: which.to_string(),
            value_low: lo,
            value_high: hi,
            rel_change: rel,
        });
    }
    Ok(SmoothingReport { p, t, trunc_low: trunc, trunc_high: trunc + dn, entries })
}

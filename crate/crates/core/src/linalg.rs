//! Shared dense linear-algebra helpers: SVD-based subspace extraction,
//! matrix exponentials, Gauss-Legendre quadrature.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eig, OperationNorm, Solve, SVD};
use num_complex::Complex64;

use crate::error::{QuadError, Result};

pub type RMat = Array2<f64>;
pub type RVec = Array1<f64>;
pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub fn to_complex(a: &RMat) -> CMat {
    a.mapv(|x| Complex64::new(x, 0.0))
}

pub fn real_part(a: &CMat) -> RMat {
    a.mapv(|z| z.re)
}

pub fn imag_part(a: &CMat) -> RMat {
    a.mapv(|z| z.im)
}

/// Orthonormal basis (columns) of the null space of a real matrix.
///
/// Rank decision: singular values below `rank_rel * sigma_max` are zero.
/// A zero (or empty) matrix yields the full identity basis.
pub fn null_space(a: &RMat, rank_rel: f64) -> Result<RMat> {
    null_space_scaled(a, rank_rel, 0.0)
}

/// Like [`null_space`], but the rank threshold is `rank_rel * max(sigma_max,
/// scale_floor)`. Pass a floor reflecting the natural scale of the problem
/// when the matrix itself may be numerically zero (pure rounding noise).
pub fn null_space_scaled(a: &RMat, rank_rel: f64, scale_floor: f64) -> Result<RMat> {
    let (rows, cols) = a.dim();
    if rows == 0 || cols == 0 {
        return Ok(Array2::eye(cols));
    }
    let (_, sing, vt) = a.svd(false, true)?;
    let vt = vt.expect("requested V^T");
    let smax = sing.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return Ok(Array2::eye(cols));
    }
    let thresh = rank_rel * smax.max(scale_floor);
    let rank = sing.iter().filter(|&&sv| sv > thresh).count();
    // kernel basis = trailing rows of V^T, transposed
    Ok(vt.slice(s![rank.., ..]).t().to_owned())
}

/// Orthonormal basis of the column span of a real matrix.
pub fn range_basis(a: &RMat, rank_rel: f64) -> Result<RMat> {
    let (rows, cols) = a.dim();
    if rows == 0 || cols == 0 {
        return Ok(Array2::zeros((rows, 0)));
    }
    let (u, sing, _) = a.svd(true, false)?;
    let u = u.expect("requested U");
    let smax = sing.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return Ok(Array2::zeros((rows, 0)));
    }
    let rank = sing.iter().filter(|&&sv| sv > rank_rel * smax).count();
    Ok(u.slice(s![.., ..rank]).to_owned())
}

/// Principal angles between the column spans of two orthonormal bases.
///
/// Small angles come from the sine-based formula (singular values of the
/// projection residual `B - A A^T B`), which keeps full precision near 0
/// where the cosine-based `acos` formula bottoms out around 1e-8; large
/// angles come from the cosine formula.
pub fn principal_angles(a: &RMat, b: &RMat) -> Result<Vec<f64>> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return Ok(vec![]);
    }
    let m = a.t().dot(b);
    let (_, cosines, _) = m.svd(false, false)?;
    let resid = b - &a.dot(&m);
    let (_, sines, _) = resid.svd(false, false)?;
    let mut sines: Vec<f64> = sines.to_vec();
    sines.sort_by(|x, y| x.partial_cmp(y).unwrap()); // ascending: pairs with descending cosines
    Ok(cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| {
            if c * c > 0.5 {
                s.min(1.0).asin()
            } else {
                c.min(1.0).max(-1.0).acos()
            }
        })
        .collect())
}

/// Largest singular value (operator 2-norm).
pub fn op_norm_2(a: &CMat) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let (_, sing, _) = a.svd(false, false)?;
    Ok(sing.iter().cloned().fold(0.0_f64, f64::max))
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(a: &CMat) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(vec![]);
    }
    let (ev, _) = a.eig()?;
    Ok(ev.to_vec())
}

/// Eigenvalues of a general real matrix (complex output).
pub fn eigvals_real(a: &RMat) -> Result<Vec<Complex64>> {
    eigvals(&to_complex(a))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvals_sym(a: &RMat) -> Result<Vec<f64>> {
    use ndarray_linalg::{Eigh, UPLO};
    if a.nrows() == 0 {
        return Ok(vec![]);
    }
    let (ev, _) = a.eigh(UPLO::Lower)?;
    let mut v = ev.to_vec();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(v)
}

/// Eigen-decomposition of a real symmetric matrix: (ascending values, vectors as columns).
pub fn eigh_sym(a: &RMat) -> Result<(Vec<f64>, RMat)> {
    use ndarray_linalg::{Eigh, UPLO};
    let (ev, vecs) = a.eigh(UPLO::Lower)?;
    let mut order: Vec<usize> = (0..ev.len()).collect();
    order.sort_by(|&i, &j| ev[i].partial_cmp(&ev[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| ev[i]).collect();
    let mut sorted = Array2::zeros(vecs.dim());
    for (k, &i) in order.iter().enumerate() {
        sorted.column_mut(k).assign(&vecs.column(i));
    }
    Ok((vals, sorted))
}

// Pade order-13 scaling-and-squaring coefficients (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential of a complex matrix by Pade(13) scaling and squaring.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QuadError::NotSquare { rows: n, cols: a.ncols() });
    }
    if n == 0 {
        return Ok(a.clone());
    }
    let norm1 = a.opnorm_one()?;
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scale = Complex64::new(0.5_f64.powi(s), 0.0);
    let b = a.mapv(|z| z * scale);

    let b2 = b.dot(&b);
    let b4 = b2.dot(&b2);
    let b6 = b2.dot(&b4);
    let eye: CMat = Array2::eye(n);
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let u_inner = b6.mapv(|z| z * c(13)) + b4.mapv(|z| z * c(11)) + b2.mapv(|z| z * c(9));
    let u_outer = b6.mapv(|z| z * c(7))
        + b4.mapv(|z| z * c(5))
        + b2.mapv(|z| z * c(3))
        + eye.mapv(|z| z * c(1));
    let u = b.dot(&(b6.dot(&u_inner) + u_outer));

    let v_inner = b6.mapv(|z| z * c(12)) + b4.mapv(|z| z * c(10)) + b2.mapv(|z| z * c(8));
    let v = b6.dot(&v_inner)
        + b6.mapv(|z| z * c(6))
        + b4.mapv(|z| z * c(4))
        + b2.mapv(|z| z * c(2))
        + eye.mapv(|z| z * c(0));

    // (V - U) X = (V + U)
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut x = Array2::zeros((n, n));
    for j in 0..n {
        let col = lhs.solve(&rhs.column(j).to_owned())?;
        x.column_mut(j).assign(&col);
    }
    for _ in 0..s {
        x = x.dot(&x);
    }
    Ok(x)
}

/// Matrix exponential of a real matrix.
pub fn expm_real(a: &RMat) -> Result<RMat> {
    Ok(real_part(&expm(&to_complex(a))?))
}

/// Action `exp(A) v` without forming `exp(A)`, by scaled truncated Taylor
/// series. Independent of [`expm`]; the two are cross-checked in tests.
pub fn expm_multiply(a: &CMat, v: &CVec) -> Result<CVec> {
    let n = a.nrows();
    if n != v.len() {
        return Err(QuadError::DimensionMismatch { expected: n, got: v.len() });
    }
    if n == 0 {
        return Ok(v.clone());
    }
    let norm1 = a.opnorm_one()?;
    let steps = norm1.ceil().max(1.0) as usize;
    let scale = Complex64::new(1.0 / steps as f64, 0.0);
    let b = a.mapv(|z| z * scale);
    let mut w = v.clone();
    for _ in 0..steps {
        let mut acc = w.clone();
        let mut term = w.clone();
        for k in 1..=120 {
            term = b.dot(&term).mapv(|z| z / k as f64);
            acc = acc + &term;
            let tn = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let an = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if tn <= 1e-17 * an.max(1e-300) {
                break;
            }
        }
        w = acc;
    }
    Ok(w)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    let n = npts;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

//! Complex quadratic forms on phase space and their Hamilton maps.
//!
//! Coordinate ordering is fixed once for the whole crate: a phase-space
//! vector is `(x_1..x_n, xi_1..xi_n)`, and the symplectic form is
//! `sigma((x,xi),(y,eta)) = xi.y - x.eta`, realized by the matrix
//! `J = [[0, -I], [I, 0]]`. Every module downstream relies on this layout.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::linalg::{self, CMat, CVec, RMat};
use crate::tol::Tolerances;

/// Matrix of the canonical symplectic form in the `(x, xi)` ordering.
pub fn symplectic_form_matrix(n: usize) -> RMat {
    let mut j = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        j[[i, n + i]] = -1.0;
        j[[n + i, i]] = 1.0;
    }
    j
}

/// Inverse of the symplectic matrix, `J^{-1} = -J`.
pub fn symplectic_form_inverse(n: usize) -> RMat {
    symplectic_form_matrix(n).mapv(|x| -x)
}

/// A complex-valued quadratic form `q(X) = X^T Q X` on `R^{2n}`, stored as a
/// symmetric `2n x 2n` matrix.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    n: usize,
    q: CMat,
}

impl QuadraticForm {
    /// Build a form from a (possibly asymmetric) matrix; only the symmetric
    /// part of the input matters and is kept.
    pub fn new(n: usize, q: CMat) -> Result<Self> {
        let d = 2 * n;
        if q.nrows() != d || q.ncols() != d {
            return Err(QuadError::DimensionMismatch { expected: d, got: q.nrows() });
        }
        let sym = (&q + &q.t().to_owned()).mapv(|z| z * 0.5);
        Ok(QuadraticForm { n, q: sym })
    }

    /// Build from real and imaginary parts.
    pub fn from_parts(n: usize, re: RMat, im: RMat) -> Result<Self> {
        let q = ndarray::Zip::from(&re)
            .and(&im)
            .map_collect(|&r, &i| Complex64::new(r, i));
        QuadraticForm::new(n, q)
    }

    /// Build a form that is checked to be dissipative (`Re q <= 0`).
    pub fn new_dissipative(n: usize, q: CMat, tol: &Tolerances) -> Result<Self> {
        let f = QuadraticForm::new(n, q)?;
        let (ok, max_eig, thresh) = f.dissipativity(tol)?;
        if !ok {
            return Err(QuadError::NotDissipative { max_eig, tol: thresh });
        }
        Ok(f)
    }

    /// Checks `Re Q <= 0` up to the eigenvalue tolerance. Returns
    /// `(verdict, largest eigenvalue of Re Q, threshold used)`.
    pub fn dissipativity(&self, tol: &Tolerances) -> Result<(bool, f64, f64)> {
        if self.n == 0 {
            return Ok((true, 0.0, 0.0));
        }
        let re = self.re();
        let eigs = linalg::eigvals_sym(&re)?;
        let max_eig = *eigs.last().unwrap();
        let scale = self.q.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1e-300);
        let thresh = tol.dissipative_rel * scale;
        Ok((max_eig <= thresh, max_eig, thresh))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.q
    }

    pub fn re(&self) -> RMat {
        linalg::real_part(&self.q)
    }

    pub fn im(&self) -> RMat {
        linalg::imag_part(&self.q)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.q.iter().all(|z| z.norm() <= tol)
    }

    /// `q(X) = X^T Q X` for a complex argument.
    pub fn eval(&self, x: &CVec) -> Result<Complex64> {
        if x.len() != self.dim() {
            return Err(QuadError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(x.dot(&self.q.dot(x)))
    }

    /// `q(X)` for a real argument.
    pub fn eval_real(&self, x: &Array1<f64>) -> Result<Complex64> {
        let xc: CVec = x.mapv(|v| Complex64::new(v, 0.0));
        self.eval(&xc)
    }

    /// Polarized form `q(X; Y) = X^T Q Y`.
    pub fn polarized(&self, x: &CVec, y: &CVec) -> Result<Complex64> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(QuadError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(x.dot(&self.q.dot(y)))
    }

    /// The Hamilton map `F = J^{-1} Q`, the unique sigma-skew-symmetric map
    /// with `q(X; Y) = sigma(X, F Y)`.
    pub fn hamilton_map(&self) -> HamiltonMap {
        let jinv = linalg::to_complex(&symplectic_form_inverse(self.n));
        HamiltonMap { n: self.n, f: jinv.dot(&self.q) }
    }

    /// Pull back by a linear change of coordinates: `(q o chi)(X) = q(chi X)`,
    /// with matrix `chi^T Q chi`.
    pub fn compose(&self, chi: &RMat) -> Result<QuadraticForm> {
        if chi.nrows() != self.dim() {
            return Err(QuadError::DimensionMismatch { expected: self.dim(), got: chi.nrows() });
        }
        let c = linalg::to_complex(chi);
        QuadraticForm::new(self.n, c.t().dot(&self.q).dot(&c))
    }
}

impl Serialize for QuadraticForm {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        QuadraticFormJson::from_form(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QuadraticForm {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let json = QuadraticFormJson::deserialize(de)?;
        json.to_form().map_err(serde::de::Error::custom)
    }
}

/// The Hamilton map of a quadratic form.
#[derive(Debug, Clone)]
pub struct HamiltonMap {
    n: usize,
    f: CMat,
}

impl HamiltonMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.f
    }

    /// Hamilton map of `Re q`.
    pub fn re(&self) -> RMat {
        linalg::real_part(&self.f)
    }

    /// Hamilton map of `Im q`.
    pub fn im(&self) -> RMat {
        linalg::imag_part(&self.f)
    }

    /// Residual of the sigma-skew-symmetry identity `(J F)^T = J F`,
    /// relative to `|F|`.
    pub fn skew_residual(&self) -> f64 {
        let j = linalg::to_complex(&symplectic_form_matrix(self.n));
        let jf = j.dot(&self.f);
        let diff = &jf - &jf.t().to_owned();
        let num = diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let den = jf.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Poisson bracket of two quadratic forms,
/// `{q1, q2} = dq1/dxi . dq2/dx - dq1/dx . dq2/dxi`, again quadratic.
///
/// Matrix form: symmetric part of `4 Q1 J Q2`.
pub fn poisson_bracket(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<QuadraticForm> {
    if q1.n() != q2.n() {
        return Err(QuadError::DimensionMismatch { expected: q1.dim(), got: q2.dim() });
    }
    let j = linalg::to_complex(&symplectic_form_matrix(q1.n()));
    let m = q1.matrix().dot(&j).dot(q2.matrix());
    let sym = (&m + &m.t().to_owned()).mapv(|z| z * 2.0);
    QuadraticForm::new(q1.n(), sym)
}

/// The numerical range `Sigma(q)` of a quadratic form, represented as the
/// cone of attained directions: a quadratic form takes the value `t^2 q(u)`
/// along the ray through a unit vector `u`, so `Sigma(q)` is a union of rays
/// through the origin. We sample the unit sphere, collect argument angles
/// and merge them into arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NumericalRangeCone {
    /// Closed arcs `[start, end]` of attained directions, in radians within
    /// `[0, 2pi)`; an arc may wrap around.
    pub arcs: Vec<(f64, f64)>,
    /// Angular tolerance used by membership queries.
    pub angle_tol: f64,
}

impl NumericalRangeCone {
    /// Whether `z` lies in the cone (0 always does).
    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm() == 0.0 {
            return true;
        }
        let ang = normalize_angle(z.arg());
        self.arcs.iter().any(|&(a, b)| {
            let width = normalize_angle(b - a);
            let offset = normalize_angle(ang - a);
            offset <= width + self.angle_tol || offset >= 2.0 * std::f64::consts::PI - self.angle_tol
        })
    }
}

fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    r
}

/// Sample-based construction of the numerical range cone.
///
/// Uses the standard basis vectors, pair combinations, and seeded random
/// sphere points; `samples` must be at least `2n`.
pub fn numerical_range_cone(
    q: &QuadraticForm,
    samples: usize,
    tol: &Tolerances,
) -> Result<NumericalRangeCone> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let d = q.dim();
    if samples < d {
        return Err(QuadError::Precondition(format!(
            "samples = {samples} < 2n = {d}"
        )));
    }
    let scale = q.matrix().iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        // q == 0: the range is {0}
        return Ok(NumericalRangeCone { arcs: vec![], angle_tol: tol.angle });
    }

    let mut points: Vec<Array1<f64>> = Vec::new();
    for i in 0..d {
        let mut e = Array1::zeros(d);
        e[i] = 1.0;
        points.push(e);
    }
    for i in 0..d {
        for k in (i + 1)..d {
            for (si, sk) in [(1.0, 1.0), (1.0, -1.0)] {
                let mut e: Array1<f64> = Array1::zeros(d);
                e[i] = si / std::f64::consts::SQRT_2;
                e[k] = sk / std::f64::consts::SQRT_2;
                points.push(e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ad5bec);
    while points.len() < samples.max(2048) {
        let v: Array1<f64> = Array1::from_iter(
            (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)),
        );
        let norm = v.dot(&v).sqrt();
        if norm > 1e-8 {
            points.push(v / norm);
        }
    }

    let mut angles: Vec<f64> = Vec::new();
    for p in &points {
        let val = q.eval_real(p)?;
        if val.norm() > 1e-12 * scale {
            angles.push(normalize_angle(val.arg()));
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    if angles.is_empty() {
        return Ok(NumericalRangeCone { arcs: vec![], angle_tol: tol.angle });
    }

    // merge sorted angles into arcs; gaps below the merge threshold are
    // treated as sampling artifacts
    let merge_gap = 0.35_f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    let (mut start, mut prev) = (angles[0], angles[0]);
    for &a in &angles[1..] {
        if a - prev > merge_gap {
            arcs.push((start, prev));
            start = a;
        }
        prev = a;
    }
    arcs.push((start, prev));
    // wrap-around merge between the last and first arc
    if arcs.len() > 1 {
        let first = arcs[0];
        let last = *arcs.last().unwrap();
        if (first.0 + two_pi) - last.1 <= merge_gap {
            arcs[0] = (last.0, first.1);
            arcs.pop();
        }
    }
    Ok(NumericalRangeCone { arcs, angle_tol: tol.angle })
}

/// Result of a symbol-order query at a characteristic point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolOrder {
    Finite(usize),
    /// All iterated brackets up to word length `j_max + 1` vanish.
    InfiniteUpTo(usize),
}

/// Order of the symbol `q - z` at a point `X0` with `q(X0) = z`: the largest
/// `j` such that every iterated Poisson bracket `p_I`, for words `I` over
/// `{1, 2}` (1 = real part, 2 = imaginary part) with `1 <= |I| <= j`,
/// vanishes at `X0`.
///
/// Brackets of quadratics are quadratic and constants drop out after one
/// bracket, so only the length-1 words see the constant `-z`.
pub fn symbol_order(
    q: &QuadraticForm,
    z: Complex64,
    x0: &Array1<f64>,
    j_max: usize,
    tol: &Tolerances,
) -> Result<SymbolOrder> {
    let val = q.eval_real(x0)?;
    let scale = q.matrix().iter().map(|w| w.norm()).fold(0.0_f64, f64::max);
    let x0n2 = x0.dot(x0);
    let eval_scale = (1.0 + scale * x0n2).max(1.0);
    if (val - z).norm() > tol.order_eval * eval_scale * 1e3 {
        return Err(QuadError::Precondition(format!(
            "q(X0) = {val} differs from z = {z}; the order at z is not probed at X0"
        )));
    }

    let p1 = QuadraticForm::new(q.n(), linalg::to_complex(&q.re()))?;
    let p2 = QuadraticForm::new(q.n(), linalg::to_complex(&q.im()))?;
    let parts = [&p1, &p2];
    let consts = [-z.re, -z.im];

    let vanish = |v: f64| v.abs() <= tol.order_eval * eval_scale;

    // length-1 words: affine evaluation (constant included)
    for i in 0..2 {
        let v = parts[i].eval_real(x0)?.re + consts[i];
        if !vanish(v) {
            return Ok(SymbolOrder::Finite(0));
        }
    }

    // longer words: iterated brackets of the quadratic parts only
    for len in 2..=(j_max + 1) {
        let mut any_nonzero = false;
        for word in 0..(1_usize << len) {
            // bit k of `word` selects p1/p2 for position k (right to left)
            let mut g = parts[word & 1].clone();
            for k in 1..len {
                let idx = (word >> k) & 1;
                g = poisson_bracket(parts[idx], &g)?;
            }
            let v = g.eval_real(x0)?.re;
            if !vanish(v) {
                any_nonzero = true;
                break;
            }
        }
        if any_nonzero {
            return Ok(SymbolOrder::Finite(len - 1));
        }
    }
    Ok(SymbolOrder::InfiniteUpTo(j_max))
}

/// JSON wire format for a quadratic form:
/// `{ "n": int, "Q_re": [[f64; 2n]; 2n], "Q_im": [[f64; 2n]; 2n] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticFormJson {
    pub n: usize,
    #[serde(rename = "Q_re")]
    pub q_re: Vec<Vec<f64>>,
    #[serde(rename = "Q_im")]
    pub q_im: Vec<Vec<f64>>,
}

impl QuadraticFormJson {
    pub fn to_form(&self) -> Result<QuadraticForm> {
        let d = 2 * self.n;
        let check = |m: &Vec<Vec<f64>>| -> Result<RMat> {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(QuadError::DimensionMismatch { expected: d, got: m.len() });
            }
            let flat: Vec<f64> = m.iter().flatten().cloned().collect();
            Ok(Array2::from_shape_vec((d, d), flat).unwrap())
        };
        QuadraticForm::from_parts(self.n, check(&self.q_re)?, check(&self.q_im)?)
    }

    pub fn from_form(q: &QuadraticForm) -> Self {
        let d = q.dim();
        let re = q.re();
        let im = q.im();
        let rows = |m: &RMat| (0..d).map(|i| m.row(i).to_vec()).collect();
        QuadraticFormJson { n: q.n(), q_re: rows(&re), q_im: rows(&im) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// q = -x^2 on R^2 (n = 1).
    fn neg_x_squared() -> QuadraticForm {
        QuadraticForm::new(
            1,
            array![[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
        )
        .unwrap()
    }

    /// The Kramers-Fokker-Planck model symbol
    /// `q = -eta^2 - v^2/4 - i (v xi - a x eta)` in ordering (x, v, xi, eta).
    pub fn kfp(a: f64) -> QuadraticForm {
        let z = c(0.0, 0.0);
        let q = array![
            [z, z, z, c(0.0, a / 2.0)],
            [z, c(-0.25, 0.0), c(0.0, -0.5), z],
            [z, c(0.0, -0.5), z, z],
            [c(0.0, a / 2.0), z, z, c(-1.0, 0.0)],
        ];
        QuadraticForm::new(2, q).unwrap()
    }

    #[test]
    fn eval_examples() {
        let q = neg_x_squared();
        let x = array![1.0, 0.0];
        assert_eq!(q.eval_real(&x).unwrap(), c(-1.0, 0.0));
        let zero = array![0.0, 0.0];
        assert_eq!(q.eval_real(&zero).unwrap(), c(0.0, 0.0));

        // KFP at X = (0, 1, 0, 0): the -v^2/4 term
        let k = kfp(1.0);
        let x = array![0.0, 1.0, 0.0, 0.0];
        let v = k.eval_real(&x).unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let q = neg_x_squared();
        let x = array![1.0, 0.0, 0.0];
        assert!(q.eval_real(&x).is_err());
    }

    #[test]
    fn asymmetric_input_is_symmetrized() {
        let q = QuadraticForm::new(1, array![[c(0.0, 0.0), c(2.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert_eq!(q.matrix()[[0, 1]], c(1.0, 0.0));
        assert_eq!(q.matrix()[[1, 0]], c(1.0, 0.0));
    }

    #[test]
    fn kfp_hamilton_map_matches_closed_form() {
        // the 4x4 matrix with rows (0, -i/2, 0, 0), (ai/2, 0, 0, -1),
        // (0, 0, 0, -ai/2), (0, 1/4, i/2, 0)
        let a = 1.7;
        let f = kfp(a).hamilton_map();
        let z = c(0.0, 0.0);
        let expect = array![
            [z, c(0.0, -0.5), z, z],
            [c(0.0, a / 2.0), z, z, c(-1.0, 0.0)],
            [z, z, z, c(0.0, -a / 2.0)],
            [z, c(0.25, 0.0), c(0.0, 0.5), z],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(f.matrix()[[i, j]], expect[[i, j]], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn hamilton_map_zero_form() {
        let q = QuadraticForm::new(1, Array2::zeros((2, 2))).unwrap();
        assert!(q.hamilton_map().matrix().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn hamilton_map_polarization_oracle() {
        // verify sigma(X, F Y) = q(X; Y) on all basis pairs for q = -x^2
        let q = neg_x_squared();
        let f = q.hamilton_map();
        let j = linalg::to_complex(&symplectic_form_matrix(1));
        for i in 0..2 {
            for k in 0..2 {
                let mut x: CVec = Array1::zeros(2);
                x[i] = c(1.0, 0.0);
                let mut y: CVec = Array1::zeros(2);
                y[k] = c(1.0, 0.0);
                let lhs = x.dot(&j.dot(&f.matrix().dot(&y)));
                let rhs = q.polarized(&x, &y).unwrap();
                assert!((lhs - rhs).norm() < 1e-15, "basis pair ({i},{k})");
            }
        }
    }

    #[test]
    fn poisson_bracket_monomials() {
        // {x^2, xi^2} = 4 x xi * ... : expected Q = [[0,-2],[-2,0]] (i.e. -4 x xi)
        let qx = QuadraticForm::new(1, array![[c(1.0, 0.0), z0()], [z0(), z0()]]).unwrap();
        let qxi = QuadraticForm::new(1, array![[z0(), z0()], [z0(), c(1.0, 0.0)]]).unwrap();
        let br = poisson_bracket(&qx, &qxi).unwrap();
        assert_eq!(br.matrix()[[0, 1]], c(-2.0, 0.0));
        assert_eq!(br.matrix()[[1, 0]], c(-2.0, 0.0));
        assert_eq!(br.matrix()[[0, 0]], z0());
        assert_eq!(br.matrix()[[1, 1]], z0());
    }

    fn z0() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn poisson_bracket_self_is_zero() {
        let k = kfp(0.3);
        let br = poisson_bracket(&k, &k).unwrap();
        assert!(br.matrix().iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn poisson_bracket_finite_difference_oracle() {
        // independent check of the bracket by central finite differences
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 2;
        let d = 2 * n;
        let mk = |rng: &mut ChaCha8Rng| {
            let m = Array2::from_shape_fn((d, d), |_| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            QuadraticForm::new(n, m).unwrap()
        };
        let q1 = mk(&mut rng);
        let q2 = mk(&mut rng);
        let br = poisson_bracket(&q1, &q2).unwrap();
        let x0: Array1<f64> = Array1::from_iter((0..d).map(|_| rng.gen_range(-1.0..1.0)));
        let h = 1e-5;
        let grad = |q: &QuadraticForm, i: usize| -> Complex64 {
            let mut xp = x0.clone();
            xp[i] += h;
            let mut xm = x0.clone();
            xm[i] -= h;
            (q.eval_real(&xp).unwrap() - q.eval_real(&xm).unwrap()) / (2.0 * h)
        };
        let mut expected = z0();
        for i in 0..n {
            expected += grad(&q1, n + i) * grad(&q2, i) - grad(&q1, i) * grad(&q2, n + i);
        }
        let got = br.eval_real(&x0).unwrap();
        assert!((expected - got).norm() < 1e-6, "fd {expected} vs bracket {got}");
    }

    #[test]
    fn numerical_range_negative_definite() {
        let q = QuadraticForm::new(
            1,
            array![[c(-1.0, 0.0), z0()], [z0(), c(-1.0, 0.0)]],
        )
        .unwrap();
        let cone = numerical_range_cone(&q, 64, &Tolerances::default()).unwrap();
        assert!(cone.contains(c(-3.0, 0.0)));
        assert!(!cone.contains(c(3.0, 0.0)));
        assert!(!cone.contains(c(0.0, 1.0)));
        assert!(cone.contains(z0()));
    }

    #[test]
    fn numerical_range_kfp_left_half_plane() {
        let cone = numerical_range_cone(&kfp(1.0), 4096, &Tolerances::default()).unwrap();
        // interior left half-plane directions are attained
        for frac in [0.55, 0.75, 1.0, 1.25, 1.45] {
            let ang = frac * std::f64::consts::PI;
            assert!(cone.contains(c(ang.cos(), ang.sin())), "angle {frac} pi");
        }
        assert!(!cone.contains(c(1.0, 0.0)));
        assert!(!cone.contains(c(1.0, 0.5)));
    }

    #[test]
    fn numerical_range_purely_imaginary() {
        let q = QuadraticForm::new(1, array![[c(0.0, 1.0), z0()], [z0(), z0()]]).unwrap();
        let cone = numerical_range_cone(&q, 64, &Tolerances::default()).unwrap();
        assert!(cone.contains(c(0.0, 2.0)));
        assert!(!cone.contains(c(0.0, -2.0)));
        assert!(!cone.contains(c(1.0, 0.0)));
    }

    #[test]
    fn symbol_order_rejected_off_characteristic() {
        // negative definite elliptic form: no real zero for interior z
        let q = QuadraticForm::new(
            1,
            array![[c(-1.0, 0.0), z0()], [z0(), c(-1.0, 0.0)]],
        )
        .unwrap();
        let x0 = array![1.0, 0.0];
        let r = symbol_order(&q, c(-5.0, 0.0), &x0, 4, &Tolerances::default());
        assert!(r.is_err());
    }

    #[test]
    fn symbol_order_infinite_for_i_x_squared() {
        let q = QuadraticForm::new(1, array![[c(0.0, 1.0), z0()], [z0(), z0()]]).unwrap();
        let x0 = array![0.0, 1.0];
        let r = symbol_order(&q, z0(), &x0, 4, &Tolerances::default()).unwrap();
        assert_eq!(r, SymbolOrder::InfiniteUpTo(4));
    }

    #[test]
    fn symbol_order_kfp_finite() {
        let q = kfp(1.0);
        // X0 = (1, 0, 0, 0): q(X0) = 0
        let x0 = array![1.0, 0.0, 0.0, 0.0];
        let j_max = 4 * 2 - 2;
        match symbol_order(&q, z0(), &x0, j_max, &Tolerances::default()).unwrap() {
            SymbolOrder::Finite(t) => assert!((1..=j_max).contains(&t), "order {t}"),
            other => panic!("expected finite order, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let k = kfp(0.5);
        let j = QuadraticFormJson::from_form(&k);
        let s = serde_json::to_string(&j).unwrap();
        let back: QuadraticFormJson = serde_json::from_str(&s).unwrap();
        let k2 = back.to_form().unwrap();
        for (a, b) in k.matrix().iter().zip(k2.matrix().iter()) {
            assert_eq!(a, b);
        }
    }
}

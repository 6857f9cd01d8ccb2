//! Spectral prediction: eigenvalue clusters of the Hamilton map, the
//! generator selection rules, the eigenvalue lattice, and the exponential
//! decay rate of the semigroup.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomposition::SymplecticSplit;
use crate::error::{QuadError, Result};
use crate::linalg;
use crate::quadform::{numerical_range_cone, HamiltonMap, QuadraticForm};
use crate::singular::SingularSpaceReport;
use crate::tol::Tolerances;

/// One eigenvalue cluster of the Hamilton map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Representative eigenvalue of `F`.
    pub lambda: Complex64,
    /// Algebraic multiplicity (cluster cardinality).
    pub r: usize,
    /// The lattice generator `mu = -i lambda`.
    pub mu: Complex64,
}

/// Which selection rule produced the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// `mu` in the numerical-range cone minus the origin (elliptic case).
    Elliptic,
    /// `Re mu < 0` or `mu` on the imaginary half-axis selected by the
    /// normal form of the singular-space block.
    Partial,
    /// `Re mu < 0` only (trivial singular space).
    Q1Only,
}

/// Enumeration window in the closed left half-plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub im_max: f64,
}

/// One predicted eigenvalue with its combinatorial multiplicity (number of
/// distinct `(k_lambda)` tuples landing on it).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticePoint {
    pub value: Complex64,
    pub count: usize,
}

/// The full predicted spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumPrediction {
    pub mode: SelectionMode,
    pub generators: Vec<EigenCluster>,
    pub lattice: Vec<LatticePoint>,
    pub decay_rate: f64,
    pub rect: Rect,
    pub warnings: Vec<String>,
}

/// Cluster the eigenvalues of `F` by mutual distance. Returns the clusters
/// and any ambiguity warnings (cluster representatives closer than three
/// times the clustering tolerance).
pub fn eigen_clusters(
    f: &HamiltonMap,
    tol: &Tolerances,
) -> Result<(Vec<EigenCluster>, Vec<String>)> {
    let mut eigs = linalg::eigvals(f.matrix())?;
    eigs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for ev in eigs {
        match clusters
            .iter_mut()
            .find(|(rep, _)| (ev - *rep).norm() <= tol.cluster_rel * (1.0 + rep.norm()))
        {
            Some((rep, count)) => {
                // running centroid keeps the representative centered
                *rep = (*rep * *count as f64 + ev) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((ev, 1)),
        }
    }
    let mut warnings = Vec::new();
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let (a, b) = (clusters[i].0, clusters[j].0);
            let gap = (a - b).norm();
            if gap <= 3.0 * tol.cluster_rel * (1.0 + a.norm()) {
                warnings.push(format!(
                    "clusters at {a} and {b} are separated by only {gap:.3e}; \
                     the grouping is ambiguous"
                ));
            }
        }
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let clusters = clusters
        .into_iter()
        .map(|(lambda, r)| EigenCluster { lambda, r, mu: minus_i * lambda })
        .collect();
    Ok((clusters, warnings))
}

/// Apply a selection rule to the clusters.
///
/// `partial` mode needs the normal form `(epsilon, lambdas)` from the split
/// when the singular space is nontrivial; `elliptic` mode needs the
/// numerical-range cone, built here from the form.
pub fn select_generators(
    clusters: &[EigenCluster],
    mode: SelectionMode,
    split: Option<&SymplecticSplit>,
    q: Option<&QuadraticForm>,
    tol: &Tolerances,
) -> Result<Vec<EigenCluster>> {
    match mode {
        SelectionMode::Q1Only => Ok(clusters
            .iter()
            .filter(|c| c.mu.re < -tol.boundary)
            .cloned()
            .collect()),
        SelectionMode::Partial => {
            let split = split.ok_or_else(|| {
                QuadError::Precondition("partial selection requires the symplectic split".into())
            })?;
            if split.n_dprime == 0 {
                // no imaginary block: the rule degenerates to the q1 rule
                return select_generators(clusters, SelectionMode::Q1Only, None, None, tol);
            }
            let eps = split.epsilon.ok_or_else(|| {
                QuadError::Precondition(
                    "partial selection requires the normal form of q2_tilde".into(),
                )
            })? as f64;
            Ok(clusters
                .iter()
                .filter(|c| {
                    c.mu.re < -tol.boundary
                        || (c.mu.re.abs() <= tol.boundary && eps * c.mu.im > tol.boundary)
                })
                .cloned()
                .collect())
        }
        SelectionMode::Elliptic => {
            let q = q.ok_or_else(|| {
                QuadError::Precondition("elliptic selection requires the form itself".into())
            })?;
            let cone = numerical_range_cone(q, 4096.max(2 * q.dim()), tol)?;
            let scale = clusters.iter().map(|c| c.mu.norm()).fold(0.0_f64, f64::max);
            Ok(clusters
                .iter()
                .filter(|c| c.mu.norm() > 1e-12 * scale.max(1.0) && cone.contains(c.mu))
                .cloned()
                .collect())
        }
    }
}

const NODE_GUARD: usize = 1_000_000;

/// All sums `sum_lambda (r_lambda + 2 k_lambda) mu_lambda`, `k_lambda >= 0`,
/// inside the window `{re_min <= Re <= tol, |Im| <= im_max}`. Coincident
/// sums merge with accumulated counts; result sorted by descending real
/// part.
pub fn enumerate_lattice(
    generators: &[EigenCluster],
    rect: Rect,
    tol: &Tolerances,
) -> Result<Vec<LatticePoint>> {
    if rect.re_min >= 0.0 {
        return Err(QuadError::Precondition("rect.re_min must be negative".into()));
    }
    if generators.is_empty() {
        return Ok(vec![]);
    }

    // per-generator bound on k from the real direction; imaginary-axis
    // generators are bounded by im_max plus the largest imaginary excursion
    // the real-bounded generators can produce
    let mut k_caps: Vec<usize> = Vec::with_capacity(generators.len());
    let mut im_slack = 0.0_f64;
    for g in generators {
        if g.mu.re < -tol.boundary {
            let cap = ((rect.re_min / g.mu.re - g.r as f64) / 2.0).floor().max(0.0) as usize;
            k_caps.push(cap);
            im_slack += (g.r as f64 + 2.0 * cap as f64) * g.mu.im.abs();
        } else {
            k_caps.push(usize::MAX); // resolved below
        }
    }
    for (cap, g) in k_caps.iter_mut().zip(generators) {
        if *cap == usize::MAX {
            let lam = g.mu.im.abs();
            if lam <= tol.boundary {
                return Err(QuadError::Precondition(format!(
                    "generator mu = {} is numerically zero",
                    g.mu
                )));
            }
            *cap = (((rect.im_max + im_slack) / lam - g.r as f64) / 2.0)
                .floor()
                .max(0.0) as usize;
        }
    }

    let mut sums: Vec<(Complex64, usize)> = Vec::new();
    let mut nodes = 0usize;
    // depth-first over k tuples with on-the-fly partial sums
    fn recurse(
        generators: &[EigenCluster],
        k_caps: &[usize],
        idx: usize,
        partial: Complex64,
        rect: &Rect,
        tol: &Tolerances,
        sums: &mut Vec<(Complex64, usize)>,
        nodes: &mut usize,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > NODE_GUARD {
            return Err(QuadError::EnumerationExplosion(NODE_GUARD));
        }
        if idx == generators.len() {
            if partial.re >= rect.re_min - 1e-12 && partial.im.abs() <= rect.im_max + 1e-12 {
                let merge_tol = tol.cluster_rel * (1.0 + partial.norm());
                match sums.iter_mut().find(|(v, _)| (*v - partial).norm() <= merge_tol) {
                    Some((_, count)) => *count += 1,
                    None => sums.push((partial, 1)),
                }
            }
            return Ok(());
        }
        let g = &generators[idx];
        for k in 0..=k_caps[idx] {
            let contrib = g.mu * (g.r as f64 + 2.0 * k as f64);
            let next = partial + contrib;
            // adding to k only pushes Re further left: once past the window
            // no larger k can return
            if next.re < rect.re_min - 1e-9 {
                break;
            }
            recurse(generators, k_caps, idx + 1, next, rect, tol, sums, nodes)?;
        }
        Ok(())
    }
    recurse(
        generators,
        &k_caps,
        0,
        Complex64::new(0.0, 0.0),
        &rect,
        tol,
        &mut sums,
        &mut nodes,
    )?;

    sums.sort_by(|a, b| {
        (b.0.re, a.0.im.abs(), a.0.im)
            .partial_cmp(&(a.0.re, b.0.im.abs(), b.0.im))
            .unwrap()
    });
    Ok(sums
        .into_iter()
        .map(|(value, count)| LatticePoint { value, count })
        .collect())
}

/// Exponential decay rate `a = sum_lambda r_lambda |Re mu_lambda|` over the
/// strictly contracting generators; the infimum over `k` tuples is attained
/// at `k = 0`.
pub fn decay_rate(generators: &[EigenCluster], tol: &Tolerances) -> f64 {
    generators
        .iter()
        .filter(|g| g.mu.re < -tol.boundary)
        .map(|g| g.r as f64 * (-g.mu.re))
        .sum()
}

fn default_rect(generators: &[EigenCluster]) -> Rect {
    let min_re = generators
        .iter()
        .map(|g| g.mu.re.abs())
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let min_re = if min_re.is_finite() { min_re } else { 0.0 };
    let max_im = generators.iter().map(|g| g.mu.im.abs()).fold(0.0_f64, f64::max);
    Rect { re_min: -20.0 * (min_re + 1.0), im_max: 20.0 * (max_im + 1.0) }
}

/// Full pipeline: clusters, selection, lattice, decay rate.
///
/// The selection mode is chosen from the geometry: trivial singular space
/// uses the `q1_only` rule, a nontrivial symplectic singular space with
/// partial ellipticity uses the `partial` rule. A non-symplectic or
/// non-elliptic singular space is a hypothesis failure and yields an error.
pub fn predict_spectrum(
    q: &QuadraticForm,
    report: &SingularSpaceReport,
    split: Option<&SymplecticSplit>,
    rect: Option<Rect>,
    tol: &Tolerances,
) -> Result<SpectrumPrediction> {
    if !report.is_symplectic {
        return Err(QuadError::NotSymplectic);
    }
    if !report.is_partially_elliptic {
        return Err(QuadError::NotPartiallyElliptic(format!(
            "q vanishes on the singular space (margin {:?})",
            report.ellipticity_margin
        )));
    }
    let mode = if report.s.d == 0 { SelectionMode::Q1Only } else { SelectionMode::Partial };
    if mode == SelectionMode::Partial && split.is_none() {
        return Err(QuadError::Precondition(
            "partial-ellipticity prediction requires the symplectic split".into(),
        ));
    }
    let (clusters, warnings) = eigen_clusters(&q.hamilton_map(), tol)?;
    let generators = select_generators(&clusters, mode, split, Some(q), tol)?;
    let rect = rect.unwrap_or_else(|| default_rect(&generators));
    let lattice = enumerate_lattice(&generators, rect, tol)?;
    let a = decay_rate(&generators, tol);
    let mut warnings = warnings;
    for p in &lattice {
        if p.count > 1 {
            warnings.push(format!(
                "resonance: {} distinct k-tuples reach the lattice point {}",
                p.count, p.value
            ));
            break;
        }
    }
    Ok(SpectrumPrediction { mode, generators, lattice, decay_rate: a, rect, warnings })
}

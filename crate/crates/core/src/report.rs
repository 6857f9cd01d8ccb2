//! End-to-end orchestration: run the full analysis pipeline on one form and
//! assemble a machine-readable report, optionally validated against the
//! Hermite-Galerkin oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomposition::{self, SymplecticSplit};
use crate::error::Result;
use crate::galerkin::{self, SmoothingReport};
use crate::quadform::{QuadraticForm, QuadraticFormJson};
use crate::singular::{self, SingularSpaceReport};
use crate::spectrum::{self, Rect, SpectrumPrediction};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissipativityVerdict {
    pub ok: bool,
    pub max_re_eigenvalue: f64,
    pub threshold: f64,
}

/// One row of the prediction-vs-oracle table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleMatch {
    pub predicted: Complex64,
    pub observed: Complex64,
    pub distance: f64,
    pub tolerance: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayComparison {
    pub predicted: f64,
    pub fitted: f64,
    pub abs_error: f64,
    pub fit_window: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub trunc: usize,
    pub dn: usize,
    pub k: usize,
    pub matches: Vec<OracleMatch>,
    /// Converged oracle eigenvalues in the window with no predicted partner.
    pub unmatched_observed: Vec<Complex64>,
    /// Predicted points in the window with no converged partner.
    pub unmatched_predicted: Vec<Complex64>,
    pub decay: Option<DecayComparison>,
    pub curve: Vec<(f64, f64)>,
    pub smoothing: Vec<SmoothingReport>,
    pub warnings: Vec<String>,
}

/// The full report for one analyzed form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: QuadraticFormJson,
    pub tolerances: Tolerances,
    pub dissipativity: DissipativityVerdict,
    pub singular_space: Option<SingularSpaceReport>,
    pub split: Option<SymplecticSplit>,
    pub spectrum: Option<SpectrumPrediction>,
    pub applicable_results: Vec<String>,
    /// Set when a structural hypothesis fails; the stages above the failure
    /// are still reported.
    pub hypothesis_failure: Option<String>,
    pub validation: Option<ValidationReport>,
}

impl AnalysisReport {
    pub fn failed(&self) -> bool {
        self.hypothesis_failure.is_some()
    }
}

/// Knobs for the oracle validation stage.
#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub trunc: usize,
    pub dn: usize,
    pub k: usize,
    pub times: Vec<f64>,
    /// Fit window for the decay rate; `None` uses `[0.4 t_max, t_max]`.
    pub fit_window: Option<(f64, f64)>,
    /// Per-value matching tolerance against the predicted lattice.
    pub tol_match: f64,
    /// Smoothing diagnostics to run, as `(t, p)` pairs.
    pub smoothing: Vec<(f64, usize)>,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            trunc: 30,
            dn: 10,
            k: 6,
            times: (0..=16).map(|k| 0.5 * k as f64).collect(),
            fit_window: None,
            tol_match: 1e-4,
            smoothing: vec![],
            seed: 0,
        }
    }
}

/// Run the structural pipeline (no Galerkin stages).
pub fn analyze(q: &QuadraticForm, rect: Option<Rect>, tol: &Tolerances) -> Result<AnalysisReport> {
    let input = QuadraticFormJson::from_form(q);
    let (diss_ok, max_eig, thresh) = q.dissipativity(tol)?;
    let dissipativity = DissipativityVerdict {
        ok: diss_ok,
        max_re_eigenvalue: max_eig,
        threshold: thresh,
    };
    let mut report = AnalysisReport {
        input,
        tolerances: *tol,
        dissipativity,
        singular_space: None,
        split: None,
        spectrum: None,
        applicable_results: vec![],
        hypothesis_failure: None,
        validation: None,
    };
    if !diss_ok {
        report.hypothesis_failure =
            Some(format!("Re q is not negative semidefinite (max eigenvalue {max_eig:.6e})"));
        return Ok(report);
    }
    report.applicable_results.push("contraction-semigroup".into());

    let sing = singular::analyze(q, tol)?;
    let symplectic = sing.is_symplectic;
    let elliptic = sing.is_partially_elliptic;
    let s_dim = sing.s.d;
    report.singular_space = Some(sing);

    if !symplectic {
        report.hypothesis_failure = Some(
            "the singular space carries a degenerate symplectic form; the spectral \
             lattice and decay-rate results do not apply (the semigroup norm can \
             stay at 1)"
                .into(),
        );
        return Ok(report);
    }
    if !elliptic {
        report.hypothesis_failure = Some(
            "q vanishes somewhere on its singular space; the partial-ellipticity \
             hypothesis fails"
                .into(),
        );
        return Ok(report);
    }

    let split = decomposition::split(q, report.singular_space.as_ref().unwrap(), tol)?;
    let n = q.n();
    if split.n_prime > 0 {
        report.applicable_results.push("smoothing-in-primed-variables".into());
    }
    if s_dim == 2 * n {
        report.applicable_results.push("unitary-semigroup".into());
    }
    let pred = spectrum::predict_spectrum(
        q,
        report.singular_space.as_ref().unwrap(),
        Some(&split),
        rect,
        tol,
    )?;
    report.applicable_results.push("discrete-spectral-lattice".into());
    if pred.decay_rate > 0.0 {
        report.applicable_results.push("exponential-decay".into());
    }
    report.split = Some(split);
    report.spectrum = Some(pred);
    Ok(report)
}

/// Greedy bijective matching of converged oracle eigenvalues against the
/// predicted lattice within the half-window `Re > re_min / 2`.
pub fn validate(
    q: &QuadraticForm,
    report: &AnalysisReport,
    opts: &ValidateOptions,
    tol: &Tolerances,
) -> Result<ValidationReport> {
    let pred = report
        .spectrum
        .as_ref()
        .ok_or_else(|| crate::error::QuadError::Precondition("no spectrum prediction".into()))?;
    let conv = galerkin::numerical_spectrum(q, opts.trunc, opts.dn, opts.k, tol)?;
    let mut warnings = conv.warnings.clone();

    let window_re = pred.rect.re_min / 2.0;
    let observed: Vec<Complex64> = conv
        .values
        .iter()
        .filter(|v| v.re > window_re)
        .cloned()
        .collect();
    let predicted: Vec<Complex64> = pred
        .lattice
        .iter()
        .filter(|p| p.value.re > window_re)
        .map(|p| p.value)
        .collect();

    // all candidate pairs by distance, greedily matched one-to-one
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, o) in observed.iter().enumerate() {
        for (j, p) in predicted.iter().enumerate() {
            pairs.push((i, j, (o - p).norm()));
        }
    }
    pairs.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    let mut used_obs = vec![false; observed.len()];
    let mut used_pred = vec![false; predicted.len()];
    let mut matches = Vec::new();
    for (i, j, dist) in pairs {
        if used_obs[i] || used_pred[j] {
            continue;
        }
        let tolerance = opts.tol_match * (1.0 + observed[i].norm());
        if dist <= tolerance {
            used_obs[i] = true;
            used_pred[j] = true;
            matches.push(OracleMatch {
                predicted: predicted[j],
                observed: observed[i],
                distance: dist,
                tolerance,
                matched: true,
            });
        }
    }
    let unmatched_observed: Vec<Complex64> = observed
        .iter()
        .zip(&used_obs)
        .filter(|(_, &u)| !u)
        .map(|(v, _)| *v)
        .collect();
    // only unmatched predictions at least as high as the lowest converged
    // eigenvalue indicate a real discrepancy; deeper ones are simply beyond
    // the resolved window
    let obs_floor = observed.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let unmatched_predicted: Vec<Complex64> = predicted
        .iter()
        .zip(&used_pred)
        .filter(|&(v, &u)| !u && v.re >= obs_floor - 1e-9)
        .map(|(v, _)| *v)
        .collect();
    if !unmatched_observed.is_empty() {
        warnings.push(format!(
            "{} converged oracle eigenvalues have no predicted partner",
            unmatched_observed.len()
        ));
    }
    if !unmatched_predicted.is_empty() {
        warnings.push(format!(
            "{} predicted eigenvalues in the resolved window were not observed",
            unmatched_predicted.len()
        ));
    }

    let curve = galerkin::semigroup_norm_curve(q, opts.trunc, &opts.times, tol)?;
    let decay = if curve.len() >= 5 {
        let tmax = opts.times.iter().cloned().fold(0.0_f64, f64::max);
        let (lo, hi) = opts.fit_window.unwrap_or((0.4 * tmax, tmax));
        match galerkin::decay_fit(&curve, lo, hi) {
            Ok(fitted) => Some(DecayComparison {
                predicted: pred.decay_rate,
                fitted,
                abs_error: (fitted - pred.decay_rate).abs(),
                fit_window: (lo, hi),
            }),
            Err(e) => {
                warnings.push(format!("decay fit skipped: {e}"));
                None
            }
        }
    } else {
        None
    };

    let mut smoothing = Vec::new();
    if let Some(split) = &report.split {
        for &(t, p) in &opts.smoothing {
            smoothing.push(galerkin::smoothing_diagnostic(
                q, split, opts.trunc, opts.dn, t, p, opts.seed,
            )?);
        }
    }

    Ok(ValidationReport {
        trunc: opts.trunc,
        dn: opts.dn,
        k: opts.k,
        matches,
        unmatched_observed,
        unmatched_predicted,
        decay,
        curve,
        smoothing,
        warnings,
    })
}

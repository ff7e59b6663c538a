//! Least-squares Gaussian expansions of Slater-type orbitals.
//!
//! The fit is done once per (orbital kind, term count) for a Slater exponent
//! of 1 and then rescaled: if e^{-r} ≈ Σ c_k e^{-α_k r²}, then for exponent ζ
//! the same coefficients (times ζ^{l+3/2}) and exponents α_k ζ² apply.
//!
//! For fixed exponents the optimal coefficients solve the normal equations
//! G c = b, leaving the residual ‖φ‖² − bᵀG⁻¹b (in a tail-weighted norm),
//! which is minimized over the log-exponents with BFGS. Term counts are fitted as a nested sequence,
//! each seeded from the previous optimum, so the residual never increases
//! as terms are added.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::OrbitalKind;
use crate::error::{Error, Result};

/// Largest residual accepted from the optimizer.
pub const FIT_TOLERANCE: f64 = 0.1;

/// λ in the fitting weight e^{λr}. Exchange between distant centres is set
/// by the orbital tails, which an unweighted fit neglects.
pub const TAIL_WEIGHT: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalFit {
    pub kind: OrbitalKind,
    /// (exponent, coefficient) for Slater exponent 1, normalized.
    pub terms: Vec<(f64, f64)>,
    /// L² distance between the Slater function and its best expansion.
    pub fit_error: f64,
}

fn angular_l(kind: OrbitalKind) -> i32 {
    match kind {
        OrbitalKind::S1 => 0,
        OrbitalKind::P2 => 1,
    }
}

fn angular_weight(l: i32) -> f64 {
    if l == 0 {
        4.0 * PI
    } else {
        4.0 * PI / 3.0
    }
}

/// Γ(l + 3/2) and Γ(l + 5/2) for l ∈ {0, 1}.
fn gamma_half(k: i32) -> f64 {
    // Γ(k + 1/2)
    let mut g = PI.sqrt();
    for j in 0..k {
        g *= j as f64 + 0.5;
    }
    g
}

/// Trapezoid rule on r = e^t; spectrally accurate for these smooth integrands.
struct RadialGrid {
    r: Vec<f64>,
    w: Vec<f64>,
}

impl RadialGrid {
    fn new() -> Self {
        let (t0, t1, h) = (-16.0f64, 4.8f64, 0.008f64);
        let n = ((t1 - t0) / h).round() as usize;
        let mut r = Vec::with_capacity(n + 1);
        let mut w = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let x = (t0 + i as f64 * h).exp();
            r.push(x);
            w.push(h * x);
        }
        RadialGrid { r, w }
    }
}

fn grid() -> &'static RadialGrid {
    static GRID: OnceLock<RadialGrid> = OnceLock::new();
    GRID.get_or_init(RadialGrid::new)
}

struct Problem {
    l: i32,
    /// Exponent λ of the weight e^{λr} in the fitting norm.
    tail: f64,
}

struct Evaluation {
    value: f64,
    coefficients: DVector<f64>,
    gradient: DVector<f64>,
}

impl Problem {
    fn new(kind: OrbitalKind) -> Self {
        Problem {
            l: angular_l(kind),
            tail: TAIL_WEIGHT,
        }
    }

    /// Normalized Slater radial part r^l e^{-r}; the normalization is 1/√π for both kinds.
    fn target(&self, r: f64) -> f64 {
        r.powi(self.l) * (-r).exp() / PI.sqrt()
    }

    /// Unweighted Ω ∫ r^{2l+2+2·extra} e^{-s r²} dr.
    fn gram(&self, s: f64, extra: i32) -> f64 {
        let k = self.l + 1 + extra;
        angular_weight(self.l) * gamma_half(k) / (2.0 * s.powf(k as f64 + 0.5))
    }

    fn evaluate(&self, log_alpha: &[f64]) -> Option<Evaluation> {
        let n = log_alpha.len();
        let alpha: Vec<f64> = log_alpha.iter().map(|x| x.exp()).collect();
        let g = grid();
        let omega = angular_weight(self.l);
        let mut b = DVector::<f64>::zeros(n);
        let mut db = DVector::<f64>::zeros(n);
        let mut gram = DMatrix::<f64>::zeros(n, n);
        let mut dgram = DMatrix::<f64>::zeros(n, n);
        let mut norm = 0.0;
        let mut e = vec![0.0; n];
        for (&r, &w) in g.r.iter().zip(&g.w) {
            let weight = w * omega * r.powi(2 * self.l) * r * r * (self.tail * r).exp();
            if weight == 0.0 {
                continue;
            }
            let f = self.target(r) / r.powi(self.l);
            norm += weight * f * f;
            for k in 0..n {
                e[k] = (-alpha[k] * r * r).exp();
                b[k] += weight * f * e[k];
                db[k] -= weight * f * e[k] * r * r;
            }
            for j in 0..n {
                for k in j..n {
                    let v = weight * e[j] * e[k];
                    gram[(j, k)] += v;
                    dgram[(j, k)] -= v * r * r;
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                gram[(j, k)] = gram[(k, j)];
                dgram[(j, k)] = dgram[(k, j)];
            }
        }
        let chol = gram.cholesky()?;
        let c = chol.solve(&b);
        let value = 1.0 - b.dot(&c) / norm;
        if !value.is_finite() {
            return None;
        }
        let mut gradient = DVector::zeros(n);
        for k in 0..n {
            let mut dg = 0.0f64;
            for m in 0..n {
                dg += c[m] * dgram[(k, m)];
            }
            let d_alpha = -(2.0 * c[k] * db[k] - 2.0 * c[k] * dg) / norm;
            gradient[k] = alpha[k] * d_alpha;
        }
        Some(Evaluation {
            value,
            coefficients: c,
            gradient,
        })
    }

    /// Unweighted L² distance between the target and a normalized expansion.
    fn distance(&self, terms: &[(f64, f64)]) -> f64 {
        let g = grid();
        let omega = angular_weight(self.l);
        let mut cross = 0.0;
        for (&r, &w) in g.r.iter().zip(&g.w) {
            let f = self.target(r) / r.powi(self.l);
            let gsum: f64 = terms.iter().map(|&(a, c)| c * (-a * r * r).exp()).sum();
            cross += w * omega * r.powi(2 * self.l) * r * r * f * gsum;
        }
        (2.0 - 2.0 * cross).max(0.0).sqrt()
    }
}


/// Minimizes the fit residual over log-exponents.
fn bfgs(problem: &Problem, start: Vec<f64>) -> Option<(Vec<f64>, Evaluation)> {
    let n = start.len();
    let mut x = DVector::from_vec(start);
    let mut cur = problem.evaluate(x.as_slice())?;
    let mut h = DMatrix::<f64>::identity(n, n);
    for _ in 0..2000 {
        if cur.gradient.norm() < 1e-13 {
            break;
        }
        let mut dir = -(&h * &cur.gradient);
        if dir.dot(&cur.gradient) >= 0.0 {
            h = DMatrix::identity(n, n);
            dir = -cur.gradient.clone();
        }
        let slope = dir.dot(&cur.gradient);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + &dir * step;
            if let Some(ev) = problem.evaluate(trial.as_slice()) {
                if ev.value <= cur.value + 1e-4 * step * slope {
                    accepted = Some((trial, ev));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((x_new, next)) = accepted else { break };
        let s = &x_new - &x;
        let y = &next.gradient - &cur.gradient;
        let sy = s.dot(&y);
        let improvement = cur.value - next.value;
        x = x_new;
        cur = next;
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let left = &i - &s * y.transpose() * rho;
            let right = &i - &y * s.transpose() * rho;
            h = &left * &h * &right + &s * s.transpose() * rho;
        }
        if improvement.abs() < 1e-17 {
            break;
        }
    }
    Some((x.as_slice().to_vec(), cur))
}

fn initial_exponents(kind: OrbitalKind) -> Vec<f64> {
    match kind {
        // STO-3G starting points for ζ = 1
        OrbitalKind::S1 => vec![2.227_66, 0.405_771, 0.109_818],
        OrbitalKind::P2 => vec![2.941_249, 0.683_483, 0.222_290],
    }
}

fn finish(kind: OrbitalKind, log_alpha: &[f64], ev: &Evaluation) -> CanonicalFit {
    let mut terms: Vec<(f64, f64)> = log_alpha
        .iter()
        .zip(ev.coefficients.iter())
        .map(|(x, c)| (x.exp(), *c))
        .collect();
    // renormalize to unit self-overlap
    let p = Problem::new(kind);
    let mut norm = 0.0;
    for &(a, ca) in &terms {
        for &(b, cb) in &terms {
            norm += ca * cb * p.gram(a + b, 0);
        }
    }
    let scale = 1.0 / norm.sqrt();
    for t in terms.iter_mut() {
        t.1 *= scale;
    }
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let fit_error = p.distance(&terms);
    CanonicalFit {
        kind,
        terms,
        fit_error,
    }
}

fn fit_nested(kind: OrbitalKind, n_terms: usize) -> Result<Vec<CanonicalFit>> {
    let problem = Problem::new(kind);
    let mut fits = Vec::new();
    let start: Vec<f64> = initial_exponents(kind).iter().map(|a| a.ln()).collect();
    let (mut x, ev) = bfgs(&problem, start).ok_or(Error::FitFailure { residual: f64::NAN })?;
    fits.push(finish(kind, &x, &ev));
    while x.len() < n_terms {
        let mut sorted = x.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mut candidates = vec![sorted[0] - 1.2, sorted[sorted.len() - 1] + 1.2];
        for w in sorted.windows(2) {
            candidates.push(0.5 * (w[0] + w[1]));
        }
        let mut best: Option<(Vec<f64>, Evaluation)> = None;
        for extra in candidates {
            let mut trial = sorted.clone();
            trial.push(extra);
            if let Some((xt, et)) = bfgs(&problem, trial) {
                if best.as_ref().is_none_or(|(_, eb)| et.value < eb.value) {
                    best = Some((xt, et));
                }
            }
        }
        let (xb, eb) = best.ok_or(Error::FitFailure { residual: f64::NAN })?;
        x = xb;
        fits.push(finish(kind, &x, &eb));
    }
    Ok(fits)
}

/// Best expansion of the unit-exponent Slater function with `n_terms` Gaussians.
pub fn canonical_fit(kind: OrbitalKind, n_terms: usize) -> Result<CanonicalFit> {
    if n_terms < 3 {
        return Err(Error::Precondition(format!(
            "at least 3 Gaussian terms are required, got {n_terms}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<OrbitalKind, Vec<CanonicalFit>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fit cache poisoned");
    let have = guard.get(&kind).map_or(0, |v| v.len() + 2);
    if have < n_terms {
        let fits = fit_nested(kind, n_terms)?;
        guard.insert(kind, fits);
    }
    let fit = guard[&kind][n_terms - 3].clone();
    if !(fit.fit_error <= FIT_TOLERANCE) {
        return Err(Error::FitFailure {
            residual: fit.fit_error,
        });
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let p = Problem { l: 1, tail: 0.7 };
        let x = [1.0f64.ln(), 0.3f64.ln(), 0.05f64.ln(), 4.0f64.ln()];
        let ev = p.evaluate(&x).unwrap();
        for k in 0..x.len() {
            let h = 1e-5;
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fd = (p.evaluate(&xp).unwrap().value - p.evaluate(&xm).unwrap().value) / (2.0 * h);
            assert!((fd - ev.gradient[k]).abs() < 1e-7 * (1.0 + fd.abs()), "k={k} fd={fd} an={}", ev.gradient[k]);
        }
    }

    #[test]
    fn sto3g_quality_reached() {
        // STO-3G overlap with the 1s Slater function is 0.99839. The weighted
        // fit trades a little of that for tail accuracy.
        let f = canonical_fit(OrbitalKind::S1, 3).unwrap();
        let overlap = 1.0 - f.fit_error.powi(2) / 2.0;
        assert!(overlap > 0.998, "{overlap}");
    }

    #[test]
    fn residual_decreases_with_terms() {
        for kind in [OrbitalKind::S1, OrbitalKind::P2] {
            let errs: Vec<f64> = (3..=6).map(|n| canonical_fit(kind, n).unwrap().fit_error).collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{kind:?}: {errs:?}");
        }
    }

    #[test]
    fn too_few_terms_rejected() {
        assert!(matches!(canonical_fit(OrbitalKind::S1, 2), Err(Error::Precondition(_))));
    }
}

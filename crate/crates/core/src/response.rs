//! The second-order response function `G(k)` coupling the two plates'
//! corrugations, the PFA ratio `ρ(k) = G(k)/G(0)`, and the exponential
//! large-`k` asymptote.
//!
//! `G(k) = -∫_0^∞ dξ/2π ∫ d²k'/(2π)² b(k', k' - k; ξ)` in units of
//! ħc·nm⁻⁵, with
//!
//! ```text
//! b(k1, k2) = Σ_{p'p} e^{-(κ1+κ2)L} R_{p'p}(k1,k2) R_{pp'}(k2,k1)
//!             / [(1 - r_{p'}(k1)² e^{-2κ1 L}) (1 - r_p(k2)² e^{-2κ2 L})]
//! ```
//!
//! The `k'` integral runs in polar coordinates around `k' = 0` with the
//! corrugation wavevector along x̂, so only `θ ∈ [0, π]` is needed.
//! Everything is evaluated with the overall `e^{-kL}` factored out.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{require_non_negative, CasimirError, Result};
use crate::lifshitz::CavityConfig;
use crate::medium::{fresnel_parts, Polarization};
use crate::nonspec::{angle, first_order_amplitudes, reduced, ScatteringChannel, Side};
use crate::quad::{adaptive, integrate_from, Exec, IntegralResult, QuadratureSpec};
use crate::Estimate;

/// Integration is cut where the kernel falls below `e^{-CUTOFF}` of its
/// peak: `(κ1 + κ2 - k) L ≥ CUTOFF`.
const CUTOFF: f64 = 60.0;

/// Arguments of one `G(k)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseQuery {
    pub k: f64,
    pub cavity: CavityConfig,
    pub quad: QuadratureSpec,
}

impl ResponseQuery {
    pub fn new(k: f64, cavity: CavityConfig, quad: QuadratureSpec) -> Self {
        Self { k, cavity, quad }
    }

    pub fn at_k(&self, k: f64) -> Self {
        Self { k, ..*self }
    }
}

/// A side of the kernel plus its two cavity denominators.
#[derive(Debug, Clone, Copy)]
struct Leg {
    side: Side,
    denom: [f64; 2],
}

impl Leg {
    fn new(kp: f64, k: f64, xi: f64, separation: f64) -> Self {
        let side = Side::new(kp, k, xi);
        let round_trip = (-2.0 * side.kappa * separation).exp();
        let denom = Polarization::BOTH.map(|p| {
            let r = fresnel_parts(kp, k, xi, p);
            1.0 - r * r * round_trip
        });
        Leg { side, denom }
    }
}

/// `b e^{kL}` from precomputed legs; `cos` is the cosine of the angle
/// between the two wavevectors.
#[inline]
fn kernel_reduced(kp: f64, xi: f64, separation: f64, shift: f64, one: &Leg, two: &Leg, cos: f64) -> f64 {
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    // α(k1 <- k2) and α(k2 <- k1); the cross entries only enter squared.
    let fwd = reduced(kp, xi, &one.side, &two.side, cos, sin);
    let back = reduced(kp, xi, &two.side, &one.side, cos, -sin);
    let mut sum = 0.0;
    for p_out in 0..2 {
        for p_in in 0..2 {
            sum += fwd[p_out][p_in] * back[p_in][p_out] / (one.denom[p_out] * two.denom[p_in]);
        }
    }
    let decay = (-(one.side.kappa + two.side.kappa - shift) * separation).exp();
    4.0 * one.side.kappa * two.side.kappa * decay * sum
}

/// `b_{k_out, k_in}(ξ)`, assembled from the non-specular amplitude matrices.
pub fn kernel_b(cavity: &CavityConfig, k_out: [f64; 2], k_in: [f64; 2], xi_over_c: f64) -> Result<f64> {
    let material = cavity.material();
    let l = cavity.separation();
    let kp = material.plasma_wavenumber();
    let forward = first_order_amplitudes(material, &ScatteringChannel { k_in, k_out, xi_over_c })?;
    let backward = first_order_amplitudes(
        material,
        &ScatteringChannel {
            k_in: k_out,
            k_out: k_in,
            xi_over_c,
        },
    )?;
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let out = Leg::new(kp, norm(k_out), xi_over_c, l);
    let inp = Leg::new(kp, norm(k_in), xi_over_c, l);
    let mut sum = 0.0;
    for p_out in Polarization::BOTH {
        for p_in in Polarization::BOTH {
            sum += forward.get(p_out, p_in) * backward.get(p_in, p_out)
                / (out.denom[p_out.index()] * inp.denom[p_in.index()]);
        }
    }
    Ok((-(out.side.kappa + inp.side.kappa) * l).exp() * sum)
}

/// Largest `ξ/c` inside the cutoff, from `κ1 + κ2 ≥ √(k² + 4ξ²)`.
fn xi_cutoff(k: f64, separation: f64) -> f64 {
    let top = k + CUTOFF / separation;
    0.5 * (top * top - k * k).sqrt()
}

/// Largest `|k'|` inside the cutoff at given `ξ/c`, from the Minkowski bound
/// `κ1 + κ2 ≥ √((2|k'| - k)² + 4ξ²)`.
fn radial_cutoff(k: f64, xi: f64, separation: f64) -> f64 {
    let top = k + CUTOFF / separation;
    0.5 * (k + (top * top - 4.0 * xi * xi).max(0.0).sqrt())
}

/// `G(k) e^{kL}` with the corrugation wavevector at angle `direction`.
///
/// With `direction = None` the wavevector lies along x̂ and the angular
/// integral uses the reflection symmetry; otherwise the full circle is
/// integrated.
fn reduced_response(query: &ResponseQuery, direction: Option<f64>) -> Result<(IntegralResult, QuadratureSpec)> {
    let ResponseQuery { k, cavity, quad } = *query;
    require_non_negative("corrugation wavenumber k", k)?;
    quad.validate()?;
    let kp = cavity.material().plasma_wavenumber();
    let l = cavity.separation();
    let outer = QuadratureSpec {
        transform_scale: Some(quad.transform_scale.unwrap_or_else(|| cavity.frequency_scale())),
        ..quad
    };
    let radial_spec = quad.inner();
    let angular_spec = radial_spec.inner();
    let failures = AtomicUsize::new(0);
    let (theta_end, k_vec) = match direction {
        None => (PI, [k, 0.0]),
        Some(psi) => (2.0 * PI, [k * psi.cos(), k * psi.sin()]),
    };

    let over_xi = |xi: f64| -> f64 {
        if xi >= xi_cutoff(k, l) {
            return 0.0;
        }
        let r_max = radial_cutoff(k, xi, l);
        let breaks: Vec<f64> = if k > 0.0 && k < r_max {
            vec![0.0, k, r_max]
        } else {
            vec![0.0, r_max]
        };
        let over_r = |r: f64| -> f64 {
            let one = Leg::new(kp, r, xi, l);
            let over_theta = |th: f64| -> f64 {
                let k1 = [r * th.cos(), r * th.sin()];
                let k2 = [k1[0] - k_vec[0], k1[1] - k_vec[1]];
                let two = Leg::new(kp, k2[0].hypot(k2[1]), xi, l);
                let (cos, _) = angle(k2, k1);
                kernel_reduced(kp, xi, l, k, &one, &two, cos)
            };
            let res = adaptive(&over_theta, &[0.0, theta_end], &angular_spec, Exec::Sequential);
            if !res.converged {
                failures.fetch_add(1, Ordering::Relaxed);
            }
            r * res.value
        };
        let res = adaptive(&over_r, &breaks, &radial_spec, Exec::Sequential);
        if !res.converged {
            failures.fetch_add(1, Ordering::Relaxed);
        }
        res.value
    };

    let mut res = integrate_from(over_xi, 0.0, &outer, Exec::Parallel);
    if failures.load(Ordering::Relaxed) > 0 {
        res.converged = false;
    }
    // -(1/2π) · (1/(2π)²) · (2 if only half the circle was integrated)
    let half = if direction.is_none() { 2.0 } else { 1.0 };
    Ok((res.scaled(-half / (8.0 * PI * PI * PI)), radial_spec))
}

/// `G(k) e^{kL}`: the response function with its exponential decay removed.
pub fn response_g_reduced(query: &ResponseQuery) -> Result<Estimate> {
    let (res, inner) = reduced_response(query, None)?;
    Estimate::from_integral(res, &inner, "response function G(k)")
}

/// `G(k)` in ħc·nm⁻⁵.
pub fn response_g(query: &ResponseQuery) -> Result<Estimate> {
    let factor = (-query.k * query.cavity.separation()).exp();
    Ok(response_g_reduced(query)?.scaled(factor))
}

/// `G(k)` with the corrugation wavevector rotated by `direction` (radians)
/// and the angular integral taken over the whole circle.
pub fn response_g_rotated(query: &ResponseQuery, direction: f64) -> Result<Estimate> {
    let (res, inner) = reduced_response(query, Some(direction))?;
    let factor = (-query.k * query.cavity.separation()).exp();
    Ok(Estimate::from_integral(res, &inner, "response function G(k)")?.scaled(factor))
}

/// `ρ(k) = G(k)/G(0)`; exactly 1 at `k = 0`.
pub fn rho(query: &ResponseQuery) -> Result<Estimate> {
    let g0 = response_g(&query.at_k(0.0))?;
    if query.k == 0.0 {
        return Ok(Estimate { value: 1.0, error: 0.0 });
    }
    let gk = response_g(query)?;
    Ok(gk.ratio(&g0))
}

/// Fitted `G(k) ≈ α k e^{-kL}` over a window of large `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoteFit {
    /// ħc·nm⁻⁴
    pub alpha: f64,
    pub fit_window: (f64, f64),
    /// Relative RMS deviation of the samples from the fitted law.
    pub residual: f64,
    /// The `(k, G(k))` samples used in the fit.
    pub samples: Vec<(f64, f64)>,
}

fn check_asymptotic_window(cavity: &CavityConfig, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CasimirError::InvalidWindow(format!("need 0 < k_min < k_max, got {window:?}")));
    }
    let l = cavity.separation();
    let lp = cavity.material().plasma_wavelength();
    if lo * l < 5.0 || lo * lp < 5.0 {
        return Err(CasimirError::InvalidWindow(format!(
            "asymptote needs kL ≥ 5 and kλ_P ≥ 5; k_min L = {:.3}, k_min λ_P = {:.3}",
            lo * l,
            lo * lp
        )));
    }
    Ok(())
}

/// Least-squares `α` minimizing the relative residual of `G ≈ α k e^{-kL}`
/// over `(k, G)` samples.
pub fn fit_asymptote_samples(separation: f64, samples: &[(f64, f64)]) -> Result<AsymptoteFit> {
    if samples.is_empty() {
        return Err(CasimirError::InvalidWindow("no samples".into()));
    }
    // Model/data ratios q_i = k e^{-kL}/G: minimize Σ(α q_i - 1)².
    let q: Vec<f64> = samples.iter().map(|&(k, g)| k * (-k * separation).exp() / g).collect();
    let alpha = q.iter().sum::<f64>() / q.iter().map(|x| x * x).sum::<f64>();
    let residual = (q.iter().map(|x| (alpha * x - 1.0).powi(2)).sum::<f64>() / q.len() as f64).sqrt();
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(AsymptoteFit {
        alpha,
        fit_window: (lo, hi),
        residual,
        samples: samples.to_vec(),
    })
}

/// Samples `G(k)` at `points` log-spaced wavenumbers of `k_window` and fits the asymptote.
pub fn fit_asymptote(
    cavity: &CavityConfig,
    k_window: (f64, f64),
    points: usize,
    quad: &QuadratureSpec,
) -> Result<AsymptoteFit> {
    check_asymptotic_window(cavity, k_window)?;
    let points = points.max(2);
    let ks: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            k_window.0 * (k_window.1 / k_window.0).powf(t)
        })
        .collect();
    let samples = crate::parallel::map(&ks, |&k| {
        response_g(&ResponseQuery::new(k, *cavity, *quad)).map(|g| (k, g.value))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    fit_asymptote_samples(cavity.separation(), &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::PlasmaMaterial;

    fn cavity(l: f64) -> CavityConfig {
        CavityConfig::new(l, PlasmaMaterial::gold()).unwrap()
    }

    #[test]
    fn fast_kernel_matches_amplitude_assembly() {
        let c = cavity(200.0);
        let kp = c.material().plasma_wavenumber();
        for (k1, k2, xi) in [
            ([0.004, 0.002], [-0.001, 0.002], 0.003),
            ([0.02, -0.01], [0.015, 0.007], 0.011),
            ([0.003, 0.0], [-0.0022, 0.0], 0.0005),
        ] {
            let general = kernel_b(&c, k1, k2, xi).unwrap();
            let one = Leg::new(kp, k1[0].hypot(k1[1]), xi, 200.0);
            let two = Leg::new(kp, k2[0].hypot(k2[1]), xi, 200.0);
            let (cos, _) = angle(k2, k1);
            let fast = kernel_reduced(kp, xi, 200.0, 0.0, &one, &two, cos);
            assert!(((fast - general) / general).abs() < 1e-12, "{fast} vs {general}");
        }
    }

    #[test]
    fn kernel_denominators_vanish_at_large_separation() {
        let m = PlasmaMaterial::gold();
        let (k1, k2, xi) = ([0.01, 0.0], [0.0, 0.02], 0.01);
        let l = 1e4;
        let c = CavityConfig::new(l, m).unwrap();
        let b = kernel_b(&c, k1, k2, xi).unwrap();
        let fwd = first_order_amplitudes(&m, &ScatteringChannel { k_in: k2, k_out: k1, xi_over_c: xi }).unwrap();
        let back = first_order_amplitudes(&m, &ScatteringChannel { k_in: k1, k_out: k2, xi_over_c: xi }).unwrap();
        let mut bare = 0.0;
        for p in Polarization::BOTH {
            for q in Polarization::BOTH {
                bare += fwd.get(q, p) * back.get(p, q);
            }
        }
        let kap = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1] + xi * xi).sqrt();
        let bare = bare * (-(kap(k1) + kap(k2)) * l).exp();
        assert!(((b - bare) / bare).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_symmetric_in_its_legs() {
        let c = cavity(150.0);
        let k1 = [0.006, 0.002];
        let k2 = [0.006 - 0.0052, 0.002];
        let a = kernel_b(&c, k1, k2, 0.004).unwrap();
        let b = kernel_b(&c, k2, k1, 0.004).unwrap();
        assert!(((a - b) / a).abs() < 1e-13);
    }

    #[test]
    fn synthetic_asymptote_is_recovered() {
        let (alpha, l) = (-3.7e-7, 200.0);
        let samples: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let k = 0.05 + 0.01 * i as f64;
                (k, alpha * k * (-k * l).exp())
            })
            .collect();
        let fit = fit_asymptote_samples(l, &samples).unwrap();
        assert!(((fit.alpha - alpha) / alpha).abs() < 1e-6);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn asymptote_window_is_validated() {
        let c = cavity(200.0);
        let q = QuadratureSpec::default();
        assert!(matches!(fit_asymptote(&c, (0.01, 0.02), 3, &q), Err(CasimirError::InvalidWindow(_))));
        assert!(matches!(fit_asymptote(&c, (0.08, 0.04), 3, &q), Err(CasimirError::InvalidWindow(_))));
    }

    #[test]
    fn zero_wavenumber_reproduces_curvature_of_energy() {
        let q = QuadratureSpec::default().with_rel_tol(1e-5);
        for l in [80.0, 300.0] {
            let c = cavity(l);
            let g0 = response_g(&ResponseQuery::new(0.0, c, q)).unwrap();
            let d2 = crate::lifshitz::d2_energy_per_area(&c, &q).unwrap();
            assert!((g0.value / d2.value - 1.0).abs() < 1e-3, "L={l}: {} vs {}", g0.value, d2.value);
        }
    }

    #[test]
    fn rho_at_experimental_wavenumber() {
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let r = rho(&ResponseQuery::new(0.0052, cavity(200.0), q)).unwrap();
        assert!((r.value - 0.84).abs() < 0.02, "{r:?}");
        assert_eq!(rho(&ResponseQuery::new(0.0, cavity(200.0), q)).unwrap().value, 1.0);
    }

    #[test]
    fn short_separation_stays_close_to_proximity_limit() {
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        for k in [0.002, 0.006, 0.01] {
            let r = rho(&ResponseQuery::new(k, cavity(50.0), q)).unwrap().value;
            assert!(r <= 1.0 && r > 0.95, "k={k}: {r}");
        }
    }

    #[test]
    fn larger_separation_deviates_more() {
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let rhos: Vec<f64> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&l| rho(&ResponseQuery::new(0.006, cavity(l), q)).unwrap().value)
            .collect();
        assert!(rhos.windows(2).all(|w| w[1] < w[0]), "{rhos:?}");
    }

    #[test]
    fn large_k_prefactor_grows_as_k_to_the_five_halves() {
        // Laplace estimate for kL, k λ_P ≫ 1: near-collinear TM paths along the
        // segment 0 < k' < k, each leg amplitude ∝ k, frequency range cut at
        // ω_P/c, transverse width √(k'(k-k')/(kL)): G ∝ k^{7/2} e^{-kL}.
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let c = cavity(200.0);
        let g = |k: f64| response_g_reduced(&ResponseQuery::new(k, c, q)).unwrap().value / k;
        let slope = (g(4.0) / g(2.0)).ln() / 2f64.ln();
        assert!((slope - 2.5).abs() < 0.1, "{slope}");
    }

    #[test]
    fn log_slope_approaches_minus_separation() {
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let c = cavity(200.0);
        let fit = fit_asymptote(&c, (0.5, 1.0), 3, &q).unwrap();
        let s = &fit.samples;
        let slope = ((s[2].1 / s[2].0) / (s[0].1 / s[0].0)).ln() / (s[2].0 - s[0].0);
        assert!((slope / -200.0 - 1.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn response_vanishes_at_large_k() {
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let g = response_g(&ResponseQuery::new(0.5, cavity(200.0), q)).unwrap();
        assert!(g.value < 0.0 && g.value > -1e-40);
    }

    proptest::proptest! {
        #[test]
        fn kernel_is_positive_and_symmetric(
            r1 in 0.0f64..0.05, t1 in 0.0f64..6.3,
            r2 in 0.0f64..0.05, t2 in 0.0f64..6.3,
            xi in 1e-5f64..0.05, l in 10.0f64..500.0,
        ) {
            let c = cavity(l);
            let k1 = [r1 * t1.cos(), r1 * t1.sin()];
            let k2 = [r2 * t2.cos(), r2 * t2.sin()];
            let a = kernel_b(&c, k1, k2, xi).unwrap();
            let b = kernel_b(&c, k2, k1, xi).unwrap();
            proptest::prop_assert!(a >= 0.0);
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn negative_k_is_rejected() {
        let q = ResponseQuery::new(-0.1, cavity(100.0), QuadratureSpec::default());
        assert!(response_g(&q).is_err());
    }
}

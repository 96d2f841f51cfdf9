//! Casimir energy per area between two flat plasma-model plates, its first
//! two derivatives in the separation, and the closed-form references.
//!
//! All values are in units of ħc (energy per area in ħc·nm⁻³).

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{require_positive, Result};
use crate::medium::{fresnel_parts, kappa, PlasmaMaterial, Polarization};
use crate::quad::{integrate_from, Exec, IntegralResult, QuadratureSpec};
use crate::Estimate;

/// Plane–plane cavity: two identical plates a distance `separation` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    separation: f64,
    material: PlasmaMaterial,
}

impl CavityConfig {
    pub fn new(separation: f64, material: PlasmaMaterial) -> Result<Self> {
        require_positive("separation L", separation)?;
        Ok(Self {
            separation,
            material,
        })
    }

    /// Mean separation `L` in nm.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn material(&self) -> &PlasmaMaterial {
        &self.material
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(separation, self.material)
    }

    /// Default scale of the `ξ/c` map: `max(ω_P/c, 1/L)`.
    pub(crate) fn frequency_scale(&self) -> f64 {
        self.material.plasma_wavenumber().max(1.0 / self.separation)
    }
}

/// `n`-th separation derivative of `ln(1 - r² e^{-2κL})` for `n = 0, 1, 2`.
fn log_term(order: u8, kap: f64, r: f64, separation: f64) -> f64 {
    let u = r * r * (-2.0 * kap * separation).exp();
    match order {
        0 => (-u).ln_1p(),
        1 => 2.0 * kap * u / (1.0 - u),
        _ => {
            let d = 1.0 - u;
            -4.0 * kap * kap * u / (d * d)
        }
    }
}

fn lifshitz_integral(config: &CavityConfig, quad: &QuadratureSpec, order: u8) -> Result<Estimate> {
    quad.validate()?;
    let kp = config.material.plasma_wavenumber();
    let l = config.separation;
    let outer = QuadratureSpec {
        transform_scale: Some(quad.transform_scale.unwrap_or_else(|| config.frequency_scale())),
        ..*quad
    };
    let inner = quad.inner().with_scale(1.0 / l);
    let failures = AtomicUsize::new(0);

    let over_k = |xi: f64| {
        let res = integrate_from(
            |k: f64| {
                let kap = kappa(k, xi);
                let s: f64 = Polarization::BOTH
                    .iter()
                    .map(|&p| log_term(order, kap, fresnel_parts(kp, k, xi, p), l))
                    .sum();
                k * s
            },
            0.0,
            &inner,
            Exec::Sequential,
        );
        if !res.converged {
            failures.fetch_add(1, Ordering::Relaxed);
        }
        res.value
    };
    let mut res = integrate_from(over_k, 0.0, &outer, Exec::Parallel);
    if failures.load(Ordering::Relaxed) > 0 {
        res.converged = false;
    }
    // (1/2π) ∫dξ/c · (1/2π) ∫k dk
    let res = res.scaled(1.0 / (4.0 * PI * PI));
    Estimate::from_integral(res, &inner, "plane-plane Lifshitz integral")
}

/// `e(L)`: Casimir energy per area, ħc·nm⁻³. Negative.
pub fn energy_per_area(config: &CavityConfig, quad: &QuadratureSpec) -> Result<Estimate> {
    lifshitz_integral(config, quad, 0)
}

/// `e'(L) = de/dL`, ħc·nm⁻⁴, by differentiating under the integral. Positive.
pub fn d1_energy_per_area(config: &CavityConfig, quad: &QuadratureSpec) -> Result<Estimate> {
    lifshitz_integral(config, quad, 1)
}

/// `e''(L)`, ħc·nm⁻⁵. Negative.
pub fn d2_energy_per_area(config: &CavityConfig, quad: &QuadratureSpec) -> Result<Estimate> {
    lifshitz_integral(config, quad, 2)
}

/// `-π²/(720 L³)`: perfect mirrors, ħc·nm⁻³.
pub fn perfect_mirror_energy(separation: f64) -> f64 {
    -PI.powi(2) / (720.0 * separation.powi(3))
}

/// `π²/(240 L⁴)`.
pub fn perfect_mirror_d1(separation: f64) -> f64 {
    PI.powi(2) / (240.0 * separation.powi(4))
}

/// `-π²/(60 L⁵)`.
pub fn perfect_mirror_d2(separation: f64) -> f64 {
    -PI.powi(2) / (60.0 * separation.powi(5))
}

/// `∫_0^∞ Li₃((1 + 2u²)⁻²) du`, the dimensionless constant of the
/// non-retarded surface-plasmon interaction.
pub fn plasmon_constant() -> f64 {
    static VALUE: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *VALUE.get_or_init(|| {
        // Li₃(z) = Σ zⁿ/n³ and ∫(1+v²)^(-2n) dv = (√π/2) Γ(2n-½)/Γ(2n).
        let n_max = 200_000usize;
        let mut ratio = PI.sqrt() / 2.0;
        let mut terms = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let nf = n as f64;
            terms.push(ratio / (nf * nf * nf));
            ratio *= (2.0 * nf - 0.5) * (2.0 * nf + 0.5) / ((2.0 * nf) * (2.0 * nf + 1.0));
        }
        let head: f64 = terms.iter().rev().sum();
        // Γ(2n-½)/Γ(2n) ≈ (2n)^(-1/2): tail Σ_{n>N} n^(-7/2)/√2 ≈ (2/5) N^(-5/2)/√2.
        let tail = 0.4 * (n_max as f64).powf(-2.5) / 2f64.sqrt();
        (head + tail) * (PI.sqrt() / 2.0) / 2f64.sqrt()
    })
}

/// Short-distance (`L ≪ λ_P`) plane–plane energy per area, `∝ 1/L²`.
pub fn plasmon_limit_energy(material: &PlasmaMaterial, separation: f64) -> f64 {
    -material.plasma_wavenumber() * plasmon_constant() / (16.0 * PI * PI * separation.powi(2))
}

/// Separation derivative of [`plasmon_limit_energy`].
pub fn plasmon_limit_d1(material: &PlasmaMaterial, separation: f64) -> f64 {
    material.plasma_wavenumber() * plasmon_constant() / (8.0 * PI * PI * separation.powi(3))
}

impl Estimate {
    /// Folds in the inner-integral tolerance and maps non-convergence to an error.
    pub(crate) fn from_integral(
        res: IntegralResult,
        inner: &QuadratureSpec,
        what: &'static str,
    ) -> Result<Self> {
        let error = res.error_estimate + inner.rel_tol * res.value.abs();
        if res.converged {
            Ok(Estimate {
                value: res.value,
                error,
            })
        } else {
            Err(crate::CasimirError::NotConverged {
                what,
                value: res.value,
                error,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-7)
    }

    #[test]
    fn perfect_mirror_scaling() {
        assert!((perfect_mirror_energy(200.0) / perfect_mirror_energy(100.0) - 0.125).abs() < 1e-15);
        let e = perfect_mirror_energy(100.0);
        assert!((e + PI * PI / 720e6).abs() < 1e-20);
    }

    #[test]
    fn near_perfect_mirror_energy() {
        let cfg = CavityConfig::new(1000.0, PlasmaMaterial::new(1.0).unwrap()).unwrap();
        let e = energy_per_area(&cfg, &quad()).unwrap();
        let ratio = e.value / perfect_mirror_energy(1000.0);
        assert!((ratio - 1.0).abs() < 5e-3, "ratio {ratio}");
        assert!(ratio < 1.0);
        let d1 = d1_energy_per_area(&cfg, &quad()).unwrap();
        assert!((d1.value / perfect_mirror_d1(1000.0) - 1.0).abs() < 5e-3);
        let d2 = d2_energy_per_area(&cfg, &quad()).unwrap();
        assert!((d2.value / perfect_mirror_d2(1000.0) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn signs_and_bound() {
        for l in [20.0, 200.0, 2000.0] {
            let cfg = CavityConfig::new(l, PlasmaMaterial::gold()).unwrap();
            let e = energy_per_area(&cfg, &quad()).unwrap().value;
            let d1 = d1_energy_per_area(&cfg, &quad()).unwrap().value;
            let d2 = d2_energy_per_area(&cfg, &quad()).unwrap().value;
            assert!(e < 0.0 && d1 > 0.0 && d2 < 0.0);
            assert!(e.abs() <= perfect_mirror_energy(l).abs());
        }
    }

    #[test]
    fn energy_vanishes_at_large_separation() {
        let cfg = CavityConfig::new(1e7, PlasmaMaterial::gold()).unwrap();
        let e = energy_per_area(&cfg, &quad()).unwrap().value;
        assert!(e.abs() < 1e-22);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let cfg = CavityConfig::new(200.0, PlasmaMaterial::gold()).unwrap();
        let q = QuadratureSpec::default().with_rel_tol(1e-9);
        let h = 200.0 / 200.0;
        let e = |l: f64| energy_per_area(&cfg.with_separation(l).unwrap(), &q).unwrap().value;
        let d1 = |l: f64| d1_energy_per_area(&cfg.with_separation(l).unwrap(), &q).unwrap().value;
        let l = 200.0;
        let fd1 = (e(l - 2.0 * h) - 8.0 * e(l - h) + 8.0 * e(l + h) - e(l + 2.0 * h)) / (12.0 * h);
        let fd2 = (-e(l - 2.0 * h) + 16.0 * e(l - h) - 30.0 * e(l) + 16.0 * e(l + h) - e(l + 2.0 * h))
            / (12.0 * h * h);
        let a1 = d1(l);
        let a2 = d2_energy_per_area(&cfg, &q).unwrap().value;
        assert!(((fd1 - a1) / a1).abs() < 1e-5, "{fd1} vs {a1}");
        assert!(((fd2 - a2) / a2).abs() < 1e-3, "{fd2} vs {a2}");
        let fd12 = (d1(l - 2.0 * h) - 8.0 * d1(l - h) + 8.0 * d1(l + h) - d1(l + 2.0 * h)) / (12.0 * h);
        assert!(((fd12 - a2) / a2).abs() < 1e-5, "{fd12} vs {a2}");
    }

    #[test]
    fn plasmon_limit_matches_short_distances() {
        let m = PlasmaMaterial::gold();
        let l = 0.5;
        let cfg = CavityConfig::new(l, m).unwrap();
        let e = energy_per_area(&cfg, &quad()).unwrap().value;
        let pl = plasmon_limit_energy(&m, l);
        assert!((e / pl - 1.0).abs() < 0.03, "ratio {}", e / pl);
    }

    #[test]
    fn plasmon_constant_by_quadrature() {
        // Direct quadrature of Li₃ with its defining series.
        let li3 = |z: f64| {
            let mut s = 0.0;
            let mut zn = z;
            let mut n = 1.0f64;
            while zn > 1e-18 && n < 2e6 {
                s += zn / (n * n * n);
                n += 1.0;
                zn *= z;
            }
            s
        };
        let q = QuadratureSpec::default().with_rel_tol(1e-8);
        let r = crate::quad::integrate_semi_infinite(|u| li3((1.0 + 2.0 * u * u).powi(-2)), &q);
        assert!((r.value - plasmon_constant()).abs() < 1e-6, "{} vs {}", r.value, plasmon_constant());
    }
}

//! Plasma-model metal and its specular reflection at imaginary frequency.

use std::f64::consts::PI;

use crate::error::{require_non_negative, require_positive, CasimirError, Result};

/// A metal described by the plasma model, `ε(iξ) = 1 + ω_P²/ξ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaMaterial {
    plasma_wavelength: f64,
    plasma_wavenumber: f64,
}

impl PlasmaMaterial {
    /// Plasma wavelength of gold-covered plates, in nm.
    pub const GOLD_PLASMA_WAVELENGTH: f64 = 136.0;

    pub fn new(plasma_wavelength: f64) -> Result<Self> {
        require_positive("plasma wavelength", plasma_wavelength)?;
        Ok(Self {
            plasma_wavelength,
            plasma_wavenumber: 2.0 * PI / plasma_wavelength,
        })
    }

    pub fn gold() -> Self {
        Self::new(Self::GOLD_PLASMA_WAVELENGTH).expect("positive constant")
    }

    /// `λ_P` in nm.
    pub fn plasma_wavelength(&self) -> f64 {
        self.plasma_wavelength
    }

    /// `ω_P / c = 2π/λ_P` in nm⁻¹.
    pub fn plasma_wavenumber(&self) -> f64 {
        self.plasma_wavenumber
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TE, Polarization::TM];

    pub(crate) fn index(self) -> usize {
        match self {
            Polarization::TE => 0,
            Polarization::TM => 1,
        }
    }
}

/// One field mode between the plates: lateral wavenumber, imaginary
/// frequency (as `ξ/c`) and polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub k: f64,
    pub xi_over_c: f64,
    pub polarization: Polarization,
}

impl Mode {
    pub fn new(k: f64, xi_over_c: f64, polarization: Polarization) -> Result<Self> {
        require_non_negative("lateral wavenumber", k)?;
        require_non_negative("xi/c", xi_over_c)?;
        Ok(Self {
            k,
            xi_over_c,
            polarization,
        })
    }

    pub fn kappa(&self) -> f64 {
        kappa(self.k, self.xi_over_c)
    }
}

/// `ε(iξ)`; undefined in the static limit.
pub fn epsilon_imag(material: &PlasmaMaterial, xi_over_c: f64) -> Result<f64> {
    if xi_over_c == 0.0 {
        return Err(CasimirError::StaticLimit);
    }
    require_positive("xi/c", xi_over_c)?;
    let ratio = material.plasma_wavenumber / xi_over_c;
    Ok(1.0 + ratio * ratio)
}

/// Axial decay constant in vacuum, `√(k² + ξ²/c²)`.
pub fn kappa(k: f64, xi_over_c: f64) -> f64 {
    k.hypot(xi_over_c)
}

/// Axial decay constant inside the metal, `√(k² + ε ξ²/c²) = √(κ² + (ω_P/c)²)`.
pub fn kappa_medium(material: &PlasmaMaterial, k: f64, xi_over_c: f64) -> f64 {
    kappa(k, xi_over_c).hypot(material.plasma_wavenumber)
}

/// Specular reflection amplitude `r_p(k, iξ)`, real at imaginary frequency.
///
/// Both amplitudes are evaluated in forms free of cancellation and of the
/// `ε → ∞` divergence, so `ξ = 0` with `k > 0` is allowed.
pub fn fresnel(material: &PlasmaMaterial, mode: &Mode) -> f64 {
    fresnel_parts(material.plasma_wavenumber, mode.k, mode.xi_over_c, mode.polarization)
}

pub(crate) fn fresnel_parts(kp: f64, k: f64, xi: f64, polarization: Polarization) -> f64 {
    let kp2 = kp * kp;
    let kap = kappa(k, xi);
    let kap_m = kap.hypot(kp);
    match polarization {
        // (κ − κ_m)/(κ + κ_m), with κ² − κ_m² = −(ω_P/c)².
        Polarization::TE => {
            let den = kap + kap_m;
            if den == 0.0 {
                return 0.0;
            }
            -kp2 / (den * den)
        }
        // (εκ − κ_m)/(εκ + κ_m) multiplied through by ξ².
        Polarization::TM => {
            let xi2 = xi * xi;
            let e = xi2 + kp2;
            let den = e * kap + xi2 * kap_m;
            if den == 0.0 {
                return if kp2 > 0.0 { 1.0 } else { 0.0 };
            }
            kp2 * (xi2 * e + k * k * (e + xi2)) / (den * den)
        }
    }
}

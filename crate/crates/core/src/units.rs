//! Unit conventions.
//!
//! Lengths are in nm, wavenumbers in nm⁻¹. Energies per area are carried in
//! units of ħc·nm⁻³ and converted only when a force in pN is reported.

/// ħc in J·m (CODATA 2018).
pub const HBAR_C_J_M: f64 = 3.161_526_77e-26;

/// ħc in pN·nm², i.e. the force in pN for a value of 1 ħc·nm⁻².
pub const HBAR_C_PN_NM2: f64 = HBAR_C_J_M * 1e30;

/// Converts a force expressed in ħc·nm⁻² to piconewtons.
pub fn to_piconewton(force_hbar_c_per_nm2: f64) -> f64 {
    force_hbar_c_per_nm2 * HBAR_C_PN_NM2
}

//! First-order non-specular reflection amplitudes of a corrugated
//! plasma-model mirror at imaginary frequency.
//!
//! A profile `h(r)` (positive where the gap narrows) with Fourier transform
//! `H(q) = ∫d²r e^{-iq·r} h(r)` scatters a wave `(k_in, p)` into
//! `(k_out, p')` with amplitude `R_{p'p}(k_out, k_in) H(k_out - k_in)`.
//! The amplitudes are written as `R = 2 κ_in α`, where the reduced matrix
//! `α` is reciprocal, `α_{p'p}(k_out, k_in) = α_{pp'}(k_in, k_out)`, once the
//! sign of the TE/TM cross entries follows the signed scattering angle.
//!
//! At zero momentum transfer `R_{pp}(k, k) = 2κ r_p(k)`, which is the first
//! order change of `r_p` when the mirror is displaced rigidly toward the
//! cavity.

use crate::error::{require_positive, Result};
use crate::medium::{kappa, PlasmaMaterial, Polarization};

/// In- and out-going lateral wavevectors at a given imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringChannel {
    pub k_in: [f64; 2],
    pub k_out: [f64; 2],
    pub xi_over_c: f64,
}

/// Amplitudes per unit profile height (nm⁻¹), indexed `[p_out][p_in]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonSpecMatrix {
    pub entries: [[f64; 2]; 2],
}

impl NonSpecMatrix {
    pub fn get(&self, p_out: Polarization, p_in: Polarization) -> f64 {
        self.entries[p_out.index()][p_in.index()]
    }
}

/// Quantities of one lateral wavevector that the amplitudes reuse.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    pub k: f64,
    pub kappa: f64,
    pub kappa_m: f64,
    /// `κ + κ_m`
    pub te_den: f64,
    /// `(ξ² + ω_P²/c²) κ + ξ² κ_m`, i.e. `ξ²(εκ + κ_m)`
    pub tm_den: f64,
}

impl Side {
    pub fn new(kp: f64, k: f64, xi: f64) -> Self {
        let kap = kappa(k, xi);
        let kap_m = kap.hypot(kp);
        let xi2 = xi * xi;
        Side {
            k,
            kappa: kap,
            kappa_m: kap_m,
            te_den: kap + kap_m,
            tm_den: (xi2 + kp * kp) * kap + xi2 * kap_m,
        }
    }
}

/// Reduced amplitudes `α` for the pair, given `cos φ` and `sin φ` of the
/// signed angle from `k_in` to `k_out`. Returned as `[p_out][p_in]`.
pub(crate) fn reduced(kp: f64, xi: f64, out: &Side, inp: &Side, cos: f64, sin: f64) -> [[f64; 2]; 2] {
    let kp2 = kp * kp;
    let xi2 = xi * xi;
    let e = xi2 + kp2;
    let te_te = -kp2 * cos / (out.te_den * inp.te_den);
    let tm_tm = kp2 * (xi2 * out.kappa_m * inp.kappa_m * cos + e * out.k * inp.k) / (out.tm_den * inp.tm_den);
    let te_tm = kp2 * xi * inp.kappa_m * sin / (out.te_den * inp.tm_den);
    let tm_te = -kp2 * xi * out.kappa_m * sin / (out.tm_den * inp.te_den);
    [[te_te, te_tm], [tm_te, tm_tm]]
}

/// Unit-vector geometry between two lateral wavevectors. A zero vector
/// borrows the direction of the other one.
pub(crate) fn angle(k_in: [f64; 2], k_out: [f64; 2]) -> (f64, f64) {
    let ni = k_in[0].hypot(k_in[1]);
    let no = k_out[0].hypot(k_out[1]);
    if ni == 0.0 || no == 0.0 {
        return (1.0, 0.0);
    }
    let cos = (k_in[0] * k_out[0] + k_in[1] * k_out[1]) / (ni * no);
    let sin = (k_in[0] * k_out[1] - k_in[1] * k_out[0]) / (ni * no);
    (cos.clamp(-1.0, 1.0), sin.clamp(-1.0, 1.0))
}

/// First-order non-specular amplitudes `R_{p'p}(k_out, k_in; iξ)`.
pub fn first_order_amplitudes(material: &PlasmaMaterial, channel: &ScatteringChannel) -> Result<NonSpecMatrix> {
    require_positive("xi/c", channel.xi_over_c)?;
    let kp = material.plasma_wavenumber();
    let xi = channel.xi_over_c;
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let inp = Side::new(kp, norm(channel.k_in), xi);
    let out = Side::new(kp, norm(channel.k_out), xi);
    let (cos, sin) = angle(channel.k_in, channel.k_out);
    let alpha = reduced(kp, xi, &out, &inp, cos, sin);
    let scale = 2.0 * inp.kappa;
    Ok(NonSpecMatrix {
        entries: [
            [scale * alpha[0][0], scale * alpha[0][1]],
            [scale * alpha[1][0], scale * alpha[1][1]],
        ],
    })
}

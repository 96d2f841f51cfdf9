//! Lateral Casimir energy and force for sinusoidal corrugations, in the
//! plane–plane and plane–sphere geometries, with the proximity-force
//! comparators used to judge them.
//!
//! Profiles are `h1 = a1 cos(kx)` and `h2 = a2 cos(k(x - b))`. To order
//! `a1 a2` the plane–plane energy per area is `(a1 a2/2) cos(kb) G(k)`. The
//! sphere enters through the proximity approximation for curvature only:
//! `F_PS = π a1 a2 k R sin(kb) ∫_L^∞ (-G(k, L')) dL'`.

use std::f64::consts::PI;
use std::sync::Mutex;

use crate::error::{require_non_negative, require_positive, CasimirError, Result};
use crate::lifshitz::{d1_energy_per_area, perfect_mirror_d1, plasmon_limit_d1, CavityConfig};
use crate::medium::PlasmaMaterial;
use crate::quad::{adaptive, mapped, Exec, QuadratureSpec};
use crate::response::{response_g, response_g_reduced, ResponseQuery};
use crate::units::to_piconewton;
use crate::Estimate;

/// Beyond `L + TAIL_SPAN/k` the `L'` integrand is below `e^{-TAIL_SPAN}` of its start.
const TAIL_SPAN: f64 = 60.0;

/// Two sinusoidal corrugations of common period and lateral offset `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrugationPair {
    pub a1: f64,
    pub a2: f64,
    pub lambda_c: f64,
    pub k: f64,
    pub b: f64,
}

impl CorrugationPair {
    pub fn new(a1: f64, a2: f64, lambda_c: f64, b: f64) -> Result<Self> {
        require_positive("corrugation period", lambda_c)?;
        Self::build(a1, a2, lambda_c, 2.0 * PI / lambda_c, b)
    }

    pub fn from_wavenumber(a1: f64, a2: f64, k: f64, b: f64) -> Result<Self> {
        require_positive("corrugation wavenumber", k)?;
        Self::build(a1, a2, 2.0 * PI / k, k, b)
    }

    fn build(a1: f64, a2: f64, lambda_c: f64, k: f64, b: f64) -> Result<Self> {
        require_non_negative("amplitude a1", a1)?;
        require_non_negative("amplitude a2", a2)?;
        if !b.is_finite() {
            return Err(CasimirError::InvalidParameter(format!("offset b must be finite, got {b}")));
        }
        Ok(Self { a1, a2, lambda_c, k, b })
    }

    /// Same amplitudes at a new wavenumber, keeping `sin(kb) = 1`.
    pub fn at_peak(&self, k: f64) -> Result<Self> {
        Self::from_wavenumber(self.a1, self.a2, k, PI / (2.0 * k))
    }

    pub fn with_offset(&self, b: f64) -> Result<Self> {
        Self::build(self.a1, self.a2, self.lambda_c, self.k, b)
    }

    pub fn sin_kb(&self) -> f64 {
        (self.k * self.b).sin()
    }

    pub fn cos_kb(&self) -> f64 {
        (self.k * self.b).cos()
    }

    /// Whether the amplitudes are not small against `L`, `λ_C` and `λ_P`.
    pub fn large_amplitude(&self, separation: f64, material: &PlasmaMaterial) -> bool {
        let smallest = separation.min(self.lambda_c).min(material.plasma_wavelength());
        self.a1.max(self.a2) / smallest > 0.25
    }
}

/// Sphere of radius `radius` at closest distance `separation` from the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSetup {
    pub radius: f64,
    pub separation: f64,
}

impl SphereSetup {
    pub fn new(radius: f64, separation: f64) -> Result<Self> {
        require_positive("sphere radius", radius)?;
        require_positive("separation L", separation)?;
        Ok(Self { radius, separation })
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.radius, separation)
    }
}

/// Conditions under which a result should be read with caution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeFlag {
    /// `max(a1, a2) > 0.25 min(L, λ_C, λ_P)`
    LargeAmplitude,
    /// `R < 20 L`
    SmallSphere,
    /// `R L < 20 λ_C²`
    CurvatureMeetsCorrugation,
}

impl RegimeFlag {
    pub fn describe(&self) -> &'static str {
        match self {
            RegimeFlag::LargeAmplitude => "corrugation amplitude not small against L, lambda_C, lambda_P",
            RegimeFlag::SmallSphere => "sphere radius below 20 L",
            RegimeFlag::CurvatureMeetsCorrugation => "R L below 20 lambda_C^2",
        }
    }
}

fn regime_flags(setup: &SphereSetup, corr: &CorrugationPair, material: &PlasmaMaterial) -> Vec<RegimeFlag> {
    let mut flags = Vec::new();
    if corr.large_amplitude(setup.separation, material) {
        flags.push(RegimeFlag::LargeAmplitude);
    }
    if setup.radius < 20.0 * setup.separation {
        flags.push(RegimeFlag::SmallSphere);
    }
    if setup.radius * setup.separation < 20.0 * corr.lambda_c * corr.lambda_c {
        flags.push(RegimeFlag::CurvatureMeetsCorrugation);
    }
    flags
}

/// A plane–sphere force in pN.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceResult {
    pub value: f64,
    pub error_estimate: f64,
    pub regime_flags: Vec<RegimeFlag>,
}

/// `δE/A = (a1 a2/2) cos(kb) G(k)`, ħc·nm⁻³.
pub fn lateral_energy_pp(cavity: &CavityConfig, corr: &CorrugationPair, quad: &QuadratureSpec) -> Result<Estimate> {
    let g = response_g(&ResponseQuery::new(corr.k, *cavity, *quad))?;
    Ok(g.scaled(0.5 * corr.a1 * corr.a2 * corr.cos_kb()))
}

/// `F/A = -∂(δE/A)/∂b = (a1 a2/2) k sin(kb) G(k)`, ħc·nm⁻⁴.
pub fn lateral_force_pp(cavity: &CavityConfig, corr: &CorrugationPair, quad: &QuadratureSpec) -> Result<Estimate> {
    let g = response_g(&ResponseQuery::new(corr.k, *cavity, *quad))?;
    Ok(g.scaled(0.5 * corr.a1 * corr.a2 * corr.k * corr.sin_kb()))
}

/// How `∫_L^∞ G(k, L') dL'` is closed at large `L'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailMethod {
    /// Quadrature over the whole half-line.
    Direct,
    /// Quadrature up to `L + 60/k`, then `G(L_end)/k` for the exponential remainder.
    #[default]
    ExponentialTail,
}

/// `∫_L^∞ G dL'` for a response `g(L') = G(k, L') e^{k L'}`; the result
/// carries the `e^{-kL}` factor. ħc·nm⁻⁴.
pub fn tail_integral_with<G>(g: G, k: f64, separation: f64, quad: &QuadratureSpec, method: TailMethod) -> Result<Estimate>
where
    G: Fn(f64) -> Result<Estimate> + Sync,
{
    require_non_negative("corrugation wavenumber k", k)?;
    require_positive("separation L", separation)?;
    quad.validate()?;
    let failure: Mutex<Option<CasimirError>> = Mutex::new(None);
    let worst_rel = Mutex::new(0.0f64);
    // Integrand relative to e^{-kL}.
    let integrand = |lp: f64| -> f64 {
        match g(lp) {
            Ok(est) => {
                let mut w = worst_rel.lock().expect("poisoned");
                *w = w.max(est.relative_error());
                est.value * (-k * (lp - separation)).exp()
            }
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        }
    };
    // L' = L + L t/(1-t): a pure L'^{-n} decay becomes polynomial in t.
    let over_t = mapped(&integrand, separation, separation);
    let t_end = match method {
        TailMethod::ExponentialTail if k > 0.0 => {
            let span = TAIL_SPAN / k;
            span / (separation + span)
        }
        _ => 1.0,
    };
    let res = adaptive(&over_t, &[0.0, t_end], quad, Exec::Parallel);
    let mut value = res.value;
    let mut error = res.error_estimate;
    if t_end < 1.0 {
        let l_end = separation + TAIL_SPAN / k;
        let tail = integrand(l_end) / k;
        value += tail;
        error += tail.abs();
    }
    if let Some(e) = failure.lock().expect("poisoned").take() {
        return Err(e);
    }
    let error = error + *worst_rel.lock().expect("poisoned") * value.abs();
    let decay = (-k * separation).exp();
    let est = Estimate { value: value * decay, error: error * decay };
    if res.converged {
        Ok(est)
    } else {
        Err(CasimirError::NotConverged {
            what: "separation integral of G",
            value: est.value,
            error: est.error,
        })
    }
}

/// `∫_L^∞ G(k, L') dL'` for the plasma-model response.
pub fn tail_integral(
    k: f64,
    cavity: &CavityConfig,
    quad: &QuadratureSpec,
    method: TailMethod,
) -> Result<Estimate> {
    let inner = quad.inner();
    let g = |lp: f64| {
        let c = cavity.with_separation(lp)?;
        response_g_reduced(&ResponseQuery::new(k, c, inner))
    };
    tail_integral_with(g, k, cavity.separation(), quad, method)
}

/// `π a1 a2 k R sin(kb)` times `-∫_L^∞ G`, in pN.
fn sphere_force(setup: &SphereSetup, corr: &CorrugationPair, material: &PlasmaMaterial, minus_tail: Estimate) -> ForceResult {
    let prefactor = PI * corr.a1 * corr.a2 * corr.k * setup.radius * corr.sin_kb();
    let f = minus_tail.scaled(prefactor);
    ForceResult {
        value: to_piconewton(f.value),
        error_estimate: to_piconewton(f.error),
        regime_flags: regime_flags(setup, corr, material),
    }
}

/// Plane–sphere lateral force beyond the proximity approximation, pN.
pub fn lateral_force_ps(
    setup: &SphereSetup,
    corr: &CorrugationPair,
    material: &PlasmaMaterial,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let cavity = CavityConfig::new(setup.separation, *material)?;
    let tail = tail_integral(corr.k, &cavity, quad, TailMethod::default())?;
    Ok(sphere_force(setup, corr, material, tail.scaled(-1.0)))
}

/// Proximity-approximation force `π a1 a2 k R sin(kb) e'(L)`, pN.
pub fn pfa_lateral_force_ps(
    setup: &SphereSetup,
    corr: &CorrugationPair,
    material: &PlasmaMaterial,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let cavity = CavityConfig::new(setup.separation, *material)?;
    let d1 = d1_energy_per_area(&cavity, quad)?;
    Ok(sphere_force(setup, corr, material, d1))
}

/// Proximity-approximation force with perfect mirrors, pN.
pub fn pfa_perfect_force_ps(setup: &SphereSetup, corr: &CorrugationPair) -> f64 {
    let prefactor = PI * corr.a1 * corr.a2 * corr.k * setup.radius * corr.sin_kb();
    to_piconewton(prefactor * perfect_mirror_d1(setup.separation))
}

/// Proximity-approximation force in the short-distance plasmon regime, pN.
pub fn pfa_plasmon_force_ps(setup: &SphereSetup, corr: &CorrugationPair, material: &PlasmaMaterial) -> f64 {
    let prefactor = PI * corr.a1 * corr.a2 * corr.k * setup.radius * corr.sin_kb();
    to_piconewton(prefactor * plasmon_limit_d1(material, setup.separation))
}

/// One separation of a force-versus-distance sweep. Forces are divided by
/// `a1 a2 sin(kb)`, in pN·nm⁻².
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub separation: f64,
    pub exact: f64,
    pub exact_error: f64,
    pub pfa: f64,
    pub pfa_perfect: f64,
    pub pfa_plasmon: f64,
}

/// Exact and proximity-approximation forces at each separation in `separations`.
///
/// Rows come back in input order. The corrugation offset is ignored: every
/// column is normalized by `a1 a2 sin(kb)`.
pub fn force_vs_l_sweep(
    material: &PlasmaMaterial,
    corr: &CorrugationPair,
    radius: f64,
    separations: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<SweepRow>> {
    if separations.is_empty() {
        return Err(CasimirError::InvalidParameter("empty separation range".into()));
    }
    if separations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CasimirError::InvalidParameter("separations must be increasing".into()));
    }
    let corr = corr.at_peak(corr.k)?;
    let norm = corr.a1 * corr.a2;
    if norm == 0.0 {
        return Err(CasimirError::InvalidParameter("both amplitudes must be nonzero".into()));
    }
    let rows = crate::parallel::map(separations, |&l| -> Result<SweepRow> {
        let setup = SphereSetup::new(radius, l)?;
        let exact = lateral_force_ps(&setup, &corr, material, quad)?;
        let pfa = pfa_lateral_force_ps(&setup, &corr, material, quad)?;
        Ok(SweepRow {
            separation: l,
            exact: exact.value / norm,
            exact_error: exact.error_estimate / norm,
            pfa: pfa.value / norm,
            pfa_perfect: pfa_perfect_force_ps(&setup, &corr) / norm,
            pfa_plasmon: pfa_plasmon_force_ps(&setup, &corr, material) / norm,
        })
    });
    rows.into_iter().collect()
}

/// Result of a log–log straight-line fit `|F| ≈ C L^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS deviation in `ln |F|`.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares slope of `ln|F|` against `ln L` over points with `L` in `window`.
pub fn power_law_fit(table: &[(f64, f64)], window: (f64, f64)) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|(l, f)| *l >= window.0 && *l <= window.1 && *l > 0.0 && *f != 0.0)
        .map(|(l, f)| (l.ln(), f.abs().ln()))
        .collect();
    if pts.len() < 5 {
        return Err(CasimirError::InvalidWindow(format!(
            "power-law fit needs at least 5 points in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        residual,
        points: pts.len(),
    })
}

/// Location and size of the largest plane–sphere force over `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumK {
    pub k_opt: f64,
    pub force_max: f64,
    /// The coarse scan had more than one local maximum; `k_opt` refines the largest.
    pub non_unimodal: bool,
    pub scan: Vec<(f64, f64)>,
    pub evaluations: usize,
}

/// Maximizes `f` over `[k_lo, k_hi]`: a log-spaced scan of `points`
/// wavenumbers, then golden-section search in `ln k` around the best one
/// until the bracket is narrower than `rel_tol` in relative terms.
pub fn maximize_over_k<F>(f: F, k_lo: f64, k_hi: f64, points: usize, rel_tol: f64) -> Result<OptimumK>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    require_positive("k_lo", k_lo)?;
    if !(k_hi > k_lo) || points < 3 {
        return Err(CasimirError::InvalidParameter(format!(
            "need k_lo < k_hi and at least 3 scan points, got [{k_lo}, {k_hi}] with {points}"
        )));
    }
    let (u_lo, u_hi) = (k_lo.ln(), k_hi.ln());
    let du = (u_hi - u_lo) / (points - 1) as f64;
    let us: Vec<f64> = (0..points).map(|i| u_lo + du * i as f64).collect();
    let values = crate::parallel::map(&us, |&u| f(u.exp()))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = points;
    let scan: Vec<(f64, f64)> = us.iter().map(|u| u.exp()).zip(values.iter().copied()).collect();

    let best = (0..points).max_by(|&i, &j| values[i].total_cmp(&values[j])).expect("non-empty");
    let local_maxima = (0..points)
        .filter(|&i| {
            let left = i == 0 || values[i] > values[i - 1];
            let right = i + 1 == points || values[i] >= values[i + 1];
            left && right
        })
        .count();

    let (mut a, mut b) = (us[best.saturating_sub(1)], us[(best + 1).min(points - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    evaluations += 2;
    // Bracket width in ln k equals the relative width in k.
    while b - a > rel_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp())?;
        }
        evaluations += 1;
    }
    let (mut u_opt, mut f_opt) = if fc > fd { (c, fc) } else { (d, fd) };
    if values[best] > f_opt {
        u_opt = us[best];
        f_opt = values[best];
    }
    Ok(OptimumK {
        k_opt: u_opt.exp(),
        force_max: f_opt,
        non_unimodal: local_maxima > 1,
        scan,
        evaluations,
    })
}

/// Corrugation wavenumber maximizing the plane–sphere force at `sin(kb) = 1`.
///
/// The scan covers `0.1/L ≤ k ≤ 10/L`; the optimum is located to 1%.
pub fn optimum_k(
    material: &PlasmaMaterial,
    setup: &SphereSetup,
    a1: f64,
    a2: f64,
    quad: &QuadratureSpec,
) -> Result<OptimumK> {
    let l = setup.separation;
    let force = |k: f64| -> Result<f64> {
        let corr = CorrugationPair::from_wavenumber(a1, a2, k, PI / (2.0 * k))?;
        Ok(lateral_force_ps(setup, &corr, material, quad)?.value)
    };
    maximize_over_k(force, 0.1 / l, 10.0 / l, 13, 0.01)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold_cavity(l: f64) -> CavityConfig {
        CavityConfig::new(l, PlasmaMaterial::gold()).unwrap()
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(1e-5)
    }

    #[test]
    fn wavelength_and_wavenumber_agree() {
        for lc in [1200.0, 3.0, 1e5] {
            let c = CorrugationPair::new(1.0, 1.0, lc, 0.0).unwrap();
            assert!((c.k * c.lambda_c - 2.0 * PI).abs() < 1e-14);
        }
        let c = CorrugationPair::from_wavenumber(1.0, 1.0, 0.0052, 0.0).unwrap();
        assert!((c.k * c.lambda_c - 2.0 * PI).abs() < 1e-14);
        assert!(CorrugationPair::new(-1.0, 1.0, 10.0, 0.0).is_err());
        assert!(CorrugationPair::new(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn validity_flags() {
        let gold = PlasmaMaterial::gold();
        let corr = CorrugationPair::new(59.0, 8.0, 1200.0, 300.0).unwrap();
        let setup = SphereSetup::new(1e5, 221.0).unwrap();
        let flags = regime_flags(&setup, &corr, &gold);
        assert_eq!(flags, vec![RegimeFlag::LargeAmplitude, RegimeFlag::CurvatureMeetsCorrugation]);
        let small = CorrugationPair::new(5.0, 5.0, 50.0, 0.0).unwrap();
        let tight = SphereSetup::new(1000.0, 100.0).unwrap();
        assert_eq!(regime_flags(&tight, &small, &gold), vec![RegimeFlag::SmallSphere]);
    }

    #[test]
    fn energy_vanishes_at_quarter_period() {
        let corr = CorrugationPair::new(2.0, 3.0, 1000.0, 250.0).unwrap();
        let e = lateral_energy_pp(&gold_cavity(200.0), &corr, &quad()).unwrap();
        let aligned = lateral_energy_pp(&gold_cavity(200.0), &corr.with_offset(0.0).unwrap(), &quad()).unwrap();
        assert!(aligned.value < 0.0);
        assert!(e.value.abs() < 1e-12 * aligned.value.abs());
    }

    #[test]
    fn force_is_minus_offset_derivative_of_energy() {
        let cavity = gold_cavity(150.0);
        let q = quad();
        let lc = 900.0;
        let h = lc / 1e4;
        for b in [0.0, 100.0, 333.0] {
            let corr = CorrugationPair::new(2.0, 3.0, lc, b).unwrap();
            let e = |b: f64| lateral_energy_pp(&cavity, &corr.with_offset(b).unwrap(), &q).unwrap().value;
            let fd = -(e(b + h) - e(b - h)) / (2.0 * h);
            let f = lateral_force_pp(&cavity, &corr, &q).unwrap().value;
            let scale = lateral_force_pp(&cavity, &corr.with_offset(lc / 4.0).unwrap(), &q).unwrap().value;
            assert!((fd - f).abs() <= 1e-6 * scale.abs(), "b={b}: {fd} vs {f}");
        }
    }

    #[test]
    fn offset_force_restores_alignment() {
        let cavity = gold_cavity(200.0);
        let corr = CorrugationPair::new(2.0, 3.0, 1200.0, 100.0).unwrap();
        // 0 < kb < π: the force points toward smaller b.
        assert!(lateral_force_pp(&cavity, &corr, &quad()).unwrap().value < 0.0);
        let aligned = corr.with_offset(0.0).unwrap();
        assert_eq!(lateral_force_pp(&cavity, &aligned, &quad()).unwrap().value, 0.0);
    }

    #[test]
    fn synthetic_tail_integral() {
        // G(k, L') = A k e^{-kL'}: ∫_L^∞ G dL' = A e^{-kL}.
        let (amp, k, l) = (-2.5e-9, 0.01, 150.0);
        let g = |_lp: f64| Ok(Estimate { value: amp * k, error: 0.0 });
        for method in [TailMethod::Direct, TailMethod::ExponentialTail] {
            let r = tail_integral_with(g, k, l, &quad(), method).unwrap();
            let exact = amp * (-k * l).exp();
            assert!(((r.value - exact) / exact).abs() < 1e-6, "{method:?}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn tail_integral_two_ways_agree() {
        let cavity = gold_cavity(221.0);
        let q = QuadratureSpec::default().with_rel_tol(1e-4);
        let a = tail_integral(0.0052, &cavity, &q, TailMethod::Direct).unwrap();
        let b = tail_integral(0.0052, &cavity, &q, TailMethod::ExponentialTail).unwrap();
        assert!((a.value - b.value).abs() <= a.error + b.error, "{a:?} vs {b:?}");
    }

    #[test]
    fn tail_at_zero_k_is_first_derivative() {
        // ∫_L^∞ e''(L') dL' = -e'(L)
        let cavity = gold_cavity(300.0);
        let q = QuadratureSpec::default().with_rel_tol(1e-5);
        let t = tail_integral(0.0, &cavity, &q, TailMethod::Direct).unwrap();
        let d1 = d1_energy_per_area(&cavity, &q).unwrap();
        assert!((t.value / -d1.value - 1.0).abs() < 1e-4, "{} vs {}", t.value, -d1.value);
    }

    #[test]
    fn perfect_mirror_comparator_closed_form() {
        let setup = SphereSetup::new(1e5, 221.0).unwrap();
        let corr = CorrugationPair::new(59.0, 8.0, 1200.0, 300.0).unwrap();
        let f = pfa_perfect_force_ps(&setup, &corr);
        let closed = PI.powi(3) * crate::units::HBAR_C_PN_NM2 * 59.0 * 8.0 * corr.k * 1e5 / (240.0 * 221f64.powi(4));
        assert!((f / closed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_recovers_pure_exponents() {
        for n in [-4.0, -3.0, -4.1] {
            let table: Vec<(f64, f64)> = (0..8).map(|i| 150.0 + 20.0 * i as f64).map(|l| (l, 3.7 * l.powf(n))).collect();
            let fit = power_law_fit(&table, (150.0, 300.0)).unwrap();
            assert!((fit.exponent - n).abs() < 1e-6);
            assert!((fit.prefactor / 3.7 - 1.0).abs() < 1e-6);
        }
        let short = [(1.0, 1.0), (2.0, 0.5)];
        assert!(matches!(power_law_fit(&short, (0.0, 10.0)), Err(CasimirError::InvalidWindow(_))));
    }

    #[test]
    fn synthetic_kernel_optimum() {
        // G = A k e^{-kL'} makes the force ∝ k ∫_L^∞ G dL' = A k e^{-kL}: maximal at k = 1/L.
        let (amp, l) = (-1e-9, 221.0);
        let force = |k: f64| -> Result<f64> {
            let g = |_lp: f64| Ok(Estimate { value: amp * k, error: 0.0 });
            Ok(-k * tail_integral_with(g, k, l, &quad(), TailMethod::ExponentialTail)?.value)
        };
        let opt = maximize_over_k(force, 0.1 / l, 10.0 / l, 13, 0.01).unwrap();
        assert!((opt.k_opt * l - 1.0).abs() < 0.01, "k_opt L = {}", opt.k_opt * l);
        assert!(!opt.non_unimodal);
    }

    #[test]
    fn bimodal_scan_is_flagged() {
        let f = |k: f64| Ok((-(k.ln() - 0.0).powi(2)).exp() + 2.0 * (-(k.ln() - 3.0).powi(2)).exp());
        let opt = maximize_over_k(f, (-2.0f64).exp(), 5f64.exp(), 15, 1e-3).unwrap();
        assert!(opt.non_unimodal);
        assert!((opt.k_opt.ln() - 3.0).abs() < 0.05);
    }

    #[test]
    fn sweep_rejects_unsorted_range() {
        let corr = CorrugationPair::new(59.0, 8.0, 1200.0, 300.0).unwrap();
        let gold = PlasmaMaterial::gold();
        assert!(force_vs_l_sweep(&gold, &corr, 1e5, &[200.0, 150.0], &quad()).is_err());
        assert!(force_vs_l_sweep(&gold, &corr, 1e5, &[], &quad()).is_err());
    }
}

use std::fmt::Write as _;

use casimir_lateral::lateral::{
    force_vs_l_sweep, lateral_force_ps, pfa_lateral_force_ps, power_law_fit, CorrugationPair, ForceResult,
    SphereSetup,
};
use casimir_lateral::lifshitz::{
    d1_energy_per_area, d2_energy_per_area, energy_per_area, perfect_mirror_d1, perfect_mirror_d2,
    perfect_mirror_energy, CavityConfig,
};
use casimir_lateral::medium::PlasmaMaterial;
use casimir_lateral::parallel;
use casimir_lateral::quad::QuadratureSpec;
use casimir_lateral::response::{response_g, ResponseQuery};
use casimir_lateral::{CasimirError, Estimate};

use crate::config::{spaced, RunConfig};

#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    NotConverged(String),
}

impl From<CasimirError> for CmdError {
    fn from(e: CasimirError) -> Self {
        match e {
            CasimirError::NotConverged { .. } => CmdError::NotConverged(e.to_string()),
            other => CmdError::Usage(other.to_string()),
        }
    }
}

impl From<String> for CmdError {
    fn from(s: String) -> Self {
        CmdError::Usage(s)
    }
}

type Out = Result<String, CmdError>;

/// Nine significant digits.
fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn material(cfg: &RunConfig) -> Result<PlasmaMaterial, CmdError> {
    Ok(PlasmaMaterial::new(cfg.lambda_p)?)
}

fn quad(cfg: &RunConfig) -> Result<QuadratureSpec, CmdError> {
    let q = QuadratureSpec::default().with_rel_tol(cfg.rel_tol);
    q.validate()?;
    Ok(q)
}

fn corrugation(cfg: &RunConfig, k: f64) -> Result<CorrugationPair, CmdError> {
    let c = CorrugationPair::from_wavenumber(cfg.a1, cfg.a2, k, 0.0)?;
    Ok(match cfg.b {
        Some(b) => c.with_offset(b)?,
        None => c.at_peak(k)?,
    })
}

fn parameter_footer(out: &mut String, cfg: &RunConfig) {
    let _ = writeln!(out, "# lambda_P_nm = {}", cfg.lambda_p);
    let _ = writeln!(out, "# rel_tol = {}", cfg.rel_tol);
}

fn flags_footer(out: &mut String, f: &ForceResult) {
    for flag in &f.regime_flags {
        let _ = writeln!(out, "# caution: {}", flag.describe());
    }
}

fn collect<T>(rows: Vec<casimir_lateral::Result<T>>) -> Result<Vec<T>, CmdError> {
    rows.into_iter().map(|r| r.map_err(CmdError::from)).collect()
}

pub fn rho(cfg: &RunConfig) -> Out {
    let cavity = CavityConfig::new(cfg.separation, material(cfg)?)?;
    let q = quad(cfg)?;
    let ks = spaced(
        cfg.k_min.unwrap_or(0.0),
        cfg.k_max.unwrap_or(0.03),
        cfg.points.unwrap_or(31),
        cfg.log_spacing.unwrap_or(false),
    )?;
    let g0 = response_g(&ResponseQuery::new(0.0, cavity, q))?;
    let rows = collect(parallel::map(&ks, |&k| -> casimir_lateral::Result<Estimate> {
        if k == 0.0 {
            return Ok(Estimate { value: 1.0, error: 0.0 });
        }
        Ok(response_g(&ResponseQuery::new(k, cavity, q))?.ratio(&g0))
    }))?;
    let mut out = String::from("k_nm_inv,rho,rho_error\n");
    for (k, r) in ks.iter().zip(&rows) {
        let _ = writeln!(out, "{},{},{}", num(*k), num(r.value), num(r.error));
    }
    parameter_footer(&mut out, cfg);
    let _ = writeln!(out, "# L_nm = {}", cfg.separation);
    Ok(out)
}

pub fn force_vs_k(cfg: &RunConfig) -> Out {
    let m = material(cfg)?;
    let q = quad(cfg)?;
    let setup = SphereSetup::new(cfg.radius, cfg.separation)?;
    let ks = spaced(
        cfg.k_min.unwrap_or(0.001),
        cfg.k_max.unwrap_or(0.03),
        cfg.points.unwrap_or(30),
        cfg.log_spacing.unwrap_or(false),
    )?;
    let corrs = ks.iter().map(|&k| corrugation(cfg, k)).collect::<Result<Vec<_>, _>>()?;
    let rows = collect(parallel::map(&corrs, |c| -> casimir_lateral::Result<(ForceResult, ForceResult)> {
        Ok((lateral_force_ps(&setup, c, &m, &q)?, pfa_lateral_force_ps(&setup, c, &m, &q)?))
    }))?;
    let peak = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.value.abs().total_cmp(&b.1 .0.value.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = String::from("k_nm_inv,F_exact_pN,F_pfa_pN,error_pN,peak\n");
    for (i, (k, (exact, pfa))) in ks.iter().zip(&rows).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(*k),
            num(exact.value),
            num(pfa.value),
            num(exact.error_estimate),
            u8::from(i == peak)
        );
    }
    parameter_footer(&mut out, cfg);
    let _ = writeln!(out, "# L_nm = {}", cfg.separation);
    let _ = writeln!(out, "# R_nm = {}, a1_nm = {}, a2_nm = {}", cfg.radius, cfg.a1, cfg.a2);
    match cfg.b {
        Some(b) => {
            let _ = writeln!(out, "# b_nm = {b}");
        }
        None => out.push_str("# sin(kb) = 1 on every row\n"),
    }
    let _ = writeln!(out, "# peak k_nm_inv = {}", num(ks[peak]));
    if let Some((exact, _)) = rows.get(peak) {
        flags_footer(&mut out, exact);
    }
    Ok(out)
}

pub fn force_vs_l(cfg: &RunConfig) -> Out {
    let m = material(cfg)?;
    let q = quad(cfg)?;
    let ls = spaced(cfg.l_min, cfg.l_max, cfg.points.unwrap_or(31), cfg.log_spacing.unwrap_or(true))?;
    let corr = corrugation(cfg, cfg.k)?;
    let rows = force_vs_l_sweep(&m, &corr, cfg.radius, &ls, &q)?;
    let mut out = String::from("L_nm,F_exact_norm,F_pfa_norm,F_pfa_perfect_norm,F_pfa_plasmon_norm\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.separation),
            num(r.exact),
            num(r.pfa),
            num(r.pfa_perfect),
            num(r.pfa_plasmon)
        );
    }
    parameter_footer(&mut out, cfg);
    let _ = writeln!(out, "# k_nm_inv = {}, R_nm = {}", num(cfg.k), cfg.radius);
    out.push_str("# forces in pN/nm^2, divided by a1 a2 sin(kb)\n");
    let table: Vec<(f64, f64)> = rows.iter().map(|r| (r.separation, r.exact)).collect();
    match power_law_fit(&table, (cfg.fit_min, cfg.fit_max)) {
        Ok(fit) => {
            let _ = writeln!(
                out,
                "# fit window {}-{} nm: exponent = {:.4}, log residual = {:.2e}, points = {}",
                cfg.fit_min, cfg.fit_max, fit.exponent, fit.residual, fit.points
            );
        }
        Err(e) => {
            let _ = writeln!(out, "# fit window {}-{} nm: {e}", cfg.fit_min, cfg.fit_max);
        }
    }
    Ok(out)
}

pub fn plane_plane(cfg: &RunConfig) -> Out {
    let l = cfg.separation;
    let cavity = CavityConfig::new(l, material(cfg)?)?;
    let q = quad(cfg)?;
    let e = energy_per_area(&cavity, &q)?;
    let d1 = d1_energy_per_area(&cavity, &q)?;
    let d2 = d2_energy_per_area(&cavity, &q)?;
    // Five-point second difference of the energy, at a tighter tolerance.
    let fine = q.with_rel_tol((cfg.rel_tol * 1e-3).max(QuadratureSpec::MIN_REL_TOL));
    let h = l / 100.0;
    let energies = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|s| Ok(energy_per_area(&cavity.with_separation(l + s * h)?, &fine)?.value))
        .collect::<Result<Vec<f64>, CasimirError>>()?;
    let fd2 = (-energies[0] + 16.0 * energies[1] - 30.0 * energies[2] + 16.0 * energies[3] - energies[4]) / (12.0 * h * h);

    let mut out = String::new();
    let _ = writeln!(out, "lambda_P = {} nm, L = {} nm, rel_tol = {}", cfg.lambda_p, l, cfg.rel_tol);
    let _ = writeln!(out, "quantity,value,error,perfect_mirror,ratio");
    for (name, est, pm) in [
        ("e_hbar_c_nm-3", e, perfect_mirror_energy(l)),
        ("de_dL_hbar_c_nm-4", d1, perfect_mirror_d1(l)),
        ("d2e_dL2_hbar_c_nm-5", d2, perfect_mirror_d2(l)),
    ] {
        let _ = writeln!(out, "{name},{},{},{},{}", num(est.value), num(est.error), num(pm), num(est.value / pm));
    }
    let _ = writeln!(out, "# finite-difference d2e/dL2 = {} (relative deviation {:.2e})", num(fd2), (fd2 / d2.value - 1.0).abs());
    Ok(out)
}

pub fn plane_sphere(cfg: &RunConfig) -> Out {
    let m = material(cfg)?;
    let q = quad(cfg)?;
    let setup = SphereSetup::new(cfg.radius, cfg.separation)?;
    let corr = corrugation(cfg, cfg.k)?;
    let exact = lateral_force_ps(&setup, &corr, &m, &q)?;
    let pfa = pfa_lateral_force_ps(&setup, &corr, &m, &q)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "lambda_P = {} nm, L = {} nm, R = {} nm, lambda_C = {} nm, a1 = {} nm, a2 = {} nm, sin(kb) = {:.6}",
        cfg.lambda_p,
        cfg.separation,
        cfg.radius,
        cfg.lambda_c,
        cfg.a1,
        cfg.a2,
        corr.sin_kb()
    );
    let _ = writeln!(out, "quantity,value,error");
    let _ = writeln!(out, "F_exact_pN,{},{}", num(exact.value), num(exact.error_estimate));
    let _ = writeln!(out, "F_pfa_pN,{},{}", num(pfa.value), num(pfa.error_estimate));
    let _ = writeln!(out, "ratio,{},", num(exact.value / pfa.value));
    flags_footer(&mut out, &exact);
    Ok(out)
}

//! CSV emitters. Every number is written with 12 significant digits so that
//! identical runs give identical bytes.

use std::path::Path;

use anyhow::{Context, Result};
use dwphase::dynamics::StateTrajectory;
use dwphase::phase::PhaseStats;
use dwphase::{LocalizedBasis, Spectrum};

pub const TRAJECTORY_COLUMNS: [&str; 17] = [
    "tau", "t", "C12", "S12", "dC", "dS", "dE_phi", "W", "dW", "dW_n", "d_SQL", "Sigma_p", "Sigma_w", "xi_n",
    "Sigma_n", "P1", "P2",
];

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

/// One row per sample. `tunneling` holds `(P1, P2)` where they apply.
pub fn write_trajectory(
    path: &Path,
    traj: &StateTrajectory,
    stats: &[PhaseStats],
    tunneling: Option<&(Vec<f64>, Vec<f64>)>,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_COLUMNS)?;
    for (k, s) in stats.iter().enumerate() {
        let (p1, p2) = match tunneling {
            Some((p1, p2)) => (Some(p1[k]), Some(p2[k])),
            None => (None, None),
        };
        w.write_record([
            num(traj.taus[k]),
            num(s.t),
            num(s.c),
            num(s.s),
            num(s.d_c),
            num(s.d_s),
            num(s.d_e_phi),
            num(s.w),
            num(s.d_w),
            num(s.d_w_n),
            num(s.d_sql),
            num(s.sigma_p),
            num(s.sigma_w),
            opt(s.xi_n),
            opt(s.sigma_n),
            opt(p1),
            opt(p2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_couplings(path: &Path, rows: &[(f64, dwphase::Couplings)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["r0", "U0", "U_lr"])?;
    for (r0, c) in rows {
        w.write_record([num(*r0), num(c.u0()), num(c.u_lr)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_eigen(path: &Path, spectrum: &Spectrum, basis: &LocalizedBasis) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["z", "psi0", "psi1", "psi_l", "psi_r"])?;
    let (psi0, psi1) = (&spectrum.wavefunctions[0], &spectrum.wavefunctions[1]);
    for k in 0..basis.grid.n_points() {
        w.write_record([
            num(basis.grid.point(k)),
            num(psi0[k]),
            num(psi1[k]),
            num(basis.psi_l[k]),
            num(basis.psi_r[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows of already formatted fields.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.1), "1.00000000000e-1");
        assert_eq!(num(-1234.5678901234), "-1.23456789012e3");
        assert_eq!(num(0.0), "0.00000000000e0");
    }

    #[test]
    fn optional_fields_are_empty() {
        assert_eq!(opt(None), "");
        assert_eq!(opt(Some(2.0)), "2.00000000000e0");
    }
}

//! On-site and inter-site interaction energies of the finite-range
//! `sech^2` potential, integrated over the transverse Gaussian ground state
//! and the localized axial states.
//!
//! With `u = z1 - z2` the axial part reduces to the density cross-correlation
//! `G_ij(u) = int rho_i(z) rho_j(z - u) dz`, evaluated exactly on the DVR grid
//! at integer lags and interpolated in between. The remaining `(u, rho)`
//! integral is done with composite Gauss-Legendre panels whose width tracks
//! the potential range `1 / kappa`.

use serde::{Deserialize, Serialize};

use crate::eigensolver::LocalizedBasis;
use crate::error::CouplingError;
use crate::model::{ScatteringLength, REDUCED_MASS};
use crate::quadrature::CompositeRule;

/// `kappa * r` beyond which `sech^2` is below `1e-21`.
const KERNEL_CUTOFF: f64 = 25.0;
const GL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    pub r0: f64,
    pub a_s: ScatteringLength,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

/// `alpha = sqrt(1 - 2 r0 / a_s)`, `beta = 1 + alpha`, `kappa = beta / r0`.
pub fn derive_interaction(r0: f64, a_s: ScatteringLength) -> Result<InteractionParams, CouplingError> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(CouplingError::ZeroRange(r0));
    }
    let ratio = a_s.range_ratio(r0);
    if ratio >= 1.0 {
        return Err(CouplingError::AlphaImaginary(ratio));
    }
    let alpha = match a_s {
        ScatteringLength::Unitarity => 1.0,
        ScatteringLength::Finite(_) => (1.0 - ratio).sqrt(),
    };
    if alpha >= 2.0 {
        return Err(CouplingError::AlphaOutOfRange(alpha));
    }
    let beta = 1.0 + alpha;
    Ok(InteractionParams { r0, a_s, alpha, beta, kappa: beta / r0 })
}

impl InteractionParams {
    /// Depth prefactor `kappa^2 / (alpha mu)` (with `hbar = 1`).
    pub fn depth(&self) -> f64 {
        self.kappa * self.kappa / (self.alpha * REDUCED_MASS)
    }

    /// `V(r) = -kappa^2 / (alpha mu) sech^2(kappa r)`.
    pub fn potential(&self, r: f64) -> f64 {
        -self.depth() * sech2(self.kappa * r)
    }
}

/// Overflow-free `sech^2(x)`.
pub(crate) fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub u_l: f64,
    pub u_r: f64,
    pub u_lr: f64,
}

impl Couplings {
    /// Common on-site value of a symmetric well.
    pub fn u0(&self) -> f64 {
        0.5 * (self.u_l + self.u_r)
    }

    pub fn on_site(u0: f64, u_lr: f64) -> Self {
        Couplings { u_l: u0, u_r: u0, u_lr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub max_refinements: usize,
    /// Transverse cutoff in units of `sqrt(a_rho)`.
    pub rho_max_widths: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { rel_tol: 1e-4, max_refinements: 6, rho_max_widths: 10.0 }
    }
}

/// Density cross-correlation sampled at integer lags `-(n-1)..=(n-1)`.
#[derive(Debug, Clone)]
pub(crate) struct Correlation {
    values: Vec<f64>,
    dz: f64,
    offset: isize,
}

impl Correlation {
    pub(crate) fn new(rho_i: &[f64], rho_j: &[f64], dz: f64) -> Self {
        let n = rho_i.len() as isize;
        let values = (-(n - 1)..n)
            .map(|m| {
                // sum_k rho_i(z_k) rho_j(z_k - m dz)
                let lo = m.max(0);
                let hi = (n + m).min(n);
                (lo..hi).map(|k| rho_i[k as usize] * rho_j[(k - m) as usize]).sum::<f64>() * dz
            })
            .collect();
        Correlation { values, dz, offset: n - 1 }
    }

    fn at_lag(&self, m: isize) -> f64 {
        let idx = m + self.offset;
        if idx < 0 || idx as usize >= self.values.len() {
            0.0
        } else {
            self.values[idx as usize]
        }
    }

    /// Six-point Lagrange interpolation between lags.
    pub(crate) fn eval(&self, u: f64) -> f64 {
        let x = u / self.dz;
        let base = x.floor() as isize;
        let t = x - base as f64;
        if t == 0.0 {
            return self.at_lag(base);
        }
        let mut sum = 0.0;
        for a in -2..=3isize {
            let mut w = 1.0;
            for b in -2..=3isize {
                if b != a {
                    w *= (t - b as f64) / (a - b) as f64;
                }
            }
            sum += w * self.at_lag(base + a);
        }
        sum
    }

    fn max_lag_distance(&self) -> f64 {
        self.offset as f64 * self.dz
    }
}

/// `K(u) = int_0^rho_max exp(-rho^2 / (2 a_rho)) sech^2(kappa sqrt(rho^2 + u^2)) rho d rho`.
fn transverse_kernel(u: f64, kappa: f64, a_rho: f64, rho_max: f64, level: usize) -> f64 {
    let reach = KERNEL_CUTOFF / kappa;
    if u >= reach {
        return 0.0;
    }
    let upper = rho_max.min((reach * reach - u * u).sqrt());
    let width = (0.25 / kappa).min(0.25 * a_rho.sqrt()) / (1 << level) as f64;
    let panels = (upper / width).ceil() as usize;
    let rule = CompositeRule::new(0.0, upper, panels, GL_ORDER);
    rule.integrate(|rho| (-rho * rho / (2.0 * a_rho)).exp() * sech2(kappa * (rho * rho + u * u).sqrt()) * rho)
}

fn couplings_at_level(
    corr: &[Correlation; 3],
    ip: &InteractionParams,
    a_rho: f64,
    rho_max: f64,
    level: usize,
) -> [f64; 3] {
    let kappa = ip.kappa;
    let u_max = (KERNEL_CUTOFF / kappa).min(corr[0].max_lag_distance());
    let width = (0.25 / kappa).min(0.05) / (1 << level) as f64;
    let panels = (u_max / width).ceil() as usize;
    let rule = CompositeRule::new(0.0, u_max, panels, GL_ORDER);
    let mut acc = [0.0; 3];
    // fixed node order keeps the reduction deterministic
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let k = transverse_kernel(u, kappa, a_rho, rho_max, level);
        if k == 0.0 {
            continue;
        }
        for (a, g) in acc.iter_mut().zip(corr) {
            // integrand is even in u once G(u) and G(-u) are averaged
            *a += w * k * (g.eval(u) + g.eval(-u));
        }
    }
    let prefactor = -ip.depth() / a_rho;
    acc.map(|a| prefactor * a)
}

/// `U_ij = -(kappa^2 / (alpha mu a_rho)) int exp(-rho^2/(2 a_rho)) |psi_i(z1)|^2 |psi_j(z2)|^2
/// sech^2(kappa sqrt(rho^2 + (z1 - z2)^2)) rho d rho dz1 dz2`.
pub fn compute_couplings(
    basis: &LocalizedBasis,
    ip: &InteractionParams,
    a_rho: f64,
) -> Result<Couplings, CouplingError> {
    compute_couplings_with(basis, ip, a_rho, &QuadratureSettings::default())
}

pub fn compute_couplings_with(
    basis: &LocalizedBasis,
    ip: &InteractionParams,
    a_rho: f64,
    settings: &QuadratureSettings,
) -> Result<Couplings, CouplingError> {
    if !(a_rho > 0.0 && a_rho < 1.0) {
        return Err(CouplingError::InvalidTransverseWidth(a_rho));
    }
    let dz = basis.grid.spacing();
    let (rl, rr) = (basis.density_l(), basis.density_r());
    let corr = [Correlation::new(&rl, &rl, dz), Correlation::new(&rr, &rr, dz), Correlation::new(&rl, &rr, dz)];
    let rho_max = settings.rho_max_widths * a_rho.sqrt();

    let mut previous = couplings_at_level(&corr, ip, a_rho, rho_max, 0);
    let mut change = f64::INFINITY;
    for level in 1..=settings.max_refinements {
        let current = couplings_at_level(&corr, ip, a_rho, rho_max, level);
        let scale = current.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        change = current.iter().zip(&previous).map(|(c, p)| (c - p).abs()).fold(0.0, f64::max)
            / scale.max(f64::MIN_POSITIVE);
        previous = current;
        if change < settings.rel_tol {
            let [u_l, u_r, u_lr] = current;
            return Ok(Couplings { u_l, u_r, u_lr });
        }
    }
    Err(CouplingError::NotConverged { refinements: settings.max_refinements, change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{localize, solve_fgh, Grid};
    use crate::model::quartic;

    fn basis() -> LocalizedBasis {
        let grid = Grid::standard();
        let v = grid.sample(|z| quartic(z, 0.5, 2.0));
        localize(&solve_fgh(&v, &grid, 2).unwrap()).unwrap()
    }

    #[test]
    fn interaction_parameters() {
        let ip = derive_interaction(0.1, ScatteringLength::Unitarity).unwrap();
        assert_eq!((ip.alpha, ip.beta), (1.0, 2.0));
        assert!((ip.kappa - 20.0).abs() < 1e-12);
        let ip = derive_interaction(0.01, ScatteringLength::Finite(100.0)).unwrap();
        assert!((ip.alpha - (1.0f64 - 0.0002).sqrt()).abs() < 1e-15);
        assert!((ip.alpha - 0.9999).abs() < 1e-4);
        assert_eq!(derive_interaction(1.0, ScatteringLength::Finite(1.0)), Err(CouplingError::AlphaImaginary(2.0)));
        assert_eq!(derive_interaction(0.0, ScatteringLength::Unitarity), Err(CouplingError::ZeroRange(0.0)));
        let neg = derive_interaction(0.5, ScatteringLength::Finite(-100.0)).unwrap();
        assert!(neg.alpha > 1.0 && neg.alpha < 2.0);
        assert!(matches!(
            derive_interaction(2.0, ScatteringLength::Finite(-1.0)),
            Err(CouplingError::AlphaOutOfRange(_))
        ));
        assert!((ip.potential(0.0) + ip.depth()).abs() < 1e-12);
        assert!(ip.potential(1.0) < 0.0);
    }

    #[test]
    fn sech2_is_stable() {
        assert_eq!(sech2(0.0), 1.0);
        assert!((sech2(1.0) - 1.0 / 1.0f64.cosh().powi(2)).abs() < 1e-15);
        assert_eq!(sech2(1e4), 0.0);
        assert_eq!(sech2(-2.0), sech2(2.0));
    }

    #[test]
    fn correlation_interpolates_smooth_data() {
        let grid = Grid::standard();
        let dz = grid.spacing();
        let g = grid.sample(|z| (-z * z).exp() / std::f64::consts::PI.sqrt());
        let c = Correlation::new(&g, &g, dz);
        // autocorrelation of a unit Gaussian density is exp(-u^2/2)/sqrt(2 pi)
        for u in [0.0f64, 0.013, 0.1, 0.77, 2.3] {
            let want = (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((c.eval(u) - want).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn symmetric_basis_gives_equal_on_site_terms() {
        let b = basis();
        for r0 in [0.01, 0.1, 0.5] {
            let ip = derive_interaction(r0, ScatteringLength::Unitarity).unwrap();
            let c = compute_couplings(&b, &ip, 0.1).unwrap();
            assert!((c.u_l - c.u_r).abs() <= 1e-6 * c.u_l.abs(), "r0={r0}: {c:?}");
            assert!(c.u_l < 0.0 && c.u_lr < 0.0);
            assert!(c.u_lr.abs() < 0.05 * c.u_l.abs());
        }
    }

    #[test]
    fn rejects_bad_transverse_width() {
        let ip = derive_interaction(0.1, ScatteringLength::Unitarity).unwrap();
        assert!(matches!(compute_couplings(&basis(), &ip, 1.5), Err(CouplingError::InvalidTransverseWidth(_))));
    }

    #[test]
    fn refinement_budget_is_enforced() {
        let ip = derive_interaction(0.1, ScatteringLength::Unitarity).unwrap();
        let strict = QuadratureSettings { rel_tol: 0.0, max_refinements: 1, ..Default::default() };
        assert!(matches!(
            compute_couplings_with(&basis(), &ip, 0.1, &strict),
            Err(CouplingError::NotConverged { refinements: 1, .. })
        ));
    }
}

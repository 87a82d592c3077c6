use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{norm_sqr, to_vector, BosonPhaseOps, CMatrix, FermionPhaseOps};
use crate::error::StateError;

/// States must be normalized to this tolerance before statistics are taken.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Unitary boson operators including the vacuum corner terms.
    Boson,
    /// Boson Carruthers-Nieto operators without the corner terms.
    CarruthersNieto,
    Fermion,
}

/// Phase and number statistics of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseStats {
    pub flavor: Flavor,
    pub n: usize,
    pub t: f64,
    pub c: f64,
    pub s: f64,
    pub d_c: f64,
    pub d_s: f64,
    pub d_e_phi: f64,
    pub w: f64,
    pub d_w: f64,
    pub d_w_n: f64,
    pub d_sql: f64,
    pub sigma_p: f64,
    pub sigma_w: f64,
    pub xi_n: Option<f64>,
    pub sigma_n: Option<f64>,
    /// Expectations of the vacuum-coupling parts of C and S.
    pub c_vac: f64,
    pub s_vac: f64,
}

impl PhaseStats {
    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Slack of the two number-phase uncertainty relations, nonnegative when
    /// they hold. Boson: `dC dW >= |S - (N+1) S0|`, `dS dW >= |C - (N+1) C0|`.
    /// Fermion: `dC dW >= 2|S|`, `dS dW >= 2|C|`.
    pub fn uncertainty_slack(&self) -> (f64, f64) {
        let (rs, rc) = match self.flavor {
            Flavor::Fermion => (2.0 * self.s.abs(), 2.0 * self.c.abs()),
            _ => {
                let np1 = (self.n + 1) as f64;
                ((self.s - np1 * self.s_vac).abs(), (self.c - np1 * self.c_vac).abs())
            }
        };
        (self.d_c * self.d_w - rs, self.d_s * self.d_w - rc)
    }
}

fn check_norm(c: &[Complex64], dim: usize) -> Result<(), StateError> {
    if c.len() != dim {
        return Err(StateError::DimensionMismatch { expected: dim, got: c.len() });
    }
    let norm = norm_sqr(c);
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(StateError::Unnormalized(norm));
    }
    Ok(())
}

/// Mean and standard deviation of a Hermitian operator; `<A^2>` is taken as
/// `|A psi|^2` so the variance cannot pick up an imaginary part.
fn moments(a: &CMatrix, psi: &DVector<Complex64>) -> (f64, f64) {
    let a_psi = a * psi;
    let mean = psi.dotc(&a_psi).re;
    let second = a_psi.norm_squared();
    (mean, (second - mean * mean).max(0.0).sqrt())
}

fn mean(a: &CMatrix, psi: &DVector<Complex64>) -> f64 {
    psi.dotc(&(a * psi)).re
}

struct Raw {
    c: f64,
    s: f64,
    d_c: f64,
    d_s: f64,
    w: f64,
    d_w: f64,
    c_vac: f64,
    s_vac: f64,
}

fn assemble(flavor: Flavor, n: usize, raw: Raw, d_sql: f64) -> PhaseStats {
    let nf = n as f64;
    let d_e_phi = (raw.d_c * raw.d_c + raw.d_s * raw.d_s).sqrt();
    let d_w_n = raw.d_w / nf;
    let (xi_n, sigma_n) = match flavor {
        Flavor::Fermion => (None, None),
        _ => {
            let xi = raw.d_w * raw.d_w / nf;
            (Some(xi), Some((xi - 1.0) / nf))
        }
    };
    PhaseStats {
        flavor,
        n,
        t: 0.0,
        c: raw.c,
        s: raw.s,
        d_c: raw.d_c,
        d_s: raw.d_s,
        d_e_phi,
        w: raw.w,
        d_w: raw.d_w,
        d_w_n,
        d_sql,
        sigma_p: d_e_phi * d_e_phi - d_sql,
        sigma_w: d_w_n * d_w_n - d_sql,
        xi_n,
        sigma_n,
        c_vac: raw.c_vac,
        s_vac: raw.s_vac,
    }
}

fn boson_sql(n: usize, raw: &Raw) -> f64 {
    let np1 = (n + 1) as f64;
    (raw.s - np1 * raw.s_vac).hypot(raw.c - np1 * raw.c_vac) / n as f64
}

/// Unitary boson statistics from matrix quadratic forms.
pub fn boson_stats(c: &[Complex64], ops: &BosonPhaseOps) -> Result<PhaseStats, StateError> {
    check_norm(c, ops.sector.dim())?;
    let psi = to_vector(c);
    let (cm, d_c) = moments(&ops.c12, &psi);
    let (sm, d_s) = moments(&ops.s12, &psi);
    let (w, d_w) = moments(&ops.w, &psi);
    let raw = Raw { c: cm, s: sm, d_c, d_s, w, d_w, c_vac: mean(&ops.c0, &psi), s_vac: mean(&ops.s0, &psi) };
    let sql = boson_sql(ops.n(), &raw);
    Ok(assemble(Flavor::Boson, ops.n(), raw, sql))
}

/// Same statistics as [`boson_stats`], evaluated with explicit amplitude sums
/// and no matrices. `E = C + iS` shifts `l -> l - 1` cyclically, so
/// `<E^k> = sum_l c*_{l-k} c_l` with indices mod `N + 1`, and unitarity gives
/// `<C^2> = (1 + Re<E^2>)/2`, `<S^2> = (1 - Re<E^2>)/2`.
pub fn boson_stats_amplitudes(c: &[Complex64]) -> Result<PhaseStats, StateError> {
    let d = c.len();
    if d < 2 {
        return Err(StateError::DimensionMismatch { expected: 2, got: d });
    }
    check_norm(c, d)?;
    let n = d - 1;
    let shifted = |k: usize| -> Complex64 { (0..d).map(|l| c[(l + d - k) % d].conj() * c[l]).sum() };
    let e1 = shifted(1);
    let e2 = shifted(2);
    let corner = c[n].conj() * c[0];
    let norm = shifted(0).re;
    let (cm, sm) = (e1.re, e1.im);
    let var_c = ((norm + e2.re) / 2.0 - cm * cm).max(0.0);
    let var_s = ((norm - e2.re) / 2.0 - sm * sm).max(0.0);
    let (mut w, mut w2) = (0.0, 0.0);
    for (l, z) in c.iter().enumerate() {
        let x = 2.0 * l as f64 - n as f64;
        w += x * z.norm_sqr();
        w2 += x * x * z.norm_sqr();
    }
    let raw = Raw {
        c: cm,
        s: sm,
        d_c: var_c.sqrt(),
        d_s: var_s.sqrt(),
        w,
        d_w: (w2 - w * w).max(0.0).sqrt(),
        c_vac: corner.re,
        s_vac: corner.im,
    };
    let sql = boson_sql(n, &raw);
    Ok(assemble(Flavor::Boson, n, raw, sql))
}

/// Statistics of the Carruthers-Nieto operators alone; the reference level
/// is `(1/N) sqrt(S_CN^2 + C_CN^2)`.
pub fn cn_stats(c: &[Complex64], ops: &BosonPhaseOps) -> Result<PhaseStats, StateError> {
    check_norm(c, ops.sector.dim())?;
    let psi = to_vector(c);
    let (cm, d_c) = moments(&ops.c_cn, &psi);
    let (sm, d_s) = moments(&ops.s_cn, &psi);
    let (w, d_w) = moments(&ops.w, &psi);
    let raw = Raw { c: cm, s: sm, d_c, d_s, w, d_w, c_vac: 0.0, s_vac: 0.0 };
    let sql = sm.hypot(cm) / ops.n() as f64;
    Ok(assemble(Flavor::CarruthersNieto, ops.n(), raw, sql))
}

/// Fermion statistics of a vector on the full fixed-`N_F` sector. The
/// reference level is `(2/N_F) sqrt(S^2 + C^2)`.
pub fn fermion_stats_sector(psi: &[Complex64], ops: &FermionPhaseOps) -> Result<PhaseStats, StateError> {
    check_norm(psi, ops.sector.dim())?;
    let v = to_vector(psi);
    let (cm, d_c) = moments(&ops.c, &v);
    let (sm, d_s) = moments(&ops.s, &v);
    let (w, d_w) = moments(&ops.w, &v);
    let raw = Raw { c: cm, s: sm, d_c, d_s, w, d_w, c_vac: mean(&ops.c_vac, &v), s_vac: mean(&ops.s_vac, &v) };
    let n = ops.n_f();
    let sql = 2.0 / n as f64 * sm.hypot(cm);
    Ok(assemble(Flavor::Fermion, n, raw, sql))
}

/// Fermion statistics of amplitudes on the dynamics subspace.
pub fn fermion_stats(c: &[Complex64], ops: &FermionPhaseOps) -> Result<PhaseStats, StateError> {
    check_norm(c, ops.basis.len())?;
    fermion_stats_sector(&ops.embed(c), ops)
}

#[cfg(test)]
mod tests {
    use super::super::{build_boson_ops, build_fermion_ops};
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
        let mut c: Vec<Complex64> =
            (0..d).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let n = norm_sqr(&c).sqrt();
        c.iter_mut().for_each(|z| *z /= n);
        c
    }

    #[test]
    fn fock_state_all_left() {
        for n in [1, 2, 6] {
            let ops = build_boson_ops(n);
            let st = boson_stats(&ops.sector.fock(n), &ops).unwrap();
            assert_eq!(st.w, n as f64);
            assert_eq!(st.d_w, 0.0);
            assert_eq!(st.d_sql, 0.0);
            assert_eq!(st.sigma_w, 0.0);
            if n > 1 {
                assert!((st.d_c - 0.5f64.sqrt()).abs() < 1e-15);
                assert!((st.d_s - 0.5f64.sqrt()).abs() < 1e-15);
                assert!((st.sigma_p - 1.0).abs() < 1e-15);
            }
            let cn = cn_stats(&ops.sector.fock(n), &ops).unwrap();
            assert_eq!(cn.c, 0.0);
        }
    }

    #[test]
    fn rejects_bad_states() {
        let ops = build_boson_ops(3);
        let half = vec![Complex64::new(0.5, 0.0); 4];
        assert!(boson_stats(&half, &ops).is_ok());
        let long = vec![Complex64::new(0.5, 0.0); 5];
        assert!(matches!(boson_stats(&long, &ops), Err(StateError::DimensionMismatch { .. })));
        let big = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(boson_stats(&big, &ops), Err(StateError::Unnormalized(_))));
        assert!(matches!(boson_stats_amplitudes(&big), Err(StateError::Unnormalized(_))));
        let ferm = build_fermion_ops(2);
        assert!(matches!(fermion_stats(&big[..3], &ferm), Err(StateError::Unnormalized(_))));
    }

    #[test]
    fn corner_term_and_vacuum_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 3, 8] {
            let ops = build_boson_ops(n);
            for _ in 0..50 {
                let c = random_state(&mut rng, n + 1);
                let full = boson_stats(&c, &ops).unwrap();
                let cn = cn_stats(&c, &ops).unwrap();
                let corner = c[0].conj() * c[n];
                assert!((full.c - cn.c - corner.re).abs() < 1e-14);
                let edge = c[0].norm() * c[n].norm();
                assert!(full.c_vac.abs() <= edge + 1e-15 && full.s_vac.abs() <= edge + 1e-15);
            }
        }
    }

    #[test]
    fn pair_at_start_is_balanced() {
        let ops = build_fermion_ops(2);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let st = fermion_stats(&[one, zero, zero], &ops).unwrap();
        assert!(st.w.abs() < 1e-15 && st.d_w < 1e-7);
        assert!(st.xi_n.is_none());
    }

    proptest! {
        #[test]
        fn amplitude_sums_match_matrices(seed in 0u64..1000, n in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_state(&mut rng, n + 1);
            let a = boson_stats(&c, &build_boson_ops(n)).unwrap();
            let b = boson_stats_amplitudes(&c).unwrap();
            for (x, y) in [(a.c, b.c), (a.s, b.s), (a.d_c, b.d_c), (a.d_s, b.d_s), (a.w, b.w), (a.d_w, b.d_w),
                           (a.d_sql, b.d_sql), (a.sigma_p, b.sigma_p), (a.sigma_w, b.sigma_w)] {
                prop_assert!((x - y).abs() < 1e-12, "{} vs {}", x, y);
            }
        }

        #[test]
        fn boson_uncertainty_relations(seed in 0u64..1000, n in 1usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_state(&mut rng, n + 1);
            let st = boson_stats(&c, &build_boson_ops(n)).unwrap();
            let (a, b) = st.uncertainty_slack();
            prop_assert!(a >= -1e-10 && b >= -1e-10);
            prop_assert!((st.d_e_phi.powi(2) - st.d_c.powi(2) - st.d_s.powi(2)).abs() < 1e-14);
        }
    }
}

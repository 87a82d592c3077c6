//! Closed-form fermion amplitudes, in `tau = J t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagate::StateTrajectory;
use crate::error::DynamicsError;

/// Named initial conditions of the two-fermion amplitude equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStart {
    /// One fermion per well, `c = (1, 0, 0)`.
    Singlet,
    /// Both fermions in the left well, `c = (0, 1, 0)`.
    DoubleLeft,
}

impl PairStart {
    pub fn amplitudes(self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); 3];
        c[match self {
            PairStart::Singlet => 0,
            PairStart::DoubleLeft => 1,
        }] = Complex64::new(1.0, 0.0);
        c
    }
}

/// Solution of the singlet / double-left / double-right equations.
///
/// With `u' = (U - U_lr)/J` and `W = sqrt((u'/2)^2 + 4)` the symmetric
/// combination of the doubly occupied states mixes with the singlet at
/// frequency `W`, while the antisymmetric one only acquires `exp(-i U t)`.
/// The overall phase is `exp(-i (U + U_lr) t / 2)`.
pub fn two_fermion_analytic(j: f64, u: f64, u_lr: f64, start: PairStart, t: f64) -> [Complex64; 3] {
    let tau = j * t;
    let up = (u - u_lr) / j;
    let omega = ((0.5 * up).powi(2) + 4.0).sqrt();
    let (sin, cos) = (omega * tau).sin_cos();
    let i = Complex64::i();
    let global = Complex64::from_polar(1.0, -0.5 * (u + u_lr) * t);
    let mixed = i * global * (std::f64::consts::SQRT_2 * sin / omega);
    let ratio = 0.5 * up / omega;
    match start {
        PairStart::Singlet => {
            let c1 = global * Complex64::new(cos, ratio * sin);
            [c1, mixed, mixed]
        }
        PairStart::DoubleLeft => {
            let odd = Complex64::from_polar(0.5, -u * t);
            let even = global * Complex64::new(cos, -ratio * sin) * 0.5;
            [mixed, odd + even, even - odd]
        }
    }
}

/// Solution from `c = (1, 1, 0, 0)/sqrt 2`. The two pairs `(c1, c3)` and
/// `(c2, c4)` each undergo a Rabi cycle at `J`.
pub fn three_fermion_analytic(j: f64, u: f64, u_lr: f64, t: f64) -> [Complex64; 4] {
    let global = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -(u + 2.0 * u_lr) * t);
    let (sin, cos) = (j * t).sin_cos();
    let a = global * cos;
    let b = Complex64::i() * global * sin;
    [a, a, b, b]
}

pub fn three_fermion_start() -> Vec<Complex64> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![s, s, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
}

/// Pair and single tunneling probabilities of a two-boson trajectory that
/// started with both atoms in one well: `P2` is the weight with both atoms
/// in the other well, `P1` the weight with one in each.
pub fn tunneling_probabilities(traj: &StateTrajectory) -> Result<(Vec<f64>, Vec<f64>), DynamicsError> {
    let first = traj.states.first().ok_or_else(|| DynamicsError::InvalidTimes("empty trajectory".into()))?;
    if first.len() != 3 {
        return Err(DynamicsError::WrongN(first.len().saturating_sub(1)));
    }
    let target = if (first[0].norm_sqr() - 1.0).abs() < 1e-12 {
        2
    } else if (first[2].norm_sqr() - 1.0).abs() < 1e-12 {
        0
    } else {
        return Err(DynamicsError::NoReferenceWell(traj.label.clone()));
    };
    let p1 = traj.states.iter().map(|c| c[1].norm_sqr()).collect();
    let p2 = traj.states.iter().map(|c| c[target].norm_sqr()).collect();
    Ok((p1, p2))
}

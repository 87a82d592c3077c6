use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{cos_sin, CMatrix};

/// States `|l, N - l>` for `l = 0..=N`; the index is the left-well occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BosonSector {
    pub n: usize,
}

impl BosonSector {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Amplitude vector of the Fock state with `left` atoms in the left well.
    pub fn fock(&self, left: usize) -> Vec<Complex64> {
        assert!(left <= self.n, "occupancy {left} exceeds N = {}", self.n);
        let mut c = vec![Complex64::new(0.0, 0.0); self.dim()];
        c[left] = Complex64::new(1.0, 0.0);
        c
    }
}

/// Unitary phase-difference operators split into their Carruthers-Nieto
/// part and the corner term coupling the two one-well vacua.
#[derive(Debug, Clone)]
pub struct BosonPhaseOps {
    pub sector: BosonSector,
    pub c12: CMatrix,
    pub s12: CMatrix,
    pub c_cn: CMatrix,
    pub s_cn: CMatrix,
    pub c0: CMatrix,
    pub s0: CMatrix,
    pub w: CMatrix,
}

impl BosonPhaseOps {
    pub fn n(&self) -> usize {
        self.sector.n
    }

    /// `C12 + i S12`.
    pub fn exp_phase(&self) -> CMatrix {
        &self.c12 + &self.s12 * super::I
    }
}

/// Matrix element `<l-1, N-l+1| (N1+1)^{-1/2} a1 a2^dag (N2+1)^{-1/2} |l, N-l>`,
/// factor by factor, right to left.
fn cn_lowering_element(l: usize, n: usize) -> f64 {
    let right = (n - l) as f64;
    let left = l as f64;
    let inv_n2 = 1.0 / (right + 1.0).sqrt();
    let a2_dag = (right + 1.0).sqrt();
    let a1 = left.sqrt();
    let inv_n1 = 1.0 / (left - 1.0 + 1.0).sqrt();
    inv_n1 * a1 * a2_dag * inv_n2
}

pub fn build_boson_ops(n: usize) -> BosonPhaseOps {
    assert!(n >= 1, "boson sector needs at least one particle");
    let sector = BosonSector { n };
    let d = sector.dim();

    let mut lowering = DMatrix::<f64>::zeros(d, d);
    for l in 1..=n {
        lowering[(l - 1, l)] = cn_lowering_element(l, n);
    }
    let (c_cn, s_cn) = cos_sin(&super::real(&lowering));

    let mut corner = DMatrix::<f64>::zeros(d, d);
    corner[(n, 0)] = 1.0;
    let (c0, s0) = cos_sin(&super::real(&corner));

    let w = super::real(&DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|l| 2.0 * l as f64 - n as f64),
    )));

    BosonPhaseOps { sector, c12: &c_cn + &c0, s12: &s_cn + &s0, c_cn, s_cn, c0, s0, w }
}

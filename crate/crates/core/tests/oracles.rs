//! Independent re-derivations of the eigenvalues and couplings.

use dwphase::couplings::{compute_couplings, derive_interaction};
use dwphase::model::{dw_potential, ScatteringLength};
use dwphase::{localize, solve_fgh, Grid, LocalizedBasis, ModelParams};

fn reference_basis() -> LocalizedBasis {
    let grid = Grid::standard();
    let p = ModelParams::default();
    localize(&solve_fgh(&grid.sample(|z| dw_potential(z, &p)), &grid, 4).unwrap()).unwrap()
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(d: &[f64], e: &[f64], k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn finite_difference_levels_agree() {
    let p = ModelParams::default();
    let n = 4001;
    let h = 16.0 / (n + 1) as f64;
    let z = |i: usize| -8.0 + (i + 1) as f64 * h;
    let d: Vec<f64> = (0..n).map(|i| 1.0 / (h * h) + dw_potential(z(i), &p)).collect();
    let e = vec![-0.5 / (h * h); n - 1];
    let grid = Grid::standard();
    let s = solve_fgh(&grid.sample(|z| dw_potential(z, &p)), &grid, 4).unwrap();
    for k in 0..4 {
        let fd = bisect(&d, &e, k, 0.0, 10.0);
        let rel = (fd - s.energies[k]).abs() / s.energies[k];
        assert!(rel < 1e-4, "level {k}: fd {fd} vs dvr {}", s.energies[k]);
    }
}

#[test]
fn levels_converge_under_grid_doubling() {
    let p = ModelParams::default();
    let solve = |n| {
        let g = Grid::new(6.0, n).unwrap();
        solve_fgh(&g.sample(|z| dw_potential(z, &p)), &g, 4).unwrap().energies
    };
    let (coarse, fine) = (solve(257), solve(513));
    for k in 0..4 {
        assert!((coarse[k] - fine[k]).abs() < 1e-6, "level {k}");
    }
}

/// Band-limited reconstruction of a DVR function on a grid `factor` times finer.
fn refine(psi: &[f64], grid: &Grid, factor: usize) -> (Vec<f64>, f64) {
    let dz = grid.spacing();
    let h = dz / factor as f64;
    let m = (psi.len() - 1) * factor + 1;
    let fine = (0..m)
        .map(|i| {
            let z = grid.z_min() + i as f64 * h;
            psi.iter()
                .enumerate()
                .map(|(k, v)| {
                    let x = (z - grid.point(k)) / dz;
                    let s = if x == 0.0 { 1.0 } else { (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x) };
                    v * s
                })
                .sum()
        })
        .collect();
    (fine, h)
}

/// Direct double sum over grid points with a trapezoid radial integral.
fn brute_force(basis: &LocalizedBasis, r0: f64, a_rho: f64, factor: usize) -> (f64, f64) {
    let ip = derive_interaction(r0, ScatteringLength::Unitarity).unwrap();
    let (pl, h) = refine(&basis.psi_l, &basis.grid, factor);
    let (pr, _) = refine(&basis.psi_r, &basis.grid, factor);
    let rl: Vec<f64> = pl.iter().map(|x| x * x).collect();
    let rr: Vec<f64> = pr.iter().map(|x| x * x).collect();
    let n = rl.len();
    let rho_max = 10.0 * a_rho.sqrt();
    // the trapezoid endpoint error at rho = 0 scales as (kappa dr)^2
    let steps = ((rho_max * ip.kappa / 0.02).ceil() as usize).max(2000);
    let dr = rho_max / steps as f64;
    let sech2 = |x: f64| 1.0 / x.cosh().powi(2);
    let kernel: Vec<f64> = (0..n)
        .map(|lag| {
            let u = lag as f64 * h;
            if ip.kappa * u > 40.0 {
                return 0.0;
            }
            (0..=steps)
                .map(|k| {
                    let rho = k as f64 * dr;
                    let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                    w * (-rho * rho / (2.0 * a_rho)).exp() * sech2(ip.kappa * (rho * rho + u * u).sqrt()) * rho
                })
                .sum::<f64>()
                * dr
        })
        .collect();
    let (mut ll, mut lr) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let k = kernel[i.abs_diff(j)];
            if k != 0.0 {
                ll += rl[i] * rl[j] * k;
                lr += rl[i] * rr[j] * k;
            }
        }
    }
    let pre = -ip.depth() / a_rho * h * h;
    (pre * ll, pre * lr)
}

#[test]
fn couplings_match_brute_force_sums() {
    let basis = reference_basis();
    let a_rho = 0.1;
    for (r0, factor) in [(1.0, 2), (0.3, 2), (0.1, 4), (0.03, 8)] {
        let ip = derive_interaction(r0, ScatteringLength::Unitarity).unwrap();
        let c = compute_couplings(&basis, &ip, a_rho).unwrap();
        let (ll, lr) = brute_force(&basis, r0, a_rho, factor);
        let scale = ll.abs();
        assert!((c.u_l - ll).abs() < 1e-3 * scale, "r0={r0}: u_l {} vs {ll}", c.u_l);
        assert!((c.u_lr - lr).abs() < 1e-3 * scale, "r0={r0}: u_lr {} vs {lr}", c.u_lr);
    }
}

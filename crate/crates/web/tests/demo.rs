use dwphase_web::{coupling_data, couplings, spectrum, spectrum_data, squeezing, squeezing_data};

#[test]
fn spectrum_matches_reference_trap() {
    let s = spectrum_data(0.5, 2.0).unwrap();
    assert_eq!(s.z.len(), s.potential.len());
    assert!((s.energies[0] - 0.9004).abs() < 1e-3);
    assert!((s.j - 0.0239).abs() < 1e-3);
    let v: serde_json::Value = serde_json::from_str(&spectrum(0.5, 2.0).unwrap()).unwrap();
    assert_eq!(v["psi_l"].as_array().unwrap().len(), s.z.len());
    assert!(spectrum(-1.0, 2.0).is_err());
}

#[test]
fn coupling_curve_is_attractive() {
    let c = coupling_data(4).unwrap();
    assert_eq!(c.r0.len(), 4);
    assert!(c.u0.iter().all(|&u| u < 0.0));
    assert!(c.u0.iter().zip(&c.u_lr).all(|(u, v)| v.abs() < 0.05 * u.abs()));
    assert!(couplings(1).is_err() && couplings(500).is_err());
}

#[test]
fn squeezing_trace_starts_from_fock_state() {
    let s = squeezing_data(2, 2, 0.1, 5.0, 50).unwrap();
    assert_eq!(s.tau.len(), 50);
    // the spectral propagator reproduces the start state to rounding
    assert!((s.w[0] - 2.0).abs() < 1e-12);
    assert!(s.sigma_w[0].abs() < 1e-12);
    assert!(s.sigma_p.iter().all(|&p| p > 0.0));
    let v: serde_json::Value = serde_json::from_str(&squeezing(4, 2, 0.1, 2.0, 20).unwrap()).unwrap();
    assert_eq!(v["sigma_w"].as_array().unwrap().len(), 20);
    assert!(squeezing(2, 3, 0.1, 5.0, 50).is_err());
    assert!(squeezing(41, 0, 0.1, 5.0, 50).is_err());
}

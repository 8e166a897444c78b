use nalgebra::DMatrix;
use num_complex::Complex64;

use scartower::fock::{
    apply, bits_from_string, dicke_state, eigen_check, reduced_entropy, schmidt_coeff, tower_length, tower_state,
};
use scartower::models::hopping;
use scartower::{Error, Operator, SiteGraph, SparseState, TowerSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn state(n: usize, amps: &[(&str, f64)]) -> SparseState {
    SparseState::from_amplitudes(n, amps.iter().map(|&(b, a)| (bits_from_string(b).unwrap(), c(a))))
}

#[test]
fn creation_on_basis_states() {
    let vac = SparseState::vacuum(3);
    assert_eq!(apply(&Operator::create(0), &vac).unwrap(), state(3, &[("100", 1.0)]));
    assert!(apply(&Operator::create(0), &state(3, &[("100", 1.0)])).unwrap().is_empty());
    let w2 = dicke_state(5, 2).unwrap();
    assert!(apply(&Operator::total_number(5), &w2).unwrap().distance(&w2.scale(c(2.0))) < 1e-15);
}

#[test]
fn dicke_states() {
    let r = 1.0 / 3f64.sqrt();
    let w = dicke_state(3, 1).unwrap();
    assert!(w.distance(&state(3, &[("100", r), ("010", r), ("001", r)])) < 1e-15);
    assert_eq!(dicke_state(2, 2).unwrap(), state(2, &[("11", 1.0)]));
    let w = dicke_state(4, 2).unwrap();
    assert_eq!(w.len(), 6);
    assert!(w.amplitudes().all(|(_, a)| (a - c(1.0 / 6f64.sqrt())).norm() < 1e-15));
    assert!(matches!(dicke_state(3, 4), Err(Error::InvalidParticleNumber { .. })));
}

#[test]
fn tower_states() {
    for p in 0..=6 {
        let q = tower_state(&TowerSpec::dicke(6), p, 6).unwrap();
        assert!(q.distance(&dicke_state(6, p).unwrap()) < 1e-14);
    }
    let s2 = TowerSpec::pair_chain(6, true);
    assert_eq!(tower_state(&s2, 3, 6).unwrap(), state(6, &[("111111", 1.0)]));
    assert_eq!(tower_state(&s2, 4, 6).unwrap_err(), Error::TowerTruncated { requested: 4, max_p: 3 });
    assert_eq!(tower_length(&s2, 6).unwrap(), 3);
}

#[test]
fn charged_towers_carry_particle_number() {
    let g = SiteGraph::square_grid(3, 3, true);
    let towers = [(TowerSpec::pair_chain(8, true), 2usize), (TowerSpec::nearest_neighbor(&g), 5)];
    for (q, charge) in towers {
        let n = q.n_sites();
        assert_eq!(q.charge(), Some(charge));
        for p in 0..=tower_length(&q, n).unwrap() {
            let psi = tower_state(&q, p, n).unwrap();
            let np = apply(&Operator::total_number(n), &psi).unwrap();
            assert!(np.distance(&psi.scale(c((charge * p) as f64))) < 1e-12);
        }
    }
    let mixed = TowerSpec::new(4, [(vec![0], c(1.0)), (vec![1, 2], c(1.0))]).unwrap();
    assert_eq!(mixed.charge(), None);
}

#[test]
fn schmidt_coefficients() {
    assert!((schmidt_coeff(4, 2, 2, 1).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((schmidt_coeff(4, 2, 2, 0).unwrap() - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
    for (n, x, p) in [(10, 3, 4), (9, 5, 2), (7, 7, 3)] {
        let total: f64 = (0..=x.min(p))
            .filter(|&l| p - l <= n - x)
            .map(|l| schmidt_coeff(n, x, p, l).unwrap().powi(2))
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}

#[test]
fn schmidt_coefficients_match_singular_values() {
    for n in 2..=10usize {
        for x in 1..n {
            for p in 0..=n {
                let psi = dicke_state(n, p).unwrap();
                // rows index the first x sites, columns the rest
                let mut m = DMatrix::<f64>::zeros(1 << x, 1 << (n - x));
                for (bits, a) in psi.amplitudes() {
                    m[((bits & ((1 << x) - 1)) as usize, (bits >> x) as usize)] = a.re;
                }
                let mut sv: Vec<f64> = m.singular_values().iter().copied().filter(|&s| s > 1e-12).collect();
                let mut expected: Vec<f64> = (0..=x.min(p))
                    .filter(|&l| p - l <= n - x)
                    .map(|l| schmidt_coeff(n, x, p, l).unwrap())
                    .collect();
                sv.sort_by(f64::total_cmp);
                expected.sort_by(f64::total_cmp);
                assert_eq!(sv.len(), expected.len(), "n={n} x={x} p={p}");
                for (a, b) in sv.iter().zip(&expected) {
                    assert!((a - b).abs() < 1e-10, "n={n} x={x} p={p}");
                }
            }
        }
    }
}

#[test]
fn entanglement_entropies() {
    assert!(reduced_entropy(&SparseState::vacuum(6), &[0, 1, 2]).unwrap().abs() < 1e-15);
    let w = dicke_state(4, 1).unwrap();
    assert!((reduced_entropy(&w, &[0, 1]).unwrap() - 2f64.ln()).abs() < 1e-12);
    let r = 0.5f64.sqrt();
    let bell = state(2, &[("00", r), ("11", r)]);
    assert!((reduced_entropy(&bell, &[0]).unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn eigen_checks() {
    let number = Operator::total_number(6);
    for p in 0..=6 {
        let e = eigen_check(&number, &dicke_state(6, p).unwrap()).unwrap();
        assert!((e.eigenvalue - c(p as f64)).norm() < 1e-14);
        assert!(e.residual < 1e-14);
    }
    let h = hopping(&SiteGraph::chain(6, true));
    let e = eigen_check(&h, &dicke_state(6, 1).unwrap()).unwrap();
    assert!((e.eigenvalue - c(2.0)).norm() < 1e-12 && e.residual < 1e-12);
    assert!(eigen_check(&h, &dicke_state(6, 2).unwrap()).unwrap().residual > 1e-3);
}

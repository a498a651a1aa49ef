use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use pst_core::channels::{choi_matrix, dephase_qutrit, depolarize_qutrit, kraus_operators, ChannelSpec};
use pst_core::density::QutritDensity;

fn density() -> impl Strategy<Value = QutritDensity> {
    prop::collection::vec(-1.0f64..1.0, 18).prop_map(|v| {
        let b = Matrix3::from_fn(|r, c| Complex64::new(v[2 * (3 * r + c)], v[2 * (3 * r + c) + 1]));
        let m = b * b.adjoint();
        let tr = m.trace().re.max(1e-9);
        QutritDensity::new(m.unscale(tr)).unwrap()
    })
}

fn max_abs(m: &Matrix3<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn channels_preserve_trace_and_vacuum(rho in density(), p in 0.0f64..=1.0) {
        for out in [depolarize_qutrit(&rho, p).unwrap(), dephase_qutrit(&rho, p).unwrap()] {
            prop_assert!((out.trace() - rho.trace()).abs() <= 1e-12);
            prop_assert_eq!(out.a(), rho.a());
        }
    }

    #[test]
    fn depolarization_composes(rho in density(), p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let twice = depolarize_qutrit(&depolarize_qutrit(&rho, p1).unwrap(), p2).unwrap();
        let once = depolarize_qutrit(&rho, 1.0 - (1.0 - p1) * (1.0 - p2)).unwrap();
        prop_assert!(max_abs(&(twice.matrix() - once.matrix())) <= 1e-12);
    }

    #[test]
    fn kraus_form_matches_closed_form(rho in density(), p in 0.0f64..=1.0) {
        for spec in [ChannelSpec::Depolarize(p), ChannelSpec::Dephase(p)] {
            let kraus = kraus_operators(&spec).unwrap();
            let via_kraus = kraus.iter().fold(Matrix3::zeros(), |acc, k| acc + k * rho.matrix() * k.adjoint());
            prop_assert!(max_abs(&(via_kraus - spec.apply_matrix(rho.matrix()))) <= 1e-12);
        }
    }

    #[test]
    fn choi_is_positive(p in 0.0f64..=1.0) {
        for spec in [ChannelSpec::Depolarize(p), ChannelSpec::Dephase(p)] {
            prop_assert!(choi_matrix(&spec).is_ok());
        }
    }
}

#[test]
fn concurrent_kraus_lookups_agree() {
    let spec = ChannelSpec::Depolarize(0.37);
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..8).map(|_| s.spawn(|| kraus_operators(&spec).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for r in &results[1..] {
        assert_eq!(**r, *results[0]);
    }
}

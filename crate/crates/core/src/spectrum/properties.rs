use proptest::prelude::*;

use super::*;

fn circuit() -> impl Strategy<Value = CircuitParams> {
    (0.5f64..8.0, 0.5f64..2.0, 0.2f64..1.5).prop_map(|(ej, ec, el)| CircuitParams::new(ej, ec, el, 100).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energies_ascend(p in circuit(), f in 0.0f64..1.0) {
        let s = spectrum_unchecked(&p, FluxBias(f), 6, &BasisConfig::with_dim(60)).unwrap();
        for w in s.energies.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn mirror_symmetric_about_half_flux(p in circuit(), f in 0.0f64..0.5) {
        let b = BasisConfig::with_dim(60);
        let lo = spectrum_unchecked(&p, FluxBias(f), 5, &b).unwrap();
        let hi = spectrum_unchecked(&p, FluxBias(1.0 - f), 5, &b).unwrap();
        for (a, c) in lo.energies.iter().zip(&hi.energies) {
            prop_assert!((a - c).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn matrix_elements_symmetric(p in circuit(), f in 0.0f64..1.0) {
        let s = spectrum_unchecked(&p, FluxBias(f), 4, &BasisConfig::with_dim(60)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((s.phase_element(i, j) - s.phase_element(j, i)).abs() < 1e-10);
            }
        }
    }
}

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::operators::{charge_operator, phase_operator, OscillatorBasis};
use super::{BasisConfig, CircuitParams, FluxBias, Representation, Spectrum, Transition, TransitionTable};
use crate::error::{Error, Result};

/// Hamiltonian matrix (GHz) in the oscillator eigenbasis of the linear part.
pub fn make_hamiltonian(params: &CircuitParams, flux: FluxBias, basis: &BasisConfig) -> Result<DMatrix<f64>> {
    params.validate()?;
    basis.validate()?;
    FluxBias::new(flux.0)?;
    Ok(OscillatorBasis::new(params, basis.dim).hamiltonian(params.e_j, flux.phase()))
}

/// Sorted eigenpairs of a real symmetric matrix.
///
/// Ascending by eigenvalue; runs of numerically equal eigenvalues are ordered
/// by the basis index of each vector's dominant component. Each vector is
/// signed so that its dominant component is positive.
pub(crate) fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let dim = h.nrows();
    let eig = SymmetricEigen::new(h);
    let dominant = |col: usize| -> usize {
        let v = eig.eigenvectors.column(col);
        (0..dim)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        let e0 = eig.eigenvalues[order[start]];
        while end < dim && (eig.eigenvalues[order[end]] - e0).abs() <= 1e-12 * e0.abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by_key(|&c| dominant(c));
        }
        start = end;
    }

    let values = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let d = dominant(src);
        let sign = if eig.eigenvectors[(d, src)] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(eig.eigenvectors.column(src) * sign));
    }
    (values, vectors)
}

fn project(op: &DMatrix<f64>, vecs: &DMatrix<f64>) -> DMatrix<f64> {
    vecs.transpose() * op * vecs
}

fn check_levels(n_levels: usize, basis: &BasisConfig) -> Result<()> {
    if n_levels < 2 {
        return Err(Error::invalid(format!("need at least 2 levels, got {n_levels}")));
    }
    if n_levels > basis.dim / 3 {
        return Err(Error::invalid(format!(
            "{n_levels} levels exceed dim/3 = {} for basis dim {}",
            basis.dim / 3,
            basis.dim
        )));
    }
    Ok(())
}

pub(crate) fn solve_in_basis(
    params: &CircuitParams,
    flux: FluxBias,
    n_levels: usize,
    basis: &BasisConfig,
    osc: &OscillatorBasis,
) -> Spectrum {
    let h = osc.hamiltonian(params.e_j, flux.phase());
    let (values, vectors) = sorted_eigen(h);
    let kept = vectors.columns(0, n_levels).into_owned();
    let phase_elements = project(&phase_operator(osc.phi_zpf, osc.dim), &kept);
    let charge_elements = project(&charge_operator(osc.phi_zpf, osc.dim), &kept);
    Spectrum {
        params: *params,
        flux,
        basis: *basis,
        energies: values[..n_levels].to_vec(),
        eigenvectors: kept,
        representation: Representation::Oscillator { phi_zpf: osc.phi_zpf },
        phase_elements,
        charge_elements,
    }
}

/// Lowest `n_levels` eigenpairs without the basis-doubling convergence check.
///
/// Meant for inner loops (fits, finite differences) where the caller has
/// already established that `basis` is adequate.
pub fn spectrum_unchecked(
    params: &CircuitParams,
    flux: FluxBias,
    n_levels: usize,
    basis: &BasisConfig,
) -> Result<Spectrum> {
    params.validate()?;
    basis.validate()?;
    FluxBias::new(flux.0)?;
    check_levels(n_levels, basis)?;
    let osc = OscillatorBasis::new(params, basis.dim);
    Ok(solve_in_basis(params, flux, n_levels, basis, &osc))
}

/// Lowest `n_levels` eigenpairs at `basis.dim`, verified against a solve at
/// twice the dimension.
pub fn spectrum(params: &CircuitParams, flux: FluxBias, n_levels: usize, basis: &BasisConfig) -> Result<Spectrum> {
    let spec = spectrum_unchecked(params, flux, n_levels, basis)?;
    let doubled = 2 * basis.dim;
    let h2 = OscillatorBasis::new(params, doubled).hamiltonian(params.e_j, flux.phase());
    let reference = SymmetricEigen::new(h2).eigenvalues;
    let mut reference: Vec<f64> = reference.iter().copied().collect();
    reference.sort_by(f64::total_cmp);
    let shift = spec
        .energies
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if shift >= basis.tol {
        return Err(Error::NotConverged {
            dim: basis.dim,
            doubled,
            shift,
            tol: basis.tol,
        });
    }
    Ok(spec)
}

/// All pairwise transitions among the retained levels.
pub fn transitions(spec: &Spectrum) -> Result<TransitionTable> {
    let n = spec.n_levels();
    if n < 2 {
        return Err(Error::invalid("transition table needs at least 2 levels"));
    }
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            entries.push(Transition {
                i,
                j,
                f_ij: spec.frequency(i, j),
                phi_ij: spec.phase_element(i, j).abs(),
                n_ij: spec.charge_element(i, j).abs(),
            });
        }
    }
    Ok(TransitionTable {
        flux: spec.flux,
        n_levels: n,
        entries,
    })
}

/// Transition tables over a flux grid, evaluated in parallel, in grid order.
pub fn flux_sweep(
    params: &CircuitParams,
    flux_grid: &[FluxBias],
    n_levels: usize,
    basis: &BasisConfig,
) -> Result<Vec<(FluxBias, TransitionTable)>> {
    if flux_grid.is_empty() {
        return Err(Error::invalid("flux grid is empty"));
    }
    flux_grid
        .par_iter()
        .map(|&f| {
            spectrum(params, f, n_levels, basis)
                .and_then(|s| transitions(&s))
                .map(|t| (f, t))
                .map_err(|e| Error::SweepPoint {
                    flux: f.0,
                    source: Box::new(e),
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn device_a() -> CircuitParams {
        CircuitParams::new(3.0, 0.84, 1.0, 100).unwrap()
    }

    #[test]
    fn harmonic_limit_diagonal_spacing() {
        let p = CircuitParams::new(0.0, 0.84, 1.0, 100).unwrap();
        let h = make_hamiltonian(&p, FluxBias(0.3), &BasisConfig::default()).unwrap();
        let w = (8.0f64 * 0.84).sqrt();
        assert!((w - 2.5923).abs() < 1e-4);
        for n in 1..10 {
            assert!((h[(n, n)] - h[(n - 1, n - 1)] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let h = make_hamiltonian(&device_a(), FluxBias(0.37), &BasisConfig::default()).unwrap();
        let scale = h.amax();
        assert!((&h - h.transpose()).amax() <= 1e-12 * scale);
    }

    #[test]
    fn rejects_small_basis_and_bad_params() {
        let p = device_a();
        assert!(make_hamiltonian(&p, FluxBias(0.5), &BasisConfig::with_dim(9)).is_err());
        let bad = CircuitParams { e_j: f64::NAN, ..p };
        assert!(make_hamiltonian(&bad, FluxBias(0.5), &BasisConfig::default()).is_err());
        assert!(spectrum(&p, FluxBias(0.5), 1, &BasisConfig::default()).is_err());
        assert!(spectrum(&p, FluxBias(0.5), 21, &BasisConfig::default()).is_err());
    }

    #[test]
    fn device_a_sweet_spot_gap() {
        let s = spectrum(&device_a(), FluxBias::SWEET_SPOT, 5, &BasisConfig::default()).unwrap();
        let f01 = s.frequency(0, 1);
        assert!((f01 - 0.78).abs() / 0.78 < 0.03, "f01 = {f01}");
        let ratio = s.frequency(1, 2) / f01;
        assert!((ratio - 3.4).abs() / 3.4 < 0.08, "ratio = {ratio}");
    }

    #[test]
    fn device_a_integer_flux_is_transmon_like() {
        let s = spectrum(&device_a(), FluxBias(0.0), 4, &BasisConfig::default()).unwrap();
        assert!((s.frequency(0, 1) - 4.5).abs() < 0.225);
    }

    #[test]
    fn device_h_sweet_spot() {
        let p = CircuitParams::new(4.43, 1.0, 0.79, 100).unwrap();
        let t = transitions(&spectrum(&p, FluxBias(0.5), 4, &BasisConfig::default()).unwrap()).unwrap();
        assert!((t.f01() - 0.32).abs() / 0.32 < 0.03);
        assert!((t.anharmonicity_ratio().unwrap() - 11.8).abs() / 11.8 < 0.08);
    }

    #[test]
    fn reflected_flux_gives_same_eigenvalues() {
        let p = device_a();
        let b = BasisConfig::default();
        for f in [0.1, 0.23, 0.4] {
            let e = spectrum(&p, FluxBias(f), 6, &b).unwrap().energies;
            let neg = spectrum(&p, FluxBias(-f), 6, &b).unwrap().energies;
            let mirror = spectrum(&p, FluxBias(1.0 - f), 6, &b).unwrap().energies;
            for k in 0..6 {
                assert!((e[k] - neg[k]).abs() < 1e-10);
                assert!((e[k] - mirror[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn parity_forbids_zero_two_at_sweet_spot() {
        let s = spectrum(&device_a(), FluxBias::SWEET_SPOT, 5, &BasisConfig::default()).unwrap();
        // <0|2> = 0, so the phase origin does not matter.
        assert!(s.phase_element(0, 2).abs() < 1e-8);
        assert!(s.charge_element(0, 2).abs() < 1e-8);
        assert!(s.phase_element(0, 1).abs() > 1.0);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let s = spectrum(&device_a(), FluxBias(0.31), 8, &BasisConfig::default()).unwrap();
        let gram = s.eigenvectors.transpose() * &s.eigenvectors;
        let id = DMatrix::<f64>::identity(8, 8);
        assert!((gram - id).amax() < 1e-10);
    }

    #[test]
    fn convergence_failure_is_reported() {
        // Deep, wide wells need far more than 12 oscillator states.
        let p = CircuitParams::new(20.0, 0.5, 0.05, 500).unwrap();
        let err = spectrum(&p, FluxBias(0.5), 3, &BasisConfig::with_dim(12)).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }), "{err}");
    }

    #[test]
    fn sweep_preserves_order_and_names_bad_points() {
        let p = device_a();
        let grid: Vec<FluxBias> = (0..6).map(|i| FluxBias(0.1 * i as f64)).collect();
        let sweep = flux_sweep(&p, &grid, 3, &BasisConfig::default()).unwrap();
        for ((f, t), g) in sweep.iter().zip(&grid) {
            assert_eq!(f, g);
            assert_eq!(t.flux, *g);
        }
        let bad = [FluxBias(0.2), FluxBias(f64::INFINITY)];
        match flux_sweep(&p, &bad, 3, &BasisConfig::default()) {
            Err(Error::SweepPoint { flux, .. }) => assert!(flux.is_infinite()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(flux_sweep(&p, &[], 3, &BasisConfig::default()).is_err());
    }

    #[test]
    fn transition_table_lookup() {
        let s = spectrum(&device_a(), FluxBias(0.5), 4, &BasisConfig::default()).unwrap();
        let t = transitions(&s).unwrap();
        assert_eq!(t.entries.len(), 6);
        for e in &t.entries {
            assert_eq!(t.get(e.i, e.j), Some(e));
            assert_eq!(t.get(e.j, e.i), Some(e));
            assert!(e.f_ij > 0.0 && e.phi_ij >= 0.0 && e.n_ij >= 0.0);
        }
        assert_eq!(t.frequency(2, 0), Some(-t.get(0, 2).unwrap().f_ij));
        assert!(t.get(1, 1).is_none());
        assert!(t.get(0, 4).is_none());
    }
}

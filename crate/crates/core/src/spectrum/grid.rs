//! Independent finite-difference solver on a uniform phase grid.
//!
//! Discretizes H on [-phi_max, phi_max] with Dirichlet ends and the
//! three-point Laplacian, giving a symmetric tridiagonal matrix. Eigenvalues
//! come from Sturm-sequence bisection, eigenvectors from inverse iteration.
//! The solve is repeated with the step halved and the two eigenvalue sets are
//! Richardson-extrapolated (the scheme error is O(h^2)); the size of the
//! correction doubles as the under-resolution check.

use nalgebra::DMatrix;

use super::{CircuitParams, FluxBias, Representation, Spectrum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Interior points of the coarse grid; the fine grid has 2 points + 1.
    pub points: usize,
    /// Inductive confinement at the boundary relative to the retained energy scale.
    pub confinement: f64,
    /// Largest coarse-to-fine relative eigenvalue change accepted.
    pub max_doubling_change: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points: 8192,
            confinement: 20.0,
            max_doubling_change: 1e-4,
        }
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn build(params: &CircuitParams, phase: f64, phi_max: f64, points: usize) -> (Self, f64) {
        let step = 2.0 * phi_max / (points as f64 + 1.0);
        let kinetic = 4.0 * params.e_c / (step * step);
        let diag = (0..points)
            .map(|i| {
                let x = -phi_max + step * (i as f64 + 1.0);
                2.0 * kinetic + 0.5 * params.e_l * x * x - params.e_j * (x - phase).cos()
            })
            .collect();
        (Tridiagonal { diag, off: -kinetic }, step)
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - off2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |a, &d| a.min(d - r));
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |a, &d| a.max(d + r));
        (lo, hi)
    }

    /// k-th smallest eigenvalue (0-based) by bisection to machine precision.
    fn eigenvalue(&self, k: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve (T - shift) y = b by LU with partial pivoting.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        // Rows after elimination hold up to two superdiagonals.
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut du = vec![self.off; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = vec![self.off; n.saturating_sub(1)];
        let mut rhs = b.to_vec();
        let tiny = f64::EPSILON * self.off.abs().max(1.0);
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let l = dl[i] / d[i];
                dl[i] = l;
                d[i + 1] -= l * du[i];
                rhs[i + 1] -= l * rhs[i];
            } else {
                // swap rows i and i+1
                let l = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = l;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - l * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -l;
                }
                rhs.swap(i, i + 1);
                rhs[i + 1] -= l * rhs[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        let mut x = rhs;
        x[n - 1] /= d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }

    fn eigenvector(&self, value: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.diag.len();
        let shift = value + 1e-12 * value.abs().max(1.0);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            v = self.shifted_solve(shift, &v);
            for p in previous {
                let overlap: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(p).for_each(|(x, y)| *x -= overlap * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    fn lowest(&self, n_levels: usize) -> Vec<f64> {
        let bounds = self.gershgorin();
        (0..n_levels).map(|k| self.eigenvalue(k, bounds)).collect()
    }
}

/// Finite-difference reference solve with default [`GridConfig`].
pub fn grid_oracle(params: &CircuitParams, flux: FluxBias, n_levels: usize) -> Result<Spectrum> {
    grid_oracle_with(params, flux, n_levels, &GridConfig::default())
}

pub fn grid_oracle_with(
    params: &CircuitParams,
    flux: FluxBias,
    n_levels: usize,
    config: &GridConfig,
) -> Result<Spectrum> {
    params.validate()?;
    FluxBias::new(flux.0)?;
    if n_levels < 1 {
        return Err(Error::invalid("grid oracle needs at least one level"));
    }
    if config.points < 2048 {
        return Err(Error::invalid(format!(
            "grid needs at least 2048 points, got {}",
            config.points
        )));
    }
    // Energy above the potential floor (>= -E_J) spanned by the retained levels,
    // bounded generously by the junction depth plus an oscillator ladder.
    let span = 2.0 * params.e_j + (n_levels as f64 + 1.0) * params.plasma_frequency();
    let phi_max = (2.0 * config.confinement * span / params.e_l).sqrt();
    let phase = flux.phase();

    let (coarse, _) = Tridiagonal::build(params, phase, phi_max, config.points);
    let (fine, step) = Tridiagonal::build(params, phase, phi_max, 2 * config.points + 1);
    let e_coarse = coarse.lowest(n_levels);
    let e_fine = fine.lowest(n_levels);

    let mut energies = Vec::with_capacity(n_levels);
    for (level, (c, f)) in e_coarse.iter().zip(&e_fine).enumerate() {
        let rel = (f - c).abs() / f.abs().max(1e-3);
        if rel > config.max_doubling_change {
            return Err(Error::GridUnderResolved { level, rel });
        }
        energies.push((4.0 * f - c) / 3.0);
    }

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_levels);
    for &e in &e_fine {
        let v = fine.eigenvector(e, &vectors);
        vectors.push(v);
    }
    let points = fine.diag.len();
    let xs: Vec<f64> = (0..points).map(|i| -phi_max + step * (i as f64 + 1.0)).collect();
    let derivative = |v: &[f64]| -> Vec<f64> {
        (0..points)
            .map(|i| {
                let up = if i + 1 < points { v[i + 1] } else { 0.0 };
                let down = if i > 0 { v[i - 1] } else { 0.0 };
                (up - down) / (2.0 * step)
            })
            .collect()
    };
    let derivs: Vec<Vec<f64>> = vectors.iter().map(|v| derivative(v)).collect();
    let mut phase_elements = DMatrix::zeros(n_levels, n_levels);
    let mut charge_elements = DMatrix::zeros(n_levels, n_levels);
    for i in 0..n_levels {
        for j in 0..n_levels {
            phase_elements[(i, j)] = (0..points).map(|k| vectors[i][k] * xs[k] * vectors[j][k]).sum();
            // n = -i d/dphi, so <i|n|j> = i * (-<i|d/dphi|j>)
            charge_elements[(i, j)] = -(0..points).map(|k| vectors[i][k] * derivs[j][k]).sum::<f64>();
        }
    }
    let eigenvectors = DMatrix::from_fn(points, n_levels, |r, c| vectors[c][r]);

    Ok(Spectrum {
        params: *params,
        flux,
        basis: super::BasisConfig {
            dim: points,
            tol: config.max_doubling_change,
        },
        energies,
        eigenvectors,
        representation: Representation::PhaseGrid { phi_max, step },
        phase_elements,
        charge_elements,
    })
}

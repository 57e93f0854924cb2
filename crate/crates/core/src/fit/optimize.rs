use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::dataset::{SpectroscopyDataset, TransitionLabel};
use super::model::{line_frequency, FluxCalibration};
use crate::error::{Error, Result};
use crate::spectrum::{spectrum, spectrum_unchecked, BasisConfig, CircuitParams};

const N_PARAMS: usize = 5;
const PARAM_NAMES: [&str; N_PARAMS] = ["E_J_GHz", "E_C_GHz", "E_L_GHz", "offset_phi0", "scale_phi0_per_bias"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    LevenbergMarquardt,
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub method: FitMethod,
    pub max_iterations: usize,
    /// Scaled-gradient tolerance, see [`FitResult::gradient_norm`].
    pub gtol: f64,
    /// Columns-normalised J^T J with a larger condition number is singular.
    pub max_condition: f64,
    /// Simplex stops once the cost spread across vertices falls below
    /// ftol (1 + cost).
    pub ftol: f64,
    pub f_readout: f64,
    pub basis: BasisConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            method: FitMethod::LevenbergMarquardt,
            max_iterations: 200,
            gtol: 1e-6,
            max_condition: 1e10,
            ftol: 1e-10,
            f_readout: 7.5,
            basis: BasisConfig::default(),
        }
    }
}

impl FitOptions {
    /// Nelder-Mead needs many more (cheaper) iterations and converges to a
    /// looser gradient.
    pub fn simplex() -> Self {
        FitOptions {
            method: FitMethod::Simplex,
            max_iterations: 3000,
            gtol: 1e-3,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitInit {
    pub params: CircuitParams,
    pub calib: FluxCalibration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub bias: f64,
    #[serde(rename = "freq_GHz")]
    pub freq: f64,
    pub label: TransitionLabel,
    #[serde(rename = "model_GHz")]
    pub model: f64,
    #[serde(rename = "residual_GHz")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: CircuitParams,
    pub calib: FluxCalibration,
    pub method: FitMethod,
    /// Unweighted RMS of model - data, GHz.
    #[serde(rename = "residual_rms_GHz")]
    pub residual_rms: f64,
    pub chi2: f64,
    pub reduced_chi2: f64,
    pub parameter_names: [&'static str; N_PARAMS],
    /// (J^T J)^-1 of the sigma-weighted residuals, row-major 5x5.
    pub covariance: Vec<f64>,
    pub std_errors: [f64; N_PARAMS],
    /// max_k |J_k . r| / (|J_k| max(1, |r|)), with J_k the k-th column.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Vec<Residual>,
}

impl FitResult {
    pub fn values(&self) -> [f64; N_PARAMS] {
        to_vector(&self.params, &self.calib)
    }

    pub fn covariance_entry(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * N_PARAMS + j]
    }
}

fn to_vector(p: &CircuitParams, c: &FluxCalibration) -> [f64; N_PARAMS] {
    [p.e_j, p.e_c, p.e_l, c.offset, c.scale]
}

fn from_vector(x: &[f64], n_junctions: u32) -> (CircuitParams, FluxCalibration) {
    (
        CircuitParams {
            e_j: x[0],
            e_c: x[1],
            e_l: x[2],
            n_junctions,
        },
        FluxCalibration {
            offset: x[3],
            scale: x[4],
        },
    )
}

/// Residual evaluator: one diagonalization per distinct bias.
struct Problem<'a> {
    data: &'a SpectroscopyDataset,
    biases: Vec<f64>,
    point_bias: Vec<usize>,
    levels: usize,
    n_junctions: u32,
    options: &'a FitOptions,
}

impl<'a> Problem<'a> {
    fn new(data: &'a SpectroscopyDataset, n_junctions: u32, options: &'a FitOptions) -> Self {
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut biases = Vec::new();
        let point_bias = data
            .points
            .iter()
            .map(|p| {
                *index.entry(p.bias.to_bits()).or_insert_with(|| {
                    biases.push(p.bias);
                    biases.len() - 1
                })
            })
            .collect();
        let levels = data
            .points
            .iter()
            .map(|p| p.label.levels_needed())
            .max()
            .unwrap_or(2)
            .max(2);
        Problem {
            data,
            biases,
            point_bias,
            levels,
            n_junctions,
            options,
        }
    }

    fn model(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (params, calib) = from_vector(x, self.n_junctions);
        params.validate()?;
        if !(params.e_j > 0.0 && params.e_c > 0.0 && params.e_l > 0.0) {
            return Err(Error::invalid("fit left the physical parameter region"));
        }
        let spectra: Vec<_> = self
            .biases
            .par_iter()
            .map(|&b| spectrum_unchecked(&params, calib.flux(b), self.levels, &self.options.basis))
            .collect::<Result<_>>()?;
        self.data
            .points
            .iter()
            .zip(&self.point_bias)
            .map(|(p, &k)| line_frequency(&spectra[k], p.label, self.options.f_readout))
            .collect()
    }

    fn weighted(&self, x: &[f64]) -> Result<DVector<f64>> {
        let m = self.model(x)?;
        Ok(DVector::from_iterator(
            m.len(),
            m.iter().zip(&self.data.points).map(|(m, p)| (m - p.freq) / p.sigma),
        ))
    }

    fn cost(&self, x: &[f64]) -> Result<f64> {
        Ok(self.weighted(x)?.norm_squared())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.data.points.len();
        let mut jac = DMatrix::zeros(n, N_PARAMS);
        for k in 0..N_PARAMS {
            let h = 1e-6 * x[k].abs().max(1e-3);
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[k] += h;
            down[k] -= h;
            let col = (self.weighted(&up)? - self.weighted(&down)?) / (2.0 * h);
            jac.set_column(k, &col);
        }
        Ok(jac)
    }
}

fn gradient_norm(jac: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    let g = jac.transpose() * r;
    let scale = r.norm().max(1.0);
    (0..N_PARAMS)
        .map(|k| {
            let c = jac.column(k).norm();
            if c > 0.0 {
                g[k].abs() / (c * scale)
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Condition number of J^T J after normalising the columns of J.
fn scaled_condition(jac: &DMatrix<f64>) -> f64 {
    let mut j = jac.clone();
    for mut col in j.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    let eig = SymmetricEigen::new(j.transpose() * &j).eigenvalues;
    let max = eig.iter().copied().fold(f64::MIN, f64::max);
    let min = eig.iter().copied().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn levenberg_marquardt(problem: &Problem, x0: [f64; N_PARAMS]) -> Result<([f64; N_PARAMS], usize, bool)> {
    let opts = problem.options;
    let mut x = x0;
    let mut r = problem.weighted(&x)?;
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut jac = problem.jacobian(&x)?;
    let condition = scaled_condition(&jac);
    if condition.is_nan() || condition > opts.max_condition {
        return Err(Error::SingularJacobian { condition });
    }
    for iter in 1..=opts.max_iterations {
        if gradient_norm(&jac, &r) <= opts.gtol {
            return Ok((x, iter - 1, true));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..N_PARAMS {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut trial = x;
            for k in 0..N_PARAMS {
                trial[k] += step[k];
            }
            match problem.weighted(&trial) {
                Ok(rt) if rt.norm_squared() < cost => {
                    x = trial;
                    r = rt;
                    cost = r.norm_squared();
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        jac = problem.jacobian(&x)?;
        if !accepted {
            // no descent step exists at machine precision
            return Ok((x, iter, gradient_norm(&jac, &r) <= opts.gtol));
        }
    }
    Ok((x, opts.max_iterations, gradient_norm(&jac, &r) <= opts.gtol))
}

fn nelder_mead(problem: &Problem, x0: [f64; N_PARAMS]) -> Result<([f64; N_PARAMS], usize)> {
    let f = |x: &[f64; N_PARAMS]| problem.cost(x).unwrap_or(f64::INFINITY);
    let mut simplex: Vec<([f64; N_PARAMS], f64)> = Vec::with_capacity(N_PARAMS + 1);
    simplex.push((x0, f(&x0)));
    if !simplex[0].1.is_finite() {
        problem.cost(&x0)?;
    }
    for k in 0..N_PARAMS {
        let mut v = x0;
        v[k] += if v[k].abs() > 1e-3 { 0.05 * v[k] } else { 0.01 };
        simplex.push((v, f(&v)));
    }
    let mut iterations = 0;
    while iterations < problem.options.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[N_PARAMS].1);
        if (worst - best).abs() <= problem.options.ftol * (1.0 + best.abs()) {
            break;
        }
        iterations += 1;
        let mut centroid = [0.0; N_PARAMS];
        for (v, _) in &simplex[..N_PARAMS] {
            for k in 0..N_PARAMS {
                centroid[k] += v[k] / N_PARAMS as f64;
            }
        }
        let along = |t: f64| {
            let mut p = [0.0; N_PARAMS];
            for k in 0..N_PARAMS {
                p[k] = centroid[k] + t * (simplex[N_PARAMS].0[k] - centroid[k]);
            }
            p
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[N_PARAMS] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N_PARAMS - 1].1 {
            simplex[N_PARAMS] = (xr, fr);
        } else {
            let xc = if fr < worst { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < worst.min(fr) {
                simplex[N_PARAMS] = (xc, fc);
            } else {
                let x_best = simplex[0].0;
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for k in 0..N_PARAMS {
                        v[k] = x_best[k] + 0.5 * (v[k] - x_best[k]);
                    }
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok((simplex[0].0, iterations))
}

/// Weighted least-squares fit of (E_J, E_C, E_L, offset, scale).
///
/// Levenberg-Marquardt uses a central-difference Jacobian and Marquardt
/// scaling of the damping term (lambda starts at 1e-3, x10 on rejection,
/// /10 on acceptance). The returned covariance is (J^T J)^-1 at the optimum,
/// which is calibrated when the point sigmas are the true noise.
pub fn fit(data: &SpectroscopyDataset, init: &FitInit, options: &FitOptions) -> Result<FitResult> {
    data.validate()?;
    init.params.validate()?;
    options.basis.validate()?;
    let problem = Problem::new(data, init.params.n_junctions, options);
    // The basis must be adequate at the starting point; the fit then runs
    // without the doubling check.
    for &b in &problem.biases {
        spectrum(&init.params, init.calib.flux(b), problem.levels, &options.basis)?;
    }
    let x0 = to_vector(&init.params, &init.calib);
    let (x, iterations, lm_converged) = match options.method {
        FitMethod::LevenbergMarquardt => levenberg_marquardt(&problem, x0)?,
        FitMethod::Simplex => {
            let (x, it) = nelder_mead(&problem, x0)?;
            (x, it, true)
        }
    };
    let r = problem.weighted(&x)?;
    let jac = problem.jacobian(&x)?;
    let gnorm = gradient_norm(&jac, &r);
    let converged = lm_converged && gnorm <= options.gtol;
    if !converged && iterations >= options.max_iterations {
        return Err(Error::FitNotConverged { iterations });
    }
    let condition = scaled_condition(&jac);
    let jtj = jac.transpose() * &jac;
    let cov = match jtj.try_inverse() {
        Some(c) if condition <= options.max_condition => c,
        _ => return Err(Error::SingularJacobian { condition }),
    };
    let (params, calib) = from_vector(&x, init.params.n_junctions);
    let model = problem.model(&x)?;
    let residuals: Vec<Residual> = data
        .points
        .iter()
        .zip(&model)
        .map(|(p, &m)| Residual {
            bias: p.bias,
            freq: p.freq,
            label: p.label,
            model: m,
            residual: m - p.freq,
        })
        .collect();
    let n = residuals.len() as f64;
    let residual_rms = (residuals.iter().map(|q| q.residual * q.residual).sum::<f64>() / n).sqrt();
    let chi2 = r.norm_squared();
    let mut std_errors = [0.0; N_PARAMS];
    for k in 0..N_PARAMS {
        std_errors[k] = cov[(k, k)].max(0.0).sqrt();
    }
    Ok(FitResult {
        params,
        calib,
        method: options.method,
        residual_rms,
        chi2,
        reduced_chi2: chi2 / (n - N_PARAMS as f64).max(1.0),
        parameter_names: PARAM_NAMES,
        covariance: (0..N_PARAMS * N_PARAMS)
            .map(|k| cov[(k / N_PARAMS, k % N_PARAMS)])
            .collect(),
        std_errors,
        gradient_norm: gnorm,
        iterations,
        converged,
        residuals,
    })
}

//! Operators in the number basis of the linear oscillator.
//!
//! With phi = phi_zpf (a + a^dag) and n = i (a^dag - a) / (2 phi_zpf), the
//! junction term is built from the displacement operator e^{i phi} =
//! D(i phi_zpf), whose number-basis elements are known in closed form:
//!
//! ```text
//! <m|D(alpha)|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2),  m >= n
//! ```
//!
//! For alpha = i phi_zpf this is i^|m-n| R_mn with R real symmetric, so
//! cos(phi - phi_ext) has elements R_mn cos(k pi/2 - phi_ext) and
//! sin(phi - phi_ext) has elements R_mn sin(k pi/2 - phi_ext), k = |m - n|.
//! Using these exact elements keeps the truncated cosine a projection of the
//! true operator instead of a truncated power series.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use super::CircuitParams;

/// Real magnitudes R_mn of the displacement operator D(i phi_zpf).
///
/// Uses the normalized Laguerre recurrence
/// `T_j = sqrt(j!/(j+k)!) L_j^(k)(x)`, which stays O(1) and avoids the
/// factorial overflow of the textbook form.
pub fn displacement_magnitudes(phi_zpf: f64, dim: usize) -> DMatrix<f64> {
    let x = phi_zpf * phi_zpf;
    let mut r = DMatrix::zeros(dim, dim);
    let mut ln_fact = 0.0;
    for k in 0..dim {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        // phi_zpf^k e^{-x/2} / sqrt(k!)
        let scale = (k as f64 * phi_zpf.ln() - 0.5 * x - 0.5 * ln_fact).exp();
        let kf = k as f64;
        let mut prev = 1.0;
        let mut cur = (1.0 + kf - x) / (1.0 + kf).sqrt();
        for n in 0..dim - k {
            let t = match n {
                0 => prev,
                1 => cur,
                _ => {
                    let j = (n - 1) as f64;
                    let next = ((2.0 * j + 1.0 + kf - x) * cur - (j * (j + kf)).sqrt() * prev)
                        / ((j + 1.0) * (j + 1.0 + kf)).sqrt();
                    prev = cur;
                    cur = next;
                    next
                }
            };
            let v = scale * t;
            r[(n + k, n)] = v;
            r[(n, n + k)] = v;
        }
    }
    r
}

/// phi = phi_zpf (a + a^dag), truncated.
pub fn phase_operator(phi_zpf: f64, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let v = phi_zpf * (n as f64).sqrt();
        m[(n - 1, n)] = v;
        m[(n, n - 1)] = v;
    }
    m
}

/// Real antisymmetric C with n = i C, i.e. C = (a^dag - a) / (2 phi_zpf).
pub fn charge_operator(phi_zpf: f64, dim: usize) -> DMatrix<f64> {
    let n_zpf = 0.5 / phi_zpf;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let v = n_zpf * (n as f64).sqrt();
        // <n|a^dag|n-1> = sqrt(n), <n-1|a|n> = sqrt(n)
        m[(n, n - 1)] = v;
        m[(n - 1, n)] = -v;
    }
    m
}

/// Flux-independent pieces of the Hamiltonian for one (E_C, E_L, dim).
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub dim: usize,
    pub phi_zpf: f64,
    /// sqrt(8 E_L E_C), GHz
    pub omega: f64,
    r: DMatrix<f64>,
}

impl OscillatorBasis {
    pub fn new(params: &CircuitParams, dim: usize) -> Self {
        let phi_zpf = params.phi_zpf();
        OscillatorBasis {
            dim,
            phi_zpf,
            omega: params.plasma_frequency(),
            r: displacement_magnitudes(phi_zpf, dim),
        }
    }

    fn junction_matrix(&self, phase: f64, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        // Only the k mod 4 pattern matters; precompute it.
        let factors: [f64; 4] = std::array::from_fn(|k| f(k as f64 * FRAC_PI_2 - phase));
        DMatrix::from_fn(self.dim, self.dim, |m, n| self.r[(m, n)] * factors[m.abs_diff(n) % 4])
    }

    /// cos(phi - phi_ext).
    pub fn cos_matrix(&self, phase: f64) -> DMatrix<f64> {
        self.junction_matrix(phase, f64::cos)
    }

    /// sin(phi - phi_ext).
    pub fn sin_matrix(&self, phase: f64) -> DMatrix<f64> {
        self.junction_matrix(phase, f64::sin)
    }

    pub fn hamiltonian(&self, e_j: f64, phase: f64) -> DMatrix<f64> {
        let mut h = self.cos_matrix(phase) * (-e_j);
        for n in 0..self.dim {
            h[(n, n)] += self.omega * (n as f64 + 0.5);
        }
        h
    }
}

//! Eigenbasis of the reference box `[-1, 1]^n` and pure states expanded in it.
//!
//! `χ_n(x) = Π_i sin(π n_i (x_i + 1) / 2)`, `E_n = π² |n|² / (8 m)`, with ħ = 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Quadrature order used for Gaussian overlaps.
pub const PROJECTION_ORDER: usize = 200;

/// Box eigenmode index, one positive quantum number per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(Vec<u32>);

impl Mode {
    pub fn new(quanta: Vec<u32>) -> Result<Self> {
        if quanta.is_empty() || quanta.contains(&0) {
            return Err(Error::InvalidState(format!(
                "mode quantum numbers must be >= 1, got {quanta:?}"
            )));
        }
        Ok(Self(quanta))
    }

    pub fn single(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn quanta(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `sin(π θ)` with exact zeros at integer `θ`.
pub(crate) fn sin_pi(theta: f64) -> f64 {
    let r = theta - 2.0 * (theta / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

/// `cos(π θ)` with exact zeros at half-integer `θ`.
pub(crate) fn cos_pi(theta: f64) -> f64 {
    let r = theta - 2.0 * (theta / 2.0).round();
    if r.abs() == 0.5 {
        0.0
    } else {
        (PI * r).cos()
    }
}

/// One-axis eigenfunction `sin(π n (x + 1) / 2)`.
pub fn axis_eigenfunction(n: u32, x: f64) -> f64 {
    sin_pi(0.5 * n as f64 * (x + 1.0))
}

/// Derivative of [`axis_eigenfunction`].
pub fn axis_eigenfunction_derivative(n: u32, x: f64) -> f64 {
    0.5 * PI * n as f64 * cos_pi(0.5 * n as f64 * (x + 1.0))
}

pub fn eigenfunction(mode: &Mode, x: &[f64]) -> f64 {
    mode.0
        .iter()
        .zip(x)
        .map(|(&n, &xi)| axis_eigenfunction(n, xi))
        .product()
}

pub fn eigenfunction_gradient(mode: &Mode, x: &[f64]) -> Vec<f64> {
    let values: Vec<f64> = mode.0.iter().zip(x).map(|(&n, &xi)| axis_eigenfunction(n, xi)).collect();
    (0..x.len())
        .map(|k| {
            let mut g = axis_eigenfunction_derivative(mode.0[k], x[k]);
            for (i, v) in values.iter().enumerate() {
                if i != k {
                    g *= v;
                }
            }
            g
        })
        .collect()
}

/// Axis energy `π² n² / (8 m)`.
pub fn axis_energy(n: u32, mass: f64) -> f64 {
    PI * PI * (n as f64).powi(2) / (8.0 * mass)
}

/// `Σ_i π² n_i² / (8 m)`.
pub fn energy(mode: &Mode, mass: f64) -> f64 {
    mode.0.iter().map(|&n| axis_energy(n, mass)).sum()
}

/// A time-dependent wavefunction of a particle in a billiard.
///
/// The box state [`StateExpansion`] is the shipped implementation; other
/// billiards can supply their own eigenfunction sums through this trait.
pub trait WaveFunction: Sync {
    fn dim(&self) -> usize;

    fn mass(&self) -> f64;

    fn psi(&self, x: &[f64], t: f64) -> Complex64;

    fn grad_psi(&self, x: &[f64], t: f64) -> Vec<Complex64>;

    /// `f(x, y, t) = φ*(x - y/2, t) φ(x + y/2, t)`.
    fn f(&self, x: &[f64], y: &[f64], t: f64) -> Complex64 {
        let (minus, plus) = shifted(x, y);
        self.psi(&minus, t).conj() * self.psi(&plus, t)
    }

    /// `∇_x f(x, y, t)` from analytic wavefunction gradients.
    fn grad_x_f(&self, x: &[f64], y: &[f64], t: f64) -> Vec<Complex64> {
        let (minus, plus) = shifted(x, y);
        let a = self.psi(&minus, t).conj();
        let b = self.psi(&plus, t);
        let ga = self.grad_psi(&minus, t);
        let gb = self.grad_psi(&plus, t);
        ga.iter().zip(&gb).map(|(da, db)| da.conj() * b + a * db).collect()
    }
}

pub(crate) fn shifted(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let minus = x.iter().zip(y).map(|(a, b)| a - 0.5 * b).collect();
    let plus = x.iter().zip(y).map(|(a, b)| a + 0.5 * b).collect();
    (minus, plus)
}

/// Normalized superposition `φ(x, t) = Σ c_n e^{-i E_n t} χ_n(x)` of box modes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateExpansion {
    modes: Vec<Mode>,
    coeffs: Vec<Complex64>,
    energies: Vec<f64>,
    mass: f64,
}

impl StateExpansion {
    /// Builds a state from raw coefficients, normalizing them to unit norm.
    pub fn new(modes: Vec<Mode>, coeffs: Vec<Complex64>, mass: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidState("mode list is empty".into()));
        }
        if modes.len() != coeffs.len() {
            return Err(Error::InvalidState(format!(
                "{} modes but {} coefficients",
                modes.len(),
                coeffs.len()
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidState(format!("mass must be positive, got {mass}")));
        }
        let dim = modes[0].dim();
        if let Some(m) = modes.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidState(format!("mode {:?} listed twice", m.quanta())));
            }
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidState("coefficients must be finite".into()));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("all coefficients are zero".into()));
        }
        let coeffs = coeffs.into_iter().map(|c| c / norm).collect();
        let energies = modes.iter().map(|m| energy(m, mass)).collect();
        Ok(Self {
            modes,
            coeffs,
            energies,
            mass,
        })
    }

    /// Single eigenmode with unit coefficient.
    pub fn eigenstate(mode: Mode, mass: f64) -> Result<Self> {
        Self::new(vec![mode], vec![Complex64::new(1.0, 0.0)], mass)
    }

    /// Projects `φ₀(x) = Π (2/π)^{1/4} exp(-x_i²/a² - i p0_i x_i)` onto `modes`.
    ///
    /// `c_n ∝ ∫ χ_n(x) φ₀(x) dx` by Gauss–Legendre quadrature of
    /// [`PROJECTION_ORDER`] nodes per axis, then normalized.
    pub fn project_gaussian(width: f64, p0: &[f64], modes: Vec<Mode>, mass: f64) -> Result<Self> {
        Self::project_gaussian_with_order(width, p0, modes, mass, PROJECTION_ORDER)
    }

    pub fn project_gaussian_with_order(
        width: f64,
        p0: &[f64],
        modes: Vec<Mode>,
        mass: f64,
        order: usize,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidState(format!("Gaussian width must be positive, got {width}")));
        }
        if let Some(m) = modes.iter().find(|m| m.dim() != p0.len()) {
            return Err(Error::DimensionMismatch {
                expected: p0.len(),
                got: m.dim(),
            });
        }
        let gl = GaussLegendre::new(order);
        let amplitude = (2.0 / PI).powf(0.25);
        let axis_overlap = |n: u32, k0: f64| -> Complex64 {
            gl.integrate(-1.0, 1.0, 1, |x| {
                let envelope = amplitude * (-x * x / (width * width)).exp();
                Complex64::from_polar(envelope, -k0 * x) * axis_eigenfunction(n, x)
            })
        };
        let raw: Vec<Complex64> = modes
            .iter()
            .map(|m| {
                m.quanta()
                    .iter()
                    .zip(p0)
                    .map(|(&n, &k0)| axis_overlap(n, k0))
                    .product()
            })
            .collect();
        let max_overlap = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max_overlap < 1e-14 {
            return Err(Error::DegenerateState { max_overlap });
        }
        Self::new(modes, raw, mass)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ |c_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// True when only one energy level is populated.
    pub fn is_stationary(&self) -> bool {
        self.energies.iter().all(|&e| (e - self.energies[0]).abs() <= 1e-14 * e.abs())
    }

    /// Coefficients at time `t`, `c_n e^{-i E_n t}`.
    pub fn evolved_coeffs(&self, t: f64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .zip(&self.energies)
            .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    /// Tensor product of two states on orthogonal axes.
    pub fn tensor(&self, other: &StateExpansion) -> Result<Self> {
        if self.mass != other.mass {
            return Err(Error::InvalidState("tensor factors must share the mass".into()));
        }
        let mut modes = Vec::with_capacity(self.len() * other.len());
        let mut coeffs = Vec::with_capacity(self.len() * other.len());
        for (ma, ca) in self.modes.iter().zip(&self.coeffs) {
            for (mb, cb) in other.modes.iter().zip(&other.coeffs) {
                let mut q = ma.quanta().to_vec();
                q.extend_from_slice(mb.quanta());
                modes.push(Mode(q));
                coeffs.push(ca * cb);
            }
        }
        Self::new(modes, coeffs, self.mass)
    }
}

impl WaveFunction for StateExpansion {
    fn dim(&self) -> usize {
        self.modes[0].dim()
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn psi(&self, x: &[f64], t: f64) -> Complex64 {
        self.modes
            .iter()
            .zip(self.evolved_coeffs(t))
            .map(|(m, c)| c * eigenfunction(m, x))
            .sum()
    }

    fn grad_psi(&self, x: &[f64], t: f64) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); x.len()];
        for (m, c) in self.modes.iter().zip(self.evolved_coeffs(t)) {
            for (gk, dk) in g.iter_mut().zip(eigenfunction_gradient(m, x)) {
                *gk += c * dk;
            }
        }
        g
    }
}

/// Momentum amplitude `φ̃(p, t) = (2π)^{-1/2} ∫ e^{-ipx} φ(x, t) dx` of a
/// one-dimensional box state, by composite Gauss–Legendre quadrature whose
/// panel count grows with `|p|`.
pub fn momentum_amplitude(state: &StateExpansion, p: f64, t: f64) -> Result<Complex64> {
    if state.modes[0].dim() != 1 {
        return Err(Error::Unsupported("momentum amplitudes of one-dimensional states".into()));
    }
    let kmax = state
        .modes
        .iter()
        .map(|m| 0.5 * PI * m.quanta()[0] as f64)
        .fold(0.0, f64::max);
    let panels = 2 + ((p.abs() + kmax) / PI).ceil() as usize;
    let gl = GaussLegendre::new(32);
    let c = state.evolved_coeffs(t);
    let integral: Complex64 = gl.integrate(-1.0, 1.0, panels, |x| {
        let phi: Complex64 = state
            .modes
            .iter()
            .zip(&c)
            .map(|(m, ci)| ci * axis_eigenfunction(m.quanta()[0], x))
            .sum();
        Complex64::from_polar(1.0, -p * x) * phi
    });
    Ok(integral / (2.0 * PI).sqrt())
}

/// Freely moving Gaussian packet on the whole line,
/// `φ(x, 0) = (2/(π a²))^{1/4} exp(-(x - x₀)²/a² + i p₀ (x - x₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeGaussian {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    pub mass: f64,
}

impl FreeGaussian {
    pub fn new(center: f64, momentum: f64, width: f64, mass: f64) -> Result<Self> {
        if !(width > 0.0 && mass > 0.0 && center.is_finite() && momentum.is_finite()) {
            return Err(Error::InvalidState(format!(
                "Gaussian packet needs positive width and mass, got a = {width}, m = {mass}"
            )));
        }
        Ok(Self {
            center,
            momentum,
            width,
            mass,
        })
    }

    /// Closed-form Wigner function `(1/π) exp(-2X²/a² - a²(p - p₀)²/2)`,
    /// `X = x - x₀ - p t / m`.
    pub fn wigner(&self, x: f64, p: f64, t: f64) -> f64 {
        let a = self.width;
        let xs = x - self.center - p * t / self.mass;
        let dp = p - self.momentum;
        (-2.0 * xs * xs / (a * a) - 0.5 * a * a * dp * dp).exp() / PI
    }

    /// `∂W/∂t = -(p/m) ∂W/∂x`.
    pub fn wigner_dt(&self, x: f64, p: f64, t: f64) -> f64 {
        let a = self.width;
        let xs = x - self.center - p * t / self.mass;
        self.wigner(x, p, t) * 4.0 * xs / (a * a) * p / self.mass
    }

    fn spread(&self, t: f64) -> Complex64 {
        Complex64::new(1.0, 2.0 * t / (self.mass * self.width * self.width))
    }
}

impl WaveFunction for FreeGaussian {
    fn dim(&self) -> usize {
        1
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn psi(&self, x: &[f64], t: f64) -> Complex64 {
        let a = self.width;
        let s = self.spread(t);
        let u = x[0] - self.center - self.momentum * t / self.mass;
        let phase = self.momentum * (x[0] - self.center) - 0.5 * self.momentum * self.momentum * t / self.mass;
        let amp = (2.0 / (PI * a * a)).powf(0.25) / s.sqrt();
        amp * (-(u * u) / (s * a * a)).exp() * Complex64::from_polar(1.0, phase)
    }

    fn grad_psi(&self, x: &[f64], t: f64) -> Vec<Complex64> {
        let a = self.width;
        let s = self.spread(t);
        let u = x[0] - self.center - self.momentum * t / self.mass;
        let log_d = -2.0 * u / (s * a * a) + Complex64::new(0.0, self.momentum);
        vec![self.psi(x, t) * log_d]
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::StateExpansion;

const REALNESS_TOLERANCE: f64 = 1e-10;

/// One term `coeff(x) · δ(p - shift)` with `coeff(x) = amplitude · e^{i k (1 + x)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombTerm {
    pub shift: f64,
    pub amplitude: f64,
    pub wavenumber: f64,
}

impl CombTerm {
    pub fn coeff(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.wavenumber * (1.0 + x))
    }

    pub fn coeff_dx(&self, x: f64) -> Complex64 {
        Complex64::new(0.0, self.wavenumber) * self.coeff(x)
    }
}

/// Free-particle Wigner transform of one eigenfunction product, a sum of
/// delta functions in `p` with `x`-dependent complex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaComb {
    terms: Vec<CombTerm>,
}

impl DeltaComb {
    /// Transform of `χ_a(x - y/2) χ_b(x + y/2)` over the whole `y` axis.
    ///
    /// With `k_n = π n / 2` the product of sines expands into four plane
    /// waves `e^{i q y}`, each of which transforms to `δ(p - q)`:
    ///
    /// ```text
    ///  q = -(k_a + k_b)/2   weight  1/4 e^{ i (k_a - k_b)(1 + x)}
    ///  q = +(k_a + k_b)/2   weight  1/4 e^{-i (k_a - k_b)(1 + x)}
    ///  q = +(k_b - k_a)/2   weight -1/4 e^{ i (k_a + k_b)(1 + x)}
    ///  q = -(k_b - k_a)/2   weight -1/4 e^{-i (k_a + k_b)(1 + x)}
    /// ```
    ///
    /// The last shift is `-(k_b - k_a)/2`; repeating `-(k_a + k_b)/2`
    /// there breaks agreement with the quadrature oracle.
    pub fn pair(conj_mode: u32, mode: u32) -> Self {
        let ka = 0.5 * PI * conj_mode as f64;
        let kb = 0.5 * PI * mode as f64;
        let terms = vec![
            CombTerm {
                shift: -0.5 * (ka + kb),
                amplitude: 0.25,
                wavenumber: ka - kb,
            },
            CombTerm {
                shift: 0.5 * (ka + kb),
                amplitude: 0.25,
                wavenumber: kb - ka,
            },
            CombTerm {
                shift: 0.5 * (kb - ka),
                amplitude: -0.25,
                wavenumber: ka + kb,
            },
            CombTerm {
                shift: -0.5 * (kb - ka),
                amplitude: -0.25,
                wavenumber: -(ka + kb),
            },
        ];
        Self { terms }
    }

    pub fn terms(&self) -> &[CombTerm] {
        &self.terms
    }

    /// `Σ coeff(x) δ(p - shift)` convolved in `p` with [`g_box`].
    pub fn convolve_g(&self, x: f64, p: f64) -> Complex64 {
        self.terms.iter().map(|t| t.coeff(x) * g_box(x, p - t.shift)).sum()
    }

    /// `x`-derivative of [`DeltaComb::convolve_g`].
    ///
    /// Only the weights are differentiated: the kernel-derivative terms sum
    /// to the eigenfunction product on the boundary of Ω, which vanishes.
    pub fn convolve_g_dx(&self, x: f64, p: f64) -> Complex64 {
        self.terms.iter().map(|t| t.coeff_dx(x) * g_box(x, p - t.shift)).sum()
    }
}

/// Comb entering `W = Σ c_n c_m* e^{-i(E_n - E_m)t} λ_nm *ₚ G`.
pub fn lambda_nm(n: u32, m: u32) -> DeltaComb {
    DeltaComb::pair(m, n)
}

/// `G(x, p)`, the Fourier transform of Ω(x, ·) for the box `[-1, 1]`:
/// `sin(2p(1 - |x|)) / (π p)`, zero for `|x| >= 1`.
pub fn g_box(x: f64, p: f64) -> f64 {
    let half = 2.0 * (1.0 - x.abs());
    if half <= 0.0 {
        return 0.0;
    }
    let z = p * half;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        half / PI * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sin() / (PI * p)
    }
}

/// Per-axis tables of `λ_ab *ₚ G` (or its `x`-derivative) for the
/// distinct quantum numbers of a state.
struct AxisTables {
    quanta: Vec<Vec<u32>>,
    values: Vec<Vec<Complex64>>,
    derivs: Vec<Vec<Complex64>>,
}

impl AxisTables {
    fn new(state: &StateExpansion, x: &[f64], p: &[f64], with_derivs: bool) -> Self {
        let dim = x.len();
        let mut quanta = vec![Vec::new(); dim];
        for m in state.modes() {
            for (axis, &n) in m.quanta().iter().enumerate() {
                if !quanta[axis].contains(&n) {
                    quanta[axis].push(n);
                }
            }
        }
        let mut values = Vec::with_capacity(dim);
        let mut derivs = Vec::with_capacity(dim);
        for axis in 0..dim {
            let q = &quanta[axis];
            let mut v = Vec::with_capacity(q.len() * q.len());
            let mut d = Vec::new();
            for &a in q {
                for &b in q {
                    let comb = DeltaComb::pair(a, b);
                    v.push(comb.convolve_g(x[axis], p[axis]));
                    if with_derivs {
                        d.push(comb.convolve_g_dx(x[axis], p[axis]));
                    }
                }
            }
            values.push(v);
            derivs.push(d);
        }
        Self { quanta, values, derivs }
    }

    fn slot(&self, axis: usize, a: u32, b: u32) -> usize {
        let q = &self.quanta[axis];
        let ia = q.iter().position(|&n| n == a).unwrap();
        let ib = q.iter().position(|&n| n == b).unwrap();
        ia * q.len() + ib
    }
}

fn check_reference_point(state: &StateExpansion, x: &[f64], p: &[f64]) -> Result<bool> {
    let dim = state.modes()[0].dim();
    if x.len() != dim || p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len().min(p.len()),
        });
    }
    Ok(x.iter().all(|xi| xi.abs() < 1.0))
}

/// Sums `Σ_{αβ} weight_{αβ} Π_i table_i(α_i, β_i)`, with `deriv_axis`
/// switching one axis to the derivative table.
fn pair_sum<W>(state: &StateExpansion, tables: &AxisTables, t: f64, deriv_axis: Option<usize>, weight: W) -> Complex64
where
    W: Fn(usize, usize) -> Complex64,
{
    let c = state.coeffs();
    let e = state.energies();
    let modes = state.modes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ia, ma) in modes.iter().enumerate() {
        for (ib, mb) in modes.iter().enumerate() {
            let de = e[ia] - e[ib];
            let phase = if de == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, de * t)
            };
            let mut prod = c[ia].conj() * c[ib] * phase * weight(ia, ib);
            for (axis, (&a, &b)) in ma.quanta().iter().zip(mb.quanta()).enumerate() {
                let slot = tables.slot(axis, a, b);
                prod *= if deriv_axis == Some(axis) {
                    tables.derivs[axis][slot]
                } else {
                    tables.values[axis][slot]
                };
            }
            acc += prod;
        }
    }
    acc
}

fn real_part(v: Complex64) -> Result<f64> {
    if v.im.abs() > REALNESS_TOLERANCE * v.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            residue: v.im.abs(),
            tolerance: REALNESS_TOLERANCE,
        });
    }
    Ok(v.re)
}

/// Box Wigner function from the mode-pair expansion, for states on the
/// reference box `[-1, 1]^n`.
pub fn wigner_box_analytic(state: &StateExpansion, x: &[f64], p: &[f64], t: f64) -> Result<f64> {
    if !check_reference_point(state, x, p)? {
        return Ok(0.0);
    }
    let tables = AxisTables::new(state, x, p, false);
    real_part(pair_sum(state, &tables, t, None, |_, _| Complex64::new(1.0, 0.0)))
}

/// `∂W/∂t`, differentiating the phases `e^{i(E_α - E_β)t}`.
pub fn wigner_box_dt(state: &StateExpansion, x: &[f64], p: &[f64], t: f64) -> Result<f64> {
    if !check_reference_point(state, x, p)? {
        return Ok(0.0);
    }
    let e = state.energies();
    let tables = AxisTables::new(state, x, p, false);
    real_part(pair_sum(state, &tables, t, None, |a, b| Complex64::new(0.0, e[a] - e[b])))
}

/// `∇_x W`.
pub fn wigner_box_gradient(state: &StateExpansion, x: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>> {
    if !check_reference_point(state, x, p)? {
        return Ok(vec![0.0; x.len()]);
    }
    let tables = AxisTables::new(state, x, p, true);
    (0..x.len())
        .map(|k| real_part(pair_sum(state, &tables, t, Some(k), |_, _| Complex64::new(1.0, 0.0))))
        .collect()
}

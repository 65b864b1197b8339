use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const POLE_TOL: f64 = 1e-12;

/// Scalar coefficient functions `f_j(z)` available to sum-form problems.
///
/// The set is closed so every derivative is exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFunction {
    /// `coeff · z^exponent`
    Power { coeff: Complex64, exponent: u32 },
    /// `a z / (z + b)`
    Rational { a: Complex64, b: Complex64 },
    /// `i √(z² − σ²)`, principal branch
    BranchSqrt { sigma: f64 },
    Constant { value: Complex64 },
    /// `τ_degree(m(z))` with `m` the affine map of `[lo, hi]` onto `[−1, 1]`
    Chebyshev { degree: usize, lo: f64, hi: f64 },
}

impl ScalarFunction {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(match *self {
            ScalarFunction::Power { coeff, exponent } => coeff * z.powu(exponent),
            ScalarFunction::Rational { a, b } => {
                let d = z + b;
                if d.norm() < POLE_TOL * b.norm().max(1.0) {
                    return Err(Error::PoleEvaluation { z, what: "rational coefficient a z/(z+b)" });
                }
                a * z / d
            }
            ScalarFunction::BranchSqrt { sigma } => Complex64::I * (z * z - sigma * sigma).sqrt(),
            ScalarFunction::Constant { value: c } => c,
            ScalarFunction::Chebyshev { degree, lo, hi } => chebyshev_value(degree, map_to_unit(z, lo, hi)).0,
        })
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(match *self {
            ScalarFunction::Power { coeff, exponent } => match exponent {
                0 => Complex64::ZERO,
                k => coeff * (k as f64) * z.powu(k - 1),
            },
            ScalarFunction::Rational { a, b } => {
                let d = z + b;
                if d.norm() < POLE_TOL * b.norm().max(1.0) {
                    return Err(Error::PoleEvaluation { z, what: "rational coefficient a z/(z+b)" });
                }
                a * b / (d * d)
            }
            ScalarFunction::BranchSqrt { sigma } => {
                let r = (z * z - sigma * sigma).sqrt();
                if r.norm() < POLE_TOL * sigma.max(1.0) {
                    return Err(Error::PoleEvaluation { z, what: "branch point of sqrt(z^2 - sigma^2)" });
                }
                Complex64::I * z / r
            }
            ScalarFunction::Constant { .. } => Complex64::ZERO,
            ScalarFunction::Chebyshev { degree, lo, hi } => {
                chebyshev_value(degree, map_to_unit(z, lo, hi)).1 * (2.0 / (hi - lo))
            }
        })
    }
}

pub(crate) fn map_to_unit(z: Complex64, lo: f64, hi: f64) -> Complex64 {
    (z * 2.0 - (lo + hi)) / (hi - lo)
}

/// `(τ_k(x), τ_k′(x))` via the three-term recurrences of both kinds.
fn chebyshev_value(k: usize, x: Complex64) -> (Complex64, Complex64) {
    if k == 0 {
        return (Complex64::ONE, Complex64::ZERO);
    }
    // T_k by recurrence; T_k' = k U_{k-1}
    let (mut t0, mut t1) = (Complex64::ONE, x);
    let (mut u0, mut u1) = (Complex64::ONE, x * 2.0);
    for _ in 1..k {
        let t2 = x * 2.0 * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    for _ in 1..k.saturating_sub(1) {
        let u2 = x * 2.0 * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    let u_prev = if k == 1 { u0 } else { u1 };
    (t1, u_prev * k as f64)
}

/// Viscoelastic modulus `G(z) = G_∞ ([1 +] Σ_k a_k z / (z + b_k))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiotModulus {
    pub g_inf: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Adds the constant `1` inside the parentheses.
    #[serde(default)]
    pub leading_one: bool,
}

impl BiotModulus {
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::DimensionMismatch(format!(
                "Biot coefficients: {} a_k vs {} b_k",
                self.a.len(),
                self.b.len()
            )));
        }
        if let Some(b) = self.b.iter().find(|&&b| !(b > 0.0)) {
            return Err(Error::InvalidParameter(format!("Biot relaxation b_k must be > 0, got {b}")));
        }
        Ok(())
    }

    fn terms(&self) -> impl Iterator<Item = ScalarFunction> + '_ {
        self.a.iter().zip(&self.b).map(|(&a, &b)| ScalarFunction::Rational {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut sum = if self.leading_one { Complex64::ONE } else { Complex64::ZERO };
        for f in self.terms() {
            sum += f.eval(z)?;
        }
        Ok(sum * self.g_inf)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::ZERO;
        for f in self.terms() {
            sum += f.derivative(z)?;
        }
        Ok(sum * self.g_inf)
    }
}

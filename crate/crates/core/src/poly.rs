//! Certified roots of low-degree complex polynomials.
//!
//! Exact zero roots are deflated first, degree one and two are solved in
//! closed form (cancellation-free quadratic), higher degrees by Aberth-Ehrlich
//! simultaneous iteration. Every root is then Newton-polished against the
//! full polynomial and certified by its backward-error residual
//! `|P(ω)| / Σ|cⱼ||ω|ʲ`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Highest degree the solver accepts.
pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverTolerances {
    /// Upper bound on the scaled residual of every returned root.
    pub residual: f64,
    /// Roots closer than this are reported as one root with multiplicity.
    pub degeneracy: f64,
    pub max_iterations: usize,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances {
            residual: 1e-10,
            degeneracy: 1e-7,
            max_iterations: 500,
        }
    }
}

/// Polynomial with ascending coefficients `c₀ + c₁ω + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree after dropping zero leading coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// `(P(z), P'(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ|cⱼ||z|ʲ`, the magnitude scale of the terms summed in `P(z)`.
    pub fn term_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Backward-error residual `|P(z)| / Σ|cⱼ||z|ʲ`.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        let p = self.eval(z).norm();
        if p == 0.0 {
            0.0
        } else {
            p / self.term_scale(z)
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Solved roots of one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Size of the degeneracy cluster each root belongs to.
    pub multiplicity: Vec<usize>,
}

/// Relative deviations of the Vieta sum and product identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VietaCheck {
    pub sum: f64,
    pub product: f64,
}

/// Checks `Σωᵢ = −c_{n−1}/c_n` and `Πωᵢ = (−1)ⁿ c₀/c_n`, each relative to the
/// natural rounding scale of the left-hand side (`Σ|ωᵢ|`, `Π|ωᵢ|`).
pub fn vieta_check(poly: &Polynomial, roots: &[Complex64]) -> VietaCheck {
    let n = roots.len();
    let c = poly.coeffs();
    let lead = c[n];
    let sum: Complex64 = roots.iter().sum();
    let sum_expected = -c[n - 1] / lead;
    let sum_scale = roots.iter().map(|r| r.norm()).sum::<f64>();
    let prod: Complex64 = roots.iter().product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prod_expected = sign * c[0] / lead;
    let prod_scale = roots.iter().map(|r| r.norm()).product::<f64>();
    let rel = |d: f64, s: f64| if d == 0.0 { 0.0 } else { d / s.max(f64::MIN_POSITIVE) };
    VietaCheck {
        sum: rel((sum - sum_expected).norm(), sum_scale.max(sum_expected.norm())),
        product: rel((prod - prod_expected).norm(), prod_scale.max(prod_expected.norm())),
    }
}

/// Radii of the Weierstrass inclusion discs `|z − zᵢ| ≤ n|Wᵢ|`, with
/// `Wᵢ = P(zᵢ) / (c_n Π_{j≠i}(zᵢ − zⱼ))`. The union of the discs holds every
/// root, and each connected component holds as many roots as discs. `|P|`
/// is padded by its rounding bound, so approximations of one multiple root
/// always get overlapping discs.
pub fn inclusion_radii(poly: &Polynomial, roots: &[Complex64]) -> Vec<f64> {
    let n = roots.len();
    let lead = poly.coeffs()[n].norm();
    roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let p = poly.eval(z).norm() + 2.0 * n as f64 * f64::EPSILON * poly.term_scale(z);
            let den = lead
                * (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (z - roots[j]).norm())
                    .product::<f64>();
            if den == 0.0 {
                f64::INFINITY
            } else {
                n as f64 * p / den
            }
        })
        .collect()
}

/// All complex roots, with multiplicity, certified to `tol.residual`.
pub fn solve(poly: &Polynomial, tol: &SolverTolerances) -> Result<Roots> {
    if poly.coeffs().iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::numerical("non-finite polynomial coefficient"));
    }
    let degree = match poly.degree() {
        None | Some(0) => return Err(Error::input("polynomial has no roots (degree 0 or zero polynomial)")),
        Some(d) if d > MAX_DEGREE => {
            return Err(Error::input(format!(
                "degree {d} exceeds the supported maximum {MAX_DEGREE}"
            )))
        }
        Some(d) => d,
    };
    let full = Polynomial::new(poly.coeffs()[..=degree].to_vec());

    let zeros = full.coeffs().iter().take_while(|c| **c == ZERO).count();
    let reduced = Polynomial::new(full.coeffs()[zeros..].to_vec());
    let mut roots = vec![ZERO; zeros];
    let mut nonzero = match degree - zeros {
        0 => Vec::new(),
        1 => vec![-reduced.coeffs[0] / reduced.coeffs[1]],
        2 => quadratic(reduced.coeffs[0], reduced.coeffs[1], reduced.coeffs[2]).to_vec(),
        _ => aberth(&reduced, tol.max_iterations)?,
    };
    for z in nonzero.iter_mut() {
        *z = polish(&full, *z);
    }
    roots.extend(nonzero);

    let residuals: Vec<f64> = roots.iter().map(|z| full.scaled_residual(*z)).collect();
    if roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) || residuals.iter().any(|r| !(*r <= tol.residual))
    {
        return Err(Error::Numerical {
            message: format!("root residuals {residuals:?} exceed {}", tol.residual),
            roots,
            residuals,
        });
    }
    let multiplicity = roots
        .iter()
        .map(|a| roots.iter().filter(|b| (*a - **b).norm() <= tol.degeneracy).count())
        .collect();
    Ok(Roots {
        roots,
        residuals,
        multiplicity,
    })
}

/// Roots of `a + bω + cω²` without subtractive cancellation.
fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that adds magnitudes in b + sign·disc
    let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc);
    if q == ZERO {
        // b = 0 and a·c = 0: both roots are zero (a = 0 is deflated earlier)
        return [ZERO, ZERO];
    }
    [q / c, a / q]
}

fn aberth(poly: &Polynomial, max_iterations: usize) -> Result<Vec<Complex64>> {
    let c = poly.coeffs();
    let n = c.len() - 1;
    let lead = c[n];
    let center = -c[n - 1] / (lead * n as f64);
    // geometric mean of root magnitudes about the center, guarded against zero
    let shifted_const = poly.eval(center).norm() / lead.norm();
    let mut radius = shifted_const.powf(1.0 / n as f64);
    if !(radius.is_finite() && radius > 0.0) {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..max_iterations {
        let mut converged = true;
        for k in 0..n {
            let (p, dp) = poly.eval_with_derivative(z[k]);
            if p == ZERO {
                continue;
            }
            let ratio = if dp == ZERO { p / f64::EPSILON } else { p / dp };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == ZERO {
                        Complex64::new(1.0 / f64::EPSILON, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                converged = false;
            }
        }
        if converged {
            return Ok(z);
        }
    }
    // Slow convergence happens at clustered roots; polishing and the
    // residual certificate decide whether the result is usable.
    Ok(z)
}

/// A few Newton steps, each kept only if it lowers `|P|`.
fn polish(poly: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut best = poly.eval(z).norm();
    for _ in 0..8 {
        if best == 0.0 {
            break;
        }
        let (p, dp) = poly.eval_with_derivative(z);
        if dp == ZERO {
            break;
        }
        let candidate = z - p / dp;
        let value = poly.eval(candidate).norm();
        if value < best {
            z = candidate;
            best = value;
        } else {
            break;
        }
    }
    z
}

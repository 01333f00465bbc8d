//! Real root isolation for the horizon quartic.
//!
//! Roots come from the eigenvalues of the companion matrix and are then
//! polished with Newton's method on the original polynomial.

use faer::Mat;

/// Polynomial with real coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Complex roots from the eigenvalues of the (Frobenius) companion matrix.
    pub fn companion_roots(&self) -> Vec<num_complex::Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        let companion = Mat::<f64>::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -self.coeffs[i] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion
            .eigenvalues()
            .expect("companion eigenvalues of a finite matrix")
    }

    /// Newton polishing of an approximate real root. Stops when the update is
    /// below `rel_tol` relative to the root (absolute near zero).
    pub fn polish(&self, mut x: f64, rel_tol: f64) -> f64 {
        for _ in 0..60 {
            let (p, dp) = self.eval_with_derivative(x);
            if dp == 0.0 || !p.is_finite() {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= rel_tol * x.abs().max(1.0e-300) || p == 0.0 {
                break;
            }
        }
        x
    }
}

/// Discriminant of the depressed quartic `a x⁴ + c x² + d x + e` (no cubic term).
///
/// Positive means four distinct real roots or two complex-conjugate pairs,
/// negative means exactly two real roots.
pub fn quartic_discriminant_no_cubic(a: f64, c: f64, d: f64, e: f64) -> f64 {
    256.0 * a.powi(3) * e.powi(3) - 128.0 * a * a * c * c * e * e + 144.0 * a * a * c * d * d * e
        - 27.0 * a * a * d.powi(4)
        + 16.0 * a * c.powi(4) * e
        - 4.0 * a * c.powi(3) * d * d
}

/// All real roots, sorted ascending and Newton-polished.
///
/// An eigenvalue counts as real when its imaginary part is below
/// `imag_tol` times the largest root modulus.
pub fn real_roots(poly: &Polynomial, imag_tol: f64) -> Vec<f64> {
    let roots = poly.companion_roots();
    let scale = roots.iter().map(|z| z.norm()).fold(1.0e-300, f64::max);
    let mut real: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() <= imag_tol * scale)
        .map(|z| poly.polish(z.re, 1.0e-15))
        .collect();
    real.sort_by(|x, y| x.total_cmp(y));
    real
}

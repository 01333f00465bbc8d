//! Kerr–de Sitter in Boyer–Lindquist form written as a sum of squares, and
//! its pullback to the starred chart t = t* + Φ(r), φ = φ* + Ψ(r) with
//! Φ′ = b(r² + a²)f/μ, Ψ′ = baf/μ. Index order (time, r, azimuth, θ).

#[derive(Debug, Clone, Copy)]
pub struct Kds {
    pub lambda: f64,
    pub a: f64,
    pub mass: f64,
}

pub type M4 = [[f64; 4]; 4];

impl Kds {
    pub fn mu(&self, r: f64) -> f64 {
        (r * r + self.a * self.a) * (1.0 - self.lambda * r * r / 3.0) - 2.0 * self.mass * r
    }

    fn b(&self) -> f64 {
        1.0 + self.lambda * self.a * self.a / 3.0
    }

    /// g = −μ/(b²ρ²)(dt − a sin²θ dφ)² + ρ²(dr²/μ + dθ²/c)
    ///     + c sin²θ/(b²ρ²)(a dt − (r² + a²) dφ)².
    pub fn boyer_lindquist(&self, r: f64, theta: f64) -> M4 {
        let a = self.a;
        let b = self.b();
        let s2 = theta.sin().powi(2);
        let c = 1.0 + self.lambda * a * a / 3.0 * theta.cos().powi(2);
        let rho2 = r * r + a * a * theta.cos().powi(2);
        let mu = self.mu(r);
        let w1 = -mu / (b * b * rho2);
        let w2 = c * s2 / (b * b * rho2);
        // One-forms as (dt, dφ) coefficient pairs.
        let e1 = [1.0, -a * s2];
        let e2 = [a, -(r * r + a * a)];
        let mut g = [[0.0; 4]; 4];
        let idx = [0, 2];
        for i in 0..2 {
            for j in 0..2 {
                g[idx[i]][idx[j]] = w1 * e1[i] * e1[j] + w2 * e2[i] * e2[j];
            }
        }
        g[1][1] = rho2 / mu;
        g[3][3] = rho2 / c;
        g
    }

    /// Pullback of the Boyer–Lindquist metric for gauge value f(r). Singular
    /// where μ = 0; use away from the horizons.
    pub fn starred(&self, r: f64, theta: f64, f: f64) -> M4 {
        let g = self.boyer_lindquist(r, theta);
        let mu = self.mu(r);
        let b = self.b();
        let dphi = b * (r * r + self.a * self.a) * f / mu;
        let dpsi = b * self.a * f / mu;
        // Columns: ∂_{t*}, ∂_r, ∂_{φ*}, ∂_θ expressed in BL components.
        let mut j = [[0.0; 4]; 4];
        j[0][0] = 1.0;
        j[0][1] = dphi;
        j[1][1] = 1.0;
        j[2][1] = dpsi;
        j[2][2] = 1.0;
        j[3][3] = 1.0;
        let mut out = [[0.0; 4]; 4];
        for p in 0..4 {
            for q in 0..4 {
                let mut s = 0.0;
                for c in 0..4 {
                    for d in 0..4 {
                        s += j[c][p] * j[d][q] * g[c][d];
                    }
                }
                out[p][q] = s;
            }
        }
        out
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &M4) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..4 {
            let l = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= l * a[k][j];
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination.
pub fn inverse(m: &M4) -> M4 {
    let mut a = *m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(p, k);
        inv.swap(p, k);
        let d = a[k][k];
        for j in 0..4 {
            a[k][j] /= d;
            inv[k][j] /= d;
        }
        for i in 0..4 {
            if i != k {
                let l = a[i][k];
                for j in 0..4 {
                    a[i][j] -= l * a[k][j];
                    inv[i][j] -= l * inv[k][j];
                }
            }
        }
    }
    inv
}

//! Collocation grids: Chebyshev–Gauss–Lobatto in r, Gauss–Legendre in
//! x = cos θ with parity reduction.

use serde::{Deserialize, Serialize};

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Chebyshev–Gauss–Lobatto nodes on [lo, hi] in increasing order with first
/// and second differentiation matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub d1: Dense,
    pub d2: Dense,
}

impl ChebyshevGrid {
    /// `n` nodes (n ≥ 2).
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        let big_n = n - 1;
        // Reference nodes y_j = −cos(πj/N), increasing in j.
        let y: Vec<f64> = (0..n)
            .map(|j| -(std::f64::consts::PI * j as f64 / big_n as f64).cos())
            .collect();
        let cw = |j: usize| if j == 0 || j == big_n { 2.0 } else { 1.0 };
        let mut d = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    d.set(i, j, cw(i) / cw(j) * sign / (y[i] - y[j]));
                }
            }
        }
        for i in 0..n {
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| d.get(i, j)).sum();
            d.set(i, i, -s);
        }
        let scale = 2.0 / (hi - lo);
        for v in &mut d.data {
            *v *= scale;
        }
        let d2 = d.matmul(&d);
        let nodes = y.iter().map(|t| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t).collect();
        ChebyshevGrid {
            lo,
            hi,
            nodes,
            d1: d,
            d2,
        }
    }
}

/// Gauss–Legendre nodes (increasing) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * d * d);
    }
    (x, w)
}

/// (P_n(z), P_n′(z)).
pub fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Lagrange differentiation matrix on arbitrary distinct nodes.
pub fn lagrange_d1(nodes: &[f64]) -> Dense {
    let n = nodes.len();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product::<f64>()
        })
        .collect();
    let mut d = Dense::zeros(n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d.set(i, j, v);
                s += v;
            }
        }
        d.set(i, i, -s);
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Gauss–Legendre grid in x restricted to x > 0 for functions of fixed parity.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub parity: Parity,
    /// The positive nodes, increasing.
    pub nodes: Vec<f64>,
    pub d1: Dense,
    pub d2: Dense,
}

impl AngularGrid {
    /// `n_full` (even) Gauss–Legendre nodes, folded onto the positive half.
    pub fn new(n_full: usize, parity: Parity) -> Self {
        let (x, _) = gauss_legendre(n_full);
        let d1 = lagrange_d1(&x);
        let d2 = d1.matmul(&d1);
        let half = n_full / 2;
        let p = parity.sign();
        let fold = |d: &Dense| {
            let mut out = Dense::zeros(half);
            for i in 0..half {
                for j in 0..half {
                    let (gi, gj) = (half + i, half + j);
                    let mirror = n_full - 1 - gj;
                    out.set(i, j, d.get(gi, gj) + p * d.get(gi, mirror));
                }
            }
            out
        };
        AngularGrid {
            parity,
            nodes: x[half..].to_vec(),
            d1: fold(&d1),
            d2: fold(&d2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_differentiates_polynomials_exactly() {
        let g = ChebyshevGrid::new(20, 2.0, 6.0);
        let f: Vec<f64> = g.nodes.iter().map(|r| r.powi(7) - 3.0 * r * r).collect();
        let df = g.d1.apply(&f);
        let ddf = g.d2.apply(&f);
        for (k, r) in g.nodes.iter().enumerate() {
            let e1 = 7.0 * r.powi(6) - 6.0 * r;
            let e2 = 42.0 * r.powi(5) - 6.0;
            assert!((df[k] - e1).abs() < 1e-10 * e1.abs().max(1.0));
            assert!((ddf[k] - e2).abs() < 1e-10 * e2.abs().max(1.0));
        }
        assert_eq!(g.nodes[0], 2.0);
        assert!((g.nodes[19] - 6.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn folded_derivatives_respect_parity() {
        let even = AngularGrid::new(12, Parity::Even);
        let odd = AngularGrid::new(12, Parity::Odd);
        let fe: Vec<f64> = even.nodes.iter().map(|x| x.powi(4) + x * x).collect();
        let fo: Vec<f64> = odd.nodes.iter().map(|x| x.powi(5)).collect();
        let de = even.d2.apply(&fe);
        let d_o = odd.d1.apply(&fo);
        for (k, x) in even.nodes.iter().enumerate() {
            assert!((de[k] - (12.0 * x * x + 2.0)).abs() < 1e-10);
            assert!((d_o[k] - 5.0 * x.powi(4)).abs() < 1e-10);
        }
    }
}

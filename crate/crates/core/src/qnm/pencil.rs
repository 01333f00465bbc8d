//! Collocation of ρ²P_σ into the quadratic pencil σ²P2 + σP1 + P0.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::grid::{AngularGrid, ChebyshevGrid, Parity};
use super::operator::WaveCoefficients;
use super::QnmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nr: usize,
    /// Full number of Gauss–Legendre nodes in x; each parity uses half.
    pub ntheta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nr: 40, ntheta: 12 }
    }
}

impl GridSpec {
    pub fn doubled(&self) -> Self {
        GridSpec {
            nr: 2 * self.nr,
            ntheta: 2 * self.ntheta,
        }
    }

    pub fn validate(&self) -> Result<(), QnmError> {
        if self.nr < 8 || self.ntheta < 4 || self.ntheta % 2 != 0 {
            return Err(QnmError::GridTooCoarse {
                nr: self.nr,
                ntheta: self.ntheta,
            });
        }
        Ok(())
    }
}

/// Discretised pencil. Unknowns are w(r_i, x_j) at index i·nx + j with x_j
/// the positive Gauss–Legendre nodes; the negative half follows from parity.
#[derive(Debug, Clone)]
pub struct OperatorPencil {
    pub grid: GridSpec,
    pub parity: Parity,
    pub m: i32,
    /// Frame velocity the pencil's σ is measured against.
    pub omega: f64,
    pub delta: f64,
    pub r_nodes: Vec<f64>,
    pub x_nodes: Vec<f64>,
    pub p0: Mat<c64>,
    pub p1: Mat<c64>,
    /// P2 is diagonal.
    pub p2: Vec<c64>,
}

impl OperatorPencil {
    pub fn dim(&self) -> usize {
        self.p2.len()
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn p2_matrix(&self) -> Mat<c64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| if i == j { self.p2[i] } else { c64::new(0.0, 0.0) })
    }

    /// P0 + σP1 + σ²P2.
    pub fn matrix_at(&self, sigma: c64) -> Mat<c64> {
        let n = self.dim();
        let s2 = sigma * sigma;
        Mat::from_fn(n, n, |i, j| {
            let d = if i == j { s2 * self.p2[i] } else { c64::new(0.0, 0.0) };
            self.p0[(i, j)] + sigma * self.p1[(i, j)] + d
        })
    }

    /// P1 + 2σP2.
    pub fn derivative_at(&self, sigma: c64) -> Mat<c64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            let d = if i == j { 2.0 * sigma * self.p2[i] } else { c64::new(0.0, 0.0) };
            self.p1[(i, j)] + d
        })
    }

    pub fn apply(&self, sigma: c64, v: &[c64]) -> Vec<c64> {
        let n = self.dim();
        let s2 = sigma * sigma;
        (0..n)
            .map(|i| {
                let mut acc = s2 * self.p2[i] * v[i];
                for j in 0..n {
                    acc += (self.p0[(i, j)] + sigma * self.p1[(i, j)]) * v[j];
                }
                acc
            })
            .collect()
    }
}

pub fn discretize(
    coeffs: &WaveCoefficients<'_>,
    grid: &GridSpec,
    parity: Parity,
) -> Result<OperatorPencil, QnmError> {
    grid.validate()?;
    let st = coeffs.st;
    let (lo, hi) = st.horizons.chart_interval();
    let rg = ChebyshevGrid::new(grid.nr, lo, hi);
    let ag = AngularGrid::new(grid.ntheta, parity);
    let nr = grid.nr;
    let nx = ag.nodes.len();
    let n = nr * nx;
    let rad: Vec<_> = rg.nodes.iter().map(|&r| coeffs.radial(r)).collect();
    let ang: Vec<_> = ag.nodes.iter().map(|&x| coeffs.angular(x)).collect();
    let zero = c64::new(0.0, 0.0);
    let mut p0 = Mat::<c64>::zeros(n, n);
    let mut p1 = Mat::<c64>::zeros(n, n);
    let mut p2 = vec![zero; n];
    for i in 0..nr {
        let rc = &rad[i];
        for ip in 0..nr {
            let d1 = rg.d1.get(i, ip);
            let d2 = rg.d2.get(i, ip);
            let v0 = rc.p0_d2 * d2 + rc.p0_d1 * d1;
            let v1 = rc.p1_d1 * d1;
            for j in 0..nx {
                p0[(i * nx + j, ip * nx + j)] += v0;
                p1[(i * nx + j, ip * nx + j)] += v1;
            }
        }
        for j in 0..nx {
            let ac = &ang[j];
            let row = i * nx + j;
            for jp in 0..nx {
                p0[(row, i * nx + jp)] += c64::new(ac.d2 * ag.d2.get(j, jp) + ac.d1 * ag.d1.get(j, jp), 0.0);
            }
            p0[(row, row)] += rc.p0_d0 + ac.d0 + coeffs.potential_term(rg.nodes[i], ag.nodes[j]);
            p1[(row, row)] += rc.p1_d0 + ac.p1;
            p2[row] = c64::new(rc.p2 + ac.p2, 0.0);
        }
    }
    Ok(OperatorPencil {
        grid: *grid,
        parity,
        m: coeffs.m,
        omega: coeffs.omega,
        delta: st.horizons.delta,
        r_nodes: rg.nodes,
        x_nodes: ag.nodes,
        p0,
        p1,
        p2,
    })
}

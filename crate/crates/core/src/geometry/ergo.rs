//! Causal character of T over the exterior: ergoregions and the timelike
//! collar around r0.

use serde::Serialize;

use super::frame::{t_norm, StationaryFrame};
use super::{HorizonStructure, SpacetimeParams};

/// |g(T,T)| at or below this counts as null.
pub const NULL_THRESHOLD: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalLabel {
    Timelike,
    Spacelike,
    NullThreshold,
}

impl CausalLabel {
    pub fn classify(value: f64) -> Self {
        if value.abs() <= NULL_THRESHOLD {
            CausalLabel::NullThreshold
        } else if value < 0.0 {
            CausalLabel::Timelike
        } else {
            CausalLabel::Spacelike
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CausalLabel::Timelike => "timelike",
            CausalLabel::Spacelike => "spacelike",
            CausalLabel::NullThreshold => "null",
        }
    }
}

/// The maximal radial band (lower, upper) around r0 on which T is timelike
/// for every sampled θ. For r0 on a horizon one end is the horizon itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimelikeCollar {
    pub lower: f64,
    pub upper: f64,
}

impl TimelikeCollar {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgoregionMap {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Row-major over (r, θ).
    pub values: Vec<f64>,
    pub labels: Vec<CausalLabel>,
    pub spacelike_components: usize,
    /// Component index per cell (None unless spacelike).
    pub component_of: Vec<Option<usize>>,
    pub collar: Option<TimelikeCollar>,
}

impl ErgoregionMap {
    pub fn label(&self, i: usize, j: usize) -> CausalLabel {
        self.labels[i * self.theta.len() + j]
    }

    pub fn spacelike_cells(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| **l == CausalLabel::Spacelike)
            .count()
    }

    /// (min r, max r) covered by each spacelike component.
    pub fn component_extents(&self) -> Vec<(f64, f64)> {
        let nt = self.theta.len();
        let mut ext = vec![(f64::INFINITY, f64::NEG_INFINITY); self.spacelike_components];
        for (idx, comp) in self.component_of.iter().enumerate() {
            if let Some(c) = comp {
                let r = self.r[idx / nt];
                ext[*c].0 = ext[*c].0.min(r);
                ext[*c].1 = ext[*c].1.max(r);
            }
        }
        ext
    }
}

/// Cell-centred grid over (r_e, r_c) × (0, π). Radial cells are clustered
/// towards both horizons, where the ergoregions are thin.
pub fn ergoregion_map(
    params: &SpacetimeParams,
    horizons: &HorizonStructure,
    frame: &StationaryFrame,
    nr: usize,
    ntheta: usize,
) -> ErgoregionMap {
    let (r_e, r_c) = (horizons.r_e, horizons.r_c);
    let dth = std::f64::consts::PI / ntheta as f64;
    let r: Vec<f64> = (0..nr)
        .map(|i| {
            let u = std::f64::consts::PI * (i as f64 + 0.5) / nr as f64;
            r_e + 0.5 * (r_c - r_e) * (1.0 - u.cos())
        })
        .collect();
    let theta: Vec<f64> = (0..ntheta).map(|j| (j as f64 + 0.5) * dth).collect();
    let mut values = Vec::with_capacity(nr * ntheta);
    for &ri in &r {
        for &tj in &theta {
            values.push(t_norm(params, frame, ri, tj));
        }
    }
    let labels: Vec<CausalLabel> = values.iter().map(|&v| CausalLabel::classify(v)).collect();
    let (component_of, spacelike_components) = label_components(&labels, nr, ntheta);
    let collar = timelike_collar(params, horizons, frame, &theta);
    ErgoregionMap {
        r,
        theta,
        values,
        labels,
        spacelike_components,
        component_of,
        collar,
    }
}

/// 4-connected flood fill of the spacelike cells.
fn label_components(labels: &[CausalLabel], nr: usize, nt: usize) -> (Vec<Option<usize>>, usize) {
    let mut comp = vec![None; labels.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if labels[start] != CausalLabel::Spacelike || comp[start].is_some() {
            continue;
        }
        comp[start] = Some(count);
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx / nt, idx % nt);
            let mut neighbours = Vec::with_capacity(4);
            if i > 0 {
                neighbours.push(idx - nt);
            }
            if i + 1 < nr {
                neighbours.push(idx + nt);
            }
            if j > 0 {
                neighbours.push(idx - 1);
            }
            if j + 1 < nt {
                neighbours.push(idx + 1);
            }
            for n in neighbours {
                if labels[n] == CausalLabel::Spacelike && comp[n].is_none() {
                    comp[n] = Some(count);
                    stack.push(n);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

fn max_over_theta(params: &SpacetimeParams, frame: &StationaryFrame, r: f64, theta: &[f64]) -> f64 {
    theta
        .iter()
        .map(|&t| t_norm(params, frame, r, t))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Walks outward from r0 while T stays timelike for all sampled θ, then
/// bisects each end on max_θ g(T,T) = 0.
fn timelike_collar(
    params: &SpacetimeParams,
    horizons: &HorizonStructure,
    frame: &StationaryFrame,
    theta: &[f64],
) -> Option<TimelikeCollar> {
    let (r_e, r_c) = (horizons.r_e, horizons.r_c);
    let r0 = frame.r0();
    let timelike = |r: f64| max_over_theta(params, frame, r, theta) < -NULL_THRESHOLD;
    let step = (r_c - r_e) * 1.0e-3;

    let edge = |from: f64, dir: f64, stop: f64| -> f64 {
        let mut inside = from;
        loop {
            let next = inside + dir * step;
            if (dir > 0.0 && next >= stop) || (dir < 0.0 && next <= stop) {
                return stop;
            }
            if !timelike(next) {
                let (mut good, mut bad) = (inside, next);
                for _ in 0..100 {
                    let mid = 0.5 * (good + bad);
                    if timelike(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                return 0.5 * (good + bad);
            }
            inside = next;
        }
    };

    if r0 > r_e && r0 < r_c {
        if !timelike(r0) {
            return None;
        }
        Some(TimelikeCollar {
            lower: edge(r0, -1.0, r_e),
            upper: edge(r0, 1.0, r_c),
        })
    } else if r0 == r_e {
        let start = r_e + 1.0e-9 * (r_c - r_e);
        timelike(start).then(|| TimelikeCollar {
            lower: r_e,
            upper: edge(start, 1.0, r_c),
        })
    } else {
        let start = r_c - 1.0e-9 * (r_c - r_e);
        timelike(start).then(|| TimelikeCollar {
            lower: edge(start, -1.0, r_e),
            upper: r_c,
        })
    }
}

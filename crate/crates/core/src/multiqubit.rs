//! Several qubits longitudinally coupled to one readout resonator, each
//! modulated with its own phase φ_j.
//!
//! Basis states are indexed by integers whose binary expansion, most
//! significant bit first, is the bitstring of qubits 1..n. Bit `1` is
//! s_j = +1 and bit `0` is s_j = −1.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::snr_longitudinal;

pub const MAX_QUBITS: usize = 12;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;
const PARALLEL_FROM: usize = 8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationPhases(Vec<f64>);

impl ModulationPhases {
    /// Phases reduced into [0, 2π).
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidArgument("need at least one qubit".into()));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("phases must be finite".into()));
        }
        Ok(Self(phases.into_iter().map(|p| p.rem_euclid(2.0 * PI)).collect()))
    }

    /// φ_j = j·step for j = 1..n.
    pub fn linear(n: usize, step: f64) -> Result<Self> {
        Self::new((1..=n).map(|j| j as f64 * step).collect())
    }

    /// φ_j = jπ/2.
    pub fn quarter(n: usize) -> Result<Self> {
        Self::linear(n, PI / 2.0)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::linear(n, 0.0)
    }

    /// φ_j = jπ.
    pub fn pi(n: usize) -> Result<Self> {
        Self::linear(n, PI)
    }

    /// φ_j = j2π/3 on three qubits.
    pub fn ghz3() -> Self {
        Self::linear(3, 2.0 * PI / 3.0).expect("three qubits")
    }

    pub fn preset(name: &str, n: Option<usize>) -> Result<Self> {
        let n_or = |default: usize| n.unwrap_or(default);
        match name {
            "quarter" => Self::quarter(n_or(2)),
            "zero" => Self::zero(n_or(2)),
            "pi" => Self::pi(n_or(2)),
            "ghz3" => match n {
                None | Some(3) => Ok(Self::ghz3()),
                Some(other) => Err(Error::InvalidArgument(format!("preset ghz3 is defined for 3 qubits, not {other}"))),
            },
            other => Err(Error::InvalidArgument(format!("unknown phase preset `{other}`"))),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Spin s_j ∈ {±1} of qubit `j` (0-based) in basis state `index`.
pub fn spin(n: usize, index: usize, j: usize) -> f64 {
    if (index >> (n - 1 - j)) & 1 == 1 { 1.0 } else { -1.0 }
}

pub fn bitstring(n: usize, index: usize) -> String {
    (0..n).map(|j| if (index >> (n - 1 - j)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Steady-state pointer amplitude for every n-qubit basis state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constellation {
    pub n: usize,
    /// Indexed by basis state.
    pub entries: Vec<Complex64>,
    /// g̃_z/κ; amplitudes are in absolute units, not divided by it.
    pub scale: f64,
}

impl Constellation {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn max_pairwise_distance(&self) -> f64 {
        let mut max = 0.0f64;
        for (a, pa) in self.entries.iter().enumerate() {
            for pb in &self.entries[a + 1..] {
                max = max.max((pa - pb).norm());
            }
        }
        max
    }
}

/// α_s = −i (g̃_z/κ) Σ_j s_j e^{iφ_j}: the steady state of the effective
/// drive (½g̃_z Σ_j σ_zj e^{−iφ_j}) a + h.c. in the single-qubit frame
/// convention of the dynamics module.
pub fn constellation(phases: &ModulationPhases, g_z_mod: f64, kappa: f64) -> Result<Constellation> {
    let n = phases.len();
    if n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("at most {MAX_QUBITS} qubits supported, got {n}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument("kappa must be positive".into()));
    }
    let scale = g_z_mod / kappa;
    let rotors: Vec<Complex64> = phases.as_slice().iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    let point = |index: usize| -> Complex64 {
        let sum: Complex64 = rotors.iter().enumerate().map(|(j, r)| r * spin(n, index, j)).sum();
        -I * scale * sum
    };
    let count = 1usize << n;
    let entries = if n >= PARALLEL_FROM {
        (0..count).into_par_iter().map(point).collect()
    } else {
        (0..count).map(point).collect()
    };
    Ok(Constellation { n, entries, scale })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Basis-state indices per group; each group ascending, groups ordered by
    /// their smallest member.
    pub groups: Vec<Vec<usize>>,
    /// All pointer states coincide (nothing can be resolved).
    pub degenerate: bool,
}

impl Partition {
    pub fn group_of(&self, index: usize) -> Option<&[usize]> {
        self.groups.iter().find(|g| g.contains(&index)).map(Vec::as_slice)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Groups basis states whose pointer amplitudes are closer than
/// `tol × (largest pairwise distance)`, closed under single linkage.
pub fn distinguishability_partition(c: &Constellation, tol: f64) -> Result<Partition> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::InvalidArgument(format!("clustering tolerance must lie in (0, 0.1), got {tol}")));
    }
    let count = c.len();
    let max = c.max_pairwise_distance();
    if max == 0.0 {
        return Ok(Partition { groups: vec![(0..count).collect()], degenerate: true });
    }
    let threshold = tol * max;
    let mut parent: Vec<usize> = (0..count).collect();
    for a in 0..count {
        for b in a + 1..count {
            if (c.entries[a] - c.entries[b]).norm() < threshold {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; count];
    for i in 0..count {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    Ok(Partition { groups, degenerate: false })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub state: Vec<Complex64>,
    /// Probability of the outcome for the input state.
    pub probability: f64,
}

/// Ideal readout resolving only which pointer group occurred: keeps the
/// amplitudes inside `group` and renormalizes.
pub fn project_by_outcome(state: &[Complex64], group: &[usize]) -> Result<Projection> {
    if !state.len().is_power_of_two() {
        return Err(Error::InvalidArgument("state length must be a power of two".into()));
    }
    let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("input state must be normalized (norm² = {norm})")));
    }
    if let Some(&bad) = group.iter().find(|&&i| i >= state.len()) {
        return Err(Error::InvalidArgument(format!("basis index {bad} out of range")));
    }
    let mut keep = vec![false; state.len()];
    for &i in group {
        keep[i] = true;
    }
    let probability: f64 = state.iter().zip(&keep).filter(|(_, &k)| k).map(|(a, _)| a.norm_sqr()).sum();
    if probability <= 0.0 {
        return Err(Error::ImpossibleOutcome);
    }
    let scale = probability.sqrt();
    let out = state
        .iter()
        .zip(&keep)
        .map(|(&a, &k)| if k { a / scale } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(Projection { state: out, probability })
}

/// Uniform superposition |+⟩^⊗n.
pub fn plus_state(n: usize) -> Vec<Complex64> {
    let count = 1usize << n;
    vec![Complex64::new(1.0 / (count as f64).sqrt(), 0.0); count]
}

/// Pairwise SNR between basis states: the single-qubit longitudinal SNR
/// rescaled by each pair's separation relative to the single-qubit
/// separation 2g̃_z/κ.
pub fn multiqubit_snr_pairwise(c: &Constellation, kappa: f64, tau: f64) -> Result<Vec<Vec<f64>>> {
    let count = c.len();
    if c.scale == 0.0 {
        return Ok(vec![vec![0.0; count]; count]);
    }
    let single = snr_longitudinal(c.scale * kappa, kappa, tau)?.snr;
    let unit = 2.0 * c.scale.abs();
    Ok((0..count)
        .map(|a| (0..count).map(|b| (c.entries[a] - c.entries[b]).norm() / unit * single).collect())
        .collect())
}

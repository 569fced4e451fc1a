//! Ising-type problem instances.
//!
//! An [`IsingInstance`] is the classical cost function
//! `E(s) = offset + Σ_{(i,j)} J_ij s_i s_j` over spins `s_i ∈ {−1, +1}`.
//! Random Ising, MaxCut and Sherrington-Kirkpatrick instances all share this
//! representation; MaxCut uses `J = 1/2` on every edge with offset `−|E|/2`,
//! which makes the energy equal to minus the cut size.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// One coupling term `J s_i s_j` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

impl From<(usize, usize, f64)> for Edge {
    fn from((i, j, coupling): (usize, usize, f64)) -> Self {
        Edge { i, j, coupling }
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.i, e.j, e.coupling)
    }
}

#[derive(Deserialize)]
struct RawInstance {
    n_qubits: usize,
    edges: Vec<Edge>,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    label: String,
}

impl TryFrom<RawInstance> for IsingInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        IsingInstance::new(raw.n_qubits, raw.edges, raw.offset, raw.label)
    }
}

/// Weighted coupling graph plus a constant energy offset.
///
/// Instances are validated on construction and immutable afterwards: edges
/// are stored with `i < j`, without duplicates, with finite nonzero
/// couplings, and there is at least one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct IsingInstance {
    n_qubits: usize,
    edges: Vec<Edge>,
    offset: f64,
    label: String,
}

impl IsingInstance {
    /// Validates and builds an instance. Edges given as `(j, i)` with
    /// `j > i` are reoriented; self-loops and repeated pairs are rejected.
    pub fn new(n_qubits: usize, edges: Vec<Edge>, offset: f64, label: impl Into<String>) -> Result<Self> {
        if n_qubits < 2 {
            return Err(invalid(format!("n_qubits must be at least 2, got {n_qubits}")));
        }
        if !offset.is_finite() {
            return Err(invalid("offset must be finite"));
        }
        if edges.is_empty() {
            return Err(invalid("instance needs at least one edge"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut oriented = Vec::with_capacity(edges.len());
        for e in edges {
            let (i, j) = if e.i <= e.j { (e.i, e.j) } else { (e.j, e.i) };
            if i == j {
                return Err(invalid(format!("self-loop on vertex {i}")));
            }
            if j >= n_qubits {
                return Err(invalid(format!("edge ({i}, {j}) out of range for {n_qubits} qubits")));
            }
            if !e.coupling.is_finite() || e.coupling == 0.0 {
                return Err(invalid(format!("edge ({i}, {j}) has invalid coupling {}", e.coupling)));
            }
            if !seen.insert((i, j)) {
                return Err(invalid(format!("duplicate edge ({i}, {j})")));
            }
            oriented.push(Edge {
                i,
                j,
                coupling: e.coupling,
            });
        }
        Ok(IsingInstance {
            n_qubits,
            edges: oriented,
            offset,
            label: label.into(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// True when every coupling is `±1`. Such instances have integer
    /// energies of a single parity, which makes QAOA `π`-periodic in `γ`.
    pub fn has_unit_couplings(&self) -> bool {
        self.edges.iter().all(|e| e.coupling.abs() == 1.0)
    }

    /// Energy of the basis state `z`, where bit `b` of `z` maps to spin
    /// `1 − 2b`. Summation order matches [`energy`].
    pub fn energy_of_bits(&self, z: u64) -> f64 {
        let mut acc = self.offset;
        for e in &self.edges {
            let aligned = ((z >> e.i) ^ (z >> e.j)) & 1 == 0;
            acc += if aligned { e.coupling } else { -e.coupling };
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-vertex adjacency lists `(neighbor, coupling)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_qubits];
        for e in &self.edges {
            adj[e.i].push((e.j, e.coupling));
            adj[e.j].push((e.i, e.coupling));
        }
        adj
    }
}

/// A spin assignment with entries in `{−1, +1}`.
///
/// As a bitstring, qubit 0 is the leftmost character and bit `b` maps to
/// spin `1 − 2b` (`'0'` is spin up).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(invalid(format!("spin values must be ±1, got {bad}")));
        }
        Ok(SpinConfig(spins))
    }

    pub fn all_up(n: usize) -> Self {
        SpinConfig(vec![1; n])
    }

    pub fn from_bits(z: u64, n: usize) -> Self {
        SpinConfig((0..n).map(|b| if (z >> b) & 1 == 0 { 1 } else { -1 }).collect())
    }

    pub fn to_bits(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .fold(0u64, |z, (b, _)| z | (1 << b))
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(1),
                '1' => Ok(-1),
                other => Err(invalid(format!("bad bitstring character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(SpinConfig)
    }

    pub fn to_bitstring(&self) -> String {
        self.0.iter().map(|&s| if s == 1 { '0' } else { '1' }).collect()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Bitstring of basis index `z` over `n` qubits, qubit 0 leftmost.
pub fn bitstring(z: u64, n: usize) -> String {
    (0..n).map(|b| if (z >> b) & 1 == 0 { '0' } else { '1' }).collect()
}

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

fn check_generator_args(n_qubits: usize, d_edges: f64) -> Result<usize> {
    if n_qubits < 2 {
        return Err(invalid(format!("n_qubits must be at least 2, got {n_qubits}")));
    }
    if !(d_edges > 0.0 && d_edges <= 1.0) {
        return Err(invalid(format!("d_edges must lie in (0, 1], got {d_edges}")));
    }
    // round half up
    let m = (d_edges * pair_count(n_qubits) as f64 + 0.5).floor() as usize;
    if m == 0 {
        return Err(invalid("edge density rounds to zero edges"));
    }
    Ok(m)
}

/// Uniformly random edge subset of exact size `m`: shuffle all pairs and
/// keep a prefix, then sort the prefix so edge order is canonical.
fn random_edge_set<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    rng::shuffle(&mut pairs, rng);
    pairs.truncate(m);
    pairs.sort_unstable();
    pairs
}

/// Random Ising model with `J ∈ {+1, −1}` on a random graph of the given
/// edge density.
pub fn gen_random_ising(n_qubits: usize, d_edges: f64, seed: u64) -> Result<IsingInstance> {
    let m = check_generator_args(n_qubits, d_edges)?;
    let mut rng = rng::seeded(seed);
    let edges = random_edge_set(n_qubits, m, &mut rng)
        .into_iter()
        .map(|(i, j)| Edge {
            i,
            j,
            coupling: if rng.random::<bool>() { 1.0 } else { -1.0 },
        })
        .collect();
    IsingInstance::new(
        n_qubits,
        edges,
        0.0,
        format!("random-ising n={n_qubits} d={d_edges} seed={seed}"),
    )
}

/// MaxCut on a random graph: `−½ Σ (1 − s_i s_j)`, stored as `J = ½` per
/// edge with offset `−|E|/2`. Uses the same graph as [`gen_random_ising`]
/// for equal arguments.
pub fn gen_maxcut(n_qubits: usize, d_edges: f64, seed: u64) -> Result<IsingInstance> {
    let m = check_generator_args(n_qubits, d_edges)?;
    let mut rng = rng::seeded(seed);
    let edges: Vec<Edge> = random_edge_set(n_qubits, m, &mut rng)
        .into_iter()
        .map(|(i, j)| Edge { i, j, coupling: 0.5 })
        .collect();
    let offset = -(edges.len() as f64) / 2.0;
    IsingInstance::new(
        n_qubits,
        edges,
        offset,
        format!("maxcut n={n_qubits} d={d_edges} seed={seed}"),
    )
}

/// Sherrington-Kirkpatrick model: complete graph with `J ~ N(0, variance)`.
pub fn gen_sk(n_qubits: usize, variance: f64, seed: u64) -> Result<IsingInstance> {
    if n_qubits < 2 {
        return Err(invalid(format!("n_qubits must be at least 2, got {n_qubits}")));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(invalid(format!("variance must be positive, got {variance}")));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| invalid(e.to_string()))?;
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::with_capacity(pair_count(n_qubits));
    for i in 0..n_qubits {
        for j in i + 1..n_qubits {
            let mut coupling = normal.sample(&mut rng);
            while coupling == 0.0 {
                coupling = normal.sample(&mut rng);
            }
            edges.push(Edge { i, j, coupling });
        }
    }
    IsingInstance::new(
        n_qubits,
        edges,
        0.0,
        format!("sk n={n_qubits} variance={variance} seed={seed}"),
    )
}

/// `offset + Σ J_ij s_i s_j`.
pub fn energy(instance: &IsingInstance, config: &SpinConfig) -> Result<f64> {
    if config.len() != instance.n_qubits {
        return Err(Error::LengthMismatch {
            expected: instance.n_qubits,
            got: config.len(),
        });
    }
    let s = config.spins();
    let mut acc = instance.offset;
    for e in &instance.edges {
        acc += e.coupling * f64::from(s[e.i]) * f64::from(s[e.j]);
    }
    Ok(acc)
}

/// Multiplies every coupling and the offset by `factor`.
pub fn scale_instance(instance: &IsingInstance, factor: f64) -> Result<IsingInstance> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(invalid(format!(
            "scale factor must be positive and finite, got {factor}"
        )));
    }
    let edges = instance
        .edges
        .iter()
        .map(|e| Edge {
            coupling: e.coupling * factor,
            ..*e
        })
        .collect();
    IsingInstance::new(
        instance.n_qubits,
        edges,
        instance.offset * factor,
        instance.label.clone(),
    )
}

/// How the energy scale of a target instance is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Factor `|e_ref| / X`.
    FixedX { x: f64 },
    /// Factor `|e_ref| / √|E|`.
    SqrtEdges,
}

/// Normalization factor `f`. The normalized instance is
/// `scale_instance(instance, 1/f)`, i.e. couplings are divided by `f`.
pub fn normalization_factor(instance: &IsingInstance, mode: NormalizationMode, e_ref: f64) -> Result<f64> {
    if !(e_ref < 0.0 && e_ref.is_finite()) {
        return Err(invalid(format!("reference energy must be negative, got {e_ref}")));
    }
    if instance.edges.is_empty() {
        return Err(invalid("normalization needs a nonempty edge set"));
    }
    match mode {
        NormalizationMode::FixedX { x } => {
            if !(x > 0.0 && x.is_finite()) {
                return Err(invalid(format!("X must be positive, got {x}")));
            }
            Ok(e_ref.abs() / x)
        }
        NormalizationMode::SqrtEdges => Ok(e_ref.abs() / (instance.edges.len() as f64).sqrt()),
    }
}

/// Applies [`normalization_factor`] and returns the rescaled instance with
/// the factor that was divided out.
pub fn normalize(instance: &IsingInstance, mode: NormalizationMode, e_ref: f64) -> Result<(IsingInstance, f64)> {
    let factor = normalization_factor(instance, mode, e_ref)?;
    Ok((scale_instance(instance, 1.0 / factor)?, factor))
}

/// `|E| / C(n, 2)`.
pub fn edge_density(instance: &IsingInstance) -> f64 {
    instance.edges.len() as f64 / pair_count(instance.n_qubits) as f64
}

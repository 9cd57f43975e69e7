//! Unit-disk graphs on atom registers, the classical MIS cost and an
//! exhaustive MIS oracle.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitstring::{Bitstring, MAX_BITS};
use crate::error::{Error, Result};

/// Trapping constraint on the interatomic distance.
pub const MIN_ATOM_DISTANCE_UM: f64 = 5.0;

/// Absolute tolerance for every distance comparison, in μm.
pub const DISTANCE_TOLERANCE_UM: f64 = 1e-9;

/// Largest graph the exhaustive MIS search accepts.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 24;

/// Atom positions in the plane, in μm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Register {
    positions: Vec<[f64; 2]>,
    spacing_um: Option<f64>,
}

impl Register {
    pub fn new(positions: Vec<[f64; 2]>) -> Result<Self> {
        Self::with_spacing(positions, None)
    }

    fn with_spacing(positions: Vec<[f64; 2]>, spacing_um: Option<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Constraint("a register needs at least one atom".into()));
        }
        if positions.len() > MAX_BITS {
            return Err(Error::TooLarge {
                what: "register",
                size: positions.len(),
                max: MAX_BITS,
            });
        }
        if let Some(i) = positions.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Domain(format!("atom {i} has a non-finite position")));
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let d = distance(positions[i], positions[j]);
                if d < MIN_ATOM_DISTANCE_UM - DISTANCE_TOLERANCE_UM {
                    return Err(Error::Constraint(format!(
                        "atoms {i} and {j} are {d:.4} μm apart, below the {MIN_ATOM_DISTANCE_UM} μm trap limit"
                    )));
                }
            }
        }
        Ok(Self {
            positions,
            spacing_um,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn spacing_um(&self) -> Option<f64> {
        self.spacing_um
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(self.positions[i], self.positions[j])
    }

    /// Keeps only the listed atoms, in the given order.
    pub fn subset(&self, sites: &[usize]) -> Register {
        Register {
            positions: sites.iter().map(|&s| self.positions[s]).collect(),
            spacing_um: self.spacing_um,
        }
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Position of lattice site `(row, col)` on a triangular lattice with spacing `a`.
pub fn triangular_site(row: i64, col: i64, a: f64) -> [f64; 2] {
    let (row, col) = (row as f64, col as f64);
    [a * (col + 0.5 * row), a * row * 3f64.sqrt() / 2.0]
}

/// Fills the selected traps of a triangular layout with spacing `a` μm.
pub fn build_triangular_register(mask: &[(i64, i64)], a: f64) -> Result<Register> {
    if !a.is_finite() || a < MIN_ATOM_DISTANCE_UM - DISTANCE_TOLERANCE_UM {
        return Err(Error::Constraint(format!(
            "lattice spacing {a} μm is below the {MIN_ATOM_DISTANCE_UM} μm trap limit"
        )));
    }
    let unique: BTreeSet<_> = mask.iter().collect();
    if unique.len() != mask.len() {
        return Err(Error::Constraint("lattice mask selects a site twice".into()));
    }
    let positions = mask.iter().map(|&(r, c)| triangular_site(r, c, a)).collect();
    Register::with_spacing(positions, Some(a))
}

/// `r_b = (C6/ħ / Ω)^{1/6}`. Both inputs in angular units (rad/μs·μm⁶ and rad/μs);
/// the result is in μm.
pub fn blockade_radius(c6_over_hbar: f64, omega: f64) -> Result<f64> {
    if !(c6_over_hbar > 0.0) || !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "blockade radius needs positive C6/ħ and Ω, got {c6_over_hbar} and {omega}"
        )));
    }
    Ok((c6_over_hbar / omega).powf(1.0 / 6.0))
}

/// Simple undirected graph with vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    /// `upper[i]` has bit `j` set for every edge `(i, j)` with `j > i`.
    upper: Vec<u128>,
    adjacency: Vec<u128>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > MAX_BITS {
            return Err(Error::TooLarge {
                what: "graph",
                size: n,
                max: MAX_BITS,
            });
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Domain(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Domain(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut upper = vec![0u128; n];
        let mut adjacency = vec![0u128; n];
        for &(a, b) in &set {
            upper[a] |= 1 << b;
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        Ok(Self {
            n,
            edges: set,
            upper,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.adjacency[v];
        (0..self.n).filter(move |&u| (mask >> u) & 1 == 1)
    }

    /// Number of edges with both endpoints selected by `z`.
    pub fn violated_edges(&self, z: &Bitstring) -> usize {
        let word = z.index();
        z.ones()
            .map(|i| (self.upper[i] & word).count_ones() as usize)
            .sum()
    }

    pub fn is_independent(&self, z: &Bitstring) -> bool {
        let word = z.index();
        z.ones().all(|i| self.upper[i] & word == 0)
    }

    fn check_len(&self, z: &Bitstring) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        Ok(())
    }
}

/// Unit-disk graph: atoms `i`, `j` share an edge iff `‖r_i − r_j‖ ≤ r_b`.
pub fn edges_from_register(register: &Register, r_b: f64) -> Result<Graph> {
    if !(r_b > 0.0) {
        return Err(Error::Domain(format!("blockade radius must be positive, got {r_b}")));
    }
    let n = register.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if register.distance(i, j) <= r_b + DISTANCE_TOLERANCE_UM {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Penalty weight `c` of the MIS cost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub penalty: f64,
}

impl CostParams {
    pub fn new(penalty: f64) -> Result<Self> {
        if !(penalty > 1.0) || !penalty.is_finite() {
            return Err(Error::Domain(format!(
                "penalty must exceed 1 for the cost minimum to be the MIS, got {penalty}"
            )));
        }
        Ok(Self { penalty })
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self { penalty: 2.0 }
    }
}

/// `C(z) = −Σ z_i + c Σ_{(i,j)∈E} z_i z_j`.
pub fn classical_cost(z: &Bitstring, g: &Graph, params: &CostParams) -> Result<f64> {
    g.check_len(z)?;
    Ok(cost_unchecked(z, g, params))
}

pub(crate) fn cost_unchecked(z: &Bitstring, g: &Graph, params: &CostParams) -> f64 {
    -(z.count_ones() as f64) + params.penalty * g.violated_edges(z) as f64
}

/// All maximum independent sets of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisSolution {
    pub size: usize,
    /// Sorted lexicographically.
    pub solutions: Vec<Bitstring>,
}

impl MisSolution {
    pub fn contains(&self, z: &Bitstring) -> bool {
        self.solutions.binary_search(z).is_ok()
    }
}

/// Exhaustive scan over all `2^n` vertex subsets.
pub fn brute_force_mis(g: &Graph) -> Result<MisSolution> {
    let n = g.n();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::TooLarge {
            what: "graph for exhaustive MIS search",
            size: n,
            max: MAX_BRUTE_FORCE_VERTICES,
        });
    }
    let upper: Vec<u64> = g.upper.iter().map(|&m| m as u64).collect();
    let mut best = 0usize;
    let mut found: Vec<u64> = vec![0];
    for word in 1u64..(1u64 << n) {
        let size = word.count_ones() as usize;
        if size < best {
            continue;
        }
        let mut rest = word;
        let mut independent = true;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if upper[i] & word != 0 {
                independent = false;
                break;
            }
            rest &= rest - 1;
        }
        if !independent {
            continue;
        }
        if size > best {
            best = size;
            found.clear();
        }
        found.push(word);
    }
    let mut solutions: Vec<Bitstring> = found
        .into_iter()
        .map(|w| Bitstring::from_index(w as u128, n))
        .collect();
    solutions.sort();
    Ok(MisSolution {
        size: best,
        solutions,
    })
}

/// On-disk register description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegisterSpec {
    Lattice {
        lattice_mask: Vec<(i64, i64)>,
        spacing_um: f64,
    },
    Positions {
        positions_um: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing_um: Option<f64>,
    },
}

impl RegisterSpec {
    pub fn build(&self) -> Result<Register> {
        match self {
            RegisterSpec::Lattice {
                lattice_mask,
                spacing_um,
            } => build_triangular_register(lattice_mask, *spacing_um),
            RegisterSpec::Positions {
                positions_um,
                spacing_um,
            } => Register::with_spacing(positions_um.clone(), *spacing_um),
        }
    }
}

/// On-disk graph description: `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Graph> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: GraphSpec = serde_json::from_str(&text)?;
        spec.build()
    }
}

impl From<&Graph> for GraphSpec {
    fn from(g: &Graph) -> Self {
        GraphSpec {
            n: g.n(),
            edges: g.edges().collect(),
        }
    }
}

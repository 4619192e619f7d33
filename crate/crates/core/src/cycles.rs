//! Conservative detection of edge/face cycles along which the prescribed
//! invariant equals π.
//!
//! A cycle `e1, f1, e2, f2, ..., en, fn` uses distinct edges and distinct
//! faces, face `fi` holds both `ei` and `e(i+1)` in different slots, and `fn`
//! closes back through `e1`. Every traversed edge must carry an invariant
//! within `eps` of π. Such a cycle is necessary for degenerate `(0, 0, π)`
//! faces to line up, so reporting it is a warning rather than a verdict.

use std::f64::consts::PI;

use crate::error::Result;
use crate::mesh::{EdgeFunction, Mesh};

pub const MAX_CHECKED_FACES: usize = 64;
pub const MAX_REPORTED_CYCLES: usize = 10_000;

/// One cycle, listed by identifier so the result does not depend on the
/// order of faces in the input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PiCycle {
    pub edges: Vec<String>,
    pub faces: Vec<String>,
}

impl PiCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `e1,f1,e2,f2,...` as a single comma-separated string.
    pub fn describe(&self) -> String {
        self.edges
            .iter()
            .zip(&self.faces)
            .flat_map(|(e, f)| [e.as_str(), f.as_str()])
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PiCycleSearch {
    /// Exhaustive search completed.
    Checked(Vec<PiCycle>),
    /// Search stopped after [`MAX_REPORTED_CYCLES`] cycles.
    Truncated(Vec<PiCycle>),
    /// Mesh larger than [`MAX_CHECKED_FACES`]; nothing was searched.
    NotChecked,
}

impl PiCycleSearch {
    pub fn cycles(&self) -> &[PiCycle] {
        match self {
            PiCycleSearch::Checked(c) | PiCycleSearch::Truncated(c) => c,
            PiCycleSearch::NotChecked => &[],
        }
    }
}

pub fn find_pi_cycles(m: &Mesh, d: &EdgeFunction, eps: f64) -> Result<PiCycleSearch> {
    d.check_total(m, "invariant")?;
    if m.num_faces() > MAX_CHECKED_FACES {
        return Ok(PiCycleSearch::NotChecked);
    }

    // Face-adjacency multigraph restricted to π edges. A π edge joins the two
    // faces holding it (a self-loop when both slots sit in one face).
    let pi_edges: Vec<(usize, usize, usize)> = (0..m.num_edges())
        .filter(|&e| (d[e] - PI).abs() <= eps)
        .filter_map(|e| match m.edge_corners(e) {
            &[a, b] => Some((e, a / 3, b / 3)),
            _ => None,
        })
        .collect();

    let mut search = Search {
        m,
        pi_edges: &pi_edges,
        found: Vec::new(),
        truncated: false,
        face_used: vec![false; m.num_faces()],
        edge_path: Vec::new(),
        face_path: Vec::new(),
    };
    // Each cycle is rooted at its smallest π-edge position `root`; the walk
    // leaves the root through one endpoint and must return to the other.
    for (root, &(_, fa, fb)) in pi_edges.iter().enumerate() {
        for (start, target) in [(fa, fb), (fb, fa)] {
            search.edge_path.push(root);
            search.walk(root, start, target);
            search.edge_path.pop();
            if fa == fb || search.truncated {
                break;
            }
        }
        if search.truncated {
            break;
        }
    }

    let mut cycles = search.found;
    cycles.sort();
    cycles.dedup();
    Ok(if search.truncated {
        PiCycleSearch::Truncated(cycles)
    } else {
        PiCycleSearch::Checked(cycles)
    })
}

struct Search<'a> {
    m: &'a Mesh,
    pi_edges: &'a [(usize, usize, usize)],
    found: Vec<PiCycle>,
    truncated: bool,
    face_used: Vec<bool>,
    edge_path: Vec<usize>,
    face_path: Vec<usize>,
}

impl Search<'_> {
    fn walk(&mut self, root: usize, face: usize, target: usize) {
        if self.truncated || self.face_used[face] {
            return;
        }
        self.face_used[face] = true;
        self.face_path.push(face);
        if face == target {
            self.record();
        } else if self.edge_path.len() < self.pi_edges.len() {
            for next in root + 1..self.pi_edges.len() {
                if self.edge_path.contains(&next) {
                    continue;
                }
                let (_, fa, fb) = self.pi_edges[next];
                let other = if fa == face {
                    fb
                } else if fb == face {
                    fa
                } else {
                    continue;
                };
                if other == face {
                    // a self-loop can only appear as a one-edge cycle
                    continue;
                }
                self.edge_path.push(next);
                self.walk(root, other, target);
                self.edge_path.pop();
            }
        }
        self.face_path.pop();
        self.face_used[face] = false;
    }

    /// Stores the current path as a cycle. The path is
    /// `root, face_path[0], edge_path[1], face_path[1], ...` with the last
    /// face holding the root edge again.
    fn record(&mut self) {
        if self.found.len() >= MAX_REPORTED_CYCLES {
            self.truncated = true;
            return;
        }
        let edges: Vec<String> = self
            .edge_path
            .iter()
            .map(|&i| self.m.edge_name(self.pi_edges[i].0).to_string())
            .collect();
        let faces: Vec<String> = self
            .face_path
            .iter()
            .map(|&f| self.m.face(f).id.clone())
            .collect();
        self.found.push(canonical(edges, faces));
    }
}

/// Rotates and orients a cycle so that the smallest edge name comes first and
/// its smaller neighbour comes second.
fn canonical(edges: Vec<String>, faces: Vec<String>) -> PiCycle {
    let n = edges.len();
    let start = (0..n).min_by(|&a, &b| edges[a].cmp(&edges[b])).unwrap_or(0);
    // forward: e_s, f_s, e_{s+1}, ...
    let forward = PiCycle {
        edges: (0..n).map(|i| edges[(start + i) % n].clone()).collect(),
        faces: (0..n).map(|i| faces[(start + i) % n].clone()).collect(),
    };
    // backward: e_s, f_{s-1}, e_{s-1}, f_{s-2}, ...
    let backward = PiCycle {
        edges: (0..n).map(|i| edges[(start + n - i) % n].clone()).collect(),
        faces: (0..n)
            .map(|i| faces[(start + 2 * n - i - 1) % n].clone())
            .collect(),
    };
    forward.min(backward)
}

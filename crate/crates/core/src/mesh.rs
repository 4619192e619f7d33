//! Combinatorics of a closed triangulated surface.
//!
//! A mesh is a list of faces, each holding three edge slots. Slot `k` of a
//! face is the edge faced by corner `k`, so corners are addressed as
//! `3 * face + slot`. No vertex data is needed by the solver; optional
//! vertex incidences are carried only for cone-angle reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A triangle: its identifier and the edges facing corners 0, 1, 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: String,
    pub edges: [usize; 3],
}

/// Optional vertex record: the corners that sit at the vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub corners: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    name: Option<String>,
    faces: Vec<Face>,
    edges: Vec<String>,
    edge_corners: Vec<Vec<usize>>,
    vertices: Vec<Vertex>,
}

impl Mesh {
    /// Builds a mesh from faces given as `(face id, [edge id; 3])`.
    ///
    /// Edge indices are assigned in order of first appearance. The mesh is
    /// not required to be valid; see [`Mesh::validate`].
    pub fn from_faces<F, E>(faces: impl IntoIterator<Item = (F, [E; 3])>) -> Result<Self>
    where
        F: Into<String>,
        E: AsRef<str>,
    {
        let mut builder = MeshBuilder::default();
        for (id, edges) in faces {
            builder.add_face(
                id.into(),
                [edges[0].as_ref(), edges[1].as_ref(), edges[2].as_ref()],
            )?;
        }
        Ok(builder.finish())
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_corners(&self) -> usize {
        3 * self.faces.len()
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e]
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edges
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e == name)
    }

    pub fn face_index(&self, id: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.id == id)
    }

    /// Corners facing edge `e`, in ascending corner order.
    pub fn edge_corners(&self, e: usize) -> &[usize] {
        &self.edge_corners[e]
    }

    /// The edge faced by `corner`.
    pub fn corner_edge(&self, corner: usize) -> usize {
        self.faces[corner / 3].edges[corner % 3]
    }

    pub fn corner_face(&self, corner: usize) -> usize {
        corner / 3
    }

    /// Human-readable corner label `face:slot`.
    pub fn corner_label(&self, corner: usize) -> String {
        format!("{}:{}", self.faces[corner / 3].id, corner % 3)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// The two corners facing `e`; errors unless `e` occurs exactly twice.
    pub fn edge_pair(&self, e: usize) -> Result<[usize; 2]> {
        match self.edge_corners[e].as_slice() {
            &[a, b] => Ok([a, b]),
            other => Err(Error::InvalidMesh(format!(
                "edge `{}` occurs {} times",
                self.edges[e],
                other.len()
            ))),
        }
    }

    /// Every edge must occur in exactly two face slots.
    pub fn validate(&self) -> ValidationReport {
        let violations = self
            .edge_corners
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() != 2)
            .map(|(e, c)| (self.edges[e].clone(), c.len()))
            .collect();
        ValidationReport { violations }
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidMesh(report.to_string()))
        }
    }
}

/// Outcome of [`Mesh::validate`]: edges whose occurrence count is not two.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: BTreeMap<String, usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|(e, n)| {
                format!(
                    "edge `{e}` occurs {n} time{}",
                    if *n == 1 { "" } else { "s" }
                )
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

pub fn validate_mesh(m: &Mesh) -> ValidationReport {
    m.validate()
}

#[derive(Default)]
pub(crate) struct MeshBuilder {
    name: Option<String>,
    faces: Vec<Face>,
    edges: Vec<String>,
    edge_lookup: HashMap<String, usize>,
    face_lookup: HashMap<String, usize>,
    vertices: Vec<Vertex>,
}

impl MeshBuilder {
    pub(crate) fn set_name(&mut self, name: String) {
        self.name = Some(name);
    }

    pub(crate) fn has_face(&self, id: &str) -> bool {
        self.face_lookup.contains_key(id)
    }

    pub(crate) fn face_index(&self, id: &str) -> Option<usize> {
        self.face_lookup.get(id).copied()
    }

    pub(crate) fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_lookup.get(id).copied()
    }

    pub(crate) fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn edge_name(&self, e: usize) -> &str {
        &self.edges[e]
    }

    pub(crate) fn add_face(&mut self, id: String, edges: [&str; 3]) -> Result<()> {
        if self.face_lookup.contains_key(&id) {
            return Err(Error::Reference(format!(
                "duplicate face identifier `{id}`"
            )));
        }
        let mut slots = [0usize; 3];
        for (slot, name) in edges.iter().enumerate() {
            let next = self.edges.len();
            let e = *self.edge_lookup.entry((*name).to_string()).or_insert(next);
            if e == next {
                self.edges.push((*name).to_string());
            }
            slots[slot] = e;
        }
        self.face_lookup.insert(id.clone(), self.faces.len());
        self.faces.push(Face { id, edges: slots });
        Ok(())
    }

    pub(crate) fn add_vertex(&mut self, v: Vertex) {
        self.vertices.push(v);
    }

    pub(crate) fn finish(self) -> Mesh {
        let mut edge_corners = vec![Vec::new(); self.edges.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (slot, &e) in face.edges.iter().enumerate() {
                edge_corners[e].push(3 * f + slot);
            }
        }
        Mesh {
            name: self.name,
            faces: self.faces,
            edges: self.edges,
            edge_corners,
            vertices: self.vertices,
        }
    }
}

/// A real value per edge, indexed like the owning mesh's edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction {
    values: Vec<f64>,
}

impl EdgeFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(m: &Mesh, value: f64) -> Self {
        Self {
            values: vec![value; m.num_edges()],
        }
    }

    pub fn from_fn(m: &Mesh, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            values: (0..m.num_edges()).map(f).collect(),
        }
    }

    /// Builds from `(edge id, value)` pairs; every edge must be covered once.
    pub fn from_named<'a>(
        m: &Mesh,
        pairs: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        let mut values = vec![None; m.num_edges()];
        for (name, v) in pairs {
            let e = m.edge_index(name).ok_or_else(|| {
                Error::Reference(format!("edge `{name}` is not used by any face"))
            })?;
            if values[e].replace(v).is_some() {
                return Err(Error::Reference(format!("edge `{name}` assigned twice")));
            }
        }
        values
            .into_iter()
            .enumerate()
            .map(|(e, v)| {
                v.ok_or_else(|| Error::Reference(format!("no value for edge `{}`", m.edge_name(e))))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub(crate) fn check_total(&self, m: &Mesh, what: &str) -> Result<()> {
        if self.values.len() != m.num_edges() {
            return Err(Error::Reference(format!(
                "{what} has {} values for {} edges",
                self.values.len(),
                m.num_edges()
            )));
        }
        if let Some(e) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "{what} is not finite on edge `{}`",
                m.edge_name(e)
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for EdgeFunction {
    type Output = f64;

    fn index(&self, e: usize) -> &f64 {
        &self.values[e]
    }
}

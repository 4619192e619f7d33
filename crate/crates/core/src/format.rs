//! Line-oriented mesh file format.
//!
//! ```text
//! surface <name>
//! face <face-id> <edge-id> <edge-id> <edge-id>
//! invariant <edge-id> <radians>
//! length <edge-id> <radians>
//! vertex <vertex-id> <face-id>:<slot> ...
//! ```
//!
//! `#` starts a comment. Slots are 0, 1, 2 and slot `k` holds the edge faced
//! by corner `k`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::{EdgeFunction, Mesh, MeshBuilder, Vertex};

/// A parsed mesh file.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFile {
    pub mesh: Mesh,
    pub invariant: Option<EdgeFunction>,
    pub length: Option<EdgeFunction>,
}

/// Line number, vertex id and its `(face, slot)` corners.
type VertexLine = (usize, String, Vec<(String, usize)>);

pub fn parse_mesh(text: &str) -> Result<MeshFile> {
    let mut builder = MeshBuilder::default();
    let mut seen_name = false;
    let mut invariant: Vec<(usize, String, f64)> = Vec::new();
    let mut length: Vec<(usize, String, f64)> = Vec::new();
    let mut vertices: Vec<VertexLine> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            message,
        };
        match keyword {
            "surface" => {
                if seen_name {
                    return Err(syntax("second `surface` header".into()));
                }
                let [name] = args else {
                    return Err(syntax("expected `surface <name>`".into()));
                };
                check_ident(name, line_no)?;
                builder.set_name((*name).to_string());
                seen_name = true;
            }
            "face" => {
                let [id, e0, e1, e2] = args else {
                    return Err(syntax(
                        "expected `face <face-id> <edge-id> <edge-id> <edge-id>`".into(),
                    ));
                };
                for tok in [id, e0, e1, e2] {
                    check_ident(tok, line_no)?;
                }
                if builder.has_face(id) {
                    return Err(Error::DuplicateFace {
                        line: line_no,
                        id: (*id).to_string(),
                    });
                }
                builder.add_face((*id).to_string(), [e0, e1, e2])?;
            }
            "invariant" | "length" => {
                let [edge, value] = args else {
                    return Err(syntax(format!("expected `{keyword} <edge-id> <radians>`")));
                };
                check_ident(edge, line_no)?;
                let v = parse_decimal(value, line_no)?;
                let table = if keyword == "invariant" {
                    &mut invariant
                } else {
                    &mut length
                };
                if table.iter().any(|(_, e, _)| e == edge) {
                    return Err(syntax(format!(
                        "second `{keyword}` entry for edge `{edge}`"
                    )));
                }
                table.push((line_no, (*edge).to_string(), v));
            }
            "vertex" => {
                let Some((id, corners)) = args.split_first() else {
                    return Err(syntax(
                        "expected `vertex <vertex-id> <face-id>:<slot> ...`".into(),
                    ));
                };
                if corners.is_empty() {
                    return Err(syntax(format!("vertex `{id}` lists no corners")));
                }
                check_ident(id, line_no)?;
                if vertices.iter().any(|(_, v, _)| v == id) {
                    return Err(syntax(format!("duplicate vertex identifier `{id}`")));
                }
                let mut list = Vec::with_capacity(corners.len());
                for tok in corners {
                    let (face, slot) = tok.split_once(':').ok_or_else(|| {
                        syntax(format!("corner `{tok}` is not `<face-id>:<slot>`"))
                    })?;
                    check_ident(face, line_no)?;
                    let slot = match slot {
                        "0" => 0,
                        "1" => 1,
                        "2" => 2,
                        _ => return Err(syntax(format!("corner `{tok}`: slot must be 0, 1 or 2"))),
                    };
                    list.push((face.to_string(), slot));
                }
                vertices.push((line_no, (*id).to_string(), list));
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }

    let mut corner_owner: HashMap<usize, String> = HashMap::new();
    for (line, id, list) in vertices {
        let mut corners = Vec::with_capacity(list.len());
        for (face, slot) in list {
            let f = builder.face_index(&face).ok_or_else(|| Error::Syntax {
                line,
                message: format!("vertex `{id}` references unknown face `{face}`"),
            })?;
            let c = 3 * f + slot;
            if let Some(prev) = corner_owner.insert(c, id.clone()) {
                return Err(Error::Syntax {
                    line,
                    message: format!("corner {face}:{slot} already belongs to vertex `{prev}`"),
                });
            }
            corners.push(c);
        }
        builder.add_vertex(Vertex { id, corners });
    }

    let invariant = edge_table(&builder, invariant, "invariant")?;
    let length = edge_table(&builder, length, "length")?;
    Ok(MeshFile {
        mesh: builder.finish(),
        invariant,
        length,
    })
}

fn edge_table(
    builder: &MeshBuilder,
    rows: Vec<(usize, String, f64)>,
    what: &str,
) -> Result<Option<EdgeFunction>> {
    if rows.is_empty() {
        return Ok(None);
    }
    let mut values = vec![None; builder.num_edges()];
    for (line, edge, v) in rows {
        let e = builder.edge_index(&edge).ok_or_else(|| Error::Syntax {
            line,
            message: format!("{what} for edge `{edge}` which no face uses"),
        })?;
        values[e] = Some(v);
    }
    if let Some(missing) = values.iter().position(Option::is_none) {
        let name = builder.edge_name(missing);
        return Err(Error::Reference(format!(
            "{what} table has no entry for edge `{name}`"
        )));
    }
    Ok(Some(EdgeFunction::new(
        values.into_iter().flatten().collect(),
    )))
}

fn check_ident(tok: &str, line: usize) -> Result<()> {
    if !tok.is_empty() && tok.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
        Ok(())
    } else {
        Err(Error::Syntax {
            line,
            message: format!("`{tok}` is not a valid identifier"),
        })
    }
}

fn parse_decimal(tok: &str, line: usize) -> Result<f64> {
    let bad = || Error::Syntax {
        line,
        message: format!("`{tok}` is not a decimal number"),
    };
    let body = tok.strip_prefix(['+', '-']).unwrap_or(tok);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
        return Err(bad());
    }
    if let Some(exp) = exponent {
        let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
        if exp.is_empty() || !digits(exp) {
            return Err(bad());
        }
    }
    let v: f64 = tok.parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(Error::OutOfRange {
            line,
            text: tok.to_string(),
        });
    }
    Ok(v)
}

/// Canonical rendering; [`parse_mesh`] reads it back to an identical value.
pub fn render_mesh(file: &MeshFile) -> String {
    let m = &file.mesh;
    let mut out = String::new();
    if let Some(name) = m.name() {
        let _ = writeln!(out, "surface {name}");
    }
    for face in m.faces() {
        let [a, b, c] = face.edges.map(|e| m.edge_name(e));
        let _ = writeln!(out, "face {} {a} {b} {c}", face.id);
    }
    for v in m.vertices() {
        let corners: Vec<String> = v.corners.iter().map(|&c| m.corner_label(c)).collect();
        let _ = writeln!(out, "vertex {} {}", v.id, corners.join(" "));
    }
    for (key, table) in [("invariant", &file.invariant), ("length", &file.length)] {
        if let Some(t) = table {
            for (e, v) in t.iter().enumerate() {
                let _ = writeln!(out, "{key} {} {v:?}", m.edge_name(e));
            }
        }
    }
    out
}

//! Mesh file I/O.
//!
//! Native format: ASCII with sections `VERTICES` / `TRIANGLES` / `BOUNDARY`.
//! Coordinates are written with the shortest decimal representation that
//! round-trips, so write-then-read is the identity on vertices. A Gmsh MSH
//! 2.2 ASCII subset is supported for import: nodes, 2-node lines carrying
//! boundary markers via physical tags 1–5, and 3-node triangles carrying the
//! subdomain via physical tags 10/11.

use std::collections::HashMap;
use std::io::{BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::{BoundaryEdge, BoundaryMarker, Mesh};

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);

    writeln!(w, "VERTICES {}", mesh.vertices.len()).map_err(io_err)?;
    for p in &mesh.vertices {
        writeln!(w, "{} {}", p.x, p.y).map_err(io_err)?;
    }
    writeln!(w, "TRIANGLES {}", mesh.triangles.len()).map_err(io_err)?;
    for (tri, s) in mesh.triangles.iter().zip(&mesh.subdomain_of_triangle) {
        writeln!(w, "{} {} {} {}", tri[0], tri[1], tri[2], s).map_err(io_err)?;
    }
    writeln!(w, "BOUNDARY {}", mesh.boundary_edges.len()).map_err(io_err)?;
    for be in &mesh.boundary_edges {
        writeln!(
            w,
            "{} {} {}",
            be.vertices[0],
            be.vertices[1],
            be.marker.as_str()
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a mesh file, dispatching on content: files starting with
/// `$MeshFormat` are parsed as Gmsh MSH 2.2, anything else as the native
/// format.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mesh = if text.trim_start().starts_with("$MeshFormat") {
        parse_gmsh(&text)?
    } else {
        parse_native(&text)?
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Reads a Gmsh MSH 2.2 ASCII file regardless of header sniffing.
pub fn read_gmsh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut text = String::new();
    use std::io::Read as _;
    BufReader::new(file)
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mesh = parse_gmsh(&text)?;
    mesh.validate()?;
    Ok(mesh)
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
        }
    }

    /// Next non-empty line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.iter.by_ref() {
            let t = line.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_count(line: usize, text: &str, section: &str) -> Result<usize> {
    let mut parts = text.split_whitespace();
    let head = parts.next().unwrap_or("");
    if head != section {
        return Err(Error::Parse {
            line,
            msg: format!("expected section {section}, found {head:?}"),
        });
    }
    parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("section {section} needs an entry count"),
        })
}

fn field<T: std::str::FromStr>(
    parts: &mut std::str::SplitWhitespace,
    line: usize,
    what: &str,
) -> Result<T> {
    parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("missing or malformed {what}"),
        })
}

fn parse_native(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);

    let (ln, header) = lines.expect("VERTICES")?;
    let n_vertices = parse_count(ln, header, "VERTICES")?;
    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (ln, line) = lines.expect("a vertex line")?;
        let mut parts = line.split_whitespace();
        let x: f64 = field(&mut parts, ln, "x coordinate")?;
        let y: f64 = field(&mut parts, ln, "y coordinate")?;
        vertices.push(Point::new(x, y));
    }

    let (ln, header) = lines.expect("TRIANGLES")?;
    let n_triangles = parse_count(ln, header, "TRIANGLES")?;
    let mut triangles = Vec::with_capacity(n_triangles);
    let mut subdomain = Vec::with_capacity(n_triangles);
    for _ in 0..n_triangles {
        let (ln, line) = lines.expect("a triangle line")?;
        let mut parts = line.split_whitespace();
        let a: usize = field(&mut parts, ln, "vertex index")?;
        let b: usize = field(&mut parts, ln, "vertex index")?;
        let c: usize = field(&mut parts, ln, "vertex index")?;
        let s: u8 = field(&mut parts, ln, "subdomain tag")?;
        if s > 1 {
            return Err(Error::Parse {
                line: ln,
                msg: format!("subdomain tag must be 0 or 1, got {s}"),
            });
        }
        triangles.push([a, b, c]);
        subdomain.push(s);
    }

    let (ln, header) = lines.expect("BOUNDARY")?;
    let n_boundary = parse_count(ln, header, "BOUNDARY")?;
    let mut boundary_edges = Vec::with_capacity(n_boundary);
    for _ in 0..n_boundary {
        let (ln, line) = lines.expect("a boundary edge line")?;
        let mut parts = line.split_whitespace();
        let a: usize = field(&mut parts, ln, "vertex index")?;
        let b: usize = field(&mut parts, ln, "vertex index")?;
        let marker_text = parts.next().ok_or_else(|| Error::Parse {
            line: ln,
            msg: "missing boundary marker".into(),
        })?;
        let marker = BoundaryMarker::from_str(marker_text).ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("unknown boundary marker {marker_text:?}"),
        })?;
        boundary_edges.push(BoundaryEdge {
            vertices: [a, b],
            marker,
        });
    }

    let mut mesh = Mesh {
        vertices,
        triangles,
        subdomain_of_triangle: subdomain,
        boundary_edges,
        h: 0.0,
    };
    mesh.h = mesh.compute_h();
    Ok(mesh)
}

fn gmsh_marker(physical: i64, line: usize) -> Result<BoundaryMarker> {
    match physical {
        1 => Ok(BoundaryMarker::OuterDirichlet),
        2 => Ok(BoundaryMarker::OuterRobin),
        3 => Ok(BoundaryMarker::OuterNeumann),
        4 => Ok(BoundaryMarker::InterfaceSide0),
        5 => Ok(BoundaryMarker::InterfaceSide1),
        other => Err(Error::Parse {
            line,
            msg: format!("unknown physical tag {other} for a boundary line"),
        }),
    }
}

fn parse_gmsh(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);

    let (ln, header) = lines.expect("$MeshFormat")?;
    if header != "$MeshFormat" {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected $MeshFormat, found {header:?}"),
        });
    }
    let (ln, version) = lines.expect("a format line")?;
    let mut parts = version.split_whitespace();
    let ver = parts.next().unwrap_or("");
    if !ver.starts_with("2.2") {
        return Err(Error::Parse {
            line: ln,
            msg: format!("unsupported MSH version {ver:?}, only 2.2 ASCII"),
        });
    }
    let (ln, end) = lines.expect("$EndMeshFormat")?;
    if end != "$EndMeshFormat" {
        return Err(Error::Parse {
            line: ln,
            msg: "expected $EndMeshFormat".into(),
        });
    }

    // Skip optional sections until $Nodes.
    let (mut ln, mut section) = lines.expect("$Nodes")?;
    while section != "$Nodes" {
        if !section.starts_with('$') {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected a section header, found {section:?}"),
            });
        }
        let terminator = format!("$End{}", &section[1..]);
        loop {
            let (l, s) = lines.expect(&terminator)?;
            if s == terminator {
                break;
            }
            let _ = l;
        }
        (ln, section) = lines.expect("$Nodes")?;
    }

    let (ln, count) = lines.expect("a node count")?;
    let n_nodes: usize = count.trim().parse().map_err(|_| Error::Parse {
        line: ln,
        msg: "node count must be an integer".into(),
    })?;
    let mut vertices = Vec::with_capacity(n_nodes);
    let mut id_map: HashMap<i64, usize> = HashMap::new();
    for _ in 0..n_nodes {
        let (ln, line) = lines.expect("a node line")?;
        let mut parts = line.split_whitespace();
        let id: i64 = field(&mut parts, ln, "node id")?;
        let x: f64 = field(&mut parts, ln, "x coordinate")?;
        let y: f64 = field(&mut parts, ln, "y coordinate")?;
        if id_map.insert(id, vertices.len()).is_some() {
            return Err(Error::Parse {
                line: ln,
                msg: format!("duplicate node id {id}"),
            });
        }
        vertices.push(Point::new(x, y));
    }
    let (ln, end) = lines.expect("$EndNodes")?;
    if end != "$EndNodes" {
        return Err(Error::Parse {
            line: ln,
            msg: "expected $EndNodes".into(),
        });
    }

    let (ln, section) = lines.expect("$Elements")?;
    if section != "$Elements" {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected $Elements, found {section:?}"),
        });
    }
    let (ln, count) = lines.expect("an element count")?;
    let n_elements: usize = count.trim().parse().map_err(|_| Error::Parse {
        line: ln,
        msg: "element count must be an integer".into(),
    })?;

    let mut triangles = Vec::new();
    let mut subdomain = Vec::new();
    let mut boundary_edges = Vec::new();
    for _ in 0..n_elements {
        let (ln, line) = lines.expect("an element line")?;
        let mut parts = line.split_whitespace();
        let _id: i64 = field(&mut parts, ln, "element id")?;
        let etype: i64 = field(&mut parts, ln, "element type")?;
        let n_tags: usize = field(&mut parts, ln, "tag count")?;
        let mut tags = Vec::with_capacity(n_tags);
        for _ in 0..n_tags {
            tags.push(field::<i64>(&mut parts, ln, "tag")?);
        }
        let physical = *tags.first().ok_or_else(|| Error::Parse {
            line: ln,
            msg: "element needs at least a physical tag".into(),
        })?;
        let mut node = |what| -> Result<usize> {
            let id: i64 = field(&mut parts, ln, what)?;
            id_map.get(&id).copied().ok_or_else(|| Error::Parse {
                line: ln,
                msg: format!("element references unknown node {id}"),
            })
        };
        match etype {
            1 => {
                let a = node("line node")?;
                let b = node("line node")?;
                boundary_edges.push(BoundaryEdge {
                    vertices: [a, b],
                    marker: gmsh_marker(physical, ln)?,
                });
            }
            2 => {
                let a = node("triangle node")?;
                let b = node("triangle node")?;
                let c = node("triangle node")?;
                let s = match physical {
                    10 => 0u8,
                    11 => 1u8,
                    other => {
                        return Err(Error::Parse {
                            line: ln,
                            msg: format!(
                                "triangle physical tag must be 10 or 11, got {other}"
                            ),
                        })
                    }
                };
                triangles.push([a, b, c]);
                subdomain.push(s);
            }
            other => {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("unsupported element type {other}"),
                })
            }
        }
    }
    let (ln, end) = lines.expect("$EndElements")?;
    if end != "$EndElements" {
        return Err(Error::Parse {
            line: ln,
            msg: "expected $EndElements".into(),
        });
    }

    let mut mesh = Mesh {
        vertices,
        triangles,
        subdomain_of_triangle: subdomain,
        boundary_edges,
        h: 0.0,
    };
    mesh.h = mesh.compute_h();
    Ok(mesh)
}

//! Bi-domain triangular meshes with an interior interface polyline.
//!
//! A [`Mesh`] triangulates both the habitat `Ω₀` and the surrounding region
//! `Ω₁`. The interface `Γ` is carried twice: once as the set of
//! `InterfaceSide0` edges (edges of subdomain-0 triangles) and once as the
//! `InterfaceSide1` edges. For a conformal discretisation the two edge sets
//! use the same vertices; for a nonconformal one they describe the same
//! polyline through different node sets.

mod generators;
mod io;

pub use generators::{gen_disk_bidomain, gen_rect_bidomain, gen_strip_bidomain, Conformity, StripBc};
pub use io::{read_gmsh, read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::geometry::{signed_area_x2, Point};

/// Classification of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMarker {
    OuterDirichlet,
    OuterRobin,
    OuterNeumann,
    InterfaceSide0,
    InterfaceSide1,
}

impl BoundaryMarker {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryMarker::OuterDirichlet => "OUTER_DIRICHLET",
            BoundaryMarker::OuterRobin => "OUTER_ROBIN",
            BoundaryMarker::OuterNeumann => "OUTER_NEUMANN",
            BoundaryMarker::InterfaceSide0 => "INTERFACE_SIDE0",
            BoundaryMarker::InterfaceSide1 => "INTERFACE_SIDE1",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "OUTER_DIRICHLET" => Some(BoundaryMarker::OuterDirichlet),
            "OUTER_ROBIN" => Some(BoundaryMarker::OuterRobin),
            "OUTER_NEUMANN" => Some(BoundaryMarker::OuterNeumann),
            "INTERFACE_SIDE0" => Some(BoundaryMarker::InterfaceSide0),
            "INTERFACE_SIDE1" => Some(BoundaryMarker::InterfaceSide1),
            _ => None,
        }
    }
}

/// A boundary edge: a vertex pair plus its marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub marker: BoundaryMarker,
}

/// Bi-domain triangulation.
///
/// Invariants (see [`Mesh::validate`]): positive triangle areas; each
/// interface edge belongs to exactly one triangle of its side's subdomain;
/// both interface edge sets describe the same polyline; no triangle
/// straddles `Γ`.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Vertex indices, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Subdomain tag (0 or 1) per triangle.
    pub subdomain_of_triangle: Vec<u8>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Longest edge length over all triangles.
    pub h: f64,
}

/// One interface segment as seen from one side.
#[derive(Debug, Clone, Copy)]
pub struct TraceSegment {
    /// Mesh vertex indices of the segment endpoints, ordered along the trace.
    pub vertices: [usize; 2],
    /// Index of the owning triangle (on this side's subdomain).
    pub triangle: usize,
    /// Unit normal pointing from `Ω₀` into `Ω₁`.
    pub normal: [f64; 2],
    /// Arc-length coordinate of the segment start along `Γ`.
    pub s_start: f64,
    pub length: f64,
}

/// The trace of one subdomain's triangulation on `Γ`, ordered so that `Ω₀`
/// lies on the left of the walking direction.
#[derive(Debug, Clone)]
pub struct InterfaceTrace {
    pub segments: Vec<TraceSegment>,
    /// 0 or 1.
    pub side: u8,
    pub total_length: f64,
    pub closed: bool,
}

impl InterfaceTrace {
    /// Ordered list of trace vertices. For a closed trace the first vertex is
    /// not repeated at the end.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.segments.iter().map(|s| s.vertices[0]).collect();
        if !self.closed {
            if let Some(last) = self.segments.last() {
                vs.push(last.vertices[1]);
            }
        }
        vs
    }
}

/// Mesh regularity measures.
#[derive(Debug, Clone, Copy)]
pub struct QualityReport {
    /// `max_K h_K / ρ_K` with `ρ_K` the inradius.
    pub sigma1: f64,
    /// `min |F| / max |F'|` over side-0 interface segments.
    pub sigma2: f64,
    pub min_angle_deg: f64,
}

impl Mesh {
    pub fn point(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * signed_area_x2(a, b, c)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Longest edge over all triangles; used to (re)compute `h`.
    pub fn compute_h(&self) -> f64 {
        let mut h = 0.0f64;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                h = h.max(p[i].dist(p[(i + 1) % 3]));
            }
        }
        h
    }

    pub fn domain_diameter(&self) -> f64 {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        (xmax - xmin).hypot(ymax - ymin)
    }

    /// Sum of triangle areas of one subdomain.
    pub fn subdomain_area(&self, subdomain: u8) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.subdomain_of_triangle[t] == subdomain)
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Checks all structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.triangles.len() != self.subdomain_of_triangle.len() {
            return Err(Error::MeshTopology(
                "subdomain tag count does not match triangle count".into(),
            ));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= self.vertices.len() {
                    return Err(Error::MeshTopology(format!(
                        "triangle {t} references vertex {v} out of range"
                    )));
                }
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::MeshTopology(format!(
                    "triangle {t} has non-positive area"
                )));
            }
        }
        // Each interface edge must belong to exactly one triangle of its side.
        let owners = [self.edge_owners(0), self.edge_owners(1)];
        for be in &self.boundary_edges {
            let side = match be.marker {
                BoundaryMarker::InterfaceSide0 => 0usize,
                BoundaryMarker::InterfaceSide1 => 1usize,
                _ => continue,
            };
            let key = ordered(be.vertices);
            match owners[side].iter().filter(|&&(k, _)| k == key).count() {
                1 => {}
                n => {
                    return Err(Error::MeshTopology(format!(
                        "interface edge {:?} on side {side} owned by {n} triangles",
                        be.vertices
                    )))
                }
            }
        }
        // Both interface edge sets must describe the same polyline.
        let tol = 1e-12 * self.h.max(1e-300);
        let side0: Vec<(Point, Point)> = self.interface_edges(BoundaryMarker::InterfaceSide0);
        let side1: Vec<(Point, Point)> = self.interface_edges(BoundaryMarker::InterfaceSide1);
        if side0.is_empty() || side1.is_empty() {
            return Err(Error::MeshTopology("missing interface edges".into()));
        }
        let d01 = polyline_hausdorff(&side0, &side1);
        let d10 = polyline_hausdorff(&side1, &side0);
        if d01 > tol || d10 > tol {
            return Err(Error::MeshTopology(format!(
                "interface traces disagree as point sets (distances {d01:.3e}, {d10:.3e})"
            )));
        }
        Ok(())
    }

    fn interface_edges(&self, marker: BoundaryMarker) -> Vec<(Point, Point)> {
        self.boundary_edges
            .iter()
            .filter(|be| be.marker == marker)
            .map(|be| (self.vertices[be.vertices[0]], self.vertices[be.vertices[1]]))
            .collect()
    }

    fn edge_owners(&self, subdomain: u8) -> Vec<((usize, usize), usize)> {
        let mut owners = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if self.subdomain_of_triangle[t] != subdomain {
                continue;
            }
            for i in 0..3 {
                owners.push((ordered([tri[i], tri[(i + 1) % 3]]), t));
            }
        }
        owners
    }
}

fn ordered(v: [usize; 2]) -> (usize, usize) {
    if v[0] <= v[1] {
        (v[0], v[1])
    } else {
        (v[1], v[0])
    }
}

/// One-sided Hausdorff distance from the endpoints/midpoints of `a` to the
/// union of segments in `b`.
fn polyline_hausdorff(a: &[(Point, Point)], b: &[(Point, Point)]) -> f64 {
    let mut worst = 0.0f64;
    for &(p, q) in a {
        for sample in [p, p.lerp(q, 0.5), q] {
            let mut best = f64::INFINITY;
            for &(r, s) in b {
                best = best.min(point_segment_dist(sample, r, s));
                if best == 0.0 {
                    break;
                }
            }
            worst = worst.max(best);
        }
    }
    worst
}

fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Extracts the two ordered interface traces; normals point from `Ω₀` into
/// `Ω₁` on both sides.
pub fn extract_interface_traces(mesh: &Mesh) -> Result<(InterfaceTrace, InterfaceTrace)> {
    let t0 = extract_trace(mesh, 0)?;
    let t1 = extract_trace(mesh, 1)?;
    let rel = (t0.total_length - t1.total_length).abs() / t0.total_length.max(1e-300);
    if rel > 1e-10 {
        return Err(Error::MeshTopology(format!(
            "interface traces cover different lengths ({} vs {})",
            t0.total_length, t1.total_length
        )));
    }
    Ok((t0, t1))
}

fn extract_trace(mesh: &Mesh, side: u8) -> Result<InterfaceTrace> {
    let marker = if side == 0 {
        BoundaryMarker::InterfaceSide0
    } else {
        BoundaryMarker::InterfaceSide1
    };
    let edges: Vec<[usize; 2]> = mesh
        .boundary_edges
        .iter()
        .filter(|be| be.marker == marker)
        .map(|be| be.vertices)
        .collect();
    if edges.is_empty() {
        return Err(Error::MeshTopology(format!(
            "no interface edges on side {side}"
        )));
    }

    // Owning triangle per edge (exactly one, on this side's subdomain).
    let owners = mesh.edge_owners(side);
    let owner_of = |e: [usize; 2]| -> Result<usize> {
        let key = ordered(e);
        let mut found = None;
        for &(k, t) in &owners {
            if k == key {
                if found.is_some() {
                    return Err(Error::MeshTopology(format!(
                        "interface edge {e:?} owned by more than one side-{side} triangle"
                    )));
                }
                found = Some(t);
            }
        }
        found.ok_or_else(|| {
            Error::MeshTopology(format!(
                "interface edge {e:?} has no owning side-{side} triangle"
            ))
        })
    };

    // Chain the edges into a single polyline. Adjacency by shared vertex.
    let mut adj: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        adj.entry(e[0]).or_default().push(i);
        adj.entry(e[1]).or_default().push(i);
    }
    for (v, es) in &adj {
        if es.len() > 2 {
            return Err(Error::MeshTopology(format!(
                "interface vertex {v} shared by {} edges; Γ must be a simple polyline",
                es.len()
            )));
        }
    }
    let endpoints: Vec<usize> = adj
        .iter()
        .filter(|(_, es)| es.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    let closed = endpoints.is_empty();
    if !closed && endpoints.len() != 2 {
        return Err(Error::MeshTopology(format!(
            "interface polyline on side {side} has {} endpoints",
            endpoints.len()
        )));
    }

    // Canonical start: open polyline starts at the lexicographically smaller
    // endpoint; a closed one at the lexicographically smallest trace vertex.
    // Both sides compute this from geometry, so their parameterisations match.
    let start = if closed {
        *adj.keys()
            .min_by(|&&a, &&b| {
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                pa.x.partial_cmp(&pb.x)
                    .unwrap()
                    .then(pa.y.partial_cmp(&pb.y).unwrap())
            })
            .unwrap()
    } else {
        let (a, b) = (endpoints[0], endpoints[1]);
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        if (pa.x, pa.y) <= (pb.x, pb.y) {
            a
        } else {
            b
        }
    };

    // Walk the chain from `start`.
    let mut chain: Vec<usize> = vec![start];
    let mut used = vec![false; edges.len()];
    let mut ordered_edges: Vec<[usize; 2]> = Vec::with_capacity(edges.len());
    let mut current = start;
    loop {
        let next_edge = adj[&current].iter().copied().find(|&e| !used[e]);
        let Some(e) = next_edge else { break };
        used[e] = true;
        let [a, b] = edges[e];
        let next = if a == current { b } else { a };
        ordered_edges.push([current, next]);
        chain.push(next);
        current = next;
        if closed && current == start {
            break;
        }
    }
    if ordered_edges.len() != edges.len() {
        return Err(Error::MeshTopology(format!(
            "interface on side {side} is disconnected ({}/{} edges chained)",
            ordered_edges.len(),
            edges.len()
        )));
    }

    // For a closed trace pick the walking direction that keeps Ω₀ on the
    // left (counter-clockwise around Ω₀). For an open trace the convention is
    // the same, checked against the side-0 owner triangles; side 1 owners lie
    // on the right instead.
    let needs_flip = {
        let [a, b] = ordered_edges[0];
        let t = owner_of(ordered_edges[0])?;
        let centroid = {
            let p = mesh.triangle_points(t);
            Point::new(
                (p[0].x + p[1].x + p[2].x) / 3.0,
                (p[0].y + p[1].y + p[2].y) / 3.0,
            )
        };
        let tangent = mesh.vertices[b].sub(mesh.vertices[a]);
        let to_owner = centroid.sub(mesh.vertices[a]);
        let owner_on_left = tangent.cross(to_owner) > 0.0;
        // Ω₀ on the left means: side-0 owner left, side-1 owner right.
        if side == 0 {
            !owner_on_left
        } else {
            owner_on_left
        }
    };
    if needs_flip {
        ordered_edges.reverse();
        for e in &mut ordered_edges {
            e.swap(0, 1);
        }
    }

    let mut segments = Vec::with_capacity(ordered_edges.len());
    let mut s = 0.0;
    for e in &ordered_edges {
        let (pa, pb) = (mesh.vertices[e[0]], mesh.vertices[e[1]]);
        let len = pa.dist(pb);
        let tangent = pb.sub(pa).scale(1.0 / len);
        // With Ω₀ on the left, the normal into Ω₁ is the right-hand normal.
        let normal = [tangent.y, -tangent.x];
        segments.push(TraceSegment {
            vertices: *e,
            triangle: owner_of(*e)?,
            normal,
            s_start: s,
            length: len,
        });
        s += len;
    }

    Ok(InterfaceTrace {
        segments,
        side,
        total_length: s,
        closed,
    })
}

/// Mesh regularity measures; `sigma1` uses the inradius, so an equilateral
/// triangle scores `2√3`.
pub fn mesh_quality(mesh: &Mesh) -> QualityReport {
    let mut sigma1 = 0.0f64;
    let mut min_angle = f64::INFINITY;
    for t in 0..mesh.n_triangles() {
        let p = mesh.triangle_points(t);
        let a = p[1].dist(p[2]);
        let b = p[2].dist(p[0]);
        let c = p[0].dist(p[1]);
        let area = mesh.triangle_area(t);
        let inradius = 2.0 * area / (a + b + c);
        let h_k = a.max(b).max(c);
        sigma1 = sigma1.max(h_k / inradius);
        for (u, v, w) in [(a, b, c), (b, c, a), (c, a, b)] {
            // Angle opposite side u.
            let cos = ((v * v + w * w - u * u) / (2.0 * v * w)).clamp(-1.0, 1.0);
            min_angle = min_angle.min(cos.acos().to_degrees());
        }
    }
    let mut fmin = f64::INFINITY;
    let mut fmax = 0.0f64;
    for be in &mesh.boundary_edges {
        if be.marker == BoundaryMarker::InterfaceSide0 {
            let len = mesh.vertices[be.vertices[0]].dist(mesh.vertices[be.vertices[1]]);
            fmin = fmin.min(len);
            fmax = fmax.max(len);
        }
    }
    QualityReport {
        sigma1,
        sigma2: if fmax > 0.0 { fmin / fmax } else { f64::NAN },
        min_angle_deg: min_angle,
    }
}

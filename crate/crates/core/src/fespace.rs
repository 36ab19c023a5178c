//! P1 Lagrange spaces per subdomain with duplicated interface degrees of
//! freedom, and the P1 multiplier space on the side-0 trace of `Γ`.
//!
//! A vertex on `Γ` belongs to both subdomains and therefore receives one dof
//! in each space; the discrete density is genuinely two-valued there, which
//! is what carries the jump `w₀ = κw₁`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{barycentric, Point};
use crate::mesh::{BoundaryMarker, InterfaceTrace, Mesh};

/// Dof numbering for the P1 space of one subdomain.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub subdomain: u8,
    /// Per mesh vertex: the dof index, or `None` if the vertex does not
    /// belong to this subdomain.
    pub dof_of_vertex: Vec<Option<usize>>,
    /// Mesh vertex backing each dof.
    pub vertex_of_dof: Vec<usize>,
    /// Dofs on `OUTER_DIRICHLET` edges of this subdomain.
    pub dirichlet_dofs: HashSet<usize>,
    /// Dofs on this subdomain's side of `Γ`.
    pub interface_dofs: HashSet<usize>,
    pub n_dofs: usize,
}

impl DofMap {
    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.dof_of_vertex[vertex]
    }
}

/// Builds the P1 space of one subdomain: one dof per vertex incident to a
/// triangle of that subdomain, numbered in ascending vertex order.
pub fn build_space(mesh: &Mesh, subdomain: u8) -> DofMap {
    let mut used = vec![false; mesh.n_vertices()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if mesh.subdomain_of_triangle[t] == subdomain {
            for &v in tri {
                used[v] = true;
            }
        }
    }
    let mut dof_of_vertex = vec![None; mesh.n_vertices()];
    let mut vertex_of_dof = Vec::new();
    for (v, &u) in used.iter().enumerate() {
        if u {
            dof_of_vertex[v] = Some(vertex_of_dof.len());
            vertex_of_dof.push(v);
        }
    }

    let interface_marker = if subdomain == 0 {
        BoundaryMarker::InterfaceSide0
    } else {
        BoundaryMarker::InterfaceSide1
    };
    let mut dirichlet_dofs = HashSet::new();
    let mut interface_dofs = HashSet::new();
    for be in &mesh.boundary_edges {
        for &v in &be.vertices {
            let Some(d) = dof_of_vertex[v] else { continue };
            if be.marker == BoundaryMarker::OuterDirichlet {
                dirichlet_dofs.insert(d);
            }
            if be.marker == interface_marker {
                interface_dofs.insert(d);
            }
        }
    }
    // A Dirichlet edge of the other subdomain may touch a shared vertex of
    // this one (e.g. an interface endpoint on the outer boundary); keep only
    // dofs whose vertex lies on a Dirichlet edge owned by this subdomain's
    // closure, which the loop above already guarantees via dof membership.

    DofMap {
        subdomain,
        dof_of_vertex,
        n_dofs: vertex_of_dof.len(),
        vertex_of_dof,
        dirichlet_dofs,
        interface_dofs,
    }
}

/// Continuous P1 multiplier space on the side-0 trace: one dof per trace
/// vertex, shared across polygon corners.
#[derive(Debug, Clone)]
pub struct MultiplierSpace {
    pub trace: InterfaceTrace,
    /// Mesh vertex → multiplier dof.
    pub dof_of_trace_vertex: HashMap<usize, usize>,
    /// Mesh vertex backing each multiplier dof.
    pub vertex_of_dof: Vec<usize>,
    pub n_dofs: usize,
}

pub fn build_multiplier_space(trace0: InterfaceTrace) -> MultiplierSpace {
    assert_eq!(trace0.side, 0, "multiplier space lives on the side-0 trace");
    let vertices = trace0.vertices();
    let mut dof_of_trace_vertex = HashMap::new();
    for (i, &v) in vertices.iter().enumerate() {
        dof_of_trace_vertex.insert(v, i);
    }
    MultiplierSpace {
        trace: trace0,
        n_dofs: vertices.len(),
        vertex_of_dof: vertices,
        dof_of_trace_vertex,
    }
}

/// Coefficient vector over one space's dofs.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    pub values: Vec<f64>,
}

impl FieldVector {
    pub fn zeros(n: usize) -> Self {
        FieldVector {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn assert_finite(&self) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Eval(format!("non-finite value {v} at dof {i}")));
            }
        }
        Ok(())
    }
}

/// Nodal interpolation: `values[i] = f(vertex of dof i)`, with Dirichlet
/// dofs forced to 0.
pub fn interpolate(
    mesh: &Mesh,
    space: &DofMap,
    f: impl Fn(Point) -> f64,
) -> Result<FieldVector> {
    let mut out = FieldVector::zeros(space.n_dofs);
    for (d, &v) in space.vertex_of_dof.iter().enumerate() {
        let val = f(mesh.vertices[v]);
        if !val.is_finite() {
            return Err(Error::Eval(format!(
                "interpolated field is {val} at vertex {v} ({:?})",
                mesh.vertices[v]
            )));
        }
        out.values[d] = val;
    }
    for &d in &space.dirichlet_dofs {
        out.values[d] = 0.0;
    }
    Ok(out)
}

/// Uniform-grid bucket locator over the triangles of one subdomain.
///
/// Buckets are sized from the triangle count; a query walks the candidate
/// triangles of the containing bucket and tests barycentric coordinates with
/// a small negative slack so points on element edges are found.
#[derive(Debug, Clone)]
pub struct PointLocator {
    subdomain: u8,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
    tol: f64,
}

impl PointLocator {
    pub fn build(mesh: &Mesh, subdomain: u8) -> Self {
        let tris: Vec<usize> = (0..mesh.n_triangles())
            .filter(|&t| mesh.subdomain_of_triangle[t] == subdomain)
            .collect();
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &t in &tris {
            for p in mesh.triangle_points(t) {
                x0 = x0.min(p.x);
                x1 = x1.max(p.x);
                y0 = y0.min(p.y);
                y1 = y1.max(p.y);
            }
        }
        let n = (tris.len() as f64).sqrt().ceil() as usize;
        let (nx, ny) = (n.max(1), n.max(1));
        let dx = ((x1 - x0) / nx as f64).max(f64::MIN_POSITIVE);
        let dy = ((y1 - y0) / ny as f64).max(f64::MIN_POSITIVE);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        for &t in &tris {
            let p = mesh.triangle_points(t);
            let (txa, txb) = (
                p.iter().map(|q| q.x).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.x).fold(f64::NEG_INFINITY, f64::max),
            );
            let (tya, tyb) = (
                p.iter().map(|q| q.y).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.y).fold(f64::NEG_INFINITY, f64::max),
            );
            let (ia, ib) = (clamp((txa - x0) / dx, nx), clamp((txb - x0) / dx, nx));
            let (ja, jb) = (clamp((tya - y0) / dy, ny), clamp((tyb - y0) / dy, ny));
            for j in ja..=jb {
                for i in ia..=ib {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        PointLocator {
            subdomain,
            x0,
            y0,
            dx,
            dy,
            nx,
            ny,
            buckets,
            tol: 1e-10,
        }
    }

    pub fn subdomain(&self) -> u8 {
        self.subdomain
    }

    /// Containing triangle and barycentric coordinates of `p`, or `None` if
    /// the point lies outside this subdomain.
    pub fn locate(&self, mesh: &Mesh, p: Point) -> Option<(usize, [f64; 3])> {
        let i = (((p.x - self.x0) / self.dx).floor().max(0.0) as usize).min(self.nx - 1);
        let j = (((p.y - self.y0) / self.dy).floor().max(0.0) as usize).min(self.ny - 1);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let [a, b, c] = mesh.triangle_points(t);
            let l = barycentric(a, b, c, p);
            let worst = l[0].min(l[1]).min(l[2]);
            if worst >= -self.tol && best.as_ref().map_or(true, |&(_, _, w)| worst > w) {
                best = Some((t, l, worst));
            }
        }
        best.map(|(t, l, _)| (t, l))
    }
}

/// Exact P1 evaluation of `field` at `p` within the locator's subdomain.
pub fn eval_point(
    mesh: &Mesh,
    space: &DofMap,
    field: &FieldVector,
    locator: &PointLocator,
    p: Point,
) -> Result<f64> {
    let (t, l) = locator.locate(mesh, p).ok_or_else(|| {
        Error::Geometry(format!(
            "point ({}, {}) lies outside subdomain {}",
            p.x, p.y, locator.subdomain
        ))
    })?;
    let tri = mesh.triangles[t];
    let mut out = 0.0;
    for k in 0..3 {
        let d = space.dof(tri[k]).ok_or_else(|| {
            Error::Eval(format!("vertex {} has no dof in subdomain {}", tri[k], space.subdomain))
        })?;
        out += l[k] * field.values[d];
    }
    Ok(out)
}

/// Samples a P1 field at `n_samples` equally spaced points of the segment
/// `[p0, p1]`; returns `(arc length, value)` pairs. Points on `Γ` are
/// evaluated from the space's own side.
pub fn eval_on_segment(
    mesh: &Mesh,
    space: &DofMap,
    field: &FieldVector,
    p0: Point,
    p1: Point,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    assert!(n_samples >= 2);
    let locator = PointLocator::build(mesh, space.subdomain);
    let len = p0.dist(p1);
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = k as f64 / (n_samples - 1) as f64;
        let p = p0.lerp(p1, t);
        out.push((t * len, eval_point(mesh, space, field, &locator, p)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::mesh::{
        extract_interface_traces, gen_rect_bidomain, gen_strip_bidomain, Conformity, StripBc,
    };

    fn frame(n_inner: usize, conformity: Conformity) -> Mesh {
        gen_rect_bidomain(
            Rect::new(0.0, 10.0, 0.0, 10.0),
            Rect::new(3.0, 7.0, 3.0, 7.0),
            n_inner,
            4,
            1.2,
            conformity,
        )
        .unwrap()
    }

    #[test]
    fn interface_vertices_get_one_dof_per_side() {
        let mesh = frame(5, Conformity::Conformal);
        let s0 = build_space(&mesh, 0);
        let s1 = build_space(&mesh, 1);
        // Shared Γ vertices are counted once per space.
        let shared = (0..mesh.n_vertices())
            .filter(|&v| s0.dof(v).is_some() && s1.dof(v).is_some())
            .count();
        assert_eq!(shared, 16); // 4·(n−1) ring vertices
        assert_eq!(s0.n_dofs + s1.n_dofs, mesh.n_vertices() + shared);
        assert_eq!(s0.interface_dofs.len(), 16);
        assert_eq!(s1.interface_dofs.len(), 16);
        // Γ does not touch ∂Ω here.
        assert!(s0.dirichlet_dofs.is_empty());
        assert!(s1.interface_dofs.is_disjoint(&s1.dirichlet_dofs));
    }

    #[test]
    fn multiplier_space_counts() {
        // Closed square Γ with 9 nodes per side → 32 dofs (corners shared).
        let mesh = frame(9, Conformity::Conformal);
        let (t0, _) = extract_interface_traces(&mesh).unwrap();
        let m = build_multiplier_space(t0);
        assert_eq!(m.n_dofs, 32);
        // Open strip interface with n nodes → n dofs.
        let strip = gen_strip_bidomain(
            2.0,
            4.0,
            0.0,
            1.0,
            5,
            5,
            7,
            1.1,
            Conformity::Nonconformal,
            StripBc {
                ell0: BoundaryMarker::OuterRobin,
                ell1: BoundaryMarker::OuterDirichlet,
                horizontal: BoundaryMarker::OuterNeumann,
            },
        )
        .unwrap();
        let (t0, _) = extract_interface_traces(&strip).unwrap();
        let m = build_multiplier_space(t0);
        assert_eq!(m.n_dofs, 7);
    }

    #[test]
    fn interpolate_linear_field_is_exact_on_cuts() {
        let mesh = frame(6, Conformity::Nonconformal);
        let s0 = build_space(&mesh, 0);
        let field = interpolate(&mesh, &s0, |p| 2.0 * p.x - 0.5 * p.y + 1.0).unwrap();
        let samples = eval_on_segment(
            &mesh,
            &s0,
            &field,
            Point::new(3.2, 4.1),
            Point::new(6.8, 5.9),
            17,
        )
        .unwrap();
        for (s, v) in samples {
            let t = s / Point::new(3.2, 4.1).dist(Point::new(6.8, 5.9));
            let p = Point::new(3.2, 4.1).lerp(Point::new(6.8, 5.9), t);
            assert!((v - (2.0 * p.x - 0.5 * p.y + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_peak_value() {
        // Height-10 Gaussian with variance 0.25 integrates the paper's
        // initial condition; its peak is 10/(2π·0.25) = 20/π.
        let mesh = frame(11, Conformity::Conformal);
        let s0 = build_space(&mesh, 0);
        let g = |p: Point| {
            let (dx, dy) = (p.x - 5.0, p.y - 5.0);
            10.0 / (2.0 * std::f64::consts::PI * 0.25)
                * (-(dx * dx + dy * dy) / (2.0 * 0.25)).exp()
        };
        let field = interpolate(&mesh, &s0, g).unwrap();
        let center = s0
            .vertex_of_dof
            .iter()
            .position(|&v| mesh.vertices[v].dist(Point::new(5.0, 5.0)) < 1e-12)
            .unwrap();
        assert!((field.values[center] - 20.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn sample_outside_domain_errors() {
        let mesh = frame(5, Conformity::Conformal);
        let s0 = build_space(&mesh, 0);
        let field = interpolate(&mesh, &s0, |_| 1.0).unwrap();
        let out = eval_on_segment(
            &mesh,
            &s0,
            &field,
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
            3,
        );
        assert!(matches!(out, Err(Error::Geometry(_))));
    }

    #[test]
    fn dirichlet_dofs_follow_markers() {
        let strip = gen_strip_bidomain(
            2.0,
            4.0,
            0.0,
            1.0,
            5,
            5,
            4,
            1.1,
            Conformity::Conformal,
            StripBc {
                ell0: BoundaryMarker::OuterRobin,
                ell1: BoundaryMarker::OuterDirichlet,
                horizontal: BoundaryMarker::OuterNeumann,
            },
        )
        .unwrap();
        let s0 = build_space(&strip, 0);
        let s1 = build_space(&strip, 1);
        assert!(s0.dirichlet_dofs.is_empty());
        assert_eq!(s1.dirichlet_dofs.len(), 4); // the ℓ₁ column of nodes
        for &d in &s1.dirichlet_dofs {
            let v = s1.vertex_of_dof[d];
            assert!((strip.vertices[v].x + 4.0).abs() < 1e-12);
        }
    }
}

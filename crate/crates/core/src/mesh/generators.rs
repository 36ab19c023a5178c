//! Deterministic structured mesh generators.
//!
//! All generators build the mesh from axis-aligned or polar blocks, dedupe
//! vertices by coordinate (tolerance `1e−12 ·` domain diameter) and derive
//! boundary edges afterwards from per-subdomain edge incidence: an edge that
//! belongs to exactly one triangle of a subdomain is on that subdomain's
//! boundary, and is classified geometrically as interface or outer.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

use super::{BoundaryEdge, BoundaryMarker, Mesh};

/// Whether the two interface traces use the same node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conformity {
    Conformal,
    /// Side 1 carries one more node per interface side than side 0.
    Nonconformal,
}

/// Outer boundary markers for the strip geometry.
#[derive(Debug, Clone, Copy)]
pub struct StripBc {
    /// Right end of the habitat, `x = L`.
    pub ell0: BoundaryMarker,
    /// Truncation boundary of the tail, `x = −L′`.
    pub ell1: BoundaryMarker,
    /// Top and bottom edges.
    pub horizontal: BoundaryMarker,
}

/// Accumulates vertices with coordinate-keyed deduplication.
struct MeshBuilder {
    vertices: Vec<Point>,
    lookup: HashMap<(i64, i64), usize>,
    tol: f64,
    triangles: Vec<[usize; 3]>,
    subdomain: Vec<u8>,
}

impl MeshBuilder {
    fn new(diameter: f64) -> Self {
        MeshBuilder {
            vertices: Vec::new(),
            lookup: HashMap::new(),
            tol: 1e-12 * diameter,
            triangles: Vec::new(),
            subdomain: Vec::new(),
        }
    }

    fn vertex(&mut self, p: Point) -> usize {
        let key = ((p.x / self.tol).round() as i64, (p.y / self.tol).round() as i64);
        if let Some(&id) = self.lookup.get(&key) {
            return id;
        }
        let id = self.vertices.len();
        self.vertices.push(p);
        self.lookup.insert(key, id);
        id
    }

    fn triangle(&mut self, a: usize, b: usize, c: usize, subdomain: u8) {
        self.triangles.push([a, b, c]);
        self.subdomain.push(subdomain);
    }

    /// Structured grid over `xs × ys` (both ascending), each quad split along
    /// the diagonal from the lower-left to the upper-right corner.
    fn grid_block(&mut self, xs: &[f64], ys: &[f64], subdomain: u8) {
        let ids: Vec<Vec<usize>> = ys
            .iter()
            .map(|&y| xs.iter().map(|&x| self.vertex(Point::new(x, y))).collect())
            .collect();
        for j in 0..ys.len() - 1 {
            for i in 0..xs.len() - 1 {
                let a = ids[j][i];
                let b = ids[j][i + 1];
                let c = ids[j + 1][i + 1];
                let d = ids[j + 1][i];
                self.triangle(a, b, c, subdomain);
                self.triangle(a, c, d, subdomain);
            }
        }
    }

    /// Band between two closed concentric rings with equal node counts.
    fn ring_band_equal(&mut self, inner: &[usize], outer: &[usize], subdomain: u8) {
        let n = inner.len();
        assert_eq!(n, outer.len());
        for i in 0..n {
            let j = (i + 1) % n;
            self.triangle(inner[i], outer[i], outer[j], subdomain);
            self.triangle(inner[i], outer[j], inner[j], subdomain);
        }
    }

    /// Band where the outer ring has twice the nodes of the inner one; outer
    /// node `2i` sits at the same angle as inner node `i`.
    fn ring_band_refine_out(&mut self, inner: &[usize], outer: &[usize], subdomain: u8) {
        let n = inner.len();
        assert_eq!(outer.len(), 2 * n);
        for i in 0..n {
            let j = (i + 1) % n;
            let (o0, o1, o2) = (outer[2 * i], outer[2 * i + 1], outer[(2 * i + 2) % (2 * n)]);
            self.triangle(inner[i], o0, o1, subdomain);
            self.triangle(inner[i], o1, inner[j], subdomain);
            self.triangle(inner[j], o1, o2, subdomain);
        }
    }

    /// Band where the inner ring has twice the nodes of the outer one.
    fn ring_band_coarsen_out(&mut self, inner: &[usize], outer: &[usize], subdomain: u8) {
        let n = outer.len();
        assert_eq!(inner.len(), 2 * n);
        for i in 0..n {
            let j = (i + 1) % n;
            let (f0, f1, f2) = (inner[2 * i], inner[2 * i + 1], inner[(2 * i + 2) % (2 * n)]);
            self.triangle(f0, outer[i], f1, subdomain);
            self.triangle(f1, outer[i], outer[j], subdomain);
            self.triangle(f1, outer[j], f2, subdomain);
        }
    }

    fn fan(&mut self, center: usize, ring: &[usize], subdomain: u8) {
        let n = ring.len();
        for i in 0..n {
            self.triangle(center, ring[i], ring[(i + 1) % n], subdomain);
        }
    }

    /// Finishes the mesh, classifying every per-subdomain boundary edge with
    /// `classify(subdomain, midpoint) -> marker`.
    fn finish(self, classify: impl Fn(u8, Point) -> BoundaryMarker) -> Mesh {
        let mut incidence: HashMap<(u8, usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            let s = self.subdomain[t];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (s, a.min(b), a.max(b));
                *incidence.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary_edges: Vec<BoundaryEdge> = incidence
            .iter()
            .filter(|(_, &count)| count == 1)
            .map(|(&(s, a, b), _)| {
                let mid = self.vertices[a].lerp(self.vertices[b], 0.5);
                BoundaryEdge {
                    vertices: [a, b],
                    marker: classify(s, mid),
                }
            })
            .collect();
        boundary_edges.sort_by_key(|be| (be.vertices, be.marker.as_str()));
        let mut mesh = Mesh {
            vertices: self.vertices,
            triangles: self.triangles,
            subdomain_of_triangle: self.subdomain,
            boundary_edges,
            h: 0.0,
        };
        mesh.h = mesh.compute_h();
        mesh
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let mut out: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    out[0] = a;
    out[n - 1] = b;
    out
}

/// `n_cells` widths summing to `total`, geometric with the given ratio so the
/// smallest width comes first.
fn graded_widths(total: f64, n_cells: usize, ratio: f64) -> Vec<f64> {
    assert!(n_cells >= 1 && ratio >= 1.0);
    if ratio == 1.0 {
        return vec![total / n_cells as f64; n_cells];
    }
    let w0 = total * (ratio - 1.0) / (ratio.powi(n_cells as i32) - 1.0);
    (0..n_cells).map(|k| w0 * ratio.powi(k as i32)).collect()
}

/// Points from `origin` to `target` (inclusive) with the smallest cell at
/// `origin` and geometrically growing widths; works in either direction.
fn graded_points(origin: f64, target: f64, n_cells: usize, ratio: f64) -> Vec<f64> {
    let span = target - origin;
    let widths = graded_widths(span.abs(), n_cells, ratio);
    let mut out = vec![origin];
    let mut acc = origin;
    for w in &widths {
        acc += w.copysign(span);
        out.push(acc);
    }
    *out.last_mut().unwrap() = target;
    out
}

fn ascending(mut v: Vec<f64>) -> Vec<f64> {
    if v.first() > v.last() {
        v.reverse();
    }
    v
}

/// Rectangular habitat inside a rectangular frame.
///
/// `Ω₀` is a structured `n_inner_side × n_inner_side` grid on `inner`. `Ω₁`
/// is an 8-block frame (4 edge blocks + 4 corner blocks) between `inner` and
/// `outer`, with `n_outer_side − 1` layers per side whose widths grow
/// geometrically away from the interface. The outer boundary is marked
/// Dirichlet.
pub fn gen_rect_bidomain(
    outer: Rect,
    inner: Rect,
    n_inner_side: usize,
    n_outer_side: usize,
    grading: f64,
    conformity: Conformity,
) -> Result<Mesh> {
    if !outer.contains_strictly(&inner) {
        return Err(Error::Geometry(format!(
            "inner rectangle {inner:?} must lie strictly inside outer {outer:?}"
        )));
    }
    if n_inner_side < 2 || n_outer_side < 2 {
        return Err(Error::Config(
            "node counts per side must be at least 2".into(),
        ));
    }
    if grading < 1.0 {
        return Err(Error::Config(format!("grading {grading} must be ≥ 1")));
    }

    let diameter = (outer.width()).hypot(outer.height());
    let mut b = MeshBuilder::new(diameter);

    // Habitat grid.
    let gx = linspace(inner.x0, inner.x1, n_inner_side);
    let gy = linspace(inner.y0, inner.y1, n_inner_side);
    b.grid_block(&gx, &gy, 0);

    // Frame. Tangential node counts on the interface sides:
    let n1 = match conformity {
        Conformity::Conformal => n_inner_side,
        Conformity::Nonconformal => n_inner_side + 1,
    };
    let layers = n_outer_side - 1;
    let fx = linspace(inner.x0, inner.x1, n1);
    let fy = linspace(inner.y0, inner.y1, n1);
    // Radial layer positions per side, smallest layer at the interface.
    let left = ascending(graded_points(inner.x0, outer.x0, layers, grading));
    let right = graded_points(inner.x1, outer.x1, layers, grading);
    let below = ascending(graded_points(inner.y0, outer.y0, layers, grading));
    let above = graded_points(inner.y1, outer.y1, layers, grading);

    // Edge blocks.
    b.grid_block(&fx, &below, 1); // bottom
    b.grid_block(&fx, &above, 1); // top
    b.grid_block(&left, &fy, 1); // left
    b.grid_block(&right, &fy, 1); // right
    // Corner blocks.
    b.grid_block(&left, &below, 1);
    b.grid_block(&right, &below, 1);
    b.grid_block(&left, &above, 1);
    b.grid_block(&right, &above, 1);

    let tol = 1e-12 * diameter;
    let on_inner = move |p: Point| {
        let on_v = (p.x - inner.x0).abs() < tol || (p.x - inner.x1).abs() < tol;
        let on_h = (p.y - inner.y0).abs() < tol || (p.y - inner.y1).abs() < tol;
        (on_v && p.y > inner.y0 - tol && p.y < inner.y1 + tol)
            || (on_h && p.x > inner.x0 - tol && p.x < inner.x1 + tol)
    };
    let mesh = b.finish(move |s, mid| {
        if on_inner(mid) {
            if s == 0 {
                BoundaryMarker::InterfaceSide0
            } else {
                BoundaryMarker::InterfaceSide1
            }
        } else {
            BoundaryMarker::OuterDirichlet
        }
    });
    mesh.validate()?;
    Ok(mesh)
}

fn ring_points(r: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

/// Circular habitat of radius `r_inner` inside a truncated exterior of radius
/// `r_outer`, both centred at the origin. `Γ` is the inscribed regular
/// `n_gamma`-gon. `Ω₀` is meshed by concentric rings (tangentially halving
/// towards the centre) closed with a central fan; `Ω₁` by rings with
/// geometrically graded radial widths, halving tangentially down to `n_outer`
/// nodes on the outer circle. The outer circle is marked Dirichlet.
pub fn gen_disk_bidomain(
    r_inner: f64,
    r_outer: f64,
    n_gamma: usize,
    n_outer: usize,
    grading: f64,
) -> Result<Mesh> {
    if !(0.0 < r_inner && r_inner < r_outer) {
        return Err(Error::Geometry(format!(
            "radii must satisfy 0 < r_inner < r_outer (got {r_inner}, {r_outer})"
        )));
    }
    if n_gamma < 8 {
        return Err(Error::Config(format!("n_gamma {n_gamma} must be ≥ 8")));
    }
    if grading < 1.0 {
        return Err(Error::Config(format!("grading {grading} must be ≥ 1")));
    }
    // The annulus coarsens by tangential halvings, so the outer count must be
    // the interface count divided by a power of two.
    let mut halvings = 0usize;
    {
        let mut n = n_gamma;
        while n > n_outer && n % 2 == 0 {
            n /= 2;
            halvings += 1;
        }
        if n != n_outer {
            return Err(Error::Config(format!(
                "n_outer {n_outer} must be n_gamma {n_gamma} divided by a power of two"
            )));
        }
    }

    let chord = 2.0 * PI * r_inner / n_gamma as f64;
    let mut b = MeshBuilder::new(2.0 * r_outer);

    // Habitat rings, built from Γ inwards: radial step equal to the local
    // chord, tangential halving once the chord falls below the Γ chord.
    let mut rings_in: Vec<(f64, usize)> = vec![(r_inner, n_gamma)];
    loop {
        let &(r, n) = rings_in.last().unwrap();
        let step = 2.0 * PI * r / n as f64;
        let r_next = r - step;
        if r_next <= 0.75 * step {
            break;
        }
        let mut n_next = n;
        if n_next % 2 == 0 && n_next / 2 >= 8 && 2.0 * PI * r_next / (n_next as f64) < chord {
            n_next /= 2;
        }
        rings_in.push((r_next, n_next));
    }
    rings_in.reverse(); // innermost first
    let ring_ids: Vec<Vec<usize>> = rings_in
        .iter()
        .map(|&(r, n)| ring_points(r, n).into_iter().map(|p| b.vertex(p)).collect())
        .collect();
    let center = b.vertex(Point::new(0.0, 0.0));
    b.fan(center, &ring_ids[0], 0);
    for w in ring_ids.windows(2) {
        let (inner, outer) = (&w[0], &w[1]);
        if inner.len() == outer.len() {
            b.ring_band_equal(inner, outer, 0);
        } else {
            b.ring_band_refine_out(inner, outer, 0);
        }
    }

    // Exterior annulus: radial widths geometric from the Γ chord outwards.
    let span = r_outer - r_inner;
    let n_layers = if grading > 1.0 {
        ((1.0 + span * (grading - 1.0) / chord).ln() / grading.ln()).ceil() as usize
    } else {
        (span / chord).ceil() as usize
    }
    .max(halvings + 1);
    let radii = graded_points(r_inner, r_outer, n_layers, grading);
    let widths = graded_widths(span, n_layers, grading);

    let mut counts = vec![n_gamma];
    let mut used = 0usize;
    for j in 1..=n_layers {
        let n_prev = *counts.last().unwrap();
        let remaining_rings = n_layers - j;
        let want = used < halvings
            && (2.0 * PI * radii[j] / (n_prev / 2) as f64 <= 2.0 * widths[j - 1]
                || remaining_rings < halvings - used);
        if want {
            counts.push(n_prev / 2);
            used += 1;
        } else {
            counts.push(n_prev);
        }
    }
    let annulus_ids: Vec<Vec<usize>> = radii
        .iter()
        .zip(&counts)
        .map(|(&r, &n)| ring_points(r, n).into_iter().map(|p| b.vertex(p)).collect())
        .collect();
    for w in annulus_ids.windows(2) {
        let (inner, outer) = (&w[0], &w[1]);
        if inner.len() == outer.len() {
            b.ring_band_equal(inner, outer, 1);
        } else {
            b.ring_band_coarsen_out(inner, outer, 1);
        }
    }

    // Interface test: midpoints of Γ-polygon edges sit at apothem distance.
    let apothem = r_inner * (PI / n_gamma as f64).cos();
    let tol = 1e-9 * r_inner;
    let mesh = b.finish(move |s, mid| {
        if (mid.norm() - apothem).abs() < tol {
            if s == 0 {
                BoundaryMarker::InterfaceSide0
            } else {
                BoundaryMarker::InterfaceSide1
            }
        } else {
            BoundaryMarker::OuterDirichlet
        }
    });
    mesh.validate()?;
    Ok(mesh)
}

/// Strip geometry: habitat `Ω₀ = (0, L) × (y0, y1)` with the interface on
/// `x = 0` and a truncated tail `Ω₁ = (−L′, 0) × (y0, y1)`. The habitat grid
/// is uniform; the tail grid is geometric in `x` with the smallest cell at
/// the interface. `ny` is the node count across `y` on side 0; the
/// nonconformal variant puts `ny + 1` nodes on side 1.
#[allow(clippy::too_many_arguments)]
pub fn gen_strip_bidomain(
    l_habitat: f64,
    l_tail: f64,
    y0: f64,
    y1: f64,
    nx0: usize,
    nx1: usize,
    ny: usize,
    grading: f64,
    conformity: Conformity,
    bc: StripBc,
) -> Result<Mesh> {
    if l_habitat <= 0.0 || l_tail <= 0.0 || y1 <= y0 {
        return Err(Error::Geometry(
            "strip dimensions must be positive".into(),
        ));
    }
    if nx0 < 2 || nx1 < 2 || ny < 2 {
        return Err(Error::Config(
            "node counts per direction must be at least 2".into(),
        ));
    }
    if grading < 1.0 {
        return Err(Error::Config(format!("grading {grading} must be ≥ 1")));
    }

    let diameter = (l_habitat + l_tail).hypot(y1 - y0);
    let mut b = MeshBuilder::new(diameter);

    let hab_x = linspace(0.0, l_habitat, nx0);
    let hab_y = linspace(y0, y1, ny);
    b.grid_block(&hab_x, &hab_y, 0);

    let ny1 = match conformity {
        Conformity::Conformal => ny,
        Conformity::Nonconformal => ny + 1,
    };
    let tail_x = ascending(graded_points(0.0, -l_tail, nx1 - 1, grading));
    let tail_y = linspace(y0, y1, ny1);
    b.grid_block(&tail_x, &tail_y, 1);

    let tol = 1e-12 * diameter;
    let mesh = b.finish(move |s, mid| {
        if mid.x.abs() < tol {
            if s == 0 {
                BoundaryMarker::InterfaceSide0
            } else {
                BoundaryMarker::InterfaceSide1
            }
        } else if (mid.x - l_habitat).abs() < tol {
            bc.ell0
        } else if (mid.x + l_tail).abs() < tol {
            bc.ell1
        } else {
            bc.horizontal
        }
    });
    mesh.validate()?;
    Ok(mesh)
}

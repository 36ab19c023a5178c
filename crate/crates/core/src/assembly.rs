//! Quadrature rules and matrix/vector assembly.
//!
//! The bilinear form follows the advection-on-the-test-function convention:
//! `a(w, v) = Σᵢ ∫_{Ωᵢ} D∇w·∇v + (u·∇v)w + (1/τ + div u)·w v`, with the
//! interface coupling `b_κ(w, μ) = ∫_Γ μ(w₀ − κw₁) ds` assembled on the
//! merged breakpoint partition of the two traces so every integrand
//! restriction is a polynomial. A Robin boundary `d₀∂_n w + (c·n)w = b·w`
//! contributes `−b∫ w v ds`. Accumulation order is deterministic (ascending
//! element index, stable triplet compression), so assemblies are bitwise
//! reproducible.

use crate::error::{Error, Result};
use crate::fespace::{DofMap, FieldVector, MultiplierSpace};
use crate::geometry::{p1_gradients, Point};
use crate::mesh::{BoundaryMarker, InterfaceTrace, Mesh};
use crate::model::{reaction, ModelParams};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from triplets; duplicates are summed in their given order, so
    /// the result is bitwise reproducible for a fixed triplet order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (r, c, v) in triplets {
            debug_assert!(r < n_rows && c < n_cols);
            if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c && row_ptr[r + 1] > 0 {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr[r + 1] = col_idx.len();
        }
        // Rows without entries inherit the previous offset.
        for r in 1..=n_rows {
            if row_ptr[r] < row_ptr[r - 1] {
                row_ptr[r] = row_ptr[r - 1];
            }
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut out = vec![0.0; self.n_cols];
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                out[c] += v * x[r];
            }
        }
        out
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_rows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }
}

/// Quadrature rule in reference coordinates.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Barycentric triples (triangle) or `[s, 0, 0]` abscissae (segment).
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference measure (1/2 for the triangle,
    /// 1 for the unit segment).
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// 7-point rule on the reference triangle, exact for polynomials of
/// degree 5.
pub fn triangle_rule() -> QuadratureRule {
    let s15 = 15.0f64.sqrt();
    let (a1, w1) = ((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    let (a2, w2) = ((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    let mut points = vec![[1.0 / 3.0; 3]];
    let mut weights = vec![9.0 / 40.0 / 2.0];
    for (a, w) in [(a1, w1), (a2, w2)] {
        let b = 1.0 - 2.0 * a;
        for bary in [[a, a, b], [a, b, a], [b, a, a]] {
            points.push(bary);
            weights.push(w / 2.0);
        }
    }
    QuadratureRule {
        points,
        weights,
        degree: 5,
    }
}

/// 3-point Gauss rule on `[0, 1]`, exact for polynomials of degree 5.
pub fn segment_rule() -> QuadratureRule {
    let g = (3.0f64 / 5.0).sqrt();
    QuadratureRule {
        points: vec![
            [(1.0 - g) / 2.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [(1.0 + g) / 2.0, 0.0, 0.0],
        ],
        weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        degree: 5,
    }
}

/// Advection velocity field on the reference frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdvectionField {
    Constant([f64; 2]),
    /// `v(ξ, η) = (c1, −η·rate)`: the shrinking-container map.
    ShrinkY { c1: f64, rate: f64 },
}

impl AdvectionField {
    pub fn velocity(&self, p: Point) -> [f64; 2] {
        match *self {
            AdvectionField::Constant(v) => v,
            AdvectionField::ShrinkY { c1, rate } => [c1, -p.y * rate],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, AdvectionField::Constant(_))
    }
}

/// Spatially resolved PDE coefficients at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientField {
    /// Symmetric diffusion tensor `(d_xx, d_xy, d_yy)` per subdomain.
    pub diffusion: [[f64; 3]; 2],
    pub advection: AdvectionField,
    /// Added to `1/τ` in the mass term (`div` of the advection field).
    pub mass_extra: f64,
}

impl CoefficientField {
    pub fn spd_check(&self) -> Result<()> {
        for d in &self.diffusion {
            let (dxx, dxy, dyy) = (d[0], d[1], d[2]);
            if !(dxx > 0.0 && dxx * dyy - dxy * dxy > 0.0) {
                return Err(Error::Config(format!(
                    "diffusion tensor {d:?} is not positive definite"
                )));
            }
        }
        Ok(())
    }
}

fn area_checked(p: &[Point; 3]) -> Result<f64> {
    let area = 0.5 * crate::geometry::signed_area_x2(p[0], p[1], p[2]);
    if area <= 0.0 {
        return Err(Error::Geometry(format!(
            "degenerate or misoriented triangle {p:?}"
        )));
    }
    Ok(area)
}

/// Element stiffness `∫ ∇φ_i · D ∇φ_j` for a constant symmetric tensor
/// `D = (d_xx, d_xy, d_yy)`.
pub fn local_diffusion(p: &[Point; 3], d: [f64; 3]) -> Result<[[f64; 3]; 3]> {
    let area = area_checked(p)?;
    let g = p1_gradients(p[0], p[1], p[2]);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let dg = [
                d[0] * g[j][0] + d[1] * g[j][1],
                d[1] * g[j][0] + d[2] * g[j][1],
            ];
            out[i][j] = area * (g[i][0] * dg[0] + g[i][1] * dg[1]);
        }
    }
    Ok(out)
}

/// Element mass `factor · ∫ φ_i φ_j = factor·area/12 · (1 + δ_ij)`.
pub fn local_mass(p: &[Point; 3], factor: f64) -> Result<[[f64; 3]; 3]> {
    let area = area_checked(p)?;
    let mut out = [[factor * area / 12.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] *= 2.0;
    }
    Ok(out)
}

/// Element advection `∫ (u·∇φ_i) φ_j` with the velocity on the TEST
/// function. Constant velocities use the closed form; varying ones the
/// degree-5 rule (exact for the affine fields used here).
pub fn local_advection(
    p: &[Point; 3],
    field: &AdvectionField,
    rule: &QuadratureRule,
) -> Result<[[f64; 3]; 3]> {
    let area = area_checked(p)?;
    let g = p1_gradients(p[0], p[1], p[2]);
    let mut out = [[0.0; 3]; 3];
    if let AdvectionField::Constant(c) = field {
        for i in 0..3 {
            let ci = c[0] * g[i][0] + c[1] * g[i][1];
            for j in 0..3 {
                out[i][j] = area / 3.0 * ci;
            }
        }
        return Ok(out);
    }
    for (bary, &w) in rule.points.iter().zip(&rule.weights) {
        let q = Point::new(
            bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
            bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y,
        );
        let u = field.velocity(q);
        for i in 0..3 {
            let ui = u[0] * g[i][0] + u[1] * g[i][1];
            for j in 0..3 {
                out[i][j] += 2.0 * area * w * ui * bary[j];
            }
        }
    }
    Ok(out)
}

/// Global dof of a vertex: subdomain-0 dofs first, then subdomain-1 dofs.
pub fn global_dof(space0: &DofMap, space1: &DofMap, subdomain: u8, vertex: usize) -> Option<usize> {
    if subdomain == 0 {
        space0.dof(vertex)
    } else {
        space1.dof(vertex).map(|d| space0.n_dofs + d)
    }
}

fn is_dirichlet(space0: &DofMap, space1: &DofMap, global: usize) -> bool {
    if global < space0.n_dofs {
        space0.dirichlet_dofs.contains(&global)
    } else {
        space1.dirichlet_dofs.contains(&(global - space0.n_dofs))
    }
}

/// Assembles the full bilinear form over both subdomains, with symmetric
/// Dirichlet elimination (zeroed rows and columns, unit diagonal).
/// `kappa_weight` multiplies all Ω₁ element contributions (1 for the plain
/// form, κ for the weighted variant). `robin_b` must be given when the mesh
/// carries Robin edges.
pub fn assemble_a(
    mesh: &Mesh,
    space0: &DofMap,
    space1: &DofMap,
    coeffs: &CoefficientField,
    tau: f64,
    kappa_weight: f64,
    robin_b: Option<f64>,
) -> Result<SparseMatrix> {
    coeffs.spd_check()?;
    if tau <= 0.0 {
        return Err(Error::Config(format!("time step {tau} must be positive")));
    }
    let n = space0.n_dofs + space1.n_dofs;
    let rule = triangle_rule();
    let mass_factor = 1.0 / tau + coeffs.mass_extra;
    let mut triplets = Vec::new();

    for t in 0..mesh.n_triangles() {
        let s = mesh.subdomain_of_triangle[t];
        let p = mesh.triangle_points(t);
        let weight = if s == 1 { kappa_weight } else { 1.0 };
        let k_diff = local_diffusion(&p, coeffs.diffusion[s as usize])?;
        let k_mass = local_mass(&p, mass_factor)?;
        let k_adv = local_advection(&p, &coeffs.advection, &rule)?;
        let tri = mesh.triangles[t];
        let dofs: Vec<usize> = tri
            .iter()
            .map(|&v| {
                global_dof(space0, space1, s, v).ok_or_else(|| {
                    Error::Config(format!("vertex {v} missing from the subdomain-{s} space"))
                })
            })
            .collect::<Result<_>>()?;
        for i in 0..3 {
            for j in 0..3 {
                let val = weight * (k_diff[i][j] + k_mass[i][j] + k_adv[i][j]);
                triplets.push((dofs[i], dofs[j], val));
            }
        }
    }

    // Robin boundary term −b ∫ w v ds on OUTER_ROBIN edges (owned by Ω₀ in
    // the strip geometry; the weight rule still applies if Ω₁ ever carries
    // one).
    let robin_edges: Vec<_> = mesh
        .boundary_edges
        .iter()
        .filter(|be| be.marker == BoundaryMarker::OuterRobin)
        .collect();
    if !robin_edges.is_empty() {
        let b = robin_b.ok_or_else(|| {
            Error::Config("mesh has Robin edges but no robin_b coefficient was given".into())
        })?;
        for be in robin_edges {
            let [va, vb] = be.vertices;
            let len = mesh.vertices[va].dist(mesh.vertices[vb]);
            // The edge belongs to whichever space holds both endpoints.
            let (dofs, weight) = if let (Some(a), Some(bdof)) = (space0.dof(va), space0.dof(vb)) {
                ([a, bdof], 1.0)
            } else if let (Some(a), Some(bdof)) = (space1.dof(va), space1.dof(vb)) {
                ([space0.n_dofs + a, space0.n_dofs + bdof], kappa_weight)
            } else {
                return Err(Error::Config(format!(
                    "Robin edge {:?} does not belong to a single subdomain",
                    be.vertices
                )));
            };
            let local = [[2.0, 1.0], [1.0, 2.0]];
            for i in 0..2 {
                for j in 0..2 {
                    triplets.push((dofs[i], dofs[j], -weight * b * len / 6.0 * local[i][j]));
                }
            }
        }
    }

    // Symmetric Dirichlet elimination.
    triplets.retain(|&(r, c, _)| {
        !is_dirichlet(space0, space1, r) && !is_dirichlet(space0, space1, c)
    });
    for d in 0..n {
        if is_dirichlet(space0, space1, d) {
            triplets.push((d, d, 1.0));
        }
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

/// Mass matrix over both subdomains (no Dirichlet elimination); used for
/// `L²` norms of P1 fields.
pub fn assemble_mass(mesh: &Mesh, space0: &DofMap, space1: &DofMap) -> Result<SparseMatrix> {
    let n = space0.n_dofs + space1.n_dofs;
    let mut triplets = Vec::new();
    for t in 0..mesh.n_triangles() {
        let s = mesh.subdomain_of_triangle[t];
        let p = mesh.triangle_points(t);
        let k = local_mass(&p, 1.0)?;
        let tri = mesh.triangles[t];
        for i in 0..3 {
            for j in 0..3 {
                let (gi, gj) = (
                    global_dof(space0, space1, s, tri[i]).unwrap(),
                    global_dof(space0, space1, s, tri[j]).unwrap(),
                );
                triplets.push((gi, gj, k[i][j]));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

/// Load vector `∫ (G(wⁿ) + wⁿ/τ) φ_i`, with the reaction evaluated
/// pointwise at quadrature nodes from the P1 representation of `w_prev`.
/// Dirichlet entries are zeroed.
pub fn assemble_load(
    mesh: &Mesh,
    space0: &DofMap,
    space1: &DofMap,
    w_prev: &FieldVector,
    params: &ModelParams,
    tau: f64,
    kappa_weight: f64,
) -> Result<Vec<f64>> {
    let n = space0.n_dofs + space1.n_dofs;
    assert_eq!(w_prev.len(), n);
    let rule = triangle_rule();
    let mut out = vec![0.0; n];
    for t in 0..mesh.n_triangles() {
        let s = mesh.subdomain_of_triangle[t];
        let p = mesh.triangle_points(t);
        let area = area_checked(&p)?;
        let weight = if s == 1 { kappa_weight } else { 1.0 };
        let tri = mesh.triangles[t];
        let dofs: Vec<usize> = tri
            .iter()
            .map(|&v| global_dof(space0, space1, s, v).unwrap())
            .collect();
        let w_nodes = [
            w_prev.values[dofs[0]],
            w_prev.values[dofs[1]],
            w_prev.values[dofs[2]],
        ];
        for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
            let w_here = bary[0] * w_nodes[0] + bary[1] * w_nodes[1] + bary[2] * w_nodes[2];
            let g = reaction(w_here, s, params) + w_here / tau;
            for i in 0..3 {
                out[dofs[i]] += weight * 2.0 * area * wq * g * bary[i];
            }
        }
    }
    for (d, v) in out.iter_mut().enumerate() {
        if is_dirichlet(space0, space1, d) {
            *v = 0.0;
        }
    }
    Ok(out)
}

/// Load vector `∫ g φ_i` for a pointwise-evaluable source `g(x, subdomain)`
/// (manufactured forcing); degree-5 quadrature, Dirichlet entries zeroed.
pub fn assemble_load_fn(
    mesh: &Mesh,
    space0: &DofMap,
    space1: &DofMap,
    g: impl Fn(Point, u8) -> f64,
    kappa_weight: f64,
) -> Result<Vec<f64>> {
    let n = space0.n_dofs + space1.n_dofs;
    let rule = triangle_rule();
    let mut out = vec![0.0; n];
    for t in 0..mesh.n_triangles() {
        let s = mesh.subdomain_of_triangle[t];
        let p = mesh.triangle_points(t);
        let area = area_checked(&p)?;
        let weight = if s == 1 { kappa_weight } else { 1.0 };
        let tri = mesh.triangles[t];
        let dofs: Vec<usize> = tri
            .iter()
            .map(|&v| global_dof(space0, space1, s, v).unwrap())
            .collect();
        for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
            let q = Point::new(
                bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
                bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y,
            );
            let gv = g(q, s);
            for i in 0..3 {
                out[dofs[i]] += weight * 2.0 * area * wq * gv * bary[i];
            }
        }
    }
    for (d, v) in out.iter_mut().enumerate() {
        if is_dirichlet(space0, space1, d) {
            *v = 0.0;
        }
    }
    Ok(out)
}

/// One interval of the merged arc-length partition of `Γ`.
#[derive(Debug, Clone, Copy)]
pub struct MergedSegment {
    pub s_start: f64,
    pub s_end: f64,
    /// Index into the side-0 / side-1 segment lists containing this
    /// interval.
    pub in_seg0: usize,
    pub in_seg1: usize,
}

/// Merges the arc-length breakpoints of the two traces; endpoints within
/// `1e−12·|Γ|` are identified.
pub fn merge_breakpoints(trace0: &InterfaceTrace, trace1: &InterfaceTrace) -> Result<Vec<MergedSegment>> {
    let total = trace0.total_length;
    if (trace1.total_length - total).abs() > 1e-10 * total {
        return Err(Error::MeshTopology(format!(
            "traces cover different lengths: {} vs {}",
            total, trace1.total_length
        )));
    }
    let tol = 1e-12 * total;
    let mut breaks: Vec<f64> = Vec::new();
    for trace in [trace0, trace1] {
        for seg in &trace.segments {
            breaks.push(seg.s_start);
        }
        breaks.push(total);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let find = |trace: &InterfaceTrace, s_mid: f64| -> Result<usize> {
        trace
            .segments
            .iter()
            .position(|seg| s_mid >= seg.s_start - tol && s_mid <= seg.s_start + seg.length + tol)
            .ok_or_else(|| {
                Error::MeshTopology(format!(
                    "arc position {s_mid} not covered by the side-{} trace",
                    trace.side
                ))
            })
    };

    let mut merged = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let (sa, sb) = (w[0], w[1]);
        if sb - sa <= tol {
            continue;
        }
        let mid = 0.5 * (sa + sb);
        merged.push(MergedSegment {
            s_start: sa,
            s_end: sb,
            in_seg0: find(trace0, mid)?,
            in_seg1: find(trace1, mid)?,
        });
    }
    Ok(merged)
}

/// Assembles the coupling matrix `B(m, j) = ∫_Γ μ_m (φ_j⁰ − κ φ_j¹) ds`
/// over the merged partition; exact for the P1×P1 integrands. Columns at
/// Dirichlet dofs are zeroed.
pub fn assemble_coupling(
    mult: &MultiplierSpace,
    trace0: &InterfaceTrace,
    trace1: &InterfaceTrace,
    space0: &DofMap,
    space1: &DofMap,
    kappa: f64,
) -> Result<SparseMatrix> {
    let n_cols = space0.n_dofs + space1.n_dofs;
    let merged = merge_breakpoints(trace0, trace1)?;
    let rule = segment_rule();
    let mut triplets = Vec::new();

    for ms in &merged {
        let len = ms.s_end - ms.s_start;
        let seg_m = &mult.trace.segments[ms.in_seg0];
        let seg0 = &trace0.segments[ms.in_seg0];
        let seg1 = &trace1.segments[ms.in_seg1];
        for (point, &wq) in rule.points.iter().zip(&rule.weights) {
            let s = ms.s_start + point[0] * len;
            // Multiplier basis on the side-0 segment containing s.
            let um = (s - seg_m.s_start) / seg_m.length;
            let m_dofs = [
                mult.dof_of_trace_vertex[&seg_m.vertices[0]],
                mult.dof_of_trace_vertex[&seg_m.vertices[1]],
            ];
            let m_vals = [1.0 - um, um];
            // Field contributions from both sides.
            let mut cols: Vec<(usize, f64)> = Vec::with_capacity(4);
            let u0 = (s - seg0.s_start) / seg0.length;
            for (k, &v) in seg0.vertices.iter().enumerate() {
                if let Some(d) = space0.dof(v) {
                    cols.push((d, if k == 0 { 1.0 - u0 } else { u0 }));
                }
            }
            let u1 = (s - seg1.s_start) / seg1.length;
            for (k, &v) in seg1.vertices.iter().enumerate() {
                if let Some(d) = space1.dof(v) {
                    cols.push((
                        space0.n_dofs + d,
                        -kappa * if k == 0 { 1.0 - u1 } else { u1 },
                    ));
                }
            }
            for mi in 0..2 {
                for &(col, phi) in &cols {
                    if is_dirichlet(space0, space1, col) {
                        continue;
                    }
                    triplets.push((m_dofs[mi], col, wq * len * m_vals[mi] * phi));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(mult.n_dofs, n_cols, triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::build_space;
    use crate::geometry::Rect;
    use crate::mesh::{
        extract_interface_traces, gen_rect_bidomain, gen_strip_bidomain, Conformity, StripBc,
        TraceSegment,
    };
    use crate::model::{ale_coefficients, AleMap};
    use std::collections::{HashMap, HashSet};

    fn base_params() -> ModelParams {
        ModelParams {
            d0: 1.0,
            d1: 2.0,
            r: 1.0,
            a: 1.0,
            m: 1.0,
            alpha: 0.5,
            c: [1.0, 0.0],
            robin_b: None,
            d2: None,
            m2: None,
            beta: None,
        }
    }

    fn ref_triangle() -> [Point; 3] {
        [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ]
    }

    /// `∫_T x^a y^b = a!·b!/(a+b+2)!` on the reference triangle.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn triangle_rule_exact_to_degree_five() {
        let rule = triangle_rule();
        assert!((rule.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                // Barycentric (λ₀, λ₁, λ₂) ↦ (x, y) = (λ₁, λ₂).
                let quad: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, &w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum();
                assert!(
                    (quad - monomial_exact(a, b)).abs() < 1e-15,
                    "x^{a} y^{b}: {quad} vs {}",
                    monomial_exact(a, b)
                );
            }
        }
        // The headline anchor: ∫ x²y² = 1/180.
        assert!((monomial_exact(2, 2) - 1.0 / 180.0).abs() < 1e-18);
    }

    #[test]
    fn segment_rule_exact_to_degree_five() {
        let rule = segment_rule();
        for k in 0..=5 {
            let quad: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, &w)| w * p[0].powi(k))
                .sum();
            let exact = 1.0 / f64::from(k + 1);
            assert!((quad - exact).abs() < 1e-15, "s^{k}: {quad} vs {exact}");
        }
    }

    #[test]
    fn local_matrices_on_unit_right_triangle() {
        let p = ref_triangle();
        let k = local_diffusion(&p, [1.0, 0.0, 1.0]).unwrap();
        let k_exact = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        let m = local_mass(&p, 1.0).unwrap();
        let adv = local_advection(
            &p,
            &AdvectionField::Constant([1.0, 0.0]),
            &triangle_rule(),
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - k_exact[i][j]).abs() < 1e-15);
                let m_exact = if i == j { 1.0 / 12.0 } else { 1.0 / 24.0 };
                assert!((m[i][j] - m_exact).abs() < 1e-15);
                // ∫ (c·∇φ_i) φ_j = area/3 · ∂φ_i/∂x; gradients are
                // (−1,−1), (1,0), (0,1).
                let adv_exact = [-1.0, 1.0, 0.0][i] / 6.0;
                assert!((adv[i][j] - adv_exact).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn anisotropic_diffusion_scales_directionally() {
        // On the unit right triangle with D = diag(2, 3) the entry pattern
        // splits into 2·(x-part) + 3·(y-part) of the isotropic matrix.
        let p = ref_triangle();
        let k = local_diffusion(&p, [2.0, 0.0, 3.0]).unwrap();
        // ∫ D∇φ₁·∇φ₁ = 2·(1)²·area = 1; ∫ D∇φ₂·∇φ₂ = 3·area = 1.5.
        assert!((k[1][1] - 1.0).abs() < 1e-15);
        assert!((k[2][2] - 1.5).abs() < 1e-15);
        assert!((k[1][2] - 0.0).abs() < 1e-15);
        assert!((k[0][0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn varying_advection_reduces_to_constant_at_zero_rate() {
        let p = [
            Point::new(0.2, -0.1),
            Point::new(1.3, 0.4),
            Point::new(0.5, 1.1),
        ];
        let rule = triangle_rule();
        let a = local_advection(&p, &AdvectionField::Constant([0.7, 0.0]), &rule).unwrap();
        let b = local_advection(&p, &AdvectionField::ShrinkY { c1: 0.7, rate: 0.0 }, &rule).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let p = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ];
        assert!(local_mass(&p, 1.0).is_err());
        // Clockwise orientation is also rejected.
        let q = [
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
        ];
        assert!(local_diffusion(&q, [1.0, 0.0, 1.0]).is_err());
    }

    fn rect_setup(conformity: Conformity) -> (Mesh, DofMap, DofMap) {
        let mesh = gen_rect_bidomain(
            Rect::new(-2.0, 2.0, -2.0, 2.0),
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            4,
            4,
            1.0,
            conformity,
        )
        .unwrap();
        let s0 = build_space(&mesh, 0);
        let s1 = build_space(&mesh, 1);
        (mesh, s0, s1)
    }

    #[test]
    fn assemble_a_symmetric_without_advection() {
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let coeffs = ale_coefficients(&AleMap::Identity, 0.0, &p).unwrap();
        let a = assemble_a(&mesh, &s0, &s1, &coeffs, 0.5, 1.0, None).unwrap();
        for (r, c, v) in a.triplets() {
            assert!(
                (v - a.get(c, r)).abs() <= 1e-14 * v.abs().max(1.0),
                "A[{r}][{c}] = {v} vs A[{c}][{r}] = {}",
                a.get(c, r)
            );
        }
    }

    #[test]
    fn assemble_a_bitwise_deterministic() {
        let (mesh, s0, s1) = rect_setup(Conformity::Nonconformal);
        let p = base_params();
        let coeffs = ale_coefficients(&AleMap::LinearShift { c1: 1.0, c2: 0.5 }, 3.0, &p).unwrap();
        let a = assemble_a(&mesh, &s0, &s1, &coeffs, 0.25, 1.3, None).unwrap();
        let b = assemble_a(&mesh, &s0, &s1, &coeffs, 0.25, 1.3, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linear_shift_operator_is_time_independent() {
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let c0 = ale_coefficients(&AleMap::LinearShift { c1: 1.0, c2: 0.0 }, 0.0, &p).unwrap();
        let c7 = ale_coefficients(&AleMap::LinearShift { c1: 1.0, c2: 0.0 }, 7.0, &p).unwrap();
        let a0 = assemble_a(&mesh, &s0, &s1, &c0, 0.5, 1.0, None).unwrap();
        let a7 = assemble_a(&mesh, &s0, &s1, &c7, 0.5, 1.0, None).unwrap();
        assert_eq!(a0, a7);
    }

    #[test]
    fn constant_field_consistency() {
        // For w ≡ 1 the stiffness annihilates the field, the advection term
        // ∫(c·∇φ_i) vanishes on interior rows (hat functions have compact
        // support), so (A·1)_i = (1/τ)·(M·1)_i away from boundary dofs.
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let tau = 0.5;
        let coeffs = ale_coefficients(&AleMap::LinearShift { c1: 2.0, c2: -1.0 }, 0.0, &p).unwrap();
        let a = assemble_a(&mesh, &s0, &s1, &coeffs, tau, 1.0, None).unwrap();
        let m = assemble_mass(&mesh, &s0, &s1).unwrap();
        let n = s0.n_dofs + s1.n_dofs;
        let ones = vec![1.0; n];
        let a1 = a.matvec(&ones);
        let m1 = m.matvec(&ones);

        // Rows to skip: Dirichlet, interface (trace rows see only one side),
        // and anything on the outer boundary where hats lose support.
        let mut boundary: HashSet<usize> = HashSet::new();
        for be in &mesh.boundary_edges {
            for &v in &be.vertices {
                if let Some(d) = s0.dof(v) {
                    boundary.insert(d);
                }
                if let Some(d) = s1.dof(v) {
                    boundary.insert(s0.n_dofs + d);
                }
            }
        }
        let mut interior = 0;
        for i in 0..n {
            // Skip boundary rows and rows coupling to an eliminated
            // Dirichlet column (the elimination removes their contribution
            // to A·1).
            if boundary.contains(&i)
                || a.row(i).any(|(c, _)| is_dirichlet(&s0, &s1, c) && c != i)
                || mesh
                    .triangles
                    .iter()
                    .enumerate()
                    .any(|(t, tri)| {
                        let s = mesh.subdomain_of_triangle[t];
                        let dofs: Vec<usize> = tri
                            .iter()
                            .filter_map(|&v| global_dof(&s0, &s1, s, v))
                            .collect();
                        dofs.contains(&i) && dofs.iter().any(|&d| is_dirichlet(&s0, &s1, d))
                    })
            {
                continue;
            }
            interior += 1;
            assert!(
                (a1[i] - m1[i] / tau).abs() < 1e-12,
                "row {i}: {} vs {}",
                a1[i],
                m1[i] / tau
            );
        }
        assert!(interior > 0);
    }

    #[test]
    fn dirichlet_rows_are_identity() {
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let coeffs = ale_coefficients(&AleMap::Identity, 0.0, &p).unwrap();
        let a = assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 1.0, None).unwrap();
        assert!(!s1.dirichlet_dofs.is_empty());
        for &d in &s1.dirichlet_dofs {
            let g = s0.n_dofs + d;
            let row: Vec<(usize, f64)> = a.row(g).filter(|&(_, v)| v != 0.0).collect();
            assert_eq!(row, vec![(g, 1.0)]);
        }
    }

    #[test]
    fn kappa_weight_scales_subdomain_one_only() {
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let coeffs = ale_coefficients(&AleMap::Identity, 0.0, &p).unwrap();
        let a1 = assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 1.0, None).unwrap();
        let a2 = assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 2.0, None).unwrap();
        // A purely side-0 row (an interior habitat dof) is unchanged; a
        // purely side-1 interior row doubles.
        let interior0 = (0..s0.n_dofs)
            .find(|d| {
                !s0.interface_dofs.contains(d) && !s0.dirichlet_dofs.contains(d)
            })
            .unwrap();
        for (c, v) in a1.row(interior0) {
            assert_eq!(a2.get(interior0, c), v);
        }
        let interior1 = (0..s1.n_dofs)
            .find(|d| {
                !s1.interface_dofs.contains(d) && !s1.dirichlet_dofs.contains(d)
            })
            .unwrap();
        for (c, v) in a1.row(s0.n_dofs + interior1) {
            assert!((a2.get(s0.n_dofs + interior1, c) - 2.0 * v).abs() < 1e-15);
        }
    }

    #[test]
    fn robin_term_matches_closed_form() {
        // Strip with a Robin right end: A(b) − A(0) must equal the edge mass
        // −b·len/6·[[2,1],[1,2]] summed over the Robin edges.
        let bc = StripBc {
            ell0: BoundaryMarker::OuterRobin,
            ell1: BoundaryMarker::OuterDirichlet,
            horizontal: BoundaryMarker::OuterNeumann,
        };
        let mesh = gen_strip_bidomain(
            2.0,
            4.0,
            0.0,
            1.0,
            4,
            6,
            3,
            1.2,
            Conformity::Conformal,
            bc,
        )
        .unwrap();
        let s0 = build_space(&mesh, 0);
        let s1 = build_space(&mesh, 1);
        let p = base_params();
        let coeffs = ale_coefficients(&AleMap::Identity, 0.0, &p).unwrap();
        assert!(matches!(
            assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 1.0, None),
            Err(Error::Config(_))
        ));
        let b = -0.3;
        let a_rob = assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 1.0, Some(b)).unwrap();
        let a_zero = assemble_a(&mesh, &s0, &s1, &coeffs, 1.0, 1.0, Some(0.0)).unwrap();
        let mut expected: HashMap<(usize, usize), f64> = HashMap::new();
        for be in &mesh.boundary_edges {
            if be.marker != BoundaryMarker::OuterRobin {
                continue;
            }
            let [va, vb] = be.vertices;
            let len = mesh.vertices[va].dist(mesh.vertices[vb]);
            let d = [s0.dof(va).unwrap(), s0.dof(vb).unwrap()];
            let local = [[2.0, 1.0], [1.0, 2.0]];
            for i in 0..2 {
                for j in 0..2 {
                    *expected.entry((d[i], d[j])).or_insert(0.0) -= b * len / 6.0 * local[i][j];
                }
            }
        }
        assert!(!expected.is_empty());
        for (r, c, v) in a_rob.triplets() {
            let diff = v - a_zero.get(r, c);
            let want = expected.get(&(r, c)).copied().unwrap_or(0.0);
            assert!((diff - want).abs() < 1e-14, "({r}, {c}): {diff} vs {want}");
        }
    }

    #[test]
    fn load_of_constant_state_matches_mass_action() {
        // With wⁿ ≡ const the reaction is constant per subdomain, so the
        // load is M·(w/τ + G(w)) subdomain-wise; choose w = r/a so the
        // habitat reaction vanishes.
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let p = base_params();
        let tau = 0.5;
        let n = s0.n_dofs + s1.n_dofs;
        let w = FieldVector { values: vec![1.0; n] };
        let load = assemble_load(&mesh, &s0, &s1, &w, &p, tau, 1.0).unwrap();
        let m = assemble_mass(&mesh, &s0, &s1).unwrap();
        let g_vals: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i < s0.n_dofs { 0 } else { 1 };
                reaction(1.0, s, &p) + 1.0 / tau
            })
            .collect();
        let expected = m.matvec(&g_vals);
        for i in 0..n {
            let want = if is_dirichlet(&s0, &s1, i) { 0.0 } else { expected[i] };
            assert!((load[i] - want).abs() < 1e-12, "dof {i}: {} vs {want}", load[i]);
        }
    }

    #[test]
    fn load_fn_of_unit_source_is_mass_row_sum() {
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let load = assemble_load_fn(&mesh, &s0, &s1, |_, _| 1.0, 1.0).unwrap();
        let m = assemble_mass(&mesh, &s0, &s1).unwrap();
        let n = s0.n_dofs + s1.n_dofs;
        let row_sums = m.matvec(&vec![1.0; n]);
        for i in 0..n {
            let want = if is_dirichlet(&s0, &s1, i) { 0.0 } else { row_sums[i] };
            assert!((load[i] - want).abs() < 1e-13);
        }
    }

    /// Straight synthetic trace on `[0, total]` with `n` uniform segments.
    fn straight_trace(side: u8, n: usize, total: f64, first_vertex: usize) -> InterfaceTrace {
        let h = total / n as f64;
        let segments = (0..n)
            .map(|k| TraceSegment {
                vertices: [first_vertex + k, first_vertex + k + 1],
                triangle: 0,
                normal: [0.0, -1.0],
                s_start: k as f64 * h,
                length: h,
            })
            .collect();
        InterfaceTrace {
            segments,
            side,
            total_length: total,
            closed: false,
        }
    }

    #[test]
    fn merged_breakpoints_of_eight_and_nine_segments() {
        let t0 = straight_trace(0, 8, 1.0, 0);
        let t1 = straight_trace(1, 9, 1.0, 100);
        let merged = merge_breakpoints(&t0, &t1).unwrap();
        // 7 + 8 distinct interior breakpoints → 16 intervals.
        assert_eq!(merged.len(), 16);
        assert!((merged[0].s_start - 0.0).abs() < 1e-15);
        assert!((merged.last().unwrap().s_end - 1.0).abs() < 1e-15);
        for w in merged.windows(2) {
            assert!((w[0].s_end - w[1].s_start).abs() < 1e-15);
        }
        // Identical traces merge to the original partition.
        let same = merge_breakpoints(&t0, &straight_trace(1, 8, 1.0, 50)).unwrap();
        assert_eq!(same.len(), 8);
        // Length mismatch is rejected.
        assert!(merge_breakpoints(&t0, &straight_trace(1, 8, 1.1, 50)).is_err());
    }

    fn mini_spaces() -> (DofMap, DofMap) {
        // Vertices 0, 1 are the side-0 trace; 2, 3, 4 the side-1 trace.
        let mut d0 = vec![None; 5];
        d0[0] = Some(0);
        d0[1] = Some(1);
        let mut d1 = vec![None; 5];
        d1[2] = Some(0);
        d1[3] = Some(1);
        d1[4] = Some(2);
        let s0 = DofMap {
            subdomain: 0,
            dof_of_vertex: d0,
            vertex_of_dof: vec![0, 1],
            dirichlet_dofs: HashSet::new(),
            interface_dofs: [0, 1].into_iter().collect(),
            n_dofs: 2,
        };
        let s1 = DofMap {
            subdomain: 1,
            dof_of_vertex: d1,
            vertex_of_dof: vec![2, 3, 4],
            dirichlet_dofs: HashSet::new(),
            interface_dofs: [0, 1, 2].into_iter().collect(),
            n_dofs: 3,
        };
        (s0, s1)
    }

    #[test]
    fn coupling_entries_on_two_to_one_trace() {
        // Side 0: one segment over [0,1]; side 1: two segments. Against the
        // multiplier hat 1−s the side-1 hats integrate to 5/24 (end node
        // over [0,½]), 1/4 (middle node) and by symmetry the totals below.
        let (s0, s1) = mini_spaces();
        let t0 = straight_trace(0, 1, 1.0, 0);
        let t1 = straight_trace(1, 2, 1.0, 2);
        let mult = crate::fespace::build_multiplier_space(t0.clone());
        let kappa = 1.7;
        let b = assemble_coupling(&mult, &t0, &t1, &s0, &s1, kappa).unwrap();
        assert_eq!(b.n_rows, 2);
        assert_eq!(b.n_cols, 5);
        // Side-0 block: ∫ hat_m hat_j over one segment.
        assert!((b.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.get(0, 1) - 1.0 / 6.0).abs() < 1e-15);
        // Side-1 block (columns offset by n_dofs0 = 2), weighted by −κ:
        // ∫₀^½ (1−s)(1−2s) ds = 5/24.
        assert!((b.get(0, 2) + kappa * 5.0 / 24.0).abs() < 1e-15);
        assert!((b.get(0, 3) + kappa * 0.25).abs() < 1e-15);
        // Far end node against the near hat: ∫_{½}^{1} (1−s)(2s−1) ds = 1/24.
        assert!((b.get(0, 4) + kappa / 24.0).abs() < 1e-15);
        // Row 1 mirrors row 0.
        assert!((b.get(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.get(1, 2) + kappa / 24.0).abs() < 1e-15);
        // Each row of the side-0 block sums to the hat integral ∫ μ_m = ½;
        // the side-1 block row sum is −κ/2 (partition of unity).
        for mrow in 0..2 {
            let sum0: f64 = (0..2).map(|c| b.get(mrow, c)).sum();
            let sum1: f64 = (2..5).map(|c| b.get(mrow, c)).sum();
            assert!((sum0 - 0.5).abs() < 1e-15);
            assert!((sum1 + kappa * 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coupling_side_one_block_scales_linearly_in_kappa() {
        let (s0, s1) = mini_spaces();
        let t0 = straight_trace(0, 1, 1.0, 0);
        let t1 = straight_trace(1, 2, 1.0, 2);
        let mult = crate::fespace::build_multiplier_space(t0.clone());
        let b1 = assemble_coupling(&mult, &t0, &t1, &s0, &s1, 1.0).unwrap();
        let bk = assemble_coupling(&mult, &t0, &t1, &s0, &s1, 2.5).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(bk.get(r, c), b1.get(r, c));
            }
            for c in 2..5 {
                assert!((bk.get(r, c) - 2.5 * b1.get(r, c)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coupling_annihilates_jump_consistent_fields() {
        // On a mesh whose two traces share nodes, a field with w₀ = κ·w₁ at
        // the interface lies in the discrete constraint kernel.
        let (mesh, s0, s1) = rect_setup(Conformity::Conformal);
        let (t0, t1) = extract_interface_traces(&mesh).unwrap();
        let mult = crate::fespace::build_multiplier_space(t0.clone());
        let kappa = 2.0f64.sqrt();
        let b = assemble_coupling(&mult, &t0, &t1, &s0, &s1, kappa).unwrap();
        let mut w = vec![0.0; s0.n_dofs + s1.n_dofs];
        for (d, &v) in s0.vertex_of_dof.iter().enumerate() {
            let p = mesh.vertices[v];
            w[d] = kappa * (1.0 + p.x + 0.5 * p.y);
        }
        for (d, &v) in s1.vertex_of_dof.iter().enumerate() {
            let p = mesh.vertices[v];
            w[s0.n_dofs + d] = 1.0 + p.x + 0.5 * p.y;
        }
        let bw = b.matvec(&w);
        for (m, v) in bw.iter().enumerate() {
            assert!(v.abs() < 1e-13, "row {m}: {v}");
        }
    }

    #[test]
    fn coupling_matches_fine_quadrature_on_nonconformal_traces() {
        // Independent oracle: evaluate ∫ μ_m (I₀f − κ·I₁f) ds by composite
        // Simpson on a fine uniform arc-length grid, interpolating each
        // trace's nodal values piecewise linearly.
        let (mesh, s0, s1) = rect_setup(Conformity::Nonconformal);
        let (t0, t1) = extract_interface_traces(&mesh).unwrap();
        assert_ne!(t0.segments.len(), t1.segments.len());
        let mult = crate::fespace::build_multiplier_space(t0.clone());
        let kappa = 1.3;
        let b = assemble_coupling(&mult, &t0, &t1, &s0, &s1, kappa).unwrap();

        let f = |p: Point| 1.0 + 0.3 * p.x - 0.7 * p.y + 0.2 * p.x * p.y;
        let mut w = vec![0.0; s0.n_dofs + s1.n_dofs];
        for (d, &v) in s0.vertex_of_dof.iter().enumerate() {
            w[d] = f(mesh.vertices[v]);
        }
        for (d, &v) in s1.vertex_of_dof.iter().enumerate() {
            w[s0.n_dofs + d] = f(mesh.vertices[v]);
        }
        let bw = b.matvec(&w);

        // Piecewise-linear evaluation along a trace at arc position s.
        let eval = |trace: &InterfaceTrace, nodal: &dyn Fn(usize) -> f64, s: f64| -> f64 {
            let seg = trace
                .segments
                .iter()
                .find(|g| s >= g.s_start - 1e-12 && s <= g.s_start + g.length + 1e-12)
                .unwrap();
            let u = ((s - seg.s_start) / seg.length).clamp(0.0, 1.0);
            (1.0 - u) * nodal(seg.vertices[0]) + u * nodal(seg.vertices[1])
        };
        let total = t0.total_length;
        let n_fine = 4000;
        let h = total / n_fine as f64;
        for m in 0..mult.n_dofs {
            let mu = |s: f64| {
                let nodal = |v: usize| {
                    if mult.dof_of_trace_vertex[&v] == m {
                        1.0
                    } else {
                        0.0
                    }
                };
                eval(&t0, &nodal, s)
            };
            let integrand = |s: f64| {
                let w0 = eval(&t0, &|v| w[s0.dof(v).unwrap()], s);
                let w1 = eval(&t1, &|v| w[s0.n_dofs + s1.dof(v).unwrap()], s);
                mu(s) * (w0 - kappa * w1)
            };
            let mut simpson = 0.0;
            for k in 0..n_fine {
                let a = k as f64 * h;
                simpson += h / 6.0
                    * (integrand(a) + 4.0 * integrand(a + 0.5 * h) + integrand(a + h));
            }
            assert!(
                (bw[m] - simpson).abs() < 1e-6,
                "row {m}: {} vs oracle {simpson}",
                bw[m]
            );
        }
    }

    #[test]
    fn sparse_matrix_basics() {
        let m = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 1.0), (0, 0, 2.0), (1, 2, 4.0), (2, 1, -1.0), (0, 2, 0.5)],
        );
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 2), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        let y = m.matvec(&[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![4.5, 12.0, -2.0]);
        let yt = m.matvec_transpose(&[1.0, 1.0, 1.0]);
        assert_eq!(yt, vec![3.0, -1.0, 4.5]);
    }
}

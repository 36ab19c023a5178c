//! Error norms, convergence tables, manufactured solutions, and field
//! export.

use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fespace::{DofMap, FieldVector, PointLocator};
use crate::geometry::{p1_gradients, Point};
use crate::mesh::Mesh;

/// `L²` and `H¹`-seminorm errors of one coarse solution.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    pub l2_error: f64,
    pub h1_semi_error: f64,
}

/// One side of a comparison: a mesh with its two spaces and the stacked
/// density vector (subdomain-0 dofs first).
pub struct FieldSlice<'a> {
    pub mesh: &'a Mesh,
    pub space0: &'a DofMap,
    pub space1: &'a DofMap,
    pub w: &'a FieldVector,
}

impl<'a> FieldSlice<'a> {
    fn local_values(&self, t: usize) -> [f64; 3] {
        let s = self.mesh.subdomain_of_triangle[t];
        let tri = self.mesh.triangles[t];
        let mut out = [0.0; 3];
        for k in 0..3 {
            let d = if s == 0 {
                self.space0.dof(tri[k]).unwrap()
            } else {
                self.space0.n_dofs + self.space1.dof(tri[k]).unwrap()
            };
            out[k] = self.w.values[d];
        }
        out
    }

    fn gradient(&self, t: usize) -> [f64; 2] {
        let p = self.mesh.triangle_points(t);
        let g = p1_gradients(p[0], p[1], p[2]);
        let v = self.local_values(t);
        [
            v[0] * g[0][0] + v[1] * g[1][0] + v[2] * g[2][0],
            v[0] * g[0][1] + v[1] * g[1][1] + v[2] * g[2][1],
        ]
    }
}

/// Integrates `(w_coarse − w_ref)²` and `|∇w_coarse − ∇w_ref|²` over the
/// coarse triangles with the degree-5 rule, evaluating the reference field
/// exactly within its own (side-matched) triangles.
pub fn error_norms(coarse: &FieldSlice, reference: &FieldSlice) -> Result<ErrorReport> {
    let locators = [
        PointLocator::build(reference.mesh, 0),
        PointLocator::build(reference.mesh, 1),
    ];
    let rule = crate::assembly::triangle_rule();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for t in 0..coarse.mesh.n_triangles() {
        let s = coarse.mesh.subdomain_of_triangle[t];
        let p = coarse.mesh.triangle_points(t);
        let area = coarse.mesh.triangle_area(t);
        let v = coarse.local_values(t);
        let gc = coarse.gradient(t);
        for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
            let q = Point::new(
                bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
                bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y,
            );
            let (tr, lr) = locators[s as usize].locate(reference.mesh, q).ok_or_else(|| {
                Error::Config(format!(
                    "coarse quadrature point ({}, {}) not covered by the reference mesh",
                    q.x, q.y
                ))
            })?;
            let vr = reference.local_values(tr);
            let wr = lr[0] * vr[0] + lr[1] * vr[1] + lr[2] * vr[2];
            let gr = reference.gradient(tr);
            let wc = bary[0] * v[0] + bary[1] * v[1] + bary[2] * v[2];
            l2 += 2.0 * area * wq * (wc - wr) * (wc - wr);
            let (dx, dy) = (gc[0] - gr[0], gc[1] - gr[1]);
            h1 += 2.0 * area * wq * (dx * dx + dy * dy);
        }
    }
    Ok(ErrorReport {
        l2_error: l2.max(0.0).sqrt(),
        h1_semi_error: h1.max(0.0).sqrt(),
    })
}

/// Errors against a closed-form solution with known gradient.
pub fn error_norms_exact(
    coarse: &FieldSlice,
    exact: impl Fn(Point, u8) -> f64,
    exact_grad: impl Fn(Point, u8) -> [f64; 2],
) -> Result<ErrorReport> {
    let rule = crate::assembly::triangle_rule();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for t in 0..coarse.mesh.n_triangles() {
        let s = coarse.mesh.subdomain_of_triangle[t];
        let p = coarse.mesh.triangle_points(t);
        let area = coarse.mesh.triangle_area(t);
        let v = coarse.local_values(t);
        let gc = coarse.gradient(t);
        for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
            let q = Point::new(
                bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
                bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y,
            );
            let wc = bary[0] * v[0] + bary[1] * v[1] + bary[2] * v[2];
            let diff = wc - exact(q, s);
            l2 += 2.0 * area * wq * diff * diff;
            let ge = exact_grad(q, s);
            let (dx, dy) = (gc[0] - ge[0], gc[1] - ge[1]);
            h1 += 2.0 * area * wq * (dx * dx + dy * dy);
        }
    }
    Ok(ErrorReport {
        l2_error: l2.max(0.0).sqrt(),
        h1_semi_error: h1.max(0.0).sqrt(),
    })
}

/// Observed orders between successive halvings: `log₂(e_k / e_{k+1})`;
/// `NaN` where an error vanishes.
pub fn order_table(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 && w[1] > 0.0 {
                (w[0] / w[1]).log2()
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// Relative max-norm error `‖u − v‖_∞ / ‖v‖_∞`.
pub fn e_inf(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Config(format!(
            "sample lengths differ: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let denom = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if denom == 0.0 {
        return Err(Error::Config("oracle values are identically zero".into()));
    }
    let num = u
        .iter()
        .zip(v)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(num / denom)
}

/// Manufactured stationary solution on the strip geometry, one-dimensional
/// in `x` with the interface at `x = 0`:
/// tail `w₁ = e^x (1 − (x/L′)²)` (vanishing at `x = −L′`), habitat
/// `w₀ = κ + s·x + q·x²` with `s` fixed by flux continuity and `q` by the
/// homogeneous Dirichlet condition at `x = L`. The forcing comes from
/// substituting into the stationary operator `w/τ − dΔw − (c·∇)w`.
pub struct ManufacturedCase {
    pub kappa: f64,
    pub d0: f64,
    pub d1: f64,
    pub c1: f64,
    pub l_habitat: f64,
    pub l_tail: f64,
    pub tau: f64,
    s: f64,
    q: f64,
}

impl ManufacturedCase {
    pub fn new(kappa: f64, d0: f64, d1: f64, c1: f64, l_habitat: f64, l_tail: f64, tau: f64) -> Self {
        let s = (d1 + c1 * (1.0 - kappa)) / d0;
        let q = -(kappa + s * l_habitat) / (l_habitat * l_habitat);
        ManufacturedCase {
            kappa,
            d0,
            d1,
            c1,
            l_habitat,
            l_tail,
            tau,
            s,
            q,
        }
    }

    /// The preference probability α that gives this κ for the given
    /// diffusivities.
    pub fn alpha(&self) -> f64 {
        let ratio = self.kappa / (self.d1 / self.d0).sqrt();
        ratio / (1.0 + ratio)
    }

    fn tail(&self, x: f64) -> (f64, f64, f64) {
        let a2 = self.l_tail * self.l_tail;
        let p = 1.0 - x * x / a2;
        let dp = -2.0 * x / a2;
        let ddp = -2.0 / a2;
        let e = x.exp();
        (e * p, e * (p + dp), e * (p + 2.0 * dp + ddp))
    }

    fn habitat(&self, x: f64) -> (f64, f64, f64) {
        (
            self.kappa + self.s * x + self.q * x * x,
            self.s + 2.0 * self.q * x,
            2.0 * self.q,
        )
    }

    pub fn exact(&self, p: Point, subdomain: u8) -> f64 {
        if subdomain == 0 {
            self.habitat(p.x).0
        } else {
            self.tail(p.x).0
        }
    }

    pub fn exact_grad(&self, p: Point, subdomain: u8) -> [f64; 2] {
        let d = if subdomain == 0 {
            self.habitat(p.x).1
        } else {
            self.tail(p.x).1
        };
        [d, 0.0]
    }

    /// Source `g = w/τ − d·w″ − c₁·w′` making the exact pair stationary.
    pub fn forcing(&self, p: Point, subdomain: u8) -> f64 {
        let (w, dw, ddw) = if subdomain == 0 {
            self.habitat(p.x)
        } else {
            self.tail(p.x)
        };
        let d = if subdomain == 0 { self.d0 } else { self.d1 };
        w / self.tau - d * ddw - self.c1 * dw
    }

    /// Exact multiplier on `Γ`: `λ = −(d₀∂_ν w₀ + (c·ν)w₀)` with
    /// `ν = (−1, 0)`.
    pub fn exact_lambda(&self) -> f64 {
        self.d0 * self.habitat(0.0).1 + self.c1 * self.habitat(0.0).0
    }

    /// Residuals of the two interface conditions at `x = 0` (both should
    /// vanish by construction).
    pub fn interface_residuals(&self) -> (f64, f64) {
        let (w0, dw0, _) = self.habitat(0.0);
        let (w1, dw1, _) = self.tail(0.0);
        (
            w0 - self.kappa * w1,
            self.d0 * dw0 + self.c1 * w0 - (self.d1 * dw1 + self.c1 * w1),
        )
    }
}

/// Total population `∫_Ω w dx = 1ᵀ M w`.
pub fn total_population(mesh: &Mesh, space0: &DofMap, space1: &DofMap, w: &FieldVector) -> Result<f64> {
    let mass = crate::assembly::assemble_mass(mesh, space0, space1)?;
    Ok(mass.matvec(&w.values).iter().sum())
}

/// Legacy-ASCII VTK export with one point per dof, so interface vertices
/// appear twice and the density jump survives in the file.
pub fn export_vtk(
    mesh: &Mesh,
    space0: &DofMap,
    space1: &DofMap,
    w: &FieldVector,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);
    let n_points = space0.n_dofs + space1.n_dofs;

    writeln!(out, "# vtk DataFile Version 3.0").map_err(io_err)?;
    writeln!(out, "density field").map_err(io_err)?;
    writeln!(out, "ASCII").map_err(io_err)?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID").map_err(io_err)?;
    writeln!(out, "POINTS {n_points} double").map_err(io_err)?;
    for space in [space0, space1] {
        for &v in &space.vertex_of_dof {
            let p = mesh.vertices[v];
            writeln!(out, "{} {} 0", p.x, p.y).map_err(io_err)?;
        }
    }
    let n_tri = mesh.n_triangles();
    writeln!(out, "CELLS {n_tri} {}", 4 * n_tri).map_err(io_err)?;
    for t in 0..n_tri {
        let s = mesh.subdomain_of_triangle[t];
        let tri = mesh.triangles[t];
        let ids: Vec<usize> = tri
            .iter()
            .map(|&v| {
                if s == 0 {
                    space0.dof(v).unwrap()
                } else {
                    space0.n_dofs + space1.dof(v).unwrap()
                }
            })
            .collect();
        writeln!(out, "3 {} {} {}", ids[0], ids[1], ids[2]).map_err(io_err)?;
    }
    writeln!(out, "CELL_TYPES {n_tri}").map_err(io_err)?;
    for _ in 0..n_tri {
        writeln!(out, "5").map_err(io_err)?;
    }
    writeln!(out, "CELL_DATA {n_tri}").map_err(io_err)?;
    writeln!(out, "SCALARS subdomain int 1").map_err(io_err)?;
    writeln!(out, "LOOKUP_TABLE default").map_err(io_err)?;
    for t in 0..n_tri {
        writeln!(out, "{}", mesh.subdomain_of_triangle[t]).map_err(io_err)?;
    }
    writeln!(out, "POINT_DATA {n_points}").map_err(io_err)?;
    writeln!(out, "SCALARS density double 1").map_err(io_err)?;
    writeln!(out, "LOOKUP_TABLE default").map_err(io_err)?;
    for v in &w.values {
        writeln!(out, "{v}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// CSV export with a header line.
pub fn export_csv(samples: &[(f64, f64)], header: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);
    writeln!(out, "{header}").map_err(io_err)?;
    for (x, v) in samples {
        writeln!(out, "{x},{v}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// "error (order)" rows in the layout of a convergence table: the first
/// column is the resolution label, then one `e (p)` cell per norm.
pub fn format_order_table(labels: &[String], errors: &[Vec<f64>], names: &[&str]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:>8}", "n"));
    for name in names {
        out.push_str(&format!("  {name:>22}"));
    }
    out.push('\n');
    let orders: Vec<Vec<f64>> = errors.iter().map(|e| order_table(e)).collect();
    for (k, label) in labels.iter().enumerate() {
        out.push_str(&format!("{label:>8}"));
        for (j, _) in names.iter().enumerate() {
            let cell = if k == 0 {
                format!("{:.4e} (  -  )", errors[j][k])
            } else {
                format!("{:.4e} ({:.2})", errors[j][k], orders[j][k - 1])
            };
            out.push_str(&format!("  {cell:>22}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::build_space;
    use crate::mesh::{gen_rect_bidomain, Conformity};
    use crate::geometry::Rect;

    fn test_mesh(n: usize) -> (Mesh, DofMap, DofMap) {
        let mesh = gen_rect_bidomain(
            Rect::new(-2.0, 2.0, -2.0, 2.0),
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            n,
            n,
            1.0,
            Conformity::Conformal,
        )
        .unwrap();
        let s0 = build_space(&mesh, 0);
        let s1 = build_space(&mesh, 1);
        (mesh, s0, s1)
    }

    /// Nodal values without the Dirichlet zeroing of `interpolate`, so
    /// arbitrary smooth fields can be compared exactly.
    fn stacked(mesh: &Mesh, s0: &DofMap, s1: &DofMap, f: impl Fn(Point) -> f64) -> FieldVector {
        let mut w = Vec::with_capacity(s0.n_dofs + s1.n_dofs);
        for space in [s0, s1] {
            for &v in &space.vertex_of_dof {
                w.push(f(mesh.vertices[v]));
            }
        }
        FieldVector { values: w }
    }

    #[test]
    fn order_table_recovers_exact_rate() {
        let errors: Vec<f64> = (0..5).map(|k| 3.7 * (0.5f64).powi(2 * k)).collect();
        for p in order_table(&errors) {
            assert!((p - 2.0).abs() < 1e-12);
        }
        assert!(order_table(&[1.0, 0.0])[0].is_nan());
    }

    #[test]
    fn e_inf_scale_invariant() {
        let u = [1.0, 2.0, 3.5];
        let v = [1.1, 1.9, 3.6];
        let base = e_inf(&u, &v).unwrap();
        let su: Vec<f64> = u.iter().map(|x| 7.0 * x).collect();
        let sv: Vec<f64> = v.iter().map(|x| 7.0 * x).collect();
        assert!((e_inf(&su, &sv).unwrap() - base).abs() < 1e-15);
        assert!(e_inf(&u, &v[..2]).is_err());
        assert!(e_inf(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn error_norms_zero_for_identical_fields() {
        let (mesh, s0, s1) = test_mesh(6);
        let w = stacked(&mesh, &s0, &s1, |p| p.x * p.x - 0.3 * p.y);
        let slice = FieldSlice {
            mesh: &mesh,
            space0: &s0,
            space1: &s1,
            w: &w,
        };
        let rep = error_norms(&slice, &slice).unwrap();
        assert!(rep.l2_error < 1e-13);
        assert!(rep.h1_semi_error < 1e-13);
    }

    #[test]
    fn error_norms_exact_on_linear_field() {
        // A globally linear field is in the P1 space, so both errors vanish.
        let (mesh, s0, s1) = test_mesh(5);
        let w = stacked(&mesh, &s0, &s1, |p| 2.0 * p.x - 0.5 * p.y + 1.0);
        let slice = FieldSlice {
            mesh: &mesh,
            space0: &s0,
            space1: &s1,
            w: &w,
        };
        let rep = error_norms_exact(
            &slice,
            |p, _| 2.0 * p.x - 0.5 * p.y + 1.0,
            |_, _| [2.0, -0.5],
        )
        .unwrap();
        assert!(rep.l2_error < 1e-12);
        assert!(rep.h1_semi_error < 1e-12);
    }

    #[test]
    fn error_norms_known_l2_value() {
        // Against the zero exact solution the L² "error" is the L² norm of
        // the field itself: ∫∫ over (−2,2)² of 1 dx dy = 16 for w ≡ 1.
        let (mesh, s0, s1) = test_mesh(4);
        let w = stacked(&mesh, &s0, &s1, |_| 1.0);
        let slice = FieldSlice {
            mesh: &mesh,
            space0: &s0,
            space1: &s1,
            w: &w,
        };
        let rep = error_norms_exact(&slice, |_, _| 0.0, |_, _| [0.0, 0.0]).unwrap();
        assert!((rep.l2_error - 4.0).abs() < 1e-12);
        assert!(rep.h1_semi_error < 1e-12);
    }

    #[test]
    fn manufactured_case_satisfies_interface_conditions() {
        let case = ManufacturedCase::new(2.0f64.sqrt(), 1.0, 2.0, 1.0, 2.0, 5.0, 0.5);
        let (jump, flux) = case.interface_residuals();
        assert!(jump.abs() < 1e-14);
        assert!(flux.abs() < 1e-14);
        // Tail side: w₁(0) = 1, w₁′(0) = 1, so λ = d₁ + c₁.
        assert!((case.exact_lambda() - (case.d1 + case.c1)).abs() < 1e-14);
        // Boundary values vanish at both far ends.
        assert!(case.exact(Point::new(case.l_habitat, 0.3), 0).abs() < 1e-14);
        assert!(case.exact(Point::new(-case.l_tail, -0.1), 1).abs() < 1e-14);
        // α ↦ κ round trip.
        let a = case.alpha();
        let k = a / (1.0 - a) * (case.d1 / case.d0).sqrt();
        assert!((k - case.kappa).abs() < 1e-12);
    }

    #[test]
    fn manufactured_forcing_matches_finite_differences() {
        let case = ManufacturedCase::new(1.5, 1.0, 2.0, 0.7, 2.0, 5.0, 0.25);
        let h = 1e-5;
        for &(x, s) in &[(0.8, 0u8), (1.7, 0), (-0.4, 1), (-3.2, 1)] {
            let w = |x: f64| case.exact(Point::new(x, 0.0), s);
            let dw = (w(x + h) - w(x - h)) / (2.0 * h);
            let ddw = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
            let d = if s == 0 { case.d0 } else { case.d1 };
            let g_fd = w(x) / case.tau - d * ddw - case.c1 * dw;
            let g = case.forcing(Point::new(x, 0.0), s);
            assert!(
                (g - g_fd).abs() < 1e-5 * (1.0 + g.abs()),
                "x = {x}, side {s}: {g} vs {g_fd}"
            );
        }
    }

    #[test]
    fn total_population_of_unit_field_is_domain_area() {
        let (mesh, s0, s1) = test_mesh(5);
        let w = stacked(&mesh, &s0, &s1, |_| 1.0);
        let pop = total_population(&mesh, &s0, &s1, &w).unwrap();
        assert!((pop - 16.0).abs() < 1e-10);
    }

    #[test]
    fn vtk_export_preserves_interface_jump() {
        let (mesh, s0, s1) = test_mesh(4);
        let kappa = 2.0;
        // Side-0 field = κ × side-1 field of the same shape.
        let mut vals: Vec<f64> = s0
            .vertex_of_dof
            .iter()
            .map(|&v| kappa * (3.0 + mesh.vertices[v].x))
            .collect();
        vals.extend(s1.vertex_of_dof.iter().map(|&v| 3.0 + mesh.vertices[v].x));
        let w = FieldVector { values: vals };

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.vtk");
        export_vtk(&mesh, &s0, &s1, &w, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();

        let n_points = s0.n_dofs + s1.n_dofs;
        assert!(text.contains(&format!("POINTS {n_points} double")));
        assert!(text.contains(&format!("CELLS {} {}", mesh.n_triangles(), 4 * mesh.n_triangles())));

        // Read back points and densities; at each duplicated interface
        // location the two values must differ by the factor κ.
        let lines: Vec<&str> = text.lines().collect();
        let ip = lines.iter().position(|l| l.starts_with("POINTS")).unwrap();
        let points: Vec<(f64, f64)> = lines[ip + 1..ip + 1 + n_points]
            .iter()
            .map(|l| {
                let mut it = l.split_whitespace().map(|t| t.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        let id = lines
            .iter()
            .position(|l| l.starts_with("SCALARS density"))
            .unwrap();
        let dens: Vec<f64> = lines[id + 2..id + 2 + n_points]
            .iter()
            .map(|l| l.parse().unwrap())
            .collect();

        let mut duplicated = 0;
        for i in 0..s0.n_dofs {
            for j in s0.n_dofs..n_points {
                if (points[i].0 - points[j].0).abs() < 1e-12
                    && (points[i].1 - points[j].1).abs() < 1e-12
                {
                    duplicated += 1;
                    assert!((dens[i] / dens[j] - kappa).abs() < 1e-12);
                }
            }
        }
        assert!(duplicated >= 4, "expected shared interface vertices");
    }

    #[test]
    fn csv_round_trip() {
        let samples = vec![(0.0, 1.25), (0.5, -3.75e-2), (1.0, 7.0)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cut.csv");
        export_csv(&samples, "x,density", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,density");
        let parsed: Vec<(f64, f64)> = lines
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        assert_eq!(parsed, samples);
    }

    #[test]
    fn table_formatting_shows_errors_and_orders() {
        let text = format_order_table(
            &["10".into(), "20".into(), "40".into()],
            &[vec![4.0e-2, 1.0e-2, 2.5e-3], vec![2.0e-1, 1.0e-1, 5.0e-2]],
            &["L2", "H1"],
        );
        assert!(text.contains("(2.00)"));
        assert!(text.contains("(1.00)"));
        assert!(text.contains("(  -  )"));
        assert_eq!(text.lines().count(), 4);
    }
}

//! The five commands: mesh generation, simulation runs, convergence
//! studies, 1D cross-validation and artifact export.

use crate::config::{Resolved, Scenario};
use mhfem::error::{Error, Result};
use mhfem::fespace::{eval_on_segment, interpolate, FieldVector};
use mhfem::geometry::Point;
use mhfem::harness::{
    e_inf, error_norms_exact, export_csv, export_vtk, format_order_table, order_table,
    total_population, FieldSlice, ManufacturedCase,
};
use mhfem::mesh::{mesh_quality, write_mesh, Conformity, StripBc};
use mhfem::model::kappa;
use mhfem::oracle1d::{solve_1d_steady, Grid1D};
use mhfem::problem::Discretization;
use mhfem::stepper::{run_to_steady, run_until, RunResult, RunStatus, SimState};
use std::cell::RefCell;
use std::io::Write;
use std::path::{Path, PathBuf};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn cmd_mesh(cfg: &Resolved) -> Result<()> {
    cfg.echo()?;
    let mesh = cfg.build_mesh()?;
    let path = cfg.output_dir.join("mesh.txt");
    write_mesh(&mesh, &path)?;
    let q = mesh_quality(&mesh);
    println!(
        "mesh: {} vertices, {} triangles -> {}",
        mesh.n_vertices(),
        mesh.n_triangles(),
        path.display()
    );
    println!("quality: {q:?}");
    Ok(())
}

fn build_disc(cfg: &Resolved) -> Result<Discretization> {
    Discretization::build(cfg.build_mesh()?, cfg.model, cfg.ale_map())
}

/// Scenario-appropriate initial density, stacked side-0 then side-1.
fn initial_field(cfg: &Resolved, disc: &Discretization) -> Result<FieldVector> {
    if let Some((amp, sigma, center)) = cfg.initial {
        let f = move |p: Point| {
            let q = ((p.x - center[0]) / sigma).powi(2) + ((p.y - center[1]) / sigma).powi(2);
            amp * (-0.5 * q).exp()
        };
        let mut w = interpolate(&disc.mesh, &disc.space0, f)?.values;
        w.extend(interpolate(&disc.mesh, &disc.space1, f)?.values);
        return Ok(FieldVector { values: w });
    }
    match cfg.scenario {
        Scenario::StripValidation => {
            // Carrying capacity inside, matched exponential decay outside.
            let cap = cfg.model.r / cfg.model.a;
            let k = disc.kappa;
            let mut w = interpolate(&disc.mesh, &disc.space0, |_| cap)?.values;
            w.extend(interpolate(&disc.mesh, &disc.space1, move |p| cap * p.x.exp() / k)?.values);
            Ok(FieldVector { values: w })
        }
        _ => Ok(FieldVector::zeros(disc.n_w())),
    }
}

fn execute(cfg: &Resolved, disc: &Discretization, snapshots: bool) -> Result<RunResult> {
    let w0 = initial_field(cfg, disc)?;
    let config = cfg.stepper_config();
    let io_error: RefCell<Option<Error>> = RefCell::new(None);
    let snapshot = |state: &SimState| {
        if !snapshots || cfg.snapshot_interval == 0 || io_error.borrow().is_some() {
            return;
        }
        if state.step_index % cfg.snapshot_interval == 0 {
            let path = cfg
                .output_dir
                .join(format!("snapshot_{:06}.vtk", state.step_index));
            if let Err(e) = export_vtk(&disc.mesh, &disc.space0, &disc.space1, &state.w, path) {
                *io_error.borrow_mut() = Some(e);
            }
        }
    };
    let result = match cfg.t_final {
        Some(tf) => run_until(disc, w0, &config, tf, snapshot)?,
        None => run_to_steady(disc, w0, &config, snapshot)?,
    };
    if let Some(e) = io_error.into_inner() {
        return Err(e);
    }
    Ok(result)
}

fn status_str(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Converged => "CONVERGED",
        RunStatus::NotConverged => "NOT_CONVERGED",
    }
}

pub fn cmd_run(cfg: &Resolved) -> Result<()> {
    cfg.echo()?;
    let disc = build_disc(cfg)?;
    let result = execute(cfg, &disc, true)?;
    let state = &result.state;

    export_vtk(
        &disc.mesh,
        &disc.space0,
        &disc.space1,
        &state.w,
        cfg.output_dir.join("final.vtk"),
    )?;
    write_final_state(cfg, &disc, &state.w)?;

    let hist_path = cfg.output_dir.join("metric_history.csv");
    let mut hist = String::from("step,t,steady_metric\n");
    for (i, m) in result.history.iter().enumerate() {
        let t = cfg.t0 + (i + 1) as f64 * cfg.tau;
        hist.push_str(&format!("{},{},{}\n", i + 1, t, m));
    }
    write_text(&hist_path, &hist)?;

    let population = total_population(&disc.mesh, &disc.space0, &disc.space1, &state.w)?;
    let report = format!(
        "status = {}\nsteps = {}\nt_end = {}\nsteady_metric = {:e}\npopulation = {}\n",
        status_str(result.status),
        state.step_index,
        state.t,
        state.steady_metric,
        population
    );
    write_text(&cfg.output_dir.join("report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

fn write_final_state(cfg: &Resolved, disc: &Discretization, w: &FieldVector) -> Result<()> {
    let path = cfg.output_dir.join("final_state.csv");
    let mut out = String::from("dof,subdomain,x,y,density\n");
    for (side, space, offset) in [
        (0u8, &disc.space0, 0usize),
        (1u8, &disc.space1, disc.space0.n_dofs),
    ] {
        for (d, &v) in space.vertex_of_dof.iter().enumerate() {
            let p = disc.mesh.vertices[v];
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                offset + d,
                side,
                p.x,
                p.y,
                w.values[offset + d]
            ));
        }
    }
    write_text(&path, &out)
}

pub fn cmd_converge(cfg: &Resolved) -> Result<()> {
    if cfg.scenario != Scenario::Manufactured {
        return Err(Error::Config(format!(
            "converge requires scenario = \"manufactured\", got {:?}",
            cfg.scenario
        )));
    }
    cfg.echo()?;
    let case = ManufacturedCase::new(
        kappa(&cfg.model)?,
        cfg.model.d0,
        cfg.model.d1,
        cfg.model.c[0],
        cfg.l_habitat,
        cfg.l_tail,
        cfg.tau,
    );
    let mut l2 = Vec::new();
    let mut h1 = Vec::new();
    let mut labels = Vec::new();
    for &n in &cfg.converge_levels {
        let nx = 2 * (n.max(2) - 1) + 1;
        let mesh = mhfem::mesh::gen_strip_bidomain(
            cfg.l_habitat,
            cfg.l_tail,
            cfg.y0,
            cfg.y1,
            nx,
            nx,
            n,
            1.0,
            Conformity::Conformal,
            StripBc {
                ell0: mhfem::mesh::BoundaryMarker::OuterDirichlet,
                ell1: mhfem::mesh::BoundaryMarker::OuterDirichlet,
                horizontal: mhfem::mesh::BoundaryMarker::OuterNeumann,
            },
        )?;
        let disc = Discretization::build(mesh, cfg.model, cfg.ale_map())?;
        let mut op = disc.operator(cfg.tau, cfg.tau)?;
        let rhs = mhfem::assembly::assemble_load_fn(
            &disc.mesh,
            &disc.space0,
            &disc.space1,
            |p, s| case.forcing(p, s),
            1.0,
        )?;
        let (w, _) = op.solve(rhs)?;
        let slice = FieldSlice {
            mesh: &disc.mesh,
            space0: &disc.space0,
            space1: &disc.space1,
            w: &w,
        };
        let rep = error_norms_exact(
            &slice,
            |p, s| case.exact(p, s),
            |p, s| case.exact_grad(p, s),
        )?;
        l2.push(rep.l2_error);
        h1.push(rep.h1_semi_error);
        labels.push(n.to_string());
    }

    let table = format_order_table(&labels, &[l2.clone(), h1.clone()], &["L2", "H1-semi"]);
    write_text(&cfg.output_dir.join("orders.txt"), &table)?;
    let mut csv = String::from("n,l2_error,l2_order,h1_error,h1_order\n");
    let (lo, ho) = (order_table(&l2), order_table(&h1));
    for (k, label) in labels.iter().enumerate() {
        let (po_l, po_h) = if k == 0 {
            (String::new(), String::new())
        } else {
            (format!("{}", lo[k - 1]), format!("{}", ho[k - 1]))
        };
        csv.push_str(&format!("{label},{},{po_l},{},{po_h}\n", l2[k], h1[k]));
    }
    write_text(&cfg.output_dir.join("orders.csv"), &csv)?;
    print!("{table}");
    Ok(())
}

pub fn cmd_validate(cfg: &Resolved) -> Result<()> {
    if cfg.scenario != Scenario::StripValidation {
        return Err(Error::Config(format!(
            "validate requires scenario = \"strip_validation\", got {:?}",
            cfg.scenario
        )));
    }
    cfg.echo()?;
    let disc = build_disc(cfg)?;
    let result = execute(cfg, &disc, false)?;

    let grid = Grid1D::build(cfg.l_habitat, cfg.l_tail, cfg.oracle_h0, 1.005)?;
    let oracle = solve_1d_steady(&cfg.model, &grid, cfg.oracle_tau, cfg.oracle_tol, 2_000_000)?;

    // Mid-height cut of the 2D field, each side evaluated from its own
    // space so the interface jump is kept.
    let y_mid = 0.5 * (cfg.y0 + cfg.y1);
    let n0 = disc.space0.n_dofs;
    let w0 = FieldVector {
        values: result.state.w.values[..n0].to_vec(),
    };
    let w1 = FieldVector {
        values: result.state.w.values[n0..].to_vec(),
    };
    let tail = eval_on_segment(
        &disc.mesh,
        &disc.space1,
        &w1,
        Point::new(-cfg.l_tail, y_mid),
        Point::new(0.0, y_mid),
        601,
    )?;
    let habitat = eval_on_segment(
        &disc.mesh,
        &disc.space0,
        &w0,
        Point::new(0.0, y_mid),
        Point::new(cfg.l_habitat, y_mid),
        301,
    )?;
    let mut xs: Vec<f64> = tail.iter().map(|&(s, _)| -cfg.l_tail + s).collect();
    let n_tail = xs.len();
    xs.extend(habitat.iter().map(|&(s, _)| s));
    let mut u: Vec<f64> = tail.iter().map(|&(_, v)| v).collect();
    u.extend(habitat.iter().map(|&(_, v)| v));
    let mut v = oracle.resample(&xs[..n_tail], false)?;
    v.extend(oracle.resample(&xs[n_tail..], true)?);
    let error = e_inf(&u, &v)?;

    let cut: Vec<(f64, f64)> = xs.iter().copied().zip(u.iter().copied()).collect();
    export_csv(&cut, "x,density_2d", cfg.output_dir.join("cut_2d.csv"))?;
    let oracle_cut: Vec<(f64, f64)> = xs.iter().copied().zip(v.iter().copied()).collect();
    export_csv(
        &oracle_cut,
        "x,density_1d",
        cfg.output_dir.join("cut_oracle.csv"),
    )?;
    let report = format!(
        "status = {}\nsteps = {}\ne_inf = {:e}\n",
        status_str(result.status),
        result.state.step_index,
        error
    );
    write_text(&cfg.output_dir.join("validate_report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

pub fn cmd_export(cfg: &Resolved, from: Option<PathBuf>, format: &str) -> Result<()> {
    let dir = from.unwrap_or_else(|| cfg.output_dir.clone());
    let state_path = dir.join("final_state.csv");
    let text = std::fs::read_to_string(&state_path)
        .map_err(|e| Error::io(state_path.display().to_string(), e))?;
    let disc = build_disc(cfg)?;
    let mut w = FieldVector::zeros(disc.n_w());
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 5 columns in {}", state_path.display()),
            });
        }
        let dof: usize = cols[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: "bad dof index".into(),
        })?;
        let val: f64 = cols[4].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: "bad density value".into(),
        })?;
        if dof >= w.len() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("dof {dof} out of range for this mesh configuration"),
            });
        }
        w.values[dof] = val;
    }
    match format {
        "vtk" => {
            let path = dir.join("export.vtk");
            export_vtk(&disc.mesh, &disc.space0, &disc.space1, &w, &path)?;
            println!("wrote {}", path.display());
        }
        "csv" => {
            let path = dir.join("export.csv");
            let file =
                std::fs::File::create(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
            let mut out = std::io::BufWriter::new(file);
            let io_err = |e| Error::io(path.display().to_string(), e);
            writeln!(out, "x,y,subdomain,density").map_err(io_err)?;
            for (side, space, offset) in [
                (0u8, &disc.space0, 0usize),
                (1u8, &disc.space1, disc.space0.n_dofs),
            ] {
                for (d, &vtx) in space.vertex_of_dof.iter().enumerate() {
                    let p = disc.mesh.vertices[vtx];
                    writeln!(out, "{},{},{},{}", p.x, p.y, side, w.values[offset + d])
                        .map_err(io_err)?;
                }
            }
            out.flush().map_err(io_err)?;
            println!("wrote {}", path.display());
        }
        other => {
            return Err(Error::Config(format!(
                "unknown export format \"{other}\" (expected \"vtk\" or \"csv\")"
            )))
        }
    }
    Ok(())
}

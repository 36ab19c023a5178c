//! Glue binding a mesh to its spaces, traces, multiplier space and model
//! parameters, and building the factorized implicit operator of one step.

use crate::assembly::{assemble_a, assemble_coupling, assemble_load, assemble_mass, SparseMatrix};
use crate::error::Result;
use crate::fespace::{build_multiplier_space, build_space, DofMap, FieldVector, MultiplierSpace};
use crate::mesh::{extract_interface_traces, InterfaceTrace, Mesh};
use crate::model::{ale_coefficients, kappa, AleMap, ModelParams};
use crate::saddle::{BlockSaddleSystem, SaddleSolver};

/// A mesh with everything derived from it for one model configuration.
pub struct Discretization {
    pub mesh: Mesh,
    pub space0: DofMap,
    pub space1: DofMap,
    pub trace0: InterfaceTrace,
    pub trace1: InterfaceTrace,
    pub mult: MultiplierSpace,
    pub params: ModelParams,
    pub kappa: f64,
    pub ale: AleMap,
}

impl Discretization {
    pub fn build(mesh: Mesh, params: ModelParams, ale: AleMap) -> Result<Self> {
        mesh.validate()?;
        let k = kappa(&params)?;
        let (trace0, trace1) = extract_interface_traces(&mesh)?;
        let space0 = build_space(&mesh, 0);
        let space1 = build_space(&mesh, 1);
        let mult = build_multiplier_space(trace0.clone());
        Ok(Discretization {
            mesh,
            space0,
            space1,
            trace0,
            trace1,
            mult,
            params,
            kappa: k,
            ale,
        })
    }

    /// Total density dofs (both subdomains).
    pub fn n_w(&self) -> usize {
        self.space0.n_dofs + self.space1.n_dofs
    }

    /// Mass matrix over both subdomains.
    pub fn mass_matrix(&self) -> Result<SparseMatrix> {
        assemble_mass(&self.mesh, &self.space0, &self.space1)
    }

    /// `b₁` and `b_κ` coupling blocks (time-independent).
    pub fn couplings(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        let b1 = assemble_coupling(
            &self.mult,
            &self.trace0,
            &self.trace1,
            &self.space0,
            &self.space1,
            1.0,
        )?;
        let bk = assemble_coupling(
            &self.mult,
            &self.trace0,
            &self.trace1,
            &self.space0,
            &self.space1,
            self.kappa,
        )?;
        Ok((b1, bk))
    }

    /// Assembles and factorizes the implicit operator at time `t`.
    pub fn operator(&self, t: f64, tau: f64) -> Result<Operator> {
        let coeffs = ale_coefficients(&self.ale, t, &self.params)?;
        let a = assemble_a(
            &self.mesh,
            &self.space0,
            &self.space1,
            &coeffs,
            tau,
            1.0,
            self.params.robin_b,
        )?;
        let (b1, bk) = self.couplings()?;
        let n_w = self.n_w();
        let system = BlockSaddleSystem::new(a, b1, bk, vec![0.0; n_w])?;
        let solver = system.factorize()?;
        Ok(Operator {
            system,
            solver,
            tau,
            t,
        })
    }

    /// Load vector for one implicit step from the previous density.
    pub fn load(&self, w_prev: &FieldVector, tau: f64) -> Result<Vec<f64>> {
        assemble_load(
            &self.mesh,
            &self.space0,
            &self.space1,
            w_prev,
            &self.params,
            tau,
            1.0,
        )
    }
}

/// Factorized implicit operator of one time step; reusable across steps
/// while the ALE coefficients stay constant.
pub struct Operator {
    pub system: BlockSaddleSystem,
    solver: SaddleSolver,
    pub tau: f64,
    /// Assembly time of the coefficients.
    pub t: f64,
}

impl Operator {
    /// Solves one implicit step for the given load.
    pub fn solve(&mut self, rhs_w: Vec<f64>) -> Result<(FieldVector, FieldVector)> {
        self.system.rhs_w = rhs_w;
        self.solver.solve(&self.system)
    }
}

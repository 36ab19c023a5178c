//! Independent 1D finite-difference solver for the travelling-pulse cross
//! sections of the strip geometry.
//!
//! On the line, the reference-frame steady state satisfies
//! `d·w″ + c·w′ + G(w) = 0` on the tail `(−L′, 0)` and habitat `(0, L)`,
//! with the jump `w₀(0⁺) = κ·w₁(0⁻)`, flux continuity
//! `d₀w₀′ + cw₀ = d₁w₁′ + cw₁` at the doubled node `x = 0`, a Robin
//! condition `d₀w′ + cw = bw` at `x = L` and homogeneous Dirichlet at
//! `x = −L′`. The scheme uses second-order central differences on the
//! nonuniform grid, second-order one-sided differences for the interface
//! and Robin rows, and IMEX Euler in pseudo-time (reaction explicit). This
//! solver shares no code with the 2D path, which makes it a legitimate
//! cross-validation oracle.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::model::{kappa, reaction, ModelParams};

/// Nonuniform 1D grid: geometric on the tail (smallest cell at the
/// interface), uniform on the habitat.
#[derive(Debug, Clone)]
pub struct Grid1D {
    /// Strictly increasing, with `nodes[interface_index] = 0`.
    pub nodes: Vec<f64>,
    pub interface_index: usize,
    pub h0: f64,
    pub rc: f64,
}

impl Grid1D {
    /// Builds the grid for habitat `(0, L)` and tail `(−L′, 0)`: habitat
    /// spacing `h0` (rounded to divide `L` evenly), tail widths
    /// `h0·rc^k` with the last node clamped to `−L′`.
    pub fn build(l_habitat: f64, l_tail: f64, h0: f64, rc: f64) -> Result<Self> {
        if !(l_habitat > 0.0 && l_tail > 0.0 && h0 > 0.0 && rc >= 1.0) {
            return Err(Error::Config(format!(
                "invalid 1D grid parameters (L = {l_habitat}, L' = {l_tail}, h0 = {h0}, rc = {rc})"
            )));
        }
        let mut tail = vec![0.0f64];
        let mut x = 0.0;
        let mut w = h0;
        while x > -l_tail {
            x -= w;
            if x <= -l_tail + 0.25 * w {
                x = -l_tail;
            }
            tail.push(x);
            w *= rc;
        }
        tail.reverse();
        let n_hab = (l_habitat / h0).round().max(1.0) as usize;
        let mut nodes = tail;
        let interface_index = nodes.len() - 1;
        for k in 1..=n_hab {
            nodes.push(l_habitat * k as f64 / n_hab as f64);
        }
        Ok(Grid1D {
            nodes,
            interface_index,
            h0,
            rc,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Steady profile with the doubled interface value.
#[derive(Debug, Clone)]
pub struct Profile1D {
    pub grid: Grid1D,
    /// One unknown per node plus one extra: index `i ≤ i0` is the tail
    /// value at `nodes[i]` (so `i0` is `w₁(0⁻)`); index `i > i0` is the
    /// habitat value at `nodes[i−1]` (so `i0+1` is `w₀(0⁺)`).
    pub values: Vec<f64>,
}

impl Profile1D {
    pub fn interface_left(&self) -> f64 {
        self.values[self.grid.interface_index]
    }

    pub fn interface_right(&self) -> f64 {
        self.values[self.grid.interface_index + 1]
    }

    fn unknown_of_node(&self, node: usize, side_right: bool) -> usize {
        let i0 = self.grid.interface_index;
        match node.cmp(&i0) {
            std::cmp::Ordering::Less => node,
            std::cmp::Ordering::Equal => {
                if side_right {
                    i0 + 1
                } else {
                    i0
                }
            }
            std::cmp::Ordering::Greater => node + 1,
        }
    }

    /// Piecewise-linear interpolation; `x = 0` reads the side named by
    /// `side_right`.
    pub fn resample(&self, xs: &[f64], side_right: bool) -> Result<Vec<f64>> {
        let nodes = &self.grid.nodes;
        let (lo, hi) = (nodes[0], *nodes.last().unwrap());
        let tol = 1e-12 * (hi - lo);
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            if x < lo - tol || x > hi + tol {
                return Err(Error::Geometry(format!(
                    "sample x = {x} outside the profile range [{lo}, {hi}]"
                )));
            }
            let x = x.clamp(lo, hi);
            if x.abs() <= tol {
                out.push(if side_right {
                    self.interface_right()
                } else {
                    self.interface_left()
                });
                continue;
            }
            let j = match nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
                Ok(j) => j.min(nodes.len() - 2),
                Err(j) => j.saturating_sub(1).min(nodes.len() - 2),
            };
            let (xa, xb) = (nodes[j], nodes[j + 1]);
            let t = (x - xa) / (xb - xa);
            // A cell adjacent to the interface reads the interface value of
            // its own side.
            let ua = self.values[self.unknown_of_node(j, xa >= -tol)];
            let ub = self.values[self.unknown_of_node(j + 1, xb > tol)];
            out.push(ua + t * (ub - ua));
        }
        Ok(out)
    }
}

/// Second-order 3-point first-derivative weights at `x0` from nodes
/// `(x0, x0+s1, x0+s1+s2)` (signed offsets).
fn one_sided_first(s1: f64, s2: f64) -> [f64; 3] {
    let s12 = s1 + s2;
    [
        -(2.0 * s1 + s2) / (s1 * s12),
        s12 / (s1 * s2),
        -s1 / (s2 * s12),
    ]
}

/// Solves the steady 1D problem by IMEX pseudo-time iteration.
pub fn solve_1d_steady(
    params: &ModelParams,
    grid: &Grid1D,
    tau: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Profile1D> {
    params.validate()?;
    let b = params.robin_b.ok_or_else(|| {
        Error::Config("the 1D strip problem needs the Robin coefficient robin_b".into())
    })?;
    let k = kappa(params)?;
    let c = params.c[0];
    let i0 = grid.interface_index;
    let nodes = &grid.nodes;
    let n = nodes.len() + 1;

    // Implicit operator rows; unknown layout as in Profile1D.
    let mut triplets: Vec<Triplet<usize, usize, f64>> = Vec::new();
    let mut push = |r: usize, c_: usize, v: f64| triplets.push(Triplet::new(r, c_, v));
    // Maps a node index and side to its unknown.
    let unk = |node: usize, right: bool| -> usize {
        match node.cmp(&i0) {
            std::cmp::Ordering::Less => node,
            std::cmp::Ordering::Equal => {
                if right {
                    i0 + 1
                } else {
                    i0
                }
            }
            std::cmp::Ordering::Greater => node + 1,
        }
    };

    // Dirichlet at x = −L′.
    push(0, 0, 1.0);
    // Interior rows: u/τ − d·u″ − c·u′.
    for node in 1..nodes.len() - 1 {
        if node == i0 {
            continue;
        }
        let right = node > i0;
        let d = if right { params.d0 } else { params.d1 };
        let row = unk(node, right);
        let (hm, hp) = (nodes[node] - nodes[node - 1], nodes[node + 1] - nodes[node]);
        let (um, uc, up) = (
            unk(node - 1, node - 1 > i0 || (node - 1 == i0 && right)),
            row,
            unk(node + 1, right),
        );
        // Central second-order weights on the nonuniform stencil.
        let w2 = [
            2.0 / (hm * (hm + hp)),
            -2.0 / (hm * hp),
            2.0 / (hp * (hm + hp)),
        ];
        let w1 = [
            -hp / (hm * (hm + hp)),
            (hp - hm) / (hm * hp),
            hm / (hp * (hm + hp)),
        ];
        push(row, um, -d * w2[0] - c * w1[0]);
        push(row, uc, 1.0 / tau - d * w2[1] - c * w1[1]);
        push(row, up, -d * w2[2] - c * w1[2]);
    }
    // Jump row at the interface: w₀(0⁺) − κ·w₁(0⁻) = 0.
    push(i0, i0 + 1, 1.0);
    push(i0, i0, -k);
    // Flux row: d₀w₀′(0⁺) + c·w₀ − d₁w₁′(0⁻) − c·w₁ = 0.
    {
        let row = i0 + 1;
        let (s1, s2) = (nodes[i0 + 1] - nodes[i0], nodes[i0 + 2] - nodes[i0 + 1]);
        let wr = one_sided_first(s1, s2);
        push(row, i0 + 1, params.d0 * wr[0] + c);
        push(row, unk(i0 + 1, true), params.d0 * wr[1]);
        push(row, unk(i0 + 2, true), params.d0 * wr[2]);
        let (s1, s2) = (nodes[i0 - 1] - nodes[i0], nodes[i0 - 2] - nodes[i0 - 1]);
        let wl = one_sided_first(s1, s2);
        push(row, i0, -params.d1 * wl[0] - c);
        push(row, i0 - 1, -params.d1 * wl[1]);
        push(row, i0 - 2, -params.d1 * wl[2]);
    }
    // Robin row at x = L: d₀w′(L) + (c − b)·w(L) = 0.
    {
        let last = nodes.len() - 1;
        let row = unk(last, true);
        let (s1, s2) = (nodes[last - 1] - nodes[last], nodes[last - 2] - nodes[last - 1]);
        let w = one_sided_first(s1, s2);
        push(row, row, params.d0 * w[0] + c - b);
        push(row, unk(last - 1, true), params.d0 * w[1]);
        push(row, unk(last - 2, true), params.d0 * w[2]);
    }

    let mat = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Solve(format!("could not build the 1D operator: {e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::Solve(format!("1D LU factorization failed: {e:?}")))?;

    // Initial profile: carrying capacity in the habitat, matched decay in
    // the tail.
    let cap = params.r / params.a;
    let mut u = vec![0.0f64; n];
    for node in 0..nodes.len() {
        let x = nodes[node];
        if x >= 0.0 {
            u[unk(node, true)] = cap;
        }
        if x <= 0.0 {
            u[unk(node, false)] = cap / k * x.exp();
        }
    }

    let mut rhs = Mat::<f64>::zeros(n, 1);
    for iter in 0..max_steps {
        for node in 1..nodes.len() - 1 {
            if node == i0 {
                continue;
            }
            let right = node > i0;
            let row = unk(node, right);
            let sub = if right { 0 } else { 1 };
            rhs[(row, 0)] = u[row] / tau + reaction(u[row], sub, params);
        }
        rhs[(0, 0)] = 0.0;
        rhs[(i0, 0)] = 0.0;
        rhs[(i0 + 1, 0)] = 0.0;
        let last_row = unk(nodes.len() - 1, true);
        rhs[(last_row, 0)] = 0.0;

        let sol = lu.solve(&rhs);
        let mut diff = 0.0f64;
        for i in 0..n {
            let v = sol[(i, 0)];
            if !v.is_finite() {
                return Err(Error::Divergence {
                    step: iter,
                    msg: format!("1D unknown {i} became {v}"),
                });
            }
            diff = diff.max((v - u[i]).abs());
            u[i] = v;
        }
        if diff / tau < tol {
            return Ok(Profile1D {
                grid: grid.clone(),
                values: u,
            });
        }
    }
    Err(Error::Divergence {
        step: max_steps,
        msg: format!("1D pseudo-time iteration did not reach tolerance {tol}"),
    })
}

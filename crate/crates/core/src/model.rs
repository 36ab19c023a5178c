//! Model physics: parameters, the jump coefficient κ, reaction terms, and
//! the ALE maps that fix a moving habitat in a reference frame.
//!
//! Reference-frame bookkeeping. With the change of coordinates
//! `(x, y) ↦ (ξ, η)` the density `w(ξ, η, t)` satisfies
//! `w_t − ∇·(D∇w) − (v·∇)w = G(w)` where `v = (−ξ_t, −η_t)` and `D` collects
//! the metric factors. After moving the advection onto the test function the
//! bilinear form gains a `div v` mass correction:
//! `a(w, v) = ∫ D∇w·∇v + (v·∇v̂)w + (1/τ + div v)·w v̂`.
//! Both supported maps are affine in space, so `D` is diagonal and constant
//! in space and no second-derivative terms appear.

use crate::assembly::{AdvectionField, CoefficientField};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// All PDE coefficients of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Diffusion in the habitat Ω₀.
    pub d0: f64,
    /// Diffusion in the surrounding region Ω₁.
    pub d1: f64,
    /// Intrinsic growth rate (logistic, Ω₀).
    pub r: f64,
    /// Competition coefficient (logistic, Ω₀).
    pub a: f64,
    /// Mortality rate in Ω₁.
    pub m: f64,
    /// Probability of entering the habitat at the interface.
    pub alpha: f64,
    /// Habitat shift velocity.
    pub c: [f64; 2],
    /// Robin coefficient on the far habitat boundary (strip geometry only):
    /// the condition is `d₀∂_n w + (c·n)w = b·w`.
    pub robin_b: Option<f64>,
    /// Far-side parameters recorded for the provenance of `robin_b`.
    pub d2: Option<f64>,
    pub m2: Option<f64>,
    pub beta: Option<f64>,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.d1 > 0.0) {
            return Err(Error::Config(format!(
                "diffusion coefficients must be positive (d0 = {}, d1 = {})",
                self.d0, self.d1
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha = {} must lie strictly inside (0, 1)",
                self.alpha
            )));
        }
        if self.a <= 0.0 {
            return Err(Error::Config(format!("a = {} must be positive", self.a)));
        }
        if self.m < 0.0 {
            return Err(Error::Config(format!(
                "mortality m = {} must be nonnegative",
                self.m
            )));
        }
        Ok(())
    }

    pub fn diffusion(&self, subdomain: u8) -> f64 {
        if subdomain == 0 {
            self.d0
        } else {
            self.d1
        }
    }
}

/// Jump coefficient `κ = (α/(1−α))·√(d₁/d₀)`; the density satisfies
/// `w₀ = κ·w₁` across the interface.
pub fn kappa(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(params.alpha / (1.0 - params.alpha) * (params.d1 / params.d0).sqrt())
}

/// Reaction term: logistic growth `u(r − au)` in the habitat, pure
/// mortality `−mu` outside.
pub fn reaction(u: f64, subdomain: u8, params: &ModelParams) -> f64 {
    if subdomain == 0 {
        u * (params.r - params.a * u)
    } else {
        -params.m * u
    }
}

/// Change of coordinates fixing the habitat in the reference frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AleMap {
    Identity,
    /// `ξ = x − c₁t`, `η = y − c₂t`: a habitat translating at speed `c`.
    LinearShift { c1: f64, c2: f64 },
    /// `ξ = x − c₁t`, `η = y·L_y/(L_y − c₂t)`: a habitat shifting in `x`
    /// while its container shrinks in `y`; degenerates at `t = L_y/c₂`.
    ShrinkingRect { c1: f64, c2: f64, ly: f64 },
}

impl AleMap {
    /// Latest admissible time, if the map degenerates.
    pub fn horizon(&self) -> Option<f64> {
        match *self {
            AleMap::ShrinkingRect { c2, ly, .. } if c2 > 0.0 => Some(ly / c2),
            _ => None,
        }
    }

    pub fn check_horizon(&self, t: f64) -> Result<()> {
        if let Some(t_max) = self.horizon() {
            if t >= t_max {
                return Err(Error::Horizon(format!(
                    "t = {t} is at or past the collapse time {t_max}"
                )));
            }
        }
        Ok(())
    }

    /// Physical coordinates of a reference point at time `t`.
    pub fn forward(&self, p: Point, t: f64) -> Result<Point> {
        self.check_horizon(t)?;
        Ok(match *self {
            AleMap::Identity => p,
            AleMap::LinearShift { c1, c2 } => Point::new(p.x + c1 * t, p.y + c2 * t),
            AleMap::ShrinkingRect { c1, c2, ly } => {
                Point::new(p.x + c1 * t, p.y * (ly - c2 * t) / ly)
            }
        })
    }

    /// Reference coordinates of a physical point at time `t`.
    pub fn inverse(&self, p: Point, t: f64) -> Result<Point> {
        self.check_horizon(t)?;
        Ok(match *self {
            AleMap::Identity => p,
            AleMap::LinearShift { c1, c2 } => Point::new(p.x - c1 * t, p.y - c2 * t),
            AleMap::ShrinkingRect { c1, c2, ly } => {
                Point::new(p.x - c1 * t, p.y * ly / (ly - c2 * t))
            }
        })
    }

    /// Whether the induced coefficients depend on time (requiring
    /// re-assembly every step).
    pub fn is_time_varying(&self) -> bool {
        matches!(self, AleMap::ShrinkingRect { .. })
    }
}

/// PDE coefficients induced by the map at time `t`.
pub fn ale_coefficients(map: &AleMap, t: f64, params: &ModelParams) -> Result<CoefficientField> {
    map.check_horizon(t)?;
    let iso = |d: f64| [d, 0.0, d];
    Ok(match *map {
        AleMap::Identity => CoefficientField {
            diffusion: [iso(params.d0), iso(params.d1)],
            advection: AdvectionField::Constant([0.0, 0.0]),
            mass_extra: 0.0,
        },
        AleMap::LinearShift { c1, c2 } => CoefficientField {
            diffusion: [iso(params.d0), iso(params.d1)],
            advection: AdvectionField::Constant([c1, c2]),
            mass_extra: 0.0,
        },
        AleMap::ShrinkingRect { c1, c2, ly } => {
            // η_y = L_y/(L_y − c₂t); v = (c₁, −η·c₂/(L_y − c₂t)).
            let phi = ly / (ly - c2 * t);
            let rate = c2 / (ly - c2 * t);
            CoefficientField {
                diffusion: [
                    [params.d0, 0.0, params.d0 * phi * phi],
                    [params.d1, 0.0, params.d1 * phi * phi],
                ],
                advection: AdvectionField::ShrinkY { c1, rate },
                mass_extra: -rate,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn base_params() -> ModelParams {
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

    #[test]
    fn kappa_values() {
        let mut p = base_params();
        p.d1 = 1.0;
        assert!((kappa(&p).unwrap() - 1.0).abs() < 1e-15);
        p.d1 = 2.0;
        assert!((kappa(&p).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        p.alpha = 0.7;
        let expected = 7.0 / 3.0 * 2.0f64.sqrt();
        assert!((kappa(&p).unwrap() - expected).abs() < 1e-12);
        p.alpha = 1.0;
        assert!(matches!(kappa(&p), Err(Error::Config(_))));
    }

    #[test]
    fn reaction_values() {
        let p = base_params();
        assert_eq!(reaction(p.r / p.a, 0, &p), 0.0);
        assert_eq!(reaction(0.0, 0, &p), 0.0);
        assert_eq!(reaction(0.0, 1, &p), 0.0);
        let mut p2 = p;
        p2.m = 0.5;
        assert_eq!(reaction(1.0, 1, &p2), -0.5);
    }

    #[test]
    fn shrinking_rect_metric_factors() {
        let p = base_params();
        let map = AleMap::ShrinkingRect {
            c1: 0.0,
            c2: 0.1,
            ly: 10.0,
        };
        let cf = ale_coefficients(&map, 20.0, &p).unwrap();
        // η_y = 10/8 = 1.25 → y-diffusion scaled by 1.5625.
        assert!((cf.diffusion[0][2] / p.d0 - 1.5625).abs() < 1e-14);
        assert!((cf.diffusion[1][2] / p.d1 - 1.5625).abs() < 1e-14);
        assert!((cf.mass_extra - (-0.1 / 8.0)).abs() < 1e-15);
        assert!(matches!(
            ale_coefficients(&map, 100.0, &p),
            Err(Error::Horizon(_))
        ));
    }

    #[test]
    fn linear_shift_is_constant_advection() {
        let p = base_params();
        let cf = ale_coefficients(&AleMap::LinearShift { c1: 1.0, c2: 0.0 }, 7.3, &p).unwrap();
        match cf.advection {
            AdvectionField::Constant(v) => assert_eq!(v, [1.0, 0.0]),
            _ => panic!("expected constant advection"),
        }
        assert_eq!(cf.mass_extra, 0.0);
        assert_eq!(cf.diffusion[0], [1.0, 0.0, 1.0]);
    }

    #[test]
    fn forward_inverse_round_trip() {
        let map = AleMap::ShrinkingRect {
            c1: 0.2,
            c2: 0.1,
            ly: 10.0,
        };
        for &(x, y, t) in &[(1.0, 2.0, 0.0), (-3.0, 7.5, 40.0), (0.3, -1.0, 99.0)] {
            let p = Point::new(x, y);
            let q = map.inverse(map.forward(p, t).unwrap(), t).unwrap();
            assert!(p.dist(q) < 1e-12);
        }
    }
}

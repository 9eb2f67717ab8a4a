//! Nonlinear mean-field dynamics of the two driven optomechanical units.
//!
//! State per unit: a complex intracavity amplitude and a mechanical
//! position/momentum pair, all dimensionless. The only difference between
//! the bath topologies is the mechanical drag term: Gamma p_j for separate
//! baths, Gamma (p_1 + p_2) for the common bath.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Complex, SVector};

use crate::ode::{self, Controls, OdeError};
use crate::params::{BathKind, NormalModes, ParamError, SystemParams};

/// Instantaneous mean-field state.
///
/// The flattened vector ordering is
/// `[Re a1, Im a1, Re a2, Im a2, x1, p1, x2, p2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub a1: Complex<f64>,
    pub a2: Complex<f64>,
    pub x1: f64,
    pub p1: f64,
    pub x2: f64,
    pub p2: f64,
}

pub type StateVector = SVector<f64, 8>;

impl ClassicalState {
    pub const ZERO: ClassicalState = ClassicalState {
        a1: Complex::new(0.0, 0.0),
        a2: Complex::new(0.0, 0.0),
        x1: 0.0,
        p1: 0.0,
        x2: 0.0,
        p2: 0.0,
    };

    /// Default sweep initial condition: small symmetric mechanical
    /// displacement, empty cavities.
    pub fn small_displacement() -> ClassicalState {
        ClassicalState {
            x1: 0.1,
            x2: 0.1,
            ..ClassicalState::ZERO
        }
    }

    pub fn to_vector(&self) -> StateVector {
        SVector::from([
            self.a1.re, self.a1.im, self.a2.re, self.a2.im, self.x1, self.p1, self.x2, self.p2,
        ])
    }

    pub fn from_vector(v: &StateVector) -> ClassicalState {
        ClassicalState {
            a1: Complex::new(v[0], v[1]),
            a2: Complex::new(v[2], v[3]),
            x1: v[4],
            p1: v[5],
            x2: v[6],
            p2: v[7],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }

    /// Swap the unit labels 1 <-> 2.
    pub fn swapped(&self) -> ClassicalState {
        ClassicalState {
            a1: self.a2,
            a2: self.a1,
            x1: self.x2,
            p1: self.p2,
            x2: self.x1,
            p2: self.p1,
        }
    }
}

/// Time derivative of the mean-field equations.
pub fn rhs(s: &ClassicalState, p: &SystemParams) -> ClassicalState {
    let da1 = (Complex::new(-0.5, p.delta0 + s.x1)) * s.a1 + Complex::new(0.5, 0.0);
    let da2 = (Complex::new(-0.5, p.delta0 + s.x2)) * s.a2 + Complex::new(0.5, 0.0);
    let (drag1, drag2) = match p.bath {
        BathKind::SeparateBaths => (p.gamma * s.p1, p.gamma * s.p2),
        BathKind::CommonBath => {
            let shared = p.gamma * (s.p1 + s.p2);
            (shared, shared)
        }
    };
    let spring = p.k_c * (s.x1 - s.x2);
    ClassicalState {
        a1: da1,
        a2: da2,
        x1: s.p1,
        p1: -p.omega_m1 * p.omega_m1 * s.x1 - spring - drag1 + p.power * s.a1.norm_sqr(),
        x2: s.p2,
        p2: -p.omega_m2 * p.omega_m2 * s.x2 + spring - drag2 + p.power * s.a2.norm_sqr(),
    }
}

fn rhs_vector(v: &StateVector, p: &SystemParams) -> StateVector {
    rhs(&ClassicalState::from_vector(v), p).to_vector()
}

/// Mean-field trajectory sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt_sample: f64,
    pub samples: Vec<ClassicalState>,
}

impl Trajectory {
    pub fn time(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt_sample
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x1_series(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x1).collect()
    }

    pub fn x2_series(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x2).collect()
    }

    /// Drop every sample strictly before `t_from`.
    pub fn tail_from(&self, t_from: f64) -> Trajectory {
        let skip = if t_from <= self.t0 {
            0
        } else {
            libm::ceil((t_from - self.t0) / self.dt_sample - 1e-9) as usize
        };
        let skip = skip.min(self.samples.len().saturating_sub(2));
        Trajectory {
            t0: self.time(skip),
            dt_sample: self.dt_sample,
            samples: self.samples[skip..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegrateError {
    Ode(OdeError),
    Params(ParamError),
    InvalidControls,
}

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrateError::Ode(e) => write!(f, "integration failed: {e}"),
            IntegrateError::Params(e) => write!(f, "invalid parameters: {e}"),
            IntegrateError::InvalidControls => write!(f, "tolerance controls must be positive"),
        }
    }
}

impl From<OdeError> for IntegrateError {
    fn from(e: OdeError) -> Self {
        IntegrateError::Ode(e)
    }
}

impl From<ParamError> for IntegrateError {
    fn from(e: ParamError) -> Self {
        IntegrateError::Params(e)
    }
}

/// Integrate the mean-field equations from `s0` over `[0, t_end]`, sampling
/// every `dt_sample`.
pub fn integrate(
    s0: &ClassicalState,
    p: &SystemParams,
    t_end: f64,
    dt_sample: f64,
    controls: &Controls,
) -> Result<Trajectory, IntegrateError> {
    p.validate()?;
    if !(controls.rel_tol > 0.0) || !(controls.abs_tol > 0.0) {
        return Err(IntegrateError::InvalidControls);
    }
    let samples = ode::integrate_sampled(
        |_t, v| rhs_vector(v, p),
        s0.to_vector(),
        0.0,
        t_end,
        dt_sample,
        controls,
    )?;
    Ok(Trajectory {
        t0: 0.0,
        dt_sample,
        samples: samples.iter().map(ClassicalState::from_vector).collect(),
    })
}

/// Energies of the center-of-mass (+) and relative (-) mechanical modes
/// along a trajectory, E = (p^2 + Omega^2 x^2) / 2 in each coordinate.
pub fn mode_energies(traj: &Trajectory, p: &SystemParams) -> Result<Vec<(f64, f64)>, ParamError> {
    let NormalModes {
        omega_plus,
        omega_minus,
        ..
    } = crate::params::normal_modes(p)?;
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    Ok(traj
        .samples
        .iter()
        .map(|s| {
            let x_plus = (s.x1 + s.x2) * inv_sqrt2;
            let p_plus = (s.p1 + s.p2) * inv_sqrt2;
            let x_minus = (s.x1 - s.x2) * inv_sqrt2;
            let p_minus = (s.p1 - s.p2) * inv_sqrt2;
            (
                0.5 * (p_plus * p_plus + omega_plus * omega_plus * x_plus * x_plus),
                0.5 * (p_minus * p_minus + omega_minus * omega_minus * x_minus * x_minus),
            )
        })
        .collect())
}

//! Embedded Dormand-Prince 5(4) integrator with dense output.
//!
//! Limit cycles at Gamma ~ 0.01 require horizons of 10^3..10^4 cavity
//! lifetimes, so the step size adapts freely while samples are produced on
//! a fixed output grid through the order-4 continuous extension.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::SVector;

/// Tolerance and iteration limits for an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    /// The error controller pushed the step below the representable
    /// resolution of the current time; the problem is stiff or blowing up.
    StepSizeUnderflow { t: f64 },
    /// A state component left the finite range.
    NonFiniteState { t: f64 },
    MaxStepsExceeded,
    InvalidSpan,
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            OdeError::NonFiniteState { t } => write!(f, "non-finite state at t = {t}"),
            OdeError::MaxStepsExceeded => write!(f, "maximum step count exceeded"),
            OdeError::InvalidSpan => write!(f, "integration span or sample step not positive"),
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dense-output weights (Hairer, Norsett & Wanner, DOPRI5).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end`, returning the state on
/// the uniform grid `t0 + k * dt_sample` (every grid point up to and
/// including `t_end` within rounding).
pub fn integrate_sampled<const N: usize, F>(
    f: F,
    y0: SVector<f64, N>,
    t0: f64,
    t_end: f64,
    dt_sample: f64,
    controls: &Controls,
) -> Result<Vec<SVector<f64, N>>, OdeError>
where
    F: Fn(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    if !(t_end > t0) || !(dt_sample > 0.0) {
        return Err(OdeError::InvalidSpan);
    }
    let span = t_end - t0;
    let n_samples = libm::floor(span / dt_sample + 1e-9) as usize + 1;

    let mut samples = Vec::with_capacity(n_samples);
    samples.push(y0);
    let mut next_sample = 1usize;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t, &y, &k1, controls);

    let mut ks = [SVector::<f64, N>::zeros(); 7];
    let mut steps = 0usize;

    while next_sample < n_samples {
        if steps >= controls.max_steps {
            return Err(OdeError::MaxStepsExceeded);
        }
        steps += 1;

        if t + h > t_end {
            h = t_end - t;
        }
        if h <= f64::EPSILON * libm::fabs(t).max(1.0) {
            return Err(OdeError::StepSizeUnderflow { t });
        }

        ks[0] = k1;
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in ks.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    yi += kj * (h * a);
                }
            }
            ks[i] = f(t + C[i] * h, &yi);
        }
        // Stage 7 is evaluated at (t + h, y_new): FSAL.
        let y_new = {
            let mut yi = y;
            for (j, kj) in ks.iter().enumerate().take(6) {
                let a = A[6][j];
                if a != 0.0 {
                    yi += kj * (h * a);
                }
            }
            yi
        };

        let mut err_sq = 0.0;
        for c in 0..N {
            let mut e = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                e += E[j] * kj[c];
            }
            e *= h;
            let sc = controls.abs_tol + controls.rel_tol * libm::fabs(y[c]).max(libm::fabs(y_new[c]));
            err_sq += (e / sc) * (e / sc);
        }
        let err = libm::sqrt(err_sq / N as f64);

        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            return Err(OdeError::NonFiniteState { t });
        }

        if err <= 1.0 {
            // Accepted: emit all output points inside (t, t + h].
            let k_last = ks[6];
            let dy = y_new - y;
            let r3 = ks[0] * h - dy;
            let r4 = dy - k_last * h - r3;
            let mut r5 = SVector::<f64, N>::zeros();
            for (j, kj) in ks.iter().enumerate() {
                if D[j] != 0.0 {
                    r5 += kj * D[j];
                }
            }
            r5 *= h;

            while next_sample < n_samples {
                let ts = t0 + next_sample as f64 * dt_sample;
                if ts > t + h + 1e-12 * libm::fabs(t + h).max(1.0) {
                    break;
                }
                let theta = ((ts - t) / h).clamp(0.0, 1.0);
                let theta1 = 1.0 - theta;
                let interp = y + (dy + (r3 + (r4 + r5 * theta1) * theta) * theta1) * theta;
                samples.push(interp);
                next_sample += 1;
            }

            t += h;
            y = y_new;
            k1 = k_last;
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }

    Ok(samples)
}

/// Integrate to `t_end` and return only the final state.
pub fn integrate_to<const N: usize, F>(
    f: F,
    y0: SVector<f64, N>,
    t0: f64,
    t_end: f64,
    controls: &Controls,
) -> Result<SVector<f64, N>, OdeError>
where
    F: Fn(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let samples = integrate_sampled(f, y0, t0, t_end, t_end - t0, controls)?;
    Ok(*samples.last().expect("at least the initial sample"))
}

fn initial_step<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: &SVector<f64, N>,
    k1: &SVector<f64, N>,
    controls: &Controls,
) -> f64
where
    F: Fn(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    // Hairer's cheap starting-step heuristic.
    let sc = |y: &SVector<f64, N>| {
        let mut s = 0.0;
        for c in 0..N {
            let w = controls.abs_tol + controls.rel_tol * libm::fabs(y[c]);
            s += (y[c] / w) * (y[c] / w);
        }
        libm::sqrt(s / N as f64)
    };
    let d0 = sc(y0);
    let d1 = sc(k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = y0 + k1 * h0;
    let k2 = f(t0 + h0, &y1);
    let d2 = (k2 - k1).norm() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        libm::pow(0.01 / d1.max(d2), 0.2)
    };
    (100.0 * h0).min(h1)
}

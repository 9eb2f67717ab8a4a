//! Linearization around classical fixed points.
//!
//! Fluctuations are ordered as R = (dQ1, dP1, dQ2, dP2, dx1, dp1, dx2, dp2)
//! throughout the crate: optical quadrature pairs first, mechanical pairs
//! after. The drift uses the rotating-wave form of the mechanical
//! dissipation (drag in both the position and momentum rows), which is what
//! makes the steady covariance reach thermal equilibrium exactly.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Complex, OVector, SMatrix, U8};

use crate::params::{BathKind, ParamError, SystemParams};

pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Mat4 = SMatrix<f64, 4, 4>;
pub type Spectrum = OVector<Complex<f64>, U8>;

/// Real parts below this bound count as strictly stable.
pub const STABILITY_MARGIN: f64 = -1e-10;

const Q1: usize = 0;
const P1: usize = 1;
const Q2: usize = 2;
const P2: usize = 3;
const X1: usize = 4;
const PM1: usize = 5;
const X2: usize = 6;
const PM2: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum LinearError {
    Params(ParamError),
    /// The optical noise normalization carries a 1/power prefactor; the
    /// undriven system has no optical fluctuation dynamics to linearize.
    ZeroPower,
    /// The scan endpoints do not bracket a stability crossing.
    NoBracket,
    /// Normal-mode assembly is specific to the common bath.
    CommonBathOnly,
}

impl fmt::Display for LinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearError::Params(e) => write!(f, "{e}"),
            LinearError::ZeroPower => {
                write!(f, "noise matrix undefined at zero drive power")
            }
            LinearError::NoBracket => write!(f, "range does not bracket a stability crossing"),
            LinearError::CommonBathOnly => {
                write!(f, "normal-mode matrices require the common bath")
            }
        }
    }
}

impl From<ParamError> for LinearError {
    fn from(e: ParamError) -> Self {
        LinearError::Params(e)
    }
}

/// A symmetric classical fixed point (x1 = x2 = x_st, both momenta zero)
/// with its linear stability spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    /// Static mechanical displacement, common to both units.
    pub x_st: f64,
    /// Steady intracavity amplitude.
    pub a_st: Complex<f64>,
    /// Steady optical quadrature sqrt(2) Re a_st.
    pub q_st: f64,
    /// Steady optical quadrature sqrt(2) Im a_st.
    pub p_st: f64,
    /// Spectrum of the drift matrix at this point.
    pub eigenvalues: Spectrum,
    /// All real parts below [`STABILITY_MARGIN`].
    pub stable: bool,
}

impl FixedPoint {
    /// Steady intracavity photon number |a_st|^2.
    pub fn photon_number(&self) -> f64 {
        self.a_st.norm_sqr()
    }
}

/// Drift matrix of the linearized Langevin system.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub matrix: Mat8,
}

/// Symmetric diffusion matrix of the linearized Langevin system.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMatrix {
    pub matrix: Mat8,
}

fn steady_amplitude(x: f64, delta0: f64) -> Complex<f64> {
    Complex::new(0.5, 0.0) / Complex::new(0.5, -(delta0 + x))
}

/// Balance condition for the symmetric static displacement:
/// omega_m^2 x (1/4 + (Delta0 + x)^2) - P/4 = 0.
fn balance(x: f64, omega_sq: f64, delta0: f64, power: f64) -> f64 {
    let d = delta0 + x;
    omega_sq * x * (0.25 + d * d) - 0.25 * power
}

fn make_fixed_point(p: &SystemParams, x_st: f64) -> FixedPoint {
    let a_st = steady_amplitude(x_st, p.delta0);
    let sqrt2 = core::f64::consts::SQRT_2;
    let q_st = sqrt2 * a_st.re;
    let p_st = sqrt2 * a_st.im;
    let m = assemble_drift(p, x_st, q_st, p_st);
    let (eigenvalues, stable) = stability(&m);
    FixedPoint {
        x_st,
        a_st,
        q_st,
        p_st,
        eigenvalues,
        stable,
    }
}

/// All symmetric fixed points, sorted by displacement.
///
/// The balance condition is a cubic in x_st; its real roots (one to three)
/// are located by a dense bracketing scan and polished by bisection.
pub fn find_fixed_points(p: &SystemParams) -> Result<Vec<FixedPoint>, LinearError> {
    p.validate()?;
    let omega_m = p.omega_m()?;
    if p.power == 0.0 {
        return Ok(alloc::vec![make_fixed_point(p, 0.0)]);
    }
    let omega_sq = omega_m * omega_m;
    let f = |x: f64| balance(x, omega_sq, p.delta0, p.power);
    let hi = (2.0 * p.power / omega_sq).max(1.0);
    let lo = -1.0;
    let n = 20_000usize;
    let step = (hi - lo) / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut fa = f(lo);
    for i in 0..n {
        let b = lo + (i + 1) as f64 * step;
        let fb = f(b);
        if fa == 0.0 || fa * fb < 0.0 {
            let mut xa = lo + i as f64 * step;
            let mut xb = b;
            // 80 bisections take the bracket to full double precision.
            for _ in 0..80 {
                let mid = 0.5 * (xa + xb);
                if f(xa) * f(mid) <= 0.0 {
                    xb = mid;
                } else {
                    xa = mid;
                }
            }
            let r = 0.5 * (xa + xb);
            if roots.last().is_none_or(|last| (r - last).abs() > 1e-10) {
                roots.push(r);
            }
        }
        fa = fb;
    }
    debug_assert!(!roots.is_empty());
    Ok(roots.iter().map(|&x| make_fixed_point(p, x)).collect())
}

fn assemble_drift(p: &SystemParams, x_st: f64, q_st: f64, p_opt_st: f64) -> Mat8 {
    let mut m = Mat8::zeros();
    let d = p.delta0 + x_st;
    let omegas = [p.omega_m1, p.omega_m2];
    for j in 0..2 {
        let (iq, ip) = (2 * j, 2 * j + 1);
        let (ix, ipp) = (4 + 2 * j, 5 + 2 * j);
        m[(iq, iq)] = -0.5;
        m[(iq, ip)] = -d;
        m[(iq, ix)] = -p_opt_st;
        m[(ip, iq)] = d;
        m[(ip, ip)] = -0.5;
        m[(ip, ix)] = q_st;
        m[(ix, ipp)] = 1.0;
        m[(ipp, ix)] += -omegas[j] * omegas[j];
        // Spring force -(-1)^j K_c (x1 - x2) acting on unit j.
        let sgn = if j == 0 { -1.0 } else { 1.0 };
        m[(ipp, X1)] += sgn * p.k_c;
        m[(ipp, X2)] += -sgn * p.k_c;
        m[(ipp, iq)] += p.power * q_st;
        m[(ipp, ip)] += p.power * p_opt_st;
        match p.bath {
            BathKind::SeparateBaths => {
                m[(ix, ix)] += -p.gamma;
                m[(ipp, ipp)] += -p.gamma;
            }
            BathKind::CommonBath => {
                m[(ix, X1)] += -p.gamma;
                m[(ix, X2)] += -p.gamma;
                m[(ipp, PM1)] += -p.gamma;
                m[(ipp, PM2)] += -p.gamma;
            }
        }
    }
    m
}

pub fn drift_matrix(p: &SystemParams, fp: &FixedPoint) -> Result<DriftMatrix, LinearError> {
    p.validate()?;
    Ok(DriftMatrix {
        matrix: assemble_drift(p, fp.x_st, fp.q_st, fp.p_st),
    })
}

/// Diffusion matrix of the fluctuation noise, in the same ordering and
/// normalization as the drift (optical rows carry the sqrt(omega_m / P)
/// input-noise prefactor, mechanical momentum rows the omega_m prefactor).
pub fn noise_matrix(p: &SystemParams) -> Result<NoiseMatrix, LinearError> {
    p.validate()?;
    if p.power == 0.0 {
        return Err(LinearError::ZeroPower);
    }
    let mut n = Mat8::zeros();
    let s = p.gamma * (2.0 * p.n_th + 1.0);
    let omegas = [p.omega_m1, p.omega_m2];
    for j in 0..2 {
        let opt = 0.5 * omegas[j] / p.power;
        n[(2 * j, 2 * j)] = opt;
        n[(2 * j + 1, 2 * j + 1)] = opt;
        n[(4 + 2 * j, 4 + 2 * j)] = s;
        n[(5 + 2 * j, 5 + 2 * j)] = omegas[j] * omegas[j] * s;
    }
    if p.bath == BathKind::CommonBath {
        n[(X1, X2)] = s;
        n[(X2, X1)] = s;
        let cross = omegas[0] * omegas[1] * s;
        n[(PM1, PM2)] = cross;
        n[(PM2, PM1)] = cross;
    }
    Ok(NoiseMatrix { matrix: n })
}

/// Spectrum and the strict-stability verdict of a drift matrix.
pub fn stability(m: &Mat8) -> (Spectrum, bool) {
    let eig = m.complex_eigenvalues();
    let max_re = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    (eig, max_re < STABILITY_MARGIN)
}

fn leading_real_part(p: &SystemParams) -> Result<f64, LinearError> {
    // Stability of the fixed point closest to the undisplaced state.
    let fps = find_fixed_points(p)?;
    let fp = fps
        .iter()
        .min_by(|a, b| a.x_st.abs().total_cmp(&b.x_st.abs()))
        .expect("at least one fixed point");
    Ok(fp
        .eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Detuning at which the fixed point loses stability (Hopf crossing),
/// located by bisecting the leading real part over `[delta0_lo, delta0_hi]`.
pub fn hopf_scan(
    p: &SystemParams,
    delta0_lo: f64,
    delta0_hi: f64,
) -> Result<f64, LinearError> {
    if !(delta0_hi > delta0_lo) {
        return Err(LinearError::NoBracket);
    }
    let eval = |delta0: f64| -> Result<f64, LinearError> {
        leading_real_part(&SystemParams {
            delta0,
            ..p.clone()
        })
    };
    let mut lo = delta0_lo;
    let mut hi = delta0_hi;
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo * f_hi > 0.0 {
        return Err(LinearError::NoBracket);
    }
    let mut f_lo = f_lo;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Orthogonal change of basis to the mechanical normal modes
/// x± = (x1 ± x2)/sqrt(2); identity on the optical quadratures. The
/// normal-mode ordering is (dQ1, dP1, dQ2, dP2, x+, p+, x-, p-).
pub fn normal_mode_transform() -> Mat8 {
    let mut t = Mat8::zeros();
    for i in 0..4 {
        t[(i, i)] = 1.0;
    }
    let c = core::f64::consts::FRAC_1_SQRT_2;
    t[(4, X1)] = c;
    t[(4, X2)] = c;
    t[(5, PM1)] = c;
    t[(5, PM2)] = c;
    t[(6, X1)] = c;
    t[(6, X2)] = -c;
    t[(7, PM1)] = c;
    t[(7, PM2)] = -c;
    t
}

/// Drift and noise assembled directly in the normal-mode basis for the
/// common bath: only the + mode couples to the environment, damped at
/// 2 Gamma, while the - mode (frequency sqrt(omega_m^2 + 2 K_c)) stays
/// noiseless and undamped.
pub fn cb_normal_mode_matrices(
    p: &SystemParams,
    fp: &FixedPoint,
) -> Result<(Mat8, Mat8), LinearError> {
    p.validate()?;
    let omega_m = p.omega_m()?;
    if p.bath != BathKind::CommonBath {
        return Err(LinearError::CommonBathOnly);
    }
    if p.power == 0.0 {
        return Err(LinearError::ZeroPower);
    }
    let d = p.delta0 + fp.x_st;
    let c = core::f64::consts::FRAC_1_SQRT_2;
    let omega_minus_sq = omega_m * omega_m + 2.0 * p.k_c;

    let mut m = Mat8::zeros();
    for j in 0..2 {
        let (iq, ip) = (2 * j, 2 * j + 1);
        // dx_j = (x+ ± x-)/sqrt(2) enters the optical rows.
        let sgn = if j == 0 { 1.0 } else { -1.0 };
        m[(iq, iq)] = -0.5;
        m[(iq, ip)] = -d;
        m[(iq, 4)] = -fp.p_st * c;
        m[(iq, 6)] = -sgn * fp.p_st * c;
        m[(ip, iq)] = d;
        m[(ip, ip)] = -0.5;
        m[(ip, 4)] = fp.q_st * c;
        m[(ip, 6)] = sgn * fp.q_st * c;
    }
    m[(4, 4)] = -2.0 * p.gamma;
    m[(4, 5)] = 1.0;
    m[(5, 4)] = -omega_m * omega_m;
    m[(5, 5)] = -2.0 * p.gamma;
    m[(5, Q1)] = p.power * fp.q_st * c;
    m[(5, Q2)] = p.power * fp.q_st * c;
    m[(5, P1)] = p.power * fp.p_st * c;
    m[(5, P2)] = p.power * fp.p_st * c;
    m[(6, 7)] = 1.0;
    m[(7, 6)] = -omega_minus_sq;
    m[(7, Q1)] = p.power * fp.q_st * c;
    m[(7, Q2)] = -p.power * fp.q_st * c;
    m[(7, P1)] = p.power * fp.p_st * c;
    m[(7, P2)] = -p.power * fp.p_st * c;

    let mut n = Mat8::zeros();
    let opt = 0.5 * omega_m / p.power;
    for i in 0..4 {
        n[(i, i)] = opt;
    }
    let s = p.gamma * (2.0 * p.n_th + 1.0);
    n[(4, 4)] = 2.0 * s;
    n[(5, 5)] = 2.0 * omega_m * omega_m * s;

    Ok((m, n))
}

/// Drift and noise of the bare mechanical pair (no drive), ordering
/// (x1, p1, x2, p2). This is the linear system the steady-state pipeline
/// falls back to when the cavity is undriven.
pub fn mechanical_drift_noise(p: &SystemParams) -> Result<(Mat4, Mat4), LinearError> {
    p.validate()?;
    let mut m = Mat4::zeros();
    let omegas = [p.omega_m1, p.omega_m2];
    for j in 0..2 {
        let (ix, ip) = (2 * j, 2 * j + 1);
        m[(ix, ip)] = 1.0;
        m[(ip, ix)] += -omegas[j] * omegas[j];
        let sgn = if j == 0 { -1.0 } else { 1.0 };
        m[(ip, 0)] += sgn * p.k_c;
        m[(ip, 2)] += -sgn * p.k_c;
        match p.bath {
            BathKind::SeparateBaths => {
                m[(ix, ix)] += -p.gamma;
                m[(ip, ip)] += -p.gamma;
            }
            BathKind::CommonBath => {
                m[(ix, 0)] += -p.gamma;
                m[(ix, 2)] += -p.gamma;
                m[(ip, 1)] += -p.gamma;
                m[(ip, 3)] += -p.gamma;
            }
        }
    }
    let s = p.gamma * (2.0 * p.n_th + 1.0);
    let mut n = Mat4::zeros();
    for j in 0..2 {
        n[(2 * j, 2 * j)] = s;
        n[(2 * j + 1, 2 * j + 1)] = omegas[j] * omegas[j] * s;
    }
    if p.bath == BathKind::CommonBath {
        n[(0, 2)] = s;
        n[(2, 0)] = s;
        let cross = omegas[0] * omegas[1] * s;
        n[(1, 3)] = cross;
        n[(3, 1)] = cross;
    }
    Ok((m, n))
}

//! Steady-state covariance and Gaussian observables.
//!
//! The fluctuation state is fully described by the 8x8 covariance matrix in
//! the canonical ordering. Its steady state solves the Lyapunov equation
//! M C + C M^T + N = 0; entanglement and occupancy are read off 4x4 and 2x2
//! sub-blocks after per-mode normalization to vacuum variance 1/2.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector, SMatrix, SVector};

use crate::linear::{self, LinearError, Mat8};
use crate::ode::{self, Controls, OdeError};
use crate::params::{BathKind, ParamError, SystemParams};

pub type Mat4 = SMatrix<f64, 4, 4>;
pub type Mat2 = SMatrix<f64, 2, 2>;

#[derive(Debug, Clone, PartialEq)]
pub enum GaussianError {
    /// The drift matrix has a non-decaying direction; no steady state.
    UnstableDrift,
    /// The Lyapunov solve did not meet the residual bound.
    IllConditioned { residual: f64 },
    /// Requested sub-covariance violates the uncertainty bound.
    UnphysicalSubmatrix,
    /// Entanglement needs two distinct modes.
    DuplicateMode,
    /// Occupancy below zero beyond tolerance indicates a broken
    /// normalization upstream.
    NegativeOccupancy { value: f64 },
    /// No stable fixed point to linearize around.
    NoStableFixedPoint,
    /// Sub-matrix dimension is odd or empty.
    BadDimension,
    Ode(OdeError),
    Linear(LinearError),
    Params(ParamError),
}

impl fmt::Display for GaussianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussianError::UnstableDrift => write!(f, "drift matrix is not strictly stable"),
            GaussianError::IllConditioned { residual } => {
                write!(f, "Lyapunov residual {residual:e} exceeds tolerance")
            }
            GaussianError::UnphysicalSubmatrix => {
                write!(f, "sub-covariance violates the uncertainty bound")
            }
            GaussianError::DuplicateMode => write!(f, "mode pair must be distinct"),
            GaussianError::NegativeOccupancy { value } => {
                write!(f, "negative occupancy {value:e}")
            }
            GaussianError::NoStableFixedPoint => write!(f, "no stable fixed point"),
            GaussianError::BadDimension => write!(f, "covariance dimension must be even"),
            GaussianError::Ode(e) => write!(f, "{e}"),
            GaussianError::Linear(e) => write!(f, "{e}"),
            GaussianError::Params(e) => write!(f, "{e}"),
        }
    }
}

impl From<OdeError> for GaussianError {
    fn from(e: OdeError) -> Self {
        GaussianError::Ode(e)
    }
}

impl From<LinearError> for GaussianError {
    fn from(e: LinearError) -> Self {
        GaussianError::Linear(e)
    }
}

impl From<ParamError> for GaussianError {
    fn from(e: ParamError) -> Self {
        GaussianError::Params(e)
    }
}

/// Steady covariance tagged with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub matrix: Mat8,
    pub bath: BathKind,
    pub params_hash: u64,
}

/// One of the four bosonic modes in the canonical ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Optical1,
    Optical2,
    Mechanical1,
    Mechanical2,
}

impl Mode {
    /// (position-like, momentum-like) indices in the canonical ordering.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Mode::Optical1 => (0, 1),
            Mode::Optical2 => (2, 3),
            Mode::Mechanical1 => (4, 5),
            Mode::Mechanical2 => (6, 7),
        }
    }

    /// Scale factors taking the raw quadratures to vacuum variance 1/2.
    /// The optical rows of the linearized system carry a sqrt(omega_m/P)
    /// noise prefactor; undoing it needs sqrt(P/omega_m) on both
    /// quadratures. Mechanical momentum is divided by omega_m.
    fn scales(self, p: &SystemParams) -> (f64, f64) {
        match self {
            Mode::Optical1 => {
                let s = libm::sqrt(p.power / p.omega_m1);
                (s, s)
            }
            Mode::Optical2 => {
                let s = libm::sqrt(p.power / p.omega_m2);
                (s, s)
            }
            Mode::Mechanical1 => (1.0, 1.0 / p.omega_m1),
            Mode::Mechanical2 => (1.0, 1.0 / p.omega_m2),
        }
    }
}

/// Gaussian observables of a steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumResult {
    /// Logarithmic negativity of the mechanical pair.
    pub e_n_mech: f64,
    /// Logarithmic negativity of (optical 1, mechanical 1).
    pub e_n_optmech: f64,
    /// Effective phonon occupancy, averaged over the two oscillators.
    pub n_eff: f64,
    /// Infinity-norm residual of the Lyapunov solve, relative to ||N||.
    pub residual: f64,
}

const RESIDUAL_TOL: f64 = 1e-10;

/// Solve M C + C M^T + N = 0 for a strictly stable M by a dense Kronecker
/// linear solve; the problem size is fixed and tiny, so robustness wins
/// over asymptotics. Returns the symmetrized solution and the relative
/// residual.
fn lyapunov_dense(
    m: &DMatrix<f64>,
    n: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, f64), GaussianError> {
    let d = m.nrows();
    let max_re = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= linear::STABILITY_MARGIN {
        return Err(GaussianError::UnstableDrift);
    }
    let id = DMatrix::<f64>::identity(d, d);
    // vec(MC) = (I (x) M) vec C, vec(C M^T) = (M (x) I) vec C, column-major.
    let k = id.kronecker(m) + m.kronecker(&id);
    let rhs = DVector::from_iterator(d * d, n.iter().map(|v| -v));
    let x = k
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(GaussianError::IllConditioned { residual: f64::INFINITY })?;
    let c = DMatrix::from_iterator(d, d, x.iter().copied());
    let c = (&c + &c.transpose()) * 0.5;
    let res = (m * &c + &c * m.transpose() + n).amax() / n.amax();
    if !(res <= RESIDUAL_TOL) {
        return Err(GaussianError::IllConditioned { residual: res });
    }
    Ok((c, res))
}

/// Steady-state solution of the full 8x8 covariance equation.
pub fn lyapunov_steady(m: &Mat8, n: &Mat8) -> Result<(Mat8, f64), GaussianError> {
    let md = DMatrix::from_iterator(8, 8, m.iter().copied());
    let nd = DMatrix::from_iterator(8, 8, n.iter().copied());
    let (c, res) = lyapunov_dense(&md, &nd)?;
    Ok((Mat8::from_iterator(c.iter().copied()), res))
}

const TRI: usize = 36;

fn tri_pairs() -> [(usize, usize); TRI] {
    let mut pairs = [(0usize, 0usize); TRI];
    let mut k = 0;
    let mut i = 0;
    while i < 8 {
        let mut j = i;
        while j < 8 {
            pairs[k] = (i, j);
            k += 1;
            j += 1;
        }
        i += 1;
    }
    pairs
}

fn unpack(v: &SVector<f64, TRI>, pairs: &[(usize, usize); TRI]) -> Mat8 {
    let mut c = Mat8::zeros();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        c[(i, j)] = v[k];
        c[(j, i)] = v[k];
    }
    c
}

/// Integrate dC/dt = M C + C M^T + N from `c0` to `t_end`, propagating only
/// the upper triangle so the result is symmetric by construction.
pub fn evolve_covariance(
    c0: &Mat8,
    m: &Mat8,
    n: &Mat8,
    t_end: f64,
    controls: &Controls,
) -> Result<Mat8, GaussianError> {
    let pairs = tri_pairs();
    let c0_sym = (c0 + c0.transpose()) * 0.5;
    let mut y0 = SVector::<f64, TRI>::zeros();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        y0[k] = c0_sym[(i, j)];
    }
    let y_end = ode::integrate_to(
        |_t, y: &SVector<f64, TRI>| {
            let c = unpack(y, &pairs);
            let dc = m * c + c * m.transpose() + n;
            let mut dy = SVector::<f64, TRI>::zeros();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                dy[k] = dc[(i, j)];
            }
            dy
        },
        y0,
        0.0,
        t_end,
        controls,
    )?;
    Ok(unpack(&y_end, &pairs))
}

/// Positive symplectic spectrum of an even-dimensional covariance matrix,
/// ascending. The spectrum of i Omega C comes in +-nu pairs; the moduli are
/// collapsed pairwise.
pub fn symplectic_eigenvalues(c: &DMatrix<f64>) -> Result<Vec<f64>, GaussianError> {
    let d = c.nrows();
    if d == 0 || d % 2 != 0 || c.ncols() != d {
        return Err(GaussianError::BadDimension);
    }
    let mut omega = DMatrix::<f64>::zeros(d, d);
    for j in 0..d / 2 {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    let prod = omega * c;
    let mut moduli: Vec<f64> = prod
        .complex_eigenvalues()
        .iter()
        .map(|l| libm::sqrt(l.norm_sqr()))
        .collect();
    moduli.sort_by(f64::total_cmp);
    Ok((0..d / 2).map(|k| 0.5 * (moduli[2 * k] + moduli[2 * k + 1])).collect())
}

/// Normalized 4x4 covariance of a mode pair (vacuum variance 1/2 on every
/// quadrature).
pub fn mode_pair_covariance(
    c: &Mat8,
    a: Mode,
    b: Mode,
    p: &SystemParams,
) -> Result<Mat4, GaussianError> {
    if a == b {
        return Err(GaussianError::DuplicateMode);
    }
    let (ia, ja) = a.indices();
    let (ib, jb) = b.indices();
    let idx = [ia, ja, ib, jb];
    let (sa_q, sa_p) = a.scales(p);
    let (sb_q, sb_p) = b.scales(p);
    let s = [sa_q, sa_p, sb_q, sb_p];
    let mut out = Mat4::zeros();
    for r in 0..4 {
        for col in 0..4 {
            out[(r, col)] = s[r] * s[col] * c[(idx[r], idx[col])];
        }
    }
    Ok(out)
}

/// Logarithmic negativity of a two-mode covariance in vacuum-1/2 units:
/// E_N = max{0, -ln(2 nu-tilde)} with nu-tilde the smallest symplectic
/// eigenvalue of the partial transpose, from the standard invariants.
pub fn log_negativity_from_cov(c4: &Mat4) -> Result<f64, GaussianError> {
    let cd = DMatrix::from_iterator(4, 4, c4.iter().copied());
    let nus = symplectic_eigenvalues(&cd)?;
    if nus.iter().any(|&nu| nu < 0.5 - 1e-6) {
        return Err(GaussianError::UnphysicalSubmatrix);
    }
    let a = c4.fixed_view::<2, 2>(0, 0).into_owned();
    let b = c4.fixed_view::<2, 2>(2, 2).into_owned();
    let cc = c4.fixed_view::<2, 2>(0, 2).into_owned();
    let delta_pt = a.determinant() + b.determinant() - 2.0 * cc.determinant();
    let det4 = c4.determinant();
    let disc = (delta_pt * delta_pt - 4.0 * det4).max(0.0);
    let nu_sq = 0.5 * (delta_pt - libm::sqrt(disc));
    let nu = libm::sqrt(nu_sq.max(0.0));
    if nu <= 0.0 {
        // Partial transpose collapsed to a singular matrix; maximally
        // entangled limit is outside the physical set anyway.
        return Err(GaussianError::UnphysicalSubmatrix);
    }
    Ok((-libm::log(2.0 * nu)).max(0.0))
}

/// Logarithmic negativity between two modes of the full covariance.
pub fn log_negativity(
    c: &CovarianceMatrix,
    a: Mode,
    b: Mode,
    p: &SystemParams,
) -> Result<f64, GaussianError> {
    log_negativity_from_cov(&mode_pair_covariance(&c.matrix, a, b, p)?)
}

fn occupancy_from_block(xx: f64, pp: f64, xp: f64) -> Result<f64, GaussianError> {
    // Single-mode symplectic eigenvalue of the normalized 2x2 block; the
    // thermal state gives exactly n_th + 1/2.
    let det = (xx * pp - xp * xp).max(0.0);
    let n = libm::sqrt(det) - 0.5;
    if n < -1e-9 {
        return Err(GaussianError::NegativeOccupancy { value: n });
    }
    Ok(n.max(0.0))
}

/// Effective phonon occupancy of mechanical oscillator `mode`.
pub fn occupancy(
    c: &CovarianceMatrix,
    mode: Mode,
    p: &SystemParams,
) -> Result<f64, GaussianError> {
    let (omega, (ix, ip)) = match mode {
        Mode::Mechanical1 => (p.omega_m1, mode.indices()),
        Mode::Mechanical2 => (p.omega_m2, mode.indices()),
        _ => return Err(GaussianError::DuplicateMode),
    };
    let m = &c.matrix;
    occupancy_from_block(
        m[(ix, ix)],
        m[(ip, ip)] / (omega * omega),
        m[(ix, ip)] / omega,
    )
}

/// Steady covariance of the driven system around its stable fixed point
/// (the one with the smallest |x_st| when several are stable).
pub fn steady_covariance(p: &SystemParams) -> Result<CovarianceMatrix, GaussianError> {
    let (c, _res) = steady_covariance_with_residual(p)?;
    Ok(c)
}

fn steady_covariance_with_residual(
    p: &SystemParams,
) -> Result<(CovarianceMatrix, f64), GaussianError> {
    p.validate()?;
    let fps = linear::find_fixed_points(p)?;
    let fp = fps
        .iter()
        .filter(|fp| fp.stable)
        .min_by(|a, b| a.x_st.abs().total_cmp(&b.x_st.abs()))
        .ok_or(GaussianError::NoStableFixedPoint)?;
    let m = linear::drift_matrix(p, fp)?.matrix;
    let n = linear::noise_matrix(p)?.matrix;
    let (c, res) = lyapunov_steady(&m, &n)?;
    Ok((
        CovarianceMatrix {
            matrix: c,
            bath: p.bath,
            params_hash: p.fingerprint(),
        },
        res,
    ))
}

/// Full steady-state Gaussian observables.
///
/// For an undriven cavity (power = 0) the optical fluctuations have no
/// normalized representation; the mechanical 4x4 subsystem is solved on its
/// own and the optomechanical negativity is reported as zero. The undriven
/// common-bath pair has an undamped mode and therefore no steady state.
pub fn steady_observables(p: &SystemParams) -> Result<QuantumResult, GaussianError> {
    p.validate()?;
    if p.power == 0.0 {
        return undriven_observables(p);
    }
    let (c, residual) = steady_covariance_with_residual(p)?;
    let e_n_mech = log_negativity(&c, Mode::Mechanical1, Mode::Mechanical2, p)?;
    let e_n_optmech = log_negativity(&c, Mode::Optical1, Mode::Mechanical1, p)?;
    let n1 = occupancy(&c, Mode::Mechanical1, p)?;
    let n2 = occupancy(&c, Mode::Mechanical2, p)?;
    Ok(QuantumResult {
        e_n_mech,
        e_n_optmech,
        n_eff: 0.5 * (n1 + n2),
        residual,
    })
}

fn undriven_observables(p: &SystemParams) -> Result<QuantumResult, GaussianError> {
    let (m4, n4) = linear::mechanical_drift_noise(p)?;
    let md = DMatrix::from_iterator(4, 4, m4.iter().copied());
    let nd = DMatrix::from_iterator(4, 4, n4.iter().copied());
    let (c, residual) = lyapunov_dense(&md, &nd)?;
    let mut norm = Mat4::zeros();
    let scales = [1.0, 1.0 / p.omega_m1, 1.0, 1.0 / p.omega_m2];
    for r in 0..4 {
        for col in 0..4 {
            norm[(r, col)] = scales[r] * scales[col] * c[(r, col)];
        }
    }
    let e_n_mech = log_negativity_from_cov(&norm)?;
    let n1 = occupancy_from_block(norm[(0, 0)], norm[(1, 1)], norm[(0, 1)])?;
    let n2 = occupancy_from_block(norm[(2, 2)], norm[(3, 3)], norm[(2, 3)])?;
    Ok(QuantumResult {
        e_n_mech,
        e_n_optmech: 0.0,
        n_eff: 0.5 * (n1 + n2),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig4_params(bath: BathKind) -> SystemParams {
        SystemParams {
            omega_m1: 3.0,
            omega_m2: 3.0,
            gamma: 3.0e-5,
            k_c: 9.0,
            delta0: -3.0,
            power: 12.0,
            n_th: 9.508331944775,
            bath,
        }
    }

    fn squeezed_pair(r: f64) -> Mat4 {
        let ch = 0.5 * libm::cosh(2.0 * r);
        let sh = 0.5 * libm::sinh(2.0 * r);
        let mut c = Mat4::zeros();
        for i in 0..4 {
            c[(i, i)] = ch;
        }
        c[(0, 2)] = sh;
        c[(2, 0)] = sh;
        c[(1, 3)] = -sh;
        c[(3, 1)] = -sh;
        c
    }

    #[test]
    fn lyapunov_identity_case() {
        let m = Mat8::identity() * -0.5;
        let n = Mat8::identity();
        let (c, res) = lyapunov_steady(&m, &n).unwrap();
        assert!((c - Mat8::identity()).amax() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn lyapunov_refuses_unstable_drift() {
        let mut m = Mat8::identity() * -0.5;
        m[(0, 0)] = 1e-3;
        assert!(matches!(
            lyapunov_steady(&m, &Mat8::identity()),
            Err(GaussianError::UnstableDrift)
        ));
    }

    #[test]
    fn evolution_converges_to_lyapunov_solution() {
        // Same structure as the working point but a fast mechanical decay
        // so the transient dies within a short horizon.
        let mut p = fig4_params(BathKind::SeparateBaths);
        p.gamma = 0.1;
        p.n_th = 1.0;
        let fp = &linear::find_fixed_points(&p).unwrap()[0];
        let m = linear::drift_matrix(&p, fp).unwrap().matrix;
        let n = linear::noise_matrix(&p).unwrap().matrix;
        let (c_inf, _) = lyapunov_steady(&m, &n).unwrap();
        let c_t = evolve_covariance(&Mat8::zeros(), &m, &n, 400.0, &Controls::default()).unwrap();
        assert!(
            (c_t - c_inf).amax() < 1e-8,
            "max dev {}",
            (c_t - c_inf).amax()
        );
        assert!((c_t - c_t.transpose()).amax() == 0.0);
    }

    #[test]
    fn zero_noise_zero_state_stays_zero() {
        let m = Mat8::identity() * -0.5;
        let c = evolve_covariance(&Mat8::zeros(), &m, &Mat8::zeros(), 10.0, &Controls::default())
            .unwrap();
        assert_eq!(c.amax(), 0.0);
    }

    #[test]
    fn symplectic_spectrum_basics() {
        let vac = DMatrix::from_diagonal_element(2, 2, 0.5);
        assert_abs_diff_eq!(symplectic_eigenvalues(&vac).unwrap()[0], 0.5, epsilon = 1e-12);
        let th = DMatrix::from_diagonal_element(2, 2, 2.3);
        assert_abs_diff_eq!(symplectic_eigenvalues(&th).unwrap()[0], 2.3, epsilon = 1e-12);
        assert!(symplectic_eigenvalues(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn steady_state_is_physical() {
        let p = fig4_params(BathKind::CommonBath);
        let c = steady_covariance(&p).unwrap();
        assert_eq!(c.bath, BathKind::CommonBath);
        assert_eq!(c.params_hash, p.fingerprint());
        // Normalize all four modes and check the uncertainty bound.
        let mut norm = DMatrix::zeros(8, 8);
        let mut s = [0.0; 8];
        for mode in [Mode::Optical1, Mode::Optical2, Mode::Mechanical1, Mode::Mechanical2] {
            let (i, j) = mode.indices();
            let (sq, sp) = mode.scales(&p);
            s[i] = sq;
            s[j] = sp;
        }
        for r in 0..8 {
            for col in 0..8 {
                norm[(r, col)] = s[r] * s[col] * c.matrix[(r, col)];
            }
        }
        for nu in symplectic_eigenvalues(&norm).unwrap() {
            assert!(nu >= 0.5 - 1e-9, "symplectic eigenvalue {nu}");
        }
    }

    #[test]
    fn thermal_product_state_is_separable() {
        let mut c = Mat4::zeros();
        for i in 0..4 {
            c[(i, i)] = 1.7;
        }
        assert_eq!(log_negativity_from_cov(&c).unwrap(), 0.0);
    }

    #[test]
    fn two_mode_squeezing_closed_form() {
        for r in [0.1, 0.5, 1.2] {
            let en = log_negativity_from_cov(&squeezed_pair(r)).unwrap();
            assert_relative_eq!(en, 2.0 * r, max_relative = 1e-9);
        }
    }

    #[test]
    fn negativity_invariant_under_local_symplectics() {
        let base = squeezed_pair(0.5);
        let en0 = log_negativity_from_cov(&base).unwrap();
        // Rotation on mode A, single-mode squeezer on mode B.
        let th: f64 = 0.77;
        let s: f64 = 0.4;
        let mut local = Mat4::identity();
        local[(0, 0)] = libm::cos(th);
        local[(0, 1)] = libm::sin(th);
        local[(1, 0)] = -libm::sin(th);
        local[(1, 1)] = libm::cos(th);
        local[(2, 2)] = libm::exp(s);
        local[(3, 3)] = libm::exp(-s);
        let moved = local * base * local.transpose();
        let en1 = log_negativity_from_cov(&moved).unwrap();
        assert_relative_eq!(en0, en1, max_relative = 1e-9);
    }

    #[test]
    fn unphysical_submatrix_rejected() {
        let c = Mat4::identity() * 0.1;
        assert!(matches!(
            log_negativity_from_cov(&c),
            Err(GaussianError::UnphysicalSubmatrix)
        ));
    }

    #[test]
    fn working_point_observables() {
        let sb = steady_observables(&fig4_params(BathKind::SeparateBaths)).unwrap();
        let cb = steady_observables(&fig4_params(BathKind::CommonBath)).unwrap();
        assert_relative_eq!(sb.e_n_mech, 0.0944823, max_relative = 1e-4);
        assert_relative_eq!(cb.e_n_mech, 0.1818687, max_relative = 1e-4);
        assert_relative_eq!(sb.n_eff, 0.1307504, max_relative = 1e-4);
        assert_relative_eq!(cb.n_eff, 0.0723239, max_relative = 1e-4);
        // Shared bath: more entanglement, better cooling.
        assert!(cb.e_n_mech > sb.e_n_mech);
        assert!(cb.n_eff < sb.n_eff);
        assert!(sb.residual < 1e-10 && cb.residual < 1e-10);
        assert!(sb.e_n_optmech >= 0.0);
    }

    #[test]
    fn steady_state_basis_independence() {
        let p = fig4_params(BathKind::CommonBath);
        let fp = &linear::find_fixed_points(&p).unwrap()[0];
        let (m_nm, n_nm) = linear::cb_normal_mode_matrices(&p, fp).unwrap();
        let (c_nm, _) = lyapunov_steady(&m_nm, &n_nm).unwrap();
        let t = linear::normal_mode_transform();
        let c_back = t.transpose() * c_nm * t;
        let c = steady_covariance(&p).unwrap();
        assert!(
            (c_back - c.matrix).amax() < 1e-10,
            "max dev {}",
            (c_back - c.matrix).amax()
        );
    }

    #[test]
    fn undriven_uncoupled_pair_thermalizes() {
        let p = SystemParams {
            omega_m1: 3.0,
            omega_m2: 3.0,
            gamma: 3.0e-5,
            k_c: 0.0,
            delta0: -3.0,
            power: 0.0,
            n_th: 9.508331944775,
            bath: BathKind::SeparateBaths,
        };
        let r = steady_observables(&p).unwrap();
        assert_abs_diff_eq!(r.n_eff, p.n_th, epsilon = 1e-6);
        assert_eq!(r.e_n_mech, 0.0);
        assert_eq!(r.e_n_optmech, 0.0);

        // The undriven common-bath pair keeps an undamped mode.
        let cb = SystemParams {
            bath: BathKind::CommonBath,
            ..p
        };
        assert!(matches!(
            steady_observables(&cb),
            Err(GaussianError::UnstableDrift)
        ));
    }

    #[test]
    fn ground_state_occupancy_is_zero() {
        assert_eq!(occupancy_from_block(0.5, 0.5, 0.0).unwrap(), 0.0);
        assert!(occupancy_from_block(0.4, 0.4, 0.0).is_err());
    }

    #[test]
    fn heating_the_bath_never_helps_entanglement() {
        let mut last = f64::INFINITY;
        for n_th in [0.0, 2.0, 9.508331944775, 20.0, 50.0] {
            let mut p = fig4_params(BathKind::CommonBath);
            p.n_th = n_th;
            let r = steady_observables(&p).unwrap();
            assert!(r.e_n_mech <= last + 1e-12, "E_N rose with n_th = {n_th}");
            last = r.e_n_mech;
        }
    }
}

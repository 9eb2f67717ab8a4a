//! Derivative-free 1-D optimization of the steady-state observables.
//!
//! Objectives are smooth but the stable domain has holes (cells whose fixed
//! point is unstable), so every optimizer walks a coarse grid first and
//! only then refines the best bracket by golden section.

use std::fmt;

use ompair_core::gaussian::{self, GaussianError, QuantumResult};
use ompair_core::linear;
use ompair_core::params::{self, SystemParams};

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizeError {
    /// No grid point produced a stable steady state.
    AllUnstable,
    BadRange,
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizeError::AllUnstable => write!(f, "no stable cell in the search range"),
            OptimizeError::BadRange => write!(f, "invalid search range"),
        }
    }
}

/// One sampled point of a 1-D observable scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub x: f64,
    pub result: Result<QuantumResult, GaussianError>,
}

/// Location and value of an optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
    /// The coarse-grid winner sat on a range endpoint; the reported
    /// optimum may be range-limited.
    pub boundary_limited: bool,
}

/// Optima of both figure-of-merit observables over one swept variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimaPair {
    /// Argmax of the mechanical logarithmic negativity.
    pub entanglement: Optimum,
    /// Argmin of the effective occupancy.
    pub cooling: Optimum,
    /// Grid cells skipped for want of a stable fixed point.
    pub n_unstable: usize,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of `f` on `[lo, hi]`; `f` returning None
/// (unstable cell) is treated as +infinity.
fn golden_min<F: Fn(f64) -> Option<f64>>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let val = |x: f64| f(x).unwrap_or(f64::INFINITY);
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = val(x1);
    let mut f2 = val(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = val(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = val(x2);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, val(xm))
}

/// Scan `delta0` over `grid` and return every steady-state result.
pub fn scan<F: Fn(f64) -> SystemParams>(
    with_x: F,
    grid: &[f64],
) -> Vec<ScanPoint> {
    grid.iter()
        .map(|&x| ScanPoint {
            x,
            result: gaussian::steady_observables(&with_x(x)),
        })
        .collect()
}

fn refine_objective<F, G>(
    with_x: &F,
    grid: &[f64],
    points: &[ScanPoint],
    objective: G,
    tol: f64,
) -> Option<Optimum>
where
    F: Fn(f64) -> SystemParams,
    G: Fn(&QuantumResult) -> f64,
{
    // Grid minimum of the objective, then golden section between the
    // neighbors of the winning cell.
    let mut best: Option<(usize, f64)> = None;
    for (i, pt) in points.iter().enumerate() {
        if let Ok(r) = &pt.result {
            let v = objective(r);
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
    }
    let (i, _) = best?;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let f = |x: f64| {
        gaussian::steady_observables(&with_x(x))
            .ok()
            .map(|r| objective(&r))
    };
    let (x, v) = golden_min(f, lo, hi, tol);
    Some(Optimum {
        x,
        value: v,
        boundary_limited: i == 0 || i == grid.len() - 1,
    })
}

/// Optimize entanglement (max) and cooling (min) over a swept variable.
///
/// `with_x` builds the parameter set for a given value of the variable;
/// `grid` is the coarse scan; `tol` the refinement width.
pub fn optimize<F: Fn(f64) -> SystemParams + Sync>(
    with_x: F,
    grid: &[f64],
    tol: f64,
) -> Result<(OptimaPair, Vec<ScanPoint>), OptimizeError> {
    if grid.len() < 2 {
        return Err(OptimizeError::BadRange);
    }
    let points = scan(&with_x, grid);
    let n_unstable = points.iter().filter(|p| p.result.is_err()).count();
    let entanglement = refine_objective(&with_x, grid, &points, |r| -r.e_n_mech, tol)
        .ok_or(OptimizeError::AllUnstable)?;
    let cooling = refine_objective(&with_x, grid, &points, |r| r.n_eff, tol)
        .ok_or(OptimizeError::AllUnstable)?;
    Ok((
        OptimaPair {
            entanglement: Optimum {
                value: -entanglement.value,
                ..entanglement
            },
            cooling,
            n_unstable,
        },
        points,
    ))
}

/// Detuning optimization at fixed everything else.
pub fn optimize_detuning(
    p: &SystemParams,
    grid: &[f64],
    tol: f64,
) -> Result<(OptimaPair, Vec<ScanPoint>), OptimizeError> {
    let base = p.clone();
    optimize(
        move |delta0| SystemParams {
            delta0,
            ..base.clone()
        },
        grid,
        tol,
    )
}

/// Power optimization; optima are also annotated with the linear coupling
/// g/omega_m at the optimal drive.
pub fn optimize_power(
    p: &SystemParams,
    grid: &[f64],
    rel_tol: f64,
) -> Result<(OptimaPair, Vec<ScanPoint>, PowerCouplings), OptimizeError> {
    let base = p.clone();
    let with_x = move |power: f64| SystemParams {
        power,
        ..base.clone()
    };
    // Power grids span decades; the golden bracket width scales with the
    // local grid value.
    let scale = grid.iter().cloned().fold(f64::MIN, f64::max).abs().max(1.0);
    let (pair, points) = optimize(&with_x, grid, rel_tol * scale)?;
    let couplings = PowerCouplings {
        g_at_entanglement_opt: coupling_at(&with_x(pair.entanglement.x)),
        g_at_cooling_opt: coupling_at(&with_x(pair.cooling.x)),
    };
    Ok((pair, points, couplings))
}

/// g/omega_m at the two power optima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCouplings {
    pub g_at_entanglement_opt: f64,
    pub g_at_cooling_opt: f64,
}

fn coupling_at(p: &SystemParams) -> f64 {
    let Ok(fps) = linear::find_fixed_points(p) else {
        return f64::NAN;
    };
    let Some(fp) = fps
        .iter()
        .min_by(|a, b| a.x_st.abs().total_cmp(&b.x_st.abs()))
    else {
        return f64::NAN;
    };
    params::coupling_g(p, fp).unwrap_or(f64::NAN)
}

/// Which curve of a sideband scan a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    SeparateBaths,
    CommonBath,
    /// One isolated optomechanical unit (K_c = 0, separate baths); the
    /// reference curve of the cooling comparison.
    SingleUnit,
}

impl Curve {
    pub fn label(self) -> &'static str {
        match self {
            Curve::SeparateBaths => "sb",
            Curve::CommonBath => "cb",
            Curve::SingleUnit => "single",
        }
    }
}

/// Power-optimized observables at one mechanical frequency.
#[derive(Debug, Clone)]
pub struct SidebandRecord {
    pub curve: Curve,
    pub omega_m: f64,
    pub result: Result<(OptimaPair, PowerCouplings), OptimizeError>,
}

/// Optimize the drive power at each mechanical frequency for the SB pair,
/// the CB pair and the single-unit reference.
///
/// For each omega_m: Delta0 = -omega_m (red sideband), K_c = kc_ratio *
/// omega_m^2 (zero for the reference), Gamma = omega_m / q_factor, and the
/// power grid spans `power_span` (in units of omega_m^5, geometric).
pub fn sideband_scan(
    omegas: &[f64],
    kc_ratio: f64,
    q_factor: f64,
    n_th: f64,
    power_span: (f64, f64),
    grid_points: usize,
    rel_tol: f64,
) -> Vec<SidebandRecord> {
    let mut out = Vec::new();
    for &curve in &[Curve::SeparateBaths, Curve::CommonBath, Curve::SingleUnit] {
        for &omega_m in omegas {
            let p = SystemParams {
                omega_m1: omega_m,
                omega_m2: omega_m,
                gamma: omega_m / q_factor,
                k_c: match curve {
                    Curve::SingleUnit => 0.0,
                    _ => kc_ratio * omega_m * omega_m,
                },
                delta0: -omega_m,
                power: 1.0,
                n_th,
                bath: match curve {
                    Curve::CommonBath => ompair_core::params::BathKind::CommonBath,
                    _ => ompair_core::params::BathKind::SeparateBaths,
                },
            };
            let omega5 = omega_m.powi(5);
            let grid = crate::config::Axis {
                start: power_span.0 * omega5,
                stop: power_span.1 * omega5,
                count: grid_points,
                log: true,
            }
            .values();
            let result = optimize_power(&p, &grid, rel_tol).map(|(pair, _, g)| (pair, g));
            out.push(SidebandRecord {
                curve,
                omega_m,
                result,
            });
        }
    }
    out
}

//! Experiment drivers: each maps a resolved `Config` to CSV files in the
//! output directory. Sweeps run cell-parallel on a rayon pool; per-cell
//! failures become a `status` column so one bad cell never kills a sweep.

use std::path::Path;

use ompair_core::classical::{self, ClassicalState};
use ompair_core::gaussian::{self, QuantumResult};
use ompair_core::params::{BathKind, SystemParams};
use ompair_core::sync::{self, SyncCell, SyncSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Config;
use crate::optimize;
use crate::output::{self, num};

#[derive(Debug)]
pub enum RunError {
    Config(crate::config::ConfigError),
    Io(std::io::Error),
    /// The whole experiment failed, not just individual cells.
    Failed(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
            RunError::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Config(e)
    }
}

/// Build the rayon pool requested by `[run] workers` (0 = default size).
pub fn build_pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Failed(format!("thread pool: {e}")))
}

/// Deterministic per-cell initial condition. With `random_ic` the small
/// seed displacement is replaced by a draw from `seed` and the cell index,
/// so re-running a sweep reproduces the same trajectories.
fn cell_initial(cfg: &Config, cell_index: u64) -> ClassicalState {
    if !cfg.run.random_ic {
        return ClassicalState::small_displacement();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed ^ cell_index.wrapping_mul(0x9e3779b97f4a7c15));
    let mut u = || rng.random_range(-0.5..0.5);
    ClassicalState {
        x1: u(),
        p1: u(),
        x2: u(),
        p2: u(),
        ..ClassicalState::ZERO
    }
}

fn sync_settings(cfg: &Config) -> SyncSettings {
    cfg.sync.to_settings()
}

/// Integrate one trajectory of the base parameter set and write it out.
pub fn run_trajectory(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let traj = classical::integrate(
        &cell_initial(cfg, 0),
        &p,
        cfg.trajectory.t_end,
        cfg.trajectory.dt_sample,
        &sync_settings(cfg).controls,
    )
    .map_err(|e| RunError::Failed(format!("integration failed: {e:?}")))?;
    let energies = classical::mode_energies(&traj, &p)
        .map_err(|e| RunError::Failed(format!("{e:?}")))?;
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (e_plus, e_minus) = energies[i];
            vec![
                num(traj.time(i)),
                num(s.a1.re),
                num(s.a1.im),
                num(s.a2.re),
                num(s.a2.im),
                num(s.x1),
                num(s.p1),
                num(s.x2),
                num(s.p2),
                num(e_plus),
                num(e_minus),
            ]
        })
        .collect();
    output::write_csv(
        &dir.join("trajectory.csv"),
        &[
            "t", "re_a1", "im_a1", "re_a2", "im_a2", "x1", "p1", "x2", "p2", "e_plus", "e_minus",
        ],
        &rows,
    )?;
    Ok(())
}

fn sync_row(cell: &SyncCell) -> Vec<String> {
    match &cell.result {
        Ok(r) => vec![
            num(cell.d_omega),
            num(cell.k_c),
            num(r.c_zero),
            num(r.c_max),
            num(r.phase_lock),
            num(r.period),
            if r.synchronized { "1" } else { "0" }.into(),
            "ok".into(),
        ],
        Err(e) => vec![
            num(cell.d_omega),
            num(cell.k_c),
            "nan".into(),
            "nan".into(),
            "nan".into(),
            "nan".into(),
            "0".into(),
            format!("{e:?}"),
        ],
    }
}

const SYNC_HEADER: [&str; 8] = [
    "d_omega",
    "kc",
    "c_zero",
    "c_max",
    "phase_lock",
    "period",
    "synchronized",
    "status",
];

/// Parallel synchronization map over (d_omega, K_c); row-major, detuning
/// outer, matching the sequential sweep's ordering.
pub fn sync_map_parallel(
    p_base: &SystemParams,
    d_omegas: &[f64],
    k_cs: &[f64],
    settings: &SyncSettings,
    cfg: &Config,
) -> Vec<SyncCell> {
    let cells: Vec<(u64, f64, f64)> = d_omegas
        .iter()
        .flat_map(|&d| k_cs.iter().map(move |&k| (d, k)))
        .enumerate()
        .map(|(i, (d, k))| (i as u64, d, k))
        .collect();
    cells
        .par_iter()
        .map(|&(i, d_omega, k_c)| {
            let settings = SyncSettings {
                initial: cell_initial(cfg, i),
                ..settings.clone()
            };
            SyncCell {
                d_omega,
                k_c,
                result: sync::sync_cell(p_base, d_omega, k_c, &settings),
            }
        })
        .collect()
}

/// Phase-diagram sweep writing `syncmap.csv` plus a gnuplot helper.
pub fn run_syncmap(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let settings = sync_settings(cfg);
    let d_omegas = cfg.axes.dwm.values();
    let k_cs = cfg.axes.kc.values();
    let pool = build_pool(cfg.run.workers)?;
    let cells = pool.install(|| sync_map_parallel(&p, &d_omegas, &k_cs, &settings, cfg));
    if cells.iter().all(|c| c.result.is_err()) {
        return Err(RunError::Failed("every cell failed".into()));
    }
    let rows: Vec<Vec<String>> = cells.iter().map(sync_row).collect();
    output::write_csv(&dir.join("syncmap.csv"), &SYNC_HEADER, &rows)?;
    output::write_syncmap_plot(dir, "syncmap.csv")?;
    Ok(())
}

/// Minimum synchronizing coupling per detuning, by bisection over the
/// configured K_c range.
pub fn run_syncthreshold(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let settings = sync_settings(cfg);
    let d_omegas = cfg.axes.dwm.values();
    let (lo, hi) = (cfg.axes.kc.start, cfg.axes.kc.stop);
    let pool = build_pool(cfg.run.workers)?;
    let rows: Vec<Vec<String>> = pool.install(|| {
        d_omegas
            .par_iter()
            .map(|&d_omega| match sync::sync_threshold(&p, d_omega, lo, hi, &settings) {
                Ok(kc) => vec![num(d_omega), num(kc), "ok".into()],
                Err(e) => vec![num(d_omega), "nan".into(), format!("{e:?}")],
            })
            .collect()
    });
    if rows.iter().all(|r| r[2] != "ok") {
        return Err(RunError::Failed("no detuning produced a threshold".into()));
    }
    output::write_csv(&dir.join("syncthreshold.csv"), &["d_omega", "kc_min", "status"], &rows)?;
    Ok(())
}

fn quantum_row(prefix: &[String], r: &Result<QuantumResult, gaussian::GaussianError>) -> Vec<String> {
    let mut row = prefix.to_vec();
    match r {
        Ok(q) => {
            row.extend([
                num(q.e_n_mech),
                num(q.e_n_optmech),
                num(q.n_eff),
                num(q.residual),
                "ok".into(),
            ]);
        }
        Err(e) => {
            row.extend(["nan".into(), "nan".into(), "nan".into(), "nan".into(), format!("{e:?}")]);
        }
    }
    row
}

const QUANTUM_COLS: [&str; 5] = ["en_mech", "en_optmech", "n_eff", "residual", "status"];

/// Steady-state observables of the base point, one row per bath kind.
pub fn run_steady(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let mut rows = Vec::new();
    let mut any_ok = false;
    for bath in [BathKind::SeparateBaths, BathKind::CommonBath] {
        let p_bath = SystemParams { bath, ..p.clone() };
        let r = gaussian::steady_observables(&p_bath);
        any_ok |= r.is_ok();
        let label = match bath {
            BathKind::SeparateBaths => "sb",
            BathKind::CommonBath => "cb",
        };
        rows.push(quantum_row(&[label.to_string()], &r));
    }
    if !any_ok {
        return Err(RunError::Failed("no stable steady state for either bath".into()));
    }
    let header: Vec<&str> = ["bath"].iter().chain(QUANTUM_COLS.iter()).copied().collect();
    output::write_csv(&dir.join("steady.csv"), &header, &rows)?;
    Ok(())
}

fn write_scan_csv(
    dir: &Path,
    name: &str,
    var: &str,
    points: &[optimize::ScanPoint],
) -> Result<(), RunError> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|pt| quantum_row(&[num(pt.x)], &pt.result))
        .collect();
    let header: Vec<&str> = [var].iter().chain(QUANTUM_COLS.iter()).copied().collect();
    output::write_csv(&dir.join(name), &header, &rows)?;
    Ok(())
}

fn scan_parallel<F>(with_x: F, grid: &[f64], workers: usize) -> Result<Vec<optimize::ScanPoint>, RunError>
where
    F: Fn(f64) -> SystemParams + Sync,
{
    let pool = build_pool(workers)?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&x| optimize::ScanPoint {
                x,
                result: gaussian::steady_observables(&with_x(x)),
            })
            .collect()
    }))
}

/// Detuning sweep of the quantum observables for both bath kinds.
pub fn run_detuning_scan(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let grid = cfg.axes.delta0.values();
    for (bath, name) in [
        (BathKind::SeparateBaths, "detuning_scan_sb.csv"),
        (BathKind::CommonBath, "detuning_scan_cb.csv"),
    ] {
        let base = SystemParams { bath, ..p.clone() };
        let points = scan_parallel(
            |delta0| SystemParams { delta0, ..base.clone() },
            &grid,
            cfg.run.workers,
        )?;
        write_scan_csv(dir, name, "delta0", &points)?;
    }
    Ok(())
}

/// Drive-power sweep of the quantum observables for both bath kinds.
pub fn run_power_scan(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let grid = cfg.axes.power.values();
    for (bath, name) in [
        (BathKind::SeparateBaths, "power_scan_sb.csv"),
        (BathKind::CommonBath, "power_scan_cb.csv"),
    ] {
        let base = SystemParams { bath, ..p.clone() };
        let points = scan_parallel(
            |power| SystemParams { power, ..base.clone() },
            &grid,
            cfg.run.workers,
        )?;
        write_scan_csv(dir, name, "power", &points)?;
    }
    Ok(())
}

/// Optimal detuning for entanglement and cooling, both bath kinds.
pub fn run_optimize_detuning(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let grid = crate::config::Axis {
        count: cfg.optimize.grid,
        ..cfg.axes.delta0.clone()
    }
    .values();
    let mut rows = Vec::new();
    let mut any_ok = false;
    for bath in [BathKind::SeparateBaths, BathKind::CommonBath] {
        let p_bath = SystemParams { bath, ..p.clone() };
        let label = match bath {
            BathKind::SeparateBaths => "sb",
            BathKind::CommonBath => "cb",
        };
        match optimize::optimize_detuning(&p_bath, &grid, cfg.optimize.tol) {
            Ok((pair, points)) => {
                any_ok = true;
                write_scan_csv(dir, &format!("detuning_scan_{label}.csv"), "delta0", &points)?;
                rows.push(vec![
                    label.into(),
                    num(pair.entanglement.x),
                    num(pair.entanglement.value),
                    (pair.entanglement.boundary_limited as u8).to_string(),
                    num(pair.cooling.x),
                    num(pair.cooling.value),
                    (pair.cooling.boundary_limited as u8).to_string(),
                    pair.n_unstable.to_string(),
                    "ok".into(),
                ]);
            }
            Err(e) => rows.push(vec![
                label.into(),
                "nan".into(),
                "nan".into(),
                "0".into(),
                "nan".into(),
                "nan".into(),
                "0".into(),
                "0".into(),
                format!("{e:?}"),
            ]),
        }
    }
    if !any_ok {
        return Err(RunError::Failed("no stable cell in either scan".into()));
    }
    output::write_csv(
        &dir.join("optimal_detuning.csv"),
        &[
            "bath",
            "delta0_ent",
            "en_mech_max",
            "ent_boundary",
            "delta0_cool",
            "n_eff_min",
            "cool_boundary",
            "n_unstable",
            "status",
        ],
        &rows,
    )?;
    Ok(())
}

/// Power-optimized cooling and entanglement across mechanical frequencies
/// for the separate-bath pair, the common-bath pair and an uncoupled unit.
pub fn run_sideband_scan(cfg: &Config, dir: &Path) -> Result<(), RunError> {
    let p = cfg.params.to_system_params()?;
    let omegas = cfg.axes.omega_m.values();
    let q_factor = p.omega_m1 / p.gamma;
    let span = (cfg.axes.power.start, cfg.axes.power.stop);
    let pool = build_pool(cfg.run.workers)?;
    let records = pool.install(|| {
        optimize::sideband_scan(
            &omegas,
            cfg.optimize.kc_ratio,
            q_factor,
            p.n_th,
            span,
            cfg.optimize.grid,
            cfg.optimize.tol,
        )
    });
    if records.iter().all(|r| r.result.is_err()) {
        return Err(RunError::Failed("every frequency failed".into()));
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|rec| match &rec.result {
            Ok((pair, g)) => vec![
                rec.curve.label().into(),
                num(rec.omega_m),
                num(pair.cooling.x),
                num(pair.cooling.value),
                num(g.g_at_cooling_opt),
                num(pair.entanglement.x),
                num(pair.entanglement.value),
                num(g.g_at_entanglement_opt),
                pair.n_unstable.to_string(),
                "ok".into(),
            ],
            Err(e) => vec![
                rec.curve.label().into(),
                num(rec.omega_m),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "0".into(),
                format!("{e:?}"),
            ],
        })
        .collect();
    output::write_csv(
        &dir.join("sideband_scan.csv"),
        &[
            "curve",
            "omega_m",
            "power_cool",
            "n_eff_min",
            "g_ratio_cool",
            "power_ent",
            "en_mech_max",
            "g_ratio_ent",
            "n_unstable",
            "status",
        ],
        &rows,
    )?;
    Ok(())
}

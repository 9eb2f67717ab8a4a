//! Synchronization measures for the mechanical pair.
//!
//! The central quantity is the windowed Pearson correlation between x1(t)
//! and the delayed x2(t + tau), scanned over one oscillation period of
//! delays. Its maximum over tau classifies a cell of the phase diagram as
//! synchronized or not; the argmax gives the locked phase.

use alloc::vec::Vec;
use core::fmt;

use crate::classical::{self, ClassicalState, IntegrateError, Trajectory};
use crate::fft;
use crate::ode::Controls;
use crate::params::{ParamError, SystemParams};

#[derive(Debug, Clone, PartialEq)]
pub enum SyncError {
    /// Fewer than the minimum samples needed for a meaningful correlation.
    TooFewSamples,
    /// A window with (numerically) constant signal has no correlation.
    ZeroVariance,
    /// The spectrum has no clear oscillation line to define a period with.
    NoDominantPeak,
    /// The bisection endpoints do not bracket a synchronization transition.
    NoBracket,
    Integrate(IntegrateError),
    Params(ParamError),
}

impl fmt::Display for SyncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyncError::TooFewSamples => write!(f, "too few samples in the analysis window"),
            SyncError::ZeroVariance => write!(f, "signal variance vanishes in the window"),
            SyncError::NoDominantPeak => write!(f, "no dominant spectral peak"),
            SyncError::NoBracket => write!(f, "search range does not bracket the transition"),
            SyncError::Integrate(e) => write!(f, "{e}"),
            SyncError::Params(e) => write!(f, "{e}"),
        }
    }
}

impl From<IntegrateError> for SyncError {
    fn from(e: IntegrateError) -> Self {
        SyncError::Integrate(e)
    }
}

impl From<ParamError> for SyncError {
    fn from(e: ParamError) -> Self {
        SyncError::Params(e)
    }
}

/// Outcome of a delay-scanned correlation analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Pearson correlation at zero delay.
    pub c_zero: f64,
    /// Maximum correlation over the delay grid.
    pub c_max: f64,
    /// Delay at the maximum as a fraction of the period, in [0, 1).
    pub phase_lock: f64,
    /// Estimated oscillation period of x1.
    pub period: f64,
    /// `c_max >= threshold`.
    pub synchronized: bool,
}

/// Knobs of the synchronization pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncSettings {
    /// Transient discarded before analysis, in units of 1/Gamma.
    pub transient_damping_times: f64,
    /// Analysis window length in mechanical periods of unit 1.
    pub window_periods: f64,
    pub dt_sample: f64,
    pub n_delays: usize,
    /// Correlation level that counts as synchronized.
    pub threshold: f64,
    pub initial: ClassicalState,
    pub controls: Controls,
}

impl Default for SyncSettings {
    fn default() -> Self {
        SyncSettings {
            transient_damping_times: 50.0,
            window_periods: 50.0,
            dt_sample: 0.05,
            n_delays: 128,
            threshold: 0.9,
            initial: ClassicalState::small_displacement(),
            controls: Controls::default(),
        }
    }
}

const MIN_SAMPLES: usize = 10;

/// Wrap into [0, 1).
fn wrap_unit(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 { 0.0 } else { r }
}

/// Pearson correlation of two equal-grid windows.
pub fn pearson(x1: &[f64], x2: &[f64]) -> Result<f64, SyncError> {
    if x1.len() != x2.len() || x1.len() < MIN_SAMPLES {
        return Err(SyncError::TooFewSamples);
    }
    let n = x1.len() as f64;
    let m1 = x1.iter().sum::<f64>() / n;
    let m2 = x2.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for (a, b) in x1.iter().zip(x2) {
        let da = a - m1;
        let db = b - m2;
        cov += da * db;
        v1 += da * da;
        v2 += db * db;
    }
    if !(v1 > 0.0) || !(v2 > 0.0) {
        return Err(SyncError::ZeroVariance);
    }
    Ok((cov / libm::sqrt(v1 * v2)).clamp(-1.0, 1.0))
}

/// Dominant oscillation period of a uniformly sampled signal.
///
/// Spectral peak of the mean-removed, Hann-windowed signal, refined by
/// quadratic interpolation across the three bins around the maximum.
pub fn estimate_period(x: &[f64], dt: f64) -> Result<f64, SyncError> {
    if x.len() < 32 {
        return Err(SyncError::TooFewSamples);
    }
    if !(dt > 0.0) {
        return Err(SyncError::TooFewSamples);
    }
    let (power, n_fft) = fft::power_spectrum_hann(x);
    let (k, peak) = power
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, &p)| (k, p))
        .unwrap();
    let mean_power = power[1..].iter().sum::<f64>() / (power.len() - 1) as f64;
    if !(peak > 0.0) || peak < 10.0 * mean_power {
        return Err(SyncError::NoDominantPeak);
    }
    let shift = if k >= 1 && k + 1 < power.len() && power[k - 1] > 0.0 && power[k + 1] > 0.0 {
        // Log-parabolic refinement; the oversampled spectrum makes the
        // peak locally parabolic in log power.
        let (a, b, c) = (
            libm::log(power[k - 1]),
            libm::log(power[k]),
            libm::log(power[k + 1]),
        );
        let denom = a - 2.0 * b + c;
        if denom.abs() > 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let freq = (k as f64 + shift) / (n_fft as f64 * dt);
    if !(freq > 0.0) {
        return Err(SyncError::NoDominantPeak);
    }
    Ok(1.0 / freq)
}

/// Catmull-Rom evaluation of a uniform series at fractional index `u`,
/// clamped at the edges.
fn resample(y: &[f64], u: f64) -> f64 {
    let n = y.len();
    let u = u.clamp(0.0, (n - 1) as f64);
    let i = (libm::floor(u) as usize).min(n - 2);
    let t = u - i as f64;
    let at = |j: isize| y[j.clamp(0, n as isize - 1) as usize];
    let i = i as isize;
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    0.5 * (2.0 * p1
        + (p2 - p0) * t
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
        + (3.0 * p1 - p0 - 3.0 * p2 + p3) * t * t * t)
}

/// Scan the correlation between x1(t) and x2(t + tau) over one period of
/// delays. The trajectory must already have its transient removed.
pub fn delay_scan(traj: &Trajectory, settings: &SyncSettings) -> Result<SyncResult, SyncError> {
    let x1 = traj.x1_series();
    let x2 = traj.x2_series();
    let dt = traj.dt_sample;
    let period = estimate_period(&x1, dt)?;

    // Base window keeps full overlap with the delayed copy.
    let slack = libm::ceil(period / dt) as usize;
    if x1.len() <= slack + MIN_SAMPLES {
        return Err(SyncError::TooFewSamples);
    }
    let m = x1.len() - slack;
    let base = &x1[..m];

    let n_delays = settings.n_delays.max(2);
    let mut shifted = Vec::with_capacity(m);
    let mut c_zero = 0.0;
    let mut c_max = f64::NEG_INFINITY;
    let mut tau_max = 0.0;
    for k in 0..n_delays {
        let tau = period * k as f64 / (n_delays - 1) as f64;
        shifted.clear();
        shifted.extend((0..m).map(|i| resample(&x2, i as f64 + tau / dt)));
        let c = pearson(base, &shifted)?;
        if k == 0 {
            c_zero = c;
        }
        if c > c_max {
            c_max = c;
            tau_max = tau;
        }
    }
    let phase_lock = wrap_unit(tau_max / period);
    Ok(SyncResult {
        c_zero,
        c_max,
        phase_lock,
        period,
        synchronized: c_max >= settings.threshold,
    })
}

fn detuned(p: &SystemParams, d_omega: f64, k_c: f64) -> SystemParams {
    SystemParams {
        omega_m2: p.omega_m1 + d_omega,
        k_c,
        ..p.clone()
    }
}

/// Integrate one phase-diagram cell and run the delay scan on the
/// post-transient window.
pub fn sync_cell(
    p_base: &SystemParams,
    d_omega: f64,
    k_c: f64,
    settings: &SyncSettings,
) -> Result<SyncResult, SyncError> {
    let p = detuned(p_base, d_omega, k_c);
    p.validate()?;
    let t_transient = settings.transient_damping_times / p.gamma;
    let t_window = settings.window_periods * 2.0 * core::f64::consts::PI / p.omega_m1;
    let t_end = t_transient + t_window;
    let traj = classical::integrate(
        &settings.initial,
        &p,
        t_end,
        settings.dt_sample,
        &settings.controls,
    )?;
    delay_scan(&traj.tail_from(t_transient), settings)
}

/// One cell of a synchronization map.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncCell {
    pub d_omega: f64,
    pub k_c: f64,
    pub result: Result<SyncResult, SyncError>,
}

/// Sequential sweep over the (detuning, coupling) grid in row-major order
/// (detuning outer). Per-cell failures are recorded, not propagated.
pub fn sync_map(
    p_base: &SystemParams,
    d_omegas: &[f64],
    k_cs: &[f64],
    settings: &SyncSettings,
) -> Vec<SyncCell> {
    let mut cells = Vec::with_capacity(d_omegas.len() * k_cs.len());
    for &d_omega in d_omegas {
        for &k_c in k_cs {
            cells.push(SyncCell {
                d_omega,
                k_c,
                result: sync_cell(p_base, d_omega, k_c, settings),
            });
        }
    }
    cells
}

/// Minimum coupling that synchronizes the pair at fixed detuning, found by
/// bisecting the synchronized flag over `[k_c_lo, k_c_hi]`.
///
/// If the pair synchronizes already at `k_c_lo` the threshold is reported
/// as `k_c_lo` itself (in particular 0 when the range starts at 0).
pub fn sync_threshold(
    p_base: &SystemParams,
    d_omega: f64,
    k_c_lo: f64,
    k_c_hi: f64,
    settings: &SyncSettings,
) -> Result<f64, SyncError> {
    if !(k_c_hi > k_c_lo) || k_c_lo < 0.0 {
        return Err(SyncError::NoBracket);
    }
    let flag = |k_c: f64| -> Result<bool, SyncError> {
        Ok(sync_cell(p_base, d_omega, k_c, settings)?.synchronized)
    };
    if flag(k_c_lo)? {
        return Ok(k_c_lo);
    }
    if !flag(k_c_hi)? {
        return Err(SyncError::NoBracket);
    }
    let mut lo = k_c_lo;
    let mut hi = k_c_hi;
    while hi - lo > 1e-3 * hi.max(1e-12) {
        let mid = 0.5 * (lo + hi);
        if flag(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn tone_pair(phase: f64, n: usize, dt: f64) -> Trajectory {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                ClassicalState {
                    x1: libm::sin(t),
                    x2: libm::sin(t + phase),
                    ..ClassicalState::ZERO
                }
            })
            .collect();
        Trajectory {
            t0: 0.0,
            dt_sample: dt,
            samples,
        }
    }

    #[test]
    fn pearson_identity_and_antiphase() {
        let x: Vec<f64> = (0..200).map(|i| libm::sin(0.1 * i as f64)).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson(&x, &x).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pearson(&x, &neg).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_matches_two_pass_covariance() {
        // x2 = x1 + small uncorrelated wobble; compare against a direct
        // two-pass covariance evaluation.
        let n = 500;
        let x1: Vec<f64> = (0..n).map(|i| libm::sin(0.07 * i as f64)).collect();
        let x2: Vec<f64> = (0..n)
            .map(|i| libm::sin(0.07 * i as f64) + 0.05 * libm::cos(1.3 * i as f64))
            .collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (m1, m2) = (mean(&x1), mean(&x2));
        let cov = x1
            .iter()
            .zip(&x2)
            .map(|(a, b)| (a - m1) * (b - m2))
            .sum::<f64>()
            / n as f64;
        let var = |v: &[f64], m: f64| v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n as f64;
        let expected = cov / libm::sqrt(var(&x1, m1) * var(&x2, m2));
        assert_relative_eq!(pearson(&x1, &x2).unwrap(), expected, max_relative = 1e-12);
        assert!(pearson(&x1, &x2).unwrap() > 0.99);
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        let flat = vec![2.5; 100];
        let x: Vec<f64> = (0..100).map(|i| libm::sin(0.2 * i as f64)).collect();
        assert!(matches!(pearson(&flat, &x), Err(SyncError::ZeroVariance)));
        assert!(matches!(pearson(&x[..5], &x[..5]), Err(SyncError::TooFewSamples)));
        assert!(matches!(pearson(&x[..50], &x), Err(SyncError::TooFewSamples)));
    }

    #[test]
    fn pearson_invariance_under_affine_maps() {
        let x1: Vec<f64> = (0..300).map(|i| libm::sin(0.11 * i as f64)).collect();
        let x2: Vec<f64> = (0..300).map(|i| libm::cos(0.11 * i as f64 + 0.4)).collect();
        let base = pearson(&x1, &x2).unwrap();
        let scaled: Vec<f64> = x1.iter().map(|v| 3.7 * v + 11.0).collect();
        assert_abs_diff_eq!(pearson(&scaled, &x2).unwrap(), base, epsilon = 1e-12);
    }

    #[test]
    fn period_of_pure_tone() {
        let dt = 0.05;
        let x: Vec<f64> = (0..4000)
            .map(|i| libm::sin(2.0 * core::f64::consts::PI * i as f64 * dt / 7.0))
            .collect();
        let t = estimate_period(&x, dt).unwrap();
        assert_relative_eq!(t, 7.0, max_relative = 1e-3);
    }

    #[test]
    fn period_picks_stronger_of_two_tones() {
        let dt = 0.05;
        let x: Vec<f64> = (0..8000)
            .map(|i| {
                let t = i as f64 * dt;
                3.0 * libm::sin(2.0 * core::f64::consts::PI * t / 5.0)
                    + libm::sin(2.0 * core::f64::consts::PI * t / 1.618)
            })
            .collect();
        let t = estimate_period(&x, dt).unwrap();
        assert_relative_eq!(t, 5.0, max_relative = 1e-3);
    }

    #[test]
    fn period_fails_on_flat_signal() {
        let x = vec![1.0; 512];
        assert!(matches!(estimate_period(&x, 0.1), Err(SyncError::NoDominantPeak)));
    }

    #[test]
    fn delay_scan_antiphase_tone() {
        let traj = tone_pair(core::f64::consts::PI, 8000, 0.05);
        let r = delay_scan(&traj, &SyncSettings::default()).unwrap();
        assert_relative_eq!(r.period, 2.0 * core::f64::consts::PI, max_relative = 1e-3);
        assert!(r.c_max > 0.999);
        assert_abs_diff_eq!(r.phase_lock, 0.5, epsilon = 0.02);
        assert!(r.c_zero < -0.99);
        assert!(r.synchronized);
        assert!(r.c_zero <= r.c_max);
    }

    #[test]
    fn delay_scan_phase_matches_imposed_shift() {
        for frac in [0.1, 0.25, 0.7] {
            let traj = tone_pair(2.0 * core::f64::consts::PI * frac, 8000, 0.05);
            let r = delay_scan(&traj, &SyncSettings::default()).unwrap();
            // x2 leads by frac, so the matching delay is 1 - frac.
            let expected = wrap_unit(1.0 - frac);
            assert_abs_diff_eq!(r.phase_lock, expected, epsilon = 0.02);
        }
    }

    #[test]
    fn delay_scan_argument_swap_symmetry() {
        let frac: f64 = 0.3;
        let traj = tone_pair(2.0 * core::f64::consts::PI * frac, 8000, 0.05);
        let swapped = Trajectory {
            samples: traj.samples.iter().map(|s| s.swapped()).collect(),
            ..traj.clone()
        };
        let a = delay_scan(&traj, &SyncSettings::default()).unwrap();
        let b = delay_scan(&swapped, &SyncSettings::default()).unwrap();
        assert_abs_diff_eq!(a.c_max, b.c_max, epsilon = 1e-3);
        let sum = wrap_unit(a.phase_lock + b.phase_lock);
        assert!(sum < 0.03 || sum > 0.97, "phases {} {}", a.phase_lock, b.phase_lock);
    }
}

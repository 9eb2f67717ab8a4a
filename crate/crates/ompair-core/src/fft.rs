//! Radix-2 FFT, just enough for spectral period estimation.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Complex;

/// In-place iterative Cooley-Tukey transform; `buf.len()` must be a power
/// of two.
pub fn fft_in_place(buf: &mut [Complex<f64>]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }
    // Bit-reversal permutation.
    let shift = usize::BITS - n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * core::f64::consts::PI / len as f64;
        let w_len = Complex::new(libm::cos(ang), libm::sin(ang));
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex::new(1.0, 0.0);
            let half = len / 2;
            for k in 0..half {
                let u = chunk[k];
                let v = chunk[k + half] * w;
                chunk[k] = u + v;
                chunk[k + half] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

/// Power spectrum of the mean-removed, Hann-windowed signal, zero-padded
/// 4x beyond the next power of two so a local peak interpolation lands
/// within ~1e-5 of the true line frequency. Returns the
/// non-negative-frequency bins and the padded length; bin `k` sits at
/// frequency `k / (n_fft * dt)`.
pub fn power_spectrum_hann(x: &[f64]) -> (Vec<f64>, usize) {
    let n = x.len();
    let n_fft = 4 * n.next_power_of_two();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    for (i, v) in x.iter().enumerate() {
        let w = 0.5 - 0.5 * libm::cos(2.0 * core::f64::consts::PI * i as f64 / (n - 1) as f64);
        buf[i] = Complex::new((v - mean) * w, 0.0);
    }
    fft_in_place(&mut buf);
    let spectrum = buf[..n_fft / 2 + 1].iter().map(|c| c.norm_sqr()).collect();
    (spectrum, n_fft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matches_direct_dft() {
        let x: Vec<f64> = (0..16)
            .map(|i| libm::sin(0.7 * i as f64) + 0.3 * libm::cos(1.9 * i as f64))
            .collect();
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft_in_place(&mut buf);
        for k in 0..16 {
            let mut direct = Complex::new(0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let ang = -2.0 * core::f64::consts::PI * (k * i) as f64 / 16.0;
                direct += Complex::new(v * libm::cos(ang), v * libm::sin(ang));
            }
            assert_abs_diff_eq!(buf[k].re, direct.re, epsilon = 1e-10);
            assert_abs_diff_eq!(buf[k].im, direct.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn pure_tone_peaks_at_its_bin() {
        let n = 1000;
        let dt = 0.1;
        let f0 = 0.5;
        let x: Vec<f64> = (0..n)
            .map(|i| libm::sin(2.0 * core::f64::consts::PI * f0 * i as f64 * dt))
            .collect();
        let (p, n_fft) = power_spectrum_hann(&x);
        let k = p
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let f = k as f64 / (n_fft as f64 * dt);
        assert!((f - f0).abs() < 1.0 / (n as f64 * dt));
    }
}

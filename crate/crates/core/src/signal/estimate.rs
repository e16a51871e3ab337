use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::SampleWindow;
use crate::error::{Error, Result};

/// Minimum transform length; windows are zero-padded up to it.
pub const FFT_LEN: usize = 2048;
/// A peak must exceed the median off-peak magnitude by this factor.
pub const PEAK_TO_MEDIAN_MIN: f64 = 10.0;
/// Bins on each side of the peak left out of the off-peak median.
const PEAK_GUARD_BINS: usize = 3;

/// FFT peak picker with three-point parabolic refinement on the
/// log-magnitude spectrum.
pub struct FrequencyEstimator {
    fft: Arc<dyn Fft<f64>>,
    len: usize,
}

impl FrequencyEstimator {
    /// Estimator for windows of up to `samples` codes.
    pub fn new(samples: usize) -> Self {
        let len = samples.max(FFT_LEN).next_power_of_two();
        let fft = FftPlanner::new().plan_fft_forward(len);
        Self { fft, len }
    }

    pub fn fft_len(&self) -> usize {
        self.len
    }

    pub fn estimate(&self, window: &SampleWindow) -> Result<f64> {
        if !window.is_full() {
            return Err(Error::WindowNotFull {
                filled: window.stores() as usize,
                capacity: window.capacity(),
            });
        }
        let samples: Vec<f64> = window.chronological().map(f64::from).collect();
        self.estimate_samples(&samples, window.rate_hz())
    }

    /// Peak frequency of raw samples taken at `rate_hz`.
    pub fn estimate_samples(&self, samples: &[f64], rate_hz: f64) -> Result<f64> {
        assert!(samples.len() <= self.len, "window longer than the FFT");
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let mut buf: Vec<Complex<f64>> = samples
            .iter()
            .map(|&s| Complex::new(s - mean, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.len)
            .collect();
        self.fft.process(&mut buf);

        let half = self.len / 2;
        let mags: Vec<f64> = buf[..half].iter().map(|c| c.norm()).collect();
        let (peak_bin, peak) = mags
            .iter()
            .copied()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("spectrum has more than one bin");

        let mut off_peak: Vec<f64> = mags
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(k, _)| k.abs_diff(peak_bin) > PEAK_GUARD_BINS)
            .map(|(_, &m)| m)
            .collect();
        let median = median_in_place(&mut off_peak);
        if !(peak > 0.0 && peak >= PEAK_TO_MEDIAN_MIN * median) {
            return Err(Error::NoVibration { peak, median });
        }

        let offset = if peak_bin + 1 < half {
            parabolic_offset(mags[peak_bin - 1], peak, mags[peak_bin + 1])
        } else {
            0.0
        };
        Ok((peak_bin as f64 + offset) * rate_hz / self.len as f64)
    }
}

/// Vertex offset (in bins) of the parabola through three log-magnitudes.
fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    if left <= 0.0 || right <= 0.0 {
        return 0.0;
    }
    let (a, b, c) = (left.ln(), center.ln(), right.ln());
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

fn median_in_place(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Fundamental frequency of a full sample window.
pub fn estimate_frequency(window: &SampleWindow) -> Result<f64> {
    FrequencyEstimator::new(window.capacity()).estimate(window)
}

//! Frequency estimator checked against a brute-force oracle: the DTFT
//! magnitude of the mean-removed window evaluated on a 1 mHz grid.

use diacell::signal::{estimate_frequency, sample_window, AdcSpec, ExcitationSchedule, OptoSignalModel, SampleWindow};

const RATE: f64 = 2000.0;

fn dtft_peak(window: &SampleWindow, lo: f64, hi: f64, step: f64) -> f64 {
    let x: Vec<f64> = window.chronological().map(f64::from).collect();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut best = (lo, 0.0);
    let mut f = lo;
    while f <= hi {
        let w = 2.0 * std::f64::consts::PI * f / window.rate_hz();
        let (mut re, mut im) = (0.0, 0.0);
        for (n, v) in x.iter().enumerate() {
            let (s, c) = (w * n as f64).sin_cos();
            re += (v - mean) * c;
            im -= (v - mean) * s;
        }
        let mag = re.hypot(im);
        if mag > best.1 {
            best = (f, mag);
        }
        f += step;
    }
    best.0
}

/// A 16-bit ADC over a wide range stands in for an unquantized input.
fn fine_adc() -> AdcSpec {
    AdcSpec {
        bits: 16,
        v_lo: -1.25,
        v_hi: 1.25,
    }
}

fn window(f: f64, adc: &AdcSpec, model: &OptoSignalModel) -> SampleWindow {
    sample_window(f, model, adc, &ExcitationSchedule::default(), RATE).unwrap()
}

#[test]
fn matches_oracle_on_clean_signals() {
    for f in [150.0, 175.0, 191.0, 200.0, 210.0, 222.0, 236.0, 250.0, 300.0] {
        let w = window(f, &fine_adc(), &OptoSignalModel::default());
        let est = estimate_frequency(&w).unwrap();
        let oracle = dtft_peak(&w, f - 2.0, f + 2.0, 1e-3);
        assert!((est - f).abs() <= 0.5, "f={f} est={est}");
        assert!((oracle - f).abs() <= 0.5, "f={f} oracle={oracle}");
        assert!((est - oracle).abs() <= 0.5, "f={f} est={est} oracle={oracle}");
    }
}

#[test]
fn quantized_222_and_250() {
    for (f, tol) in [(222.0, 0.5), (250.0, 1.0)] {
        let w = window(f, &AdcSpec::default(), &OptoSignalModel::default());
        let est = estimate_frequency(&w).unwrap();
        let oracle = dtft_peak(&w, f - 2.0, f + 2.0, 1e-3);
        assert!((est - f).abs() <= tol, "f={f} est={est}");
        assert!((est - oracle).abs() <= tol, "f={f} est={est} oracle={oracle}");
    }
}

#[test]
fn noisy_quantized_accuracy() {
    for f in [150.0, 175.0, 191.0, 200.0, 222.0, 236.0, 250.0, 300.0] {
        let hits = (0..100u64)
            .filter(|&seed| {
                let model = OptoSignalModel {
                    noise_sigma: 0.01,
                    seed,
                    ..Default::default()
                };
                let est = estimate_frequency(&window(f, &AdcSpec::default(), &model));
                matches!(est, Ok(e) if (e - f).abs() <= 1.0)
            })
            .count();
        assert!(hits >= 95, "f={f}: {hits}/100 within 1 Hz");
    }
}

#[test]
fn deterministic_windows() {
    let model = OptoSignalModel {
        noise_sigma: 0.01,
        seed: 99,
        ..Default::default()
    };
    let a = window(222.0, &AdcSpec::default(), &model);
    let b = window(222.0, &AdcSpec::default(), &model);
    assert_eq!(a, b);
    assert_eq!(
        estimate_frequency(&a).unwrap().to_bits(),
        estimate_frequency(&b).unwrap().to_bits()
    );
}

#[test]
fn pure_noise_is_rejected() {
    let model = OptoSignalModel {
        a0: 0.0,
        noise_sigma: 0.05,
        seed: 3,
        ..Default::default()
    };
    assert!(estimate_frequency(&window(222.0, &AdcSpec::default(), &model)).is_err());
}

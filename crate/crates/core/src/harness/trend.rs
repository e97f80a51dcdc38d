//! Secular trend of an error series, with the periodic residual reported
//! separately.

use crate::error::{Error, Result};

const SECONDS_PER_DAY: f64 = 86_400.0;
/// Fewer samples than this are rejected.
pub const MIN_SAMPLES: usize = 100;
/// The window must cover at least this many periods.
pub const MIN_CYCLES: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trend {
    /// Value of the fitted line at the first sample.
    pub intercept: f64,
    /// Units per day.
    pub slope: f64,
    /// Standard error of the slope, assuming independent residuals.
    pub stderr: f64,
    /// RMS of the detrended series.
    pub residual_rms: f64,
    /// Half the peak-to-peak range of the detrended series.
    pub amplitude: f64,
}

/// Least-squares line through `(t, y)` with `t` in seconds. `period` is
/// the dominant periodic term, used only to check the window length.
pub fn fit_secular_trend(t: &[f64], y: &[f64], period: f64) -> Result<Trend> {
    if t.len() != y.len() {
        return Err(Error::InsufficientSamples(format!(
            "{} times for {} values",
            t.len(),
            y.len()
        )));
    }
    let n = t.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{n} samples, need {MIN_SAMPLES}"
        )));
    }
    let span = t[n - 1] - t[0];
    if !(period > 0.0) || span < MIN_CYCLES * period {
        return Err(Error::InsufficientSamples(format!(
            "window of {span} s covers fewer than {MIN_CYCLES} periods of {period} s"
        )));
    }
    let days: Vec<f64> = t.iter().map(|&ti| (ti - t[0]) / SECONDS_PER_DAY).collect();
    let nf = n as f64;
    let mx = days.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, v) in days.iter().zip(y) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (v - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (mut ss, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for (x, v) in days.iter().zip(y) {
        let r = v - intercept - slope * x;
        ss += r * r;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(Trend {
        intercept,
        slope,
        stderr: (ss / (nf - 2.0) / sxx).sqrt(),
        residual_rms: (ss / nf).sqrt(),
        amplitude: 0.5 * (hi - lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, step: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * step).collect()
    }

    proptest! {
        #[test]
        fn exact_line_is_recovered(a in -10.0f64..10.0, b in -5.0f64..5.0) {
            let t = grid(2000, 300.0);
            let y: Vec<f64> = t.iter().map(|&s| a + b * s / SECONDS_PER_DAY).collect();
            let fit = fit_secular_trend(&t, &y, 5000.0).unwrap();
            prop_assert!((fit.slope - b).abs() < 1e-12 * (1.0 + b.abs() + a.abs()));
            prop_assert!((fit.intercept - a).abs() < 1e-11 * (1.0 + a.abs() + b.abs()));
            prop_assert!(fit.amplitude < 1e-10 * (1.0 + a.abs() + b.abs()));
        }
    }

    fn sinusoid(phase: f64, amp: f64, period: f64, cycles: usize) -> (Vec<f64>, Vec<f64>) {
        let t = grid(cycles * 57 + 1, period / 57.0);
        let w = std::f64::consts::TAU / period;
        let y = t.iter().map(|&s| amp * (w * s + phase).cos()).collect();
        (t, y)
    }

    #[test]
    fn sinusoid_over_whole_cycles_has_no_trend() {
        let (period, amp) = (5677.0, 0.7);
        let (t, y) = sinusoid(0.0, amp, period, 100);
        let fit = fit_secular_trend(&t, &y, period).unwrap();
        assert!(fit.slope.abs() < 1e-3 * amp, "{fit:?}");
        assert!((fit.amplitude - amp).abs() < 1e-3 * amp, "{fit:?}");
        assert!(
            (fit.residual_rms - amp / 2f64.sqrt()).abs() < 1e-3 * amp,
            "{fit:?}"
        );
    }

    proptest! {
        // over a window T the odd part of a sinusoid leaks a slope of at most
        // 12 A / (ω T²), reached by sin(ω(t − t̄))
        #[test]
        fn sinusoid_slope_leak_is_bounded(phase in 0.0f64..std::f64::consts::TAU) {
            let (period, amp, cycles) = (5677.0, 0.7, 100);
            let (t, y) = sinusoid(phase, amp, period, cycles);
            let fit = fit_secular_trend(&t, &y, period).unwrap();
            let span = cycles as f64 * period;
            let bound = 12.0 * amp * period / (std::f64::consts::TAU * span * span) * SECONDS_PER_DAY;
            prop_assert!(fit.slope.abs() <= 1.01 * bound * phase.sin().abs() + 1e-12, "{fit:?} vs {bound}");
        }
    }

    #[test]
    fn short_windows_are_rejected() {
        let t = grid(50, 60.0);
        let y = vec![0.0; 50];
        assert!(matches!(
            fit_secular_trend(&t, &y, 5000.0),
            Err(Error::InsufficientSamples(_))
        ));
        let t = grid(500, 60.0);
        let y = vec![0.0; 500];
        assert!(matches!(
            fit_secular_trend(&t, &y, 5000.0),
            Err(Error::InsufficientSamples(_))
        ));
    }
}

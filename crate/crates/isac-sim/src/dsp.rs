//! Shared FFT plumbing: a process-wide plan cache over `rustfft`.
//!
//! Forward transforms use the engineering convention
//! `X[k] = sum_n x[n] exp(-j 2 pi k n / N)`; inverse transforms are the
//! unnormalized conjugate sum. Callers apply their own normalization.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanKey = (usize, bool);

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// In-place unnormalized forward DFT.
pub fn fft_inplace(buf: &mut [Complex64]) {
    let p = plan(buf.len(), false);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    p.process_with_scratch(buf, &mut scratch);
}

/// In-place unnormalized inverse DFT (no `1/N`).
pub fn ifft_inplace(buf: &mut [Complex64]) {
    let p = plan(buf.len(), true);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    p.process_with_scratch(buf, &mut scratch);
}

/// FFT-based correlator against a fixed real bipolar template, with the
/// template spectrum computed once.
///
/// `correlate` returns `out[k] = sum_t rec[t + k] * template[t]` for lags
/// `0 ..= max_lag`, taking the template as zero past the record end. The
/// FFT length is the smallest power of two holding `max_lag + template`
/// samples, which keeps the circular wrap-around away from every
/// requested lag; record samples beyond that length cannot contribute and
/// are dropped.
pub struct TemplateCorrelator {
    fft_len: usize,
    max_lag: usize,
    /// Conjugated template spectrum, pre-scaled by `1 / fft_len`.
    spectrum: Vec<Complex64>,
}

impl TemplateCorrelator {
    pub fn new(template: &[i8], max_lag: usize) -> TemplateCorrelator {
        let fft_len = (max_lag + template.len() + 1).next_power_of_two();
        let mut spectrum = vec![Complex64::default(); fft_len];
        for (t, &v) in template.iter().enumerate() {
            spectrum[t] = Complex64::new(f64::from(v), 0.0);
        }
        fft_inplace(&mut spectrum);
        let scale = 1.0 / fft_len as f64;
        for v in &mut spectrum {
            *v = v.conj() * scale;
        }
        TemplateCorrelator {
            fft_len,
            max_lag,
            spectrum,
        }
    }

    /// Correlate one record, reusing `work` as scratch. The result lives
    /// in `work[..=max_lag]` and is also returned as a slice.
    pub fn correlate_into<'a>(
        &self,
        rec: &[Complex64],
        work: &'a mut Vec<Complex64>,
    ) -> &'a [Complex64] {
        work.clear();
        work.resize(self.fft_len, Complex64::default());
        let used = rec.len().min(self.fft_len);
        work[..used].copy_from_slice(&rec[..used]);
        fft_inplace(work);
        for (x, y) in work.iter_mut().zip(&self.spectrum) {
            *x *= y;
        }
        ifft_inplace(work);
        &work[..=self.max_lag.min(rec.len().saturating_sub(1))]
    }
}

//! Single-exponential fit `x(t) ≈ a e^{iωt}` to a sampled mode amplitude.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative residual above which a fit is flagged as poor.
pub const POOR_FIT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyFit {
    pub omega: Complex64,
    pub amplitude: Complex64,
    pub rel_residual: f64,
    pub poor_fit: bool,
}

/// Fit `ω` and `a` from uniformly spaced samples `(t, x)`.
pub fn fit_mode_frequency(samples: &[(f64, Complex64)]) -> Result<FrequencyFit> {
    if samples.len() < 4 {
        return Err(Error::input("at least 4 samples are needed for a frequency fit"));
    }
    let dt = samples[1].0 - samples[0].0;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::input("sample times must be strictly increasing"));
    }
    for w in samples.windows(2) {
        if ((w[1].0 - w[0].0) - dt).abs() > 1e-9 * dt.max(w[1].0.abs()) {
            return Err(Error::input("sample times must be uniformly spaced"));
        }
    }
    if samples.iter().all(|(_, x)| x.norm() == 0.0) {
        return Err(Error::input("cannot fit a frequency to an all-zero signal"));
    }
    if samples.iter().any(|(_, x)| !x.is_finite()) {
        return Err(Error::numerical("non-finite sample in frequency fit"));
    }

    // one-step Prony estimate of z = e^{iω dt}
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for w in samples.windows(2) {
        num += w[1].1 * w[0].1.conj();
        den += w[0].1.norm_sqr();
    }
    let z = num / den;
    let mut omega = -I * z.ln() / dt;
    let t0 = samples[0].0;
    let mut amp = best_amplitude(samples, omega, t0);

    // Gauss-Newton on (a, ω) with the model a e^{iω(t − t0)}
    let mut cost = residual_norm_sqr(samples, amp, omega, t0);
    for _ in 0..50 {
        let (mut jtj, mut jtr) = ([[Complex64::new(0.0, 0.0); 2]; 2], [Complex64::new(0.0, 0.0); 2]);
        for &(t, x) in samples {
            let s = t - t0;
            let e = (I * omega * s).exp();
            let j = [e, amp * I * s * e];
            let r = x - amp * e;
            for a in 0..2 {
                jtr[a] += j[a].conj() * r;
                for b in 0..2 {
                    jtj[a][b] += j[a].conj() * j[b];
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let da = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dw = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let (na, nw) = (amp + da, omega + dw);
        let new_cost = residual_norm_sqr(samples, na, nw, t0);
        if !(new_cost < cost) {
            break;
        }
        let done = dw.norm() <= 1e-15 * nw.norm().max(1e-300);
        amp = na;
        omega = nw;
        cost = new_cost;
        if done {
            break;
        }
    }

    let scale: f64 = samples.iter().map(|(_, x)| x.norm_sqr()).sum();
    let rel_residual = (cost / scale).sqrt();
    Ok(FrequencyFit {
        omega,
        amplitude: amp * (-I * omega * t0).exp(),
        rel_residual,
        poor_fit: rel_residual > POOR_FIT_THRESHOLD,
    })
}

fn best_amplitude(samples: &[(f64, Complex64)], omega: Complex64, t0: f64) -> Complex64 {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for &(t, x) in samples {
        let e = (I * omega * (t - t0)).exp();
        num += e.conj() * x;
        den += e.norm_sqr();
    }
    num / den
}

fn residual_norm_sqr(samples: &[(f64, Complex64)], a: Complex64, omega: Complex64, t0: f64) -> f64 {
    samples
        .iter()
        .map(|&(t, x)| (x - a * (I * omega * (t - t0)).exp()).norm_sqr())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(a: Complex64, w: Complex64, t0: f64, dt: f64, n: usize) -> Vec<(f64, Complex64)> {
        (0..n)
            .map(|i| {
                let t = t0 + i as f64 * dt;
                (t, a * (I * w * t).exp())
            })
            .collect()
    }

    #[test]
    fn recovers_damped_exponential() {
        let a = Complex64::new(0.3, -1.2);
        let w = Complex64::new(0.8, 0.05);
        let fit = fit_mode_frequency(&signal(a, w, 2.0, 0.1, 40)).unwrap();
        assert!((fit.omega - w).norm() < 1e-12);
        assert!((fit.amplitude - a).norm() < 1e-10);
        assert!(!fit.poor_fit);
    }

    #[test]
    fn two_tones_flagged() {
        let mut s = signal(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 0.0, 0.2, 64);
        for (t, x) in s.iter_mut() {
            *x += 0.5 * (I * 2.1 * *t).exp();
        }
        assert!(fit_mode_frequency(&s).unwrap().poor_fit);
    }

    #[test]
    fn input_guards() {
        let s = signal(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 0.0, 0.1, 3);
        assert!(fit_mode_frequency(&s).unwrap_err().is_input());
        let mut s = signal(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 0.0, 0.1, 8);
        s[4].0 += 0.03;
        assert!(fit_mode_frequency(&s).unwrap_err().is_input());
        let z: Vec<_> = (0..8).map(|i| (i as f64, Complex64::new(0.0, 0.0))).collect();
        assert!(fit_mode_frequency(&z).unwrap_err().is_input());
    }
}

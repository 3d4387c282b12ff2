//! Closed-form noise figures for C-GHZ states.
//!
//! Everything here is a scalar formula in `(N, m, p)`. Powers in `N` are taken
//! as `exp(N * ln x)` with `ln x` formed through `ln_1p` of a small deficit, so
//! `N = 10^12` is as cheap and as accurate as `N = 2`.

use std::ops::RangeInclusive;

use crate::channels::{transfer_coefficients, NoiseParameter};
use crate::error::{Error, Result};
use crate::linalg::CompensatedSum;
use crate::states::BlockConfig;

/// Default search cap for [`distill_threshold`].
pub const DEFAULT_THRESHOLD_CAP: u64 = 1_000_000_000_000_000;

/// `sum_{k in ks} C(m,k) a^(m-k) b^k`, term by term in log space.
fn binomial_tail(m: usize, p: NoiseParameter, ks: impl Iterator<Item = usize>) -> f64 {
    let t = transfer_coefficients(p);
    let (ln_a, ln_b) = (t.a.ln(), t.b.ln());
    let ln_binom = ln_binomial_row(m);
    ks.map(|k| {
        if k > 0 && t.b == 0.0 {
            0.0
        } else {
            let bpow = if k == 0 { 0.0 } else { k as f64 * ln_b };
            (ln_binom[k] + (m - k) as f64 * ln_a + bpow).exp()
        }
    })
    .collect::<CompensatedSum>()
    .value()
}

/// `ln C(m, k)` for `k = 0..=m`.
pub(crate) fn ln_binomial_row(m: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    row.push(0.0);
    for k in 0..m {
        acc += ((m - k) as f64).ln() - ((k + 1) as f64).ln();
        row.push(acc);
    }
    row
}

/// `1 - ||E(|GHZ+><GHZ-|)||_1` for a single block of `m` qubits.
///
/// The depolarized cross term is diagonal-free within each doublet
/// `{x, complement(x)}`; its trace norm is
/// `sum_{k < m/2} C(m,k) |a^(m-k) b^k - a^k b^(m-k)|`, and the middle weight
/// `k = m/2` (even `m`) contributes nothing.
pub fn coherence_deficit_block(m: usize, p: NoiseParameter) -> f64 {
    let heavy = 2.0 * binomial_tail(m, p, (m / 2 + 1)..=m);
    let middle = if m.is_multiple_of(2) {
        binomial_tail(m, p, std::iter::once(m / 2))
    } else {
        0.0
    };
    (heavy + middle).min(1.0)
}

/// Trace norm of the depolarized single-block coherence operator
/// `E(|GHZ_m+><GHZ_m-|)`.
pub fn coherence_norm_block(m: usize, p: NoiseParameter) -> Result<f64> {
    if m == 0 {
        return Err(Error::input("block size must be at least 1"));
    }
    Ok(1.0 - coherence_deficit_block(m, p))
}

/// `1 - 2 sum_{k >= ceil(m/2)} C(m,k) a^(m-k) b^k`.
///
/// Agrees with [`coherence_norm_block`] for odd `m`. For even `m` it subtracts
/// the middle weight twice instead of once, so it undershoots the true trace
/// norm (e.g. `0.805` instead of `0.9` at `m = 2, p = 0.9`).
pub fn coherence_norm_block_tail_form(m: usize, p: NoiseParameter) -> Result<f64> {
    if m == 0 {
        return Err(Error::input("block size must be at least 1"));
    }
    Ok(1.0 - 2.0 * binomial_tail(m, p, m.div_ceil(2)..=m))
}

/// `||E(|phi_+><phi_-|)||_1 = coherence_norm_block(m, p)^N`.
pub fn coherence_norm(cfg: BlockConfig, p: NoiseParameter) -> f64 {
    let deficit = coherence_deficit_block(cfg.block_size, p);
    (cfg.blocks as f64 * (-deficit).ln_1p()).exp()
}

/// Stirling-type lower bound
/// `[1 - sqrt(2m/pi) (1 + 1/(11m)) (1 - p^2)^(m/2)]^N`.
///
/// Meaningful for weak noise only; it is returned as-is and can be negative
/// (or oscillate in sign with `N`) when the base is negative.
pub fn coherence_bound(cfg: BlockConfig, p: NoiseParameter) -> f64 {
    let m = cfg.block_size as f64;
    let q = p.p();
    let base = 1.0
        - (2.0 * m / std::f64::consts::PI).sqrt()
            * (1.0 + 1.0 / (11.0 * m))
            * (1.0 - q * q).powf(m / 2.0);
    base.powf(cfg.blocks as f64)
}

/// `x^n` given `ln x`, with `x^0 = 1` even when `x = 0`.
fn pow_from_ln(ln_x: f64, n: f64) -> f64 {
    if n == 0.0 {
        1.0
    } else {
        (n * ln_x).exp()
    }
}

/// `(ln d, ln(o/d))` where `d = a^m + b^m` and `o = a^m - b^m`.
fn ln_d_and_ratio(m: usize, p: NoiseParameter) -> (f64, f64) {
    let t = transfer_coefficients(p);
    // rho = (b/a)^m <= 1
    let rho = (m as f64 * (t.b / t.a).ln()).exp();
    let ln_d = m as f64 * t.a.ln() + rho.ln_1p();
    let ln_ratio = (-rho).ln_1p() - rho.ln_1p();
    (ln_d, ln_ratio)
}

fn distill_fidelity_at(blocks: f64, m: usize, p: NoiseParameter) -> f64 {
    let (ln_d, ln_r) = ln_d_and_ratio(m, p);
    let ln_coh = if p.p() == 0.0 {
        f64::NEG_INFINITY
    } else {
        2.0 * m as f64 * p.p().ln() - 2.0 * ln_d
    };
    let coh = ln_coh.exp();
    0.25 * (1.0 + coh * (1.0 + pow_from_ln(ln_r, blocks - 2.0)) + pow_from_ln(ln_r, blocks))
}

/// `F > 1/2` rewritten as `(N-2) ln r + ln(c + r^2) > ln(1 - c)` with
/// `c = p^(2m)/d^2` and `r = o/d`, which resolves the crossing where `F - 1/2`
/// itself is below `f64` resolution.
struct DistillCrossing {
    ln_r: f64,
    ln_lhs: f64,
    ln_one_minus_c: f64,
}

impl DistillCrossing {
    fn new(m: usize, p: NoiseParameter) -> Self {
        let (ln_d, ln_r) = ln_d_and_ratio(m, p);
        let q = p.p();
        let ln_pm = if q == 0.0 { f64::NEG_INFINITY } else { m as f64 * q.ln() };
        let ln_c = 2.0 * (ln_pm - ln_d);
        let d = ln_d.exp();
        let pm = ln_pm.exp();
        // 1 - c = (d - p^m)(d + p^m)/d^2
        let gap = if pm <= 0.5 * d { d - pm } else { d_minus_pm_series(m, p) };
        let ln_one_minus_c = if gap > 0.0 {
            gap.ln() + (d + pm).ln() - 2.0 * ln_d
        } else {
            f64::NEG_INFINITY
        };
        let (hi, lo) = if ln_c >= 2.0 * ln_r { (ln_c, 2.0 * ln_r) } else { (2.0 * ln_r, ln_c) };
        let ln_lhs = if hi == f64::NEG_INFINITY { hi } else { hi + (lo - hi).exp().ln_1p() };
        Self { ln_r, ln_lhs, ln_one_minus_c }
    }

    fn above_half(&self, blocks: u64) -> bool {
        if self.ln_one_minus_c == f64::NEG_INFINITY {
            return true;
        }
        let decay = if blocks == 2 { 0.0 } else { (blocks - 2) as f64 * self.ln_r };
        decay + self.ln_lhs > self.ln_one_minus_c
    }
}

/// `a^m + b^m - (a - b)^m` by binomial expansion, for `p^m` close to `d`.
fn d_minus_pm_series(m: usize, p: NoiseParameter) -> f64 {
    let t = transfer_coefficients(p);
    if t.b == 0.0 {
        return 0.0;
    }
    let (ln_a, ln_b) = (t.a.ln(), t.b.ln());
    let row = ln_binomial_row(m);
    let mut sum = CompensatedSum::default();
    sum.add((m as f64 * ln_b).exp());
    for (k, ln_c) in row.iter().enumerate().skip(1) {
        let term = (ln_c + (m - k) as f64 * ln_a + k as f64 * ln_b).exp();
        sum.add(if k % 2 == 1 { term } else { -term });
    }
    sum.value()
}

/// Fidelity with the logical Bell state `(|0_L 0_L> + |1_L 1_L>)/sqrt 2` of two
/// blocks left after projecting every block onto `{|0^m>, |1^m>}` and measuring
/// the other `N - 2` blocks:
///
/// ```text
/// F = 1/4 [1 + p^(2m)/d^2 (1 + (o/d)^(N-2)) + (o/d)^N]
/// d = a^m + b^m,  o = a^m - b^m
/// ```
pub fn distill_fidelity(cfg: BlockConfig, p: NoiseParameter) -> Result<f64> {
    if cfg.blocks < 2 {
        return Err(Error::input("distillation needs at least two blocks"));
    }
    Ok(distill_fidelity_at(cfg.blocks as f64, cfg.block_size, p))
}

/// Outcome of [`distill_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Threshold {
    /// Largest `N` with `F > 1/2`.
    Bounded(u64),
    /// `F > 1/2` at every `N` up to the cap.
    UnboundedInTestedRange { cap: u64 },
    /// `F <= 1/2` already at `N = 2`.
    NotDistillable,
}

/// Largest `N >= 2` with [`distill_fidelity`] `> 1/2`, searched up to
/// [`DEFAULT_THRESHOLD_CAP`].
pub fn distill_threshold(m: usize, p: NoiseParameter) -> Result<Threshold> {
    distill_threshold_with_cap(m, p, DEFAULT_THRESHOLD_CAP)
}

/// [`distill_threshold`] with an explicit cap. `F` is nonincreasing in `N`, so
/// the search doubles until it fails and then bisects.
pub fn distill_threshold_with_cap(m: usize, p: NoiseParameter, cap: u64) -> Result<Threshold> {
    if m == 0 {
        return Err(Error::input("block size must be at least 1"));
    }
    if cap < 2 {
        return Err(Error::input("threshold cap must be at least 2"));
    }
    let crossing = DistillCrossing::new(m, p);
    let good = |n: u64| crossing.above_half(n);
    if !good(2) {
        return Ok(Threshold::NotDistillable);
    }
    if good(cap) {
        return Ok(Threshold::UnboundedInTestedRange { cap });
    }
    let (mut lo, mut hi) = (2u64, 4u64.min(cap));
    while good(hi) {
        lo = hi;
        hi = hi.saturating_mul(2).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if good(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold::Bounded(lo))
}

/// `(o/d)^N`, evaluated in log space.
pub fn od_ratio_exact(m: usize, blocks: u64, p: NoiseParameter) -> f64 {
    let (_, ln_r) = ln_d_and_ratio(m, p);
    pow_from_ln(ln_r, blocks as f64)
}

/// Small-noise approximation `(o/d)^N ≈ 1 - 2 [e (1-p)/(1+p)]^m`, which
/// presumes `m ≈ ln N`. The `blocks` argument is unused by the formula and kept
/// for symmetry with [`od_ratio_exact`].
pub fn od_ratio_approx(m: usize, _blocks: u64, p: NoiseParameter) -> f64 {
    let q = p.p();
    1.0 - 2.0 * (std::f64::consts::E * (1.0 - q) / (1.0 + q)).powi(m as i32)
}

/// `|od_ratio_approx - od_ratio_exact|`.
pub fn od_ratio_approx_error(m: usize, blocks: u64, p: NoiseParameter) -> f64 {
    (od_ratio_approx(m, blocks, p) - od_ratio_exact(m, blocks, p)).abs()
}

/// Least-squares fit of `value ≈ amplitude * exp(-rate * N)`.
///
/// `rate` is reported unclamped: a growing series gives a negative rate.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FitResult {
    pub amplitude: f64,
    pub rate: f64,
    /// RMS of the residuals of `ln value`.
    pub residual: f64,
    /// Inclusive `N` range of the points used.
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits `ln value` linearly in `N` over `window`. Without a window, the last
/// half of the supplied `N` range is used.
pub fn fit_exponential_tail(
    points: &[(f64, f64)],
    window: Option<RangeInclusive<f64>>,
) -> Result<FitResult> {
    if let Some(&(n, v)) = points.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
        return Err(Error::input(format!("nonpositive value {v} at N = {n}")));
    }
    let window = window.unwrap_or_else(|| {
        let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        (lo + hi) / 2.0..=hi
    });
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| window.contains(n))
        .map(|&(n, v)| (n, v.ln()))
        .collect();
    if used.len() < 3 {
        return Err(Error::input(format!(
            "exponential fit needs at least 3 points in the window, got {}",
            used.len()
        )));
    }
    let k = used.len() as f64;
    let xm = used.iter().map(|u| u.0).collect::<CompensatedSum>().value() / k;
    let ym = used.iter().map(|u| u.1).collect::<CompensatedSum>().value() / k;
    let sxy: CompensatedSum = used.iter().map(|(x, y)| (x - xm) * (y - ym)).collect();
    let sxx: CompensatedSum = used.iter().map(|(x, _)| (x - xm) * (x - xm)).collect();
    if sxx.value() == 0.0 {
        return Err(Error::input("exponential fit needs at least two distinct N"));
    }
    let slope = sxy.value() / sxx.value();
    let intercept = ym - slope * xm;
    let ss: CompensatedSum = used
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .collect();
    let lo = used.iter().map(|u| u.0).fold(f64::INFINITY, f64::min);
    let hi = used.iter().map(|u| u.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        amplitude: intercept.exp(),
        rate: -slope,
        residual: (ss.value() / k).sqrt(),
        window: (lo, hi),
        points: used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn np(p: f64) -> NoiseParameter {
        NoiseParameter::new(p).unwrap()
    }

    fn cfg(n: usize, m: usize) -> BlockConfig {
        BlockConfig::new(n, m).unwrap()
    }

    #[test]
    fn block_norm_special_values() {
        for m in 1..=12 {
            assert_eq!(coherence_norm_block(m, np(1.0)).unwrap(), 1.0);
        }
        for p in [0.0, 0.3, 0.9] {
            assert!((coherence_norm_block(1, np(p)).unwrap() - p).abs() < 1e-15);
        }
        assert!((coherence_norm_block(2, np(0.9)).unwrap() - 0.9).abs() < 1e-15);
        assert!(coherence_norm_block(0, np(0.9)).is_err());
    }

    #[test]
    fn tail_form_matches_odd_and_undershoots_even() {
        assert!((coherence_norm_block_tail_form(2, np(0.9)).unwrap() - 0.805).abs() < 1e-14);
        for m in 1..=15 {
            for p in [0.2, 0.7, 0.9] {
                let exact = coherence_norm_block(m, np(p)).unwrap();
                let tail = coherence_norm_block_tail_form(m, np(p)).unwrap();
                if m % 2 == 1 {
                    assert!((exact - tail).abs() < 1e-14, "m={m} p={p}");
                } else {
                    assert!(exact - tail > 1e-6, "m={m} p={p}");
                }
            }
        }
    }

    #[test]
    fn block_norm_is_monotone_in_p_and_m() {
        let ps = [0.0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0];
        for m in 1..=20 {
            for w in ps.windows(2) {
                let lo = coherence_norm_block(m, np(w[0])).unwrap();
                let hi = coherence_norm_block(m, np(w[1])).unwrap();
                assert!(hi >= lo - 1e-15, "m={m} p={w:?}");
            }
        }
        for &p in &ps[..ps.len() - 1] {
            for m in 1..20 {
                let a = coherence_norm_block(m, np(p)).unwrap();
                let b = coherence_norm_block(m + 1, np(p)).unwrap();
                assert!(b >= a - 1e-15, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn coherence_norm_powers() {
        let v = coherence_norm(cfg(10, 1), np(0.9));
        assert!((v - 0.9f64.powi(10)).abs() < 1e-14);
        assert!((v - 0.34868).abs() < 1e-5);
        for m in 1..=6 {
            let b = coherence_norm_block(m, np(0.7)).unwrap();
            assert!((coherence_norm(cfg(1, m), np(0.7)) - b).abs() < 1e-15);
        }
        // N = 10^12 underflows gracefully instead of producing NaN
        let far = coherence_norm(cfg(1_000_000_000_000, 3), np(0.9));
        assert!(far.is_finite() && far >= 0.0);
    }

    #[test]
    fn bound_values() {
        assert_eq!(coherence_bound(cfg(7, 3), np(1.0)), 1.0);
        let expected = 1.0 - (2.0 / std::f64::consts::PI).sqrt() * (12.0 / 11.0) * 0.19f64.sqrt();
        let got = coherence_bound(cfg(1, 1), np(0.9));
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.6206).abs() < 1e-4);
    }

    #[test]
    fn bound_is_below_norm_for_weak_noise() {
        for p in [0.8, 0.9, 0.95, 0.99] {
            for m in 1..=10 {
                for n in [1, 10, 100] {
                    let c = cfg(n, m);
                    assert!(coherence_bound(c, np(p)) <= coherence_norm(c, np(p)), "{p} {m} {n}");
                }
            }
        }
    }

    #[test]
    fn bound_fails_outside_weak_noise() {
        // strong noise: the base goes negative, which is expected
        assert!(coherence_bound(cfg(1, 1), np(0.0)) > 0.0);
        assert!(coherence_bound(cfg(1, 4), np(0.0)) < 0.0);
    }

    #[test]
    fn distill_fidelity_values() {
        for (n, m) in [(2, 1), (5, 3), (40, 2)] {
            assert!((distill_fidelity(cfg(n, m), np(1.0)).unwrap() - 1.0).abs() < 1e-15);
            assert!((distill_fidelity(cfg(n, m), np(0.0)).unwrap() - 0.25).abs() < 1e-15);
        }
        let f = distill_fidelity(cfg(2, 1), np(0.9)).unwrap();
        assert!((f - (1.0 + 3.0 * 0.81) / 4.0).abs() < 1e-15);
        assert!((f - 0.8575).abs() < 1e-12);
        assert!(distill_fidelity(cfg(1, 3), np(0.9)).is_err());
    }

    #[test]
    fn distill_fidelity_m1_closed_form() {
        for n in 2..40 {
            let p: f64 = 0.9;
            let expected = (1.0 + p * p + 2.0 * p.powi(n as i32)) / 4.0;
            assert!((distill_fidelity(cfg(n, 1), np(p)).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn flagship_distillation_scale() {
        let f = distill_fidelity(cfg(1_000_000_000_000, 10), np(0.9)).unwrap();
        assert!((f - 0.57638).abs() < 1e-5, "{f}");
        match distill_threshold(10, np(0.9)).unwrap() {
            Threshold::Bounded(n) => assert!(n >= 1_000_000_000_000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn threshold_values() {
        assert_eq!(distill_threshold(1, np(0.9)).unwrap(), Threshold::Bounded(22));
        assert_eq!(
            distill_threshold(2, np(1.0 - 1e-6)).unwrap(),
            Threshold::Bounded(27_630_991_483_270)
        );
        assert_eq!(
            distill_threshold(3, np(1.0 - 1e-6)).unwrap(),
            Threshold::UnboundedInTestedRange { cap: DEFAULT_THRESHOLD_CAP }
        );
        assert_eq!(distill_threshold(1, np(0.5)).unwrap(), Threshold::NotDistillable);
        assert_eq!(distill_threshold_with_cap(1, np(0.9), 10).unwrap(), Threshold::UnboundedInTestedRange { cap: 10 });
        assert!(distill_threshold(0, np(0.9)).is_err());
    }

    #[test]
    fn threshold_matches_high_precision_values() {
        let cases = [
            (1, 0.9, 22),
            (2, 0.9, 398),
            (3, 0.8, 393),
            (4, 0.95, 2_623_319),
            (6, 0.9, 27_286_849),
            (10, 0.9, 2_164_999_764_247),
            (2, 0.999, 13_799_701),
        ];
        for (m, p, n) in cases {
            assert_eq!(distill_threshold(m, np(p)).unwrap(), Threshold::Bounded(n), "m={m} p={p}");
        }
    }

    #[test]
    fn threshold_is_the_crossing() {
        for m in 1..=4 {
            for p in [0.7, 0.8, 0.9] {
                if let Threshold::Bounded(n) = distill_threshold(m, np(p)).unwrap() {
                    let at = distill_fidelity(cfg(n as usize, m), np(p)).unwrap();
                    let after = distill_fidelity(cfg(n as usize + 1, m), np(p)).unwrap();
                    assert!(at > 0.5 && after <= 0.5, "m={m} p={p} n={n}");
                }
            }
        }
    }

    #[test]
    fn od_ratio_approximation() {
        assert_eq!(od_ratio_approx(4, 16, np(1.0)), 1.0);
        assert_eq!(od_ratio_exact(4, 16, np(1.0)), 1.0);
        assert!(od_ratio_approx_error(10, 1024, np(0.99)) < 0.05);
        let errs: Vec<f64> = [0.9, 0.95, 0.99, 0.999]
            .iter()
            .map(|&p| od_ratio_approx_error(3, 20, np(p)))
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
    }

    #[test]
    fn fit_recovers_generator() {
        let pts: Vec<(f64, f64)> = (10..=20).map(|n| (n as f64, 2.0 * (-0.3 * n as f64).exp())).collect();
        let fit = fit_exponential_tail(&pts, Some(10.0..=20.0)).unwrap();
        assert!((fit.rate - 0.3).abs() < 1e-12);
        assert!((fit.amplitude - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points, 11);
        assert_eq!(fit.window, (10.0, 20.0));
    }

    #[test]
    fn fit_default_window_is_last_half() {
        let pts: Vec<(f64, f64)> = (0..=20).map(|n| (n as f64, (-0.1 * n as f64).exp())).collect();
        let fit = fit_exponential_tail(&pts, None).unwrap();
        assert_eq!(fit.window, (10.0, 20.0));
    }

    #[test]
    fn fit_constant_and_errors() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|n| (n as f64, 0.7)).collect();
        assert!(fit_exponential_tail(&pts, Some(1.0..=5.0)).unwrap().rate.abs() < 1e-15);
        assert!(fit_exponential_tail(&pts[..2], Some(1.0..=5.0)).is_err());
        let bad = [(1.0, 1.0), (2.0, 0.0), (3.0, 0.5)];
        assert!(fit_exponential_tail(&bad, Some(1.0..=3.0)).is_err());
    }

    #[test]
    fn fit_of_coherence_decay() {
        let pts: Vec<(f64, f64)> = (5..=50).map(|n| (n as f64, coherence_norm(cfg(n, 1), np(0.9)))).collect();
        let fit = fit_exponential_tail(&pts, None).unwrap();
        assert!((fit.rate + 0.9f64.ln()).abs() < 1e-10);
        assert!((fit.rate - 0.10536).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn distill_fidelity_nonincreasing_in_n(m in 1usize..12, p in 0.0f64..1.0, n in 2usize..500) {
            let a = distill_fidelity(cfg(n, m), np(p)).unwrap();
            let b = distill_fidelity(cfg(n + 1, m), np(p)).unwrap();
            prop_assert!(b <= a + 1e-15);
            prop_assert!((0.25 - 1e-15..=1.0 + 1e-15).contains(&a));
        }

        #[test]
        fn block_norm_in_unit_interval(m in 1usize..64, p in 0.0f64..=1.0) {
            let v = coherence_norm_block(m, np(p)).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::special::{log10_normal_two_tailed, log10_student_t_two_tailed};
use super::{check_alpha, SignificanceResult, TestMethod};

pub const DEFAULT_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedOptions<F> {
    pub alpha: F,
    /// Bootstrap resample count.
    pub resamples: usize,
    /// Bootstrap seed; resample `i` draws from ChaCha stream `i` of this seed.
    pub seed: u64,
}

impl<F: Real> Default for PairedOptions<F> {
    fn default() -> Self {
        PairedOptions {
            alpha: F::c(super::DEFAULT_ALPHA),
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
        }
    }
}

/// Paired two-sided test on per-example scores aligned by index.
pub fn paired_test<F: Real>(
    scores_a: &[F],
    scores_b: &[F],
    method: TestMethod,
    opts: &PairedOptions<F>,
) -> Result<SignificanceResult<F>> {
    if scores_a.len() != scores_b.len() {
        return Err(Error::invalid(format!(
            "paired_test: length mismatch ({} vs {})",
            scores_a.len(),
            scores_b.len()
        )));
    }
    let n = scores_a.len();
    if n < 2 {
        return Err(Error::invalid("paired_test: need at least 2 pairs"));
    }
    if scores_a.iter().chain(scores_b).any(|x| !x.is_finite()) {
        return Err(Error::invalid("paired_test: scores must be finite"));
    }
    check_alpha(opts.alpha)?;
    let diffs: Vec<F> = scores_a.iter().zip(scores_b).map(|(&a, &b)| a - b).collect();
    if zero_variance(&diffs) {
        return Ok(SignificanceResult::degenerate(method, n, n, opts.alpha));
    }
    match method {
        TestMethod::PairedT => Ok(paired_t(&diffs, opts.alpha)),
        TestMethod::Wilcoxon => Ok(wilcoxon(&diffs, opts.alpha)),
        TestMethod::Bootstrap => bootstrap(&diffs, opts),
        TestMethod::TwoPropZ => Err(Error::invalid(
            "two-prop-z is not a paired test; use two_prop_z on counts",
        )),
    }
}

fn mean<F: Real>(xs: &[F]) -> F {
    xs.iter().fold(F::zero(), |acc, &x| acc + x) / F::count(xs.len())
}

fn sample_sd<F: Real>(xs: &[F], mean: F) -> F {
    let ss = xs.iter().fold(F::zero(), |acc, &x| acc + (x - mean) * (x - mean));
    (ss / F::count(xs.len() - 1)).sqrt()
}

/// Differences that agree up to accumulated rounding count as constant:
/// 0.95 - 0.55 and 0.9 - 0.5 differ in the last bit.
fn zero_variance<F: Real>(diffs: &[F]) -> bool {
    let scale = diffs.iter().fold(F::zero(), |acc, &d| acc.max(d.abs()));
    let m = mean(diffs);
    sample_sd(diffs, m) <= scale * F::epsilon() * F::c(64.0)
}

fn paired_t<F: Real>(diffs: &[F], alpha: F) -> SignificanceResult<F> {
    let n = diffs.len();
    let m = mean(diffs);
    let t = m / (sample_sd(diffs, m) / F::count(n).sqrt());
    let log10_p = log10_student_t_two_tailed(t, F::count(n - 1));
    SignificanceResult::from_log10(TestMethod::PairedT, t, log10_p, n, n, alpha)
}

/// Signed-rank test, normal approximation with tie correction and without
/// continuity correction. Zero differences are dropped. The statistic is the
/// standardized W+.
fn wilcoxon<F: Real>(diffs: &[F], alpha: F) -> SignificanceResult<F> {
    let n_total = diffs.len();
    let mut nonzero: Vec<F> = diffs.iter().copied().filter(|d| *d != F::zero()).collect();
    let n = nonzero.len();
    if n == 0 {
        return SignificanceResult::degenerate(TestMethod::Wilcoxon, n_total, n_total, alpha);
    }
    nonzero.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite"));
    let mut w_plus = F::zero();
    let mut tie_term = F::zero();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && nonzero[j + 1].abs() == nonzero[i].abs() {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their average
        let avg_rank = F::count(i + j + 2) / F::c(2.0);
        let ties = F::count(j - i + 1);
        tie_term = tie_term + ties * ties * ties - ties;
        for d in &nonzero[i..=j] {
            if *d > F::zero() {
                w_plus = w_plus + avg_rank;
            }
        }
        i = j + 1;
    }
    let nf = F::count(n);
    let expected = nf * (nf + F::one()) / F::c(4.0);
    let variance = nf * (nf + F::one()) * (F::c(2.0) * nf + F::one()) / F::c(24.0)
        - tie_term / F::c(48.0);
    if variance <= F::zero() {
        return SignificanceResult::degenerate(TestMethod::Wilcoxon, n_total, n_total, alpha);
    }
    let z = (w_plus - expected) / variance.sqrt();
    SignificanceResult::from_log10(
        TestMethod::Wilcoxon,
        z,
        log10_normal_two_tailed(z),
        n_total,
        n_total,
        alpha,
    )
}

/// Resamples the mean-centred differences and counts resample means at least
/// as extreme as the observed one; p = (count + 1) / (B + 1).
fn bootstrap<F: Real>(diffs: &[F], opts: &PairedOptions<F>) -> Result<SignificanceResult<F>> {
    if opts.resamples == 0 {
        return Err(Error::invalid("bootstrap needs at least one resample"));
    }
    let n = diffs.len();
    let observed = mean(diffs);
    let centred: Vec<F> = diffs.iter().map(|&d| d - observed).collect();
    let threshold = observed.abs();
    let extreme = (0..opts.resamples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let mut sum = F::zero();
            for _ in 0..n {
                sum = sum + centred[rng.gen_range(0..n)];
            }
            (sum / F::count(n)).abs() >= threshold
        })
        .count();
    let p = F::count(extreme + 1) / F::count(opts.resamples + 1);
    Ok(SignificanceResult::from_log10(
        TestMethod::Bootstrap,
        observed,
        p.log10(),
        n,
        n,
        opts.alpha,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(a: &[f64], b: &[f64], method: TestMethod) -> SignificanceResult<f64> {
        paired_test(a, b, method, &PairedOptions::default()).unwrap()
    }

    #[test]
    fn identical_samples_are_degenerate() {
        let a = [0.3, 0.5, 0.7];
        for m in [TestMethod::PairedT, TestMethod::Wilcoxon, TestMethod::Bootstrap] {
            let r = run(&a, &a, m);
            assert!(r.degenerate);
            assert_eq!(r.p_two_tailed, 1.0);
            assert!(!r.significant);
        }
    }

    #[test]
    fn constant_shift_is_degenerate() {
        let r = run(&[1.0; 4], &[0.0; 4], TestMethod::PairedT);
        assert!(r.degenerate);
        // differences are 0.4 up to rounding
        let r = run(
            &[0.9, 0.8, 0.95, 0.85, 0.9],
            &[0.5, 0.4, 0.55, 0.45, 0.5],
            TestMethod::PairedT,
        );
        assert!(r.degenerate);
    }

    #[test]
    fn paired_t_matches_oracle() {
        // scipy.stats.ttest_rel and a 60-digit incomplete-beta evaluation agree
        let r = run(
            &[0.9, 0.8, 0.95, 0.85, 0.9],
            &[0.5, 0.45, 0.55, 0.5, 0.52],
            TestMethod::PairedT,
        );
        assert!((r.statistic - 33.496_742_319_690_52).abs() < 1e-9);
        assert!((r.log10_p - -5.324_435_046_662_139).abs() < 1e-9);
        assert!((r.p_two_tailed - 4.737_671_597_709_5e-6).abs() < 1e-15);
    }

    #[test]
    fn paired_t_far_tail_in_log_space() {
        let a: Vec<f64> = (0..300).map(|i| 0.6 + 0.001 * (i % 17) as f64).collect();
        let b: Vec<f64> = (0..300).map(|i| 0.3 + 0.0015 * (i % 11) as f64).collect();
        let r = run(&a, &b, TestMethod::PairedT);
        assert!((r.statistic - 758.177_224_080_715_5).abs() < 1e-6);
        assert!((r.log10_p - -492.308_516_371_971_8).abs() < 1e-6);
        assert_eq!(r.p_two_tailed, 0.0);
        assert!(r.significant);
    }

    #[test]
    fn wilcoxon_matches_scipy() {
        let a = [0.9, 0.8, 0.95, 0.85, 0.9, 0.7, 0.6, 0.75];
        let b = [0.5, 0.8, 0.55, 0.45, 0.5, 0.72, 0.5, 0.35];
        let r = run(&a, &b, TestMethod::Wilcoxon);
        assert!((r.p_two_tailed - 0.026_879_244_697_072_476).abs() < 1e-12);
        assert_eq!((r.n1, r.n2), (8, 8));
    }

    #[test]
    fn bootstrap_is_seeded_and_smoothed() {
        let a = [0.9, 0.8, 0.95, 0.85, 0.9, 0.7, 0.6, 0.75];
        let b = [0.5, 0.8, 0.55, 0.45, 0.5, 0.72, 0.5, 0.35];
        let opts = PairedOptions {
            resamples: 2_000,
            seed: 7,
            ..PairedOptions::default()
        };
        let r1: SignificanceResult<f64> = paired_test(&a, &b, TestMethod::Bootstrap, &opts).unwrap();
        let r2 = paired_test(&a, &b, TestMethod::Bootstrap, &opts).unwrap();
        assert_eq!(r1.p_two_tailed.to_bits(), r2.p_two_tailed.to_bits());
        assert!(r1.p_two_tailed >= 1.0 / 2_001.0);
        assert!(r1.p_two_tailed < 0.05);
    }

    #[test]
    fn argument_errors() {
        let o = PairedOptions::<f64>::default();
        assert!(paired_test(&[1.0, 2.0], &[1.0], TestMethod::PairedT, &o).is_err());
        assert!(paired_test(&[1.0], &[1.0], TestMethod::PairedT, &o).is_err());
        assert!(paired_test(&[1.0, f64::NAN], &[1.0, 2.0], TestMethod::PairedT, &o).is_err());
        assert!(paired_test(&[1.0, 3.0], &[1.0, 2.0], TestMethod::TwoPropZ, &o).is_err());
    }
}

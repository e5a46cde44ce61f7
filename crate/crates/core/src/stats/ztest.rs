use crate::error::{Error, Result};
use crate::scalar::Real;

use super::special::log10_normal_two_tailed;
use super::{check_alpha, SignificanceResult, TestMethod};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZTestOptions<F> {
    pub alpha: F,
    /// Shrink |p1 - p2| by (1/n1 + 1/n2)/2 before standardizing.
    pub continuity_correction: bool,
}

impl<F: Real> Default for ZTestOptions<F> {
    fn default() -> Self {
        ZTestOptions {
            alpha: F::c(super::DEFAULT_ALPHA),
            continuity_correction: false,
        }
    }
}

/// Pooled two-proportion z-test of k1/n1 against k2/n2.
pub fn two_prop_z<F: Real>(
    k1: usize,
    n1: usize,
    k2: usize,
    n2: usize,
    opts: &ZTestOptions<F>,
) -> Result<SignificanceResult<F>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid("two_prop_z: sample sizes must be positive"));
    }
    if k1 > n1 || k2 > n2 {
        return Err(Error::invalid(format!(
            "two_prop_z: successes exceed trials ({k1}/{n1}, {k2}/{n2})"
        )));
    }
    check_alpha(opts.alpha)?;
    let (fk1, fn1, fk2, fn2) = (F::count(k1), F::count(n1), F::count(k2), F::count(n2));
    let pooled = F::count(k1 + k2) / F::count(n1 + n2);
    if pooled == F::zero() || pooled == F::one() {
        // both proportions are equal, nothing to standardize
        return Ok(SignificanceResult::from_log10(
            TestMethod::TwoPropZ,
            F::zero(),
            F::zero(),
            n1,
            n2,
            opts.alpha,
        ));
    }
    let inv_n = fn1.recip() + fn2.recip();
    let se = (pooled * (F::one() - pooled) * inv_n).sqrt();
    let mut diff = fk1 / fn1 - fk2 / fn2;
    if opts.continuity_correction {
        let shrink = (diff.abs() - inv_n / F::c(2.0)).max(F::zero());
        diff = diff.signum() * shrink;
    }
    let z = diff / se;
    Ok(SignificanceResult::from_log10(
        TestMethod::TwoPropZ,
        z,
        log10_normal_two_tailed(z),
        n1,
        n2,
        opts.alpha,
    ))
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Plateau threshold for metrics that live in [0, 1].
pub const EPSILON_UNIT_METRIC: f64 = 0.02;
/// Plateau threshold for parse counts.
pub const EPSILON_COUNT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalGain<F> {
    pub from_size: u32,
    pub to_size: u32,
    pub delta: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyCurve<F> {
    pub metric: String,
    pub epsilon: F,
    pub points: Vec<(u32, F)>,
    pub marginal_gains: Vec<MarginalGain<F>>,
    pub plateau_size: Option<u32>,
}

impl<F: Real> EfficiencyCurve<F> {
    pub fn plateau_value(&self) -> Option<F> {
        let size = self.plateau_size?;
        self.points.iter().find(|(s, _)| *s == size).map(|(_, v)| *v)
    }
}

/// Consecutive gains and the plateau: the smallest size after which every
/// step gains less than `epsilon`. No plateau if only the last point qualifies.
pub fn efficiency_curve<F: Real>(
    metric: impl Into<String>,
    points: &[(u32, F)],
    epsilon: F,
) -> Result<EfficiencyCurve<F>> {
    if points.len() < 2 {
        return Err(Error::invalid("efficiency_curve needs at least 2 points"));
    }
    if let Some(w) = points.windows(2).find(|w| w[0].0 >= w[1].0) {
        return Err(Error::invalid(format!(
            "train sizes must be strictly increasing ({} then {})",
            w[0].0, w[1].0
        )));
    }
    if !(epsilon > F::zero()) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let marginal_gains: Vec<MarginalGain<F>> = points
        .windows(2)
        .map(|w| MarginalGain {
            from_size: w[0].0,
            to_size: w[1].0,
            delta: w[1].1 - w[0].1,
        })
        .collect();
    // first index from which all remaining steps are below epsilon
    let flat_from = marginal_gains
        .iter()
        .rposition(|g| !(g.delta < epsilon))
        .map_or(0, |i| i + 1);
    let plateau_size = (flat_from + 1 < points.len()).then(|| points[flat_from].0);
    Ok(EfficiencyCurve {
        metric: metric.into(),
        epsilon,
        points: points.to_vec(),
        marginal_gains,
        plateau_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_count_curve_plateaus_at_three_hundred() {
        let c = efficiency_curve(
            "parse-count",
            &[(100, 144.0), (300, 267.0), (500, 282.0), (1000, 288.0)],
            EPSILON_COUNT,
        )
        .unwrap();
        assert_eq!(c.plateau_size, Some(300));
        assert_eq!(c.plateau_value(), Some(267.0));
        let deltas: Vec<f64> = c.marginal_gains.iter().map(|g| g.delta).collect();
        assert_eq!(deltas, [123.0, 15.0, 6.0]);
    }

    #[test]
    fn flat_and_rising_curves() {
        let flat = efficiency_curve("m", &[(100, 0.5), (300, 0.5), (500, 0.5)], 0.02).unwrap();
        assert_eq!(flat.plateau_size, Some(100));
        let rising = efficiency_curve("m", &[(100, 0.1), (300, 0.2), (500, 0.3)], 0.02).unwrap();
        assert_eq!(rising.plateau_size, None);
    }

    #[test]
    fn invalid_inputs() {
        assert!(efficiency_curve("m", &[(100, 0.1)], 0.02).is_err());
        assert!(efficiency_curve("m", &[(300, 0.1), (100, 0.2)], 0.02).is_err());
        assert!(efficiency_curve("m", &[(100, 0.1), (100, 0.2)], 0.02).is_err());
        assert!(efficiency_curve("m", &[(100, 0.1), (300, 0.2)], 0.0).is_err());
    }
}

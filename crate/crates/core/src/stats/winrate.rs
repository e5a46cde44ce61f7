use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::task::{Metric, Task};

/// Wins out of a task's applicable metrics, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WinTally {
    pub wins: u32,
    pub denominator: u32,
}

impl WinTally {
    /// Unreduced fraction `wins / denominator`; compares exactly.
    pub fn rate(&self) -> Ratio<u32> {
        Ratio::new_raw(self.wins, self.denominator)
    }

    /// Percentage rounded half-up to the nearest integer.
    pub fn percent(&self) -> u32 {
        (200 * self.wins + self.denominator) / (2 * self.denominator)
    }
}

impl fmt::Display for WinTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {}%", self.wins, self.denominator, self.percent())
    }
}

/// Counts wins over exactly the task's applicable metrics.
pub fn winning_rate(comparisons: &[(Metric, bool)], task: Task) -> Result<WinTally> {
    let expected: BTreeSet<Metric> = task.applicable_metrics().iter().copied().collect();
    let given: BTreeSet<Metric> = comparisons.iter().map(|(m, _)| *m).collect();
    if given.len() != comparisons.len() || given != expected {
        let names = |s: &BTreeSet<Metric>| s.iter().map(Metric::as_str).collect::<Vec<_>>().join(", ");
        return Err(Error::invalid(format!(
            "task {task} compares exactly [{}], got [{}]",
            names(&expected),
            comparisons.iter().map(|(m, _)| m.as_str()).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(WinTally {
        wins: comparisons.iter().filter(|(_, win)| *win).count() as u32,
        denominator: expected.len() as u32,
    })
}

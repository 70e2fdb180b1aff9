use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SupportSet;

/// Per-index vote counts of one fusion round.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteTally {
    pub round: usize,
    pub counts: BTreeMap<usize, usize>,
}

impl VoteTally {
    pub fn count(&self, index: usize) -> usize {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn total_votes(&self) -> usize {
        self.counts.values().sum()
    }

    /// Indices ordered by descending votes, ties by ascending index.
    pub fn ranked(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.counts.iter().map(|(&i, &c)| (i, c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

/// Counts votes, validating them against `d` and the excluded set.
pub fn count_votes(votes: &[usize], d: usize, exclude: &SupportSet) -> Result<VoteTally> {
    let mut tally = VoteTally::default();
    for &v in votes {
        if v >= d {
            return Err(Error::ProtocolViolation(format!(
                "vote {v} out of range for d = {d}"
            )));
        }
        if exclude.contains(v) {
            return Err(Error::ProtocolViolation(format!(
                "vote for index {v} already in the support"
            )));
        }
        *tally.counts.entry(v).or_insert(0) += 1;
    }
    Ok(tally)
}

/// Majority fusion: the index with the most votes, smallest index on ties.
pub fn tally_and_select(
    votes: &[usize],
    d: usize,
    exclude: &SupportSet,
) -> Result<(usize, VoteTally)> {
    if votes.is_empty() {
        return Err(Error::NoVotes);
    }
    let tally = count_votes(votes, d, exclude)?;
    let (winner, _) = tally.ranked()[0];
    Ok((winner, tally))
}

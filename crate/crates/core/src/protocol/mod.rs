//! Star-topology fusion protocols.
//!
//! Machines talk to the center only through encoded [`Message`] frames, so
//! every run exercises the codec. Machine work inside a round runs in
//! parallel; the center always reduces votes in ascending `machine_id`
//! order, which makes results independent of scheduling.
//!
//! Ledger conventions (`b = ceil(log2 d)` bits per index):
//! - DS: one round, each machine uploads `L` indices.
//! - DJ: round `t` uploads one index per machine; for `t < K` the center
//!   broadcasts the new index `j_t` to every machine.
//! - DJF: round `t` first sends the current support (size `t - 1`) to the
//!   `per_round` fresh machines, which then upload one index each, so round
//!   `t` costs `t * per_round * b`.
//! - DC: like DJ, but the broadcast carries every index added in the round.

mod codec;
mod ledger;
mod tally;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use codec::{
    decode_message, encode_message, Message, TAG_FINAL, TAG_INDEX_LIST_VOTE,
    TAG_SUPPORT_BROADCAST, TAG_VOTE,
};
pub use ledger::{bits_per_index, CommLedger, RoundCost};
pub use tally::{count_votes, tally_and_select, VoteTally};

use crate::error::{Error, Result};
use crate::matrix::{RegressionShard, SupportSet};
use crate::omp::{omp_step, run_omp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub estimate: SupportSet,
    pub ledger: CommLedger,
    pub rounds: usize,
    pub machines_used: usize,
    /// Vote tallies of every round, in round order.
    pub tallies: Vec<VoteTally>,
}

fn common_dims(shards: &[RegressionShard]) -> Result<(usize, usize)> {
    let first = shards.first().ok_or(Error::EmptyList)?;
    let d = first.dim();
    let mut n = usize::MAX;
    for s in shards {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
        n = n.min(s.samples());
    }
    Ok((n, d))
}

fn round_u16(t: usize) -> Result<u16> {
    u16::try_from(t).map_err(|_| Error::InvalidConfig(format!("round {t} exceeds u16")))
}

/// Runs `work` on every machine in parallel, returning frames in machine order.
fn on_machines<F>(shards: &[RegressionShard], work: F) -> Result<Vec<Vec<u8>>>
where
    F: Fn(&RegressionShard) -> Result<Vec<u8>> + Sync,
{
    let results: Vec<Result<Vec<u8>>> = shards.par_iter().map(&work).collect();
    results
        .into_iter()
        .zip(shards)
        .map(|(r, s)| {
            r.map_err(|e| Error::MachineFailed {
                machine: s.machine_id(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Decodes single-index votes of round `t` and returns them sorted by machine.
fn collect_votes(frames: &[Vec<u8>], d: usize, t: u16) -> Result<Vec<usize>> {
    let mut votes = Vec::with_capacity(frames.len());
    for f in frames {
        match decode_message(f, d)? {
            Message::Vote {
                round,
                machine_id,
                index,
            } if round == t => votes.push((machine_id, index)),
            other => {
                return Err(Error::ProtocolViolation(format!(
                    "expected a round-{t} vote, got {other:?}"
                )))
            }
        }
    }
    votes.sort_by_key(|&(m, _)| m);
    Ok(votes.into_iter().map(|(_, i)| i).collect())
}

fn vote_frame(shard: &RegressionShard, support: &SupportSet, round: u16) -> Result<Vec<u8>> {
    let (index, _) = omp_step(shard, support)?;
    encode_message(
        &Message::Vote {
            round,
            machine_id: shard.machine_id(),
            index,
        },
        shard.dim(),
    )
}

/// Encodes a broadcast, decodes it as a machine would, and returns (frame length, indices).
fn broadcast(round: u16, indices: &[usize], d: usize) -> Result<(usize, Vec<usize>)> {
    let frame = encode_message(
        &Message::SupportBroadcast {
            round,
            indices: indices.to_vec(),
        },
        d,
    )?;
    match decode_message(&frame, d)? {
        Message::SupportBroadcast { indices, .. } => Ok((frame.len(), indices)),
        other => Err(Error::ProtocolViolation(format!(
            "broadcast decoded as {other:?}"
        ))),
    }
}

/// One-shot protocol: every machine runs `l` OMP steps and uploads its
/// indices; the center keeps the `k` most voted, ties by smallest index.
pub fn ds_omp(shards: &[RegressionShard], l: usize, k: usize) -> Result<ProtocolResult> {
    let (n, d) = common_dims(shards)?;
    if l < k {
        return Err(Error::InvalidConfig(format!("DS needs L >= K, got L={l} K={k}")));
    }
    if l > n.min(d) {
        return Err(Error::TooManySteps {
            steps: l,
            max: n.min(d),
        });
    }
    let mut ledger = CommLedger::new(d);
    let b = ledger.bits_per_index;
    let frames = on_machines(shards, |s| {
        let trace = run_omp(s, l)?;
        encode_message(
            &Message::IndexListVote {
                round: 1,
                machine_id: s.machine_id(),
                indices: trace.chosen.as_slice().to_vec(),
            },
            d,
        )
    })?;

    let cost = ledger.open_round(1);
    let mut lists = Vec::with_capacity(frames.len());
    for f in &frames {
        match decode_message(f, d)? {
            Message::IndexListVote {
                machine_id,
                indices,
                ..
            } => {
                if indices.len() != l {
                    return Err(Error::ProtocolViolation(format!(
                        "machine {machine_id} sent {} indices, expected {l}",
                        indices.len()
                    )));
                }
                SupportSet::from_indices(indices.iter().copied()).map_err(|_| {
                    Error::ProtocolViolation(format!("machine {machine_id} repeated an index"))
                })?;
                cost.up(l as u64, b, f.len());
                lists.push((machine_id, indices));
            }
            other => {
                return Err(Error::ProtocolViolation(format!(
                    "expected an index list, got {other:?}"
                )))
            }
        }
    }
    lists.sort_by_key(|(m, _)| *m);
    let votes: Vec<usize> = lists.into_iter().flat_map(|(_, v)| v).collect();
    let mut tally = count_votes(&votes, d, &SupportSet::new())?;
    tally.round = 1;
    let estimate = SupportSet::from_indices(tally.ranked().into_iter().take(k).map(|(i, _)| i))?;
    Ok(ProtocolResult {
        estimate,
        ledger,
        rounds: 1,
        machines_used: shards.len(),
        tallies: vec![tally],
    })
}

/// Shared driver of the joint protocols: `machines_for(t)` yields the machines
/// of round `t`, and `fresh` selects whether they receive the full support
/// (DJF) or only the previous round's winner (DJ).
fn joint_rounds<'a, F>(d: usize, k: usize, fresh: bool, machines_for: F) -> Result<ProtocolResult>
where
    F: Fn(usize) -> &'a [RegressionShard],
{
    let mut ledger = CommLedger::new(d);
    let b = ledger.bits_per_index;
    let mut support = SupportSet::new();
    let mut tallies = Vec::with_capacity(k);
    let mut machines_used = 0;
    for t in 1..=k {
        let machines = machines_for(t);
        machines_used = if fresh {
            machines_used + machines.len()
        } else {
            machines.len()
        };
        let round = round_u16(t)?;
        let cost = ledger.open_round(t);
        if fresh && t > 1 {
            // fresh machines need the whole current support, |S_{t-1}| = t - 1
            let (len, received) = broadcast(round, support.as_slice(), d)?;
            if received != support.as_slice() {
                return Err(Error::ProtocolViolation("support broadcast corrupted".into()));
            }
            let m = machines.len();
            cost.down((m * (t - 1)) as u64, b, m * len);
        }
        let frames = on_machines(machines, |s| vote_frame(s, &support, round))?;
        for f in &frames {
            cost.up(1, b, f.len());
        }
        let votes = collect_votes(&frames, d, round)?;
        let (winner, mut tally) = tally_and_select(&votes, d, &support)?;
        tally.round = t;
        tallies.push(tally);
        support.insert(winner)?;
        if !fresh && t < k {
            let (len, received) = broadcast(round, &[winner], d)?;
            if received != [winner] {
                return Err(Error::ProtocolViolation("winner broadcast corrupted".into()));
            }
            let m = machines.len();
            ledger.per_round[t - 1].down(m as u64, b, m * len);
        }
    }
    Ok(ProtocolResult {
        estimate: support,
        ledger,
        rounds: k,
        machines_used,
        tallies,
    })
}

/// Joint protocol: `k` rounds, one majority-voted index per round.
pub fn dj_omp(shards: &[RegressionShard], k: usize) -> Result<ProtocolResult> {
    let (n, d) = common_dims(shards)?;
    if k > n.min(d) {
        return Err(Error::TooManySteps {
            steps: k,
            max: n.min(d),
        });
    }
    joint_rounds(d, k, false, |_| shards)
}

/// Joint protocol with a disjoint slice of `per_round` fresh machines each round.
pub fn djf_omp(pool: &[RegressionShard], k: usize, per_round: usize) -> Result<ProtocolResult> {
    let needed = k * per_round;
    if per_round == 0 {
        return Err(Error::InvalidConfig("per_round must be positive".into()));
    }
    if pool.len() < needed {
        return Err(Error::InsufficientMachines {
            needed,
            have: pool.len(),
        });
    }
    let (n, d) = common_dims(&pool[..needed])?;
    if k > n.min(d) {
        return Err(Error::TooManySteps {
            steps: k,
            max: n.min(d),
        });
    }
    joint_rounds(d, k, true, |t| &pool[(t - 1) * per_round..t * per_round])
}

/// Baseline fusion rule: each round adds every index with at least two votes,
/// or a seeded uniformly random singleton when none exists. Indices entering
/// in one round are ordered by (votes desc, index asc); if the support
/// overshoots `k`, the last-added entries are dropped.
pub fn dc_omp(shards: &[RegressionShard], k: usize, seed: u64) -> Result<ProtocolResult> {
    let (n, d) = common_dims(shards)?;
    if k > n.min(d) {
        return Err(Error::TooManySteps {
            steps: k,
            max: n.min(d),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = CommLedger::new(d);
    let b = ledger.bits_per_index;
    let m = shards.len();
    let mut support = SupportSet::new();
    let mut tallies = Vec::new();
    let mut t = 0;
    while support.len() < k {
        t += 1;
        let round = round_u16(t)?;
        let frames = on_machines(shards, |s| vote_frame(s, &support, round))?;
        let cost = ledger.open_round(t);
        for f in &frames {
            cost.up(1, b, f.len());
        }
        let votes = collect_votes(&frames, d, round)?;
        let mut tally = count_votes(&votes, d, &support)?;
        tally.round = t;
        let ranked = tally.ranked();
        let mut added: Vec<usize> = ranked
            .iter()
            .take_while(|&&(_, c)| c >= 2)
            .map(|&(i, _)| i)
            .collect();
        if added.is_empty() {
            let singles: Vec<usize> = ranked.iter().map(|&(i, _)| i).collect();
            let pick = ((u128::from(rng.next_u64()) * singles.len() as u128) >> 64) as usize;
            added.push(singles[pick]);
        }
        for &i in &added {
            support.insert(i)?;
        }
        tallies.push(tally);
        if support.len() < k {
            let (len, received) = broadcast(round, &added, d)?;
            if received != added {
                return Err(Error::ProtocolViolation("broadcast corrupted".into()));
            }
            ledger.per_round[t - 1].down((m * added.len()) as u64, b, m * len);
        }
    }
    support.truncate(k);
    Ok(ProtocolResult {
        estimate: support,
        ledger,
        rounds: t,
        machines_used: m,
        tallies,
    })
}

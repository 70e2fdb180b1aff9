use serde::{Deserialize, Serialize};

/// Number of bits needed to name one of `d` indices, `ceil(log2 d)`.
pub fn bits_per_index(d: usize) -> u64 {
    if d <= 1 {
        0
    } else {
        u64::from(usize::BITS - (d - 1).leading_zeros())
    }
}

/// Traffic of one protocol round. Bits count index information only;
/// bytes count the encoded frames actually produced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCost {
    pub round: usize,
    pub uplink_bits: u64,
    pub downlink_bits: u64,
    pub uplink_bytes: u64,
    pub downlink_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommLedger {
    pub bits_per_index: u64,
    pub per_round: Vec<RoundCost>,
}

impl CommLedger {
    pub fn new(d: usize) -> Self {
        Self {
            bits_per_index: bits_per_index(d),
            per_round: Vec::new(),
        }
    }

    /// Opens a new round and returns it for accounting.
    pub(crate) fn open_round(&mut self, round: usize) -> &mut RoundCost {
        self.per_round.push(RoundCost {
            round,
            ..RoundCost::default()
        });
        self.per_round.last_mut().expect("just pushed")
    }

    pub fn uplink_bits(&self) -> u64 {
        self.per_round.iter().map(|r| r.uplink_bits).sum()
    }

    pub fn downlink_bits(&self) -> u64 {
        self.per_round.iter().map(|r| r.downlink_bits).sum()
    }

    pub fn total(&self) -> u64 {
        self.uplink_bits() + self.downlink_bits()
    }

    pub fn total_wire_bytes(&self) -> u64 {
        self.per_round
            .iter()
            .map(|r| r.uplink_bytes + r.downlink_bytes)
            .sum()
    }
}

impl RoundCost {
    pub(crate) fn up(&mut self, indices: u64, bits_per_index: u64, bytes: usize) {
        self.uplink_bits += indices * bits_per_index;
        self.uplink_bytes += bytes as u64;
    }

    pub(crate) fn down(&mut self, indices: u64, bits_per_index: u64, bytes: usize) {
        self.downlink_bits += indices * bits_per_index;
        self.downlink_bytes += bytes as u64;
    }
}

//! Binary framing of the messages exchanged between machines and the center.
//!
//! Little-endian throughout. Every frame starts with `[tag: u8][round: u16]`:
//!
//! | tag  | message          | payload                                  |
//! |------|------------------|------------------------------------------|
//! | 0x01 | SupportBroadcast | `[count: u16][count x index: u32]`       |
//! | 0x02 | Vote             | `[machine_id: u32][index: u32]`          |
//! | 0x03 | IndexListVote    | `[machine_id: u32][count: u16][count x u32]` |
//! | 0x04 | Final            | `[count: u16][count x u32]`              |
//!
//! Decoding rejects unknown tags, round 0, truncation, trailing bytes and
//! indices `>= d`, so any frame that decodes re-encodes to the same bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAG_SUPPORT_BROADCAST: u8 = 0x01;
pub const TAG_VOTE: u8 = 0x02;
pub const TAG_INDEX_LIST_VOTE: u8 = 0x03;
pub const TAG_FINAL: u8 = 0x04;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Message {
    SupportBroadcast {
        round: u16,
        indices: Vec<usize>,
    },
    Vote {
        round: u16,
        machine_id: usize,
        index: usize,
    },
    IndexListVote {
        round: u16,
        machine_id: usize,
        indices: Vec<usize>,
    },
    Final {
        round: u16,
        indices: Vec<usize>,
    },
}

impl Message {
    pub fn round(&self) -> u16 {
        match self {
            Message::SupportBroadcast { round, .. }
            | Message::Vote { round, .. }
            | Message::IndexListVote { round, .. }
            | Message::Final { round, .. } => *round,
        }
    }

    /// Encoded size in bytes.
    pub fn wire_len(&self) -> usize {
        3 + match self {
            Message::SupportBroadcast { indices, .. } | Message::Final { indices, .. } => {
                2 + 4 * indices.len()
            }
            Message::Vote { .. } => 8,
            Message::IndexListVote { indices, .. } => 6 + 4 * indices.len(),
        }
    }
}

fn check_index(index: usize, d: usize) -> Result<u32> {
    if index >= d {
        return Err(Error::IndexOutOfRange { index, dim: d });
    }
    u32::try_from(index).map_err(|_| Error::IndexOutOfRange { index, dim: d })
}

fn put_list(out: &mut Vec<u8>, indices: &[usize], d: usize) -> Result<()> {
    let count = u16::try_from(indices.len()).map_err(|_| {
        Error::InvalidConfig(format!("index list of {} entries exceeds u16", indices.len()))
    })?;
    out.extend_from_slice(&count.to_le_bytes());
    for &i in indices {
        out.extend_from_slice(&check_index(i, d)?.to_le_bytes());
    }
    Ok(())
}

fn put_machine(out: &mut Vec<u8>, machine_id: usize) -> Result<()> {
    let id = u32::try_from(machine_id)
        .map_err(|_| Error::InvalidConfig(format!("machine id {machine_id} exceeds u32")))?;
    out.extend_from_slice(&id.to_le_bytes());
    Ok(())
}

pub fn encode_message(msg: &Message, d: usize) -> Result<Vec<u8>> {
    if msg.round() == 0 {
        return Err(Error::InvalidConfig("message round must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(msg.wire_len());
    let tag = match msg {
        Message::SupportBroadcast { .. } => TAG_SUPPORT_BROADCAST,
        Message::Vote { .. } => TAG_VOTE,
        Message::IndexListVote { .. } => TAG_INDEX_LIST_VOTE,
        Message::Final { .. } => TAG_FINAL,
    };
    out.push(tag);
    out.extend_from_slice(&msg.round().to_le_bytes());
    match msg {
        Message::SupportBroadcast { indices, .. } | Message::Final { indices, .. } => {
            put_list(&mut out, indices, d)?
        }
        Message::Vote {
            machine_id, index, ..
        } => {
            put_machine(&mut out, *machine_id)?;
            out.extend_from_slice(&check_index(*index, d)?.to_le_bytes());
        }
        Message::IndexListVote {
            machine_id,
            indices,
            ..
        } => {
            put_machine(&mut out, *machine_id)?;
            put_list(&mut out, indices, d)?;
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    d: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self.buf.get(self.pos..end).ok_or_else(|| {
            Error::MalformedFrame(format!("truncated at byte {} (need {N} more)", self.pos))
        })?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice length checked"))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn index(&mut self) -> Result<usize> {
        let i = self.u32()? as usize;
        if i >= self.d {
            return Err(Error::MalformedFrame(format!(
                "index {i} out of range for d = {}",
                self.d
            )));
        }
        Ok(i)
    }

    fn list(&mut self) -> Result<Vec<usize>> {
        let count = self.u16()? as usize;
        if self.buf.len() - self.pos < 4 * count {
            return Err(Error::MalformedFrame(format!(
                "list of {count} indices truncated"
            )));
        }
        (0..count).map(|_| self.index()).collect()
    }
}

pub fn decode_message(bytes: &[u8], d: usize) -> Result<Message> {
    let mut r = Reader {
        buf: bytes,
        pos: 0,
        d,
    };
    let [tag] = r.take::<1>()?;
    let round = r.u16()?;
    if round == 0 {
        return Err(Error::MalformedFrame("round 0".into()));
    }
    let msg = match tag {
        TAG_SUPPORT_BROADCAST => Message::SupportBroadcast {
            round,
            indices: r.list()?,
        },
        TAG_VOTE => Message::Vote {
            round,
            machine_id: r.u32()? as usize,
            index: r.index()?,
        },
        TAG_INDEX_LIST_VOTE => Message::IndexListVote {
            round,
            machine_id: r.u32()? as usize,
            indices: r.list()?,
        },
        TAG_FINAL => Message::Final {
            round,
            indices: r.list()?,
        },
        other => return Err(Error::MalformedFrame(format!("unknown tag {other:#04x}"))),
    };
    if r.pos != bytes.len() {
        return Err(Error::MalformedFrame(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_layout() {
        let m = Message::Vote {
            round: 2,
            machine_id: 7,
            index: 300,
        };
        let b = encode_message(&m, 2000).unwrap();
        assert_eq!(b, [0x02, 2, 0, 7, 0, 0, 0, 0x2c, 0x01, 0, 0]);
        assert_eq!(b.len(), m.wire_len());
        assert_eq!(decode_message(&b, 2000).unwrap(), m);
    }

    #[test]
    fn broadcast_layout() {
        let m = Message::SupportBroadcast {
            round: 3,
            indices: vec![1, 5, 9],
        };
        let b = encode_message(&m, 10).unwrap();
        assert_eq!(&b[..5], &[0x01, 3, 0, 3, 0]);
        assert_eq!(&b[5..], &[1, 0, 0, 0, 5, 0, 0, 0, 9, 0, 0, 0]);
        assert_eq!(decode_message(&b, 10).unwrap(), m);
    }

    #[test]
    fn malformed_frames() {
        let bad: [&[u8]; 6] = [
            &[],
            &[0x09, 1, 0],
            &[0x02, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
            &[0x02, 1, 0, 1, 0, 0],
            &[0x02, 1, 0, 1, 0, 0, 0, 50, 0, 0, 0],
            &[0x04, 1, 0, 0, 0, 0xff],
        ];
        for b in bad {
            assert!(matches!(decode_message(b, 10), Err(Error::MalformedFrame(_))));
        }
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let m = Message::Final {
            round: 1,
            indices: vec![10],
        };
        assert!(encode_message(&m, 10).is_err());
    }
}

use distomp_core::protocol::{decode_message, encode_message, Message};
use proptest::collection::vec;
use proptest::prelude::*;

const D: usize = 5000;

fn message() -> impl Strategy<Value = Message> {
    let idx = 0..D;
    let list = vec(0..D, 0..40);
    prop_oneof![
        (1..=u16::MAX, list.clone())
            .prop_map(|(round, indices)| Message::SupportBroadcast { round, indices }),
        (1..=u16::MAX, 0..100_000usize, idx)
            .prop_map(|(round, machine_id, index)| Message::Vote { round, machine_id, index }),
        (1..=u16::MAX, 0..100_000usize, list.clone()).prop_map(|(round, machine_id, indices)| {
            Message::IndexListVote { round, machine_id, indices }
        }),
        (1..=u16::MAX, list).prop_map(|(round, indices)| Message::Final { round, indices }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20_000))]

    #[test]
    fn roundtrip(msg in message()) {
        let bytes = encode_message(&msg, D).unwrap();
        prop_assert_eq!(bytes.len(), msg.wire_len());
        prop_assert_eq!(decode_message(&bytes, D).unwrap(), msg);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in vec(any::<u8>(), 0..64)) {
        let _ = decode_message(&bytes, D);
    }

    #[test]
    fn truncations_and_extensions_are_rejected(msg in message(), cut in 1usize..8, extra in any::<u8>()) {
        let bytes = encode_message(&msg, D).unwrap();
        let keep = bytes.len().saturating_sub(cut);
        prop_assert!(decode_message(&bytes[..keep], D).is_err());
        let mut longer = bytes.clone();
        longer.push(extra);
        prop_assert!(decode_message(&longer, D).is_err());
    }

    #[test]
    fn flipped_bytes_never_panic(msg in message(), pos in any::<prop::sample::Index>(), v in any::<u8>()) {
        let mut bytes = encode_message(&msg, D).unwrap();
        let i = pos.index(bytes.len());
        bytes[i] = v;
        if let Ok(m) = decode_message(&bytes, D) {
            prop_assert!(m.round() >= 1);
            prop_assert_eq!(encode_message(&m, D).unwrap(), bytes);
        }
    }
}

#[test]
fn out_of_range_index_rejected_both_ways() {
    let m = Message::Vote { round: 1, machine_id: 0, index: D };
    assert!(encode_message(&m, D).is_err());
    let ok = encode_message(&Message::Vote { round: 1, machine_id: 0, index: D - 1 }, D).unwrap();
    assert!(decode_message(&ok, D - 1).is_err());
}

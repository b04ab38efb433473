mod common;

use common::random_field;
use hartree_core::checkpoint::{Checkpoint, HEADER_LEN, MAGIC};
use hartree_core::{make_grid, Sign};
use proptest::prelude::*;

fn sample(seed: u64, n: usize, l: f64, t: f64, sign: Sign) -> Checkpoint {
    let g = make_grid(n, l).unwrap();
    Checkpoint {
        alpha: 1.75,
        b: 0.25,
        sign,
        t,
        field: random_field(&g, seed),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bytes_round_trip_bit_exact(seed in any::<u64>(), l in 0.5f64..100.0, t in -10.0f64..10.0, focusing in any::<bool>()) {
        let sign = if focusing { Sign::Focusing } else { Sign::Defocusing };
        let ck = sample(seed, 8, l, t, sign);
        let bytes = ck.to_bytes();
        prop_assert_eq!(bytes.len(), HEADER_LEN + 16 * 512);
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(back, ck);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ighc");
    let ck = sample(9, 16, 20.0, 1.5, Sign::Focusing);
    ck.save(&path).unwrap();
    let back = Checkpoint::load(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), back.to_bytes());
    assert_eq!(back.field.values(), ck.field.values());
}

#[test]
fn header_layout() {
    let ck = sample(1, 8, 20.0, 0.25, Sign::Defocusing);
    let b = ck.to_bytes();
    assert_eq!(&b[0..5], MAGIC);
    assert_eq!(u32::from_le_bytes(b[5..9].try_into().unwrap()), 1);
    assert_eq!(&b[9..13], &[0x04, 0x03, 0x02, 0x01]);
    assert_eq!(u64::from_le_bytes(b[13..21].try_into().unwrap()), 8);
    assert_eq!(f64::from_le_bytes(b[21..29].try_into().unwrap()), 20.0);
    assert_eq!(f64::from_le_bytes(b[45..53].try_into().unwrap()), -1.0);
    assert_eq!(f64::from_le_bytes(b[53..61].try_into().unwrap()), 0.25);
    let re0 = f64::from_le_bytes(b[61..69].try_into().unwrap());
    assert_eq!(re0, ck.field.values()[0].re);
}

#[test]
fn corrupted_inputs_are_rejected() {
    let good = sample(2, 8, 20.0, 0.0, Sign::Focusing).to_bytes();
    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    assert!(Checkpoint::from_bytes(&bad_magic).is_err());
    let mut bad_version = good.clone();
    bad_version[5] = 2;
    assert!(Checkpoint::from_bytes(&bad_version).is_err());
    let mut swapped = good.clone();
    swapped[9..13].reverse();
    assert!(Checkpoint::from_bytes(&swapped).is_err());
    assert!(Checkpoint::from_bytes(&good[..good.len() - 16]).is_err());
    assert!(Checkpoint::from_bytes(&good[..30]).is_err());
    let mut bad_sign = good.clone();
    bad_sign[45..53].copy_from_slice(&0.5f64.to_le_bytes());
    assert!(Checkpoint::from_bytes(&bad_sign).is_err());
    let mut bad_n = good;
    bad_n[13..21].copy_from_slice(&12u64.to_le_bytes());
    assert!(Checkpoint::from_bytes(&bad_n).is_err());
}

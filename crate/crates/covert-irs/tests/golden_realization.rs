//! Pins the serialized channel realization for N = 4, seed 42.
//!
//! A diff here means the RNG draw order, the seeding scheme, or the text
//! format changed — all of which silently invalidate recorded
//! experiments.

use covert_irs::channel::{sample_realization, ChannelParams, ChannelRealization};

const GOLDEN: &str = include_str!("golden/realization_n4_seed42.txt");

#[test]
fn generated_realization_matches_golden_bytes() {
    let params = ChannelParams::builder(4).seed(42).build().unwrap();
    let text = sample_realization(&params).to_text();
    assert_eq!(text, GOLDEN);
}

#[test]
fn golden_round_trips_exactly() {
    let re = ChannelRealization::from_text(GOLDEN).unwrap();
    assert_eq!(re.to_text(), GOLDEN);
    assert_eq!(re.h_as.len(), 4);
}

use digitgap_bench::{zero_free, zero_free_level};

#[test]
fn fixture_sizes() {
    assert_eq!(zero_free_level(10, 2).len(), 81);
    // Base 3 without 0 merges nothing: 2^L separate intervals.
    assert_eq!(zero_free_level(3, 4).len(), 16);
    let specs = zero_free(&[3, 4]);
    assert_eq!(specs.iter().map(|s| s.base()).collect::<Vec<_>>(), vec![3, 4]);
    assert!(specs.iter().all(|s| s.missing() == [0]));
}

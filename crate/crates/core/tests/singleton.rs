use mqmds_core::code::{admissible_m_range, singleton_bound};
use mqmds_core::combin::subsets;
use proptest::prelude::*;

fn min_product(alphabets: &[u32], k: usize) -> u128 {
    subsets(alphabets.len(), k)
        .map(|c| c.iter().map(|&j| alphabets[j] as u128).product())
        .min()
        .unwrap_or(1)
}

fn brute_force(n: usize, d: u32, alphabets: &[u32]) -> u128 {
    if n == 2 * d as usize {
        return 1;
    }
    min_product(alphabets, n - 2 * d as usize)
}

fn geometry() -> impl Strategy<Value = (usize, u32, Vec<u32>)> {
    (2usize..=9)
        .prop_flat_map(|n| (Just(n), 0..=(n as u32 / 2), prop::collection::vec(2u32..=16, n)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn singleton_matches_brute_force((n, d, alphabets) in geometry()) {
        prop_assert_eq!(singleton_bound(n, d, &alphabets).unwrap(), brute_force(n, d, &alphabets));
    }

    #[test]
    fn admissible_upper_is_a_difference((n, d, alphabets) in geometry()) {
        prop_assume!(n > 2 * d as usize);
        let (lo, hi) = admissible_m_range(n, d, &alphabets).unwrap();
        let k = n - 2 * d as usize;
        prop_assert_eq!(lo, 0);
        prop_assert_eq!(hi, min_product(&alphabets, k) - min_product(&alphabets, k - 1));
    }
}

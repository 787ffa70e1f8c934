use mqmds_core::array::MixedLevelArray;
use mqmds_core::code::{code_from_partitioned_oa, OrthogonalPartition, Provenance, QuantumCode};
use mqmds_core::combin::subsets;
use mqmds_core::construct::bush;
use mqmds_core::theorems::{theorem_52s, theorem_5s2, theorem_tn};
use mqmds_core::verify::{cross_validate, naive_cross_matrix, reduced_cross_matrix, verify_code, FailureKind, Mode};
use mqmds_core::{Context, Error, DEFAULT_BUDGET};
use proptest::prelude::*;

fn small_codes() -> Vec<QuantumCode> {
    let ctx = Context::default();
    let mut out = Vec::new();
    for s in 2..=4 {
        out.push(theorem_5s2(&ctx, s, &[s]).unwrap());
        out.push(theorem_52s(&ctx, s, &[s]).unwrap());
    }
    out.push(theorem_5s2(&ctx, 4, &[2, 2]).unwrap());
    let t = theorem_tn(&ctx, 4, 1, 1, &[2], Some(&[2, 2])).unwrap();
    out.push(t.first);
    out.push(t.second.unwrap());
    out
}

#[test]
fn join_matches_naive_oracle() {
    for code in small_codes() {
        let n = code.kets().cols();
        let k = code.blocks().min(3);
        for d in 0..=2 {
            for s in subsets(n, d).take(6) {
                for i in 0..k {
                    for j in 0..k {
                        let fast = reduced_cross_matrix(&code, i, j, &s);
                        assert_eq!(fast, naive_cross_matrix(&code, i, j, &s));
                        assert_eq!(fast.transpose(), reduced_cross_matrix(&code, j, i, &s));
                        if i == j {
                            assert_eq!(fast.trace(), code.block_size() as u64);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn strict_verification_is_monotone() {
    for code in small_codes() {
        let d = code.params.d();
        let r = verify_code(&code, d + 1, Mode::Strict);
        assert!(r.monotone);
        assert_eq!(r.certified_strict, d + 1, "{}", code.params);
        for lower in 0..=d {
            assert!(verify_code(&code, lower, Mode::Strict).passed());
        }
        assert!(!r.strict_pass);
    }
}

#[test]
fn driver_outputs_cross_validate() {
    for code in small_codes() {
        let v = cross_validate(&code).unwrap();
        assert!(v.quantum && v.combinatorial, "{}", code.params);
    }
}

#[test]
fn cross_validate_needs_provenance() {
    let kets = MixedLevelArray::new(vec![2, 2], vec![0, 0, 1, 1]).unwrap();
    let code = QuantumCode::from_kets(kets, 1, 2, Provenance::default()).unwrap();
    assert_eq!(cross_validate(&code), Err(Error::ProvenanceMissing));
}

fn mutate(code: &QuantumCode, row: usize, col: usize, delta: u32) -> QuantumCode {
    let kets = code.kets();
    let mut data = kets.data().to_vec();
    let n = kets.cols();
    let levels = kets.alphabets()[col];
    data[row * n + col] = (data[row * n + col] + delta) % levels;
    code.with_kets(MixedLevelArray::new(kets.alphabets().to_vec(), data).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    /// A single changed symbol breaks balance in its block, so both sides fail.
    #[test]
    fn corrupted_codes_fail_both_oracles(
        pick in any::<prop::sample::Index>(),
        row in any::<prop::sample::Index>(),
        col in any::<prop::sample::Index>(),
        delta in 1u32..16,
    ) {
        let codes = small_codes();
        let code = &codes[pick.index(codes.len())];
        let col = col.index(code.kets().cols());
        prop_assume!(delta % code.kets().alphabets()[col] != 0);
        let bad = mutate(code, row.index(code.kets().rows()), col, delta);
        let v = cross_validate(&bad).unwrap();
        prop_assert!(v.agree());
        prop_assert!(!v.quantum && !v.combinatorial);
    }
}

#[test]
fn balanced_block_with_short_distance() {
    // Even and odd weight halves have strength 2 inside a parent of distance 1: the quantum check
    // must fail at d = 1 exactly as the distance predicts.
    let rows = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]];
    let full = MixedLevelArray::from_rows(vec![2, 2, 2], &rows).unwrap().certify(3, DEFAULT_BUDGET).unwrap();
    let partition = OrthogonalPartition::certify(&full, 2, 1, DEFAULT_BUDGET).unwrap();
    let code = code_from_partitioned_oa(full, partition, Provenance::default()).unwrap();
    assert_eq!(code.params.d_plus_1, 1);
    let mut forced = code.clone();
    forced.params = mqmds_core::CodeParams::new(2, 2, vec![2, 2, 2]).unwrap();
    let v = cross_validate(&forced).unwrap();
    assert!(v.agree());
    assert!(!v.quantum);
    let r = verify_code(&forced, 1, Mode::Strict);
    assert_eq!(r.certified_strict, 1);
    assert!(matches!(r.strict_witness.unwrap().kind, FailureKind::CrossTerm | FailureKind::OffDiagonal));
}

#[test]
fn bush_blocks_by_prefix() {
    let a = bush(4, 2, DEFAULT_BUDGET).unwrap();
    let (stripped, p) = mqmds_core::code::partition_by_prefix(&a, 1, DEFAULT_BUDGET).unwrap();
    assert_eq!((p.blocks, p.block_size, stripped.cols()), (4, 4, 4));
    for b in 0..4 {
        assert!(stripped.slice_rows(4 * b, 4 * b + 4).is_orthogonal_array(1));
    }
}

#[test]
fn report_counts_every_subset() {
    let code = &small_codes()[0];
    let r = verify_code(code, 2, Mode::Strict);
    let counts: Vec<u64> = r.levels.iter().map(|l| l.subsets).collect();
    assert_eq!(counts, vec![1, 5, 10]);
    assert!(r.passed());
}

//! Checks the code and transform against a dense parity-check matrix written
//! out by hand, enumerating every chunk of the small codes.

mod common;

use std::collections::HashSet;

use gdcan::{from_basis_deviation, to_basis_deviation, BasisDeviation, Bits, CodeParams, SyndromeClass};
use proptest::prelude::*;

use common::dense::{all_chunks, syndrome_value, to_bits, DenseCode};

fn cases() -> Vec<(DenseCode, CodeParams)> {
    vec![
        (DenseCode::h74(), CodeParams::build(3, 0).unwrap()),
        (DenseCode::h63(), CodeParams::build(3, 1).unwrap()),
    ]
}

#[test]
fn syndrome_matches_dense_matrix_exhaustively() {
    for (dense, code) in cases() {
        for chunk in all_chunks(dense.n()) {
            let expected = syndrome_value(&dense.syndrome(&chunk));
            assert_eq!(code.syndrome(&to_bits(&chunk)).unwrap(), expected, "chunk {chunk:?}");
        }
    }
}

#[test]
fn codewords_are_exactly_the_encoded_bases() {
    for (dense, code) in cases() {
        let words: HashSet<Vec<u8>> = dense.codewords().into_iter().collect();
        assert_eq!(words.len(), 1 << dense.basis_bits);
        let encoded: HashSet<Vec<u8>> = all_chunks(dense.basis_bits)
            .map(|b| {
                let w = code.codeword(&to_bits(&b)).unwrap();
                w.iter().map(|x| x as u8).collect()
            })
            .collect();
        assert_eq!(encoded, words);
        for chunk in all_chunks(dense.n()) {
            let zero = code.syndrome(&to_bits(&chunk)).unwrap() == 0;
            assert_eq!(zero, words.contains(&chunk));
        }
    }
}

#[test]
fn h74_parity_example() {
    let code = CodeParams::build(3, 0).unwrap();
    let dense = DenseCode::h74();
    let word = dense
        .codewords()
        .into_iter()
        .find(|w| w[..4] == [1, 0, 0, 0])
        .unwrap();
    assert_eq!(&word[4..], &[1, 1, 0]);
    assert_eq!(code.encode_parity(&"1000".parse().unwrap()).unwrap(), syndrome_value(&[1, 1, 0]));
}

#[test]
fn h63_parity_zeroes_syndrome_for_every_basis() {
    let code = CodeParams::build(3, 1).unwrap();
    let dense = DenseCode::h63();
    for basis in all_chunks(3) {
        let p = code.encode_parity(&to_bits(&basis)).unwrap();
        let mut word = basis.clone();
        word.extend((0..3).map(|i| ((p >> i) & 1) as u8));
        assert!(dense.syndrome(&word).iter().all(|&s| s == 0));
    }
}

#[test]
fn single_flip_syndromes_are_columns() {
    for (dense, code) in cases() {
        for w in dense.codewords() {
            for j in 0..dense.n() {
                let mut c = w.clone();
                c[j] ^= 1;
                let s = code.syndrome(&to_bits(&c)).unwrap();
                assert_eq!(s, syndrome_value(&dense.column(j)));
                assert_eq!(code.classify(s), SyndromeClass::Retained(j));
            }
        }
    }
}

#[test]
fn transform_is_a_bijection_on_small_codes() {
    for (dense, code) in cases() {
        let words: HashSet<Vec<u8>> = dense.codewords().into_iter().collect();
        let mut pairs = HashSet::new();
        for chunk in all_chunks(dense.n()) {
            let bits = to_bits(&chunk);
            let pair = to_basis_deviation(&bits, &code).unwrap();
            assert_eq!(pair.deviation == 0, words.contains(&chunk));
            assert_eq!(from_basis_deviation(&pair, &code).unwrap(), bits);
            assert!(pairs.insert(pair));
        }
        // the pair space has exactly as many elements as the chunk space
        assert_eq!(pairs.len(), 1 << (code.basis_bits() + code.parity_bits() as usize));
        for basis in all_chunks(code.basis_bits()) {
            for deviation in 0..(1u16 << code.parity_bits()) {
                let pair = BasisDeviation {
                    basis: to_bits(&basis),
                    deviation,
                };
                let chunk = from_basis_deviation(&pair, &code).unwrap();
                assert_eq!(to_basis_deviation(&chunk, &code).unwrap(), pair);
            }
        }
    }
}

#[test]
fn h63_removed_column_class() {
    let code = CodeParams::build(3, 1).unwrap();
    let dense = DenseCode::h74();
    // the removed H(7,4) column is d4's
    let removed = syndrome_value(&dense.column(3));
    assert_eq!(code.classify(removed), SyndromeClass::Removed);
    let mut hits = 0;
    for chunk in all_chunks(6) {
        let bits = to_bits(&chunk);
        let pair = to_basis_deviation(&bits, &code).unwrap();
        if pair.deviation == removed {
            assert_eq!(pair.basis, to_bits(&chunk[..3]));
            hits += 1;
        }
    }
    // one chunk per basis lands in the removed class
    assert_eq!(hits, 8);
}

fn paper_codes() -> Vec<CodeParams> {
    vec![CodeParams::build(7, 15).unwrap(), CodeParams::build(8, 39).unwrap()]
}

#[test]
fn similarity_clusters_share_a_basis() {
    let mut rng = common::rng(11);
    for code in paper_codes() {
        for _ in 0..20 {
            let basis = common::random_bits(&mut rng, code.basis_bits());
            let word = code.codeword(&basis).unwrap();
            assert_eq!(to_basis_deviation(&word, &code).unwrap().basis, basis);
            for j in 0..code.chunk_bits() {
                let mut c = word.clone();
                c.flip(j);
                let pair = to_basis_deviation(&c, &code).unwrap();
                assert_eq!(pair.basis, basis);
                assert_eq!(pair.deviation, code.column(j));
            }
        }
    }
}

#[test]
fn random_round_trips_on_paper_codes() {
    let mut rng = common::rng(12);
    for code in paper_codes() {
        for _ in 0..100_000 {
            let c = common::random_bits(&mut rng, code.chunk_bits());
            let pair = to_basis_deviation(&c, &code).unwrap();
            assert_eq!(from_basis_deviation(&pair, &code).unwrap(), c);
        }
    }
}

proptest! {
    #[test]
    fn parity_is_linear(a in proptest::collection::vec(any::<u8>(), 14), b in proptest::collection::vec(any::<u8>(), 14)) {
        let code = CodeParams::build(7, 15).unwrap();
        let a = Bits::from_prefix(&a, 105);
        let b = Bits::from_prefix(&b, 105);
        let sum: Vec<u8> = a.as_bytes().iter().zip(b.as_bytes()).map(|(x, y)| x ^ y).collect();
        let sum = Bits::from_prefix(&sum, 105);
        prop_assert_eq!(
            code.encode_parity(&sum).unwrap(),
            code.encode_parity(&a).unwrap() ^ code.encode_parity(&b).unwrap()
        );
    }

    #[test]
    fn multi_row_code_round_trips(bytes in proptest::collection::vec(any::<u8>(), 108)) {
        let code = CodeParams::for_chunk_bits(864).unwrap();
        let c = Bits::from_prefix(&bytes, 864);
        let pair = to_basis_deviation(&c, &code).unwrap();
        prop_assert_eq!(from_basis_deviation(&pair, &code).unwrap(), c);
    }
}

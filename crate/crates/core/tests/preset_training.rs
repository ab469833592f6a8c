mod common;

use gdcan::preset::{count_frequencies, merge_round_robin, train, truncate_to_flash};
use gdcan::{Bits, CodeParams, FingerprintAlgo, PresetDictionary};
use proptest::prelude::*;

#[test]
fn round_robin_fixture_order() {
    let code = CodeParams::build(7, 15).unwrap();
    let (bases, files) = common::trainer_fixture(&code);
    let algo = FingerprintAlgo::Crc32;
    let dict = train(files.iter().map(|f| f.iter()), 1 << 20, &code, algo).unwrap();
    // A, C, D, B, E
    assert_eq!(dict.fingerprints(), common::fingerprints_of(&bases, &[0, 2, 3, 1, 4]).as_slice());

    let mut doubled = files.clone();
    doubled[2] = files[2].iter().flat_map(|c| [c.clone(), c.clone()]).collect();
    let again = train(doubled.iter().map(|f| f.iter()), 1 << 20, &code, algo).unwrap();
    assert_eq!(again.fingerprints(), dict.fingerprints());
    assert_eq!(again.dict_id(), dict.dict_id());
}

#[test]
fn per_file_counts() {
    let code = CodeParams::build(7, 15).unwrap();
    let (_, files) = common::trainer_fixture(&code);
    let ranked = count_frequencies(&files[2], &code, FingerprintAlgo::Crc32).unwrap();
    assert_eq!(ranked.iter().map(|e| e.count).collect::<Vec<_>>(), vec![6, 4]);
}

#[test]
fn training_is_deterministic() {
    let code = CodeParams::build(8, 39).unwrap();
    let bases = common::random_bases(&code, 40, 3);
    let files: Vec<Vec<Bits>> = (0..4).map(|s| common::noisy_chunks(&code, &bases, 500, s).0).collect();
    let a = train(files.iter().map(|f| f.iter()), 64, &code, FingerprintAlgo::Fnv64).unwrap();
    let b = train(files.iter().map(|f| f.iter()), 64, &code, FingerprintAlgo::Fnv64).unwrap();
    assert_eq!(a.to_compressor_bytes(), b.to_compressor_bytes());
    assert_eq!(a.to_decompressor_bytes().unwrap(), b.to_decompressor_bytes().unwrap());
    assert_eq!(a.len(), 8);
}

proptest! {
    #[test]
    fn merge_is_duplicate_free_union(lists in proptest::collection::vec(
        proptest::collection::hash_set(0u8..40, 0..15), 1..5)) {
        let code = CodeParams::build(3, 0).unwrap();
        let per_file: Vec<Vec<_>> = lists
            .iter()
            .map(|set| {
                let chunks: Vec<Bits> = set
                    .iter()
                    .flat_map(|&k| {
                        let basis = Bits::from_prefix(&[k << 4], 4);
                        vec![code.codeword(&basis).unwrap(); (k as usize % 3) + 1]
                    })
                    .collect();
                count_frequencies(&chunks, &code, FingerprintAlgo::Crc32).unwrap()
            })
            .collect();
        let merged = merge_round_robin(&per_file);
        let mut seen = std::collections::HashSet::new();
        for e in &merged {
            prop_assert!(seen.insert(e.fingerprint));
        }
        let union: std::collections::HashSet<_> =
            per_file.iter().flatten().map(|e| e.fingerprint).collect();
        prop_assert_eq!(seen, union);

        let dict = truncate_to_flash(&merged, usize::MAX / 2, &code, FingerprintAlgo::Crc32).unwrap();
        let back = PresetDictionary::from_bytes(&dict.to_decompressor_bytes().unwrap()).unwrap();
        prop_assert_eq!(&back, &dict);
        let comp = PresetDictionary::from_bytes(&dict.to_compressor_bytes()).unwrap();
        prop_assert_eq!(comp.dict_id(), dict.dict_id());
    }
}

#![allow(dead_code)]

pub mod dense;
pub mod lru;

use gdcan::{Bits, CanRecord, CodeParams, Fingerprint, FingerprintAlgo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Any record satisfying the invariants, every field random.
pub fn arbitrary_record(rng: &mut impl Rng) -> CanRecord {
    let ide = rng.random_range(0..=1u8);
    let identifier = if ide == 0 {
        rng.random_range(0..1 << 11)
    } else {
        rng.random_range(0..1 << 29)
    };
    let data_length = rng.random_range(0..=8u8);
    let mut data = [0u8; 8];
    rng.fill(&mut data[..data_length as usize]);
    CanRecord {
        timestamp: rng.random(),
        identifier,
        ide,
        dlc: rng.random(),
        edl: rng.random_range(0..=1),
        brs: rng.random_range(0..=1),
        dir: rng.random_range(0..=1),
        channel: rng.random_range(0..4),
        data_length,
        data,
    }
}

struct Profile {
    identifier: u32,
    ide: u8,
    channel: u8,
    data_length: u8,
    data: [u8; 8],
}

/// A log-like stream: a fixed set of periodic message types whose payloads
/// drift slowly, with mostly increasing timestamps.
pub fn log_records(n: usize, seed: u64) -> Vec<CanRecord> {
    let mut rng = rng(seed);
    let mut profiles: Vec<Profile> = (0..24)
        .map(|_| {
            let ide = rng.random_bool(0.2) as u8;
            let data_length = rng.random_range(1..=8);
            let mut data = [0u8; 8];
            rng.fill(&mut data[..data_length as usize]);
            Profile {
                identifier: if ide == 0 {
                    rng.random_range(0..1 << 11)
                } else {
                    rng.random_range(0..1 << 29)
                },
                ide,
                channel: rng.random_range(1..=2),
                data_length,
                data,
            }
        })
        .collect();
    let mut t: u64 = rng.random_range(0..1 << 40);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.01) {
                t = t.wrapping_sub(rng.random_range(0..1000));
            } else {
                t += rng.random_range(100..5000);
            }
            let k = rng.random_range(0..profiles.len());
            let p = &mut profiles[k];
            let mut data = p.data;
            if rng.random_bool(0.3) {
                let i = rng.random_range(0..p.data_length as usize);
                data[i] ^= 1 << rng.random_range(0..8);
                p.data = data;
            }
            CanRecord {
                timestamp: t,
                identifier: p.identifier,
                ide: p.ide,
                dlc: p.data_length,
                edl: 0,
                brs: 0,
                dir: 0,
                channel: p.channel,
                data_length: p.data_length,
                data,
            }
        })
        .collect()
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> Bits {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    rng.fill(&mut bytes[..]);
    Bits::from_prefix(&bytes, len)
}

/// Chunks drawn uniformly from `bases`, each the basis' codeword with at most
/// one retained bit flipped (no flip with probability 1 / (chunk_bits + 1)).
pub fn noisy_chunks(code: &CodeParams, bases: &[Bits], count: usize, seed: u64) -> (Vec<Bits>, Vec<usize>) {
    let mut rng = rng(seed);
    let words: Vec<Bits> = bases.iter().map(|b| code.codeword(b).unwrap()).collect();
    let mut picks = Vec::with_capacity(count);
    let chunks = (0..count)
        .map(|_| {
            let i = rng.random_range(0..words.len());
            picks.push(i);
            let mut chunk = words[i].clone();
            let pos = rng.random_range(0..=code.chunk_bits());
            if pos < code.chunk_bits() {
                chunk.flip(pos);
            }
            chunk
        })
        .collect();
    (chunks, picks)
}

pub fn random_bases(code: &CodeParams, n: usize, seed: u64) -> Vec<Bits> {
    let mut rng = rng(seed);
    (0..n).map(|_| random_bits(&mut rng, code.basis_bits())).collect()
}

/// Five bases A..E and three files with engineered counts:
/// file 1 = A x5, B x2; file 2 = C x3, A x1; file 3 = D x6, E x4.
/// C (count 3) is ranked above E (count 4) because only per-file rank matters.
pub fn trainer_fixture(code: &CodeParams) -> (Vec<Bits>, Vec<Vec<Bits>>) {
    let bases = random_bases(code, 5, 77);
    let noisy = |i: usize, n: usize, seed: u64| {
        noisy_chunks(code, &bases[i..=i], n, seed).0
    };
    let interleave = |mut a: Vec<Bits>, b: Vec<Bits>| {
        // keep a's first occurrence ahead of b's
        let rest = a.split_off(1);
        let mut out = a;
        let mut b = b.into_iter();
        for x in rest {
            out.push(x);
            out.extend(b.next());
        }
        out.extend(b);
        out
    };
    let file1 = interleave(noisy(0, 5, 1), noisy(1, 2, 2));
    let file2 = interleave(noisy(2, 3, 3), noisy(0, 1, 4));
    let file3 = interleave(noisy(3, 6, 5), noisy(4, 4, 6));
    (bases, vec![file1, file2, file3])
}

pub fn fingerprints_of(bases: &[Bits], order: &[usize]) -> Vec<Fingerprint> {
    order
        .iter()
        .map(|&i| Fingerprint::of(bases[i].as_bytes(), FingerprintAlgo::Crc32))
        .collect()
}

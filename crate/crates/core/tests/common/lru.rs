use std::collections::HashMap;

use gdcan::{DynamicDictionary, Fingerprint, FingerprintAlgo};
use rand::Rng;

/// Map plus a recency list scanned linearly; front is least recent.
pub struct ModelLru {
    pub capacity: usize,
    pub ids: HashMap<u64, u64>,
    pub order: Vec<u64>,
    pub next_id: u64,
}

impl ModelLru {
    pub fn new(capacity: usize) -> Self {
        ModelLru {
            capacity,
            ids: HashMap::new(),
            order: Vec::new(),
            next_id: 0,
        }
    }

    pub fn lookup(&mut self, key: u64) -> Option<u64> {
        let id = *self.ids.get(&key)?;
        let pos = self.order.iter().position(|&k| k == key).unwrap();
        self.order.remove(pos);
        self.order.push(key);
        Some(id)
    }

    pub fn insert(&mut self, key: u64) -> (u64, Option<(u64, u64)>) {
        let id = self.next_id;
        self.next_id += 1;
        if self.capacity == 0 {
            return (id, None);
        }
        let mut evicted = None;
        if self.order.len() == self.capacity {
            let victim = self.order.remove(0);
            evicted = Some((victim, self.ids.remove(&victim).unwrap()));
        }
        self.order.push(key);
        self.ids.insert(key, id);
        (id, evicted)
    }
}

pub fn key_fp(key: u64) -> Fingerprint {
    Fingerprint::of(&key.to_le_bytes(), FingerprintAlgo::Fnv64)
}

/// Runs `ops` lookup-then-insert-on-miss steps over `keys` distinct keys.
pub fn compare(capacity: usize, keys: u64, ops: usize, seed: u64) {
    let mut rng = super::rng(seed);
    let fp_to_key: HashMap<Fingerprint, u64> = (0..keys).map(|k| (key_fp(k), k)).collect();
    let mut model = ModelLru::new(capacity);
    let mut dict = DynamicDictionary::new(capacity);
    let mut last_id = None;
    for step in 0..ops {
        let key = rng.random_range(0..keys);
        let fp = key_fp(key);
        let got = dict.lookup_touch(&fp);
        assert_eq!(got, model.lookup(key), "step {step}: lookup of {key}");
        if got.is_none() {
            let ins = dict.insert(fp);
            let (id, evicted) = model.insert(key);
            assert_eq!(ins.id, id, "step {step}");
            assert_eq!(ins.evicted.map(|(f, i)| (fp_to_key[&f], i)), evicted, "step {step}");
            if let Some(prev) = last_id {
                assert!(ins.id > prev);
            }
            last_id = Some(ins.id);
        }
        assert!(dict.len() <= capacity);
        assert_eq!(dict.len(), model.order.len());
    }
    let order: Vec<u64> = dict.recency_order().iter().map(|(f, _)| fp_to_key[f]).collect();
    assert_eq!(order, model.order);
}

//! RAM-budgeted dynamic dictionary.
//!
//! Maps fingerprints to IDs handed out by a counter that only grows. When the
//! table is full the least recently matched entry is evicted; a hit moves the
//! entry to the back of the recency queue. No per-entry counters are kept.

use std::collections::HashMap;

use crate::bits::Bits;
use crate::fingerprint::Fingerprint;

/// How RAM cost per entry is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Accounting {
    /// Tiered: the first 128 entries cost `key + 1` bytes, the next 2^14 cost
    /// `key + 2`, the next 2^21 cost `key + 3`.
    Paper,
    /// Every entry costs `key + 4` bytes.
    #[default]
    Uniform,
}

impl std::str::FromStr for Accounting {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "paper" => Ok(Accounting::Paper),
            "uniform" => Ok(Accounting::Uniform),
            other => Err(crate::Error::Config(format!("unknown accounting mode {other:?}"))),
        }
    }
}

const TIERS: [(usize, usize); 3] = [(1 << 7, 1), (1 << 14, 2), (1 << 21, 3)];

/// Number of entries that fit in `ram_budget` bytes when each entry keys on
/// `key_len` bytes (the fingerprint, plus the basis when verifying).
pub fn capacity_for(ram_budget: usize, key_len: usize, accounting: Accounting) -> usize {
    match accounting {
        Accounting::Uniform => ram_budget / (key_len + 4),
        Accounting::Paper => {
            let mut left = ram_budget;
            let mut count = 0;
            for (tier_size, id_len) in TIERS {
                let cost = key_len + id_len;
                let fit = (left / cost).min(tier_size);
                count += fit;
                left -= fit * cost;
                if fit < tier_size {
                    break;
                }
            }
            count
        }
    }
}

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Slot {
    fp: Fingerprint,
    id: u64,
    basis: Option<Bits>,
    prev: usize,
    next: usize,
}

/// Result of [`DynamicDictionary::insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Insertion {
    pub id: u64,
    /// Entry pushed out to make room, if any.
    pub evicted: Option<(Fingerprint, u64)>,
}

#[derive(Debug, Clone)]
pub struct DynamicDictionary {
    capacity: usize,
    verify: bool,
    index: HashMap<Fingerprint, usize>,
    slots: Vec<Slot>,
    free: Vec<usize>,
    // front of the queue: next eviction victim
    head: usize,
    tail: usize,
    next_id: u64,
}

impl DynamicDictionary {
    pub fn new(capacity: usize) -> Self {
        DynamicDictionary {
            capacity,
            verify: false,
            index: HashMap::with_capacity(capacity.min(1 << 16)),
            slots: Vec::new(),
            free: Vec::new(),
            head: NIL,
            tail: NIL,
            next_id: 0,
        }
    }

    /// A dictionary that also stores each basis so that a fingerprint
    /// collision is reported as a miss.
    pub fn with_verification(capacity: usize) -> Self {
        DynamicDictionary {
            verify: true,
            ..DynamicDictionary::new(capacity)
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn verifies(&self) -> bool {
        self.verify
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The ID the next insertion will receive.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn contains(&self, fp: &Fingerprint) -> bool {
        self.index.contains_key(fp)
    }

    /// On a hit returns the ID and marks the entry most recently used.
    pub fn lookup_touch(&mut self, fp: &Fingerprint) -> Option<u64> {
        let slot = *self.index.get(fp)?;
        self.move_to_back(slot);
        Some(self.slots[slot].id)
    }

    /// Like [`lookup_touch`](Self::lookup_touch), but when verification is
    /// on a stored basis that differs from `basis` counts as a miss.
    pub fn lookup_touch_verified(&mut self, fp: &Fingerprint, basis: &Bits) -> Option<u64> {
        let slot = *self.index.get(fp)?;
        if self.verify && self.slots[slot].basis.as_ref() != Some(basis) {
            return None;
        }
        self.move_to_back(slot);
        Some(self.slots[slot].id)
    }

    /// Assigns the next ID to `fp`, evicting the front entry if full.
    ///
    /// With capacity 0 the ID is still consumed but nothing is stored.
    pub fn insert(&mut self, fp: Fingerprint) -> Insertion {
        self.insert_entry(fp, None)
    }

    /// Insert that keeps `basis` for verification (ignored when verification is off).
    pub fn insert_verified(&mut self, fp: Fingerprint, basis: &Bits) -> Insertion {
        let basis = self.verify.then(|| basis.clone());
        self.insert_entry(fp, basis)
    }

    fn insert_entry(&mut self, fp: Fingerprint, basis: Option<Bits>) -> Insertion {
        let id = self.next_id;
        self.next_id += 1;
        if self.capacity == 0 {
            return Insertion { id, evicted: None };
        }
        // a colliding fingerprint under verification replaces the old entry
        if let Some(slot) = self.index.remove(&fp) {
            self.unlink(slot);
            self.free.push(slot);
        }
        let mut evicted = None;
        if self.index.len() >= self.capacity {
            let victim = self.head;
            self.unlink(victim);
            let old = &self.slots[victim];
            self.index.remove(&old.fp);
            evicted = Some((old.fp, old.id));
            self.free.push(victim);
        }
        let entry = Slot {
            fp,
            id,
            basis,
            prev: NIL,
            next: NIL,
        };
        let slot = match self.free.pop() {
            Some(i) => {
                self.slots[i] = entry;
                i
            }
            None => {
                self.slots.push(entry);
                self.slots.len() - 1
            }
        };
        self.push_back(slot);
        self.index.insert(fp, slot);
        Insertion { id, evicted }
    }

    /// Drops every entry and restarts IDs at zero.
    pub fn clear(&mut self) {
        self.index.clear();
        self.slots.clear();
        self.free.clear();
        self.head = NIL;
        self.tail = NIL;
        self.next_id = 0;
    }

    #[cfg(test)]
    pub(crate) fn set_next_id(&mut self, id: u64) {
        self.next_id = id;
    }

    /// Entries from least to most recently used.
    pub fn recency_order(&self) -> Vec<(Fingerprint, u64)> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.head;
        while cur != NIL {
            out.push((self.slots[cur].fp, self.slots[cur].id));
            cur = self.slots[cur].next;
        }
        out
    }

    fn unlink(&mut self, slot: usize) {
        let (prev, next) = (self.slots[slot].prev, self.slots[slot].next);
        if prev == NIL {
            self.head = next;
        } else {
            self.slots[prev].next = next;
        }
        if next == NIL {
            self.tail = prev;
        } else {
            self.slots[next].prev = prev;
        }
        self.slots[slot].prev = NIL;
        self.slots[slot].next = NIL;
    }

    fn push_back(&mut self, slot: usize) {
        self.slots[slot].prev = self.tail;
        self.slots[slot].next = NIL;
        if self.tail == NIL {
            self.head = slot;
        } else {
            self.slots[self.tail].next = slot;
        }
        self.tail = slot;
    }

    fn move_to_back(&mut self, slot: usize) {
        if self.tail != slot {
            self.unlink(slot);
            self.push_back(slot);
        }
    }
}

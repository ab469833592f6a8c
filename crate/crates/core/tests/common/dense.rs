use gdcan::Bits;

/// Dense parity-check matrix: `rows[i][j]` is row i, chunk position j.
pub struct DenseCode {
    pub rows: Vec<Vec<u8>>,
    pub basis_bits: usize,
}

impl DenseCode {
    /// H(7,4): p1 = d1+d2+d4, p2 = d1+d3+d4, p3 = d2+d3+d4.
    pub fn h74() -> Self {
        DenseCode {
            rows: vec![
                vec![1, 1, 0, 1, 1, 0, 0],
                vec![1, 0, 1, 1, 0, 1, 0],
                vec![0, 1, 1, 1, 0, 0, 1],
            ],
            basis_bits: 4,
        }
    }

    /// H'(6,3): H(7,4) with message position d4 removed.
    pub fn h63() -> Self {
        DenseCode {
            rows: vec![
                vec![1, 1, 0, 1, 0, 0],
                vec![1, 0, 1, 0, 1, 0],
                vec![0, 1, 1, 0, 0, 1],
            ],
            basis_bits: 3,
        }
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn syndrome(&self, chunk: &[u8]) -> Vec<u8> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(chunk).fold(0, |acc, (a, b)| acc ^ (a & b)))
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// All codewords, by brute force over every chunk.
    pub fn codewords(&self) -> Vec<Vec<u8>> {
        all_chunks(self.n())
            .filter(|c| self.syndrome(c).iter().all(|&s| s == 0))
            .collect()
    }
}

pub fn all_chunks(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1u32 << n).map(move |v| (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect())
}

pub fn to_bits(v: &[u8]) -> Bits {
    Bits::from_bools(&v.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

pub fn syndrome_value(s: &[u8]) -> u16 {
    s.iter().enumerate().map(|(i, &b)| (b as u16) << i).sum()
}

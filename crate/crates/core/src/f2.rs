//! Dense F2 linear algebra on bit-packed vectors.
//!
//! Small dimensions (hundreds at most), so dense Gaussian elimination over
//! u64 words is more than fast enough and completely exact.

/// A vector over F2, bit-packed into u64 words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    n: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(n: usize) -> BitVec {
        BitVec {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.n);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn lowest_one(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of all set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).collect()
    }

    pub fn from_indices(n: usize, idx: &[usize]) -> BitVec {
        let mut v = BitVec::zeros(n);
        for &i in idx {
            v.flip(i);
        }
        v
    }
}

/// Echelon basis keyed by pivot (lowest set bit). Supports incremental
/// insertion, rank queries, and span membership.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<BitVec>, // each with a distinct lowest_one, kept sorted by pivot
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon { rows: vec![] }
    }

    /// Reduce v against the basis; returns the remainder.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        loop {
            let Some(p) = v.lowest_one() else { return v };
            match self.rows.iter().find(|r| r.lowest_one() == Some(p)) {
                Some(r) => v.xor_assign(r),
                None => return v,
            }
        }
    }

    /// Insert v if independent; returns true if the rank grew.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let r = self.reduce(v);
        if r.is_zero() {
            false
        } else {
            self.rows.push(r);
            self.rows.sort_by_key(|r| r.lowest_one());
            true
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// Rank of the span of the given vectors.
pub fn rank(vectors: &[BitVec]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Basis of the kernel of the linear map sending domain basis vector i to
/// `cols[i]`. Kernel vectors live in F2^(cols.len()).
pub fn kernel_basis(cols: &[BitVec]) -> Vec<BitVec> {
    let dom = cols.len();
    let mut kernel = vec![];
    // (image remainder, domain combination) pairs in echelon form by image pivot.
    let mut rows: Vec<(BitVec, BitVec)> = vec![];
    for (i, col) in cols.iter().enumerate() {
        let mut img = col.clone();
        let mut combo = BitVec::zeros(dom);
        combo.flip(i);
        loop {
            let Some(p) = img.lowest_one() else { break };
            match rows.iter().find(|(r, _)| r.lowest_one() == Some(p)) {
                Some((r, c)) => {
                    // Clone to appease the borrow checker; dimensions are tiny.
                    let (r, c) = (r.clone(), c.clone());
                    img.xor_assign(&r);
                    combo.xor_assign(&c);
                }
                None => break,
            }
        }
        if img.is_zero() {
            kernel.push(combo);
        } else {
            rows.push((img, combo));
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvec_basics() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.ones(), vec![0, 64, 129]);
        assert_eq!(v.lowest_one(), Some(0));
        v.flip(0);
        assert_eq!(v.lowest_one(), Some(64));
        let w = BitVec::from_indices(130, &[64, 100]);
        v.xor_assign(&w);
        assert_eq!(v.ones(), vec![100, 129]);
    }

    #[test]
    fn rank_and_span() {
        let n = 5;
        let a = BitVec::from_indices(n, &[0, 1]);
        let b = BitVec::from_indices(n, &[1, 2]);
        let c = BitVec::from_indices(n, &[0, 2]); // a + b
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        let mut e = Echelon::new();
        e.insert(a);
        e.insert(b);
        assert!(e.contains(&c));
        assert!(!e.contains(&BitVec::from_indices(n, &[3])));
    }

    #[test]
    fn kernel_of_map() {
        // Map F2^3 -> F2^2: e0 -> (1,0), e1 -> (1,0), e2 -> (0,0).
        let cols = vec![
            BitVec::from_indices(2, &[0]),
            BitVec::from_indices(2, &[0]),
            BitVec::zeros(2),
        ];
        let k = kernel_basis(&cols);
        assert_eq!(k.len(), 2);
        // Kernel contains e0 + e1 and e2.
        let mut e = Echelon::new();
        for v in &k {
            e.insert(v.clone());
        }
        assert!(e.contains(&BitVec::from_indices(3, &[0, 1])));
        assert!(e.contains(&BitVec::from_indices(3, &[2])));
        assert!(!e.contains(&BitVec::from_indices(3, &[0])));
    }
}

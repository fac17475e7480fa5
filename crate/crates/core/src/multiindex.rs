//! Ordered multi-indices and permutation signs.
//!
//! Indices are 1-based throughout, so `I(k, n)` is the set of strictly
//! increasing `k`-tuples drawn from `1..=n`.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn pow(self, exp: usize) -> Self {
        if exp.is_multiple_of(2) {
            Sign::Plus
        } else {
            self
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply<T: Neg<Output = T>>(self, value: T) -> T {
        match self {
            Sign::Plus => value,
            Sign::Minus => -value,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Strictly increasing tuple of indices in `1..=ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<usize>,
    ambient: usize,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>, ambient: usize) -> Result<Self> {
        if entries.len() > ambient {
            return Err(Error::domain(format!(
                "multi-index {entries:?} longer than ambient {ambient}"
            )));
        }
        for (pos, &e) in entries.iter().enumerate() {
            if e == 0 || e > ambient {
                return Err(Error::domain(format!(
                    "index {e} outside 1..={ambient}"
                )));
            }
            if pos > 0 && entries[pos - 1] >= e {
                return Err(Error::domain(format!(
                    "multi-index {entries:?} is not strictly increasing"
                )));
            }
        }
        Ok(MultiIndex { entries, ambient })
    }

    /// The empty index, written `0` in the usual notation.
    pub fn empty(ambient: usize) -> Self {
        MultiIndex {
            entries: Vec::new(),
            ambient,
        }
    }

    /// `(1, 2, ..., k)`.
    pub fn leading(k: usize, ambient: usize) -> Result<Self> {
        MultiIndex::new((1..=k).collect(), ambient)
    }

    pub fn single(i: usize, ambient: usize) -> Result<Self> {
        MultiIndex::new(vec![i], ambient)
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.entries.binary_search(&i).is_ok()
    }

    /// 1-based position of `i`, if present.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.entries.binary_search(&i).ok().map(|p| p + 1)
    }

    /// The complementary index in `1..=ambient`.
    pub fn complement(&self) -> MultiIndex {
        let entries = (1..=self.ambient).filter(|i| !self.contains(*i)).collect();
        MultiIndex {
            entries,
            ambient: self.ambient,
        }
    }

    /// `self - i`.
    pub fn remove(&self, i: usize) -> Result<MultiIndex> {
        let pos = self
            .entries
            .binary_search(&i)
            .map_err(|_| Error::domain(format!("{i} is not in {self}")))?;
        let mut entries = self.entries.clone();
        entries.remove(pos);
        Ok(MultiIndex {
            entries,
            ambient: self.ambient,
        })
    }

    /// `self + j`.
    pub fn insert(&self, j: usize) -> Result<MultiIndex> {
        if j == 0 || j > self.ambient {
            return Err(Error::domain(format!(
                "index {j} outside 1..={}",
                self.ambient
            )));
        }
        match self.entries.binary_search(&j) {
            Ok(_) => Err(Error::domain(format!("{j} is already in {self}"))),
            Err(pos) => {
                let mut entries = self.entries.clone();
                entries.insert(pos, j);
                Ok(MultiIndex {
                    entries,
                    ambient: self.ambient,
                })
            }
        }
    }

    /// Same entries viewed inside a larger ambient range.
    pub fn widen(&self, ambient: usize) -> Result<MultiIndex> {
        MultiIndex::new(self.entries.clone(), ambient)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All elements of `I(k, n)` in lexicographic order.
pub fn enumerate(k: usize, n: usize) -> Result<Vec<MultiIndex>> {
    if k > n {
        return Err(Error::domain(format!("I({k},{n}) requires k <= n")));
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(MultiIndex {
            entries: current.clone(),
            ambient: n,
        });
        // advance the rightmost entry that still has room
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if current[pos] < n - (k - 1 - pos) {
                break;
            }
        }
        current[pos] += 1;
        for q in pos + 1..k {
            current[q] = current[q - 1] + 1;
        }
    }
}

/// Parity of the permutation that sorts the concatenation `(a, b)`.
pub fn sigma(a: &MultiIndex, b: &MultiIndex) -> Result<Sign> {
    // inversions only occur across the two blocks since each is sorted
    let mut inversions = 0usize;
    let mut j = 0;
    for &x in a.entries() {
        while j < b.len() && b.entries()[j] < x {
            j += 1;
        }
        if j < b.len() && b.entries()[j] == x {
            return Err(Error::domain(format!("{a} and {b} overlap at {x}")));
        }
        inversions += j;
    }
    Ok(Sign::from_parity(inversions % 2 == 1))
}

/// Sign of an arbitrary sequence of distinct values by inversion count.
pub fn inversion_sign(values: &[usize]) -> Sign {
    let mut inversions = 0usize;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] > values[j] {
                inversions += 1;
            }
        }
    }
    Sign::from_parity(inversions % 2 == 1)
}

/// A permutation of `1..=r` together with its sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    images: Vec<usize>,
    sign: Sign,
}

impl SignedPermutation {
    /// Checks that `images` is a permutation of `1..=r` and computes its sign.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let r = images.len();
        let mut seen = vec![false; r + 1];
        for &v in &images {
            if v == 0 || v > r || seen[v] {
                return Err(Error::domain(format!("{images:?} is not a permutation")));
            }
            seen[v] = true;
        }
        let sign = inversion_sign(&images);
        Ok(SignedPermutation { images, sign })
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }
}

/// Heap's algorithm over `S_r`: consecutive permutations differ by one
/// transposition, so the sign is toggled rather than recomputed.
///
/// Yields 0-based image vectors with their signs, identity first.
#[derive(Debug, Clone)]
pub struct HeapPermutations {
    current: Vec<usize>,
    counters: Vec<usize>,
    sign: Sign,
    index: usize,
    started: bool,
    done: bool,
}

impl HeapPermutations {
    pub fn new(r: usize) -> Self {
        HeapPermutations {
            current: (0..r).collect(),
            counters: vec![0; r],
            sign: Sign::Plus,
            index: 1,
            started: false,
            done: false,
        }
    }
}

impl Iterator for HeapPermutations {
    type Item = (Vec<usize>, Sign);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some((self.current.clone(), self.sign));
        }
        let n = self.current.len();
        while self.index < n {
            if self.counters[self.index] < self.index {
                let swap_with = if self.index.is_multiple_of(2) {
                    0
                } else {
                    self.counters[self.index]
                };
                self.current.swap(swap_with, self.index);
                self.sign = self.sign.flip();
                self.counters[self.index] += 1;
                self.index = 1;
                return Some((self.current.clone(), self.sign));
            }
            self.counters[self.index] = 0;
            self.index += 1;
        }
        self.done = true;
        None
    }
}

/// All of `S_r` as 0-based images with signs, in Heap order.
pub fn signed_permutations(r: usize) -> Vec<(Vec<usize>, Sign)> {
    HeapPermutations::new(r).collect()
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[usize], n: usize) -> MultiIndex {
        MultiIndex::new(e.to_vec(), n).unwrap()
    }

    #[test]
    fn enumerate_small_cases() {
        let got: Vec<Vec<usize>> = enumerate(2, 3)
            .unwrap()
            .iter()
            .map(|m| m.entries().to_vec())
            .collect();
        assert_eq!(got, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let zero = enumerate(0, 5).unwrap();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_empty());
        assert_eq!(enumerate(3, 3).unwrap()[0].entries(), &[1, 2, 3]);
        assert!(enumerate(4, 3).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(mi(&[1, 3], 4).complement(), mi(&[2, 4], 4));
        assert_eq!(MultiIndex::empty(2).complement(), mi(&[1, 2], 2));
        assert!(mi(&[1, 2, 3], 3).complement().is_empty());
    }

    #[test]
    fn remove_and_insert() {
        assert_eq!(mi(&[1, 2, 4], 4).remove(2).unwrap(), mi(&[1, 4], 4));
        assert_eq!(mi(&[1, 4], 4).insert(2).unwrap(), mi(&[1, 2, 4], 4));
        assert_eq!(MultiIndex::empty(3).insert(3).unwrap(), mi(&[3], 3));
        assert!(mi(&[1, 4], 4).remove(2).is_err());
        assert!(mi(&[1, 4], 4).insert(4).is_err());
        assert!(mi(&[1, 4], 4).insert(5).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&mi(&[2], 3), &mi(&[1], 3)).unwrap(), Sign::Minus);
        assert_eq!(sigma(&mi(&[1, 3], 3), &mi(&[2], 3)).unwrap(), Sign::Minus);
        assert_eq!(
            sigma(&MultiIndex::empty(3), &MultiIndex::empty(3)).unwrap(),
            Sign::Plus
        );
        assert!(sigma(&mi(&[1, 2], 3), &mi(&[2], 3)).is_err());
    }

    #[test]
    fn invalid_indices_rejected() {
        assert!(MultiIndex::new(vec![2, 1], 3).is_err());
        assert!(MultiIndex::new(vec![0], 3).is_err());
        assert!(MultiIndex::new(vec![4], 3).is_err());
    }

    #[test]
    fn heap_signs_match_inversions() {
        for r in 0..=6 {
            let perms = signed_permutations(r);
            assert_eq!(perms.len() as u128, factorial(r));
            let mut seen = std::collections::HashSet::new();
            for (p, s) in &perms {
                assert_eq!(inversion_sign(p), *s);
                assert!(seen.insert(p.clone()));
            }
        }
    }

    #[test]
    fn signed_permutation_validates() {
        let p = SignedPermutation::from_images(vec![2, 1, 3]).unwrap();
        assert_eq!(p.sign(), Sign::Minus);
        assert!(SignedPermutation::from_images(vec![1, 1]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn disjoint_pair() -> impl Strategy<Value = (MultiIndex, MultiIndex)> {
            (1usize..9).prop_flat_map(|n| {
                proptest::collection::vec(0u8..3, n).prop_map(move |labels| {
                    let a = labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| **l == 1)
                        .map(|(i, _)| i + 1)
                        .collect();
                    let b = labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| **l == 2)
                        .map(|(i, _)| i + 1)
                        .collect();
                    (MultiIndex::new(a, n).unwrap(), MultiIndex::new(b, n).unwrap())
                })
            })
        }

        proptest! {
            #[test]
            fn sigma_antisymmetry((a, b) in disjoint_pair()) {
                let lhs = sigma(&a, &b).unwrap() * sigma(&b, &a).unwrap();
                prop_assert_eq!(lhs, Sign::Minus.pow(a.len() * b.len()));
            }

            #[test]
            fn enumerate_counts(n in 0usize..9, k in 0usize..9) {
                prop_assume!(k <= n);
                let all = enumerate(k, n).unwrap();
                prop_assert_eq!(all.len() as u128, binomial(n, k));
                for w in all.windows(2) {
                    prop_assert!(w[0] < w[1]);
                }
            }

            #[test]
            fn remove_insert_identity(n in 1usize..9, mask in 0u32..512, pick in 0usize..9) {
                let entries: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                prop_assume!(!entries.is_empty());
                let a = MultiIndex::new(entries.clone(), n).unwrap();
                let i = entries[pick % entries.len()];
                prop_assert_eq!(a.remove(i).unwrap().insert(i).unwrap(), a.clone());
                let expected = Sign::Minus.pow(a.position(i).unwrap() - 1);
                let single = MultiIndex::single(i, n).unwrap();
                prop_assert_eq!(sigma(&single, &a.remove(i).unwrap()).unwrap(), expected);
            }
        }
    }
}

//! Canonical element encodings.
//!
//! Every group kind has exactly one encoding per element, so `Eq`/`Hash` on
//! [`Element`] is element equality. `Ord` on two elements of the same kind
//! agrees with the owning group's enumeration order, which makes
//! `BTreeSet<Element>` iterate in enumeration order.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A finite subset of the naturals, stored as little-endian 64-bit words with
/// trailing zero words trimmed.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: SmallVec<[u64; 2]>,
}

impl BitSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_u64(bits: u64) -> Self {
        let mut set = BitSet::new();
        if bits != 0 {
            set.words.push(bits);
        }
        set
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut set = BitSet::new();
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn contains(&self, i: u32) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn insert(&mut self, i: u32) {
        let (w, b) = ((i / 64) as usize, i % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Position of the highest set bit.
    pub fn highest(&self) -> Option<u32> {
        let last = *self.words.last()?;
        Some((self.words.len() as u32 - 1) * 64 + 63 - last.leading_zeros())
    }

    /// The value as an integer, if every set bit is below 64.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn symmetric_difference(&self, other: &BitSet) -> BitSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w ^= s;
        }
        while words.last() == Some(&0) {
            words.pop();
        }
        BitSet { words }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            (0..64u32)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w as u32 * 64 + b)
        })
    }
}

impl Ord for BitSet {
    /// Numeric order of the encoded binary integer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

pub type Coords = SmallVec<[i64; 4]>;
pub type Image = SmallVec<[u32; 8]>;

/// A group element in the canonical form of its group kind.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    /// Finite groups addressed by enumeration index (cyclic, Cayley table,
    /// direct product in mixed radix).
    Index(u64),
    /// Integer lattice point.
    Vector(Coords),
    /// Element of the Boolean direct sum: the set of coordinates equal to 1.
    Bits(BitSet),
    /// Permutation in one-line notation.
    Perm(Image),
}

impl Element {
    pub fn vector<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        Element::Vector(coords.into_iter().collect())
    }

    pub fn bits<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Element::Bits(BitSet::from_indices(indices))
    }

    pub fn perm<I: IntoIterator<Item = u32>>(image: I) -> Self {
        Element::Perm(image.into_iter().collect())
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Element::Index(_) => 0,
            Element::Vector(_) => 1,
            Element::Bits(_) => 2,
            Element::Perm(_) => 3,
        }
    }
}

/// Position of an integer in the sequence 0, 1, -1, 2, -2, ...
pub fn spiral_key(v: i64) -> u64 {
    if v > 0 {
        2 * v as u64 - 1
    } else {
        2 * v.unsigned_abs()
    }
}

/// Inverse of [`spiral_key`].
pub fn spiral_value(key: u64) -> i64 {
    if key % 2 == 1 {
        key.div_ceil(2) as i64
    } else {
        -((key / 2) as i64)
    }
}

pub fn max_norm(coords: &[i64]) -> u64 {
    coords.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

fn spiral_cmp(a: &[i64], b: &[i64]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| max_norm(a).cmp(&max_norm(b)))
        .then_with(|| a.iter().map(|&v| spiral_key(v)).cmp(b.iter().map(|&v| spiral_key(v))))
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Element::Index(a), Element::Index(b)) => a.cmp(b),
            (Element::Vector(a), Element::Vector(b)) => spiral_cmp(a, b),
            (Element::Bits(a), Element::Bits(b)) => a.cmp(b),
            (Element::Perm(a), Element::Perm(b)) => a.cmp(b),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Index(i) => write!(f, "{i}"),
            Element::Vector(v) => {
                f.write_str("(")?;
                for (k, c) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            Element::Bits(b) => write!(f, "{b}"),
            Element::Perm(p) => {
                f.write_str("[")?;
                for (k, c) in p.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Formats a set of elements as `{e1,e2,...}` in the given order.
pub fn format_set<'a, I: IntoIterator<Item = &'a Element>>(elements: I) -> String {
    let items: Vec<String> = elements.into_iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_ordering_is_binary_value() {
        let mut sets: Vec<BitSet> = (0..300u64).map(BitSet::from_u64).collect();
        sets.reverse();
        sets.sort();
        for (n, s) in sets.iter().enumerate() {
            assert_eq!(s.as_u64(), Some(n as u64));
        }
        let high = BitSet::from_indices([70]);
        assert!(high > BitSet::from_u64(u64::MAX));
        assert_eq!(high.highest(), Some(70));
    }

    #[test]
    fn symmetric_difference_trims() {
        let a = BitSet::from_indices([0, 70]);
        let b = BitSet::from_indices([70]);
        let c = a.symmetric_difference(&b);
        assert_eq!(c, BitSet::from_indices([0]));
        assert_eq!(c.as_u64(), Some(1));
        assert!(a.symmetric_difference(&a).is_empty());
    }

    #[test]
    fn spiral_roundtrip() {
        let seq: Vec<i64> = (0..7).map(spiral_value).collect();
        assert_eq!(seq, vec![0, 1, -1, 2, -2, 3, -3]);
        for v in -50..50 {
            assert_eq!(spiral_value(spiral_key(v)), v);
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(Element::Index(7).to_string(), "7");
        assert_eq!(Element::vector([1, -2]).to_string(), "(1,-2)");
        assert_eq!(Element::bits([2, 0]).to_string(), "{0,2}");
        assert_eq!(Element::bits([]).to_string(), "{}");
        assert_eq!(Element::perm([2, 0, 1]).to_string(), "[2,0,1]");
    }
}

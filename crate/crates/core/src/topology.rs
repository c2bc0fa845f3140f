//! Base families standing in for a topology: an ordered list of base sets,
//! each with decidable membership and an enumeration-order member stream.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::element::{BitSet, Element};
use crate::error::{Error, Result};
use crate::group::Group;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSet {
    /// A finite list of elements.
    Explicit(BTreeSet<Element>),
    /// Lattice points with `v_i ≡ residue_i (mod modulus_i)` for every `i`.
    Progression { moduli: Vec<u64>, residues: Vec<i64> },
    /// Boolean-sum elements whose listed coordinates carry the given bits.
    Cylinder(BTreeMap<u32, bool>),
    /// Everything except a finite set.
    Cofinite(BTreeSet<Element>),
}

impl BaseSet {
    pub fn explicit<I: IntoIterator<Item = Element>>(elements: I) -> Self {
        BaseSet::Explicit(elements.into_iter().collect())
    }

    pub fn progression(moduli: Vec<u64>, residues: Vec<i64>) -> Self {
        BaseSet::Progression { moduli, residues }
    }

    pub fn cylinder<I: IntoIterator<Item = (u32, bool)>>(fixed: I) -> Self {
        BaseSet::Cylinder(fixed.into_iter().collect())
    }

    pub fn cofinite<I: IntoIterator<Item = Element>>(excluded: I) -> Self {
        BaseSet::Cofinite(excluded.into_iter().collect())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BaseSet::Explicit(_))
    }

    /// Checks that the set's kind fits the group.
    pub fn check_against(&self, group: &Group) -> Result<()> {
        let bad = |why: String| Err(Error::Precondition(why));
        match self {
            BaseSet::Explicit(s) | BaseSet::Cofinite(s) => {
                if let Some(g) = s.iter().find(|g| !group.contains(g)) {
                    return Err(Error::NotInGroup(g.clone()));
                }
                Ok(())
            }
            BaseSet::Progression { moduli, residues } => match group.lattice_rank() {
                Some(r) if r == moduli.len() && r == residues.len() => {
                    if moduli.contains(&0) {
                        return bad("progression modulus must be positive".into());
                    }
                    Ok(())
                }
                _ => bad(format!("progression does not fit {}", group.describe())),
            },
            BaseSet::Cylinder(_) if group.is_boolean() => Ok(()),
            BaseSet::Cylinder(_) => bad(format!(
                "cylinder sets need the Boolean group, not {}",
                group.describe()
            )),
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (self, g) {
            (BaseSet::Explicit(s), _) => s.contains(g),
            (BaseSet::Cofinite(s), _) => !s.contains(g),
            (BaseSet::Progression { moduli, residues }, Element::Vector(v)) => v
                .iter()
                .zip(moduli.iter().zip(residues.iter()))
                .all(|(&c, (&m, &r))| (c - r).rem_euclid(m as i64) == 0),
            (BaseSet::Cylinder(fixed), Element::Bits(b)) => fixed.iter().all(|(&i, &bit)| b.contains(i) == bit),
            _ => false,
        }
    }

    /// Members in the parent group's enumeration order.
    pub fn members<'a>(&'a self, group: &'a Group) -> Box<dyn Iterator<Item = Element> + 'a> {
        match self {
            BaseSet::Explicit(s) => Box::new(s.iter().cloned()),
            BaseSet::Cylinder(fixed) => {
                // deposit the counter bits into the free coordinates; this is
                // monotone, so the stream stays in binary order
                let ones: Vec<u32> = fixed.iter().filter(|(_, &b)| b).map(|(&i, _)| i).collect();
                Box::new((0u64..).map(move |n| {
                    let mut set = BitSet::from_indices(ones.iter().copied());
                    let (mut rest, mut pos) = (n, 0u32);
                    while rest != 0 {
                        if !fixed.contains_key(&pos) {
                            if rest & 1 == 1 {
                                set.insert(pos);
                            }
                            rest >>= 1;
                        }
                        pos += 1;
                    }
                    Element::Bits(set)
                }))
            }
            _ => Box::new(group.elements().filter(move |g| self.contains(g))),
        }
    }

    /// The `i`-th member, or `None` when a finite set runs out.
    pub fn member(&self, group: &Group, i: usize) -> Option<Element> {
        self.members(group).nth(i)
    }

    /// Number of distinct members among the first `k` drawn from the stream.
    /// `k` means "infinite enough".
    pub fn infinite_guard(&self, group: &Group, k: usize) -> usize {
        let mut distinct = BTreeSet::new();
        for g in self.members(group).take(k) {
            distinct.insert(g);
        }
        distinct.len()
    }
}

impl fmt::Display for BaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSet::Explicit(s) => write!(f, "explicit{}", crate::element::format_set(s)),
            BaseSet::Cofinite(s) => write!(f, "cofinite(excluding {})", crate::element::format_set(s)),
            BaseSet::Progression { moduli, residues } => {
                let parts: Vec<String> = moduli
                    .iter()
                    .zip(residues.iter())
                    .map(|(m, r)| format!("{m}Z+{}", r.rem_euclid(*m as i64)))
                    .collect();
                write!(f, "ap({})", parts.join(","))
            }
            BaseSet::Cylinder(fixed) => {
                let parts: Vec<String> = fixed.iter().map(|(i, b)| format!("{i}->{}", *b as u8)).collect();
                write!(f, "cylinder{{{}}}", parts.join(","))
            }
        }
    }
}

/// Ordered base sets over one group; index order is the priority order of
/// density obligations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BaseFamily {
    sets: Vec<BaseSet>,
}

impl BaseFamily {
    pub fn new(sets: Vec<BaseSet>) -> Self {
        BaseFamily { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&BaseSet> {
        self.sets.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BaseSet> {
        self.sets.iter()
    }

    pub fn check_against(&self, group: &Group) -> Result<()> {
        self.sets.iter().try_for_each(|s| s.check_against(group))
    }

    /// Indices of sets that are not infinite-enough at `k` probes.
    pub fn thin_sets(&self, group: &Group, k: usize) -> Vec<usize> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.infinite_guard(group, k) < k)
            .map(|(i, _)| i)
            .collect()
    }
}

impl<'a> IntoIterator for &'a BaseFamily {
    type Item = &'a BaseSet;
    type IntoIter = std::slice::Iter<'a, BaseSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

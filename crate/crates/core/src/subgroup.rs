//! Subgroups, generated closures and coset representatives.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use crate::element::{format_set, spiral_key, BitSet, Element};
use crate::error::{Error, Result};
use crate::group::{Group, Order};

/// Which cosets: `LEFT` means `r·H`, `RIGHT` means `H·r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A subspace of the Boolean direct sum kept in reduced echelon form, keyed by
/// the highest set bit of each basis vector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gf2Span {
    basis: BTreeMap<u32, BitSet>,
}

impl Gf2Span {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The minimum element of the coset `v + span` (binary order).
    pub fn reduce(&self, v: &BitSet) -> BitSet {
        let mut out = v.clone();
        for (&pivot, b) in &self.basis {
            if v.contains(pivot) {
                out = out.symmetric_difference(b);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitSet) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &BitSet) -> bool {
        let r = self.reduce(v);
        let Some(pivot) = r.highest() else {
            return false;
        };
        for b in self.basis.values_mut() {
            if b.contains(pivot) {
                *b = b.symmetric_difference(&r);
            }
        }
        self.basis.insert(pivot, r);
        true
    }

    pub fn basis(&self) -> impl Iterator<Item = &BitSet> {
        self.basis.values()
    }

    /// Span elements in increasing binary order.
    pub fn elements(&self) -> impl Iterator<Item = BitSet> + '_ {
        let basis: Vec<&BitSet> = self.basis.values().collect();
        let count = 1u128.checked_shl(basis.len() as u32).unwrap_or(u128::MAX);
        (0..count).map(move |c| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| c >> i & 1 == 1)
                .fold(BitSet::new(), |acc, (_, b)| acc.symmetric_difference(b))
        })
    }

    /// The least member `u` of the cylinder fixing `fixed` whose coset key
    /// `reduce(u)` is not in `avoid`, and its position in the cylinder's member
    /// stream. The answer is the one a scan of the stream would find.
    ///
    /// Positions are read as bit vectors over the free coordinates, on which
    /// `reduce` is affine; the least position is fixed bit by bit from the top.
    pub fn first_avoiding(&self, fixed: &BTreeMap<u32, bool>, avoid: &[BitSet]) -> (u128, BitSet) {
        let base = BitSet::from_indices(fixed.iter().filter(|(_, &b)| b).map(|(&i, _)| i));
        let offset = self.reduce(&base);
        let free: Vec<u32> = (0u32..).filter(|i| !fixed.contains_key(i)).take(128).collect();
        let cols: Vec<BitSet> = free.iter().map(|&i| self.reduce(&BitSet::from_indices([i]))).collect();
        let escapes = |start: &BitSet, dims: &[BitSet]| {
            let mut span = Gf2Span::default();
            for d in dims {
                span.insert(d);
                if 1u128
                    .checked_shl(span.rank() as u32)
                    .is_none_or(|n| n > avoid.len() as u128)
                {
                    return true;
                }
            }
            let escaped = span
                .elements()
                .any(|v| !avoid.contains(&start.symmetric_difference(&v)));
            escaped
        };
        let width = (0..=cols.len())
            .find(|&n| escapes(&offset, &cols[..n]))
            .expect("a cylinder has members outside any finite set of cosets");
        let mut position = 0u128;
        let mut key = offset;
        let mut element = base;
        for j in (0..width).rev() {
            if j + 1 == width || !escapes(&key, &cols[..j]) {
                position |= 1 << j;
                key = key.symmetric_difference(&cols[j]);
                element.insert(free[j]);
            }
        }
        (position, element)
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Explicit {
        elements: Vec<Element>,
        members: HashSet<Element>,
        generators: Vec<Element>,
    },
    Span(Gf2Span),
    /// `d_1 Z × ... × d_k Z` inside `Z^k`; a zero modulus pins the coordinate to 0.
    Sublattice(Vec<u64>),
    Whole,
}

/// A subgroup of a fixed parent group. Explicit subgroups are materialized and
/// sorted by enumeration index; the other descriptions are lazy.
#[derive(Debug, Clone)]
pub struct Subgroup {
    repr: Repr,
}

const MAX_SPAN_RANK: usize = 4096;

impl Subgroup {
    pub fn trivial(group: &Group) -> Self {
        if group.is_boolean() {
            return Subgroup {
                repr: Repr::Span(Gf2Span::default()),
            };
        }
        let e = group.identity();
        Subgroup {
            repr: Repr::Explicit {
                elements: vec![e.clone()],
                members: HashSet::from([e]),
                generators: Vec::new(),
            },
        }
    }

    pub fn whole(group: &Group) -> Self {
        if let Some(n) = group.order().finite() {
            if n <= 1 << 20 {
                let elements: Vec<Element> = group.elements().collect();
                return Subgroup::explicit_unchecked(elements.clone(), elements);
            }
        }
        Subgroup { repr: Repr::Whole }
    }

    fn explicit_unchecked(mut elements: Vec<Element>, generators: Vec<Element>) -> Self {
        elements.sort();
        elements.dedup();
        let members = elements.iter().cloned().collect();
        Subgroup {
            repr: Repr::Explicit {
                elements,
                members,
                generators,
            },
        }
    }

    /// A subgroup given by its full element list; closure is verified.
    pub fn from_elements(group: &Group, elements: Vec<Element>) -> Result<Self> {
        for g in &elements {
            if !group.contains(g) {
                return Err(Error::NotInGroup(g.clone()));
            }
        }
        let set: HashSet<&Element> = elements.iter().collect();
        if !set.contains(&group.identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for a in &elements {
            if !set.contains(&group.inv(a)) {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for b in &elements {
                let p = group.mul(a, b);
                if !set.contains(&p) {
                    return Err(Error::NotSubgroup(format!("{a}·{b} = {p} missing")));
                }
            }
        }
        if group.is_boolean() {
            let mut span = Gf2Span::default();
            for g in &elements {
                if let Element::Bits(b) = g {
                    span.insert(b);
                }
            }
            return Ok(Subgroup { repr: Repr::Span(span) });
        }
        Ok(Subgroup::explicit_unchecked(elements.clone(), elements))
    }

    /// The diagonal sublattice `moduli[0] Z × ... × moduli[k-1] Z`.
    pub fn sublattice(group: &Group, moduli: Vec<u64>) -> Result<Self> {
        match group.lattice_rank() {
            Some(r) if r == moduli.len() => {}
            _ => {
                return Err(Error::NotSubgroup(format!(
                    "sublattice moduli {moduli:?} do not match {}",
                    group.describe()
                )))
            }
        }
        if moduli.iter().all(|&m| m == 0) {
            return Ok(Subgroup::trivial(group));
        }
        if moduli.iter().all(|&m| m == 1) {
            return Ok(Subgroup { repr: Repr::Whole });
        }
        Ok(Subgroup {
            repr: Repr::Sublattice(moduli),
        })
    }

    /// Closure of `gens ∪ {e}` under product and inverse.
    ///
    /// Boolean closures are kept as a GF(2) basis and never exceed the bound;
    /// every other kind is saturated explicitly and fails with
    /// `ClosureExceedsBound` once more than `bound` elements appear.
    pub fn generate(group: &Group, gens: &[Element], bound: usize) -> Result<Self> {
        for g in gens {
            if !group.contains(g) {
                return Err(Error::NotInGroup(g.clone()));
            }
        }
        if group.is_boolean() {
            let mut span = Gf2Span::default();
            for g in gens {
                if let Element::Bits(b) = g {
                    span.insert(b);
                }
            }
            if span.rank() > MAX_SPAN_RANK {
                return Err(Error::ClosureExceedsBound { bound });
            }
            return Ok(Subgroup { repr: Repr::Span(span) });
        }
        let mut steps: Vec<Element> = gens.to_vec();
        if !group.is_finite() {
            steps.extend(gens.iter().map(|g| group.inv(g)));
        }
        let e = group.identity();
        let mut members: HashSet<Element> = HashSet::from([e.clone()]);
        let mut elements = vec![e];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for s in &steps {
                let p = group.mul(&elements[i], s);
                if members.insert(p.clone()) {
                    elements.push(p);
                    if elements.len() > bound {
                        return Err(Error::ClosureExceedsBound { bound });
                    }
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        Ok(Subgroup::explicit_unchecked(elements, gens.to_vec()))
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (&self.repr, g) {
            (Repr::Explicit { members, .. }, _) => members.contains(g),
            (Repr::Span(span), Element::Bits(b)) => span.contains(b),
            (Repr::Sublattice(moduli), Element::Vector(v)) => {
                moduli.len() == v.len()
                    && moduli.iter().zip(v.iter()).all(
                        |(&d, &c)| {
                            if d == 0 {
                                c == 0
                            } else {
                                c.rem_euclid(d as i64) == 0
                            }
                        },
                    )
            }
            (Repr::Whole, _) => true,
            _ => false,
        }
    }

    pub fn order(&self) -> Order {
        match &self.repr {
            Repr::Explicit { elements, .. } => Order::Finite(elements.len() as u64),
            Repr::Span(span) if span.rank() < 64 => Order::Finite(1 << span.rank()),
            Repr::Span(span) => Order::PowerOfTwo(span.rank() as u32),
            Repr::Sublattice(_) | Repr::Whole => Order::Countable,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_finite()
    }

    /// The materialized element list, if this is an explicit subgroup.
    pub fn as_slice(&self) -> Option<&[Element]> {
        match &self.repr {
            Repr::Explicit { elements, .. } => Some(elements),
            _ => None,
        }
    }

    pub fn span(&self) -> Option<&Gf2Span> {
        match &self.repr {
            Repr::Span(s) => Some(s),
            _ => None,
        }
    }

    /// Generators sufficient to rebuild the subgroup by [`Subgroup::generate`].
    pub fn generators(&self) -> Vec<Element> {
        match &self.repr {
            Repr::Explicit { generators, .. } => generators.clone(),
            Repr::Span(span) => span.basis().cloned().map(Element::Bits).collect(),
            Repr::Sublattice(moduli) => (0..moduli.len())
                .map(|i| Element::vector((0..moduli.len()).map(|j| if i == j { moduli[i] as i64 } else { 0 })))
                .collect(),
            Repr::Whole => Vec::new(),
        }
    }

    /// Members in enumeration order.
    pub fn elements<'a>(&'a self, group: &'a Group) -> Box<dyn Iterator<Item = Element> + 'a> {
        match &self.repr {
            Repr::Explicit { elements, .. } => Box::new(elements.iter().cloned()),
            Repr::Span(span) => Box::new(span.elements().map(Element::Bits)),
            Repr::Sublattice(_) => Box::new(group.elements().filter(move |g| self.contains(g))),
            Repr::Whole => group.elements(),
        }
    }

    /// The enumeration-minimal element of the coset `x·H` (LEFT) or `H·x` (RIGHT).
    pub fn coset_min(&self, group: &Group, x: &Element, side: Side) -> Element {
        match (&self.repr, x) {
            (Repr::Explicit { elements, .. }, _) => elements
                .iter()
                .map(|h| match side {
                    Side::Left => group.mul(x, h),
                    Side::Right => group.mul(h, x),
                })
                .min()
                .expect("subgroups contain the identity"),
            (Repr::Span(span), Element::Bits(b)) => Element::Bits(span.reduce(b)),
            (Repr::Sublattice(moduli), Element::Vector(v)) => {
                Element::vector(moduli.iter().zip(v.iter()).map(|(&d, &c)| {
                    if d == 0 {
                        return c;
                    }
                    let d = d as i64;
                    let m = c.rem_euclid(d);
                    if spiral_key(m) <= spiral_key(m - d) {
                        m
                    } else {
                        m - d
                    }
                }))
            }
            (Repr::Whole, _) => group.identity(),
            _ => panic!("coset_min: {x} has the wrong kind for this subgroup"),
        }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        match (&self.repr, &other.repr) {
            (_, Repr::Whole) => true,
            (Repr::Whole, _) => false,
            (Repr::Explicit { elements, .. }, _) => elements.iter().all(|g| other.contains(g)),
            (Repr::Span(span), _) => span.basis().all(|b| other.contains(&Element::Bits(b.clone()))),
            (Repr::Sublattice(d), Repr::Sublattice(e)) => {
                d.iter()
                    .zip(e.iter())
                    .all(|(&d, &e)| if e == 0 { d == 0 } else { d % e == 0 })
            }
            (Repr::Sublattice(_), _) => false,
        }
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::Explicit { elements, .. } if elements.len() <= 16 => format_set(elements),
            Repr::Explicit { elements, .. } => format!("explicit(order={})", elements.len()),
            Repr::Span(span) => format!("span(rank={})", span.rank()),
            Repr::Sublattice(m) => {
                let parts: Vec<String> = m.iter().map(|d| format!("{d}Z")).collect();
                parts.join("x")
            }
            Repr::Whole => "whole".to_string(),
        }
    }
}

/// Minimal-enumeration representatives of the cosets of `h` in `k ∖ h`.
pub fn coset_reps(group: &Group, k: &Subgroup, h: &Subgroup, side: Side) -> Result<Vec<Element>> {
    if !h.is_subgroup_of(k) {
        return Err(Error::Precondition(format!(
            "{} is not contained in {}",
            h.describe(),
            k.describe()
        )));
    }
    if let (Some(ks), Some(hs)) = (k.span(), h.span()) {
        // quotient basis: K's basis reduced modulo H
        let mut quotient = Gf2Span::default();
        for b in ks.basis() {
            quotient.insert(&hs.reduce(b));
        }
        let mut reps: Vec<Element> = quotient
            .elements()
            .skip(1)
            .map(|v| Element::Bits(hs.reduce(&v)))
            .collect();
        reps.sort();
        return Ok(reps);
    }
    if !k.is_finite() {
        return Err(Error::Precondition(format!(
            "cannot list coset representatives of the infinite subgroup {}",
            k.describe()
        )));
    }
    Ok(k.elements(group)
        .filter(|x| !h.contains(x) && &h.coset_min(group, x, side) == x)
        .collect())
}

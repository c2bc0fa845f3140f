//! Finite and countable groups with canonical element encodings.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::element::{spiral_value, BitSet, Coords, Element, Image};
use crate::error::{Error, Result};

/// Cardinality of a group or subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    /// Finite of order `2^k` with `k ≥ 64`.
    PowerOfTwo(u32),
    Countable,
}

impl Order {
    /// The order as a number, when it fits.
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, Order::Countable)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::PowerOfTwo(k) => write!(f, "2^{k}"),
            Order::Countable => f.write_str("countable"),
        }
    }
}

#[derive(Debug)]
struct CayleyTable {
    table: Vec<Vec<u32>>,
    inverse: Vec<u32>,
}

#[derive(Debug)]
struct PermTable {
    degree: usize,
    elements: Vec<Image>,
    index: HashMap<Image, u64>,
}

#[derive(Debug, Clone)]
enum Kind {
    Cyclic(u64),
    Product { factors: Vec<Group>, order: u64 },
    Cayley(Arc<CayleyTable>),
    Permutation(Arc<PermTable>),
    Lattice(usize),
    Boolean,
}

/// A group together with its canonical enumeration `enumerate(0) = e`.
#[derive(Debug, Clone)]
pub struct Group {
    kind: Kind,
}

impl Group {
    /// The cyclic group of order `n`, written additively on `0..n`.
    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        Ok(Group { kind: Kind::Cyclic(n) })
    }

    /// Direct product of finite groups. Elements are indices in mixed radix
    /// with the first factor least significant.
    pub fn product(factors: Vec<Group>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty direct product".into()));
        }
        let mut order: u64 = 1;
        for f in &factors {
            let n = f
                .order()
                .finite()
                .ok_or_else(|| Error::InvalidGroup("direct product factors must be finite".into()))?;
            order = order
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidGroup("direct product too large".into()))?;
        }
        Ok(Group {
            kind: Kind::Product { factors, order },
        })
    }

    /// `Z_2^k` as a direct product of cyclic factors.
    pub fn elementary_abelian(k: usize) -> Result<Self> {
        Group::product((0..k).map(|_| Group::cyclic(2)).collect::<Result<_>>()?)
    }

    /// A group from its multiplication table. Row and column 0 must be the
    /// identity; the table is checked for the group axioms.
    pub fn cayley(table: Vec<Vec<u32>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has wrong length")));
            }
            let mut seen = vec![false; n];
            for &v in row {
                if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::InvalidGroup(format!("row {i} is not a permutation")));
                }
            }
            if row[0] as usize != i || table[0][i] as usize != i {
                return Err(Error::InvalidGroup("0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b] as usize;
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c] as usize] {
                        return Err(Error::InvalidGroup(format!("associativity fails for ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|a| {
                (0..n as u32)
                    .find(|&b| table[a][b as usize] == 0)
                    .expect("latin square has an inverse in every row")
            })
            .collect();
        Ok(Group {
            kind: Kind::Cayley(Arc::new(CayleyTable { table, inverse })),
        })
    }

    /// The quaternion group with elements ordered `1,-1,i,-i,j,-j,k,-k`.
    pub fn quaternion() -> Self {
        // unit products: (sign, unit) with units 1,i,j,k as 0..4
        const MUL: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let encode = |neg: bool, unit: usize| (2 * unit + neg as usize) as u32;
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (sa, ua) = (a % 2 == 1, a / 2);
                        let (sb, ub) = (b % 2 == 1, b / 2);
                        let (s, u) = MUL[ua][ub];
                        encode(s ^ sa ^ sb, u)
                    })
                    .collect()
            })
            .collect();
        Group::cayley(table).expect("quaternion table is a group")
    }

    /// The permutation group of the given degree generated by `generators`.
    pub fn permutation(degree: usize, generators: &[Vec<u32>]) -> Result<Self> {
        let identity: Image = (0..degree as u32).collect();
        let mut gens: Vec<Image> = Vec::new();
        for g in generators {
            let mut seen = vec![false; degree];
            if g.len() != degree
                || g.iter()
                    .any(|&v| v as usize >= degree || std::mem::replace(&mut seen[v as usize], true))
            {
                return Err(Error::InvalidGroup(format!(
                    "{g:?} is not a permutation of degree {degree}"
                )));
            }
            gens.push(g.iter().copied().collect());
        }
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Image, u64> = HashMap::from([(identity, 0)]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let next = compose(&elements[i], g);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), 0);
                    elements.push(next);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        elements.sort();
        for (i, e) in elements.iter().enumerate() {
            index.insert(e.clone(), i as u64);
        }
        Ok(Group {
            kind: Kind::Permutation(Arc::new(PermTable {
                degree,
                elements,
                index,
            })),
        })
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        if degree <= 1 {
            return Group::permutation(degree, &[]);
        }
        let cycle: Vec<u32> = (0..degree as u32).map(|i| (i + 1) % degree as u32).collect();
        let mut swap: Vec<u32> = (0..degree as u32).collect();
        swap.swap(0, 1);
        Group::permutation(degree, &[cycle, swap])
    }

    /// Symmetries of the regular `n`-gon acting on its vertices (order `2n`).
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 3".into()));
        }
        let rotation: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        let reflection: Vec<u32> = (0..n as u32).map(|i| (n as u32 - i) % n as u32).collect();
        Group::permutation(n, &[rotation, reflection])
    }

    /// The free abelian group `Z^rank`.
    pub fn lattice(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("lattice of rank 0".into()));
        }
        Ok(Group {
            kind: Kind::Lattice(rank),
        })
    }

    /// The countable Boolean group: direct sum of countably many `Z_2`.
    pub fn boolean() -> Self {
        Group { kind: Kind::Boolean }
    }

    pub fn order(&self) -> Order {
        match &self.kind {
            Kind::Cyclic(n) => Order::Finite(*n),
            Kind::Product { order, .. } => Order::Finite(*order),
            Kind::Cayley(t) => Order::Finite(t.table.len() as u64),
            Kind::Permutation(t) => Order::Finite(t.elements.len() as u64),
            Kind::Lattice(_) | Kind::Boolean => Order::Countable,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().finite().is_some()
    }

    /// Every finitely generated subgroup is finite.
    pub fn is_locally_finite(&self) -> bool {
        !matches!(self.kind, Kind::Lattice(_))
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.kind, Kind::Boolean)
    }

    pub fn lattice_rank(&self) -> Option<usize> {
        match self.kind {
            Kind::Lattice(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            Kind::Cyclic(_) | Kind::Lattice(_) | Kind::Boolean => true,
            Kind::Product { factors, .. } => factors.iter().all(Group::is_abelian),
            _ => {
                let elements: Vec<Element> = self.elements().collect();
                elements
                    .iter()
                    .all(|a| elements.iter().all(|b| self.mul(a, b) == self.mul(b, a)))
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Cyclic(n) => format!("cyclic({n})"),
            Kind::Product { factors, .. } => {
                let parts: Vec<String> = factors.iter().map(Group::describe).collect();
                format!("product({})", parts.join(","))
            }
            Kind::Cayley(t) => format!("cayley({})", t.table.len()),
            Kind::Permutation(t) => format!("permutation(degree={},order={})", t.degree, t.elements.len()),
            Kind::Lattice(r) => format!("lattice({r})"),
            Kind::Boolean => "boolean".to_string(),
        }
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            Kind::Cyclic(_) | Kind::Product { .. } | Kind::Cayley(_) => Element::Index(0),
            Kind::Permutation(t) => Element::Perm((0..t.degree as u32).collect()),
            Kind::Lattice(r) => Element::Vector(Coords::from_elem(0, *r)),
            Kind::Boolean => Element::Bits(BitSet::new()),
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (&self.kind, g) {
            (Kind::Cyclic(n), Element::Index(i)) => i < n,
            (Kind::Product { order, .. }, Element::Index(i)) => i < order,
            (Kind::Cayley(t), Element::Index(i)) => (*i as usize) < t.table.len(),
            (Kind::Permutation(t), Element::Perm(p)) => t.index.contains_key(p),
            (Kind::Lattice(r), Element::Vector(v)) => v.len() == *r,
            (Kind::Boolean, Element::Bits(_)) => true,
            _ => false,
        }
    }

    fn check(&self, g: &Element) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::NotInGroup(g.clone()))
        }
    }

    /// Checked product `g·h`.
    pub fn op(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Checked inverse.
    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Product `g·h` of two members. Operands are not checked; use [`Group::op`]
    /// at API boundaries. Permutations compose right to left: `(g·h)(i) = g(h(i))`.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        match (&self.kind, g, h) {
            (Kind::Cyclic(n), Element::Index(a), Element::Index(b)) => {
                Element::Index(((*a as u128 + *b as u128) % *n as u128) as u64)
            }
            (Kind::Product { factors, .. }, Element::Index(a), Element::Index(b)) => {
                let (mut a, mut b) = (*a, *b);
                let (mut out, mut scale) = (0u64, 1u64);
                for f in factors {
                    let n = f.order().finite().expect("finite factor");
                    let (fa, fb) = (f.unrank(a % n), f.unrank(b % n));
                    out += scale * f.rank(&f.mul(&fa, &fb));
                    a /= n;
                    b /= n;
                    scale *= n;
                }
                Element::Index(out)
            }
            (Kind::Cayley(t), Element::Index(a), Element::Index(b)) => {
                Element::Index(t.table[*a as usize][*b as usize] as u64)
            }
            (Kind::Permutation(_), Element::Perm(a), Element::Perm(b)) => Element::Perm(compose(a, b)),
            (Kind::Lattice(_), Element::Vector(a), Element::Vector(b)) => Element::Vector(
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.checked_add(*y).expect("lattice coordinate overflow"))
                    .collect(),
            ),
            (Kind::Boolean, Element::Bits(a), Element::Bits(b)) => Element::Bits(a.symmetric_difference(b)),
            _ => panic!("mul: operands {g} and {h} do not belong to {}", self.describe()),
        }
    }

    pub fn inv(&self, g: &Element) -> Element {
        match (&self.kind, g) {
            (Kind::Cyclic(n), Element::Index(a)) => Element::Index((n - a % n) % n),
            (Kind::Product { factors, .. }, Element::Index(a)) => {
                let mut a = *a;
                let (mut out, mut scale) = (0u64, 1u64);
                for f in factors {
                    let n = f.order().finite().expect("finite factor");
                    out += scale * f.rank(&f.inv(&f.unrank(a % n)));
                    a /= n;
                    scale *= n;
                }
                Element::Index(out)
            }
            (Kind::Cayley(t), Element::Index(a)) => Element::Index(t.inverse[*a as usize] as u64),
            (Kind::Permutation(_), Element::Perm(p)) => {
                let mut out: Image = Image::from_elem(0, p.len());
                for (i, &v) in p.iter().enumerate() {
                    out[v as usize] = i as u32;
                }
                Element::Perm(out)
            }
            (Kind::Lattice(_), Element::Vector(v)) => Element::Vector(v.iter().map(|x| -x).collect()),
            (Kind::Boolean, Element::Bits(_)) => g.clone(),
            _ => panic!("inv: {g} does not belong to {}", self.describe()),
        }
    }

    /// `g^k` for `k >= 0`.
    pub fn pow(&self, g: &Element, k: u32) -> Element {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, g))
    }

    // enumeration index of a member of a finite group
    fn rank(&self, g: &Element) -> u64 {
        match (&self.kind, g) {
            (Kind::Permutation(t), Element::Perm(p)) => t.index[p],
            (_, Element::Index(i)) => *i,
            _ => panic!("rank: {g} is not a finite-group element"),
        }
    }

    fn unrank(&self, i: u64) -> Element {
        match &self.kind {
            Kind::Permutation(t) => Element::Perm(t.elements[i as usize].clone()),
            _ => Element::Index(i),
        }
    }

    /// Enumeration index of `g`, when it fits in `u64`.
    pub fn index_of(&self, g: &Element) -> Option<u64> {
        if !self.contains(g) {
            return None;
        }
        match (&self.kind, g) {
            (Kind::Boolean, Element::Bits(b)) => b.as_u64(),
            (Kind::Lattice(_), _) => self.elements().position(|e| &e == g).map(|p| p as u64),
            _ => Some(self.rank(g)),
        }
    }

    /// The `i`-th element of the canonical enumeration.
    pub fn enumerate(&self, i: u64) -> Result<Element> {
        match self.order() {
            Order::Finite(n) if i >= n => Err(Error::IndexOutOfRange { index: i, order: n }),
            Order::Finite(_) => Ok(self.unrank(i)),
            _ => match &self.kind {
                Kind::Boolean => Ok(Element::Bits(BitSet::from_u64(i))),
                Kind::Lattice(r) => Ok(lattice_nth(*r, i)),
                _ => unreachable!("countable kinds are Boolean and lattice"),
            },
        }
    }

    /// The canonical enumeration as a lazy (possibly infinite) iterator.
    pub fn elements(&self) -> Box<dyn Iterator<Item = Element> + '_> {
        match &self.kind {
            Kind::Boolean => Box::new((0u64..).map(|i| Element::Bits(BitSet::from_u64(i)))),
            Kind::Lattice(r) => Box::new(LatticeWalk::new(*r)),
            Kind::Permutation(t) => Box::new(t.elements.iter().map(|p| Element::Perm(p.clone()))),
            _ => {
                let n = self.order().finite().expect("finite kind");
                Box::new((0..n).map(Element::Index))
            }
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let err = |reason: &str| Error::ParseElement {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let element = match &self.kind {
            Kind::Cyclic(_) | Kind::Product { .. } | Kind::Cayley(_) => {
                Element::Index(t.parse().map_err(|_| err("expected a decimal index"))?)
            }
            Kind::Lattice(_) => {
                let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
                let coords = split_list(inner)
                    .map(|s| s.parse::<i64>())
                    .collect::<std::result::Result<Coords, _>>()
                    .map_err(|_| err("expected comma-separated integers"))?;
                Element::Vector(coords)
            }
            Kind::Boolean => {
                let inner = t
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| err("expected a braced coordinate list"))?;
                let mut coords = split_list(inner)
                    .map(|s| s.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| err("expected coordinate indices"))?;
                let n = coords.len();
                coords.sort_unstable();
                coords.dedup();
                if coords.len() != n {
                    return Err(err("repeated coordinate"));
                }
                Element::Bits(BitSet::from_indices(coords))
            }
            Kind::Permutation(_) => {
                let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
                let image = split_list(inner)
                    .map(|s| s.parse::<u32>())
                    .collect::<std::result::Result<Image, _>>()
                    .map_err(|_| err("expected a one-line image"))?;
                Element::Perm(image)
            }
        };
        if self.contains(&element) {
            Ok(element)
        } else {
            Err(err(&format!("not an element of {}", self.describe())))
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty())
}

fn compose(a: &[u32], b: &[u32]) -> Image {
    b.iter().map(|&i| a[i as usize]).collect()
}

fn shell_size(rank: usize, s: u64) -> u128 {
    if s == 0 {
        1
    } else {
        (2 * s as u128 + 1).pow(rank as u32) - (2 * s as u128 - 1).pow(rank as u32)
    }
}

fn lattice_nth(rank: usize, mut i: u64) -> Element {
    let mut s = 0;
    while (i as u128) >= shell_size(rank, s) {
        i -= shell_size(rank, s) as u64;
        s += 1;
    }
    let mut walk = LatticeWalk::at_shell(rank, s);
    walk.nth(i as usize).expect("shell holds the index")
}

/// Shell-by-shell walk of `Z^rank`: shells by max-norm, each shell in
/// lexicographic order of the per-coordinate keys `0, 1, -1, 2, -2, ...`.
struct LatticeWalk {
    shell: u64,
    keys: Vec<u64>,
    exhausted_shell: bool,
}

impl LatticeWalk {
    fn new(rank: usize) -> Self {
        LatticeWalk::at_shell(rank, 0)
    }

    fn at_shell(rank: usize, shell: u64) -> Self {
        let mut walk = LatticeWalk {
            shell,
            keys: vec![0; rank],
            exhausted_shell: false,
        };
        walk.reach_shell();
        walk
    }

    /// Keys `2s-1` and `2s` are the two values of norm `s`. A tuple lies on
    /// the shell iff some key is one of them, and the least such tuple with a
    /// given prefix raises only the last key.
    fn reach_shell(&mut self) {
        if self.shell == 0 {
            return;
        }
        let low = 2 * self.shell - 1;
        if self.keys.iter().all(|&k| k < low) {
            if let Some(last) = self.keys.last_mut() {
                *last = low;
            }
        }
    }
}

impl Iterator for LatticeWalk {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        if self.keys.is_empty() {
            return None;
        }
        if self.exhausted_shell {
            self.shell += 1;
            self.keys.iter_mut().for_each(|k| *k = 0);
            self.exhausted_shell = false;
            self.reach_shell();
        }
        let coords: Coords = self.keys.iter().map(|&k| spiral_value(k)).collect();
        // advance the odometer, last coordinate fastest
        let top = 2 * self.shell;
        let mut pos = self.keys.len();
        loop {
            if pos == 0 {
                self.exhausted_shell = true;
                break;
            }
            pos -= 1;
            if self.keys[pos] < top {
                self.keys[pos] += 1;
                break;
            }
            self.keys[pos] = 0;
        }
        if !self.exhausted_shell {
            self.reach_shell();
        }
        Some(Element::Vector(coords))
    }
}

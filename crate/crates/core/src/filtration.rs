//! Filtrations `{e} = G_0 ⊂ G_1 ⊂ ... ⊂ G_m` with parity-assigned coset
//! transversals, and the factorization `G = AB` they induce.
//!
//! Level `α` uses left cosets when `α` is even and right cosets when it is odd.
//! Every `g` peels uniquely into
//! `x_0·x_1·…·x_λ · y_ρ·…·y_1·y_0`, where the `x_i` come from left levels and
//! the `y_i` from right levels, both with strictly decreasing level index.
//! `A` collects the x-parts and `B` the y-parts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::element::{BitSet, Element};
use crate::error::{Error, Result};
use crate::group::{Group, Order};
use crate::subgroup::{coset_reps, Side, Subgroup};
use crate::topology::{BaseFamily, BaseSet};
use crate::verify;

/// Index of a filtration level. Limit ordinals never occur, so the parity of
/// the index alone decides the side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelIndex(pub usize);

impl LevelIndex {
    pub fn side(self) -> Side {
        side_of(self)
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Left for even levels, right for odd ones.
pub fn side_of(level: LevelIndex) -> Side {
    if level.0.is_multiple_of(2) {
        Side::Left
    } else {
        Side::Right
    }
}

#[derive(Debug, Clone)]
pub struct Filtration {
    group: Group,
    levels: Vec<Subgroup>,
}

impl Filtration {
    /// Wraps a chain without checking it; see [`validate_filtration`].
    pub fn new(group: Group, levels: Vec<Subgroup>) -> Self {
        Filtration { group, levels }
    }

    /// `G_0 = {e}` and `G_i = ⟨G_{i-1} ∪ gens[i-1]⟩`.
    pub fn from_generators(group: Group, gens: &[Vec<Element>], bound: usize) -> Result<Self> {
        let mut levels = vec![Subgroup::trivial(&group)];
        for step in gens {
            let mut all = levels.last().unwrap().generators();
            all.extend(step.iter().cloned());
            levels.push(Subgroup::generate(&group, &all, bound)?);
        }
        Ok(Filtration { group, levels })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn levels(&self) -> &[Subgroup] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &Subgroup {
        &self.levels[i]
    }

    /// Index `m` of the top level.
    pub fn top(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Smallest `γ` with `g ∈ G_γ`.
    pub fn level_of(&self, g: &Element) -> Option<usize> {
        self.levels.iter().position(|h| h.contains(g))
    }

    pub fn orders(&self) -> Vec<Order> {
        self.levels.iter().map(Subgroup::order).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyChain,
    /// The bottom level is not `{e}`.
    NontrivialBase {
        witness: Element,
    },
    /// `G_level ⊄ G_{level+1}`.
    NotNested {
        level: usize,
        witness: Element,
    },
    /// `G_level = G_{level+1}`.
    NotStrict {
        level: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyChain => f.write_str("empty chain"),
            Violation::NontrivialBase { witness } => write!(f, "G_0 contains {witness}"),
            Violation::NotNested { level, witness } => {
                write!(f, "{witness} in G_{level} but not in G_{}", level + 1)
            }
            Violation::NotStrict { level } => write!(f, "G_{level} = G_{}", level + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    /// Countable group: the first `n` enumerated elements lie in the top level.
    CertifiedPrefix(usize),
    Incomplete {
        witness: Element,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationReport {
    pub violations: Vec<Violation>,
    pub completeness: Completeness,
    /// Continuity at limit levels holds vacuously: chains are finite.
    pub limit_condition_vacuous: bool,
}

impl FiltrationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn escaping_element(group: &Group, inner: &Subgroup, outer: &Subgroup) -> Option<Element> {
    if inner.is_subgroup_of(outer) {
        return None;
    }
    inner
        .generators()
        .into_iter()
        .find(|g| !outer.contains(g))
        .or_else(|| inner.elements(group).find(|g| !outer.contains(g)))
}

/// Checks that the chain starts at `{e}` and strictly increases, and reports
/// completeness. For countable groups completeness is certified on the first
/// `prefix` enumerated elements.
pub fn validate_filtration(f: &Filtration, prefix: usize) -> FiltrationReport {
    let group = &f.group;
    let mut violations = Vec::new();
    if f.levels.is_empty() {
        return FiltrationReport {
            violations: vec![Violation::EmptyChain],
            completeness: Completeness::Incomplete {
                witness: group.identity(),
            },
            limit_condition_vacuous: true,
        };
    }
    let trivial = Subgroup::trivial(group);
    if let Some(w) = escaping_element(group, &f.levels[0], &trivial) {
        violations.push(Violation::NontrivialBase { witness: w });
    }
    for (i, pair) in f.levels.windows(2).enumerate() {
        if let Some(w) = escaping_element(group, &pair[0], &pair[1]) {
            violations.push(Violation::NotNested { level: i, witness: w });
        } else if pair[1].is_subgroup_of(&pair[0]) {
            violations.push(Violation::NotStrict { level: i });
        }
    }
    let top = f.levels.last().unwrap();
    let completeness = match group.order() {
        Order::Finite(n) => match top.order() {
            Order::Finite(m) if m == n => Completeness::Complete,
            _ => Completeness::Incomplete {
                witness: group.elements().find(|g| !top.contains(g)).unwrap(),
            },
        },
        _ => {
            if top.same_as(&Subgroup::whole(group)) {
                Completeness::Complete
            } else {
                match group.elements().take(prefix).find(|g| !top.contains(g)) {
                    Some(witness) => Completeness::Incomplete { witness },
                    None => Completeness::CertifiedPrefix(prefix),
                }
            }
        }
    };
    FiltrationReport {
        violations,
        completeness,
        limit_condition_vacuous: true,
    }
}

#[derive(Debug, Clone)]
enum Reps {
    Finite {
        reps: Vec<Element>,
        by_coset: HashMap<Element, Element>,
    },
    /// Infinite level: each coset is represented by its minimal element.
    MinEnum,
}

/// Representatives of the cosets of `G_α` in `G_{α+1} ∖ G_α`.
#[derive(Debug, Clone)]
pub struct TransversalLevel {
    level: LevelIndex,
    reps: Reps,
}

impl TransversalLevel {
    pub fn level(&self) -> LevelIndex {
        self.level
    }

    pub fn side(&self) -> Side {
        self.level.side()
    }

    /// The representative list, for finite levels.
    pub fn reps(&self) -> Option<&[Element]> {
        match &self.reps {
            Reps::Finite { reps, .. } => Some(reps),
            Reps::MinEnum => None,
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.reps, Reps::MinEnum)
    }

    /// Representative of the coset of `x` at this level.
    pub fn representative(&self, f: &Filtration, x: &Element) -> Option<Element> {
        let key = f.levels[self.level.0].coset_min(&f.group, x, self.side());
        match &self.reps {
            Reps::Finite { by_coset, .. } => by_coset.get(&key).cloned(),
            Reps::MinEnum => Some(key),
        }
    }

    pub fn contains(&self, f: &Filtration, x: &Element) -> bool {
        match &self.reps {
            Reps::Finite { reps, .. } => reps.binary_search(x).is_ok(),
            Reps::MinEnum => {
                let (lower, upper) = (&f.levels[self.level.0], &f.levels[self.level.0 + 1]);
                upper.contains(x) && !lower.contains(x) && &lower.coset_min(&f.group, x, self.side()) == x
            }
        }
    }

    /// Representatives in enumeration order (lazy for infinite levels).
    pub fn stream<'a>(&'a self, f: &'a Filtration) -> Box<dyn Iterator<Item = Element> + 'a> {
        match &self.reps {
            Reps::Finite { reps, .. } => Box::new(reps.iter().cloned()),
            Reps::MinEnum => Box::new(
                f.levels[self.level.0 + 1]
                    .elements(&f.group)
                    .filter(move |x| self.contains(f, x)),
            ),
        }
    }

    fn finite(f: &Filtration, level: LevelIndex, reps: Vec<Element>) -> Self {
        let lower = &f.levels[level.0];
        let by_coset = reps
            .iter()
            .map(|r| (lower.coset_min(&f.group, r, level.side()), r.clone()))
            .collect();
        let mut reps = reps;
        reps.sort();
        TransversalLevel {
            level,
            reps: Reps::Finite { reps, by_coset },
        }
    }

    #[cfg(test)]
    pub(crate) fn corrupt(&mut self, coset_key: &Element, rep: Element) {
        if let Reps::Finite { reps, by_coset } = &mut self.reps {
            if let Some(old) = by_coset.insert(coset_key.clone(), rep.clone()) {
                reps.retain(|r| r != &old);
            }
            reps.push(rep);
            reps.sort();
        }
    }
}

/// How representatives were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    MinEnum,
    /// Density witnesses where claimed, minimal element elsewhere.
    DensityWitness,
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::MinEnum => "min-enum",
            TieBreak::DensityWitness => "density-witness+min-enum",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TransversalSystem {
    levels: Vec<TransversalLevel>,
    tiebreak: TieBreak,
}

impl TransversalSystem {
    pub fn levels(&self) -> &[TransversalLevel] {
        &self.levels
    }

    pub fn level(&self, alpha: usize) -> &TransversalLevel {
        &self.levels[alpha]
    }

    pub fn tiebreak(&self) -> TieBreak {
        self.tiebreak
    }

    #[cfg(test)]
    pub(crate) fn level_mut(&mut self, alpha: usize) -> &mut TransversalLevel {
        &mut self.levels[alpha]
    }
}

/// Minimal-enumeration transversals for every level of a nested chain.
pub fn select_transversals(f: &Filtration) -> Result<TransversalSystem> {
    let mut levels = Vec::with_capacity(f.top());
    for alpha in 0..f.top() {
        let (lower, upper) = (&f.levels[alpha], &f.levels[alpha + 1]);
        if !lower.is_subgroup_of(upper) {
            return Err(Error::Precondition(format!(
                "G_{alpha} is not contained in G_{}",
                alpha + 1
            )));
        }
        let level = LevelIndex(alpha);
        if upper.is_finite() {
            let reps = coset_reps(&f.group, upper, lower, level.side())?;
            levels.push(TransversalLevel::finite(f, level, reps));
        } else {
            levels.push(TransversalLevel {
                level,
                reps: Reps::MinEnum,
            });
        }
    }
    Ok(TransversalSystem {
        levels,
        tiebreak: TieBreak::MinEnum,
    })
}

/// The decomposition `x_0·…·x_λ · y_ρ·…·y_0`. `x_chain[i] = x_i` and
/// `y_chain[i] = y_i`, so both lists have strictly decreasing levels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalForm {
    pub x_chain: Vec<(Element, LevelIndex)>,
    pub y_chain: Vec<(Element, LevelIndex)>,
}

impl NormalForm {
    /// `x_0·x_1·…·x_λ`.
    pub fn x_part(&self, group: &Group) -> Element {
        self.x_chain
            .iter()
            .fold(group.identity(), |acc, (x, _)| group.mul(&acc, x))
    }

    /// `y_ρ·…·y_1·y_0`.
    pub fn y_part(&self, group: &Group) -> Element {
        self.y_chain
            .iter()
            .rev()
            .fold(group.identity(), |acc, (y, _)| group.mul(&acc, y))
    }

    /// Each representative belongs to its level's transversal, sides match
    /// parity and levels strictly decrease within each chain.
    pub fn is_well_formed(&self, f: &Filtration, t: &TransversalSystem) -> bool {
        let chain_ok = |chain: &[(Element, LevelIndex)], side: Side| {
            chain.windows(2).all(|w| w[0].1 > w[1].1)
                && chain
                    .iter()
                    .all(|(r, lvl)| lvl.side() == side && lvl.0 < t.levels.len() && t.levels[lvl.0].contains(f, r))
        };
        chain_ok(&self.x_chain, Side::Left) && chain_ok(&self.y_chain, Side::Right)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x_chain.is_empty() && self.y_chain.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self
            .x_chain
            .iter()
            .map(|(x, l)| format!("x({x}@{l})"))
            .chain(self.y_chain.iter().rev().map(|(y, l)| format!("y({y}@{l})")))
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Peels `g` level by level into its normal form.
pub fn decompose(g: &Element, f: &Filtration, t: &TransversalSystem) -> Result<NormalForm> {
    let group = &f.group;
    if !group.contains(g) || f.levels.last().is_none_or(|top| !top.contains(g)) {
        return Err(Error::ElementOutsideChain(g.clone()));
    }
    let e = group.identity();
    let mut nf = NormalForm::default();
    let mut rem = g.clone();
    let mut ceiling = f.top();
    while rem != e {
        let gamma = f.levels[..=ceiling]
            .iter()
            .position(|h| h.contains(&rem))
            .ok_or_else(|| Error::TransversalMismatch {
                level: ceiling,
                element: rem.clone(),
            })?;
        let alpha = gamma - 1;
        let level = &t.levels[alpha];
        let mismatch = || Error::TransversalMismatch {
            level: alpha,
            element: rem.clone(),
        };
        let rep = level.representative(f, &rem).ok_or_else(mismatch)?;
        let next = match level.side() {
            Side::Left => group.mul(&group.inv(&rep), &rem),
            Side::Right => group.mul(&rem, &group.inv(&rep)),
        };
        if !f.levels[alpha].contains(&next) {
            return Err(mismatch());
        }
        match level.side() {
            Side::Left => nf.x_chain.push((rep, LevelIndex(alpha))),
            Side::Right => nf.y_chain.push((rep, LevelIndex(alpha))),
        }
        rem = next;
        ceiling = alpha;
    }
    Ok(nf)
}

pub fn recompose(group: &Group, nf: &NormalForm) -> Element {
    group.mul(&nf.x_part(group), &nf.y_part(group))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    /// The first `n` enumerated elements.
    Prefix(usize),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Prefix(n) => write!(f, "prefix({n})"),
        }
    }
}

impl Scope {
    pub fn elements<'a>(&self, group: &'a Group) -> Result<Box<dyn Iterator<Item = Element> + 'a>> {
        match *self {
            Scope::All if group.is_finite() => Ok(group.elements()),
            Scope::All => Err(Error::Precondition(
                "scope ALL needs a finite group; use a prefix".into(),
            )),
            Scope::Prefix(n) => Ok(Box::new(group.elements().take(n))),
        }
    }
}

/// One density witness: base set `base` was met at `stage` by `element`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRecord {
    pub base: usize,
    pub stage: usize,
    pub element: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub construction: &'static str,
    pub tiebreak: String,
    pub chain_orders: Vec<Order>,
    pub scope: String,
    pub witnesses: Vec<WitnessRecord>,
    /// Representatives accepted after an oracle check.
    pub oracle_confirmed: usize,
    /// Transversal elements in the order they were claimed.
    pub claims: Vec<Element>,
}

/// The two factors of a (prefix of a) factorization `G = AB`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPair {
    pub a: BTreeSet<Element>,
    pub b: BTreeSet<Element>,
    pub provenance: Provenance,
}

pub fn extract_factors(f: &Filtration, t: &TransversalSystem, scope: Scope) -> Result<FactorPair> {
    let group = &f.group;
    let mut a = BTreeSet::from([group.identity()]);
    let mut b = BTreeSet::from([group.identity()]);
    for g in scope.elements(group)? {
        let nf = decompose(&g, f, t)?;
        a.insert(nf.x_part(group));
        b.insert(nf.y_part(group));
    }
    Ok(FactorPair {
        a,
        b,
        provenance: Provenance {
            construction: "filtration",
            tiebreak: t.tiebreak.to_string(),
            chain_orders: f.orders(),
            scope: scope.to_string(),
            witnesses: Vec::new(),
            oracle_confirmed: 0,
            claims: Vec::new(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseOptions {
    pub stages: usize,
    pub bound: usize,
    pub probes: usize,
}

#[derive(Debug, Clone)]
pub struct DenseFiltration {
    pub filtration: Filtration,
    pub transversals: TransversalSystem,
    pub witnesses: Vec<WitnessRecord>,
}

impl DenseFiltration {
    pub fn extract(&self, scope: Scope) -> Result<FactorPair> {
        let mut pair = extract_factors(&self.filtration, &self.transversals, scope)?;
        pair.provenance.construction = "dense-filtration";
        pair.provenance.witnesses = self.witnesses.clone();
        Ok(pair)
    }
}

/// The first member of `set` outside `lower` whose coset key is not in
/// `claimed`, among the first `probes` members. Cylinders over a GF(2) span
/// are solved directly instead of scanned.
pub fn fresh_witness(
    group: &Group,
    set: &BaseSet,
    lower: &Subgroup,
    side: Side,
    claimed: &[Element],
    probes: usize,
) -> Option<Element> {
    if let (BaseSet::Cylinder(fixed), Some(span)) = (set, lower.span()) {
        let mut avoid = vec![BitSet::new()];
        avoid.extend(claimed.iter().filter_map(|k| match k {
            Element::Bits(b) => Some(b.clone()),
            _ => None,
        }));
        let (position, u) = span.first_avoiding(fixed, &avoid);
        return (position < probes as u128).then_some(Element::Bits(u));
    }
    set.members(group)
        .take(probes)
        .find(|u| !lower.contains(u) && !claimed.contains(&lower.coset_min(group, u, side)))
}

/// Grows a filtration stage by stage so that every transversal `T_α` meets
/// every base set `U_γ` with `γ ≤ α`.
///
/// At stage `α` the base sets are visited in index order; each contributes the
/// first member outside `G_α` whose coset (side by parity) is not yet claimed
/// this stage. `G_{α+1}` is generated by `G_α` and the witnesses, and the
/// witnesses represent their cosets in `T_α`.
pub fn build_dense_filtration(group: &Group, base: &BaseFamily, opts: DenseOptions) -> Result<DenseFiltration> {
    base.check_against(group)?;
    let mut levels = vec![Subgroup::trivial(group)];
    let mut transversal_levels = Vec::new();
    let mut witnesses = Vec::new();
    let order = group.order().finite();
    for alpha in 0..opts.stages {
        let lower = levels.last().unwrap().clone();
        if order.is_some() && lower.order().finite() == order {
            break;
        }
        let level = LevelIndex(alpha);
        let side = level.side();
        let mut claimed: Vec<(Element, Element)> = Vec::new();
        for gamma in 0..base.len().min(alpha + 1) {
            let keys: Vec<Element> = claimed.iter().map(|(k, _)| k.clone()).collect();
            let u = fresh_witness(group, base.get(gamma).unwrap(), &lower, side, &keys, opts.probes).ok_or(
                Error::WitnessSearchExhausted {
                    base: gamma,
                    stage: Some(alpha),
                    probes: opts.probes,
                },
            )?;
            claimed.push((lower.coset_min(group, &u, side), u.clone()));
            witnesses.push(WitnessRecord {
                base: gamma,
                stage: alpha,
                element: u,
            });
        }
        let mut gens = lower.generators();
        gens.extend(claimed.iter().map(|(_, u)| u.clone()));
        let upper = Subgroup::generate(group, &gens, opts.bound)?;
        let mut reps = coset_reps(group, &upper, &lower, side)?;
        for (key, u) in &claimed {
            let slot = reps
                .iter_mut()
                .find(|r| *r == key)
                .expect("claimed coset lies in the new level");
            *slot = u.clone();
        }
        levels.push(upper);
        let partial = Filtration::new(group.clone(), levels.clone());
        transversal_levels.push(TransversalLevel::finite(&partial, level, reps));
    }
    Ok(DenseFiltration {
        filtration: Filtration::new(group.clone(), levels),
        transversals: TransversalSystem {
            levels: transversal_levels,
            tiebreak: TieBreak::DensityWitness,
        },
        witnesses,
    })
}

/// `G = A·B` with `A` a finite subgroup and `B` a right transversal of `A`
/// that meets every base set.
///
/// Base sets are served first, each by the first member whose right coset is
/// still unclaimed; then the first `coverage` enumerated elements claim any
/// coset still open. Every claim is confirmed by the partial-factorization
/// oracle.
pub fn subgroup_transversal_factorize(
    group: &Group,
    a: &Subgroup,
    base: &BaseFamily,
    coverage: usize,
    probes: usize,
) -> Result<FactorPair> {
    base.check_against(group)?;
    let a_elems: Vec<Element> = match a.order() {
        Order::Finite(n) if n <= 1 << 16 => a.elements(group).collect(),
        _ => {
            return Err(Error::Precondition(
                "the subgroup factor must be finite and materializable".into(),
            ))
        }
    };
    let mut claimed: HashSet<Element> = HashSet::new();
    let mut b: Vec<Element> = Vec::new();
    let mut witnesses = Vec::new();
    let mut confirmed = 0;
    let mut claim = |u: Element, b: &mut Vec<Element>, claimed: &mut HashSet<Element>| -> Result<()> {
        claimed.insert(a.coset_min(group, &u, Side::Right));
        b.push(u.clone());
        if !verify::is_partial_factorization(group, &a_elems, b.as_slice()).passed() {
            return Err(Error::FilterOracleMismatch {
                operation: "subgroup_transversal_factorize",
                candidate: u,
            });
        }
        confirmed += 1;
        Ok(())
    };
    for (n, set) in base.iter().enumerate() {
        let u = set
            .members(group)
            .take(probes)
            .find(|u| !claimed.contains(&a.coset_min(group, u, Side::Right)))
            .ok_or(Error::WitnessSearchExhausted {
                base: n,
                stage: None,
                probes,
            })?;
        witnesses.push(WitnessRecord {
            base: n,
            stage: 0,
            element: u.clone(),
        });
        claim(u, &mut b, &mut claimed)?;
    }
    for g in group.elements().take(coverage) {
        if !claimed.contains(&a.coset_min(group, &g, Side::Right)) {
            claim(g, &mut b, &mut claimed)?;
        }
    }
    Ok(FactorPair {
        a: a_elems.into_iter().collect(),
        b: b.iter().cloned().collect(),
        provenance: Provenance {
            construction: "subgroup-transversal",
            tiebreak: "base-first+enumeration".to_string(),
            chain_orders: vec![a.order()],
            scope: Scope::Prefix(coverage).to_string(),
            witnesses,
            oracle_confirmed: confirmed,
            claims: b,
        },
    })
}

//! Greedy growth of partial factorizations.
//!
//! Each extension step scans a candidate stream in order. A cheap filter
//! decides each candidate exactly from the cached product set; the first
//! candidate that passes is then confirmed by the brute-force oracle, and a
//! disagreement is reported as [`Error::FilterOracleMismatch`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::element::{format_set, Element};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::topology::BaseFamily;
use crate::verify;

pub const DEFAULT_PROBES: usize = 10_000;

/// Sets `A`, `B` whose products `ab` are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    a: BTreeSet<Element>,
    b: BTreeSet<Element>,
    symmetric_a: bool,
    products: HashSet<Element>,
}

impl PartialFactorization {
    /// `A = B = {e}`, with symmetric `A`.
    pub fn trivial(group: &Group) -> Self {
        let e = group.identity();
        PartialFactorization {
            a: BTreeSet::from([e.clone()]),
            b: BTreeSet::from([e.clone()]),
            symmetric_a: true,
            products: HashSet::from([e]),
        }
    }

    pub fn new(group: &Group, a: BTreeSet<Element>, b: BTreeSet<Element>, symmetric_a: bool) -> Result<Self> {
        if let Some(g) = a.iter().chain(b.iter()).find(|g| !group.contains(g)) {
            return Err(Error::NotInGroup(g.clone()));
        }
        let report = verify::is_partial_factorization(group, &a, &b);
        if !report.passed() {
            return Err(Error::Precondition(format!(
                "not a partial factorization: {}",
                report.witnesses[0]
            )));
        }
        if symmetric_a {
            let e = group.identity();
            if !a.contains(&e) || !b.contains(&e) || a.iter().any(|x| !a.contains(&group.inv(x))) {
                return Err(Error::Precondition(
                    "A must be symmetric and e must lie in A and B".into(),
                ));
            }
        }
        let products = a.iter().flat_map(|x| b.iter().map(|y| group.mul(x, y))).collect();
        Ok(PartialFactorization {
            a,
            b,
            symmetric_a,
            products,
        })
    }

    pub fn a(&self) -> &BTreeSet<Element> {
        &self.a
    }

    pub fn b(&self) -> &BTreeSet<Element> {
        &self.b
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_a
    }

    /// `g ∈ A·B`.
    pub fn covers(&self, g: &Element) -> bool {
        self.products.contains(g)
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    fn with_a(&self, group: &Group, xs: &[Element]) -> Self {
        let mut next = self.clone();
        for x in xs {
            if next.a.insert(x.clone()) {
                next.products.extend(self.b.iter().map(|y| group.mul(x, y)));
            }
        }
        next
    }

    fn with_b(&self, group: &Group, y: &Element) -> Self {
        let mut next = self.clone();
        if next.b.insert(y.clone()) {
            let a: Vec<Element> = next.a.iter().map(|x| group.mul(x, y)).collect();
            next.products.extend(a);
        }
        next
    }

    fn meets(set: &BTreeSet<Element>, u: &crate::topology::BaseSet) -> bool {
        set.iter().any(|x| u.contains(x))
    }
}

impl fmt::Display for PartialFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} B={}", format_set(&self.a), format_set(&self.b))
    }
}

/// Candidate budget for one extension step.
///
/// `probes` bounds the candidates examined by the filter. A stream may also be
/// filtered live before that (see [`cover_element`]); `scan_limit` bounds the
/// raw elements drawn. After acceptance the next `audit` candidates are also
/// filtered, and every one that passes is checked against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Search {
    pub probes: usize,
    pub audit: usize,
    pub scan_limit: usize,
}

impl Search {
    pub fn new(probes: usize) -> Self {
        Search {
            probes,
            audit: 0,
            scan_limit: probes.saturating_mul(1000),
        }
    }

    pub fn with_audit(self, audit: usize) -> Self {
        Search { audit, ..self }
    }
}

impl Default for Search {
    fn default() -> Self {
        Search::new(DEFAULT_PROBES)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub pf: PartialFactorization,
    pub chosen: Element,
    /// For `cover_element`, the new element of `B`.
    pub partner: Option<Element>,
    pub probes: usize,
    /// Raw stream elements drawn, live-filtered ones included.
    pub scanned: usize,
    /// Filter-accepted candidates the oracle confirmed, the chosen one included.
    pub confirmed: usize,
}

struct Found {
    chosen: Element,
    probes: usize,
    scanned: usize,
    confirmed: usize,
}

fn scan<I, L, F, O>(operation: &'static str, stream: I, search: Search, live: L, filter: F, oracle: O) -> Result<Found>
where
    I: IntoIterator<Item = Element>,
    L: Fn(&Element) -> bool,
    F: Fn(&Element) -> bool,
    O: Fn(&Element) -> bool,
{
    let mut candidates = stream
        .into_iter()
        .take(search.scan_limit)
        .enumerate()
        .filter(|(_, x)| live(x));
    let mut probes = 0;
    let (scanned, chosen) = loop {
        let next = if probes < search.probes {
            candidates.next()
        } else {
            None
        };
        let Some((i, x)) = next else {
            return Err(Error::SearchExhausted { operation, probes });
        };
        probes += 1;
        if filter(&x) {
            if !oracle(&x) {
                return Err(Error::FilterOracleMismatch {
                    operation,
                    candidate: x,
                });
            }
            break (i + 1, x);
        }
    };
    let mut confirmed = 1;
    for (_, x) in candidates.take(search.audit) {
        if filter(&x) {
            if !oracle(&x) {
                return Err(Error::FilterOracleMismatch {
                    operation,
                    candidate: x,
                });
            }
            confirmed += 1;
        }
    }
    Ok(Found {
        chosen,
        probes,
        scanned,
        confirmed,
    })
}

fn everything(_: &Element) -> bool {
    true
}

impl Found {
    fn into_extension(self, pf: PartialFactorization, partner: Option<Element>) -> Extension {
        Extension {
            pf,
            chosen: self.chosen,
            partner,
            probes: self.probes,
            scanned: self.scanned,
            confirmed: self.confirmed,
        }
    }
}

fn oracle_after(group: &Group, pf: &PartialFactorization, new_a: &[Element], new_b: &[Element]) -> bool {
    let a: Vec<&Element> = pf.a.iter().chain(new_a).collect();
    let b: Vec<&Element> = pf.b.iter().chain(new_b).collect();
    let distinct = |v: &[&Element]| v.iter().collect::<HashSet<_>>().len() == v.len();
    distinct(&a) && distinct(&b) && verify::is_partial_factorization(group, a, b).passed()
}

/// Adds the first `x` with `x ∉ B` and `A(B ∪ {x})` a partial factorization.
pub fn extend_b<I>(group: &Group, pf: &PartialFactorization, stream: I, search: Search) -> Result<Extension>
where
    I: IntoIterator<Item = Element>,
{
    let filter = |x: &Element| !pf.b.contains(x) && pf.a.iter().all(|a| !pf.products.contains(&group.mul(a, x)));
    let oracle = |x: &Element| oracle_after(group, pf, &[], std::slice::from_ref(x));
    let found = scan("extend_B", stream, search, everything, filter, oracle)?;
    let next = pf.with_b(group, &found.chosen);
    Ok(found.into_extension(next, None))
}

/// Adds the first `x` with `x ∉ A` and `(A ∪ {x})B` a partial factorization.
pub fn extend_a_plain<I>(group: &Group, pf: &PartialFactorization, stream: I, search: Search) -> Result<Extension>
where
    I: IntoIterator<Item = Element>,
{
    let filter = |x: &Element| !pf.a.contains(x) && pf.b.iter().all(|b| !pf.products.contains(&group.mul(x, b)));
    let oracle = |x: &Element| oracle_after(group, pf, std::slice::from_ref(x), &[]);
    let found = scan("extend_A_plain", stream, search, everything, filter, oracle)?;
    let mut next = pf.with_a(group, std::slice::from_ref(&found.chosen));
    next.symmetric_a = false;
    Ok(found.into_extension(next, None))
}

/// Adds the first pair `x, x⁻¹` giving two new rows `xB`, `x⁻¹B` disjoint
/// from `AB` and from each other. Involutions never qualify.
pub fn extend_a_symmetric<I>(group: &Group, pf: &PartialFactorization, stream: I, search: Search) -> Result<Extension>
where
    I: IntoIterator<Item = Element>,
{
    if !pf.symmetric_a {
        return Err(Error::Precondition("extend_A_symmetric needs a symmetric A".into()));
    }
    let filter = |x: &Element| {
        let xi = group.inv(x);
        let sq = group.mul(x, x);
        &xi != x
            && !pf.a.contains(x)
            && pf.b.iter().all(|b| {
                !pf.products.contains(&group.mul(x, b))
                    && !pf.products.contains(&group.mul(&xi, b))
                    && !pf.b.contains(&group.mul(&sq, b))
            })
    };
    let oracle = |x: &Element| oracle_after(group, pf, &[x.clone(), group.inv(x)], &[]);
    let found = scan("extend_A_symmetric", stream, search, everything, filter, oracle)?;
    let next = pf.with_a(group, &[found.chosen.clone(), group.inv(&found.chosen)]);
    Ok(found.into_extension(next, None))
}

/// Covers `g` by adding `x, x⁻¹` to `A` and `x⁻¹g` to `B`, so that
/// `g = x·(x⁻¹g)`.
///
/// The stream is filtered live by the neighbourhood condition `x ∉ A`,
/// `A{x,x⁻¹}g ∩ AB = ∅`; only survivors count as probes and go through the
/// remaining clauses.
pub fn cover_element<I>(
    group: &Group,
    pf: &PartialFactorization,
    g: &Element,
    stream: I,
    search: Search,
) -> Result<Extension>
where
    I: IntoIterator<Item = Element>,
{
    if !pf.symmetric_a {
        return Err(Error::Precondition("cover_element needs a symmetric A".into()));
    }
    if pf.covers(g) {
        return Err(Error::Precondition(format!("{g} is already covered")));
    }
    let in_ab = |h: &Element| pf.products.contains(h);
    let live = |x: &Element| {
        if pf.a.contains(x) {
            return false;
        }
        let (xg, xig) = (group.mul(x, g), group.mul(&group.inv(x), g));
        pf.a.iter()
            .all(|a| !in_ab(&group.mul(a, &xg)) && !in_ab(&group.mul(a, &xig)))
    };
    let filter = |x: &Element| {
        let xi = group.inv(x);
        let sq = group.mul(x, x);
        let sq_inv = group.mul(&xi, &xi);
        let (xg, xig) = (group.mul(x, g), group.mul(&xi, g));
        let shifted: HashSet<Element> =
            pf.a.iter()
                .flat_map(|a| [group.mul(a, &xg), group.mul(a, &xig)])
                .collect();
        // {x,x⁻¹}B must avoid AB and A{x,x⁻¹}g, and xB must avoid x⁻¹B
        let rows_clear = pf.b.iter().all(|b| {
            let (p, q) = (group.mul(x, b), group.mul(&xi, b));
            !in_ab(&p)
                && !in_ab(&q)
                && !shifted.contains(&p)
                && !shifted.contains(&q)
                && !pf.b.contains(&group.mul(&sq, b))
        });
        let sq_inv_g = group.mul(&sq_inv, g);
        !pf.a.contains(x)
            && shifted.iter().all(|h| !in_ab(h))
            && rows_clear
            && !in_ab(&group.mul(&sq, g))
            && !in_ab(&sq_inv_g)
            && !pf.b.contains(&group.mul(&xi, &sq_inv_g))
    };
    let oracle = |x: &Element| {
        let xi = group.inv(x);
        let partner = group.mul(&xi, g);
        oracle_after(group, pf, &[x.clone(), xi], &[partner])
    };
    let found = scan("cover_element", stream, search, live, filter, oracle)?;
    let xi = group.inv(&found.chosen);
    let partner = group.mul(&xi, g);
    let next = pf.with_a(group, &[found.chosen.clone(), xi]).with_b(group, &partner);
    debug_assert!(next.covers(g));
    Ok(found.into_extension(next, Some(partner)))
}

/// One accepted extension inside a driver step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub operation: &'static str,
    pub chosen: Element,
    pub partner: Option<Element>,
    pub probes: usize,
    pub scanned: usize,
}

/// Invariants recorded after a step. `None` marks a clause the driver does
/// not promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Invariants {
    pub monotone: bool,
    pub symmetric: Option<bool>,
    pub oracle: bool,
    pub covered: Option<bool>,
    pub a_hit: bool,
    pub b_hit: bool,
}

impl Invariants {
    pub fn all_hold(&self) -> bool {
        self.monotone
            && self.oracle
            && self.a_hit
            && self.b_hit
            && self.symmetric != Some(false)
            && self.covered != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub base_index: usize,
    /// The element the step must cover, for drivers with a coverage goal.
    pub target: Option<Element>,
    pub actions: Vec<Action>,
    pub covered: usize,
    /// Base sets met by both factors.
    pub bases_hit: usize,
    pub probes: usize,
    pub invariants: Invariants,
    pub mirror: bool,
    pub a: BTreeSet<Element>,
    pub b: BTreeSet<Element>,
}

fn bit(b: bool) -> u8 {
    b as u8
}

fn opt_bit(b: Option<bool>) -> String {
    b.map_or("-".into(), |b| bit(b).to_string())
}

impl fmt::Display for StepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = &self.invariants;
        write!(
            f,
            "step={} base={} target={} |A|={} |B|={} covered={} hits={} probes={} monotone={} symmetric={} oracle={} cover={} a_hit={} b_hit={} mirror={}",
            self.step,
            self.base_index,
            self.target.as_ref().map_or("-".into(), |g| g.to_string()),
            self.a.len(),
            self.b.len(),
            self.covered,
            self.bases_hit,
            self.probes,
            bit(inv.monotone),
            opt_bit(inv.symmetric),
            bit(inv.oracle),
            opt_bit(inv.covered),
            bit(inv.a_hit),
            bit(inv.b_hit),
            bit(self.mirror),
        )?;
        for act in &self.actions {
            write!(f, " {}:{}", act.operation, act.chosen)?;
            if let Some(p) = &act.partner {
                write!(f, "/{p}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abort {
    pub step: usize,
    pub error: Error,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    /// Distinct squares among the first probes of each base set.
    pub squares: Vec<usize>,
}

impl RunTrace {
    pub fn lines(&self) -> Vec<String> {
        self.steps.iter().map(ToString::to_string).collect()
    }

    pub fn all_invariants_hold(&self) -> bool {
        self.steps.iter().all(|s| s.invariants.all_hold())
    }

    pub fn all_mirrors_hold(&self) -> bool {
        self.steps.iter().all(|s| s.mirror)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub pf: PartialFactorization,
    pub trace: RunTrace,
    pub aborted: Option<Abort>,
    /// Oracle confirmations of filter-accepted candidates.
    pub confirmed: usize,
}

/// Number of leading members sampled for the recorded squares evidence.
const SQUARES_SAMPLE: usize = 64;

struct Driver<'a> {
    group: &'a Group,
    base: &'a BaseFamily,
    pf: PartialFactorization,
    trace: RunTrace,
    confirmed: usize,
}

impl<'a> Driver<'a> {
    fn new(group: &'a Group, base: &'a BaseFamily) -> Result<Self> {
        base.check_against(group)?;
        if base.is_empty() {
            return Err(Error::Precondition("the base family is empty".into()));
        }
        let squares = base
            .iter()
            .map(|u| verify::squares_check(group, u, SQUARES_SAMPLE))
            .collect();
        Ok(Driver {
            group,
            base,
            pf: PartialFactorization::trivial(group),
            trace: RunTrace {
                steps: Vec::new(),
                squares,
            },
            confirmed: 0,
        })
    }

    fn apply(&mut self, ext: Extension, operation: &'static str, actions: &mut Vec<Action>) {
        self.confirmed += ext.confirmed;
        actions.push(Action {
            operation,
            chosen: ext.chosen,
            partner: ext.partner,
            probes: ext.probes,
            scanned: ext.scanned,
        });
        self.pf = ext.pf;
    }

    fn record(&mut self, step: usize, target: Option<Element>, symmetric: bool, actions: Vec<Action>) {
        let group = self.group;
        let pf = &self.pf;
        let n = step % self.base.len();
        let u = self.base.get(n).unwrap();
        let monotone = self
            .trace
            .steps
            .last()
            .is_none_or(|prev| prev.a.is_subset(&pf.a) && prev.b.is_subset(&pf.b));
        let symmetric = symmetric.then(|| {
            let e = group.identity();
            pf.a.iter().all(|x| pf.a.contains(&group.inv(x))) && pf.a.contains(&e) && pf.b.contains(&e)
        });
        let covered = target
            .as_ref()
            .map(|g| pf.a.iter().any(|x| pf.b.contains(&group.mul(&group.inv(x), g))));
        let invariants = Invariants {
            monotone,
            symmetric,
            oracle: verify::is_partial_factorization(group, &pf.a, &pf.b).passed(),
            covered,
            a_hit: PartialFactorization::meets(&pf.a, u),
            b_hit: PartialFactorization::meets(&pf.b, u),
        };
        let bases_hit = self
            .base
            .iter()
            .filter(|u| PartialFactorization::meets(&pf.a, u) && PartialFactorization::meets(&pf.b, u))
            .count();
        self.trace.steps.push(StepRecord {
            step,
            base_index: n,
            target,
            probes: actions.iter().map(|a| a.probes).sum(),
            actions,
            covered: pf.a.len() * pf.b.len(),
            bases_hit,
            invariants,
            mirror: verify::mirror_check(group, &pf.a, &pf.b).passed(),
            a: pf.a.clone(),
            b: pf.b.clone(),
        });
    }

    fn finish(self, aborted: Option<Abort>) -> GreedyRun {
        GreedyRun {
            pf: self.pf,
            trace: self.trace,
            aborted,
            confirmed: self.confirmed,
        }
    }
}

/// The inductive construction with a symmetric `A`: at step `n`, cover the
/// `n`-th enumerated element, then make `A` and `B` meet `U_{n mod k}`.
pub fn run_comment4(group: &Group, base: &BaseFamily, steps: usize, search: Search) -> Result<GreedyRun> {
    let mut d = Driver::new(group, base)?;
    let mut targets = group.elements();
    for n in 0..steps {
        let Some(g) = targets.next() else { break };
        let u = base.get(n % base.len()).unwrap();
        let mut actions = Vec::new();
        let outcome = (|| -> Result<()> {
            if !d.pf.covers(&g) {
                let ext = cover_element(group, &d.pf, &g, group.elements(), search)?;
                d.apply(ext, "cover_element", &mut actions);
            }
            if !PartialFactorization::meets(&d.pf.a, u) {
                let ext = extend_a_symmetric(group, &d.pf, u.members(group), search)?;
                d.apply(ext, "extend_A_symmetric", &mut actions);
            }
            if !PartialFactorization::meets(&d.pf.b, u) {
                let ext = extend_b(group, &d.pf, u.members(group), search)?;
                d.apply(ext, "extend_B", &mut actions);
            }
            Ok(())
        })();
        if let Err(error) = outcome {
            return Ok(d.finish(Some(Abort { step: n, error })));
        }
        d.record(n, Some(g), true, actions);
    }
    Ok(d.finish(None))
}

/// Two dense factors without a coverage goal: at step `n`, make `A` and then
/// `B` meet `U_{n mod k}`.
pub fn run_comment6(group: &Group, base: &BaseFamily, steps: usize, search: Search) -> Result<GreedyRun> {
    let mut d = Driver::new(group, base)?;
    d.pf.symmetric_a = false;
    for n in 0..steps {
        let u = base.get(n % base.len()).unwrap();
        let mut actions = Vec::new();
        let outcome = (|| -> Result<()> {
            if !PartialFactorization::meets(&d.pf.a, u) {
                let ext = extend_a_plain(group, &d.pf, u.members(group), search)?;
                d.apply(ext, "extend_A_plain", &mut actions);
            }
            if !PartialFactorization::meets(&d.pf.b, u) {
                let ext = extend_b(group, &d.pf, u.members(group), search)?;
                d.apply(ext, "extend_B", &mut actions);
            }
            Ok(())
        })();
        if let Err(error) = outcome {
            return Ok(d.finish(Some(Abort { step: n, error })));
        }
        d.record(n, None, false, actions);
    }
    Ok(d.finish(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::BaseSet;

    fn zz() -> Group {
        Group::lattice(1).unwrap()
    }

    fn ints(v: &[i64]) -> BTreeSet<Element> {
        v.iter().map(|&c| Element::vector([c])).collect()
    }

    fn int(c: i64) -> Element {
        Element::vector([c])
    }

    fn pf(g: &Group, a: &[i64], b: &[i64], sym: bool) -> PartialFactorization {
        PartialFactorization::new(g, ints(a), ints(b), sym).unwrap()
    }

    fn z8(v: &[u64]) -> BTreeSet<Element> {
        v.iter().map(|&i| Element::Index(i)).collect()
    }

    #[test]
    fn extend_b_examples() {
        let g = zz();
        let evens = BaseSet::progression(vec![2], vec![0]);
        let ext = extend_b(&g, &pf(&g, &[0], &[0], true), evens.members(&g), Search::default()).unwrap();
        assert_eq!(ext.chosen, int(2));
        assert_eq!(ext.pf.b(), &ints(&[0, 2]));

        let start = pf(&g, &[0], &[0, 2], true);
        let own: Vec<Element> = start.b().iter().cloned().collect();
        assert_eq!(
            extend_b(&g, &start, own, Search::default()).unwrap_err(),
            Error::SearchExhausted {
                operation: "extend_B",
                probes: 2
            }
        );

        let c8 = Group::cyclic(8).unwrap();
        let start = PartialFactorization::new(&c8, z8(&[0, 1]), z8(&[0, 2]), false).unwrap();
        let ext = extend_b(&c8, &start, z8(&[4, 5, 6, 7]), Search::default()).unwrap();
        assert_eq!(ext.pf.b(), &z8(&[0, 2, 4]));
        assert_eq!(ext.pf.a(), start.a());
    }

    #[test]
    fn extend_a_symmetric_examples() {
        let g = zz();
        let naturals_from_two = (2..).map(int);
        let ext = extend_a_symmetric(&g, &pf(&g, &[0], &[0, 1], true), naturals_from_two, Search::default()).unwrap();
        assert_eq!(ext.pf.a(), &ints(&[-2, 0, 2]));

        let nonzero = g.elements().skip(1);
        let ext = extend_a_symmetric(&g, &pf(&g, &[0], &[0], true), nonzero, Search::default()).unwrap();
        assert_eq!(ext.pf.a(), &ints(&[-1, 0, 1]));
        assert!(ext.pf.is_symmetric());
    }

    #[test]
    fn extend_a_symmetric_fails_on_boolean_group() {
        let g = Group::boolean();
        let b = BTreeSet::from([Element::bits([]), Element::bits([5])]);
        let start = PartialFactorization::new(&g, BTreeSet::from([Element::bits([])]), b, true).unwrap();
        let err = extend_a_symmetric(&g, &start, g.elements(), Search::new(300)).unwrap_err();
        assert_eq!(
            err,
            Error::SearchExhausted {
                operation: "extend_A_symmetric",
                probes: 300
            }
        );
    }

    #[test]
    fn extend_a_plain_examples() {
        let g = zz();
        let ap = BaseSet::progression(vec![3], vec![2]);
        let ext = extend_a_plain(&g, &pf(&g, &[0], &[0, 1], false), ap.members(&g), Search::default()).unwrap();
        assert_eq!(ext.pf.a(), &ints(&[0, 2]));
        assert!(
            extend_a_plain(&g, &pf(&g, &[0], &[0], false), [int(0)], Search::default())
                .unwrap_err()
                .is_search_exhausted()
        );

        let c8 = Group::cyclic(8).unwrap();
        let start = PartialFactorization::new(&c8, z8(&[0]), z8(&[0, 1]), false).unwrap();
        let ext = extend_a_plain(&c8, &start, z8(&[2, 3]), Search::default()).unwrap();
        assert_eq!(ext.chosen, Element::Index(2));
    }

    // Values checked against a separate brute-force search in tests/oracles.rs.
    #[test]
    fn cover_element_examples() {
        let g = zz();
        let nonzero = || g.elements().skip(1);
        let ext = cover_element(&g, &pf(&g, &[0], &[0], true), &int(5), nonzero(), Search::default()).unwrap();
        assert_eq!(ext.chosen, int(1));
        assert_eq!(ext.partner, Some(int(4)));
        assert!(ext.pf.covers(&int(5)));

        let ext = cover_element(
            &g,
            &pf(&g, &[-1, 0, 1], &[0], true),
            &int(10),
            nonzero(),
            Search::default(),
        )
        .unwrap();
        assert_eq!(ext.chosen, int(2));
        assert!(ext.pf.covers(&int(10)));

        let err = cover_element(&g, &pf(&g, &[0], &[0, 1], true), &int(1), nonzero(), Search::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn cover_element_rejects_the_cubed_collision() {
        // x=1 passes the short condition list but 1·(1+B) meets (-1)·(g-1)
        let g = zz();
        let ext = cover_element(
            &g,
            &pf(&g, &[0], &[0], true),
            &int(3),
            g.elements().skip(1),
            Search::default(),
        )
        .unwrap();
        assert_ne!(ext.chosen, int(1));
        assert!(ext.pf.covers(&int(3)));
    }

    #[test]
    fn comment4_on_the_integers() {
        let g = zz();
        let base = BaseFamily::new(vec![
            BaseSet::progression(vec![2], vec![0]),
            BaseSet::progression(vec![3], vec![1]),
            BaseSet::progression(vec![5], vec![2]),
        ]);
        let run = run_comment4(&g, &base, 50, Search::default()).unwrap();
        assert!(run.aborted.is_none());
        assert_eq!(run.trace.steps.len(), 50);
        assert!(run.trace.all_invariants_hold());
        assert!(run.trace.all_mirrors_hold());
        for h in g.elements().take(50) {
            assert!(run.pf.covers(&h));
        }
        assert_eq!(run.trace.squares, vec![64, 64, 64]);

        let empty = run_comment4(&g, &base, 0, Search::default()).unwrap();
        assert_eq!(empty.pf, PartialFactorization::trivial(&g));
    }

    #[test]
    fn comment4_aborts_on_boolean_group() {
        let g = Group::boolean();
        let base = BaseFamily::new(vec![BaseSet::cylinder([(0, true)])]);
        let run = run_comment4(&g, &base, 4, Search::new(500)).unwrap();
        let abort = run.aborted.expect("must abort");
        assert_eq!(abort.step, 0);
        assert_eq!(
            abort.error,
            Error::SearchExhausted {
                operation: "extend_A_symmetric",
                probes: 500
            }
        );
        assert_eq!(run.trace.squares, vec![1]);
    }

    #[test]
    fn comment6_examples() {
        let g = zz();
        let base = BaseFamily::new(vec![
            BaseSet::progression(vec![2], vec![0]),
            BaseSet::progression(vec![2], vec![1]),
        ]);
        let run = run_comment6(&g, &base, 2, Search::default()).unwrap();
        assert_eq!(run.pf.a(), &ints(&[0, 1]));
        assert_eq!(run.pf.b(), &ints(&[0, 3]));
        assert!(run.trace.all_invariants_hold());

        let run = run_comment6(&g, &base, 0, Search::default()).unwrap();
        assert_eq!(run.pf.a(), &ints(&[0]));
        assert_eq!(run.pf.b(), &ints(&[0]));

        let bg = Group::boolean();
        let cyl = BaseFamily::new((0..4).map(|i| BaseSet::cylinder([(i, true)])).collect());
        let run = run_comment6(&bg, &cyl, 4, Search::default()).unwrap();
        assert!(run.aborted.is_none());
        assert!(verify::density_report(run.pf.a(), &cyl, 4).passed());
        assert!(verify::density_report(run.pf.b(), &cyl, 4).passed());
    }

    #[test]
    fn trace_line_format() {
        let g = zz();
        let base = BaseFamily::new(vec![BaseSet::progression(vec![2], vec![1])]);
        let run = run_comment4(&g, &base, 1, Search::default()).unwrap();
        let line = &run.trace.lines()[0];
        assert!(line.starts_with("step=0 base=0 target=(0) "), "{line}");
        assert!(line.contains("extend_A_symmetric:(1)"), "{line}");
    }
}

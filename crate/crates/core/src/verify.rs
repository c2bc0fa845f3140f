//! Brute-force oracles. Nothing here trusts the constructions: every verdict
//! is recomputed from the group operation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::element::Element;
use crate::error::Error;
use crate::filtration::{decompose, extract_factors, recompose, Filtration, Scope, TransversalSystem};
use crate::group::Group;
use crate::topology::{BaseFamily, BaseSet};

/// Reports keep at most this many witnesses.
pub const WITNESS_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `a·b = a′·b′` with `(a, b) ≠ (a′, b′)`.
    Collision {
        first: (Element, Element),
        second: (Element, Element),
        product: Element,
    },
    Uncovered(Element),
    Foreign(Element),
    /// Base set index not met.
    MissedBase(usize),
    Roundtrip {
        element: Element,
        recomposed: Element,
    },
    /// An x-part with a nonempty y-chain, or the converse.
    Impure {
        element: Element,
    },
    Decompose {
        element: Element,
        error: Error,
    },
    Cardinality {
        expected: u64,
        found: u64,
    },
    Precondition(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Collision { first, second, product } => write!(
                f,
                "collision {}*{} = {}*{} = {product}",
                first.0, first.1, second.0, second.1
            ),
            Witness::Uncovered(g) => write!(f, "uncovered {g}"),
            Witness::Foreign(g) => write!(f, "foreign element {g}"),
            Witness::MissedBase(n) => write!(f, "missed base set {n}"),
            Witness::Roundtrip { element, recomposed } => {
                write!(f, "roundtrip {element} -> {recomposed}")
            }
            Witness::Impure { element } => write!(f, "impure factor {element}"),
            Witness::Decompose { element, error } => write!(f, "decompose {element}: {}", error.name()),
            Witness::Cardinality { expected, found } => {
                write!(f, "cardinality {found}, expected {expected}")
            }
            Witness::Precondition(why) => write!(f, "precondition: {why}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub a_len: usize,
    pub b_len: usize,
    pub products: usize,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    /// Total violations found, including those beyond the witness cap.
    pub violations: usize,
    pub stats: Stats,
}

impl VerificationReport {
    fn collect(stats: Stats) -> Collector {
        Collector {
            witnesses: Vec::new(),
            violations: 0,
            stats,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

struct Collector {
    witnesses: Vec<Witness>,
    violations: usize,
    stats: Stats,
}

impl Collector {
    fn push(&mut self, w: Witness) {
        self.violations += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(w);
        }
    }

    fn finish(self) -> VerificationReport {
        VerificationReport {
            verdict: if self.violations == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            witnesses: self.witnesses,
            violations: self.violations,
            stats: self.stats,
        }
    }
}

/// All `|A|·|B|` products distinct. Duplicate elements in the inputs count
/// once.
pub fn is_partial_factorization<'a, A, B>(group: &Group, a: A, b: B) -> VerificationReport
where
    A: IntoIterator<Item = &'a Element>,
    B: IntoIterator<Item = &'a Element>,
{
    let a = dedup(a);
    let b = dedup(b);
    let mut out = VerificationReport::collect(Stats {
        a_len: a.len(),
        b_len: b.len(),
        ..Stats::default()
    });
    let mut seen: HashMap<Element, (&Element, &Element)> = HashMap::with_capacity(a.len() * b.len());
    for &x in &a {
        for &y in &b {
            let p = group.mul(x, y);
            out.stats.products += 1;
            if let Some(&(x0, y0)) = seen.get(&p) {
                out.push(Witness::Collision {
                    first: (x0.clone(), y0.clone()),
                    second: (x.clone(), y.clone()),
                    product: p,
                });
            } else {
                seen.insert(p, (x, y));
            }
        }
    }
    out.finish()
}

fn dedup<'a, I: IntoIterator<Item = &'a Element>>(items: I) -> Vec<&'a Element> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(*x)).collect()
}

/// Partial factorization with `|A|·|B| = |G|`, so `(a, b) ↦ ab` is a bijection.
pub fn is_factorization<'a, A, B>(group: &Group, a: A, b: B) -> VerificationReport
where
    A: IntoIterator<Item = &'a Element>,
    B: IntoIterator<Item = &'a Element>,
{
    let a = dedup(a);
    let b = dedup(b);
    let Some(order) = group.order().finite() else {
        let mut out = VerificationReport::collect(Stats::default());
        out.push(Witness::Precondition(format!("{} is not finite", group.describe())));
        return out.finish();
    };
    let pf = is_partial_factorization(group, a.iter().copied(), b.iter().copied());
    let mut out = Collector {
        witnesses: pf.witnesses,
        violations: pf.violations,
        stats: pf.stats,
    };
    for &g in a.iter().chain(b.iter()) {
        if !group.contains(g) {
            out.push(Witness::Foreign(g.clone()));
        }
    }
    let found = (a.len() * b.len()) as u64;
    if found != order {
        out.push(Witness::Cardinality { expected: order, found });
        if out.violations == 1 {
            let covered: HashSet<Element> = a.iter().flat_map(|x| b.iter().map(|y| group.mul(x, y))).collect();
            if let Some(g) = group.elements().find(|g| !covered.contains(g)) {
                out.push(Witness::Uncovered(g));
            }
        }
    }
    out.finish()
}

/// Each of `U_0..U_{up_to-1}` meets `s`.
pub fn density_report<'a, S>(s: S, base: &BaseFamily, up_to: usize) -> VerificationReport
where
    S: IntoIterator<Item = &'a Element>,
{
    let s: Vec<&Element> = s.into_iter().collect();
    let mut out = VerificationReport::collect(Stats {
        a_len: s.len(),
        ..Stats::default()
    });
    for n in 0..up_to.min(base.len()) {
        out.stats.checked += 1;
        let u = base.get(n).unwrap();
        if !s.iter().any(|x| u.contains(x)) {
            out.push(Witness::MissedBase(n));
        }
    }
    if up_to > base.len() {
        out.push(Witness::Precondition(format!(
            "prefix {up_to} exceeds the {} base sets",
            base.len()
        )));
    }
    out.finish()
}

/// Distinct squares among the first `k` members of `u`.
pub fn squares_check(group: &Group, u: &BaseSet, k: usize) -> usize {
    u.members(group)
        .take(k)
        .map(|x| group.mul(&x, &x))
        .collect::<HashSet<_>>()
        .len()
}

/// `(B⁻¹, A⁻¹)` is a partial factorization.
pub fn mirror_check<'a, A, B>(group: &Group, a: A, b: B) -> VerificationReport
where
    A: IntoIterator<Item = &'a Element>,
    B: IntoIterator<Item = &'a Element>,
{
    let a_inv: Vec<Element> = a.into_iter().map(|x| group.inv(x)).collect();
    let b_inv: Vec<Element> = b.into_iter().map(|x| group.inv(x)).collect();
    is_partial_factorization(group, &b_inv, &a_inv)
}

/// Roundtrip and purity over `scope`; on `Scope::All` also the bijectivity of
/// the extracted factors.
pub fn filtration_audit(f: &Filtration, t: &TransversalSystem, scope: Scope) -> VerificationReport {
    let group = f.group();
    let mut out = VerificationReport::collect(Stats::default());
    let elements = match scope.elements(group) {
        Ok(it) => it,
        Err(e) => {
            out.push(Witness::Precondition(e.to_string()));
            return out.finish();
        }
    };
    for g in elements {
        out.stats.checked += 1;
        let nf = match decompose(&g, f, t) {
            Ok(nf) => nf,
            Err(error) => {
                out.push(Witness::Decompose { element: g, error });
                continue;
            }
        };
        let back = recompose(group, &nf);
        if back != g {
            out.push(Witness::Roundtrip {
                element: g.clone(),
                recomposed: back,
            });
        }
        let (x, y) = (nf.x_part(group), nf.y_part(group));
        match (decompose(&x, f, t), decompose(&y, f, t)) {
            (Ok(xf), Ok(yf)) => {
                if !xf.y_chain.is_empty() || xf.x_chain != nf.x_chain {
                    out.push(Witness::Impure { element: x });
                }
                if !yf.x_chain.is_empty() || yf.y_chain != nf.y_chain {
                    out.push(Witness::Impure { element: y });
                }
            }
            (Err(error), _) => out.push(Witness::Decompose { element: x, error }),
            (_, Err(error)) => out.push(Witness::Decompose { element: y, error }),
        }
    }
    if scope == Scope::All && out.violations == 0 {
        match extract_factors(f, t, scope) {
            Ok(pair) => {
                let r = is_factorization(group, &pair.a, &pair.b);
                out.stats.a_len = r.stats.a_len;
                out.stats.b_len = r.stats.b_len;
                out.stats.products = r.stats.products;
                for w in r.witnesses {
                    out.push(w);
                }
            }
            Err(e) => out.push(Witness::Precondition(e.to_string())),
        }
    }
    out.finish()
}

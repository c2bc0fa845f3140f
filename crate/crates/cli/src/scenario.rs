//! Scenario files: a TOML document with `group`, `topology`, `filtration` and
//! `params`, resolved against the core types.

use std::fmt;

use densefactor::subgroup::Subgroup;
use densefactor::verify::squares_check;
use densefactor::{BaseFamily, BaseSet, Element, Filtration, Group};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Members drawn per base set by the infinite guard and the squares guard.
pub const GUARD_PROBES: usize = 64;

pub const DEFAULT_BOUND: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    Parse(String),
    Invalid { field: String, reason: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(msg) => write!(f, "parse error: {}", msg.trim_end()),
            ScenarioError::Invalid { field, reason } => write!(f, "invalid {field}: {reason}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn invalid(field: impl Into<String>, reason: impl ToString) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.to_string(),
    }
}

/// An element literal: integers for indexed groups, strings in the group's
/// text encoding otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementText {
    Int(i64),
    Text(String),
}

impl ElementText {
    fn resolve(&self, group: &Group, field: &str) -> Result<Element, ScenarioError> {
        let text = match self {
            ElementText::Int(i) => i.to_string(),
            ElementText::Text(s) => s.clone(),
        };
        group.parse_element(&text).map_err(|e| invalid(field, e))
    }
}

fn resolve_all(list: &[ElementText], group: &Group, field: &str) -> Result<Vec<Element>, ScenarioError> {
    list.iter().map(|e| e.resolve(group, field)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic {
        order: u64,
    },
    /// Direct product of cyclic groups.
    Product {
        orders: Vec<u64>,
    },
    ElementaryAbelian {
        rank: usize,
    },
    Symmetric {
        degree: usize,
    },
    Dihedral {
        n: usize,
    },
    Quaternion,
    Permutation {
        degree: usize,
        generators: Vec<Vec<u32>>,
    },
    Cayley {
        table: Vec<Vec<u32>>,
    },
    Lattice {
        rank: usize,
    },
    Boolean,
}

impl GroupSpec {
    fn build(&self) -> densefactor::Result<Group> {
        match self {
            GroupSpec::Cyclic { order } => Group::cyclic(*order),
            GroupSpec::Product { orders } => {
                Group::product(orders.iter().map(|&n| Group::cyclic(n)).collect::<Result<_, _>>()?)
            }
            GroupSpec::ElementaryAbelian { rank } => Group::elementary_abelian(*rank),
            GroupSpec::Symmetric { degree } => Group::symmetric(*degree),
            GroupSpec::Dihedral { n } => Group::dihedral(*n),
            GroupSpec::Quaternion => Ok(Group::quaternion()),
            GroupSpec::Permutation { degree, generators } => Group::permutation(*degree, generators),
            GroupSpec::Cayley { table } => Group::cayley(table.clone()),
            GroupSpec::Lattice { rank } => Group::lattice(*rank),
            GroupSpec::Boolean => Ok(Group::boolean()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseSpec {
    Progression {
        moduli: Vec<u64>,
        residues: Vec<i64>,
    },
    Cylinder {
        #[serde(default)]
        ones: Vec<u32>,
        #[serde(default)]
        zeros: Vec<u32>,
    },
    Explicit {
        elements: Vec<ElementText>,
    },
    Cofinite {
        excluded: Vec<ElementText>,
    },
}

impl BaseSpec {
    fn build(&self, group: &Group, field: &str) -> Result<BaseSet, ScenarioError> {
        Ok(match self {
            BaseSpec::Progression { moduli, residues } => BaseSet::progression(moduli.clone(), residues.clone()),
            BaseSpec::Cylinder { ones, zeros } => {
                if let Some(i) = ones.iter().find(|i| zeros.contains(i)) {
                    return Err(invalid(field, format!("coordinate {i} fixed to both 0 and 1")));
                }
                BaseSet::cylinder(ones.iter().map(|&i| (i, true)).chain(zeros.iter().map(|&i| (i, false))))
            }
            BaseSpec::Explicit { elements } => BaseSet::explicit(resolve_all(elements, group, field)?),
            BaseSpec::Cofinite { excluded } => BaseSet::cofinite(resolve_all(excluded, group, field)?),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationSpec {
    /// Level `i + 1` is generated by level `i` and these elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<ElementText>>>,
    /// Levels above the trivial one, as full element lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<ElementText>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    /// Density checks cover base sets `0..up_to`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub up_to: Option<usize>,
    /// Filter-pass audit window after each accepted candidate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<usize>,
    /// Closure bound for generated subgroups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    /// Enumeration prefix for factor extraction on infinite groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<usize>,
    /// Elements to decompose.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementText>>,
    /// Generators of the subgroup factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<ElementText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<ElementText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<ElementText>>,
    /// `factorization` or `partial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

/// The document as written; serializing it gives the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topology: Vec<BaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<FiltrationSpec>,
    #[serde(default)]
    pub params: Params,
}

impl ScenarioFile {
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("scenario documents always serialize")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Guard results for one base set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    /// Distinct members among the first [`GUARD_PROBES`].
    pub distinct: usize,
    /// Distinct squares among the same members.
    pub squares: usize,
}

impl Guard {
    pub fn infinite(&self) -> bool {
        self.distinct == GUARD_PROBES
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub digest: String,
    pub group: Group,
    pub base: BaseFamily,
    pub filtration: Option<Filtration>,
    pub guards: Vec<Guard>,
}

impl Scenario {
    pub fn params(&self) -> &Params {
        &self.file.params
    }

    pub fn resolve(&self, list: &[ElementText], field: &str) -> Result<Vec<Element>, ScenarioError> {
        resolve_all(list, &self.group, field)
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    resolve(file)
}

pub fn resolve(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    let group = file.group.build().map_err(|e| invalid("group", e))?;
    let sets = file
        .topology
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let field = format!("topology[{i}]");
            let set = spec.build(&group, &field)?;
            set.check_against(&group).map_err(|e| invalid(&field, e))?;
            Ok(set)
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let base = BaseFamily::new(sets);
    let guards = base
        .iter()
        .map(|u| Guard {
            distinct: u.infinite_guard(&group, GUARD_PROBES),
            squares: squares_check(&group, u, GUARD_PROBES),
        })
        .collect();
    let filtration = file
        .filtration
        .as_ref()
        .map(|spec| build_filtration(&group, spec))
        .transpose()?;
    let digest = file.digest();
    Ok(Scenario {
        file,
        digest,
        group,
        base,
        filtration,
        guards,
    })
}

fn build_filtration(group: &Group, spec: &FiltrationSpec) -> Result<Filtration, ScenarioError> {
    let bound = spec.bound.unwrap_or(DEFAULT_BOUND);
    match (&spec.generators, &spec.levels) {
        (Some(gens), None) => {
            let gens = gens
                .iter()
                .enumerate()
                .map(|(i, g)| resolve_all(g, group, &format!("filtration.generators[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Filtration::from_generators(group.clone(), &gens, bound).map_err(|e| invalid("filtration.generators", e))
        }
        (None, Some(levels)) => {
            let mut chain = vec![Subgroup::trivial(group)];
            for (i, level) in levels.iter().enumerate() {
                let field = format!("filtration.levels[{i}]");
                let elements = resolve_all(level, group, &field)?;
                chain.push(Subgroup::from_elements(group, elements).map_err(|e| invalid(&field, e))?);
            }
            Ok(Filtration::new(group.clone(), chain))
        }
        _ => Err(invalid("filtration", "give exactly one of `generators` and `levels`")),
    }
}

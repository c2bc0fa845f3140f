//! Subgroup lattices of small finite groups and their unrefinable chains.

use std::collections::BTreeSet;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::subgroup::Subgroup;

/// Every subgroup of a finite group, as joins of cyclic subgroups. Sorted by
/// order, then by element list.
pub fn all_subgroups(group: &Group) -> Result<Vec<Subgroup>> {
    let n = group
        .order()
        .finite()
        .ok_or_else(|| Error::Precondition("subgroup lattice needs a finite group".into()))? as usize;
    let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
    let mut found: Vec<Subgroup> = Vec::new();
    for g in group.elements() {
        let h = Subgroup::generate(group, &[g], n)?;
        if seen.insert(h.as_slice().expect("finite closure").to_vec()) {
            found.push(h);
        }
    }
    let mut frontier = 0;
    while frontier < found.len() {
        let end = found.len();
        for i in frontier..end {
            for j in 0..end {
                let mut gens = found[i].generators();
                gens.extend(found[j].generators());
                let join = Subgroup::generate(group, &gens, n)?;
                if seen.insert(join.as_slice().expect("finite closure").to_vec()) {
                    found.push(join);
                }
            }
        }
        frontier = end;
    }
    found.sort_by(|a, b| {
        let (a, b) = (a.as_slice().unwrap(), b.as_slice().unwrap());
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    });
    Ok(found)
}

/// Chains `{e} = G_0 ⊂ G_1 ⊂ ... ⊂ G_m = G` in which each step is a maximal
/// subgroup of the next. At most `limit` chains are returned.
pub fn maximal_chains(group: &Group, limit: usize) -> Result<Vec<Vec<Subgroup>>> {
    let subs = all_subgroups(group)?;
    let sizes: Vec<usize> = subs.iter().map(|s| s.as_slice().unwrap().len()).collect();
    let covers: Vec<Vec<usize>> = (0..subs.len())
        .map(|i| {
            let above: Vec<usize> = (0..subs.len())
                .filter(|&j| sizes[j] > sizes[i] && subs[i].is_subgroup_of(&subs[j]))
                .collect();
            above
                .iter()
                .copied()
                .filter(|&j| {
                    !above
                        .iter()
                        .any(|&l| l != j && sizes[l] < sizes[j] && subs[l].is_subgroup_of(&subs[j]))
                })
                .collect()
        })
        .collect();
    let top = subs.len() - 1;
    let mut chains = Vec::new();
    let mut path = vec![0usize];
    walk(&covers, top, &mut path, &mut chains, limit);
    Ok(chains
        .into_iter()
        .map(|p| p.into_iter().map(|i| subs[i].clone()).collect())
        .collect())
}

fn walk(covers: &[Vec<usize>], top: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    let last = *path.last().unwrap();
    if last == top {
        out.push(path.clone());
        return;
    }
    for &next in &covers[last] {
        path.push(next);
        walk(covers, top, path, out, limit);
        path.pop();
    }
}

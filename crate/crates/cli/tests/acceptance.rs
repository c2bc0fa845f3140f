//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use densefactor::chains::maximal_chains;
use densefactor::verify::{density_report, filtration_audit, is_factorization, is_partial_factorization, mirror_check};
use densefactor::*;
use densefactor_cli::scenario::parse_scenario;
use densefactor_cli::{Command, Exit};

/// Carried from the greedy and transversal criteria into the aggregate ones.
#[derive(Default)]
struct Tally {
    confirmed: usize,
    mismatches: usize,
    states: usize,
    mirror_failures: usize,
}

impl Tally {
    fn mirror(&mut self, group: &Group, a: &BTreeSet<Element>, b: &[Element]) {
        self.states += 1;
        if !mirror_check(group, a, b).passed() {
            self.mirror_failures += 1;
        }
    }

    fn run(&mut self, group: &Group, run: &GreedyRun) {
        self.confirmed += run.confirmed;
        if let Some(abort) = &run.aborted {
            if matches!(abort.error, Error::FilterOracleMismatch { .. }) {
                self.mismatches += 1;
            }
        }
        for step in &run.trace.steps {
            let b: Vec<Element> = step.b.iter().cloned().collect();
            self.mirror(group, &step.a, &b);
        }
    }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn err(e: Error) -> String {
    format!("{}: {e}", e.name())
}

fn idx(v: &[u64]) -> BTreeSet<Element> {
    v.iter().map(|&i| Element::Index(i)).collect()
}

fn cylinders(ones: &[&[u32]]) -> BaseFamily {
    BaseFamily::new(
        ones.iter()
            .map(|o| BaseSet::cylinder(o.iter().map(|&i| (i, true))))
            .collect(),
    )
}

fn meets_all(set: &BTreeSet<Element>, base: &BaseFamily) -> bool {
    base.iter().all(|u| set.iter().any(|x| u.contains(x)))
}

fn golden_z8(_: &mut Tally) -> Outcome {
    let g = Group::cyclic(8).map_err(err)?;
    let gens = [
        vec![Element::Index(4)],
        vec![Element::Index(2)],
        vec![Element::Index(1)],
    ];
    let f = Filtration::from_generators(g.clone(), &gens, 64).map_err(err)?;
    let t = select_transversals(&f).map_err(err)?;
    let pair = extract_factors(&f, &t, Scope::All).map_err(err)?;
    ensure(pair.a == idx(&[0, 1, 4, 5]) && pair.b == idx(&[0, 2]), || {
        format!("A={:?} B={:?}", pair.a, pair.b)
    })?;
    let nf = decompose(&Element::Index(7), &f, &t).map_err(err)?;
    ensure(nf.to_string() == "x(1@2)·x(4@0)·y(2@1)", || {
        format!("decompose(7) = {nf}")
    })?;
    ensure(recompose(&g, &nf) == Element::Index(7), || "recompose(7)".into())?;
    ensure(is_factorization(&g, &pair.a, &pair.b).passed(), || "oracle".into())?;
    Ok(format!("A={{0,1,4,5}} B={{0,2}} 7 = {nf}"))
}

fn filtration_corpus(_: &mut Tally) -> Outcome {
    let mut groups: Vec<Group> = (2..=32).map(|n| Group::cyclic(n).unwrap()).collect();
    groups.extend((1..=4).map(|k| Group::elementary_abelian(k).unwrap()));
    groups.push(Group::symmetric(3).unwrap());
    groups.push(Group::symmetric(4).unwrap());
    groups.push(Group::dihedral(4).unwrap());
    groups.push(Group::quaternion());
    let (mut chains_run, mut elements) = (0, 0);
    for g in &groups {
        let chains = maximal_chains(g, 8).map_err(err)?;
        ensure(!chains.is_empty(), || format!("{}: no chain", g.describe()))?;
        for chain in chains {
            let f = Filtration::new(g.clone(), chain);
            ensure(validate_filtration(&f, 0).is_valid(), || {
                format!("{}: invalid chain", g.describe())
            })?;
            let t = select_transversals(&f).map_err(err)?;
            let audit = filtration_audit(&f, &t, Scope::All);
            ensure(audit.passed(), || {
                format!("{}: audit {:?}", g.describe(), audit.witnesses)
            })?;
            let pair = extract_factors(&f, &t, Scope::All).map_err(err)?;
            let n = g.order().finite().unwrap() as usize;
            ensure(pair.a.len() * pair.b.len() == n, || {
                format!("{}: |A||B| != |G|", g.describe())
            })?;
            ensure(is_factorization(g, &pair.a, &pair.b).passed(), || {
                format!("{}: not a factorization", g.describe())
            })?;
            // the audit already peels every element; recount it here
            for x in g.elements() {
                let nf = decompose(&x, &f, &t).map_err(err)?;
                ensure(
                    recompose(g, &nf) == x && pair.a.contains(&nf.x_part(g)) && pair.b.contains(&nf.y_part(g)),
                    || format!("{}: roundtrip {x}", g.describe()),
                )?;
                elements += 1;
            }
            chains_run += 1;
        }
    }
    Ok(format!(
        "{} groups, {chains_run} chains, {elements} elements",
        groups.len()
    ))
}

fn dense_boolean(_: &mut Tally) -> Outcome {
    let group = Group::boolean();
    let base = cylinders(&[&[0], &[1], &[2], &[3], &[0, 1], &[0, 2], &[1, 2], &[1, 3]]);
    let opts = DenseOptions {
        stages: 12,
        bound: 1 << 20,
        probes: usize::MAX,
    };
    let dense = build_dense_filtration(&group, &base, opts).map_err(err)?;
    let f = &dense.filtration;
    ensure(f.levels().len() == 13, || format!("{} levels", f.levels().len()))?;
    let mut violations = 0;
    for alpha in 0..12 {
        let t = dense.transversals.level(alpha);
        for gamma in 0..base.len().min(alpha + 1) {
            let u = base.get(gamma).unwrap();
            let hit = dense
                .witnesses
                .iter()
                .any(|w| w.stage == alpha && u.contains(&w.element) && t.contains(f, &w.element));
            violations += (!hit) as usize;
        }
    }
    ensure(violations == 0, || {
        format!("{violations} transversal density violations")
    })?;
    let pair = dense.extract(Scope::Prefix(1024)).map_err(err)?;
    ensure(is_partial_factorization(&group, &pair.a, &pair.b).passed(), || {
        "prefix pair is not partial".into()
    })?;
    let (da, db) = (density_report(&pair.a, &base, 8), density_report(&pair.b, &base, 8));
    ensure(da.passed() && db.passed(), || {
        format!("density A {:?} B {:?}", da.witnesses, db.witnesses)
    })?;
    Ok(format!(
        "top order {}, |A|={} |B|={}, 0 violations",
        f.orders().last().unwrap(),
        pair.a.len(),
        pair.b.len()
    ))
}

fn symmetric_greedy_integers(tally: &mut Tally) -> Outcome {
    let group = Group::lattice(1).map_err(err)?;
    let base = BaseFamily::new(vec![
        BaseSet::progression(vec![2], vec![0]),
        BaseSet::progression(vec![3], vec![1]),
        BaseSet::progression(vec![5], vec![2]),
        BaseSet::progression(vec![7], vec![3]),
    ]);
    let result = run_comment4(&group, &base, 200, Search::new(10_000).with_audit(32));
    let run = result.map_err(err)?;
    tally.run(&group, &run);
    if let Some(abort) = &run.aborted {
        return Err(format!("aborted at step {}: {}", abort.step, err(abort.error.clone())));
    }
    ensure(run.trace.steps.len() == 200, || "missing steps".into())?;
    let mut prev: Option<&greedy::StepRecord> = None;
    for (n, step) in run.trace.steps.iter().enumerate() {
        let inv = &step.invariants;
        ensure(
            inv.all_hold() && inv.symmetric == Some(true) && inv.covered == Some(true),
            || format!("step {n}: {step}"),
        )?;
        // recheck each invariant from the snapshots
        let target = group.enumerate(n as u64).map_err(err)?;
        let u = base.get(n % base.len()).unwrap();
        let b: Vec<Element> = step.b.iter().cloned().collect();
        let checks = [
            prev.is_none_or(|p| p.a.is_subset(&step.a) && p.b.is_subset(&step.b)),
            step.a.iter().all(|x| step.a.contains(&group.inv(x))),
            is_partial_factorization(&group, &step.a, &b).passed(),
            step.a
                .iter()
                .any(|x| step.b.contains(&group.mul(&group.inv(x), &target))),
            step.a.iter().any(|x| u.contains(x)),
            step.b.iter().any(|x| u.contains(x)),
        ];
        ensure(checks.iter().all(|&c| c), || format!("step {n}: recheck {checks:?}"))?;
        prev = Some(step);
    }
    Ok(format!(
        "200 steps, |A|={} |B|={}, {} confirmations",
        run.pf.a().len(),
        run.pf.b().len(),
        run.confirmed
    ))
}

fn symmetric_greedy_boolean(tally: &mut Tally) -> Outcome {
    let group = Group::boolean();
    let base = cylinders(&[&[0], &[1], &[2], &[3]]);
    let run = run_comment4(&group, &base, 20, Search::default()).map_err(err)?;
    tally.run(&group, &run);
    ensure(run.trace.squares.iter().all(|&s| s == 1), || {
        format!("squares {:?}", run.trace.squares)
    })?;
    let abort = run.aborted.as_ref().ok_or("run did not abort")?;
    ensure(
        matches!(
            abort.error,
            Error::SearchExhausted {
                operation: "extend_A_symmetric",
                ..
            }
        ),
        || format!("aborted with {}", err(abort.error.clone())),
    )?;
    let path = data("boolean_symmetric.toml");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let scenario = parse_scenario(&text).map_err(|e| e.to_string())?;
    let outcome = densefactor_cli::run(Command::GreedyC4, &scenario);
    ensure(outcome.exit == Exit::Exhausted, || {
        format!("exit {}", outcome.exit.code())
    })?;
    ensure(outcome.report.get("error") == Some("SearchExhausted"), || {
        "report lacks the error".into()
    })?;
    Ok(format!(
        "SearchExhausted in extend_A_symmetric at step {}, squares=1, exit 3",
        abort.step
    ))
}

fn plain_greedy_boolean(tally: &mut Tally) -> Outcome {
    let group = Group::boolean();
    let base = cylinders(&[&[0], &[1], &[2], &[3], &[4], &[5]]);
    let run = run_comment6(&group, &base, 6, Search::default().with_audit(32)).map_err(err)?;
    tally.run(&group, &run);
    if let Some(abort) = &run.aborted {
        return Err(format!("aborted at step {}: {}", abort.step, err(abort.error.clone())));
    }
    let (a, b) = (run.pf.a(), run.pf.b());
    ensure(is_partial_factorization(&group, a, b).passed(), || {
        "not a partial factorization".into()
    })?;
    ensure(meets_all(a, &base) && meets_all(b, &base), || {
        "a base set is missed".into()
    })?;
    Ok(format!("|A|={} |B|={}, both meet all 6 base sets", a.len(), b.len()))
}

fn transversal_boolean(tally: &mut Tally) -> Outcome {
    let group = Group::boolean();
    let a = Subgroup::generate(&group, &[Element::bits([0])], 16).map_err(err)?;
    let base = cylinders(&[&[1], &[2], &[3], &[4]]);
    let pair = subgroup_transversal_factorize(&group, &a, &base, 256, 10_000).map_err(err)?;
    tally.confirmed += pair.provenance.oracle_confirmed;
    let claims = &pair.provenance.claims;
    for k in 1..=claims.len() {
        tally.mirror(&group, &pair.a, &claims[..k]);
    }
    let keys: HashSet<Element> = pair.b.iter().map(|u| a.coset_min(&group, u, Side::Right)).collect();
    ensure(keys.len() == pair.b.len(), || {
        "two representatives share a coset".into()
    })?;
    ensure(meets_all(&pair.b, &base), || "B misses a base set".into())?;
    for g in group.elements().take(256) {
        let witnesses = pair
            .a
            .iter()
            .filter(|x| pair.b.contains(&group.mul(&group.inv(x), &g)))
            .count();
        ensure(witnesses == 1, || format!("{g} has {witnesses} witnesses"))?;
    }
    Ok(format!("|B|={}, 256/256 uniquely covered", pair.b.len()))
}

fn filter_oracle_agreement(tally: &mut Tally) -> Outcome {
    ensure(tally.mismatches == 0, || {
        format!("{} FilterOracleMismatch", tally.mismatches)
    })?;
    ensure(tally.confirmed >= 1000, || {
        format!("only {} confirmed candidates", tally.confirmed)
    })?;
    Ok(format!(
        "{} accepted candidates confirmed, 0 mismatches",
        tally.confirmed
    ))
}

fn mirror_states(tally: &mut Tally) -> Outcome {
    ensure(tally.states > 0, || "no states recorded".into())?;
    ensure(tally.mirror_failures == 0, || {
        format!("{} of {} states fail", tally.mirror_failures, tally.states)
    })?;
    Ok(format!("{} states", tally.states))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

type Check = fn(&mut Tally) -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 9] = [
        ("golden Z8 factorization", Duration::from_secs(1), golden_z8),
        ("filtration corpus", Duration::from_secs(10), filtration_corpus),
        ("dense Boolean filtration", Duration::from_secs(10), dense_boolean),
        (
            "symmetric greedy on Z",
            Duration::from_secs(30),
            symmetric_greedy_integers,
        ),
        (
            "Boolean negative control",
            Duration::from_secs(30),
            symmetric_greedy_boolean,
        ),
        ("plain greedy on Boolean", Duration::from_secs(5), plain_greedy_boolean),
        (
            "subgroup transversal on Boolean",
            Duration::from_secs(5),
            transversal_boolean,
        ),
        (
            "filter/oracle agreement",
            Duration::from_secs(1),
            filter_oracle_agreement,
        ),
        ("mirror property", Duration::from_secs(1), mirror_states),
    ];
    let mut tally = Tally::default();
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check(&mut tally);
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed <= *limit => format!("PASS {}. {name}: {detail} ({elapsed:.2?})", i + 1),
            Ok(detail) => format!("FAIL {}. {name}: over {limit:?}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => format!("FAIL {}. {name}: {why} ({elapsed:.2?})", i + 1),
        };
        failed += line.starts_with("FAIL") as usize;
        println!("{line}");
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Scenario-driven runner for the factorization engines. Each command
//! re-verifies what it builds and renders a deterministic report.

pub mod report;
pub mod scenario;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use clap::ValueEnum;
use densefactor::filtration::Completeness;
use densefactor::greedy::GreedyRun;
use densefactor::verify::{density_report, filtration_audit, is_factorization, is_partial_factorization, mirror_check};
use densefactor::*;

use report::{set_line, Checks, Report};
use scenario::{Scenario, ScenarioError, DEFAULT_BOUND};

pub const DEFAULT_PROBES: usize = 10_000;
pub const DEFAULT_STEPS: usize = 50;
pub const DEFAULT_STAGES: usize = 12;
pub const DEFAULT_UP_TO: usize = 8;
pub const DEFAULT_PREFIX: usize = 1024;
pub const DEFAULT_COVERAGE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Command {
    Decompose,
    FactorizeFiltration,
    FactorizeDense,
    FactorizeTransversal,
    GreedyC4,
    GreedyC6,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    Exhausted = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn of_error(e: &Error) -> Exit {
        if e.is_search_exhausted() {
            Exit::Exhausted
        } else if matches!(e, Error::FilterOracleMismatch { .. }) {
            Exit::Fail
        } else {
            Exit::Usage
        }
    }
}

/// Command-line values that replace scenario params.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub stages: Option<usize>,
    pub probes: Option<usize>,
    pub up_to: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        let p = &mut scenario.file.params;
        p.steps = self.steps.or(p.steps);
        p.stages = self.stages.or(p.stages);
        p.probes = self.probes.or(p.probes);
        p.up_to = self.up_to.or(p.up_to);
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
}

impl Outcome {
    pub fn text(&self) -> String {
        self.report.render()
    }
}

enum Failure {
    Engine(Error),
    Scenario(ScenarioError),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Scenario(e)
    }
}

fn usage(field: &str, reason: &str) -> Failure {
    Failure::Scenario(ScenarioError::Invalid {
        field: field.to_string(),
        reason: reason.to_string(),
    })
}

/// Outcome for a scenario that failed to load.
pub fn rejected(command: Command, err: &ScenarioError) -> Outcome {
    let mut report = Report::default();
    report.field("command", command);
    report.field("error", "ScenarioError");
    report.field("message", err);
    report.field("exit", Exit::Usage.code());
    Outcome {
        report,
        exit: Exit::Usage,
    }
}

pub fn run(command: Command, scenario: &Scenario) -> Outcome {
    let mut head = Report::default();
    head.field("command", command);
    head.field("scenario", format!("sha256:{}", scenario.digest));
    head.field("group", scenario.group.describe());
    head.field("order", scenario.group.order());
    head.field("base_sets", scenario.base.len());
    for (i, g) in scenario.guards.iter().enumerate() {
        head.field(
            &format!("guard.{i}"),
            format!("distinct={} squares={}", g.distinct, g.squares),
        );
    }
    let mut body = Report::default();
    let mut checks = Checks::default();
    let result = match command {
        Command::Decompose => decompose_cmd(scenario, &mut body, &mut checks),
        Command::FactorizeFiltration => filtration_cmd(scenario, &mut body, &mut checks),
        Command::FactorizeDense => dense_cmd(scenario, &mut body, &mut checks),
        Command::FactorizeTransversal => transversal_cmd(scenario, &mut body, &mut checks),
        Command::GreedyC4 | Command::GreedyC6 => greedy_cmd(command, scenario, &mut body, &mut checks),
        Command::Verify => verify_cmd(scenario, &mut body, &mut checks),
    };
    let exit = match &result {
        Ok(Some(e)) => {
            head.field("error", e.name());
            head.field("message", e);
            Exit::of_error(e)
        }
        Err(Failure::Engine(e)) => {
            head.field("error", e.name());
            head.field("message", e);
            Exit::of_error(e)
        }
        Err(Failure::Scenario(e)) => {
            head.field("error", "ScenarioError");
            head.field("message", e);
            Exit::Usage
        }
        Ok(None) if checks.passed() && checks.count() > 0 => Exit::Pass,
        Ok(None) => Exit::Fail,
    };
    let mut report = head;
    for (k, v) in body.fields() {
        report.field(k, v);
    }
    if checks.count() > 0 {
        report.field("verdict", if checks.passed() { Verdict::Pass } else { Verdict::Fail });
    }
    report.field("exit", exit.code());
    for (title, rows) in body.tables() {
        report.table(title).extend(rows.iter().cloned());
    }
    if checks.count() > 0 {
        checks.write(&mut report);
    }
    Outcome { report, exit }
}

/// `Ok(Some(e))`: the engine stopped with `e` after reporting its partial
/// state.
type Step = Result<Option<Error>, Failure>;

fn need_filtration(s: &Scenario) -> Result<&Filtration, Failure> {
    s.filtration
        .as_ref()
        .ok_or_else(|| usage("filtration", "this command needs a [filtration] section"))
}

fn scope_for(group: &Group, prefix: usize) -> Scope {
    if group.is_finite() {
        Scope::All
    } else {
        Scope::Prefix(prefix)
    }
}

fn completeness(c: &Completeness) -> String {
    match c {
        Completeness::Complete => "complete".into(),
        Completeness::CertifiedPrefix(n) => format!("prefix({n})"),
        Completeness::Incomplete { witness } => format!("incomplete({witness})"),
    }
}

fn chain_orders(f: &Filtration) -> String {
    f.orders().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn decompose_cmd(s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let f = need_filtration(s)?;
    let t = select_transversals(f)?;
    let targets: Vec<Element> = match &s.params().elements {
        Some(list) => s.resolve(list, "params.elements")?,
        None if s.group.is_finite() => s.group.elements().collect(),
        None => {
            return Err(usage(
                "params.elements",
                "infinite groups need an explicit element list",
            ))
        }
    };
    body.field("chain", chain_orders(f));
    body.field("elements", targets.len());
    let mut forms = Vec::new();
    let (mut roundtrip, mut well_formed) = (0, 0);
    for g in &targets {
        let nf = decompose(g, f, &t)?;
        roundtrip += (recompose(&s.group, &nf) == *g) as usize;
        well_formed += nf.is_well_formed(f, &t) as usize;
        forms.push(format!("{g} = {nf}"));
    }
    body.table("normal forms").extend(forms);
    let n = targets.len();
    checks.flag("roundtrip", roundtrip == n, format!("{roundtrip}/{n}"));
    checks.flag("well_formed", well_formed == n, format!("{well_formed}/{n}"));
    Ok(None)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Density {
    Both,
    OnlyB,
}

fn factor_checks(
    s: &Scenario,
    a: &BTreeSet<Element>,
    b: &BTreeSet<Element>,
    full: bool,
    density: Density,
    checks: &mut Checks,
) {
    if full {
        checks.oracle("is_factorization", &is_factorization(&s.group, a, b));
    } else {
        checks.oracle("is_partial_factorization", &is_partial_factorization(&s.group, a, b));
    }
    checks.oracle("mirror", &mirror_check(&s.group, a, b));
    if !s.base.is_empty() {
        let up_to = s.params().up_to.unwrap_or(DEFAULT_UP_TO).min(s.base.len());
        if density == Density::Both {
            checks.oracle("density(A)", &density_report(a, &s.base, up_to));
        }
        checks.oracle("density(B)", &density_report(b, &s.base, up_to));
    }
}

fn factor_table(body: &mut Report, pair: &FactorPair) {
    body.field("construction", pair.provenance.construction);
    body.field("tiebreak", &pair.provenance.tiebreak);
    body.field("scope", &pair.provenance.scope);
    body.field("|A|", pair.a.len());
    body.field("|B|", pair.b.len());
    let rows = body.table("factors");
    rows.push(set_line("A", &pair.a));
    rows.push(set_line("B", &pair.b));
}

fn filtration_cmd(s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let f = need_filtration(s)?;
    let prefix = s.params().prefix.unwrap_or(DEFAULT_PREFIX);
    let validity = validate_filtration(f, prefix);
    body.field("chain", chain_orders(f));
    body.field("completeness", completeness(&validity.completeness));
    let detail = validity
        .violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ");
    checks.flag(
        "filtration",
        validity.is_valid(),
        if detail.is_empty() { "ok".into() } else { detail },
    );
    if !validity.is_valid() {
        return Ok(None);
    }
    let t = select_transversals(f)?;
    let scope = scope_for(&s.group, prefix);
    let pair = extract_factors(f, &t, scope)?;
    factor_table(body, &pair);
    checks.oracle("audit", &filtration_audit(f, &t, scope));
    factor_checks(s, &pair.a, &pair.b, scope == Scope::All, Density::Both, checks);
    Ok(None)
}

fn dense_cmd(s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let p = s.params();
    let opts = DenseOptions {
        stages: p.stages.unwrap_or(DEFAULT_STAGES),
        bound: p.bound.unwrap_or(DEFAULT_BOUND),
        probes: p.probes.unwrap_or(DEFAULT_PROBES),
    };
    body.field("stages", opts.stages);
    body.field("probes", opts.probes);
    let dense = build_dense_filtration(&s.group, &s.base, opts)?;
    let f = &dense.filtration;
    body.field("chain", chain_orders(f));
    let top_is_group = f.levels().last().is_some_and(|h| h.order() == s.group.order());
    let scope = if s.group.is_finite() && top_is_group {
        Scope::All
    } else {
        Scope::Prefix(p.prefix.unwrap_or(DEFAULT_PREFIX))
    };
    let mut hits: HashMap<(usize, usize), bool> = HashMap::new();
    let rows = body.table("density witnesses");
    for w in &dense.witnesses {
        let ok = dense.transversals.level(w.stage).contains(f, &w.element)
            && s.base.get(w.base).unwrap().contains(&w.element);
        hits.insert((w.stage, w.base), ok);
        rows.push(format!("stage={} base={} element={}", w.stage, w.base, w.element));
    }
    // every stage must meet every base set with index up to the stage
    let stages = f.levels().len() - 1;
    let missing = (0..stages)
        .flat_map(|alpha| (0..s.base.len().min(alpha + 1)).map(move |gamma| (alpha, gamma)))
        .filter(|key| hits.get(key) != Some(&true))
        .count();
    checks.flag("transversal_density", missing == 0, format!("violations={missing}"));
    let pair = dense.extract(scope)?;
    factor_table(body, &pair);
    factor_checks(s, &pair.a, &pair.b, scope == Scope::All, Density::Both, checks);
    Ok(None)
}

fn transversal_cmd(s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let p = s.params();
    let gens = match &p.subgroup {
        Some(list) => s.resolve(list, "params.subgroup")?,
        None => return Err(usage("params.subgroup", "give generators of the subgroup factor")),
    };
    let a = Subgroup::generate(&s.group, &gens, p.bound.unwrap_or(DEFAULT_BOUND))?;
    let coverage = p.coverage.unwrap_or(DEFAULT_COVERAGE);
    let probes = p.probes.unwrap_or(DEFAULT_PROBES);
    let pair = subgroup_transversal_factorize(&s.group, &a, &s.base, coverage, probes)?;
    body.field("subgroup", a.describe());
    body.field("coverage", coverage);
    body.field("confirmed", pair.provenance.oracle_confirmed);
    factor_table(body, &pair);
    let group = &s.group;
    let keys: HashSet<Element> = pair.b.iter().map(|u| a.coset_min(group, u, Side::Right)).collect();
    checks.flag(
        "distinct_cosets",
        keys.len() == pair.b.len(),
        format!("{}/{}", keys.len(), pair.b.len()),
    );
    let unique = group
        .elements()
        .take(coverage)
        .filter(|g| {
            pair.a
                .iter()
                .filter(|x| pair.b.contains(&group.mul(&group.inv(x), g)))
                .count()
                == 1
        })
        .count();
    checks.flag("unique_cover", unique == coverage, format!("{unique}/{coverage}"));
    let prefixes_ok = (1..=pair.provenance.claims.len())
        .filter(|&k| mirror_check(group, &pair.a, &pair.provenance.claims[..k]).passed())
        .count();
    let claims = pair.provenance.claims.len();
    checks.flag(
        "mirror_prefixes",
        prefixes_ok == claims,
        format!("{prefixes_ok}/{claims}"),
    );
    factor_checks(s, &pair.a, &pair.b, false, Density::OnlyB, checks);
    Ok(None)
}

fn greedy_cmd(command: Command, s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let p = s.params();
    if !s.group.is_finite() {
        if let Some(i) = s.guards.iter().position(|g| !g.infinite()) {
            return Err(usage(&format!("topology[{i}]"), "base set fails the infinite guard"));
        }
    }
    let steps = p.steps.unwrap_or(DEFAULT_STEPS);
    let search = Search::new(p.probes.unwrap_or(DEFAULT_PROBES)).with_audit(p.audit.unwrap_or(0));
    body.field("steps", steps);
    body.field("probes", search.probes);
    body.field("audit", search.audit);
    let run: GreedyRun = if command == Command::GreedyC4 {
        run_comment4(&s.group, &s.base, steps, search)?
    } else {
        run_comment6(&s.group, &s.base, steps, search)?
    };
    let squares: Vec<String> = run.trace.squares.iter().map(ToString::to_string).collect();
    body.field("squares", squares.join(","));
    body.field("completed", run.trace.steps.len());
    body.field("confirmed", run.confirmed);
    body.field("|A|", run.pf.a().len());
    body.field("|B|", run.pf.b().len());
    body.table("trace").extend(run.trace.lines());
    if let Some(abort) = &run.aborted {
        body.field("aborted_at", abort.step);
        body.table("abort").push(format!("step={} {}", abort.step, abort.error));
    }
    let rows = body.table("factors");
    rows.push(set_line("A", run.pf.a()));
    rows.push(set_line("B", run.pf.b()));
    let total = run.trace.steps.len();
    let held = run.trace.steps.iter().filter(|st| st.invariants.all_hold()).count();
    checks.flag("invariants", held == total, format!("{held}/{total}"));
    let mirrors = run.trace.steps.iter().filter(|st| st.mirror).count();
    checks.flag("mirror_steps", mirrors == total, format!("{mirrors}/{total}"));
    factor_checks(s, run.pf.a(), run.pf.b(), false, Density::Both, checks);
    Ok(run.aborted.map(|a| a.error))
}

fn verify_cmd(s: &Scenario, body: &mut Report, checks: &mut Checks) -> Step {
    let p = s.params();
    match (&p.a, &p.b) {
        (Some(a), Some(b)) => {
            let a: BTreeSet<Element> = s.resolve(a, "params.a")?.into_iter().collect();
            let b: BTreeSet<Element> = s.resolve(b, "params.b")?.into_iter().collect();
            let full = match p.mode.as_deref() {
                None => s.group.is_finite(),
                Some("factorization") => true,
                Some("partial") => false,
                Some(_) => return Err(usage("params.mode", "expected `factorization` or `partial`")),
            };
            let rows = body.table("factors");
            rows.push(set_line("A", &a));
            rows.push(set_line("B", &b));
            factor_checks(s, &a, &b, full, Density::Both, checks);
            Ok(None)
        }
        (None, None) => {
            let f = need_filtration(s)?;
            let prefix = p.prefix.unwrap_or(DEFAULT_PREFIX);
            let validity = validate_filtration(f, prefix);
            checks.flag("filtration", validity.is_valid(), completeness(&validity.completeness));
            let t = select_transversals(f)?;
            body.field("chain", chain_orders(f));
            checks.oracle("audit", &filtration_audit(f, &t, scope_for(&s.group, prefix)));
            Ok(None)
        }
        _ => Err(usage("params", "give both `a` and `b`, or neither")),
    }
}

//! The full pipeline for one linkage, with every structural and counting
//! check collected into a serializable report.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{CellId, Complex, SizeGuard};
use crate::error::{Error, Result, Severity};
use crate::homology::{
    betti_from_short_sets, betti_mod2, bijection_map, boundary_squared_failure, check_zero_differential,
};
use crate::linkage::{Linkage, LinkageSummary};
use crate::matching::{critical_pattern, CriticalClass, VectorField};
use crate::paths::{check_order_invariant, path_counts_from, random_walk, DEFAULT_PATH_CAP};
use crate::reversal::{
    apply_reversals, check_survivors, connected_pairs, plan_reversals, starts_with_backward_split, unique_path,
};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub guard: SizeGuard,
    pub path_cap: usize,
    /// Largest `n` for which the step-by-step oracle is run.
    pub literal_steps_max_n: usize,
    /// Random V-walks sampled for the order invariant.
    pub walk_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            guard: SizeGuard::default(),
            path_cap: DEFAULT_PATH_CAP,
            literal_steps_max_n: 6,
            walk_samples: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// For failures: `implementation` or `falsification`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub linkage: LinkageSummary,
    pub n: usize,
    pub cells_per_dim: Vec<usize>,
    pub critical_initial_per_dim: Vec<usize>,
    pub critical_final_per_dim: Vec<usize>,
    pub betti_cellular: Vec<usize>,
    pub betti_shortsets: Vec<usize>,
    pub euler: i64,
    pub perfect: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn pass(&mut self, name: &'static str, detail: impl Into<String>) {
        self.checks.push(Check { name, pass: true, detail: detail.into(), kind: None });
    }

    fn fail(&mut self, name: &'static str, detail: impl Into<String>, kind: &'static str) {
        self.checks.push(Check { name, pass: false, detail: detail.into(), kind: Some(kind) });
    }

    fn error(&mut self, name: &'static str, e: &Error) {
        let kind = match e.severity() {
            Severity::Falsification => "falsification",
            _ => "implementation",
        };
        self.fail(name, e.to_string(), kind);
    }

    fn record(
        &mut self,
        name: &'static str,
        ok: bool,
        pass: impl Into<String>,
        fail: impl FnOnce() -> String,
        kind: &'static str,
    ) {
        if ok {
            self.pass(name, pass);
        } else {
            self.fail(name, fail(), kind);
        }
    }
}

/// Runs the whole pipeline. Invalid input is returned as an error; every
/// other failure becomes a failing check in the report.
pub fn verify(linkage: &Linkage, opts: &VerifyOptions) -> Result<Report> {
    let cx = Complex::with_guard(linkage, opts.guard)?;
    Ok(verify_complex(&cx, opts))
}

pub fn verify_complex(cx: &Complex, opts: &VerifyOptions) -> Report {
    let linkage = cx.linkage();
    let n = cx.n();
    let mut rec = Recorder { checks: Vec::new() };
    let betti_shortsets = betti_from_short_sets(linkage);
    let mut report = Report {
        linkage: LinkageSummary::from(linkage),
        n,
        cells_per_dim: cx.cells_per_dim(),
        critical_initial_per_dim: Vec::new(),
        critical_final_per_dim: Vec::new(),
        betti_cellular: Vec::new(),
        betti_shortsets: betti_shortsets.0.clone(),
        euler: cx.euler_characteristic(),
        perfect: false,
        checks: Vec::new(),
    };

    let violations = cx.validate_regular();
    rec.record(
        "diamond property",
        violations.is_empty(),
        format!("{} cells", cx.len()),
        || format!("{} violations, first {:?}", violations.len(), violations[0]),
        "implementation",
    );
    let dd = boundary_squared_failure(cx);
    rec.record(
        "boundary squared zero",
        dd.is_none(),
        "∂∂ = 0 in every degree",
        || format!("∂_{0} ∂_{1} ≠ 0", dd.unwrap_or(0), dd.unwrap_or(0) + 1),
        "implementation",
    );

    let betti = betti_mod2(cx);
    report.betti_cellular = betti.0.clone();
    rec.record(
        "betti agreement",
        betti == betti_shortsets,
        format!("({betti})"),
        || format!("cellular ({betti}) vs short sets ({betti_shortsets})"),
        "falsification",
    );
    rec.record(
        "euler characteristic",
        betti.euler() == report.euler,
        format!("{}", report.euler),
        || format!("cells give {}, Betti numbers give {}", report.euler, betti.euler()),
        "implementation",
    );

    let field = match VectorField::build(cx) {
        Ok(f) => {
            rec.pass("field axioms", format!("{} pairs", f.pair_count()));
            f
        }
        Err(e) => {
            rec.error("field axioms", &e);
            report.checks = rec.checks;
            return report;
        }
    };
    report.critical_initial_per_dim = field.critical_counts(cx);

    if n <= opts.literal_steps_max_n {
        match VectorField::build_literal_steps(cx) {
            Ok(lit) => {
                let diff = cx.ids().filter(|&c| lit.partner(c) != field.partner(c)).count();
                rec.record(
                    "literal steps agreement",
                    diff == 0,
                    "identical matchings",
                    || format!("{diff} cells differ"),
                    "implementation",
                );
            }
            Err(e) => rec.error("literal steps agreement", &e),
        }
    }

    match field.find_cycle(cx) {
        None => rec.pass("acyclic initial", "no closed V-path"),
        Some(cycle) => {
            rec.fail("acyclic initial", format!("closed V-path through {}", cx.label(cycle[0])), "falsification")
        }
    }
    if !field.is_acyclic(cx) {
        report.checks = rec.checks;
        return report;
    }

    classification_checks(cx, &field, &mut rec);
    no_type1_to_type2_paths(cx, &field, &mut rec);

    connecting_paths_check(cx, &field, opts.path_cap, &mut rec);

    let plan = match plan_reversals(cx, &field, opts.path_cap) {
        Ok(p) => {
            rec.pass("unique reversal paths", format!("{} pairs selected for reversal", p.len()));
            p
        }
        Err(e) => {
            rec.error("unique reversal paths", &e);
            report.checks = rec.checks;
            return report;
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<CellId> = cx.ids().filter(|&c| cx.dim(c) > 0).collect();
    let mut sampled: Vec<Vec<CellId>> = plan.reversals.iter().map(|r| r.path.cells().to_vec()).collect();
    if !starts.is_empty() {
        for _ in 0..opts.walk_samples {
            let s = starts[rng.gen_range(0..starts.len())];
            sampled.push(random_walk(cx, &field, s, &mut rng));
        }
    }
    let broken = sampled.iter().find(|w| !check_order_invariant(cx, w));
    rec.record(
        "order invariant",
        broken.is_none(),
        format!("{} V-paths", sampled.len()),
        || {
            let w = broken.expect("failure");
            let labels: Vec<String> = w.iter().map(|&c| cx.label(c).to_string()).collect();
            format!("violated along {}", labels.join(" → "))
        },
        "falsification",
    );

    let final_field = match apply_reversals(cx, &field, &plan) {
        Ok(f) => f,
        Err(e) => {
            rec.error("acyclic final", &e);
            report.checks = rec.checks;
            return report;
        }
    };
    report.critical_final_per_dim = final_field.critical_counts(cx);
    match final_field.find_cycle(cx) {
        None => rec.pass("acyclic final", "no closed V-path"),
        Some(cycle) => {
            rec.fail("acyclic final", format!("closed V-path through {}", cx.label(cycle[0])), "falsification")
        }
    }
    match check_survivors(cx, &field, &final_field) {
        Ok(()) => rec.pass(
            "final prediction",
            format!("{} critical cells", report.critical_final_per_dim.iter().sum::<usize>()),
        ),
        Err(e) => rec.error("final prediction", &e),
    }

    let perfect = report.critical_final_per_dim == betti.0;
    report.perfect = perfect;
    rec.record(
        "perfect per dimension",
        perfect && betti == betti_shortsets,
        format!("({betti})"),
        || {
            format!(
                "final critical {:?} vs betti ({betti}) vs short sets ({betti_shortsets})",
                report.critical_final_per_dim
            )
        },
        "falsification",
    );

    if final_field.is_acyclic(cx) {
        match check_zero_differential(cx, &final_field) {
            Ok(()) => rec.pass("zero Morse differential", "every path count is even"),
            Err(e) => rec.error("zero Morse differential", &e),
        }
    }
    bijection_check(cx, &final_field, &mut rec);

    report.checks = rec.checks;
    report
}

fn classification_checks(cx: &Complex, field: &VectorField, rec: &mut Recorder) {
    let linkage = cx.linkage();
    let mut gap = None;
    let mut mismatch = None;
    for c in cx.ids() {
        let pattern = critical_pattern(linkage, cx.label(c));
        let critical = field.is_critical(c);
        if critical && pattern.is_none() && gap.is_none() {
            gap = Some(c);
        }
        if !critical && pattern.is_some() && mismatch.is_none() {
            mismatch = Some(c);
        }
    }
    rec.record(
        "critical classification",
        gap.is_none(),
        "every critical cell has one of the two shapes",
        || format!("{} fits neither shape", cx.label(gap.expect("failure"))),
        "falsification",
    );
    rec.record(
        "critical shapes are critical",
        mismatch.is_none(),
        "no matched cell has a critical shape",
        || format!("{} has a critical shape but is matched", cx.label(mismatch.expect("failure"))),
        "falsification",
    );
}

fn no_type1_to_type2_paths(cx: &Complex, field: &VectorField, rec: &mut Recorder) {
    let linkage = cx.linkage();
    let class = |c: CellId| critical_pattern(linkage, cx.label(c));
    let type2: HashSet<CellId> =
        cx.ids().filter(|&c| field.is_critical(c) && matches!(class(c), Some(CriticalClass::Type2 { .. }))).collect();
    let mut pairs = 0usize;
    for beta in cx.ids().filter(|&c| field.is_critical(c) && cx.dim(c) > 0) {
        if !class(beta).is_some_and(|k| k.is_type1()) {
            continue;
        }
        pairs += type2.iter().filter(|&&a| cx.dim(a) + 1 == cx.dim(beta)).count();
        let counts = match path_counts_from(cx, field, beta) {
            Ok(c) => c,
            Err(e) => return rec.error("no type1 to type2 paths", &e),
        };
        for (alpha, count) in counts {
            if type2.contains(&alpha) && count.count > 0 {
                return rec.fail(
                    "no type1 to type2 paths",
                    format!("{} paths from {} to {}", count.count, cx.label(beta), cx.label(alpha)),
                    "falsification",
                );
            }
        }
    }
    rec.pass("no type1 to type2 paths", format!("{pairs} pairs in adjacent dimensions, none joined"));
}

/// Every pair `β = (♠ {k} I ♣ {n,*,j})`, `α = (♠ {k} I ♣∪{j} {n,*})` with
/// `I` j-prelong is joined by exactly one path, which opens by splitting `j`
/// backward off the n-block.
fn connecting_paths_check(cx: &Complex, field: &VectorField, cap: usize, rec: &mut Recorder) {
    const NAME: &str = "connecting paths";
    let pairs = match connected_pairs(cx, field) {
        Ok(p) => p,
        Err(e) => return rec.error(NAME, &e),
    };
    for pair in &pairs {
        match unique_path(cx, field, pair, cap) {
            Ok(path) if starts_with_backward_split(cx, &path, pair.j) => {}
            Ok(_) => {
                return rec.fail(
                    NAME,
                    format!("path from {} does not open by splitting {} off the n-block", cx.label(pair.beta), pair.j),
                    "falsification",
                )
            }
            Err(e) => return rec.error(NAME, &e),
        }
    }
    rec.pass(NAME, format!("{} pairs, each joined by one path opening with a backward split of j", pairs.len()));
}

fn bijection_check(cx: &Complex, final_field: &VectorField, rec: &mut Recorder) {
    let linkage = cx.linkage();
    let n = cx.n();
    let mut image: BTreeSet<CellId> = BTreeSet::new();
    let mut rows = 0;
    for j_set in linkage.short_sets_with_n() {
        rows += 1;
        let (t1, t2) = match bijection_map(linkage, j_set) {
            Ok(pair) => pair,
            Err(e) => return rec.error("bijection", &e),
        };
        for (label, dim) in [(&t1, j_set.len() - 1), (&t2, n - 3 - (j_set.len() - 1))] {
            let Some(id) = cx.id(label) else {
                return rec.fail("bijection", format!("{label} is not a cell"), "falsification");
            };
            if cx.dim(id) != dim || !final_field.is_critical(id) {
                return rec.fail(
                    "bijection",
                    format!("{label} (from {j_set}) is not a final critical {dim}-cell"),
                    "falsification",
                );
            }
            if !image.insert(id) {
                return rec.fail("bijection", format!("{label} is hit twice"), "falsification");
            }
        }
    }
    let critical: BTreeSet<CellId> = final_field.critical_cells(cx).into_iter().flatten().collect();
    let missed: Vec<String> = critical.difference(&image).map(|&c| cx.label(c).to_string()).collect();
    rec.record(
        "bijection",
        missed.is_empty(),
        format!("{rows} short sets, {} cells", image.len()),
        || format!("final critical cells not hit: {missed:?}"),
        "falsification",
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_seven_passes() {
        let l = Linkage::parse("1,1,1,1,1,1,1").unwrap();
        let r = verify(&l, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
        assert!(r.perfect);
        assert_eq!(r.critical_final_per_dim, vec![1, 6, 30, 6, 1]);
        assert!(r.critical_initial_per_dim.iter().sum::<usize>() > 44);
        assert!(r.check("literal steps agreement").is_none());
    }

    #[test]
    fn small_linkages_pass_every_check() {
        for text in ["1,1,1", "1,1,1,3/2", "1,1,1,1,7/2", "1,2,2,3,3,4"] {
            let r = verify(&Linkage::parse(text).unwrap(), &VerifyOptions::default()).unwrap();
            assert!(r.passed(), "{text}: {:?}", r.first_failure());
        }
    }

    #[test]
    fn invalid_input_is_an_error() {
        let l = Linkage::parse("1,1,1,1,1,1,1,1,1,1,1").unwrap();
        assert!(matches!(verify(&l, &VerifyOptions::default()), Err(Error::SizeGuard { .. })));
    }
}

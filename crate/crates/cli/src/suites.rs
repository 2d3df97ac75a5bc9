//! Verification suites. Each suite turns library results into checks and
//! a JSON data block.

use std::path::PathBuf;
use std::time::Instant;

use flagspec::geometry::cache::enumerate_cached;
use flagspec::geometry::counts::Counts;
use flagspec::geometry::enumerate::DEFAULT_MAX_FLAGS;
use flagspec::geometry::opposition::Opposition;
use flagspec::geometry::GeometryKind;
use flagspec::spectra::quotient::{closed_form_quotient, empirical_quotient};
use flagspec::spectra::scheme::closed_form_intersections;
use flagspec::spectra::{
    chi_agreement, check_lift, eigvec_family, intersection_numbers, lambda_min, multiplicity, point_scheme,
    size_of_type_class, spanning_rank, triangular_check, type_profile, verify_flag_eigenvectors, Check,
    MultiplicityMode, Provenance, QuotientMode, Sample, SpectraError, Status,
};
use flagspec::{Enumeration, GeometryInstance};
use serde::Serialize;
use serde_json::{json, Value};

pub const SUITES: [&str; 8] = ["enumerate", "quotient", "eigvec", "chi", "triangular", "scheme", "spanning", "multiplicity"];

pub struct Context {
    pub g: GeometryInstance,
    pub cache_dir: Option<PathBuf>,
    pub max_flags: u64,
    pub sample: Option<usize>,
    pub seed: u64,
    pub empirical: bool,
    en: Option<Enumeration>,
    pub enumeration_ms: Option<u128>,
}

impl Context {
    pub fn new(g: GeometryInstance, cache_dir: Option<PathBuf>, sample: Option<usize>, seed: u64, empirical: bool) -> Context {
        Context { g, cache_dir, max_flags: DEFAULT_MAX_FLAGS, sample, seed, empirical, en: None, enumeration_ms: None }
    }

    /// The instance with its enumeration, built on first use.
    fn parts(&mut self) -> Result<(&GeometryInstance, &Enumeration), SpectraError> {
        if self.en.is_none() {
            let start = Instant::now();
            self.en = Some(enumerate_cached(&self.g, self.cache_dir.as_deref(), self.max_flags)?);
            self.enumeration_ms = Some(start.elapsed().as_millis());
        }
        Ok((&self.g, self.en.as_ref().expect("enumeration was just built")))
    }

    fn sample(&self) -> Sample {
        self.sample.map_or(Sample::All, Sample::Count)
    }
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Errors that mean "this suite does not apply here" rather than a failed
/// claim.
pub fn is_inapplicable(e: &SpectraError) -> bool {
    matches!(e, SpectraError::Unsupported(_) | SpectraError::EvenRankTypeA(_) | SpectraError::ScaleTooLarge { .. })
}

pub fn run(name: &str, ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    match name {
        "enumerate" => enumerate(ctx),
        "quotient" => quotient(ctx),
        "eigvec" => eigvec(ctx),
        "chi" => chi(ctx),
        "triangular" => triangular(ctx),
        "scheme" => scheme(ctx),
        "spanning" => spanning(ctx),
        "multiplicity" => multiplicity_suite(ctx),
        other => unreachable!("unknown suite {other}"),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report data serializes")
}

fn matrix_string(m: &[Vec<i64>]) -> String {
    serde_json::to_string(m).expect("matrix serializes")
}

fn enumerate(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (sample, seed) = (ctx.sample(), ctx.seed);
    let (g, en) = ctx.parts()?;
    let counts = Counts::of(g);
    let opp = Opposition::new(g, en);
    let probes = flagspec::spectra::quotient::spread(en.num_flags(), 4);
    let degrees: Vec<usize> = probes.iter().map(|&c| opp.neighbors(c).len()).collect();
    let valency = counts.valency()?;
    let mut checks = vec![
        Check::compare("point count", counts.point_count()?, en.num_points(), Provenance::Published, Some("point count")),
        Check::compare("flag count", counts.flag_count()?, en.num_flags(), Provenance::Published, Some("maximal flag count")),
        Check::compare(
            "valency on probe flags",
            format!("{valency} at each of {} flags", probes.len()),
            if degrees.iter().all(|&d| valency == d.into()) {
                format!("{valency} at each of {} flags", probes.len())
            } else {
                format!("{degrees:?}")
            },
            Provenance::Published,
            Some("number of flags opposite a flag"),
        ),
    ];
    let mut data = json!({
        "points": en.num_points(),
        "flags": en.num_flags(),
        "leaves": en.num_leaves(),
        "valency": valency.to_string(),
    });
    if g.kind == GeometryKind::OriflammeD {
        let lift = check_lift(g, en, sample, seed)?;
        checks.push(Check::flag(
            "polar neighbors of c^e are the lifts of oriflamme neighbors",
            lift.passed(),
            format!("{} oriflamme flags, {} mismatches", lift.dflags_checked, lift.mismatches),
            Provenance::Derived,
        ));
        data["lift"] = to_value(&lift);
    }
    Ok(SuiteOutput { checks, data })
}

fn quotient(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (g, en) = ctx.parts()?;
    let closed = closed_form_quotient(g)?;
    let empirical = empirical_quotient(g, en, 3, 3);
    let sizes: Vec<i64> = (1..=closed.size())
        .map(|i| size_of_type_class(g, i).map(|s| i64::try_from(s).unwrap_or(i64::MAX)))
        .collect::<Result<_, _>>()?;
    let profile = type_profile(g, en, 0)?;
    let valency = Counts::of(g).valency()?;
    let mut checks = Vec::new();
    match &empirical {
        Ok(e) => checks.push(Check::compare(
            "empirical quotient matrix equals closed form",
            matrix_string(&closed.entries),
            matrix_string(&e.entries),
            Provenance::Published,
            Some("quotient matrix entries"),
        )),
        Err(err) => checks.push(Check::flag("representatives agree", false, err, Provenance::Derived)),
    }
    checks.push(Check::compare(
        "type class sizes at base point 0",
        serde_json::to_string(&sizes).expect("sizes serialize"),
        serde_json::to_string(&profile.class_sizes()).expect("sizes serialize"),
        Provenance::Published,
        Some("type class size"),
    ));
    let row_sums = closed.row_sums();
    checks.push(Check::flag(
        "row sums equal the valency",
        row_sums.iter().all(|&s| valency == s.into()),
        format!("{row_sums:?}"),
        Provenance::Trivial,
    ));
    checks.push(Check::flag(
        "double counting |C_i| Q_ij = |C_j| Q_ji",
        closed.double_counting_holds(&sizes),
        "closed form",
        Provenance::Trivial,
    ));
    let data = json!({
        "closed_form": closed.entries,
        "empirical": empirical.as_ref().ok().map(to_value),
        "class_sizes": sizes,
    });
    Ok(SuiteOutput { checks, data })
}

fn eigvec(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (sample, seed) = (ctx.sample(), ctx.seed);
    let (g, en) = ctx.parts()?;
    let lm = lambda_min(g)?;
    let mut checks = Vec::new();
    let mut families = Vec::new();
    if g.kind != GeometryKind::OriflammeD {
        let q = closed_form_quotient(g)?;
        for j in 1..=flagspec::spectra::family_count(g)? {
            let f = eigvec_family(g, j)?;
            let lq = f.quotient_eigenvalue(&q);
            checks.push(Check::compare(
                format!("Q v_{j} = lambda v_{j}"),
                f.eigenvalue,
                lq.map_or("not an eigenvector".to_string(), |l| l.to_string()),
                Provenance::Published,
                Some("quotient eigenvector family"),
            ));
            families.push(f);
        }
    }
    let report = verify_flag_eigenvectors(g, en, sample, seed)?;
    checks.push(Check::compare(
        format!("family eigenvalue is the smallest eigenvalue {}", lm.value),
        lm.value_int.map_or_else(|| lm.value.to_string(), |v| v.to_string()),
        report.lambda,
        Provenance::Published,
        Some("smallest eigenvalue case table"),
    ));
    checks.push(Check::flag(
        "lifted identity, direct route",
        report.direct_mismatches == 0,
        format!("{} evaluations, {} mismatches", report.direct_evaluations, report.direct_mismatches),
        Provenance::Derived,
    ));
    checks.push(Check::flag(
        "lifted identity, aggregated route",
        report.aggregated_mismatches == 0,
        format!("{} evaluations, {} mismatches", report.aggregated_evaluations, report.aggregated_mismatches),
        Provenance::Derived,
    ));
    let vanishing = report.vanishing_families();
    checks.push(Check::flag(
        "every lifted family is nonzero",
        vanishing.is_empty(),
        format!("nonzero values per family {:?}, vanishing {vanishing:?}", report.nonzero_values),
        Provenance::Trivial,
    ));
    let data = json!({ "lambda_min": to_value(&lm), "families": to_value(&families), "lifted": to_value(&report) });
    Ok(SuiteOutput { checks, data })
}

fn chi(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (sample, seed) = (ctx.sample(), ctx.seed);
    let (g, en) = ctx.parts()?;
    let report = chi_agreement(g, en, sample, seed)?;
    let checks = vec![Check::flag(
        "case formula equals lifted family",
        report.passed(),
        format!("{} evaluations, {} mismatches", report.evaluations, report.mismatches),
        Provenance::Derived,
    )];
    Ok(SuiteOutput { checks, data: to_value(&report) })
}

fn triangular(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (g, en) = ctx.parts()?;
    let report = triangular_check(g, en)?;
    let mut checks = Vec::new();
    for f in &report.families {
        let j = f.j;
        checks.push(Check::flag(format!("T_h^T F_{j} direct"), f.direct_ok, format!("g = {}", f.g), Provenance::Derived));
        checks.push(Check::flag(format!("T_h^T F_{j} expansion"), f.expansion_ok, "relation matrices", Provenance::Derived));
        checks.push(
            Check::flag(format!("coefficient sums for F_{j}"), f.coefficient_ok, "P-matrix", Provenance::Published)
                .with_anchor("triangular criterion coefficient conditions"),
        );
        checks.push(Check::compare(
            format!("alpha_{j} agrees"),
            &f.alpha_coefficients,
            &f.alpha_direct,
            Provenance::Derived,
            None,
        ));
    }
    Ok(SuiteOutput { checks, data: to_value(&report) })
}

fn scheme(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (g, en) = ctx.parts()?;
    let s = point_scheme(g, en)?;
    let closed = closed_form_intersections(g)?;
    let empirical = intersection_numbers(g, en, QuotientMode::Empirical)?;
    let mut compared = 0usize;
    let mut differing = Vec::new();
    for (k, table) in closed.t.iter().enumerate() {
        for (i, row) in table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    compared += 1;
                    if empirical.t[k][i][j] != Some(*v) {
                        differing.push((i + 1, j + 1, k));
                    }
                }
            }
        }
    }
    let sizes: Vec<i64> = (1..=closed.num_types)
        .map(|i| size_of_type_class(g, i).map(|s| i64::try_from(s).unwrap_or(i64::MAX)))
        .collect::<Result<_, _>>()?;
    let checks = vec![
        Check::flag("relations partition point pairs", s.relations_partition, format!("{:?}", s.valencies), Provenance::Trivial),
        Check::flag("A_k E_r = p_k(r) E_r", s.eigen_relations_hold, "scaled idempotents", Provenance::Derived),
        Check::compare(
            "rank of the reflection idempotent",
            &s.generic_degree,
            s.idempotent_ranks[s.special],
            Provenance::Published,
            Some("generic degree of the reflection module"),
        ),
        Check::flag(
            "closed-form intersection numbers match counts",
            differing.is_empty(),
            format!("{compared} compared, differing {differing:?}"),
            Provenance::Published,
        )
        .with_anchor("intersection numbers t^k_ij"),
        Check::flag(
            "intersection rows sum to class sizes",
            empirical.row_sum_failures(&sizes).is_empty(),
            format!("{:?}", empirical.row_sum_failures(&sizes)),
            Provenance::Trivial,
        ),
    ];
    Ok(SuiteOutput { checks, data: json!({ "scheme": to_value(&s), "intersections": to_value(&empirical) }) })
}

fn spanning(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let (g, en) = ctx.parts()?;
    let r = spanning_rank(g, en)?;
    let mut checks = vec![Check::compare(
        "rank of concatenated family columns",
        &r.expected,
        r.rank,
        Provenance::Published,
        Some("families times generic degree"),
    )];
    checks.push(Check::flag(
        "rank agrees across primes",
        r.per_prime.iter().all(|&(_, k)| k == r.rank) && r.exact_rank.is_none_or(|k| k == r.rank),
        format!("{:?}, exact {:?}", r.per_prime, r.exact_rank),
        Provenance::Derived,
    ));
    if let Some(b) = &r.basis_extraction {
        checks.push(Check::flag(
            "dropping one column per family keeps the rank",
            b.ok,
            format!("{} of {} columns, rank {}", b.columns_without, r.columns, b.rank_without),
            Provenance::Published,
        ));
    }
    if let Some(p) = &r.plus_component {
        checks.push(Check::compare(
            "rank of the c^+ component columns",
            &r.expected,
            p.rank,
            Provenance::Derived,
            None,
        ));
    }
    Ok(SuiteOutput { checks, data: to_value(&r) })
}

fn multiplicity_suite(ctx: &mut Context) -> Result<SuiteOutput, SpectraError> {
    let mode = if ctx.empirical { MultiplicityMode::Empirical } else { MultiplicityMode::ClosedForm };
    let r = if ctx.empirical {
        let (g, en) = ctx.parts()?;
        multiplicity(g, Some(en), mode)?
    } else {
        multiplicity(&ctx.g, None, mode)?
    };
    let closed_provenance = if r.closed_derived { Provenance::Derived } else { Provenance::Published };
    let mut checks = Vec::new();
    match r.total_multiplicity_empirical {
        Some(e) => {
            checks.push(Check::compare(
                "closed-form multiplicity equals nullity",
                &r.total_multiplicity_closed,
                e,
                closed_provenance,
                Some("module multiplicity times generic degree"),
            ));
            match &r.table {
                Some(t) => checks.push(Check::compare(
                    format!("table row {} equals nullity", t.row),
                    &t.value,
                    e,
                    Provenance::Published,
                    Some("tabulated multiplicity"),
                )),
                None => checks.push(skipped("table row equals nullity", "no tabulated row")),
            }
            let a = r.arbitration.as_ref().expect("arbitration accompanies the empirical value");
            checks.push(Check::flag(
                "nullity matches at least one source",
                a.resolved,
                format!("matching: {:?}", a.matching),
                Provenance::Derived,
            ));
        }
        None => match &r.table {
            Some(t) => checks.push(Check::compare(
                format!("table row {} equals closed form", t.row),
                &t.value,
                &r.total_multiplicity_closed,
                Provenance::Published,
                Some("tabulated multiplicity"),
            )),
            None => checks.push(skipped("table row equals closed form", "no tabulated row")),
        },
    }
    Ok(SuiteOutput { checks, data: to_value(&r) })
}

pub fn skipped(name: &str, reason: impl ToString) -> Check {
    Check {
        name: name.to_string(),
        status: Status::Skipped,
        expected: String::new(),
        actual: reason.to_string(),
        provenance: Provenance::Trivial,
        anchor: None,
    }
}

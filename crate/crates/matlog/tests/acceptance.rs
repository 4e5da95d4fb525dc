//! Acceptance suite: one test per criterion, each printing a pass line and
//! enforcing its runtime budget. Run with
//! `cargo test -p matlog --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use matlog::algebra::{subalgebra_closure, PowerAlgebra, SubuniverseMode};
use matlog::builtins::{self, Variant};
use matlog::external::{build_external, check_subclassical};
use matlog::files::{canonical_matrix_path, load_matrix, MatrixFile};
use matlog::metatheory::{
    check_alg_witnesses, check_ddt_witness, check_dedeq, classical_rule_corpus, generate_clone,
    recapture, term_equivalent, CorpusOptions, DdtSet, Transformer,
};
use matlog::semantics::{entails, is_theorem, EntailVerdict, SweepOptions};
use matlog::structure::{
    admits_expansion, base_shape, boolean_skeleton, canonical_sigma, check_sep, check_thm411,
    complete_boolean_conuclei_scan, delta1_pointwise, forced_skeleton_candidate,
    inequality_conuclei_scan, inequality_gate, max_boolean_below_bruteforce, survey,
    CanonicalSigma, NoReason, SepVerdict, StructureError, Survey,
};
use matlog::syntax::{self, and, delta1, neg, or, var, Formula, ParseContext};

fn opts() -> SweepOptions {
    SweepOptions::default()
}

fn budget(criterion: u32, what: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    println!(
        "[acceptance] criterion {criterion:2} PASS: {what} ({elapsed:.2?} of {limit:.0?} budget)"
    );
    assert!(
        elapsed <= limit,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} > {limit:?}"
    );
}

fn external_matrix(name: &str) -> (matlog::external::ExternalAlgebra, matlog::algebra::Matrix) {
    let base = builtins::builtin_matrix(name, builtins::default_variant(name)).unwrap();
    let ext = build_external(&base).unwrap();
    let matrix = ext.matrix();
    (ext, matrix)
}

#[test]
fn criterion_01_builtin_fidelity() {
    let started = Instant::now();

    // the nine matrices load from their canonical files, byte for byte
    for name in builtins::LOGIC_NAMES {
        let built = builtins::builtin_matrix(name, builtins::default_variant(name)).unwrap();
        let loaded = load_matrix(&canonical_matrix_path(name)).unwrap();
        assert_eq!(loaded, built, "{name} canonical file");
        let on_disk = std::fs::read_to_string(canonical_matrix_path(name)).unwrap();
        assert_eq!(on_disk, MatrixFile::from_matrix(&built).canonical_string(), "{name} bytes");
    }

    // subclassicality as printed
    for name in ["K3", "LP", "B", "PWK", "L3", "J3"] {
        let m = builtins::builtin_matrix(name, Variant::AsPrinted).unwrap();
        let report = check_subclassical(&m).unwrap();
        assert!(report.verdict, "{name} as printed must be subclassical");
        assert_eq!(report.middle_is_neg_fixpoint, Some(true));
    }

    // De Morgan variants pass for the S3- and Z3-based logics
    for name in ["S", "St", "RM3"] {
        let m = builtins::builtin_matrix(name, Variant::Demorgan).unwrap();
        assert!(check_subclassical(&m).unwrap().verdict, "{name} demorgan");
    }

    // the printed S3 tables produce explicit anomaly reports
    for name in ["S", "St"] {
        let m = builtins::builtin_matrix(name, Variant::AsPrinted).unwrap();
        let report = check_subclassical(&m).unwrap();
        assert!(!report.verdict, "{name} as printed must fail");
        let anomalies = report.anomalies();
        assert!(!anomalies.is_empty());
        assert!(
            anomalies.iter().any(|a| a.contains("or(0,0) = 1, expected 0")),
            "{name}: {anomalies:?}"
        );
    }
    let s3_diff = builtins::variant_diff(&builtins::s3_printed(), &builtins::s3_demorgan());
    assert_eq!(s3_diff.len(), 1);
    assert_eq!((s3_diff[0].op.as_str(), s3_diff[0].left.as_str()), ("or", "1"));

    // the printed Z3 tables coincide with their De Morgan reconstruction:
    // both variants pass and the anomaly report is empty
    assert!(builtins::variant_diff(&builtins::z3_printed(), &builtins::z3_demorgan()).is_empty());
    let rm3_printed = builtins::builtin_matrix("RM3", Variant::AsPrinted).unwrap();
    let report = check_subclassical(&rm3_printed).unwrap();
    assert!(report.verdict);
    assert!(report.anomalies().is_empty());

    budget(1, "built-in fidelity and anomaly reporting", started, Duration::from_secs(1));
}

#[test]
fn criterion_02_countermodel_and_theorem_goldens() {
    let started = Instant::now();

    // LP disjunctive syllogism: least countermodel p=n, q=0
    let lp = builtins::builtin_matrix("LP", Variant::AsPrinted).unwrap();
    let verdict = entails(
        &lp,
        &[var("p"), or(neg(var("p")), var("q"))],
        &var("q"),
        &opts(),
    )
    .unwrap();
    match verdict {
        EntailVerdict::Invalid(cm) => {
            assert_eq!(cm.valuation.describe(&lp.algebra), "p=n, q=0")
        }
        EntailVerdict::Valid => panic!("disjunctive syllogism must fail in LP"),
    }

    // B has no theorems among the depth-<=3 two-variable formulas
    let b = builtins::builtin_matrix("B", Variant::AsPrinted).unwrap();
    let sig = b.algebra.signature().clone();
    let mut count = 0usize;
    for f in syntax::enumerate_formulas(&sig, &["p", "q"], 3) {
        assert!(
            !is_theorem(&b, &f, &opts()).unwrap().is_valid(),
            "{f} would be a theorem of B"
        );
        count += 1;
    }
    assert_eq!(count as u128, syntax::count_formulas(&sig, 2, 3));

    // recapture goldens over the external version of B
    let (_, be) = external_matrix("B");
    assert!(is_theorem(&be, &or(delta1(var("p")), neg(delta1(var("p")))), &opts())
        .unwrap()
        .is_valid());
    match is_theorem(&be, &delta1(or(var("p"), neg(var("p")))), &opts()).unwrap() {
        EntailVerdict::Invalid(cm) => assert_eq!(cm.valuation.describe(&be.algebra), "p=n"),
        EntailVerdict::Valid => panic!("D1(p|~p) must not be a theorem of the external B"),
    }

    budget(2, "countermodel and theorem goldens", started, Duration::from_secs(5));
}

#[test]
fn criterion_03_pointwise_join_oracle() {
    let started = Instant::now();
    let mut checked = 0usize;
    for base in [builtins::sk(), builtins::wk(), builtins::l3()] {
        let shape = base_shape(&base).unwrap();
        for exponent in 1..=3 {
            let power = base.power(exponent).unwrap();
            for code in 0..power.size() {
                assert_eq!(
                    max_boolean_below_bruteforce(&power, &shape, code),
                    Some(delta1_pointwise(&power, &shape, code)),
                    "{} exponent {exponent} code {code}",
                    base.name
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 3 * (3 + 9 + 27));
    budget(3, "pointwise join equals brute-force max Boolean below", started, Duration::from_secs(10));
}

fn expansion_routes_agree(power: &PowerAlgebra, survey: &Survey) -> usize {
    let mut disagreements = 0usize;
    for row in &survey.rows {
        let canonical_total = matches!(row.report.canonical, CanonicalSigma::Total(_));
        // route (a): canonical closure
        if row.report.verdict != canonical_total {
            disagreements += 1;
        }
        // route (b): closure of the carrier in the power of the expanded base
        if row.report.expanded_closed != Some(row.report.verdict) {
            disagreements += 1;
        }
        // route (c): exhaustive skeleton-valued candidate scan (small carriers)
        if row.size <= 9 {
            let codes: BTreeSet<usize> = row.carrier.iter().copied().collect();
            let sub = subalgebra_closure(power, &codes).unwrap();
            assert_eq!(sub.carrier(), row.carrier.as_slice());
            let found = complete_boolean_conuclei_scan(&sub).unwrap();
            if !found.is_empty() != row.report.verdict {
                disagreements += 1;
            }
            // in a YES case the canonical map is a verified complete Boolean
            // conucleus
            if let Some(report) = &row.report.conucleus {
                assert!(report.is_complete_boolean_conucleus());
            }
        }
    }
    disagreements
}

#[test]
fn criterion_04_expansion_survey_routes_agree() {
    let started = Instant::now();
    for base in [builtins::sk(), builtins::wk(), builtins::l3()] {
        let p2 = base.power(2).unwrap();
        let survey2 = survey(&p2, SubuniverseMode::Exhaustive, 4).unwrap();
        assert!(survey2.complete);
        assert_eq!(expansion_routes_agree(&p2, &survey2), 0, "{}^2", base.name);

        let p3 = base.power(3).unwrap();
        let survey3 = survey(&p3, SubuniverseMode::Generated(3), 4).unwrap();
        assert_eq!(expansion_routes_agree(&p3, &survey3), 0, "{}^3", base.name);
    }
    budget(4, "expansion survey: all decision routes agree", started, Duration::from_secs(120));
}

#[test]
fn criterion_05_four_chain_reproduction() {
    let started = Instant::now();
    let p2 = builtins::sk().power(2).unwrap();
    // the four-element chain carrier; it needs both generators, since the
    // closure of (0,n) alone is the two-element carrier {(0,n),(1,n)}
    let a = p2.encode_names(&["0", "n"]).unwrap();
    let top = p2.encode_names(&["1", "1"]).unwrap();
    let k4 = subalgebra_closure(&p2, &BTreeSet::from([a, top])).unwrap();
    assert_eq!(k4.tuple_names(), vec!["(0,0)", "(0,n)", "(1,n)", "(1,1)"]);
    assert_eq!(boolean_skeleton(&k4).unwrap().len(), 2);

    let report = admits_expansion(&k4).unwrap();
    assert!(!report.verdict);
    match report.no_reason {
        Some(NoReason::Escape { element, image }) => {
            assert_eq!(p2.tuple_name(element), "(1,n)");
            assert_eq!(p2.tuple_name(image), "(1,0)");
        }
        other => panic!("expected an escape witness, got {other:?}"),
    }
    // the forced skeleton-valued candidate merges a and ~a, violating
    // separation
    let candidate = forced_skeleton_candidate(&k4).unwrap().unwrap();
    match check_sep(&candidate, &k4).unwrap() {
        SepVerdict::Violation { a, b } => {
            assert_eq!(p2.tuple_name(a), "(0,n)");
            assert_eq!(p2.tuple_name(b), "(1,n)");
        }
        SepVerdict::Holds => panic!("the forced candidate must violate separation"),
    }
    budget(5, "four-chain carrier: escape witness and separation violation", started, Duration::from_secs(1));
}

#[test]
fn criterion_06_inequality_criterion_consistency() {
    let started = Instant::now();
    for base in [builtins::sk(), builtins::wk()] {
        assert!(inequality_gate(&base).unwrap(), "{} gate", base.name);
        let p2 = base.power(2).unwrap();
        let survey2 = survey(&p2, SubuniverseMode::Exhaustive, 4).unwrap();
        let p3 = base.power(3).unwrap();
        let survey3 = survey(&p3, SubuniverseMode::Generated(3), 4).unwrap();
        let mut disagreements = 0usize;
        for (power, rows) in [(&p2, &survey2.rows), (&p3, &survey3.rows)] {
            for row in rows {
                let codes: BTreeSet<usize> = row.carrier.iter().copied().collect();
                let sub = subalgebra_closure(power, &codes).unwrap();
                if row.size <= 9 {
                    // scan route: some Boolean conucleus satisfies the
                    // inequality iff the carrier expands
                    let found = inequality_conuclei_scan(&sub).unwrap();
                    if !found.is_empty() != row.report.verdict {
                        disagreements += 1;
                    }
                }
                // and on YES carriers the canonical map itself satisfies it
                if let CanonicalSigma::Total(sigma) = canonical_sigma(&sub).unwrap() {
                    let report = check_thm411(&sub, &sigma).unwrap();
                    if !report.holds {
                        disagreements += 1;
                    }
                }
            }
        }
        assert_eq!(disagreements, 0, "{}", base.name);
    }
    budget(6, "inequality criterion agrees with the expansion decision", started, Duration::from_secs(120));
}

#[test]
fn criterion_07_algebraizability_witnesses() {
    let started = Instant::now();
    let corpus = CorpusOptions::default();
    for name in builtins::LOGIC_NAMES {
        let (ext, matrix) = external_matrix(name);
        let transformer = Transformer::for_matrix(&matrix, &ext);
        let report = check_alg_witnesses(&matrix, &transformer, &corpus).unwrap();
        assert!(report.truth.pass, "{name}: truth {:?}", report.truth.witnesses);
        assert!(report.equality.pass, "{name}: equality {:?}", report.equality.witnesses);
        assert!(report.tau_rho.pass, "{name}: tau-rho {:?}", report.tau_rho.witnesses);
        assert!(
            report.corpus.pass(),
            "{name}: corpus discrepancies {:?}",
            report.corpus.discrepancies
        );
        assert!(report.corpus.instances >= 500);
    }

    // the two implication sets are interderivable over the expanded
    // Lukasiewicz matrix
    let (ext, _) = external_matrix("L3");
    let m = ext.matrix_with_designated(&[ext.top()]);
    let derived = vec![
        syntax::derived_imp(var("x"), var("y")),
        syntax::derived_imp(var("y"), var("x")),
    ];
    let native = vec![syntax::imp(var("x"), var("y")), syntax::imp(var("y"), var("x"))];
    for target in &native {
        assert!(entails(&m, &derived, target, &opts()).unwrap().is_valid());
    }
    for target in &derived {
        assert!(entails(&m, &native, target, &opts()).unwrap().is_valid());
    }

    budget(7, "algebraizability witnesses pointwise and on the corpus", started, Duration::from_secs(30));
}

#[test]
fn criterion_08_deduction_witnesses() {
    let started = Instant::now();
    let corpus = CorpusOptions::default();
    for name in builtins::LOGIC_NAMES {
        let (ext, matrix) = external_matrix(name);
        let singleton = matrix.designated().len() == 1;
        let ddt = if singleton { DdtSet::arrow_one() } else { DdtSet::arrow_half() };
        let report = check_ddt_witness(&matrix, &ddt, &corpus).unwrap();
        assert!(report.pointwise.pass, "{name}: {:?}", report.pointwise.witnesses);
        assert!(report.corpus.pass(), "{name}: {:?}", report.corpus.discrepancies);
        let _ = ext;
    }

    // footnote distinction: 1 ->L (1 ->L n) = n, while the Boolean-valued
    // witness lands on 0 at (1, n)
    let l3 = builtins::l3();
    let (ext, _) = external_matrix("L3");
    let arrow = |a: usize, b: usize| l3.apply_named(builtins::OP_IMP, &[a, b]).unwrap();
    let (one, mid) = (ext.top(), ext.middle());
    assert_eq!(arrow(one, arrow(one, mid)), mid);
    let witness = &DdtSet::arrow_one().formulas[0];
    let value = matlog::semantics::evaluate(
        witness,
        ext.algebra(),
        &matlog::semantics::Valuation::new(vec!["x".into(), "y".into()], vec![one, mid]),
    )
    .unwrap();
    assert_eq!(value, ext.bottom());

    budget(8, "deduction-theorem witnesses pointwise and on the corpus", started, Duration::from_secs(30));
}

#[test]
fn criterion_09_deductive_equivalence() {
    let started = Instant::now();
    let corpus = CorpusOptions::default();
    // all five defining algebras, which covers the named pairs
    // (K3e, LPe), (Be, PWKe) and the Lukasiewicz pair
    for name in ["K3", "B", "St", "RM3", "L3"] {
        let (ext, _) = external_matrix(name);
        let report = check_dedeq(&ext, &corpus).unwrap();
        assert!(
            report.interpretation_pointwise.pass,
            "{name}: {:?}",
            report.interpretation_pointwise.witnesses
        );
        assert!(
            report.transfer_corpus.pass(),
            "{name}: {:?}",
            report.transfer_corpus.discrepancies
        );
    }
    budget(9, "the {1}/{1,n} pairs are deductively equivalent", started, Duration::from_secs(60));
}

#[test]
fn criterion_10_classical_recapture() {
    let started = Instant::now();
    let corpus = classical_rule_corpus().unwrap();
    assert_eq!(corpus.len(), 20);
    let classical = builtins::builtin_matrix("CL", Variant::AsPrinted).unwrap();
    for named in &corpus {
        assert!(
            entails(&classical, &named.rule.premises, &named.rule.conclusion, &opts())
                .unwrap()
                .is_valid(),
            "{}",
            named.name
        );
    }
    for name in builtins::LOGIC_NAMES {
        let (ext, _) = external_matrix(name);
        for named in &corpus {
            let report = recapture(&named.rule, &ext).unwrap();
            assert!(
                report.verdict.is_valid(),
                "{name}: {} recaptured as {} must be valid",
                named.name,
                report.substituted
            );
        }
    }
    budget(10, "all twenty classical rules recapture in every external matrix", started, Duration::from_secs(30));
}

#[test]
fn criterion_11_term_equivalence() {
    let started = Instant::now();
    let (k3_ext, _) = external_matrix("K3");
    let ske = k3_ext.algebra().clone();

    let report = term_equivalent(&ske, &builtins::l3(), 16).unwrap();
    assert!(report.equivalent, "missing: {:?}", report.missing);
    assert!(report.left_defines_right.iter().any(|(op, _)| op == "imp"));
    assert!(report.right_defines_left.iter().any(|(op, _)| op == "delta1"));

    // designation independence: the external version of LP lives on the
    // same algebra, so the same equivalence grounds the paraconsistent pair
    let (lp_ext, _) = external_matrix("LP");
    assert_eq!(lp_ext.algebra(), &ske);
    let report_lp = term_equivalent(lp_ext.algebra(), &builtins::l3(), 16).unwrap();
    assert!(report_lp.equivalent);

    // without the external operator the equivalence fails, witnessed by
    // middle-value preservation
    let report_no = term_equivalent(&builtins::sk(), &builtins::l3(), 16).unwrap();
    assert!(!report_no.equivalent);
    let (_, why) = report_no.missing.iter().find(|(op, _)| op == "L3.imp").unwrap();
    assert!(why.contains("fixes n"), "{why}");

    // clone saturation on the two-element algebra finds all sixteen binary
    // tables, within the documented bound for three-element saturation
    let b2_clone = generate_clone(&builtins::b2(), 2, 16).unwrap();
    assert!(b2_clone.complete);
    assert_eq!(b2_clone.binary.len(), 16);

    budget(11, "term equivalence with emitted witnesses both ways", started, Duration::from_secs(60));
}

#[test]
fn criterion_12_performance_floor() {
    let started = Instant::now();
    // a valid 12-variable consequence forces the full 3^12 sweep
    let vars: Vec<Formula> = (0..12).map(|i| var(&format!("a{i}"))).collect();
    let big_conjunction = vars.iter().skip(1).fold(vars[0].clone(), |acc, v| and(acc, v.clone()));
    let k3 = builtins::builtin_matrix("K3", Variant::AsPrinted).unwrap();
    let sweep_started = Instant::now();
    let verdict = entails(&k3, &[big_conjunction], &vars[0], &opts()).unwrap();
    let sweep_elapsed = sweep_started.elapsed();
    assert!(verdict.is_valid());
    assert!(
        sweep_elapsed < Duration::from_secs(1),
        "12-variable sweep took {sweep_elapsed:?}"
    );
    budget(12, "single-thread 3^12 sweep under one second", started, Duration::from_secs(2));
}

#[test]
fn parse_error_surfaces_are_stable() {
    // the CLI-facing grammar rejects `->` against a plain Kleene signature
    let sk = builtins::sk();
    let ctx = ParseContext::new(sk.signature());
    assert!(matches!(
        syntax::parse("p -> q", &ctx),
        Err(syntax::ParseError::Bind { .. })
    ));
    // and structure checks demand supported base sizes
    let four = matlog::algebra::FiniteAlgebra::new(
        "four",
        (0..4).map(|i| i.to_string()).collect(),
        matlog::algebra::Signature::new(vec![("neg", 1)]).unwrap(),
        vec![vec![0, 1, 2, 3]],
    )
    .unwrap();
    let power = four.power(1).unwrap();
    let carrier: BTreeSet<usize> = (0..4).collect();
    let sub = subalgebra_closure(&power, &carrier).unwrap();
    assert!(matches!(
        canonical_sigma(&sub),
        Err(StructureError::UnsupportedBase(_, 4))
    ));
}

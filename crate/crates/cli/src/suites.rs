//! The five commands.

use std::collections::BTreeSet;

use martinwalk::chain::{
    check_row_stochastic, check_weak_irreducibility, cylinder_law, kernel_identity_check, markov_property_check,
    sample_path_with, CylinderLaw, GradedChain, LevelLaws, LevelledState,
};
use martinwalk::composition::{
    alpha_walk, boundary_kernel, boundary_kernel_fn, closed_form_kernel, kernel_limit_row, lattice_point,
    polya_cotransition, unscaled_boundary_kernel, Composition, CompositionWalk, SimplexPoint,
};
use martinwalk::definetti::{
    binary_digits, binary_digits_exact, cluster_summary, counting_chain_law, counting_h_recovery,
    definetti_identity_check, estimate_directing_measure, exchangeability_check, ks_distance, polya_marginal_cdf,
    polya_moment_check, projection_consistency_check, reconstruct_exact, reconstruct_real, source_cylinder_law,
    verify_counting_cotransitions, verify_counting_markov, DirectingLaw, DiscreteMeasure, ExchangeableSource,
    MarkovSource, RealMixtureSource, SequenceSource,
};
use martinwalk::harmonic::{
    cotransition_equality_check, density_ratio_check, h_transform, is_harmonic, kernel_transform_check, recover_h,
    representation_check_exact, HarmonicFn,
};
use martinwalk::mc::McConfig;
use martinwalk::report::{mean_and_std_error, Failure, VerificationReport};
use martinwalk::{Error, ProbValue};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{Mode, RunConfig, SourceSpec};
use crate::report::{Record, RecordMode, Report, Table};
use crate::CliError;

pub const KERNEL_LIMIT_TOL: f64 = 1e-3;
pub const CLUSTER_TOL: f64 = 0.02;
pub const CLUSTER_FRACTION: f64 = 0.99;
pub const WEIGHT_TOL: f64 = 0.03;
pub const KS_LIMIT: f64 = 0.04;

/// A configured source; the Markov control is not exchangeable.
pub enum Source {
    Exchangeable(ExchangeableSource),
    Markov(MarkovSource),
}

impl SequenceSource for Source {
    fn alphabet_size(&self) -> usize {
        match self {
            Source::Exchangeable(s) => s.alphabet_size(),
            Source::Markov(s) => s.alphabet_size(),
        }
    }

    fn sequence_probability(&self, seq: &[usize]) -> ProbValue {
        match self {
            Source::Exchangeable(s) => s.sequence_probability(seq),
            Source::Markov(s) => s.sequence_probability(seq),
        }
    }

    fn sample_sequence<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        match self {
            Source::Exchangeable(s) => s.sample_sequence(n, rng),
            Source::Markov(s) => s.sample_sequence(n, rng),
        }
    }
}

pub fn build_source(spec: &SourceSpec) -> Result<Source, CliError> {
    let bad = |e: Error| CliError::Config(e.to_string());
    Ok(match spec {
        SourceSpec::Mixture { atoms, weights } => {
            Source::Exchangeable(ExchangeableSource::mixture(atoms.clone(), weights.clone()).map_err(bad)?)
        }
        SourceSpec::Polya { counts } => Source::Exchangeable(ExchangeableSource::polya(counts.clone()).map_err(bad)?),
        SourceSpec::Markov => Source::Markov(MarkovSource::sticky_binary()),
    })
}

fn lib_err(e: Error) -> CliError {
    match e {
        Error::BudgetExceeded { .. } | Error::AtomBudgetExceeded { .. } => CliError::Budget(e.to_string()),
        Error::InvalidSimplex(_) | Error::InvalidSource(_) | Error::MalformedRational(_) | Error::Domain { .. } => {
            CliError::Config(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn comp_label(x: &Composition) -> String {
    format!("{x:?}")
}

fn comp_json(x: &Composition) -> Value {
    json!(x.parts())
}

fn prob_json(p: &ProbValue) -> Value {
    match p {
        ProbValue::Exact(_) => json!(p.to_string()),
        ProbValue::Float(x) => json!(x),
    }
}

fn uniform_base(d: usize, mode: Mode, budget: usize) -> CompositionWalk {
    let steps = match mode {
        Mode::Exact => SimplexPoint::uniform(d),
        Mode::Float => SimplexPoint::from_f64s(&vec![1.0 / d as f64; d]).expect("uniform point"),
    };
    CompositionWalk::new(steps).with_budget(budget.max(1))
}

/// Exact equality of two path laws over the union of their supports.
fn law_equality<S: LevelledState>(name: &str, a: &CylinderLaw<S>, b: &CylinderLaw<S>) -> VerificationReport {
    let mut report = VerificationReport::new(name);
    let keys: BTreeSet<&Vec<S>> = a.atoms.keys().chain(b.atoms.keys()).collect();
    for path in keys {
        report.compare(|| format!("{path:?}"), a.probability(path), b.probability(path));
    }
    report
}

fn emit(report: &mut Report, name: String, result: Result<VerificationReport, Error>, float: bool) -> Result<(), CliError> {
    match result {
        Ok(v) => report.push(Record::from_verification(name, &v, float)),
        Err(e @ (Error::BudgetExceeded { .. } | Error::AtomBudgetExceeded { .. })) => return Err(lib_err(e)),
        Err(e) => report.push(Record::error(name, &e)),
    }
    Ok(())
}

pub fn run_suite(config: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(config.echo());
    match config.command {
        crate::config::Command::Verify => verify(config, &mut report)?,
        crate::config::Command::Kernel => kernel(config, &mut report)?,
        crate::config::Command::Simulate => simulate(config, &mut report)?,
        crate::config::Command::Estimate => estimate(config, &mut report)?,
        crate::config::Command::Lift => lift(config, &mut report)?,
    }
    Ok(report)
}

// ---------------------------------------------------------------- verify

fn verify(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let float = c.mode == Mode::Float;
    let b = c.budget;
    for &d in &c.dims {
        let walk = uniform_base(d, c.mode, b);
        let tag = format!("d={d}");
        let alphas: Vec<&SimplexPoint> = c.alphas.iter().filter(|a| a.d() == d).collect();

        emit(report, format!("chain.row-stochastic[{tag},uniform]"), check_row_stochastic(&walk, b), float)?;
        emit(report, format!("chain.weak-irreducibility[{tag},uniform]"), check_weak_irreducibility(&walk, b), float)?;
        emit(
            report,
            format!("chain.markov-property[{tag},uniform]"),
            cylinder_law(&walk, b).and_then(|law| markov_property_check(&law)),
            float,
        )?;
        let mut walks: Vec<(String, CompositionWalk)> = vec![("uniform".into(), walk.clone())];
        walks.extend(alphas.iter().map(|a| (format!("alpha={a}"), alpha_walk(a).with_budget(b.max(1)))));
        for (label, w) in &walks {
            let ids = kernel_identity_check(w, b).map_err(lib_err)?;
            for r in ids.reports() {
                report.push(Record::from_verification(format!("chain.{}[{tag},{label}]", r.name), r, float));
            }
        }

        report.push(Record::from_verification(
            format!("composition.closed-form-kernel[{tag}]"),
            &closed_form_vs_dp(d, &walk, b)?,
            float,
        ));
        for (label, w) in &walks {
            report.push(Record::from_verification(
                format!("composition.polya-cotransitions[{tag},{label}]"),
                &polya_cotransition_check(w, b)?,
                float,
            ));
        }

        for alpha in &alphas {
            let label = format!("{tag},alpha={alpha}");
            let h = boundary_kernel_fn(alpha);
            report.push(Record::from_verification(
                format!("harmonic.boundary-kernel[{label}]"),
                &is_harmonic(&walk, &h, b),
                float,
            ));
            if d > 1 {
                let raw = (*alpha).clone();
                let unscaled = HarmonicFn::from_fn(move |x: &Composition| unscaled_boundary_kernel(x, &raw));
                report.push(Record::expect_violations(
                    format!("harmonic.unscaled-kernel-rejected[{label}]"),
                    &is_harmonic(&walk, &unscaled, b),
                    float,
                ));
            }
            let tr = h_transform(walk.clone(), h.clone()).map_err(lib_err)?;
            emit(report, format!("harmonic.density-ratio[{label}]"), density_ratio_check(&walk, &tr, b), float)?;
            emit(report, format!("harmonic.kernel-transform[{label}]"), kernel_transform_check(&walk, &tr, b), float)?;
            emit(
                report,
                format!("harmonic.cotransition-invariance[{label}]"),
                cotransition_equality_check(&walk, &tr, b),
                float,
            )?;
            let direct = alpha_walk(alpha).with_budget(b.max(1));
            emit(
                report,
                format!("harmonic.alpha-walk-is-h-transform[{label}]"),
                cylinder_law(&tr, b).and_then(|x| Ok(law_equality("alpha-walk", &x, &cylinder_law(&direct, b)?))),
                float,
            )?;
            emit(report, format!("harmonic.recover-h[{label}]"), recover_check(&walk, &direct, alpha, b), float)?;
            emit(report, format!("harmonic.representation[{label}]"), representation_check(&walk, &h, b), float)?;
        }

        for spec in c.sources.iter().filter(|s| s.d() == d) {
            definetti_exact(report, spec, &tag, b, float)?;
        }
    }
    lift_exact(report, c.depth.max(1), float)?;
    Ok(())
}

fn closed_form_vs_dp(d: usize, walk: &CompositionWalk, b: usize) -> Result<VerificationReport, CliError> {
    let laws = LevelLaws::new(walk, b).map_err(lib_err)?;
    let mut report = VerificationReport::new("closed-form-kernel");
    for m in 0..=b {
        for x in walk.states_at(m) {
            for (y, k) in laws.kernel_row(&x, b).map_err(lib_err)? {
                report.compare(|| comp_label(&x) + " " + &comp_label(&y), closed_form_kernel(d, &x, &y), k);
            }
        }
    }
    Ok(report)
}

fn polya_cotransition_check(walk: &CompositionWalk, b: usize) -> Result<VerificationReport, CliError> {
    let laws = LevelLaws::new(walk, b).map_err(lib_err)?;
    let mut report = VerificationReport::new("polya-cotransitions");
    for n in 1..=b {
        for y in laws.support(n) {
            for j in 0..y.d() {
                let Some(x) = y.minus(j) else { continue };
                let q = laws.cotransition(y, &x).map_err(lib_err)?;
                report.compare(|| format!("{y:?} -> {x:?}"), polya_cotransition(&x, j), q);
            }
        }
    }
    Ok(report)
}

fn recover_check(
    walk: &CompositionWalk,
    direct: &CompositionWalk,
    alpha: &SimplexPoint,
    b: usize,
) -> Result<VerificationReport, Error> {
    let h = recover_h(walk, direct, b)?;
    let mut report = VerificationReport::new("recover-h");
    for n in 0..=b {
        for x in walk.states_at(n) {
            report.compare(|| comp_label(&x), boundary_kernel(&x, alpha), h.eval(&x));
        }
    }
    Ok(report)
}

fn representation_check(walk: &CompositionWalk, h: &HarmonicFn<Composition>, b: usize) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::new("representation");
    for m in 0..=b.min(2) {
        for x in walk.states_at(m) {
            if !h.eval(&x).is_positive() {
                continue;
            }
            let r = representation_check_exact(walk, h, &x, b)?;
            report.compare(|| comp_label(&x), r.expected, r.observed);
        }
    }
    Ok(report)
}

/// `ĥ(x) = d^m ∫ Π μ_j^{x_j} M(dμ)` for a source with known directing law.
fn expected_h(law: &DirectingLaw, x: &Composition) -> ProbValue {
    let seq: Vec<usize> = x.parts().iter().enumerate().flat_map(|(j, &k)| std::iter::repeat(j).take(k as usize)).collect();
    let moment = law.moment(&seq).expect("known law");
    ProbValue::integer(x.d() as u64).pow(x.level() as u32) * moment
}

fn definetti_exact(report: &mut Report, spec: &SourceSpec, tag: &str, b: usize, float: bool) -> Result<(), CliError> {
    let source = build_source(spec)?;
    let label = format!("{tag},{}", spec.label());
    let d = source.alphabet_size();
    let control = matches!(source, Source::Markov(_));

    let law = source_cylinder_law(&source, b).map_err(lib_err)?;
    let exch = exchangeability_check(&law);
    let markov = verify_counting_markov(&source, b).map_err(lib_err)?.markov;
    let cot = verify_counting_cotransitions(&source, b).map_err(lib_err)?;
    if control {
        report.push(Record::expect_violations(format!("definetti.exchangeability[{label}]"), &exch, float));
        report.push(Record::expect_violations(format!("definetti.counting-markov[{label}]"), &markov, float));
        report.push(Record::expect_violations(format!("definetti.counting-cotransitions[{label}]"), &cot, float));
        let name = format!("definetti.h-recovery[{label}]");
        let record = match counting_h_recovery(&source, b) {
            Err(Error::CotransitionMismatch { mismatches }) => Record::threshold(name, RecordMode::Exact, mismatches as f64, 0.0, true)
                .with_checked(0)
                .with_detail(format!("recovery refused: cotransitions differ at {mismatches} pair(s)")),
            Err(e) => Record::error(name, &e),
            Ok(_) => Record::threshold(name, RecordMode::Exact, 0.0, 0.0, false).with_detail("recovery accepted a non-exchangeable source"),
        };
        report.push(record);
        return Ok(());
    }
    report.push(Record::from_verification(format!("definetti.exchangeability[{label}]"), &exch, float));
    report.push(Record::from_verification(format!("definetti.counting-markov[{label}]"), &markov, float));
    report.push(Record::from_verification(format!("definetti.counting-cotransitions[{label}]"), &cot, float));

    let Source::Exchangeable(ex) = &source else { unreachable!() };
    let directing = DirectingLaw::of(ex);
    let name = format!("definetti.h-recovery[{label}]");
    match counting_h_recovery(&source, b) {
        Ok(h) => {
            let mut v = VerificationReport::new("h-recovery");
            for n in 0..=b {
                for x in Composition::enumerate(d, n) {
                    v.compare(|| comp_label(&x), expected_h(&directing, &x), h.eval(&x));
                }
            }
            report.push(Record::from_verification(name, &v, float));
            let transformed = h_transform(uniform_walk_budget(d, b), h).map_err(lib_err)?;
            let rebuilt = cylinder_law(&transformed, b).map_err(lib_err)?.without_null_atoms();
            let target = counting_chain_law(&source, b).map_err(lib_err)?.without_null_atoms();
            report.push(Record::from_verification(
                format!("definetti.h-transform-reproduces-counting-law[{label}]"),
                &law_equality("counting-law", &rebuilt, &target),
                float,
            ));
        }
        Err(e) => report.push(Record::error(name, &e)),
    }
    emit(
        report,
        format!("definetti.identity[{label},k={b}]"),
        definetti_identity_check(&source, &directing, b).map(|r| r.exact),
        float,
    )?;
    Ok(())
}

fn uniform_walk_budget(d: usize, b: usize) -> CompositionWalk {
    martinwalk::composition::uniform_walk(d).with_budget(b.max(1))
}

fn dyadic_measures() -> Vec<DiscreteMeasure> {
    let r = ProbValue::ratio;
    vec![
        DiscreteMeasure::new(vec![r(5, 8), r(1, 4), r(3, 16)], vec![r(1, 2), r(1, 4), r(1, 4)]).expect("valid"),
        DiscreteMeasure::new(vec![r(0, 1), r(7, 8), r(1, 2)], vec![r(1, 3), r(1, 3), r(1, 3)]).expect("valid"),
    ]
}

fn lift_exact(report: &mut Report, depth: usize, float: bool) -> Result<(), CliError> {
    let measures = dyadic_measures();
    for (i, m) in measures.iter().enumerate() {
        let mut v = VerificationReport::new("projection");
        for k in 1..=depth + 1 {
            let fine = m.digit_law(k + 1).map_err(lib_err)?;
            let coarse = m.digit_law(k).map_err(lib_err)?;
            v.merge(projection_consistency_check(&fine, &coarse).map_err(lib_err)?);
        }
        report.push(Record::from_verification(format!("lift.projection[measure={i},k<={}]", depth + 1), &v, float));
    }
    let mixture = RealMixtureSource::new(measures, vec![ProbValue::ratio(1, 2), ProbValue::ratio(1, 2)]).map_err(lib_err)?;
    let lifted = mixture.lifted_source(depth).map_err(lib_err)?;
    let law = source_cylinder_law(&lifted, 3).map_err(lib_err)?;
    report.push(Record::from_verification(format!("lift.exchangeability[depth={depth},n=3]"), &exchangeability_check(&law), float));

    let h = counting_h_recovery(&lifted, 3).map_err(lib_err)?;
    let directing = DirectingLaw::of(&lifted);
    let mut v = VerificationReport::new("lifted-h-recovery");
    for n in 0..=3 {
        for x in Composition::enumerate(lifted.alphabet_size(), n) {
            v.compare(|| comp_label(&x), expected_h(&directing, &x), h.eval(&x));
        }
    }
    report.push(Record::from_verification(format!("lift.h-recovery[depth={depth},n=3]"), &v, float));

    let shift = 16u32;
    let mut v = VerificationReport::new("exact-digits");
    for i in 0..(1u64 << 10) {
        let x = ProbValue::ratio((i * 37 % (1 << shift)) as i64, 1 << shift);
        let digits = binary_digits_exact(x.as_rational().expect("exact"), shift as usize).map_err(lib_err)?;
        v.compare(|| x.to_string(), x.clone(), reconstruct_exact(&digits));
    }
    report.push(Record::from_verification("lift.exact-digit-roundtrip[K=16]", &v, float));
    Ok(())
}

// ---------------------------------------------------------------- kernel

fn kernel(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let float = c.mode == Mode::Float;
    let b = c.budget;
    let mut table = Table::new(&["kind", "d", "alpha", "x", "y", "n", "value", "reference", "error"]);
    for &d in &c.dims {
        let walk = uniform_base(d, c.mode, b);
        report.push(Record::from_verification(
            format!("kernel.closed-form-vs-dp[d={d},budget={b}]"),
            &closed_form_vs_dp(d, &walk, b)?,
            float,
        ));
        let laws = LevelLaws::new(&walk, b).map_err(lib_err)?;
        for m in 0..=b {
            for x in walk.states_at(m) {
                for (y, k) in laws.kernel_row(&x, b).map_err(lib_err)? {
                    table.push(vec![
                        json!("martin"),
                        json!(d),
                        Value::Null,
                        comp_json(&x),
                        comp_json(&y),
                        json!(y.level()),
                        prob_json(&k),
                        prob_json(&closed_form_kernel(d, &x, &y)),
                        Value::Null,
                    ]);
                }
            }
        }
        let probes: Vec<Composition> = match &c.probes {
            Some(p) => p.iter().filter(|x| x.d() == d).cloned().collect(),
            None => (0..=3).flat_map(|n| Composition::enumerate(d, n)).collect(),
        };
        for alpha in c.alphas.iter().filter(|a| a.d() == d) {
            for x in &probes {
                let bk = boundary_kernel(x, alpha);
                table.push(vec![
                    json!("boundary"),
                    json!(d),
                    json!(alpha.to_string()),
                    comp_json(x),
                    Value::Null,
                    Value::Null,
                    prob_json(&bk),
                    Value::Null,
                    Value::Null,
                ]);
                let row = kernel_limit_row(x, alpha, &c.levels);
                let a = alpha.to_f64s();
                for &(n, err) in &row.errors {
                    let y = lattice_point(&a, n);
                    table.push(vec![
                        json!("limit"),
                        json!(d),
                        json!(alpha.to_string()),
                        comp_json(x),
                        comp_json(&y),
                        json!(n),
                        json!(martinwalk::composition::closed_form_kernel_f64(d, x, &y)),
                        json!(row.limit),
                        json!(err),
                    ]);
                }
                let passed = row.final_error() <= KERNEL_LIMIT_TOL && row.decreasing();
                let trail: Vec<String> = row.errors.iter().map(|(n, e)| format!("n={n}: {e:.3e}")).collect();
                report.push(
                    Record::threshold(
                        format!("kernel.limit[d={d},alpha={alpha},x={}]", comp_label(x)),
                        RecordMode::Float,
                        row.final_error(),
                        KERNEL_LIMIT_TOL,
                        passed,
                    )
                    .with_checked(row.errors.len())
                    .with_expected(row.limit)
                    .with_detail(format!("{}{}", trail.join("; "), if row.decreasing() { "" } else { "; not decreasing" })),
                );
            }
        }
    }
    report.data = Some(table);
    Ok(())
}

// ---------------------------------------------------------------- simulate

fn simulate(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let alpha = &c.alphas[0];
    let d = alpha.d();
    let walk = alpha_walk(alpha);
    let mc = McConfig::new(c.replicates, c.seed).with_workers(c.workers);
    let paths = mc.run(|_, rng| sample_path_with(&walk, c.horizon, rng));

    let mut columns = vec!["replicate".to_string(), "step".to_string()];
    columns.extend((1..=d).map(|j| format!("y_{j}")));
    let mut table = Table { columns, rows: Vec::new() };
    let mut steps = VerificationReport::new("path-steps");
    for (r, path) in paths.iter().enumerate() {
        for (k, y) in path.iter().enumerate() {
            let mut row = vec![json!(r), json!(k)];
            row.extend(y.parts().iter().map(|v| json!(v)));
            table.push(row);
        }
        for (k, w) in path.windows(2).enumerate() {
            match w[0].step_to(&w[1]) {
                Some(j) if alpha.coord(j).is_positive() => steps.pass(),
                _ => steps.fail(Failure::new(
                    format!("replicate {r} step {k}: {:?} -> {:?}", w[0], w[1]),
                    ProbValue::one(),
                    ProbValue::zero(),
                )),
            }
        }
        if path.len() != c.horizon + 1 {
            steps.fail(Failure::new(format!("replicate {r} length"), ProbValue::one(), ProbValue::zero()));
        }
    }
    report.push(Record::from_verification("simulate.path-steps", &steps, false));
    if c.horizon > 0 && c.replicates > 1 {
        for j in 0..d {
            let values: Vec<f64> =
                paths.iter().map(|p| p.last().expect("root").parts()[j] as f64 / c.horizon as f64).collect();
            let (mean, se) = mean_and_std_error(&values);
            let stat = martinwalk::report::StatisticalReport {
                name: format!("coordinate {j}"),
                expected: alpha.coord(j).to_f64(),
                estimate: mean,
                std_error: se,
                replicates: values.len(),
                z_limit: 3.0,
            };
            report.push(Record::from_statistical(format!("simulate.mean-frequency[j={}]", j + 1), &stat));
        }
    }
    report.data = Some(table);
    Ok(())
}

// ---------------------------------------------------------------- estimate

fn estimate(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let spec = &c.sources[0];
    let source = build_source(spec)?;
    let d = source.alphabet_size();
    let mc = McConfig::new(c.replicates, c.seed).with_workers(c.workers);
    let est = estimate_directing_measure(&source, c.horizon, mc).map_err(lib_err)?;

    let mut columns = vec!["replicate".to_string()];
    columns.extend((1..=d).map(|j| format!("p_{j}")));
    let mut table = Table { columns, rows: Vec::new() };
    for (r, s) in est.samples.iter().enumerate() {
        let mut row = vec![json!(r)];
        row.extend(s.to_f64s().into_iter().map(|v| json!(v)));
        table.push(row);
    }

    match spec {
        SourceSpec::Mixture { atoms, weights } => {
            let summary = cluster_summary(&est, atoms);
            for (i, (cluster, w)) in summary.clusters.iter().zip(weights).enumerate() {
                report.push(
                    Record::threshold(
                        format!("estimate.cluster-mean[atom={i}]"),
                        RecordMode::MonteCarlo,
                        cluster.mean_distance,
                        CLUSTER_TOL,
                        cluster.count > 0 && cluster.mean_distance <= CLUSTER_TOL,
                    )
                    .with_checked(cluster.count)
                    .with_detail(format!("atom {}", cluster.atom)),
                );
                let w = w.to_f64();
                let se = (w * (1.0 - w) / est.replicates as f64).sqrt();
                let z = if se > 0.0 { (cluster.weight - w) / se } else { 0.0 };
                report.push(
                    Record::threshold(
                        format!("estimate.cluster-weight[atom={i}]"),
                        RecordMode::MonteCarlo,
                        cluster.weight,
                        WEIGHT_TOL,
                        (cluster.weight - w).abs() <= WEIGHT_TOL,
                    )
                    .with_checked(est.replicates)
                    .with_expected(w)
                    .with_std_error(se, z),
                );
            }
            let frac = summary.fraction_within(CLUSTER_TOL);
            report.push(
                Record::threshold("estimate.fraction-near-atoms", RecordMode::MonteCarlo, frac, CLUSTER_FRACTION, frac >= CLUSTER_FRACTION)
                    .with_checked(est.replicates),
            );
        }
        SourceSpec::Polya { counts } => {
            for j in 0..d {
                let cdf = polya_marginal_cdf(counts, j).map_err(lib_err)?;
                let ks = ks_distance(&est.coordinate(j), cdf);
                report.push(
                    Record::threshold(format!("estimate.ks[j={}]", j + 1), RecordMode::MonteCarlo, ks, KS_LIMIT, ks <= KS_LIMIT)
                        .with_checked(est.replicates),
                );
            }
            for (j, stat) in polya_moment_check(&est, counts).iter().enumerate() {
                report.push(Record::from_statistical(format!("estimate.mean[j={}]", j + 1), stat));
            }
        }
        SourceSpec::Markov => {}
    }
    if !matches!(spec, SourceSpec::Markov) {
        let k = c.k;
        let id = definetti_identity_check(&source, &DirectingLaw::Estimated(est), k).map_err(lib_err)?;
        for stat in &id.statistical {
            report.push(Record::from_statistical(format!("estimate.identity[k={k},seq={}]", stat.name), stat));
        }
    }
    report.data = Some(table);
    Ok(())
}

// ---------------------------------------------------------------- lift

fn lift(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let float = c.mode == Mode::Float;
    let kd = c.digits;
    let bound = 2f64.powi(-(kd as i32));
    let mut worst: f64 = 0.0;
    let mut below = true;
    for i in 0..c.grid {
        let x = i as f64 / c.grid as f64;
        let back = reconstruct_real(&binary_digits(x, kd).map_err(lib_err)?);
        worst = worst.max(x - back);
        below &= back <= x;
    }
    report.push(
        Record::threshold(format!("lift.digit-roundtrip[K={kd},grid={}]", c.grid), RecordMode::Float, worst, bound, worst < bound && below)
            .with_checked(c.grid),
    );
    lift_exact(report, c.depth, float)?;

    let urn = ExchangeableSource::polya(vec![1, 1]).map_err(lib_err)?;
    let id = definetti_identity_check(&urn, &DirectingLaw::of(&urn), c.k).map_err(lib_err)?;
    let zeros = vec![0; c.k];
    report.push(
        Record::from_verification(format!("lift.polya-identity[k={}]", c.k), &id.exact, float)
            .with_detail(format!("P(X = {zeros:?}) = {}", source_cylinder_law(&urn, c.k).map_err(lib_err)?.probability(&zeros))),
    );

    let mut table = Table::new(&["measure", "depth", "index", "digits", "probability"]);
    for (i, m) in dyadic_measures().iter().enumerate() {
        let law = m.digit_law(c.depth).map_err(lib_err)?;
        for (idx, p) in law.probs.iter().enumerate() {
            let digits = martinwalk::definetti::BinaryDigits::from_index(idx, c.depth);
            let code: String = digits.digits().iter().map(|b| char::from(b'0' + b)).collect();
            table.push(vec![json!(i), json!(c.depth), json!(idx), json!(code), prob_json(p)]);
        }
    }
    report.data = Some(table);
    Ok(())
}

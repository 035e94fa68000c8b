use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankone::operators::{cauchy_dual_direct, cauchy_dual_perturbed, direct_power, power_via_lemma};
use rankone::series::SeriesSummary;
use rankone::spectral::{left_spectrum_scan, spectral_radius_gelfand, GridSpec, OperatorSpec};
use rankone::verify::{
    analyticity_verdict_scaled, predict_adjoint_kernel, predict_point_spectrum, predict_spectral_radius, run_suite,
    series_label, Branch, Perturbation, TheoremReport, Tolerances,
};
use rankone::{ComplexRational, PowerSeries, WeightSequence};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Numeric, RunConfig};
use crate::{write_file, CliError, EXIT_PASS, EXIT_VIOLATION};

const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    spaces: Vec<&'static str>,
    perturbations: Vec<String>,
    numeric: &'a Numeric,
    tau: f64,
    tolerances: &'a Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl<'a> Metadata<'a> {
    fn new(config: &'a RunConfig, perturbations: &[Perturbation], seed: Option<u64>) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION"),
            spaces: config.spaces.iter().map(|s| s.kind().name()).collect(),
            perturbations: perturbations.iter().map(Perturbation::label).collect(),
            numeric: &config.numeric,
            tau: config.tau(),
            tolerances: &config.tolerances,
            seed,
        }
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    schema: u32,
    metadata: Metadata<'a>,
    passed: usize,
    failed: usize,
    reports: &'a [TheoremReport],
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn gamma_of(p: &Perturbation) -> ComplexRational {
    p.g.coeff(0)
}

/// `|c|`, exact when `c` is real.
fn modulus_text(c: &ComplexRational) -> String {
    if *c == ComplexRational::real(c.re.clone()) {
        c.re.to_string().trim_start_matches('-').to_string()
    } else {
        format!("{:.6}", c.to_complex64().norm())
    }
}

/// `r(M_z)`: exactly 1 on the named spaces, estimated otherwise.
fn base_radius(space: &WeightSequence, numeric: &Numeric) -> f64 {
    if space.is_named() {
        1.0
    } else {
        spectral_radius_gelfand(&OperatorSpec::shift(space.clone()), numeric.n, numeric.n_max).radius
    }
}

#[derive(Serialize)]
struct EigenEntry {
    value: String,
    vector: String,
}

#[derive(Serialize)]
struct AnalysisEntry {
    space: &'static str,
    f: String,
    g: String,
    pairing: String,
    verdict: &'static str,
    branch: Branch,
    summary: String,
    reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    h0: Option<SeriesSummary>,
    point_spectrum: Vec<EigenEntry>,
    base_radius: f64,
    predicted_radius: f64,
    adjoint_kernel: Vec<String>,
}

fn analyze_one(space: &WeightSequence, r_base: f64, p: &Perturbation) -> AnalysisEntry {
    let gamma = gamma_of(p);
    let mut entry = AnalysisEntry {
        space: space.kind().name(),
        f: series_label(&p.f),
        g: series_label(&p.g),
        pairing: String::new(),
        verdict: "inconclusive",
        branch: Branch::Inconclusive,
        summary: String::new(),
        reason: String::new(),
        h0: None,
        point_spectrum: Vec::new(),
        base_radius: r_base,
        predicted_radius: r_base,
        adjoint_kernel: Vec::new(),
    };
    let verdict = match analyticity_verdict_scaled(&p.f, &gamma, space) {
        Ok(v) => v,
        Err(e) => {
            entry.summary = format!("inconclusive: {e}");
            entry.reason = e.to_string();
            return entry;
        }
    };
    let c = verdict.pairing.clone();
    entry.pairing = c.to_string();
    entry.branch = verdict.branch;
    entry.reason = verdict.reason.clone();
    entry.h0 = verdict.h0.as_ref().map(SeriesSummary::from);
    entry.predicted_radius = predict_spectral_radius(r_base, &c);
    entry.adjoint_kernel = predict_adjoint_kernel(&p.f, &gamma, space)
        .map(|basis| basis.iter().map(ToString::to_string).collect())
        .unwrap_or_default();
    let eigen = predict_point_spectrum(&p.f, &gamma, space).unwrap_or_default();
    entry.point_spectrum = eigen.iter().map(|e| EigenEntry { value: e.value.to_string(), vector: e.vector.to_string() }).collect();

    let radius = if c.to_complex64().norm() > r_base { format!("r = {}", modulus_text(&c)) } else { "r unchanged".into() };
    let spectrum = |value: &ComplexRational| format!("eigenvalue {value} (simple); σ_l = σ_l(M_z) ∪ {{{value}}}");
    entry.verdict = match verdict.analytic() {
        Some(true) => "analytic",
        Some(false) => "not analytic",
        None => "inconclusive",
    };
    entry.summary = match verdict.branch {
        Branch::H0Member => format!("NOT analytic; {}; {radius}", spectrum(&c)),
        Branch::H0NonMember => format!("analytic; σ_l unchanged; {radius}"),
        Branch::ZeroAtOrigin => {
            let why = if gamma.is_zero() { "g=0" } else { "f(0)=0" };
            match eigen.first() {
                Some(e) => format!("analytic ({why}); {}; {radius}", spectrum(&e.value)),
                None => format!("analytic ({why})"),
            }
        }
        Branch::Inconclusive => format!("inconclusive: {}", verdict.reason),
    };
    entry
}

pub fn analyze(config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let mut entries = Vec::new();
    for space in &config.spaces {
        let r_base = base_radius(space, &config.numeric);
        entries.extend(config.perturbations.iter().map(|p| analyze_one(space, r_base, p)));
    }
    let mut text = String::new();
    for e in &entries {
        let _ = writeln!(text, "[{}] f = {}, g = {}", e.space, e.f, e.g);
        let _ = writeln!(text, "  {}", e.summary);
        if !e.pairing.is_empty() {
            let _ = writeln!(text, "  ⟨f,g⟩ = {}", e.pairing);
        }
        if let Some(v) = e.point_spectrum.first() {
            let _ = writeln!(text, "  eigenvector {}", v.vector);
        }
        if !e.adjoint_kernel.is_empty() {
            let _ = writeln!(text, "  ker S* = span{{{}}}", e.adjoint_kernel.join(", "));
        }
    }
    print!("{text}");
    #[derive(Serialize)]
    struct AnalysisFile<'a> {
        schema: u32,
        metadata: Metadata<'a>,
        entries: Vec<AnalysisEntry>,
    }
    let file = AnalysisFile { schema: SCHEMA, metadata: Metadata::new(config, &config.perturbations, None), entries };
    write_file(&out.join("analysis.json"), &to_json(&file))?;
    Ok(EXIT_PASS)
}

pub fn scan(config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let numeric = &config.numeric;
    let tau = config.tau();
    let dir = out.join("scan");
    let mut index = String::from("file,space,f,g,n,tau\n");
    for space in &config.spaces {
        let name = space.kind().name();
        let base = OperatorSpec::shift(space.clone());
        let reach = config
            .perturbations
            .iter()
            .map(|p| (&p.f.coeff(0) * &gamma_of(p).conj()).to_complex64().norm())
            .fold(spectral_radius_gelfand(&base, numeric.n, numeric.n_max).radius, f64::max);
        let grid = GridSpec::centered(numeric.grid_radius.unwrap_or(reach + 0.5), numeric.grid);
        let mut operators = vec![(format!("{name}-base.csv"), base, "[0]".to_string(), "[0]".to_string())];
        for (i, p) in config.perturbations.iter().enumerate() {
            let spec = OperatorSpec::new(space.clone(), p.f.clone(), p.g.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
            operators.push((format!("{name}-p{}.csv", i + 1), spec, series_label(&p.f), series_label(&p.g)));
        }
        for (file, spec, f, g) in operators {
            let scan = left_spectrum_scan(&spec, &grid, numeric.n, tau);
            write_file(&dir.join(&file), &scan.to_csv())?;
            let _ = writeln!(index, "{file},{name},\"{f}\",\"{g}\",{},{tau:e}", numeric.n);
            println!("{file}: {} of {} grid points in the left-spectrum mask", scan.mask.iter().filter(|&&m| m).count(), grid.len());
        }
    }
    write_file(&dir.join("index.csv"), &index)?;
    Ok(EXIT_PASS)
}

fn summarize(reports: &[TheoremReport]) -> (usize, usize) {
    let passed = reports.iter().filter(|r| r.pass).count();
    (passed, reports.len() - passed)
}

fn print_failures(reports: &[TheoremReport]) {
    for r in reports.iter().filter(|r| !r.pass) {
        println!("FAIL {} [{}]: predicted {}, observed {} {}", r.theorem_id, r.instance, r.predicted, r.observed, r.diagnostics);
    }
}

pub fn verify(config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let reports = run_suite(&config.suite());
    let (passed, failed) = summarize(&reports);
    print_failures(&reports);
    println!("{passed} passed, {failed} failed");
    let file = ReportFile {
        schema: SCHEMA,
        metadata: Metadata::new(config, &config.perturbations, None),
        passed,
        failed,
        reports: &reports,
    };
    write_file(&out.join("report.json"), &to_json(&file))?;
    Ok(if failed == 0 { EXIT_PASS } else { EXIT_VIOLATION })
}

fn random_rational(rng: &mut ChaCha8Rng) -> ComplexRational {
    let q = ComplexRational::from_ratio;
    let re = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
    if rng.gen_bool(0.5) {
        &re + &(&ComplexRational::i() * &q(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
    } else {
        re
    }
}

/// Twenty `(f, γ)` pairs with `deg f ≤ 4` and a nonzero leading coefficient.
pub fn random_perturbations(seed: u64) -> Vec<Perturbation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|_| {
            let deg = rng.gen_range(0..=4);
            let mut c: Vec<_> = (0..=deg).map(|_| random_rational(&mut rng)).collect();
            if c[deg].is_zero() {
                c[deg] = ComplexRational::one();
            }
            Perturbation::constant(PowerSeries::polynomial(c), random_rational(&mut rng))
        })
        .collect()
}

fn exact_report(id: &str, instance: String, predicted: &str, equal: bool, diagnostics: String) -> TheoremReport {
    TheoremReport {
        theorem_id: id.into(),
        instance,
        predicted: predicted.into(),
        observed: if equal { "equal" } else { "differs" }.into(),
        tolerance: None,
        pass: equal,
        diagnostics,
    }
}

fn power_oracle(space: &WeightSequence, p: &Perturbation, numeric: &Numeric) -> TheoremReport {
    let instance = format!("{}: {}", space.kind().name(), p.label());
    let diagnostics = format!("N = {}, n ≤ {}", numeric.exact_n, numeric.exact_powers);
    let mut bad = Vec::new();
    for n in 1..=numeric.exact_powers {
        let pair = power_via_lemma(space, &p.f, &p.g, n, numeric.exact_n)
            .and_then(|l| direct_power(space, &p.f, &p.g, n, numeric.exact_n).map(|d| (l, d)));
        match pair {
            Ok((lemma, direct)) if lemma.matrix() == &direct.matrix().resized(lemma.rows(), lemma.cols()) => {}
            Ok(_) => bad.push(format!("n = {n}")),
            Err(e) => bad.push(format!("n = {n}: {e}")),
        }
    }
    let diagnostics = if bad.is_empty() { diagnostics } else { format!("{diagnostics}; mismatches {bad:?}") };
    exact_report("power-formula", instance, "S^n = lemma expansion (exact)", bad.is_empty(), diagnostics)
}

fn cauchy_oracle(space: &WeightSequence, g: &PowerSeries, numeric: &Numeric) -> TheoremReport {
    let n = numeric.exact_n;
    let interior = n - 4;
    let f = PowerSeries::from_ints(&[1]);
    let instance = format!("{}: f = [1], g = {}", space.kind().name(), series_label(g));
    let result = cauchy_dual_perturbed(space, &f, g, n).and_then(|a| cauchy_dual_direct(space, &f, g, n).map(|b| (a, b)));
    let (equal, diagnostics) = match result {
        Ok((formula, direct)) => {
            let rows = formula.rows().max(direct.rows());
            (formula.matrix().resized(rows, interior) == direct.matrix().resized(rows, interior), format!("columns 0..{interior}, N = {n}"))
        }
        Err(e) => (false, e.to_string()),
    };
    exact_report("cauchy-dual", instance, "(M_z + 1⊗g)' formula = S(S*S)⁻¹ (exact)", equal, diagnostics)
}

pub fn oracle(config: &RunConfig, out: &Path, seed: Option<u64>) -> Result<i32, CliError> {
    let mut perturbations = config.perturbations.clone();
    if let Some(seed) = seed {
        perturbations.extend(random_perturbations(seed));
    }
    let mut duals = vec![
        PowerSeries::zero(),
        PowerSeries::from_ints(&[1]),
        PowerSeries::from_ints(&[0, 1]),
        PowerSeries::polynomial(vec![ComplexRational::one(), ComplexRational::from_ratio(1, 2)]),
    ];
    for p in &perturbations {
        if !duals.contains(&p.f) {
            duals.push(p.f.clone());
        }
    }
    let mut reports = Vec::new();
    for space in &config.spaces {
        reports.par_extend(perturbations.par_iter().map(|p| power_oracle(space, p, &config.numeric)));
        reports.par_extend(duals.par_iter().map(|g| cauchy_oracle(space, g, &config.numeric)));
    }
    let (passed, failed) = summarize(&reports);
    print_failures(&reports);
    println!("{passed} passed, {failed} failed");
    let file = ReportFile { schema: SCHEMA, metadata: Metadata::new(config, &perturbations, seed), passed, failed, reports: &reports };
    write_file(&out.join("oracle.json"), &to_json(&file))?;
    Ok(if failed == 0 { EXIT_PASS } else { EXIT_VIOLATION })
}

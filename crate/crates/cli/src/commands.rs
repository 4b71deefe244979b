use std::fs::File;
use std::io::BufWriter;

use frameflow::base::homoclinic_points;
use frameflow::base::{DiskPoint, FuchsianDomain, ToralAutomorphism, TorusPoint, UnitTangent};
use frameflow::extension::{
    fiber_equidistribution, kahler_like_cocycle, write_orbit_csv, Advance, BaseDynamics, Cocycle, CocycleKind,
    EquidistributionEntry, ExtendedState, ExtensionConfig, Orbit,
};
use frameflow::group::MatrixRecord;
use frameflow::harmonics::{
    degree_spectrum, degree_spectrum_with, laplace_eigenvalue, trace_free_project, vertical_laplacian_eigencheck,
    Degree, DegreeSpectrum, FiberFunction, Parity, Polynomial, SpectrumMethod, SymTensor,
};
use frameflow::pestov::{anchored_q_table, curve_csv, threshold_curve, QEntry, QTable, ThresholdReport};
use frameflow::topology::{
    consistency_check_up_to, radon_hurwitz, reduction_candidates, ConsistencyReport, InvariantBundle,
    ReductionCandidate,
};
use frameflow::transitivity::{
    brin_rhos, ergodicity_verdict, estimate_transitivity_group, fixed_tensors, EstimatorConfig, HolonomyConfig,
    InvariantTensor, Representation, TransitionCut, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::artifact::ArtifactWriter;
use crate::config::{BaseChoice, CocycleFamily, CocycleSpec, ExperimentConfig, MethodChoice, QMode, SectionSpec};
use crate::error::CliError;

fn build_cocycle(spec: &CocycleSpec, kind: CocycleKind, cfg: &ExperimentConfig) -> Result<Cocycle, CliError> {
    Ok(match spec.family {
        CocycleFamily::Trivial => Cocycle::trivial(kind, spec.m),
        CocycleFamily::Random => {
            let seed = cfg.require_seed("a random cocycle")?;
            Cocycle::random_trigonometric(kind, spec.m, spec.terms, spec.max_freq, spec.amplitude, seed)?
        }
        CocycleFamily::Kahler => kahler_like_cocycle(spec.m, kind, cfg.require_seed("a Kähler-type cocycle")?)?,
    })
}

#[derive(Serialize)]
struct SimulateReport {
    steps: usize,
    recorded_states: usize,
    observables: Vec<EquidistributionEntry>,
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<String, CliError> {
    let s = &cfg.simulate;
    if s.orbit_stride == 0 {
        return Err(CliError::Config("simulate.orbit_stride must be positive".into()));
    }
    let (dynamics, start, advance) = match s.base {
        BaseChoice::Torus => {
            let [x, y] = s.start[..] else {
                return Err(CliError::Config("simulate.start needs [x, y] on the torus".into()));
            };
            let a = ToralAutomorphism::new(s.matrix)?;
            (BaseDynamics::Toral(a), ExtendedState::on_torus(TorusPoint::new(x, y), s.cocycle.m), Advance::Steps(1))
        }
        BaseChoice::Geodesic => {
            let [re, im, angle] = s.start[..] else {
                return Err(CliError::Config("simulate.start needs [re, im, angle] in the disk".into()));
            };
            let v = UnitTangent::new(DiskPoint::from_re_im(re, im)?, angle);
            let domain = s.fold.then(FuchsianDomain::regular_octagon);
            (BaseDynamics::Geodesic(domain), ExtendedState::on_tangent(v, s.cocycle.m), Advance::Time(s.dt))
        }
    };
    let cocycle = build_cocycle(&s.cocycle, dynamics.kind(), cfg)?;
    let ext = ExtensionConfig { renormalize_every: s.renormalize_every, max_dt: s.max_dt };
    let mut orbit = Orbit::new(start, &cocycle, &dynamics, advance, ext, s.steps);
    let mut kept = Vec::new();
    let mut index = 0usize;
    let entries = fiber_equidistribution(
        orbit.by_ref().inspect(|st| {
            if index % s.orbit_stride == 0 {
                kept.push(st.clone());
            }
            index += 1;
        }),
        &s.observables,
    );
    if let Some(e) = orbit.error() {
        return Err(e.clone().into());
    }
    let entries = entries?;

    let path = out.path("orbit.csv");
    let mut comments = out.comments();
    comments.push(format!("stride {}", s.orbit_stride));
    let recorded = write_orbit_csv(BufWriter::new(File::create(&path)?), &comments, kept)?;
    out.record(path);
    let report = SimulateReport { steps: s.steps, recorded_states: recorded, observables: entries };
    out.json("equidistribution.json", &report)?;
    let worst = report.observables.iter().map(|e| e.average.abs()).fold(0.0, f64::max);
    Ok(format!("simulate: {} steps, largest |average| {worst:.3e}", s.steps))
}

#[derive(Serialize)]
struct InvariantGroup {
    representation: Representation,
    count: usize,
    tensors: Vec<InvariantTensor>,
}

#[derive(Serialize)]
struct TransitivityReport {
    m: usize,
    homoclinic_points: usize,
    rhos: Vec<Vec<f64>>,
    dimension: usize,
    full_dimension: usize,
    words_examined: usize,
    logs_harvested: usize,
    closure_residual: f64,
    algebra_basis: Vec<MatrixRecord>,
    verdict: Verdict,
    invariants: Vec<InvariantGroup>,
}

pub fn transitivity(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<String, CliError> {
    let t = &cfg.transitivity;
    let m = t.cocycle.m;
    let a = ToralAutomorphism::new(t.matrix)?;
    let cocycle = build_cocycle(&t.cocycle, CocycleKind::Discrete, cfg)?;
    let points = homoclinic_points(&a, t.box_radius)?;
    let cut = TransitionCut { backward: t.cut_backward, forward: t.cut_forward };
    let hol = HolonomyConfig { tol: t.holonomy_tol, depth_cap: t.depth_cap };
    let rhos = brin_rhos(&a, &cocycle, &points, cut, &hol)?;
    let est = EstimatorConfig { max_word_len: t.max_word_len, log_radius: t.log_radius, max_words: t.max_words };
    let h = estimate_transitivity_group(&rhos, &est)?;
    let verdict = ergodicity_verdict(&h, m, t.min_generators);
    let invariants = t
        .representations
        .iter()
        .map(|&rep| {
            let tensors = fixed_tensors(&h, rep, m)?;
            Ok(InvariantGroup { representation: rep, count: tensors.len(), tensors })
        })
        .collect::<Result<Vec<_>, frameflow::Error>>()?;
    let report = TransitivityReport {
        m,
        homoclinic_points: points.len(),
        rhos: rhos.iter().map(|r| r.to_row_major()).collect(),
        dimension: h.dimension,
        full_dimension: m * (m - 1) / 2,
        words_examined: h.words_examined,
        logs_harvested: h.logs_harvested,
        closure_residual: h.closure_residual(),
        algebra_basis: h.basis_records(),
        verdict,
        invariants,
    };
    out.json("transitivity.json", &report)?;
    let counts: Vec<String> =
        report.invariants.iter().map(|g| format!("{} {}", g.representation.label(), g.count)).collect();
    Ok(format!(
        "transitivity: dimension {}/{}, verdict {:?}, invariants [{}]",
        report.dimension,
        report.full_dimension,
        verdict,
        counts.join(", ")
    ))
}

#[derive(Serialize)]
struct Eigencheck {
    rayleigh_quotient: f64,
    expected: f64,
}

#[derive(Serialize)]
struct HarmonicsReport<'a> {
    n: usize,
    k_max: usize,
    exactness: usize,
    section: &'a SectionSpec,
    tensor: Option<SymTensor>,
    spectrum: DegreeSpectrum,
    eigencheck: Option<Eigencheck>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn harmonics(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<String, CliError> {
    let h = &cfg.harmonics;
    let n = h.n;
    let mut tensor = None;
    let mut eigencheck = None;
    let poly = match &h.section {
        SectionSpec::PiStar { degree, trace_free } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.require_seed("a random tensor section")?);
            let raw = SymTensor::random(n, *degree, &mut rng);
            let k_tensor = if *trace_free {
                let tf = trace_free_project(&raw);
                eigencheck = Some(Eigencheck {
                    rayleigh_quotient: vertical_laplacian_eigencheck(&tf)?,
                    expected: laplace_eigenvalue(n, *degree),
                });
                tf.tensor().clone()
            } else {
                raw
            };
            let p = k_tensor.to_polynomial().scale(1.0 / factorial(*degree));
            tensor = Some(k_tensor);
            p
        }
        SectionSpec::Polynomial { terms } => {
            let mut p = Polynomial::zero(n);
            for t in terms {
                if let Some(bad) = t.monomial.iter().find(|i| usize::from(**i) >= n) {
                    return Err(CliError::Config(format!("monomial variable {bad} out of range for n = {n}")));
                }
                p.add_term(t.monomial.clone(), t.coeff);
            }
            p
        }
    };
    let exactness = h.exactness.unwrap_or(2 * h.k_max);
    let f = FiberFunction::new(n, exactness, |x: &[f64]| poly.eval(x))?;
    let spectrum = match h.method {
        MethodChoice::Auto => degree_spectrum(&f, h.k_max)?,
        MethodChoice::FullBasis => degree_spectrum_with(&f, h.k_max, SpectrumMethod::FullBasis)?,
        MethodChoice::Zonal => degree_spectrum_with(&f, h.k_max, SpectrumMethod::Zonal)?,
    };
    out.csv("spectrum.csv", &spectrum.to_csv())?;
    let degree = match spectrum.degree {
        Degree::Finite(k) => k.to_string(),
        Degree::ExceedsKMax => format!("> {}", h.k_max),
    };
    let parity = match spectrum.parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Mixed => "mixed",
    };
    let report = HarmonicsReport { n, k_max: h.k_max, exactness, section: &h.section, tensor, spectrum, eigencheck };
    out.json("harmonics.json", &report)?;
    Ok(format!("harmonics: degree {degree}, parity {parity}"))
}

#[derive(Serialize)]
struct ThresholdPayload {
    target_degree: u32,
    q_table: QTable,
    reports: Vec<ThresholdReport>,
}

fn q_table(cfg: &ExperimentConfig) -> Result<QTable, CliError> {
    let t = &cfg.threshold;
    let source = match t.mode {
        QMode::Direct => &t.q,
        QMode::Calibrated => &t.anchors,
    };
    if t.mode == QMode::Calibrated && source.is_empty() {
        return Ok(anchored_q_table());
    }
    source
        .iter()
        .map(|(tag, v)| {
            let bundle =
                InvariantBundle::from_tag(tag).ok_or_else(|| CliError::Config(format!("unknown case {tag:?}")))?;
            let entry = match t.mode {
                QMode::Direct => QEntry::Direct { q: *v },
                QMode::Calibrated => QEntry::Calibrated { anchor: *v },
            };
            Ok((bundle, entry))
        })
        .collect()
}

pub fn threshold(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<String, CliError> {
    let t = &cfg.threshold;
    if t.n_min < 3 || t.n_max < t.n_min {
        return Err(CliError::Config(format!("bad range n_min = {}, n_max = {}", t.n_min, t.n_max)));
    }
    let table = q_table(cfg)?;
    let ns: Vec<u32> = (t.n_min..=t.n_max).collect();
    let reports = threshold_curve(&ns, &table, t.target_degree)?;
    out.csv("threshold.csv", &curve_csv(&reports))?;
    let max = reports.iter().map(|r| r.delta_threshold).fold(0.0, f64::max);
    out.json("threshold.json", &ThresholdPayload { target_degree: t.target_degree, q_table: table, reports })?;
    Ok(format!("threshold: {} dimensions, largest threshold {max:.6}", ns.len()))
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    radon_hurwitz: u64,
    candidates: Vec<ReductionCandidate>,
}

#[derive(Serialize)]
struct TablesReport {
    rows: Vec<TableRow>,
    consistency: ConsistencyReport,
}

pub fn tables(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<String, CliError> {
    let t = &cfg.tables;
    if t.n_min < 3 || t.n_max < t.n_min {
        return Err(CliError::Config(format!("bad range n_min = {}, n_max = {}", t.n_min, t.n_max)));
    }
    let rows = (t.n_min..=t.n_max)
        .map(|n| Ok(TableRow { n, radon_hurwitz: radon_hurwitz(n as u64), candidates: reduction_candidates(n)? }))
        .collect::<Result<Vec<_>, frameflow::Error>>()?;
    let consistency = consistency_check_up_to(t.parity_max);
    let failures = consistency.failures();
    out.json("tables.json", &TablesReport { rows, consistency })?;
    if failures.is_empty() {
        Ok(format!("tables: n = {}..={}, consistency passed", t.n_min, t.n_max))
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}

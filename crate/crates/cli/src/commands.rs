//! Subcommand implementations. Each returns a finished `ReportFile`; the
//! caller emits it and converts the summary into the process exit code.

use bbl_lab::instance::Instance;
use bbl_lab::report::{CheckRecord, Parameters, ReportFile};
use anyhow::{bail, Context, Result};
use bbl_core::rational::{rat, to_f64, Rational};
use bbl_core::{
    geometry, lifting, sampling, supconv, LiftingDomain, MeanSpec, SparseFunction, Verdict,
};
use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::Path;

/// Builds a rayon pool honoring the `BBL_LAB_THREADS` cap.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("BBL_LAB_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("BBL_LAB_THREADS must be a positive integer, got {raw:?}"))?;
        if n == 0 {
            bail!("BBL_LAB_THREADS must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

fn mean_spec(p: f64, lambda: f64) -> Result<MeanSpec> {
    MeanSpec::new(p, lambda).map_err(Into::into)
}

/// `verify`: run the hyperplane-gated sup-convolution check on an instance.
pub fn cmd_verify(
    instance_path: &Path,
    p: Option<f64>,
    lambda: Option<f64>,
    epsilon: f64,
    n: usize,
    direction_bound: i64,
) -> Result<ReportFile> {
    let instance = Instance::load(instance_path)?;
    let file_mean = instance.file.mean.clone();
    let p = p
        .or(file_mean.as_ref().map(|m| m.p))
        .unwrap_or(0.25);
    let lambda = lambda
        .or(file_mean.as_ref().map(|m| m.lambda))
        .unwrap_or(0.5);
    let spec = mean_spec(p, lambda)?;
    let report = supconv::verify_main_theorem(
        &instance.f,
        &instance.g,
        &spec,
        epsilon,
        n,
        direction_bound,
    )?;

    // When the hyperplane hypothesis fails, the lower bound is not asserted:
    // record it as a diagnostic so the verdict stays hypothesis-not-met.
    let bound_name = if report.verdict == Verdict::HypothesisNotMet {
        "diagnostic/main-lower-bound"
    } else {
        "main-lower-bound"
    };
    let records = vec![
        CheckRecord::gate(
            "hyperplane-non-degeneracy",
            report.nondegeneracy.threshold,
            report.nondegeneracy.worst_fraction,
        ),
        CheckRecord::bound(bound_name, to_f64(&report.sum_h), report.bound),
    ];
    Ok(ReportFile::new(
        "verify",
        Some(instance.digest),
        Parameters {
            p: Some(p),
            lambda: Some(lambda),
            epsilon: Some(epsilon),
            n: Some(n),
            direction_bound: Some(direction_bound),
            dimension: Some(instance.f.dim()),
            ..Parameters::default()
        },
        records,
        0,
    ))
}

/// `extremal`: generate the atom-plus-box family and check its exact and
/// floating identities.
pub fn cmd_extremal(
    gamma: &Rational,
    box_side: u32,
    p: f64,
    d: usize,
    epsilon: f64,
    n: usize,
) -> Result<ReportFile> {
    if !(gamma > &Rational::zero() && gamma < &Rational::one()) {
        bail!("gamma must lie strictly between 0 and 1");
    }
    if n == 0 {
        bail!("n must be at least 1");
    }
    let triple = geometry::extremal_instance(gamma, box_side, p, d)?;
    let spec = mean_spec(p, 0.5)?;

    let mass_h = to_f64(&triple.h.mass());
    let closed_form = 1.0 + 2f64.powf(1.0 / p) * to_f64(gamma);

    // worst pointwise slack of h against the required mean bound
    let neg = spec.negated();
    let mut min_slack = f64::INFINITY;
    for (x, fx) in triple.f.iter() {
        for (y, gy) in triple.g.iter() {
            let need = bbl_core::means::p_mean_rational(&neg, fx, gy);
            let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let have = triple
                .h
                .value(&z)
                .cloned()
                .unwrap_or_else(Rational::zero);
            min_slack = min_slack.min(to_f64(&(have - need)));
        }
    }

    // exact axis coverage: the heaviest axis hyperplane carries
    // (1-γ) + γ/N of the mass
    let axis: Vec<i64> = std::iter::once(1).chain(std::iter::repeat(0)).take(d).collect();
    let coverage = geometry::top_n_hyperplane_mass(&triple.f, &axis, 1)?;
    let expected = (Rational::one() - gamma) + gamma / rat(box_side as i64, 1);

    let threshold_lhs = 2f64.powf(1.0 / p) * to_f64(gamma) + 1.0;
    let threshold_rhs = 2f64.powi(d as i32) - epsilon;

    let records = vec![
        CheckRecord::bound("mass-h-identity-ge", mass_h, closed_form),
        CheckRecord::bound("mass-h-identity-le", closed_form, mass_h),
        CheckRecord::bound("admissibility-min-slack", min_slack, 0.0),
        CheckRecord::bound("hyperplane-coverage-ge", to_f64(&coverage), to_f64(&expected)),
        CheckRecord::bound("hyperplane-coverage-le", to_f64(&expected), to_f64(&coverage)),
        CheckRecord::bound("diagnostic/tightness-condition", threshold_lhs, threshold_rhs),
    ];
    Ok(ReportFile::new(
        "extremal",
        None,
        Parameters {
            p: Some(p),
            lambda: Some(0.5),
            epsilon: Some(epsilon),
            n: Some(n),
            gamma: Some(bbl_core::rational::format_ratio(gamma)),
            box_side: Some(box_side),
            dimension: Some(d),
            ..Parameters::default()
        },
        records,
        0,
    ))
}

/// `sumset`: diagnostic sizes and deficit for the supports of an instance.
pub fn cmd_sumset(instance_path: &Path) -> Result<ReportFile> {
    let instance = Instance::load(instance_path)?;
    let (a, b) = instance.supports();
    let s = geometry::sumset(&a, &b)?;
    let d = a.dim() as f64;
    let root = |n: usize| (n as f64).powf(1.0 / d);
    let records = vec![
        CheckRecord::bound("diagnostic/sumset-size", s.len() as f64, 0.0),
        CheckRecord::bound(
            "diagnostic/bm-deficit-root",
            root(s.len()),
            root(a.len()) + root(b.len()),
        ),
    ];
    Ok(ReportFile::new(
        "sumset",
        Some(instance.digest),
        Parameters {
            dimension: Some(a.dim()),
            ..Parameters::default()
        },
        records,
        0,
    ))
}

/// Campaign modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CampaignMode {
    /// Random sparse pairs against the unconditional functional bound.
    Lemma21,
    /// Random admissible probability sequences against the convexity bound.
    Lemma22,
    /// Random equal-mass pairs through a lifting domain.
    Lift,
    /// Random vertex-set pairs against the cube midpoint bound.
    CubeSample,
    /// Every nonempty vertex-set pair (d ≤ 3) against the cube midpoint bound.
    CubeExhaustive,
    /// Random spread instances through the hyperplane-gated verifier (d = 1).
    MainTheorem,
}

impl CampaignMode {
    fn name(&self) -> &'static str {
        match self {
            CampaignMode::Lemma21 => "lemma21",
            CampaignMode::Lemma22 => "lemma22",
            CampaignMode::Lift => "lift",
            CampaignMode::CubeSample => "cube-sample",
            CampaignMode::CubeExhaustive => "cube-exhaustive",
            CampaignMode::MainTheorem => "main-theorem",
        }
    }
}

struct TrialOutcome {
    records: Vec<CheckRecord>,
    excluded: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_campaign(
    seed: u64,
    trials: usize,
    d: usize,
    support_max: usize,
    p: Option<f64>,
    lambda: f64,
    mode: CampaignMode,
    domain_name: &str,
    epsilon: f64,
    n: usize,
    direction_bound: i64,
) -> Result<ReportFile> {
    if trials == 0 && mode != CampaignMode::CubeExhaustive {
        bail!("trials must be at least 1");
    }
    if d == 0 {
        bail!("dimension must be at least 1");
    }
    if support_max == 0 {
        bail!("support-max must be at least 1");
    }
    // Exponent per trial: the verifier mode pins a single p inside (0, 1/d);
    // the others default to cycling a small set.
    let default_p_cycle = [0.25, 0.5, 1.0];
    let trial_p = move |idx: usize| match mode {
        CampaignMode::MainTheorem => p.unwrap_or(0.25),
        _ => p.unwrap_or(default_p_cycle[idx % default_p_cycle.len()]),
    };
    mean_spec(trial_p(0), lambda)?;
    match mode {
        CampaignMode::CubeSample | CampaignMode::CubeExhaustive => {
            let max = if mode == CampaignMode::CubeExhaustive { 3 } else { 4 };
            if d > max {
                bail!("mode {} supports dimension at most {max}", mode.name());
            }
        }
        CampaignMode::MainTheorem => {
            if d != 1 {
                bail!("mode main-theorem runs in dimension 1");
            }
            let pe = trial_p(0);
            if !(pe > 0.0 && pe < 1.0) {
                bail!("mode main-theorem needs 0 < p < 1/d, got {pe}");
            }
        }
        CampaignMode::Lift => {
            let lambda_q = bbl_core::rational::from_f64(lambda);
            LiftingDomain::by_name(domain_name, d, trial_p(0), &lambda_q)?;
        }
        _ => {}
    }

    let pool = thread_pool()?;
    let trial_rng = |idx: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64 + 1);
        rng
    };

    let (mut records, excluded) = match mode {
        CampaignMode::CubeExhaustive => (cube_exhaustive_records(d), 0),
        _ => {
            let outcomes: Vec<(usize, TrialOutcome)> = pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|idx| {
                        let mut rng = trial_rng(idx);
                        let outcome = run_trial(
                            mode,
                            idx,
                            &mut rng,
                            d,
                            support_max,
                            trial_p(idx),
                            lambda,
                            domain_name,
                            epsilon,
                            n,
                            direction_bound,
                        );
                        (idx, outcome)
                    })
                    .collect()
            });
            let mut outcomes = outcomes;
            outcomes.sort_by_key(|(idx, _)| *idx);
            let mut records = Vec::new();
            let mut excluded = 0;
            for (_, outcome) in outcomes {
                if outcome.excluded {
                    excluded += 1;
                }
                records.extend(outcome.records);
            }
            (records, excluded)
        }
    };
    records.shrink_to_fit();

    Ok(ReportFile::new(
        "campaign",
        None,
        Parameters {
            p,
            lambda: Some(lambda),
            epsilon: Some(epsilon),
            n: Some(n),
            direction_bound: Some(direction_bound),
            dimension: Some(d),
            seed: Some(seed),
            trials: Some(trials),
            support_max: Some(support_max),
            mode: Some(mode.name().into()),
            domain: if mode == CampaignMode::Lift {
                Some(domain_name.into())
            } else {
                None
            },
            ..Parameters::default()
        },
        records,
        excluded,
    ))
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    mode: CampaignMode,
    idx: usize,
    rng: &mut ChaCha8Rng,
    d: usize,
    support_max: usize,
    p: f64,
    lambda: f64,
    domain_name: &str,
    epsilon: f64,
    n: usize,
    direction_bound: i64,
) -> TrialOutcome {
    let name = format!("{}/trial-{idx:04}", mode.name());
    let mut excluded = false;
    let records = match mode {
        CampaignMode::Lemma21 => {
            let (f, g) = sampling::sparse_pair(rng, d, support_max, 10, 100, 100);
            let spec = MeanSpec::new(p, lambda).expect("validated by caller");
            let (lhs, rhs) = supconv::check_functional_bm(&f, &g, &spec)
                .expect("nonempty same-dimension inputs");
            vec![CheckRecord::bound(name, lhs, rhs)]
        }
        CampaignMode::Lemma22 => {
            let (betas, c, bn, alpha, bp) = sampling::beta_instance(rng, 12);
            let (lhs, rhs) = supconv::beta_convex_check(&betas, c, bn, &alpha, bp)
                .expect("generator emits admissible tuples");
            vec![CheckRecord::bound(name, lhs, rhs)]
        }
        CampaignMode::Lift => {
            let lambda_q = bbl_core::rational::from_f64(lambda);
            let domain = LiftingDomain::by_name(domain_name, d, p, &lambda_q)
                .expect("validated by caller");
            let (f, g) = if domain_name == "cube-midpoint" {
                cube_function_pair(rng, d)
            } else {
                sampling::equal_mass_pair(rng, d, support_max, 10, 100, 100)
            };
            let (lhs, rhs) = lifting::lift_check(&domain, &f, &g)
                .expect("equal masses by construction");
            vec![CheckRecord::bound(name, lhs, rhs)]
        }
        CampaignMode::CubeSample => {
            use rand::Rng;
            let vertices = 1u32 << d;
            let pick = |rng: &mut ChaCha8Rng| -> Vec<u32> {
                loop {
                    let masks: Vec<u32> =
                        (0..vertices).filter(|_| rng.random_bool(0.5)).collect();
                    if !masks.is_empty() {
                        return masks;
                    }
                }
            };
            let a = pick(rng);
            let b = pick(rng);
            let mut image = std::collections::BTreeSet::new();
            for &x in &a {
                for &y in &b {
                    image.extend(lifting::cube_midpoints_mask(x, y));
                }
            }
            let lhs = image.len() as f64;
            let rhs = ((a.len() * b.len()) as f64).sqrt();
            vec![CheckRecord::bound(name, lhs, rhs)]
        }
        CampaignMode::MainTheorem => {
            let (f, g) = sampling::spread_pair(rng, 50, 120);
            let spec = MeanSpec::new(p, lambda).expect("validated by caller");
            let report = supconv::verify_main_theorem(&f, &g, &spec, epsilon, n, direction_bound)
                .expect("equal masses and p in range by construction");
            if report.verdict == Verdict::HypothesisNotMet {
                excluded = true;
                vec![CheckRecord::gate(
                    format!("diagnostic/{name}/gate"),
                    report.nondegeneracy.threshold,
                    report.nondegeneracy.worst_fraction,
                )]
            } else {
                vec![CheckRecord::bound(name, to_f64(&report.sum_h), report.bound)]
            }
        }
        CampaignMode::CubeExhaustive => unreachable!("handled by the caller"),
    };
    TrialOutcome { records, excluded }
}

/// Random positive functions supported on cube vertices, mass-matched.
fn cube_function_pair(rng: &mut ChaCha8Rng, d: usize) -> (SparseFunction, SparseFunction) {
    use rand::Rng;
    let vertices = 1u32 << d;
    let pick = |rng: &mut ChaCha8Rng| -> SparseFunction {
        loop {
            let mut f = SparseFunction::new(d).expect("d ≥ 1");
            for m in 0..vertices {
                if rng.random_bool(0.6) {
                    f.insert(
                        lifting::mask_to_point(m, d),
                        rat(rng.random_range(1..=40), rng.random_range(1..=40)),
                    )
                    .expect("fresh vertex");
                }
            }
            if !f.is_empty() {
                return f;
            }
        }
    };
    let f = pick(rng);
    let g = pick(rng);
    let ratio = f.mass() / g.mass();
    (f, g.scale(&ratio).expect("positive ratio"))
}

/// Exhaustive cube midpoint scan over every nonempty pair of vertex sets.
fn cube_exhaustive_records(d: usize) -> Vec<CheckRecord> {
    let vertices = 1u32 << d; // ≤ 8
    let subsets = 1u32 << vertices; // ≤ 256
    // per vertex pair: midpoint set as a vertex bitmask
    let mut table = vec![vec![0u32; vertices as usize]; vertices as usize];
    for x in 0..vertices {
        for y in 0..vertices {
            let mut bits = 0u32;
            for m in lifting::cube_midpoints_mask(x, y) {
                bits |= 1 << m;
            }
            table[x as usize][y as usize] = bits;
        }
    }
    let mut worst: Option<(f64, f64)> = None;
    let mut pairs = 0u64;
    for a in 1..subsets {
        for b in 1..subsets {
            let mut image = 0u32;
            for x in 0..vertices {
                if a >> x & 1 == 0 {
                    continue;
                }
                for y in 0..vertices {
                    if b >> y & 1 == 1 {
                        image |= table[x as usize][y as usize];
                    }
                }
            }
            pairs += 1;
            let lhs = image.count_ones() as f64;
            let rhs = ((a.count_ones() * b.count_ones()) as f64).sqrt();
            let replace = match worst {
                None => true,
                Some((wl, wr)) => lhs - rhs < wl - wr,
            };
            if replace {
                worst = Some((lhs, rhs));
            }
        }
    }
    let (lhs, rhs) = worst.expect("at least one pair");
    vec![
        CheckRecord::bound("cube-exhaustive/worst", lhs, rhs),
        CheckRecord::bound("diagnostic/cube-exhaustive/pairs", pairs as f64, 0.0),
    ]
}

/// `report`: validate a stored report and restate its summary.
pub fn cmd_report(path: &Path) -> Result<ReportFile> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read report file {}", path.display()))?;
    let report: ReportFile = serde_json::from_slice(&bytes).map_err(|e| {
        anyhow::anyhow!(
            "malformed report JSON at {}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })?;
    report.validate()?;
    Ok(report)
}

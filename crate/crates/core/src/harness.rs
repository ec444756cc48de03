//! Instance files, trial records and the `check`, `fuzz` and `scan-bourin`
//! commands. Commands write line-delimited JSON to a caller-supplied writer
//! and return the process exit code: 0 all pass, 1 some check failed,
//! 2 usage, validation or I/O error.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkers::{
    check_bourin, check_diag_step, check_eig_product, check_fg_corollary, check_kyfan_convexity, check_lemma1,
    check_theorem1, check_weyl_majorant, majorization_stage, ChainReport, StageReport,
};
use crate::constructions::{assemble_theorem1, CommutingPairInstance};
use crate::error::{Error, Result};
use crate::generators::{
    random_commuting_instance, random_general, random_lemma1_inputs, random_psd, stream, GeneratorConfig,
    SpectrumProfile,
};
use crate::linalg::{ComplexMatrix, SpectralFunction};
use crate::majorization::MajorizationReport;
use crate::{DEFAULT_TOL, MAX_DIM};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Theorem1,
    Lemma1,
    Bourin,
    Weyl,
    Convexity,
    EigProduct,
    DiagStep,
    Fg,
}

impl Relation {
    pub const ALL: [Relation; 8] = [
        Relation::Theorem1,
        Relation::Lemma1,
        Relation::Bourin,
        Relation::Weyl,
        Relation::Convexity,
        Relation::EigProduct,
        Relation::DiagStep,
        Relation::Fg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Theorem1 => "theorem1",
            Relation::Lemma1 => "lemma1",
            Relation::Bourin => "bourin",
            Relation::Weyl => "weyl",
            Relation::Convexity => "convexity",
            Relation::EigProduct => "eigproduct",
            Relation::DiagStep => "diagstep",
            Relation::Fg => "fg",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown relation '{s}' (expected one of {})", relation_list())))
    }
}

fn relation_list() -> String {
    Relation::ALL.map(Relation::name).join(", ")
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A matrix as separate real and imaginary row-major grids. A missing `im`
/// means the matrix is real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGrids {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixGrids {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_re_im();
        let im = if im.iter().flatten().all(|&v| v == 0.0) { Vec::new() } else { im };
        MatrixGrids { re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_re_im(&self.re, &self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairGrids {
    #[serde(rename = "A")]
    pub a: MatrixGrids,
    #[serde(rename = "B")]
    pub b: MatrixGrids,
}

/// On-disk form of a commuting pair instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub d: usize,
    #[serde(rename = "K", alias = "k")]
    pub k: usize,
    pub pairs: Vec<PairGrids>,
}

impl InstanceFile {
    pub fn from_instance(inst: &CommutingPairInstance) -> Self {
        InstanceFile {
            d: inst.d(),
            k: inst.k(),
            pairs: inst
                .pairs()
                .iter()
                .map(|(a, b)| PairGrids { a: MatrixGrids::from_matrix(a), b: MatrixGrids::from_matrix(b) })
                .collect(),
        }
    }

    /// Checks the declared sizes and builds a validated instance.
    pub fn to_instance(&self) -> Result<CommutingPairInstance> {
        if self.pairs.len() != self.k {
            return Err(Error::Dimension(format!("K is {} but {} pairs are listed", self.k, self.pairs.len())));
        }
        let mut pairs = Vec::with_capacity(self.k);
        for (i, p) in self.pairs.iter().enumerate() {
            let a = p.a.to_matrix().map_err(|e| Error::Dimension(format!("pair {} A: {e}", i + 1)))?;
            let b = p.b.to_matrix().map_err(|e| Error::Dimension(format!("pair {} B: {e}", i + 1)))?;
            if a.shape() != (self.d, self.d) || b.shape() != (self.d, self.d) {
                return Err(Error::Dimension(format!("pair {} is not {}x{}", i + 1, self.d, self.d)));
            }
            pairs.push((a, b));
        }
        CommutingPairInstance::new(pairs)
    }
}

pub fn parse_instance(text: &str) -> Result<CommutingPairInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("malformed instance file: {e}")))?;
    file.to_instance()
}

pub fn load_instance(path: &Path) -> Result<CommutingPairInstance> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

/// `A..B` (inclusive) or a single number.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Usage(format!("bad range '{s}', expected A..B"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?)
        }
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// `start:stop:step` or a comma-separated list; every value must be positive.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad grid value '{t}' in '{s}'")));
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(Error::Usage(format!("grid '{s}' must look like start:stop:step")));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0 && stop >= start) {
            return Err(Error::Usage(format!("grid '{s}' needs step > 0 and stop >= start")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        if n > 10_000 {
            return Err(Error::Usage(format!("grid '{s}' has too many points")));
        }
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Usage(format!("grid values must be positive, found {v}")));
    }
    Ok(values)
}

/// `0.1, 0.2, ..., 2.0`.
pub fn default_bourin_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.1 * i as f64).collect()
}

/// Relation-specific parameters for `check`.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub relation: Relation,
    pub tol: f64,
    /// Bourin exponents.
    pub p: f64,
    pub q: f64,
    /// Weyl exponent.
    pub r: f64,
    /// Convex weight.
    pub weight: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { relation: Relation::Theorem1, tol: DEFAULT_TOL, p: 1.0, q: 1.0, r: 1.0, weight: 0.5 }
    }
}

fn single(relation: Relation, report: MajorizationReport) -> ChainReport {
    ChainReport::new(relation.name(), vec![majorization_stage("main", report)], BTreeMap::new())
}

fn per_pair(relation: Relation, reports: Vec<MajorizationReport>) -> ChainReport {
    let stages =
        reports.into_iter().enumerate().map(|(i, r)| majorization_stage(&format!("pair-{}", i + 1), r)).collect();
    ChainReport::new(relation.name(), stages, BTreeMap::new())
}

/// `exp(0.3·x)` with the rate shrunk so the exponent stays at most `0.3` on `mats`.
fn bounded_exp(mats: &[ComplexMatrix]) -> SpectralFunction {
    let top = mats.iter().map(|m| m.max_abs() * m.rows() as f64).fold(1.0, f64::max);
    SpectralFunction::Exp(0.3 / top)
}

/// Runs one relation on a pair instance.
///
/// `theorem1` uses the instance as is; `lemma1` runs on its block assembly;
/// `bourin` runs on each pair; `weyl` on `(ΣA)(ΣB)`; `convexity` and
/// `eigproduct` on `(ΣA, ΣB)`; `diagstep` on `ΣA`; `fg` on the `A_k` with
/// `f = x^{1/2}` and a bounded exponential for `g`.
pub fn check_instance(inst: &CommutingPairInstance, opts: &CheckOptions) -> Result<ChainReport> {
    let tol = opts.tol;
    Ok(match opts.relation {
        Relation::Theorem1 => check_theorem1(inst, tol)?,
        Relation::Lemma1 => {
            if inst.k() * inst.d() > MAX_DIM {
                return Err(Error::Unsupported(format!("lemma1 on an instance needs K*d <= {MAX_DIM}")));
            }
            check_lemma1(&assemble_theorem1(inst)?.lemma_inputs()?, tol)?
        }
        Relation::Bourin => per_pair(
            Relation::Bourin,
            inst.pairs().iter().map(|(a, b)| check_bourin(a, b, opts.p, opts.q, tol)).collect::<Result<_>>()?,
        ),
        Relation::Weyl => {
            single(Relation::Weyl, check_weyl_majorant(&inst.sum_a().matmul(&inst.sum_b())?, opts.r, tol)?)
        }
        Relation::Convexity => {
            single(Relation::Convexity, check_kyfan_convexity(&inst.sum_a(), &inst.sum_b(), opts.weight, tol)?)
        }
        Relation::EigProduct => check_eig_product(&inst.sum_a(), &inst.sum_b(), tol)?,
        Relation::DiagStep => single(Relation::DiagStep, check_diag_step(&inst.sum_a(), tol)?),
        Relation::Fg => {
            let mats: Vec<ComplexMatrix> = inst.pairs().iter().map(|(a, _)| a.clone()).collect();
            single(Relation::Fg, check_fg_corollary(&mats, SpectralFunction::Power(0.5), bounded_exp(&mats), tol)?)
        }
    })
}

#[derive(Serialize)]
struct StageLine<'a> {
    relation: &'a str,
    stage: &'a str,
    #[serde(flatten)]
    report: &'a StageReport,
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let line = serde_json::to_string(value).map_err(|e| Error::Numerical(format!("cannot serialize record: {e}")))?;
    writeln!(out, "{line}").map_err(|e| Error::Usage(format!("write failed: {e}")))
}

fn exit_code(outcome: Result<bool>, diag: &mut dyn Write) -> i32 {
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// Checks one instance file; one JSON line per stage.
pub fn cmd_check(input: &Path, opts: &CheckOptions, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let mut run = || -> Result<bool> {
        let inst = load_instance(input)?;
        let report = check_instance(&inst, opts)?;
        for s in &report.stages {
            write_json(out, &StageLine { relation: &report.relation, stage: &s.name, report: &s.report })?;
        }
        Ok(report.passed())
    };
    exit_code(run(), diag)
}

/// Everything needed to regenerate one trial's instance.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSpec {
    pub relation: Relation,
    pub seed: u64,
    pub trial: u64,
    pub d: usize,
    pub k: usize,
    /// Column count of lemma inputs (also used for the diagonal step).
    pub m: usize,
    pub profile: SpectrumProfile,
}

impl TrialSpec {
    /// Draws `d`, `K`, `m` and the profile for a trial from the campaign ranges.
    pub fn draw(relation: Relation, seed: u64, trial: u64, config: &GeneratorConfig) -> Self {
        let mut meta = stream(seed, trial, &format!("meta:{relation}"));
        let d = meta.gen_range(config.dims.clone());
        let k = meta.gen_range(config.pairs.clone());
        let m = meta.gen_range(config.columns.clone());
        let profile = *config.profiles.choose(&mut meta).expect("validated config has profiles");
        TrialSpec { relation, seed, trial, d, k, m, profile }
    }
}

/// One line of a fuzz report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub relation: Relation,
    pub seed: u64,
    pub trial: u64,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub profile: SpectrumProfile,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    pub min_margin: Option<f64>,
    pub worst_k: Option<usize>,
    pub sum_gap: Option<f64>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_ms: Option<f64>,
}

impl TrialRecord {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

const FG_FAMILY: [SpectralFunction; 4] = [
    SpectralFunction::Power(0.5),
    SpectralFunction::Power(2.0),
    SpectralFunction::Exp(0.3),
    SpectralFunction::Affine { slope: 1.0, intercept: 0.1 },
];

fn fg_scaled(f: SpectralFunction, mats: &[ComplexMatrix]) -> SpectralFunction {
    match f {
        SpectralFunction::Exp(_) => bounded_exp(mats),
        other => other,
    }
}

/// Regenerates the instance of `spec` and runs its checker.
///
/// The instance depends only on `(seed, trial, relation)` and the shape fields
/// of `spec`, so a record alone is enough to replay it.
pub fn run_trial(spec: &TrialSpec, tol: f64) -> Result<(ChainReport, BTreeMap<String, f64>)> {
    let mut rng = stream(spec.seed, spec.trial, spec.relation.name());
    let (d, profile) = (spec.d, spec.profile);
    let mut params = BTreeMap::new();
    let report = match spec.relation {
        Relation::Theorem1 => check_theorem1(&random_commuting_instance(spec.k, d, &mut rng, profile)?, tol)?,
        Relation::Lemma1 => check_lemma1(&random_lemma1_inputs(d, spec.m, &mut rng, profile)?, tol)?,
        Relation::Bourin => {
            let p = 0.1 * rng.gen_range(1..=20) as f64;
            let q = 0.1 * rng.gen_range(1..=20) as f64;
            params.insert("p".into(), p);
            params.insert("q".into(), q);
            let a = random_psd(d, &mut rng, profile);
            let b = random_psd(d, &mut rng, profile);
            single(Relation::Bourin, check_bourin(&a, &b, p, q, tol)?)
        }
        Relation::Weyl => {
            let r = *[0.5, 1.0, 2.0].choose(&mut rng).expect("nonempty");
            params.insert("r".into(), r);
            single(Relation::Weyl, check_weyl_majorant(&random_general(d, &mut rng, profile), r, tol)?)
        }
        Relation::Convexity => {
            let p = *[0.0, 0.3, 0.5, 1.0].choose(&mut rng).expect("nonempty");
            params.insert("p".into(), p);
            let a = random_psd(d, &mut rng, profile);
            let b = random_psd(d, &mut rng, profile);
            single(Relation::Convexity, check_kyfan_convexity(&a, &b, p, tol)?)
        }
        Relation::EigProduct => {
            let a = random_psd(d, &mut rng, profile);
            let b = random_psd(d, &mut rng, profile);
            check_eig_product(&a, &b, tol)?
        }
        Relation::DiagStep => {
            // T = X*X with X = S (LM)^{1/4}
            let inputs = random_lemma1_inputs(d, spec.m, &mut rng, profile)?;
            let quarter: Vec<f64> = inputs.left().iter().zip(inputs.right()).map(|(l, m)| (l * m).powf(0.25)).collect();
            let x = inputs.frame().scale_columns(&quarter)?;
            single(Relation::DiagStep, check_diag_step(&x.adjoint().matmul(&x)?.hermitian_part(), tol)?)
        }
        Relation::Fg => {
            let fi = rng.gen_range(0..FG_FAMILY.len());
            let gi = rng.gen_range(0..FG_FAMILY.len());
            params.insert("f".into(), fi as f64);
            params.insert("g".into(), gi as f64);
            let mats: Vec<ComplexMatrix> = (0..spec.k).map(|_| random_psd(d, &mut rng, profile)).collect();
            let (f, g) = (fg_scaled(FG_FAMILY[fi], &mats), fg_scaled(FG_FAMILY[gi], &mats));
            single(Relation::Fg, check_fg_corollary(&mats, f, g, tol)?)
        }
    };
    Ok((report, params))
}

fn uses_pairs(r: Relation) -> bool {
    matches!(r, Relation::Theorem1 | Relation::Fg)
}

fn uses_columns(r: Relation) -> bool {
    matches!(r, Relation::Lemma1 | Relation::DiagStep)
}

/// Runs a trial and packs the outcome into a record; checker errors become
/// failing records rather than aborting the campaign.
pub fn trial_record(spec: &TrialSpec, tol: f64, timing: bool) -> TrialRecord {
    let start = Instant::now();
    let outcome = run_trial(spec, tol);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut record = TrialRecord {
        relation: spec.relation,
        seed: spec.seed,
        trial: spec.trial,
        d: spec.d,
        k: if uses_pairs(spec.relation) { spec.k } else { 1 },
        m: uses_columns(spec.relation).then_some(spec.m),
        profile: spec.profile,
        params: BTreeMap::new(),
        min_margin: None,
        worst_k: None,
        sum_gap: None,
        verdict: "fail",
        error: None,
        wall_time_ms: timing.then_some(elapsed),
    };
    match outcome {
        Ok((report, params)) => {
            record.params = params;
            if let Some(t) = report.tightest() {
                record.min_margin = Some(t.min_margin);
                record.worst_k = Some(t.worst_k());
                record.sum_gap = t.sum_gap;
            }
            if report.passed() {
                record.verdict = "pass";
            }
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub relations: Vec<Relation>,
    pub config: GeneratorConfig,
    pub trials: u64,
    pub tol: f64,
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub summary: Relation,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub min_margin: Option<f64>,
    pub tightest_trial: Option<u64>,
}

/// Runs every trial of one relation; records come back in trial order.
pub fn fuzz_relation(relation: Relation, opts: &FuzzOptions) -> (Vec<TrialRecord>, FuzzSummary) {
    let records: Vec<TrialRecord> = (0..opts.trials)
        .into_par_iter()
        .map(|t| trial_record(&TrialSpec::draw(relation, opts.config.seed, t, &opts.config), opts.tol, opts.timing))
        .collect();
    let passed = records.iter().filter(|r| r.passed()).count() as u64;
    let tightest = records.iter().filter_map(|r| r.min_margin.map(|m| (m, r.trial))).min_by(|a, b| a.0.total_cmp(&b.0));
    let summary = FuzzSummary {
        summary: relation,
        trials: opts.trials,
        passed,
        failed: opts.trials - passed,
        min_margin: tightest.map(|t| t.0),
        tightest_trial: tightest.map(|t| t.1),
    };
    (records, summary)
}

/// Seeded campaign over the selected relations: all trial records first, in
/// relation then trial order, followed by one summary line per relation.
pub fn cmd_fuzz(opts: &FuzzOptions, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let mut run = || -> Result<bool> {
        opts.config.validate()?;
        if !(opts.tol.is_finite() && opts.tol >= 0.0) {
            return Err(Error::Usage(format!("tolerance must be finite and nonnegative, got {}", opts.tol)));
        }
        let mut summaries = Vec::new();
        for &relation in &opts.relations {
            let (records, summary) = fuzz_relation(relation, opts);
            for r in &records {
                write_json(out, r)?;
            }
            summaries.push(summary);
        }
        for s in &summaries {
            write_json(out, s)?;
        }
        out.flush().map_err(|e| Error::Usage(format!("write failed: {e}")))?;
        Ok(summaries.iter().all(|s| s.failed == 0))
    };
    exit_code(run(), diag)
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub profile: SpectrumProfile,
    /// Use `B = A` in every trial.
    pub equal_pair: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            p_grid: default_bourin_grid(),
            q_grid: default_bourin_grid(),
            dim: 3,
            trials: 50,
            seed: 42,
            tol: DEFAULT_TOL,
            profile: SpectrumProfile::Uniform,
            equal_pair: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub p: f64,
    pub q: f64,
    pub trials: u64,
    pub passed: u64,
    pub min_margin: Option<f64>,
    pub seed: u64,
    /// Trial index reaching `min_margin`; replay with [`scan_trial`].
    pub tightest_trial: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub summary: &'static str,
    pub cells: usize,
    pub failed_cells: usize,
    pub tightest: Option<ScanCell>,
}

/// One Bourin trial of a scan: the pair is drawn from `(seed, trial)` alone,
/// so every cell sees the same pairs.
pub fn scan_trial(opts: &ScanOptions, p: f64, q: f64, trial: u64) -> Result<MajorizationReport> {
    let mut rng = stream(opts.seed, trial, "scan-bourin");
    let a = random_psd(opts.dim, &mut rng, opts.profile);
    let b = if opts.equal_pair { a.clone() } else { random_psd(opts.dim, &mut rng, opts.profile) };
    check_bourin(&a, &b, p, q, opts.tol)
}

pub fn scan_cell(opts: &ScanOptions, p: f64, q: f64) -> Result<ScanCell> {
    let reports = (0..opts.trials).map(|t| scan_trial(opts, p, q, t)).collect::<Result<Vec<_>>>()?;
    let tightest = reports.iter().enumerate().min_by(|a, b| a.1.min_margin.total_cmp(&b.1.min_margin));
    Ok(ScanCell {
        p,
        q,
        trials: opts.trials,
        passed: reports.iter().filter(|r| r.passed()).count() as u64,
        min_margin: tightest.map(|t| t.1.min_margin),
        seed: opts.seed,
        tightest_trial: tightest.map(|t| t.0 as u64),
    })
}

/// Scans the `(p, q)` grid; one line per cell, then a summary naming the tightest cell.
pub fn cmd_scan_bourin(opts: &ScanOptions, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let mut run = || -> Result<bool> {
        if let Some(v) = opts.p_grid.iter().chain(&opts.q_grid).find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Usage(format!("grid values must be positive, found {v}")));
        }
        if opts.dim == 0 || opts.dim > MAX_DIM {
            return Err(Error::Usage(format!("dimension must lie within 1..{MAX_DIM}")));
        }
        let grid: Vec<(f64, f64)> =
            opts.p_grid.iter().flat_map(|&p| opts.q_grid.iter().map(move |&q| (p, q))).collect();
        let cells = grid.par_iter().map(|&(p, q)| scan_cell(opts, p, q)).collect::<Result<Vec<_>>>()?;
        for c in &cells {
            write_json(out, c)?;
        }
        let failed_cells = cells.iter().filter(|c| c.passed < c.trials).count();
        let tightest = cells
            .iter()
            .filter(|c| c.min_margin.is_some())
            .min_by(|a, b| a.min_margin.unwrap().total_cmp(&b.min_margin.unwrap()))
            .cloned();
        write_json(out, &ScanSummary { summary: "scan-bourin", cells: cells.len(), failed_cells, tightest })?;
        out.flush().map_err(|e| Error::Usage(format!("write failed: {e}")))?;
        Ok(failed_cells == 0)
    };
    exit_code(run(), diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{"d":2,"K":2,"pairs":[
        {"A":{"re":[[2,0],[0,1]]},"B":{"re":[[1,0],[0,3]],"im":[[0,0],[0,0]]}},
        {"A":{"re":[[1,1],[1,1]]},"B":{"re":[[1,1],[1,1]]}}]}"#;

    fn write_temp(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn check_file(text: &str, relation: Relation) -> (i32, String, String) {
        let f = write_temp(text);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_check(f.path(), &CheckOptions { relation, ..Default::default() }, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn worked_instance_passes_every_relation() {
        for r in Relation::ALL {
            let (code, out, err) = check_file(WORKED, r);
            assert_eq!(code, EXIT_PASS, "{r}: {out} {err}");
            assert!(out.lines().all(|l| l.contains("\"verdict\":\"pass\"")));
        }
    }

    #[test]
    fn non_commuting_file_exits_2() {
        let text = r#"{"d":2,"K":1,"pairs":[{"A":{"re":[[1,0],[0,0]]},"B":{"re":[[1,1],[1,1]]}}]}"#;
        let (code, _, err) = check_file(text, Relation::Theorem1);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("commutator residual"), "{err}");
    }

    #[test]
    fn malformed_files_exit_2() {
        for text in [
            "",
            "not json",
            r#"{"d":2}"#,
            r#"{"d":2,"K":2,"pairs":[]}"#,
            r#"{"d":3,"K":1,"pairs":[{"A":{"re":[[1,0],[0,1]]},"B":{"re":[[1,0],[0,1]]}}]}"#,
            r#"{"d":2,"K":1,"pairs":[{"A":{"re":[[1,0],[0]]},"B":{"re":[[1,0],[0,1]]}}]}"#,
            r#"{"d":2,"K":1,"pairs":[{"A":{"re":[[1,0],[0,-1]]},"B":{"re":[[1,0],[0,1]]}}]}"#,
            r#"{"d":2,"K":1,"pairs":[{"A":{"re":[[1,2],[0,1]]},"B":{"re":[[1,0],[0,1]]}}]}"#,
        ] {
            let (code, _, err) = check_file(text, Relation::Theorem1);
            assert_eq!(code, EXIT_ERROR, "{text}");
            assert!(err.starts_with("error: "));
        }
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let missing = Path::new("/nonexistent/instance.json");
        assert_eq!(cmd_check(missing, &CheckOptions::default(), &mut out, &mut err), EXIT_ERROR);
    }

    #[test]
    fn single_pair_file_is_equality() {
        let text = r#"{"d":2,"K":1,"pairs":[{"A":{"re":[[2,1],[1,2]]},"B":{"re":[[1,0.5],[0.5,1]]}}]}"#;
        let inst = parse_instance(text).unwrap();
        let r = check_instance(&inst, &CheckOptions::default()).unwrap();
        assert!(r.passed() && r.min_margin().abs() <= 1e-10);
    }

    #[test]
    fn instance_file_round_trip() {
        let inst = parse_instance(WORKED).unwrap();
        let text = serde_json::to_string(&InstanceFile::from_instance(&inst)).unwrap();
        assert_eq!(parse_instance(&text).unwrap().pairs(), inst.pairs());
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("2..6").unwrap(), 2..=6);
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert_eq!(parse_range("1..=4").unwrap(), 1..=4);
        assert!(parse_range("5..2").is_err() && parse_range("a..b").is_err());
        let g = parse_grid("0.5:1.5:0.5").unwrap();
        assert_eq!(g, vec![0.5, 1.0, 1.5]);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("0,1").is_err() && parse_grid("-1:1:0.5").is_err() && parse_grid("1:2").is_err());
        assert_eq!(default_bourin_grid().len(), 20);
    }

    #[test]
    fn replay_reproduces_records() {
        let config = GeneratorConfig::default();
        for relation in Relation::ALL {
            for trial in [0, 17] {
                let spec = TrialSpec::draw(relation, 42, trial, &config);
                let a = trial_record(&spec, DEFAULT_TOL, false);
                let b = trial_record(&spec, DEFAULT_TOL, false);
                assert_eq!(a, b);
                assert!(a.passed(), "{a:?}");
                assert_eq!(a.min_margin.map(f64::to_bits), b.min_margin.map(f64::to_bits));
            }
        }
    }

    #[test]
    fn zero_trials_emit_summaries_only() {
        let opts = FuzzOptions {
            relations: vec![Relation::Theorem1, Relation::Lemma1],
            config: GeneratorConfig::default(),
            trials: 0,
            tol: DEFAULT_TOL,
            timing: false,
        };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(cmd_fuzz(&opts, &mut out, &mut err), EXIT_PASS);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.starts_with("{\"summary\"")));
    }

    #[test]
    fn fuzz_output_is_deterministic() {
        let opts = FuzzOptions {
            relations: Relation::ALL.to_vec(),
            config: GeneratorConfig::default(),
            trials: 12,
            tol: DEFAULT_TOL,
            timing: false,
        };
        let run = || {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            assert_eq!(cmd_fuzz(&opts, &mut out, &mut err), EXIT_PASS, "{}", String::from_utf8_lossy(&out));
            out
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn bad_config_exits_2() {
        let config = GeneratorConfig { dims: 1..=65, ..GeneratorConfig::default() };
        let opts =
            FuzzOptions { relations: vec![Relation::Theorem1], config, trials: 1, tol: DEFAULT_TOL, timing: false };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(cmd_fuzz(&opts, &mut out, &mut err), EXIT_ERROR);
    }

    #[test]
    fn equal_pair_scan_slack() {
        let opts =
            ScanOptions { p_grid: vec![1.0], q_grid: vec![1.0], trials: 5, equal_pair: true, ..Default::default() };
        let cell = scan_cell(&opts, 1.0, 1.0).unwrap();
        let r = scan_trial(&opts, 1.0, 1.0, cell.tightest_trial.unwrap()).unwrap();
        // margin at k = 1 is σ₁(4A²) − σ₁(2A²) = 2σ₁(A²)
        assert_eq!(cell.min_margin, Some(r.min_margin));
        assert!((r.min_margin - r.x_sorted.values()[0]).abs() <= 1e-12 * r.x_sorted.values()[0]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(cmd_scan_bourin(&opts, &mut out, &mut err), EXIT_PASS);
        let bad = ScanOptions { p_grid: vec![0.0], ..Default::default() };
        assert_eq!(cmd_scan_bourin(&bad, &mut out, &mut err), EXIT_ERROR);
    }
}

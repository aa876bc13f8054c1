//! Theorem-level drivers: lift and augment X, pass to the primal by inverse
//! Gale duality, search a constrained proper Tverberg tuple, turn it into a
//! linear fan on the dual, slice at height one and verify against X.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactnum::{Cyclotomic, Field, FieldKind, Scalar};
use crate::fans::{
    fan_from_tuple_complex, fan_from_tuple_real, slice_project, verify_report, Classification, Fan, VerificationReport,
    VerifyMode,
};
use crate::galedual::{inverse_gale, lift_augment, GaleDualPair, PointConfig};
use crate::genpos::{
    build_counterexample, check_sgp, random_config, robustness_bound, verify_no_equidistribution, DEFAULT_CLASS_GATE,
    DEFAULT_SGP_GATE,
};
use crate::kneser::{
    is_prime, is_prime_power, m_eligible, threshold_caps, verify_certificate, CertificateVerdict, ColoringCertificate,
    SetFamily, DEFAULT_DISJOINT_GATE,
};
use crate::tverberg::{
    search_colored_tuple, search_tuple, search_two_tuples, PairConstraint, PairOptions, SearchConstraint,
    SearchOptions, TuplePair, TverbergTuple,
};

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    /// LP-call budget of the tuple search.
    pub gate: u64,
    pub threads: usize,
    /// Largest n for which typicality is checked (0 disables the check).
    pub sgp_gate: usize,
    /// Budget for Kneser certificate verification.
    pub cert_gate: u64,
    pub timing: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            gate: crate::tverberg::DEFAULT_LP_GATE,
            threads: 0,
            sgp_gate: DEFAULT_SGP_GATE,
            cert_gate: DEFAULT_DISJOINT_GATE,
            timing: false,
        }
    }
}

/// Which hypotheses of the relevant theorem the instance meets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub theorem: String,
    pub bound: usize,
    pub meets_bound: bool,
    pub r_condition: bool,
    pub spanning: bool,
    /// Rational-weight search is complete for these coordinates.
    pub exact_search: bool,
    pub extra: bool,
    pub guaranteed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl Hypotheses {
    fn finish(mut self) -> Self {
        if !self.meets_bound {
            self.warnings.push(format!(
                "n is below the bound {} of {}; the search may legitimately fail",
                self.bound, self.theorem
            ));
        }
        if !self.exact_search {
            self.warnings
                .push("coordinates are not Gaussian rationals; rational-weight search may miss tuples".into());
        }
        self.guaranteed = self.meets_bound && self.r_condition && self.spanning && self.exact_search && self.extra;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub digest: String,
    pub mode: String,
    pub field: FieldKind,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub ambient_dim: usize,
    pub d: usize,
    pub hypotheses: Hypotheses,
    pub tuple: TverbergTuple,
    pub linear_fan: Fan,
    pub affine_fan: Fan,
    pub report: VerificationReport,
    pub robustness: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub typical: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoFanResult {
    pub digest: String,
    pub mode: String,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub ambient_dim: usize,
    pub d: usize,
    pub hypotheses: Hypotheses,
    pub tuples: TuplePair,
    pub linear_fans: Vec<Fan>,
    pub affine_fans: Vec<Fan>,
    /// Distribution reports of the two fans.
    pub reports: Vec<VerificationReport>,
    /// Cellwise r²-cap report (equidistribute mode).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cells: Option<VerificationReport>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<u64>,
}

/// Hex SHA-256 of the canonical JSON of the inputs.
pub fn input_digest(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    hex::encode(Sha256::digest(&bytes))
}

/// Real and imaginary parts when `s` is a Gaussian rational.
pub fn gaussian_parts(s: &Scalar) -> Option<(crate::exactnum::Rational, crate::exactnum::Rational)> {
    match s {
        Scalar::Rat(q) => Some((q.clone(), crate::exactnum::int(0))),
        Scalar::Cyc(c) => {
            let n = c.conductor();
            if n % 4 != 0 {
                return c.as_rational().map(|q| (q.clone(), crate::exactnum::int(0)));
            }
            let half = Scalar::Rat(crate::exactnum::rat(1, 2));
            let re = s.add(&s.conj()).mul(&half);
            let i = Scalar::Cyc(Cyclotomic::root_of_unity(n, (n / 4) as i64));
            let im = s.sub(&s.conj()).mul(&half).mul(&i.conj());
            Some((re.as_rational()?.clone(), im.as_rational()?.clone()))
        }
    }
}

fn all_gaussian(x: &PointConfig) -> bool {
    x.points.iter().flatten().all(|s| gaussian_parts(s).is_some())
}

/// Realified copy of a configuration with Gaussian coordinates.
pub fn realify_gaussian(x: &PointConfig) -> Option<PointConfig> {
    if !x.field.is_complex() {
        return Some(x.clone());
    }
    let pts = x
        .points
        .iter()
        .map(|p| {
            let mut v = Vec::with_capacity(2 * p.len());
            for s in p {
                let (a, b) = gaussian_parts(s)?;
                v.push(Scalar::Rat(a));
                v.push(Scalar::Rat(b));
            }
            Some(v)
        })
        .collect::<Option<Vec<_>>>()?;
    PointConfig::new(FieldKind::Rational, 2 * x.dim, pts).ok()
}

struct Prepared {
    lifted: PointConfig,
    pair: GaleDualPair,
    n: usize,
    d: usize,
    allowed: Vec<bool>,
}

fn prepare(x: &PointConfig, r: usize) -> Result<Prepared> {
    x.require_affinely_spanning()?;
    let n = x.len();
    if n < x.dim + 2 {
        return Err(Error::pre("need n ≥ D + 2 points so that d = n − D − 1 ≥ 1"));
    }
    if let FieldKind::Cyclotomic(c) = x.field {
        if !(c as usize).is_multiple_of(r) {
            return Err(Error::pre(format!(
                "Q(ζ_{c}) lacks ω_{r}; use a cyclotomic field whose conductor is divisible by {r}"
            )));
        }
    }
    let lifted = lift_augment(x)?;
    let pair = inverse_gale(&lifted)?;
    let mut allowed = vec![true; n + 1];
    allowed[n] = false;
    Ok(Prepared {
        lifted,
        pair,
        n,
        d: n - x.dim - 1,
        allowed,
    })
}

fn linear_fan(pair: &GaleDualPair, tuple: &TverbergTuple) -> Result<Fan> {
    Ok(if pair.primal.field.is_complex() {
        Fan::Complex(fan_from_tuple_complex(pair, tuple)?)
    } else {
        Fan::Real(fan_from_tuple_real(pair, tuple)?)
    })
}

/// Slices the linear fan and checks that classification commutes with the
/// slice and matches the tuple's parts on every input point.
fn affine_fan(prep: &Prepared, x: &PointConfig, linear: &Fan, tuple: &TverbergTuple) -> Result<Fan> {
    let n = prep.n;
    let affine = slice_project(linear, &prep.lifted.points[n]).map_err(|e| Error::verify(e.to_string()))?;
    let mut expected = vec![Classification::Center; n];
    for (j, part) in tuple.parts.iter().enumerate() {
        for &i in part {
            expected[i] = Classification::Interior(j);
        }
    }
    for i in 0..n {
        let up = linear.classify(&prep.lifted.points[i])?;
        let down = affine.classify(&x.points[i])?;
        if up != down {
            return Err(Error::verify(format!("slice does not commute with classification at point {i}")));
        }
        if down != expected[i] {
            return Err(Error::verify(format!("point {i} does not land where its part says")));
        }
    }
    Ok(affine)
}

fn typical_of(prep: &Prepared, x: &PointConfig, gate: usize) -> Result<Option<bool>> {
    if prep.n > gate {
        return Ok(None);
    }
    let primal = prep.pair.primal.select(&(0..prep.n).collect::<Vec<_>>());
    let Some(real) = realify_gaussian(&primal) else {
        return Ok(None);
    };
    let _ = x;
    Ok(Some(check_sgp(&real, real.len(), gate)?.pass))
}

struct Context<'a> {
    x: &'a PointConfig,
    r: usize,
    m: usize,
    mode: &'static str,
    digest: String,
    hyp: Hypotheses,
    opts: &'a PipelineOptions,
    start: Instant,
}

fn finish(ctx: Context<'_>, prep: &Prepared, tuple: TverbergTuple, verify: VerifyMode) -> Result<PipelineResult> {
    let x = ctx.x;
    let linear = linear_fan(&prep.pair, &tuple)?;
    let affine = affine_fan(prep, x, &linear, &tuple)?;
    let report = verify_report(&affine, x, &verify)?;
    if !report.passed {
        return Err(Error::verify(format!("{} verification failed: {:?}", ctx.mode, report.checks)));
    }
    if report.robustness != tuple.support_size() {
        return Err(Error::verify("interior count differs from the tuple's support"));
    }
    let typical = typical_of(prep, x, ctx.opts.sgp_gate)?;
    let complex = x.field.is_complex();
    if typical == Some(true) && report.robustness < robustness_bound(ctx.r, prep.d, complex) {
        return Err(Error::GuaranteeViolation(format!(
            "typical input but only {} interior points (< {})",
            report.robustness,
            robustness_bound(ctx.r, prep.d, complex)
        )));
    }
    Ok(PipelineResult {
        digest: ctx.digest,
        mode: ctx.mode.to_string(),
        field: x.field,
        r: ctx.r,
        m: ctx.m,
        n: prep.n,
        ambient_dim: x.dim,
        d: prep.d,
        hypotheses: ctx.hyp,
        robustness: report.robustness,
        tuple,
        linear_fan: linear,
        affine_fan: affine,
        report,
        typical,
        timing_ms: ctx.opts.timing.then(|| ctx.start.elapsed().as_millis() as u64),
    })
}

fn search_opts(prep: &Prepared, hyp: &Hypotheses, opts: &PipelineOptions) -> SearchOptions {
    SearchOptions {
        gate: opts.gate,
        threads: opts.threads,
        canonical: true,
        allowed: Some(prep.allowed.clone()),
        guarantee: hyp.guaranteed.then(|| hyp.theorem.clone()),
        auto_guarantee: false,
    }
}

fn extend_coloring(coloring: &[usize]) -> Vec<usize> {
    let mut c = coloring.to_vec();
    c.push(0);
    c
}

fn coloring_of(x: &PointConfig) -> Result<Vec<usize>> {
    x.coloring
        .clone()
        .ok_or_else(|| Error::pre("the configuration needs a coloring"))
}

/// Hypotheses of the equidistribution theorems for this instance.
pub fn equidistribute_hypotheses(x: &PointConfig, r: usize, m: usize) -> Hypotheses {
    let n = x.len();
    let d = n.saturating_sub(x.dim + 1);
    let complex = x.field.is_complex();
    let (bound, theorem) = if complex {
        ((r - 1) * (2 * d + m + 1) + 1, "complex equidistribution")
    } else {
        ((r - 1) * (d + m + 1) + 1, "real equidistribution")
    };
    let r_ok = is_prime_power(r as u64) && (complex || r >= 3);
    let mut h = Hypotheses {
        theorem: format!("{theorem} (r = {r}, d = {d}, m = {m})"),
        bound,
        meets_bound: n >= bound,
        r_condition: r_ok,
        spanning: x.is_affinely_spanning(),
        exact_search: all_gaussian(x),
        extra: true,
        guaranteed: false,
        warnings: Vec::new(),
    };
    if !r_ok {
        h.warnings.push(format!("r = {r} is outside the theorem's range (prime power, r ≥ 3 for real fans)"));
    }
    h.finish()
}

fn base_digest(mode: &str, x: &PointConfig, r: usize, extra: serde_json::Value) -> String {
    input_digest(&serde_json::json!({ "mode": mode, "r": r, "config": x, "extra": extra }))
}

/// Fan equidistributing the coloring of X: each open half-flat holds at most
/// |X_k|/r points of every class.
pub fn equidistribute(x: &PointConfig, r: usize, opts: &PipelineOptions) -> Result<Option<PipelineResult>> {
    let start = Instant::now();
    let coloring = coloring_of(x)?;
    let m = x.num_classes();
    let prep = prepare(x, r)?;
    let hyp = equidistribute_hypotheses(x, r, m);
    let caps = threshold_caps(&x.class_sizes(), r);
    let constraint = SearchConstraint::ColorCap {
        coloring: extend_coloring(&coloring),
        caps,
    };
    let found = search_tuple(&prep.pair.primal, r, &constraint, &search_opts(&prep, &hyp, opts))?;
    let Some(tuple) = found else { return Ok(None) };
    let ctx = Context {
        x,
        r,
        m,
        mode: "equidistribute",
        digest: base_digest("equidistribute", x, r, serde_json::Value::Null),
        hyp,
        opts,
        start,
    };
    finish(ctx, &prep, tuple, VerifyMode::Equidistribute { coloring }).map(Some)
}

pub fn pierce_hypotheses(x: &PointConfig, r: usize, m: usize, certificate_ok: bool) -> Hypotheses {
    let mut h = equidistribute_hypotheses(x, r, m);
    h.theorem = h.theorem.replace("equidistribution", "piercing distribution");
    h.extra = certificate_ok;
    h.finish_again()
}

impl Hypotheses {
    fn finish_again(mut self) -> Self {
        self.guaranteed = self.meets_bound && self.r_condition && self.spanning && self.exact_search && self.extra;
        self
    }
}

/// Fan distributing X so that every family member meets two closed half-flats.
pub fn pierce(
    x: &PointConfig,
    family: &SetFamily,
    certificate: &ColoringCertificate,
    r: usize,
    opts: &PipelineOptions,
) -> Result<Option<PipelineResult>> {
    let start = Instant::now();
    let n = x.len();
    if family.n != n {
        return Err(Error::pre(format!("family ground set {} differs from n = {n}", family.n)));
    }
    if certificate.r != r {
        return Err(Error::InvalidCertificate(format!(
            "certificate is for KG^{} but r = {r}",
            certificate.r
        )));
    }
    if certificate.family() != *family {
        return Err(Error::InvalidCertificate("certificate colors a different family".into()));
    }
    if let CertificateVerdict::Violation { class, hyperedge } = verify_certificate(certificate, opts.cert_gate)? {
        return Err(Error::InvalidCertificate(format!(
            "class {class} contains {r} pairwise disjoint members {hyperedge:?}"
        )));
    }
    let m = certificate.num_classes();
    let prep = prepare(x, r)?;
    let hyp = pierce_hypotheses(x, r, m, true);
    let lifted_family = SetFamily::new(n + 1, family.members.clone())?;
    let constraint = SearchConstraint::FamilyAvoid { family: lifted_family };
    let found = search_tuple(&prep.pair.primal, r, &constraint, &search_opts(&prep, &hyp, opts))?;
    let Some(tuple) = found else { return Ok(None) };
    let ctx = Context {
        x,
        r,
        m,
        mode: "pierce",
        digest: base_digest("pierce", x, r, serde_json::json!({ "certificate": certificate })),
        hyp,
        opts,
        start,
    };
    finish(
        ctx,
        &prep,
        tuple,
        VerifyMode::Pierce {
            family: family.clone(),
        },
    )
    .map(Some)
}

/// Rainbow hypotheses. The complex statement asks for n ≥ r(2d+1)−1 while
/// the argument uses n ≥ r(2d+1); only the larger bound is treated as a
/// guarantee.
pub fn rainbow_hypotheses(x: &PointConfig, r: usize) -> Hypotheses {
    let n = x.len();
    let d = n.saturating_sub(x.dim + 1);
    let complex = x.field.is_complex();
    let classes = if complex { 2 * d + 1 } else { d + 1 };
    let bound = r * classes;
    let m = x.num_classes();
    let mut h = Hypotheses {
        theorem: format!(
            "{} rainbow distribution (r = {r}, d = {d}, {classes} classes)",
            if complex { "complex" } else { "real" }
        ),
        bound,
        meets_bound: n >= bound,
        r_condition: is_prime(r as u64 + 1),
        spanning: x.is_affinely_spanning(),
        exact_search: all_gaussian(x),
        extra: m == classes,
        guaranteed: false,
        warnings: Vec::new(),
    };
    if complex && n + 1 == bound {
        h.warnings.push(format!(
            "n = r(2d+1) − 1 = {n}: paper-ambiguous, the stated bound holds but the argument needs {bound}"
        ));
    }
    if !h.r_condition {
        h.warnings.push(format!("r + 1 = {} is not prime", r + 1));
    }
    if m != classes {
        h.warnings.push(format!("{m} color classes; the theorem uses {classes}"));
    }
    h.finish()
}

/// Fan in which each open half-flat holds at most one point per color class.
pub fn rainbow(x: &PointConfig, r: usize, opts: &PipelineOptions) -> Result<Option<PipelineResult>> {
    let start = Instant::now();
    let coloring = coloring_of(x)?;
    if let Some(k) = x.class_sizes().iter().position(|&s| s < r) {
        return Err(Error::pre(format!("color class {k} has fewer than r = {r} points")));
    }
    let prep = prepare(x, r)?;
    let hyp = rainbow_hypotheses(x, r);
    let found = search_colored_tuple(
        &prep.pair.primal,
        r,
        &extend_coloring(&coloring),
        &search_opts(&prep, &hyp, opts),
    )?;
    let Some(tuple) = found else { return Ok(None) };
    let ctx = Context {
        x,
        r,
        m: x.num_classes(),
        mode: "rainbow",
        digest: base_digest("rainbow", x, r, serde_json::Value::Null),
        hyp,
        opts,
        start,
    };
    finish(ctx, &prep, tuple, VerifyMode::Rainbow { coloring }).map(Some)
}

/// What the two fans must achieve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TwoFanMode {
    /// Each cell holds at most |X_k|/r² points of class k (coloring from X).
    Equidistribute,
    /// Every member meets two closed half-flats of one fan.
    Pierce { certificate: ColoringCertificate },
}

pub fn two_fan_hypotheses(x: &PointConfig, r: usize, m: usize) -> Hypotheses {
    let n = x.len();
    let d = n.saturating_sub(x.dim + 1);
    let complex = x.field.is_complex();
    let base = if complex { (r - 1) * (2 * d + 1) } else { (r - 1) * (d + 1) };
    let bound = base + m * (r * r - 1) / 2 + 1;
    Hypotheses {
        theorem: format!("two-fan distribution (r = {r}, d = {d}, m = {m})"),
        bound,
        meets_bound: n >= bound,
        r_condition: r >= 3 && is_prime(r as u64),
        spanning: x.is_affinely_spanning(),
        exact_search: all_gaussian(x),
        extra: true,
        guaranteed: false,
        warnings: Vec::new(),
    }
    .finish()
}

/// Two fans from the same lifted dual whose cells satisfy the mode.
/// The pair search is best effort: `Ok(None)` never signals a violation.
pub fn two_fans(
    x: &PointConfig,
    r: usize,
    mode: &TwoFanMode,
    pair_opts: &PairOptions,
    opts: &PipelineOptions,
) -> Result<Option<TwoFanResult>> {
    let start = Instant::now();
    if x.field.is_complex() {
        return Err(Error::pre("two-fan distributions are implemented for real configurations"));
    }
    if r < 3 || !is_prime(r as u64) {
        return Err(Error::pre(format!("r = {r} must be an odd prime")));
    }
    let n = x.len();
    let (m, constraint, family) = match mode {
        TwoFanMode::Equidistribute => {
            let coloring = coloring_of(x)?;
            let caps = threshold_caps(&x.class_sizes(), r * r);
            (
                x.num_classes(),
                PairConstraint::CellCap {
                    coloring: extend_coloring(&coloring),
                    caps,
                },
                None,
            )
        }
        TwoFanMode::Pierce { certificate } => {
            if certificate.r != r * r {
                return Err(Error::InvalidCertificate(format!(
                    "two-fan piercing needs a KG^{} certificate, got KG^{}",
                    r * r,
                    certificate.r
                )));
            }
            if certificate.n != n {
                return Err(Error::pre("certificate ground set differs from n"));
            }
            if let CertificateVerdict::Violation { class, .. } = verify_certificate(certificate, opts.cert_gate)? {
                return Err(Error::InvalidCertificate(format!("class {class} has {} disjoint members", r * r)));
            }
            let fam = certificate.family();
            (
                certificate.num_classes(),
                PairConstraint::FamilyAvoid {
                    family: SetFamily::new(n + 1, fam.members.clone())?,
                },
                Some(fam),
            )
        }
    };
    let (eligible, digits) = m_eligible(m as u64, r as u64)?;
    if !eligible {
        return Err(Error::pre(format!(
            "m = {m} is not eligible for r = {r}: base-{r} digits of m(r−1)/2 are {digits:?}"
        )));
    }
    let prep = prepare(x, r)?;
    let hyp = two_fan_hypotheses(x, r, m);
    let po = PairOptions {
        allowed: Some(prep.allowed.clone()),
        threads: if pair_opts.threads == 0 { opts.threads } else { pair_opts.threads },
        ..pair_opts.clone()
    };
    let Some(tuples) = search_two_tuples(&prep.pair.primal, r, &constraint, &po)? else {
        return Ok(None);
    };
    let mut linear_fans = Vec::new();
    let mut affine_fans = Vec::new();
    let mut reports = Vec::new();
    for t in [&tuples.first, &tuples.second] {
        let lin = linear_fan(&prep.pair, t)?;
        let aff = affine_fan(&prep, x, &lin, t)?;
        let rep = verify_report(&aff, x, &VerifyMode::Distribute)?;
        if !rep.passed {
            return Err(Error::verify("a fan of the pair does not distribute X"));
        }
        linear_fans.push(lin);
        affine_fans.push(aff);
        reports.push(rep);
    }
    let (cells, passed) = match (&family, mode) {
        (None, _) => {
            let rep = verify_report(
                &affine_fans[0],
                x,
                &VerifyMode::TwoFan {
                    other: affine_fans[1].clone(),
                    coloring: coloring_of(x)?,
                },
            )?;
            let ok = rep.passed;
            (Some(rep), ok)
        }
        (Some(fam), _) => (None, two_fan_pierce_ok(fam, &reports, r)),
    };
    if !passed {
        return Err(Error::verify("emitted fan pair fails its cell verification"));
    }
    let extra = match mode {
        TwoFanMode::Equidistribute => serde_json::Value::Null,
        TwoFanMode::Pierce { certificate } => serde_json::json!({ "certificate": certificate }),
    };
    Ok(Some(TwoFanResult {
        digest: base_digest("two_fans", x, r, extra),
        mode: match mode {
            TwoFanMode::Equidistribute => "equidistribute".into(),
            TwoFanMode::Pierce { .. } => "pierce".into(),
        },
        r,
        m,
        n,
        ambient_dim: x.dim,
        d: prep.d,
        hypotheses: hyp,
        tuples,
        linear_fans,
        affine_fans,
        reports,
        cells,
        passed,
        timing_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    }))
}

/// Every member meets at least two closed half-flats of one of the fans.
fn two_fan_pierce_ok(family: &SetFamily, reports: &[VerificationReport], r: usize) -> bool {
    family.members.iter().all(|member| {
        reports.iter().any(|rep| {
            let mut met = vec![false; r];
            for &i in member {
                match rep.classifications[i] {
                    Classification::Center => met.iter_mut().for_each(|m| *m = true),
                    Classification::Interior(j) => met[j] = true,
                    Classification::Outside => {}
                }
            }
            met.iter().filter(|&&b| b).count() >= 2
        })
    })
}

/// One row of the bracketing experiment for n(r, m, d).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub r: usize,
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub d: usize,
    /// n = d + s + 1, where equidistribution is guaranteed.
    pub lower_n: usize,
    pub lower_successes: usize,
    pub seeds: usize,
    /// Number of points of the certified counterexample.
    pub counterexample_points: usize,
    pub ell: usize,
    pub upper_certified: bool,
    /// Largest n not excluded by the counterexample.
    pub upper_n: usize,
}

/// Lower-bound runs and certified counterexamples bracketing n(r, m, d) for
/// d = (r−2)s + t + (r−1)(m+1).
pub fn bounds_experiment(
    r: usize,
    m: usize,
    params: &[(usize, usize)],
    seeds: u64,
    opts: &PipelineOptions,
) -> Result<Vec<BoundsRow>> {
    if r < 3 || m < 2 {
        return Err(Error::pre("bounds experiment needs r ≥ 3 and m ≥ 2"));
    }
    let mut rows = Vec::new();
    for &(s, t) in params {
        if s < 1 || t > r - 2 {
            return Err(Error::pre(format!("need s ≥ 1 and t ≤ r − 2, got s = {s}, t = {t}")));
        }
        let d = (r - 2) * s + t + (r - 1) * (m + 1);
        let n = d + s + 1;
        let mut ok = 0;
        for seed in 0..seeds {
            let coloring: Vec<usize> = (0..n).map(|i| i % m).collect();
            let x = random_config(n, d, FieldKind::Rational, 8, seed)?.with_coloring(coloring)?;
            if equidistribute(&x, r, opts)?.is_some() {
                ok += 1;
            }
        }
        // Smallest ℓ with ℓ > 2 + t/(r−1).
        let ell = 2 + t / (r - 1) + 1;
        let inst = build_counterexample(r, m, s, t, ell, seeds, opts.sgp_gate)?;
        let search = SearchOptions {
            gate: opts.gate,
            threads: opts.threads,
            ..SearchOptions::default()
        };
        let certified = verify_no_equidistribution(&inst, DEFAULT_CLASS_GATE, &search)?;
        rows.push(BoundsRow {
            r,
            m,
            s,
            t,
            d,
            lower_n: n,
            lower_successes: ok,
            seeds: seeds as usize,
            counterexample_points: inst.x.len(),
            ell,
            upper_certified: certified,
            upper_n: inst.x.len() - 1,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn opts() -> PipelineOptions {
        PipelineOptions::default()
    }

    #[test]
    fn gaussian_detection() {
        let i = Scalar::Cyc(Cyclotomic::root_of_unity(12, 3));
        let z = Scalar::Rat(rat(3, 2)).add(&i.mul(&Scalar::from_int(-2)));
        assert_eq!(gaussian_parts(&z), Some((rat(3, 2), int(-2))));
        let w = Scalar::Cyc(Cyclotomic::root_of_unity(12, 1));
        assert_eq!(gaussian_parts(&w), None);
    }

    #[test]
    fn equidistribute_three_fan_in_r5() {
        let x = random_config(7, 5, FieldKind::Rational, 8, 11)
            .unwrap()
            .with_coloring(vec![0; 7])
            .unwrap();
        let res = equidistribute(&x, 3, &opts()).unwrap().unwrap();
        assert!(res.hypotheses.guaranteed);
        assert_eq!(res.d, 1);
        assert!(res.report.passed);
        for row in &res.report.interior_by_class {
            assert!(3 * row[0] <= 7);
        }
        assert_eq!(res.typical, Some(true));
        assert!(res.robustness >= 5);
    }

    #[test]
    fn singleton_class_lands_on_center() {
        let mut c = vec![0; 7];
        c[4] = 1;
        let x = random_config(7, 5, FieldKind::Rational, 8, 3)
            .unwrap()
            .with_coloring(c)
            .unwrap();
        let res = equidistribute(&x, 3, &opts()).unwrap().unwrap();
        assert_eq!(res.report.classifications[4], Classification::Center);
    }

    #[test]
    fn pierce_singleton_forces_center() {
        let x = random_config(7, 5, FieldKind::Rational, 8, 5).unwrap();
        let fam = SetFamily::new(7, vec![vec![2]]).unwrap();
        let cert = crate::kneser::greedy_certificate(&fam, 3, DEFAULT_DISJOINT_GATE).unwrap();
        let res = pierce(&x, &fam, &cert, 3, &opts()).unwrap().unwrap();
        assert_eq!(res.report.classifications[2], Classification::Center);
        let empty = SetFamily::empty(7);
        let cert = ColoringCertificate::new(7, vec![], 3, vec![]).unwrap();
        assert!(pierce(&x, &empty, &cert, 3, &opts()).unwrap().is_some());
    }

    #[test]
    fn rainbow_precondition() {
        let x = random_config(8, 6, FieldKind::Rational, 8, 2)
            .unwrap()
            .with_coloring(vec![0, 0, 0, 0, 0, 0, 0, 1])
            .unwrap();
        assert!(matches!(rainbow(&x, 4, &opts()), Err(Error::Precondition(_))));
    }

    #[test]
    fn complex_two_fan_small() {
        let x = random_config(6, 4, FieldKind::Cyclotomic(4), 8, 1)
            .unwrap()
            .with_coloring(vec![0, 1, 0, 1, 0, 1])
            .unwrap();
        let res = equidistribute(&x, 2, &opts()).unwrap().unwrap();
        assert!(matches!(res.affine_fan, Fan::Complex(_)));
        assert!(res.report.passed);
    }

    #[test]
    fn field_must_contain_root_of_unity() {
        let x = random_config(6, 4, FieldKind::Cyclotomic(4), 8, 1)
            .unwrap()
            .with_coloring(vec![0; 6])
            .unwrap();
        assert!(matches!(equidistribute(&x, 3, &opts()), Err(Error::Precondition(_))));
    }

    #[test]
    fn digest_is_stable() {
        let x = random_config(7, 5, FieldKind::Rational, 8, 1)
            .unwrap()
            .with_coloring(vec![0; 7])
            .unwrap();
        let a = equidistribute(&x, 3, &opts()).unwrap().unwrap();
        let b = equidistribute(&x, 3, &opts()).unwrap().unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(!serde_json::to_string(&a).unwrap().contains("timing_ms"));
    }

    #[test]
    fn two_fan_rejects_ineligible_m() {
        let x = random_config(13, 11, FieldKind::Rational, 8, 1)
            .unwrap()
            .with_coloring(vec![0; 13])
            .unwrap();
        let r = two_fans(&x, 3, &TwoFanMode::Equidistribute, &PairOptions::default(), &opts());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}

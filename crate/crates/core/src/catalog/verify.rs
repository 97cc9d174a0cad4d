use std::fmt::Display;

use serde::Serialize;

use super::ledger::{expected_for, table_mismatches};
use super::ordering::{class_pairs, ordering_check};
use super::semicontinuity::{semicontinuity_check_with, SemicontinuityReport, Verdict};
use super::{make_example, Citation, ExampleName, ExampleSpec};
use crate::error::Result;
use crate::estimate::{
    box_dimension_estimate, correlation_dim_gp, local_dimension_profile, log_schedule, loglog_fit,
    modified_correlation_dim, PointCloud, ScalingSeries,
};
use crate::exact::{concentration_certificate, correlation_integral_exact, exact_dims, Mapping};
use crate::measure::SymbolicMeasure;
use crate::metrics::{
    setwise_converges, tv_converges, tv_distance, weak_converges, ConvergenceVerdict, MeasureSequence, Mode, Status,
};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Allowed deviation of numeric slopes from exact values.
    pub numeric: f64,
    /// Tolerance handed to the convergence checkers.
    pub tol: f64,
    /// Allowed deviation of closed-form distances.
    pub exact: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { numeric: 0.05, tol: 0.05, exact: 1e-10, samples: 10_000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub id: String,
    pub description: String,
    pub citation: Citation,
    pub passed: bool,
    pub expected: String,
    pub observed: String,
    /// Distance to failing; negative when failed. `None` for yes/no claims.
    pub margin: Option<f64>,
    pub detail: String,
}

impl Claim {
    fn check(
        id: &str,
        description: impl Into<String>,
        citation: Citation,
        passed: bool,
        expected: impl Display,
        observed: impl Display,
    ) -> Self {
        Self {
            id: id.to_string(),
            description: description.into(),
            citation,
            passed,
            expected: expected.to_string(),
            observed: observed.to_string(),
            margin: None,
            detail: String::new(),
        }
    }

    /// `|observed − expected| ≤ tol`, or a failed claim carrying the error.
    fn close(
        id: &str,
        description: impl Into<String>,
        citation: Citation,
        expected: f64,
        observed: Result<f64>,
        tol: f64,
    ) -> Self {
        match observed {
            Ok(x) => {
                let margin = tol - (x - expected).abs();
                let mut c = Self::check(id, description, citation, margin >= 0.0, expected, x);
                c.margin = Some(margin);
                c.detail = format!("tolerance {tol}");
                c
            }
            Err(e) => Self::check(id, description, citation, false, expected, "error").detail(e.to_string()),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub name: ExampleName,
    pub horizon: u64,
    pub claims: Vec<Claim>,
    pub semicontinuity: SemicontinuityReport,
    pub verdicts: Vec<ConvergenceVerdict>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.passed)
    }
}

/// Runs the exact tables, numeric estimators and convergence checkers on one
/// example and compares everything with its ledger.
///
/// Only an invalid spec is an error; failed checks become failed claims.
pub fn verify_example(spec: &ExampleSpec, tolerances: &Tolerances) -> Result<ExampleReport> {
    let seq = make_example(spec)?;
    let ledger = expected_for(spec);
    let h = spec.horizon;
    let mut claims = Vec::new();

    let mut bad_terms = Vec::new();
    for n in seq.first_index()..=h {
        if let Some(t) = ledger.term_table(n) {
            let got = exact_dims(&seq.term(n)?);
            if !table_mismatches(&got, t, 1e-12).is_empty() {
                bad_terms.push(n);
            }
        }
    }
    claims.push(
        Claim::check(
            "terms.exact",
            "exact tables of ν_n match the expected pattern",
            ledger.terms_citation.clone(),
            bad_terms.is_empty(),
            "0 mismatching n",
            format!("{} mismatching n", bad_terms.len()),
        )
        .detail(format!("{bad_terms:?}")),
    );
    let limit_table = exact_dims(seq.limit());
    let off = table_mismatches(&limit_table, &ledger.limit, 1e-12);
    claims.push(
        Claim::check(
            "limit.exact",
            "exact table of the limit matches",
            ledger.limit_citation.clone(),
            off.is_empty(),
            "0 mismatching mappings",
            format!("{} mismatching mappings", off.len()),
        )
        .detail(off.iter().map(|m| m.label()).collect::<Vec<_>>().join(" ")),
    );

    let verdicts = mode_verdicts(&seq, h, tolerances.tol);
    for (mode, verdict) in [Mode::Weak, Mode::Setwise, Mode::Tv].into_iter().zip(&verdicts) {
        let exp = ledger.mode(mode).expect("every mode has an expectation");
        let want = if exp.converges { Status::Certified } else { Status::Refuted };
        let (got, detail) = match verdict {
            Ok(v) => (Some(v.status), v.certificate.clone()),
            Err(e) => (None, e.to_string()),
        };
        claims.push(
            Claim::check(
                &format!("mode.{mode}"),
                format!("{mode} convergence {}", if exp.converges { "holds" } else { "fails" }),
                exp.citation.clone(),
                got == Some(want),
                format!("{want:?}"),
                got.map_or("error".to_string(), |s| format!("{s:?}")),
            )
            .detail(detail),
        );
    }
    let status = |i: usize| verdicts[i].as_ref().ok().map(|v| v.status);
    let (weak, setwise, tv) = (status(0), status(1), status(2));
    let chain_ok = tv != Some(Status::Certified) || (setwise != Some(Status::Refuted) && weak != Some(Status::Refuted));
    claims.push(Claim::check(
        "modes.fineness",
        "a TV certificate is never contradicted by a setwise or weak refutation",
        Citation::derived("TV convergence implies setwise, which implies weak"),
        chain_ok,
        "consistent",
        format!("weak {weak:?}, setwise {setwise:?}, tv {tv:?}"),
    ));

    let semicontinuity = semicontinuity_check_with(&seq, h, tolerances.tol);
    let gap = semicontinuity.row(Mapping::HausdorffUpper).and_then(|r| r.margin);
    let applicable = semicontinuity.rows.iter().any(|r| r.verdict == Verdict::Holds);
    claims.push(
        Claim::check(
            "semicontinuity",
            "liminf dim^U(ν_n) ≥ dim^U(ν) and limsup dim^L(ν_n) ≤ dim^L(ν) under setwise convergence",
            Citation::stated("countably stable upper mappings are lower semicontinuous and lower mappings upper semicontinuous in the setwise topology"),
            semicontinuity.holds(),
            "no violation",
            if applicable { "checked".to_string() } else { "not applicable (setwise not certified)".to_string() },
        )
        .detail(format!("dim_H^U margin {gap:?}")),
    );

    let pairs = class_pairs(spec)?;
    let mut broken = Vec::new();
    for (label, mu, nu) in &pairs {
        match ordering_check(label.clone(), mu, nu) {
            Ok(r) if r.abs_continuous && r.holds() => {}
            Ok(r) => broken.push(format!("{label}: {:?}", r.failures)),
            Err(e) => broken.push(format!("{label}: {e}")),
        }
    }
    claims.push(
        Claim::check(
            "ordering",
            "μ ≪ ν gives dim^U(μ) ≤ dim^U(ν), with equality for equivalent measures",
            Citation::stated("absolute continuity orders the upper measure dimensions"),
            broken.is_empty(),
            format!("{} ordered pairs", pairs.len()),
            format!("{} broken", broken.len()),
        )
        .detail(broken.join("; ")),
    );

    specific_claims(spec, &seq, tolerances, &mut claims)?;

    Ok(ExampleReport {
        name: spec.name,
        horizon: h,
        claims,
        semicontinuity,
        verdicts: verdicts.into_iter().filter_map(|v| v.ok()).collect(),
    })
}

/// Weak, setwise and TV verdicts. Weak convergence is checked on the
/// normalized sequence when the measures are not probabilities.
fn mode_verdicts(seq: &MeasureSequence, h: u64, tol: f64) -> Vec<Result<ConvergenceVerdict>> {
    let probabilities =
        seq.limit().is_probability() && seq.term(seq.first_index()).map(|m| m.is_probability()).unwrap_or(false);
    let weak = if probabilities {
        weak_converges(seq, h, tol)
    } else {
        seq.normalized().and_then(|s| weak_converges(&s, h, tol))
    };
    vec![weak, setwise_converges(seq, h, tol), tv_converges(seq, h, tol)]
}

fn gp_slope(mu: &SymbolicMeasure, rs: &[f64], window: Option<(f64, f64)>, t: &Tolerances) -> Result<f64> {
    let pc: PointCloud = mu.sample(t.samples, t.seed)?.into();
    Ok(correlation_dim_gp(&pc, rs, window, Execution::auto())?.slope)
}

/// Largest deviation of `f(n)` from `g(n)` over `ns`.
fn worst(ns: impl Iterator<Item = u64>, f: impl Fn(u64) -> Result<f64>, g: impl Fn(u64) -> f64) -> Result<f64> {
    let mut w: f64 = 0.0;
    for n in ns {
        w = w.max((f(n)? - g(n)).abs());
    }
    Ok(w)
}

fn tv_claim(
    id: &str,
    what: &str,
    seq: &MeasureSequence,
    ns: std::ops::RangeInclusive<u64>,
    formula: impl Fn(u64) -> f64,
    citation: Citation,
    t: &Tolerances,
) -> Claim {
    let dev = worst(ns.clone(), |n| tv_distance(&seq.term(n)?, seq.limit()), formula);
    Claim::close(id, format!("‖ν_n − ν‖ = {what} for n in {ns:?}"), citation, 0.0, dev, t.exact)
}

fn limit_jump(id: &str, m: Mapping, seq: &MeasureSequence, h: u64, citation: Citation) -> Result<Claim> {
    let (lo, hi) = seq.tail(h);
    let tail: Vec<Option<f64>> = (lo..=hi).map(|n| Ok(exact_dims(&seq.term(n)?).value(m))).collect::<Result<_>>()?;
    let lim = exact_dims(seq.limit()).value(m);
    let first = tail[0];
    let constant = tail.iter().all(|v| *v == first);
    Ok(Claim::check(
        id,
        format!("{} of ν_n settles at a value different from {} of the limit", m.label(), m.label()),
        citation,
        constant && first.is_some() && lim.is_some() && first != lim,
        "lim ≠ limit value",
        format!("{first:?} vs {lim:?}"),
    ))
}

fn specific_claims(spec: &ExampleSpec, seq: &MeasureSequence, t: &Tolerances, claims: &mut Vec<Claim>) -> Result<()> {
    let h = spec.horizon;
    let tol = t.numeric;
    match spec.name {
        ExampleName::Ex1 => {
            let mut ok = true;
            for n in 1..=h {
                let want = if n % 2 == 1 { 1.0 } else { 0.0 };
                ok &= exact_dims(&seq.term(n)?).value(Mapping::HausdorffUpper) == Some(want);
            }
            claims.push(Claim::check(
                "dims.oscillate",
                "dim_H^U(ν_n) alternates 1, 0, 1, 0, … and so does not converge",
                Citation::stated("the dimension sequence of ν_n does not converge"),
                ok,
                "1,0,1,0,…",
                if ok { "1,0,1,0,…" } else { "different" },
            ));
            let l = 1.0 / 3.0;
            let rs = log_schedule(0.1 * l, 1e-4 * l, 24)?;
            let odd = seq.term(3)?;
            claims.push(Claim::close(
                "gp.odd",
                "GP slope of ν_3 is 1",
                Citation::derived("ν_3 is uniform on [0, 1/3]"),
                1.0,
                gp_slope(&odd, &rs, None, t),
                tol,
            ));
            let even = seq.term(4)?;
            claims.push(Claim::close(
                "gp.even",
                "GP slope of ν_4 is 0",
                Citation::derived("ν_4 is a point mass"),
                0.0,
                gp_slope(&even, &rs, None, t),
                1e-12,
            ));
        }
        ExampleName::Ex3 => {
            let ifs = spec.ifs()?;
            let hdim = ifs.similarity_dimension();
            let rs = log_schedule(1e-1, 1e-5, 24)?;
            claims.push(Claim::close(
                "gp.limit",
                "GP slope of the natural measure is h",
                Citation::stated("the natural measure has dimension h"),
                hdim,
                gp_slope(seq.limit(), &rs, None, t),
                tol,
            ));
            let s: f64 = ifs.ratios().iter().map(|r| r.powf(hdim + 1.0)).sum();
            let dev = worst(1..=h, |n| Ok(seq.term(n)?.total_mass() / s.powi(n as i32)), |_| 1.0);
            claims.push(Claim::close(
                "mass.terms",
                "ν_n has total mass (Σ r_i^{h+1})^n (relative deviation)",
                Citation::derived("each level multiplies the mass by Σ r_i^{h+1}"),
                0.0,
                dev,
                1e-12,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::BoxUpper,
                seq,
                h,
                Citation::stated("lim dim(ν_n) = 1 while the limit has dimension h"),
            )?);
        }
        ExampleName::Ex4 => {
            let nu = seq.term(10)?;
            let rs = log_schedule(1e-2, 1e-5, 24)?;
            claims.push(Claim::close(
                "gp.term",
                "GP slope of ν_10 below the atom spacing is 0",
                Citation::derived("ν_10 has ten atoms 1/10 apart"),
                0.0,
                gp_slope(&nu, &rs, None, t),
                1e-12,
            ));
            let rs = log_schedule(1.0, 1e-4, 24)?;
            claims.push(Claim::close(
                "gp.limit",
                "GP slope of Lebesgue measure on [0,1] is 1",
                Citation::stated("every dimension of the limit is 1"),
                1.0,
                gp_slope(seq.limit(), &rs, Some((1e-2, 1e-1)), t),
                tol,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::HausdorffUpper,
                seq,
                h,
                Citation::stated("dim(ν_n) = 0 for every n while the weak limit has dimension 1"),
            )?);
        }
        ExampleName::Ex5 => {
            let pc: PointCloud = seq.term(10)?.sample(t.samples, t.seed)?.into();
            let rs = log_schedule(1e-2, 1e-6, 24)?;
            let keep = modified_correlation_dim(&pc, 0.01, &rs, Some((1e-6, 1e-4)), Execution::auto());
            claims.push(Claim::close(
                "mc.small_delta",
                "restricted correlation slope of ν_10 with δ = 0.01 is 0",
                Citation::stated("the atom stays in any set of mass ≥ 1 − δ once δ < 1/n"),
                0.0,
                keep.map(|m| m.estimate.slope),
                tol,
            ));
            let rs = log_schedule(1e-1, 1e-4, 24)?;
            let drop = modified_correlation_dim(&pc, 0.2, &rs, None, Execution::auto());
            claims.push(Claim::close(
                "mc.large_delta",
                "restricted correlation slope of ν_10 with δ = 0.2 is 1",
                Citation::derived("discarding the atom leaves the density part"),
                1.0,
                drop.map(|m| m.estimate.slope),
                tol,
            ));
            let rs = log_schedule(1.0, 1e-4, 24)?;
            claims.push(Claim::close(
                "gp.limit",
                "GP slope of the limit is 1",
                Citation::stated("every dimension of Lebesgue measure on [0,1] is 1"),
                1.0,
                gp_slope(seq.limit(), &rs, Some((1e-2, 1e-1)), t),
                tol,
            ));
            claims.push(tv_claim(
                "tv.series",
                "1/n",
                seq,
                2..=h,
                |n| 1.0 / n as f64,
                Citation::derived("the atom and the missing slab [0, 1/n] each carry 1/n"),
                t,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::Correlation,
                seq,
                h,
                Citation::stated("dim_C(ν_n) = 0 while dim_C(ν) = 1"),
            )?);
        }
        ExampleName::Ex6 => {
            claims.push(tv_claim(
                "tv.series",
                "1/n",
                seq,
                1..=h,
                |n| 1.0 / n as f64,
                Citation::stated("‖ν_n − δ_0‖ = 1/n"),
                t,
            ));
            let nu = seq.term(10)?;
            let xs = nu.sample(t.samples, t.seed)?;
            let rs = log_schedule(1e-1, 1e-5, 24)?;
            let profile = local_dimension_profile(&nu, &xs, &rs, &[0.01, 0.99], None);
            let (lo, hi) = match &profile {
                Ok(p) => (Ok(p.estimates[0].1.slope), Ok(p.estimates[1].1.slope)),
                Err(e) => (Err(e.clone()), Err(e.clone())),
            };
            claims.push(Claim::close(
                "local.lower",
                "1% quantile of the local dimension of ν_10 is 0",
                Citation::stated("dim^L(ν_n) = 0"),
                0.0,
                lo,
                tol,
            ));
            claims.push(Claim::close(
                "local.upper",
                "99% quantile of the local dimension of ν_10 is 1",
                Citation::stated("dim^U(ν_n) = 1"),
                1.0,
                hi,
                tol,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::HausdorffUpper,
                seq,
                h,
                Citation::stated("lim dim^U(ν_n) = 1 > 0 = dim^U(δ_0)"),
            )?);
        }
        ExampleName::Ex7 => {
            let a = spec.a;
            claims.push(tv_claim(
                "tv.series",
                "a^{n+1}",
                seq,
                0..=h,
                |n| a.powi(n as i32 + 1),
                Citation::derived(
                    "ν_n and ν differ by the renormalization of the head and the missing tail, each a^{n+1}",
                ),
                t,
            ));
            let over = worst(
                0..=h,
                |n| {
                    let d = tv_distance(&seq.term(n)?, seq.limit())?;
                    let an = a.powi(n as i32 + 1);
                    Ok((d - an / (1.0 - an)).max(0.0))
                },
                |_| 0.0,
            );
            claims.push(Claim::close(
                "tv.stated_bound",
                "‖ν_n − ν‖ ≤ a^{n+1}/(1 − a^{n+1})",
                Citation::stated("‖ν_n − ν‖ = a^{n+1}/(1 − a^{n+1}), valid here as an upper bound"),
                0.0,
                over,
                t.exact,
            ));
            let n_max = ((690.0 / -a.ln()).sqrt().floor() as u64).min(h).max(1) as u32;
            let cert = concentration_certificate(seq.limit(), a, n_max);
            let dev = cert
                .as_ref()
                .map_err(|e| e.clone())
                .map(|c| c.steps.iter().map(|s| (s.exponent - 2.0 / s.n as f64).abs()).fold(0.0, f64::max));
            let decreasing = cert.as_ref().map(|c| c.decreasing).unwrap_or(false);
            claims.push(
                Claim::close(
                    "concentration.exponents",
                    format!("log(ν(B(0,r))·ν(Y_r)) / log r = 2/n at r = a^(n²), n = 1..{n_max}"),
                    Citation::derived("ν([0, a^(n²)]) = a^n, so the exponent is 2n/n² = 2/n"),
                    0.0,
                    dev,
                    1e-9,
                )
                .detail(format!("strictly decreasing: {decreasing}")),
            );
            claims.last_mut().unwrap().passed &= decreasing;
            let nu3 = seq.term(3)?;
            let rs = log_schedule(1e-5, 1e-7, 9)?;
            let slope = rs
                .iter()
                .map(|&r| Ok((r, correlation_integral_exact(&nu3, r)?.value)))
                .collect::<Result<Vec<_>>>()
                .and_then(|pts| loglog_fit(&ScalingSeries::new("exact C", pts), (1e-7, 1e-5)))
                .map(|f| f.slope);
            claims.push(Claim::close(
                "correlation.term",
                "exact C(r) of ν_3 scales with slope 1",
                Citation::stated("dim_C(ν_n) = 1"),
                1.0,
                slope,
                tol,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::Correlation,
                seq,
                h,
                Citation::stated("dim_C(ν_n) = 1 while dim_C(ν) = 0"),
            )?);
        }
        ExampleName::Ex8 => {
            let rs = log_schedule(1e-2, 1e-6, 13)?;
            let full = box_dimension_estimate(seq.limit(), &[0.0], &rs).map(|v| v[0].1.slope);
            claims.push(Claim::close(
                "box.limit",
                "box-counting slope of ν at δ = 0 is 1/2",
                Citation::stated("dim_B^U(ν) = 1/2"),
                0.5,
                full,
                tol,
            ));
            let rs = log_schedule(1e-4, 1e-6, 9)?;
            let head = box_dimension_estimate(&seq.term(h)?, &[0.0], &rs).map(|v| v[0].1.slope);
            claims.push(Claim::close(
                "box.term",
                format!("box-counting slope of ν_{h} below its atom spacing is 0"),
                Citation::stated("dim_B^U(ν_n) = 0"),
                0.0,
                head,
                1e-12,
            ));
            let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
            claims.push(tv_claim(
                "tv.series",
                "Σ_{i>n} i^{-2}",
                seq,
                1..=h,
                |n| zeta2 - (1..=n).map(|i| 1.0 / (i * i) as f64).sum::<f64>(),
                Citation::derived("ν − ν_n is the tail of the series"),
                t,
            ));
            claims.push(limit_jump(
                "dims.jump",
                Mapping::BoxUpper,
                seq,
                h,
                Citation::stated("lim dim_B^U(ν_n) = 0 < 1/2 = dim_B^U(ν)"),
            )?);
        }
    }
    Ok(())
}

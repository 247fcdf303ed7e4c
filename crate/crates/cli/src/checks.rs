//! Per-triple predicate checks and the parallel range scan.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wpp_core::homlat::{log_kodaira, Kodaira};
use wpp_core::resolution::{
    check_def13_resolution, connector_selfints, corollary_3n6, minus2_consistent, predicted_nc_selfint, scan_triples,
};
use wpp_core::rulings::{ruling_resolution, ruling_violations};
use wpp_core::{build_resolution, ruling, ChopSide, EpsSchedule, ResolutionError, ResolutionPair, Roles, RulingCase};

/// Groups of checks selectable with `--check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    All,
    /// Fullness, `(a,b,c)`-type, gap-admissibility, adjunction, `K² = 9 − n`.
    Def13,
    /// Connector self-intersections.
    Lemma32,
    /// `Σ b_i ≥ 3n − 6` and the two-(−2)-strings classification.
    Cor34,
    /// Ruling invariants and the case split.
    Prop51,
}

impl Check {
    fn includes(self, other: Check) -> bool {
        self == Check::All || self == other
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::All => "all",
            Check::Def13 => "def13",
            Check::Lemma32 => "lemma32",
            Check::Cor34 => "cor34",
            Check::Prop51 => "prop51",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub triple: [u64; 3],
    pub presentation: usize,
    pub check: Check,
    pub message: String,
}

impl Violation {
    /// Command line reproducing the failure.
    pub fn reproducer(&self) -> String {
        let [a, b, c] = self.triple;
        format!("wpp resolve {a} {b} {c} --presentation {}", self.presentation)
    }
}

/// Violations of the selected checks for one resolution.
pub fn check_resolution(r: &ResolutionPair, check: Check) -> Vec<(Check, String)> {
    let mut out = Vec::new();
    if check.includes(Check::Def13) {
        for m in r.invariant_violations() {
            out.push((Check::Def13, m));
        }
        match check_def13_resolution(r) {
            Ok(d) => {
                if !d.full {
                    out.push((Check::Def13, "not full".into()));
                }
                if !d.abc_type {
                    out.push((Check::Def13, "not of (a,b,c)-type".into()));
                }
                if !d.gap_admissible {
                    out.push((Check::Def13, "not gap-admissible".into()));
                }
            }
            Err(e) => out.push((Check::Def13, e.to_string())),
        }
        let (area, square) = adjoint(r);
        match log_kodaira(&area, square) {
            Ok(Kodaira::NegInfinity) => {}
            Ok(k) => out.push((Check::Def13, format!("log Kodaira dimension {k}"))),
            Err(e) => out.push((Check::Def13, e.to_string())),
        }
    }
    if check.includes(Check::Lemma32) {
        match connector_selfints(r) {
            Ok((_, _, nc)) => {
                let t = predicted_nc_selfint(&r.weights);
                if nc != t {
                    out.push((Check::Lemma32, format!("[N_c]² = {nc}, residue formula gives {t}")));
                }
            }
            Err(e) => out.push((Check::Lemma32, e.to_string())),
        }
    }
    if check.includes(Check::Cor34) {
        let (sum, bound, ok) = corollary_3n6(r);
        if !ok {
            out.push((Check::Cor34, format!("Σ b = {sum} < 3n − 6 = {bound}")));
        }
        match minus2_consistent(r) {
            Ok(true) => {}
            Ok(false) => out.push((Check::Cor34, "two-(−2)-strings classification mismatch".into())),
            Err(e) => out.push((Check::Cor34, e.to_string())),
        }
    }
    if check.includes(Check::Prop51) {
        match ruling(r, Roles::default()) {
            Ok(rd) => {
                for m in ruling_violations(r, &rd) {
                    out.push((Check::Prop51, m));
                }
                let nc = r.n_c.selfint;
                let want = if nc >= 0 {
                    RulingCase::EmbeddedFiber
                } else {
                    RulingCase::Unicuspidal
                };
                if rd.case != want {
                    out.push((Check::Prop51, format!("case {} with [N_c]² = {nc}", rd.case)));
                }
                if rd.case == RulingCase::Unicuspidal {
                    match ruling_resolution(r, &rd) {
                        Ok(rr) if (rr.square, rr.k_dot) == (0, -2) => {}
                        Ok(rr) => out.push((
                            Check::Prop51,
                            format!("resolved fiber has F² = {}, K·F = {}", rr.square, rr.k_dot),
                        )),
                        Err(e) => out.push((Check::Prop51, e.to_string())),
                    }
                }
            }
            Err(e) => out.push((Check::Prop51, e.to_string())),
        }
    }
    out
}

/// `([ω]·(K + [D]), (K + [D])²)` for the three strings.
pub fn adjoint(r: &ResolutionPair) -> (wpp_core::Q, i64) {
    let l = &r.lattice;
    let mut d = l.canonical.clone();
    for s in r.strings() {
        d = d.add(&s.total_class(l.rank).expect("strings carry classes"));
    }
    (r.area.area(&d), l.square(&d))
}

/// Outcome of all presentations of one triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleOutcome {
    pub triple: [u64; 3],
    pub n: usize,
    pub nc_selfint: i64,
    /// Ruling case of the first presentation.
    pub case: Option<String>,
    pub violations: Vec<Violation>,
}

/// Build and check every presentation of `(a, b, c)`.
pub fn check_triple(triple: [u64; 3], check: Check, schedule: &EpsSchedule) -> Result<TripleOutcome, ResolutionError> {
    let [a, b, c] = triple;
    let mut violations = Vec::new();
    let mut first: Option<(usize, i64, Option<String>)> = None;
    for index in 1..=6 {
        let r = match build_resolution(a, b, c, index, schedule, ChopSide::Intrinsic) {
            Ok(r) => r,
            Err(e @ ResolutionError::Arith(_)) => return Err(e),
            Err(e) => {
                violations.push(Violation {
                    triple,
                    presentation: index,
                    check: Check::All,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if first.is_none() {
            let case = ruling(&r, Roles::default()).ok().map(|rd| rd.case.to_string());
            first = Some((r.n(), r.n_c.selfint, case));
        }
        for (check, message) in check_resolution(&r, check) {
            violations.push(Violation {
                triple,
                presentation: index,
                check,
                message,
            });
        }
    }
    let (n, nc_selfint, case) = first.unwrap_or((0, 0, None));
    Ok(TripleOutcome {
        triple,
        n,
        nc_selfint,
        case,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub max_c: u64,
    pub check: Check,
    pub triples: usize,
    pub resolutions: usize,
    pub embedded_fiber: usize,
    pub unicuspidal: usize,
    pub outcomes: Vec<TripleOutcome>,
}

impl ScanSummary {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.outcomes.iter().flat_map(|o| &o.violations)
    }

    /// The violation with the smallest triple, then presentation.
    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations().next()
    }
}

/// Check every pairwise coprime triple `2 ≤ a < b < c ≤ max_c`. The result
/// is ordered by triple and does not depend on `jobs`.
pub fn scan(max_c: u64, jobs: usize, check: Check, schedule: &EpsSchedule) -> Result<ScanSummary, ResolutionError> {
    let triples = scan_triples(max_c);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ResolutionError::Precondition(e.to_string()))?;
    let outcomes: Vec<TripleOutcome> = pool.install(|| {
        triples
            .par_iter()
            .map(|&(a, b, c)| check_triple([a, b, c], check, schedule))
            .collect::<Result<_, _>>()
    })?;
    let count = |case: RulingCase| {
        let name = case.to_string();
        outcomes.iter().filter(|o| o.case.as_ref() == Some(&name)).count()
    };
    Ok(ScanSummary {
        max_c,
        check,
        triples: outcomes.len(),
        resolutions: 6 * outcomes.len(),
        embedded_fiber: count(RulingCase::EmbeddedFiber),
        unicuspidal: count(RulingCase::Unicuspidal),
        outcomes,
    })
}

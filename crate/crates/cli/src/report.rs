//! Serializable per-triple report. Rationals are written as `"p/q"` (or
//! `"p"` when integral) so that nothing passes through floating point.

use std::fmt::Write as _;
use std::time::Instant;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use wpp_core::homlat::log_kodaira;
use wpp_core::resolution::{
    check_def13_resolution, connector_selfints, corollary_3n6, minus2_consistent, predicted_nc_selfint,
    torelli_compare, TorelliOutcome,
};
use wpp_core::rulings::{boundary_cycle, ruling_resolution};
use wpp_core::{
    build_resolution, ruling, ChopSide, EpsSchedule, HClass, ResolutionPair, Roles, RulingCase, RulingData, Q,
};

use crate::checks::{adjoint, check_resolution, Check};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON schema of [`Report`], as shipped in `docs/report.schema.json`.
pub fn report_schema() -> String {
    let schema = schemars::schema_for!(Report);
    serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n"
}

pub fn rat(q: &Q) -> String {
    q.to_string()
}

fn coeffs(c: &HClass) -> Vec<i64> {
    c.coeffs.clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Residues {
    pub a_b: u64,
    pub a_c: u64,
    pub b_a: u64,
    pub b_c: u64,
    pub c_a: u64,
    pub c_b: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct StringReport {
    pub name: String,
    pub weight: u64,
    /// `p/q` read off the string in the stored orientation.
    pub fraction: String,
    /// The connector the first component touches.
    pub starts_at: String,
    pub selfints: Vec<i64>,
    pub classes: Vec<Vec<i64>>,
    pub areas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ConnectorReport {
    pub name: String,
    pub selfint: i64,
    pub class: Vec<i64>,
    pub area: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct EdgeReport {
    /// Name in the boundary cycle `A_1 … A_ka, N_b, C_1 … C_kc, N_a,
    /// B_kb … B_1, N_c`.
    pub label: String,
    /// Truncation edge `X_j` in chopping order, or the triangle side.
    pub truncation: String,
    pub direction: [i64; 2],
    pub length: String,
    pub selfint: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PolygonReport {
    pub vertices: Vec<[String; 2]>,
    pub edges: Vec<EdgeReport>,
    pub terminal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct GapReport {
    pub pair: [String; 2],
    pub value: String,
    pub classes: Vec<Vec<i64>>,
    pub lower_bound_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Def13Json {
    pub full: bool,
    pub total_length: usize,
    pub b2_minus: usize,
    pub abc_type: bool,
    /// For weights `a, b, c`: which string matched and whether it was read
    /// backwards.
    pub abc_match: Option<Vec<(String, bool)>>,
    pub gap_admissible: bool,
    pub gaps: Vec<GapReport>,
    pub adjoint_area: String,
    pub sub_toric: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Cor34Report {
    pub sum: i64,
    pub bound: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct LemmaReport {
    pub connector_selfints: [i64; 3],
    pub connector_bounds: bool,
    /// `[N_c]²` from the residue formula.
    pub nc_from_residues: i64,
    pub cor34: Cor34Report,
    pub minus2_classification: Option<bool>,
    pub log_kodaira: String,
    pub adjoint_square: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ResolvedCusp {
    pub weight_sequence: Vec<i64>,
    pub blowups: usize,
    pub class: Vec<i64>,
    pub square: i64,
    pub k_dot: i64,
    /// Self-intersections of the transformed chain.
    pub chain: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct RulingJson {
    /// Weight of the string the ruling meets.
    pub meets: String,
    pub flip: bool,
    pub nu_a: usize,
    pub nu_b: usize,
    pub case: String,
    pub p_a: i64,
    pub q_a: i64,
    pub p_b: i64,
    pub q_b: i64,
    pub cusp: Option<[String; 2]>,
    pub meet_component: Option<String>,
    pub fiber_class: Vec<i64>,
    pub selfint: i64,
    pub k_dot: i64,
    pub deltas_a: Vec<i64>,
    pub deltas_b: Vec<i64>,
    pub connector_selfint: i64,
    pub profile: Vec<(String, i64)>,
    pub resolved: Option<ResolvedCusp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PermutedRuling {
    pub meets: String,
    pub flip: bool,
    pub ruling: Option<RulingJson>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TorelliReport {
    pub against_presentation: usize,
    pub found: bool,
    pub permutation: Option<Vec<usize>>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Report {
    pub schema_version: u32,
    /// Weights in the order given.
    pub input: [u64; 3],
    /// Weights sorted `a < b < c`; every label below refers to these.
    pub triple: [u64; 3],
    pub residues: Residues,
    pub presentation: usize,
    pub eps_schedule: String,
    pub n: usize,
    pub k_squared: i64,
    pub strings: Vec<StringReport>,
    pub connectors: Vec<ConnectorReport>,
    pub polygon: PolygonReport,
    pub def13: Def13Json,
    pub lemmas: LemmaReport,
    pub ruling: Option<RulingJson>,
    pub ruling_error: Option<String>,
    pub permuted_rulings: Vec<PermutedRuling>,
    pub torelli: Option<TorelliReport>,
    pub violations: Vec<String>,
    pub timing_us: u64,
}

const NAMES: [&str; 3] = ["a", "b", "c"];

/// Boundary-cycle name of every polygon edge.
pub fn edge_labels(r: &ResolutionPair) -> Vec<String> {
    let mut out = vec![String::new(); r.polygon.edges.len()];
    for ((lab, _, _), &e) in boundary_cycle(r).iter().zip(&r.cycle) {
        out[e] = lab.to_string();
    }
    out
}

fn ruling_json(r: &ResolutionPair, rd: &RulingData) -> RulingJson {
    let resolved = if rd.case == RulingCase::Unicuspidal {
        ruling_resolution(r, rd).ok().map(|rr| {
            let cfg = &rr.resolved.config;
            ResolvedCusp {
                weight_sequence: rr.resolved.weights.m.clone(),
                blowups: rr.blowups,
                class: coeffs(&rr.resolved.resolved),
                square: rr.square,
                k_dot: rr.k_dot,
                chain: rr
                    .resolved
                    .path
                    .iter()
                    .map(|&i| cfg.lattice.square(&cfg.classes[i]))
                    .collect(),
            }
        })
    } else {
        None
    };
    RulingJson {
        meets: NAMES[rd.roles.third].into(),
        flip: rd.roles.flip,
        nu_a: rd.nu_a,
        nu_b: rd.nu_b,
        case: rd.case.to_string(),
        p_a: rd.pa,
        q_a: rd.qa,
        p_b: rd.pb,
        q_b: rd.qb,
        cusp: rd.cusp.map(|(x, y)| [x.to_string(), y.to_string()]),
        meet_component: rd.meet_component.map(|c| c.to_string()),
        fiber_class: coeffs(&rd.f),
        selfint: rd.selfint,
        k_dot: rd.k_dot,
        deltas_a: rd.deltas_a.clone(),
        deltas_b: rd.deltas_b.clone(),
        connector_selfint: rd.connector_selfint,
        profile: rd.profile.iter().map(|(c, v)| (c.to_string(), *v)).collect(),
        resolved,
    }
}

/// Run the full pipeline on one presentation and collect everything into a
/// report.
pub fn build_report(input: [u64; 3], presentation: usize, eps: &str) -> Result<Report, CliError> {
    let start = Instant::now();
    let schedule: EpsSchedule = eps
        .parse()
        .map_err(|e: wpp_core::PolygonError| CliError::Input(e.to_string()))?;
    if !(1..=6).contains(&presentation) {
        return Err(CliError::Input(format!(
            "presentation must be in 1..=6, got {presentation}"
        )));
    }
    let [a, b, c] = input;
    let r = build_resolution(a, b, c, presentation, &schedule, ChopSide::Intrinsic).map_err(CliError::from)?;
    let w = &r.weights;
    let l = &r.lattice;

    let starts = ["N_c", "N_a", "N_b"];
    let strings = r
        .strings()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let classes = s.classes.clone().unwrap_or_default();
            let (p, q) = wpp_core::resolution::string_fraction(&s.entries()).unwrap_or((0, 0));
            StringReport {
                name: format!("S_{}", NAMES[t]),
                weight: w.weights()[t],
                fraction: format!("{p}/{q}"),
                starts_at: starts[t].into(),
                selfints: s.selfints.clone(),
                areas: classes.iter().map(|x| rat(&r.area.area(x))).collect(),
                classes: classes.iter().map(coeffs).collect(),
            }
        })
        .collect();
    let connectors = r
        .connectors()
        .iter()
        .enumerate()
        .map(|(t, n)| ConnectorReport {
            name: format!("N_{}", NAMES[t]),
            selfint: n.selfint,
            class: coeffs(&n.class),
            area: rat(&n.area),
        })
        .collect();
    let labels = edge_labels(&r);
    let polygon = PolygonReport {
        vertices: r.polygon.vertices.iter().map(|p| [rat(&p.x), rat(&p.y)]).collect(),
        edges: r
            .polygon
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeReport {
                label: labels[i].clone(),
                truncation: e.origin.to_string(),
                direction: [e.dir.0, e.dir.1],
                length: rat(&e.length),
                selfint: r.edge_selfints[i],
            })
            .collect(),
        terminal: format!("{:?}", r.terminal),
    };

    let d = check_def13_resolution(&r).map_err(CliError::from)?;
    let def13 = Def13Json {
        full: d.full,
        total_length: d.total_length,
        b2_minus: d.b2_minus,
        abc_type: d.abc_type,
        abc_match: d.abc_match.map(|m| {
            (0..3)
                .map(|t| (format!("S_{}", NAMES[m.perm[t]]), m.reversed[t]))
                .collect()
        }),
        gap_admissible: d.gap_admissible,
        gaps: d
            .gaps
            .iter()
            .map(|g| GapReport {
                pair: [format!("S_{}", NAMES[g.pair.0]), format!("S_{}", NAMES[g.pair.1])],
                value: rat(&g.value),
                classes: g.classes.iter().map(coeffs).collect(),
                lower_bound_only: g.lower_bound_only,
            })
            .collect(),
        adjoint_area: rat(&d.adjoint_area),
        sub_toric: d.sub_toric,
    };

    let (cor_sum, cor_bound, cor_ok) = corollary_3n6(&r);
    let (adj_area, adj_square) = adjoint(&r);
    let lemmas = LemmaReport {
        connector_selfints: [r.n_a.selfint, r.n_b.selfint, r.n_c.selfint],
        connector_bounds: connector_selfints(&r).is_ok(),
        nc_from_residues: predicted_nc_selfint(w),
        cor34: Cor34Report {
            sum: cor_sum,
            bound: cor_bound,
            holds: cor_ok,
        },
        minus2_classification: minus2_consistent(&r).ok(),
        log_kodaira: log_kodaira(&adj_area, adj_square).map_or_else(|e| e.to_string(), |k| k.to_string()),
        adjoint_square: adj_square,
    };

    let (ruling_out, ruling_error) = match ruling(&r, Roles::default()) {
        Ok(rd) => (Some(ruling_json(&r, &rd)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let permuted_rulings = Roles::all()
        .into_iter()
        .filter(|roles| !roles.is_standard())
        .map(|roles| match ruling(&r, roles) {
            Ok(rd) => PermutedRuling {
                meets: NAMES[roles.third].into(),
                flip: roles.flip,
                ruling: Some(ruling_json(&r, &rd)),
                error: None,
            },
            Err(e) => PermutedRuling {
                meets: NAMES[roles.third].into(),
                flip: roles.flip,
                ruling: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let torelli = if presentation == 1 {
        None
    } else {
        let r1 = build_resolution(a, b, c, 1, &schedule, ChopSide::Intrinsic).map_err(CliError::from)?;
        Some(match torelli_compare(&r1, &r).map_err(CliError::from)? {
            TorelliOutcome::Found { perm } => TorelliReport {
                against_presentation: 1,
                found: true,
                permutation: Some(perm),
                reason: None,
            },
            TorelliOutcome::NotFoundWithinFamily { reason } => TorelliReport {
                against_presentation: 1,
                found: false,
                permutation: None,
                reason: Some(reason),
            },
        })
    };

    let violations = check_resolution(&r, Check::All)
        .into_iter()
        .map(|(c, m)| format!("{c}: {m}"))
        .collect();

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        input,
        triple: w.weights(),
        residues: Residues {
            a_b: w.a_b,
            a_c: w.a_c,
            b_a: w.b_a,
            b_c: w.b_c,
            c_a: w.c_a,
            c_b: w.c_b,
        },
        presentation,
        eps_schedule: eps.to_string(),
        n: r.n(),
        k_squared: l.square(&l.canonical),
        strings,
        connectors,
        polygon,
        def13,
        lemmas,
        ruling: ruling_out,
        ruling_error,
        permuted_rulings,
        torelli,
        violations,
        timing_us: start.elapsed().as_micros() as u64,
    })
}

impl Report {
    /// Plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let [a, b, c] = self.triple;
        let _ = writeln!(
            s,
            "CP({a},{b},{c})  presentation T{}  n = {}  K² = {}",
            self.presentation, self.n, self.k_squared
        );
        let r = &self.residues;
        let _ = writeln!(
            s,
            "residues  a_b={} a_c={} b_a={} b_c={} c_a={} c_b={}",
            r.a_b, r.a_c, r.b_a, r.b_c, r.c_a, r.c_b
        );
        for st in &self.strings {
            let _ = writeln!(
                s,
                "{}  {:?}  reads {} from {}",
                st.name, st.selfints, st.fraction, st.starts_at
            );
        }
        for n in &self.connectors {
            let _ = writeln!(s, "{}  square {}  area {}", n.name, n.selfint, n.area);
        }
        let d = &self.def13;
        let _ = writeln!(
            s,
            "full {}  (a,b,c)-type {}  gap-admissible {}  adjoint area {}",
            d.full, d.abc_type, d.gap_admissible, d.adjoint_area
        );
        for g in &d.gaps {
            let _ = writeln!(s, "  gap({}, {}) = {}", g.pair[0], g.pair[1], g.value);
        }
        let m = &self.lemmas;
        let _ = writeln!(
            s,
            "connector squares {:?}  Σb = {} ≥ {}: {}  log Kodaira {}",
            m.connector_selfints, m.cor34.sum, m.cor34.bound, m.cor34.holds, m.log_kodaira
        );
        match (&self.ruling, &self.ruling_error) {
            (Some(rj), _) => {
                let _ = writeln!(
                    s,
                    "ruling meeting S_{}: ν_a = {}, ν_b = {}, {}, (p,q) = ({},{})",
                    rj.meets, rj.nu_a, rj.nu_b, rj.case, rj.p_a, rj.q_a
                );
                let _ = writeln!(s, "  Δ_a {:?}", rj.deltas_a);
                let _ = writeln!(s, "  Δ_b {:?}", rj.deltas_b);
                if let Some([x, y]) = &rj.cusp {
                    let _ = writeln!(s, "  ({},{})-cusp at {x} ∩ {y}", rj.p_a, rj.q_a);
                }
                if let Some(m) = &rj.meet_component {
                    let _ = writeln!(s, "  embedded fiber meeting {m}");
                }
                if let Some(res) = &rj.resolved {
                    let _ = writeln!(
                        s,
                        "  resolved by {} blowups {:?}: F² = {}, K·F = {}",
                        res.blowups, res.weight_sequence, res.square, res.k_dot
                    );
                }
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "ruling: {e}");
            }
            _ => {}
        }
        if let Some(t) = &self.torelli {
            let _ = writeln!(
                s,
                "isometry to T{}: {}",
                t.against_presentation,
                if t.found { "found" } else { "not found within family" }
            );
        }
        if self.violations.is_empty() {
            let _ = writeln!(s, "all checks pass");
        }
        for v in &self.violations {
            let _ = writeln!(s, "VIOLATION {v}");
        }
        let _ = writeln!(s, "time {} µs", self.timing_us);
        s
    }
}

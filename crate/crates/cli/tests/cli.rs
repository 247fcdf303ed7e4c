//! End-to-end behaviour of the `wpp` binary and the report/scan library.

use std::process::{Command, Output};

use proptest::prelude::*;
use wpp_cli::checks::{scan, Check};
use wpp_cli::report::{build_report, Report, SCHEMA_VERSION};
use wpp_cli::{CliError, EPS_ENV};
use wpp_core::resolution::scan_triples;
use wpp_core::EpsSchedule;

fn wpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpp"))
        .args(args)
        .env_remove(EPS_ENV)
        .output()
        .expect("run wpp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn resolve_235_json() {
    let o = wpp(&["resolve", "2", "3", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert_eq!(r.n, 6);
    assert_eq!(r.k_squared, 3);
    let selfints: Vec<Vec<i64>> = r.strings.iter().map(|s| s.selfints.clone()).collect();
    assert_eq!(selfints, vec![vec![-2], vec![-3], vec![-2, -2, -2, -2]]);
    assert_eq!((r.residues.c_a, r.residues.c_b), (4, 4));
    assert_eq!(r.polygon.edges.len(), 9);
    assert!(r.violations.is_empty());
}

#[test]
fn resolve_text_is_default() {
    let o = wpp(&["resolve", "11", "13", "14"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("(2,3)-cusp"), "{s}");
    assert!(serde_json::from_str::<serde_json::Value>(&s).is_err());
}

#[test]
fn invalid_input_exits_2() {
    let cases: [&[&str]; 6] = [
        &["resolve", "2", "4", "6"],
        &["resolve", "1", "1", "5"],
        &["resolve", "2", "3", "5", "--presentation", "7"],
        &["resolve", "2", "3", "5", "--eps", "geom:1/4"],
        &["render", "1", "1", "5", "--what", "polygon"],
        &["render", "2", "3", "5", "--what", "nothing"],
    ];
    for args in cases {
        let o = wpp(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).is_empty(), "{args:?}");
    }
    assert!(stderr(&wpp(&["resolve", "2", "4", "6"])).contains("NotPairwiseCoprime"));
    assert!(stderr(&wpp(&["render", "1", "1", "5"])).contains("DegenerateWeight"));
}

#[test]
fn violations_map_to_exit_3() {
    assert_eq!(CliError::Violation("x".into()).exit_code(), 3);
    assert_eq!(CliError::Input("x".into()).exit_code(), 2);
}

#[test]
fn eps_schedule_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_wpp"))
        .args(["resolve", "2", "3", "5", "--json"])
        .env(EPS_ENV, "geom:1/5:1/2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.eps_schedule, "geom:1/5:1/2");
    let d: Report = serde_json::from_str(&stdout(&wpp(&["resolve", "2", "3", "5", "--json"]))).unwrap();
    assert_eq!(d.eps_schedule, "default");
    // same strings and classes, different areas
    assert_eq!(
        r.strings.iter().map(|s| &s.classes).collect::<Vec<_>>(),
        d.strings.iter().map(|s| &s.classes).collect::<Vec<_>>()
    );
    assert_ne!(r.polygon.vertices, d.polygon.vertices);
}

fn triple_strategy() -> impl Strategy<Value = ([u64; 3], usize)> {
    let triples = scan_triples(25);
    (0..triples.len(), 1usize..=6).prop_map(move |(i, p)| {
        let (a, b, c) = triples[i];
        ([a, b, c], p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn report_json_round_trips((triple, presentation) in triple_strategy()) {
        let r = build_report(triple, presentation, "default").unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}

#[test]
fn scan_max_5_enumerates_coprime_triples() {
    let s = scan(5, 1, Check::All, &EpsSchedule::default()).unwrap();
    let triples: Vec<[u64; 3]> = s.outcomes.iter().map(|o| o.triple).collect();
    // (3,4,5) is pairwise coprime as well as (2,3,5)
    assert_eq!(triples, vec![[2, 3, 5], [3, 4, 5]]);
    assert_eq!(s.violations().count(), 0);
}

#[test]
fn scan_is_independent_of_job_count() {
    let schedule = EpsSchedule::default();
    let one = scan(18, 1, Check::All, &schedule).unwrap();
    let three = scan(18, 3, Check::All, &schedule).unwrap();
    assert_eq!(one, three);
    let a = wpp(&["scan", "--max-c", "14", "--jobs", "1", "--json"]);
    let b = wpp(&["scan", "--max-c", "14", "--jobs", "4", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scan_30_connectors_and_rulings() {
    let schedule = EpsSchedule::default();
    let l = scan(30, 0, Check::Lemma32, &schedule).unwrap();
    assert_eq!(l.violations().count(), 0);
    let p = scan(30, 0, Check::Prop51, &schedule).unwrap();
    assert_eq!(p.violations().count(), 0);
    assert_eq!(p.embedded_fiber + p.unicuspidal, p.triples);
    // the case split follows the sign of [N_c]²
    for o in &p.outcomes {
        let want = if o.nc_selfint >= 0 {
            "embedded-fiber"
        } else {
            "unicuspidal"
        };
        assert_eq!(o.case.as_deref(), Some(want), "{:?}", o.triple);
    }
}

#[test]
fn scan_table_and_exit_code() {
    let o = wpp(&["scan", "--max-c", "8", "--check", "cor34"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("triples "), "{s}");
    assert!(s.contains("(2,3,5)") && s.contains("(3,5,7)"));
}

#[test]
fn svg_polygon_is_well_formed() {
    let o = wpp(&["render", "2", "3", "5", "--what", "polygon", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    let desc = root.children().find(|n| n.has_tag_name("desc")).unwrap();
    assert!(desc.text().unwrap().starts_with("scale "));
    let poly = root.descendants().find(|n| n.has_tag_name("polygon")).unwrap();
    assert_eq!(poly.attribute("points").unwrap().split_whitespace().count(), 9);
    let labels: Vec<&str> = root
        .descendants()
        .filter(|n| n.has_tag_name("text"))
        .filter_map(|n| n.text())
        .collect();
    for want in ["A_1 (-2)", "B_1 (-3)", "C_4 (-2)", "N_a (-1)", "N_b (-1)", "N_c (0)"] {
        assert!(labels.contains(&want), "{want} missing from {labels:?}");
    }
}

#[test]
fn every_svg_scene_parses() {
    for what in ["polygon", "strings", "ruling"] {
        for t in [["2", "3", "5"], ["11", "13", "14"], ["5", "7", "9"]] {
            let o = wpp(&["render", t[0], t[1], t[2], "--what", what]);
            assert_eq!(o.status.code(), Some(0), "{what} {t:?}: {}", stderr(&o));
            roxmltree::Document::parse(&stdout(&o)).unwrap_or_else(|e| panic!("{what} {t:?}: {e}"));
        }
    }
}

#[test]
fn tikz_ruling_is_standalone() {
    let o = wpp(&["render", "11", "13", "14", "--what", "ruling", "--format", "tikz"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("\\documentclass[tikz]{standalone}"));
    assert!(s.trim_end().ends_with("\\end{document}"));
    assert_eq!(
        s.matches("\\begin{tikzpicture}").count(),
        s.matches("\\end{tikzpicture}").count()
    );
    assert!(s.contains("$(2,3)$-cusp at $C_{1}$ $\\cap$ $C_{2}$"), "{s}");
    let open = s.matches('{').count();
    assert_eq!(open, s.matches('}').count());
}

#[test]
fn tikz_polygon_uses_exact_coordinates() {
    let o = wpp(&["render", "2", "3", "5", "--format", "tikz"]);
    let s = stdout(&o);
    assert!(s.contains("\\draw"), "{s}");
    // vertices of the chopped triangle have non-integral rational coordinates
    assert!(s.contains("/"), "{s}");
}

#[test]
fn shipped_schema_is_current() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    let shipped = std::fs::read_to_string(path).unwrap();
    assert_eq!(
        shipped,
        wpp_cli::report::report_schema(),
        "regenerate with `wpp schema`"
    );
    let schema: serde_json::Value = serde_json::from_str(&shipped).unwrap();
    let report = serde_json::to_value(build_report([2, 3, 5], 1, "default").unwrap()).unwrap();
    let props = schema["properties"].as_object().unwrap();
    for key in report.as_object().unwrap().keys() {
        assert!(props.contains_key(key), "{key} missing from schema");
    }
}

//! SVG and TikZ output for resolved polygons, boundary strings and rulings.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use wpp_core::rulings::boundary_cycle;
use wpp_core::{ruling, Component, ResolutionPair, Roles, RulingCase, Q};

use crate::report::edge_labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum What {
    Polygon,
    Strings,
    Ruling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Svg,
    Tikz,
}

/// A coordinate: exact for polygon vertices, otherwise a layout value.
#[derive(Debug, Clone)]
enum Coord {
    Exact(Q, Q),
    Layout(f64, f64),
}

impl Coord {
    fn approx(&self) -> (f64, f64) {
        match self {
            Coord::Exact(x, y) => (x.to_f64().unwrap_or(f64::NAN), y.to_f64().unwrap_or(f64::NAN)),
            Coord::Layout(x, y) => (*x, *y),
        }
    }
}

#[derive(Debug, Clone)]
enum Item {
    Polygon(Vec<Coord>),
    Line { from: Coord, to: Coord, dashed: bool },
    Dot(Coord),
    Node { at: Coord, dashed: bool },
    Cusp(Coord),
    Text { at: Coord, text: String },
}

/// Drawing in abstract units, scaled to fit on output.
struct Scene {
    items: Vec<Item>,
    title: String,
}

fn ascii(s: &str) -> String {
    s.replace('−', "-").replace('∩', "cap").replace('²', "^2")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Scene {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        let mut add = |c: &Coord| {
            let (x, y) = c.approx();
            b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
        };
        for it in &self.items {
            match it {
                Item::Polygon(ps) => ps.iter().for_each(&mut add),
                Item::Line { from, to, .. } => {
                    add(from);
                    add(to);
                }
                Item::Dot(c) | Item::Node { at: c, .. } | Item::Cusp(c) | Item::Text { at: c, .. } => add(c),
            }
        }
        b
    }

    fn svg(&self) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let extent = (x1 - x0).max(y1 - y0).max(1e-9);
        let scale = 480.0 / extent;
        let margin = 60.0;
        let w = (x1 - x0) * scale + 2.0 * margin;
        let h = (y1 - y0) * scale + 2.0 * margin;
        let px = |c: &Coord| {
            let (x, y) = c.approx();
            ((x - x0) * scale + margin, (y1 - y) * scale + margin)
        };
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#
        );
        let _ = writeln!(s, "<title>{}</title>", xml_escape(&self.title));
        let _ = writeln!(
            s,
            "<desc>scale {scale:.6} px per unit; origin ({x0:.6}, {y0:.6}) at ({margin}, {:.2})</desc>",
            h - margin
        );
        for it in &self.items {
            match it {
                Item::Polygon(ps) => {
                    let pts: Vec<String> = ps
                        .iter()
                        .map(|c| {
                            let (x, y) = px(c);
                            format!("{x:.4},{y:.4}")
                        })
                        .collect();
                    let _ = writeln!(
                        s,
                        r##"<polygon points="{}" fill="#eef3fb" stroke="black" stroke-width="1.5"/>"##,
                        pts.join(" ")
                    );
                }
                Item::Line { from, to, dashed } => {
                    let ((ax, ay), (bx, by)) = (px(from), px(to));
                    let dash = if *dashed { r#" stroke-dasharray="5,4""# } else { "" };
                    let _ = writeln!(
                        s,
                        r#"<line x1="{ax:.4}" y1="{ay:.4}" x2="{bx:.4}" y2="{by:.4}" stroke="black"{dash}/>"#
                    );
                }
                Item::Dot(c) => {
                    let (x, y) = px(c);
                    let _ = writeln!(s, r#"<circle cx="{x:.4}" cy="{y:.4}" r="2.5" fill="black"/>"#);
                }
                Item::Node { at, dashed } => {
                    let (x, y) = px(at);
                    let dash = if *dashed { r#" stroke-dasharray="3,3""# } else { "" };
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{x:.4}" cy="{y:.4}" r="6" fill="white" stroke="black"{dash}/>"#
                    );
                }
                Item::Cusp(c) => {
                    let (x, y) = px(c);
                    let _ = writeln!(
                        s,
                        r#"<path d="M {:.4} {:.4} L {x:.4} {y:.4} L {:.4} {:.4}" fill="none" stroke="red" stroke-width="2"/>"#,
                        x - 8.0,
                        y - 10.0,
                        x + 8.0,
                        y - 10.0
                    );
                }
                Item::Text { at, text } => {
                    let (x, y) = px(at);
                    let _ = writeln!(
                        s,
                        r#"<text x="{x:.4}" y="{y:.4}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                        xml_escape(text)
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }

    fn tikz(&self) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let extent = (x1 - x0).max(y1 - y0).max(1e-9);
        let unit = 12.0 / extent;
        let pt = |c: &Coord| match c {
            Coord::Exact(x, y) => format!("({{{}}},{{{}}})", x, y),
            Coord::Layout(x, y) => format!("({x:.4},{y:.4})"),
        };
        let mut s = String::new();
        let _ = writeln!(s, "\\documentclass[tikz]{{standalone}}");
        let _ = writeln!(s, "% {}", ascii(&self.title));
        let _ = writeln!(s, "\\begin{{document}}");
        let _ = writeln!(s, "\\begin{{tikzpicture}}[x={unit:.6}cm,y={unit:.6}cm]");
        for it in &self.items {
            match it {
                Item::Polygon(ps) => {
                    let pts: Vec<String> = ps.iter().map(pt).collect();
                    let _ = writeln!(s, "  \\draw[thick,fill=blue!5] {} -- cycle;", pts.join(" -- "));
                }
                Item::Line { from, to, dashed } => {
                    let style = if *dashed { "[dashed]" } else { "" };
                    let _ = writeln!(s, "  \\draw{style} {} -- {};", pt(from), pt(to));
                }
                Item::Dot(c) => {
                    let _ = writeln!(s, "  \\fill {} circle[radius=1.5pt];", pt(c));
                }
                Item::Node { at, dashed } => {
                    let style = if *dashed { "dashed," } else { "" };
                    let _ = writeln!(s, "  \\draw[{style}fill=white] {} circle[radius=3pt];", pt(at));
                }
                Item::Cusp(c) => {
                    let _ = writeln!(
                        s,
                        "  \\draw[red,thick] {} ++(-4pt,5pt) -- {} -- ++(4pt,5pt);",
                        pt(c),
                        pt(c)
                    );
                }
                Item::Text { at, text } => {
                    let _ = writeln!(s, "  \\node[font=\\scriptsize] at {} {{{}}};", pt(at), tex_label(text));
                }
            }
        }
        let _ = writeln!(s, "\\end{{tikzpicture}}");
        let _ = writeln!(s, "\\end{{document}}");
        s
    }
}

/// `N_a (-1)` becomes `$N_{a}$ $(-1)$`, `(2,3)-cusp` becomes `$(2,3)$-cusp`.
fn tex_label(s: &str) -> String {
    s.replace('−', "-")
        .replace('²', "^2")
        .split(' ')
        .map(|w| {
            if w == "∩" {
                "$\\cap$".to_string()
            } else if let Some((x, sub)) = w.split_once('_') {
                format!("${x}_{{{sub}}}$")
            } else if let Some((group, rest)) = w.strip_prefix('(').and_then(|t| t.split_once(')')) {
                format!("$({group})${rest}")
            } else if w.chars().any(|c| c.is_ascii_digit()) {
                format!("${w}$")
            } else {
                w.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn polygon_scene(r: &ResolutionPair) -> Scene {
    let p = &r.polygon;
    let labels = edge_labels(r);
    let mut items = vec![Item::Polygon(
        p.vertices
            .iter()
            .map(|v| Coord::Exact(v.x.clone(), v.y.clone()))
            .collect(),
    )];
    let m = p.vertices.len();
    let (x0, y0, x1, y1) = Scene {
        items: items.clone(),
        title: String::new(),
    }
    .bounds();
    let offset = 0.05 * (x1 - x0).max(y1 - y0);
    for (i, e) in p.edges.iter().enumerate() {
        let (a, b) = (&p.vertices[i], &p.vertices[(i + 1) % m]);
        items.push(Item::Dot(Coord::Exact(a.x.clone(), a.y.clone())));
        let mx = ((&a.x + &b.x) / Q::from_integer(2.into())).to_f64().unwrap_or(0.0);
        let my = ((&a.y + &b.y) / Q::from_integer(2.into())).to_f64().unwrap_or(0.0);
        let (nx, ny) = (e.normal.0 as f64, e.normal.1 as f64);
        let len = (nx * nx + ny * ny).sqrt();
        items.push(Item::Text {
            at: Coord::Layout(mx - offset * nx / len, my - offset * ny / len),
            text: format!("{} ({})", labels[i], r.edge_selfints[i]),
        });
    }
    let [a, b, c] = r.weights.weights();
    Scene {
        items,
        title: format!(
            "resolved moment polygon of CP({a},{b},{c}), presentation T{}",
            r.presentation
        ),
    }
}

/// Spheres of the boundary cycle with their squares, and their positions.
type Layout = (Vec<(Component, i64)>, Vec<(f64, f64)>);

/// Boundary cycle on a circle: one node per sphere, chords at intersections.
fn cycle_layout(r: &ResolutionPair) -> Layout {
    let cyc: Vec<(Component, i64)> = boundary_cycle(r).into_iter().map(|(c, _, s)| (c, s)).collect();
    let m = cyc.len();
    let pos = (0..m)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            (10.0 * t.cos(), 10.0 * t.sin())
        })
        .collect();
    (cyc, pos)
}

fn strings_items(r: &ResolutionPair) -> (Vec<Item>, Layout) {
    let (cyc, pos) = cycle_layout(r);
    let m = cyc.len();
    let mut items = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        let dashed = matches!(cyc[i].0, Component::N(_)) || matches!(cyc[j].0, Component::N(_));
        items.push(Item::Line {
            from: Coord::Layout(pos[i].0, pos[i].1),
            to: Coord::Layout(pos[j].0, pos[j].1),
            dashed,
        });
    }
    for (i, (c, s)) in cyc.iter().enumerate() {
        let (x, y) = pos[i];
        items.push(Item::Node {
            at: Coord::Layout(x, y),
            dashed: matches!(c, Component::N(_)),
        });
        items.push(Item::Text {
            at: Coord::Layout(1.18 * x, 1.18 * y),
            text: format!("{c} ({s})"),
        });
    }
    (items, (cyc, pos))
}

fn strings_scene(r: &ResolutionPair) -> Scene {
    let (items, _) = strings_items(r);
    let [a, b, c] = r.weights.weights();
    let s = |v: &[i64]| format!("{v:?}");
    Scene {
        items,
        title: format!(
            "boundary of the resolution of CP({a},{b},{c}): S_a {} S_b {} S_c {}",
            s(&r.s_a.selfints),
            s(&r.s_b.selfints),
            s(&r.s_c.selfints)
        ),
    }
}

fn ruling_scene(r: &ResolutionPair) -> Scene {
    let (mut items, (cyc, pos)) = strings_items(r);
    let [a, b, c] = r.weights.weights();
    let title = format!("ruling of the resolution of CP({a},{b},{c})");
    let Ok(rd) = ruling(r, Roles::default()) else {
        return Scene { items, title };
    };
    let idx = |c: &Component| cyc.iter().position(|x| x.0 == *c).expect("label present");
    let fiber = Coord::Layout(0.0, 0.0);
    for (c, v) in &rd.profile {
        if *v == 0 {
            continue;
        }
        let (x, y) = pos[idx(c)];
        items.push(Item::Line {
            from: fiber.clone(),
            to: Coord::Layout(0.85 * x, 0.85 * y),
            dashed: false,
        });
        if *v > 1 {
            items.push(Item::Text {
                at: Coord::Layout(0.6 * x, 0.6 * y),
                text: format!("{v}"),
            });
        }
    }
    items.push(Item::Dot(fiber.clone()));
    let label = match (rd.case, rd.cusp) {
        (RulingCase::Unicuspidal, Some((x, y))) => {
            let (p, q) = (pos[idx(&x)], pos[idx(&y)]);
            items.push(Item::Cusp(Coord::Layout(0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1))));
            format!("F: ({},{})-cusp at {x} ∩ {y}", rd.pa, rd.qa)
        }
        _ => match rd.meet_component {
            Some(m) => format!("F: embedded fiber meeting {m}"),
            None => "F".into(),
        },
    };
    items.push(Item::Text {
        at: Coord::Layout(0.0, -1.2),
        text: label,
    });
    Scene {
        items,
        title: format!("{title}: nu_a = {}, nu_b = {}, {}", rd.nu_a, rd.nu_b, rd.case),
    }
}

pub fn render(r: &ResolutionPair, what: What, format: Format) -> String {
    let scene = match what {
        What::Polygon => polygon_scene(r),
        What::Strings => strings_scene(r),
        What::Ruling => ruling_scene(r),
    };
    match format {
        Format::Svg => scene.svg(),
        Format::Tikz => scene.tikz(),
    }
}

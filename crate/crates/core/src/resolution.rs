//! The symplectic minimal resolution of `CP(a,b,c)` as a divisor with
//! homology data, and the checks run against it: the three-string
//! conditions, connector self-intersections, the `3n − 6` bound, the
//! two-(−2)-strings classification and a restricted Torelli comparison.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

use crate::arith::{make_weight_triple, neg_cf_expand, neg_cf_fraction, ArithError, WeightTriple};
use crate::homlat::{
    adjunction_defect, gap_from_set, AreaForm, ExceptionalSet, HClass, Lattice, LatticeError, OracleBounds,
};
use crate::polygon::{
    assign_classes_ranked, presentation, resolve_triangle, ChopSide, EdgeOrigin, EpsSchedule, LatticePolygon,
    PolygonError, Terminal, Q,
};
use crate::strings::OrientedString;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("lemma violated: {0}")]
    LemmaViolated(String),
}

/// A boundary sphere that is not part of the three strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub class: HClass,
    pub selfint: i64,
    pub area: Q,
    /// Index of its edge in the resolved polygon.
    pub edge: usize,
}

/// The resolved surface `CP² # n CP̄²` with the divisor `S_a ∪ S_b ∪ S_c`
/// and the three connecting spheres, for weights sorted `a < b < c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionPair {
    pub weights: WeightTriple,
    /// The weights as given by the caller.
    pub input: [u64; 3],
    pub presentation: usize,
    pub side: ChopSide,
    pub polygon: LatticePolygon,
    pub terminal: Terminal,
    /// CP²-type lattice of rank `n + 1`.
    pub lattice: Lattice,
    pub area: AreaForm,
    /// Class and self-intersection of every edge, indexed like `polygon.edges`.
    pub edge_classes: Vec<HClass>,
    pub edge_selfints: Vec<i64>,
    /// Edge indices around the boundary:
    /// `A_1 … A_ka, N_b, C_1 … C_kc, N_a, B_kb … B_1, N_c`.
    pub cycle: Vec<usize>,
    /// `A_1, …, A_ka` (starting next to `N_c`).
    pub s_a: OrientedString,
    /// `B_kb, …, B_1` (starting next to `N_a`).
    pub s_b: OrientedString,
    /// `C_1, …, C_kc` (starting next to `N_b`).
    pub s_c: OrientedString,
    pub n_a: Connector,
    pub n_b: Connector,
    pub n_c: Connector,
}

impl ResolutionPair {
    /// Number of blowups: `b₂⁻` of the resolution.
    pub fn n(&self) -> usize {
        self.lattice.rank - 1
    }

    pub fn strings(&self) -> [&OrientedString; 3] {
        [&self.s_a, &self.s_b, &self.s_c]
    }

    pub fn connectors(&self) -> [&Connector; 3] {
        [&self.n_a, &self.n_b, &self.n_c]
    }

    pub fn k_squared(&self) -> i64 {
        self.lattice.square(&self.lattice.canonical)
    }

    pub fn divisor(&self) -> DivisorTriple {
        DivisorTriple {
            lattice: self.lattice.clone(),
            area: self.area.clone(),
            strings: [self.s_a.clone(), self.s_b.clone(), self.s_c.clone()],
        }
    }

    /// Invariants that must hold for every resolution; each violation is
    /// returned as a message.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let l = &self.lattice;
        let total: usize = self.strings().iter().map(|s| s.len()).sum();
        if total != self.n() {
            out.push(format!("string lengths sum to {total}, b2- = {}", self.n()));
        }
        if self.k_squared() != 9 - self.n() as i64 {
            out.push(format!("K² = {} but n = {}", self.k_squared(), self.n()));
        }
        let mut sum = HClass::zero(l.rank);
        for c in &self.edge_classes {
            sum = sum.add(c);
        }
        if sum.scale(-1) != l.canonical {
            out.push("−K differs from the total boundary class".into());
        }
        for c in &self.edge_classes {
            match adjunction_defect(l, c) {
                Ok(0) => {}
                Ok(d) => out.push(format!("adjunction defect {d} for {c}")),
                Err(e) => out.push(e.to_string()),
            }
        }
        let w = &self.weights;
        let want = [(w.a, w.a_b), (w.b, w.b_c), (w.c, w.c_a)];
        for (s, (p, q)) in self.strings().iter().zip(want) {
            if string_fraction(&s.entries()) != Some((p as i64, q as i64)) {
                out.push(format!("string {:?} does not read {p}/{q}", s.selfints));
            }
        }
        out
    }
}

/// `p/q` of a Hirzebruch–Jung string given by its `b`-entries.
pub fn string_fraction(entries: &[i64]) -> Option<(i64, i64)> {
    if entries.is_empty() || entries.iter().any(|&b| b < 2) {
        return None;
    }
    let (p, q) = neg_cf_fraction(entries);
    Some((p.try_into().ok()?, q.try_into().ok()?))
}

/// Sort the weights, returning the sorted triple.
pub fn canonical_weights(a: u64, b: u64, c: u64) -> Result<WeightTriple, ArithError> {
    let mut v = [a, b, c];
    v.sort_unstable();
    make_weight_triple(v[0], v[1], v[2])
}

fn find_side(p: &LatticePolygon, label: char) -> Result<usize, ResolutionError> {
    p.edges
        .iter()
        .position(|e| e.origin == EdgeOrigin::Side(label))
        .ok_or_else(|| ResolutionError::Precondition(format!("side N_{label} missing")))
}

/// Resolve the three corners of the `index`-th moment triangle and read off
/// the divisor.
pub fn build_resolution(
    a: u64,
    b: u64,
    c: u64,
    index: usize,
    schedule: &EpsSchedule,
    side: ChopSide,
) -> Result<ResolutionPair, ResolutionError> {
    let w = canonical_weights(a, b, c)?;
    let tri = presentation(&w, index)?;
    let poly = resolve_triangle(&tri, schedule, side)?;
    let m = poly.num_edges();
    // walk the boundary from N_c towards the A-string
    let nc = find_side(&poly, 'C')?;
    let fwd = matches!(poly.edges[(nc + 1) % m].origin, EdgeOrigin::Chop('A', _));
    let cycle: Vec<usize> = (1..=m)
        .map(|s| if fwd { (nc + s) % m } else { (nc + m - s) % m })
        .collect();
    let chain = |label: char| -> Vec<usize> {
        cycle
            .iter()
            .copied()
            .filter(|&i| matches!(poly.edges[i].origin, EdgeOrigin::Chop(l, _) if l == label))
            .collect()
    };
    let a_edges = chain('A');
    let b_edges = chain('B');
    let c_edges = chain('C');
    // the boundary must read A…, N_b, C…, N_a, B…, N_c
    let nb = find_side(&poly, 'B')?;
    let na = find_side(&poly, 'A')?;
    let mut expect = a_edges.clone();
    expect.push(nb);
    expect.extend(&c_edges);
    expect.push(na);
    expect.extend(&b_edges);
    expect.push(nc);
    if expect != cycle {
        return Err(ResolutionError::LemmaViolated(
            "boundary cycle is not A, N_b, C, N_a, B, N_c".into(),
        ));
    }
    let mut rank = vec![0; m];
    for (pos, &i) in cycle.iter().enumerate() {
        rank[i] = pos;
    }
    let asg = assign_classes_ranked(&poly, &rank)?;
    let change = asg
        .lattice
        .cp2_change()
        .ok_or_else(|| ResolutionError::Precondition("terminal model has no CP² basis".into()))?;
    let lattice = change.target();
    let area = change.area(&asg.area);
    let edge_classes: Vec<HClass> = asg.classes.iter().map(|x| change.class(x)).collect();
    let string = |edges: &[usize]| {
        OrientedString::with_classes(
            edges.iter().map(|&i| asg.selfints[i]).collect(),
            edges.iter().map(|&i| edge_classes[i].clone()).collect(),
        )
    };
    let connector = |i: usize| Connector {
        class: edge_classes[i].clone(),
        selfint: asg.selfints[i],
        area: poly.edges[i].length.clone(),
        edge: i,
    };
    Ok(ResolutionPair {
        weights: w,
        input: [a, b, c],
        presentation: index,
        side,
        s_a: string(&a_edges),
        s_b: string(&b_edges),
        s_c: string(&c_edges),
        n_a: connector(na),
        n_b: connector(nb),
        n_c: connector(nc),
        terminal: asg.terminal.clone(),
        lattice,
        area,
        edge_selfints: asg.selfints.clone(),
        edge_classes,
        cycle,
        polygon: poly,
    })
}

/// `([N_a]², [N_b]², [N_c]²)`, failing if the first two are not −1 or the
/// third is below −1.
pub fn connector_selfints(r: &ResolutionPair) -> Result<(i64, i64, i64), ResolutionError> {
    let s = (r.n_a.selfint, r.n_b.selfint, r.n_c.selfint);
    if s.0 != -1 || s.1 != -1 || s.2 < -1 {
        return Err(ResolutionError::LemmaViolated(format!(
            "connector self-intersections {s:?} for {:?}",
            r.weights.weights()
        )));
    }
    Ok(s)
}

/// `[N_c]² = −t` for the unique integer `t` with `0 < t·ab − a_b·b + c < ab`.
pub fn predicted_nc_selfint(w: &WeightTriple) -> i64 {
    let ab = (w.a * w.b) as i128;
    let shift = c_minus(w);
    // smallest t with t·ab + shift > 0
    let t = Integer::div_floor(&(-shift), &ab) + 1;
    -(t as i64)
}

fn c_minus(w: &WeightTriple) -> i128 {
    w.c as i128 - (w.a_b * w.b) as i128
}

/// Three disjoint strings in a CP²-type lattice with an area form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTriple {
    pub lattice: Lattice,
    pub area: AreaForm,
    pub strings: [OrientedString; 3],
}

impl DivisorTriple {
    fn total(&self, i: usize) -> HClass {
        self.strings[i]
            .total_class(self.lattice.rank)
            .expect("strings carry classes")
    }

    pub fn total_classes(&self) -> Vec<Vec<HClass>> {
        self.strings
            .iter()
            .map(|s| s.classes.clone().expect("strings carry classes"))
            .collect()
    }

    /// `[ω]·(K + [D])`.
    pub fn adjoint_area(&self) -> Q {
        let mut d = self.lattice.canonical.clone();
        for i in 0..3 {
            d = d.add(&self.total(i));
        }
        self.area.area(&d)
    }

    /// Whether `e` is a connecting log exceptional class between strings
    /// `i` and `j`: `E² = K·E = −1`, positive area, `E·[S_i], E·[S_j] ≥ 1`
    /// and `E·[S_k] ≥ 0`.
    pub fn is_connecting(&self, e: &HClass, i: usize, j: usize) -> bool {
        let l = &self.lattice;
        if l.square(e) != -1 || l.k_dot(e) != -1 || !self.area.area(e).is_positive() {
            return false;
        }
        (0..3).all(|t| {
            let d = l.dot(e, &self.total(t));
            if t == i || t == j {
                d >= 1
            } else {
                d >= 0
            }
        })
    }
}

/// Where exceptional gaps come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapSource {
    /// Candidate classes per string pair `(i, j)`; each is verified and
    /// dropped if it does not connect the pair.
    Candidates(Vec<((usize, usize), HClass)>),
    /// Run the bounded exceptional-class search.
    Oracle(OracleBounds),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapValue {
    pub pair: (usize, usize),
    pub value: Q,
    pub classes: Vec<HClass>,
    /// The search could have missed larger classes.
    pub lower_bound_only: bool,
}

/// How the strings were matched to `a/a_b`, `b/b_c`, `c/c_a`: string
/// `perm[t]` is read with orientation `reversed[t]` for weight `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbcMatch {
    pub perm: [usize; 3],
    pub reversed: [bool; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Def13Report {
    pub full: bool,
    pub total_length: usize,
    pub b2_minus: usize,
    pub abc_type: bool,
    pub abc_match: Option<AbcMatch>,
    pub gap_admissible: bool,
    /// Gaps for string pairs (0,1), (0,2), (1,2).
    pub gaps: Vec<GapValue>,
    pub adjoint_area: Q,
    pub sub_toric: bool,
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Match three strings to the residue fractions of `w` over all label
/// permutations and orientations.
pub fn abc_type(strings: &[Vec<i64>; 3], w: &WeightTriple) -> Option<AbcMatch> {
    let want = [(w.a, w.a_b), (w.b, w.b_c), (w.c, w.c_a)];
    let reads = |s: &Vec<i64>, rev: bool| -> Option<(i64, i64)> {
        let mut b: Vec<i64> = s.iter().map(|x| -x).collect();
        if rev {
            b.reverse();
        }
        string_fraction(&b)
    };
    for perm in PERMS {
        let mut reversed = [false; 3];
        let ok = (0..3).all(|t| {
            let (p, q) = (want[t].0 as i64, want[t].1 as i64);
            [false, true].into_iter().any(|rev| {
                let hit = reads(&strings[perm[t]], rev) == Some((p, q));
                if hit {
                    reversed[t] = rev;
                }
                hit
            })
        });
        if ok {
            return Some(AbcMatch { perm, reversed });
        }
    }
    None
}

/// Evaluate fullness, `(a,b,c)`-type and gap-admissibility. `sub_toric` is
/// passed through since it is known by construction only.
pub fn check_def13(
    d: &DivisorTriple,
    w: &WeightTriple,
    gaps: &GapSource,
    sub_toric: bool,
) -> Result<Def13Report, ResolutionError> {
    let (_, neg, _) = d.lattice.inertia();
    let total_length: usize = d.strings.iter().map(|s| s.len()).sum();
    let selfints = [
        d.strings[0].selfints.clone(),
        d.strings[1].selfints.clone(),
        d.strings[2].selfints.clone(),
    ];
    let abc_match = if d.strings.iter().all(|s| s.is_hj()) {
        abc_type(&selfints, w)
    } else {
        None
    };
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut values = Vec::with_capacity(3);
    for &(i, j) in &pairs {
        let gv = match gaps {
            GapSource::Candidates(cands) => {
                let mut classes: Vec<HClass> = cands
                    .iter()
                    .filter(|(p, e)| (*p == (i, j) || *p == (j, i)) && d.is_connecting(e, i, j))
                    .map(|(_, e)| e.clone())
                    .collect();
                classes.sort();
                classes.dedup();
                let set = ExceptionalSet {
                    classes,
                    touches_bound: false,
                    area_capped: false,
                };
                let g = gap_from_set(&d.area, &set);
                GapValue {
                    pair: (i, j),
                    value: g.value,
                    classes: set.classes,
                    lower_bound_only: true,
                }
            }
            GapSource::Oracle(bounds) => {
                let comps = d.total_classes();
                let set = crate::homlat::connecting_log_exceptional(&d.lattice, &d.area, &comps, i, j, bounds)?;
                let g = gap_from_set(&d.area, &set);
                GapValue {
                    pair: (i, j),
                    value: g.value,
                    classes: set.classes,
                    lower_bound_only: g.lower_bound_only,
                }
            }
        };
        values.push(gv);
    }
    let adjoint = d.adjoint_area();
    let gap = |i: usize, j: usize| -> &Q {
        let key = if i < j { (i, j) } else { (j, i) };
        &values.iter().find(|g| g.pair == key).expect("all pairs").value
    };
    let gap_admissible = (0..3).all(|i| {
        let others: Vec<usize> = (0..3).filter(|&t| t != i).collect();
        adjoint < -(gap(i, others[0]) + gap(i, others[1]))
    });
    Ok(Def13Report {
        full: total_length == neg,
        total_length,
        b2_minus: neg,
        abc_type: abc_match.is_some(),
        abc_match,
        gap_admissible,
        gaps: values,
        adjoint_area: adjoint,
        sub_toric,
    })
}

/// The connector candidates for a resolution: `N_a` joins `S_b, S_c`, `N_b`
/// joins `S_a, S_c`, `N_c` joins `S_a, S_b`.
pub fn connector_candidates(r: &ResolutionPair) -> GapSource {
    GapSource::Candidates(vec![
        ((1, 2), r.n_a.class.clone()),
        ((0, 2), r.n_b.class.clone()),
        ((0, 1), r.n_c.class.clone()),
    ])
}

pub fn check_def13_resolution(r: &ResolutionPair) -> Result<Def13Report, ResolutionError> {
    check_def13(&r.divisor(), &r.weights, &connector_candidates(r), true)
}

/// Outcome of the two-(−2)-strings classification for the strings at
/// weights `x > y` with third weight `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minus2Classification {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub both_minus2: bool,
    /// `k` with `z = kxy − x − y`, when it exists.
    pub k: Option<u64>,
    /// Predicted self-intersections of the string at `z`.
    pub predicted_third: Option<Vec<i64>>,
}

fn is_minus2_string(p: u64, q: u64) -> bool {
    q == p - 1
}

/// Classify the strings at `x` and `y` (`x > y > 1`) in the resolution of
/// `CP(x, y, z)`.
pub fn two_minus2_strings(x: u64, y: u64, z: u64) -> Result<Minus2Classification, ResolutionError> {
    if !(x > y && y > 1) {
        return Err(ResolutionError::Precondition(format!("need x > y > 1, got ({x}, {y})")));
    }
    let w = make_weight_triple(x, y, z)?;
    // the string at x reads x/x_y, at y reads y/y_z
    let both = is_minus2_string(w.a, w.a_b) && is_minus2_string(w.b, w.b_c);
    let xy = (x * y) as u128;
    let zz = (z + x + y) as u128;
    let k = if zz.is_multiple_of(xy) {
        Some((zz / xy) as u64)
    } else {
        None
    };
    let predicted_third = k.map(|k| {
        let (x, y, k) = (x as i64, y as i64, k as i64);
        if k >= 2 {
            vec![-x, -k, -y]
        } else if y != 2 {
            vec![1 - x, 1 - y]
        } else {
            vec![2 - x]
        }
    });
    Ok(Minus2Classification {
        x,
        y,
        z,
        both_minus2: both,
        k,
        predicted_third,
    })
}

/// `c = k·a·b − a − b`, rejected when it is not a valid third weight.
pub fn minus2_third_weight(a: u64, b: u64, k: u64) -> Result<u64, ResolutionError> {
    let c = (k * a * b) as i128 - a as i128 - b as i128;
    if c <= 1 {
        return Err(ArithError::DegenerateWeight(a, b, c.max(0) as u64).into());
    }
    let c = c as u64;
    make_weight_triple(a, b, c)?;
    Ok(c)
}

/// Check the classification against the resolved strings for all three
/// choices of the third weight.
pub fn minus2_consistent(r: &ResolutionPair) -> Result<bool, ResolutionError> {
    let w = &r.weights;
    let by_weight = [(w.a, &r.s_a), (w.b, &r.s_b), (w.c, &r.s_c)];
    let all2 = |s: &OrientedString| s.selfints.iter().all(|&x| x == -2);
    for z in 0..3 {
        let mut xy: Vec<usize> = (0..3).filter(|&t| t != z).collect();
        xy.sort_by_key(|&t| std::cmp::Reverse(by_weight[t].0));
        let (x, y) = (xy[0], xy[1]);
        let cls = two_minus2_strings(by_weight[x].0, by_weight[y].0, by_weight[z].0)?;
        let actual = all2(by_weight[x].1) && all2(by_weight[y].1);
        if cls.both_minus2 != actual || actual != cls.k.is_some() {
            return Ok(false);
        }
        if let Some(pred) = cls.predicted_third {
            let s = &by_weight[z].1.selfints;
            let mut rev = s.clone();
            rev.reverse();
            if &pred != s && pred != rev {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(Σ b-entries, 3n − 6)` and whether the first is at least the second.
pub fn corollary_3n6(r: &ResolutionPair) -> (i64, i64, bool) {
    let sum: i64 = r.strings().iter().flat_map(|s| s.entries()).sum();
    let bound = 3 * r.n() as i64 - 6;
    (sum, bound, sum >= bound)
}

/// Result of searching the restricted isometry family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorelliOutcome {
    /// `perm[i]` is the image of exceptional basis vector `i` (0-based).
    Found {
        perm: Vec<usize>,
    },
    NotFoundWithinFamily {
        reason: String,
    },
}

/// Look for a permutation of the exceptional basis vectors (fixing `H`)
/// that carries the areas and every divisor component class of `r1` to those
/// of `r2`.
pub fn torelli_compare(r1: &ResolutionPair, r2: &ResolutionPair) -> Result<TorelliOutcome, ResolutionError> {
    if r1.weights != r2.weights {
        return Err(ResolutionError::Precondition("resolutions of different triples".into()));
    }
    let not_found = |s: &str| Ok(TorelliOutcome::NotFoundWithinFamily { reason: s.into() });
    if r1.lattice.rank != r2.lattice.rank {
        return not_found("ranks differ");
    }
    let comps = |r: &ResolutionPair| -> Vec<HClass> {
        r.strings()
            .iter()
            .flat_map(|s| s.classes.clone().expect("classes"))
            .collect()
    };
    let (c1, c2) = (comps(r1), comps(r2));
    if c1.len() != c2.len() {
        return not_found("component counts differ");
    }
    if r1.area.values[0] != r2.area.values[0] || c1.iter().zip(&c2).any(|(x, y)| x.coeffs[0] != y.coeffs[0]) {
        return not_found("H-coefficients or area of H differ");
    }
    // signature of e_i: its coefficient in every component, plus its area
    let signature = |cs: &[HClass], area: &AreaForm, i: usize| -> (Vec<i64>, Q) {
        (cs.iter().map(|c| c.coeffs[i]).collect(), area.values[i].clone())
    };
    let rank = r1.lattice.rank;
    let mut pool: BTreeMap<(Vec<i64>, Q), Vec<usize>> = BTreeMap::new();
    for i in 1..rank {
        pool.entry(signature(&c2, &r2.area, i)).or_default().push(i);
    }
    let mut perm = vec![0; rank - 1];
    for i in 1..rank {
        match pool.get_mut(&signature(&c1, &r1.area, i)).and_then(|v| v.pop()) {
            Some(j) => perm[i - 1] = j - 1,
            None => return not_found("no exceptional vector with matching pairings and area"),
        }
    }
    Ok(TorelliOutcome::Found { perm })
}

/// All pairwise coprime `2 ≤ a < b < c ≤ max_c`, in lexicographic order.
pub fn scan_triples(max_c: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for c in 4..=max_c {
        for b in 3..c {
            if b.gcd(&c) != 1 {
                continue;
            }
            for a in 2..b {
                if a.gcd(&b) == 1 && a.gcd(&c) == 1 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Lengths `(k_a, k_b, k_c)` of the three strings, from the residues alone.
pub fn string_lengths(w: &WeightTriple) -> (usize, usize, usize) {
    let len = |p: u64, q: u64| neg_cf_expand(p as i64, q as i64).map(|x| x.entries.len()).unwrap_or(0);
    (len(w.a, w.a_b), len(w.b, w.b_c), len(w.c, w.c_a))
}

/// Number of blowups `n = k_a + k_b + k_c`.
pub fn blowup_count(w: &WeightTriple) -> usize {
    let (x, y, z) = string_lengths(w);
    x + y + z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(a: u64, b: u64, c: u64, t: usize) -> ResolutionPair {
        build_resolution(a, b, c, t, &EpsSchedule::default(), ChopSide::Intrinsic).unwrap()
    }

    #[test]
    fn resolution_235() {
        let r = res(2, 3, 5, 1);
        assert_eq!(r.n(), 6);
        assert_eq!(r.s_a.selfints, vec![-2]);
        assert_eq!(r.s_b.selfints, vec![-3]);
        assert_eq!(r.s_c.selfints, vec![-2, -2, -2, -2]);
        assert_eq!(r.k_squared(), 3);
        assert!(r.invariant_violations().is_empty(), "{:?}", r.invariant_violations());
        assert_eq!(connector_selfints(&r).unwrap(), (-1, -1, 0));
        assert_eq!(predicted_nc_selfint(&r.weights), 0);
        assert_eq!(corollary_3n6(&r), (13, 12, true));
    }

    #[test]
    fn resolution_11_13_14() {
        let r = res(14, 11, 13, 1);
        assert_eq!(r.input, [14, 11, 13]);
        assert_eq!(r.n(), 12);
        assert_eq!(r.s_a.selfints, vec![-2, -3, -2, -2]);
        assert_eq!(r.s_b.selfints, vec![-2, -2, -2, -2, -2, -3]);
        assert_eq!(r.s_c.selfints, vec![-3, -5]);
        assert_eq!(r.k_squared(), -3);
        assert_eq!(connector_selfints(&r).unwrap(), (-1, -1, -1));
        assert_eq!(corollary_3n6(&r), (30, 30, true));
    }

    #[test]
    fn all_presentations_agree() {
        for (a, b, c) in [(2, 3, 5), (3, 5, 7), (11, 13, 14), (2, 5, 9)] {
            let base = res(a, b, c, 1);
            for t in 2..=6 {
                let r = res(a, b, c, t);
                assert!(r.invariant_violations().is_empty());
                assert_eq!(r.s_a.selfints, base.s_a.selfints);
                assert_eq!(r.s_b.selfints, base.s_b.selfints);
                assert_eq!(r.s_c.selfints, base.s_c.selfints);
                assert_eq!(
                    (r.n_a.selfint, r.n_b.selfint, r.n_c.selfint),
                    (base.n_a.selfint, base.n_b.selfint, base.n_c.selfint)
                );
                assert_eq!(r.n_a.area, base.n_a.area);
                assert!(matches!(
                    torelli_compare(&base, &r).unwrap(),
                    TorelliOutcome::Found { .. }
                ));
            }
        }
    }

    #[test]
    fn conditions_hold_on_resolution() {
        let r = res(11, 13, 14, 1);
        let rep = check_def13_resolution(&r).unwrap();
        assert!(rep.full && rep.abc_type && rep.gap_admissible && rep.sub_toric);
        assert_eq!(rep.abc_match.unwrap().perm, [0, 1, 2]);
        assert_eq!(rep.abc_match.unwrap().reversed, [false; 3]);
        let sum = &r.n_a.area + &r.n_b.area + &r.n_c.area;
        assert_eq!(rep.adjoint_area, -sum);
        // gap for (S_a, S_b) comes from N_c, which is exceptional here
        assert_eq!(rep.gaps[0].classes, vec![r.n_c.class.clone()]);

        let r = res(2, 3, 5, 1);
        let rep = check_def13_resolution(&r).unwrap();
        assert!(rep.gaps[0].classes.is_empty());
        assert!(rep.full && rep.abc_type && rep.gap_admissible);
    }

    #[test]
    fn conditions_fail_on_bad_strings() {
        let r = res(2, 3, 5, 1);
        let mut d = r.divisor();
        d.strings[2] = OrientedString::with_classes(vec![], vec![]);
        let rep = check_def13(&d, &r.weights, &connector_candidates(&r), false).unwrap();
        assert!(!rep.full);
        assert!(!rep.abc_type);

        // areas are read from the form, not assumed: doubling the form
        // doubles the adjoint area
        let mut d = r.divisor();
        for v in d.area.values.iter_mut() {
            *v = &*v * crate::polygon::q_int(2);
        }
        let rep = check_def13(&d, &r.weights, &connector_candidates(&r), true).unwrap();
        let base = check_def13_resolution(&r).unwrap();
        assert_eq!(rep.adjoint_area, &base.adjoint_area * crate::polygon::q_int(2));

        // a candidate that does not connect is dropped
        let bogus = GapSource::Candidates(vec![((0, 1), r.n_a.class.clone())]);
        let rep = check_def13(&r.divisor(), &r.weights, &bogus, true).unwrap();
        assert!(rep.gaps.iter().all(|g| g.classes.is_empty()));
    }

    #[test]
    fn minus2_examples() {
        assert_eq!(minus2_third_weight(3, 2, 2).unwrap(), 7);
        assert_eq!(minus2_third_weight(5, 3, 1).unwrap(), 7);
        assert!(minus2_third_weight(3, 2, 1).is_err());
        let c = two_minus2_strings(3, 2, 7).unwrap();
        assert!(c.both_minus2);
        assert_eq!(c.k, Some(2));
        assert_eq!(c.predicted_third, Some(vec![-3, -2, -2]));
        let c = two_minus2_strings(5, 3, 7).unwrap();
        assert_eq!(c.predicted_third, Some(vec![-4, -2]));
        let r = res(2, 3, 7, 1);
        assert!(minus2_consistent(&r).unwrap());
        let mut third = r.s_c.selfints.clone();
        if third != vec![-3, -2, -2] {
            third.reverse();
        }
        assert_eq!(third, vec![-3, -2, -2]);
        let r = res(3, 5, 7, 1);
        assert!(minus2_consistent(&r).unwrap());
        let s = &r.s_c.selfints;
        assert!(s == &vec![-4, -2] || s == &vec![-2, -4]);
    }

    #[test]
    fn scan_enumeration() {
        assert_eq!(scan_triples(5), vec![(2, 3, 5), (3, 4, 5)]);
        assert_eq!(scan_triples(7).len(), 8);
        let w = make_weight_triple(11, 13, 14).unwrap();
        assert_eq!(string_lengths(&w), (4, 6, 2));
        assert_eq!(blowup_count(&w), 12);
    }

    #[test]
    fn torelli_rejects_mixed_triples() {
        let r1 = res(2, 3, 5, 1);
        let r2 = res(2, 3, 7, 1);
        assert!(torelli_compare(&r1, &r2).is_err());
        assert!(matches!(
            torelli_compare(&r1, &r1).unwrap(),
            TorelliOutcome::Found { .. }
        ));
    }
}

//! Affine rulings on a minimal resolution: the truncation indices where the
//! combined strings stop being negative definite, the fiber classes built
//! from them, the embedded/unicuspidal case split and the resolution of the
//! cusp.

use std::fmt;

use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

use crate::arith::weight_sequence;
use crate::homlat::HClass;
use crate::resolution::ResolutionPair;
use crate::strings::{
    fiber_class, is_negative_definite, resolution_fiber_class, DivisorConfig, OrientedString, ResolvedFiber,
    StringError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulingError {
    #[error("no truncation of the {0} string fails to be negative definite")]
    NoSignChange(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    String(#[from] StringError),
}

/// A boundary component: a string member (1-based, as numbered along the
/// boundary cycle) or a connector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    A(usize),
    B(usize),
    C(usize),
    /// Connector opposite the string with this index (0 = a, 1 = b, 2 = c).
    N(usize),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::A(i) => write!(f, "A_{i}"),
            Component::B(i) => write!(f, "B_{i}"),
            Component::C(i) => write!(f, "C_{i}"),
            Component::N(t) => write!(f, "N_{}", ['a', 'b', 'c'][*t]),
        }
    }
}

fn member(string: usize, i: usize) -> Component {
    match string {
        0 => Component::A(i),
        1 => Component::B(i),
        _ => Component::C(i),
    }
}

/// Which string the ruling meets, and in which direction the boundary is
/// read. The default is the ruling meeting `S_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    /// Index (0 = a, 1 = b, 2 = c) of the string playing the role of `S_c`.
    pub third: usize,
    /// Read the boundary cycle backwards.
    pub flip: bool,
}

impl Default for Roles {
    fn default() -> Self {
        Roles { third: 2, flip: false }
    }
}

impl Roles {
    pub fn is_standard(&self) -> bool {
        *self == Roles::default()
    }

    pub fn all() -> Vec<Roles> {
        (0..3)
            .flat_map(|third| [false, true].into_iter().map(move |flip| Roles { third, flip }))
            .collect()
    }
}

/// An oriented chain of boundary components with their classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedString {
    pub string: OrientedString,
    pub labels: Vec<Component>,
}

impl CombinedString {
    fn truncate(&self, len: usize) -> CombinedString {
        let classes = self.string.classes.as_ref().map(|c| c[..len].to_vec());
        CombinedString {
            string: OrientedString {
                selfints: self.string.selfints[..len].to_vec(),
                classes,
            },
            labels: self.labels[..len].to_vec(),
        }
    }
}

/// The boundary cycle with labels: `A_1 … A_ka, N_b, C_1 … C_kc, N_a,
/// B_kb … B_1, N_c`.
pub fn boundary_cycle(r: &ResolutionPair) -> Vec<(Component, HClass, i64)> {
    let mut out = Vec::with_capacity(r.cycle.len());
    let (ka, kb, kc) = (r.s_a.len(), r.s_b.len(), r.s_c.len());
    let labels: Vec<Component> = (1..=ka)
        .map(Component::A)
        .chain([Component::N(1)])
        .chain((1..=kc).map(Component::C))
        .chain([Component::N(0)])
        .chain((1..=kb).rev().map(Component::B))
        .chain([Component::N(2)])
        .collect();
    for (lab, &e) in labels.into_iter().zip(&r.cycle) {
        out.push((lab, r.edge_classes[e].clone(), r.edge_selfints[e]));
    }
    out
}

/// The two combined strings for the given roles. With the default roles
/// these are `S_ac = A_1 … A_ka, N_b, C_1 … C_kc` and
/// `S_bc = B_1 … B_kb, N_a, C_kc … C_1`.
pub fn combined_strings(r: &ResolutionPair, roles: Roles) -> (CombinedString, CombinedString) {
    let cyc = boundary_cycle(r);
    let m = cyc.len();
    // rotate so the cycle starts right after the connector opposite `third`
    let start = cyc
        .iter()
        .position(|(l, _, _)| *l == Component::N(roles.third))
        .expect("connector present");
    let mut seq: Vec<(Component, HClass, i64)> = (1..m).map(|s| cyc[(start + s) % m].clone()).collect();
    if roles.flip {
        seq.reverse();
    }
    let third_pos: Vec<usize> = seq
        .iter()
        .enumerate()
        .filter(|(_, (l, _, _))| is_member_of(l, roles.third))
        .map(|(i, _)| i)
        .collect();
    let (first, last) = (third_pos[0], *third_pos.last().expect("non-empty string"));
    let build = |items: Vec<(Component, HClass, i64)>| -> CombinedString {
        CombinedString {
            string: OrientedString::with_classes(
                items.iter().map(|x| x.2).collect(),
                items.iter().map(|x| x.1.clone()).collect(),
            ),
            labels: items.iter().map(|x| x.0).collect(),
        }
    };
    let ac = build(seq[..=last].to_vec());
    let mut bc: Vec<_> = seq[first..].to_vec();
    bc.reverse();
    (ac, build(bc))
}

fn is_member_of(l: &Component, string: usize) -> bool {
    matches!(
        (l, string),
        (Component::A(_), 0) | (Component::B(_), 1) | (Component::C(_), 2)
    )
}

fn string_index(l: &Component) -> Option<usize> {
    match l {
        Component::A(i) | Component::B(i) | Component::C(i) => Some(*i),
        Component::N(_) => None,
    }
}

/// `(ν_a, ν_b)` as indices into the third string, counted along `S_ac`.
pub fn nu_indices(ac: &CombinedString, bc: &CombinedString) -> Result<(usize, usize), RulingError> {
    let kc = ac.labels.iter().rev().take_while(|l| string_index(l).is_some()).count();
    let head_ac = ac.labels.len() - kc;
    let head_bc = bc.labels.len() - kc;
    let nu_a = (1..=kc)
        .find(|&nu| !is_negative_definite(&ac.string.selfints[..head_ac + nu]))
        .ok_or(RulingError::NoSignChange("first"))?;
    // S_bc^{≥ν} has the head plus the last kc − ν + 1 members
    let nu_b = (1..=kc)
        .rev()
        .find(|&nu| !is_negative_definite(&bc.string.selfints[..head_bc + kc - nu + 1]))
        .ok_or(RulingError::NoSignChange("second"))?;
    Ok((nu_a, nu_b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RulingCase {
    EmbeddedFiber,
    Unicuspidal,
}

impl fmt::Display for RulingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RulingCase::EmbeddedFiber => write!(f, "embedded-fiber"),
            RulingCase::Unicuspidal => write!(f, "unicuspidal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulingData {
    pub roles: Roles,
    pub nu_a: usize,
    pub nu_b: usize,
    /// `F_a`, built from the first combined string.
    pub f: HClass,
    /// `F_b`, built from the second combined string.
    pub f_b: HClass,
    pub pa: i64,
    pub qa: i64,
    pub pb: i64,
    pub qb: i64,
    pub case: RulingCase,
    /// The node `C_{ν_a} ∩ C_{ν_b}` in the unicuspidal case.
    pub cusp: Option<(Component, Component)>,
    /// `C_{ν_a+1}` in the embedded-fiber case.
    pub meet_component: Option<Component>,
    pub selfint: i64,
    pub k_dot: i64,
    pub deltas_a: Vec<i64>,
    pub deltas_b: Vec<i64>,
    /// `F_a · S` for every boundary component `S`, in cycle order.
    pub profile: Vec<(Component, i64)>,
    /// Self-intersection of the connector the ruling crosses.
    pub connector_selfint: i64,
}

/// Build the fiber classes and classify the ruling meeting the third string.
pub fn ruling(r: &ResolutionPair, roles: Roles) -> Result<RulingData, RulingError> {
    let (ac, bc) = combined_strings(r, roles);
    let (nu_a, nu_b) = nu_indices(&ac, &bc)?;
    let kc = ac.labels.iter().rev().take_while(|l| string_index(l).is_some()).count();
    let len_a = ac.labels.len() - kc + nu_a;
    let len_b = bc.labels.len() - kc + (kc - nu_b + 1);
    let l = &r.lattice;
    let fa = fiber_class(l, &ac.truncate(len_a).string, len_a)?;
    let fb = fiber_class(l, &bc.truncate(len_b).string, len_b)?;
    let (pa, qa) = fa
        .pq
        .ok_or_else(|| RulingError::Precondition("no sign change at ν_a".into()))?;
    let (pb, qb) = fb
        .pq
        .ok_or_else(|| RulingError::Precondition("no sign change at ν_b".into()))?;
    let case = if nu_b == nu_a + 1 {
        RulingCase::Unicuspidal
    } else {
        RulingCase::EmbeddedFiber
    };
    let third = member(roles.third, 0);
    let c_at = |i: usize| match third {
        Component::A(_) => Component::A(i),
        Component::B(_) => Component::B(i),
        _ => Component::C(i),
    };
    let cyc = boundary_cycle(r);
    let profile = cyc.iter().map(|(lab, cls, _)| (*lab, l.dot(&fa.class, cls))).collect();
    let connector_selfint = cyc
        .iter()
        .find(|(lab, _, _)| *lab == Component::N(roles.third))
        .map(|x| x.2)
        .expect("connector present");
    Ok(RulingData {
        roles,
        nu_a,
        nu_b,
        pa,
        qa,
        pb,
        qb,
        case,
        cusp: (case == RulingCase::Unicuspidal).then(|| (c_at(nu_a), c_at(nu_b))),
        meet_component: (case == RulingCase::EmbeddedFiber).then(|| c_at(nu_a + 1)),
        selfint: fa.square,
        k_dot: fa.k_dot,
        deltas_a: fa.deltas[..=len_a].to_vec(),
        deltas_b: fb.deltas[..=len_b].to_vec(),
        f: fa.class,
        f_b: fb.class,
        profile,
        connector_selfint,
    })
}

/// Every property the ruling must satisfy, as violation messages.
pub fn ruling_violations(r: &ResolutionPair, rd: &RulingData) -> Vec<String> {
    let mut out = Vec::new();
    let diff = rd.nu_b as i64 - rd.nu_a as i64;
    if !(diff == 1 || diff == 2) {
        out.push(format!("ν_b − ν_a = {diff}"));
    }
    if rd.f != rd.f_b {
        out.push("F_a != F_b".into());
    }
    match rd.case {
        RulingCase::EmbeddedFiber => {
            if rd.connector_selfint < 0 {
                out.push(format!("embedded fiber with connector square {}", rd.connector_selfint));
            }
            if (rd.pa, rd.qa, rd.pb, rd.qb) != (0, 1, 0, 1) {
                out.push(format!(
                    "embedded fiber with (p,q) = ({}, {}), ({}, {})",
                    rd.pa, rd.qa, rd.pb, rd.qb
                ));
            }
        }
        RulingCase::Unicuspidal => {
            if rd.connector_selfint != -1 {
                out.push(format!("unicuspidal with connector square {}", rd.connector_selfint));
            }
            if (rd.pa, rd.qa) != (rd.qb, rd.pb) {
                out.push("(p_a, q_a) != (q_b, p_b)".into());
            }
        }
    }
    if rd.pa.gcd(&rd.qa) != 1 {
        out.push(format!("({}, {}) not coprime", rd.pa, rd.qa));
    }
    if rd.selfint != rd.pa * rd.qa {
        out.push("F² != p q".into());
    }
    if rd.k_dot != -rd.pa - rd.qa - 1 {
        out.push("K·F != −p − q − 1".into());
    }
    if let Ok(ws) = weight_sequence(rd.pa, rd.qa) {
        let s: i64 = ws.m.iter().map(|m| m * m).sum();
        if s != rd.selfint {
            out.push("F² != Σ m_i²".into());
        }
    }
    let third = rd.roles.third;
    let c = |i: usize| member(third, i);
    for (lab, v) in &rd.profile {
        let want = if *lab == c(rd.nu_a) {
            rd.pa
        } else if *lab == c(rd.nu_a + 1) {
            rd.qa
        } else if *lab == Component::N(third) {
            1
        } else {
            0
        };
        if *v != want {
            out.push(format!("F·{lab} = {v}, expected {want}"));
        }
    }
    if !r.area.area(&rd.f).is_positive() {
        out.push("F has non-positive area".into());
    }
    out
}

/// The cusp blown up along `W(p_a, q_a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulingResolution {
    pub resolved: ResolvedFiber,
    pub blowups: usize,
    pub square: i64,
    pub k_dot: i64,
}

/// Blow up the cusp node of a unicuspidal ruling and return the resolved
/// fiber class, checking that it meets the boundary only in the last
/// exceptional sphere and the crossed connector.
pub fn ruling_resolution(r: &ResolutionPair, rd: &RulingData) -> Result<RulingResolution, RulingError> {
    if rd.case != RulingCase::Unicuspidal {
        return Err(RulingError::Precondition("ruling is not unicuspidal".into()));
    }
    let (ac, _) = combined_strings(r, rd.roles);
    let cyc = boundary_cycle(r);
    let labels: Vec<String> = cyc.iter().map(|x| x.0.to_string()).collect();
    let classes: Vec<HClass> = cyc.iter().map(|x| x.1.clone()).collect();
    // order the configuration so the first combined string is a prefix path
    let pos = |lab: &Component| cyc.iter().position(|x| x.0 == *lab).expect("label present");
    let path: Vec<usize> = ac.labels.iter().map(pos).collect();
    let mut order = path.clone();
    order.extend((0..cyc.len()).filter(|i| !path.contains(i)));
    let cfg = DivisorConfig::new(
        r.lattice.clone(),
        order.iter().map(|&i| classes[i].clone()).collect(),
        order.iter().map(|&i| labels[i].clone()).collect(),
    );
    let chain: Vec<usize> = (0..path.len()).collect();
    let kc = ac.labels.iter().rev().take_while(|l| string_index(l).is_some()).count();
    let k = ac.labels.len() - kc + rd.nu_a;
    let res = resolution_fiber_class(&cfg, &chain, k)?;
    let l = &res.config.lattice;
    let last = *res.exceptional.last().expect("at least one blowup");
    let connector = res
        .config
        .labels
        .iter()
        .position(|s| *s == Component::N(rd.roles.third).to_string())
        .expect("connector present");
    for (i, cls) in res.config.classes.iter().enumerate() {
        let want = if i == last || i == connector { 1 } else { 0 };
        let got = l.dot(&res.resolved, cls);
        if got != want {
            return Err(RulingError::Precondition(format!(
                "resolved fiber meets {} with multiplicity {got}",
                res.config.labels[i]
            )));
        }
    }
    Ok(RulingResolution {
        blowups: res.exceptional.len(),
        square: l.square(&res.resolved),
        k_dot: l.k_dot(&res.resolved),
        resolved: res,
    })
}

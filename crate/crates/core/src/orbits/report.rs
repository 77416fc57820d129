//! Equivalence verdicts from order-1 invariants.

use num_traits::{Signed, Zero};

use crate::error::{arg_err, Result};
use crate::jets::{Bilinear, Jet1Acs, Jet1Connection, Jet1Super};
use crate::linalg::QMatrix;
use crate::orbits::acs::acs_projection;
use crate::orbits::connection::reduce_connection_jet;
use crate::orbits::superjet::reduce_super_jet;
use crate::polyfield::{q_to_f64, Poly, PolyMatrix};
use crate::Q;

/// Largest fiber dimension for which constant simultaneous similarity is decided.
pub const MAX_SIMILARITY_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Connection,
    Acs,
    Superconnection,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Connection => "connection",
            CaseTag::Acs => "acs",
            CaseTag::Superconnection => "superconnection",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    EquivalentAtOrder1,
    Obstructed,
    UndecidedHigherOrder,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EquivalentAtOrder1 => "equivalent-at-order-1",
            Verdict::Obstructed => "obstructed",
            Verdict::UndecidedHigherOrder => "undecided-higher-order",
        }
    }
}

/// Jet of one of the three supported section kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JetData {
    Connection(Jet1Connection),
    Acs(Jet1Acs),
    Super(Jet1Super),
}

impl JetData {
    pub fn case(&self) -> CaseTag {
        match self {
            JetData::Connection(_) => CaseTag::Connection,
            JetData::Acs(_) => CaseTag::Acs,
            JetData::Super(_) => CaseTag::Superconnection,
        }
    }
}

/// Dense rational block with its shape, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NamedBlock {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<Q>,
}

impl NamedBlock {
    pub fn from_matrix(name: &str, m: &QMatrix) -> Self {
        NamedBlock { name: name.into(), shape: vec![m.rows(), m.cols()], values: m.entries().to_vec() }
    }

    /// A family of equally shaped matrices indexed by `outer` (e.g. [m] or [m, m]).
    pub fn from_family(name: &str, outer: &[usize], ms: &[QMatrix]) -> Self {
        let (r, c) = ms.first().map_or((0, 0), QMatrix::shape);
        let mut shape = outer.to_vec();
        shape.extend([r, c]);
        NamedBlock { name: name.into(), shape, values: ms.iter().flat_map(|x| x.entries().iter().cloned()).collect() }
    }

    pub fn from_bilinear(name: &str, b: &Bilinear) -> Self {
        let m = b.dim();
        NamedBlock { name: name.into(), shape: vec![m, m, m], values: b.coefficients().to_vec() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| q_to_f64(&v.abs())).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub case: CaseTag,
    pub blocks_a: Vec<NamedBlock>,
    pub blocks_b: Vec<NamedBlock>,
    /// Names of invariant blocks that differ.
    pub differing: Vec<String>,
    /// Largest absolute entry of the difference of the invariants.
    pub sup_norm: f64,
    pub verdict: Verdict,
    /// Constant X with X⁻¹·F_a·X = F_b, when the connection invariants agree
    /// only up to conjugation.
    pub conjugator: Option<QMatrix>,
    pub note: String,
}

fn connection_blocks(j: &Jet1Connection) -> Result<(Vec<NamedBlock>, Vec<QMatrix>)> {
    let m = j.base_dim();
    let f = reduce_connection_jet(j)?.invariant;
    Ok((vec![NamedBlock::from_family("F", &[m, m], &f)], f))
}

fn acs_blocks(j: &Jet1Acs) -> Result<Vec<NamedBlock>> {
    let p = acs_projection(j)?;
    Ok(vec![NamedBlock::from_matrix("J", j.j()), NamedBlock::from_bilinear("ker_s_part", &p.ker_s_part)])
}

fn super_blocks(j: &Jet1Super) -> Result<Vec<NamedBlock>> {
    let m = j.base_dim();
    let inv = reduce_super_jet(j)?.invariant;
    Ok(vec![
        NamedBlock::from_matrix("chi+-", &inv.chi_pm),
        NamedBlock::from_matrix("chi-+", &inv.chi_mp),
        NamedBlock::from_family("nabla_chi+-", &[m], &inv.nabla_chi_pm),
        NamedBlock::from_family("nabla_chi-+", &[m], &inv.nabla_chi_mp),
        NamedBlock::from_family("F+", &[m, m], &inv.f_plus),
        NamedBlock::from_family("F-", &[m, m], &inv.f_minus),
    ])
}

fn compare(a: &[NamedBlock], b: &[NamedBlock]) -> (Vec<String>, f64) {
    let mut differing = Vec::new();
    let mut sup = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        if x.shape != y.shape {
            differing.push(x.name.clone());
            sup = f64::INFINITY;
            continue;
        }
        if x.values != y.values {
            differing.push(x.name.clone());
        }
        for (u, v) in x.values.iter().zip(&y.values) {
            sup = sup.max(q_to_f64(&(u - v).abs()));
        }
    }
    (differing, sup)
}

/// Outcome of the constant simultaneous-similarity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Similarity {
    Similar(QMatrix),
    NotSimilar,
    Undecided,
}

/// Decides whether some invertible constant X satisfies X⁻¹·A_k·X = B_k for
/// all k. The solutions of A_k X = X B_k form a linear space spanned by
/// X_1..X_d; an invertible member exists iff det(Σ t_i X_i) is a nonzero
/// polynomial, in which case a witness is found by fixing the t_i one at a
/// time from {0, …, n}.
pub fn simultaneous_conjugator(a: &[QMatrix], b: &[QMatrix]) -> Result<Similarity> {
    if a.len() != b.len() {
        return arg_err("families of different length");
    }
    let n = a.first().map_or(0, QMatrix::rows);
    if a.iter().chain(b).any(|x| x.shape() != (n, n)) {
        return arg_err("families of differently shaped matrices");
    }
    if n > MAX_SIMILARITY_DIM {
        return Ok(Similarity::Undecided);
    }
    let nn = n * n;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (ak, bk) in a.iter().zip(b) {
        for i in 0..n {
            for j in 0..n {
                // (A X − X B)_{ij} = Σ_l A_{il}X_{lj} − X_{il}B_{lj}
                let mut row = vec![Q::zero(); nn];
                for l in 0..n {
                    row[l * n + j] += &ak[(i, l)];
                    row[i * n + l] -= &bk[(l, j)];
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..nn).map(|k| (0..nn).map(|i| if i == k { Q::from_integer(1.into()) } else { Q::zero() }).collect()).collect()
    } else {
        QMatrix::from_rows(rows)?.null_space()
    };
    let d = basis.len();
    if d == 0 {
        return Ok(Similarity::NotSimilar);
    }
    let generic = PolyMatrix::from_fn(n, n, d, |i, j| {
        let mut p = Poly::zero(d);
        for (k, v) in basis.iter().enumerate() {
            if !v[i * n + j].is_zero() {
                p = p + Poly::var(d, k).expect("in range").scale(&v[i * n + j]);
            }
        }
        p
    });
    let mut det = generic.det()?;
    if det.is_zero() {
        return Ok(Similarity::NotSimilar);
    }
    let mut t = vec![Q::zero(); d];
    for k in 0..d {
        for c in 0..=n as i64 {
            let mut subs: Vec<Poly> = (0..d).map(|i| Poly::var(d, i).expect("in range")).collect();
            subs[k] = Poly::from_int(d, c);
            let fixed = det.substitute(&subs)?;
            if !fixed.is_zero() {
                t[k] = Q::from_integer(c.into());
                det = fixed;
                break;
            }
        }
    }
    let x = generic.eval(&t)?;
    if x.det()?.is_zero() {
        return Err(crate::Error::Internal("similarity witness search failed".into()));
    }
    Ok(Similarity::Similar(x))
}

const ORDER1_NOTE: &str = "equal order-1 invariants do not by themselves prove local equivalence";

/// Reduces both jets and compares their invariants exactly.
pub fn decide_equivalence(a: &JetData, b: &JetData) -> Result<ObstructionReport> {
    if a.case() != b.case() {
        return arg_err(format!("cannot compare a {} jet with a {} jet", a.case().as_str(), b.case().as_str()));
    }
    let case = a.case();
    let mut conjugator = None;
    let mut undecided = false;
    let (blocks_a, blocks_b, mut differing, sup_norm) = match (a, b) {
        (JetData::Connection(x), JetData::Connection(y)) => {
            if x.base_dim() != y.base_dim() || x.fiber_dim() != y.fiber_dim() {
                return arg_err("connection jets of different shape");
            }
            let (ba, fa) = connection_blocks(x)?;
            let (bb, fb) = connection_blocks(y)?;
            let (diff, sup) = compare(&ba, &bb);
            if !diff.is_empty() {
                match simultaneous_conjugator(&fa, &fb)? {
                    Similarity::Similar(xm) => conjugator = Some(xm),
                    Similarity::NotSimilar => {}
                    Similarity::Undecided => undecided = true,
                }
            }
            (ba, bb, diff, sup)
        }
        (JetData::Acs(x), JetData::Acs(y)) => {
            if x.dim() != y.dim() {
                return arg_err("acs jets of different dimension");
            }
            let (ba, bb) = (acs_blocks(x)?, acs_blocks(y)?);
            let (diff, sup) = compare(&ba, &bb);
            (ba, bb, diff, sup)
        }
        (JetData::Super(x), JetData::Super(y)) => {
            if x.base_dim() != y.base_dim() || x.grading() != y.grading() {
                return arg_err("super jets of different shape");
            }
            let (ba, bb) = (super_blocks(x)?, super_blocks(y)?);
            let (diff, sup) = compare(&ba, &bb);
            (ba, bb, diff, sup)
        }
        _ => unreachable!("cases checked equal"),
    };
    let (verdict, note) = if differing.is_empty() {
        (Verdict::EquivalentAtOrder1, ORDER1_NOTE.to_string())
    } else if conjugator.is_some() {
        differing.clear();
        (
            Verdict::EquivalentAtOrder1,
            format!("curvature families agree up to constant conjugation; {ORDER1_NOTE}"),
        )
    } else if undecided {
        (
            Verdict::UndecidedHigherOrder,
            format!("invariants differ exactly; similarity up to conjugation not decided above fiber dimension {MAX_SIMILARITY_DIM}"),
        )
    } else {
        (Verdict::Obstructed, format!("invariant blocks differ: {}", differing.join(", ")))
    };
    Ok(ObstructionReport { case, blocks_a, blocks_b, differing, sup_norm, verdict, conjugator, note })
}

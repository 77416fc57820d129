//! Seeded verification suites. Instance i of a run with seed S draws its data
//! from ChaCha8 seeded with S + i, so `--seed S+i --count 1` replays it.
//! Fixed checks (worked examples) run once per invocation, also with
//! `--count 0`.

use std::collections::BTreeMap;

use clap::ValueEnum;
use curvlab::curvature::{
    contract_vector_valued, coordinate_field, covariant_differential, exterior_derivative, gauge_transform,
    nijenhuis, nijenhuis_vector_form, pullback_acs, pure_gauge, trace_with, weyl, weyl_at, weyl_numerator,
    yang_mills_curvature, AlmostComplex, ConnectionField, MatForm, MetricField, ValueKind,
};
use curvlab::jets::{prolong_acs, prolong_connection, prolong_gauge, Bilinear, Jet1Acs};
use curvlab::orbits::{
    acs_projection, act_on_super_jet, in_w, nijenhuis_from_jet, reduce_super_jet, splitting_dimensions, symmetrize,
    SuperAut, SuperInvariant,
};
use curvlab::polyfield::{fmt_q, q, q_to_f64, qr};
use curvlab::supergeometry::{
    obstruction_supercurvature, prolong_super, quillen_supercurvature, super_gauge_transform, SuperconnectionField,
};
use curvlab::{fd, gen, Poly, PolyMatrix, QMatrix, Q};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{FailureDump, PropertyResult};
use crate::spec::Section;

/// Largest accepted relative error of the finite-difference oracle.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Gauge,
    Bianchi,
    Weyl,
    Nijenhuis,
    Splitting,
    Superjet,
    OracleFd,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Gauge => "gauge",
            Suite::Bianchi => "bianchi",
            Suite::Weyl => "weyl",
            Suite::Nijenhuis => "nijenhuis",
            Suite::Splitting => "splitting",
            Suite::Superjet => "superjet",
            Suite::OracleFd => "oracle-fd",
        }
    }
}

/// One property evaluated on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub exact: bool,
    pub passed: bool,
}

impl Check {
    /// Exact identity; `magnitude` sizes the discrepancy when it fails.
    pub fn exact(name: &'static str, holds: bool, magnitude: impl FnOnce() -> f64) -> Self {
        let deviation = if holds { 0.0 } else { magnitude().max(f64::MIN_POSITIVE) };
        Check { name, deviation, exact: true, passed: holds }
    }

    pub fn within(name: &'static str, deviation: f64, tol: f64) -> Self {
        Check { name, deviation, exact: false, passed: deviation <= tol }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub checks: Vec<Check>,
    pub input: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub properties: Vec<PropertyResult>,
    pub failure: Option<FailureDump>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.properties.iter().all(|p| p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

type Res<T> = curvlab::Result<T>;

fn mat_dev(a: &[PolyMatrix], b: &[PolyMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(y).map(|d| d.max_abs_coefficient()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

fn polys_dev(a: &[Poly], b: &[Poly]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).max_abs_coefficient()).fold(0.0, f64::max)
}

fn qmat_dev(a: &[QMatrix], b: &[QMatrix]) -> f64 {
    let mut dev = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                dev = dev.max(q_to_f64(&d[(i, j)].abs()));
            }
        }
    }
    dev
}

fn bilinear_dev(a: &Bilinear, b: &Bilinear) -> f64 {
    a.sub(b).max_abs()
}

fn spec_value(s: Section) -> Value {
    serde_json::to_value(s.to_spec()).expect("spec serializes")
}

fn q_value(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn qmatrix_value(m: &QMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| q_value(&(0..m.cols()).map(|j| m[(i, j)].clone()).collect::<Vec<_>>())).collect())
}

fn jet_value(j: &Jet1Acs) -> Value {
    json!({ "J": qmatrix_value(j.j()), "C": q_value(j.c().coefficients()) })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauge_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let conn = gen::connection(&mut r, 3, 2, 2);
    let g = gen::gauge(&mut r, 2, 3, 1);
    let lhs = yang_mills_curvature(&gauge_transform(&conn, &g)?)?;
    let rhs = yang_mills_curvature(&conn)?.conjugate(g.phi(), g.inverse())?;
    let flat = yang_mills_curvature(&pure_gauge(&g)?)?;
    Ok(Instance {
        checks: vec![
            Check::exact("gauge-covariance", lhs == rhs, || mat_dev(lhs.components(), rhs.components())),
            Check::exact("pure-gauge-flatness", flat.is_zero(), || {
                flat.components().iter().map(PolyMatrix::max_abs_coefficient).fold(0.0, f64::max)
            }),
        ],
        input: json!({ "connection": spec_value(Section::Connection(conn)), "gauge": spec_value(Section::Gauge(g)) }),
    })
}

fn bianchi_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let (m, n) = (3, 2);
    let mut dd_dev = 0.0f64;
    for k in 0..3 {
        let omega = gen::alternating_form(&mut r, 4, k, 3);
        let dd = exterior_derivative(&exterior_derivative(&omega)?)?;
        dd_dev = dd_dev.max(dd.max_abs_coefficient());
    }
    let conn = gen::connection(&mut r, m, n, 2);
    let psi = MatForm::scalar(gen::poly_matrix(&mut r, n, 1, m, 2, 2));
    let f = yang_mills_curvature(&conn)?;
    let dd_psi = covariant_differential(&conn, &covariant_differential(&conn, &psi, ValueKind::Vector)?, ValueKind::Vector)?;
    let f_psi = f.act_on(psi.get(&[]))?;
    let bianchi = covariant_differential(&conn, &f, ValueKind::Endomorphism)?;
    Ok(Instance {
        checks: vec![
            Check::exact("d-squared", dd_dev == 0.0, || dd_dev),
            Check::exact("covariant-d-squared", dd_psi == f_psi, || mat_dev(dd_psi.components(), f_psi.components())),
            Check::exact("bianchi", bianchi.is_zero(), || {
                bianchi.components().iter().map(PolyMatrix::max_abs_coefficient).fold(0.0, f64::max)
            }),
        ],
        input: json!({ "connection": spec_value(Section::Connection(conn)) }),
    })
}

/// (1 + x¹/2)², the conformal factor of the Weyl suite.
fn weyl_factor(m: usize) -> Poly {
    (&Poly::one(m) + &Poly::var(m, 0).expect("m ≥ 1").scale(&qr(1, 2))).pow(2)
}

fn weyl_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let m = 4;
    let g = gen::metric_general(&mut r, m, 2);
    let f = weyl_factor(m);
    let pt = loop {
        let pt = gen::point(&mut r, m);
        if !g.det().eval(&pt)?.is_zero() && !f.eval(&pt)?.is_zero() {
            break pt;
        }
    };
    let w = weyl_at(&g, &pt)?;
    let ginv = g.matrix().eval(&pt)?.inverse().ok_or_else(|| curvlab::Error::Internal("checked det".into()))?;
    let ginv = PolyMatrix::constant(&ginv, m);
    let mut trace_dev = 0.0f64;
    for a in 0..4 {
        for b in a + 1..4 {
            trace_dev = trace_dev.max(trace_with(&w.covariant, &ginv, a, b)?.max_abs_coefficient());
        }
    }
    let w2 = weyl_at(&g.conformal(&f)?, &pt)?;
    let conf_dev = w.mixed.checked_sub(&w2.mixed)?.max_abs_coefficient();
    Ok(Instance {
        checks: vec![
            Check::exact("trace-free", trace_dev == 0.0, || trace_dev),
            Check::exact("conformal-invariance", w.mixed == w2.mixed, || conf_dev),
        ],
        input: json!({ "metric": spec_value(Section::Metric(g)), "point": q_value(&pt) }),
    })
}

fn weyl_fixed() -> Res<Vec<Check>> {
    let m = 4;
    let flat = weyl(&MetricField::flat(m))?;
    let x1 = &Poly::one(m) + &Poly::var(m, 0)?;
    let conf = MetricField::flat(m).conformal(&x1.pow(2))?;
    let (_, num) = weyl_numerator(&conf)?;
    Ok(vec![
        Check::exact("flat-weyl-zero", flat.covariant.is_zero(), || flat.covariant.max_abs_coefficient()),
        Check::exact("conformally-flat-weyl-zero", num.is_zero(), || num.max_abs_coefficient()),
    ])
}

/// J = (I + x³E₁₂)·J₀·(I − x³E₁₂) with the block-diagonal J₀ in m = 4.
pub fn hand_instance_acs() -> Res<AlmostComplex> {
    let m = 4;
    let j0 = AlmostComplex::block_canonical(m)?;
    let mut p = PolyMatrix::identity(m, m);
    p[(0, 1)] = Poly::var(m, 2)?;
    let j = p.checked_mul(j0.matrix())?.checked_mul(&p.unipotent_inverse()?)?;
    AlmostComplex::new(j)
}

fn nijenhuis_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let m = 4;
    let acs = gen::acs(&mut r, m, 1);
    let n = nijenhuis(&acs)?;
    let mut bracket_dev = 0.0f64;
    let mut agree = true;
    for i in 0..m {
        for k in i + 1..m {
            let (x, y) = (coordinate_field(m, i), coordinate_field(m, k));
            let a = nijenhuis_vector_form(&acs, &x, &y)?;
            let b = contract_vector_valued(&n, &x, &y)?;
            if a != b {
                agree = false;
                bracket_dev = bracket_dev.max(polys_dev(&a, &b));
            }
        }
    }
    let two = nijenhuis(&gen::acs(&mut r, 2, 2))?;
    let fixed = gen::point(&mut r, m);
    let phi = gen::triangular_diffeo(&mut r, &fixed, 2);
    let pulled = nijenhuis(&pullback_acs(&AlmostComplex::canonical(m)?, &phi)?)?;
    Ok(Instance {
        checks: vec![
            Check::exact("coordinate-vs-bracket", agree, || bracket_dev),
            Check::exact("dimension-2-vanishes", two.is_zero(), || two.max_abs_coefficient()),
            Check::exact("pullback-integrable", pulled.is_zero(), || pulled.max_abs_coefficient()),
        ],
        input: json!({ "acs": spec_value(Section::Acs(acs)), "diffeo": spec_value(Section::Diffeo(phi)) }),
    })
}

fn nijenhuis_fixed() -> Res<Vec<Check>> {
    let m = 4;
    let mut canon_dev = 0.0f64;
    for j0 in [AlmostComplex::canonical(m)?, AlmostComplex::block_canonical(m)?] {
        canon_dev = canon_dev.max(nijenhuis(&j0)?.max_abs_coefficient());
    }
    let acs = hand_instance_acs()?;
    let (e1, e3) = (coordinate_field(m, 0), coordinate_field(m, 2));
    let mut want = vec![Poly::zero(m); m];
    want[0] = Poly::var(m, 2)?;
    want[1] = Poly::one(m);
    let coord = contract_vector_valued(&nijenhuis(&acs)?, &e1, &e3)?;
    let bracket = nijenhuis_vector_form(&acs, &e1, &e3)?;
    let ok = coord == want && bracket == want;
    Ok(vec![
        Check::exact("canonical-integrable", canon_dev == 0.0, || canon_dev),
        Check::exact("hand-instance", ok, || polys_dev(&coord, &want).max(polys_dev(&bracket, &want))),
    ])
}

fn splitting_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let mut checks = Vec::new();
    let mut input = serde_json::Map::new();
    for m in [2, 4] {
        let jet = gen::jet1_acs(&mut r, m);
        let p = acs_projection(&jet)?;
        let again = acs_projection(&Jet1Acs::new(jet.j().clone(), p.gauge_part.clone())?)?;
        let sym = symmetrize(&p.ker_s_part);
        let dims = splitting_dimensions(jet.j());
        checks.push(Check::exact("idempotent", again.gauge_part == p.gauge_part, || {
            bilinear_dev(&again.gauge_part, &p.gauge_part)
        }));
        checks.push(Check::exact("s-annihilates-complement", sym.is_zero(), || sym.max_abs()));
        checks.push(Check::exact(
            "parts-in-w",
            in_w(&p.ker_s_part, jet.j()) && in_w(&p.gauge_part, jet.j()),
            || 1.0,
        ));
        checks.push(Check::exact("closed-form-agrees", p.ker_s_part == p.closed_form, || {
            bilinear_dev(&p.ker_s_part, &p.closed_form)
        }));
        checks.push(Check::exact("complement-is-quarter-jn", p.ker_s_part == p.quarter_jn, || {
            bilinear_dev(&p.ker_s_part, &p.quarter_jn)
        }));
        checks.push(Check::exact(
            "direct-sum-dimensions",
            dims.is_direct_sum() && dims.dim_w == m * m * m / 2 && dims.rank_s_k == dims.dim_image_k,
            || 1.0,
        ));
        if m == 2 {
            let n = nijenhuis_from_jet(&jet);
            checks.push(Check::exact("dimension-2-nijenhuis-vanishes", n.is_zero() && p.ker_s_part.is_zero(), || {
                n.max_abs().max(p.ker_s_part.max_abs())
            }));
        }
        input.insert(format!("jet_m{m}"), jet_value(&jet));
    }
    Ok(Instance { checks, input: Value::Object(input) })
}

fn splitting_notes() -> Res<Vec<String>> {
    let mut notes = Vec::new();
    for m in [2, 4] {
        let d = splitting_dimensions(&AlmostComplex::canonical(m)?.matrix().eval(&vec![q(0); m])?);
        notes.push(format!(
            "m={m}: s∘K has rank {} on a space of dimension {}; dim W = {}, dim K(S²) = {}, dim(ker s ∩ W) = {}",
            d.rank_s_k, d.dim_s2, d.dim_w, d.dim_image_k, d.dim_ker_s_in_w
        ));
    }
    notes.push("the complement (1−P)(C) is checked against −¼·J·N(J)(x₀)".into());
    Ok(notes)
}

fn superjet_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let (m, np, nm) = (2, 2, 1);
    let s = gen::superconnection(&mut r, m, np, nm, 2);
    let pt = gen::point(&mut r, m);
    let from_jet = reduce_super_jet(&prolong_super(&s, &pt)?)?.invariant;
    let from_field = SuperInvariant::from_curvature(&obstruction_supercurvature(&s)?, &pt)?;
    let origin = vec![q(0); m];
    let gp = gen::origin_normalized_gauge(&mut r, np, m, 2);
    let gm = gen::origin_normalized_gauge(&mut r, nm, m, 2);
    let lhs = prolong_super(&super_gauge_transform(&s, &gp, &gm)?, &origin)?;
    let aut = SuperAut { plus: prolong_gauge(&gp, &origin)?, minus: prolong_gauge(&gm, &origin)? };
    let rhs = act_on_super_jet(&aut, &prolong_super(&s, &origin)?)?;
    let j = gen::jet1_super(&mut r, m, np, nm);
    let h1 = gen::super_aut_normalized(&mut r, m, np, nm);
    let h2 = gen::super_aut_normalized(&mut r, m, np, nm);
    let seq = act_on_super_jet(&h2, &act_on_super_jet(&h1, &j)?)?;
    let once = act_on_super_jet(&h1.compose(&h2)?, &j)?;
    let inv_a = reduce_super_jet(&j)?.invariant;
    let inv_b = reduce_super_jet(&act_on_super_jet(&h1, &j)?)?.invariant;
    let inv_dev = |a: &SuperInvariant, b: &SuperInvariant| {
        qmat_dev(&[a.chi_pm.clone(), a.chi_mp.clone()], &[b.chi_pm.clone(), b.chi_mp.clone()])
            .max(qmat_dev(&a.nabla_chi_pm, &b.nabla_chi_pm))
            .max(qmat_dev(&a.nabla_chi_mp, &b.nabla_chi_mp))
            .max(qmat_dev(&a.f_plus, &b.f_plus))
            .max(qmat_dev(&a.f_minus, &b.f_minus))
    };
    Ok(Instance {
        checks: vec![
            Check::exact("commuting-square", from_jet == from_field, || inv_dev(&from_jet, &from_field)),
            Check::exact("gauge-square", lhs == rhs, || 1.0),
            Check::exact("action-law", seq == once, || 1.0),
            Check::exact("orbit-invariance", inv_a == inv_b, || inv_dev(&inv_a, &inv_b)),
        ],
        input: json!({ "superconnection": spec_value(Section::Superconnection(s)), "point": q_value(&pt) }),
    })
}

/// χ_{+−} = 1, χ_{−+} = 0, A± = 0 on a rank (1, 1) bundle over ℝ².
pub fn distinguishing_superconnection() -> Res<SuperconnectionField> {
    let m = 2;
    SuperconnectionField::new(
        ConnectionField::zero(m, 1),
        ConnectionField::zero(m, 1),
        PolyMatrix::constant(&QMatrix::identity(1), m),
        PolyMatrix::zeros(1, 1, m),
    )
}

fn superjet_fixed() -> Res<Vec<Check>> {
    let s = distinguishing_superconnection()?;
    let quillen = quillen_supercurvature(&s)?;
    let obstruction = obstruction_supercurvature(&s)?;
    Ok(vec![Check::exact(
        "distinguishing-instance",
        quillen.is_zero() && !obstruction.deg0.is_zero(),
        || 1.0,
    )])
}

fn oracle_instance(seed: u64) -> Res<Instance> {
    let mut r = rng(seed);
    let p = gen::poly(&mut r, 3, 3, 4);
    let pt3 = gen::point(&mut r, 3);
    let poly_err = fd::poly_partials_error(&p, &pt3)?;
    let conn = gen::connection(&mut r, 3, 2, 3);
    let conn_err = fd::connection_jet_error(conn.coefficients(), &prolong_connection(&conn, &pt3)?, &pt3);
    let acs = gen::acs(&mut r, 4, 2);
    let pt4 = gen::point(&mut r, 4);
    let acs_err = fd::acs_jet_error(acs.matrix(), &prolong_acs(&acs, &pt4)?, &pt4);
    Ok(Instance {
        checks: vec![
            Check::within("poly-partials", poly_err, ORACLE_TOL),
            Check::within("connection-jet", conn_err, ORACLE_TOL),
            Check::within("acs-jet", acs_err, ORACLE_TOL),
        ],
        input: json!({
            "polynomial": p.to_string(),
            "connection": spec_value(Section::Connection(conn)),
            "acs": spec_value(Section::Acs(acs)),
        }),
    })
}

pub fn instance(suite: Suite, seed: u64) -> Res<Instance> {
    match suite {
        Suite::Gauge => gauge_instance(seed),
        Suite::Bianchi => bianchi_instance(seed),
        Suite::Weyl => weyl_instance(seed),
        Suite::Nijenhuis => nijenhuis_instance(seed),
        Suite::Splitting => splitting_instance(seed),
        Suite::Superjet => superjet_instance(seed),
        Suite::OracleFd => oracle_instance(seed),
    }
}

fn fixed(suite: Suite) -> Res<Vec<Check>> {
    match suite {
        Suite::Weyl => weyl_fixed(),
        Suite::Nijenhuis => nijenhuis_fixed(),
        Suite::Superjet => superjet_fixed(),
        _ => Ok(Vec::new()),
    }
}

fn notes(suite: Suite) -> Res<Vec<String>> {
    match suite {
        Suite::Splitting => splitting_notes(),
        Suite::OracleFd => Ok(vec![format!(
            "Richardson-extrapolated central differences, h = {}, tolerance {ORACLE_TOL:e}",
            fd::STEP
        )]),
        _ => Ok(Vec::new()),
    }
}

fn replay(suite: Suite, seed: u64, count: usize) -> String {
    format!("curvlab verify --suite {} --seed {seed} --count {count}", suite.as_str())
}

struct Tally {
    order: Vec<&'static str>,
    props: BTreeMap<&'static str, PropertyResult>,
}

impl Tally {
    fn add(&mut self, c: &Check) {
        let entry = self.props.entry(c.name).or_insert_with(|| PropertyResult {
            name: c.name.into(),
            instances: 0,
            max_deviation: 0.0,
            exact: c.exact,
            passed: true,
        });
        if entry.instances == 0 {
            self.order.push(c.name);
        }
        entry.instances += 1;
        entry.max_deviation = entry.max_deviation.max(c.deviation);
        entry.passed &= c.passed;
    }
}

/// Runs `count` seeded instances in parallel plus the fixed checks; the
/// report lists properties in first-seen order and the lowest failing instance.
pub fn run_suite(suite: Suite, seed: u64, count: usize) -> SuiteOutcome {
    let results: Vec<Res<Instance>> =
        (0..count).into_par_iter().map(|i| instance(suite, seed.wrapping_add(i as u64))).collect();
    let mut tally = Tally { order: Vec::new(), props: BTreeMap::new() };
    let mut failure = None;
    match fixed(suite) {
        Ok(checks) => {
            for c in &checks {
                tally.add(c);
                if !c.passed && failure.is_none() {
                    failure = Some(FailureDump {
                        property: c.name.into(),
                        instance: 0,
                        instance_seed: seed,
                        replay: replay(suite, seed, 0),
                        input: None,
                    });
                }
            }
        }
        Err(e) => {
            failure = Some(FailureDump {
                property: format!("fixed checks raised: {e}"),
                instance: 0,
                instance_seed: seed,
                replay: replay(suite, seed, 0),
                input: None,
            })
        }
    }
    for (i, res) in results.into_iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        match res {
            Ok(inst) => {
                for c in &inst.checks {
                    tally.add(c);
                }
                if failure.is_none() {
                    if let Some(c) = inst.checks.iter().find(|c| !c.passed) {
                        failure = Some(FailureDump {
                            property: c.name.into(),
                            instance: i,
                            instance_seed: s,
                            replay: replay(suite, s, 1),
                            input: Some(inst.input.clone()),
                        });
                    }
                }
            }
            Err(e) if failure.is_none() => {
                failure = Some(FailureDump {
                    property: format!("instance raised: {e}"),
                    instance: i,
                    instance_seed: s,
                    replay: replay(suite, s, 1),
                    input: None,
                });
            }
            Err(_) => {}
        }
    }
    let mut notes = notes(suite).unwrap_or_else(|e| vec![format!("notes unavailable: {e}")]);
    if count == 0 && tally.order.is_empty() {
        notes.push("no instances requested".into());
    }
    let properties = tally.order.iter().map(|n| tally.props[n].clone()).collect();
    SuiteOutcome { properties, failure, notes }
}

//! FieldSpecFile: the JSON description of a section or group element.
//!
//! Component keys use 1-based indices:
//! - form: "i,j,…" (any order, extended by antisymmetry; "" for a 0-form)
//! - metric: "i,j" (mirrored when the transpose entry is absent)
//! - acs: "i,j" for J^i_j
//! - connection: "A<μ>:a,b" for (A_μ)_{ab}
//! - superconnection: "A+<μ>:a,b", "A-<μ>:a,b", "chi+-:a,b", "chi-+:a,b"
//! - gauge: "i,j" (or "phi:i,j"); graded gauge: "phi+:i,j", "phi-:i,j"
//! - diffeo: "i" for the component φ^i
//!
//! Absent components are zero.

use std::collections::BTreeMap;

use curvlab::curvature::{AlmostComplex, ConnectionField, MetricField};
use curvlab::polyfield::index_tuples;
use curvlab::supergeometry::SuperconnectionField;
use curvlab::{GaugeElement, Limits, Poly, PolyMap, PolyMatrix, Slot, SlotSymmetry, TensorField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Form,
    Metric,
    Connection,
    Acs,
    Superconnection,
    Gauge,
    Diffeo,
}

impl CaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseKind::Form => "form",
            CaseKind::Metric => "metric",
            CaseKind::Connection => "connection",
            CaseKind::Acs => "acs",
            CaseKind::Superconnection => "superconnection",
            CaseKind::Gauge => "gauge",
            CaseKind::Diffeo => "diffeo",
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Grading {
    pub n_plus: usize,
    pub n_minus: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecFile {
    pub format_version: u32,
    pub case: CaseKind,
    pub base_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Grading>,
    pub components: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<BTreeMap<String, String>>,
}

/// A parsed and validated FieldSpecFile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Section {
    Form(TensorField),
    Metric(MetricField),
    Connection(ConnectionField),
    Acs(AlmostComplex),
    Superconnection(SuperconnectionField),
    Gauge(GaugeElement),
    GradedGauge(GaugeElement, GaugeElement),
    Diffeo(PolyMap),
}

impl Section {
    pub fn case(&self) -> CaseKind {
        match self {
            Section::Form(_) => CaseKind::Form,
            Section::Metric(_) => CaseKind::Metric,
            Section::Connection(_) => CaseKind::Connection,
            Section::Acs(_) => CaseKind::Acs,
            Section::Superconnection(_) => CaseKind::Superconnection,
            Section::Gauge(_) | Section::GradedGauge(..) => CaseKind::Gauge,
            Section::Diffeo(_) => CaseKind::Diffeo,
        }
    }

    pub fn base_dim(&self) -> usize {
        match self {
            Section::Form(t) => t.nvars(),
            Section::Metric(g) => g.dim(),
            Section::Connection(c) => c.base_dim(),
            Section::Acs(j) => j.dim(),
            Section::Superconnection(s) => s.spec().base_dim,
            Section::Gauge(g) | Section::GradedGauge(g, _) => g.phi().nvars(),
            Section::Diffeo(p) => p.dim(),
        }
    }
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_indices(key: &str, text: &str, dims: &[usize]) -> Result<Vec<usize>> {
    if dims.is_empty() {
        return if text.is_empty() { Ok(Vec::new()) } else { Err(CliError::parse(loc(key), "expected an empty index key")) };
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != dims.len() {
        return Err(CliError::parse(loc(key), format!("expected {} indices, found {}", dims.len(), parts.len())));
    }
    parts
        .iter()
        .zip(dims)
        .map(|(p, &d)| {
            let i: usize = p.trim().parse().map_err(|_| CliError::parse(loc(key), format!("bad index {p:?}")))?;
            if i == 0 || i > d {
                return Err(CliError::parse(loc(key), format!("index {i} outside 1..={d}")));
            }
            Ok(i - 1)
        })
        .collect()
}

fn loc(key: &str) -> String {
    format!("components[{key:?}]")
}

struct Ctx {
    m: usize,
    limits: Limits,
}

impl Ctx {
    fn poly(&self, key: &str, text: &str) -> Result<Poly> {
        let p = Poly::parse(text, self.m)
            .map_err(|e| CliError::parse(format!("{} offset {}", loc(key), e.offset), e.message))?;
        self.limits.check_degree(&p).map_err(|e| CliError::Argument(format!("{}: {e}", loc(key))))?;
        Ok(p)
    }
}

/// Splits "prefix:rest"; keys without a colon have an empty prefix.
fn split_key(key: &str) -> (&str, &str) {
    match key.split_once(':') {
        Some((p, r)) => (p, r),
        None => ("", key),
    }
}

impl FieldSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FieldSpecFile = serde_json::from_str(text)
            .map_err(|e| CliError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        if spec.format_version != FORMAT_VERSION {
            return Err(CliError::parse(
                "format_version",
                format!("unsupported format_version {} (expected {FORMAT_VERSION})", spec.format_version),
            ));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    fn reject(&self, field: &str, present: bool) -> Result<()> {
        if present {
            return Err(CliError::parse(field, format!("field not used by case {}", self.case.as_str())));
        }
        Ok(())
    }

    fn require<T: Copy>(&self, field: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| CliError::parse(field, format!("required for case {}", self.case.as_str())))
    }

    /// Parses components into a validated section under `limits`.
    pub fn to_section(&self, limits: &Limits) -> Result<Section> {
        let m = self.base_dim;
        limits.check_base_dim(m)?;
        let ctx = Ctx { m, limits: *limits };
        let graded_gauge = self.case == CaseKind::Gauge && self.grading.is_some();
        self.reject("form_degree", self.case != CaseKind::Form && self.form_degree.is_some())?;
        self.reject(
            "fiber_dim",
            !matches!(self.case, CaseKind::Connection | CaseKind::Gauge) && self.fiber_dim.is_some()
                || graded_gauge && self.fiber_dim.is_some(),
        )?;
        self.reject("grading", !matches!(self.case, CaseKind::Superconnection | CaseKind::Gauge) && self.grading.is_some())?;
        self.reject("inverse", self.case != CaseKind::Gauge && self.inverse.is_some())?;
        match self.case {
            CaseKind::Form => self.form(&ctx),
            CaseKind::Metric => self.metric(&ctx),
            CaseKind::Acs => {
                self.check_prefixes(&self.components, &[""])?;
                let j = self.square(&ctx, &self.components, "", m)?;
                Ok(Section::Acs(AlmostComplex::new(j)?))
            }
            CaseKind::Connection => {
                let n = self.require("fiber_dim", self.fiber_dim)?;
                limits.check_fiber_dim(n)?;
                let mut a = vec![PolyMatrix::zeros(n, n, m); m];
                for (key, text) in &self.components {
                    let (prefix, rest) = split_key(key);
                    let mu = connection_index(key, prefix, "A", m)?;
                    let ij = parse_indices(key, rest, &[n, n])?;
                    a[mu][(ij[0], ij[1])] = ctx.poly(key, text)?;
                }
                Ok(Section::Connection(ConnectionField::new(a)?))
            }
            CaseKind::Superconnection => self.superconnection(&ctx),
            CaseKind::Gauge => self.gauge(&ctx),
            CaseKind::Diffeo => {
                let mut comps = vec![Poly::zero(m); m];
                for (key, text) in &self.components {
                    let i = parse_indices(key, key, &[m])?;
                    comps[i[0]] = ctx.poly(key, text)?;
                }
                Ok(Section::Diffeo(PolyMap::new(comps)?))
            }
        }
    }

    fn form(&self, ctx: &Ctx) -> Result<Section> {
        let m = ctx.m;
        let k = self.require("form_degree", self.form_degree)?;
        if k > m {
            return Err(CliError::Argument(format!("form degree {k} exceeds base dimension {m}")));
        }
        let mut canon: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
        for (key, text) in &self.components {
            let idx = parse_indices(key, key, &vec![m; k])?;
            let p = ctx.poly(key, text)?;
            let (sorted, odd) = sort_with_sign(&idx);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                if !p.is_zero() {
                    return Err(CliError::InvalidSection(format!("{}: repeated index in a form component", loc(key))));
                }
                continue;
            }
            let p = if odd { -p } else { p };
            if let Some(prev) = canon.get(&sorted) {
                if *prev != p {
                    return Err(CliError::InvalidSection(format!("{}: conflicts with its antisymmetric partner", loc(key))));
                }
            }
            canon.insert(sorted, p);
        }
        let mut t = TensorField::from_fn(m, vec![Slot::cov(m); k], |idx| {
            let (sorted, odd) = sort_with_sign(idx);
            match canon.get(&sorted) {
                Some(p) if odd => -p.clone(),
                Some(p) => p.clone(),
                None => Poly::zero(m),
            }
        });
        for a in 1..k {
            t = t.with_symmetry(SlotSymmetry::Antisymmetric(a - 1, a))?;
        }
        Ok(Section::Form(t))
    }

    fn metric(&self, ctx: &Ctx) -> Result<Section> {
        let m = ctx.m;
        let mut given: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        for (key, text) in &self.components {
            let ij = parse_indices(key, key, &[m, m])?;
            given.insert((ij[0], ij[1]), ctx.poly(key, text)?);
        }
        let g = PolyMatrix::from_fn(m, m, m, |i, j| {
            given.get(&(i, j)).or_else(|| given.get(&(j, i))).cloned().unwrap_or_else(|| Poly::zero(m))
        });
        Ok(Section::Metric(MetricField::new(g)?))
    }

    fn square(&self, ctx: &Ctx, comps: &BTreeMap<String, String>, prefix: &str, n: usize) -> Result<PolyMatrix> {
        let mut p = PolyMatrix::zeros(n, n, ctx.m);
        for (key, text) in comps {
            let (pre, rest) = split_key(key);
            if pre != prefix && !(prefix.is_empty() && pre == "phi") {
                continue;
            }
            let ij = parse_indices(key, rest, &[n, n])?;
            p[(ij[0], ij[1])] = ctx.poly(key, text)?;
        }
        Ok(p)
    }

    fn check_prefixes(&self, comps: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
        for key in comps.keys() {
            let (pre, _) = split_key(key);
            if !allowed.contains(&pre) {
                return Err(CliError::parse(loc(key), format!("unknown component prefix {pre:?}")));
            }
        }
        Ok(())
    }

    fn gauge_element(&self, ctx: &Ctx, prefix: &str, n: usize) -> Result<GaugeElement> {
        let phi = self.square(ctx, &self.components, prefix, n)?;
        match &self.inverse {
            Some(inv) => Ok(GaugeElement::with_inverse(phi, self.square(ctx, inv, prefix, n)?)?),
            None => GaugeElement::unipotent(phi).map_err(|_| {
                CliError::InvalidSection("gauge element is not unipotent and no inverse witness was supplied".into())
            }),
        }
    }

    fn gauge(&self, ctx: &Ctx) -> Result<Section> {
        let empty = BTreeMap::new();
        let inverse = self.inverse.as_ref().unwrap_or(&empty);
        match self.grading {
            None => {
                let n = self.require("fiber_dim", self.fiber_dim)?;
                ctx.limits.check_fiber_dim(n)?;
                self.check_prefixes(&self.components, &["", "phi"])?;
                self.check_prefixes(inverse, &["", "phi"])?;
                Ok(Section::Gauge(self.gauge_element(ctx, "", n)?))
            }
            Some(gr) => {
                ctx.limits.check_fiber_dim(gr.n_plus)?;
                ctx.limits.check_fiber_dim(gr.n_minus)?;
                self.check_prefixes(&self.components, &["phi+", "phi-"])?;
                self.check_prefixes(inverse, &["phi+", "phi-"])?;
                Ok(Section::GradedGauge(
                    self.gauge_element(ctx, "phi+", gr.n_plus)?,
                    self.gauge_element(ctx, "phi-", gr.n_minus)?,
                ))
            }
        }
    }

    fn superconnection(&self, ctx: &Ctx) -> Result<Section> {
        let m = ctx.m;
        let gr = self.require("grading", self.grading)?;
        let (np, nm) = (gr.n_plus, gr.n_minus);
        ctx.limits.check_fiber_dim(np)?;
        ctx.limits.check_fiber_dim(nm)?;
        let mut ap = vec![PolyMatrix::zeros(np, np, m); m];
        let mut am = vec![PolyMatrix::zeros(nm, nm, m); m];
        let mut chi_pm = PolyMatrix::zeros(np, nm, m);
        let mut chi_mp = PolyMatrix::zeros(nm, np, m);
        for (key, text) in &self.components {
            let (prefix, rest) = split_key(key);
            let p = ctx.poly(key, text)?;
            match prefix {
                "chi+-" => {
                    let ij = parse_indices(key, rest, &[np, nm])?;
                    chi_pm[(ij[0], ij[1])] = p;
                }
                "chi-+" => {
                    let ij = parse_indices(key, rest, &[nm, np])?;
                    chi_mp[(ij[0], ij[1])] = p;
                }
                _ if prefix.starts_with("A+") => {
                    let mu = connection_index(key, prefix, "A+", m)?;
                    let ij = parse_indices(key, rest, &[np, np])?;
                    ap[mu][(ij[0], ij[1])] = p;
                }
                _ if prefix.starts_with("A-") => {
                    let mu = connection_index(key, prefix, "A-", m)?;
                    let ij = parse_indices(key, rest, &[nm, nm])?;
                    am[mu][(ij[0], ij[1])] = p;
                }
                _ => return Err(CliError::parse(loc(key), format!("unknown component prefix {prefix:?}"))),
            }
        }
        Ok(Section::Superconnection(SuperconnectionField::new(
            ConnectionField::new(ap)?,
            ConnectionField::new(am)?,
            chi_pm,
            chi_mp,
        )?))
    }
}

fn connection_index(key: &str, prefix: &str, head: &str, m: usize) -> Result<usize> {
    let rest = prefix
        .strip_prefix(head)
        .ok_or_else(|| CliError::parse(loc(key), format!("expected a key of the form {head}<mu>:a,b")))?;
    Ok(parse_indices(key, rest, &[m])?[0])
}

fn sort_with_sign(idx: &[usize]) -> (Vec<usize>, bool) {
    let mut sorted = idx.to_vec();
    let mut odd = false;
    for i in 0..sorted.len() {
        for j in 0..sorted.len().saturating_sub(1 + i) {
            if sorted[j] > sorted[j + 1] {
                sorted.swap(j, j + 1);
                odd = !odd;
            }
        }
    }
    (sorted, odd)
}

fn put(out: &mut BTreeMap<String, String>, key: String, p: &Poly) {
    if !p.is_zero() {
        out.insert(key, p.to_string());
    }
}

fn matrix_entries(out: &mut BTreeMap<String, String>, prefix: &str, p: &PolyMatrix) {
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            put(out, format!("{prefix}{},{}", i + 1, j + 1), &p[(i, j)]);
        }
    }
}

impl Section {
    /// Canonical FieldSpecFile: nonzero components only, forms on strictly
    /// increasing tuples, metrics on the upper triangle, gauge elements with
    /// their inverse witness.
    pub fn to_spec(&self) -> FieldSpecFile {
        let m = self.base_dim();
        let mut spec = FieldSpecFile {
            format_version: FORMAT_VERSION,
            case: self.case(),
            base_dim: m,
            fiber_dim: None,
            form_degree: None,
            grading: None,
            components: BTreeMap::new(),
            inverse: None,
        };
        let c = &mut spec.components;
        match self {
            Section::Form(t) => {
                spec.form_degree = Some(t.rank());
                for idx in index_tuples(&t.dims()) {
                    if idx.windows(2).all(|w| w[0] < w[1]) {
                        put(c, join(&idx), t.get(&idx));
                    }
                }
            }
            Section::Metric(g) => {
                for i in 0..m {
                    for j in i..m {
                        put(c, format!("{},{}", i + 1, j + 1), &g.matrix()[(i, j)]);
                    }
                }
            }
            Section::Acs(j) => matrix_entries(c, "", j.matrix()),
            Section::Connection(a) => {
                spec.fiber_dim = Some(a.fiber_dim());
                for (mu, am) in a.coefficients().iter().enumerate() {
                    matrix_entries(c, &format!("A{}:", mu + 1), am);
                }
            }
            Section::Superconnection(s) => {
                let sp = s.spec();
                spec.grading = Some(Grading { n_plus: sp.n_plus, n_minus: sp.n_minus });
                for mu in 0..m {
                    matrix_entries(c, &format!("A+{}:", mu + 1), s.plus().coefficient(mu));
                    matrix_entries(c, &format!("A-{}:", mu + 1), s.minus().coefficient(mu));
                }
                matrix_entries(c, "chi+-:", s.chi_pm());
                matrix_entries(c, "chi-+:", s.chi_mp());
            }
            Section::Gauge(g) => {
                spec.fiber_dim = Some(g.dim());
                matrix_entries(c, "", g.phi());
                let mut inv = BTreeMap::new();
                matrix_entries(&mut inv, "", g.inverse());
                spec.inverse = Some(inv);
            }
            Section::GradedGauge(gp, gm) => {
                spec.grading = Some(Grading { n_plus: gp.dim(), n_minus: gm.dim() });
                matrix_entries(c, "phi+:", gp.phi());
                matrix_entries(c, "phi-:", gm.phi());
                let mut inv = BTreeMap::new();
                matrix_entries(&mut inv, "phi+:", gp.inverse());
                matrix_entries(&mut inv, "phi-:", gm.inverse());
                spec.inverse = Some(inv);
            }
            Section::Diffeo(p) => {
                for (i, comp) in p.comps().iter().enumerate() {
                    put(c, (i + 1).to_string(), comp);
                }
            }
        }
        spec
    }
}

//! The curvature, equivalence and transform commands, operating on file bytes.

use clap::ValueEnum;
use curvlab::curvature::{
    exterior_derivative, gauge_transform, metric_curvature, metric_curvature_at, nijenhuis, pullback_acs,
    pullback_form, pullback_metric, riemann_numerator, weyl, weyl_at, weyl_numerator, yang_mills_curvature,
    CurvaturePack, WeylTensor,
};
use curvlab::jets::{prolong_acs, prolong_connection};
use curvlab::orbits::{decide_equivalence, JetData, NamedBlock};
use curvlab::polyfield::fmt_q;
use curvlab::supergeometry::{
    obstruction_supercurvature, prolong_super, quillen_supercurvature, super_gauge_transform, SuperCurvatureValue,
};
use curvlab::{Limits, Poly, PolyMatrix, TensorField, Q};

use crate::error::{CliError, Result};
use crate::report::{Block, InputDigest, Operation, ReportFile};
use crate::spec::{CaseKind, FieldSpecFile, Section};

pub const MAX_DEGREE_ENV: &str = "CURVLAB_MAX_DEGREE";

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureKind {
    Dform,
    Yangmills,
    Riemann,
    Weyl,
    Nijenhuis,
    Superq,
    Superobstruction,
}

impl CurvatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurvatureKind::Dform => "dform",
            CurvatureKind::Yangmills => "yangmills",
            CurvatureKind::Riemann => "riemann",
            CurvatureKind::Weyl => "weyl",
            CurvatureKind::Nijenhuis => "nijenhuis",
            CurvatureKind::Superq => "superq",
            CurvatureKind::Superobstruction => "superobstruction",
        }
    }

    fn input_case(self) -> CaseKind {
        match self {
            CurvatureKind::Dform => CaseKind::Form,
            CurvatureKind::Yangmills => CaseKind::Connection,
            CurvatureKind::Riemann | CurvatureKind::Weyl => CaseKind::Metric,
            CurvatureKind::Nijenhuis => CaseKind::Acs,
            CurvatureKind::Superq | CurvatureKind::Superobstruction => CaseKind::Superconnection,
        }
    }
}

/// Default limits with the degree cap lowered by CURVLAB_MAX_DEGREE.
pub fn limits_from_env() -> Result<Limits> {
    limits_from_value(std::env::var(MAX_DEGREE_ENV).ok().as_deref())
}

pub fn limits_from_value(value: Option<&str>) -> Result<Limits> {
    let cap = match value {
        None => None,
        Some(v) => Some(
            v.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Argument(format!("{MAX_DEGREE_ENV}={v:?} is not a non-negative integer")))?,
        ),
    };
    Ok(Limits::with_degree_cap(cap))
}

pub fn load_section(bytes: &[u8], limits: &Limits) -> Result<Section> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::parse("input", format!("not UTF-8: {e}")))?;
    FieldSpecFile::from_json(text)?.to_section(limits)
}

/// Comma-separated exact rationals, one per coordinate.
pub fn parse_point(text: &str, m: usize) -> Result<Vec<Q>> {
    let coords: Vec<Q> = text
        .split(',')
        .enumerate()
        .map(|(i, part)| {
            let p = Poly::parse(part.trim(), 0)
                .map_err(|e| CliError::parse(format!("--point coordinate {}", i + 1), e.to_string()))?;
            Ok(p.constant_term())
        })
        .collect::<Result<_>>()?;
    if coords.len() != m {
        return Err(CliError::Argument(format!("--point has {} coordinates, base dimension is {m}", coords.len())));
    }
    Ok(coords)
}

fn point_strings(p: &[Q]) -> Vec<String> {
    p.iter().map(fmt_q).collect()
}

fn scalar_tensor(m: usize, p: Poly) -> TensorField {
    TensorField::from_components(m, vec![], vec![p]).expect("rank-0 tensor has one component")
}

fn pack_blocks(pack: &CurvaturePack) -> Vec<Block> {
    vec![
        Block::from_tensor("R", &pack.riemann),
        Block::from_tensor("Ric", &pack.ricci),
        Block::from_tensor("r", &pack.scalar),
    ]
}

fn weyl_blocks(w: &WeylTensor) -> Vec<Block> {
    vec![Block::from_tensor("W", &w.covariant), Block::from_tensor("W_mixed", &w.mixed)]
}

fn super_blocks(c: &SuperCurvatureValue, m: usize) -> Vec<Block> {
    let pick = |f: fn(&curvlab::supergeometry::BlockMatrix) -> &PolyMatrix, v: &[curvlab::supergeometry::BlockMatrix]| {
        v.iter().map(|b| f(b).clone()).collect::<Vec<_>>()
    };
    let mut out = vec![
        Block::from_matrices("deg0.++", &[], std::slice::from_ref(&c.deg0.pp)),
        Block::from_matrices("deg0.+-", &[], std::slice::from_ref(&c.deg0.pm)),
        Block::from_matrices("deg0.-+", &[], std::slice::from_ref(&c.deg0.mp)),
        Block::from_matrices("deg0.--", &[], std::slice::from_ref(&c.deg0.mm)),
        Block::from_matrices("deg1.+-", &[m], &pick(|b| &b.pm, &c.deg1)),
        Block::from_matrices("deg1.-+", &[m], &pick(|b| &b.mp, &c.deg1)),
    ];
    if !c.deg2.is_empty() {
        out.push(Block::from_matrices("deg2.++", &[m, m], &pick(|b| &b.pp, &c.deg2)));
        out.push(Block::from_matrices("deg2.--", &[m, m], &pick(|b| &b.mm, &c.deg2)));
    }
    out
}

/// Curvature-type obstruction of a section, exact as polynomials or at a point.
pub fn curvature(kind: CurvatureKind, point: Option<&str>, input: &[u8], limits: &Limits) -> Result<ReportFile> {
    let section = load_section(input, limits)?;
    if section.case() != kind.input_case() {
        return Err(CliError::Argument(format!(
            "kind {} needs a {} file, got {}",
            kind.as_str(),
            kind.input_case().as_str(),
            section.case().as_str()
        )));
    }
    let m = section.base_dim();
    let point = point.map(|p| parse_point(p, m)).transpose()?;
    let mut report = ReportFile::new(Operation {
        command: "curvature".into(),
        kind: Some(kind.as_str().into()),
        point: point.as_deref().map(point_strings),
        ..Operation::default()
    });
    report.inputs.push(InputDigest::of("field", input));
    report.case = Some(section.case().as_str().into());
    let at = |t: TensorField| -> Result<TensorField> {
        Ok(match &point {
            Some(p) => t.eval_at(p)?,
            None => t,
        })
    };
    match (&section, kind) {
        (Section::Form(omega), CurvatureKind::Dform) => {
            report.blocks.push(Block::from_tensor("d_omega", &at(exterior_derivative(omega)?)?));
        }
        (Section::Connection(conn), CurvatureKind::Yangmills) => {
            let mut f = yang_mills_curvature(conn)?;
            if let Some(p) = &point {
                f = f.eval_at(p)?;
            }
            report.blocks.push(Block::from_matrices("F", &[m, m], f.components()));
        }
        (Section::Metric(g), CurvatureKind::Riemann) => match &point {
            Some(p) => report.blocks.extend(pack_blocks(&metric_curvature_at(g, p)?)),
            None if g.inverse().is_some() => report.blocks.extend(pack_blocks(&metric_curvature(g)?)),
            None => {
                let (det, num) = riemann_numerator(g)?;
                report.blocks.push(Block::from_tensor("det", &scalar_tensor(m, det)));
                report.blocks.push(Block::from_tensor("R_numerator", &num));
                report.notes.push("det g is not constant: R = R_numerator / det^2".into());
            }
        },
        (Section::Metric(g), CurvatureKind::Weyl) => match &point {
            Some(p) => report.blocks.extend(weyl_blocks(&weyl_at(g, p)?)),
            None if g.inverse().is_some() => report.blocks.extend(weyl_blocks(&weyl(g)?)),
            None => {
                let (det, num) = weyl_numerator(g)?;
                report.blocks.push(Block::from_tensor("det", &scalar_tensor(m, det)));
                report.blocks.push(Block::from_tensor("W_numerator", &num));
                report.notes.push("det g is not constant: W = W_numerator / det^3 (covariant)".into());
            }
        },
        (Section::Acs(j), CurvatureKind::Nijenhuis) => {
            report.blocks.push(Block::from_tensor("N", &at(nijenhuis(j)?)?));
        }
        (Section::Superconnection(s), CurvatureKind::Superq | CurvatureKind::Superobstruction) => {
            let mut c = if kind == CurvatureKind::Superq {
                quillen_supercurvature(s)?
            } else {
                obstruction_supercurvature(s)?
            };
            if let Some(p) = &point {
                c = c.eval_at(p)?;
            }
            report.blocks.extend(super_blocks(&c, m));
            report.notes.push(format!(
                "total parity: deg0 {}, deg1 {}, deg2 {}",
                c.total_parity(0).name(),
                c.total_parity(1).name(),
                c.total_parity(2).name()
            ));
        }
        _ => unreachable!("case checked against kind"),
    }
    report.finish_blocks();
    Ok(report)
}

/// Order-1 equivalence of two sections of the same kind at a point.
pub fn equivalence(point: &str, a: &[u8], b: &[u8], limits: &Limits) -> Result<ReportFile> {
    let sa = load_section(a, limits)?;
    let sb = load_section(b, limits)?;
    if sa.case() != sb.case() {
        return Err(CliError::Argument(format!(
            "case mismatch: {} vs {}",
            sa.case().as_str(),
            sb.case().as_str()
        )));
    }
    if sa.base_dim() != sb.base_dim() {
        return Err(CliError::Argument("base dimensions differ".into()));
    }
    let p = parse_point(point, sa.base_dim())?;
    let jet = |s: &Section| -> Result<JetData> {
        Ok(match s {
            Section::Connection(c) => JetData::Connection(prolong_connection(c, &p)?),
            Section::Acs(j) => JetData::Acs(prolong_acs(j, &p)?),
            Section::Superconnection(s) => JetData::Super(prolong_super(s, &p)?),
            other => {
                return Err(CliError::Argument(format!(
                    "equivalence is defined for connection, acs and superconnection files, not {}",
                    other.case().as_str()
                )))
            }
        })
    };
    let rep = decide_equivalence(&jet(&sa)?, &jet(&sb)?)?;
    let mut report = ReportFile::new(Operation {
        command: "equivalence".into(),
        point: Some(point_strings(&p)),
        ..Operation::default()
    });
    report.inputs.push(InputDigest::of("a", a));
    report.inputs.push(InputDigest::of("b", b));
    report.case = Some(rep.case.as_str().into());
    report.blocks.extend(rep.blocks_a.iter().map(|x| Block::from_named("a.", x)));
    report.blocks.extend(rep.blocks_b.iter().map(|x| Block::from_named("b.", x)));
    if let Some(x) = &rep.conjugator {
        report.blocks.push(Block::from_named("", &NamedBlock::from_matrix("conjugator", x)));
    }
    report.sup_norm = rep.sup_norm.is_finite().then_some(rep.sup_norm);
    report.verdict = Some(rep.verdict.as_str().into());
    report.differing = rep.differing.clone();
    report.notes.push(rep.note.clone());
    Ok(report)
}

/// Acts on a section by a gauge element or a diffeomorphism.
pub fn transform(by: &[u8], input: &[u8], limits: &Limits) -> Result<FieldSpecFile> {
    let g = load_section(by, limits)?;
    let s = load_section(input, limits)?;
    if g.base_dim() != s.base_dim() {
        return Err(CliError::Argument("group element and section have different base dimensions".into()));
    }
    let out = match (&g, &s) {
        (Section::Gauge(phi), Section::Connection(c)) => Section::Connection(gauge_transform(c, phi)?),
        (Section::GradedGauge(gp, gm), Section::Superconnection(sc)) => {
            Section::Superconnection(super_gauge_transform(sc, gp, gm)?)
        }
        (Section::Diffeo(phi), Section::Form(t)) => Section::Form(pullback_form(t, phi)?),
        (Section::Diffeo(phi), Section::Metric(m)) => Section::Metric(pullback_metric(m, phi)?),
        (Section::Diffeo(phi), Section::Acs(j)) => Section::Acs(pullback_acs(j, phi)?),
        _ => {
            return Err(CliError::Argument(format!(
                "cannot act by {} ({}) on a {} section",
                g.case().as_str(),
                if matches!(g, Section::GradedGauge(..)) { "graded" } else { "ungraded" },
                s.case().as_str()
            )))
        }
    };
    Ok(out.to_spec())
}

//! ℤ₂-graded bundles ξ₊ ⊕ ξ₋, superconnections ∇ + χ, and the two
//! supercurvatures: Quillen's (χ², ∇χ, F) and the obstruction variant
//! (χ, ∇χ, F).

use crate::curvature::{gauge_transform, yang_mills_curvature, ConnectionField};
use crate::error::{arg_err, Error, Result};
use crate::jets::{prolong_connection, Jet1Super};
use crate::polyfield::{GaugeElement, PolyMatrix};
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GradedBundleSpec {
    pub base_dim: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl GradedBundleSpec {
    pub fn new(base_dim: usize, n_plus: usize, n_minus: usize) -> Result<Self> {
        if base_dim == 0 || n_plus == 0 || n_minus == 0 {
            return arg_err("graded bundle needs positive base and fiber dimensions");
        }
        Ok(GradedBundleSpec { base_dim, n_plus, n_minus })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip_by(self, form_degree: usize) -> Parity {
        match (self, form_degree % 2) {
            (p, 0) => p,
            (Parity::Even, _) => Parity::Odd,
            (Parity::Odd, _) => Parity::Even,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Endomorphism of ξ₊ ⊕ ξ₋ in block form with a declared parity: even blocks
/// are diagonal, odd blocks off-diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    pub pp: PolyMatrix,
    pub pm: PolyMatrix,
    pub mp: PolyMatrix,
    pub mm: PolyMatrix,
    parity: Parity,
}

impl BlockMatrix {
    pub fn even(pp: PolyMatrix, mm: PolyMatrix) -> Self {
        let nvars = pp.nvars();
        let pm = PolyMatrix::zeros(pp.rows(), mm.cols(), nvars);
        let mp = PolyMatrix::zeros(mm.rows(), pp.cols(), nvars);
        BlockMatrix { pp, pm, mp, mm, parity: Parity::Even }
    }

    pub fn odd(pm: PolyMatrix, mp: PolyMatrix) -> Self {
        let nvars = pm.nvars();
        let pp = PolyMatrix::zeros(pm.rows(), pm.rows(), nvars);
        let mm = PolyMatrix::zeros(mp.rows(), mp.rows(), nvars);
        BlockMatrix { pp, pm, mp, mm, parity: Parity::Odd }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.pp.is_zero() && self.pm.is_zero() && self.mp.is_zero() && self.mm.is_zero()
    }

    pub fn blocks(&self) -> [(&'static str, &PolyMatrix); 4] {
        [("++", &self.pp), ("+-", &self.pm), ("-+", &self.mp), ("--", &self.mm)]
    }

    pub fn map(&self, f: impl Fn(&PolyMatrix) -> Result<PolyMatrix>) -> Result<Self> {
        Ok(BlockMatrix { pp: f(&self.pp)?, pm: f(&self.pm)?, mp: f(&self.mp)?, mm: f(&self.mm)?, parity: self.parity })
    }

    /// diag(φ₊, φ₋)⁻¹ · self · diag(φ₊, φ₋).
    pub fn conjugate(&self, gp: &GaugeElement, gm: &GaugeElement) -> Result<Self> {
        let c = |l: &GaugeElement, x: &PolyMatrix, r: &GaugeElement| l.inverse().checked_mul(x)?.checked_mul(r.phi());
        Ok(BlockMatrix {
            pp: c(gp, &self.pp, gp)?,
            pm: c(gp, &self.pm, gm)?,
            mp: c(gm, &self.mp, gp)?,
            mm: c(gm, &self.mm, gm)?,
            parity: self.parity,
        })
    }

    pub fn eval_at(&self, point: &[Q]) -> Result<Self> {
        let n = self.pp.nvars();
        self.map(|b| Ok(PolyMatrix::constant(&b.eval(point)?, n)))
    }
}

/// ∇_s = ∇₊ ⊕ ∇₋ + χ with χ_{+−}: ξ₋ → ξ₊ and χ_{−+}: ξ₊ → ξ₋.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperconnectionField {
    plus: ConnectionField,
    minus: ConnectionField,
    chi_pm: PolyMatrix,
    chi_mp: PolyMatrix,
}

impl SuperconnectionField {
    pub fn new(plus: ConnectionField, minus: ConnectionField, chi_pm: PolyMatrix, chi_mp: PolyMatrix) -> Result<Self> {
        let m = plus.base_dim();
        let (np, nm) = (plus.fiber_dim(), minus.fiber_dim());
        if minus.base_dim() != m {
            return arg_err("graded connections live on different bases");
        }
        if chi_pm.shape() != (np, nm) || chi_mp.shape() != (nm, np) || chi_pm.nvars() != m || chi_mp.nvars() != m {
            return arg_err(format!("odd blocks must be {np}x{nm} and {nm}x{np} in {m} variables"));
        }
        Ok(SuperconnectionField { plus, minus, chi_pm, chi_mp })
    }

    pub fn spec(&self) -> GradedBundleSpec {
        GradedBundleSpec { base_dim: self.plus.base_dim(), n_plus: self.plus.fiber_dim(), n_minus: self.minus.fiber_dim() }
    }

    pub fn plus(&self) -> &ConnectionField {
        &self.plus
    }

    pub fn minus(&self) -> &ConnectionField {
        &self.minus
    }

    pub fn chi_pm(&self) -> &PolyMatrix {
        &self.chi_pm
    }

    pub fn chi_mp(&self) -> &PolyMatrix {
        &self.chi_mp
    }

    /// The odd endomorphism χ as a block matrix.
    pub fn chi(&self) -> BlockMatrix {
        BlockMatrix::odd(self.chi_pm.clone(), self.chi_mp.clone())
    }

    pub fn degree(&self) -> u32 {
        [self.plus.degree(), self.minus.degree(), self.chi_pm.degree(), self.chi_mp.degree()].into_iter().max().unwrap_or(0)
    }
}

/// ∇_sψ split by form degree: the 1-form part (∇₊ψ₊, ∇₋ψ₋) and the
/// 0-form part (χ_{+−}ψ₋, χ_{−+}ψ₊).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperAction {
    pub one_form_plus: Vec<PolyMatrix>,
    pub one_form_minus: Vec<PolyMatrix>,
    pub zero_form_plus: PolyMatrix,
    pub zero_form_minus: PolyMatrix,
}

pub fn apply_superconnection(
    s: &SuperconnectionField,
    psi_plus: &PolyMatrix,
    psi_minus: &PolyMatrix,
) -> Result<SuperAction> {
    if psi_plus.cols() != psi_minus.cols() {
        return arg_err("graded section halves have different column counts");
    }
    Ok(SuperAction {
        one_form_plus: s.plus.apply(psi_plus)?,
        one_form_minus: s.minus.apply(psi_minus)?,
        zero_form_plus: s.chi_pm.checked_mul(psi_minus)?,
        zero_form_minus: s.chi_mp.checked_mul(psi_plus)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuperVariant {
    /// (χ², ∇χ, F).
    Quillen,
    /// (χ, ∇χ, F).
    Obstruction,
}

/// Supercurvature split by form degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperCurvatureValue {
    pub variant: SuperVariant,
    pub deg0: BlockMatrix,
    /// ∇_μχ, indexed by μ.
    pub deg1: Vec<BlockMatrix>,
    /// diag(F₊, F₋)_{μν}, indexed [μ][ν].
    pub deg2: Vec<BlockMatrix>,
}

impl SuperCurvatureValue {
    pub fn is_zero(&self) -> bool {
        self.deg0.is_zero() && self.deg1.iter().all(BlockMatrix::is_zero) && self.deg2.iter().all(BlockMatrix::is_zero)
    }

    /// Parity of the degree-k part as an operator on ξ-valued forms
    /// (block parity plus form degree).
    pub fn total_parity(&self, degree: usize) -> Parity {
        let block = match degree {
            0 => self.deg0.parity(),
            1 => Parity::Odd,
            _ => Parity::Even,
        };
        block.flip_by(degree)
    }

    pub fn map(&self, f: impl Fn(&BlockMatrix) -> Result<BlockMatrix>) -> Result<Self> {
        Ok(SuperCurvatureValue {
            variant: self.variant,
            deg0: f(&self.deg0)?,
            deg1: self.deg1.iter().map(&f).collect::<Result<_>>()?,
            deg2: self.deg2.iter().map(&f).collect::<Result<_>>()?,
        })
    }

    pub fn eval_at(&self, point: &[Q]) -> Result<Self> {
        self.map(|b| b.eval_at(point))
    }

    pub fn conjugate(&self, gp: &GaugeElement, gm: &GaugeElement) -> Result<Self> {
        self.map(|b| b.conjugate(gp, gm))
    }
}

/// ∇_μχ blocks: ∂_μχ_{+−} + A₊μχ_{+−} − χ_{+−}A₋μ and the mirrored block.
fn covariant_chi(s: &SuperconnectionField) -> Result<Vec<BlockMatrix>> {
    (0..s.plus.base_dim())
        .map(|mu| {
            let (ap, am) = (s.plus.coefficient(mu), s.minus.coefficient(mu));
            let pm = s.chi_pm.partial(mu)?.checked_add(&ap.checked_mul(&s.chi_pm)?)?.checked_sub(&s.chi_pm.checked_mul(am)?)?;
            let mp = s.chi_mp.partial(mu)?.checked_add(&am.checked_mul(&s.chi_mp)?)?.checked_sub(&s.chi_mp.checked_mul(ap)?)?;
            Ok(BlockMatrix::odd(pm, mp))
        })
        .collect()
}

fn graded_curvature(s: &SuperconnectionField) -> Result<Vec<BlockMatrix>> {
    let m = s.plus.base_dim();
    if m < 2 {
        return Ok(Vec::new());
    }
    let fp = yang_mills_curvature(&s.plus)?;
    let fm = yang_mills_curvature(&s.minus)?;
    Ok(fp.components().iter().zip(fm.components()).map(|(a, b)| BlockMatrix::even(a.clone(), b.clone())).collect())
}

/// Quillen's supercurvature χ² + d^∇χ + F.
pub fn quillen_supercurvature(s: &SuperconnectionField) -> Result<SuperCurvatureValue> {
    let deg0 = BlockMatrix::even(s.chi_pm.checked_mul(&s.chi_mp)?, s.chi_mp.checked_mul(&s.chi_pm)?);
    Ok(SuperCurvatureValue { variant: SuperVariant::Quillen, deg0, deg1: covariant_chi(s)?, deg2: graded_curvature(s)? })
}

/// The obstruction supercurvature (χ, ∇χ, F).
pub fn obstruction_supercurvature(s: &SuperconnectionField) -> Result<SuperCurvatureValue> {
    Ok(SuperCurvatureValue {
        variant: SuperVariant::Obstruction,
        deg0: s.chi(),
        deg1: covariant_chi(s)?,
        deg2: graded_curvature(s)?,
    })
}

/// Even gauge action: A± ↦ φ±⁻¹A±φ± + φ±⁻¹∂φ±, χ_{+−} ↦ φ₊⁻¹χ_{+−}φ₋,
/// χ_{−+} ↦ φ₋⁻¹χ_{−+}φ₊.
pub fn super_gauge_transform(
    s: &SuperconnectionField,
    gp: &GaugeElement,
    gm: &GaugeElement,
) -> Result<SuperconnectionField> {
    let spec = s.spec();
    if gp.dim() != spec.n_plus || gm.dim() != spec.n_minus {
        return Err(Error::Argument("gauge pair does not match the grading".into()));
    }
    let chi_pm = gp.inverse().checked_mul(&s.chi_pm)?.checked_mul(gm.phi())?;
    let chi_mp = gm.inverse().checked_mul(&s.chi_mp)?.checked_mul(gp.phi())?;
    SuperconnectionField::new(gauge_transform(&s.plus, gp)?, gauge_transform(&s.minus, gm)?, chi_pm, chi_mp)
}

/// 1-jet of a superconnection at `point`.
pub fn prolong_super(s: &SuperconnectionField, point: &[Q]) -> Result<Jet1Super> {
    let m = s.plus.base_dim();
    let d = |c: &PolyMatrix| (0..m).map(|mu| c.partial(mu)?.eval(point)).collect::<Result<Vec<_>>>();
    Jet1Super::new(
        prolong_connection(&s.plus, point)?,
        prolong_connection(&s.minus, point)?,
        s.chi_pm.eval(point)?,
        s.chi_mp.eval(point)?,
        d(&s.chi_pm)?,
        d(&s.chi_mp)?,
    )
}

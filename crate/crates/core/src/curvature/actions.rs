//! Group actions on fields: gauge transformations and diffeomorphism
//! pullbacks.

use crate::curvature::acs::AlmostComplex;
use crate::curvature::forms::ConnectionField;
use crate::curvature::metric::MetricField;
use crate::error::{arg_err, Result};
use crate::polyfield::{index_tuples, GaugeElement, Poly, PolyMap, PolyMatrix, Slot, SlotKind, TensorField};

/// φ*A_μ = φ⁻¹A_μφ + φ⁻¹∂_μφ.
pub fn gauge_transform(conn: &ConnectionField, g: &GaugeElement) -> Result<ConnectionField> {
    let m = conn.base_dim();
    if g.dim() != conn.fiber_dim() || g.phi().nvars() != m {
        return arg_err("gauge element does not match the bundle");
    }
    let (phi, inv) = (g.phi(), g.inverse());
    let a = (0..m)
        .map(|mu| {
            let conj = inv.checked_mul(conn.coefficient(mu))?.checked_mul(phi)?;
            conj.checked_add(&inv.checked_mul(&phi.partial(mu)?)?)
        })
        .collect::<Result<Vec<_>>>()?;
    ConnectionField::new(a)
}

/// The pure-gauge connection φ⁻¹∂φ.
pub fn pure_gauge(g: &GaugeElement) -> Result<ConnectionField> {
    let m = g.phi().nvars();
    gauge_transform(&ConnectionField::zero(m, g.dim()), g)
}

fn check_map(m: usize, phi: &PolyMap) -> Result<()> {
    if phi.dim() != m {
        return arg_err("diffeomorphism dimension differs from the field's base");
    }
    Ok(())
}

/// (φ*ω)_{μ₁…μ_k} = ∂_{μ₁}φ^{α₁}⋯∂_{μ_k}φ^{α_k} ω_{α₁…α_k}(φ(x)).
pub fn pullback_form(omega: &TensorField, phi: &PolyMap) -> Result<TensorField> {
    let m = omega.nvars();
    check_map(m, phi)?;
    if omega.slots().iter().any(|s| s.kind != SlotKind::BaseCovariant || s.dim != m) {
        return arg_err("pullback expects a covariant tensor on the base");
    }
    let k = omega.rank();
    let jac = phi.jacobian();
    let moved = omega
        .components()
        .iter()
        .map(|p| p.substitute(phi.comps()))
        .collect::<Result<Vec<_>>>()?;
    let moved = TensorField::from_components(m, omega.slots().to_vec(), moved)?;
    let alphas = index_tuples(&vec![m; k]);
    let out = TensorField::from_fn(m, vec![Slot::cov(m); k], |mu| {
        let mut acc = Poly::zero(m);
        for a in &alphas {
            let c = moved.get(a);
            if c.is_zero() {
                continue;
            }
            let f = (0..k).fold(c.clone(), |f, s| &f * &jac[(a[s], mu[s])]);
            acc = acc + f;
        }
        acc
    });
    let mut out = out;
    for sym in omega.symmetries() {
        out = out.with_symmetry(*sym)?;
    }
    Ok(out)
}

/// φ*g = Dφᵀ·g(φ(x))·Dφ.
pub fn pullback_metric(g: &MetricField, phi: &PolyMap) -> Result<MetricField> {
    check_map(g.dim(), phi)?;
    let jac = phi.jacobian();
    let moved = g.matrix().substitute(phi.comps())?;
    MetricField::new(jac.transpose().checked_mul(&moved)?.checked_mul(&jac)?)
}

/// φ*J = Dφ⁻¹·J(φ(x))·Dφ; the Jacobian must be unipotent so that its
/// inverse is polynomial.
pub fn pullback_acs(acs: &AlmostComplex, phi: &PolyMap) -> Result<AlmostComplex> {
    check_map(acs.dim(), phi)?;
    let jac = phi.jacobian();
    let jac_inv = jac.unipotent_inverse()?;
    let moved = acs.matrix().substitute(phi.comps())?;
    AlmostComplex::new(jac_inv.checked_mul(&moved)?.checked_mul(&jac)?)
}

/// Conjugation φ⁻¹·M·φ of a single endomorphism field.
pub fn conjugate(m: &PolyMatrix, g: &GaugeElement) -> Result<PolyMatrix> {
    g.inverse().checked_mul(m)?.checked_mul(g.phi())
}

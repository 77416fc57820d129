//! Vertical automorphism 2-jets acting on connection 1-jets, and the
//! normal form whose invariant is the curvature at the point.

use crate::error::{arg_err, Error, Result};
use crate::jets::{Jet1Connection, Jet2VertAut};
use crate::linalg::QMatrix;
use crate::polyfield::qr;

fn check_match(aut: &Jet2VertAut, j: &Jet1Connection) -> Result<()> {
    if aut.base_dim() != j.base_dim() || aut.fiber_dim() != j.fiber_dim() {
        return arg_err("automorphism jet and connection jet have different shapes");
    }
    Ok(())
}

/// Action of a normalized 2-jet 1 + B_αx^α + ½B_{αβ}x^αx^β:
/// A_μ ↦ A_μ + B_μ, ∂_αA_μ ↦ ∂_αA_μ + A_μB_α − B_αA_μ − B_αB_μ + B_{μα}.
pub fn act_on_connection_jet(aut: &Jet2VertAut, j: &Jet1Connection) -> Result<Jet1Connection> {
    check_match(aut, j)?;
    if !aut.is_normalized() {
        return Err(Error::Unsupported(
            "automorphism jet must start with the identity; use act_on_connection_jet_general".into(),
        ));
    }
    let m = j.base_dim();
    let a = (0..m).map(|mu| j.a(mu) + aut.b(mu)).collect();
    let mut da = Vec::with_capacity(m * m);
    for mu in 0..m {
        for al in 0..m {
            let t = &(j.da(mu, al) + &(j.a(mu) * aut.b(al))) - &(aut.b(al) * j.a(mu));
            let t = &(&t - &(aut.b(al) * aut.b(mu))) + aut.b2(mu, al);
            da.push(t);
        }
    }
    Jet1Connection::new(a, da)
}

/// Action of an arbitrary 2-jet B0·(1 + B0⁻¹B_αx^α + ½B0⁻¹B_{αβ}x^αx^β):
/// constant conjugation by B0 followed by the normalized action.
pub fn act_on_connection_jet_general(aut: &Jet2VertAut, j: &Jet1Connection) -> Result<Jet1Connection> {
    check_match(aut, j)?;
    let m = j.base_dim();
    let b0 = aut.b0();
    let inv = b0.inverse().ok_or_else(|| Error::Internal("singular B0 passed validation".into()))?;
    let conj = |x: &QMatrix| &(&inv * x) * b0;
    let moved = Jet1Connection::new(j.values().iter().map(conj).collect(), j.derivatives().iter().map(conj).collect())?;
    let b = (0..m).map(|a| &inv * aut.b(a)).collect();
    let mut b2 = Vec::with_capacity(m * m);
    for a in 0..m {
        for c in 0..m {
            b2.push(&inv * aut.b2(a, c));
        }
    }
    act_on_connection_jet(&Jet2VertAut::normalized(b, b2)?, &moved)
}

/// Normal form, the witness reaching it, and the curvature invariant
/// F_{μα} (indexed [μ][α]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionReduction {
    pub normal_form: Jet1Connection,
    pub witness: Jet2VertAut,
    pub invariant: Vec<QMatrix>,
}

/// Kills A_μ with B_μ = −A_μ, then the symmetric part of
/// Ã_{μα} = ∂_αA_μ − A_μA_α with B_{μα} = −½(Ã_{μα} + Ã_{αμ}).
/// The invariant is Ã_{αμ} − Ã_{μα} = F_{μα}(x₀); the normal form keeps
/// ½(Ã_{μα} − Ã_{αμ}) = −½F_{μα} as its derivative part.
pub fn reduce_connection_jet(j: &Jet1Connection) -> Result<ConnectionReduction> {
    let m = j.base_dim();
    let tilde = |mu: usize, al: usize| j.da(mu, al) - &(j.a(mu) * j.a(al));
    let half = qr(1, 2);
    let b: Vec<QMatrix> = (0..m).map(|mu| -j.a(mu)).collect();
    let mut b2 = Vec::with_capacity(m * m);
    let mut invariant = Vec::with_capacity(m * m);
    for mu in 0..m {
        for al in 0..m {
            let (t1, t2) = (tilde(mu, al), tilde(al, mu));
            b2.push(-&(&t1 + &t2).scale(&half));
            invariant.push(&t2 - &t1);
        }
    }
    let witness = Jet2VertAut::normalized(b, b2)?;
    let normal_form = act_on_connection_jet(&witness, j)?;
    Ok(ConnectionReduction { normal_form, witness, invariant })
}

/// A normalized 2-jet h with h·j1 = j2, when the invariants agree.
pub fn witness_between(j1: &Jet1Connection, j2: &Jet1Connection) -> Result<Option<Jet2VertAut>> {
    if j1.base_dim() != j2.base_dim() || j1.fiber_dim() != j2.fiber_dim() {
        return arg_err("connection jets of different shape");
    }
    let r1 = reduce_connection_jet(j1)?;
    let r2 = reduce_connection_jet(j2)?;
    if r1.invariant != r2.invariant {
        return Ok(None);
    }
    Ok(Some(r1.witness.compose(&r2.witness.inverse()?)?))
}

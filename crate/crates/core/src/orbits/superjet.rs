//! Pairs of vertical automorphism 2-jets acting on superconnection 1-jets,
//! and the normal form whose invariant is (χ, ∇χ, F₊, F₋) at the point.

use crate::error::{arg_err, Error, Result};
use crate::jets::{Jet1Super, Jet2VertAut};
use crate::linalg::QMatrix;
use crate::orbits::connection::{act_on_connection_jet, reduce_connection_jet};
use crate::supergeometry::SuperCurvatureValue;
use crate::Q;

/// Even automorphism jet (φ₊, φ₋).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperAut {
    pub plus: Jet2VertAut,
    pub minus: Jet2VertAut,
}

impl SuperAut {
    pub fn identity(base_dim: usize, n_plus: usize, n_minus: usize) -> Self {
        SuperAut { plus: Jet2VertAut::identity(base_dim, n_plus), minus: Jet2VertAut::identity(base_dim, n_minus) }
    }

    pub fn compose(&self, other: &SuperAut) -> Result<Self> {
        Ok(SuperAut { plus: self.plus.compose(&other.plus)?, minus: self.minus.compose(&other.minus)? })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(SuperAut { plus: self.plus.inverse()?, minus: self.minus.inverse()? })
    }
}

/// Normalized action: each graded connection block moves as in the
/// connection case, the odd blocks keep their value and
/// ∂χ_{+−} ↦ ∂χ_{+−} − φ₊χ_{+−} + χ_{+−}φ₋, ∂χ_{−+} ↦ ∂χ_{−+} − φ₋χ_{−+} + χ_{−+}φ₊.
pub fn act_on_super_jet(aut: &SuperAut, j: &Jet1Super) -> Result<Jet1Super> {
    let m = j.base_dim();
    let (np, nm) = j.grading();
    if aut.plus.base_dim() != m || aut.minus.base_dim() != m || aut.plus.fiber_dim() != np || aut.minus.fiber_dim() != nm
    {
        return arg_err("automorphism pair does not match the grading");
    }
    if !aut.plus.is_normalized() || !aut.minus.is_normalized() {
        return Err(Error::Unsupported("super automorphism jets must start with the identity".into()));
    }
    let dchi_pm = (0..m)
        .map(|mu| &(&j.dchi_pm[mu] - &(aut.plus.b(mu) * &j.chi_pm)) + &(&j.chi_pm * aut.minus.b(mu)))
        .collect();
    let dchi_mp = (0..m)
        .map(|mu| &(&j.dchi_mp[mu] - &(aut.minus.b(mu) * &j.chi_mp)) + &(&j.chi_mp * aut.plus.b(mu)))
        .collect();
    Jet1Super::new(
        act_on_connection_jet(&aut.plus, &j.plus)?,
        act_on_connection_jet(&aut.minus, &j.minus)?,
        j.chi_pm.clone(),
        j.chi_mp.clone(),
        dchi_pm,
        dchi_mp,
    )
}

/// (χ_{+−}, χ_{−+}, ∇_μχ_{+−}, ∇_μχ_{−+}, F₊, F₋) at the point; the
/// curvature families are indexed [μ][ν].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperInvariant {
    pub chi_pm: QMatrix,
    pub chi_mp: QMatrix,
    pub nabla_chi_pm: Vec<QMatrix>,
    pub nabla_chi_mp: Vec<QMatrix>,
    pub f_plus: Vec<QMatrix>,
    pub f_minus: Vec<QMatrix>,
}

impl SuperInvariant {
    /// The same data read off an obstruction supercurvature evaluated at `point`.
    pub fn from_curvature(c: &SuperCurvatureValue, point: &[Q]) -> Result<Self> {
        let m = point.len();
        let ev = |p: &crate::PolyMatrix| p.eval(point);
        let (f_plus, f_minus) = if c.deg2.is_empty() {
            let np = c.deg0.pp.rows();
            let nm = c.deg0.mm.rows();
            (vec![QMatrix::zeros(np, np); m * m], vec![QMatrix::zeros(nm, nm); m * m])
        } else {
            (
                c.deg2.iter().map(|b| ev(&b.pp)).collect::<Result<_>>()?,
                c.deg2.iter().map(|b| ev(&b.mm)).collect::<Result<_>>()?,
            )
        };
        Ok(SuperInvariant {
            chi_pm: ev(&c.deg0.pm)?,
            chi_mp: ev(&c.deg0.mp)?,
            nabla_chi_pm: c.deg1.iter().map(|b| ev(&b.pm)).collect::<Result<_>>()?,
            nabla_chi_mp: c.deg1.iter().map(|b| ev(&b.mp)).collect::<Result<_>>()?,
            f_plus,
            f_minus,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperReduction {
    pub normal_form: Jet1Super,
    pub witness: SuperAut,
    pub invariant: SuperInvariant,
}

/// Kills A±_μ with φ±_μ = −A±_μ, then the symmetric part of
/// Ã±_{μρ} = ∂_ρA±_μ − A±_μA±_ρ; the odd derivative blocks become
/// ∂χ_{+−} + A₊χ_{+−} − χ_{+−}A₋ and ∂χ_{−+} + A₋χ_{−+} − χ_{−+}A₊.
pub fn reduce_super_jet(j: &Jet1Super) -> Result<SuperReduction> {
    let rp = reduce_connection_jet(&j.plus)?;
    let rm = reduce_connection_jet(&j.minus)?;
    let witness = SuperAut { plus: rp.witness, minus: rm.witness };
    let normal_form = act_on_super_jet(&witness, j)?;
    let invariant = SuperInvariant {
        chi_pm: normal_form.chi_pm.clone(),
        chi_mp: normal_form.chi_mp.clone(),
        nabla_chi_pm: normal_form.dchi_pm.clone(),
        nabla_chi_mp: normal_form.dchi_mp.clone(),
        f_plus: rp.invariant,
        f_minus: rm.invariant,
    };
    Ok(SuperReduction { normal_form, witness, invariant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::jets::{prolong_gauge, Jet1Connection};
    use crate::polyfield::q;
    use crate::supergeometry::{obstruction_supercurvature, prolong_super, super_gauge_transform};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(13)
    }

    #[test]
    fn identity_acts_trivially() {
        let j = gen::jet1_super(&mut rng(), 2, 2, 1);
        assert_eq!(act_on_super_jet(&SuperAut::identity(2, 2, 1), &j).unwrap(), j);
    }

    #[test]
    fn killing_values_gives_tilded_blocks() {
        let mut r = rng();
        let (m, np, nm) = (2, 2, 1);
        let j = gen::jet1_super(&mut r, m, np, nm);
        let kill = |c: &Jet1Connection| {
            let n = c.fiber_dim();
            Jet2VertAut::normalized((0..m).map(|mu| -c.a(mu)).collect(), vec![QMatrix::zeros(n, n); m * m]).unwrap()
        };
        let aut = SuperAut { plus: kill(&j.plus), minus: kill(&j.minus) };
        let out = act_on_super_jet(&aut, &j).unwrap();
        for mu in 0..m {
            for rho in 0..m {
                assert_eq!(out.plus.da(mu, rho), &(j.plus.da(mu, rho) - &(j.plus.a(mu) * j.plus.a(rho))));
                assert_eq!(out.minus.da(mu, rho), &(j.minus.da(mu, rho) - &(j.minus.a(mu) * j.minus.a(rho))));
            }
            let pm = &(&j.dchi_pm[mu] + &(j.plus.a(mu) * &j.chi_pm)) - &(&j.chi_pm * j.minus.a(mu));
            assert_eq!(out.dchi_pm[mu], pm);
        }
    }

    #[test]
    fn action_is_a_right_action() {
        let mut r = rng();
        for _ in 0..20 {
            let j = gen::jet1_super(&mut r, 2, 2, 2);
            let h1 = gen::super_aut_normalized(&mut r, 2, 2, 2);
            let h2 = gen::super_aut_normalized(&mut r, 2, 2, 2);
            let seq = act_on_super_jet(&h2, &act_on_super_jet(&h1, &j).unwrap()).unwrap();
            assert_eq!(seq, act_on_super_jet(&h1.compose(&h2).unwrap(), &j).unwrap());
        }
    }

    #[test]
    fn jet_of_gauge_transform_is_jet_action() {
        let mut r = rng();
        for _ in 0..10 {
            let (m, np, nm) = (2, 2, 1);
            let s = gen::superconnection(&mut r, m, np, nm, 2);
            let origin = vec![q(0); m];
            let gp = gen::origin_normalized_gauge(&mut r, np, m, 2);
            let gm = gen::origin_normalized_gauge(&mut r, nm, m, 2);
            let lhs = prolong_super(&super_gauge_transform(&s, &gp, &gm).unwrap(), &origin).unwrap();
            let aut = SuperAut { plus: prolong_gauge(&gp, &origin).unwrap(), minus: prolong_gauge(&gm, &origin).unwrap() };
            assert_eq!(lhs, act_on_super_jet(&aut, &prolong_super(&s, &origin).unwrap()).unwrap());
        }
    }

    #[test]
    fn reduction_matches_obstruction_supercurvature() {
        let mut r = rng();
        for _ in 0..10 {
            let s = gen::superconnection(&mut r, 2, 2, 1, 2);
            let pt = gen::point(&mut r, 2);
            let red = reduce_super_jet(&prolong_super(&s, &pt).unwrap()).unwrap();
            let direct = SuperInvariant::from_curvature(&obstruction_supercurvature(&s).unwrap(), &pt).unwrap();
            assert_eq!(red.invariant, direct);
        }
    }

    #[test]
    fn trivial_connection_part_reduces_to_identity() {
        let mut r = rng();
        let mut j = gen::jet1_super(&mut r, 2, 1, 2);
        j.plus = Jet1Connection::zero(2, 1);
        j.minus = Jet1Connection::zero(2, 2);
        let red = reduce_super_jet(&j).unwrap();
        assert_eq!(red.normal_form, j);
        assert_eq!(red.invariant.nabla_chi_pm, j.dchi_pm);
        assert!(red.invariant.f_plus.iter().chain(&red.invariant.f_minus).all(QMatrix::is_zero));
        let zero = Jet1Super::new(
            Jet1Connection::zero(2, 1),
            Jet1Connection::zero(2, 1),
            QMatrix::zeros(1, 1),
            QMatrix::zeros(1, 1),
            vec![QMatrix::zeros(1, 1); 2],
            vec![QMatrix::zeros(1, 1); 2],
        )
        .unwrap();
        let inv = reduce_super_jet(&zero).unwrap().invariant;
        assert!(inv.chi_pm.is_zero() && inv.nabla_chi_mp.iter().all(QMatrix::is_zero));
    }
}

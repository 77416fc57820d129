//! Almost complex structures and the Nijenhuis tensor.

use crate::error::{arg_err, Error, Result};
use crate::polyfield::{Poly, PolyMatrix, Slot, SlotKind, SlotSymmetry, TensorField};

/// Polynomial endomorphism field J with J² = −1, stored as the matrix
/// J[(μ, ν)] = J^μ_ν so that (Jv)^μ = J^μ_ν v^ν.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostComplex {
    j: PolyMatrix,
}

impl AlmostComplex {
    pub fn new(j: PolyMatrix) -> Result<Self> {
        let m = j.rows();
        if j.cols() != m || j.nvars() != m {
            return arg_err("almost complex structure must be m×m in m coordinates");
        }
        if !m.is_multiple_of(2) {
            return arg_err(format!("almost complex structure needs even dimension, got {m}"));
        }
        let sq = &j.checked_mul(&j)? + &PolyMatrix::identity(m, m);
        for a in 0..m {
            for b in 0..m {
                if !sq[(a, b)].is_zero() {
                    return Err(Error::InvalidSection(format!(
                        "J² ≠ −1: component ({},{}) of J² + 1 is {}",
                        a + 1,
                        b + 1,
                        sq[(a, b)]
                    )));
                }
            }
        }
        Ok(AlmostComplex { j })
    }

    /// J₀∂_i = ∂_{l+i}, J₀∂_{l+i} = −∂_i with l = m/2.
    pub fn canonical(m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return arg_err(format!("canonical structure needs positive even dimension, got {m}"));
        }
        let l = m / 2;
        let mut j = PolyMatrix::zeros(m, m, m);
        for i in 0..l {
            j[(l + i, i)] = Poly::one(m);
            j[(i, l + i)] = Poly::from_int(m, -1);
        }
        Ok(AlmostComplex { j })
    }

    /// Block-diagonal structure J∂_{2i−1} = ∂_{2i}, J∂_{2i} = −∂_{2i−1}.
    pub fn block_canonical(m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return arg_err(format!("canonical structure needs positive even dimension, got {m}"));
        }
        let mut j = PolyMatrix::zeros(m, m, m);
        for i in 0..m / 2 {
            j[(2 * i + 1, 2 * i)] = Poly::one(m);
            j[(2 * i, 2 * i + 1)] = Poly::from_int(m, -1);
        }
        Ok(AlmostComplex { j })
    }

    pub fn from_tensor(t: &TensorField) -> Result<Self> {
        let m = t.nvars();
        if t.slots() != [Slot::contra(m), Slot::cov(m)] {
            return arg_err("almost complex structure needs slots (base_contra, base_cov)");
        }
        AlmostComplex::new(PolyMatrix::from_fn(m, m, m, |a, b| t.get(&[a, b]).clone()))
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.j
    }

    pub fn to_tensor(&self) -> TensorField {
        let m = self.dim();
        TensorField::from_fn(m, vec![Slot::contra(m), Slot::cov(m)], |i| self.j[(i[0], i[1])].clone())
    }

    /// (JX)^μ = J^μ_ν X^ν.
    pub fn apply(&self, v: &[Poly]) -> Result<Vec<Poly>> {
        check_field(self.dim(), v)?;
        let m = self.dim();
        Ok((0..m).map(|mu| (0..m).fold(Poly::zero(m), |acc, nu| acc + &self.j[(mu, nu)] * &v[nu])).collect())
    }
}

fn check_field(m: usize, v: &[Poly]) -> Result<()> {
    if v.len() != m || v.iter().any(|p| p.nvars() != m) {
        return arg_err(format!("vector field must have {m} components in {m} variables"));
    }
    Ok(())
}

/// Coordinate vector field ∂_i.
pub fn coordinate_field(m: usize, i: usize) -> Vec<Poly> {
    (0..m).map(|k| if k == i { Poly::one(m) } else { Poly::zero(m) }).collect()
}

/// [X, Y]^μ = X^α∂_αY^μ − Y^α∂_αX^μ.
pub fn lie_bracket(x: &[Poly], y: &[Poly]) -> Result<Vec<Poly>> {
    let m = x.len();
    check_field(m, x)?;
    check_field(m, y)?;
    (0..m)
        .map(|mu| {
            let mut acc = Poly::zero(m);
            for a in 0..m {
                acc = acc + &x[a] * &y[mu].partial(a)? - &y[a] * &x[mu].partial(a)?;
            }
            Ok(acc)
        })
        .collect()
}

/// N^ρ_{μν} = J^α_μ∂_αJ^ρ_ν − J^α_ν∂_αJ^ρ_μ − J^ρ_α∂_μJ^α_ν + J^ρ_α∂_νJ^α_μ,
/// with slots (base_contra, base_cov, base_cov), antisymmetric in the last two.
pub fn nijenhuis(acs: &AlmostComplex) -> Result<TensorField> {
    let m = acs.dim();
    let j = &acs.j;
    let dj = (0..m).map(|k| j.partial(k)).collect::<Result<Vec<_>>>()?;
    let n = TensorField::from_fn(m, vec![Slot::contra(m), Slot::cov(m), Slot::cov(m)], |i| {
        let (r, mu, nu) = (i[0], i[1], i[2]);
        let mut acc = Poly::zero(m);
        for a in 0..m {
            acc = acc + &j[(a, mu)] * &dj[a][(r, nu)] - &j[(a, nu)] * &dj[a][(r, mu)] - &j[(r, a)] * &dj[mu][(a, nu)]
                + &j[(r, a)] * &dj[nu][(a, mu)];
        }
        acc
    });
    n.with_symmetry(SlotSymmetry::Antisymmetric(1, 2))
}

/// [JX, JY] − J[X, JY] − J[JX, Y] − [X, Y].
pub fn nijenhuis_vector_form(acs: &AlmostComplex, x: &[Poly], y: &[Poly]) -> Result<Vec<Poly>> {
    let jx = acs.apply(x)?;
    let jy = acs.apply(y)?;
    let a = lie_bracket(&jx, &jy)?;
    let b = acs.apply(&lie_bracket(x, &jy)?)?;
    let c = acs.apply(&lie_bracket(&jx, y)?)?;
    let d = lie_bracket(x, y)?;
    Ok((0..x.len()).map(|k| &(&(&a[k] - &b[k]) - &c[k]) - &d[k]).collect())
}

/// N(X, Y)^ρ = N^ρ_{μν}X^μY^ν for a (1,2) tensor N.
pub fn contract_vector_valued(n: &TensorField, x: &[Poly], y: &[Poly]) -> Result<Vec<Poly>> {
    let m = n.nvars();
    let kinds: Vec<SlotKind> = n.slots().iter().map(|s| s.kind).collect();
    if kinds != [SlotKind::BaseContravariant, SlotKind::BaseCovariant, SlotKind::BaseCovariant] {
        return arg_err("expected a (1,2) tensor");
    }
    check_field(m, x)?;
    check_field(m, y)?;
    Ok((0..m)
        .map(|r| {
            let mut acc = Poly::zero(m);
            for (mu, xm) in x.iter().enumerate() {
                for (nu, yn) in y.iter().enumerate() {
                    let c = n.get(&[r, mu, nu]);
                    if !c.is_zero() {
                        acc = acc + &(c * xm) * yn;
                    }
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    /// (I + x³E₁₂)·J₀·(I − x³E₁₂) with the block-diagonal J₀.
    fn hand_instance() -> AlmostComplex {
        let m = 4;
        let j0 = AlmostComplex::block_canonical(m).unwrap();
        let mut p = PolyMatrix::identity(m, m);
        p[(0, 1)] = x(m, 2);
        let pinv = p.unipotent_inverse().unwrap();
        AlmostComplex::new(p.checked_mul(j0.matrix()).unwrap().checked_mul(&pinv).unwrap()).unwrap()
    }

    #[test]
    fn canonical_structures_are_integrable() {
        for m in [2, 4, 6] {
            assert!(nijenhuis(&AlmostComplex::canonical(m).unwrap()).unwrap().is_zero());
            assert!(nijenhuis(&AlmostComplex::block_canonical(m).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn invalid_structure_reports_component() {
        let m = 2;
        let err = AlmostComplex::new(PolyMatrix::identity(m, m)).unwrap_err();
        match err {
            Error::InvalidSection(msg) => assert!(msg.contains("(1,1)")),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(AlmostComplex::canonical(3), Err(Error::Argument(_))));
    }

    #[test]
    fn hand_instance_values() {
        // hand expansion: J = [[x³, −(x³)²−1, 0, 0], [1, −x³, 0, 0], [0, 0, 0, −1], [0, 0, 1, 0]]
        let acs = hand_instance();
        let j = acs.matrix();
        assert_eq!(j[(0, 0)], x(4, 2));
        assert_eq!(j[(0, 1)], -&(&x(4, 2).pow(2) + &Poly::one(4)));
        let n = nijenhuis(&acs).unwrap();
        let n13 = contract_vector_valued(&n, &coordinate_field(4, 0), &coordinate_field(4, 2)).unwrap();
        assert_eq!(n13, vec![x(4, 2), Poly::one(4), Poly::zero(4), Poly::zero(4)]);
        assert_eq!(*n.get(&[1, 0, 2]), Poly::one(4));
        let v = nijenhuis_vector_form(&acs, &coordinate_field(4, 0), &coordinate_field(4, 2)).unwrap();
        assert_eq!(v, n13);
    }

    #[test]
    fn coordinate_and_bracket_forms_agree() {
        let acs = hand_instance();
        let n = nijenhuis(&acs).unwrap();
        let m = 4;
        let xf: Vec<Poly> = (0..m).map(|i| &x(m, (i + 1) % m) * &x(m, 0)).collect();
        let yf: Vec<Poly> = (0..m).map(|i| &Poly::from_int(m, i as i64) + &x(m, i).pow(2)).collect();
        assert_eq!(nijenhuis_vector_form(&acs, &xf, &yf).unwrap(), contract_vector_valued(&n, &xf, &yf).unwrap());
        assert!(nijenhuis_vector_form(&acs, &xf, &xf).unwrap().iter().all(Poly::is_zero));
    }
}

use std::fmt;

use crate::error::{arg_err, Error, Result};
use crate::polyfield::poly::Poly;
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    BaseCovariant,
    BaseContravariant,
    /// Lower fiber index (ξ*).
    FiberIn,
    /// Upper fiber index (ξ).
    FiberOut,
}

impl SlotKind {
    pub fn name(self) -> &'static str {
        match self {
            SlotKind::BaseCovariant => "base_cov",
            SlotKind::BaseContravariant => "base_contra",
            SlotKind::FiberIn => "fiber_in",
            SlotKind::FiberOut => "fiber_out",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub kind: SlotKind,
    pub dim: usize,
}

impl Slot {
    pub fn cov(dim: usize) -> Self {
        Slot { kind: SlotKind::BaseCovariant, dim }
    }
    pub fn contra(dim: usize) -> Self {
        Slot { kind: SlotKind::BaseContravariant, dim }
    }
    pub fn fiber_in(dim: usize) -> Self {
        Slot { kind: SlotKind::FiberIn, dim }
    }
    pub fn fiber_out(dim: usize) -> Self {
        Slot { kind: SlotKind::FiberOut, dim }
    }
}

/// Declared (anti)symmetry between two slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotSymmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Dense row-major iteration over all index tuples of the given dimensions.
pub fn index_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut idx = vec![0; dims.len()];
    loop {
        out.push(idx.clone());
        let mut k = dims.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Indexed family of polynomial components with declared slot variances.
///
/// Components are stored densely in row-major order over the slot
/// dimensions. Symmetry flags are verified on construction.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorField {
    nvars: usize,
    slots: Vec<Slot>,
    symmetries: Vec<SlotSymmetry>,
    comps: Vec<Poly>,
}

impl TensorField {
    pub fn zeros(nvars: usize, slots: Vec<Slot>) -> Self {
        let count: usize = slots.iter().map(|s| s.dim).product();
        TensorField { nvars, slots, symmetries: Vec::new(), comps: vec![Poly::zero(nvars); count] }
    }

    pub fn from_fn(nvars: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> Poly) -> Self {
        let dims: Vec<usize> = slots.iter().map(|s| s.dim).collect();
        let comps = index_tuples(&dims)
            .iter()
            .map(|i| {
                let p = f(i);
                assert_eq!(p.nvars(), nvars, "component has the wrong variable count");
                p
            })
            .collect();
        TensorField { nvars, slots, symmetries: Vec::new(), comps }
    }

    pub fn try_from_fn(nvars: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> Result<Poly>) -> Result<Self> {
        let dims: Vec<usize> = slots.iter().map(|s| s.dim).collect();
        let comps = index_tuples(&dims).iter().map(|i| f(i)).collect::<Result<Vec<_>>>()?;
        TensorField::from_components(nvars, slots, comps)
    }

    pub fn from_components(nvars: usize, slots: Vec<Slot>, comps: Vec<Poly>) -> Result<Self> {
        let count: usize = slots.iter().map(|s| s.dim).product();
        if comps.len() != count {
            return arg_err(format!("{} components for {count} index tuples", comps.len()));
        }
        if comps.iter().any(|p| p.nvars() != nvars) {
            return arg_err("components disagree on variable count");
        }
        Ok(TensorField { nvars, slots, symmetries: Vec::new(), comps })
    }

    /// Declares a slot symmetry, failing when it does not hold identically.
    pub fn with_symmetry(mut self, sym: SlotSymmetry) -> Result<Self> {
        let (a, b) = match sym {
            SlotSymmetry::Symmetric(a, b) | SlotSymmetry::Antisymmetric(a, b) => (a, b),
        };
        if a >= self.rank() || b >= self.rank() || a == b || self.slots[a].dim != self.slots[b].dim {
            return arg_err(format!("invalid symmetry slots ({a},{b})"));
        }
        if let Some(idx) = self.symmetry_violation(sym) {
            return Err(Error::InvalidSection(format!("{sym:?} fails at component {idx:?}")));
        }
        if !self.symmetries.contains(&sym) {
            self.symmetries.push(sym);
        }
        Ok(self)
    }

    /// First index tuple where `sym` fails, if any.
    pub fn symmetry_violation(&self, sym: SlotSymmetry) -> Option<Vec<usize>> {
        let (a, b, sign) = match sym {
            SlotSymmetry::Symmetric(a, b) => (a, b, false),
            SlotSymmetry::Antisymmetric(a, b) => (a, b, true),
        };
        for idx in index_tuples(&self.dims()) {
            if idx[a] > idx[b] {
                continue;
            }
            let mut sw = idx.clone();
            sw.swap(a, b);
            let x = self.get(&idx);
            let y = self.get(&sw);
            let ok = if sign { (x + y).is_zero() } else { x == y };
            if !ok {
                return Some(idx);
            }
        }
        None
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn symmetries(&self) -> &[SlotSymmetry] {
        &self.symmetries
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.dim).collect()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.slots.len(), "index tuple has the wrong length");
        let mut off = 0;
        for (i, s) in idx.iter().zip(&self.slots) {
            assert!(*i < s.dim, "index {i} out of range for slot of dimension {}", s.dim);
            off = off * s.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Poly {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], p: Poly) {
        assert_eq!(p.nvars(), self.nvars, "component has the wrong variable count");
        let o = self.offset(idx);
        self.comps[o] = p;
        self.symmetries.clear();
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        TensorField { nvars: self.nvars, slots: self.slots.clone(), symmetries: Vec::new(), comps: self.comps.iter().map(f).collect() }
    }

    /// Components evaluated at `point`, kept as constants in the same variables.
    pub fn eval_at(&self, point: &[Q]) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .map(|p| Ok(Poly::constant(self.nvars, p.eval(point)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorField { nvars: self.nvars, slots: self.slots.clone(), symmetries: self.symmetries.clone(), comps })
    }

    pub fn checked_sub(&self, rhs: &TensorField) -> Result<Self> {
        if self.slots != rhs.slots || self.nvars != rhs.nvars {
            return arg_err("tensor shapes differ");
        }
        let comps = self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect();
        Ok(TensorField { nvars: self.nvars, slots: self.slots.clone(), symmetries: Vec::new(), comps })
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Nonzero components with their index tuples, in row-major order.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, &Poly)> {
        index_tuples(&self.dims()).into_iter().zip(&self.comps).filter(|(_, p)| !p.is_zero()).collect()
    }

    /// Largest absolute coefficient over all components.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.comps.iter().map(Poly::max_abs_coefficient).fold(0.0, f64::max)
    }

    pub fn max_degree(&self) -> u32 {
        self.comps.iter().map(Poly::degree).max().unwrap_or(0)
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kinds: Vec<&str> = self.slots.iter().map(|s| s.kind.name()).collect();
        write!(f, "TensorField{kinds:?} {{")?;
        for (idx, p) in self.nonzero() {
            write!(f, " {idx:?}: {p};")?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_count_is_product_of_dims() {
        let t = TensorField::zeros(2, vec![Slot::cov(2), Slot::cov(2), Slot::contra(2)]);
        assert_eq!(t.components().len(), 8);
        assert!(TensorField::from_components(2, vec![Slot::cov(2)], vec![Poly::zero(2)]).is_err());
    }

    #[test]
    fn symmetry_flags_are_validated() {
        let x = |i| Poly::var(2, i).unwrap();
        let anti = TensorField::from_fn(2, vec![Slot::cov(2), Slot::cov(2)], |i| match (i[0], i[1]) {
            (0, 1) => x(0),
            (1, 0) => -x(0),
            _ => Poly::zero(2),
        });
        assert!(anti.clone().with_symmetry(SlotSymmetry::Antisymmetric(0, 1)).is_ok());
        assert!(matches!(anti.with_symmetry(SlotSymmetry::Symmetric(0, 1)), Err(Error::InvalidSection(_))));
    }

    #[test]
    fn index_tuples_row_major() {
        assert_eq!(index_tuples(&[2, 2]), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(index_tuples(&[]), vec![Vec::<usize>::new()]);
    }
}

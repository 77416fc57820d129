use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{arg_err, Result};
use crate::Q;

/// Exponent vector of a monomial, one entry per coordinate.
pub type Exponent = Vec<u32>;

/// Multivariate polynomial over ℚ in a fixed number of coordinates.
///
/// Terms are kept in a sorted map with no zero coefficients, so two
/// polynomials are equal exactly when their term maps are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, q(c))
    }

    /// The coordinate function x^{i+1} (0-based index).
    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return arg_err(format!("coordinate index {i} out of range for {nvars} variables"));
        }
        let mut e = vec![0; nvars];
        e[i] = 1;
        Ok(Self::monomial(e, Q::one()))
    }

    /// Single term `c * x^e`; the exponent length fixes the variable count.
    pub fn monomial(e: Exponent, c: Q) -> Self {
        let mut p = Self::zero(e.len());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Q)>>(nvars: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return arg_err(format!("exponent of length {} in a {nvars}-variable polynomial", e.len()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coefficient(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative ∂/∂x^{dir+1}.
    pub fn partial(&self, dir: usize) -> Result<Self> {
        if dir >= self.nvars {
            return arg_err(format!("derivative direction {dir} out of range for {} variables", self.nvars));
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[dir];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[dir] = k - 1;
            out.add_term(e2, c * q(k as i64));
        }
        Ok(out)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.nvars {
            return arg_err(format!("point of length {} for a {}-variable polynomial", point.len(), self.nvars));
        }
        // Power tables per coordinate, filled up to the largest exponent used.
        let mut powers: Vec<Vec<Q>> = point.iter().map(|x| vec![Q::one(), x.clone()]).collect();
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let table = &mut powers[i];
                while table.len() <= k as usize {
                    let next = table.last().unwrap() * &point[i];
                    table.push(next);
                }
                t *= &table[k as usize];
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation, used only by finite-difference oracles and norms.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "point length mismatch");
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = q_to_f64(c);
                for (i, &k) in e.iter().enumerate() {
                    t *= point[i].powi(k as i32);
                }
                t
            })
            .sum()
    }

    /// Composition: replace x^{i+1} by `subs[i]`. All substitutes must share
    /// one variable count, which becomes the variable count of the result.
    pub fn substitute(&self, subs: &[Poly]) -> Result<Self> {
        if subs.len() != self.nvars {
            return arg_err(format!("{} substitutes for {} variables", subs.len(), self.nvars));
        }
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        if subs.iter().any(|p| p.nvars != target) {
            return arg_err("substitutes disagree on variable count");
        }
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(target), s.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let table = &mut powers[i];
                while table.len() <= k as usize {
                    let next = table.last().unwrap() * &subs[i];
                    table.push(next);
                }
                t = &t * &table[k as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// p(x + shift): re-centres a polynomial at `shift`.
    pub fn translate(&self, shift: &[Q]) -> Result<Self> {
        if shift.len() != self.nvars {
            return arg_err("shift length does not match variable count");
        }
        let subs = (0..self.nvars)
            .map(|i| Ok(&Poly::var(self.nvars, i)? + &Poly::constant(self.nvars, shift[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        self.substitute(&subs)
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| q_to_f64(&c.abs())).fold(0.0, f64::max)
    }

    /// Terms in display order: total degree descending, then exponent descending.
    fn display_order(&self) -> Vec<(&Exponent, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

pub fn q_to_f64(c: &Q) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Canonical "p/q" (or "p") rendering of a rational.
pub fn fmt_q(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.display_order().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_q(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", fmt_q(&mag))?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    #[test]
    fn partial_of_product_monomial() {
        let p = &x(2, 0) * &x(2, 1);
        assert_eq!(p.partial(0).unwrap(), x(2, 1));
    }

    #[test]
    fn partial_of_constant_is_zero() {
        assert!(Poly::from_int(2, 5).partial(1).unwrap().is_zero());
    }

    #[test]
    fn partial_power_rule() {
        // term-by-term power rule: d/dx (x^3 - 2x) = 3x^2 - 2
        let p = &x(1, 0).pow(3) - &x(1, 0).scale(&q(2));
        let expected = Poly::from_terms(1, [(vec![2], q(3)), (vec![0], q(-2))]).unwrap();
        assert_eq!(p.partial(0).unwrap(), expected);
    }

    #[test]
    fn partial_direction_out_of_range() {
        assert!(matches!(x(2, 0).partial(2), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn eval_examples() {
        let s = &x(2, 0) + &x(2, 1);
        assert_eq!(s.eval(&[q(1), q(2)]).unwrap(), q(3));
        let p = &x(2, 0).pow(2) * &x(2, 1);
        // direct substitution: 3^2 * 1/2 = 9/2
        assert_eq!(p.eval(&[q(3), qr(1, 2)]).unwrap(), qr(9, 2));
        let c = &p + &Poly::constant(2, qr(-7, 3));
        assert_eq!(c.eval(&[q(0), q(0)]).unwrap(), c.constant_term());
        assert!(p.eval(&[q(1)]).is_err());
    }

    #[test]
    fn no_zero_coefficients_stored() {
        let p = &x(2, 0) - &x(2, 0);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn display_is_canonical() {
        let p = Poly::from_terms(2, [(vec![2, 1], q(3)), (vec![0, 0], qr(-1, 2)), (vec![1, 0], q(-1))]).unwrap();
        assert_eq!(p.to_string(), "3*x1^2*x2 - x1 - 1/2");
        assert_eq!(Poly::zero(3).to_string(), "0");
        assert_eq!((-&x(1, 0).scale(&qr(2, 3))).to_string(), "-2/3*x1");
    }

    #[test]
    fn substitute_and_translate() {
        let p = &x(2, 0).pow(2) + &x(2, 1);
        let t = p.translate(&[q(1), q(0)]).unwrap();
        // (x1+1)^2 + x2
        assert_eq!(t.eval(&[q(0), q(0)]).unwrap(), q(1));
        assert_eq!(t.eval(&[q(2), q(3)]).unwrap(), q(12));
    }
}

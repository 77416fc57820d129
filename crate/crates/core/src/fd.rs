//! Floating-point finite-difference oracle for exact derivatives.

use crate::jets::{Jet1Acs, Jet1Connection};
use crate::polyfield::{q_to_f64, Poly, PolyMatrix};
use crate::Q;

/// Default step for the central difference.
pub const STEP: f64 = 1e-4;

/// (f(x + h·e_dir) − f(x − h·e_dir)) / 2h.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], dir: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[dir] += h;
    minus[dir] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// One Richardson level: (4·D(h/2) − D(h)) / 3, error O(h⁴).
pub fn richardson(f: impl Fn(&[f64]) -> f64, x: &[f64], dir: usize, h: f64) -> f64 {
    let coarse = central_difference(&f, x, dir, h);
    let fine = central_difference(&f, x, dir, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// |approx − exact| / max(1, |exact|).
pub fn relative_error(approx: f64, exact: f64) -> f64 {
    (approx - exact).abs() / exact.abs().max(1.0)
}

fn to_f64(point: &[Q]) -> Vec<f64> {
    point.iter().map(q_to_f64).collect()
}

/// Largest relative error between ∂_μp(x) and its Richardson estimate over
/// all directions μ.
pub fn poly_partials_error(p: &Poly, point: &[Q]) -> crate::Result<f64> {
    let x = to_f64(point);
    let mut worst = 0.0f64;
    for dir in 0..p.nvars() {
        let exact = q_to_f64(&p.partial(dir)?.eval(point)?);
        let approx = richardson(|y| p.eval_f64(y), &x, dir, STEP);
        worst = worst.max(relative_error(approx, exact));
    }
    Ok(worst)
}

fn entry_derivative_error(field: &PolyMatrix, row: usize, col: usize, dir: usize, exact: &Q, x: &[f64]) -> f64 {
    let p = &field[(row, col)];
    relative_error(richardson(|y| p.eval_f64(y), x, dir, STEP), q_to_f64(exact))
}

/// Compares the derivative part of a connection jet with finite differences
/// of the coefficient fields it was prolonged from.
pub fn connection_jet_error(coeffs: &[PolyMatrix], jet: &Jet1Connection, point: &[Q]) -> f64 {
    let x = to_f64(point);
    let (m, n) = (jet.base_dim(), jet.fiber_dim());
    let mut worst = 0.0f64;
    for (mu, field) in coeffs.iter().enumerate().take(m) {
        for alpha in 0..m {
            let d = jet.da(mu, alpha);
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max(entry_derivative_error(field, i, j, alpha, &d[(i, j)], &x));
                }
            }
        }
    }
    worst
}

/// Compares C^μ_{νρ} of an acs jet with finite differences of J^μ_ν.
pub fn acs_jet_error(j: &PolyMatrix, jet: &Jet1Acs, point: &[Q]) -> f64 {
    let x = to_f64(point);
    let m = jet.dim();
    let mut worst = 0.0f64;
    for mu in 0..m {
        for nu in 0..m {
            for rho in 0..m {
                worst = worst.max(entry_derivative_error(j, mu, nu, rho, jet.c().get(mu, nu, rho), &x));
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::{q, qr};

    #[test]
    fn richardson_is_exact_on_cubics() {
        let p = Poly::parse("x1^3 - 2*x1*x2 + 1/3*x2^2", 2).unwrap();
        assert!(poly_partials_error(&p, &[qr(1, 2), q(-2)]).unwrap() < 1e-9);
    }

    #[test]
    fn relative_error_floors_the_scale() {
        assert_eq!(relative_error(1e-7, 0.0), 1e-7);
        assert!((relative_error(101.0, 100.0) - 0.01).abs() < 1e-12);
    }
}

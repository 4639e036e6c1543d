//! Global lower-bound certificates for fields.
//!
//! The global minimum of `W = phi0(a) + |a-x|^2/(2t)` is searched over a
//! compact ball. The ball radius comes from a certificate of the form
//! `phi0(a) >= -c0 - c1 |a|`: outside a computable radius the quadratic
//! penalty dominates any such minorant. This module derives `(c0, c1)`
//! automatically where the expression structure allows it; callers can
//! override through the search configuration when it does not.

use crate::error::{Result, ShockError};
use crate::field::expr::{Expr, FieldExpr};
use crate::polyroots;

/// A bound of the form value >= k0 + k1 * r (lower) or <= k0 + k1 * r
/// (upper), where r = |a| >= 0, or an infinite bound.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    Affine { k0: f64, k1: f64 },
    Infinite,
}

use Bound::*;

impl Bound {
    fn constant(c: f64) -> Bound {
        Affine { k0: c, k1: 0.0 }
    }

    fn is_const(&self) -> Option<f64> {
        match self {
            Affine { k0, k1 } if *k1 == 0.0 => Some(*k0),
            _ => None,
        }
    }

    fn nonnegative(&self) -> bool {
        matches!(self, Affine { k0, k1 } if *k0 >= 0.0 && *k1 >= 0.0)
    }

    fn add(self, rhs: Bound) -> Bound {
        match (self, rhs) {
            (Affine { k0: a0, k1: a1 }, Affine { k0: b0, k1: b1 }) => Affine {
                k0: a0 + b0,
                k1: a1 + b1,
            },
            _ => Infinite,
        }
    }

    fn neg(self) -> Bound {
        match self {
            Affine { k0, k1 } => Affine { k0: -k0, k1: -k1 },
            Infinite => Infinite,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: Bound,
    hi: Bound,
}

impl Range {
    fn constant(c: f64) -> Range {
        Range {
            lo: Bound::constant(c),
            hi: Bound::constant(c),
        }
    }

    fn interval(lo: f64, hi: f64) -> Range {
        Range {
            lo: Bound::constant(lo),
            hi: Bound::constant(hi),
        }
    }

    fn const_interval(&self) -> Option<(f64, f64)> {
        Some((self.lo.is_const()?, self.hi.is_const()?))
    }

    /// An affine M(r) with |value| <= M(r), when both bounds are finite.
    fn abs_bound(&self) -> Option<(f64, f64)> {
        match (self.lo, self.hi) {
            (Affine { k0: a0, k1: a1 }, Affine { k0: b0, k1: b1 }) => {
                Some((a0.abs().max(b0.abs()), a1.abs().max(b1.abs())))
            }
            _ => None,
        }
    }
}

fn range(e: &Expr) -> Range {
    match e {
        Expr::Const(c) => Range::constant(*c),
        Expr::Var(_) => Range {
            lo: Affine { k0: 0.0, k1: -1.0 },
            hi: Affine { k0: 0.0, k1: 1.0 },
        },
        Expr::Add(a, b) => {
            let (ra, rb) = (range(a), range(b));
            Range {
                lo: ra.lo.add(rb.lo),
                hi: ra.hi.add(rb.hi),
            }
        }
        Expr::Sub(a, b) => {
            let (ra, rb) = (range(a), range(b));
            Range {
                lo: ra.lo.add(rb.hi.neg()),
                hi: ra.hi.add(rb.lo.neg()),
            }
        }
        Expr::Neg(a) => {
            let ra = range(a);
            Range {
                lo: ra.hi.neg(),
                hi: ra.lo.neg(),
            }
        }
        Expr::Mul(a, b) => mul_range(range(a), range(b)),
        Expr::Pow(a, n) => pow_range(range(a), *n),
        Expr::Sin(_) | Expr::Cos(_) => Range::interval(-1.0, 1.0),
        Expr::Exp(a) => {
            let ra = range(a);
            let hi = match ra.hi {
                Affine { k0, k1 } if k1 <= 0.0 => Bound::constant(k0.exp()),
                _ => Infinite,
            };
            Range {
                lo: Bound::constant(0.0),
                hi,
            }
        }
        Expr::Gauss { .. } => Range::interval(0.0, 1.0),
    }
}

fn mul_range(ra: Range, rb: Range) -> Range {
    // Exact-constant factor: scale the other side.
    if let Some((lo, hi)) = ra.const_interval() {
        if lo == hi {
            return scale_range(rb, lo);
        }
    }
    if let Some((lo, hi)) = rb.const_interval() {
        if lo == hi {
            return scale_range(ra, lo);
        }
    }
    // Both constant intervals: interval product.
    if let (Some((al, ah)), Some((bl, bh))) = (ra.const_interval(), rb.const_interval()) {
        let cands = [al * bl, al * bh, ah * bl, ah * bh];
        let lo = cands.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Range::interval(lo, hi);
    }
    // Both nonnegative: product is nonnegative.
    if ra.lo.nonnegative() && rb.lo.nonnegative() {
        return Range {
            lo: Bound::constant(0.0),
            hi: Infinite,
        };
    }
    // Constant-interval factor times a growing one: |fg| <= F * M(r).
    if let (Some((al, ah)), Some((m0, m1))) = (ra.const_interval(), rb.abs_bound()) {
        let f = al.abs().max(ah.abs());
        return Range {
            lo: Affine {
                k0: -f * m0,
                k1: -f * m1,
            },
            hi: Affine {
                k0: f * m0,
                k1: f * m1,
            },
        };
    }
    if let (Some((bl, bh)), Some((m0, m1))) = (rb.const_interval(), ra.abs_bound()) {
        let f = bl.abs().max(bh.abs());
        return Range {
            lo: Affine {
                k0: -f * m0,
                k1: -f * m1,
            },
            hi: Affine {
                k0: f * m0,
                k1: f * m1,
            },
        };
    }
    Range {
        lo: Infinite,
        hi: Infinite,
    }
}

fn scale_range(r: Range, c: f64) -> Range {
    let scale = |b: Bound| match b {
        Affine { k0, k1 } => Affine {
            k0: c * k0,
            k1: c * k1,
        },
        Infinite => Infinite,
    };
    if c >= 0.0 {
        Range {
            lo: scale(r.lo),
            hi: scale(r.hi),
        }
    } else {
        Range {
            lo: scale(r.hi),
            hi: scale(r.lo),
        }
    }
}

fn pow_range(r: Range, n: u32) -> Range {
    if n == 0 {
        return Range::constant(1.0);
    }
    if n == 1 {
        return r;
    }
    if let Some((lo, hi)) = r.const_interval() {
        let (pl, ph) = (lo.powi(n as i32), hi.powi(n as i32));
        if n % 2 == 1 {
            return Range::interval(pl, ph);
        }
        let contains_zero = lo <= 0.0 && hi >= 0.0;
        let mx = pl.max(ph);
        return Range::interval(if contains_zero { 0.0 } else { pl.min(ph) }, mx);
    }
    if n % 2 == 0 {
        // Even power of anything is nonnegative.
        return Range {
            lo: Bound::constant(0.0),
            hi: Infinite,
        };
    }
    Range {
        lo: Infinite,
        hi: Infinite,
    }
}

/// Collect the coefficients of a univariate polynomial expression, or None
/// if the expression is not polynomial in a1.
fn poly1_coeffs(e: &Expr) -> Option<Vec<f64>> {
    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
        let n = a.len().max(b.len());
        let mut out = vec![0.0; n];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] += sign * y;
        }
        out
    }
    match e {
        Expr::Const(c) => Some(vec![*c]),
        Expr::Var(0) => Some(vec![0.0, 1.0]),
        Expr::Var(_) => None,
        Expr::Add(a, b) => Some(add(&poly1_coeffs(a)?, &poly1_coeffs(b)?, 1.0)),
        Expr::Sub(a, b) => Some(add(&poly1_coeffs(a)?, &poly1_coeffs(b)?, -1.0)),
        Expr::Mul(a, b) => Some(mul(&poly1_coeffs(a)?, &poly1_coeffs(b)?)),
        Expr::Neg(a) => Some(poly1_coeffs(a)?.iter().map(|c| -c).collect()),
        Expr::Pow(a, n) => {
            let base = poly1_coeffs(a)?;
            let mut out = vec![1.0];
            for _ in 0..*n {
                out = mul(&out, &base);
            }
            Some(out)
        }
        _ => None,
    }
}

/// Derive `(c0, c1)` with `phi0(a) >= -c0 - c1 |a|` for all `a`, or explain
/// why no certificate exists for this expression.
pub fn linear_minorant(field: &FieldExpr) -> Result<(f64, f64)> {
    // Exact route for one-dimensional polynomials: bounded below iff the
    // leading coefficient is positive and the degree even, and then the
    // global minimum itself is the certificate.
    if field.dim() == 1 {
        if let Some(mut coeffs) = poly1_coeffs(field.ast()) {
            while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
                coeffs.pop();
            }
            let deg = coeffs.len() - 1;
            if deg == 0 {
                return Ok(((-coeffs[0]).max(0.0), 0.0));
            }
            if deg == 1 {
                return Ok(((-coeffs[0]).max(0.0), coeffs[1].abs()));
            }
            if deg % 2 == 1 || coeffs[deg] < 0.0 {
                return Err(ShockError::NoSearchCertificate {
                    reason: "polynomial field is unbounded below".into(),
                });
            }
            let min = polyroots::global_min_poly1(&coeffs);
            return Ok(((-min).max(0.0), 0.0));
        }
    }
    match range(field.ast()).lo {
        Affine { k0, k1 } => Ok(((-k0).max(0.0), (-k1).max(0.0))),
        Infinite => Err(ShockError::NoSearchCertificate {
            reason: "no automatic linear minorant for this expression; \
                     set bound_c0/bound_c1 in the search configuration"
                .into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_certificate() {
        let f = FieldExpr::parse("a1^4/4 - a1^2/2", 1).unwrap();
        let (c0, c1) = linear_minorant(&f).unwrap();
        assert!(c1 == 0.0);
        assert!((c0 - 0.25).abs() < 1e-9, "c0 = {c0}");
    }

    #[test]
    fn gaussian_mixture_certificate() {
        let f = FieldExpr::parse("-2*gauss((0,0),1) - 0.5*gauss((1,2),0.7) + 0.1*a1", 2).unwrap();
        let (c0, c1) = linear_minorant(&f).unwrap();
        assert!(c0 >= 2.5 - 1e-12 && c0 < 3.0);
        assert!((c1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn unbounded_rejected() {
        let f = FieldExpr::parse("-a1^4", 1).unwrap();
        assert!(linear_minorant(&f).is_err());
        let g = FieldExpr::parse("a1^2*a2 ", 2).unwrap();
        assert!(linear_minorant(&g).is_err());
    }

    #[test]
    fn even_powers_help() {
        let f = FieldExpr::parse("a1^2*a2^2 + sin(a1)*a2", 2).unwrap();
        let (c0, c1) = linear_minorant(&f).unwrap();
        assert_eq!(c0, 0.0);
        assert_eq!(c1, 1.0);
    }
}

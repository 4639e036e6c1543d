//! Dense truncated multivariate Taylor expansions (jets) in 1-3 variables.
//!
//! Coefficients are Taylor coefficients: the entry for multi-index `alpha`
//! equals the partial derivative `d^alpha f / alpha!` at the base point.
//! Arithmetic is exact on polynomial inputs up to the truncation order.

use crate::error::{Result, ShockError};

/// Hard cap on jet order. Sixth-order normal-form extraction needs
/// coefficients through total degree 8.
pub const MAX_ORDER: usize = 8;

/// Monomial index tables for a fixed (dim, order) pair.
#[derive(Debug)]
struct Layout {
    /// Exponent vector of every monomial of total degree <= order, graded lex.
    monomials: Vec<[u8; 3]>,
    /// Exponents -> position, dense lookup of size (order+1)^3.
    lookup: Vec<usize>,
    order: usize,
}

impl Layout {
    fn new(dim: usize, order: usize) -> Layout {
        let mut monomials = Vec::new();
        for total in 0..=order {
            push_monomials(dim, total, &mut monomials);
        }
        let side = order + 2;
        let mut lookup = vec![usize::MAX; side * side * side];
        for (pos, m) in monomials.iter().enumerate() {
            lookup[(m[0] as usize * side + m[1] as usize) * side + m[2] as usize] = pos;
        }
        Layout {
            monomials,
            lookup,
            order,
        }
    }

    #[inline]
    fn index(&self, e: [u8; 3]) -> usize {
        let side = self.order + 2;
        self.lookup[(e[0] as usize * side + e[1] as usize) * side + e[2] as usize]
    }
}

fn push_monomials(dim: usize, total: usize, out: &mut Vec<[u8; 3]>) {
    match dim {
        1 => out.push([total as u8, 0, 0]),
        2 => {
            for i in (0..=total).rev() {
                out.push([i as u8, (total - i) as u8, 0]);
            }
        }
        3 => {
            for i in (0..=total).rev() {
                for j in (0..=(total - i)).rev() {
                    out.push([i as u8, j as u8, (total - i - j) as u8]);
                }
            }
        }
        _ => unreachable!("dim checked on construction"),
    }
}

fn layout(dim: usize, order: usize) -> &'static Layout {
    use std::sync::OnceLock;
    static TABLES: OnceLock<Vec<Layout>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let mut v = Vec::with_capacity(3 * (MAX_ORDER + 1));
        for dim in 1..=3 {
            for order in 0..=MAX_ORDER {
                v.push(Layout::new(dim, order));
            }
        }
        v
    });
    &tables[(dim - 1) * (MAX_ORDER + 1) + order]
}

/// Number of multi-indices of total degree <= order in `dim` variables.
pub fn coeff_count(dim: usize, order: usize) -> usize {
    layout(dim, order).monomials.len()
}

/// Truncated Taylor expansion of a scalar function at a point.
///
/// The base point is not stored; a jet is a polynomial in the offsets from
/// wherever it was expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn zero(dim: usize, order: usize) -> Result<Jet> {
        if !(1..=3).contains(&dim) {
            return Err(ShockError::BadDimension { dim });
        }
        if order > MAX_ORDER {
            return Err(ShockError::OrderTooLarge {
                order,
                cap: MAX_ORDER,
            });
        }
        Ok(Jet {
            dim,
            order,
            coeffs: vec![0.0; coeff_count(dim, order)],
        })
    }

    pub fn constant(dim: usize, order: usize, value: f64) -> Result<Jet> {
        let mut j = Jet::zero(dim, order)?;
        j.coeffs[0] = value;
        Ok(j)
    }

    /// Jet of the coordinate function `var` (0-based) with value `value` at
    /// the base point.
    pub fn variable(dim: usize, order: usize, var: usize, value: f64) -> Result<Jet> {
        let mut j = Jet::zero(dim, order)?;
        j.coeffs[0] = value;
        if order >= 1 {
            let mut e = [0u8; 3];
            e[var] = 1;
            let idx = layout(dim, order).index(e);
            j.coeffs[idx] = 1.0;
        }
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Iterate over (exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = ([u8; 3], f64)> + '_ {
        layout(self.dim, self.order)
            .monomials
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| (*m, *c))
    }

    /// Coefficient of the monomial with the given exponents (beyond-truncation
    /// or malformed exponents read as 0).
    pub fn coeff(&self, exps: &[usize]) -> f64 {
        let mut e = [0u8; 3];
        let mut total = 0usize;
        for (i, &x) in exps.iter().enumerate() {
            if i >= self.dim && x > 0 {
                return 0.0;
            }
            if i < 3 {
                e[i] = x as u8;
            }
            total += x;
        }
        if total > self.order {
            return 0.0;
        }
        self.coeffs[layout(self.dim, self.order).index(e)]
    }

    pub fn set_coeff(&mut self, exps: &[usize], v: f64) {
        let mut e = [0u8; 3];
        for (i, &x) in exps.iter().enumerate() {
            e[i] = x as u8;
        }
        let idx = layout(self.dim, self.order).index(e);
        self.coeffs[idx] = v;
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        debug_assert_eq!((self.dim, self.order), (rhs.dim, rhs.order));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        debug_assert_eq!((self.dim, self.order), (rhs.dim, rhs.order));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        debug_assert_eq!((self.dim, self.order), (rhs.dim, rhs.order));
        let lay = layout(self.dim, self.order);
        let mut out = Jet::zero(self.dim, self.order).expect("validated");
        for (ia, ma) in lay.monomials.iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0.0 {
                continue;
            }
            let da = (ma[0] + ma[1] + ma[2]) as usize;
            for (ib, mb) in lay.monomials.iter().enumerate() {
                let cb = rhs.coeffs[ib];
                if cb == 0.0 {
                    continue;
                }
                let db = (mb[0] + mb[1] + mb[2]) as usize;
                if da + db > self.order {
                    continue;
                }
                let e = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                out.coeffs[lay.index(e)] += ca * cb;
            }
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(self.dim, self.order, 1.0).expect("validated");
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Compose with an analytic unary function given its Taylor coefficients
    /// `f^{(k)}(value)/k!` at the jet's value.
    pub fn compose_unary(&self, taylor_at_value: &[f64]) -> Jet {
        debug_assert!(taylor_at_value.len() >= self.order + 1);
        // h = self with the constant removed; h^{k} starts at degree k, so the
        // Horner loop below is exact at this truncation order.
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut out =
            Jet::constant(self.dim, self.order, taylor_at_value[self.order]).expect("validated");
        for k in (0..self.order).rev() {
            out = out.mul(&h);
            out.coeffs[0] += taylor_at_value[k];
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let v = self.value().exp();
        let mut t = vec![0.0; self.order + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = v / fact;
        }
        self.compose_unary(&t)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut t = vec![0.0; self.order + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = cycle[k % 4] / fact;
        }
        self.compose_unary(&t)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut t = vec![0.0; self.order + 1];
        let mut fact = 1.0;
        for (k, tk) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *tk = cycle[k % 4] / fact;
        }
        self.compose_unary(&t)
    }

    /// Substitute each old variable by the given jet (same dim and order).
    /// All substitution jets must have zero constant term, which keeps the
    /// composition exact at this truncation order.
    pub fn compose(&self, subs: &[Jet]) -> Jet {
        debug_assert_eq!(subs.len(), self.dim);
        for s in subs {
            debug_assert_eq!((s.dim, s.order), (self.dim, self.order));
            debug_assert!(
                s.value() == 0.0,
                "substitution jets must vanish at the base point"
            );
        }
        // Precompute powers of every substitution jet.
        let one = Jet::constant(self.dim, self.order, 1.0).expect("validated");
        let mut pow: Vec<Vec<Jet>> = Vec::with_capacity(self.dim);
        for s in subs {
            let mut p = vec![one.clone()];
            for k in 1..=self.order {
                p.push(p[k - 1].mul(s));
            }
            pow.push(p);
        }
        let mut out = Jet::zero(self.dim, self.order).expect("validated");
        for (m, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            let mut term = Jet::constant(self.dim, self.order, c).expect("validated");
            for v in 0..self.dim {
                if m[v] > 0 {
                    term = term.mul(&pow[v][m[v] as usize]);
                }
            }
            for (o, t) in out.coeffs.iter_mut().zip(&term.coeffs) {
                *o += t;
            }
        }
        out
    }

    /// Re-express the jet in rotated coordinates: old = R * new, where R is
    /// an orthonormal d x d matrix given row-major.
    pub fn rotate(&self, r: &nalgebra::DMatrix<f64>) -> Jet {
        let d = self.dim;
        debug_assert_eq!((r.nrows(), r.ncols()), (d, d));
        let mut subs = Vec::with_capacity(d);
        for i in 0..d {
            let mut s = Jet::zero(d, self.order).expect("validated");
            if self.order >= 1 {
                for j in 0..d {
                    let mut e = [0usize; 3];
                    e[j] = 1;
                    s.set_coeff(&e[..d], r[(i, j)]);
                }
            }
            subs.push(s);
        }
        self.compose(&subs)
    }

    /// Truncate to a lower order.
    pub fn truncated(&self, order: usize) -> Jet {
        debug_assert!(order <= self.order);
        let mut out = Jet::zero(self.dim, order).expect("validated");
        for (m, c) in self.terms() {
            if (m[0] + m[1] + m[2]) as usize <= order {
                let e = [m[0] as usize, m[1] as usize, m[2] as usize];
                out.set_coeff(&e[..self.dim], c);
            }
        }
        out
    }

    /// Gradient at the base point (order >= 1).
    pub fn gradient(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (i, gi) in g.iter_mut().enumerate() {
            let mut e = [0usize; 3];
            e[i] = 1;
            *gi = self.coeff(&e[..self.dim]);
        }
        g
    }

    /// Hessian at the base point (order >= 2).
    pub fn hessian(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        let mut h = nalgebra::DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut e = [0usize; 3];
                e[i] += 1;
                e[j] += 1;
                let c = self.coeff(&e[..d]);
                h[(i, j)] = if i == j { 2.0 * c } else { c };
            }
        }
        h
    }

    /// Evaluate the truncated polynomial at an offset from the base point.
    pub fn eval_offset(&self, offset: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (m, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            let mut term = c;
            for v in 0..self.dim {
                for _ in 0..m[v] {
                    term *= offset[v];
                }
            }
            sum += term;
        }
        sum
    }

    /// Largest |coefficient| among terms of total degree in [lo, hi].
    pub fn max_abs_coeff(&self, lo: usize, hi: usize) -> f64 {
        let mut m = 0.0f64;
        for (e, c) in self.terms() {
            let deg = (e[0] + e[1] + e[2]) as usize;
            if deg >= lo && deg <= hi {
                m = m.max(c.abs());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coeff_counts() {
        assert_eq!(coeff_count(1, 8), 9);
        assert_eq!(coeff_count(2, 8), 45);
        assert_eq!(coeff_count(3, 8), 165);
    }

    #[test]
    fn square_of_shifted_variable() {
        // (a+3)^2 = 9 + 6a + a^2
        let x = Jet::variable(1, 2, 0, 3.0).unwrap();
        let sq = x.mul(&x);
        assert_relative_eq!(sq.coeff(&[0]), 9.0);
        assert_relative_eq!(sq.coeff(&[1]), 6.0);
        assert_relative_eq!(sq.coeff(&[2]), 1.0);
    }

    #[test]
    fn cosine_series() {
        let x = Jet::variable(1, 4, 0, 0.0).unwrap();
        let c = x.cos();
        let expect = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0];
        for (k, e) in expect.iter().enumerate() {
            assert_relative_eq!(c.coeff(&[k]), *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotation_preserves_radial_part() {
        // f = a1^2 + a2^2 is rotation invariant.
        let mut f = Jet::zero(2, 4).unwrap();
        f.set_coeff(&[2, 0], 1.0);
        f.set_coeff(&[0, 2], 1.0);
        let th = 0.7f64;
        let r = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[th.cos(), -th.sin(), th.sin(), th.cos()],
        );
        let g = f.rotate(&r);
        for ((e, a), (_, b)) in f.terms().zip(g.terms()) {
            assert_relative_eq!(a, b, epsilon = 1e-14, max_relative = 1e-12);
            let _ = e;
        }
    }

    #[test]
    fn compose_kills_cross_terms() {
        // w = (b - 2 a^2)^2 + a^4; substituting b = z + 2 a^2 gives z^2 + a^4.
        let d = 2;
        let a = Jet::variable(d, 6, 0, 0.0).unwrap();
        let b = Jet::variable(d, 6, 1, 0.0).unwrap();
        let w = b.sub(&a.powi(2).scale(2.0)).powi(2).add(&a.powi(4));
        let z_sub = b.add(&a.powi(2).scale(2.0));
        let mut a_sub = a.clone();
        a_sub.coeffs_mut()[0] = 0.0;
        let w2 = w.compose(&[a_sub, z_sub]);
        assert_relative_eq!(w2.coeff(&[0, 2]), 1.0, epsilon = 1e-13);
        assert_relative_eq!(w2.coeff(&[4, 0]), 1.0, epsilon = 1e-13);
        assert_relative_eq!(w2.coeff(&[2, 1]), 0.0, epsilon = 1e-13);
    }
}

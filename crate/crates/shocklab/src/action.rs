//! The unforced action `W(a,x,t) = phi0(a) + |a-x|^2/(2t)`, the limit
//! solution `phi(x,t) = min_a W(a,x,t)`, and the finite-viscosity reference
//! solution obtained from the heat-kernel representation.

use crate::error::{Result, ShockError};
use crate::field::{FieldExpr, Jet};
use crate::minima::{self, MinimaCollection, SearchConfig};
use serde::Serialize;

/// W(a, x, t).
pub fn action_value(field: &FieldExpr, x: &[f64], t: f64, a: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(ShockError::NonPositiveTime { t });
    }
    let mut pen = 0.0;
    for (ai, xi) in a.iter().zip(x) {
        pen += (ai - xi) * (ai - xi);
    }
    Ok(field.eval(a) + pen / (2.0 * t))
}

/// Jet of `w = W(., x, t)` at the point `a`. The penalty contributes only
/// degrees 0..=2 and is assembled exactly.
pub fn action_jet(field: &FieldExpr, x: &[f64], t: f64, a: &[f64], order: usize) -> Result<Jet> {
    if !(t > 0.0) {
        return Err(ShockError::NonPositiveTime { t });
    }
    let d = field.dim();
    let mut jet = field.eval_jet(a, order)?;
    let inv2t = 1.0 / (2.0 * t);
    // |a + da - x|^2 / (2t) expanded at da = 0.
    let mut c0 = 0.0;
    for i in 0..d {
        c0 += (a[i] - x[i]) * (a[i] - x[i]);
    }
    jet.coeffs_mut()[0] += c0 * inv2t;
    if order >= 1 {
        for i in 0..d {
            let mut e = [0usize; 3];
            e[i] = 1;
            let cur = jet.coeff(&e[..d]);
            jet.set_coeff(&e[..d], cur + 2.0 * (a[i] - x[i]) * inv2t);
        }
    }
    if order >= 2 {
        for i in 0..d {
            let mut e = [0usize; 3];
            e[i] = 2;
            let cur = jet.coeff(&e[..d]);
            jet.set_coeff(&e[..d], cur + inv2t);
        }
    }
    Ok(jet)
}

/// The inviscid limit solution and the tied global minima realizing it.
pub fn limit_solution(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    search: &SearchConfig,
) -> Result<(f64, MinimaCollection)> {
    let mc = minima::find_global_minima(field, x, t, search)?;
    Ok((mc.y_star, mc))
}

/// Quadrature settings for the finite-viscosity reference solution.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureConfig {
    /// Relative tolerance of the adaptive quadrature.
    pub rel_tol: f64,
    /// Truncate the domain where `W - y* > level_cut * nu` (the integrand is
    /// below `exp(-level_cut/2)` of its peak there).
    pub level_cut: f64,
    /// Initial panels for the adaptive subdivision.
    pub initial_panels: usize,
    /// Maximum recursion depth.
    pub max_depth: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            level_cut: 40.0,
            initial_panels: 64,
            max_depth: 24,
        }
    }
}

/// Finite-viscosity solution by the heat-kernel representation,
///
/// ```text
/// psi_nu(x,t) = d nu ln(4 pi nu t) - 2 nu ln  int exp(-W(a,x,t)/(2 nu)) da,
/// ```
///
/// implemented for d = 1 (its role here is validation of the limit solver;
/// higher-dimensional quadrature is not worth its cost for that purpose).
/// Converges to the limit solution at points off the shock as nu -> 0.
pub fn hopf_cole_solution(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    nu: f64,
    quad: &QuadratureConfig,
    search: &SearchConfig,
) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(ShockError::NonPositiveViscosity { nu });
    }
    if !(t > 0.0) {
        return Err(ShockError::NonPositiveTime { t });
    }
    if field.dim() != 1 {
        return Err(ShockError::Invalid(
            "the finite-viscosity reference is implemented for d = 1 only".into(),
        ));
    }
    // Shift by y* so the integrand peaks at 1.
    let (y_star, _) = limit_solution(field, x, t, search)?;
    let cut = quad.level_cut * nu;
    let radius = minima::certified_radius_for_level(field, x, t, search, y_star + 2.0 * cut)?;

    // Integration window: the certified ball, shrunk to the sublevel set
    // {W - y* <= level_cut * nu} padded by one scan cell. Outside the cut the
    // integrand is below exp(-level_cut/2), which bounds the relative
    // truncation error by |domain| * exp(-level_cut/2).
    let scan_n = 4096;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let step = 2.0 * radius / scan_n as f64;
    for i in 0..=scan_n {
        let a = x[0] - radius + step * i as f64;
        let w = action_value(field, x, t, &[a])? - y_star;
        if w <= cut {
            lo = lo.min(a - step);
            hi = hi.max(a + step);
        }
    }
    if !lo.is_finite() {
        return Err(ShockError::QuadratureFailed {
            tol: quad.rel_tol,
            estimate: f64::INFINITY,
        });
    }
    let f = |a: f64| -> f64 {
        let w = action_value(field, x, t, &[a]).unwrap_or(f64::INFINITY) - y_star;
        (-w / (2.0 * nu)).exp()
    };
    let integral = adaptive_simpson(&f, lo, hi, quad)?;
    Ok((field.dim() as f64) * nu * (4.0 * std::f64::consts::PI * nu * t).ln() + y_star
        - 2.0 * nu * integral.ln())
}

fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // The rounding floor keeps the recursion from chasing machine noise.
        let floor = 1e-14 * whole.abs();
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let n = quad.initial_panels.max(1);
    let h = (hi - lo) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let a = lo + i as f64 * h;
        let b = a + h;
        let (fa, fb) = (f(a), f(b));
        let (whole, m, fm) = simpson(f, a, fa, b, fb);
        total += rec(
            f,
            a,
            fa,
            b,
            fb,
            whole,
            m,
            fm,
            quad.rel_tol / n as f64,
            quad.max_depth,
        );
    }
    if !total.is_finite() || total <= 0.0 {
        return Err(ShockError::QuadratureFailed {
            tol: quad.rel_tol,
            estimate: total,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quartic() -> FieldExpr {
        FieldExpr::parse("a1^4/4 - a1^2/2", 1).unwrap()
    }

    #[test]
    fn action_values() {
        let zero = FieldExpr::parse("0", 1).unwrap();
        assert_relative_eq!(
            action_value(&zero, &[0.0], 2.0, &[1.0]).unwrap(),
            0.25
        );
        let q = quartic();
        assert_relative_eq!(action_value(&q, &[1.0], 1.0, &[1.0]).unwrap(), -0.25);
        assert_relative_eq!(action_value(&q, &[0.0], 7.0, &[0.0]).unwrap(), 0.0);
        assert!(action_value(&q, &[0.0], -1.0, &[0.0]).is_err());
    }

    #[test]
    fn penalty_jet_is_quadratic() {
        let zero = FieldExpr::parse("0", 2).unwrap();
        let j = action_jet(&zero, &[0.3, -0.4], 2.0, &[0.3, -0.4], 2).unwrap();
        assert_relative_eq!(j.coeff(&[2, 0]), 0.25);
        assert_relative_eq!(j.coeff(&[0, 2]), 0.25);
        assert_relative_eq!(j.coeff(&[1, 0]), 0.0);
        assert_relative_eq!(j.coeff(&[1, 1]), 0.0);
    }

    #[test]
    fn quartic_action_jets() {
        // t=1 at the focus: the quadratic terms cancel, quartic remains.
        let j = action_jet(&quartic(), &[0.0], 1.0, &[0.0], 4).unwrap();
        assert_relative_eq!(j.coeff(&[2]), 0.0, epsilon = 1e-15);
        assert_relative_eq!(j.coeff(&[4]), 0.25);
        // t=0.5: degree-2 coefficient is -1/2 + 1/(2*0.5) = +1/2.
        let j = action_jet(&quartic(), &[0.0], 0.5, &[0.0], 2).unwrap();
        assert_relative_eq!(j.coeff(&[2]), 0.5);
    }

    #[test]
    fn hopf_cole_flat_field_is_exact_zero() {
        let zero = FieldExpr::parse("0", 1).unwrap();
        for nu in [0.5, 0.1, 0.05] {
            let v = hopf_cole_solution(
                &zero,
                &[0.7],
                1.3,
                nu,
                &QuadratureConfig::default(),
                &SearchConfig::default(),
            )
            .unwrap();
            assert!(v.abs() < 1e-8, "nu={nu}: psi={v}");
        }
    }

    #[test]
    fn hopf_cole_rejects_zero_viscosity() {
        let zero = FieldExpr::parse("0", 1).unwrap();
        assert!(hopf_cole_solution(
            &zero,
            &[0.0],
            1.0,
            0.0,
            &QuadratureConfig::default(),
            &SearchConfig::default()
        )
        .is_err());
    }

    #[test]
    fn viscous_gap_shrinks() {
        let q = quartic();
        let cfg = SearchConfig::default();
        let (phi, _) = limit_solution(&q, &[0.3], 0.5, &cfg).unwrap();
        let mut last = f64::INFINITY;
        for nu in [0.2, 0.1, 0.05] {
            let psi = hopf_cole_solution(&q, &[0.3], 0.5, nu, &QuadratureConfig::default(), &cfg)
                .unwrap();
            let gap = (psi - phi).abs();
            assert!(gap < last, "gap did not shrink at nu={nu}: {gap} vs {last}");
            last = gap;
        }
    }
}

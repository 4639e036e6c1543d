//! Real roots of low-degree univariate polynomials (companion matrix plus
//! Newton polish) and closed-form minimization of the catalog's inner
//! quartic/sextic families.

use nalgebra::DMatrix;

/// Real roots of `sum_k coeffs[k] x^k`. Leading zeros are trimmed; complex
/// pairs are filtered by relative imaginary part and roots are polished by a
/// few Newton steps.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1].abs() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    if deg == 2 {
        let (a, b, cc) = (c[2], c[1], c[0]);
        let disc = b * b - 4.0 * a * cc;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let mut r = if q != 0.0 {
            vec![q / a, cc / q]
        } else {
            vec![0.0, 0.0]
        };
        r.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return r;
    }
    let lead = c[deg];
    let mut comp = DMatrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut roots = Vec::new();
    // Bounded QR iteration; companion matrices of polynomials with multiple
    // roots can stall it, in which case sign-change isolation takes over.
    match nalgebra::linalg::Schur::try_new(comp, 1e-14, 400) {
        Some(schur) => {
            if let Some(eig) = schur.eigenvalues() {
                for x in eig.iter() {
                    roots.push(newton_polish(&c, *x));
                }
            } else {
                for z in schur.complex_eigenvalues().iter() {
                    if z.im.abs() < 1e-8 * (1.0 + z.re.abs()) {
                        roots.push(newton_polish(&c, z.re));
                    }
                }
            }
            roots.retain(|r| {
                eval(&c, *r).abs()
                    <= 1e-7 * scale.max(1.0) * (1.0 + r.abs()).powi(deg as i32)
            });
        }
        None => roots = isolate_sign_changes(&c),
    }
    if roots.is_empty() && deg % 2 == 1 {
        // An odd-degree polynomial always has a real root.
        roots = isolate_sign_changes(&c);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-10 * (1.0 + a.abs()));
    roots
}

/// Root isolation by sign changes on a fine grid over the Cauchy bound,
/// refined by bisection. Roots of even multiplicity do not change sign and
/// are not reported; for the minimization uses in this crate those are never
/// minima of the antiderivative.
fn isolate_sign_changes(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    let lead = c[deg];
    let bound = 1.0
        + c[..deg]
            .iter()
            .map(|x| (x / lead).abs())
            .fold(0.0f64, f64::max);
    let n = 2048;
    let mut roots = Vec::new();
    let mut prev_x = -bound;
    let mut prev_v = eval(c, prev_x);
    for i in 1..=n {
        let x = -bound + 2.0 * bound * i as f64 / n as f64;
        let v = eval(c, x);
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi, mut flo) = (prev_x, x, prev_v);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(c, mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(newton_polish(c, 0.5 * (lo + hi)));
        }
        prev_x = x;
        prev_v = v;
    }
    roots
}

fn eval(c: &[f64], x: f64) -> f64 {
    let mut v = 0.0;
    for &ck in c.iter().rev() {
        v = v * x + ck;
    }
    v
}

fn eval_d(c: &[f64], x: f64) -> f64 {
    let mut v = 0.0;
    for k in (1..c.len()).rev() {
        v = v * x + c[k] * k as f64;
    }
    v
}

fn newton_polish(c: &[f64], mut x: f64) -> f64 {
    // Multiple roots make plain Newton only linearly convergent, so give it
    // room; each step is a handful of flops.
    for _ in 0..80 {
        let f = eval(c, x);
        let fp = eval_d(c, x);
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        x -= step;
        if step.abs() < 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Global minimum value of a univariate polynomial that is bounded below
/// (positive leading coefficient, even degree >= 2).
pub fn global_min_poly1(coeffs: &[f64]) -> f64 {
    let deg = coeffs.len() - 1;
    debug_assert!(deg >= 2 && deg % 2 == 0 && coeffs[deg] > 0.0);
    let mut dc = vec![0.0; deg];
    for k in 1..=deg {
        dc[k - 1] = coeffs[k] * k as f64;
    }
    let mut best = eval(coeffs, 0.0);
    for r in real_roots(&dc) {
        best = best.min(eval(coeffs, r));
    }
    best
}

/// `min_u (u^4 + p u^2 + q u)` together with the minimizing `u` (smallest
/// minimizer on ties, which happen exactly on the ridge q = 0, p < 0).
pub fn min_quartic(p: f64, q: f64) -> (f64, f64) {
    // stationary points: 4u^3 + 2p u + q = 0
    let roots = real_roots(&[q, 2.0 * p, 0.0, 4.0]);
    let mut best = f64::INFINITY;
    let mut arg = 0.0;
    for u in roots {
        let v = ((u * u + p) * u + q) * u;
        if v < best {
            best = v;
            arg = u;
        }
    }
    if !best.is_finite() {
        (0.0, 0.0)
    } else {
        (best, arg)
    }
}

/// `min_u (u^6 + a u^4 + b u^3 + c u^2 + d u)` with the minimizing `u`.
pub fn min_sextic(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    // stationary points: 6u^5 + 4a u^3 + 3b u^2 + 2c u + d = 0
    let roots = real_roots(&[d, 2.0 * c, 3.0 * b, 4.0 * a, 0.0, 6.0]);
    let mut best = f64::INFINITY;
    let mut arg = 0.0;
    for u in roots {
        let v = ((((u * u + a) * u + b) * u + c) * u + d) * u;
        if v < best {
            best = v;
            arg = u;
        }
    }
    if !best.is_finite() {
        (0.0, 0.0)
    } else {
        (best, arg)
    }
}

/// All local minima `(u, value)` of the sextic family, sorted by u.
pub fn sextic_local_minima(a: f64, b: f64, c: f64, d: f64) -> Vec<(f64, f64)> {
    let roots = real_roots(&[d, 2.0 * c, 3.0 * b, 4.0 * a, 0.0, 6.0]);
    let mut out = Vec::new();
    for u in roots {
        // second derivative: 30u^4 + 12a u^2 + 6b u + 2c
        let f2 = 30.0 * u.powi(4) + 12.0 * a * u * u + 6.0 * b * u + 2.0 * c;
        if f2 > 0.0 {
            let v = ((((u * u + a) * u + b) * u + c) * u + d) * u;
            out.push((u, v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_roots() {
        // (x-1)(x+2)(x-3) = x^3 - 2x^2 - 5x + 6
        let r = real_roots(&[6.0, -5.0, -2.0, 1.0]);
        assert_eq!(r.len(), 3);
        assert_relative_eq!(r[0], -2.0, epsilon = 1e-10);
        assert_relative_eq!(r[1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(r[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn quartic_min() {
        // min of u^4 - u^2 is -1/4 at u = +-1/sqrt(2)
        let (v, _) = min_quartic(-1.0, 0.0);
        assert_relative_eq!(v, -0.25, epsilon = 1e-12);
        // table example: alpha=-1, beta=0
        let (v, u) = min_quartic(-1.0, 1e-9);
        assert_relative_eq!(v, -0.25, epsilon = 1e-7);
        assert!(u < 0.0);
    }

    #[test]
    fn global_min_of_quartic_field() {
        // a^4/4 - a^2/2 has global min -1/4
        let m = global_min_poly1(&[0.0, 0.0, -0.5, 0.0, 0.25]);
        assert_relative_eq!(m, -0.25, epsilon = 1e-12);
    }
}

#[cfg(test)]
mod debug_tests {
    use super::*;

    #[test]
    fn debug_cubic() {
        let r = real_roots(&[0.0, -2.0, 0.0, 4.0]);
        println!("roots of 4u^3-2u: {:?}", r);
        assert_eq!(r.len(), 3);
    }
}

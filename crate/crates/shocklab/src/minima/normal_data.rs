//! Normal-form coefficient extraction at degenerate minima.
//!
//! At a corank-1 minimum the action can be written in orthonormal
//! coordinates (a, b) with the a-axis along the Hessian kernel as
//!
//! ```text
//! K a^4 + omega(z) + L.a^3 z + Omega_0(z) + a Omega_1(z) + a^2 Omega_2(z) + ...
//! z = b - C a^2                       (multiplicity 3)
//!
//! K a^6 + omega(z) + ...,  z = b - C a^2 - D a^3 - E a^4   (multiplicity 5)
//! ```
//!
//! and the coefficients are read off a jet after the polynomial change of
//! variables that removes the low-order cross terms.

use crate::error::{Result, ShockError};
use crate::field::Jet;
use crate::minima::SearchConfig;
use nalgebra::DMatrix;

/// Normal-form data of a multiplicity-3 minimum.
#[derive(Debug, Clone)]
pub struct A3Data {
    /// Orthonormal frame, columns = (kernel axis, b-axes) in standard coords.
    pub frame: DMatrix<f64>,
    pub k: f64,
    /// Positive eigenvalues of the quadratic part on the b-block (d-1 values).
    pub omega: Vec<f64>,
    pub c: Vec<f64>,
    pub l: Vec<f64>,
    pub omega1: DMatrix<f64>,
    pub omega2: DMatrix<f64>,
    pub psi0: DMatrix<f64>,
    pub psi1: DMatrix<f64>,
    pub psi2: DMatrix<f64>,
}

impl A3Data {
    pub fn c_norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Normal-form data of a multiplicity-5 minimum.
#[derive(Debug, Clone)]
pub struct A5Data {
    pub frame: DMatrix<f64>,
    pub k: f64,
    pub omega: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

pub(crate) enum FrameResult {
    Nondegenerate,
    Corank1(Frame),
    CorankTooHigh(usize),
}

pub(crate) struct Frame {
    /// Columns: kernel axis first, then b-axes by ascending eigenvalue.
    pub rotation: DMatrix<f64>,
    /// omega_j = lambda_j / 2 for the b-axes.
    pub omega: Vec<f64>,
}

/// Eigen-analysis of the Hessian: detect corank and build the kernel frame.
pub(crate) fn kernel_frame(jet: &Jet, cfg: &SearchConfig) -> Result<FrameResult> {
    let d = jet.dim();
    let h = jet.hessian();
    let sym = nalgebra::SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        sym.eigenvalues[i]
            .partial_cmp(&sym.eigenvalues[j])
            .unwrap()
    });
    let lambda_max = order
        .iter()
        .map(|&i| sym.eigenvalues[i].abs())
        .fold(0.0f64, f64::max);
    let thr = cfg.degeneracy_ratio * lambda_max.max(cfg.hessian_floor);
    let degenerate: Vec<usize> = order
        .iter()
        .cloned()
        .filter(|&i| sym.eigenvalues[i] < thr)
        .collect();
    if degenerate.is_empty() {
        return Ok(FrameResult::Nondegenerate);
    }
    if degenerate.len() > 1 {
        return Ok(FrameResult::CorankTooHigh(degenerate.len()));
    }
    let kernel = degenerate[0];
    let mut cols: Vec<usize> = vec![kernel];
    cols.extend(order.iter().cloned().filter(|&i| i != kernel));
    let mut rot = DMatrix::zeros(d, d);
    let mut omega = Vec::with_capacity(d - 1);
    for (new, &old) in cols.iter().enumerate() {
        let mut v: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, old)]).collect();
        // Sign convention: first nonzero component positive, so frames are
        // reproducible across runs.
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        for r in 0..d {
            rot[(r, new)] = v[r];
        }
        if new > 0 {
            omega.push(sym.eigenvalues[old] / 2.0);
        }
    }
    Ok(FrameResult::Corank1(Frame { rotation: rot, omega }))
}

/// Remove a^2 b, (a^3 b, a^4 b) cross terms by the substitution
/// z = b - C a^2 (- D a^3 - E a^4), returning the jet in (a, z).
/// `through` is 4 for the A3 reduction and 6 for the A5 one.
pub(crate) fn reduce_cross_terms(rot: &Jet, omega: &[f64], through: usize) -> Jet {
    let d = rot.dim();
    if d == 1 {
        return rot.clone();
    }
    let mut current = rot.clone();
    let orders = if through >= 6 { [2usize, 3, 4].as_slice() } else { [2usize].as_slice() };
    for &p in orders {
        let mut shift = vec![0.0; d - 1];
        for j in 0..d - 1 {
            let mut e = [0usize; 3];
            e[0] = p;
            e[1 + j] = 1;
            shift[j] = -current.coeff(&e[..d]) / (2.0 * omega[j]);
        }
        current = substitute_b_shift(&current, &shift, p);
    }
    current
}

/// b_j -> b_j + shift_j * a^p for all j at once.
fn substitute_b_shift(jet: &Jet, shift: &[f64], p: usize) -> Jet {
    let d = jet.dim();
    let order = jet.order();
    let a = Jet::variable(d, order, 0, 0.0).expect("validated");
    let mut a_sub = a.clone();
    a_sub.coeffs_mut()[0] = 0.0;
    let apow = a.powi(p as u32);
    let mut subs = vec![a_sub];
    for (j, s) in shift.iter().enumerate() {
        let b = Jet::variable(d, order, 1 + j, 0.0).expect("validated");
        let mut bz = b.clone();
        bz.coeffs_mut()[0] = 0.0;
        subs.push(bz.add(&apow.scale(*s)));
    }
    jet.compose(&subs)
}

/// Extract the multiplicity-3 normal-form data from an order >= 6 jet taken
/// at the minimum.
pub fn a3_normal_data(jet: &Jet, cfg: &SearchConfig) -> Result<A3Data> {
    let d = jet.dim();
    let frame = match kernel_frame(jet, cfg)? {
        FrameResult::Corank1(f) => f,
        FrameResult::Nondegenerate => {
            return Err(ShockError::WrongMinimumType {
                reason: "Hessian is nondegenerate (multiplicity 1)".into(),
            })
        }
        FrameResult::CorankTooHigh(n) => {
            return Err(ShockError::WrongMinimumType {
                reason: format!("corank {} > 1", n),
            })
        }
    };
    let rot = jet.rotate(&frame.rotation);
    let scale = rot.max_abs_coeff(2, 4).max(1.0);
    let ztol = cfg.normal_form_tol * scale;
    // Odd residuals inherit the (eps)^(1/3) location-precision floor of
    // polished degenerate minima.
    let ztol_odd = cfg.normal_form_tol.max(2e-4) * scale;

    let idx = |e: &[usize]| -> f64 { rot.coeff(e) };
    let mut e = [0usize; 3];
    e[0] = 3;
    if idx(&e[..d]).abs() > ztol_odd {
        return Err(ShockError::WrongMinimumType {
            reason: "cubic term on the kernel line".into(),
        });
    }

    // C_j = -coeff(a^2 b_j) / (2 omega_j)
    let mut c = vec![0.0; d - 1];
    for j in 0..d - 1 {
        let mut e = [0usize; 3];
        e[0] = 2;
        e[1 + j] = 1;
        c[j] = -rot.coeff(&e[..d]) / (2.0 * frame.omega[j]);
    }
    let reduced = if d > 1 {
        substitute_b_shift(&rot, &c, 2)
    } else {
        rot.clone()
    };

    let mut e4 = [0usize; 3];
    e4[0] = 4;
    let k = reduced.coeff(&e4[..d]);
    if k <= ztol {
        return Err(ShockError::WrongMinimumType {
            reason: format!("kernel quartic K = {k:.3e} below threshold (A5 or worse)"),
        });
    }

    let n = d - 1;
    let mut l = vec![0.0; n];
    let mut omega1 = DMatrix::zeros(n, n);
    let mut omega2 = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = [0usize; 3];
        e[0] = 3;
        e[1 + j] = 1;
        l[j] = reduced.coeff(&e[..d]);
        for kk in 0..n {
            let mut e1 = [0usize; 3];
            e1[0] = 1;
            e1[1 + j] += 1;
            e1[1 + kk] += 1;
            let c1 = reduced.coeff(&e1[..d]);
            let mut e2 = e1;
            e2[0] = 2;
            let c2 = reduced.coeff(&e2[..d]);
            let half = if j == kk { 1.0 } else { 0.5 };
            omega1[(j, kk)] = c1 * half;
            omega2[(j, kk)] = c2 * half;
        }
    }
    let (psi0, psi1, psi2) = psi_series_parts(k, &frame.omega, &l, &omega1, &omega2)?;
    Ok(A3Data {
        frame: frame.rotation,
        k,
        omega: frame.omega,
        c,
        l,
        omega1,
        omega2,
        psi0,
        psi1,
        psi2,
    })
}

/// Extract the multiplicity-5 normal-form data from an order-8 jet taken at
/// the minimum.
pub fn a5_normal_data(jet: &Jet, cfg: &SearchConfig) -> Result<A5Data> {
    let d = jet.dim();
    let frame = match kernel_frame(jet, cfg)? {
        FrameResult::Corank1(f) => f,
        FrameResult::Nondegenerate => {
            return Err(ShockError::WrongMinimumType {
                reason: "Hessian is nondegenerate (multiplicity 1)".into(),
            })
        }
        FrameResult::CorankTooHigh(n) => {
            return Err(ShockError::WrongMinimumType {
                reason: format!("corank {} > 1", n),
            })
        }
    };
    let rot = jet.rotate(&frame.rotation);
    let scale = rot.max_abs_coeff(2, 6).max(1.0);
    let ztol = cfg.normal_form_tol * scale;

    let n = d - 1;
    let mut c = vec![0.0; n];
    let mut dd = vec![0.0; n];
    let mut ee = vec![0.0; n];
    let mut current = rot.clone();
    for (p, target) in [(2usize, &mut c), (3, &mut dd), (4, &mut ee)] {
        let mut shift = vec![0.0; n];
        for j in 0..n {
            let mut e = [0usize; 3];
            e[0] = p;
            e[1 + j] = 1;
            shift[j] = -current.coeff(&e[..d]) / (2.0 * frame.omega[j]);
        }
        if n > 0 {
            current = substitute_b_shift(&current, &shift, p);
        }
        // z = b - C a^2 - D a^3 - E a^4 means b = z + C a^2 + ..., so the
        // substitution shifts are the normal-form vectors themselves.
        target.copy_from_slice(&shift);
    }
    let ztol_odd = cfg.normal_form_tol.max(2e-4) * scale;
    let mut e4 = [0usize; 3];
    e4[0] = 4;
    let mut e5 = [0usize; 3];
    e5[0] = 5;
    let mut e6 = [0usize; 3];
    e6[0] = 6;
    if current.coeff(&e4[..d]).abs() > ztol || current.coeff(&e5[..d]).abs() > ztol_odd {
        return Err(ShockError::WrongMinimumType {
            reason: "residual quartic/quintic terms: not multiplicity 5".into(),
        });
    }
    let k = current.coeff(&e6[..d]);
    if k <= ztol {
        return Err(ShockError::WrongMinimumType {
            reason: format!("kernel sextic K = {k:.3e} below threshold"),
        });
    }
    Ok(A5Data {
        frame: frame.rotation,
        k,
        omega: frame.omega,
        c,
        d: dd,
        e: ee,
    })
}

/// The Psi series of an A3 minimum: invert
///
/// ```text
/// Theta(a) = || 4K        3 L^T a^2 ||
///            || L         2 Omega   ||,   Omega = Omega_0 + a Omega_1 + a^2 Omega_2
/// ```
///
/// as a matrix power series in `a` through order 2 and return the
/// lower-right (d-1)x(d-1) blocks of the three coefficients.
pub fn psi_series(data: &A3Data) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    psi_series_parts(data.k, &data.omega, &data.l, &data.omega1, &data.omega2)
}

fn psi_series_parts(
    k: f64,
    omega: &[f64],
    l: &[f64],
    omega1: &DMatrix<f64>,
    omega2: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let n = omega.len();
    let d = n + 1;
    if n == 0 {
        let empty = DMatrix::zeros(0, 0);
        return Ok((empty.clone(), empty.clone(), empty));
    }
    for w in omega {
        if *w <= 0.0 {
            return Err(ShockError::Degenerate {
                reason: "Omega_0 has a non-positive eigenvalue".into(),
            });
        }
    }
    let mut theta0 = DMatrix::zeros(d, d);
    let mut theta1 = DMatrix::zeros(d, d);
    let mut theta2 = DMatrix::zeros(d, d);
    theta0[(0, 0)] = 4.0 * k;
    for j in 0..n {
        theta0[(1 + j, 0)] = l[j];
        theta2[(0, 1 + j)] = 3.0 * l[j];
        theta0[(1 + j, 1 + j)] = 2.0 * omega[j];
        for kk in 0..n {
            theta1[(1 + j, 1 + kk)] = 2.0 * omega1[(j, kk)];
            theta2[(1 + j, 1 + kk)] += 2.0 * omega2[(j, kk)];
        }
    }
    let x0 = theta0.clone().try_inverse().ok_or(ShockError::Degenerate {
        reason: "Theta(0) is singular".into(),
    })?;
    let x1 = -&x0 * &theta1 * &x0;
    let x2 = -&x0 * &theta2 * &x0 + &x0 * &theta1 * &x0 * &theta1 * &x0;
    let block = |m: &DMatrix<f64>| m.view((1, 1), (n, n)).into_owned();
    Ok((block(&x0), block(&x1), block(&x2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Jet;
    use approx::assert_relative_eq;

    fn jet2(build: impl Fn(&Jet, &Jet) -> Jet) -> Jet {
        let a = Jet::variable(2, 8, 0, 0.0).unwrap();
        let b = Jet::variable(2, 8, 1, 0.0).unwrap();
        build(&a, &b)
    }

    #[test]
    fn plain_normal_form() {
        // w = a^4 + b^2
        let j = jet2(|a, b| a.powi(4).add(&b.powi(2)));
        let d = a3_normal_data(&j, &SearchConfig::default()).unwrap();
        assert_relative_eq!(d.k, 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.omega[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.c[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.l[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.psi0[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(d.psi2[(0, 0)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn shifted_parabola_gives_c() {
        // w = a^4 + (b - 2 a^2)^2: C = 2, K = 1, omega = 1
        let j = jet2(|a, b| {
            let z = b.sub(&a.powi(2).scale(2.0));
            a.powi(4).add(&z.powi(2))
        });
        let d = a3_normal_data(&j, &SearchConfig::default()).unwrap();
        assert_relative_eq!(d.c[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(d.k, 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.omega[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn omega2_from_mixed_term() {
        // w = a^4 + b^2 + a^2 b^2: Omega_2 = (1), C = 0, Psi_2 = -1/2
        let j = jet2(|a, b| {
            a.powi(4)
                .add(&b.powi(2))
                .add(&a.powi(2).mul(&b.powi(2)))
        });
        let d = a3_normal_data(&j, &SearchConfig::default()).unwrap();
        assert_relative_eq!(d.omega2[(0, 0)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.c[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.psi2[(0, 0)], -0.5, epsilon = 1e-10);
    }

    #[test]
    fn psi_with_l_coupling() {
        // K=1, omega=1, L=1, Omega1=Omega2=0:
        // Theta = [[4, 3a^2], [1, 2]], inverse lower-right = 4/(8-3a^2)
        //       = 1/2 + (3/16) a^2 + O(a^4)
        let n = 1;
        let (p0, p1, p2) = psi_series_parts(
            1.0,
            &[1.0],
            &[1.0],
            &DMatrix::zeros(n, n),
            &DMatrix::zeros(n, n),
        )
        .unwrap();
        assert_relative_eq!(p0[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p1[(0, 0)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p2[(0, 0)], 3.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn a5_extraction() {
        // w = a^6 + (b - a^2 - a^3)^2: C=1, D=1, E=0
        let j = jet2(|a, b| {
            let z = b.sub(&a.powi(2)).sub(&a.powi(3));
            a.powi(6).add(&z.powi(2))
        });
        let d = a5_normal_data(&j, &SearchConfig::default()).unwrap();
        assert_relative_eq!(d.c[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.d[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.e[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(d.k, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn a5_extraction_3d() {
        // w = a^6 + (b1 - a^2)^2 + (b2 + a^4)^2: C=(1,0), D=(0,0), E=(0,-1)
        let a = Jet::variable(3, 8, 0, 0.0).unwrap();
        let b1 = Jet::variable(3, 8, 1, 0.0).unwrap();
        let b2 = Jet::variable(3, 8, 2, 0.0).unwrap();
        let j = a
            .powi(6)
            .add(&b1.sub(&a.powi(2)).powi(2))
            .add(&b2.add(&a.powi(4)).powi(2));
        let d = a5_normal_data(&j, &SearchConfig::default()).unwrap();
        assert_relative_eq!(d.c[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.c[1], 0.0, epsilon = 1e-10);
        assert_relative_eq!(d.d[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(d.d[1], 0.0, epsilon = 1e-10);
        assert_relative_eq!(d.e[0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(d.e[1], -1.0, epsilon = 1e-10);
    }
}

//! Signatures of perestroikas: the inertia of the quadratic form that the
//! time function induces on the tie stratum X.

use crate::error::{Result, ShockError};
use crate::minima::{A3Data, MinimaCollection, MinimumClass};
use nalgebra::DMatrix;
use serde::Serialize;

/// Inertia [p, q] of the time form on X; [0,0] when dim X = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub const TRIVIAL: Signature = Signature { p: 0, q: 0 };

    /// Table rendering: "" for [0,0], else a sign string like "[++-]".
    pub fn render(&self) -> String {
        if self.p == 0 && self.q == 0 {
            String::new()
        } else {
            let mut s = String::from("[");
            for _ in 0..self.p {
                s.push('+');
            }
            for _ in 0..self.q {
                s.push('-');
            }
            s.push(']');
            s
        }
    }

    pub fn flipped(&self) -> Signature {
        Signature {
            p: self.q,
            q: self.p,
        }
    }
}

/// Eigen-sign counts of a symmetric matrix; degenerate eigenvalues (below
/// `tol` relative to the largest) are an error.
pub fn inertia(m: &DMatrix<f64>, tol: f64) -> Result<(Signature, Vec<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Signature::TRIVIAL, vec![]));
    }
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let eigs: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    let scale = eigs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if scale == 0.0 {
        return Err(ShockError::Degenerate {
            reason: "quadratic form is zero".into(),
        });
    }
    let mut p = 0;
    let mut q = 0;
    for &e in &eigs {
        if e > tol * scale {
            p += 1;
        } else if e < -tol * scale {
            q += 1;
        } else {
            return Err(ShockError::Degenerate {
                reason: format!("quadratic form has a near-zero eigenvalue {e:.3e}"),
            });
        }
    }
    Ok((Signature { p, q }, eigs))
}

/// Signature for a word A1^m with 3 <= m < d + 2: the minima span an
/// (m-2)-plane Lambda; project each inverse Hessian onto the orthogonal
/// complement and weight by the sign system.
pub fn signature_a1m(
    mc: &MinimaCollection,
    c: &[f64],
    tol: f64,
) -> Result<(Signature, Vec<f64>)> {
    let d = mc.dim;
    let m = mc.records.len();
    if !(3..d + 2).contains(&m) {
        return Err(ShockError::Invalid(format!(
            "signature_a1m needs 3 <= m < d + 2, got m = {m}, d = {d}"
        )));
    }
    for r in &mc.records {
        if r.class != MinimumClass::M1 {
            return Err(ShockError::Invalid("word is not pure A1".into()));
        }
    }
    // Direction space of the affine hull.
    let mut mean = vec![0.0; d];
    for r in &mc.records {
        for (s, x) in mean.iter_mut().zip(&r.location) {
            *s += x / m as f64;
        }
    }
    let mut centered = DMatrix::zeros(m, d);
    for (row, r) in mc.records.iter().enumerate() {
        for i in 0..d {
            centered[(row, i)] = r.location[i] - mean[i];
        }
    }
    let svd = centered.svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let span_dim = m - 2;
    // Points of a perestroika lie in an (m-2)-plane: singular values past
    // span_dim must vanish.
    for k in span_dim..sv.len().min(d) {
        if sv[k] > 1e-5 * smax.max(1e-300) {
            return Err(ShockError::Degenerate {
                reason: format!(
                    "minima do not lie in an (m-2)-plane: sigma_{k} = {:.3e}",
                    sv[k]
                ),
            });
        }
    }
    let dim_xp = d - span_dim;
    // Orthonormal basis of the complement: remaining right singular vectors.
    let mut basis = Vec::with_capacity(dim_xp);
    for k in span_dim..d {
        if k < vt.nrows() {
            basis.push((0..d).map(|i| vt[(k, i)]).collect::<Vec<f64>>());
        }
    }
    if basis.len() < dim_xp {
        // Complete with Gram-Schmidt against the span rows.
        let mut have: Vec<Vec<f64>> = (0..vt.nrows().min(span_dim))
            .map(|r| (0..d).map(|i| vt[(r, i)]).collect())
            .collect();
        have.extend(basis.iter().cloned());
        for seed in 0..d {
            if have.len() >= d {
                break;
            }
            let mut v = vec![0.0; d];
            v[seed] = 1.0;
            for h in &have {
                let dot: f64 = h.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, hi) in v.iter_mut().zip(h) {
                    *vi -= dot * hi;
                }
            }
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-8 {
                let v: Vec<f64> = v.iter().map(|x| x / n).collect();
                have.push(v.clone());
                basis.push(v);
            }
        }
    }
    let mut xi = DMatrix::zeros(dim_xp, dim_xp);
    for (idx, r) in mc.records.iter().enumerate() {
        let phi = r
            .hessian
            .clone()
            .try_inverse()
            .ok_or(ShockError::Degenerate {
                reason: "singular Hessian at an A1 minimum".into(),
            })?;
        for a in 0..dim_xp {
            for b in 0..dim_xp {
                let va = nalgebra::DVector::from_column_slice(&basis[a]);
                let vb = nalgebra::DVector::from_column_slice(&basis[b]);
                xi[(a, b)] += c[idx] * (va.transpose() * &phi * vb)[(0, 0)];
            }
        }
    }
    // Symmetrize rounding noise.
    let xi = 0.5 * (&xi + xi.transpose());
    inertia(&xi, tol)
}

/// Signature of a lone A3 perestroika (C = 0, d >= 2): the form -Psi_2.
pub fn signature_a3(a3: &A3Data, tol: f64) -> Result<(Signature, Vec<f64>)> {
    let xi = -a3.psi2.clone();
    let xi = 0.5 * (&xi + xi.transpose());
    inertia(&xi, tol)
}

/// Signature of the A1 A3 perestroika in d = 3. The c-vector follows the
/// basis (A1 point, [a^2], [a], [1]); n = (C2, -C1) is normal to the kernel
/// plane inside the b-plane, and
///
/// ```text
/// Xi = c1 Phi(0,n) + c2 Psi2(n) + c3 Psi1(n) + c4 Psi0(n).
/// ```
pub fn signature_a1a3(
    a1_hessian_frame: &DMatrix<f64>,
    a3: &A3Data,
    c: &[f64],
    tol: f64,
) -> Result<(Signature, Vec<f64>)> {
    if a3.c.len() != 2 {
        return Err(ShockError::Invalid("signature_a1a3 needs d = 3".into()));
    }
    if c.len() != 4 {
        return Err(ShockError::Invalid("c must have 4 components".into()));
    }
    let n = [a3.c[1], -a3.c[0]];
    let phi = a1_hessian_frame
        .clone()
        .try_inverse()
        .ok_or(ShockError::Degenerate {
            reason: "singular Hessian at the A1 minimum".into(),
        })?;
    let cov = nalgebra::DVector::from_column_slice(&[0.0, n[0], n[1]]);
    let phi_nn = (cov.transpose() * &phi * &cov)[(0, 0)];
    let quad = |m: &DMatrix<f64>| -> f64 {
        let nv = nalgebra::DVector::from_column_slice(&n);
        (nv.transpose() * m * &nv)[(0, 0)]
    };
    let xi = c[0] * phi_nn + c[1] * quad(&a3.psi2) + c[2] * quad(&a3.psi1) + c[3] * quad(&a3.psi0);
    let scale = phi_nn
        .abs()
        .max(quad(&a3.psi0).abs())
        .max(quad(&a3.psi1).abs())
        .max(quad(&a3.psi2).abs())
        .max(1e-300);
    if xi.abs() <= tol * scale {
        return Err(ShockError::Degenerate {
            reason: format!("A1A3 time form is degenerate: Xi = {xi:.3e}"),
        });
    }
    let sig = if xi > 0.0 {
        Signature { p: 1, q: 0 }
    } else {
        Signature { p: 0, q: 1 }
    };
    Ok((sig, vec![xi]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Jet;
    use crate::minima::MinimumRecord;

    fn record_at(loc: &[f64], hess_diag: &[f64]) -> MinimumRecord {
        let d = loc.len();
        let mut h = DMatrix::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = hess_diag[i];
        }
        MinimumRecord {
            location: loc.to_vec(),
            value: 0.0,
            class: MinimumClass::M1,
            hessian: h,
            jet: Jet::zero(d, 2).unwrap(),
        }
    }

    #[test]
    fn collinear_triple_signature() {
        // Spec'd worked example: vertical Hessian components (1, 1, 2),
        // c = (-1, 2, -1)/sqrt(6): Xi = -1 + 2 - 1/2 = 1/2 > 0 -> [1,0].
        let mc = MinimaCollection {
            records: vec![
                record_at(&[-1.0, 0.0], &[1.0, 1.0]),
                record_at(&[0.0, 0.0], &[1.0, 1.0]),
                record_at(&[1.0, 0.0], &[1.0, 2.0]),
            ],
            y_star: 0.0,
            tie_tolerance: 1e-9,
            dim: 2,
        };
        let c = [-1.0, 2.0, -1.0];
        let (sig, _) = signature_a1m(&mc, &c, 1e-9).unwrap();
        assert_eq!(sig, Signature { p: 1, q: 0 });
    }

    #[test]
    fn symmetric_degeneracy_detected() {
        let mc = MinimaCollection {
            records: vec![
                record_at(&[-1.0, 0.0], &[1.0, 1.0]),
                record_at(&[0.0, 0.0], &[1.0, 1.0]),
                record_at(&[1.0, 0.0], &[1.0, 1.0]),
            ],
            y_star: 0.0,
            tie_tolerance: 1e-9,
            dim: 2,
        };
        let c = [-1.0, 2.0, -1.0];
        assert!(signature_a1m(&mc, &c, 1e-9).is_err());
    }

    #[test]
    fn signature_flip() {
        assert_eq!(Signature { p: 2, q: 1 }.flipped(), Signature { p: 1, q: 2 });
        assert_eq!(Signature { p: 1, q: 1 }.render(), "[+-]");
        assert_eq!(Signature::TRIVIAL.render(), "");
    }
}

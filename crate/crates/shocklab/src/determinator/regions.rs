//! Kernel-plane geometry of an A3 minimum and the case analysis it drives.
//!
//! With C != 0 the points (a, s C/|C|) form the kernel plane; the kernel
//! circle |C| (a^2 + s^2) - s = 0 is tangent to the kernel line s = 0 at the
//! origin. Circle and line cut the plane into the disk D, the rest of the
//! upper half plane U, and the lower half plane P, and the region of a tied
//! A1 minimum decides the extended name of the perestroika.

use crate::error::{Result, ShockError};
use crate::minima::A5Data;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelRegion {
    Disk,
    Domain,
    Semiplane,
    OnBoundary,
}

/// Classify a point of the kernel plane, given in coordinates (a1, s1) with
/// the s-axis along C/|C|.
pub fn kernel_region(c_norm: f64, a1: f64, s1: f64, tol: f64) -> Result<KernelRegion> {
    if c_norm <= tol {
        return Err(ShockError::Degenerate {
            reason: "kernel circle undefined: C = 0".into(),
        });
    }
    let g = c_norm * (a1 * a1 + s1 * s1) - s1;
    let scale = c_norm * (a1 * a1 + s1 * s1).max(1.0);
    if s1.abs() <= tol || g.abs() <= tol * scale {
        return Ok(KernelRegion::OnBoundary);
    }
    if s1 < 0.0 {
        Ok(KernelRegion::Semiplane)
    } else if g < 0.0 {
        Ok(KernelRegion::Disk)
    } else {
        Ok(KernelRegion::Domain)
    }
}

/// Extended-name signs (A1 sign, A3 sign) from the kernel region of the A1
/// point: D -> A1^+ A3^-, U -> A1^- A3^+, P -> A1^- A3^-.
pub fn kernel_region_signs(region: KernelRegion) -> Option<(i8, i8)> {
    match region {
        KernelRegion::Disk => Some((1, -1)),
        KernelRegion::Domain => Some((-1, 1)),
        KernelRegion::Semiplane => Some((-1, -1)),
        KernelRegion::OnBoundary => None,
    }
}

/// The two-A1 case: the sphere through both A1 points that is tangent to the
/// kernel line and circle at their common point O meets the kernel plane in
/// a circle S (or degenerates to O). S lies in one region, and together with
/// the side test on the A1 points this fixes the extended name.
///
/// Inputs are the kernel-frame coordinates (a, s, n) of the two A1 points;
/// returns (a1 signs sorted, a3 sign).
pub fn a12a3_signs(
    c_norm: f64,
    p1: [f64; 3],
    p2: [f64; 3],
    samples: usize,
    tol: f64,
) -> Result<([i8; 2], i8)> {
    if c_norm <= tol {
        return Err(ShockError::Degenerate {
            reason: "kernel circle undefined: C = 0".into(),
        });
    }
    let off1 = p1[2];
    let off2 = p2[2];
    if off1.abs() <= tol || off2.abs() <= tol {
        return Err(ShockError::Degenerate {
            reason: "an A1 point lies in the kernel plane".into(),
        });
    }
    // Sphere through O = 0, p1, p2 with center Z orthogonal to the a-axis:
    // Z = (0, zs, zn) solving 2 Z . p_i = |p_i|^2.
    let det = p1[1] * p2[2] - p1[2] * p2[1];
    let sq1: f64 = p1.iter().map(|x| x * x).sum();
    let sq2: f64 = p2.iter().map(|x| x * x).sum();
    let sscale = sq1.max(sq2).max(1e-300);
    if det.abs() <= tol * sscale {
        return Err(ShockError::Degenerate {
            reason: "A1 points and the kernel line are coplanar (no unique tangent sphere)"
                .into(),
        });
    }
    let zs = 0.5 * (sq1 * p2[2] - sq2 * p1[2]) / det;
    let zn = 0.5 * (p1[1] * sq2 - p2[1] * sq1) / det;
    let _ = zn;
    // S = sphere cap in the kernel plane: circle through O of radius |zs|
    // centered at (0, zs); it degenerates to O when zs = 0.
    let between = off1 * off2 < 0.0;
    let region = if zs.abs() <= tol {
        None // tangency: S degenerates to the point O
    } else {
        // Sample S and classify every sample away from O; the theorem's
        // hypotheses keep S inside one region, so demand unanimity.
        let mut region: Option<KernelRegion> = None;
        for k in 0..samples {
            let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / samples as f64;
            let a = zs.abs() * phi.sin();
            let s = zs + zs * -phi.cos() * 1.0;
            // skip samples too close to the common tangency point O
            if a * a + s * s < (1e-3 * zs.abs()).powi(2) {
                continue;
            }
            let r = kernel_region(c_norm, a, s, tol * 1e-2)?;
            if r == KernelRegion::OnBoundary {
                continue;
            }
            match region {
                None => region = Some(r),
                Some(prev) if prev != r => {
                    return Err(ShockError::Degenerate {
                        reason: "circle S straddles a kernel-region boundary".into(),
                    })
                }
                _ => {}
            }
        }
        Some(region.ok_or(ShockError::Degenerate {
            reason: "could not classify the circle S".into(),
        })?)
    };
    match (between, region) {
        (true, Some(KernelRegion::Disk)) => Ok(([1, 1], -1)),
        (true, Some(KernelRegion::Domain)) => Ok(([-1, -1], 1)),
        (true, Some(KernelRegion::Semiplane)) => Ok(([-1, -1], -1)),
        (true, None) => Err(ShockError::Degenerate {
            reason: "tangent sphere degenerates with A1 points on both sides".into(),
        }),
        (false, Some(KernelRegion::Domain)) => Ok(([1, -1], 1)),
        (false, Some(KernelRegion::Disk) | Some(KernelRegion::Semiplane)) | (false, None) => {
            Ok(([1, -1], -1))
        }
        (_, Some(KernelRegion::OnBoundary)) => unreachable!("filtered above"),
    }
}

/// Sign of an A5 perestroika from the determinant rule: A5^+ when
/// det1 = |C D| and det2 = |C D E; 1 0 |C|^2| have different signs.
pub fn a5_sign(a5: &A5Data, tol: f64) -> Result<i8> {
    if a5.c.len() != 2 {
        return Err(ShockError::Degenerate {
            reason: "A5 sign rule needs d = 3".into(),
        });
    }
    let det1 = a5.c[0] * a5.d[1] - a5.c[1] * a5.d[0];
    let c2 = a5.c[0] * a5.c[0] + a5.c[1] * a5.c[1];
    // Expansion along the bottom row (1, 0, |C|^2).
    let det2 = (a5.d[0] * a5.e[1] - a5.d[1] * a5.e[0]) + c2 * det1;
    let scale = [&a5.c, &a5.d, &a5.e]
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    if det1.abs() <= tol * scale * scale || det2.abs() <= tol * scale.powi(4) {
        return Err(ShockError::Degenerate {
            reason: format!("A5 determinants too small: det1 = {det1:.3e}, det2 = {det2:.3e}"),
        });
    }
    Ok(if det1 * det2 < 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn regions_of_the_kernel_plane() {
        assert_eq!(
            kernel_region(1.0, 0.0, 0.25, 1e-9).unwrap(),
            KernelRegion::Disk
        );
        assert_eq!(
            kernel_region(1.0, 0.0, 2.0, 1e-9).unwrap(),
            KernelRegion::Domain
        );
        assert_eq!(
            kernel_region(1.0, 0.0, -1.0, 1e-9).unwrap(),
            KernelRegion::Semiplane
        );
        // on the circle: |C|(a^2+s^2) = s
        assert_eq!(
            kernel_region(1.0, 0.0, 1.0, 1e-9).unwrap(),
            KernelRegion::OnBoundary
        );
    }

    #[test]
    fn a5_sign_rule() {
        let mk = |c: [f64; 2], d: [f64; 2], e: [f64; 2]| A5Data {
            frame: DMatrix::identity(3, 3),
            k: 1.0,
            omega: vec![1.0, 1.0],
            c: c.to_vec(),
            d: d.to_vec(),
            e: e.to_vec(),
        };
        assert_eq!(a5_sign(&mk([1.0, 0.0], [0.0, 1.0], [0.0, 0.0]), 1e-9).unwrap(), -1);
        assert_eq!(a5_sign(&mk([1.0, 0.0], [0.0, 1.0], [-2.0, 0.0]), 1e-9).unwrap(), -1);
        assert_eq!(a5_sign(&mk([1.0, 0.0], [0.0, 1.0], [2.0, 0.0]), 1e-9).unwrap(), 1);
        // parallel C, D: det1 = 0
        assert!(a5_sign(&mk([1.0, 0.0], [2.0, 0.0], [0.0, 1.0]), 1e-9).is_err());
    }

    #[test]
    fn mirrored_pair_deep_disk() {
        // Symmetric pair across the kernel plane, sphere center low in the
        // disk: expect A1^{++} A3^-.
        let (a1, a3) = a12a3_signs(1.0, [0.0, 0.2, 0.3], [0.0, 0.2, -0.3], 64, 1e-9).unwrap();
        assert_eq!(a1, [1, 1]);
        assert_eq!(a3, -1);
    }

    #[test]
    fn same_side_pair_in_domain() {
        // Same side of the kernel plane, sphere cap in U: A1^{+-} A3^+.
        // z_s = 0.875 > 1/(2|C|) = 0.5 for these points.
        let (a1, a3) = a12a3_signs(1.0, [0.0, 2.0, 0.5], [0.0, 2.0, 1.0], 64, 1e-9).unwrap();
        assert_eq!(a1, [1, -1]);
        assert_eq!(a3, 1);
    }
}

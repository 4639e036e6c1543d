//! Instant-shock sections of the normal forms.
//!
//! The world shock of a normal form lives in the branch/section coordinates
//! lambda = (xi_1..xi_kappa, eta_1..eta_n); the isochrone tau(lambda) =
//! t_rel is solved for the first branch coordinate, which leaves a
//! d-dimensional parameter space. The non-smooth locus of the min-expression
//! on that isochrone is the instant shock just before or after the
//! perestroika.

use super::table::TimeNormalForm;
use crate::geometry::{extract_interfaces, GridSpec, RegionField, ShockGeometry};
use crate::polyroots::{min_quartic, min_sextic, sextic_local_minima};

/// Which smooth branch of the min realizes the value at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchLabel {
    /// One of the affine branches (the constant-0 branch is index m-1 for a
    /// pure A1 word).
    Affine(usize),
    /// The inner minimized family, identified by its argmin.
    Inner { u: f64 },
}

pub struct NormalFormField {
    pub nf: TimeNormalForm,
    pub t_rel: f64,
    /// Threshold on argmin jumps of the sextic family.
    pub jump_tol: f64,
}

impl NormalFormField {
    /// Map section parameters to the full branch-coordinate vector xi.
    /// Parameters are (xi_2..xi_kappa, eta_1..eta_n); xi_1 is solved from
    /// tau = t_rel (its coefficient is +-1 in every table entry).
    pub fn coords(&self, p: &[f64]) -> Vec<f64> {
        let kappa = self.nf.kappa();
        let mut xi = vec![0.0; kappa];
        let mut acc = self.t_rel;
        for i in 1..kappa {
            xi[i] = p[i - 1];
            acc -= self.nf.xi_signs[i] as f64 * xi[i];
        }
        for (j, q) in self.nf.eta_signs.iter().enumerate() {
            let e = p[kappa - 1 + j];
            acc -= *q as f64 * e * e;
        }
        xi[0] = acc / self.nf.xi_signs[0] as f64;
        xi
    }

    fn label_at(&self, xi: &[f64]) -> BranchLabel {
        let w = &self.nf.word;
        if w.is_pure_a1() {
            let kappa = w.kappa();
            let mut best = (0.0, kappa); // the constant 0 branch
            for (i, &x) in xi.iter().enumerate() {
                if x < best.0 {
                    best = (x, i);
                }
            }
            BranchLabel::Affine(best.1)
        } else if w.is_a1l_a3() {
            let l = w.a1;
            let (inner, u) = min_quartic(xi[l], xi[l + 1]);
            let mut best = (inner, None);
            for (i, &x) in xi[..l].iter().enumerate() {
                if x < best.0 {
                    best = (x, Some(i));
                }
            }
            match best.1 {
                Some(i) => BranchLabel::Affine(i),
                None => BranchLabel::Inner { u },
            }
        } else {
            let (_, u) = min_sextic(xi[0], xi[1], xi[2], xi[3]);
            BranchLabel::Inner { u }
        }
    }

    /// Do two inner-branch samples of the quartic family sit in the same
    /// smooth well? The minimizer jumps exactly across {q = 0, p < 0}.
    fn same_quartic_well(&self, pa: &[f64], pb: &[f64]) -> bool {
        let l = self.nf.word.a1;
        let xa = self.coords(pa);
        let xb = self.coords(pb);
        let (qa, qb) = (xa[l + 1], xb[l + 1]);
        let sa = if qa >= 0.0 { 1.0 } else { -1.0 };
        let sb = if qb >= 0.0 { 1.0 } else { -1.0 };
        if sa == sb {
            return true;
        }
        // q is a section parameter, hence linear along the segment.
        let s = qa / (qa - qb);
        let pm: Vec<f64> = pa.iter().zip(pb).map(|(a, b)| a + s * (b - a)).collect();
        let xm = self.coords(&pm);
        xm[l] >= 0.0
    }

    fn same_sextic_well(&self, pa: &[f64], pb: &[f64], ua: f64, ub: f64, depth: usize) -> bool {
        if (ua - ub).abs() <= self.jump_tol {
            return true;
        }
        if depth == 0 {
            return false;
        }
        let pm: Vec<f64> = pa
            .iter()
            .zip(pb)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let xm = self.coords(&pm);
        let (_, um) = min_sextic(xm[0], xm[1], xm[2], xm[3]);
        self.same_sextic_well(pa, &pm, ua, um, depth - 1)
            && self.same_sextic_well(&pm, pb, um, ub, depth - 1)
    }
}

impl RegionField for NormalFormField {
    type Label = BranchLabel;

    fn sample(&self, p: &[f64]) -> BranchLabel {
        self.label_at(&self.coords(p))
    }

    fn same_region(&self, a: &BranchLabel, b: &BranchLabel, pa: &[f64], pb: &[f64]) -> bool {
        match (a, b) {
            (BranchLabel::Affine(i), BranchLabel::Affine(j)) => i == j,
            (BranchLabel::Inner { u: ua }, BranchLabel::Inner { u: ub }) => {
                if self.nf.word.is_a1l_a3() {
                    self.same_quartic_well(pa, pb)
                } else {
                    self.same_sextic_well(pa, pb, *ua, *ub, 14)
                }
            }
            _ => false,
        }
    }

    fn crossing(&self, pa: &[f64], pb: &[f64], la: &BranchLabel, lb: &BranchLabel) -> f64 {
        // Value-gap bisection between the two competing branches; falls back
        // to region bisection for same-family well swaps.
        match (la, lb) {
            (BranchLabel::Inner { .. }, BranchLabel::Inner { u: _ })
                if self.nf.word.is_a1l_a3() =>
            {
                // Crossing sits on q = 0, which is linear along the segment.
                let l = self.nf.word.a1;
                let (qa, qb) = (self.coords(pa)[l + 1], self.coords(pb)[l + 1]);
                qa / (qa - qb)
            }
            _ => {
                let value = |label: &BranchLabel, xi: &[f64]| -> f64 {
                    match label {
                        BranchLabel::Affine(i) => {
                            if *i == xi.len() {
                                0.0
                            } else {
                                xi[*i]
                            }
                        }
                        BranchLabel::Inner { .. } => {
                            let w = &self.nf.word;
                            if w.is_a1l_a3() {
                                let l = w.a1;
                                min_quartic(xi[l], xi[l + 1]).0
                            } else {
                                min_sextic(xi[0], xi[1], xi[2], xi[3]).0
                            }
                        }
                    }
                };
                // Well swaps inside the sextic family: bisect on which well
                // wins, tracking both wells by continuation.
                if let (BranchLabel::Inner { u: ua }, BranchLabel::Inner { u: ub }) = (la, lb) {
                    if self.nf.word.is_a5() {
                        let mut lo = 0.0;
                        let mut hi = 1.0;
                        for _ in 0..40 {
                            let mid = 0.5 * (lo + hi);
                            let pm: Vec<f64> =
                                pa.iter().zip(pb).map(|(a, b)| a + mid * (b - a)).collect();
                            let xm = self.coords(&pm);
                            let wells = sextic_local_minima(xm[0], xm[1], xm[2], xm[3]);
                            let nearest = |u: f64| -> Option<(f64, f64)> {
                                wells
                                    .iter()
                                    .cloned()
                                    .min_by(|a, b| {
                                        (a.0 - u).abs().partial_cmp(&(b.0 - u).abs()).unwrap()
                                    })
                            };
                            match (nearest(*ua), nearest(*ub)) {
                                (Some((_, va)), Some((_, vb))) => {
                                    if va <= vb {
                                        lo = mid;
                                    } else {
                                        hi = mid;
                                    }
                                }
                                _ => break,
                            }
                        }
                        return 0.5 * (lo + hi);
                    }
                }
                let ga = {
                    let xi = self.coords(pa);
                    value(lb, &xi) - value(la, &xi)
                };
                let mut lo = 0.0;
                let mut hi = 1.0;
                let mut flo = ga;
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    let pm: Vec<f64> = pa.iter().zip(pb).map(|(a, b)| a + mid * (b - a)).collect();
                    let xm = self.coords(&pm);
                    let fm = value(lb, &xm) - value(la, &xm);
                    if flo * fm > 0.0 {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// Extract the shock section of a normal form on the isochrone
/// tau = t_rel over the window [-w, w]^d at the given resolution.
pub fn normal_form_section(
    nf: &TimeNormalForm,
    t_rel: f64,
    window: f64,
    resolution: usize,
    jump_tol: f64,
) -> ShockGeometry {
    let d = nf.d;
    let field = NormalFormField {
        nf: nf.clone(),
        t_rel,
        jump_tol,
    };
    let grid = GridSpec::new(vec![-window; d], vec![window; d], vec![resolution; d]);
    extract_interfaces(&field, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::table::table1;
    use crate::minima::ShockWord;

    fn find(d: usize, render: &str) -> TimeNormalForm {
        table1(d)
            .into_iter()
            .find(|v| v.render() == render)
            .unwrap_or_else(|| panic!("no entry {render}"))
    }

    #[test]
    fn a13_line_sections() {
        // tau = -(alpha+beta): before has 2 points, after 1.
        let v = find(1, "A1^{+--}");
        let before = normal_form_section(&v, -0.35, 1.0, 257, 0.1);
        let after = normal_form_section(&v, 0.35, 1.0, 257, 0.1);
        assert_eq!(before.vertices.len(), 2);
        assert_eq!(after.vertices.len(), 1);
        // and its time reverse
        let v = find(1, "A1^{++-}");
        let after = normal_form_section(&v, 0.35, 1.0, 257, 0.1);
        assert_eq!(after.vertices.len(), 2);
    }

    #[test]
    fn a3_line_sections() {
        // A3^-: a shock point is born.
        let v = find(1, "A3^-");
        let before = normal_form_section(&v, -0.35, 1.0, 257, 0.1);
        let after = normal_form_section(&v, 0.35, 1.0, 257, 0.1);
        assert_eq!(before.vertices.len(), 0);
        assert_eq!(after.vertices.len(), 1);
    }

    #[test]
    fn quartic_well_identity() {
        // Sanity of the exact ridge rule on the A3 word in the plane.
        let v = TimeNormalForm {
            word: ShockWord::new(0, 1, 0),
            d: 2,
            xi_signs: vec![-1, 0],
            eta_signs: vec![1],
        };
        let f = NormalFormField {
            nf: v,
            t_rel: 0.3,
            jump_tol: 0.1,
        };
        // p = xi_1 solved: xi_1 = -(0.3 - q*eta^2)... with these signs
        // tau = -p + eta^2 -> p = eta^2 - 0.3 < 0 near eta = 0: the ridge.
        let la = f.sample(&[-0.1, 0.0]);
        let lb = f.sample(&[0.1, 0.0]);
        match (&la, &lb) {
            (BranchLabel::Inner { u: ua }, BranchLabel::Inner { u: ub }) => {
                assert!(ua * ub < 0.0, "wells on opposite sides");
            }
            other => panic!("expected inner labels, got {other:?}"),
        }
        assert!(!f.same_region(&la, &lb, &[-0.1, 0.0], &[0.1, 0.0]));
        // far from the ridge (p > 0): same well even across q = 0
        let pa = [-0.1, 0.8];
        let pb = [0.1, 0.8];
        let la = f.sample(&pa);
        let lb = f.sample(&pb);
        assert!(f.same_region(&la, &lb, &pa, &pb));
    }
}

//! The decomposition matrix M and the sign system.
//!
//! For a collection of tied global minima, the classes of the functions
//! `1, a_1..a_d, |a|^2` in the cotangent algebra of the tie stratum form a
//! `(d+2) x mu` matrix M. Transversality of the family is `rank M = mu`;
//! `rank M' = mu` (M without its last row) makes the point a singularity of
//! the instant shock and `rank M' = mu - 1` a perestroika, in which case
//!
//! ```text
//! M' c = 0,   M_{d+2} c < 0
//! ```
//!
//! has a solution whose sign pattern is the extended name.

use crate::error::{Result, ShockError};
use crate::minima::{A3Data, A5Data, MinimaCollection, ShockWord};
use nalgebra::DMatrix;

/// Which basis layout the columns of M follow.
#[derive(Debug, Clone, PartialEq)]
pub enum WordCase {
    /// One column (1, A_i, |A_i|^2) per minimum.
    PureA1 { m: usize },
    /// l columns for the A1 minima in the frame of the A3 minimum, then the
    /// block columns for the basis [a^2], [a], [1].
    A1lA3 { l: usize },
    /// Columns for the basis [a^4], [a^3], [a^2], [a], [1].
    A5,
}

#[derive(Debug, Clone)]
pub struct MMatrix {
    pub matrix: DMatrix<f64>,
    pub case: WordCase,
    /// Which columns carry a minimum's sign (per-minimum leading basis
    /// element); pairs of (column, record index).
    pub sign_columns: Vec<(usize, usize)>,
}

impl MMatrix {
    pub fn m_prime(&self) -> DMatrix<f64> {
        let rows = self.matrix.nrows() - 1;
        self.matrix.view((0, 0), (rows, self.matrix.ncols())).into_owned()
    }

    pub fn last_row(&self) -> Vec<f64> {
        let r = self.matrix.nrows() - 1;
        (0..self.matrix.ncols()).map(|c| self.matrix[(r, c)]).collect()
    }
}

/// Express `p` in the orthonormal frame of a degenerate minimum at `origin`.
pub fn to_frame(frame: &DMatrix<f64>, origin: &[f64], p: &[f64]) -> Vec<f64> {
    let d = origin.len();
    let mut out = vec![0.0; d];
    for (j, oj) in out.iter_mut().enumerate() {
        for i in 0..d {
            *oj += frame[(i, j)] * (p[i] - origin[i]);
        }
    }
    out
}

/// Assemble M for the word of the collection. Degenerate normal-form data
/// must be supplied when the word demands it.
pub fn build_m(
    mc: &MinimaCollection,
    a3: Option<&A3Data>,
    a5: Option<&A5Data>,
) -> Result<MMatrix> {
    let word = mc
        .word()
        .map_err(|why| ShockError::Degenerate { reason: why })?;
    let d = mc.dim;
    if word.mu() > d + 2 {
        return Err(ShockError::Degenerate {
            reason: format!("word {} has mu = {} > d + 2", word, word.mu()),
        });
    }
    if word.is_pure_a1() && word.a1 >= 2 {
        Ok(build_pure_a1(mc, &word))
    } else if word.is_a1l_a3() {
        let a3 = a3.ok_or_else(|| ShockError::Invalid("missing A3 normal data".into()))?;
        build_a1l_a3(mc, &word, a3)
    } else if word.is_a5() {
        let a5 = a5.ok_or_else(|| ShockError::Invalid("missing A5 normal data".into()))?;
        build_a5_case(mc, a5)
    } else {
        Err(ShockError::Degenerate {
            reason: format!("word {} is outside the generic list for d <= 3", word),
        })
    }
}

fn build_pure_a1(mc: &MinimaCollection, word: &ShockWord) -> MMatrix {
    let d = mc.dim;
    let m = word.a1;
    let mut mat = DMatrix::zeros(d + 2, m);
    for (col, rec) in mc.records.iter().enumerate() {
        mat[(0, col)] = 1.0;
        let mut sq = 0.0;
        for i in 0..d {
            mat[(1 + i, col)] = rec.location[i];
            sq += rec.location[i] * rec.location[i];
        }
        mat[(d + 1, col)] = sq;
    }
    MMatrix {
        matrix: mat,
        case: WordCase::PureA1 { m },
        sign_columns: (0..m).map(|c| (c, c)).collect(),
    }
}

fn build_a1l_a3(mc: &MinimaCollection, word: &ShockWord, a3: &A3Data) -> Result<MMatrix> {
    let d = mc.dim;
    let l = word.a1;
    let mu = l + 3;
    let a3_idx = mc
        .records
        .iter()
        .position(|r| r.class == crate::minima::MinimumClass::M3)
        .ok_or_else(|| ShockError::Invalid("A3 record not found".into()))?;
    let origin = &mc.records[a3_idx].location;
    let mut mat = DMatrix::zeros(d + 2, mu);
    let mut sign_columns = Vec::new();
    let mut col = 0;
    for (idx, rec) in mc.records.iter().enumerate() {
        if idx == a3_idx {
            continue;
        }
        let fc = to_frame(&a3.frame, origin, &rec.location);
        mat[(0, col)] = 1.0;
        for i in 0..d {
            mat[(1 + i, col)] = fc[i];
        }
        mat[(d + 1, col)] = fc.iter().map(|v| v * v).sum();
        sign_columns.push((col, idx));
        col += 1;
    }
    // Block columns for [a^2], [a], [1] in the frame coordinates (a, b).
    // [1] -> (0, 0, 1); [a] -> (0, 1, 0); [b_j] -> (C_j, 0, 0);
    // [|a|^2] -> (1, 0, 0).
    mat[(0, col + 2)] = 1.0;
    mat[(1, col + 1)] = 1.0;
    for j in 0..d - 1 {
        mat[(2 + j, col)] = a3.c[j];
    }
    mat[(d + 1, col)] = 1.0;
    sign_columns.push((col, a3_idx));
    Ok(MMatrix {
        matrix: mat,
        case: WordCase::A1lA3 { l },
        sign_columns,
    })
}

fn build_a5_case(mc: &MinimaCollection, a5: &A5Data) -> Result<MMatrix> {
    let d = mc.dim;
    if d != 3 {
        return Err(ShockError::Degenerate {
            reason: "word A5 needs d = 3".into(),
        });
    }
    // Columns [a^4], [a^3], [a^2], [a], [1]:
    // [1] -> (0,0,0,0,1); [a] -> (0,0,0,1,0); [b_j] -> (E_j, D_j, C_j, 0, 0);
    // [|a|^2] -> (|C|^2, 0, 1, 0, 0).
    let mut mat = DMatrix::zeros(d + 2, 5);
    mat[(0, 4)] = 1.0;
    mat[(1, 3)] = 1.0;
    for j in 0..d - 1 {
        mat[(2 + j, 0)] = a5.e[j];
        mat[(2 + j, 1)] = a5.d[j];
        mat[(2 + j, 2)] = a5.c[j];
    }
    let c2: f64 = a5.c.iter().map(|v| v * v).sum();
    mat[(d + 1, 0)] = c2;
    mat[(d + 1, 2)] = 1.0;
    Ok(MMatrix {
        matrix: mat,
        case: WordCase::A5,
        sign_columns: vec![(0, 0)],
    })
}

/// Ranks of M and M' by singular values with a relative threshold.
pub fn ranks(m: &MMatrix, rel_tol: f64) -> (usize, usize, Vec<f64>, Vec<f64>) {
    let sv = m.matrix.clone().svd(false, false).singular_values;
    let svp = m.m_prime().svd(false, false).singular_values;
    let rank_of = |s: &nalgebra::DVector<f64>| -> usize {
        let smax = s.iter().cloned().fold(0.0f64, f64::max);
        if smax == 0.0 {
            return 0;
        }
        s.iter().filter(|&&x| x > rel_tol * smax).count()
    };
    (
        rank_of(&sv),
        rank_of(&svp),
        sv.iter().cloned().collect(),
        svp.iter().cloned().collect(),
    )
}

/// Solve `M' c = 0`, `M_{d+2} c < 0`, normalized to |c| = 1. Requires
/// rank M' = mu - 1; the margin is the smallest singular value ratio and the
/// inequality value.
pub fn solve_c(m: &MMatrix) -> Result<(Vec<f64>, f64)> {
    let mp = m.m_prime();
    let mu = mp.ncols();
    let svd = mp.svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested");
    // Nullspace direction: right singular vector of the smallest singular
    // value. M' has d+1 >= mu-1 rows; the smallest of the mu singular values
    // (padding with zero when rows < mu) belongs to the nullspace.
    let nsv = vt.nrows();
    let mut c: Vec<f64> = if nsv < mu {
        // Fewer rows than columns: v_t is (rows x mu); complete the basis by
        // projecting out the row space from a seed vector.
        let mut best = vec![0.0; mu];
        let mut best_norm = -1.0;
        for seed in 0..mu {
            let mut v = vec![0.0; mu];
            v[seed] = 1.0;
            for r in 0..nsv {
                let dot: f64 = (0..mu).map(|j| vt[(r, j)] * v[j]).sum();
                for (j, vj) in v.iter_mut().enumerate() {
                    *vj -= dot * vt[(r, j)];
                }
            }
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > best_norm {
                best_norm = n;
                best = v;
            }
        }
        best
    } else {
        (0..mu).map(|j| vt[(nsv - 1, j)]).collect()
    };
    let norm: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(ShockError::Degenerate {
            reason: "nullspace of M' is numerically empty".into(),
        });
    }
    for x in c.iter_mut() {
        *x /= norm;
    }
    let last = m.last_row();
    let ineq: f64 = last.iter().zip(&c).map(|(a, b)| a * b).sum();
    if ineq > 0.0 {
        for x in c.iter_mut() {
            *x = -*x;
        }
    }
    let margin = ineq.abs();
    Ok((c, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn collinear_triple_sign_system() {
        // Three collinear points on a line in the plane: c ~ (-1, 2, -1)/|.|
        // with the inequality fixing the overall sign.
        let pts = [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]];
        let mut mat = DMatrix::zeros(4, 3);
        for (col, p) in pts.iter().enumerate() {
            mat[(0, col)] = 1.0;
            mat[(1, col)] = p[0];
            mat[(2, col)] = p[1];
            mat[(3, col)] = p[0] * p[0] + p[1] * p[1];
        }
        let m = MMatrix {
            matrix: mat,
            case: WordCase::PureA1 { m: 3 },
            sign_columns: vec![(0, 0), (1, 1), (2, 2)],
        };
        let (r, rp, _, _) = ranks(&m, 1e-7);
        assert_eq!(r, 3);
        assert_eq!(rp, 2);
        let (c, margin) = solve_c(&m).unwrap();
        let s = 6.0f64.sqrt();
        assert_relative_eq!(c[0], -1.0 / s, epsilon = 1e-10);
        assert_relative_eq!(c[1], 2.0 / s, epsilon = 1e-10);
        assert_relative_eq!(c[2], -1.0 / s, epsilon = 1e-10);
        assert!(margin > 0.1);
    }
}

//! Expression trees for smooth initial conditions.
//!
//! The language is deliberately small: polynomials over `a1..ad`, `sin`,
//! `cos`, `exp`, and Gaussian bumps. Every admissible field is entire, so
//! jets are exact up to truncation order. Division is allowed only by nonzero
//! constants (folded into a multiplication at parse time).

use crate::error::{Result, ShockError};
use crate::field::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    /// exp(-|a - center|^2 / width^2)
    Gauss { center: Vec<f64>, width: f64 },
}

/// A parsed initial condition phi0 over `a1..ad`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    dim: usize,
    ast: Expr,
}

impl FieldExpr {
    pub fn new(dim: usize, ast: Expr) -> Result<FieldExpr> {
        if !(1..=3).contains(&dim) {
            return Err(ShockError::BadDimension { dim });
        }
        validate(&ast, dim)?;
        Ok(FieldExpr { dim, ast })
    }

    /// Parse an expression; see [`crate::field::parse`] for the grammar.
    pub fn parse(source: &str, dim: usize) -> Result<FieldExpr> {
        crate::field::parse::parse_field(source, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// Plain evaluation.
    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        eval_f64(&self.ast, point)
    }

    /// Taylor jet of the field at `point`, truncated at `order` (<= 8).
    pub fn eval_jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        if order > crate::field::jet::MAX_ORDER {
            return Err(ShockError::OrderTooLarge {
                order,
                cap: crate::field::jet::MAX_ORDER,
            });
        }
        eval_jet(&self.ast, self.dim, point, order)
    }

    /// Canonical text form; `parse(unparse(e)) == e`.
    pub fn unparse(&self) -> String {
        let mut s = String::new();
        unparse(&self.ast, 0, &mut s);
        s
    }

    /// Substitute every variable by an affine combination of new variables:
    /// `a_i <- sum_j m[i][j] * a_j + c[i]`. Used for rigid-motion tests and
    /// frame changes; the result is again a field over `dim` variables.
    pub fn substitute_affine(&self, m: &[Vec<f64>], c: &[f64]) -> Result<FieldExpr> {
        let reps: Vec<Expr> = (0..self.dim)
            .map(|i| {
                let mut e = Expr::Const(c[i]);
                for (j, mij) in m[i].iter().enumerate() {
                    if *mij != 0.0 {
                        let term = Expr::Mul(Box::new(Expr::Const(*mij)), Box::new(Expr::Var(j)));
                        e = Expr::Add(Box::new(e), Box::new(term));
                    }
                }
                e
            })
            .collect();
        FieldExpr::new(self.dim, subst(&self.ast, &reps))
    }
}

fn subst(e: &Expr, reps: &[Expr]) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Var(i) => reps[*i].clone(),
        Expr::Add(a, b) => Expr::Add(Box::new(subst(a, reps)), Box::new(subst(b, reps))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(subst(a, reps)), Box::new(subst(b, reps))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(subst(a, reps)), Box::new(subst(b, reps))),
        Expr::Neg(a) => Expr::Neg(Box::new(subst(a, reps))),
        Expr::Pow(a, n) => Expr::Pow(Box::new(subst(a, reps)), *n),
        Expr::Sin(a) => Expr::Sin(Box::new(subst(a, reps))),
        Expr::Cos(a) => Expr::Cos(Box::new(subst(a, reps))),
        Expr::Exp(a) => Expr::Exp(Box::new(subst(a, reps))),
        Expr::Gauss { center, width } => {
            // gauss is radial, so only an affine substitution that is a rigid
            // motion keeps it expressible: a <- R a + c maps the bump to one
            // centered at R^T (center - c). Expand through the exp form
            // instead to stay correct for arbitrary affine maps.
            let mut q = Expr::Const(0.0);
            for (i, ci) in center.iter().enumerate() {
                let di = Expr::Sub(Box::new(Expr::Var(i)), Box::new(Expr::Const(*ci)));
                q = Expr::Add(Box::new(q), Box::new(Expr::Pow(Box::new(di), 2)));
            }
            let scaled = Expr::Mul(
                Box::new(Expr::Const(-1.0 / (width * width))),
                Box::new(q),
            );
            subst(&Expr::Exp(Box::new(scaled)), reps)
        }
    }
}

fn validate(e: &Expr, dim: usize) -> Result<()> {
    match e {
        Expr::Const(_) => Ok(()),
        Expr::Var(i) => {
            if *i >= dim {
                Err(ShockError::VariableOutOfRange {
                    index: *i + 1,
                    dim,
                })
            } else {
                Ok(())
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            validate(a, dim)?;
            validate(b, dim)
        }
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
            validate(a, dim)
        }
        Expr::Gauss { center, width } => {
            if center.len() != dim {
                return Err(ShockError::Invalid(format!(
                    "gauss center has {} components, field dimension is {}",
                    center.len(),
                    dim
                )));
            }
            if !(*width > 0.0) {
                return Err(ShockError::NonPositiveGaussWidth { width: *width });
            }
            Ok(())
        }
    }
}

pub(crate) fn eval_f64(e: &Expr, p: &[f64]) -> f64 {
    match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => p[*i],
        Expr::Add(a, b) => eval_f64(a, p) + eval_f64(b, p),
        Expr::Sub(a, b) => eval_f64(a, p) - eval_f64(b, p),
        Expr::Mul(a, b) => eval_f64(a, p) * eval_f64(b, p),
        Expr::Neg(a) => -eval_f64(a, p),
        Expr::Pow(a, n) => eval_f64(a, p).powi(*n as i32),
        Expr::Sin(a) => eval_f64(a, p).sin(),
        Expr::Cos(a) => eval_f64(a, p).cos(),
        Expr::Exp(a) => eval_f64(a, p).exp(),
        Expr::Gauss { center, width } => {
            let mut q = 0.0;
            for (x, c) in p.iter().zip(center) {
                q += (x - c) * (x - c);
            }
            (-q / (width * width)).exp()
        }
    }
}

fn eval_jet(e: &Expr, dim: usize, p: &[f64], order: usize) -> Result<Jet> {
    Ok(match e {
        Expr::Const(c) => Jet::constant(dim, order, *c)?,
        Expr::Var(i) => Jet::variable(dim, order, *i, p[*i])?,
        Expr::Add(a, b) => eval_jet(a, dim, p, order)?.add(&eval_jet(b, dim, p, order)?),
        Expr::Sub(a, b) => eval_jet(a, dim, p, order)?.sub(&eval_jet(b, dim, p, order)?),
        Expr::Mul(a, b) => eval_jet(a, dim, p, order)?.mul(&eval_jet(b, dim, p, order)?),
        Expr::Neg(a) => eval_jet(a, dim, p, order)?.neg(),
        Expr::Pow(a, n) => eval_jet(a, dim, p, order)?.powi(*n),
        Expr::Sin(a) => eval_jet(a, dim, p, order)?.sin(),
        Expr::Cos(a) => eval_jet(a, dim, p, order)?.cos(),
        Expr::Exp(a) => eval_jet(a, dim, p, order)?.exp(),
        Expr::Gauss { center, width } => {
            // exp(-|a-c|^2 / w^2), built as exp of an exact quadratic jet.
            let mut q = Jet::zero(dim, order)?;
            for i in 0..dim {
                let xi = Jet::variable(dim, order, i, p[i])?;
                let di = xi.sub(&Jet::constant(dim, order, center[i])?);
                q = q.add(&di.mul(&di));
            }
            q.scale(-1.0 / (width * width)).exp()
        }
    })
}

/// Precedence levels: 0 sum, 1 product, 2 power, 3 atom.
fn unparse(e: &Expr, prec: u8, out: &mut String) {
    let wrap = |needed: u8, prec: u8, out: &mut String, f: &dyn Fn(&mut String)| {
        if prec > needed {
            out.push('(');
            f(out);
            out.push(')');
        } else {
            f(out);
        }
    };
    match e {
        Expr::Const(c) => {
            if *c < 0.0 {
                out.push('(');
                push_num(*c, out);
                out.push(')');
            } else {
                push_num(*c, out);
            }
        }
        Expr::Var(i) => {
            out.push('a');
            out.push_str(&(i + 1).to_string());
        }
        Expr::Add(a, b) => wrap(0, prec, out, &|o| {
            unparse(a, 0, o);
            o.push_str(" + ");
            unparse(b, 1, o);
        }),
        Expr::Sub(a, b) => wrap(0, prec, out, &|o| {
            unparse(a, 0, o);
            o.push_str(" - ");
            unparse(b, 1, o);
        }),
        Expr::Mul(a, b) => wrap(1, prec, out, &|o| {
            unparse(a, 1, o);
            o.push_str(" * ");
            unparse(b, 2, o);
        }),
        Expr::Neg(a) => wrap(1, prec, out, &|o| {
            o.push('-');
            unparse(a, 2, o);
        }),
        Expr::Pow(a, n) => wrap(2, prec, out, &|o| {
            unparse(a, 3, o);
            o.push('^');
            o.push_str(&n.to_string());
        }),
        Expr::Sin(a) => {
            out.push_str("sin(");
            unparse(a, 0, out);
            out.push(')');
        }
        Expr::Cos(a) => {
            out.push_str("cos(");
            unparse(a, 0, out);
            out.push(')');
        }
        Expr::Exp(a) => {
            out.push_str("exp(");
            unparse(a, 0, out);
            out.push(')');
        }
        Expr::Gauss { center, width } => {
            out.push_str("gauss((");
            for (i, c) in center.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                push_num(*c, out);
            }
            out.push_str("), ");
            push_num(*width, out);
            out.push(')');
        }
    }
}

fn push_num(x: f64, out: &mut String) {
    if x == x.trunc() && x.abs() < 1e15 {
        out.push_str(&format!("{:.1}", x));
    } else {
        out.push_str(&format!("{}", x));
    }
}

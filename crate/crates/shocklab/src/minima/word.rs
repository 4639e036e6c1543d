//! Words: multisets of tied global minima like `A1^2 A3`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ShockWord {
    pub a1: usize,
    pub a3: usize,
    pub a5: usize,
}

impl ShockWord {
    pub fn new(a1: usize, a3: usize, a5: usize) -> ShockWord {
        ShockWord { a1, a3, a5 }
    }

    /// Number of minima.
    pub fn m(&self) -> usize {
        self.a1 + self.a3 + self.a5
    }

    /// Total multiplicity mu = sum of multiplicities.
    pub fn mu(&self) -> usize {
        self.a1 + 3 * self.a3 + 5 * self.a5
    }

    /// Codimension kappa = mu - 1.
    pub fn kappa(&self) -> usize {
        self.mu() - 1
    }

    /// dim X = d + 1 - kappa (may be negative for non-generic words).
    pub fn dim_x(&self, d: usize) -> i64 {
        d as i64 + 1 - self.kappa() as i64
    }

    /// The word cases the determinator dispatches on.
    pub fn is_pure_a1(&self) -> bool {
        self.a3 == 0 && self.a5 == 0 && self.a1 >= 1
    }

    pub fn is_a1l_a3(&self) -> bool {
        self.a3 == 1 && self.a5 == 0
    }

    pub fn is_a5(&self) -> bool {
        self.a5 == 1 && self.a1 == 0 && self.a3 == 0
    }
}

impl std::fmt::Display for ShockWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (count, name) in [(self.a1, "A1"), (self.a3, "A3"), (self.a5, "A5")] {
            if count == 1 {
                write!(f, "{}", name)?;
                wrote = true;
            } else if count > 1 {
                write!(f, "{}^{}", name, count)?;
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "(empty)")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_counts() {
        let w = ShockWord::new(2, 1, 0);
        assert_eq!(w.to_string(), "A1^2A3");
        assert_eq!(w.m(), 3);
        assert_eq!(w.mu(), 5);
        assert_eq!(w.kappa(), 4);
        assert_eq!(w.dim_x(3), 0);
    }
}

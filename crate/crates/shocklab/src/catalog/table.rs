//! The normal-form table: limit-solution formulas per word and the time
//! normal forms per dimension, plus the published perestroika maps used to
//! verify the derived names.

use crate::determinator::{ExtendedName, Signature};
use crate::minima::ShockWord;
use crate::polyroots::{min_quartic, min_sextic};
use serde::Serialize;

/// One time normal form tau = sum t_i xi_i + sum q_j eta_j^2 attached to a
/// word in dimension d. Branch coordinates that do not enter tau carry a 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeNormalForm {
    pub word: ShockWord,
    pub d: usize,
    pub xi_signs: Vec<i8>,
    pub eta_signs: Vec<i8>,
}

impl TimeNormalForm {
    pub fn kappa(&self) -> usize {
        self.word.kappa()
    }

    pub fn tau(&self, xi: &[f64], eta: &[f64]) -> f64 {
        let mut t = 0.0;
        for (s, x) in self.xi_signs.iter().zip(xi) {
            t += *s as f64 * x;
        }
        for (q, e) in self.eta_signs.iter().zip(eta) {
            t += *q as f64 * e * e;
        }
        t
    }

    pub fn negated(&self) -> TimeNormalForm {
        TimeNormalForm {
            word: self.word,
            d: self.d,
            xi_signs: self.xi_signs.iter().map(|s| -s).collect(),
            eta_signs: self.eta_signs.iter().map(|s| -s).collect(),
        }
    }

    /// Extended name read from the linear part: for pure A1 words the branch
    /// signs plus the opposite sign of their sum; for words with a
    /// degenerate block, the branch signs and the sign of the quadratic
    /// coefficient of the inner family.
    pub fn extended_name(&self) -> ExtendedName {
        let w = &self.word;
        if w.is_pure_a1() {
            let mut signs: Vec<i8> = self.xi_signs.clone();
            let sum: i32 = signs.iter().map(|&s| s as i32).sum();
            debug_assert!(sum != 0, "degenerate table entry");
            signs.push(if sum > 0 { -1 } else { 1 });
            ExtendedName::new(signs, None, None)
        } else if w.is_a1l_a3() {
            let l = w.a1;
            ExtendedName::new(
                self.xi_signs[..l].to_vec(),
                Some(self.xi_signs[l]),
                None,
            )
        } else {
            ExtendedName::new(vec![], None, Some(self.xi_signs[0]))
        }
    }

    pub fn signature(&self) -> Signature {
        Signature {
            p: self.eta_signs.iter().filter(|&&s| s > 0).count(),
            q: self.eta_signs.iter().filter(|&&s| s < 0).count(),
        }
    }

    /// Rendering used by the maps, e.g. `A1^{++-}[+-]`.
    pub fn render(&self) -> String {
        format!("{}{}", self.extended_name().render(), self.signature().render())
    }
}

/// The limit-solution normal form of a word evaluated at the branch
/// coordinates (the eta coordinates do not enter the limit solution).
pub fn normal_form_value(word: &ShockWord, xi: &[f64]) -> f64 {
    assert_eq!(xi.len(), word.kappa(), "xi must have kappa components");
    if word.is_pure_a1() {
        let mut v: f64 = 0.0;
        for x in xi {
            v = v.min(*x);
        }
        v
    } else if word.is_a1l_a3() {
        let l = word.a1;
        let mut v = min_quartic(xi[l], xi[l + 1]).0;
        for x in &xi[..l] {
            v = v.min(*x);
        }
        v
    } else {
        min_sextic(xi[0], xi[1], xi[2], xi[3]).0
    }
}

fn nf(word: ShockWord, d: usize, xi: &[i8], eta: &[i8]) -> TimeNormalForm {
    debug_assert_eq!(xi.len(), word.kappa());
    debug_assert_eq!(xi.len() + eta.len(), d + 1);
    TimeNormalForm {
        word,
        d,
        xi_signs: xi.to_vec(),
        eta_signs: eta.to_vec(),
    }
}

/// Both time-inversion variants of a base form.
fn pair(word: ShockWord, d: usize, xi: &[i8], eta: &[i8]) -> Vec<TimeNormalForm> {
    let plus = nf(word, d, xi, eta);
    let minus = plus.negated();
    vec![plus, minus]
}

/// All time normal forms of dimension d (6 for d=1, 18 for d=2, 42 for d=3).
pub fn table1(d: usize) -> Vec<TimeNormalForm> {
    let a1 = |m: usize| ShockWord::new(m, 0, 0);
    let a1l_a3 = |l: usize| ShockWord::new(l, 1, 0);
    let a5 = ShockWord::new(0, 0, 1);
    let mut out = Vec::new();
    match d {
        1 => {
            out.extend(pair(a1(2), d, &[1], &[1]));
            out.extend(pair(a1(3), d, &[1, 1], &[]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[]));
        }
        2 => {
            out.extend(pair(a1(2), d, &[1], &[1, 1]));
            out.push(nf(a1(2), d, &[1], &[1, -1]));
            out.extend(pair(a1(3), d, &[1, 1], &[1]));
            out.extend(pair(a1(3), d, &[1, 1], &[-1]));
            out.extend(pair(a1(4), d, &[1, 1, 1], &[]));
            out.push(nf(a1(4), d, &[1, 1, -1], &[]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[1]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[-1]));
            out.extend(pair(a1l_a3(1), d, &[1, 1, 0], &[]));
            out.extend(pair(a1l_a3(1), d, &[1, -1, 0], &[]));
        }
        3 => {
            out.extend(pair(a1(2), d, &[1], &[1, 1, 1]));
            out.extend(pair(a1(2), d, &[1], &[1, 1, -1]));
            out.extend(pair(a1(3), d, &[1, 1], &[1, 1]));
            out.extend(pair(a1(3), d, &[1, 1], &[1, -1]));
            out.extend(pair(a1(3), d, &[1, 1], &[-1, -1]));
            out.extend(pair(a1(4), d, &[1, 1, 1], &[1]));
            out.extend(pair(a1(4), d, &[1, 1, 1], &[-1]));
            out.extend(pair(a1(4), d, &[1, 1, -1], &[1]));
            out.extend(pair(a1(5), d, &[1, 1, 1, 1], &[]));
            out.extend(pair(a1(5), d, &[1, 1, 1, -1], &[]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[1, 1]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[1, -1]));
            out.extend(pair(a1l_a3(0), d, &[1, 0], &[-1, -1]));
            out.extend(pair(a1l_a3(1), d, &[1, 1, 0], &[1]));
            out.extend(pair(a1l_a3(1), d, &[1, 1, 0], &[-1]));
            out.extend(pair(a1l_a3(1), d, &[1, -1, 0], &[-1]));
            out.extend(pair(a1l_a3(1), d, &[1, -1, 0], &[1]));
            out.extend(pair(a1l_a3(2), d, &[1, 1, 1, 0], &[]));
            out.extend(pair(a1l_a3(2), d, &[1, 1, -1, 0], &[]));
            out.extend(pair(a1l_a3(2), d, &[1, -1, 1, 0], &[]));
            out.extend(pair(a5, d, &[1, 0, 0, 0], &[]));
        }
        _ => panic!("d must be 1, 2, or 3"),
    }
    out
}

/// One cell of the published perestroika maps: the entry of the forward
/// arrow on top, the time-reversed partner at the bottom.
#[derive(Debug, Clone, Serialize)]
pub struct MapCell {
    pub word: &'static str,
    pub top: &'static str,
    pub bottom: &'static str,
}

/// The perestroika map of dimension d as published: 6 entries for the line,
/// 18 for the plane (map of Table 2), 42 for space (map of Table 3).
/// Self-inverse perestroikas appear as cells with top == bottom.
pub fn map_inventory(d: usize) -> Vec<MapCell> {
    let cell = |word: &'static str, top: &'static str, bottom: &'static str| MapCell {
        word,
        top,
        bottom,
    };
    match d {
        1 => vec![
            cell("A1^2", "A1^{+-}[+]", "A1^{+-}[-]"),
            cell("A1^3", "A1^{++-}", "A1^{+--}"),
            cell("A3", "A3^+", "A3^-"),
        ],
        2 => vec![
            cell("A1^2", "A1^{+-}[++]", "A1^{+-}[--]"),
            cell("A1^2", "A1^{+-}[+-]", "A1^{+-}[+-]"),
            cell("A1^3", "A1^{++-}[+]", "A1^{+--}[-]"),
            cell("A1^3", "A1^{++-}[-]", "A1^{+--}[+]"),
            cell("A3", "A3^+[+]", "A3^-[-]"),
            cell("A3", "A3^+[-]", "A3^-[+]"),
            cell("A1^4", "A1^{+++-}", "A1^{+---}"),
            cell("A1^4", "A1^{++--}", "A1^{++--}"),
            cell("A1A3", "A1^+A3^+", "A1^-A3^-"),
            cell("A1A3", "A1^+A3^-", "A1^-A3^+"),
        ],
        3 => vec![
            cell("A1^2", "A1^{+-}[+++]", "A1^{+-}[---]"),
            cell("A1^2", "A1^{+-}[++-]", "A1^{+-}[+--]"),
            cell("A1^4", "A1^{+++-}[+]", "A1^{+---}[-]"),
            cell("A1^4", "A1^{+++-}[-]", "A1^{+---}[+]"),
            cell("A1^4", "A1^{++--}[+]", "A1^{++--}[-]"),
            cell("A1^5", "A1^{++++-}", "A1^{+----}"),
            cell("A1^5", "A1^{+++--}", "A1^{++---}"),
            cell("A1^3", "A1^{++-}[++]", "A1^{+--}[--]"),
            cell("A1^3", "A1^{++-}[+-]", "A1^{+--}[+-]"),
            cell("A1^3", "A1^{++-}[--]", "A1^{+--}[++]"),
            cell("A3", "A3^+[++]", "A3^-[--]"),
            cell("A3", "A3^+[+-]", "A3^-[+-]"),
            cell("A3", "A3^+[--]", "A3^-[++]"),
            cell("A5", "A5^+", "A5^-"),
            cell("A1A3", "A1^+A3^+[+]", "A1^-A3^-[-]"),
            cell("A1A3", "A1^+A3^+[-]", "A1^-A3^-[+]"),
            cell("A1A3", "A1^+A3^-[-]", "A1^-A3^+[+]"),
            cell("A1A3", "A1^+A3^-[+]", "A1^-A3^+[-]"),
            cell("A1^2A3", "A1^{++}A3^+", "A1^{--}A3^-"),
            cell("A1^2A3", "A1^{++}A3^-", "A1^{--}A3^+"),
            cell("A1^2A3", "A1^{+-}A3^+", "A1^{+-}A3^-"),
        ],
        _ => panic!("d must be 1, 2, or 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        assert_eq!(table1(1).len(), 6);
        assert_eq!(table1(2).len(), 18);
        assert_eq!(table1(3).len(), 42);
    }

    #[test]
    fn inventory_sizes() {
        let count = |d: usize| -> usize {
            map_inventory(d)
                .iter()
                .map(|c| if c.top == c.bottom { 1 } else { 2 })
                .sum()
        };
        assert_eq!(count(1), 6);
        assert_eq!(count(2), 18);
        assert_eq!(count(3), 42);
    }

    #[test]
    fn name_derivation_examples() {
        // tau = -(alpha + beta) for A1^3: signs (-,-) plus opposite-sum +.
        let v = nf(ShockWord::new(3, 0, 0), 1, &[-1, -1], &[]);
        assert_eq!(v.render(), "A1^{+--}");
        // tau = -(alpha - beta + gamma) for A1^2 A3 renders A1^{+-}A3^-.
        let v = nf(ShockWord::new(2, 1, 0), 3, &[-1, 1, -1, 0], &[]);
        assert_eq!(v.render(), "A1^{+-}A3^-");
        // tau = alpha + beta^2 - gamma^2 for A1^2: name A1^{+-}, signature [+-].
        let v = nf(ShockWord::new(2, 0, 0), 2, &[1], &[1, -1]);
        assert_eq!(v.render(), "A1^{+-}[+-]");
    }

    #[test]
    fn normal_form_values() {
        let a12 = ShockWord::new(2, 0, 0);
        assert_eq!(normal_form_value(&a12, &[-1.0]), -1.0);
        let a13 = ShockWord::new(3, 0, 0);
        assert_eq!(normal_form_value(&a13, &[2.0, -3.0]), -3.0);
        let a3 = ShockWord::new(0, 1, 0);
        let v = normal_form_value(&a3, &[-1.0, 0.0]);
        assert!((v + 0.25).abs() < 1e-12);
    }

    #[test]
    fn derived_names_match_inventory() {
        for d in 1..=3 {
            let mut derived: Vec<String> = table1(d).iter().map(|v| v.render()).collect();
            let mut listed: Vec<String> = Vec::new();
            for c in map_inventory(d) {
                listed.push(c.top.to_string());
                if c.top != c.bottom {
                    listed.push(c.bottom.to_string());
                }
            }
            derived.sort();
            listed.sort();
            assert_eq!(derived, listed, "d = {d}");
        }
    }

    #[test]
    fn time_inversion_pairs_match_inventory() {
        for d in 1..=3 {
            let cells = map_inventory(d);
            for v in table1(d) {
                let r = v.render();
                let rn = v.negated().render();
                let found = cells
                    .iter()
                    .any(|c| (c.top == r && c.bottom == rn) || (c.top == rn && c.bottom == r));
                assert!(found, "d = {d}: pair ({r}, {rn}) not in the map");
            }
        }
    }
}

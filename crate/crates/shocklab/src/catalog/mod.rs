//! The perestroika catalog: normal forms, their derived extended names and
//! signatures, and the allowed/forbidden split obtained by running the
//! topological restriction on after-sections.
//!
//! Allowed flags are derived, not transcribed: for every table entry the
//! after-section is generated and tested for contractibility. The derived
//! counts (2 of 6 on the line, 9 of 18 in the plane, 26 of 42 in space) and
//! the name inventory are then checked against the published maps.

pub mod section;
pub mod table;

pub use section::{normal_form_section, NormalFormField};
pub use table::{map_inventory, normal_form_value, table1, MapCell, TimeNormalForm};

use crate::geometry::{is_contractible, Contractibility, GeometryInvariants};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Allowed {
    Allowed,
    Forbidden,
    Undetermined,
}

/// Sectioning parameters of the catalog sweep.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogConfig {
    /// Isochrone offset epsilon; sections are taken at t_rel = +-epsilon.
    pub epsilon: f64,
    /// Larger offset for the sextic family, whose features scale like
    /// epsilon^(3/2)..epsilon^(5/2).
    pub a5_epsilon: f64,
    /// Section window [-w, w]^d.
    pub window: f64,
    /// Grid nodes per axis for d <= 2 sections.
    pub resolution_2d: usize,
    /// Grid nodes per axis for d = 3 sections.
    pub resolution_3d: usize,
    /// Argmin-jump threshold identifying wells of the sextic family.
    pub jump_tol: f64,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            epsilon: 0.35,
            a5_epsilon: 0.75,
            window: 1.0,
            resolution_2d: 256,
            resolution_3d: 64,
            jump_tol: 0.12,
        }
    }
}

/// One row of the derived perestroika map.
#[derive(Debug, Clone, Serialize)]
pub struct MapEntry {
    pub word: String,
    pub rendered: String,
    pub signature: [usize; 2],
    pub allowed: Allowed,
    pub after_contractible: Contractibility,
    pub before_invariants: GeometryInvariants,
    pub after_invariants: GeometryInvariants,
}

/// Derive the allowed/forbidden map for dimension d from the topological
/// restriction: a perestroika is allowed iff its after-section is
/// contractible.
pub fn derive_allowed_map(d: usize, cfg: &CatalogConfig) -> Vec<MapEntry> {
    let entries = table1(d);
    entries
        .par_iter()
        .map(|nf| {
            let eps = if nf.word.is_a5() {
                cfg.a5_epsilon
            } else {
                cfg.epsilon
            };
            let res = if d <= 2 {
                cfg.resolution_2d
            } else {
                cfg.resolution_3d
            };
            let before = normal_form_section(nf, -eps, cfg.window, res, cfg.jump_tol);
            let after = normal_form_section(nf, eps, cfg.window, res, cfg.jump_tol);
            let contractible = is_contractible(&after);
            let allowed = if !after.warnings.is_empty() || !before.warnings.is_empty() {
                Allowed::Undetermined
            } else {
                match contractible {
                    Contractibility::Yes => Allowed::Allowed,
                    Contractibility::No => Allowed::Forbidden,
                    Contractibility::Undetermined => Allowed::Undetermined,
                }
            };
            let sig = nf.signature();
            MapEntry {
                word: nf.word.to_string(),
                rendered: nf.render(),
                signature: [sig.p, sig.q],
                allowed,
                after_contractible: contractible,
                before_invariants: before.invariants(),
                after_invariants: after.invariants(),
            }
        })
        .collect()
}

/// Human-readable text table of a derived map, mirroring the published
/// layout: one line per entry, allowed entries marked.
pub fn render_map(entries: &[MapEntry]) -> String {
    let mut out = String::new();
    let mut words: Vec<&str> = entries.iter().map(|e| e.word.as_str()).collect();
    words.dedup();
    for word in words {
        out.push_str(&format!("{word}:\n"));
        for e in entries.iter().filter(|e| e.word == word) {
            let mark = match e.allowed {
                Allowed::Allowed => "allowed  ",
                Allowed::Forbidden => "forbidden",
                Allowed::Undetermined => "undecided",
            };
            out.push_str(&format!("  {mark}  {}\n", e.rendered));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_allowed_set() {
        let map = derive_allowed_map(1, &CatalogConfig::default());
        let allowed: Vec<&str> = map
            .iter()
            .filter(|e| e.allowed == Allowed::Allowed)
            .map(|e| e.rendered.as_str())
            .collect();
        assert_eq!(allowed.len(), 2, "map: {map:#?}");
        assert!(allowed.contains(&"A1^{+--}"));
        assert!(allowed.contains(&"A3^-"));
    }
}

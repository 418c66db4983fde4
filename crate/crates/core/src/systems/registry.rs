//! Catalog of attractors discovered while scanning a grid.
//!
//! Periodic attractors are stored as their stroboscopic points. Trajectories
//! that never settle on a short cycle (chaotic attractors) are stored as the
//! set of coarse cells their stroboscopic points visit; a new footprint is
//! attributed to the entry it overlaps most, and that entry grows by union.

use crate::grid::UNRESOLVED;
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

/// Minimum share of a footprint's cells that must fall on an existing
/// entry for the two to be treated as the same attractor.
const FOOTPRINT_OVERLAP: f64 = 0.5;

/// Fingerprint of one trajectory's asymptotic behavior.
#[derive(Debug, Clone, PartialEq)]
pub enum Signature {
    /// Points of a stroboscopic cycle (one per period of the cycle).
    Periodic(Vec<[f64; 2]>),
    /// Sorted, deduplicated coarse cells visited by a non-periodic orbit.
    Footprint(Vec<(i64, i64)>),
}

#[derive(Debug, Clone)]
enum Entry {
    Periodic(Vec<[f64; 2]>),
    Footprint(HashSet<(i64, i64)>),
}

#[derive(Debug, Clone)]
pub struct AttractorRegistry {
    entries: Vec<Entry>,
    match_tol: f64,
    angular: bool,
}

impl AttractorRegistry {
    /// `angular` wraps the first coordinate modulo 2π when measuring distance.
    pub fn new(match_tol: f64, angular: bool) -> Self {
        AttractorRegistry { entries: Vec::new(), match_tol, angular }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn match_tol(&self) -> f64 {
        self.match_tol
    }

    /// State-space distance, wrapping the angle coordinate if configured.
    pub fn distance(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let mut dx = a[0] - b[0];
        if self.angular {
            dx = wrap_angle(dx);
        }
        let dy = a[1] - b[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Id of the entry matching `sig`, registering a new one if none does.
    /// Returns [`UNRESOLVED`] once the 8-bit id space is exhausted.
    pub fn classify(&mut self, sig: &Signature) -> u8 {
        if let Some(id) = self.find(sig) {
            if let (Signature::Footprint(cells), Entry::Footprint(set)) =
                (sig, &mut self.entries[id])
            {
                set.extend(cells.iter().copied());
            }
            return id as u8;
        }
        if self.entries.len() >= UNRESOLVED as usize {
            return UNRESOLVED;
        }
        self.entries.push(match sig {
            Signature::Periodic(points) => Entry::Periodic(points.clone()),
            Signature::Footprint(cells) => Entry::Footprint(cells.iter().copied().collect()),
        });
        (self.entries.len() - 1) as u8
    }

    /// Lookup without registering.
    pub fn find(&self, sig: &Signature) -> Option<usize> {
        match sig {
            Signature::Periodic(points) => self.entries.iter().position(|e| match e {
                Entry::Periodic(known) => self.same_cycle(points, known),
                Entry::Footprint(_) => false,
            }),
            Signature::Footprint(cells) => {
                let mut best: Option<(usize, usize)> = None;
                for (id, e) in self.entries.iter().enumerate() {
                    if let Entry::Footprint(set) = e {
                        let hits = cells.iter().filter(|c| set.contains(c)).count();
                        if best.is_none_or(|(_, b)| hits > b) {
                            best = Some((id, hits));
                        }
                    }
                }
                best.filter(|&(_, hits)| {
                    !cells.is_empty() && hits as f64 >= FOOTPRINT_OVERLAP * cells.len() as f64
                })
                .map(|(id, _)| id)
            }
        }
    }

    fn same_cycle(&self, a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
        let covered = |xs: &[[f64; 2]], ys: &[[f64; 2]]| {
            xs.iter()
                .all(|p| ys.iter().any(|q| self.distance(p, q) <= self.match_tol))
        };
        covered(a, b) && covered(b, a)
    }
}

/// Map an angle difference into `[-π, π)`.
pub(crate) fn wrap_angle(d: f64) -> f64 {
    (d + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_entries_match_within_tolerance() {
        let mut reg = AttractorRegistry::new(0.05, false);
        assert_eq!(reg.classify(&Signature::Periodic(vec![[1.0, 0.0]])), 0);
        assert_eq!(reg.classify(&Signature::Periodic(vec![[-1.0, 0.0]])), 1);
        assert_eq!(reg.classify(&Signature::Periodic(vec![[1.03, 0.01]])), 0);
        // A period-2 cycle through one known point is a different attractor.
        assert_eq!(
            reg.classify(&Signature::Periodic(vec![[1.0, 0.0], [0.0, 2.0]])),
            2
        );
        assert_eq!(reg.len(), 3);
    }

    #[test]
    fn angle_is_wrapped() {
        let mut reg = AttractorRegistry::new(0.05, true);
        assert_eq!(reg.classify(&Signature::Periodic(vec![[PI - 0.01, 0.5]])), 0);
        assert_eq!(reg.classify(&Signature::Periodic(vec![[-PI + 0.01, 0.5]])), 0);
        assert!((wrap_angle(3.0 * PI) + PI).abs() < 1e-12);
    }

    #[test]
    fn footprints_merge_on_overlap() {
        let mut reg = AttractorRegistry::new(0.05, false);
        let a = Signature::Footprint(vec![(0, 0), (0, 1), (1, 1), (2, 1)]);
        let b = Signature::Footprint(vec![(1, 1), (2, 1), (3, 1)]);
        let c = Signature::Footprint(vec![(10, 10), (11, 10)]);
        assert_eq!(reg.classify(&a), 0);
        assert_eq!(reg.classify(&b), 0);
        assert_eq!(reg.classify(&c), 1);
        // (3,1) was absorbed into entry 0 by the previous merge.
        assert_eq!(reg.find(&Signature::Footprint(vec![(3, 1)])), Some(0));
        assert_eq!(reg.find(&Signature::Periodic(vec![[0.0, 0.0]])), None);
    }
}

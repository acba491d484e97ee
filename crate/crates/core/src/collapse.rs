//! Collapse pairs, greedy collapsing sequences, and chain transport along
//! a collapse.

use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rat;

/// One collapse: `face` is a free face of `cell` (its only proper coface).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapsePair {
    pub cell: Vec<usize>,
    pub face: Vec<usize>,
}

/// An ordered collapsing sequence with the complex it ends at.
#[derive(Clone, Debug)]
pub struct CollapseSequence {
    pub pairs: Vec<(Simplex, Simplex)>,
    pub source: SimplicialComplex,
    pub result: SimplicialComplex,
    /// Set when a target dimension was requested but not reached.
    pub stalled_above_target: bool,
}

impl CollapseSequence {
    /// Replays the sequence from scratch, re-checking freeness at every
    /// step.
    pub fn replay_valid(&self) -> bool {
        let mut current = self.source.clone();
        for (cell, face) in &self.pairs {
            if free_coface(&current, face).as_ref() != Some(cell) {
                return false;
            }
            current = match current.without_simplices(&[cell.clone(), face.clone()]) {
                Ok(c) => c,
                Err(_) => return false,
            };
        }
        current == self.result
    }
}

/// The unique proper coface of `face` when there is exactly one (then
/// `face` is free), else `None`.
fn free_coface(complex: &SimplicialComplex, face: &Simplex) -> Option<Simplex> {
    let mut found: Option<Simplex> = None;
    for d in (face.dimension() + 1)..=complex.dim()? {
        for s in complex.simplices(d) {
            if face.is_face_of(&s) {
                if found.is_some() {
                    return None;
                }
                found = Some(s);
            }
        }
    }
    found
}

/// All collapse pairs of the complex, ordered lexicographically by face.
pub fn find_collapse_pairs(complex: &SimplicialComplex) -> Vec<(Simplex, Simplex)> {
    let Some(dim) = complex.dim() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for d in 0..dim {
        for face in complex.simplices(d) {
            if let Some(cell) = free_coface(complex, &face) {
                out.push((cell, face));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    out
}

/// Greedy collapse: repeatedly apply the pair whose cell has maximal
/// dimension (ties by lexicographic face), until no pair with cell
/// dimension above `target_dim` remains (or none at all when unset).
/// Stalling before the target is a reported outcome, not an error.
pub fn greedy_collapse(
    complex: &SimplicialComplex,
    target_dim: Option<usize>,
) -> CollapseSequence {
    greedy_collapse_protected(complex, target_dim, &[])
}

/// Greedy collapse that never removes a protected simplex.
pub fn greedy_collapse_protected(
    complex: &SimplicialComplex,
    target_dim: Option<usize>,
    protected: &[Simplex],
) -> CollapseSequence {
    let mut current = complex.clone();
    let mut pairs = Vec::new();
    let mut stalled = false;
    loop {
        let candidates = find_collapse_pairs(&current);
        let pick = candidates
            .iter()
            .filter(|(cell, face)| !protected.contains(cell) && !protected.contains(face))
            .filter(|(cell, _)| target_dim.map_or(true, |t| cell.dimension() > t))
            .max_by(|a, b| {
                a.0.dimension()
                    .cmp(&b.0.dimension())
                    .then_with(|| b.1.cmp(&a.1))
            })
            .cloned();
        match pick {
            None => {
                if let Some(t) = target_dim {
                    stalled = current.dim().map_or(false, |d| d > t);
                }
                break;
            }
            Some((cell, face)) => {
                current = current
                    .without_simplices(&[cell.clone(), face.clone()])
                    .expect("collapse pair removal preserves closure");
                pairs.push((cell, face));
            }
        }
    }
    CollapseSequence {
        pairs,
        source: complex.clone(),
        result: current,
        stalled_above_target: stalled,
    }
}

/// Pushes a bounding chain through a collapsing sequence: given `df = gamma`
/// in the source with `gamma` supported in the final complex, produces a
/// chain of the final complex with the same boundary, exactly.
pub fn transport_chain(
    seq: &CollapseSequence,
    f: &Chain,
    gamma: &Chain,
) -> Result<Chain> {
    let d = f.dimension();
    if seq.source.apply_boundary(f)? != *gamma {
        return Err(Error::Domain("df != gamma in the source complex".into()));
    }
    for s in gamma.support() {
        if !seq.result.contains(s) {
            return Err(Error::Domain(format!(
                "gamma support {:?} is not retained by the collapse",
                s
            )));
        }
    }
    let mut current = f.clone();
    for (cell, face) in &seq.pairs {
        let cell_dim = cell.dimension() as i64;
        let face_dim = face.dimension() as i64;
        if face_dim == d {
            // the free face is a d-simplex: cancel its coefficient using
            // the boundary of its unique coface
            let coeff = current.coeff(face);
            if !num_traits::Zero::is_zero(&coeff) {
                let boundary = boundary_of(cell);
                let sign = boundary.coeff(face);
                current = current.sub(&boundary.scale(&(sign * coeff)));
            }
            debug_assert!(num_traits::Zero::is_zero(&current.coeff(face)));
        } else if cell_dim == d {
            // the removed cell is a d-simplex with a free (d-1)-face not in
            // the result; the chain cannot touch it
            if !num_traits::Zero::is_zero(&current.coeff(cell)) {
                return Err(Error::Numeric(format!(
                    "chain touches removed cell {:?} whose free face would keep a boundary term",
                    cell
                )));
            }
        }
        // other dimensions leave d-chains untouched
    }
    for s in current.support() {
        if !seq.result.contains(s) {
            return Err(Error::Numeric(format!(
                "transported chain still touches removed simplex {:?}",
                s
            )));
        }
    }
    if seq.result.apply_boundary(&current)? != *gamma {
        return Err(Error::Numeric("transported chain lost its boundary".into()));
    }
    Ok(current)
}

fn boundary_of(s: &Simplex) -> Chain {
    let mut c = Chain::zero(s.dimension() as i64 - 1);
    for (f, sign) in s.boundary_faces() {
        c.add_term(f, rat(sign));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betti::matrix_reduction_betti;
    use crate::families;

    #[test]
    fn closed_triangle_has_three_pairs() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let pairs = find_collapse_pairs(&k);
        assert_eq!(pairs.len(), 3);
        for (cell, face) in pairs {
            assert_eq!(cell.dimension(), 2);
            assert_eq!(face.dimension(), 1);
        }
    }

    #[test]
    fn sphere_has_no_pairs() {
        let k = SimplicialComplex::build(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap();
        assert!(find_collapse_pairs(&k).is_empty());
    }

    #[test]
    fn single_edge_has_two_pairs() {
        let k = SimplicialComplex::build(&[vec![0, 1]], None).unwrap();
        assert_eq!(find_collapse_pairs(&k).len(), 2);
    }

    #[test]
    fn closed_simplices_collapse_to_a_vertex() {
        for d in 1..=4usize {
            let k = SimplicialComplex::build(&[(0..=d).collect()], None).unwrap();
            let seq = greedy_collapse(&k, None);
            assert_eq!(seq.result.count(0), 1, "d = {}", d);
            assert_eq!(seq.result.dim(), Some(0));
            assert!(seq.replay_valid());
        }
    }

    #[test]
    fn collapse_preserves_betti() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2, 3], vec![3, 4, 5]], None).unwrap();
        let seq = greedy_collapse(&k, Some(1));
        for d in 0..=2 {
            assert_eq!(
                matrix_reduction_betti(&k, d).unwrap(),
                matrix_reduction_betti(&seq.result, d).unwrap(),
                "d = {}",
                d
            );
        }
        assert!(seq.replay_valid());
    }

    #[test]
    fn resistance_tower_collapses_to_dimension_one() {
        let fam = families::resistance_family(2, 2).unwrap();
        let seq = greedy_collapse(&fam.complex, Some(1));
        assert_eq!(seq.result.dim(), Some(1), "stalled: {}", seq.stalled_above_target);
    }

    #[test]
    fn transport_through_solid_simplex_collapse() {
        // collapse the solid tetrahedron by the single pair (cell, one
        // facet); the facet chain transports to the other three facets
        let k = SimplicialComplex::build(&[vec![0, 1, 2, 3]], None).unwrap();
        let cell = Simplex::new([0, 1, 2, 3]).unwrap();
        let face = Simplex::new([0, 1, 2]).unwrap();
        let result = k.without_simplices(&[cell.clone(), face.clone()]).unwrap();
        let seq = CollapseSequence {
            pairs: vec![(cell, face.clone())],
            source: k.clone(),
            result,
            stalled_above_target: false,
        };
        assert!(seq.replay_valid());
        let f = Chain::unit(face);
        let gamma = k.apply_boundary(&f).unwrap();
        let transported = transport_chain(&seq, &f, &gamma).unwrap();
        assert_eq!(seq.result.apply_boundary(&transported).unwrap(), gamma);
        assert_eq!(transported.support_len(), 3);
    }

    #[test]
    fn empty_sequence_is_identity() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let seq = CollapseSequence {
            pairs: Vec::new(),
            source: k.clone(),
            result: k.clone(),
            stalled_above_target: false,
        };
        let f = Chain::unit(Simplex::new([0, 1, 2]).unwrap());
        let gamma = k.apply_boundary(&f).unwrap();
        assert_eq!(transport_chain(&seq, &f, &gamma).unwrap(), f);
    }
}

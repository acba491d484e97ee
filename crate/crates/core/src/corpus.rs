//! Named fixtures used by the verification suites: small classical
//! complexes, their designated cycles, and embedded-dual data.

use num_traits::{One, Zero};

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::duality::{build_dual, EmbeddedDualData};
use crate::error::Result;
use crate::linalg;
use crate::{rat, Rat};

/// Closure of the full `d`-simplex.
pub fn closed_simplex(d: usize) -> SimplicialComplex {
    SimplicialComplex::build(&[(0..=d).collect()], None).expect("valid")
}

/// Boundary sphere of the `d`-simplex.
pub fn simplex_boundary(d: usize) -> SimplicialComplex {
    let verts: Vec<usize> = (0..=d).collect();
    closed_simplex(d)
        .without_simplices(&[Simplex::from_sorted(verts)])
        .expect("top cell is maximal")
}

/// `∂Δ³`: the 4-triangle 2-sphere.
pub fn tetra_boundary() -> SimplicialComplex {
    simplex_boundary(3)
}

/// The octahedron sphere: 6 vertices, 8 triangles; poles 0 and 5, equator
/// 1-2-3-4.
pub fn octahedron() -> SimplicialComplex {
    SimplicialComplex::build(
        &[
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 1, 4],
            vec![1, 2, 5],
            vec![2, 3, 5],
            vec![3, 4, 5],
            vec![1, 4, 5],
        ],
        None,
    )
    .expect("valid")
}

/// Fan disk: `n` triangles around a hub, rim a closed cycle.
pub fn wheel(n: usize) -> SimplicialComplex {
    let faces: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n, n]).collect();
    SimplicialComplex::build(&faces, None).expect("valid")
}

/// The rim cycle of [`wheel`], oriented coherently.
pub fn wheel_rim(n: usize) -> Chain {
    let mut gamma = Chain::zero(1);
    for i in 0..n {
        let (a, b) = (i, (i + 1) % n);
        let sign = if a < b { 1 } else { -1 };
        gamma.add_term(Simplex::from_sorted(vec![a.min(b), a.max(b)]), rat(sign));
    }
    gamma
}

/// Minimal 6-vertex triangulation of the projective plane (10 triangles,
/// all 15 edges). Its integral 1-homology carries the 2-torsion.
pub fn projective_plane() -> SimplicialComplex {
    SimplicialComplex::build(
        &[
            vec![0, 1, 3],
            vec![0, 1, 4],
            vec![0, 2, 3],
            vec![0, 2, 5],
            vec![0, 4, 5],
            vec![1, 2, 4],
            vec![1, 2, 5],
            vec![1, 3, 5],
            vec![2, 3, 4],
            vec![3, 4, 5],
        ],
        None,
    )
    .expect("valid")
}

/// 7-vertex triangulation of the torus (21 edges, 14 triangles).
pub fn torus7() -> SimplicialComplex {
    let faces: Vec<Vec<usize>> = (0..7)
        .flat_map(|i| {
            vec![
                vec![i, (i + 1) % 7, (i + 3) % 7],
                vec![i, (i + 2) % 7, (i + 3) % 7],
            ]
        })
        .collect();
    SimplicialComplex::build(&faces, None).expect("valid")
}

/// The signed boundary chain of a simplex given by its vertices (the
/// simplex itself need not belong to any complex).
pub fn boundary_chain(verts: &[usize]) -> Chain {
    let s = Simplex::new(verts.iter().copied()).expect("valid simplex");
    let mut c = Chain::zero(s.dimension() as i64 - 1);
    for (f, sign) in s.boundary_faces() {
        c.add_term(f, rat(sign));
    }
    c
}

/// Fundamental top cycle of a closed orientable surface-like complex,
/// normalized to +1 on its lexicographically first cell.
pub fn fundamental_cycle(k: &SimplicialComplex, d: usize) -> Option<Chain> {
    let b = k.boundary_matrix(d).ok()?;
    let ns = linalg::nullspace(&b.to_rational());
    if ns.len() != 1 {
        return None;
    }
    let v = &ns[0];
    let first = v.iter().position(|x| !x.is_zero())?;
    let scale = Rat::one() / v[first].clone();
    Some(Chain::from_vector(
        b.col_simplices(),
        &v.iter().map(|x| x * &scale).collect::<Vec<_>>(),
        d as i64,
    ))
}

/// Embedded-dual data for a 2-sphere triangulation split along the
/// boundary of the single cell `tau`.
pub fn sphere_dual_around(k: &SimplicialComplex, tau: &Simplex) -> Result<EmbeddedDualData> {
    let z = fundamental_cycle(k, 2).expect("sphere has one 2-cycle");
    let scale = Rat::one() / z.coeff(tau);
    let z = z.scale(&scale);
    let flow_pos = Chain::unit(tau.clone());
    let flow_neg = z.sub(&flow_pos);
    let gamma = k.apply_boundary(&flow_pos)?;
    build_dual(k, &[z], &flow_pos, &flow_neg, &gamma)
}

/// Embedded-dual data for the octahedron split along its equator: the two
/// unit flows are the polar caps.
pub fn octahedron_equator_dual() -> Result<EmbeddedDualData> {
    let k = octahedron();
    let z = fundamental_cycle(&k, 2).expect("one 2-cycle");
    let mut flow_pos = Chain::zero(2);
    for (s, x) in z.iter() {
        if s.contains_vertex(0) {
            flow_pos.add_term(s.clone(), x.clone());
        }
    }
    let flow_neg = z.sub(&flow_pos);
    let gamma = k.apply_boundary(&flow_pos)?;
    build_dual(&k, &[z], &flow_pos, &flow_neg, &gamma)
}

/// The 4-cycle planar graph with its single bounded face, the two paths
/// between opposite corners as the unit flows.
pub fn planar_square_dual() -> Result<EmbeddedDualData> {
    let k = SimplicialComplex::build(
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        None,
    )?;
    let e = |a: usize, b: usize| Simplex::from_sorted(vec![a, b]);
    let mut void = Chain::zero(1);
    void.add_term(e(0, 1), rat(1));
    void.add_term(e(1, 2), rat(1));
    void.add_term(e(2, 3), rat(1));
    void.add_term(e(0, 3), rat(-1));
    let mut flow_pos = Chain::zero(1);
    flow_pos.add_term(e(0, 1), rat(1));
    flow_pos.add_term(e(1, 2), rat(1));
    let mut flow_neg = Chain::zero(1);
    flow_neg.add_term(e(2, 3), rat(1));
    flow_neg.add_term(e(0, 3), rat(-1));
    let gamma = k.apply_boundary(&flow_pos)?;
    build_dual(&k, &[void], &flow_pos, &flow_neg, &gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betti::matrix_reduction_betti;

    #[test]
    fn projective_plane_shape() {
        let k = projective_plane();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (6, 15, 10));
        // real Betti numbers: 1, 0, 0 (the torsion is invisible over Q)
        assert_eq!(matrix_reduction_betti(&k, 0).unwrap(), 1);
        assert_eq!(matrix_reduction_betti(&k, 1).unwrap(), 0);
        assert_eq!(matrix_reduction_betti(&k, 2).unwrap(), 0);
    }

    #[test]
    fn octahedron_is_a_sphere() {
        let k = octahedron();
        assert_eq!(matrix_reduction_betti(&k, 2).unwrap(), 1);
        assert_eq!(matrix_reduction_betti(&k, 1).unwrap(), 0);
    }

    #[test]
    fn wheel_rim_bounds() {
        let k = wheel(6);
        let rim = wheel_rim(6);
        assert!(k.apply_boundary(&rim).unwrap().is_zero());
        assert!(crate::flow::is_null_homologous(&k, &rim).unwrap());
    }
}

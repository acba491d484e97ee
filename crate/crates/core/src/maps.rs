//! Chain maps between a complex and its derived complexes (stellar
//! subdivision, prism, stellar prism), stored as basis-image tables and
//! verified exactly at construction.

use std::collections::BTreeMap;

use num_traits::One;

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::{rat, Rat};

/// A linear map between chain groups given by images of basis simplices;
/// simplices without a stored image map to zero. The degree is the shift
/// a `k`-chain's dimension undergoes (0 for inclusions, +1 for cone and
/// homotopy maps).
#[derive(Clone, Debug)]
pub struct ChainMap {
    degree: i64,
    images: BTreeMap<Simplex, Chain>,
}

impl ChainMap {
    pub fn new(degree: i64) -> Self {
        Self {
            degree,
            images: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn set(&mut self, s: Simplex, image: Chain) {
        debug_assert_eq!(image.dimension(), s.dimension() as i64 + self.degree);
        self.images.insert(s, image);
    }

    pub fn image_of(&self, s: &Simplex) -> Option<&Chain> {
        self.images.get(s)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Simplex> {
        self.images.keys()
    }

    /// Linear extension to chains.
    pub fn apply(&self, c: &Chain) -> Chain {
        let mut out = Chain::zero(c.dimension() + self.degree);
        for (s, x) in c.iter() {
            if let Some(img) = self.images.get(s) {
                out = out.add(&img.scale(x));
            }
        }
        out
    }
}

/// Cone map over a fresh vertex: each simplex in `domain` maps to the cone
/// simplex with the sign `(-1)^i` of the insertion position.
pub fn cone_map(domain: impl IntoIterator<Item = Simplex>, apex: usize) -> Result<ChainMap> {
    let mut m = ChainMap::new(1);
    for s in domain {
        let (coned, sign) = s.cone(apex)?;
        m.set(s, Chain::from_terms(coned.dimension() as i64, [(coned, rat(sign))]));
    }
    Ok(m)
}

/// Relabels a chain through a vertex map, accumulating orientation signs.
pub fn relabel_chain(c: &Chain, f: impl Fn(usize) -> usize + Copy) -> Result<Chain> {
    let mut out = Chain::zero(c.dimension());
    for (s, x) in c.iter() {
        let (img, sign) = s.relabel(f).ok_or_else(|| {
            Error::Domain(format!("relabeling collapses simplex {:?}", s))
        })?;
        out.add_term(img, x * rat(sign));
    }
    Ok(out)
}

/// The maps attached to a derived complex. Unused slots stay `None`.
#[derive(Default)]
pub struct ChainMapSet {
    /// Cone maps, one per subdivided top simplex.
    pub cone_maps: BTreeMap<Simplex, ChainMap>,
    /// `S_*`: subdivision chain map (stellar subdivision).
    pub subdivision: Option<ChainMap>,
    /// `I_0`: inclusion as the bottom copy of a prism.
    pub bottom_inclusion: Option<ChainMap>,
    /// `I_1`: inclusion as the top copy of a prism.
    pub top_inclusion: Option<ChainMap>,
    /// Prism homotopy map (degree +1).
    pub prism_map: Option<ChainMap>,
    /// Stellar-prism homotopy map (degree +1).
    pub stellar_prism_map: Option<ChainMap>,
    /// Composite `S_* I_1`: inclusion as the subdivided top copy.
    pub subdivided_top_inclusion: Option<ChainMap>,
    /// New-vertex dictionary: subdivided top simplex -> stellar vertex id.
    pub stellar_vertices: BTreeMap<Simplex, usize>,
}

fn boundary_of_simplex(s: &Simplex) -> Chain {
    let mut c = Chain::zero(s.dimension() as i64 - 1);
    if s.dimension() == 0 {
        return c;
    }
    for (f, sign) in s.boundary_faces() {
        c.add_term(f, rat(sign));
    }
    c
}

fn boundary_of_chain(c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dimension() - 1);
    for (s, x) in c.iter() {
        out = out.add(&boundary_of_simplex(s).scale(x));
    }
    out
}

/// Verifies the cone identity `d(b(phi)) = phi - b(d(phi))` on the map's
/// domain: on every basis simplex of positive dimension, and on vertex
/// differences (the identity holds on the augmentation-zero part of the
/// vertex chains, where the apex terms cancel).
pub fn verify_cone_identity(map: &ChainMap) -> bool {
    let positive = map.domain().filter(|s| s.dimension() >= 1).all(|s| {
        let img = map.image_of(s).expect("domain key");
        let lhs = boundary_of_chain(img);
        let rhs = Chain::unit(s.clone()).sub(&map.apply(&boundary_of_simplex(s)));
        lhs == rhs
    });
    if !positive {
        return false;
    }
    let vertices: Vec<&Simplex> = map.domain().filter(|s| s.dimension() == 0).collect();
    vertices.windows(2).all(|w| {
        let c = Chain::unit(w[0].clone()).sub(&Chain::unit(w[1].clone()));
        boundary_of_chain(&map.apply(&c)) == c
    })
}

/// Verifies `d(S(phi)) = S(d(phi))` for every basis simplex.
pub fn verify_commutes_with_boundary(map: &ChainMap) -> bool {
    map.domain().all(|s| {
        let img = map.image_of(s).expect("domain key");
        boundary_of_chain(img) == map.apply(&boundary_of_simplex(s))
    })
}

/// Verifies the homotopy identity `d(H(phi)) + H(d(phi)) = T(phi) - B(phi)`
/// for every basis simplex of `H`'s domain.
pub fn verify_homotopy_identity(h: &ChainMap, top: &ChainMap, bottom: &ChainMap) -> bool {
    h.domain().all(|s| {
        let img = h.image_of(s).expect("domain key");
        let lhs = boundary_of_chain(img).add(&h.apply(&boundary_of_simplex(s)));
        let rhs = top
            .apply(&Chain::unit(s.clone()))
            .sub(&bottom.apply(&Chain::unit(s.clone())));
        lhs == rhs
    })
}

/// Stellar subdivision of a pure `d`-complex: each top simplex is replaced
/// by the cones of its proper faces over a fresh vertex. Returns the
/// derived complex and the maps `b_sigma` and `S_*`, with the chain-map
/// identities verified exactly.
pub fn stellar_subdivision(
    complex: &SimplicialComplex,
) -> Result<(SimplicialComplex, ChainMapSet)> {
    let Some(d) = complex.dim() else {
        return Err(Error::Domain("empty complex".into()));
    };
    if !complex.maximal_simplices().iter().all(|s| s.dimension() == d) {
        return Err(Error::Domain("stellar subdivision requires a pure complex".into()));
    }
    let max_vertex = complex
        .simplices(0)
        .iter()
        .map(|s| s.vertices()[0])
        .max()
        .unwrap_or(0);
    let tops = complex.simplices(d);

    let mut simplices: Vec<Simplex> = complex.skeleton(d.saturating_sub(1)).iter_all().cloned().collect();
    let mut set = ChainMapSet::default();
    let mut next_vertex = max_vertex + 1;
    for sigma in &tops {
        let apex = next_vertex;
        next_vertex += 1;
        set.stellar_vertices.insert(sigma.clone(), apex);
        simplices.push(Simplex::from_sorted(vec![apex]));
        let faces = sigma.proper_faces();
        for tau in &faces {
            let (coned, _) = tau.cone(apex)?;
            simplices.push(coned);
        }
        let b = cone_map(faces, apex)?;
        if !verify_cone_identity(&b) {
            return Err(Error::Numeric(format!(
                "cone identity failed at {:?}",
                sigma
            )));
        }
        set.cone_maps.insert(sigma.clone(), b);
    }
    let derived = SimplicialComplex::from_simplex_set(simplices);

    // S_*: inclusion below the top dimension, cone-of-boundary on top
    let mut s_map = ChainMap::new(0);
    for k in 0..d {
        for s in complex.simplices(k) {
            s_map.set(s.clone(), Chain::unit(s));
        }
    }
    for sigma in &tops {
        let b = &set.cone_maps[sigma];
        let img = b.apply(&boundary_of_simplex(sigma));
        s_map.set(sigma.clone(), img);
    }
    if !verify_commutes_with_boundary(&s_map) {
        return Err(Error::Numeric("subdivision map does not commute with the boundary".into()));
    }
    set.subdivision = Some(s_map);
    Ok((derived, set))
}

/// Vertex id stride used when packing `(vertex, level)` pairs: level times
/// `stride` plus the vertex id.
pub fn prism_stride(complex: &SimplicialComplex) -> usize {
    complex
        .simplices(0)
        .iter()
        .map(|s| s.vertices()[0])
        .max()
        .map_or(1, |m| m + 1)
}

fn level_shift(s: &Simplex, stride: usize, level: usize) -> Simplex {
    Simplex::from_sorted(s.vertices().iter().map(|&v| level * stride + v).collect())
}

/// The staircase simplices triangulating `sigma x [0,1]`: the `j`-th one
/// keeps vertices `0..=j` on the bottom copy and `j..` on the top copy.
fn staircase(sigma: &Simplex, stride: usize) -> Vec<Simplex> {
    let verts = sigma.vertices();
    (0..verts.len())
        .map(|j| {
            let mut v: Vec<usize> = verts[..=j].to_vec();
            v.extend(verts[j..].iter().map(|&u| stride + u));
            Simplex::from_sorted(v)
        })
        .collect()
}

/// Prism of a complex: a triangulation of `K x [0,1]` with the packed
/// vertex encoding. Returns the derived complex together with `I_0`, `I_1`
/// and the prism homotopy map, all verified exactly.
pub fn prism(complex: &SimplicialComplex) -> Result<(SimplicialComplex, ChainMapSet)> {
    let stride = prism_stride(complex);
    let mut simplices: Vec<Simplex> = Vec::new();
    for sigma in complex.maximal_simplices() {
        for cell in staircase(&sigma, stride) {
            simplices.push(cell.clone());
            for f in cell.proper_faces() {
                simplices.push(f);
            }
        }
    }
    let derived = SimplicialComplex::from_simplex_set(simplices);

    let mut set = ChainMapSet::default();
    let mut bottom = ChainMap::new(0);
    let mut top = ChainMap::new(0);
    let mut homotopy = ChainMap::new(1);
    for s in complex.iter_all() {
        bottom.set(s.clone(), Chain::unit(level_shift(s, stride, 0)));
        top.set(s.clone(), Chain::unit(level_shift(s, stride, 1)));
        let mut img = Chain::zero(s.dimension() as i64 + 1);
        for (i, cell) in staircase(s, stride).into_iter().enumerate() {
            img.add_term(cell, rat(if i % 2 == 0 { 1 } else { -1 }));
        }
        homotopy.set(s.clone(), img);
    }
    if !verify_homotopy_identity(&homotopy, &top, &bottom) {
        return Err(Error::Numeric("prism identity failed".into()));
    }
    set.bottom_inclusion = Some(bottom);
    set.top_inclusion = Some(top);
    set.prism_map = Some(homotopy);
    Ok((derived, set))
}

/// Stellar prism of a pure `d`-complex: the bottom copy keeps the original
/// triangulation, the top copy is stellar-subdivided, and each top cell is
/// coned over its stellar vertex. `stellar_ids`, when given, fixes the id
/// of the stellar vertex per top simplex (ids may coincide with top-copy
/// vertices, which performs the quotient construction directly); otherwise
/// fresh ids after `2 * stride` are assigned.
pub fn stellar_prism(
    complex: &SimplicialComplex,
    stellar_ids: Option<&BTreeMap<Simplex, usize>>,
) -> Result<(SimplicialComplex, ChainMapSet)> {
    let Some(d) = complex.dim() else {
        return Err(Error::Domain("empty complex".into()));
    };
    if !complex.maximal_simplices().iter().all(|s| s.dimension() == d) {
        return Err(Error::Domain("stellar prism requires a pure complex".into()));
    }
    let stride = prism_stride(complex);
    let mut next_fresh = 2 * stride;
    let mut set = ChainMapSet::default();
    let mut simplices: Vec<Simplex> = Vec::new();

    // prisms of the (d-1)-skeleton
    let skeleton = complex.skeleton(d.saturating_sub(1));
    for sigma in skeleton.iter_all() {
        for cell in staircase(sigma, stride) {
            simplices.push(cell.clone());
            simplices.extend(cell.proper_faces());
        }
    }

    // per top simplex: cone the prism of every proper face over the
    // stellar vertex, and close the bottom with the coned bottom cell
    for sigma in complex.simplices(d) {
        let apex = match stellar_ids {
            Some(ids) => *ids.get(&sigma).ok_or_else(|| {
                Error::Domain(format!("missing stellar id for {:?}", sigma))
            })?,
            None => {
                let id = next_fresh;
                next_fresh += 1;
                id
            }
        };
        set.stellar_vertices.insert(sigma.clone(), apex);
        simplices.push(Simplex::from_sorted(vec![apex]));
        let bottom_cell = level_shift(&sigma, stride, 0);
        simplices.push(bottom_cell.clone());
        let (coned_bottom, _) = bottom_cell.cone(apex)?;
        simplices.push(coned_bottom);
        for tau in sigma.proper_faces() {
            for cell in staircase(&tau, stride) {
                let (coned, _) = cell.cone(apex)?;
                simplices.push(coned.clone());
                simplices.extend(coned.proper_faces());
                simplices.push(cell.clone());
                simplices.extend(cell.proper_faces());
            }
        }
    }
    let derived = SimplicialComplex::from_simplex_set(simplices);

    // inclusions and the prism map on the (d-1)-skeleton
    let mut bottom = ChainMap::new(0);
    let mut homotopy = ChainMap::new(1);
    for s in complex.iter_all() {
        bottom.set(s.clone(), Chain::unit(level_shift(s, stride, 0)));
    }
    for s in skeleton.iter_all() {
        let mut img = Chain::zero(s.dimension() as i64 + 1);
        for (i, cell) in staircase(s, stride).into_iter().enumerate() {
            img.add_term(cell, rat(if i % 2 == 0 { 1 } else { -1 }));
        }
        homotopy.set(s.clone(), img);
    }

    // subdivided top inclusion: plain top copy below dimension d, cone of
    // the top boundary on top cells
    let mut subdivided_top = ChainMap::new(0);
    for s in skeleton.iter_all() {
        subdivided_top.set(s.clone(), Chain::unit(level_shift(s, stride, 1)));
    }
    for sigma in complex.simplices(d) {
        let apex = set.stellar_vertices[&sigma];
        let top_cell = level_shift(&sigma, stride, 1);
        let faces: Vec<Simplex> = top_cell.proper_faces();
        let b_top = cone_map(faces, apex)?;
        let img = b_top.apply(&boundary_of_simplex(&top_cell));
        subdivided_top.set(sigma.clone(), img);

        // cone map over the stellar vertex, defined on the prism of the
        // boundary of sigma plus the bottom cell
        let mut cone_domain: Vec<Simplex> = vec![level_shift(&sigma, stride, 0)];
        for tau in sigma.proper_faces() {
            for cell in staircase(&tau, stride) {
                cone_domain.push(cell.clone());
                cone_domain.extend(cell.proper_faces());
            }
            cone_domain.push(level_shift(&tau, stride, 1));
        }
        cone_domain.sort();
        cone_domain.dedup();
        let b = cone_map(cone_domain, apex)?;
        if !verify_cone_identity(&b) {
            return Err(Error::Numeric(format!("cone identity failed at {:?}", sigma)));
        }
        set.cone_maps.insert(sigma.clone(), b);
    }

    // the stellar-prism homotopy: the prism map below the top dimension,
    // and -b(I_0(s)) - b(P(ds)) on top cells
    let mut sp = ChainMap::new(1);
    for s in skeleton.iter_all() {
        sp.set(
            s.clone(),
            homotopy.image_of(s).expect("skeleton stored").clone(),
        );
    }
    for sigma in complex.simplices(d) {
        let b = &set.cone_maps[&sigma];
        let i0 = Chain::unit(level_shift(&sigma, stride, 0));
        let p_of_boundary = homotopy.apply(&boundary_of_simplex(&sigma));
        let img = b
            .apply(&i0)
            .scale(&-Rat::one())
            .sub(&b.apply(&p_of_boundary));
        sp.set(sigma.clone(), img);
    }
    if !verify_homotopy_identity(&sp, &subdivided_top, &bottom) {
        return Err(Error::Numeric("stellar prism identity failed".into()));
    }

    set.bottom_inclusion = Some(bottom);
    set.prism_map = Some(homotopy);
    set.subdivided_top_inclusion = Some(subdivided_top);
    set.stellar_prism_map = Some(sp);
    Ok((derived, set))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stellar_subdivision_of_triangle() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let (star, set) = stellar_subdivision(&k).unwrap();
        assert_eq!(star.count(2), 3);
        assert_eq!(star.count(0), 4);
        assert!(verify_commutes_with_boundary(set.subdivision.as_ref().unwrap()));
    }

    #[test]
    fn stellar_subdivision_counts_on_sphere_skeleta() {
        // boundary of the d-simplex as a (d-1)-complex: d*(d+1) top cells
        for d in 2..=4usize {
            let verts: Vec<usize> = (0..=d).collect();
            let full = SimplicialComplex::build(&[verts.clone()], None).unwrap();
            let sphere = full
                .without_simplices(&[Simplex::new(verts).unwrap()])
                .unwrap();
            let (star, _) = stellar_subdivision(&sphere).unwrap();
            assert_eq!(star.count(d - 1), d * (d + 1));
        }
    }

    #[test]
    fn subdivided_cycle_stays_a_cycle() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let (star, set) = stellar_subdivision(&k).unwrap();
        let s = Simplex::new([0, 1, 2]).unwrap();
        let gamma = boundary_of_simplex(&s);
        let image = set.subdivision.as_ref().unwrap().apply(&gamma);
        assert!(star.apply_boundary(&image).unwrap().is_zero());
    }

    #[test]
    fn prism_of_edge_and_vertex() {
        let edge = SimplicialComplex::build(&[vec![0, 1]], None).unwrap();
        let (p, _) = prism(&edge).unwrap();
        assert_eq!(p.count(2), 2);
        assert_eq!(p.count(1), 5);
        assert_eq!(p.count(0), 4);

        let vertex = SimplicialComplex::build(&[vec![0]], None).unwrap();
        let (pv, _) = prism(&vertex).unwrap();
        assert_eq!(pv.count(1), 1);
        assert_eq!(pv.count(0), 2);
    }

    #[test]
    fn prism_identity_on_triangle() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let (_, set) = prism(&k).unwrap();
        assert!(verify_homotopy_identity(
            set.prism_map.as_ref().unwrap(),
            set.top_inclusion.as_ref().unwrap(),
            set.bottom_inclusion.as_ref().unwrap(),
        ));
    }

    #[test]
    fn stellar_prism_top_cell_counts() {
        // SP of the boundary of the d-simplex (as a pure (d-1)-complex)
        // has (d+1)d(d-1) + (d+1) top cells before identification, d = 2, 3
        for d in 2..=3usize {
            let verts: Vec<usize> = (0..=d).collect();
            let full = SimplicialComplex::build(&[verts.clone()], None).unwrap();
            let sphere = full
                .without_simplices(&[Simplex::new(verts).unwrap()])
                .unwrap();
            let (sp, _) = stellar_prism(&sphere, None).unwrap();
            let expected = (d + 1) * d * (d - 1) + (d + 1);
            assert_eq!(sp.count(d), expected, "d = {}", d);
        }
    }

    #[test]
    fn stellar_prism_identity_on_edge_complex() {
        let k = SimplicialComplex::build(&[vec![0, 1]], None).unwrap();
        let (_, set) = stellar_prism(&k, None).unwrap();
        assert!(verify_homotopy_identity(
            set.stellar_prism_map.as_ref().unwrap(),
            set.subdivided_top_inclusion.as_ref().unwrap(),
            set.bottom_inclusion.as_ref().unwrap(),
        ));
    }
}

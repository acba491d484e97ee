//! Worst-case complex families: the building block, the exponential
//! resistance and capacitance towers, disjoint many-small-eigenvalue
//! unions, and pattern complexes from proper colorings.

use std::collections::BTreeMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::maps::{self, relabel_chain, ChainMapSet};
use crate::{rat, Rat};

/// Generator cap on the total number of top cells.
pub const GENERATOR_CELL_CAP: usize = 4000;

/// A generated worst-case family member with its certificate chains.
#[derive(Clone, Debug)]
pub struct GeneratedFamily {
    /// The ambient complex (the tower itself, or `Q` for the nested pair).
    pub complex: SimplicialComplex,
    /// The nested subcomplex `P` for the capacitance pair.
    pub sub: Option<SimplicialComplex>,
    /// Designated cycle, un-normalized; divide by `sqrt(gamma_norm_sq)`
    /// for the unit cycle.
    pub gamma_raw: Chain,
    pub gamma_norm_sq: Rat,
    /// Chain bounding `gamma_raw` in `complex`.
    pub bounding_chain: Chain,
    /// For the capacitance pair: the chain in `P` bounding the twisted
    /// cycle `gamma + (-1)^(n-1) d^-n * d(bottom cell)`.
    pub sub_certificate: Option<Chain>,
    /// Per-block transfer chains in global coordinates.
    pub transfer_chains: Vec<Chain>,
    pub d: usize,
    pub n: usize,
    pub log: Vec<String>,
}

/// The building block: the stellar prism of the boundary of the
/// `d`-simplex with each stellar vertex identified to the opposite
/// top-copy vertex. Returns the block, the transfer chain `f` with
/// `df = d(bottom cell) + d * d(top cell)`, and the chain-map set.
pub fn building_block(d: usize) -> Result<(SimplicialComplex, Chain, ChainMapSet)> {
    if d < 1 {
        return Err(Error::Domain("building block requires d >= 1".into()));
    }
    let verts: Vec<usize> = (0..=d).collect();
    let full = SimplicialComplex::build(&[verts.clone()], None)?;
    let sigma = Simplex::new(verts.clone())?;
    let sphere = full.without_simplices(&[sigma.clone()])?;
    let stride = d + 1;

    // identify the stellar vertex of each facet with the top copy of the
    // vertex the facet omits
    let mut ids = BTreeMap::new();
    for facet in sphere.simplices(d - 1) {
        let missing = verts
            .iter()
            .copied()
            .find(|v| !facet.contains_vertex(*v))
            .expect("facet omits one vertex");
        ids.insert(facet, stride + missing);
    }
    let (block, set) = maps::stellar_prism(&sphere, Some(&ids))?;

    // transfer chain: +/- SP_*(d sigma), fixed by checking the boundary
    let sp = set.stellar_prism_map.as_ref().expect("stellar prism map");
    let mut boundary_sigma = Chain::zero(d as i64 - 1);
    for (f, sign) in sigma.boundary_faces() {
        boundary_sigma.add_term(f, rat(sign));
    }
    let candidate = sp.apply(&boundary_sigma);
    let target = block_boundary_target(d, stride)?;
    let actual = free_boundary(&candidate);
    let transfer = if actual == target {
        candidate
    } else if actual == target.scale(&-Rat::one()) {
        candidate.scale(&-Rat::one())
    } else {
        return Err(Error::Numeric(
            "transfer chain boundary does not match either sign of the target".into(),
        ));
    };
    Ok((block, transfer, set))
}

/// `d(bottom cell) + d * d(top cell)` in block-local coordinates.
fn block_boundary_target(d: usize, stride: usize) -> Result<Chain> {
    let bottom = Simplex::new(0..=d)?;
    let top = Simplex::new((0..=d).map(|v| stride + v))?;
    let mut t = Chain::zero(d as i64 - 1);
    for (f, sign) in bottom.boundary_faces() {
        t.add_term(f, rat(sign));
    }
    for (f, sign) in top.boundary_faces() {
        t.add_term(f, rat(sign) * rat(d as i64));
    }
    Ok(t)
}

/// Boundary of a chain as free simplicial arithmetic (no complex needed).
fn free_boundary(c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dimension() - 1);
    for (s, x) in c.iter() {
        for (f, sign) in s.boundary_faces() {
            out.add_term(f, x * rat(sign));
        }
    }
    out
}

fn boundary_of(s: &Simplex) -> Chain {
    let mut c = Chain::zero(s.dimension() as i64 - 1);
    for (f, sign) in s.boundary_faces() {
        c.add_term(f, rat(sign));
    }
    c
}

/// Level-`m` copy of a packed vertex id: local level 0 -> `to0`, local
/// level 1 -> `to1`.
fn block_relabel(stride: usize, to0: usize, to1: usize) -> impl Fn(usize) -> usize + Copy {
    move |v| {
        if v < stride {
            to0 * stride + v
        } else {
            to1 * stride + (v - stride)
        }
    }
}

/// The exponential-resistance tower: `n` building blocks glued so that the
/// block bottoms face outward, based on the complete complex at level 0.
/// The designated cycle is the boundary of the phantom cell at level `n`;
/// its unique bounding chain grows like `d^n`.
pub fn resistance_family(d: usize, n: usize) -> Result<GeneratedFamily> {
    if d < 1 || n < 1 {
        return Err(Error::Domain("resistance family requires d, n >= 1".into()));
    }
    let stride = d + 1;
    let (block, transfer_local, _) = building_block(d)?;
    if block.count(d) * n + 1 > GENERATOR_CELL_CAP {
        return Err(Error::Resource(format!(
            "family would exceed the generator cap of {} top cells",
            GENERATOR_CELL_CAP
        )));
    }
    let mut log = vec![format!(
        "building block: {} top cells, transfer chain support {}, norm^2 {}",
        block.count(d),
        transfer_local.support_len(),
        transfer_local.norm_sq()
    )];

    // base: complete complex on the level-0 vertices
    let mut simplices: Vec<Simplex> = SimplicialComplex::build(&[(0..=d).collect()], None)?
        .iter_all()
        .cloned()
        .collect();
    let mut transfers: Vec<Chain> = Vec::new();
    for m in 1..=n {
        // block top (local level 1) glues to level m-1, bottom becomes level m
        let f = block_relabel(stride, m, m - 1);
        for s in block.iter_all() {
            let (img, _) = s
                .relabel(f)
                .ok_or_else(|| Error::Numeric("relabel collapsed a simplex".into()))?;
            simplices.push(img);
        }
        transfers.push(relabel_chain(&transfer_local, f)?);
    }
    let complex = SimplicialComplex::from_simplex_set(simplices);

    // certificate recursion: y_0 = base cell, y_m = f_m - d * y_{m-1}
    let base_cell = Simplex::new(0..=d)?;
    let mut y = Chain::unit(base_cell);
    let mut norms = vec![y.norm_sq()];
    for (m, f_m) in transfers.iter().enumerate() {
        let next = f_m.sub(&y.scale(&rat(d as i64)));
        let expected = boundary_of(&level_cell(d, stride, m + 1)?);
        if complex.apply_boundary(&next)? != expected {
            return Err(Error::Numeric(format!(
                "certificate recursion broke at level {}",
                m + 1
            )));
        }
        // orthogonal supports make the norm recursion exact
        let expect_norm = f_m.norm_sq() + rat((d * d) as i64) * norms.last().expect("nonempty");
        if next.norm_sq() != expect_norm {
            return Err(Error::Numeric("norm recursion violated".into()));
        }
        norms.push(next.norm_sq());
        y = next;
    }
    let gamma_raw = complex.apply_boundary(&y)?;
    if gamma_raw.norm_sq() != rat((d + 1) as i64) {
        return Err(Error::Numeric("designated cycle norm is not d+1".into()));
    }

    // the tower is collapsible onto a lower skeleton, so the boundary
    // matrix has trivial kernel; certify by exact rank
    let b = complex.boundary_matrix(d)?;
    if linalg::rank(&b.to_rational()) != complex.count(d) {
        return Err(Error::Numeric("kernel of the boundary matrix is nontrivial".into()));
    }
    log.push(format!(
        "tower: {} top cells, |y|^2 = {}",
        complex.count(d),
        y.norm_sq()
    ));
    Ok(GeneratedFamily {
        complex,
        sub: None,
        gamma_raw,
        gamma_norm_sq: rat((d + 1) as i64),
        bounding_chain: y,
        sub_certificate: None,
        transfer_chains: transfers,
        d,
        n,
        log,
    })
}

fn level_cell(d: usize, stride: usize, level: usize) -> Result<Simplex> {
    Simplex::new((0..=d).map(|v| level * stride + v))
}

/// The exponential-capacitance nested pair: blocks glued bottom-to-tower so
/// the flow through the tower shrinks by `1/d` per level. `P` is `Q` minus
/// the level-0 cell; the designated cycle bounds in `Q` but not in `P`.
pub fn capacitance_family(d: usize, n: usize) -> Result<GeneratedFamily> {
    if d < 1 || n < 1 {
        return Err(Error::Domain("capacitance family requires d, n >= 1".into()));
    }
    let stride = d + 1;
    let (block, transfer_local, _) = building_block(d)?;
    if block.count(d) * n + 1 > GENERATOR_CELL_CAP {
        return Err(Error::Resource(format!(
            "family would exceed the generator cap of {} top cells",
            GENERATOR_CELL_CAP
        )));
    }
    let mut simplices: Vec<Simplex> = SimplicialComplex::build(&[(0..=d).collect()], None)?
        .iter_all()
        .cloned()
        .collect();
    let mut transfers: Vec<Chain> = Vec::new();
    for m in 1..=n {
        // block bottom (local level 0) glues to level m-1, top becomes level m
        let f = block_relabel(stride, m - 1, m);
        for s in block.iter_all() {
            let (img, _) = s
                .relabel(f)
                .ok_or_else(|| Error::Numeric("relabel collapsed a simplex".into()))?;
            simplices.push(img);
        }
        transfers.push(relabel_chain(&transfer_local, f)?);
    }
    let ambient = SimplicialComplex::from_simplex_set(simplices);
    let base_cell = Simplex::new(0..=d)?;
    let sub = ambient.without_simplices(&[base_cell.clone()])?;

    // twisted recursion: y_m = (1/d) f_m - (1/d) y_{m-1}, with
    // d y_m = d(cell_m) + (-1)^(m-1) d^-m d(cell_0)
    let inv_d = Rat::one() / rat(d as i64);
    let mut y: Option<Chain> = None;
    for (m, f_m) in transfers.iter().enumerate() {
        let next = match &y {
            None => f_m.scale(&inv_d),
            Some(prev) => f_m.scale(&inv_d).sub(&prev.scale(&inv_d)),
        };
        let level = m + 1;
        let mut expected = boundary_of(&level_cell(d, stride, level)?);
        let sign = if level % 2 == 1 { Rat::one() } else { -Rat::one() };
        let coeff = sign * inv_d.clone().pow(level as i32);
        expected = expected.add(&boundary_of(&base_cell).scale(&coeff));
        if sub.apply_boundary(&next)? != expected {
            return Err(Error::Numeric(format!(
                "twisted certificate broke at level {}",
                level
            )));
        }
        y = Some(next);
    }
    let y = y.expect("n >= 1");
    let gamma_raw = boundary_of(&level_cell(d, stride, n)?);

    // bounding chain in Q: y + (-1)^n d^-n * (level-0 cell)
    let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
    let bounding = y.add(&Chain::unit(base_cell).scale(&(sign * inv_d.pow(n as i32))));
    if ambient.apply_boundary(&bounding)? != gamma_raw {
        return Err(Error::Numeric("bounding chain in Q has the wrong boundary".into()));
    }
    if crate::flow::is_null_homologous(&sub, &gamma_raw)? {
        return Err(Error::Numeric(
            "designated cycle is unexpectedly null-homologous in P".into(),
        ));
    }
    Ok(GeneratedFamily {
        complex: ambient,
        sub: Some(sub),
        gamma_raw,
        gamma_norm_sq: rat((d + 1) as i64),
        bounding_chain: bounding,
        sub_certificate: Some(y),
        transfer_chains: transfers,
        d,
        n,
        log: Vec::new(),
    })
}

/// Disjoint copies of the resistance tower, vertex ids offset per copy.
/// `copies` defaults to the number of top cells of one tower (the
/// many-small-eigenvalues construction), subject to the generator cap.
pub fn many_small(d: usize, n: usize, copies: Option<usize>) -> Result<SimplicialComplex> {
    let base = resistance_family(d, n)?;
    let per = base.complex.count(d);
    let copies = copies.unwrap_or(per);
    if copies == 0 {
        return Err(Error::Domain("need at least one copy".into()));
    }
    if per * copies > GENERATOR_CELL_CAP {
        return Err(Error::Resource(format!(
            "{} copies x {} top cells exceeds the generator cap {}",
            copies, per, GENERATOR_CELL_CAP
        )));
    }
    let span = (n + 1) * (d + 1);
    let mut out = base.complex.clone();
    for c in 1..copies {
        out = out.disjoint_union(&base.complex, c * span);
    }
    Ok(out)
}

/// A vertex coloring with its properness verdict and derived data.
#[derive(Clone, Debug, Serialize)]
pub struct ColoringData {
    pub colors: BTreeMap<usize, usize>,
    pub proper: bool,
    /// Violated condition when improper: 1 = monochromatic edge,
    /// 2 = two facets share a color set.
    pub violated_condition: Option<u8>,
    pub color_count: usize,
}

/// Checks the two properness conditions for a `d`-dimensional complex:
/// every edge bichromatic, and distinct `(d-1)`-simplices carrying
/// distinct color sets.
pub fn check_coloring(
    complex: &SimplicialComplex,
    colors: &BTreeMap<usize, usize>,
) -> Result<ColoringData> {
    let Some(d) = complex.dim() else {
        return Err(Error::Domain("empty complex".into()));
    };
    for v in complex.simplices(0) {
        if !colors.contains_key(&v.vertices()[0]) {
            return Err(Error::Domain(format!(
                "vertex {} has no color",
                v.vertices()[0]
            )));
        }
    }
    let mut violated = None;
    'edges: for e in complex.simplices(1) {
        let vs = e.vertices();
        if colors[&vs[0]] == colors[&vs[1]] {
            violated = Some(1);
            break 'edges;
        }
    }
    if violated.is_none() && d >= 1 {
        let mut seen = std::collections::BTreeSet::new();
        for s in complex.simplices(d - 1) {
            let mut set: Vec<usize> = s.vertices().iter().map(|v| colors[v]).collect();
            set.sort_unstable();
            set.dedup();
            if set.len() != s.vertices().len() || !seen.insert(set) {
                violated = Some(2);
                break;
            }
        }
    }
    let used: std::collections::BTreeSet<usize> = colors.values().copied().collect();
    Ok(ColoringData {
        colors: colors.clone(),
        proper: violated.is_none(),
        violated_condition: violated,
        color_count: used.len(),
    })
}

/// Quotient by a proper coloring: simplices map to their vertex-color
/// sets. Errors on improper colorings, naming the violated condition.
pub fn pattern_complex(
    complex: &SimplicialComplex,
    colors: &BTreeMap<usize, usize>,
) -> Result<(SimplicialComplex, ColoringData)> {
    let data = check_coloring(complex, colors)?;
    if !data.proper {
        return Err(Error::Domain(format!(
            "improper coloring: condition ({}) violated",
            data.violated_condition.expect("improper has a condition")
        )));
    }
    let mut simplices = Vec::new();
    for s in complex.iter_all() {
        let img: std::collections::BTreeSet<usize> =
            s.vertices().iter().map(|v| colors[v]).collect();
        simplices.push(Simplex::from_sorted(img.into_iter().collect()));
    }
    let pattern = SimplicialComplex::from_simplex_set(simplices);
    let d = complex.dim().expect("nonempty");
    if pattern.count(d) != complex.count(d) || pattern.count(d - 1) != complex.count(d - 1) {
        return Err(Error::Numeric(
            "pattern complex does not preserve top-dimension counts".into(),
        ));
    }
    Ok((pattern, data))
}

/// Rejection-samples colorings with the given budget until one is proper.
pub fn random_proper_coloring(
    complex: &SimplicialComplex,
    color_budget: usize,
    attempts: usize,
    seed: u64,
) -> Result<Option<ColoringData>> {
    if color_budget == 0 {
        return Err(Error::Domain("color budget must be positive".into()));
    }
    let vertices: Vec<usize> = complex
        .simplices(0)
        .iter()
        .map(|s| s.vertices()[0])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let colors: BTreeMap<usize, usize> = vertices
            .iter()
            .map(|&v| (v, rng.gen_range(0..color_budget)))
            .collect();
        let data = check_coloring(complex, &colors)?;
        if data.proper {
            return Ok(Some(data));
        }
    }
    Ok(None)
}

/// Generalized degree: the maximum number of `j`-simplices containing an
/// `i`-simplex, maximized over `1 <= i < j <= d`.
pub fn generalized_degree(complex: &SimplicialComplex) -> usize {
    let Some(d) = complex.dim() else { return 0 };
    let mut best = 0;
    for i in 1..d {
        for j in (i + 1)..=d {
            for s in complex.simplices(i) {
                let count = complex
                    .simplices(j)
                    .iter()
                    .filter(|t| s.is_face_of(t))
                    .count();
                best = best.max(count);
            }
        }
    }
    best
}

/// Seeded random complex: every candidate simplex of each size up to
/// `dim + 1` enters independently; the result is the downward closure.
pub fn random_complex(
    n_vertices: usize,
    max_dim: usize,
    density: f64,
    seed: u64,
) -> Result<SimplicialComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maximal: Vec<Vec<usize>> = (0..n_vertices).map(|v| vec![v]).collect();
    for size in 2..=(max_dim + 1).min(n_vertices) {
        for combo in crate::snf::combinations(n_vertices, size) {
            if rng.gen_bool(density) {
                maximal.push(combo);
            }
        }
    }
    SimplicialComplex::build(&maximal, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow;

    #[test]
    fn building_block_transfer_chain_d2() {
        let (block, f, _) = building_block(2).unwrap();
        let target = block_boundary_target(2, 3).unwrap();
        assert_eq!(block.apply_boundary(&f).unwrap(), target);
        // frozen regression values computed by this construction
        assert_eq!(block.count(2), 9);
        assert_eq!(f.norm_sq(), rat(9));
    }

    #[test]
    fn building_block_monotone_in_dimension() {
        let (_, f2, _) = building_block(2).unwrap();
        let (block3, f3, _) = building_block(3).unwrap();
        let target = block_boundary_target(3, 4).unwrap();
        assert_eq!(block3.apply_boundary(&f3).unwrap(), target);
        assert!(f3.norm_sq() >= f2.norm_sq());
    }

    #[test]
    fn resistance_family_growth() {
        let fam = resistance_family(2, 3).unwrap();
        assert_eq!(fam.gamma_norm_sq, rat(3));
        // R = |y|^2 / 3 by kernel triviality
        let r = flow::effective_resistance(&fam.complex, &fam.gamma_raw).unwrap();
        let expected = fam.bounding_chain.norm_sq();
        assert_eq!(r.resistance.exact(), Some(&expected));
    }

    #[test]
    fn capacitance_family_certificates() {
        let fam = capacitance_family(2, 2).unwrap();
        let sub = fam.sub.as_ref().unwrap();
        assert!(!flow::is_null_homologous(sub, &fam.gamma_raw).unwrap());
        assert!(flow::is_null_homologous(&fam.complex, &fam.gamma_raw).unwrap());
    }

    #[test]
    fn many_small_is_a_disjoint_union() {
        let m = many_small(2, 2, Some(2)).unwrap();
        let single = resistance_family(2, 2).unwrap().complex;
        assert_eq!(m.count(2), 2 * single.count(2));
        assert_eq!(
            crate::betti::matrix_reduction_betti(&m, 2).unwrap(),
            0
        );
    }

    #[test]
    fn identity_coloring_gives_isomorphic_pattern() {
        let fam = resistance_family(2, 1).unwrap();
        let colors: BTreeMap<usize, usize> = fam
            .complex
            .simplices(0)
            .iter()
            .map(|s| (s.vertices()[0], s.vertices()[0]))
            .collect();
        let (pattern, data) = pattern_complex(&fam.complex, &colors).unwrap();
        assert!(data.proper);
        assert_eq!(pattern, fam.complex);
    }

    #[test]
    fn improper_coloring_rejected_with_condition() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let mut colors = BTreeMap::new();
        colors.insert(0, 0);
        colors.insert(1, 0);
        colors.insert(2, 1);
        let err = pattern_complex(&k, &colors).unwrap_err();
        assert!(err.to_string().contains("condition (1)"));
    }
}

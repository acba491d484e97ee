//! Weighted simplicial complexes and their integral boundary operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::{rat, Int, Rat};

/// A simplex stored as a strictly increasing list of vertex ids.
///
/// Two simplices are equal iff their vertex lists are equal; the derived
/// `Ord` (lexicographic on the vertex list) is the canonical simplex order
/// used for matrix rows and columns throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Builds a simplex from vertex ids, sorting them. Fails on duplicates.
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedInput(format!(
                "duplicate vertex in simplex {:?}",
                v
            )));
        }
        if v.is_empty() {
            return Err(Error::MalformedInput("empty simplex".into()));
        }
        Ok(Self { vertices: v })
    }

    /// Like [`Simplex::new`] but panics on duplicates; for literals in tests
    /// and generators where the input is known-good.
    pub fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// True iff `self` is a (not necessarily proper) face of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.vertices.iter();
        self.vertices
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }

    /// The facet obtained by deleting the vertex at position `j`.
    pub fn facet(&self, j: usize) -> Simplex {
        let mut v = self.vertices.clone();
        v.remove(j);
        Simplex { vertices: v }
    }

    /// Signed boundary faces `(facet, sign)` with sign `(-1)^j` in the
    /// vertex-deletion order.
    pub fn boundary_faces(&self) -> Vec<(Simplex, i64)> {
        (0..self.vertices.len())
            .map(|j| (self.facet(j), if j % 2 == 0 { 1 } else { -1 }))
            .collect()
    }

    /// All proper faces (every nonempty subset except the simplex itself).
    pub fn proper_faces(&self) -> Vec<Simplex> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for mask in 1u64..((1u64 << n) - 1) {
            let verts: Vec<usize> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.vertices[i])
                .collect();
            out.push(Simplex { vertices: verts });
        }
        out
    }

    /// The simplex with `v` inserted, plus the sign `(-1)^i` where `i` is
    /// the sorted position `v` lands in. Fails if `v` is already a vertex.
    pub fn cone(&self, v: usize) -> Result<(Simplex, i64)> {
        match self.vertices.binary_search(&v) {
            Ok(_) => Err(Error::MalformedInput(format!(
                "cone vertex {} already in simplex {:?}",
                v, self.vertices
            ))),
            Err(pos) => {
                let mut verts = self.vertices.clone();
                verts.insert(pos, v);
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                Ok((Simplex { vertices: verts }, sign))
            }
        }
    }

    /// Relabels vertices through `f`, returning the sorted simplex and the
    /// permutation sign, or `None` if two vertices collide.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Option<(Simplex, i64)> {
        let imgs: Vec<usize> = self.vertices.iter().map(|&v| f(v)).collect();
        let mut idx: Vec<usize> = (0..imgs.len()).collect();
        idx.sort_by_key(|&i| imgs[i]);
        let sorted: Vec<usize> = idx.iter().map(|&i| imgs[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        // parity of the sorting permutation
        let mut perm = idx.clone();
        let mut sign = 1i64;
        for i in 0..perm.len() {
            while perm[i] != i {
                let j = perm[i];
                perm.swap(i, j);
                sign = -sign;
            }
        }
        Some((Simplex { vertices: sorted }, sign))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, "}}")
    }
}

/// Downward-closed complex with per-simplex positive rational weights.
/// Immutable after construction; weights default to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    simplices_by_dim: Vec<BTreeSet<Simplex>>,
    weights: BTreeMap<Simplex, Rat>,
}

impl SimplicialComplex {
    /// Builds the downward closure of the given maximal simplices.
    /// Unspecified weights default to 1; weight keys must name generated
    /// simplices and be strictly positive.
    pub fn build(
        maximal_simplices: &[Vec<usize>],
        weights: Option<BTreeMap<Simplex, Rat>>,
    ) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        let mut stack: Vec<Simplex> = Vec::new();
        for verts in maximal_simplices {
            stack.push(Simplex::new(verts.iter().copied())?);
        }
        let mut seen: BTreeSet<Simplex> = BTreeSet::new();
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            if s.dimension() > 0 {
                for j in 0..=s.dimension() {
                    stack.push(s.facet(j));
                }
            }
            let d = s.dimension();
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, BTreeSet::new);
            }
            by_dim[d].insert(s);
        }
        let weights = weights.unwrap_or_default();
        for (s, w) in &weights {
            if !seen.contains(s) {
                return Err(Error::Membership(format!(
                    "weight key {:?} is not a simplex of the complex",
                    s
                )));
            }
            if !w.is_positive() {
                return Err(Error::Domain(format!(
                    "non-positive weight {} on {:?}",
                    w, s
                )));
            }
        }
        Ok(Self {
            simplices_by_dim: by_dim,
            weights,
        })
    }

    /// Assembles a complex from an explicit, already downward-closed set.
    /// Used by generators that enumerate every simplex themselves.
    pub fn from_simplex_set(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        for s in simplices {
            let d = s.dimension();
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, BTreeSet::new);
            }
            by_dim[d].insert(s);
        }
        let c = Self {
            simplices_by_dim: by_dim,
            weights: BTreeMap::new(),
        };
        debug_assert!(c.is_downward_closed());
        c
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices_by_dim.iter().flatten().all(|s| {
            s.dimension() == 0
                || (0..=s.dimension()).all(|j| self.contains(&s.facet(j)))
        })
    }

    /// Dimension of the complex, or `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        (0..self.simplices_by_dim.len())
            .rev()
            .find(|&d| !self.simplices_by_dim[d].is_empty())
    }

    /// Number of `d`-simplices.
    pub fn count(&self, d: usize) -> usize {
        self.simplices_by_dim.get(d).map_or(0, |s| s.len())
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    /// The `d`-simplices in canonical (lexicographic) order.
    pub fn simplices(&self, d: usize) -> Vec<Simplex> {
        self.simplices_by_dim
            .get(d)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices_by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices_by_dim
            .get(s.dimension())
            .map_or(false, |set| set.contains(s))
    }

    /// Weight of a simplex (1 when unspecified).
    pub fn weight(&self, s: &Simplex) -> Rat {
        self.weights.get(s).cloned().unwrap_or_else(Rat::one)
    }

    /// Explicitly stored (non-default) weights.
    pub fn stored_weights(&self) -> &BTreeMap<Simplex, Rat> {
        &self.weights
    }

    pub fn with_weights(mut self, weights: BTreeMap<Simplex, Rat>) -> Result<Self> {
        for (s, w) in &weights {
            if !self.contains(s) {
                return Err(Error::Membership(format!("weight key {:?} not in complex", s)));
            }
            if !w.is_positive() {
                return Err(Error::Domain(format!("non-positive weight {} on {:?}", w, s)));
            }
        }
        self.weights = weights;
        Ok(self)
    }

    /// Maximal simplices (those with no proper coface in the complex).
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for d in 0..self.simplices_by_dim.len() {
            for s in &self.simplices_by_dim[d] {
                let has_coface = self
                    .simplices_by_dim
                    .get(d + 1)
                    .map_or(false, |up| up.iter().any(|t| s.is_face_of(t)));
                if !has_coface {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// The `k`-skeleton.
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        let by_dim = self
            .simplices_by_dim
            .iter()
            .take(k + 1)
            .cloned()
            .collect::<Vec<_>>();
        let weights = self
            .weights
            .iter()
            .filter(|(s, _)| s.dimension() <= k)
            .map(|(s, w)| (s.clone(), w.clone()))
            .collect();
        SimplicialComplex {
            simplices_by_dim: by_dim,
            weights,
        }
    }

    /// Removes the listed `d`-simplices (top cells only; the result keeps
    /// every face, so it stays downward closed as long as the removed
    /// simplices have no cofaces in the complex).
    pub fn without_simplices(&self, remove: &[Simplex]) -> Result<SimplicialComplex> {
        let mut out = self.clone();
        for s in remove {
            if !out.contains(s) {
                return Err(Error::Membership(format!("{:?} not in complex", s)));
            }
            out.simplices_by_dim[s.dimension()].remove(s);
            out.weights.remove(s);
        }
        while out
            .simplices_by_dim
            .last()
            .map_or(false, |set| set.is_empty())
        {
            out.simplices_by_dim.pop();
        }
        if !out.is_downward_closed() {
            return Err(Error::Domain(
                "removal breaks downward closure (a removed simplex has a coface)".into(),
            ));
        }
        Ok(out)
    }

    /// Union with vertex-disjoint relabeling: the other complex's vertex ids
    /// are shifted by `offset`.
    pub fn disjoint_union(&self, other: &SimplicialComplex, offset: usize) -> SimplicialComplex {
        let mut simplices: Vec<Simplex> = self.iter_all().cloned().collect();
        for s in other.iter_all() {
            simplices.push(Simplex::from_sorted(
                s.vertices().iter().map(|&v| v + offset).collect(),
            ));
        }
        let mut c = SimplicialComplex::from_simplex_set(simplices);
        let mut weights = self.weights.clone();
        for (s, w) in &other.weights {
            weights.insert(
                Simplex::from_sorted(s.vertices().iter().map(|&v| v + offset).collect()),
                w.clone(),
            );
        }
        c.weights = weights;
        c
    }

    /// True iff every simplex of `self` is a simplex of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter_all().all(|s| other.contains(s))
    }

    /// Degree of a `d`-simplex: total weight of its `(d+1)`-cofaces.
    pub fn degree(&self, s: &Simplex) -> Rat {
        let d = s.dimension();
        self.simplices(d + 1)
            .iter()
            .filter(|t| s.is_face_of(t))
            .map(|t| self.weight(t))
            .sum()
    }

    /// Cofaces of `s` of dimension `dim(s)+1`, in canonical order.
    pub fn cofacets(&self, s: &Simplex) -> Vec<Simplex> {
        self.simplices(s.dimension() + 1)
            .into_iter()
            .filter(|t| s.is_face_of(t))
            .collect()
    }

    /// Integral boundary operator from `d`-chains to `(d-1)`-chains.
    ///
    /// Rows are the `(d-1)`-simplices and columns the `d`-simplices, both in
    /// canonical order; every column has `d+1` entries with alternating
    /// signs per the vertex-deletion order. For `d` with no `d`-simplices
    /// the matrix has zero columns.
    pub fn boundary_matrix(&self, d: usize) -> Result<BoundaryOperator> {
        if d == 0 {
            return Err(Error::Domain("boundary matrix requires d >= 1".into()));
        }
        if let Some(dim) = self.dim() {
            if d > dim + 1 {
                return Err(Error::Domain(format!(
                    "d = {} out of range for a {}-dimensional complex",
                    d, dim
                )));
            }
        } else if d > 1 {
            return Err(Error::Domain("empty complex".into()));
        }
        Ok(BoundaryOperator::new(
            self.simplices(d - 1),
            self.simplices(d),
        ))
    }

    /// Boundary of a `d`-chain as a `(d-1)`-chain, exact.
    pub fn apply_boundary(&self, f: &Chain) -> Result<Chain> {
        if f.dimension() < 0 {
            return Ok(Chain::zero(-1));
        }
        for s in f.support() {
            if !self.contains(s) {
                return Err(Error::Membership(format!("{:?} not in complex", s)));
            }
        }
        let mut out = Chain::zero(f.dimension() - 1);
        for (s, c) in f.iter() {
            if s.dimension() == 0 {
                continue;
            }
            for (face, sign) in s.boundary_faces() {
                out.add_term(face, c * rat(sign));
            }
        }
        Ok(out)
    }
}

/// Sparse signed incidence matrix of a boundary operator, with the row and
/// column simplex lists retained (a relative matrix simply carries the
/// selected sublists).
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    rows: Vec<Simplex>,
    cols: Vec<Simplex>,
    /// Per-column sparse entries `(row index, sign)`.
    entries: Vec<Vec<(usize, i64)>>,
}

impl BoundaryOperator {
    pub fn new(rows: Vec<Simplex>, cols: Vec<Simplex>) -> Self {
        let row_index: BTreeMap<&Simplex, usize> =
            rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let entries = cols
            .iter()
            .map(|c| {
                c.boundary_faces()
                    .into_iter()
                    .filter_map(|(face, sign)| row_index.get(&face).map(|&i| (i, sign)))
                    .collect()
            })
            .collect();
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Relative matrix: keep columns for `d`-simplices in `cols`, drop rows
    /// for `(d-1)`-simplices in `excluded_rows`.
    pub fn relative(
        complex: &SimplicialComplex,
        d: usize,
        cols: Vec<Simplex>,
        excluded_rows: &BTreeSet<Simplex>,
    ) -> Result<Self> {
        for s in &cols {
            if s.dimension() != d || !complex.contains(s) {
                return Err(Error::Membership(format!(
                    "column selector {:?} is not a {}-simplex of the complex",
                    s, d
                )));
            }
        }
        for s in excluded_rows {
            if s.dimension() + 1 != d || !complex.contains(s) {
                return Err(Error::Membership(format!(
                    "row selector {:?} is not a {}-simplex of the complex",
                    s,
                    d - 1
                )));
            }
        }
        let rows: Vec<Simplex> = complex
            .simplices(d - 1)
            .into_iter()
            .filter(|s| !excluded_rows.contains(s))
            .collect();
        Ok(Self::new(rows, cols))
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_simplices(&self) -> &[Simplex] {
        &self.rows
    }

    pub fn col_simplices(&self) -> &[Simplex] {
        &self.cols
    }

    pub fn column_entries(&self, j: usize) -> &[(usize, i64)] {
        &self.entries[j]
    }

    /// Dense rational copy (rows x cols).
    pub fn to_rational(&self) -> Vec<Vec<Rat>> {
        let mut m = vec![vec![Rat::zero(); self.cols.len()]; self.rows.len()];
        for (j, col) in self.entries.iter().enumerate() {
            for &(i, s) in col {
                m[i][j] = rat(s);
            }
        }
        m
    }

    /// Dense big-integer copy.
    pub fn to_bigint(&self) -> Vec<Vec<Int>> {
        let mut m = vec![vec![Int::zero(); self.cols.len()]; self.rows.len()];
        for (j, col) in self.entries.iter().enumerate() {
            for &(i, s) in col {
                m[i][j] = Int::from(s);
            }
        }
        m
    }

    /// Dense float copy.
    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows.len(), self.cols.len());
        for (j, col) in self.entries.iter().enumerate() {
            for &(i, s) in col {
                m[(i, j)] = s as f64;
            }
        }
        m
    }

    /// Chain image of a column basis element.
    pub fn column_chain(&self, j: usize) -> Chain {
        let mut out = Chain::zero(self.cols[j].dimension() as i64 - 1);
        for &(i, s) in &self.entries[j] {
            out.add_term(self.rows[i].clone(), rat(s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_triangle() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        assert_eq!(k.count(0), 3);
        assert_eq!(k.count(1), 3);
        assert_eq!(k.count(2), 1);
        assert_eq!(k.dim(), Some(2));
    }

    #[test]
    fn closure_of_tetrahedron_boundary() {
        let k = SimplicialComplex::build(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap();
        assert_eq!(k.count(0), 4);
        assert_eq!(k.count(1), 6);
        assert_eq!(k.count(2), 4);
    }

    #[test]
    fn empty_complex() {
        let k = SimplicialComplex::build(&[], None).unwrap();
        assert_eq!(k.dim(), None);
        assert_eq!(k.count(0), 0);
    }

    #[test]
    fn duplicate_vertex_rejected() {
        assert!(SimplicialComplex::build(&[vec![0, 0, 1]], None).is_err());
    }

    #[test]
    fn non_positive_weight_rejected() {
        let mut w = BTreeMap::new();
        w.insert(Simplex::new([0, 1]).unwrap(), crate::rat(0));
        assert!(SimplicialComplex::build(&[vec![0, 1]], Some(w)).is_err());
    }

    #[test]
    fn closure_idempotence() {
        let k = SimplicialComplex::build(
            &[vec![0, 1, 2, 3], vec![2, 3, 4], vec![5]],
            None,
        )
        .unwrap();
        let maximal: Vec<Vec<usize>> = k
            .maximal_simplices()
            .iter()
            .map(|s| s.vertices().to_vec())
            .collect();
        let k2 = SimplicialComplex::build(&maximal, None).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn triangle_boundary_column() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let b = k.boundary_matrix(2).unwrap();
        assert_eq!(b.ncols(), 1);
        let chain = b.column_chain(0);
        let e = |a, b| Simplex::new([a, b]).unwrap();
        assert_eq!(chain.coeff(&e(1, 2)), crate::rat(1));
        assert_eq!(chain.coeff(&e(0, 2)), crate::rat(-1));
        assert_eq!(chain.coeff(&e(0, 1)), crate::rat(1));
    }

    #[test]
    fn edge_boundary() {
        let k = SimplicialComplex::build(&[vec![0, 1]], None).unwrap();
        let b = k.boundary_matrix(1).unwrap();
        let chain = b.column_chain(0);
        assert_eq!(chain.coeff(&Simplex::new([1]).unwrap()), crate::rat(1));
        assert_eq!(chain.coeff(&Simplex::new([0]).unwrap()), crate::rat(-1));
    }

    #[test]
    fn column_support_size() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2, 3, 4]], None).unwrap();
        for d in 1..=4 {
            let b = k.boundary_matrix(d).unwrap();
            for j in 0..b.ncols() {
                assert_eq!(b.column_entries(j).len(), d + 1);
            }
        }
    }
}

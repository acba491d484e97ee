//! Duality for embedded complexes: the dual graph over void boundaries,
//! the split of the designated void, and the equality between the
//! capacitance of a cycle and the dual-graph effective resistance.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::flow::{self, EnergyValue};
use crate::linalg::{self, RatMat};
use crate::Rat;

/// A dual-graph edge: the simplex it is dual to (`None` for the extra cell
/// closing the split void), its endpoints as dual-vertex indices, and the
/// primal weight.
#[derive(Clone, Debug)]
pub struct DualEdge {
    pub simplex: Option<Simplex>,
    pub tail: usize,
    pub head: usize,
    pub weight: Rat,
}

/// Dual graph of an embedded complex with the designated void split into
/// source and sink.
pub struct EmbeddedDualData {
    pub complex: SimplicialComplex,
    pub dimension: usize,
    pub gamma: Chain,
    pub flow_pos: Chain,
    pub flow_neg: Chain,
    /// Dual vertices: unsplit bounded voids, then source, sink, infinity.
    pub vertex_count: usize,
    pub source: usize,
    pub sink: usize,
    pub infinity: usize,
    pub edges: Vec<DualEdge>,
    /// Index of the extra edge (dual to the added cell) in `edges`.
    pub extra_edge: usize,
}

/// Builds the dual data from void-boundary chains. `voids` lists one
/// signed `d`-chain per bounded void; the designated void is the one whose
/// support is partitioned by the two given unit flows.
pub fn build_dual(
    complex: &SimplicialComplex,
    voids: &[Chain],
    flow_pos: &Chain,
    flow_neg: &Chain,
    gamma: &Chain,
) -> Result<EmbeddedDualData> {
    let Some(d) = complex.dim() else {
        return Err(Error::Domain("empty complex".into()));
    };
    // void columns must be cycles
    for (i, v) in voids.iter().enumerate() {
        if !complex.apply_boundary(v)?.is_zero() {
            return Err(Error::Domain(format!(
                "void {} boundary is not a cycle (d of d = 0 fails)",
                i
            )));
        }
    }
    // bounded void count must equal the Betti number
    let beta = crate::betti::matrix_reduction_betti(complex, d)?;
    if beta != voids.len() as i64 {
        return Err(Error::Domain(format!(
            "{} bounded voids but beta_d = {}",
            voids.len(),
            beta
        )));
    }
    // each d-simplex on at most two voids, oppositely signed
    for s in complex.simplices(d) {
        let coeffs: Vec<Rat> = voids
            .iter()
            .map(|v| v.coeff(&s))
            .filter(|c| !c.is_zero())
            .collect();
        if coeffs.len() > 2 {
            return Err(Error::Domain(format!(
                "{:?} lies on more than two voids",
                s
            )));
        }
        if coeffs.len() == 2 && &coeffs[0] + &coeffs[1] != Rat::zero() {
            return Err(Error::Domain(format!(
                "{:?} is not oppositely oriented on its two voids",
                s
            )));
        }
    }
    // flow checks
    if complex.apply_boundary(flow_pos)? != *gamma {
        return Err(Error::Domain("first flow does not bound the cycle".into()));
    }
    if complex.apply_boundary(flow_neg)? != gamma.scale(&-Rat::one()) {
        return Err(Error::Domain(
            "second flow does not bound the negated cycle".into(),
        ));
    }
    if flow_pos.support().any(|s| !flow_neg.coeff(s).is_zero()) {
        return Err(Error::Domain("the two flows share support".into()));
    }
    // locate the designated void by support partition
    let mut split_index = None;
    for (i, v) in voids.iter().enumerate() {
        let support_matches = v.support().count()
            == flow_pos.support().count() + flow_neg.support().count()
            && v
                .support()
                .all(|s| !flow_pos.coeff(s).is_zero() || !flow_neg.coeff(s).is_zero());
        if support_matches {
            split_index = Some(i);
            break;
        }
    }
    let Some(split_index) = split_index else {
        return Err(Error::Domain(
            "no void boundary is partitioned by the two flows".into(),
        ));
    };

    // dual vertices: unsplit voids keep their order, then s*, t*, infinity
    let unsplit: Vec<usize> = (0..voids.len()).filter(|&i| i != split_index).collect();
    let vertex_of_void: BTreeMap<usize, usize> = unsplit
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let source = unsplit.len();
    let sink = unsplit.len() + 1;
    let infinity = unsplit.len() + 2;
    let vertex_count = unsplit.len() + 3;

    // per-simplex dual edges; the split void contributes through the flows
    let mut edges = Vec::new();
    for s in complex.simplices(d) {
        let mut ends: Vec<(usize, Rat)> = Vec::new();
        for (i, v) in voids.iter().enumerate() {
            let c = v.coeff(&s);
            if c.is_zero() {
                continue;
            }
            if i == split_index {
                let vertex = if !flow_pos.coeff(&s).is_zero() { source } else { sink };
                ends.push((vertex, c));
            } else {
                ends.push((vertex_of_void[&i], c));
            }
        }
        while ends.len() < 2 {
            let other = -ends
                .first()
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| -Rat::one());
            ends.push((infinity, other));
        }
        let (tail, head) = if ends[0].1.is_positive() {
            (ends[0].0, ends[1].0)
        } else {
            (ends[1].0, ends[0].0)
        };
        edges.push(DualEdge {
            simplex: Some(s.clone()),
            tail,
            head,
            weight: complex.weight(&s),
        });
    }
    let extra_edge = edges.len();
    edges.push(DualEdge {
        simplex: None,
        tail: sink,
        head: source,
        weight: Rat::one(),
    });

    Ok(EmbeddedDualData {
        complex: complex.clone(),
        dimension: d,
        gamma: gamma.clone(),
        flow_pos: flow_pos.clone(),
        flow_neg: flow_neg.clone(),
        vertex_count,
        source,
        sink,
        infinity,
        edges,
        extra_edge,
    })
}

/// Result of one duality comparison.
pub struct DualityCheck {
    pub capacitance: EnergyValue,
    pub dual_resistance: EnergyValue,
    pub difference: Option<Rat>,
}

impl EmbeddedDualData {
    /// Minimum-energy unit source/sink circulation on the dual edges
    /// restricted to the complement of `sub`, with unit flow on the extra
    /// edge. Exact rational.
    pub fn dual_resistance(&self, sub: &SimplicialComplex) -> Result<EnergyValue> {
        // edges of the restricted dual: duals of d-simplices NOT in sub,
        // plus the extra edge
        let mut cols: Vec<usize> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            match &e.simplex {
                Some(s) => {
                    if !sub.contains(s) {
                        cols.push(i);
                    }
                }
                None => cols.push(i),
            }
        }
        let m = cols.len();
        // circulation constraints: net flow zero at every dual vertex, and
        // unit flow on the extra edge
        let mut constraints: RatMat = linalg::zeros(self.vertex_count + 1, m);
        for (j, &ei) in cols.iter().enumerate() {
            let e = &self.edges[ei];
            if e.tail != e.head {
                constraints[e.tail][j] += -Rat::one();
                constraints[e.head][j] += Rat::one();
            }
            if ei == self.extra_edge {
                constraints[self.vertex_count][j] = Rat::one();
            }
        }
        let mut rhs = vec![Rat::zero(); self.vertex_count + 1];
        rhs[self.vertex_count] = Rat::one();
        // energy: sum over non-extra edges of f^2 / w*(e) with
        // w*(e) = 1/w(simplex), hence coefficient w(simplex)
        let mut energy: RatMat = linalg::zeros(m, m);
        for (j, &ei) in cols.iter().enumerate() {
            if ei != self.extra_edge {
                energy[j][j] = self.edges[ei].weight.clone();
            }
        }
        match linalg::minimize_quadratic_on_affine(&energy, &constraints, &rhs) {
            None => Ok(EnergyValue::Infinite),
            Some(q) => Ok(EnergyValue::Exact(q.value)),
        }
    }

    /// Computes both sides of the duality: the capacitance of the cycle in
    /// `(sub, K)` and the dual effective resistance, with their exact
    /// difference when both are finite.
    pub fn check_duality(&self, sub: &SimplicialComplex) -> Result<DualityCheck> {
        if !flow::is_null_homologous(&self.complex, &self.gamma)? {
            return Err(Error::Domain("cycle must bound in the ambient complex".into()));
        }
        let cap = flow::effective_capacitance(sub, &self.complex, &self.gamma)?;
        let dual = self.dual_resistance(sub)?;
        let difference = match (&cap.capacitance, &dual) {
            (EnergyValue::Exact(a), EnergyValue::Exact(b)) => Some((a - b).abs()),
            _ => None,
        };
        Ok(DualityCheck {
            capacitance: cap.capacitance,
            dual_resistance: dual,
            difference,
        })
    }
}

//! The incremental Betti-number algorithm over a pluggable null-homology
//! tester, and the exact matrix-reduction baseline.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::flow;
use crate::linalg;

/// Decides whether a cycle bounds in a prefix complex. Implementations see
/// only the prefix complex, never the full input.
pub trait NullHomologyTester {
    fn id(&self) -> &'static str;
    /// Returns the decision plus any query charge the tester accrued.
    fn test(&self, prefix: &SimplicialComplex, gamma: &Chain) -> Result<TesterOutcome>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TesterOutcome {
    pub null_homologous: bool,
    pub simulated_queries: u64,
}

/// Exact rational rank test.
pub struct ClassicalExactTester;

impl NullHomologyTester for ClassicalExactTester {
    fn id(&self) -> &'static str {
        "classical-exact"
    }
    fn test(&self, prefix: &SimplicialComplex, gamma: &Chain) -> Result<TesterOutcome> {
        Ok(TesterOutcome {
            null_homologous: flow::is_null_homologous(prefix, gamma)?,
            simulated_queries: 0,
        })
    }
}

/// Floating least-squares residual test.
pub struct ClassicalFloatTester;

impl NullHomologyTester for ClassicalFloatTester {
    fn id(&self) -> &'static str {
        "classical-float"
    }
    fn test(&self, prefix: &SimplicialComplex, gamma: &Chain) -> Result<TesterOutcome> {
        if gamma.is_zero() {
            return Ok(TesterOutcome {
                null_homologous: true,
                simulated_queries: 0,
            });
        }
        let d = (gamma.dimension() + 1) as usize;
        if prefix.count(d) == 0 {
            return Ok(TesterOutcome {
                null_homologous: false,
                simulated_queries: 0,
            });
        }
        let r = flow::effective_resistance_f64(prefix, gamma)?;
        Ok(TesterOutcome {
            null_homologous: r.is_some(),
            simulated_queries: 0,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiStep {
    pub simplex: Vec<usize>,
    pub dimension: usize,
    pub null_homologous: bool,
    pub delta: i64,
}

/// Trace of one incremental run.
#[derive(Clone, Debug, Serialize)]
pub struct BettiRun {
    pub dimension: usize,
    pub tester: String,
    pub betti: i64,
    pub steps: Vec<BettiStep>,
    pub tester_invocations: u64,
    pub simulated_queries: u64,
}

impl BettiRun {
    /// Recomputes the count identity `(+1 steps) - (-1 steps) = betti`.
    pub fn consistent(&self) -> bool {
        let total: i64 = self.steps.iter().map(|s| s.delta).sum();
        total == self.betti
    }
}

/// Insertion order; `Canonical` is the lexicographic simplex order, and a
/// permutation applies within each of the two dimension passes.
pub enum InsertionOrder {
    Canonical,
    Seeded(u64),
    Explicit {
        d_order: Vec<usize>,
        d_plus_one_order: Vec<usize>,
    },
}

fn ordered(simplices: Vec<Simplex>, perm: Option<&[usize]>) -> Result<Vec<Simplex>> {
    match perm {
        None => Ok(simplices),
        Some(p) => {
            let mut check: Vec<usize> = p.to_vec();
            check.sort_unstable();
            if check != (0..simplices.len()).collect::<Vec<_>>() {
                return Err(Error::Domain(format!(
                    "order is not a permutation of 0..{}",
                    simplices.len()
                )));
            }
            Ok(p.iter().map(|&i| simplices[i].clone()).collect())
        }
    }
}

/// Runs the incremental algorithm for the `d`-th Betti number: add the
/// `d`-simplices one by one, crediting a cycle when the boundary of the new
/// simplex already bounds in the prefix; then add the `(d+1)`-simplices,
/// debiting when the new boundary does not bound.
pub fn incremental_betti(
    complex: &SimplicialComplex,
    d: usize,
    tester: &dyn NullHomologyTester,
    order: InsertionOrder,
) -> Result<BettiRun> {
    if let Some(dim) = complex.dim() {
        if d > dim {
            return Err(Error::Domain(format!(
                "d = {} exceeds complex dimension {}",
                d, dim
            )));
        }
    }
    let (d_perm, up_perm): (Option<Vec<usize>>, Option<Vec<usize>>) = match order {
        InsertionOrder::Canonical => (None, None),
        InsertionOrder::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a: Vec<usize> = (0..complex.count(d)).collect();
            let mut b: Vec<usize> = (0..complex.count(d + 1)).collect();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            (Some(a), Some(b))
        }
        InsertionOrder::Explicit {
            d_order,
            d_plus_one_order,
        } => (Some(d_order), Some(d_plus_one_order)),
    };
    let d_simplices = ordered(complex.simplices(d), d_perm.as_deref())?;
    let up_simplices = ordered(complex.simplices(d + 1), up_perm.as_deref())?;

    let skeleton = if d == 0 {
        SimplicialComplex::build(&[], None)?
    } else {
        complex.skeleton(d - 1)
    };

    let mut betti: i64 = 0;
    let mut steps = Vec::new();
    let mut invocations = 0u64;
    let mut queries = 0u64;

    let mut prefix_cells: Vec<Simplex> = Vec::new();
    for s in &d_simplices {
        let prefix = extend(&skeleton, &prefix_cells);
        let gamma = boundary_chain(s);
        let outcome = tester.test(&prefix, &gamma)?;
        invocations += 1;
        queries += outcome.simulated_queries;
        let delta = if outcome.null_homologous { 1 } else { 0 };
        betti += delta;
        steps.push(BettiStep {
            simplex: s.vertices().to_vec(),
            dimension: d,
            null_homologous: outcome.null_homologous,
            delta,
        });
        prefix_cells.push(s.clone());
    }

    let full_d_skeleton = complex.skeleton(d);
    let mut up_prefix: Vec<Simplex> = Vec::new();
    for t in &up_simplices {
        let prefix = extend(&full_d_skeleton, &up_prefix);
        let gamma = boundary_chain(t);
        let outcome = tester.test(&prefix, &gamma)?;
        invocations += 1;
        queries += outcome.simulated_queries;
        let delta = if outcome.null_homologous { 0 } else { -1 };
        betti += delta;
        steps.push(BettiStep {
            simplex: t.vertices().to_vec(),
            dimension: d + 1,
            null_homologous: outcome.null_homologous,
            delta,
        });
        up_prefix.push(t.clone());
    }

    Ok(BettiRun {
        dimension: d,
        tester: tester.id().to_string(),
        betti,
        steps,
        tester_invocations: invocations,
        simulated_queries: queries,
    })
}

fn extend(base: &SimplicialComplex, cells: &[Simplex]) -> SimplicialComplex {
    SimplicialComplex::from_simplex_set(base.iter_all().cloned().chain(cells.iter().cloned()))
}

fn boundary_chain(s: &Simplex) -> Chain {
    let mut c = Chain::zero(s.dimension() as i64 - 1);
    if s.dimension() == 0 {
        return c;
    }
    for (f, sign) in s.boundary_faces() {
        c.add_term(f, crate::rat(sign));
    }
    c
}

/// Exact Betti number by rational rank: `dim ker d_d - rank d_{d+1}`.
pub fn matrix_reduction_betti(complex: &SimplicialComplex, d: usize) -> Result<i64> {
    let n_d = complex.count(d);
    if n_d == 0 {
        return Ok(0);
    }
    let rank_d = if d == 0 {
        0
    } else {
        linalg::rank(&complex.boundary_matrix(d)?.to_rational())
    };
    let rank_up = if complex.count(d + 1) == 0 {
        0
    } else {
        linalg::rank(&complex.boundary_matrix(d + 1)?.to_rational())
    };
    Ok(n_d as i64 - rank_d as i64 - rank_up as i64)
}

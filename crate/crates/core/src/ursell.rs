//! Ursell functions three ways: direct graph sum, Penrose tree sum, and
//! tree-graph upper bounds.
//!
//! The direct sum runs over all connected graphs on [n]; the tree sum runs
//! over spanning trees τ weighted by the interval top M(τ) of the
//! minimum-spanning-tree scheme. Both are exact rewritings of the same
//! function, which the tests and the `verify-identity` command exploit.
//!
//! Hard cores follow one convention throughout: a +∞ summand inside an
//! exponent makes the whole exponential factor exactly 0; a +∞ pair energy
//! makes the Mayer factor exactly −1.

use serde::Serialize;
use thiserror::Error;

use crate::exec;
use crate::graphs::{self, edge_count, endpoint_table, subset_connected, EdgeSet};
use crate::potentials::{pair_energy, Configuration, Energy, PairPotential, PotentialError};
use crate::scheme::{self, EdgeOrder, SchemeError, WeightTable};
use crate::sum::Neumaier;

#[derive(Debug, Error, PartialEq)]
pub enum UrsellError {
    #[error("n = {n} out of range [2, {max}]")]
    NOutOfRange { n: usize, max: usize },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Largest n for the direct sum over connected graphs.
pub const MAX_DIRECT_N: usize = 7;
/// Largest n for the tree-based evaluations.
pub const MAX_TREE_SUM_N: usize = 8;

/// Pair energies and the per-edge factors reused by every evaluation.
struct EdgeData {
    energies: Vec<Energy>,
    mayer: Vec<f64>,
    hat: Vec<f64>,
}

impl EdgeData {
    fn build(p: &PairPotential, beta: f64, c: &Configuration) -> Result<Self, UrsellError> {
        let n = c.n();
        let mut energies = Vec::with_capacity(edge_count(n));
        for e in 0..edge_count(n) {
            let (i, j) = graphs::edge_endpoints(n, e);
            energies.push(pair_energy(p, c, i, j)?);
        }
        let mayer = energies.iter().map(|v| v.mayer(beta)).collect();
        let hat = energies.iter().map(|v| v.hat_factor(beta)).collect();
        Ok(EdgeData {
            energies,
            mayer,
            hat,
        })
    }

    fn product(factors: &[f64], mut bits: u64) -> f64 {
        let mut p = 1.0;
        while bits != 0 {
            p *= factors[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        p
    }

    /// exp(−β Σ V) over the edges of `bits`; exactly 0 if any energy is +∞.
    fn boltzmann_over(&self, beta: f64, mut bits: u64) -> f64 {
        let mut s = 0.0;
        while bits != 0 {
            match self.energies[bits.trailing_zeros() as usize] {
                Energy::Finite(v) => s += v,
                Energy::Infinite => return 0.0,
            }
            bits &= bits - 1;
        }
        (-beta * s).exp()
    }
}

fn merge(parts: Vec<Neumaier>) -> f64 {
    let mut total = Neumaier::new();
    for p in parts {
        total.add(p.total());
    }
    total.total()
}

/// Σ over connected graphs g on [n] of Π over edges of (e^{−βV} − 1).
/// Deterministic: fixed bit-vector order with compensated chunked sums.
pub fn ursell_direct(p: &PairPotential, beta: f64, c: &Configuration) -> Result<f64, UrsellError> {
    let n = c.n();
    if !(2..=MAX_DIRECT_N).contains(&n) {
        return Err(UrsellError::NOutOfRange {
            n,
            max: MAX_DIRECT_N,
        });
    }
    let data = EdgeData::build(p, beta, c)?;
    let endpoints = endpoint_table(n);
    let top = EdgeSet::complete(n).bits();
    let parts = exec::chunked(top, |range| {
        let mut acc = Neumaier::new();
        for idx in range {
            let bits = idx + 1;
            if subset_connected(n, bits, &endpoints) {
                acc.add(EdgeData::product(&data.mayer, bits));
            }
        }
        acc
    });
    Ok(merge(parts))
}

/// The tree-sum side of the Penrose identity:
/// Σ_τ [Π_{E_τ}(e^{−βV}−1)] · exp(−β Σ_{E_{M(τ)}\E_τ} V).
pub fn penrose_rhs(p: &PairPotential, beta: f64, c: &Configuration) -> Result<f64, UrsellError> {
    penrose_rhs_with_order(p, beta, c, EdgeOrder::Lexicographic)
}

/// Same sum under an alternative tie-break edge order; the total must not
/// depend on the choice (the direct sum does not mention the order at all).
pub fn penrose_rhs_with_order(
    p: &PairPotential,
    beta: f64,
    c: &Configuration,
    order: EdgeOrder,
) -> Result<f64, UrsellError> {
    tree_sweep(p, beta, c, order, |data, table, tau| {
        let tau_bits = tau.edge_set().bits();
        let prod = EdgeData::product(&data.mayer, tau_bits);
        if prod == 0.0 {
            return 0.0;
        }
        let m = scheme::build_m(tau, table);
        prod * data.boltzmann_over(beta, m.edges.bits() & !tau_bits)
    })
}

/// Tree-graph upper bound on |Ursell|:
/// Σ_τ exp(−β Σ_{E_{M(τ)}\E_τ⁺} V) · Π_{E_τ}(1 − e^{−β|V|}),
/// with E_τ⁺ the non-negative-energy tree edges.
pub fn corollary_bound(
    p: &PairPotential,
    beta: f64,
    c: &Configuration,
) -> Result<f64, UrsellError> {
    tree_sweep(p, beta, c, EdgeOrder::Lexicographic, |data, table, tau| {
        let prod = EdgeData::product(&data.hat, tau.edge_set().bits());
        if prod == 0.0 {
            return 0.0;
        }
        let m = scheme::build_m(tau, table);
        let plus = scheme::positive_edges(tau, table);
        prod * data.boltzmann_over(beta, m.edges.bits() & !plus.bits())
    })
}

/// Stability-constant form of the bound: e^{βBn} Σ_τ Π_{E_τ}(1 − e^{−β|V|}).
/// B is passed explicitly so tests can probe invalid values.
pub fn prop1_bound(
    p: &PairPotential,
    beta: f64,
    c: &Configuration,
    b: f64,
) -> Result<f64, UrsellError> {
    let n = c.n();
    let sum = tree_sweep(p, beta, c, EdgeOrder::Lexicographic, |data, _, tau| {
        EdgeData::product(&data.hat, tau.edge_set().bits())
    })?;
    Ok((beta * b * n as f64).exp() * sum)
}

fn tree_sweep<F>(
    p: &PairPotential,
    beta: f64,
    c: &Configuration,
    order: EdgeOrder,
    term: F,
) -> Result<f64, UrsellError>
where
    F: Fn(&EdgeData, &WeightTable, &graphs::Tree) -> f64 + Sync,
{
    let n = c.n();
    if !(2..=MAX_TREE_SUM_N).contains(&n) {
        return Err(UrsellError::NOutOfRange {
            n,
            max: MAX_TREE_SUM_N,
        });
    }
    let data = EdgeData::build(p, beta, c)?;
    let table = WeightTable::from_configuration(p, c)?.with_order(order);
    let parts = exec::chunked(graphs::tree_count(n), |range| {
        let mut acc = Neumaier::new();
        for idx in range {
            let tau = graphs::tree_from_index(n, idx);
            acc.add(term(&data, &table, &tau));
        }
        acc
    });
    Ok(merge(parts))
}

/// All three evaluations of one configuration, with the identity residual.
#[derive(Clone, Debug, Serialize)]
pub struct UrsellEvaluation {
    pub n: usize,
    pub beta: f64,
    pub lhs_direct: f64,
    pub rhs_identity: f64,
    pub corollary_bound: f64,
    pub prop1_bound: f64,
    /// |lhs − rhs| / max(1, |lhs|).
    pub rel_discrepancy: f64,
}

impl UrsellEvaluation {
    /// |direct| ≤ corollary ≤ stability-form bound (valid B assumed). The
    /// tiny slack absorbs floating-point rounding of sums that are equal on
    /// paper (e.g. full hard-core overlap).
    pub fn chain_ok(&self) -> bool {
        let slack = 1e-12 * self.prop1_bound.abs().max(1.0);
        self.lhs_direct.abs() <= self.corollary_bound + slack
            && self.corollary_bound <= self.prop1_bound + slack
    }
}

/// Evaluate a configuration all three ways (n ≤ 7, the direct-sum cap).
pub fn evaluate(
    p: &PairPotential,
    beta: f64,
    c: &Configuration,
    b: f64,
) -> Result<UrsellEvaluation, UrsellError> {
    let lhs_direct = ursell_direct(p, beta, c)?;
    let rhs_identity = penrose_rhs(p, beta, c)?;
    let corollary = corollary_bound(p, beta, c)?;
    let prop1 = prop1_bound(p, beta, c, b)?;
    Ok(UrsellEvaluation {
        n: c.n(),
        beta,
        lhs_direct,
        rhs_identity,
        corollary_bound: corollary,
        prop1_bound: prop1,
        rel_discrepancy: (lhs_direct - rhs_identity).abs() / lhs_direct.abs().max(1.0),
    })
}

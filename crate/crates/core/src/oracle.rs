//! Ground truth by exhaustive enumeration: weights, partition functions,
//! event probabilities, root-connectivity splits, restricted total-variation
//! distances, and exact spectral gaps of the Glauber chain on tiny instances.
//!
//! All weights are carried in log space with compensated summation, since
//! q^c spans many orders of magnitude at large q. Enumeration is guarded at
//! 24 edges (16 for spectral gaps) with explicit capacity errors.

use crate::boundary::BoundaryCondition;
use crate::configuration::Configuration;
use crate::error::{Error, Result};
use crate::params::RCParams;
use crate::topology::{EdgeId, Graph, VertexId};
use crate::unionfind::UnionFind;

pub const ENUMERATION_GUARD: usize = 24;
pub const SPECTRAL_GUARD: usize = 16;

/// Kahan compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Streaming log-sum-exp with compensated summation of the rescaled terms.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    acc: KahanSum,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            acc: KahanSum::default(),
        }
    }
}

impl LogSumExp {
    pub fn add(&mut self, logw: f64) {
        if logw == f64::NEG_INFINITY {
            return;
        }
        if logw > self.max {
            if self.max > f64::NEG_INFINITY {
                let scale = (self.max - logw).exp();
                let rescaled = self.acc.value() * scale;
                self.acc = KahanSum::default();
                self.acc.add(rescaled);
            }
            self.max = logw;
        }
        self.acc.add((logw - self.max).exp());
    }
    pub fn log_value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.acc.value().ln()
        }
    }
}

fn guard(g: &Graph, cap: usize, what: &str) -> Result<()> {
    if g.edge_count() > cap {
        return Err(Error::capacity(format!(
            "{what}: {} edges exceeds the enumeration guard of {cap}",
            g.edge_count()
        )));
    }
    Ok(())
}

/// Number of connected components of (V, A) after merging the boundary blocks
/// and the root / v* wirings.
pub fn component_count(g: &Graph, bc: &BoundaryCondition, a: &Configuration) -> Result<usize> {
    a.check_len(g.edge_count(), "component_count")?;
    let pairs = bc.wiring_pairs(g.root())?;
    let mut uf = UnionFind::new(g.vertex_count());
    for (x, y) in &pairs {
        uf.union(*x, *y);
    }
    for eid in a.iter_open() {
        let (u, v) = g.edge(eid);
        uf.union(u, v);
    }
    Ok(uf.component_count())
}

/// Enumeration context reused across the exact computations.
struct Enumerator<'a> {
    g: &'a Graph,
    params: RCParams,
    wiring: Vec<(VertexId, VertexId)>,
    log_p: f64,
    log_1p: f64,
    log_q: f64,
}

impl<'a> Enumerator<'a> {
    fn new(g: &'a Graph, bc: &BoundaryCondition, params: RCParams) -> Result<Self> {
        Ok(Enumerator {
            g,
            params,
            wiring: bc.wiring_pairs(g.root())?,
            log_p: params.p.ln(),
            log_1p: (1.0 - params.p).ln(),
            log_q: params.q.ln(),
        })
    }

    fn log_weight_of_mask(&self, mask: u64, uf: &mut UnionFind) -> f64 {
        uf.reset();
        for (x, y) in &self.wiring {
            uf.union(*x, *y);
        }
        let m = self.g.edge_count();
        let mut open = 0u32;
        for eid in 0..m {
            if (mask >> eid) & 1 == 1 {
                let (u, v) = self.g.edge(eid);
                uf.union(u, v);
                open += 1;
            }
        }
        let c = uf.component_count() as f64;
        open as f64 * self.log_p + (m as f64 - open as f64) * self.log_1p + c * self.log_q
    }

    fn for_each_config(&self, mut f: impl FnMut(u64, f64)) {
        let m = self.g.edge_count();
        let mut uf = UnionFind::new(self.g.vertex_count());
        for mask in 0u64..(1u64 << m) {
            f(mask, self.log_weight_of_mask(mask, &mut uf));
        }
    }
}

/// log of the partition function Z over all configurations.
pub fn partition_function(g: &Graph, bc: &BoundaryCondition, params: RCParams) -> Result<f64> {
    guard(g, ENUMERATION_GUARD, "partition_function")?;
    let en = Enumerator::new(g, bc, params)?;
    let mut lse = LogSumExp::default();
    en.for_each_config(|_, lw| lse.add(lw));
    Ok(lse.log_value())
}

/// Probability of an event, a predicate over configurations.
pub fn event_probability(
    g: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
    event: impl Fn(&Configuration) -> bool,
) -> Result<f64> {
    guard(g, ENUMERATION_GUARD, "event_probability")?;
    let en = Enumerator::new(g, bc, params)?;
    let m = g.edge_count();
    let mut total = LogSumExp::default();
    let mut hit = LogSumExp::default();
    en.for_each_config(|mask, lw| {
        total.add(lw);
        if event(&Configuration::from_mask(mask, m)) {
            hit.add(lw);
        }
    });
    let lv = hit.log_value();
    if lv == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((lv - total.log_value()).exp())
}

/// Marginal probability that edge `e` is open.
pub fn edge_marginal(g: &Graph, bc: &BoundaryCondition, params: RCParams, e: EdgeId) -> Result<f64> {
    event_probability(g, bc, params, |a| a.get(e))
}

/// Splits log Z by whether vertex `v` is connected to the wired class C1.
/// Returns (log Z0, log Z1); Z1 may be zero (log = -inf).
pub fn z_split_root(
    g: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
    v: VertexId,
) -> Result<(f64, f64)> {
    guard(g, ENUMERATION_GUARD, "z_split_root")?;
    if !bc.is_single_component() {
        return Err(Error::validation(
            "z_split_root requires a single-component boundary condition",
        ));
    }
    let class = bc.c1_with_pins(g.root())?;
    if class.is_empty() {
        // no wired class anywhere: v ~ C1 is impossible, Z1 = 0
        let lz = partition_function(g, bc, params)?;
        return Ok((lz, f64::NEG_INFINITY));
    }
    let rep = class[0];
    let en = Enumerator::new(g, bc, params)?;
    let mut z0 = LogSumExp::default();
    let mut z1 = LogSumExp::default();
    let mut uf = UnionFind::new(g.vertex_count());
    let m = g.edge_count();
    for mask in 0u64..(1u64 << m) {
        let lw = en.log_weight_of_mask(mask, &mut uf);
        // the union-find still holds this configuration's connectivity
        if uf.connected(v, rep) {
            z1.add(lw);
        } else {
            z0.add(lw);
        }
    }
    Ok((z0.log_value(), z1.log_value()))
}

/// The message value q Z1/Z0 + 1 at vertex `v`, straight from the oracle.
pub fn message_from_oracle(
    g: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
    v: VertexId,
) -> Result<f64> {
    let (lz0, lz1) = z_split_root(g, bc, params, v)?;
    if lz1 == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    Ok(params.q * (lz1 - lz0).exp() + 1.0)
}

/// Per-configuration log-weights and normalized probabilities.
pub struct MeasureTable {
    pub log_weights: Vec<f64>,
    pub probs: Vec<f64>,
    pub log_z: f64,
}

pub fn measure_table(g: &Graph, bc: &BoundaryCondition, params: RCParams) -> Result<MeasureTable> {
    guard(g, 20, "measure_table")?;
    let en = Enumerator::new(g, bc, params)?;
    let m = g.edge_count();
    let mut log_weights = Vec::with_capacity(1usize << m);
    let mut lse = LogSumExp::default();
    en.for_each_config(|_, lw| {
        log_weights.push(lw);
        lse.add(lw);
    });
    let log_z = lse.log_value();
    let probs: Vec<f64> = log_weights.iter().map(|lw| (lw - log_z).exp()).collect();
    Ok(MeasureTable {
        log_weights,
        probs,
        log_z,
    })
}

/// Total-variation distance between the marginals of two boundary conditions
/// on an edge subset.
pub fn tv_restricted(
    g: &Graph,
    bc1: &BoundaryCondition,
    bc2: &BoundaryCondition,
    params: RCParams,
    lambda: &[EdgeId],
) -> Result<f64> {
    guard(g, 20, "tv_restricted")?;
    if lambda.len() > 20 {
        return Err(Error::capacity("tv_restricted: marginal set too large"));
    }
    if lambda.is_empty() {
        return Ok(0.0);
    }
    let t1 = measure_table(g, bc1, params)?;
    let t2 = measure_table(g, bc2, params)?;
    let buckets = 1usize << lambda.len();
    let mut m1 = vec![0.0f64; buckets];
    let mut m2 = vec![0.0f64; buckets];
    let m = g.edge_count();
    for mask in 0..(1usize << m) {
        let mut key = 0usize;
        for (j, &e) in lambda.iter().enumerate() {
            if (mask >> e) & 1 == 1 {
                key |= 1 << j;
            }
        }
        m1[key] += t1.probs[mask];
        m2[key] += t2.probs[mask];
    }
    let mut acc = KahanSum::default();
    for k in 0..buckets {
        acc.add((m1[k] - m2[k]).abs());
    }
    Ok(0.5 * acc.value())
}

/// One row of the exact single-edge heat-bath transition matrix: from state
/// `mask`, picking each edge uniformly and resampling it with the cut-edge
/// rule. Returns (next_mask, probability) pairs, aggregated.
fn transition_row(
    g: &Graph,
    wiring: &[(VertexId, VertexId)],
    params: RCParams,
    mask: u64,
) -> Vec<(u64, f64)> {
    let m = g.edge_count();
    let pick = 1.0 / m as f64;
    let mut out: std::collections::HashMap<u64, f64> = std::collections::HashMap::new();
    for e in 0..m {
        let rest = mask & !(1u64 << e);
        let mut uf = UnionFind::new(g.vertex_count());
        for &(x, y) in wiring {
            uf.union(x, y);
        }
        for eid in 0..m {
            if (rest >> eid) & 1 == 1 {
                let (u, v) = g.edge(eid);
                uf.union(u, v);
            }
        }
        let (u, v) = g.edge(e);
        let cut = !uf.connected(u, v);
        let p_open = if cut { params.p_hat() } else { params.p };
        *out.entry(rest | (1u64 << e)).or_insert(0.0) += pick * p_open;
        *out.entry(rest).or_insert(0.0) += pick * (1.0 - p_open);
    }
    out.into_iter().collect()
}

/// Exact conditional probability that edge `e` is open given the rest of the
/// configuration: p_hat when `e` is a cut edge, p otherwise.
pub fn conditional_edge_probability(
    g: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
    mask_rest: u64,
    e: EdgeId,
) -> Result<f64> {
    let wiring = bc.wiring_pairs(g.root())?;
    let mut uf = UnionFind::new(g.vertex_count());
    for (x, y) in &wiring {
        uf.union(*x, *y);
    }
    for eid in 0..g.edge_count() {
        if eid != e && (mask_rest >> eid) & 1 == 1 {
            let (u, v) = g.edge(eid);
            uf.union(u, v);
        }
    }
    let (u, v) = g.edge(e);
    Ok(if uf.connected(u, v) {
        params.p
    } else {
        params.p_hat()
    })
}

/// Maximum detailed-balance violation |pi(x)P(x,y) - pi(y)P(y,x)| over all
/// state pairs of the exact Glauber matrix.
pub fn detailed_balance_violation(
    g: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
) -> Result<f64> {
    guard(g, SPECTRAL_GUARD, "detailed_balance_violation")?;
    let table = measure_table(g, bc, params)?;
    let wiring = bc.wiring_pairs(g.root())?;
    let mut worst: f64 = 0.0;
    let m = g.edge_count();
    for mask in 0u64..(1u64 << m) {
        for (next, prob) in transition_row(g, &wiring, params, mask) {
            if next == mask {
                continue;
            }
            let fwd = table.probs[mask as usize] * prob;
            let back_prob = transition_row(g, &wiring, params, next)
                .into_iter()
                .find(|&(s, _)| s == mask)
                .map(|(_, p)| p)
                .unwrap_or(0.0);
            let bwd = table.probs[next as usize] * back_prob;
            worst = worst.max((fwd - bwd).abs());
        }
    }
    Ok(worst)
}

/// Spectral gap 1 - lambda_2 of the single-edge heat-bath chain
/// (uniform edge choice, cut-edge update rule). Verifies reversibility first.
pub fn spectral_gap_exact(g: &Graph, bc: &BoundaryCondition, params: RCParams) -> Result<f64> {
    guard(g, SPECTRAL_GUARD, "spectral_gap_exact")?;
    let m = g.edge_count();
    let states = 1usize << m;
    let table = measure_table(g, bc, params)?;
    let wiring = bc.wiring_pairs(g.root())?;

    let db = detailed_balance_violation(g, bc, params)?;
    if db > 1e-10 {
        return Err(Error::consistency(format!(
            "detailed balance violated by {db:.3e}"
        )));
    }

    // Symmetrized kernel S = D^{1/2} P D^{-1/2}; same spectrum as P.
    let sqrt_pi: Vec<f64> = table.probs.iter().map(|p| p.sqrt()).collect();
    let rows: Vec<Vec<(u64, f64)>> = (0..states as u64)
        .map(|mask| transition_row(g, &wiring, params, mask))
        .collect();

    if states <= 4096 {
        let mut s = nalgebra::DMatrix::<f64>::zeros(states, states);
        for (x, row) in rows.iter().enumerate() {
            for &(y, p) in row {
                s[(x, y as usize)] += sqrt_pi[x] * p / sqrt_pi[y as usize];
            }
        }
        // enforce exact symmetry against round-off before decomposing
        let s = (s.clone() + s.transpose()) * 0.5;
        let eig = s.symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let lambda2 = ev.get(1).copied().unwrap_or(0.0);
        Ok(1.0 - lambda2)
    } else {
        // Deflated power iteration. Each single-edge heat-bath update is a
        // conditional expectation, so P is positive semidefinite in L2(pi)
        // and the iteration converges to lambda_2 from below.
        let matvec = |v: &[f64], out: &mut [f64]| {
            out.iter_mut().for_each(|x| *x = 0.0);
            for (x, row) in rows.iter().enumerate() {
                for &(y, p) in row {
                    out[x] += sqrt_pi[x] * p / sqrt_pi[y as usize] * v[y as usize];
                }
            }
        };
        let top: Vec<f64> = sqrt_pi.clone();
        let top_norm: f64 = top.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut v: Vec<f64> = (0..states)
            .map(|i| ((i as f64) * 0.7548776662 + 0.1).sin())
            .collect();
        let mut w = vec![0.0; states];
        let mut lambda2 = 0.0;
        for iter in 0..200_000 {
            // project out the top eigenvector
            let dot: f64 = v.iter().zip(&top).map(|(a, b)| a * b).sum::<f64>() / (top_norm * top_norm);
            for i in 0..states {
                v[i] -= dot * top[i];
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-300 {
                return Ok(1.0);
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
            matvec(&v, &mut w);
            let new_lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            std::mem::swap(&mut v, &mut w);
            if iter > 16 && (new_lambda - lambda2).abs() < 1e-13 {
                lambda2 = new_lambda;
                break;
            }
            lambda2 = new_lambda;
        }
        Ok(1.0 - lambda2)
    }
}

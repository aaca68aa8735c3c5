//! The analytic core: the one-step message map Phi and its d-fold power g,
//! thresholds p_s and p_u, fixed points and regime classification, the decay
//! rate beta* = g'(y*), message propagation on trees, the cycle-gadget update,
//! and the sharper large-q decay facts.

use crate::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::params::RCParams;
use crate::topology::{Graph, VertexId};
use serde::Serialize;

/// A message value in [1, oo) or the symbolic value +oo.
///
/// Infinity collapses to the finite value 1/(1-p) at the first Phi
/// application, so products never touch floating-point infinities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Message {
    Finite(f64),
    Infinite,
}

impl Message {
    pub fn value(&self) -> f64 {
        match self {
            Message::Finite(x) => *x,
            Message::Infinite => f64::INFINITY,
        }
    }
    pub fn is_infinite(&self) -> bool {
        matches!(self, Message::Infinite)
    }
}

/// Phi(x) = (x + (q-1)(1-p)) / ((1-p)x + p + (q-1)(1-p)); Phi(oo) = 1/(1-p).
pub fn phi(x: Message, params: RCParams) -> Result<f64> {
    let (p, q) = (params.p, params.q);
    match x {
        Message::Infinite => Ok(1.0 / (1.0 - p)),
        Message::Finite(x) => {
            if x < 1.0 {
                return Err(Error::validation(format!("phi domain is [1, oo), got {x}")));
            }
            Ok((x + (q - 1.0) * (1.0 - p)) / ((1.0 - p) * x + p + (q - 1.0) * (1.0 - p)))
        }
    }
}

/// g(y) = Phi(y)^d and its derivative in closed form.
pub fn g_and_derivative(y: f64, params: RCParams, d: u32) -> Result<(f64, f64)> {
    if y < 1.0 {
        return Err(Error::validation(format!("g domain is [1, oo), got {y}")));
    }
    let (p, q) = (params.p, params.q);
    let d = d as f64;
    let phi_y = (y + (q - 1.0) * (1.0 - p)) / ((1.0 - p) * y + p + (q - 1.0) * (1.0 - p));
    let g = phi_y.powf(d);
    let denom = (1.0 - p) * y + p + (q - 1.0) * (1.0 - p);
    let gp = d * p * phi_y.powf(d - 1.0) * (1.0 + (q - 1.0) * (1.0 - p)) / (denom * denom);
    Ok((g, gp))
}

fn g(y: f64, params: RCParams, d: u32) -> f64 {
    g_and_derivative(y, params, d).expect("y >= 1").0
}

/// Classification of (p, q, Delta) relative to the two thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    BelowPu,
    Between,
    AbovePs,
    AtPu,
    AtPs,
    /// q <= 2 at the single critical point p_u = p_s.
    QLe2Critical,
}

/// Fixed points of g on [1, oo) with regime classification.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub fixed_points: Vec<f64>,
    pub regime: Regime,
    pub y_star: Option<f64>,
    /// g'(y*), the weak-spatial-mixing decay rate, when y* exists.
    pub beta_star: Option<f64>,
    pub p_s: f64,
    pub p_u: f64,
    pub p_hat: f64,
}

const BOUNDARY_TOL: f64 = 1e-7;
const ROOT_TOL: f64 = 1e-12;
const DEDUP_RADIUS: f64 = 1e-10;
const GRID_POINTS: usize = 256;

/// Closed-form p_s and numeric p_u for the pair (q, Delta).
///
/// p_u is located by outer bisection on p (tolerance 1e-9) of the criterion
/// sup_{y>1} (g(y) - y) <= 0, with the inner maximization over
/// (1, (1-p)^{-d}] exploiting the single interior maximum of g(y) - y.
/// For q <= 2 the two thresholds coincide and p_s is returned.
pub fn thresholds(q: f64, delta: u32) -> Result<(f64, f64)> {
    if q <= 1.0 {
        return Err(Error::validation("thresholds require q > 1"));
    }
    if delta < 3 {
        return Err(Error::validation("thresholds require Delta >= 3"));
    }
    let p_s = RCParams::p_s(q, delta);
    if q <= 2.0 {
        return Ok((p_s, p_s));
    }
    let d = delta - 1;
    let sup_h = |p: f64| -> f64 {
        let params = RCParams { p, q };
        let y_max = (1.0 - p).powi(-(d as i32));
        // coarse scan for the interior maximum of h(y) = g(y) - y
        let mut best = f64::NEG_INFINITY;
        let mut best_i = 0;
        for i in 1..=GRID_POINTS {
            let y = 1.0 + (y_max - 1.0) * i as f64 / GRID_POINTS as f64;
            let h = g(y, params, d) - y;
            if h > best {
                best = h;
                best_i = i;
            }
        }
        // golden-section refinement around the best grid point
        let lo = 1.0 + (y_max - 1.0) * (best_i.saturating_sub(1)) as f64 / GRID_POINTS as f64;
        let hi = 1.0 + (y_max - 1.0) * (best_i + 1).min(GRID_POINTS) as f64 / GRID_POINTS as f64;
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - gr * (b - a);
        let mut dd = a + gr * (b - a);
        for _ in 0..200 {
            let fc = g(c, params, d) - c;
            let fd = g(dd, params, d) - dd;
            if fc > fd {
                b = dd;
            } else {
                a = c;
            }
            c = b - gr * (b - a);
            dd = a + gr * (b - a);
            if (b - a).abs() < 1e-14 * y_max {
                break;
            }
        }
        let y = 0.5 * (a + b);
        best.max(g(y, params, d) - y)
    };
    // bracket: sup_h < 0 well below p_s, sup_h > 0 at p_s (for q > 2)
    let mut lo = 1e-9;
    let mut hi = p_s;
    if sup_h(hi) <= 0.0 {
        return Err(Error::numeric(
            "p_u bisection: criterion non-positive at p_s, expected positive for q > 2",
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sup_h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    if hi - lo > 1e-8 {
        return Err(Error::numeric(format!(
            "p_u bisection failed to converge: bracket [{lo}, {hi}]"
        )));
    }
    Ok((p_s, 0.5 * (lo + hi)))
}

fn scan_roots(params: RCParams, d: u32, y_max: f64, grid: usize) -> Vec<f64> {
    let h = |y: f64| g(y, params, d) - y;
    let mut roots = vec![1.0f64]; // always a fixed point
    let mut prev_y = 1.0;
    let mut prev_h = 0.0;
    for i in 1..=grid {
        let y = 1.0 + (y_max - 1.0) * i as f64 / grid as f64;
        let hy = h(y);
        if hy == 0.0 {
            roots.push(y);
        } else if prev_h * hy < 0.0 {
            let (mut a, mut b) = (prev_y, y);
            let mut ha = prev_h;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let hm = h(m);
                if hm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if ha * hm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    ha = hm;
                }
                if b - a < ROOT_TOL * b.max(1.0) {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_y = y;
        prev_h = hy;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < DEDUP_RADIUS * a.max(1.0));
    roots
}

/// Locates all fixed points of g on [1, (1-p)^{-d}] and classifies the regime.
pub fn fixed_points(params: RCParams, d: u32) -> Result<FixedPointReport> {
    if params.q <= 1.0 {
        return Err(Error::validation("fixed_points requires q > 1"));
    }
    let delta = d + 1;
    let (p_s, p_u) = thresholds(params.q, delta)?;
    let p = params.p;
    let y_max = (1.0 - p).powi(-(d as i32));

    // near-tangency: within 1e-7 of a threshold, report the boundary regime
    // rather than a root count from noisy brackets
    let regime = if (p - p_s).abs() < BOUNDARY_TOL && params.q <= 2.0 {
        Regime::QLe2Critical
    } else if (p - p_s).abs() < BOUNDARY_TOL {
        Regime::AtPs
    } else if (p - p_u).abs() < BOUNDARY_TOL && params.q > 2.0 {
        Regime::AtPu
    } else if p > p_s {
        Regime::AbovePs
    } else if params.q > 2.0 && p > p_u {
        Regime::Between
    } else {
        Regime::BelowPu
    };

    let expected = match regime {
        Regime::BelowPu | Regime::QLe2Critical => 1,
        Regime::Between => 3,
        Regime::AbovePs => 2,
        Regime::AtPu | Regime::AtPs => 2,
    };

    // sign-bracketed bisection on a grid; escalate the density if a regime
    // with a known count disagrees (close root pairs need finer cells)
    let mut roots = scan_roots(params, d, y_max, GRID_POINTS);
    let mut grid = GRID_POINTS;
    while matches!(regime, Regime::BelowPu | Regime::Between | Regime::AbovePs)
        && roots.len() != expected
        && grid < 2_000_000
    {
        grid *= 16;
        roots = scan_roots(params, d, y_max, grid);
    }
    if matches!(regime, Regime::BelowPu | Regime::Between | Regime::AbovePs)
        && roots.len() != expected
    {
        return Err(Error::consistency(format!(
            "regime {regime:?} expects {expected} fixed points, found {}: {roots:?}",
            roots.len()
        )));
    }

    // y*, the largest fixed point, for p >= p_s. Monotone iteration from
    // y0 = (1-p)^{-d} decreases to y*; the bisected scan root is an
    // independent bracket used as a safeguard, then Newton polishes to 1e-12.
    let has_y_star = match regime {
        Regime::AbovePs => true,
        Regime::AtPs => params.q > 2.0,
        _ => false,
    };
    let (y_star, beta_star) = if has_y_star {
        let scan_root = roots
            .last()
            .copied()
            .filter(|&r| r > 1.0 + DEDUP_RADIUS)
            .ok_or_else(|| Error::consistency("no nontrivial scan root above p_s"))?;
        let mut y = y_max;
        for _ in 0..10_000 {
            let next = g(y, params, d);
            if (y - next).abs() < 1e-15 * y.max(1.0) {
                y = next;
                break;
            }
            y = next;
        }
        // the iteration approaches y* from above
        if y < scan_root - 1e-6 * scan_root {
            return Err(Error::consistency(format!(
                "monotone iteration ({y}) undershot the bisected fixed point ({scan_root})"
            )));
        }
        let mut y = scan_root;
        for _ in 0..60 {
            let (gy, gpy) = g_and_derivative(y, params, d)?;
            let step = (gy - y) / (gpy - 1.0);
            let next = y - step;
            if !(1.0 + DEDUP_RADIUS..=y_max * (1.0 + 1e-9)).contains(&next) {
                break;
            }
            y = next;
            if step.abs() < 1e-15 * y.max(1.0) {
                break;
            }
        }
        let (_, gp) = g_and_derivative(y, params, d)?;
        (Some(y), Some(gp))
    } else {
        (None, None)
    };

    if let (Regime::AbovePs, Some(bs)) = (regime, beta_star) {
        if !(0.0 < bs && bs < 1.0) {
            return Err(Error::consistency(format!(
                "beta* = {bs} outside (0,1) at p > p_s"
            )));
        }
    }

    Ok(FixedPointReport {
        fixed_points: roots,
        regime,
        y_star,
        beta_star,
        p_s,
        p_u,
        p_hat: params.p_hat(),
    })
}

/// Probability that the subtree root joins C1, as a function of its message:
/// (f - 1) / (f + q - 1).
pub fn connect_prob(f: Message, q: f64) -> f64 {
    match f {
        Message::Infinite => 1.0,
        Message::Finite(x) => (x - 1.0) / (x + q - 1.0),
    }
}

/// The pairwise bound q|f1 - f2| / ((f1+q-1)(f2+q-1)) on the difference of
/// connection probabilities.
pub fn connect_prob_difference_bound(f1: f64, f2: f64, q: f64) -> f64 {
    q * (f1 - f2).abs() / ((f1 + q - 1.0) * (f2 + q - 1.0))
}

/// Upward message pass on a rooted tree under a single-component boundary
/// condition. Vertices in C1 (wired leaves, the pinned root, v*) carry the
/// symbolic infinite message; every other childless vertex carries 1.
pub fn propagate_messages(
    tree: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
) -> Result<Vec<Message>> {
    if tree.root().is_none() {
        return Err(Error::validation("propagate_messages requires a rooted graph"));
    }
    if tree.tree_excess() != 0 {
        return Err(Error::validation("propagate_messages requires an acyclic graph"));
    }
    if !bc.is_single_component() {
        return Err(Error::validation(
            "propagate_messages requires a single-component boundary condition",
        ));
    }
    let class = bc.c1_with_pins(tree.root())?;
    let pinned = vec_to_set(&class, tree.vertex_count());
    let mut messages = vec![Message::Finite(1.0); tree.vertex_count()];
    // post-order over the BFS tree
    let order = post_order(tree);
    for &v in &order {
        if pinned[v] {
            messages[v] = Message::Infinite;
            continue;
        }
        let children = tree.children(v);
        if children.is_empty() {
            messages[v] = Message::Finite(1.0);
            continue;
        }
        let mut prod = 1.0f64;
        for (w, _) in children {
            prod *= phi(messages[w], params)?;
        }
        messages[v] = Message::Finite(prod);
    }
    Ok(messages)
}

fn vec_to_set(vs: &[VertexId], n: usize) -> Vec<bool> {
    let mut set = vec![false; n];
    for &v in vs {
        if v < n {
            set[v] = true;
        }
    }
    set
}

fn post_order(tree: &Graph) -> Vec<VertexId> {
    let root = tree.root().unwrap();
    let mut order = Vec::with_capacity(tree.vertex_count());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        for (w, _) in tree.children(v) {
            stack.push(w);
        }
    }
    order.reverse();
    order
}

/// Subtree input to the cycle gadget: the ratio Z1/Z0 of the rooted subtree
/// hanging from a cycle vertex, possibly infinite when that vertex is pinned.
#[derive(Clone, Copy, Debug)]
pub enum SubtreeRatio {
    Finite(f64),
    Infinite,
}

/// Input to the cycle-gadget message update at the topmost cycle vertex w.
///
/// The cycle has `l + 1` edges: (w, w_1), (w_1, w_2), ..., (w_l, w).
/// `subtree_ratios[i]` is Z1/Z0 for the subtree hanging from w_{i+1}, and
/// `off_cycle_messages` are the messages of w's children outside the cycle.
#[derive(Clone, Debug)]
pub struct GadgetInput {
    pub cycle_length_l: usize,
    pub subtree_ratios: Vec<SubtreeRatio>,
    pub off_cycle_messages: Vec<Message>,
    pub params: RCParams,
}

pub const GADGET_CAP: usize = 20;

/// Message at the topmost cycle vertex: f(w) = L * prod Phi(t_j), with
/// L = (Psi_0 + Psi_1)/Psi_0 computed by enumeration of the 2^{l+1}
/// cycle-edge states and the coalescence pattern of the cycle vertices.
pub fn cycle_gadget_message(input: &GadgetInput) -> Result<Message> {
    let l = input.cycle_length_l;
    if l > GADGET_CAP {
        return Err(Error::capacity(format!(
            "cycle length l = {l} exceeds the gadget cap of {GADGET_CAP}"
        )));
    }
    if input.subtree_ratios.len() != l {
        return Err(Error::validation(format!(
            "expected {l} subtree ratios, got {}",
            input.subtree_ratios.len()
        )));
    }
    for m in &input.off_cycle_messages {
        if let Message::Finite(x) = m {
            if *x < 1.0 {
                return Err(Error::validation("off-cycle messages must be >= 1"));
            }
        }
    }
    let params = input.params;
    let (p, q) = (params.p, params.q);

    // Per-subtree weights (n0, n1) in the composable normalization with
    // n1/n0 = q * (Z1/Z0); a pinned subtree is (0, 1).
    let mut n0 = vec![0.0f64; l];
    let mut n1 = vec![0.0f64; l];
    for (i, r) in input.subtree_ratios.iter().enumerate() {
        match r {
            SubtreeRatio::Infinite => {
                n0[i] = 0.0;
                n1[i] = 1.0;
            }
            SubtreeRatio::Finite(r) => {
                if *r < 0.0 {
                    return Err(Error::validation("subtree ratios must be >= 0"));
                }
                let scale = 1.0 + q * r;
                n0[i] = 1.0 / scale;
                n1[i] = q * r / scale;
            }
        }
    }

    // Enumerate the cycle-edge states. Vertices on the cycle are indexed
    // 0 = w, 1..=l = w_1..w_l; edge j < l joins j and j+1, edge l joins l and 0.
    let edges = l + 1;
    let mut psi0 = crate::oracle::KahanSum::default();
    let mut psi1 = crate::oracle::KahanSum::default();
    let mut uf = crate::unionfind::UnionFind::new(l + 1);
    let mut members: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1u32 << edges) {
        uf.reset();
        let mut open = 0u32;
        for j in 0..edges {
            if (mask >> j) & 1 == 1 {
                open += 1;
                if j < l {
                    uf.union(j, j + 1);
                } else {
                    uf.union(l, 0);
                }
            }
        }
        let edge_w = p.powi(open as i32) * (1.0 - p).powi((edges - open) as i32);

        // group cycle vertices by component
        members.clear();
        let mut index_of = vec![usize::MAX; l + 1];
        for v in 0..=l {
            let r = uf.find(v);
            if index_of[r] == usize::MAX {
                index_of[r] = members.len();
                members.push(Vec::new());
            }
            members[index_of[r]].push(v);
        }

        // each component contributes a factor obtained by summing over the
        // wired/unwired statuses of the subtrees hanging from its vertices;
        // a component without w and without any wired subtree is a finished
        // component and earns a factor q
        let w_comp = uf.find(0);
        let mut detached = 1.0f64; // w's component with no wired subtree
        let mut total_w = 1.0f64; // w's component, statuses free
        let mut rest = 1.0f64;
        for comp in &members {
            let in_w = uf.find(comp[0]) == w_comp;
            let mut prod_total = 1.0f64;
            let mut prod_unwired = 1.0f64;
            for &v in comp {
                if v == 0 {
                    continue;
                }
                prod_total *= n0[v - 1] + n1[v - 1];
                prod_unwired *= n0[v - 1];
            }
            if in_w {
                total_w *= prod_total;
                detached *= prod_unwired;
            } else {
                rest *= prod_total + (q - 1.0) * prod_unwired;
            }
        }
        psi0.add(edge_w * detached * rest);
        psi1.add(edge_w * (total_w - detached) * rest);
    }

    let psi0 = psi0.value();
    let psi1 = psi1.value();
    if psi0 <= 0.0 {
        // w connects to the wired class with probability one
        return Ok(Message::Infinite);
    }
    let big_l = (psi0 + psi1) / psi0;
    let mut f = big_l;
    for m in &input.off_cycle_messages {
        f *= phi(*m, params)?;
    }
    Ok(Message::Finite(f))
}

/// Exact root-connection-probability gap at `v` between the all-wired
/// condition and `bc`: two message propagations, no sampling.
pub fn wsm_gap(
    tree: &Graph,
    bc: &BoundaryCondition,
    params: RCParams,
    v: VertexId,
) -> Result<f64> {
    let rerooted = reroot(tree, v)?;
    let leaves: Vec<VertexId> = bc.boundary().to_vec();
    let wired = BoundaryCondition::wired(&leaves)?;
    let f_wired = propagate_messages(&rerooted, &wired, params)?[v];
    let f_bc = propagate_messages(&rerooted, bc, params)?[v];
    Ok((connect_prob(f_wired, params.q) - connect_prob(f_bc, params.q)).abs())
}

/// The same tree rooted at `v` (vertex ids preserved).
pub fn reroot(tree: &Graph, v: VertexId) -> Result<Graph> {
    Graph::new(tree.vertex_count(), tree.edges().to_vec())?.with_root(v)
}

/// Report of the sharper decay bound at p = p_s: beta* against d^{-a}, and
/// the auxiliary polynomial roots r_P, r_Q.
#[derive(Clone, Debug, Serialize)]
pub struct SharperBoundReport {
    pub d: u32,
    pub q: f64,
    pub a: f64,
    pub p_s: f64,
    pub y_star: f64,
    pub beta_star: f64,
    pub d_pow_neg_a: f64,
    pub r_p: f64,
    pub r_q: f64,
    /// |r_Q - y*| <= 1e-8 verified.
    pub r_q_matches_y_star: bool,
    /// beta* < d^{-a}.
    pub holds: bool,
    /// The root-ordering facts are stated for d >= 3.
    pub root_fact_applies: bool,
}

/// Evaluates the sharper decay bound at the worst case p = p_s.
pub fn sharper_bound_check(d: u32, q: f64, a: f64) -> Result<SharperBoundReport> {
    if d < 2 {
        return Err(Error::validation("sharper bound requires d >= 2"));
    }
    if q <= 2.0 {
        return Err(Error::validation("sharper bound requires q > 2"));
    }
    if a < 1.0 {
        return Err(Error::validation("sharper bound requires a >= 1"));
    }
    let delta = d + 1;
    let p_s = RCParams::p_s(q, delta);
    let params = RCParams::new(p_s, q)?;
    let report = fixed_points(params, d)?;
    let y_star = report
        .y_star
        .ok_or_else(|| Error::numeric("no nontrivial fixed point at p_s"))?;
    let beta_star = report.beta_star.unwrap();

    let df = d as f64;
    let big_a = |y: f64| (1.0 - y) + df * (y + q - 1.0);
    let big_b = |y: f64| (df - 1.0) * (q - 1.0) + (df + q - 1.0) * y;
    let poly_p = |y: f64| df.powf(a + 2.0) * q * q * y - y.powf(1.0 / df) * big_a(y).powi(2);
    let poly_q = |y: f64| big_b(y).powf(df) - y * big_a(y).powf(df);

    let r_p = bracketed_root(poly_p, "P")?;
    let r_q = bracketed_root(poly_q, "Q")?;
    let matches = (r_q - y_star).abs() <= 1e-8 * y_star.max(1.0);
    if !matches {
        return Err(Error::consistency(format!(
            "r_Q = {r_q} does not match y* = {y_star}"
        )));
    }
    Ok(SharperBoundReport {
        d,
        q,
        a,
        p_s,
        y_star,
        beta_star,
        d_pow_neg_a: df.powf(-a),
        r_p,
        r_q,
        r_q_matches_y_star: matches,
        holds: beta_star < df.powf(-a),
        root_fact_applies: d >= 3,
    })
}

/// Unique root on (1, oo) of a function positive at 1 and eventually
/// negative: bracket by doubling, then bisect.
fn bracketed_root(f: impl Fn(f64) -> f64, name: &str) -> Result<f64> {
    let at1 = f(1.0 + 1e-12);
    if at1 <= 0.0 {
        return Err(Error::numeric(format!(
            "{name}(1) = {at1} <= 0, cannot bracket the root"
        )));
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut iter = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        iter += 1;
        if iter > 2000 || !hi.is_finite() {
            return Err(Error::numeric(format!("{name}: root bracketing failed")));
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::topology::{build_tree, TreeKind, TreeSpec};

    fn params(p: f64, q: f64) -> RCParams {
        RCParams::new(p, q).unwrap()
    }

    #[test]
    fn phi_examples() {
        for &(p, q) in &[(0.3, 1.5), (0.5, 2.0), (0.85, 3.0)] {
            let pr = params(p, q);
            assert!((phi(Message::Finite(1.0), pr).unwrap() - 1.0).abs() < 1e-15);
        }
        // Phi(oo) at p = 1/2 is 2
        assert!((phi(Message::Infinite, params(0.5, 2.0)).unwrap() - 2.0).abs() < 1e-15);
        // Phi(4) at p = 3/4, q = 3 is 4.5/2.25 = 2
        assert!((phi(Message::Finite(4.0), params(0.75, 3.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!(phi(Message::Finite(0.5), params(0.5, 2.0)).is_err());
    }

    #[test]
    fn g_examples() {
        // g(1) = 1 always
        let (g1, _) = g_and_derivative(1.0, params(0.6, 4.0), 3).unwrap();
        assert!((g1 - 1.0).abs() < 1e-15);
        // g(4; p=3/4, q=3, d=2) = 4: y* = (q-1)^2 at p = p_s
        let (g4, _) = g_and_derivative(4.0, params(0.75, 3.0), 2).unwrap();
        assert!((g4 - 4.0).abs() < 1e-12);
        // g'(1) = 1 exactly at p = p_s, for several (q, Delta)
        for &(q, delta) in &[(2.0, 3u32), (3.0, 3), (10.0, 5)] {
            let ps = RCParams::p_s(q, delta);
            let (_, gp) = g_and_derivative(1.0, params(ps, q), delta - 1).unwrap();
            assert!((gp - 1.0).abs() < 1e-12, "q={q} delta={delta}: g'(1)={gp}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let pr = params(0.8, 5.0);
        for &y in &[1.0, 1.5, 3.0, 10.0] {
            let (_, gp) = g_and_derivative(y, pr, 4).unwrap();
            let h = 1e-6;
            let (gp_hi, _) = g_and_derivative(y + h, pr, 4).unwrap();
            let (gp_lo, _) = g_and_derivative((y - h).max(1.0), pr, 4).unwrap();
            let fd = (gp_hi - gp_lo) / (y + h - (y - h).max(1.0));
            assert!((gp - fd).abs() < 1e-5 * gp.abs().max(1.0), "y={y}: {gp} vs {fd}");
        }
    }

    #[test]
    fn thresholds_examples() {
        let (ps, pu) = thresholds(2.0, 3).unwrap();
        assert!((ps - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(ps, pu);
        let (ps, _) = thresholds(3.0, 3).unwrap();
        assert!((ps - 0.75).abs() < 1e-14);
        // q=10, Delta=5: p_u < p_s and sup h = 0 at p_u within 1e-8
        let (ps, pu) = thresholds(10.0, 5).unwrap();
        assert!(pu < ps);
        let d = 4;
        let sup = |p: f64| {
            let pr = params(p, 10.0);
            let y_max = (1.0 - p).powi(-(d as i32));
            (0..=4096)
                .map(|i| 1.0 + (y_max - 1.0) * i as f64 / 4096.0)
                .map(|y| g(y, pr, d) - y)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        assert!(sup(pu).abs() < 1e-6, "sup h(p_u) = {}", sup(pu));
        assert!(sup(pu + 1e-4) > 0.0);
        assert!(sup(pu - 1e-4) < 0.0);
    }

    #[test]
    fn fixed_point_examples() {
        // p = p_s = 3/4, q=3, d=2: fixed points {1, 4}
        let rep = fixed_points(params(0.75, 3.0), 2).unwrap();
        assert_eq!(rep.regime, Regime::AtPs);
        assert!((rep.y_star.unwrap() - 4.0).abs() < 1e-8);
        // beta* = g'(4) = 8/9
        assert!((rep.beta_star.unwrap() - 8.0 / 9.0).abs() < 1e-10);

        // p = 0.1, q = 10, d = 4: exactly {1}
        let rep = fixed_points(params(0.1, 10.0), 4).unwrap();
        assert_eq!(rep.regime, Regime::BelowPu);
        assert_eq!(rep.fixed_points.len(), 1);

        // p above p_s: two fixed points, beta* in (0,1)
        let rep = fixed_points(params(0.85, 3.0), 2).unwrap();
        assert_eq!(rep.regime, Regime::AbovePs);
        assert_eq!(rep.fixed_points.len(), 2);
        let bs = rep.beta_star.unwrap();
        assert!(bs > 0.0 && bs < 1.0);

        // three fixed points strictly between the thresholds
        let (ps, pu) = thresholds(10.0, 5).unwrap();
        let mid = 0.5 * (ps + pu);
        let rep = fixed_points(params(mid, 10.0), 4).unwrap();
        assert_eq!(rep.regime, Regime::Between);
        assert_eq!(rep.fixed_points.len(), 3);
    }

    #[test]
    fn propagate_examples() {
        let pr = params(0.5, 2.0);
        // height-1 binary tree, both leaves wired: f(root) = Phi(oo)^2 = 4
        let t = Graph::new(3, vec![(0, 1), (0, 2)]).unwrap().with_root(0).unwrap();
        let bc = BoundaryCondition::wired(&[1, 2]).unwrap();
        let f = propagate_messages(&t, &bc, pr).unwrap();
        assert!((f[0].value() - 4.0).abs() < 1e-12);

        // all leaves unwired: f = 1 everywhere
        let free = BoundaryCondition::free(&[1, 2]).unwrap();
        let f = propagate_messages(&t, &free, pr).unwrap();
        assert!(f.iter().all(|m| (m.value() - 1.0).abs() < 1e-15));

        // single-edge tree, leaf wired: f(root) = 2 = q Z1/Z0 + 1 from the oracle
        let e = Graph::new(2, vec![(0, 1)]).unwrap().with_root(0).unwrap();
        let bc1 = BoundaryCondition::wired(&[1]).unwrap();
        let f = propagate_messages(&e, &bc1, pr).unwrap();
        assert!((f[0].value() - 2.0).abs() < 1e-12);
        let from_oracle = oracle::message_from_oracle(&e, &bc1, pr, 0).unwrap();
        assert!((f[0].value() - from_oracle).abs() < 1e-12);
    }

    #[test]
    fn propagate_rejects_cycles() {
        let cyc = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .with_root(0)
            .unwrap();
        let bc = BoundaryCondition::free(&[1, 2]).unwrap();
        assert!(propagate_messages(&cyc, &bc, params(0.5, 2.0)).is_err());
    }

    #[test]
    fn connect_prob_examples() {
        assert_eq!(connect_prob(Message::Finite(1.0), 2.0), 0.0);
        assert_eq!(connect_prob(Message::Infinite, 2.0), 1.0);
        // f = 4, q = 2: 3/5; matches the oracle on the wired height-1 tree
        assert!((connect_prob(Message::Finite(4.0), 2.0) - 0.6).abs() < 1e-15);
        let t = Graph::new(3, vec![(0, 1), (0, 2)]).unwrap().with_root(0).unwrap();
        let bc = BoundaryCondition::wired(&[1, 2]).unwrap();
        let pr = params(0.5, 2.0);
        let p_conn = oracle::event_probability(&t, &bc, pr, |_| true).unwrap();
        assert!((p_conn - 1.0).abs() < 1e-12);
        let (lz0, lz1) = oracle::z_split_root(&t, &bc, pr, 0).unwrap();
        let direct = lz1.exp() / (lz0.exp() + lz1.exp());
        assert!((direct - 0.6).abs() < 1e-12);
    }

    #[test]
    fn gadget_triangle_example() {
        // triangle: root w, children u and v both wired leaves, p=1/2, q=2
        let input = GadgetInput {
            cycle_length_l: 2,
            subtree_ratios: vec![SubtreeRatio::Infinite, SubtreeRatio::Infinite],
            off_cycle_messages: vec![],
            params: params(0.5, 2.0),
        };
        let f = cycle_gadget_message(&input).unwrap();
        assert!((f.value() - 3.5).abs() < 1e-12, "got {:?}", f);
    }

    #[test]
    fn gadget_all_zero_ratios() {
        // no subtree reaches C1: Psi_1 = 0, f(w) = prod Phi(T) with L = 1
        let pr = params(0.6, 3.0);
        let input = GadgetInput {
            cycle_length_l: 3,
            subtree_ratios: vec![SubtreeRatio::Finite(0.0); 3],
            off_cycle_messages: vec![Message::Finite(1.7)],
            params: pr,
        };
        let f = cycle_gadget_message(&input).unwrap();
        let expect = phi(Message::Finite(1.7), pr).unwrap();
        assert!((f.value() - expect).abs() < 1e-12);
    }

    #[test]
    fn gadget_cap() {
        let input = GadgetInput {
            cycle_length_l: 21,
            subtree_ratios: vec![SubtreeRatio::Finite(0.0); 21],
            off_cycle_messages: vec![],
            params: params(0.5, 2.0),
        };
        assert!(matches!(
            cycle_gadget_message(&input),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn wsm_gap_wired_is_zero() {
        let t = build_tree(&TreeSpec::new(TreeKind::DAry, 3, 3, None)).unwrap();
        let leaves = t.leaves();
        let wired = BoundaryCondition::wired(&leaves).unwrap();
        let gap = wsm_gap(&t, &wired, params(0.85, 3.0), 0).unwrap();
        assert_eq!(gap, 0.0);
        // zero wired leaves: gap equals the wired connection probability itself
        let free = BoundaryCondition::free(&leaves).unwrap();
        let gap = wsm_gap(&t, &free, params(0.85, 3.0), 0).unwrap();
        let f = propagate_messages(&t, &wired, params(0.85, 3.0)).unwrap()[0];
        assert!((gap - connect_prob(f, 3.0)).abs() < 1e-15);
    }

    #[test]
    fn sharper_bound_d2_closed_form() {
        // d=2, q=9, a=1: beta* = 4*8/81 = 32/81 < 1/2
        let rep = sharper_bound_check(2, 9.0, 1.0).unwrap();
        assert!((rep.beta_star - 32.0 / 81.0).abs() < 1e-9);
        assert!(rep.holds);
        assert!((rep.y_star - 64.0).abs() < 1e-6); // (q-1)^2
    }

    #[test]
    fn sharper_bound_root_ordering() {
        // d=3, q=16, a=1 is in the q >= 3^{3/2} d regime: r_P < r_Q
        let rep = sharper_bound_check(3, 16.0, 1.0).unwrap();
        assert!(rep.root_fact_applies);
        assert!(rep.r_p < rep.r_q, "r_P={} r_Q={}", rep.r_p, rep.r_q);
        assert!(rep.r_q_matches_y_star);
    }

    #[test]
    fn y_star_monotone_in_p() {
        // y*(p) strictly increasing on (p_s, 1)
        let q = 4.0;
        let d = 3;
        let ps = RCParams::p_s(q, d + 1);
        let mut prev = 0.0;
        for i in 1..=20 {
            let p = ps + (0.99 - ps) * i as f64 / 20.0;
            let rep = fixed_points(params(p, q), d).unwrap();
            let ys = rep.y_star.unwrap();
            assert!(ys > prev, "y* not increasing at p={p}");
            prev = ys;
        }
    }
}

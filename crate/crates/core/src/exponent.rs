//! The error exponent
//!
//! ```text
//! E(R,P) = min_{Q : Q̄ = Q̿} D(Q‖P) + |1 − H(Q←|Q̄) − R|⁺
//! ```
//!
//! and the rate threshold `1 − H(P|q)` below which it is positive.
//!
//! # Method
//!
//! The clipped term is `max_{s∈[0,1]} s(1 − R − H)`, and the objective is
//! convex in `Q` and linear in `s`, so the min and max can be swapped:
//!
//! ```text
//! E(R,P) = max_{s∈[0,1]} s(1 − R) + g(s),   g(s) = min_{Q̄=Q̿} D(Q‖P) − s·H(Q←|Q̄).
//! ```
//!
//! With `A_s(u,v) = P(v|u)^{1/(1+s)}`, the inner problem is a Donsker–Varadhan
//! variational problem: `g(s) = −(1+s) log_d ρ(A_s)` where `ρ` is the Perron
//! root, and the minimiser is the tilted pair law
//! `Q_s(u,v) ∝ ℓ(u) A_s(u,v) r(v)` built from the left and right Perron vectors
//! of the maximising irreducible block. `g` is concave with supergradient
//! `−H(Q_s)`, so the outer maximisation is a bisection on `1 − R − H(Q_s)`.
//!
//! The answer is certified by evaluating the primal objective at the recovered
//! `Q*` (which has exactly balanced marginals) and reporting the duality gap
//! against the dual value as `kkt_residual`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{conditional_entropy, kl_conditional, log_base, JointDist, TransitionMatrix};
use crate::error::{invalid, Error, Result};
use crate::types::{for_each_realizable, for_each_realizable_from};

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentOptions {
    /// Largest acceptable duality gap, in d-ary units.
    pub tol: f64,
    /// Independent solves from random interior starting points; must be ≥ 1.
    pub restarts: usize,
    pub seed: u64,
    /// Bisection steps on the tilt parameter.
    pub max_iter: usize,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            restarts: 1,
            seed: 0,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentResult {
    /// Rate in d-ary units.
    pub rate: f64,
    pub value: f64,
    /// A minimiser `Q*`.
    pub argmin: JointDist,
    /// Duality gap `objective(Q*) − dual bound`.
    pub kkt_residual: f64,
    /// Optimal tilt parameter `s* ∈ [0, 1]`.
    pub tilt: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// Spread of the optimal values across restarts.
    pub restart_spread: f64,
}

/// `D(Q‖P) + max(1 − H(Q←|Q̄) − R, 0)`; `+∞` whenever `D` is.
pub fn objective(q: &JointDist, p: &TransitionMatrix, rate: f64) -> f64 {
    let div = kl_conditional(q, p);
    if div.is_infinite() {
        return f64::INFINITY;
    }
    div + (1.0 - q.conditional_entropy(p.d()) - rate).max(0.0)
}

/// `1 − H(P|q)` for the stationary `q`, in d-ary units.
pub fn capacity_threshold(p: &TransitionMatrix) -> Result<f64> {
    let q = p.stationary_distribution()?;
    Ok(1.0 - conditional_entropy(p, &q))
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return invalid(format!("rate {rate} outside [0, 1]"));
    }
    Ok(())
}

pub fn exponent(p: &TransitionMatrix, rate: f64, options: &ExponentOptions) -> Result<ExponentResult> {
    check_rate(rate)?;
    if options.restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    let tilter = Tilter::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best: Option<Solve> = None;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for restart in 0..options.restarts {
        let start = if restart == 0 { 0.5 } else { rng.gen_range(0.01..0.99) };
        let solve = solve_once(&tilter, p, rate, start, options.max_iter, &mut rng);
        lo = lo.min(solve.value);
        hi = hi.max(solve.value);
        if best.as_ref().map_or(true, |b| solve.value < b.value) {
            best = Some(solve);
        }
    }
    let best = best.expect("at least one restart");
    let gap = (best.value - best.dual).max(0.0);
    if !(gap <= options.tol) || !best.value.is_finite() {
        return Err(Error::NotConverged {
            best: best.value,
            residual: gap,
        });
    }
    Ok(ExponentResult {
        rate,
        value: best.value,
        argmin: best.argmin,
        kkt_residual: gap,
        tilt: best.tilt,
        iterations: best.iterations,
        restarts: options.restarts,
        restart_spread: hi - lo,
    })
}

/// `E(R,P)` at every rate of `grid`.
pub fn exponent_sweep(p: &TransitionMatrix, grid: &[f64], options: &ExponentOptions) -> Result<Vec<ExponentResult>> {
    grid.iter().map(|&r| exponent(p, r, options)).collect()
}

/// `min_{Q ∈ Q_n} D(Q‖P) + |1 − R − H(Q←|Q̄)|⁺` over the realisable Markov
/// types of length `n`.
///
/// Types charging a forbidden transition have infinite objective, so only
/// count matrices supported on the positive entries of `P` are visited, one
/// weakly connected block of the support graph at a time. A symbol that no
/// allowed transition enters can only open the sequence, so its row carries at
/// most one count and is fixed rather than enumerated.
pub fn exponent_type_oracle(p: &TransitionMatrix, rate: f64, n: usize) -> Result<f64> {
    check_rate(rate)?;
    if n < 2 {
        return invalid(format!("Markov types need n ≥ 2, got {n}"));
    }
    let m = p.m();
    let total = (n - 1) as u32;
    let entered: Vec<bool> = (0..m).map(|v| (0..m).any(|u| p.get(u, v) > 0.0)).collect();
    let mut best = f64::INFINITY;
    let mut score = |counts: &[u32], _: &[usize]| {
        best = best.min(type_objective(p, rate, counts));
    };
    for cells in support_blocks(p) {
        let (openers, inner): (Vec<_>, Vec<_>) = cells.into_iter().partition(|&(u, _)| !entered[u]);
        for_each_realizable(m, total, &inner, &mut score)?;
        for (u, v) in openers {
            let mut base = vec![0u32; m * m];
            base[u * m + v] = 1;
            for_each_realizable_from(&base, m, total - 1, &inner, &mut score)?;
        }
    }
    Ok(best)
}

/// The exponent objective of a count matrix supported on positive entries of `P`.
fn type_objective(p: &TransitionMatrix, rate: f64, counts: &[u32]) -> f64 {
    let m = p.m();
    let mut h_nats = 0.0;
    let mut cross = 0.0;
    let mut steps = 0u32;
    for u in 0..m {
        let row = &counts[u * m..(u + 1) * m];
        let r: u32 = row.iter().sum();
        if r == 0 {
            continue;
        }
        steps += r;
        h_nats += xlogx(r as f64);
        for (v, &c) in row.iter().enumerate() {
            if c > 0 {
                h_nats -= xlogx(c as f64);
                cross -= c as f64 * p.get(u, v).ln();
            }
        }
    }
    let ln_d = log_base(p.d());
    let steps = steps as f64;
    let h = (h_nats / steps / ln_d).max(0.0);
    let div = (cross / steps / ln_d - h).max(0.0);
    div + (1.0 - rate - h).max(0.0)
}

fn xlogx(x: f64) -> f64 {
    x * x.ln()
}

/// Positive-entry cells of `P`, grouped by weakly connected component.
fn support_blocks(p: &TransitionMatrix) -> Vec<Vec<(usize, usize)>> {
    let m = p.m();
    let mut comp: Vec<usize> = (0..m).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    for u in 0..m {
        for v in 0..m {
            if p.get(u, v) > 0.0 {
                let (a, b) = (find(&mut comp, u), find(&mut comp, v));
                comp[a] = b;
            }
        }
    }
    let mut blocks: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for u in 0..m {
        for v in 0..m {
            if p.get(u, v) > 0.0 {
                let root = find(&mut comp, u);
                match blocks.iter_mut().find(|(r, _)| *r == root) {
                    Some((_, cells)) => cells.push((u, v)),
                    None => blocks.push((root, vec![(u, v)])),
                }
            }
        }
    }
    blocks.into_iter().map(|(_, cells)| cells).collect()
}

struct Solve {
    value: f64,
    dual: f64,
    argmin: JointDist,
    tilt: f64,
    iterations: usize,
}

fn solve_once<R: Rng>(
    tilter: &Tilter,
    p: &TransitionMatrix,
    rate: f64,
    start: f64,
    max_iter: usize,
    rng: &mut R,
) -> Solve {
    let d = p.d();
    let seed_vec: Vec<f64> = (0..p.m()).map(|_| rng.gen_range(0.5..1.5)).collect();
    let eval = |s: f64| tilter.tilt(s, &seed_vec);
    let slope = |t: &Tilted| 1.0 - rate - t.joint.conditional_entropy(d);

    let mut lo = (0.0, eval(0.0));
    let mut hi = (1.0, eval(1.0));
    let mut iterations = 0;
    if slope(&lo.1) > 0.0 && slope(&hi.1) < 0.0 {
        let mut s = start;
        while iterations < max_iter && hi.0 - lo.0 > 1e-15 {
            iterations += 1;
            let t = eval(s);
            if slope(&t) > 0.0 {
                lo = (s, t);
            } else {
                hi = (s, t);
            }
            s = 0.5 * (lo.0 + hi.0);
        }
    } else if slope(&hi.1) >= 0.0 {
        lo = hi.clone();
    } else {
        hi = lo.clone();
    }

    let dual = |s: f64, t: &Tilted| s * (1.0 - rate) - (1.0 + s) * t.log_rho / log_base(d);
    let dual_value = dual(lo.0, &lo.1).max(dual(hi.0, &hi.1));

    // Primal recovery on the segment [Q_lo, Q_hi]; both ends are balanced.
    let mix = |lambda: f64| {
        let q = lo
            .1
            .joint
            .as_slice()
            .iter()
            .zip(hi.1.joint.as_slice())
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect();
        JointDist::from_raw(p.m(), q)
    };
    let f = |lambda: f64| objective(&mix(lambda), p, rate);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = f(x2);
        }
    }
    let candidates = [0.0, 1.0, 0.5 * (a + b)];
    let (lambda, value) = candidates
        .iter()
        .map(|&l| (l, f(l)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    Solve {
        value,
        dual: dual_value,
        argmin: mix(lambda),
        tilt: (1.0 - lambda) * lo.0 + lambda * hi.0,
        iterations,
    }
}

#[derive(Debug, Clone)]
struct Tilted {
    /// Natural log of the Perron root of `A_s`.
    log_rho: f64,
    joint: JointDist,
}

/// Perron data of `A_s(u,v) = P(v|u)^{1/(1+s)}` over the irreducible blocks of
/// the support graph (which does not depend on `s`).
struct Tilter {
    m: usize,
    p: Vec<f64>,
    blocks: Vec<Vec<usize>>,
}

impl Tilter {
    fn new(p: &TransitionMatrix) -> Self {
        let m = p.m();
        let data: Vec<f64> = (0..m * m).map(|i| p.get(i / m, i % m)).collect();
        // Strongly connected blocks that carry at least one internal edge.
        let mut reach: Vec<Vec<bool>> = (0..m)
            .map(|u| (0..m).map(|v| data[u * m + v] > 0.0).collect())
            .collect();
        for w in 0..m {
            for u in 0..m {
                if reach[u][w] {
                    for v in 0..m {
                        if reach[w][v] {
                            reach[u][v] = true;
                        }
                    }
                }
            }
        }
        let mut seen = vec![false; m];
        let mut blocks = Vec::new();
        for u in 0..m {
            if seen[u] || !reach[u][u] {
                continue;
            }
            let block: Vec<usize> = (0..m).filter(|&v| reach[u][v] && reach[v][u]).collect();
            for &v in &block {
                seen[v] = true;
            }
            blocks.push(block);
        }
        Self { m, p: data, blocks }
    }

    fn tilt(&self, s: f64, seed_vec: &[f64]) -> Tilted {
        let power = 1.0 / (1.0 + s);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for block in &self.blocks {
            let k = block.len();
            let a: Vec<f64> = block
                .iter()
                .flat_map(|&u| {
                    block.iter().map(move |&v| {
                        let x = self.p[u * self.m + v];
                        if x > 0.0 {
                            x.powf(power)
                        } else {
                            0.0
                        }
                    })
                })
                .collect();
            let start: Vec<f64> = block.iter().map(|&u| seed_vec[u]).collect();
            let (rho, left, right) = perron(k, &a, &start);
            let better = best.as_ref().map_or(true, |(r, _)| rho > *r * (1.0 + 1e-14));
            if better {
                let mut q = vec![0.0; self.m * self.m];
                let mut z = 0.0;
                for (i, &u) in block.iter().enumerate() {
                    for (j, &v) in block.iter().enumerate() {
                        let x = left[i] * a[i * k + j] * right[j] / rho;
                        q[u * self.m + v] = x;
                        z += x;
                    }
                }
                q.iter_mut().for_each(|x| *x /= z);
                best = Some((rho, q));
            }
        }
        let (rho, q) = best.expect("a stochastic matrix has a closed class");
        Tilted {
            log_rho: rho.ln(),
            joint: JointDist::from_raw(self.m, q),
        }
    }
}

/// Perron root with left and right vectors of an irreducible nonnegative
/// `k × k` matrix, by repeated squaring of the primitive matrix `A + I`.
fn perron(k: usize, a: &[f64], start: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let mut b: Vec<f64> = a.to_vec();
    for i in 0..k {
        b[i * k + i] += 1.0;
    }
    normalise_max(&mut b);
    for _ in 0..64 {
        let mut sq = vec![0.0; k * k];
        for i in 0..k {
            for l in 0..k {
                let x = b[i * k + l];
                if x != 0.0 {
                    for j in 0..k {
                        sq[i * k + j] += x * b[l * k + j];
                    }
                }
            }
        }
        normalise_max(&mut sq);
        let delta = sq.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        b = sq;
        if delta < 1e-16 {
            break;
        }
    }
    // B ≈ c·r ℓᵀ; project the start vector from both sides.
    let mut right: Vec<f64> = (0..k).map(|i| (0..k).map(|j| b[i * k + j] * start[j]).sum()).collect();
    let mut left: Vec<f64> = (0..k).map(|j| (0..k).map(|i| start[i] * b[i * k + j]).sum()).collect();
    // A few plain power steps to clean up rounding.
    for _ in 0..4 {
        right = (0..k).map(|i| (0..k).map(|j| a[i * k + j] * right[j]).sum::<f64>() + right[i]).collect();
        left = (0..k).map(|j| (0..k).map(|i| left[i] * a[i * k + j]).sum::<f64>() + left[j]).collect();
        normalise_sum(&mut right);
        normalise_sum(&mut left);
    }
    let ar: Vec<f64> = (0..k).map(|i| (0..k).map(|j| a[i * k + j] * right[j]).sum()).collect();
    let num: f64 = left.iter().zip(&ar).map(|(l, x)| l * x).sum();
    let den: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    (num / den, left, right)
}

fn normalise_max(v: &mut [f64]) {
    let m = v.iter().fold(0.0f64, |a, &b| a.max(b));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
}

fn normalise_sum(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gilbert_transition, TransitionMatrix};
    use rand::Rng;

    fn opts() -> ExponentOptions {
        ExponentOptions::default()
    }

    #[test]
    fn perron_of_known_matrices() {
        // [[2,1],[1,2]] has ρ = 3 with symmetric vectors.
        let (rho, l, r) = perron(2, &[2.0, 1.0, 1.0, 2.0], &[1.0, 0.7]);
        assert!((rho - 3.0).abs() < 1e-13);
        assert!((l[0] - l[1]).abs() < 1e-13 && (r[0] - r[1]).abs() < 1e-13);
        // Periodic: [[0,4],[1,0]] has ρ = 2.
        let (rho, _, r) = perron(2, &[0.0, 4.0, 1.0, 0.0], &[1.0, 1.0]);
        assert!((rho - 2.0).abs() < 1e-13);
        assert!((r[0] / r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn objective_examples() {
        let p = gilbert_transition(0.1, 0.3).unwrap();
        let q = p.stationary_distribution().unwrap();
        let prod = JointDist::product(&q, &p).unwrap();
        let th = capacity_threshold(&p).unwrap();
        for r in [0.0, 0.1, 0.2, 0.5] {
            let expected = (th - r).max(0.0);
            assert!((objective(&prod, &p, r) - expected).abs() < 1e-14);
        }
        assert!(objective(&prod, &p, 1.0).abs() < 1e-15);

        let forbidding = TransitionMatrix::new(2, vec![vec![0.5, 0.5, 0.0, 0.0]; 4]).unwrap();
        let mut data = vec![0.0; 16];
        data[3] = 0.5;
        data[12] = 0.5;
        assert_eq!(objective(&JointDist::new(4, data).unwrap(), &forbidding, 0.3), f64::INFINITY);
    }

    #[test]
    fn full_rate_gives_zero() {
        for (e, g) in [(0.1, 0.3), (0.4, 0.05), (0.01, 0.99)] {
            let p = gilbert_transition(e, g).unwrap();
            let res = exponent(&p, 1.0, &opts()).unwrap();
            assert!(res.value.abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_examples() {
        let p = gilbert_transition(0.1, 0.3).unwrap();
        assert!((capacity_threshold(&p).unwrap() - 0.281347).abs() < 1e-6);
        let noiseless = TransitionMatrix::new(2, vec![vec![1.0, 0.0, 0.0, 0.0]; 4]).unwrap();
        assert!((capacity_threshold(&noiseless).unwrap() - 1.0).abs() < 1e-15);
        let e = 0.05;
        let depol = gilbert_transition(e, e).unwrap();
        let expected = 1.0 - crate::channel::binary_entropy(e) - e * 3f64.log2();
        assert!((capacity_threshold(&depol).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn noiseless_exponent_is_one_minus_rate() {
        let noiseless = TransitionMatrix::new(2, vec![vec![1.0, 0.0, 0.0, 0.0]; 4]).unwrap();
        for r in [0.0, 0.3, 0.9] {
            let res = exponent(&noiseless, r, &opts()).unwrap();
            assert!((res.value - (1.0 - r)).abs() < 1e-12);
        }
    }

    #[test]
    fn result_invariants() {
        let p = gilbert_transition(0.1, 0.3).unwrap();
        let th = capacity_threshold(&p).unwrap();
        for r in [0.0, 0.05, 0.1, 0.2, 0.25, 0.28, 0.3, 0.6] {
            let res = exponent(&p, r, &opts()).unwrap();
            assert!(res.value >= 0.0);
            assert!(res.argmin.imbalance() <= 1e-9);
            assert!((res.value - objective(&res.argmin, &p, r)).abs() <= 1e-10);
            assert!(res.value <= (th - r).max(0.0) + 1e-12);
            assert!(res.kkt_residual <= 1e-9);
            if r >= th {
                assert!(res.value <= 1e-8);
            }
        }
    }

    #[test]
    fn restarts_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let rows: Vec<Vec<f64>> = (0..4)
                .map(|_| {
                    let v: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let s: f64 = v.iter().sum();
                    v.into_iter().map(|x| x / s).collect()
                })
                .collect();
            let p = TransitionMatrix::new(2, rows).unwrap();
            let res = exponent(&p, 0.2, &ExponentOptions { restarts: 10, seed: 7, ..opts() }).unwrap();
            assert!(res.restart_spread <= 1e-6, "{}", res.restart_spread);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let p = gilbert_transition(0.2, 0.6).unwrap();
        let o = ExponentOptions { restarts: 4, seed: 99, ..opts() };
        assert_eq!(exponent(&p, 0.1, &o).unwrap(), exponent(&p, 0.1, &o).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let p = gilbert_transition(0.2, 0.6).unwrap();
        assert!(exponent(&p, 1.5, &opts()).is_err());
        assert!(exponent(&p, -0.1, &opts()).is_err());
        assert!(exponent(&p, 0.5, &ExponentOptions { restarts: 0, ..opts() }).is_err());
        assert!(exponent_type_oracle(&p, 0.5, 1).is_err());
    }

    #[test]
    fn sweep_endpoints_and_monotonicity() {
        let p = gilbert_transition(0.1, 0.3).unwrap();
        let th = capacity_threshold(&p).unwrap();
        let curve = exponent_sweep(&p, &[0.0, th, 1.0], &opts()).unwrap();
        assert!(curve[0].value > 0.0);
        assert!(curve[1].value.abs() < 1e-8);
        assert!(curve[2].value.abs() < 1e-12);
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let curve = exponent_sweep(&p, &grid, &opts()).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-12);
        }
    }

    #[test]
    fn oracle_matches_full_type_enumeration() {
        let openers = TransitionMatrix::new(
            2,
            vec![
                vec![0.7, 0.3, 0.0, 0.0],
                vec![0.4, 0.6, 0.0, 0.0],
                vec![0.5, 0.5, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let full = gilbert_transition(0.2, 0.4).unwrap();
        let absorbing = TransitionMatrix::new(
            2,
            vec![
                vec![0.9, 0.1, 0.0, 0.0],
                vec![0.2, 0.8, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.3, 0.7],
            ],
        )
        .unwrap();
        for p in [openers, full, absorbing] {
            for n in 2..=6 {
                for r in [0.0, 0.2, 0.6] {
                    let brute = crate::types::enumerate_types(4, n, None)
                        .unwrap()
                        .iter()
                        .map(|t| objective(&t.joint(), &p, r))
                        .fold(f64::INFINITY, f64::min);
                    let fast = exponent_type_oracle(&p, r, n).unwrap();
                    assert!((brute - fast).abs() < 1e-12, "n={n} r={r}: {brute} vs {fast}");
                }
            }
        }
    }

    #[test]
    fn oracle_small_n() {
        // n = 2: a 16-point minimum over single transitions.
        let p = gilbert_transition(0.1, 0.3).unwrap();
        let r = 0.3;
        let mut best = f64::INFINITY;
        for u in 0..4 {
            for v in 0..4 {
                let mut data = vec![0.0; 16];
                data[u * 4 + v] = 1.0;
                best = best.min(objective(&JointDist::new(4, data).unwrap(), &p, r));
            }
        }
        assert!((exponent_type_oracle(&p, r, 2).unwrap() - best).abs() < 1e-12);

        // Deterministic 4-cycle: the forced type has D = 0 and H = 0.
        let cyc = TransitionMatrix::new(
            2,
            (0..4).map(|u| (0..4).map(|v| if v == (u + 1) % 4 { 1.0 } else { 0.0 }).collect()).collect(),
        )
        .unwrap();
        for n in [2, 5, 9] {
            assert!((exponent_type_oracle(&cyc, 0.25, n).unwrap() - 0.75).abs() < 1e-12);
        }
    }
}

//! Markov-modulated Pauli channels and the information functionals on them.
//!
//! All entropies and divergences are in base `d` (the field size), so the
//! alphabet `X = F_d²` has maximal entropy 2. The conventions `0·log 0 = 0`
//! and `log(a/0) = +∞` for `a > 0` are applied throughout; an infinite
//! divergence is returned as `f64::INFINITY`, not as an error.

use crate::error::{invalid, Error, Result};
use crate::field::PrimeField;

/// Tolerance on row and total sums of probability vectors.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[inline]
pub(crate) fn log_base(d: u32) -> f64 {
    (d as f64).ln()
}

/// `−z log₂ z − (1−z) log₂(1−z)`.
pub fn binary_entropy(z: f64) -> f64 {
    let t = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    t(z) + t(1.0 - z)
}

fn check_distribution(what: &str, p: &[f64]) -> Result<()> {
    for (i, &x) in p.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return invalid(format!("{what}: entry {i} = {x} is not a nonnegative number"));
        }
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOLERANCE {
        return invalid(format!("{what}: entries sum to {s}, expected 1"));
    }
    Ok(())
}

/// Transition probabilities `P(v|u)` on the alphabet `X = F_d²`, row `u`
/// holding `P(·|u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    field: PrimeField,
    m: usize,
    data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(d: u32, rows: Vec<Vec<f64>>) -> Result<Self> {
        let field = PrimeField::new(d)?;
        let m = (d * d) as usize;
        if rows.len() != m {
            return invalid(format!(
                "transition matrix has {} rows, alphabet size is {m}",
                rows.len()
            ));
        }
        for (u, row) in rows.iter().enumerate() {
            if row.len() != m {
                return invalid(format!("transition row {u} has {} entries, expected {m}", row.len()));
            }
            check_distribution(&format!("transition row {u}"), row)?;
        }
        Ok(Self {
            field,
            m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// A memoryless chain: every row equals `single`.
    pub fn memoryless(d: u32, single: &[f64]) -> Result<Self> {
        let m = (d * d) as usize;
        Self::new(d, vec![single.to_vec(); m])
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.field.modulus()
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Alphabet size `d²`.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// `P(v|u)`.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.m + v]
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.m..(u + 1) * self.m]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.m).map(<[f64]>::to_vec).collect()
    }

    /// `reach[u][v]`: `v` reachable from `u` in zero or more positive steps.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let m = self.m;
        let mut reach: Vec<Vec<bool>> = (0..m)
            .map(|u| (0..m).map(|v| u == v || self.get(u, v) > 0.0).collect())
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
        reach
    }

    /// Closed communicating classes (recurrent classes) of the chain.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let reach = self.reachability();
        let m = self.m;
        let mut seen = vec![false; m];
        let mut classes = Vec::new();
        for u in 0..m {
            if seen[u] {
                continue;
            }
            let class: Vec<usize> = (0..m).filter(|&v| reach[u][v] && reach[v][u]).collect();
            for &v in &class {
                seen[v] = true;
            }
            let closed = class.iter().all(|&a| (0..m).all(|b| !reach[a][b] || class.contains(&b)));
            if closed {
                classes.push(class);
            }
        }
        classes
    }

    /// The unique stationary distribution `q = qP`.
    ///
    /// Requires exactly one recurrent class; transient states get `q = 0`.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        let classes = self.recurrent_classes();
        if classes.len() != 1 {
            return Err(Error::DegenerateChain(format!(
                "{} recurrent classes {:?}; the stationary distribution is not unique",
                classes.len(),
                classes
            )));
        }
        let m = self.m;
        // (Pᵀ − I) q = 0 with the last equation replaced by Σ q = 1.
        let mut a = vec![vec![0.0; m + 1]; m];
        for (v, row) in a.iter_mut().enumerate().take(m - 1) {
            for u in 0..m {
                row[u] = self.get(u, v) - if u == v { 1.0 } else { 0.0 };
            }
        }
        a[m - 1] = vec![1.0; m + 1];
        let mut q = solve_augmented(a).ok_or_else(|| {
            Error::DegenerateChain("singular stationary system".into())
        })?;
        for x in q.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        // One power step as refinement.
        let mut refined = vec![0.0; m];
        for (u, &qu) in q.iter().enumerate() {
            for (v, r) in refined.iter_mut().enumerate() {
                *r += qu * self.get(u, v);
            }
        }
        let s: f64 = refined.iter().sum();
        Ok(refined.into_iter().map(|x| x / s).collect())
    }
}

/// Gaussian elimination with partial pivoting on an `m × (m+1)` augmented system.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let p = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, p);
        for i in col + 1..m {
            let factor = a[i][col] / a[col][col];
            if factor != 0.0 {
                for j in col..=m {
                    a[i][j] -= factor * a[col][j];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][m] - s) / a[i][i];
    }
    Some(x)
}

/// A Pauli channel whose error sequence is a homogeneous Markov chain:
/// `P_n(x) = p(x₁) ∏ P(x_{j+1}|x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPauliChannel {
    transition: TransitionMatrix,
    initial: Vec<f64>,
}

impl MarkovPauliChannel {
    /// Without an explicit initial distribution the stationary one is used.
    pub fn new(transition: TransitionMatrix, initial: Option<Vec<f64>>) -> Result<Self> {
        let initial = match initial {
            Some(p) => {
                if p.len() != transition.m() {
                    return invalid(format!(
                        "initial distribution has {} entries, expected {}",
                        p.len(),
                        transition.m()
                    ));
                }
                check_distribution("initial distribution", &p)?;
                p
            }
            None => transition.stationary_distribution()?,
        };
        Ok(Self { transition, initial })
    }

    /// The memoryless channel with every row and the initial law equal to `single`.
    pub fn memoryless(d: u32, single: &[f64]) -> Result<Self> {
        Self::new(TransitionMatrix::memoryless(d, single)?, Some(single.to_vec()))
    }

    #[inline]
    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    #[inline]
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.transition.d()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.transition.m()
    }

    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        self.transition.stationary_distribution()
    }

    pub fn sequence_probability(&self, x: &[usize]) -> Result<f64> {
        let Some(&first) = x.first() else {
            return invalid("empty symbol sequence");
        };
        if let Some((i, &s)) = x.iter().enumerate().find(|(_, &s)| s >= self.m()) {
            return invalid(format!("symbol {s} at position {i} outside alphabet of size {}", self.m()));
        }
        Ok(self.sequence_probability_unchecked(first, x))
    }

    #[inline]
    pub(crate) fn sequence_probability_unchecked(&self, first: usize, x: &[usize]) -> f64 {
        let mut p = self.initial[first];
        for w in x.windows(2) {
            if p == 0.0 {
                break;
            }
            p *= self.transition.get(w[0], w[1]);
        }
        p
    }
}

/// A probability distribution `Q` on `X²`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    m: usize,
    q: Vec<f64>,
}

/// The two marginals of a joint distribution and its reverse conditional.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    /// `Q̄(u) = Σ_v Q(u,v)`.
    pub first: Vec<f64>,
    /// `Q̿(u) = Σ_v Q(v,u)`.
    pub second: Vec<f64>,
    /// `Q←(·|u) = Q(u,·)/Q̄(u)`, `None` where `Q̄(u) = 0`.
    pub reverse: Vec<Option<Vec<f64>>>,
}

impl JointDist {
    pub fn new(m: usize, q: Vec<f64>) -> Result<Self> {
        if q.len() != m * m {
            return invalid(format!("joint distribution has {} entries, expected {}", q.len(), m * m));
        }
        check_distribution("joint distribution", &q)?;
        Ok(Self { m, q })
    }

    /// Skips validation; callers guarantee a probability vector up to rounding.
    pub(crate) fn from_raw(m: usize, q: Vec<f64>) -> Self {
        debug_assert_eq!(q.len(), m * m);
        Self { m, q }
    }

    /// `Q(u,v) = q(u) P(v|u)`.
    pub fn product(q: &[f64], p: &TransitionMatrix) -> Result<Self> {
        let m = p.m();
        if q.len() != m {
            return invalid(format!("distribution has {} entries, expected {m}", q.len()));
        }
        let data = (0..m * m).map(|i| q[i / m] * p.get(i / m, i % m)).collect();
        Self::new(m, data)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.q[u * self.m + v]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn first_marginal(&self) -> Vec<f64> {
        self.q.chunks(self.m).map(|r| r.iter().sum()).collect()
    }

    pub fn second_marginal(&self) -> Vec<f64> {
        (0..self.m).map(|v| (0..self.m).map(|u| self.get(u, v)).sum()).collect()
    }

    pub fn marginals(&self) -> Marginals {
        let first = self.first_marginal();
        let second = self.second_marginal();
        let reverse = first
            .iter()
            .enumerate()
            .map(|(u, &qu)| {
                (qu > 0.0).then(|| (0..self.m).map(|v| self.get(u, v) / qu).collect())
            })
            .collect();
        Marginals {
            first,
            second,
            reverse,
        }
    }

    /// `max_u |Q̄(u) − Q̿(u)|`.
    pub fn imbalance(&self) -> f64 {
        self.first_marginal()
            .iter()
            .zip(self.second_marginal())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `H(Q←|Q̄) = −Σ Q(u,v) log_d (Q(u,v)/Q̄(u))`.
    pub fn conditional_entropy(&self, d: u32) -> f64 {
        let first = self.first_marginal();
        let mut h = 0.0;
        for (u, &qu) in first.iter().enumerate() {
            if qu <= 0.0 {
                continue;
            }
            for v in 0..self.m {
                let x = self.get(u, v);
                if x > 0.0 {
                    h -= x * (x / qu).ln();
                }
            }
        }
        (h / log_base(d)).max(0.0)
    }
}

/// `H(P|p) = −Σ_{u: p(u)>0} Σ_v p(u) P(v|u) log_d P(v|u)`.
pub fn conditional_entropy(p: &TransitionMatrix, dist: &[f64]) -> f64 {
    let mut h = 0.0;
    for (u, &pu) in dist.iter().enumerate() {
        if pu <= 0.0 {
            continue;
        }
        for &x in p.row(u) {
            if x > 0.0 {
                h -= pu * x * x.ln();
            }
        }
    }
    h / log_base(p.d())
}

/// Conditional divergence `D(Q‖P) = Σ_{u: Q̄(u)>0} Σ_v Q(u,v) log_d (Q←(v|u)/P(v|u))`.
///
/// `+∞` exactly when `Q` charges a transition with `P(v|u) = 0`.
pub fn kl_conditional(q: &JointDist, p: &TransitionMatrix) -> f64 {
    assert_eq!(q.m(), p.m(), "alphabet mismatch");
    let first = q.first_marginal();
    let mut total = 0.0;
    for (u, &qu) in first.iter().enumerate() {
        if qu <= 0.0 {
            continue;
        }
        for v in 0..q.m() {
            let x = q.get(u, v);
            if x <= 0.0 {
                continue;
            }
            let pv = p.get(u, v);
            if pv <= 0.0 {
                return f64::INFINITY;
            }
            total += x * (x / (qu * pv)).ln();
        }
    }
    (total / log_base(p.d())).max(0.0)
}

/// The quantum analogue of Gilbert's two-regime channel on qubits.
///
/// Symbol 0 is the good state. From it the chain enters each bad symbol with
/// probability `ε/3`; from a bad symbol it returns to 0 with `1 − γ` and moves
/// to each bad symbol with `γ/3`. The initial law is stationary.
pub fn gilbert_channel(epsilon: f64, gamma: f64) -> Result<MarkovPauliChannel> {
    MarkovPauliChannel::new(gilbert_transition(epsilon, gamma)?, None)
}

pub fn gilbert_transition(epsilon: f64, gamma: f64) -> Result<TransitionMatrix> {
    check_gilbert(epsilon, gamma)?;
    let rows = (0..4)
        .map(|u| {
            let stay_bad = if u == 0 { epsilon } else { gamma };
            let mut row = vec![stay_bad / 3.0; 4];
            row[0] = 1.0 - stay_bad;
            row
        })
        .collect();
    TransitionMatrix::new(2, rows)
}

fn check_gilbert(epsilon: f64, gamma: f64) -> Result<()> {
    for (name, x) in [("epsilon", epsilon), ("gamma", gamma)] {
        if !(x > 0.0 && x < 1.0) {
            return invalid(format!("{name} = {x} must lie in (0, 1)"));
        }
    }
    Ok(())
}

/// Closed form of `1 − H(P|q)` for the Gilbert channel, in bits.
pub fn gilbert_capacity_bound(epsilon: f64, gamma: f64) -> Result<f64> {
    check_gilbert(epsilon, gamma)?;
    let log3 = 3f64.log2();
    let num = (1.0 - gamma) * (binary_entropy(epsilon) + epsilon * log3)
        + epsilon * (binary_entropy(gamma) + gamma * log3);
    Ok(1.0 - num / (1.0 - gamma + epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_distribution<R: Rng>(rng: &mut R, m: usize, zeros: bool) -> Vec<f64> {
        let mut v: Vec<f64> = (0..m)
            .map(|_| {
                if zeros && rng.gen_bool(0.3) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        if v.iter().all(|&x| x == 0.0) {
            v[0] = 1.0;
        }
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    }

    fn random_transition<R: Rng>(rng: &mut R, zeros: bool) -> TransitionMatrix {
        TransitionMatrix::new(2, (0..4).map(|_| random_distribution(rng, 4, zeros)).collect()).unwrap()
    }

    fn identity_transition() -> TransitionMatrix {
        TransitionMatrix::new(
            2,
            (0..4)
                .map(|u| (0..4).map(|v| if u == v { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn validation_names_the_offending_row() {
        let mut rows = vec![vec![0.25; 4]; 4];
        rows[2] = vec![0.5, 0.5, 0.5, 0.0];
        let err = TransitionMatrix::new(2, rows).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        let mut rows = vec![vec![0.25; 4]; 4];
        rows[1][3] = -0.25;
        let err = TransitionMatrix::new(2, rows).unwrap_err().to_string();
        assert!(err.contains("row 1") && err.contains("entry 3"), "{err}");
        assert!(TransitionMatrix::new(4, vec![vec![1.0]; 16]).is_err());
        assert!(TransitionMatrix::new(2, vec![vec![0.25; 4]; 3]).is_err());
    }

    #[test]
    fn sequence_probability_examples() {
        let ch = MarkovPauliChannel::memoryless(2, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(ch.sequence_probability(&[2]).unwrap(), 0.3);
        assert!(ch.sequence_probability(&[]).is_err());
        assert!(ch.sequence_probability(&[0, 4]).is_err());

        let det = MarkovPauliChannel::new(identity_transition(), Some(vec![0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(det.sequence_probability(&[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(det.sequence_probability(&[1, 2, 2]).unwrap(), 0.0);

        let g = gilbert_channel(0.1, 0.3).unwrap();
        let p = g.sequence_probability(&[0, 1]).unwrap();
        assert!((p - 0.875 * 0.1 / 3.0).abs() < 1e-15, "{p}");
    }

    #[test]
    fn sequence_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = MarkovPauliChannel::new(random_transition(&mut rng, true), Some(random_distribution(&mut rng, 4, false))).unwrap();
        for n in 1..=6u32 {
            let total: f64 = (0..4usize.pow(n))
                .map(|mut idx| {
                    let x: Vec<usize> = (0..n).map(|_| {
                        let s = idx % 4;
                        idx /= 4;
                        s
                    }).collect();
                    ch.sequence_probability(&x).unwrap()
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}: {total}");
        }
    }

    #[test]
    fn stationary_examples() {
        let g = gilbert_transition(0.1, 0.3).unwrap();
        let q = g.stationary_distribution().unwrap();
        assert!((q[0] - 0.875).abs() < 1e-14);
        for &x in &q[1..] {
            assert!((x - 0.125 / 3.0).abs() < 1e-14);
        }

        let eps = 0.2;
        let q = gilbert_transition(eps, eps).unwrap().stationary_distribution().unwrap();
        let expected = [1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0];
        for (a, b) in q.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }

        // Doubly stochastic.
        let ds = TransitionMatrix::new(
            2,
            vec![
                vec![0.1, 0.2, 0.3, 0.4],
                vec![0.4, 0.1, 0.2, 0.3],
                vec![0.3, 0.4, 0.1, 0.2],
                vec![0.2, 0.3, 0.4, 0.1],
            ],
        )
        .unwrap();
        for x in ds.stationary_distribution().unwrap() {
            assert!((x - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_with_transient_states_and_periodicity() {
        let noiseless = TransitionMatrix::new(2, vec![vec![1.0, 0.0, 0.0, 0.0]; 4]).unwrap();
        assert_eq!(noiseless.stationary_distribution().unwrap(), vec![1.0, 0.0, 0.0, 0.0]);

        let cycle = TransitionMatrix::new(
            2,
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let q = cycle.stationary_distribution().unwrap();
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[1] - 0.5).abs() < 1e-15);
        assert_eq!(&q[2..], &[0.0, 0.0]);
    }

    #[test]
    fn reducible_chain_is_degenerate() {
        let err = identity_transition().stationary_distribution().unwrap_err();
        assert!(matches!(err, Error::DegenerateChain(_)));
        assert!(err.to_string().contains("4 recurrent classes"));
        assert!(MarkovPauliChannel::new(identity_transition(), None).is_err());
    }

    #[test]
    fn stationary_residual_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = random_transition(&mut rng, false);
            let q = p.stationary_distribution().unwrap();
            for v in 0..4 {
                let qp: f64 = (0..4).map(|u| q[u] * p.get(u, v)).sum();
                assert!((qp - q[v]).abs() <= 1e-12);
            }
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_examples() {
        assert_eq!(conditional_entropy(&identity_transition(), &[0.25; 4]), 0.0);
        let uniform = TransitionMatrix::new(2, vec![vec![0.25; 4]; 4]).unwrap();
        assert!((conditional_entropy(&uniform, &[0.25; 4]) - 2.0).abs() < 1e-15);
        let g = gilbert_transition(0.1, 0.3).unwrap();
        let h = conditional_entropy(&g, &g.stationary_distribution().unwrap());
        assert!((h - 0.718653).abs() < 1e-6, "{h}");
    }

    #[test]
    fn divergence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_transition(&mut rng, false);
        let q = random_distribution(&mut rng, 4, true);
        assert!(kl_conditional(&JointDist::product(&q, &p).unwrap(), &p).abs() < 1e-15);

        let forbidding = TransitionMatrix::new(2, vec![vec![0.5, 0.5, 0.0, 0.0]; 4]).unwrap();
        let mut data = vec![0.0; 16];
        data[2] = 1.0;
        assert_eq!(kl_conditional(&JointDist::new(4, data).unwrap(), &forbidding), f64::INFINITY);

        // Uniform rows; Q concentrated on row 0.
        let uniform = TransitionMatrix::new(2, vec![vec![0.25; 4]; 4]).unwrap();
        let mut data = vec![0.0; 16];
        data[..4].copy_from_slice(&[0.25; 4]);
        assert!(kl_conditional(&JointDist::new(4, data.clone()).unwrap(), &uniform).abs() < 1e-15);
        data[..4].copy_from_slice(&[0.4, 0.2, 0.2, 0.2]);
        let expected = 0.4 * (0.4f64 / 0.25).log2() + 3.0 * 0.2 * (0.2f64 / 0.25).log2();
        let got = kl_conditional(&JointDist::new(4, data).unwrap(), &uniform);
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 0.0781).abs() < 1e-4, "{got}");
    }

    #[test]
    fn marginal_examples() {
        let q = [0.1, 0.2, 0.3, 0.4];
        let mut data = vec![0.0; 16];
        for u in 0..4 {
            for v in 0..4 {
                data[u * 4 + v] = q[u] * q[v];
            }
        }
        let joint = JointDist::new(4, data).unwrap();
        let mg = joint.marginals();
        for u in 0..4 {
            assert!((mg.first[u] - q[u]).abs() < 1e-15);
            assert!((mg.second[u] - q[u]).abs() < 1e-15);
        }

        let mut data = vec![0.0; 16];
        data[4 + 2] = 1.0;
        let mg = JointDist::new(4, data).unwrap().marginals();
        assert_eq!(mg.first, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(mg.second, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(mg.reverse[0], None);
        assert_eq!(mg.reverse[1], Some(vec![0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn gilbert_examples() {
        let g = gilbert_transition(0.1, 0.1).unwrap();
        for u in 0..4 {
            let expected = [0.9, 0.1 / 3.0, 0.1 / 3.0, 0.1 / 3.0];
            assert_eq!(g.row(u), &expected);
        }
        let g = gilbert_transition(0.1, 0.3).unwrap();
        assert!((g.get(1, 0) - 0.7).abs() < 1e-15);
        assert!(gilbert_channel(0.0, 0.3).is_err());
        assert!(gilbert_channel(0.1, 1.0).is_err());
        assert!(gilbert_channel(f64::NAN, 0.5).is_err());

        let depol = gilbert_capacity_bound(0.1, 0.1).unwrap();
        assert!((depol - 0.372508).abs() < 1e-6, "{depol}");
        assert!((depol - (1.0 - binary_entropy(0.1) - 0.1 * 3f64.log2())).abs() < 1e-14);
        assert!((gilbert_capacity_bound(0.1, 0.3).unwrap() - 0.281347).abs() < 1e-6);
        assert!(gilbert_capacity_bound(1e-12, 0.4).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn gilbert_closed_form_matches_stationary_path() {
        for i in 1..10 {
            for j in 1..10 {
                let (e, g) = (i as f64 / 10.0, j as f64 / 10.0);
                let p = gilbert_transition(e, g).unwrap();
                let via_chain = 1.0 - conditional_entropy(&p, &p.stationary_distribution().unwrap());
                let closed = gilbert_capacity_bound(e, g).unwrap();
                assert!((via_chain - closed).abs() < 1e-10, "({e},{g})");
            }
        }
    }

    proptest! {
        #[test]
        fn divergence_nonnegative_with_equality_on_products(seed in any::<u64>(), zeros in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_transition(&mut rng, zeros);
            let q = JointDist::new(4, random_distribution(&mut rng, 16, zeros)).unwrap();
            let dq = kl_conditional(&q, &p);
            prop_assert!(dq >= 0.0);
            let witness = JointDist::product(&q.first_marginal(), &p).unwrap();
            prop_assert!(kl_conditional(&witness, &p) < 1e-14);
            let h = conditional_entropy(&p, &random_distribution(&mut rng, 4, zeros));
            prop_assert!((-1e-15..=2.0 + 1e-12).contains(&h));
        }
    }
}

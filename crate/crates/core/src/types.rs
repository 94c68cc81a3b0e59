//! Second-order (Markov) types.
//!
//! The type of `x ∈ X^n` (`n ≥ 2`) is the matrix of transition counts
//! `c(u,v) = |{ i < n : (x_i, x_{i+1}) = (u,v) }|`, normalised by `n − 1`,
//! together with the initial symbol `x₁`. A count matrix is realisable from
//! `u` iff its transition multigraph has an Eulerian trail starting at `u`.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::channel::{kl_conditional, log_base, JointDist, MarkovPauliChannel};
use crate::error::{invalid, Error, Result};

/// Upper bound on the number of count vectors visited by one enumeration.
pub const COMPOSITION_LIMIT: u128 = 50_000_000;

/// Upper bound on the memo table of the exhaustive class-size counter.
pub const CLASS_COUNT_LIMIT: u128 = 10_000_000;

/// The Markov type of a sequence of length `n` starting at `initial`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovType {
    m: usize,
    n: usize,
    initial: usize,
    counts: Vec<u32>,
}

impl MarkovType {
    /// Validates the count total and realisability from `initial`.
    pub fn from_counts(m: usize, n: usize, initial: usize, counts: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return invalid(format!("Markov type needs n ≥ 2, got {n}"));
        }
        if counts.len() != m * m || initial >= m {
            return invalid("count matrix or initial symbol does not match the alphabet");
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total != (n - 1) as u64 {
            return invalid(format!("counts sum to {total}, expected n − 1 = {}", n - 1));
        }
        if !realizable_initials(m, &counts).contains(&initial) {
            return invalid(format!("counts are not realisable by a sequence starting at {initial}"));
        }
        Ok(Self {
            m,
            n,
            initial,
            counts,
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn initial(&self) -> usize {
        self.initial
    }

    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn count(&self, u: usize, v: usize) -> u32 {
        self.counts[u * self.m + v]
    }

    /// The last symbol of every sequence of this type.
    pub fn terminal(&self) -> usize {
        let (out, inn) = degrees(self.m, &self.counts);
        (0..self.m)
            .find(|&w| inn[w] == out[w] + 1)
            .unwrap_or(self.initial)
    }

    /// `Q = counts / (n − 1)`.
    pub fn joint(&self) -> JointDist {
        let denom = (self.n - 1) as f64;
        JointDist::from_raw(self.m, self.counts.iter().map(|&c| c as f64 / denom).collect())
    }

    /// `H(Q←|Q̄)` in base `d`, computed from the integer counts.
    pub fn conditional_entropy(&self, d: u32) -> f64 {
        let mut nats = 0.0;
        for row in self.counts.chunks(self.m) {
            let r: u32 = row.iter().sum();
            nats += xlogx(r);
            nats -= row.iter().map(|&c| xlogx(c)).sum::<f64>();
        }
        (nats / (self.n - 1) as f64 / log_base(d)).max(0.0)
    }

    /// An exact, totally ordered surrogate for the conditional entropy.
    pub fn entropy_key(&self) -> Option<EntropyKey> {
        EntropyKey::from_counts(self.m, &self.counts)
    }
}

fn xlogx(c: u32) -> f64 {
    if c == 0 {
        0.0
    } else {
        c as f64 * (c as f64).ln()
    }
}

/// `(n − 1)·H(Q←|Q̄) = ln(num/den)` with `num = ∏_u c_u^{c_u}` and
/// `den = ∏_{u,v} c_{uv}^{c_{uv}}`. Comparing keys by cross-multiplication
/// orders types of a common length by entropy without rounding. Keys are
/// stored in lowest terms, so equal entropies give equal keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntropyKey {
    num: u128,
    den: u128,
}

impl EntropyKey {
    /// `None` when the products overflow (only for long sequences).
    pub fn from_counts(m: usize, counts: &[u32]) -> Option<Self> {
        let pow = |c: u32| (c as u128).checked_pow(c);
        let mut num = 1u128;
        let mut den = 1u128;
        for row in counts.chunks(m) {
            let r: u32 = row.iter().sum();
            num = num.checked_mul(pow(r)?)?;
            for &c in row {
                den = den.checked_mul(pow(c)?)?;
            }
        }
        // Cross products must fit as well.
        num.checked_mul(den)?;
        let g = gcd(num, den);
        Some(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn nats(self) -> f64 {
        (self.num as f64).ln() - (self.den as f64).ln()
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ord for EntropyKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.nats().total_cmp(&other.nats()),
        }
    }
}

impl PartialOrd for EntropyKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn degrees(m: usize, counts: &[u32]) -> (Vec<u64>, Vec<u64>) {
    let mut out = vec![0u64; m];
    let mut inn = vec![0u64; m];
    for u in 0..m {
        for v in 0..m {
            let c = counts[u * m + v] as u64;
            out[u] += c;
            inn[v] += c;
        }
    }
    (out, inn)
}

/// Symbols from which a sequence with these transition counts can start.
/// Empty when no sequence realises the counts.
pub fn realizable_initials(m: usize, counts: &[u32]) -> Vec<usize> {
    let (out, inn) = degrees(m, counts);
    if out.iter().all(|&o| o == 0) {
        return Vec::new();
    }
    let mut start = None;
    let mut ends = 0;
    for w in 0..m {
        match out[w] as i64 - inn[w] as i64 {
            0 => {}
            1 if start.is_none() => start = Some(w),
            -1 if ends == 0 => ends += 1,
            _ => return Vec::new(),
        }
    }
    if start.is_some() != (ends == 1) {
        return Vec::new();
    }
    // Weak connectivity of the vertices that carry edges.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for u in 0..m {
        for v in 0..m {
            if counts[u * m + v] > 0 {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
    }
    let active: Vec<usize> = (0..m).filter(|&w| out[w] + inn[w] > 0).collect();
    let root = find(&mut parent, active[0]);
    if active.iter().any(|&w| find(&mut parent, w) != root) {
        return Vec::new();
    }
    match start {
        Some(s) => vec![s],
        None => (0..m).filter(|&w| out[w] > 0).collect(),
    }
}

/// The Markov type of `x` over an alphabet of size `m`.
pub fn markov_type(m: usize, x: &[usize]) -> Result<MarkovType> {
    if x.len() < 2 {
        return invalid(format!("Markov type needs a sequence of length ≥ 2, got {}", x.len()));
    }
    if let Some(&s) = x.iter().find(|&&s| s >= m) {
        return invalid(format!("symbol {s} outside alphabet of size {m}"));
    }
    let mut counts = vec![0u32; m * m];
    for w in x.windows(2) {
        counts[w[0] * m + w[1]] += 1;
    }
    Ok(MarkovType {
        m,
        n: x.len(),
        initial: x[0],
        counts,
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Calls `visit` with every count matrix supported on `cells` whose entries sum
/// to `total` and which some sequence realises, along with its possible
/// initial symbols.
pub fn for_each_realizable<F>(m: usize, total: u32, cells: &[(usize, usize)], visit: F) -> Result<()>
where
    F: FnMut(&[u32], &[usize]),
{
    for_each_realizable_from(&vec![0; m * m], m, total, cells, visit)
}

/// As [`for_each_realizable`], but every visited matrix is `base` plus a
/// composition of `total` over `cells`.
pub fn for_each_realizable_from<F>(
    base: &[u32],
    m: usize,
    total: u32,
    cells: &[(usize, usize)],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[u32], &[usize]),
{
    assert_eq!(base.len(), m * m, "base count matrix has the wrong size");
    if cells.is_empty() {
        if total == 0 {
            let initials = realizable_initials(m, base);
            if !initials.is_empty() {
                visit(base, &initials);
            }
        }
        return Ok(());
    }
    let required = binomial(total as u128 + cells.len() as u128 - 1, cells.len() as u128 - 1);
    if required > COMPOSITION_LIMIT {
        return Err(Error::ResourceLimit {
            what: "count matrices to enumerate",
            required,
            limit: COMPOSITION_LIMIT,
        });
    }
    let mut counts = base.to_vec();
    let slots: Vec<usize> = cells.iter().map(|&(u, v)| u * m + v).collect();
    fn rec<F: FnMut(&[u32], &[usize])>(
        m: usize,
        slots: &[usize],
        idx: usize,
        left: u32,
        counts: &mut Vec<u32>,
        visit: &mut F,
    ) {
        if idx + 1 == slots.len() {
            let saved = counts[slots[idx]];
            counts[slots[idx]] += left;
            let initials = realizable_initials(m, counts);
            if !initials.is_empty() {
                visit(counts, &initials);
            }
            counts[slots[idx]] = saved;
            return;
        }
        let saved = counts[slots[idx]];
        for c in 0..=left {
            counts[slots[idx]] = saved + c;
            rec(m, slots, idx + 1, left - c, counts, visit);
        }
        counts[slots[idx]] = saved;
    }
    rec(m, &slots, 0, total, &mut counts, &mut visit);
    Ok(())
}

fn all_cells(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|u| (0..m).map(move |v| (u, v))).collect()
}

/// `Q_n(u)` when `initial` is given, otherwise every (type, initial) pair of
/// `Q_n = ∪_u Q_n(u)`.
pub fn enumerate_types(m: usize, n: usize, initial: Option<usize>) -> Result<Vec<MarkovType>> {
    if n < 2 {
        return invalid(format!("Markov types need n ≥ 2, got {n}"));
    }
    if let Some(u) = initial {
        if u >= m {
            return invalid(format!("initial symbol {u} outside alphabet of size {m}"));
        }
    }
    let mut out = Vec::new();
    for_each_realizable(m, (n - 1) as u32, &all_cells(m), |counts, initials| {
        for &u in initials {
            if initial.map_or(true, |want| want == u) {
                out.push(MarkovType {
                    m,
                    n,
                    initial: u,
                    counts: counts.to_vec(),
                });
            }
        }
    })?;
    out.sort();
    Ok(out)
}

/// `|Q_n|`: the number of distinct count matrices realisable from some symbol.
pub fn distinct_type_count(m: usize, n: usize) -> Result<u64> {
    if n < 2 {
        return invalid(format!("Markov types need n ≥ 2, got {n}"));
    }
    let mut count = 0;
    for_each_realizable(m, (n - 1) as u32, &all_cells(m), |_, _| count += 1)?;
    Ok(count)
}

/// `|T_Q^n(u)|` by exhaustive walk counting with memoisation.
pub fn type_class_size(q: &MarkovType) -> Result<u128> {
    let m = q.m;
    if !realizable_initials(m, &q.counts).contains(&q.initial) {
        return Ok(0);
    }
    let states = q
        .counts
        .iter()
        .fold(m as u128, |acc, &c| acc.saturating_mul(c as u128 + 1));
    if states > CLASS_COUNT_LIMIT {
        return Err(Error::ResourceLimit {
            what: "states of the type-class counter",
            required: states,
            limit: CLASS_COUNT_LIMIT,
        });
    }
    fn walks(m: usize, at: usize, left: &mut Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), u128>) -> u128 {
        if left.iter().all(|&c| c == 0) {
            return 1;
        }
        if let Some(&v) = memo.get(&(at, left.clone())) {
            return v;
        }
        let mut total = 0u128;
        for next in 0..m {
            let slot = at * m + next;
            if left[slot] > 0 {
                left[slot] -= 1;
                total += walks(m, next, left, memo);
                left[slot] += 1;
            }
        }
        memo.insert((at, left.clone()), total);
        total
    }
    let mut left = q.counts.clone();
    Ok(walks(m, q.initial, &mut left, &mut HashMap::new()))
}

/// `|T_Q^n(u)|` from the matrix-tree / BEST determinant formula (Whittle's
/// count). `None` if an intermediate overflows `i128`.
pub fn whittle_class_size(q: &MarkovType) -> Option<u128> {
    let m = q.m;
    let u = q.initial;
    if !realizable_initials(m, &q.counts).contains(&u) {
        return Some(0);
    }
    let t = q.terminal();
    // Close the trail into a circuit with an extra edge t → u.
    let mut aug: Vec<u64> = q.counts.iter().map(|&c| c as u64).collect();
    if t != u {
        aug[t * m + u] += 1;
    }
    let active: Vec<usize> = (0..m)
        .filter(|&w| (0..m).any(|v| aug[w * m + v] > 0))
        .collect();
    let out = |w: usize| (0..m).map(|v| aug[w * m + v]).sum::<u64>();
    // Out-degree Laplacian restricted to active vertices minus the root u.
    let others: Vec<usize> = active.iter().copied().filter(|&w| w != u).collect();
    let lap: Vec<Vec<i128>> = others
        .iter()
        .map(|&a| {
            others
                .iter()
                .map(|&b| {
                    let deg = if a == b { out(a) as i128 } else { 0 };
                    deg - aug[a * m + b] as i128
                })
                .collect()
        })
        .collect();
    let trees = bareiss_det(lap)?;
    if trees < 0 {
        return None;
    }
    let mut circuits = trees as u128;
    for &w in &active {
        circuits = circuits.checked_mul(factorial(out(w) - 1)?)?;
    }
    if t == u {
        circuits = circuits.checked_mul(out(u) as u128)?;
    }
    let mut multiplicities = 1u128;
    for &c in &q.counts {
        multiplicities = multiplicities.checked_mul(factorial(c as u64)?)?;
    }
    Some(circuits / multiplicities)
}

fn factorial(k: u64) -> Option<u128> {
    (1..=k as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Exact integer determinant by fraction-free elimination.
fn bareiss_det(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let p = (k + 1..n).find(|&i| a[i][k] != 0)?;
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

/// `Pr{M_X = Q | X₁ = u} = |T_Q^n(u)| · d^{−(n−1)[H(Q←|Q̄) + D(Q‖P)]}`.
pub fn type_probability(ch: &MarkovPauliChannel, q: &MarkovType) -> Result<f64> {
    if q.m != ch.m() {
        return invalid("type and channel alphabets differ");
    }
    let size = type_class_size(q)?;
    if size == 0 {
        return Ok(0.0);
    }
    let d = ch.d();
    let div = kl_conditional(&q.joint(), ch.transition());
    if div.is_infinite() {
        return Ok(0.0);
    }
    let exponent = (q.n - 1) as f64 * (q.conditional_entropy(d) + div);
    Ok(size as f64 * (d as f64).powf(-exponent))
}

/// Eq. (3)-style bound on the class size, `d^{(n−1) H(Q←|Q̄)}`.
pub fn class_size_bound(q: &MarkovType, d: u32) -> f64 {
    (d as f64).powf((q.n - 1) as f64 * q.conditional_entropy(d))
}

/// Bound on the type probability, `d^{−(n−1) D(Q‖P)}`.
pub fn type_probability_bound(ch: &MarkovPauliChannel, q: &MarkovType) -> f64 {
    let div = kl_conditional(&q.joint(), ch.transition());
    (ch.d() as f64).powf(-((q.n - 1) as f64) * div)
}

//! Random stabilizer-code ensembles under minimum-entropy coset decoding.
//!
//! For a self-orthogonal `L` of dimension `n − k`, the cosets of `L⊥` are
//! labelled by syndromes `(⟨b_1,x⟩, …, ⟨b_{n−k},x⟩)`. Each coset contributes the
//! vector whose Markov type has the smallest conditional entropy; ties go to
//! the smallest vector index. The failure bound of the code is the channel
//! probability outside the chosen set.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{log_base, MarkovPauliChannel};
use crate::error::{invalid, Error, Result};
use crate::exponent::exponent_type_oracle;
use crate::field::PrimeField;
use crate::symplectic::{enumerate_isotropic, sample_isotropic, space_size, Subspace, SympVector};
use crate::types::{distinct_type_count, EntropyKey};

/// A code `L` with its decoder's correctable set `Γ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSample {
    pub subspace: Subspace,
    /// One representative per coset of `L⊥`, indexed by syndrome.
    pub representatives: Vec<SympVector>,
    /// `Σ_{x∉Γ₀} P_n(x)`.
    pub failure_bound: f64,
}

impl CodeSample {
    pub fn new(subspace: Subspace, ch: &MarkovPauliChannel) -> Result<Self> {
        let table = SequenceTable::new(subspace.field(), subspace.n(), ch)?;
        table.sample(subspace)
    }

    /// `Σ_{x∉Γ₀} P_n(x)` summed term by term over the complement.
    pub fn failure_bound_direct(&self, ch: &MarkovPauliChannel) -> Result<f64> {
        let table = SequenceTable::new(self.subspace.field(), self.subspace.n(), ch)?;
        let mut chosen = vec![false; table.probs.len()];
        for r in &self.representatives {
            chosen[r.index() as usize] = true;
        }
        Ok(table
            .probs
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| !c)
            .map(|(p, _)| p)
            .sum())
    }
}

/// Minimum-entropy representative of every coset of `L⊥`, indexed by syndrome.
pub fn min_entropy_representatives(l: &Subspace) -> Result<Vec<SympVector>> {
    check_code(l)?;
    let keys = entropy_keys(l.field(), l.n())?;
    let reps = representatives(l, &keys);
    Ok(reps
        .into_iter()
        .map(|i| SympVector::from_index(l.field(), l.n(), i as u64))
        .collect())
}

/// `1 − Σ_{x∈Γ₀} P_n(x)`, clamped to `[0, 1]`.
pub fn failure_bound(representatives: &[SympVector], ch: &MarkovPauliChannel) -> Result<f64> {
    let mut kept = 0.0;
    for r in representatives {
        if r.field().modulus() != ch.d() {
            return invalid(format!(
                "vector over F_{} does not match channel over d = {}",
                r.field().modulus(),
                ch.d()
            ));
        }
        kept += ch.sequence_probability(&r.symbols())?;
    }
    Ok((1.0 - kept).clamp(0.0, 1.0))
}

fn check_code(l: &Subspace) -> Result<()> {
    if l.n() < 2 {
        return invalid(format!("Markov types need n ≥ 2, got n = {}", l.n()));
    }
    if !l.is_self_orthogonal() {
        return invalid("code subspace is not self-orthogonal");
    }
    space_size(l.field(), l.n())?;
    Ok(())
}

/// Entropy key of every vector of `F_d^{2n}`, in index order.
fn entropy_keys(field: PrimeField, n: usize) -> Result<Vec<EntropyKey>> {
    let size = space_size(field, n)?;
    let m = (field.modulus() * field.modulus()) as usize;
    (0..size)
        .into_par_iter()
        .map(|i| {
            let symbols = SympVector::from_index(field, n, i).symbols();
            let mut counts = vec![0u32; m * m];
            for w in symbols.windows(2) {
                counts[w[0] * m + w[1]] += 1;
            }
            EntropyKey::from_counts(m, &counts).ok_or(Error::ResourceLimit {
                what: "exact entropy key width",
                required: n as u128,
                limit: 0,
            })
        })
        .collect()
}

/// Syndrome of every vector, in index order, as a base-`d` integer.
fn syndromes(l: &Subspace) -> Vec<u32> {
    let d = l.field().modulus();
    let len = 2 * l.n();
    let functionals = l.syndrome_functionals();
    let size = d.pow(len as u32) as usize;
    let mut coords = vec![0u32; len];
    let mut s = vec![0u32; functionals.len()];
    let mut out = Vec::with_capacity(size);
    for _ in 0..size {
        out.push(s.iter().rev().fold(0, |acc, &x| acc * d + x));
        // Odometer step; a wrap from d − 1 to 0 also adds w[c] mod d.
        let mut c = len;
        while c > 0 {
            c -= 1;
            for (sj, w) in s.iter_mut().zip(&functionals) {
                *sj = (*sj + w[c]) % d;
            }
            if coords[c] + 1 < d {
                coords[c] += 1;
                break;
            }
            coords[c] = 0;
        }
    }
    out
}

/// Index of the chosen vector for each syndrome.
fn representatives(l: &Subspace, keys: &[EntropyKey]) -> Vec<usize> {
    let cosets = (l.field().modulus() as usize).pow(l.dim() as u32);
    let mut best: Vec<Option<usize>> = vec![None; cosets];
    for (x, s) in syndromes(l).into_iter().enumerate() {
        let slot = &mut best[s as usize];
        match slot {
            Some(b) if keys[*b] <= keys[x] => {}
            _ => *slot = Some(x),
        }
    }
    best.into_iter().map(|b| b.expect("every syndrome is attained")).collect()
}

/// Per-vector data shared by all codes of one ensemble.
struct SequenceTable {
    field: PrimeField,
    n: usize,
    keys: Vec<EntropyKey>,
    probs: Vec<f64>,
}

impl SequenceTable {
    fn new(field: PrimeField, n: usize, ch: &MarkovPauliChannel) -> Result<Self> {
        if ch.d() != field.modulus() {
            return invalid(format!(
                "code over F_{} does not match channel over d = {}",
                field.modulus(),
                ch.d()
            ));
        }
        if n < 2 {
            return invalid(format!("Markov types need n ≥ 2, got n = {n}"));
        }
        let keys = entropy_keys(field, n)?;
        let probs = (0..keys.len() as u64)
            .into_par_iter()
            .map(|i| {
                let symbols = SympVector::from_index(field, n, i).symbols();
                ch.sequence_probability_unchecked(symbols[0], &symbols)
            })
            .collect();
        Ok(Self { field, n, keys, probs })
    }

    fn sample(&self, subspace: Subspace) -> Result<CodeSample> {
        if subspace.field() != self.field || subspace.n() != self.n {
            return invalid("subspace does not match the ensemble's (d, n)");
        }
        check_code(&subspace)?;
        let reps = representatives(&subspace, &self.keys);
        let kept: f64 = reps.iter().map(|&i| self.probs[i]).sum();
        Ok(CodeSample {
            representatives: reps
                .into_iter()
                .map(|i| SympVector::from_index(self.field, self.n, i as u64))
                .collect(),
            subspace,
            failure_bound: (1.0 - kept).clamp(0.0, 1.0),
        })
    }

    fn bound_only(&self, subspace: &Subspace) -> f64 {
        let kept: f64 = representatives(subspace, &self.keys).iter().map(|&i| self.probs[i]).sum();
        (1.0 - kept).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    /// Every self-orthogonal subspace of dimension `n − k`.
    Exhaustive,
    /// `count` uniform draws; draw `i` uses stream `i` of a generator seeded
    /// with `seed`, so the result does not depend on scheduling.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub n: usize,
    pub k: usize,
    /// `k / n`.
    pub rate: f64,
    pub mode: EnsembleMode,
    pub samples: usize,
    pub mean: f64,
    /// Standard error of the mean; zero in exhaustive mode.
    pub std_error: f64,
    /// Half-width of the 95% normal-approximation interval; zero in exhaustive mode.
    pub ci95: f64,
    pub values: Vec<f64>,
    /// `None` when type enumeration at this `n` exceeds the resource guard.
    pub analytic_bound: Option<f64>,
}

pub fn ensemble_average(n: usize, k: usize, ch: &MarkovPauliChannel, mode: EnsembleMode) -> Result<EnsembleReport> {
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    let field = ch.transition().field();
    let table = SequenceTable::new(field, n, ch)?;
    let values: Vec<f64> = match mode {
        EnsembleMode::Exhaustive => {
            let all = enumerate_isotropic(field, n, k)?;
            all.par_iter().map(|l| table.bound_only(l)).collect()
        }
        EnsembleMode::Sampled { count, seed } => {
            if count == 0 {
                return invalid("sample count must be positive");
            }
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    sample_isotropic(field, n, k, &mut rng).map(|l| table.bound_only(&l))
                })
                .collect::<Result<_>>()?
        }
    };
    let samples = values.len();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let (std_error, ci95) = match mode {
        EnsembleMode::Exhaustive => (0.0, 0.0),
        EnsembleMode::Sampled { .. } if samples > 1 => {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
            let se = (var / samples as f64).sqrt();
            (se, 1.959_963_984_540_054 * se)
        }
        EnsembleMode::Sampled { .. } => (0.0, 0.0),
    };
    let rate = k as f64 / n as f64;
    let analytic_bound = match analytic_final_bound(n, rate, ch) {
        Ok(b) => Some(b),
        Err(Error::ResourceLimit { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(EnsembleReport {
        n,
        k,
        rate,
        mode,
        samples,
        mean,
        std_error,
        ci95,
        values,
        analytic_bound,
    })
}

/// Outcome of the counting identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingReport {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    /// `|A|`, the number of self-orthogonal subspaces of dimension `n − k`.
    pub ensemble_size: u64,
    /// `(d^{n+k} − 1, d^{2n} − 1)`.
    pub expected: (u64, u64),
    /// `|{L : x ∈ L⊥ ∖ {0}}|` for every `x`, in index order.
    pub counts: Vec<u64>,
    /// Nonzero vectors whose count disagrees with the expected ratio.
    pub mismatches: usize,
}

impl CountingReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.counts.first() == Some(&0)
    }

    pub fn ratio(&self) -> f64 {
        self.expected.0 as f64 / self.expected.1 as f64
    }
}

/// Checks `|{L ∈ A : x ∈ L⊥∖{0}}| / |A| = (d^{n+k} − 1)/(d^{2n} − 1)` for every
/// nonzero `x` with exact integer arithmetic.
pub fn counting_ratio_check(n: usize, k: usize, d: u32) -> Result<CountingReport> {
    let field = PrimeField::new(d)?;
    let size = space_size(field, n)?;
    let ensemble = enumerate_isotropic(field, n, k)?;
    let mut counts = vec![0u64; size as usize];
    for l in &ensemble {
        for x in l.dual().elements() {
            if !x.is_zero() {
                counts[x.index() as usize] += 1;
            }
        }
    }
    let num = (d as u64).pow((n + k) as u32) - 1;
    let den = size - 1;
    let total = ensemble.len() as u64;
    let mismatches = counts
        .iter()
        .skip(1)
        .filter(|&&c| c as u128 * den as u128 != total as u128 * num as u128)
        .count();
    Ok(CountingReport {
        n,
        k,
        d,
        ensemble_size: total,
        expected: (num, den),
        counts,
        mismatches,
    })
}

/// `d³ |Q_n|² d^{−(n−1)·min_{Q∈Q_n} [D(Q‖P) + |1 − R − H(Q←|Q̄)|⁺]}`.
pub fn analytic_final_bound(n: usize, rate: f64, ch: &MarkovPauliChannel) -> Result<f64> {
    let p = ch.transition();
    let d = p.d() as f64;
    let types = distinct_type_count(p.m(), n)? as f64;
    let min = exponent_type_oracle(p, rate, n)?;
    Ok(d.powi(3) * types * types * d.powf(-((n - 1) as f64) * min))
}

/// `⌈R n⌉`, ignoring rounding noise just above an integer.
pub fn code_dimension(n: usize, rate: f64) -> usize {
    (rate * n as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    /// Every mean failure bound is exactly zero.
    ExactZero,
    Slope {
        /// Least-squares slope of `−log_d(mean)` against `n`.
        slope: f64,
        intercept: f64,
        /// Root-mean-square residual of the fit.
        rms_residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub outcome: FitOutcome,
    /// Values of `n` used by the fit.
    pub used: Vec<usize>,
    /// Values of `n` dropped for a nonpositive mean.
    pub excluded: Vec<usize>,
}

/// Fits `−log_d(mean failure bound) ≈ a + b·n` over `(n, mean)` points.
pub fn exponent_fit(points: &[(usize, f64)], d: u32) -> Result<ExponentFit> {
    let (pos, zero): (Vec<_>, Vec<_>) = points.iter().partition(|(_, v)| *v > 0.0);
    let excluded: Vec<usize> = zero.iter().map(|(n, _)| *n).collect();
    if pos.is_empty() && !points.is_empty() {
        return Ok(ExponentFit {
            outcome: FitOutcome::ExactZero,
            used: Vec::new(),
            excluded,
        });
    }
    if pos.len() < 3 {
        return invalid(format!("need at least 3 positive failure bounds, got {}", pos.len()));
    }
    let ln_d = log_base(d);
    let xs: Vec<f64> = pos.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = pos.iter().map(|(_, v)| -v.ln() / ln_d).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("fit needs at least two distinct values of n");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms_residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(ExponentFit {
        outcome: FitOutcome::Slope {
            slope,
            intercept,
            rms_residual,
        },
        used: pos.iter().map(|(n, _)| *n).collect(),
        excluded,
    })
}

/// Convenience wrapper over [`exponent_fit`] for ensemble reports.
pub fn exponent_fit_reports(reports: &[EnsembleReport], d: u32) -> Result<ExponentFit> {
    let points: Vec<(usize, f64)> = reports.iter().map(|r| (r.n, r.mean)).collect();
    exponent_fit(&points, d)
}

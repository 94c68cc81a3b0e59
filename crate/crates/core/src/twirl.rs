//! Weyl operators and the Pauli distribution `P_A` of a single-system channel.
//!
//! Expanding each Kraus operator in the Weyl basis, `A_x = Σ_y a_{xy} N_y`,
//! gives `P_A(y) = Σ_x |a_{xy}|²`. Because `Tr(N_y† N_z) = d·δ_{yz}`, the
//! coefficients are `a_{xy} = Tr(N_y† A_x)/d`.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::MarkovPauliChannel;
use crate::error::{invalid, Result};
use crate::field::PrimeField;
use crate::symplectic::PauliIndex;

/// Trace-preservation tolerance for Kraus maps.
pub const TP_TOLERANCE: f64 = 1e-9;

/// A dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return invalid(format!("matrix row {i} has {} entries, expected {dim}", r.len()));
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `N_{(i,j)} = X^i Z^j` with `X|k⟩ = |k−1 mod d⟩` and `Z|k⟩ = ω^k|k⟩`,
/// `ω = e^{2πi/d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylOperator {
    index: PauliIndex,
    matrix: CMatrix,
}

impl WeylOperator {
    pub fn new(field: PrimeField, index: PauliIndex) -> Self {
        let d = field.modulus() as usize;
        let (i, j) = (index.i as usize % d, index.j as usize % d);
        let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64);
        // X^i Z^j |k⟩ = ω^{jk} |k − i⟩
        let mut matrix = CMatrix::zeros(d);
        for k in 0..d {
            matrix.set((k + d - i) % d, k, omega(j * k));
        }
        Self { index, matrix }
    }

    pub fn from_symbol(field: PrimeField, symbol: usize) -> Self {
        Self::new(field, PauliIndex::from_symbol(symbol, field.modulus()))
    }

    pub fn index(&self) -> PauliIndex {
        self.index
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// All `d²` operators in symbol order.
    pub fn basis(field: PrimeField) -> Vec<WeylOperator> {
        let m = (field.modulus() * field.modulus()) as usize;
        (0..m).map(|s| Self::from_symbol(field, s)).collect()
    }
}

/// A single-system CP map given by its Kraus operators, checked to be trace
/// preserving: `Σ A_x† A_x = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    field: PrimeField,
    ops: Vec<CMatrix>,
}

impl KrausMap {
    pub fn new(d: u32, ops: Vec<CMatrix>) -> Result<Self> {
        let field = PrimeField::new(d)?;
        if ops.is_empty() {
            return invalid("Kraus map needs at least one operator");
        }
        let dim = d as usize;
        if let Some((i, op)) = ops.iter().enumerate().find(|(_, op)| op.dim() != dim) {
            return invalid(format!("Kraus operator {i} is {0}x{0}, expected {dim}x{dim}", op.dim()));
        }
        let mut sum = CMatrix::zeros(dim);
        for op in &ops {
            let p = op.adjoint().mul(op);
            for (s, x) in sum.data.iter_mut().zip(p.data) {
                *s += x;
            }
        }
        let err = sum.max_diff(&CMatrix::identity(dim));
        if err > TP_TOLERANCE {
            return invalid(format!("Kraus map is not trace preserving: max |ΣA†A − I| = {err:e}"));
        }
        Ok(Self { field, ops })
    }

    pub fn d(&self) -> u32 {
        self.field.modulus()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }
}

/// The Pauli distribution of a trace-preserving map, indexed by symbol.
pub fn pauli_twirl(map: &KrausMap) -> Vec<f64> {
    let d = map.d() as f64;
    WeylOperator::basis(map.field)
        .iter()
        .map(|n| {
            let n_adj = n.matrix().adjoint();
            map.ops
                .iter()
                .map(|a| (n_adj.mul(a).trace() / d).norm_sqr())
                .sum()
        })
        .collect()
}

/// The Weyl-diagonal map with Kraus operators `√p_y · N_y`, indexed by symbol.
pub fn weyl_kraus_map(d: u32, probs: &[f64]) -> Result<KrausMap> {
    let field = PrimeField::new(d)?;
    let m = (d * d) as usize;
    if probs.len() != m {
        return invalid(format!("expected {m} Weyl probabilities, got {}", probs.len()));
    }
    if let Some((y, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
        return invalid(format!("Weyl probability {y} is {p}, must be nonnegative"));
    }
    let ops = WeylOperator::basis(field)
        .iter()
        .zip(probs)
        .map(|(w, &p)| w.matrix().scale(Complex64::new(p.sqrt(), 0.0)))
        .collect();
    KrausMap::new(d, ops)
}

/// A random trace-preserving map: stack random operators `G_x`, then
/// whiten by `S^{-1/2}` with `S = Σ G_x†G_x` via Cholesky (`S = LL†`,
/// `A_x = G_x L^{-†}`).
pub fn random_kraus_map<R: Rng + ?Sized>(rng: &mut R, d: u32, count: usize) -> Result<KrausMap> {
    let field = PrimeField::new(d)?;
    let d = field.modulus() as usize;
    let c = |re: f64| Complex64::new(re, 0.0);
    let gs: Vec<CMatrix> = (0..count)
        .map(|_| {
            CMatrix::from_rows(
                (0..d)
                    .map(|_| (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
                    .collect(),
            )
            .expect("square")
        })
        .collect();
    let mut s = CMatrix::zeros(d);
    for g in &gs {
        let p = g.adjoint().mul(g);
        for (a, b) in s.data.iter_mut().zip(p.data) {
            *a += b;
        }
    }
    // Cholesky S = L L†.
    let mut l = CMatrix::zeros(d);
    for i in 0..d {
        for j in 0..=i {
            let mut sum = s.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k).conj();
            }
            if i == j {
                l.set(i, i, c(sum.re.sqrt()));
            } else {
                let v = sum / l.get(j, j);
                l.set(i, j, v);
            }
        }
    }
    // Invert lower-triangular L, then A = G (L^{-1})†.
    let mut linv = CMatrix::zeros(d);
    for col in 0..d {
        for i in 0..d {
            let mut sum = if i == col { c(1.0) } else { c(0.0) };
            for k in 0..i {
                sum -= l.get(i, k) * linv.get(k, col);
            }
            linv.set(i, col, sum / l.get(i, i));
        }
    }
    let w = linv.adjoint();
    let ops = gs.iter().map(|g| g.mul(&w)).collect();
    KrausMap::new(d as u32, ops)
}

/// `P_{A_n}(y) = ∏ P_A(y_i)` for the memoryless channel `A^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    single: Vec<f64>,
    n: usize,
}

impl ProductDistribution {
    pub fn probability(&self, y: &[usize]) -> Result<f64> {
        if y.len() != self.n {
            return invalid(format!("sequence of length {}, expected {}", y.len(), self.n));
        }
        y.iter()
            .enumerate()
            .map(|(i, &s)| {
                self.single
                    .get(s)
                    .copied()
                    .ok_or_else(|| crate::Error::InvalidArgument(format!("symbol {s} at position {i} out of range")))
            })
            .product()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The same law written as a Markov chain with identical rows.
    pub fn as_markov(&self, d: u32) -> Result<MarkovPauliChannel> {
        MarkovPauliChannel::memoryless(d, &self.single)
    }
}

pub fn product_extension(single: &[f64], n: usize) -> Result<ProductDistribution> {
    if n == 0 {
        return invalid("product extension needs n ≥ 1");
    }
    Ok(ProductDistribution {
        single: single.to_vec(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn weyl_diagonal_map_round_trips() {
        let probs = [0.4, 0.0, 0.1, 0.05, 0.15, 0.1, 0.05, 0.1, 0.05];
        let p = pauli_twirl(&weyl_kraus_map(3, &probs).unwrap());
        for (a, b) in p.iter().zip(probs) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(weyl_kraus_map(2, &[0.5, 0.5]).is_err());
        assert!(weyl_kraus_map(2, &[0.5, 0.6, -0.1, 0.0]).is_err());
        assert!(weyl_kraus_map(2, &[0.5, 0.6, 0.0, 0.0]).is_err());
    }

    #[test]
    fn weyl_operators_are_unitary_with_identity_at_origin() {
        for d in [2u32, 3, 5] {
            let f = PrimeField::new(d).unwrap();
            let id = CMatrix::identity(d as usize);
            assert!(WeylOperator::new(f, PauliIndex::new(0, 0)).matrix().max_diff(&id) < 1e-15);
            for w in WeylOperator::basis(f) {
                let u = w.matrix().adjoint().mul(w.matrix());
                assert!(u.max_diff(&id) < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_action_matches_definition() {
        let f = PrimeField::new(3).unwrap();
        let x = WeylOperator::new(f, PauliIndex::new(1, 0));
        // X|0⟩ = |2⟩, X|1⟩ = |0⟩
        assert_eq!(x.matrix().get(2, 0), c(1.0));
        assert_eq!(x.matrix().get(0, 1), c(1.0));
        let z = WeylOperator::new(f, PauliIndex::new(0, 1));
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((z.matrix().get(1, 1) - w).norm() < 1e-15);
    }

    #[test]
    fn weyl_basis_is_trace_orthogonal() {
        let f = PrimeField::new(3).unwrap();
        let basis = WeylOperator::basis(f);
        for (a, wa) in basis.iter().enumerate() {
            for (b, wb) in basis.iter().enumerate() {
                let t = wa.matrix().adjoint().mul(wb.matrix()).trace();
                let expected = if a == b { 3.0 } else { 0.0 };
                assert!((t - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_channel_twirls_to_delta() {
        let map = KrausMap::new(2, vec![CMatrix::identity(2)]).unwrap();
        let p = pauli_twirl(&map);
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1..].iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let err = KrausMap::new(2, vec![CMatrix::identity(2).scale(c(0.9))]).unwrap_err();
        assert!(err.to_string().contains("trace preserving"));
        assert!(KrausMap::new(2, vec![CMatrix::identity(3)]).is_err());
        assert!(KrausMap::new(2, vec![]).is_err());
    }

    /// Expands `a` in the Weyl basis by solving the `d² × d²` linear system
    /// `vec(a) = Σ_y c_y vec(N_y)` with Gaussian elimination.
    fn expand_by_solving(f: PrimeField, a: &CMatrix) -> Vec<Complex64> {
        let basis = WeylOperator::basis(f);
        let m = basis.len();
        let mut sys: Vec<Vec<Complex64>> = (0..m)
            .map(|entry| {
                let (r, col) = (entry / a.dim(), entry % a.dim());
                let mut row: Vec<Complex64> = basis.iter().map(|w| w.matrix().get(r, col)).collect();
                row.push(a.get(r, col));
                row
            })
            .collect();
        for col in 0..m {
            let p = (col..m).max_by(|&i, &j| sys[i][col].norm().total_cmp(&sys[j][col].norm())).unwrap();
            sys.swap(col, p);
            for i in 0..m {
                if i != col {
                    let factor = sys[i][col] / sys[col][col];
                    for j in col..=m {
                        let v = sys[col][j];
                        sys[i][j] -= factor * v;
                    }
                }
            }
        }
        (0..m).map(|i| sys[i][m] / sys[i][i]).collect()
    }

    #[test]
    fn amplitude_damping_against_linear_solve() {
        let f = PrimeField::binary();
        let eta: f64 = 0.3;
        let k0 = CMatrix::from_rows(vec![vec![c(1.0), c(0.0)], vec![c(0.0), c((1.0 - eta).sqrt())]]).unwrap();
        let k1 = CMatrix::from_rows(vec![vec![c(0.0), c(eta.sqrt())], vec![c(0.0), c(0.0)]]).unwrap();
        let map = KrausMap::new(2, vec![k0.clone(), k1.clone()]).unwrap();
        let p = pauli_twirl(&map);
        let mut oracle = vec![0.0; 4];
        for k in [&k0, &k1] {
            for (o, coef) in oracle.iter_mut().zip(expand_by_solving(f, k)) {
                *o += coef.norm_sqr();
            }
        }
        for (a, b) in p.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12, "{p:?} vs {oracle:?}");
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let s = (1.0 - eta).sqrt();
        assert!((p[0] - (1.0 + s).powi(2) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn random_qutrit_map_twirl_matches_linear_solve() {
        let f = PrimeField::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let map = random_kraus_map(&mut rng, 3, 3).unwrap();
        let p = pauli_twirl(&map);
        let mut oracle = vec![0.0; 9];
        for k in map.ops() {
            for (o, coef) in oracle.iter_mut().zip(expand_by_solving(f, k)) {
                *o += coef.norm_sqr();
            }
        }
        for (a, b) in p.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn product_extension_examples() {
        let single = [0.7, 0.1, 0.15, 0.05];
        let n1 = product_extension(&single, 1).unwrap();
        for s in 0..4 {
            assert_eq!(n1.probability(&[s]).unwrap(), single[s]);
        }
        let delta = product_extension(&[0.0, 0.0, 1.0, 0.0], 3).unwrap();
        assert_eq!(delta.probability(&[2, 2, 2]).unwrap(), 1.0);
        assert_eq!(delta.probability(&[2, 1, 2]).unwrap(), 0.0);
        assert!(product_extension(&single, 0).is_err());
        assert!(n1.probability(&[0, 1]).is_err());
    }

    #[test]
    fn product_extension_equals_memoryless_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let single = [0.5, 0.2, 0.2, 0.1];
        for n in 1..=6 {
            let prod = product_extension(&single, n).unwrap();
            let chain = prod.as_markov(2).unwrap();
            for _ in 0..50 {
                let y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
                let a = prod.probability(&y).unwrap();
                let b = chain.sequence_probability(&y).unwrap();
                assert!((a - b).abs() <= 1e-15 * a.max(1e-300));
            }
        }
    }
}

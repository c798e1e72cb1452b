//! Exact matrices: phase-monomial unitaries, dense cyclotomic matrices and
//! sparse Gaussian elimination.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::cyclotomic::{CyclotomicScalar, Phase};
use crate::error::{Error, Result};
use crate::limits;

/// A generalized permutation matrix with root-of-unity entries:
/// `M·e_j = phases[j]·e_{targets[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialMatrix {
    targets: Vec<u32>,
    phases: Vec<Phase>,
}

impl MonomialMatrix {
    pub fn identity(n: usize) -> Self {
        MonomialMatrix {
            targets: (0..n as u32).collect(),
            phases: vec![Phase::ONE; n],
        }
    }

    pub fn diagonal(phases: Vec<Phase>) -> Self {
        MonomialMatrix {
            targets: (0..phases.len() as u32).collect(),
            phases,
        }
    }

    /// Fails unless `targets` is a permutation of `0..n`.
    pub fn new(targets: Vec<u32>, phases: Vec<Phase>) -> Result<Self> {
        let n = targets.len();
        if phases.len() != n {
            return Err(Error::Precondition("target and phase lengths differ".into()));
        }
        let mut seen = vec![false; n];
        for &t in &targets {
            let t = t as usize;
            if t >= n || seen[t] {
                return Err(Error::Precondition("targets do not form a permutation".into()));
            }
            seen[t] = true;
        }
        Ok(MonomialMatrix { targets, phases })
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// Entry at `(row, col)`, or `None` if it is zero.
    pub fn entry(&self, row: usize, col: usize) -> Option<Phase> {
        (self.targets[col] as usize == row).then(|| self.phases[col])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let (targets, phases) = other
            .targets
            .iter()
            .zip(&other.phases)
            .map(|(&t, &p)| (self.targets[t as usize], p * self.phases[t as usize]))
            .unzip();
        MonomialMatrix { targets, phases }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut targets = vec![0; n];
        let mut phases = vec![Phase::ONE; n];
        for (j, (&t, &p)) in self.targets.iter().zip(&self.phases).enumerate() {
            targets[t as usize] = j as u32;
            phases[t as usize] = p.conj();
        }
        MonomialMatrix { targets, phases }
    }

    pub fn scale(&self, p: Phase) -> Self {
        MonomialMatrix {
            targets: self.targets.clone(),
            phases: self.phases.iter().map(|&q| q * p).collect(),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.dim());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Kronecker product; basis index `(a, b)` maps to `a·dim(other) + b`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.dim();
        let mut targets = Vec::with_capacity(self.dim() * m);
        let mut phases = Vec::with_capacity(self.dim() * m);
        for (&ta, &pa) in self.targets.iter().zip(&self.phases) {
            for (&tb, &pb) in other.targets.iter().zip(&other.phases) {
                targets.push(ta * m as u32 + tb);
                phases.push(pa * pb);
            }
        }
        MonomialMatrix { targets, phases }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim() as u32;
        let mut targets = self.targets.clone();
        targets.extend(other.targets.iter().map(|&t| t + n));
        let mut phases = self.phases.clone();
        phases.extend_from_slice(&other.phases);
        MonomialMatrix { targets, phases }
    }

    pub fn is_identity(&self) -> bool {
        self.as_scalar() == Some(Phase::ONE)
    }

    /// `Some(μ)` when the matrix is `μ·I`.
    pub fn as_scalar(&self) -> Option<Phase> {
        if self.targets.iter().enumerate().any(|(j, &t)| t as usize != j) {
            return None;
        }
        let first = *self.phases.first()?;
        self.phases.iter().all(|&p| p == first).then_some(first)
    }

    /// `Some(μ)` when `self = μ·other`.
    pub fn ratio(&self, other: &Self) -> Option<Phase> {
        if self.targets != other.targets || self.dim() == 0 {
            return None;
        }
        let mu = self.phases[0] * other.phases[0].conj();
        self.phases
            .iter()
            .zip(&other.phases)
            .all(|(&a, &b)| a == mu * b)
            .then_some(mu)
    }

    /// Exact unitarity: a permutation pattern with unimodular entries.
    pub fn is_unitary(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        self.targets.iter().all(|&t| {
            let t = t as usize;
            t < seen.len() && !std::mem::replace(&mut seen[t], true)
        })
    }

    /// Least `k ≥ 1` with `M^k = I`, searched up to `bound`.
    pub fn order(&self, bound: u64) -> Option<u64> {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.mul(self);
        }
        None
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let n = self.dim();
        limits_check(n, limits::DENSE_DIM_CAP)?;
        let mut m = DenseMatrix::zeros(n, n);
        for (j, (&t, &p)) in self.targets.iter().zip(&self.phases).enumerate() {
            m.set(t as usize, j, CyclotomicScalar::from_phase(p)?);
        }
        Ok(m)
    }

    /// Nonzero entries in column-major order, as `(row·n + col, phase)`.
    pub fn flat_entries(&self) -> Vec<(usize, Phase)> {
        let n = self.dim();
        let mut v: Vec<(usize, Phase)> = self
            .targets
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(j, (&t, &p))| (t as usize * n + j, p))
            .collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }
}

pub(crate) fn limits_check(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::DimensionCap {
            dim: dim as u128,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Row-major matrix over the cyclotomic numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CyclotomicScalar>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![CyclotomicScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, CyclotomicScalar::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &CyclotomicScalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: CyclotomicScalar) {
        self.data[r * self.cols + c] = x;
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &CyclotomicScalar) -> Result<()> {
        let i = r * self.cols + c;
        self.data[i] = self.data[i].try_add(x)?;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CyclotomicScalar::is_zero)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Precondition("dimension mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &a.try_mul(b)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Precondition("dimension mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_>>()?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_complex())
    }

    /// Largest singular value, by floating-point SVD.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.to_complex()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Nested arrays of cyclotomic serializations.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<&CyclotomicScalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect();
        serde_json::to_value(rows).expect("matrix serializes")
    }
}

/// A sparse vector over the cyclotomic numbers.
pub type SparseVector = BTreeMap<usize, CyclotomicScalar>;

pub fn sparse_from_phases(entries: &[(usize, Phase)]) -> Result<SparseVector> {
    entries
        .iter()
        .map(|&(i, p)| Ok((i, CyclotomicScalar::from_phase(p)?)))
        .collect()
}

/// Incremental row echelon form for rank computations.
#[derive(Default)]
pub struct Echelon {
    // pivot index -> reduced row with leading coefficient 1 at the pivot
    rows: BTreeMap<usize, SparseVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub vectors: usize,
    pub rank: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis and keeps it if independent.
    pub fn insert(&mut self, mut v: SparseVector) -> Result<bool> {
        v.retain(|_, c| !c.is_zero());
        loop {
            let Some((&lead, _)) = v.iter().find(|(k, _)| self.rows.contains_key(k)) else {
                break;
            };
            let c = v[&lead].clone();
            let row = &self.rows[&lead];
            for (k, x) in row {
                let d = x.try_mul(&c)?;
                let e = v.entry(*k).or_insert_with(CyclotomicScalar::zero);
                *e = e.try_sub(&d)?;
                if e.is_zero() {
                    v.remove(k);
                }
            }
        }
        let Some((&lead, c)) = v.iter().next() else {
            return Ok(false);
        };
        let inv = c.inverse()?;
        let mut row = SparseVector::new();
        for (k, x) in v {
            row.insert(k, x.try_mul(&inv)?);
        }
        // keep the basis fully reduced at the new pivot
        let pivot_row = row.clone();
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&lead).cloned() {
                for (k, x) in &pivot_row {
                    let d = x.try_mul(&c)?;
                    let e = other.entry(*k).or_insert_with(CyclotomicScalar::zero);
                    *e = e.try_sub(&d)?;
                    if e.is_zero() {
                        other.remove(k);
                    }
                }
            }
        }
        self.rows.insert(lead, row);
        Ok(true)
    }
}

/// Exact rank of a family of sparse vectors.
pub fn rank<I: IntoIterator<Item = SparseVector>>(vectors: I) -> Result<RankReport> {
    let mut e = Echelon::new();
    let mut count = 0;
    for v in vectors {
        count += 1;
        e.insert(v)?;
    }
    Ok(RankReport {
        vectors: count,
        rank: e.rank(),
    })
}

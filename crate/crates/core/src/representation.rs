//! Explicit matrix models of `ℂ_Θ Γ`: clock and shift matrices, the
//! block-built existence witness, and the regular representation on `ℓ²(Γ)`.
//!
//! A [`Representation`] keeps its generators as a list of factors, each a
//! phase-monomial matrix per generator. Factors are combined either by
//! tensor product or by direct sum; relation checks work factor by factor,
//! so huge tensor dimensions never have to be materialized.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{normal_order_cocycle, AlgebraElement};
use crate::cyclotomic::{CyclotomicScalar, Phase};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Subgroup};
use crate::limits;
use crate::matrix::{limits_check, DenseMatrix, Echelon, MonomialMatrix, RankReport};
use crate::triple::CcrTriple;

/// `(v, w)` for `λ = exp(2πi/n)`: `w = diag(1, λ, …, λ^{n-1})`,
/// `v·δ_i = δ_{i-1 mod n}`, so that `v·w = λ·w·v`.
pub fn clock_shift(n: usize) -> (MonomialMatrix, MonomialMatrix) {
    assert!(n >= 2, "clock and shift need n ≥ 2");
    clock_shift_for(Phase::root_of_unity(n as u64))
}

/// Clock and shift of size `order(λ)` satisfying `v·w = λ·w·v`; `λ` need not
/// be the primitive root `exp(2πi/n)`.
pub fn clock_shift_for(lambda: Phase) -> (MonomialMatrix, MonomialMatrix) {
    let n = lambda.order() as usize;
    let v = MonomialMatrix::new(
        (0..n as u32).map(|i| (i + n as u32 - 1) % n as u32).collect(),
        vec![Phase::ONE; n],
    )
    .expect("cyclic shift is a permutation");
    let w = MonomialMatrix::diagonal((0..n as i64).map(|k| lambda.pow(k)).collect());
    (v, w)
}

/// The `n²` monomials `w^k v^l` as flattened sparse vectors.
pub fn clock_shift_span(n: usize) -> Result<RankReport> {
    let (v, w) = clock_shift(n);
    let mut e = Echelon::new();
    let mut count = 0;
    for k in 0..n as u64 {
        for l in 0..n as u64 {
            let m = w.pow(k).mul(&v.pow(l));
            e.insert(crate::matrix::sparse_from_phases(&m.flat_entries())?)?;
            count += 1;
        }
    }
    Ok(RankReport {
        vectors: count,
        rank: e.rank(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    Tensor,
    DirectSum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Witness,
    Regular,
    Custom,
}

/// One tensor or direct-sum factor: the action of every generator on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    /// `(i, j)` block label for witness factors.
    pub label: Option<(usize, usize)>,
    pub generators: Vec<MonomialMatrix>,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.generators.first().map_or(1, MonomialMatrix::dim)
    }
}

#[derive(Clone, Debug)]
pub struct Representation {
    triple: Arc<CcrTriple>,
    space: Space,
    combine: Combine,
    factors: Vec<Factor>,
}

impl Representation {
    pub fn triple(&self) -> &Arc<CcrTriple> {
        &self.triple
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Total dimension, saturating at `u128::MAX`.
    pub fn dim(&self) -> u128 {
        match self.combine {
            Combine::Tensor => self
                .factors
                .iter()
                .fold(1u128, |a, f| a.saturating_mul(f.dim() as u128)),
            Combine::DirectSum => self.factors.iter().map(|f| f.dim() as u128).sum(),
        }
    }

    /// A representation from explicit generator matrices.
    pub fn from_matrices(t: Arc<CcrTriple>, generators: Vec<MonomialMatrix>) -> Result<Self> {
        if generators.len() != t.rank() {
            return Err(Error::Precondition(format!(
                "{} matrices given for {} generators",
                generators.len(),
                t.rank()
            )));
        }
        if generators.windows(2).any(|w| w[0].dim() != w[1].dim()) {
            return Err(Error::Precondition("generator matrices differ in size".into()));
        }
        Ok(Representation {
            triple: t,
            space: Space::Custom,
            combine: Combine::Tensor,
            factors: vec![Factor {
                label: None,
                generators,
            }],
        })
    }

    /// The matrix of the `i`-th generator, materialized.
    pub fn generator_matrix(&self, i: usize) -> Result<MonomialMatrix> {
        let d = self.dim();
        if d > limits::MONOMIAL_DIM_CAP as u128 {
            return Err(Error::DimensionCap {
                dim: d,
                cap: limits::MONOMIAL_DIM_CAP,
            });
        }
        let mut it = self.factors.iter().map(|f| &f.generators[i]);
        let first = it.next().cloned().unwrap_or_else(|| MonomialMatrix::identity(1));
        Ok(it.fold(first, |acc, m| match self.combine {
            Combine::Tensor => acc.kron(m),
            Combine::DirectSum => acc.direct_sum(m),
        }))
    }

    /// `π(u_g) = π(u_{ξ_1})^{m(ξ_1)} ⋯ π(u_{ξ_n})^{m(ξ_n)}`.
    pub fn monomial(&self, g: &GroupElement) -> Result<MonomialMatrix> {
        self.triple.spec().check(g)?;
        let d = self.dim();
        if d > limits::MONOMIAL_DIM_CAP as u128 {
            return Err(Error::DimensionCap {
                dim: d,
                cap: limits::MONOMIAL_DIM_CAP,
            });
        }
        let mut acc = MonomialMatrix::identity(d as usize);
        for (i, &m) in g.exponents().iter().enumerate() {
            if m != 0 {
                acc = acc.mul(&self.generator_matrix(i)?.pow(m as u64));
            }
        }
        Ok(acc)
    }
}

/// The existence witness built from blocks `(i, j)`, `i ≤ j`.
///
/// On block `(i, j)` with `i < j` and `d = order Θ(i,j)`, `u_i` acts as the
/// shift and `u_j` as the clock for `λ = Θ(i,j)`; on block `(i, i)` of size
/// `f(i)`, `u_i` acts as the shift. Every other generator acts trivially.
/// Blocks of size 1 are dropped from the tensor form.
pub fn witness_rep(t: Arc<CcrTriple>, combine: Combine) -> Result<Representation> {
    let n = t.rank();
    let mut factors = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (d, on_i, on_j) = if i == j {
                let f = t.spec().generator_order(i) as usize;
                let (v, _) = clock_shift(f);
                (f, v.clone(), v)
            } else {
                let th = t.theta(i, j);
                let (v, w) = clock_shift_for(th);
                (th.order() as usize, v, w)
            };
            if d == 1 && combine == Combine::Tensor {
                continue;
            }
            let generators = (0..n)
                .map(|k| {
                    if k == i {
                        on_i.clone()
                    } else if k == j {
                        on_j.clone()
                    } else {
                        MonomialMatrix::identity(d)
                    }
                })
                .collect();
            factors.push(Factor {
                label: Some((i, j)),
                generators,
            });
        }
    }
    let rep = Representation {
        triple: t,
        space: Space::Witness,
        combine,
        factors,
    };
    Ok(rep)
}

/// Like [`witness_rep`] but refuses dimensions beyond the materialization cap.
pub fn witness_rep_capped(t: Arc<CcrTriple>, combine: Combine) -> Result<Representation> {
    let r = witness_rep(t, combine)?;
    if r.dim() > limits::MONOMIAL_DIM_CAP as u128 {
        return Err(Error::DimensionCap {
            dim: r.dim(),
            cap: limits::MONOMIAL_DIM_CAP,
        });
    }
    Ok(r)
}

/// `π(u_g)·δ_h = c(g,h)·δ_{g+h}` on `ℓ²(Γ)`, basis in enumeration order.
pub fn regular_rep(t: Arc<CcrTriple>) -> Result<Representation> {
    let n = t.spec().checked_order()?;
    limits_check(n, limits::MONOMIAL_DIM_CAP)?;
    let spec = t.spec();
    let elements: Vec<GroupElement> = spec.elements()?.collect();
    let generators = (0..t.rank())
        .map(|i| {
            let b = spec.basis(i);
            let (targets, phases) = elements
                .iter()
                .map(|h| {
                    (
                        spec.index_of(&spec.compose_unchecked(&b, h)) as u32,
                        normal_order_cocycle(&t, &b, h),
                    )
                })
                .unzip();
            MonomialMatrix::new(targets, phases).expect("translation is a permutation")
        })
        .collect();
    Ok(Representation {
        triple: t.clone(),
        space: Space::Regular,
        combine: Combine::Tensor,
        factors: vec![Factor {
            label: None,
            generators,
        }],
    })
}

/// `π(u_g)` in the regular representation directly from the cocycle.
pub fn regular_monomial(t: &CcrTriple, g: &GroupElement) -> Result<MonomialMatrix> {
    let spec = t.spec();
    spec.check(g)?;
    limits_check(spec.checked_order()?, limits::MONOMIAL_DIM_CAP)?;
    let (targets, phases) = spec
        .elements()?
        .map(|h| {
            (
                spec.index_of(&spec.compose_unchecked(g, &h)) as u32,
                normal_order_cocycle(t, g, &h),
            )
        })
        .unzip();
    MonomialMatrix::new(targets, phases)
}

/// `Σ λ_g π(u_g)` as a dense matrix.
pub fn rep_of_element(r: &Representation, a: &AlgebraElement) -> Result<DenseMatrix> {
    if **a.triple() != *r.triple {
        return Err(Error::TripleMismatch);
    }
    let d = r.dim();
    if d > limits::DENSE_DIM_CAP as u128 {
        return Err(Error::DimensionCap {
            dim: d,
            cap: limits::DENSE_DIM_CAP,
        });
    }
    let d = d as usize;
    let mut out = DenseMatrix::zeros(d, d);
    for (g, c) in a.terms() {
        let m = r.monomial(g)?;
        for (j, (&t, &p)) in m.targets().iter().zip(m.phases()).enumerate() {
            out.add_to(t as usize, j, &c.try_mul_phase(p)?)?;
        }
    }
    Ok(out)
}

/// `‖π(a)‖`. Scalar multiples of a basis unitary are evaluated exactly as the
/// modulus of the coefficient; everything else goes through an SVD.
pub fn operator_norm(r: &Representation, a: &AlgebraElement) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    if let Some((c, _)) = a.as_scaled_monomial() {
        return Ok(scalar_modulus(c));
    }
    Ok(rep_of_element(r, a)?.spectral_norm())
}

/// `|c|`; exact for rational multiples of a root of unity and for rational
/// `|c|²`.
pub fn scalar_modulus(c: &CyclotomicScalar) -> f64 {
    use num_traits::{Signed, ToPrimitive};
    let terms = c.terms();
    if terms.len() == 1 {
        return terms[0].1.abs().to_f64().unwrap_or(f64::NAN);
    }
    match c.norm_squared().as_rational() {
        Some(r) => r.to_f64().unwrap_or(f64::NAN).sqrt(),
        None => c.to_complex().norm(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelationFailure {
    NotUnitary {
        generator: usize,
        factor: usize,
    },
    /// `u_i u_j ≠ Θ(i,j) u_j u_i`; `factor` names the offending block where
    /// one can be isolated.
    Commutation {
        i: usize,
        j: usize,
        factor: Option<usize>,
        block: Option<(usize, usize)>,
    },
    Order {
        generator: usize,
        expected: u32,
        factor: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub dim: String,
    pub combine: Combine,
    pub unitary: bool,
    pub commutation: bool,
    pub orders_ok: bool,
    /// The exact order of each generator's unitary, searched up to `f(ξ)²`.
    pub generator_orders: Vec<Option<u64>>,
    pub failures: Vec<RelationFailure>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact verification of unitarity, `u_ξ u_η = Θ(ξ,η) u_η u_ξ` and
/// `u_ξ^{f(ξ)} = 1`, factor by factor.
pub fn check_relations(r: &Representation) -> RelationReport {
    let t = &*r.triple;
    let n = t.rank();
    let mut failures = Vec::new();
    for (fi, f) in r.factors.iter().enumerate() {
        for (g, m) in f.generators.iter().enumerate() {
            if !m.is_unitary() {
                failures.push(RelationFailure::NotUnitary {
                    generator: g,
                    factor: fi,
                });
            }
        }
    }
    let unitary = failures.is_empty();
    for i in 0..n {
        for j in i + 1..n {
            let theta = t.theta(i, j);
            match r.combine {
                Combine::Tensor => {
                    let mut total = Some(Phase::ONE);
                    let mut bad = None;
                    for (fi, f) in r.factors.iter().enumerate() {
                        let (a, b) = (&f.generators[i], &f.generators[j]);
                        match a.mul(b).ratio(&b.mul(a)) {
                            Some(c) => total = total.map(|t| t * c),
                            None => {
                                bad = Some(fi);
                                total = None;
                                break;
                            }
                        }
                    }
                    if total != Some(theta) {
                        failures.push(RelationFailure::Commutation {
                            i,
                            j,
                            factor: bad,
                            block: bad.and_then(|b| r.factors[b].label),
                        });
                    }
                }
                Combine::DirectSum => {
                    for (fi, f) in r.factors.iter().enumerate() {
                        let (a, b) = (&f.generators[i], &f.generators[j]);
                        if a.mul(b) != b.mul(a).scale(theta) {
                            failures.push(RelationFailure::Commutation {
                                i,
                                j,
                                factor: Some(fi),
                                block: f.label,
                            });
                        }
                    }
                }
            }
        }
    }
    let commutation = !failures
        .iter()
        .any(|f| matches!(f, RelationFailure::Commutation { .. }));
    let before_orders = failures.len();
    let mut generator_orders = Vec::with_capacity(n);
    for i in 0..n {
        let f = t.spec().generator_order(i) as u64;
        let order = exact_order(r, i, f);
        let divides = match order {
            Some(o) => f % o == 0,
            None => power_is_identity(r, i, f),
        };
        if !divides {
            failures.push(RelationFailure::Order {
                generator: i,
                expected: f as u32,
                factor: None,
            });
        }
        generator_orders.push(order);
    }
    let orders_ok = failures.len() == before_orders;
    RelationReport {
        dim: r.dim().to_string(),
        combine: r.combine,
        unitary,
        commutation,
        orders_ok,
        generator_orders,
        failures,
    }
}

fn power_is_identity(r: &Representation, i: usize, k: u64) -> bool {
    match r.combine {
        Combine::Tensor => {
            let mut total = Phase::ONE;
            for f in &r.factors {
                match f.generators[i].pow(k).as_scalar() {
                    Some(c) => total *= c,
                    None => return false,
                }
            }
            total.is_one()
        }
        Combine::DirectSum => r.factors.iter().all(|f| f.generators[i].pow(k).is_identity()),
    }
}

/// Least `k ≤ f²` with `U^k = I`.
fn exact_order(r: &Representation, i: usize, f: u64) -> Option<u64> {
    let gens: Vec<&MonomialMatrix> = r.factors.iter().map(|x| &x.generators[i]).collect();
    let mut powers: Vec<MonomialMatrix> = gens.iter().map(|&g| g.clone()).collect();
    for k in 1..=f * f {
        let hit = match r.combine {
            Combine::Tensor => powers
                .iter()
                .try_fold(Phase::ONE, |acc, m| m.as_scalar().map(|c| acc * c))
                .is_some_and(Phase::is_one),
            Combine::DirectSum => powers.iter().all(MonomialMatrix::is_identity),
        };
        if hit {
            return Some(k);
        }
        for (p, g) in powers.iter_mut().zip(&gens) {
            *p = p.mul(g);
        }
    }
    None
}

/// `dim span{π(u_g) : g ∈ Γ}` by exact elimination on flattened matrices.
pub fn span_dimension(r: &Representation) -> Result<RankReport> {
    let d = r.dim();
    limits_check(
        usize::try_from(d).unwrap_or(usize::MAX),
        limits::MONOMIAL_DIM_CAP,
    )?;
    let spec = r.triple.spec();
    let mut e = Echelon::new();
    let mut count = 0;
    for g in spec.elements()? {
        let m = r.monomial(&g)?;
        e.insert(crate::matrix::sparse_from_phases(&m.flat_entries())?)?;
        count += 1;
    }
    Ok(RankReport {
        vectors: count,
        rank: e.rank(),
    })
}

/// `p_G π(a) p_G` on `ℓ²(G)`, rows and columns indexed by the sorted members
/// of `G`. Needs the regular representation.
pub fn compress(r: &Representation, g: &Subgroup, a: &AlgebraElement) -> Result<DenseMatrix> {
    if r.space != Space::Regular {
        return Err(Error::Precondition(
            "compression needs the regular representation".into(),
        ));
    }
    if g.spec() != r.triple.spec() {
        return Err(Error::NotSubgroup("subgroup of a different group".into()));
    }
    limits_check(g.order(), limits::DENSE_DIM_CAP)?;
    let spec = r.triple.spec();
    let idx: Vec<usize> = g.members().iter().map(|h| spec.index_of(h)).collect();
    let mut out = DenseMatrix::zeros(idx.len(), idx.len());
    for (x, c) in a.terms() {
        let m = r.monomial(x)?;
        for (col, &j) in idx.iter().enumerate() {
            let target = m.targets()[j] as usize;
            if let Some(row) = idx.iter().position(|&i| i == target) {
                out.add_to(row, col, &c.try_mul_phase(m.phases()[j])?)?;
            }
        }
    }
    Ok(out)
}

/// `π_G(b)` on `ℓ²(G)` for `b` supported in `G`, built from the cocycle
/// alone: `π_G(u_x)·δ_h = c(x,h)·δ_{x+h}`.
pub fn subgroup_regular(t: &CcrTriple, g: &Subgroup, b: &AlgebraElement) -> Result<DenseMatrix> {
    limits_check(g.order(), limits::DENSE_DIM_CAP)?;
    let mut out = DenseMatrix::zeros(g.order(), g.order());
    for (x, c) in b.terms() {
        if !g.contains(x) {
            return Err(Error::Precondition(format!("{x} is not in the subgroup")));
        }
        for (col, h) in g.members().iter().enumerate() {
            let row = g
                .position(&t.spec().compose_unchecked(x, h))
                .expect("subgroup is closed");
            out.add_to(row, col, &c.try_mul_phase(normal_order_cocycle(t, x, h))?)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutantOracle {
    pub unknowns: usize,
    pub constraint_rank: usize,
    pub nullity: usize,
    pub centralizer_order: usize,
    pub centralizer_in_kernel: bool,
    pub agrees: bool,
}

/// Brute-force relative commutant: all `x = Σ x_g π(u_g)` with
/// `[x, π(u_s)] = 0` for the generators `s ∈ S`, solved by exact elimination
/// on the flattened commutator matrices, compared with `{u_g : g ∈ Z(S)}`.
pub fn commutant_oracle(t: Arc<CcrTriple>, positions: &[usize]) -> Result<CommutantOracle> {
    let n = t.spec().checked_order()?;
    limits_check(n, limits::DENSE_DIM_CAP)?;
    let r = regular_rep(t.clone())?;
    let gens: Vec<MonomialMatrix> = positions
        .iter()
        .map(|&s| r.generator_matrix(s))
        .collect::<Result<_>>()?;
    let elements: Vec<GroupElement> = t.spec().elements()?.collect();
    // one column per g: the stacked vectors vec([π(u_g), π(u_s)]) for s ∈ S
    let mut columns = Vec::with_capacity(n);
    for g in &elements {
        let m = r.monomial(g)?;
        let mut col = crate::matrix::SparseVector::new();
        for (k, s) in gens.iter().enumerate() {
            let ms = m.mul(s);
            let sm = s.mul(&m);
            let offset = k * n * n;
            for (idx, p) in ms.flat_entries() {
                accumulate(&mut col, offset + idx, &CyclotomicScalar::from_phase(p)?)?;
            }
            for (idx, p) in sm.flat_entries() {
                accumulate(&mut col, offset + idx, &-CyclotomicScalar::from_phase(p)?)?;
            }
        }
        columns.push(col);
    }
    let z = t.generator_centralizer(positions)?;
    let centralizer_in_kernel = z
        .members()
        .iter()
        .all(|g| columns[t.spec().index_of(g)].is_empty());
    let mut e = Echelon::new();
    for c in columns {
        e.insert(c)?;
    }
    let nullity = n - e.rank();
    Ok(CommutantOracle {
        unknowns: n,
        constraint_rank: e.rank(),
        nullity,
        centralizer_order: z.order(),
        centralizer_in_kernel,
        agrees: centralizer_in_kernel && nullity == z.order(),
    })
}

fn accumulate(v: &mut crate::matrix::SparseVector, i: usize, x: &CyclotomicScalar) -> Result<()> {
    let e = v.entry(i).or_insert_with(CyclotomicScalar::zero);
    *e = e.try_add(x)?;
    if e.is_zero() {
        v.remove(&i);
    }
    Ok(())
}

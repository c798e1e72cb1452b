//! The twisted group algebra `ℂ_Θ Γ` with normal-ordered basis `{u_g}`.
//!
//! `u_g = u_{ξ_1}^{m(ξ_1)} ⋯ u_{ξ_n}^{m(ξ_n)}` with generators in list order,
//! so `u_g u_h = c(g,h) u_{g+h}` for the normal-order cocycle `c`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclotomicScalar, Phase};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Subgroup};
use crate::triple::{check_morphism, CcrMorphism, CcrTriple, MorphismCheck};

/// `c(g,h) = ∏_{ξ>η} Θ(ξ,η)^{m_g(ξ)·m_h(η)}`.
pub fn normal_order_cocycle(t: &CcrTriple, g: &GroupElement, h: &GroupElement) -> Phase {
    let (a, b) = (g.exponents(), h.exponents());
    let den = t.theta_denominator() as u128;
    if den == 1 {
        return Phase::ONE;
    }
    let mut acc: u128 = 0;
    for (xi, &mx) in a.iter().enumerate().skip(1) {
        if mx == 0 {
            continue;
        }
        let mut inner: u128 = 0;
        for (eta, &nh) in b.iter().enumerate().take(xi) {
            if nh != 0 {
                inner += t.theta_numerator(xi, eta) as u128 * nh as u128;
            }
        }
        acc = (acc + (inner % den) * mx as u128) % den;
    }
    Phase::new(acc as i64, den as u64)
}

/// `u_g u_h` as `(phase, g+h)`.
pub fn monomial_product(t: &CcrTriple, g: &GroupElement, h: &GroupElement) -> (Phase, GroupElement) {
    (
        normal_order_cocycle(t, g, h),
        t.spec().compose_unchecked(g, h),
    )
}

/// An element `Σ_g λ_g u_g`; zero coefficients are never stored.
#[derive(Clone)]
pub struct AlgebraElement {
    triple: Arc<CcrTriple>,
    terms: BTreeMap<GroupElement, CyclotomicScalar>,
}

fn same_triple(a: &Arc<CcrTriple>, b: &Arc<CcrTriple>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AlgebraElement {
    pub fn zero(t: &Arc<CcrTriple>) -> Self {
        AlgebraElement {
            triple: t.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(t: &Arc<CcrTriple>) -> Self {
        Self::scalar(t, CyclotomicScalar::one())
    }

    pub fn scalar(t: &Arc<CcrTriple>, c: CyclotomicScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(t.spec().identity(), c);
        }
        AlgebraElement {
            triple: t.clone(),
            terms,
        }
    }

    /// The basis unitary `u_g`.
    pub fn monomial(t: &Arc<CcrTriple>, g: &GroupElement) -> Result<Self> {
        t.spec().check(g)?;
        let mut terms = BTreeMap::new();
        terms.insert(g.clone(), CyclotomicScalar::one());
        Ok(AlgebraElement {
            triple: t.clone(),
            terms,
        })
    }

    /// The unitary `u_ξ` of the generator at position `i`.
    pub fn generator(t: &Arc<CcrTriple>, i: usize) -> Self {
        Self::monomial(t, &t.spec().basis(i)).expect("basis element conforms")
    }

    /// Sums the given terms; repeated elements are added together.
    pub fn from_terms<I>(t: &Arc<CcrTriple>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, CyclotomicScalar)>,
    {
        let mut out = BTreeMap::new();
        for (g, c) in terms {
            t.spec().check(&g)?;
            accumulate(&mut out, g, c)?;
        }
        out.retain(|_, c: &mut CyclotomicScalar| !c.is_zero());
        Ok(AlgebraElement {
            triple: t.clone(),
            terms: out,
        })
    }

    pub fn triple(&self) -> &Arc<CcrTriple> {
        &self.triple
    }

    pub fn terms(&self) -> &BTreeMap<GroupElement, CyclotomicScalar> {
        &self.terms
    }

    pub fn support(&self) -> Vec<GroupElement> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, g: &GroupElement) -> CyclotomicScalar {
        self.terms.get(g).cloned().unwrap_or_else(CyclotomicScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_triple(&self.triple, &other.triple) {
            Ok(())
        } else {
            Err(Error::TripleMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (g, c) in &other.terms {
            accumulate(&mut terms, g.clone(), c.clone())?;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement {
            triple: self.triple.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_scale(&self, c: &CyclotomicScalar) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (g, x) in &self.terms {
            let y = x.try_mul(c)?;
            if !y.is_zero() {
                terms.insert(g.clone(), y);
            }
        }
        Ok(AlgebraElement {
            triple: self.triple.clone(),
            terms,
        })
    }

    pub fn scale_phase(&self, p: Phase) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (g, x) in &self.terms {
            terms.insert(g.clone(), x.try_mul_phase(p)?);
        }
        Ok(AlgebraElement {
            triple: self.triple.clone(),
            terms,
        })
    }

    /// Bilinear extension of `u_g u_h = c(g,h) u_{g+h}`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let t = &*self.triple;
        let mut terms = BTreeMap::new();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                let (phase, gh) = monomial_product(t, g, h);
                let c = a.try_mul(b)?.try_mul_phase(phase)?;
                accumulate(&mut terms, gh, c)?;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement {
            triple: self.triple.clone(),
            terms,
        })
    }

    /// `(u_g)* = conj(c(g,g⁻¹)) u_{g⁻¹}`, extended antilinearly.
    pub fn adjoint(&self) -> Self {
        let t = &*self.triple;
        let mut terms = BTreeMap::new();
        for (g, a) in &self.terms {
            let gi = t.spec().inverse_unchecked(g);
            let phase = normal_order_cocycle(t, g, &gi).conj();
            let c = a
                .conj()
                .try_mul_phase(phase)
                .expect("phase lies in the conductor of the triple");
            terms.insert(gi, c);
        }
        AlgebraElement {
            triple: self.triple.clone(),
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.triple);
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// `a·b − b·a`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.try_sub(&other.multiply(self)?)
    }

    /// If `self = μ·u_g`, returns `(μ, g)`.
    pub fn as_scaled_monomial(&self) -> Option<(&CyclotomicScalar, &GroupElement)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(g, c)| (c, g))
        } else {
            None
        }
    }
}

fn accumulate(
    terms: &mut BTreeMap<GroupElement, CyclotomicScalar>,
    g: GroupElement,
    c: CyclotomicScalar,
) -> Result<()> {
    match terms.get_mut(&g) {
        Some(x) => *x = x.try_add(&c)?,
        None => {
            terms.insert(g, c);
        }
    }
    Ok(())
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_triple(&self.triple, &other.triple) && self.terms == other.terms
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({self})")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("({c})·u{g}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;

    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            triple: self.triple.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(rhs).expect("algebra addition")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;

    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_sub(rhs).expect("algebra subtraction")
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;

    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.multiply(rhs).expect("algebra multiplication")
    }
}

/// `τ(Σ λ_g u_g) = λ_e`.
pub fn trace(a: &AlgebraElement) -> CyclotomicScalar {
    a.coefficient(&a.triple.spec().identity())
}

/// `⟨a,b⟩ = τ(b* a)`, computed from coefficients without forming the product.
pub fn l2_inner(a: &AlgebraElement, b: &AlgebraElement) -> Result<CyclotomicScalar> {
    a.check_same(b)?;
    let mut acc = CyclotomicScalar::zero();
    // τ(b* a) = Σ_g conj(μ_g)·λ_g since c(g⁻¹,g) = c(g,g⁻¹).
    for (g, x) in &a.terms {
        if let Some(y) = b.terms.get(g) {
            acc = acc.try_add(&x.try_mul(&y.conj())?)?;
        }
    }
    Ok(acc)
}

/// `E_G`: keeps the coefficients on `G`.
pub fn conditional_expectation(a: &AlgebraElement, g: &Subgroup) -> Result<AlgebraElement> {
    if g.spec() != a.triple.spec() {
        return Err(Error::NotSubgroup(
            "subgroup belongs to a different group".into(),
        ));
    }
    Ok(AlgebraElement {
        triple: a.triple.clone(),
        terms: a
            .terms
            .iter()
            .filter(|(h, _)| g.contains(h))
            .map(|(h, c)| (h.clone(), c.clone()))
            .collect(),
    })
}

/// `Z_{Γ,Θ}(S)` for generator positions `S`; `{u_g : g ∈ Z}` spans the
/// relative commutant of `C*(u_ξ : ξ ∈ S)`.
pub fn commutant_basis(t: &CcrTriple, positions: &[usize]) -> Result<Vec<GroupElement>> {
    check_positions(t, positions)?;
    Ok(t.generator_centralizer(positions)?.members().to_vec())
}

pub fn center_basis(t: &CcrTriple) -> Result<Vec<GroupElement>> {
    let all: Vec<usize> = (0..t.rank()).collect();
    commutant_basis(t, &all)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullMatrixReport {
    pub is_full_matrix: bool,
    pub center_dimension: usize,
    pub group_order: u128,
    /// `n` with `n² = |Γ|` when the center is trivial.
    pub n: Option<u64>,
}

/// Decides `ℂ_Θ Γ ≅ M_n(ℂ)` by triviality of the center.
pub fn is_full_matrix(t: &CcrTriple) -> Result<FullMatrixReport> {
    let center = center_basis(t)?;
    let order = t.spec().order();
    let full = center.len() == 1;
    let n = if full {
        let r = (order as f64).sqrt().round() as u128;
        (r * r == order).then_some(r as u64)
    } else {
        None
    };
    Ok(FullMatrixReport {
        is_full_matrix: full,
        center_dimension: center.len(),
        group_order: order,
        n,
    })
}

/// Whether `Γ = ⟨Γ_S ∪ Z(S)⟩`.
pub fn is_complemented(t: &CcrTriple, positions: &[usize]) -> Result<bool> {
    check_positions(t, positions)?;
    let z = t.generator_centralizer(positions)?;
    let mut gens: Vec<GroupElement> = positions.iter().map(|&i| t.spec().basis(i)).collect();
    gens.extend(z.generators().iter().cloned());
    Ok(t.spec().subgroup_generated(&gens)?.is_whole())
}

fn check_positions(t: &CcrTriple, positions: &[usize]) -> Result<()> {
    if let Some(&p) = positions.iter().find(|&&p| p >= t.rank()) {
        return Err(Error::Precondition(format!(
            "generator position {p} out of range for rank {}",
            t.rank()
        )));
    }
    Ok(())
}

/// Splits `X = X₁ ⊔ X₂` into restricted triples when every cross pairing is 1.
/// `first` lists the positions of `X₁`; `X₂` is the rest.
pub fn tensor_split(t: &CcrTriple, first: &[usize]) -> Result<(CcrTriple, CcrTriple)> {
    check_positions(t, first)?;
    let mut a = first.to_vec();
    a.sort_unstable();
    a.dedup();
    let b: Vec<usize> = (0..t.rank()).filter(|i| !a.contains(i)).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("both parts must be nonempty".into()));
    }
    for &i in &a {
        for &j in &b {
            let th = t.theta(i, j);
            if !th.is_one() {
                let (i, j) = (i.min(j), i.max(j));
                return Err(Error::SplitRefused {
                    i,
                    j,
                    phase: t.theta(i, j).to_string(),
                });
            }
        }
    }
    Ok((t.restrict(&a)?, t.restrict(&b)?))
}

/// `σ(g)` with `Ψ(u_g) = σ(g) u_{φ(g)}`, from re-normal-ordering
/// `∏_ξ u_{φ(ξ)}^{m_g(ξ)}` in the target.
pub fn hom_phase(m: &CcrMorphism, g: &GroupElement) -> Phase {
    let t = &**m.target();
    let mut phase = Phase::ONE;
    let mut cur = t.spec().identity();
    for (&k, img) in g.exponents().iter().zip(m.images()) {
        for _ in 0..k {
            let (p, next) = monomial_product(t, &cur, img);
            phase *= p;
            cur = next;
        }
    }
    phase
}

/// The phase `μ` with `(u_{φ(ξ)})^{f(ξ)} = μ·u_e` in the target.
pub fn generator_power_phase(m: &CcrMorphism, i: usize) -> Phase {
    let t = &**m.target();
    let f = m.source().spec().generator_order(i);
    let img = &m.images()[i];
    let mut phase = Phase::ONE;
    let mut cur = t.spec().identity();
    for _ in 0..f {
        let (p, next) = monomial_product(t, &cur, img);
        phase *= p;
        cur = next;
    }
    phase
}

/// Verifies that `u_ξ ↦ u_{φ(ξ)}` extends to a *-homomorphism: `m` must pass
/// [`check_morphism`] and every `u_{φ(ξ)}^{f(ξ)}` must equal `u_e`.
pub fn check_hom_extends(m: &CcrMorphism) -> Result<()> {
    match check_morphism(m)? {
        MorphismCheck::Ok => {}
        bad => {
            return Err(Error::Morphism(
                serde_json::to_string(&bad).unwrap_or_default(),
            ))
        }
    }
    for i in 0..m.source().rank() {
        let mu = generator_power_phase(m, i);
        if !mu.is_one() {
            return Err(Error::Morphism(format!(
                "u_phi(x{i})^{} = {mu}·u_e in the target, so u_x{i} has no unitary image of order {}",
                m.source().spec().generator_order(i),
                m.source().spec().generator_order(i)
            )));
        }
    }
    Ok(())
}

/// `Ψ_φ(Σ λ_g u_g) = Σ λ_g σ(g) u_{φ(g)}`.
pub fn induced_hom(m: &CcrMorphism, a: &AlgebraElement) -> Result<AlgebraElement> {
    if !same_triple(a.triple(), m.source()) {
        return Err(Error::TripleMismatch);
    }
    check_hom_extends(m)?;
    let mut terms = BTreeMap::new();
    for (g, c) in a.terms() {
        terms.insert(m.map(g), c.try_mul_phase(hom_phase(m, g))?);
    }
    Ok(AlgebraElement {
        triple: m.target().clone(),
        terms,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    exponents: Vec<i64>,
    coeff: CyclotomicScalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    terms: Vec<TermJson>,
}

impl AlgebraElement {
    pub fn to_json(&self) -> serde_json::Value {
        let raw = ElementJson {
            terms: self
                .terms
                .iter()
                .map(|(g, c)| TermJson {
                    exponents: g.exponents().iter().map(|&x| x as i64).collect(),
                    coeff: c.clone(),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("element serializes")
    }

    /// Parses element JSON; exponents are reduced modulo the generator orders.
    pub fn from_json(t: &Arc<CcrTriple>, value: &serde_json::Value) -> Result<Self> {
        let raw: ElementJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for term in raw.terms {
            terms.push((t.spec().element(&term.exponents)?, term.coeff));
        }
        Self::from_terms(t, terms)
    }
}

//! Builders and analyzers for three families of CCR triples at finite scale:
//! the pairing (UHF) triple, the non-uniqueness fragment with the extra
//! generator `g(*)`, and the chain triple over a finite linear order.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::algebra::{center_basis, is_complemented, AlgebraElement};
use crate::cyclotomic::{CyclotomicScalar, Phase};
use crate::error::{Error, Result};
use crate::group::{Generator, GroupElement, GroupSpec};
use crate::representation::{regular_rep, rep_of_element};
use crate::triple::CcrTriple;

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{p} is not prime")))
    }
}

/// `k` pairs `g(α,0), g(α,1)` of order `p` with `Θ(g(α,0), g(α,1)) = exp(2πi/p)`
/// and trivial pairing across pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingTriple {
    pub k: usize,
    pub p: u32,
    pub triple: CcrTriple,
}

pub fn pairing_triple(k: usize, p: u32) -> Result<PairingTriple> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::Precondition("need at least one pair".into()));
    }
    let mut gens = Vec::with_capacity(2 * k);
    for a in 0..k {
        gens.push(Generator::new(format!("g({a},0)"), p));
        gens.push(Generator::new(format!("g({a},1)"), p));
    }
    let spec = GroupSpec::new(gens)?;
    spec.checked_order()?;
    let lambda = Phase::root_of_unity(p as u64);
    let entries: Vec<_> = (0..k).map(|a| (2 * a, 2 * a + 1, lambda)).collect();
    Ok(PairingTriple {
        k,
        p,
        triple: CcrTriple::from_upper(spec, &entries)?,
    })
}

/// Pairs `f0(i,j), f1(i,j)` of order `p(i)`, `j < k(i)`, from a list of
/// `(p(i), k(i))`; families are numbered from 1.
pub fn minus_triple(minus: &[(u32, u32)]) -> Result<CcrTriple> {
    let mut gens = Vec::new();
    let mut entries = Vec::new();
    for (fam, &(q, mult)) in minus.iter().enumerate() {
        check_prime(q)?;
        for j in 0..mult {
            entries.push((gens.len(), gens.len() + 1, Phase::root_of_unity(q as u64)));
            gens.push(Generator::new(format!("f0({},{j})", fam + 1), q));
            gens.push(Generator::new(format!("f1({},{j})", fam + 1), q));
        }
    }
    CcrTriple::from_upper(GroupSpec::new(gens)?, &entries)
}

/// Generators in order: every `f0(i,j), f1(i,j)`, then `g(α,0), g(α,1)` for
/// `α < m`, then `g(*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonUniquenessFragment {
    pub minus: Vec<(u32, u32)>,
    pub p: u32,
    pub pairs: usize,
    pub triple: CcrTriple,
}

impl NonUniquenessFragment {
    pub fn f_count(&self) -> usize {
        self.minus.iter().map(|&(_, k)| 2 * k as usize).sum()
    }

    /// Positions of `(f0, f1)` for every f-pair.
    pub fn f_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.f_count() / 2).map(|i| (2 * i, 2 * i + 1)).collect()
    }

    pub fn g(&self, alpha: usize, i: usize) -> usize {
        self.f_count() + 2 * alpha + i
    }

    pub fn star(&self) -> usize {
        self.f_count() + 2 * self.pairs
    }

    /// All f's, the first `pairs - 1` pairs in full, `g(pairs-1, 0)` and `g(*)`.
    pub fn canonical_f(&self) -> Vec<usize> {
        let mut f: Vec<usize> = (0..self.f_count()).collect();
        for a in 0..self.pairs.saturating_sub(1) {
            f.extend([self.g(a, 0), self.g(a, 1)]);
        }
        if self.pairs > 0 {
            f.push(self.g(self.pairs - 1, 0));
        }
        f.push(self.star());
        f
    }
}

pub fn nonuniqueness_fragment(minus: &[(u32, u32)], p: u32, pairs: usize) -> Result<NonUniquenessFragment> {
    check_prime(p)?;
    let lambda = Phase::root_of_unity(p as u64);
    let minus_t = minus_triple(minus)?;
    let mut gens = minus_t.spec().generators().to_vec();
    let base = gens.len();
    let mut entries = minus_t.upper_entries();
    for a in 0..pairs {
        gens.push(Generator::new(format!("g({a},0)"), p));
        gens.push(Generator::new(format!("g({a},1)"), p));
        entries.push((base + 2 * a, base + 2 * a + 1, lambda));
        entries.push((base + 2 * a, base + 2 * pairs, lambda));
    }
    gens.push(Generator::new("g(*)", p));
    let spec = GroupSpec::new(gens)?;
    spec.checked_order()?;
    Ok(NonUniquenessFragment {
        minus: minus.to_vec(),
        p,
        pairs,
        triple: CcrTriple::from_upper(spec, &entries)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FConditions {
    pub f_pairs_closed: bool,
    pub unique_unpaired: bool,
    pub contains_star: bool,
    /// `α` of the leftover `g(α,0)`.
    pub unpaired: Option<usize>,
    /// `α` of the pairs contained in full.
    pub full_pairs: Vec<usize>,
    pub holds: bool,
}

/// Membership conditions for a generator subset `F`. The leftover generator
/// is `g(β,0) ∈ F` with `g(β,1) ∉ F`.
pub fn check_f_conditions(frag: &NonUniquenessFragment, f: &[usize]) -> FConditions {
    let has = |i: usize| f.contains(&i);
    let f_pairs_closed = frag.f_pairs().iter().all(|&(a, b)| has(a) == has(b));
    let mut full_pairs = Vec::new();
    let mut leftovers = Vec::new();
    let mut stray_one = false;
    for a in 0..frag.pairs {
        match (has(frag.g(a, 0)), has(frag.g(a, 1))) {
            (true, true) => full_pairs.push(a),
            (true, false) => leftovers.push(a),
            (false, true) => stray_one = true,
            (false, false) => {}
        }
    }
    let unique_unpaired = leftovers.len() == 1 && !stray_one;
    let contains_star = has(frag.star());
    FConditions {
        f_pairs_closed,
        unique_unpaired,
        contains_star,
        unpaired: unique_unpaired.then(|| leftovers[0]),
        full_pairs,
        holds: f_pairs_closed && unique_unpaired && contains_star,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Corrected,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingMismatch {
    pub a: usize,
    pub b: usize,
    pub label_a: String,
    pub label_b: String,
    pub target: Phase,
    pub realized: Phase,
}

/// A candidate generating set, checked against the pairing matrix it should
/// realize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSubstitution {
    pub formula: Formula,
    pub labels: Vec<String>,
    pub elements: Vec<GroupElement>,
    pub target: Vec<Vec<Phase>>,
    pub realized: Vec<Vec<Phase>>,
    pub target_met: bool,
    pub mismatches: Vec<PairingMismatch>,
    /// The new set generates the same subgroup as the old one.
    pub generates: bool,
    /// Center of the restricted triple on the original generators.
    pub center_order_original: usize,
    /// Center of the triple whose `Θ` is the realized matrix.
    pub center_order_substituted: usize,
    pub dimension: String,
    pub sqrt_dimension: Option<u64>,
    pub full_matrix: bool,
}

fn isqrt_exact(n: u128) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u128;
    (r.saturating_sub(1)..=r + 1)
        .find(|&s| s * s == n)
        .map(|s| s as u64)
}

fn substitution_report(
    t: &CcrTriple,
    formula: Formula,
    original: &[usize],
    labels: Vec<String>,
    elements: Vec<GroupElement>,
    target: Vec<Vec<Phase>>,
) -> Result<GeneratorSubstitution> {
    let realized = t.pairing_matrix(&elements);
    let mut mismatches = Vec::new();
    for a in 0..elements.len() {
        for b in 0..elements.len() {
            if realized[a][b] != target[a][b] {
                mismatches.push(PairingMismatch {
                    a,
                    b,
                    label_a: labels[a].clone(),
                    label_b: labels[b].clone(),
                    target: target[a][b],
                    realized: realized[a][b],
                });
            }
        }
    }
    let spec = t.spec();
    let old: Vec<GroupElement> = original.iter().map(|&i| spec.basis(i)).collect();
    let old_sub = spec.subgroup_generated(&old)?;
    let new_sub = spec.subgroup_generated(&elements)?;
    let generates = old_sub.members() == new_sub.members();
    let restricted = t.restrict(original)?;
    let center_order_original = center_basis(&restricted)?.len();
    let new_spec = GroupSpec::new(
        labels
            .iter()
            .zip(&elements)
            .map(|(l, g)| Generator::new(l.clone(), spec.element_order(g) as u32))
            .collect(),
    )?;
    let substituted = CcrTriple::new(new_spec.clone(), realized.clone())?;
    let center_order_substituted = center_basis(&substituted)?.len();
    let dimension = restricted.spec().order();
    let sqrt_dimension = isqrt_exact(dimension);
    // the new generators present Γ_F only if the orders multiply up to |Γ_F|
    let presents = generates && new_spec.order() == dimension;
    Ok(GeneratorSubstitution {
        formula,
        labels,
        elements,
        target,
        realized,
        target_met: mismatches.is_empty(),
        mismatches,
        generates: presents,
        center_order_original,
        center_order_substituted,
        dimension: dimension.to_string(),
        sqrt_dimension,
        full_matrix: center_order_original == 1 && center_order_substituted == 1 && sqrt_dimension.is_some(),
    })
}

/// Replaces `g(*)` in `F` by `h` and checks that the new set realizes the
/// target pattern: `Θ(g(β,0), h) = λ` for the leftover `g(β,0)` and `h`
/// pairs trivially with every other generator of `F`.
///
/// Corrected: `h = g(*)·∏_j g(α(j),1)^{p-1}`. Literal: `h = g(*)·∏_j g(α(j),0)`.
pub fn substitute_and_verify(
    frag: &NonUniquenessFragment,
    f: &[usize],
    formula: Formula,
) -> Result<GeneratorSubstitution> {
    let cond = check_f_conditions(frag, f);
    if !cond.holds {
        return Err(Error::Precondition(format!(
            "F fails its membership conditions: {}",
            serde_json::to_string(&cond).unwrap_or_default()
        )));
    }
    let t = &frag.triple;
    let spec = t.spec();
    let p = frag.p as i64;
    let mut h: Vec<i64> = vec![0; t.rank()];
    h[frag.star()] = 1;
    for &a in &cond.full_pairs {
        match formula {
            Formula::Corrected => h[frag.g(a, 1)] += p - 1,
            Formula::Literal => h[frag.g(a, 0)] += 1,
        }
    }
    let h = spec.element(&h)?;
    let mut positions = f.to_vec();
    positions.sort_unstable();
    positions.dedup();
    let mut labels = Vec::new();
    let mut elements = Vec::new();
    for &i in &positions {
        if i == frag.star() {
            labels.push("h".to_string());
            elements.push(h.clone());
        } else {
            labels.push(spec.label(i).to_string());
            elements.push(spec.basis(i));
        }
    }
    let beta = frag.g(cond.unpaired.expect("conditions hold"), 0);
    let lambda = Phase::root_of_unity(frag.p as u64);
    let target: Vec<Vec<Phase>> = positions
        .iter()
        .map(|&a| {
            positions
                .iter()
                .map(|&b| match (a == frag.star(), b == frag.star()) {
                    (false, false) => t.theta(a, b),
                    (true, true) => Phase::ONE,
                    (false, true) if a == beta => lambda,
                    (true, false) if b == beta => lambda.conj(),
                    _ => Phase::ONE,
                })
                .collect()
        })
        .collect();
    substitution_report(t, formula, &positions, labels, elements, target)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementEvidence {
    pub subset: Vec<String>,
    pub group_order: String,
    pub centralizer_order: usize,
    pub centralizer_generators: Vec<GroupElement>,
    pub generated_order: usize,
    pub complemented: bool,
    /// A generator outside `⟨Γ_S ∪ Z(S)⟩`.
    pub missing_generator: Option<String>,
}

pub fn complement_evidence(t: &CcrTriple, positions: &[usize]) -> Result<ComplementEvidence> {
    let spec = t.spec();
    let z = t.generator_centralizer(positions)?;
    let mut gens: Vec<GroupElement> = positions.iter().map(|&i| spec.basis(i)).collect();
    gens.extend(z.generators().iter().cloned());
    let span = spec.subgroup_generated(&gens)?;
    let complemented = is_complemented(t, positions)?;
    let missing_generator = (0..t.rank())
        .find(|&i| !span.contains(&spec.basis(i)))
        .map(|i| spec.label(i).to_string());
    Ok(ComplementEvidence {
        subset: positions.iter().map(|&i| spec.label(i).to_string()).collect(),
        group_order: spec.order().to_string(),
        centralizer_order: z.order(),
        centralizer_generators: z.generators().to_vec(),
        generated_order: span.order(),
        complemented,
        missing_generator,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementationContrast {
    pub fragment: ComplementEvidence,
    pub pairing: ComplementEvidence,
    pub opposite: bool,
}

/// Omits the last g-pair from both: the fragment subset keeps all f's and
/// `g(*)`.
pub fn complementation_contrast(
    frag: &NonUniquenessFragment,
    pairing: &PairingTriple,
) -> Result<ComplementationContrast> {
    if frag.pairs == 0 || pairing.k == 0 {
        return Err(Error::Precondition("both triples need a pair to omit".into()));
    }
    let mut f: Vec<usize> = (0..frag.f_count()).collect();
    for a in 0..frag.pairs - 1 {
        f.extend([frag.g(a, 0), frag.g(a, 1)]);
    }
    f.push(frag.star());
    let s: Vec<usize> = (0..2 * (pairing.k - 1)).collect();
    let fragment = complement_evidence(&frag.triple, &f)?;
    let pairing = complement_evidence(&pairing.triple, &s)?;
    Ok(ComplementationContrast {
        opposite: fragment.complemented != pairing.complemented,
        fragment,
        pairing,
    })
}

/// Pairs `g(x,0), g(x,1)` of order `p` over `J = {0,…,k-1}` with
/// `Θ(g(x,0), g(y,1)) = λ` iff `x ≤ y`. Pair `x` sits at slot `slots[x]`,
/// i.e. at generator positions `2·slots[x]` and `2·slots[x]+1`. Generators
/// after the chain form an optional cross-trivial minus part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainTriple {
    pub k: usize,
    pub p: u32,
    pub slots: Vec<usize>,
    pub triple: CcrTriple,
}

impl ChainTriple {
    pub fn positions(&self, x: usize) -> (usize, usize) {
        (2 * self.slots[x], 2 * self.slots[x] + 1)
    }

    /// Appends a cross-trivial minus part after the chain generators.
    pub fn with_minus(&self, minus: &[(u32, u32)]) -> Result<ChainTriple> {
        Ok(ChainTriple {
            triple: self.triple.direct_sum(&minus_triple(minus)?),
            ..self.clone()
        })
    }
}

pub fn chain_triple(k: usize, p: u32) -> Result<ChainTriple> {
    chain_triple_permuted(k, p, &(0..k).collect::<Vec<_>>())
}

/// Chain triple with pair `x` placed at slot `slots[x]`; labels follow the slot.
pub fn chain_triple_permuted(k: usize, p: u32, slots: &[usize]) -> Result<ChainTriple> {
    check_prime(p)?;
    let mut sorted = slots.to_vec();
    sorted.sort_unstable();
    if sorted != (0..k).collect::<Vec<_>>() {
        return Err(Error::Precondition("slots must permute 0..k".into()));
    }
    let mut gens = Vec::with_capacity(2 * k);
    for s in 0..k {
        gens.push(Generator::new(format!("s{s}a"), p));
        gens.push(Generator::new(format!("s{s}b"), p));
    }
    if slots.iter().enumerate().all(|(x, &s)| x == s) {
        for (x, g) in gens.chunks_mut(2).enumerate() {
            g[0].label = format!("g({x},0)");
            g[1].label = format!("g({x},1)");
        }
    }
    let spec = GroupSpec::new(gens)?;
    spec.checked_order()?;
    let lambda = Phase::root_of_unity(p as u64);
    let mut theta = vec![vec![Phase::ONE; 2 * k]; 2 * k];
    for x in 0..k {
        for y in x..k {
            let (a, d) = (2 * slots[x], 2 * slots[y] + 1);
            theta[a][d] = lambda;
            theta[d][a] = lambda.conj();
        }
    }
    Ok(ChainTriple {
        k,
        p,
        slots: slots.to_vec(),
        triple: CcrTriple::new(spec, theta)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    /// `√(φ²)`, correctly rounded when `φ²` is rational.
    pub value: f64,
    /// `½‖ad − da‖` from a floating-point SVD.
    pub svd_value: f64,
    /// `φ²`, exact.
    pub squared: CyclotomicScalar,
    pub nonzero: bool,
}

/// `φ(a,b,c,d) = ½‖ad − da‖` on `(u_{g(x,0)}, u_{g(x,1)}, u_{g(y,0)}, u_{g(y,1)})`,
/// given the generator positions of the two pairs.
///
/// The norm is taken in the regular representation of the restriction to the
/// two generators involved; the inclusion is an injective *-homomorphism and
/// hence isometric.
pub fn phi_at(t: &CcrTriple, x_pair: (usize, usize), y_pair: (usize, usize)) -> Result<PhiValue> {
    let (a, d) = (x_pair.0, y_pair.1);
    let sub = Arc::new(t.restrict(&[a, d])?);
    let (ia, id) = if a < d { (0, 1) } else { (1, 0) };
    let ua = AlgebraElement::generator(&sub, ia);
    let ud = AlgebraElement::generator(&sub, id);
    let comm = ua.commutator(&ud)?;
    let quarter = BigRational::new(1.into(), 4.into());
    let squared = match comm.as_scaled_monomial() {
        Some((mu, _)) => mu.norm_squared().scale(&quarter),
        None if comm.is_zero() => CyclotomicScalar::zero(),
        None => unreachable!("a commutator of two basis unitaries is a multiple of one"),
    };
    let r = regular_rep(sub)?;
    let svd_value = 0.5 * rep_of_element(&r, &comm)?.spectral_norm();
    let value = match squared.as_rational() {
        Some(q) => q.to_f64().unwrap_or(f64::NAN).sqrt(),
        None => svd_value,
    };
    Ok(PhiValue {
        value,
        svd_value,
        squared,
        nonzero: !comm.is_zero(),
    })
}

pub fn phi(ct: &ChainTriple, x: usize, y: usize) -> Result<PhiValue> {
    if x >= ct.k || y >= ct.k {
        return Err(Error::Precondition(format!("index out of range for k = {}", ct.k)));
    }
    phi_at(&ct.triple, ct.positions(x), ct.positions(y))
}

pub fn phi_matrix(ct: &ChainTriple) -> Result<Vec<Vec<PhiValue>>> {
    (0..ct.k)
        .map(|x| (0..ct.k).map(|y| phi(ct, x, y)).collect())
        .collect()
}

/// Reconstructs the order of the pairs from the zero pattern of `φ` read off
/// the slots alone. Returns the slots listed from least to greatest.
pub fn recover_order(ct: &ChainTriple) -> Result<Vec<usize>> {
    let k = ct.k;
    let pair = |s: usize| (2 * s, 2 * s + 1);
    let mut nz = vec![vec![false; k]; k];
    for s in 0..k {
        for u in 0..k {
            nz[s][u] = phi_at(&ct.triple, pair(s), pair(u))?.nonzero;
        }
    }
    for s in 0..k {
        for u in 0..k {
            if s != u && nz[s][u] == nz[u][s] {
                return Err(Error::Precondition(format!(
                    "slots {s} and {u} are not comparable in the phi pattern"
                )));
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(nz[s].iter().filter(|&&b| b).count()));
    for (i, &s) in order.iter().enumerate() {
        for &u in &order[i..] {
            if !nz[s][u] {
                return Err(Error::Precondition("phi pattern is not transitive".into()));
            }
        }
    }
    Ok(order)
}

/// `g'(j,0) = g(x(j),0)`; corrected `g'(j,1) = g(x(j),1)·g(x(j-1),1)^{p-1}`,
/// literal `g'(j,1) = g(x(j),1)·∏_{i<j} g(x(i),1)`. The target is the
/// pairing pattern: `λ` within each new pair and 1 across.
pub fn chain_change_of_generators(ct: &ChainTriple, formula: Formula) -> Result<GeneratorSubstitution> {
    let t = &ct.triple;
    let spec = t.spec();
    let p = ct.p as i64;
    let mut labels = Vec::new();
    let mut elements = Vec::new();
    for j in 0..ct.k {
        let (a, b) = ct.positions(j);
        labels.push(format!("g'({j},0)"));
        elements.push(spec.basis(a));
        let mut v = vec![0i64; t.rank()];
        v[b] = 1;
        match formula {
            Formula::Corrected if j > 0 => v[ct.positions(j - 1).1] += p - 1,
            Formula::Literal => {
                for i in 0..j {
                    v[ct.positions(i).1] += 1;
                }
            }
            _ => {}
        }
        labels.push(format!("g'({j},1)"));
        elements.push(spec.element(&v)?);
    }
    let lambda = Phase::root_of_unity(ct.p as u64);
    let n = 2 * ct.k;
    let mut target = vec![vec![Phase::ONE; n]; n];
    for j in 0..ct.k {
        target[2 * j][2 * j + 1] = lambda;
        target[2 * j + 1][2 * j] = lambda.conj();
    }
    let original: Vec<usize> = (0..ct.k)
        .flat_map(|x| {
            let (a, b) = ct.positions(x);
            [a, b]
        })
        .collect();
    substitution_report(t, formula, &original, labels, elements, target)
}

//! Finite direct sums of cyclic groups `Γ = ⊕_ξ ℤ/f(ξ)` with a fixed,
//! ordered list of generators, plus fully enumerated subgroups.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits;

/// One cyclic summand. The label is cosmetic; a generator is identified by
/// its position in the [`GroupSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub order: u32,
}

impl Generator {
    pub fn new(label: impl Into<String>, order: u32) -> Self {
        Generator {
            label: label.into(),
            order,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroupSpec")]
pub struct GroupSpec {
    generators: Vec<Generator>,
}

#[derive(Deserialize)]
struct RawGroupSpec {
    generators: Vec<Generator>,
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawGroupSpec) -> Result<Self> {
        GroupSpec::new(raw.generators)
    }
}

/// An exponent vector `m` standing for `∏_ξ g(ξ)^{m(ξ)}`, entries reduced
/// modulo the generator orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u32>);

impl GroupElement {
    /// Wraps raw exponents without reducing them; use [`GroupSpec::element`]
    /// to obtain a checked element.
    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        GroupElement(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

impl GroupSpec {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.order < 2) {
            return Err(Error::InvalidGroup(format!(
                "generator {:?} has order {}, orders must be at least 2",
                g.label, g.order
            )));
        }
        Ok(GroupSpec { generators })
    }

    /// Generators labelled `g0, g1, …` with the given orders.
    pub fn from_orders(orders: &[u32]) -> Result<Self> {
        GroupSpec::new(
            orders
                .iter()
                .enumerate()
                .map(|(i, &o)| Generator::new(format!("g{i}"), o))
                .collect(),
        )
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn orders(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.order).collect()
    }

    pub fn generator_order(&self, i: usize) -> u32 {
        self.generators[i].order
    }

    pub fn label(&self, i: usize) -> &str {
        &self.generators[i].label
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    /// `|Γ| = ∏ f(ξ)`; saturates at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.generators
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.order as u128))
    }

    /// `|Γ|` as a `usize`, provided it is within the enumeration cap.
    pub fn checked_order(&self) -> Result<usize> {
        let order = self.order();
        let cap = limits::enumeration_cap();
        if order > cap as u128 {
            return Err(Error::EnumerationCap { order, cap });
        }
        Ok(order as usize)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// The basis vector of generator `i`.
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        GroupElement(v)
    }

    /// Builds an element from arbitrary integers, reducing each modulo its order.
    pub fn element(&self, exponents: &[i64]) -> Result<GroupElement> {
        if exponents.len() != self.rank() {
            return Err(Error::SpecMismatch {
                element: exponents.iter().map(|&m| m as u64).collect(),
                orders: self.orders(),
            });
        }
        Ok(GroupElement(
            exponents
                .iter()
                .zip(&self.generators)
                .map(|(&m, g)| m.rem_euclid(g.order as i64) as u32)
                .collect(),
        ))
    }

    /// Checks that `g` has the right length and reduced entries.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let ok = g.0.len() == self.rank()
            && g.0.iter().zip(&self.generators).all(|(&m, gen)| m < gen.order);
        if ok {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                element: g.0.iter().map(|&m| m as u64).collect(),
                orders: self.orders(),
            })
        }
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.compose_unchecked(g, h))
    }

    pub(crate) fn compose_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.generators)
                .map(|((&a, &b), gen)| ((a as u64 + b as u64) % gen.order as u64) as u32)
                .collect(),
        )
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inverse_unchecked(g))
    }

    pub(crate) fn inverse_unchecked(&self, g: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.generators)
                .map(|(&a, gen)| (gen.order - a) % gen.order)
                .collect(),
        )
    }

    /// `k·g` in additive notation.
    pub fn power(&self, g: &GroupElement, k: i64) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.generators)
                .map(|(&a, gen)| (a as i128 * k as i128).rem_euclid(gen.order as i128) as u32)
                .collect(),
        )
    }

    /// Least `k > 0` with `k·g = e`: the lcm of `f(ξ)/gcd(m(ξ), f(ξ))`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.0.iter().zip(&self.generators).fold(1u64, |acc, (&m, gen)| {
            let o = gen.order as u64 / (m as u64).gcd(&(gen.order as u64));
            acc.lcm(&o)
        })
    }

    /// Mixed-radix position of `g` in the enumeration order (first generator
    /// most significant, which matches the lexicographic order on exponents).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .zip(&self.generators)
            .fold(0usize, |acc, (&m, gen)| acc * gen.order as usize + m as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut v = vec![0; self.rank()];
        for (slot, gen) in v.iter_mut().zip(&self.generators).rev() {
            *slot = (index % gen.order as usize) as u32;
            index /= gen.order as usize;
        }
        GroupElement(v)
    }

    /// All elements in index order. Fails if `|Γ|` exceeds the enumeration cap.
    pub fn elements(&self) -> Result<impl Iterator<Item = GroupElement> + '_> {
        let n = self.checked_order()?;
        Ok((0..n).map(move |i| self.element_at(i)))
    }

    /// `⟨S⟩`, the closure of `S` under the group law.
    pub fn subgroup_generated(&self, set: &[GroupElement]) -> Result<Subgroup> {
        self.checked_order()?;
        for g in set {
            self.check(g)?;
        }
        let mut members: BTreeSet<GroupElement> = BTreeSet::from([self.identity()]);
        let mut generators = Vec::new();
        for s in set {
            if members.contains(s) {
                continue;
            }
            generators.push(s.clone());
            // ⟨H ∪ {s}⟩ = ∪_k (H + k·s); stop at the first multiple already in H.
            let base: Vec<GroupElement> = members.iter().cloned().collect();
            let mut shift = s.clone();
            while !members.contains(&shift) {
                for h in &base {
                    members.insert(self.compose_unchecked(h, &shift));
                }
                shift = self.compose_unchecked(&shift, s);
            }
        }
        Ok(Subgroup {
            spec: self.clone(),
            members: members.into_iter().collect(),
            generators,
        })
    }

    /// `Γ_F`, the subgroup spanned by the listed generator positions.
    pub fn generator_subgroup(&self, positions: &[usize]) -> Result<Subgroup> {
        let basis: Vec<GroupElement> = positions.iter().map(|&i| self.basis(i)).collect();
        self.subgroup_generated(&basis)
    }

    pub fn whole(&self) -> Result<Subgroup> {
        let all: Vec<usize> = (0..self.rank()).collect();
        self.generator_subgroup(&all)
    }
}

/// A subgroup stored as its sorted member list together with a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    spec: GroupSpec,
    members: Vec<GroupElement>,
    generators: Vec<GroupElement>,
}

impl Subgroup {
    /// Wraps an explicit member list, verifying that it is closed under the
    /// group law, and extracts a generating set greedily.
    pub fn from_members(spec: &GroupSpec, members: Vec<GroupElement>) -> Result<Self> {
        for g in &members {
            spec.check(g)?;
        }
        let set: BTreeSet<GroupElement> = members.into_iter().collect();
        if !set.contains(&spec.identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        // set ⊆ ⟨set⟩, so the two coincide iff they have the same size
        let mut sub = spec.subgroup_generated(&[])?;
        for g in &set {
            if !sub.contains(g) {
                let mut gens = sub.generators.clone();
                gens.push(g.clone());
                sub = spec.subgroup_generated(&gens)?;
                if sub.members.len() > set.len() {
                    break;
                }
            }
        }
        if sub.members.len() != set.len() {
            let witness = sub
                .members
                .iter()
                .find(|g| !set.contains(g))
                .expect("sizes differ");
            return Err(Error::NotSubgroup(format!(
                "{witness} is generated but missing"
            )));
        }
        Ok(sub)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() as u128 == self.spec.order()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|g| other.contains(g))
    }

    /// Position of `g` among the sorted members.
    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.members.binary_search(g).ok()
    }
}

/// Membership test, with a spec-mismatch error for foreign elements.
pub fn subgroup_member(g: &GroupElement, h: &Subgroup) -> Result<bool> {
    h.spec.check(g)?;
    Ok(h.contains(g))
}

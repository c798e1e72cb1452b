//! CCR triples `(X, Γ, Θ)`: validation of the defining conditions, the
//! bicharacter extension of `Θ` to `Γ × Γ`, centralizers and morphisms.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Phase;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, Subgroup};

/// Which defining condition a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `Θ(ξ,ξ) = 1`
    #[serde(rename = "CCR.1")]
    Diagonal,
    /// `Θ(ξ,η) = conj Θ(η,ξ)`
    #[serde(rename = "CCR.2")]
    ConjugateSymmetry,
    /// `Θ(ξ,η)^gcd(f(ξ),f(η)) = 1`
    #[serde(rename = "CCR.4")]
    GcdOrder,
    /// The table is not `|X| × |X|`.
    #[serde(rename = "shape")]
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub i: usize,
    pub j: usize,
    pub phase: Phase,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                let tag = serde_json::to_value(v.condition)
                    .ok()
                    .and_then(|x| x.as_str().map(str::to_owned))
                    .unwrap_or_default();
                format!("{tag} at ({}, {}) with phase {}", v.i, v.j, v.phase)
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks a full `Θ` table against the three defining conditions and reports
/// every offending pair.
pub fn validate_table(spec: &GroupSpec, table: &[Vec<Phase>]) -> ValidationReport {
    let n = spec.rank();
    let mut violations = Vec::new();
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        violations.push(Violation {
            condition: Condition::Shape,
            i: table.len(),
            j: table.iter().map(Vec::len).max().unwrap_or(0),
            phase: Phase::ONE,
        });
        return ValidationReport { violations };
    }
    for i in 0..n {
        if !table[i][i].is_one() {
            violations.push(Violation {
                condition: Condition::Diagonal,
                i,
                j: i,
                phase: table[i][i],
            });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if i < j && table[i][j] != table[j][i].conj() {
                violations.push(Violation {
                    condition: Condition::ConjugateSymmetry,
                    i,
                    j,
                    phase: table[i][j],
                });
            }
            let g = (spec.generator_order(i) as i64).gcd(&(spec.generator_order(j) as i64));
            if i < j && !table[i][j].pow(g).is_one() {
                violations.push(Violation {
                    condition: Condition::GcdOrder,
                    i,
                    j,
                    phase: table[i][j],
                });
            }
        }
    }
    ValidationReport { violations }
}

/// A validated CCR triple. The linear order on `X` is the generator order of
/// the [`GroupSpec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcrTriple {
    spec: GroupSpec,
    theta: Vec<Vec<Phase>>,
    // Θ(ξ,η) = exp(2πi·theta_num[ξ][η]/den) over a common denominator.
    den: u64,
    theta_num: Vec<Vec<u64>>,
}

impl CcrTriple {
    /// Builds a triple from a full table, rejecting it if any defining
    /// condition fails.
    pub fn new(spec: GroupSpec, theta: Vec<Vec<Phase>>) -> Result<Self> {
        let report = validate_table(&spec, &theta);
        if !report.is_ok() {
            return Err(Error::InvalidTriple(report));
        }
        let den = theta
            .iter()
            .flatten()
            .fold(1u64, |acc, p| acc.lcm(&p.denom()));
        let theta_num = theta
            .iter()
            .map(|row| row.iter().map(|p| p.numer() * (den / p.denom())).collect())
            .collect();
        Ok(CcrTriple {
            spec,
            theta,
            den,
            theta_num,
        })
    }

    /// Builds a triple from strictly upper-triangular entries `(i, j, Θ(i,j))`
    /// with `i < j`; the lower half is filled by conjugation and the diagonal
    /// is 1. Unlisted pairs are 1.
    pub fn from_upper(spec: GroupSpec, entries: &[(usize, usize, Phase)]) -> Result<Self> {
        let n = spec.rank();
        let mut theta = vec![vec![Phase::ONE; n]; n];
        for &(i, j, p) in entries {
            if i >= j || j >= n {
                return Err(Error::Parse(format!(
                    "theta entry ({i}, {j}) must satisfy i < j < {n}"
                )));
            }
            theta[i][j] = p;
            theta[j][i] = p.conj();
        }
        CcrTriple::new(spec, theta)
    }

    /// `Θ ≡ 1`, the commutative case.
    pub fn trivial(spec: GroupSpec) -> Self {
        let n = spec.rank();
        CcrTriple::new(spec, vec![vec![Phase::ONE; n]; n]).expect("trivial theta is valid")
    }

    /// `(ℤ/2)²` with `Θ(a,b) = -1`.
    pub fn pauli() -> Self {
        let spec = GroupSpec::new(vec![
            crate::group::Generator::new("a", 2),
            crate::group::Generator::new("b", 2),
        ])
        .expect("orders are 2");
        CcrTriple::from_upper(spec, &[(0, 1, Phase::minus_one())]).expect("Pauli data is valid")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    pub fn theta(&self, i: usize, j: usize) -> Phase {
        self.theta[i][j]
    }

    pub fn theta_table(&self) -> &[Vec<Phase>] {
        &self.theta
    }

    /// Strictly upper-triangular entries different from 1.
    pub fn upper_entries(&self) -> Vec<(usize, usize, Phase)> {
        let n = self.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.theta[i][j].is_one() {
                    out.push((i, j, self.theta[i][j]));
                }
            }
        }
        out
    }

    /// Numerator of `Θ(ξ,η)` over the common denominator [`Self::theta_denominator`].
    pub(crate) fn theta_numerator(&self, i: usize, j: usize) -> u64 {
        self.theta_num[i][j]
    }

    pub(crate) fn theta_denominator(&self) -> u64 {
        self.den
    }

    /// `Θ(g,h) = ∏_{ξ,η} Θ(ξ,η)^{m_g(ξ)·m_h(η)}`.
    ///
    /// # Panics
    /// If either element has the wrong length.
    pub fn bicharacter(&self, g: &GroupElement, h: &GroupElement) -> Phase {
        let (a, b) = (g.exponents(), h.exponents());
        assert_eq!(a.len(), self.rank(), "element length mismatch");
        assert_eq!(b.len(), self.rank(), "element length mismatch");
        let den = self.den as u128;
        let mut acc: u128 = 0;
        for (i, &mi) in a.iter().enumerate() {
            if mi == 0 {
                continue;
            }
            let row = &self.theta_num[i];
            let mut inner: u128 = 0;
            for (j, &nj) in b.iter().enumerate() {
                if nj != 0 && row[j] != 0 {
                    inner += row[j] as u128 * nj as u128;
                }
            }
            acc = (acc + (inner % den) * mi as u128) % den;
        }
        Phase::new(acc as i64, self.den)
    }

    /// Realized pairing matrix `[Θ(x_a, x_b)]` of a list of elements.
    pub fn pairing_matrix(&self, elements: &[GroupElement]) -> Vec<Vec<Phase>> {
        elements
            .iter()
            .map(|x| elements.iter().map(|y| self.bicharacter(x, y)).collect())
            .collect()
    }

    /// `Z_{Γ,Θ}(S) = {g : Θ(x,g) = 1 for all x ∈ S}`, checked closed.
    pub fn centralizer(&self, set: &[GroupElement]) -> Result<Subgroup> {
        for x in set {
            self.spec.check(x)?;
        }
        let members: Vec<GroupElement> = self
            .spec
            .elements()?
            .filter(|g| set.iter().all(|x| self.bicharacter(x, g).is_one()))
            .collect();
        Subgroup::from_members(&self.spec, members)
    }

    /// Centralizer of the generators at the given positions.
    pub fn generator_centralizer(&self, positions: &[usize]) -> Result<Subgroup> {
        let basis: Vec<GroupElement> = positions.iter().map(|&i| self.spec.basis(i)).collect();
        self.centralizer(&basis)
    }

    /// The restricted triple `(F, Γ_F, Θ|F)` on the given generator positions,
    /// kept in increasing order.
    pub fn restrict(&self, positions: &[usize]) -> Result<CcrTriple> {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        pos.dedup();
        if pos.last().is_some_and(|&p| p >= self.rank()) {
            return Err(Error::Precondition(format!(
                "generator position out of range for rank {}",
                self.rank()
            )));
        }
        let spec = GroupSpec::new(
            pos.iter()
                .map(|&i| self.spec.generators()[i].clone())
                .collect(),
        )?;
        let theta = pos
            .iter()
            .map(|&i| pos.iter().map(|&j| self.theta[i][j]).collect())
            .collect();
        CcrTriple::new(spec, theta)
    }

    /// Places an element of the restriction to `positions` into `Γ`.
    pub fn embed_restricted(&self, positions: &[usize], g: &GroupElement) -> GroupElement {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        pos.dedup();
        let mut v = vec![0; self.rank()];
        for (&p, &m) in pos.iter().zip(g.exponents()) {
            v[p] = m;
        }
        GroupElement::from_exponents(v)
    }

    /// The triple on `X ⊔ Y` with cross pairings equal to 1; generators of
    /// `self` come first.
    pub fn direct_sum(&self, other: &CcrTriple) -> CcrTriple {
        let mut gens = self.spec.generators().to_vec();
        gens.extend(other.spec.generators().iter().cloned());
        let spec = GroupSpec::new(gens).expect("orders already validated");
        let (n, m) = (self.rank(), other.rank());
        let mut theta = vec![vec![Phase::ONE; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                theta[i][j] = self.theta[i][j];
            }
        }
        for i in 0..m {
            for j in 0..m {
                theta[n + i][n + j] = other.theta[i][j];
            }
        }
        CcrTriple::new(spec, theta).expect("direct sum of valid triples is valid")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaEntry {
    pub i: usize,
    pub j: usize,
    pub phase: Phase,
}

/// Wire form of a triple: upper-triangular entries only, unlisted pairs 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub group: GroupSpec,
    #[serde(default)]
    pub theta: Vec<ThetaEntry>,
}

impl TryFrom<TripleJson> for CcrTriple {
    type Error = Error;

    fn try_from(raw: TripleJson) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &raw.theta {
            if !seen.insert((e.i, e.j)) {
                return Err(Error::Parse(format!("duplicate theta entry ({}, {})", e.i, e.j)));
            }
        }
        let entries: Vec<_> = raw.theta.iter().map(|e| (e.i, e.j, e.phase)).collect();
        CcrTriple::from_upper(raw.group, &entries)
    }
}

impl From<&CcrTriple> for TripleJson {
    fn from(t: &CcrTriple) -> Self {
        TripleJson {
            group: t.spec.clone(),
            theta: t
                .upper_entries()
                .into_iter()
                .map(|(i, j, phase)| ThetaEntry { i, j, phase })
                .collect(),
        }
    }
}

impl CcrTriple {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TripleJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TripleJson::from(self)).expect("triple serializes")
    }
}

impl Serialize for CcrTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TripleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CcrTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TripleJson::deserialize(d)?;
        CcrTriple::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// A morphism of CCR triples, given by the images of the source generators
/// and extended to `Γ` by linearity on exponent vectors.
#[derive(Clone, Debug)]
pub struct CcrMorphism {
    source: Arc<CcrTriple>,
    target: Arc<CcrTriple>,
    images: Vec<GroupElement>,
}

/// Outcome of [`check_morphism`], with a counterexample on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MorphismCheck {
    Ok,
    /// The image of a generator has order not dividing the generator's order.
    NotHomomorphism { generator: usize, image_order: u64 },
    NotInjective { kernel_element: GroupElement },
    ThetaMismatch {
        i: usize,
        j: usize,
        source: Phase,
        target: Phase,
    },
}

impl MorphismCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, MorphismCheck::Ok)
    }
}

impl CcrMorphism {
    pub fn new(
        source: Arc<CcrTriple>,
        target: Arc<CcrTriple>,
        images: Vec<GroupElement>,
    ) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::Morphism(format!(
                "{} generator images given for a source of rank {}",
                images.len(),
                source.rank()
            )));
        }
        for x in &images {
            target.spec().check(x)?;
        }
        Ok(CcrMorphism {
            source,
            target,
            images,
        })
    }

    pub fn identity(t: Arc<CcrTriple>) -> Self {
        let images = (0..t.rank()).map(|i| t.spec().basis(i)).collect();
        CcrMorphism {
            source: t.clone(),
            target: t,
            images,
        }
    }

    pub fn source(&self) -> &Arc<CcrTriple> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CcrTriple> {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    /// `φ(g) = Σ_ξ m_g(ξ)·φ(g(ξ))`.
    pub fn map(&self, g: &GroupElement) -> GroupElement {
        let ts = self.target.spec();
        let mut acc = ts.identity();
        for (&m, img) in g.exponents().iter().zip(&self.images) {
            if m != 0 {
                acc = ts.compose_unchecked(&acc, &ts.power(img, m as i64));
            }
        }
        acc
    }

    /// Whether every generator is sent to a target generator, with the source
    /// order preserved.
    pub fn is_order_preserving_on_generators(&self) -> bool {
        let mut last = None;
        for img in &self.images {
            let nz: Vec<(usize, u32)> = img
                .exponents()
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, m)| m != 0)
                .collect();
            match nz.as_slice() {
                [(pos, 1)] => {
                    if last.is_some_and(|l| l >= *pos) {
                        return false;
                    }
                    last = Some(*pos);
                }
                _ => return false,
            }
        }
        true
    }
}

/// Verifies that `m` is a well-defined injective homomorphism preserving `Θ`.
/// Preservation is checked on generator pairs, which suffices by bilinearity.
pub fn check_morphism(m: &CcrMorphism) -> Result<MorphismCheck> {
    let ss = m.source.spec();
    let ts = m.target.spec();
    for (i, img) in m.images.iter().enumerate() {
        let o = ts.element_order(img);
        if (ss.generator_order(i) as u64) % o != 0 {
            return Ok(MorphismCheck::NotHomomorphism {
                generator: i,
                image_order: o,
            });
        }
    }
    for g in ss.elements()? {
        if !g.is_identity() && m.map(&g).is_identity() {
            return Ok(MorphismCheck::NotInjective { kernel_element: g });
        }
    }
    for i in 0..ss.rank() {
        for j in 0..ss.rank() {
            let s = m.source.theta(i, j);
            let t = m.target.bicharacter(&m.images[i], &m.images[j]);
            if s != t {
                return Ok(MorphismCheck::ThetaMismatch {
                    i,
                    j,
                    source: s,
                    target: t,
                });
            }
        }
    }
    Ok(MorphismCheck::Ok)
}

use std::sync::Arc;
use twisted_ccr::triple::*;
use twisted_ccr::*;
use twisted_ccr::group::Generator;
use proptest::prelude::*;

fn el(v: &[u32]) -> GroupElement {
    GroupElement::from_exponents(v.to_vec())
}

fn spec(orders: &[u32]) -> GroupSpec {
    GroupSpec::from_orders(orders).unwrap()
}

#[test]
fn gcd_condition() {
    // i^gcd(4,6) = i² = -1
    let err = CcrTriple::from_upper(spec(&[4, 6]), &[(0, 1, Phase::new(1, 4))]).unwrap_err();
    match err {
        Error::InvalidTriple(r) => {
            assert!(r.violates(Condition::GcdOrder));
            assert_eq!((r.violations[0].i, r.violations[0].j), (0, 1));
        }
        e => panic!("unexpected {e:?}"),
    }
    assert!(CcrTriple::from_upper(spec(&[4, 6]), &[(0, 1, Phase::new(1, 2))]).is_ok());
}

#[test]
fn diagonal_and_symmetry_conditions() {
    let s = spec(&[2, 2]);
    let table = vec![
        vec![Phase::new(1, 2), Phase::ONE],
        vec![Phase::ONE, Phase::ONE],
    ];
    let r = validate_table(&s, &table);
    assert!(r.violates(Condition::Diagonal));
    let table = vec![
        vec![Phase::ONE, Phase::new(1, 2)],
        vec![Phase::ONE, Phase::ONE],
    ];
    let r = validate_table(&s, &table);
    assert!(r.violates(Condition::ConjugateSymmetry));
    assert!(validate_table(&s, &[vec![Phase::ONE]]).violates(Condition::Shape));
    assert!(CcrTriple::from_upper(s, &[(1, 0, Phase::new(1, 2))]).is_err());
}

#[test]
fn pauli_bicharacter() {
    let t = CcrTriple::pauli();
    assert!(t.bicharacter(&el(&[1, 1]), &el(&[0, 0])).is_one());
    // Θ((1,1),(1,0)) = Θ(b,a) = -1
    assert_eq!(t.bicharacter(&el(&[1, 1]), &el(&[1, 0])), Phase::minus_one());
    for g in t.spec().elements().unwrap() {
        assert!(t.bicharacter(&g, &g).is_one());
    }
}

#[test]
fn pauli_centralizers() {
    let t = CcrTriple::pauli();
    assert!(t.centralizer(&[]).unwrap().is_whole());
    let za = t.generator_centralizer(&[0]).unwrap();
    assert_eq!(za.members(), &[el(&[0, 0]), el(&[1, 0])]);
    assert!(t.generator_centralizer(&[0, 1]).unwrap().is_trivial());
}

#[test]
fn morphism_examples() {
    let p = Arc::new(CcrTriple::pauli());
    assert!(check_morphism(&CcrMorphism::identity(p.clone())).unwrap().is_ok());
    let swap = CcrMorphism::new(p.clone(), p.clone(), vec![el(&[0, 1]), el(&[1, 0])]).unwrap();
    assert!(check_morphism(&swap).unwrap().is_ok());
    assert!(!swap.is_order_preserving_on_generators());
    let flat = Arc::new(CcrTriple::trivial(spec(&[2, 2])));
    let m = CcrMorphism::new(p.clone(), flat, vec![el(&[1, 0]), el(&[0, 1])]).unwrap();
    assert_eq!(
        check_morphism(&m).unwrap(),
        MorphismCheck::ThetaMismatch {
            i: 0,
            j: 1,
            source: Phase::minus_one(),
            target: Phase::ONE
        }
    );
    let collapse = CcrMorphism::new(p.clone(), p.clone(), vec![el(&[1, 0]), el(&[1, 0])]).unwrap();
    assert!(matches!(
        check_morphism(&collapse).unwrap(),
        MorphismCheck::NotInjective { .. }
    ));
    let z4 = Arc::new(CcrTriple::trivial(spec(&[4])));
    let bad = CcrMorphism::new(
        Arc::new(CcrTriple::trivial(spec(&[2]))),
        z4,
        vec![el(&[1])],
    )
    .unwrap();
    assert!(matches!(
        check_morphism(&bad).unwrap(),
        MorphismCheck::NotHomomorphism { generator: 0, image_order: 4 }
    ));
}

#[test]
fn restrict_and_direct_sum() {
    let p = CcrTriple::pauli();
    let two = p.direct_sum(&p);
    assert_eq!(two.rank(), 4);
    assert_eq!(two.theta(2, 3), Phase::minus_one());
    assert!(two.theta(0, 3).is_one());
    assert_eq!(two.restrict(&[3, 2]).unwrap(), p);
    assert_eq!(two.embed_restricted(&[2, 3], &el(&[1, 1])), el(&[0, 0, 1, 1]));
    let labelled = GroupSpec::new(vec![Generator::new("x", 3)]).unwrap();
    assert_eq!(CcrTriple::trivial(labelled).spec().label(0), "x");
}

#[test]
fn json_round_trip() {
    let text = r#"{"group":{"generators":[{"label":"a","order":2},{"label":"b","order":2}]},"theta":[{"i":0,"j":1,"phase":"1/2"}]}"#;
    let t = CcrTriple::from_json(text).unwrap();
    assert_eq!(t, CcrTriple::pauli());
    assert_eq!(serde_json::to_string(&t).unwrap(), text);
    let back: CcrTriple = serde_json::from_str(text).unwrap();
    assert_eq!(back, t);
    let lower = text.replace(r#""i":0,"j":1"#, r#""i":1,"j":0"#);
    assert_eq!(CcrTriple::from_json(&lower).unwrap_err().code(), "schema");
    let diag = text.replace(r#""i":0,"j":1"#, r#""i":0,"j":0"#);
    assert_eq!(CcrTriple::from_json(&diag).unwrap_err().code(), "schema");
    let bad = r#"{"group":{"generators":[{"label":"a","order":4},{"label":"b","order":6}]},"theta":[{"i":0,"j":1,"phase":"1/4"}]}"#;
    assert_eq!(CcrTriple::from_json(bad).unwrap_err().code(), "invalid_triple");
}

/// A battery of valid triples with |Γ| ≤ 64.
fn battery() -> Vec<CcrTriple> {
    let mut out = vec![CcrTriple::pauli()];
    out.push(CcrTriple::pauli().direct_sum(&CcrTriple::pauli()));
    out.push(CcrTriple::from_upper(spec(&[4, 4]), &[(0, 1, Phase::new(1, 4))]).unwrap());
    out.push(CcrTriple::from_upper(spec(&[3, 3, 3]), &[(0, 1, Phase::new(1, 3)), (1, 2, Phase::new(2, 3))]).unwrap());
    out.push(CcrTriple::from_upper(spec(&[2, 4, 6]), &[(0, 1, Phase::new(1, 2)), (1, 2, Phase::new(1, 2)), (0, 2, Phase::new(1, 2))]).unwrap());
    out.push(CcrTriple::from_upper(spec(&[2, 2, 2, 2, 2, 2]), &[(0, 1, Phase::new(1, 2)), (2, 5, Phase::new(1, 2)), (3, 4, Phase::new(1, 2))]).unwrap());
    out
}

#[test]
fn bimultiplicative_exhaustive() {
    for t in battery() {
        let s = t.spec();
        let els: Vec<GroupElement> = s.elements().unwrap().collect();
        for g in &els {
            assert!(t.bicharacter(g, &s.inverse(g).unwrap()).is_one());
            for h in &els {
                let gh = s.compose(g, h).unwrap();
                for k in &els {
                    assert_eq!(t.bicharacter(&gh, k), t.bicharacter(g, k) * t.bicharacter(h, k));
                    assert_eq!(t.bicharacter(k, &gh), t.bicharacter(k, g) * t.bicharacter(k, h));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn centralizer_of_generated_subgroup(
        idx in 0usize..6,
        picks in prop::collection::vec(0usize..64, 0..3),
    ) {
        let all = battery();
        let t = &all[idx];
        let n = t.spec().order() as usize;
        let s: Vec<GroupElement> = picks.iter().map(|&i| t.spec().element_at(i % n)).collect();
        let gen = t.spec().subgroup_generated(&s).unwrap();
        let a = t.centralizer(&s).unwrap();
        let b = t.centralizer(gen.members()).unwrap();
        prop_assert_eq!(a.members(), b.members());
    }
}

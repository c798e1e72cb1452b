#![allow(dead_code)]

use num_integer::Integer;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use twisted_ccr::{CcrTriple, CyclotomicScalar, GroupElement, GroupSpec, Phase};

pub fn spec(orders: &[u32]) -> GroupSpec {
    GroupSpec::from_orders(orders).unwrap()
}

pub fn el(v: &[u32]) -> GroupElement {
    GroupElement::from_exponents(v.to_vec())
}

/// Fixed battery of triples with |Γ| ≤ 64.
pub fn battery() -> Vec<CcrTriple> {
    let up = |orders: &[u32], entries: &[(usize, usize, i64, u64)]| {
        let e: Vec<_> = entries.iter().map(|&(i, j, n, d)| (i, j, Phase::new(n, d))).collect();
        CcrTriple::from_upper(spec(orders), &e).unwrap()
    };
    vec![
        CcrTriple::pauli(),
        up(&[2], &[]),
        up(&[3, 3], &[(0, 1, 1, 3)]),
        up(&[4, 4], &[(0, 1, 1, 4)]),
        up(&[4, 6], &[(0, 1, 1, 2)]),
        up(&[8, 8], &[(0, 1, 3, 8)]),
        up(&[2, 2, 2, 2], &[(0, 1, 1, 2), (2, 3, 1, 2)]),
        up(&[2, 2, 2, 2], &[(0, 3, 1, 2), (1, 2, 1, 2), (0, 1, 1, 2)]),
        up(&[3, 3, 3], &[(0, 1, 1, 3), (1, 2, 2, 3)]),
        up(&[2, 4, 6], &[(0, 1, 1, 2), (1, 2, 1, 2), (0, 2, 1, 2)]),
        up(&[4, 4, 4], &[]),
        up(&[4, 4, 4], &[(0, 1, 1, 4), (0, 2, 1, 2), (1, 2, 3, 4)]),
        up(&[2, 3, 2, 3], &[(0, 2, 1, 2), (1, 3, 1, 3)]),
        up(&[2, 2, 2, 2, 2, 2], &[(0, 1, 1, 2), (2, 5, 1, 2), (3, 4, 1, 2), (0, 4, 1, 2)]),
        up(&[2, 2, 2, 2, 2, 2], &[(0, 1, 1, 2), (0, 3, 1, 2), (2, 3, 1, 2)]),
    ]
}

/// A uniformly random valid `Θ` on the given orders.
pub fn random_theta<R: Rng>(rng: &mut R, orders: &[u32]) -> CcrTriple {
    let mut entries = Vec::new();
    for i in 0..orders.len() {
        for j in i + 1..orders.len() {
            let g = orders[i].gcd(&orders[j]) as u64;
            let k = rng.gen_range(0..g) as i64;
            if k != 0 {
                entries.push((i, j, Phase::new(k, g)));
            }
        }
    }
    CcrTriple::from_upper(spec(orders), &entries).unwrap()
}

/// Random orders in `2..=max_order` with product at most `max_size`.
pub fn random_orders<R: Rng>(rng: &mut R, max_rank: usize, max_order: u32, max_size: u64) -> Vec<u32> {
    loop {
        let r = rng.gen_range(1..=max_rank);
        let orders: Vec<u32> = (0..r).map(|_| rng.gen_range(2..=max_order)).collect();
        if orders.iter().map(|&o| o as u64).product::<u64>() <= max_size {
            return orders;
        }
    }
}

pub fn random_element_g<R: Rng>(rng: &mut R, s: &GroupSpec) -> GroupElement {
    let v: Vec<u32> = s.generators().iter().map(|g| rng.gen_range(0..g.order)).collect();
    GroupElement::from_exponents(v)
}

/// A coefficient `r·ζ` with `r` a small nonzero rational and `ζ` a root of
/// unity of order dividing `n`.
pub fn random_coeff<R: Rng>(rng: &mut R, n: u64) -> CyclotomicScalar {
    let num: i64 = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
    let den: i64 = rng.gen_range(1..=3);
    let k = rng.gen_range(0..n.max(1)) as i64;
    CyclotomicScalar::scaled_phase(Phase::new(k, n.max(1)), BigRational::new(num.into(), den.into())).unwrap()
}

//! Automorphisms of the complete rooted `d`-ary tree of depth `n`, stored as
//! portraits.
//!
//! Vertices of level `j` are words `w_1 … w_j` over `{0, …, d-1}`, indexed
//! in base `d` with `w_1` most significant. A portrait assigns a permutation
//! `σ_v` to each internal vertex `v`, and acts on the left:
//! `g(w_1 w_2 …) = σ_∅(w_1) σ_{w_1}(w_2) …`, where each label is read at the
//! *original* prefix. Composition `g·h` applies `h` first, so
//! `(g·h)_v = σ^g_{h(v)} ∘ σ^h_v`.

use crate::error::{invalid, Error, Result};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

pub type Perm = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreePortrait {
    arity: usize,
    depth: usize,
    /// `labels[j][i]` is the permutation at the `i`-th vertex of level `j`.
    labels: Vec<Vec<Perm>>,
}

/// Sorted cycle lengths of a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType(pub Vec<usize>);

impl CycleType {
    pub fn of_perm(perm: &[usize]) -> CycleType {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable();
        CycleType(parts)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl std::fmt::Display for CycleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

fn identity_perm(d: usize) -> Perm {
    (0..d as u8).collect()
}

fn check_arity(d: usize) -> Result<()> {
    if !(2..=255).contains(&d) {
        return invalid(format!("arity {d} outside 2..=255"));
    }
    Ok(())
}

impl TreePortrait {
    pub fn identity(arity: usize, depth: usize) -> Result<Self> {
        check_arity(arity)?;
        let labels = (0..depth).map(|j| vec![identity_perm(arity); arity.pow(j as u32)]).collect();
        Ok(TreePortrait { arity, depth, labels })
    }

    /// Portrait from explicit labels, level by level.
    pub fn from_labels(arity: usize, labels: Vec<Vec<Perm>>) -> Result<Self> {
        check_arity(arity)?;
        for (j, level) in labels.iter().enumerate() {
            if level.len() != arity.pow(j as u32) {
                return invalid(format!("level {j} needs {} labels", arity.pow(j as u32)));
            }
            for p in level {
                let mut s = p.clone();
                s.sort_unstable();
                if s != identity_perm(arity) {
                    return invalid(format!("{p:?} is not a permutation of 0..{arity}"));
                }
            }
        }
        Ok(TreePortrait { arity, depth: labels.len(), labels })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[Vec<Perm>] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        let id = identity_perm(self.arity);
        self.labels.iter().flatten().all(|p| *p == id)
    }

    /// Image of vertex `index` at level `level`.
    pub fn apply(&self, level: usize, index: usize) -> usize {
        let d = self.arity;
        let mut out = 0;
        let mut prefix = 0;
        for j in 0..level {
            let digit = (index / d.pow((level - 1 - j) as u32)) % d;
            let img = self.labels[j][prefix][digit] as usize;
            out = out * d + img;
            prefix = prefix * d + digit;
        }
        out
    }

    /// Permutation induced on the `d^m` vertices of level `m`.
    pub fn level_perm(&self, m: usize) -> Result<Vec<usize>> {
        if m > self.depth {
            return invalid(format!("level {m} exceeds depth {}", self.depth));
        }
        Ok((0..self.arity.pow(m as u32)).map(|i| self.apply(m, i)).collect())
    }

    pub fn compose(&self, h: &TreePortrait) -> Result<TreePortrait> {
        if self.arity != h.arity || self.depth != h.depth {
            return Err(Error::InvalidInput(format!(
                "cannot compose portraits of shape ({}, {}) and ({}, {})",
                self.arity, self.depth, h.arity, h.depth
            )));
        }
        let labels = (0..self.depth)
            .map(|j| {
                (0..self.arity.pow(j as u32))
                    .map(|v| {
                        let hv = h.apply(j, v);
                        let (sg, sh) = (&self.labels[j][hv], &h.labels[j][v]);
                        sh.iter().map(|&x| sg[x as usize]).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(TreePortrait { arity: self.arity, depth: self.depth, labels })
    }

    pub fn inverse(&self) -> TreePortrait {
        let mut labels: Vec<Vec<Perm>> = self.labels.iter().map(|l| l.clone()).collect();
        for j in 0..self.depth {
            for v in 0..self.arity.pow(j as u32) {
                let gv = self.apply(j, v);
                let s = &self.labels[j][v];
                let mut inv = vec![0u8; self.arity];
                for (x, &y) in s.iter().enumerate() {
                    inv[y as usize] = x as u8;
                }
                labels[j][gv] = inv;
            }
        }
        TreePortrait { arity: self.arity, depth: self.depth, labels }
    }

    /// `χ_m`: sign of the permutation on level `m`.
    pub fn level_sign(&self, m: usize) -> Result<i8> {
        if m == 0 || m > self.depth {
            return invalid(format!("level {m} outside 1..={}", self.depth));
        }
        let ct = CycleType::of_perm(&self.level_perm(m)?);
        let transpositions: usize = ct.0.iter().map(|l| l - 1).sum();
        Ok(if transpositions % 2 == 0 { 1 } else { -1 })
    }

    pub fn cycle_type_on_leaves(&self) -> CycleType {
        CycleType::of_perm(&self.level_perm(self.depth).expect("depth is valid"))
    }

    pub fn random_with<R: Rng>(arity: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let mut g = TreePortrait::identity(arity, depth)?;
        for level in g.labels.iter_mut() {
            for p in level.iter_mut() {
                p.shuffle(rng);
            }
        }
        Ok(g)
    }
}

/// Uniform element: every label independently uniform in `S_d`.
pub fn random_element(arity: usize, depth: usize, seed: u64) -> Result<TreePortrait> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TreePortrait::random_with(arity, depth, &mut rng)
}

/// `(d!)^((d^n - 1)/(d - 1))`.
pub fn group_order(arity: u64, depth: u32) -> BigUint {
    let fact: BigUint = (1..=arity).map(BigUint::from).product();
    let internal: u64 = (0..depth).map(|j| arity.pow(j)).sum();
    fact.pow(internal as u32)
}

fn all_perms(d: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = identity_perm(d);
    heap_permute(d, &mut p, &mut out);
    out.sort();
    out
}

fn heap_permute(k: usize, p: &mut Perm, out: &mut Vec<Perm>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

/// Every portrait of the given shape; refuses above `cap` elements.
pub fn enumerate_portraits(arity: usize, depth: usize, cap: usize) -> Result<Vec<TreePortrait>> {
    check_arity(arity)?;
    let order = group_order(arity as u64, depth as u32);
    if order > BigUint::from(cap) {
        return Err(Error::SizeCap(format!("|Aut(T)| = {order} exceeds {cap}")));
    }
    let perms = all_perms(arity);
    let slots: usize = (0..depth).map(|j| arity.pow(j as u32)).sum();
    let total = perms.len().pow(slots as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut labels = Vec::with_capacity(depth);
        for j in 0..depth {
            let mut level = Vec::new();
            for _ in 0..arity.pow(j as u32) {
                level.push(perms[code % perms.len()].clone());
                code /= perms.len();
            }
            labels.push(level);
        }
        out.push(TreePortrait { arity, depth, labels });
    }
    Ok(out)
}

fn perm_mul(a: &[usize], b: &[usize]) -> Vec<usize> {
    // a after b
    b.iter().map(|&x| a[x]).collect()
}

fn perm_inv(a: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Order of `G/[G,G]` for `G = Aut(T_n)`, computed by closing the set of
/// commutators under products, after checking the quotient has exponent 2.
/// Elements are represented by their action on the leaves, which is faithful.
pub fn quadratic_character_count_bruteforce(arity: usize, depth: usize) -> Result<u64> {
    let elems = enumerate_portraits(arity, depth, 1024)?;
    let leaf: Vec<Vec<usize>> = elems.iter().map(|g| g.level_perm(depth).unwrap()).collect();
    let mut comm: HashSet<Vec<usize>> = HashSet::new();
    for a in &leaf {
        let ai = perm_inv(a);
        for b in &leaf {
            let bi = perm_inv(b);
            comm.insert(perm_mul(&perm_mul(a, b), &perm_mul(&ai, &bi)));
        }
    }
    let gens: Vec<Vec<usize>> = comm.iter().cloned().collect();
    let mut closure: HashSet<Vec<usize>> = comm.clone();
    let mut queue: VecDeque<Vec<usize>> = comm.into_iter().collect();
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = perm_mul(&x, g);
            if closure.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    for a in &leaf {
        if !closure.contains(&perm_mul(a, a)) {
            return Err(Error::Internal("abelianization is not elementary abelian".into()));
        }
    }
    Ok((leaf.len() / closure.len()) as u64)
}

/// Value of `∏_{m ∈ mask} χ_m(g)`, bit `m - 1` of `mask` selecting level `m`.
pub fn character_product(g: &TreePortrait, mask: u32) -> Result<i8> {
    let mut s = 1;
    for m in 1..=g.depth() {
        if mask >> (m - 1) & 1 == 1 {
            s *= g.level_sign(m)?;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swap_leaf_pair(d: usize, n: usize) -> TreePortrait {
        let mut g = TreePortrait::identity(d, n).unwrap();
        let mut p = identity_perm(d);
        p.swap(0, 1);
        g.labels[n - 1][0] = p;
        g
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(2, 3), BigUint::from(128u32));
        assert_eq!(group_order(2, 1), BigUint::from(2u32));
        assert_eq!(group_order(4, 2), BigUint::from(24u32).pow(5));
        assert_eq!(group_order(3, 0), BigUint::from(1u32));
        // exhaustive count, distinct leaf actions
        let all = enumerate_portraits(2, 3, 1024).unwrap();
        let leaf: HashSet<Vec<usize>> = all.iter().map(|g| g.level_perm(3).unwrap()).collect();
        assert_eq!(leaf.len(), 128);
        assert!(enumerate_portraits(3, 3, 1024).is_err());
    }

    #[test]
    fn signs() {
        let g = swap_leaf_pair(2, 3);
        assert_eq!(g.level_sign(3).unwrap(), -1);
        assert_eq!(g.level_sign(2).unwrap(), 1);
        assert_eq!(g.level_sign(1).unwrap(), 1);
        let id = TreePortrait::identity(3, 2).unwrap();
        assert_eq!(id.level_sign(1).unwrap(), 1);
        assert_eq!(id.level_sign(2).unwrap(), 1);
        assert!(id.level_sign(0).is_err());
        assert!(id.level_sign(3).is_err());
    }

    #[test]
    fn abelianization_counts() {
        assert_eq!(quadratic_character_count_bruteforce(2, 1).unwrap(), 2);
        assert_eq!(quadratic_character_count_bruteforce(2, 2).unwrap(), 4);
        assert_eq!(quadratic_character_count_bruteforce(2, 3).unwrap(), 8);
        assert!(quadratic_character_count_bruteforce(2, 4).is_err());
    }

    #[test]
    fn character_products_distinct_and_exhaustive() {
        let all = enumerate_portraits(2, 3, 1024).unwrap();
        let tables: HashSet<Vec<i8>> = (0..8u32)
            .map(|mask| all.iter().map(|g| character_product(g, mask).unwrap()).collect())
            .collect();
        assert_eq!(tables.len(), 8);
        assert_eq!(tables.len() as u64, quadratic_character_count_bruteforce(2, 3).unwrap());
    }

    #[test]
    fn cycle_types() {
        let id = TreePortrait::identity(2, 3).unwrap();
        assert_eq!(id.cycle_type_on_leaves(), CycleType(vec![1; 8]));
        let root = TreePortrait::from_labels(2, vec![vec![vec![1, 0]]]).unwrap();
        assert_eq!(root.cycle_type_on_leaves(), CycleType(vec![2]));
        // D4 on four leaves has exactly two 4-cycles
        let all = enumerate_portraits(2, 2, 1024).unwrap();
        let fours = all.iter().filter(|g| g.cycle_type_on_leaves() == CycleType(vec![4])).count();
        assert_eq!(fours, 2);
    }

    #[test]
    fn four_cycle_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| {
                TreePortrait::random_with(2, 2, &mut rng).unwrap().cycle_type_on_leaves()
                    == CycleType(vec![4])
            })
            .count();
        assert!((hits as f64 / n as f64 - 0.25).abs() < 0.01);
    }

    #[test]
    fn shape_mismatch() {
        let a = TreePortrait::identity(2, 2).unwrap();
        let b = TreePortrait::identity(2, 3).unwrap();
        assert!(a.compose(&b).is_err());
        assert!(TreePortrait::from_labels(2, vec![vec![vec![0, 0]]]).is_err());
    }

    fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
        (2usize..=4, 0usize..=3, any::<u64>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn group_axioms((d, n, seed) in shape()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = TreePortrait::random_with(d, n, &mut rng).unwrap();
            let h = TreePortrait::random_with(d, n, &mut rng).unwrap();
            let k = TreePortrait::random_with(d, n, &mut rng).unwrap();
            let id = TreePortrait::identity(d, n).unwrap();
            prop_assert_eq!(g.compose(&id).unwrap(), g.clone());
            prop_assert_eq!(id.compose(&g).unwrap(), g.clone());
            prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
            prop_assert!(g.inverse().compose(&g).unwrap().is_identity());
            let lhs = g.compose(&h).unwrap().compose(&k).unwrap();
            let rhs = g.compose(&h.compose(&k).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn level_action_is_homomorphism((d, n, seed) in shape()) {
            prop_assume!(n >= 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = TreePortrait::random_with(d, n, &mut rng).unwrap();
            let h = TreePortrait::random_with(d, n, &mut rng).unwrap();
            let gh = g.compose(&h).unwrap();
            for m in 1..=n {
                let lhs = gh.level_perm(m).unwrap();
                let rhs = perm_mul(&g.level_perm(m).unwrap(), &h.level_perm(m).unwrap());
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(gh.level_sign(m).unwrap(), g.level_sign(m).unwrap() * h.level_sign(m).unwrap());
            }
            prop_assert_eq!(gh.cycle_type_on_leaves().total(), d.pow(n as u32));
        }
    }

    #[test]
    fn associativity_thousand_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let g = TreePortrait::random_with(2, 3, &mut rng).unwrap();
            let h = TreePortrait::random_with(2, 3, &mut rng).unwrap();
            let k = TreePortrait::random_with(2, 3, &mut rng).unwrap();
            assert_eq!(
                g.compose(&h).unwrap().compose(&k).unwrap(),
                g.compose(&h.compose(&k).unwrap()).unwrap()
            );
        }
    }
}

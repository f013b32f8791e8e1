use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Returns `(m, e)` with `n = m^e`, `e >= 2` maximal, or `None` if `n` is not
/// a perfect power.
pub fn is_perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    if n <= &BigUint::one() {
        return None;
    }
    let mut best: Option<(BigUint, u32)> = None;
    let mut cur = n.clone();
    let mut exp = 1u32;
    // Peel prime exponents repeatedly so that e.g. 2^6 reduces to (2, 6).
    'outer: loop {
        let cbits = cur.bits() as u32;
        for e in primes_below(cbits + 1) {
            if !passes_power_residue_filter(&cur, e) {
                continue;
            }
            let r = cur.nth_root(e);
            if r.pow(e) == cur {
                cur = r;
                exp *= e;
                best = Some((cur.clone(), exp));
                continue 'outer;
            }
        }
        break;
    }
    best
}

/// Necessary condition for `n` to be an `e`-th power: `n` is an `e`-th power
/// residue modulo a few primes `s ≡ 1 (mod e)`.
fn passes_power_residue_filter(n: &BigUint, e: u32) -> bool {
    let e = e as u64;
    let mut tested = 0;
    let mut k = 1u64;
    while tested < 4 && k < 2000 {
        let s = k * e + 1;
        k += 1;
        if !super::is_prime_u64(s) {
            continue;
        }
        tested += 1;
        let r = (n % s).try_into().unwrap_or(0u64);
        if r != 0 && super::pow_mod(r, (s - 1) / e, s) != 1 {
            return false;
        }
    }
    true
}

fn primes_below(n: u32) -> impl Iterator<Item = u32> {
    (2..n).filter(|&k| (2..k).take_while(|j| j * j <= k).all(|j| k % j != 0))
}

/// Pairwise coprime, non-perfect-power integers `>= 2` such that every
/// registered input is `± ∏ b_i^{e_i}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprimeBasis {
    elements: Vec<BigUint>,
}

impl CoprimeBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Refines `inputs` into a coprime basis. Zero inputs are ignored; the
    /// caller is responsible for rejecting them.
    pub fn refine(inputs: &[BigInt]) -> Self {
        let mut basis = Self::new();
        for x in inputs {
            basis.insert(x.magnitude());
        }
        basis.elements.sort();
        basis
    }

    pub fn refine_unsigned(inputs: &[BigUint]) -> Self {
        let mut basis = Self::new();
        for x in inputs {
            basis.insert(x);
        }
        basis.elements.sort();
        basis
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Refines the basis so that it also covers `x`.
    pub fn insert(&mut self, x: &BigUint) {
        let mut queue = vec![x.clone()];
        while let Some(y) = queue.pop() {
            if y <= BigUint::one() {
                continue;
            }
            let hit = self.elements.iter().enumerate().find_map(|(i, e)| {
                let g = e.gcd(&y);
                (!g.is_one()).then_some((i, g))
            });
            match hit {
                Some((i, g)) => {
                    let e = self.elements.swap_remove(i);
                    queue.push(&e / &g);
                    queue.push(&y / &g);
                    queue.push(g);
                }
                None => {
                    let root = match is_perfect_power(&y) {
                        Some((m, _)) => m,
                        None => y,
                    };
                    self.elements.push(root);
                }
            }
        }
        self.elements.sort();
    }

    /// Exponent vector of `x` over the basis, `None` if `x` is not covered.
    pub fn exponents(&self, x: &BigUint) -> Option<Vec<u64>> {
        if x.is_zero() {
            return None;
        }
        let mut rest = x.clone();
        let mut exps = vec![0u64; self.elements.len()];
        for (i, b) in self.elements.iter().enumerate() {
            if rest.is_one() {
                break;
            }
            while rest.is_multiple_of(b) {
                rest /= b;
                exps[i] += 1;
            }
        }
        rest.is_one().then_some(exps)
    }

    /// Sign and exponent vector of a nonzero integer.
    pub fn express(&self, x: &BigInt) -> Option<(bool, Vec<u64>)> {
        let exps = self.exponents(x.magnitude())?;
        Some((x.is_negative(), exps))
    }

    pub fn reconstruct(&self, negative: bool, exps: &[u64]) -> BigInt {
        let mut v = BigUint::one();
        for (b, &e) in self.elements.iter().zip(exps) {
            v *= b.pow(e as u32);
        }
        let v = BigInt::from(v);
        if negative {
            -v
        } else {
            v
        }
    }

    pub fn is_pairwise_coprime(&self) -> bool {
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                if !a.gcd(b).is_one() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis_of(v: &[i64]) -> Vec<u64> {
        let inputs: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        CoprimeBasis::refine(&inputs)
            .elements()
            .iter()
            .map(|b| b.try_into().unwrap())
            .collect()
    }

    #[test]
    fn refinement_examples() {
        assert_eq!(basis_of(&[6, 10]), vec![2, 3, 5]);
        assert_eq!(basis_of(&[4]), vec![2]);
        assert_eq!(basis_of(&[6, 24]), vec![2, 3]);
        let b = CoprimeBasis::refine(&[BigInt::from(6), BigInt::from(24)]);
        assert_eq!(b.exponents(&BigUint::from(24u32)).unwrap(), vec![3, 1]);
        assert_eq!(basis_of(&[-1, 1]), Vec::<u64>::new());
        assert_eq!(basis_of(&[36, 6]), vec![6]);
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(is_perfect_power(&BigUint::from(64u32)), Some((BigUint::from(2u32), 6)));
        assert_eq!(is_perfect_power(&BigUint::from(72u32)), None);
        assert_eq!(is_perfect_power(&BigUint::from(108u32)), None);
        assert_eq!(is_perfect_power(&BigUint::from(1u32)), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn refinement_is_sound(v in proptest::collection::vec(
            prop_oneof![1i64..2000, -2000i64..-1], 1..8)) {
            let inputs: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            let basis = CoprimeBasis::refine(&inputs);
            prop_assert!(basis.is_pairwise_coprime());
            for b in basis.elements() {
                prop_assert!(is_perfect_power(b).is_none());
                prop_assert!(b > &BigUint::one());
            }
            for x in &inputs {
                let (neg, e) = basis.express(x).expect("covered");
                prop_assert_eq!(&basis.reconstruct(neg, &e), x);
            }
        }
    }
}

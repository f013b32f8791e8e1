//! Bounded factorization: trial division, then Pollard rho (Brent) with an
//! iteration cap. Cofactors that cannot be split are reported, never guessed.

use super::{is_probable_prime, primes_up_to};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    /// Prime (or probable prime above 3.3e24) factors with multiplicity.
    pub primes: Vec<(BigUint, u32)>,
    /// Composite cofactors the bounded search could not split.
    pub unfactored: Vec<BigUint>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    fn push_prime(&mut self, p: BigUint) {
        match self.primes.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => self.primes.push((p, 1)),
        }
    }
}

/// One Pollard rho (Brent) attempt with polynomial `x^2 + c`.
pub fn pollard_rho(n: &BigUint, c: u64, max_iters: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 64u64;
    let mut iters = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
            iters += m;
        }
        r *= 2;
        if iters > max_iters {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n && !g.is_zero()).then_some(g)
}

pub fn factor_bounded(n: &BigUint, trial_bound: u64, rho_iters: u64) -> Factorization {
    let mut out = Factorization::default();
    if n.is_zero() {
        out.unfactored.push(n.clone());
        return out;
    }
    let mut rest = n.clone();
    for p in primes_up_to(trial_bound) {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while rest.is_multiple_of(&pb) {
            rest /= &pb;
            out.push_prime(pb.clone());
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m.to_u64().map_or(false, |v| v <= trial_bound.saturating_mul(trial_bound))
            && m.to_u64().map_or(false, super::is_prime_u64)
        {
            out.push_prime(m);
            continue;
        }
        if is_probable_prime(&m) {
            out.push_prime(m);
            continue;
        }
        let split = (1..=8).find_map(|c| pollard_rho(&m, c, rho_iters));
        match split {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => out.unfactored.push(m),
        }
    }
    out.primes.sort();
    out
}

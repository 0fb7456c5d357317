use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `p <= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Prime factorization of an integer, with the sign kept separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerFactorization {
    pub negative: bool,
    /// `(prime, exponent)`, ascending by prime.
    pub factors: Vec<(BigUint, u32)>,
}

impl IntegerFactorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn big_is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Pollard-Brent; `n` is odd, composite and has no small factors.
fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if ys > x { &ys - &x } else { &x - &ys };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if big_is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(&n);
    let rest = &n / &d;
    split_into(d, out);
    split_into(rest, out);
}

/// Factor a nonzero integer completely.
///
/// Small primes are removed by trial division; whatever remains is split with
/// Pollard-Brent. Intended for discriminants of small-degree polynomials.
pub fn factor_integer(n: &BigInt) -> IntegerFactorization {
    assert!(!n.is_zero(), "factor_integer(0)");
    let negative = n.sign() == Sign::Minus;
    let mut m = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();
    for p in primes_up_to(10_000) {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            found.push(bp.clone());
        }
    }
    split_into(m, &mut found);
    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    IntegerFactorization { negative, factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_miller_rabin() {
        let sieve = primes_up_to(2000);
        let mr: Vec<u64> = (0..=2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
    }

    #[test]
    fn large_primes() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn factors_a5_discriminant() {
        let f = factor_integer(&BigInt::from(30_991_489));
        let got: Vec<(u64, u32)> = f
            .factors
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect();
        assert_eq!(got, vec![(19, 2), (293, 2)]);
        assert!(!f.negative);
    }

    #[test]
    fn factors_product_of_large_primes() {
        let a = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * -12;
        let f = factor_integer(&a);
        assert!(f.negative);
        let got: Vec<(u64, u32)> = f
            .factors
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect();
        assert_eq!(got, vec![(2, 2), (3, 1), (998_244_353, 1), (1_000_000_007, 1)]);
    }
}

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{is_prime, ExactError, Poly};

/// Polynomial over the prime field `F_p`, dense, ascending degree.
///
/// Residues are kept in `[0, p)` and the coefficient vector never ends in a
/// zero. The modulus must fit in 63 bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    powmod(a, p - 2, p)
}

/// Residue of an integer modulo `p`, in `[0, p)`.
pub(crate) fn reduce_int(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        assert!((2..(1 << 63)).contains(&p), "modulus out of range: {p}");
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    /// Reduce signed integer coefficients modulo `p`.
    pub fn from_i64s(p: u64, coeffs: &[i64]) -> Self {
        let pi = p as i128;
        FpPoly::new(
            p,
            coeffs
                .iter()
                .map(|&c| (c as i128).rem_euclid(pi) as u64)
                .collect(),
        )
    }

    /// Reduce a rational polynomial modulo `p`; every denominator must be a
    /// unit mod `p`.
    pub fn from_poly(f: &Poly, p: u64) -> Result<Self, ExactError> {
        let mut out = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            let num = reduce_int(c.numer(), p);
            let den = reduce_int(c.denom(), p);
            if den == 0 {
                return Err(ExactError::DenominatorDivisible(p));
            }
            out.push(mulmod(num, invmod(den, p), p));
        }
        Ok(FpPoly::new(p, out))
    }

    pub fn zero(p: u64) -> Self {
        FpPoly::new(p, Vec::new())
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn t(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        FpPoly::new(p, vec![c])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => self.scale(invmod(lc, self.p)),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        FpPoly::new(
            self.p,
            self.coeffs.iter().map(|&a| mulmod(a, c, self.p)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::new(
            self.p,
            (0..n)
                .map(|i| addmod(self.coeff(i), other.coeff(i), self.p))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::new(
            self.p,
            (0..n)
                .map(|i| submod(self.coeff(i), other.coeff(i), self.p))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let p128 = p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p128;
            }
        }
        FpPoly::new(p, out.into_iter().map(|c| c as u64).collect())
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = divisor.degree().expect("division by zero polynomial");
        let Some(nd) = self.degree() else {
            return (FpPoly::zero(p), FpPoly::zero(p));
        };
        if nd < dd {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = invmod(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = mulmod(rem[k + dd], inv, p);
            if q == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = submod(rem[k + j], mulmod(q, d, p), p);
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (FpPoly::new(p, quot), FpPoly::new(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Exact quotient; panics in debug builds if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulmod(c, (i as u64) % p, p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &c in self.coeffs.iter().rev() {
            acc = addmod(mulmod(acc, x, self.p), c, self.p);
        }
        acc
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    /// `self(inner) mod m`.
    pub fn compose_mod(&self, inner: &Self, m: &Self) -> Self {
        let mut acc = FpPoly::zero(self.p);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_mod(inner, m).add(&FpPoly::constant(self.p, c));
        }
        acc.rem(m)
    }

    // Polynomial whose p-th power is `self`, given `self' = 0`.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        FpPoly::new(
            self.p,
            self.coeffs.iter().step_by(p).copied().collect(),
        )
    }

    /// Rabin's test: a polynomial of degree `n` is irreducible iff it divides
    /// `t^(p^n) - t` and is coprime to `t^(p^(n/q)) - t` for each prime `q | n`.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let t = FpPoly::t(self.p);
        let p = BigUint::from(self.p);
        // frob[k] = t^(p^k) mod f
        let mut frob = vec![t.clone()];
        for k in 1..=n {
            let next = frob[k - 1].pow_mod(&p, &f);
            frob.push(next);
        }
        if !frob[n].sub(&t).rem(&f).is_zero() {
            return false;
        }
        let mut m = n;
        let mut q = 2;
        let mut prime_divisors = Vec::new();
        while q * q <= m {
            if m % q == 0 {
                prime_divisors.push(q);
                while m % q == 0 {
                    m /= q;
                }
            }
            q += 1;
        }
        if m > 1 {
            prime_divisors.push(m);
        }
        prime_divisors
            .into_iter()
            .all(|q| f.gcd(&frob[n / q].sub(&t)).is_one())
    }
}

impl Ord for FpPoly {
    /// Degree first, then coefficients from the constant term upward.
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly[{}]({})", self.p, self)
    }
}

/// Knuth's MMIX linear congruential generator. Equal-degree splitting draws
/// its random polynomials from this so that runs are reproducible from the
/// seed alone.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        self.state
    }

    /// Uniform-ish residue in `[0, p)`.
    pub fn below(&mut self, p: u64) -> u64 {
        let hi = (self.next_u64() >> 32) as u128;
        let lo = (self.next_u64() >> 32) as u128;
        (((hi << 32) | lo) % p as u128) as u64
    }
}

// Yun-style squarefree decomposition over F_p, monic input.
fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, m * p as usize));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, m * p as usize));
        }
    }
    out
}

// Squarefree monic input; returns (d, product of all degree-d factors).
fn distinct_degree(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = BigUint::from(f.modulus());
    let t = FpPoly::t(f.modulus());
    let mut rest = f.clone();
    let mut h = t.clone();
    let mut out = Vec::new();
    let mut d = 0;
    while let Some(deg) = rest.degree() {
        if deg < 2 * (d + 1) {
            if deg > 0 {
                out.push((deg, rest.clone()));
            }
            break;
        }
        d += 1;
        h = h.pow_mod(&p, &rest);
        let g = rest.gcd(&h.sub(&t));
        if !g.is_one() {
            out.push((d, g.clone()));
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
        }
    }
    out
}

fn random_poly(rng: &mut Lcg, p: u64, below_degree: usize) -> FpPoly {
    FpPoly::new(p, (0..below_degree).map(|_| rng.below(p)).collect())
}

// Cantor-Zassenhaus splitting of a squarefree monic product of degree-d
// irreducibles.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut Lcg, out: &mut Vec<FpPoly>) {
    let n = f.degree().unwrap();
    if n == d {
        out.push(f.clone());
        return;
    }
    let p = f.modulus();
    loop {
        let a = random_poly(rng, p, n);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut acc = a.clone();
            let mut sq = a.clone();
            for _ in 1..d {
                sq = sq.mul_mod(&sq, f);
                acc = acc.add(&sq);
            }
            acc
        } else {
            let e = (num_traits::pow(BigUint::from(p), d) - BigUint::one()) >> 1;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if let Some(gd) = g.degree() {
            if gd > 0 && gd < n {
                let h = f.div_exact(&g);
                equal_degree(&g, d, rng, out);
                equal_degree(&h, d, rng, out);
                return;
            }
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities.
///
/// Squarefree decomposition, then distinct-degree, then seeded equal-degree
/// splitting. Output is sorted by `(degree, coefficients)`, so it does not
/// depend on the seed.
pub fn factor_mod_p(f: &FpPoly, seed: u64) -> Result<Vec<(FpPoly, usize)>, ExactError> {
    let p = f.modulus();
    if !is_prime(p) {
        return Err(ExactError::CompositeModulus(p));
    }
    if f.is_zero() {
        return Err(ExactError::BadModulus {
            p,
            reason: "zero polynomial",
        });
    }
    let mut rng = Lcg::new(seed);
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(&f.monic()) {
        for (d, part) in distinct_degree(&sqf) {
            let mut pieces = Vec::new();
            equal_degree(&part, d, &mut rng, &mut pieces);
            out.extend(pieces.into_iter().map(|g| (g, mult)));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(p: u64, factors: &[(FpPoly, usize)]) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (g, m) in factors {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn t2_plus_1() {
        let f5 = factor_mod_p(&FpPoly::from_i64s(5, &[1, 0, 1]), 0).unwrap();
        assert_eq!(
            f5,
            vec![
                (FpPoly::from_i64s(5, &[2, 1]), 1),
                (FpPoly::from_i64s(5, &[3, 1]), 1)
            ]
        );
        let f3 = factor_mod_p(&FpPoly::from_i64s(3, &[1, 0, 1]), 0).unwrap();
        assert_eq!(f3, vec![(FpPoly::from_i64s(3, &[1, 0, 1]), 1)]);
    }

    #[test]
    fn composite_modulus_rejected() {
        let f = FpPoly::from_i64s(9, &[1, 0, 1]);
        assert_eq!(factor_mod_p(&f, 0), Err(ExactError::CompositeModulus(9)));
    }

    #[test]
    fn a5_sextic_mod_7_is_two_cubics() {
        let f = FpPoly::from_i64s(7, &[3, -14, 15, 7, -10, 0, 1]);
        let fac = factor_mod_p(&f, 1).unwrap();
        let degs: Vec<usize> = fac.iter().map(|(g, _)| g.degree().unwrap()).collect();
        assert_eq!(degs, vec![3, 3]);
        assert_eq!(product(7, &fac), f.monic());
    }

    #[test]
    fn a5_sextic_at_ramified_primes() {
        let f19 = FpPoly::from_i64s(19, &[3, -14, 15, 7, -10, 0, 1]);
        let fac = factor_mod_p(&f19, 0).unwrap();
        let shape: Vec<(usize, usize)> = fac.iter().map(|(g, m)| (g.degree().unwrap(), *m)).collect();
        assert_eq!(shape, vec![(1, 2), (1, 2), (2, 1)]);

        let f293 = FpPoly::from_i64s(293, &[3, -14, 15, 7, -10, 0, 1]);
        let fac = factor_mod_p(&f293, 0).unwrap();
        let mut shape: Vec<(usize, usize)> = fac.iter().map(|(g, m)| (g.degree().unwrap(), *m)).collect();
        shape.sort();
        assert_eq!(shape, vec![(1, 1), (1, 1), (1, 2), (1, 2)]);
        assert_eq!(product(293, &fac), f293);
    }

    #[test]
    fn inseparable_input_characteristic_two_and_three() {
        // (t^2 + t + 1)^2 (t + 1)^3 over F_2 and t^3 - t - 1 cubed over F_3
        let g = FpPoly::from_i64s(2, &[1, 1, 1]);
        let h = FpPoly::from_i64s(2, &[1, 1]);
        let f = g.mul(&g).mul(&h).mul(&h).mul(&h);
        let fac = factor_mod_p(&f, 3).unwrap();
        assert_eq!(fac, vec![(h.clone(), 3), (g.clone(), 2)]);

        let c = FpPoly::from_i64s(3, &[-1, -1, 0, 1]);
        let f = c.mul(&c).mul(&c);
        assert_eq!(factor_mod_p(&f, 0).unwrap(), vec![(c, 3)]);
    }

    #[test]
    fn rabin_test() {
        assert!(FpPoly::from_i64s(3, &[1, 0, 1]).is_irreducible());
        assert!(!FpPoly::from_i64s(5, &[1, 0, 1]).is_irreducible());
        assert!(FpPoly::from_i64s(2, &[1, 1, 0, 0, 1]).is_irreducible());
        // (t^2+t+1)^2 = t^4+t^2+1 over F_2
        assert!(!FpPoly::from_i64s(2, &[1, 0, 1, 0, 1]).is_irreducible());
    }

    #[test]
    fn seed_does_not_change_output() {
        let f = FpPoly::from_i64s(101, &[3, -14, 15, 7, -10, 0, 1]);
        let a = factor_mod_p(&f, 0).unwrap();
        for seed in 1..10 {
            assert_eq!(factor_mod_p(&f, seed).unwrap(), a);
        }
    }
}

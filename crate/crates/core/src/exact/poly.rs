use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rat;

/// Dense univariate polynomial over ℚ in the variable `t`.
///
/// `coeffs[i]` is the coefficient of `t^i`. The vector never ends in a zero,
/// so the zero polynomial is the empty vector and has no degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    /// The generator `t`.
    pub fn t() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rat, degree: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Integer coefficients, ascending degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Poly::new(coeffs.iter().cloned().map(Rat::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Divide by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => Poly::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                Poly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the value at `x`: -1, 0 or 1.
    pub fn sign_at(&self, x: &Rat) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let inv_lc = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = &rem[k + dd] * &inv_lc;
            if q.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * d;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// `self(inner)`, exactly.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `self(inner) mod modulus`, reducing after every Horner step.
    pub fn compose_mod(&self, inner: &Poly, modulus: &Poly) -> Poly {
        let inner = inner.rem(modulus);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = (&(&acc * &inner) + &Poly::constant(c.clone())).rem(modulus);
        }
        acc
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Primitive integer polynomial `P` and rational content `c` with
    /// `self = c * P`, where `P` has positive leading coefficient.
    pub fn primitive_part(&self) -> (Rat, Vec<BigInt>) {
        if self.is_zero() {
            return (Rat::zero(), Vec::new());
        }
        let den = self.denominator_lcm();
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(Signed::is_negative) {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rat::new(g, den), prim)
    }

    /// Integer coefficients, or `None` when some coefficient is fractional.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Cauchy bound: every complex root has absolute value below it.
    pub fn cauchy_bound(&self) -> Rat {
        let lc = self.leading().abs();
        let n = self.coeffs.len();
        let max = self.coeffs[..n.saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rat::zero(), |a, b| if b > a { b } else { a });
        max + Rat::one()
    }
}

/// Monic greatest common divisor over ℚ; `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.monic();
    let mut y = b.monic();
    while !y.is_zero() {
        let r = x.rem(&y).monic();
        x = y;
        y = r;
    }
    x
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    /// Renders in the same syntax [`super::parse_poly`] accepts for integer
    /// coefficients, e.g. `t^3 - 3*t - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({}/{})", mag.numer(), mag.denom())?;
                }
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

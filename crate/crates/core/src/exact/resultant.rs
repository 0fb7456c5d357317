use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ExactError, Poly, Rat};

type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn deg(p: &IntPoly) -> usize {
    p.len() - 1
}

fn content(p: &IntPoly) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

// lc(b)^(deg a - deg b + 1) * a mod b, over ℤ.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut r = a.clone();
    let db = deg(b);
    let lb = b[db].clone();
    let mut steps = deg(a) + 1 - db;
    while r.len() > db && !r.is_empty() {
        let dr = deg(&r);
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bj;
        }
        trim(&mut r);
        steps -= 1;
    }
    let scale = num_traits::pow(lb, steps);
    for c in r.iter_mut() {
        *c *= &scale;
    }
    r
}

// Subresultant PRS resultant of two nonzero primitive integer polynomials.
fn int_resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut sign = BigInt::one();
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            sign = -sign;
        }
    }
    if deg(&b) == 0 {
        return sign * num_traits::pow(b[0].clone(), deg(&a));
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = deg(&a) - deg(&b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            sign = -sign;
        }
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            return BigInt::zero();
        }
        let divisor = &g * num_traits::pow(h.clone(), delta);
        a = b;
        b = r.into_iter().map(|c| c / &divisor).collect();
        g = a[deg(&a)].clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
        };
        if deg(&b) == 0 {
            let da = deg(&a);
            let num = num_traits::pow(b[0].clone(), da);
            let res = if da == 0 {
                num
            } else {
                num / num_traits::pow(h, da - 1)
            };
            return sign * res;
        }
    }
}

/// Resultant of two polynomials over ℚ.
///
/// Both inputs are split into rational content times a primitive integer
/// polynomial; the integer part goes through a fraction-free subresultant
/// remainder sequence. Zero if either input is zero.
pub fn resultant(a: &Poly, b: &Poly) -> Rat {
    if a.is_zero() || b.is_zero() {
        return Rat::zero();
    }
    let (ca, pa) = a.primitive_part();
    let (cb, pb) = b.primitive_part();
    let da = pa.len() - 1;
    let db = pb.len() - 1;
    debug_assert!(content(&pa).is_one() && content(&pb).is_one());
    let scale = num_traits::pow(ca, db) * num_traits::pow(cb, da);
    scale * Rat::from_integer(int_resultant(&pa, &pb))
}

/// Discriminant `(-1)^(n(n-1)/2) res(f, f') / lc(f)`.
pub fn discriminant(f: &Poly) -> Result<Rat, ExactError> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(ExactError::ConstantPolynomial),
    };
    if n == 1 {
        return Ok(Rat::one());
    }
    let res = resultant(f, &f.derivative()) / f.leading();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -res } else { res })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Sylvester matrix determinant by exact Gaussian elimination. Shares no
    // code with the remainder-sequence route.
    fn sylvester_resultant(a: &Poly, b: &Poly) -> Rat {
        let m = a.degree().unwrap();
        let n = b.degree().unwrap();
        let size = m + n;
        if size == 0 {
            return Rat::one();
        }
        let mut mat = vec![vec![Rat::zero(); size]; size];
        for row in 0..n {
            for i in 0..=m {
                mat[row][row + i] = a.coeff(m - i);
            }
        }
        for row in 0..m {
            for j in 0..=n {
                mat[n + row][row + j] = b.coeff(n - j);
            }
        }
        let mut det = Rat::one();
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
                return Rat::zero();
            };
            if piv != col {
                mat.swap(piv, col);
                det = -det;
            }
            let p = mat[col][col].clone();
            det *= &p;
            for r in col + 1..size {
                let factor = &mat[r][col] / &p;
                if factor.is_zero() {
                    continue;
                }
                let (upper, lower) = mat.split_at_mut(r);
                for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= &factor * y;
                }
            }
        }
        det
    }

    fn ri(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn quadratic_discriminants() {
        assert_eq!(discriminant(&Poly::from_ints(&[1, 0, 1])).unwrap(), ri(-4));
        assert_eq!(discriminant(&Poly::from_ints(&[-1, -1, 1])).unwrap(), ri(5));
        assert_eq!(
            discriminant(&Poly::from_ints(&[7])),
            Err(ExactError::ConstantPolynomial)
        );
    }

    #[test]
    fn a5_sextic_discriminant_matches_sylvester() {
        let f = Poly::from_ints(&[3, -14, 15, 7, -10, 0, 1]);
        let d = discriminant(&f).unwrap();
        let oracle = -sylvester_resultant(&f, &f.derivative());
        assert_eq!(d, oracle);
        assert_eq!(d, ri(30_991_489));
        assert_eq!(d, ri(19 * 19 * 293 * 293));
    }

    #[test]
    fn corpus_discriminants_match_sylvester() {
        let polys = [
            Poly::from_ints(&[-1, -3, 0, 1]),
            Poly::from_ints(&[-2, 0, 0, 1]),
            Poly::from_ints(&[5, 0, -5, 0, 1]),
            Poly::from_ints(&[-2, 0, 0, 0, 1]),
            Poly::from_ints(&[1, 3, -3, -4, 1, 1]),
        ];
        for f in polys {
            let n = f.degree().unwrap();
            let sign = if (n * (n - 1) / 2) % 2 == 1 { -ri(1) } else { ri(1) };
            let oracle = sign * sylvester_resultant(&f, &f.derivative()) / f.leading();
            assert_eq!(discriminant(&f).unwrap(), oracle, "{f}");
        }
    }

    #[test]
    fn resultant_with_rational_coefficients() {
        let a = Poly::new(vec![Rat::new(1.into(), 2.into()), ri(0), Rat::new(3.into(), 5.into())]);
        let b = Poly::new(vec![ri(-7), Rat::new(2.into(), 3.into()), ri(0), ri(4)]);
        assert_eq!(resultant(&a, &b), sylvester_resultant(&a, &b));
        // (-1)^(2*3) = 1
        assert_eq!(resultant(&b, &a), resultant(&a, &b));
    }

    #[test]
    fn common_root_gives_zero() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[-1, 1, 0, 5]);
        let b = &b * &Poly::from_ints(&[1, 1]);
        assert!(resultant(&a, &b).is_zero());
    }
}

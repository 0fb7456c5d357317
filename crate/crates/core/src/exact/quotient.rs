use super::fp::{invmod, reduce_int};
use super::{ExactError, FpPoly, Poly};

/// Element of `F_p[t]/(h)`, stored as its reduced representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpQuotientElem {
    modulus: FpPoly,
    rep: FpPoly,
}

impl FpQuotientElem {
    pub fn new(modulus: FpPoly, rep: &FpPoly) -> Self {
        assert!(
            modulus.degree().is_some_and(|d| d > 0),
            "quotient by a constant"
        );
        let rep = rep.rem(&modulus);
        FpQuotientElem { modulus, rep }
    }

    /// The class of `t`.
    pub fn generator(modulus: FpPoly) -> Self {
        let t = FpPoly::t(modulus.modulus());
        FpQuotientElem::new(modulus, &t)
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    pub fn rep(&self) -> &FpPoly {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

/// `g(x)` in `F_p[t]/(h)` for a rational polynomial `g`.
pub fn evaluate_in_quotient(g: &Poly, x: &FpQuotientElem) -> Result<FpQuotientElem, ExactError> {
    let h = &x.modulus;
    let p = h.modulus();
    let mut acc = FpPoly::zero(p);
    for c in g.coeffs().iter().rev() {
        let den = reduce_int(c.denom(), p);
        if den == 0 {
            return Err(ExactError::DenominatorDivisible(p));
        }
        let num = reduce_int(c.numer(), p);
        let c = ((num as u128 * invmod(den, p) as u128) % p as u128) as u64;
        acc = acc.mul_mod(&x.rep, h).add(&FpPoly::constant(p, c));
    }
    Ok(FpQuotientElem {
        modulus: h.clone(),
        rep: acc.rem(h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;

    #[test]
    fn identity_and_constants() {
        let h = FpPoly::from_i64s(3, &[1, 0, 1]);
        let x = FpQuotientElem::generator(h.clone());
        assert_eq!(evaluate_in_quotient(&Poly::t(), &x).unwrap(), x);
        let c = Poly::constant(Rat::from_integer(7.into()));
        assert_eq!(
            evaluate_in_quotient(&c, &x).unwrap().rep(),
            &FpPoly::constant(3, 1)
        );
    }

    #[test]
    fn t_squared_mod_t2_plus_1() {
        let h = FpPoly::from_i64s(3, &[1, 0, 1]);
        let x = FpQuotientElem::generator(h);
        let y = evaluate_in_quotient(&Poly::from_ints(&[0, 0, 1]), &x).unwrap();
        assert_eq!(y.rep(), &FpPoly::constant(3, 2));
    }

    #[test]
    fn denominators() {
        let h = FpPoly::from_i64s(5, &[1, 1]);
        let x = FpQuotientElem::generator(h);
        let half = Poly::new(vec![Rat::new(1.into(), 2.into())]);
        assert_eq!(evaluate_in_quotient(&half, &x).unwrap().rep(), &FpPoly::constant(5, 3));
        let fifth = Poly::new(vec![Rat::new(1.into(), 5.into())]);
        assert_eq!(
            evaluate_in_quotient(&fifth, &x),
            Err(ExactError::DenominatorDivisible(5))
        );
    }
}

use num_traits::{Signed, Zero};

use super::{poly_gcd, ExactError, Poly, Rat};

/// Signed remainder sequence `f, f', -rem(f, f'), ...`.
pub fn sturm_sequence(f: &Poly) -> Vec<Poly> {
    let mut seq = vec![f.clone()];
    if f.is_zero() {
        return seq;
    }
    let mut prev = f.clone();
    let mut cur = f.derivative();
    while !cur.is_zero() {
        let next = -&prev.rem(&cur);
        seq.push(cur.clone());
        prev = cur;
        cur = next;
    }
    seq
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_of(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn variations_at(seq: &[Poly], x: &Rat) -> usize {
    variations(seq.iter().map(|p| p.sign_at(x)))
}

fn variations_at_infinity(seq: &[Poly], positive: bool) -> usize {
    variations(seq.iter().map(|p| {
        let s = sign_of(&p.leading());
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots of a squarefree polynomial.
pub fn sturm_real_root_count(f: &Poly) -> Result<usize, ExactError> {
    if f.is_constant() {
        return Ok(0);
    }
    if !poly_gcd(f, &f.derivative()).is_constant() {
        return Err(ExactError::NotSquarefree);
    }
    let seq = sturm_sequence(f);
    Ok(variations_at_infinity(&seq, false) - variations_at_infinity(&seq, true))
}

/// A real root pinned down by a rational interval.
///
/// Either `lo == hi` and the root is exactly that rational, or `lo < hi`,
/// the polynomial is nonzero at both ends with opposite signs, and the root is
/// the only one in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealRoot {
    pub lo: Rat,
    pub hi: Rat,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Halve the interval, keeping the half with the sign change.
    pub fn bisect(&mut self, f: &Poly) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rat::from_integer(2.into());
        let sm = f.sign_at(&mid);
        if sm == 0 {
            self.lo = mid.clone();
            self.hi = mid;
        } else if sm == f.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Whether `[a, b]` meets this root's isolating set: the point for an
    /// exact root, the open interval otherwise.
    pub fn meets(&self, a: &Rat, b: &Rat) -> bool {
        if self.is_exact() {
            a <= &self.lo && &self.lo <= b
        } else {
            a < &self.hi && b > &self.lo
        }
    }

    /// Rough floating-point position, for display only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / Rat::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// Sturm sequence of a squarefree polynomial together with its isolated
/// real roots in increasing order.
#[derive(Debug, Clone)]
pub struct RootIsolation {
    pub poly: Poly,
    pub sequence: Vec<Poly>,
    pub roots: Vec<RealRoot>,
}

impl RootIsolation {
    pub fn new(f: &Poly) -> Result<Self, ExactError> {
        if f.is_constant() {
            return Err(ExactError::ConstantPolynomial);
        }
        if !poly_gcd(f, &f.derivative()).is_constant() {
            return Err(ExactError::NotSquarefree);
        }
        let sequence = sturm_sequence(f);
        let bound = f.cauchy_bound();
        let mut roots = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        // Intervals are half-open (lo, hi]; explored right-to-left, so roots
        // come out in decreasing order.
        while let Some((lo, hi)) = stack.pop() {
            let count = variations_at(&sequence, &lo) - variations_at(&sequence, &hi);
            match count {
                0 => {}
                1 => roots.push(Self::tighten(f, &sequence, lo, hi)),
                _ => {
                    let mid = (&lo + &hi) / Rat::from_integer(2.into());
                    stack.push((lo, mid.clone()));
                    stack.push((mid, hi));
                }
            }
        }
        roots.sort_by(|a, b| a.lo.cmp(&b.lo));
        Ok(RootIsolation {
            poly: f.clone(),
            sequence,
            roots,
        })
    }

    // (lo, hi] holds exactly one root; shrink until both ends are nonzero.
    fn tighten(f: &Poly, seq: &[Poly], mut lo: Rat, mut hi: Rat) -> RealRoot {
        loop {
            if f.sign_at(&hi) == 0 {
                return RealRoot { lo: hi.clone(), hi };
            }
            if f.sign_at(&lo) != 0 {
                return RealRoot { lo, hi };
            }
            let mid = (&lo + &hi) / Rat::from_integer(2.into());
            if variations_at(seq, &lo) - variations_at(seq, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.roots.len()
    }

    /// Number of roots in `(a, b]`.
    pub fn count_in(&self, a: &Rat, b: &Rat) -> usize {
        variations_at(&self.sequence, a) - variations_at(&self.sequence, b)
    }
}

/// Interval enclosure of `p` over `[lo, hi]` by interval Horner evaluation.
pub fn eval_interval(p: &Poly, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut acc_lo = Rat::zero();
    let mut acc_hi = Rat::zero();
    for c in p.coeffs().iter().rev() {
        let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mut min = products[0].clone();
        let mut max = products[0].clone();
        for x in &products[1..] {
            if x < &min {
                min = x.clone();
            }
            if x > &max {
                max = x.clone();
            }
        }
        acc_lo = min + c;
        acc_hi = max + c;
    }
    (acc_lo, acc_hi)
}

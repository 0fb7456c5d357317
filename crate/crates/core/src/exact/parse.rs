use num_bigint::BigInt;

use super::{ExactError, Poly, Rat};

/// Parse an integer-coefficient polynomial such as
/// `t^6-10*t^4+7*t^3+15*t^2-14*t+3`.
///
/// Grammar: sums and differences of products of powers of atoms, where an
/// atom is a nonnegative integer, the variable (`t` or `x`), or a
/// parenthesised expression. `10t^4` is read as `10*t^4`.
pub fn parse_poly(src: &str) -> Result<Poly, ExactError> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExactError {
        ExactError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ExactError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ExactError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b't' | b'x' | b'(') => acc = &acc * &self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ExactError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: usize = e
                .try_into()
                .ok()
                .filter(|&e: &usize| e <= 1024)
                .ok_or_else(|| self.error("exponent too large"))?;
            let mut out = Poly::one();
            for _ in 0..e {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ExactError> {
        match self.peek() {
            Some(b't' | b'x') => {
                self.pos += 1;
                Ok(Poly::t())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Poly::constant(Rat::from_integer(n)))
            }
            Some(_) => Err(self.error("expected a number, 't' or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExactError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a5_sextic() {
        let p = parse_poly("t^6-10*t^4+7*t^3+15*t^2-14*t+3").unwrap();
        assert_eq!(p, Poly::from_ints(&[3, -14, 15, 7, -10, 0, 1]));
    }

    #[test]
    fn variants() {
        assert_eq!(parse_poly("t^2+1").unwrap(), Poly::from_ints(&[1, 0, 1]));
        assert_eq!(parse_poly(" - x + 2x^2 ").unwrap(), Poly::from_ints(&[0, -1, 2]));
        assert_eq!(parse_poly("(t-1)*(t+1)").unwrap(), Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(parse_poly("3(t+1)^2").unwrap(), Poly::from_ints(&[3, 6, 3]));
    }

    #[test]
    fn display_round_trips() {
        let p = Poly::from_ints(&[1, 3, -3, -4, 1, 1]);
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors_carry_position() {
        match parse_poly("t^2 + y") {
            Err(ExactError::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly("t^").is_err());
        assert!(parse_poly("(t+1").is_err());
        assert!(parse_poly("t 1").is_err());
    }
}

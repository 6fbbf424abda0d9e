//! Textual abstract values: `bot`, `top`, `[lo,hi]` (bounds may be `-inf` or
//! `+inf`), sign sets such as `{0,+}`, and pairs `(a, b)`.

use thiserror::Error;

use super::{AbsValue, Bound, Interval, NumAbs, SignSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid abstract value at offset {offset}: {message}")]
pub struct AbsParseError {
    pub offset: usize,
    pub message: String,
}

pub fn parse_abs_value<I: Scalar>(text: &str) -> Result<AbsValue<I>, AbsParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let v = p.value()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> AbsParseError {
        AbsParseError { offset: self.pos, message: message.into() }
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

    fn expect(&mut self, c: u8) -> Result<(), AbsParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn value<I: Scalar>(&mut self) -> Result<AbsValue<I>, AbsParseError> {
        match self.peek() {
            Some(b'b') if self.keyword("bot") => Ok(AbsValue::Bot),
            Some(b't') if self.keyword("top") => Ok(AbsValue::Top),
            Some(b'[') => {
                self.pos += 1;
                let lo = self.bound()?;
                self.expect(b',')?;
                let hi = self.bound()?;
                self.expect(b']')?;
                Interval::new(lo, hi)
                    .map(|i| AbsValue::Num(NumAbs::Interval(i)))
                    .ok_or_else(|| self.error("empty interval"))
            }
            Some(b'{') => {
                self.pos += 1;
                let mut bits = 0u8;
                if self.peek() != Some(b'}') {
                    loop {
                        bits |= match self.peek() {
                            Some(b'-') => SignSet::NEG.bits(),
                            Some(b'0') => SignSet::ZERO.bits(),
                            Some(b'+') => SignSet::POS.bits(),
                            _ => return Err(self.error("expected one of `-`, `0`, `+`")),
                        };
                        self.pos += 1;
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(b'}')?;
                SignSet::from_bits(bits)
                    .map(AbsValue::sign)
                    .ok_or_else(|| self.error("empty sign set (write `bot`)"))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.value()?;
                self.expect(b',')?;
                let b = self.value()?;
                self.expect(b')')?;
                Ok(AbsValue::pair(a, b))
            }
            _ => Err(self.error("expected an abstract value")),
        }
    }

    fn bound<I: Scalar>(&mut self) -> Result<Bound<I>, AbsParseError> {
        if self.keyword("-inf") {
            return Ok(Bound::NegInf);
        }
        if self.keyword("+inf") || self.keyword("inf") {
            return Ok(Bound::PosInf);
        }
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let text = text.strip_prefix('+').unwrap_or(text);
        text.parse::<I>()
            .map(Bound::Fin)
            .map_err(|_| AbsParseError { offset: start, message: "expected an integer bound".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn parse(s: &str) -> AbsValue<BigInt> {
        parse_abs_value(s).unwrap()
    }

    #[test]
    fn parses_every_form() {
        assert_eq!(parse("bot"), AbsValue::Bot);
        assert_eq!(parse(" top "), AbsValue::Top);
        assert_eq!(parse("[0,10]"), AbsValue::interval(0.into(), 10.into()));
        assert_eq!(parse("{0,+}"), AbsValue::sign(SignSet::ZERO.union(SignSet::POS)));
        assert_eq!(parse("[-inf, +inf]").to_string(), "[-inf,+inf]");
        assert_eq!(parse("(([0,0], [42,42]), [0,10])").to_string(), "(([0,0], [42,42]), [0,10])");
    }

    #[test]
    fn display_round_trips() {
        for s in ["bot", "top", "[-3,-1]", "[-inf,5]", "{-}", "{-,0,+}", "({0}, [1,+inf])"] {
            assert_eq!(parse(s).to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "[1,0]", "{}", "[1,2", "(top)", "{x}", "top top", "[+inf,3]"] {
            assert!(parse_abs_value::<BigInt>(s).is_err(), "{s}");
        }
    }

    #[test]
    fn fixed_width_extremes_normalize() {
        let v: AbsValue<i8> = parse_abs_value("[-inf,+inf]").unwrap();
        assert_eq!(v.to_string(), "[-128,127]");
    }
}

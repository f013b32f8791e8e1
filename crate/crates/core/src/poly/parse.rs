use super::RatPoly;
use crate::error::{Error, Result};
use crate::exact::{format_rat, parse_rat, BigRat};
use num_traits::{One, Zero};

/// Little-endian coefficient list such as `"1,0,1"` (for `x^2 + 1`).
pub fn parse_poly_list(s: &str) -> Result<RatPoly> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    let coeffs = s
        .split(',')
        .map(|c| parse_rat(c.trim()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly::new(coeffs))
}

pub fn format_poly_list(f: &RatPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.coeffs().iter().map(format_rat).collect::<Vec<_>>().join(",")
}

/// Human syntax: `x^2+1`, `-3/2*x^3 + x - 7`, `2x^4`.
pub fn parse_poly_human(s: &str) -> Result<RatPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut coeffs: Vec<BigRat> = Vec::new();
    for term in terms {
        let (c, e) = parse_term(&term)?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, BigRat::zero());
        }
        coeffs[e] += c;
    }
    Ok(RatPoly::new(coeffs))
}

fn parse_term(term: &str) -> Result<(BigRat, usize)> {
    let bad = || Error::Parse(format!("bad term {term:?}"));
    let (neg, body) = match term.as_bytes().first() {
        Some(b'-') => (true, &term[1..]),
        Some(b'+') => (false, &term[1..]),
        _ => (false, term),
    };
    let (coef, e) = match body.find('x') {
        None => (parse_rat(body).map_err(|_| bad())?, 0),
        Some(pos) => {
            let cpart = body[..pos].trim_end_matches('*');
            let c = if cpart.is_empty() {
                BigRat::one()
            } else {
                parse_rat(cpart).map_err(|_| bad())?
            };
            let rest = &body[pos + 1..];
            let e = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(bad)?
            };
            (c, e)
        }
    };
    Ok((if neg { -coef } else { coef }, e))
}

/// Accepts either syntax; anything mentioning `x` is read as human syntax.
pub fn parse_poly(s: &str) -> Result<RatPoly> {
    if s.contains('x') {
        parse_poly_human(s)
    } else {
        parse_poly_list(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_syntaxes() {
        let f = RatPoly::from_ints(&[1, 0, 1]);
        assert_eq!(parse_poly("1,0,1").unwrap(), f);
        assert_eq!(parse_poly("x^2+1").unwrap(), f);
        assert_eq!(parse_poly("x^2 + 1").unwrap(), f);
        assert_eq!(parse_poly("-2 + x^2").unwrap(), RatPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(
            parse_poly("1/2*x^3 - x").unwrap(),
            RatPoly::new(vec![BigRat::zero(), -BigRat::one(), BigRat::zero(), BigRat::new(1.into(), 2.into())])
        );
        assert_eq!(parse_poly("2x").unwrap(), RatPoly::from_ints(&[0, 2]));
        assert_eq!(format_poly_list(&f), "1,0,1");
        assert!(parse_poly("1,,2").is_err());
        assert!(parse_poly("x^").is_err());
    }
}

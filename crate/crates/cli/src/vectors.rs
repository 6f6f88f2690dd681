use tilestat::numeric::{GoldenValue, Rational, PHI_F64};
use tilestat::Point;

use crate::Usage;

/// Tokens this close to φ are read as φ under `--golden`.
const GOLDEN_SNAP: f64 = 1e-5;

fn coordinate(tok: &str, golden: bool) -> Result<GoldenValue, Usage> {
    let tok = tok.trim();
    if tok.eq_ignore_ascii_case("phi") {
        return Ok(GoldenValue::phi());
    }
    let r: Rational = tok
        .parse()
        .map_err(|_| Usage(format!("cannot read coordinate {tok:?}")))?;
    if golden && (r.to_f64() - PHI_F64).abs() < GOLDEN_SNAP {
        return Ok(GoldenValue::phi());
    }
    Ok(GoldenValue::from_rational(r))
}

/// Parses `x,y`.
pub fn parse_vector(s: &str, golden: bool) -> Result<Point, Usage> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Usage(format!("expected a vector x,y, got {s:?}")));
    }
    Ok(Point::new(coordinate(parts[0], golden)?, coordinate(parts[1], golden)?))
}

/// Parses `a,b` as two floats; `pi` and `pi/2` are accepted.
pub fn parse_range(s: &str) -> Result<(f64, f64), Usage> {
    let num = |t: &str| match t.trim() {
        "pi" => Ok(std::f64::consts::PI),
        "pi/2" => Ok(std::f64::consts::FRAC_PI_2),
        t => t
            .parse::<f64>()
            .map_err(|_| Usage(format!("cannot read range bound {t:?}"))),
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => Err(Usage(format!("expected a range a,b, got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        let p = parse_vector("1,1.618034", false).unwrap();
        assert_eq!(p.y, GoldenValue::from_rational(Rational::new(809017, 500000)));
        let p = parse_vector("1,1.618034", true).unwrap();
        assert_eq!(p.y, GoldenValue::phi());
        let p = parse_vector("phi, 1/2", false).unwrap();
        assert_eq!(p.x, GoldenValue::phi());
        assert!(parse_vector("1", false).is_err());
        assert!(parse_vector("1,x", false).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0,pi/2").unwrap(), (0.0, std::f64::consts::FRAC_PI_2));
        assert!(parse_range("0").is_err());
    }
}

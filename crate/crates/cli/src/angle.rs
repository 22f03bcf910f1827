use std::f64::consts::PI;

/// Parses an angle in radians: a decimal number, or a rational multiple of pi
/// such as `pi/8`, `3pi/8`, `-3*pi/16`, `pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
        return Err(format!("angle {s:?} is not finite"));
    }
    let bad = || format!("cannot parse angle {s:?}; use radians or a form like 3pi/8");
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let pos = body.find("pi").ok_or_else(bad)?;
    let numer = body[..pos].trim_end_matches('*').trim();
    let numer: f64 = if numer.is_empty() { 1.0 } else { numer.parse::<u64>().map_err(|_| bad())? as f64 };
    let rest = body[pos + 2..].trim();
    let denom: f64 = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?.trim().parse::<u64>().map_err(|_| bad())?;
        if d == 0 {
            return Err(format!("angle {s:?} divides by zero"));
        }
        d as f64
    };
    Ok(sign * numer * PI / denom)
}

/// Comma-separated list of angles.
pub fn parse_angle_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_angle).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("3*pi/16").unwrap(), 3.0 * PI / 16.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("0.3").unwrap(), 0.3);
        assert_eq!(parse_angle_list("pi/8,0.4").unwrap(), vec![PI / 8.0, 0.4]);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "pi/", "pi/0", "x", "2.5pi/8", "pi*8", "inf", "NaN"] {
            assert!(parse_angle(s).is_err(), "{s}");
        }
    }
}

use std::f64::consts::PI;

/// An angle as typed on the command line together with its value in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleArg {
    pub text: String,
    pub radians: f64,
}

fn coefficient(s: &str) -> Result<f64, String> {
    let s = s.trim_end_matches('*');
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| format!("bad coefficient '{s}'")),
    }
}

/// Accepts decimal radians or `a*pi/b` forms such as `pi/4`, `-3pi/4`, `2*pi`.
pub fn parse_angle(raw: &str) -> Result<AngleArg, String> {
    let text: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = text.to_ascii_lowercase();
    let radians = match lower.find("pi") {
        None => lower
            .parse::<f64>()
            .map_err(|_| format!("cannot read '{raw}' as an angle"))?,
        Some(at) => {
            let num = coefficient(&lower[..at])?;
            let rest = &lower[at + 2..];
            let den = match rest.strip_prefix('/') {
                None if rest.is_empty() => 1.0,
                None => return Err(format!("unexpected '{rest}' in '{raw}'")),
                Some(d) => d
                    .parse::<f64>()
                    .map_err(|_| format!("bad denominator '{d}'"))?,
            };
            if den == 0.0 {
                return Err("zero denominator".into());
            }
            num * PI / den
        }
    };
    if !radians.is_finite() {
        return Err(format!("angle '{raw}' is not finite"));
    }
    Ok(AngleArg { text, radians })
}

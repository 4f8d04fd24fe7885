//! Parenthetical uncertainty notation, e.g. `4.315(3)` = 4.315 ± 0.003.
//!
//! The bracketed digits apply to the last quoted digits of the value. A
//! leading `~` marks an approximate (effective) quantity.

use serde::{Deserialize, Serialize};

/// A measured quantity with an optional one-standard-deviation uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: Option<f64>,
}

impl Measured {
    pub const fn exact(value: f64) -> Self {
        Measured { value, sigma: None }
    }

    pub const fn new(value: f64, sigma: f64) -> Self {
        Measured {
            value,
            sigma: Some(sigma),
        }
    }

    pub fn sigma_or_zero(&self) -> f64 {
        self.sigma.unwrap_or(0.0)
    }

    /// Relative uncertainty `sigma / |value|`, zero when either is absent or zero.
    pub fn relative_sigma(&self) -> f64 {
        match self.sigma {
            Some(s) if self.value != 0.0 => s / self.value.abs(),
            _ => 0.0,
        }
    }
}

/// A parsed cell: the quantity plus whether it carried the `~` marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Notated {
    pub measured: Measured,
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed measured value {text:?}: {reason}")]
pub struct NotationError {
    pub text: String,
    pub reason: &'static str,
}

fn normalize_sign(s: &str) -> String {
    s.replace('\u{2212}', "-")
}

/// Parses `[~][+|-]digits[.digits][(digits)][e[+|-]digits]`.
pub fn parse(text: &str) -> Result<Notated, NotationError> {
    let err = |reason| NotationError {
        text: text.to_string(),
        reason,
    };
    let mut s = normalize_sign(text.trim());
    let approximate = s.starts_with('~');
    if approximate {
        s = s[1..].trim_start().to_string();
    }
    if s.is_empty() {
        return Err(err("empty"));
    }

    let (mantissa_part, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i32 = s[i + 1..].parse().map_err(|_| err("bad exponent"))?;
            (s[..i].to_string(), exp)
        }
        None => (s.clone(), 0),
    };

    let (mantissa, unc_digits) = match mantissa_part.find('(') {
        Some(open) => {
            let close = mantissa_part
                .find(')')
                .ok_or_else(|| err("unclosed parenthesis"))?;
            if close != mantissa_part.len() - 1 || close <= open + 1 {
                return Err(err("uncertainty must be trailing digits in parentheses"));
            }
            let digits = &mantissa_part[open + 1..close];
            if !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("uncertainty must be digits"));
            }
            (mantissa_part[..open].to_string(), Some(digits.to_string()))
        }
        None => (mantissa_part, None),
    };

    let unsigned = mantissa.strip_prefix(['+', '-']).unwrap_or(&mantissa);
    let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err("value must be a decimal number"));
    }

    let value: f64 = format!("{mantissa}e{exponent}")
        .parse()
        .map_err(|_| err("value must be a decimal number"))?;
    // Uncertainty digits scale with the last quoted decimal place.
    let sigma = unc_digits
        .map(|d| {
            let places = frac_part.len() as i32 - exponent;
            format!("{d}e{}", -places)
                .parse::<f64>()
                .map_err(|_| err("bad uncertainty"))
        })
        .transpose()?;

    Ok(Notated {
        measured: Measured { value, sigma },
        approximate,
    })
}

/// Splits the shortest round-trip decimal rendering of a non-negative finite
/// float into integer digits and the count of decimal places.
fn decimal_digits(x: f64) -> (String, usize) {
    let s = format!("{x}");
    match s.split_once('.') {
        Some((i, f)) => (format!("{i}{f}"), f.len()),
        None => (s, 0),
    }
}

/// Renders a quantity in parenthetical notation such that [`parse`] recovers
/// the identical floats.
pub fn format(m: &Measured, approximate: bool) -> String {
    let prefix = if approximate { "~" } else { "" };
    let Some(sigma) = m.sigma else {
        return format!("{prefix}{}", m.value);
    };
    let (_, value_places) = decimal_digits(m.value.abs());
    let (sigma_digits, sigma_places) = decimal_digits(sigma);
    let places = value_places.max(sigma_places);
    let mut unc = sigma_digits;
    unc.extend(std::iter::repeat_n('0', places - sigma_places));
    let unc = unc.trim_start_matches('0');
    let unc = if unc.is_empty() { "0" } else { unc };
    let sign = if m.value.is_sign_negative() { "-" } else { "" };
    format!("{prefix}{sign}{:.*}({unc})", places, m.value.abs())
}

//! Speed strings with unit tags, resolved to meters per second.
//!
//! Road records mix units freely (posted limits in mph or km/h, surveyed
//! speeds in m/s), so every speed in a manifest carries its unit and is
//! converted exactly once, here.

use crate::scene::{KMH_TO_MPS, MPH_TO_MPS};

#[derive(Clone, Debug, thiserror::Error)]
#[error("bad speed {text:?}: {message}")]
pub struct UnitError {
    pub text: String,
    pub message: String,
}

/// Parses a tagged speed like "25 mph", "40 km/h", or "5 m/s" into meters
/// per second.  The unit is required; a bare number would be ambiguous.
pub fn parse_speed(text: &str) -> Result<f64, UnitError> {
    let err = |message: &str| UnitError {
        text: text.to_string(),
        message: message.to_string(),
    };
    let trimmed = text.trim();
    let split = trimmed
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+'))
        .ok_or_else(|| err("missing unit (use mph, km/h, or m/s)"))?;
    let (number, unit) = trimmed.split_at(split);
    let value: f64 = number
        .parse()
        .map_err(|_| err("unreadable number before the unit"))?;
    let factor = match unit.trim().to_ascii_lowercase().as_str() {
        "mph" => MPH_TO_MPS,
        "km/h" | "kph" | "kmh" => KMH_TO_MPS,
        "m/s" | "mps" => 1.0,
        other => {
            return Err(err(&format!(
                "unknown unit {other:?} (use mph, km/h, or m/s)"
            )))
        }
    };
    if !value.is_finite() || value < 0.0 {
        return Err(err("speed must be finite and nonnegative"));
    }
    Ok(value * factor)
}

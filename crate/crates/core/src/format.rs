//! Text formatting shared by the CSV writers.

/// Scientific notation with 17 significant digits (round-trips an `f64`).
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

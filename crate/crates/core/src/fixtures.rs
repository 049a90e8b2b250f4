//! Bundled reference data.

/// Annual level of Lake Huron, 1875–1972, in feet minus 570, one value per
/// line.
pub const LAKE_HURON_CSV: &str = include_str!("../fixtures/lake_huron.csv");

/// Published AR(3) fit of [`LAKE_HURON_CSV`] by least squares (identical to
/// the covariance-route fit): `(φ₀, φ₁, φ₂, φ₃)`.
pub const LAKE_HURON_AR3_LEAST_SQUARES: [f64; 4] = [1.6460378, 1.0719382, -0.365349, 0.1087551];

/// Published Yule–Walker AR(3) slopes for the same series: `(φ₁, φ₂, φ₃)`.
pub const LAKE_HURON_AR3_YULE_WALKER: [f64; 3] = [1.088704, -0.404544, 0.130754];

pub fn lake_huron() -> Vec<f64> {
    LAKE_HURON_CSV
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse().expect("bundled fixture is numeric"))
        .collect()
}

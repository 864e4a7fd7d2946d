//! Even finite measures on the real line and their Fourier symbols.
//!
//! A [`KernelMeasure`] is a finite sum of Dirac atoms and closed-form
//! continuous densities. Every component is even, so the symbol
//! `mu_hat(xi) = \int e^{-i xi x} dmu(x)` is real and even and can be evaluated
//! exactly. The convolution operator `B u = mu * u` acts on the Fourier side
//! as multiplication by this symbol.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for "total mass equals one" checks.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("atom shift must be finite and >= 0, got {0}")]
    InvalidShift(f64),
    #[error("weight must be finite, got {0}")]
    InvalidWeight(f64),
    #[error("density length parameter must be finite and > 0, got {0}")]
    InvalidLength(f64),
    #[error("symbol is not positive: mu_hat({xi}) = {value}")]
    PositivityViolation { xi: f64, value: f64 },
    #[error("symbol is negative at xi = {xi}: {value}")]
    NegativeSymbol { xi: f64, value: f64 },
    #[error("epsilon must be > 0, got {0}")]
    NonpositiveEpsilon(f64),
    #[error("epsilon must be finite and >= 0, got {0}")]
    NegativeEpsilon(f64),
    #[error("total mass is {0}, expected 1")]
    MassNotOne(f64),
    #[error("sampling window needs xi_max > 0 and at least 2 samples (got xi_max = {xi_max}, n = {n})")]
    InvalidSampling { xi_max: f64, n: usize },
}

/// A point mass. A positive shift `a` stands for the symmetric pair
/// `(w/2) delta_{-a} + (w/2) delta_{a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracAtom {
    pub shift: f64,
    pub weight: f64,
}

impl DiracAtom {
    pub fn new(shift: f64, weight: f64) -> Result<Self, KernelError> {
        let atom = Self { shift, weight };
        atom.validate()?;
        Ok(atom)
    }

    fn validate(&self) -> Result<(), KernelError> {
        if !self.shift.is_finite() || self.shift < 0.0 {
            return Err(KernelError::InvalidShift(self.shift));
        }
        if !self.weight.is_finite() {
            return Err(KernelError::InvalidWeight(self.weight));
        }
        Ok(())
    }

    fn symbol(&self, xi: f64) -> f64 {
        self.weight * (self.shift * xi).cos()
    }
}

/// Shape of a unit-mass even density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    /// `x -> e^{-|x|/l} / (2 l)`; `l = 1` is the classical exponential kernel.
    Exponential { scale: f64 },
    /// `x -> (1/h)(1 - |x|/h)` on `|x| <= h`.
    Triangular { width: f64 },
    /// Centered normal density with standard deviation `sigma`.
    Gaussian { scale: f64 },
}

impl DensityKind {
    pub fn length(&self) -> f64 {
        match *self {
            DensityKind::Exponential { scale } => scale,
            DensityKind::Triangular { width } => width,
            DensityKind::Gaussian { scale } => scale,
        }
    }

    fn with_length(&self, length: f64) -> Self {
        match self {
            DensityKind::Exponential { .. } => DensityKind::Exponential { scale: length },
            DensityKind::Triangular { .. } => DensityKind::Triangular { width: length },
            DensityKind::Gaussian { .. } => DensityKind::Gaussian { scale: length },
        }
    }

    /// Closed-form Fourier transform of the unit-mass density.
    pub fn symbol(&self, xi: f64) -> f64 {
        match *self {
            DensityKind::Exponential { scale } => {
                let z = scale * xi;
                1.0 / (1.0 + z * z)
            }
            DensityKind::Triangular { width } => {
                let z = 0.5 * width * xi;
                if z.abs() < 1e-4 {
                    // removable singularity: sinc^2 series
                    let z2 = z * z;
                    1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 45.0
                } else {
                    let s = z.sin() / z;
                    s * s
                }
            }
            DensityKind::Gaussian { scale } => {
                let z = scale * xi;
                (-0.5 * z * z).exp()
            }
        }
    }

    /// Density value at `x` (unit mass).
    pub fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        match *self {
            DensityKind::Exponential { scale } => (-ax / scale).exp() / (2.0 * scale),
            DensityKind::Triangular { width } => {
                if ax <= width {
                    (1.0 - ax / width) / width
                } else {
                    0.0
                }
            }
            DensityKind::Gaussian { scale } => {
                let z = x / scale;
                (-0.5 * z * z).exp() / (scale * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            DensityKind::Exponential { scale } => 2.0 * scale * scale,
            DensityKind::Triangular { width } => width * width / 6.0,
            DensityKind::Gaussian { scale } => scale * scale,
        }
    }
}

/// A weighted unit-mass density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensitySpec", into = "DensitySpec")]
pub struct ContinuousDensity {
    pub kind: DensityKind,
    pub weight: f64,
}

impl ContinuousDensity {
    pub fn new(kind: DensityKind, weight: f64) -> Result<Self, KernelError> {
        let d = Self { kind, weight };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(weight: f64) -> Self {
        Self { kind: DensityKind::Exponential { scale: 1.0 }, weight }
    }

    pub fn triangular(width: f64, weight: f64) -> Self {
        Self { kind: DensityKind::Triangular { width }, weight }
    }

    pub fn gaussian(scale: f64, weight: f64) -> Self {
        Self { kind: DensityKind::Gaussian { scale }, weight }
    }

    fn validate(&self) -> Result<(), KernelError> {
        let l = self.kind.length();
        if !l.is_finite() || l <= 0.0 {
            return Err(KernelError::InvalidLength(l));
        }
        if !self.weight.is_finite() {
            return Err(KernelError::InvalidWeight(self.weight));
        }
        Ok(())
    }

    pub fn symbol(&self, xi: f64) -> f64 {
        self.weight * self.kind.symbol(xi)
    }
}

/// An even finite Borel measure: atoms plus densities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelMeasure {
    atoms: Vec<DiracAtom>,
    densities: Vec<ContinuousDensity>,
}

impl KernelMeasure {
    pub fn new(
        atoms: Vec<DiracAtom>,
        densities: Vec<ContinuousDensity>,
    ) -> Result<Self, KernelError> {
        for a in &atoms {
            a.validate()?;
        }
        for d in &densities {
            d.validate()?;
        }
        Ok(Self { atoms, densities })
    }

    /// The Dirac measure at the origin; `B = I`.
    pub fn identity() -> Self {
        Self { atoms: vec![DiracAtom { shift: 0.0, weight: 1.0 }], densities: Vec::new() }
    }

    /// `(1/5)(delta_{-1} + 3 delta + delta_1)`, symbol `(3 + 2 cos xi) / 5`.
    pub fn example_measure() -> Self {
        Self {
            atoms: vec![
                DiracAtom { shift: 0.0, weight: 0.6 },
                DiracAtom { shift: 1.0, weight: 0.4 },
            ],
            densities: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &[DiracAtom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[ContinuousDensity] {
        &self.densities
    }

    /// True when the measure is exactly the unit Dirac mass at the origin
    /// (possibly split over several zero-shift atoms summing to one).
    pub fn is_identity(&self) -> bool {
        self.densities.iter().all(|d| d.weight == 0.0)
            && self.atoms.iter().all(|a| a.shift == 0.0 || a.weight == 0.0)
            && self.total_mass() == 1.0
    }

    pub fn symbol(&self, xi: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.symbol(xi)).sum();
        let dens: f64 = self.densities.iter().map(|d| d.symbol(xi)).sum();
        atoms + dens
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let dens: f64 = self.densities.iter().map(|d| d.weight).sum();
        atoms + dens
    }

    /// `\int x^2 dmu` using the closed-form moments of each component.
    pub fn second_moment(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * a.shift * a.shift).sum();
        let dens: f64 = self.densities.iter().map(|d| d.weight * d.kind.second_moment()).sum();
        atoms + dens
    }

    /// Sampled lower and upper bounds of the symbol on `[0, xi_max]`.
    pub fn verify_bounds(&self, xi_max: f64, n_samples: usize) -> Result<KernelBounds, KernelError> {
        if !(xi_max > 0.0) || !xi_max.is_finite() || n_samples < 2 {
            return Err(KernelError::InvalidSampling { xi_max, n: n_samples });
        }
        let mut c1 = f64::INFINITY;
        let mut c2 = f64::NEG_INFINITY;
        for i in 0..n_samples {
            let xi = xi_max * i as f64 / (n_samples - 1) as f64;
            let value = self.symbol(xi);
            if !(value > 0.0) {
                return Err(KernelError::PositivityViolation { xi, value });
            }
            c1 = c1.min(value);
            c2 = c2.max(value);
        }
        Ok(KernelBounds { c1, c2, xi_max, n_samples })
    }

    /// Rescaled measure `mu_eps(x) = mu(x / sqrt(eps)) / sqrt(eps)`, whose symbol is
    /// `mu_hat(sqrt(eps) xi)`.
    pub fn scale(&self, eps: f64) -> Result<Self, KernelError> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(KernelError::NonpositiveEpsilon(eps));
        }
        let r = eps.sqrt();
        let atoms = self
            .atoms
            .iter()
            .map(|a| DiracAtom { shift: a.shift * r, weight: a.weight })
            .collect();
        let densities = self
            .densities
            .iter()
            .map(|d| ContinuousDensity { kind: d.kind.with_length(d.kind.length() * r), weight: d.weight })
            .collect();
        Ok(Self { atoms, densities })
    }

    /// `omega^2(xi) = xi^2 mu_hat(xi)`.
    pub fn dispersion(&self, xi: f64) -> Result<f64, KernelError> {
        let m = self.symbol(xi);
        if m < 0.0 {
            return Err(KernelError::NegativeSymbol { xi, value: m });
        }
        Ok(xi * xi * m)
    }

    /// Smallest `C` with `|mu_hat(xi) - 1| <= C xi^2` over `(0, xi_max]`.
    ///
    /// The uniform samples are complemented by the exact `xi -> 0` limit
    /// `|mu_hat''(0)| / 2 = |\int x^2 dmu| / 2`, which is where the supremum sits for
    /// nonnegative measures.
    pub fn deviation_constant(&self, xi_max: f64, n_samples: usize) -> Result<f64, KernelError> {
        if !(xi_max > 0.0) || !xi_max.is_finite() || n_samples < 1 {
            return Err(KernelError::InvalidSampling { xi_max, n: n_samples });
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(KernelError::MassNotOne(mass));
        }
        let mut sup = 0.5 * self.second_moment().abs();
        for i in 1..=n_samples {
            let xi = xi_max * i as f64 / n_samples as f64;
            sup = sup.max((self.symbol(xi) - 1.0).abs() / (xi * xi));
        }
        Ok(sup)
    }
}

/// `delta + eps * beta`.
pub fn perturb_identity(beta: ContinuousDensity, eps: f64) -> Result<KernelMeasure, KernelError> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(KernelError::NegativeEpsilon(eps));
    }
    beta.validate()?;
    if eps == 0.0 {
        return Ok(KernelMeasure::identity());
    }
    Ok(KernelMeasure {
        atoms: vec![DiracAtom { shift: 0.0, weight: 1.0 }],
        densities: vec![ContinuousDensity { kind: beta.kind, weight: eps * beta.weight }],
    })
}

/// Sampled symbol bounds `c1 <= mu_hat <= c2` on `[0, xi_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBounds {
    pub c1: f64,
    pub c2: f64,
    pub xi_max: f64,
    pub n_samples: usize,
}

// JSON form: {"atoms":[{"shift":a,"weight":w}], "densities":[{"kind":..,"param":..,"weight":..}]}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensitySpec {
    kind: DensityName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    param: Option<f64>,
    weight: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DensityName {
    Exponential,
    Triangular,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSpec {
    #[serde(default)]
    atoms: Vec<DiracAtom>,
    #[serde(default)]
    densities: Vec<ContinuousDensity>,
}

impl From<ContinuousDensity> for DensitySpec {
    fn from(d: ContinuousDensity) -> Self {
        let (kind, param) = match d.kind {
            DensityKind::Exponential { scale } => (DensityName::Exponential, scale),
            DensityKind::Triangular { width } => (DensityName::Triangular, width),
            DensityKind::Gaussian { scale } => (DensityName::Gaussian, scale),
        };
        DensitySpec { kind, param: Some(param), weight: d.weight }
    }
}

impl TryFrom<DensitySpec> for ContinuousDensity {
    type Error = String;
    fn try_from(d: DensitySpec) -> Result<Self, String> {
        let kind = match (d.kind, d.param) {
            (DensityName::Exponential, p) => DensityKind::Exponential { scale: p.unwrap_or(1.0) },
            (DensityName::Triangular, Some(h)) => DensityKind::Triangular { width: h },
            (DensityName::Gaussian, Some(s)) => DensityKind::Gaussian { scale: s },
            (name, None) => return Err(format!("density {name:?} requires \"param\"")),
        };
        ContinuousDensity::new(kind, d.weight).map_err(|e| e.to_string())
    }
}

impl Serialize for KernelMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        KernelSpec { atoms: self.atoms.clone(), densities: self.densities.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KernelMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let spec = KernelSpec::deserialize(deserializer)?;
        KernelMeasure::new(spec.atoms, spec.densities).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn example_measure_symbol() {
        let mu = KernelMeasure::example_measure();
        assert_abs_diff_eq!(mu.symbol(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.symbol(PI), 0.2, epsilon = 1e-15);
        for &xi in &[0.3, 1.7, 4.0, 11.0] {
            assert_abs_diff_eq!(mu.symbol(xi), (3.0 + 2.0 * xi.cos()) / 5.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(mu.second_moment(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.total_mass(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_and_masses() {
        let d = KernelMeasure::identity();
        assert_eq!(d.symbol(123.4), 1.0);
        assert_eq!(d.total_mass(), 1.0);
        assert_eq!(d.second_moment(), 0.0);
        assert!(d.is_identity());

        let k = KernelMeasure::new(
            vec![DiracAtom::new(0.0, 1.0).unwrap()],
            vec![ContinuousDensity::exponential(1.0)],
        )
        .unwrap();
        assert_eq!(k.symbol(0.0), 2.0);
        let k = KernelMeasure::new(
            vec![DiracAtom::new(0.0, 1.0).unwrap()],
            vec![ContinuousDensity::exponential(0.1)],
        )
        .unwrap();
        assert_abs_diff_eq!(k.total_mass(), 1.1, epsilon = 1e-15);
        assert!(!k.is_identity());
    }

    #[test]
    fn triangular_moment_and_limit() {
        let t = KernelMeasure::new(vec![], vec![ContinuousDensity::triangular(1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(t.second_moment(), 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(t.symbol(0.0), 1.0);
        // series branch meets the closed form smoothly
        let kind = DensityKind::Triangular { width: 1.0 };
        let below = kind.symbol(1.999e-4);
        let above = kind.symbol(2.001e-4);
        assert!((below - above).abs() < 1e-10);
    }

    #[test]
    fn bounds() {
        let b = KernelMeasure::example_measure().verify_bounds(10.0, 1000).unwrap();
        assert!(b.c1 >= 0.2 && b.c1 <= 0.2 + 1e-4, "c1 = {}", b.c1);
        assert_eq!(b.c2, 1.0);

        let b = KernelMeasure::identity().verify_bounds(50.0, 10).unwrap();
        assert_eq!((b.c1, b.c2), (1.0, 1.0));

        let bad = KernelMeasure::new(
            vec![DiracAtom::new(0.0, 1.0).unwrap()],
            vec![ContinuousDensity::exponential(-2.0)],
        )
        .unwrap();
        assert!(matches!(bad.verify_bounds(10.0, 100), Err(KernelError::PositivityViolation { .. })));
        assert!(matches!(
            KernelMeasure::identity().verify_bounds(0.0, 100),
            Err(KernelError::InvalidSampling { .. })
        ));
    }

    #[test]
    fn scaling() {
        let mu = KernelMeasure::example_measure();
        assert_eq!(mu.scale(1.0).unwrap(), mu);
        let m = mu.scale(0.25).unwrap();
        assert_eq!(m.atoms()[1].shift, 0.5);
        assert_abs_diff_eq!(m.symbol(2.0 * PI), 0.2, epsilon = 1e-15);
        assert_eq!(KernelMeasure::identity().scale(0.37).unwrap(), KernelMeasure::identity());
        assert!(matches!(mu.scale(0.0), Err(KernelError::NonpositiveEpsilon(_))));
        assert!(matches!(mu.scale(-1.0), Err(KernelError::NonpositiveEpsilon(_))));
    }

    #[test]
    fn perturbation() {
        let beta = ContinuousDensity::exponential(1.0);
        assert_eq!(perturb_identity(beta, 0.0).unwrap(), KernelMeasure::identity());
        let k = perturb_identity(beta, 1.0).unwrap();
        for &xi in &[0.0, 0.5, 3.0] {
            assert_abs_diff_eq!(k.symbol(xi), 1.0 + 1.0 / (1.0 + xi * xi), epsilon = 1e-15);
        }
        let t = perturb_identity(ContinuousDensity::triangular(1.0, 1.0), 0.5).unwrap();
        assert_eq!(t.symbol(0.0), 1.5);
        assert!(perturb_identity(beta, -0.1).is_err());
    }

    #[test]
    fn dispersion_relation() {
        assert_eq!(KernelMeasure::identity().dispersion(3.0).unwrap(), 9.0);
        let mu = KernelMeasure::example_measure();
        assert_abs_diff_eq!(mu.dispersion(PI).unwrap(), PI * PI / 5.0, epsilon = 1e-14);
        let k = perturb_identity(ContinuousDensity::exponential(1.0), 1.0).unwrap();
        assert_abs_diff_eq!(k.dispersion(1.0).unwrap(), 1.5, epsilon = 1e-15);
        let neg = KernelMeasure::new(vec![DiracAtom::new(0.0, -1.0).unwrap()], vec![]).unwrap();
        assert!(matches!(neg.dispersion(1.0), Err(KernelError::NegativeSymbol { .. })));
    }

    #[test]
    fn deviation() {
        assert_eq!(KernelMeasure::identity().deviation_constant(10.0, 100).unwrap(), 0.0);
        let c = KernelMeasure::example_measure().deviation_constant(10.0, 1000).unwrap();
        assert!(c > 0.0 && c <= 0.2 + 1e-15, "{c}");
        assert_abs_diff_eq!(c, 0.2, epsilon = 1e-15);
        let g = KernelMeasure::new(vec![], vec![ContinuousDensity::gaussian(1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(g.deviation_constant(10.0, 1000).unwrap(), 0.5, epsilon = 1e-15);
        let heavy = KernelMeasure::new(vec![DiracAtom::new(0.0, 2.0).unwrap()], vec![]).unwrap();
        assert!(matches!(heavy.deviation_constant(1.0, 10), Err(KernelError::MassNotOne(_))));
    }

    #[test]
    fn invalid_components() {
        assert!(DiracAtom::new(-1.0, 1.0).is_err());
        assert!(DiracAtom::new(1.0, f64::NAN).is_err());
        assert!(ContinuousDensity::new(DensityKind::Triangular { width: 0.0 }, 1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"atoms":[{"shift":0.0,"weight":0.6},{"shift":1.0,"weight":0.4}],
                       "densities":[{"kind":"exponential","weight":0.1},
                                    {"kind":"triangular","param":2.0,"weight":0.3}]}"#;
        let k: KernelMeasure = serde_json::from_str(text).unwrap();
        assert_eq!(k.densities()[0].kind, DensityKind::Exponential { scale: 1.0 });
        let back: KernelMeasure = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
        let bad = r#"{"densities":[{"kind":"gaussian","weight":1.0}]}"#;
        assert!(serde_json::from_str::<KernelMeasure>(bad).is_err());
        let bad = r#"{"atoms":[{"shift":-1.0,"weight":1.0}]}"#;
        assert!(serde_json::from_str::<KernelMeasure>(bad).is_err());
    }
}

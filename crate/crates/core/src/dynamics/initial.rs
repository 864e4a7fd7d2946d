use serde::{Deserialize, Serialize};

use super::{DynamicsError, WaveState};
use crate::spectral::{PeriodicGrid, SpectralField};

/// Largest admissible `|u_0|` at `x = +-L`.
pub const LOCALIZATION_TOLERANCE: f64 = 1e-12;

/// Localized initial strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `amp * exp(-x^2 / (2 width^2))`
    Gaussian { amp: f64, width: f64 },
    /// `amp * sech^2(x / width)`
    Sech2 { amp: f64, width: f64 },
    /// Gaussian envelope times `cos(carrier x)`.
    Packet { amp: f64, width: f64, carrier: f64 },
}

impl Profile {
    fn envelope(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { amp, width } | Profile::Packet { amp, width, .. } => {
                amp * (-x * x / (2.0 * width * width)).exp()
            }
            Profile::Sech2 { amp, width } => {
                let c = (x / width).cosh();
                amp / (c * c)
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Packet { carrier, .. } => self.envelope(x) * (carrier * x).cos(),
            _ => self.envelope(x),
        }
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        let (amp, width, carrier) = match *self {
            Profile::Gaussian { amp, width } | Profile::Sech2 { amp, width } => (amp, width, 0.0),
            Profile::Packet { amp, width, carrier } => (amp, width, carrier),
        };
        if !amp.is_finite() {
            return Err(DynamicsError::InvalidProfile(format!("amplitude must be finite, got {amp}")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(DynamicsError::InvalidProfile(format!("width must be > 0, got {width}")));
        }
        if !carrier.is_finite() {
            return Err(DynamicsError::InvalidProfile(format!("carrier must be finite, got {carrier}")));
        }
        Ok(())
    }
}

/// Initial velocity potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityChoice {
    #[default]
    Zero,
    /// `v_0 = u_0`: a pure left-going wave for the linear local system.
    RiemannLeftMover,
}

pub fn make_initial(profile: Profile, grid: &PeriodicGrid, v_choice: VelocityChoice) -> Result<WaveState, DynamicsError> {
    profile.validate()?;
    let l = grid.half_length();
    let edge = profile.envelope(l).abs().max(profile.envelope(-l).abs());
    if !(edge < LOCALIZATION_TOLERANCE) {
        return Err(DynamicsError::ProfileNotLocalized { value: edge });
    }
    let u = SpectralField::from_fn(grid, |x| profile.value(x));
    let v = match v_choice {
        VelocityChoice::Zero => SpectralField::zeros(grid),
        VelocityChoice::RiemannLeftMover => u.clone(),
    };
    WaveState::new(u, v, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_is_zero_state() {
        let g = PeriodicGrid::new(40.0, 256).unwrap();
        let s = make_initial(Profile::Gaussian { amp: 0.0, width: 1.0 }, &g, VelocityChoice::Zero).unwrap();
        assert_eq!(s, WaveState::zero(&g));
    }

    #[test]
    fn gaussian_is_localized_on_wide_domain() {
        let g = PeriodicGrid::new(40.0, 1024).unwrap();
        let s = make_initial(Profile::Gaussian { amp: 0.05, width: 1.0 }, &g, VelocityChoice::Zero).unwrap();
        assert!(s.u.values()[0].abs() < 1e-12);
        assert!((s.u.max() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn wide_profile_is_rejected() {
        let g = PeriodicGrid::new(10.0, 256).unwrap();
        let err = make_initial(Profile::Sech2 { amp: 0.05, width: 2.0 }, &g, VelocityChoice::Zero).unwrap_err();
        assert!(matches!(err, DynamicsError::ProfileNotLocalized { .. }));
        let err = make_initial(Profile::Gaussian { amp: 0.05, width: -1.0 }, &g, VelocityChoice::Zero).unwrap_err();
        assert!(matches!(err, DynamicsError::InvalidProfile(_)));
    }

    #[test]
    fn left_mover_copies_strain() {
        let g = PeriodicGrid::new(40.0, 512).unwrap();
        let p = Profile::Packet { amp: 0.05, width: 3.0, carrier: 1.0 };
        let s = make_initial(p, &g, VelocityChoice::RiemannLeftMover).unwrap();
        assert_eq!(s.u, s.v);
    }

    #[test]
    fn json_form() {
        let p: Profile = serde_json::from_str(r#"{"kind":"sech2","amp":0.1,"width":2.0}"#).unwrap();
        assert_eq!(p, Profile::Sech2 { amp: 0.1, width: 2.0 });
        let v: VelocityChoice = serde_json::from_str(r#""riemann_left_mover""#).unwrap();
        assert_eq!(v, VelocityChoice::RiemannLeftMover);
    }
}

//! Scalar math shims and tolerance configuration.
//!
//! The crate builds without `std` when the `libm` feature supplies the float
//! intrinsics; with the default `std` feature the standard library versions
//! are used directly.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable either the `std` or the `libm` feature for float math");

/// Full turn in radians.
pub const TAU: f64 = core::f64::consts::TAU;
/// Half turn in radians.
pub const PI: f64 = core::f64::consts::PI;

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn tan(x: f64) -> f64 {
        x.tan()
    }
    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        y.atan2(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    #[inline]
    pub fn rem_euclid(x: f64, m: f64) -> f64 {
        x.rem_euclid(m)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }
    #[inline]
    pub fn acos(x: f64) -> f64 {
        x.acos()
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn tan(x: f64) -> f64 {
        libm::tan(x)
    }
    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    #[inline]
    pub fn rem_euclid(x: f64, m: f64) -> f64 {
        let r = libm::fmod(x, m);
        if r < 0.0 {
            r + libm::fabs(m)
        } else {
            r
        }
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
    #[inline]
    pub fn acos(x: f64) -> f64 {
        libm::acos(x)
    }
}

pub use imp::{abs, acos, atan2, cos, hypot, rem_euclid, round, sin, sqrt, tan};

/// Normalizes an angle into `[0, 2*pi)`.
#[inline]
pub fn normalize_angle(a: f64) -> f64 {
    let r = rem_euclid(a, TAU);
    // rem_euclid can return exactly TAU when a is a tiny negative number.
    if r >= TAU {
        r - TAU
    } else {
        r
    }
}

/// Normalizes an angle into `(-pi, pi]`.
#[inline]
pub fn normalize_angle_signed(a: f64) -> f64 {
    let r = normalize_angle(a);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Absolute tolerances used throughout the crate.
///
/// `eps_pos` is a length and scales with the input polygon's bounding-box
/// diameter; `eps_ang` is in radians and does not scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_pos: f64,
    pub eps_ang: f64,
}

impl Tolerances {
    pub fn from_scale(base: f64, bbox_diameter: f64) -> Self {
        Tolerances {
            eps_pos: base
                * if bbox_diameter > 0.0 {
                    bbox_diameter
                } else {
                    1.0
                },
            eps_ang: base,
        }
    }
}

/// Crate-wide configuration. `base_eps` seeds both tolerance components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub base_eps: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config { base_eps: 1e-9 }
    }
}

impl Config {
    /// Reads `OMEGA_CLOUD_EPS` from the environment, falling back to the
    /// default when unset or unparsable. Only available with `std`.
    #[cfg(feature = "std")]
    pub fn from_env() -> Self {
        match std::env::var("OMEGA_CLOUD_EPS") {
            Ok(s) => match s.trim().parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Config { base_eps: v },
                _ => Config::default(),
            },
            Err(_) => Config::default(),
        }
    }

    pub fn tolerances(&self, bbox_diameter: f64) -> Tolerances {
        Tolerances::from_scale(self.base_eps, bbox_diameter)
    }
}

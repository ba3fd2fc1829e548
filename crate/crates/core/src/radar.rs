//! Acquisition geometry and the resolution/bandwidth arithmetic built on it.
//!
//! The zero-Doppler distance, the slant range and the reference range at
//! `t = 0` are all represented by the single field
//! [`RadarConfig::reference_range`]; the point-target model never needs them
//! to differ.

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Platform and waveform parameters.
///
/// The along-track pulse spacing is derived (`platform_velocity / prf`), as
/// is the pulse repetition time (`1 / prf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarConfig {
    /// Electromagnetic wavelength, meters.
    pub wavelength: f64,
    /// Chirp bandwidth, Hz.
    pub chirp_bandwidth: f64,
    /// Pulse repetition frequency, Hz.
    pub prf: f64,
    /// Platform velocity, m/s.
    pub platform_velocity: f64,
    /// Reference (zero-Doppler) range, meters.
    pub reference_range: f64,
    /// Physical antenna length, meters.
    pub antenna_length: f64,
    /// Incidence angle, radians, in (0, pi/2).
    pub incidence_angle: f64,
    /// Acquisition duration, seconds.
    pub acquisition_duration: f64,
}

impl Default for RadarConfig {
    /// Stripmap X-band acquisition: 250 MHz chirp, 2 kHz PRF, 6 m antenna,
    /// 5 s duration, 7 km/s platform at 650 km, 30 degree incidence and a
    /// 3.1 cm wavelength.
    fn default() -> Self {
        Self {
            wavelength: 0.031,
            chirp_bandwidth: 250e6,
            prf: 2000.0,
            platform_velocity: 7000.0,
            reference_range: 650_000.0,
            antenna_length: 6.0,
            incidence_angle: 30f64.to_radians(),
            acquisition_duration: 5.0,
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("wavelength", self.wavelength),
            ("chirp_bandwidth", self.chirp_bandwidth),
            ("prf", self.prf),
            ("platform_velocity", self.platform_velocity),
            ("reference_range", self.reference_range),
            ("antenna_length", self.antenna_length),
            ("incidence_angle", self.incidence_angle),
            ("acquisition_duration", self.acquisition_duration),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        if self.incidence_angle >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidConfig(format!(
                "incidence_angle must be below pi/2, got {}",
                self.incidence_angle
            )));
        }
        Ok(())
    }

    /// Along-track distance between consecutive pulses.
    pub fn pulse_spacing(&self) -> f64 {
        self.platform_velocity / self.prf
    }

    pub fn pulse_repetition_time(&self) -> f64 {
        1.0 / self.prf
    }

    /// Slant-range resolution `c / (2 B)`.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.chirp_bandwidth)
    }

    /// Pulse count whose synthetic aperture `2 N d` equals the distance
    /// flown during the acquisition, so that the synthesized Doppler band
    /// spans exactly `acquisition_duration` of slow time.
    pub fn pulses_per_acquisition(&self) -> usize {
        (self.prf * self.acquisition_duration / 2.0).round().max(2.0) as usize
    }
}

/// Total Doppler bandwidth `4 N d / (lambda r)` in cycles per meter of
/// azimuth; its reciprocal is the azimuth resolution.
pub fn doppler_bandwidth(cfg: &RadarConfig, n_pulses: usize) -> Result<f64> {
    cfg.validate()?;
    if n_pulses < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_pulses must be at least 2, got {n_pulses}"
        )));
    }
    Ok(4.0 * n_pulses as f64 * cfg.pulse_spacing() / (cfg.wavelength * cfg.reference_range))
}

/// Azimuth resolution `lambda R0 / (2 L_sa)`.
pub fn azimuth_resolution(cfg: &RadarConfig, synthetic_aperture: f64) -> Result<f64> {
    cfg.validate()?;
    if !(synthetic_aperture.is_finite() && synthetic_aperture > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "synthetic aperture must be positive, got {synthetic_aperture}"
        )));
    }
    Ok(cfg.wavelength * cfg.reference_range / (2.0 * synthetic_aperture))
}

/// Synthetic aperture length `2 N d`.
pub fn synthetic_aperture(cfg: &RadarConfig, n_pulses: usize) -> f64 {
    2.0 * n_pulses as f64 * cfg.pulse_spacing()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> RadarConfig {
        RadarConfig {
            wavelength: 0.031,
            reference_range: 650_000.0,
            ..RadarConfig::default()
        }
    }

    #[test]
    fn pulse_spacing_from_prf() {
        assert_eq!(cfg().pulse_spacing(), 3.5);
        // PRT follows PRF, not the 0.23 ms listed alongside it.
        assert_eq!(cfg().pulse_repetition_time(), 0.0005);
    }

    #[test]
    fn doppler_bandwidth_examples() {
        let b = doppler_bandwidth(&cfg(), 10_000).unwrap();
        let expected = 4.0 * 10_000.0 * 3.5 / (0.031 * 650_000.0);
        assert!((b - expected).abs() < 1e-12);
        assert!((b - 6.948).abs() < 1e-3);
        let b2 = doppler_bandwidth(&cfg(), 20_000).unwrap();
        assert_eq!(b2, 2.0 * b);
        assert!((b2 - 13.896).abs() < 2e-3);
    }

    #[test]
    fn doppler_bandwidth_rejects_bad_input() {
        assert!(doppler_bandwidth(&cfg(), 1).is_err());
        let bad = RadarConfig {
            prf: 0.0,
            ..cfg()
        };
        assert!(matches!(
            doppler_bandwidth(&bad, 100),
            Err(Error::InvalidConfig(_))
        ));
        let bad = RadarConfig {
            incidence_angle: 2.0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn azimuth_resolution_examples() {
        let r = azimuth_resolution(&cfg(), 42_000.0).unwrap();
        assert!((r - 0.031 * 650_000.0 / 84_000.0).abs() < 1e-15);
        assert!((r - 0.2399).abs() < 1e-4);
        assert_eq!(azimuth_resolution(&cfg(), 84_000.0).unwrap(), r / 2.0);
        let sonic = RadarConfig {
            wavelength: 0.48,
            ..cfg()
        };
        let r = azimuth_resolution(&sonic, 42_000.0).unwrap();
        assert!((r - 3.714).abs() < 1e-3);
        assert!(matches!(
            azimuth_resolution(&cfg(), 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn resolution_and_bandwidth_are_reciprocal(n in 2usize..100_000, lambda in 0.01f64..1.0) {
            let c = RadarConfig { wavelength: lambda, ..cfg() };
            let b = doppler_bandwidth(&c, n).unwrap();
            let r = azimuth_resolution(&c, synthetic_aperture(&c, n)).unwrap();
            prop_assert!((r * b - 1.0).abs() < 1e-12);
        }
    }
}

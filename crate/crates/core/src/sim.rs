//! Point-target SLC synthesis and the 2-D spectral transform pair.
//!
//! Targets are rendered in the spectral domain: each contributes a
//! rectangular spectrum over the synthesized range and Doppler bands,
//! carrying the linear phase ramp of its position. The inverse transform of
//! that rectangle is the periodic (band-limited) sinc, whose first null sits
//! one resolution cell from the peak and whose peak value is the target
//! amplitude. The pulse-count/pulse-length prefactor of the compressed
//! signal is absorbed into [`SceneTarget::amplitude`].
//!
//! The Doppler axis is also slow time: spatial frequency `f` (cycles/m) is
//! seen at `t = lambda R0 f / (2 V)`. Target motion enters as the residual
//! two-way phase of its range history relative to a stationary target at
//! the same position, so a range velocity displaces the focused peak in
//! azimuth by `-R0 v_r / V`, azimuth velocity and range acceleration defocus
//! it, and the range-frequency coupling of the same term produces range
//! walk. A vibrating target is displaced by its oscillator trajectory
//! evaluated at the slow time of each Doppler bin.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::{signed_bin, storage_index, Band, Raster, SlcImage, SlcMeta, Spectrum};
use crate::oscillator::OscillatorParams;
use crate::radar::{doppler_bandwidth, RadarConfig, SPEED_OF_LIGHT};
use crate::C64;

/// Target velocity and acceleration in the range/azimuth frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotionParams {
    /// Range velocity, m/s.
    pub v_r: f64,
    /// Azimuth velocity, m/s.
    pub v_a: f64,
    /// Range acceleration, m/s^2.
    pub a_r: f64,
    /// Azimuth acceleration, m/s^2.
    pub a_a: f64,
}

impl MotionParams {
    pub fn is_stationary(&self) -> bool {
        self.v_r == 0.0 && self.v_a == 0.0 && self.a_r == 0.0 && self.a_a == 0.0
    }

    fn is_finite(&self) -> bool {
        [self.v_r, self.v_a, self.a_r, self.a_a].iter().all(|v| v.is_finite())
    }
}

/// Normalized motion anomaly parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonTriple {
    /// `v_r / V`.
    pub eps_r1: f64,
    /// `a_r R0 / V^2`.
    pub eps_r2: f64,
    /// `v_a / V`.
    pub eps_c1: f64,
}

pub fn motion_epsilons(cfg: &RadarConfig, m: &MotionParams) -> Result<EpsilonTriple> {
    let v = cfg.platform_velocity;
    if !(v > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "platform velocity must be positive, got {v}"
        )));
    }
    Ok(EpsilonTriple {
        eps_r1: m.v_r / v,
        eps_r2: m.a_r * cfg.reference_range / (v * v),
        eps_c1: m.v_a / v,
    })
}

/// Expanded range history
/// `R0 - v_r t - a_r t^2 / 2 + V^2 t^2 / (2 R0) - V v_a t^2 / R0`.
///
/// The cubic term `V a_a t^3 / (2 R0)` is dropped. Intended for
/// `|t| <= T / 2`.
pub fn range_history(cfg: &RadarConfig, m: &MotionParams, t: f64) -> f64 {
    let r0 = cfg.reference_range;
    r0 + range_offset(cfg, m, t) + cfg.platform_velocity.powi(2) * t * t / (2.0 * r0)
}

/// Motion-induced part of [`range_history`]: the difference between a
/// moving and a stationary target at the same reference position.
pub fn range_offset(cfg: &RadarConfig, m: &MotionParams, t: f64) -> f64 {
    -m.v_r * t - 0.5 * m.a_r * t * t - cfg.platform_velocity * m.v_a * t * t / cfg.reference_range
}

/// Exact range `sqrt((V t - S_a)^2 + (R0 - S_r)^2)` with
/// `S_r = v_r t + a_r t^2 / 2` and `S_a = v_a t + a_a t^2 / 2`.
pub fn exact_range(cfg: &RadarConfig, m: &MotionParams, t: f64) -> f64 {
    let s_r = m.v_r * t + 0.5 * m.a_r * t * t;
    let s_a = m.v_a * t + 0.5 * m.a_a * t * t;
    (cfg.platform_velocity * t - s_a).hypot(cfg.reference_range - s_r)
}

/// Raster sampling for synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    /// Meters per range sample.
    pub range_spacing: f64,
    /// Meters per azimuth sample.
    pub azimuth_spacing: f64,
    /// Pulse count setting the Doppler bandwidth.
    pub n_pulses: usize,
}

impl SampleGrid {
    /// Samples both axes `oversample` times finer than their resolution.
    pub fn new(cfg: &RadarConfig, n_pulses: usize, oversample: f64) -> Result<Self> {
        if !(oversample.is_finite() && oversample >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "oversample must be >= 1, got {oversample}"
            )));
        }
        let doppler = doppler_bandwidth(cfg, n_pulses)?;
        Ok(Self {
            range_spacing: cfg.range_resolution() / oversample,
            azimuth_spacing: 1.0 / (doppler * oversample),
            n_pulses,
        })
    }

    /// Grid whose Doppler band spans the acquisition duration.
    pub fn for_acquisition(cfg: &RadarConfig, oversample: f64) -> Result<Self> {
        Self::new(cfg, cfg.pulses_per_acquisition(), oversample)
    }
}

/// A point scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneTarget {
    /// Range position from the first range sample, meters.
    pub range_position: f64,
    /// Azimuth position from the first azimuth sample, meters.
    pub azimuth_position: f64,
    pub amplitude: f64,
    pub motion: Option<MotionParams>,
    pub oscillator: Option<OscillatorParams>,
}

impl SceneTarget {
    pub fn stationary(range_position: f64, azimuth_position: f64, amplitude: f64) -> Self {
        Self {
            range_position,
            azimuth_position,
            amplitude,
            motion: None,
            oscillator: None,
        }
    }

    /// Target placed at fractional sample coordinates on `grid`.
    pub fn at_sample(grid: &SampleGrid, row: f64, col: f64, amplitude: f64) -> Self {
        Self::stationary(row * grid.range_spacing, col * grid.azimuth_spacing, amplitude)
    }
}

/// Per-Doppler-bin displacement `(range, azimuth)` in samples.
pub type DisplacementProfile<'a> = &'a dyn Fn(i64) -> [f64; 2];

/// Renders point targets for a given acquisition and sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Synthesizer {
    pub cfg: RadarConfig,
    pub grid: SampleGrid,
}

impl Synthesizer {
    pub fn new(cfg: RadarConfig, grid: SampleGrid) -> Result<Self> {
        cfg.validate()?;
        let s = Self { cfg, grid };
        if s.range_band_fraction() > 1.0 + 1e-12 || s.doppler_band_fraction() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(
                "sample grid undersamples the synthesized bandwidth".into(),
            ));
        }
        Ok(s)
    }

    /// Grid from [`SampleGrid::for_acquisition`].
    pub fn for_acquisition(cfg: RadarConfig, oversample: f64) -> Result<Self> {
        Self::new(cfg, SampleGrid::for_acquisition(&cfg, oversample)?)
    }

    fn range_band_fraction(&self) -> f64 {
        self.grid.range_spacing * 2.0 * self.cfg.chirp_bandwidth / SPEED_OF_LIGHT
    }

    fn doppler_band_fraction(&self) -> f64 {
        // Infallible once `new` has validated the config.
        self.grid.azimuth_spacing * doppler_bandwidth(&self.cfg, self.grid.n_pulses).unwrap_or(0.0)
    }

    /// Synthesized bands snapped to whole bins for a `rows x cols` raster.
    pub fn meta(&self, rows: usize, cols: usize) -> SlcMeta {
        let count = |frac: f64, n: usize| ((frac * n as f64).round() as usize).clamp(1, n);
        SlcMeta {
            range_spacing: self.grid.range_spacing,
            azimuth_spacing: self.grid.azimuth_spacing,
            doppler_band: Band::centered(count(self.doppler_band_fraction(), cols), cols),
            range_band: Band::centered(count(self.range_band_fraction(), rows), rows),
            wavelength: self.cfg.wavelength,
        }
    }

    /// Slow time (zero at zero Doppler) seen at normalized Doppler
    /// frequency `f` in cycles per azimuth sample.
    pub fn slow_time(&self, f: f64) -> f64 {
        let c = &self.cfg;
        c.wavelength * c.reference_range * (f / self.grid.azimuth_spacing)
            / (2.0 * c.platform_velocity)
    }

    /// Acquisition time of Doppler bin `bin` on a `cols`-point axis,
    /// measured from the lower edge of the synthesized band.
    pub fn acquisition_time(&self, bin: i64, cols: usize) -> f64 {
        let lower = self.meta(8, cols).doppler_band.lower();
        self.slow_time(bin as f64 / cols as f64 - lower)
    }

    /// Slow-time span of the synthesized Doppler band.
    pub fn aperture_duration(&self, cols: usize) -> f64 {
        self.slow_time(self.meta(8, cols).doppler_band.width)
    }

    fn check_raster(rows: usize, cols: usize) -> Result<()> {
        if rows < 8 || cols < 8 {
            return Err(Error::InvalidArgument(format!(
                "raster must be at least 8x8, got {rows}x{cols}"
            )));
        }
        Ok(())
    }

    fn sample_position(&self, index: usize, t: &SceneTarget, rows: usize, cols: usize) -> Result<(f64, f64)> {
        let row = t.range_position / self.grid.range_spacing;
        let col = t.azimuth_position / self.grid.azimuth_spacing;
        if !(row.is_finite() && col.is_finite()) || row < 0.0 || col < 0.0 || row > (rows - 1) as f64 || col > (cols - 1) as f64 {
            return Err(Error::OutOfBounds {
                index,
                row,
                col,
                rows,
                cols,
            });
        }
        if !(t.amplitude.is_finite() && t.amplitude >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target {index} amplitude must be finite and non-negative, got {}",
                t.amplitude
            )));
        }
        Ok((row, col))
    }

    /// Adds one target's spectrum into `spec`.
    fn accumulate(
        &self,
        spec: &mut Raster<C64>,
        meta: &SlcMeta,
        index: usize,
        target: &SceneTarget,
        profile: Option<DisplacementProfile>,
    ) -> Result<()> {
        let (rows, cols) = (spec.rows(), spec.cols());
        let (row, col) = self.sample_position(index, target, rows, cols)?;
        let range_bins = meta.range_band.bins(rows);
        let doppler_bins = meta.doppler_band.bins(cols);
        let scale = target.amplitude * (rows * cols) as f64
            / (range_bins.len() * doppler_bins.len()) as f64;
        let two_way = (2.0 * (self.cfg.reference_range + target.range_position) / self.cfg.wavelength).fract();
        let carrier = C64::from_polar(scale, -2.0 * PI * two_way);

        let motion = target.motion.filter(|m| !m.is_stationary());
        if let Some(m) = &motion {
            if !m.is_finite() {
                return Err(Error::InvalidArgument(format!("target {index} motion is not finite")));
            }
            let v = self.cfg.platform_velocity;
            if m.v_r.abs() / v >= 0.1 || m.v_a.abs() / v >= 0.1 {
                log::warn!(
                    "target {index}: velocity {:?} is not small against the platform velocity; the range-history expansion is inaccurate",
                    m
                );
            }
        }

        // Per-Doppler-bin displacement, from an explicit profile or from the
        // target's oscillator evaluated at each bin's slow time.
        let omega0 = match &target.oscillator {
            Some(o) => Some(o.natural_frequency()?),
            None => None,
        };
        let displacement: Option<Vec<[f64; 2]>> = match (profile, &target.oscillator, omega0) {
            (Some(p), _, _) => Some(doppler_bins.iter().map(|&q| p(q)).collect()),
            (None, Some(o), Some(w0)) => Some(
                doppler_bins
                    .iter()
                    .map(|&q| o.closed_form(w0, self.acquisition_time(q, cols)))
                    .collect(),
            ),
            _ => None,
        };
        if let Some(d) = &displacement {
            if d.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Simulation(format!(
                    "target {index}: displacement is not finite"
                )));
            }
        }
        // Azimuth displacement acts as group delay: integrate it over the
        // Doppler axis (trapezoid) to get the phase.
        let azimuth_phase: Vec<f64> = {
            let mut acc = 0.0;
            doppler_bins
                .iter()
                .enumerate()
                .map(|(j, &q)| {
                    if let (Some(d), true) = (&displacement, j > 0) {
                        acc += 0.5 * (d[j - 1][1] + d[j][1]) / cols as f64;
                    }
                    -2.0 * PI * (q as f64 * col / cols as f64 + acc)
                })
                .collect()
        };

        // Displacement moves the envelope only: its range phase is referred
        // to the band center, so it adds no phase at the carrier.
        let range_center = meta.range_band.center;
        for &p in &range_bins {
            let u = p as f64 / rows as f64;
            let range_phase = -2.0 * PI * u * row;
            let pi = storage_index(p, rows);
            for (j, &q) in doppler_bins.iter().enumerate() {
                let mut phase = range_phase + azimuth_phase[j];
                if let Some(d) = &displacement {
                    phase -= 2.0 * PI * (u - range_center) * d[j][0];
                }
                if let Some(m) = &motion {
                    let t = self.slow_time(q as f64 / cols as f64);
                    let dr = range_offset(&self.cfg, m, t);
                    let spatial = u / self.grid.range_spacing;
                    phase -= 2.0 * PI * (2.0 / self.cfg.wavelength + spatial) * dr;
                }
                *spec.get_mut(pi, storage_index(q, cols)) += carrier * C64::from_polar(1.0, phase);
            }
        }
        Ok(())
    }

    fn render(&self, targets: &[(SceneTarget, Option<DisplacementProfile>)], rows: usize, cols: usize) -> Result<SlcImage> {
        Self::check_raster(rows, cols)?;
        let meta = self.meta(rows, cols);
        let mut spec = Raster::filled(rows, cols, C64::new(0.0, 0.0));
        for (i, (t, profile)) in targets.iter().enumerate() {
            self.accumulate(&mut spec, &meta, i, t, *profile)?;
        }
        Ok(Spectrum { data: spec, meta }.to_image())
    }

    /// Renders a target with an explicit per-Doppler-bin displacement
    /// profile (range and azimuth shifts in samples), overriding any
    /// oscillator on the target.
    pub fn synthesize_with_profile(
        &self,
        target: &SceneTarget,
        profile: DisplacementProfile,
        rows: usize,
        cols: usize,
    ) -> Result<SlcImage> {
        self.render(&[(*target, Some(profile))], rows, cols)
    }
}

/// Sum of the focused responses of all targets. An empty list gives an
/// all-zero raster.
pub fn synthesize_slc(synth: &Synthesizer, targets: &[SceneTarget], rows: usize, cols: usize) -> Result<SlcImage> {
    let items: Vec<_> = targets.iter().map(|t| (*t, None)).collect();
    synth.render(&items, rows, cols)
}

/// Renders `target` moving with `motion`.
pub fn synthesize_moving_target(
    synth: &Synthesizer,
    target: &SceneTarget,
    motion: MotionParams,
    rows: usize,
    cols: usize,
) -> Result<SlcImage> {
    let moving = SceneTarget {
        motion: Some(motion),
        ..*target
    };
    synthesize_slc(synth, &[moving], rows, cols)
}

/// `n` frame times uniformly spaced over `[0, duration]`.
pub fn frame_times(duration: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a vibration series needs at least 2 frames, got {n}"
        )));
    }
    Ok((0..n).map(|i| duration * i as f64 / (n - 1) as f64).collect())
}

/// Frame `i` is the target displaced by `displacement(t_i)` (range,
/// azimuth samples), with `t_i` uniformly spaced over the acquisition.
pub fn synthesize_vibrating_series<F>(
    synth: &Synthesizer,
    target: &SceneTarget,
    displacement: F,
    n_frames: usize,
    rows: usize,
    cols: usize,
) -> Result<Vec<SlcImage>>
where
    F: Fn(f64) -> [f64; 2],
{
    let times = frame_times(synth.cfg.acquisition_duration, n_frames)?;
    times
        .iter()
        .map(|&t| {
            let d = displacement(t);
            if !(d[0].is_finite() && d[1].is_finite()) {
                return Err(Error::Simulation(format!(
                    "oscillator trajectory is not finite at t = {t}"
                )));
            }
            let shifted = SceneTarget {
                range_position: target.range_position + d[0] * synth.grid.range_spacing,
                azimuth_position: target.azimuth_position + d[1] * synth.grid.azimuth_spacing,
                oscillator: None,
                ..*target
            };
            synthesize_slc(synth, &[shifted], rows, cols)
        })
        .collect()
}

/// [`synthesize_vibrating_series`] driven by the oscillator's closed form.
pub fn synthesize_oscillating_series(
    synth: &Synthesizer,
    target: &SceneTarget,
    osc: &OscillatorParams,
    n_frames: usize,
    rows: usize,
    cols: usize,
) -> Result<Vec<SlcImage>> {
    let w0 = osc.natural_frequency()?;
    synthesize_vibrating_series(synth, target, |t| osc.closed_form(w0, t), n_frames, rows, cols)
}

pub fn spectrum_2d(img: &SlcImage) -> Spectrum {
    img.spectrum()
}

pub fn inverse_spectrum_2d(spec: &Spectrum) -> SlcImage {
    spec.to_image()
}

/// Shift `(range, azimuth)` in samples of `shifted` relative to
/// `reference`, from the slope of the cross-spectrum phase.
///
/// The slope is the phase of the summed products of adjacent-bin
/// cross-spectrum values, so no unwrapping is needed for shifts below half
/// the raster size.
pub fn spectral_shift(reference: &Spectrum, shifted: &Spectrum) -> Result<[f64; 2]> {
    let (rows, cols) = (reference.rows(), reference.cols());
    if shifted.rows() != rows || shifted.cols() != cols {
        return Err(Error::Dimension {
            expected: format!("{rows}x{cols}"),
            actual: format!("{}x{}", shifted.rows(), shifted.cols()),
        });
    }
    let cross: Vec<C64> = shifted
        .data
        .as_slice()
        .iter()
        .zip(reference.data.as_slice())
        .map(|(s, r)| s * r.conj())
        .collect();
    let cross = Raster::from_vec(rows, cols, cross)?;
    let floor = cross.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max) * 1e-9;
    if floor == 0.0 {
        return Err(Error::DegenerateInput("cross spectrum is identically zero".into()));
    }
    let at = |p: i64, q: i64| *cross.get(storage_index(p, rows), storage_index(q, cols));
    let ordered = |n: usize| -> Vec<i64> {
        let mut b: Vec<i64> = (0..n).map(|i| signed_bin(i, n)).collect();
        b.sort_unstable();
        b
    };
    let (pr, qr) = (ordered(rows), ordered(cols));
    let mut az = C64::new(0.0, 0.0);
    let mut rg = C64::new(0.0, 0.0);
    for &p in &pr {
        for w in qr.windows(2) {
            let (a, b) = (at(p, w[0]), at(p, w[1]));
            if a.norm() > floor && b.norm() > floor {
                az += b * a.conj();
            }
        }
    }
    for &q in &qr {
        for w in pr.windows(2) {
            let (a, b) = (at(w[0], q), at(w[1], q));
            if a.norm() > floor && b.norm() > floor {
                rg += b * a.conj();
            }
        }
    }
    Ok([
        -rg.arg() * rows as f64 / (2.0 * PI),
        -az.arg() * cols as f64 / (2.0 * PI),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use proptest::prelude::*;

    fn synth() -> Synthesizer {
        Synthesizer::for_acquisition(RadarConfig::default(), 2.0).unwrap()
    }

    fn moving_synth() -> Synthesizer {
        // About 5 m azimuth resolution keeps the 0.01 V defocus on-raster.
        let cfg = RadarConfig::default();
        Synthesizer::new(cfg, SampleGrid::new(&cfg, 288, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn single_target_peak_value() {
        let s = synth();
        let t = SceneTarget::at_sample(&s.grid, 32.0, 32.0, 1.7);
        let img = synthesize_slc(&s, &[t], 64, 64).unwrap();
        let (r, c, m) = metrics::peak(&img);
        assert_eq!((r, c), (32, 32));
        assert!((m - 1.7).abs() / 1.7 < 1e-12);
    }

    #[test]
    fn empty_scene_is_zero() {
        let img = synthesize_slc(&synth(), &[], 16, 16).unwrap();
        assert!(img.data.as_slice().iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn rejects_out_of_bounds_and_tiny_rasters() {
        let s = synth();
        let t = SceneTarget::at_sample(&s.grid, 70.0, 10.0, 1.0);
        assert!(matches!(synthesize_slc(&s, &[t], 64, 64), Err(Error::OutOfBounds { .. })));
        let t = SceneTarget::at_sample(&s.grid, -0.5, 10.0, 1.0);
        assert!(synthesize_slc(&s, &[t], 64, 64).is_err());
        assert!(synthesize_slc(&s, &[], 4, 64).is_err());
    }

    #[test]
    fn well_separated_targets_superpose() {
        let s = synth();
        let a = SceneTarget::at_sample(&s.grid, 20.0, 20.0, 1.0);
        let b = SceneTarget::at_sample(&s.grid, 44.0, 48.0, 1.0);
        let both = synthesize_slc(&s, &[a, b], 64, 64).unwrap();
        let sa = synthesize_slc(&s, &[a], 64, 64).unwrap();
        let sb = synthesize_slc(&s, &[b], 64, 64).unwrap();
        for ((x, y), z) in both.data.as_slice().iter().zip(sa.data.as_slice()).zip(sb.data.as_slice()) {
            assert!((x - (y + z)).norm() < 1e-9);
        }
        // Two local maxima near the single-target peak value.
        for (r, c) in [(20, 20), (44, 48)] {
            assert!((both.at(r, c).norm() - 1.0).abs() < 1e-9 + 0.08);
            assert!(metrics::is_local_max(&both.magnitude(), r, c));
        }
    }

    #[test]
    fn spectrum_pair_is_identity_and_preserves_energy() {
        let s = synth();
        let t = SceneTarget::at_sample(&s.grid, 10.3, 40.7, 2.0);
        let img = synthesize_slc(&s, &[t], 64, 48).unwrap();
        let spec = spectrum_2d(&img);
        let back = inverse_spectrum_2d(&spec);
        let rms = (img.energy() / img.data.len() as f64).sqrt();
        assert!(back.rms_diff(&img) / rms < 1e-12);
        assert!((spec.energy() - img.energy()).abs() / img.energy() < 1e-10);
    }

    #[test]
    fn point_target_spectrum_is_rectangular() {
        let s = synth();
        let img = synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, 32.0, 32.0, 1.0)], 64, 64).unwrap();
        let spec = spectrum_2d(&img);
        // Oracle: rect support from the band edges alone.
        let (mut inside, mut n_in, mut outside, mut n_out) = (0.0, 0, 0.0, 0);
        for i in 0..64 {
            for j in 0..64 {
                let (p, q) = (signed_bin(i, 64) as f64 / 64.0, signed_bin(j, 64) as f64 / 64.0);
                let m = spec.data.get(i, j).norm();
                let rb = img.meta.range_band;
                let db = img.meta.doppler_band;
                if p >= rb.lower() && p < rb.upper() && q >= db.lower() && q < db.upper() {
                    inside += m;
                    n_in += 1;
                } else {
                    outside += m;
                    n_out += 1;
                }
            }
        }
        let ratio_db = 20.0 * ((inside / n_in as f64) / (outside / n_out as f64 + 1e-300)).log10();
        assert!(ratio_db > 30.0, "{ratio_db}");
    }

    #[test]
    fn shift_appears_as_phase_ramp() {
        let s = synth();
        let a = synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, 30.0, 30.0, 1.0)], 64, 64).unwrap();
        let b = synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, 30.0 + 1.37, 30.0 - 2.61, 1.0)], 64, 64).unwrap();
        let (sa, sb) = (spectrum_2d(&a), spectrum_2d(&b));
        for (x, y) in sa.data.as_slice().iter().zip(sb.data.as_slice()) {
            assert!((x.norm() - y.norm()).abs() < 1e-9);
        }
        let d = spectral_shift(&sa, &sb).unwrap();
        assert!((d[0] - 1.37).abs() < 1e-6, "{d:?}");
        assert!((d[1] + 2.61).abs() < 1e-6, "{d:?}");
    }

    #[test]
    fn range_history_examples() {
        let cfg = RadarConfig::default();
        let zero = MotionParams::default();
        let (v, r0) = (cfg.platform_velocity, cfg.reference_range);
        assert_eq!(range_history(&cfg, &zero, 0.0), r0);
        assert!((range_history(&cfg, &zero, 1.0) - (r0 + v * v / (2.0 * r0))).abs() < 1e-9);
        let m = MotionParams { v_r: 7.0, ..zero };
        let d = range_history(&cfg, &m, 1.0) - range_history(&cfg, &zero, 1.0);
        assert!((d + 7.0).abs() < 1e-9);
    }

    #[test]
    fn expansion_error_is_the_dropped_fourth_order_term() {
        // The first neglected term of sqrt(1 + x) ~ 1 + x/2 is -x^2/8; for a
        // stationary target it accounts for the whole deviation.
        let cfg = RadarConfig::default();
        let zero = MotionParams::default();
        for t in [0.5, 1.0, 2.0, 2.5] {
            let x = (cfg.platform_velocity * t / cfg.reference_range).powi(2);
            let predicted = cfg.reference_range * x * x / 8.0;
            let dev = range_history(&cfg, &zero, t) - exact_range(&cfg, &zero, t);
            assert!((dev - predicted).abs() / predicted < 2e-3, "t={t}: {dev} vs {predicted}");
        }
        // Well inside the aperture the expansion is sub-millimetre even with
        // 10 m/s motion.
        let m = MotionParams { v_r: 10.0, v_a: -10.0, a_r: 0.0, a_a: 0.0 };
        for i in -50..=50 {
            let t = i as f64 * 0.01;
            assert!((range_history(&cfg, &m, t) - exact_range(&cfg, &m, t)).abs() < 1e-3);
        }
    }

    #[test]
    fn epsilon_examples() {
        let cfg = RadarConfig::default();
        let e = motion_epsilons(&cfg, &MotionParams { v_r: 7.0, ..Default::default() }).unwrap();
        assert!((e.eps_r1 - 0.001).abs() < 1e-15);
        let e = motion_epsilons(&cfg, &MotionParams::default()).unwrap();
        assert_eq!((e.eps_r1, e.eps_r2, e.eps_c1), (0.0, 0.0, 0.0));
        let e = motion_epsilons(&cfg, &MotionParams { a_r: 0.01, ..Default::default() }).unwrap();
        assert!((e.eps_r2 - 0.01 * 650_000.0 / 49e6).abs() < 1e-15);
        assert!((e.eps_r2 - 1.3265e-4).abs() < 1e-8);
    }

    fn azimuth_peak(img: &SlcImage) -> f64 {
        let (r, _, _) = metrics::peak(img);
        let cut = img.data.row(r).to_vec();
        metrics::subsample_peak(&cut)
    }

    #[test]
    fn range_velocity_displaces_in_azimuth() {
        let s = moving_synth();
        let (rows, cols) = (64, 128);
        let t = SceneTarget::at_sample(&s.grid, 32.0, 50.0, 1.0);
        let still = synthesize_slc(&s, &[t], rows, cols).unwrap();
        let cfg = &s.cfg;
        let v_r = -12.0 * s.grid.azimuth_spacing * cfg.platform_velocity / cfg.reference_range;
        let moving = synthesize_moving_target(&s, &t, MotionParams { v_r, ..Default::default() }, rows, cols).unwrap();
        let shift = azimuth_peak(&moving) - azimuth_peak(&still);
        assert!((shift - 12.0).abs() <= 1.0, "{shift}");
        let faster = synthesize_moving_target(&s, &t, MotionParams { v_r: 2.0 * v_r, ..Default::default() }, rows, cols).unwrap();
        let shift2 = azimuth_peak(&faster) - azimuth_peak(&still);
        assert!((shift2 - 2.0 * shift).abs() <= 1.0, "{shift2}");
    }

    #[test]
    fn zero_motion_is_bitwise_stationary() {
        let s = moving_synth();
        let t = SceneTarget::at_sample(&s.grid, 20.0, 21.5, 1.0);
        let a = synthesize_slc(&s, &[t], 32, 32).unwrap();
        let b = synthesize_moving_target(&s, &t, MotionParams::default(), 32, 32).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn azimuth_velocity_smears() {
        let s = moving_synth();
        let (rows, cols) = (64, 128);
        let t = SceneTarget::at_sample(&s.grid, 32.0, 64.0, 1.0);
        let still = synthesize_slc(&s, &[t], rows, cols).unwrap();
        let v_a = 0.01 * s.cfg.platform_velocity;
        let moving = synthesize_moving_target(&s, &t, MotionParams { v_a, ..Default::default() }, rows, cols).unwrap();
        let w0 = metrics::azimuth_width(&still, -3.0);
        let w1 = metrics::azimuth_width(&moving, -3.0);
        assert!(w1 >= 1.5 * w0, "{w1} vs {w0}");
        let accel = synthesize_moving_target(&s, &t, MotionParams { a_r: 1.0, ..Default::default() }, rows, cols).unwrap();
        assert!(metrics::azimuth_width(&accel, -3.0) > 1.2 * w0);
    }

    #[test]
    fn vibrating_series_frames() {
        let s = synth();
        let t = SceneTarget::at_sample(&s.grid, 32.0, 32.0, 1.0);
        let still = synthesize_vibrating_series(&s, &t, |_| [0.0, 0.0], 4, 64, 64).unwrap();
        assert!(still.windows(2).all(|w| w[0] == w[1]));
        assert!(synthesize_vibrating_series(&s, &t, |_| [0.0, 0.0], 1, 64, 64).is_err());
        assert!(matches!(
            synthesize_vibrating_series(&s, &t, |_| [f64::NAN, 0.0], 3, 64, 64),
            Err(Error::Simulation(_))
        ));

        let w = 2.0 * PI / s.cfg.acquisition_duration * 1.3;
        let frames = synthesize_vibrating_series(&s, &t, |tt| [0.0, 0.3 * (w * tt).cos()], 9, 64, 64).unwrap();
        let reference = spectrum_2d(&synthesize_slc(&s, &[t], 64, 64).unwrap());
        let times = frame_times(s.cfg.acquisition_duration, 9).unwrap();
        for (f, tt) in frames.iter().zip(times) {
            let d = spectral_shift(&reference, &spectrum_2d(f)).unwrap();
            assert!((d[1] - 0.3 * (w * tt).cos()).abs() < 0.01);
            assert!(d[0].abs() < 0.01);
        }
    }

    #[test]
    fn aperture_spans_the_acquisition() {
        let s = synth();
        let span = s.aperture_duration(256);
        assert!((span / s.cfg.acquisition_duration - 1.0).abs() < 0.02, "{span}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn superposition_holds(r1 in 4.0f64..28.0, c1 in 4.0f64..28.0, r2 in 4.0f64..28.0, c2 in 4.0f64..28.0, a in 0.1f64..3.0) {
            let s = synth();
            let t1 = SceneTarget::at_sample(&s.grid, r1, c1, a);
            let t2 = SceneTarget::at_sample(&s.grid, r2, c2, 1.0);
            let both = synthesize_slc(&s, &[t1, t2], 32, 32).unwrap();
            let x = synthesize_slc(&s, &[t1], 32, 32).unwrap();
            let y = synthesize_slc(&s, &[t2], 32, 32).unwrap();
            let scale = both.data.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
            for ((u, v), w) in both.data.as_slice().iter().zip(x.data.as_slice()).zip(y.data.as_slice()) {
                prop_assert!((u - (v + w)).norm() <= 1e-9 * scale);
            }
        }

        #[test]
        fn parseval(r in 1.0f64..30.0, c in 1.0f64..30.0) {
            let s = synth();
            let img = synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, r, c, 1.0)], 32, 32).unwrap();
            let spec = spectrum_2d(&img);
            prop_assert!((spec.energy() - img.energy()).abs() / img.energy() < 1e-10);
        }
    }
}

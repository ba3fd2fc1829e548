//! Synthetic scenes with known answers.
//!
//! [`design_shift_profile`] builds a per-Doppler-bin displacement whose
//! master-to-slave shifts, as seen by the sub-aperture bank, equal a
//! prescribed sequence. [`DepthSourceFixture`] is a circularly vibrating
//! target whose phasor series is a steering column at a chosen depth.

use nalgebra::{DMatrix, DVector};

use crate::coreg::TrackParams;
use crate::error::{Error, Result};
use crate::image::{Band, SlcImage};
use crate::oscillator::OscillatorParams;
use crate::radar::RadarConfig;
use crate::scene::scene_to_text;
use crate::sim::{synthesize_slc, SceneTarget, Synthesizer};
use crate::subaperture::{allocate_bands, BandPlan, Taper};
use crate::tomo::{depth_grid, Inversion, TomoGeometry, TomoParams};

/// Displacement `(range, azimuth)` in samples for each Doppler bin of a
/// band, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftProfile {
    pub bins: Vec<i64>,
    pub values: Vec<[f64; 2]>,
}

impl ShiftProfile {
    /// Displacement at signed bin `bin`; zero outside the profile.
    pub fn at(&self, bin: i64) -> [f64; 2] {
        match self.bins.binary_search(&bin) {
            Ok(i) => self.values[i],
            Err(_) => [0.0, 0.0],
        }
    }
}

/// Positions (within `bins`) of the bins of `band`.
fn positions(band: &Band, bins: &[i64], cols: usize) -> Result<Vec<usize>> {
    let inside: Vec<usize> = band
        .bins(cols)
        .iter()
        .map(|b| bins.binary_search(b).map_err(|_| Error::InvalidArgument(format!("band {band:?} leaves the support"))))
        .collect::<Result<_>>()?;
    if inside.len() < 2 {
        return Err(Error::InvalidArgument(format!("band {band:?} holds fewer than 2 bins")));
    }
    Ok(inside)
}

/// Range shift seen in a band: the mean of the per-bin range displacement.
fn range_weights(pos: &[usize], row: &mut [f64], sign: f64) {
    for &p in pos {
        row[p] += sign / pos.len() as f64;
    }
}

/// Azimuth shift seen in a band: the regression slope of the integrated
/// group delay, a weighted mean of the displacement over bin intervals.
fn azimuth_weights(pos: &[usize], row: &mut [f64], sign: f64) {
    let n = pos.len();
    let mean = (n - 1) as f64 / 2.0;
    let sxx: f64 = (0..n).map(|j| (j as f64 - mean).powi(2)).sum();
    for i in 0..n - 1 {
        let w: f64 = (i + 1..n).map(|j| j as f64 - mean).sum::<f64>() / sxx;
        row[pos[i]] += sign * w / 2.0;
        row[pos[i + 1]] += sign * w / 2.0;
    }
}

fn min_norm(op: &DMatrix<f64>, target: &[f64]) -> Result<DVector<f64>> {
    let gram = op * op.transpose();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::DegenerateInput("band measurements are not independent".into()))?;
    Ok(op.transpose() * chol.solve(&DVector::from_column_slice(target)))
}

/// Smallest-norm displacement profile over `plan.full` on a `cols`-point
/// azimuth axis whose band-averaged master-to-slave shifts equal `shifts`.
pub fn design_shift_profile(plan: &BandPlan, cols: usize, shifts: &[[f64; 2]]) -> Result<ShiftProfile> {
    if shifts.len() != plan.n_steps {
        return Err(Error::Dimension {
            expected: format!("{} shifts", plan.n_steps),
            actual: format!("{}", shifts.len()),
        });
    }
    let bins = plan.full.bins(cols);
    let n = plan.n_steps;
    let mut range_op = DMatrix::zeros(n, bins.len());
    let mut azimuth_op = DMatrix::zeros(n, bins.len());
    for i in 0..n {
        let m = positions(&plan.master[i], &bins, cols)?;
        let s = positions(&plan.slave[i], &bins, cols)?;
        let mut rr = vec![0.0; bins.len()];
        let mut ar = vec![0.0; bins.len()];
        range_weights(&s, &mut rr, 1.0);
        range_weights(&m, &mut rr, -1.0);
        azimuth_weights(&s, &mut ar, 1.0);
        azimuth_weights(&m, &mut ar, -1.0);
        range_op.set_row(i, &DVector::from_vec(rr).transpose());
        azimuth_op.set_row(i, &DVector::from_vec(ar).transpose());
    }
    let r: Vec<f64> = shifts.iter().map(|s| s[0]).collect();
    let a: Vec<f64> = shifts.iter().map(|s| s[1]).collect();
    let gr = min_norm(&range_op, &r)?;
    let ga = min_norm(&azimuth_op, &a)?;
    Ok(ShiftProfile {
        values: gr.iter().zip(ga.iter()).map(|(x, y)| [*x, *y]).collect(),
        bins,
    })
}

/// A single target in a `rows x cols` scene, processed with an 8-step plan
/// and a depth grid covering one alias period.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthSourceFixture {
    pub synth: Synthesizer,
    pub rows: usize,
    pub cols: usize,
    pub target: SceneTarget,
    pub pixel: (usize, usize),
    pub plan: BandPlan,
    pub params: TomoParams,
    pub z_grid: Vec<f64>,
    /// Injected depth, meters; `None` for the stationary variant.
    pub depth: Option<f64>,
}

pub const FIXTURE_STEPS: usize = 8;
pub const FIXTURE_RESERVED: f64 = 0.5;
/// Circular vibration amplitude, samples.
pub const FIXTURE_AMPLITUDE: f64 = 0.3;

pub fn fixture_geometry() -> TomoGeometry {
    TomoGeometry {
        sound_wavelength: 0.48,
        slant_range: 650_000.0,
        incidence: std::f64::consts::FRAC_PI_6,
        aperture: 42_000.0,
    }
}

impl DepthSourceFixture {
    fn base(depth: Option<f64>) -> Result<Self> {
        let (rows, cols) = (64, 256);
        let synth = Synthesizer::for_acquisition(RadarConfig::default(), 2.0)?;
        let meta = synth.meta(rows, cols);
        let plan = allocate_bands(meta.doppler_band, FIXTURE_STEPS, FIXTURE_RESERVED)?;
        let geometry = fixture_geometry();
        let kz = geometry.wavenumbers(FIXTURE_STEPS)?;
        let period = 2.0 * std::f64::consts::PI / kz[1];
        let step = 0.5;
        let z_grid = depth_grid(0.0, period - step, step)?;
        let pixel = (rows / 2, cols / 2);
        let mut target = SceneTarget::at_sample(&synth.grid, pixel.0 as f64, pixel.1 as f64, 1.0);
        if let Some(z0) = depth {
            // Consecutive pairs are one plan step apart in slow time, so the
            // phasor advances by omega * tau per band; match kz spacing * z0.
            let tau = synth.slow_time(plan.step);
            let omega = kz[1] * z0 / tau;
            target.oscillator = Some(OscillatorParams::linear_with_frequency(
                omega,
                FIXTURE_AMPLITUDE,
                FIXTURE_AMPLITUDE,
                0.0,
            ));
        }
        Ok(Self {
            synth,
            rows,
            cols,
            target,
            pixel,
            plan,
            params: TomoParams {
                geometry,
                mode: Inversion::Matched,
                track: TrackParams::default(),
                taper: Taper::Rectangular,
            },
            z_grid,
            depth,
        })
    }

    /// Vibrating target whose phasors focus at `depth` meters.
    ///
    /// Depth zero is a rest state with no differential signal, and beyond a
    /// few meters the motion averages out within each sub-aperture.
    pub fn with_depth(depth: f64) -> Result<Self> {
        Self::base(Some(depth))
    }

    /// Same scene with the target at rest.
    pub fn stationary() -> Result<Self> {
        Self::base(None)
    }

    pub fn image(&self) -> Result<SlcImage> {
        synthesize_slc(&self.synth, &[self.target], self.rows, self.cols)
    }

    /// The scene as a scene file, for driving the fixture through files.
    pub fn scene_text(&self) -> String {
        scene_to_text(&[self.target])
    }

    /// Grid index nearest the injected depth.
    pub fn depth_index(&self) -> Option<usize> {
        let z0 = self.depth?;
        let step = self.z_grid[1] - self.z_grid[0];
        Some(((z0 - self.z_grid[0]) / step).round() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreg::{phasor_series, track_pixels};
    use crate::subaperture::build_bank;
    use crate::tomo::build_tomogram;

    #[test]
    fn designed_profile_is_recovered_by_the_bank() {
        let f = DepthSourceFixture::stationary().unwrap();
        let shifts: Vec<[f64; 2]> = (0..FIXTURE_STEPS)
            .map(|i| [0.2 * (0.9 * i as f64).cos(), -0.25 * (0.6 * i as f64).sin() + 0.05])
            .collect();
        let profile = design_shift_profile(&f.plan, f.cols, &shifts).unwrap();
        let img = f
            .synth
            .synthesize_with_profile(&f.target, &|q| profile.at(q), f.rows, f.cols)
            .unwrap();
        let bank = build_bank(&img, &f.plan, Taper::Rectangular).unwrap();
        let track = track_pixels(&bank, &[f.pixel], TrackParams::default()).remove(0).unwrap();
        for (i, e) in track.entries.iter().enumerate() {
            let e = e.unwrap();
            assert!((e.range - shifts[i][0]).abs() < 0.02, "band {i}: {e:?} vs {:?}", shifts[i]);
            assert!((e.azimuth - shifts[i][1]).abs() < 0.02, "band {i}: {e:?} vs {:?}", shifts[i]);
        }
    }

    #[test]
    fn harmonic_shift_series_is_tracked() {
        let f = DepthSourceFixture::stationary().unwrap();
        let shifts: Vec<[f64; 2]> = (0..FIXTURE_STEPS).map(|i| [0.0, 0.3 * (1.1 * i as f64).cos()]).collect();
        let profile = design_shift_profile(&f.plan, f.cols, &shifts).unwrap();
        let img = f.synth.synthesize_with_profile(&f.target, &|q| profile.at(q), f.rows, f.cols).unwrap();
        let bank = build_bank(&img, &f.plan, Taper::Rectangular).unwrap();
        let track = track_pixels(&bank, &[f.pixel], TrackParams::default()).remove(0).unwrap();
        let rms = (track
            .entries
            .iter()
            .zip(&shifts)
            .map(|(e, s)| (e.unwrap().azimuth - s[1]).powi(2))
            .sum::<f64>()
            / FIXTURE_STEPS as f64)
            .sqrt();
        assert!(rms < 0.03, "{rms}");
    }

    #[test]
    fn stationary_fixture_has_no_shifts() {
        let f = DepthSourceFixture::stationary().unwrap();
        let bank = build_bank(&f.image().unwrap(), &f.plan, Taper::Rectangular).unwrap();
        let track = track_pixels(&bank, &[f.pixel], TrackParams::default()).remove(0).unwrap();
        for y in phasor_series(&track).unwrap() {
            assert!(y.norm() < 0.02, "{y}");
        }
    }

    #[test]
    fn depth_source_focuses_at_its_depth() {
        let f = DepthSourceFixture::with_depth(1.5).unwrap();
        let t = build_tomogram(&f.image().unwrap(), &[f.pixel], &f.plan, &f.z_grid, &f.params).unwrap();
        assert!(t.columns[0].error.is_none());
        assert!(t.argmax(0).abs_diff(f.depth_index().unwrap()) <= 1, "{:?}", t.magnitude_profile(0));
    }
}

//! Depth focusing of per-pixel vibration phasors.
//!
//! Sub-aperture `i` is assigned a synthetic baseline `B_i` spaced
//! uniformly over `[0, A]`, giving the vertical wavenumber
//! `kz_i = 4 pi B_i / (lambda_s r sin(theta))` with `lambda_s` the sound
//! wavelength. The steering matrix is `A[i][f] = exp(j kz_i z_f)`, the data
//! model `Y = A h`, and depth (positive downward) is focused either with the
//! matched filter `A^H Y / k` or a ridge-regularized least-squares inverse.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::coreg::{phasor_series, track_pixels, TrackParams};
use crate::error::{Error, Result};
use crate::image::{Raster, SlcImage};
use crate::subaperture::{build_bank, BandPlan, Taper};
use crate::C64;

/// Condition number beyond which an unregularized normal matrix is
/// treated as singular.
const MAX_CONDITION: f64 = 1e12;

/// `lambda_s = v / f`.
pub fn sound_wavelength(speed: f64, frequency: f64) -> Result<f64> {
    if !(speed > 0.0 && frequency > 0.0 && speed.is_finite() && frequency.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sound speed and frequency must be positive, got {speed}, {frequency}"
        )));
    }
    Ok(speed / frequency)
}

/// Tomographic resolution `lambda_s R / (2 A)`.
pub fn resolution(sound_wavelength: f64, slant_range: f64, aperture: f64) -> Result<f64> {
    for (name, v) in [
        ("sound wavelength", sound_wavelength),
        ("slant range", slant_range),
        ("aperture", aperture),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(sound_wavelength * slant_range / (2.0 * aperture))
}

pub fn wavenumbers(baselines: &[f64], sound_wavelength: f64, slant_range: f64, incidence: f64) -> Result<Vec<f64>> {
    if !(sound_wavelength.is_finite() && sound_wavelength > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sound wavelength must be positive, got {sound_wavelength}"
        )));
    }
    if !(slant_range.is_finite() && slant_range > 0.0) {
        return Err(Error::InvalidArgument(format!("slant range must be positive, got {slant_range}")));
    }
    if !(incidence > 0.0 && incidence < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("incidence must lie in (0, pi/2), got {incidence}")));
    }
    let scale = 4.0 * std::f64::consts::PI / (sound_wavelength * slant_range * incidence.sin());
    Ok(baselines.iter().map(|b| scale * b).collect())
}

/// `k` baselines uniformly spaced from 0 to `aperture`.
pub fn uniform_baselines(aperture: f64, k: usize) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("at least 2 baselines are needed, got {k}")));
    }
    Ok((0..k).map(|i| aperture * i as f64 / (k - 1) as f64).collect())
}

/// `n` depths `start, start + step, ...`.
pub fn depth_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(Error::InvalidArgument(format!(
            "depth grid needs step > 0 and stop >= start, got {start}..{stop} by {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 1 << 20 {
        return Err(Error::InvalidArgument(format!("depth grid of {n} points is too large")));
    }
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMatrix {
    pub kz: Vec<f64>,
    pub z_grid: Vec<f64>,
    /// `k x F`, entry `exp(j kz_i z_f)`.
    pub matrix: Raster<C64>,
}

impl SteeringMatrix {
    pub fn rows(&self) -> usize {
        self.kz.len()
    }

    pub fn cols(&self) -> usize {
        self.z_grid.len()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows(), self.cols(), self.matrix.as_slice())
    }
}

pub fn steering(kz: &[f64], z_grid: &[f64]) -> Result<SteeringMatrix> {
    if kz.is_empty() || z_grid.is_empty() {
        return Err(Error::InvalidArgument("steering matrix needs non-empty kz and depth grid".into()));
    }
    if z_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("depth grid must be strictly increasing".into()));
    }
    let data = kz
        .iter()
        .flat_map(|&k| z_grid.iter().map(move |&z| C64::from_polar(1.0, k * z)))
        .collect();
    Ok(SteeringMatrix {
        kz: kz.to_vec(),
        z_grid: z_grid.to_vec(),
        matrix: Raster::from_vec(kz.len(), z_grid.len(), data)?,
    })
}

/// `Y = A h`.
pub fn forward(a: &SteeringMatrix, h: &[C64]) -> Result<Vec<C64>> {
    if h.len() != a.cols() {
        return Err(Error::Dimension {
            expected: format!("{} depths", a.cols()),
            actual: format!("{}", h.len()),
        });
    }
    Ok((0..a.rows())
        .map(|i| a.matrix.row(i).iter().zip(h).map(|(x, y)| x * y).sum())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Inversion {
    /// `A^H Y / k`.
    #[default]
    Matched,
    /// `(A^H A + reg I)^-1 A^H Y`.
    Pinv { reg: f64 },
}

pub fn invert(a: &SteeringMatrix, y: &[C64], mode: Inversion) -> Result<Vec<C64>> {
    let (k, f) = (a.rows(), a.cols());
    if y.len() != k {
        return Err(Error::Dimension {
            expected: format!("{k} observations"),
            actual: format!("{}", y.len()),
        });
    }
    match mode {
        Inversion::Matched => Ok((0..f)
            .map(|j| (0..k).map(|i| a.matrix.get(i, j).conj() * y[i]).sum::<C64>() / k as f64)
            .collect()),
        Inversion::Pinv { reg } => {
            if !(reg.is_finite() && reg >= 0.0) {
                return Err(Error::InvalidArgument(format!("reg must be finite and >= 0, got {reg}")));
            }
            let am = a.to_nalgebra();
            let ah = am.adjoint();
            let mut normal = &ah * &am;
            for d in 0..f {
                normal[(d, d)] += C64::new(reg, 0.0);
            }
            let sv = normal.singular_values();
            let (hi, lo) = (sv.max(), sv.min());
            let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            if condition > MAX_CONDITION {
                return Err(Error::IllConditioned { condition });
            }
            let rhs = &ah * nalgebra::DVector::from_column_slice(y);
            let h = normal
                .lu()
                .solve(&rhs)
                .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
            Ok(h.iter().copied().collect())
        }
    }
}

/// Wavenumber inputs of the tomographic acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoGeometry {
    pub sound_wavelength: f64,
    pub slant_range: f64,
    pub incidence: f64,
    /// Total baseline aperture `A`, meters.
    pub aperture: f64,
}

impl TomoGeometry {
    pub fn resolution(&self) -> Result<f64> {
        resolution(self.sound_wavelength, self.slant_range, self.aperture)
    }

    pub fn wavenumbers(&self, k: usize) -> Result<Vec<f64>> {
        wavenumbers(&uniform_baselines(self.aperture, k)?, self.sound_wavelength, self.slant_range, self.incidence)
    }
}

/// One depth profile of a tomogram.
#[derive(Debug, Clone, PartialEq)]
pub struct TomoColumn {
    pub pixel: (usize, usize),
    /// Complex reflectivity; all zeros when `error` is set.
    pub h: Vec<C64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    pub z_grid: Vec<f64>,
    pub columns: Vec<TomoColumn>,
}

impl Tomogram {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `|h|` for column `pixel_index` at depth index `depth_index`.
    pub fn magnitude(&self, pixel_index: usize, depth_index: usize) -> f64 {
        self.columns[pixel_index].h[depth_index].norm()
    }

    pub fn magnitude_profile(&self, pixel_index: usize) -> Vec<f64> {
        self.columns[pixel_index].h.iter().map(|z| z.norm()).collect()
    }

    /// Depth index of the largest magnitude in a column.
    pub fn argmax(&self, pixel_index: usize) -> usize {
        self.magnitude_profile(pixel_index)
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &m)| if m > b.1 { (i, m) } else { b })
            .0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoParams {
    pub geometry: TomoGeometry,
    pub mode: Inversion,
    pub track: TrackParams,
    pub taper: Taper,
}

/// Sub-aperture bank, tracking and depth inversion for every pixel of
/// `line`. Pixels that fail anywhere get an all-zero flagged column.
pub fn build_tomogram(
    slc: &SlcImage,
    line: &[(usize, usize)],
    plan: &BandPlan,
    z_grid: &[f64],
    params: &TomoParams,
) -> Result<Tomogram> {
    if plan.n_steps < 2 {
        return Err(Error::InvalidArgument("tomography needs at least 2 sub-apertures".into()));
    }
    let res = params.geometry.resolution()?;
    if let Some(w) = z_grid.windows(2).find(|w| w[1] - w[0] > res / 2.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "depth step {} exceeds half the resolution {}",
            w[1] - w[0],
            res / 2.0
        )));
    }
    for &(r, c) in line {
        if r >= slc.rows() || c >= slc.cols() {
            return Err(Error::InvalidArgument(format!(
                "line pixel ({r}, {c}) lies outside the {}x{} raster",
                slc.rows(),
                slc.cols()
            )));
        }
    }
    let a = steering(&params.geometry.wavenumbers(plan.n_steps)?, z_grid)?;
    if line.is_empty() {
        return Ok(Tomogram {
            z_grid: z_grid.to_vec(),
            columns: Vec::new(),
        });
    }
    let bank = build_bank(slc, plan, params.taper)?;
    let tracks = track_pixels(&bank, line, params.track);
    let columns = line
        .par_iter()
        .zip(tracks.par_iter())
        .map(|(&pixel, track)| {
            let result = track
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|t| phasor_series(t).map_err(|e| e.to_string()))
                .and_then(|y| invert(&a, &y, params.mode).map_err(|e| e.to_string()));
            match result {
                Ok(h) => TomoColumn { pixel, h, error: None },
                Err(e) => {
                    log::warn!("pixel {pixel:?}: {e}");
                    TomoColumn {
                        pixel,
                        h: vec![C64::new(0.0, 0.0); z_grid.len()],
                        error: Some(e),
                    }
                }
            }
        })
        .collect();
    Ok(Tomogram {
        z_grid: z_grid.to_vec(),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn uniform_matrix(k: usize, dkz: f64, z: &[f64]) -> SteeringMatrix {
        let kz: Vec<f64> = (0..k).map(|i| dkz * i as f64).collect();
        steering(&kz, z).unwrap()
    }

    #[test]
    fn wavenumber_examples() {
        let kz = wavenumbers(&[0.0, 42000.0], 0.48, 650_000.0, PI / 6.0).unwrap();
        assert_eq!(kz[0], 0.0);
        let oracle = 4.0 * PI * 42000.0 / (0.48 * 650_000.0 * 0.5);
        assert!((kz[1] - oracle).abs() < 1e-12 && (kz[1] - 3.383).abs() < 1e-3);
        let kz2 = wavenumbers(&[0.0, 84000.0], 0.48, 650_000.0, PI / 6.0).unwrap();
        assert!((kz2[1] - 2.0 * kz[1]).abs() < 1e-12);
        assert!(wavenumbers(&[1.0], 0.0, 1.0, 0.5).is_err());
        assert!(wavenumbers(&[1.0], 1.0, 1.0, PI / 2.0).is_err());
    }

    #[test]
    fn resolution_examples() {
        let ls = sound_wavelength(6000.0, 12500.0).unwrap();
        assert!((ls - 0.48).abs() < 1e-15);
        let r = resolution(ls, 650_000.0, 42000.0).unwrap();
        assert!((r - 3.714).abs() < 1e-3);
        assert!((resolution(ls, 650_000.0, 84000.0).unwrap() - r / 2.0).abs() < 1e-15);
        assert!(resolution(ls, 650_000.0, 0.0).is_err());
    }

    #[test]
    fn steering_structure() {
        let a = steering(&[0.0, 1.0, 2.5], &[0.0]).unwrap();
        assert!(a.matrix.as_slice().iter().all(|z| *z == C64::new(1.0, 0.0)));
        let a = uniform_matrix(6, 0.4, &[0.0, 0.5, 1.0, 1.5]);
        assert!(a.matrix.as_slice().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert!(a.matrix.row(0).iter().all(|z| *z == C64::new(1.0, 0.0)));
        assert!(steering(&[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn column_products_are_dirichlet_kernels() {
        let (k, dkz) = (7usize, 0.37);
        let z: Vec<f64> = (0..10).map(|i| 0.6 * i as f64).collect();
        let a = uniform_matrix(k, dkz, &z);
        for f in 0..z.len() {
            for g in 0..z.len() {
                let ip: C64 = (0..k).map(|i| a.matrix.get(i, f).conj() * a.matrix.get(i, g)).sum();
                let x = dkz * (z[g] - z[f]);
                let oracle = if x.abs() < 1e-15 {
                    C64::new(k as f64, 0.0)
                } else {
                    C64::from_polar((k as f64 * x / 2.0).sin() / (x / 2.0).sin(), (k as f64 - 1.0) * x / 2.0)
                };
                assert!((ip - oracle).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_examples() {
        let z: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let a = uniform_matrix(4, 0.3, &z);
        assert_eq!(forward(&a, &[C64::new(0.0, 0.0); 5]).unwrap(), vec![C64::new(0.0, 0.0); 4]);
        let mut h = vec![C64::new(0.0, 0.0); 5];
        h[2] = C64::new(1.0, 0.0);
        let y = forward(&a, &h).unwrap();
        for (i, v) in y.iter().enumerate() {
            assert!((v - C64::from_polar(1.0, a.kz[i] * 2.0)).norm() < 1e-15);
        }
        h[4] = C64::new(0.0, 2.0);
        let y2 = forward(&a, &h).unwrap();
        for i in 0..4 {
            assert!((y2[i] - (a.matrix.get(i, 2) + a.matrix.get(i, 4) * C64::new(0.0, 2.0))).norm() < 1e-14);
        }
        assert!(forward(&a, &h[..3]).is_err());
    }

    fn nyquist_case() -> (SteeringMatrix, f64) {
        // 16 kz over an aperture; grid spans one alias period at half the
        // resolution.
        let g = TomoGeometry {
            sound_wavelength: 0.48,
            slant_range: 650_000.0,
            incidence: PI / 6.0,
            aperture: 42000.0,
        };
        let kz = g.wavenumbers(16).unwrap();
        let period = 2.0 * PI / kz[1];
        let step = g.resolution().unwrap() / 4.0;
        let z = depth_grid(0.0, period - step, step).unwrap();
        (steering(&kz, &z).unwrap(), g.resolution().unwrap())
    }

    fn argmax(h: &[C64]) -> usize {
        h.iter()
            .enumerate()
            .fold((0, -1.0), |b, (i, z)| if z.norm() > b.1 { (i, z.norm()) } else { b })
            .0
    }

    #[test]
    fn round_trip_peaks_on_grid() {
        let (a, _) = nyquist_case();
        for f0 in [0, 3, a.cols() / 2, a.cols() - 1] {
            let mut h = vec![C64::new(0.0, 0.0); a.cols()];
            h[f0] = C64::new(1.0, 0.0);
            let y = forward(&a, &h).unwrap();
            assert_eq!(argmax(&invert(&a, &y, Inversion::Matched).unwrap()), f0);
            assert_eq!(argmax(&invert(&a, &y, Inversion::Pinv { reg: 1e-3 }).unwrap()), f0);
        }
        let zero = invert(&a, &vec![C64::new(0.0, 0.0); a.rows()], Inversion::Matched).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn two_sources_resolve() {
        let (a, res) = nyquist_case();
        let step = a.z_grid[1] - a.z_grid[0];
        let sep = (2.0 * res / step).ceil() as usize;
        let (f1, f2) = (5, 5 + sep);
        let mut h = vec![C64::new(0.0, 0.0); a.cols()];
        h[f1] = C64::new(1.0, 0.0);
        h[f2] = C64::new(1.0, 0.0);
        let m: Vec<f64> = invert(&a, &forward(&a, &h).unwrap(), Inversion::Matched)
            .unwrap()
            .iter()
            .map(|z| z.norm())
            .collect();
        let maxima: Vec<usize> = (1..m.len() - 1).filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1] && m[i] > 0.5).collect();
        assert_eq!(maxima.len(), 2, "{maxima:?}");
        assert!(maxima[0].abs_diff(f1) <= 1 && maxima[1].abs_diff(f2) <= 1);
    }

    #[test]
    fn matched_equals_brute_force_dft() {
        let (a, _) = nyquist_case();
        let y: Vec<C64> = (0..a.rows()).map(|i| C64::new((i as f64 * 0.9).cos(), (i as f64 * 0.31).sin())).collect();
        let h = invert(&a, &y, Inversion::Matched).unwrap();
        for (j, &z) in a.z_grid.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (i, &k) in a.kz.iter().enumerate() {
                acc += y[i] * C64::new((k * z).cos(), -(k * z).sin());
            }
            acc /= a.rows() as f64;
            assert!((h[j] - acc).norm() <= 1e-10 * acc.norm().max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn pinv_recovers_and_checks_conditioning() {
        let z: Vec<f64> = (0..8).map(|i| i as f64 * 0.8).collect();
        let a = uniform_matrix(16, 2.0 * PI / (16.0 * 0.8), &z);
        let h: Vec<C64> = (0..8).map(|i| C64::new(i as f64 - 3.0, 0.5 * i as f64)).collect();
        let back = invert(&a, &forward(&a, &h).unwrap(), Inversion::Pinv { reg: 1e-9 }).unwrap();
        let norm: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = h.iter().zip(&back).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm < 1e-6);
        // More depths than observations: singular without regularization.
        let wide = uniform_matrix(4, 0.5, &(0..12).map(|i| i as f64 * 0.3).collect::<Vec<_>>());
        let y = vec![C64::new(1.0, 0.0); 4];
        assert!(matches!(invert(&wide, &y, Inversion::Pinv { reg: 0.0 }), Err(Error::IllConditioned { .. })));
        assert!(invert(&wide, &y, Inversion::Pinv { reg: 1e-2 }).is_ok());
    }

    #[test]
    fn matched_point_response_width_tracks_resolution() {
        // Mainlobe -3 dB width is 0.886 (k-1)/k sin(theta) of the formula,
        // so the comparison is made at steep incidence.
        let g = TomoGeometry {
            sound_wavelength: 0.48,
            slant_range: 650_000.0,
            incidence: 75f64.to_radians(),
            aperture: 42000.0,
        };
        let k = 16;
        let kz = g.wavenumbers(k).unwrap();
        let res = g.resolution().unwrap();
        let step = res / 200.0;
        let z = depth_grid(0.0, 3.0 * res, step).unwrap();
        let a = steering(&kz, &z).unwrap();
        let y = forward(&a, &{
            let mut h = vec![C64::new(0.0, 0.0); z.len()];
            h[0] = C64::new(1.0, 0.0);
            h
        })
        .unwrap();
        let m: Vec<f64> = invert(&a, &y, Inversion::Matched).unwrap().iter().map(|z| z.norm()).collect();
        let half = m.iter().position(|&v| v < std::f64::consts::FRAC_1_SQRT_2).unwrap() as f64 * step;
        let width = 2.0 * half;
        assert!((width / res - 1.0).abs() < 0.25, "{width} vs {res}");
    }

    #[test]
    fn tomogram_rejects_coarse_grid_and_handles_empty_line() {
        use crate::radar::RadarConfig;
        use crate::sim::{synthesize_slc, Synthesizer};
        use crate::subaperture::allocate_bands;
        let s = Synthesizer::for_acquisition(RadarConfig::default(), 2.0).unwrap();
        let img = synthesize_slc(&s, &[], 32, 64).unwrap();
        let plan = allocate_bands(img.meta.doppler_band, 4, 0.5).unwrap();
        let params = TomoParams {
            geometry: TomoGeometry {
                sound_wavelength: 0.48,
                slant_range: 650_000.0,
                incidence: PI / 6.0,
                aperture: 42000.0,
            },
            mode: Inversion::Matched,
            track: TrackParams::default(),
            taper: Taper::Rectangular,
        };
        let t = build_tomogram(&img, &[], &plan, &[0.0, 1.0, 2.0], &params).unwrap();
        assert!(t.is_empty());
        assert!(build_tomogram(&img, &[], &plan, &[0.0, 2.0], &params).is_err());
        // Zero image: every patch is degenerate, so the column is flagged.
        let t = build_tomogram(&img, &[(16, 32)], &plan, &[0.0, 1.0], &params).unwrap();
        assert!(t.columns[0].error.is_some());
        assert!(t.columns[0].h.iter().all(|z| z.norm() == 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn inversion_is_linear(re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0u32..1000) {
            let z: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
            let a = uniform_matrix(8, 0.7, &z);
            let y: Vec<C64> = (0..8).map(|i| C64::new(((seed + i) as f64).sin(), ((seed * 3 + i) as f64).cos())).collect();
            let c = C64::new(re, im);
            let ys: Vec<C64> = y.iter().map(|v| v * c).collect();
            for mode in [Inversion::Matched, Inversion::Pinv { reg: 1e-6 }] {
                let h = invert(&a, &y, mode).unwrap();
                let hs = invert(&a, &ys, mode).unwrap();
                for (p, q) in h.iter().zip(&hs) {
                    prop_assert!((p * c - q).norm() <= 1e-9 * (1.0 + q.norm()));
                }
            }
        }
    }
}

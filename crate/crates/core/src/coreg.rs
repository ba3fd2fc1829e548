//! Sub-pixel offset tracking between master and slave sub-apertures.
//!
//! Master and slave occupy disjoint Doppler bands, so their raw complex
//! cross-correlation vanishes. Each patch is first demodulated to baseband
//! using the band centers in its metadata; the cross-power spectrum is then
//! zero-padded by the oversampling factor, transformed back, and the
//! magnitude peak refined with a 3-point parabola on each axis.
//!
//! A positive shift means the slave content sits at larger sample indices
//! than the master. Shifts `(a, b)` (range, azimuth) become the phasor
//! `a + j b`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::image::{Raster, SlcImage};
use crate::metrics::parabolic_offset;
use crate::subaperture::SubApertureBank;
use crate::C64;

pub const DEFAULT_WINDOW: usize = 32;
pub const DEFAULT_OVERSAMPLE: usize = 16;
/// Entries whose quality falls below this are flagged suspect.
pub const SUSPECT_QUALITY: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftEstimate {
    /// Range shift, samples.
    pub range: f64,
    /// Azimuth shift, samples.
    pub azimuth: f64,
    /// Normalized correlation peak in `[0, 1]`.
    pub quality: f64,
}

impl ShiftEstimate {
    pub fn is_suspect(&self) -> bool {
        self.quality < SUSPECT_QUALITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackParams {
    /// Square window edge, samples.
    pub window: usize,
    pub oversample: usize,
}

impl Default for TrackParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            oversample: DEFAULT_OVERSAMPLE,
        }
    }
}

fn demodulated(img: &SlcImage) -> Raster<C64> {
    let fr = img.meta.range_band.center;
    let fa = img.meta.doppler_band.center;
    let cols = img.cols();
    let mut out = img.data.clone();
    for (i, z) in out.as_mut_slice().iter_mut().enumerate() {
        let (k, x) = ((i / cols) as f64, (i % cols) as f64);
        *z *= C64::from_polar(1.0, -2.0 * PI * (fr * k + fa * x));
    }
    out
}

/// Pads a 2-D spectrum by `factor` on both axes, splitting Nyquist bins.
fn pad_2d(spec: &Raster<C64>, factor: usize) -> Raster<C64> {
    let (rows, cols) = (spec.rows(), spec.cols());
    let padded_rows: Vec<Vec<C64>> = (0..rows)
        .map(|r| fft::zero_pad_spectrum(spec.row(r), factor))
        .collect();
    let (pr, pc) = (rows * factor, cols * factor);
    let mut out = Raster::filled(pr, pc, C64::new(0.0, 0.0));
    for c in 0..pc {
        let column: Vec<C64> = padded_rows.iter().map(|row| row[c]).collect();
        for (r, v) in fft::zero_pad_spectrum(&column, factor).into_iter().enumerate() {
            *out.get_mut(r, c) = v;
        }
    }
    out
}

/// Offset of `slave` relative to `master`.
pub fn estimate_shift(master: &SlcImage, slave: &SlcImage, oversample: usize) -> Result<ShiftEstimate> {
    let (rows, cols) = (master.rows(), master.cols());
    if (slave.rows(), slave.cols()) != (rows, cols) {
        return Err(Error::Dimension {
            expected: format!("{rows}x{cols}"),
            actual: format!("{}x{}", slave.rows(), slave.cols()),
        });
    }
    if rows < 16 || cols < 16 {
        return Err(Error::InvalidArgument(format!("patches must be at least 16x16, got {rows}x{cols}")));
    }
    if oversample < 2 || !oversample.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "oversample must be a power of two >= 2, got {oversample}"
        )));
    }
    let (em, es) = (master.energy(), slave.energy());
    if em == 0.0 || es == 0.0 {
        return Err(Error::DegenerateInput("patch has zero energy".into()));
    }
    let mut m = demodulated(master);
    let mut s = demodulated(slave);
    fft::fft2(&mut m, false);
    fft::fft2(&mut s, false);
    let cross: Vec<C64> = s.as_slice().iter().zip(m.as_slice()).map(|(a, b)| a * b.conj()).collect();
    let mut corr = pad_2d(&Raster::from_vec(rows, cols, cross)?, oversample);
    fft::fft2(&mut corr, true);
    let mag = corr.map(|z| z.norm());
    let (pr, pc) = (mag.rows(), mag.cols());
    let (idx, peak) = mag
        .as_slice()
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let (r0, c0) = (idx / pc, idx % pc);
    let at = |r: usize, c: usize| *mag.get(r % pr, c % pc);
    let dr = parabolic_offset(at(r0 + pr - 1, c0), peak, at(r0 + 1, c0));
    let dc = parabolic_offset(at(r0, c0 + pc - 1), peak, at(r0, c0 + 1));
    let signed = |i: usize, n: usize| if i >= n / 2 { i as f64 - n as f64 } else { i as f64 };
    let f = oversample as f64;
    // The padded inverse carries an extra 1/factor^2.
    let quality = (peak * f * f / (em * es).sqrt()).clamp(0.0, 1.0);
    Ok(ShiftEstimate {
        range: (signed(r0, pr) + dr) / f,
        azimuth: (signed(c0, pc) + dc) / f,
        quality,
    })
}

/// Per-band shifts at one pixel. An entry is `None` when its estimate
/// failed (for example a zero-energy patch).
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationTrack {
    pub pixel: (usize, usize),
    pub entries: Vec<Option<ShiftEstimate>>,
}

impl VibrationTrack {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn missing(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.is_none().then_some(i))
            .collect()
    }
}

/// Top-left corner of the `window` centred at `pixel`, if it fits.
fn window_origin(pixel: (usize, usize), window: usize, rows: usize, cols: usize) -> Result<(usize, usize)> {
    let (row, col) = pixel;
    let half = window / 2;
    if row < half || col < half || row - half + window > rows || col - half + window > cols {
        return Err(Error::WindowClipped {
            row,
            col,
            window,
            rows,
            cols,
        });
    }
    Ok((row - half, col - half))
}

/// Tracks each pixel across every master/slave pair of `bank`. Results
/// follow the input pixel order; a pixel whose window does not fit gets an
/// error entry without affecting the others.
pub fn track_pixels(bank: &SubApertureBank, pixels: &[(usize, usize)], params: TrackParams) -> Vec<Result<VibrationTrack>> {
    if bank.is_empty() {
        return pixels
            .iter()
            .map(|_| Err(Error::InvalidArgument("empty sub-aperture bank".into())))
            .collect();
    }
    let (rows, cols) = (bank.master[0].rows(), bank.master[0].cols());
    pixels
        .par_iter()
        .map(|&p| {
            let (r0, c0) = window_origin(p, params.window, rows, cols)?;
            let entries = (0..bank.len())
                .into_par_iter()
                .map(|i| {
                    let w = params.window;
                    let m = bank.master[i].window(r0, c0, w, w).ok()?;
                    let s = bank.slave[i].window(r0, c0, w, w).ok()?;
                    estimate_shift(&m, &s, params.oversample).ok()
                })
                .collect();
            Ok(VibrationTrack { pixel: p, entries })
        })
        .collect()
}

/// The data vector `y_i = a_i + j b_i` of a complete track.
pub fn phasor_series(track: &VibrationTrack) -> Result<Vec<C64>> {
    let missing = track.missing();
    if !missing.is_empty() {
        return Err(Error::Assembly { missing });
    }
    Ok(track
        .entries
        .iter()
        .flatten()
        .map(|e| C64::new(e.range, e.azimuth))
        .collect())
}

/// Parses a pixel list: one `row,col` pair per line, with an optional
/// `row,col` header line. Blank lines and `#` comments are skipped.
pub fn parse_pixel_csv(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(idx + 1, format!("expected row,col, found {line:?}")));
        }
        if out.is_empty() && fields == ["row", "col"] {
            continue;
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(idx + 1, format!("bad pixel index {s:?}")))
        };
        out.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(out)
}

/// CSV rows `row,col,band_index,a,b,quality` for each track entry; failed
/// entries and failed pixels are written with `NaN` fields.
pub fn tracks_to_csv(pixels: &[(usize, usize)], tracks: &[Result<VibrationTrack>], n_bands: usize) -> String {
    let mut out = String::from("row,col,band_index,a,b,quality\n");
    for (p, t) in pixels.iter().zip(tracks) {
        for i in 0..n_bands {
            let e = t.as_ref().ok().and_then(|t| t.entries.get(i).copied().flatten());
            match e {
                Some(e) => out.push_str(&format!("{},{},{i},{},{},{}\n", p.0, p.1, e.range, e.azimuth, e.quality)),
                None => out.push_str(&format!("{},{},{i},NaN,NaN,NaN\n", p.0, p.1)),
            }
        }
    }
    out
}

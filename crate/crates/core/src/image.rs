//! Raster containers.
//!
//! Axis convention: rows are range samples (`k`), columns are azimuth
//! samples (`x`). Data is stored row-major.
//!
//! Band centers and widths are normalized frequencies in cycles per sample,
//! so a fully sampled axis has support `[-0.5, 0.5)`.

use crate::error::{Error, Result};
use crate::fft;
use crate::C64;

/// Tolerance, in bins, used when deciding whether a bin center sits on a
/// band edge.
const EDGE_EPS: f64 = 1e-9;

/// A frequency band `[center - width/2, center + width/2)` in cycles/sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center: f64,
    pub width: f64,
}

impl Band {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    pub fn lower(&self) -> f64 {
        self.center - self.width / 2.0
    }

    pub fn upper(&self) -> f64 {
        self.center + self.width / 2.0
    }

    /// Whether the bin with signed index `bin` on an `n`-point axis lies in
    /// the band. The lower edge is inclusive and the upper edge exclusive,
    /// so two bands that share an edge partition the bins between them.
    pub fn contains_bin(&self, bin: i64, n: usize) -> bool {
        let x = bin as f64;
        let lo = self.lower() * n as f64;
        let hi = self.upper() * n as f64;
        x > lo - EDGE_EPS && x < hi - EDGE_EPS
    }

    /// Signed bin indices inside the band, ascending.
    pub fn bins(&self, n: usize) -> Vec<i64> {
        let lo = (self.lower() * n as f64).floor() as i64 - 1;
        let hi = (self.upper() * n as f64).ceil() as i64 + 1;
        let half_lo = -((n / 2) as i64);
        let half_hi = ((n - 1) / 2) as i64;
        (lo.max(half_lo)..=hi.min(half_hi))
            .filter(|&b| self.contains_bin(b, n))
            .collect()
    }

    /// The contiguous band of `count` bins centred as close to zero
    /// frequency as the bin grid allows.
    pub fn centered(count: usize, n: usize) -> Self {
        let lo = -((count / 2) as i64);
        let hi = lo + count as i64 - 1;
        Self {
            center: (lo + hi) as f64 / (2.0 * n as f64),
            width: count as f64 / n as f64,
        }
    }

    fn is_valid(&self) -> bool {
        self.center.is_finite() && self.width.is_finite() && self.width > 0.0 && self.width <= 1.0
    }
}

/// Signed frequency index of storage index `i` on an `n`-point FFT axis.
pub fn signed_bin(i: usize, n: usize) -> i64 {
    if i <= (n - 1) / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Storage index of signed bin `b` on an `n`-point axis.
pub fn storage_index(b: i64, n: usize) -> usize {
    b.rem_euclid(n as i64) as usize
}

/// A dense row-major raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Raster<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

impl<T> Raster<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "raster must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: format!("{} samples", rows * cols),
                actual: format!("{} samples", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.cols + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Raster<U> {
        Raster {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Copy> Raster<T> {
    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.data[r * self.cols + col]).collect()
    }
}

/// Sampling and band metadata carried by every SLC raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlcMeta {
    /// Meters per range sample.
    pub range_spacing: f64,
    /// Meters per azimuth sample.
    pub azimuth_spacing: f64,
    /// Azimuth (Doppler) band, cycles per azimuth sample.
    pub doppler_band: Band,
    /// Range band, cycles per range sample.
    pub range_band: Band,
    /// Radar wavelength, meters.
    pub wavelength: f64,
}

impl SlcMeta {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("range_spacing", self.range_spacing),
            ("azimuth_spacing", self.azimuth_spacing),
            ("wavelength", self.wavelength),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !self.doppler_band.is_valid() || !self.range_band.is_valid() {
            return Err(Error::InvalidArgument(format!(
                "band widths must lie in (0, 1] cycles/sample: doppler {:?}, range {:?}",
                self.doppler_band, self.range_band
            )));
        }
        Ok(())
    }
}

/// Single-look-complex image.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcImage {
    pub data: Raster<C64>,
    pub meta: SlcMeta,
}

impl SlcImage {
    pub fn new(data: Raster<C64>, meta: SlcMeta) -> Result<Self> {
        meta.validate()?;
        Ok(Self { data, meta })
    }

    pub fn zeros(rows: usize, cols: usize, meta: SlcMeta) -> Result<Self> {
        Self::new(Raster::from_vec(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])?, meta)
    }

    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    pub fn cols(&self) -> usize {
        self.data.cols()
    }

    pub fn at(&self, row: usize, col: usize) -> C64 {
        *self.data.get(row, col)
    }

    pub fn energy(&self) -> f64 {
        self.data.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn magnitude(&self) -> Raster<f64> {
        self.data.map(|z| z.norm())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
            meta: self.meta,
        }
    }

    /// Copies out the `rows x cols` window whose top-left sample is
    /// `(row0, col0)`. Metadata is inherited.
    pub fn window(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || row0 + rows > self.rows() || col0 + cols > self.cols() {
            return Err(Error::InvalidArgument(format!(
                "window {rows}x{cols} at ({row0}, {col0}) exceeds {}x{} raster",
                self.rows(),
                self.cols()
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in row0..row0 + rows {
            data.extend_from_slice(&self.data.row(r)[col0..col0 + cols]);
        }
        Ok(Self {
            data: Raster::from_vec(rows, cols, data)?,
            meta: self.meta,
        })
    }

    /// Forward 2-D DFT (unnormalized).
    pub fn spectrum(&self) -> Spectrum {
        let mut data = self.data.clone();
        fft::fft2(&mut data, false);
        Spectrum {
            data,
            meta: self.meta,
        }
    }

    /// Root-mean-square difference to another image of the same size.
    pub fn rms_diff(&self, other: &SlcImage) -> f64 {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        let s: f64 = self
            .data
            .as_slice()
            .iter()
            .zip(other.data.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s / self.data.len() as f64).sqrt()
    }
}

/// 2-D spectrum of an [`SlcImage`], bins in FFT storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub data: Raster<C64>,
    pub meta: SlcMeta,
}

impl Spectrum {
    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    pub fn cols(&self) -> usize {
        self.data.cols()
    }

    /// Inverse 2-D DFT, normalized so that `spectrum().to_image()` is the
    /// identity.
    pub fn to_image(&self) -> SlcImage {
        let mut data = self.data.clone();
        fft::fft2(&mut data, true);
        SlcImage {
            data,
            meta: self.meta,
        }
    }

    /// Image-domain energy computed from the spectrum (Parseval).
    pub fn energy(&self) -> f64 {
        let s: f64 = self.data.as_slice().iter().map(|z| z.norm_sqr()).sum();
        s / self.data.len() as f64
    }

    /// Value at signed bins `(range_bin, doppler_bin)`.
    pub fn at_signed(&self, range_bin: i64, doppler_bin: i64) -> C64 {
        *self.data.get(
            storage_index(range_bin, self.rows()),
            storage_index(doppler_bin, self.cols()),
        )
    }
}

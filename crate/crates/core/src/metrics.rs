//! Impulse-response measurements: peak location, mainlobe width and
//! sidelobe level.
//!
//! Cuts are band-limited interpolated before measuring, so widths and
//! positions are resolved well below one sample.

use crate::fft;
use crate::image::{Raster, SlcImage};
use crate::C64;

/// Interpolation factor applied to cuts before measuring.
pub const UPSAMPLE: usize = 16;

/// Integer location and magnitude of the largest sample.
pub fn peak(img: &SlcImage) -> (usize, usize, f64) {
    let cols = img.cols();
    let (idx, mag) = img
        .data
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    (idx / cols, idx % cols, mag)
}

/// Whether `(row, col)` is no smaller than its 8 neighbours.
pub fn is_local_max(mag: &Raster<f64>, row: usize, col: usize) -> bool {
    let v = *mag.get(row, col);
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            let (r, c) = (row as i64 + dr, col as i64 + dc);
            if (dr, dc) == (0, 0) || r < 0 || c < 0 || r >= mag.rows() as i64 || c >= mag.cols() as i64 {
                continue;
            }
            if *mag.get(r as usize, c as usize) > v {
                return false;
            }
        }
    }
    true
}

/// Three-point parabolic vertex offset in `[-0.5, 0.5]` around the middle
/// sample.
pub fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom.abs() < f64::MIN_POSITIVE {
        0.0
    } else {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    }
}

fn magnitudes(cut: &[C64]) -> Vec<f64> {
    fft::upsample(cut, UPSAMPLE).iter().map(|z| z.norm()).collect()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &m)| if m > b.1 { (i, m) } else { b })
        .0
}

/// Sub-sample peak position of a 1-D cut, in input samples.
pub fn subsample_peak(cut: &[C64]) -> f64 {
    let m = magnitudes(cut);
    let n = m.len();
    let i = argmax(&m);
    let off = parabolic_offset(m[(i + n - 1) % n], m[i], m[(i + 1) % n]);
    (i as f64 + off) / UPSAMPLE as f64
}

/// Width in samples of the mainlobe of `cut` where its power stays above
/// `level_db` (negative) relative to the peak.
pub fn mainlobe_width(cut: &[C64], level_db: f64) -> f64 {
    let m = magnitudes(cut);
    let n = m.len();
    let i = argmax(&m);
    let threshold = m[i] * 10f64.powf(level_db / 20.0);
    let crossing = |dir: i64| -> f64 {
        let mut prev = m[i];
        for step in 1..n {
            let j = (i as i64 + dir * step as i64).rem_euclid(n as i64) as usize;
            if m[j] < threshold {
                let frac = (prev - threshold) / (prev - m[j]);
                return step as f64 - 1.0 + frac;
            }
            prev = m[j];
        }
        n as f64
    };
    (crossing(-1) + crossing(1)) / UPSAMPLE as f64
}

/// Level in dB, relative to the peak, of the highest sidelobe adjacent to
/// the mainlobe on either side.
pub fn first_sidelobe_db(cut: &[C64]) -> f64 {
    let m = magnitudes(cut);
    let n = m.len();
    let i = argmax(&m);
    let at = |k: i64| m[(i as i64 + k).rem_euclid(n as i64) as usize];
    let side = |dir: i64| -> f64 {
        let mut k = 1;
        while (k as usize) < n / 2 && at(dir * (k + 1)) < at(dir * k) {
            k += 1;
        }
        let mut best = at(dir * k);
        while (k as usize) < n / 2 && at(dir * (k + 1)) >= at(dir * k) {
            k += 1;
            best = best.max(at(dir * k));
        }
        best
    };
    20.0 * (side(-1).max(side(1)) / m[i]).log10()
}

/// Azimuth cut through the peak sample.
pub fn azimuth_cut(img: &SlcImage) -> Vec<C64> {
    let (r, _, _) = peak(img);
    img.data.row(r).to_vec()
}

/// Range cut through the peak sample.
pub fn range_cut(img: &SlcImage) -> Vec<C64> {
    let (_, c, _) = peak(img);
    img.data.column(c)
}

pub fn azimuth_width(img: &SlcImage, level_db: f64) -> f64 {
    mainlobe_width(&azimuth_cut(img), level_db)
}

pub fn range_width(img: &SlcImage, level_db: f64) -> f64 {
    mainlobe_width(&range_cut(img), level_db)
}

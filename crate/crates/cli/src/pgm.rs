//! Binary portable graymap output for magnitude images.

use mmtomo::image::Raster;

/// Dynamic range mapped onto the gray scale.
pub const FLOOR_DB: f64 = -60.0;

/// Encodes a magnitude raster as 8-bit P5, scaled linearly in dB from
/// `FLOOR_DB` (black) to the raster maximum (white). An all-zero raster
/// comes out black.
pub fn encode_pgm(magnitude: &Raster<f64>) -> Vec<u8> {
    let max = magnitude.as_slice().iter().fold(0.0f64, |m, &v| m.max(v));
    let mut out = format!("P5\n{} {}\n255\n", magnitude.cols(), magnitude.rows()).into_bytes();
    out.extend(magnitude.as_slice().iter().map(|&v| {
        if max <= 0.0 || v <= 0.0 {
            return 0u8;
        }
        let db = (20.0 * (v / max).log10()).max(FLOOR_DB);
        ((db - FLOOR_DB) / -FLOOR_DB * 255.0).round() as u8
    }));
    out
}

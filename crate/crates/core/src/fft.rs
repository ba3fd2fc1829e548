//! Thin wrappers over `rustfft` for row/column passes on rasters.
//!
//! Forward transforms are unnormalized; inverse transforms divide by the
//! number of points so that a forward/inverse pair is the identity.

use rustfft::FftPlanner;

use crate::image::{signed_bin, storage_index, Raster};
use crate::C64;

/// In-place 1-D transform.
pub fn fft1(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    plan.process(buf);
    if inverse {
        let s = 1.0 / n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

/// In-place 2-D transform over both axes.
pub fn fft2(raster: &mut Raster<C64>, inverse: bool) {
    let (rows, cols) = (raster.rows(), raster.cols());
    let mut planner = FftPlanner::<f64>::new();
    let (row_plan, col_plan) = if inverse {
        (planner.plan_fft_inverse(cols), planner.plan_fft_inverse(rows))
    } else {
        (planner.plan_fft_forward(cols), planner.plan_fft_forward(rows))
    };
    let data = raster.as_mut_slice();
    // Rows are contiguous; process them all in one call.
    row_plan.process(data);
    let mut column = vec![C64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_plan.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
    if inverse {
        let s = 1.0 / (rows * cols) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Copies a spectrum of length `n` into a zero-padded spectrum of length
/// `n * factor`, splitting the Nyquist bin of even-length inputs evenly
/// between the positive and negative halves.
pub fn zero_pad_spectrum(spec: &[C64], factor: usize) -> Vec<C64> {
    let n = spec.len();
    let m = n * factor;
    let mut out = vec![C64::new(0.0, 0.0); m];
    for (i, &v) in spec.iter().enumerate() {
        let b = signed_bin(i, n);
        if n % 2 == 0 && b == -((n / 2) as i64) && factor > 1 {
            out[storage_index(b, m)] += v * 0.5;
            out[storage_index(-b, m)] += v * 0.5;
        } else {
            out[storage_index(b, m)] += v;
        }
    }
    out
}

/// Band-limited (trigonometric) interpolation of a periodic sequence by an
/// integer factor. Sample `j * factor` of the result equals input sample `j`.
pub fn upsample(signal: &[C64], factor: usize) -> Vec<C64> {
    let mut spec = signal.to_vec();
    fft1(&mut spec, false);
    let mut padded = zero_pad_spectrum(&spec, factor);
    fft1(&mut padded, true);
    let s = factor as f64;
    padded.iter_mut().for_each(|z| *z *= s);
    padded
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(n: usize) -> Vec<C64> {
        (0..n)
            .map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect()
    }

    #[test]
    fn round_trip_2d() {
        let data = signal(6 * 10);
        let mut r = Raster::from_vec(6, 10, data.clone()).unwrap();
        fft2(&mut r, false);
        fft2(&mut r, true);
        for (a, b) in r.as_slice().iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn fft2_matches_direct_dft() {
        let (rows, cols) = (3usize, 4usize);
        let data = signal(rows * cols);
        let mut r = Raster::from_vec(rows, cols, data.clone()).unwrap();
        fft2(&mut r, false);
        for p in 0..rows {
            for q in 0..cols {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..rows {
                    for x in 0..cols {
                        let ph = -2.0
                            * std::f64::consts::PI
                            * ((p * k) as f64 / rows as f64 + (q * x) as f64 / cols as f64);
                        acc += data[k * cols + x] * C64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - r.get(p, q)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn upsample_keeps_original_samples() {
        let s = signal(16);
        let up = upsample(&s, 4);
        assert_eq!(up.len(), 64);
        for (j, v) in s.iter().enumerate() {
            assert!((up[4 * j] - v).norm() < 1e-12);
        }
    }
}

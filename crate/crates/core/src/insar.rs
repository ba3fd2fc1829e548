//! Repeat-pass interferometric phase and coherence.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{Raster, SlcImage};
use crate::C64;

pub const DEFAULT_WINDOW: usize = 5;

/// Wraps a phase into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let w = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn check_pair(master: &SlcImage, slave: &SlcImage) -> Result<()> {
    if (master.rows(), master.cols()) != (slave.rows(), slave.cols()) {
        return Err(Error::Dimension {
            expected: format!("{}x{}", master.rows(), master.cols()),
            actual: format!("{}x{}", slave.rows(), slave.cols()),
        });
    }
    Ok(())
}

/// `arg(master * conj(slave))` per pixel.
pub fn interferogram(master: &SlcImage, slave: &SlcImage) -> Result<Raster<f64>> {
    check_pair(master, slave)?;
    let data = master
        .data
        .as_slice()
        .iter()
        .zip(slave.data.as_slice())
        .map(|(m, s)| wrap_phase((m * s.conj()).arg()))
        .collect();
    Raster::from_vec(master.rows(), master.cols(), data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coherence {
    pub values: Raster<f64>,
    /// Set where the window held no energy in either image; the value
    /// there is 0.
    pub zero_energy: Raster<bool>,
}

/// Boxcar coherence over an odd `window`; edge windows are clipped to the
/// raster.
pub fn coherence(master: &SlcImage, slave: &SlcImage, window: usize) -> Result<Coherence> {
    check_pair(master, slave)?;
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidArgument(format!("coherence window must be odd and >= 3, got {window}")));
    }
    let (rows, cols) = (master.rows(), master.cols());
    let half = window / 2;
    let (m, s) = (&master.data, &slave.data);
    let cells: Vec<(f64, bool)> = (0..rows * cols)
        .into_par_iter()
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let (r0, r1) = (r.saturating_sub(half), (r + half + 1).min(rows));
            let (c0, c1) = (c.saturating_sub(half), (c + half + 1).min(cols));
            let mut cross = C64::new(0.0, 0.0);
            let (mut em, mut es) = (0.0, 0.0);
            for rr in r0..r1 {
                for cc in c0..c1 {
                    let (a, b) = (m.get(rr, cc), s.get(rr, cc));
                    cross += a * b.conj();
                    em += a.norm_sqr();
                    es += b.norm_sqr();
                }
            }
            if em == 0.0 || es == 0.0 {
                (0.0, true)
            } else {
                ((cross.norm() / (em * es).sqrt()).clamp(0.0, 1.0), false)
            }
        })
        .collect();
    Ok(Coherence {
        values: Raster::from_vec(rows, cols, cells.iter().map(|c| c.0).collect())?,
        zero_energy: Raster::from_vec(rows, cols, cells.iter().map(|c| c.1).collect())?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    pub phase: Raster<f64>,
    pub coherence: Coherence,
    pub window: usize,
}

pub fn interferogram_with_coherence(master: &SlcImage, slave: &SlcImage, window: usize) -> Result<Interferogram> {
    Ok(Interferogram {
        phase: interferogram(master, slave)?,
        coherence: coherence(master, slave, window)?,
        window,
    })
}

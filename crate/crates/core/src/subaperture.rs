//! Doppler sub-aperture decomposition.
//!
//! A fraction of the full Doppler band is reserved as sensitivity margin;
//! the retained width `W` is split into a master (lower) and slave (upper)
//! half, and that pair is rigidly shifted across the band in `n_steps`
//! equal steps of `W / n_steps`. Each band is extracted by zeroing the
//! azimuth spectrum outside it and transforming back, which coarsens the
//! azimuth resolution by the ratio of full to band width.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{storage_index, Band, SlcImage, Spectrum};
use crate::text::{Document, Writer};

/// Tolerance, in normalized frequency, for band-inside-support checks.
const SUPPORT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BandPlan {
    /// Full Doppler support, cycles per azimuth sample.
    pub full: Band,
    pub reserved_fraction: f64,
    pub n_steps: usize,
    /// Center spacing between consecutive pairs.
    pub step: f64,
    /// Master bands, ascending center frequency.
    pub master: Vec<Band>,
    /// Slave bands, ascending center frequency.
    pub slave: Vec<Band>,
}

impl BandPlan {
    /// Width excluded from the sub-apertures.
    pub fn reserved_width(&self) -> f64 {
        self.full.width * self.reserved_fraction
    }

    /// Width of each master+slave pair.
    pub fn retained_width(&self) -> f64 {
        self.full.width - self.reserved_width()
    }

    /// Center of pair `i` (the shared master/slave edge).
    pub fn pair_center(&self, i: usize) -> f64 {
        self.master[i].upper()
    }
}

/// Plans `n_steps` master/slave pairs over `full`.
pub fn allocate_bands(full: Band, n_steps: usize, reserved_fraction: f64) -> Result<BandPlan> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 sub-aperture steps are needed, got {n_steps}"
        )));
    }
    if !(reserved_fraction > 0.0 && reserved_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "reserved fraction must lie in (0, 1), got {reserved_fraction}"
        )));
    }
    if !(full.width > 0.0 && full.width <= 1.0 && full.center.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid Doppler support {full:?}")));
    }
    let retained = full.width * (1.0 - reserved_fraction);
    let step = retained / n_steps as f64;
    let half = retained / 2.0;
    let mut master = Vec::with_capacity(n_steps);
    let mut slave = Vec::with_capacity(n_steps);
    for i in 0..n_steps {
        let c = full.center + (i as f64 - (n_steps as f64 - 1.0) / 2.0) * step;
        master.push(Band::new(c - half / 2.0, half));
        slave.push(Band::new(c + half / 2.0, half));
    }
    for (i, (m, s)) in master.iter().zip(&slave).enumerate() {
        for (role, b) in [("master", m), ("slave", s)] {
            if b.lower() < full.lower() - SUPPORT_EPS || b.upper() > full.upper() + SUPPORT_EPS {
                return Err(Error::Allocation(format!(
                    "{role} band {i} [{}, {}) exceeds the Doppler support [{}, {})",
                    b.lower(),
                    b.upper(),
                    full.lower(),
                    full.upper()
                )));
            }
        }
    }
    Ok(BandPlan {
        full,
        reserved_fraction,
        n_steps,
        step,
        master,
        slave,
    })
}

/// Spectral weighting applied inside an extracted band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Taper {
    #[default]
    Rectangular,
    /// Raised cosine across the band, zero at both edges.
    RaisedCosine,
}

/// Keeps only the Doppler bins of `spec` inside `band` and returns the
/// corresponding image, annotated with `band`.
pub fn extract_subaperture(spec: &Spectrum, band: Band, taper: Taper) -> Result<SlcImage> {
    let support = spec.meta.doppler_band;
    if band.lower() < support.lower() - SUPPORT_EPS || band.upper() > support.upper() + SUPPORT_EPS {
        return Err(Error::InvalidArgument(format!(
            "band [{}, {}) lies outside the spectral support [{}, {})",
            band.lower(),
            band.upper(),
            support.lower(),
            support.upper()
        )));
    }
    let cols = spec.cols();
    let bins = band.bins(cols);
    if bins.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "band {band:?} contains no bins on a {cols}-point axis"
        )));
    }
    let mut weights = vec![0.0; cols];
    let k = bins.len() as f64;
    for (j, &b) in bins.iter().enumerate() {
        weights[storage_index(b, cols)] = match taper {
            Taper::Rectangular => 1.0,
            Taper::RaisedCosine => 0.5 - 0.5 * (2.0 * PI * (j as f64 + 0.5) / k).cos(),
        };
    }
    let mut out = spec.clone();
    for r in 0..out.rows() {
        for c in 0..cols {
            let w = weights[c];
            let z = out.data.get_mut(r, c);
            if w == 0.0 {
                *z = Default::default();
            } else if w != 1.0 {
                *z *= w;
            }
        }
    }
    out.meta.doppler_band = band;
    Ok(out.to_image())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubApertureBank {
    pub master: Vec<SlcImage>,
    pub slave: Vec<SlcImage>,
    pub plan: BandPlan,
}

impl SubApertureBank {
    pub fn len(&self) -> usize {
        self.master.len()
    }

    pub fn is_empty(&self) -> bool {
        self.master.is_empty()
    }

    /// Assembles a bank from already extracted images, checking that it is
    /// consistent with `plan`.
    pub fn from_parts(master: Vec<SlcImage>, slave: Vec<SlcImage>, plan: BandPlan) -> Result<Self> {
        if master.len() != plan.n_steps || slave.len() != plan.n_steps {
            return Err(Error::Dimension {
                expected: format!("{} master/slave pairs", plan.n_steps),
                actual: format!("{} master, {} slave", master.len(), slave.len()),
            });
        }
        let dims = (master[0].rows(), master[0].cols());
        for img in master.iter().chain(&slave) {
            if (img.rows(), img.cols()) != dims {
                return Err(Error::Dimension {
                    expected: format!("{}x{}", dims.0, dims.1),
                    actual: format!("{}x{}", img.rows(), img.cols()),
                });
            }
        }
        Ok(Self { master, slave, plan })
    }
}

/// Extracts every master and slave band of `plan` from `slc`.
/// Extractions run in parallel; the bank is in plan order.
pub fn build_bank(slc: &SlcImage, plan: &BandPlan, taper: Taper) -> Result<SubApertureBank> {
    let spec = slc.spectrum();
    let bands: Vec<Band> = plan.master.iter().chain(&plan.slave).copied().collect();
    let mut images = bands
        .par_iter()
        .map(|b| extract_subaperture(&spec, *b, taper))
        .collect::<Result<Vec<_>>>()?;
    let slave = images.split_off(plan.n_steps);
    SubApertureBank::from_parts(images, slave, plan.clone())
}

/// File names used for band `i` of a bank written to disk.
pub fn band_file_names(i: usize) -> (String, String) {
    (format!("m_{i}.slc"), format!("s_{i}.slc"))
}

/// Text description of a bank on disk: the plan plus the master and slave
/// file of each band, relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct BankManifest {
    pub plan: BandPlan,
    pub files: Vec<(String, String)>,
}

impl BankManifest {
    pub fn new(plan: BandPlan) -> Self {
        let files = (0..plan.n_steps).map(band_file_names).collect();
        Self { plan, files }
    }

    pub fn to_text(&self) -> String {
        let p = &self.plan;
        let mut w = Writer::new();
        w.kv("n_steps", p.n_steps)
            .kv("reserved_fraction", p.reserved_fraction)
            .kv("full_center", p.full.center)
            .kv("full_width", p.full.width)
            .kv("step", p.step);
        for (i, (m, s)) in self.files.iter().enumerate() {
            w.section("band")
                .kv("index", i)
                .kv("master_center", p.master[i].center)
                .kv("master_width", p.master[i].width)
                .kv("slave_center", p.slave[i].center)
                .kv("slave_width", p.slave[i].width)
                .kv("master", m)
                .kv("slave", s);
        }
        w.finish()
    }

    /// Parses a manifest. The plan is recomputed from the root keys and the
    /// per-band entries must agree with it, so a manifest cannot describe
    /// a bank the allocator would not produce.
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        doc.expect_sections(&["band"])?;
        let root = doc.root();
        let n_steps: usize = root.require("n_steps")?;
        if n_steps > 1 << 16 {
            return Err(Error::parse(root.line, format!("n_steps {n_steps} is unreasonably large")));
        }
        let full = Band::new(root.require("full_center")?, root.require("full_width")?);
        let plan = allocate_bands(full, n_steps, root.require("reserved_fraction")?)?;
        let bands: Vec<_> = doc.sections_named("band").collect();
        if bands.len() != n_steps {
            return Err(Error::parse(
                root.line,
                format!("expected {n_steps} [band] sections, found {}", bands.len()),
            ));
        }
        let mut files = Vec::with_capacity(n_steps);
        for (i, s) in bands.iter().enumerate() {
            let index: usize = s.require("index")?;
            if index != i {
                return Err(Error::parse(s.line, format!("band index {index} out of order, expected {i}")));
            }
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
            let m = Band::new(s.require("master_center")?, s.require("master_width")?);
            let sl = Band::new(s.require("slave_center")?, s.require("slave_width")?);
            let (pm, ps) = (plan.master[i], plan.slave[i]);
            if !(close(m.center, pm.center) && close(m.width, pm.width) && close(sl.center, ps.center) && close(sl.width, ps.width)) {
                return Err(Error::parse(s.line, format!("band {i} disagrees with the plan")));
            }
            let master: String = s.require("master")?;
            let slave: String = s.require("slave")?;
            for f in [&master, &slave] {
                if f.is_empty() || f.contains('/') || f.contains('\\') || f == ".." {
                    return Err(Error::parse(s.line, format!("file name {f:?} must be a bare name")));
                }
            }
            files.push((master, slave));
        }
        Ok(Self { plan, files })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use crate::radar::RadarConfig;
    use crate::sim::{synthesize_slc, SceneTarget, Synthesizer};

    fn synth() -> Synthesizer {
        Synthesizer::for_acquisition(RadarConfig::default(), 2.0).unwrap()
    }

    fn point_image(cols: usize) -> SlcImage {
        let s = synth();
        synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, 32.0, cols as f64 / 2.0, 1.0)], 64, cols).unwrap()
    }

    #[test]
    fn allocation_examples() {
        let plan = allocate_bands(Band::new(0.0, 1.0), 4, 0.5).unwrap();
        assert_eq!(plan.step, 0.125);
        assert_eq!(plan.master.len(), 4);
        let centers: Vec<f64> = (0..4).map(|i| plan.pair_center(i)).collect();
        for w in centers.windows(2) {
            assert!((w[1] - w[0] - 0.125).abs() < 1e-15);
        }
        assert!((centers.iter().sum::<f64>()).abs() < 1e-15);
        let plan = allocate_bands(Band::new(0.0, 1.0), 2, 0.5).unwrap();
        assert!((plan.pair_center(1) - plan.pair_center(0) - 0.25).abs() < 1e-15);
        assert!(allocate_bands(Band::new(0.0, 1.0), 4, 0.0).is_err());
        assert!(allocate_bands(Band::new(0.0, 1.0), 1, 0.5).is_err());
    }

    #[test]
    fn allocation_rejects_bands_outside_support() {
        // Little reserve and few steps push the outer pairs past the edge.
        match allocate_bands(Band::new(0.0, 1.0), 2, 0.1) {
            Err(Error::Allocation(msg)) => assert!(msg.contains("master band 0"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn master_and_slave_halves_partition_the_pair() {
        let plan = allocate_bands(Band::new(0.01, 0.5), 5, 0.5).unwrap();
        for (m, s) in plan.master.iter().zip(&plan.slave) {
            assert!((m.upper() - s.lower()).abs() < 1e-15);
            assert!((m.width + s.width - plan.retained_width()).abs() < 1e-15);
        }
    }

    #[test]
    fn full_band_extraction_is_identity() {
        let img = point_image(64);
        let out = extract_subaperture(&img.spectrum(), img.meta.doppler_band, Taper::Rectangular).unwrap();
        assert!(out.rms_diff(&img) < 1e-12);
    }

    #[test]
    fn half_band_doubles_mainlobe() {
        let img = point_image(256);
        let full = img.meta.doppler_band;
        let half = Band::new(full.center, full.width / 2.0);
        let sub = extract_subaperture(&img.spectrum(), half, Taper::Rectangular).unwrap();
        let ratio = metrics::azimuth_width(&sub, -3.0) / metrics::azimuth_width(&img, -3.0);
        assert!((ratio - 2.0).abs() / 2.0 < 0.1, "{ratio}");
    }

    #[test]
    fn disjoint_halves_reconstruct_and_split_energy() {
        let img = point_image(128);
        let full = img.meta.doppler_band;
        let lower = Band::new(full.lower() + full.width / 4.0, full.width / 2.0);
        let upper = Band::new(full.upper() - full.width / 4.0, full.width / 2.0);
        let spec = img.spectrum();
        let a = extract_subaperture(&spec, lower, Taper::Rectangular).unwrap();
        let b = extract_subaperture(&spec, upper, Taper::Rectangular).unwrap();
        let mut sum = a.clone();
        for (z, w) in sum.data.as_mut_slice().iter_mut().zip(b.data.as_slice()) {
            *z += w;
        }
        assert!(sum.rms_diff(&img) < 1e-10);
        assert!(a.energy() <= img.energy() && b.energy() <= img.energy());
        assert!(((a.energy() + b.energy()) - img.energy()).abs() / img.energy() < 1e-10);
        assert_eq!(a.meta.doppler_band, lower);
    }

    #[test]
    fn extraction_is_linear_and_validated() {
        let img = point_image(64);
        let band = Band::new(img.meta.doppler_band.center, 0.1);
        let c = crate::C64::new(0.3, -1.2);
        let a = extract_subaperture(&img.scaled(c).spectrum(), band, Taper::Rectangular).unwrap();
        let b = extract_subaperture(&img.spectrum(), band, Taper::Rectangular).unwrap().scaled(c);
        assert!(a.rms_diff(&b) < 1e-14);
        assert!(extract_subaperture(&img.spectrum(), Band::new(0.45, 0.2), Taper::Rectangular).is_err());
        assert!(extract_subaperture(&img.spectrum(), Band::new(0.001, 1e-4), Taper::Rectangular).is_err());
        let tapered = extract_subaperture(&img.spectrum(), band, Taper::RaisedCosine).unwrap();
        assert!(tapered.energy() < b.energy() / c.norm_sqr());
    }

    #[test]
    fn stationary_bank_peaks_coincide() {
        let img = point_image(128);
        let plan = allocate_bands(img.meta.doppler_band, 4, 0.5).unwrap();
        let bank = build_bank(&img, &plan, Taper::Rectangular).unwrap();
        assert_eq!(bank.len(), 4);
        for (i, m) in bank.master.iter().enumerate() {
            assert_eq!(m.meta.doppler_band, plan.master[i]);
            assert_eq!(bank.slave[i].meta.doppler_band, plan.slave[i]);
            let pos = metrics::subsample_peak(&metrics::azimuth_cut(m));
            assert!((pos - 64.0).abs() < 0.01, "band {i}: {pos}");
        }
    }

    #[test]
    fn manifest_round_trip_and_validation() {
        let plan = allocate_bands(Band::centered(128, 256), 4, 0.5).unwrap();
        let man = BankManifest::new(plan);
        let text = man.to_text();
        assert_eq!(BankManifest::parse(&text).unwrap(), man);
        assert!(BankManifest::parse(&text.replace("index = 2", "index = 3")).is_err());
        assert!(BankManifest::parse(&text.replace("m_1.slc", "../m_1.slc")).is_err());
        assert!(BankManifest::parse(&text.replace("n_steps = 4", "n_steps = 5")).is_err());
    }
}

//! On-disk raster formats.
//!
//! An SLC raster is a raw file of little-endian interleaved `f32` pairs
//! `(re, im)`, row-major, next to a mandatory sidecar header at
//! `<path>.hdr` holding `key = value` lines:
//!
//! ```text
//! rows = 64
//! cols = 64
//! range_spacing = 0.2998
//! azimuth_spacing = 0.1439
//! doppler_center = -0.0078125
//! doppler_width = 0.5
//! range_center = -0.0078125
//! range_width = 0.5
//! wavelength = 0.031
//! ```
//!
//! Floats are written in shortest round-trip form, so metadata survives a
//! write/read cycle bit-exactly. Real rasters (phase, coherence) use the same
//! layout with single `f32` samples and a header carrying `rows`, `cols` and
//! `kind`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{Band, Raster, SlcImage, SlcMeta};
use crate::text::{Document, Writer};
use crate::C64;

/// Upper bound on decoded sample counts, to keep hostile headers from
/// triggering huge allocations.
pub const MAX_SAMPLES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlcHeader {
    pub rows: usize,
    pub cols: usize,
    pub meta: SlcMeta,
}

impl SlcHeader {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        doc.expect_sections(&[])?;
        let root = doc.root();
        let rows: usize = root.require("rows")?;
        let cols: usize = root.require("cols")?;
        check_dims(rows, cols)?;
        let meta = SlcMeta {
            range_spacing: root.require("range_spacing")?,
            azimuth_spacing: root.require("azimuth_spacing")?,
            doppler_band: Band::new(root.require("doppler_center")?, root.require("doppler_width")?),
            range_band: Band::new(root.require("range_center")?, root.require("range_width")?),
            wavelength: root.require("wavelength")?,
        };
        meta.validate()?;
        Ok(Self { rows, cols, meta })
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        Writer::new()
            .kv("rows", self.rows)
            .kv("cols", self.cols)
            .kv("range_spacing", m.range_spacing)
            .kv("azimuth_spacing", m.azimuth_spacing)
            .kv("doppler_center", m.doppler_band.center)
            .kv("doppler_width", m.doppler_band.width)
            .kv("range_center", m.range_band.center)
            .kv("range_width", m.range_band.width)
            .kv("wavelength", m.wavelength)
            .finish()
    }

    pub fn byte_len(&self) -> u64 {
        self.rows as u64 * self.cols as u64 * 8
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "raster dimensions must be positive, got {rows}x{cols}"
        )));
    }
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_SAMPLES => Ok(()),
        _ => Err(Error::InvalidArgument(format!(
            "raster {rows}x{cols} exceeds the {MAX_SAMPLES}-sample limit"
        ))),
    }
}

/// Encodes the sample payload of an SLC raster.
pub fn encode_samples(img: &SlcImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.data.len() * 8);
    for z in img.data.as_slice() {
        out.extend_from_slice(&(z.re as f32).to_le_bytes());
        out.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    out
}

/// Decodes a header plus payload. Payloads whose length does not match the
/// header are rejected.
pub fn decode_slc(header_text: &str, payload: &[u8]) -> Result<SlcImage> {
    let header = SlcHeader::parse(header_text)?;
    if payload.len() as u64 != header.byte_len() {
        return Err(Error::SizeMismatch {
            expected: header.byte_len(),
            actual: payload.len() as u64,
        });
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            C64::new(re as f64, im as f64)
        })
        .collect();
    SlcImage::new(Raster::from_vec(header.rows, header.cols, data)?, header.meta)
}

pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

/// Serialized form of an SLC raster: `(payload, header text)`.
pub fn encode_slc(img: &SlcImage) -> (Vec<u8>, String) {
    let header = SlcHeader {
        rows: img.rows(),
        cols: img.cols(),
        meta: img.meta,
    };
    (encode_samples(img), header.to_text())
}

pub fn write_slc(path: &Path, img: &SlcImage) -> Result<()> {
    let (payload, header) = encode_slc(img);
    write_atomic(path, &payload)?;
    write_atomic(&header_path(path), header.as_bytes())
}

pub fn read_slc(path: &Path) -> Result<SlcImage> {
    let header = fs::read_to_string(header_path(path))?;
    let payload = fs::read(path)?;
    decode_slc(&header, &payload)
}

/// Real-valued raster file content: `(payload, header text)`.
pub fn encode_real(raster: &Raster<f64>, kind: &str) -> (Vec<u8>, String) {
    let mut payload = Vec::with_capacity(raster.len() * 4);
    for v in raster.as_slice() {
        payload.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    let header = Writer::new()
        .kv("rows", raster.rows())
        .kv("cols", raster.cols())
        .kv("kind", kind)
        .finish();
    (payload, header)
}

/// Decodes a real raster, returning it with its `kind` tag.
pub fn decode_real(header_text: &str, payload: &[u8]) -> Result<(Raster<f64>, String)> {
    let doc = Document::parse(header_text)?;
    doc.expect_sections(&[])?;
    let root = doc.root();
    let rows: usize = root.require("rows")?;
    let cols: usize = root.require("cols")?;
    check_dims(rows, cols)?;
    let kind: String = root.require("kind")?;
    let expected = rows as u64 * cols as u64 * 4;
    if payload.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: payload.len() as u64,
        });
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok((Raster::from_vec(rows, cols, data)?, kind))
}

pub fn write_real(path: &Path, raster: &Raster<f64>, kind: &str) -> Result<()> {
    let (payload, header) = encode_real(raster, kind);
    write_atomic(path, &payload)?;
    write_atomic(&header_path(path), header.as_bytes())
}

pub fn read_real(path: &Path) -> Result<(Raster<f64>, String)> {
    let header = fs::read_to_string(header_path(path))?;
    let payload = fs::read(path)?;
    decode_real(&header, &payload)
}

/// Writes `bytes` to a temporary sibling file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image() -> SlcImage {
        let meta = SlcMeta {
            range_spacing: 0.299_792_458,
            azimuth_spacing: 1.0 / 3.0,
            doppler_band: Band::new(-1.0 / 128.0, 0.5),
            range_band: Band::new(0.1, 0.3),
            wavelength: 0.031,
        };
        let data = (0..12).map(|i| C64::new(i as f64, -(i as f64) / 2.0)).collect();
        SlcImage::new(Raster::from_vec(3, 4, data).unwrap(), meta).unwrap()
    }

    #[test]
    fn round_trip_preserves_metadata_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.slc");
        let img = image();
        write_slc(&path, &img).unwrap();
        let back = read_slc(&path).unwrap();
        assert_eq!(back.meta, img.meta);
        assert_eq!(back.data, img.data);
        assert_eq!(fs::metadata(&path).unwrap().len(), 12 * 8);
    }

    #[test]
    fn rejects_size_mismatch() {
        let (payload, header) = encode_slc(&image());
        let err = decode_slc(&header, &payload[..payload.len() - 1]).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { expected: 96, actual: 95 }));
        let mut longer = payload.clone();
        longer.extend_from_slice(&[0; 8]);
        assert!(decode_slc(&header, &longer).is_err());
    }

    #[test]
    fn rejects_incomplete_or_hostile_headers() {
        assert!(SlcHeader::parse("rows = 2\ncols = 2\n").is_err());
        let (_, header) = encode_slc(&image());
        let huge = header.replace("rows = 3", "rows = 18446744073709551615");
        assert!(SlcHeader::parse(&huge).is_err());
        let bad_band = header.replace("doppler_width = 0.5", "doppler_width = 2");
        assert!(SlcHeader::parse(&bad_band).is_err());
    }

    #[test]
    fn real_raster_round_trip() {
        let r = Raster::from_vec(2, 3, vec![0.0, 0.5, -1.0, 3.25, 1.0, -0.125]).unwrap();
        let (payload, header) = encode_real(&r, "phase");
        let (back, kind) = decode_real(&header, &payload).unwrap();
        assert_eq!(back, r);
        assert_eq!(kind, "phase");
    }
}

//! Run manifests and staged artifact writes.
//!
//! A manifest lists the stage, every parameter it ran with, each input file
//! with its SHA-256 and each artifact with its SHA-256. Files are named
//! without their directory so that two runs into different output
//! directories produce identical manifests.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use mmtomo::image::{Raster, SlcImage};
use mmtomo::slc_io::{encode_real, encode_slc, header_path, write_atomic};
use mmtomo::text::Writer;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    stage: String,
    params: Vec<(String, String)>,
    inputs: Vec<(String, String, String)>,
}

impl Manifest {
    pub fn new(stage: &str) -> Self {
        Self {
            stage: stage.to_string(),
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// Records an input already read into memory.
    pub fn input(&mut self, role: &str, path: &Path, bytes: &[u8]) -> &mut Self {
        self.inputs.push((role.to_string(), file_name(path), sha256_hex(bytes)));
        self
    }

    fn to_text(&self, artifacts: &[(PathBuf, Vec<u8>)]) -> String {
        let mut w = Writer::new();
        w.kv("stage", &self.stage).kv("version", env!("CARGO_PKG_VERSION"));
        w.section("params");
        for (k, v) in &self.params {
            w.kv(k, v);
        }
        w.section("inputs");
        for (role, name, sha) in &self.inputs {
            w.kv(role, name).kv(&format!("{role}.sha256"), sha);
        }
        w.section("artifacts");
        for (path, bytes) in artifacts {
            w.kv(&file_name(path), sha256_hex(bytes));
        }
        w.finish()
    }
}

/// Reads a file, mapping failures to I/O errors that name the path.
pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

pub fn read_text_input(path: &Path) -> CliResult<String> {
    String::from_utf8(read_input(path)?).map_err(|_| CliError::config(format!("{} is not UTF-8 text", path.display())))
}

/// Artifacts staged in memory and written only once the stage has
/// succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn file(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    /// An SLC raster plus its sidecar header.
    pub fn slc(&mut self, path: PathBuf, img: &SlcImage) {
        let (payload, header) = encode_slc(img);
        self.file(header_path(&path), header.into_bytes());
        self.file(path, payload);
    }

    pub fn real(&mut self, path: PathBuf, raster: &Raster<f64>, kind: &str) {
        let (payload, header) = encode_real(raster, kind);
        self.file(header_path(&path), header.into_bytes());
        self.file(path, payload);
    }

    /// Writes every artifact and then the manifest, each atomically. If a
    /// write fails, files already written by this call are removed.
    pub fn commit(self, manifest: &Manifest, manifest_path: &Path) -> CliResult<()> {
        let text = manifest.to_text(&self.files);
        let mut all = self.files;
        all.push((manifest_path.to_path_buf(), text.into_bytes()));
        for dir in all.iter().filter_map(|(p, _)| p.parent()).filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        }
        for (i, (path, bytes)) in all.iter().enumerate() {
            if let Err(e) = write_atomic(path, bytes) {
                for (done, _) in &all[..i] {
                    let _ = fs::remove_file(done);
                }
                return Err(CliError::from(e).context(path.display()));
            }
        }
        Ok(())
    }
}

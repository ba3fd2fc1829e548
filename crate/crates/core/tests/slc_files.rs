use mmtomo::image::Raster;
use mmtomo::sim::{synthesize_slc, SceneTarget, Synthesizer};
use mmtomo::slc_io::{header_path, read_real, read_slc, write_real, write_slc};
use mmtomo::{Error, RadarConfig};

fn image() -> mmtomo::SlcImage {
    let s = Synthesizer::for_acquisition(RadarConfig::default(), 2.0).unwrap();
    synthesize_slc(&s, &[SceneTarget::at_sample(&s.grid, 7.3, 11.6, 2.0)], 16, 24).unwrap()
}

#[test]
fn slc_file_round_trip_keeps_metadata_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.slc");
    let img = image();
    write_slc(&path, &img).unwrap();
    assert!(header_path(&path).is_file());
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 16 * 24 * 8);
    let back = read_slc(&path).unwrap();
    assert_eq!(back.meta, img.meta);
    // Samples are stored as f32.
    for (a, b) in back.data.as_slice().iter().zip(img.data.as_slice()) {
        assert!((a - b).norm() <= 2.0 * f32::EPSILON as f64 * b.norm().max(1e-30) + 1e-37);
    }
    // A second write of the decoded image reproduces the same bytes.
    let again = dir.path().join("again.slc");
    write_slc(&again, &back).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn missing_header_or_truncated_payload_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.slc");
    write_slc(&path, &image()).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(matches!(read_slc(&path), Err(Error::SizeMismatch { .. })));
    std::fs::remove_file(header_path(&path)).unwrap();
    assert!(matches!(read_slc(&path), Err(Error::Io(_))));
}

#[test]
fn real_raster_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phase.raw");
    // Payload is f32, so the values are exactly representable.
    let r = Raster::from_vec(2, 3, vec![0.5, -1.25, 3.0, 0.0, 0.001953125, -3.140625]).unwrap();
    write_real(&path, &r, "phase").unwrap();
    let (back, kind) = read_real(&path).unwrap();
    assert_eq!(kind, "phase");
    assert_eq!(back, r);
}

#![no_main]

use libfuzzer_sys::fuzz_target;
use mmtomo::slc_io::decode_real;

// Input layout: header text, a NUL byte, then the sample payload.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else {
        return;
    };
    if let Ok(header) = std::str::from_utf8(&data[..split]) {
        if let Ok((raster, _)) = decode_real(header, &data[split + 1..]) {
            assert_eq!(raster.len() * 4, data.len() - split - 1);
        }
    }
});

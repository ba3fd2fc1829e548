#![no_main]

use libfuzzer_sys::fuzz_target;
use mmtomo::slc_io::{decode_slc, encode_slc};

// Input layout: header text, a NUL byte, then the sample payload.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else {
        return;
    };
    let Ok(header) = std::str::from_utf8(&data[..split]) else {
        return;
    };
    let payload = &data[split + 1..];
    if let Ok(img) = decode_slc(header, payload) {
        let (bytes, _) = encode_slc(&img);
        // f32 NaN payloads may not be bit-preserved; compare lengths only then.
        assert_eq!(bytes.len(), payload.len());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use mmtomo::slc_io::SlcHeader;

fuzz_target!(|text: &str| {
    if let Ok(h) = SlcHeader::parse(text) {
        // Accepted headers survive a write/read cycle unchanged.
        assert_eq!(SlcHeader::parse(&h.to_text()).unwrap(), h);
    }
});

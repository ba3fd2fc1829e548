#![no_main]

use libfuzzer_sys::fuzz_target;
use mmtomo::subaperture::BankManifest;

fuzz_target!(|text: &str| {
    if let Ok(m) = BankManifest::parse(text) {
        assert_eq!(BankManifest::parse(&m.to_text()).unwrap(), m);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = mmtomo::coreg::parse_pixel_csv(text);
});

#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use mmtomo_cli::config::PipelineConfig;

fuzz_target!(|text: &str| {
    let _ = PipelineConfig::parse(text, Path::new("."));
});

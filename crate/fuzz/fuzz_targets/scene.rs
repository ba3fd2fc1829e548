#![no_main]

use libfuzzer_sys::fuzz_target;
use mmtomo::scene::{parse_scene, scene_to_text};

fuzz_target!(|text: &str| {
    if let Ok(targets) = parse_scene(text) {
        assert_eq!(parse_scene(&scene_to_text(&targets)).unwrap(), targets);
    }
});

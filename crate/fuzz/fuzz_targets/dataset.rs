#![no_main]

use libfuzzer_sys::fuzz_target;
use vdw::registry;

fuzz_target!(|text: &str| {
    let _ = registry::parse_published(text);
    let Ok(records) = registry::load_str(text) else {
        return;
    };
    // keep k^2 exponents small enough to finish quickly
    if records.iter().all(|r| r.k <= 64 && r.value().bits() <= 4096) {
        let _ = registry::audit(&records);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use swlme::Topography;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(topo) = Topography::parse_table(text) {
        for k in -4..=4 {
            let z = topo.z(k as f64 * 0.5);
            assert!(z.is_finite());
        }
    }
});

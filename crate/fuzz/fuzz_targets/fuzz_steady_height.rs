#![no_main]

use libfuzzer_sys::fuzz_target;
use swlme::steady::{Branch, SteadyConstants};

fn words(data: &[u8]) -> Vec<f64> {
    data.chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

fuzz_target!(|data: &[u8]| {
    let v = words(data);
    if v.len() < 5 {
        return;
    }
    let (c1, c2, z, g, guess) = (v[0], v[1], v[2], v[3], v[4]);
    let ck = v[5..].iter().take(8).copied().collect();
    let constants = SteadyConstants::new(c1, c2, ck);
    for branch in [Branch::Subcritical, Branch::Supercritical] {
        if let Ok((h, _)) = constants.solve_height(z, g, branch, guess) {
            assert!(h.is_finite() && h > 0.0, "root {h}");
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use swlme::output::{read_snapshot, snapshot_csv};
use swlme::{Grid, Topography};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(snap) = read_snapshot(text) else {
        return;
    };
    let n = snap.field.n_cells();
    if n >= 2 {
        let grid = Grid::new(0.0, 1.0, n).unwrap();
        let written = snapshot_csv(&snap.field, &grid, &Topography::Flat { level: 0.0 });
        let back = read_snapshot(&written).expect("written snapshot must parse");
        for i in 0..n {
            assert_eq!(back.field.state(i).h(), snap.field.state(i).h());
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use vdw::cnf::{ingest_sat_result, InstanceMeta, SatResult};
use vdw::verify;

// The first three bytes pick the instance; the rest is solver output.
fuzz_target!(|data: &[u8]| {
    let [r, k, n, rest @ ..] = data else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let meta = InstanceMeta {
        r: 2 + r % 3,
        k: 3 + u64::from(k % 3),
        n_points: 1 + u64::from(n % 40),
    };
    match ingest_sat_result(meta, text) {
        Ok(SatResult::Satisfiable(coloring)) => {
            assert_eq!(coloring.n_points() as u64, meta.n_points);
            assert_eq!(verify(&coloring, meta.k).unwrap(), None);
        }
        Ok(SatResult::Unsatisfiable(att)) => {
            assert_eq!((att.r, att.k, att.n_points), (meta.r, meta.k, meta.n_points));
        }
        Err(_) => {}
    }
});

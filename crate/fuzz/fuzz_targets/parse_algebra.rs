#![no_main]

use libfuzzer_sys::fuzz_target;

const MAX_INPUT: usize = 4096;

fuzz_target!(|data: &[u8]| {
    if data.len() > MAX_INPUT {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(alg) = gwzw_cli::parse_algebra(src, "fuzz", 1) {
        // Accepted tables are arbitrary; the checks must still terminate cleanly.
        let _ = gwzw_core::lie::check_jacobi(&alg);
        let _ = gwzw_core::lie::CosetSplit::lorentz(&alg).validate(&alg);
    }
});

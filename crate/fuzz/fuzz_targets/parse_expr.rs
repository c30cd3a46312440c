#![no_main]

use libfuzzer_sys::fuzz_target;

/// Longer inputs only slow the search; the grammar is fully exercised well below this.
const MAX_INPUT: usize = 4096;

fuzz_target!(|data: &[u8]| {
    if data.len() > MAX_INPUT {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else { return };
    for n in 1..=2 {
        if let Ok(x) = gwzw_cli::parse_expr(src, n) {
            // Whatever parses must survive the JSON encoding unchanged.
            let doc = gwzw_cli::emit_json(&x);
            assert_eq!(gwzw_cli::decode_json(&doc).expect("own output decodes"), x);
        }
    }
});

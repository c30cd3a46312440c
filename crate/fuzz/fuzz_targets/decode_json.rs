#![no_main]

use libfuzzer_sys::fuzz_target;

const MAX_INPUT: usize = 16384;

fuzz_target!(|data: &[u8]| {
    if data.len() > MAX_INPUT {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(x) = gwzw_cli::decode_json(src) {
        let doc = gwzw_cli::emit_json(&x);
        assert_eq!(gwzw_cli::decode_json(&doc).expect("re-encoding decodes"), x);
    }
});

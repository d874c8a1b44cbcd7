#![no_main]

use libfuzzer_sys::fuzz_target;
use rotminkowski::io::parse_matrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_matrix(text) {
        let n = rows.len();
        assert!(n == 2 || n == 3);
        assert!(rows.iter().all(|r| r.len() == n));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotminkowski::{Dim, HarmonicExpansion};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for hint in [None, Some(Dim::Two), Some(Dim::Three)] {
        if let Ok(e) = HarmonicExpansion::from_csv(text, hint) {
            let again = HarmonicExpansion::from_csv(&e.to_csv(), None).expect("serialized expansion parses");
            assert_eq!(e.blocks(), again.blocks());
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotminkowski::bodies::BodySpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = BodySpec::from_json(text) {
        let again = BodySpec::from_json(&spec.to_json()).expect("serialized spec parses");
        assert_eq!(spec, again);
        let _ = spec.build();
    }
});

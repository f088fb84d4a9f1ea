#![no_main]

use lefschetz_core::exactmath::{parse_integer, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_rational(text) {
        assert_eq!(parse_rational(&q.to_string()).unwrap(), q);
    }
    if let Ok(n) = parse_integer(text) {
        assert_eq!(parse_rational(text).unwrap(), n.clone().into());
    }
});

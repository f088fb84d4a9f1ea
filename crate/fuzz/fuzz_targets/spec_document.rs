#![no_main]

use lefschetz_core::classifier::classify;
use lefschetz_core::document::SpecDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = SpecDocument::parse(text) else { return };
    let again = SpecDocument::from_value(&doc.to_json()).expect("serialized document reparses");
    assert_eq!(again.to_json(), doc.to_json());
    if let SpecDocument::Isogeny(iso) = &doc {
        if let Ok(spec) = iso.to_spec() {
            let report = classify(&spec);
            assert!(report.delta < spec.total_dim().pow(2));
        }
    }
});

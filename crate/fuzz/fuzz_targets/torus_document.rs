#![no_main]

use lefschetz_core::cohomology::defect_of_class;
use lefschetz_core::document::SpecDocument;
use lefschetz_core::torus::picard_number;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(SpecDocument::Torus(doc)) = SpecDocument::parse(text) else { return };
    let Ok(torus) = doc.build_torus() else { return };
    let Ok(classes) = doc.build_classes() else { return };
    // keep iterations cheap
    if torus.lattice_rank() > 6 {
        return;
    }
    let rho = picard_number(&torus);
    for (_, d) in classes {
        if let Ok(delta) = defect_of_class(&torus, &d) {
            assert!(delta <= rho);
        }
    }
});

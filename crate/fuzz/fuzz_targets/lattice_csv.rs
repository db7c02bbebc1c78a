#![no_main]

use libfuzzer_sys::fuzz_target;
use spindetect::field::SpinLattice;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(lat) = SpinLattice::from_csv(text) {
        let again = SpinLattice::from_csv(&lat.to_csv()).expect("own output parses");
        assert_eq!(again.count(), lat.count());
    }
});

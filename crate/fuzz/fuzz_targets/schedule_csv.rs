#![no_main]

use libfuzzer_sys::fuzz_target;
use spindetect::spin_star::Schedule;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Schedule::from_csv(text) {
        assert_eq!(Schedule::from_csv(&s.to_csv()).as_ref(), Ok(&s));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use spindetect_cli::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = Config::parse(text) {
        // Echoed settings must parse back to the same config.
        let echoed = cfg.echo_lines().join("\n");
        assert_eq!(Config::from_provenance(&echoed).ok(), Some(cfg.clone()));
        assert_eq!(Config::parse(&cfg.to_text()).ok(), Some(cfg));
    }
    let _ = Config::parse_assignment(text);
});

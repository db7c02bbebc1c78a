//! Replays the checked-in config fuzz seeds.

use std::fs;
use std::path::PathBuf;

use spindetect_cli::Config;

#[test]
fn config_seeds() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config_parse");
    let mut parsed = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        if let Ok(cfg) = Config::parse(&text) {
            parsed += 1;
            assert_eq!(Config::from_provenance(&cfg.echo_lines().join("\n")).unwrap(), cfg);
            assert_eq!(Config::parse(&cfg.to_text()).unwrap(), cfg);
        }
    }
    assert!(parsed >= 3);
}

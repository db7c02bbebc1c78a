use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::CliError;

/// Prefix of the config echo lines in output headers.
pub const ECHO_PREFIX: &str = "# config: ";

/// Flat `key = value` settings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Config {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(CliError::Config(format!("line {}: invalid key `{k}`", i + 1)));
            }
            if v.is_empty() {
                return Err(CliError::Config(format!("line {}: empty value for `{k}`", i + 1)));
            }
            if cfg.entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(cfg)
    }

    /// Recovers the effective settings echoed into an output header.
    pub fn from_provenance(csv: &str) -> Result<Self, CliError> {
        let body: Vec<&str> = csv.lines().filter_map(|l| l.strip_prefix(ECHO_PREFIX)).collect();
        Self::parse(&body.join("\n"))
    }

    /// Accepts either a plain config or a file carrying echoed provenance.
    pub fn load(text: &str) -> Result<Self, CliError> {
        if text.lines().any(|l| l.starts_with(ECHO_PREFIX)) {
            Self::from_provenance(text)
        } else {
            Self::parse(text)
        }
    }

    pub fn parse_assignment(s: &str) -> Result<(String, String), CliError> {
        let cfg = Self::parse(s)?;
        cfg.entries
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Config(format!("expected `key=value`, got `{s}`")))
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Entries of `other` take precedence.
    pub fn merged(&self, other: &Config) -> Config {
        let mut out = self.clone();
        out.entries.extend(other.entries.clone());
        out
    }

    pub fn get<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key).ok_or_else(|| CliError::Config(format!("missing key `{key}`")))?;
        raw.parse()
            .map_err(|e| CliError::Config(format!("`{key}` = `{raw}`: {e}")))
    }

    /// Comma-separated list.
    pub fn get_list<T>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key).ok_or_else(|| CliError::Config(format!("missing key `{key}`")))?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| CliError::Config(format!("`{key}` item `{}`: {e}", s.trim())))
            })
            .collect()
    }

    /// Fills defaults and rejects keys outside `defaults`.
    pub fn resolve(&self, defaults: &[(&str, &str)]) -> Result<Config, CliError> {
        for k in self.entries.keys() {
            if !defaults.iter().any(|(d, _)| d == k) {
                return Err(CliError::Config(format!("unknown key `{k}`")));
            }
        }
        let mut out = Config::default();
        for (k, v) in defaults {
            out.set(*k, *v);
        }
        Ok(out.merged(self))
    }

    pub fn echo_lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(k, v)| format!("{ECHO_PREFIX}{k} = {v}"))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_lookup() {
        let c = Config::parse("# sweep\n nr = 5\nrho_min=1e16\n\nl_list = 2, 4,6\n").unwrap();
        assert_eq!(c.get::<usize>("nr").unwrap(), 5);
        assert_eq!(c.get::<f64>("rho_min").unwrap(), 1e16);
        assert_eq!(c.get_list::<usize>("l_list").unwrap(), vec![2, 4, 6]);
        assert!(matches!(c.get::<usize>("rho_min"), Err(CliError::Config(_))));
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["nr 5", "= 3", "nr =", "a-b = 1", "nr = 1\nnr = 2"] {
            assert!(Config::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn resolve_and_echo_round_trip() {
        let c = Config::parse("nr = 7").unwrap();
        let r = c.resolve(&[("nr", "3"), ("nz", "4")]).unwrap();
        assert_eq!(r.raw("nr"), Some("7"));
        assert_eq!(r.raw("nz"), Some("4"));
        let text = r.echo_lines().join("\n");
        assert_eq!(Config::from_provenance(&text).unwrap(), r);
        assert_eq!(Config::load(&text).unwrap(), r);
        assert!(Config::parse("zz = 1").unwrap().resolve(&[("nr", "3")]).is_err());
    }
}

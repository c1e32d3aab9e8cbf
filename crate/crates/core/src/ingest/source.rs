use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::Duration;

use crate::error::{Error, Result};

/// Public open-data repository root; files live under `competitions.json`,
/// `matches/<competition>/<season>.json` and `events/<match>.json`.
pub const DEFAULT_BASE_URL: &str = "https://raw.githubusercontent.com/statsbomb/open-data/master/data";

/// Environment variable overriding the data source locator.
pub const DATA_SOURCE_ENV: &str = "PITCHSEQ_DATA_SOURCE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locator {
    Remote(String),
    Local(PathBuf),
}

impl Locator {
    /// `http://` and `https://` locators are remote; anything else is a path.
    pub fn parse(s: &str) -> Self {
        if s.starts_with("http://") || s.starts_with("https://") {
            Locator::Remote(s.trim_end_matches('/').to_string())
        } else {
            Locator::Local(PathBuf::from(s))
        }
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locator::Remote(url) => f.write_str(url),
            Locator::Local(path) => write!(f, "{}", path.display()),
        }
    }
}

/// A remote or local open-data tree. Counts every request it serves so
/// callers can verify cache hits.
#[derive(Debug)]
pub struct DataSource {
    locator: Locator,
    requests: AtomicUsize,
    client: OnceLock<reqwest::blocking::Client>,
}

impl DataSource {
    pub fn new(locator: Locator) -> Self {
        DataSource {
            locator,
            requests: AtomicUsize::new(0),
            client: OnceLock::new(),
        }
    }

    pub fn parse(s: &str) -> Self {
        Self::new(Locator::parse(s))
    }

    pub fn local(path: impl AsRef<Path>) -> Self {
        Self::new(Locator::Local(path.as_ref().to_path_buf()))
    }

    /// Source named by `PITCHSEQ_DATA_SOURCE`, else `fallback`.
    pub fn from_env_or(fallback: &str) -> Self {
        match std::env::var(DATA_SOURCE_ENV) {
            Ok(v) if !v.is_empty() => Self::parse(&v),
            _ => Self::parse(fallback),
        }
    }

    pub fn locator(&self) -> &Locator {
        &self.locator
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    /// Fetches the file at `rel` (a `/`-separated path below the root).
    pub fn get(&self, rel: &str) -> Result<Vec<u8>> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        match &self.locator {
            Locator::Local(root) => {
                if !root.is_dir() {
                    return Err(Error::Network {
                        url: root.display().to_string(),
                        message: "local source directory does not exist".into(),
                    });
                }
                let path = root.join(rel);
                std::fs::read(&path).map_err(|e| match e.kind() {
                    std::io::ErrorKind::NotFound => Error::NotFound(path.display().to_string()),
                    _ => Error::io(path, e),
                })
            }
            Locator::Remote(base) => {
                let url = format!("{base}/{rel}");
                let client = self.client.get_or_init(|| {
                    reqwest::blocking::Client::builder()
                        .timeout(Duration::from_secs(60))
                        .build()
                        .expect("http client construction")
                });
                let network = |message: String| Error::Network {
                    url: url.clone(),
                    message,
                };
                let resp = client.get(&url).send().map_err(|e| network(e.to_string()))?;
                if resp.status() == reqwest::StatusCode::NOT_FOUND {
                    return Err(Error::NotFound(url));
                }
                if !resp.status().is_success() {
                    return Err(network(format!("HTTP {}", resp.status())));
                }
                Ok(resp.bytes().map_err(|e| network(e.to_string()))?.to_vec())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locator_parsing() {
        assert_eq!(
            Locator::parse("https://example.org/data/"),
            Locator::Remote("https://example.org/data".into())
        );
        assert_eq!(Locator::parse("fixtures/od"), Locator::Local("fixtures/od".into()));
    }

    #[test]
    fn missing_local_root_is_unreachable() {
        let src = DataSource::local("/definitely/not/here");
        assert!(matches!(src.get("competitions.json"), Err(Error::Network { .. })));
        assert_eq!(src.request_count(), 1);
    }

    #[test]
    fn missing_local_file_is_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let src = DataSource::local(dir.path());
        assert!(matches!(src.get("events/1.json"), Err(Error::NotFound(_))));
    }
}

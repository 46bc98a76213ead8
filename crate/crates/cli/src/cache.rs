//! Result cache: one JSON file per (command, canonical parameters), holding
//! the highest-precision raw result computed so far.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    digits: u32,
    data: Value,
}

pub struct Cache {
    dir: PathBuf,
}

/// Outcome of a lookup, for diagnostics on stderr.
#[derive(Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit { digits: u32 },
    Miss,
    /// The file was unreadable or malformed and was ignored.
    Corrupt(String),
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Cache { dir: dir.to_path_buf() }
    }

    fn path(&self, key: &str) -> PathBuf {
        let name: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        self.dir.join(format!("{name}.json"))
    }

    /// A stored result at `digits` or more.
    pub fn get(&self, key: &str, digits: u32) -> (Option<Value>, Lookup) {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return (None, Lookup::Miss),
            Err(e) => return (None, Lookup::Corrupt(format!("{}: {e}", path.display()))),
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return (None, Lookup::Corrupt(format!("{}: {e}", path.display()))),
        };
        if entry.key != key {
            return (None, Lookup::Corrupt(format!("{}: key mismatch", path.display())));
        }
        if entry.digits < digits {
            return (None, Lookup::Miss);
        }
        (Some(entry.data), Lookup::Hit { digits: entry.digits })
    }

    /// Store unless an entry of at least the same precision exists. The file
    /// is written next to its target and renamed into place.
    pub fn put(&self, key: &str, digits: u32, data: &Value) -> std::io::Result<()> {
        if let (Some(_), Lookup::Hit { digits: have }) = self.get(key, digits) {
            if have >= digits {
                return Ok(());
            }
        }
        fs::create_dir_all(&self.dir)?;
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let entry = Entry {
            key: key.to_string(),
            digits,
            data: data.clone(),
        };
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, &entry)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_monotone_reuse() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        assert_eq!(c.get("moment p=1", 30).1, Lookup::Miss);
        c.put("moment p=1", 60, &Value::from("x60")).unwrap();
        assert_eq!(c.get("moment p=1", 30), (Some(Value::from("x60")), Lookup::Hit { digits: 60 }));
        assert_eq!(c.get("moment p=1", 80).1, Lookup::Miss);
        // a lower precision never replaces a higher one
        c.put("moment p=1", 40, &Value::from("x40")).unwrap();
        assert_eq!(c.get("moment p=1", 30).0, Some(Value::from("x60")));
        c.put("moment p=1", 80, &Value::from("x80")).unwrap();
        assert_eq!(c.get("moment p=1", 30).0, Some(Value::from("x80")));
    }

    #[test]
    fn corruption_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        fs::write(c.path("k"), "{not json").unwrap();
        assert!(matches!(c.get("k", 20).1, Lookup::Corrupt(_)));
        // a fresh write repairs the entry
        c.put("k", 20, &Value::from(1)).unwrap();
        assert_eq!(c.get("k", 20).0, Some(Value::from(1)));
    }
}

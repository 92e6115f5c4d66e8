//! Content-addressed on-disk cache of Groebner bases.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::jacobian::mpoly::{self, Poly};
use crate::scalar::Field;

const FORMAT: &str = "groebner-v1";

/// Hex SHA-256 of the canonical JSON of `key`. Struct fields serialise in
/// declaration order, so equal inputs give equal text.
pub fn content_hash<K: Serialize>(key: &K) -> String {
    let text = serde_json::to_string(key).expect("cache keys serialise");
    hex::encode(Sha256::digest(format!("{FORMAT}\n{text}").as_bytes()))
}

pub struct GroebnerCache {
    dir: PathBuf,
}

impl GroebnerCache {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(GroebnerCache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.gb"))
    }

    /// One polynomial per line after a header naming the variable count.
    /// Unreadable or mismatched files count as misses.
    pub fn load<F: Field>(&self, field: &F, key: &str, vars: usize) -> Option<Vec<Poly<F::Elem>>> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let mut lines = text.lines();
        if lines.next()? != format!("{FORMAT} vars={vars}") {
            return None;
        }
        lines.map(|l| mpoly::decode(field, l, vars)).collect()
    }

    pub fn store<F: Field>(&self, field: &F, key: &str, vars: usize, basis: &[Poly<F::Elem>]) -> std::io::Result<()> {
        let mut text = format!("{FORMAT} vars={vars}\n");
        for p in basis {
            text.push_str(&mpoly::encode(field, p));
            text.push('\n');
        }
        let tmp = self.dir.join(format!("{key}.tmp"));
        std::fs::write(&tmp, text)?;
        std::fs::rename(tmp, self.path(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GroebnerCache::new(dir.path()).unwrap();
        let f = ScalarField::prime(7).unwrap();
        let p = mpoly::from_terms(&f, vec![(vec![2, 0], f.one()), (vec![0, 1], f.from_int(3))]);
        let key = content_hash(&("line", 7));
        assert!(cache.load(&f, &key, 2).is_none());
        cache.store(&f, &key, 2, std::slice::from_ref(&p)).unwrap();
        assert_eq!(cache.load(&f, &key, 2), Some(vec![p]));
        assert!(cache.load(&f, &key, 3).is_none());
        assert_ne!(key, content_hash(&("line", 5)));
    }
}

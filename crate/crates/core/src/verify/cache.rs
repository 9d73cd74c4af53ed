use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::series::io::{read_trunc, write_trunc};
use crate::series::TruncSeries;

pub const FORMAT_VERSION: u32 = 1;

/// Environment variable that overrides the default cache directory.
pub const CACHE_DIR_ENV: &str = "PDET_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    /// sha256 of the operator's canonical JSON, or of the empty string for
    /// operator-free pipelines.
    pub operator_hash: String,
    pub pipeline: String,
    pub order: usize,
    pub certified_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub header: CacheHeader,
    pub series: TruncSeries,
}

/// One file per key, `<sha256>.series`: a JSON header line followed by the
/// plain-text series format.
#[derive(Clone, Debug)]
pub struct CoefficientCache {
    dir: PathBuf,
}

fn operator_hash(op: Option<&DiffOperator>) -> String {
    let bytes = op.map(DiffOperator::canonical_json).unwrap_or_default();
    hex::encode(Sha256::digest(bytes.as_bytes()))
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CoefficientCache { dir: dir.into() }
    }

    /// `$PDET_CACHE_DIR` if set, else `fallback`.
    pub fn from_env_or(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => CoefficientCache::new(PathBuf::from(d)),
            _ => CoefficientCache::new(fallback),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn header(op: Option<&DiffOperator>, pipeline: &str, order: usize) -> CacheHeader {
        CacheHeader {
            format_version: FORMAT_VERSION,
            operator_hash: operator_hash(op),
            pipeline: pipeline.to_string(),
            order,
            certified_order: 0,
        }
    }

    fn path(&self, h: &CacheHeader) -> PathBuf {
        let key = format!(
            "v{}|{}|{}|{}",
            h.format_version, h.operator_hash, h.pipeline, h.order
        );
        let name = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.join(format!("{name}.series"))
    }

    pub fn load(&self, op: Option<&DiffOperator>, pipeline: &str, order: usize) -> Result<Option<CacheEntry>> {
        let want = Self::header(op, pipeline, order);
        let path = self.path(&want);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let (head, body) = text
            .split_once('\n')
            .ok_or_else(|| Error::Parse(format!("{}: missing header", path.display())))?;
        let header: CacheHeader = serde_json::from_str(head)?;
        if header.format_version != want.format_version
            || header.operator_hash != want.operator_hash
            || header.pipeline != want.pipeline
            || header.order != want.order
        {
            return Ok(None);
        }
        let series = read_trunc(body)?;
        Ok(Some(CacheEntry { header, series }))
    }

    /// Writes to a temporary file in the cache directory and renames it into
    /// place, so readers never see a partial entry.
    pub fn store(
        &self,
        op: Option<&DiffOperator>,
        pipeline: &str,
        series: &TruncSeries,
        certified_order: usize,
    ) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let mut header = Self::header(op, pipeline, series.order());
        header.certified_order = certified_order;
        let path = self.path(&header);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        writeln!(tmp, "{}", serde_json::to_string(&header)?)?;
        tmp.write_all(write_trunc(series).as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.to_string()))?;
        Ok(path)
    }

    /// Cached series for the key, or `compute()` stored under it. The flag is
    /// true on a cache hit.
    pub fn get_or_compute(
        &self,
        op: Option<&DiffOperator>,
        pipeline: &str,
        order: usize,
        compute: impl FnOnce() -> Result<(TruncSeries, usize)>,
    ) -> Result<(CacheEntry, bool)> {
        if let Some(hit) = self.load(op, pipeline, order)? {
            return Ok((hit, true));
        }
        let (series, certified) = compute()?;
        if series.order() != order {
            return Err(Error::InvalidInput(format!(
                "computed order {} for a cache key of order {order}",
                series.order()
            )));
        }
        self.store(op, pipeline, &series, certified)?;
        let entry = self
            .load(op, pipeline, order)?
            .ok_or_else(|| Error::Io("cache entry vanished after write".into()))?;
        Ok((entry, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::catalog::{d0, intro};
    use crate::rings::rat;
    use proptest::prelude::*;
    use std::cell::Cell;

    #[test]
    fn hit_does_not_recompute() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let calls = Cell::new(0);
        let s = TruncSeries::new(vec![rat(0, 1), rat(1, 2), rat(1, 24)]);
        let compute = || {
            calls.set(calls.get() + 1);
            Ok((s.clone(), 3))
        };
        let (a, hit_a) = cache.get_or_compute(Some(&d0()), "ldet", 3, compute).unwrap();
        let (b, hit_b) = cache.get_or_compute(Some(&d0()), "ldet", 3, compute).unwrap();
        assert_eq!((hit_a, hit_b), (false, true));
        assert_eq!(calls.get(), 1);
        assert_eq!(a, b);
        assert_eq!(b.series, s);
        assert_eq!(b.header.certified_order, 3);
    }

    #[test]
    fn keys_separate_operators_and_pipelines() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let s = TruncSeries::new(vec![rat(1, 1)]);
        cache.store(Some(&d0()), "ldet", &s, 1).unwrap();
        assert!(cache.load(Some(&intro()), "ldet", 1).unwrap().is_none());
        assert!(cache.load(Some(&d0()), "wpoly", 1).unwrap().is_none());
        assert!(cache.load(Some(&d0()), "ldet", 2).unwrap().is_none());
        assert!(cache.load(None, "ldet", 1).unwrap().is_none());
        assert!(cache.load(Some(&d0()), "ldet", 1).unwrap().is_some());
    }

    #[test]
    fn corrupt_entry_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let s = TruncSeries::new(vec![rat(1, 1)]);
        let path = cache.store(None, "h", &s, 1).unwrap();
        fs::write(&path, "not json\norder 1\n1/1\n").unwrap();
        assert!(cache.load(None, "h", 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn roundtrip_is_identity(v in prop::collection::vec((-1_000_000i64..1_000_000, 1i64..1_000_000), 1..20)) {
            let dir = tempfile::tempdir().unwrap();
            let cache = CoefficientCache::new(dir.path());
            let s = TruncSeries::new(v.iter().map(|&(n, d)| rat(n, d)).collect());
            cache.store(None, "h", &s, s.order()).unwrap();
            let back = cache.load(None, "h", s.order()).unwrap().unwrap();
            prop_assert_eq!(back.series, s);
        }
    }
}

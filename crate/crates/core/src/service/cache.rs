use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;

use crate::metrics::{DistanceMatrix, MetricKind};
use crate::sampling::ExtractionFactor;
use crate::track::TrackQuery;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixKey {
    pub query: TrackQuery,
    pub metric: MetricKind,
    pub extraction_n: ExtractionFactor,
}

/// Bounded LRU of distance matrices shared by concurrent requests.
///
/// Two requests racing on the same key may both compute the matrix; the
/// later insert wins, and both values are identical anyway.
pub struct MatrixCache {
    inner: Mutex<LruCache<MatrixKey, Arc<DistanceMatrix>>>,
}

impl MatrixCache {
    pub const DEFAULT_CAPACITY: usize = 16;

    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        MatrixCache {
            inner: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn get(&self, key: &MatrixKey) -> Option<Arc<DistanceMatrix>> {
        self.inner.lock().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, key: MatrixKey, matrix: Arc<DistanceMatrix>) {
        self.inner.lock().expect("cache lock").put(key, matrix);
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for MatrixCache {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CAPACITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(origin: &str) -> MatrixKey {
        let d = "2014-06-01".parse().unwrap();
        MatrixKey {
            query: TrackQuery::new(origin, "ATL", d, d).unwrap(),
            metric: MetricKind::Geographic,
            extraction_n: ExtractionFactor::NONE,
        }
    }

    #[test]
    fn evicts_least_recent() {
        let cache = MatrixCache::new(2);
        let m = Arc::new(DistanceMatrix::from_unlabeled(&[vec![0.0]]).unwrap());
        cache.insert(key("A"), m.clone());
        cache.insert(key("B"), m.clone());
        assert!(cache.get(&key("A")).is_some());
        cache.insert(key("C"), m);
        assert!(cache.get(&key("B")).is_none());
        assert!(cache.get(&key("A")).is_some());
        assert_eq!(cache.len(), 2);
    }
}

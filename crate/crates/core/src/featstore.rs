//! Feature aggregation, Euclidean distances and the distance-normalized
//! baseline similarity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::types::{check_dim, FeatureVector, IdentityId};

/// Population statistics of pairwise feature distances.
///
/// `mu_n > mu_p` is enforced at construction, so `norm` is always positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    mu_p: f64,
    mu_n: f64,
}

impl DistanceStats {
    pub fn new(mu_p: f64, mu_n: f64) -> Result<Self> {
        if !(mu_p.is_finite() && mu_n.is_finite()) || mu_p < 0.0 || !(mu_n > mu_p) {
            return Err(Error::DegenerateStatistics { mu_p, mu_n });
        }
        Ok(Self { mu_p, mu_n })
    }

    pub fn mu_p(&self) -> f64 {
        self.mu_p
    }

    pub fn mu_n(&self) -> f64 {
        self.mu_n
    }

    pub fn thres(&self) -> f64 {
        (self.mu_n + self.mu_p) / 2.0
    }

    pub fn norm(&self) -> f64 {
        (self.mu_n - self.mu_p) / 2.0
    }

    /// Maps a distance to a signed score: +1 at `mu_p`, 0 at `thres`, -1 at `mu_n`.
    pub fn score(&self, distance: f64) -> f64 {
        (self.thres() - distance) / self.norm()
    }
}

/// Element-wise mean.
pub fn aggregate(features: &[FeatureVector]) -> Result<FeatureVector> {
    let refs: Vec<&FeatureVector> = features.iter().collect();
    aggregate_refs(&refs)
}

pub(crate) fn aggregate_refs(features: &[&FeatureVector]) -> Result<FeatureVector> {
    let first = features.first().ok_or(Error::EmptyFeatureList)?;
    let dim = first.dim();
    let mut sum = vec![0.0; dim];
    for f in features {
        check_dim(dim, f.dim())?;
        for (s, v) in sum.iter_mut().zip(f.as_slice()) {
            *s += v;
        }
    }
    let n = features.len() as f64;
    FeatureVector::new(sum.into_iter().map(|s| s / n).collect())
}

pub fn distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(sq_dist(a.as_slice(), b.as_slice()).sqrt())
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean same-identity and different-identity distances over explicit pairs.
pub fn compute_stats<'a, I>(pairs: I) -> Result<DistanceStats>
where
    I: IntoIterator<Item = (&'a FeatureVector, &'a FeatureVector, bool)>,
{
    let mut acc = PairAccumulator::default();
    for (a, b, same) in pairs {
        acc.add(distance(a, b)?, same);
    }
    acc.finish()
}

/// Statistics over every unordered pair of labeled features.
pub fn compute_stats_all_pairs(
    items: &[(&FeatureVector, IdentityId)],
    exec: Exec,
) -> Result<DistanceStats> {
    if let Some(first) = items.first() {
        for (f, _) in items {
            check_dim(first.0.dim(), f.dim())?;
        }
    }
    let partials = par::map_range(exec, items.len(), |i| {
        let mut acc = PairAccumulator::default();
        let (fa, la) = items[i];
        for &(fb, lb) in &items[i + 1..] {
            acc.add(sq_dist(fa.as_slice(), fb.as_slice()).sqrt(), la == lb);
        }
        acc
    });
    let mut total = PairAccumulator::default();
    for p in partials {
        total.merge(&p);
    }
    total.finish()
}

#[derive(Debug, Default, Clone, Copy)]
struct PairAccumulator {
    pos_sum: f64,
    pos_n: usize,
    neg_sum: f64,
    neg_n: usize,
}

impl PairAccumulator {
    fn add(&mut self, d: f64, same: bool) {
        if same {
            self.pos_sum += d;
            self.pos_n += 1;
        } else {
            self.neg_sum += d;
            self.neg_n += 1;
        }
    }

    fn merge(&mut self, other: &Self) {
        self.pos_sum += other.pos_sum;
        self.pos_n += other.pos_n;
        self.neg_sum += other.neg_sum;
        self.neg_n += other.neg_n;
    }

    fn finish(self) -> Result<DistanceStats> {
        if self.pos_n == 0 {
            return Err(Error::MissingClass("positive"));
        }
        if self.neg_n == 0 {
            return Err(Error::MissingClass("negative"));
        }
        DistanceStats::new(
            self.pos_sum / self.pos_n as f64,
            self.neg_sum / self.neg_n as f64,
        )
    }
}

/// `(thres - d(a, b)) / norm`.
pub fn baseline_similarity(a: &FeatureVector, b: &FeatureVector, stats: &DistanceStats) -> Result<f64> {
    Ok(stats.score(distance(a, b)?))
}

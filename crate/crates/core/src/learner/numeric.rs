//! Threshold search for numeric value predicates.

use fixedbitset::FixedBitSet;

use super::{GainCounts, Scorer};
use crate::logic::CmpOp;

/// A binary value predicate `f(subject, number)` viewed per subject.
#[derive(Debug, Clone)]
pub(crate) struct NumericFeature {
    pub name: String,
    /// Sorted values per subject index; empty when the subject has none.
    pub values: Vec<Vec<f64>>,
}

impl NumericFeature {
    pub fn new(name: String, values: Vec<Vec<f64>>) -> Self {
        let mut values = values;
        for v in &mut values {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        NumericFeature { name, values }
    }

    /// `f(X,A), A op threshold` holds for a subject when some value satisfies it.
    pub fn holds(&self, subject: usize, op: CmpOp, threshold: f64) -> bool {
        self.values[subject].iter().any(|&v| op.holds(v, threshold))
    }

    pub fn extension(&self, op: CmpOp, threshold: f64) -> FixedBitSet {
        let mut ext = FixedBitSet::with_capacity(self.values.len());
        for s in 0..self.values.len() {
            if self.holds(s, op, threshold) {
                ext.insert(s);
            }
        }
        ext
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Split {
    pub feature: usize,
    pub op: CmpOp,
    pub threshold: f64,
    pub gain: f64,
    pub counts: GainCounts,
    /// Next observed value above the threshold among the split examples.
    pub successor: Option<f64>,
}

/// Best `(feature, op, threshold)` over {≤, >} and observed values of the
/// covered examples. Ties keep the earliest feature, then `≤`, then the
/// smallest threshold.
pub(crate) fn best_split(features: &[NumericFeature], pos: &FixedBitSet, neg: &FixedBitSet, scorer: Scorer) -> Option<Split> {
    let p0 = pos.count_ones(..);
    let n0 = neg.count_ones(..);
    let mut best: Option<Split> = None;
    for (fi, feature) in features.iter().enumerate() {
        // (key, is_positive) for examples that have a value
        let mut mins: Vec<(f64, bool)> = Vec::new();
        let mut maxs: Vec<(f64, bool)> = Vec::new();
        let mut thresholds: Vec<f64> = Vec::new();
        for (set, positive) in [(pos, true), (neg, false)] {
            for s in set.ones() {
                let vals = &feature.values[s];
                if let (Some(&lo), Some(&hi)) = (vals.first(), vals.last()) {
                    mins.push((lo, positive));
                    maxs.push((hi, positive));
                    thresholds.extend(vals.iter().copied());
                }
            }
        }
        if thresholds.is_empty() {
            continue;
        }
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        mins.sort_by(|a, b| a.0.total_cmp(&b.0));
        maxs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let with_pos = mins.iter().filter(|m| m.1).count();
        let with_neg = mins.len() - with_pos;

        let mut candidates: Vec<(CmpOp, f64, usize, usize)> = Vec::with_capacity(2 * thresholds.len());
        let (mut i, mut p, mut n) = (0, 0, 0);
        for &v in &thresholds {
            while i < mins.len() && mins[i].0 <= v {
                if mins[i].1 {
                    p += 1;
                } else {
                    n += 1;
                }
                i += 1;
            }
            candidates.push((CmpOp::Le, v, p, n));
        }
        let (mut j, mut p, mut n) = (0, 0, 0);
        for &v in &thresholds {
            while j < maxs.len() && maxs[j].0 <= v {
                if maxs[j].1 {
                    p += 1;
                } else {
                    n += 1;
                }
                j += 1;
            }
            candidates.push((CmpOp::Gt, v, with_pos - p, with_neg - n));
        }

        for (k, (op, threshold, p1, n1)) in candidates.into_iter().enumerate() {
            let counts = GainCounts { p0, n0, p1, n1, t: p1 };
            let gain = scorer(counts);
            if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                best = Some(Split {
                    feature: fi,
                    op,
                    threshold,
                    gain,
                    counts,
                    successor: thresholds.get(k % thresholds.len() + 1).copied(),
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::information_gain;

    fn bits(n: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn separates_temperatures() {
        let f = NumericFeature::new("temp".into(), vec![vec![70.0], vec![75.0], vec![80.0], vec![85.0]]);
        let split = best_split(&[f], &bits(4, &[0, 1]), &bits(4, &[2, 3]), information_gain).unwrap();
        assert_eq!((split.op, split.threshold), (CmpOp::Le, 75.0));
        assert_eq!((split.counts.p1, split.counts.n1), (2, 0));
    }

    #[test]
    fn constant_feature_has_no_split() {
        let f = NumericFeature::new("temp".into(), vec![vec![1.0]; 4]);
        assert!(best_split(&[f], &bits(4, &[0, 1]), &bits(4, &[2, 3]), information_gain).is_none());
    }

    #[test]
    fn greater_than_and_successor() {
        let f = NumericFeature::new("h".into(), vec![vec![90.0], vec![95.0], vec![96.0], vec![70.0]]);
        let split = best_split(std::slice::from_ref(&f), &bits(4, &[1, 2]), &bits(4, &[0, 3]), information_gain).unwrap();
        assert_eq!((split.op, split.threshold, split.successor), (CmpOp::Gt, 90.0, Some(95.0)));
    }

    #[test]
    fn multi_valued_subjects() {
        let f = NumericFeature::new("v".into(), vec![vec![5.0, 1.0], vec![3.0]]);
        assert!(f.holds(0, CmpOp::Le, 1.0));
        assert!(f.holds(0, CmpOp::Gt, 4.0));
        assert!(!f.holds(1, CmpOp::Gt, 4.0));
        assert_eq!(f.extension(CmpOp::Le, 2.0), bits(2, &[0]));
    }
}

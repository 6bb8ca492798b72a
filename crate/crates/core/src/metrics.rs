//! Group fairness metrics.
//!
//! A prediction or label is *positive* when it equals the dataset's favorable
//! label. With more than two protected groups both EOD and AOD take the
//! maximum over all group pairs. Groups whose rate has a zero denominator are
//! left out of the pairwise maximum; fewer than two remaining groups is an
//! error rather than a silent zero.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learners::TrainedModel;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl GroupCounts {
    pub fn size(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// `tp / (tp + fn)`, undefined without actual positives.
    pub fn tpr(&self) -> Option<f64> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// `fp / (fp + tn)`, undefined without actual negatives.
    pub fn fpr(&self) -> Option<f64> {
        let d = self.fp + self.tn;
        (d > 0).then(|| self.fp as f64 / d as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub groups: Vec<GroupCounts>,
}

impl GroupStats {
    pub fn tprs(&self) -> Vec<Option<f64>> {
        self.groups.iter().map(GroupCounts::tpr).collect()
    }

    pub fn fprs(&self) -> Vec<Option<f64>> {
        self.groups.iter().map(GroupCounts::fpr).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub accuracy: f64,
    pub eod: f64,
    pub aod: f64,
    pub group_stats: GroupStats,
}

pub fn group_confusion(
    predicted: &[u8],
    actual: &[u8],
    protected: &[usize],
    n_groups: usize,
    favorable_label: u8,
) -> Result<GroupStats> {
    if predicted.len() != actual.len() || actual.len() != protected.len() {
        return Err(Error::LengthMismatch(format!(
            "{} predictions, {} labels, {} group indices",
            predicted.len(),
            actual.len(),
            protected.len()
        )));
    }
    let mut groups = vec![GroupCounts::default(); n_groups];
    for ((&p, &a), &g) in predicted.iter().zip(actual).zip(protected) {
        let c = groups.get_mut(g).ok_or_else(|| {
            Error::LengthMismatch(format!("group index {g} out of range for {n_groups} groups"))
        })?;
        match (p == favorable_label, a == favorable_label) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(GroupStats { groups })
}

/// Largest TPR gap between any two groups with a defined TPR.
pub fn eod(stats: &GroupStats) -> Result<f64> {
    let tprs: Vec<f64> = stats.tprs().into_iter().flatten().collect();
    if tprs.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "EOD needs two groups with actual positives, found {}",
            tprs.len()
        )));
    }
    let max = tprs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tprs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Largest mean of TPR and FPR gaps between any two groups with both rates defined.
pub fn aod(stats: &GroupStats) -> Result<f64> {
    let rates: Vec<(f64, f64)> = stats
        .groups
        .iter()
        .filter_map(|g| Some((g.tpr()?, g.fpr()?)))
        .collect();
    if rates.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "AOD needs two groups with both classes present, found {}",
            rates.len()
        )));
    }
    let mut worst = 0.0f64;
    for (i, a) in rates.iter().enumerate() {
        for b in &rates[i + 1..] {
            worst = worst.max(((a.0 - b.0).abs() + (a.1 - b.1).abs()) / 2.0);
        }
    }
    Ok(worst)
}

/// Scores predictions against a labeled dataset.
pub fn report(predicted: &[u8], data: &Dataset) -> Result<FairnessReport> {
    if data.n_rows() == 0 {
        return Err(Error::Size("cannot evaluate on an empty dataset".into()));
    }
    let stats = group_confusion(
        predicted,
        &data.labels,
        &data.protected,
        data.n_groups(),
        data.favorable_label,
    )?;
    let correct = predicted
        .iter()
        .zip(&data.labels)
        .filter(|(p, a)| p == a)
        .count();
    Ok(FairnessReport {
        accuracy: correct as f64 / data.n_rows() as f64,
        eod: eod(&stats)?,
        aod: aod(&stats)?,
        group_stats: stats,
    })
}

pub fn evaluate(model: &TrainedModel, validation: &Dataset) -> Result<FairnessReport> {
    let predicted = model.predict(&validation.features)?;
    report(&predicted, validation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stats_from_rates(rates: &[(u64, u64, u64, u64)]) -> GroupStats {
        GroupStats {
            groups: rates
                .iter()
                .map(|&(tp, fn_, fp, tn)| GroupCounts { tp, fp, tn, fn_ })
                .collect(),
        }
    }

    #[test]
    fn hand_counted_group() {
        let s = group_confusion(&[1, 1, 0, 0], &[1, 0, 1, 0], &[0; 4], 2, 1).unwrap();
        let g = s.groups[0];
        assert_eq!((g.tp, g.fp, g.fn_, g.tn), (1, 1, 1, 1));
        assert_eq!(g.tpr(), Some(0.5));
        assert_eq!(g.fpr(), Some(0.5));
        assert_eq!(s.groups[1].tpr(), None);
    }

    #[test]
    fn favorable_zero_flips_positive() {
        let s = group_confusion(&[0, 0, 1], &[0, 1, 1], &[0, 0, 0], 2, 0).unwrap();
        let g = s.groups[0];
        assert_eq!((g.tp, g.fp, g.tn, g.fn_), (1, 1, 1, 0));
    }

    #[test]
    fn eod_examples() {
        // counts giving TPRs of 0.8, 0.6, 0.9, 0.5, 0.7
        let s = stats_from_rates(&[(8, 2, 0, 1), (8, 2, 0, 1)]);
        assert_eq!(eod(&s).unwrap(), 0.0);
        let s = stats_from_rates(&[(4, 1, 0, 1), (3, 2, 0, 1)]);
        assert!((eod(&s).unwrap() - 0.2).abs() < 1e-12);
        let s = stats_from_rates(&[(9, 1, 0, 1), (5, 5, 0, 1), (7, 3, 0, 1)]);
        assert!((eod(&s).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn aod_examples() {
        // TPR 0.6 vs 0.4, FPR 0.4 vs 0.2
        let s = stats_from_rates(&[(3, 2, 2, 3), (2, 3, 1, 4)]);
        assert!((aod(&s).unwrap() - 0.2).abs() < 1e-12);
        // TPR 0.6 vs 0.4, FPR equal
        let s = stats_from_rates(&[(3, 2, 1, 4), (2, 3, 1, 4)]);
        assert!((aod(&s).unwrap() - 0.1).abs() < 1e-12);
        let s = stats_from_rates(&[(3, 2, 1, 4), (3, 2, 1, 4), (6, 4, 2, 8)]);
        assert_eq!(aod(&s).unwrap(), 0.0);
    }

    #[test]
    fn undefined_when_one_group_has_positives() {
        let s = stats_from_rates(&[(3, 2, 1, 4), (0, 0, 1, 4)]);
        assert!(matches!(eod(&s), Err(Error::UndefinedMetric(_))));
        assert!(matches!(aod(&s), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            group_confusion(&[1, 0], &[1], &[0, 0], 2, 1),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn constant_favorable_predictor_is_fair() {
        let actual = [1, 0, 1, 0, 1, 0];
        let groups = [0, 0, 1, 1, 2, 2];
        let s = group_confusion(&[1; 6], &actual, &groups, 3, 1).unwrap();
        assert_eq!(eod(&s).unwrap(), 0.0);
        assert_eq!(aod(&s).unwrap(), 0.0);
    }

    fn triples() -> impl Strategy<Value = (Vec<u8>, Vec<u8>, Vec<usize>)> {
        (4usize..80).prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..2, n),
                prop::collection::vec(0u8..2, n),
                prop::collection::vec(0usize..3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn group_relabeling_preserves_metrics((p, a, g) in triples(), perm in Just([2usize, 0, 1])) {
            let s = group_confusion(&p, &a, &g, 3, 1).unwrap();
            let relabeled: Vec<usize> = g.iter().map(|&x| perm[x]).collect();
            let t = group_confusion(&p, &a, &relabeled, 3, 1).unwrap();
            for (old, &new) in perm.iter().enumerate() {
                prop_assert_eq!(s.groups[old], t.groups[new]);
            }
            prop_assert_eq!(eod(&s).ok(), eod(&t).ok());
            prop_assert_eq!(aod(&s).ok(), aod(&t).ok());
        }

        #[test]
        fn two_group_aod_bounds_half_eod((p, a, g) in triples()) {
            let g: Vec<usize> = g.iter().map(|x| x % 2).collect();
            let s = group_confusion(&p, &a, &g, 2, 1).unwrap();
            if let (Ok(e), Ok(o)) = (eod(&s), aod(&s)) {
                prop_assert!(o >= e / 2.0 - 1e-15);
                prop_assert!((0.0..=1.0).contains(&o) && (0.0..=1.0).contains(&e));
            }
        }

        #[test]
        fn rational_counts_match_float_path((p, a, g) in triples()) {
            let s = group_confusion(&p, &a, &g, 3, 1).unwrap();
            // exact pairwise gaps via cross-multiplied integers
            let rate = |num: u64, den: u64| (num as i128, den as i128);
            let mut best: Option<(i128, i128)> = None;
            let defined: Vec<(i128, i128)> = s.groups.iter()
                .filter(|c| c.tp + c.fn_ > 0)
                .map(|c| rate(c.tp, c.tp + c.fn_))
                .collect();
            for (i, x) in defined.iter().enumerate() {
                for y in &defined[i + 1..] {
                    let num = (x.0 * y.1 - y.0 * x.1).abs();
                    let den = x.1 * y.1;
                    if best.is_none_or(|(bn, bd)| num * bd > bn * den) {
                        best = Some((num, den));
                    }
                }
            }
            match (best, eod(&s)) {
                (Some((n, d)), Ok(e)) => prop_assert!((e - n as f64 / d as f64).abs() <= 1e-12),
                (None, Err(_)) => {}
                (b, e) => prop_assert!(false, "{:?} vs {:?}", b, e),
            }
        }
    }
}

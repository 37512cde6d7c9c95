//! Calibrated edge selection.
//!
//! Test scores are compared with scores of reference pairs, which are
//! observed false edges held out from learning. The Counting Knockoff scan
//! ([`ck_select`]) picks the lowest cut-off `t` at which the estimated false
//! discovery proportion
//!
//! ```text
//! FDP(t) = (V(t) + 1) / (|Dcal| + 1) · |Dtest| / K(t)
//! ```
//!
//! is at most `α`, where `V(t)` and `K(t)` count reference and test scores
//! `>= t`. The selection is identical to Benjamini–Hochberg applied to the
//! conformal p-values `(1 + V(s)) / (|Dcal| + 1)`, and that identity is the
//! contract tested here. Ties count as exceedances, which keeps p-values
//! conservative without randomization.

use crate::error::{Error, Result};
use crate::generator::sample_reference;
use crate::graph::{partition_pairs, ObservedGraph, Pair, PairSets};
use crate::rng::{self, tag};
use crate::scoring::{build_scorer_with, LinkPredictor, ScorerKind};

/// Scores of the reference pairs and of the test pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub cal_scores: Vec<f64>,
    pub test: Vec<(Pair, f64)>,
}

impl ScoreTable {
    pub fn new(cal_scores: Vec<f64>, test: Vec<(Pair, f64)>) -> Result<Self> {
        let table = ScoreTable { cal_scores, test };
        table.validate()?;
        Ok(table)
    }

    /// Test pairs get synthetic identities `(0, k)`.
    pub fn from_scores(cal_scores: Vec<f64>, test_scores: &[f64]) -> Result<Self> {
        let test = test_scores
            .iter()
            .enumerate()
            .map(|(k, &s)| (Pair::new(0, k), s))
            .collect();
        ScoreTable::new(cal_scores, test)
    }

    fn validate(&self) -> Result<()> {
        if let Some(&value) = self.cal_scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScore {
                pair: Pair::new(0, 0),
                value,
            });
        }
        if let Some(&(pair, value)) = self.test.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::NonFiniteScore { pair, value });
        }
        Ok(())
    }

    pub fn test_scores(&self) -> Vec<f64> {
        self.test.iter().map(|&(_, s)| s).collect()
    }

    /// Conformal p-value of every test score, in test order.
    pub fn pvalues(&self) -> Result<Vec<f64>> {
        let cal = SortedCalibration::new(&self.cal_scores)?;
        Ok(self.test.iter().map(|&(_, s)| cal.pvalue(s)).collect())
    }

    /// Applies `f` to every score; used to check invariance under monotone maps.
    pub fn map_scores(&self, f: impl Fn(f64) -> f64) -> ScoreTable {
        ScoreTable {
            cal_scores: self.cal_scores.iter().map(|&s| f(s)).collect(),
            test: self.test.iter().map(|&(p, s)| (p, f(s))).collect(),
        }
    }
}

/// Calibration scores sorted ascending, for repeated p-value queries.
#[derive(Debug, Clone)]
pub struct SortedCalibration {
    sorted: Vec<f64>,
}

impl SortedCalibration {
    pub fn new(cal_scores: &[f64]) -> Result<Self> {
        if cal_scores.is_empty() {
            return Err(Error::EmptyCalibration);
        }
        let mut sorted = cal_scores.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(SortedCalibration { sorted })
    }

    /// `#{c : c >= s}`.
    pub fn exceedances(&self, s: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&c| c < s)
    }

    pub fn pvalue(&self, s: f64) -> f64 {
        (1 + self.exceedances(s)) as f64 / (self.sorted.len() + 1) as f64
    }
}

/// `(1 + #{c ∈ cal : c >= s}) / (|cal| + 1)`.
pub fn conformal_pvalue(s: f64, cal_scores: &[f64]) -> Result<f64> {
    if cal_scores.is_empty() {
        return Err(Error::EmptyCalibration);
    }
    let exceed = cal_scores.iter().filter(|&&c| c >= s).count();
    Ok((1 + exceed) as f64 / (cal_scores.len() + 1) as f64)
}

/// Benjamini–Hochberg step-up. Returns the indices of the rejected
/// hypotheses in ascending index order.
pub fn bh_select(pvalues: &[f64], level: f64) -> Vec<usize> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let mut k_star = 0;
    for (rank, &idx) in order.iter().enumerate() {
        let k = rank + 1;
        if pvalues[idx] <= k as f64 * level / m as f64 {
            k_star = k;
        }
    }
    let mut rejected: Vec<usize> = order[..k_star].to_vec();
    rejected.sort_unstable();
    rejected
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected test pairs, sorted.
    pub selected: Vec<Pair>,
    /// Cut-off: the selection is exactly the test pairs scoring `>=` it.
    pub threshold: Option<f64>,
    pub alpha_used: f64,
    pub pi0_hat: Option<f64>,
}

impl SelectionResult {
    pub(crate) fn empty(alpha_used: f64) -> Self {
        SelectionResult {
            selected: Vec::new(),
            threshold: None,
            alpha_used,
            pi0_hat: None,
        }
    }

    pub(crate) fn at_threshold(test: &[(Pair, f64)], threshold: f64, alpha_used: f64) -> Self {
        let mut selected: Vec<Pair> = test
            .iter()
            .filter(|&&(_, s)| s >= threshold)
            .map(|&(p, _)| p)
            .collect();
        selected.sort_unstable();
        SelectionResult {
            selected,
            threshold: Some(threshold),
            alpha_used,
            pi0_hat: None,
        }
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

/// Counting Knockoff selection at level `alpha`.
///
/// Scans cut-offs from the lowest pooled score upwards and stops at the
/// first one whose estimated FDP is at most `alpha`. Returns the empty set
/// when the test scores run out first.
pub fn ck_select(table: &ScoreTable, alpha: f64) -> Result<SelectionResult> {
    table.validate()?;
    if table.cal_scores.is_empty() {
        return Err(Error::EmptyCalibration);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1)")));
    }
    let n_cal = table.cal_scores.len();
    let m = table.test.len();
    if m == 0 {
        return Ok(SelectionResult::empty(alpha));
    }

    // (score, is_reference), ascending
    let mut pooled: Vec<(f64, bool)> = table
        .cal_scores
        .iter()
        .map(|&s| (s, true))
        .chain(table.test.iter().map(|&(_, s)| (s, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut v = n_cal;
    let mut k = m;
    let mut pos = 0;
    while pos < pooled.len() && k >= 1 {
        let cut = pooled[pos].0;
        let group_end = pos + pooled[pos..].partition_point(|&(s, _)| s.total_cmp(&cut).is_eq());
        let has_test = pooled[pos..group_end].iter().any(|&(_, is_ref)| !is_ref);
        if has_test {
            // FDP(cut) <= alpha, written as p <= K·alpha/m so that the
            // comparison rounds exactly as in `bh_select`.
            let p = (v + 1) as f64 / (n_cal + 1) as f64;
            if p <= k as f64 * alpha / m as f64 {
                return Ok(SelectionResult::at_threshold(&table.test, cut, alpha));
            }
        }
        for &(_, is_ref) in &pooled[pos..group_end] {
            if is_ref {
                v -= 1;
            } else {
                k -= 1;
            }
        }
        pos = group_end;
    }
    Ok(SelectionResult::empty(alpha))
}

/// `|DtrNull| / |Dtr|`.
pub fn estimate_pi0_ratio(pair_sets: &PairSets) -> Result<f64> {
    if pair_sets.dtr().is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    Ok(pair_sets.dtr_null().len() as f64 / pair_sets.dtr().len() as f64)
}

/// Storey's estimator `min(1, (1 + #{p > λ}) / (m (1 − λ)))`.
pub fn estimate_pi0_storey(pvalues: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param(
            "storey_lambda",
            format!("{lambda} is not in (0, 1)"),
        ));
    }
    if pvalues.is_empty() {
        return Ok(1.0);
    }
    let above = pvalues.iter().filter(|&&p| p > lambda).count();
    Ok(((1 + above) as f64 / (pvalues.len() as f64 * (1.0 - lambda))).min(1.0))
}

const MAX_LEVEL: f64 = 1.0 - 1e-12;

/// `α / π̂₀`, capped just below 1. A zero estimate disables the adjustment.
pub fn adjusted_level(alpha: f64, pi0_hat: f64) -> f64 {
    if pi0_hat > 0.0 {
        (alpha / pi0_hat).min(MAX_LEVEL)
    } else {
        log::warn!("estimated null proportion is 0; running at the nominal level");
        alpha
    }
}

/// How the working level is derived from the nominal `α`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Adjustment {
    None,
    /// `π̂₀ = |DtrNull| / |Dtr|`.
    #[default]
    Ratio,
    Storey {
        lambda: f64,
    },
}

/// Reference and test scores of one conformal run, ready for selection at
/// any number of levels.
#[derive(Debug, Clone)]
pub struct CalibratedScores {
    pub table: ScoreTable,
    pub dcal: Vec<Pair>,
    pub reference_capped: bool,
    pub pi0_ratio: f64,
    /// Pairs the scorer learned from.
    pub training_pairs: Vec<Pair>,
}

impl CalibratedScores {
    /// Steps 1–3 of the procedure: draw the reference set, fit on the masked
    /// graph, score reference and test pairs.
    pub fn prepare(
        graph: &ObservedGraph,
        predictor: Box<dyn LinkPredictor>,
        cal_size: usize,
        seed: u64,
    ) -> Result<Self> {
        let sets = partition_pairs(graph);
        if sets.dtest().is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let reference = sample_reference(
            &sets,
            cal_size,
            &mut rng::stream(rng::split(seed, tag::REFERENCE)),
        )?;
        let scorer = build_scorer_with(
            predictor,
            graph,
            &reference.pairs,
            rng::split(seed, tag::FIT),
        )?;
        let cal_scores = scorer.scores(&reference.pairs)?;
        let test_scores = scorer.scores(sets.dtest())?;
        let test = sets.dtest().iter().copied().zip(test_scores).collect();
        let pi0_ratio = estimate_pi0_ratio(&sets)?;
        Ok(CalibratedScores {
            table: ScoreTable::new(cal_scores, test)?,
            dcal: reference.pairs,
            reference_capped: reference.capped,
            pi0_ratio,
            training_pairs: scorer.training_pairs().to_vec(),
        })
    }

    /// Step 4: Counting Knockoff at the (possibly adjusted) level.
    pub fn select(&self, alpha: f64, adjustment: Adjustment) -> Result<SelectionResult> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", format!("{alpha} is not in (0, 1)")));
        }
        let pi0 = match adjustment {
            Adjustment::None => None,
            Adjustment::Ratio => Some(self.pi0_ratio),
            Adjustment::Storey { lambda } => {
                Some(estimate_pi0_storey(&self.table.pvalues()?, lambda)?)
            }
        };
        let level = pi0.map_or(alpha, |p| adjusted_level(alpha, p));
        let mut result = ck_select(&self.table, level)?;
        result.pi0_hat = pi0;
        Ok(result)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalConfig {
    pub alpha: f64,
    pub cal_size: usize,
    pub adjustment: Adjustment,
}

impl Default for ConformalConfig {
    fn default() -> Self {
        ConformalConfig {
            alpha: 0.1,
            cal_size: 5000,
            adjustment: Adjustment::Ratio,
        }
    }
}

/// The full procedure: sample the reference set from the observed false
/// edges, fit the scorer with those pairs masked, score reference and test
/// pairs, and run Counting Knockoff.
pub fn conformal_link_predict(
    graph: &ObservedGraph,
    kind: &ScorerKind,
    config: &ConformalConfig,
    seed: u64,
) -> Result<SelectionResult> {
    conformal_link_predict_with(graph, kind.predictor(), config, seed)
}

pub fn conformal_link_predict_with(
    graph: &ObservedGraph,
    predictor: Box<dyn LinkPredictor>,
    config: &ConformalConfig,
    seed: u64,
) -> Result<SelectionResult> {
    let scores = CalibratedScores::prepare(graph, predictor, config.cal_size, seed)?;
    if scores.reference_capped {
        log::warn!(
            "requested {} reference pairs but only {} observed false edges exist; using all of them",
            config.cal_size,
            scores.dcal.len()
        );
    }
    scores.select(config.alpha, config.adjustment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(cal: &[f64], test: &[f64]) -> ScoreTable {
        ScoreTable::from_scores(cal.to_vec(), test).unwrap()
    }

    fn selected_scores(t: &ScoreTable, r: &SelectionResult) -> Vec<f64> {
        let mut out: Vec<f64> = t
            .test
            .iter()
            .filter(|(p, _)| r.selected.contains(p))
            .map(|&(_, s)| s)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn pvalue_examples() {
        let cal = [0.1, 0.4, 0.7];
        assert_eq!(conformal_pvalue(0.9, &cal).unwrap(), 0.25);
        assert_eq!(conformal_pvalue(0.0, &cal).unwrap(), 1.0);
        assert_eq!(conformal_pvalue(0.4, &cal).unwrap(), 0.75);
        assert!(matches!(
            conformal_pvalue(0.4, &[]),
            Err(Error::EmptyCalibration)
        ));
        let sorted = SortedCalibration::new(&cal).unwrap();
        for s in [0.0, 0.1, 0.25, 0.4, 0.7, 0.9] {
            assert_eq!(sorted.pvalue(s), conformal_pvalue(s, &cal).unwrap());
        }
    }

    #[test]
    fn bh_examples() {
        assert!(bh_select(&[1.0, 1.0, 1.0], 0.1).is_empty());
        assert_eq!(bh_select(&[0.05], 0.1), vec![0]);
        assert_eq!(bh_select(&[0.25, 0.5, 0.25, 0.75], 0.5), vec![0, 2]);
        assert!(bh_select(&[], 0.1).is_empty());
    }

    #[test]
    fn ck_examples() {
        let t = table(&[0.1, 0.4, 0.7], &[0.2, 0.5, 0.8, 0.9]);
        assert_eq!(t.pvalues().unwrap(), vec![0.75, 0.5, 0.25, 0.25]);
        let r = ck_select(&t, 0.5).unwrap();
        assert_eq!(selected_scores(&t, &r), vec![0.8, 0.9]);
        assert_eq!(r.threshold, Some(0.8));

        let none = table(&[0.5, 0.6, 0.7], &[0.1, 0.2]);
        assert!(ck_select(&none, 0.9).unwrap().is_empty());

        let cal: Vec<f64> = (0..200).map(|k| k as f64 / 1000.0).collect();
        let all = table(&cal, &[1.0, 2.0, 3.0]);
        assert_eq!(ck_select(&all, 0.999).unwrap().len(), 3);
    }

    #[test]
    fn ck_rejects_bad_input() {
        assert!(matches!(
            ck_select(&ScoreTable::from_scores(vec![], &[1.0]).unwrap(), 0.1),
            Err(Error::EmptyCalibration)
        ));
        assert!(ck_select(&table(&[0.0], &[1.0]), 1.0).is_err());
        assert!(ScoreTable::from_scores(vec![f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn pi0_estimators() {
        assert!((estimate_pi0_storey(&[0.9; 10], 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((estimate_pi0_storey(&[0.1; 10], 0.5).unwrap() - 0.2).abs() < 1e-15);
        let mut ps = vec![0.9; 40];
        ps.extend(vec![0.1; 60]);
        assert!((estimate_pi0_storey(&ps, 0.5).unwrap() - 0.82).abs() < 1e-12);
        assert!(estimate_pi0_storey(&ps, 1.0).is_err());

        let sets = PairSets {
            dtr: (0..100).map(|k| Pair::new(0, k)).collect(),
            dtr_null: (0..80).map(|k| Pair::new(0, k)).collect(),
            dtr_alt: (80..100).map(|k| Pair::new(0, k)).collect(),
            ..PairSets::default()
        };
        assert!((estimate_pi0_ratio(&sets).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            estimate_pi0_ratio(&PairSets::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn level_adjustment() {
        assert!((adjusted_level(0.1, 0.8) - 0.125).abs() < 1e-15);
        assert_eq!(adjusted_level(0.1, 1.0), 0.1);
        let capped = adjusted_level(0.5, 0.4);
        assert!(capped < 1.0 && capped > 0.999);
        assert_eq!(adjusted_level(0.1, 0.0), 0.1);
    }

    fn arb_table() -> impl Strategy<Value = ScoreTable> {
        let value = prop_oneof![(-50i32..50).prop_map(|x| x as f64 / 10.0), -5.0f64..5.0];
        (
            proptest::collection::vec(value.clone(), 1..60),
            proptest::collection::vec(value, 0..60),
        )
            .prop_map(|(cal, test)| ScoreTable::from_scores(cal, &test).unwrap())
    }

    proptest! {
        #[test]
        fn ck_equals_bh_on_conformal_pvalues(t in arb_table(), alpha in 0.01f64..0.99) {
            let ck = ck_select(&t, alpha).unwrap();
            let bh: Vec<Pair> = bh_select(&t.pvalues().unwrap(), alpha)
                .into_iter()
                .map(|k| t.test[k].0)
                .collect();
            prop_assert_eq!(&ck.selected, &bh);
            if let Some(th) = ck.threshold {
                let expected: Vec<Pair> = t.test.iter().filter(|(_, s)| *s >= th).map(|(p, _)| *p).collect();
                prop_assert_eq!(&ck.selected, &expected);
            }
        }

        #[test]
        fn selection_grows_with_alpha(t in arb_table(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let small = ck_select(&t, lo).unwrap();
            let large = ck_select(&t, hi).unwrap();
            prop_assert!(small.selected.iter().all(|p| large.selected.contains(p)));
        }
    }
}

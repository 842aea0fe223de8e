//! Evaluation metrics over (seed, candidate) property pairs and candidate
//! design sets, plus CSV reporting with a mean +/- std summary mode.

use std::collections::BTreeMap;
use std::io::Write;

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::matching::DesignSet;

/// Default coordinate tolerance for uniqueness/novelty on toy-scale data.
pub const DEFAULT_METRIC_TOL: f64 = 1e-6;

/// Percentage of pairs whose candidate STRICTLY improves on the seed.
pub fn ratio_of_improvement(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidConfig("ratio_of_improvement on empty input".into()));
    }
    let improved = pairs.iter().filter(|(seed, cand)| cand > seed).count();
    Ok(100.0 * improved as f64 / pairs.len() as f64)
}

/// Mean property gain (candidate minus seed), in property units.
pub fn average_improvement(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidConfig("average_improvement on empty input".into()));
    }
    Ok(pairs.iter().map(|(seed, cand)| cand - seed).sum::<f64>() / pairs.len() as f64)
}

fn linf(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Percentage of distinct candidates, where two candidates are "the same"
/// when within `tol` in L-infinity. Greedy first-occurrence clustering in
/// input order; the resulting percentage is order-invariant.
pub fn uniqueness(candidates: &[Array1<f64>], tol: f64) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("uniqueness on empty input".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tol must be > 0".into()));
    }
    let mut representatives: Vec<&Array1<f64>> = Vec::new();
    for c in candidates {
        if !representatives.iter().any(|r| linf(r.view(), c.view()) <= tol) {
            representatives.push(c);
        }
    }
    Ok(100.0 * representatives.len() as f64 / candidates.len() as f64)
}

/// Percentage of candidates farther than `tol` (L-infinity) from every
/// training design.
pub fn novelty(candidates: &[Array1<f64>], training: &DesignSet, tol: f64) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("novelty on empty input".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tol must be > 0".into()));
    }
    let novel = candidates
        .iter()
        .filter(|c| (0..training.len()).all(|i| linf(training.design(i), c.view()) > tol))
        .count();
    Ok(100.0 * novel as f64 / candidates.len() as f64)
}

/// One evaluated (method, dataset, repetition) cell. The `loglik_sum_*`
/// fields are summed log-likelihoods under the training-split KDE (higher is
/// better; they are typically negative).
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub repetition: usize,
    pub ratio_of_improvement: f64,
    pub average_improvement: f64,
    pub uniqueness: f64,
    pub novelty: f64,
    pub loglik_sum_seeds: f64,
    pub loglik_sum_candidates: f64,
}

const METRIC_NAMES: [&str; 6] = [
    "ratio_of_improvement",
    "average_improvement",
    "uniqueness",
    "novelty",
    "loglik_sum_seeds",
    "loglik_sum_candidates",
];

impl EvalReport {
    fn metric_values(&self) -> [f64; 6] {
        [
            self.ratio_of_improvement,
            self.average_improvement,
            self.uniqueness,
            self.novelty,
            self.loglik_sum_seeds,
            self.loglik_sum_candidates,
        ]
    }
}

/// One CSV row per report, with a header.
pub fn write_reports_csv<W: Write>(w: W, reports: &[EvalReport]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let mut header = vec!["method", "dataset", "n", "d", "repetition"];
    header.extend(METRIC_NAMES);
    writer.write_record(&header)?;
    for r in reports {
        let mut record = vec![
            r.method.clone(),
            r.dataset.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.repetition.to_string(),
        ];
        record.extend(r.metric_values().iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Mean and sample standard deviation of every metric, grouped by
/// (method, dataset, n, d) over repetitions.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub method: String,
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub repetitions: usize,
    pub means: [f64; 6],
    pub stds: [f64; 6],
}

pub fn summarize(reports: &[EvalReport]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, usize, usize), Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        groups
            .entry((r.method.clone(), r.dataset.clone(), r.n, r.d))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((method, dataset, n, d), rows)| {
            let k = rows.len() as f64;
            let mut means = [0.0; 6];
            let mut stds = [0.0; 6];
            for r in &rows {
                for (m, v) in means.iter_mut().zip(r.metric_values()) {
                    *m += v / k;
                }
            }
            if rows.len() > 1 {
                for r in &rows {
                    for ((s, m), v) in stds.iter_mut().zip(&means).zip(r.metric_values()) {
                        *s += (v - m) * (v - m) / (k - 1.0);
                    }
                }
                for s in &mut stds {
                    *s = s.sqrt();
                }
            }
            SummaryRow { method, dataset, n, d, repetitions: rows.len(), means, stds }
        })
        .collect()
}

/// One row per (method, dataset, n, d) with `<metric>_mean` / `<metric>_std`
/// column pairs.
pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let mut header: Vec<String> =
        ["method", "dataset", "n", "d", "repetitions"].iter().map(|s| s.to_string()).collect();
    for name in METRIC_NAMES {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_std"));
    }
    writer.write_record(&header)?;
    for r in rows {
        let mut record = vec![
            r.method.clone(),
            r.dataset.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.repetitions.to_string(),
        ];
        for k in 0..6 {
            record.push(r.means[k].to_string());
            record.push(r.stds[k].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn ratio_hand_examples() {
        assert_eq!(ratio_of_improvement(&[(0.0, 1.0), (1.0, 2.0)]).unwrap(), 100.0);
        // ties do not count as improvement
        assert_eq!(
            ratio_of_improvement(&[(1.0, 2.0), (3.0, 3.0), (5.0, 4.0), (0.0, 1.0)]).unwrap(),
            50.0
        );
        assert_eq!(ratio_of_improvement(&[(2.0, 2.0), (7.0, 7.0)]).unwrap(), 0.0);
        assert!(ratio_of_improvement(&[]).is_err());
    }

    #[test]
    fn ratio_plus_complement_is_exactly_100() {
        let pairs = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.5), (3.0, 9.0), (4.0, 4.0)];
        let ri = ratio_of_improvement(&pairs).unwrap();
        let not = pairs.iter().filter(|(s, c)| c <= s).count() as f64 * 100.0 / pairs.len() as f64;
        assert_eq!(ri + not, 100.0);
    }

    #[test]
    fn average_improvement_hand_examples() {
        assert_eq!(average_improvement(&[(3.0, 3.0), (1.0, 1.0)]).unwrap(), 0.0);
        assert_eq!(average_improvement(&[(0.0, 1.0), (0.0, 3.0)]).unwrap(), 2.0);
        // shifting all properties by a constant leaves AI unchanged
        let base = [(0.5, 1.0), (2.0, 1.5)];
        let shifted: Vec<_> = base.iter().map(|(s, c)| (s + 7.0, c + 7.0)).collect();
        assert_eq!(average_improvement(&base).unwrap(), average_improvement(&shifted).unwrap());
    }

    #[test]
    fn uniqueness_hand_examples() {
        let a = array![0.0, 0.0];
        let b = array![1.0, 1.0];
        assert_abs_diff_eq!(
            uniqueness(&[a.clone(), a.clone(), a.clone()], 1e-6).unwrap(),
            100.0 / 3.0,
            epsilon = 1e-12
        );
        assert_eq!(uniqueness(&[a.clone(), b.clone()], 1e-6).unwrap(), 100.0);
        let two_thirds = uniqueness(&[a.clone(), a.clone(), b.clone()], 1e-6).unwrap();
        assert_abs_diff_eq!(two_thirds, 200.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn uniqueness_percentage_is_order_invariant() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let mut candidates: Vec<Array1<f64>> = (0..20)
            .map(|_| array![rng.random_range(0..4) as f64, rng.random_range(0..4) as f64])
            .collect();
        let before = uniqueness(&candidates, 1e-6).unwrap();
        candidates.shuffle(&mut rng);
        assert_eq!(uniqueness(&candidates, 1e-6).unwrap(), before);
    }

    #[test]
    fn novelty_hand_examples() {
        let training = DesignSet::unlabeled(array![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let copy = array![0.0, 0.0];
        let fresh = array![5.0, 5.0];
        assert_eq!(novelty(&[copy.clone(), copy.clone()], &training, 1e-6).unwrap(), 0.0);
        assert_eq!(novelty(&[fresh.clone()], &training, 1e-6).unwrap(), 100.0);
        assert_eq!(novelty(&[copy, fresh], &training, 1e-6).unwrap(), 50.0);
    }

    fn report(method: &str, rep: usize, ri: f64) -> EvalReport {
        EvalReport {
            method: method.into(),
            dataset: "toy".into(),
            n: 10,
            d: 2,
            repetition: rep,
            ratio_of_improvement: ri,
            average_improvement: 1.0,
            uniqueness: 100.0,
            novelty: 100.0,
            loglik_sum_seeds: -5.0,
            loglik_sum_candidates: -4.0,
        }
    }

    #[test]
    fn summary_matches_direct_recomputation() {
        let reports = vec![report("a", 0, 80.0), report("a", 1, 90.0), report("b", 0, 50.0)];
        let summary = summarize(&reports);
        assert_eq!(summary.len(), 2);
        let a = &summary[0];
        assert_eq!(a.method, "a");
        assert_eq!(a.repetitions, 2);
        assert_abs_diff_eq!(a.means[0], 85.0, epsilon = 1e-12);
        // sample std of {80, 90}
        assert_abs_diff_eq!(a.stds[0], 50.0f64.sqrt(), epsilon = 1e-12);
        let b = &summary[1];
        assert_eq!(b.repetitions, 1);
        assert_eq!(b.stds[0], 0.0);
    }

    #[test]
    fn report_csv_has_expected_header_and_rows() {
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[report("a", 0, 80.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,dataset,n,d,repetition,ratio_of_improvement,average_improvement,uniqueness,novelty,loglik_sum_seeds,loglik_sum_candidates"
        );
        assert_eq!(lines.next().unwrap(), "a,toy,10,2,0,80,1,100,100,-5,-4");
    }
}

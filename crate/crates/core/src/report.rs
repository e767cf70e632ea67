//! Regret, tie-broken argmin, and the per-experiment selection report.

use serde::{Deserialize, Serialize};

use crate::error::{DdlError, Result};

/// `oracle_errors[chosen] - min(oracle_errors)`.
pub fn regret(oracle_errors: &[f64], chosen_index: usize) -> Result<f64> {
    if oracle_errors.is_empty() {
        return Err(DdlError::config("regret of an empty candidate grid"));
    }
    let chosen = *oracle_errors.get(chosen_index).ok_or_else(|| {
        DdlError::config(format!("chosen index {chosen_index} outside grid of {}", oracle_errors.len()))
    })?;
    let best = oracle_errors.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(chosen - best)
}

/// Index of the smallest score; ties go to the smallest index.
///
/// Candidate grids are ordered simplest model first, so ties prefer the
/// simpler model.
pub fn argmin_tiebreak(scores: &[f64]) -> Result<usize> {
    if scores.is_empty() {
        return Err(DdlError::config("argmin of an empty score list"));
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            return Err(DdlError::computation(format!("score of candidate {i} is NaN")));
        }
        if s < scores[best] {
            best = i;
        }
    }
    Ok(best)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = 0.5 * (i + j) as f64;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `None` when the
/// lengths differ, fewer than two values are given, or either side is
/// constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 || a.iter().chain(b).any(|v| v.is_nan()) {
        return None;
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let mean = (a.len() - 1) as f64 / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean).powi(2);
        sbb += (y - mean).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub scores: Vec<f64>,
    pub chosen: usize,
    pub regret: f64,
}

/// Scores, choices and regrets of several selection methods on one
/// candidate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub candidates: Vec<f64>,
    /// Generalization error (bits) of each candidate's full-data fit.
    pub oracle_error: Vec<f64>,
    pub methods: Vec<MethodResult>,
    pub seed: u64,
}

/// Column names of [`SelectionReport::csv_rows`].
pub const REPORT_CSV_HEADER: &str = "candidate,method,score_bits,oracle_error_bits,chosen,regret_bits,seed";

impl SelectionReport {
    pub fn new(candidates: Vec<f64>, oracle_error: Vec<f64>, seed: u64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(DdlError::config("empty candidate grid"));
        }
        if candidates.len() != oracle_error.len() {
            return Err(DdlError::config(format!(
                "{} candidates but {} oracle errors",
                candidates.len(),
                oracle_error.len()
            )));
        }
        Ok(Self { candidates, oracle_error, methods: Vec::new(), seed })
    }

    /// Adds a method that chooses by minimum score; regret is measured
    /// against the oracle errors of the grid.
    pub fn add_method(&mut self, method: impl Into<String>, scores: Vec<f64>) -> Result<&MethodResult> {
        self.check_len(&scores)?;
        let chosen = argmin_tiebreak(&scores)?;
        let regret = regret(&self.oracle_error, chosen)?;
        self.methods.push(MethodResult { method: method.into(), scores, chosen, regret });
        Ok(self.methods.last().unwrap())
    }

    /// Adds a method whose regret is computed externally, e.g. against a
    /// different fit of the chosen candidate. Such a regret may be negative.
    pub fn add_method_with_regret(
        &mut self,
        method: impl Into<String>,
        scores: Vec<f64>,
        regret: f64,
    ) -> Result<&MethodResult> {
        self.check_len(&scores)?;
        let chosen = argmin_tiebreak(&scores)?;
        self.methods.push(MethodResult { method: method.into(), scores, chosen, regret });
        Ok(self.methods.last().unwrap())
    }

    fn check_len(&self, scores: &[f64]) -> Result<()> {
        if scores.len() != self.candidates.len() {
            return Err(DdlError::config(format!("{} scores for {} candidates", scores.len(), self.candidates.len())));
        }
        Ok(())
    }

    pub fn method(&self, name: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One row per candidate x method, columns as in [`REPORT_CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows = Vec::with_capacity(self.candidates.len() * self.methods.len());
        for m in &self.methods {
            for (i, c) in self.candidates.iter().enumerate() {
                rows.push(format!(
                    "{},{},{},{},{},{},{}",
                    format_real(*c),
                    m.method,
                    format_real(m.scores[i]),
                    format_real(self.oracle_error[i]),
                    u8::from(m.chosen == i),
                    format_real(m.regret),
                    self.seed
                ));
            }
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for r in self.csv_rows() {
            out.push_str(&r);
            out.push('\n');
        }
        out
    }
}

/// Formats with 12 significant digits, `%g` style: plain notation for
/// moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        // Ranks (0, 1.5, 1.5) against (0, 1, 2).
        let r = spearman(&[1.0, 5.0, 5.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
        assert_eq!(spearman(&[1.0], &[1.0]), None);
        assert_eq!(spearman(&[1.0, 2.0], &[1.0]), None);
    }

    #[test]
    fn regret_examples() {
        assert!((regret(&[0.5, 0.3, 0.4], 0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(regret(&[0.5, 0.3, 0.4], 1).unwrap(), 0.0);
        assert_eq!(regret(&[1.7], 0).unwrap(), 0.0);
        assert!(matches!(regret(&[], 0), Err(DdlError::Config(_))));
        assert!(regret(&[1.0], 1).is_err());
    }

    #[test]
    fn argmin_examples() {
        assert_eq!(argmin_tiebreak(&[3.0, 1.0, 2.0]).unwrap(), 1);
        assert_eq!(argmin_tiebreak(&[1.0, 1.0, 2.0]).unwrap(), 0);
        assert_eq!(argmin_tiebreak(&[5.0]).unwrap(), 0);
        match argmin_tiebreak(&[1.0, f64::NAN]) {
            Err(DdlError::Computation(msg)) => assert!(msg.contains("candidate 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn report_rows_and_json() {
        let mut r = SelectionReport::new(vec![0.1, 1.0], vec![2.0, 1.5], 9).unwrap();
        r.add_method("ddl", vec![3.0, 2.0]).unwrap();
        r.add_method("cv", vec![1.0, 2.0]).unwrap();
        assert_eq!(r.method("ddl").unwrap().regret, 0.0);
        assert_eq!(r.method("cv").unwrap().regret, 0.5);
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0.1,ddl,3,2,0,0,9");
        let back: SelectionReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.add_method("bad", vec![1.0]).is_err());
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.1), "0.1");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(1e-8), "1e-8");
        assert_eq!(format_real(123456.5), "123456.5");
        assert_eq!(format_real(-2.5e20), "-2.5e20");
        assert_eq!(format_real(100.0), "100");
    }
}

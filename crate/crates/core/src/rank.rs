//! Rank tables, the Friedman test and the Bonferroni-Dunn critical
//! difference for comparing several methods over several datasets.

use crate::error::{Error, Result};

/// Per-dataset ranks of each method (1 = best, ties share the midrank).
#[derive(Clone, Debug, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `datasets.len()` rows of `methods.len()` ranks.
    pub ranks: Vec<Vec<f64>>,
    pub avg_rank: Vec<f64>,
}

impl RankTable {
    /// Number of datasets, `M`.
    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    /// Number of methods, `l`.
    pub fn n_methods(&self) -> usize {
        self.methods.len()
    }
}

/// Ranks one row; ties receive the mean of the positions they span.
pub fn midranks(scores: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = scores[a].total_cmp(&scores[b]);
        if higher_is_better {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their average.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

pub fn rank_rows(
    methods: &[String],
    datasets: &[String],
    scores: &[Vec<f64>],
    higher_is_better: bool,
) -> Result<RankTable> {
    let l = methods.len();
    let m = datasets.len();
    if l < 2 || m < 2 {
        return Err(Error::InvalidParameter(format!(
            "rank table needs at least 2 datasets and 2 methods, got {m}x{l}"
        )));
    }
    if scores.len() != m || scores.iter().any(|row| row.len() != l) {
        return Err(Error::InvalidParameter(format!(
            "score matrix must be {m}x{l}"
        )));
    }
    for (row, values) in scores.iter().enumerate() {
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteScore { row, col });
        }
    }
    let ranks: Vec<Vec<f64>> = scores
        .iter()
        .map(|row| midranks(row, higher_is_better))
        .collect();
    let avg_rank = (0..l)
        .map(|z| ranks.iter().map(|row| row[z]).sum::<f64>() / m as f64)
        .collect();
    Ok(RankTable {
        methods: methods.to_vec(),
        datasets: datasets.to_vec(),
        ranks,
        avg_rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FriedmanReport {
    pub chi2: f64,
    pub f_f: f64,
    pub dof1: usize,
    pub dof2: usize,
}

/// Friedman chi-square from average ranks over `n_datasets` datasets.
pub fn friedman_chi2(avg_rank: &[f64], n_datasets: usize) -> f64 {
    let l = avg_rank.len() as f64;
    let m = n_datasets as f64;
    let sum_sq: f64 = avg_rank.iter().map(|r| r * r).sum();
    12.0 * m / (l * (l + 1.0)) * (sum_sq - l * (l + 1.0) * (l + 1.0) / 4.0)
}

/// Iman-Davenport `F_F = (M-1) chi2 / (M(l-1) - chi2)`.
pub fn friedman_f(chi2: f64, n_datasets: usize, n_methods: usize) -> Result<f64> {
    let m = n_datasets as f64;
    let denom = m * (n_methods as f64 - 1.0) - chi2;
    if denom == 0.0 {
        return Err(Error::FriedmanDegenerate { chi2 });
    }
    Ok((m - 1.0) * chi2 / denom)
}

pub fn friedman(table: &RankTable) -> Result<FriedmanReport> {
    let m = table.n_datasets();
    let l = table.n_methods();
    let chi2 = friedman_chi2(&table.avg_rank, m);
    let f_f = friedman_f(chi2, m, l)?;
    Ok(FriedmanReport {
        chi2,
        f_f,
        dof1: l - 1,
        dof2: (l - 1) * (m - 1),
    })
}

/// `CD = q_alpha * sqrt(l (l + 1) / (6 N))` with `N` the number of datasets.
pub fn bd_critical_difference(n_methods: usize, n_datasets: usize, q_alpha: f64) -> f64 {
    let l = n_methods as f64;
    q_alpha * (l * (l + 1.0) / (6.0 * n_datasets as f64)).sqrt()
}

// Two-tailed Bonferroni-Dunn critical values for 2..=10 classifiers.
const Q_ALPHA_005: [f64; 9] = [
    1.960, 2.241, 2.394, 2.498, 2.576, 2.638, 2.690, 2.734, 2.773,
];
const Q_ALPHA_010: [f64; 9] = [
    1.645, 1.960, 2.128, 2.241, 2.326, 2.394, 2.450, 2.498, 2.539,
];

/// Tabulated `q_alpha` for `alpha` in {0.05, 0.1} and `2 <= l <= 10`.
pub fn bonferroni_dunn_q(alpha: f64, n_methods: usize) -> Option<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_ALPHA_005
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_ALPHA_010
    } else {
        return None;
    };
    n_methods.checked_sub(2).and_then(|i| table.get(i)).copied()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub method: String,
    pub avg_rank: f64,
    /// Average-rank gap to the best method.
    pub difference: f64,
    pub different: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceReport {
    pub q_alpha: f64,
    pub cd: f64,
    pub best: String,
    pub verdicts: Vec<Verdict>,
}

/// Compares every method with the best-ranked one: different iff the gap in
/// average rank reaches the critical difference.
pub fn significance_report(table: &RankTable, q_alpha: f64) -> SignificanceReport {
    let cd = bd_critical_difference(table.n_methods(), table.n_datasets(), q_alpha);
    let best_idx = table
        .avg_rank
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let best_rank = table.avg_rank[best_idx];
    let verdicts = table
        .methods
        .iter()
        .zip(&table.avg_rank)
        .map(|(method, &avg_rank)| {
            let difference = avg_rank - best_rank;
            Verdict {
                method: method.clone(),
                avg_rank,
                difference,
                different: difference >= cd,
            }
        })
        .collect();
    SignificanceReport {
        q_alpha,
        cd,
        best: table.methods[best_idx].clone(),
        verdicts,
    }
}

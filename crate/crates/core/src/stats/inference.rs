use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::table::{col_totals, row_totals};
use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    ChiSquare,
    FisherExact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub method: Method,
    /// Pearson statistic; absent for Fisher.
    pub statistic: Option<f64>,
    pub df: Option<u32>,
    pub p_value: f64,
    pub expected_min: f64,
    /// Set when the Fisher p-value was estimated by sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarlo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub samples: u64,
    pub std_error: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherOptions {
    /// Largest number of tables the exact path may visit.
    pub exact_limit: u64,
    pub samples: u64,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5EED;

impl Default for FisherOptions {
    fn default() -> Self {
        FisherOptions {
            exact_limit: 10_000_000,
            samples: 100_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Expected counts fall below this in some cell: use Fisher.
pub const EXPECTED_THRESHOLD: f64 = 5.0;

fn check_shape(t: &[Vec<u64>]) -> Result<usize, StatsError> {
    let c = t.first().map_or(0, Vec::len);
    if t.iter().any(|r| r.len() != c) {
        return Err(StatsError::Shape);
    }
    Ok(c)
}

/// Smallest expected cell count under independence; 0 for an empty table.
pub fn expected_min(t: &[Vec<u64>]) -> f64 {
    let c = t.first().map_or(0, Vec::len);
    let rows = row_totals(t);
    let cols = col_totals(t, c);
    let n: u64 = rows.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let rmin = *rows.iter().min().unwrap_or(&0) as f64;
    let cmin = *cols.iter().min().unwrap_or(&0) as f64;
    rmin * cmin / n as f64
}

/// Pearson χ² test without continuity correction.
pub fn chi_square(t: &[Vec<u64>]) -> Result<TestResult, StatsError> {
    let c = check_shape(t)?;
    let rows = row_totals(t);
    let cols = col_totals(t, c);
    if t.is_empty() || c == 0 || rows.contains(&0) || cols.contains(&0) {
        return Err(StatsError::Degenerate);
    }
    let n: u64 = rows.iter().sum();
    let mut stat = 0.0;
    for (i, row) in t.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let exp = rows[i] as f64 * cols[j] as f64 / n as f64;
            stat += (obs as f64 - exp).powi(2) / exp;
        }
    }
    let df = ((t.len() - 1) * (c - 1)) as u32;
    let p_value = if df == 0 {
        1.0
    } else {
        ChiSquared::new(df as f64).expect("positive df").sf(stat)
    };
    Ok(TestResult {
        method: Method::ChiSquare,
        statistic: Some(stat),
        df: Some(df),
        p_value,
        expected_min: expected_min(t),
        monte_carlo: None,
        warning: None,
    })
}

fn log_factorials(n: u64) -> Vec<f64> {
    let mut lf = vec![0.0; n as usize + 1];
    for k in 1..=n as usize {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// Tolerance when comparing a table's probability to the observed one.
const REL_TOL: f64 = 1e-10;

struct Enumerator<'a> {
    lf: &'a [f64],
    rows: usize,
    cols: usize,
    /// Log-probability bound: tables at or below it count.
    bound: f64,
    constant: f64,
    p: f64,
    visited: u64,
    limit: u64,
}

impl Enumerator<'_> {
    /// Fills row `i`, column `j` given remaining row and column sums.
    fn fill(&mut self, i: usize, j: usize, row_rem: &mut [u64], col_rem: &mut [u64], acc: f64) -> bool {
        if i == self.rows - 1 {
            // Last row is forced by the column remainders.
            let last: f64 = col_rem.iter().map(|&x| self.lf[x as usize]).sum();
            self.visited += 1;
            if self.visited > self.limit {
                return false;
            }
            let logp = self.constant - acc - last;
            if logp <= self.bound {
                self.p += logp.exp();
            }
            return true;
        }
        if j == self.cols - 1 {
            let x = row_rem[i];
            col_rem[j] -= x;
            let ok = self.fill(i + 1, 0, row_rem, col_rem, acc + self.lf[x as usize]);
            col_rem[j] += x;
            return ok;
        }
        let later: u64 = col_rem[j + 1..].iter().sum();
        let lo = row_rem[i].saturating_sub(later);
        let hi = row_rem[i].min(col_rem[j]);
        for x in lo..=hi {
            row_rem[i] -= x;
            col_rem[j] -= x;
            let ok = self.fill(i, j + 1, row_rem, col_rem, acc + self.lf[x as usize]);
            row_rem[i] += x;
            col_rem[j] += x;
            if !ok {
                return false;
            }
        }
        true
    }
}

fn log_prob(t: &[Vec<u64>], lf: &[f64], constant: f64) -> f64 {
    constant - t.iter().flatten().map(|&x| lf[x as usize]).sum::<f64>()
}

/// Two-sided Fisher exact test on an r×c table. Enumerates every table with
/// the observed margins up to `opts.exact_limit`, then falls back to a
/// seeded permutation estimate.
pub fn fisher_exact(t: &[Vec<u64>], opts: &FisherOptions) -> Result<TestResult, StatsError> {
    let c = check_shape(t)?;
    let t = drop_zero_lines(t, c);
    let emin = expected_min(&t);
    let degenerate = |warning: &str| TestResult {
        method: Method::FisherExact,
        statistic: None,
        df: None,
        p_value: 1.0,
        expected_min: emin,
        monte_carlo: None,
        warning: Some(warning.to_string()),
    };
    let c = t.first().map_or(0, Vec::len);
    if t.len() < 2 || c < 2 {
        return Ok(degenerate("margins determine the table"));
    }
    let rows = row_totals(&t);
    let cols = col_totals(&t, c);
    let n: u64 = rows.iter().sum();
    let lf = log_factorials(n);
    let constant = rows.iter().chain(&cols).map(|&x| lf[x as usize]).sum::<f64>() - lf[n as usize];
    let observed = log_prob(&t, &lf, constant);
    let bound = observed + REL_TOL.ln_1p();

    let mut e = Enumerator {
        lf: &lf,
        rows: t.len(),
        cols: c,
        bound,
        constant,
        p: 0.0,
        visited: 0,
        limit: opts.exact_limit,
    };
    let (mut rr, mut cr) = (rows.clone(), cols.clone());
    if e.fill(0, 0, &mut rr, &mut cr, 0.0) {
        return Ok(TestResult {
            method: Method::FisherExact,
            statistic: None,
            df: None,
            p_value: e.p.min(1.0),
            expected_min: emin,
            monte_carlo: None,
            warning: None,
        });
    }
    Ok(fisher_monte_carlo(&t, opts.samples, opts.seed))
}

fn drop_zero_lines(t: &[Vec<u64>], c: usize) -> Vec<Vec<u64>> {
    let cols = col_totals(t, c);
    t.iter()
        .filter(|r| r.iter().any(|&x| x > 0))
        .map(|r| r.iter().zip(&cols).filter(|(_, &ct)| ct > 0).map(|(&x, _)| x).collect())
        .collect()
}

/// Permutation estimate of the Fisher p-value: column labels of the
/// observations are shuffled against their row labels.
pub fn fisher_monte_carlo(t: &[Vec<u64>], samples: u64, seed: u64) -> TestResult {
    let c = t.first().map_or(0, Vec::len);
    let rows = row_totals(t);
    let cols = col_totals(t, c);
    let n: u64 = rows.iter().sum();
    let lf = log_factorials(n);
    let constant = rows.iter().chain(&cols).map(|&x| lf[x as usize]).sum::<f64>() - lf[n as usize];
    let bound = log_prob(t, &lf, constant) + REL_TOL.ln_1p();
    let row_of: Vec<usize> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| std::iter::repeat_n(i, r as usize))
        .collect();
    let mut col_of: Vec<usize> = cols
        .iter()
        .enumerate()
        .flat_map(|(j, &k)| std::iter::repeat_n(j, k as usize))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut table = vec![vec![0u64; c]; t.len()];
    for _ in 0..samples {
        col_of.shuffle(&mut rng);
        for r in table.iter_mut() {
            r.iter_mut().for_each(|x| *x = 0);
        }
        for (&i, &j) in row_of.iter().zip(&col_of) {
            table[i][j] += 1;
        }
        if log_prob(&table, &lf, constant) <= bound {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    TestResult {
        method: Method::FisherExact,
        statistic: None,
        df: None,
        p_value: p,
        expected_min: expected_min(t),
        monte_carlo: Some(MonteCarlo {
            samples,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            seed,
        }),
        warning: None,
    }
}

/// χ² when every expected count reaches the threshold, Fisher otherwise.
/// All-zero rows and columns are dropped first.
pub fn independence_test(t: &[Vec<u64>], opts: &FisherOptions) -> Result<TestResult, StatsError> {
    let c = check_shape(t)?;
    let t = drop_zero_lines(t, c);
    if expected_min(&t) < EXPECTED_THRESHOLD {
        fisher_exact(&t, opts)
    } else {
        chi_square(&t)
    }
}

/// Cohen's κ for a square agreement table.
pub fn cohen_kappa(t: &[Vec<u64>]) -> Result<f64, StatsError> {
    let c = check_shape(t)?;
    if c != t.len() {
        return Err(StatsError::NotSquare);
    }
    let rows = row_totals(t);
    let cols = col_totals(t, c);
    let n: u64 = rows.iter().sum();
    if n == 0 {
        return Err(StatsError::KappaUndefined);
    }
    let n = n as f64;
    let po = (0..c).map(|i| t[i][i]).sum::<u64>() as f64 / n;
    let pe = rows.iter().zip(&cols).map(|(&r, &k)| r as f64 * k as f64).sum::<f64>() / (n * n);
    if (1.0 - pe).abs() < 1e-15 {
        return Err(StatsError::KappaUndefined);
    }
    Ok((po - pe) / (1.0 - pe))
}

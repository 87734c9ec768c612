use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Continuity-corrected McNemar test on paired correctness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    /// Documents `a` gets right and `b` gets wrong.
    pub b: usize,
    /// Documents `a` gets wrong and `b` gets right.
    pub c: usize,
    pub statistic: f64,
    /// One-sided p-value for "a is more accurate than b".
    pub p_greater: f64,
    /// One-sided p-value for "a is less accurate than b".
    pub p_less: f64,
}

pub fn mcnemar_test(correct_a: &[bool], correct_b: &[bool]) -> Result<McNemar> {
    if correct_a.len() != correct_b.len() {
        return Err(Error::contract(format!(
            "paired test over {} and {} documents",
            correct_a.len(),
            correct_b.len()
        )));
    }
    let b = correct_a.iter().zip(correct_b).filter(|(x, y)| **x && !**y).count();
    let c = correct_a.iter().zip(correct_b).filter(|(x, y)| !**x && **y).count();
    Ok(mcnemar_from_counts(b, c))
}

pub fn mcnemar_from_counts(b: usize, c: usize) -> McNemar {
    if b + c == 0 {
        return McNemar {
            b,
            c,
            statistic: 0.0,
            p_greater: 1.0,
            p_less: 1.0,
        };
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let statistic = diff * diff / (b + c) as f64;
    let half_tail = 0.5 * ChiSquared::new(1.0).expect("one degree of freedom").sf(statistic);
    let (p_greater, p_less) = if b > c {
        (half_tail, 1.0 - half_tail)
    } else if b < c {
        (1.0 - half_tail, half_tail)
    } else {
        (1.0 - half_tail, 1.0 - half_tail)
    };
    McNemar {
        b,
        c,
        statistic,
        p_greater,
        p_less,
    }
}

/// Paired t-test over per-class F1 scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroTTest {
    pub t: f64,
    pub degrees_of_freedom: usize,
    pub mean_difference: f64,
    /// One-sided p-value for "a has higher per-class F1 than b".
    pub p_greater: f64,
    pub p_less: f64,
    /// Differences had zero variance, so `t` is 0 or infinite and the
    /// p-values are limits.
    pub degenerate: bool,
}

pub fn macro_t_test(f1_a: &[f64], f1_b: &[f64]) -> Result<MacroTTest> {
    if f1_a.len() != f1_b.len() {
        return Err(Error::contract("per-class F1 lists differ in length"));
    }
    let k = f1_a.len();
    if k < 2 {
        return Err(Error::contract("macro t-test needs at least two classes"));
    }
    let d: Vec<f64> = f1_a.iter().zip(f1_b).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / k as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let df = k - 1;
    if var == 0.0 {
        let (t, p_greater, p_less, degenerate) = if mean == 0.0 {
            (0.0, 0.5, 0.5, false)
        } else if mean > 0.0 {
            (f64::INFINITY, 0.0, 1.0, true)
        } else {
            (f64::NEG_INFINITY, 1.0, 0.0, true)
        };
        return Ok(MacroTTest {
            t,
            degrees_of_freedom: df,
            mean_difference: mean,
            p_greater,
            p_less,
            degenerate,
        });
    }
    let t = mean / (var.sqrt() / (k as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    Ok(MacroTTest {
        t,
        degrees_of_freedom: df,
        mean_difference: mean,
        p_greater: dist.sf(t),
        p_less: dist.cdf(t),
        degenerate: false,
    })
}

/// Asterisks for p below 1e-2, 1e-3 and 1e-4.
pub fn stars(p: f64) -> &'static str {
    if p < 1e-4 {
        "***"
    } else if p < 1e-3 {
        "**"
    } else if p < 1e-2 {
        "*"
    } else {
        ""
    }
}

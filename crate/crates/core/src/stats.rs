//! Order statistics and the Mann-Whitney rank test used to compare sweep groups.

use crate::analysis::erfc;

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    })
}

/// Result of a one-sided Mann-Whitney U test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample: number of pairs with `x < y` plus half the ties.
    pub u: f64,
    pub z: f64,
    /// One-sided p-value for the alternative "first sample tends to be smaller".
    pub p_value: f64,
}

/// One-sided Mann-Whitney U test that `xs` is stochastically smaller than `ys`.
///
/// Uses the normal approximation with tie and continuity corrections. Infinite
/// values are allowed and rank last, which is how censored (non-completing)
/// runs are handled.
pub fn mann_whitney_less(xs: &[f64], ys: &[f64]) -> Option<MannWhitney> {
    let (n1, n2) = (xs.len(), ys.len());
    if n1 == 0 || n2 == 0 {
        return None;
    }
    let mut u = 0.0;
    for &x in xs {
        for &y in ys {
            if x < y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    // Tie correction from the pooled sample.
    let mut pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut k = 0;
    while k < pooled.len() {
        let mut j = k;
        while j + 1 < pooled.len() && pooled[j + 1] == pooled[k] {
            j += 1;
        }
        let t = (j - k + 1) as f64;
        tie_term += t * t * t - t;
        k = j + 1;
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let mu = n1f * n2f / 2.0;
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)).max(1.0));
    if var <= 0.0 {
        return Some(MannWhitney {
            u,
            z: 0.0,
            p_value: 0.5,
        });
    }
    // Large U supports the alternative; continuity correction shrinks toward mu.
    let z = (u - mu - 0.5) / var.sqrt();
    let p_value = 0.5 * erfc(z / std::f64::consts::SQRT_2);
    Some(MannWhitney { u, z, p_value })
}

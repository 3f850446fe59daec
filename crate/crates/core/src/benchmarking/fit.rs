//! Least-squares fit of F(m) = A·p^m + B.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_FIT_ITERATIONS: usize = 200;
pub const FIT_REL_TOL: f64 = 1e-10;

/// Survival statistics at one sequence length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub m: usize,
    pub mean: f64,
    pub stderr: f64,
    /// One survival probability per randomization, in randomization order.
    pub values: Vec<f64>,
}

impl DecayPoint {
    pub fn from_values(m: usize, values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self { m, mean, stderr, values }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub points: Vec<DecayPoint>,
    /// Shots behind each survival value; `None` for exact probabilities.
    pub shots: Option<u32>,
}

impl DecayCurve {
    pub fn lengths(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.m).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }

    /// CSV with `m,mean_survival,stderr,n_random`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,mean_survival,stderr,n_random\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.m, p.mean, p.stderr, p.values.len()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    /// Weighted residual 2-norm.
    pub residual: f64,
    pub converged: bool,
    /// Flat curve: p cannot be identified and is reported as 1.
    pub degenerate: bool,
    pub iterations: usize,
}

impl DecayFit {
    pub fn model(&self, m: f64) -> f64 {
        self.a * self.p.powf(m) + self.b
    }
}

/// Fits a decay curve, inverse-variance weighted when it carries shot noise.
///
/// Each point's variance is the larger of its observed standard error squared
/// and the binomial estimate ȳ(1 − ȳ)/(n · shots), with ȳ(1 − ȳ) floored at
/// 1/shots so that saturated points keep a finite weight.
pub fn fit_decay(curve: &DecayCurve) -> Result<DecayFit> {
    let ms: Vec<f64> = curve.points.iter().map(|p| p.m as f64).collect();
    let ys = curve.means();
    let Some(shots) = curve.shots else {
        return fit_exponential(&ms, &ys, None);
    };
    let shots = f64::from(shots);
    let weights: Vec<f64> = curve
        .points
        .iter()
        .map(|p| {
            let n = p.values.len().max(1) as f64;
            let binomial = (p.mean * (1.0 - p.mean)).max(1.0 / shots) / (n * shots);
            1.0 / (p.stderr * p.stderr).max(binomial)
        })
        .collect();
    fit_exponential(&ms, &ys, Some(&weights))
}

fn cost(ms: &[f64], ys: &[f64], w: &[f64], x: &[f64; 3]) -> f64 {
    ms.iter()
        .zip(ys)
        .zip(w)
        .map(|((&m, &y), &wi)| wi * (y - x[0] * x[2].powf(m) - x[1]).powi(2))
        .sum()
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let m = nalgebra::Matrix3::from_fn(|i, j| a[i][j]);
    let v = m.lu().solve(&nalgebra::Vector3::from(b))?;
    Some([v[0], v[1], v[2]])
}

fn initial_guess(ms: &[f64], ys: &[f64]) -> [f64; 3] {
    let n = ys.len();
    let b0 = ys[n - 1];
    let a0 = ys[0] - b0;
    let mid = n / 2;
    let ratio = (ys[mid] - b0) / a0;
    let mut p0 = ratio.powf(1.0 / (ms[mid] - ms[0]));
    if !(p0.is_finite() && p0 > 0.0 && p0 < 1.0) {
        p0 = 0.99;
    }
    // A is quoted at m = 0, the data at m_min
    [a0 / p0.powf(ms[0]), b0, p0]
}

/// Levenberg–Marquardt on (A, B, p) for raw data points.
///
/// Needs at least three distinct lengths. A curve flat to 1e−9 has no
/// identifiable p and returns A = 0, B = mean, p = 1 with `degenerate` set.
pub fn fit_exponential(ms: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<DecayFit> {
    if ms.len() != ys.len() || weights.is_some_and(|w| w.len() != ms.len()) {
        return Err(Error::InvalidConfig("fit inputs have mismatched lengths".into()));
    }
    let mut distinct = ms.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidConfig(format!("decay fit needs ≥ 3 distinct lengths, got {}", distinct.len())));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidConfig("non-finite survival probability".into()));
    }
    let unit = vec![1.0; ms.len()];
    let w = weights.unwrap_or(&unit);

    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    if hi - lo < 1e-9 {
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let x = [0.0, mean, 1.0];
        return Ok(DecayFit {
            a: 0.0,
            b: mean,
            p: 1.0,
            residual: cost(ms, ys, w, &x).sqrt(),
            converged: true,
            degenerate: true,
            iterations: 0,
        });
    }

    let mut x = initial_guess(ms, ys);
    let mut c = cost(ms, ys, w, &x);
    let mut lambda = 1e-3;
    for iter in 1..=MAX_FIT_ITERATIONS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for ((&m, &y), &wi) in ms.iter().zip(ys).zip(w) {
            let pm = x[2].powf(m);
            let r = y - x[0] * pm - x[1];
            let dp = if m == 0.0 { 0.0 } else { x[0] * m * x[2].powf(m - 1.0) };
            let j = [pm, 1.0, dp];
            for a in 0..3 {
                jtr[a] += wi * j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += wi * j[a] * j[b];
                }
            }
        }
        loop {
            let mut damped = jtj;
            for (k, row) in damped.iter_mut().enumerate() {
                row[k] += lambda * jtj[k][k].max(1e-300);
            }
            let Some(step) = solve3(damped, jtr) else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return Err(Error::FitDiverged { iterations: iter });
                }
                continue;
            };
            let rel = (0..3).map(|k| step[k].abs() / x[k].abs().max(1e-12)).fold(0.0, f64::max);
            let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let tc = if trial[2] > 0.0 { cost(ms, ys, w, &trial) } else { f64::INFINITY };
            if tc <= c {
                x = trial;
                c = tc;
                lambda = (lambda / 3.0).max(1e-12);
            } else {
                lambda *= 2.0;
            }
            if rel < FIT_REL_TOL {
                let converged = x[2] > 0.0 && x[2] <= 1.0 + 1e-9;
                return Ok(DecayFit {
                    a: x[0],
                    b: x[1],
                    p: x[2],
                    residual: c.sqrt(),
                    converged,
                    degenerate: false,
                    iterations: iter,
                });
            }
            if tc <= c || lambda > 1e20 {
                break;
            }
        }
    }
    Err(Error::FitDiverged { iterations: MAX_FIT_ITERATIONS })
}

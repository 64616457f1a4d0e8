// SPDX-License-Identifier: Apache-2.0

//! Severity curves: fitted maps between defect geometry and fault magnitude.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAX_POLY_DEGREE: usize = 3;
const MAX_BISECTION_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum CurveFamily {
    /// `y = a + b·ln(x)`
    LogLinear,
    /// `y = a·exp(b·x)`
    Exponential,
    /// `y = Σ c_k·x^k`
    Polynomial { degree: usize },
}

impl CurveFamily {
    pub fn coefficient_count(self) -> usize {
        match self {
            CurveFamily::LogLinear | CurveFamily::Exponential => 2,
            CurveFamily::Polynomial { degree } => degree + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityCurve {
    #[serde(flatten)]
    pub family: CurveFamily,
    /// `[a, b]` for log-linear and exponential, `[c0, c1, ...]` for polynomials.
    pub coefficients: Vec<f64>,
    pub domain: (f64, f64),
}

impl SeverityCurve {
    pub fn new(family: CurveFamily, coefficients: Vec<f64>, domain: (f64, f64)) -> Result<Self> {
        if let CurveFamily::Polynomial { degree } = family {
            if degree > MAX_POLY_DEGREE {
                return Err(Error::param(format!("polynomial degree must be <= 3, got {degree}")));
            }
        }
        if coefficients.len() != family.coefficient_count() {
            return Err(Error::param(format!(
                "{family:?} takes {} coefficients, got {}",
                family.coefficient_count(),
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("coefficients must be finite"));
        }
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param(format!("domain ({lo}, {hi}) is empty")));
        }
        if family == CurveFamily::LogLinear && lo <= 0.0 {
            return Err(Error::param("log-linear domain must be positive"));
        }
        if family == CurveFamily::Exponential && coefficients[0] == 0.0 {
            return Err(Error::param("exponential amplitude must be non-zero"));
        }
        Ok(SeverityCurve {
            family,
            coefficients,
            domain,
        })
    }

    fn value_at(&self, x: f64) -> f64 {
        let c = &self.coefficients;
        match self.family {
            CurveFamily::LogLinear => c[0] + c[1] * x.ln(),
            CurveFamily::Exponential => c[0] * (c[1] * x).exp(),
            CurveFamily::Polynomial { .. } => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
        }
    }

    /// Derivative sign changes inside the open domain, for the monotonicity check.
    fn has_interior_extremum(&self) -> bool {
        let (lo, hi) = self.domain;
        let c = &self.coefficients;
        match self.family {
            CurveFamily::LogLinear | CurveFamily::Exponential => false,
            CurveFamily::Polynomial { .. } => {
                // p'(x) = d1 + d2 x + d3 x^2
                let d: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect();
                let (d1, d2, d3) = (
                    d.first().copied().unwrap_or(0.0),
                    d.get(1).copied().unwrap_or(0.0),
                    d.get(2).copied().unwrap_or(0.0),
                );
                let inside = |r: f64| r > lo && r < hi;
                if d3 != 0.0 {
                    let disc = d2 * d2 - 4.0 * d3 * d1;
                    if disc <= 0.0 {
                        // no real root, or a double root where the sign does not change
                        return false;
                    }
                    let s = disc.sqrt();
                    // numerically stable pair of roots
                    let sgn = if d2 >= 0.0 { 1.0 } else { -1.0 };
                    let q = -0.5 * (d2 + sgn * s);
                    let r1 = q / d3;
                    let r2 = if q != 0.0 { d1 / q } else { r1 };
                    inside(r1) || inside(r2)
                } else if d2 != 0.0 {
                    inside(-d1 / d2)
                } else {
                    false
                }
            }
        }
    }

    /// Strictly monotone over the whole domain.
    pub fn is_monotone(&self) -> bool {
        let (lo, hi) = self.domain;
        let flat = match self.family {
            CurveFamily::LogLinear | CurveFamily::Exponential => self.coefficients[1] == 0.0,
            CurveFamily::Polynomial { .. } => self.coefficients[1..].iter().all(|&c| c == 0.0),
        };
        !flat && !self.has_interior_extremum() && self.value_at(lo) != self.value_at(hi)
    }

    /// True when the curve rises with `x`. Only meaningful for monotone curves.
    pub fn is_increasing(&self) -> bool {
        self.value_at(self.domain.1) > self.value_at(self.domain.0)
    }

    /// `(min, max)` of the curve over its domain, for monotone curves.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.value_at(self.domain.0), self.value_at(self.domain.1));
        (a.min(b), a.max(b))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain;
        if !(x >= lo && x <= hi) {
            return Err(Error::param(format!("x = {x} outside domain [{lo}, {hi}]")));
        }
        Ok(self.value_at(x))
    }

    /// Solves `eval(x) = y` by bisection to an x-tolerance of
    /// `1e-12·(x_max − x_min)`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if !self.is_monotone() {
            return Err(Error::Inversion("curve is not strictly monotone on its domain".into()));
        }
        let (ymin, ymax) = self.range();
        if !(y >= ymin && y <= ymax) {
            return Err(Error::Inversion(format!(
                "y = {y} outside curve range [{ymin}, {ymax}]"
            )));
        }
        let (mut lo, mut hi) = self.domain;
        let tol = 1e-12 * (hi - lo);
        let increasing = self.is_increasing();
        for _ in 0..MAX_BISECTION_ITERS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let below = self.value_at(mid) < y;
            if below == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn residual_sum_of_squares(&self, samples: &[(f64, f64)]) -> f64 {
        samples
            .iter()
            .map(|&(x, y)| (self.value_at(x) - y).powi(2))
            .sum()
    }
}

/// Solves `a·x = b` in place by Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[pivot][col].abs() <= 1e-12 * scale {
            return Err(Error::Fit("normal equations are singular".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Least-squares polynomial through the normal equations. Abscissae are
/// mapped to `[-1, 1]` first and the result is expanded back to raw powers.
fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let n = degree + 1;
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    if degree > 0 && half <= 0.0 {
        return Err(Error::Fit("all samples share one x value".into()));
    }
    let half = if half > 0.0 { half } else { 1.0 };

    let mut ata = vec![vec![0.0; n]; n];
    let mut aty = vec![0.0; n];
    for (&x, &y) in xs.iter().zip(ys) {
        let t = (x - center) / half;
        let powers: Vec<f64> = (0..n).scan(1.0, |p, _| {
            let cur = *p;
            *p *= t;
            Some(cur)
        }).collect();
        for i in 0..n {
            aty[i] += powers[i] * y;
            for j in 0..n {
                ata[i][j] += powers[i] * powers[j];
            }
        }
    }
    let scaled = solve_linear(ata, aty)?;

    // Σ d_j ((x - m)/h)^j  →  Σ c_k x^k
    let mut coeffs = vec![0.0; n];
    for (j, &dj) in scaled.iter().enumerate() {
        let factor = dj / half.powi(j as i32);
        let mut binom = 1.0;
        for k in 0..=j {
            coeffs[k] += factor * binom * (-center).powi((j - k) as i32);
            binom = binom * (j - k) as f64 / (k + 1) as f64;
        }
    }
    Ok(coeffs)
}

/// Least-squares fit of one curve family. Log-linear and exponential are
/// linearized (`y` on `ln x`, `ln y` on `x`).
pub fn fit_severity_curve(samples: &[(f64, f64)], family: CurveFamily) -> Result<SeverityCurve> {
    let need = family.coefficient_count();
    if let CurveFamily::Polynomial { degree } = family {
        if degree > MAX_POLY_DEGREE {
            return Err(Error::Fit(format!("polynomial degree must be <= 3, got {degree}")));
        }
    }
    if samples.len() < need {
        return Err(Error::Fit(format!(
            "{family:?} needs at least {need} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("samples must be finite".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();

    let coefficients = match family {
        CurveFamily::LogLinear => {
            if xs.iter().any(|&x| x <= 0.0) {
                return Err(Error::Fit("log-linear fit needs x > 0".into()));
            }
            let u: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            polyfit(&u, &ys, 1)?
        }
        CurveFamily::Exponential => {
            if ys.iter().any(|&y| y <= 0.0) {
                return Err(Error::Fit("exponential fit needs y > 0".into()));
            }
            let v: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
            let line = polyfit(&xs, &v, 1)?;
            vec![line[0].exp(), line[1]]
        }
        CurveFamily::Polynomial { degree } => polyfit(&xs, &ys, degree)?,
    };
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SeverityCurve::new(family, coefficients, (lo, hi)).map_err(|e| Error::Fit(e.to_string()))
}

/// Reads `x,y` samples from CSV with that exact header.
pub fn read_samples_csv(reader: impl Read) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Validation(format!(
            "curve samples need header `x,y`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let (x, y): (f64, f64) = row?;
        out.push((x, y));
    }
    Ok(out)
}

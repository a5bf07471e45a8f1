//! Exponent estimation: weighted log-log regression with confidence
//! intervals, chi-square uniformity tests, bootstrap errors, and
//! split-sample stability checks.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Weighted least-squares fit of `log y` against `log x`.
#[derive(Debug, Clone)]
pub struct ExponentFit<F> {
    pub slope: F,
    pub intercept: F,
    pub stderr_slope: F,
    /// Normal-approximation 95% interval, `slope +- 1.96 stderr`.
    pub ci95: (F, F),
    pub r_squared: F,
    pub n_points: usize,
}

impl<F: Float> ExponentFit<F> {
    pub fn ci_contains(&self, value: F) -> bool {
        self.ci95.0 <= value && value <= self.ci95.1
    }
}

/// Weighted least squares on `(log x, log y)` over `(x, y, weight)` points.
pub fn loglog_fit<F: Float>(points: &[(F, F, F)]) -> Result<ExponentFit<F>> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "log-log fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(x, y, w) in points {
        if x <= F::zero() || y <= F::zero() || w <= F::zero() {
            return Err(Error::InvalidInput(
                "log-log fit needs positive x, y, and weights".into(),
            ));
        }
    }
    let logs: Vec<(F, F, F)> = points.iter().map(|&(x, y, w)| (x.ln(), y.ln(), w)).collect();
    let wsum = logs.iter().fold(F::zero(), |a, &(_, _, w)| a + w);
    let xbar = logs.iter().fold(F::zero(), |a, &(x, _, w)| a + w * x) / wsum;
    let ybar = logs.iter().fold(F::zero(), |a, &(_, y, w)| a + w * y) / wsum;
    let sxx = logs
        .iter()
        .fold(F::zero(), |a, &(x, _, w)| a + w * (x - xbar) * (x - xbar));
    if sxx <= F::zero() {
        return Err(Error::InvalidInput("abscissae are all equal".into()));
    }
    let sxy = logs
        .iter()
        .fold(F::zero(), |a, &(x, y, w)| a + w * (x - xbar) * (y - ybar));
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;

    let ssres = logs.iter().fold(F::zero(), |a, &(x, y, w)| {
        let r = y - (intercept + slope * x);
        a + w * r * r
    });
    let sstot = logs
        .iter()
        .fold(F::zero(), |a, &(_, y, w)| a + w * (y - ybar) * (y - ybar));
    let n = points.len();
    let dof = F::from(n - 2).unwrap();
    let resid_var = ssres / dof;
    let stderr_slope = (resid_var / sxx).sqrt();
    let r_squared = if sstot > F::zero() {
        F::one() - ssres / sstot
    } else if ssres == F::zero() {
        F::one()
    } else {
        F::zero()
    };
    let half = F::from(1.96).unwrap() * stderr_slope;
    Ok(ExponentFit {
        slope,
        intercept,
        stderr_slope,
        ci95: (slope - half, slope + half),
        r_squared,
        n_points: n,
    })
}

/// [`loglog_fit`] over `(x, mean, stderr-of-mean)` rows: weights are the
/// inverse variances of `log y`, `(mean / stderr)^2` by the delta method.
pub fn loglog_fit_means<F: Float>(rows: &[(F, F, F)]) -> Result<ExponentFit<F>> {
    let points: Vec<(F, F, F)> = rows
        .iter()
        .map(|&(x, mean, se)| {
            let w = if se > F::zero() { (mean / se) * (mean / se) } else { F::one() };
            (x, mean, w)
        })
        .collect();
    loglog_fit(&points)
}

/// Fit with the small-abscissa guard: while the point with the smallest
/// `x` has standardized residual above 3 (and at least 4 points remain),
/// it is excluded. Returns the fit and the excluded abscissae.
pub fn loglog_fit_windowed<F: Float>(points: &[(F, F, F)]) -> Result<(ExponentFit<F>, Vec<F>)> {
    let mut work: Vec<(F, F, F)> = points.to_vec();
    work.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut excluded = Vec::new();
    loop {
        let fit = loglog_fit(&work)?;
        if work.len() <= 3 {
            return Ok((fit, excluded));
        }
        let (x, y, w) = work[0];
        let resid = y.ln() - (fit.intercept + fit.slope * x.ln());
        let ssres = work.iter().fold(F::zero(), |a, &(px, py, pw)| {
            let r = py.ln() - (fit.intercept + fit.slope * px.ln());
            a + pw * r * r
        });
        let s = (ssres / F::from(work.len() - 2).unwrap()).sqrt();
        if s <= F::zero() {
            return Ok((fit, excluded));
        }
        let standardized = (resid * w.sqrt() / s).abs();
        if standardized > F::from(3).unwrap() {
            excluded.push(x);
            work.remove(0);
        } else {
            return Ok((fit, excluded));
        }
    }
}

// ---------------------------------------------------------------------------
// Chi-square uniformity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct ChiSquareTest<F> {
    pub statistic: F,
    pub p_value: F,
    pub df: usize,
}

/// Pearson chi-square test of `counts` against the uniform distribution
/// over the categories. Empty categories are allowed; a zero total is an
/// error.
pub fn chi_square_uniform<F: Float>(counts: &[u64]) -> Result<ChiSquareTest<F>> {
    if counts.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 categories".into()));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidInput("zero total count".into()));
    }
    let k = F::from(counts.len()).unwrap();
    let expected = F::from(total).unwrap() / k;
    let statistic = counts.iter().fold(F::zero(), |a, &c| {
        let d = F::from(c).unwrap() - expected;
        a + d * d / expected
    });
    let df = counts.len() - 1;
    let half = F::from(0.5).unwrap();
    let p_value = gamma_q(F::from(df).unwrap() * half, statistic * half);
    Ok(ChiSquareTest { statistic, p_value, df })
}

/// log Gamma by the Lanczos approximation (g = 7, 9 coefficients),
/// accurate to ~1e-13 for arguments >= 0.5.
pub fn ln_gamma<F: Float>(x: F) -> F {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > F::zero());
    let g = F::from(7.0).unwrap();
    let half = F::from(0.5).unwrap();
    let z = x - F::one();
    let mut acc = F::from(COEF[0]).unwrap();
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc = acc + F::from(c).unwrap() / (z + F::from(i).unwrap());
    }
    let t = z + g + half;
    let ln_sqrt_2pi = F::from(0.918_938_533_204_672_7).unwrap();
    ln_sqrt_2pi + (z + half) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
/// via the series for x < a + 1 and the Lentz continued fraction beyond.
pub fn gamma_q<F: Float>(a: F, x: F) -> F {
    if x <= F::zero() {
        return F::one();
    }
    if x < a + F::one() {
        F::one() - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_prefactor<F: Float>(a: F, x: F) -> F {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_p_series<F: Float>(a: F, x: F) -> F {
    let eps = F::from(1e-16).unwrap();
    let mut term = F::one() / a;
    let mut sum = term;
    let mut n = F::one();
    for _ in 0..500 {
        term = term * x / (a + n);
        sum = sum + term;
        if term.abs() < sum.abs() * eps {
            break;
        }
        n = n + F::one();
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_q_cf<F: Float>(a: F, x: F) -> F {
    let eps = F::from(1e-16).unwrap();
    let tiny = F::from(1e-300).unwrap();
    let mut b = x + F::one() - a;
    let mut c = F::one() / tiny;
    let mut d = F::one() / b;
    let mut h = d;
    for i in 1..500 {
        let fi = F::from(i).unwrap();
        let an = -fi * (fi - a);
        b = b + F::from(2.0).unwrap();
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = F::one() / d;
        let del = d * c;
        h = h * del;
        if (del - F::one()).abs() < eps {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

// ---------------------------------------------------------------------------
// Split-sample checks and bootstrap
// ---------------------------------------------------------------------------

/// Largest standardized discrepancy between two equal-length series of
/// `(mean, stderr)` summaries.
pub fn split_sample_check<F: Float>(a: &[(F, F)], b: &[(F, F)]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "series lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("empty series".into()));
    }
    let mut worst = F::zero();
    for (&(ma, sa), &(mb, sb)) in a.iter().zip(b) {
        let pooled = (sa * sa + sb * sb).sqrt();
        let z = if pooled > F::zero() {
            (ma - mb).abs() / pooled
        } else if ma == mb {
            F::zero()
        } else {
            F::infinity()
        };
        if z > worst {
            worst = z;
        }
    }
    Ok(worst)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr<F: Float>(xs: &[F]) -> (F, F) {
    let n = F::from(xs.len()).unwrap();
    let mean = xs.iter().fold(F::zero(), |a, &b| a + b) / n;
    if xs.len() < 2 {
        return (mean, F::zero());
    }
    let var = xs
        .iter()
        .fold(F::zero(), |a, &b| a + (b - mean) * (b - mean))
        / (n - F::one());
    (mean, (var / n).sqrt())
}

/// Bootstrap standard error of the sample mean (default resample count is
/// the caller's choice; the experiment harness uses 1000).
pub fn bootstrap_stderr<F: Float>(xs: &[F], resamples: usize, rng: &mut RandomSource) -> F {
    if xs.len() < 2 || resamples < 2 {
        return F::zero();
    }
    let n = xs.len();
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut acc = F::zero();
        for _ in 0..n {
            acc = acc + xs[rng.next_below(n as u32) as usize];
        }
        means.push(acc / F::from(n).unwrap());
    }
    let m = means.iter().fold(F::zero(), |a, &b| a + b) / F::from(resamples).unwrap();
    let var = means
        .iter()
        .fold(F::zero(), |a, &b| a + (b - m) * (b - m))
        / F::from(resamples - 1).unwrap();
    var.sqrt()
}

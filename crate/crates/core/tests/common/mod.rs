#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, LogNormal, Weibull};

/// Reference CDFs from an independent implementation.
pub fn weibull_cdf(scale: f64, shape: f64, t: f64) -> f64 {
    Weibull::new(shape, scale).unwrap().cdf(t)
}

pub fn lognormal_cdf(mean: f64, sd: f64, t: f64) -> f64 {
    let sigma2 = (1.0 + (sd * sd) / (mean * mean)).ln();
    let mu = mean.ln() - sigma2 / 2.0;
    LogNormal::new(mu, sigma2.sqrt()).unwrap().cdf(t)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// `int_lo^hi g(t) dt` evaluated as `int g(e^u) e^u du`.
pub fn simpson_log<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(|u| g(u.exp()) * u.exp(), lo.ln(), hi.ln(), n)
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic via a merged sweep.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut all: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    all.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut fa, mut fb, mut d) = (0.0, 0.0, 0.0f64);
    let mut i = 0;
    while i < all.len() {
        let x = all[i].0;
        while i < all.len() && all[i].0 == x {
            if all[i].1 {
                fa += 1.0 / na;
            } else {
                fb += 1.0 / nb;
            }
            i += 1;
        }
        d = d.max((fa - fb).abs());
    }
    d
}

/// 99% critical values of the KS statistic (asymptotic).
pub fn ks_crit_one(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

pub fn ks_crit_two(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

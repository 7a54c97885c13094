use std::f64::consts::PI;

use cqdsim::analytic::mean_theta_n;
use cqdsim::sampling::{post_sg1_cdf, sample_isotropic, sample_post_sg1};
use cqdsim::RandomStream;

const DRAWS: u64 = 1_000_000;

fn post_sg1_draws(seed: u64) -> Vec<(f64, f64)> {
    (0..DRAWS)
        .map(|i| sample_post_sg1(&mut RandomStream::for_current(seed, 0.1, i)))
        .collect()
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn azimuth_chi_square(phis: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut bins = [0u64; 64];
    for phi in phis {
        assert!((0.0..2.0 * PI).contains(&phi));
        bins[((phi / (2.0 * PI) * 64.0) as usize).min(63)] += 1;
    }
    let expected = n as f64 / 64.0;
    bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn post_sg1_moments_and_ks() {
    let draws = post_sg1_draws(2024);
    let n = draws.len() as f64;
    let mean_theta = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let mean_cos = draws.iter().map(|d| d.0.cos()).sum::<f64>() / n;
    let ks = ks_statistic(draws.iter().map(|d| d.0).collect(), post_sg1_cdf);
    println!("<theta_n> = {mean_theta:.6}, <cos theta_n> = {mean_cos:.6}, KS = {ks:.2e}");
    assert!((mean_theta - mean_theta_n()).abs() < 3e-3);
    assert!((mean_cos + 1.0 / 3.0).abs() < 3e-3);
    assert!(ks < 2e-3);
    // 64 bins, 63 degrees of freedom; 110 sits beyond the 0.9999 quantile
    let chi2 = azimuth_chi_square(draws.iter().map(|d| d.1), draws.len());
    assert!(chi2 < 110.0, "chi-square {chi2}");
}

#[test]
fn oven_orientations_are_isotropic() {
    let mut cos_sum = 0.0;
    let mut cos2_sum = 0.0;
    let mut phis = Vec::with_capacity(DRAWS as usize);
    let mut polars = Vec::with_capacity(DRAWS as usize);
    for i in 0..DRAWS {
        let (theta, phi) = sample_isotropic(&mut RandomStream::new(99, i));
        cos_sum += theta.cos();
        cos2_sum += theta.cos().powi(2);
        phis.push(phi);
        polars.push(theta);
    }
    let n = DRAWS as f64;
    assert!((cos_sum / n).abs() < 3e-3);
    assert!((cos2_sum / n - 1.0 / 3.0).abs() < 3e-3);
    let ks = ks_statistic(polars, |t| (1.0 - t.cos()) / 2.0);
    assert!(ks < 2e-3, "KS {ks}");
    assert!(azimuth_chi_square(phis.into_iter(), DRAWS as usize) < 110.0);
}

#[test]
fn sample_mean_within_three_standard_errors() {
    let draws = post_sg1_draws(7);
    let n = draws.len() as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let var = draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - mean_theta_n()).abs() < 3.0 * se, "{mean} vs {}", mean_theta_n());
}

#[test]
fn streams_for_different_currents_are_unrelated() {
    let a: Vec<f64> = (0..1000).map(|i| RandomStream::for_current(1, 0.1, i).uniform()).collect();
    let b: Vec<f64> = (0..1000).map(|i| RandomStream::for_current(1, 0.2, i).uniform()).collect();
    let c: Vec<f64> = (0..1000).map(|i| RandomStream::for_current(2, 0.1, i).uniform()).collect();
    assert!(a.iter().zip(&b).all(|(x, y)| x != y));
    assert!(a.iter().zip(&c).all(|(x, y)| x != y));
    let corr = |x: &[f64], y: &[f64]| {
        let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (m(x), m(y));
        let cov: f64 = x.iter().zip(y).map(|(p, q)| (p - mx) * (q - my)).sum();
        let sx: f64 = x.iter().map(|p| (p - mx).powi(2)).sum();
        let sy: f64 = y.iter().map(|q| (q - my).powi(2)).sum();
        cov / (sx * sy).sqrt()
    };
    assert!(corr(&a, &b).abs() < 0.15);
    assert!(corr(&a, &c).abs() < 0.15);
}

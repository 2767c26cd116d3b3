use lmtopo::sampler::{derive_trial_seed, sample, SampleSpec};
use lmtopo::Face;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / k;
    (m, xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0))
}

#[test]
fn face_count_is_binomial() {
    let (n, p, trials) = (20usize, 0.1, 1000);
    let m = (n * (n - 1) * (n - 2) / 6) as f64;
    let counts: Vec<f64> = (0..trials)
        .map(|i| sample(&SampleSpec::with_p(n, p, derive_trial_seed(11, i))).unwrap().f2() as f64)
        .collect();
    let (mean, var) = mean_var(&counts);
    let (mu, sigma2) = (m * p, m * p * (1.0 - p));
    let k = trials as f64;
    let se_mean = (sigma2 / k).sqrt();
    // fourth central moment of a binomial: 3σ⁴ + σ²(1 - 6p(1-p))
    let se_var = ((2.0 * sigma2 * sigma2 + sigma2 * (1.0 - 6.0 * p * (1.0 - p))) / k).sqrt();
    assert!((mean - mu).abs() < 4.0 * se_mean, "mean {mean} vs {mu}");
    assert!((var - sigma2).abs() < 4.0 * se_var, "variance {var} vs {sigma2}");
}

#[test]
fn two_faces_are_uncorrelated() {
    let (n, p, trials) = (9usize, 0.3, 2000);
    let (f, g) = (Face([0, 1, 2]), Face([0, 1, 3]));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..trials {
        let c = sample(&SampleSpec::with_p(n, p, derive_trial_seed(12, i))).unwrap();
        xs.push(c.contains_face(&f) as u8 as f64);
        ys.push(c.contains_face(&g) as u8 as f64);
    }
    let (mx, vx) = mean_var(&xs);
    let (my, vy) = mean_var(&ys);
    let k = trials as f64;
    let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (k - 1.0);
    let se = (vx * vy / k).sqrt();
    assert!(cov.abs() < 4.0 * se, "covariance {cov}, stderr {se}");
}

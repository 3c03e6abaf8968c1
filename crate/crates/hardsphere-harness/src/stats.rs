//! Chi-square and Kolmogorov-Smirnov machinery for the statistical
//! verdicts. Reference values in the tests are frozen from an independent
//! implementation (scipy).

/// ln Γ(x) by the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = 0.99999999999980993;
    for (i, c) in COEF.iter().enumerate() {
        a += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x), by series (x < a+1) or the
/// Lentz continued fraction for the complement.
fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper tail of the chi-square distribution: P(X ≥ stat) with `dof`
/// degrees of freedom.
pub fn chi_square_sf(stat: f64, dof: usize) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    let a = dof as f64 / 2.0;
    let x = stat / 2.0;
    if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Outcome of a goodness-of-fit or homogeneity test.
#[derive(Clone, Copy, Debug)]
pub struct TestOutcome {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pool trailing histogram bins until each pooled expected count reaches
/// `min_expected`; returns pooled (observed, expected) pairs.
fn pool_bins(observed: &[f64], expected: &[f64], min_expected: f64) -> Vec<(f64, f64)> {
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= min_expected {
            pooled.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            pooled.push((acc_o, acc_e));
        }
    }
    pooled
}

/// Chi-square goodness of fit of an observed count histogram against exact
/// cell probabilities. Tail bins are pooled to expected count ≥ 5.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> TestOutcome {
    let total: u64 = observed.iter().sum();
    let obs: Vec<f64> = observed.iter().map(|&o| o as f64).collect();
    let exp: Vec<f64> = probabilities.iter().map(|p| p * total as f64).collect();
    let pooled = pool_bins(&obs, &exp, 5.0);
    let statistic: f64 = pooled
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = pooled.len().saturating_sub(1).max(1);
    TestOutcome { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

/// Two-sample chi-square homogeneity test on two count histograms.
pub fn chi_square_two_sample(h1: &[u64], h2: &[u64]) -> TestOutcome {
    let bins = h1.len().max(h2.len());
    let n1: u64 = h1.iter().sum();
    let n2: u64 = h2.iter().sum();
    let total = (n1 + n2) as f64;
    let mut obs1 = Vec::with_capacity(bins);
    let mut exp1 = Vec::with_capacity(bins);
    let mut obs2 = Vec::with_capacity(bins);
    let mut exp2 = Vec::with_capacity(bins);
    for b in 0..bins {
        let o1 = h1.get(b).copied().unwrap_or(0) as f64;
        let o2 = h2.get(b).copied().unwrap_or(0) as f64;
        let pooled_p = (o1 + o2) / total;
        obs1.push(o1);
        exp1.push(pooled_p * n1 as f64);
        obs2.push(o2);
        exp2.push(pooled_p * n2 as f64);
    }
    // pool both sides with the same boundaries, driven by combined expected
    let combined: Vec<f64> = exp1.iter().zip(&exp2).map(|(a, b)| a + b).collect();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    let (mut ao1, mut ae1, mut ao2, mut ae2, mut ac) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let flush = |o1: f64, e1: f64, o2: f64, e2: f64, stat: &mut f64, cells: &mut usize| {
        if e1 > 0.0 {
            *stat += (o1 - e1) * (o1 - e1) / e1;
        }
        if e2 > 0.0 {
            *stat += (o2 - e2) * (o2 - e2) / e2;
        }
        *cells += 1;
    };
    for b in 0..bins {
        ao1 += obs1[b];
        ae1 += exp1[b];
        ao2 += obs2[b];
        ae2 += exp2[b];
        ac += combined[b];
        if ac >= 10.0 {
            flush(ao1, ae1, ao2, ae2, &mut statistic, &mut cells);
            ao1 = 0.0;
            ae1 = 0.0;
            ao2 = 0.0;
            ae2 = 0.0;
            ac = 0.0;
        }
    }
    if ac > 0.0 {
        flush(ao1, ae1, ao2, ae2, &mut statistic, &mut cells);
    }
    let dof = cells.saturating_sub(1).max(1);
    TestOutcome { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

/// Survival function of the Kolmogorov distribution,
/// Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (finite-sample correction of Numerical Recipes).
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> TestOutcome {
    let mut xs: Vec<f64> = xs.to_vec();
    let mut ys: Vec<f64> = ys.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    ys.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let (n, m) = (xs.len(), ys.len());
    assert!(n > 0 && m > 0, "ks test needs nonempty samples");
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let v = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    TestOutcome { statistic: d, dof: 0, p_value: kolmogorov_sf(lambda) }
}

/// Welford accumulator for mean and standard error of a stream of values.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningMean {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.n as f64 - 1.0) / self.n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_sf_matches_reference() {
        // frozen from scipy.stats.chi2.sf
        let cases = [
            (3.2, 2, 0.2018965179946554),
            (10.0, 4, 0.04042768199451279),
            (27.5, 9, 0.0011556512843511606),
            (1.0, 1, 0.31731050786291115),
            (0.5, 3, 0.9188914116546758),
        ];
        for (stat, dof, want) in cases {
            let got = chi_square_sf(stat, dof);
            assert!((got - want).abs() < 1e-10, "sf({stat},{dof}) = {got}, want {want}");
        }
    }

    #[test]
    fn kolmogorov_sf_matches_reference() {
        // frozen from scipy.stats.kstwobign.sf
        let cases = [
            (0.5, 0.9639452436648751),
            (1.0, 0.26999967167735456),
            (1.5, 0.022217962616525127),
            (2.0, 0.0006709252557796953),
        ];
        for (lam, want) in cases {
            let got = kolmogorov_sf(lam);
            assert!((got - want).abs() < 1e-9, "Q({lam}) = {got}, want {want}");
        }
    }

    #[test]
    fn gof_accepts_the_true_law_and_rejects_a_wrong_one() {
        // multinomial counts drawn from p = (.3, .6, .1) at n = 10000
        let observed = [3012u64, 6024, 964];
        let ok = chi_square_gof(&observed, &[0.3012, 0.6024, 0.0964]);
        assert!(ok.p_value > 0.5, "{}", ok.p_value);
        let bad = chi_square_gof(&observed, &[0.5, 0.4, 0.1]);
        assert!(bad.p_value < 1e-10, "{}", bad.p_value);
    }

    #[test]
    fn two_sample_chi_square_on_identical_histograms() {
        let h = [500u64, 300, 150, 50];
        let out = chi_square_two_sample(&h, &h);
        assert!(out.p_value > 0.999, "{}", out.p_value);
        let other = [300u64, 500, 150, 50];
        let out = chi_square_two_sample(&h, &other);
        assert!(out.p_value < 1e-6, "{}", out.p_value);
    }

    #[test]
    fn ks_two_sample_behaviour() {
        let xs: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let same: Vec<f64> = (0..400).map(|i| (i as f64 + 0.5) / 400.0).collect();
        let shifted: Vec<f64> = (0..400).map(|i| 0.25 + i as f64 / 400.0).collect();
        assert!(ks_two_sample(&xs, &same).p_value > 0.5);
        assert!(ks_two_sample(&xs, &shifted).p_value < 1e-6);
    }

    #[test]
    fn running_mean_agrees_with_direct() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let mut rm = RunningMean::default();
        for x in xs {
            rm.push(x);
        }
        assert!((rm.mean() - 6.2).abs() < 1e-12);
        let var: f64 = xs.iter().map(|x| (x - 6.2) * (x - 6.2)).sum::<f64>() / 4.0;
        assert!((rm.std_error() - (var / 5.0).sqrt()).abs() < 1e-12);
    }
}

use attnet::stats::{
    ancova, biserial, correlation_p_value, fit_ancova, partial_correlation, pearson, point_biserial, qtukey,
    tukey_contrasts,
};
use num::{BigInt, BigRational, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn levels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("g{i}")).collect()
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Asymptotic Kolmogorov–Smirnov p-value against U(0, 1), with the
/// small-sample correction to the statistic.
fn ks_uniform_p(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).max((i as f64 + 1.0) / n - v))
        .fold(0.0, f64::max);
    let lam = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lam * lam).exp();
    }
    p.clamp(0.0, 1.0)
}

fn ols_residuals(v: &[f64], z: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let (mv, mz) = (v.iter().sum::<f64>() / n, z.iter().sum::<f64>() / n);
    let szz: f64 = z.iter().map(|a| (a - mz).powi(2)).sum();
    let szv: f64 = z.iter().zip(v).map(|(a, b)| (a - mz) * (b - mv)).sum();
    let slope = szv / szz;
    v.iter().zip(z).map(|(b, a)| b - mv - slope * (a - mz)).collect()
}

#[test]
fn pearson_against_exact_rational() {
    let x: Vec<i64> = (1..=10).collect();
    let y: Vec<i64> = vec![2, 1, 4, 3, 7, 8, 6, 9, 12, 10];
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let n = q(x.len() as i64);
    let mx = x.iter().map(|&v| q(v)).sum::<BigRational>() / &n;
    let my = y.iter().map(|&v| q(v)).sum::<BigRational>() / &n;
    let (mut sxy, mut sxx, mut syy) = (q(0), q(0), q(0));
    for (&a, &b) in x.iter().zip(&y) {
        let (da, db) = (q(a) - &mx, q(b) - &my);
        sxy += &da * &db;
        sxx += &da * &da;
        syy += &db * &db;
    }
    let r2 = &sxy * &sxy / (sxx * syy);
    assert_eq!(r2, BigRational::new(BigInt::from(368), BigInt::from(429)));
    let exact = r2.to_f64().unwrap().sqrt();
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let r = pearson(&xf, &yf).unwrap();
    assert!((r - exact).abs() < 1e-15);
    assert!((r - 0.926_179_711_399_930_1).abs() < 1e-15);
    // point-biserial is Pearson with the 0/1 variable
    let d: Vec<f64> = yf.iter().map(|&v| f64::from(u8::from(v > 5.0))).collect();
    assert!((point_biserial(&xf, &d).unwrap() - pearson(&xf, &d).unwrap()).abs() < 1e-14);
}

#[test]
fn biserial_recovers_latent_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 100_000;
    let rho: f64 = 0.5;
    let z = normals(&mut rng, n);
    let e = normals(&mut rng, n);
    let y: Vec<f64> = z.iter().zip(&e).map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b).collect();
    let d: Vec<f64> = z.iter().map(|&v| f64::from(u8::from(v > 0.3))).collect();
    let b = biserial(&y, &d).unwrap();
    assert!((b.r - rho).abs() < 0.02, "r = {}", b.r);
    assert!(!b.unstable);
}

#[test]
fn biserial_null() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let n = 100_000;
    let y = normals(&mut rng, n);
    let d: Vec<f64> = (0..n).map(|_| f64::from(u8::from(rng.random::<f64>() < 0.4))).collect();
    assert!(biserial(&y, &d).unwrap().r.abs() < 0.03);
}

#[test]
fn partial_correlation_is_correlation_of_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..50 {
        let n = rng.random_range(10..200);
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(2.0..40.0)).collect();
        let x: Vec<f64> = z.iter().map(|v| 0.1 * v + rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, c)| -0.5 * a + 0.05 * c + rng.random::<f64>()).collect();
        let oracle = pearson(&ols_residuals(&x, &z), &ols_residuals(&y, &z)).unwrap();
        let got = partial_correlation(&x, &y, &z).unwrap();
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }
}

#[test]
fn partial_correlation_planted() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let n = 10_000;
    let rho: f64 = -0.4;
    let z = normals(&mut rng, n);
    let u = normals(&mut rng, n);
    let v = normals(&mut rng, n);
    // given z, the parts u and rho·u + √(1−rho²)·v have correlation rho
    let x: Vec<f64> = z.iter().zip(&u).map(|(a, b)| 2.0 * a + b).collect();
    let y: Vec<f64> = (0..n).map(|i| -1.5 * z[i] + rho * u[i] + (1.0 - rho * rho).sqrt() * v[i]).collect();
    let r = partial_correlation(&x, &y, &z).unwrap();
    assert!((r - rho).abs() < 0.02, "r = {r}");
}

#[test]
fn correlation_p_value_matches_t_transform() {
    let (t, p) = correlation_p_value(-0.71, 54, 1).unwrap();
    assert!((t - -0.71 * (51.0f64 / (1.0 - 0.71 * 0.71)).sqrt()).abs() < 1e-12);
    assert!(p < 1e-3);
    let (t0, p0) = correlation_p_value(0.0, 20, 0).unwrap();
    assert_eq!(t0, 0.0);
    assert!((p0 - 1.0).abs() < 1e-12);
}

fn orthogonal_design() -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let cov = [-3.0, -1.0, 1.0, 3.0].repeat(3);
    let groups: Vec<usize> = (0..12).map(|i| i / 4).collect();
    let y = vec![3.0, 5.0, 4.0, 8.0, 6.0, 9.0, 7.0, 10.0, 12.0, 11.0, 15.0, 14.0];
    (y, groups, cov)
}

#[test]
fn ancova_planted_orthogonal_decomposition() {
    // covariate centred within every group, so SS_group = 392/3,
    // SS_resid = 221/15, slope 17/30, F = 7840/221 exactly
    let (y, groups, cov) = orthogonal_design();
    let r = ancova(&y, &groups, &cov, &levels(3)).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    assert_eq!(r.df, (2, 8));
    assert!(rel(r.ss_factor, 392.0 / 3.0) < 1e-12);
    assert!(rel(r.ss_residual, 221.0 / 15.0) < 1e-12);
    assert!(rel(r.covariate_coefficient, 17.0 / 30.0) < 1e-12);
    assert!(rel(r.f, 7840.0 / 221.0) < 1e-10);
    assert!(rel(r.partial_eta_sq, (392.0 / 3.0) / (392.0 / 3.0 + 221.0 / 15.0)) < 1e-12);
    // with a centred covariate the adjusted means are the raw means
    for g in &r.groups {
        assert!((g.mean - g.adjusted_mean).abs() < 1e-12);
    }
    assert!((r.groups[0].mean - 5.0).abs() < 1e-12);
    assert!((r.groups[2].mean - 13.0).abs() < 1e-12);
}

#[test]
fn ancova_null_p_values_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let groups: Vec<usize> = (0..54).map(|i| i % 3).collect();
    let ps: Vec<f64> = (0..500)
        .map(|_| {
            let y = normals(&mut rng, 54);
            let cov = normals(&mut rng, 54);
            ancova(&y, &groups, &cov, &levels(3)).unwrap().p
        })
        .collect();
    let ks = ks_uniform_p(ps);
    assert!(ks > 0.01, "KS p = {ks}");
}

#[test]
fn tukey_critical_value_table() {
    // q(0.05; 3, 50) = 3.416 in standard tables
    let q = qtukey(0.95, 3, 50.0).unwrap();
    assert!((q - 3.416).abs() < 0.01, "{q}");
}

#[test]
fn tukey_contrasts_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..30 {
        let n = rng.random_range(12..60);
        let groups: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let cov: Vec<f64> = (0..n).map(|_| rng.random_range(5.0..30.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.5 - 0.3 * groups[i] as f64 + 0.01 * cov[i] + 0.2 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let fit = fit_ancova(&y, &groups, &cov, &levels(3)).unwrap();
        let c = tukey_contrasts(&fit, 0.95).unwrap();
        assert_eq!(c.len(), 3);
        // (0,1) + (1,2) = (0,2)
        assert!((c[0].difference + c[2].difference - c[1].difference).abs() < 1e-12);
        for k in &c {
            assert!(k.ci_lower < k.difference && k.difference < k.ci_upper);
            assert!((0.0..=1.0).contains(&k.p_adjusted));
            assert!(k.standard_error > 0.0);
        }
    }
}

#[test]
fn tukey_interval_excludes_zero_exactly_when_significant() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut checked = 0;
    for _ in 0..60 {
        let groups: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let cov = normals(&mut rng, 30);
        let y: Vec<f64> = (0..30)
            .map(|i| 0.5 * groups[i] as f64 + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let r = ancova(&y, &groups, &cov, &levels(3)).unwrap();
        for c in &r.contrasts {
            if (c.p_adjusted - 0.05).abs() > 1e-4 {
                assert_eq!(c.p_adjusted < 0.05, c.ci_lower > 0.0 || c.ci_upper < 0.0);
                checked += 1;
            }
        }
    }
    assert!(checked > 150);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ancova_affine_invariance(seed in any::<u64>(), a in 0.1f64..10.0, b in -5.0f64..5.0, c in 0.1f64..10.0, d in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups: Vec<usize> = (0..24).map(|i| i % 3).collect();
        let y = normals(&mut rng, 24);
        let cov = normals(&mut rng, 24);
        let base = ancova(&y, &groups, &cov, &levels(3)).unwrap();
        let y2: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let cov2: Vec<f64> = cov.iter().map(|v| c * v + d).collect();
        let moved = ancova(&y2, &groups, &cov2, &levels(3)).unwrap();
        prop_assert!((base.f - moved.f).abs() <= 1e-8 * base.f.max(1.0));
        prop_assert!((base.p - moved.p).abs() <= 1e-8);
        for (x, z) in base.contrasts.iter().zip(&moved.contrasts) {
            prop_assert!((x.p_adjusted - z.p_adjusted).abs() <= 1e-7);
            prop_assert!((x.cohens_d - z.cohens_d).abs() <= 1e-8 * x.cohens_d.abs().max(1.0));
        }
    }

    #[test]
    fn ancova_relabel_invariance(seed in any::<u64>(), perm in Just([2usize, 0, 1])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups: Vec<usize> = (0..27).map(|_| rng.random_range(0..3)).collect();
        prop_assume!((0..3).all(|g| groups.iter().filter(|&&x| x == g).count() >= 2));
        let y = normals(&mut rng, 27);
        let cov = normals(&mut rng, 27);
        let base = ancova(&y, &groups, &cov, &levels(3)).unwrap();
        let relabelled: Vec<usize> = groups.iter().map(|&g| perm[g]).collect();
        let names = levels(3);
        let mut new_levels = vec![String::new(); 3];
        for g in 0..3 {
            new_levels[perm[g]] = names[g].clone();
        }
        let moved = ancova(&y, &relabelled, &cov, &new_levels).unwrap();
        prop_assert!((base.f - moved.f).abs() <= 1e-9 * base.f.max(1.0));
        for g in &base.groups {
            let h = moved.groups.iter().find(|h| h.level == g.level).unwrap();
            prop_assert!((g.adjusted_mean - h.adjusted_mean).abs() < 1e-10);
            prop_assert_eq!(g.n, h.n);
        }
    }

    #[test]
    fn correlations_affine_invariant(seed in any::<u64>(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = normals(&mut rng, 40);
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + rng.sample::<f64, _>(StandardNormal)).collect();
        let z = normals(&mut rng, 40);
        let d: Vec<f64> = (0..40).map(|i| f64::from(u8::from(i % 3 == 0))).collect();
        let y2: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        prop_assert!((pearson(&x, &y).unwrap() - pearson(&x, &y2).unwrap()).abs() < 1e-12);
        prop_assert!((partial_correlation(&x, &y, &z).unwrap() - partial_correlation(&x, &y2, &z).unwrap()).abs() < 1e-10);
        prop_assert!((biserial(&y, &d).unwrap().r - biserial(&y2, &d).unwrap().r).abs() < 1e-10);
        // negating the scale flips the sign
        let y3: Vec<f64> = y.iter().map(|v| -a * v).collect();
        prop_assert!((pearson(&x, &y).unwrap() + pearson(&x, &y3).unwrap()).abs() < 1e-12);
    }
}

#![allow(dead_code)]

use attnet::IsingNetwork;
use rand::Rng;

/// Random network: each pair gets an edge with probability `density`,
/// weight uniform on ±[0.2, wmax]; thresholds uniform on [-0.5, 0.5].
pub fn random_network<R: Rng>(rng: &mut R, p: usize, density: f64, wmax: f64) -> IsingNetwork {
    let mut edges = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if rng.random::<f64>() < density {
                let w = rng.random_range(0.2..wmax);
                edges.push((i, j, if rng.random::<bool>() { w } else { -w }));
            }
        }
    }
    let thresholds = (0..p).map(|_| rng.random_range(-0.5..0.5)).collect();
    IsingNetwork::from_edges(thresholds, &edges).unwrap()
}

/// Ten nodes, fifteen ±0.5 edges, thresholds -0.1.
pub fn planted_ten() -> IsingNetwork {
    let edges = [
        (0, 1, 0.5),
        (1, 2, -0.5),
        (2, 3, 0.5),
        (3, 4, 0.5),
        (4, 5, -0.5),
        (5, 6, 0.5),
        (6, 7, 0.5),
        (7, 8, -0.5),
        (8, 9, 0.5),
        (0, 9, 0.5),
        (0, 5, -0.5),
        (1, 6, 0.5),
        (2, 7, 0.5),
        (3, 8, -0.5),
        (4, 9, 0.5),
    ];
    IsingNetwork::from_edges(vec![-0.1; 10], &edges).unwrap()
}

/// Sensitivity, specificity and sign agreement of an estimate against
/// the planted pattern.
pub fn recovery(truth: &IsingNetwork, est: &IsingNetwork) -> (f64, f64, bool) {
    let p = truth.p();
    let (mut tp, mut fn_, mut tn, mut fp) = (0, 0, 0, 0);
    let mut signs = true;
    for i in 0..p {
        for j in (i + 1)..p {
            let (t, e) = (truth.weight(i, j), est.weight(i, j));
            match (t != 0.0, e != 0.0) {
                (true, true) => {
                    tp += 1;
                    signs &= t.signum() == e.signum();
                }
                (true, false) => fn_ += 1,
                (false, false) => tn += 1,
                (false, true) => fp += 1,
            }
        }
    }
    (
        tp as f64 / (tp + fn_) as f64,
        tn as f64 / (tn + fp) as f64,
        signs,
    )
}

/// Floyd–Warshall over lengths 1/|w|, then the ASPL with infinite entries
/// replaced by the largest finite off-diagonal distance.
pub fn floyd_warshall_aspl(net: &IsingNetwork) -> Option<f64> {
    let p = net.p();
    let mut d = vec![vec![f64::INFINITY; p]; p];
    for i in 0..p {
        d[i][i] = 0.0;
        for j in 0..p {
            let w = net.weight(i, j);
            if i != j && w != 0.0 {
                d[i][j] = 1.0 / w.abs();
            }
        }
    }
    for k in 0..p {
        for i in 0..p {
            for j in 0..p {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut finite_max: Option<f64> = None;
    for i in 0..p {
        for j in (i + 1)..p {
            if d[i][j].is_finite() {
                finite_max = Some(finite_max.map_or(d[i][j], |m: f64| m.max(d[i][j])));
            }
        }
    }
    let m = finite_max?;
    let mut total = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            total += if d[i][j].is_finite() { d[i][j] } else { m };
        }
    }
    Some(total / (p * (p - 1) / 2) as f64)
}

/// Unpenalized logistic MLE by Newton–Raphson with Gaussian elimination.
/// Returns (intercept, coefficients).
pub fn newton_logistic(x: &[Vec<f64>], y: &[f64]) -> (f64, Vec<f64>) {
    let n = y.len();
    let m = x.len() + 1;
    let design = |i: usize, j: usize| if j == 0 { 1.0 } else { x[j - 1][i] };
    let mut b = vec![0.0; m];
    for _ in 0..100 {
        let mut grad = vec![0.0; m];
        let mut hess = vec![vec![0.0; m]; m];
        for i in 0..n {
            let eta: f64 = (0..m).map(|j| b[j] * design(i, j)).sum();
            let mu = 1.0 / (1.0 + (-eta).exp());
            for j in 0..m {
                grad[j] += design(i, j) * (y[i] - mu);
                for k in 0..m {
                    hess[j][k] += design(i, j) * design(i, k) * mu * (1.0 - mu);
                }
            }
        }
        let step = solve(hess, grad);
        let mut change: f64 = 0.0;
        for j in 0..m {
            b[j] += step[j];
            change = change.max(step[j].abs());
        }
        if change < 1e-14 {
            break;
        }
    }
    (b[0], b[1..].to_vec())
}

fn solve(mut a: Vec<Vec<f64>>, mut r: Vec<f64>) -> Vec<f64> {
    let m = r.len();
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        r.swap(c, piv);
        for i in (c + 1)..m {
            let f = a[i][c] / a[c][c];
            for k in c..m {
                a[i][k] -= f * a[c][k];
            }
            r[i] -= f * r[c];
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = ((i + 1)..m).map(|k| a[i][k] * x[k]).sum();
        x[i] = (r[i] - s) / a[i][i];
    }
    x
}

/// Random logistic regression problem with binary predictors.
pub fn random_logistic_problem<R: Rng>(rng: &mut R, n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let probs: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..0.8)).collect();
    let beta: Vec<f64> = (0..m)
        .map(|_| if rng.random::<f64>() < 0.5 { 0.0 } else { rng.random_range(-1.2..1.2) })
        .collect();
    let b0 = rng.random_range(-0.5..0.5);
    let x: Vec<Vec<f64>> = probs
        .iter()
        .map(|&q| (0..n).map(|_| f64::from(u8::from(rng.random::<f64>() < q))).collect())
        .collect();
    let y = (0..n)
        .map(|i| {
            let eta = b0 + (0..m).map(|j| beta[j] * x[j][i]).sum::<f64>();
            f64::from(u8::from(rng.random::<f64>() < 1.0 / (1.0 + (-eta).exp())))
        })
        .collect();
    (x, y)
}

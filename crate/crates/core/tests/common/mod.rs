#![allow(dead_code)]

use distomp_core::datagen::{NormalStream, Purpose, StreamKey};
use distomp_core::matrix::coherence;
use distomp_core::{DesignMatrix, RegressionShard, SparseVector, SupportSet};

pub fn stream(seed: u64, tag: u64) -> NormalStream {
    StreamKey::new(seed, tag, 0xFEED, Purpose::Design).stream()
}

pub fn gaussian(n: usize, d: usize, s: &mut NormalStream) -> DesignMatrix {
    let mut data = vec![0.0; n * d];
    s.fill_normal(&mut data);
    DesignMatrix::from_col_major(n, d, data).unwrap()
}

/// Gaussian design redrawn until its coherence is below `1 / (2k - 1)`.
pub fn mip_design(n: usize, d: usize, k: usize, s: &mut NormalStream) -> DesignMatrix {
    let bound = 1.0 / (2 * k - 1) as f64;
    loop {
        let x = gaussian(n, d, s);
        if coherence(&x).unwrap() < bound {
            return x;
        }
    }
}

/// `k` distinct indices in `0..d`, uniformly by partial Fisher-Yates.
pub fn random_subset(d: usize, k: usize, s: &mut NormalStream) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = i + (s.next_u64() % (d - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Nonzero coefficients bounded away from zero with random signs.
pub fn random_theta(d: usize, k: usize, s: &mut NormalStream) -> SparseVector {
    let support = random_subset(d, k, s);
    let values = (0..k)
        .map(|_| {
            let mag = 1.0 + s.uniform();
            if s.next_u64() & 1 == 0 { mag } else { -mag }
        })
        .collect();
    SparseVector::new(d, SupportSet::from_indices(support).unwrap(), values).unwrap()
}

pub fn noiseless_shard(x: DesignMatrix, theta: &SparseVector, id: usize) -> RegressionShard {
    let y = x.apply_sparse(theta).unwrap();
    RegressionShard::new(x, y, id).unwrap()
}

/// Least squares via the normal equations and Gaussian elimination with
/// partial pivoting; returns coefficients in `support` order and the residual.
pub fn normal_equations_ls(x: &DesignMatrix, y: &[f64], support: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let k = support.len();
    let n = x.rows();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (p, &i) in support.iter().enumerate() {
        for (q, &j) in support.iter().enumerate() {
            a[p][q] = (0..n).map(|r| x.get(r, i) * x.get(r, j)).sum();
        }
        a[p][k] = (0..n).map(|r| x.get(r, i) * y[r]).sum();
    }
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&p, &q| a[p][c].abs().partial_cmp(&a[q][c].abs()).unwrap())
            .unwrap();
        a.swap(c, piv);
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for col in c..=k {
                a[r][col] -= f * a[c][col];
            }
        }
    }
    let mut z = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| a[c][j] * z[j]).sum();
        z[c] = (a[c][k] - s) / a[c][c];
    }
    let mut r = y.to_vec();
    for (p, &i) in support.iter().enumerate() {
        for (row, v) in r.iter_mut().enumerate() {
            *v -= z[p] * x.get(row, i);
        }
    }
    (z, r)
}

/// Plain loop over every column outside `support`; first maximum wins.
pub fn exhaustive_scan(x: &DesignMatrix, y: &[f64], support: &[usize]) -> usize {
    let (_, r) = normal_equations_ls(x, y, support);
    let mut best = None;
    let mut best_val = -1.0;
    for j in 0..x.cols() {
        if support.contains(&j) {
            continue;
        }
        let mut ip = 0.0;
        let mut nn = 0.0;
        for i in 0..x.rows() {
            ip += x.get(i, j) * r[i];
            nn += x.get(i, j) * x.get(i, j);
        }
        let c = ip.abs() / nn.sqrt();
        if c > best_val {
            best_val = c;
            best = Some(j);
        }
    }
    best.unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

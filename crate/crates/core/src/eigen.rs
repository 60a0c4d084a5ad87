//! Dense symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit-shift QL on the tridiagonal.
//!
//! The tridiagonalization skips columns that are already in tridiagonal form
//! and restricts each Householder reflector to the actual support of its
//! column. Finite sections of tailed graphs are ordered tail-first, so all
//! but a handful of columns are skipped and a 2000x2000 section reduces in
//! O(N^2) time rather than O(N^3).

use crate::error::{Result, SpectraError};

/// Dense symmetric matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Set both (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn require_symmetric(&self, rel_tol: f64) -> Result<()> {
        let scale = self.max_abs().max(1.0);
        if self.symmetry_defect() > rel_tol * scale {
            return Err(SpectraError::InvalidParameter(
                "matrix is not symmetric".into(),
            ));
        }
        Ok(())
    }

    /// Eigenvalues, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut d, mut e) = householder_tridiagonalize(self);
        tridiag_ql(&mut d, &mut e);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d
    }
}

/// Reduce to tridiagonal form; returns (diagonal, subdiagonal).
fn householder_tridiagonalize(m: &SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    if n == 0 {
        return (vec![], vec![]);
    }
    let mut a = m.clone();
    let mut e = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        // support of column k below the subdiagonal
        let mut rmax = k + 1;
        for i in (k + 2)..n {
            if a.get(i, k) != 0.0 {
                rmax = i;
            }
        }
        if rmax == k + 1 {
            e[k] = a.get(k + 1, k);
            continue;
        }
        let mut v: Vec<f64> = (k + 1..=rmax).map(|i| a.get(i, k)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vsq: f64 = v.iter().map(|x| x * x).sum();
        if vsq == 0.0 {
            e[k] = alpha;
            continue;
        }
        let tau = 2.0 / vsq;
        // p = tau * S v over the trailing block S = a[k+1.., k+1..]
        let lo = k + 1;
        let mut p = vec![0.0; n - lo];
        for (ii, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            let row = lo + ii;
            for j in lo..n {
                p[j - lo] += tau * vi * a.get(row, j);
            }
        }
        let vp: f64 = v.iter().enumerate().map(|(ii, vi)| vi * p[ii]).sum();
        let kk = 0.5 * tau * vp;
        // q = p - kk*v (v implicitly zero beyond rmax)
        let mut q = p;
        for (ii, vi) in v.iter().enumerate() {
            q[ii] -= kk * vi;
        }
        // S' = S - v q^T - q v^T ; v supported on rows lo..=rmax
        for (ii, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            let row = lo + ii;
            for j in lo..n {
                let delta = vi * q[j - lo];
                let cur = a.get(row, j);
                a.set(row, j, cur - delta);
            }
        }
        for j_rel in 0..(n - lo) {
            let qj = q[j_rel];
            if qj == 0.0 {
                continue;
            }
            let col = lo + j_rel;
            for (ii, vi) in v.iter().enumerate() {
                let row = lo + ii;
                let cur = a.get(col, row);
                a.set(col, row, cur - qj * vi);
            }
        }
        e[k] = alpha;
        a.set(k + 1, k, alpha);
    }
    let d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix, sorted ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    assert!(offdiag.len() + 1 == diag.len() || (diag.is_empty() && offdiag.is_empty()));
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    tridiag_ql(&mut d, &mut e);
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Implicit-shift QL iteration, eigenvalues only. `e` is the subdiagonal.
fn tridiag_ql(d: &mut [f64], e: &mut Vec<f64>) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    e.push(0.0); // pad so e[m] is addressable for m = n-1
    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible subdiagonal element
            let mut m = n - 1;
            for i in l..n - 1 {
                let dd = d[i].abs() + d[i + 1].abs();
                if e[i].abs() <= f64::EPSILON * dd {
                    m = i;
                    break;
                }
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    e.pop();
}

/// Group sorted values into (value, multiplicity) clusters. Two consecutive
/// values belong to one cluster when they differ by at most
/// `tol * max(1, |value|)`.
pub fn cluster_eigenvalues(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = vec![];
    for &v in sorted {
        if let Some(last) = out.last_mut() {
            if (v - last.0).abs() <= tol * last.0.abs().max(1.0) {
                // running mean keeps the representative centered
                last.0 = (last.0 * last.1 as f64 + v) / (last.1 as f64 + 1.0);
                last.1 += 1;
                continue;
            }
        }
        out.push((v, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn path_graph_spectrum() {
        // J_{0,p}: eigenvalues 2 cos(pi j / (p+1))
        for p in [1usize, 2, 5, 12, 40] {
            let d = vec![0.0; p];
            let e = vec![1.0; p - 1];
            let ev = tridiagonal_eigenvalues(&d, &e);
            let mut expect: Vec<f64> =
                (1..=p).map(|j| 2.0 * (PI * j as f64 / (p as f64 + 1.0)).cos()).collect();
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ev.iter().zip(expect.iter()) {
                assert!((a - b).abs() < 1e-12, "p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dense_matches_known_2x2() {
        let mut m = SymMatrix::zeros(2);
        m.set_sym(0, 1, 3.0);
        m.set(0, 0, 1.0);
        m.set(1, 1, 1.0);
        let ev = m.eigenvalues();
        assert!((ev[0] + 2.0).abs() < 1e-14);
        assert!((ev[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn dense_matches_tridiagonal_route() {
        // pentadiagonal-ish random symmetric matrix, compare against a
        // brute-force characteristic scan via Sturm-free bisection on traces:
        // here we just check the two routes agree on a matrix that is both
        // dense-stored and genuinely tridiagonal.
        let n = 60;
        let d: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64) / 3.0 - 1.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 17 % 7) as f64) / 10.0).collect();
        let m = SymMatrix::from_fn(n, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j || j + 1 == i {
                e[i.min(j)]
            } else {
                0.0
            }
        });
        let a = m.eigenvalues();
        let b = tridiagonal_eigenvalues(&d, &e);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_full_matrix() {
        // K_4 adjacency: eigenvalues 3, -1, -1, -1
        let m = SymMatrix::from_fn(4, |i, j| if i == j { 0.0 } else { 1.0 });
        let ev = m.eigenvalues();
        assert!((ev[3] - 3.0).abs() < 1e-12);
        for v in &ev[..3] {
            assert!((v + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        // random-ish dense symmetric matrix; invariants of the spectrum
        let n = 35;
        let m = SymMatrix::from_fn(n, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            (((a * 31 + b * 17) % 13) as f64 - 6.0) / 5.0
        });
        let ev = m.eigenvalues();
        let tr: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let fr: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.get(i, j).powi(2)).sum();
        let tr_ev: f64 = ev.iter().sum();
        let fr_ev: f64 = ev.iter().map(|v| v * v).sum();
        assert!((tr - tr_ev).abs() < 1e-9 * fr.max(1.0));
        assert!((fr - fr_ev).abs() < 1e-9 * fr.max(1.0));
    }

    #[test]
    fn clustering_groups_close_values() {
        let sorted = [0.0, 1e-12, 1e-12, 1.0, 1.0 + 1e-12, 2.5];
        let cl = cluster_eigenvalues(&sorted, 1e-9);
        assert_eq!(cl.iter().map(|c| c.1).collect::<Vec<_>>(), vec![3, 2, 1]);
    }
}

//! The Schur-complement route: discrete spectrum of a finite graph with one
//! unit tail from the main equation P(l, G) - x P(l, G \ {n}) = 0 with
//! l = x + 1/x, Schwenk's characteristic-polynomial recursion, and the
//! transcendental closed form for flower graphs.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Result, SpectraError};
use crate::exact::{faddeev_leverrier, RatPoly};
use crate::graph::WeightedGraph;
use crate::poly::{self, Interval, RealPolynomial};

/// The tail Green's function data of a finite graph: numerator
/// P(l, g \ {v}) over denominator P(l, g), both monic.
#[derive(Debug, Clone)]
pub struct GreensData {
    pub numerator: RealPolynomial,
    pub denominator: RealPolynomial,
}

/// Characteristic polynomial of the graph, exact when the weights are
/// rational of moderate size.
pub fn graph_characteristic(g: &WeightedGraph) -> Result<RealPolynomial> {
    if g.order() <= 64 {
        Ok(RealPolynomial::from_exact(faddeev_leverrier(&g.adjacency_exact())))
    } else {
        poly::characteristic_polynomial(&g.adjacency_matrix())
    }
}

fn characteristic_of_deletion(g: &WeightedGraph, vs: &BTreeSet<usize>) -> Result<RealPolynomial> {
    let del = g.delete_vertices(vs)?;
    match del.graph {
        Some(sub) => graph_characteristic(&sub),
        None => Ok(RealPolynomial::from_i64(&[1])),
    }
}

/// Schwenk's recursion at `v`:
/// P(F) = l P(F\v) - sum_{v'~v} P(F\{v',v}) - 2 sum_{Z in C(v)} P(F\Z),
/// run all the way down with memoization on vertex subsets. Unit weights
/// only, as stated.
pub fn schwenk_characteristic(g: &WeightedGraph, v: usize) -> Result<RealPolynomial> {
    if !g.is_unweighted() {
        return Err(SpectraError::InvalidParameter(
            "Schwenk recursion implemented for unit weights".into(),
        ));
    }
    g.check_vertex(v)?;
    if g.order() > 64 {
        return Err(SpectraError::InvalidParameter(
            "Schwenk recursion capped at 64 vertices".into(),
        ));
    }
    let full: u64 = if g.order() == 64 { !0 } else { (1u64 << g.order()) - 1 };
    let mut memo: HashMap<u64, RatPoly> = HashMap::new();
    let p = schwenk_rec(g, full, Some(v), &mut memo)?;
    Ok(RealPolynomial::from_exact(p))
}

fn mask_remove(mask: u64, vertices: impl IntoIterator<Item = usize>) -> u64 {
    let mut m = mask;
    for v in vertices {
        m &= !(1u64 << (v - 1));
    }
    m
}

fn schwenk_rec(
    g: &WeightedGraph,
    mask: u64,
    pivot: Option<usize>,
    memo: &mut HashMap<u64, RatPoly>,
) -> Result<RatPoly> {
    if mask == 0 {
        return Ok(RatPoly::one());
    }
    if pivot.is_none() {
        if let Some(p) = memo.get(&mask) {
            return Ok(p.clone());
        }
    }
    let v = match pivot {
        Some(v) => v,
        None => {
            // pivot on a present vertex of smallest induced degree
            (1..=g.order())
                .filter(|&u| mask & (1 << (u - 1)) != 0)
                .min_by_key(|&u| {
                    g.neighbors(u)
                        .iter()
                        .filter(|(w, _)| mask & (1 << (w - 1)) != 0)
                        .count()
                })
                .unwrap()
        }
    };
    // l * P(F \ v)
    let lambda = RatPoly::from_i64(&[0, 1]);
    let mut acc = lambda.mul(&schwenk_rec(g, mask_remove(mask, [v]), None, memo)?);
    // - sum over neighbors in the induced graph
    for (u, _) in g.neighbors(v) {
        if mask & (1 << (u - 1)) != 0 {
            let term = schwenk_rec(g, mask_remove(mask, [v, u]), None, memo)?;
            acc = acc.sub(&term);
        }
    }
    // - 2 sum over simple cycles through v in the induced graph
    if let Some((sub, map_back)) = induced_graph(g, mask)? {
        if let Some(pos) = map_back.iter().position(|&orig| orig == v) {
            for cycle in sub.simple_cycles_through(pos + 1)? {
                let orig: Vec<usize> = cycle.iter().map(|&i| map_back[i - 1]).collect();
                let term = schwenk_rec(g, mask_remove(mask, orig), None, memo)?;
                acc = acc.sub(&term.scale(&BigRational::from_integer(2.into())));
            }
        }
    }
    if pivot.is_none() {
        memo.insert(mask, acc.clone());
    }
    Ok(acc)
}

/// Induced subgraph on a mask, plus the new-index -> old-id map.
fn induced_graph(g: &WeightedGraph, mask: u64) -> Result<Option<(WeightedGraph, Vec<usize>)>> {
    let keep: Vec<usize> = (1..=g.order()).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
    if keep.is_empty() {
        return Ok(None);
    }
    let drop: BTreeSet<usize> = (1..=g.order()).filter(|v| !keep.contains(v)).collect();
    let del = g.delete_vertices(&drop)?;
    Ok(del.graph.map(|sub| (sub, keep)))
}

/// The n-th spectral Green's function of the finite graph as a ratio of
/// characteristic polynomials.
pub fn greens_function_finite(g: &WeightedGraph, v: usize) -> Result<GreensData> {
    g.check_vertex(v)?;
    let denominator = graph_characteristic(g)?;
    let numerator = characteristic_of_deletion(g, &BTreeSet::from([v]))?;
    Ok(GreensData { numerator, denominator })
}

/// Discrete spectrum of `g` with one unit tail at `attach`, by clearing
/// denominators in P(l, g) - x P(l, g \ {attach}) = 0 with l = x + 1/x and
/// root-finding in (-1, 1) \ {0}. Returns (lambda, x) pairs sorted by lambda.
pub fn schur_discrete_spectrum(g: &WeightedGraph, attach: usize) -> Result<Vec<(f64, f64)>> {
    let greens = greens_function_finite(g, attach)?;
    let p1 = greens.denominator.to_rational();
    let p0 = greens.numerator.to_rational();
    // W(x) = x^n P1(x + 1/x) - x^{n+1} P0(x + 1/x); the cleared P0 carries
    // x^{n-1}, so it needs two more powers of x to line up.
    let lhs = p1.clear_joukowski();
    let rhs = shift_k(&p0.clear_joukowski(), 2);
    let mut w = lhs.sub(&rhs);
    // clearing introduces roots at x = 0; strip them
    while !w.is_zero() && w.coeffs[0].is_zero() {
        w = RatPoly::new(w.coeffs[1..].to_vec());
    }
    if w.is_zero() || w.degree() == 0 {
        return Ok(vec![]);
    }
    let report = poly::real_roots_in_interval(
        &RealPolynomial::from_exact(w),
        &Interval::new(-1.0, 1.0).expect("valid"),
        1e-9,
    )?;
    let mut out: Vec<(f64, f64)> = report
        .roots
        .iter()
        .filter(|&&(x, _)| x.abs() > 1e-9)
        .map(|&(x, _)| (x + 1.0 / x, x))
        .filter(|&(l, _)| l.abs() > 2.0)
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

fn shift_k(p: &RatPoly, k: usize) -> RatPoly {
    if p.is_zero() {
        return RatPoly::zero();
    }
    let mut coeffs = vec![BigRational::zero(); k];
    coeffs.extend(p.coeffs.iter().cloned());
    RatPoly::new(coeffs)
}

/// Discrete spectrum of a flower (petal path lengths k_j >= 2, i.e. cycle
/// orders k_j + 1) with the tail at the root, from the transcendental
/// equations phi_{1,2}(t) = e^t. Returns (lambda_plus, lambda_minus).
pub fn flower_discrete_spectrum(petal_path_lengths: &[usize]) -> Result<(f64, f64)> {
    if petal_path_lengths.len() < 2 {
        return Err(SpectraError::InvalidParameter("flower needs >= 2 petals".into()));
    }
    if petal_path_lengths.iter().any(|&k| k < 2) {
        return Err(SpectraError::InvalidParameter("petal path lengths must be >= 2".into()));
    }
    let t_plus = solve_flower_equation(petal_path_lengths, false)?;
    let t_minus = solve_flower_equation(petal_path_lengths, true)?;
    Ok((2.0 * t_plus.cosh(), -2.0 * t_minus.cosh()))
}

/// sinh(a t) / sinh(b t) computed as exp((a-b) t) (1 - e^{-2at})/(1 - e^{-2bt}),
/// stable for large t.
fn sinh_ratio(a: f64, b: f64, t: f64) -> f64 {
    let num = -(-2.0 * a * t).exp_m1();
    let den = -(-2.0 * b * t).exp_m1();
    ((a - b) * t).exp() * num / den
}

/// phi(t) e^{-t} - 1; phi decreasing and phi(0+) > 1 make bisection certified.
/// `negative` selects the x = -e^{-t} equation with its (-1)^{k_j + 1} signs.
fn flower_gap(ks: &[usize], negative: bool, t: f64) -> f64 {
    let mut phi = 0.0;
    for &k in ks {
        let kf = k as f64;
        let sign = if !negative {
            1.0
        } else if k % 2 == 1 {
            // (-1)^{k+1} = +1 for odd k
            1.0
        } else {
            -1.0
        };
        phi += 2.0 * (sinh_ratio(kf, kf + 1.0, t) + sign * sinh_ratio(1.0, kf + 1.0, t));
    }
    phi * (-t).exp() - 1.0
}

fn solve_flower_equation(ks: &[usize], negative: bool) -> Result<f64> {
    let mut lo = 1e-12;
    let mut hi = 40.0;
    let f_lo = flower_gap(ks, negative, lo);
    let f_hi = flower_gap(ks, negative, hi);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(SpectraError::Singular(format!(
            "flower equation bracket failed: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if flower_gap(ks, negative, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::cluster_eigenvalues;

    #[test]
    fn schwenk_on_triangle() {
        let c3 = WeightedGraph::cycle(3).unwrap();
        for v in 1..=3 {
            let p = schwenk_characteristic(&c3, v).unwrap();
            for (k, want) in [-2.0, -3.0, 0.0, 1.0].iter().enumerate() {
                assert!((p.coeff(k) - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn schwenk_on_tree_at_leaf() {
        let g = WeightedGraph::from_edges(
            7,
            &[(1, 2, 1.0), (2, 3, 1.0), (2, 4, 1.0), (4, 5, 1.0), (4, 6, 1.0), (6, 7, 1.0)],
        )
        .unwrap();
        let want = graph_characteristic(&g).unwrap();
        let got = schwenk_characteristic(&g, 1).unwrap();
        assert_eq!(got.degree(), want.degree());
        for k in 0..=want.degree() {
            assert!((got.coeff(k) - want.coeff(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn schwenk_matches_determinant_on_cyclic_graphs() {
        let graphs = vec![
            WeightedGraph::complete(5).unwrap(),
            WeightedGraph::flower(&[3, 4]).unwrap(),
            WeightedGraph::flower(&[3, 3, 3]).unwrap(),
            WeightedGraph::cycle(8).unwrap(),
            WeightedGraph::from_edges(
                6,
                &[
                    (1, 2, 1.0),
                    (2, 3, 1.0),
                    (3, 1, 1.0),
                    (3, 4, 1.0),
                    (4, 5, 1.0),
                    (5, 6, 1.0),
                    (6, 4, 1.0),
                ],
            )
            .unwrap(),
        ];
        for g in &graphs {
            let want = graph_characteristic(g).unwrap();
            for v in [1, g.order()] {
                let got = schwenk_characteristic(g, v).unwrap();
                assert_eq!(got.degree(), want.degree());
                for k in 0..=want.degree() {
                    assert!(
                        (got.coeff(k) - want.coeff(k)).abs() < 1e-10,
                        "order {} pivot {v} coeff {k}",
                        g.order()
                    );
                }
            }
        }
    }

    #[test]
    fn schwenk_flower_closed_form() {
        // P(l, flower) = l Q(l) - 2 sum_j prod_{m != j} Q(l, k_m) (Q(l, k_j - 1) + 1)
        // with Q(l, k) = U_k(l/2) and Q = prod_j Q(l, k_j)
        let ks = [2usize, 3];
        let orders: Vec<usize> = ks.iter().map(|k| k + 1).collect();
        let g = WeightedGraph::flower(&orders).unwrap();
        let p = schwenk_characteristic(&g, g.order()).unwrap();
        let u = |k: usize| -> RealPolynomial {
            let c = crate::poly::chebyshev_u(k);
            RealPolynomial::new(
                c.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v / 2f64.powi(i as i32))
                    .collect(),
            )
        };
        let q_all = ks.iter().fold(RealPolynomial::constant(1.0), |acc, &k| acc.mul(&u(k)));
        let mut rhs = RealPolynomial::new(vec![0.0, 1.0]).mul(&q_all);
        for (j, &k) in ks.iter().enumerate() {
            let mut prod_others = RealPolynomial::constant(1.0);
            for (m, &km) in ks.iter().enumerate() {
                if m != j {
                    prod_others = prod_others.mul(&u(km));
                }
            }
            let inner = u(k - 1).add(&RealPolynomial::constant(1.0));
            rhs = rhs.sub(&prod_others.mul(&inner).scale(2.0));
        }
        assert_eq!(p.degree(), rhs.degree());
        for i in 0..=rhs.degree() {
            assert!((p.coeff(i) - rhs.coeff(i)).abs() < 1e-10, "coeff {i}");
        }
    }

    #[test]
    fn schur_on_complete_graph() {
        for n in 3..=8usize {
            let g = WeightedGraph::complete(n).unwrap();
            let roots = schur_discrete_spectrum(&g, n).unwrap();
            assert_eq!(roots.len(), 1);
            let nf = n as f64;
            let x6 = (((nf + 2.0) / (nf - 2.0)).sqrt() - 1.0) / 2.0;
            assert!((roots[0].1 - x6).abs() < 1e-12, "n={n}");
            assert!((roots[0].0 - (x6 + 1.0 / x6)).abs() < 1e-11);
        }
    }

    #[test]
    fn schur_on_star() {
        for n in 3..=6usize {
            let g = WeightedGraph::star(&vec![1.0; n]).unwrap();
            let roots = schur_discrete_spectrum(&g, n + 1).unwrap();
            assert_eq!(roots.len(), 2);
            let nf = n as f64;
            let want = (nf - 1.0).sqrt() + 1.0 / (nf - 1.0).sqrt();
            assert!((roots[1].0 - want).abs() < 1e-11);
            assert!((roots[0].0 + want).abs() < 1e-11);
        }
    }

    #[test]
    fn schur_on_path_is_free() {
        for k in 1..=5usize {
            let g = WeightedGraph::path(k).unwrap();
            let roots = schur_discrete_spectrum(&g, k).unwrap();
            assert!(roots.is_empty(), "P_{k} with end tail is the free path");
        }
    }

    #[test]
    fn greens_data_shapes() {
        let single = WeightedGraph::from_edges(1, &[]).unwrap();
        let gd = greens_function_finite(&single, 1).unwrap();
        assert_eq!(gd.numerator.coeffs(), &[1.0]);
        assert_eq!(gd.denominator.coeffs(), &[0.0, 1.0]);
        let p2 = WeightedGraph::path(2).unwrap();
        let gd = greens_function_finite(&p2, 2).unwrap();
        assert_eq!(gd.numerator.coeffs(), &[0.0, 1.0]);
        for (k, want) in [-1.0, 0.0, 1.0].iter().enumerate() {
            assert!((gd.denominator.coeff(k) - want).abs() < 1e-14);
        }
    }

    fn pseudo_random_connected(n: usize, seed: u64) -> WeightedGraph {
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut edges = vec![];
        for v in 2..=n {
            let parent = (next() % (v as u64 - 1)) as usize + 1;
            edges.push((parent.min(v), parent.max(v), 1.0));
        }
        for _ in 0..n {
            let i = (next() % n as u64) as usize + 1;
            let j = (next() % n as u64) as usize + 1;
            if i != j && !edges.iter().any(|&(a, b, _)| (a, b) == (i.min(j), i.max(j))) {
                edges.push((i.min(j), i.max(j), 1.0));
            }
        }
        WeightedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn interlacing_on_random_graphs() {
        for trial in 0..50u64 {
            let n = 4 + (trial % 6) as usize;
            let g = pseudo_random_connected(n, 0x5eed + trial);
            let v = (trial % n as u64) as usize + 1;
            let gd = greens_function_finite(&g, v).unwrap();
            assert_eq!(gd.denominator.degree(), gd.numerator.degree() + 1);
            let mut lam = g.adjacency_matrix().eigenvalues();
            lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let del = g.delete_vertices(&BTreeSet::from([v])).unwrap();
            let mut mu = del.graph.unwrap().adjacency_matrix().eigenvalues();
            mu.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for k in 0..mu.len() {
                assert!(
                    lam[k] >= mu[k] - 1e-9 && mu[k] >= lam[k + 1] - 1e-9,
                    "interlacing fails: trial {trial}"
                );
            }
        }
    }

    #[test]
    fn multiple_eigenvalue_off_band_persists() {
        // three weight-3 edges with one end each joined to a center:
        // +-3 are double eigenvalues of the finite graph and must show up
        // in the Schur output
        let g = WeightedGraph::from_edges(
            7,
            &[
                (1, 2, 3.0),
                (3, 4, 3.0),
                (5, 6, 3.0),
                (1, 7, 1.0),
                (3, 7, 1.0),
                (5, 7, 1.0),
            ],
        )
        .unwrap();
        let eigs = g.adjacency_matrix().eigenvalues();
        let clusters = cluster_eigenvalues(&eigs, 1e-9);
        assert!(clusters.iter().any(|&(v, m)| (v - 3.0).abs() < 1e-9 && m == 2));
        let roots = schur_discrete_spectrum(&g, 7).unwrap();
        assert!(
            roots.iter().any(|&(l, _)| (l - 3.0).abs() < 1e-9),
            "multiple eigenvalue 3 lost: {roots:?}"
        );
        assert!(roots.iter().any(|&(l, _)| (l + 3.0).abs() < 1e-9));
    }

    #[test]
    fn flower_transcendental_matches_algebraic_reduction() {
        // all petals C_3 (k_j = 2): lambda_+- from (2n-1)x^2 + x - 1 = 0
        for n in 2..=5usize {
            let (lp, lm) = flower_discrete_spectrum(&vec![2; n]).unwrap();
            let nf = n as f64;
            let disc = (8.0 * nf - 3.0).sqrt();
            let x4 = (-1.0 + disc) / (2.0 * (2.0 * nf - 1.0));
            let x5 = (-1.0 - disc) / (2.0 * (2.0 * nf - 1.0));
            assert!((lp - (x4 + 1.0 / x4)).abs() < 1e-10, "n={n}: {lp}");
            assert!((lm - (x5 + 1.0 / x5)).abs() < 1e-10, "n={n}: {lm}");
        }
    }

    #[test]
    fn flower_transcendental_matches_schur() {
        for ks in [vec![2usize, 2], vec![2, 3], vec![3, 3], vec![2, 2, 4]] {
            let orders: Vec<usize> = ks.iter().map(|k| k + 1).collect();
            let g = WeightedGraph::flower(&orders).unwrap();
            let roots = schur_discrete_spectrum(&g, g.order()).unwrap();
            assert_eq!(roots.len(), 2, "{ks:?}: {roots:?}");
            let (lp, lm) = flower_discrete_spectrum(&ks).unwrap();
            assert!((roots[1].0 - lp).abs() < 1e-9, "{ks:?}");
            assert!((roots[0].0 - lm).abs() < 1e-9, "{ks:?}");
        }
    }

    #[test]
    fn flower_bracket_is_positive_at_zero() {
        // phi_1(0+) = 2n > 1 guarantees the bracket
        for n in 2..=6 {
            let g = flower_gap(&vec![3; n], false, 1e-9);
            assert!((g - (2.0 * n as f64 - 1.0)).abs() < 1e-5, "n={n}: {g}");
        }
    }

    #[test]
    fn schwenk_rejects_weighted() {
        let g = WeightedGraph::from_edges(2, &[(1, 2, 1.5)]).unwrap();
        assert!(schwenk_characteristic(&g, 1).is_err());
    }
}

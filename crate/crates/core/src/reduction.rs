//! Reduction of a tailed graph's adjacency operator to the canonical form
//! finite component ⊕ Jacobi component, via a Krylov tridiagonalization
//! started from the attachment vector (Lanczos with full
//! reorthogonalization). For rational edge weights the run is exact: the
//! Krylov vectors stay unnormalized, so only the squares of the off-diagonal
//! coefficients are needed and everything lives in the rationals.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::eigen::{self, SymMatrix};
use crate::error::{Result, SpectraError};
use crate::graph::{TailSpec, WeightedGraph};
use crate::jacobi::FiniteRankJacobi;
use crate::poly::Interval;
use crate::spectrum::{Multiplicity, Spectrum};

/// One Jacobi summand of a canonical form, possibly shifted by a multiple of
/// the identity (the ladder decompositions are ±I + J).
#[derive(Debug, Clone)]
pub struct JacobiComponent {
    pub shift: f64,
    pub matrix: FiniteRankJacobi,
}

impl JacobiComponent {
    pub fn plain(matrix: FiniteRankJacobi) -> Self {
        Self { shift: 0.0, matrix }
    }
}

/// Block-diagonal model of the adjacency operator: a finite symmetric matrix,
/// finite-rank Jacobi summands, and extra copies of the free matrix.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub finite_component: SymMatrix,
    pub jacobi_components: Vec<JacobiComponent>,
    pub free_copies: usize,
    pub notes: Vec<String>,
}

impl CanonicalForm {
    /// Dimension of the Krylov chain inside the finite part for a single-tail
    /// reduction: the Jacobi rank support minus bridge and tail entries is
    /// not recoverable in general, so this is recorded at construction time.
    pub fn finite_dim(&self) -> usize {
        self.finite_component.order()
    }
}

const EXACT_DENOMINATOR_CAP: u64 = 1 << 20;

/// Reduce `adjacency(g) with one tail` to finite ⊕ Jacobi. The Jacobi
/// component extends the tail matrix: beyond its Krylov part it carries the
/// bridge weight and then the tail weights unchanged.
pub fn reduce_single_tail(g: &WeightedGraph, tail: &TailSpec) -> Result<CanonicalForm> {
    g.check_vertex(tail.attach)?;
    let bridge_sq = tail.bridge.exact() * tail.bridge.exact();
    reduce_with_bridge_sq(g, tail, bridge_sq)
}

fn reduce_with_bridge_sq(
    g: &WeightedGraph,
    tail: &TailSpec,
    bridge_sq: BigRational,
) -> Result<CanonicalForm> {
    let mut notes = vec![];
    if !g.is_connected() {
        notes.push("finite graph is disconnected; components away from the tail only contribute to the finite block".into());
    }
    let krylov = if weights_are_small(g) {
        exact_krylov(g, tail.attach)
    } else {
        float_krylov(g, tail.attach)
    };
    let k = krylov.diag.len();
    debug_assert!(k >= 1 && k <= g.order());

    // Jacobi component: reversed Krylov coefficients, bridge, tail weights.
    let mut b: Vec<BigRational> = krylov.diag.iter().rev().cloned().collect();
    let mut a_sq: Vec<BigRational> = krylov.offdiag_sq.iter().rev().cloned().collect();
    a_sq.push(bridge_sq);
    for w in &tail.tail_weights {
        a_sq.push(w.exact() * w.exact());
    }
    b.resize(a_sq.len(), BigRational::zero());
    let jacobi = FiniteRankJacobi::from_exact(b, a_sq)?;

    let finite_component = compress_complement(g, &krylov.basis);
    if finite_component.order() == g.order().saturating_sub(1) {
        notes.push("finite component has order n-1 (reduction stopped after one step)".into());
    }
    Ok(CanonicalForm {
        finite_component,
        jacobi_components: vec![JacobiComponent::plain(jacobi)],
        free_copies: 0,
        notes,
    })
}

/// Attach p >= 1 rays to one vertex: same reduction with bridge sqrt(p) and
/// p - 1 extra free summands.
pub fn multi_ray_attach(g: &WeightedGraph, v: usize, p: usize) -> Result<CanonicalForm> {
    if p < 1 {
        return Err(SpectraError::InvalidParameter("need p >= 1 rays".into()));
    }
    let tail = TailSpec::unit(v);
    let mut cf = reduce_with_bridge_sq(g, &tail, BigRational::from_integer(p.into()))?;
    cf.free_copies = p - 1;
    Ok(cf)
}

/// p rays at every vertex of an unweighted graph: the canonical form is
/// ⊕_j J(lambda_j, sqrt p) plus (p-1) n free copies, and the spectrum is
/// [-2, 2] with the discrete spectra of the rank-one summands.
pub fn rays_at_every_vertex(g: &WeightedGraph, p: usize) -> Result<(CanonicalForm, Spectrum)> {
    if p < 1 {
        return Err(SpectraError::InvalidParameter("need p >= 1 rays".into()));
    }
    if !g.is_unweighted() {
        return Err(SpectraError::InvalidParameter(
            "rays-at-every-vertex requires an unweighted graph".into(),
        ));
    }
    let n = g.order();
    let eigs = g.adjacency_matrix().eigenvalues();
    let components: Vec<JacobiComponent> = eigs
        .iter()
        .map(|&l| {
            let j = FiniteRankJacobi::from_exact(
                vec![crate::exact::rational_from_f64(l)],
                vec![BigRational::from_integer(p.into())],
            )?;
            Ok(JacobiComponent::plain(j))
        })
        .collect::<Result<Vec<_>>>()?;
    let cf = CanonicalForm {
        finite_component: SymMatrix::zeros(0),
        jacobi_components: components,
        free_copies: (p - 1) * n,
        notes: vec![],
    };
    let spectrum = spectrum_of_canonical(&cf)?;
    Ok((cf, spectrum))
}

/// Spectrum of a canonical form: dense solve of the finite component plus
/// [-2, 2] + discrete spectrum per Jacobi summand, with eigenvalues inside
/// bands classified as hidden.
pub fn spectrum_of_canonical(cf: &CanonicalForm) -> Result<Spectrum> {
    let mut bands = vec![];
    let mut points = vec![];
    let mut notes = cf.notes.clone();
    for comp in &cf.jacobi_components {
        bands.push((
            Interval::new(comp.shift - 2.0, comp.shift + 2.0)?,
            Multiplicity::Finite(1),
        ));
        let report = comp.matrix.discrete_spectrum_report();
        for e in report.eigenvalues {
            points.push((comp.shift + e.lambda, Multiplicity::Finite(1)));
        }
        for z in report.resonances {
            notes.push(format!(
                "resonance: Jost root at z = {z:.12} on the unit circle (component shift {})",
                comp.shift
            ));
        }
    }
    if cf.free_copies > 0 {
        bands.push((Interval::new(-2.0, 2.0)?, Multiplicity::Finite(cf.free_copies)));
    }
    if cf.finite_component.order() > 0 {
        let eigs = cf.finite_component.eigenvalues();
        for (value, mult) in eigen::cluster_eigenvalues(&eigs, 1e-9) {
            points.push((value, Multiplicity::Finite(mult)));
        }
    }
    Spectrum::assemble(bands, points, notes)
}

struct KrylovRun {
    /// Orthonormal Krylov basis as dense f64 columns (length n each).
    basis: Vec<Vec<f64>>,
    /// delta_1..delta_k of the normalized chain.
    diag: Vec<BigRational>,
    /// gamma_1^2..gamma_{k-1}^2 of the normalized chain.
    offdiag_sq: Vec<BigRational>,
}

fn weights_are_small(g: &WeightedGraph) -> bool {
    use num_bigint::BigInt;
    let den_cap = BigInt::from(EXACT_DENOMINATOR_CAP);
    let num_cap = BigInt::from(1u64 << 40);
    g.order() <= 64
        && g.adjacency_exact()
            .iter()
            .flatten()
            .all(|w| w.denom().abs() <= den_cap && w.numer().abs() <= num_cap)
}

fn exact_krylov(g: &WeightedGraph, attach: usize) -> KrylovRun {
    let n = g.order();
    let a = g.adjacency_exact();
    let mat_vec = |v: &Vec<BigRational>| -> Vec<BigRational> {
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| !a[i][j].is_zero())
                    .map(|j| &a[i][j] * &v[j])
                    .sum()
            })
            .collect()
    };
    let dot = |x: &Vec<BigRational>, y: &Vec<BigRational>| -> BigRational {
        x.iter().zip(y.iter()).map(|(p, q)| p * q).sum()
    };
    let mut start = vec![BigRational::zero(); n];
    start[attach - 1] = BigRational::one();
    let mut vectors = vec![start];
    let mut norms_sq = vec![BigRational::one()];
    let mut diag = vec![];
    let mut offdiag_sq = vec![];
    loop {
        let k = vectors.len();
        let w0 = mat_vec(&vectors[k - 1]);
        diag.push(dot(&w0, &vectors[k - 1]) / norms_sq[k - 1].clone());
        // full reorthogonalization (exact, so one pass suffices)
        let mut w = w0;
        for (v, nsq) in vectors.iter().zip(norms_sq.iter()) {
            let c = dot(&w, v) / nsq;
            if !c.is_zero() {
                for (wi, vi) in w.iter_mut().zip(v.iter()) {
                    *wi -= &c * vi;
                }
            }
        }
        let wsq = dot(&w, &w);
        if wsq.is_zero() || k == n {
            break;
        }
        offdiag_sq.push(wsq.clone() / norms_sq[k - 1].clone());
        vectors.push(w);
        norms_sq.push(wsq);
    }
    let basis = vectors
        .iter()
        .zip(norms_sq.iter())
        .map(|(v, nsq)| {
            let nrm = nsq.to_f64().unwrap_or(f64::NAN).sqrt();
            v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / nrm).collect()
        })
        .collect();
    KrylovRun { basis, diag, offdiag_sq }
}

fn float_krylov(g: &WeightedGraph, attach: usize) -> KrylovRun {
    let n = g.order();
    let a = g.adjacency_matrix();
    let breakdown = 1e-10 * a.max_abs().max(1.0);
    let mat_vec = |v: &Vec<f64>| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j) * v[j]).sum())
            .collect()
    };
    let dot = |x: &Vec<f64>, y: &Vec<f64>| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    let mut v = vec![0.0; n];
    v[attach - 1] = 1.0;
    let mut basis = vec![v];
    let mut diag = vec![];
    let mut offdiag = vec![];
    loop {
        let k = basis.len();
        let mut w = mat_vec(&basis[k - 1]);
        diag.push(crate::exact::rational_from_f64(dot(&w, &basis[k - 1])));
        // two-pass reorthogonalization for float stability
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                if c != 0.0 {
                    for (wi, ui) in w.iter_mut().zip(u.iter()) {
                        *wi -= c * ui;
                    }
                }
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm <= breakdown || k == n {
            break;
        }
        offdiag.push(crate::exact::rational_from_f64(norm * norm));
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        basis.push(w);
    }
    KrylovRun { basis, diag, offdiag_sq: offdiag }
}

/// Compression of the adjacency onto the orthogonal complement of the
/// Krylov subspace.
fn compress_complement(g: &WeightedGraph, krylov: &[Vec<f64>]) -> SymMatrix {
    let n = g.order();
    let k = krylov.len();
    let m = n - k;
    if m == 0 {
        return SymMatrix::zeros(0);
    }
    let a = g.adjacency_matrix();
    // complement basis by projecting the standard basis and running
    // modified Gram-Schmidt
    let mut comp: Vec<Vec<f64>> = vec![];
    for idx in 0..n {
        if comp.len() == m {
            break;
        }
        let mut v = vec![0.0; n];
        v[idx] = 1.0;
        for _ in 0..2 {
            for u in krylov.iter().chain(comp.iter()) {
                let c: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
                if c != 0.0 {
                    for (vi, ui) in v.iter_mut().zip(u.iter()) {
                        *vi -= c * ui;
                    }
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            comp.push(v);
        }
    }
    debug_assert_eq!(comp.len(), m, "complement dimension mismatch");
    let mut f = SymMatrix::zeros(m);
    for i in 0..m {
        let av: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|c| a.get(r, c) * comp[i][c]).sum())
            .collect();
        for j in 0..m {
            let val: f64 = av.iter().zip(comp[j].iter()).map(|(x, y)| x * y).sum();
            f.set(i, j, val);
        }
    }
    // symmetrize away roundoff
    for i in 0..m {
        for j in (i + 1)..m {
            let s = 0.5 * (f.get(i, j) + f.get(j, i));
            f.set_sym(i, j, s);
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Prescribed invariant decompositions (catalog bases)
// ---------------------------------------------------------------------------

/// A sparse vector over the vertex set of an infinite graph (0-based ids).
pub type SparseVec = Vec<(usize, f64)>;

/// Basis of one invariant subspace: explicit head vectors, then an eventually
/// periodic tail rule (templates repeated with a constant vertex shift).
#[derive(Debug, Clone)]
pub struct ComponentBasis {
    pub head: Vec<SparseVec>,
    pub tail: Option<TailRule>,
}

#[derive(Debug, Clone)]
pub struct TailRule {
    pub templates: Vec<SparseVec>,
    pub vertex_shift: usize,
}

impl ComponentBasis {
    /// The j-th (0-based) basis vector.
    fn vector(&self, j: usize) -> Option<SparseVec> {
        if j < self.head.len() {
            return Some(self.head[j].clone());
        }
        let rule = self.tail.as_ref()?;
        let t = j - self.head.len();
        let period = rule.templates.len();
        let shift = (t / period) * rule.vertex_shift;
        Some(
            rule.templates[t % period]
                .iter()
                .map(|&(v, c)| (v + shift, c))
                .collect(),
        )
    }

    fn count(&self, periods: usize) -> usize {
        match &self.tail {
            None => self.head.len(),
            Some(rule) => self.head.len() + periods * rule.templates.len(),
        }
    }
}

/// The claimed action on one component: a shifted finite-rank Jacobi matrix
/// or an explicit finite symmetric block.
#[derive(Debug, Clone)]
pub enum ClaimedComponent {
    Jacobi(JacobiComponent),
    Finite(SymMatrix),
}

fn dot_sparse(x: &SparseVec, y: &SparseVec) -> f64 {
    let mut s = 0.0;
    for &(i, a) in x {
        for &(j, b) in y {
            if i == j {
                s += a * b;
            }
        }
    }
    s
}

/// Check that a prescribed orthonormal family block-diagonalizes the
/// adjacency operator exactly as claimed, on the finite part and on three
/// tail periods. `adjacency` returns the weighted neighbor list of a vertex.
///
/// Errors on a non-orthonormal family (naming the offending pair); returns
/// false when the intertwining fails.
pub fn verify_invariant_decomposition(
    adjacency: &dyn Fn(usize) -> Vec<(usize, f64)>,
    components: &[(ComponentBasis, ClaimedComponent)],
    periods: usize,
) -> Result<bool> {
    const TOL: f64 = 1e-12;
    // materialize all vectors (one extra period for the A-image of the last
    // checked vector)
    let mut all: Vec<(usize, usize, SparseVec)> = vec![]; // (component, index, vector)
    for (ci, (basis, _)) in components.iter().enumerate() {
        let count = basis.count(periods + 1);
        for j in 0..count {
            let v = basis.vector(j).ok_or_else(|| {
                SpectraError::InvalidParameter(format!(
                    "component {ci} has no vector {j}; finite basis too short"
                ))
            })?;
            all.push((ci, j, v));
        }
    }
    for (p, (ci, i, u)) in all.iter().enumerate() {
        for (cj, j, v) in all.iter().skip(p) {
            let want = if ci == cj && i == j { 1.0 } else { 0.0 };
            let got = dot_sparse(u, v);
            if (got - want).abs() > TOL {
                return Err(SpectraError::InvalidParameter(format!(
                    "basis not orthonormal: <c{ci}[{i}], c{cj}[{j}]> = {got}"
                )));
            }
        }
    }
    // intertwining: A u_j matches the claimed combination within each component
    for (_ci, (basis, claimed)) in components.iter().enumerate() {
        let count = basis.count(periods);
        for j in 0..count {
            let u = basis.vector(j).unwrap();
            // A u as a dense map
            let mut image: std::collections::BTreeMap<usize, f64> = Default::default();
            for &(v, c) in &u {
                for (w, weight) in adjacency(v) {
                    *image.entry(w).or_insert(0.0) += c * weight;
                }
            }
            // claimed combination
            let mut want: std::collections::BTreeMap<usize, f64> = Default::default();
            let mut add = |vec: Option<SparseVec>, coeff: f64| {
                if coeff == 0.0 {
                    return true;
                }
                match vec {
                    Some(v) => {
                        for (idx, c) in v {
                            *want.entry(idx).or_insert(0.0) += coeff * c;
                        }
                        true
                    }
                    None => false,
                }
            };
            let ok = match claimed {
                ClaimedComponent::Jacobi(jc) => {
                    let m = &jc.matrix;
                    let k = j + 1; // 1-based position in the chain
                    let mut ok = add(basis.vector(j), jc.shift + m.b(k));
                    if k >= 2 {
                        ok &= add(basis.vector(j - 1), m.a(k - 1));
                    }
                    ok &= add(basis.vector(j + 1), m.a(k));
                    ok
                }
                ClaimedComponent::Finite(f) => {
                    let mut ok = true;
                    for i in 0..f.order() {
                        ok &= add(basis.vector(i), f.get(i, j));
                    }
                    ok
                }
            };
            if !ok {
                return Ok(false);
            }
            let keys: std::collections::BTreeSet<usize> =
                image.keys().chain(want.keys()).copied().collect();
            for key in keys {
                let a = image.get(&key).copied().unwrap_or(0.0);
                let b = want.get(&key).copied().unwrap_or(0.0);
                if (a - b).abs() > TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

//! Real polynomial arithmetic, Chebyshev families, root counting and
//! isolation, and the Joukowski substitution shared by the other modules.
//!
//! A [`RealPolynomial`] stores f64 coefficients and, when it was produced by
//! an exact computation, a rational mirror of the same coefficients. Root
//! isolation always runs on exact rationals (an f64 is itself a rational),
//! so Sturm counts carry no floating-point sign ambiguity; only the final
//! polish of each isolated root is done in f64.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::eigen::SymMatrix;
use crate::error::{Result, SpectraError};
use crate::exact::{self, RatPoly};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(SpectraError::InvalidParameter(format!(
                "interval requires lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_strictly(&self, x: f64, margin: f64) -> bool {
        self.lo + margin < x && x < self.hi - margin
    }
}

/// Dense real-coefficient polynomial, ascending degree order.
#[derive(Debug, Clone)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
    exact: Option<RatPoly>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs, exact: None }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![], exact: Some(RatPoly::zero()) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn from_exact(p: RatPoly) -> Self {
        Self { coeffs: p.to_f64_coeffs(), exact: Some(p) }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_exact(RatPoly::from_i64(coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    /// The coefficient of x^k (0 beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn exact(&self) -> Option<&RatPoly> {
        self.exact.as_ref()
    }

    /// Rational image of this polynomial: the exact mirror when present,
    /// otherwise the lossless dyadic conversion of the f64 coefficients.
    pub fn to_rational(&self) -> RatPoly {
        match &self.exact {
            Some(p) => p.clone(),
            None => RatPoly::from_f64(&self.coeffs),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs, exact: self.exact.as_ref().map(|p| p.derivative()) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        let exact = zip_exact(self, other, |a, b| a.add(b));
        Self::new(coeffs).with_exact(exact)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] -= c;
        }
        let exact = zip_exact(self, other, |a, b| a.sub(b));
        Self::new(coeffs).with_exact(exact)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let exact = zip_exact(self, other, |a, b| a.mul(b));
        Self::new(coeffs).with_exact(exact)
    }

    pub fn scale(&self, s: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        // scaling by an arbitrary f64 keeps exactness (f64 is rational)
        let exact = self
            .exact
            .as_ref()
            .map(|p| p.scale(&exact::rational_from_f64(s)));
        Self::new(coeffs).with_exact(exact)
    }

    fn with_exact(mut self, exact: Option<RatPoly>) -> Self {
        self.exact = exact;
        self
    }

    /// Drop trailing coefficients that are negligible relative to the largest
    /// one. Useful after f64 arithmetic that cancels the true leading term.
    pub fn trim_relative(&self, eps: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() <= eps * scale) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

fn zip_exact(
    a: &RealPolynomial,
    b: &RealPolynomial,
    f: impl Fn(&RatPoly, &RatPoly) -> RatPoly,
) -> Option<RatPoly> {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => Some(f(x, y)),
        _ => None,
    }
}

/// Chebyshev polynomial of the first kind, T_n, in its natural variable.
pub fn chebyshev_t(n: usize) -> RealPolynomial {
    let (mut prev, mut cur) = (RatPoly::one(), RatPoly::from_i64(&[0, 1]));
    if n == 0 {
        return RealPolynomial::from_exact(prev);
    }
    let two_x = RatPoly::from_i64(&[0, 2]);
    for _ in 1..n {
        let next = two_x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    RealPolynomial::from_exact(cur)
}

/// Chebyshev polynomial of the second kind, U_n.
pub fn chebyshev_u(n: usize) -> RealPolynomial {
    let (mut prev, mut cur) = (RatPoly::one(), RatPoly::from_i64(&[0, 2]));
    if n == 0 {
        return RealPolynomial::from_exact(prev);
    }
    let two_x = RatPoly::from_i64(&[0, 2]);
    for _ in 1..n {
        let next = two_x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    RealPolynomial::from_exact(cur)
}

/// Number of sign changes in the coefficient sequence, zeros skipped.
/// By Descartes' rule the count minus the number of positive roots is a
/// nonnegative even integer.
pub fn descartes_bound(p: &RealPolynomial) -> Result<usize> {
    if p.is_zero() {
        return Err(SpectraError::ZeroPolynomial);
    }
    let mut count = 0;
    let mut last = 0i8;
    for &c in p.coeffs() {
        let s = if c > 0.0 {
            1i8
        } else if c < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    Ok(count)
}

/// Real roots of `p` strictly inside the open interval, with multiplicities
/// from an exact square-free decomposition.
#[derive(Debug, Clone, Default)]
pub struct RootReport {
    /// (root, multiplicity), sorted ascending, all strictly inside.
    pub roots: Vec<(f64, usize)>,
    /// Roots within `tol` of an endpoint; never promoted to eigenvalues.
    pub boundary_suspect: Vec<f64>,
}

pub fn real_roots_in_interval(
    p: &RealPolynomial,
    iv: &Interval,
    tol: f64,
) -> Result<RootReport> {
    if p.is_zero() {
        return Err(SpectraError::ZeroPolynomial);
    }
    if !(tol > 0.0) {
        return Err(SpectraError::InvalidParameter("tol must be positive".into()));
    }
    let rat = p.to_rational();
    let mut report = RootReport::default();
    if rat.degree() == 0 {
        return Ok(report);
    }
    // widen so endpoint-grazing roots are still seen, then classify
    let lo = iv.lo - 2.0 * tol;
    let hi = iv.hi + 2.0 * tol;
    for (factor, mult) in rat.squarefree_decomposition() {
        for r in exact::roots_of_squarefree_in(&factor, lo, hi, tol.min(1e-12)) {
            if (r - iv.lo).abs() <= tol || (r - iv.hi).abs() <= tol {
                report.boundary_suspect.push(r);
            } else if iv.lo < r && r < iv.hi {
                report.roots.push((r, mult));
            }
        }
    }
    report.roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    report
        .boundary_suspect
        .sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(report)
}

/// The Joukowski map z -> z + 1/z.
pub fn joukowski(z: f64) -> Result<f64> {
    if z == 0.0 {
        return Err(SpectraError::Singular("joukowski at z = 0".into()));
    }
    Ok(z + 1.0 / z)
}

pub fn joukowski_complex(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(SpectraError::Singular("joukowski at z = 0".into()));
    }
    Ok(z + 1.0 / z)
}

/// The unique z in (-1,1)\{0} with z + 1/z = lambda; requires |lambda| > 2.
pub fn joukowski_inverse_in_disk(lambda: f64) -> Result<f64> {
    if lambda.abs() <= 2.0 {
        return Err(SpectraError::Singular(
            "inside essential spectrum, no disk preimage on reals".into(),
        ));
    }
    // z = (lambda - sign(lambda) sqrt(lambda^2 - 4)) / 2, the small root
    let s = (lambda * lambda - 4.0).sqrt();
    let z = if lambda > 0.0 { (lambda - s) / 2.0 } else { (lambda + s) / 2.0 };
    Ok(z)
}

/// Monic characteristic polynomial det(lambda I - M).
///
/// When every entry reconstructs as a small rational the computation runs in
/// exact arithmetic (Faddeev–LeVerrier); otherwise det(lambda I - M) is
/// interpolated at deg+1 Chebyshev points.
pub fn characteristic_polynomial(m: &SymMatrix) -> Result<RealPolynomial> {
    m.require_symmetric(1e-12)?;
    let n = m.order();
    if n == 0 {
        return Ok(RealPolynomial::from_exact(RatPoly::one()));
    }
    if n <= 64 {
        if let Some(rat) = rational_matrix(m) {
            return Ok(RealPolynomial::from_exact(exact::faddeev_leverrier(&rat)));
        }
    }
    Ok(char_poly_by_interpolation(m))
}

/// Exact characteristic polynomial of a rational symmetric matrix.
pub fn characteristic_polynomial_exact(a: &[Vec<BigRational>]) -> RealPolynomial {
    RealPolynomial::from_exact(exact::faddeev_leverrier(a))
}

fn rational_matrix(m: &SymMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.order();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = small_rational(m.get(i, j))?;
        }
    }
    Some(out)
}

/// Reconstruct x as p/q with q <= 10^6 such that p/q rounds back to x
/// exactly. Returns None for values that are not small rationals.
pub fn small_rational(x: f64) -> Option<BigRational> {
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let negative = x < 0.0;
    let x_abs = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x_abs.trunc() as i64, 1i64);
    let mut frac = x_abs.fract();
    for _ in 0..40 {
        let cand = BigRational::new(p1.into(), q1.into());
        let cand = if negative { -cand } else { cand };
        if cand.to_f64() == Some(x) {
            return Some(cand);
        }
        if frac == 0.0 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.trunc();
        frac = r - a;
        let a = a as i64;
        let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if q1 > 1_000_000 {
            return None;
        }
    }
    None
}

fn char_poly_by_interpolation(m: &SymMatrix) -> RealPolynomial {
    let n = m.order();
    // Gershgorin bound for the node scale
    let mut radius = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m.get(i, j).abs();
        }
        radius = radius.max(row);
    }
    let radius = radius.max(1.0) * 1.25;
    let k = n + 1;
    let nodes: Vec<f64> = (0..k)
        .map(|j| radius * (std::f64::consts::PI * (j as f64 + 0.5) / k as f64).cos())
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| det_shifted(m, x)).collect();
    newton_interpolation(&nodes, &values)
}

/// det(x I - M) by LU with partial pivoting.
fn det_shifted(m: &SymMatrix, x: f64) -> f64 {
    let n = m.order();
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { x - m.get(i, j) } else { -m.get(i, j) };
        }
    }
    let mut det = 1.0;
    for col in 0..n {
        let (piv, _) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    det
}

fn newton_interpolation(nodes: &[f64], values: &[f64]) -> RealPolynomial {
    let k = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..k {
        for i in (level..k).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // expand the Newton form into monomial coefficients
    let mut poly = RealPolynomial::zero();
    let mut basis = RealPolynomial::constant(1.0);
    for (i, &c) in dd.iter().enumerate() {
        poly = poly.add(&basis.scale(c));
        if i + 1 < k {
            basis = basis.mul(&RealPolynomial::new(vec![-nodes[i], 1.0]));
        }
    }
    poly
}

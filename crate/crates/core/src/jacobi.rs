//! Finite-rank one-sided Jacobi matrices: Jost polynomials, perturbation
//! determinants, the discrete spectrum, and the spectral measure.
//!
//! Internally the Jost computation works with the scaled polynomial
//! v = (prod a_j) u, which satisfies v_{n-1} = (lambda - b_n) v_n - a_n^2 v_{n+1}
//! and therefore has rational coefficients whenever every b_j and a_j^2 is
//! rational. The worked examples all have that form (entries like sqrt(2)
//! square to 2), so the recursion runs exactly and v coincides with the
//! perturbation determinant.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SpectraError};
use crate::exact::{rational_from_f64, RatPoly};
use crate::poly::{self, Interval, RealPolynomial};
use crate::quad;

/// One-sided Jacobi matrix equal to the free matrix (b = 0, a = 1) beyond
/// index q; q is minimal after construction.
#[derive(Debug, Clone)]
pub struct FiniteRankJacobi {
    b: Vec<f64>,
    a: Vec<f64>,
    b_exact: Vec<BigRational>,
    a_sq_exact: Vec<BigRational>,
}

impl FiniteRankJacobi {
    /// The free Jacobi matrix J_0.
    pub fn free() -> Self {
        Self { b: vec![], a: vec![], b_exact: vec![], a_sq_exact: vec![] }
    }

    /// From f64 entries. Exact mirrors use the dyadic values of the floats;
    /// prefer [`FiniteRankJacobi::from_exact`] when a_j^2 is a clean rational.
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|&x| !(x > 0.0)) {
            return Err(SpectraError::InvalidParameter("all a_j must be > 0".into()));
        }
        let b_exact = b.iter().map(|&x| rational_from_f64(x)).collect();
        let a_sq_exact = a.iter().map(|&x| rational_from_f64(x * x)).collect();
        Ok(Self { b, a, b_exact, a_sq_exact }.normalized())
    }

    /// From exact diagonal entries and squared off-diagonal entries.
    pub fn from_exact(b: Vec<BigRational>, a_sq: Vec<BigRational>) -> Result<Self> {
        if a_sq.iter().any(|x| !x.is_positive()) {
            return Err(SpectraError::InvalidParameter("all a_j^2 must be > 0".into()));
        }
        let bf = b.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let af = a_sq
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN).sqrt())
            .collect();
        Ok(Self { b: bf, a: af, b_exact: b, a_sq_exact: a_sq }.normalized())
    }

    /// Rank-one diagonal perturbation: b_q at site q.
    pub fn single_diagonal(q: usize, b_q: f64) -> Result<Self> {
        let mut b = vec![BigRational::zero(); q];
        b[q - 1] = rational_from_f64(b_q);
        let a = vec![BigRational::one(); q];
        Self::from_exact(b, a)
    }

    /// Single off-diagonal perturbation: a_q at site q, with a_q^2 given
    /// exactly.
    pub fn single_offdiagonal_sq(q: usize, a_q_sq: BigRational) -> Result<Self> {
        let b = vec![BigRational::zero(); q];
        let mut a = vec![BigRational::one(); q];
        a[q - 1] = a_q_sq;
        Self::from_exact(b, a)
    }

    fn normalized(mut self) -> Self {
        let q = self.b.len().max(self.a.len());
        self.b.resize(q, 0.0);
        self.a.resize(q, 1.0);
        self.b_exact.resize(q, BigRational::zero());
        self.a_sq_exact.resize(q, BigRational::one());
        while !self.b_exact.is_empty()
            && self.b_exact.last().unwrap().is_zero()
            && self.a_sq_exact.last().unwrap().is_one()
        {
            self.b.pop();
            self.a.pop();
            self.b_exact.pop();
            self.a_sq_exact.pop();
        }
        self
    }

    /// Rank support: the matrix is free beyond index q.
    pub fn q(&self) -> usize {
        self.b.len()
    }

    /// Diagonal entry b_j (1-based), free value 0 beyond q.
    pub fn b(&self, j: usize) -> f64 {
        assert!(j >= 1);
        self.b.get(j - 1).copied().unwrap_or(0.0)
    }

    /// Off-diagonal entry a_j (1-based), free value 1 beyond q.
    pub fn a(&self, j: usize) -> f64 {
        assert!(j >= 1);
        self.a.get(j - 1).copied().unwrap_or(1.0)
    }

    /// prod_{j<=q} a_j.
    pub fn a_product(&self) -> f64 {
        self.a.iter().product()
    }

    /// prod_{j<=q} a_j^2, exact.
    pub fn a_product_sq_exact(&self) -> BigRational {
        self.a_sq_exact.iter().product()
    }

    /// Principal N x N truncation as (diagonal, subdiagonal).
    pub fn truncated(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let d = (1..=n).map(|j| self.b(j)).collect();
        let e = (1..=n.saturating_sub(1)).map(|j| self.a(j)).collect();
        (d, e)
    }

    /// The scaled Jost polynomial v(z) = (prod a_j) u(z), exact in z.
    /// It equals the perturbation determinant L(z + 1/z; J, J_0).
    pub fn jost_scaled(&self) -> RatPoly {
        let q = self.q();
        // v_n = z^n for n > q; recurse v_{n-1} = (z + 1/z - b_n) v_n - a_n^2 v_{n+1}
        let mut v_next = RatPoly::monomial(BigRational::one(), q + 2);
        let mut v_cur = RatPoly::monomial(BigRational::one(), q + 1);
        for n in (1..=q + 1).rev() {
            let b_n = self.b_exact.get(n - 1).cloned().unwrap_or_else(BigRational::zero);
            let a_n_sq = self.a_sq_exact.get(n - 1).cloned().unwrap_or_else(BigRational::one);
            let shifted_up = shift_up(&v_cur);
            let shifted_down = shift_down(&v_cur);
            let mut v_prev = shifted_up.add(&shifted_down);
            if !b_n.is_zero() {
                v_prev = v_prev.sub(&v_cur.scale(&b_n));
            }
            v_prev = v_prev.sub(&v_next.scale(&a_n_sq));
            v_next = v_cur;
            v_cur = v_prev;
        }
        v_cur
    }

    /// The Jost polynomial u(z) = v(z) / prod a_j. The exact mirror is kept
    /// when prod a_j^2 is a perfect square of a rational.
    pub fn jost_polynomial(&self) -> RealPolynomial {
        let v = self.jost_scaled();
        let prod = self.a_product();
        match rational_sqrt(&self.a_product_sq_exact()) {
            Some(root) => {
                RealPolynomial::from_exact(v.scale(&(BigRational::one() / root)))
            }
            None => RealPolynomial::new(
                v.to_f64_coeffs().iter().map(|c| c / prod).collect(),
            ),
        }
    }

    /// Perturbation determinant L(z + 1/z; J, J_0) as the finite determinant
    /// over the rank factorization of J - J_0, with the free resolvent.
    pub fn perturbation_determinant(&self, z: Complex64) -> Result<Complex64> {
        check_disk_point(z)?;
        // J - J_0 = sum over terms <., phi_k> psi_k
        // diagonal b_j: phi = e_j, psi = b_j e_j
        // off-diagonal a_j - 1: phi = e_j, psi = (a_j - 1) e_{j+1}
        //                       phi = e_{j+1}, psi = (a_j - 1) e_j
        let mut terms: Vec<(usize, usize, f64)> = vec![]; // (phi site, psi site, coeff)
        for j in 1..=self.q() {
            let bj = self.b(j);
            if bj != 0.0 {
                terms.push((j, j, bj));
            }
            let aj = self.a(j);
            if aj != 1.0 {
                terms.push((j, j + 1, aj - 1.0));
                terms.push((j + 1, j, aj - 1.0));
            }
        }
        let p = terms.len();
        let r = |i: usize, j: usize| free_resolvent_entry(z, i, j);
        let mut m = vec![vec![Complex64::new(0.0, 0.0); p]; p];
        for (row, &(_, psi_i, c_i)) in terms.iter().enumerate() {
            for (col, &(phi_k, _, _)) in terms.iter().enumerate() {
                m[row][col] = c_i * r(phi_k, psi_i);
                if row == col {
                    m[row][col] += 1.0;
                }
            }
        }
        Ok(complex_det(m))
    }

    /// Discrete spectrum with a separate list of boundary resonances.
    pub fn discrete_spectrum_report(&self) -> DiscreteSpectrumReport {
        let v = RealPolynomial::from_exact(self.jost_scaled());
        let iv = Interval::new(-1.0, 1.0).expect("valid");
        // acceptance zone: strictly inside by more than 1e-9
        let report = poly::real_roots_in_interval(&v, &iv, 1e-9)
            .expect("jost polynomial is nonzero");
        let mut eigenvalues: Vec<DiscreteEigenvalue> = report
            .roots
            .iter()
            .map(|&(z, _)| DiscreteEigenvalue { lambda: z + 1.0 / z, z })
            .collect();
        eigenvalues.sort_by(|x, y| x.lambda.partial_cmp(&y.lambda).unwrap());
        DiscreteSpectrumReport { eigenvalues, resonances: report.boundary_suspect }
    }

    /// Eigenvalue pairs (lambda_j, z_j), sorted by lambda.
    pub fn discrete_spectrum(&self) -> Vec<DiscreteEigenvalue> {
        self.discrete_spectrum_report().eigenvalues
    }

    /// The Damanik–Simon spectral measure.
    pub fn spectral_measure(&self) -> Result<SpectralMeasure> {
        let v = self.jost_scaled();
        let q_weight = autocorrelation_in_x(&v);
        let a_prod_sq = self
            .a_product_sq_exact()
            .to_f64()
            .unwrap_or_else(|| self.a_product().powi(2));
        let vf = RealPolynomial::from_exact(v.clone());
        let dvf = vf.derivative();
        let mut masses = vec![];
        for eig in self.discrete_spectrum() {
            let z = eig.z;
            let denom = dvf.eval(z) * vf.eval(1.0 / z);
            if denom == 0.0 {
                return Err(SpectraError::Singular(format!(
                    "mass formula degenerate: u(1/z) u'(z) = 0 at z = {z}"
                )));
            }
            let sigma = z * (1.0 - z.powi(-2)).powi(2) * a_prod_sq / denom;
            if sigma <= 0.0 {
                return Err(SpectraError::Singular(format!(
                    "nonpositive mass {sigma} at lambda = {}",
                    eig.lambda
                )));
            }
            masses.push((eig.lambda, sigma));
        }
        Ok(SpectralMeasure { q_weight, a_prod_sq, masses })
    }

    /// Residual |u(z) - (prod a_j)^{-1} L(z)| between the Jost recursion and
    /// the perturbation-determinant route.
    pub fn jost_determinant_identity_check(&self, z: Complex64) -> Result<f64> {
        let det = self.perturbation_determinant(z)?;
        let v = RealPolynomial::from_exact(self.jost_scaled());
        let prod = self.a_product();
        let u = v.eval_complex(z) / prod;
        Ok((u - det / prod).norm())
    }
}

/// One discrete eigenvalue with its Joukowski preimage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEigenvalue {
    pub lambda: f64,
    pub z: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteSpectrumReport {
    pub eigenvalues: Vec<DiscreteEigenvalue>,
    /// Jost roots within 1e-9 of the unit circle: resonances, not eigenvalues.
    pub resonances: Vec<f64>,
}

/// Spectral measure dμ = w(x) dx + Σ σ_j δ(λ_j) with
/// w(x) = sqrt(4 - x^2) / (2π |u(e^{it})|^2), x = 2 cos t.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    /// Q(x) = |v(e^{it})|^2 expressed as a polynomial in x = 2 cos t.
    q_weight: RealPolynomial,
    a_prod_sq: f64,
    /// (lambda_j, sigma_j) point masses, all off [-2, 2].
    pub masses: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    /// Absolutely continuous density at x in (-2, 2).
    pub fn ac_weight(&self, x: f64) -> f64 {
        if x.abs() >= 2.0 {
            return 0.0;
        }
        (4.0 - x * x).sqrt() * self.a_prod_sq
            / (2.0 * std::f64::consts::PI * self.q_weight.eval(x))
    }

    /// |u(e^{it})|^2 as a polynomial in x = 2 cos t (scaled by prod a_j^2).
    pub fn boundary_modulus_poly(&self) -> &RealPolynomial {
        &self.q_weight
    }

    /// Integral of the a.c. part over [-2, 2], by adaptive quadrature on
    /// the substitution x = 2 cos t.
    pub fn ac_mass(&self, tol: f64) -> f64 {
        let c = 2.0 * self.a_prod_sq / std::f64::consts::PI;
        quad::integrate(
            |t| {
                let s = t.sin();
                c * s * s / self.q_weight.eval(2.0 * t.cos())
            },
            0.0,
            std::f64::consts::PI,
            tol,
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.ac_mass(1e-9) + self.masses.iter().map(|(_, s)| s).sum::<f64>()
    }

    /// k-th moment of the measure.
    pub fn moment(&self, k: u32) -> f64 {
        let c = 2.0 * self.a_prod_sq / std::f64::consts::PI;
        let ac = quad::integrate(
            |t| {
                let s = t.sin();
                let x = 2.0 * t.cos();
                c * x.powi(k as i32) * s * s / self.q_weight.eval(x)
            },
            0.0,
            std::f64::consts::PI,
            1e-10,
        );
        ac + self
            .masses
            .iter()
            .map(|(l, s)| l.powi(k as i32) * s)
            .sum::<f64>()
    }
}

fn check_disk_point(z: Complex64) -> Result<()> {
    let n = z.norm();
    if n == 0.0 || n >= 1.0 {
        return Err(SpectraError::Singular(format!(
            "resolvent formula needs 0 < |z| < 1, got |z| = {n}"
        )));
    }
    if (z * z - 1.0).norm() < 1e-14 {
        return Err(SpectraError::Singular("resolvent formula singular at z^2 = 1".into()));
    }
    Ok(())
}

/// Entry of the free one-sided resolvent, 1-based sites:
/// r_ij(z) = (z^{|i-j|} - z^{i+j}) / (z - 1/z).
pub fn free_resolvent_entry(z: Complex64, i: usize, j: usize) -> Complex64 {
    let num = z.powu((i.abs_diff(j)) as u32) - z.powu((i + j) as u32);
    num / (z - 1.0 / z)
}

fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f.norm() != 0.0 {
                for c in col..n {
                    let sub = f * m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    det
}

/// Multiply by z.
fn shift_up(p: &RatPoly) -> RatPoly {
    if p.is_zero() {
        return RatPoly::zero();
    }
    let mut coeffs = vec![BigRational::zero()];
    coeffs.extend(p.coeffs.iter().cloned());
    RatPoly::new(coeffs)
}

/// Divide by z; the constant term must vanish.
fn shift_down(p: &RatPoly) -> RatPoly {
    if p.is_zero() {
        return RatPoly::zero();
    }
    debug_assert!(p.coeffs[0].is_zero(), "shift_down of poly with constant term");
    RatPoly::new(p.coeffs.iter().skip(1).cloned().collect())
}

/// sqrt of a rational if it is a perfect square.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

/// |v(e^{it})|^2 as a polynomial in x = 2 cos t:
/// Q(x) = r_0 + 2 sum_m r_m T_m(x/2), r_m the coefficient autocorrelation.
fn autocorrelation_in_x(v: &RatPoly) -> RealPolynomial {
    let c = &v.coeffs;
    let deg = c.len().saturating_sub(1);
    let mut acc = RatPoly::zero();
    for m in 0..=deg {
        let mut r_m = BigRational::zero();
        for j in 0..(c.len() - m) {
            r_m += &c[j] * &c[j + m];
        }
        if r_m.is_zero() {
            continue;
        }
        // T_m(x/2): substitute x -> x/2 in the integer Chebyshev coefficients
        let t = crate::poly::chebyshev_t(m);
        let t_exact = t.exact().expect("chebyshev is exact").clone();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut pow = BigRational::one();
        let mut scaled = vec![];
        for coef in &t_exact.coeffs {
            scaled.push(coef * &pow);
            pow *= &half;
        }
        let t_half = RatPoly::new(scaled);
        let factor = if m == 0 { r_m } else { r_m * BigRational::from_integer(2.into()) };
        acc = acc.add(&t_half.scale(&factor));
    }
    RealPolynomial::from_exact(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational_from_decimal;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn coeffs_are(v: &RatPoly, want: &[i64]) {
        let got = v.to_f64_coeffs();
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - *w as f64).abs() < 1e-13, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn free_matrix_has_trivial_jost() {
        let j = FiniteRankJacobi::free();
        assert_eq!(j.q(), 0);
        coeffs_are(&j.jost_scaled(), &[1]);
        assert!(j.discrete_spectrum().is_empty());
    }

    #[test]
    fn trailing_free_entries_are_trimmed() {
        let j = FiniteRankJacobi::new(vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(j.q(), 1);
        let j = FiniteRankJacobi::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(j.q(), 1);
    }

    #[test]
    fn rank_one_star_jost() {
        // J({0}, {w, 1, ...}): w u(z) = (1 - w^2) z^2 + 1, here w^2 = 5
        let j = FiniteRankJacobi::single_offdiagonal_sq(1, rat(5, 1)).unwrap();
        coeffs_are(&j.jost_scaled(), &[1, 0, -4]);
        let eigs = j.discrete_spectrum();
        assert_eq!(eigs.len(), 2);
        assert!((eigs[0].lambda + 2.5).abs() < 1e-12);
        assert!((eigs[1].lambda - 2.5).abs() < 1e-12);
        assert!((eigs[1].z - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jost_closed_form_b1_and_aq() {
        // b_1 != 0 only and a_q != 1 only:
        // a_q u(z) (z^2 - 1) = alpha_q (z - b_1) z^{2q+1} - b_1 a_q^2 z^3
        //                      + a_q^2 z^2 + b_1 z - 1
        let q = 4usize;
        let b1 = rat(3, 1);
        let aq_sq = rat(2, 1);
        let mut b = vec![BigRational::zero(); q];
        b[0] = b1.clone();
        let mut a_sq = vec![BigRational::one(); q];
        a_sq[q - 1] = aq_sq.clone();
        let j = FiniteRankJacobi::from_exact(b, a_sq).unwrap();
        // v = a_q u times remaining a's (all 1): v = a_q u
        let lhs = j.jost_scaled().mul(&RatPoly::from_i64(&[-1, 0, 1]));
        let alpha_q = BigRational::one() - &aq_sq;
        let mut rhs = RatPoly::monomial(alpha_q.clone(), 2 * q + 2)
            .add(&RatPoly::monomial(-&alpha_q * &b1, 2 * q + 1));
        rhs = rhs.add(&RatPoly::monomial(-&b1 * &aq_sq, 3));
        rhs = rhs.add(&RatPoly::monomial(aq_sq.clone(), 2));
        rhs = rhs.add(&RatPoly::monomial(b1.clone(), 1));
        rhs = rhs.add(&RatPoly::constant(rat(-1, 1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_is_2q_iff_aq_not_one() {
        let j = FiniteRankJacobi::single_offdiagonal_sq(3, rat(2, 1)).unwrap();
        assert_eq!(j.jost_polynomial().degree(), 6);
        let j = FiniteRankJacobi::single_diagonal(3, 0.5).unwrap();
        assert!(j.jost_polynomial().degree() < 6);
        assert_eq!(j.jost_polynomial().degree(), 5); // 2q - 1 for pure diagonal
    }

    #[test]
    fn jost_of_t_graph_matches_frozen_section_value() {
        // T_{3,2,inf}: a = (1, 1/sqrt2, 1/sqrt2, 1, sqrt2); finite-section
        // oracle gives lambda = +-2.076333974897107
        let j = FiniteRankJacobi::from_exact(
            vec![BigRational::zero(); 5],
            vec![rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 1), rat(2, 1)],
        )
        .unwrap();
        coeffs_are(&j.jost_scaled(), &[1, 0, 0, 0, -1, 0, -2, 0, -2, 0, -1]);
        let eigs = j.discrete_spectrum();
        assert_eq!(eigs.len(), 2);
        assert!((eigs[1].lambda - 2.076_333_974_897_107).abs() < 1e-12);
        assert!((eigs[0].lambda + eigs[1].lambda).abs() < 1e-12);
    }

    #[test]
    fn even_jost_for_zero_diagonal() {
        // b = 0 implies u even implies symmetric discrete spectrum
        for a_sq in [vec![rat(5, 1)], vec![rat(2, 3), rat(1, 3), rat(3, 1)]] {
            let j =
                FiniteRankJacobi::from_exact(vec![BigRational::zero(); a_sq.len()], a_sq).unwrap();
            let v = j.jost_scaled();
            for (k, c) in v.coeffs.iter().enumerate() {
                if k % 2 == 1 {
                    assert!(c.is_zero(), "odd coefficient in even Jost polynomial");
                }
            }
            let eigs = j.discrete_spectrum();
            for e in &eigs {
                assert!(
                    eigs.iter().any(|f| (f.lambda + e.lambda).abs() < 1e-10),
                    "spectrum not symmetric"
                );
            }
        }
    }

    #[test]
    fn jost_value_at_zero_is_nonzero_and_roots_simple() {
        let samples = [
            FiniteRankJacobi::new(vec![1.5, -0.25], vec![0.5, 2.0]).unwrap(),
            FiniteRankJacobi::single_diagonal(2, 3.0).unwrap(),
            FiniteRankJacobi::single_offdiagonal_sq(1, rat(9, 2)).unwrap(),
        ];
        for j in samples {
            let u = j.jost_polynomial();
            assert!(u.coeff(0).abs() > 1e-12);
            let du = u.derivative();
            for e in j.discrete_spectrum() {
                assert!(du.eval(e.z).abs() > 1e-9, "root not simple at z = {}", e.z);
            }
        }
    }

    #[test]
    fn resonance_at_threshold_is_not_an_eigenvalue() {
        // star with ||w|| = sqrt 2 exactly: v = 1 - z^2, roots on the boundary
        let j = FiniteRankJacobi::single_offdiagonal_sq(1, rat(2, 1)).unwrap();
        let report = j.discrete_spectrum_report();
        assert!(report.eigenvalues.is_empty());
        assert_eq!(report.resonances.len(), 2);
    }

    #[test]
    fn weighted_star_threshold() {
        // ||w|| = 1.4 < sqrt2: no eigenvalues; ||w|| = 1.5: the pair
        // +-(sqrt(||w||^2 - 1) + 1/sqrt(||w||^2 - 1))
        let w14 = rational_from_decimal("1.96").unwrap();
        let j = FiniteRankJacobi::from_exact(vec![BigRational::zero()], vec![w14]).unwrap();
        assert!(j.discrete_spectrum().is_empty());
        let w15 = rational_from_decimal("2.25").unwrap();
        let j = FiniteRankJacobi::from_exact(vec![BigRational::zero()], vec![w15]).unwrap();
        let eigs = j.discrete_spectrum();
        assert_eq!(eigs.len(), 2);
        let beta: f64 = 1.25;
        let want = beta.sqrt() + 1.0 / beta.sqrt();
        assert!((eigs[1].lambda - want).abs() < 1e-12);
    }

    #[test]
    fn perturbation_determinant_rank_one_closed_form() {
        // L = 1 - b_q z (z^{2q} - 1)/(z^2 - 1)
        let q = 3usize;
        let bq = 0.75;
        let j = FiniteRankJacobi::single_diagonal(q, bq).unwrap();
        for &re in &[0.3, -0.55, 0.81] {
            let z = Complex64::new(re, 0.2);
            let det = j.perturbation_determinant(z).unwrap();
            let want = 1.0 - bq * z * (z.powu(2 * q as u32) - 1.0) / (z * z - 1.0);
            assert!((det - want).norm() < 1e-12);
        }
    }

    #[test]
    fn perturbation_determinant_rank_two_closed_form() {
        // L = 1 + (1 - a_q^2) z^2 (z^{2q} - 1)/(z^2 - 1)
        let q = 2usize;
        let j = FiniteRankJacobi::single_offdiagonal_sq(q, rat(3, 1)).unwrap();
        for &re in &[0.4, -0.7] {
            let z = Complex64::new(re, -0.15);
            let det = j.perturbation_determinant(z).unwrap();
            let want = 1.0 + (1.0 - 3.0) * z * z * (z.powu(2 * q as u32) - 1.0) / (z * z - 1.0);
            assert!((det - want).norm() < 1e-12);
        }
        let j0 = FiniteRankJacobi::free();
        let z = Complex64::new(0.5, 0.1);
        assert!((j0.perturbation_determinant(z).unwrap() - 1.0).norm() < 1e-15);
        assert!(j0.perturbation_determinant(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn jost_equals_determinant() {
        // deterministic pseudo-random rank-3 matrices at disk points
        let mut seed = 12345u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for _ in 0..20 {
            let b: Vec<f64> = (0..3).map(|_| 2.0 * next()).collect();
            let a: Vec<f64> = (0..3).map(|_| 0.3 + (next() + 1.0)).collect();
            let j = FiniteRankJacobi::new(b, a).unwrap();
            for k in 0..10 {
                let theta = 0.37 * k as f64 + 0.1;
                let radius = 0.15 + 0.08 * k as f64;
                let z = Complex64::from_polar(radius, theta);
                let l = j.perturbation_determinant(z).unwrap();
                let residual = j.jost_determinant_identity_check(z).unwrap();
                assert!(
                    residual <= 1e-10 * (1.0 + l.norm()),
                    "residual {residual} too large"
                );
            }
        }
    }

    #[test]
    fn semicircle_measure_for_free_matrix() {
        let j = FiniteRankJacobi::free();
        let m = j.spectral_measure().unwrap();
        assert!(m.masses.is_empty());
        let w0 = m.ac_weight(0.0);
        assert!((w0 - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!((m.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn moments_match_truncated_matrix_powers() {
        // independent oracle: (J^k)_{11} on a truncated band matrix
        let samples = [
            FiniteRankJacobi::single_diagonal(1, 3.0).unwrap(),
            FiniteRankJacobi::new(vec![0.5, -1.0], vec![1.25, 0.8]).unwrap(),
            FiniteRankJacobi::single_offdiagonal_sq(2, rat(5, 2)).unwrap(),
        ];
        for j in samples {
            let measure = j.spectral_measure().unwrap();
            assert!((measure.total_mass() - 1.0).abs() < 1e-8);
            let (d, e) = j.truncated(64);
            for k in 0..=6u32 {
                let oracle = matrix_power_entry(&d, &e, k);
                let m = measure.moment(k);
                assert!(
                    (m - oracle).abs() < 1e-8,
                    "moment {k}: {m} vs oracle {oracle}"
                );
            }
        }
    }

    fn matrix_power_entry(d: &[f64], e: &[f64], k: u32) -> f64 {
        let n = d.len();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for _ in 0..k {
            let mut w = vec![0.0; n];
            for i in 0..n {
                w[i] += d[i] * v[i];
                if i > 0 {
                    w[i] += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    w[i] += e[i] * v[i + 1];
                }
            }
            v = w;
        }
        v[0]
    }

    #[test]
    fn star_masses_are_symmetric() {
        let j = FiniteRankJacobi::single_offdiagonal_sq(1, rat(5, 1)).unwrap();
        let m = j.spectral_measure().unwrap();
        assert_eq!(m.masses.len(), 2);
        assert!((m.masses[0].1 - m.masses[1].1).abs() < 1e-12);
        assert!((m.total_mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_modulus_matches_sampled_jost() {
        // |u(e^{it})|^2 = Q(2 cos t) / prod a^2, sampled over t
        let j = FiniteRankJacobi::new(vec![0.25, -0.5], vec![1.5, 0.75]).unwrap();
        let m = j.spectral_measure().unwrap();
        let u = j.jost_polynomial();
        let q_poly = m.boundary_modulus_poly();
        assert_eq!(q_poly.degree(), u.degree());
        let prod_sq = j.a_product().powi(2);
        for k in 1..40 {
            let t = std::f64::consts::PI * k as f64 / 40.0;
            let z = Complex64::from_polar(1.0, t);
            let sampled = u.eval_complex(z).norm_sqr();
            let fitted = q_poly.eval(2.0 * t.cos()) / prod_sq;
            assert!((sampled - fitted).abs() < 1e-10 * (1.0 + sampled));
        }
    }
}

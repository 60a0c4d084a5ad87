//! N-periodic Jacobi matrices: orthogonal polynomials, transfer matrices,
//! the discriminant, band structure, gap eigenvalues by the sign rule, and
//! the Weyl function.
//!
//! Band edges are the roots of D^2(lambda) - 4. The scaled polynomials
//! phat_n = (a_1 ... a_{n-1}) p_n obey a recurrence in b_j and a_j^2 only, so
//! Dhat = (prod a) D has rational coefficients whenever those are rational
//! and the edge equation Dhat^2 = 4 prod a^2 is solved with exact Sturm
//! isolation. Closed gaps appear as honest double roots instead of
//! floating-point near-pairs.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Result, SpectraError};
use crate::exact::{self, rational_from_f64, RatPoly};
use crate::poly::{Interval, RealPolynomial};

/// N-periodic one-sided Jacobi matrix.
#[derive(Debug, Clone)]
pub struct PeriodicJacobi {
    b: Vec<f64>,
    a: Vec<f64>,
    b_exact: Vec<BigRational>,
    a_sq_exact: Vec<BigRational>,
}

/// One spectral gap: the interval, its index counted from the right
/// (rightmost gap is 1), and whether it is open.
#[derive(Debug, Clone)]
pub struct Gap {
    pub interval: Interval,
    pub index_from_right: usize,
    pub open: bool,
}

impl Gap {
    /// Sign assigned by the rule: -1 for odd index from the right.
    pub fn sign(&self) -> i32 {
        if self.index_from_right % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

/// Band structure: exactly N closed bands (touching endpoints allowed) and
/// the N-1 gaps between them, closed gaps included.
#[derive(Debug, Clone)]
pub struct BandStructure {
    pub bands: Vec<Interval>,
    pub gaps: Vec<Gap>,
}

impl BandStructure {
    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|b| b.contains(x))
    }

    fn bands_strictly_right_of(&self, x: f64) -> usize {
        self.bands.iter().filter(|b| b.lo > x).count()
    }
}

/// How a root of p_N fared under the sign rule.
#[derive(Debug, Clone, PartialEq)]
pub enum GapRootStatus {
    Eigenvalue,
    RejectedBySign,
    /// Within 1e-9 of a gap endpoint; never promoted.
    Edge,
    /// Sitting in a closed gap; skipped.
    ClosedGap,
    /// gamma_N vanished at the root within tolerance; the paper gives no
    /// convention for this case.
    Indeterminate,
    /// Interior of a band (should not occur for true periodic data).
    InsideBand,
}

#[derive(Debug, Clone)]
pub struct GapRootReport {
    pub root: f64,
    pub status: GapRootStatus,
}

impl PeriodicJacobi {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if b.is_empty() || b.len() != a.len() {
            return Err(SpectraError::InvalidParameter(
                "periodic Jacobi needs equal-length nonempty b and a".into(),
            ));
        }
        if a.iter().any(|&x| !(x > 0.0)) {
            return Err(SpectraError::InvalidParameter("all a_j must be > 0".into()));
        }
        let b_exact = b.iter().map(|&x| rational_from_f64(x)).collect();
        let a_sq_exact = a.iter().map(|&x| rational_from_f64(x * x)).collect();
        Ok(Self { b, a, b_exact, a_sq_exact })
    }

    pub fn from_exact(b: Vec<BigRational>, a_sq: Vec<BigRational>) -> Result<Self> {
        if b.is_empty() || b.len() != a_sq.len() {
            return Err(SpectraError::InvalidParameter(
                "periodic Jacobi needs equal-length nonempty b and a^2".into(),
            ));
        }
        if a_sq.iter().any(|x| !x.is_positive()) {
            return Err(SpectraError::InvalidParameter("all a_j^2 must be > 0".into()));
        }
        let bf = b.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let af = a_sq.iter().map(|x| x.to_f64().unwrap_or(f64::NAN).sqrt()).collect();
        Ok(Self { b: bf, a: af, b_exact: b, a_sq_exact: a_sq })
    }

    pub fn period(&self) -> usize {
        self.b.len()
    }

    /// b_j with periodic continuation, 1-based.
    pub fn b(&self, j: usize) -> f64 {
        self.b[(j - 1) % self.b.len()]
    }

    /// a_j with periodic continuation, 1-based.
    pub fn a(&self, j: usize) -> f64 {
        self.a[(j - 1) % self.a.len()]
    }

    /// The k-stripped matrix (rotation of the period).
    pub fn stripped(&self, k: usize) -> Self {
        let n = self.period();
        let rot = |v: &Vec<f64>| -> Vec<f64> {
            (0..n).map(|i| v[(i + k) % n]).collect()
        };
        let rot_r = |v: &Vec<BigRational>| -> Vec<BigRational> {
            (0..n).map(|i| v[(i + k) % n].clone()).collect()
        };
        Self {
            b: rot(&self.b),
            a: rot(&self.a),
            b_exact: rot_r(&self.b_exact),
            a_sq_exact: rot_r(&self.a_sq_exact),
        }
    }

    /// Principal n x n truncation as (diagonal, subdiagonal).
    pub fn truncated(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let d = (1..=n).map(|j| self.b(j)).collect();
        let e = (1..=n.saturating_sub(1)).map(|j| self.a(j)).collect();
        (d, e)
    }

    /// First-kind polynomials p_0..p_upto (p_0 = 0, p_1 = 1, deg p_k = k-1).
    pub fn first_kind_polynomials(&self, upto: usize) -> Vec<RealPolynomial> {
        orthogonal_polynomials(|j| self.b(j), |j| self.a(j), upto, 0.0, 1.0)
    }

    /// Second-kind polynomials q_0..q_upto (q_0 = -1, q_1 = 0).
    pub fn second_kind_polynomials(&self, upto: usize) -> Vec<RealPolynomial> {
        orthogonal_polynomials(|j| self.b(j), |j| self.a(j), upto, -1.0, 0.0)
    }

    /// Scaled first-kind polynomials phat_n = (a_1..a_{n-1}) p_n, exact.
    fn first_kind_scaled(&self, upto: usize) -> Vec<RatPoly> {
        let mut out = Vec::with_capacity(upto + 1);
        out.push(RatPoly::zero());
        if upto == 0 {
            return out;
        }
        out.push(RatPoly::one());
        let lambda = RatPoly::from_i64(&[0, 1]);
        for n in 1..upto {
            let b_n = &self.b_exact[(n - 1) % self.b_exact.len()];
            let a_prev_sq = if n == 1 {
                BigRational::one()
            } else {
                self.a_sq_exact[(n - 2) % self.a_sq_exact.len()].clone()
            };
            let head = lambda.mul(&out[n]).sub(&out[n].scale(b_n));
            let next = head.sub(&out[n - 1].scale(&a_prev_sq));
            out.push(next);
        }
        out
    }

    /// The 2x2 transfer matrix T_n(lambda) = A(a_n, b_n) ... A(a_1, b_1).
    pub fn transfer_matrix(&self, lambda: f64, n: usize) -> [[f64; 2]; 2] {
        transfer_product(|j| self.b(j), |j| self.a(j), lambda, n)
    }

    /// Dhat = (prod a) * D and R = prod a^2, both exact.
    fn discriminant_scaled(&self) -> (RatPoly, BigRational) {
        let n = self.period();
        let p = self.first_kind_scaled(n + 1);
        let a_n_sq = self.a_sq_exact[n - 1].clone();
        let r: BigRational = self.a_sq_exact.iter().product();
        if n == 1 {
            // D = p_2; stripped part is p_0 = 0
            return (p[1 + 1].clone(), r);
        }
        let p1 = self.stripped(1).first_kind_scaled(n - 1);
        let dhat = p[n + 1].sub(&p1[n - 1].scale(&a_n_sq));
        (dhat, r)
    }

    fn gamma_scaled(&self) -> RatPoly {
        let n = self.period();
        let p = self.first_kind_scaled(n + 1);
        if n == 1 {
            return p[2].clone();
        }
        let a_n_sq = self.a_sq_exact[n - 1].clone();
        let p1 = self.stripped(1).first_kind_scaled(n - 1);
        p[n + 1].add(&p1[n - 1].scale(&a_n_sq))
    }

    /// The discriminant D(lambda) = p_{N+1} - (a_N / a_1) p^{(1)}_{N-1},
    /// degree N, leading coefficient 1/(prod a).
    pub fn discriminant(&self) -> RealPolynomial {
        let (dhat, r) = self.discriminant_scaled();
        let prod = r.to_f64().map(|x| x.sqrt()).unwrap_or(f64::NAN);
        RealPolynomial::new(dhat.to_f64_coeffs().iter().map(|c| c / prod).collect())
    }

    /// gamma_N(lambda) = p_{N+1} + (a_N / a_1) p^{(1)}_{N-1}.
    pub fn gamma(&self) -> RealPolynomial {
        let ghat = self.gamma_scaled();
        let r: BigRational = self.a_sq_exact.iter().product();
        let prod = r.to_f64().map(|x| x.sqrt()).unwrap_or(f64::NAN);
        RealPolynomial::new(ghat.to_f64_coeffs().iter().map(|c| c / prod).collect())
    }

    /// Solve |D| <= 2 into the N closed bands and the N-1 gaps (closed gaps
    /// retained and flagged).
    pub fn essential_bands(&self) -> Result<BandStructure> {
        let n = self.period();
        let (dhat, r) = self.discriminant_scaled();
        // E = Dhat^2 - 4R; roots (with multiplicity) are the 2N band edges
        let e_poly = dhat.mul(&dhat).sub(&RatPoly::constant(
            BigRational::from_integer(4.into()) * &r,
        ));
        let mut edges: Vec<f64> = vec![];
        // generous bracket: Gershgorin-type bound on the operator norm
        let bound = 2.0
            + self
                .b
                .iter()
                .zip(self.a.iter())
                .map(|(b, a)| b.abs() + 2.0 * a)
                .fold(0.0f64, f64::max);
        for (factor, mult) in e_poly.squarefree_decomposition() {
            if mult > 2 {
                let rts = exact::roots_of_squarefree_in(&factor, -bound, bound, 1e-12);
                return Err(SpectraError::DegenerateBandEdge(
                    rts.first().copied().unwrap_or(f64::NAN),
                ));
            }
            for root in exact::roots_of_squarefree_in(&factor, -bound, bound, 1e-13) {
                for _ in 0..mult {
                    edges.push(root);
                }
            }
        }
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if edges.len() != 2 * n {
            return Err(SpectraError::InvalidParameter(format!(
                "expected {} band edges, found {}",
                2 * n,
                edges.len()
            )));
        }
        let bands: Vec<Interval> = edges
            .chunks(2)
            .map(|c| Interval::new(c[0], c[1]))
            .collect::<Result<Vec<_>>>()?;
        // sanity: |D| < 2 inside every nondegenerate band
        let disc = self.discriminant();
        for band in &bands {
            if band.length() <= 1e-12 {
                return Err(SpectraError::DegenerateBandEdge(band.lo));
            }
            let mid = 0.5 * (band.lo + band.hi);
            if disc.eval(mid).abs() >= 2.0 + 1e-7 {
                return Err(SpectraError::InvalidParameter(format!(
                    "band interior fails |D| <= 2 at lambda = {mid}"
                )));
            }
        }
        let mut gaps = vec![];
        for i in 0..bands.len().saturating_sub(1) {
            let lo = bands[i].hi;
            let hi = bands[i + 1].lo;
            gaps.push(Gap {
                interval: Interval::new(lo, hi.max(lo))?,
                index_from_right: n - 1 - i,
                open: hi - lo > 1e-10,
            });
        }
        Ok(BandStructure { bands, gaps })
    }

    /// Roots of p_N with their fate under the sign rule.
    pub fn gap_root_reports(&self) -> Result<Vec<GapRootReport>> {
        let n = self.period();
        let bands = self.essential_bands()?;
        let p_hat = self.first_kind_scaled(n);
        let p_n = &p_hat[n];
        let gamma_hat = RealPolynomial::from_exact(self.gamma_scaled());
        let mut reports = vec![];
        if p_n.degree() == 0 {
            return Ok(reports);
        }
        let bound = bands.bands.last().map(|b| b.hi).unwrap_or(2.0).abs()
            + bands.bands.first().map(|b| b.lo.abs()).unwrap_or(2.0)
            + 1.0;
        for (factor, _) in p_n.squarefree_decomposition() {
            for root in exact::roots_of_squarefree_in(&factor, -bound, bound, 1e-13) {
                reports.push(GapRootReport {
                    root,
                    status: self.classify_gap_root(root, &bands, &gamma_hat),
                });
            }
        }
        reports.sort_by(|x, y| x.root.partial_cmp(&y.root).unwrap());
        Ok(reports)
    }

    fn classify_gap_root(
        &self,
        root: f64,
        bands: &BandStructure,
        gamma_hat: &RealPolynomial,
    ) -> GapRootStatus {
        const EDGE: f64 = 1e-9;
        // a closed gap's root coincides with the touching point
        for gap in &bands.gaps {
            if !gap.open && (root - gap.interval.lo).abs() <= EDGE {
                return GapRootStatus::ClosedGap;
            }
        }
        for b in &bands.bands {
            if (root - b.lo).abs() <= EDGE || (root - b.hi).abs() <= EDGE {
                return GapRootStatus::Edge;
            }
        }
        for gap in &bands.gaps {
            if gap.interval.lo < root && root < gap.interval.hi {
                if !gap.open {
                    return GapRootStatus::ClosedGap;
                }
                let g = gamma_hat.eval(root);
                let scale = gamma_hat.max_abs_coeff() * root.abs().max(1.0).powi(
                    gamma_hat.degree() as i32,
                );
                if g.abs() <= 1e-9 * scale.max(1.0) {
                    return GapRootStatus::Indeterminate;
                }
                let gamma_sign = if g > 0.0 { 1 } else { -1 };
                return if gamma_sign == -gap.sign() {
                    GapRootStatus::Eigenvalue
                } else {
                    GapRootStatus::RejectedBySign
                };
            }
        }
        if bands.contains(root) {
            return GapRootStatus::InsideBand;
        }
        // outside the essential spectrum entirely: treat like the unbounded
        // gaps, sign +1 to the right of the spectrum, (-1)^N to the left
        let g = gamma_hat.eval(root);
        let gamma_sign = if g > 0.0 { 1 } else { -1 };
        let region_sign = if root > bands.bands.last().map(|b| b.hi).unwrap_or(0.0) {
            1
        } else if self.period() % 2 == 0 {
            1
        } else {
            -1
        };
        if gamma_sign == -region_sign {
            GapRootStatus::Eigenvalue
        } else {
            GapRootStatus::RejectedBySign
        }
    }

    /// Accepted gap eigenvalues, sorted.
    pub fn gap_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self
            .gap_root_reports()?
            .into_iter()
            .filter(|r| r.status == GapRootStatus::Eigenvalue)
            .map(|r| r.root)
            .collect())
    }

    /// Weyl function m(lambda) for real lambda off the spectrum.
    pub fn weyl_function(&self, lambda: f64) -> Result<f64> {
        let n = self.period();
        let bands = self.essential_bands()?;
        if bands.contains(lambda) {
            return Err(SpectraError::Singular(format!(
                "Weyl function evaluated inside a band at {lambda}"
            )));
        }
        let p = self.first_kind_polynomials(n + 1);
        let p_n = p[n].eval(lambda);
        if p_n.abs() < 1e-13 {
            return Err(SpectraError::Singular(format!("pole of the Weyl function at {lambda}")));
        }
        let gamma = self.gamma().eval(lambda);
        let disc = self.discriminant().eval(lambda);
        let s = disc * disc - 4.0;
        if s < 0.0 {
            return Err(SpectraError::Singular(format!(
                "D^2 - 4 negative off the bands at {lambda} (numerical edge)"
            )));
        }
        let sign = if bands.bands_strictly_right_of(lambda) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let a_n = self.a(n);
        Ok((-gamma + sign * s.sqrt()) / (2.0 * a_n * p_n))
    }
}

/// Three-term recurrence y_{n+1} = ((lambda - b_n) y_n - a_{n-1} y_{n-1}) / a_n
/// with a_0 = 1, from arbitrary initial data (y_0, y_1); returns y_0..y_upto.
pub fn orthogonal_polynomials(
    b: impl Fn(usize) -> f64,
    a: impl Fn(usize) -> f64,
    upto: usize,
    y0: f64,
    y1: f64,
) -> Vec<RealPolynomial> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(RealPolynomial::constant(y0));
    if upto == 0 {
        return out;
    }
    out.push(RealPolynomial::constant(y1));
    for n in 1..upto {
        let a_prev = if n == 1 { 1.0 } else { a(n - 1) };
        let shift = RealPolynomial::new(vec![-b(n), 1.0]);
        let head = shift.mul(&out[n]);
        let next = head.sub(&out[n - 1].scale(a_prev)).scale(1.0 / a(n));
        out.push(next);
    }
    out
}

/// T_n(lambda) as the ordered product of single-step matrices.
pub fn transfer_product(
    b: impl Fn(usize) -> f64,
    a: impl Fn(usize) -> f64,
    lambda: f64,
    n: usize,
) -> [[f64; 2]; 2] {
    let mut t = [[1.0, 0.0], [0.0, 1.0]];
    for j in 1..=n {
        let (aj, bj) = (a(j), b(j));
        let step = [[(lambda - bj) / aj, -1.0 / aj], [aj, 0.0]];
        t = mat2_mul(step, t);
    }
    t
}

pub fn mat2_mul(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

/// Spectral norm of a 2x2 real matrix.
pub fn mat2_spectral_norm(m: [[f64; 2]; 2]) -> f64 {
    // singular values of [[a,b],[c,d]]
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let q = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (q * q - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (q + disc)).sqrt()
}

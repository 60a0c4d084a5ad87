//! Exact univariate polynomial arithmetic over the rationals.
//!
//! Every f64 is itself a rational number, so this module doubles as the root
//! engine for floating-point polynomials: coefficients are converted losslessly
//! and all sign decisions (Sturm counts, Yun decompositions) are exact for the
//! coefficients as given. Only the final refinement of an isolated root is
//! reported in f64.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Dense polynomial with rational coefficients, ascending degree order.
/// Trailing zero coefficients are trimmed; the zero polynomial is `coeffs = []`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    pub coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c * x^k.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Lossless conversion; every finite f64 is a dyadic rational.
    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational_from_f64(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] -= c;
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.leading();
        let n = self.coeffs.len();
        if n < dd + 1 {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); n - dd];
        for k in (dd..n).rev() {
            if r[k].is_zero() {
                continue;
            }
            let f = &r[k] / &lead;
            q[k - dd] = f.clone();
            r[k] = BigRational::zero();
            for (j, c) in d.coeffs.iter().enumerate().take(dd) {
                r[k - dd + j] -= &f * c;
            }
        }
        (Self::new(q), Self::new(r))
    }

    /// Scale by a positive rational so the coefficients are coprime integers.
    /// Signs are preserved, which is all Sturm sequences care about.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.clone());
        }
        if g.is_zero() {
            return Self::zero();
        }
        Self::new(ints.into_iter().map(|v| BigRational::from_integer(v / &g)).collect())
    }

    /// Monic gcd via Euclid with primitive rescaling at each step.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&(BigRational::one() / lead))
    }

    /// Yun's square-free decomposition: returns (factor, multiplicity) pairs
    /// with distinct roots per factor; the product of factor^mult recovers
    /// self up to a constant.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        if self.is_zero() || self.degree() == 0 {
            return vec![];
        }
        let dp = self.derivative();
        let g = self.gcd(&dp);
        if g.degree() == 0 {
            return vec![(self.clone(), 1)];
        }
        let mut out = vec![];
        let mut w = self.div_rem(&g).0;
        let mut y = dp.div_rem(&g).0;
        let mut z = y.sub(&w.derivative());
        let mut i = 1usize;
        while w.degree() > 0 {
            let gi = w.gcd(&z);
            if gi.degree() > 0 {
                out.push((gi.clone(), i));
            }
            w = w.div_rem(&gi).0;
            y = z.div_rem(&gi).0;
            z = y.sub(&w.derivative());
            i += 1;
        }
        out
    }

    /// Substitute lambda = x + 1/x and clear denominators:
    /// returns x^deg * p(x + 1/x), a polynomial in x of degree 2*deg.
    pub fn clear_joukowski(&self) -> Self {
        let n = self.degree();
        // x^n * (x + 1/x)^k = x^(n-k) * (x^2 + 1)^k
        let x2p1 = Self::from_i64(&[1, 0, 1]);
        let mut pow = Self::one();
        let mut acc = Self::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let term = Self::monomial(c.clone(), n - k).mul(&pow);
                acc = acc.add(&term);
            }
            pow = pow.mul(&x2p1);
        }
        acc
    }
}

pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Parse a decimal string such as "-1.25" or "3" into an exact rational.
pub fn rational_from_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{}{}", int_part, frac_part);
    let numer: BigInt = joined.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(numer * BigInt::from(sign), denom))
}

// ---------------------------------------------------------------------------
// Sturm sequences and root isolation
// ---------------------------------------------------------------------------

fn sign_of(x: &BigRational) -> i32 {
    match x.numer().sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    }
}

/// Sturm chain of a square-free polynomial, primitive-rescaled at each step.
pub struct SturmChain {
    chain: Vec<RatPoly>,
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.primitive(), p.derivative().primitive()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive());
        }
        Self { chain }
    }

    fn variations_at(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = sign_of(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct roots in (a, b], assuming the chain is for a
    /// square-free polynomial.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }
}

/// All real roots of the square-free polynomial `p` strictly inside (lo, hi),
/// refined to absolute accuracy `tol` (dyadic bisection, exact sign tests).
pub fn roots_of_squarefree_in(p: &RatPoly, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    if p.degree() == 0 || p.is_zero() {
        return vec![];
    }
    let chain = SturmChain::new(p);
    let a = rational_from_f64(lo);
    let b = rational_from_f64(hi);
    // open interval: shrink away from endpoints that are themselves roots
    let mut stack = vec![(a.clone(), b.clone(), chain.count_roots(&a, &b))];
    // (a, b] counts; a root exactly at `hi` would be included, at `lo` excluded.
    // Callers exclude a near-endpoint zone separately, so this bias is harmless
    // for interior roots.
    let mut isolated: Vec<(BigRational, BigRational)> = vec![];
    let two = BigRational::from_integer(2.into());
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let width = (&b - &a).to_f64().unwrap_or(f64::INFINITY);
        if n == 1 && width <= tol {
            isolated.push((a, b));
            continue;
        }
        let mid = (&a + &b) / &two;
        if n == 1 {
            // keep bisecting the single root down to tol
            let left = chain.count_roots(&a, &mid);
            if left == 1 {
                stack.push((a, mid, 1));
            } else {
                stack.push((mid, b, 1));
            }
            continue;
        }
        let left = chain.count_roots(&a, &mid);
        stack.push((a, mid.clone(), left));
        stack.push((mid, b, n - left));
    }
    let mut roots: Vec<f64> = isolated
        .into_iter()
        .map(|(a, b)| {
            let fa = a.to_f64().unwrap();
            let fb = b.to_f64().unwrap();
            polish_root(p, fa, fb)
        })
        .collect();
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Newton polish inside a bracketing interval, falling back to the midpoint.
fn polish_root(p: &RatPoly, lo: f64, hi: f64) -> f64 {
    let dp = p.derivative();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let f = p.eval_f64(x);
        let d = dp.eval_f64(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let xn = x - f / d;
        if xn < lo || xn > hi || !xn.is_finite() {
            break;
        }
        if (xn - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
            x = xn;
            break;
        }
        x = xn;
    }
    x
}

// ---------------------------------------------------------------------------
// Rational dense linear algebra (small orders only)
// ---------------------------------------------------------------------------

/// Characteristic polynomial det(lambda I - A) of a rational square matrix
/// by the Faddeev–LeVerrier recursion. Exact; intended for orders <= 64.
pub fn faddeev_leverrier(a: &[Vec<BigRational>]) -> RatPoly {
    let n = a.len();
    if n == 0 {
        return RatPoly::one();
    }
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    for k in 1..=n {
        let tr: BigRational = (0..n).map(|i| m[i][i].clone()).sum();
        let ck = -tr / BigRational::from_integer(BigInt::from(k));
        coeffs[n - k] = ck.clone();
        if k < n {
            // m <- a * (m + c_k I)
            let mut shifted = m.clone();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += &ck;
            }
            let mut next = vec![vec![BigRational::zero(); n]; n];
            for i in 0..n {
                for (l, srow) in shifted.iter().enumerate() {
                    if a[i][l].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        if !srow[j].is_zero() {
                            next[i][j] += &a[i][l] * &srow[j];
                        }
                    }
                }
            }
            m = next;
        }
    }
    RatPoly::new(coeffs)
}

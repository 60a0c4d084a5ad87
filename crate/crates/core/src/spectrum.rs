//! The assembled spectrum of an infinite graph: bands with multiplicity,
//! eigenvalues classified as discrete / hidden / edge, and qualitative notes.

use serde::Serialize;

use crate::error::{Result, SpectraError};
use crate::poly::Interval;

/// Finite or infinite multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(usize),
    Infinite,
}

impl Multiplicity {
    pub fn as_finite(&self) -> Option<usize> {
        match self {
            Multiplicity::Finite(k) => Some(*k),
            Multiplicity::Infinite => None,
        }
    }

    fn merged(self, other: Multiplicity) -> Multiplicity {
        match (self, other) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => Multiplicity::Finite(a + b),
            _ => Multiplicity::Infinite,
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(k) => s.serialize_u64(*k as u64),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Where an eigenvalue sits relative to the essential spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    /// Isolated, off every band.
    Discrete,
    /// Lying on the essential spectrum (band interior).
    Hidden,
    /// Within tolerance of a band endpoint; never silently promoted.
    Edge,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralPoint {
    pub value: f64,
    pub multiplicity: Multiplicity,
    pub class: EigenClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub multiplicity: Multiplicity,
}

/// Bands plus point spectrum plus free-text annotations.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Spectrum {
    pub bands: Vec<Band>,
    pub eigenvalues: Vec<SpectralPoint>,
    pub notes: Vec<String>,
}

const EDGE_TOL: f64 = 1e-9;

impl Spectrum {
    /// Assemble a spectrum from raw band intervals (with multiplicities) and
    /// point eigenvalues. Overlapping bands are split into elementary pieces
    /// with summed multiplicities; points are classified against the bands
    /// and coinciding points are merged.
    pub fn assemble(
        bands: Vec<(Interval, Multiplicity)>,
        points: Vec<(f64, Multiplicity)>,
        notes: Vec<String>,
    ) -> Result<Self> {
        let merged_bands = merge_bands(&bands)?;
        let mut eigenvalues: Vec<SpectralPoint> = vec![];
        let mut sorted_points = points;
        sorted_points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (value, mult) in sorted_points {
            let class = classify(value, &merged_bands);
            match eigenvalues.last_mut() {
                Some(last) if (last.value - value).abs() <= 1e-9 * value.abs().max(1.0) => {
                    last.multiplicity = last.multiplicity.merged(mult);
                }
                _ => eigenvalues.push(SpectralPoint { value, multiplicity: mult, class }),
            }
        }
        Ok(Self { bands: merged_bands, eigenvalues, notes })
    }

    pub fn covers(&self, x: f64, tol: f64) -> bool {
        self.bands.iter().any(|b| b.lo - tol <= x && x <= b.hi + tol)
    }

    pub fn band_min(&self) -> Option<f64> {
        self.bands.first().map(|b| b.lo)
    }

    pub fn band_max(&self) -> Option<f64> {
        self.bands.last().map(|b| b.hi)
    }

    /// Multiplicity of the band cover at an interior point.
    pub fn band_multiplicity_at(&self, x: f64) -> Multiplicity {
        let mut total = Multiplicity::Finite(0);
        for b in &self.bands {
            if b.lo <= x && x <= b.hi {
                total = total.merged(b.multiplicity);
            }
        }
        total
    }

    pub fn discrete_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .filter(|p| p.class == EigenClass::Discrete)
            .map(|p| p.value)
            .collect()
    }

    pub fn hidden_eigenvalues(&self) -> Vec<(f64, Multiplicity)> {
        self.eigenvalues
            .iter()
            .filter(|p| p.class == EigenClass::Hidden)
            .map(|p| (p.value, p.multiplicity))
            .collect()
    }
}

fn classify(x: f64, bands: &[Band]) -> EigenClass {
    for b in bands {
        if (x - b.lo).abs() <= EDGE_TOL || (x - b.hi).abs() <= EDGE_TOL {
            return EigenClass::Edge;
        }
        if b.lo < x && x < b.hi {
            return EigenClass::Hidden;
        }
    }
    EigenClass::Discrete
}

fn merge_bands(bands: &[(Interval, Multiplicity)]) -> Result<Vec<Band>> {
    if bands.is_empty() {
        return Ok(vec![]);
    }
    for (iv, _) in bands {
        if !(iv.lo <= iv.hi) {
            return Err(SpectraError::InvalidParameter("band with lo > hi".into()));
        }
    }
    // split at every endpoint, sum multiplicities on elementary pieces
    let mut cuts: Vec<f64> = bands.iter().flat_map(|(iv, _)| [iv.lo, iv.hi]).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    let mut out: Vec<Band> = vec![];
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let mut mult: Option<Multiplicity> = None;
        for (iv, m) in bands {
            if iv.lo <= mid && mid <= iv.hi && iv.lo - 1e-12 <= lo && hi <= iv.hi + 1e-12 {
                mult = Some(match mult {
                    None => *m,
                    Some(acc) => acc.merged(*m),
                });
            }
        }
        if let Some(m) = mult {
            match out.last_mut() {
                Some(last)
                    if last.multiplicity == m && (last.hi - lo).abs() <= 1e-12 * lo.abs().max(1.0) =>
                {
                    last.hi = hi;
                }
                _ => out.push(Band { lo, hi, multiplicity: m }),
            }
        }
    }
    Ok(out)
}

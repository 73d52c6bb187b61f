use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval a referential set is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Universe {
    lower: f64,
    upper: f64,
}

impl Universe {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::Specification(format!(
                "universe [{lower}, {upper}] must satisfy lower < upper"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn span(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, u: f64) -> bool {
        (self.lower..=self.upper).contains(&u)
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.lower, self.upper)
    }
}

impl TryFrom<[f64; 2]> for Universe {
    type Error = Error;

    fn try_from([lower, upper]: [f64; 2]) -> Result<Self> {
        Universe::new(lower, upper)
    }
}

impl From<Universe> for [f64; 2] {
    fn from(u: Universe) -> Self {
        [u.lower, u.upper]
    }
}

/// Triangle with left foot `a`, peak `b` and right foot `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularMF {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangularMF {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a <= b && b <= c) {
            return Err(Error::Domain(format!(
                "triangle ({a}, {b}, {c}) must satisfy a <= b <= c"
            )));
        }
        Ok(Self { a, b, c })
    }

    #[inline]
    pub fn degree(&self, u: f64) -> f64 {
        tri_membership(u, self)
    }
}

/// Degree of membership of `u` in a triangular set.
///
/// Ramps up linearly on `[a, b]` and down on `[b, c]`; zero outside. A
/// degenerate side (`a == b` or `b == c`) is a step that still reaches 1 at
/// the peak.
#[inline]
pub fn tri_membership(u: f64, mf: &TriangularMF) -> f64 {
    let TriangularMF { a, b, c } = *mf;
    if u < a || u > c {
        0.0
    } else if u == b {
        1.0
    } else if u < b {
        (u - a) / (b - a)
    } else {
        (c - u) / (c - b)
    }
}

/// Builds one triangle per label from one peak per label.
///
/// The first label is a left shoulder `(L, L, p)`, the last a right
/// shoulder `(p, U, U)`, and every interior label spans the whole universe
/// `(L, p, U)`. Each label therefore owns exactly one learnable vertex.
pub fn build_partition(universe: &Universe, peaks: &[f64]) -> Result<Vec<TriangularMF>> {
    if peaks.len() < 2 {
        return Err(Error::Specification(format!(
            "a partition needs at least 2 labels, got {}",
            peaks.len()
        )));
    }
    let (lo, hi) = (universe.lower(), universe.upper());
    let last = peaks.len() - 1;
    peaks
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if !universe.contains(p) {
                return Err(Error::Domain(format!(
                    "peak {p} of label {i} lies outside universe [{lo}, {hi}]"
                )));
            }
            let mf = match i {
                0 => TriangularMF { a: lo, b: lo, c: p },
                i if i == last => TriangularMF { a: p, b: hi, c: hi },
                _ => TriangularMF { a: lo, b: p, c: hi },
            };
            Ok(mf)
        })
        .collect()
}

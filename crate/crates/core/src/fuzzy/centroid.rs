//! Grid sums of a max-of-clipped-triangles aggregate.
//!
//! The aggregate `a(z) = max_k min(w_k, μ_k(z))` is piecewise linear, so its
//! sums over a uniform grid, `Σ a(z_j)` and `Σ z_j a(z_j)`, have a closed
//! form on every linear piece. That replaces a pass over all grid points with
//! work proportional to the number of breakpoints.

use super::membership::{tri_membership, TriangularMF};

/// Uniform grid `z_j = lower + j·step`, `j = 0..points`, last point pinned to
/// `upper`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

impl Grid {
    fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.points - 1) as f64
    }

    pub fn at(&self, j: usize) -> f64 {
        if j + 1 == self.points {
            self.upper
        } else {
            self.lower + j as f64 * self.step()
        }
    }

    /// Smallest index with `z_j >= s`, or `points` if none.
    fn first_at_or_above(&self, s: f64) -> usize {
        let mut j = ((s - self.lower) / self.step())
            .ceil()
            .clamp(0.0, self.points as f64) as usize;
        while j > 0 && self.at(j - 1) >= s {
            j -= 1;
        }
        while j < self.points && self.at(j) < s {
            j += 1;
        }
        j
    }
}

#[inline]
fn aggregate(active: &[(f64, TriangularMF)], z: f64) -> f64 {
    active
        .iter()
        .fold(0.0f64, |acc, (w, mf)| acc.max(w.min(tri_membership(z, mf))))
}

/// `(Σ a(z_j), Σ z_j a(z_j))` by visiting every grid point.
pub(crate) fn direct_sums(active: &[(f64, TriangularMF)], grid: &Grid) -> (f64, f64) {
    (0..grid.points).fold((0.0, 0.0), |(s0, s1), j| {
        let z = grid.at(j);
        let a = aggregate(active, z);
        (s0 + a, s1 + z * a)
    })
}

/// Same sums as [`direct_sums`], computed piece by piece.
///
/// Falls back to the direct pass when a triangle has a jump inside the
/// universe (zero-width, or a vertical edge away from the boundary), where
/// the aggregate is not continuous.
pub(crate) fn aggregate_sums(active: &[(f64, TriangularMF)], grid: &Grid) -> (f64, f64) {
    let (lo, hi) = (grid.lower, grid.upper);
    let jumps = active
        .iter()
        .any(|(_, m)| m.a == m.c || (m.a == m.b && m.a > lo) || (m.b == m.c && m.c < hi));
    if jumps {
        return direct_sums(active, grid);
    }

    let mut cuts: Vec<f64> = Vec::with_capacity(2 + 5 * active.len());
    cuts.push(lo);
    cuts.push(hi);
    for (w, m) in active {
        for p in [m.a, m.b, m.c, m.a + w * (m.b - m.a), m.c - w * (m.c - m.b)] {
            if p > lo && p < hi {
                cuts.push(p);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    // Each clipped triangle is linear between cuts; add the points where
    // two of them cross so the max is linear between consecutive cuts too.
    let mut crossings = Vec::new();
    for pair in cuts.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        for (i, (wi, mi)) in active.iter().enumerate() {
            for (wk, mk) in &active[i + 1..] {
                let dp = wi.min(tri_membership(p, mi)) - wk.min(tri_membership(p, mk));
                let dq = wi.min(tri_membership(q, mi)) - wk.min(tri_membership(q, mk));
                if dp * dq < 0.0 {
                    let r = p + (q - p) * dp / (dp - dq);
                    if r > p && r < q {
                        crossings.push(r);
                    }
                }
            }
        }
    }
    if !crossings.is_empty() {
        cuts.extend(crossings);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
    }

    let h = grid.step();
    let (mut s0, mut s1) = (0.0, 0.0);
    let last = cuts.len() - 2;
    for (i, pair) in cuts.windows(2).enumerate() {
        let (s, t) = (pair[0], pair[1]);
        let j0 = grid.first_at_or_above(s);
        let j_end = if i == last {
            grid.points
        } else {
            grid.first_at_or_above(t)
        };
        if j_end <= j0 {
            continue;
        }
        let n = (j_end - j0) as f64;
        let (a_s, a_t) = (aggregate(active, s), aggregate(active, t));
        let slope = (a_t - a_s) / (t - s);
        let z0 = grid.lower + j0 as f64 * h;
        // a(z_{j0+k}) = d0 + c1·k, k = 0..n
        let d0 = a_s + slope * (z0 - s);
        let c1 = slope * h;
        let k1 = n * (n - 1.0) / 2.0;
        let k2 = (n - 1.0) * n * (2.0 * n - 1.0) / 6.0;
        let sum_a = n * d0 + c1 * k1;
        s0 += sum_a;
        s1 += z0 * sum_a + h * (d0 * k1 + c1 * k2);
    }
    (s0, s1)
}

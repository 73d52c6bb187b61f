use rand::Rng;

use super::ellipsoid::{bounding_ellipsoid, Ellipsoid};
use crate::error::Result;
use crate::math::log_add_exp;

/// Default volume ratio a split must beat.
pub const DEFAULT_SPLIT_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, Copy)]
pub struct RegionOptions {
    pub enlargement: f64,
    /// A split is kept iff the children's total volume is below
    /// `split_threshold` times the parent's.
    pub split_threshold: f64,
    /// Expected prior volume per live point, `ln(X_i / N)`. An ellipsoid
    /// holding `m` points is grown to at least `m` times this.
    pub log_point_volume: Option<f64>,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            enlargement: 1.25,
            split_threshold: DEFAULT_SPLIT_THRESHOLD,
            log_point_volume: None,
        }
    }
}

impl RegionOptions {
    fn bound(&self, points: &[Vec<f64>]) -> Result<Ellipsoid> {
        let mut ell = bounding_ellipsoid(points, self.enlargement)?;
        if let Some(lpv) = self.log_point_volume {
            ell.expand_to(lpv + (points.len() as f64).ln());
        }
        Ok(ell)
    }
}

/// One ellipsoid around all points, grown to the expected volume floor.
pub fn single_region(points: &[Vec<f64>], opts: &RegionOptions) -> Result<Ellipsoid> {
    opts.bound(points)
}

/// Recursive 2-means decomposition into a union of ellipsoids.
///
/// A cluster is split when both halves hold at least `d + 1` points and the
/// two child ellipsoids together are smaller than `split_threshold` times
/// the parent; otherwise the parent is kept. Every point belongs to the
/// ellipsoid of the leaf cluster it ends up in.
pub fn multi_decompose<R: Rng + ?Sized>(
    points: &[Vec<f64>],
    opts: &RegionOptions,
    rng: &mut R,
) -> Result<Vec<Ellipsoid>> {
    let mut out = Vec::new();
    let parent = opts.bound(points)?;
    split_into(points, parent, opts, rng, &mut out)?;
    Ok(out)
}

fn split_into<R: Rng + ?Sized>(
    points: &[Vec<f64>],
    parent: Ellipsoid,
    opts: &RegionOptions,
    rng: &mut R,
    out: &mut Vec<Ellipsoid>,
) -> Result<()> {
    let d = points[0].len();
    if points.len() < 2 * (d + 1) {
        out.push(parent);
        return Ok(());
    }
    let labels = two_means(points, rng);
    let (a, b): (Vec<_>, Vec<_>) = points.iter().zip(&labels).partition(|(_, &l)| l == 0);
    let a: Vec<Vec<f64>> = a.into_iter().map(|(p, _)| p.clone()).collect();
    let b: Vec<Vec<f64>> = b.into_iter().map(|(p, _)| p.clone()).collect();
    if a.len() < d + 1 || b.len() < d + 1 {
        out.push(parent);
        return Ok(());
    }
    let ea = opts.bound(&a)?;
    let eb = opts.bound(&b)?;
    if log_add_exp(ea.log_volume(), eb.log_volume())
        < parent.log_volume() + opts.split_threshold.ln()
    {
        split_into(&a, ea, opts, rng, out)?;
        split_into(&b, eb, opts, rng, out)
    } else {
        out.push(parent);
        Ok(())
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k = 2 and a k-means++ seed. Returns 0/1 labels.
pub fn two_means<R: Rng + ?Sized>(points: &[Vec<f64>], rng: &mut R) -> Vec<u8> {
    let n = points.len();
    let first = rng.random_range(0..n);
    let d2: Vec<f64> = points.iter().map(|p| dist2(p, &points[first])).collect();
    let total: f64 = d2.iter().sum();
    let second = if total > 0.0 {
        let mut target = rng.random::<f64>() * total;
        let mut pick = n - 1;
        for (i, w) in d2.iter().enumerate() {
            if target < *w {
                pick = i;
                break;
            }
            target -= w;
        }
        pick
    } else {
        return vec![0; n];
    };
    let mut centers = [points[first].clone(), points[second].clone()];
    let mut labels = vec![0u8; n];
    for iter in 0..100 {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let new = u8::from(dist2(p, &centers[1]) < dist2(p, &centers[0]));
            if new != *l {
                *l = new;
                changed = true;
            }
        }
        if !changed && iter > 0 {
            break;
        }
        for (k, c) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l as usize == k)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            for (j, cj) in c.iter_mut().enumerate() {
                *cj = members.iter().map(|m| m[j]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    labels
}

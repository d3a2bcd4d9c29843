//! Brute-force ground truth for subset sums of finite generator sets.
//!
//! Reachability inside a box is a 0/1 knapsack over a dense table: each
//! generator is processed once ("include or not"), so distinctness is a
//! property of the recurrence rather than something checked afterwards.
//! Every cell remembers the first generator that reached it, which is enough
//! to rebuild a witness without storing one table per generator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{check_ascending_positive, GeneratorSet, Point, Region, Representation};
use crate::pgm::Graymap;

const UNREACHED: u32 = u32::MAX;
const ORIGIN: u32 = 0;

/// All points of a box that are sums of distinct generators, with witnesses.
#[derive(Clone, Debug)]
pub struct ReachableSet {
    region: Region,
    extent: Point,
    strides: Vec<usize>,
    generators: GeneratorSet,
    /// `ORIGIN` for the empty sum, `t + 1` if generator `t` first reached the
    /// cell, `UNREACHED` otherwise.
    stamps: Vec<u32>,
}

impl ReachableSet {
    /// Runs the dense DP over `[0, hi]` and restricts answers to `region`.
    pub fn enumerate(generators: &GeneratorSet, region: &Region, cap: u64) -> Result<Self> {
        let (_, hi) = region
            .corners()
            .ok_or_else(|| Error::validation("enumeration needs a bounded box"))?;
        if let Some(d) = generators.dim() {
            hi.check_dim(d)?;
        }
        let extent = hi.clone();
        let volume = extent
            .coords()
            .iter()
            .try_fold(1u128, |acc, &h| acc.checked_mul(u128::from(h) + 1))
            .unwrap_or(u128::MAX);
        if volume > u128::from(cap) {
            return Err(Error::Resource {
                requested: volume,
                cap,
            });
        }
        let pruned = generators.pruned_to(&extent);
        if pruned.len() >= (UNREACHED - 1) as usize {
            return Err(Error::Resource {
                requested: pruned.len() as u128,
                cap: u64::from(UNREACHED - 1),
            });
        }

        let k = extent.dim();
        let mut strides = vec![1usize; k];
        for i in (0..k - 1).rev() {
            strides[i] = strides[i + 1] * (extent.coords()[i + 1] as usize + 1);
        }
        let mut stamps = vec![UNREACHED; volume as usize];
        stamps[0] = ORIGIN;
        for (t, g) in pruned.iter().enumerate() {
            sweep(&mut stamps, &strides, extent.coords(), g.coords(), t as u32 + 1);
        }

        Ok(ReachableSet {
            region: region.clone(),
            extent,
            strides,
            generators: pruned,
            stamps,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Generators that fit in the table, in canonical order.
    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    fn index(&self, p: &Point) -> Option<usize> {
        if !self.region.contains(p).ok()? {
            return None;
        }
        Some(p.coords().iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index(p).is_some_and(|i| self.stamps[i] != UNREACHED)
    }

    /// Deterministic witness: the last generator used is the earliest one (in
    /// canonical order) that makes `p` reachable, and the rest is rebuilt from
    /// strictly earlier generators.
    pub fn witness(&self, p: &Point) -> Option<Representation> {
        let mut idx = self.index(p)?;
        let mut members = Vec::new();
        let mut bound = u32::MAX;
        loop {
            let stamp = self.stamps[idx];
            if stamp == UNREACHED {
                return None;
            }
            if stamp == ORIGIN {
                break;
            }
            debug_assert!(stamp < bound, "witness generators must strictly decrease");
            bound = stamp;
            let g = &self.generators.as_slice()[(stamp - 1) as usize];
            idx -= offset(g.coords(), &self.strides);
            members.push(g.clone());
        }
        Some(Representation::new(p.clone(), members))
    }

    /// Reachable points of the region in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.region
            .points()
            .expect("region is a box")
            .filter(|p| self.contains(p))
    }

    pub fn count(&self) -> u64 {
        self.points().count() as u64
    }

    pub fn extent(&self) -> &Point {
        &self.extent
    }

    /// 255 = reachable, 0 = not; 2-D boxes only, `y` grows upwards.
    pub fn heatmap(&self) -> Result<Graymap> {
        let (lo, hi) = self.region.corners().expect("region is a box");
        lo.check_dim(2)?;
        let (x0, y0) = (lo.coords()[0], lo.coords()[1]);
        let mut img = Graymap::new(
            (hi.coords()[0] - x0 + 1) as usize,
            (hi.coords()[1] - y0 + 1) as usize,
        );
        for p in self.points() {
            img.set_cartesian((p.coords()[0] - x0) as usize, (p.coords()[1] - y0) as usize, 255);
        }
        Ok(img)
    }

    pub fn summary(&self, with_witnesses: bool) -> ReachableSummary {
        let points: Vec<Point> = self.points().collect();
        let witnesses = with_witnesses.then(|| {
            points
                .iter()
                .map(|p| self.witness(p).expect("listed points are reachable"))
                .collect()
        });
        ReachableSummary {
            region: self.region.clone(),
            generators: self.generators.len(),
            count: points.len() as u64,
            points,
            witnesses,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReachableSummary {
    #[serde(rename = "box")]
    pub region: Region,
    pub generators: usize,
    pub count: u64,
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Representation>>,
}

fn offset(g: &[u64], strides: &[usize]) -> usize {
    g.iter().zip(strides).map(|(&c, &s)| c as usize * s).sum()
}

/// One knapsack pass for generator `g`: cells are visited in decreasing
/// linear order so that `p - g` is always read before this pass touches it.
fn sweep(stamps: &mut [u32], strides: &[usize], extent: &[u64], g: &[u64], stamp: u32) {
    let last = extent.len() - 1;
    let shift = offset(g, strides);
    let (row_lo, row_hi) = (g[last] as usize, extent[last] as usize);
    let mut prefix: Vec<u64> = extent[..last].to_vec();
    loop {
        let base = offset(&prefix, strides);
        for idx in (base + row_lo..=base + row_hi).rev() {
            if stamps[idx] == UNREACHED && stamps[idx - shift] != UNREACHED {
                stamps[idx] = stamp;
            }
        }
        // step the prefix odometer down within [g, extent]
        let mut i = last;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if prefix[i] > g[i] {
                prefix[i] -= 1;
                prefix[i + 1..last].copy_from_slice(&extent[i + 1..last]);
                break;
            }
        }
    }
}

/// Decides `target ∈ FS(X)` and returns a witness if so.
pub fn fs_membership(
    generators: &GeneratorSet,
    target: &Point,
    cap: u64,
) -> Result<Option<Representation>> {
    if let Some(d) = generators.dim() {
        target.check_dim(d)?;
    }
    let region = Region::boxed(Point::zero(target.dim()), target.clone())?;
    let reach = ReachableSet::enumerate(generators, &region, cap)?;
    Ok(reach.witness(target))
}

/// `{p ∈ box : p ∈ FS(X)}`.
pub fn fs_enumerate(generators: &GeneratorSet, region: &Region, cap: u64) -> Result<ReachableSet> {
    ReachableSet::enumerate(generators, region, cap)
}

/// Maximum number of distinct elements of `values` summing to `x`; 0 when
/// `x` has no representation.
pub fn trm(values: &[u64], x: u64, cap: u64) -> Result<u64> {
    Ok(trm_table(values, x, cap)?[x as usize].max(0) as u64)
}

/// `trm` for every target in `0..=limit` (negative entries: unreachable).
pub fn trm_table(values: &[u64], limit: u64, cap: u64) -> Result<Vec<i64>> {
    check_ascending_positive(values)?;
    if limit == 0 {
        return Err(Error::validation("trm needs x >= 1"));
    }
    if u128::from(limit) + 1 > u128::from(cap) {
        return Err(Error::Resource {
            requested: u128::from(limit) + 1,
            cap,
        });
    }
    let n = limit as usize;
    let mut best = vec![-1i64; n + 1];
    best[0] = 0;
    for &a in values.iter().take_while(|&&a| a <= limit) {
        let a = a as usize;
        for s in (a..=n).rev() {
            if best[s - a] >= 0 && best[s - a] + 1 > best[s] {
                best[s] = best[s - a] + 1;
            }
        }
    }
    Ok(best)
}

/// 1-D subset-sum reachability on `[0, limit]`.
pub fn reachable_sums(values: &[u64], limit: u64, cap: u64) -> Result<Vec<bool>> {
    Ok(trm_table(values, limit.max(1), cap)?
        .into_iter()
        .take(limit as usize + 1)
        .map(|t| t >= 0)
        .collect())
}

/// First point of `search_box` (lexicographic) outside FS(X), if any.
pub fn uncovered_point_search(
    generators: &GeneratorSet,
    region: &Region,
    search_box: &Region,
    cap: u64,
) -> Result<Option<Point>> {
    if !matches!(region, Region::TranslatedOrthant { .. }) {
        return Err(Error::validation("region must be a translated orthant"));
    }
    if !region.contains_box(search_box)? {
        return Err(Error::Precondition(
            "the search box must lie inside the region".into(),
        ));
    }
    let reach = ReachableSet::enumerate(generators, search_box, cap)?;
    let uncovered = search_box.points()?.find(|p| !reach.contains(p));
    Ok(uncovered)
}

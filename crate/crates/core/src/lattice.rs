//! Exact lattice types shared by every other module: points of ℕᵏ, finite
//! generator sets, subset-sum certificates, regions and counting profiles.
//!
//! Points may carry zero coordinates so that axes, boxes and the empty sum
//! (the origin) are expressible. Region predicates enforce positivity where
//! the underlying statement works over ℕ = {1, 2, ...}.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point with nonnegative integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Point(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::validation("a point needs at least one coordinate"));
        }
        Ok(Point(coords))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Point(vec![0; dim])
    }

    /// The point `alpha * e_axis`, a point of the `axis`-th coordinate axis.
    pub fn on_axis(dim: usize, axis: usize, alpha: u64) -> Self {
        let mut p = Point::zero(dim);
        p.0[axis] = alpha;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn max_coord(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Number of nonzero coordinates.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Point) -> Result<Point> {
        other.check_dim(self.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Vec<_>>>()
            .map(Point)
            .ok_or_else(|| Error::overflow(format!("{self} + {other}")))
    }

    /// Componentwise difference, `None` if any coordinate would go negative
    /// or the dimensions differ.
    pub fn checked_sub(&self, other: &Point) -> Option<Point> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Point)
    }

    pub fn scale(&self, factor: u64) -> Result<Point> {
        self.0
            .iter()
            .map(|c| c.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .map(Point)
            .ok_or_else(|| Error::overflow(format!("{factor} * {self}")))
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &Point) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Sum of a nonempty-dimension list of points; the empty list sums to
    /// the origin of dimension `dim`.
    pub fn sum<'a>(dim: usize, points: impl IntoIterator<Item = &'a Point>) -> Result<Point> {
        points
            .into_iter()
            .try_fold(Point::zero(dim), |acc, p| acc.checked_add(p))
    }
}

impl TryFrom<Vec<u64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<u64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<u64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Parses `"a,b,c"` (parentheses and whitespace tolerated).
impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = trimmed
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::validation(format!("bad coordinate {part:?} in {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

/// A finite set of distinct nonzero points of equal dimension, kept in
/// lexicographic order so that every downstream algorithm is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct GeneratorSet {
    elements: Vec<Point>,
}

impl GeneratorSet {
    /// Builds the set, sorting and dropping repeated points.
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let set: BTreeSet<Point> = points.into_iter().collect();
        let mut dim = None;
        for p in &set {
            match dim {
                None => dim = Some(p.dim()),
                Some(d) => p.check_dim(d)?,
            }
            if p.is_zero() {
                return Err(Error::validation("the zero vector cannot be a generator"));
            }
        }
        Ok(GeneratorSet {
            elements: set.into_iter().collect(),
        })
    }

    pub fn empty() -> Self {
        GeneratorSet::default()
    }

    pub fn dim(&self) -> Option<usize> {
        self.elements.first().map(Point::dim)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &[Point] {
        &self.elements
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Generators that fit componentwise under `bound`; any other generator
    /// can never appear in a sum that stays below `bound`.
    pub fn pruned_to(&self, bound: &Point) -> GeneratorSet {
        GeneratorSet {
            elements: self
                .elements
                .iter()
                .filter(|g| g.dominated_by(bound))
                .cloned()
                .collect(),
        }
    }

    pub fn union(&self, other: &GeneratorSet) -> Result<GeneratorSet> {
        GeneratorSet::new(self.elements.iter().chain(other.iter()).cloned())
    }
}

impl TryFrom<Vec<Point>> for GeneratorSet {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        GeneratorSet::new(points)
    }
}

impl From<GeneratorSet> for Vec<Point> {
    fn from(g: GeneratorSet) -> Self {
        g.elements
    }
}

impl<'a> IntoIterator for &'a GeneratorSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// Certificate that `target` is a sum of pairwise distinct `members`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub target: Point,
    pub members: Vec<Point>,
}

impl Representation {
    pub fn new(target: Point, mut members: Vec<Point>) -> Self {
        members.sort();
        Representation { target, members }
    }

    pub fn validate(&self) -> Result<bool> {
        validate_representation(self)
    }
}

/// True iff the members are pairwise distinct and sum to the target.
pub fn validate_representation(r: &Representation) -> Result<bool> {
    let dim = r.target.dim();
    for m in &r.members {
        m.check_dim(dim)?;
    }
    let distinct: BTreeSet<&Point> = r.members.iter().collect();
    if distinct.len() != r.members.len() {
        return Ok(false);
    }
    match Point::sum(dim, &r.members) {
        Ok(s) => Ok(s == r.target),
        Err(Error::Overflow(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Regions of ℕᵏ used as completeness targets and search windows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `base + ℕᵏ` with ℕ = {1,2,...}: every coordinate strictly above `base`.
    TranslatedOrthant { base: Point },
    /// Closed box `lo <= p <= hi`.
    Box { lo: Point, hi: Point },
}

impl Region {
    pub fn orthant(base: Point) -> Region {
        Region::TranslatedOrthant { base }
    }

    pub fn boxed(lo: Point, hi: Point) -> Result<Region> {
        hi.check_dim(lo.dim())?;
        if !lo.dominated_by(&hi) {
            return Err(Error::validation(format!("box corner {lo} is not below {hi}")));
        }
        Ok(Region::Box { lo, hi })
    }

    /// Parses `"x0,y0,...,x1,y1,..."`: the first half of the numbers is the
    /// lower corner, the second half the upper corner.
    pub fn parse_box(s: &str) -> Result<Region> {
        let all = Point::from_str(s)?;
        let c = all.coords();
        if c.len() % 2 != 0 {
            return Err(Error::validation(format!(
                "box {s:?} needs an even number of coordinates"
            )));
        }
        let k = c.len() / 2;
        Region::boxed(Point::new(c[..k].to_vec())?, Point::new(c[k..].to_vec())?)
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::TranslatedOrthant { base } => base.dim(),
            Region::Box { lo, .. } => lo.dim(),
        }
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(match self {
            Region::TranslatedOrthant { base } => {
                p.coords().iter().zip(base.coords()).all(|(x, z)| x > z)
            }
            Region::Box { lo, hi } => lo.dominated_by(p) && p.dominated_by(hi),
        })
    }

    pub fn corners(&self) -> Option<(&Point, &Point)> {
        match self {
            Region::Box { lo, hi } => Some((lo, hi)),
            Region::TranslatedOrthant { .. } => None,
        }
    }

    /// Number of lattice points of a box; `None` for unbounded regions.
    pub fn volume(&self) -> Option<u128> {
        let (lo, hi) = self.corners()?;
        lo.coords()
            .iter()
            .zip(hi.coords())
            .try_fold(1u128, |acc, (l, h)| acc.checked_mul(u128::from(h - l) + 1))
    }

    /// Whether the box `inner` lies inside `self`.
    pub fn contains_box(&self, inner: &Region) -> Result<bool> {
        let (lo, hi) = inner
            .corners()
            .ok_or_else(|| Error::validation("inner region must be a box"))?;
        lo.check_dim(self.dim())?;
        Ok(match self {
            Region::TranslatedOrthant { .. } => self.contains(lo)?,
            Region::Box { .. } => self.contains(lo)? && self.contains(hi)?,
        })
    }

    /// Lattice points of a box in lexicographic order.
    pub fn points(&self) -> Result<BoxPoints> {
        let (lo, hi) = self
            .corners()
            .ok_or_else(|| Error::validation("only boxes can be enumerated"))?;
        Ok(BoxPoints {
            lo: lo.clone(),
            hi: hi.clone(),
            next: Some(lo.coords().to_vec()),
        })
    }
}

pub struct BoxPoints {
    lo: Point,
    hi: Point,
    next: Option<Vec<u64>>,
}

impl Iterator for BoxPoints {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let lo = self.lo.coords();
        let hi = self.hi.coords();
        for i in (0..succ.len()).rev() {
            if succ[i] < hi[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = lo[i];
        }
        Some(Point(current))
    }
}

/// `count` elements up to `n`, reported together with the exponent
/// `g(n) = log count / log n` of the relation `count = n^g(n)`.
///
/// The exponent is a report value only: it is undefined for `n < 2` or an
/// empty count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingProfile {
    pub n: u64,
    pub count: u64,
    pub exponent: Option<f64>,
}

impl CountingProfile {
    fn from_count(n: u64, count: u64) -> Self {
        let exponent = (n >= 2 && count >= 1).then(|| (count as f64).ln() / (n as f64).ln());
        CountingProfile { n, count, exponent }
    }
}

/// `A(n)` for a strictly increasing sequence of positive integers.
pub fn counting_profile(values: &[u64], n: u64) -> Result<CountingProfile> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    check_ascending_positive(values)?;
    let count = values.partition_point(|&v| v <= n) as u64;
    Ok(CountingProfile::from_count(n, count))
}

/// Number of points lying in the cube `[1, n]^k`.
pub fn lattice_counting_profile<'a>(
    points: impl IntoIterator<Item = &'a Point>,
    n: u64,
) -> Result<CountingProfile> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    let count = points
        .into_iter()
        .filter(|p| p.coords().iter().all(|&c| (1..=n).contains(&c)))
        .count() as u64;
    Ok(CountingProfile::from_count(n, count))
}

pub(crate) fn check_ascending_positive(values: &[u64]) -> Result<()> {
    if values.first() == Some(&0) {
        return Err(Error::validation("sequence elements must be positive"));
    }
    if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::validation(format!(
            "sequence must be strictly increasing, found {} before {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn validate_examples() {
        let ok = Representation::new(pt(&[3, 3]), vec![pt(&[1, 2]), pt(&[2, 1])]);
        assert!(validate_representation(&ok).unwrap());

        let dup = Representation::new(pt(&[2, 4]), vec![pt(&[1, 2]), pt(&[1, 2])]);
        assert!(!validate_representation(&dup).unwrap());

        let empty = Representation::new(pt(&[0, 0]), vec![]);
        assert!(validate_representation(&empty).unwrap());

        let empty_nonzero = Representation::new(pt(&[0, 1]), vec![]);
        assert!(!validate_representation(&empty_nonzero).unwrap());
    }

    #[test]
    fn validate_dimension_mismatch_is_an_error() {
        let r = Representation::new(pt(&[3, 3]), vec![pt(&[1, 2, 0])]);
        assert!(matches!(
            validate_representation(&r),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn profile_examples() {
        let p = counting_profile(&[1, 2, 4, 8, 16], 10).unwrap();
        assert_eq!(p.count, 4);
        let g = p.exponent.unwrap();
        assert!((g - 4f64.ln() / 10f64.ln()).abs() < 1e-12);
        assert!((g - 0.602).abs() < 1e-3);

        let p = counting_profile(&[1], 1).unwrap();
        assert_eq!(p.count, 1);
        assert_eq!(p.exponent, None);

        let powers: Vec<u64> = (0..=20).map(|i| 1u64 << i).collect();
        // 2^19 = 524288 <= 10^6 < 2^20
        assert_eq!(counting_profile(&powers, 1_000_000).unwrap().count, 20);
    }

    #[test]
    fn profile_rejects_unsorted() {
        assert!(matches!(counting_profile(&[2, 1], 5), Err(Error::Validation(_))));
        assert!(matches!(counting_profile(&[1, 1], 5), Err(Error::Validation(_))));
        assert!(matches!(counting_profile(&[0, 1], 5), Err(Error::Validation(_))));
    }

    #[test]
    fn lattice_profile_counts_cube() {
        let pts = [pt(&[1, 1]), pt(&[0, 3]), pt(&[3, 3]), pt(&[4, 1])];
        assert_eq!(lattice_counting_profile(&pts, 3).unwrap().count, 2);
        assert_eq!(lattice_counting_profile(&pts, 1).unwrap().count, 1);
    }

    #[test]
    fn generator_set_is_canonical() {
        let g = GeneratorSet::new(vec![pt(&[2, 1]), pt(&[1, 2]), pt(&[2, 1])]).unwrap();
        assert_eq!(g.as_slice(), &[pt(&[1, 2]), pt(&[2, 1])]);
        assert!(GeneratorSet::new(vec![pt(&[0, 0])]).is_err());
        assert!(GeneratorSet::new(vec![pt(&[1, 0]), pt(&[1])]).is_err());
    }

    #[test]
    fn orthant_is_strict() {
        let r = Region::orthant(pt(&[1, 1]));
        assert!(r.contains(&pt(&[2, 2])).unwrap());
        assert!(!r.contains(&pt(&[1, 5])).unwrap());
        let b = Region::parse_box("2,2,10,10").unwrap();
        assert!(r.contains_box(&b).unwrap());
        assert!(!r.contains_box(&Region::parse_box("1,2,3,3").unwrap()).unwrap());
    }

    #[test]
    fn box_points_are_lexicographic() {
        let b = Region::parse_box("0,1,1,2").unwrap();
        let pts: Vec<_> = b.points().unwrap().collect();
        assert_eq!(pts, vec![pt(&[0, 1]), pt(&[0, 2]), pt(&[1, 1]), pt(&[1, 2])]);
        assert_eq!(b.volume(), Some(4));
    }

    #[test]
    fn point_parsing() {
        assert_eq!("5,3".parse::<Point>().unwrap(), pt(&[5, 3]));
        assert_eq!("(1, 2 ,3)".parse::<Point>().unwrap(), pt(&[1, 2, 3]));
        assert!("1,-2".parse::<Point>().is_err());
        assert!("".parse::<Point>().is_err());
    }
}

//! Subset sums of the grid `X = {2^m} × {2^k}`.
//!
//! Outside the exceptional set `E = {(a,b): 2^b <= a} ∪ {(a,b): 2^a <= b}`
//! every pair is a sum of distinct grid points, built by splitting one
//! coordinate's dyadic expansion until both coordinates have the same number
//! of terms and pairing them up. Inside `E` there are arbitrarily large empty
//! squares next to squares that still hold many sums. Coordinates are
//! [`BitInt`]s, so corners like `2^(2^(R+1))` never materialize.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bitint::BitInt;
use crate::error::{Error, Result};
use crate::lattice::{GeneratorSet, Point, Region, Representation};
use crate::oracle::fs_enumerate;
use crate::pgm::Graymap;

/// `2^exp_b <= a`, exactly (`b <= log2 a`).
fn pow2_le(exp_b: &BitInt, a: &BitInt) -> bool {
    a.top().is_some_and(|t| *exp_b <= t)
}

/// Membership in the exceptional set `E`.
pub fn in_exceptional(a: &BitInt, b: &BitInt) -> Result<bool> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::validation("exceptional-set coordinates must be positive"));
    }
    Ok(pow2_le(b, a) || pow2_le(a, b))
}

/// A multiset of powers of two, keyed by exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PowerMultiset(BTreeMap<u64, u64>);

impl PowerMultiset {
    pub fn len(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, exp: u64) -> u64 {
        self.0.get(&exp).copied().unwrap_or(0)
    }

    pub fn sum(&self) -> BitInt {
        let mut total = BitInt::zero();
        for (&e, &m) in &self.0 {
            total = &total + &BitInt::from(m).shl(e);
        }
        total
    }

    /// Exponents with repetition, largest first.
    pub fn exponents_desc(&self) -> impl Iterator<Item = u64> + '_ {
        self.0
            .iter()
            .rev()
            .flat_map(|(&e, &m)| std::iter::repeat_n(e, m as usize))
    }
}

/// Writes `a` as exactly `j` powers of two (repetition allowed) by
/// splitting the largest splittable power until the count is reached.
pub fn split_to_terms(a: &BitInt, j: u64) -> Result<PowerMultiset> {
    let pop = a.popcount();
    if j < pop || *a < j {
        return Err(Error::Range(format!(
            "{a} cannot be written with {j} powers of two (need {pop} <= j <= {a})"
        )));
    }
    let mut terms: BTreeMap<u64, u64> = a.positions().map(|p| (p, 1)).collect();
    let mut missing = j - pop;
    while missing > 0 {
        let (&c, &m) = terms.iter().next_back().expect("nonempty while j <= a");
        debug_assert!(c > 0, "all ones but still short of j terms");
        // splitting one copy of 2^c into two copies of 2^(c-1) adds one term
        let t = m.min(missing);
        if t == m {
            terms.remove(&c);
        } else {
            terms.insert(c, m - t);
        }
        *terms.entry(c - 1).or_insert(0) += 2 * t;
        missing -= t;
    }
    Ok(PowerMultiset(terms))
}

/// Grid point `(2^x, 2^y)` stored by its exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GridPoint {
    pub x: u64,
    pub y: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicRepresentation {
    pub target: (BitInt, BitInt),
    pub members: Vec<GridPoint>,
}

impl DyadicRepresentation {
    /// Members pairwise distinct and summing to the target.
    pub fn is_valid(&self) -> bool {
        let mut seen = self.members.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.members.len() {
            return false;
        }
        let mut sx = BitInt::zero();
        let mut sy = BitInt::zero();
        for m in &self.members {
            sx.add_pow2(m.x);
            sy.add_pow2(m.y);
        }
        (sx, sy) == self.target
    }

    /// The same certificate over machine-word points, when everything fits.
    pub fn to_representation(&self) -> Option<Representation> {
        let members = self
            .members
            .iter()
            .map(|m| {
                let x = 1u64.checked_shl(u32::try_from(m.x).ok()?)?;
                let y = 1u64.checked_shl(u32::try_from(m.y).ok()?)?;
                Point::new(vec![x, y]).ok()
            })
            .collect::<Option<Vec<_>>>()?;
        let target = Point::new(vec![self.target.0.to_u64()?, self.target.1.to_u64()?]).ok()?;
        Some(Representation::new(target, members))
    }
}

/// Constructive membership for pairs outside `E`.
pub fn dyadic_represent(a: &BitInt, b: &BitInt) -> Result<DyadicRepresentation> {
    if in_exceptional(a, b)? {
        return Err(Error::domain(format!(
            "({a}, {b}) lies in the exceptional set; ask the brute-force oracle instead"
        )));
    }
    let swapped = b > a;
    let (big, small) = if swapped { (b, a) } else { (a, b) };
    let (n, m) = (big.popcount(), small.popcount());
    // pair a split of one side with the distinct dyadic terms of the other
    let pairs: Vec<(u64, u64)> = if n <= m {
        let split = split_to_terms(big, m)?;
        split.exponents_desc().zip(small.positions().rev()).collect()
    } else {
        let split = split_to_terms(small, n)?;
        big.positions().rev().zip(split.exponents_desc()).collect()
    };
    let mut members: Vec<GridPoint> = pairs
        .into_iter()
        .map(|(x, y)| if swapped { GridPoint { x: y, y: x } } else { GridPoint { x, y } })
        .collect();
    members.sort();
    Ok(DyadicRepresentation {
        target: (a.clone(), b.clone()),
        members,
    })
}

/// Grid points `(2^i, 2^j)` lying componentwise below `bound`.
pub fn grid_generators(bound: &Point) -> Result<GeneratorSet> {
    bound.check_dim(2)?;
    let powers = |limit: u64| (0..64).map(|e| 1u64 << e).take_while(move |&p| p <= limit);
    let (bx, by) = (bound.coords()[0], bound.coords()[1]);
    GeneratorSet::new(powers(bx).flat_map(|x| powers(by).map(move |y| Point::new(vec![x, y]).expect("2-D"))))
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareCertificate {
    pub j: u64,
    pub k: u64,
    /// Fewest powers of two summing to the first coordinate.
    pub min_terms: u64,
    /// Most grid points whose second coordinates can sum to `1 + k`.
    pub max_summands: u64,
}

/// The square `(x0 + j, y0 + k)`, `1 <= j, k <= side`, missed by `FS(X)`.
#[derive(Clone, Debug, Serialize)]
pub struct EmptySquare {
    pub d: u64,
    pub x0: BitInt,
    pub y0: BitInt,
    pub side: u64,
    pub certificates: Vec<SquareCertificate>,
    pub guaranteed: bool,
}

impl EmptySquare {
    pub fn points(&self) -> impl Iterator<Item = (BitInt, BitInt)> + '_ {
        (1..=self.side).flat_map(move |j| {
            (1..=self.side).map(move |k| (&self.x0 + &BitInt::from(j), &self.y0 + &BitInt::from(k)))
        })
    }

    /// Re-derives emptiness by brute force; `Ok(None)` if `x0` does not fit
    /// a machine word.
    pub fn verify_with_oracle(&self, cap: u64) -> Result<Option<bool>> {
        let Some(x0) = self.x0.to_u64() else {
            return Ok(None);
        };
        let y0 = self.y0.to_u64().expect("y0 = 1");
        let lo = Point::new(vec![x0 + 1, y0 + 1])?;
        let hi = Point::new(vec![x0 + self.side, y0 + self.side])?;
        let reach = fs_enumerate(&grid_generators(&hi)?, &Region::boxed(lo, hi)?, cap)?;
        Ok(Some(reach.count() == 0))
    }
}

pub fn empty_square(d: u64) -> Result<EmptySquare> {
    if d == 0 {
        return Err(Error::validation("D must be at least 1"));
    }
    let x0 = BitInt::from_positions(d + 1..=2 * d + 1)?;
    let y0 = BitInt::from(1u64);
    let mut certificates = Vec::new();
    for j in 1..=d {
        let first = &x0 + &BitInt::from(j);
        for k in 1..=d {
            // every grid point contributes at least 1 to the second coordinate
            certificates.push(SquareCertificate {
                j,
                k,
                min_terms: first.popcount(),
                max_summands: 1 + k,
            });
        }
    }
    let guaranteed = certificates.iter().all(|c| c.min_terms > c.max_summands);
    Ok(EmptySquare {
        d,
        x0,
        y0,
        side: d,
        certificates,
        guaranteed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseRow {
    /// Number of horizontal summands (= popcount of the first coordinate).
    pub k: u64,
    pub first_coordinates: u128,
    pub shifts: u64,
    pub term: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseSquareReport {
    pub r: u32,
    /// `M = 2^R`.
    pub m: u128,
    /// Left edge `2^(2^(R+1))` of the square.
    pub corner_x: BitInt,
    pub formula_count: u128,
    pub enumerated_count: u128,
    pub rows: Vec<DenseRow>,
    /// Every enumerated point got a validated horizontal representation
    /// and lies in the exceptional set.
    pub all_certified: bool,
    /// `Σ_{k=0}^{R} C(R,k)(R - log2(k+1))`.
    pub closed_form_bound: f64,
    /// `2^R · R / 2`, asserted for `R >= 6`.
    pub chain_bound: u128,
    /// `M log2 M / 4`.
    pub quarter_m_log_m: f64,
    pub counts_agree: bool,
    pub meets_chain_bound: bool,
    pub note: String,
}

pub const DENSE_MAX_R: u32 = 24;

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn ceil_log2(k: u64) -> u64 {
    if k <= 1 {
        0
    } else {
        u64::from(64 - (k - 1).leading_zeros())
    }
}

/// Counts the horizontal sums `(n, k·2^f)` in the square
/// `[2^(2^(R+1)), 2^(2^(R+1)) + 2^R - 1] × [0, 2^R]`, by the closed formula
/// and by direct enumeration with a certificate per point.
pub fn dense_square_count(r: u32) -> Result<DenseSquareReport> {
    if r == 0 || r > DENSE_MAX_R {
        return Err(Error::validation(format!("R must lie in 1..={DENSE_MAX_R}")));
    }
    let rr = u64::from(r);
    let m = 1u128 << r;
    let corner_x = BitInt::pow2(1u64 << (r + 1));
    let height = BitInt::from(m);

    let mut rows = Vec::new();
    let mut formula_count = 0u128;
    for k in 1..=rr + 1 {
        let shifts = rr - ceil_log2(k) + 1;
        let firsts = binomial(rr, k - 1);
        let term = firsts * u128::from(shifts);
        formula_count += term;
        rows.push(DenseRow {
            k,
            first_coordinates: firsts,
            shifts,
            term,
        });
    }

    let mut enumerated = 0u128;
    let mut all_certified = true;
    for low in 0..(1u64 << r) {
        let n = &corner_x + &BitInt::from(low);
        let k = n.popcount();
        let mut f = 0u64;
        loop {
            let y = BitInt::from(k).shl(f);
            if y > height {
                break;
            }
            let rep = DyadicRepresentation {
                target: (n.clone(), y.clone()),
                members: n.positions().map(|x| GridPoint { x, y: f }).collect(),
            };
            all_certified &= rep.is_valid() && in_exceptional(&n, &y)?;
            enumerated += 1;
            f += 1;
        }
    }

    let closed_form_bound = (0..=rr)
        .map(|k| binomial(rr, k) as f64 * (r as f64 - ((k + 1) as f64).log2()))
        .sum();
    let chain_bound = m * u128::from(rr) / 2;
    Ok(DenseSquareReport {
        r,
        m,
        corner_x,
        formula_count,
        enumerated_count: enumerated,
        rows,
        all_certified,
        closed_form_bound,
        chain_bound,
        quarter_m_log_m: m as f64 * r as f64 / 4.0,
        counts_agree: formula_count == enumerated,
        meets_chain_bound: enumerated >= chain_bound,
        note: "the chain bound is only asserted for R >= 6".into(),
    })
}

pub const LEVEL_OUTSIDE_E: u8 = 255;
pub const LEVEL_E_REACHABLE: u8 = 128;
pub const LEVEL_E_UNREACHABLE: u8 = 0;

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalMap {
    #[serde(rename = "box")]
    pub region: Region,
    pub outside_e: u64,
    pub in_e_reachable: u64,
    pub in_e_unreachable: u64,
    /// Points outside `E` the oracle could not reach (always 0).
    pub outside_e_unreachable: u64,
    #[serde(skip)]
    pub image: Graymap,
}

/// Three-level map of a box of positive points: outside `E`, in `E` and
/// reachable, in `E` and unreachable.
pub fn exceptional_map(region: &Region, cap: u64) -> Result<ExceptionalMap> {
    let (lo, hi) = region
        .corners()
        .ok_or_else(|| Error::validation("map needs a box"))?;
    lo.check_dim(2)?;
    if lo.coords().contains(&0) {
        return Err(Error::validation("map box must contain positive points only"));
    }
    let reach = fs_enumerate(&grid_generators(hi)?, region, cap)?;
    let width = (hi.coords()[0] - lo.coords()[0] + 1) as usize;
    let height = (hi.coords()[1] - lo.coords()[1] + 1) as usize;
    let mut image = Graymap::new(width, height);
    let (mut outside, mut e_in, mut e_out, mut bad) = (0, 0, 0, 0);
    for p in region.points()? {
        let (a, b) = (p.coords()[0], p.coords()[1]);
        let reachable = reach.contains(&p);
        let level = if !in_exceptional(&BitInt::from(a), &BitInt::from(b))? {
            outside += 1;
            bad += u64::from(!reachable);
            LEVEL_OUTSIDE_E
        } else if reachable {
            e_in += 1;
            LEVEL_E_REACHABLE
        } else {
            e_out += 1;
            LEVEL_E_UNREACHABLE
        };
        image.set_cartesian(
            (a - lo.coords()[0]) as usize,
            (b - lo.coords()[1]) as usize,
            level,
        );
    }
    Ok(ExceptionalMap {
        region: region.clone(),
        outside_e: outside,
        in_e_reachable: e_in,
        in_e_unreachable: e_out,
        outside_e_unreachable: bad,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: u64) -> BitInt {
        BitInt::from(n)
    }

    fn gp(x: u64, y: u64) -> GridPoint {
        GridPoint { x, y }
    }

    #[test]
    fn exceptional_examples() {
        assert!(in_exceptional(&bi(8), &bi(3)).unwrap());
        assert!(!in_exceptional(&bi(5), &bi(3)).unwrap());
        assert!(in_exceptional(&bi(3), &bi(8)).unwrap());
        assert!(!in_exceptional(&bi(7), &bi(3)).unwrap());
        assert!(in_exceptional(&bi(0), &bi(3)).is_err());
        let huge = BitInt::pow2(1 << 20);
        assert!(in_exceptional(&huge, &bi(1 << 20)).unwrap());
        assert!(!in_exceptional(&huge, &bi((1 << 20) + 1)).unwrap());
    }

    #[test]
    fn exceptional_matches_float_logs_on_small_grid() {
        for a in 1u64..200 {
            for b in 1u64..200 {
                let float = (b as f64) <= (a as f64).log2() || (a as f64) <= (b as f64).log2();
                assert_eq!(in_exceptional(&bi(a), &bi(b)).unwrap(), float, "({a},{b})");
            }
        }
    }

    #[test]
    fn split_examples() {
        let exps = |a: u64, j: u64| -> Vec<u64> {
            split_to_terms(&bi(a), j).unwrap().exponents_desc().collect()
        };
        assert_eq!(exps(5, 2), vec![2, 0]);
        assert_eq!(exps(5, 3), vec![1, 1, 0]);
        assert_eq!(exps(5, 5), vec![0, 0, 0, 0, 0]);
        assert!(matches!(split_to_terms(&bi(5), 1), Err(Error::Range(_))));
        assert!(matches!(split_to_terms(&bi(5), 6), Err(Error::Range(_))));
    }

    #[test]
    fn split_matches_one_at_a_time() {
        for a in 1u64..300 {
            for j in u64::from(a.count_ones())..=a.min(40) {
                // reference: split the largest splittable power once per step
                let mut terms: Vec<u64> = (0..64).filter(|i| a >> i & 1 == 1).collect();
                while (terms.len() as u64) < j {
                    terms.sort_unstable();
                    let c = terms.pop().unwrap();
                    terms.extend([c - 1, c - 1]);
                }
                terms.sort_unstable_by(|x, y| y.cmp(x));
                let got: Vec<u64> = split_to_terms(&bi(a), j).unwrap().exponents_desc().collect();
                assert_eq!(got, terms, "a={a} j={j}");
                assert_eq!(split_to_terms(&bi(a), j).unwrap().sum(), bi(a));
            }
        }
    }

    #[test]
    fn represent_examples() {
        let r = dyadic_represent(&bi(5), &bi(3)).unwrap();
        assert_eq!(r.members, vec![gp(0, 0), gp(2, 1)]);
        let r = dyadic_represent(&bi(2), &bi(2)).unwrap();
        assert_eq!(r.members, vec![gp(1, 1)]);
        let r = dyadic_represent(&bi(3), &bi(7)).unwrap();
        assert_eq!(r.members, vec![gp(0, 0), gp(0, 1), gp(0, 2)]);
        assert!(r.is_valid());
        assert!(matches!(dyadic_represent(&bi(8), &bi(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn represent_huge_coordinates() {
        // a = 2^100 + 2^3, b = 101: 2^101 > a so (a, b) is outside E
        let a = &BitInt::pow2(100) + &bi(8);
        let b = bi(101);
        let r = dyadic_represent(&a, &b).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.members.len() as u64, b.popcount().max(a.popcount()));
    }

    #[test]
    fn empty_square_examples() {
        let s = empty_square(1).unwrap();
        assert_eq!(s.x0, bi(12));
        assert!(s.guaranteed);
        assert_eq!(s.verify_with_oracle(1 << 22).unwrap(), Some(true));
        assert_eq!(empty_square(2).unwrap().x0, bi(56));
        assert_eq!(empty_square(6).unwrap().x0, bi(16256));
        assert_eq!(empty_square(3).unwrap().x0.positions().collect::<Vec<_>>(), vec![4, 5, 6, 7]);
        assert!(empty_square(0).is_err());
        let big = empty_square(40).unwrap();
        assert!(big.guaranteed);
        assert_eq!(big.verify_with_oracle(1 << 22).unwrap(), None);
    }

    #[test]
    fn dense_square_small_cases() {
        let r3 = dense_square_count(3).unwrap();
        assert_eq!(r3.formula_count, 21);
        assert_eq!(r3.enumerated_count, 21);
        let terms: Vec<u128> = r3.rows.iter().map(|row| row.term).collect();
        assert_eq!(terms, vec![4, 9, 6, 2]);
        assert!(r3.all_certified);

        let r1 = dense_square_count(1).unwrap();
        assert_eq!(r1.formula_count, 3);
        assert_eq!(r1.enumerated_count, 3);

        let r6 = dense_square_count(6).unwrap();
        assert!(r6.enumerated_count >= 192);
        assert!(r6.meets_chain_bound);
        assert!(dense_square_count(0).is_err());
    }

    #[test]
    fn map_levels() {
        let m = exceptional_map(&Region::parse_box("1,1,16,16").unwrap(), 1 << 22).unwrap();
        assert_eq!(m.outside_e_unreachable, 0);
        assert_eq!(m.outside_e + m.in_e_reachable + m.in_e_unreachable, 256);
        // (8,1) is a grid point: in E and reachable
        assert_eq!(m.image.get(7, 15), LEVEL_E_REACHABLE);
        // (13,2) from the D=1 empty square: in E, unreachable
        assert_eq!(m.image.get(12, 14), LEVEL_E_UNREACHABLE);
        assert_eq!(m.image.get(4, 12), LEVEL_OUTSIDE_E);
    }
}

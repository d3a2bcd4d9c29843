//! Thin complete generator sets for simplicial lattice cones.
//!
//! For linearly independent `v_1..v_k` (none on a coordinate axis) the set
//! `X = S ∪ X_1 ∪ ... ∪ X_k`, where `S` holds the integer points of the
//! simplex spanned by `k·v_1, ..., k·v_k` and `X_i = {2^j v_i}`, has every
//! integer point of the cone as a sum of distinct elements while `X(n)` grows
//! like `k log2 n`.
//!
//! A cone point is decomposed by repeatedly subtracting some `v_l` (chosen by
//! the face covering rule) until it lands in the base simplex, and then
//! folding the subtracted copies back in with binary carries so that no
//! element is used twice. All geometry is exact: barycentric coordinates are
//! integer numerators over the (positive) determinant of `[v_1 ... v_k]`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_counting_profile, GeneratorSet, Point, Region, Representation};
use crate::oracle::fs_enumerate;

pub type Rational = Ratio<i128>;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ConeSpecJson {
    v: Vec<Point>,
}

/// Generators `v_1..v_k` of a simplicial cone in ℕᵏ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConeSpecJson", into = "ConeSpecJson")]
pub struct ConeSpec {
    v: Vec<Point>,
    /// `adj / det` is the inverse of the matrix whose columns are the `v_i`.
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl TryFrom<ConeSpecJson> for ConeSpec {
    type Error = Error;

    fn try_from(raw: ConeSpecJson) -> Result<Self> {
        ConeSpec::new(raw.v)
    }
}

impl From<ConeSpec> for ConeSpecJson {
    fn from(spec: ConeSpec) -> Self {
        ConeSpecJson { v: spec.v }
    }
}

/// Integer barycentric numerators over a positive common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Scaled {
    num: Vec<i128>,
    den: i128,
}

impl Scaled {
    fn nonneg(&self) -> bool {
        self.num.iter().all(|&a| a >= 0)
    }

    fn sum_num(&self) -> i128 {
        self.num.iter().sum()
    }

    /// `sum <= bound`, exactly.
    fn sum_le(&self, bound: i128) -> bool {
        self.sum_num() <= bound * self.den
    }

    fn ceil_sum(&self) -> i128 {
        Integer::div_ceil(&self.sum_num(), &self.den)
    }
}

/// Exact coordinates `a` with `p = Σ a_i v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarycentricCoords {
    pub a: Vec<Rational>,
}

impl BarycentricCoords {
    pub fn sum(&self) -> Rational {
        self.a.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Membership in the cone `U`.
    pub fn in_cone(&self) -> bool {
        self.a.iter().all(|x| !x.is_negative())
    }

    /// Membership in the simplex spanned by `scale·v_1, ..., scale·v_k`.
    pub fn in_simplex(&self, scale: &Rational) -> bool {
        self.in_cone() && self.sum() <= *scale
    }
}

impl ConeSpec {
    pub fn new(v: Vec<Point>) -> Result<Self> {
        let k = v.len();
        if k == 0 {
            return Err(Error::validation("a cone needs at least one generator"));
        }
        for (i, vi) in v.iter().enumerate() {
            vi.check_dim(k)?;
            if vi.support_size() < 2 {
                return Err(Error::validation(format!(
                    "generator v{} = {vi} is parallel to a coordinate axis",
                    i + 1
                )));
            }
        }
        // columns are the generators
        let m: Vec<Vec<BigInt>> = (0..k)
            .map(|r| (0..k).map(|c| BigInt::from(v[c].coords()[r])).collect())
            .collect();
        let det = bareiss_det(m.clone());
        if det.is_zero() {
            return Err(Error::validation("cone generators are linearly dependent"));
        }
        let sign = if det.is_negative() { -1 } else { 1 };
        let mut adj = vec![vec![0i128; k]; k];
        for (i, row) in adj.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let cof = if k == 1 {
                    BigInt::one()
                } else {
                    bareiss_det(minor(&m, j, i))
                };
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                *entry = to_i128(&(cof * sign))?;
            }
        }
        let det = to_i128(&(det * sign))?;
        Ok(ConeSpec { v, adj, det })
    }

    /// Parses `"1,2;2,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let v = s
            .split(';')
            .map(str::parse::<Point>)
            .collect::<Result<Vec<_>>>()?;
        ConeSpec::new(v)
    }

    pub fn k(&self) -> usize {
        self.v.len()
    }

    pub fn generators(&self) -> &[Point] {
        &self.v
    }

    /// Absolute value of `det[v_1 ... v_k]`.
    pub fn determinant(&self) -> i128 {
        self.det
    }

    fn scaled(&self, p: &Point) -> Result<Scaled> {
        p.check_dim(self.k())?;
        let mut num = Vec::with_capacity(self.k());
        for row in &self.adj {
            let mut acc = 0i128;
            for (a, &c) in row.iter().zip(p.coords()) {
                let c = i128::from(c);
                acc = a
                    .checked_mul(c)
                    .and_then(|t| acc.checked_add(t))
                    .ok_or_else(|| Error::overflow(format!("barycentric coordinates of {p}")))?;
            }
            num.push(acc);
        }
        Ok(Scaled { num, den: self.det })
    }

    pub fn barycentric(&self, p: &Point) -> Result<BarycentricCoords> {
        let s = self.scaled(p)?;
        Ok(BarycentricCoords {
            a: s.num.iter().map(|&n| Rational::new(n, s.den)).collect(),
        })
    }

    /// Barycentric coordinates of a rational point.
    pub fn barycentric_rational(&self, p: &[Rational]) -> Result<BarycentricCoords> {
        if p.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: p.len(),
            });
        }
        let det = Rational::from_integer(self.det);
        let a = self
            .adj
            .iter()
            .map(|row| {
                row.iter()
                    .zip(p)
                    .fold(Rational::zero(), |acc, (&c, x)| acc + x * c)
                    / det
            })
            .collect();
        Ok(BarycentricCoords { a })
    }

    /// `Σ a_i v_i` as a rational point.
    pub fn point_from_barycentric(&self, a: &[Rational]) -> Vec<Rational> {
        (0..self.k())
            .map(|r| {
                a.iter()
                    .zip(&self.v)
                    .fold(Rational::zero(), |acc, (ai, vi)| {
                        acc + ai * i128::from(vi.coords()[r])
                    })
            })
            .collect()
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        Ok(self.scaled(p)?.nonneg())
    }

    /// Index of the simplex translate covering the rational point `f` of the
    /// unit face (barycentric sum exactly 1).
    pub fn face_cover_index(&self, f: &[Rational], lambda: &Rational) -> Result<usize> {
        face_cover_index(&self.barycentric_rational(f)?.a, lambda)
    }

    /// For `s` in the simplex scaled by `1 + λ` but outside the unit simplex,
    /// the index `l` with `s - λ v_l` back in the unit simplex.
    pub fn simplex_cover_index(&self, s: &[Rational], lambda: &Rational) -> Result<usize> {
        let b = self.barycentric_rational(s)?;
        let total = b.sum();
        if !b.in_cone() || total <= Rational::one() || total > Rational::one() + lambda {
            return Err(Error::Precondition(format!(
                "point must lie in the (1+λ)-simplex outside the unit simplex (sum {total})"
            )));
        }
        let face: Vec<Rational> = b.a.iter().map(|x| x / total).collect();
        face_cover_index(&face, lambda)
    }

    /// Peels one generator off `v`, a point of layer `V_{i+1} \ V_i`:
    /// returns `(l, v - v_l)` with the remainder in `U_i`.
    pub fn peel(&self, layer: u64, v: &Point) -> Result<(usize, Point)> {
        let s = self.scaled(v)?;
        if !s.nonneg() {
            return Err(Error::domain(format!("{v} is not in the cone")));
        }
        let level = self.k() as i128 + i128::from(layer);
        if s.sum_le(level) {
            return Err(Error::Precondition(format!(
                "{v} already lies in layer {layer}; nothing to peel"
            )));
        }
        if !s.sum_le(level + 1) {
            return Err(Error::Precondition(format!(
                "{v} lies beyond layer {}",
                layer + 1
            )));
        }
        let total = s.sum_num();
        let face: Vec<Rational> = s.num.iter().map(|&n| Rational::new(n, total)).collect();
        let l = face_cover_index(&face, &Rational::new(1, level))?;
        let rest = v.checked_sub(&self.v[l]).ok_or_else(|| {
            Error::domain(format!("peeling v{} from {v} left the orthant", l + 1))
        })?;
        Ok((l, rest))
    }

    /// Ray depth that comfortably covers decompositions of `target`.
    pub fn default_depth(&self, target: &Point) -> u32 {
        let min_coord = self
            .v
            .iter()
            .flat_map(|p| p.coords().iter().copied())
            .filter(|&c| c > 0)
            .min()
            .unwrap_or(1);
        let ratio = target.max_coord().div_ceil(min_coord).max(1);
        ceil_log2(ratio) + 2
    }
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::overflow("cone generator matrix entries are too large"))
}

fn minor(m: &[Vec<BigInt>], row: usize, col: usize) -> Vec<Vec<BigInt>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != row)
        .map(|(_, line)| {
            line.iter()
                .enumerate()
                .filter(|&(c, _)| c != col)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Smallest `l` with `a_l >= λ` for a point of the unit face.
///
/// Requires `0 < λ <= 1/k`, all `a_i >= 0` and `Σ a_i = 1`; pigeonhole then
/// guarantees such an `l` exists and `a - λ e_l` stays in the unit simplex.
pub fn face_cover_index(a: &[Rational], lambda: &Rational) -> Result<usize> {
    let k = a.len() as i128;
    if k == 0 {
        return Err(Error::validation("empty coordinate vector"));
    }
    if !lambda.is_positive() || *lambda > Rational::new(1, k) {
        return Err(Error::Precondition(format!(
            "λ = {lambda} must lie in (0, 1/{k}]"
        )));
    }
    let total = a.iter().fold(Rational::zero(), |acc, x| acc + x);
    if a.iter().any(Signed::is_negative) || !total.is_one() {
        return Err(Error::Precondition(format!(
            "point is not on the unit face (coordinate sum {total})"
        )));
    }
    a.iter()
        .position(|x| x >= lambda)
        .ok_or_else(|| Error::domain("no face coordinate reaches λ"))
}

/// `S ∪ X_1 ∪ ... ∪ X_k` with rays truncated at `2^depth v_i`.
#[derive(Clone, Debug, Serialize)]
pub struct ThinGeneratorSet {
    spec: ConeSpec,
    depth: u32,
    /// Nonzero integer points of the simplex spanned by `k·v_i`.
    simplex: GeneratorSet,
    /// Full dyadic rays `v_i, 2v_i, ..., 2^depth v_i`.
    rays: Vec<Vec<Point>>,
    /// The union as a set; multiples that already lie in `S` appear once.
    elements: GeneratorSet,
}

impl ThinGeneratorSet {
    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn simplex(&self) -> &GeneratorSet {
        &self.simplex
    }

    pub fn ray(&self, i: usize) -> &[Point] {
        &self.rays[i]
    }

    /// Ray elements that are not already in `S`.
    pub fn ray_exclusive(&self, i: usize) -> impl Iterator<Item = &Point> {
        self.rays[i].iter().filter(|p| !self.simplex.contains(p))
    }

    pub fn elements(&self) -> &GeneratorSet {
        &self.elements
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.elements.contains(p)
    }
}

pub fn build_thin_generators(spec: &ConeSpec, depth: u32) -> Result<ThinGeneratorSet> {
    let k = spec.k();
    let kk = k as u64;
    let hi: Vec<u64> = (0..k)
        .map(|r| {
            let m = spec.v.iter().map(|p| p.coords()[r]).max().unwrap_or(0);
            m.checked_mul(kk)
                .ok_or_else(|| Error::overflow("simplex bounding box"))
        })
        .collect::<Result<_>>()?;
    let bbox = Region::boxed(Point::zero(k), Point::new(hi)?)?;
    let mut simplex = Vec::new();
    for p in bbox.points()? {
        if p.is_zero() {
            continue;
        }
        let s = spec.scaled(&p)?;
        if s.nonneg() && s.sum_le(k as i128) {
            simplex.push(p);
        }
    }
    let simplex = GeneratorSet::new(simplex)?;
    let rays = spec
        .v
        .iter()
        .map(|v| {
            (0..=depth)
                .map(|j| {
                    1u64.checked_shl(j)
                        .ok_or_else(|| Error::overflow(format!("2^{j}")))
                        .and_then(|f| v.scale(f))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let elements = GeneratorSet::new(
        simplex
            .iter()
            .cloned()
            .chain(rays.iter().flatten().cloned()),
    )?;
    Ok(ThinGeneratorSet {
        spec: spec.clone(),
        depth,
        simplex,
        rays,
        elements,
    })
}

/// Writes a cone point as a sum of distinct elements of `x`.
pub fn decompose(x: &ThinGeneratorSet, v: &Point) -> Result<Representation> {
    let spec = &x.spec;
    let k = spec.k() as i128;
    v.check_dim(spec.k())?;
    if v.is_zero() {
        return Err(Error::domain("the origin is the empty sum; nothing to decompose"));
    }
    if !spec.contains(v)? {
        return Err(Error::domain(format!("{v} is not in the cone")));
    }

    let mut peeled = Vec::new();
    let mut rest = v.clone();
    loop {
        let s = spec.scaled(&rest)?;
        if s.sum_le(k) {
            break;
        }
        let layer = (s.ceil_sum() - k - 1) as u64;
        let (l, next) = spec.peel(layer, &rest)?;
        peeled.push(l);
        rest = next;
    }

    // Each entry remembers its ray position so a missing power can be
    // reported as a depth shortfall; `None` marks the simplex seed.
    let mut expr: BTreeMap<Point, Option<(usize, u32)>> = BTreeMap::new();
    if !rest.is_zero() {
        if !x.simplex.contains(&rest) {
            return Err(Error::domain(format!(
                "residual {rest} is missing from the simplex seed"
            )));
        }
        expr.insert(rest, None);
    }
    for &l in peeled.iter().rev() {
        let mut p = spec.v[l].clone();
        let mut j = 0u32;
        while expr.remove(&p).is_some() {
            p = p.scale(2)?;
            j += 1;
        }
        expr.insert(p, Some((l, j)));
    }

    let mut required = None;
    for (p, tag) in &expr {
        if x.contains(p) {
            continue;
        }
        match tag {
            Some((_, j)) => required = required.max(Some(*j)),
            None => unreachable!("the seed was checked against S"),
        }
    }
    if let Some(required) = required {
        return Err(Error::Depth {
            depth: x.depth,
            required,
        });
    }
    let rep = Representation::new(v.clone(), expr.into_keys().collect());
    debug_assert!(rep.validate().unwrap_or(false));
    Ok(rep)
}

/// Decomposes with a generator set of the requested (or default) depth,
/// rebuilding once with a deeper set if the carries run past the rays.
pub fn decompose_auto(
    spec: &ConeSpec,
    v: &Point,
    depth: Option<u32>,
) -> Result<(ThinGeneratorSet, Representation)> {
    let x = build_thin_generators(spec, depth.unwrap_or_else(|| spec.default_depth(v)))?;
    match decompose(&x, v) {
        Err(Error::Depth { required, .. }) => {
            let x = build_thin_generators(spec, required)?;
            let rep = decompose(&x, v)?;
            Ok((x, rep))
        }
        other => other.map(|rep| (x, rep)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThinnessReport {
    pub n: u64,
    /// Elements of `X` in `[1, n]^k`.
    pub count: u64,
    pub simplex_size: u64,
    pub k: u64,
    /// `|S| + k log2 n + k`.
    pub bound: f64,
    pub pass: bool,
    /// Integer cone points in `[1, n]^k`, only computed for small cubes.
    pub cone_points: Option<u64>,
}

const CONE_CENSUS_LIMIT: u128 = 1 << 20;

pub fn thinness_report(x: &ThinGeneratorSet, n: u64) -> Result<ThinnessReport> {
    let profile = lattice_counting_profile(x.elements.iter(), n)?;
    let k = x.spec.k() as u64;
    let simplex_size = x.simplex.len() as u64;
    // count <= |S| + k + k log2 n  <=>  2^(count - |S| - k) <= n^k
    let pass = match profile.count.checked_sub(simplex_size + k) {
        None | Some(0) => true,
        Some(excess) => {
            BigUint::one() << excess as usize <= BigUint::from(n).pow(k as u32)
        }
    };
    let cube = u128::from(n).checked_pow(k as u32).unwrap_or(u128::MAX);
    let cone_points = if cube <= CONE_CENSUS_LIMIT {
        let region = Region::boxed(Point::new(vec![1; k as usize])?, Point::new(vec![n; k as usize])?)?;
        let mut c = 0;
        for p in region.points()? {
            if x.spec.contains(&p)? {
                c += 1;
            }
        }
        Some(c)
    } else {
        None
    };
    Ok(ThinnessReport {
        n,
        count: profile.count,
        simplex_size,
        k,
        bound: simplex_size as f64 + k as f64 * (n as f64).log2() + k as f64,
        pass,
        cone_points,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeFailure {
    pub point: Point,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleAgreement {
    pub max: u64,
    pub generators: usize,
    pub points_compared: u64,
    pub cone_points: u64,
    pub disagreements: Vec<Point>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeVerifyReport {
    pub spec: ConeSpec,
    pub max: u64,
    pub depth: u32,
    pub points_checked: u64,
    pub failures: Vec<ConeFailure>,
    pub oracle: Option<OracleAgreement>,
    pub pass: bool,
}

/// Decomposes every nonzero cone point of `[0, max]^k` and, if requested,
/// checks `FS(X) ∩ [0, oracle_max]^k` against the cone by brute force.
pub fn verify_cone(
    spec: &ConeSpec,
    max: u64,
    oracle_max: Option<u64>,
    depth: Option<u32>,
    cap: u64,
) -> Result<ConeVerifyReport> {
    let k = spec.k();
    let corner = Point::new(vec![max; k])?;
    let x = build_thin_generators(spec, depth.unwrap_or_else(|| spec.default_depth(&corner)))?;
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in Region::boxed(Point::zero(k), corner)?.points()? {
        if p.is_zero() || !spec.contains(&p)? {
            continue;
        }
        checked += 1;
        let outcome = decompose(&x, &p).and_then(|rep| {
            if !rep.validate()? {
                return Err(Error::domain("representation does not validate"));
            }
            if let Some(bad) = rep.members.iter().find(|m| !x.contains(m)) {
                return Err(Error::domain(format!("member {bad} is not in X")));
            }
            Ok(())
        });
        if let Err(e) = outcome {
            failures.push(ConeFailure {
                point: p,
                reason: e.to_string(),
            });
        }
    }

    let oracle = match oracle_max {
        None => None,
        Some(m) => Some(oracle_agreement(&x, m, cap)?),
    };
    let pass = failures.is_empty()
        && oracle
            .as_ref()
            .is_none_or(|o| o.disagreements.is_empty());
    Ok(ConeVerifyReport {
        spec: spec.clone(),
        max,
        depth: x.depth,
        points_checked: checked,
        failures,
        oracle,
        pass,
    })
}

/// Compares brute-force `FS(X)` with the cone on `[0, max]^k`; the two sets
/// must coincide exactly (every sum of cone elements stays in the cone).
pub fn oracle_agreement(x: &ThinGeneratorSet, max: u64, cap: u64) -> Result<OracleAgreement> {
    let k = x.spec.k();
    let region = Region::boxed(Point::zero(k), Point::new(vec![max; k])?)?;
    let reach = fs_enumerate(&x.elements, &region, cap)?;
    let mut disagreements = Vec::new();
    let mut compared = 0;
    let mut cone_points = 0;
    for p in region.points()? {
        compared += 1;
        let in_cone = x.spec.contains(&p)?;
        cone_points += u64::from(in_cone);
        if in_cone != reach.contains(&p) {
            disagreements.push(p);
        }
    }
    Ok(OracleAgreement {
        max,
        generators: reach.generators().len(),
        points_compared: compared,
        cone_points,
        disagreements,
    })
}

/// Checks the face covering rule on the face point with barycentric weights
/// proportional to `weights`, at `λ = 1/k`.
pub fn check_face_cover(spec: &ConeSpec, weights: &[i128]) -> Result<bool> {
    let total: i128 = weights.iter().sum();
    let a: Vec<Rational> = weights.iter().map(|&w| Rational::new(w, total)).collect();
    let f = spec.point_from_barycentric(&a);
    let lambda = Rational::new(1, spec.k() as i128);
    let l = spec.face_cover_index(&f, &lambda)?;
    let shifted: Vec<Rational> = f
        .iter()
        .zip(spec.v[l].coords())
        .map(|(x, &c)| x - lambda * i128::from(c))
        .collect();
    Ok(spec
        .barycentric_rational(&shifted)?
        .in_simplex(&Rational::one()))
}

/// Checks the simplex covering rule: `s = t·f` with `f` on the face given by
/// `weights` and `1 < t <= 1 + λ` must satisfy `s - λ v_l ∈ S`.
pub fn check_simplex_cover(
    spec: &ConeSpec,
    weights: &[i128],
    lambda: Rational,
    t: Rational,
) -> Result<bool> {
    let total: i128 = weights.iter().sum();
    let b: Vec<Rational> = weights.iter().map(|&w| Rational::new(w, total) * t).collect();
    let s = spec.point_from_barycentric(&b);
    let l = spec.simplex_cover_index(&s, &lambda)?;
    let shifted: Vec<Rational> = s
        .iter()
        .zip(spec.v[l].coords())
        .map(|(x, &c)| x - lambda * i128::from(c))
        .collect();
    Ok(spec
        .barycentric_rational(&shifted)?
        .in_simplex(&Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn spec() -> ConeSpec {
        ConeSpec::parse("1,2;2,1").unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ConeSpec::parse("1,0;1,1").is_err());
        assert!(ConeSpec::parse("1,2;2,4").is_err());
        assert!(ConeSpec::parse("1,2").is_err());
        assert!(ConeSpec::parse("3").is_err());
        let s = ConeSpec::parse("1,1,0;0,1,1;1,0,1").unwrap();
        assert_eq!(s.determinant(), 2);
        let json = serde_json::to_string(&spec()).unwrap();
        assert_eq!(json, r#"{"v":[[1,2],[2,1]]}"#);
        assert_eq!(serde_json::from_str::<ConeSpec>(&json).unwrap(), spec());
        assert!(serde_json::from_str::<ConeSpec>(r#"{"v":[[1,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn barycentric_examples() {
        let s = spec();
        assert_eq!(s.barycentric(&pt(&[3, 3])).unwrap().a, vec![r(1, 1), r(1, 1)]);
        assert_eq!(s.barycentric(&pt(&[1, 1])).unwrap().a, vec![r(1, 3), r(1, 3)]);
        assert_eq!(s.barycentric(&pt(&[0, 0])).unwrap().a, vec![r(0, 1), r(0, 1)]);
        assert_eq!(s.barycentric(&pt(&[5, 1])).unwrap().a, vec![r(-1, 1), r(3, 1)]);
    }

    #[test]
    fn barycentric_reconstructs() {
        let s = ConeSpec::parse("2,1,1;1,3,0;0,1,4").unwrap();
        for p in Region::parse_box("0,0,0,4,4,4").unwrap().points().unwrap() {
            let a = s.barycentric(&p).unwrap();
            let back = s.point_from_barycentric(&a.a);
            let expect: Vec<Rational> = p.coords().iter().map(|&c| r(c as i128, 1)).collect();
            assert_eq!(back, expect);
        }
    }

    #[test]
    fn simplex_seed() {
        let x = build_thin_generators(&spec(), 0).unwrap();
        for p in [[1, 1], [2, 4], [4, 2], [3, 3], [2, 2]] {
            assert!(x.simplex().contains(&pt(&p)), "{p:?}");
        }
        assert!(!x.simplex().contains(&pt(&[5, 1])));
        assert!(!x.simplex().contains(&pt(&[0, 0])));
        for p in x.simplex() {
            let a = spec().barycentric(p).unwrap();
            assert!(a.in_simplex(&r(2, 1)));
        }
        assert_eq!(x.ray(0), &[pt(&[1, 2])]);
        assert_eq!(x.ray(1), &[pt(&[2, 1])]);

        let x = build_thin_generators(&spec(), 3).unwrap();
        assert_eq!(x.ray(0), &[pt(&[1, 2]), pt(&[2, 4]), pt(&[4, 8]), pt(&[8, 16])]);
        let exclusive: Vec<_> = x.ray_exclusive(0).cloned().collect();
        assert_eq!(exclusive, vec![pt(&[4, 8]), pt(&[8, 16])]);
    }

    #[test]
    fn simplex_seed_matches_bounding_box_census() {
        // Independent census: solve each candidate with plain fractions.
        let x = build_thin_generators(&spec(), 0).unwrap();
        let mut expect = Vec::new();
        for a in 0..=6i64 {
            for b in 0..=6i64 {
                // a = s + 2t, b = 2s + t  =>  s = (2b - a)/3, t = (2a - b)/3
                let (s3, t3) = (2 * b - a, 2 * a - b);
                if (a, b) != (0, 0) && s3 >= 0 && t3 >= 0 && s3 + t3 <= 6 {
                    expect.push(pt(&[a as u64, b as u64]));
                }
            }
        }
        assert_eq!(x.simplex().as_slice(), expect.as_slice());
    }

    #[test]
    fn face_cover_examples() {
        assert_eq!(face_cover_index(&[r(1, 2), r(1, 2)], &r(1, 2)).unwrap(), 0);
        assert_eq!(face_cover_index(&[r(1, 4), r(3, 4)], &r(1, 2)).unwrap(), 1);
        assert_eq!(face_cover_index(&[r(0, 1), r(0, 1), r(1, 1)], &r(1, 3)).unwrap(), 2);
        assert!(matches!(
            face_cover_index(&[r(1, 2), r(1, 2)], &r(2, 3)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            face_cover_index(&[r(1, 2), r(1, 3)], &r(1, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn peel_examples() {
        let s = spec();
        // 9·v1 has barycentric sum 9, i.e. layer i = 6
        assert_eq!(s.peel(6, &pt(&[9, 18])).unwrap(), (0, pt(&[8, 16])));
        assert!(matches!(s.peel(0, &pt(&[3, 3])), Err(Error::Precondition(_))));
        // 3v1 + 2v2, sum 5, layer 2
        let (l, rest) = s.peel(2, &pt(&[7, 8])).unwrap();
        assert_eq!(l, 0);
        let a = s.barycentric(&rest).unwrap();
        assert!(a.in_cone());
        assert_eq!(a.sum(), r(4, 1));
        assert!(matches!(s.peel(1, &pt(&[7, 8])), Err(Error::Precondition(_))));
        assert!(matches!(s.peel(0, &pt(&[5, 1])), Err(Error::Domain(_))));
    }

    #[test]
    fn decompose_examples() {
        let s = spec();
        let x = build_thin_generators(&s, 6).unwrap();
        assert_eq!(decompose(&x, &pt(&[1, 2])).unwrap().members, vec![pt(&[1, 2])]);
        assert_eq!(decompose(&x, &pt(&[3, 3])).unwrap().members, vec![pt(&[3, 3])]);
        let rep = decompose(&x, &pt(&[9, 18])).unwrap();
        assert!(rep.validate().unwrap());
        assert!(rep.members.iter().all(|m| x.contains(m)));
        // seed 2v1 plus seven peeled v1: 2 + 7 = 9 = 8 + 1
        assert_eq!(rep.members, vec![pt(&[1, 2]), pt(&[8, 16])]);
        assert!(matches!(decompose(&x, &pt(&[0, 0])), Err(Error::Domain(_))));
        assert!(matches!(decompose(&x, &pt(&[5, 1])), Err(Error::Domain(_))));
    }

    #[test]
    fn decompose_reports_depth() {
        let s = spec();
        let x = build_thin_generators(&s, 1).unwrap();
        match decompose(&x, &pt(&[40, 80])) {
            Err(Error::Depth { depth: 1, required }) => assert_eq!(required, 5),
            other => panic!("expected a depth error, got {other:?}"),
        }
        let (x, rep) = decompose_auto(&s, &pt(&[40, 80]), Some(1)).unwrap();
        assert_eq!(x.depth(), 5);
        assert!(rep.validate().unwrap());
    }

    #[test]
    fn thinness_examples() {
        let x = build_thin_generators(&spec(), 10).unwrap();
        let rep = thinness_report(&x, 16).unwrap();
        assert!(rep.pass);
        assert!(rep.count as f64 <= rep.simplex_size as f64 + 2.0 * 4.0 + 2.0);
        let one = thinness_report(&x, 1).unwrap();
        assert_eq!(one.count, u64::from(x.elements().contains(&pt(&[1, 1]))));
        // each doubling of n adds at most one power per ray once past S
        let mut prev = thinness_report(&x, 8).unwrap().count;
        for e in 4..=10 {
            let c = thinness_report(&x, 1 << e).unwrap().count;
            assert!(c <= prev + 2);
            prev = c;
        }
    }

    #[test]
    fn sampled_cover_checks_hold_at_boundary() {
        let s = spec();
        assert!(check_face_cover(&s, &[1, 1]).unwrap());
        assert!(check_face_cover(&s, &[0, 1]).unwrap());
        assert!(check_simplex_cover(&s, &[1, 1], r(1, 2), r(3, 2)).unwrap());
        assert!(check_simplex_cover(&s, &[3, 1], r(1, 3), r(4, 3)).unwrap());
        assert!(matches!(
            check_simplex_cover(&s, &[1, 1], r(1, 2), r(1, 1)),
            Err(Error::Precondition(_))
        ));
    }
}

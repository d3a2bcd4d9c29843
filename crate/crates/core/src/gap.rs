//! Structure inside `FS(A × B)` for dense one-dimensional `A`.
//!
//! Two constructions. A proper homogeneous GAP is assembled stage by stage
//! from popular pair sums on disjoint slices of `A`. A dense rectangle comes
//! from an arithmetic progression in `FS(A₁)`, a shift that forces many terms
//! per representation, and iterated sumsets of `B ∩ [1, T]` stacked above it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    check_ascending_positive, counting_profile, validate_representation, GeneratorSet, Point,
    Region, Representation,
};
use crate::oracle::{fs_enumerate, fs_membership, reachable_sums, trm_table};

/// Pair sums `a + a' = x` with `a < a'`, grouped by `x`.
fn pair_sum_counts(values: &[u64]) -> BTreeMap<u64, usize> {
    let mut counts = BTreeMap::new();
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            *counts.entry(a + b).or_insert(0) += 1;
        }
    }
    counts
}

fn pairs_at(values: &[u64], x: u64) -> Vec<(u64, u64)> {
    values
        .iter()
        .take_while(|&&a| 2 * a < x)
        .filter(|&&a| values.binary_search(&(x - a)).is_ok())
        .map(|&a| (a, x - a))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PopularSum {
    pub x: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl PopularSum {
    pub fn r(&self) -> usize {
        self.pairs.len()
    }
}

/// Most popular pair sum strictly above `threshold`; ties go to the smallest.
fn popular_sum_above(values: &[u64], threshold: u64) -> Option<PopularSum> {
    let mut best: Option<(u64, usize)> = None;
    for (x, r) in pair_sum_counts(values).range(threshold + 1..) {
        if best.is_none_or(|(_, br)| *r > br) {
            best = Some((*x, *r));
        }
    }
    best.map(|(x, _)| PopularSum {
        x,
        pairs: pairs_at(values, x),
    })
}

pub fn popular_sum(values: &[u64]) -> Result<PopularSum> {
    check_ascending_positive(values)?;
    if values.len() < 2 {
        return Err(Error::validation("popular sum needs at least two elements"));
    }
    Ok(popular_sum_above(values, 0).expect("at least one pair"))
}

#[derive(Clone, Debug, Serialize)]
pub struct CollisionCertificate {
    pub stage: usize,
    /// The slice of `A` this stage draws from.
    pub slice: Vec<u64>,
    /// `d_i` must exceed this on the first coordinate.
    pub threshold: u64,
    pub x: u64,
    pub pairs: Vec<(u64, u64)>,
    /// `x > 2 r(x)`.
    pub exceeds_twice_r: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapElement {
    /// Multipliers `l_i`, each in `1..=L_i`.
    pub l: Vec<u64>,
    pub point: Point,
    pub representation: Representation,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapDescription {
    pub dimension: usize,
    pub differences: Vec<Point>,
    pub lengths: Vec<u64>,
    pub elements: Vec<GapElement>,
    pub certificates: Vec<CollisionCertificate>,
    /// `d_{i+1} > Σ_{j<=i} L_j d_j` on the first coordinate.
    pub separated: bool,
    /// All `Π L_i` element points are pairwise distinct.
    pub proper: bool,
    pub representations_valid: bool,
}

impl GapDescription {
    pub fn y_generators(a: &[u64], b: &[u64]) -> Result<GeneratorSet> {
        GeneratorSet::new(
            a.iter()
                .flat_map(|&x| b.iter().map(move |&y| Point::new(vec![x, y]).expect("2-D"))),
        )
    }

    /// Independent membership check of every element point in `FS(A × B)`.
    pub fn confirm_with_oracle(&self, a: &[u64], b: &[u64], cap: u64) -> Result<Vec<bool>> {
        let y = Self::y_generators(a, b)?;
        self.elements
            .iter()
            .map(|e| Ok(fs_membership(&y, &e.point, cap)?.is_some()))
            .collect()
    }
}

fn contiguous_slices(values: &[u64], parts: usize) -> Vec<&[u64]> {
    let (base, extra) = (values.len() / parts, values.len() % parts);
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        out.push(&values[start..start + len]);
        start += len;
    }
    out
}

/// Multi-indices `l` with `1 <= l_i <= L_i`, lexicographic.
fn multi_indices(lengths: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &len in lengths {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=len).map(move |l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn build_gap(a: &[u64], b: &[u64], lengths: &[u64]) -> Result<GapDescription> {
    check_ascending_positive(a)?;
    check_ascending_positive(b)?;
    if b.len() < 2 {
        return Err(Error::validation("B needs at least two elements"));
    }
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::validation("lengths must be a nonempty list of positive integers"));
    }
    let dim = lengths.len();
    if a.len() < 2 * dim {
        return Err(Error::validation(format!(
            "A has {} elements; {dim} stages need at least two each",
            a.len()
        )));
    }
    let (b1, b2) = (b[0], b[1]);

    let mut certificates = Vec::with_capacity(dim);
    let mut span = 0u64; // Σ L_j x_j over finished stages
    let mut separated = true;
    for (i, (slice, &len)) in contiguous_slices(a, dim).into_iter().zip(lengths).enumerate() {
        let threshold = span.max(len);
        let best = popular_sum_above(slice, threshold);
        let achieved = best.as_ref().map_or(0, PopularSum::r);
        if (achieved as u64) < len {
            return Err(Error::Density {
                stage: i + 1,
                threshold,
                achieved,
                required: len,
            });
        }
        let best = best.expect("achieved >= len >= 1");
        separated &= best.x > span;
        debug_assert!(best.x > 2 * best.r() as u64);
        span = span
            .checked_add(len.checked_mul(best.x).ok_or_else(|| Error::overflow("GAP span"))?)
            .ok_or_else(|| Error::overflow("GAP span"))?;
        certificates.push(CollisionCertificate {
            stage: i + 1,
            slice: slice.to_vec(),
            threshold,
            exceeds_twice_r: best.x > 2 * best.r() as u64,
            x: best.x,
            pairs: best.pairs,
        });
    }

    let height = b1 + b2;
    let differences: Vec<Point> = certificates
        .iter()
        .map(|c| Point::new(vec![c.x, height]))
        .collect::<Result<_>>()?;

    let mut elements = Vec::new();
    let mut representations_valid = true;
    for l in multi_indices(lengths) {
        let mut members = Vec::new();
        for (cert, &li) in certificates.iter().zip(&l) {
            for &(lo, hi) in &cert.pairs[..li as usize] {
                members.push(Point::new(vec![lo, b1])?);
                members.push(Point::new(vec![hi, b2])?);
            }
        }
        let scaled: Vec<Point> = differences
            .iter()
            .zip(&l)
            .map(|(d, &li)| d.scale(li))
            .collect::<Result<_>>()?;
        let point = Point::sum(2, &scaled)?;
        let representation = Representation::new(point.clone(), members);
        representations_valid &= validate_representation(&representation)?;
        elements.push(GapElement {
            l,
            point,
            representation,
        });
    }
    let distinct: BTreeSet<&Point> = elements.iter().map(|e| &e.point).collect();
    let proper = distinct.len() == elements.len();

    Ok(GapDescription {
        dimension: dim,
        differences,
        lengths: lengths.to_vec(),
        elements,
        certificates,
        separated,
        proper,
        representations_valid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArithmeticProgression {
    pub d: u64,
    pub start: u64,
    /// Reachable run `start, start + d, …` up to the top of the window.
    pub elements: Vec<u64>,
    /// `|run| / top`.
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApSearch {
    pub h: u64,
    /// `H - H/8`; the run must reach every progression term up to here.
    pub top: u64,
    pub d_cap: u64,
    pub reachable_in_window: u64,
    pub found: Option<ArithmeticProgression>,
}

/// Smallest `d <= H/4` with a residue class fully reachable from some start
/// `<= top/2` through `top`. A miss is reported, not raised.
pub fn find_ap_in_fs(a1: &[u64], h: u64, cap: u64) -> Result<ApSearch> {
    check_ascending_positive(a1)?;
    if h < 8 {
        return Err(Error::validation("H must be at least 8"));
    }
    let reach = reachable_sums(a1, h, cap)?;
    let top = h - h / 8;
    let d_cap = h / 4;
    let reachable_in_window = (1..=top).filter(|&n| reach[n as usize]).count() as u64;
    let mut found = None;
    'outer: for d in 1..=d_cap {
        let mut best: Option<u64> = None;
        for c in 1..=d {
            // walk down from the top term of the class to the first gap
            let last = top - (top - c) % d;
            let mut s = last;
            if !reach[s as usize] {
                continue;
            }
            while s >= c + d && reach[(s - d) as usize] {
                s -= d;
            }
            if s <= top / 2 && best.is_none_or(|b| s < b) {
                best = Some(s);
            }
        }
        if let Some(start) = best {
            let elements: Vec<u64> = (start..=top).step_by(d as usize).collect();
            let density = elements.len() as f64 / top as f64;
            found = Some(ArithmeticProgression {
                d,
                start,
                elements,
                density,
            });
            break 'outer;
        }
    }
    Ok(ApSearch {
        h,
        top,
        d_cap,
        reachable_in_window,
        found,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sumset {
    pub q: u64,
    pub elements: Vec<u64>,
    /// `Q|B| - (Q - 1)`.
    pub lower_bound: u64,
}

impl Sumset {
    pub fn size(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn holds(&self) -> bool {
        self.size() >= self.lower_bound
    }

    pub fn tight(&self) -> bool {
        self.size() == self.lower_bound
    }
}

/// `QB = B + … + B` (`Q` copies, values may repeat across copies).
pub fn sumset_iterate(b: &[u64], q: u64) -> Result<Sumset> {
    check_ascending_positive(b)?;
    if b.is_empty() || q == 0 {
        return Err(Error::validation("sumset needs a nonempty set and Q >= 1"));
    }
    let mut acc: BTreeSet<u64> = b.iter().copied().collect();
    for _ in 1..q {
        acc = acc
            .iter()
            .flat_map(|&s| b.iter().map(move |&x| s + x))
            .collect();
    }
    let out = Sumset {
        q,
        elements: acc.into_iter().collect(),
        lower_bound: q * b.len() as u64 - (q - 1),
    };
    assert!(out.holds(), "|QB| >= Q|B| - (Q-1) failed for Q={q}");
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct QxRow {
    pub x: u64,
    pub q_x: u64,
    /// `|Q_x B_T ∩ [1, height]|`.
    pub column_bound: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RectangleReport {
    pub a1: Vec<u64>,
    pub ap: ArithmeticProgression,
    /// `[1, top]` of the AP search window.
    pub interval: (u64, u64),
    pub q: u64,
    pub a_q: Vec<u64>,
    pub shift: u64,
    /// `σ + (I ∩ AP(d))`.
    pub shifted: Vec<u64>,
    /// Horizontal side `[a, b]` of the rectangle.
    pub interval_prime: (u64, u64),
    pub height: u64,
    pub b_t: Vec<u64>,
    pub qx_table: Vec<QxRow>,
    pub sumset_sizes: BTreeMap<u64, u64>,
    /// Every shifted `y` has `trm(y) >= Q + 1`.
    pub trm_shift_ok: bool,
    /// Shifted points with `trm(y) > 2Q`; their sumsets spill above `2QT`.
    pub above_twice_q: u64,
    pub ledger_bound: u64,
    pub rectangle_points: u64,
    pub measured: u64,
    /// `measured / (|R| B(T) / T)`.
    pub ratio: f64,
    pub warnings: Vec<String>,
}

pub fn dense_rectangle(a: &[u64], b: &[u64], t: u64, h: u64, cap: u64) -> Result<RectangleReport> {
    check_ascending_positive(a)?;
    check_ascending_positive(b)?;
    if t == 0 {
        return Err(Error::validation("T must be positive"));
    }
    let b_t: Vec<u64> = b.iter().copied().take_while(|&x| x <= t).collect();
    if b_t.is_empty() {
        return Err(Error::validation("B has no element in [1, T]"));
    }
    let (a1, a2) = a.split_at(a.len().div_ceil(2));
    let search = find_ap_in_fs(a1, h, cap)?;
    let ap = search.found.ok_or_else(|| {
        Error::SearchFailure(format!(
            "no suffix-complete progression in FS(A1) with d <= {} below {}",
            search.d_cap, search.top
        ))
    })?;
    let trm1 = trm_table(a1, search.top, cap)?;
    let q = ap.elements.iter().map(|&x| trm1[x as usize] as u64).max().expect("nonempty run");
    if (a2.len() as u64) < q {
        return Err(Error::Precondition(format!(
            "A \\ A1 has {} elements, the shift needs Q = {q}",
            a2.len()
        )));
    }
    let a_q = a2[..q as usize].to_vec();
    let shift: u64 = a_q.iter().sum();
    let shifted: Vec<u64> = ap.elements.iter().map(|&x| x + shift).collect();
    let (lo, hi) = (shifted[0], *shifted.last().expect("nonempty"));
    let height = 2 * q * t;

    let mut a1q: Vec<u64> = a1.iter().chain(&a_q).copied().collect();
    a1q.sort_unstable();
    let trm_q = trm_table(&a1q, hi, cap)?;
    let mut sumsets: BTreeMap<u64, Sumset> = BTreeMap::new();
    let mut qx_table = Vec::with_capacity(shifted.len());
    let (mut trm_shift_ok, mut above_twice_q, mut ledger_bound) = (true, 0, 0);
    for &x in &shifted {
        let q_x = trm_q[x as usize].max(0) as u64;
        trm_shift_ok &= q_x > q;
        above_twice_q += u64::from(q_x > 2 * q);
        let column_bound = if q_x == 0 {
            0
        } else {
            let s = match sumsets.entry(q_x) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => e.insert(sumset_iterate(&b_t, q_x)?),
            };
            s.elements.iter().filter(|&&y| y <= height).count() as u64
        };
        ledger_bound += column_bound;
        qx_table.push(QxRow { x, q_x, column_bound });
    }

    let region = Region::boxed(Point::new(vec![lo, 1])?, Point::new(vec![hi, height])?)?;
    let measured = fs_enumerate(&GapDescription::y_generators(a, b)?, &region, cap)?.count();
    let rectangle_points = (hi - lo + 1) * height;
    let ratio = measured as f64 / (rectangle_points as f64 * b_t.len() as f64 / t as f64);

    let mut warnings = Vec::new();
    let n = *a.last().expect("nonempty after AP search");
    let profile = counting_profile(a, n)?;
    if (profile.count as f64) <= (n as f64).sqrt() {
        warnings.push(format!("A is sparse: A({n}) = {} <= sqrt({n})", profile.count));
    }
    if above_twice_q > 0 {
        warnings.push(format!("{above_twice_q} columns have trm(y) > 2Q"));
    }

    Ok(RectangleReport {
        a1: a1.to_vec(),
        interval: (1, search.top),
        ap,
        q,
        a_q,
        shift,
        shifted,
        interval_prime: (lo, hi),
        height,
        b_t,
        qx_table,
        sumset_sizes: sumsets.iter().map(|(&k, s)| (k, s.size())).collect(),
        trm_shift_ok,
        above_twice_q,
        ledger_bound,
        rectangle_points,
        measured,
        ratio,
        warnings,
    })
}

/// Five distinct positive squares summing to `n`, largest first.
pub fn five_squares(n: u64) -> Option<[u64; 5]> {
    fn go(rem: u64, below: u64, left: usize, acc: &mut Vec<u64>) -> bool {
        if left == 0 {
            return rem == 0;
        }
        let left64 = left as u64;
        // smallest possible: 1² + … + left²
        if rem < left64 * (left64 + 1) * (2 * left64 + 1) / 6 {
            return false;
        }
        let mut r = below.min(rem.isqrt());
        while r >= left64 {
            // largest possible from r, r-1, …
            let lo = r - left64;
            let max_sum = r * (r + 1) * (2 * r + 1) / 6 - lo * (lo + 1) * (2 * lo + 1) / 6;
            if max_sum < rem {
                return false;
            }
            acc.push(r);
            if go(rem - r * r, r - 1, left - 1, acc) {
                return true;
            }
            acc.pop();
            r -= 1;
        }
        false
    }
    let mut acc = Vec::with_capacity(5);
    go(n, u64::MAX, 5, &mut acc).then(|| [acc[0], acc[1], acc[2], acc[3], acc[4]])
}

/// Every `n` in `[lo, hi]` that is not a sum of five distinct positive squares.
pub fn five_squares_check(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| five_squares(n).is_none()).collect()
}

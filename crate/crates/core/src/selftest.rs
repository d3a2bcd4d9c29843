//! The acceptance checks as a library routine, so the CLI and the test
//! suite run exactly the same code.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitint::BitInt;
use crate::cone::{
    build_thin_generators, check_face_cover, check_simplex_cover, thinness_report, verify_cone,
    ConeSpec, Rational,
};
use crate::config::RunConfig;
use crate::dyadic::{dense_square_count, dyadic_represent, empty_square, grid_generators, in_exceptional};
use crate::error::Result;
use crate::gap::{build_gap, dense_rectangle, five_squares_check, sumset_iterate, GapDescription};
use crate::lattice::{Point, Region};
use crate::oracle::{fs_enumerate, trm_table};

/// Failure lines kept per criterion; the count is always exact.
const MAX_LISTED: usize = 20;

pub const COVER_SAMPLES: u64 = 500;
pub const SUMSET_SAMPLES: u64 = 200;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8, title: &str) -> Self {
        CriterionReport {
            id,
            title: title.into(),
            passed: false,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(what);
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.failure_count == 0 && self.checked > 0;
        self
    }

    /// `[PASS]  3  title (checked N, failures F)`
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}  {} (checked {}, failures {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checked,
            self.failure_count
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn standard_spec() -> ConeSpec {
    ConeSpec::parse("1,2;2,1").expect("valid spec")
}

/// Errors become failures so one broken stage does not hide the others.
fn guarded(id: u8, title: &str, body: impl FnOnce(&mut CriterionReport) -> Result<()>) -> CriterionReport {
    let mut rep = CriterionReport::new(id, title);
    if let Err(e) = body(&mut rep) {
        rep.fail(format!("error: {e}"));
    }
    rep.finish()
}

pub fn cone_completeness(cfg: &RunConfig) -> CriterionReport {
    guarded(1, "cone completeness for v = (1,2),(2,1)", |rep| {
        let oracle_max = cfg.cone_max.min(40);
        let r = verify_cone(&standard_spec(), cfg.cone_max, Some(oracle_max), cfg.ray_depth, cfg.cell_cap)?;
        rep.checked += r.points_checked;
        for f in r.failures {
            rep.fail(format!("{}: {}", f.point, f.reason));
        }
        if let Some(o) = r.oracle {
            rep.checked += o.points_compared;
            for p in o.disagreements {
                rep.fail(format!("oracle disagrees at {p}"));
            }
            rep.notes.push(format!("oracle box [0,{oracle_max}]^2, {} generators", o.generators));
        }
        rep.notes.push(format!("max {}, depth {}", cfg.cone_max, r.depth));
        Ok(())
    })
}

pub fn thinness(_cfg: &RunConfig) -> CriterionReport {
    guarded(2, "thinness census X(n) <= |S| + 2 log2 n + 2", |rep| {
        let x = build_thin_generators(&standard_spec(), 17)?;
        for e in 2..=16 {
            let r = thinness_report(&x, 1 << e)?;
            rep.check(r.pass, || format!("n = 2^{e}: X(n) = {} > {:.3}", r.count, r.bound));
            if e == 16 {
                rep.notes.push(format!("|S| = {}, X(2^16) = {}", r.simplex_size, r.count));
            }
        }
        Ok(())
    })
}

fn random_spec(rng: &mut ChaCha8Rng) -> ConeSpec {
    if rng.gen_bool(0.25) {
        return standard_spec();
    }
    loop {
        let k = rng.gen_range(2..=4);
        let v: Vec<Point> = (0..k)
            .map(|_| Point::new((0..k).map(|_| rng.gen_range(0..=6)).collect()).expect("k >= 1"))
            .collect();
        if let Ok(spec) = ConeSpec::new(v) {
            return spec;
        }
    }
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<i128> {
    loop {
        let w: Vec<i128> = (0..k).map(|_| rng.gen_range(0..=12)).collect();
        if w.iter().any(|&x| x > 0) {
            return w;
        }
    }
}

pub fn covering_rules(cfg: &RunConfig) -> CriterionReport {
    guarded(3, "face and simplex covering on random rational samples", |rep| {
        let mut r = rng(cfg.seed, 3);
        for i in 0..COVER_SAMPLES {
            let spec = random_spec(&mut r);
            let w = random_weights(&mut r, spec.k());
            let ok = check_face_cover(&spec, &w)?;
            rep.check(ok, || format!("face sample {i}: {spec:?} weights {w:?}"));
        }
        for i in 0..COVER_SAMPLES {
            let spec = random_spec(&mut r);
            let k = spec.k() as i128;
            let w = random_weights(&mut r, spec.k());
            // λ = p/q in (0, 1/k], t = 1 + λu with u in (0, 1]
            let q: i128 = r.gen_range(1..=24) * k;
            let lambda = Rational::new(r.gen_range(1..=q / k), q);
            let den: i128 = r.gen_range(1..=16);
            let u = Rational::new(r.gen_range(1..=den), den);
            let t = Rational::from_integer(1) + lambda * u;
            let ok = check_simplex_cover(&spec, &w, lambda, t)?;
            rep.check(ok, || format!("simplex sample {i}: {spec:?} weights {w:?} λ={lambda} t={t}"));
        }
        rep.notes.push(format!("{COVER_SAMPLES} samples per rule, k in 2..=4"));
        Ok(())
    })
}

pub fn dyadic_coverage(cfg: &RunConfig) -> CriterionReport {
    guarded(4, "dyadic grid coverage on [1,64]^2 outside E", |rep| {
        let region = Region::parse_box("1,1,64,64")?;
        let hi = Point::new(vec![64, 64])?;
        let reach = fs_enumerate(&grid_generators(&hi)?, &region, cfg.cell_cap)?;
        let mut outside = 0;
        for p in region.points()? {
            let (a, b) = (p.coords()[0], p.coords()[1]);
            let reachable = reach.contains(&p);
            if !in_exceptional(&BitInt::from(a), &BitInt::from(b))? {
                outside += 1;
                let rep_ok = dyadic_represent(&BitInt::from(a), &BitInt::from(b))
                    .map(|r| r.is_valid())
                    .unwrap_or(false);
                rep.check(rep_ok, || format!("({a},{b}) has no valid construction"));
                rep.check(reachable, || format!("({a},{b}) unreachable by brute force"));
            }
            if reachable {
                let w = reach.witness(&p).map(|w| w.validate()).transpose()?;
                rep.check(w == Some(true), || format!("({a},{b}) reachable without a witness"));
            }
        }
        rep.notes.push(format!("{outside} points outside E"));
        Ok(())
    })
}

pub fn empty_squares(cfg: &RunConfig) -> CriterionReport {
    guarded(5, "empty squares of side D = 1..6 in E", |rep| {
        for d in 1..=6 {
            let sq = empty_square(d)?;
            rep.check(sq.guaranteed, || format!("D = {d}: popcount certificate fails"));
            let verified = sq.verify_with_oracle(cfg.cell_cap)?;
            rep.check(verified == Some(true), || format!("D = {d}: oracle found a sum, {verified:?}"));
        }
        Ok(())
    })
}

pub fn dense_squares(_cfg: &RunConfig) -> CriterionReport {
    guarded(6, "dense square counts for R = 1..12", |rep| {
        for r in 1..=12 {
            let d = dense_square_count(r)?;
            rep.check(d.counts_agree, || {
                format!("R = {r}: formula {} vs enumeration {}", d.formula_count, d.enumerated_count)
            });
            rep.check(d.all_certified, || format!("R = {r}: uncertified point"));
            if r >= 6 {
                rep.check(d.meets_chain_bound, || {
                    format!("R = {r}: {} < {}", d.enumerated_count, d.chain_bound)
                });
            }
            if r == 3 {
                rep.check(d.enumerated_count == 21, || format!("R = 3 gives {}", d.enumerated_count));
            }
        }
        Ok(())
    })
}

fn check_gap(rep: &mut CriterionReport, g: &GapDescription, a: &[u64], b: &[u64], cap: u64) -> Result<()> {
    rep.check(g.proper, || "points not distinct".into());
    rep.check(g.separated, || "separation fails".into());
    rep.check(g.representations_valid, || "representation invalid".into());
    for c in &g.certificates {
        rep.check(c.exceeds_twice_r, || format!("stage {}: x <= 2r", c.stage));
    }
    for (e, ok) in g.elements.iter().zip(g.confirm_with_oracle(a, b, cap)?) {
        rep.check(ok, || format!("{} not confirmed by brute force", e.point));
    }
    Ok(())
}

pub fn gap_construction(cfg: &RunConfig) -> CriterionReport {
    guarded(7, "proper homogeneous GAP inside FS(A x B)", |rep| {
        let b = [1, 2];
        let a12: Vec<u64> = (1..=12).collect();
        let g = build_gap(&a12, &b, &[3])?;
        let want = Point::new(vec![13, 3])?;
        rep.check(g.differences == [want], || format!("d1 = {:?}", g.differences));
        rep.check(g.elements.len() == 3, || format!("{} points", g.elements.len()));
        check_gap(rep, &g, &a12, &b, cfg.cell_cap)?;

        let a60: Vec<u64> = (1..=60).collect();
        let g = build_gap(&a60, &b, &[3, 2])?;
        rep.check(g.elements.len() == 6, || format!("{} points", g.elements.len()));
        let (d1, d2) = (g.differences[0].coords()[0], g.differences[1].coords()[0]);
        rep.check(d2 > 3 * d1, || format!("d2 = {d2} <= 3 d1 = {}", 3 * d1));
        check_gap(rep, &g, &a60, &b, cfg.cell_cap)?;
        rep.notes.push(format!("A = 1..60: d1 = ({d1},3), d2 = ({d2},3)"));
        Ok(())
    })
}

pub fn rectangle(cfg: &RunConfig) -> CriterionReport {
    guarded(8, "dense rectangle pipeline", |rep| {
        let a: Vec<u64> = (1..=40).collect();
        let r = dense_rectangle(&a, &[1, 2, 3], 3, 30, cfg.cell_cap)?;
        rep.check(r.measured >= r.ledger_bound, || {
            format!("measured {} < ledger {}", r.measured, r.ledger_bound)
        });
        for row in &r.qx_table {
            rep.check(row.q_x > r.q, || format!("trm({}) = {} <= Q = {}", row.x, row.q_x, r.q));
        }
        rep.notes.push(format!(
            "I' = [{},{}], Q = {}, height {}, measured {}, ledger {}, ratio {:.4}",
            r.interval_prime.0, r.interval_prime.1, r.q, r.height, r.measured, r.ledger_bound, r.ratio
        ));
        Ok(())
    })
}

/// Every multiset sum `b_{i1} + … + b_{iQ}`, nondecreasing indices.
fn multiset_sums(b: &[u64], q: u64) -> BTreeSet<u64> {
    fn go(b: &[u64], from: usize, left: u64, acc: u64, out: &mut BTreeSet<u64>) {
        if left == 0 {
            out.insert(acc);
            return;
        }
        for i in from..b.len() {
            go(b, i, left - 1, acc + b[i], out);
        }
    }
    let mut out = BTreeSet::new();
    go(b, 0, q, 0, &mut out);
    out
}

pub fn sumset_inequality(cfg: &RunConfig) -> CriterionReport {
    guarded(9, "|QB| >= Q|B| - (Q - 1) on random inputs", |rep| {
        let mut r = rng(cfg.seed, 9);
        for i in 0..SUMSET_SAMPLES {
            let len = r.gen_range(1..=8);
            let mut set = BTreeSet::new();
            while set.len() < len {
                set.insert(r.gen_range(1..=40u64));
            }
            let b: Vec<u64> = set.into_iter().collect();
            let q = r.gen_range(1..=6);
            let s = sumset_iterate(&b, q)?;
            let exhaustive = multiset_sums(&b, q);
            let same = s.elements.iter().copied().eq(exhaustive.iter().copied());
            rep.check(same, || format!("sample {i}: B = {b:?}, Q = {q}: sumset mismatch"));
            rep.check(exhaustive.len() as u64 >= s.lower_bound, || {
                format!("sample {i}: B = {b:?}, Q = {q}: {} < {}", exhaustive.len(), s.lower_bound)
            });
        }
        Ok(())
    })
}

pub fn five_squares(_cfg: &RunConfig) -> CriterionReport {
    guarded(10, "five distinct squares for n in [1024, 4096]", |rep| {
        let failures = five_squares_check(1024, 4096);
        rep.checked = 4096 - 1024 + 1;
        for n in failures {
            rep.fail(format!("{n}"));
        }
        Ok(())
    })
}

pub fn trm_bound(cfg: &RunConfig) -> CriterionReport {
    guarded(11, "trm(x)(trm(x)+1)/2 <= x for A = 1..100", |rep| {
        let a: Vec<u64> = (1..=100).collect();
        let table = trm_table(&a, 200, cfg.cell_cap)?;
        for x in 1..=200u64 {
            let t = table[x as usize].max(0) as u64;
            rep.check(t * (t + 1) / 2 <= x, || format!("trm({x}) = {t}"));
            rep.check((t * t) as f64 <= 4.0 * x as f64, || format!("trm({x}) = {t} > 2 sqrt(x)"));
        }
        Ok(())
    })
}

/// The seeded criteria rerun with the same seed must serialize identically.
pub fn determinism(cfg: &RunConfig) -> CriterionReport {
    guarded(12, "same seed, same report", |rep| {
        for f in [covering_rules, sumset_inequality] {
            let first = serde_json::to_string(&f(cfg)).expect("serializable");
            let second = serde_json::to_string(&f(cfg)).expect("serializable");
            rep.check(first == second, || "seeded criterion differs between runs".into());
        }
        Ok(())
    })
}

pub const CRITERIA: [fn(&RunConfig) -> CriterionReport; 12] = [
    cone_completeness,
    thinness,
    covering_rules,
    dyadic_coverage,
    empty_squares,
    dense_squares,
    gap_construction,
    rectangle,
    sumset_inequality,
    five_squares,
    trm_bound,
    determinism,
];

pub fn run_all(cfg: &RunConfig) -> SelftestReport {
    let criteria: Vec<CriterionReport> = CRITERIA.iter().map(|f| f(cfg)).collect();
    SelftestReport {
        seed: cfg.seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_sums_small() {
        assert_eq!(multiset_sums(&[1, 2], 3).into_iter().collect::<Vec<_>>(), vec![3, 4, 5, 6]);
        assert_eq!(multiset_sums(&[5], 4).len(), 1);
    }

    #[test]
    fn cheap_criteria_pass() {
        let cfg = RunConfig::default();
        for f in [thinness, five_squares, trm_bound, sumset_inequality] {
            let r = f(&cfg);
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn errors_become_failures() {
        let cfg = RunConfig { cell_cap: 10, ..RunConfig::default() };
        let r = trm_bound(&cfg);
        assert!(!r.passed);
        assert!(r.failures[0].contains("resource cap"));
    }
}

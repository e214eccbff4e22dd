//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::Path;
use std::process::ExitCode;

use cusp_core::cusp::{plane_cusps_from_nl, plane_cusps_from_np, plane_n_unordered, plane_r};
use cusp_core::{
    BlowupQuery, Constraint, CuspEngine, CuspQuery, Error, FamilyId, FamilyQuery, GwEngine,
    GwQuery, NodalOracle, OracleRecord, OracleTable,
};
use num_bigint::BigInt;
use num_traits::Zero;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq(got: &BigInt, want: impl Into<BigInt>, what: &str) -> Check {
    let want = want.into();
    ensure(*got == want, || format!("{what}: got {got}, want {want}"))
}

fn ok<T>(r: cusp_core::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn engine() -> CuspEngine {
    CuspEngine::new(NodalOracle::new(OracleTable::new()))
}

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// Associativity solver with its own reduction order (smallest codimension
/// split against the largest, labelled subsets).
fn naive(r: u32, d: u32, ins: &[u32]) -> BigInt {
    if ins.iter().any(|&a| a > r) {
        return BigInt::zero();
    }
    if d == 0 {
        let hit = ins.len() == 3 && ins.iter().sum::<u32>() == r;
        return BigInt::from(u8::from(hit));
    }
    if ins.contains(&0) {
        return BigInt::zero();
    }
    let excess: i64 = ins.iter().map(|&a| i64::from(a) - 1).sum();
    if excess != i64::from((r + 1) * d + r) - 3 {
        return BigInt::zero();
    }
    let ones = ins.iter().filter(|&&a| a == 1).count() as u32;
    let mut rest: Vec<u32> = ins.iter().copied().filter(|&a| a > 1).collect();
    if ones > 0 {
        return BigInt::from(d).pow(ones) * naive(r, d, &rest);
    }
    rest.sort_unstable();
    if rest.len() <= 2 {
        return BigInt::from(u8::from(d == 1 && rest == [r, r]));
    }
    let (a, beta, alpha) = (rest[0], rest[1], rest[rest.len() - 1]);
    let others = &rest[2..rest.len() - 1];
    let with = |v: &[u32], extra: &[u32]| [v, extra].concat();
    let mut total = naive(r, d, &with(others, &[1 + alpha, a - 1, beta]))
        + BigInt::from(d) * naive(r, d, &with(others, &[alpha, a - 1 + beta]))
        - BigInt::from(d) * naive(r, d, &with(others, &[a - 1, alpha + beta]));
    for d1 in 1..d {
        let d2 = d - d1;
        for mask in 0u32..(1 << others.len()) {
            let sa: Vec<u32> = (0..others.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| others[i])
                .collect();
            let sb: Vec<u32> = (0..others.len())
                .filter(|i| mask >> i & 1 == 0)
                .map(|i| others[i])
                .collect();
            for e in 0..=r {
                let rhs = naive(r, d1, &with(&sa, &[alpha, e]))
                    * naive(r, d2, &with(&sb, &[r - e, a - 1, beta]));
                let lhs = naive(r, d1, &with(&sa, &[a - 1, e]))
                    * naive(r, d2, &with(&sb, &[r - e, alpha, beta]));
                total += BigInt::from(d1) * (rhs - lhs);
            }
        }
    }
    total
}

fn gw_kernel() -> Check {
    let e = GwEngine::new();
    let gw = |r, d, ins: Vec<u32>| e.gw_pr(&GwQuery::new(r, d, ins).unwrap());
    let plane = [1i64, 1, 12, 620, 87304, 26312976];
    for (d, v) in (1..=6u32).zip(plane) {
        let pts = vec![2; (3 * d - 1) as usize];
        eq(&gw(2, d, pts.clone()), v, &format!("R_{d}"))?;
        if d <= 4 {
            eq(&naive(2, d, &pts), v, &format!("independent R_{d}"))?;
        }
    }
    for (d, v) in [(1u32, 2i64), (2, 92), (3, 80160)] {
        let lines = vec![2; 4 * d as usize];
        eq(&gw(3, d, lines.clone()), v, &format!("P^3 degree {d}"))?;
        if d <= 2 {
            eq(
                &naive(3, d, &lines),
                v,
                &format!("independent P^3 degree {d}"),
            )?;
        }
    }
    eq(&gw(4, 1, vec![2; 6]), 5, "P^4 lines")?;
    eq(&naive(4, 1, &[2; 6]), 5, "independent P^4 lines")?;
    eq(&gw(5, 1, vec![2; 8]), 14, "P^5 lines")?;
    eq(&naive(5, 1, &[2; 8]), 14, "independent P^5 lines")?;
    // associativity residual on a deterministic family of instances
    let mut seed = 0x2545_f491_u64;
    let mut checked = 0;
    while checked < 100 {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        let r = 2 + (seed % 3) as u32;
        let d = 1 + (seed / 3 % 3) as u32;
        let target = i64::from((r + 1) * d + r) - 2;
        let mut ins = Vec::new();
        let mut excess = 0i64;
        let mut s = seed;
        while excess < target {
            let a = (1 + (s % u64::from(r)) as u32).min((target - excess) as u32 + 1);
            s /= 5;
            s = s.wrapping_mul(0x9e37_79b9).wrapping_add(1);
            ins.push(a);
            excess += i64::from(a) - 1;
        }
        if ins.len() < 4 || ins.len() > 9 {
            continue;
        }
        let res = residual(&e, r, d, &ins);
        ensure(res.is_zero(), || {
            format!("associativity residual {res} at r={r} d={d} {ins:?}")
        })?;
        checked += 1;
    }
    Ok(())
}

fn residual(e: &GwEngine, r: u32, d: u32, ins: &[u32]) -> BigInt {
    let gw = |dd, v: Vec<u32>| e.gw_pr(&GwQuery::new(r, dd, v).unwrap());
    let rest = &ins[4..];
    let side = |x: u32, y: u32, z: u32, w: u32| {
        let mut s = BigInt::zero();
        for da in 0..=d {
            for mask in 0u32..(1 << rest.len()) {
                let mut a: Vec<u32> = (0..rest.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| rest[i])
                    .collect();
                let mut b: Vec<u32> = (0..rest.len())
                    .filter(|i| mask >> i & 1 == 0)
                    .map(|i| rest[i])
                    .collect();
                a.extend([x, y]);
                b.extend([z, w]);
                for ea in 0..=r {
                    let (mut a, mut b) = (a.clone(), b.clone());
                    a.push(ea);
                    b.push(r - ea);
                    s += gw(da, a) * gw(d - da, b);
                }
            }
        }
        s
    };
    side(ins[0], ins[1], ins[2], ins[3]) - side(ins[0], ins[2], ins[1], ins[3])
}

const C: [i64; 4] = [24, 2304, 435168, 156153600];
const C_LINE: [i64; 4] = [12, 864, 130896, 39223584];
const C_POINT: [i64; 4] = [2, 102, 12024, 2953656];

fn plane_cusps() -> Check {
    let e = engine();
    let n = e.nodal();
    for (d, v) in (3..=6u32).zip(C) {
        eq(
            &ok(plane_cusps_from_np(n.gw(), n.blowup(), d), "closed form")?,
            v,
            &format!("C_{d}"),
        )?;
    }
    Ok(())
}

fn cusp_conditions() -> Check {
    let e = engine();
    for (k, col) in [(1u32, C_LINE), (2, C_POINT)] {
        for (d, v) in (3..=6u32).zip(col) {
            let q = ok(CuspQuery::points(2, d, 3 * d - 2 - k, k), "query")?;
            eq(
                &ok(e.cusp_count_incidence(&q), "incidence")?,
                v,
                &format!("d={d} k={k}"),
            )?;
        }
    }
    Ok(())
}

fn blowup_cross_check() -> Check {
    let e = engine();
    let n = e.nodal();
    let gw = n.gw();
    for (d, want) in (3..=5u32).zip([1i64, 96, 18132]) {
        let direct = ok(
            n.blowup().gw_blowup_p2(&BlowupQuery::node_at_point(d)),
            "blow-up",
        )?;
        let di = i64::from(d);
        let mut rest = BigInt::from(C[(d - 3) as usize]);
        for i in 1..di {
            let j = di - i;
            let (ri, rj) = (plane_r(gw, i as u32), plane_r(gw, j as u32));
            rest -= binom(3 * di - 4, 3 * i - 2) * BigInt::from(i * j * (i * j - 1)) * &ri * &rj;
            rest += BigInt::from(2)
                * binom(3 * di - 4, 3 * i - 1)
                * BigInt::from(i * j)
                * plane_n_unordered(gw, i as u32)
                * &rj;
        }
        ensure(&rest % 4 == BigInt::zero(), || {
            format!("d={d}: inverted value {rest} not divisible by 4")
        })?;
        let inverted = rest / 4;
        eq(&direct, want, &format!("NP_{d} by blow-up"))?;
        eq(&inverted, want, &format!("NP_{d} by inversion"))?;
    }
    Ok(())
}

fn equivalences() -> Check {
    let e = engine();
    let n = e.nodal();
    for d in 3..=6u32 {
        let q = ok(CuspQuery::points(2, d, 3 * d - 2, 0), "query")?;
        let closed = ok(plane_cusps_from_np(n.gw(), n.blowup(), d), "closed form")?;
        eq(
            &ok(e.cusp_count_incidence(&q), "incidence")?,
            closed,
            &format!("(a) d={d}"),
        )?;
    }
    for d in 1..=5u32 {
        for k in 0..=3u32 {
            for h in [0u32, 2] {
                let Some(n_pts) = (3 * d).checked_sub(2 + k) else {
                    continue;
                };
                let delta = Constraint::points(2, n_pts)
                    .unwrap()
                    .with_hyperplanes(h)
                    .with_special(Some(k));
                let q = ok(CuspQuery::new(d, delta), "query")?;
                let full = ok(e.cusp_count_full(&q), "full")?;
                let inc = if n_pts + h >= 2 {
                    let p = if n_pts >= 1 { 2 } else { 1 };
                    let qq = if n_pts >= 2 { 2 } else { 1 };
                    ok(e.cusp_count_incidence_with(&q, p, qq), "incidence")?
                } else {
                    full.clone()
                };
                eq(&full, inc, &format!("(b) d={d} k={k} h={h}"))?;
            }
        }
    }
    for d in 1..=4u32 {
        for k in 0..=2u32 {
            let Some(n_pts) = (3 * d).checked_sub(2 + k) else {
                continue;
            };
            let delta = Constraint::points(2, n_pts)
                .unwrap()
                .with_hyperplanes(2)
                .with_special(Some(k));
            let q = ok(CuspQuery::new(d, delta), "query")?;
            let mut values = Vec::new();
            for (p, qq) in [(2, 2), (1, 2), (2, 1), (1, 1)] {
                let pts_needed = u32::from(p == 2) + u32::from(qq == 2);
                if pts_needed > n_pts {
                    continue;
                }
                values.push(ok(e.cusp_count_incidence_with(&q, p, qq), "incidence")?);
            }
            ensure(values.windows(2).all(|w| w[0] == w[1]), || {
                format!("(c) d={d} k={k}: choices disagree {values:?}")
            })?;
        }
    }
    Ok(())
}

fn exactness() -> Check {
    let e = engine();
    let n = e.nodal();
    for d in 1..=6u32 {
        ok(n.plane_nl(d), &format!("division by 4d at d={d}"))?;
        for k in 0..=2u32 {
            let Some(pts) = (3 * d).checked_sub(2 + k) else {
                continue;
            };
            let q = ok(CuspQuery::points(2, d, pts, k), "query")?;
            ok(
                e.cusp_count_full(&q),
                &format!("division by d² at d={d} k={k}"),
            )?;
        }
    }
    ensure(
        matches!(
            plane_cusps_from_nl(n.gw(), 3, &BigInt::from(7)),
            Err(Error::Inconsistent(_))
        ),
        || "a remainder in the d² division was not reported".into(),
    )?;
    let mut table = OracleTable::new();
    let tangent = Constraint::points(2, 6).unwrap().with_tangency(1);
    for (q, v) in regression_records(&tangent) {
        let v = if matches!(q.family(), FamilyId::N { .. }) && v == BigInt::from(96) {
            BigInt::from(97)
        } else {
            v
        };
        table
            .insert(OracleRecord {
                key: q,
                value: v,
                provenance: "perturbed".into(),
            })
            .unwrap();
    }
    let skewed = CuspEngine::new(NodalOracle::new(table));
    let q = CuspQuery::new(3, tangent.with_special(Some(0))).unwrap();
    ensure(
        matches!(skewed.cusp_count_full(&q), Err(Error::Inconsistent(_))),
        || "perturbed oracle data did not trip the exactness guard".into(),
    )
}

fn zero_family() -> Check {
    let e = engine();
    let n = e.nodal();
    for d in 1..=2u32 {
        for k in 0..=3u32 {
            if let Some(pts) = (3 * d).checked_sub(2 + k) {
                let q = ok(CuspQuery::points(2, d, pts, k), "query")?;
                eq(
                    &ok(e.cusp_count_full(&q), "full")?,
                    0,
                    &format!("S d={d} k={k}"),
                )?;
                if pts >= 2 {
                    eq(&ok(e.count(&q), "count")?, 0, &format!("S d={d} k={k}"))?;
                }
            }
            if let Some(pts) = (3 * d).checked_sub(1 + k) {
                let delta = Constraint::points(2, pts).unwrap().with_special(Some(k));
                eq(
                    &ok(n.n_count(d, &delta, &[]), "nodal")?,
                    0,
                    &format!("N d={d} s={k}"),
                )?;
            }
        }
        eq(
            &plane_cusps_from_np(n.gw(), n.blowup(), d).unwrap(),
            0,
            &format!("C_{d}"),
        )?;
    }
    for k in 0..=2u32 {
        for l in 0..=2u32 {
            for a in 0..=4u32.saturating_sub(k + l) {
                let Some(b) = 4u32.checked_sub(a + k + l) else {
                    continue;
                };
                let (g1, g2) = (
                    Constraint::points(2, a).unwrap(),
                    Constraint::points(2, b).unwrap(),
                );
                let v = ok(n.rr2_count(1, 1, &g1, &g2, k, l), "rr2")?;
                eq(&v, 0, &format!("rr2(1,1) a={a} k={k} l={l}"))?;
            }
        }
    }
    Ok(())
}

/// Canonical queries of the tangency-bearing terms for a plane cubic with
/// `delta` (six points, one tangency) and the regression values.
fn regression_records(delta: &Constraint) -> Vec<(FamilyQuery, BigInt)> {
    use cusp_core::Conditions::Whole;
    let with_s = |s| delta.clone().with_special(Some(s));
    vec![
        (
            FamilyQuery::single(FamilyId::N { d: 3 }, with_s(0).add_space(2).unwrap()).unwrap(),
            96.into(),
        ),
        (
            FamilyQuery::single(FamilyId::N { d: 3 }, with_s(1)).unwrap(),
            60.into(),
        ),
        (
            FamilyQuery::nr(1, 2, Whole(with_s(0)), 0).unwrap(),
            0.into(),
        ),
        (
            FamilyQuery::nr(2, 1, Whole(with_s(0)), 0).unwrap(),
            0.into(),
        ),
        (
            FamilyQuery::rr2(1, 2, Whole(delta.clone()), 0, 0).unwrap(),
            96.into(),
        ),
        (
            FamilyQuery::rr2(2, 1, Whole(delta.clone()), 0, 0).unwrap(),
            96.into(),
        ),
    ]
}

fn tangency_assembly() -> Check {
    use cusp_core::Conditions::Whole;
    let tangent = Constraint::points(2, 6).unwrap().with_tangency(1);
    let with_s = |s| tangent.clone().with_special(Some(s));
    // planted values, pairwise distinct so every coefficient is visible
    let planted: [(FamilyQuery, i64); 6] = [
        (FamilyQuery::nr(1, 2, Whole(with_s(0)), 0).unwrap(), 3),
        (FamilyQuery::nr(2, 1, Whole(with_s(0)), 0).unwrap(), 5),
        (
            FamilyQuery::rr2(1, 2, Whole(tangent.clone()), 0, 0).unwrap(),
            7,
        ),
        (
            FamilyQuery::rr2(2, 1, Whole(tangent.clone()), 0, 0).unwrap(),
            11,
        ),
        (
            FamilyQuery::single(FamilyId::N { d: 3 }, with_s(0).add_space(2).unwrap()).unwrap(),
            13,
        ),
        (
            FamilyQuery::single(FamilyId::N { d: 3 }, with_s(1)).unwrap(),
            17,
        ),
    ];
    let mut table = OracleTable::new();
    for (q, v) in &planted {
        table
            .insert(OracleRecord {
                key: q.clone(),
                value: BigInt::from(*v),
                provenance: "planted".into(),
            })
            .unwrap();
    }
    let e = CuspEngine::new(NodalOracle::new(table));
    let terms = ok(e.full_terms(3, &with_s(0)), "term evaluation")?;
    let lowered = ok(
        e.cusp_count_full(&CuspQuery::points(2, 3, 6, 1).unwrap()),
        "C_l",
    )?;
    eq(&lowered, 12, "the single lowered term")?;
    // d = 3, one tangency, m = 1:
    //   −(2²·NR(1,2) + 1²·NR(2,1)) − C(1,1)·3²·S(Δ_1) − N(Δ′) + 1·2·RR(1,2) + 2·1·RR(2,1) + 2·3·N(Δ″)
    let expected = -(4 * 3 + 5) - 9 * 12 - 13 + 2 * 7 + 2 * 11 + 6 * 17;
    eq(
        &ok(terms.assemble(3), "assembly")?,
        expected,
        "symbolic expansion",
    )?;
    ensure(
        terms.lowered.len() == 1 && terms.lowered[0].2 == BigInt::from(12),
        || format!("lowered terms {:?}", terms.lowered),
    )?;

    let fixture =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/cubic_one_tangency.txt");
    let table = ok(OracleTable::load(&fixture), "fixture")?;
    let e = CuspEngine::new(NodalOracle::new(table));
    let q = CuspQuery::new(3, with_s(0)).unwrap();
    eq(&ok(e.count(&q), "row 1, column C")?, 60, "row 1, column C")?;
    let bare = engine();
    match bare.count(&q) {
        Err(Error::OracleMissing { keys }) if keys.len() == 6 => Ok(()),
        other => Err(format!(
            "without the fixture expected six missing keys, got {other:?}"
        )),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 GW kernel vs independent solver, published values, associativity",
            gw_kernel,
        ),
        ("2 plane cusp counts C_3..C_6", plane_cusps),
        (
            "3 cusp on a line / point, d = 3..6, general engine",
            cusp_conditions,
        ),
        (
            "4 node at a point: blow-up vs inverted closed form",
            blowup_cross_check,
        ),
        (
            "5 engine equivalences and choice independence",
            equivalences,
        ),
        ("6 exact divisions", exactness),
        ("7 zero family", zero_family),
        (
            "8 tangency assembly and row-1 regression value",
            tangency_assembly,
        ),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS  criterion {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

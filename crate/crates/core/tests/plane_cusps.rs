use cusp_core::cusp::{plane_cusps_from_nl, plane_cusps_from_np, plane_n_unordered, plane_r};
use cusp_core::{BlowupQuery, Constraint, CuspEngine, CuspQuery, NodalOracle, OracleTable};
use num_bigint::BigInt;

fn engine() -> CuspEngine {
    CuspEngine::new(NodalOracle::new(OracleTable::new()))
}

const C: [i64; 4] = [24, 2304, 435168, 156153600];
const C_LINE: [i64; 4] = [12, 864, 130896, 39223584];
const C_POINT: [i64; 4] = [2, 102, 12024, 2953656];

fn column(k: u32) -> [i64; 4] {
    match k {
        0 => C,
        1 => C_LINE,
        _ => C_POINT,
    }
}

#[test]
fn incidence_recursion_reproduces_plane_columns() {
    let e = engine();
    for k in 0..=2u32 {
        for (d, want) in (3..=6u32).zip(column(k)) {
            let q = CuspQuery::points(2, d, 3 * d - 2 - k, k).unwrap();
            assert_eq!(
                e.cusp_count_incidence(&q).unwrap(),
                BigInt::from(want),
                "d={d} k={k}"
            );
        }
    }
}

#[test]
fn full_recursion_reproduces_plane_columns() {
    let e = engine();
    for k in 0..=2u32 {
        for (d, want) in (3..=6u32).zip(column(k)) {
            let q = CuspQuery::points(2, d, 3 * d - 2 - k, k).unwrap();
            assert_eq!(
                e.cusp_count_full(&q).unwrap(),
                BigInt::from(want),
                "d={d} k={k}"
            );
        }
    }
}

#[test]
fn closed_forms_agree() {
    let e = engine();
    let nodal = e.nodal();
    for (d, want) in (3..=6u32).zip(C) {
        let c34 = plane_cusps_from_np(nodal.gw(), nodal.blowup(), d).unwrap();
        assert_eq!(c34, BigInt::from(want), "d={d}");
        let nl = nodal.plane_nl(d).unwrap();
        assert_eq!(plane_cusps_from_nl(nodal.gw(), d, &nl).unwrap(), c34);
    }
    assert_eq!(nodal.plane_nl(3).unwrap(), BigInt::from(6));
}

#[test]
fn node_at_point_matches_inverted_cusp_relation() {
    let e = engine();
    let nodal = e.nodal();
    let gw = nodal.gw();
    for (d, want_c) in (3..=6u32).zip(C) {
        let d64 = i64::from(d);
        let mut rest = BigInt::from(want_c);
        for i in 1..d64 {
            let j = d64 - i;
            let (ri, rj) = (plane_r(gw, i as u32), plane_r(gw, j as u32));
            rest -= binom(3 * d64 - 4, 3 * i - 2) * BigInt::from(i * j * (i * j - 1)) * &ri * &rj;
            rest += BigInt::from(2)
                * binom(3 * d64 - 4, 3 * i - 1)
                * BigInt::from(i * j)
                * plane_n_unordered(gw, i as u32)
                * &rj;
        }
        let np = nodal
            .blowup()
            .gw_blowup_p2(&BlowupQuery::node_at_point(d))
            .unwrap();
        assert_eq!(BigInt::from(4) * &np, rest, "d={d}");
    }
    let want = [1i64, 96, 18132];
    for (d, v) in (3..=5u32).zip(want) {
        assert_eq!(nodal.plane_np(d).unwrap(), BigInt::from(v));
    }
}

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn choice_of_marked_spaces_does_not_matter() {
    let e = engine();
    for d in 3..=5u32 {
        for k in 0..=2u32 {
            let n = 3 * d - 2 - k;
            let pts = CuspQuery::points(2, d, n, k).unwrap();
            let want = e.cusp_count_incidence(&pts).unwrap();
            // extra lines through marked points only rescale the count
            let mixed = Constraint::points(2, n)
                .unwrap()
                .with_hyperplanes(4)
                .with_special(Some(k));
            let mixed = CuspQuery::new(d, mixed).unwrap();
            let scale = BigInt::from(d).pow(4);
            for (p, q) in [(2, 2), (1, 2), (1, 1)] {
                let got = e.cusp_count_incidence_with(&mixed, p, q).unwrap();
                assert_eq!(got, &want * &scale, "d={d} k={k} p={p} q={q}");
            }
            assert_eq!(e.cusp_count_full(&mixed).unwrap(), &want * &scale);
            assert_eq!(e.count(&mixed).unwrap(), &want * &scale);
        }
    }
}

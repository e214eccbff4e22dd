//! Characteristic numbers of rational cuspidal curves.
//!
//! Both general recursions come from the same four-point relation on a
//! family of nodal curves `γ(A) = γ(B)` with extra markings `P`, `Q`: the
//! boundary where `A`, `B` sit on a contracted component consists of
//! cuspidal curves, and every other boundary term is a nodal or
//! two-component count.
//!
//! * [`CuspEngine::cusp_count_incidence`] puts two of the incidence spaces on
//!   `P` and `Q`. It needs no tangency data.
//! * [`CuspEngine::cusp_count_full`] puts hyperplanes on `P` and `Q` and
//!   handles tangency conditions, recursing on the tangencies that degenerate
//!   to hyperplanes through the cusp.
//!
//! The plane closed forms are [`plane_cusps_from_np`] and [`plane_cusps_from_nl`].

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::blowup::{BlowupEngine, BlowupQuery};
use crate::constraint::{Constraint, FamilyId, Joint};
use crate::error::{binomial, exact_div, Error, Result, Tally};
use crate::gw::GwEngine;
use crate::nodal::NodalOracle;
use crate::oracle::{Conditions, FamilyQuery};

/// `#(S(r, d), Δ)` where `Δ.special()` is the cusp codimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuspQuery {
    d: u32,
    delta: Constraint,
}

impl CuspQuery {
    pub fn new(d: u32, delta: Constraint) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("degree", "cuspidal curves need d >= 1"));
        }
        let k = delta.special_or_zero();
        Ok(Self {
            d,
            delta: delta.with_special(Some(k)),
        })
    }

    /// `n` general points of `P^r` and a cusp on a codimension-`k` subspace.
    pub fn points(r: u32, d: u32, n: u32, k: u32) -> Result<Self> {
        Self::new(d, Constraint::points(r, n)?.with_special(Some(k)))
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> u32 {
        self.delta.r()
    }

    pub fn constraint(&self) -> &Constraint {
        &self.delta
    }

    pub fn family_query(&self) -> FamilyQuery {
        FamilyQuery::single(FamilyId::S { d: self.d }, self.delta.clone())
            .expect("validated on construction")
    }

    fn check_finite(&self) -> Result<()> {
        let family = FamilyId::S { d: self.d };
        if family.is_finite(&self.delta)? {
            Ok(())
        } else {
            Err(Error::validation(
                "constraint",
                format!(
                    "condition weight {} does not match the {} required for S(r={}, d={})",
                    self.delta.cond_weight(),
                    family.dimension(self.r()),
                    self.r(),
                    self.d
                ),
            ))
        }
    }
}

#[derive(Debug, Default)]
pub struct CuspEngine {
    nodal: NodalOracle,
    memo: RwLock<HashMap<(u32, Constraint), BigInt>>,
}

impl CuspEngine {
    pub fn new(nodal: NodalOracle) -> Self {
        Self {
            nodal,
            memo: RwLock::default(),
        }
    }

    pub fn nodal(&self) -> &NodalOracle {
        &self.nodal
    }

    /// Tangency-free queries with two marked-able spaces go through the
    /// incidence recursion, everything else through the full one.
    pub fn count(&self, q: &CuspQuery) -> Result<BigInt> {
        if q.delta.tangency() == 0 && q.delta.linear_space_count() >= 2 {
            self.cusp_count_incidence(q)
        } else {
            self.cusp_count_full(q)
        }
    }

    /// Incidence-only recursion with `p`, `q` two spaces of least codimension
    /// among the non-hyperplane conditions.
    pub fn cusp_count_incidence(&self, q: &CuspQuery) -> Result<BigInt> {
        let (delta, scale) = q.delta.normalize_hyperplanes(q.d);
        let codims: Vec<u32> = delta
            .incidence_counts()
            .flat_map(|(c, n)| std::iter::repeat_n(c, n as usize))
            .collect();
        let (p, qq) = match codims[..] {
            [p, qq, ..] => (p, qq),
            _ => {
                return Err(Error::validation(
                    "constraint",
                    "the incidence recursion needs two linear spaces of codimension >= 2",
                ))
            }
        };
        let normalized = CuspQuery::new(q.d, delta)?;
        Ok(scale * self.cusp_count_incidence_with(&normalized, p, qq)?)
    }

    /// Incidence-only recursion with an explicit choice of the codimensions of
    /// `p` and `q`. Hyperplane conditions of the query may serve as `p` or `q`.
    pub fn cusp_count_incidence_with(&self, query: &CuspQuery, p: u32, q: u32) -> Result<BigInt> {
        let d = query.d;
        let delta = &query.delta;
        if delta.tangency() > 0 {
            return Err(Error::validation(
                "constraint",
                "the incidence recursion takes no tangency conditions",
            ));
        }
        query.check_finite()?;
        if delta.is_empty_condition() {
            return Ok(BigInt::zero());
        }
        let k = delta.special_or_zero();
        let derived = delta.pair_derivations(p, q)?;
        let (tilde, scale) = derived.tilde.normalize_hyperplanes(d);
        let nodal = &self.nodal;

        let mut tally = Tally::new();
        if let Some(prime) = &derived.prime {
            tally.add(-1, || nodal.n_count(d, prime, &[]))?;
        }
        tally.add(1, || nodal.n_count(d, &derived.at_p, &[]))?;
        tally.add(1, || nodal.n_count(d, &derived.at_q, &[]))?;
        for d1 in 1..d {
            let d2 = d - d1;
            for split in tilde.clone().with_special(None).splits()? {
                let mult = &split.multiplicity * &scale;
                let nodal_part = split.first.clone().with_special(Some(k));
                let rational_part = add_spaces(&split.second, &[p, q]);
                if let Some(rational_part) = rational_part {
                    tally.add(-mult.clone(), || {
                        nodal.nr_count(d1, d2, &nodal_part, &rational_part, 0)
                    })?;
                }
                if let (Some(first), Some(second)) = (
                    add_spaces(&split.first, &[p]),
                    add_spaces(&split.second, &[q]),
                ) {
                    tally.add(mult, || nodal.rr2_count(d1, d2, &first, &second, k, 0))?;
                }
            }
        }
        let total = tally.finish()?;
        non_negative(total, query)
    }

    /// Full recursion. Tangency-bearing nodal and two-component terms must
    /// come from the oracle table; the cuspidal terms with fewer tangencies
    /// are computed recursively.
    pub fn cusp_count_full(&self, q: &CuspQuery) -> Result<BigInt> {
        q.check_finite()?;
        if q.delta.is_empty_condition() {
            return Ok(BigInt::zero());
        }
        let (delta, scale) = q.delta.normalize_hyperplanes(q.d);
        Ok(scale * self.full(q.d, &delta)?)
    }

    fn full(&self, d: u32, delta: &Constraint) -> Result<BigInt> {
        let key = (d, delta.clone());
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let terms = self.full_terms(d, delta)?;
        let dd = BigInt::from(d);
        let rhs = terms.assemble(d)?;
        let v = exact_div(
            &rhs,
            &(&dd * &dd),
            &format!("cusp count S(d={d}) with {delta}"),
        )?;
        let v = non_negative(v, &CuspQuery::new(d, delta.clone())?)?;
        self.memo.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Evaluates every term of the full recursion for `delta` without
    /// combining them.
    pub fn full_terms(&self, d: u32, delta: &Constraint) -> Result<FullTerms> {
        let k = delta.special_or_zero();
        let derived = delta.full_derivations();
        let nodal = &self.nodal;
        let mut missing = Tally::new();
        let mut grab = |f: &mut dyn FnMut() -> Result<BigInt>| -> Result<BigInt> {
            match f() {
                Err(Error::OracleMissing { keys }) => {
                    missing.add(1, || Err(Error::OracleMissing { keys }))?;
                    Ok(BigInt::zero())
                }
                other => other,
            }
        };
        let mut nr = Vec::new();
        let mut rr2 = Vec::new();
        for d1 in 1..d {
            let d2 = d - d1;
            let plain = delta.clone().with_special(None);
            let with_node = delta.clone().with_special(Some(k));
            nr.push((d1, d2, grab(&mut || nodal.nr_total(d1, d2, &with_node, 0))?));
            rr2.push((d1, d2, grab(&mut || nodal.rr2_total(d1, d2, &plain, k, 0))?));
        }
        let mut lowered = Vec::new();
        for (l, low) in &derived.lowered {
            debug_assert!(low.tangency() < delta.tangency());
            lowered.push((*l, delta.tangency(), grab(&mut || self.full(d, low))?));
        }
        let prime = grab(&mut || nodal.n_count(d, &derived.prime, &[]))?;
        let double_prime = grab(&mut || nodal.n_count(d, &derived.double_prime, &[]))?;
        missing.finish()?;
        Ok(FullTerms {
            nr,
            rr2,
            lowered,
            prime,
            double_prime,
        })
    }

    /// Evaluates any supported family query: `R` through the kernel, `N`,
    /// `NR`, `RR2` through the nodal oracle, `S` through [`CuspEngine::count`].
    pub fn evaluate(&self, q: &FamilyQuery) -> Result<BigInt> {
        let nodal = &self.nodal;
        match (q.family(), q.conditions(), q.joint()) {
            (FamilyId::R { d }, Conditions::Whole(delta), None) => {
                if !q.is_finite()? {
                    return Err(not_finite(q));
                }
                if delta.tangency() > 0 {
                    return nodal.table().require(q);
                }
                nodal.gw_with(d, delta, &[])
            }
            (FamilyId::N { d }, Conditions::Whole(delta), None) => {
                if !q.is_finite()? {
                    return Err(not_finite(q));
                }
                nodal.n_count(d, delta, &[])
            }
            (FamilyId::S { d }, Conditions::Whole(delta), None) => {
                self.count(&CuspQuery::new(d, delta.clone())?)
            }
            (FamilyId::NR { d1, d2 }, conditions, Some(Joint::Meeting { c })) => {
                if !q.is_finite()? {
                    return Err(not_finite(q));
                }
                match conditions {
                    Conditions::Split(a, b) => nodal.nr_count(d1, d2, a, b, c),
                    Conditions::Whole(delta) => {
                        let (delta, s) = delta.normalize_hyperplanes(d1 + d2);
                        Ok(s * nodal.nr_total(d1, d2, &delta, c)?)
                    }
                }
            }
            (FamilyId::RR2 { d1, d2 }, conditions, Some(Joint::TwoNodal { k, l })) => {
                if !q.is_finite()? {
                    return Err(not_finite(q));
                }
                match conditions {
                    Conditions::Split(a, b) => nodal.rr2_count(d1, d2, a, b, k, l),
                    Conditions::Whole(delta) => {
                        let (delta, s) = delta.normalize_hyperplanes(d1 + d2);
                        Ok(s * nodal.rr2_total(d1, d2, &delta, k, l)?)
                    }
                }
            }
            _ => Err(Error::validation("query", format!("unsupported query {q}"))),
        }
    }
}

/// The five kinds of terms of the full recursion, evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullTerms {
    /// `(d1, d2, #NR(d1, d2))` summed over splits.
    pub nr: Vec<(u32, u32, BigInt)>,
    /// `(d1, d2, #RR2(d1, d2, k, 0))` summed over splits.
    pub rr2: Vec<(u32, u32, BigInt)>,
    /// `(l, tangency count, #S(Δ_l))`.
    pub lowered: Vec<(u32, u32, BigInt)>,
    /// `#N(Δ')`.
    pub prime: BigInt,
    /// `#N(Δ'')`.
    pub double_prime: BigInt,
}

impl FullTerms {
    /// Right-hand side equal to `d² · #S`.
    pub fn assemble(&self, d: u32) -> Result<BigInt> {
        let dd = BigInt::from(d);
        let mut total = BigInt::zero();
        for (_, d2, v) in &self.nr {
            total -= BigInt::from(*d2) * BigInt::from(*d2) * v;
        }
        for (l, t, v) in &self.lowered {
            total -= binomial(i64::from(*t), i64::from(*l)) * &dd * &dd * v;
        }
        total -= &self.prime;
        for (d1, d2, v) in &self.rr2 {
            total += BigInt::from(d1 * d2) * v;
        }
        total += BigInt::from(2) * &dd * &self.double_prime;
        Ok(total)
    }
}

fn add_spaces(c: &Constraint, codims: &[u32]) -> Option<Constraint> {
    codims
        .iter()
        .try_fold(c.clone(), |acc, &x| acc.add_space(x))
}

fn non_negative(v: BigInt, q: &CuspQuery) -> Result<BigInt> {
    if v < BigInt::zero() {
        Err(Error::Inconsistent(format!(
            "negative count {v} for {}",
            q.family_query()
        )))
    } else {
        Ok(v)
    }
}

fn not_finite(q: &FamilyQuery) -> Error {
    Error::validation("constraint", format!("{q} is not a finite query"))
}

/// Rational plane curves of degree `d` through `3d - 1` points.
pub fn plane_r(gw: &GwEngine, d: u32) -> BigInt {
    if d == 0 {
        return BigInt::zero();
    }
    gw.eval(2, d, &vec![2; (3 * d - 1) as usize])
}

/// Rational plane curves through `3d - 1` points with a chosen node,
/// unordered: `C(d-1, 2) · R_d`.
pub fn plane_n_unordered(gw: &GwEngine, d: u32) -> BigInt {
    binomial(i64::from(d) - 1, 2) * plane_r(gw, d)
}

/// Closed recursion for cuspidal plane curves through `3d - 2` points.
pub fn plane_cusps_from_np(gw: &GwEngine, blowup: &BlowupEngine, d: u32) -> Result<BigInt> {
    let np = if d >= 3 {
        blowup.gw_blowup_p2(&BlowupQuery::node_at_point(d))?
    } else {
        BigInt::zero()
    };
    let d = i64::from(d);
    let mut total = BigInt::from(4) * np;
    for i in 1..d {
        let j = d - i;
        let (ri, rj) = (plane_r(gw, i as u32), plane_r(gw, j as u32));
        total += binomial(3 * d - 4, 3 * i - 2) * BigInt::from(i * j * (i * j - 1)) * &ri * &rj;
        total -= BigInt::from(2)
            * binomial(3 * d - 4, 3 * i - 1)
            * BigInt::from(i * j)
            * plane_n_unordered(gw, i as u32)
            * &rj;
    }
    Ok(total)
}

/// The three `nl`-free sums of the hyperplane-marked plane recursion:
/// the two-component term, `N_d`, and the nodal-component term.
pub(crate) fn plane_nl_terms(gw: &GwEngine, d: u32) -> (BigInt, BigInt, BigInt) {
    let d = i64::from(d);
    let mut rr = BigInt::zero();
    let mut nr = BigInt::zero();
    for i in 1..d {
        let j = d - i;
        let b = binomial(3 * d - 2, 3 * i - 1);
        let (ri, rj) = (plane_r(gw, i as u32), plane_r(gw, j as u32));
        rr += &b * BigInt::from(i * i * j * j * (i * j - 1)) * &ri * &rj;
        nr += BigInt::from(2)
            * &b
            * BigInt::from(j * j * j * i)
            * plane_n_unordered(gw, i as u32)
            * &rj;
    }
    (rr, plane_n_unordered(gw, d as u32), nr)
}

/// Cuspidal plane curves through `3d - 2` points from the node-on-a-line
/// count `nl`.
pub fn plane_cusps_from_nl(gw: &GwEngine, d: u32, nl: &BigInt) -> Result<BigInt> {
    let (rr, n_d, nr) = plane_nl_terms(gw, d);
    let dd = BigInt::from(d);
    let num = BigInt::from(4) * &dd * nl + rr - BigInt::from(2) * n_d - nr;
    exact_div(
        &num,
        &(&dd * &dd),
        &format!("plane cusp count from nl, d = {d}"),
    )
}

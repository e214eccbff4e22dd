//! Counts of nodal and two-component curves consumed by the cuspidal
//! recursions.
//!
//! Two backends answer queries. The table backend looks up externally
//! supplied values by canonical key and always wins when a record exists. The
//! computed backend covers incidence-only queries in the plane: node counts
//! from the Gromov–Witten kernels, and `NR`/`RR2` counts by splitting the
//! gluing conditions along the diagonal of `P^r × P^r`.
//!
//! Node counts are ordered: the two branches through the node are
//! distinguished, so every plane nodal count carries a factor 2.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::blowup::{BlowupEngine, BlowupQuery};
use crate::constraint::{Constraint, FamilyId};
use crate::cusp;
use crate::error::{exact_div, Error, Result, Tally};
use crate::gw::GwEngine;
use crate::oracle::{Conditions, FamilyQuery, OracleTable};

#[derive(Debug, Default)]
pub struct NodalOracle {
    gw: GwEngine,
    blowup: BlowupEngine,
    table: OracleTable,
    experimental_rr2: bool,
    nl: RwLock<HashMap<u32, BigInt>>,
}

impl NodalOracle {
    pub fn new(table: OracleTable) -> Self {
        Self {
            table,
            ..Self::default()
        }
    }

    /// Allows the computed `RR2` formula outside the plane.
    pub fn with_experimental_rr2(mut self, on: bool) -> Self {
        self.experimental_rr2 = on;
        self
    }

    pub fn gw(&self) -> &GwEngine {
        &self.gw
    }

    pub fn blowup(&self) -> &BlowupEngine {
        &self.blowup
    }

    pub fn table(&self) -> &OracleTable {
        &self.table
    }

    /// Invariant of `P^r` with the incidence conditions of `gamma` plus
    /// `extras` as insertions. Codimensions above `r` are the zero class.
    pub fn gw_with(&self, d: u32, gamma: &Constraint, extras: &[u32]) -> Result<BigInt> {
        if gamma.tangency() > 0 || gamma.special().is_some() {
            return Err(Error::validation(
                "constraint",
                format!("{gamma} is not an incidence-only constraint"),
            ));
        }
        let mut ins: Vec<u32> = vec![1; gamma.hyperplanes() as usize];
        for (c, n) in gamma.incidence_counts() {
            ins.extend(std::iter::repeat_n(c, n as usize));
        }
        ins.extend_from_slice(extras);
        Ok(self.gw.eval(gamma.r(), d, &ins))
    }

    /// Ordered-branch count of degree-`d` rational curves with a node on a
    /// general subspace of codimension `delta.special()`.
    ///
    /// `extras` are conditions at a further marked point of the curve: the
    /// fundamental class kills the count, a hyperplane multiplies it by `d`,
    /// and anything else becomes one more incidence condition.
    pub fn n_count(&self, d: u32, delta: &Constraint, extras: &[u32]) -> Result<BigInt> {
        if d <= 2 {
            // lines and irreducible conics are smooth
            return Ok(BigInt::zero());
        }
        let mut delta = delta.clone();
        let mut factor = BigInt::one();
        for &e in extras {
            match e {
                0 => return Ok(BigInt::zero()),
                1 => factor *= d,
                c => match delta.add_space(c) {
                    Some(next) => delta = next,
                    None => return Ok(BigInt::zero()),
                },
            }
        }
        let (delta, scale) = delta.normalize_hyperplanes(d);
        factor *= scale;
        let family = FamilyId::N { d };
        let query = FamilyQuery::single(family, delta)?;
        let delta = match query.conditions() {
            Conditions::Whole(d) => d.clone(),
            Conditions::Split(..) => unreachable!("single-family query"),
        };
        if delta.is_empty_condition() || !family.is_finite(&delta)? {
            return Ok(BigInt::zero());
        }
        if let Some(v) = self.table.lookup(&query) {
            return Ok(factor * v);
        }
        if delta.r() == 2 && delta.tangency() == 0 {
            return Ok(factor * self.plane_n(d, delta.special_or_zero())?);
        }
        Err(Error::missing(query.key()))
    }

    fn plane_n(&self, d: u32, node_codim: u32) -> Result<BigInt> {
        Ok(match node_codim {
            0 => BigInt::from(2) * cusp::plane_n_unordered(&self.gw, d),
            1 => BigInt::from(2) * self.plane_nl(d)?,
            2 => BigInt::from(2) * self.plane_np(d)?,
            _ => BigInt::zero(),
        })
    }

    /// Unordered count of plane curves through `3d - 3` points with a node at
    /// a fixed point.
    pub fn plane_np(&self, d: u32) -> Result<BigInt> {
        if d < 3 {
            return Ok(BigInt::zero());
        }
        self.blowup.gw_blowup_p2(&BlowupQuery::node_at_point(d))
    }

    /// Unordered count of plane curves through `3d - 2` points with the node
    /// on a fixed line, solved from the cuspidal relation obtained with
    /// hyperplane conditions on the extra markings.
    pub fn plane_nl(&self, d: u32) -> Result<BigInt> {
        if d < 3 {
            return Ok(BigInt::zero());
        }
        if let Some(v) = self.nl.read().unwrap().get(&d) {
            return Ok(v.clone());
        }
        let c = cusp::plane_cusps_from_np(&self.gw, &self.blowup, d)?;
        let (split_rr, n_d, split_nr) = cusp::plane_nl_terms(&self.gw, d);
        let dd = BigInt::from(d);
        let num = &dd * &dd * c - split_rr + BigInt::from(2) * n_d + split_nr;
        let v = exact_div(
            &num,
            &(BigInt::from(4) * &dd),
            &format!("node-on-line count, d = {d}"),
        )?;
        if v < BigInt::zero() {
            return Err(Error::Inconsistent(format!(
                "negative node-on-line count {v} for d = {d}"
            )));
        }
        self.nl.write().unwrap().insert(d, v.clone());
        Ok(v)
    }

    /// A nodal curve of degree `d1` (conditions `first`, node condition in
    /// `first.special()`) glued at `C` to a rational curve of degree `d2`
    /// (conditions `second`), with `C` on `c` hyperplanes.
    pub fn nr_count(
        &self,
        d1: u32,
        d2: u32,
        first: &Constraint,
        second: &Constraint,
        c: u32,
    ) -> Result<BigInt> {
        let (g1, s1) = first.normalize_hyperplanes(d1);
        let (g2, s2) = second.normalize_hyperplanes(d2);
        let query = FamilyQuery::nr(d1, d2, Conditions::Split(g1, g2), c)?;
        let (g1, g2) = split_parts(&query);
        let factor = s1 * s2;
        if g1.is_empty_condition() || !query.is_finite()? {
            return Ok(BigInt::zero());
        }
        if let Some(v) = self.table.lookup(&query) {
            return Ok(factor * v);
        }
        if g2.tangency() > 0 {
            return Err(Error::missing(query.key()));
        }
        let r = g1.r();
        let mut tally = Tally::new();
        for e in c..=r {
            let f = r + c - e;
            let rational = self.gw_with(d2, &g2, &[f])?;
            tally.add(rational, || self.n_count(d1, &g1, &[e]))?;
        }
        Ok(factor * tally.finish()?)
    }

    /// Two rational curves glued at `C` (on `l` hyperplanes) and meeting
    /// again at `A = B` (on `k` hyperplanes).
    ///
    /// Both gluings are split along the diagonal; configurations in which
    /// the two meeting points coincide are subtracted once.
    pub fn rr2_count(
        &self,
        d1: u32,
        d2: u32,
        first: &Constraint,
        second: &Constraint,
        k: u32,
        l: u32,
    ) -> Result<BigInt> {
        let (g1, s1) = first.normalize_hyperplanes(d1);
        let (g2, s2) = second.normalize_hyperplanes(d2);
        let query = FamilyQuery::rr2(d1, d2, Conditions::Split(g1, g2), k, l)?;
        let (g1, g2) = split_parts(&query);
        let factor = s1 * s2;
        if !query.is_finite()? {
            return Ok(BigInt::zero());
        }
        if let Some(v) = self.table.lookup(&query) {
            return Ok(factor * v);
        }
        if d1 == 1 && d2 == 1 {
            // distinct lines meet once; the diagonal sums only see the
            // excess locus of coincident lines
            return Ok(BigInt::zero());
        }
        let r = g1.r();
        if (r != 2 && !self.experimental_rr2) || g1.tangency() > 0 || g2.tangency() > 0 {
            return Err(Error::missing(query.key()));
        }
        let mut total = BigInt::zero();
        for e1 in l..=r {
            let f1 = r + l - e1;
            for e2 in k..=r {
                let f2 = r + k - e2;
                let left = self.gw_with(d1, &g1, &[e1, e2])?;
                if left.is_zero() {
                    continue;
                }
                total += left * self.gw_with(d2, &g2, &[f1, f2])?;
            }
        }
        for e in (k + l)..=r {
            let f = r + k + l - e;
            total -= self.gw_with(d1, &g1, &[e])? * self.gw_with(d2, &g2, &[f])?;
        }
        Ok(factor * total)
    }

    /// `NR` summed over all splits of `delta`; the node condition is
    /// `delta.special()`. A table record for the whole constraint takes
    /// precedence; otherwise tangency-free constraints are split.
    pub fn nr_total(&self, d1: u32, d2: u32, delta: &Constraint, c: u32) -> Result<BigInt> {
        let query = FamilyQuery::nr(d1, d2, Conditions::Whole(delta.clone()), c)?;
        if let Some(v) = self.table.lookup(&query) {
            return Ok(v.clone());
        }
        if delta.tangency() > 0 {
            return Err(Error::missing(query.key()));
        }
        let k = delta.special_or_zero();
        let mut tally = Tally::new();
        for split in delta.clone().with_special(None).splits()? {
            let g1 = split.first.with_special(Some(k));
            tally.add(split.multiplicity, || {
                self.nr_count(d1, d2, &g1, &split.second, c)
            })?;
        }
        tally.finish()
    }

    /// `RR2` summed over all splits of `delta`, which carries no special
    /// condition.
    pub fn rr2_total(
        &self,
        d1: u32,
        d2: u32,
        delta: &Constraint,
        k: u32,
        l: u32,
    ) -> Result<BigInt> {
        let query = FamilyQuery::rr2(d1, d2, Conditions::Whole(delta.clone()), k, l)?;
        if let Some(v) = self.table.lookup(&query) {
            return Ok(v.clone());
        }
        if delta.tangency() > 0 {
            return Err(Error::missing(query.key()));
        }
        let mut tally = Tally::new();
        for split in delta.splits()? {
            tally.add(split.multiplicity, || {
                self.rr2_count(d1, d2, &split.first, &split.second, k, l)
            })?;
        }
        tally.finish()
    }
}

fn split_parts(q: &FamilyQuery) -> (Constraint, Constraint) {
    match q.conditions() {
        Conditions::Split(a, b) => (a.clone(), b.clone()),
        Conditions::Whole(_) => unreachable!("constructed from a split"),
    }
}

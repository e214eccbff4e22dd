//! Constraint tuples and the curve families they are imposed on.
//!
//! A [`Constraint`] stores, for an ambient `P^r`, how many hyperplanes the curve
//! must be tangent to, how many general linear subspaces of each codimension it
//! must meet, and optionally the codimension of a general linear subspace that
//! the node or cusp must lie on. Subspaces of equal codimension are
//! interchangeable, so only the counts are kept.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{binomial, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    r: u32,
    tangency: u32,
    hyperplanes: u32,
    /// `incidence[i - 2]` counts the codimension-`i` subspaces, `i = 2..=r`.
    incidence: Vec<u32>,
    special: Option<u32>,
}

/// Outcome of the constraint ordering. `Equal` means no rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Priority {
    Less,
    Greater,
    Equal,
}

/// Constraints derived for the four-point relation whose two extra markings
/// carry hyperplane conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullDerived {
    /// One extra codimension-2 subspace.
    pub prime: Constraint,
    /// Special codimension raised by one.
    pub double_prime: Constraint,
    /// `min(tangency, r - k)`.
    pub m: u32,
    /// `(l, Δ_l)` for `l = 1..=m`: `l` tangencies traded for `l` hyperplanes
    /// through the special point.
    pub lowered: Vec<(u32, Constraint)>,
}

/// Constraints derived when two linear spaces `p`, `q` of the constraint are
/// moved onto the extra markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDerived {
    /// The constraint with `p` and `q` removed.
    pub tilde: Constraint,
    /// `tilde` plus `p ∩ q`; `None` when the intersection is empty.
    pub prime: Option<Constraint>,
    /// `p` removed, special codimension raised by `codim(p)`.
    pub at_p: Constraint,
    /// `q` removed, special codimension raised by `codim(q)`.
    pub at_q: Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub first: Constraint,
    pub second: Constraint,
    pub multiplicity: BigInt,
}

impl Constraint {
    pub fn new(r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::validation(
                "r",
                format!("ambient dimension must be >= 2, got {r}"),
            ));
        }
        Ok(Self {
            r,
            tangency: 0,
            hyperplanes: 0,
            incidence: vec![0; (r - 1) as usize],
            special: None,
        })
    }

    /// `n` general points of `P^r`.
    pub fn points(r: u32, n: u32) -> Result<Self> {
        Self::new(r)?.with_incidence(r, n)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn tangency(&self) -> u32 {
        self.tangency
    }

    pub fn hyperplanes(&self) -> u32 {
        self.hyperplanes
    }

    /// Number of incidence conditions of codimension `codim` (hyperplanes for 1).
    pub fn incidence(&self, codim: u32) -> u32 {
        match codim {
            1 => self.hyperplanes,
            c if c >= 2 && c <= self.r => self.incidence[(c - 2) as usize],
            _ => 0,
        }
    }

    pub fn special(&self) -> Option<u32> {
        self.special
    }

    pub fn special_or_zero(&self) -> u32 {
        self.special.unwrap_or(0)
    }

    pub fn with_tangency(mut self, t: u32) -> Self {
        self.tangency = t;
        self
    }

    pub fn with_hyperplanes(mut self, h: u32) -> Self {
        self.hyperplanes = h;
        self
    }

    pub fn with_incidence(mut self, codim: u32, count: u32) -> Result<Self> {
        match codim {
            1 => self.hyperplanes = count,
            c if c >= 2 && c <= self.r => self.incidence[(c - 2) as usize] = count,
            c => {
                return Err(Error::validation(
                    "incidence",
                    format!("codimension {c} outside 1..={}", self.r),
                ))
            }
        }
        Ok(self)
    }

    pub fn with_special(mut self, special: Option<u32>) -> Self {
        self.special = special;
        self
    }

    /// True when the special point is asked to lie on a space of codimension
    /// larger than `r`, which no curve can satisfy.
    pub fn is_empty_condition(&self) -> bool {
        self.special.is_some_and(|k| k > self.r)
    }

    /// Codimensions `2..=r` with their counts.
    pub fn incidence_counts(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.incidence
            .iter()
            .enumerate()
            .map(|(i, &n)| (i as u32 + 2, n))
    }

    /// Number of incidence subspaces of codimension at least 2.
    pub fn linear_space_count(&self) -> u32 {
        self.incidence.iter().sum()
    }

    /// Tangencies count 1, a codimension-`i` incidence counts `i - 1`,
    /// hyperplane incidences count 0, the special point counts its codimension.
    pub fn cond_weight(&self) -> u64 {
        let inc: u64 = self
            .incidence_counts()
            .map(|(c, n)| u64::from(n) * u64::from(c - 1))
            .sum();
        u64::from(self.tangency) + inc + u64::from(self.special_or_zero())
    }

    pub fn rank(&self) -> i64 {
        -self
            .incidence_counts()
            .map(|(c, n)| i64::from(n) * i64::from(c) * i64::from(c))
            .sum::<i64>()
    }

    /// Termination ordering on constraints.
    ///
    /// Rules in priority order: equal tangency count and fewer non-hyperplane
    /// spaces is smaller; more tangencies is smaller; smaller rank is smaller.
    pub fn compare(&self, other: &Constraint) -> Result<Priority> {
        if self.r != other.r {
            return Err(Error::validation(
                "constraint",
                format!(
                    "cannot compare constraints in P^{} and P^{}",
                    self.r, other.r
                ),
            ));
        }
        let by_rule = if self.tangency == other.tangency {
            match self.linear_space_count().cmp(&other.linear_space_count()) {
                Ordering::Equal => self.rank().cmp(&other.rank()),
                o => o,
            }
        } else {
            other.tangency.cmp(&self.tangency)
        };
        Ok(match by_rule {
            Ordering::Less => Priority::Less,
            Ordering::Greater => Priority::Greater,
            Ordering::Equal => Priority::Equal,
        })
    }

    /// Adds one general subspace of codimension `codim`. Returns `None` for
    /// `codim > r`, an empty condition.
    pub fn add_space(&self, codim: u32) -> Option<Self> {
        let mut out = self.clone();
        match codim {
            0 => return Some(out),
            1 => out.hyperplanes += 1,
            c if c <= self.r => out.incidence[(c - 2) as usize] += 1,
            _ => return None,
        }
        Some(out)
    }

    pub fn remove_space(&self, codim: u32) -> Result<Self> {
        let mut out = self.clone();
        let slot = match codim {
            1 => &mut out.hyperplanes,
            c if c >= 2 && c <= self.r => &mut out.incidence[(c - 2) as usize],
            c => {
                return Err(Error::validation(
                    "linear space",
                    format!("codimension {c} outside 1..={}", self.r),
                ))
            }
        };
        if *slot == 0 {
            return Err(Error::validation(
                "linear space",
                format!("no codimension-{codim} space present in {self}"),
            ));
        }
        *slot -= 1;
        Ok(out)
    }

    fn raise_special(&self, by: u32) -> Self {
        self.clone().with_special(Some(self.special_or_zero() + by))
    }

    /// `Δ_l`: `l` tangencies replaced by `l` hyperplanes through the special point.
    pub fn lowered(&self, l: u32) -> Result<Self> {
        let m = self
            .tangency
            .min(self.r.saturating_sub(self.special_or_zero()));
        if l == 0 || l > m {
            return Err(Error::validation("l", format!("{l} outside 1..={m}")));
        }
        let mut out = self.raise_special(l);
        out.tangency -= l;
        Ok(out)
    }

    pub fn full_derivations(&self) -> FullDerived {
        let mut prime = self.clone();
        if let Some(slot) = prime.incidence.first_mut() {
            *slot += 1;
        }
        let m = self
            .tangency
            .min(self.r.saturating_sub(self.special_or_zero()));
        let lowered = (1..=m)
            .map(|l| (l, self.lowered(l).expect("l within 1..=m")))
            .collect();
        FullDerived {
            prime,
            double_prime: self.raise_special(1),
            m,
            lowered,
        }
    }

    pub fn pair_derivations(&self, p: u32, q: u32) -> Result<PairDerived> {
        let without_p = self.remove_space(p)?;
        let tilde = without_p.remove_space(q)?;
        let without_q = self.remove_space(q)?;
        Ok(PairDerived {
            prime: tilde.add_space(p + q),
            at_p: without_p.raise_special(p),
            at_q: without_q.raise_special(q),
            tilde,
        })
    }

    /// Every way of distributing the tangencies and linear spaces over two
    /// components, with binomial multiplicities for interchangeable conditions.
    pub fn splits(&self) -> Result<Vec<Split>> {
        if self.special.is_some() {
            return Err(Error::validation(
                "constraint",
                "the special point condition is not split across components",
            ));
        }
        // slot 0 = tangency, 1 = hyperplanes, 2.. = incidence codim 2..=r
        let totals: Vec<u32> = [self.tangency, self.hyperplanes]
            .into_iter()
            .chain(self.incidence.iter().copied())
            .collect();
        let mut out = Vec::new();
        let mut take = vec![0u32; totals.len()];
        loop {
            let mut first = Constraint::new(self.r)?;
            let mut second = Constraint::new(self.r)?;
            let mut mult = BigInt::one();
            for (slot, (&a, &n)) in take.iter().zip(&totals).enumerate() {
                mult *= binomial(i64::from(n), i64::from(a));
                first.set_slot(slot, a);
                second.set_slot(slot, n - a);
            }
            out.push(Split {
                first,
                second,
                multiplicity: mult,
            });
            // odometer increment, last slot fastest
            let mut i = take.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if take[i] < totals[i] {
                    take[i] += 1;
                    break;
                }
                take[i] = 0;
            }
        }
    }

    fn set_slot(&mut self, slot: usize, v: u32) {
        match slot {
            0 => self.tangency = v,
            1 => self.hyperplanes = v,
            s => self.incidence[s - 2] = v,
        }
    }

    /// Drops the hyperplane incidences, returning the factor `degree^h` the
    /// count must be multiplied by.
    pub fn normalize_hyperplanes(&self, degree: u32) -> (Self, BigInt) {
        let scalar = BigInt::from(degree).pow(self.hyperplanes);
        (self.clone().with_hyperplanes(0), scalar)
    }

    /// Parses the canonical text form for a known ambient dimension.
    /// Omitted `c<i>` fields default to zero.
    pub fn parse(text: &str, r: u32) -> Result<Self> {
        let mut out = Constraint::new(r)?;
        let mut seen_t = false;
        let mut seen_h = false;
        for field in text.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (name, value) = field.split_once('=').ok_or_else(|| {
                Error::validation("constraint", format!("malformed field `{field}`"))
            })?;
            let name = name.trim();
            let value = value.trim();
            if name == "s" {
                out.special = match value {
                    "none" | "-" => None,
                    v => Some(parse_count(name, v)?),
                };
                continue;
            }
            let n = parse_count(name, value)?;
            match name {
                "t" => {
                    out.tangency = n;
                    seen_t = true;
                }
                "h" => {
                    out.hyperplanes = n;
                    seen_h = true;
                }
                c if c.starts_with('c') => {
                    let codim: u32 = c[1..].parse().map_err(|_| {
                        Error::validation("constraint", format!("unknown field `{c}`"))
                    })?;
                    if codim < 2 || codim > r {
                        return Err(Error::validation(
                            "constraint",
                            format!("field `{c}` outside c2..c{r}"),
                        ));
                    }
                    out.incidence[(codim - 2) as usize] = n;
                }
                other => {
                    return Err(Error::validation(
                        "constraint",
                        format!("unknown field `{other}`"),
                    ))
                }
            }
        }
        if !seen_t || !seen_h {
            return Err(Error::validation(
                "constraint",
                format!("`{text}` lacks t= or h="),
            ));
        }
        Ok(out)
    }
}

fn parse_count(name: &str, value: &str) -> Result<u32> {
    value
        .parse()
        .map_err(|_| Error::validation("constraint", format!("`{name}={value}` is not a count")))
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={};h={}", self.tangency, self.hyperplanes)?;
        for (c, n) in self.incidence_counts() {
            write!(f, ";c{c}={n}")?;
        }
        match self.special {
            Some(k) => write!(f, ";s={k}"),
            None => write!(f, ";s=none"),
        }
    }
}

/// The families of stable maps the recursions range over.
///
/// * `R`: rational curves of degree `d`.
/// * `N`: rational curves with marked points `A`, `B` mapping to the same
///   point (a node); counts distinguish the two branches.
/// * `S`: rational curves with a marked point `A` where the differential
///   vanishes (a cusp).
/// * `NR`: a nodal curve of degree `d1` and a rational curve of degree `d2`
///   glued at a marked point `C`; the nodal component comes first.
/// * `RR2`: two rational curves of degrees `d1`, `d2` glued at `C` and
///   meeting again at `A = B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    R { d: u32 },
    N { d: u32 },
    S { d: u32 },
    NR { d1: u32, d2: u32 },
    RR2 { d1: u32, d2: u32 },
}

/// Conditions at the joining points of a two-component family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Joint {
    /// `C` lies on `c` general hyperplanes.
    Meeting { c: u32 },
    /// `A = B` lies on `k` and `C` on `l` general hyperplanes.
    TwoNodal { k: u32, l: u32 },
}

impl FamilyId {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FamilyId::R { d } | FamilyId::N { d } | FamilyId::S { d } => d > 0,
            FamilyId::NR { d1, d2 } | FamilyId::RR2 { d1, d2 } => d1 > 0 && d2 > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(
                "degree",
                format!("{self:?} needs positive degrees"),
            ))
        }
    }

    pub fn total_degree(&self) -> u32 {
        match *self {
            FamilyId::R { d } | FamilyId::N { d } | FamilyId::S { d } => d,
            FamilyId::NR { d1, d2 } | FamilyId::RR2 { d1, d2 } => d1 + d2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FamilyId::R { .. } => "R",
            FamilyId::N { .. } => "N",
            FamilyId::S { .. } => "S",
            FamilyId::NR { .. } => "NR",
            FamilyId::RR2 { .. } => "RR2",
        }
    }

    /// Condition weight a finite query on this family must carry in `P^r`.
    pub fn dimension(&self, r: u32) -> i64 {
        let (r, d) = (i64::from(r), i64::from(self.total_degree()));
        match self {
            FamilyId::R { .. } => (r + 1) * d + r - 3,
            FamilyId::N { .. } => (r + 1) * d - 1,
            FamilyId::S { .. } | FamilyId::NR { .. } | FamilyId::RR2 { .. } => (r + 1) * d - 2,
        }
    }

    /// Finiteness of a single-constraint query on `R`, `N` or `S`.
    pub fn is_finite(&self, delta: &Constraint) -> Result<bool> {
        self.validate()?;
        match self {
            FamilyId::R { .. } if delta.special.is_some() => Err(Error::validation(
                "constraint",
                "family R has no node or cusp to constrain",
            )),
            FamilyId::R { .. } | FamilyId::N { .. } | FamilyId::S { .. } => {
                Ok(delta.cond_weight() as i64 == self.dimension(delta.r))
            }
            _ => Err(Error::validation(
                "family",
                format!("{} takes one constraint per component", self.label()),
            )),
        }
    }

    /// Finiteness of a two-component query.
    pub fn is_finite_pair(
        &self,
        first: &Constraint,
        second: &Constraint,
        joint: Joint,
    ) -> Result<bool> {
        self.validate()?;
        if first.r != second.r {
            return Err(Error::validation(
                "constraint",
                "components live in different P^r",
            ));
        }
        let joint_weight = match (self, joint) {
            (FamilyId::NR { .. }, Joint::Meeting { c }) => c,
            (FamilyId::RR2 { .. }, Joint::TwoNodal { k, l }) => k + l,
            _ => {
                return Err(Error::validation(
                    "joint",
                    format!("{:?} does not match family {}", joint, self.label()),
                ))
            }
        };
        let total = first.cond_weight() + second.cond_weight() + u64::from(joint_weight);
        Ok(total as i64 == self.dimension(first.r))
    }
}

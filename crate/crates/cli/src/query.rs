use clap::{Args, ValueEnum};
use cusp_core::{Conditions, Constraint, FamilyId, FamilyQuery};

use crate::{CliError, Common};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "S")]
    S,
    #[value(name = "N")]
    N,
    #[value(name = "R")]
    R,
    #[value(name = "NR")]
    Nr,
    #[value(name = "RR2")]
    Rr2,
}

#[derive(Args)]
pub struct QueryArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub family: Family,
    /// Dimension of the ambient projective space.
    #[arg(long)]
    pub r: u32,
    /// Degree, for S, N and R.
    #[arg(long)]
    pub d: Option<u32>,
    /// Degree of the first (for NR: nodal) component.
    #[arg(long)]
    pub d1: Option<u32>,
    #[arg(long)]
    pub d2: Option<u32>,
    /// Number of tangent hyperplanes.
    #[arg(long, default_value_t = 0)]
    pub tangent: u32,
    /// Incidence with COUNT general subspaces of codimension CODIM (>= 2).
    #[arg(long = "inc", value_name = "CODIM:COUNT", value_parser = parse_inc)]
    pub inc: Vec<(u32, u32)>,
    /// Incidence hyperplanes.
    #[arg(long, default_value_t = 0)]
    pub hyperplanes: u32,
    /// Codimension of the subspace holding the cusp (S) or node (N, NR).
    #[arg(long = "special-codim")]
    pub special_codim: Option<u32>,
    /// RR2: hyperplanes through the second meeting point.
    #[arg(long = "joint-k", default_value_t = 0)]
    pub joint_k: u32,
    /// RR2: hyperplanes through the gluing point.
    #[arg(long = "joint-l", default_value_t = 0)]
    pub joint_l: u32,
    /// NR: hyperplanes through the gluing point.
    #[arg(long = "joint-c", default_value_t = 0)]
    pub joint_c: u32,
    #[command(flatten)]
    pub common: Common,
}

fn parse_inc(s: &str) -> Result<(u32, u32), String> {
    let (c, n) = s
        .split_once(':')
        .ok_or_else(|| format!("expected CODIM:COUNT, got `{s}`"))?;
    let c: u32 = c
        .trim()
        .parse()
        .map_err(|_| format!("bad codimension `{c}`"))?;
    let n: u32 = n.trim().parse().map_err(|_| format!("bad count `{n}`"))?;
    Ok((c, n))
}

impl QueryArgs {
    fn constraint(&self) -> Result<Constraint, CliError> {
        let mut c = Constraint::new(self.r)
            .map_err(|e| CliError::usage("--r", e.to_string()))?
            .with_tangency(self.tangent)
            .with_hyperplanes(self.hyperplanes);
        for &(codim, count) in &self.inc {
            if codim < 2 || codim > self.r {
                return Err(CliError::usage(
                    "--inc",
                    format!(
                        "codimension {codim} outside 2..={} (use --hyperplanes for codimension 1)",
                        self.r
                    ),
                ));
            }
            let have = c.incidence(codim);
            c = c
                .with_incidence(codim, have + count)
                .map_err(|e| CliError::usage("--inc", e.to_string()))?;
        }
        Ok(c)
    }

    fn single_degree(&self) -> Result<u32, CliError> {
        if self.d1.is_some() || self.d2.is_some() {
            return Err(CliError::usage("--d1", "only NR and RR2 take --d1/--d2"));
        }
        match self.d {
            Some(0) | None => Err(CliError::usage("--d", "a positive degree is required")),
            Some(d) => Ok(d),
        }
    }

    fn degree_pair(&self) -> Result<(u32, u32), CliError> {
        if self.d.is_some() {
            return Err(CliError::usage("--d", "NR and RR2 take --d1 and --d2"));
        }
        match (self.d1, self.d2) {
            (Some(a), Some(b)) if a > 0 && b > 0 => Ok((a, b)),
            (None, _) | (Some(0), _) => {
                Err(CliError::usage("--d1", "a positive degree is required"))
            }
            _ => Err(CliError::usage("--d2", "a positive degree is required")),
        }
    }

    fn reject(&self, flag: &'static str, set: bool) -> Result<(), CliError> {
        if set {
            Err(CliError::usage(flag, "not meaningful for this family"))
        } else {
            Ok(())
        }
    }

    /// Builds the canonical query and checks its dimension.
    pub fn to_query(&self) -> Result<FamilyQuery, CliError> {
        let delta = self.constraint()?;
        let single_joint = self.joint_k != 0 || self.joint_l != 0 || self.joint_c != 0;
        let q = match self.family {
            Family::S | Family::N | Family::R => {
                self.reject("--joint-k", single_joint)?;
                let d = self.single_degree()?;
                let (family, delta) = match self.family {
                    Family::R => {
                        self.reject("--special-codim", self.special_codim.is_some())?;
                        (FamilyId::R { d }, delta)
                    }
                    Family::N => (
                        FamilyId::N { d },
                        delta.with_special(Some(self.special_codim.unwrap_or(0))),
                    ),
                    _ => (
                        FamilyId::S { d },
                        delta.with_special(Some(self.special_codim.unwrap_or(0))),
                    ),
                };
                FamilyQuery::single(family, delta)?
            }
            Family::Nr => {
                self.reject("--joint-k", self.joint_k != 0)?;
                self.reject("--joint-l", self.joint_l != 0)?;
                let (d1, d2) = self.degree_pair()?;
                let delta = delta.with_special(Some(self.special_codim.unwrap_or(0)));
                FamilyQuery::nr(d1, d2, Conditions::Whole(delta), self.joint_c)?
            }
            Family::Rr2 => {
                self.reject("--joint-c", self.joint_c != 0)?;
                self.reject("--special-codim", self.special_codim.is_some())?;
                let (d1, d2) = self.degree_pair()?;
                FamilyQuery::rr2(d1, d2, Conditions::Whole(delta), self.joint_k, self.joint_l)?
            }
        };
        if !q.is_finite()? {
            let (normalized, _) = match q.conditions() {
                Conditions::Whole(d) => d.normalize_hyperplanes(1),
                Conditions::Split(a, _) => a.normalize_hyperplanes(1),
            };
            let joint = match q.joint() {
                Some(cusp_core::Joint::Meeting { c }) => u64::from(c),
                Some(cusp_core::Joint::TwoNodal { k, l }) => u64::from(k + l),
                None => 0,
            };
            return Err(CliError::usage(
                "--inc",
                format!(
                    "condition weight {} does not match the {} required by {} in P^{}",
                    normalized.cond_weight() + joint,
                    q.family().dimension(self.r),
                    q.family().label(),
                    self.r
                ),
            ));
        }
        Ok(q)
    }
}

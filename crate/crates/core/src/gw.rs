//! Genus-0 Gromov–Witten invariants of `P^r` with primary insertions.
//!
//! Invariants are reduced by the associativity (WDVV) relation with one
//! distinguished hyperplane insertion, until only the line through two points
//! remains. Insertions are powers of the hyperplane class, written by their
//! codimension.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{binomial, Error, Result};

/// A request for `<h^{a_1}, ..., h^{a_n}>_{0,d}` on `P^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GwQuery {
    r: u32,
    d: u32,
    insertions: Vec<u32>,
}

impl GwQuery {
    pub fn new(r: u32, d: u32, mut insertions: Vec<u32>) -> Result<Self> {
        if r < 1 {
            return Err(Error::validation("r", "ambient dimension must be positive"));
        }
        if let Some(&a) = insertions.iter().find(|&&a| a > r) {
            return Err(Error::validation(
                "insertion",
                format!("codimension {a} exceeds r = {r}"),
            ));
        }
        insertions.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { r, d, insertions })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Insertion codimensions, sorted descending.
    pub fn insertions(&self) -> &[u32] {
        &self.insertions
    }

    /// `Σ(a_i - 1) = (r+1)d + r - 3`.
    pub fn passes_dimension_gate(&self) -> bool {
        dimension_gate(self.r, self.d, &self.insertions)
    }
}

fn dimension_gate(r: u32, d: u32, ins: &[u32]) -> bool {
    let lhs: i64 = ins.iter().map(|&a| i64::from(a) - 1).sum();
    lhs == i64::from(r + 1) * i64::from(d) + i64::from(r) - 3
}

/// Memo key: insertions of codimension >= 2 only, sorted descending.
type Key = (u32, u32, Vec<u32>);

#[derive(Debug, Default)]
pub struct GwEngine {
    memo: RwLock<HashMap<Key, BigInt>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

impl GwEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn gw_pr(&self, q: &GwQuery) -> BigInt {
        self.eval(q.r, q.d, &q.insertions)
    }

    /// Like [`GwEngine::gw_pr`] but accepts codimensions above `r`, which
    /// stand for the zero class.
    pub(crate) fn eval(&self, r: u32, d: u32, ins: &[u32]) -> BigInt {
        if ins.iter().any(|&a| a > r) {
            return BigInt::zero();
        }
        if d == 0 {
            let sum: u32 = ins.iter().sum();
            return if ins.len() == 3 && sum == r {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        }
        if ins.contains(&0) || !dimension_gate(r, d, ins) {
            return BigInt::zero();
        }
        let divisors = ins.iter().filter(|&&a| a == 1).count() as u32;
        let mut rest: Vec<u32> = ins.iter().copied().filter(|&a| a >= 2).collect();
        rest.sort_unstable_by(|a, b| b.cmp(a));
        BigInt::from(d).pow(divisors) * self.reduced(r, d, rest)
    }

    fn reduced(&self, r: u32, d: u32, ins: Vec<u32>) -> BigInt {
        if ins.len() < 3 {
            // After the dimension gate only the line through two points survives.
            return if d == 1 && ins.len() == 2 && ins.iter().all(|&a| a == r) {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        }
        let key = (r, d, ins);
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v.clone();
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = self.wdvv_step(r, d, &key.2);
        self.memo
            .write()
            .unwrap()
            .entry(key)
            .or_insert(value)
            .clone()
    }

    /// One associativity step. With insertions sorted descending, `a` is the
    /// smallest codimension, `b` and `c` the next two; the relation is taken
    /// for `(h, h^{a-1} | h^b, h^c)` and solved for the term carrying `h^a`.
    fn wdvv_step(&self, r: u32, d: u32, ins: &[u32]) -> BigInt {
        let n = ins.len();
        let (a, b, c) = (ins[n - 1], ins[n - 2], ins[n - 3]);
        let rest = &ins[..n - 3];
        let with = |extra: &[u32]| -> Vec<u32> { rest.iter().chain(extra).copied().collect() };
        let dd = BigInt::from(d);

        let mut total = self.eval(r, d, &with(&[b + 1, a - 1, c]));
        total += &dd * self.eval(r, d, &with(&[b, a - 1 + c]));
        total -= &dd * self.eval(r, d, &with(&[a - 1, b + c]));

        let counts = codim_counts(r, rest);
        for d1 in 1..d {
            let d2 = d - d1;
            for (part_a, part_b, mult) in multiset_splits(&counts) {
                let mut mixed = BigInt::zero();
                for e in 0..=r {
                    let f = r - e;
                    let right = self.eval(r, d1, &join(&part_a, &[b, e]))
                        * self.eval(r, d2, &join(&part_b, &[f, a - 1, c]));
                    let left = self.eval(r, d1, &join(&part_a, &[a - 1, e]))
                        * self.eval(r, d2, &join(&part_b, &[f, b, c]));
                    mixed += right - left;
                }
                total += mult * BigInt::from(d1) * mixed;
            }
        }
        total
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.memo.read().unwrap().len(),
        }
    }

    /// Memoized values, sorted by canonical record text.
    pub fn entries(&self) -> Vec<(GwQuery, BigInt)> {
        let memo = self.memo.read().unwrap();
        let mut out: Vec<_> = memo
            .iter()
            .map(|((r, d, ins), v)| {
                (
                    GwQuery {
                        r: *r,
                        d: *d,
                        insertions: ins.clone(),
                    },
                    v.clone(),
                )
            })
            .collect();
        out.sort_by_key(|a| record_key(&a.0));
        out
    }

    /// Loads a cache file into the memo. A missing file is an empty cache.
    /// Nothing is inserted unless every line parses.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let records = parse_cache(path, &text)?;
        let n = records.len();
        let mut memo = self.memo.write().unwrap();
        for (q, v) in records {
            memo.insert((q.r, q.d, q.insertions), v);
        }
        Ok(n)
    }

    /// Writes the union of the file's records and the memo through a
    /// temporary file and a rename. A corrupt existing file is left untouched
    /// and reported.
    pub fn save(&self, path: &Path) -> Result<usize> {
        let mut merged: HashMap<String, String> = HashMap::new();
        if let Ok(text) = fs::read_to_string(path) {
            for (q, v) in parse_cache(path, &text)? {
                merged.insert(record_key(&q), v.to_string());
            }
        }
        for (q, v) in self.entries() {
            merged.insert(record_key(&q), v.to_string());
        }
        let mut lines: Vec<String> = merged
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        lines.sort();

        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let file_name = path.file_name().ok_or_else(|| {
            Error::validation("cache", format!("{} is not a file path", path.display()))
        })?;
        let tmp = dir.join(format!(
            ".{}.tmp{}",
            file_name.to_string_lossy(),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            for line in &lines {
                writeln!(f, "{line}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(lines.len())
    }
}

/// `r,d,a1,a2,...` with insertions descending.
pub fn record_key(q: &GwQuery) -> String {
    let mut s = format!("{},{}", q.r, q.d);
    for a in &q.insertions {
        s.push(',');
        s.push_str(&a.to_string());
    }
    s
}

fn parse_cache(path: &Path, text: &str) -> Result<Vec<(GwQuery, BigInt)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `r,d,insertions=value`, got `{line}`")))?;
        let nums: Vec<u32> = lhs
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(format!("non-numeric field in `{lhs}`")))?;
        if nums.len() < 2 {
            return Err(err("missing r or d".into()));
        }
        let q =
            GwQuery::new(nums[0], nums[1], nums[2..].to_vec()).map_err(|e| err(e.to_string()))?;
        if q.insertions.iter().any(|&a| a < 2) {
            return Err(err("cached insertions must have codimension >= 2".into()));
        }
        let v: BigInt = rhs
            .trim()
            .parse()
            .map_err(|_| err(format!("`{}` is not an integer", rhs.trim())))?;
        if v < BigInt::zero() {
            return Err(err("negative invariant".into()));
        }
        out.push((q, v));
    }
    Ok(out)
}

fn join(part: &[u32], extra: &[u32]) -> Vec<u32> {
    part.iter().chain(extra).copied().collect()
}

/// `counts[i]` = number of insertions of codimension `i`.
fn codim_counts(r: u32, ins: &[u32]) -> Vec<u32> {
    let mut counts = vec![0u32; r as usize + 1];
    for &a in ins {
        counts[a as usize] += 1;
    }
    counts
}

/// All sub-multisets `A` of the multiset given by `counts`, with complement
/// `B` and multiplicity `Π C(counts[i], |A_i|)`.
pub(crate) fn multiset_splits(counts: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, BigInt)> {
    let mut out = Vec::new();
    let mut take = vec![0u32; counts.len()];
    loop {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut mult = BigInt::one();
        for (codim, (&t, &n)) in take.iter().zip(counts).enumerate() {
            a.extend(std::iter::repeat_n(codim as u32, t as usize));
            b.extend(std::iter::repeat_n(codim as u32, (n - t) as usize));
            mult *= binomial(i64::from(n), i64::from(t));
        }
        out.push((a, b, mult));
        let mut i = take.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if take[i] < counts[i] {
                take[i] += 1;
                break;
            }
            take[i] = 0;
        }
    }
}

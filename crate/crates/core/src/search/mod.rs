//! Colorings of `[1, N]`, monochromatic progression checks, and exact
//! computation of small van der Waerden numbers.

pub(crate) mod engine;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::certificate::{Exhaustion, VdwCertificate};
use crate::error::{Error, Result};

use self::engine::{Limits, Verdict};

/// Largest number of colors the search engine handles.
pub const MAX_SEARCH_COLORS: u8 = engine::MAX_COLORS as u8;

/// An assignment of colors `1..=r` to the points `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawColoring", into = "RawColoring")]
pub struct Coloring {
    colors: Vec<u8>,
    num_colors: u8,
}

#[derive(Serialize, Deserialize)]
struct RawColoring {
    num_colors: u8,
    n_points: usize,
    colors: Vec<u8>,
}

impl From<Coloring> for RawColoring {
    fn from(c: Coloring) -> Self {
        RawColoring {
            num_colors: c.num_colors,
            n_points: c.colors.len(),
            colors: c.colors,
        }
    }
}

impl TryFrom<RawColoring> for Coloring {
    type Error = Error;

    fn try_from(raw: RawColoring) -> Result<Self> {
        if raw.n_points != raw.colors.len() {
            return Err(Error::InvalidColoring(format!(
                "n_points = {} but {} colors given",
                raw.n_points,
                raw.colors.len()
            )));
        }
        Coloring::new(raw.colors, raw.num_colors)
    }
}

impl Coloring {
    pub fn new(colors: Vec<u8>, num_colors: u8) -> Result<Self> {
        if num_colors < 2 {
            return Err(Error::InvalidColoring(format!(
                "need at least 2 colors, got {num_colors}"
            )));
        }
        if colors.is_empty() {
            return Err(Error::InvalidColoring("no points".into()));
        }
        if let Some(i) = colors.iter().position(|&c| c == 0 || c > num_colors) {
            return Err(Error::InvalidColoring(format!(
                "point {} has color {} outside 1..={num_colors}",
                i + 1,
                colors[i]
            )));
        }
        Ok(Coloring { colors, num_colors })
    }

    /// Parses a digit string such as `11221122`; commas or whitespace
    /// separate colors when `r > 9`.
    pub fn parse(text: &str, num_colors: u8) -> Result<Self> {
        let text = text.trim();
        let colors = if text.contains(|c: char| c == ',' || c.is_whitespace()) {
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|_| Error::InvalidColoring(format!("bad color {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::InvalidColoring(format!("bad color {ch:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Coloring::new(colors, num_colors)
    }

    pub fn n_points(&self) -> usize {
        self.colors.len()
    }

    pub fn num_colors(&self) -> u8 {
        self.num_colors
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Color of point `i` (1-based).
    pub fn color(&self, i: usize) -> u8 {
        self.colors[i - 1]
    }

    /// Renames colors in order of first appearance, so point 1 gets color 1.
    pub fn normalized(&self) -> Coloring {
        let mut map = [0u8; 256];
        let mut next = 0u8;
        let colors = self
            .colors
            .iter()
            .map(|&c| {
                if map[c as usize] == 0 {
                    next += 1;
                    map[c as usize] = next;
                }
                map[c as usize]
            })
            .collect();
        Coloring {
            colors,
            num_colors: self.num_colors,
        }
    }

    pub fn reversed(&self) -> Coloring {
        let mut colors = self.colors.clone();
        colors.reverse();
        Coloring {
            colors,
            num_colors: self.num_colors,
        }
    }

    /// Maximal runs of equal colors as `(color, length)`.
    pub fn runs(&self) -> Vec<(u8, usize)> {
        let mut out: Vec<(u8, usize)> = Vec::new();
        for &c in &self.colors {
            match out.last_mut() {
                Some((last, len)) if *last == c => *len += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    fn push(&mut self, c: u8) {
        self.colors.push(c);
    }

    /// Whether appending color `c` creates no monochromatic `k`-term
    /// progression ending at the new point.
    fn extends_with(&self, c: u8, k: usize) -> bool {
        let n = self.colors.len();
        (1..=n / (k - 1)).all(|d| (1..k).any(|i| self.colors[n - i * d] != c))
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num_colors <= 9 {
            for &c in &self.colors {
                write!(f, "{c}")?;
            }
        } else {
            for (i, c) in self.colors.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// A monochromatic progression `a, a+d, ..., a+(k-1)d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApWitness {
    pub a: u64,
    pub d: u64,
    pub k: u64,
    pub color: u8,
}

impl ApWitness {
    pub fn terms(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.k).map(move |i| self.a + i * self.d)
    }

    pub fn last(&self) -> u64 {
        self.a + (self.k - 1) * self.d
    }
}

impl fmt::Display for ApWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} d={} k={} color={}",
            self.a, self.d, self.k, self.color
        )
    }
}

/// Finds a monochromatic `k`-term progression, preferring the least
/// difference and then the least start.
pub fn verify(coloring: &Coloring, k: u64) -> Result<Option<ApWitness>> {
    if k < 3 {
        return Err(Error::ProgressionTooShort(k, 3));
    }
    let colors = coloring.colors();
    let n = colors.len() as u64;
    if n < k {
        return Ok(None);
    }
    for d in 1..=(n - 1) / (k - 1) {
        for a in 1..=n - (k - 1) * d {
            let c = colors[(a - 1) as usize];
            if (1..k).all(|i| colors[(a - 1 + i * d) as usize] == c) {
                return Ok(Some(ApWitness { a, d, k, color: c }));
            }
        }
    }
    Ok(None)
}

/// Number of `k`-term progressions inside `[1, n_points]`.
pub fn count_aps(n_points: u64, k: u64) -> Result<u64> {
    if k < 3 {
        return Err(Error::ProgressionTooShort(k, 3));
    }
    if n_points < k {
        return Ok(0);
    }
    let step = k - 1;
    let d_max = (n_points - 1) / step;
    // sum_{d=1..D} (N - step*d) = D*N - step*D(D+1)/2
    let total = d_max as u128 * n_points as u128 - step as u128 * (d_max as u128 * (d_max as u128 + 1) / 2);
    u64::try_from(total).map_err(|_| Error::InvalidArgument("progression count overflows u64".into()))
}

/// Node and wall-clock limits for a search. Exceeding either stops it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            time_limit: None,
        }
    }

    pub fn time(limit: Duration) -> Self {
        Budget {
            max_nodes: None,
            time_limit: Some(limit),
        }
    }

    pub fn with_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = Some(max_nodes);
        self
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    fn start(&self) -> Result<Limits> {
        if self.max_nodes == Some(0) || self.time_limit == Some(Duration::ZERO) {
            return Err(Error::InvalidArgument("search budget must be positive".into()));
        }
        let deadline = self.time_limit.map(|t| Instant::now() + t);
        Ok(Limits::new(self.max_nodes, deadline))
    }
}

/// Result of deciding whether one length admits a valid coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Witness(Coloring),
    Infeasible { nodes: u64 },
    Aborted { nodes: u64 },
}

/// What a budget-limited search established before stopping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialResult {
    pub r: u8,
    pub k: u64,
    /// Largest length with a known witness; `W(r,k) > lower_bound`.
    pub lower_bound: u64,
    pub witness: Coloring,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Exact(VdwCertificate),
    BudgetExceeded(PartialResult),
}

fn check_search_args(r: u8, k: u64) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 colors, got {r}")));
    }
    if r > MAX_SEARCH_COLORS {
        return Err(Error::InvalidArgument(format!(
            "search supports at most {MAX_SEARCH_COLORS} colors"
        )));
    }
    if k < 3 {
        return Err(Error::ProgressionTooShort(k, 3));
    }
    if k > u8::MAX as u64 {
        return Err(Error::InvalidArgument(format!("k = {k} is too large to search")));
    }
    Ok(())
}

fn decide(r: u8, k: u64, n: usize, limits: &Limits, threads: usize) -> Result<Feasibility> {
    let (verdict, nodes) = engine::solve_parallel(r as usize, k as usize, n, limits, threads);
    Ok(match verdict {
        Verdict::Feasible(colors) => Feasibility::Witness(Coloring::new(colors, r)?),
        Verdict::Infeasible => Feasibility::Infeasible { nodes },
        Verdict::Aborted => Feasibility::Aborted { nodes },
    })
}

/// Decides whether some `r`-coloring of `[1, n_points]` avoids every
/// monochromatic `k`-term progression.
pub fn feasibility(r: u8, k: u64, n_points: usize, budget: Budget) -> Result<Feasibility> {
    check_search_args(r, k)?;
    if n_points == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let limits = budget.start()?;
    decide(r, k, n_points, &limits, 1)
}

/// Computes `W(r, k)` by growing the length one point at a time: a
/// witness for `N - 1` is first extended greedily, and only when that
/// fails is `N` searched exhaustively. The first infeasible `N` is the
/// answer.
///
/// Single-threaded, so node counts and witnesses are reproducible.
pub fn search_exact(r: u8, k: u64, budget: Budget) -> Result<SearchOutcome> {
    search_exact_parallel(r, k, budget, 1)
}

/// [`search_exact`] with each exhaustive step split across `threads`
/// workers. The value found is the same; the witness and node count may
/// vary between runs when `threads > 1`.
pub fn search_exact_parallel(r: u8, k: u64, budget: Budget, threads: usize) -> Result<SearchOutcome> {
    check_search_args(r, k)?;
    if threads == 0 {
        return Err(Error::InvalidArgument("need at least one thread".into()));
    }
    let limits = budget.start()?;
    let ku = k as usize;
    let mut witness = Coloring::new(vec![1; ku - 1], r)?;
    loop {
        let n = witness.n_points() + 1;
        if let Some(c) = (1..=r).find(|&c| witness.extends_with(c, ku)) {
            witness.push(c);
            continue;
        }
        let mirrored = witness.reversed();
        if let Some(c) = (1..=r).find(|&c| mirrored.extends_with(c, ku)) {
            witness = mirrored;
            witness.push(c);
            witness = witness.reversed().normalized();
            continue;
        }
        match decide(r, k, n, &limits, threads)? {
            Feasibility::Witness(found) => witness = found,
            Feasibility::Infeasible { nodes: proof } => {
                let exhaustion = Exhaustion::in_process(proof);
                let cert = VdwCertificate::new(k, witness.normalized(), exhaustion)?;
                return Ok(SearchOutcome::Exact(cert));
            }
            Feasibility::Aborted { .. } => {
                return Ok(SearchOutcome::BudgetExceeded(PartialResult {
                    r,
                    k,
                    lower_bound: witness.n_points() as u64,
                    witness: witness.normalized(),
                    nodes: limits.nodes(),
                }));
            }
        }
    }
}

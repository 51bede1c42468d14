//! Two-sided certificates pinning an exact value `W(r, k) = w`: a witness
//! coloring of `[1, w-1]` with no monochromatic `k`-term progression, and an
//! attestation that no such coloring of `[1, w]` exists.
//!
//! The text form is line oriented, with fields in a fixed order:
//!
//! ```text
//! vdw-certificate v1
//! r 2
//! k 3
//! w 9
//! witness 8
//! colors 1 2*2 1*2 2*2 1
//! exhaustion in-process-dfs nodes=41
//! ```
//!
//! `colors` lines hold run-length tokens (`c` or `c*len`) and may repeat;
//! runs continue across lines. Lines starting with `#` and blank lines are
//! ignored. Witnesses are re-verified whenever a certificate is built or
//! parsed; exhaustion attestations are recorded as given.

use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{verify, Coloring};

const MAGIC: &str = "vdw-certificate v1";
const RUNS_PER_LINE: usize = 16;

/// Evidence that no valid coloring of `[1, w]` exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Exhaustion {
    InProcessDfs { node_count: u64 },
    ExternalUnsat { solver_id: String },
}

impl Exhaustion {
    pub fn in_process(node_count: u64) -> Self {
        Exhaustion::InProcessDfs { node_count }
    }

    pub fn external(solver_id: impl Into<String>) -> Self {
        Exhaustion::ExternalUnsat {
            solver_id: solver_id.into(),
        }
    }

    /// Whether the attestation was produced by this crate rather than
    /// taken on trust.
    pub fn is_in_process(&self) -> bool {
        matches!(self, Exhaustion::InProcessDfs { .. })
    }
}

impl fmt::Display for Exhaustion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exhaustion::InProcessDfs { node_count } => {
                write!(f, "in-process-dfs nodes={node_count}")
            }
            Exhaustion::ExternalUnsat { solver_id } => write!(f, "external-unsat solver={solver_id}"),
        }
    }
}

/// An external solver's claim that `[1, n_points]` has no valid coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnsatAttestation {
    pub r: u8,
    pub k: u64,
    pub n_points: u64,
    pub solver_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCertificate", into = "RawCertificate")]
pub struct VdwCertificate {
    r: u8,
    k: u64,
    w: u64,
    witness: Coloring,
    exhaustion: Exhaustion,
}

#[derive(Serialize, Deserialize)]
struct RawCertificate {
    r: u8,
    k: u64,
    w: u64,
    witness: Coloring,
    exhaustion: Exhaustion,
}

impl From<VdwCertificate> for RawCertificate {
    fn from(c: VdwCertificate) -> Self {
        RawCertificate {
            r: c.r,
            k: c.k,
            w: c.w,
            witness: c.witness,
            exhaustion: c.exhaustion,
        }
    }
}

impl TryFrom<RawCertificate> for VdwCertificate {
    type Error = Error;

    fn try_from(raw: RawCertificate) -> Result<Self> {
        let cert = VdwCertificate::new(raw.k, raw.witness, raw.exhaustion)?;
        if cert.r != raw.r || cert.w != raw.w {
            return Err(Error::CertificateRejected(format!(
                "header says r={} w={}, witness implies r={} w={}",
                raw.r, raw.w, cert.r, cert.w
            )));
        }
        Ok(cert)
    }
}

impl VdwCertificate {
    /// Builds a certificate for `w = witness.n_points() + 1`, rejecting a
    /// witness that contains a monochromatic `k`-term progression.
    pub fn new(k: u64, witness: Coloring, exhaustion: Exhaustion) -> Result<Self> {
        if let Some(ap) = verify(&witness, k)? {
            return Err(Error::CertificateRejected(format!(
                "witness contains a monochromatic progression {ap}"
            )));
        }
        Ok(VdwCertificate {
            r: witness.num_colors(),
            k,
            w: witness.n_points() as u64 + 1,
            witness,
            exhaustion,
        })
    }

    /// Combines a witness for `N - 1` with a solver's UNSAT claim for `N`.
    pub fn from_unsat(witness: Coloring, k: u64, unsat: &UnsatAttestation) -> Result<Self> {
        if unsat.r != witness.num_colors() || unsat.k != k {
            return Err(Error::CertificateRejected(format!(
                "attestation is for r={} k={}, witness for r={} k={k}",
                unsat.r,
                unsat.k,
                witness.num_colors()
            )));
        }
        if unsat.n_points != witness.n_points() as u64 + 1 {
            return Err(Error::CertificateRejected(format!(
                "attestation covers N={} but the witness has {} points",
                unsat.n_points,
                witness.n_points()
            )));
        }
        VdwCertificate::new(k, witness, Exhaustion::external(unsat.solver_id.clone()))
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn witness(&self) -> &Coloring {
        &self.witness
    }

    pub fn exhaustion(&self) -> &Exhaustion {
        &self.exhaustion
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "r {}", self.r);
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "w {}", self.w);
        let _ = writeln!(out, "witness {}", self.witness.n_points());
        for chunk in self.witness.runs().chunks(RUNS_PER_LINE) {
            out.push_str("colors");
            for &(c, len) in chunk {
                if len == 1 {
                    let _ = write!(out, " {c}");
                } else {
                    let _ = write!(out, " {c}*{len}");
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "exhaustion {}", self.exhaustion);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let last_line = text.lines().count().max(1);
        let mut expect = |key: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, l)) => {
                    let rest = if key.is_empty() {
                        Some(l)
                    } else {
                        l.strip_prefix(key).and_then(|r| r.strip_prefix(' '))
                    };
                    match rest {
                        Some(rest) => Ok((n, rest.trim().to_string())),
                        None => Err(parse_err(n, format!("expected `{key}` field"))),
                    }
                }
                None => Err(parse_err(last_line, format!("missing `{key}` field"))),
            }
        };

        let (n, magic) = expect("")?;
        if magic != MAGIC {
            return Err(parse_err(n, format!("expected `{MAGIC}` header")));
        }
        let r: u8 = number(expect("r")?)?;
        let k: u64 = number(expect("k")?)?;
        let w: u64 = number(expect("w")?)?;
        let (witness_line, len) = expect("witness")?;
        let len: usize = number((witness_line, len))?;
        if len > MAX_WITNESS_POINTS {
            return Err(parse_err(
                witness_line,
                format!("witness of {len} points exceeds the {MAX_WITNESS_POINTS}-point limit"),
            ));
        }

        let mut colors: Vec<u8> = Vec::with_capacity(len);
        let exhaustion = loop {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(last_line, "missing `exhaustion` field".into()))?;
            if let Some(rest) = line.strip_prefix("colors ") {
                for token in rest.split_whitespace() {
                    let (c, run) = match token.split_once('*') {
                        Some((c, run)) => (c, run),
                        None => (token, "1"),
                    };
                    let c: u8 = c
                        .parse()
                        .map_err(|_| parse_err(n, format!("bad color {c:?}")))?;
                    let run: usize = run
                        .parse()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| parse_err(n, format!("bad run length {run:?}")))?;
                    if colors.len() + run > len {
                        return Err(parse_err(
                            n,
                            format!("more colors than the declared {len} points"),
                        ));
                    }
                    colors.extend(std::iter::repeat_n(c, run));
                }
            } else if let Some(rest) = line.strip_prefix("exhaustion ") {
                break parse_exhaustion(n, rest.trim())?;
            } else {
                return Err(parse_err(n, "expected `colors` or `exhaustion` field".into()));
            }
        };
        if let Some((n, _)) = lines.next() {
            return Err(parse_err(n, "unexpected content after `exhaustion`".into()));
        }
        if colors.len() != len {
            return Err(parse_err(
                witness_line,
                format!("declared {len} points but {} colors given", colors.len()),
            ));
        }
        if w != len as u64 + 1 {
            return Err(Error::CertificateRejected(format!(
                "witness covers {len} points, expected w - 1 = {}",
                w.saturating_sub(1)
            )));
        }
        let witness = Coloring::new(colors, r).map_err(|e| Error::CertificateRejected(e.to_string()))?;
        VdwCertificate::new(k, witness, exhaustion)
    }
}

impl fmt::Display for VdwCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Largest witness a certificate file may declare.
pub const MAX_WITNESS_POINTS: usize = 1 << 20;

fn parse_err(line: usize, message: String) -> Error {
    Error::Parse { line, message }
}

fn number<T: std::str::FromStr>((line, text): (usize, String)) -> Result<T> {
    text.parse()
        .map_err(|_| parse_err(line, format!("expected an integer, found {text:?}")))
}

fn parse_exhaustion(line: usize, text: &str) -> Result<Exhaustion> {
    if let Some(rest) = text.strip_prefix("in-process-dfs nodes=") {
        let node_count = number((line, rest.to_string()))?;
        Ok(Exhaustion::InProcessDfs { node_count })
    } else if let Some(rest) = text.strip_prefix("external-unsat solver=") {
        let solver_id = rest.trim();
        if solver_id.is_empty() {
            return Err(parse_err(line, "empty solver id".into()));
        }
        Ok(Exhaustion::external(solver_id))
    } else {
        Err(parse_err(line, format!("unknown exhaustion method {text:?}")))
    }
}

const BUNDLED_TEXT: [&str; 7] = [
    include_str!("../data/certificates/w2_3.cert"),
    include_str!("../data/certificates/w2_4.cert"),
    include_str!("../data/certificates/w2_5.cert"),
    include_str!("../data/certificates/w2_6.cert"),
    include_str!("../data/certificates/w3_3.cert"),
    include_str!("../data/certificates/w3_4.cert"),
    include_str!("../data/certificates/w4_3.cert"),
];

/// Raw text of the certificates shipped with the crate.
pub fn bundled_text() -> &'static [&'static str] {
    &BUNDLED_TEXT
}

/// Certificates shipped with the crate, parsed and re-verified on first use.
pub fn bundled() -> &'static [VdwCertificate] {
    static CERTS: OnceLock<Vec<VdwCertificate>> = OnceLock::new();
    CERTS.get_or_init(|| {
        BUNDLED_TEXT
            .iter()
            .map(|t| VdwCertificate::parse(t).expect("bundled certificate is valid"))
            .collect()
    })
}

pub fn bundled_for(r: u8, k: u64) -> Option<&'static VdwCertificate> {
    bundled().iter().find(|c| c.r == r && c.k == k)
}

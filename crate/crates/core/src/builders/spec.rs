//! Textual graph specifications.
//!
//! ```text
//! cycle:<n>
//! petersen | k4 | klein | s3
//! free:m=<rank>[,r=<radius>]
//! fold:<word>{,<word>}[;rank=<m>][;r=<radius>]
//! randperm:m=<rank>,n=<points>,seed=<u64>
//! lps:p=<prime>,q=<prime>
//! file:<path to SGF1>
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{PermAction, SchreierGraph};
use crate::words::{GenSet, Word};

use super::{
    c4_klein, complete_ball, cycle, from_perm_action, k4, lps_graph, petersen, random_perm_action,
    s3_transpositions_action, stallings_core, trivial_core, CoreGraph,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Cycle(usize),
    Petersen,
    K4,
    Klein,
    S3,
    Free { rank: usize, radius: Option<u32> },
    Fold { rank: usize, words: Vec<String>, radius: Option<u32> },
    RandPerm { rank: usize, points: usize, seed: u64 },
    Lps { p: u64, q: u64 },
    File(String),
}

fn bad(spec: &str, why: impl fmt::Display) -> Error {
    Error::InvalidParameters(format!("graph spec `{spec}`: {why}"))
}

fn keyed<'a>(spec: &str, args: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    args.split(',')
        .map(|kv| kv.split_once('=').ok_or_else(|| bad(spec, format!("expected key=value, got `{kv}`"))))
        .collect()
}

fn num<T: std::str::FromStr>(spec: &str, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(spec, format!("{key}=`{v}` is not a valid number")))
}

impl GraphSpec {
    pub fn parse(spec: &str) -> Result<GraphSpec> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let no_args = |g: GraphSpec| match args {
            None => Ok(g),
            Some(_) => Err(bad(spec, "takes no arguments")),
        };
        let need = || args.ok_or_else(|| bad(spec, "missing arguments"));
        match name {
            "petersen" => no_args(GraphSpec::Petersen),
            "k4" => no_args(GraphSpec::K4),
            "klein" | "c4" => no_args(GraphSpec::Klein),
            "s3" => no_args(GraphSpec::S3),
            "cycle" => {
                let n: usize = num(spec, "n", need()?)?;
                if n == 0 {
                    return Err(bad(spec, "n must be positive"));
                }
                Ok(GraphSpec::Cycle(n))
            }
            "free" => {
                let (mut rank, mut radius) = (None, None);
                for (k, v) in keyed(spec, need()?)? {
                    match k {
                        "m" => rank = Some(num(spec, k, v)?),
                        "r" => radius = Some(num(spec, k, v)?),
                        _ => return Err(bad(spec, format!("unknown key `{k}`"))),
                    }
                }
                let rank = rank.ok_or_else(|| bad(spec, "missing m"))?;
                if rank == 0 {
                    return Err(bad(spec, "m must be positive"));
                }
                Ok(GraphSpec::Free { rank, radius })
            }
            "fold" => {
                let mut parts = need()?.split(';');
                let words: Vec<String> = parts
                    .next()
                    .unwrap_or("")
                    .split(',')
                    .map(|w| w.trim().to_string())
                    .filter(|w| !w.is_empty())
                    .collect();
                let (mut rank, mut radius) = (None, None);
                for p in parts {
                    let (k, v) = p.split_once('=').ok_or_else(|| bad(spec, format!("expected key=value, got `{p}`")))?;
                    match k {
                        "rank" => rank = Some(num(spec, k, v)?),
                        "r" => radius = Some(num(spec, k, v)?),
                        _ => return Err(bad(spec, format!("unknown key `{k}`"))),
                    }
                }
                let rank = rank.unwrap_or_else(|| inferred_rank(&words));
                let gens = GenSet::free(rank);
                for w in &words {
                    gens.parse_word(w).map_err(|e| bad(spec, e))?;
                }
                Ok(GraphSpec::Fold { rank, words, radius })
            }
            "randperm" => {
                let (mut m, mut n, mut seed) = (None, None, None);
                for (k, v) in keyed(spec, need()?)? {
                    match k {
                        "m" => m = Some(num(spec, k, v)?),
                        "n" => n = Some(num(spec, k, v)?),
                        "seed" => seed = Some(num(spec, k, v)?),
                        _ => return Err(bad(spec, format!("unknown key `{k}`"))),
                    }
                }
                let rank: usize = m.ok_or_else(|| bad(spec, "missing m"))?;
                let points: usize = n.ok_or_else(|| bad(spec, "missing n"))?;
                if rank == 0 || points == 0 {
                    return Err(bad(spec, "m and n must be positive"));
                }
                Ok(GraphSpec::RandPerm { rank, points, seed: seed.unwrap_or(0) })
            }
            "lps" => {
                let (mut p, mut q) = (None, None);
                for (k, v) in keyed(spec, need()?)? {
                    match k {
                        "p" => p = Some(num(spec, k, v)?),
                        "q" => q = Some(num(spec, k, v)?),
                        _ => return Err(bad(spec, format!("unknown key `{k}`"))),
                    }
                }
                Ok(GraphSpec::Lps {
                    p: p.ok_or_else(|| bad(spec, "missing p"))?,
                    q: q.ok_or_else(|| bad(spec, "missing q"))?,
                })
            }
            "file" => Ok(GraphSpec::File(need()?.to_string())),
            _ => Err(bad(spec, "unknown builder")),
        }
    }

    /// The folded core, for specs describing subgroups of a free group.
    pub fn core(&self) -> Result<Option<CoreGraph>> {
        match self {
            GraphSpec::Free { rank, .. } => Ok(Some(trivial_core(&GenSet::free(*rank)))),
            GraphSpec::Fold { rank, words, .. } => {
                let gens = GenSet::free(*rank);
                let ws: Vec<Word> = words.iter().map(|w| gens.parse_word(w)).collect::<Result<_>>()?;
                Ok(Some(stallings_core(&gens, &ws)?))
            }
            _ => Ok(None),
        }
    }

    /// The graph itself, or its ball when the spec is infinite.
    pub fn graph(&self) -> Result<SchreierGraph> {
        match self {
            GraphSpec::Cycle(n) => Ok(cycle(*n)),
            GraphSpec::Petersen => Ok(petersen()),
            GraphSpec::K4 => Ok(k4()),
            GraphSpec::Klein => Ok(c4_klein()),
            GraphSpec::S3 => Ok(from_perm_action(&s3_transpositions_action(), 0)),
            GraphSpec::Free { radius, .. } | GraphSpec::Fold { radius, .. } => {
                let core = self.core()?.expect("free and fold specs have cores");
                match radius {
                    Some(r) => Ok(complete_ball(&core, *r)),
                    None if core.is_complete() => core.to_graph(),
                    None => Err(Error::InvalidParameters(format!(
                        "`{self}` is infinite; add a radius (r=...)"
                    ))),
                }
            }
            GraphSpec::RandPerm { .. } => Ok(from_perm_action(&self.action()?, 0)),
            GraphSpec::Lps { p, q } => lps_graph(*p, *q),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameters(format!("cannot read {path}: {e}")))?;
                crate::sgf::parse(&text)
            }
        }
    }

    /// The permutation action behind a finite spec. For `randperm` this is
    /// the full action on all points, not only the orbit of 0.
    pub fn action(&self) -> Result<PermAction> {
        match self {
            GraphSpec::RandPerm { rank, points, seed } => Ok(random_perm_action(*rank, *points, *seed)),
            GraphSpec::Cycle(n) => PermAction::cyclic(*n),
            GraphSpec::S3 => Ok(s3_transpositions_action()),
            _ => {
                let g = self.graph()?;
                PermAction::from_graph(&g)
            }
        }
    }
}

fn inferred_rank(words: &[String]) -> usize {
    let top = words
        .iter()
        .flat_map(|w| w.chars())
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| (c.to_ascii_lowercase() as u8 - b'a') as usize + 1)
        .max()
        .unwrap_or(0);
    top.max(2)
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Petersen => write!(f, "petersen"),
            GraphSpec::K4 => write!(f, "k4"),
            GraphSpec::Klein => write!(f, "klein"),
            GraphSpec::S3 => write!(f, "s3"),
            GraphSpec::Free { rank, radius } => {
                write!(f, "free:m={rank}")?;
                if let Some(r) = radius {
                    write!(f, ",r={r}")?;
                }
                Ok(())
            }
            GraphSpec::Fold { rank, words, radius } => {
                write!(f, "fold:{};rank={rank}", words.join(","))?;
                if let Some(r) = radius {
                    write!(f, ";r={r}")?;
                }
                Ok(())
            }
            GraphSpec::RandPerm { rank, points, seed } => write!(f, "randperm:m={rank},n={points},seed={seed}"),
            GraphSpec::Lps { p, q } => write!(f, "lps:p={p},q={q}"),
            GraphSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

//! Text formats.
//!
//! All files are whitespace-separated, one record per line, `#` starts a
//! comment line, node ids are 0-based unless a loader is told otherwise.
//!
//! * edge list: `i j` for an observed true edge, or `i j s` with an explicit
//!   status `s` (`1` true edge, `0` observed false edge);
//! * mask: `i j` for each unsampled pair;
//! * truth: `i j s` for each test pair, `s = 1` in H1, `s = 0` in H0;
//! * pair list (selected edges): `i j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{Covariates, GraphBuilder, GroundTruth, ObservedGraph, Pair};

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One parsed line: two node ids and an optional trailing 0/1 flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRecord {
    pub line: usize,
    pub pair: Pair,
    pub flag: Option<bool>,
}

/// Parses `i j [flag]` lines.
pub fn parse_pair_records(
    text: &str,
    path: &Path,
    one_based: bool,
    flag: FlagRule,
) -> Result<Vec<PairRecord>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let expected = match flag {
            FlagRule::Forbidden => 2..=2,
            FlagRule::Optional => 2..=3,
            FlagRule::Required => 3..=3,
        };
        if !expected.contains(&tokens.len()) {
            return Err(err(format!(
                "expected {} fields, found {}",
                flag.describe(),
                tokens.len()
            )));
        }
        let id = |token: &str| -> Result<usize> {
            let value: usize = token
                .parse()
                .map_err(|_| err(format!("`{token}` is not a nonnegative integer node id")))?;
            if one_based {
                value
                    .checked_sub(1)
                    .ok_or_else(|| err("node id 0 in a 1-based file".into()))
            } else {
                Ok(value)
            }
        };
        let i = id(tokens[0])?;
        let j = id(tokens[1])?;
        let flag = match tokens.get(2) {
            None => None,
            Some(&"1") => Some(true),
            Some(&"0") => Some(false),
            Some(other) => return Err(err(format!("status `{other}` must be 0 or 1"))),
        };
        out.push(PairRecord {
            line,
            pair: Pair::new(i, j),
            flag,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagRule {
    Forbidden,
    Optional,
    Required,
}

impl FlagRule {
    fn describe(self) -> &'static str {
        match self {
            FlagRule::Forbidden => "2",
            FlagRule::Optional => "2 or 3",
            FlagRule::Required => "3",
        }
    }
}

/// Options for [`load_observed`].
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Node count; inferred as `max id + 1` when absent.
    pub n: Option<usize>,
    pub directed: bool,
    pub no_self_pairs: bool,
    pub one_based: bool,
}

/// Builds an observation from an edge list and an optional mask file.
/// Without a mask, every pair is sampled.
pub fn load_observed(
    edges: &Path,
    mask: Option<&Path>,
    options: &LoadOptions,
) -> Result<ObservedGraph> {
    let edge_text = read_to_string(edges)?;
    let mask_text = match mask {
        Some(path) => Some((read_to_string(path)?, path)),
        None => None,
    };
    parse_observed(
        &edge_text,
        edges,
        mask_text.as_ref().map(|(t, p)| (t.as_str(), *p)),
        options,
    )
}

pub fn parse_observed(
    edge_text: &str,
    edge_path: &Path,
    mask: Option<(&str, &Path)>,
    options: &LoadOptions,
) -> Result<ObservedGraph> {
    let edge_records =
        parse_pair_records(edge_text, edge_path, options.one_based, FlagRule::Optional)?;
    let mask_records = match mask {
        Some((text, path)) => {
            parse_pair_records(text, path, options.one_based, FlagRule::Forbidden)?
        }
        None => Vec::new(),
    };
    let max_id = edge_records
        .iter()
        .chain(&mask_records)
        .map(|r| r.pair.i.index().max(r.pair.j.index()))
        .max();
    let n = match (options.n, max_id) {
        (Some(n), Some(max)) if max >= n => {
            return Err(Error::NodeOutOfRange { node: max, n });
        }
        (Some(n), _) => n,
        (None, Some(max)) => max + 1,
        (None, None) => 0,
    };
    let canonical = |p: Pair| if options.directed { p } else { p.ordered() };
    let self_pair_check = |r: &PairRecord, path: &Path| {
        if options.no_self_pairs && r.pair.is_self_pair() {
            Err(Error::Parse {
                path: path.to_path_buf(),
                line: r.line,
                message: "self-pair listed but self-pairs are disabled".into(),
            })
        } else {
            Ok(())
        }
    };

    let mut status: BTreeMap<Pair, (bool, usize)> = BTreeMap::new();
    let mut duplicates = 0usize;
    for r in &edge_records {
        self_pair_check(r, edge_path)?;
        let pair = canonical(r.pair);
        let is_edge = r.flag.unwrap_or(true);
        match status.get(&pair) {
            Some(&(prev, _)) if prev == is_edge => duplicates += 1,
            Some(&(_, prev_line)) => {
                return Err(Error::Parse {
                    path: edge_path.to_path_buf(),
                    line: r.line,
                    message: format!("status of {pair} contradicts line {prev_line}"),
                })
            }
            None => {
                status.insert(pair, (is_edge, r.line));
            }
        }
    }
    if duplicates > 0 {
        log::warn!(
            "{}: merged {} duplicate edge records",
            edge_path.display(),
            duplicates
        );
    }

    let mut unsampled = BTreeSet::new();
    if let Some((_, mask_path)) = mask {
        for r in &mask_records {
            self_pair_check(r, mask_path)?;
            let pair = canonical(r.pair);
            let err = |message: String| Error::Parse {
                path: mask_path.to_path_buf(),
                line: r.line,
                message,
            };
            if !unsampled.insert(pair) {
                return Err(err(format!("duplicate unsampled pair {pair}")));
            }
            if let Some(&(_, line)) = status.get(&pair) {
                return Err(err(format!(
                    "{pair} is listed as observed on line {line} of {}",
                    edge_path.display()
                )));
            }
        }
    }

    GraphBuilder::new(n, options.directed)
        .self_pairs(!options.no_self_pairs)
        .edges(
            status
                .iter()
                .filter(|(_, &(is_edge, _))| is_edge)
                .map(|(p, _)| (p.i.index(), p.j.index())),
        )
        .unsampled_pairs(unsampled.iter().map(|p| (p.i.index(), p.j.index())))
        .build()
}

pub fn read_pairs(path: &Path) -> Result<Vec<Pair>> {
    let text = read_to_string(path)?;
    Ok(parse_pair_records(&text, path, false, FlagRule::Forbidden)?
        .into_iter()
        .map(|r| r.pair)
        .collect())
}

/// Ground-truth test partition read from a truth file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TruthSets {
    pub h0: Vec<Pair>,
    pub h1: Vec<Pair>,
}

pub fn read_truth(path: &Path) -> Result<TruthSets> {
    let text = read_to_string(path)?;
    let mut truth = TruthSets::default();
    for r in parse_pair_records(&text, path, false, FlagRule::Required)? {
        if r.flag == Some(true) {
            truth.h1.push(r.pair);
        } else {
            truth.h0.push(r.pair);
        }
    }
    Ok(truth)
}

/// Whitespace-separated rows of reals, one row per node.
pub fn read_covariates(path: &Path, n: usize) -> Result<Covariates> {
    let text = read_to_string(path)?;
    let mut values = Vec::new();
    let mut dim = None;
    let mut rows = 0;
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let row: Vec<f64> = trimmed
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| err(format!("`{t}` is not a number")))
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(err(format!("expected {d} columns, found {}", row.len())))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    if rows != n {
        return Err(Error::param(
            "covariates",
            format!("{rows} rows for {n} nodes"),
        ));
    }
    Covariates::new(n, dim.unwrap_or(0), values)
}

pub fn write_pairs<W: Write>(pairs: &[Pair], mut out: W) -> std::io::Result<()> {
    for p in pairs {
        writeln!(out, "{} {}", p.i, p.j)?;
    }
    Ok(())
}

/// Writes the observed edges.
pub fn write_edge_list<W: Write>(graph: &ObservedGraph, out: W) -> std::io::Result<()> {
    let edges: Vec<Pair> = graph.edges().collect();
    write_pairs(&edges, out)
}

/// Writes the unsampled pairs.
pub fn write_mask<W: Write>(graph: &ObservedGraph, out: W) -> std::io::Result<()> {
    let pairs: Vec<Pair> = graph.unsampled_pairs().collect();
    write_pairs(&pairs, out)
}

pub fn write_truth<W: Write>(truth: &GroundTruth, mut out: W) -> std::io::Result<()> {
    let mut rows: Vec<(Pair, u8)> = truth
        .h0
        .iter()
        .map(|&p| (p, 0))
        .chain(truth.h1.iter().map(|&p| (p, 1)))
        .collect();
    rows.sort_unstable();
    for (p, s) in rows {
        writeln!(out, "{} {} {}", p.i, p.j, s)?;
    }
    Ok(())
}

/// Writes edge list, mask and truth files for an experiment into `dir`.
pub fn export_experiment(
    dir: &Path,
    observed: &ObservedGraph,
    truth: &GroundTruth,
) -> Result<[PathBuf; 3]> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let paths = [
        dir.join("edges.txt"),
        dir.join("mask.txt"),
        dir.join("truth.txt"),
    ];
    let open = |p: &Path| {
        fs::File::create(p)
            .map(std::io::BufWriter::new)
            .map_err(io_err(p))
    };
    write_edge_list(observed, open(&paths[0])?).map_err(io_err(&paths[0]))?;
    write_mask(observed, open(&paths[1])?).map_err(io_err(&paths[1]))?;
    write_truth(truth, open(&paths[2])?).map_err(io_err(&paths[2]))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test.txt")
    }

    #[test]
    fn parses_comments_and_statuses() {
        let text = "# toy\n0 1\n\n1 2 1\n2 3 0\n";
        let recs = parse_pair_records(text, p(), false, FlagRule::Optional).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[2].flag, Some(false));
        assert_eq!(recs[2].line, 5);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_pair_records("0 1\n0 x\n", p(), false, FlagRule::Optional).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_pair_records("0 1 2\n", p(), false, FlagRule::Optional).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_pair_records("0 1 1\n", p(), false, FlagRule::Forbidden).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_pair_records("0 1\n", p(), true, FlagRule::Optional).is_err());
    }

    #[test]
    fn one_based_ids_shift() {
        let g = parse_observed(
            "1 2\n2 3\n",
            p(),
            None,
            &LoadOptions {
                one_based: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.has_edge(Pair::new(0, 1)));
    }

    #[test]
    fn reversed_duplicates_merge() {
        let g = parse_observed("0 1\n1 0\n", p(), None, &LoadOptions::default()).unwrap();
        assert_eq!(g.edge_count(), 1);
        let d = parse_observed(
            "0 1\n1 0\n",
            p(),
            None,
            &LoadOptions {
                directed: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(d.edge_count(), 2);
    }

    #[test]
    fn conflicts_are_rejected() {
        let opts = LoadOptions::default();
        assert!(parse_observed("0 1 1\n1 0 0\n", p(), None, &opts).is_err());
        assert!(parse_observed("0 1\n", p(), Some(("1 0\n", Path::new("mask"))), &opts).is_err());
        assert!(
            parse_observed("0 1\n", p(), Some(("0 2\n2 0\n", Path::new("mask"))), &opts).is_err()
        );
        let bounded = LoadOptions {
            n: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            parse_observed("0 5\n", p(), None, &bounded),
            Err(Error::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn explicit_false_edges_are_just_sampled() {
        let g = parse_observed(
            "0 1\n1 2 0\n",
            p(),
            Some(("0 2\n", Path::new("m"))),
            &LoadOptions::default(),
        )
        .unwrap();
        assert!(!g.has_edge(Pair::new(1, 2)));
        assert!(g.is_sampled(Pair::new(1, 2)));
        assert!(!g.is_sampled(Pair::new(2, 0)));
    }

    fn roundtrip(g: &ObservedGraph) -> ObservedGraph {
        let mut edges = Vec::new();
        let mut mask = Vec::new();
        write_edge_list(g, &mut edges).unwrap();
        write_mask(g, &mut mask).unwrap();
        let options = LoadOptions {
            n: Some(g.n()),
            directed: g.is_directed(),
            no_self_pairs: !g.has_self_pairs(),
            one_based: false,
        };
        parse_observed(
            std::str::from_utf8(&edges).unwrap(),
            p(),
            Some((std::str::from_utf8(&mask).unwrap(), Path::new("mask"))),
            &options,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn edge_list_and_mask_roundtrip(
            n in 1usize..15,
            directed in any::<bool>(),
            raw in proptest::collection::vec((0usize..15, 0usize..15, any::<bool>()), 0..60),
        ) {
            let mut builder = GraphBuilder::new(n, directed);
            let mut seen = BTreeSet::new();
            for (a, b, hidden) in raw {
                let pair = Pair::new(a % n, b % n);
                let key = if directed { pair } else { pair.ordered() };
                if !seen.insert(key) {
                    continue;
                }
                builder = if hidden {
                    builder.unsampled(key.i.index(), key.j.index())
                } else {
                    builder.edge(key.i.index(), key.j.index())
                };
            }
            let g = builder.build().unwrap();
            prop_assert_eq!(roundtrip(&g), g);
        }
    }
}

//! Continuous-time temporal graphs: edge lists with real-valued timestamps,
//! their node/edge incidence structure and ingestion from delimited text.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timestamped interaction `(u, v, t)` with an optional binary class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub u: usize,
    pub v: usize,
    pub t: f64,
    pub label: Option<bool>,
}

impl TemporalEdge {
    pub fn new(u: usize, v: usize, t: f64) -> Self {
        TemporalEdge { u, v, t, label: None }
    }

    pub fn with_label(mut self, label: bool) -> Self {
        self.label = Some(label);
        self
    }

    /// Number of endpoints shared with `other` (0, 1 or 2).
    pub fn shared_endpoints(&self, other: &TemporalEdge) -> u32 {
        let mut c = 0;
        for a in [self.u, self.v] {
            for b in [other.u, other.v] {
                if a == b {
                    c += 1;
                }
            }
        }
        c
    }
}

/// A node set `[0, n)` plus an ordered list of temporal edges. Edge `i` is
/// always the `i`-th edge passed in, so edge indices are stable.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraph {
    n: usize,
    edges: Vec<TemporalEdge>,
    node_ids: Option<Vec<String>>,
}

impl TemporalGraph {
    pub fn new(n: usize, edges: Vec<TemporalEdge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({}, {}) has a node outside [0, {n})",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop on node {}", e.u)));
            }
            if !e.t.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {i} has non-finite time {}", e.t)));
            }
        }
        Ok(TemporalGraph {
            n,
            edges,
            node_ids: None,
        })
    }

    /// Convenience constructor from unlabeled `(u, v, t)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, triples.iter().map(|&(u, v, t)| TemporalEdge::new(u, v, t)).collect())
    }

    pub fn with_node_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: ids.len(),
            });
        }
        self.node_ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &TemporalEdge {
        &self.edges[i]
    }

    /// Raw identifiers in dense-index order, when the graph was loaded from a file.
    pub fn node_ids(&self) -> Option<&[String]> {
        self.node_ids.as_deref()
    }

    pub fn times(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.t).collect()
    }

    /// Labels of all edges, or `None` if any edge is unlabeled.
    pub fn labels(&self) -> Option<Vec<bool>> {
        self.edges.iter().map(|e| e.label).collect()
    }

    /// Edges `idx[0], idx[1], ...` over the same node space.
    pub fn select(&self, idx: &[usize]) -> TemporalGraph {
        TemporalGraph {
            n: self.n,
            edges: idx.iter().map(|&i| self.edges[i]).collect(),
            node_ids: self.node_ids.clone(),
        }
    }

    pub fn incidence(&self) -> Incidence {
        Incidence::build(self)
    }

    /// Population standard deviation of the edge times.
    pub fn time_std(&self) -> Result<f64> {
        population_std(&self.times())
    }

    /// `(min, max)` of the edge times, or `None` when there are no edges.
    pub fn time_range(&self) -> Option<(f64, f64)> {
        let mut it = self.edges.iter().map(|e| e.t);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }
}

/// Population standard deviation; zero variance yields `Ok(0.0)`.
pub fn population_std(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::TooFewEdges(xs.len()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Per-node sorted lists of incident edge indices (the non-zeros of the
/// incidence matrix, stored row by row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<usize>,
}

impl Incidence {
    pub fn build(g: &TemporalGraph) -> Self {
        let mut offsets = vec![0usize; g.n() + 1];
        for e in g.edges() {
            offsets[e.u + 1] += 1;
            offsets[e.v + 1] += 1;
        }
        for i in 0..g.n() {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut edges = vec![0usize; offsets[g.n()]];
        // edges are visited in ascending index order, so each list ends up sorted
        for (i, e) in g.edges().iter().enumerate() {
            edges[cursor[e.u]] = i;
            cursor[e.u] += 1;
            edges[cursor[e.v]] = i;
            cursor[e.v] += 1;
        }
        Incidence { offsets, edges }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn incident(&self, node: usize) -> &[usize] {
        &self.edges[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Total number of stored incidences, always `2m`.
    pub fn nnz(&self) -> usize {
        self.edges.len()
    }

    /// `Σ_v deg(v)²`, an upper bound on the line graph's stored entries.
    pub fn clique_work(&self) -> u128 {
        (0..self.n()).map(|v| (self.degree(v) as u128).pow(2)).sum()
    }
}

/// Column separator of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Delimiter {
    Char(char),
    Whitespace,
}

impl Default for Delimiter {
    fn default() -> Self {
        Delimiter::Char(',')
    }
}

impl std::str::FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ws" | "whitespace" | "space" => Ok(Delimiter::Whitespace),
            "tab" | "\\t" => Ok(Delimiter::Char('\t')),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::Config(format!("bad delimiter {s:?}"))),
                }
            }
        }
    }
}

/// What to do with rows whose endpoints coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfLoopPolicy {
    #[default]
    Reject,
    Skip,
}

/// Column positions within a row (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Columns {
    pub u: usize,
    pub v: usize,
    pub t: usize,
    pub label: usize,
}

impl Columns {
    /// `u,v,t,label`
    pub const STANDARD: Columns = Columns {
        u: 0,
        v: 1,
        t: 2,
        label: 3,
    };
    /// `source,target,rating,time`, the layout of the signed bitcoin trust CSVs.
    pub const SIGNED: Columns = Columns {
        u: 0,
        v: 1,
        label: 2,
        t: 3,
    };
}

impl Default for Columns {
    fn default() -> Self {
        Columns::STANDARD
    }
}

impl std::str::FromStr for Columns {
    type Err = Error;

    /// Parses a layout such as `u,v,t,label` or `u,v,label,t`.
    fn from_str(s: &str) -> Result<Self> {
        let mut pos: HashMap<&str, usize> = HashMap::new();
        for (i, name) in s.split(',').map(str::trim).enumerate() {
            if pos.insert(name, i).is_some() {
                return Err(Error::Config(format!("duplicate column {name:?}")));
            }
        }
        let get = |k: &str| {
            pos.get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("column layout {s:?} lacks {k:?}")))
        };
        Ok(Columns {
            u: get("u")?,
            v: get("v")?,
            t: get("t")?,
            label: pos.get("label").copied().unwrap_or(3),
        })
    }
}

/// How to read an edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeListFormat {
    pub delimiter: Delimiter,
    pub columns: Columns,
    pub has_labels: bool,
    /// Raw labels strictly greater than this become class 1.
    pub label_threshold: f64,
    pub skip_header: bool,
    pub comment_prefixes: Vec<String>,
    pub self_loops: SelfLoopPolicy,
}

impl Default for EdgeListFormat {
    fn default() -> Self {
        EdgeListFormat {
            delimiter: Delimiter::default(),
            columns: Columns::default(),
            has_labels: false,
            label_threshold: 0.0,
            skip_header: false,
            comment_prefixes: vec!["#".into(), "%".into()],
            self_loops: SelfLoopPolicy::Reject,
        }
    }
}

/// Ingestion bookkeeping returned next to the graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub data_rows: usize,
    pub skipped_self_loops: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>, format: &EdgeListFormat) -> Result<TemporalGraph> {
    load_edge_list_with_stats(path, format).map(|(g, _)| g)
}

pub fn load_edge_list_with_stats(
    path: impl AsRef<Path>,
    format: &EdgeListFormat,
) -> Result<(TemporalGraph, LoadStats)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, format)
}

/// Parses edge-list text. Raw node ids are mapped to dense indices in order
/// of first appearance (`u` before `v` within a row).
pub fn parse_edge_list(text: &str, format: &EdgeListFormat) -> Result<(TemporalGraph, LoadStats)> {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut stats = LoadStats::default();
    let mut header_pending = format.skip_header;

    let cols = format.columns;
    let needed = [cols.u, cols.v, cols.t]
        .into_iter()
        .chain(format.has_labels.then_some(cols.label))
        .max()
        .unwrap_or(0);

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || format.comment_prefixes.iter().any(|p| line.starts_with(p.as_str())) {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields: Vec<&str> = match format.delimiter {
            Delimiter::Whitespace => line.split_whitespace().collect(),
            Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
        };
        if fields.len() <= needed {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least {} fields, found {}", needed + 1, fields.len()),
            });
        }
        stats.data_rows += 1;
        let (ru, rv) = (fields[cols.u], fields[cols.v]);
        if ru.is_empty() || rv.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty node id".into(),
            });
        }
        let t: f64 = fields[cols.t].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad time {:?}", fields[cols.t]),
        })?;
        if !t.is_finite() {
            return Err(Error::NonFiniteTime {
                line: line_no,
                value: t,
            });
        }
        let label = if format.has_labels {
            let raw: f64 = fields[cols.label].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad label {:?}", fields[cols.label]),
            })?;
            Some(raw > format.label_threshold)
        } else {
            None
        };
        if ru == rv {
            match format.self_loops {
                SelfLoopPolicy::Reject => {
                    return Err(Error::SelfLoop {
                        line: line_no,
                        node: ru.to_string(),
                    })
                }
                SelfLoopPolicy::Skip => {
                    stats.skipped_self_loops += 1;
                    continue;
                }
            }
        }
        let mut intern = |s: &str| {
            *index.entry(s.to_string()).or_insert_with(|| {
                ids.push(s.to_string());
                ids.len() - 1
            })
        };
        let u = intern(ru);
        let v = intern(rv);
        edges.push(TemporalEdge { u, v, t, label });
    }

    let g = TemporalGraph::new(ids.len(), edges)?.with_node_ids(ids)?;
    Ok((g, stats))
}

/// Writes `u,v,t[,label]` rows using raw ids when present.
pub fn write_edge_list(g: &TemporalGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(g.m() * 24);
    for e in g.edges() {
        let (u, v) = match g.node_ids() {
            Some(ids) => (ids[e.u].clone(), ids[e.v].clone()),
            None => (e.u.to_string(), e.v.to_string()),
        };
        out.push_str(&format!("{u},{v},{}", e.t));
        if let Some(l) = e.label {
            out.push_str(if l { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// One named dataset of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub path: PathBuf,
    #[serde(default)]
    pub delimiter: Option<String>,
    /// Column layout such as `"u,v,label,t"`.
    #[serde(default)]
    pub columns: Option<String>,
    #[serde(default)]
    pub label_threshold: Option<f64>,
    #[serde(default)]
    pub skip_header: bool,
}

/// TOML file mapping dataset names to files and their formats:
///
/// ```toml
/// [datasets.bitcoinalpha]
/// path = "soc-sign-bitcoinalpha.csv"
/// columns = "u,v,label,t"
/// label_threshold = 0
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(default)]
    pub datasets: BTreeMap<String, DatasetEntry>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest =
            toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    /// Resolved file path and format of `name`; labels are requested when
    /// `has_labels` is set.
    pub fn resolve(&self, name: &str, has_labels: bool) -> Result<(PathBuf, EdgeListFormat)> {
        let entry = self
            .datasets
            .get(name)
            .ok_or_else(|| Error::Config(format!("dataset {name:?} not in manifest")))?;
        let mut format = EdgeListFormat {
            has_labels,
            skip_header: entry.skip_header,
            ..Default::default()
        };
        if let Some(d) = &entry.delimiter {
            format.delimiter = d.parse()?;
        }
        if let Some(c) = &entry.columns {
            format.columns = c.parse()?;
        }
        if let Some(th) = entry.label_threshold {
            format.label_threshold = th;
        }
        let path = if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        };
        Ok((path, format))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_maps_ids_in_first_appearance_order() {
        let (g, stats) = parse_edge_list("a,b,0\nb,c,5", &EdgeListFormat::default()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges()[0], TemporalEdge::new(0, 1, 0.0));
        assert_eq!(g.edges()[1], TemporalEdge::new(1, 2, 5.0));
        assert_eq!(g.node_ids().unwrap(), ["a", "b", "c"]);
        assert_eq!(stats.data_rows, 2);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let err = parse_edge_list("a,a,0", &EdgeListFormat::default()).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { line: 1, .. }), "{err}");
    }

    #[test]
    fn self_loop_skip_policy_counts() {
        let fmt = EdgeListFormat {
            self_loops: SelfLoopPolicy::Skip,
            ..Default::default()
        };
        let (g, stats) = parse_edge_list("a,b,0\nc,c,1\nb,c,2\n", &fmt).unwrap();
        assert_eq!(g.m(), stats.data_rows - stats.skipped_self_loops);
        assert_eq!(stats.skipped_self_loops, 1);
    }

    #[test]
    fn malformed_rows() {
        let fmt = EdgeListFormat::default();
        assert!(matches!(
            parse_edge_list("a,b,0\na,b\n", &fmt),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("a,b,x", &fmt),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("a,b,inf", &fmt),
            Err(Error::NonFiniteTime { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("a,b,NaN", &fmt),
            Err(Error::NonFiniteTime { line: 1, .. })
        ));
    }

    #[test]
    fn labels_binarized_by_threshold() {
        let fmt = EdgeListFormat {
            has_labels: true,
            columns: Columns::SIGNED,
            ..Default::default()
        };
        let text = "# comment\n7,8,4,100\n8,9,-10,101\n9,7,0,102\n";
        let (g, _) = parse_edge_list(text, &fmt).unwrap();
        assert_eq!(g.labels().unwrap(), vec![true, false, false]);
        assert_eq!(g.edges()[0].t, 100.0);

        let fmt = EdgeListFormat {
            label_threshold: -1.0,
            ..fmt
        };
        let (g, _) = parse_edge_list(text, &fmt).unwrap();
        assert_eq!(g.labels().unwrap(), vec![true, false, true]);
    }

    #[test]
    fn whitespace_and_header() {
        let fmt = EdgeListFormat {
            delimiter: Delimiter::Whitespace,
            skip_header: true,
            ..Default::default()
        };
        let (g, _) = parse_edge_list("src dst time\n1  2\t3.5\n", &fmt).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edges()[0].t, 3.5);
    }

    #[test]
    fn column_layout_parsing() {
        assert_eq!("u,v,label,t".parse::<Columns>().unwrap(), Columns::SIGNED);
        assert_eq!("u,v,t".parse::<Columns>().unwrap().t, 2);
        assert!("u,v".parse::<Columns>().is_err());
    }

    #[test]
    fn incidence_lists() {
        let g = TemporalGraph::from_triples(3, &[(0, 1, 0.0), (1, 2, 0.0)]).unwrap();
        let inc = g.incidence();
        assert_eq!(inc.incident(1), &[0, 1]);
        assert_eq!(inc.incident(0), &[0]);
        assert_eq!(inc.incident(2), &[1]);
        assert_eq!(inc.nnz(), 4);

        let empty = TemporalGraph::new(0, vec![]).unwrap().incidence();
        assert_eq!(empty.n(), 0);
        assert_eq!(empty.nnz(), 0);
    }

    #[test]
    fn incidence_path_of_four_edges() {
        let g = TemporalGraph::from_triples(5, &[(0, 1, 0.0), (1, 2, 1.0), (2, 3, 2.0), (3, 4, 3.0)]).unwrap();
        let inc = g.incidence();
        for v in 1..4 {
            assert_eq!(inc.degree(v), 2);
        }
        assert_eq!(inc.degree(0), 1);
        assert_eq!(inc.degree(4), 1);
        assert_eq!(inc.nnz(), 2 * g.m());
    }

    #[test]
    fn time_std_cases() {
        let g = TemporalGraph::from_triples(2, &[(0, 1, -1.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.time_std().unwrap(), 1.0);
        let g = TemporalGraph::from_triples(2, &[(0, 1, 0.0), (0, 1, 1.0), (0, 1, 2.0), (0, 1, 3.0)]).unwrap();
        // sqrt(1.25)
        assert!((g.time_std().unwrap() - 1.118_033_988_749_895).abs() < 1e-12);
        let g = TemporalGraph::from_triples(2, &[(0, 1, 0.0); 3]).unwrap();
        assert_eq!(g.time_std().unwrap(), 0.0);
        let g = TemporalGraph::from_triples(2, &[(0, 1, 0.0)]).unwrap();
        assert!(matches!(g.time_std(), Err(Error::TooFewEdges(1))));
    }

    #[test]
    fn constructor_validates() {
        assert!(TemporalGraph::from_triples(2, &[(0, 2, 0.0)]).is_err());
        assert!(TemporalGraph::from_triples(2, &[(1, 1, 0.0)]).is_err());
        assert!(TemporalGraph::from_triples(2, &[(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn manifest_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let mpath = dir.path().join("datasets.toml");
        fs::write(
            &mpath,
            "[datasets.alpha]\npath = \"alpha.csv\"\ncolumns = \"u,v,label,t\"\nlabel_threshold = 0\n",
        )
        .unwrap();
        fs::write(dir.path().join("alpha.csv"), "1,2,5,10\n2,3,-1,11\n").unwrap();
        let manifest = DatasetManifest::load(&mpath).unwrap();
        let (path, fmt) = manifest.resolve("alpha", true).unwrap();
        assert_eq!(path, dir.path().join("alpha.csv"));
        let g = load_edge_list(path, &fmt).unwrap();
        assert_eq!(g.labels().unwrap(), vec![true, false]);
        assert!(manifest.resolve("beta", true).is_err());
    }
}

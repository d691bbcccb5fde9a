//! Edge-list ingestion and persistence of solver and evaluation outputs.
//!
//! Field tables are CSV with the fixed header `series,t,state_0,…,state_{n-1}`,
//! one row per `(series, t)`. Exploitability traces are CSV with header
//! `iteration,exploitability`. Reports are pretty-printed JSON.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphex::SampledGraph;
use crate::Scalar;

/// A whitespace-delimited edge list, one edge per line.
///
/// Lines whose first non-blank character is a comment prefix are skipped, as
/// are blank lines. Tokens after the first two (weights, timestamps) are
/// ignored.
#[derive(Clone, Debug)]
pub struct EdgeListSource {
    pub path: PathBuf,
    pub comment_prefixes: Vec<char>,
}

impl EdgeListSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            comment_prefixes: vec!['%', '#'],
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads an edge list into a simple undirected graph.
///
/// Node labels map to indices in order of first appearance. Directed,
/// repeated and reversed edges collapse to one undirected edge; self-loops
/// are dropped, and nodes left without neighbors are removed.
pub fn load_edge_list<T: Scalar>(src: &EdgeListSource) -> Result<SampledGraph<T>> {
    let path = src.path.as_path();
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut intern = |tok: &str| -> usize {
        if let Some(&i) = index.get(tok) {
            return i;
        }
        let i = labels.len();
        labels.push(tok.to_owned());
        index.insert(tok.to_owned(), i);
        i
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with(src.comment_prefixes.as_slice()) {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "expected at least two node identifiers".into(),
            });
        };
        let (u, v) = (intern(a), intern(b));
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    let graph = SampledGraph::from_edges(labels.len(), edges, None, Some(labels), T::zero())?;
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(graph)
}

/// Writes each edge once as `label_u label_v`.
pub fn write_edge_list<T: Scalar>(graph: &SampledGraph<T>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for (u, v) in graph.edges() {
        writeln!(w, "{} {}", graph.label(u), graph.label(v)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_report<R: Serialize + ?Sized>(report: &R, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn read_report<R: DeserializeOwned>(path: &Path) -> Result<R> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// One named `[t][x]` table read back from a field file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSeries {
    pub name: String,
    pub values: Array2<f64>,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes named `[t][x]` tables. All series must share the state count.
pub fn write_fields<T: Scalar>(series: &[(String, ArrayView2<'_, T>)], path: &Path) -> Result<()> {
    let states = series.first().map_or(0, |(_, v)| v.ncols());
    if series.iter().any(|(_, v)| v.ncols() != states) {
        return Err(Error::Shape("field series differ in state count".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["series".to_string(), "t".to_string()];
    header.extend((0..states).map(|x| format!("state_{x}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for (name, values) in series {
        for (t, row) in values.outer_iter().enumerate() {
            let mut rec = vec![name.clone(), t.to_string()];
            rec.extend(row.iter().map(|v| v.as_f64().to_string()));
            w.write_record(&rec).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Reads a field file back, preserving series order of first appearance.
pub fn read_fields(path: &Path) -> Result<Vec<FieldSeries>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let states = r.headers().map_err(csv_err(path))?.len().saturating_sub(2);
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            msg,
        };
        let name = rec.get(0).unwrap_or_default().to_string();
        let t: usize = rec
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|e| parse_err(format!("bad time index: {e}")))?;
        let pos = match out.iter().position(|(n, _)| *n == name) {
            Some(p) => p,
            None => {
                out.push((name, Vec::new()));
                out.len() - 1
            }
        };
        let rows = &mut out[pos].1;
        if rows.len() != t * states {
            return Err(parse_err(format!("time index {t} out of sequence")));
        }
        for field in rec.iter().skip(2) {
            rows.push(field.parse().map_err(|e| parse_err(format!("bad value: {e}")))?);
        }
    }
    out.into_iter()
        .map(|(name, flat)| {
            let steps = flat.len().checked_div(states).unwrap_or(0);
            let values = Array2::from_shape_vec((steps, states), flat).map_err(|e| Error::Shape(e.to_string()))?;
            Ok(FieldSeries { name, values })
        })
        .collect()
}

pub fn write_trace<T: Scalar>(trace: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["iteration", "exploitability"]).map_err(csv_err(path))?;
    for (i, v) in trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.as_f64().to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_trace(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_err(path))?;
            rec.get(1).unwrap_or_default().parse().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                msg: format!("bad value: {e}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::collections::BTreeSet;

    fn load_str(text: &str) -> Result<SampledGraph<f64>> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, text).unwrap();
        load_edge_list(&EdgeListSource::new(&path))
    }

    #[test]
    fn parses_simple_list() {
        let g = load_str("1 2\n2 3\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (3, 2));
        assert_eq!(g.nu(), 0.0);
        assert!(g.latents().is_none());
        assert_eq!(
            (g.label(0), g.label(1), g.label(2)),
            ("1".into(), "2".into(), "3".into())
        );
    }

    #[test]
    fn collapses_duplicates_and_reversals() {
        let g = load_str("1 2\n2 1\n1 2\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 1));
    }

    #[test]
    fn drops_comments_and_self_loops() {
        let g = load_str("% comment\n5 5\n5 6\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 1));
        let g = load_str("# c\n\n  7 7\n8 9 1.5 1700000000\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 1));
        assert_eq!(g.label(0), "8");
    }

    #[test]
    fn errors() {
        match load_str("1 2\n3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(load_str("% only\n4 4\n"), Err(Error::EmptyGraph)));
        assert!(matches!(
            load_edge_list::<f64>(&EdgeListSource::new("/nonexistent/x")),
            Err(Error::Io { .. })
        ));
    }

    fn labeled_edges(g: &SampledGraph<f64>) -> BTreeSet<(String, String)> {
        g.edges()
            .map(|(u, v)| {
                let (a, b) = (g.label(u), g.label(v));
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    #[test]
    fn dump_and_reload_is_idempotent() {
        let g = load_str("a b\nc a\nb c\nd e\ne d\nf f\nb d\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("dump.txt");
        write_edge_list(&g, &p).unwrap();
        let h = load_edge_list::<f64>(&EdgeListSource::new(&p)).unwrap();
        assert_eq!(labeled_edges(&g), labeled_edges(&h));
        assert_eq!(g.num_nodes(), h.num_nodes());
        let p2 = dir.path().join("dump2.txt");
        write_edge_list(&h, &p2).unwrap();
        let k = load_edge_list::<f64>(&EdgeListSource::new(&p2)).unwrap();
        assert_eq!(h, k);
    }

    #[test]
    fn fields_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let a = array![[0.1, 0.9], [1.0 / 3.0, 2.0 / 3.0]];
        let b = array![[0.5, 0.5], [0.123456789012345, 0.876543210987655]];
        write_fields(&[("core".into(), a.view()), ("k1".into(), b.view())], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "series,t,state_0,state_1");
        assert_eq!(text.lines().count(), 1 + 2 + 2);
        let back = read_fields(&p).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].name, "core");
        for (orig, got) in [(&a, &back[0].values), (&b, &back[1].values)] {
            assert!(orig.iter().zip(got.iter()).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn trace_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trace::<f64>(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "iteration,exploitability\n");
        write_trace(&[0.5f64, 0.25], &p).unwrap();
        assert_eq!(read_trace(&p).unwrap(), vec![0.5, 0.25]);
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        let value = serde_json::json!({"model": "sis", "delta_mu": {"mean": 0.1, "std": 0.0}});
        write_report(&value, &p).unwrap();
        let back: serde_json::Value = read_report(&p).unwrap();
        assert_eq!(back, value);
    }
}

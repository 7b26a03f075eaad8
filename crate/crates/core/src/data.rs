//! Expression matrices, pathway collections and class labels, plus the CSV
//! and GMT readers and writers used to move them on and off disk.
//!
//! Expression CSV: comma separated, first row holds gene ids. When the
//! header's first cell is empty or one of `sample_id`, `sample`, `id` the
//! first column holds sample ids; otherwise every column is a gene and
//! samples are named `s1..sN`. With `samples_as_rows = false` the same
//! layout is read transposed (genes as rows).
//!
//! GMT: tab separated, one pathway per line: name, description, genes.
//!
//! Labels: two columns `sample_id,label`, optional header, labels in
//! `{1, -1}` or `{1, 0}`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use crate::error::{PkbError, Result};

/// Samples × genes matrix of normalized expression values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionDataset {
    values: Vec<f64>,
    gene_ids: Vec<String>,
    sample_ids: Vec<String>,
}

impl ExpressionDataset {
    /// Builds a dataset from row-major values (one row per sample).
    pub fn new(values: Vec<f64>, sample_ids: Vec<String>, gene_ids: Vec<String>) -> Result<Self> {
        if gene_ids.is_empty() {
            return Err(PkbError::EmptyMatrix);
        }
        if values.len() != sample_ids.len() * gene_ids.len() {
            return Err(PkbError::DimensionMismatch(format!(
                "{} values for {} samples x {} genes",
                values.len(),
                sample_ids.len(),
                gene_ids.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(PkbError::InvalidDataset(format!(
                "non-finite value at sample {}, gene {}",
                pos / gene_ids.len(),
                pos % gene_ids.len()
            )));
        }
        if let Some(dup) = first_duplicate(&gene_ids) {
            return Err(PkbError::DuplicateGene(dup.to_string()));
        }
        if let Some(dup) = first_duplicate(&sample_ids) {
            return Err(PkbError::DuplicateSample(dup.to_string()));
        }
        Ok(ExpressionDataset {
            values,
            gene_ids,
            sample_ids,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn value(&self, sample: usize, gene: usize) -> f64 {
        self.values[sample * self.gene_ids.len() + gene]
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        let p = self.gene_ids.len();
        &self.values[sample * p..(sample + 1) * p]
    }

    pub fn gene_index(&self, gene: &str) -> Option<usize> {
        self.gene_ids.iter().position(|g| g == gene)
    }

    /// Row-major `n_samples × genes.len()` slice holding the given columns.
    pub fn slice_columns(&self, genes: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_samples() * genes.len());
        for i in 0..self.n_samples() {
            let row = self.row(i);
            out.extend(genes.iter().map(|&g| row[g]));
        }
        out
    }

    /// New dataset holding the given samples, in the given order.
    pub fn select_samples(&self, samples: &[usize]) -> ExpressionDataset {
        let mut values = Vec::with_capacity(samples.len() * self.n_genes());
        for &s in samples {
            values.extend_from_slice(self.row(s));
        }
        ExpressionDataset {
            values,
            gene_ids: self.gene_ids.clone(),
            sample_ids: samples.iter().map(|&s| self.sample_ids[s].clone()).collect(),
        }
    }

    /// Writes samples as rows with a `sample_id` corner cell. Values use the
    /// shortest representation that parses back to the identical `f64`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| PkbError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            write!(out, "sample_id")?;
            for g in &self.gene_ids {
                write!(out, ",{g}")?;
            }
            writeln!(out)?;
            for (i, s) in self.sample_ids.iter().enumerate() {
                write!(out, "{s}")?;
                for v in self.row(i) {
                    write!(out, ",{v}")?;
                }
                writeln!(out)?;
            }
            out.flush()
        };
        write().map_err(|e| PkbError::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pathway {
    pub name: String,
    /// Column indices into the expression matrix.
    pub genes: Vec<usize>,
}

/// Ordered, named groups of gene columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathwayCollection {
    pathways: Vec<Pathway>,
}

impl PathwayCollection {
    /// Validates the collection against a matrix with `n_genes` columns.
    pub fn new(pathways: Vec<Pathway>, n_genes: usize) -> Result<Self> {
        if pathways.is_empty() {
            return Err(PkbError::InvalidPathways("no pathways".into()));
        }
        let mut names = HashSet::new();
        for pw in &pathways {
            if !names.insert(pw.name.as_str()) {
                return Err(PkbError::DuplicatePathway(pw.name.clone()));
            }
            if pw.genes.is_empty() {
                return Err(PkbError::InvalidPathways(format!("pathway `{}` is empty", pw.name)));
            }
            let mut seen = HashSet::new();
            for &g in &pw.genes {
                if g >= n_genes {
                    return Err(PkbError::InvalidPathways(format!(
                        "pathway `{}` references column {g} but the data has {n_genes} genes",
                        pw.name
                    )));
                }
                if !seen.insert(g) {
                    return Err(PkbError::InvalidPathways(format!(
                        "pathway `{}` lists column {g} twice",
                        pw.name
                    )));
                }
            }
        }
        Ok(PathwayCollection { pathways })
    }

    pub fn len(&self) -> usize {
        self.pathways.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pathways.is_empty()
    }

    pub fn get(&self, m: usize) -> &Pathway {
        &self.pathways[m]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pathway> {
        self.pathways.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.pathways.iter().map(|p| p.name.clone()).collect()
    }

    /// Writes the collection as GMT, resolving indices to the dataset's gene ids.
    pub fn write_gmt(&self, path: impl AsRef<Path>, dataset: &ExpressionDataset) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| PkbError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            for pw in &self.pathways {
                write!(out, "{}\tNA", pw.name)?;
                for &g in &pw.genes {
                    write!(out, "\t{}", dataset.gene_ids()[g])?;
                }
                writeln!(out)?;
            }
            out.flush()
        };
        write().map_err(|e| PkbError::io(path, e))
    }
}

/// Class labels in `{+1, -1}`, both classes present.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector(Vec<f64>);

impl LabelVector {
    pub fn new(labels: Vec<f64>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(PkbError::InvalidLabel {
                sample: "?".into(),
                label: bad.to_string(),
            });
        }
        if !labels.contains(&1.0) || !labels.contains(&-1.0) {
            return Err(PkbError::SingleClass);
        }
        Ok(LabelVector(labels))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `+1` and `-1` labels.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.0.iter().filter(|&&v| v > 0.0).count();
        (pos, self.0.len() - pos)
    }

    /// Labels at the given positions. Fails if the subset is single-class.
    pub fn select(&self, idx: &[usize]) -> Result<LabelVector> {
        LabelVector::new(idx.iter().map(|&i| self.0[i]).collect())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, sample_ids: &[String]) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| PkbError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            writeln!(out, "sample_id,label")?;
            for (s, &y) in sample_ids.iter().zip(&self.0) {
                writeln!(out, "{s},{}", y as i32)?;
            }
            out.flush()
        };
        write().map_err(|e| PkbError::io(path, e))
    }
}

fn first_duplicate(ids: &[String]) -> Option<&str> {
    let mut seen = HashSet::with_capacity(ids.len());
    ids.iter().find(|id| !seen.insert(id.as_str())).map(|s| s.as_str())
}

fn is_id_corner(cell: &str) -> bool {
    let c = cell.trim().to_ascii_lowercase();
    c.is_empty() || c == "sample_id" || c == "sample" || c == "id" || c == "gene_id" || c == "gene"
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| PkbError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(path: &Path, err: csv::Error) -> PkbError {
    PkbError::Parse {
        path: path.into(),
        line: err.position().map(|p| p.line() as usize).unwrap_or(0),
        column: None,
        message: err.to_string(),
    }
}

/// Reads an expression matrix. See the module docs for the layout.
pub fn load_expression_csv(path: impl AsRef<Path>, samples_as_rows: bool) -> Result<ExpressionDataset> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(PkbError::EmptyMatrix),
    };
    let has_row_ids = header.get(0).map(is_id_corner).unwrap_or(false);
    let skip = usize::from(has_row_ids);
    let col_ids: Vec<String> = header.iter().skip(skip).map(str::to_string).collect();
    if col_ids.is_empty() {
        return Err(PkbError::EmptyMatrix);
    }
    if let Some(dup) = first_duplicate(&col_ids) {
        return Err(if samples_as_rows {
            PkbError::DuplicateGene(dup.to_string())
        } else {
            PkbError::DuplicateSample(dup.to_string())
        });
    }

    let mut row_ids = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != col_ids.len() + skip {
            return Err(PkbError::Parse {
                path: path.into(),
                line,
                column: None,
                message: format!("expected {} fields, found {}", col_ids.len() + skip, record.len()),
            });
        }
        if has_row_ids {
            row_ids.push(record[0].to_string());
        } else {
            row_ids.push(format!("{}{}", if samples_as_rows { "s" } else { "g" }, row_ids.len() + 1));
        }
        for (k, cell) in record.iter().enumerate().skip(skip) {
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| PkbError::Parse {
                path: path.into(),
                line,
                column: Some(k + 1),
                message: format!("`{cell}` is not a finite number"),
            })?;
            values.push(v);
        }
    }

    if samples_as_rows {
        ExpressionDataset::new(values, row_ids, col_ids)
    } else {
        if row_ids.is_empty() {
            return Err(PkbError::EmptyMatrix);
        }
        let (n_genes, n_samples) = (row_ids.len(), col_ids.len());
        let mut transposed = vec![0.0; values.len()];
        for g in 0..n_genes {
            for s in 0..n_samples {
                transposed[s * n_genes + g] = values[g * n_samples + s];
            }
        }
        ExpressionDataset::new(transposed, col_ids, row_ids)
    }
}

/// Outcome of [`load_gmt`].
#[derive(Debug, Clone)]
pub struct GmtLoad {
    pub pathways: PathwayCollection,
    /// Pathways dropped because none of their genes appear in the dataset.
    pub omitted: Vec<String>,
}

/// Reads a GMT file and maps its gene symbols onto `dataset` columns.
///
/// Unknown symbols are dropped, repeated symbols collapse to one column, and
/// pathways left empty are omitted (counted in [`GmtLoad::omitted`]).
pub fn load_gmt(path: impl AsRef<Path>, dataset: &ExpressionDataset) -> Result<GmtLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| PkbError::io(path, e))?;
    let index: HashMap<&str, usize> = dataset
        .gene_ids()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();

    let mut pathways = Vec::new();
    let mut omitted = Vec::new();
    let mut names = HashSet::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PkbError::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(PkbError::Parse {
                path: path.into(),
                line: lineno + 1,
                column: None,
                message: format!("expected at least 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let name = fields[0].trim().to_string();
        if !names.insert(name.clone()) {
            return Err(PkbError::DuplicatePathway(name));
        }
        let mut genes = Vec::new();
        for symbol in fields[2..].iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
            if let Some(&g) = index.get(symbol) {
                if !genes.contains(&g) {
                    genes.push(g);
                }
            }
        }
        if genes.is_empty() {
            omitted.push(name);
        } else {
            pathways.push(Pathway { name, genes });
        }
    }
    if !omitted.is_empty() {
        warn!("{}: {} pathway(s) share no gene with the expression data and were omitted", path.display(), omitted.len());
    }
    if pathways.is_empty() {
        return Err(PkbError::NoPathways(path.into()));
    }
    Ok(GmtLoad {
        pathways: PathwayCollection::new(pathways, dataset.n_genes())?,
        omitted,
    })
}

fn parse_label(raw: &str) -> Option<f64> {
    let v: f64 = raw.trim().parse().ok()?;
    if v == 1.0 {
        Some(1.0)
    } else if v == -1.0 || v == 0.0 {
        Some(-1.0)
    } else {
        None
    }
}

/// Reads `sample_id,label` rows and reorders them to the dataset's sample order.
pub fn load_labels(path: impl AsRef<Path>, dataset: &ExpressionDataset) -> Result<LabelVector> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let known: HashSet<&str> = dataset.sample_ids().iter().map(String::as_str).collect();
    let mut by_sample: HashMap<String, f64> = HashMap::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != 2 {
            return Err(PkbError::Parse {
                path: path.into(),
                line,
                column: None,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let (sample, raw) = (&record[0], &record[1]);
        let label = match parse_label(raw) {
            Some(l) => l,
            // an unparseable first line is a header
            None if k == 0 && raw.parse::<f64>().is_err() => continue,
            None => {
                return Err(PkbError::InvalidLabel {
                    sample: sample.to_string(),
                    label: raw.to_string(),
                })
            }
        };
        if !known.contains(sample) {
            return Err(PkbError::UnknownSample(sample.to_string()));
        }
        if by_sample.insert(sample.to_string(), label).is_some() {
            return Err(PkbError::DuplicateSample(sample.to_string()));
        }
    }
    let labels = dataset
        .sample_ids()
        .iter()
        .map(|s| by_sample.get(s).copied().ok_or_else(|| PkbError::MissingLabel(s.clone())))
        .collect::<Result<Vec<f64>>>()?;
    LabelVector::new(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    fn toy() -> ExpressionDataset {
        ExpressionDataset::new(
            vec![0.5, 1.0, 2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0],
            vec!["s1".into(), "s2".into(), "s3".into()],
            vec!["g1".into(), "g2".into(), "g3".into()],
        )
        .unwrap()
    }

    #[test]
    fn reads_plain_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "g1,g2\n0.5,1.0\n-1.0,0.0\n2.0,3.0\n");
        let ds = load_expression_csv(&path, true).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.n_genes(), 2);
        assert_eq!(ds.row(0), &[0.5, 1.0]);
        assert_eq!(ds.row(1), &[-1.0, 0.0]);
        assert_eq!(ds.row(2), &[2.0, 3.0]);
        assert_eq!(ds.sample_ids(), &["s1", "s2", "s3"]);
    }

    #[test]
    fn reads_sample_id_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "sample_id,g1,g2\na,1,2\nb,3,4\n");
        let ds = load_expression_csv(&path, true).unwrap();
        assert_eq!(ds.sample_ids(), &["a", "b"]);
        assert_eq!(ds.value(1, 0), 3.0);
    }

    #[test]
    fn reads_genes_as_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "gene_id,a,b,c\ng1,1,2,3\ng2,4,5,6\n");
        let ds = load_expression_csv(&path, false).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.gene_ids(), &["g1", "g2"]);
        assert_eq!(ds.row(2), &[3.0, 6.0]);
    }

    #[test]
    fn duplicate_gene_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "g1,g1\n1,2\n");
        assert!(matches!(load_expression_csv(&path, true), Err(PkbError::DuplicateGene(g)) if g == "g1"));
    }

    #[test]
    fn bad_cell_reports_location() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "g1,g2\nabc,1.0\n");
        match load_expression_csv(&path, true) {
            Err(PkbError::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, Some(1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_nan_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = write_tmp(&dir, "r.csv", "g1,g2\n1,2\n3\n");
        assert!(matches!(load_expression_csv(&ragged, true), Err(PkbError::Parse { line: 3, .. })));
        let nan = write_tmp(&dir, "n.csv", "g1,g2\n1,NaN\n");
        assert!(matches!(load_expression_csv(&nan, true), Err(PkbError::Parse { column: Some(2), .. })));
        let empty = write_tmp(&dir, "e.csv", "");
        assert!(matches!(load_expression_csv(&empty, true), Err(PkbError::EmptyMatrix)));
    }

    #[test]
    fn header_only_file_is_an_empty_sample_set() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "x.csv", "sample_id,g1,g2\n");
        let ds = load_expression_csv(&path, true).unwrap();
        assert_eq!(ds.n_samples(), 0);
        assert_eq!(ds.n_genes(), 2);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ds = ExpressionDataset::new(
            vec![0.1 + 0.2, -1e-300, 1.0 / 3.0, 123456789.123456789, -0.0, 5e-324],
            vec!["x".into(), "y".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let path = dir.path().join("rt.csv");
        ds.write_csv(&path).unwrap();
        let back = load_expression_csv(&path, true).unwrap();
        assert_eq!(back.gene_ids(), ds.gene_ids());
        assert_eq!(back.sample_ids(), ds.sample_ids());
        for i in 0..2 {
            for (a, b) in back.row(i).iter().zip(ds.row(i)) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn gmt_maps_and_drops() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "p.gmt", "pw1\tdesc\tg1\tg2\npw2\tdesc\tgX\npw3\tdesc\tg1\tg1\n");
        let load = load_gmt(&path, &toy()).unwrap();
        assert_eq!(load.pathways.len(), 2);
        assert_eq!(load.pathways.get(0).genes, vec![0, 1]);
        assert_eq!(load.pathways.get(1).name, "pw3");
        assert_eq!(load.pathways.get(1).genes, vec![0]);
        assert_eq!(load.omitted, vec!["pw2".to_string()]);
    }

    #[test]
    fn gmt_without_surviving_pathways_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "p.gmt", "pw\tdesc\tgX\tgY\n");
        assert!(matches!(load_gmt(&path, &toy()), Err(PkbError::NoPathways(_))));
        let missing = dir.path().join("nope.gmt");
        assert!(matches!(load_gmt(&missing, &toy()), Err(PkbError::Io { .. })));
    }

    #[test]
    fn gmt_round_trip_through_writer() {
        let dir = tempfile::tempdir().unwrap();
        let ds = toy();
        let pws = PathwayCollection::new(
            vec![
                Pathway { name: "a".into(), genes: vec![2, 0] },
                Pathway { name: "b".into(), genes: vec![1] },
            ],
            3,
        )
        .unwrap();
        let path = dir.path().join("p.gmt");
        pws.write_gmt(&path, &ds).unwrap();
        assert_eq!(load_gmt(&path, &ds).unwrap().pathways, pws);
    }

    #[test]
    fn labels_reordered_and_mapped() {
        let dir = tempfile::tempdir().unwrap();
        let ds = ExpressionDataset::new(
            vec![0.0; 3],
            vec!["s3".into(), "s1".into(), "s2".into()],
            vec!["g".into()],
        )
        .unwrap();
        let path = write_tmp(&dir, "y.csv", "s1,1\ns2,-1\ns3,1\n");
        assert_eq!(load_labels(&path, &ds).unwrap().values(), &[1.0, 1.0, -1.0]);
        let zero_one = write_tmp(&dir, "z.csv", "sample_id,label\ns1,0\ns2,1\ns3,1\n");
        assert_eq!(load_labels(&zero_one, &ds).unwrap().values(), &[1.0, -1.0, 1.0]);
    }

    #[test]
    fn label_errors() {
        let dir = tempfile::tempdir().unwrap();
        let ds = toy();
        let single = write_tmp(&dir, "a.csv", "s1,1\ns2,1\ns3,1\n");
        assert!(matches!(load_labels(&single, &ds), Err(PkbError::SingleClass)));
        let missing = write_tmp(&dir, "b.csv", "s1,1\ns2,-1\n");
        assert!(matches!(load_labels(&missing, &ds), Err(PkbError::MissingLabel(s)) if s == "s3"));
        let unknown = write_tmp(&dir, "c.csv", "s1,1\ns2,-1\ns3,1\ns9,1\n");
        assert!(matches!(load_labels(&unknown, &ds), Err(PkbError::UnknownSample(s)) if s == "s9"));
        let bad = write_tmp(&dir, "d.csv", "s1,1\ns2,2\ns3,1\n");
        assert!(matches!(load_labels(&bad, &ds), Err(PkbError::InvalidLabel { .. })));
    }

    #[test]
    fn collection_invariants() {
        let pw = |name: &str, genes: Vec<usize>| Pathway { name: name.into(), genes };
        assert!(PathwayCollection::new(vec![pw("a", vec![0, 3])], 3).is_err());
        assert!(PathwayCollection::new(vec![pw("a", vec![])], 3).is_err());
        assert!(PathwayCollection::new(vec![pw("a", vec![1, 1])], 3).is_err());
        assert!(PathwayCollection::new(vec![pw("a", vec![0]), pw("a", vec![1])], 3).is_err());
        assert!(PathwayCollection::new(vec![pw("a", vec![0, 2])], 3).is_ok());
    }
}

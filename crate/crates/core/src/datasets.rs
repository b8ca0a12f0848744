//! Binary-labelled 3-feature datasets: CSV ingestion, PCA, a synthetic
//! circle task and seeded splits.

use std::f64::consts::{FRAC_2_PI, PI};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Features in `[−π, π]` with labels in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<[f64; 3]>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Vec<[f64; 3]>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::Data("labels must be 0 or 1".into()));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("features must be finite".into()));
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[[f64; 3]] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], u8)> + '_ {
        self.features.iter().copied().zip(self.labels.iter().copied())
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Fraction of label-1 samples.
    pub fn positive_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.labels.iter().filter(|&&y| y == 1).count() as f64 / self.len() as f64
    }

    /// Writes `x1,x2,x3,label` rows with a header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
        w.write_record(["x1", "x2", "x3", "label"]).map_err(csv_io)?;
        for (x, y) in self.iter() {
            w.write_record([x[0].to_string(), x[1].to_string(), x[2].to_string(), y.to_string()])
                .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Data(format!("{other:?}")),
    }
}

/// Parsed CSV: numeric feature columns plus the label column.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl RawTable {
    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }
}

/// Reads comma-separated numeric rows whose last column is a 0/1 label.
/// Row and column numbers in errors are 1-based and count the header line.
pub fn load_csv(path: &Path, has_header: bool) -> Result<RawTable> {
    let file = std::fs::File::open(path)?;
    parse_csv(file, has_header)
}

pub fn parse_csv(reader: impl std::io::Read, has_header: bool) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let offset = usize::from(has_header) + 1;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + offset;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            col: 0,
            msg: e.to_string(),
        })?;
        if rec.len() < 2 {
            return Err(Error::Parse {
                row,
                col: rec.len(),
                msg: "need at least one feature column and a label column".into(),
            });
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(Error::Parse {
                    row,
                    col: rec.len(),
                    msg: format!("expected {w} columns, found {}", rec.len()),
                })
            }
            Some(_) => {}
        }
        let n = rec.len();
        let mut xs = Vec::with_capacity(n - 1);
        for (j, field) in rec.iter().take(n - 1).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                col: j + 1,
                msg: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    col: j + 1,
                    msg: format!("'{field}' is not finite"),
                });
            }
            xs.push(v);
        }
        let label = match rec.get(n - 1).expect("label column") {
            "0" => 0,
            "1" => 1,
            _ => {
                return Err(Error::Parse {
                    row,
                    col: n,
                    msg: "labels must be 0 or 1".into(),
                })
            }
        };
        features.push(xs);
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::Data("CSV contains no samples".into()));
    }
    Ok(RawTable { features, labels })
}

/// Mean-centred projection onto the top `k` principal axes (unscaled).
///
/// Axes are ordered by descending variance, ties in input order, and each
/// axis is signed so its largest-magnitude loading is positive.
pub fn pca_project(features: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    let n = features.len();
    let d = features.first().map_or(0, Vec::len);
    if k == 0 || d < k {
        return Err(Error::Data(format!("cannot reduce {d} features to {k}")));
    }
    if n < k + 1 {
        return Err(Error::Data(format!("PCA to {k} components needs at least {} samples, got {n}", k + 1)));
    }
    if features.iter().any(|r| r.len() != d) {
        return Err(Error::Data("ragged feature rows".into()));
    }
    let x = DMatrix::from_fn(n, d, |i, j| features[i][j]);
    let mean = x.row_mean();
    let centered = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let kth = eig.eigenvalues[order[k - 1]];
    if !(kth > 1e-12 * top.max(f64::MIN_POSITIVE)) {
        return Err(Error::Data(format!("feature matrix has rank below {k}")));
    }
    let axes: Vec<Vec<f64>> = order[..k]
        .iter()
        .map(|&c| {
            let v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let lead = v
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |best, (i, x)| if x.abs() > best.1.abs() { (i, *x) } else { best })
                .0;
            let s = if v[lead] < 0.0 { -1.0 } else { 1.0 };
            v.into_iter().map(|x| s * x).collect()
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            axes.iter()
                .map(|a| (0..d).map(|j| centered[(i, j)] * a[j]).sum())
                .collect()
        })
        .collect())
}

/// Per-column min–max scaling to `[−π, π]`; constant columns map to 0.
pub fn scale_to_pi(rows: &mut [Vec<f64>]) {
    let d = rows.first().map_or(0, Vec::len);
    for j in 0..d {
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
        for r in rows.iter_mut() {
            r[j] = if hi > lo { -PI + 2.0 * PI * (r[j] - lo) / (hi - lo) } else { 0.0 };
        }
    }
}

/// PCA to `k` components followed by min–max scaling to `[−π, π]`.
pub fn pca_reduce(features: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = pca_project(features, k)?;
    scale_to_pi(&mut rows);
    Ok(rows)
}

/// Dataset from a raw table: three feature columns are only rescaled, wider
/// tables go through PCA.
pub fn dataset_from_table(table: &RawTable) -> Result<Dataset> {
    let d = table.n_features();
    let rows = match d {
        3 => {
            let mut rows = table.features.clone();
            scale_to_pi(&mut rows);
            rows
        }
        d if d > 3 => pca_reduce(&table.features, 3)?,
        d => return Err(Error::Data(format!("need at least 3 feature columns, found {d}"))),
    };
    Dataset::new(rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect(), table.labels.clone())
}

/// Circle task label: inside the radius `√(2/π)` is class 1.
pub fn circle_label(x1: f64, x2: f64) -> u8 {
    u8::from(x1 * x1 + x2 * x2 < FRAC_2_PI)
}

/// `x₁, x₂ ~ U[−1, 1]`, `x₃ = 0`, labelled by [`circle_label`], features
/// scaled by π.
pub fn synth_circle(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::Data(format!("circle dataset needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x1: f64 = rng.gen_range(-1.0..=1.0);
        let x2: f64 = rng.gen_range(-1.0..=1.0);
        labels.push(circle_label(x1, x2));
        features.push([PI * x1, PI * x2, 0.0]);
    }
    Dataset::new(features, labels)
}

/// Seeded shuffle, then the first `n_train` and the next `n_test` samples.
pub fn split(ds: &Dataset, n_train: usize, n_test: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_train + n_test > ds.len() {
        return Err(Error::Data(format!(
            "split of {n_train} + {n_test} needs more than the {} available samples",
            ds.len()
        )));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((ds.subset(&idx[..n_train]), ds.subset(&idx[n_train..n_train + n_test])))
}

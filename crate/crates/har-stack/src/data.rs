//! Loading and splitting the UCI HAR dataset in its published plain-text
//! layout: `X_<split>.txt` holds 561 whitespace-separated reals per line,
//! `y_<split>.txt` one integer label 1-6 per line, and
//! `activity_labels.txt` maps ids to activity names.
//!
//! Files are looked up both directly in the given directory and in the
//! `train/` / `test/` subdirectories the published archive uses. Nothing is
//! ever fetched from the network.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::classifier::ClassLabel;
use crate::error::{Error, Result};
use crate::random::{RngSeed, RngStream};

/// Feature width of the published HAR data.
pub const HAR_FEATURES: usize = 561;

/// Number of activity classes.
pub const HAR_CLASSES: usize = 6;

/// A feature matrix with aligned labels and class names.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Vec<ClassLabel>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Vec<ClassLabel>, class_names: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::shape(
                format!("{} labels for {} rows", x.nrows(), x.nrows() ),
                format!("{} labels", y.len()),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite feature value"));
        }
        let k = class_names.len();
        if let Some(&bad) = y.iter().find(|&&label| label >= k) {
            return Err(Error::validation(format!(
                "label {bad} outside [0, {k})"
            )));
        }
        Ok(Dataset { x, y, class_names })
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut x = Array2::zeros((indices.len(), self.n_features()));
        let mut y = Vec::with_capacity(indices.len());
        for (out, &i) in indices.iter().enumerate() {
            x.row_mut(out).assign(&self.x.row(i));
            y.push(self.y[i]);
        }
        Dataset {
            x,
            y,
            class_names: self.class_names.clone(),
        }
    }
}

/// Two disjoint parts of a parent dataset.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub part_a: Dataset,
    pub part_b: Dataset,
}

/// Which half of the published train/test split to load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

fn resolve(dir: &Path, split: &str, file: &str) -> Result<PathBuf> {
    let candidates = [
        dir.join(file),
        dir.join(split).join(file),
        dir.join("UCI HAR Dataset").join(file),
        dir.join("UCI HAR Dataset").join(split).join(file),
    ];
    for c in &candidates {
        if c.is_file() {
            return Ok(c.clone());
        }
    }
    Err(Error::NotFound {
        path: candidates[0].clone(),
        hint: Some(format!(
            "also tried {}",
            candidates[1..]
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )),
    })
}

fn parse_feature_file(path: &Path) -> Result<Array2<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let start = values.len();
        for field in line.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                file: path.to_path_buf(),
                line: idx + 1,
                message: format!("invalid real number {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    file: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        let width = values.len() - start;
        if width != HAR_FEATURES {
            return Err(Error::Parse {
                file: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected {HAR_FEATURES} fields, found {width}"),
            });
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, HAR_FEATURES), values)
        .map_err(|e| Error::validation(format!("feature matrix shape: {e}")))
}

fn parse_label_file(path: &Path) -> Result<Vec<ClassLabel>> {
    let reader = BufReader::new(File::open(path)?);
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let raw: i64 = trimmed.parse().map_err(|_| Error::Parse {
            file: path.to_path_buf(),
            line: idx + 1,
            message: format!("invalid label {trimmed:?}"),
        })?;
        if !(1..=HAR_CLASSES as i64).contains(&raw) {
            return Err(Error::validation(format!(
                "label {raw} at line {} outside 1-{HAR_CLASSES}",
                idx + 1
            )));
        }
        labels.push((raw - 1) as ClassLabel);
    }
    Ok(labels)
}

fn parse_activity_labels(path: &Path) -> Result<Vec<String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut names = vec![String::new(); HAR_CLASSES];
    let mut seen = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.splitn(2, char::is_whitespace);
        let id: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .filter(|&id| (1..=HAR_CLASSES).contains(&id))
            .ok_or_else(|| Error::Parse {
                file: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected \"id name\" with id 1-{HAR_CLASSES}, got {trimmed:?}"),
            })?;
        let name = parts.next().unwrap_or("").trim();
        if name.is_empty() {
            return Err(Error::Parse {
                file: path.to_path_buf(),
                line: idx + 1,
                message: "missing activity name".into(),
            });
        }
        names[id - 1] = name.to_string();
        seen += 1;
    }
    if seen != HAR_CLASSES || names.iter().any(String::is_empty) {
        return Err(Error::validation(format!(
            "activity_labels.txt must define all {HAR_CLASSES} classes"
        )));
    }
    Ok(names)
}

/// Loads one published split (train or test) from `dir`.
///
/// Labels are remapped from 1-6 to the fixed zero-based order
/// walking=0 ... laying=5; row `i` of the feature matrix pairs with line
/// `i` of the label file.
pub fn load_har_split(dir: &Path, split: Split) -> Result<Dataset> {
    let s = split.name();
    let x_path = resolve(dir, s, &format!("X_{s}.txt"))?;
    let y_path = resolve(dir, s, &format!("y_{s}.txt"))?;
    let names_path = resolve(dir, s, "activity_labels.txt")?;

    let x = parse_feature_file(&x_path)?;
    let y = parse_label_file(&y_path)?;
    if x.nrows() != y.len() {
        return Err(Error::validation(format!(
            "{} feature rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let class_names = parse_activity_labels(&names_path)?;
    Dataset::new(x, y, class_names)
}

/// Splits label indices into two stratified parts. Part A receives
/// `round(fraction_a * count)` samples of each class (clamped so neither
/// part loses a class entirely); the remainder goes to part B. Both index
/// lists come back sorted.
pub fn stratified_partition_indices(
    y: &[ClassLabel],
    n_classes: usize,
    fraction_a: f64,
    seed: RngSeed,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction_a > 0.0 && fraction_a < 1.0) {
        return Err(Error::validation(format!(
            "fraction_a must be in (0, 1), got {fraction_a}"
        )));
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &label) in y.iter().enumerate() {
        per_class[label].push(i);
    }
    if let Some(c) = per_class.iter().position(|v| !v.is_empty() && v.len() < 2) {
        return Err(Error::validation(format!(
            "class {c} has fewer than 2 samples"
        )));
    }
    let mut part_a = Vec::new();
    let mut part_b = Vec::new();
    for (c, indices) in per_class.iter_mut().enumerate() {
        if indices.is_empty() {
            continue;
        }
        let mut stream = RngStream::new(seed, "stratified_split", c as u64);
        stream.shuffle(indices);
        let take = (fraction_a * indices.len() as f64).round() as usize;
        let take = take.clamp(1, indices.len() - 1);
        part_a.extend_from_slice(&indices[..take]);
        part_b.extend_from_slice(&indices[take..]);
    }
    part_a.sort_unstable();
    part_b.sort_unstable();
    Ok((part_a, part_b))
}

/// Stratified two-way split of a dataset.
pub fn stratified_split(d: &Dataset, fraction_a: f64, seed: RngSeed) -> Result<SplitPair> {
    let (a, b) = stratified_partition_indices(&d.y, d.n_classes(), fraction_a, seed)?;
    Ok(SplitPair {
        part_a: d.select(&a),
        part_b: d.select(&b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use std::fmt::Write as _;
    use std::fs;
    use tempfile::TempDir;

    pub(crate) fn write_fixture(rows: &[(Vec<f64>, usize)]) -> TempDir {
        let dir = TempDir::new().unwrap();
        let mut x = String::new();
        let mut y = String::new();
        for (features, label) in rows {
            assert_eq!(features.len(), HAR_FEATURES);
            let line: Vec<String> = features.iter().map(|v| format!("{v:.7e}")).collect();
            writeln!(x, " {}", line.join(" ")).unwrap();
            writeln!(y, "{label}").unwrap();
        }
        fs::write(dir.path().join("X_train.txt"), x).unwrap();
        fs::write(dir.path().join("y_train.txt"), y).unwrap();
        fs::write(
            dir.path().join("activity_labels.txt"),
            "1 WALKING\n2 WALKING_UPSTAIRS\n3 WALKING_DOWNSTAIRS\n4 SITTING\n5 STANDING\n6 LAYING\n",
        )
        .unwrap();
        dir
    }

    fn fixture_rows(n: usize) -> Vec<(Vec<f64>, usize)> {
        (0..n)
            .map(|i| {
                let features: Vec<f64> = (0..HAR_FEATURES)
                    .map(|j| ((i * 31 + j * 7) % 200) as f64 / 100.0 - 1.0)
                    .collect();
                (features, i % HAR_CLASSES + 1)
            })
            .collect()
    }

    #[test]
    fn loads_fixture_with_full_width() {
        let dir = write_fixture(&fixture_rows(12));
        let d = load_har_split(dir.path(), Split::Train).unwrap();
        assert_eq!(d.n_features(), HAR_FEATURES);
        assert_eq!(d.n_samples(), 12);
        assert_eq!(d.class_names[0], "WALKING");
        assert_eq!(d.class_names[5], "LAYING");
        // labels remapped to zero-based, pairing preserved
        assert_eq!(d.y[0], 0);
        assert_eq!(d.y[1], 1);
    }

    #[test]
    fn loads_from_split_subdirectory() {
        let dir = write_fixture(&fixture_rows(6));
        let sub = dir.path().join("train");
        fs::create_dir(&sub).unwrap();
        fs::rename(dir.path().join("X_train.txt"), sub.join("X_train.txt")).unwrap();
        fs::rename(dir.path().join("y_train.txt"), sub.join("y_train.txt")).unwrap();
        let d = load_har_split(dir.path(), Split::Train).unwrap();
        assert_eq!(d.n_samples(), 6);
    }

    #[test]
    fn short_row_is_parse_error_with_line() {
        let dir = write_fixture(&fixture_rows(3));
        let path = dir.path().join("X_train.txt");
        let mut content = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = content.lines().collect();
        let truncated = lines[1]
            .split_whitespace()
            .take(HAR_FEATURES - 1)
            .collect::<Vec<_>>()
            .join(" ");
        content = format!("{}\n{}\n{}\n", lines[0], truncated, lines[2]);
        fs::write(&path, content).unwrap();
        let err = load_har_split(dir.path(), Split::Train).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("560"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_not_found() {
        let dir = TempDir::new().unwrap();
        let err = load_har_split(dir.path(), Split::Train).unwrap_err();
        assert!(matches!(err, Error::NotFound { .. }));
    }

    #[test]
    fn out_of_range_label_is_validation_error() {
        let dir = write_fixture(&fixture_rows(3));
        fs::write(dir.path().join("y_train.txt"), "1\n7\n2\n").unwrap();
        let err = load_har_split(dir.path(), Split::Train).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn reserialized_features_round_trip() {
        let dir = write_fixture(&fixture_rows(5));
        let d = load_har_split(dir.path(), Split::Train).unwrap();
        // 15 significant digits is enough to recover every loaded value.
        for &v in d.x.iter() {
            let text = format!("{v:.15e}");
            let back: f64 = text.parse().unwrap();
            let tol = 1e-14 * v.abs().max(1e-300);
            assert!((back - v).abs() <= tol, "{v} -> {text} -> {back}");
            // second round trip is exact
            assert_eq!(format!("{back:.15e}"), text);
        }
    }

    #[test]
    fn stratified_split_halves_balanced_classes() {
        let n = 100;
        let x = Array2::zeros((n, 3));
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let d = Dataset::new(x, y, vec!["a".into(), "b".into()]).unwrap();
        let pair = stratified_split(&d, 0.5, RngSeed(7)).unwrap();
        assert_eq!(pair.part_a.n_samples(), 50);
        assert_eq!(pair.part_b.n_samples(), 50);
        for c in 0..2 {
            let in_a = pair.part_a.y.iter().filter(|&&l| l == c).count();
            assert!((24..=26).contains(&in_a), "class {c}: {in_a}");
        }
    }

    #[test]
    fn stratified_split_is_deterministic_and_partitions() {
        let n = 61;
        let x = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let d = Dataset::new(x, y.clone(), vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let (a1, b1) = stratified_partition_indices(&y, 3, 0.7, RngSeed(3)).unwrap();
        let (a2, b2) = stratified_partition_indices(&y, 3, 0.7, RngSeed(3)).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        let mut all: Vec<usize> = a1.iter().chain(&b1).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
        // label multiset preserved
        let split = stratified_split(&d, 0.7, RngSeed(3)).unwrap();
        let mut merged: Vec<usize> = split
            .part_a
            .y
            .iter()
            .chain(&split.part_b.y)
            .copied()
            .collect();
        merged.sort_unstable();
        let mut orig = y.clone();
        orig.sort_unstable();
        assert_eq!(merged, orig);
    }

    #[test]
    fn degenerate_fraction_rejected() {
        let y = vec![0, 0, 1, 1];
        assert!(stratified_partition_indices(&y, 2, 0.0, RngSeed(1)).is_err());
        assert!(stratified_partition_indices(&y, 2, 1.0, RngSeed(1)).is_err());
    }
}

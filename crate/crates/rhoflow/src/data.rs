//! Observational dataset container and CSV persistence.
//!
//! The on-disk format is a two-column CSV with header `a,y`, UTF-8, LF line
//! endings, plain decimal numbers. Discrete columns hold integer category
//! codes; continuous columns round-trip exactly through the shortest
//! decimal representation.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::flow::VariableKind;
use crate::{Error, Result};

/// Paired treatment/outcome samples with variable-kind metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservationalDataset {
    pub name: String,
    a: Vec<f64>,
    y: Vec<f64>,
    a_kind: VariableKind,
    y_kind: VariableKind,
}

impl ObservationalDataset {
    pub fn new(
        name: impl Into<String>,
        a: Vec<f64>,
        y: Vec<f64>,
        a_kind: VariableKind,
        y_kind: VariableKind,
    ) -> Result<Self> {
        if a.len() != y.len() {
            return Err(Error::Schema(format!(
                "column lengths differ: a has {}, y has {}",
                a.len(),
                y.len()
            )));
        }
        a_kind.validate()?;
        y_kind.validate()?;
        let ds = ObservationalDataset {
            name: name.into(),
            a,
            y,
            a_kind,
            y_kind,
        };
        ds.validate_values()?;
        Ok(ds)
    }

    fn validate_values(&self) -> Result<()> {
        for (col, kind, label) in [(&self.a, self.a_kind, "a"), (&self.y, self.y_kind, "y")] {
            for (i, &v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Schema(format!(
                        "column {label}, row {}: non-finite value",
                        i + 1
                    )));
                }
                if let Some(card) = kind.cardinality() {
                    if v.fract() != 0.0 || v < 0.0 || v >= card as f64 {
                        return Err(Error::Schema(format!(
                            "column {label}, row {}: value {v} is not a category in [0, {card})",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn a_kind(&self) -> VariableKind {
        self.a_kind
    }

    pub fn y_kind(&self) -> VariableKind {
        self.y_kind
    }
}

/// Loads a dataset from a two-column CSV with header `a,y`, validating the
/// declared schema. Errors carry 1-based line numbers.
pub fn load_dataset(
    path: impl AsRef<Path>,
    a_kind: VariableKind,
    y_kind: VariableKind,
) -> Result<ObservationalDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty file, expected header \"a,y\"".into(),
        })?
        .map_err(Error::Io)?;
    if header.trim() != "a,y" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header \"a,y\", found \"{header}\""),
        });
    }

    let mut a = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let fa = fields.next().unwrap_or("").trim();
        let fy = fields.next().unwrap_or("").trim();
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two fields".into(),
            });
        }
        if fa.is_empty() || fy.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "missing value".into(),
            });
        }
        let va: f64 = fa.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("cannot parse \"{fa}\" as a number"),
        })?;
        let vy: f64 = fy.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("cannot parse \"{fy}\" as a number"),
        })?;
        check_kind(va, a_kind, "a", line_no)?;
        check_kind(vy, y_kind, "y", line_no)?;
        a.push(va);
        y.push(vy);
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    ObservationalDataset::new(name, a, y, a_kind, y_kind)
}

fn check_kind(v: f64, kind: VariableKind, col: &str, line: usize) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Schema(format!(
            "line {line}, column {col}: non-finite value"
        )));
    }
    if let Some(card) = kind.cardinality() {
        if v.fract() != 0.0 {
            return Err(Error::Schema(format!(
                "line {line}, column {col}: {kind} requires integer values, found {v}"
            )));
        }
        if v < 0.0 || v >= card as f64 {
            return Err(Error::Schema(format!(
                "line {line}, column {col}: value {v} outside [0, {card})"
            )));
        }
    }
    Ok(())
}

/// Writes a dataset in the canonical CSV format. Continuous values use the
/// shortest decimal form that parses back to the identical bits.
pub fn save_dataset(dataset: &ObservationalDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "a,y")?;
    for (&a, &y) in dataset.a().iter().zip(dataset.y()) {
        write_value(&mut out, a, dataset.a_kind())?;
        write!(out, ",")?;
        write_value(&mut out, y, dataset.y_kind())?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn write_value<W: Write>(out: &mut W, v: f64, kind: VariableKind) -> Result<()> {
    if kind.is_discrete() {
        write!(out, "{}", v as i64)?;
    } else {
        write!(out, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("rhoflow-data-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn loads_binary_dataset() {
        let p = tmp("binary.csv");
        std::fs::write(&p, "a,y\n0,1\n1,0\n").unwrap();
        let ds = load_dataset(&p, VariableKind::Binary, VariableKind::Binary).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.a(), &[0.0, 1.0]);
        assert_eq!(ds.y(), &[1.0, 0.0]);
        assert_eq!(ds.name, "binary");
    }

    #[test]
    fn rejects_out_of_range_category_with_line_number() {
        let p = tmp("badcat.csv");
        std::fs::write(&p, "a,y\n0,3\n1,9\n").unwrap();
        let err = load_dataset(&p, VariableKind::Binary, VariableKind::Categorical(8)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains('9'), "{msg}");
    }

    #[test]
    fn rejects_missing_values_and_bad_header() {
        let p = tmp("missing.csv");
        std::fs::write(&p, "a,y\n0.5,\n").unwrap();
        let err =
            load_dataset(&p, VariableKind::Continuous, VariableKind::Continuous).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let p = tmp("header.csv");
        std::fs::write(&p, "x,y\n0.5,0.2\n").unwrap();
        let err =
            load_dataset(&p, VariableKind::Continuous, VariableKind::Continuous).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn continuous_round_trip_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 50_000;
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1e-7).collect();
        let ds = ObservationalDataset::new(
            "roundtrip",
            a,
            y,
            VariableKind::Continuous,
            VariableKind::Continuous,
        )
        .unwrap();
        let p = tmp("roundtrip.csv");
        save_dataset(&ds, &p).unwrap();
        let back = load_dataset(&p, VariableKind::Continuous, VariableKind::Continuous).unwrap();
        assert_eq!(ds.len(), back.len());
        for i in 0..ds.len() {
            assert_eq!(ds.a()[i].to_bits(), back.a()[i].to_bits());
            assert_eq!(ds.y()[i].to_bits(), back.y()[i].to_bits());
        }
        // a second save yields byte-identical files
        let p2 = tmp("roundtrip2.csv");
        save_dataset(&back, &p2).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn constructor_validates_schema() {
        assert!(ObservationalDataset::new(
            "bad",
            vec![0.0, 1.0],
            vec![0.0],
            VariableKind::Binary,
            VariableKind::Binary
        )
        .is_err());
        assert!(ObservationalDataset::new(
            "bad",
            vec![0.5],
            vec![0.0],
            VariableKind::Binary,
            VariableKind::Binary
        )
        .is_err());
        assert!(ObservationalDataset::new(
            "bad",
            vec![0.0],
            vec![f64::NAN],
            VariableKind::Binary,
            VariableKind::Continuous
        )
        .is_err());
    }
}

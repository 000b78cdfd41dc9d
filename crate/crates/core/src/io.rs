//! Matrix-set file formats and the row-major serde encoding of matrices.
//!
//! Two text formats are read: a JSON document `{"dim": m, "mats": [...]}`
//! with row-major nested arrays, and a whitespace format whose first line
//! is `m L` followed by `L` blocks of `m` rows. The format is picked by the
//! first non-blank byte.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::matcore::SymMatrixSet;

/// Rows of a matrix as nested vectors.
pub fn to_rows(a: &Mat) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

/// Builds a matrix from rows; every row must have the same length.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != c) {
        return Err(Error::Shape(format!(
            "row {i} has {} entries, expected {c}",
            r.len()
        )));
    }
    Ok(Mat::from_fn(n, c, |i, j| rows[i][j]))
}

/// `#[serde(with = "crate::io::rows")]` for a `Mat` field.
pub mod rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_rows(a).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat, D::Error> {
        let r = Vec::<Vec<f64>>::deserialize(d)?;
        from_rows(&r).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "crate::io::rows_opt")]` for an `Option<Mat>` field.
pub mod rows_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Option<Mat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        a.as_ref().map(to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Mat>, D::Error> {
        let r = Option::<Vec<Vec<f64>>>::deserialize(d)?;
        r.map(|m| from_rows(&m).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// `#[serde(with = "crate::io::rows_vec")]` for a `Vec<Mat>` field.
pub mod rows_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &[Mat], s: S) -> std::result::Result<S::Ok, S::Error> {
        a.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Mat>, D::Error> {
        let r = Vec::<Vec<Vec<f64>>>::deserialize(d)?;
        r.iter()
            .map(|m| from_rows(m).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `#[serde(with = "crate::io::rows_opt_vec")]` for an `Option<Vec<Mat>>` field.
pub mod rows_opt_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        a: &Option<Vec<Mat>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        a.as_ref()
            .map(|v| v.iter().map(to_rows).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Mat>>, D::Error> {
        let r = Option::<Vec<Vec<Vec<f64>>>>::deserialize(d)?;
        r.map(|v| {
            v.iter()
                .map(|m| from_rows(m).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

/// The JSON matrix-set document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSetFile {
    pub dim: usize,
    pub mats: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FormatHint {
    #[default]
    Detect,
    Json,
    Whitespace,
}

/// Parses either format. Asymmetry beyond `cfg.sym` is an error naming the
/// worst entry unless `symmetrize` is set.
pub fn parse_matrix_set(
    text: &str,
    hint: FormatHint,
    symmetrize: bool,
    cfg: &Config,
) -> Result<SymMatrixSet> {
    let json = match hint {
        FormatHint::Json => true,
        FormatHint::Whitespace => false,
        FormatHint::Detect => text.trim_start().starts_with('{'),
    };
    let mats = if json {
        parse_json(text)?
    } else {
        parse_whitespace(text)?
    };
    if mats.is_empty() {
        return Err(Error::Parse("the set has no matrices".into()));
    }
    if symmetrize {
        return SymMatrixSet::symmetrized(mats);
    }
    for (l, a) in mats.iter().enumerate() {
        let scale = linalg::fro(a).max(f64::MIN_POSITIVE);
        let mut worst = (0.0, 0, 0);
        for i in 0..a.nrows() {
            for j in 0..i {
                let d = (a[(i, j)] - a[(j, i)]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        if worst.0 > cfg.sym * scale {
            return Err(Error::Parse(format!(
                "matrix {l} is not symmetric: entry ({}, {}) differs from its transpose by {:e}",
                worst.1, worst.2, worst.0
            )));
        }
    }
    SymMatrixSet::with_tolerance(mats, cfg.sym)
}

fn parse_json(text: &str) -> Result<Vec<Mat>> {
    let f: MatrixSetFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}: {e}", e.line())))?;
    let mut out = Vec::with_capacity(f.mats.len());
    for (l, rows) in f.mats.iter().enumerate() {
        if rows.len() != f.dim || rows.iter().any(|r| r.len() != f.dim) {
            return Err(Error::Parse(format!("matrix {l} is not {0}×{0}", f.dim)));
        }
        out.push(from_rows(rows)?);
    }
    Ok(out)
}

fn parse_whitespace(text: &str) -> Result<Vec<Mat>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("line {hl}: header must be `m L`")))?;
    let [m, l] = nums[..] else {
        return Err(Error::Parse(format!("line {hl}: header must be `m L`")));
    };
    let mut out = Vec::with_capacity(l);
    for _ in 0..l {
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or_else(|| {
                Error::Parse(format!(
                    "unexpected end of input: expected {l} matrices of {m} rows"
                ))
            })?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("line {ln}: not a list of reals")))?;
            if row.len() != m {
                return Err(Error::Parse(format!(
                    "line {ln}: expected {m} entries, found {}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        out.push(from_rows(&rows)?);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse(format!(
            "line {ln}: trailing data after {l} matrices"
        )));
    }
    Ok(out)
}

pub fn to_file(set: &SymMatrixSet) -> MatrixSetFile {
    MatrixSetFile {
        dim: set.dim(),
        mats: set.mats().iter().map(to_rows).collect(),
    }
}

/// JSON document; floats use shortest round-trip formatting.
pub fn write_json(set: &SymMatrixSet) -> String {
    serde_json::to_string_pretty(&to_file(set)).expect("plain data serializes")
}

/// Whitespace format with round-trip float formatting.
pub fn write_whitespace(set: &SymMatrixSet) -> String {
    let mut s = format!("{} {}\n", set.dim(), set.len());
    for a in set.mats() {
        for i in 0..a.nrows() {
            let row: Vec<String> = a.row(i).iter().map(|x| format!("{x:?}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::e_mat;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn both_formats_read_e2() {
        let a = parse_matrix_set(
            r#"{"dim":2,"mats":[[[0,1],[1,0]]]}"#,
            FormatHint::Detect,
            false,
            &cfg(),
        )
        .unwrap();
        let b = parse_matrix_set("2 1\n0 1\n1 0\n", FormatHint::Detect, false, &cfg()).unwrap();
        assert_eq!(a.mats(), &[e_mat(2)]);
        assert_eq!(b.mats(), &[e_mat(2)]);
    }

    #[test]
    fn asymmetry_is_reported() {
        let t = r#"{"dim":2,"mats":[[[0,1],[0.5,0]]]}"#;
        let e = parse_matrix_set(t, FormatHint::Detect, false, &cfg()).unwrap_err();
        assert!(e.to_string().contains("(1, 0)"), "{e}");
        let s = parse_matrix_set(t, FormatHint::Detect, true, &cfg()).unwrap();
        assert_eq!(s.get(0)[(0, 1)], 0.75);
    }

    #[test]
    fn short_row_names_line() {
        let e = parse_matrix_set("2 1\n0 1\n1\n", FormatHint::Detect, false, &cfg()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn round_trip_is_exact() {
        let x = 0.1 + 0.2;
        let a = Mat::from_row_slice(2, 2, &[x, 1.0 / 3.0, 1.0 / 3.0, -7e-300]);
        let set = SymMatrixSet::new(vec![a]).unwrap();
        let j = parse_matrix_set(&write_json(&set), FormatHint::Detect, false, &cfg()).unwrap();
        let w =
            parse_matrix_set(&write_whitespace(&set), FormatHint::Detect, false, &cfg()).unwrap();
        assert_eq!(j, set);
        assert_eq!(w, set);
    }
}

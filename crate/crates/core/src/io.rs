//! JSON state files and number formatting.
//!
//! ```json
//! {"kind": "density", "dim": 2, "matrix": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}
//! {"kind": "classical", "weights": [0.5, 0.5], "labels": ["a", "b"]}
//! ```
//!
//! Matrices are row-major with complex entries as `[re, im]` pairs. Labels are
//! optional and default to "0", "1", ….

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{CMatrix, ClassicalState, Complex64, DensityMatrix};

/// A parsed state file.
#[derive(Debug, Clone)]
pub enum State {
    Density(DensityMatrix),
    Classical(ClassicalState),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Density(d) => d.dim(),
            State::Classical(c) => c.len(),
        }
    }

    /// Dense view; classical states become diagonal matrices.
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Density(d) => d.clone(),
            State::Classical(c) => c.to_density(),
        }
    }

    pub fn as_classical(&self) -> Option<&ClassicalState> {
        match self {
            State::Classical(c) => Some(c),
            State::Density(_) => None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum StateFile {
    Density {
        dim: usize,
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Classical {
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::StateFormat(format!("field `{field}`: {msg}"))
}

/// Parses a state from JSON text.
pub fn parse_state(text: &str) -> Result<State> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| Error::StateFormat(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    match file {
        StateFile::Density { dim, matrix } => {
            if matrix.len() != dim {
                return Err(field_error("matrix", format!("{} rows, expected dim = {dim}", matrix.len())));
            }
            for (i, row) in matrix.iter().enumerate() {
                if row.len() != dim {
                    return Err(field_error(
                        "matrix",
                        format!("row {i} has {} entries, expected {dim}", row.len()),
                    ));
                }
            }
            let m = CMatrix::from_fn(dim, dim, |i, j| {
                let [re, im] = matrix[i][j];
                Complex64::new(re, im)
            });
            DensityMatrix::new(m).map(State::Density)
        }
        StateFile::Classical { weights, labels } => match labels {
            Some(l) => ClassicalState::new(l, weights).map(State::Classical),
            None => ClassicalState::from_weights(weights).map(State::Classical),
        },
    }
}

pub fn read_state(path: impl AsRef<Path>) -> Result<State> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_state(&text).map_err(|e| match e {
        Error::StateFormat(m) => Error::StateFormat(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// JSON text of a state. Floats are written in shortest round-trip form, so
/// re-reading yields identical entries.
pub fn state_to_json(state: &State) -> Result<String> {
    let file = match state {
        State::Density(d) => {
            let m = d.entries();
            StateFile::Density {
                dim: d.dim(),
                matrix: (0..d.dim())
                    .map(|i| (0..d.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect(),
            }
        }
        State::Classical(c) => StateFile::Classical {
            weights: c.weights().to_vec(),
            labels: Some(c.labels().to_vec()),
        },
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn write_state(path: impl AsRef<Path>, state: &State) -> Result<()> {
    fs::write(path, state_to_json(state)? + "\n")?;
    Ok(())
}

/// 17 significant digits, `inf` / `-inf` for infinities.
pub fn format_value(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Serializes infinities as the strings "inf" / "-inf" and finite values as
/// numbers.
pub fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_classical, random_density, rng};

    #[test]
    fn density_round_trip_is_exact() {
        let mut r = rng(5);
        for d in 1..5 {
            let rho = random_density(d, &mut r);
            let text = state_to_json(&State::Density(rho.clone())).unwrap();
            let back = parse_state(&text).unwrap();
            match back {
                State::Density(b) => assert_eq!(b.entries(), rho.entries()),
                _ => panic!("wrong kind"),
            }
        }
    }

    #[test]
    fn classical_round_trip_is_exact() {
        let p = random_classical(5, &mut rng(2));
        let text = state_to_json(&State::Classical(p.clone())).unwrap();
        let back = parse_state(&text).unwrap();
        let b = back.as_classical().unwrap();
        assert_eq!(b.weights(), p.weights());
        assert_eq!(b.labels(), p.labels());
    }

    #[test]
    fn parse_errors_carry_context() {
        let e = parse_state("{\"kind\": \"density\", \"dim\": 2,\n \"matrix\": [[[1, 0]]]}").unwrap_err();
        assert!(e.to_string().contains("matrix"), "{e}");
        let e = parse_state("{\"kind\": \"classical\",\n \"weights\": [0.5, oops]}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_state("{\"kind\": \"classical\", \"weights\": [0.5, 0.6]}").is_err());
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(f64::INFINITY), "inf");
        assert_eq!(format_value(0.0), "0");
        let x = 0.1 + 0.2;
        assert_eq!(format_value(x).parse::<f64>().unwrap(), x);
        assert_eq!(format_value(2f64.ln()), "6.9314718055994529e-1");
    }
}

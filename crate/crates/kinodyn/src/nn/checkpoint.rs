//! Versioned text checkpoint of named parameter tensors.
//!
//! Values are stored as hexadecimal IEEE-754 bit patterns so a load is
//! bit-exact regardless of formatting or locale.

use super::{NnError, Tensor};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const HEADER: &str = "kinodyn-checkpoint v1";

/// Ordered named tensors plus string metadata.
#[derive(Debug, Clone, Default)]
pub struct Checkpoint {
    pub meta: BTreeMap<String, String>,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn push(&mut self, name: &str, tensor: Tensor) {
        self.tensors.push((name.to_string(), tensor));
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }

    /// Total number of scalar parameters across all tensors.
    pub fn total_params(&self) -> usize {
        self.tensors.iter().map(|(_, t)| t.len()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for (name, t) in &self.tensors {
            let _ = write!(out, "tensor {name} {}", t.shape().len());
            for d in t.shape() {
                let _ = write!(out, " {d}");
            }
            out.push('\n');
            for chunk in t.data().chunks(8) {
                let line: Vec<String> = chunk.iter().map(|v| format!("{:016x}", v.to_bits())).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self, NnError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == HEADER => {}
            other => {
                return Err(NnError::Checkpoint(format!(
                    "bad header: {:?}",
                    other.unwrap_or("<empty>")
                )))
            }
        }
        let mut cp = Checkpoint::default();
        let mut lines = lines.peekable();
        while let Some(line) = lines.next() {
            if line == "end" {
                return Ok(cp);
            }
            if let Some(rest) = line.strip_prefix("meta ") {
                let (k, v) = rest
                    .split_once(' ')
                    .ok_or_else(|| NnError::Checkpoint(format!("bad meta line: {line}")))?;
                cp.meta.insert(k.to_string(), v.to_string());
            } else if let Some(rest) = line.strip_prefix("tensor ") {
                let mut parts = rest.split_whitespace();
                let name = parts
                    .next()
                    .ok_or_else(|| NnError::Checkpoint("tensor line missing name".into()))?;
                let ndim: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| NnError::Checkpoint("tensor line missing ndim".into()))?;
                let shape: Vec<usize> = parts
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|e| NnError::Checkpoint(format!("bad dim {s}: {e}")))
                    })
                    .collect::<Result<_, _>>()?;
                if shape.len() != ndim {
                    return Err(NnError::Checkpoint(format!(
                        "tensor {name}: expected {ndim} dims, got {}",
                        shape.len()
                    )));
                }
                let total: usize = shape.iter().product();
                let mut data = Vec::with_capacity(total);
                while data.len() < total {
                    let line = lines
                        .next()
                        .ok_or_else(|| NnError::Checkpoint(format!("tensor {name}: truncated")))?;
                    for word in line.split_whitespace() {
                        let bits = u64::from_str_radix(word, 16).map_err(|e| {
                            NnError::Checkpoint(format!("tensor {name}: bad value {word}: {e}"))
                        })?;
                        data.push(f64::from_bits(bits));
                    }
                }
                if data.len() != total {
                    return Err(NnError::Checkpoint(format!(
                        "tensor {name}: expected {total} values, got {}",
                        data.len()
                    )));
                }
                cp.tensors
                    .push((name.to_string(), Tensor::from_vec(&shape, data)?));
            } else if !line.trim().is_empty() {
                return Err(NnError::Checkpoint(format!("unexpected line: {line}")));
            }
        }
        Err(NnError::Checkpoint("missing end marker".into()))
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let text = fs::read_to_string(path)
            .map_err(|e| NnError::Checkpoint(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut cp = Checkpoint::default();
        cp.meta.insert("variant".into(), "cnn".into());
        let vals = vec![0.1, -2.5e-300, f64::MIN_POSITIVE, 1.0 / 3.0, -0.0];
        cp.push("w", Tensor::from_vec(&[5], vals.clone()).unwrap());
        let text = cp.to_text();
        let back = Checkpoint::from_text(&text).unwrap();
        let t = back.tensor("w").unwrap();
        for (a, b) in t.data().iter().zip(vals.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.meta_value("variant"), Some("cnn"));
    }

    #[test]
    fn truncated_text_is_rejected() {
        let mut cp = Checkpoint::default();
        cp.push("w", Tensor::from_vec(&[3], vec![1.0, 2.0, 3.0]).unwrap());
        let text = cp.to_text();
        let cut = &text[..text.len() - 20];
        assert!(Checkpoint::from_text(cut).is_err());
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(Checkpoint::from_text("nope\nend\n").is_err());
    }
}

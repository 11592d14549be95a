//! Text format for trace-formula models.
//!
//! ```text
//! # comments start with '#'
//! group: gl2:4
//! gamma: [1 1; 0 1], [0 1; 1 0]
//! k: [3 0; 0 3]
//! pi: [0 1; 1 0]
//! ```
//!
//! `=` may be used instead of `:`. Generator lists are comma separated at
//! bracket depth zero and may be empty (trivial subgroup). `pi` defaults to
//! `e`; `gamma` and `k` default to the trivial subgroup.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::group::{ElemId, FiniteGroup, GroupKind};
use super::model::{build_model, FiniteGroupModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: GroupKind,
    /// Generator literals with their 1-based (line, column).
    pub gamma: Vec<(String, usize, usize)>,
    pub k: Vec<(String, usize, usize)>,
    pub pi: Option<(String, usize, usize)>,
}

/// Splits `s` on commas outside brackets, returning pieces with offsets.
fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out.into_iter()
        .filter(|(_, piece)| !piece.trim().is_empty())
        .map(|(off, piece)| (off + piece.len() - piece.trim_start().len(), piece.trim()))
        .collect()
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut gamma = None;
        let mut k = None;
        let mut pi = None;
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let body = line.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let sep = body
                .find([':', '='])
                .ok_or_else(|| Error::parse(line_no, 1, "expected `key: value`"))?;
            let key = body[..sep].trim();
            let value = &body[sep + 1..];
            let value_col = sep + 2;
            let items = |v: &str| -> Vec<(String, usize, usize)> {
                split_top_level(v)
                    .into_iter()
                    .map(|(off, s)| (s.to_string(), line_no, value_col + off))
                    .collect()
            };
            let dup = || Error::parse(line_no, 1, format!("duplicate key `{key}`"));
            match key {
                "group" => {
                    // `group: sym:3` splits at the first ':'
                    let kd = GroupKind::parse(value)
                        .map_err(|e| Error::parse(line_no, value_col, e.to_string()))?;
                    if kind.replace(kd).is_some() {
                        return Err(dup());
                    }
                }
                "gamma" => {
                    if gamma.replace(items(value)).is_some() {
                        return Err(dup());
                    }
                }
                "k" => {
                    if k.replace(items(value)).is_some() {
                        return Err(dup());
                    }
                }
                "pi" => {
                    let mut v = items(value);
                    if v.len() != 1 {
                        return Err(Error::parse(
                            line_no,
                            value_col,
                            "pi takes exactly one element",
                        ));
                    }
                    if pi.replace(v.remove(0)).is_some() {
                        return Err(dup());
                    }
                }
                other => {
                    return Err(Error::parse(line_no, 1, format!("unknown key `{other}`")));
                }
            }
        }
        Ok(Self {
            kind: kind.ok_or_else(|| Error::parse(1, 1, "missing `group` line"))?,
            gamma: gamma.unwrap_or_default(),
            k: k.unwrap_or_default(),
            pi,
        })
    }

    /// Resolves literals in `group` and builds the model.
    pub fn build(&self, group: Arc<FiniteGroup>) -> Result<FiniteGroupModel> {
        let resolve = |(s, line, col): &(String, usize, usize)| -> Result<ElemId> {
            group
                .parse_element(s)
                .map_err(|(off, msg)| Error::parse(*line, col + off, msg))
        };
        let gamma = self.gamma.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let k = self.k.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let pi = match &self.pi {
            Some(item) => resolve(item)?,
            None => group.identity(),
        };
        build_model(group, &gamma, &k, pi).map_err(|e| match (&self.pi, e) {
            (Some((_, line, col)), Error::InvalidArgument(msg)) => Error::parse(*line, *col, msg),
            (_, e) => e,
        })
    }

    pub fn to_model(&self) -> Result<FiniteGroupModel> {
        self.build(Arc::new(FiniteGroup::new(self.kind)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosettrace::kernel_trace;

    #[test]
    fn parses_cyclic_example() {
        let spec = ModelSpec::parse("group: cyclic:4\ngamma: 2\nk:\npi: 2\n").unwrap();
        let m = spec.to_model().unwrap();
        assert_eq!(kernel_trace(&m).unwrap(), 2);
    }

    #[test]
    fn parses_matrices_and_cycles() {
        let text = "# GL2(Z/4)\ngroup = gl2:4\ngamma = [1 1; 0 1], [0 1; 1 0]\nk = [3 0; 0 3]\npi = [0 1; 1 0]\n";
        let m = ModelSpec::parse(text).unwrap().to_model().unwrap();
        assert_eq!(m.k().order(), 2);
        let s = ModelSpec::parse("group: sym:4\ngamma: (1,2,3,4), (12)\n").unwrap();
        assert_eq!(s.gamma.len(), 2);
        assert_eq!(s.gamma[0].0, "(1,2,3,4)");
        assert_eq!(s.to_model().unwrap().gamma().order(), 24);
    }

    #[test]
    fn errors_carry_positions() {
        match ModelSpec::parse("group: sym:3\nfoo: 1\n") {
            Err(Error::Parse {
                line: 2, column: 1, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        match ModelSpec::parse("group: sym:3\ngamma: (12), (14)\n")
            .unwrap()
            .to_model()
        {
            Err(Error::Parse {
                line: 2, column, ..
            }) => assert_eq!(column, 15),
            other => panic!("{other:?}"),
        }
        match ModelSpec::parse("group: sym:3\nk: (12)\npi: (13)\n")
            .unwrap()
            .to_model()
        {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(ModelSpec::parse("gamma: 1\n").is_err());
        assert!(ModelSpec::parse("group: sym:3\npi: (12), (13)\n").is_err());
    }
}

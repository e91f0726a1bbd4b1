//! Scheme files.
//!
//! Power-set schemes: one binary string per line. Projective schemes: a
//! header line `q=<q> n=<n>` followed by one subspace per line in the text
//! form `101/011`. Blank lines and lines starting with `#` are ignored.

use anyhow::{bail, Context, Result};
use lattice_sb::families::{build_powerset_lattice, build_projective_lattice};
use lattice_sb::schemes::support_transform;
use lattice_sb::ElemId;

use crate::source::Built;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeFile {
    Powerset {
        n: usize,
        vectors: Vec<Vec<u8>>,
    },
    Projective {
        q: u32,
        n: usize,
        subspaces: Vec<String>,
    },
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse(text: &str) -> Result<SchemeFile> {
    let mut lines = content_lines(text).peekable();
    let Some(first) = lines.peek().copied() else {
        bail!("scheme file is empty");
    };
    if first.starts_with("q=") {
        lines.next();
        let (mut q, mut n) = (None, None);
        for token in first.split_whitespace() {
            match token.split_once('=') {
                Some(("q", v)) => {
                    q = Some(v.parse().with_context(|| format!("bad q in `{first}`"))?)
                }
                Some(("n", v)) => {
                    n = Some(v.parse().with_context(|| format!("bad n in `{first}`"))?)
                }
                _ => bail!("unexpected header token `{token}`"),
            }
        }
        let (Some(q), Some(n)) = (q, n) else {
            bail!("header must be `q=<q> n=<n>`");
        };
        return Ok(SchemeFile::Projective {
            q,
            n,
            subspaces: lines.map(str::to_string).collect(),
        });
    }
    let mut vectors = Vec::new();
    for line in lines {
        let v = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => bail!("`{line}` is not a binary string"),
            })
            .collect::<Result<Vec<u8>>>()?;
        vectors.push(v);
    }
    let n = vectors[0].len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        bail!("binary strings differ in length ({} vs {n})", bad.len());
    }
    Ok(SchemeFile::Powerset { n, vectors })
}

impl SchemeFile {
    /// Materializes the ambient lattice and maps every line to an element.
    pub fn load(&self) -> Result<(Built, Vec<ElemId>)> {
        match self {
            SchemeFile::Powerset { n, vectors } => {
                let lattice = build_powerset_lattice(*n)?;
                let ids = vectors
                    .iter()
                    .map(|v| support_transform(v))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((Built::Plain(lattice), ids))
            }
            SchemeFile::Projective { q, n, subspaces } => {
                let proj = build_projective_lattice(*n, *q)?;
                let ids = subspaces
                    .iter()
                    .map(|s| proj.parse_element(s))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((Built::Projective(proj), ids))
            }
        }
    }

    /// Resolves `I`, `O` or an element written like the file's lines.
    pub fn element(&self, built: &Built, text: &str) -> Result<ElemId> {
        let l = built.lattice();
        match text.trim() {
            "I" | "top" => return Ok(l.top()),
            "O" | "bottom" => return Ok(l.bottom()),
            _ => {}
        }
        match (self, built) {
            (SchemeFile::Projective { .. }, Built::Projective(p)) => Ok(p.parse_element(text)?),
            (SchemeFile::Powerset { n, .. }, _) => {
                let file = parse(text)?;
                match file {
                    SchemeFile::Powerset { n: m, vectors } if m == *n && vectors.len() == 1 => {
                        Ok(support_transform(&vectors[0])?)
                    }
                    _ => bail!("`{text}` is not a binary string of length {n}"),
                }
            }
            _ => unreachable!("lattice kind follows the file kind"),
        }
    }
}

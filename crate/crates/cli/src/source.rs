use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use lattice_sb::families::{
    build_named_lattice, build_powerset_lattice, build_projective_lattice, NamedLattice,
    ProjectiveLattice,
};
use lattice_sb::Lattice;

/// Where a lattice comes from. Exactly one of the selectors must be given.
#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Named example lattice: M3, N5, L1 or L2
    #[arg(long)]
    pub name: Option<String>,
    /// Power-set lattice Pow({1..N}); N may instead be given with -n
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "")]
    pub powerset: Option<String>,
    /// Projective lattice Sub(F_q^n)
    #[arg(long)]
    pub projective: bool,
    /// Lattice JSON file {"elements": [...], "covers": [[i, j], ...]}
    #[arg(long, value_name = "PATH")]
    pub lattice: Option<PathBuf>,
    /// Field size
    #[arg(short = 'q', default_value_t = 2)]
    pub q: u32,
    /// Ambient dimension or ground-set size
    #[arg(short = 'n')]
    pub n: Option<usize>,
}

pub enum Source {
    Named(NamedLattice),
    Powerset(usize),
    Projective { q: u32, n: usize },
    File(PathBuf),
}

pub enum Built {
    Plain(Lattice),
    Projective(ProjectiveLattice),
}

impl Built {
    pub fn lattice(&self) -> &Lattice {
        match self {
            Built::Plain(l) => l,
            Built::Projective(p) => &p.lattice,
        }
    }
}

impl SourceArgs {
    pub fn resolve(&self) -> Result<Source> {
        let chosen = [
            self.name.is_some(),
            self.powerset.is_some(),
            self.projective,
            self.lattice.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if chosen != 1 {
            bail!("choose exactly one of --name, --powerset, --projective, --lattice");
        }
        if let Some(name) = &self.name {
            return Ok(Source::Named(name.parse()?));
        }
        if let Some(p) = &self.powerset {
            let n = if p.is_empty() {
                self.n
                    .context("--powerset needs a size (--powerset N or -n N)")?
            } else {
                p.parse()
                    .with_context(|| format!("invalid powerset size `{p}`"))?
            };
            return Ok(Source::Powerset(n));
        }
        if self.projective {
            let n = self.n.context("--projective needs -n")?;
            return Ok(Source::Projective { q: self.q, n });
        }
        Ok(Source::File(self.lattice.clone().expect("checked above")))
    }

    pub fn build(&self) -> Result<(String, Built)> {
        match self.resolve()? {
            Source::Named(name) => Ok((
                format!("{name:?}"),
                Built::Plain(build_named_lattice(name)?),
            )),
            Source::Powerset(n) => Ok((
                format!("Pow({n})"),
                Built::Plain(build_powerset_lattice(n)?),
            )),
            Source::Projective { q, n } => Ok((
                format!("Sub(F_{q}^{n})"),
                Built::Projective(build_projective_lattice(n, q)?),
            )),
            Source::File(path) => {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let lattice = Lattice::from_json_str(&text)?;
                Ok((path.display().to_string(), Built::Plain(lattice)))
            }
        }
    }
}

//! Command line front end and file formats for `hexspec-core`.

pub mod artifacts;
pub mod cli;
pub mod format;
pub mod verify;

use std::fmt;
use std::path::Path;

use hexspec_core::PotentialSpec;

/// How a run ended short of success. Each kind maps to a distinct exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unparseable flux or potential, missing output directory.
    Usage(String),
    /// The computation itself refused the input or IO failed.
    Domain(anyhow::Error),
    /// A computed artifact did not pass its own checks.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Domain(_) => 1,
            Failure::Verification(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Domain(e) => write!(f, "error: {e:#}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<hexspec_core::Error> for Failure {
    fn from(e: hexspec_core::Error) -> Self {
        Failure::Domain(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Domain(e)
    }
}

/// Parses `zero`, `mathieu:A` or `file:<path>`; the file holds one sample
/// per line on a uniform grid of `[0, 1]`, with blank lines and `#`
/// comments ignored.
pub fn parse_potential(arg: &str) -> Result<PotentialSpec, Failure> {
    if let Some(path) = arg.strip_prefix("file:") {
        let samples = read_samples(Path::new(path))?;
        let spec = PotentialSpec::tabulated(samples)
            .map_err(|e| Failure::Usage(format!("potential file {path}: {e}")))?;
        if let PotentialSpec::Tabulated(tab) = &spec {
            if tab.needs_symmetry_warning() {
                eprintln!(
                    "warning: potential in {path} is not even (defect {:.3e}); using its symmetrization",
                    tab.asymmetry()
                );
            }
        }
        return Ok(spec);
    }
    PotentialSpec::parse(arg).map_err(|e| Failure::Usage(format!("potential {arg:?}: {e}")))
}

fn read_samples(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read potential file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Failure::Usage(format!("{}:{}: not a number: {line:?}", path.display(), i + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn potential_forms() {
        assert_eq!(parse_potential("zero").unwrap(), PotentialSpec::Zero);
        assert_eq!(parse_potential("mathieu:20").unwrap(), PotentialSpec::Mathieu { amplitude: 20.0 });
        assert!(matches!(parse_potential("cosine"), Err(Failure::Usage(_))));
        assert!(matches!(parse_potential("file:/nonexistent/v.txt"), Err(Failure::Usage(_))));
    }

    #[test]
    fn potential_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# samples\n1.0\n0.5\n\n0.5\n1.0").unwrap();
        let spec = parse_potential(&format!("file:{}", f.path().display())).unwrap();
        assert!((spec.value(0.0) - 1.0).abs() < 1e-12);
        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "1.0\nx").unwrap();
        assert!(parse_potential(&format!("file:{}", bad.path().display())).is_err());
    }
}

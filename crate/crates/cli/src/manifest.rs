use std::fmt;
use std::path::{Path, PathBuf};

/// What one invocation reads and writes, checked before any work starts.
#[derive(Debug, Default)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub lambda: Option<f64>,
    pub top_senses: Option<usize>,
    pub cutoffs: Vec<usize>,
}

#[derive(Debug)]
pub struct ManifestError(pub String);

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ManifestError {}

impl RunManifest {
    pub fn new(subcommand: &'static str, seed: u64) -> Self {
        RunManifest { subcommand, seed, ..Default::default() }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    /// One-line description for the log.
    pub fn summary(&self) -> String {
        let paths = |ps: &[PathBuf]| ps.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",");
        format!(
            "{} seed={} config={} in=[{}] out=[{}] lambda={:?} m={:?} cutoffs={:?}",
            self.subcommand,
            self.seed,
            self.config.as_ref().map_or("-".into(), |p| p.display().to_string()),
            paths(&self.inputs),
            paths(&self.outputs),
            self.lambda,
            self.top_senses,
            self.cutoffs
        )
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        for p in self.config.iter().chain(&self.inputs) {
            if !p.is_file() {
                return Err(ManifestError(format!("{}: input file not found", p.display())));
            }
        }
        for p in &self.outputs {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(ManifestError(format!("{}: output directory does not exist", parent.display())));
            }
            if p.is_dir() {
                return Err(ManifestError(format!("{}: output path is a directory", p.display())));
            }
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l <= 1.0) {
                return Err(ManifestError(format!("--lambda must lie in (0, 1], got {l}")));
            }
        }
        if let Some(&t) = self.cutoffs.iter().find(|&&t| t == 0) {
            return Err(ManifestError(format!("cutoffs must be positive, got {t}")));
        }
        Ok(())
    }
}

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;

/// CSV body plus the trailing `# backrank <version> seed=.. lambda=..` line.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv { text: format!("{header}\n") }
    }

    pub fn row(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn finish(mut self, seed: u64, lambda: &str) -> String {
        let _ = writeln!(self.text, "# backrank {} seed={seed} lambda={lambda}", env!("CARGO_PKG_VERSION"));
        self.text
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing to stdout")?;
            out.flush().context("writing to stdout")
        }
    }
}

pub fn lambda_label(lambdas: &[f64]) -> String {
    if lambdas.is_empty() {
        "none".into()
    } else {
        lambdas.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
    }
}

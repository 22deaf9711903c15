//! Run manifests: enough provenance to re-run a command and compare bytes.
//! Emitted at the top of every report and as a sibling `.manifest` file next
//! to every file output. No timestamps, so reruns reproduce exactly.

use std::path::Path;

use polysign::pattern::sha256_hex;

use crate::report::Report;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Default)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, argv: &[String]) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            argv: argv.to_vec(),
            ..Default::default()
        }
    }

    pub fn input_file(&mut self, name: &str, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs
            .push((name.to_string(), sha256_hex(&bytes)));
        Ok(())
    }

    pub fn input_digest(&mut self, name: &str, digest: &str) {
        self.inputs.push((name.to_string(), digest.to_string()));
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn emit(&self, report: &mut Report) {
        report.push("manifest.version", VERSION);
        report.push("manifest.subcommand", &self.subcommand);
        report.push("manifest.argv", self.argv.join(" "));
        if let Some(seed) = self.seed {
            report.push("manifest.seed", seed);
        }
        match self.threads {
            Some(n) => report.push("manifest.threads", n),
            None => report.push("manifest.threads", "default"),
        }
        for (name, digest) in &self.inputs {
            report.push(&format!("manifest.input.{name}"), digest);
        }
        for (i, path) in self.outputs.iter().enumerate() {
            report.push(&format!("manifest.output.{i}"), path);
        }
    }

    pub fn render_standalone(&self) -> String {
        let mut r = Report::new();
        self.emit(&mut r);
        r.render()
    }

    /// Writes `<path>.manifest` next to an output file.
    pub fn save_beside(&self, path: &Path) -> std::io::Result<()> {
        let mut name = path.as_os_str().to_owned();
        name.push(".manifest");
        std::fs::write(name, self.render_standalone())
    }
}

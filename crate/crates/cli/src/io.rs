use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(m: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: m.into() }
    }

    pub fn parse(m: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: m.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: 1, message: format!("{}: {e}", path.display()) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config_hash: String,
    config: &'a C,
    files: Vec<FileEntry>,
    warnings: &'a [String],
}

/// Collects output files and writes each one atomically, followed by the manifest.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        f.write_all(contents.as_bytes()).map_err(|e| CliError::io(&tmp, e))?;
        f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))?;
        self.files.push(FileEntry { name: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    /// Writes a CSV preceded by a `# config <hash> seed <seed>` line.
    pub fn write_csv(&mut self, name: &str, hash: &str, seed: u64, body: &str) -> Result<(), CliError> {
        self.write(name, &format!("# config {hash} seed {seed}\n{body}"))
    }

    pub fn finish<C: Serialize>(mut self, command: &str, seed: u64, config: &C, warnings: &[String]) -> Result<String, CliError> {
        let hash = config_hash(config);
        let files = std::mem::take(&mut self.files);
        let m = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config_hash: hash.clone(),
            config,
            files,
            warnings,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        self.write("manifest.json", &text)?;
        Ok(hash)
    }
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    sha256_hex(serde_json::to_string(config).expect("config serializes").as_bytes())
}

use std::io::{self, Write};
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Where a subcommand's data went.
pub const STDOUT: &str = "-";

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub subcommand: String,
    /// SHA-256 over the bytes of every input file, in the order read.
    pub input_digest: String,
    pub outputs: Vec<String>,
    pub wall_time: f64,
}

pub struct Recorder {
    subcommand: String,
    hasher: Sha256,
    outputs: Vec<String>,
    started: Instant,
}

impl Recorder {
    pub fn new(subcommand: &str) -> Self {
        Recorder {
            subcommand: subcommand.to_string(),
            hasher: Sha256::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, bytes: &[u8]) {
        self.hasher.update(bytes);
    }

    pub fn output(&mut self, path: &str) {
        self.outputs.push(path.to_string());
    }

    pub fn finish(self) -> RunReport {
        let elapsed = self.started.elapsed();
        self.finish_with(elapsed)
    }

    fn finish_with(self, elapsed: Duration) -> RunReport {
        RunReport {
            subcommand: self.subcommand,
            input_digest: format!("{:x}", self.hasher.finalize()),
            outputs: self.outputs,
            wall_time: elapsed.as_secs_f64(),
        }
    }
}

impl RunReport {
    pub fn uses_stdout(&self) -> bool {
        self.outputs.iter().any(|o| o == STDOUT)
    }

    pub fn print(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "subcommand  {}", self.subcommand)?;
        writeln!(out, "input       sha256:{}", self.input_digest)?;
        for o in &self.outputs {
            let shown = if o == STDOUT { "(stdout)" } else { o };
            writeln!(out, "output      {shown}")?;
        }
        writeln!(out, "wall time   {:.3} s", self.wall_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        let r = Recorder::new("scale").finish_with(Duration::ZERO);
        assert_eq!(r.input_digest, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}

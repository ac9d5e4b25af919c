//! Checked-in golden instances shared by the CLI tests and the acceptance run.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct Golden {
    pub name: &'static str,
    pub input: &'static str,
    pub domain: &'static str,
    pub extra: &'static [&'static str],
}

pub const GOLDENS: [Golden; 3] = [
    Golden {
        name: "sphere",
        input: "sphere_h.json",
        domain: "sphere",
        extra: &[],
    },
    Golden {
        name: "approx",
        input: "approx_h.json",
        domain: "sphere",
        extra: &["--samples", "20000"],
    },
    Golden {
        name: "simplex",
        input: "simplex_h.json",
        domain: "simplex",
        extra: &[],
    },
];

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn lowform() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowform"))
}

impl Golden {
    /// Runs the pipeline into `out`, with `LOWFORM_THREADS` set when given.
    pub fn run(&self, out: &Path, threads: Option<usize>) -> Output {
        let mut cmd = lowform();
        cmd.arg("pipeline")
            .arg("--input")
            .arg(data_dir().join(self.input))
            .args(["--domain", self.domain, "--seed", "3"])
            .args(self.extra)
            .arg("--out")
            .arg(out);
        match threads {
            Some(t) => cmd.env("LOWFORM_THREADS", t.to_string()),
            None => cmd.env_remove("LOWFORM_THREADS"),
        };
        cmd.output().expect("binary runs")
    }

    pub fn expected_report(&self) -> Vec<u8> {
        std::fs::read(data_dir().join("expected").join(format!("{}_report.json", self.name))).expect("golden report")
    }
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const GOLDEN_SEED: u64 = 20_240_601;

pub fn mtc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mtc"))
}

pub fn run(args: &[&str]) -> Output {
    mtc().args(args).output().expect("spawn mtc")
}

pub fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

pub fn scenario(n: usize, pattern: &str, p: f64, phi: Option<f64>, shots: usize, seed: u64) -> String {
    let phi = phi.map(|v| format!("phi = {v:?}\n")).unwrap_or_default();
    format!("seed = {seed}\nshots_per_run = {shots}\n\n[state]\nn = {n}\npattern = \"{pattern}\"\np = {p:?}\n{phi}")
}

/// Report text with timing lines removed.
pub fn without_timing(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("elapsed_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_dirichlet-graph");

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs the binary from the data directory so relative file arguments and
/// the paths echoed in metadata are stable.
pub fn run(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .current_dir(data_dir())
        .env_remove("DIRICHLET_GRAPH_THREADS");
    if let Some(t) = threads {
        cmd.env("DIRICHLET_GRAPH_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

/// Command lines with checked-in expected output.
pub const GOLDEN: &[(&str, &[&str])] = &[
    (
        "classify_z",
        &[
            "classify",
            "--question",
            "recurrence",
            "--gen",
            "lattice:1",
            "--origin",
            "0",
            "--radii",
            "10,20,40",
            "--tol",
            "1e-2",
        ],
    ),
    (
        "classify_sc_single_killed",
        &[
            "classify",
            "--question",
            "sc",
            "--graph",
            "single_killed.g",
            "--alpha",
            "1",
        ],
    ),
    (
        "classify_tree",
        &[
            "classify",
            "--question",
            "recurrence",
            "--gen",
            "tree:2",
            "--radii",
            "5,10,15",
            "--tol",
            "1e-3",
        ],
    ),
    (
        "classify_sc_chain",
        &[
            "classify",
            "--question",
            "sc",
            "--gen",
            "path_chain:beta=4,mu=1/2",
            "--origin",
            "0",
            "--radii",
            "5,10,15,20",
            "--tol",
            "1e-6",
        ],
    ),
    (
        "capacity_tree",
        &["capacity", "--gen", "tree:2", "--origin", "root", "--radius", "2"],
    ),
    (
        "capacity_z2",
        &["capacity", "--gen", "lattice:2", "--radii", "2,4,8,16"],
    ),
    (
        "resolvent_chain",
        &[
            "resolvent",
            "--gen",
            "path_chain:beta=4,mu=1/2",
            "--radii",
            "2,4,8",
            "--alpha",
            "1",
        ],
    ),
    ("green_p3", &["green", "--graph", "p3.g", "--u", "center_indicator.fn"]),
    (
        "witness_z",
        &["witness", "--gen", "lattice:1", "--radius", "3", "--u", "z_peak.fn"],
    ),
    ("gen_z2r3", &["gen", "lattice:2", "--radius", "3"]),
];

pub fn golden_path(name: &str) -> PathBuf {
    golden_dir().join(format!("{name}.csv"))
}

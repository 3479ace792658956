//! Command-line front end. Subcommand handlers live next to the modules they
//! exercise; this file wires argument parsing to report generation.

/// Entry point for the `qpb` binary; returns the process exit code.
pub fn main() -> i32 {
    eprintln!("qpb: not yet wired");
    2
}

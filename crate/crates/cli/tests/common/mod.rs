use std::path::PathBuf;

use conflap::{run_captured, Outcome};

/// Golden invocations: (file name, arguments, expected exit code).
pub const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("rn_n2_k3.json", &["verify", "rn", "--n", "2", "--k", "3", "--format", "json"], 0),
    ("comm_n2_k2.json", &["verify", "comm", "--n", "2", "--w-range", "-1..1", "--k-max", "2", "--format", "json"], 0),
    ("comm_n2_injected.json", &["verify", "comm", "--n", "2", "--w-range", "0..0", "--k-max", "1", "--inject-bug", "--format", "json"], 1),
    ("covariance_n2_inversion.json", &["verify", "covariance", "--n", "2", "--motion", "inversion", "--format", "json"], 0),
    ("conformality_n3.txt", &["verify", "conformality", "--n", "3"], 0),
    ("yamabe_n2.txt", &["verify", "yamabe", "--n", "2", "--max-degree", "2"], 0),
    ("main_n3_k1_apply.json", &["verify", "main", "--n", "3", "--apply-to", "y1^2*y2 + 3/2*y1", "--format", "json"], 0),
    ("spectrum_n4_k2.json", &["spectrum", "--n", "4", "--k", "2", "--l-max", "2", "--format", "json"], 0),
    ("numcheck_n2_k1.json", &["numcheck", "--n-max", "2", "--k-max", "1", "--samples", "5", "--format", "json"], 0),
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Runs one golden invocation; with `UPDATE_GOLDEN=1` the file is rewritten.
/// Returns a description of the first mismatch.
pub fn check_golden(name: &str, args: &[&str], code: i32) -> Result<Outcome, String> {
    let out = run_captured(args);
    if out.code != code {
        return Err(format!("{name}: exit {} != {code}; stderr: {}", out.code, out.stderr));
    }
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != out.stdout {
        return Err(format!("{name}: output differs from golden file"));
    }
    Ok(out)
}

//! Run the full command-line pipeline on the bundled scenario into a
//! temporary directory and list the artifacts.
//!
//!     cargo run --release --example pipeline

use std::path::Path;

fn main() {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/vdp_mu1.json");
    let out = tempfile::tempdir().expect("temporary directory");
    let code = lienard::cli::main_with_args([
        "lienard".as_ref(),
        "pipeline".as_ref(),
        "--scenario".as_ref(),
        scenario.as_os_str(),
        "--out".as_ref(),
        out.path().as_os_str(),
    ]);
    println!("exit code {code}");
    let mut files: Vec<_> = std::fs::read_dir(out.path()).unwrap().flatten().collect();
    files.sort_by_key(|e| e.file_name());
    for f in files {
        println!(
            "  {:<18} {:>8} bytes",
            f.file_name().to_string_lossy(),
            f.metadata().unwrap().len()
        );
    }
    let floquet = std::fs::read_to_string(out.path().join("floquet.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&floquet).unwrap();
    println!("rho2 = {}, condition10 = {}", value["rho2"], value["condition10"]);
}

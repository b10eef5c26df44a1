use std::path::{Path, PathBuf};
use std::process::Command;

/// `target/<profile>`, found from the test executable.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = profile_dir().join("libcantor_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "{\"antichain\":[\"00\",\"11\"]}\n");
}

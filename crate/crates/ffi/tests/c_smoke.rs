use std::path::PathBuf;
use std::process::Command;

// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // `cargo test` only builds the rlib; build the static library explicitly
    let status = Command::new(env!("CARGO"))
        .args(["build", "--offline", "-p", "viscoshell-ffi", "--lib"])
        .current_dir(&root)
        .status()
        .unwrap();
    assert!(status.success());
    // target/<profile>/deps/<test> -> target/
    let target = std::env::current_exe().unwrap().ancestors().nth(3).unwrap().to_path_buf();
    let lib = target.join("debug").join("libviscoshell_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

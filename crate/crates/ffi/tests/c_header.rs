//! Compiles and links a small C program against the generated header and the
//! static library. Skipped when no C compiler or static library is available.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "morrey.h"

int main(void) {
    MorreySemigroup *sg = NULL;
    if (morrey_semigroup_new("rotation:1", &sg) != MORREY_STATUS_OK) return 1;
    double wr, wi, dr, di;
    if (morrey_semigroup_flow(sg, 1.5707963267948966, 0.5, 0.0, &wr, &wi, &dr, &di) != MORREY_STATUS_OK) return 2;
    morrey_semigroup_free(sg);
    if (fabs(wr) > 1e-15 || fabs(wi - 0.5) > 1e-15) return 3;
    MorreyFunction *f = NULL;
    if (morrey_function_new("bogus", 0.5, &f) != MORREY_STATUS_UNKNOWN_LABEL) return 4;
    if (morrey_last_error_message() == NULL) return 5;
    double value = 0.0;
    if (morrey_function_new("monomial:1", 0.5, &f) != MORREY_STATUS_OK) return 6;
    if (morrey_seminorm(f, MORREY_SEMINORM_P3, 0.5, 3, 8, 3, 8, &value) != MORREY_STATUS_OK) return 7;
    morrey_function_free(f);
    if (!(value > 0.0) || !isfinite(value)) return 8;
    printf("%s\n", morrey_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/<test binary>
    exe.ancestors().nth(2).map(PathBuf::from).unwrap_or_else(|| manifest.join("../../target/debug"))
}

#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libmorrey_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no cc or {} missing", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("morrey_ffi_c_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C program failed to build");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "C program exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), env!("CARGO_PKG_VERSION"));
    let _ = std::fs::remove_dir_all(&dir);
}

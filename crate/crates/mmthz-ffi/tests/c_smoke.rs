//! Compiles and runs a small C program against the generated header and
//! the static library, exercising handles, status codes, and string
//! ownership from real C.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "mmthz.h"

int main(void) {
    double tau = 0.0;
    MmthzSpectrum *spectrum = mmthz_spectrum_default();
    if (!spectrum) return 1;
    if (mmthz_transmittance(spectrum, 1000.0, 60e9, &tau) != MMTHZ_STATUS_OK) return 2;
    /* 15 dB/km over 1 km: tau = 10^-1.5 */
    if (tau < 0.0316 || tau > 0.0317) return 3;

    MmthzLosModel *model = mmthz_los_uma_umi(18.0, 63.0);
    if (!model) return 4;
    double p = 0.0;
    if (mmthz_p_los(model, 100.0, &p) != MMTHZ_STATUS_OK) return 5;
    if (p < 0.34 || p > 0.36) return 6;
    mmthz_los_model_free(model);

    MmthzRegistry *registry = mmthz_registry_default();
    char *json = NULL;
    if (mmthz_registry_lookup_json(registry, 60.5e9, &json) != MMTHZ_STATUS_OK) return 7;
    if (!strstr(json, "60 GHz lower band")) return 8;
    mmthz_string_free(json);
    mmthz_registry_free(registry);

    /* errors surface as status codes plus a readable message */
    if (mmthz_transmittance(spectrum, -1.0, 60e9, &tau) != MMTHZ_STATUS_DOMAIN_ERROR) return 9;
    char buffer[256];
    if (mmthz_last_error_message(buffer, sizeof buffer) == 0) return 10;
    if (strlen(buffer) == 0) return 11;
    mmthz_spectrum_free(spectrum);

    printf("ok\n");
    return 0;
}
"#;

#[test]
fn c_program_compiles_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    assert!(
        include_dir.join("mmthz.h").exists(),
        "generated header missing; build.rs should have produced it"
    );
    let target_dir = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("..").join("..").join("target"));
    let lib = target_dir.join("debug").join("libmmthz_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );

    let work = tempfile::tempdir().unwrap();
    let source = work.path().join("smoke.c");
    let binary = work.path().join("smoke");
    std::fs::write(&source, C_PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-o")
        .arg(&binary)
        .arg("-I")
        .arg(&include_dir)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .output()
        .expect("cc must be invocable");
    assert!(
        compile.status.success(),
        "compilation failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "C smoke test failed with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

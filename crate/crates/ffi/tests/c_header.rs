use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <stdlib.h>
#include "confluent_susy.h"

int main(void) {
    SusyConfig *cfg = NULL;
    if (susy_config_from_json("{\"system\": {\"name\": \"trig\"}}", &cfg) != SUSY_STATUS_OK) return 10;
    size_t n = 0;
    if (susy_spectrum(cfg, NULL, 0, &n) != SUSY_STATUS_OK || n != 3) return 11;
    double eps[3];
    if (susy_spectrum(cfg, eps, 3, &n) != SUSY_STATUS_OK) return 12;

    SusyTransform *t = NULL;
    if (susy_transform(cfg, &t) != SUSY_STATUS_OK) return 13;
    size_t len = 0;
    susy_transform_curve(t, SUSY_CURVE_Q1, NULL, 0, &len);
    double *q1 = malloc(len * sizeof(double));
    if (susy_transform_curve(t, SUSY_CURVE_Q1, q1, len, &len) != SUSY_STATUS_OK) return 14;
    printf("%.10f %.10f %.10f %.10f %zu\n", eps[0], eps[1], eps[2], susy_transform_lambda(t), len);
    free(q1);
    susy_transform_free(t);

    SusyConfig *bad = NULL;
    SusyStatus s = susy_config_from_json("{", &bad);
    if (s != SUSY_STATUS_CONFIG || bad != NULL || susy_last_error() == NULL) return 15;
    susy_config_free(cfg);
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>`, where cargo puts the cdylib next to `deps/`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/confluent_susy.h")).unwrap();
    for name in [
        "typedef struct SusyConfig SusyConfig;",
        "typedef struct SusyTransform SusyTransform;",
        "SUSY_STATUS_REGULARITY = 3",
        "SUSY_CURVE_Q1 = 5",
        "susy_config_from_json(const char *json, struct SusyConfig **out)",
        "const char *susy_last_error(void)",
        "void susy_string_free(char *s)",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let exe = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let lib_dir = profile_dir();
    assert!(
        lib_dir.join("libconfluent_susy_ffi.so").exists(),
        "cdylib missing in {}",
        lib_dir.display()
    );
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lconfluent_susy_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .status()
        .unwrap();
    assert!(status.success());

    let out = Command::new(&exe).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fields: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .split_whitespace()
        .map(String::from)
        .collect();
    let vals: Vec<f64> = fields[..4].iter().map(|s| s.parse().unwrap()).collect();
    for (got, want) in vals[..3].iter().zip([25.0, 49.0, 81.0]) {
        assert!((got - want).abs() < 1e-6, "{got}");
    }
    assert_eq!(vals[3], 25.0);
    assert!(fields[4].parse::<usize>().unwrap() > 1000);
}

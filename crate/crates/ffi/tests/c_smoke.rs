use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "diacell.h"

int main(void) {
    DcTable *table = dc_table_default();
    double f = 0.0;
    if (dc_table_frequency_from_pressure(table, 140.0, &f) != DC_STATUS_OK || f != 222.0) return 1;
    DcCell *cell = NULL;
    if (dc_cell_new_with_table(table, DC_MODE_DUAL, 42, 0.0, &cell) != DC_STATUS_OK) return 2;
    dc_table_free(table);
    DcReading r;
    if (dc_cell_run_cycle(cell, 160.0, 120.0, 0, &r) != DC_STATUS_OK) return 3;
    if (fabs(r.p_diff_pa - 40.0) > 2.0) return 4;
    if (dc_cell_median_of_trials(cell, 150.0, 150.0, 4, 0, &r) != DC_STATUS_INVALID_SPEC) return 5;
    if (dc_last_error_message()[0] == '\0') return 6;
    dc_cell_free(cell);
    printf("%.3f\n", f);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_staticlib() {
    let lib = target_dir().join("libdiacell_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = std::env::temp_dir().join(format!("diacell-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "222.000");
    let _ = std::fs::remove_dir_all(dir);
}

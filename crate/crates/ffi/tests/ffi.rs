use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use arithgraph_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { ag_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ag_last_error()) }.to_str().unwrap().to_string()
}

fn generate(family: &str, args: &str) -> *mut AgGraph {
    let (f, a) = (CString::new(family).unwrap(), CString::new(args).unwrap());
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ag_graph_generate(f.as_ptr(), a.as_ptr(), -1, &mut g) }, AG_OK);
    g
}

fn index(g: *const AgGraph, name: &str) -> usize {
    let n = CString::new(name).unwrap();
    let mut i = usize::MAX;
    assert_eq!(unsafe { ag_graph_vertex_index(g, n.as_ptr(), &mut i) }, AG_OK);
    i
}

#[test]
fn parse_and_describe() {
    let text = CString::new("vertex a 1\nvertex b 1\nedge a b 3\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ag_graph_parse(text.as_ptr(), &mut g) }, AG_OK);
    let mut n = 0;
    assert_eq!(unsafe { ag_graph_vertex_count(g, &mut n) }, AG_OK);
    assert_eq!(n, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ag_phi_describe(g, &mut s) }, AG_OK);
    assert_eq!(take(s), "Z/3");
    assert_eq!(unsafe { ag_phi_invariant_factors(g, &mut s) }, AG_OK);
    assert_eq!(take(s), "3");
    assert_eq!(unsafe { ag_graph_to_text(g, &mut s) }, AG_OK);
    assert_eq!(take(s), "vertex a 1\nvertex b 1\nedge a b 3\n");
    unsafe { ag_graph_free(g) };
}

#[test]
fn error_codes() {
    let bad = CString::new("vertex a 2\nvertex b 1\nedge a b\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ag_graph_parse(bad.as_ptr(), &mut g) }, AG_ERR_GRAPH);
    assert!(g.is_null());
    assert!(last_error().contains("MR != 0"), "{}", last_error());
    assert_eq!(unsafe { ag_graph_parse(ptr::null(), &mut g) }, AG_ERR_NULL);
    let mut n = 0;
    assert_eq!(unsafe { ag_graph_vertex_count(ptr::null(), &mut n) }, AG_ERR_NULL);

    let g = generate("cycle", "5");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ag_structural_order(g, 0, 1, 5, &mut s) }, AG_ERR_PRECONDITION);
    assert!(last_error().contains(arithgraph::citation::ORDER_VIA_STRUCTURE));
    assert_eq!(unsafe { ag_pair_order(g, 0, 9, 0, &mut s) }, AG_ERR_GRAPH);
    assert_eq!(unsafe { ag_pair_order(g, 0, 1, 4, &mut s) }, AG_ERR_INVALID_ARGUMENT);
    unsafe { ag_graph_free(g) };
    unsafe { ag_graph_free(ptr::null_mut()) };
    unsafe { ag_string_free(ptr::null_mut()) };
}

#[test]
fn orders_pairing_and_verdicts() {
    let g = generate("kodaira_star", "0");
    let (l1, l2, l3) = (index(g, "l1"), index(g, "l2"), index(g, "l3"));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ag_pair_order(g, l1, l2, 0, &mut s) }, AG_OK);
    assert_eq!(take(s), "2");
    assert_eq!(unsafe { ag_structural_order(g, l1, l2, 2, &mut s) }, AG_OK);
    assert_eq!(take(s), "2");
    assert_eq!(unsafe { ag_pairing(g, l1, l2, l1, l3, &mut s) }, AG_OK);
    assert_eq!(take(s), "1/2");

    let mut verdict = -1;
    let mut cite: *const c_char = ptr::null();
    assert_eq!(
        unsafe { ag_classify(g, l1, l2, 2, 0, &mut verdict, &mut s, &mut cite) },
        AG_OK
    );
    assert_eq!(verdict, AG_VERDICT_IN_PSI);
    assert_eq!(take(s), "2");
    assert_eq!(unsafe { CStr::from_ptr(cite) }.to_str().unwrap(), arithgraph::citation::IN_PSI);
    assert_eq!(
        unsafe { ag_classify(g, l1, l2, 2, 2, &mut verdict, ptr::null_mut(), ptr::null_mut()) },
        AG_OK
    );
    assert_eq!(verdict, AG_VERDICT_UNKNOWN);
    unsafe { ag_graph_free(g) };
}

#[test]
fn handles_are_usable_across_threads() {
    struct Shared(*mut AgGraph);
    unsafe impl Send for Shared {}
    unsafe impl Sync for Shared {}
    let g = Shared(generate("cycle", "12"));
    std::thread::scope(|scope| {
        for _ in 0..4 {
            let g = &g;
            scope.spawn(move || {
                let mut s = ptr::null_mut();
                assert_eq!(unsafe { ag_pair_order(g.0, 0, 1, 2, &mut s) }, AG_OK);
                assert_eq!(take(s), "4");
            });
        }
    });
    unsafe { ag_graph_free(g.0) };
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "arithgraph.h"

int main(void) {
    AgGraph *g = NULL;
    if (ag_graph_generate("cycle", "6", -1, &g) != AG_OK) return 1;
    char *s = NULL;
    if (ag_phi_describe(g, &s) != AG_OK) return 2;
    int ok = strcmp(s, "Z/6") == 0;
    ag_string_free(s);
    if (ag_pair_order(g, 0, 7, 0, &s) != AG_ERR_GRAPH) return 3;
    if (strlen(ag_last_error()) == 0) return 4;
    ag_graph_free(g);
    printf("%s\n", ok ? "ok" : "mismatch");
    return ok ? 0 : 5;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_c_check");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let syntax = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libarithgraph_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping link step", lib.display());
        return;
    }
    let bin = dir.join("main");
    let link = Command::new(cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

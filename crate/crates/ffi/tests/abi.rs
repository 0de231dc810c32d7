use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use bpk_rzk_ffi::*;

fn world(profile: BpkProfile, seed: u64) -> *mut BpkWorld {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { bpk_world_new(profile, 8, seed, &mut w) }, BpkStatus::Ok);
    assert!(!w.is_null());
    w
}

fn log(w: *mut BpkWorld) -> String {
    let mut needed = 0usize;
    assert_eq!(unsafe { bpk_world_log(w, ptr::null_mut(), 0, &mut needed) }, BpkStatus::BufferTooSmall);
    let mut buf = vec![0u8; needed];
    assert_eq!(unsafe { bpk_world_log(w, buf.as_mut_ptr().cast(), buf.len(), &mut needed) }, BpkStatus::Ok);
    CStr::from_bytes_with_nul(&buf).unwrap().to_str().unwrap().to_string()
}

#[test]
fn owf_matches_hand_value() {
    let mut y = 0;
    assert_eq!(unsafe { bpk_owf_eval(23, 11, 2, 3, &mut y) }, BpkStatus::Ok);
    assert_eq!(y, 8);
    assert_eq!(unsafe { bpk_owf_eval(23, 11, 2, 11, &mut y) }, BpkStatus::InvalidArgument);
    assert_eq!(unsafe { bpk_owf_eval(24, 11, 2, 1, &mut y) }, BpkStatus::InvalidArgument);
    assert_eq!(unsafe { bpk_owf_eval(23, 11, 2, 1, ptr::null_mut()) }, BpkStatus::NullPointer);
}

#[test]
fn honest_session_through_handles() {
    let w = world(BpkProfile::Tiny, 1);
    let mut sid = 99;
    assert_eq!(unsafe { bpk_world_start(w, 0, &mut sid) }, BpkStatus::Ok);
    assert_eq!(sid, 0);
    let mut v = BpkVerdict::Halt;
    assert_eq!(unsafe { bpk_world_deliver(w, sid, &mut v) }, BpkStatus::Ok);
    assert_eq!(v, BpkVerdict::Pending);
    let snap = CString::new("s").unwrap();
    assert_eq!(unsafe { bpk_world_snap(w, sid, snap.as_ptr()) }, BpkStatus::Ok);
    assert_eq!(unsafe { bpk_world_run_to_end(w, sid, &mut v) }, BpkStatus::Ok);
    assert_eq!(v, BpkVerdict::Accept);
    assert_eq!(unsafe { bpk_world_reset(w, sid, snap.as_ptr()) }, BpkStatus::Ok);
    assert_eq!(unsafe { bpk_world_run_to_end(w, sid, &mut v) }, BpkStatus::Ok);
    let mut unique = false;
    assert_eq!(unsafe { bpk_world_prefixes_unique(w, &mut unique) }, BpkStatus::Ok);
    assert!(unique);
    assert!(log(w).ends_with("verdict 0 accept\n"));
    unsafe { bpk_world_free(w) };
}

#[test]
fn errors_are_codes() {
    let w = world(BpkProfile::Tiny, 2);
    let mut v = BpkVerdict::Pending;
    assert_eq!(unsafe { bpk_world_deliver(w, 5, &mut v) }, BpkStatus::Protocol);
    assert_eq!(unsafe { bpk_world_run_to_end(w, 5, &mut v) }, BpkStatus::Protocol);
    let bad = CString::new("missing").unwrap();
    assert_eq!(unsafe { bpk_world_reset(w, 0, bad.as_ptr()) }, BpkStatus::Protocol);
    assert_eq!(unsafe { bpk_world_snap(w, 0, ptr::null()) }, BpkStatus::NullPointer);
    assert_eq!(unsafe { bpk_world_start(ptr::null_mut(), 0, &mut 0) }, BpkStatus::NullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bpk_world_new(BpkProfile::Tiny, 0, 0, &mut out) }, BpkStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(bpk_status_message(BpkStatus::BufferTooSmall)) };
    assert_eq!(msg.to_str().unwrap(), "buffer too small");
    unsafe {
        bpk_world_free(w);
        bpk_world_free(ptr::null_mut());
    }
}

#[test]
fn reset_attack_codes() {
    let mut n = 0;
    let full = CString::new("full").unwrap();
    let weak = CString::new("no-prf-no-subproof").unwrap();
    assert_eq!(unsafe { bpk_reset_attack(BpkProfile::Tiny, full.as_ptr(), 5, 1, &mut n) }, BpkStatus::Ok);
    assert_eq!(n, 0);
    assert_eq!(unsafe { bpk_reset_attack(BpkProfile::Tiny, weak.as_ptr(), 5, 1, &mut n) }, BpkStatus::Ok);
    assert_eq!(n, 5);
    let junk = CString::new("nope").unwrap();
    assert_eq!(unsafe { bpk_reset_attack(BpkProfile::Tiny, junk.as_ptr(), 5, 1, &mut n) }, BpkStatus::InvalidArgument);
    assert_eq!(unsafe { bpk_reset_attack(BpkProfile::ToyBarak, full.as_ptr(), 5, 1, &mut n) }, BpkStatus::InvalidArgument);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bpk_rzk.h")).unwrap();
    for f in [
        "bpk_status_message",
        "bpk_owf_eval",
        "bpk_world_new",
        "bpk_world_free",
        "bpk_world_start",
        "bpk_world_deliver",
        "bpk_world_run_to_end",
        "bpk_world_snap",
        "bpk_world_reset",
        "bpk_world_prefixes_unique",
        "bpk_world_log",
        "bpk_reset_attack",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct BpkWorld BpkWorld;"));
}

/// The header compiles as C when a C compiler is around.
#[test]
fn header_is_valid_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"bpk_rzk.h\"\nint main(void) { BpkWorld *w = 0; uint64_t y; \
         return bpk_owf_eval(23, 11, 2, 3, &y) == BPK_STATUS_OK && w == 0 ? 0 : 1; }\n",
    )
    .unwrap();
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I", inc]).arg(&src).status() {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler; skipped"),
    }
}

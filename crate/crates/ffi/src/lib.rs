//! C ABI over the `bpk-rzk` harness.
//!
//! Every entry point returns a [`BpkStatus`]; results come back through out
//! pointers. Handles are opaque and must be released with their `_free`
//! function. Panics are caught at the boundary and reported as
//! `BPK_INTERNAL`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bpk_rzk::bpk::{Params, ProverVariant, SubPath};
use bpk_rzk::harness::attacks::reset_attack;
use bpk_rzk::harness::{HarnessError, Verdict, World};
use bpk_rzk::primitives::{owf_eval, GroupParams};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpkStatus {
    Ok = 0,
    /// The verifier rejected or the prover halted.
    Reject = 1,
    NullPointer = 2,
    InvalidArgument = 3,
    /// Out-of-order delivery, unknown session or snapshot.
    Protocol = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpkProfile {
    Tiny = 0,
    Small = 1,
    /// Tiny group with the Barak sub-protocol.
    ToyBarak = 2,
}

/// Session state after a delivery.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpkVerdict {
    Pending = 0,
    Accept = 1,
    Reject = 2,
    Halt = 3,
}

/// Opaque: one verifier key, one prover tape, any number of sessions.
pub struct BpkWorld {
    inner: World,
}

fn guard(f: impl FnOnce() -> BpkStatus) -> BpkStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(BpkStatus::Internal)
}

fn status(e: HarnessError) -> BpkStatus {
    match e {
        HarnessError::Bpk(_) | HarnessError::Rszk(_) | HarnessError::Schedule(_) | HarnessError::Snapshot(_) => {
            BpkStatus::Protocol
        }
    }
}

fn params(profile: BpkProfile, t: u32) -> Result<Params, BpkStatus> {
    let mut p = match profile {
        BpkProfile::Tiny => Params::tiny(),
        BpkProfile::Small => Params::small(),
        BpkProfile::ToyBarak => Params { path: SubPath::B, ..Params::tiny() },
    };
    p.t = t as usize;
    p.check().map_err(|_| BpkStatus::InvalidArgument)?;
    Ok(p)
}

fn verdict(v: Option<&Verdict>) -> BpkVerdict {
    match v {
        None => BpkVerdict::Pending,
        Some(Verdict::Accept) => BpkVerdict::Accept,
        Some(Verdict::Reject(_)) => BpkVerdict::Reject,
        Some(Verdict::Halt(_)) => BpkVerdict::Halt,
    }
}

unsafe fn world<'a>(w: *mut BpkWorld) -> Result<&'a mut World, BpkStatus> {
    w.as_mut().map(|w| &mut w.inner).ok_or(BpkStatus::NullPointer)
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, BpkStatus> {
    if s.is_null() {
        return Err(BpkStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| BpkStatus::InvalidArgument)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bpk_status_message(s: BpkStatus) -> *const c_char {
    let m: &'static [u8] = match s {
        BpkStatus::Ok => b"ok\0",
        BpkStatus::Reject => b"rejected\0",
        BpkStatus::NullPointer => b"null pointer\0",
        BpkStatus::InvalidArgument => b"invalid argument\0",
        BpkStatus::Protocol => b"protocol or schedule error\0",
        BpkStatus::BufferTooSmall => b"buffer too small\0",
        BpkStatus::Internal => b"internal error\0",
    };
    m.as_ptr().cast()
}

/// `g^x mod p` in the group `(p, q, g)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bpk_owf_eval(p: u64, q: u64, g: u64, x: u64, out: *mut u64) -> BpkStatus {
    guard(|| {
        let out = tri!(out.as_mut().ok_or(BpkStatus::NullPointer));
        let group = tri!(GroupParams::from_parts(p, q, g).map_err(|_| BpkStatus::InvalidArgument));
        let y = tri!(owf_eval(&group, x).map_err(|_| BpkStatus::InvalidArgument));
        *out = y.value();
        BpkStatus::Ok
    })
}

/// Registers a verifier key and a statement pool, all derived from `seed`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_new(profile: BpkProfile, t: u32, seed: u64, out: *mut *mut BpkWorld) -> BpkStatus {
    guard(|| {
        if out.is_null() {
            return BpkStatus::NullPointer;
        }
        let p = tri!(params(profile, t));
        let inner = tri!(World::new(p, seed).map_err(status));
        *out = Box::into_raw(Box::new(BpkWorld { inner }));
        BpkStatus::Ok
    })
}

/// # Safety
/// `w` must come from `bpk_world_new` and not be used afterwards. Null is
/// accepted.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_free(w: *mut BpkWorld) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Starts an honest session on pool statement `index`.
///
/// # Safety
/// `w` must be a live handle; `out_sid` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_start(w: *mut BpkWorld, index: u32, out_sid: *mut u32) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let out = tri!(out_sid.as_mut().ok_or(BpkStatus::NullPointer));
        let x = w.statement(index as usize).0;
        *out = tri!(w.start(x).map_err(status)) as u32;
        BpkStatus::Ok
    })
}

/// Delivers the message in flight for `sid`.
///
/// # Safety
/// `w` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_deliver(w: *mut BpkWorld, sid: u32, out: *mut BpkVerdict) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let out = tri!(out.as_mut().ok_or(BpkStatus::NullPointer));
        let v = tri!(w.deliver(sid as usize).map_err(status));
        *out = verdict(v.as_ref());
        BpkStatus::Ok
    })
}

/// Delivers until `sid` has a verdict. Returns `BPK_REJECT` unless it
/// accepted.
///
/// # Safety
/// `w` must be a live handle; `out` may be null.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_run_to_end(w: *mut BpkWorld, sid: u32, out: *mut BpkVerdict) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        if sid as usize >= w.num_sessions() {
            return BpkStatus::Protocol;
        }
        let v = tri!(w.run_to_end(sid as usize).map_err(status));
        if let Some(out) = out.as_mut() {
            *out = verdict(Some(&v));
        }
        if v.accepted() {
            BpkStatus::Ok
        } else {
            BpkStatus::Reject
        }
    })
}

/// # Safety
/// `w` must be a live handle; `id` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_snap(w: *mut BpkWorld, sid: u32, id: *const c_char) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let id = tri!(text(id));
        if sid as usize >= w.num_sessions() {
            return BpkStatus::Protocol;
        }
        tri!(w.snap(sid as usize, id).map_err(status));
        BpkStatus::Ok
    })
}

/// Restores both parties of `sid` to snapshot `id`.
///
/// # Safety
/// `w` must be a live handle; `id` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_reset(w: *mut BpkWorld, sid: u32, id: *const c_char) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let id = tri!(text(id));
        if sid as usize >= w.num_sessions() {
            return BpkStatus::Protocol;
        }
        tri!(w.reset(sid as usize, id).map_err(status));
        BpkStatus::Ok
    })
}

/// Whether every prover input prefix so far got exactly one answer.
///
/// # Safety
/// `w` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_prefixes_unique(w: *mut BpkWorld, out: *mut bool) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let out = tri!(out.as_mut().ok_or(BpkStatus::NullPointer));
        *out = w.prefixes_unique();
        BpkStatus::Ok
    })
}

/// Copies the transcript log, NUL-terminated, into `buf`. `needed`
/// receives the size including the terminator; call with `len = 0` to
/// query it.
///
/// # Safety
/// `w` must be a live handle; `buf` valid for `len` bytes (may be null when
/// `len` is 0); `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn bpk_world_log(w: *mut BpkWorld, buf: *mut c_char, len: usize, needed: *mut usize) -> BpkStatus {
    guard(|| {
        let w = tri!(world(w));
        let log = w.log_text();
        let n = log.len() + 1;
        if let Some(needed) = needed.as_mut() {
            *needed = n;
        }
        if len < n {
            return BpkStatus::BufferTooSmall;
        }
        if buf.is_null() {
            return BpkStatus::NullPointer;
        }
        std::ptr::copy_nonoverlapping(log.as_ptr(), buf.cast::<u8>(), log.len());
        *buf.add(log.len()) = 0;
        BpkStatus::Ok
    })
}

/// Runs the reset attack against a prover variant (`"full"`, `"no-prf"`,
/// `"no-subproof"`, `"no-prf-no-subproof"`); path A profiles only.
///
/// # Safety
/// `variant` must be a NUL-terminated string; `out_successes` valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn bpk_reset_attack(
    profile: BpkProfile,
    variant: *const c_char,
    trials: u32,
    seed: u64,
    out_successes: *mut u32,
) -> BpkStatus {
    guard(|| {
        let out = tri!(out_successes.as_mut().ok_or(BpkStatus::NullPointer));
        let v = tri!(ProverVariant::parse(tri!(text(variant))).ok_or(BpkStatus::InvalidArgument));
        let p = tri!(params(profile, 8));
        if p.path != SubPath::A {
            return BpkStatus::InvalidArgument;
        }
        let r = tri!(reset_attack(p, v, trials as usize, seed).map_err(status));
        *out = r.successes as u32;
        BpkStatus::Ok
    })
}

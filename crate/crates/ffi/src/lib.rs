//! C ABI over the `brt` library. Every function returns a [`BrtStatus`];
//! results come back through out-pointers. Models and tallies are opaque
//! handles owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use brt::event::parse_event_file;
use brt::oracle::{exact_score_probability, exact_tsf, OutcomeModel};
use brt::state::replay_game;
use brt::stats::{compute_brt, decide, BrtValue, CountingMode, Decision, Selector, Stratum, TallyTable};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    EmptyCell = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrtDecision {
    Aggressive = 0,
    Conventional = 1,
    Indifferent = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrtCountingMode {
    Including = 0,
    Excluding = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrtStratum {
    All = 0,
    HighLeverage = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BrtThreshold {
    pub brt: f64,
    pub clamped: bool,
}

/// Pooled counts for the T, S and F classes of one threshold.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BrtRates {
    pub t_numerator: u64,
    pub t_denominator: u64,
    pub s_numerator: u64,
    pub s_denominator: u64,
    pub f_numerator: u64,
    pub f_denominator: u64,
}

pub struct BrtModel(OutcomeModel);

pub struct BrtTally(TallyTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: BrtStatus, msg: impl Into<String>) -> BrtStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> BrtStatus) -> BrtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(BrtStatus::Panic, "internal panic"))
}

unsafe fn text_arg<'a>(p: *const c_char) -> Result<&'a str, BrtStatus> {
    if p.is_null() {
        return Err(fail(BrtStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(BrtStatus::InvalidArgument, "string is not UTF-8"))
}

fn probability(x: f64, name: &str) -> Result<f64, BrtStatus> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(fail(BrtStatus::InvalidArgument, format!("{name}={x} outside [0,1]")))
    }
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn brt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn brt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be NULL or point to writable memory for one `BrtThreshold`.
#[no_mangle]
pub unsafe extern "C" fn brt_compute(t: f64, s: f64, f: f64, out: *mut BrtThreshold) -> BrtStatus {
    guard(|| {
        if out.is_null() {
            return fail(BrtStatus::NullPointer, "null out pointer");
        }
        let (t, s, f) = match (probability(t, "t"), probability(s, "s"), probability(f, "f")) {
            (Ok(t), Ok(s), Ok(f)) => (t, s, f),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return e,
        };
        let v = compute_brt(t, s, f);
        *out = BrtThreshold { brt: v.brt, clamped: v.clamped };
        BrtStatus::Ok
    })
}

/// # Safety
/// `out` must be NULL or point to writable memory for one `BrtDecision`.
#[no_mangle]
pub unsafe extern "C" fn brt_decide(p: f64, brt: f64, out: *mut BrtDecision) -> BrtStatus {
    guard(|| {
        if out.is_null() {
            return fail(BrtStatus::NullPointer, "null out pointer");
        }
        let (p, brt) = match (probability(p, "p"), probability(brt, "brt")) {
            (Ok(p), Ok(b)) => (p, b),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        let v = BrtValue { t: f64::NAN, s: f64::NAN, f: f64::NAN, brt, clamped: false, sample_sizes: None };
        *out = match decide(p, &v) {
            Decision::Aggressive => BrtDecision::Aggressive,
            Decision::Conventional => BrtDecision::Conventional,
            Decision::Indifferent => BrtDecision::Indifferent,
        };
        BrtStatus::Ok
    })
}

/// Parses a `key=value` outcome model. An empty string gives the built-in
/// model.
///
/// # Safety
/// `text` must be NULL or a NUL-terminated string; `out` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn brt_model_parse(text: *const c_char, out: *mut *mut BrtModel) -> BrtStatus {
    guard(|| {
        if out.is_null() {
            return fail(BrtStatus::NullPointer, "null out pointer");
        }
        let text = match text_arg(text) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let model = if text.trim().is_empty() { Ok(OutcomeModel::default()) } else { OutcomeModel::parse(text) };
        match model {
            Ok(m) => {
                *out = Box::into_raw(Box::new(BrtModel(m)));
                BrtStatus::Ok
            }
            Err(e) => fail(BrtStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`brt_model_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn brt_model_free(model: *mut BrtModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Exact probabilities of scoring from third only, second only (both with
/// `outs` outs) and first only with `outs + 1` outs.
///
/// # Safety
/// `model` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn brt_exact_tsf(
    model: *const BrtModel,
    outs: u8,
    t: *mut f64,
    s: *mut f64,
    f: *mut f64,
) -> BrtStatus {
    guard(|| {
        if model.is_null() || t.is_null() || s.is_null() || f.is_null() {
            return fail(BrtStatus::NullPointer, "null argument");
        }
        match exact_tsf(&(*model).0, outs) {
            Ok((a, b, c)) => {
                (*t, *s, *f) = (a, b, c);
                BrtStatus::Ok
            }
            Err(e) => fail(BrtStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Probability that at least one run scores from base mask `bases` (bit 0
/// first, bit 2 third) with `outs` outs.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn brt_exact_score_probability(
    model: *const BrtModel,
    bases: u8,
    outs: u8,
    out: *mut f64,
) -> BrtStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(BrtStatus::NullPointer, "null argument");
        }
        match exact_score_probability(&(*model).0, bases, outs) {
            Ok(p) => {
                *out = p;
                BrtStatus::Ok
            }
            Err(e) => fail(BrtStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[no_mangle]
pub extern "C" fn brt_tally_new() -> *mut BrtTally {
    Box::into_raw(Box::new(BrtTally(TallyTable::new())))
}

/// # Safety
/// `tally` must be NULL or a handle from [`brt_tally_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn brt_tally_free(tally: *mut BrtTally) {
    if !tally.is_null() {
        drop(Box::from_raw(tally));
    }
}

/// Parses the contents of an event file and adds its games to `tally`.
/// The number of games read is written to `games` when it is not NULL.
/// Games or half-innings that fail to parse are skipped.
///
/// # Safety
/// `tally` must be a live handle, `text` a NUL-terminated string, and
/// `games` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn brt_tally_ingest_text(
    tally: *mut BrtTally,
    text: *const c_char,
    mode: BrtCountingMode,
    games: *mut usize,
) -> BrtStatus {
    guard(|| {
        if tally.is_null() {
            return fail(BrtStatus::NullPointer, "null tally");
        }
        let text = match text_arg(text) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let mode = match mode {
            BrtCountingMode::Including => CountingMode::IncludingPlay,
            BrtCountingMode::Excluding => CountingMode::ExcludingPlay,
        };
        let assembled = parse_event_file(text);
        let table = &mut (*tally).0;
        for game in &assembled.games {
            for timeline in replay_game(game) {
                table.record_timeline(&timeline, mode);
            }
        }
        if !games.is_null() {
            *games = assembled.games.len();
        }
        BrtStatus::Ok
    })
}

/// Adds every count in `src` into `dst`.
///
/// # Safety
/// Both must be live, distinct handles.
#[no_mangle]
pub unsafe extern "C" fn brt_tally_merge(dst: *mut BrtTally, src: *const BrtTally) -> BrtStatus {
    guard(|| {
        if dst.is_null() || src.is_null() {
            return fail(BrtStatus::NullPointer, "null tally");
        }
        if ptr::eq(dst, src) {
            return fail(BrtStatus::InvalidArgument, "cannot merge a tally into itself");
        }
        (*dst).0.merge_from(&(*src).0);
        BrtStatus::Ok
    })
}

/// Pooled counts for the `outs`-out threshold, over all pitchers when
/// `pitcher_id` is NULL. Counts are written even when `EmptyCell` is
/// returned.
///
/// # Safety
/// `tally` must be a live handle, `pitcher_id` NULL or a NUL-terminated
/// string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn brt_tally_rates(
    tally: *const BrtTally,
    outs: u8,
    stratum: BrtStratum,
    pitcher_id: *const c_char,
    out: *mut BrtRates,
) -> BrtStatus {
    guard(|| {
        if tally.is_null() || out.is_null() {
            return fail(BrtStatus::NullPointer, "null argument");
        }
        if outs > 1 {
            return fail(BrtStatus::InvalidArgument, format!("outs must be 0 or 1, not {outs}"));
        }
        let stratum = match stratum {
            BrtStratum::All => Stratum::All,
            BrtStratum::HighLeverage => Stratum::HighLeverage,
        };
        let selector = if pitcher_id.is_null() {
            Selector::aggregate(outs, stratum)
        } else {
            match text_arg(pitcher_id) {
                Ok(p) => Selector::for_pitchers(outs, stratum, [p]),
                Err(e) => return e,
            }
        };
        let r = brt::stats::rates(&(*tally).0, &selector);
        *out = BrtRates {
            t_numerator: r.t.numerator,
            t_denominator: r.t.denominator,
            s_numerator: r.s.numerator,
            s_denominator: r.s.denominator,
            f_numerator: r.f.numerator,
            f_denominator: r.f.denominator,
        };
        if r.has_empty_cell() {
            return fail(BrtStatus::EmptyCell, "at least one class has no observations");
        }
        BrtStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message() -> String {
        unsafe { CStr::from_ptr(brt_last_error_message()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn panics_become_status() {
        let hook = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let status = guard(|| panic!("boom"));
        std::panic::set_hook(hook);
        assert_eq!(status, BrtStatus::Panic);
        assert_eq!(message(), "internal panic");
    }

    #[test]
    fn error_messages_drop_nul_bytes() {
        assert_eq!(fail(BrtStatus::InvalidArgument, "a\0b"), BrtStatus::InvalidArgument);
        assert_eq!(message(), "a b");
    }

    #[test]
    fn string_arguments() {
        assert_eq!(unsafe { text_arg(ptr::null()) }, Err(BrtStatus::NullPointer));
        let bad = [0xffu8, 0];
        assert_eq!(unsafe { text_arg(bad.as_ptr().cast()) }, Err(BrtStatus::InvalidArgument));
        let good = CString::new("ok").unwrap();
        assert_eq!(unsafe { text_arg(good.as_ptr()) }, Ok("ok"));
    }

    #[test]
    fn probability_bounds() {
        assert_eq!(probability(0.0, "p"), Ok(0.0));
        assert_eq!(probability(1.0, "p"), Ok(1.0));
        assert_eq!(probability(1.0 + 1e-12, "p"), Err(BrtStatus::InvalidArgument));
        assert!(message().starts_with("p="));
        assert!(probability(f64::NAN, "p").is_err());
    }
}

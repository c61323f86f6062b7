//! C interface to the commitgap solver.
//!
//! Games live behind an opaque [`CgGame`] handle. Every fallible function
//! returns a [`CgStatus`]; on failure [`cg_last_error`] describes the
//! problem. Strings handed out by the library are NUL-terminated UTF-8 and
//! must be released with [`cg_string_free`]. Results are exact: rationals
//! are returned as `"p/q"` text and reports as JSON.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use commitgap::diagnostics::{diagnose, DiagnoseOptions};
use commitgap::equilibrium::{best_equilibrium_bounded, full_support_count, gap_report, SearchMode};
use commitgap::rational::{format_rational, parse_rational};
use commitgap::report::{emit_report, Report};
use commitgap::scenarios::build_example2;
use commitgap::{load_game, save_game, solve_commitment, Game};

/// Opaque game handle.
pub struct CgGame {
    game: Game,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InternalInvariant = 3,
    BudgetExceeded = 4,
    Panic = 5,
}

/// Equilibrium search mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgMode {
    Auto = 0,
    Full = 1,
    Pure = 2,
}

impl From<CgMode> for SearchMode {
    fn from(mode: CgMode) -> Self {
        match mode {
            CgMode::Auto => SearchMode::Auto,
            CgMode::Full => SearchMode::Full,
            CgMode::Pure => SearchMode::Pure,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(CgStatus, String);

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CgStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside commitgap");
            CgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CgStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl ToString) -> Failure {
    Failure(CgStatus::InvalidInput, message.to_string())
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let text = CString::new(text).map_err(|_| Failure(CgStatus::InternalInvariant, "NUL in output".into()))?;
    *out = text.into_raw();
    Ok(())
}

/// # Safety
/// `game` must be null or a live handle from this library.
unsafe fn game_ref<'a>(game: *const CgGame) -> Result<&'a Game, Failure> {
    game.as_ref().map(|g| &g.game).ok_or_else(|| null("game"))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_game(out: *mut *mut CgGame, game: Game) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(CgGame { game }));
    Ok(())
}

/// Parses and validates a game file. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_game_from_json(json: *const c_char, out: *mut *mut CgGame) -> CgStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let game = load_game(text).map_err(invalid)?;
        write_game(out, game)
    })
}

/// Builds the two-type evidence game for rational `epsilon` and prior `mu`
/// given as `"p/q"` text.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_example2(epsilon: *const c_char, mu: *const c_char, out: *mut *mut CgGame) -> CgStatus {
    guard(|| {
        let epsilon = parse_rational(read_str(epsilon, "epsilon")?).map_err(invalid)?;
        let mu = parse_rational(read_str(mu, "mu")?).map_err(invalid)?;
        let game = build_example2(&epsilon, &mu).map_err(invalid)?;
        write_game(out, game)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `game` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_game_free(game: *mut CgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Serializes the game back to the file format.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_game_to_json(game: *const CgGame, out: *mut *mut c_char) -> CgStatus {
    guard(|| {
        let game = game_ref(game)?;
        write_string(out, save_game(game))
    })
}

/// Commitment value as exact `"p/q"` text.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_commitment_value(game: *const CgGame, out: *mut *mut c_char) -> CgStatus {
    guard(|| {
        let game = game_ref(game)?;
        write_string(out, format_rational(&solve_commitment(game).v_star))
    })
}

fn check_budget(game: &Game, mode: SearchMode, budget: u64, allow_incomplete: bool) -> Result<(), Failure> {
    let count = full_support_count(game);
    if mode != SearchMode::Pure && count > u128::from(budget) && !allow_incomplete {
        return Err(Failure(
            CgStatus::BudgetExceeded,
            format!("full equilibrium search needs {count} support profiles, budget is {budget}"),
        ));
    }
    Ok(())
}

/// Gap report as JSON. Returns `CG_STATUS_BUDGET_EXCEEDED` when a full
/// search would exceed `budget` support profiles and `allow_incomplete` is
/// false.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_commitment_gap(
    game: *const CgGame,
    mode: CgMode,
    budget: u64,
    allow_incomplete: bool,
    out: *mut *mut c_char,
) -> CgStatus {
    guard(|| {
        let game = game_ref(game)?;
        let mode = SearchMode::from(mode);
        check_budget(game, mode, budget, allow_incomplete)?;
        let commitment = solve_commitment(game);
        let equilibrium = best_equilibrium_bounded(game, mode, u128::from(budget), &commitment.v_star)
            .map_err(|e| Failure(CgStatus::BudgetExceeded, e.to_string()))?;
        let report = gap_report(commitment, equilibrium);
        write_string(out, emit_report(&Report::from_gap(game, &report)))
    })
}

/// Full diagnostics report as JSON, using the default radii. Returns
/// `CG_STATUS_INTERNAL_INVARIANT` (with the report still written) if the
/// computed results contradict each other.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_diagnose(
    game: *const CgGame,
    samples: u32,
    seed: u64,
    mode: CgMode,
    budget: u64,
    allow_incomplete: bool,
    out: *mut *mut c_char,
) -> CgStatus {
    guard(|| {
        let game = game_ref(game)?;
        let mode = SearchMode::from(mode);
        check_budget(game, mode, budget, allow_incomplete)?;
        let options = DiagnoseOptions {
            samples: samples as usize,
            seed,
            mode,
            budget: u128::from(budget),
            ..DiagnoseOptions::default()
        };
        let report = diagnose(game, &options).map_err(|e| Failure(CgStatus::BudgetExceeded, e.to_string()))?;
        write_string(out, emit_report(&Report::from_diagnostics(game, &report)))?;
        if report.implication_violations.is_empty() {
            Ok(())
        } else {
            Err(Failure(CgStatus::InternalInvariant, report.implication_violations.join("; ")))
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Message for the last failed call on this thread, or `""`. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

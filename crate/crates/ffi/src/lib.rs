//! C ABI over `diacell`.
//!
//! Tables and cells are opaque heap handles created by `dc_*_new`/`load`
//! and released with the matching `dc_*_free`. Every fallible call returns
//! a [`DcStatus`]; on failure the message is available from
//! [`dc_last_error_message`] on the same thread. Missing values in output
//! structs are NaN.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use diacell::calibration::{default_table, load_table, save_table, CalibrationTable};
use diacell::cantilever::{natural_frequency, CantileverSpec};
use diacell::cell::{
    ideal_current, median_of_trials, run_cycle, to_current, CellConfig, CellMode, CellReading, ChannelReading,
    ChannelStatus, TransmitterSpec,
};
use diacell::shell::{solve_vertex_height, DiaphragmSpec};
use diacell::signal::{FrequencyEstimator, OptoSignalModel, SampleWindow};
use diacell::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpec = 2,
    OutOfDomain = 3,
    OutOfRange = 4,
    NumericOverflow = 5,
    NoVibration = 6,
    WindowNotFull = 7,
    MonotonicityViolation = 8,
    ParseError = 9,
    InvariantViolation = 10,
    AllTrialsFailed = 11,
    ConfigError = 12,
    IoError = 13,
    InvalidArgument = 14,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcMode {
    Single = 1,
    Dual = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcChannelStatus {
    Ok = 0,
    NoVibration = 1,
    OutOfRange = 2,
    Unsupported = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcTableRow {
    pub pressure_pa: f64,
    pub length_m: f64,
    pub frequency_hz: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcChannelReading {
    pub applied_pa: f64,
    pub frequency_hz: f64,
    pub pressure_pa: f64,
    pub status: DcChannelStatus,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcReading {
    pub cycle_index: u64,
    pub mode: DcMode,
    pub ch1: DcChannelReading,
    pub ch2: DcChannelReading,
    pub p_avg_pa: f64,
    pub p_diff_pa: f64,
    /// Average channel current, 100..200 Pa onto 4..20 mA, 8-bit DAC.
    pub i_avg_ma: f64,
    /// Differential channel current, -50..50 Pa onto 4..20 mA, 8-bit DAC.
    pub i_diff_ma: f64,
}

/// Opaque calibration table.
pub struct DcTable {
    inner: CalibrationTable,
}

/// Opaque simulated cell.
pub struct DcCell {
    cfg: CellConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(err: &Error) -> DcStatus {
    match err {
        Error::InvalidSpec { .. } => DcStatus::InvalidSpec,
        Error::OutOfDomain { .. } => DcStatus::OutOfDomain,
        Error::OutOfRange { .. } => DcStatus::OutOfRange,
        Error::NumericOverflow(_) => DcStatus::NumericOverflow,
        Error::NoVibration { .. } => DcStatus::NoVibration,
        Error::WindowNotFull { .. } => DcStatus::WindowNotFull,
        Error::MonotonicityViolation { .. } => DcStatus::MonotonicityViolation,
        Error::Parse { .. } => DcStatus::ParseError,
        Error::InvariantViolation { .. } => DcStatus::InvariantViolation,
        Error::AllTrialsFailed(_) => DcStatus::AllTrialsFailed,
        Error::Config { .. } => DcStatus::ConfigError,
        Error::Io { .. } => DcStatus::IoError,
    }
}

/// Runs `f`, records any error or panic, and converts it to a status.
fn guard(f: impl FnOnce() -> Result<(), (DcStatus, String)>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside diacell");
            DcStatus::Panic
        }
    }
}

fn lift<T>(r: diacell::Result<T>) -> Result<T, (DcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (DcStatus, String) {
    (DcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (DcStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees `out` points to writable storage for T.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn path_arg(path: *const c_char) -> Result<String, (DcStatus, String)> {
    if path.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(path) };
    s.to_str()
        .map(str::to_owned)
        .map_err(|_| (DcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn dc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// Calibration tables
// ---------------------------------------------------------------------------

/// The built-in six-knot table. Never null.
#[no_mangle]
pub extern "C" fn dc_table_default() -> *mut DcTable {
    Box::into_raw(Box::new(DcTable { inner: default_table() }))
}

/// Loads a table CSV into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_table_load(path: *const c_char, out: *mut *mut DcTable) -> DcStatus {
    guard(|| {
        let path = unsafe { path_arg(path)? };
        let table = lift(load_table(path))?;
        unsafe { write_out(out, Box::into_raw(Box::new(DcTable { inner: table }))) }
    })
}

/// # Safety
/// `table` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dc_table_save(table: *const DcTable, path: *const c_char) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_ref() }.ok_or_else(null)?;
        let path = unsafe { path_arg(path)? };
        lift(save_table(&table.inner, path))
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dc_table_free(table: *mut DcTable) {
    if !table.is_null() {
        // SAFETY: pointer came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Number of knots, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn dc_table_len(table: *const DcTable) -> usize {
    unsafe { table.as_ref() }.map_or(0, |t| t.inner.len())
}

/// # Safety
/// `table` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_table_row(table: *const DcTable, index: usize, out: *mut DcTableRow) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_ref() }.ok_or_else(null)?;
        let row = table
            .inner
            .rows()
            .get(index)
            .ok_or((DcStatus::InvalidArgument, format!("row {index} out of bounds")))?;
        unsafe {
            write_out(
                out,
                DcTableRow {
                    pressure_pa: row.pressure,
                    length_m: row.length,
                    frequency_hz: row.frequency,
                },
            )
        }
    })
}

/// Enables or disables saturation at the table ends.
///
/// # Safety
/// `table` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dc_table_set_clamp(table: *mut DcTable, clamp: bool) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_mut() }.ok_or_else(null)?;
        table.inner = table.inner.clone().with_clamp(clamp);
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_table_frequency_from_pressure(
    table: *const DcTable,
    pressure_pa: f64,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_ref() }.ok_or_else(null)?;
        let f = lift(table.inner.frequency_from_pressure(pressure_pa))?;
        unsafe { write_out(out, f) }
    })
}

/// # Safety
/// `table` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_table_pressure_from_frequency(
    table: *const DcTable,
    frequency_hz: f64,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_ref() }.ok_or_else(null)?;
        let p = lift(table.inner.pressure_from_frequency(frequency_hz))?;
        unsafe { write_out(out, p) }
    })
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

fn cell_config(table: CalibrationTable, mode: DcMode, seed: u64, noise_sigma: f64) -> CellConfig {
    let model = |seed| OptoSignalModel {
        noise_sigma,
        seed,
        ..OptoSignalModel::default()
    };
    CellConfig {
        table,
        channels: [model(seed), model(seed.wrapping_add(1))],
        mode: match mode {
            DcMode::Single => CellMode::Single,
            DcMode::Dual => CellMode::Dual,
        },
        ..CellConfig::default()
    }
}

/// A cell with default acquisition settings and the built-in table.
/// Channel 2 uses seed `seed + 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_cell_new(mode: DcMode, seed: u64, noise_sigma: f64, out: *mut *mut DcCell) -> DcStatus {
    guard(|| {
        let cfg = cell_config(default_table(), mode, seed, noise_sigma);
        lift(cfg.validate())?;
        unsafe { write_out(out, Box::into_raw(Box::new(DcCell { cfg }))) }
    })
}

/// Like [`dc_cell_new`] but with a copy of `table`.
///
/// # Safety
/// `table` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_cell_new_with_table(
    table: *const DcTable,
    mode: DcMode,
    seed: u64,
    noise_sigma: f64,
    out: *mut *mut DcCell,
) -> DcStatus {
    guard(|| {
        let table = unsafe { table.as_ref() }.ok_or_else(null)?;
        let cfg = cell_config(table.inner.clone(), mode, seed, noise_sigma);
        lift(cfg.validate())?;
        unsafe { write_out(out, Box::into_raw(Box::new(DcCell { cfg }))) }
    })
}

/// # Safety
/// `cell` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dc_cell_free(cell: *mut DcCell) {
    if !cell.is_null() {
        // SAFETY: pointer came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(cell) });
    }
}

fn channel_out(ch: &ChannelReading) -> DcChannelReading {
    DcChannelReading {
        applied_pa: ch.applied.unwrap_or(f64::NAN),
        frequency_hz: ch.frequency.unwrap_or(f64::NAN),
        pressure_pa: ch.pressure.unwrap_or(f64::NAN),
        status: match ch.status {
            ChannelStatus::Ok => DcChannelStatus::Ok,
            ChannelStatus::NoVibration => DcChannelStatus::NoVibration,
            ChannelStatus::OutOfRange => DcChannelStatus::OutOfRange,
            ChannelStatus::Unsupported => DcChannelStatus::Unsupported,
        },
    }
}

fn reading_out(r: &CellReading) -> DcReading {
    let (tx_avg, tx_diff) = (TransmitterSpec::average(), TransmitterSpec::differential());
    DcReading {
        cycle_index: r.cycle_index,
        mode: match r.mode {
            CellMode::Single => DcMode::Single,
            CellMode::Dual => DcMode::Dual,
        },
        ch1: channel_out(&r.channels[0]),
        ch2: channel_out(&r.channels[1]),
        p_avg_pa: r.p_avg.unwrap_or(f64::NAN),
        p_diff_pa: r.p_diff.unwrap_or(f64::NAN),
        i_avg_ma: r.p_avg.map_or(f64::NAN, |p| to_current(p, &tx_avg)),
        i_diff_ma: r.p_diff.map_or(f64::NAN, |p| to_current(p, &tx_diff)),
    }
}

/// One measurement cycle. Per-channel failures show up in the channel
/// status, not the return code.
///
/// # Safety
/// `cell` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_cell_run_cycle(
    cell: *const DcCell,
    p1_pa: f64,
    p2_pa: f64,
    cycle_index: u64,
    out: *mut DcReading,
) -> DcStatus {
    guard(|| {
        let cell = unsafe { cell.as_ref() }.ok_or_else(null)?;
        let reading = lift(run_cycle(&cell.cfg, p1_pa, p2_pa, cycle_index))?;
        unsafe { write_out(out, reading_out(&reading)) }
    })
}

/// Median of `trials` cycles (odd).
///
/// # Safety
/// `cell` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_cell_median_of_trials(
    cell: *const DcCell,
    p1_pa: f64,
    p2_pa: f64,
    trials: usize,
    cycle_index: u64,
    out: *mut DcReading,
) -> DcStatus {
    guard(|| {
        let cell = unsafe { cell.as_ref() }.ok_or_else(null)?;
        let reading = lift(median_of_trials(&cell.cfg, p1_pa, p2_pa, trials, cycle_index))?;
        unsafe { write_out(out, reading_out(&reading)) }
    })
}

// ---------------------------------------------------------------------------
// Stateless helpers
// ---------------------------------------------------------------------------

/// Fundamental frequency of `len` ADC codes sampled at `rate_hz`.
///
/// # Safety
/// `codes` must point to `len` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_estimate_frequency(codes: *const u16, len: usize, rate_hz: f64, out: *mut f64) -> DcStatus {
    guard(|| {
        if codes.is_null() {
            return Err(null());
        }
        if len < 4 || !(rate_hz > 0.0) {
            return Err((
                DcStatus::InvalidArgument,
                "need at least 4 codes and rate_hz > 0".into(),
            ));
        }
        // SAFETY: caller guarantees `len` readable codes.
        let codes = unsafe { std::slice::from_raw_parts(codes, len) };
        let mut window = SampleWindow::new(len, rate_hz);
        codes.iter().for_each(|&c| window.isr_store(c));
        let f = lift(FrequencyEstimator::new(len).estimate(&window))?;
        unsafe { write_out(out, f) }
    })
}

/// Pressure-induced vertex deflection of a shell diaphragm (m).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_shell_vertex_drift(
    radius_m: f64,
    thickness_m: f64,
    height_m: f64,
    youngs_modulus_pa: f64,
    poisson: f64,
    pressure_pa: f64,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let spec = DiaphragmSpec {
            ra: radius_m,
            h: thickness_m,
            f0: height_m,
            youngs_modulus: youngs_modulus_pa,
            nu: poisson,
        };
        let sol = lift(solve_vertex_height(&spec, pressure_pa))?;
        unsafe { write_out(out, sol.f) }
    })
}

/// First-mode frequency of a strip cantilever (Hz).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_cantilever_frequency(
    modulus_pa: f64,
    width_m: f64,
    thickness_m: f64,
    strip_length_m: f64,
    density_kg_m3: f64,
    free_length_m: f64,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let spec = CantileverSpec {
            modulus: modulus_pa,
            width: width_m,
            thickness: thickness_m,
            length: strip_length_m,
            density: density_kg_m3,
        };
        let f = lift(natural_frequency(&spec, free_length_m))?;
        unsafe { write_out(out, f) }
    })
}

/// Transmitter current for `pressure_pa` mapped from `[p_lo, p_hi]` onto
/// 4–20 mA. `quantized` selects the DAC output over the ideal value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_to_current(
    pressure_pa: f64,
    p_lo: f64,
    p_hi: f64,
    dac_bits: u8,
    quantized: bool,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let tx = TransmitterSpec {
            dac_bits,
            ..TransmitterSpec::with_range(p_lo, p_hi)
        };
        lift(tx.validate())?;
        let i = if quantized {
            to_current(pressure_pa, &tx)
        } else {
            ideal_current(pressure_pa, &tx)
        };
        unsafe { write_out(out, i) }
    })
}

//! 3D complex FFT over cubes, built on rustfft with a global plan cache.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, dir == FftDirection::Forward);
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, dir))
        .clone()
}

/// In-place 3D FFT of an `n^3` cube stored x-fastest. Scratch buffers are
/// reused per thread.
pub fn fft3(data: &mut [Complex64], n: usize, dir: FftDirection) {
    assert_eq!(data.len(), n * n * n);
    let fft = plan(n, dir);

    thread_local! {
        static SCRATCH: std::cell::RefCell<(Vec<Complex64>, Vec<Complex64>)> =
            const { std::cell::RefCell::new((Vec::new(), Vec::new())) };
    }
    SCRATCH.with(|cell| {
        let (scratch, fft_scratch) = &mut *cell.borrow_mut();
        scratch.resize(data.len(), Complex64::default());
        fft_scratch.resize(fft.get_inplace_scratch_len(), Complex64::default());

        // Axis 0: lines are contiguous; process the cube in chunks of n.
        fft.process_with_scratch(data, fft_scratch);

        // Axes 1 and 2: transpose the target axis into contiguous
        // position, process, transpose back.
        transpose_xy(data, scratch, n);
        fft.process_with_scratch(scratch, fft_scratch);
        transpose_xy(scratch, data, n);

        transpose_xz(data, scratch, n);
        fft.process_with_scratch(scratch, fft_scratch);
        transpose_xz(scratch, data, n);
    });
}

fn transpose_xy(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for l in 0..n {
        let base = n * n * l;
        for j in 0..n {
            for i in 0..n {
                dst[base + j + n * i] = src[base + i + n * j];
            }
        }
    }
}

fn transpose_xz(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for l in 0..n {
        for j in 0..n {
            let row = n * (j + n * l);
            for i in 0..n {
                dst[l + n * (j + n * i)] = src[i + row];
            }
        }
    }
}

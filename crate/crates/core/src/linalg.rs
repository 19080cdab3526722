//! Real-basis products on interleaved complex row blocks.

use num_complex::Complex64;

/// `out (n x k) = rows (n x m) * basis (m x k)` with a real, row-major `basis`.
pub(crate) fn project(rows: &[Complex64], n: usize, m: usize, basis: &[f64], k: usize, out: &mut [Complex64]) {
    assert_eq!(rows.len(), n * m);
    assert_eq!(basis.len(), m * k);
    assert_eq!(out.len(), n * k);
    for part in 0..2 {
        // SAFETY: bounds are asserted above; strides address the re/im lanes of
        // the interleaved complex buffers, and `out` does not alias the inputs.
        unsafe {
            matrixmultiply::dgemm(
                n,
                m,
                k,
                1.0,
                (rows.as_ptr() as *const f64).add(part),
                2 * m as isize,
                2,
                basis.as_ptr(),
                k as isize,
                1,
                0.0,
                (out.as_mut_ptr() as *mut f64).add(part),
                2 * k as isize,
                2,
            );
        }
    }
}

/// `out (n x m) = coeffs (n x k) * basis^T`, with `basis` the same row-major
/// `m x k` table used by [`project`].
pub(crate) fn expand(coeffs: &[Complex64], n: usize, k: usize, basis: &[f64], m: usize, out: &mut [Complex64]) {
    assert_eq!(coeffs.len(), n * k);
    assert_eq!(basis.len(), m * k);
    assert_eq!(out.len(), n * m);
    for part in 0..2 {
        // SAFETY: as in `project`; `basis` is read transposed through its strides.
        unsafe {
            matrixmultiply::dgemm(
                n,
                k,
                m,
                1.0,
                (coeffs.as_ptr() as *const f64).add(part),
                2 * k as isize,
                2,
                basis.as_ptr(),
                1,
                k as isize,
                0.0,
                (out.as_mut_ptr() as *mut f64).add(part),
                2 * m as isize,
                2,
            );
        }
    }
}

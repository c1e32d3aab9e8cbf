//! Dense kernels. Each output row is produced by one closure call with a
//! fixed summation order, so results do not depend on the thread count.

use crate::par;

use super::Scalar;

/// `[m, n] · [n, p] -> [m, p]`
pub fn matmul<T: Scalar>(a: &[T], b: &[T], m: usize, n: usize, p: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), n * p);
    let mut out = vec![T::zero(); m * p];
    par::for_each_row(&mut out, p, |i, row| {
        let a_row = &a[i * n..(i + 1) * n];
        for (k, &aik) in a_row.iter().enumerate() {
            if aik == T::zero() {
                continue;
            }
            let b_row = &b[k * p..(k + 1) * p];
            for (o, &bkj) in row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    });
    out
}

/// `[m, p] · [n, p]ᵀ -> [m, n]`
pub fn matmul_bt<T: Scalar>(a: &[T], b: &[T], m: usize, p: usize, n: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), m * p);
    debug_assert_eq!(b.len(), n * p);
    let mut out = vec![T::zero(); m * n];
    par::for_each_row(&mut out, n, |i, row| {
        let a_row = &a[i * p..(i + 1) * p];
        for (j, o) in row.iter_mut().enumerate() {
            *o = dot(a_row, &b[j * p..(j + 1) * p]);
        }
    });
    out
}

/// `[m, n]ᵀ · [m, p] -> [n, p]`
pub fn matmul_at<T: Scalar>(a: &[T], b: &[T], m: usize, n: usize, p: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), m * p);
    let mut out = vec![T::zero(); n * p];
    par::for_each_row(&mut out, p, |k, row| {
        for i in 0..m {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for (o, &bij) in row.iter_mut().zip(&b[i * p..(i + 1) * p]) {
                *o += aik * bij;
            }
        }
    });
    out
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

//! Dense Hermitian eigenvalues.
//!
//! Householder reduction to a real symmetric tridiagonal matrix followed by
//! the implicit QL iteration. Only eigenvalues are computed.

use num_complex::Complex;

use crate::{Error, Real, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues of the Hermitian matrix stored row-major in `a`, ascending.
/// Both triangles must be filled. Takes the real path when every
/// imaginary part is exactly zero.
pub fn hermitian_eigenvalues<T: Real>(n: usize, a: &[Complex<T>]) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::invalid(format!("expected {} entries, got {}", n * n, a.len())));
    }
    if a.iter().all(|z| z.im == T::zero()) {
        let re: Vec<T> = a.iter().map(|z| z.re).collect();
        return symmetric_eigenvalues(n, &re);
    }
    let mut m = a.to_vec();
    let (d, e) = tridiagonalize_hermitian(n, &mut m);
    tridiagonal_eigenvalues(d, e)
}

/// Eigenvalues of a real symmetric matrix (row-major, full storage), ascending.
pub fn symmetric_eigenvalues<T: Real>(n: usize, a: &[T]) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::invalid(format!("expected {} entries, got {}", n * n, a.len())));
    }
    let mut m = a.to_vec();
    let (d, e) = tridiagonalize_symmetric(n, &mut m);
    tridiagonal_eigenvalues(d, e)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`; `e.len() + 1 == d.len()`).
pub fn tridiagonal_eigenvalues<T: Real>(mut d: Vec<T>, off: Vec<T>) -> Result<Vec<T>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    if off.len() + 1 != n {
        return Err(Error::invalid("off-diagonal must have n - 1 entries"));
    }
    let mut e = off;
    e.push(T::zero());
    let two = T::of(2.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::SearchFailure("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Reduces `a` in place; returns the diagonal and the off-diagonal moduli.
fn tridiagonalize_symmetric<T: Real>(n: usize, a: &mut [T]) -> (Vec<T>, Vec<T>) {
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let alpha = (lo..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<T>().sqrt();
        if alpha == T::zero() {
            off.push(T::zero());
            continue;
        }
        let x0 = a[lo * n + k];
        let sign = if x0 >= T::zero() { T::one() } else { -T::one() };
        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] += sign * alpha;
        let vnorm2: T = (lo..n).map(|i| v[i] * v[i]).sum();
        off.push(alpha);
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = T::of(2.0) / vnorm2;
        for i in lo..n {
            let row = &a[i * n..(i + 1) * n];
            let mut acc = T::zero();
            for j in lo..n {
                acc += row[j] * v[j];
            }
            w[i] = tau * acc;
        }
        let vw: T = (lo..n).map(|i| v[i] * w[i]).sum();
        let half = T::of(0.5) * tau * vw;
        for i in lo..n {
            w[i] -= half * v[i];
        }
        for i in lo..n {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in lo..n {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
    }
    let d = (0..n).map(|i| a[i * n + i]).collect();
    (d, off)
}

fn tridiagonalize_hermitian<T: Real>(n: usize, a: &mut [Complex<T>]) -> (Vec<T>, Vec<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let alpha = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            off.push(T::zero());
            continue;
        }
        let x0 = a[lo * n + k];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] += phase * alpha;
        let vnorm2: T = (lo..n).map(|i| v[i].norm_sqr()).sum();
        off.push(alpha);
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = T::of(2.0) / vnorm2;
        for i in lo..n {
            let row = &a[i * n..(i + 1) * n];
            let mut acc = zero;
            for j in lo..n {
                acc += row[j] * v[j];
            }
            w[i] = acc * tau;
        }
        let vw: Complex<T> = (lo..n).map(|i| v[i].conj() * w[i]).sum();
        let half = vw * (T::of(0.5) * tau);
        for i in lo..n {
            w[i] -= half * v[i];
        }
        for i in lo..n {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in lo..n {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    (d, off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, real: bool) -> Vec<Complex<f64>> {
        let mut a = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let re = rng.gen_range(-1.0..1.0);
                let im = if real || i == j { 0.0 } else { rng.gen_range(-1.0..1.0) };
                a[i * n + j] = Complex::new(re, im);
                a[j * n + i] = Complex::new(re, -im);
            }
        }
        a
    }

    fn oracle(n: usize, a: &[Complex<f64>]) -> Vec<f64> {
        let m = DMatrix::from_row_slice(n, n, a);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn matches_nalgebra_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 3, 4, 7, 16, 33, 64] {
            for real in [true, false] {
                let a = random_hermitian(&mut rng, n, real);
                let ours = hermitian_eigenvalues(n, &a).unwrap();
                for (x, y) in ours.iter().zip(oracle(n, &a)) {
                    assert_abs_diff_eq!(*x, y, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn known_spectra() {
        let pauli_y = [
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ];
        let ev = hermitian_eigenvalues(2, &pauli_y).unwrap();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-15);

        let diag = [3.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 5.0];
        assert_eq!(symmetric_eigenvalues(3, &diag).unwrap(), vec![-2.0, 3.0, 5.0]);

        // Path graph P_4: 2 cos(kπ/5).
        let ev = tridiagonal_eigenvalues(vec![0.0; 4], vec![1.0; 3]).unwrap();
        let mut want: Vec<f64> = (1..=4).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / 5.0).cos()).collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in ev.iter().zip(want) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn degenerate_and_zero_matrices() {
        let n = 8;
        let zero = vec![Complex::new(0.0, 0.0); n * n];
        assert!(hermitian_eigenvalues(n, &zero).unwrap().iter().all(|&x| x == 0.0));
        let ones = vec![Complex::new(1.0, 0.0); n * n];
        let ev = hermitian_eigenvalues(n, &ones).unwrap();
        assert_abs_diff_eq!(ev[n - 1], n as f64, epsilon = 1e-12);
        assert!(ev[..n - 1].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn single_precision() {
        let a = [2.0f32, 1.0, 1.0, 2.0];
        let ev = symmetric_eigenvalues(2, &a).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-6 && (ev[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(symmetric_eigenvalues(3, &[1.0; 4]).is_err());
    }

    proptest! {
        #[test]
        fn trace_and_frobenius_are_preserved(seed in any::<u64>(), n in 1usize..24) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(&mut rng, n, seed % 2 == 0);
            let ev = hermitian_eigenvalues(n, &a).unwrap();
            let trace: f64 = (0..n).map(|i| a[i * n + i].re).sum();
            let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
            prop_assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-9);
        }
    }
}

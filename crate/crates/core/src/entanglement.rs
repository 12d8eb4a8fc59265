//! Dense density matrices, negativity and PPT-based lifetime bounds for
//! logical GHZ states.
//!
//! Qubit `q` is bit `q` of a computational basis index.

use num_complex::Complex;

use crate::codes::StabilizerCode;
use crate::effective::derive_effective;
use crate::linalg::hermitian_eigenvalues;
use crate::pauli::{Pauli, PauliChannel, PauliString};
use crate::{Error, Real, Result};

/// Largest state [`DensityMatrix::ghz`] builds.
pub const DENSE_STATE_CAP: usize = 14;

/// Largest GHZ size accepted by [`lifetime_pcrit`].
pub const LIFETIME_CAP: usize = 10;

/// Points of the monotonicity pre-scan in [`lifetime_pcrit`].
const LIFETIME_GRID: usize = 32;

const MAX_BISECTIONS: usize = 200;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `i^k`.
fn i_power<T: Real>(k: u32) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Amplitude `ω` with `P|b⟩ = ω(b)|b ⊕ x⟩`.
#[inline]
fn pauli_amplitude<T: Real>(p: &PauliString, b: usize) -> Complex<T> {
    let b = b as u64;
    let k = p.phase().exponent() as u32
        + (p.x_mask() & p.z_mask()).count_ones()
        + 2 * (b & p.z_mask()).count_ones();
    i_power(k)
}

/// `P v` for a state vector on `P.len()` qubits.
pub fn apply_pauli_to_vector<T: Real>(p: &PauliString, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let x = p.x_mask() as usize;
    let mut out = vec![czero(); v.len()];
    for (b, amp) in v.iter().enumerate() {
        out[b ^ x] = pauli_amplitude::<T>(p, b) * *amp;
    }
    out
}

/// Dense density operator on `n` qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n > 2 * DENSE_STATE_CAP {
            return Err(Error::resource(format!("{n} qubits is too large for a dense matrix")));
        }
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "{n} qubits need {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DensityMatrix { n, data })
    }

    /// `|ψ⟩⟨ψ|` for a state vector whose length is a power of two.
    pub fn from_pure(psi: &[Complex<T>]) -> Result<Self> {
        let dim = psi.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!("state length {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        let mut data = vec![czero(); dim * dim];
        for (r, a) in psi.iter().enumerate() {
            for (c, b) in psi.iter().enumerate() {
                data[r * dim + c] = *a * b.conj();
            }
        }
        Self::new(n, data)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("GHZ state needs at least 2 qubits, got {n}")));
        }
        if n > DENSE_STATE_CAP {
            return Err(Error::resource(format!(
                "dense GHZ states are limited to {DENSE_STATE_CAP} qubits, got {n}"
            )));
        }
        let dim = 1usize << n;
        let half = Complex::new(T::of(0.5), T::zero());
        let mut data = vec![czero(); dim * dim];
        let last = dim - 1;
        for (r, c) in [(0, 0), (0, last), (last, 0), (last, last)] {
            data[r * dim + c] = half;
        }
        Ok(DensityMatrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim() + c]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        let dim = self.dim();
        let mut acc = T::zero();
        for r in 0..dim {
            for c in 0..dim {
                acc += (self.entry(r, c) * self.entry(c, r)).re;
            }
        }
        acc
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> T {
        let dim = self.dim();
        let mut worst = T::zero();
        for r in 0..dim {
            for c in 0..=r {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (the matrix is assumed Hermitian).
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(self.dim(), &self.data)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }

    /// `⟨u|ρ|v⟩`.
    pub fn sandwich(&self, u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
        let dim = self.dim();
        let mut acc = czero();
        for r in 0..dim {
            if u[r] == czero() {
                continue;
            }
            let row = &self.data[r * dim..(r + 1) * dim];
            let inner: Complex<T> = row.iter().zip(v).map(|(a, b)| *a * *b).sum();
            acc += u[r].conj() * inner;
        }
        acc
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::invalid(format!(
                "Pauli string on {} qubits applied to a {}-qubit state",
                p.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `P ρ`.
    pub fn pauli_left(&self, p: &PauliString) -> Result<Self> {
        self.check_pauli(p)?;
        let dim = self.dim();
        let x = p.x_mask() as usize;
        let mut data = vec![czero(); dim * dim];
        for r in 0..dim {
            let src = r ^ x;
            let w = pauli_amplitude::<T>(p, src);
            for c in 0..dim {
                data[r * dim + c] = w * self.data[src * dim + c];
            }
        }
        Ok(DensityMatrix { n: self.n, data })
    }

    /// `ρ P`.
    pub fn pauli_right(&self, p: &PauliString) -> Result<Self> {
        self.check_pauli(p)?;
        let dim = self.dim();
        let x = p.x_mask() as usize;
        let amps: Vec<Complex<T>> = (0..dim).map(|c| pauli_amplitude(p, c)).collect();
        let mut data = vec![czero(); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = self.data[r * dim + (c ^ x)] * amps[c];
            }
        }
        Ok(DensityMatrix { n: self.n, data })
    }

    /// `P ρ P†`.
    pub fn conjugate_by(&self, p: &PauliString) -> Result<Self> {
        self.check_pauli(p)?;
        let dim = self.dim();
        let x = p.x_mask() as usize;
        let amps: Vec<Complex<T>> = (0..dim).map(|b| pauli_amplitude(p, b ^ x)).collect();
        let mut data = vec![czero(); dim * dim];
        for r in 0..dim {
            let sr = r ^ x;
            for c in 0..dim {
                data[r * dim + c] = amps[r] * self.data[sr * dim + (c ^ x)] * amps[c].conj();
            }
        }
        Ok(DensityMatrix { n: self.n, data })
    }

    /// `Π ρ Π` with `Π = (1 + sign·g)/2` for a Hermitian Pauli `g`; not renormalized.
    pub fn project_pauli(&self, g: &PauliString, sign: T) -> Result<Self> {
        if !g.is_hermitian() {
            return Err(Error::invalid(format!("{g} is not Hermitian")));
        }
        let left = self.pauli_left(g)?;
        let right = self.pauli_right(g)?;
        let both = left.pauli_right(g)?;
        let quarter = T::of(0.25);
        let data = (0..self.data.len())
            .map(|i| (self.data[i] + (left.data[i] + right.data[i]) * sign + both.data[i]) * quarter)
            .collect();
        Ok(DensityMatrix { n: self.n, data })
    }

    /// `Σ_j λ_j σ_j ρ σ_j` on one qubit.
    pub fn apply_channel(&self, channel: &PauliChannel<T>, qubit: usize) -> Result<Self> {
        if qubit >= self.n {
            return Err(Error::invalid(format!("qubit {qubit} out of range for {} qubits", self.n)));
        }
        let mut acc = self.data.iter().map(|v| *v * channel.lambda(Pauli::I)).collect::<Vec<_>>();
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let l = channel.lambda(p);
            if l == T::zero() {
                continue;
            }
            let conj = self.conjugate_by(&PauliString::single(self.n, qubit, p)?)?;
            for (a, v) in acc.iter_mut().zip(&conj.data) {
                *a += *v * l;
            }
        }
        Ok(DensityMatrix { n: self.n, data: acc })
    }

    pub fn apply_channel_all(&self, channel: &PauliChannel<T>) -> Result<Self> {
        (0..self.n).try_fold(self.clone(), |rho, q| rho.apply_channel(channel, q))
    }

    /// Partial transpose on the qubits set in `mask`.
    pub fn partial_transpose(&self, mask: u64) -> Result<Self> {
        let dim = self.dim();
        let s = mask as usize;
        if s >= dim {
            return Err(Error::invalid(format!("mask {mask:#b} exceeds {} qubits", self.n)));
        }
        let mut data = vec![czero(); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let r2 = (r & !s) | (c & s);
                let c2 = (c & !s) | (r & s);
                data[r * dim + c] = self.data[r2 * dim + c2];
            }
        }
        Ok(DensityMatrix { n: self.n, data })
    }

    /// Sum of the magnitudes of the negative eigenvalues of the partial
    /// transpose on `partition`.
    pub fn negativity(&self, partition: &[usize]) -> Result<T> {
        let mut mask = 0u64;
        for &q in partition {
            if q >= self.n {
                return Err(Error::invalid(format!("qubit {q} out of range")));
            }
            mask |= 1 << q;
        }
        if mask == 0 || mask.count_ones() as usize == self.n {
            return Err(Error::invalid("partition must be a nonempty proper subset"));
        }
        let ev = self.partial_transpose(mask)?.eigenvalues()?;
        Ok(ev.iter().filter(|&&x| x < T::zero()).map(|x| -*x).sum())
    }

    /// Projects `qubit` onto the `±1` eigenvector of `basis` and removes it.
    /// Returns the outcome probability and the renormalized remaining state.
    pub fn measure_qubit(&self, qubit: usize, basis: Pauli, plus: bool) -> Result<(T, Self)> {
        if qubit >= self.n || self.n < 2 {
            return Err(Error::invalid(format!("cannot measure qubit {qubit} of {}", self.n)));
        }
        let v = eigenvector::<T>(basis, plus)?;
        let dim = self.dim();
        let small = dim / 2;
        let low = (1usize << qubit) - 1;
        let insert = |i: usize, bit: usize| ((i & !low) << 1) | (bit << qubit) | (i & low);
        let mut data = vec![czero(); small * small];
        for r in 0..small {
            for c in 0..small {
                let mut acc = czero();
                for a in 0..2 {
                    for b in 0..2 {
                        acc += v[a].conj() * self.data[insert(r, a) * dim + insert(c, b)] * v[b];
                    }
                }
                data[r * small + c] = acc;
            }
        }
        let prob = (0..small).map(|i| data[i * small + i].re).sum::<T>();
        if prob <= T::zero() {
            return Err(Error::invalid("measurement outcome has zero probability"));
        }
        let data = data.into_iter().map(|z| z / prob).collect();
        Ok((prob, DensityMatrix { n: self.n - 1, data }))
    }
}

fn eigenvector<T: Real>(basis: Pauli, plus: bool) -> Result<[Complex<T>; 2]> {
    let r = T::of(0.5).sqrt();
    let s = if plus { T::one() } else { -T::one() };
    Ok(match basis {
        Pauli::Z if plus => [Complex::new(T::one(), T::zero()), czero()],
        Pauli::Z => [czero(), Complex::new(T::one(), T::zero())],
        Pauli::X => [Complex::new(r, T::zero()), Complex::new(s * r, T::zero())],
        Pauli::Y => [Complex::new(r, T::zero()), Complex::new(T::zero(), s * r)],
        Pauli::I => return Err(Error::invalid("cannot measure in the identity basis")),
    })
}

#[derive(Clone, Copy)]
struct SignedLog<T> {
    sign: i8,
    ln: T,
}

impl<T: Real> SignedLog<T> {
    fn of(x: T) -> Self {
        if x == T::zero() {
            SignedLog { sign: 0, ln: T::neg_infinity() }
        } else {
            SignedLog {
                sign: if x > T::zero() { 1 } else { -1 },
                ln: x.abs().ln(),
            }
        }
    }

    fn powi(self, k: usize) -> Self {
        if k == 0 {
            return SignedLog { sign: 1, ln: T::zero() };
        }
        if self.sign == 0 {
            return self;
        }
        SignedLog {
            sign: if self.sign < 0 && k % 2 == 1 { -1 } else { 1 },
            ln: self.ln * T::of_usize(k),
        }
    }

    fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return SignedLog { sign: 0, ln: T::neg_infinity() };
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln: self.ln + other.ln,
        }
    }

    fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln >= other.ln { (self, other) } else { (other, self) };
        let ratio = (small.ln - big.ln).exp();
        if big.sign == small.sign {
            SignedLog {
                sign: big.sign,
                ln: big.ln + ratio.ln_1p(),
            }
        } else if ratio == T::one() {
            SignedLog { sign: 0, ln: T::neg_infinity() }
        } else {
            SignedLog {
                sign: big.sign,
                ln: big.ln + (-ratio).ln_1p(),
            }
        }
    }
}

/// Negativity of the 1 : N−1 split of `E^{⊗N}(|GHZ⟩⟨GHZ|)`.
///
/// The noisy GHZ state only has entries at `(y, y)` and `(y, ȳ)`, depending
/// on the Hamming weight `w` of `y`:
/// `D(w) = ½(α^{N−w}β^w + α^wβ^{N−w})`, `C(w) = ½(γ^{N−w}δ^w + γ^wδ^{N−w})`
/// with `α = λ0+λ3`, `β = λ1+λ2`, `γ = λ0−λ3`, `δ = λ1−λ2`. The partial
/// transpose splits into 2×2 blocks with eigenvalues `D(k) ± |C(k+1)|`, so
/// the negativity is `Σ_k binom(N−1, k) max(0, |C(k+1)| − D(k))`.
/// Evaluated in log space, so `N` in the thousands is fine.
pub fn ghz_negativity_fast<T: Real>(n: usize, channel: &PauliChannel<T>) -> Result<T> {
    if n < 2 {
        return Err(Error::invalid(format!("GHZ negativity needs N >= 2, got {n}")));
    }
    let [l0, l1, l2, l3] = channel.lambdas();
    let alpha = SignedLog::of(l0 + l3);
    let beta = SignedLog::of(l1 + l2);
    let gamma = SignedLog::of(l0 - l3);
    let delta = SignedLog::of(l1 - l2);
    let half = SignedLog::of(T::of(0.5));
    let pair = |u: SignedLog<T>, v: SignedLog<T>, w: usize| {
        half.mul(u.powi(n - w).mul(v.powi(w)).add(u.powi(w).mul(v.powi(n - w))))
    };
    let mut ln_fact = vec![T::zero(); n];
    for k in 1..n {
        ln_fact[k] = ln_fact[k - 1] + T::of_usize(k).ln();
    }
    let mut total = T::zero();
    for k in 0..n {
        let d = pair(alpha, beta, k);
        let c = pair(gamma, delta, k + 1);
        if c.sign == 0 || (d.sign > 0 && c.ln <= d.ln) {
            continue;
        }
        let ln_binom = ln_fact[n - 1] - ln_fact[k] - ln_fact[n - 1 - k];
        let gap = if d.sign == 0 {
            T::one()
        } else {
            -(d.ln - c.ln).exp_m1()
        };
        total += (ln_binom + c.ln).exp() * gap;
    }
    Ok(total)
}

/// Dense counterpart of [`ghz_negativity_fast`].
pub fn ghz_negativity_dense<T: Real>(n: usize, channel: &PauliChannel<T>) -> Result<T> {
    DensityMatrix::ghz(n)?.apply_channel_all(channel)?.negativity(&[0])
}

/// `(N, negativity)` pairs through the fast path.
pub fn negativity_curve<T: Real>(ns: &[usize], channel: &PauliChannel<T>) -> Result<Vec<(usize, T)>> {
    ns.iter().map(|&n| Ok((n, ghz_negativity_fast(n, channel)?))).collect()
}

/// System sizes at which the sign of `a − b` changes, compared with the
/// previous point of nonzero difference. Both curves must share their `N` values.
pub fn curve_crossings<T: Real>(a: &[(usize, T)], b: &[(usize, T)]) -> Result<Vec<usize>> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.0 != y.0) {
        return Err(Error::invalid("curves are sampled at different system sizes"));
    }
    let mut out = Vec::new();
    let mut last = 0i8;
    for (x, y) in a.iter().zip(b) {
        let d = x.1 - y.1;
        let s = if d > T::zero() {
            1
        } else if d < T::zero() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                out.push(x.0);
            }
            last = s;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifetimeFlag {
    Bracketed,
    /// Entangled on the whole grid, `p_crit = 0`.
    EntangledEverywhere,
    /// Never detected as entangled, `p_crit = 1`.
    NeverEntangled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeResult<T> {
    pub p_crit: T,
    pub iterations: usize,
    /// Width of the final bracket.
    pub residual: T,
    pub flag: LifetimeFlag,
}

/// Two-qubit state left by the distillation protocol: `E^{⊗N}` on GHZ(N),
/// then qubits `N−1, …, 2` measured in the X basis keeping outcome `+`.
pub fn distilled_pair<T: Real>(n: usize, channel: &PauliChannel<T>) -> Result<DensityMatrix<T>> {
    if n < 2 {
        return Err(Error::invalid(format!("need N >= 2, got {n}")));
    }
    if n > LIFETIME_CAP {
        return Err(Error::resource(format!(
            "lifetime simulation is limited to N <= {LIFETIME_CAP}, got {n}"
        )));
    }
    let mut rho = DensityMatrix::ghz(n)?;
    for q in (2..n).rev() {
        rho = rho.apply_channel(channel, q)?;
        rho = rho.measure_qubit(q, Pauli::X, true)?.1;
    }
    rho.apply_channel(channel, 0)?.apply_channel(channel, 1)
}

/// Whether the distilled pair has a negative partial-transpose eigenvalue.
pub fn distillable<T: Real>(n: usize, channel: &PauliChannel<T>) -> Result<bool> {
    let pt = distilled_pair(n, channel)?.partial_transpose(1)?;
    Ok(pt.min_eigenvalue()? < -T::zero_tol())
}

/// Smallest `p` at which `family(p)` still yields a distillable pair, by
/// grid pre-scan and bisection to width `tol`.
pub fn lifetime_pcrit<T, F>(family: F, n: usize, tol: T) -> Result<LifetimeResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<PauliChannel<T>>,
{
    if !(tol > T::zero()) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let test = |p: T| -> Result<bool> { distillable(n, &family(p)?) };
    let grid: Vec<T> = (0..=LIFETIME_GRID)
        .map(|k| T::of_usize(k) / T::of_usize(LIFETIME_GRID))
        .collect();
    let signs = grid.iter().map(|&p| test(p)).collect::<Result<Vec<bool>>>()?;
    let first = signs.iter().position(|&s| s);
    let Some(first) = first else {
        return Ok(LifetimeResult {
            p_crit: T::one(),
            iterations: 0,
            residual: T::zero(),
            flag: LifetimeFlag::NeverEntangled,
        });
    };
    if signs[first..].iter().any(|&s| !s) {
        return Err(Error::SearchFailure(
            "entanglement is not monotone in p on the pre-scan grid".into(),
        ));
    }
    if first == 0 {
        return Ok(LifetimeResult {
            p_crit: T::zero(),
            iterations: 0,
            residual: T::zero(),
            flag: LifetimeFlag::EntangledEverywhere,
        });
    }
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == MAX_BISECTIONS {
            return Err(Error::SearchFailure("bisection did not reach the tolerance".into()));
        }
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if test(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(LifetimeResult {
        p_crit: (lo + hi) * T::of(0.5),
        iterations,
        residual: hi - lo,
        flag: LifetimeFlag::Bracketed,
    })
}

/// `p ↦` the trivial-syndrome logical channel of `code` under white noise `p`.
pub fn projected_white_family<T: Real>(code: &StabilizerCode) -> impl Fn(T) -> Result<PauliChannel<T>> + '_ {
    move |p| Ok(derive_effective(code, &PauliChannel::white_noise(p)?)?.projected())
}

/// `p ↦` the mean logical channel of `code` under white noise `p`.
pub fn mean_white_family<T: Real>(code: &StabilizerCode) -> impl Fn(T) -> Result<PauliChannel<T>> + '_ {
    move |p| Ok(derive_effective(code, &PauliChannel::white_noise(p)?)?.mean())
}

/// Physical-level GHZ of `n` logical qubits, block `j` on qubits `jm..(j+1)m`.
pub fn encoded_ghz_vector<T: Real>(code: &StabilizerCode, n: usize) -> Result<Vec<Complex<T>>> {
    let m = code.m();
    if n * m > DENSE_STATE_CAP {
        return Err(Error::resource(format!("{} physical qubits is too many", n * m)));
    }
    let [zero, one] = crate::effective::logical_basis::<T>(code)?;
    let tensor = |v: &[Complex<T>]| {
        (1..n).fold(v.to_vec(), |acc, _| {
            let mut out = Vec::with_capacity(acc.len() * v.len());
            for b in v {
                for a in &acc {
                    out.push(*a * *b);
                }
            }
            out
        })
    };
    let r = T::of(0.5).sqrt();
    Ok(tensor(&zero)
        .iter()
        .zip(tensor(&one))
        .map(|(a, b)| (*a + b) * r)
        .collect())
}

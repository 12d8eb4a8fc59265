//! Effective logical channels.
//!
//! For every syndrome `s` the engine accumulates the probability of all
//! physical Pauli errors with that syndrome, split by the logical class they
//! leave after recovery. Dividing by the syndrome probability gives the
//! per-syndrome logical channel; summing over syndromes gives the mean channel.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::codes::{StabilizerCode, Syndrome};
use crate::entanglement::{apply_pauli_to_vector, DensityMatrix};
use crate::pauli::{check_unit, Pauli, PauliChannel, PauliString};
use crate::{Error, Real, Result};

/// Default largest code size the enumeration engine accepts (`4^12` strings).
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Largest code the dense Choi construction accepts (`2^{m+1}`-dimensional state).
pub const DENSE_CHOI_CAP: usize = 6;

/// Number of leading qubits whose letters index the work chunks.
const PREFIX_QUBITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub max_qubits: usize,
    pub parallel: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            max_qubits: DEFAULT_ENUMERATION_CAP,
            parallel: true,
        }
    }
}

/// Entries of the 4×4 Choi matrix of a projected logical map:
/// `a = M00 = M33`, `b = M11 = M22`, `c = M03`, `d = M12`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChoiCoefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> ChoiCoefficients<T> {
    /// From the unnormalized logical-class weights `(w_I, w_X, w_Y, w_Z)`.
    pub fn from_class_weights(w: [T; 4]) -> Self {
        let half = T::of(0.5);
        ChoiCoefficients {
            a: (w[0] + w[3]) * half,
            b: (w[1] + w[2]) * half,
            c: (w[0] - w[3]) * half,
            d: (w[1] - w[2]) * half,
        }
    }

    /// Inverse of [`Self::from_class_weights`].
    pub fn class_weights(&self) -> [T; 4] {
        [self.a + self.c, self.b + self.d, self.b - self.d, self.a - self.c]
    }

    /// Trace of the Choi matrix, i.e. the syndrome probability `2(a + b)`.
    pub fn probability(&self) -> T {
        T::of(2.0) * (self.a + self.b)
    }

    /// Normalized logical channel, or `None` when `a + b = 0`.
    pub fn channel(&self) -> Option<PauliChannel<T>> {
        let norm = self.probability();
        if norm <= T::zero() {
            return None;
        }
        PauliChannel::new(self.class_weights().map(|w| w / norm)).ok()
    }

    /// Complete positivity of the projected map.
    pub fn is_completely_positive(&self, tol: T) -> bool {
        self.a >= -tol && self.b >= -tol && self.c.abs() <= self.a + tol && self.d.abs() <= self.b + tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|x| x.abs())
        .fold(T::zero(), T::max)
    }
}

/// The logical channel conditioned on one syndrome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeChannel<T> {
    pub syndrome: Syndrome,
    pub probability: T,
    pub channel: PauliChannel<T>,
    /// False when the syndrome has probability zero; `channel` is then the
    /// identity by convention.
    pub reachable: bool,
    /// Unnormalized class weights `(w_I, w_X, w_Y, w_Z)`, summing to `probability`.
    pub weights: [T; 4],
}

impl<T: Real> SyndromeChannel<T> {
    pub fn choi(&self) -> ChoiCoefficients<T> {
        ChoiCoefficients::from_class_weights(self.weights)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel<T> {
    per_syndrome: Vec<SyndromeChannel<T>>,
    mean: PauliChannel<T>,
}

impl<T: Real> EffectiveChannel<T> {
    fn from_weights(buckets: &[[T; 4]]) -> Result<Self> {
        let per_syndrome = buckets
            .iter()
            .enumerate()
            .map(|(s, w)| {
                let probability: T = w.iter().copied().sum();
                let reachable = probability > T::zero();
                let channel = if reachable {
                    PauliChannel::normalized(*w)?
                } else {
                    PauliChannel::identity()
                };
                Ok(SyndromeChannel {
                    syndrome: Syndrome(s as u64),
                    probability,
                    channel,
                    reachable,
                    weights: *w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = [T::zero(); 4];
        for w in buckets {
            for j in 0..4 {
                total[j] += w[j];
            }
        }
        Ok(EffectiveChannel {
            per_syndrome,
            mean: PauliChannel::normalized(total)?,
        })
    }

    /// An unencoded qubit: one syndrome carrying the physical channel.
    pub fn identity_encoding(channel: PauliChannel<T>) -> Self {
        EffectiveChannel {
            per_syndrome: vec![SyndromeChannel {
                syndrome: Syndrome::TRIVIAL,
                probability: T::one(),
                channel,
                reachable: true,
                weights: channel.lambdas(),
            }],
            mean: channel,
        }
    }

    pub fn per_syndrome(&self) -> &[SyndromeChannel<T>] {
        &self.per_syndrome
    }

    pub fn syndrome(&self, s: Syndrome) -> Option<&SyndromeChannel<T>> {
        self.per_syndrome.get(s.index())
    }

    /// Probability-weighted average over syndromes.
    pub fn mean(&self) -> PauliChannel<T> {
        self.mean
    }

    /// The channel conditioned on the trivial syndrome.
    pub fn projected(&self) -> PauliChannel<T> {
        self.per_syndrome[0].channel
    }

    pub fn probability_sum(&self) -> T {
        self.per_syndrome.iter().map(|s| s.probability).sum()
    }

    /// `Σ_s p_s λ^{(s)}`, which agrees with [`Self::mean`] up to rounding.
    pub fn weighted_sum(&self) -> [T; 4] {
        let mut acc = [T::zero(); 4];
        for s in &self.per_syndrome {
            let l = s.channel.lambdas();
            for j in 0..4 {
                acc[j] += s.probability * l[j];
            }
        }
        acc
    }

    /// Syndromes grouped by the weight of their recovery operator. For
    /// repetition and GHZ codes the weight is the number of corrected flips.
    pub fn by_recovery_weight(&self, code: &StabilizerCode) -> BTreeMap<usize, Vec<&SyndromeChannel<T>>> {
        let mut groups: BTreeMap<usize, Vec<&SyndromeChannel<T>>> = BTreeMap::new();
        for (s, r) in self.per_syndrome.iter().zip(code.recovery_table()) {
            groups.entry(r.weight()).or_default().push(s);
        }
        groups
    }
}

/// Enumerates all `4^m` error strings with default options.
pub fn derive_effective<T: Real>(code: &StabilizerCode, channel: &PauliChannel<T>) -> Result<EffectiveChannel<T>> {
    derive_effective_with(code, channel, EnumerationOptions::default())
}

/// Chunks are fixed by the letters on the first qubits and always merged in
/// chunk order, so the result does not depend on the worker count.
pub fn derive_effective_with<T: Real>(
    code: &StabilizerCode,
    channel: &PauliChannel<T>,
    options: EnumerationOptions,
) -> Result<EffectiveChannel<T>> {
    let m = code.m();
    if m > options.max_qubits {
        return Err(Error::resource(format!(
            "enumerating {m} qubits exceeds the cap of {}",
            options.max_qubits
        )));
    }
    let tables = Tables::new(code, channel);
    let prefix = m.min(PREFIX_QUBITS);
    let chunks = 1usize << (2 * prefix);
    let run = |chunk: usize| tables.enumerate_chunk(chunk, prefix);
    let partials: Vec<Vec<T>> = if options.parallel {
        (0..chunks).into_par_iter().map(run).collect()
    } else {
        (0..chunks).map(run).collect()
    };
    let mut acc = vec![T::zero(); tables.buckets()];
    for part in &partials {
        for (a, v) in acc.iter_mut().zip(part) {
            *a += *v;
        }
    }
    let buckets: Vec<[T; 4]> = acc
        .chunks_exact(4)
        .zip(&tables.recovery_class)
        .map(|(w, &rc)| {
            let mut out = [T::zero(); 4];
            for (lin, &v) in w.iter().enumerate() {
                out[pauli_index(lin ^ rc)] += v;
            }
            out
        })
        .collect();
    EffectiveChannel::from_weights(&buckets)
}

/// Per-qubit lookup tables. Logical classes are kept as bit pairs
/// `x | z << 1` so that combining two classes is XOR.
struct Tables<T> {
    m: usize,
    syndrome: Vec<[u64; 4]>,
    class: Vec<[usize; 4]>,
    prob: [T; 4],
    recovery_class: Vec<usize>,
}

fn class_bits(x: bool, z: bool) -> usize {
    x as usize | (z as usize) << 1
}

fn pauli_index(bits: usize) -> usize {
    Pauli::from_bits(bits & 1 == 1, bits & 2 == 2).index()
}

impl<T: Real> Tables<T> {
    fn new(code: &StabilizerCode, channel: &PauliChannel<T>) -> Self {
        let m = code.m();
        let mut syndrome = Vec::with_capacity(m);
        let mut class = Vec::with_capacity(m);
        for q in 0..m {
            let mut s = [0u64; 4];
            let mut c = [0usize; 4];
            for p in Pauli::ALL {
                let e = PauliString::single(m, q, p).expect("qubit in range");
                s[p.index()] = code.syndrome_unchecked(&e).bits();
                let (x, z) = code.logical_bits(&e);
                c[p.index()] = class_bits(x, z);
            }
            syndrome.push(s);
            class.push(c);
        }
        let recovery_class = code
            .recovery_table()
            .iter()
            .map(|r| {
                let (x, z) = code.logical_bits(r);
                class_bits(x, z)
            })
            .collect();
        Tables {
            m,
            syndrome,
            class,
            prob: channel.lambdas(),
            recovery_class,
        }
    }

    fn buckets(&self) -> usize {
        4 * self.recovery_class.len()
    }

    fn enumerate_chunk(&self, chunk: usize, prefix: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.buckets()];
        let mut prob = T::one();
        let mut syn = 0u64;
        let mut cls = 0usize;
        for q in 0..prefix {
            let letter = (chunk >> (2 * (prefix - 1 - q))) & 3;
            prob *= self.prob[letter];
            syn ^= self.syndrome[q][letter];
            cls ^= self.class[q][letter];
        }
        if prob == T::zero() {
            return out;
        }
        self.descend(prefix, prob, syn, cls, &mut out);
        out
    }

    fn descend(&self, q: usize, prob: T, syn: u64, cls: usize, out: &mut [T]) {
        if q == self.m {
            out[4 * syn as usize + cls] += prob;
            return;
        }
        for letter in 0..4 {
            let p = prob * self.prob[letter];
            if p == T::zero() {
                continue;
            }
            self.descend(
                q + 1,
                p,
                syn ^ self.syndrome[q][letter],
                cls ^ self.class[q][letter],
                out,
            );
        }
    }
}

/// Closed form for the repetition code after correcting `i` bit flips.
/// With `α = λ0+λ3`, `β = λ1+λ2`, `γ = λ0−λ3`, `δ = λ1−λ2`:
/// `a = ½α^{m−i}β^i`, `b = ½α^iβ^{m−i}`, `c = ½γ^{m−i}δ^i`, `d = ½γ^iδ^{m−i}`.
pub fn repetition_closed_form<T: Real>(
    m: usize,
    i: usize,
    channel: &PauliChannel<T>,
) -> Result<(ChoiCoefficients<T>, PauliChannel<T>)> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    if i > m / 2 {
        return Err(Error::invalid(format!("i = {i} exceeds floor(m/2) = {}", m / 2)));
    }
    let coeffs = repetition_coefficients(m, i, channel);
    let lam = coeffs
        .channel()
        .ok_or_else(|| Error::invalid("syndrome has zero probability"))?;
    Ok((coeffs, lam))
}

fn repetition_coefficients<T: Real>(m: usize, i: usize, channel: &PauliChannel<T>) -> ChoiCoefficients<T> {
    let [l0, l1, l2, l3] = channel.lambdas();
    let (alpha, beta, gamma, delta) = (l0 + l3, l1 + l2, l0 - l3, l1 - l2);
    let half = T::of(0.5);
    let pw = |x: T, k: usize| x.powi(k as i32);
    ChoiCoefficients {
        a: half * pw(alpha, m - i) * pw(beta, i),
        b: half * pw(alpha, i) * pw(beta, m - i),
        c: half * pw(gamma, m - i) * pw(delta, i),
        d: half * pw(gamma, i) * pw(delta, m - i),
    }
}

/// Mean channel of the repetition code on odd `m`: each count `i ≤ ⌊m/2⌋`
/// occurs for `binom(m, i)` syndromes, each contributing its Choi weights.
pub fn repetition_mean<T: Real>(m: usize, channel: &PauliChannel<T>) -> Result<PauliChannel<T>> {
    if m.is_multiple_of(2) {
        return Err(Error::unsupported(format!("repetition mean needs odd m, got {m}")));
    }
    let mut acc = [T::zero(); 4];
    let mut binom = T::one();
    for i in 0..=m / 2 {
        let w = repetition_coefficients(m, i, channel).class_weights();
        for j in 0..4 {
            acc[j] += binom * w[j];
        }
        binom = binom * T::of_usize(m - i) / T::of_usize(i + 1);
    }
    PauliChannel::new(acc)
}

/// Trivial-syndrome white-noise parameter of the five-qubit cluster ring
/// under white noise `p`, with `x = (1−p)/(1+3p)`.
pub fn cluster_ring_p0<T: Real>(p: T) -> Result<T> {
    check_unit("p", p)?;
    let x = (T::one() - p) / (T::one() + T::of(3.0) * p);
    let (x3, x4, x5) = (x.powi(3), x.powi(4), x.powi(5));
    let num = T::one() - T::of(10.0) * x3 + T::of(15.0) * x4 - T::of(6.0) * x5;
    let den = T::one() + T::of(30.0) * x3 + T::of(15.0) * x4 + T::of(18.0) * x5;
    Ok(num / den)
}

/// Probability of at most one error among five qubits, `p⁵ + 5p⁴(1−p)`.
pub fn p_eff_estimate<T: Real>(p: T) -> Result<T> {
    check_unit("p", p)?;
    Ok(p.powi(5) + T::of(5.0) * p.powi(4) * (T::one() - p))
}

/// A 4×4 complex matrix in the basis `|i_L⟩|j⟩`, index `2i + j`.
pub type ChoiMatrix<T> = [[Complex<T>; 4]; 4];

/// Dense construction of the projected, corrected Choi state for syndrome `s`.
///
/// The logical half of `|Φ+⟩` is encoded, every physical qubit passes
/// through `channel`, the state is projected onto the syndrome subspace and
/// the recovery is applied.
pub fn choi_effective<T: Real>(
    code: &StabilizerCode,
    channel: &PauliChannel<T>,
    s: Syndrome,
) -> Result<(ChoiCoefficients<T>, ChoiMatrix<T>)> {
    let m = code.m();
    if m > DENSE_CHOI_CAP {
        return Err(Error::resource(format!(
            "dense Choi construction is limited to m <= {DENSE_CHOI_CAP}, got {m}"
        )));
    }
    if s.index() >= code.syndrome_count() {
        return Err(Error::invalid(format!("syndrome {} out of range", s.bits())));
    }
    let [zero_l, one_l] = logical_basis(code)?;

    let n = m + 1;
    let dim = 1usize << n;
    let half_dim = 1usize << m;
    let embed = |v: &[Complex<T>], j: usize| -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        out[j * half_dim..(j + 1) * half_dim].copy_from_slice(v);
        out
    };
    let basis = [embed(&zero_l, 0), embed(&zero_l, 1), embed(&one_l, 0), embed(&one_l, 1)];
    let r2 = T::of(0.5).sqrt();
    let phi: Vec<Complex<T>> = basis[0]
        .iter()
        .zip(&basis[3])
        .map(|(a, b)| (*a + *b) * r2)
        .collect();

    let mut rho = DensityMatrix::from_pure(&phi)?;
    for q in 0..m {
        rho = rho.apply_channel(channel, q)?;
    }
    for (a, g) in code.generators().iter().enumerate() {
        let g = extend(g, n)?;
        let sign = if s.bit(a) { -T::one() } else { T::one() };
        rho = rho.project_pauli(&g, sign)?;
    }
    let r = code.recovery(s).expect("syndrome in range");
    rho = rho.conjugate_by(&extend(r, n)?)?;

    let mut mat = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for (k, u) in basis.iter().enumerate() {
        for (l, v) in basis.iter().enumerate() {
            mat[k][l] = rho.sandwich(u, v);
        }
    }
    let coeffs = ChoiCoefficients {
        a: mat[0][0].re,
        b: mat[1][1].re,
        c: mat[0][3].re,
        d: mat[1][2].re,
    };
    Ok((coeffs, mat))
}

/// Largest entry outside the X-shaped pattern `{(0,0),(1,1),(2,2),(3,3),(0,3),(3,0),(1,2),(2,1)}`.
pub fn choi_off_pattern_max<T: Real>(mat: &ChoiMatrix<T>) -> T {
    let mut worst = T::zero();
    for (k, row) in mat.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            if k != l && k + l != 3 {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

/// Largest off-diagonal entry of `M` in the Bell basis
/// `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`.
pub fn bell_basis_offdiagonal_max<T: Real>(mat: &ChoiMatrix<T>) -> T {
    let r = T::of(0.5).sqrt();
    let z = T::zero();
    let bell: [[T; 4]; 4] = [[r, z, z, r], [r, z, z, -r], [z, r, r, z], [z, r, -r, z]];
    let mut worst = T::zero();
    for (k, u) in bell.iter().enumerate() {
        for (l, v) in bell.iter().enumerate() {
            if k == l {
                continue;
            }
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..4 {
                for j in 0..4 {
                    acc += mat[i][j] * (u[i] * v[j]);
                }
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

fn extend(p: &PauliString, n: usize) -> Result<PauliString> {
    PauliString::new(n, p.x_mask(), p.z_mask(), p.phase())
}

/// Dense `|0_L⟩, |1_L⟩`. `|0_L⟩` is the normalized projection of the first
/// computational basis state with nonzero overlap onto the code space and the
/// `+1` eigenspace of logical Z; `|1_L⟩ = X_L|0_L⟩`.
pub fn logical_basis<T: Real>(code: &StabilizerCode) -> Result<[Vec<Complex<T>>; 2]> {
    if code.m() > crate::entanglement::DENSE_STATE_CAP {
        return Err(Error::resource(format!("{} qubits is too many for dense vectors", code.m())));
    }
    let zero = logical_zero(code)?;
    let one = apply_pauli_to_vector(code.logical_x(), &zero);
    Ok([zero, one])
}

fn logical_zero<T: Real>(code: &StabilizerCode) -> Result<Vec<Complex<T>>> {
    let m = code.m();
    let dim = 1usize << m;
    let projectors: Vec<&PauliString> = code
        .generators()
        .iter()
        .chain(std::iter::once(code.logical_z()))
        .collect();
    for b in 0..dim {
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        v[b] = Complex::new(T::one(), T::zero());
        for g in &projectors {
            let gv = apply_pauli_to_vector(g, &v);
            for (x, y) in v.iter_mut().zip(&gv) {
                *x = (*x + *y) * T::of(0.5);
            }
        }
        let norm: T = v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if norm > T::of(1e-3) {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Err(Error::ConstructionFailure(format!("{}: empty code space", code.label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_channel(rng: &mut ChaCha8Rng) -> PauliChannel<f64> {
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.01..1.0));
        PauliChannel::normalized(w).unwrap()
    }

    /// Brute force over all error strings using the public classification API.
    fn brute_force(code: &StabilizerCode, ch: &PauliChannel<f64>) -> Vec<[f64; 4]> {
        let m = code.m();
        let mut buckets = vec![[0.0; 4]; code.syndrome_count()];
        for x in 0..1u64 << m {
            for z in 0..1u64 << m {
                let e = PauliString::new(m, x, z, crate::Phase::ONE).unwrap();
                let s = code.syndrome(&e).unwrap().index();
                let c = code.logical_action(&e).unwrap().index();
                buckets[s][c] += ch.string_probability(&e);
            }
        }
        buckets
    }

    #[test]
    fn engine_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::ghz(5).unwrap(),
            StabilizerCode::cluster_ring(5).unwrap(),
        ] {
            let ch = random_channel(&mut rng);
            let eff = derive_effective(&code, &ch).unwrap();
            for (s, w) in eff.per_syndrome().iter().zip(brute_force(&code, &ch)) {
                for j in 0..4 {
                    assert_abs_diff_eq!(s.weights[j], w[j], epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn trivial_code_returns_the_channel() {
        let ch = PauliChannel::new([0.7, 0.1, 0.05, 0.15]).unwrap();
        let eff = derive_effective(&StabilizerCode::trivial(), &ch).unwrap();
        assert_eq!(eff.per_syndrome().len(), 1);
        assert!(eff.projected().max_abs_diff(&ch) < 1e-15);
        assert!(eff.mean().max_abs_diff(&ch) < 1e-15);
    }

    #[test]
    fn repetition_three_matches_closed_form() {
        let ch = PauliChannel::white_noise(0.9).unwrap();
        let code = StabilizerCode::repetition(3).unwrap();
        let eff = derive_effective(&code, &ch).unwrap();
        let (_, lam) = repetition_closed_form(3, 0, &ch).unwrap();
        assert!(eff.projected().max_abs_diff(&lam) < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let (c, lam) = repetition_closed_form(5, 0, &PauliChannel::phase_noise(0.8).unwrap()).unwrap();
        assert_eq!((c.b, c.d), (0.0, 0.0));
        assert_eq!((lam.lambdas()[1], lam.lambdas()[2]), (0.0, 0.0));

        let p: f64 = 0.9;
        let (c, _) = repetition_closed_form(3, 0, &PauliChannel::white_noise(p).unwrap()).unwrap();
        assert_abs_diff_eq!(c.a, 0.5 * ((1.0 + p) / 2.0).powi(3), epsilon = 1e-15);
        assert_abs_diff_eq!(c.c, 0.5 * p.powi(3), epsilon = 1e-15);

        let (_, lam) = repetition_closed_form(5, 0, &PauliChannel::white_noise(0.99).unwrap()).unwrap();
        assert!((lam.lambdas()[3] - 0.0125f64).abs() / 0.0125 < 0.1);

        assert!(matches!(
            repetition_closed_form(5, 3, &PauliChannel::white_noise(0.9).unwrap()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn every_syndrome_matches_its_error_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [3, 5, 7] {
            let code = StabilizerCode::repetition(m).unwrap();
            let ghz = StabilizerCode::ghz(m).unwrap();
            let ch = random_channel(&mut rng);
            let eff = derive_effective(&code, &ch).unwrap();
            let eff_ghz = derive_effective(&ghz, &ch).unwrap();
            for (i, group) in eff.by_recovery_weight(&code) {
                let (coeffs, lam) = repetition_closed_form(m, i, &ch).unwrap();
                for s in group {
                    assert!(s.channel.max_abs_diff(&lam) < 1e-12);
                    assert!(s.choi().max_abs_diff(&coeffs) < 1e-12);
                    let g = eff_ghz.syndrome(s.syndrome).unwrap();
                    assert!(g.channel.max_abs_diff(&lam.swap_xz()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mean_matches_binomial_sum() {
        for m in [1, 3, 5, 7] {
            for p in [0.0, 0.5, 0.9, 1.0] {
                let ch = PauliChannel::white_noise(p).unwrap();
                let eff = derive_effective(&StabilizerCode::repetition(m).unwrap(), &ch).unwrap();
                let closed = repetition_mean(m, &ch).unwrap();
                assert!(eff.mean().max_abs_diff(&closed) < 1e-12, "m={m} p={p}");
                assert_abs_diff_eq!(closed.lambdas()[1], closed.lambdas()[2], epsilon = 1e-15);
            }
        }
        let noiseless = repetition_mean(5, &PauliChannel::white_noise(1.0).unwrap()).unwrap();
        assert_eq!(noiseless.lambdas(), [1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            repetition_mean(4, &PauliChannel::<f64>::identity()),
            Err(Error::UnsupportedParameter(_))
        ));
    }

    #[test]
    fn probabilities_and_mean_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for code in [StabilizerCode::repetition(7).unwrap(), StabilizerCode::cluster_ring(7).unwrap()] {
            let ch = random_channel(&mut rng);
            let eff = derive_effective(&code, &ch).unwrap();
            assert_abs_diff_eq!(eff.probability_sum(), 1.0, epsilon = 1e-12);
            let ws = eff.weighted_sum();
            for j in 0..4 {
                assert_abs_diff_eq!(ws[j], eff.mean().lambdas()[j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cluster_ring_turns_white_into_white() {
        let code = StabilizerCode::cluster_ring(5).unwrap();
        for p in [0.3, 0.9, 0.95, 0.999] {
            let eff = derive_effective(&code, &PauliChannel::white_noise(p).unwrap()).unwrap();
            for s in eff.per_syndrome() {
                let l = s.channel.lambdas();
                assert_abs_diff_eq!(l[1], l[2], epsilon = 1e-12);
                assert_abs_diff_eq!(l[1], l[3], epsilon = 1e-12);
            }
            if p >= 0.95 {
                let l = eff.projected().lambdas();
                assert!(l[1] < (1.0 - p) / 4.0);
            }
        }
    }

    #[test]
    fn cluster_ring_trivial_syndrome_formula() {
        let code = StabilizerCode::cluster_ring(5).unwrap();
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let eff = derive_effective(&code, &PauliChannel::white_noise(p).unwrap()).unwrap();
            assert_abs_diff_eq!(
                eff.projected().white_parameter(),
                cluster_ring_p0(p).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_eq!(cluster_ring_p0(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(cluster_ring_p0(0.0).unwrap(), 0.0, epsilon = 1e-15);
        let p: f64 = 0.95;
        let e = 1.0 - p;
        assert!((cluster_ring_p0(p).unwrap() - (1.0 - 0.625 * e.powi(3))).abs() <= 5.0 * e.powi(4));
    }

    #[test]
    fn p_eff_examples() {
        assert_eq!(p_eff_estimate(1.0).unwrap(), 1.0);
        assert_eq!(p_eff_estimate(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(p_eff_estimate(0.95).unwrap(), 0.977407, epsilon = 1e-6);
        assert!(p_eff_estimate(1.5).is_err());
    }

    #[test]
    fn repetition_weak_noise_directionality() {
        for m in [3, 5, 7] {
            for p in [0.95, 0.99] {
                let mu = repetition_mean(m, &PauliChannel::white_noise(p).unwrap()).unwrap().lambdas();
                let e = (1.0 - p) / 4.0;
                assert!(mu[3] > e && e > mu[1], "m={m} p={p}");
            }
        }
    }

    #[test]
    fn phase_noise_leaves_unreachable_syndromes() {
        let eff = derive_effective(
            &StabilizerCode::repetition(3).unwrap(),
            &PauliChannel::phase_noise(0.8).unwrap(),
        )
        .unwrap();
        assert!(eff.per_syndrome()[0].reachable);
        for s in &eff.per_syndrome()[1..] {
            assert!(!s.reachable);
            assert_eq!(s.probability, 0.0);
            assert_eq!(s.channel.lambdas(), [1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let code = StabilizerCode::repetition(5).unwrap();
        let opts = EnumerationOptions {
            max_qubits: 3,
            parallel: false,
        };
        assert!(matches!(
            derive_effective_with(&code, &PauliChannel::<f64>::identity(), opts),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random_channel(&mut rng);
        let code = StabilizerCode::cluster_ring(7).unwrap();
        let serial = derive_effective_with(
            &code,
            &ch,
            EnumerationOptions {
                parallel: false,
                ..Default::default()
            },
        )
        .unwrap();
        let parallel = derive_effective(&code, &ch).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn single_precision_engine() {
        let ch = PauliChannel::<f32>::white_noise(0.9).unwrap();
        let eff = derive_effective(&StabilizerCode::repetition(5).unwrap(), &ch).unwrap();
        let closed = repetition_mean(5, &ch).unwrap();
        assert!(eff.mean().max_abs_diff(&closed) < 1e-5);
    }

    #[test]
    fn choi_matches_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::ghz(3).unwrap(),
            StabilizerCode::cluster_ring(5).unwrap(),
        ] {
            for _ in 0..3 {
                let ch = random_channel(&mut rng);
                let eff = derive_effective(&code, &ch).unwrap();
                for s in eff.per_syndrome() {
                    let (c, mat) = choi_effective(&code, &ch, s.syndrome).unwrap();
                    assert!(c.max_abs_diff(&s.choi()) < 1e-10);
                    assert!(c.is_completely_positive(1e-12));
                    assert!(choi_off_pattern_max(&mat) < 1e-12);
                    assert!(bell_basis_offdiagonal_max(&mat) < 1e-12);
                    assert_abs_diff_eq!(mat[0][0].re, mat[3][3].re, epsilon = 1e-12);
                    assert_abs_diff_eq!(mat[1][1].re, mat[2][2].re, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn choi_matches_closed_form_for_repetition() {
        let ch = PauliChannel::new([0.6, 0.2, 0.15, 0.05]).unwrap();
        let (c, _) = choi_effective(&StabilizerCode::repetition(3).unwrap(), &ch, Syndrome(0)).unwrap();
        let (closed, _) = repetition_closed_form(3, 0, &ch).unwrap();
        assert!(c.max_abs_diff(&closed) < 1e-10);
    }

    #[test]
    fn choi_cap_is_enforced() {
        let code = StabilizerCode::repetition(7).unwrap();
        assert!(matches!(
            choi_effective(&code, &PauliChannel::<f64>::identity(), Syndrome(0)),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn class_weights_round_trip() {
        let w = [0.4, 0.1, 0.2, 0.3];
        let c = ChoiCoefficients::from_class_weights(w);
        for (a, b) in c.class_weights().iter().zip(w) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-16);
        }
        assert_abs_diff_eq!(c.probability(), 1.0, epsilon = 1e-16);
    }

    #[test]
    fn class_bits_round_trip() {
        for p in Pauli::ALL {
            let (x, z) = p.bits();
            assert_eq!(pauli_index(class_bits(x, z)), p.index());
        }
    }
}

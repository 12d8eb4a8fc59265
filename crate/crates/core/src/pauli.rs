//! Symplectic Pauli strings and single-qubit Pauli channels.
//!
//! A [`PauliString`] on `m ≤ 64` qubits is stored as two bit masks, one for
//! the X component and one for the Z component, plus a phase `i^k`. Bit `q` of
//! each mask refers to qubit `q`, which is the `q`-th letter of the string form
//! (`"XZI"` has X on qubit 0). The letter `Y` denotes σ_y itself, so the
//! operator represented is `i^k ⊗_q σ_{letter(q)}`.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Real, Result};

/// Largest supported string length (one machine word per mask).
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter, indexed `I = 0, X = 1, Y = 2, Z = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Pauli> {
        Pauli::ALL.get(i).copied()
    }

    /// Letter from its symplectic components.
    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Exchanges the roles of X and Z.
    pub fn swap_xz(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Z,
            Pauli::Z => Pauli::X,
            other => other,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A power of `i`, stored as its exponent mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    #[inline]
    pub fn exponent(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

#[inline]
fn mask_for(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// An `m`-qubit Pauli operator with phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    len: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn new(len: usize, x: u64, z: u64, phase: Phase) -> Result<Self> {
        if len == 0 || len > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "Pauli string length must be in 1..={MAX_QUBITS}, got {len}"
            )));
        }
        let mask = mask_for(len);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::invalid("mask has bits beyond the string length"));
        }
        Ok(PauliString { len, x, z, phase })
    }

    pub fn identity(len: usize) -> Result<Self> {
        Self::new(len, 0, 0, Phase::ONE)
    }

    /// `σ` on `qubit`, identity elsewhere.
    pub fn single(len: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= len {
            return Err(Error::invalid(format!("qubit {qubit} out of range for length {len}")));
        }
        let (x, z) = pauli.bits();
        Self::new(len, (x as u64) << qubit, (z as u64) << qubit, Phase::ONE)
    }

    pub fn x_type(len: usize, mask: u64) -> Result<Self> {
        Self::new(len, mask, 0, Phase::ONE)
    }

    pub fn z_type(len: usize, mask: u64) -> Result<Self> {
        Self::new(len, 0, mask, Phase::ONE)
    }

    pub fn from_paulis(letters: &[Pauli]) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (q, p) in letters.iter().enumerate().take(MAX_QUBITS) {
            let (px, pz) = p.bits();
            x |= (px as u64) << q;
            z |= (pz as u64) << q;
        }
        Self::new(letters.len(), x, z, Phase::ONE)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    #[inline]
    pub fn letter(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(|q| self.letter(q))
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// True when the non-phase part is the identity.
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Hermitian iff the phase is ±1.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Same letters, ignoring phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.len == other.len && self.x == other.x && self.z == other.z
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::invalid(format!(
                "length mismatch: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        // Letter pairs whose product picks up +i (XY, YZ, ZX) and -i (YX, ZY, XZ).
        let plus = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
        let minus = (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2) | (x1 & !z1 & !x2 & z2);
        let k = self.phase.0 as i64 + other.phase.0 as i64 + plus.count_ones() as i64
            - minus.count_ones() as i64;
        PauliString {
            len: self.len,
            x: x1 ^ x2,
            z: z1 ^ z2,
            phase: Phase::from_exponent(k),
        }
    }

    /// Whether `self` and `other` commute (symplectic product zero).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// The symplectic vector `x | z << 64`, used for GF(2) rank computations.
    pub(crate) fn symplectic(&self) -> u128 {
        self.x as u128 | ((self.z as u128) << 64)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for p in self.letters() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses letter notation with an optional phase prefix:
    /// `"XZZXI"`, `"-XX"`, `"+iZ"`, `"-iY"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, s)
        };
        let letters = rest
            .chars()
            .map(|c| {
                Pauli::from_letter(c)
                    .ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_paulis(&letters)?.with_phase(phase))
    }
}

/// Single-qubit Pauli channel `ρ ↦ Σ_j λ_j σ_j ρ σ_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel<T> {
    lambdas: [T; 4],
}

impl<T: Real> PauliChannel<T> {
    /// Validates `λ_j ∈ [0, 1]` and `Σ λ_j = 1` within [`Real::channel_tol`].
    pub fn new(lambdas: [T; 4]) -> Result<Self> {
        let tol = T::channel_tol();
        for (j, &l) in lambdas.iter().enumerate() {
            if !(l >= -tol && l <= T::one() + tol) {
                return Err(Error::invalid(format!("lambda_{j} = {l} outside [0, 1]")));
            }
        }
        let sum: T = lambdas.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::invalid(format!("lambdas sum to {sum}, expected 1")));
        }
        Ok(PauliChannel { lambdas })
    }

    /// Rescales non-negative weights to a probability vector.
    pub fn normalized(weights: [T; 4]) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(Error::invalid("weights must be non-negative"));
        }
        let sum: T = weights.iter().copied().sum();
        if sum <= T::zero() {
            return Err(Error::invalid("weights sum to zero"));
        }
        Self::new(weights.map(|w| w / sum))
    }

    pub fn identity() -> Self {
        PauliChannel {
            lambdas: [T::one(), T::zero(), T::zero(), T::zero()],
        }
    }

    /// Depolarizing channel: `λ0 = (1+3p)/4`, `λ_{j>0} = (1−p)/4`.
    pub fn white_noise(p: T) -> Result<Self> {
        check_unit("p", p)?;
        let four = T::of(4.0);
        let e = (T::one() - p) / four;
        Self::new([(T::one() + T::of(3.0) * p) / four, e, e, e])
    }

    /// Dephasing channel: `λ0 = (1+p)/2`, `λ3 = (1−p)/2`.
    pub fn phase_noise(p: T) -> Result<Self> {
        check_unit("p", p)?;
        let two = T::of(2.0);
        Self::new([(T::one() + p) / two, T::zero(), T::zero(), (T::one() - p) / two])
    }

    #[inline]
    pub fn lambdas(&self) -> [T; 4] {
        self.lambdas
    }

    #[inline]
    pub fn lambda(&self, p: Pauli) -> T {
        self.lambdas[p.index()]
    }

    /// Total probability of a non-identity error, `1 − λ0`.
    pub fn error_rate(&self) -> T {
        T::one() - self.lambdas[0]
    }

    /// Probability of the tensor-product error `e` under i.i.d. application.
    pub fn string_probability(&self, e: &PauliString) -> T {
        e.letters().fold(T::one(), |acc, p| acc * self.lambda(p))
    }

    /// The channel seen in a basis where X and Z are exchanged.
    pub fn swap_xz(&self) -> Self {
        let [l0, l1, l2, l3] = self.lambdas;
        PauliChannel { lambdas: [l0, l3, l2, l1] }
    }

    /// White-noise parameter `(4λ0 − 1)/3` (the inverse of [`Self::white_noise`]).
    pub fn white_parameter(&self) -> T {
        (T::of(4.0) * self.lambdas[0] - T::one()) / T::of(3.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.lambdas
            .iter()
            .zip(other.lambdas.iter())
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn check_unit<T: Real>(name: &str, p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {p} outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn multiply_examples() {
        let r = ps("XI").multiply(&ps("XI")).unwrap();
        assert_eq!(r, ps("II"));

        let r = ps("X").multiply(&ps("Z")).unwrap();
        assert!(r.same_letters(&ps("Y")));
        assert_eq!(r.phase(), Phase::MINUS_I);

        let r = ps("ZZ").multiply(&ps("ZI")).unwrap();
        assert_eq!(r, ps("IZ"));
    }

    #[test]
    fn single_qubit_multiplication_table() {
        use Pauli::*;
        let cases = [
            (X, Y, Z, Phase::I),
            (Y, Z, X, Phase::I),
            (Z, X, Y, Phase::I),
            (Y, X, Z, Phase::MINUS_I),
            (Z, Y, X, Phase::MINUS_I),
            (X, Z, Y, Phase::MINUS_I),
            (Y, Y, I, Phase::ONE),
        ];
        for (a, b, c, ph) in cases {
            let r = PauliString::from_paulis(&[a])
                .unwrap()
                .multiply(&PauliString::from_paulis(&[b]).unwrap())
                .unwrap();
            assert_eq!(r.letter(0), c, "{a}{b}");
            assert_eq!(r.phase(), ph, "{a}{b}");
        }
    }

    #[test]
    fn length_mismatch_is_invalid() {
        assert!(matches!(
            ps("XX").multiply(&ps("X")),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(ps("XX").commutes(&ps("X")), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn commutation_examples() {
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XI").commutes(&ps("IZ")).unwrap());
        assert!(ps("Y").commutes(&ps("Y")).unwrap());
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
    }

    #[test]
    fn parse_and_display() {
        let p = ps("-iXYZI");
        assert_eq!(p.phase(), Phase::MINUS_I);
        assert_eq!(p.to_string(), "-iXYZI");
        assert_eq!(p.weight(), 3);
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn white_noise_examples() {
        let c = PauliChannel::<f64>::white_noise(1.0).unwrap();
        assert_eq!(c.lambdas(), [1.0, 0.0, 0.0, 0.0]);
        let c = PauliChannel::<f64>::white_noise(0.0).unwrap();
        assert_eq!(c.lambdas(), [0.25; 4]);
        let c = PauliChannel::<f64>::white_noise(0.9).unwrap();
        for (a, b) in c.lambdas().iter().zip([0.925, 0.025, 0.025, 0.025]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(PauliChannel::<f64>::white_noise(1.5).is_err());
        assert!(PauliChannel::<f64>::white_noise(-0.1).is_err());
    }

    #[test]
    fn phase_noise_examples() {
        let c = PauliChannel::<f64>::phase_noise(1.0).unwrap();
        assert_eq!(c.lambdas(), [1.0, 0.0, 0.0, 0.0]);
        let c = PauliChannel::<f64>::phase_noise(0.0).unwrap();
        assert_eq!(c.lambdas(), [0.5, 0.0, 0.0, 0.5]);
        let c = PauliChannel::<f64>::phase_noise(0.5).unwrap();
        assert_eq!(c.lambdas(), [0.75, 0.0, 0.0, 0.25]);
        assert!(PauliChannel::<f64>::phase_noise(2.0).is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(PauliChannel::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(PauliChannel::new([1.1, -0.1, 0.0, 0.0]).is_err());
        assert!(PauliChannel::new([0.5, 0.5, 0.0, 0.0]).is_ok());
        let n = PauliChannel::normalized([2.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(n.lambdas(), [0.5, 0.25, 0.25, 0.0]);
        assert!(PauliChannel::<f64>::normalized([0.0; 4]).is_err());
    }

    #[test]
    fn string_probability_examples() {
        let c = PauliChannel::new([0.7, 0.1, 0.15, 0.05]).unwrap();
        assert!((c.string_probability(&ps("III")) - 0.7f64.powi(3)).abs() < 1e-15);

        let w = PauliChannel::<f64>::white_noise(0.9).unwrap();
        let expected = 0.025 * 0.925 * 0.925;
        assert!((w.string_probability(&ps("XII")) - expected).abs() < 1e-15);
        assert!((expected - 0.021390625).abs() < 1e-15);

        let p = 0.3;
        let ph = PauliChannel::<f64>::phase_noise(p).unwrap();
        assert!((ph.string_probability(&ps("ZZ")) - ((1.0 - p) / 2.0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn white_noise_is_the_isotropic_channel() {
        for p in [0.0, 0.3, 0.77, 1.0] {
            let c = PauliChannel::<f64>::white_noise(p).unwrap();
            let l = c.lambdas();
            assert_eq!(l[1], l[2]);
            assert_eq!(l[2], l[3]);
            assert!((c.white_parameter() - p).abs() < 1e-15);
        }
    }

    fn arb_pauli(len: usize) -> impl Strategy<Value = PauliString> {
        let mask = mask_for(len);
        (any::<u64>(), any::<u64>(), 0u8..4).prop_map(move |(x, z, k)| {
            PauliString::new(len, x & mask, z & mask, Phase(k)).unwrap()
        })
    }

    fn arb_channel() -> impl Strategy<Value = PauliChannel<f64>> {
        prop::array::uniform4(0.001f64..1.0).prop_map(|w| PauliChannel::normalized(w).unwrap())
    }

    proptest! {
        #[test]
        fn anticommutation_is_a_sign_flip((p, q) in (1usize..=64).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n)))) {
            let pq = p.multiply(&q).unwrap();
            let qp = q.multiply(&p).unwrap();
            prop_assert!(pq.same_letters(&qp));
            let flipped = pq.phase() == qp.phase().mul(Phase::MINUS_ONE);
            prop_assert_eq!(p.commutes(&q).unwrap(), !flipped);
            prop_assert_eq!(p.commutes(&q).unwrap(), pq.phase() == qp.phase());
        }

        #[test]
        fn multiplication_is_associative((a, b, c) in (1usize..=64).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            let id = PauliString::identity(a.len()).unwrap();
            prop_assert_eq!(a.multiply(&id).unwrap(), a);
            prop_assert_eq!(id.multiply(&a).unwrap(), a);
        }

        #[test]
        fn string_probabilities_sum_to_one(c in arb_channel(), m in 1usize..=8) {
            let mut total = 0.0;
            for x in 0..(1u64 << m) {
                for z in 0..(1u64 << m) {
                    total += c.string_probability(&PauliString::new(m, x, z, Phase::ONE).unwrap());
                }
            }
            prop_assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

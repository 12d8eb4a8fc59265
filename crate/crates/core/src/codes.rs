//! Single-logical-qubit stabilizer codes.
//!
//! A code on `m` qubits carries `m − 1` commuting generators, one logical X
//! and one logical Z representative, and a recovery table that assigns a fixed
//! Pauli correction to each of the `2^{m−1}` syndromes. Syndrome bit `a` is set
//! when an error anticommutes with generator `a`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pauli::{Pauli, PauliString};
use crate::{Error, Result};

/// Codes with more qubits than this cannot build a recovery table.
pub const MAX_CODE_QUBITS: usize = 24;

/// Syndrome bit vector; bit `a` belongs to generator `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Syndrome(pub u64);

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome(0);

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bit(self, a: usize) -> bool {
        (self.0 >> a) & 1 == 1
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }

    /// `0`/`1` string, generator 0 first.
    pub fn to_bit_string(self, len: usize) -> String {
        (0..len).map(|a| if self.bit(a) { '1' } else { '0' }).collect()
    }
}

/// Error alphabet searched when building a recovery table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryAlphabet {
    XOnly,
    ZOnly,
    Full,
}

impl RecoveryAlphabet {
    fn letters(self) -> &'static [Pauli] {
        match self {
            RecoveryAlphabet::XOnly => &[Pauli::X],
            RecoveryAlphabet::ZOnly => &[Pauli::Z],
            RecoveryAlphabet::Full => &[Pauli::X, Pauli::Y, Pauli::Z],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    label: String,
    m: usize,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    recovery: Vec<PauliString>,
}

impl StabilizerCode {
    /// Builds a code and its minimum-weight recovery table over `alphabet`.
    ///
    /// Fails with `ConstructionFailure` if some syndrome cannot be produced
    /// by any error in the alphabet (e.g. dependent generators).
    pub fn new(
        label: impl Into<String>,
        generators: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
        alphabet: RecoveryAlphabet,
    ) -> Result<Self> {
        let mut code = Self::with_recovery_table(label, generators, logical_x, logical_z, Vec::new())?;
        code.recovery = code.search_recovery(alphabet)?;
        Ok(code)
    }

    /// Assembles a code from explicit parts without building or checking the
    /// recovery table. Use [`StabilizerCode::validate`] to audit the result.
    pub fn with_recovery_table(
        label: impl Into<String>,
        generators: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
        recovery: Vec<PauliString>,
    ) -> Result<Self> {
        let m = logical_x.len();
        if m > MAX_CODE_QUBITS {
            return Err(Error::resource(format!(
                "codes are limited to {MAX_CODE_QUBITS} qubits, got {m}"
            )));
        }
        if logical_z.len() != m {
            return Err(Error::invalid("logical operators have different lengths"));
        }
        if generators.len() + 1 != m {
            return Err(Error::invalid(format!(
                "an {m}-qubit code needs {} generators, got {}",
                m - 1,
                generators.len()
            )));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != m) {
            return Err(Error::invalid(format!("generator {g} has length {} != {m}", g.len())));
        }
        if let Some(r) = recovery.iter().find(|r| r.len() != m) {
            return Err(Error::invalid(format!("recovery {r} has length {} != {m}", r.len())));
        }
        Ok(StabilizerCode {
            label: label.into(),
            m,
            generators,
            logical_x,
            logical_z,
            recovery,
        })
    }

    /// No encoding: one qubit, no generators, logical X = X, logical Z = Z.
    pub fn trivial() -> Self {
        let x = PauliString::single(1, 0, Pauli::X).unwrap();
        let z = PauliString::single(1, 0, Pauli::Z).unwrap();
        StabilizerCode {
            label: "trivial".into(),
            m: 1,
            generators: Vec::new(),
            logical_x: x,
            logical_z: z,
            recovery: vec![PauliString::identity(1).unwrap()],
        }
    }

    /// Bit-flip repetition code `|0_L> = |0…0>`, `|1_L> = |1…1>` on odd `m`.
    pub fn repetition(m: usize) -> Result<Self> {
        check_odd("repetition", m, 1)?;
        let generators = (0..m - 1)
            .map(|i| PauliString::z_type(m, 0b11 << i))
            .collect::<Result<Vec<_>>>()?;
        let all = full_mask(m);
        Self::new(
            "repetition",
            generators,
            PauliString::x_type(m, all)?,
            PauliString::z_type(m, 1)?,
            RecoveryAlphabet::XOnly,
        )
    }

    /// GHZ encoding `|0_L>, |1_L> = (|0…0> ± |1…1>)/√2`: the repetition code
    /// with logical X and Z exchanged.
    pub fn ghz(m: usize) -> Result<Self> {
        check_odd("ghz", m, 1)?;
        let mut code = Self::repetition(m)?;
        std::mem::swap(&mut code.logical_x, &mut code.logical_z);
        code.label = "ghz".into();
        Ok(code)
    }

    /// Cluster-ring code on odd `m ≥ 5`: code words are the periodic 1-D
    /// cluster state and its image under `Z^{⊗m}`. Generators are
    /// `K_a K_{a+1}` with `K_a = X_a Z_{a−1} Z_{a+1}`; logical Z is `K_1`,
    /// logical X is `Z^{⊗m}`. Recovery is minimum weight over all Paulis.
    pub fn cluster_ring(m: usize) -> Result<Self> {
        check_odd("cluster-ring", m, 5)?;
        let k = (0..m).map(|a| cluster_stabilizer(m, a)).collect::<Result<Vec<_>>>()?;
        let generators = (0..m - 1)
            .map(|a| k[a].multiply(&k[a + 1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            "cluster-ring",
            generators,
            PauliString::z_type(m, full_mask(m))?,
            k[0],
            RecoveryAlphabet::Full,
        )
    }

    /// Looks up a built-in code by name (`trivial`, `repetition`, `ghz`,
    /// `cluster-ring`).
    pub fn builtin(name: &str, m: usize) -> Result<Self> {
        match name {
            "trivial" if m == 1 => Ok(Self::trivial()),
            "trivial" => Err(Error::unsupported("the trivial code has m = 1")),
            "repetition" | "rep" => Self::repetition(m),
            "ghz" => Self::ghz(m),
            "cluster-ring" | "cluster_ring" | "cr" => Self::cluster_ring(m),
            other => Err(Error::invalid(format!("unknown code {other:?}"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn syndrome_count(&self) -> usize {
        1usize << self.generators.len()
    }

    /// Correction applied for syndrome `s`.
    pub fn recovery(&self, s: Syndrome) -> Option<&PauliString> {
        self.recovery.get(s.index())
    }

    pub fn recovery_table(&self) -> &[PauliString] {
        &self.recovery
    }

    fn check_len(&self, e: &PauliString) -> Result<()> {
        if e.len() != self.m {
            return Err(Error::invalid(format!(
                "error has length {}, code has {} qubits",
                e.len(),
                self.m
            )));
        }
        Ok(())
    }

    pub fn syndrome(&self, e: &PauliString) -> Result<Syndrome> {
        self.check_len(e)?;
        Ok(self.syndrome_unchecked(e))
    }

    pub(crate) fn syndrome_unchecked(&self, e: &PauliString) -> Syndrome {
        let bits = self
            .generators
            .iter()
            .enumerate()
            .fold(0u64, |acc, (a, g)| acc | ((!g.commutes_unchecked(e) as u64) << a));
        Syndrome(bits)
    }

    /// Anticommutation of `c` with (logical Z, logical X), i.e. the
    /// (X, Z) components of its logical class.
    pub(crate) fn logical_bits(&self, c: &PauliString) -> (bool, bool) {
        (
            !c.commutes_unchecked(&self.logical_z),
            !c.commutes_unchecked(&self.logical_x),
        )
    }

    /// Logical class left by `e` after the syndrome's recovery is applied.
    pub fn logical_action(&self, e: &PauliString) -> Result<Pauli> {
        let s = self.syndrome(e)?;
        let r = self
            .recovery(s)
            .ok_or_else(|| Error::invalid(format!("no recovery for syndrome {}", s.bits())))?;
        let (x, z) = self.logical_bits(&r.mul_unchecked(e));
        Ok(Pauli::from_bits(x, z))
    }

    /// Minimum-weight search. Supports are visited by increasing weight, then
    /// increasing mask value; letters vary with the lowest qubit slowest in
    /// X < Y < Z order. The first error reaching a syndrome is kept.
    fn search_recovery(&self, alphabet: RecoveryAlphabet) -> Result<Vec<PauliString>> {
        let m = self.m;
        let count = self.syndrome_count();
        let mut table: Vec<Option<PauliString>> = vec![None; count];
        let mut filled = 0usize;
        let letters = alphabet.letters();
        'weights: for w in 0..=m {
            for support in combinations(m, w) {
                let qubits: Vec<usize> = (0..m).filter(|q| (support >> q) & 1 == 1).collect();
                let mut digits = vec![0usize; w];
                loop {
                    let mut e = PauliString::identity(m)?;
                    for (q, d) in qubits.iter().zip(&digits) {
                        e = e.mul_unchecked(&PauliString::single(m, *q, letters[*d])?);
                    }
                    let e = e.with_phase(crate::Phase::ONE);
                    let s = self.syndrome_unchecked(&e).index();
                    if table[s].is_none() {
                        table[s] = Some(e);
                        filled += 1;
                        if filled == count {
                            break 'weights;
                        }
                    }
                    if !increment(&mut digits, letters.len()) {
                        break;
                    }
                }
            }
        }
        if filled != count {
            return Err(Error::ConstructionFailure(format!(
                "{}: only {filled} of {count} syndromes reachable with {alphabet:?} errors",
                self.label
            )));
        }
        Ok(table.into_iter().map(|e| e.expect("filled")).collect())
    }

    /// Audits every structural invariant; never fails, failures are entries.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("{} (m = {})", self.label, self.m));
        let gens = &self.generators;

        report.push(
            "generator count is m - 1",
            gens.len() + 1 == self.m,
            format!("{} generators", gens.len()),
        );

        let bad_pair = (0..gens.len())
            .flat_map(|a| (a + 1..gens.len()).map(move |b| (a, b)))
            .find(|&(a, b)| !gens[a].commutes_unchecked(&gens[b]));
        report.push(
            "generators pairwise commute",
            bad_pair.is_none(),
            bad_pair.map_or(String::new(), |(a, b)| format!("{} vs {}", gens[a], gens[b])),
        );

        let hermitian = gens.iter().all(PauliString::is_hermitian)
            && self.logical_x.is_hermitian()
            && self.logical_z.is_hermitian();
        report.push("operators are Hermitian", hermitian, String::new());

        let group_has_minus_identity = stabilizer_group_contains_minus_identity(gens);
        report.push(
            "stabilizer group excludes -I",
            !group_has_minus_identity,
            String::new(),
        );

        let rank = gf2_rank(gens.iter().map(PauliString::symplectic).collect());
        report.push(
            "generators independent",
            rank == gens.len(),
            format!("rank {rank}"),
        );

        for (name, l) in [("logical_x", &self.logical_x), ("logical_z", &self.logical_z)] {
            let ok = gens.iter().all(|g| g.commutes_unchecked(l));
            report.push(&format!("{name} commutes with generators"), ok, l.to_string());
            let with_l = gf2_rank(
                gens.iter()
                    .map(PauliString::symplectic)
                    .chain(std::iter::once(l.symplectic()))
                    .collect(),
            );
            report.push(
                &format!("{name} is not a product of generators"),
                with_l > rank,
                String::new(),
            );
        }
        report.push(
            "logical_x anticommutes with logical_z",
            !self.logical_x.commutes_unchecked(&self.logical_z),
            String::new(),
        );

        report.push(
            "recovery covers every syndrome",
            self.recovery.len() == self.syndrome_count(),
            format!("{} of {} entries", self.recovery.len(), self.syndrome_count()),
        );
        let mismatch = self
            .recovery
            .iter()
            .enumerate()
            .find(|(s, r)| self.syndrome_unchecked(r).index() != *s);
        report.push(
            "recovery reproduces its syndrome",
            mismatch.is_none(),
            mismatch.map_or(String::new(), |(s, r)| format!("entry {s}: {r}")),
        );
        report
    }
}

impl fmt::Display for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (m = {})", self.label, self.m)?;
        for g in &self.generators {
            writeln!(f, "  S {g}")?;
        }
        writeln!(f, "  X_L {}", self.logical_x)?;
        write!(f, "  Z_L {}", self.logical_z)
    }
}

fn check_odd(name: &str, m: usize, min: usize) -> Result<()> {
    if m < min || m.is_multiple_of(2) {
        return Err(Error::unsupported(format!(
            "{name} code needs odd m >= {min}, got {m}"
        )));
    }
    if m > MAX_CODE_QUBITS {
        return Err(Error::resource(format!("{name} code with m = {m} is too large")));
    }
    Ok(())
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// `K_a = X_a Z_{a−1} Z_{a+1}` on a ring of `m` qubits.
fn cluster_stabilizer(m: usize, a: usize) -> Result<PauliString> {
    let left = (a + m - 1) % m;
    let right = (a + 1) % m;
    PauliString::new(m, 1 << a, (1 << left) | (1 << right), crate::Phase::ONE)
}

/// Masks with `w` of the low `m` bits set, in increasing order.
fn combinations(m: usize, w: usize) -> impl Iterator<Item = u64> {
    let limit = if m == 64 { None } else { Some(1u64 << m) };
    let first = if w == 0 { 0 } else { full_mask(w) };
    let mut next = if w > m { None } else { Some(first) };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            let n = (((r ^ cur) >> 2) / c) | r;
            match limit {
                Some(l) if n >= l || r == 0 => None,
                None if r == 0 => None,
                _ => Some(n),
            }
        };
        Some(cur)
    })
}

/// Odometer increment with the last digit fastest; false on wrap-around.
fn increment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub(crate) fn gf2_rank(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    for bit in 0..128 {
        let pivot = 1u128 << bit;
        if let Some(i) = (rank..rows.len()).find(|&i| rows[i] & pivot != 0) {
            rows.swap(rank, i);
            let p = rows[rank];
            for (j, r) in rows.iter_mut().enumerate() {
                if j != rank && *r & pivot != 0 {
                    *r ^= p;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// True if some product of the generators equals `−I` (empty code space).
fn stabilizer_group_contains_minus_identity(gens: &[PauliString]) -> bool {
    if gens.is_empty() || gens.len() > 20 {
        return false;
    }
    let m = gens[0].len();
    let id = match PauliString::identity(m) {
        Ok(id) => id,
        Err(_) => return false,
    };
    (1u64..(1 << gens.len())).any(|subset| {
        let prod = gens
            .iter()
            .enumerate()
            .filter(|(a, _)| (subset >> a) & 1 == 1)
            .fold(id, |acc, (_, g)| acc.mul_unchecked(g));
        prod.is_identity() && prod.phase() != crate::Phase::ONE
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn new(subject: String) -> Self {
        ValidationReport {
            subject,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            let tag = if c.passed { "pass" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "  [{tag}] {}", c.name)?;
            } else {
                writeln!(f, "  [{tag}] {} ({})", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}

/// User-supplied code in the JSON code-definition format.
///
/// ```json
/// {
///   "label": "five-qubit",
///   "m": 5,
///   "generators": ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
///   "logical_x": "XXXXX",
///   "logical_z": "ZZZZZ",
///   "recovery_alphabet": "full"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDefinition {
    pub label: String,
    pub m: usize,
    pub generators: Vec<String>,
    pub logical_x: String,
    pub logical_z: String,
    pub recovery_alphabet: RecoveryAlphabet,
}

impl CodeDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_code(&self) -> Result<StabilizerCode> {
        let parse = |s: &str| -> Result<PauliString> {
            let p: PauliString = s.parse()?;
            if p.len() != self.m {
                return Err(Error::invalid(format!(
                    "{s:?} has {} qubits, expected m = {}",
                    p.len(),
                    self.m
                )));
            }
            Ok(p)
        };
        let generators = self
            .generators
            .iter()
            .map(|g| parse(g))
            .collect::<Result<Vec<_>>>()?;
        StabilizerCode::new(
            self.label.clone(),
            generators,
            parse(&self.logical_x)?,
            parse(&self.logical_z)?,
            self.recovery_alphabet,
        )
    }
}

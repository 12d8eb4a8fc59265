//! Concatenated codes, composed one level at a time.
//!
//! The logical channel of level `k` is the physical channel of level `k + 1`.
//! Between levels either the mean channel or the trivial-syndrome channel is
//! passed on.

use serde::{Deserialize, Serialize};

use crate::codes::StabilizerCode;
use crate::effective::{derive_effective_with, EffectiveChannel, EnumerationOptions};
use crate::entanglement::{lifetime_pcrit, LifetimeResult};
use crate::pauli::PauliChannel;
use crate::{Error, Real, Result};

/// Interior points `p_k = (k+1)/(CRITICAL_GRID+1)` of the critical-rate pre-scan.
pub const CRITICAL_GRID: usize = 64;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Syndrome-averaged channel.
    Mean,
    /// Channel conditioned on the trivial syndrome.
    Projected,
}

impl ChannelMode {
    pub fn select<T: Real>(self, eff: &EffectiveChannel<T>) -> PauliChannel<T> {
        match self {
            ChannelMode::Mean => eff.mean(),
            ChannelMode::Projected => eff.projected(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcatLevel {
    pub code: StabilizerCode,
    pub mode: ChannelMode,
}

/// Levels ordered innermost (physical) first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcatSpec {
    levels: Vec<ConcatLevel>,
}

impl ConcatSpec {
    pub fn new(levels: Vec<ConcatLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("a concatenation needs at least one level"));
        }
        Ok(ConcatSpec { levels })
    }

    /// Same mode on every level.
    pub fn uniform(codes: Vec<StabilizerCode>, mode: ChannelMode) -> Result<Self> {
        Self::new(codes.into_iter().map(|code| ConcatLevel { code, mode }).collect())
    }

    /// GHZ blocks of `m1` qubits inside a repetition code of `m2` blocks.
    /// `(3, 3)` is the nine-qubit Shor code; `m2 = 1` is the plain GHZ encoding.
    pub fn generalized_shor(m1: usize, m2: usize, mode: ChannelMode) -> Result<Self> {
        Self::uniform(
            vec![StabilizerCode::ghz(m1)?, StabilizerCode::repetition(m2)?],
            mode,
        )
    }

    pub fn levels(&self) -> &[ConcatLevel] {
        &self.levels
    }

    /// Total number of physical qubits.
    pub fn physical_qubits(&self) -> usize {
        self.levels.iter().map(|l| l.code.m()).product()
    }
}

pub fn concatenate<T: Real>(spec: &ConcatSpec, physical: &PauliChannel<T>) -> Result<EffectiveChannel<T>> {
    concatenate_with(spec, physical, EnumerationOptions::default())
}

/// Effective channel of the outermost level; inner levels pass on the
/// channel chosen by their mode.
pub fn concatenate_with<T: Real>(
    spec: &ConcatSpec,
    physical: &PauliChannel<T>,
    options: EnumerationOptions,
) -> Result<EffectiveChannel<T>> {
    let (last, inner) = spec.levels.split_last().expect("nonempty");
    let mut channel = *physical;
    for level in inner {
        channel = level.mode.select(&derive_effective_with(&level.code, &channel, options)?);
    }
    derive_effective_with(&last.code, &channel, options)
}

/// The channel the outermost level hands on, selected by its own mode.
pub fn concatenated_channel<T: Real>(spec: &ConcatSpec, physical: &PauliChannel<T>) -> Result<PauliChannel<T>> {
    let eff = concatenate(spec, physical)?;
    Ok(spec.levels.last().expect("nonempty").mode.select(&eff))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRateResult<T> {
    pub m1: usize,
    pub m2: usize,
    pub p_c: Option<T>,
    /// False when the pre-scan found more than one sign change.
    pub grid_checked: bool,
    /// Every grid bracket `(lo, hi)` containing a sign change.
    pub crossings: Vec<(T, T)>,
    /// Final bracket width, zero when no bisection ran.
    pub residual: T,
}

/// `(1 − μ0) − 3(1 − p)/4` for white noise `p` through `spec` in its own modes.
pub fn excess_error_rate<T: Real>(spec: &ConcatSpec, p: T) -> Result<T> {
    let mu = concatenated_channel(spec, &PauliChannel::white_noise(p)?)?;
    Ok(mu.error_rate() - T::of(0.75) * (T::one() - p))
}

/// Noise level above which the generalized Shor code `(m1, m2)` (mean mode)
/// has a smaller total logical error rate than an unencoded qubit.
pub fn critical_rate<T: Real>(m1: usize, m2: usize, tol: T) -> Result<CriticalRateResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let spec = ConcatSpec::generalized_shor(m1, m2, ChannelMode::Mean)?;
    let g = |p: T| excess_error_rate(&spec, p);
    let zero = T::zero_tol();
    let sign = |v: T| -> i8 {
        if v > zero {
            1
        } else if v < -zero {
            -1
        } else {
            0
        }
    };
    let steps = T::of_usize(CRITICAL_GRID + 1);
    let grid: Vec<T> = (1..=CRITICAL_GRID).map(|k| T::of_usize(k) / steps).collect();
    let signs = grid.iter().map(|&p| Ok(sign(g(p)?))).collect::<Result<Vec<i8>>>()?;

    let mut crossings = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (k, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some((j, t)) = last {
            if t != s {
                crossings.push((grid[j], grid[k]));
            }
        }
        last = Some((k, s));
    }

    let mut result = CriticalRateResult {
        m1,
        m2,
        p_c: None,
        grid_checked: crossings.len() <= 1,
        crossings,
        residual: T::zero(),
    };
    if result.crossings.len() != 1 {
        return Ok(result);
    }
    let (mut lo, mut hi) = result.crossings[0];
    let lo_sign = sign(g(lo)?);
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == MAX_BISECTIONS {
            return Err(Error::SearchFailure("bisection did not reach the tolerance".into()));
        }
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = sign(g(mid)?);
        if s == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    result.p_c = Some((lo + hi) * T::of(0.5));
    result.residual = hi - lo;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeComparison<T> {
    /// GHZ encoding of all `m1·m2` qubits in one block.
    pub one_level: LifetimeResult<T>,
    /// Generalized Shor code `(m1, m2)` in projected mode.
    pub two_level: LifetimeResult<T>,
}

/// Lifetime bound of an `n`-party logical GHZ state with one large GHZ
/// block versus two concatenated levels of the same total size.
pub fn lifetime_concat_compare<T: Real>(n: usize, m1: usize, m2: usize, tol: T) -> Result<LifetimeComparison<T>> {
    let flat = ConcatSpec::uniform(vec![StabilizerCode::ghz(m1 * m2)?], ChannelMode::Projected)?;
    let nested = ConcatSpec::generalized_shor(m1, m2, ChannelMode::Projected)?;
    let one_level = lifetime_pcrit(
        |p| concatenated_channel(&flat, &PauliChannel::white_noise(p)?),
        n,
        tol,
    )?;
    let two_level = lifetime_pcrit(
        |p| concatenated_channel(&nested, &PauliChannel::white_noise(p)?),
        n,
        tol,
    )?;
    Ok(LifetimeComparison { one_level, two_level })
}

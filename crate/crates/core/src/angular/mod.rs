//! Angular-momentum algebra: 6j symbols, rank-K selection rules, the
//! electric-quadrupole hyperfine ladder and its centroid.

mod wigner;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::halfint::HalfInt;
pub use wigner::{triangle, wigner_6j, wigner_6j_signed_square};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AngularError {
    #[error("invalid channel {label:?}: {reason}")]
    InvalidChannel { label: String, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
}

const ORBITAL_LETTERS: &[u8] = b"spdfghik";

/// One bound electronic state, e.g. `2p3/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElectronicChannel {
    pub n: u32,
    pub l: u32,
    pub j: HalfInt,
    pub label: String,
    /// Gap to the fine-structure partner (eV); absent for s states.
    pub fs_gap_ev: Option<f64>,
}

impl ElectronicChannel {
    pub fn new(n: u32, l: u32, j: HalfInt, fs_gap_ev: Option<f64>) -> Result<Self, AngularError> {
        let letter = ORBITAL_LETTERS
            .get(l as usize)
            .map(|&b| b as char)
            .unwrap_or('?');
        let label = format!("{n}{letter}{}", j);
        let invalid = |reason: String| {
            Err(AngularError::InvalidChannel {
                label: label.clone(),
                reason,
            })
        };
        if n <= l {
            return invalid(format!("need n > l, got n={n}, l={l}"));
        }
        if j.is_integer() || j.twice() + 1 < 2 * l || j.twice() > 2 * l + 1 {
            return invalid(format!("need |l - 1/2| <= j <= l + 1/2, got j={j}"));
        }
        if let Some(gap) = fs_gap_ev {
            if !(gap > 0.0) {
                return invalid(format!("fine-structure gap must be positive, got {gap}"));
            }
        }
        Ok(ElectronicChannel {
            n,
            l,
            j,
            label,
            fs_gap_ev,
        })
    }

    /// Rank-2 tensor expectation values survive only for j >= 3/2.
    pub fn rank2_sensitive(&self) -> bool {
        self.j >= HalfInt::THREE_HALVES
    }

    pub fn with_gap(mut self, gap_ev: f64) -> Self {
        self.fs_gap_ev = Some(gap_ev);
        self
    }
}

impl FromStr for ElectronicChannel {
    type Err = AngularError;

    /// Parses labels such as `2p3/2` or `1s1/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| AngularError::InvalidChannel {
            label: s.to_string(),
            reason: reason.into(),
        };
        let t = s.trim();
        let letter_pos = t
            .find(|c: char| c.is_ascii_alphabetic())
            .ok_or_else(|| bad("missing orbital letter"))?;
        let n: u32 = t[..letter_pos]
            .parse()
            .map_err(|_| bad("missing principal quantum number"))?;
        let letter = t.as_bytes()[letter_pos].to_ascii_lowercase();
        let l = ORBITAL_LETTERS
            .iter()
            .position(|&b| b == letter)
            .ok_or_else(|| bad("unknown orbital letter"))? as u32;
        let j: HalfInt = t[letter_pos + 1..].parse().map_err(|_| bad("bad j"))?;
        ElectronicChannel::new(n, l, j, None)
    }
}

impl fmt::Display for ElectronicChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Whether a rank-K tensor has a non-vanishing diagonal element in `channel`.
pub fn rank2_allowed(channel: &ElectronicChannel, rank: u32) -> bool {
    rank <= channel.j.twice()
}

/// One hyperfine component |I j F>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperfineLevel {
    pub f: HalfInt,
    /// K = F(F+1) - I(I+1) - j(j+1)
    pub k_casimir: f64,
    /// Multiplier of the quadrupole constant B.
    pub quadrupole_coefficient: f64,
    /// Energy shift in eV.
    pub shift: f64,
}

impl HyperfineLevel {
    pub fn weight(&self) -> f64 {
        f64::from(self.f.twice() + 1)
    }
}

/// Quadrupole coefficient as an exact fraction (numerator, denominator).
///
/// `[(3/2)K(K+1) - 2I(I+1)j(j+1)] / [2I(2I-1) 2j(2j-1)]`, multiplied through
/// by 32 so every term is an integer.
pub fn quadrupole_coefficient_exact(spin: HalfInt, j: HalfInt, f: HalfInt) -> (i64, i64) {
    if spin < HalfInt::ONE || j < HalfInt::THREE_HALVES {
        return (0, 1);
    }
    let ci = spin.casimir_times_four();
    let cj = j.casimir_times_four();
    let k4 = f.casimir_times_four() - ci - cj;
    let num = 3 * k4 * (k4 + 4) - 4 * ci * cj;
    let (ti, tj) = (i64::from(spin.twice()), i64::from(j.twice()));
    let den = 32 * ti * (ti - 1) * tj * (tj - 1);
    (num, den)
}

/// The first-order electric-quadrupole hyperfine ladder for nuclear spin
/// `spin` and electronic angular momentum `j`.
///
/// Coefficients vanish identically unless I >= 1 and j >= 3/2.
pub fn hfs_e2_levels(spin: HalfInt, j: HalfInt, b_const_ev: f64) -> Vec<HyperfineLevel> {
    HalfInt::coupled_range(spin, j)
        .map(|f| {
            let (num, den) = quadrupole_coefficient_exact(spin, j, f);
            let coefficient = num as f64 / den as f64;
            HyperfineLevel {
                f,
                k_casimir: f.casimir() - spin.casimir() - j.casimir(),
                quadrupole_coefficient: coefficient,
                shift: b_const_ev * coefficient,
            }
        })
        .collect()
}

/// Adds a uniform scalar shift to every component.
pub fn with_scalar_shift(levels: &[HyperfineLevel], scalar_ev: f64) -> Vec<HyperfineLevel> {
    levels
        .iter()
        .map(|l| HyperfineLevel {
            shift: l.shift + scalar_ev,
            ..*l
        })
        .collect()
}

/// The (2F+1)-weighted centroid of a hyperfine ladder.
pub fn centroid(levels: &[HyperfineLevel]) -> Result<f64, AngularError> {
    if levels.is_empty() {
        return Err(AngularError::Domain("centroid of an empty ladder".into()));
    }
    let (num, den) = levels.iter().fold((0.0, 0.0), |(n, d), l| {
        (n + l.weight() * l.shift, d + l.weight())
    });
    Ok(num / den)
}

/// Rank-2 matrix element induced in a dressed j = 1/2 state by fine-structure
/// mixing: `2 (V_mix / ΔE_FS) ΔE_signal(j = 3/2)`.
pub fn induced_rank2_admixture(
    v_mix_ev: f64,
    fs_gap_ev: f64,
    signal_p32_ev: f64,
) -> Result<f64, AngularError> {
    if !(fs_gap_ev > 0.0) {
        return Err(AngularError::Domain(format!(
            "fine-structure gap must be positive, got {fs_gap_ev}"
        )));
    }
    Ok(2.0 * (v_mix_ev / fs_gap_ev) * signal_p32_ev)
}

//! Coin operators.
//!
//! The standard coin is `C = [[d, a], [a, -d]]` and the symmetric variant is
//! `C' = [[i d, a], [a, i d]]`, with `a = sqrt(1 - d^2)`. Index 0 is the coin
//! state that moves the walker to `n + 1`, index 1 moves it to `n - 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Which of the two coin forms to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CoinVariant {
    #[default]
    Standard,
    Symmetric,
}

/// A 2x2 complex matrix stored row-major.
pub type CoinMatrix = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinSpec {
    d: f64,
    variant: CoinVariant,
}

impl CoinSpec {
    /// Coin from the diabatic amplitude `d`.
    pub fn new(d: f64, variant: CoinVariant) -> Result<Self> {
        if !d.is_finite() || !(0.0..=1.0).contains(&d) {
            return Err(WalkError::Domain {
                name: "d",
                value: d,
                reason: "diabatic amplitude must lie in [0, 1]",
            });
        }
        Ok(Self { d, variant })
    }

    /// Coin from the diabatic transition probability `D = d^2`.
    pub fn from_probability(big_d: f64, variant: CoinVariant) -> Result<Self> {
        if !big_d.is_finite() || !(0.0..=1.0).contains(&big_d) {
            return Err(WalkError::Domain {
                name: "D",
                value: big_d,
                reason: "transition probability must lie in [0, 1]",
            });
        }
        Self::new(big_d.sqrt(), variant)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// The complementary amplitude `a = sqrt(1 - d^2)`.
    pub fn a(&self) -> f64 {
        (1.0 - self.d * self.d).max(0.0).sqrt()
    }

    pub fn probability(&self) -> f64 {
        self.d * self.d
    }

    pub fn variant(&self) -> CoinVariant {
        self.variant
    }

    pub fn with_variant(self, variant: CoinVariant) -> Self {
        Self { variant, ..self }
    }

    pub fn matrix(&self) -> CoinMatrix {
        build_coin(self)
    }
}

pub fn build_coin(spec: &CoinSpec) -> CoinMatrix {
    let d = spec.d;
    let a = Complex64::new(spec.a(), 0.0);
    match spec.variant {
        CoinVariant::Standard => [
            [Complex64::new(d, 0.0), a],
            [a, Complex64::new(-d, 0.0)],
        ],
        CoinVariant::Symmetric => [
            [Complex64::new(0.0, d), a],
            [a, Complex64::new(0.0, d)],
        ],
    }
}

/// Largest entry of `|M^dagger M - I|`.
pub fn unitarity_defect(m: &CoinMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += m[k][i].conj() * m[k][j];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

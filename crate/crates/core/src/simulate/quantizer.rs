//! Quantization onto `2^b` evenly spaced levels spanning `[-1, 1]`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance, in index units, within which a value counts as lying on a level.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Nearest level; exact midpoints go up.
    Uniform,
    /// Upper neighbour with probability proportional to the distance from
    /// the lower one, so the expected output equals the input.
    Probabilistic,
    /// No quantization.
    None,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Uniform => "uniform",
            Scheme::Probabilistic => "probabilistic",
            Scheme::None => "none",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Scheme::Uniform),
            "probabilistic" => Ok(Scheme::Probabilistic),
            "none" => Ok(Scheme::None),
            _ => Err(Error::ParameterBounds(format!("unknown quantization scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub bits: u32,
    pub scheme: Scheme,
}

impl QuantizerSpec {
    pub const MAX_BITS: u32 = 24;

    pub fn new(bits: u32, scheme: Scheme) -> Result<Self> {
        let q = QuantizerSpec { bits, scheme };
        q.check()?;
        Ok(q)
    }

    pub fn check(&self) -> Result<()> {
        if self.bits == 0 || self.bits > Self::MAX_BITS {
            return Err(Error::ParameterBounds(format!("bits must be in 1..={} (got {})", Self::MAX_BITS, self.bits)));
        }
        Ok(())
    }

    pub fn level_count(&self) -> u32 {
        1 << self.bits
    }

    /// Spacing between adjacent levels.
    pub fn resolution(&self) -> f64 {
        2.0 / (self.level_count() - 1) as f64
    }

    pub fn level(&self, index: u32) -> f64 {
        -1.0 + index as f64 * self.resolution()
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.level_count()).map(|i| self.level(i)).collect()
    }

    /// Position of `x` on the level grid, clipped to `[0, 2^b - 1]`.
    pub fn to_index_units(&self, x: f64) -> f64 {
        ((x + 1.0) / self.resolution()).clamp(0.0, (self.level_count() - 1) as f64)
    }

    /// Quantizes a position given in index units and returns the level index.
    ///
    /// Only the probabilistic scheme draws from `rng`, and only when the
    /// position is strictly between two levels.
    pub fn quantize_index<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> u32 {
        let top = (self.level_count() - 1) as f64;
        let t = t.clamp(0.0, top);
        let nearest = t.round();
        if (t - nearest).abs() <= SNAP_TOL {
            return nearest as u32;
        }
        let lo = t.floor();
        let frac = t - lo;
        let up = match self.scheme {
            Scheme::Uniform | Scheme::None => frac >= 0.5,
            Scheme::Probabilistic => rng.random::<f64>() < frac,
        };
        lo as u32 + u32::from(up)
    }

    /// Quantized value of `x`. With [`Scheme::None`] `x` is returned as is.
    pub fn quantize<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        match self.scheme {
            Scheme::None => x,
            _ => self.level(self.quantize_index(self.to_index_units(x), rng)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    #[test]
    fn two_bit_grid() {
        let q = QuantizerSpec::new(2, Scheme::Uniform).unwrap();
        let l = q.levels();
        assert_eq!(l.len(), 4);
        for (a, b) in l.iter().zip([-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((q.resolution() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_rounds_up() {
        let q = QuantizerSpec::new(2, Scheme::Uniform).unwrap();
        assert!((q.quantize(0.0, &mut rng()) - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.quantize(-0.01, &mut rng()) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn levels_are_fixed_points() {
        for scheme in [Scheme::Uniform, Scheme::Probabilistic] {
            let q = QuantizerSpec::new(4, scheme).unwrap();
            let mut r = rng();
            for x in q.levels() {
                assert_eq!(q.quantize(x, &mut r), x);
            }
        }
    }

    #[test]
    fn clipping() {
        let q = QuantizerSpec::new(3, Scheme::Probabilistic).unwrap();
        assert_eq!(q.quantize(7.0, &mut rng()), 1.0);
        assert_eq!(q.quantize(-1.5, &mut rng()), -1.0);
    }

    #[test]
    fn probabilistic_is_a_neighbour() {
        let q = QuantizerSpec::new(3, Scheme::Probabilistic).unwrap();
        let mut r = rng();
        for _ in 0..1000 {
            let y = q.quantize(0.1, &mut r);
            assert!((y - q.level(3)).abs() < 1e-15 || (y - q.level(4)).abs() < 1e-15);
        }
    }

    #[test]
    fn bit_bounds() {
        assert!(QuantizerSpec::new(0, Scheme::Uniform).is_err());
        assert!(QuantizerSpec::new(25, Scheme::Uniform).is_err());
        assert_eq!("probabilistic".parse::<Scheme>().unwrap(), Scheme::Probabilistic);
        assert!("round".parse::<Scheme>().is_err());
    }
}

//! Synthetic fixture distributions.
//!
//! A [`GeneratorSpec`] has a textual form `family:key=value[,key=value…]`,
//! for example `zipf:n=100000,s=1.0,pad=0` or `two_tier:n=10000,h=10,H=0.9`.
//!
//! | family       | keys                          |
//! |--------------|-------------------------------|
//! | `uniform`    | `n`                           |
//! | `zipf`       | `n`, `s` (exponent > 0)       |
//! | `geometric`  | `n`, `rho` (ratio in (0, 1))  |
//! | `two_tier`   | `n`, `h` (heavy count), `H` (heavy mass in (0, 1)) |
//! | `point_mass` | none                          |
//!
//! Every family also accepts `pad` (zero-probability elements appended after
//! the support) and `seed` (reserved; no family is randomized). Elements are
//! labelled `0..n` in generation order, padding after them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::distribution::{DiscreteDistribution, Element};
use crate::error::{Error, Result};
use crate::sum::neumaier_sum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Uniform { n: usize },
    /// `p(i) ∝ 1 / (i+1)^s`.
    Zipf { n: usize, s: f64 },
    /// `p(i) ∝ rho^i`.
    Geometric { n: usize, rho: f64 },
    /// `heavy` elements share `heavy_mass` equally, the other `n - heavy`
    /// share the rest.
    TwoTier {
        n: usize,
        heavy: usize,
        heavy_mass: f64,
    },
    PointMass,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Zipf { .. } => "zipf",
            Family::Geometric { .. } => "geometric",
            Family::TwoTier { .. } => "two_tier",
            Family::PointMass => "point_mass",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Family::Uniform { n }
            | Family::Zipf { n, .. }
            | Family::Geometric { n, .. }
            | Family::TwoTier { n, .. } => n,
            Family::PointMass => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub zero_pad: usize,
    pub seed: Option<u64>,
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Self {
        GeneratorSpec {
            family,
            zero_pad: 0,
            seed: None,
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(Family::Uniform { n })
    }

    pub fn zipf(n: usize, s: f64) -> Self {
        Self::new(Family::Zipf { n, s })
    }

    pub fn geometric(n: usize, rho: f64) -> Self {
        Self::new(Family::Geometric { n, rho })
    }

    pub fn two_tier(n: usize, heavy: usize, heavy_mass: f64) -> Self {
        Self::new(Family::TwoTier {
            n,
            heavy,
            heavy_mass,
        })
    }

    pub fn point_mass() -> Self {
        Self::new(Family::PointMass)
    }

    pub fn with_padding(mut self, zero_pad: usize) -> Self {
        self.zero_pad = zero_pad;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.family.n();
        if n == 0 {
            return Err(Error::out_of_range("n", 0.0, "n >= 1"));
        }
        if n.checked_add(self.zero_pad).is_none_or(|total| total > u32::MAX as usize) {
            return Err(Error::out_of_range(
                "n + pad",
                n as f64 + self.zero_pad as f64,
                "at most 2^32 - 1 elements",
            ));
        }
        match self.family {
            Family::Zipf { s, .. } if !(s > 0.0 && s.is_finite()) => {
                Err(Error::out_of_range("s", s, "a finite exponent > 0"))
            }
            Family::Geometric { rho, .. } if !(rho > 0.0 && rho < 1.0) => {
                Err(Error::out_of_range("rho", rho, "0 < rho < 1"))
            }
            Family::TwoTier { n, heavy, .. } if heavy == 0 || heavy >= n => {
                Err(Error::out_of_range("h", heavy as f64, "1 <= h < n"))
            }
            Family::TwoTier { heavy_mass, .. } if !(heavy_mass > 0.0 && heavy_mass < 1.0) => {
                Err(Error::out_of_range("H", heavy_mass, "0 < H < 1"))
            }
            _ => Ok(()),
        }
    }

    /// Probabilities of the `n` support elements, in label order.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let probs = match self.family {
            Family::Uniform { n } => alloc::vec![1.0 / n as f64; n],
            Family::Zipf { n, s } => normalize((1..=n).map(|i| 1.0 / libm::pow(i as f64, s)).collect()),
            Family::Geometric { n, rho } => {
                normalize((0..n).map(|i| libm::pow(rho, i as f64)).collect())
            }
            Family::TwoTier {
                n,
                heavy,
                heavy_mass,
            } => {
                let hp = heavy_mass / heavy as f64;
                let lp = (1.0 - heavy_mass) / (n - heavy) as f64;
                (0..n).map(|i| if i < heavy { hp } else { lp }).collect()
            }
            Family::PointMass => alloc::vec![1.0],
        };
        Ok(probs)
    }
}

/// Divides by the compensated (Neumaier) sum of the weights.
fn normalize(mut weights: Vec<f64>) -> Vec<f64> {
    let total = neumaier_sum(weights.iter().copied());
    for w in weights.iter_mut() {
        *w /= total;
    }
    weights
}

/// Builds and validates the distribution described by `spec`.
pub fn make_distribution(spec: &GeneratorSpec) -> Result<DiscreteDistribution> {
    let probs = spec.probabilities()?;
    let n = probs.len();
    let elements = probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| Element::new(i as u64, p))
        .chain((n..n + spec.zero_pad).map(|i| Element::new(i as u64, 0.0)))
        .collect();
    DiscreteDistribution::new(elements)
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        let mut keys: Vec<String> = match self.family {
            Family::Uniform { n } => alloc::vec![format!("n={n}")],
            Family::Zipf { n, s } => alloc::vec![format!("n={n}"), format!("s={s}")],
            Family::Geometric { n, rho } => alloc::vec![format!("n={n}"), format!("rho={rho}")],
            Family::TwoTier {
                n,
                heavy,
                heavy_mass,
            } => alloc::vec![format!("n={n}"), format!("h={heavy}"), format!("H={heavy_mass}")],
            Family::PointMass => Vec::new(),
        };
        if self.zero_pad > 0 {
            keys.push(format!("pad={}", self.zero_pad));
        }
        if let Some(seed) = self.seed {
            keys.push(format!("seed={seed}"));
        }
        if !keys.is_empty() {
            write!(f, ":{}", keys.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut n = None;
        let mut exponent = None;
        let mut rho = None;
        let mut heavy = None;
        let mut heavy_mass = None;
        let mut zero_pad = 0;
        let mut seed = None;

        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got `{pair}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => n = Some(parse_value(key, value)?),
                "s" => exponent = Some(parse_value(key, value)?),
                "rho" => rho = Some(parse_value(key, value)?),
                "h" => heavy = Some(parse_value(key, value)?),
                "H" => heavy_mass = Some(parse_value(key, value)?),
                "pad" => zero_pad = parse_value(key, value)?,
                "seed" => seed = Some(parse_value(key, value)?),
                _ => return Err(Error::InvalidSpec(format!("unknown key `{key}`"))),
            }
        }

        let allowed: &[&str] = match family {
            "uniform" => &["n"],
            "zipf" => &["n", "s"],
            "geometric" => &["n", "rho"],
            "two_tier" => &["n", "h", "H"],
            "point_mass" => &[],
            other => return Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        };
        let given = [
            ("n", n.is_some()),
            ("s", exponent.is_some()),
            ("rho", rho.is_some()),
            ("h", heavy.is_some()),
            ("H", heavy_mass.is_some()),
        ];
        for (key, present) in given {
            if present && !allowed.contains(&key) {
                return Err(Error::InvalidSpec(format!("`{key}` does not apply to {family}")));
            }
        }

        let need = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::InvalidSpec(format!("{family} requires `{key}`")))
        };
        let need_n = || {
            n.ok_or_else(|| Error::InvalidSpec(format!("{family} requires `n`")))
        };

        let family = match family {
            "uniform" => Family::Uniform { n: need_n()? },
            "zipf" => Family::Zipf {
                n: need_n()?,
                s: need("s", exponent)?,
            },
            "geometric" => Family::Geometric {
                n: need_n()?,
                rho: need("rho", rho)?,
            },
            "two_tier" => Family::TwoTier {
                n: need_n()?,
                heavy: heavy.ok_or_else(|| Error::InvalidSpec("two_tier requires `h`".to_string()))?,
                heavy_mass: need("H", heavy_mass)?,
            },
            _ => Family::PointMass,
        };
        let spec = GeneratorSpec {
            family,
            zero_pad,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidSpec(format!("cannot parse `{key}={value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Label;

    #[test]
    fn uniform_four() {
        let d = make_distribution(&GeneratorSpec::uniform(4)).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.elements().iter().all(|e| e.prob == 0.25));
    }

    #[test]
    fn two_tier_arithmetic() {
        let p = GeneratorSpec::two_tier(10, 2, 0.9).probabilities().unwrap();
        assert_eq!(&p[..2], &[0.45, 0.45]);
        assert!(p[2..].iter().all(|&x| (x - 0.0125).abs() < 1e-17));
    }

    #[test]
    fn zipf_three() {
        let p = GeneratorSpec::zipf(3, 1.0).probabilities().unwrap();
        let expected = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn geometric_is_decreasing() {
        let p = GeneratorSpec::geometric(50, 0.9).probabilities().unwrap();
        assert!(p.windows(2).all(|w| w[0] > w[1]));
        assert!((p[1] / p[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn point_mass_and_padding() {
        let d = make_distribution(&GeneratorSpec::point_mass().with_padding(3)).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.prob(Label(0)).unwrap(), 1.0);
        assert_eq!(d.prob(Label(3)).unwrap(), 0.0);
        assert_eq!(d.support_size(), 1);
    }

    #[test]
    fn large_zipf_mass_is_one() {
        let p = GeneratorSpec::zipf(1_000_000, 1.0).probabilities().unwrap();
        let total = neumaier_sum(p.iter().copied());
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(GeneratorSpec::uniform(0).validate().is_err());
        assert!(GeneratorSpec::zipf(10, 0.0).validate().is_err());
        assert!(GeneratorSpec::geometric(10, 1.0).validate().is_err());
        assert!(GeneratorSpec::two_tier(10, 10, 0.5).validate().is_err());
        assert!(GeneratorSpec::two_tier(10, 0, 0.5).validate().is_err());
        assert!(GeneratorSpec::two_tier(10, 2, 1.0).validate().is_err());
        assert!(make_distribution(&GeneratorSpec::uniform(0)).is_err());
    }

    #[test]
    fn parses_spec_strings() {
        let s: GeneratorSpec = "zipf:n=100000,s=1.0,pad=0".parse().unwrap();
        assert_eq!(s, GeneratorSpec::zipf(100_000, 1.0));
        let s: GeneratorSpec = "two_tier:n=10000,h=10,H=0.9,pad=5".parse().unwrap();
        assert_eq!(s, GeneratorSpec::two_tier(10_000, 10, 0.9).with_padding(5));
        let s: GeneratorSpec = "point_mass".parse().unwrap();
        assert_eq!(s, GeneratorSpec::point_mass());
        let s: GeneratorSpec = "geometric: n = 1000, rho = 0.99".parse().unwrap();
        assert_eq!(s, GeneratorSpec::geometric(1000, 0.99));
        let s: GeneratorSpec = "uniform:n=8,seed=3".parse().unwrap();
        assert_eq!(s.seed, Some(3));
    }

    #[test]
    fn rejects_malformed_strings() {
        for bad in [
            "",
            "cauchy:n=3",
            "uniform",
            "uniform:n=abc",
            "uniform:n=3,s=1",
            "zipf:n=3",
            "uniform:n",
            "uniform:n=3,color=red",
            "uniform:n=-1",
            "two_tier:n=10,h=2",
            "geometric:n=10,rho=1.5",
        ] {
            assert!(bad.parse::<GeneratorSpec>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn display_round_trips() {
        for spec in [
            GeneratorSpec::uniform(7),
            GeneratorSpec::zipf(100, 1.5).with_padding(2),
            GeneratorSpec::geometric(1000, 0.99),
            GeneratorSpec::two_tier(10_000, 10, 0.9),
            GeneratorSpec::point_mass().with_padding(9),
        ] {
            let text = spec.to_string();
            assert_eq!(text.parse::<GeneratorSpec>().unwrap(), spec, "{text}");
        }
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact non-negative rational `num/den` in lowest terms.
///
/// Relative thresholds live in the open interval (0, 1); see
/// [`Fraction::is_open_unit`]. Serialized as its display string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = num.gcd(&den).max(1);
        Some(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_open_unit(self) -> bool {
        self.num > 0 && self.num < self.den
    }

    /// `(self + other) / 2`.
    pub fn midpoint(self, other: Fraction) -> Fraction {
        let l = self.den.lcm(&other.den);
        let a = self.num as u128 * (l / self.den) as u128 + other.num as u128 * (l / other.den) as u128;
        let d = 2 * l as u128;
        let g = a.gcd(&d).max(1);
        Fraction {
            num: (a / g) as u64,
            den: (d / g) as u64,
        }
    }

    /// Whether `count / size` exceeds this fraction. An empty neighborhood
    /// (`size == 0`) never does.
    pub fn exceeded_by(self, count: u32, size: u32) -> bool {
        size > 0 && count as u128 * self.den as u128 > self.num as u128 * size as u128
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn terminating_decimal(self) -> Option<String> {
        let mut d = self.den;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d.is_multiple_of(2) {
            d /= 2;
            twos += 1;
        }
        while d.is_multiple_of(5) {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return None;
        }
        let digits = twos.max(fives);
        if digits > 18 {
            return None;
        }
        let scale = 10u128.pow(digits);
        let scaled = self.num as u128 * scale / self.den as u128;
        let int = scaled / scale;
        if digits == 0 {
            return Some(int.to_string());
        }
        let frac = scaled % scale;
        Some(format!("{int}.{frac:0width$}", width = digits as usize))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terminating_decimal() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.num, self.den),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseFractionError(pub String);

impl fmt::Display for ParseFractionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Fraction {
    type Err = ParseFractionError;

    /// Accepts `a/b`, decimals such as `0.312`, and plain integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseFractionError(format!("invalid number {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            return Fraction::new(a, b).ok_or_else(bad);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let scale = 10u64.pow(frac.len() as u32);
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(scale).and_then(|x| x.checked_add(frac_v)).ok_or_else(bad)?;
        Fraction::new(num, scale).ok_or_else(bad)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.num, self.den))
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!("0.5".parse::<Fraction>().unwrap(), Fraction::new(1, 2).unwrap());
        assert_eq!("0.312".parse::<Fraction>().unwrap(), Fraction::new(39, 125).unwrap());
        assert_eq!("5/12".parse::<Fraction>().unwrap(), Fraction::new(5, 12).unwrap());
        assert!("0.".parse::<Fraction>().is_ok());
        assert!("x".parse::<Fraction>().is_err());
        assert!("1/0".parse::<Fraction>().is_err());
    }

    #[test]
    fn displays_terminating_decimals() {
        assert_eq!(Fraction::new(1, 2).unwrap().to_string(), "0.5");
        assert_eq!(Fraction::new(39, 125).unwrap().to_string(), "0.312");
        assert_eq!(Fraction::new(5, 12).unwrap().to_string(), "5/12");
    }

    #[test]
    fn midpoint_and_comparison() {
        let a = Fraction::new(6, 13).unwrap();
        let b = Fraction::new(7, 13).unwrap();
        assert_eq!(a.midpoint(b), Fraction::new(1, 2).unwrap());
        assert!(a < b);
        let half = Fraction::new(1, 2).unwrap();
        assert!(half.exceeded_by(7, 13));
        assert!(!half.exceeded_by(6, 13));
        assert!(!half.exceeded_by(0, 0));
        assert!(!half.exceeded_by(1, 2));
    }
}

//! Parsing of the `--set` argument.

use std::fmt;
use std::str::FromStr;

use cfdim::assembly::WeightFamily;
use cfdim::solver::special_example_alphabet;
use cfdim::tail::InfiniteSet;
use cfdim::Alphabet;

#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    I1,
    I2,
    I3,
    /// `{1±i, 2±i, 3±i}` with the weights of the known-eigenfunction example.
    Special,
    Custom {
        path: String,
        digits: Vec<(f64, f64)>,
    },
}

impl SetSpec {
    pub fn alphabet(&self) -> Result<Alphabet, String> {
        Ok(match self {
            SetSpec::I1 => Alphabet::i1(),
            SetSpec::I2 => Alphabet::i2(),
            SetSpec::I3 => Alphabet::i3(),
            SetSpec::Special => special_example_alphabet(),
            SetSpec::Custom { digits, .. } => {
                Alphabet::custom(digits.clone()).map_err(|e| e.to_string())?
            }
        })
    }

    pub fn is_special(&self) -> bool {
        matches!(self, SetSpec::Special)
    }

    pub fn weights(&self) -> WeightFamily {
        if self.is_special() {
            WeightFamily::SpecialExample
        } else {
            WeightFamily::MobiusDerivative
        }
    }

    pub fn infinite_set(&self) -> Option<InfiniteSet> {
        match self {
            SetSpec::I1 => Some(InfiniteSet::I1),
            SetSpec::I2 => Some(InfiniteSet::I2),
            _ => None,
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::I1 => f.write_str("I1"),
            SetSpec::I2 => f.write_str("I2"),
            SetSpec::I3 => f.write_str("I3"),
            SetSpec::Special => f.write_str("special"),
            SetSpec::Custom { path, .. } => write!(f, "custom:{path}"),
        }
    }
}

/// Digits from text with one `re,im` pair per line; blank lines and `#`
/// comments are skipped.
pub fn parse_digits(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut digits = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(re, im)| Some((re.trim().parse().ok()?, im.trim().parse().ok()?)));
        match parsed {
            Some(d) => digits.push(d),
            None => return Err(format!("line {}: expected \"re,im\", got {line:?}", lineno + 1)),
        }
    }
    if digits.is_empty() {
        return Err("no digits given".into());
    }
    Ok(digits)
}

impl FromStr for SetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I1" | "i1" => Ok(SetSpec::I1),
            "I2" | "i2" => Ok(SetSpec::I2),
            "I3" | "i3" => Ok(SetSpec::I3),
            "special" => Ok(SetSpec::Special),
            _ => {
                let path = s.strip_prefix("custom:").ok_or_else(|| {
                    format!("unknown set {s:?}; expected I1, I2, I3, special or custom:<file>")
                })?;
                let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                let digits = parse_digits(&text).map_err(|e| format!("{path}: {e}"))?;
                Alphabet::custom(digits.clone()).map_err(|e| format!("{path}: {e}"))?;
                Ok(SetSpec::Custom {
                    path: path.to_string(),
                    digits,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sets() {
        assert_eq!("I1".parse::<SetSpec>().unwrap(), SetSpec::I1);
        assert_eq!("i3".parse::<SetSpec>().unwrap(), SetSpec::I3);
        assert!("special".parse::<SetSpec>().unwrap().is_special());
        assert!("I4".parse::<SetSpec>().is_err());
        assert!("custom:/nonexistent/file".parse::<SetSpec>().is_err());
    }

    #[test]
    fn digit_files() {
        let d = parse_digits("# digits\n1,0\n 2 , -1 # tail\n\n2,1\n").unwrap();
        assert_eq!(d, vec![(1.0, 0.0), (2.0, -1.0), (2.0, 1.0)]);
        assert!(parse_digits("1;0").is_err());
        assert!(parse_digits("# nothing\n").is_err());
    }
}

//! Run parameters: TOML file merged with command-line overrides.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clcd_core::analysis::{AnalysisConfig, Scheme};
use clcd_core::Rational64;
use serde::Deserialize;

/// A number written as an integer, a decimal or a fraction `a/b`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational64> {
        match self {
            Number::Int(n) => Ok(Rational64::from_integer(*n)),
            Number::Float(x) => parse_rational(&x.to_string()),
            Number::Text(s) => parse_rational(s),
        }
    }
}

/// Parse `12`, `12/7` or `1.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (i64, i64) = (n.trim().parse()?, d.trim().parse()?);
        if d == 0 {
            bail!("zero denominator in {s:?}");
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            bail!("cannot read {s:?} as an exact decimal");
        }
        let den = 10i64.pow(frac.len() as u32);
        let neg = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse()? };
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse()? };
        let f = if neg { -f } else { f };
        return Ok(Rational64::new(whole * den + f, den));
    }
    Ok(Rational64::from_integer(s.parse().with_context(|| format!("not a number: {s:?}"))?))
}

/// Keys accepted in a config file.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "K")]
    pub users: Option<usize>,
    #[serde(rename = "N")]
    pub files: Option<usize>,
    pub t: Option<usize>,
    #[serde(rename = "M")]
    pub cache: Option<Number>,
    pub gamma: Option<f64>,
    #[serde(rename = "N_r")]
    pub uncached: Option<usize>,
    pub scheme: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub users: usize,
    pub files: usize,
    pub level: usize,
    pub cache: Rational64,
    pub gamma: f64,
    pub uncached: Option<usize>,
    pub scheme: Option<Scheme>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            users: 7,
            files: 1000,
            level: 2,
            cache: Rational64::from_integer(200),
            gamma: 0.8,
            uncached: None,
            scheme: None,
        }
    }
}

impl Params {
    /// Defaults, then the file, then the overrides.
    pub fn resolve(file: FileConfig, over: FileConfig) -> Result<Self> {
        let mut p = Params::default();
        for c in [file, over] {
            p.users = c.users.unwrap_or(p.users);
            p.files = c.files.unwrap_or(p.files);
            p.level = c.t.unwrap_or(p.level);
            if let Some(m) = c.cache {
                p.cache = m.to_rational()?;
            }
            p.gamma = c.gamma.unwrap_or(p.gamma);
            p.uncached = c.uncached.or(p.uncached);
            if let Some(s) = c.scheme {
                p.scheme = Some(s.parse()?);
            }
        }
        if p.cache < Rational64::from_integer(0) || p.cache > Rational64::from_integer(p.files as i64) {
            bail!("M = {} must lie in [0, N = {}]", p.cache, p.files);
        }
        if p.gamma.is_nan() || p.gamma < 0.0 {
            bail!("gamma = {} must be >= 0", p.gamma);
        }
        Ok(p)
    }

    pub fn analysis(&self) -> AnalysisConfig {
        let c = AnalysisConfig::new(self.users, self.files, self.level, self.cache, self.gamma);
        match self.uncached {
            Some(n) => c.with_uncached(n),
            None => c,
        }
    }

    /// Scheme for delivery commands: CL(2,1,0) at t = 2, exact CL(t,1,0) otherwise.
    pub fn delivery_scheme(&self) -> Scheme {
        self.scheme.unwrap_or(if self.level == 2 { Scheme::Cl210 } else { Scheme::ClTExact })
    }
}

/// `a..b` (exclusive) or `a..=b`.
pub fn parse_seed_range(s: &str) -> Result<std::ops::Range<u64>> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        let n: u64 = s.trim().parse()?;
        return Ok(n..n + 1);
    };
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
    let end = if inclusive { b + 1 } else { b };
    if end <= a {
        bail!("empty seed range {s:?}");
    }
    Ok(a..end)
}

/// `lo:hi:step` or a comma list of values.
pub fn parse_cache_range(s: &str) -> Result<Vec<Rational64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (parse_rational(lo)?, parse_rational(hi)?, parse_rational(step)?);
            if step <= Rational64::from_integer(0) {
                bail!("step must be positive");
            }
            let mut v = Vec::new();
            let mut m = lo;
            while m <= hi {
                v.push(m);
                m += step;
            }
            Ok(v)
        }
        [list] => list.split(',').map(parse_rational).collect(),
        _ => bail!("expected lo:hi:step or a comma list, got {s:?}"),
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',').map(|x| Ok(x.trim().parse::<T>()?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("12/7").unwrap(), r(12, 7));
        assert_eq!(parse_rational("140").unwrap(), r(140, 1));
        assert_eq!(parse_rational("1.25").unwrap(), r(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_seed_range("0..10").unwrap(), 0..10);
        assert_eq!(parse_seed_range("3..=4").unwrap(), 3..5);
        assert_eq!(parse_seed_range("7").unwrap(), 7..8);
        assert!(parse_seed_range("5..5").is_err());
        let m = parse_cache_range("140:280:35").unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m[4], r(280, 1));
        assert_eq!(parse_cache_range("12/7,2").unwrap(), vec![r(12, 7), r(2, 1)]);
        assert_eq!(parse_list::<f64>("0.7, 0.85").unwrap(), vec![0.7, 0.85]);
    }

    #[test]
    fn file_then_overrides() {
        let file: FileConfig = toml::from_str("K = 7\nN = 49\nt = 2\nM = \"12/7\"\ngamma = 0.7\nN_r = 3\nscheme = \"cl210\"").unwrap();
        let over = FileConfig { files: Some(7), ..Default::default() };
        let p = Params::resolve(file, over).unwrap();
        assert_eq!((p.users, p.files, p.cache, p.uncached), (7, 7, r(12, 7), Some(3)));
        assert_eq!(p.scheme, Some(Scheme::Cl210));
        let p = Params::resolve(toml::from_str("M = 2.5").unwrap(), FileConfig::default()).unwrap();
        assert_eq!(p.cache, r(5, 2));
        assert!(toml::from_str::<FileConfig>("L = 3").is_err());
        let bad: FileConfig = toml::from_str("N = 10\nM = 11").unwrap();
        assert!(Params::resolve(bad, FileConfig::default()).is_err());
    }
}

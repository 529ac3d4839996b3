//! Option resolution: command-line flags override a key=value config
//! file, which overrides built-in defaults (the two-link reference
//! network). The default seed can also come from `LINEDELAY_SEED`.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use linedelay_core::model::NetworkConfig;

/// Built-in defaults: two links (0.5, 0.3), a 50-packet batch, GF(2^8).
pub const DEFAULT_LINKS: [f64; 2] = [0.5, 0.3];
pub const DEFAULT_BATCH: u64 = 50;
pub const DEFAULT_FIELD_EXPONENT: u32 = 8;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_T: u64 = 100;
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const SEED_ENV_VAR: &str = "LINEDELAY_SEED";

/// One layer of optional settings (from flags or from a file).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub links: Option<Vec<f64>>,
    pub n: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub field_exponent: Option<u32>,
    pub delta: Option<f64>,
    pub t: Option<u64>,
    pub n_range: Option<(u64, u64)>,
}

impl Overrides {
    /// Layer `self` on top of `base` (values in `self` win).
    fn over(self, base: Overrides) -> Overrides {
        Overrides {
            links: self.links.or(base.links),
            n: self.n.or(base.n),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            field_exponent: self.field_exponent.or(base.field_exponent),
            delta: self.delta.or(base.delta),
            t: self.t.or(base.t),
            n_range: self.n_range.or(base.n_range),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: NetworkConfig,
    pub trials: u64,
    pub delta: f64,
    pub t: u64,
    pub n_range: (u64, u64),
}

/// Resolve flags over file over environment/defaults, then validate.
pub fn resolve(flags: Overrides, file: Option<&Path>) -> Result<Settings> {
    let mut layered = flags;
    if let Some(path) = file {
        layered = layered.over(parse_file(path)?);
    }
    let env_seed = match std::env::var(SEED_ENV_VAR) {
        Ok(s) => Some(
            s.parse::<u64>()
                .with_context(|| format!("{SEED_ENV_VAR} must be an unsigned integer, got {s:?}"))?,
        ),
        Err(_) => None,
    };
    let config = NetworkConfig::new(
        layered.links.unwrap_or_else(|| DEFAULT_LINKS.to_vec()),
        layered.n.unwrap_or(DEFAULT_BATCH),
        layered.field_exponent.unwrap_or(DEFAULT_FIELD_EXPONENT),
        layered.seed.or(env_seed).unwrap_or(DEFAULT_SEED),
    )
    .validate()?;
    Ok(Settings {
        config,
        trials: layered.trials.unwrap_or(DEFAULT_TRIALS),
        delta: layered.delta.unwrap_or(DEFAULT_DELTA),
        t: layered.t.unwrap_or(DEFAULT_T),
        n_range: layered.n_range.unwrap_or((1, 40)),
    })
}

/// Parse a comma-separated probability list.
pub fn parse_links(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid probability {tok:?} in links list"))
        })
        .collect()
}

/// Parse an inclusive `a:b` batch-size range.
pub fn parse_n_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("n-range must look like a:b, got {s:?}"))?;
    let lo: u64 = a.trim().parse().context("n-range start")?;
    let hi: u64 = b.trim().parse().context("n-range end")?;
    if lo == 0 || hi < lo {
        bail!("n-range must satisfy 1 <= a <= b, got {lo}:{hi}");
    }
    Ok((lo, hi))
}

/// Simple `key = value` file, `#` comments, blank lines ignored.
fn parse_file(path: &Path) -> Result<Overrides> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let ctx = || format!("{}:{}: bad value for {key}", path.display(), lineno + 1);
        match key {
            "links" => o.links = Some(parse_links(value)?),
            "n" => o.n = Some(value.parse().with_context(ctx)?),
            "trials" => o.trials = Some(value.parse().with_context(ctx)?),
            "seed" => o.seed = Some(value.parse().with_context(ctx)?),
            "field_exponent" => o.field_exponent = Some(value.parse().with_context(ctx)?),
            "delta" => o.delta = Some(value.parse().with_context(ctx)?),
            "t" => o.t = Some(value.parse().with_context(ctx)?),
            "n_range" => o.n_range = Some(parse_n_range(value)?),
            other => bail!(
                "{}:{}: unknown key {other:?} (expected links, n, trials, seed, field_exponent, delta, t, n_range)",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_are_the_reference_network() {
        let s = resolve(Overrides::default(), None).unwrap();
        assert_eq!(s.config.erasure_probs, vec![0.5, 0.3]);
        assert_eq!(s.config.batch_size, 50);
        assert_eq!(s.config.field_exponent, 8);
        assert_eq!(s.trials, 100_000);
    }

    #[test]
    fn flags_beat_file_beats_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# reference\nlinks = 0.2,0.1\nn = 7\ntrials = 999").unwrap();
        let flags = Overrides {
            n: Some(3),
            ..Default::default()
        };
        let s = resolve(flags, Some(f.path())).unwrap();
        assert_eq!(s.config.batch_size, 3); // flag wins
        assert_eq!(s.config.erasure_probs, vec![0.2, 0.1]); // file wins
        assert_eq!(s.trials, 999);
    }

    #[test]
    fn bad_file_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "bogus = 1").unwrap();
        let err = resolve(Overrides::default(), Some(f.path())).unwrap_err();
        assert!(format!("{err:#}").contains("unknown key"));
    }

    #[test]
    fn invalid_probabilities_fail_validation() {
        let flags = Overrides {
            links: Some(vec![1.0]),
            ..Default::default()
        };
        let err = resolve(flags, None).unwrap_err();
        assert!(format!("{err:#}").contains("erasure probability"));
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_n_range("1:40").unwrap(), (1, 40));
        assert_eq!(parse_n_range(" 3 : 12 ").unwrap(), (3, 12));
        assert!(parse_n_range("5").is_err());
        assert!(parse_n_range("0:4").is_err());
        assert!(parse_n_range("9:2").is_err());
        assert_eq!(parse_links("0.5, 0.3").unwrap(), vec![0.5, 0.3]);
        assert!(parse_links("0.5,x").is_err());
    }
}

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use consta::GaloisRing;

#[derive(Parser, Debug)]
#[command(name = "consta", version, about = "Type (1) constacyclic codes of length 4p^s over Galois rings")]
pub struct Cli {
    /// Ring as `p,a,m[,f0,f1,...]`; `f` is the monic modulus, constant term first
    #[arg(long, global = true, value_parser = parse_ring)]
    pub ring: Option<Arc<GaloisRing>>,

    /// Unit lambda as a constant-first coefficient list, e.g. `12` or `1,1`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,

    /// Length exponent: codes have length 4p^s
    #[arg(long, global = true, default_value_t = 1)]
    pub s: u32,

    /// Code exponent: the code is <(x^4 - alpha)^i>
    #[arg(long, global = true)]
    pub i: Option<usize>,

    /// Largest code that may be enumerated
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: u64,

    /// Build chain contexts even when the residue quartic is reducible
    #[arg(long, global = true)]
    pub force: bool,

    /// Square root of lambda for the CRT commands; searched for when absent
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub output: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Teichmüller set, generator and unit counts of the ring
    RingInfo,
    /// Decompose a unit as xi_0 + p xi_1 + p^2 z
    Classify {
        /// Element to classify; defaults to --lambda
        value: Option<String>,
    },
    /// Invert a unit and compare the closed-form inverses
    Invert {
        /// Element to invert; defaults to --lambda
        value: Option<String>,
    },
    /// Inspect the code <(x^4 - alpha)^i>
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Split codes for a square lambda = delta^2
    Crt {
        #[command(subcommand)]
        action: CrtAction,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Subcommand, Debug)]
pub enum CodeAction {
    Info,
    Dual,
    Distances,
    RtDistribution,
    Enumerate,
}

#[derive(Subcommand, Debug)]
pub enum CrtAction {
    Idempotents,
    /// Project a word onto the two half-length rings
    Split {
        /// Word as `c0;c1;...`, or `c0,c1,...` when m = 1
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Recombine two half-length words
    Join {
        #[arg(long, allow_hyphen_values = true)]
        first: String,
        #[arg(long, allow_hyphen_values = true)]
        second: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    InverseLemma,
    Expansion,
    Chain,
    Dual,
    Selfdual,
    Multi,
    Rt,
    Hamming,
    Distribution,
    Crt,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::InverseLemma,
        Suite::Expansion,
        Suite::Chain,
        Suite::Dual,
        Suite::Selfdual,
        Suite::Multi,
        Suite::Rt,
        Suite::Hamming,
        Suite::Distribution,
        Suite::Crt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::InverseLemma => "inverse-lemma",
            Suite::Expansion => "expansion",
            Suite::Chain => "chain",
            Suite::Dual => "dual",
            Suite::Selfdual => "selfdual",
            Suite::Multi => "multi",
            Suite::Rt => "rt",
            Suite::Hamming => "hamming",
            Suite::Distribution => "distribution",
            Suite::Crt => "crt",
            Suite::All => "all",
        }
    }
}

fn parse_ring(text: &str) -> Result<Arc<GaloisRing>, String> {
    let mut fields = Vec::new();
    for (k, field) in text.split(',').enumerate() {
        let field = field.trim();
        let value = field
            .parse::<i64>()
            .map_err(|_| format!("field {} ({field:?}) is not an integer", k + 1))?;
        fields.push(value);
    }
    if fields.len() < 3 {
        return Err(format!("expected p,a,m[,f...], got {} field(s)", fields.len()));
    }
    let positive = |k: usize, what: &str| -> Result<u64, String> {
        u64::try_from(fields[k])
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("field {} ({what} = {}) must be positive", k + 1, fields[k]))
    };
    let p = positive(0, "p")?;
    let a = u32::try_from(positive(1, "a")?).map_err(|_| "field 2 (a) is too large".to_string())?;
    let m = usize::try_from(positive(2, "m")?).map_err(|_| "field 3 (m) is too large".to_string())?;
    let modulus: Option<Vec<u64>> = if fields.len() > 3 {
        let f = fields[3..]
            .iter()
            .enumerate()
            .map(|(k, &c)| u64::try_from(c).map_err(|_| format!("field {} ({c}) must be nonnegative", k + 4)))
            .collect::<Result<Vec<u64>, String>>()?;
        Some(f)
    } else {
        None
    };
    GaloisRing::new(p, a, m, modulus.as_deref())
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_specs() {
        let r = parse_ring("3,2,2,2,1,1").unwrap();
        assert_eq!((r.p(), r.a(), r.m()), (3, 2, 2));
        assert_eq!(parse_ring("4,1,1").unwrap_err(), "4 is not prime");
        assert!(parse_ring("5,x,1").unwrap_err().contains("field 2"));
        assert!(parse_ring("5,2").is_err());
        assert!(parse_ring("5,0,1").unwrap_err().contains("field 2"));
    }
}

//! The `jetred` command line.
//!
//! Exit codes: 0 success, 1 input outside the domain of the invariants,
//! 2 a verification suite failed, 3 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_decimal, Rational, TruncatedSeries};
use crate::conformal::{pullback_scalar_jet, ConformalElement};
use crate::error::{Error, Result};
use crate::extraction::{jet2_of, TestFunction};
use crate::minkowski::ScalarJet2;
use crate::mobius::{canonical_projection, canonical_projection_f64, symbolic_invariants, FLOAT_U1_THRESHOLD};
use crate::reduction::{canonicalize, invariant_report};
use crate::verify::{run_suite, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Largest accepted asymmetry `|u2 - u2ᵀ|` in a jet file.
pub const JET_FILE_SYMMETRY: f64 = 1e-12;

/// A 2-jet on disk:
///
/// ```json
/// {"n": 4, "u": [1, 0, 0, 0], "u2": [[0,0,0,0],[0,1,0,0],[0,0,2,0],[0,0,0,3]], "label": "example"}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetFile {
    pub n: usize,
    pub u: Vec<f64>,
    pub u2: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl JetFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: JetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.to_jet()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_jet(jet: &ScalarJet2, label: Option<String>) -> Self {
        JetFile {
            n: jet.dim(),
            u: jet.u().iter().copied().collect(),
            u2: jet.u2().row_iter().map(|r| r.iter().copied().collect()).collect(),
            label,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("jet file serializes")
    }

    /// Validates shape, finiteness and symmetry, then builds the jet.
    pub fn to_jet(&self) -> Result<ScalarJet2> {
        let n = self.n;
        if self.u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.u.len() });
        }
        if self.u2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.u2.len() });
        }
        if let Some(row) = self.u2.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        let u2 = DMatrix::from_fn(n, n, |i, j| self.u2[i][j]);
        if u2.iter().chain(self.u.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("jet file"));
        }
        let residual = (&u2 - u2.transpose()).amax();
        if residual > JET_FILE_SYMMETRY {
            return Err(Error::NotSymmetric { residual });
        }
        ScalarJet2::new(DVector::from_column_slice(&self.u), (&u2 + u2.transpose()) * 0.5)
    }
}

#[derive(Parser, Debug)]
#[command(name = "jetred", version, about = "Differential invariants of jets under Moebius and conformal groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Mobius,
    Minkowski,
    All,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// Number of trials per check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Master seed; defaults to $JETRED_SEED, then 0.
    #[arg(long, env = "JETRED_SEED", default_value_t = 0)]
    seed: u64,
    /// Replace every check's default tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Spacetime dimension for the Minkowski checks.
    #[arg(long, default_value_t = 4)]
    dim: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the invariants w3..wK as Laurent polynomials in u1..uK.
    MobiusSymbolic {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate w3..wk on a numeric jet u1,...,uk.
    MobiusProject {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        jet: Vec<String>,
        /// Use exact rational arithmetic (entries like 3/2 or 0.25).
        #[arg(long)]
        exact: bool,
    },
    /// Run the univariate checks.
    MobiusVerify(VerifyArgs),
    /// Invariant report for a 2-jet, read from a jet file or from a catalog
    /// function at a point.
    MinkInvariants(JetSource),
    /// Canonical spatial block and its spectrum for a 2-jet.
    MinkCanonicalize(JetSource),
    /// Run the Minkowski checks.
    MinkVerify(VerifyArgs),
    /// Run a named suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        args: VerifyArgs,
    },
}

#[derive(clap::Args, Debug)]
struct JetSource {
    /// Jet file (JSON with n, u, u2, optional label).
    #[arg(long, conflicts_with = "function")]
    jet: Option<PathBuf>,
    /// Catalog function file (JSON).
    #[arg(long, requires = "at")]
    function: Option<PathBuf>,
    /// Base point x0,x1,... for --function.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<f64>,
    /// Take the jet of f composed with this conformal word (see the word
    /// syntax in the guide).
    #[arg(long, requires = "function")]
    pullback: Option<String>,
}

impl JetSource {
    fn load(&self) -> Result<ScalarJet2> {
        if let Some(path) = &self.jet {
            return JetFile::load(path)?.to_jet();
        }
        let Some(path) = &self.function else {
            return Err(Error::InvalidArgument("one of --jet or --function is required".into()));
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let f = TestFunction::from_json(&text)?;
        match &self.pullback {
            None => jet2_of(&f, &self.at),
            Some(word) => {
                let g = ConformalElement::parse(word, f.dim())?;
                let phi = g.map_jet2_at(&DVector::from_column_slice(&self.at))?;
                pullback_scalar_jet(&jet2_of(&f, phi.value().as_slice())?, &phi)
            }
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_USAGE
    }
}

fn message(e: &Error) -> String {
    match e {
        Error::OrderTooLow { min: 3, .. } => "no invariants below order 3".to_string(),
        other => other.to_string(),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn project(jet: &[String], exact: bool) -> Result<String> {
    let mut out = String::new();
    if exact {
        let u = jet
            .iter()
            .map(|s| parse_decimal(s.trim()).ok_or_else(|| Error::Parse(format!("not a number: {s:?}"))))
            .collect::<Result<Vec<Rational>>>()?;
        check_order(u.len())?;
        for (i, w) in canonical_projection(&TruncatedSeries::from_derivatives(&u)?)?.iter().enumerate() {
            out.push_str(&format!("w{} = {w}\n", i + 3));
        }
    } else {
        let u = jet
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        check_order(u.len())?;
        let series = TruncatedSeries::from_derivatives(&u)?;
        for (i, w) in canonical_projection_f64(&series, FLOAT_U1_THRESHOLD)?.iter().enumerate() {
            out.push_str(&format!("w{} = {w}\n", i + 3));
        }
    }
    Ok(out)
}

fn check_order(order: usize) -> Result<()> {
    if order < 3 {
        return Err(Error::OrderTooLow { order, min: 3 });
    }
    Ok(())
}

fn verify(suite: Suite, args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let config = SuiteConfig { trials: args.trials, seed: args.seed, tol: args.tol, dim: args.dim };
    let report = run_suite(suite, &config)?;
    writeln!(out, "{}", to_json(&report)).ok();
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::MobiusSymbolic { order, format } => {
            let family = symbolic_invariants(order)?;
            match format {
                Format::Text => write!(out, "{}", family.render_text()).ok(),
                Format::Json => writeln!(out, "{}", family.render_json()).ok(),
            };
        }
        Command::MobiusProject { jet, exact } => {
            write!(out, "{}", project(&jet, exact)?).ok();
        }
        Command::MinkInvariants(source) => {
            writeln!(out, "{}", to_json(&invariant_report(&source.load()?)?)).ok();
        }
        Command::MinkCanonicalize(source) => {
            writeln!(out, "{}", to_json(&canonicalize(&source.load()?)?)).ok();
        }
        Command::MobiusVerify(args) => return verify(Suite::Mobius, &args, out),
        Command::MinkVerify(args) => return verify(Suite::Minkowski, &args, out),
        Command::Verify { suite, args } => {
            let suite = match suite {
                SuiteArg::Mobius => Suite::Mobius,
                SuiteArg::Minkowski => Suite::Minkowski,
                SuiteArg::All => Suite::All,
            };
            return verify(suite, &args, out);
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{e}").ok();
                    EXIT_OK
                }
                _ => {
                    write!(err, "{e}").ok();
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            writeln!(err, "error: {}", message(&e)).ok();
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("jetred").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn project_examples() {
        assert_eq!(call(&["mobius-project", "--jet", "1,0,5"]), (0, "w3 = 5\n".into(), String::new()));
        assert_eq!(call(&["mobius-project", "--jet", "1,1,1"]).1, "w3 = -0.5\n");
        assert_eq!(call(&["mobius-project", "--jet", "1,1,1", "--exact"]).1, "w3 = -1/2\n");
        assert_eq!(call(&["mobius-project", "--jet", "0,1,1"]).0, EXIT_DOMAIN);
        assert_eq!(call(&["mobius-project", "--jet", "1,x,1"]).0, EXIT_USAGE);
    }

    #[test]
    fn symbolic_order_two() {
        let (code, _, err) = call(&["mobius-symbolic", "--order", "2"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("no invariants below order 3"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["verify", "--suite", "mobius", "--trials", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["no-such-command"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn jet_file_validation() {
        let ok = r#"{"n":2,"u":[1,0],"u2":[[1,2],[2,3]]}"#;
        assert!(JetFile::parse(ok).is_ok());
        let asym = r#"{"n":2,"u":[1,0],"u2":[[1,2],[2.001,3]]}"#;
        assert!(matches!(JetFile::parse(asym), Err(Error::NotSymmetric { .. })));
        let short = r#"{"n":3,"u":[1,0],"u2":[[1,2],[2,3]]}"#;
        assert!(matches!(JetFile::parse(short), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(JetFile::parse(r#"{"n":2}"#), Err(Error::Parse(_))));
        let extra = r#"{"n":2,"u":[1,0],"u2":[[1,2],[2,3]],"x":1}"#;
        assert!(matches!(JetFile::parse(extra), Err(Error::Parse(_))));
    }
}

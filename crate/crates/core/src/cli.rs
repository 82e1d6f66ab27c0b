//! Command-line front end. Standard output carries JSON only.

use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::certificate::{self, Certificate, CertificateError};
use crate::elemgen::{self, DEFAULT_BFS_DEPTH};
use crate::lemma::{self, WitnessOptions};
use crate::norms::{self, FiniteGroupTable, NormError, DEFAULT_GROUP_CAP};
use crate::rings::{infinite_order_unit_with_cap, PrincipalIdeal, QuotientRing, RingDescriptor, RingElement, PELL_SEARCH_CAP};
use crate::sl2::Mat2;

#[derive(Debug, Parser)]
#[command(name = "sl2cert", version, about = "Certificates for elementary matrices and word norms in SL_2")]
struct Cli {
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ring descriptors and units.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Many-units certificates
    #[command(subcommand)]
    Unit(UnitCommand),
    /// Conjugate witnesses and the auxiliary matrix Y
    #[command(subcommand)]
    Lemma(LemmaCommand),
    /// Write A as a product of elementary matrices.
    Decompose {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "A")]
        a: String,
        #[arg(long, default_value_t = DEFAULT_BFS_DEPTH)]
        bfs_depth: usize,
    },
    /// Six-factor elementary word for diag(u, u^-1).
    HDecompose {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Word norms on finite quotients
    #[command(subcommand)]
    Norm(NormCommand),
    /// Re-check a certificate file, or standard input for "-".
    Verify { file: String },
}

#[derive(Debug, Args)]
struct RingArg {
    /// "Z", "Z[1/m]" or "Z[sqrtd]"
    #[arg(long)]
    ring: String,
}

#[derive(Debug, Subcommand)]
enum RingCommand {
    Info {
        #[command(flatten)]
        ring: RingArg,
        /// Also describe the quotients by c and c^2.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, default_value_t = PELL_SEARCH_CAP)]
        pell_cap: u64,
    },
}

#[derive(Debug, Subcommand)]
enum UnitCommand {
    /// Unit u = 1 mod c^2 with u^8 != 1.
    Find {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = PELL_SEARCH_CAP)]
        pell_cap: u64,
    },
}

#[derive(Debug, Subcommand)]
enum LemmaCommand {
    /// Four conjugates of A and A^-1 multiplying to E12((u^4 - u^-4) z).
    Witness {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "A")]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Defaults to the unit found for the (2,1) entry.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Write every diagonal conjugator factor as elementary matrices.
        #[arg(long)]
        elementary_conjugators: bool,
    },
    /// The upper-triangular matrix Y and its ingredients.
    Y {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "A")]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
}

#[derive(Debug, Args)]
struct QuotientArgs {
    /// Generator of the ideal N.
    #[arg(long = "N", allow_hyphen_values = true)]
    n: String,
    /// Generators as "[[a,b],[c,d]];..."; defaults to E12(+-1), E21(+-1).
    /// The conjugation closure is used.
    #[arg(long)]
    gens: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GROUP_CAP)]
    group_cap: usize,
}

#[derive(Debug, Subcommand)]
enum NormCommand {
    /// Word norm of g in SL_2(R/NR).
    Bfs {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        quotient: QuotientArgs,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Norms of sampled E12(j), j in J_eps, against the classes of A and A^-1.
    LemmaBound {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "A")]
        a: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Exhaustive check of the norm axioms for a BFS word norm.
    Axioms {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        quotient: QuotientArgs,
    },
}

/// Exit status and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    module: &'static str,
    name: &'static str,
    message: String,
}

impl<E: Into<CertificateError>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        Failure { module: e.module(), name: e.name(), message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { module: "cli", name: "InvalidArgument", message }
}

enum Output {
    Plain(Value),
    Cert(Certificate),
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(Output::Plain(v)) => Outcome { code: 0, stdout: pretty(&v), stderr: String::new() },
        Ok(Output::Cert(cert)) => {
            let code = if cert.verified { 0 } else { 1 };
            let stderr = if cert.verified { String::new() } else { "certificate failed verification\n".into() };
            Outcome { code, stdout: cert.to_json_string() + "\n", stderr }
        }
        Err(f) => {
            let v = json!({"error": {"module": f.module, "name": f.name, "message": f.message}});
            Outcome { code: 1, stdout: pretty(&v), stderr: format!("error: {}\n", f.message) }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn ring_of(arg: &RingArg) -> Result<RingDescriptor, Failure> {
    Ok(arg.ring.parse::<RingDescriptor>()?)
}

fn element(ring: RingDescriptor, text: &str) -> Result<RingElement, Failure> {
    Ok(RingElement::parse(ring, text)?)
}

fn matrix(ring: RingDescriptor, text: &str) -> Result<Mat2, Failure> {
    Ok(Mat2::parse(ring, text)?)
}

fn unit_for(ring: RingDescriptor, a: &Mat2, u: Option<&str>) -> Result<RingElement, Failure> {
    match u {
        Some(u) => element(ring, u),
        None => Ok(lemma::find_unit(a.a21())?.u),
    }
}

/// `k >= 1` with `v^k = u`, for `v` of infinite order.
fn power_of(v: &RingElement, u: &RingElement) -> Option<u64> {
    let mut power = v.clone();
    for k in 1.. {
        if power == *u {
            return Some(k);
        }
        if power.height() > u.height() * 4u32 + 4u32 {
            return None;
        }
        power = &power * v;
    }
    None
}

fn group_with_generators(
    ring: RingDescriptor,
    args: &QuotientArgs,
) -> Result<(FiniteGroupTable, Vec<norms::GroupElement>), Failure> {
    let modulus = element(ring, &args.n)?;
    let group = FiniteGroupTable::with_cap(QuotientRing::of(modulus)?, args.group_cap)?;
    let matrices = match &args.gens {
        Some(text) => text.split(';').map(|m| matrix(ring, m.trim())).collect::<Result<Vec<_>, _>>()?,
        None => [1, -1]
            .into_iter()
            .flat_map(|x| {
                let x = RingElement::from_int(ring, x);
                [Mat2::upper(x.clone()), Mat2::lower(x)]
            })
            .collect(),
    };
    let images = matrices.iter().map(|m| group.image(m)).collect::<Result<Vec<_>, NormError>>()?;
    let generators = norms::conjugation_closure(&group, &images);
    Ok((group, generators))
}

fn read_input(file: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let read = if file == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(file).map(|t| text = t)
    };
    read.map_err(|e| Failure { module: "cli", name: "Io", message: format!("{file}: {e}") })?;
    Ok(text)
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Ring(RingCommand::Info { ring, c, pell_cap }) => {
            let r = ring_of(ring)?;
            let mut info = json!({"ring": r.to_string()});
            match r {
                RingDescriptor::Integers => {}
                RingDescriptor::Localized { m } => {
                    info["m"] = json!(m);
                    info["inverted_primes"] = json!(r.inverted_primes());
                }
                RingDescriptor::Quadratic { d } => info["d"] = json!(d),
            }
            info["infinite_order_unit"] = match infinite_order_unit_with_cap(r, *pell_cap) {
                Ok(v) => json!(v.to_string()),
                Err(e) => json!({"error": e.name()}),
            };
            if let Some(c) = c {
                let c = element(r, c)?;
                let q = QuotientRing::of(c.clone())?;
                let q2 = QuotientRing::of(&c * &c)?;
                info["c"] = json!(c.to_string());
                info["is_unit"] = json!(c.is_unit());
                info["index_c"] = json!(q.index().to_string());
                info["index_c_squared"] = json!(q2.index().to_string());
            }
            Ok(Output::Plain(info))
        }
        Command::Unit(UnitCommand::Find { ring, c, pell_cap }) => {
            let r = ring_of(ring)?;
            let cert = lemma::find_unit_with_cap(&element(r, c)?, *pell_cap)?;
            Ok(Output::Cert(certificate::many_units(&cert)))
        }
        Command::Lemma(LemmaCommand::Witness { ring, a, z, u, elementary_conjugators }) => {
            let r = ring_of(ring)?;
            let a = matrix(r, a)?;
            let u = unit_for(r, &a, u.as_deref())?;
            let options = WitnessOptions { elementary_conjugators: *elementary_conjugators };
            let w = lemma::lemma2_witness_with(&a, &u, &element(r, z)?, options)?;
            Ok(Output::Cert(certificate::lemma2_witness(&w)))
        }
        Command::Lemma(LemmaCommand::Y { ring, a, u }) => {
            let r = ring_of(ring)?;
            let a = matrix(r, a)?;
            let u = unit_for(r, &a, u.as_deref())?;
            let data = lemma::compute_y(&a, &u)?;
            Ok(Output::Plain(json!({
                "A": a.to_string(),
                "u": u.to_string(),
                "Y": data.y_matrix.to_string(),
                "q": data.q.to_string(),
                "t": data.t.to_string(),
                "x": data.x.to_string(),
                "y": data.y.to_string(),
            })))
        }
        Command::Decompose { ring, a, bfs_depth } => {
            let r = ring_of(ring)?;
            let d = elemgen::decompose_with(&matrix(r, a)?, *bfs_depth)?;
            Ok(Output::Cert(certificate::decomposition(&d)))
        }
        Command::HDecompose { ring, u } => {
            let r = ring_of(ring)?;
            let u = element(r, u)?;
            let d = elemgen::h_decomposition(&u)?;
            Ok(Output::Cert(certificate::h_decomposition(&u, &d)))
        }
        Command::Norm(NormCommand::Bfs { ring, quotient, g }) => {
            let r = ring_of(ring)?;
            let (group, generators) = group_with_generators(r, quotient)?;
            let target = group.image(&matrix(r, g)?)?;
            let table = norms::bfs_table(&group, &generators)?;
            Ok(Output::Plain(json!({
                "quotient": group.quotient().to_string(),
                "group_order": group.order(),
                "generating_set_size": generators.len(),
                "g": group.text(target),
                "norm": table.length(target).map_or(json!("inf"), |n| json!(n)),
                "histogram": table.histogram(),
                "unreachable": table.unreachable(),
            })))
        }
        Command::Norm(NormCommand::LemmaBound { ring, a, n, u, samples }) => {
            let r = ring_of(ring)?;
            let a = matrix(r, a)?;
            let cert = match u {
                None => lemma::find_unit(a.a21())?,
                Some(u) => {
                    let u = element(r, u)?;
                    let c = a.a21().clone();
                    let y = (&u - &RingElement::one(r)).divide_exact(&(&c * &c))?.ok_or_else(|| {
                        usage(format!("u = {u} is not 1 modulo c^2"))
                    })?;
                    let v = infinite_order_unit_with_cap(r, PELL_SEARCH_CAP)?;
                    let k = power_of(&v, &u).ok_or_else(|| usage(format!("u = {u} is not a positive power of {v}")))?;
                    lemma::ManyUnitsCertificate { c, v, k, u, y }
                }
            };
            let modulus = PrincipalIdeal::new(element(r, n)?)?;
            let report = norms::lemma_bound_experiment(&a, &cert, &modulus, *samples, cli.seed)?;
            Ok(Output::Cert(certificate::norm_experiment(&report)))
        }
        Command::Norm(NormCommand::Axioms { ring, quotient }) => {
            let r = ring_of(ring)?;
            let (group, generators) = group_with_generators(r, quotient)?;
            let table = norms::bfs_table(&group, &generators)?;
            let report = norms::check_norm_axioms(&group, &table.lengths);
            Ok(Output::Cert(certificate::axiom_report(&group, &table, &report)))
        }
        Command::Verify { file } => {
            let cert = Certificate::parse(&read_input(file)?)?;
            certificate::verify(&cert)?;
            Ok(Output::Plain(json!({
                "kind": cert.kind.label(),
                "ring": cert.ring.to_string(),
                "verified": true,
                "claimed_verified": cert.verified,
            })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2cert(args: &[&str]) -> Outcome {
        run(std::iter::once("sl2cert").chain(args.iter().copied()))
    }

    fn stdout_json(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn unit_find_example() {
        let o = sl2cert(&["unit", "find", "--ring", "Z[1/2]", "--c", "3"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = stdout_json(&o);
        assert_eq!(v["payload"]["u"], "64");
        assert_eq!(v["verified"], true);
    }

    #[test]
    fn unit_find_over_integers_fails() {
        let o = sl2cert(&["unit", "find", "--ring", "Z", "--c", "3"]);
        assert_eq!(o.code, 1);
        let v = stdout_json(&o);
        assert_eq!(v["error"]["name"], "NoInfiniteOrderUnit");
        assert_eq!(v["error"]["module"], "rings");
    }

    #[test]
    fn lemma_witness_example() {
        let o = sl2cert(&["lemma", "witness", "--ring", "Z[1/2]", "--A", "[[1,0],[3,1]]", "--z", "3"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(stdout_json(&o)["payload"]["factors"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(sl2cert(&["unit", "find", "--c", "3"]).code, 2);
        assert_eq!(sl2cert(&["frobnicate"]).code, 2);
        assert!(sl2cert(&["unit", "find", "--c", "3"]).stdout.is_empty());
    }

    #[test]
    fn lemma_bound_with_explicit_unit() {
        let o = sl2cert(&[
            "--seed", "5", "norm", "lemma-bound", "--ring", "Z[1/2]", "--A", "[[1,0],[3,1]]", "--N", "11", "--u", "64",
            "--samples", "8",
        ]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let o = sl2cert(&["norm", "lemma-bound", "--ring", "Z[1/2]", "--A", "[[1,0],[3,1]]", "--N", "7"]);
        assert_eq!(stdout_json(&o)["error"]["name"], "DegenerateQuotient");
    }

    #[test]
    fn norm_bfs_and_axioms() {
        let o = sl2cert(&["norm", "bfs", "--ring", "Z", "--N", "5", "--g", "[[-1,0],[0,-1]]"]);
        assert_eq!(stdout_json(&o)["norm"], 3);
        let o = sl2cert(&["norm", "axioms", "--ring", "Z", "--N", "3"]);
        assert_eq!(o.code, 0);
        assert_eq!(stdout_json(&o)["payload"]["all_passed"], true);
    }
}

//! Command-line front end. Every subcommand renders a JSON value; the pretty
//! form prints its `text` field (or a short summary) instead.

use crate::hecke::{Epsilon, Hecke};
use crate::induced::Induced;
use crate::laurent::LaurentPoly;
use crate::macpoly::Macdonald;
use crate::matweight::{similarity, BasisName, ConstMatrix, MatrixWeights, PolyMatrix};
use crate::params::{Exp, NLABELS};
use crate::rootdata::{parse_lat, Labelling, Lat, RootSystem, TypeName};
use crate::verify::{run_suite, SUITES};
use crate::weights::{order_prec, SeriesFrac, Weights};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "macdonald", version, about = "Nonsymmetric and intermediate Macdonald polynomials, computed exactly")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// A1, A2 or C1v-C1.
    #[arg(long = "type", global = true, default_value = "A1")]
    pub ty: TypeName,
    /// Subset of finite simple indices, comma separated.
    #[arg(long = "J", global = true, value_delimiter = ',')]
    pub j: Vec<usize>,
    /// One sign (+ or -) per element of J, in the same order.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub epsilon: Vec<String>,
    /// Truncation order N: series are checked through q0^N.
    #[arg(long, global = true, default_value_t = 8)]
    pub trunc: u32,
    /// Specialize the labels: one rational q-exponent per label orbit, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Pretty,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The nonsymmetric polynomial E_λ and its Y-eigenvalues.
    EPoly {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// The intermediate polynomial for (J, ε) at a J-dominant weight.
    PPoly {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// The truncated series (f, g).
    Inner {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Compares (P, P) against the norm scalars times (E, E).
    NormCheck {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Image of f in the module induced from the trivial character of H_J.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// The catalog matrix weight for (type, J).
    MatrixWeight {
        #[arg(long, default_value = "steinberg")]
        basis: BasisName,
        /// Constant change of basis R: rows separated by ';', entries by ','.
        #[arg(long, allow_hyphen_values = true)]
        similarity: Option<String>,
    },
    /// Runs a named invariant suite (or `all`).
    Verify {
        #[arg(long)]
        suite: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("rootdata: {0}")]
    Root(#[from] crate::rootdata::RootError),
    #[error("laurent: {0}")]
    Laurent(#[from] crate::laurent::LaurentError),
    #[error("params: {0}")]
    Param(#[from] crate::params::ParamError),
    #[error("parse: {0}")]
    Parse(#[from] crate::params::text::ParseError),
    #[error("hecke: {0}")]
    Hecke(#[from] crate::hecke::HeckeError),
    #[error("macpoly: {0}")]
    Mac(#[from] crate::macpoly::MacError),
    #[error("induced: {0}")]
    Induced(#[from] crate::induced::InducedError),
    #[error("matweight: {0}")]
    Mat(#[from] crate::matweight::MatError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Output of a run: the JSON value, its pretty rendering and whether a check failed.
pub struct Outcome {
    pub json: Value,
    pub pretty: String,
    pub failed: bool,
}

impl Outcome {
    fn ok(json: Value, pretty: String) -> Outcome {
        Outcome { json, pretty, failed: false }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed {
            1
        } else {
            0
        }
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json"),
            Format::Pretty => self.pretty.clone(),
        }
    }
}

/// Constants print as scalars, everything else in the canonical `(c)*e[..]` form.
pub fn poly_text(rank: usize, f: &LaurentPoly) -> String {
    match f.terms().iter().next() {
        Some((l, c)) if f.len() == 1 && *l == [0, 0] => c.to_string(),
        _ => f.text(rank),
    }
}

fn poly_json(rank: usize, f: &LaurentPoly) -> Value {
    let terms: Vec<Value> =
        f.terms().iter().map(|(l, c)| json!({"weight": &l[..rank], "coeff": c.to_string()})).collect();
    json!({"text": poly_text(rank, f), "terms": terms})
}

fn series_json(s: &SeriesFrac, prec: i64) -> Value {
    let q_order = Rational64::new(prec, crate::params::SCALE);
    json!({"num": s.num.to_string(), "den": s.den.to_string(), "known_below_q": q_order.to_string()})
}

fn labelling(rs: &RootSystem, cfg: &RunConfig) -> Result<Labelling, CliError> {
    let Some(vals) = &cfg.labels else {
        return Ok(rs.formal_labels());
    };
    if vals.len() != rs.norbits {
        return Err(CliError::Usage(format!("{} has {} label orbits, got {} values", rs.ty, rs.norbits, vals.len())));
    }
    assert!(rs.norbits <= NLABELS);
    vals.iter()
        .map(|v| {
            let r: Rational64 = v.trim().parse().map_err(|_| CliError::Usage(format!("bad label exponent {v:?}")))?;
            Ok(Exp::from_rationals(r, &[], crate::params::SCALE)?)
        })
        .collect::<Result<Vec<_>, CliError>>()
        .map(Labelling)
}

fn epsilon(rs: &RootSystem, cfg: &RunConfig) -> Result<Epsilon, CliError> {
    if !cfg.epsilon.is_empty() && cfg.epsilon.len() != cfg.j.len() {
        return Err(CliError::Usage(format!("--epsilon needs one sign per element of J ({})", cfg.j.len())));
    }
    let mut neg = Vec::new();
    for (i, s) in cfg.epsilon.iter().enumerate() {
        match s.trim() {
            "+" | "+1" | "1" => {}
            "-" | "-1" => neg.push(cfg.j[i]),
            o => return Err(CliError::Usage(format!("bad sign {o:?}"))),
        }
    }
    Ok(Epsilon::new(rs, &cfg.j, &neg)?)
}

fn lattice(rs: &RootSystem, s: &str) -> Result<Lat, CliError> {
    Ok(parse_lat(rs.rank, s)?)
}

fn parse_matrix(s: &str) -> Result<ConstMatrix, CliError> {
    s.split(';')
        .map(|row| row.split(',').map(|x| Ok(crate::params::text::parse_kscalar(x.trim())?)).collect())
        .collect()
}

fn matrix_json(rank: usize, m: &PolyMatrix) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(poly_text(rank, x))).collect())).collect())
}

fn matrix_pretty(rank: usize, m: &PolyMatrix) -> String {
    let mut out = Vec::new();
    for (i, r) in m.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            out.push(format!("[{},{}] {}", i + 1, j + 1, poly_text(rank, x)));
        }
    }
    out.join("\n")
}

fn word_key(rs: &RootSystem, v: usize) -> String {
    let w = &rs.w0().word[v];
    if w.is_empty() {
        "e".into()
    } else {
        w.iter().map(|i| format!("s{i}")).collect()
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rs = RootSystem::catalog(cfg.ty);
    for &i in &cfg.j {
        if i == 0 || i > rs.rank {
            return Err(CliError::Usage(format!("J index {i} outside 1..={}", rs.rank)));
        }
    }
    let k = labelling(&rs, cfg)?;
    let rank = rs.rank;
    let n = cfg.trunc;
    Ok(match cmd {
        Command::EPoly { lambda } => {
            let lam = lattice(&rs, lambda)?;
            let m = Macdonald::new(&rs, k);
            let e = m.e(&lam)?;
            let eigen: Vec<Value> = e
                .eigen
                .iter()
                .map(|(b, v)| json!({"y": &b[..rank], "eigenvalue": v.to_string()}))
                .collect();
            Outcome::ok(
                json!({"type": rs.ty.to_string(), "lambda": &lam[..rank], "poly": poly_json(rank, &e.poly), "eigenvalues": eigen}),
                poly_text(rank, &e.poly),
            )
        }
        Command::PPoly { lambda } => {
            let lam = lattice(&rs, lambda)?;
            let eps = epsilon(&rs, cfg)?;
            let m = Macdonald::new(&rs, k);
            let p = m.p_poly(&eps, &lam)?;
            let lead = if p.is_zero() {
                Value::Null
            } else {
                let (l, c) = p.leading_term(&rs)?;
                json!({"weight": &l[..rank], "coeff": c.to_string()})
            };
            Outcome::ok(
                json!({"type": rs.ty.to_string(), "J": cfg.j, "epsilon_negative": eps.neg, "lambda": &lam[..rank],
                       "poly": poly_json(rank, &p), "leading": lead}),
                poly_text(rank, &p),
            )
        }
        Command::Inner { f, g } => {
            let f = LaurentPoly::parse(rank, f)?;
            let g = LaurentPoly::parse(rank, g)?;
            let w = Weights::new(&rs, k);
            let s = w.inner_frac(&f, &g, n);
            let t = s.expand(w.unit());
            Outcome::ok(
                json!({"type": rs.ty.to_string(), "trunc": n, "series": t.to_string(),
                       "fraction": series_json(&s, order_prec(&rs, n))}),
                t.to_string(),
            )
        }
        Command::NormCheck { lambda } => {
            let lam = lattice(&rs, lambda)?;
            let eps = epsilon(&rs, cfg)?;
            let m = Macdonald::new(&rs, k.clone());
            let w = Weights::new(&rs, k);
            let r = m.norm_check(&w, &eps, &lam, n)?;
            let prec = order_prec(&rs, n);
            let pretty = format!(
                "{}\nderived scalar: {}\ndisplayed scalar {}: {}\nproof's last-line scalar {}: {}",
                if r.derived_ok { "pass" } else { "FAIL" },
                r.derived,
                if r.stated_ok { "agrees" } else { "disagrees" },
                r.stated,
                if r.proof_form_ok { "agrees" } else { "disagrees" },
                r.proof_form
            );
            Outcome {
                json: json!({"type": rs.ty.to_string(), "J": cfg.j, "epsilon_negative": eps.neg, "lambda": &lam[..rank],
                             "trunc": n, "pass": r.derived_ok,
                             "derived": {"scalar": r.derived.to_string(), "agrees": r.derived_ok},
                             "displayed": {"scalar": r.stated.to_string(), "agrees": r.stated_ok},
                             "proof_last_line": {"scalar": r.proof_form.to_string(), "agrees": r.proof_form_ok},
                             "p_norm": series_json(&r.lhs, prec), "e_norm": series_json(&r.e_norm, prec)}),
                pretty,
                failed: !r.derived_ok,
            }
        }
        Command::Gamma { f } => {
            let f = LaurentPoly::parse(rank, f)?;
            let h = Hecke::new(&rs, k);
            let ind = Induced::new(&h, &cfg.j);
            let x = ind.gamma(&f)?;
            let mut coords = serde_json::Map::new();
            let mut lines = Vec::new();
            for &v in &ind.reps {
                let c = x.coord(v);
                lines.push(format!("{}: {}", word_key(&rs, v), poly_text(rank, &c)));
                coords.insert(word_key(&rs, v), poly_json(rank, &c));
            }
            Outcome::ok(json!({"type": rs.ty.to_string(), "J": cfg.j, "coords": coords}), lines.join("\n"))
        }
        Command::MatrixWeight { basis, similarity: r } => {
            let mw = MatrixWeights::new(&rs, k);
            let b = mw.basis(&cfg.j, *basis)?;
            let m = mw.weight_matrix(&b)?;
            let mut j = json!({"type": rs.ty.to_string(), "J": cfg.j, "basis": basis.to_string(), "matrix": matrix_json(rank, &m)});
            let mut pretty = matrix_pretty(rank, &m);
            if let Some(r) = r {
                let s = similarity(&m, &parse_matrix(r)?)?;
                j["similarity"] = matrix_json(rank, &s);
                pretty = format!("{pretty}\nafter similarity:\n{}", matrix_pretty(rank, &s));
            }
            Outcome::ok(j, pretty)
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for s in names {
                reports.push(run_suite(s, &rs, n).ok_or_else(|| {
                    CliError::Usage(format!("unknown suite {s:?}; expected one of {} or all", SUITES.join(", ")))
                })?);
            }
            let failed = reports.iter().any(|r| !r.passed());
            let mut lines = Vec::new();
            for r in &reports {
                lines.push(format!(
                    "{} {}: {} ({} cases)",
                    r.suite,
                    r.ty,
                    if r.passed() { "pass" } else { "FAIL" },
                    r.cases
                ));
                lines.extend(r.failures.iter().map(|f| format!("  counterexample: {f}")));
                lines.extend(r.notes.iter().map(|f| format!("  note: {f}")));
            }
            Outcome { json: json!({"pass": !failed, "trunc": n, "suites": reports}), pretty: lines.join("\n"), failed }
        }
    })
}

/// Parses `args`, runs, and returns the exit code with everything that should be printed.
pub fn main_with(args: &[String]) -> (i32, String, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    match run(&cli.cmd, &cli.config) {
        Ok(o) => (o.exit_code(), o.render(cli.config.format), String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &str) -> (i32, String, String) {
        let v: Vec<String> = std::iter::once("macdonald").chain(args.split_whitespace()).map(String::from).collect();
        main_with(&v)
    }

    #[test]
    fn trivial_e_poly() {
        assert_eq!(go("e-poly --type A1 --lambda 0"), (0, "1".into(), String::new()));
    }

    #[test]
    fn p_poly_leading_coefficient() {
        let (code, out, _) = go("p-poly --type A2 --J 2 --lambda 1,0 --format json");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["leading"]["coeff"], "1");
        assert_eq!(v["leading"]["weight"], json!([1, 0]));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(go("e-poly --type B7 --lambda 0").0, 2);
        assert_eq!(go("e-poly --type A2 --lambda 0").0, 2);
        assert_eq!(go("p-poly --type A2 --J 3 --lambda 1,0").0, 2);
        assert_eq!(go("verify --suite nonsense").0, 2);
        let (code, _, err) = go("p-poly --type A2 --J 2 --lambda 0,-1");
        assert_eq!(code, 2);
        assert!(err.starts_with("error: macpoly"), "{err}");
    }

    #[test]
    fn output_is_deterministic() {
        let a = go("p-poly --type C1v-C1 --lambda -2 --format json");
        let b = go("p-poly --type C1v-C1 --lambda -2 --format json");
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trips_through_text() {
        let (_, out, _) = go("e-poly --type A2 --lambda -1,1 --format json");
        let v: Value = serde_json::from_str(&out).unwrap();
        let rs = RootSystem::catalog(TypeName::A2);
        let f = LaurentPoly::parse(2, v["poly"]["text"].as_str().unwrap()).unwrap();
        assert_eq!(f, Macdonald::formal(&rs).e(&[-1, 1]).unwrap().poly);
        let (_, one, _) = go("e-poly --type A2 --lambda 0,0 --format json");
        let one: Value = serde_json::from_str(&one).unwrap();
        assert_eq!(LaurentPoly::parse(2, one["poly"]["text"].as_str().unwrap()).unwrap(), LaurentPoly::one());
        for t in v["poly"]["terms"].as_array().unwrap() {
            let c = crate::params::text::parse_kscalar(t["coeff"].as_str().unwrap()).unwrap();
            let l = [t["weight"][0].as_i64().unwrap(), t["weight"][1].as_i64().unwrap()];
            assert_eq!(f.terms()[&l], c);
        }
    }
}
